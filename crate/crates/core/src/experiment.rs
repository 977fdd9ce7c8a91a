//! Dispatch of a flat [`ExperimentConfig`] to the library, shared by the CLI
//! and by config files replayed with `tomtree run`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::contour::{contour_distance, encode, time_change, PljContour};
use crate::error::{Error, Result};
use crate::grid::fmt_f64;
use crate::io::{
    contour_svg, contour_to_csv, ecdf_svg, load_contour, load_tree, path_to_csv, reports_to_csv, tree_to_jsonl,
    ExperimentConfig,
};
use crate::levy::{
    kill_at_zero, reflect_below, sample_path, simulate_splitting_tree, DoublyIndexed, JumpLaw, LevyParams,
    SplittingParams,
};
use crate::rng::{par_replicates, replicate_rng};
use crate::splitting::{
    all_pass, binary_and_class_check, reflection_control_test, sojourn_check, splitting_run,
    timechange_consistency_test, xi_extract, xi_from_contour, ConsistencyTest, SplittingTest, TestReport, XiMeasure,
};
use crate::tree::ChronoTree;

/// How a run ended when no error occurred.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A statistical or exact check did not pass.
    TestFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::TestFailed => 2,
        }
    }
}

/// Exit code for an error: every error is a validation failure.
pub const ERROR_EXIT: i32 = 1;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    /// Main artifact; written to `out` when set, otherwise meant for stdout.
    pub text: String,
    pub reports: Vec<TestReport>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            status: Status::Ok,
            text,
            reports: Vec::new(),
        }
    }

    fn tests(reports: Vec<TestReport>) -> Self {
        Outcome {
            status: if all_pass(&reports) {
                Status::Ok
            } else {
                Status::TestFailed
            },
            text: reports_to_csv(&reports),
            reports,
        }
    }
}

enum Loaded {
    Tree(ChronoTree),
    Contour(PljContour),
}

impl Loaded {
    fn contour(&self) -> PljContour {
        match self {
            Loaded::Tree(t) => encode(t),
            Loaded::Contour(c) => c.clone(),
        }
    }
}

/// Contours are CSV files, anything else is read as tree JSONL.
fn load_any(path: &str) -> Result<Loaded> {
    if Path::new(path)
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        let l = load_contour(path)?;
        if !l.was_canonical {
            log::warn!("{path}: contour was not canonical and has been canonicalized");
        }
        Ok(Loaded::Contour(l.contour))
    } else {
        Ok(Loaded::Tree(load_tree(path)?))
    }
}

fn required<T: std::str::FromStr>(cfg: &ExperimentConfig, key: &str) -> Result<T> {
    cfg.get(key)?
        .ok_or_else(|| Error::Params(format!("{} needs {key}", cfg.command)))
}

fn format_is_csv(cfg: &ExperimentConfig, default_csv: bool) -> Result<bool> {
    match cfg.params.get("format").map(String::as_str) {
        None => Ok(default_csv),
        Some("csv") => Ok(true),
        Some("jsonl") => Ok(false),
        Some(other) => Err(Error::Params(format!("unknown format {other}; use csv or jsonl"))),
    }
}

fn floats(cfg: &ExperimentConfig, key: &str, default: &str) -> Result<Vec<f64>> {
    let raw = cfg.params.get(key).map(String::as_str).unwrap_or(default);
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Params(format!("cannot parse {key}={raw}")))
        })
        .collect()
}

fn height(cfg: &ExperimentConfig, key: &str) -> Result<f64> {
    match cfg.params.get(key).map(String::as_str) {
        None | Some("inf") => Ok(f64::INFINITY),
        Some(_) => required(cfg, key),
    }
}

fn splitting_params(cfg: &ExperimentConfig) -> Result<SplittingParams> {
    let mut p = SplittingParams::new(
        cfg.get_or("birth_rate", 1.0)?,
        cfg.get_or("lifetime", JumpLaw::Exp(2.0))?,
    );
    p.root_lifetime = cfg.get("root_lifetime")?;
    p.truncation = cfg.get("truncation")?;
    p.speed = cfg.get("speed")?;
    if let Some(m) = cfg.get("max_individuals")? {
        p.max_individuals = m;
    }
    Ok(p)
}

fn levy_params(cfg: &ExperimentConfig) -> Result<LevyParams> {
    let mut p = LevyParams::drift(cfg.get_or("drift", 1.0)?)
        .with_jumps(
            cfg.get_or("jump_rate", 0.0)?,
            cfg.get_or("jump_law", JumpLaw::Exp(1.0))?,
        )
        .with_kappa(cfg.get_or("kappa", 0.0)?);
    let beta: f64 = cfg.get_or("beta", 0.0)?;
    if beta > 0.0 {
        p = p.with_beta(beta, cfg.get_or("step", 1e-3)?);
    }
    p.validate()?;
    Ok(p)
}

fn xi_to_text(xi: &XiMeasure, csv: bool) -> String {
    let mut out = String::new();
    if csv {
        out.push_str("depth,individuals,total_length\n");
        for (d, t) in &xi.atoms {
            writeln!(out, "{},{},{}", fmt_f64(*d), t.len(), fmt_f64(t.total_length())).unwrap();
        }
    } else {
        for (d, t) in &xi.atoms {
            let lines: Vec<serde_json::Value> = tree_to_jsonl(&t.canonical())
                .lines()
                .map(|l| serde_json::from_str(l).expect("own output is JSON"))
                .collect();
            let atom = serde_json::json!({ "depth": d, "subtree": lines });
            writeln!(out, "{atom}").unwrap();
        }
    }
    out
}

fn write_svg(cfg: &ExperimentConfig, svg: impl FnOnce() -> String) -> Result<()> {
    if let Some(path) = cfg.params.get("svg") {
        fs::write(path, svg())?;
    }
    Ok(())
}

/// Runs one command. Artifacts named by `out` and `svg` are written here;
/// the returned text is the main artifact either way.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    let seed: u64 = cfg.get_or("seed", 0)?;
    let outcome = match cfg.command.as_str() {
        "simulate" => {
            let p = splitting_params(cfg)?;
            let tree = simulate_splitting_tree(&p, &mut replicate_rng(seed, 0))?;
            let c = encode(&tree);
            write_svg(cfg, || contour_svg(&c, "simulated splitting tree"))?;
            Outcome::ok(if format_is_csv(cfg, false)? {
                contour_to_csv(&c)
            } else {
                tree_to_jsonl(&tree)
            })
        }
        "encode" => {
            let tree = load_tree(required::<String>(cfg, "input")?)?;
            let c = encode(&tree);
            write_svg(cfg, || contour_svg(&c, "contour"))?;
            Outcome::ok(contour_to_csv(&c))
        }
        "decode" => {
            let path: String = required(cfg, "input")?;
            let l = load_contour(&path)?;
            if !l.was_canonical {
                log::warn!("{path}: contour was not canonical and has been canonicalized");
            }
            Outcome::ok(tree_to_jsonl(&crate::contour::decode(&l.contour)?))
        }
        "truncate" => {
            let r: f64 = required(cfg, "r")?;
            match load_any(&required::<String>(cfg, "input")?)? {
                Loaded::Tree(t) => Outcome::ok(tree_to_jsonl(&t.truncate(r)?)),
                Loaded::Contour(c) => Outcome::ok(contour_to_csv(&time_change(&c, r)?)),
            }
        }
        "xi" => {
            let t: f64 = required(cfg, "t")?;
            let r = height(cfg, "r")?;
            let xi = match load_any(&required::<String>(cfg, "input")?)? {
                Loaded::Tree(tree) => xi_extract(&tree, t, r)?,
                Loaded::Contour(c) => xi_from_contour(&c, t, r)?,
            };
            Outcome::ok(xi_to_text(&xi, format_is_csv(cfg, true)?))
        }
        "dist" => {
            let a = load_any(&required::<String>(cfg, "a")?)?.contour();
            let b = load_any(&required::<String>(cfg, "b")?)?.contour();
            Outcome::ok(format!("distance\n{}\n", fmt_f64(contour_distance(&a, &b))))
        }
        "levy-sample" => {
            let p = levy_params(cfg)?;
            let x0: f64 = cfg.get_or("x0", 1.0)?;
            let horizon: f64 = cfg.get_or("horizon", 10.0)?;
            let mut path = sample_path(&p, x0, horizon, &mut replicate_rng(seed, 0))?;
            if let Some(r) = cfg.get::<f64>("reflect")? {
                path = reflect_below(&path, r)?;
            }
            if cfg.get_or("kill_at_zero", false)? {
                path = kill_at_zero(&path);
            }
            Outcome::ok(path_to_csv(&path))
        }
        "test-splitting" => {
            let mut test = SplittingTest::new(
                splitting_params(cfg)?,
                cfg.get_or("t", 0.5)?,
                cfg.get_or("n", 2000)?,
                seed,
            );
            test.depth_bins = cfg.get_or("bins", test.depth_bins)?;
            test.null_rate = cfg.get("null_rate")?;
            let rate = test.null_rate.unwrap_or(test.params.birth_rate);
            let (reports, spacings) = splitting_run(&test)?;
            if !spacings.is_empty() {
                write_svg(cfg, || {
                    ecdf_svg(
                        &spacings,
                        |x| 1.0 - (-rate * x.max(0.0)).exp(),
                        "depth spacings vs exponential",
                    )
                })?;
            }
            Outcome::tests(reports)
        }
        "test-consistency" => {
            let params = levy_params(cfg)?;
            let x = cfg.get_or("x", 1.0)?;
            let (r1, r2) = (cfg.get_or("r1", 2.0)?, cfg.get_or("r2", 4.0)?);
            let times = floats(cfg, "times", "0.5,1.5")?;
            let n = cfg.get_or("n", 5000)?;
            if cfg.get_or("control", false)? {
                Outcome::tests(reflection_control_test(&params, x, r1, &times, n, seed)?)
            } else {
                let mut reports = timechange_consistency_test(&ConsistencyTest {
                    params: params.clone(),
                    x,
                    r1,
                    r2,
                    times,
                    n,
                    seed,
                })?;
                reports.push(pathwise_check(&params, x, r1, r2, (n / 10).max(1), seed)?);
                Outcome::tests(reports)
            }
        }
        "test-sojourn" => Outcome::tests(sojourn_reports(cfg, seed)?),
        "test-binary" => Outcome::tests(binary_reports(cfg, seed)?),
        other => return Err(Error::Params(format!("unknown command {other:?}"))),
    };
    if let Some(path) = cfg.params.get("out") {
        fs::write(path, &outcome.text)?;
    }
    Ok(outcome)
}

/// Exact identity `X^{r1} = X^{r2} o C^{r2, r1}` on coupled families.
fn pathwise_check(p: &LevyParams, x: f64, r1: f64, r2: f64, n: usize, seed: u64) -> Result<TestReport> {
    let ok = par_replicates(seed ^ 0xd0b1e, n, |_, rng| -> Result<bool> {
        let fam = DoublyIndexed::sample(p, x, r2, rng)?;
        let lower = fam.at(r1)?;
        Ok(crate::levy::time_change(&fam.at(r2)?, r1)? == lower)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let bad = ok.iter().filter(|b| !**b).count();
    Ok(TestReport {
        test: "consistency".into(),
        statistic: "pathwise-mismatches".into(),
        value: bad as f64,
        p_value: if bad == 0 { 1.0 } else { 0.0 },
        n,
        pass: bad == 0,
        seed,
    })
}

fn exact_report(test: &str, statistic: &str, value: f64, pass: bool, n: usize, seed: u64) -> TestReport {
    TestReport {
        test: test.into(),
        statistic: statistic.into(),
        value,
        p_value: if pass { 1.0 } else { 0.0 },
        n,
        pass,
        seed,
    }
}

/// Unit-speed trees must have sojourn 1; trees with i.i.d. speeds 1/2 or 2
/// and a root of length 1 must miss it by at least 1/2.
fn sojourn_reports(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<TestReport>> {
    let n: usize = cfg.get_or("n", 1000)?;
    let tol: f64 = cfg.get_or("tol", 1e-9)?;
    let unit = SplittingParams {
        speed: None,
        ..splitting_params(cfg)?
    };
    let perturbed = SplittingParams {
        root_lifetime: Some(1.0),
        speed: Some(cfg.get_or(
            "speed",
            JumpLaw::Table {
                values: vec![0.5, 2.0],
                probs: vec![0.5, 0.5],
            },
        )?),
        ..unit.clone()
    };
    let devs = |p: &SplittingParams, s: u64| -> Result<Vec<f64>> {
        par_replicates(s, n, |i, rng| {
            let tree = simulate_splitting_tree(p, rng)?;
            sojourn_check(&tree, 1.0, s.wrapping_add(i))
        })
        .into_iter()
        .collect()
    };
    let max_unit = devs(&unit, seed)?.into_iter().fold(0.0, f64::max);
    let min_pert = devs(&perturbed, seed ^ 0x5bee)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(vec![
        exact_report(
            "sojourn",
            "max-deviation-unit-speed",
            max_unit,
            max_unit <= tol,
            n,
            seed,
        ),
        exact_report(
            "sojourn",
            "min-deviation-random-speed",
            min_pert,
            min_pert > 0.1,
            n,
            seed,
        ),
    ])
}

fn binary_reports(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<TestReport>> {
    let n: usize = cfg.get_or("n", 1000)?;
    let p = splitting_params(cfg)?;
    let checks = par_replicates(seed, n, |_, rng| -> Result<(bool, usize)> {
        let tree = simulate_splitting_tree(&p, rng)?;
        let r = binary_and_class_check(&tree);
        Ok((r.binary, r.max_class))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let non_binary = checks.iter().filter(|c| !c.0).count();
    let max_class = checks.iter().map(|c| c.1).max().unwrap_or(0);
    Ok(vec![
        exact_report(
            "binary",
            "non-binary-trees",
            non_binary as f64,
            non_binary == 0,
            n,
            seed,
        ),
        exact_report("binary", "max-class-size", max_class as f64, max_class <= 3, n, seed),
    ])
}
