//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Runs without the libtest harness so the lines always show.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tomtree::contour::{excursions_above_min, time_change};
use tomtree::grid::quantize;
use tomtree::levy::{
    largest_root, simulate_splitting_tree, sojourn_of, synthesize, DoublyIndexed, JumpLaw, LevyParams, SplittingParams,
};
use tomtree::rng::par_replicates;
use tomtree::splitting::{
    all_pass, binary_and_class_check, poisson_splitting_test, sojourn_check, timechange_consistency_test, xi_extract,
    xi_from_contour, ConsistencyTest, SplittingTest,
};
use tomtree::stats::mean_se;
use tomtree::{decode, encode, Error, PljContour};

use common::{levy_contour, random_tree, MAX_INDIVIDUALS};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A positive grid level in `(0, top)`.
fn level_below(r: &mut ChaCha8Rng, top: f64) -> f64 {
    loop {
        let level = quantize(r.random_range(0.0..top));
        if level > 0.0 {
            return level;
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn coding_bijection() -> Verdict {
    let start = Instant::now();
    let mut r = rng(101);
    let (mut trees_ok, mut contours_ok, mut biggest) = (0, 0, 0);
    const N: usize = 10_000;
    for i in 0..N {
        let tree = random_tree(&mut r, i, false);
        biggest = biggest.max(tree.len());
        let c = encode(&tree);
        if decode(&c)
            .map(|t| t.canonical_string() == tree.canonical_string())
            .unwrap_or(false)
        {
            trees_ok += 1;
        }
        let c = if i % 2 == 0 { c } else { levy_contour(&mut r) };
        if decode(&c).map(|t| encode(&t) == c).unwrap_or(false) {
            contours_ok += 1;
        }
    }
    let took = start.elapsed();
    verdict(
        trees_ok == N && contours_ok == N && biggest <= MAX_INDIVIDUALS && took.as_secs_f64() < 60.0,
        format!(
            "trees {trees_ok}/{N}, contours {contours_ok}/{N}, largest {biggest} individuals, {}",
            secs(took)
        ),
    )
}

fn commutation() -> Verdict {
    let mut r = rng(202);
    const N: usize = 1000;
    let (mut ok, mut tower_ok, mut redrawn) = (0, 0, 0);
    for i in 0..N {
        let tree = random_tree(&mut r, i, false);
        let c = encode(&tree);
        let h = tree.height();
        let truncated = loop {
            let level = level_below(&mut r, 1.2 * h);
            match tree.truncate(level) {
                Ok(t) => break Some((level, t)),
                Err(Error::Ambiguous(_)) => redrawn += 1,
                Err(_) => break None,
            }
        };
        if let Some((level, t)) = truncated {
            if time_change(&c, level).map(|tc| tc == encode(&t)).unwrap_or(false) {
                ok += 1;
            }
        }
        let mut levels = [level_below(&mut r, 1.2 * h), level_below(&mut r, 1.2 * h)];
        levels.sort_by(f64::total_cmp);
        let [r1, r2] = levels;
        let tower = time_change(&c, r2).and_then(|c2| time_change(&c2, r1));
        if matches!((tower, time_change(&c, r1)), (Ok(a), Ok(b)) if a == b) {
            tower_ok += 1;
        }
    }
    verdict(
        ok == N && tower_ok == N,
        format!("commutation {ok}/{N}, tower {tower_ok}/{N}, {redrawn} ambiguous levels redrawn"),
    )
}

fn df_identity() -> Verdict {
    let mut r = rng(303);
    const PAIRS: usize = 10_000;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..PAIRS / 10 {
        let tree = random_tree(&mut r, i, false);
        let c = encode(&tree);
        let m = c.duration();
        for _ in 0..10 {
            let (t1, t2) = (r.random_range(0.0..m), r.random_range(0.0..m));
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let lhs = tree
                .explore(t1)
                .and_then(|p1| tree.explore(t2).and_then(|p2| tree.dist(p1, p2)));
            let rhs = c.eval(t1).and_then(|f1| {
                let f2 = c.eval(t2)?;
                Ok(f1 + f2 - 2.0 * c.inf_between(lo, hi)?)
            });
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
                _ => failures += 1,
            }
        }
    }
    verdict(
        failures == 0 && worst < 1e-9,
        format!("{PAIRS} pairs, max |error| {worst:.3e}, {failures} evaluation errors"),
    )
}

fn xi_identification() -> Verdict {
    let mut r = rng(404);
    const N: usize = 1000;
    let (mut ok, mut atoms, mut redrawn) = (0, 0, 0);
    for i in 0..N {
        let tree = random_tree(&mut r, i, false);
        let c = encode(&tree);
        let decoded = decode(&c).expect("decodable contour");
        loop {
            let level = if i % 2 == 0 {
                f64::INFINITY
            } else {
                level_below(&mut r, 1.1 * tree.height())
            };
            let m = if level.is_finite() {
                match time_change(&c, level) {
                    Ok(tc) => tc.duration(),
                    Err(_) => {
                        redrawn += 1;
                        continue;
                    }
                }
            } else {
                c.duration()
            };
            let t = r.random_range(0.0..m);
            match (xi_extract(&decoded, t, level), xi_from_contour(&c, t, level)) {
                (Ok(a), Ok(b)) => {
                    atoms += a.len();
                    if a == b {
                        ok += 1;
                    }
                }
                (Err(Error::Ambiguous(_)), _) | (_, Err(Error::Ambiguous(_))) => {
                    redrawn += 1;
                    continue;
                }
                _ => {}
            }
            break;
        }
    }
    verdict(
        ok == N,
        format!("{ok}/{N} equal multisets, {atoms} atoms in total, {redrawn} redraws"),
    )
}

fn splitting_property() -> Verdict {
    let start = Instant::now();
    let params = SplittingParams::new(1.0, JumpLaw::Exp(2.0));
    let cfg = SplittingTest::new(params, 0.5, 2000, 1);
    let reports = match poisson_splitting_test(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let mut control = cfg.clone();
    control.null_rate = Some(2.0);
    let control_reports = match poisson_splitting_test(&control) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("control error: {e}")),
    };
    let took = start.elapsed();
    let min_p = reports.iter().map(|r| r.p_value).fold(1.0, f64::min);
    let control_p = control_reports.iter().map(|r| r.p_value).fold(1.0, f64::min);
    let names: Vec<_> = reports
        .iter()
        .map(|r| format!("{}={:.3}", r.statistic, r.p_value))
        .collect();
    verdict(
        all_pass(&reports) && !all_pass(&control_reports) && took.as_secs_f64() < 60.0,
        format!(
            "{}; misspecified-rate control min p {control_p:.2e}; null min p {min_p:.3}; {}",
            names.join(" "),
            secs(took)
        ),
    )
}

fn timechange_consistency() -> Verdict {
    let sup = LevyParams::drift(1.0).with_jumps(2.0, JumpLaw::Exp(1.0));
    let cfg = ConsistencyTest {
        params: sup.clone(),
        x: 1.0,
        r1: 2.0,
        r2: 4.0,
        times: vec![0.5, 1.5],
        n: 5000,
        seed: 6,
    };
    let reports = match timechange_consistency_test(&cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let mut r = rng(606);
    const FAMILIES: usize = 1000;
    let levels = [1.0, 1.5, 2.0, 3.0, 4.0];
    let mut pathwise_ok = 0;
    for _ in 0..FAMILIES {
        let fam = DoublyIndexed::sample(&sup, 1.0, 4.0, &mut r).expect("family");
        let all = levels.iter().enumerate().all(|(k, &lo)| {
            levels[k + 1..].iter().all(|&hi| {
                matches!((fam.at(lo), fam.at(hi).and_then(|p| tomtree::levy::time_change(&p, lo))),
                    (Ok(a), Ok(b)) if a == b)
            })
        });
        if all {
            pathwise_ok += 1;
        }
    }
    let ps: Vec<_> = reports
        .iter()
        .map(|r| format!("{}={:.3}", r.statistic, r.p_value))
        .collect();
    verdict(
        all_pass(&reports) && pathwise_ok == FAMILIES,
        format!("{}; pathwise identity {pathwise_ok}/{FAMILIES} families", ps.join(" ")),
    )
}

fn sojourn() -> Verdict {
    let mut r = rng(707);
    const N: usize = 1000;
    let mut unit_worst: f64 = 0.0;
    let mut errors = 0;
    for i in 0..N {
        let tree = random_tree(&mut r, i, true);
        match sojourn_check(&tree, 1.0, i as u64) {
            Ok(d) => unit_worst = unit_worst.max(d),
            Err(_) => errors += 1,
        }
    }
    let speeds = JumpLaw::Table {
        values: vec![0.5, 2.0],
        probs: vec![0.5, 0.5],
    };
    let perturbed = SplittingParams::new(1.0, JumpLaw::Exp(2.0))
        .with_root_lifetime(1.0)
        .with_speeds(speeds);
    let mut perturbed_best = f64::INFINITY;
    for i in 0..N {
        let tree = simulate_splitting_tree(&perturbed, &mut r).expect("perturbed tree");
        match sojourn_check(&tree, 1.0, i as u64) {
            Ok(d) => perturbed_best = perturbed_best.min(d),
            Err(_) => errors += 1,
        }
    }
    let a1 = sojourn_of(&LevyParams::drift(1.0).with_jumps(1.0, JumpLaw::Exp(2.0)));
    let a2 = sojourn_of(&LevyParams::drift(2.0));
    let b = largest_root(&LevyParams::drift(1.0).with_jumps(2.0, JumpLaw::Exp(1.0))).unwrap_or(f64::NAN);
    verdict(
        errors == 0 && unit_worst <= 1e-9 && perturbed_best > 0.1 && a1 == 1.0 && a2 == 0.5 && (b - 1.0).abs() <= 1e-12,
        format!(
            "unit-speed max dev {unit_worst:.3e}, perturbed min dev {perturbed_best:.3}, \
             sojourn_of {a1} and {a2}, b = {b:.15}"
        ),
    )
}

fn binary_classes() -> Verdict {
    let mut r = rng(808);
    const N: usize = 1000;
    let mut ok = 0;
    let mut widest = 0;
    for i in 0..N {
        let tree = random_tree(&mut r, i, false);
        let rep = binary_and_class_check(&tree);
        widest = widest.max(rep.max_class);
        if rep.pass() {
            ok += 1;
        }
    }
    verdict(
        ok == N,
        format!("{ok}/{N} trees binary with classes <= 3, widest class {widest}"),
    )
}

fn cmj_identity() -> Verdict {
    let start = Instant::now();
    let mut r = rng(909);
    let (mut checked, mut mismatches) = (0usize, 0usize);
    for i in 0..1000 {
        let tree = random_tree(&mut r, i, false);
        let c = encode(&tree);
        let mut levels: Vec<f64> = c.as_path().breakpoints().iter().map(|&(_, h)| h).collect();
        let extra: Vec<f64> = levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        levels.extend(extra);
        levels.extend((0..20).map(|_| r.random_range(0.0..1.1 * tree.height())));
        for h in levels {
            checked += 1;
            if tree.alive_count(h) != c.upcrossings(h) {
                mismatches += 1;
            }
        }
    }
    const REPLICATES: usize = 100_000;
    let params = SplittingParams::new(1.0, JumpLaw::Exp(2.0));
    let counts: Vec<f64> = par_replicates(9, REPLICATES, |_, rng| {
        simulate_splitting_tree(&params, rng).map(|t| t.alive_count(1.0) as f64)
    })
    .into_iter()
    .collect::<Result<_, _>>()
    .unwrap_or_default();
    let took = start.elapsed();
    let (mean, se) = mean_se(&counts);
    let target = (-1.0f64).exp();
    let z = (mean - target) / se;
    verdict(
        mismatches == 0 && counts.len() == REPLICATES && z.abs() <= 3.0 && took.as_secs_f64() < 120.0,
        format!(
            "{checked} levels, {mismatches} mismatches; mean alive at 1 = {mean:.4} (se {se:.4}, z {z:+.2}) vs {target:.4}; {}",
            secs(took)
        ),
    )
}

fn synthesis_roundtrip() -> Verdict {
    let mut r = rng(1010);
    const N: usize = 1000;
    let mut ok = 0;
    for i in 0..N {
        let c: PljContour = if i % 2 == 0 {
            encode(&random_tree(&mut r, i / 2, true))
        } else {
            levy_contour(&mut r)
        };
        let s = r.random_range(0.0..c.duration());
        let rebuilt = excursions_above_min(&c, s)
            .and_then(|d| synthesize(&d, 1.0))
            .map(|p| p.as_plj());
        if matches!((rebuilt, c.suffix(s)), (Ok(Some(a)), Ok(b)) if a == b) {
            ok += 1;
        }
    }
    verdict(ok == N, format!("{ok}/{N} suffixes rebuilt exactly"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("coding bijection", coding_bijection),
        ("truncation and time change commute", commutation),
        ("tree distance from the contour", df_identity),
        ("right subtrees from tree and contour", xi_identification),
        ("splitting property", splitting_property),
        ("time-change consistency of reflected processes", timechange_consistency),
        ("constant sojourn", sojourn),
        ("binarity and class sizes", binary_classes),
        ("alive counts and upcrossings", cmj_identity),
        ("synthesis round trip", synthesis_roundtrip),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            k + 1,
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
