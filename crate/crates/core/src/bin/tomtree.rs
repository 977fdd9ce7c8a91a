use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tomtree::experiment::{run_experiment, ERROR_EXIT};
use tomtree::io::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(
    name = "tomtree",
    version,
    about = "Chronological trees, contours and splitting-tree experiments"
)]
struct Cli {
    /// Seed of every random stream in the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Only errors on stderr, nothing on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Also write the run as a key=value config replayable with `run`.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a splitting tree.
    Simulate(SplitArgs),
    /// Tree JSONL to contour CSV.
    Encode {
        input: PathBuf,
        /// Also render the contour as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Contour CSV to tree JSONL.
    Decode { input: PathBuf },
    /// Truncate a tree, or time-change a contour, at height r.
    Truncate {
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
    },
    /// Right subtrees along the ancestral line of the point explored at t.
    Xi {
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Truncation height; none by default.
        #[arg(long, allow_negative_numbers = true)]
        r: Option<f64>,
    },
    /// Distance between two trees or contours.
    Dist { a: PathBuf, b: PathBuf },
    /// Lévy process tools.
    #[command(subcommand)]
    Levy(LevyCommand),
    /// Verification suites; exit code 2 when a check fails.
    #[command(subcommand)]
    Test(TestCommand),
    /// Replay a saved config.
    Run { config: PathBuf },
}

#[derive(Subcommand, Debug)]
enum LevyCommand {
    /// Sample a path of the process.
    Sample {
        #[command(flatten)]
        levy: LevyArgs,
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        /// Reflect below this level.
        #[arg(long)]
        reflect: Option<f64>,
        #[arg(long)]
        kill_at_zero: bool,
    },
}

#[derive(Subcommand, Debug)]
enum TestCommand {
    /// Poisson structure of the right subtrees.
    Splitting {
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        bins: usize,
        /// Birth rate assumed by the null, for power checks.
        #[arg(long)]
        null_rate: Option<f64>,
    },
    /// Time change of reflected processes against direct reflection.
    Consistency {
        #[command(flatten)]
        levy: LevyArgs,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long, default_value_t = 2.0)]
        r1: f64,
        #[arg(long, default_value_t = 4.0)]
        r2: f64,
        /// Comma-separated observation times.
        #[arg(long, default_value = "0.5,1.5")]
        times: String,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        /// Compare against the unreflected process instead (should fail).
        #[arg(long)]
        control: bool,
    },
    /// Constant sojourn of unit-speed trees, and its failure under random speeds.
    Sojourn {
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Binarity and class sizes of simulated trees.
    Binary {
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[arg(long, default_value_t = 1.0)]
    birth_rate: f64,
    /// Lifetime law: exp:θ, fixed:x, table:v1,v2/p1,p2 or hist:e0,e1,e2/w1,w2.
    #[arg(long, default_value = "exp:2")]
    lifetime: String,
    #[arg(long)]
    root_lifetime: Option<f64>,
    #[arg(long)]
    truncation: Option<f64>,
    /// Law of i.i.d. speeds, same syntax as lifetimes.
    #[arg(long)]
    speed: Option<String>,
    #[arg(long)]
    max_individuals: Option<usize>,
    /// Render an SVG plot next to the main artifact.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LevyArgs {
    #[arg(long, default_value_t = 1.0)]
    drift: f64,
    #[arg(long, default_value_t = 0.0)]
    jump_rate: f64,
    #[arg(long, default_value = "exp:1")]
    jump_law: String,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Euler step, used only when beta > 0.
    #[arg(long)]
    step: Option<f64>,
}

fn set_opt<T: ToString>(c: &mut ExperimentConfig, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        c.set(key, v.to_string());
    }
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

impl SplitArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.set("birth_rate", self.birth_rate).set("lifetime", &self.lifetime);
        set_opt(c, "root_lifetime", &self.root_lifetime);
        set_opt(c, "truncation", &self.truncation);
        set_opt(c, "speed", &self.speed);
        set_opt(c, "max_individuals", &self.max_individuals);
        set_opt(c, "svg", &self.svg.as_ref().map(|p| path(p)));
    }
}

impl LevyArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.set("drift", self.drift)
            .set("jump_rate", self.jump_rate)
            .set("jump_law", &self.jump_law)
            .set("kappa", self.kappa)
            .set("beta", self.beta);
        set_opt(c, "step", &self.step);
    }
}

fn config(cli: &Cli) -> Result<ExperimentConfig, tomtree::Error> {
    let mut c = match &cli.command {
        Command::Run { config } => return ExperimentConfig::load(config),
        Command::Simulate(a) => {
            let mut c = ExperimentConfig::new("simulate");
            a.apply(&mut c);
            c
        }
        Command::Encode { input, svg } => {
            let mut c = ExperimentConfig::new("encode");
            c.set("input", path(input));
            set_opt(&mut c, "svg", &svg.as_ref().map(|p| path(p)));
            c
        }
        Command::Decode { input } => {
            let mut c = ExperimentConfig::new("decode");
            c.set("input", path(input));
            c
        }
        Command::Truncate { input, r } => {
            let mut c = ExperimentConfig::new("truncate");
            c.set("input", path(input)).set("r", r);
            c
        }
        Command::Xi { input, t, r } => {
            let mut c = ExperimentConfig::new("xi");
            c.set("input", path(input)).set("t", t);
            set_opt(&mut c, "r", r);
            c
        }
        Command::Dist { a, b } => {
            let mut c = ExperimentConfig::new("dist");
            c.set("a", path(a)).set("b", path(b));
            c
        }
        Command::Levy(LevyCommand::Sample {
            levy,
            x0,
            horizon,
            reflect,
            kill_at_zero,
        }) => {
            let mut c = ExperimentConfig::new("levy-sample");
            levy.apply(&mut c);
            c.set("x0", x0)
                .set("horizon", horizon)
                .set("kill_at_zero", kill_at_zero);
            set_opt(&mut c, "reflect", reflect);
            c
        }
        Command::Test(t) => match t {
            TestCommand::Splitting {
                split,
                t,
                n,
                bins,
                null_rate,
            } => {
                let mut c = ExperimentConfig::new("test-splitting");
                split.apply(&mut c);
                c.set("t", t).set("n", n).set("bins", bins);
                set_opt(&mut c, "null_rate", null_rate);
                c
            }
            TestCommand::Consistency {
                levy,
                x,
                r1,
                r2,
                times,
                n,
                control,
            } => {
                let mut c = ExperimentConfig::new("test-consistency");
                levy.apply(&mut c);
                c.set("x", x)
                    .set("r1", r1)
                    .set("r2", r2)
                    .set("times", times)
                    .set("n", n)
                    .set("control", control);
                c
            }
            TestCommand::Sojourn { split, n } => {
                let mut c = ExperimentConfig::new("test-sojourn");
                split.apply(&mut c);
                c.set("n", n);
                c
            }
            TestCommand::Binary { split, n } => {
                let mut c = ExperimentConfig::new("test-binary");
                split.apply(&mut c);
                c.set("n", n);
                c
            }
        },
    };
    c.set("seed", cli.seed);
    set_opt(&mut c, "out", &cli.out.as_ref().map(|p| path(p)));
    if let Some(f) = cli.format {
        c.set("format", if matches!(f, Format::Csv) { "csv" } else { "jsonl" });
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ERROR_EXIT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet {
        "error"
    } else {
        "warn"
    }))
    .init();

    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(ERROR_EXIT as u8);
        }
    };
    if let Some(p) = &cli.save_config {
        if let Err(e) = cfg.save(p) {
            eprintln!("error: {e}");
            return ExitCode::from(ERROR_EXIT as u8);
        }
    }
    match run_experiment(&cfg) {
        Ok(outcome) => {
            if !cli.quiet {
                if !cfg.params.contains_key("out") {
                    print!("{}", outcome.text);
                }
                for r in &outcome.reports {
                    eprintln!("{r}");
                }
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR_EXIT as u8)
        }
    }
}
