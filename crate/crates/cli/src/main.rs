use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use dynlab::circles::{self, CircleParams, CirclePoint, Tier};
use dynlab::finflow::{FiniteFlow, FlowError, DEFAULT_ELEMENT_CAP};
use dynlab::fuzz::{self, FuzzConfig, Suite};
use dynlab::relations::RelationError;
use dynlab::report::{self, Example, SCHEMA_VERSION};
use dynlab::subshift::{self, EvidenceParams};
use dynlab::ternary::{self, TernarySeq};

#[derive(Parser, Debug)]
#[command(name = "dynlab", version, about = "Proximality relations of finite flows and symbolic systems")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with defaults for any flag
    #[arg(long, global = true, env = "DYNLAB_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Close a flow file and report its relations and theorem checks
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Run the theorem suites on seeded random flows
    Fuzz(FuzzArgs),
    /// Recompute a golden example and compare it with the stored file
    Reproduce {
        #[arg(value_parser = ["mt", "chacon", "ternary", "cc"])]
        example: String,
        /// Overwrite the golden file with the current output
        #[arg(long)]
        bless: bool,
        #[arg(long, env = "DYNLAB_GOLDEN_DIR")]
        golden_dir: Option<PathBuf>,
    },
    /// Classify one pair of points of a named system
    ClassifyPair(ClassifyArgs),
    /// Dump a circle-cascade orbit as CSV
    Trajectory {
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 100)]
        steps: u64,
    },
}

#[derive(Args, Debug)]
struct CapArg {
    /// Largest monoid to close
    #[arg(long, env = "DYNLAB_ELEMENT_CAP")]
    cap: Option<usize>,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    min_states: Option<usize>,
    #[arg(long)]
    max_states: Option<usize>,
    #[arg(long)]
    max_generators: Option<usize>,
    /// Suites to run (repeatable); all by default
    #[arg(long = "suite")]
    suites: Vec<String>,
    #[command(flatten)]
    cap: CapArg,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long, value_parser = ["morse", "chacon", "subshift", "ternary", "cc"])]
    system: String,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long)]
    depth: Option<u64>,
    #[arg(long)]
    gap: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    format: Option<Format>,
    out: Option<PathBuf>,
    cap: Option<usize>,
    count: Option<usize>,
    seed: Option<u64>,
    min_states: Option<usize>,
    max_states: Option<usize>,
    max_generators: Option<usize>,
    depth: Option<u64>,
    gap: Option<u64>,
    horizon: Option<u64>,
    steps: Option<u64>,
    epsilon: Option<f64>,
    golden_dir: Option<PathBuf>,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 2, error: e.into() }
    }
}

fn fail(code: u8, error: anyhow::Error) -> Failure {
    Failure { code, error }
}

struct Output {
    format: Format,
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, value: &Value) -> Result<(), Failure> {
        let text = match self.format {
            Format::Json => report::to_json_string(value),
            Format::Text => report::render_text(value),
        };
        match &self.out {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            Ok(toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?)
        }
    }
}

fn flow_error_code(e: &RelationError) -> u8 {
    match e {
        RelationError::Flow(FlowError::MonoidTooLarge { .. }) => 3,
        RelationError::Flow(FlowError::Parse { .. }) => 2,
        _ => 2,
    }
}

fn cmd_analyze(file: &Path, cap: usize, out: &Output) -> Result<(), Failure> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let flow = FiniteFlow::parse(&text).map_err(|e| fail(2, anyhow!("{}: {e}", file.display())))?;
    let report = report::analyze(&flow, cap).map_err(|e| fail(flow_error_code(&e), anyhow!(e)))?;
    let value = serde_json::to_value(&report)?;
    out.emit(&value)?;
    if !report.all_passed {
        for c in report.checks.failures() {
            eprintln!("check failed: {}: {}", c.name, c.counterexample.as_ref().unwrap_or(&Value::Null));
        }
        return Err(fail(1, anyhow!("theorem checks failed")));
    }
    Ok(())
}

fn cmd_fuzz(args: &FuzzArgs, cfg: &FileConfig, out: &Output) -> Result<(), Failure> {
    let d = FuzzConfig::default();
    let config = FuzzConfig {
        count: args.count.or(cfg.count).unwrap_or(d.count),
        seed: args.seed.or(cfg.seed).unwrap_or(d.seed),
        min_states: args.min_states.or(cfg.min_states).unwrap_or(d.min_states),
        max_states: args.max_states.or(cfg.max_states).unwrap_or(d.max_states),
        max_generators: args.max_generators.or(cfg.max_generators).unwrap_or(d.max_generators),
        cap: args.cap.cap.or(cfg.cap).unwrap_or(d.cap),
        ..d
    };
    config.validate()?;
    let suites: Vec<Suite> = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites.iter().map(|s| s.parse::<Suite>().map_err(|e| anyhow!(e))).collect::<Result<_, _>>()?
    };
    let mut summaries = vec![];
    for s in suites {
        summaries.push(fuzz::run_suite(s, &config)?);
    }
    let all_passed = summaries.iter().all(|s| s.all_passed());
    let value = json!({"schema": SCHEMA_VERSION, "config": config, "suites": summaries, "all_passed": all_passed});
    out.emit(&value)?;
    if !all_passed {
        for s in &summaries {
            for c in &s.counterexamples {
                eprintln!("{:?} instance {}: {} (minimized: {:?})", s.suite, c.index, c.check, c.minimized);
            }
        }
        return Err(fail(1, anyhow!("counterexamples found")));
    }
    Ok(())
}

fn default_golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("golden")
}

fn line_diff(expected: &str, actual: &str) -> String {
    let (e, a): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
    let mut out = String::new();
    let mut shown = 0;
    for i in 0..e.len().max(a.len()) {
        let (l, r) = (e.get(i), a.get(i));
        if l != r {
            if let Some(l) = l {
                out.push_str(&format!("{:>5} - {l}\n", i + 1));
            }
            if let Some(r) = r {
                out.push_str(&format!("{:>5} + {r}\n", i + 1));
            }
            shown += 1;
            if shown == 40 {
                out.push_str("      ...\n");
                break;
            }
        }
    }
    out
}

fn cmd_reproduce(example: &str, bless: bool, dir: PathBuf, out: &Output) -> Result<(), Failure> {
    let ex: Example = example.parse().map_err(|e: String| anyhow!(e))?;
    let value = report::reproduce(ex).map_err(|e| anyhow!(e))?;
    let actual = report::to_json_string(&value);
    let path = dir.join(format!("{example}.json"));
    if bless {
        fs::create_dir_all(&dir)?;
        fs::write(&path, &actual).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("blessed {}", path.display());
        return out.emit(&value);
    }
    let expected = fs::read_to_string(&path)
        .map_err(|e| fail(1, anyhow!("no golden file {} ({e}); run with --bless", path.display())))?;
    out.emit(&value)?;
    if expected != actual {
        eprint!("{}", line_diff(&expected, &actual));
        return Err(fail(1, anyhow!("output differs from {}", path.display())));
    }
    Ok(())
}

fn parse_circle_point(s: &str) -> anyhow::Result<CirclePoint> {
    let s = s.trim();
    if s == "i" || s == "center" {
        return Ok(CirclePoint::center());
    }
    let (tier, angle) = s.split_once(':').ok_or_else(|| anyhow!("expected TIER:ANGLE, got {s:?}"))?;
    let tier: Tier = tier.parse().map_err(|e: String| anyhow!(e))?;
    let angle: f64 = angle.parse().with_context(|| format!("bad angle in {s:?}"))?;
    Ok(CirclePoint::new(tier, angle))
}

fn cmd_classify(args: &ClassifyArgs, cfg: &FileConfig, out: &Output) -> Result<(), Failure> {
    let value = match args.system.as_str() {
        "morse" | "chacon" | "subshift" => {
            let d = EvidenceParams::default();
            let params = EvidenceParams {
                depth: args.depth.or(cfg.depth).unwrap_or(d.depth),
                gap: args.gap.or(cfg.gap).unwrap_or(d.gap),
                horizon: args.horizon.or(cfg.horizon).unwrap_or(d.horizon),
            };
            let x = subshift::parse_descriptor(&args.x)?;
            let y = subshift::parse_descriptor(&args.y)?;
            let c = subshift::classify_pair(&x, &y, params)?;
            json!({"schema": SCHEMA_VERSION, "system": args.system, "classification": c})
        }
        "ternary" => {
            let x: TernarySeq = args.x.parse()?;
            let y: TernarySeq = args.y.parse()?;
            let v = ternary::sp_classify(&x, &y);
            json!({"schema": SCHEMA_VERSION, "system": "ternary", "classification": v, "edge": ternary::omega_edge_check(&x, &y)})
        }
        _ => {
            let d = CircleParams::default();
            let params = CircleParams {
                max_steps: args.steps.or(cfg.steps).unwrap_or(d.max_steps),
                epsilon: args.epsilon.or(cfg.epsilon).unwrap_or(d.epsilon),
            };
            let p = parse_circle_point(&args.x)?;
            let q = parse_circle_point(&args.y)?;
            json!({
                "schema": SCHEMA_VERSION,
                "system": "cc",
                "x": p,
                "y": q,
                "x_class": circles::asymptotic_class(p, params.max_steps, params.epsilon),
                "y_class": circles::asymptotic_class(q, params.max_steps, params.epsilon),
                "label": circles::pair_class(p, q, params),
                "table_in_p": circles::table_in_p(p, q),
                "table_in_sp": circles::table_in_sp(p, q),
            })
        }
    };
    out.emit(&value)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(cli.config.as_deref())?;
    let out = Output { format: cli.format.or(cfg.format).unwrap_or(Format::Json), out: cli.out.or(cfg.out.clone()) };
    match &cli.command {
        Command::Analyze { file, cap } => cmd_analyze(file, cap.cap.or(cfg.cap).unwrap_or(DEFAULT_ELEMENT_CAP), &out),
        Command::Fuzz(args) => cmd_fuzz(args, &cfg, &out),
        Command::Reproduce { example, bless, golden_dir } => {
            let dir = golden_dir.clone().or(cfg.golden_dir.clone()).unwrap_or_else(default_golden_dir);
            cmd_reproduce(example, *bless, dir, &out)
        }
        Command::ClassifyPair(args) => cmd_classify(args, &cfg, &out),
        Command::Trajectory { point, steps } => {
            let p = parse_circle_point(point)?;
            match &out.out {
                Some(path) => circles::write_trajectory(p, *steps, fs::File::create(path)?)?,
                None => circles::write_trajectory(p, *steps, std::io::stdout().lock())?,
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
