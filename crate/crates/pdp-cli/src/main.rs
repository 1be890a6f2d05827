//! Command-line surface for the pdp library: sampling, table building, law
//! evaluation, bound checking, evidence, and the built-in verification
//! suites. Output is CSV or JSON on stdout or a file; a fixed seed gives
//! byte-identical output across runs.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pdp::discrete::DiscreteBase;
use pdp::laws::{
    approx_expected_m, approx_var_m, dirichlet_series_bound, evidence_nonatomic, expected_m,
    expected_m_oracle, geometric_bound, partition_size_pmf, var_m,
};
use pdp::rng::stream_rng;
use pdp::samplers::{
    sample_crp, sample_gem, sample_pdd, sample_pdp, Truncation, UniformBase, WeightVector,
};
use pdp::special::zeta;
use pdp::stirling::{
    write_log_table_csv, write_ratio_table_csv, LogStirlingTable, LogTableConfig,
    RatioTableConfig, StirlingRatioTable,
};
use pdp::verify::{run_full, run_quick, CriterionReport};
use pdp::{Error, PdParams};

// exit codes: 0 success, 2 invalid config, 3 verification/numeric failure,
// 4 resource cap exceeded, 1 anything else (I/O)
const EXIT_OK: u8 = 0;
const EXIT_OTHER: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "pdp",
    version,
    about = "Two-parameter Poisson-Dirichlet toolkit: samplers, partition laws, Stirling tables"
)]
struct Cli {
    /// RNG seed; all randomized output is a pure function of (options, seed)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output encoding
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output file (stdout when omitted); relative paths resolve under
    /// $PDP_OUT_DIR when that variable is set
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Draw weights, partitions, labeled samples, or trees
    Sample {
        #[command(subcommand)]
        what: SampleCmd,
    },
    /// Build a Stirling table and dump its stored entries
    Table {
        #[command(subcommand)]
        what: TableCmd,
    },
    /// Partition-size distribution: one "m,probability" row per block count
    Pmf(LawArgs),
    /// Exact and approximate moments of the block count
    Moments(LawArgs),
    /// Closed-form expected-blocks bound vs the exact oracle for a weight family
    Bounds(BoundsArgs),
    /// Evidence of a blocks file (lines "count,log_base_mass" or
    /// "count,multiplicity,log_base_mass")
    Evidence(EvidenceArgs),
    /// Run a built-in verification suite; exit 3 if any criterion fails
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Sorted-weight draws for log-log weight-spectrum plots
    PddCurves(PddCurvesArgs),
}

#[derive(Subcommand)]
enum SampleCmd {
    /// Stick-breaking weights in stick order, with residual
    Gem(GemArgs),
    /// Stick-breaking weights sorted by decreasing mass
    Pdd(GemArgs),
    /// Seating-rule partition draws
    Crp(CrpArgs),
    /// Partition draws labeled by base-distribution values
    Pdp(PdpArgs),
    /// Nested partition trees from a discount schedule
    Tree(TreeArgs),
}

#[derive(Args)]
struct GemArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Stop once the unbroken residual falls below this mass
    #[arg(long, default_value_t = 1e-12)]
    mass_epsilon: f64,
    /// Hard cap on the number of atoms
    #[arg(long, default_value_t = 1_000_000)]
    max_atoms: usize,
}

#[derive(Args)]
struct CrpArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Items per draw
    #[arg(long)]
    n: usize,
    /// Independent draws; replicate r uses RNG stream r
    #[arg(long, default_value_t = 1)]
    replicates: usize,
}

#[derive(Args)]
struct PdpArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    n: usize,
    /// Comma-separated masses of a discrete base (omit for a continuous
    /// uniform base on [0,1))
    #[arg(long)]
    theta: Option<String>,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
}

#[derive(Args)]
struct TreeArgs {
    /// Comma-separated per-depth discounts, strictly increasing
    #[arg(long)]
    schedule: String,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
}

#[derive(Subcommand)]
enum TableCmd {
    /// Log-space table of generalized Stirling numbers
    Stirling(StirlingArgs),
    /// Table of consecutive-column Stirling ratios
    Ratio(RatioArgs),
}

#[derive(Args)]
struct StirlingArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    n_max: usize,
    /// Column cap (default min(1000, n_max))
    #[arg(long)]
    t_max: Option<usize>,
    /// Keep every stripe-th column above the dense zone
    #[arg(long)]
    stripe: Option<usize>,
    /// Abort before allocating more than this many bytes
    #[arg(long)]
    memory_cap_bytes: Option<u64>,
}

#[derive(Args)]
struct RatioArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long)]
    memory_cap_bytes: Option<u64>,
}

#[derive(Args)]
struct LawArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    n: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// weights (1-r) r^(k-1)
    Geometric,
    /// weights k^(-s) / zeta(s)
    Dirichlet,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Geometric decay rate in (0,1) (geometric family)
    #[arg(long)]
    r: Option<f64>,
    /// Series exponent > 1 (dirichlet family)
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    n: usize,
    /// Oracle truncation: drop tail mass below this
    #[arg(long, default_value_t = 1e-12)]
    tail_epsilon: f64,
    /// Oracle truncation: hard atom cap
    #[arg(long, default_value_t = 2_000_000)]
    max_atoms: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvidenceLevel {
    /// Pick by file shape: 3 columns -> multiplicity, 2 -> nonatomic
    Auto,
    /// Distinct-value blocks under a smooth base
    Nonatomic,
    /// Discrete base with per-block multiplicities
    Multiplicity,
    /// One representative indicator pattern per multiplicity
    Indicator,
}

#[derive(Args)]
struct EvidenceArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Blocks file: one line per block, "count,log_base_mass" or
    /// "count,multiplicity,log_base_mass"
    #[arg(long)]
    counts: PathBuf,
    #[arg(long, value_enum, default_value_t = EvidenceLevel::Auto)]
    level: EvidenceLevel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Quick,
    Full,
}

#[derive(Args)]
struct PddCurvesArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    #[arg(long, default_value_t = 1e-12)]
    mass_epsilon: f64,
    #[arg(long, default_value_t = 100_000)]
    max_atoms: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::DegeneratePochhammer { .. } | Error::TableCoverage { .. } => {
            EXIT_INVALID
        }
        Error::ResourceCap { .. } => EXIT_RESOURCE,
        Error::Numeric(_) => EXIT_VERIFY,
    }
}

/// 17 significant digits: round-trips f64 exactly.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_list(raw: &str, what: &str) -> Result<Vec<f64>, Error> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("{what}: cannot parse '{tok}' as a number")))
        })
        .collect()
}

/// A consumer closing the pipe early (`pdp ... | head`) is not an error.
fn write_stdout(content: &str) -> u8 {
    use std::io::Write;
    match std::io::stdout().write_all(content.as_bytes()) {
        Ok(()) => EXIT_OK,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            eprintln!("error: io: writing stdout: {e}");
            EXIT_OTHER
        }
    }
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<u8, Error> {
    match out {
        None => Ok(write_stdout(content)),
        Some(path) => {
            let resolved = match std::env::var_os("PDP_OUT_DIR") {
                Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
                _ => path.clone(),
            };
            if let Err(e) = std::fs::write(&resolved, content) {
                eprintln!("error: io: writing {}: {e}", resolved.display());
                return Ok(EXIT_OTHER);
            }
            Ok(EXIT_OK)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let seed = cli.seed;
    let format = cli.format;
    match cli.command {
        Command::Sample { what } => {
            let content = match what {
                SampleCmd::Gem(args) => weights_output(&args, seed, format, false)?,
                SampleCmd::Pdd(args) => weights_output(&args, seed, format, true)?,
                SampleCmd::Crp(args) => crp_output(&args, seed, format)?,
                SampleCmd::Pdp(args) => pdp_output(&args, seed, format)?,
                SampleCmd::Tree(args) => tree_output(&args, seed, format)?,
            };
            write_output(cli.output.as_ref(), &content)
        }
        Command::Table { what } => {
            let content = table_output(what, format)?;
            write_output(cli.output.as_ref(), &content)
        }
        Command::Pmf(args) => write_output(cli.output.as_ref(), &pmf_output(&args, format)?),
        Command::Moments(args) => write_output(cli.output.as_ref(), &moments_output(&args, format)?),
        Command::Bounds(args) => write_output(cli.output.as_ref(), &bounds_output(&args, format)?),
        Command::Evidence(args) => write_output(cli.output.as_ref(), &evidence_output(&args, format)?),
        Command::PddCurves(args) => write_output(cli.output.as_ref(), &pdd_curves_output(&args, seed, format)?),
        Command::Verify { suite } => {
            let reports = match suite {
                Suite::Quick => run_quick(seed),
                Suite::Full => run_full(seed),
            };
            for r in &reports {
                write_stdout(&format!("{}\n", report_line(r)));
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed == 0 {
                Ok(EXIT_OK)
            } else {
                eprintln!("error: verification_failed: {failed} criteria failed");
                Ok(EXIT_VERIFY)
            }
        }
    }
}

fn report_line(r: &CriterionReport) -> String {
    format!(
        "criterion {:>2} {:<32} {} [{:>7.2}s] {}",
        r.id,
        r.name,
        if r.passed { "PASS" } else { "FAIL" },
        r.seconds,
        r.detail
    )
}

fn weight_vector_json(wv: &WeightVector) -> serde_json::Value {
    serde_json::json!({
        "order": if wv.weights().windows(2).all(|w| w[0] >= w[1]) { "sorted_descending" } else { "size_biased" },
        "weights": wv.weights(),
        "residual": wv.residual(),
    })
}

fn weights_output(args: &GemArgs, seed: u64, format: Format, sorted: bool) -> Result<String, Error> {
    let params = PdParams::new(args.a, args.b)?;
    let trunc = Truncation { mass_epsilon: args.mass_epsilon, max_atoms: args.max_atoms };
    let mut rng = stream_rng(seed, 0);
    let wv = if sorted {
        sample_pdd(params, &trunc, &mut rng)?
    } else {
        sample_gem(params, &trunc, &mut rng)?
    };
    match format {
        Format::Json => Ok(format!("{}\n", serde_json::to_string_pretty(&weight_vector_json(&wv)).unwrap())),
        Format::Csv => {
            let mut s = String::from("index,mass,kind\n");
            for (k, w) in wv.weights().iter().enumerate() {
                let _ = writeln!(s, "{},{},atom", k + 1, fmt17(*w));
            }
            let _ = writeln!(s, "{},{},residual", wv.weights().len() + 1, fmt17(wv.residual()));
            Ok(s)
        }
    }
}

fn crp_output(args: &CrpArgs, seed: u64, format: Format) -> Result<String, Error> {
    let params = PdParams::new(args.a, args.b)?;
    let mut draws = Vec::with_capacity(args.replicates);
    for r in 0..args.replicates {
        let mut rng = stream_rng(seed, r as u64);
        draws.push(sample_crp(params, args.n, &mut rng)?);
    }
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = draws
                .iter()
                .enumerate()
                .map(|(r, p)| {
                    serde_json::json!({
                        "replicate": r,
                        "assignments": p.assignments(),
                        "counts": p.counts(),
                    })
                })
                .collect();
            Ok(format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
        }
        Format::Csv => {
            let mut s = String::from("replicate,item,block\n");
            for (r, p) in draws.iter().enumerate() {
                for (i, blk) in p.assignments().iter().enumerate() {
                    let _ = writeln!(s, "{r},{},{blk}", i + 1);
                }
            }
            Ok(s)
        }
    }
}

fn pdp_output(args: &PdpArgs, seed: u64, format: Format) -> Result<String, Error> {
    let params = PdParams::new(args.a, args.b)?;
    enum Draw {
        Discrete(pdp::samplers::PdpSample<usize>, Vec<String>),
        Uniform(pdp::samplers::PdpSample<f64>),
    }
    let mut draws = Vec::with_capacity(args.replicates);
    for r in 0..args.replicates {
        let mut rng = stream_rng(seed, r as u64);
        match &args.theta {
            Some(raw) => {
                let base = DiscreteBase::new(parse_list(raw, "--theta")?)?;
                let labels = base.labels().to_vec();
                draws.push(Draw::Discrete(sample_pdp(params, args.n, &base, &mut rng)?, labels));
            }
            None => draws.push(Draw::Uniform(sample_pdp(params, args.n, &UniformBase, &mut rng)?)),
        }
    }
    let value_str = |d: &Draw, blk0: usize| match d {
        Draw::Discrete(s, labels) => labels[s.block_values[blk0]].clone(),
        Draw::Uniform(s) => fmt17(s.block_values[blk0]),
    };
    fn partition(d: &Draw) -> &pdp::SizeBiasedPartition {
        match d {
            Draw::Discrete(s, _) => &s.partition,
            Draw::Uniform(s) => &s.partition,
        }
    }
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = draws
                .iter()
                .enumerate()
                .map(|(r, d)| {
                    let p = partition(d);
                    let values: Vec<serde_json::Value> = (0..p.m())
                        .map(|m| match d {
                            Draw::Discrete(s, labels) => {
                                serde_json::Value::String(labels[s.block_values[m]].clone())
                            }
                            Draw::Uniform(s) => serde_json::json!(s.block_values[m]),
                        })
                        .collect();
                    serde_json::json!({
                        "replicate": r,
                        "assignments": p.assignments(),
                        "block_values": values,
                    })
                })
                .collect();
            Ok(format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
        }
        Format::Csv => {
            let mut s = String::from("replicate,item,block,value\n");
            for (r, d) in draws.iter().enumerate() {
                let p = partition(d);
                for (i, blk) in p.assignments().iter().enumerate() {
                    let _ = writeln!(s, "{r},{},{blk},{}", i + 1, value_str(d, blk - 1));
                }
            }
            Ok(s)
        }
    }
}

fn tree_output(args: &TreeArgs, seed: u64, format: Format) -> Result<String, Error> {
    let schedule = parse_list(&args.schedule, "--schedule")?;
    let mut trees = Vec::with_capacity(args.replicates);
    for r in 0..args.replicates {
        let mut rng = stream_rng(seed, r as u64);
        trees.push(pdp::frag_coag::sample_tree(args.n, &schedule, args.b, &mut rng)?);
    }
    match format {
        Format::Json => {
            let vals: Vec<serde_json::Value> =
                trees.iter().map(|t| serde_json::to_value(t).unwrap()).collect();
            Ok(format!("{}\n", serde_json::to_string_pretty(&vals).unwrap()))
        }
        Format::Csv => {
            let mut s = String::from("replicate,node,depth,parent,members\n");
            for (r, tree) in trees.iter().enumerate() {
                let parent_of: std::collections::HashMap<&str, &str> =
                    tree.edges.iter().map(|e| (e.child.as_str(), e.parent.as_str())).collect();
                for node in &tree.nodes {
                    let members: Vec<String> =
                        node.members.iter().map(|m| m.to_string()).collect();
                    let _ = writeln!(
                        s,
                        "{r},{},{},{},{}",
                        node.id,
                        node.depth,
                        parent_of.get(node.id.as_str()).unwrap_or(&""),
                        members.join(" ")
                    );
                }
            }
            Ok(s)
        }
    }
}

fn table_output(what: TableCmd, format: Format) -> Result<String, Error> {
    match what {
        TableCmd::Stirling(args) => {
            let mut config = LogTableConfig::new(args.a, args.n_max);
            if let Some(t) = args.t_max {
                config = config.t_max(t);
            }
            if let Some(l) = args.stripe {
                config = config.stripe(l);
            }
            if let Some(cap) = args.memory_cap_bytes {
                config = config.mem_cap_bytes(cap);
            }
            let table = LogStirlingTable::build(&config)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_log_table_csv(&table, &mut buf).expect("vec write is infallible");
                    Ok(String::from_utf8(buf).expect("csv is utf8"))
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = table
                        .stored_entries()
                        .map(|(n, t, v)| serde_json::json!({"n": n, "t": t, "log_s": v}))
                        .collect();
                    Ok(format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
                }
            }
        }
        TableCmd::Ratio(args) => {
            let mut config = RatioTableConfig::new(args.a, args.n_max);
            if let Some(t) = args.t_max {
                config = config.t_max(t);
            }
            if let Some(cap) = args.memory_cap_bytes {
                config = config.mem_cap_bytes(cap);
            }
            let table = StirlingRatioTable::build(&config)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_ratio_table_csv(&table, &mut buf).expect("vec write is infallible");
                    Ok(String::from_utf8(buf).expect("csv is utf8"))
                }
                Format::Json => {
                    let rows: Vec<serde_json::Value> = table
                        .stored_entries()
                        .map(|(n, t, v)| serde_json::json!({"n": n, "t": t, "v": v}))
                        .collect();
                    Ok(format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
                }
            }
        }
    }
}

fn pmf_output(args: &LawArgs, format: Format) -> Result<String, Error> {
    let params = PdParams::new(args.a, args.b)?;
    let table = LogStirlingTable::dense(args.a, args.n, args.n)?;
    let pmf = partition_size_pmf(args.n, params, &table)?;
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = pmf
                .iter()
                .enumerate()
                .map(|(i, p)| serde_json::json!({"m": i + 1, "probability": p}))
                .collect();
            Ok(format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
        }
        Format::Csv => {
            let mut s = String::from("m,probability\n");
            for (i, p) in pmf.iter().enumerate() {
                let _ = writeln!(s, "{},{}", i + 1, fmt17(*p));
            }
            Ok(s)
        }
    }
}

fn moments_output(args: &LawArgs, format: Format) -> Result<String, Error> {
    let params = PdParams::new(args.a, args.b)?;
    let mut rows: Vec<(&str, f64)> = vec![
        ("expected_m", expected_m(args.n, params)?),
        ("var_m", var_m(args.n, params)?),
    ];
    // the growth approximations require b > 0
    if args.b > 0.0 {
        rows.push(("approx_expected_m", approx_expected_m(args.n, params)?));
        rows.push(("approx_var_m", approx_var_m(args.n, params)?));
    }
    match format {
        Format::Json => {
            let obj: serde_json::Map<String, serde_json::Value> =
                rows.into_iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
            Ok(format!("{}\n", serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap()))
        }
        Format::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v) in rows {
                let _ = writeln!(s, "{k},{}", fmt17(v));
            }
            Ok(s)
        }
    }
}

fn bounds_output(args: &BoundsArgs, format: Format) -> Result<String, Error> {
    if !(args.tail_epsilon > 0.0 && args.tail_epsilon < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "--tail-epsilon must lie in (0,1), got {}",
            args.tail_epsilon
        )));
    }
    let (label, bound, weights) = match args.family {
        Family::Geometric => {
            let r = args.r.ok_or_else(|| {
                Error::InvalidConfig("geometric family needs --r".to_string())
            })?;
            let bound = geometric_bound(r, args.n)?;
            let atoms = ((args.tail_epsilon.ln() / r.ln()).ceil() as usize).clamp(1, args.max_atoms);
            let q: Vec<f64> = (0..atoms).map(|k| (1.0 - r) * r.powi(k as i32)).collect();
            ("geometric", bound, q)
        }
        Family::Dirichlet => {
            let s = args.s.ok_or_else(|| {
                Error::InvalidConfig("dirichlet family needs --s".to_string())
            })?;
            let bound = dirichlet_series_bound(s, args.n)?;
            let z = zeta(s)?;
            // tail of k^-s past K is about K^(1-s)/(s-1); cap at max_atoms
            let needed = (args.tail_epsilon * (s - 1.0) * z).powf(1.0 / (1.0 - s));
            let atoms = if needed.is_finite() && needed >= 1.0 {
                (needed.ceil() as usize).min(args.max_atoms)
            } else {
                args.max_atoms
            };
            let q: Vec<f64> = (1..=atoms).map(|k| (k as f64).powf(-s) / z).collect();
            ("dirichlet", bound, q)
        }
    };
    let oracle = expected_m_oracle(&weights, args.n)?;
    let rows = [
        ("family", serde_json::json!(label)),
        ("atoms", serde_json::json!(weights.len())),
        ("bound", serde_json::json!(bound)),
        ("oracle", serde_json::json!(oracle)),
        ("slack", serde_json::json!(bound - oracle)),
    ];
    match format {
        Format::Json => {
            let obj: serde_json::Map<String, serde_json::Value> =
                rows.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            Ok(format!("{}\n", serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap()))
        }
        Format::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v) in rows {
                let line = match v {
                    serde_json::Value::Number(num) if num.is_f64() => {
                        fmt17(num.as_f64().unwrap())
                    }
                    other => other.to_string().trim_matches('"').to_string(),
                };
                let _ = writeln!(s, "{k},{line}");
            }
            Ok(s)
        }
    }
}

struct EvidenceFile {
    counts: Vec<usize>,
    multiplicities: Option<Vec<usize>>,
    log_base: Vec<f64>,
}

fn parse_evidence_file(path: &PathBuf) -> Result<EvidenceFile, Error> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    let mut counts = Vec::new();
    let mut mults: Vec<usize> = Vec::new();
    let mut log_base = Vec::new();
    let mut saw_three = false;
    let mut saw_two = false;
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |what: &str| {
            Error::InvalidConfig(format!("{}:{}: {what}", path.display(), lineno + 1))
        };
        match fields.len() {
            2 => {
                saw_two = true;
                counts.push(fields[0].parse().map_err(|_| bad("bad count"))?);
                log_base.push(fields[1].parse().map_err(|_| bad("bad log_base_mass"))?);
            }
            3 => {
                saw_three = true;
                counts.push(fields[0].parse().map_err(|_| bad("bad count"))?);
                mults.push(fields[1].parse().map_err(|_| bad("bad multiplicity"))?);
                log_base.push(fields[2].parse().map_err(|_| bad("bad log_base_mass"))?);
            }
            _ => return Err(bad("expected 2 or 3 comma-separated fields")),
        }
        if saw_two && saw_three {
            return Err(bad("mixed 2- and 3-field lines"));
        }
    }
    if counts.is_empty() {
        return Err(Error::InvalidConfig(format!("{}: no blocks", path.display())));
    }
    Ok(EvidenceFile {
        counts,
        multiplicities: if saw_three { Some(mults) } else { None },
        log_base,
    })
}

fn evidence_output(args: &EvidenceArgs, format: Format) -> Result<String, Error> {
    let params = PdParams::new(args.a, args.b)?;
    let file = parse_evidence_file(&args.counts)?;
    let level = match (args.level, &file.multiplicities) {
        (EvidenceLevel::Auto, Some(_)) => EvidenceLevel::Multiplicity,
        (EvidenceLevel::Auto, None) => EvidenceLevel::Nonatomic,
        (lvl, _) => lvl,
    };
    let n: usize = file.counts.iter().sum();
    let value = match level {
        EvidenceLevel::Nonatomic => {
            evidence_nonatomic(&file.counts, params, &file.log_base)?
        }
        EvidenceLevel::Multiplicity | EvidenceLevel::Indicator => {
            let t = file.multiplicities.clone().ok_or_else(|| {
                Error::InvalidConfig("this level needs a multiplicity column".to_string())
            })?;
            let table = LogStirlingTable::dense(args.a, n, n)?;
            match level {
                EvidenceLevel::Multiplicity => pdp::discrete::evidence_multiplicities(
                    &file.counts,
                    &t,
                    &file.log_base,
                    params,
                    &table,
                )?,
                _ => {
                    // one representative pattern: t_m openers then trailers
                    let inds: Vec<pdp::partition::IndicatorVector> = file
                        .counts
                        .iter()
                        .zip(&t)
                        .map(|(&c, &tm)| {
                            let mut bits = vec![0u8; c];
                            for bit in bits.iter_mut().take(tm) {
                                *bit = 1;
                            }
                            pdp::partition::IndicatorVector::new(bits)
                        })
                        .collect::<Result<_, _>>()?;
                    pdp::discrete::evidence_indicators(
                        &file.counts,
                        &inds,
                        &file.log_base,
                        params,
                        &table,
                    )?
                }
            }
        }
        EvidenceLevel::Auto => unreachable!("resolved above"),
    };
    let label = match level {
        EvidenceLevel::Nonatomic => "nonatomic",
        EvidenceLevel::Multiplicity => "multiplicity",
        EvidenceLevel::Indicator => "indicator",
        EvidenceLevel::Auto => unreachable!(),
    };
    match format {
        Format::Json => Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::json!({
                "level": label,
                "blocks": file.counts.len(),
                "items": n,
                "log_evidence": value,
            }))
            .unwrap()
        )),
        Format::Csv => Ok(format!("quantity,value\nlevel,{label}\nlog_evidence,{}\n", fmt17(value))),
    }
}

fn pdd_curves_output(args: &PddCurvesArgs, seed: u64, format: Format) -> Result<String, Error> {
    let params = PdParams::new(args.a, args.b)?;
    let trunc = Truncation { mass_epsilon: args.mass_epsilon, max_atoms: args.max_atoms };
    let mut curves = Vec::with_capacity(args.replicates);
    for r in 0..args.replicates {
        let mut rng = stream_rng(seed, r as u64);
        curves.push(sample_pdd(params, &trunc, &mut rng)?);
    }
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = curves
                .iter()
                .enumerate()
                .map(|(r, wv)| {
                    serde_json::json!({
                        "replicate": r,
                        "weights": wv.weights(),
                        "residual": wv.residual(),
                    })
                })
                .collect();
            Ok(format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
        }
        Format::Csv => {
            let mut s = String::from("replicate,rank,weight\n");
            for (r, wv) in curves.iter().enumerate() {
                for (k, w) in wv.weights().iter().enumerate() {
                    let _ = writeln!(s, "{r},{},{}", k + 1, fmt17(*w));
                }
            }
            Ok(s)
        }
    }
}
