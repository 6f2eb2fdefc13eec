use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kpreform::approx::{decompose, extract_null_direction, extract_range_direction};
use kpreform::harness::{
    generate, run_experiment, run_pipeline, BetaMode, ExperimentConfig, GeneratorConfig, InstanceDocument, PipelineOptions,
    ReportDocument, WeightMode,
};
use kpreform::oracle::EnumerationBudget;
use kpreform::reform::{build_nullspace, build_rangespace, KnapsackInstance};
use kpreform::exact::parse_rational;
use num_bigint::BigInt;
use serde_json::json;

#[derive(Parser)]
#[command(name = "kpreform", version, about = "Lattice reformulations of knapsack feasibility problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw random instances.
    Generate(GenerateArgs),
    /// Show the rangespace and nullspace reformulations of one instance.
    Reformulate(ReformulateArgs),
    /// Reformulate, certify and measure one instance.
    Pipeline(PipelineArgs),
    /// Run a batch sweep described by a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Divide a by its gcd instead of rejecting the instance.
    #[arg(long)]
    normalize_gcd: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// Target density; sets M to the smallest integer with M >= 2^(n/d).
    #[arg(long, conflicts_with = "big_m", required_unless_present = "big_m")]
    density: Option<String>,
    /// Weights are drawn from 1..=M.
    #[arg(long = "bigM")]
    big_m: Option<String>,
    #[arg(long, default_value = "1")]
    vmax: String,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "range")]
    beta: BetaArg,
    /// Redraw until |a|^2 >= 2^((n+2)n).
    #[arg(long)]
    require_hypothesis: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BetaArg {
    Range,
    Equal,
    Feasible,
}

#[derive(Args)]
struct ReformulateArgs {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InstanceArgs,
    /// Cross-check against the enumeration oracles.
    #[arg(long)]
    oracle: bool,
    /// Successive approximation depth.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Record per-stage wall-clock times in the report.
    #[arg(long)]
    timings: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment JSON config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<kpreform::Error> for Failure {
    fn from(e: kpreform::Error) -> Self {
        use kpreform::Error::*;
        let code = match e {
            InvalidInstance(_) | NotCoprime { .. } | Divisibility { .. } | Invalid(_) => 2,
            Budget(_) => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure { code: 1, message: e.to_string() })
        }
    }
}

fn load(input: &InstanceArgs) -> Result<KnapsackInstance, Failure> {
    let doc = InstanceDocument::from_json(&read(&input.instance)?)?;
    if input.normalize_gcd {
        let (inst, g) = doc.to_normalized_instance()?;
        if g != BigInt::from(1) {
            eprintln!("divided a by gcd {g}");
        }
        Ok(inst)
    } else {
        Ok(doc.to_instance()?)
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

fn cmd_generate(args: &GenerateArgs) -> Result<bool, Failure> {
    let mode = match (&args.density, &args.big_m) {
        (Some(d), _) => WeightMode::Density(parse_rational(d).ok_or_else(|| input_error(format!("--density: {d:?} is not a rational")))?),
        (None, Some(m)) => WeightMode::BigM(m.parse().map_err(|_| input_error(format!("--bigM: {m:?} is not an integer")))?),
        (None, None) => return Err(input_error("one of --density or --bigM is required")),
    };
    let config = GeneratorConfig {
        n: args.n,
        mode,
        vmax: args.vmax.parse().map_err(|_| input_error(format!("--vmax: {:?} is not an integer", args.vmax)))?,
        beta: match args.beta {
            BetaArg::Range => BetaMode::Range,
            BetaArg::Equal => BetaMode::Equal,
            BetaArg::Feasible => BetaMode::Feasible,
        },
        require_hypothesis: args.require_hypothesis,
        seed: args.seed,
        stream: 0,
    };
    let docs = generate(&config, args.count)?;
    for d in &docs {
        if let Some(p) = &d.provenance {
            if p.regenerations > 0 {
                eprintln!("instance {}: {} draws rejected", p.index, p.regenerations);
            }
        }
    }
    let text = match args.format {
        Format::Json => docs.iter().map(|d| d.to_json_line() + "\n").collect(),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                docs.iter().map(|d| vec![d.n.to_string(), d.a.join(" "), d.v.join(" "), d.beta1.clone(), d.beta2.clone()]).collect();
            csv_text(&["n", "a", "v", "beta1", "beta2"], &rows)
        }
        Format::Text => docs
            .iter()
            .map(|d| format!("a = [{}]  v = [{}]  beta = [{}, {}]\n", d.a.join(", "), d.v.join(", "), d.beta1, d.beta2))
            .collect(),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(true)
}

fn cmd_reformulate(args: &ReformulateArgs) -> Result<bool, Failure> {
    let inst = load(&args.input)?;
    let rr = build_rangespace(&inst)?;
    let p = decompose(inst.a(), &extract_range_direction(&rr))?.p;
    let mut doc = json!({
        "range": {
            "u": rr.u.row_vecs().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "au": rr.au.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "p": p.iter().map(ToString::to_string).collect::<Vec<_>>(),
        },
        "null": null,
    });
    if inst.is_equality() && inst.n() >= 2 {
        let nr = build_nullspace(&inst)?;
        let p = decompose(inst.a(), &extract_null_direction(&nr)?)?.p;
        doc["null"] = json!({
            "v_basis": nr.v_basis.row_vecs().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "x_beta": nr.x_beta.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "b": nr.b.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "p": p.iter().map(ToString::to_string).collect::<Vec<_>>(),
        });
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    Ok(true)
}

fn report_text(r: &ReportDocument) -> String {
    let mut s = format!("n = {}  density ~ {}  hypothesis = {}\n", r.n, r.density, r.hypothesis);
    let rw = &r.range.widths;
    s += &format!(
        "range: p = [{}]  lambda ~ {}  |r|/lambda ~ {}  iwidth = {} (bound {})\n",
        r.range.direction.p.join(", "),
        r.range.direction.lambda.approx,
        r.range.direction.ratio.approx,
        rw.iwidth_unit_reformed,
        rw.width_bound
    );
    if let Some(null) = &r.null {
        s += &format!(
            "null:  p = [{}]  lambda ~ {}  |r|/lambda ~ {}  iwidth = {} (bound {})\n",
            null.direction.p.join(", "),
            null.direction.lambda.approx,
            null.direction.ratio.approx,
            null.widths.iwidth_unit_reformed,
            null.widths.width_bound
        );
    }
    if r.failures.is_empty() {
        s += "all applicable checks passed\n";
    } else {
        for f in &r.failures {
            s += &format!("FAILED: {f}\n");
        }
    }
    s
}

fn report_csv(r: &ReportDocument) -> String {
    let null = r.null.as_ref();
    let field = |f: &dyn Fn(&kpreform::harness::NullReport) -> String| null.map(f).unwrap_or_default();
    let row = vec![
        r.n.to_string(),
        r.density.clone(),
        r.hypothesis.to_string(),
        r.range.direction.p.join(" "),
        r.range.direction.lambda.exact.clone(),
        r.range.direction.ratio.approx.clone(),
        r.range.widths.iwidth_unit_reformed.clone(),
        r.range.widths.width_bound.clone(),
        field(&|n| n.direction.p.join(" ")),
        field(&|n| n.direction.lambda.exact.clone()),
        field(&|n| n.direction.ratio.approx.clone()),
        field(&|n| n.widths.iwidth_unit_reformed.clone()),
        field(&|n| n.widths.width_bound.clone()),
        r.failures.len().to_string(),
    ];
    csv_text(
        &[
            "n",
            "density",
            "hypothesis",
            "range_p",
            "range_lambda",
            "range_ratio",
            "range_iwidth",
            "range_bound",
            "null_p",
            "null_lambda",
            "null_ratio",
            "null_iwidth",
            "null_bound",
            "failures",
        ],
        &[row],
    )
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<bool, Failure> {
    let inst = load(&args.input)?;
    let opts = PipelineOptions { depth: args.k, oracle: args.oracle, budget: EnumerationBudget::default(), timings: args.timings };
    let report = run_pipeline(&inst, &opts)?;
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report_csv(&report),
        Format::Text => report_text(&report),
    };
    emit(args.out.as_deref(), &text)?;
    for f in &report.failures {
        eprintln!("check failed: {f}");
    }
    Ok(report.passed())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<bool, Failure> {
    let mut config: ExperimentConfig =
        serde_json::from_str(&read(&args.config)?).map_err(|e| input_error(format!("malformed experiment config: {e}")))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.oracle |= args.oracle;
    let summary = run_experiment(&config)?;
    let text = match args.format {
        Format::Json => summary.to_json(),
        Format::Csv | Format::Text => summary.to_csv(),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(!summary.failed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Reformulate(a) => cmd_reformulate(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
