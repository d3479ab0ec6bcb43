//! Command-line front door: analysis configs in, JSON and markdown reports
//! out, with the cross-check suite behind `verify`.
//!
//! Exit codes: 0 on completion, 2 on any input or precondition failure
//! (schema errors point at the failing path), 3 when a reference oracle
//! disagrees with the algorithm it checks. Reports contain no timestamps,
//! so identical inputs and seed produce byte-identical files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use optdom::exec::ExecMode;
use optdom::factor::{self, FactorabilityReport};
use optdom::matop::{continuity_check, ContinuityReport, MatrixOperator};
use optdom::oracle;
use optdom::seqspace::{self, SpaceSpec};
use optdom::verify::{check_instance, run_verify, Scale, VerifySummary};
use optdom::vmeasure::{self, AtomicVectorMeasure, EvalOptions, OptimalDomainNorms};
use optdom::{EstimateMethod, FiniteVector, NormEstimate};

#[derive(Parser)]
#[command(
    name = "optdom",
    version,
    about = "Finite-truncation norms and factorization constants for matrix-attached measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full factorability pipeline and write reports.
    Analyze(AnalyzeArgs),
    /// Evaluate one norm: a sequence-space norm or a measure norm.
    Norm(NormArgs),
    /// Run the oracle cross-check suite, or re-certify one matrix.
    Verify(VerifyArgs),
    /// Emit a built-in matrix description as JSON.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Matrix: JSON/CSV path, inline JSON, or builtin (identity, cesaro, hilbert).
    #[arg(long)]
    matrix: Option<String>,
    /// Codomain space: inline JSON or path, e.g. '{"variant":"lq","q":1}'.
    #[arg(long)]
    codomain: Option<String>,
    /// Domain exponent p > 1.
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated strictly increasing truncations, e.g. 2,4,8,16.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exact-enumeration cutoff for measure norms.
    #[arg(long)]
    n_enum: Option<usize>,
    /// Codomain truncation for probe norms; defaults to the last schedule entry.
    #[arg(long, alias = "n-E")]
    n_e: Option<usize>,
    /// Restarts for the local searches.
    #[arg(long)]
    restarts: Option<usize>,
    /// Probe vector for optimal-domain norms; repeatable. Inline JSON or path.
    #[arg(long = "probe")]
    probes: Vec<String>,
    /// JSON report path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Markdown report path.
    #[arg(long)]
    md: Option<PathBuf>,
    /// Config file supplying any of the above; its fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    selector: Selector,
    /// Vector: inline JSON object {"indices":[..],"values":[..]}, dense
    /// array [..], or a path to either.
    #[arg(long)]
    vector: String,
    /// Space spec for the `space` selector.
    #[arg(long)]
    space: Option<String>,
    /// Matrix for the measure selectors.
    #[arg(long)]
    matrix: Option<String>,
    /// Codomain for the measure selectors.
    #[arg(long)]
    codomain: Option<String>,
    /// Codomain truncation for the measure selectors.
    #[arg(long, alias = "n-E", default_value_t = 8)]
    n_e: usize,
    /// Exponent for the `lpm` selector.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_enum: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Extend upper brackets by the declared column tail.
    #[arg(long)]
    use_tail: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Selector {
    /// Sequence-space norm of the vector.
    Space,
    /// L1(m) norm against the matrix-attached measure.
    L1m,
    /// Lp(m) norm against the matrix-attached measure.
    Lpm,
}

#[derive(Args)]
struct VerifyArgs {
    /// quick (< 1 min) or full (< 10 min).
    #[arg(long, default_value = "quick")]
    scale: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Re-certify this matrix instead of running the random battery.
    #[arg(long)]
    matrix: Option<String>,
    /// Codomain for the instance checks.
    #[arg(long, default_value = r#"{"variant":"lq","q":2}"#)]
    codomain: String,
    /// Window size for the instance checks.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Random vectors per instance check.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Write the summary as JSON here as well.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// identity, cesaro, hilbert, diagonal, or lower.
    kind: String,
    /// Generator for diagonal/lower: geometric, power, or explicit.
    #[arg(long = "gen")]
    generator: Option<String>,
    #[arg(long)]
    constant: Option<f64>,
    /// Ratio for the geometric generator.
    #[arg(long)]
    ratio: Option<f64>,
    /// Decay exponent for the power generator.
    #[arg(long)]
    exponent: Option<f64>,
    /// Comma-separated values for the explicit generator.
    #[arg(long)]
    values: Option<String>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Norm(args) => run_norm(args),
        Command::Verify(args) => run_verify_cmd(args),
        Command::Generate(args) => run_generate(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<optdom::Error>() {
                Some(optdom::Error::OracleDisagreement(_)) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

// ---------------------------------------------------------------------------
// Input parsing.

fn parse_matrix(src: &str) -> Result<MatrixOperator> {
    let trimmed = src.trim();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).context("matrix JSON")?;
        return Ok(MatrixOperator::from_json_value(&v, None)?);
    }
    let path = Path::new(trimmed);
    if path.exists() {
        return Ok(MatrixOperator::load(path)?);
    }
    match trimmed {
        "identity" => Ok(MatrixOperator::identity()),
        "cesaro" => Ok(MatrixOperator::cesaro()),
        "hilbert" => Ok(MatrixOperator::hilbert()),
        other => bail!(
            "matrix {other:?} is neither an existing file, inline JSON, nor a builtin \
             (identity, cesaro, hilbert)"
        ),
    }
}

fn parse_space(src: &str) -> Result<SpaceSpec> {
    let trimmed = src.trim();
    let text = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        std::fs::read_to_string(trimmed).with_context(|| format!("reading space spec {trimmed}"))?
    };
    let mut de = serde_json::Deserializer::from_str(&text);
    let spec: SpaceSpec = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| anyhow!("space spec at {}: {}", e.path(), e.inner()))?;
    spec.validate()?;
    Ok(spec)
}

fn parse_vector(src: &str) -> Result<FiniteVector> {
    let trimmed = src.trim();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(trimmed).context("vector JSON")?;
        return vector_from_value(&v);
    }
    let text = std::fs::read_to_string(trimmed).with_context(|| format!("reading vector {trimmed}"))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("vector file {trimmed}"))?;
    vector_from_value(&v)
}

fn vector_from_value(v: &Value) -> Result<FiniteVector> {
    match v {
        Value::String(s) => parse_vector(s),
        Value::Array(_) => {
            let dense: Vec<f64> = serde_path_to_error::deserialize(v.clone())
                .map_err(|e| anyhow!("vector at {}: {}", e.path(), e.inner()))?;
            Ok(FiniteVector::from_dense(&dense)?)
        }
        _ => {
            let f: FiniteVector = serde_path_to_error::deserialize(v.clone())
                .map_err(|e| anyhow!("vector at {}: {}", e.path(), e.inner()))?;
            Ok(f)
        }
    }
}

fn parse_schedule(src: &str) -> Result<Vec<usize>> {
    let schedule: Vec<usize> = src
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .with_context(|| format!("schedule entry {:?}", part.trim()))
        })
        .collect::<Result<_>>()?;
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
        bail!("schedule must be strictly increasing positive integers, got {src:?}");
    }
    Ok(schedule)
}

fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var("OPTDOM_SEED") {
        Ok(s) => Ok(Some(
            s.parse::<u64>()
                .with_context(|| format!("OPTDOM_SEED {s:?} is not a 64-bit integer"))?,
        )),
        Err(_) => Ok(None),
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str, label: &str) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, contents)?;
            println!("wrote {label} to {}", path.display());
        }
        None => println!("{contents}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// analyze.

/// File form of the analyze flags. Fields present here override the flags.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    matrix: Option<Value>,
    codomain: Option<Value>,
    p: Option<f64>,
    schedule: Option<Vec<usize>>,
    seed: Option<u64>,
    n_enum: Option<usize>,
    n_e: Option<usize>,
    restarts: Option<usize>,
    probes: Option<Vec<Value>>,
    out: Option<PathBuf>,
    md: Option<PathBuf>,
    sequential: Option<bool>,
}

#[derive(Serialize)]
struct ToolMeta {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct ProbeNorms {
    vector: FiniteVector,
    norms: OptimalDomainNorms,
}

#[derive(Serialize)]
struct SelfCheck {
    n: usize,
    ascent: f64,
    grid: f64,
    relative_gap: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    schema_version: u32,
    tool: ToolMeta,
    factorability: FactorabilityReport,
    continuity: ContinuityReport,
    probes: Vec<ProbeNorms>,
    self_check: SelfCheck,
}

fn run_analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let AnalyzeArgs {
        mut matrix,
        mut codomain,
        mut p,
        schedule,
        mut seed,
        mut n_enum,
        mut n_e,
        mut restarts,
        probes,
        mut out,
        mut md,
        config,
        mut sequential,
    } = args;
    let mut schedule = schedule.as_deref().map(parse_schedule).transpose()?;
    let mut probe_values: Vec<Value> = probes.into_iter().map(Value::String).collect();

    if let Some(path) = config {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        let file: FileConfig = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| anyhow!("config {} at {}: {}", path.display(), e.path(), e.inner()))?;
        if let Some(v) = file.matrix {
            matrix = Some(match v {
                Value::String(s) => s,
                other => other.to_string(),
            });
        }
        if let Some(v) = file.codomain {
            codomain = Some(match v {
                Value::String(s) => s,
                other => other.to_string(),
            });
        }
        p = file.p.or(p);
        schedule = file.schedule.or(schedule);
        seed = file.seed.or(seed);
        n_enum = file.n_enum.or(n_enum);
        n_e = file.n_e.or(n_e);
        restarts = file.restarts.or(restarts);
        if let Some(list) = file.probes {
            probe_values = list;
        }
        out = file.out.or(out);
        md = file.md.or(md);
        sequential = file.sequential.unwrap_or(sequential);
    }

    let matrix = parse_matrix(&matrix.ok_or_else(|| anyhow!("--matrix is required"))?)?;
    let codomain = parse_space(&codomain.ok_or_else(|| anyhow!("--codomain is required"))?)?;
    let p = p.ok_or_else(|| anyhow!("--p is required"))?;
    let schedule = schedule.ok_or_else(|| anyhow!("--schedule is required"))?;
    let seed = match seed {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let defaults = EvalOptions::default();
    let opts = EvalOptions {
        seed,
        n_enum: n_enum.unwrap_or(defaults.n_enum),
        restarts: restarts.unwrap_or(defaults.restarts),
        mode: if sequential { ExecMode::Sequential } else { ExecMode::Parallel },
        use_tail: false,
    };
    opts.validate()?;
    let n_e = n_e.unwrap_or_else(|| *schedule.last().expect("validated nonempty"));
    let probes: Vec<FiniteVector> =
        probe_values.iter().map(vector_from_value).collect::<Result<_>>()?;

    let factorability = factor::factorability_verdict(&matrix, &codomain, p, &schedule, &opts)?;
    let continuity = continuity_check(&matrix, &codomain, &schedule, false, opts.mode)?;

    let measure = AtomicVectorMeasure::new(matrix.clone(), codomain.clone(), n_e)?;
    let probes: Vec<ProbeNorms> = probes
        .into_iter()
        .map(|vector| {
            let norms = vmeasure::optimal_domain_norms(&measure, &vector, p, &opts)?;
            Ok(ProbeNorms { vector, norms })
        })
        .collect::<Result<_>>()?;

    // Small-window agreement between the ascent and the simplex grid; a gap
    // beyond 1% means one of the two is wrong.
    let n0 = n_e.min(4).max(1);
    let domain = SpaceSpec::lq(p);
    let ascent = factor::best_constant(&matrix, &codomain, &domain, n0, &opts)?;
    let grid = oracle::grid_best_constant(&matrix, &codomain, &domain, n0, n0, 48)?;
    let relative_gap = (ascent.value - grid).abs() / grid.abs().max(1e-300);
    let self_check = SelfCheck { n: n0, ascent: ascent.value, grid, relative_gap };
    if relative_gap > 0.01 {
        return Err(optdom::Error::OracleDisagreement(format!(
            "ascent constant {} vs grid reference {} at n = {n0} \
             (relative gap {relative_gap:.2e} exceeds 1%)",
            ascent.value, grid
        ))
        .into());
    }

    let report = AnalyzeReport {
        schema_version: 1,
        tool: ToolMeta { name: "optdom", version: env!("CARGO_PKG_VERSION") },
        factorability,
        continuity,
        probes,
        self_check,
    };

    let json = serde_json::to_string_pretty(&report).context("serializing report")?;
    if out.is_none() && md.is_none() {
        println!("{json}");
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(path) = &out {
        write_atomic(path, &json)?;
        println!("wrote JSON report to {}", path.display());
    }
    if let Some(path) = &md {
        write_atomic(path, &render_markdown(&report))?;
        println!("wrote markdown report to {}", path.display());
    }
    let verdict = serde_json::to_value(&report.factorability.verdict)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    println!(
        "{} into {}: {verdict}, C_p({}) = {:.6}",
        report.factorability.matrix,
        report.factorability.codomain,
        report.factorability.schedule.last().unwrap(),
        report.factorability.constants.last().unwrap().value,
    );
    Ok(ExitCode::SUCCESS)
}

fn render_markdown(report: &AnalyzeReport) -> String {
    let mut md = factor::report::to_markdown(&report.factorability);

    md.push_str("\n## Column-norm continuity\n\n");
    md.push_str("| n | sup_j lower | sup_j upper | argmax j |\n|--:|--:|--:|--:|\n");
    for pt in &report.continuity.points {
        let upper = pt
            .sup_upper
            .map_or_else(|| "open".to_string(), |u| format!("{u:.6e}"));
        md.push_str(&format!(
            "| {} | {:.6e} | {} | {} |\n",
            pt.n, pt.sup_lower, upper, pt.argmax_j
        ));
    }
    for w in &report.continuity.warnings {
        md.push_str(&format!("\n- warning: {w}\n"));
    }

    if !report.probes.is_empty() {
        md.push_str("\n## Probe norms\n\n");
        md.push_str("| probe | L1(m) lower | L1(m) upper | L^(1/p)(m) lower | intersection lower |\n");
        md.push_str("|---|--:|--:|--:|--:|\n");
        for probe in &report.probes {
            let pairs: Vec<String> =
                probe.vector.iter().map(|(i, v)| format!("{i}:{v}")).collect();
            let upper = probe
                .norms
                .l1
                .upper
                .map_or_else(|| "open".to_string(), |u| format!("{u:.6e}"));
            md.push_str(&format!(
                "| {} | {:.6e} | {} | {:.6e} | {:.6e} |\n",
                pairs.join(", "),
                probe.norms.l1.lower,
                upper,
                probe.norms.l_inv_p.lower,
                probe.norms.intersection.lower,
            ));
        }
    }

    md.push_str(&format!(
        "\n## Self-check\n\nAscent constant {:.6e} vs simplex-grid reference {:.6e} \
         at n = {} (relative gap {:.2e}).\n",
        report.self_check.ascent,
        report.self_check.grid,
        report.self_check.n,
        report.self_check.relative_gap,
    ));
    md
}

// ---------------------------------------------------------------------------
// norm.

fn run_norm(args: NormArgs) -> Result<ExitCode> {
    let vector = parse_vector(&args.vector)?;
    let seed = match args.seed {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let defaults = EvalOptions::default();
    let opts = EvalOptions {
        seed,
        n_enum: args.n_enum.unwrap_or(defaults.n_enum),
        restarts: args.restarts.unwrap_or(defaults.restarts),
        mode: if args.sequential { ExecMode::Sequential } else { ExecMode::Parallel },
        use_tail: args.use_tail,
    };
    opts.validate()?;

    let estimate = match args.selector {
        Selector::Space => {
            let space =
                parse_space(&args.space.ok_or_else(|| anyhow!("--space is required"))?)?;
            let value = seqspace::norm(&space, &vector)?;
            NormEstimate::exact(
                value,
                EstimateMethod::ExactSignEnumeration,
                format!("closed-form evaluation in {}", space.describe()),
            )
        }
        Selector::L1m | Selector::Lpm => {
            let matrix =
                parse_matrix(&args.matrix.ok_or_else(|| anyhow!("--matrix is required"))?)?;
            let codomain =
                parse_space(&args.codomain.ok_or_else(|| anyhow!("--codomain is required"))?)?;
            let measure = AtomicVectorMeasure::new(matrix, codomain, args.n_e)?;
            match args.selector {
                Selector::L1m => vmeasure::l1m_norm(&measure, &vector, &opts)?,
                _ => {
                    let p = args.p.ok_or_else(|| anyhow!("--p is required for lpm"))?;
                    vmeasure::lpm_norm(&measure, &vector, p, &opts)?
                }
            }
        }
    };

    let json = serde_json::to_string_pretty(&estimate).context("serializing estimate")?;
    emit(args.out.as_deref(), &json, "estimate")?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// verify.

fn run_verify_cmd(args: VerifyArgs) -> Result<ExitCode> {
    let scale: Scale = args.scale.parse().map_err(|e: String| anyhow!(e))?;
    let seed = match args.seed {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    };
    let mode = if args.sequential { ExecMode::Sequential } else { ExecMode::Parallel };

    let summary = match &args.matrix {
        Some(src) => {
            let matrix = parse_matrix(src)?;
            let codomain = parse_space(&args.codomain)?;
            let checks = check_instance(&matrix, &codomain, args.n, seed, args.trials, mode)?;
            VerifySummary { scale, seed, checks }
        }
        None => run_verify(seed, scale, mode),
    };

    print!("{}", summary.render());
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&summary).context("serializing summary")?;
        write_atomic(path, &json)?;
        println!("wrote summary to {}", path.display());
    }
    if summary.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: oracle disagreement, see the failing checks above");
        Ok(ExitCode::from(3))
    }
}

// ---------------------------------------------------------------------------
// generate.

fn run_generate(args: GenerateArgs) -> Result<ExitCode> {
    let mut doc = match args.kind.as_str() {
        "identity" | "cesaro" | "hilbert" => serde_json::json!({ "kind": args.kind }),
        "diagonal" | "lower" => {
            let generator = args
                .generator
                .as_deref()
                .ok_or_else(|| anyhow!("--gen is required for {} matrices", args.kind))?;
            let mut params = serde_json::Map::new();
            params.insert("kind".into(), Value::String(generator.into()));
            if let Some(c) = args.constant {
                params.insert("constant".into(), serde_json::json!(c));
            }
            match generator {
                "geometric" => {
                    let ratio =
                        args.ratio.ok_or_else(|| anyhow!("--ratio is required for geometric"))?;
                    params.insert("ratio".into(), serde_json::json!(ratio));
                }
                "power_decay" | "power" => {
                    let exponent = args
                        .exponent
                        .ok_or_else(|| anyhow!("--exponent is required for power decay"))?;
                    params.insert("kind".into(), Value::String("power_decay".into()));
                    params.insert("exponent".into(), serde_json::json!(exponent));
                }
                "explicit" => {
                    let raw =
                        args.values.ok_or_else(|| anyhow!("--values is required for explicit"))?;
                    let values: Vec<f64> = raw
                        .split(',')
                        .map(|v| {
                            v.trim()
                                .parse::<f64>()
                                .with_context(|| format!("value {:?}", v.trim()))
                        })
                        .collect::<Result<_>>()?;
                    params.insert("values".into(), serde_json::json!(values));
                }
                other => bail!("unknown generator {other:?}: geometric, power, or explicit"),
            }
            serde_json::json!({ "kind": args.kind, "params": Value::Object(params) })
        }
        other => bail!(
            "unknown matrix kind {other:?}: identity, cesaro, hilbert, diagonal, or lower"
        ),
    };
    if let Some(name) = &args.name {
        doc.as_object_mut().unwrap().insert("name".into(), Value::String(name.clone()));
    }

    // Round-trip through the loader so emitted files are known-good.
    MatrixOperator::from_json_value(&doc, None)?;

    let json = serde_json::to_string_pretty(&doc).context("serializing matrix")?;
    emit(args.out.as_deref(), &json, "matrix description")?;
    Ok(ExitCode::SUCCESS)
}
