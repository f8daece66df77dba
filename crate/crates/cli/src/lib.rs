//! Command-line front end: spec and records file formats, the `profile`,
//! `compare` and `pareto` commands, and their text, CSV, JSON and SVG
//! renderings.

use std::cmp::Ordering;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use costlens_core::analysis::{
    misnomer_report, pareto_frontier, Indicator, MisnomerReport, ModelRecord, RankDisagreement,
};
use costlens_core::archlib::{Arrangement, LmConfig, VitConfig};
use costlens_core::archspec::ArchSpec;
use costlens_core::indicators::OptimizerKind;
use costlens_core::latency::HardwareModel;
use serde::Serialize;

pub mod error;
pub mod format;
pub mod profile;
pub mod records;
pub mod specfile;
pub mod svg;

pub use error::CliError;
pub use profile::{profile, CostProfile, ProfileInputs};
use format::{render_table, sig6};
use records::{indicator_from_column, read_records};
use specfile::{resolve_hardware, BuilderRef, SpecFile};

#[derive(Debug, Parser)]
#[command(name = "costlens", version, about = "Analytical cost indicators for neural architectures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute every available indicator for one or more architectures.
    Profile(ProfileArgs),
    /// Tabulate models and report where cost indicators disagree on their ranking.
    Compare(CompareArgs),
    /// Quality-vs-cost Pareto frontier of a records file.
    Pareto(ParetoArgs),
    /// Check spec files and list every violation.
    Validate {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
    },
    /// Print the JSON schema of the spec file format.
    Schema,
    /// List the built-in hardware presets as JSON.
    Presets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Vit,
    Ut,
    Moe,
    Lm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArrangementArg {
    DecoderOnly,
    EncoderDecoder,
}

/// Builds an architecture from flags instead of a spec file.
#[derive(Debug, Clone, Args)]
pub struct BuilderArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Patch size for the ViT-Base-derived families.
    #[arg(long, default_value_t = 16)]
    pub patch: u64,
    #[arg(long)]
    pub depth: Option<u64>,
    #[arg(long)]
    pub model_dim: Option<u64>,
    #[arg(long)]
    pub heads: Option<u64>,
    #[arg(long)]
    pub ffn_dim: Option<u64>,
    /// Shared-block applications (ut); defaults to the depth.
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 8)]
    pub experts: u64,
    #[arg(long, default_value_t = 1)]
    pub top_k: u64,
    #[arg(long, default_value_t = 2)]
    pub moe_every: u64,
    #[arg(long, value_enum, default_value = "encoder-decoder")]
    pub arrangement: ArrangementArg,
    /// Layers per stack (lm).
    #[arg(long, default_value_t = 6)]
    pub layers: u64,
    #[arg(long, default_value_t = 32128)]
    pub vocab: u64,
    #[arg(long, default_value_t = 512)]
    pub input_length: u64,
    #[arg(long, default_value_t = 512)]
    pub output_length: u64,
}

impl BuilderArgs {
    pub fn builder(&self) -> Option<BuilderRef> {
        let family = self.family?;
        let vit = || {
            let mut cfg = VitConfig::base(self.patch);
            cfg.depth = self.depth.unwrap_or(cfg.depth);
            cfg.model_dim = self.model_dim.unwrap_or(cfg.model_dim);
            cfg.num_heads = self.heads.unwrap_or(cfg.num_heads);
            cfg.ffn_dim = self.ffn_dim.unwrap_or(cfg.ffn_dim);
            cfg
        };
        Some(match family {
            Family::Vit => BuilderRef::Vit { config: vit() },
            Family::Ut => {
                let config = vit();
                BuilderRef::Ut {
                    steps: self.steps.unwrap_or(config.depth),
                    config,
                }
            }
            Family::Moe => BuilderRef::Moe {
                config: vit(),
                num_experts: self.experts,
                experts_per_token: self.top_k,
                moe_every: self.moe_every,
            },
            Family::Lm => BuilderRef::Lm {
                config: LmConfig {
                    arrangement: match self.arrangement {
                        ArrangementArg::DecoderOnly => Arrangement::DecoderOnly,
                        ArrangementArg::EncoderDecoder => Arrangement::EncoderDecoder,
                    },
                    layers_per_stack: self.layers,
                    model_dim: self.model_dim.unwrap_or(512),
                    ffn_dim: self.ffn_dim.unwrap_or(2048),
                    heads: self.heads.unwrap_or(8),
                    vocab: self.vocab,
                    input_length: self.input_length,
                    output_length: self.output_length,
                },
            },
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    /// Spec files; omit when using --family.
    pub specs: Vec<PathBuf>,
    #[command(flatten)]
    pub builder: BuilderArgs,
    /// Preset name, preset file, or a name found in $COSTLENS_HW_DIR.
    #[arg(long)]
    pub hw: Option<String>,
    #[arg(long)]
    pub batch: Option<u64>,
    #[arg(long)]
    pub optimizer: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Spec files to profile and compare.
    pub specs: Vec<PathBuf>,
    /// Records CSV instead of spec files.
    #[arg(long, conflicts_with = "specs")]
    pub records: Option<PathBuf>,
    /// Comma-separated indicators; the table is sorted by the first.
    #[arg(long, value_delimiter = ',')]
    pub indicators: Vec<String>,
    #[arg(long)]
    pub hw: Option<String>,
    #[arg(long)]
    pub batch: Option<u64>,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct ParetoArgs {
    pub records: PathBuf,
    /// Cost indicator column.
    #[arg(long)]
    pub cost: String,
    /// Quality column; records files carry a single one named `quality`.
    #[arg(long, default_value = "quality")]
    pub quality: String,
    /// Also write an SVG scatter plot with the frontier drawn as a polyline.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputFormat,
}

/// Runs one command. Primary output goes to `out`, warnings to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let text = match &cli.command {
        Command::Profile(args) => cmd_profile(args, err)?,
        Command::Compare(args) => cmd_compare(args, err)?,
        Command::Pareto(args) => cmd_pareto(args)?,
        Command::Validate { specs } => cmd_validate(specs)?,
        Command::Schema => specfile::spec_file_schema(),
        Command::Presets => to_json(&HardwareModel::presets()),
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("writing output: {e}")))
}

/// Runs `cli` and maps errors to the documented exit codes, printing them
/// as JSON on `err`.
pub fn main_with(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

struct Job {
    source: String,
    arch: ArchSpec,
    inputs: ProfileInputs,
}

fn parse_optimizer(name: Option<&str>) -> Result<Option<OptimizerKind>, CliError> {
    name.map(|n| n.parse().map_err(CliError::Input)).transpose()
}

/// Loads spec files (or the flag-built architecture) into profiling jobs.
fn collect_jobs(
    specs: &[PathBuf],
    builder: Option<BuilderRef>,
    hw: Option<&str>,
    batch: Option<u64>,
    optimizer: Option<OptimizerKind>,
) -> Result<Vec<Job>, CliError> {
    let flag_hw = hw.map(resolve_hardware).transpose()?;
    let mut files: Vec<(String, SpecFile)> = Vec::new();
    if let Some(b) = builder {
        if !specs.is_empty() {
            return Err(CliError::Input("give spec files or --family, not both".into()));
        }
        let mut file = SpecFile::inline(b.build()?);
        file.builder = None;
        files.push(("--family".into(), file));
    }
    for path in specs {
        files.push((path.display().to_string(), SpecFile::load(path)?));
    }
    if files.is_empty() {
        return Err(CliError::Input("no spec files given (or use --family)".into()));
    }
    files
        .into_iter()
        .map(|(source, file)| {
            let arch = file.architecture(&source)?;
            let hardware = match (&flag_hw, &file.hardware) {
                (Some(h), _) => Some(h.clone()),
                (None, Some(r)) => Some(r.resolve()?),
                (None, None) => None,
            };
            let batch = batch.or(file.batch).unwrap_or(1);
            if batch == 0 {
                return Err(CliError::Input("batch must be at least 1".into()));
            }
            Ok(Job {
                source,
                arch,
                inputs: ProfileInputs {
                    family: file.family.clone(),
                    quality: file.quality,
                    batch,
                    optimizer: optimizer.or(file.optimizer),
                    hardware,
                    energy: file.energy,
                    pricing: file.pricing,
                },
            })
        })
        .collect()
}

/// Profiles jobs concurrently; results keep the input order.
fn run_jobs(jobs: &[Job], err: &mut dyn Write) -> Result<Vec<CostProfile>, CliError> {
    if jobs.iter().any(|j| j.inputs.hardware.is_none()) {
        let _ = writeln!(
            err,
            "warning: no hardware model given; latency and throughput are omitted"
        );
    }
    let results: Vec<Result<CostProfile, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| scope.spawn(move || profile(&job.arch, &job.inputs)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("profiling thread panicked"))
            .collect()
    });
    results
        .into_iter()
        .zip(jobs)
        .map(|(r, job)| {
            r.map_err(|e| match e {
                CliError::Input(m) => CliError::Input(format!("{}: {m}", job.source)),
                other => other,
            })
        })
        .collect()
}

const PROFILE_COLUMNS: [&str; 21] = [
    "name",
    "family",
    "quality",
    "batch",
    "optimizer",
    "hardware",
    "params",
    "trainable_params",
    "shared_param_savings",
    "flops",
    "macs",
    "gflops_per_example",
    "gmacs_per_example",
    "activation_elements",
    "memory_access_bytes",
    "training_peak_bytes",
    "inference_peak_bytes",
    "latency_sec",
    "throughput_examples_per_sec",
    "carbon_kg_co2e",
    "monetary_cost",
];

fn profile_cells(p: &CostProfile) -> Vec<String> {
    let n = |v: u64| sig6(v as f64);
    let opt = |v: Option<f64>| v.map(sig6).unwrap_or_default();
    let optimizer = serde_json::to_value(p.optimizer)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    vec![
        p.name.clone(),
        p.family.clone().unwrap_or_default(),
        opt(p.quality),
        n(p.batch),
        optimizer,
        p.hardware.clone().unwrap_or_default(),
        n(p.params),
        n(p.trainable_params),
        n(p.shared_param_savings),
        n(p.flops),
        n(p.macs),
        sig6(p.gflops_per_example),
        sig6(p.gmacs_per_example),
        n(p.activation_elements),
        n(p.memory_access_bytes),
        p.training_memory.peak_training_bytes.map(n).unwrap_or_default(),
        n(p.inference_memory.peak_inference_bytes),
        opt(p.latency_sec),
        opt(p.throughput_examples_per_sec),
        opt(p.carbon_kg_co2e),
        opt(p.monetary_cost),
    ]
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn render_profiles(profiles: &[CostProfile], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json if profiles.len() == 1 => to_json(&profiles[0]),
        OutputFormat::Json => to_json(profiles),
        OutputFormat::Csv => write_csv(&PROFILE_COLUMNS, profiles.iter().map(profile_cells)),
        OutputFormat::Table => {
            let cells: Vec<Vec<String>> = profiles.iter().map(profile_cells).collect();
            let mut header = vec!["indicator".to_string()];
            header.extend(cells.iter().map(|c| c[0].clone()));
            let rows: Vec<Vec<String>> = PROFILE_COLUMNS
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(i, _)| cells.iter().any(|c| !c[*i].is_empty()))
                .map(|(i, name)| {
                    let mut row = vec![name.to_string()];
                    row.extend(cells.iter().map(|c| c[i].clone()));
                    row
                })
                .collect();
            render_table(&header, &rows)
        }
    }
}

fn cmd_profile(args: &ProfileArgs, err: &mut dyn Write) -> Result<String, CliError> {
    let jobs = collect_jobs(
        &args.specs,
        args.builder.builder(),
        args.hw.as_deref(),
        args.batch,
        parse_optimizer(args.optimizer.as_deref())?,
    )?;
    let profiles = run_jobs(&jobs, err)?;
    Ok(render_profiles(&profiles, args.output))
}

fn cmd_validate(specs: &[PathBuf]) -> Result<String, CliError> {
    let mut out = String::new();
    for path in specs {
        let source = path.display().to_string();
        SpecFile::load(path)?.architecture(&source)?;
        out.push_str(&format!("{source}: ok\n"));
    }
    Ok(out)
}

fn parse_indicator(name: &str) -> Result<Indicator, CliError> {
    indicator_from_column(name).ok_or_else(|| {
        let known: Vec<&str> = Indicator::ALL.iter().map(|i| i.id()).collect();
        CliError::Input(format!(
            "unknown indicator '{name}' (known: {})",
            known.join(", ")
        ))
    })
}

fn load_records(path: &Path) -> Result<Vec<ModelRecord>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_records(&path.display().to_string(), file)
}

/// Tau-b is undefined when one ordering is entirely tied; when both are,
/// the two rankings are identical and agreement is reported as 1.
pub fn rank_agreement(records: &[ModelRecord], d: &RankDisagreement) -> Option<f64> {
    d.kendall_tau.or_else(|| {
        let values = |i: Indicator| -> Vec<f64> { records.iter().filter_map(|r| r.cost(i)).collect() };
        let constant = |v: Vec<f64>| v.windows(2).all(|w| w[0] == w[1]);
        (constant(values(d.indicator_a)) && constant(values(d.indicator_b))).then_some(1.0)
    })
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub indicators: Vec<Indicator>,
    pub records: Vec<ModelRecord>,
    pub rank_agreement: Vec<PairAgreement>,
    pub report: MisnomerReport,
}

#[derive(Debug, Serialize)]
pub struct PairAgreement {
    pub indicator_a: Indicator,
    pub indicator_b: Indicator,
    pub kendall_tau_b: Option<f64>,
    pub inverted_pairs: usize,
}

/// Restricts records to `indicators`, sorts them by the first and builds
/// the misnomer report.
pub fn compare_records(
    mut records: Vec<ModelRecord>,
    indicators: &[Indicator],
) -> Result<Comparison, CliError> {
    for r in &mut records {
        r.indicators.retain(|i, _| indicators.contains(i));
    }
    let first = indicators[0];
    records.sort_by(|a, b| match (a.cost(first), b.cost(first)) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
    .then_with(|| a.name.cmp(&b.name)));
    let empty: Vec<String> = records
        .iter()
        .filter(|r| r.indicators.is_empty())
        .map(|r| r.name.clone())
        .collect();
    if !empty.is_empty() {
        return Err(CliError::Input(format!(
            "no requested indicator present for: {}",
            empty.join(", ")
        )));
    }
    let report = misnomer_report(&records)?;
    let rank_agreement = report
        .disagreements
        .iter()
        .map(|d| PairAgreement {
            indicator_a: d.indicator_a,
            indicator_b: d.indicator_b,
            kendall_tau_b: rank_agreement(&records, d),
            inverted_pairs: d.inverted_pairs.len(),
        })
        .collect();
    Ok(Comparison {
        indicators: indicators.to_vec(),
        records,
        rank_agreement,
        report,
    })
}

pub fn render_comparison(c: &Comparison) -> String {
    let mut header: Vec<String> = ["name", "family", "quality"].map(String::from).to_vec();
    header.extend(c.indicators.iter().map(|i| i.id().to_string()));
    let rows: Vec<Vec<String>> = c
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.name.clone(), r.family.clone().unwrap_or_default(), sig6(r.quality)];
            row.extend(c.indicators.iter().map(|i| r.value(*i).map(sig6).unwrap_or_default()));
            row
        })
        .collect();
    let mut out = render_table(&header, &rows);
    out.push_str("\nrank agreement (kendall tau-b)\n");
    for (pair, d) in c.rank_agreement.iter().zip(&c.report.disagreements) {
        let tau = pair.kendall_tau_b.map(sig6).unwrap_or_else(|| "undefined".into());
        out.push_str(&format!(
            "  {} vs {}: tau_b {tau} over {} models, {} inverted pair(s)\n",
            d.indicator_a,
            d.indicator_b,
            d.compared,
            d.inverted_pairs.len()
        ));
        for p in &d.inverted_pairs {
            out.push_str(&format!(
                "    {} / {}: {} cheaper by {}, {} cheaper by {}\n",
                p.model_a, p.model_b, p.model_a, p.indicator_a, p.model_b, p.indicator_b
            ));
        }
    }
    out.push_str("\npareto frontier (quality vs cost)\n");
    for (i, names) in &c.report.frontiers {
        out.push_str(&format!("  {i}: {}\n", names.join(", ")));
    }
    if !c.report.pareto_instability.is_empty() {
        out.push_str("\nfrontier membership depends on the indicator\n");
        for p in &c.report.pareto_instability {
            let ids = |v: &[Indicator]| v.iter().map(|i| i.id()).collect::<Vec<_>>().join(", ");
            out.push_str(&format!(
                "  {}: on frontier under {}; dominated under {}\n",
                p.model,
                ids(&p.frontier_under),
                ids(&p.dominated_under)
            ));
        }
    }
    if !c.report.coverage_warnings.is_empty() {
        out.push_str("\nmissing values\n");
        for w in &c.report.coverage_warnings {
            out.push_str(&format!("  {}: {}\n", w.model, w.missing));
        }
    }
    out
}

fn cmd_compare(args: &CompareArgs, err: &mut dyn Write) -> Result<String, CliError> {
    let records = match &args.records {
        Some(path) => load_records(path)?,
        None => {
            let jobs = collect_jobs(&args.specs, None, args.hw.as_deref(), args.batch, None)?;
            run_jobs(&jobs, err)?
                .iter()
                .map(CostProfile::to_record)
                .collect::<Result<_, _>>()?
        }
    };
    let mut indicators: Vec<Indicator> = Vec::new();
    for name in &args.indicators {
        let i = parse_indicator(name)?;
        if !indicators.contains(&i) {
            indicators.push(i);
        }
    }
    if indicators.is_empty() {
        indicators = Indicator::ALL
            .into_iter()
            .filter(|i| records.iter().any(|r| r.value(*i).is_some()))
            .collect();
    }
    let comparison = compare_records(records, &indicators)?;
    match args.output {
        OutputFormat::Json => Ok(to_json(&comparison)),
        OutputFormat::Csv => Ok(records::write_records(&comparison.records)),
        OutputFormat::Table => Ok(render_comparison(&comparison)),
    }
}

#[derive(Debug, Serialize)]
pub struct ParetoListing {
    pub quality: String,
    pub cost: Indicator,
    /// Frontier members in increasing cost order.
    pub frontier: Vec<String>,
    pub records: Vec<ParetoRow>,
}

#[derive(Debug, Serialize)]
pub struct ParetoRow {
    pub name: String,
    pub quality: f64,
    pub cost: f64,
    pub on_frontier: bool,
}

pub fn pareto_listing(records: &[ModelRecord], cost: Indicator) -> Result<ParetoListing, CliError> {
    let missing: Vec<&str> = records
        .iter()
        .filter(|r| r.value(cost).is_none())
        .map(|r| r.name.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Input(format!(
            "cost column '{cost}' has no value for: {}",
            missing.join(", ")
        )));
    }
    let frontier: Vec<String> = pareto_frontier(records, cost)?
        .into_iter()
        .map(|r| r.name.clone())
        .collect();
    let rows = records
        .iter()
        .map(|r| ParetoRow {
            name: r.name.clone(),
            quality: r.quality,
            cost: r.value(cost).expect("checked above"),
            on_frontier: frontier.contains(&r.name),
        })
        .collect();
    Ok(ParetoListing {
        quality: "quality".into(),
        cost,
        frontier,
        records: rows,
    })
}

pub fn pareto_svg(listing: &ParetoListing) -> String {
    let points: Vec<svg::Point> = listing
        .records
        .iter()
        .map(|r| svg::Point {
            name: &r.name,
            cost: r.cost,
            quality: r.quality,
            on_frontier: r.on_frontier,
        })
        .collect();
    let order: Vec<usize> = listing
        .frontier
        .iter()
        .filter_map(|n| listing.records.iter().position(|r| &r.name == n))
        .collect();
    svg::scatter(&points, &order, listing.cost.id(), &listing.quality)
}

fn cmd_pareto(args: &ParetoArgs) -> Result<String, CliError> {
    let records = load_records(&args.records)?;
    let source = args.records.display().to_string();
    if args.quality != "quality" {
        return Err(CliError::Schema {
            path: source,
            message: format!("no quality column '{}' (records carry 'quality')", args.quality),
        });
    }
    let cost = parse_indicator(&args.cost)?;
    if !records.iter().any(|r| r.value(cost).is_some()) {
        return Err(CliError::Schema {
            path: source,
            message: format!("cost column '{}' is absent", args.cost),
        });
    }
    let listing = pareto_listing(&records, cost)?;
    if let Some(path) = &args.svg {
        std::fs::write(path, pareto_svg(&listing)).map_err(|e| CliError::io(path, e))?;
    }
    Ok(match args.output {
        OutputFormat::Json => to_json(&listing),
        OutputFormat::Csv => write_csv(
            &["name", "quality", listing.cost.id(), "on_frontier"],
            listing.records.iter().map(|r| {
                vec![r.name.clone(), sig6(r.quality), sig6(r.cost), r.on_frontier.to_string()]
            }),
        ),
        OutputFormat::Table => {
            let header: Vec<String> =
                ["name", "quality", listing.cost.id(), "frontier"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> = listing
                .records
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        sig6(r.quality),
                        sig6(r.cost),
                        if r.on_frontier { "*".into() } else { String::new() },
                    ]
                })
                .collect();
            let mut out = render_table(&header, &rows);
            out.push_str(&format!(
                "\nfrontier ({} ascending): {}\n",
                listing.cost,
                listing.frontier.join(", ")
            ));
            out
        }
    })
}
