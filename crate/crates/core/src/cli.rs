//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors
//! (unreadable or malformed input, failed analysis).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use crate::cluster::{select_k, standardize_columns};
use crate::dimensions::{dimension_scores, rank, DimensionScores, UnitMeasureTable};
use crate::exec::{self, Strategy};
use crate::ingest::{parse_csv, parse_mediawiki_xml, write_csv, CsvOptions, EditStream};
use crate::measures::{measure_network, MeasureConfig};
use crate::netbuild::{build_network, write_dot, write_edge_list};
use crate::report::{self, *};
use crate::synth::{generate, EventsPerPage, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "behavnet", version, about = "Behavioral network analysis of edit histories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the measure vector of every input unit.
    Analyze(UnitArgs),
    /// Standardize measures across units into dimension scores and rankings.
    Dimensions(UnitArgs),
    /// Ward clustering of units with silhouette selection of k.
    Cluster(ClusterArgs),
    /// Write a synthetic edit stream as canonical CSV.
    Generate(GenerateArgs),
    /// Export each unit's multigraph as a TSV edge list and a DOT file.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Csv,
    MediawikiXml,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterOn {
    #[default]
    Dimensions,
    Measures,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input units as NAME=PATH.
    #[arg(value_name = "NAME=PATH", required = true)]
    pub inputs: Vec<String>,
    /// Input format; inferred from the extension (.xml is MediaWiki) if omitted.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Drop pages whose title starts with PREFIX followed by ':' (repeatable).
    #[arg(long = "exclude-namespace", value_name = "PREFIX")]
    pub exclude_namespaces: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// Seconds within which an edit counts as fast.
    #[arg(long, default_value_t = 3600)]
    pub speed_window: u64,
    /// Editors with strictly more edits than this are active.
    #[arg(long, default_value_t = 10)]
    pub active_threshold: u64,
    /// Edit mass covered by the Pareto prefix.
    #[arg(long, default_value_t = 0.8)]
    pub pareto_mass: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output_format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct UnitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub units: UnitArgs,
    /// Feature space: the four dimension scores, or z-scored raw measures.
    #[arg(long, value_enum, default_value_t = ClusterOn::Dimensions)]
    pub cluster_on: ClusterOn,
    /// Largest k tried; defaults to min(units − 1, 10).
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    pub pages: u32,
    /// Fixed number of events per page.
    #[arg(long, default_value_t = 20, conflicts_with = "geometric_mean")]
    pub events_per_page: u32,
    /// Draw page lengths from a geometric distribution with this mean.
    #[arg(long)]
    pub geometric_mean: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub editors: u32,
    #[arg(long, default_value_t = 0.5)]
    pub p_self_loop: f64,
    #[arg(long, default_value_t = 0.3)]
    pub p_return: f64,
    #[arg(long, default_value_t = 0.3)]
    pub p_anonymous: f64,
    #[arg(long, default_value_t = 0.7)]
    pub gap_fast: f64,
    /// Seconds separating fast from slow gaps.
    #[arg(long, default_value_t = 3600)]
    pub window: u64,
    /// Zipf exponent of editor activity.
    #[arg(long, default_value_t = 1.0)]
    pub activity_skew: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output CSV file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Directory receiving NAME.edges.tsv and NAME.dot.
    #[arg(long, short, default_value = ".")]
    pub output: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

/// One resolved input unit.
#[derive(Clone, Debug, Serialize)]
pub struct UnitSpec {
    pub unit: String,
    pub path: String,
    pub format: InputFormat,
}

/// Fully resolved configuration, embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub inputs: Vec<UnitSpec>,
    pub exclude_namespaces: Vec<String>,
    pub speed_window: u64,
    pub active_threshold: u64,
    pub pareto_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_on: Option<ClusterOn>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    pub output: Option<String>,
    pub output_format: OutputFormat,
}

fn resolve_inputs(args: &InputArgs) -> Result<Vec<UnitSpec>, CliError> {
    let mut specs: Vec<UnitSpec> = Vec::with_capacity(args.inputs.len());
    for raw in &args.inputs {
        let Some((unit, path)) = raw.split_once('=') else {
            return Err(CliError::Usage(format!(
                "input {raw:?} must be given as NAME=PATH"
            )));
        };
        if unit.is_empty() || path.is_empty() {
            return Err(CliError::Usage(format!(
                "input {raw:?} must be given as NAME=PATH"
            )));
        }
        if specs.iter().any(|s| s.unit == unit) {
            return Err(CliError::Usage(format!("unit name {unit:?} is used twice")));
        }
        let format = args.format.unwrap_or_else(|| {
            let xml = Path::new(path)
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("xml"));
            if xml {
                InputFormat::MediawikiXml
            } else {
                InputFormat::Csv
            }
        });
        specs.push(UnitSpec {
            unit: unit.to_owned(),
            path: path.to_owned(),
            format,
        });
    }
    Ok(specs)
}

fn measure_config(args: &MeasureArgs) -> Result<MeasureConfig, CliError> {
    let config = MeasureConfig {
        speed_window: args.speed_window,
        active_threshold: args.active_threshold,
        pareto_mass: args.pareto_mass,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn load(spec: &UnitSpec, exclude: &[String]) -> Result<EditStream, CliError> {
    let file = File::open(&spec.path)
        .map_err(|e| CliError::Data(format!("{}: cannot open: {e}", spec.path)))?;
    let reader = BufReader::new(file);
    let mut stream = match spec.format {
        InputFormat::Csv => parse_csv(reader, &CsvOptions::default()),
        InputFormat::MediawikiXml => parse_mediawiki_xml(reader),
    }
    .map_err(|e| CliError::Data(format!("{}: {e}", spec.path)))?;
    if !exclude.is_empty() {
        stream.retain_pages(|p| {
            !exclude
                .iter()
                .any(|ns| p.page_id.strip_prefix(ns.as_str()).is_some_and(|r| r.starts_with(':')))
        });
    }
    info!(
        "{}: {} pages, {} events, {} editors, {} skipped",
        spec.unit,
        stream.page_count(),
        stream.event_count(),
        stream.editor_count(),
        stream.skipped()
    );
    Ok(stream)
}

/// Loads and measures every unit, in parallel across units.
fn measure_units(
    specs: &[UnitSpec],
    exclude: &[String],
    config: &MeasureConfig,
) -> Result<Vec<UnitMeasures>, CliError> {
    exec::map(Strategy::default(), specs, |spec| {
        let stream = load(spec, exclude)?;
        let net = build_network(&stream).map_err(|e| CliError::Data(format!("{}: {e}", spec.path)))?;
        // units already run concurrently
        let measures = measure_network(&net, config, Strategy::Sequential)
            .map_err(|e| CliError::Data(format!("{}: {e}", spec.path)))?;
        Ok(UnitMeasures {
            unit: spec.unit.clone(),
            path: spec.path.clone(),
            format: match spec.format {
                InputFormat::Csv => "csv".into(),
                InputFormat::MediawikiXml => "mediawiki-xml".into(),
            },
            pages: stream.page_count(),
            skipped: stream.skipped(),
            measures,
        })
    })
    .into_iter()
    .collect()
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Data(format!("{}: cannot write: {e}", path.display()))),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report::write_all(&mut lock, text).map_err(CliError::from)
        }
    }
}

fn base_config(command: &'static str, args: &UnitArgs) -> Result<(RunConfig, MeasureConfig), CliError> {
    let inputs = resolve_inputs(&args.input)?;
    let measure = measure_config(&args.measure)?;
    Ok((
        RunConfig {
            command,
            inputs,
            exclude_namespaces: args.input.exclude_namespaces.clone(),
            speed_window: measure.speed_window,
            active_threshold: measure.active_threshold,
            pareto_mass: measure.pareto_mass,
            cluster_on: None,
            k_max: None,
            output: args.output.output.as_ref().map(|p| p.display().to_string()),
            output_format: args.output.output_format,
        },
        measure,
    ))
}

/// Report text for `analyze`.
pub fn cmd_analyze(args: &UnitArgs) -> Result<String, CliError> {
    let (config, measure) = base_config("analyze", args)?;
    let mut units = measure_units(&config.inputs, &config.exclude_namespaces, &measure)?;
    for u in &mut units {
        u.measures = rounded_measures(&u.measures);
    }
    let format = config.output_format;
    let report = AnalyzeReport {
        tool: TOOL,
        version: VERSION,
        config,
        units,
    };
    Ok(match format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => analyze_csv(&report),
    })
}

type NamedScores = (String, DimensionScores);

fn scored_units(
    config: &RunConfig,
    measure: &MeasureConfig,
) -> Result<(Vec<UnitMeasures>, Vec<NamedScores>), CliError> {
    let units = measure_units(&config.inputs, &config.exclude_namespaces, measure)?;
    let table = UnitMeasureTable::new(
        units
            .iter()
            .map(|u| (u.unit.clone(), u.measures.clone()))
            .collect(),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let scores = dimension_scores(&table).map_err(|e| CliError::Data(e.to_string()))?;
    Ok((units, scores))
}

/// Report text for `dimensions`.
pub fn cmd_dimensions(args: &UnitArgs) -> Result<String, CliError> {
    let (config, measure) = base_config("dimensions", args)?;
    if config.inputs.len() < 2 {
        return Err(CliError::Usage(format!(
            "dimension scores standardize across units and need at least 2 inputs, got {}",
            config.inputs.len()
        )));
    }
    let (_, scores) = scored_units(&config, &measure)?;
    let rankings = Rankings::from_fn(|d| rank(&scores, d));
    let format = config.output_format;
    let report = DimensionReport {
        tool: TOOL,
        version: VERSION,
        config,
        units: scores
            .iter()
            .map(|(unit, s)| UnitScores {
                unit: unit.clone(),
                scores: rounded_scores(s),
            })
            .collect(),
        rankings,
    };
    Ok(match format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => dimensions_csv(&report),
    })
}

/// Report text for `cluster`.
pub fn cmd_cluster(args: &ClusterArgs) -> Result<String, CliError> {
    let (mut config, measure) = base_config("cluster", &args.units)?;
    let n = config.inputs.len();
    if n < 3 {
        return Err(CliError::Usage(format!(
            "silhouette selection needs 2 <= k <= n-1, so at least 3 inputs are required, got {n}"
        )));
    }
    let k_max = args.k_max.unwrap_or((n - 1).min(10));
    if k_max < 2 || k_max > n - 1 {
        return Err(CliError::Usage(format!(
            "--k-max must lie in 2..={} for {n} units, got {k_max}",
            n - 1
        )));
    }
    config.cluster_on = Some(args.cluster_on);
    config.k_max = Some(k_max);

    let (units, scores) = scored_units(&config, &measure)?;
    let points: Vec<Vec<f64>> = match args.cluster_on {
        ClusterOn::Dimensions => scores.iter().map(|(_, s)| s.to_array().to_vec()).collect(),
        ClusterOn::Measures => standardize_columns(
            &units
                .iter()
                .map(|u| u.measures.columns().to_vec())
                .collect::<Vec<_>>(),
        ),
    };
    let selection = select_k(&points, k_max).map_err(|e| CliError::Data(e.to_string()))?;
    let names: Vec<String> = units.iter().map(|u| u.unit.clone()).collect();
    let note = (k_max == 2).then(|| {
        format!("with {n} units and k_max = 2, k = 2 is the only valid silhouette candidate")
    });
    let format = config.output_format;
    let report = ClusterReport {
        tool: TOOL,
        version: VERSION,
        config,
        cluster_on: match args.cluster_on {
            ClusterOn::Dimensions => "dimensions".into(),
            ClusterOn::Measures => "measures".into(),
        },
        merges: selection
            .dendrogram
            .merges()
            .iter()
            .map(|m| crate::cluster::Merge {
                height: round_sig(m.height),
                ..*m
            })
            .collect(),
        silhouette: selection
            .widths
            .iter()
            .map(|&(k, w)| SilhouetteRow {
                k,
                width: round_sig(w),
            })
            .collect(),
        selected_k: selection.best.k,
        selected_width: round_sig(selection.best.silhouette),
        labels: names
            .iter()
            .zip(&selection.best.labels)
            .map(|(u, &l)| UnitLabel {
                unit: u.clone(),
                label: l,
            })
            .collect(),
        units: names,
        note,
    };
    Ok(match format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => cluster_csv(&report),
    })
}

pub fn synth_config(args: &GenerateArgs) -> SynthConfig {
    SynthConfig {
        pages: args.pages,
        events_per_page: match args.geometric_mean {
            Some(mean) => EventsPerPage::Geometric { mean },
            None => EventsPerPage::Fixed {
                count: args.events_per_page,
            },
        },
        editors: args.editors,
        p_self_loop: args.p_self_loop,
        p_return: args.p_return,
        p_anonymous: args.p_anonymous,
        gap_fast: args.gap_fast,
        window: args.window,
        activity_skew: args.activity_skew,
        seed: args.seed,
    }
}

/// Canonical CSV for `generate`.
pub fn cmd_generate(args: &GenerateArgs) -> Result<Vec<u8>, CliError> {
    let stream = generate(&synth_config(args)).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = Vec::new();
    write_csv(&stream, &mut out).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(out)
}

fn file_stem(unit: &str) -> String {
    unit.chars()
        .map(|c| if c == '/' || c == '\\' || c == '\0' { '_' } else { c })
        .collect()
}

/// Writes `NAME.edges.tsv` and `NAME.dot` per unit; returns the paths.
pub fn cmd_export(args: &ExportArgs) -> Result<Vec<PathBuf>, CliError> {
    let specs = resolve_inputs(&args.input)?;
    fs::create_dir_all(&args.output)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.output.display())))?;
    let written = exec::map(Strategy::default(), &specs, |spec| {
        let stream = load(spec, &args.input.exclude_namespaces)?;
        let net = build_network(&stream).map_err(|e| CliError::Data(format!("{}: {e}", spec.path)))?;
        let stem = file_stem(&spec.unit);
        let edges = args.output.join(format!("{stem}.edges.tsv"));
        let dot = args.output.join(format!("{stem}.dot"));
        let open = |p: &PathBuf| {
            File::create(p)
                .map(io::BufWriter::new)
                .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
        };
        write_edge_list(&net, open(&edges)?)?;
        write_dot(&net, &spec.unit, open(&dot)?)?;
        Ok::<_, CliError>(vec![edges, dot])
    });
    let mut paths = Vec::new();
    for w in written {
        paths.extend(w?);
    }
    Ok(paths)
}

/// Runs one parsed command, writing its output.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(args) => emit(&args.output.output, &cmd_analyze(args)?),
        Command::Dimensions(args) => emit(&args.output.output, &cmd_dimensions(args)?),
        Command::Cluster(args) => emit(&args.units.output.output, &cmd_cluster(args)?),
        Command::Generate(args) => {
            let bytes = cmd_generate(args)?;
            match &args.output {
                Some(path) => fs::write(path, bytes)
                    .map_err(|e| CliError::Data(format!("{}: cannot write: {e}", path.display()))),
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    lock.write_all(&bytes)?;
                    lock.flush()?;
                    Ok(())
                }
            }
        }
        Command::Export(args) => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for path in cmd_export(args)? {
                writeln!(lock, "{}", path.display())?;
            }
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("behavnet: {}", e.message());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_args(inputs: &[&str]) -> UnitArgs {
        let mut argv = vec!["behavnet", "analyze"];
        argv.extend(inputs);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Analyze(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn input_syntax() {
        let a = unit_args(&["ko=data/ko.xml", "ja=ja.csv"]);
        let specs = resolve_inputs(&a.input).unwrap();
        assert_eq!(specs[0].format, InputFormat::MediawikiXml);
        assert_eq!(specs[1].format, InputFormat::Csv);
        assert!(matches!(
            resolve_inputs(&unit_args(&["ko.csv"]).input),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            resolve_inputs(&unit_args(&["a=x.csv", "a=y.csv"]).input),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn defaults() {
        let a = unit_args(&["a=x.csv"]);
        assert_eq!(a.measure.speed_window, 3600);
        assert_eq!(a.measure.active_threshold, 10);
        assert_eq!(a.measure.pareto_mass, 0.8);
        assert_eq!(a.output.output_format, OutputFormat::Json);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["behavnet"]), 1);
        assert_eq!(run(["behavnet", "analyze"]), 1);
        assert_eq!(run(["behavnet", "frobnicate"]), 1);
        assert_eq!(run(["behavnet", "--version"]), 0);
    }

    #[test]
    fn missing_file_exits_two() {
        assert_eq!(run(["behavnet", "analyze", "a=/nonexistent/file.csv"]), 2);
    }

    #[test]
    fn file_stems() {
        assert_eq!(file_stem("ko/wiki"), "ko_wiki");
    }
}
