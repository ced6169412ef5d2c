//! The `gdpsom` command line.
//!
//! Exit status is 0 on success (warnings included) and 2 on usage or data
//! errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdpsom_core::dataset::ContributionBase;
use gdpsom_core::klassen;
use gdpsom_core::pipeline::{self, compare_with_klassen, evaluate, PipelineConfig, PipelineOutput};
use gdpsom_core::som::{quantization_error, GridSpec, SomConfig, Topology};

use crate::documents::{self, CompareReport, Comparison, RunReport};
use crate::features::{self, FeatureTable, LabelColumn};
use crate::manifest::{self, InputFile, OutputFile, RunManifest, MANIFEST_FILE};
use crate::{hitmap, panel, Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "gdpsom",
    version,
    about = "SOM + naive Bayes clustering of regional GDP sector features"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive feature rows (v1..v4) from a raw GDP panel CSV.
    Ingest(IngestArgs),
    /// Train the SOM, fit naive Bayes on its pseudo-labels and classify the test rows.
    Run(RunArgs),
    /// Compare two labelings of a feature CSV (klassen/model columns or recomputed quadrants).
    Compare(CompareArgs),
    /// Repeat a run from its manifest and check that every output is identical.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Panel CSV with columns region_id,region_kind,sector,year,amount.
    pub panel: PathBuf,
    /// Output feature CSV.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Total GDP the district contribution is measured against.
    #[arg(long, value_enum, default_value_t = Base::Province)]
    pub contribution_base: Base,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Base {
    Province,
    Region,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TopologyArg {
    #[value(alias = "hexagonal")]
    Hex,
    #[value(alias = "rectangular")]
    Rect,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Training feature CSV.
    pub train: PathBuf,
    /// Test feature CSV.
    pub test: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = gdpsom_core::som::DEFAULT_EPOCHS)]
    pub epochs: u32,
    /// Map size as ROWSxCOLS.
    #[arg(long, default_value = "2x2", value_parser = parse_grid)]
    pub grid: (usize, usize),
    #[arg(long, value_enum, default_value_t = TopologyArg::Hex)]
    pub topology: TopologyArg,
    /// Standardize features before training.
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub normalize: Switch,
    /// Train on the test file and test on the training file.
    #[arg(long)]
    pub swap_roles: bool,
    /// Output directory.
    #[arg(long, default_value = "gdpsom-out")]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Labeling {
    /// The file's `klassen` column.
    Klassen,
    /// The file's `model` column.
    Model,
    /// Klassen quadrants recomputed from v1..v4.
    Recomputed,
}

impl Labeling {
    fn name(self) -> &'static str {
        match self {
            Labeling::Klassen => "klassen",
            Labeling::Model => "model",
            Labeling::Recomputed => "recomputed-klassen",
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Feature CSV carrying label columns.
    pub features: PathBuf,
    /// Reference labeling.
    #[arg(long, value_enum, default_value_t = Labeling::Klassen)]
    pub left: Labeling,
    /// Labeling compared against the reference.
    #[arg(long, value_enum, default_value_t = Labeling::Model)]
    pub right: Labeling,
    /// Also write the comparison as a JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Directory for the replayed outputs.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{s}` is not ROWSxCOLS"))?;
    let parse = |v: &str| v.trim().parse::<usize>().ok().filter(|&n| n > 0);
    match (parse(r), parse(c)) {
        (Some(r), Some(c)) => Ok((r, c)),
        _ => Err(format!("`{s}` is not ROWSxCOLS with positive sizes")),
    }
}

/// Parses arguments, runs the command and maps errors to exit status 2.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => ingest(&args),
        Command::Run(args) => {
            let config = pipeline_config(&args)?;
            let outcome = run_files(&args.train, &args.test, &config, &args.out)?;
            for w in &outcome.report.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", summary(&outcome.report));
            println!("outputs written to {}", args.out.display());
            Ok(())
        }
        Command::Compare(args) => compare(&args),
        Command::Replay(args) => replay(&args),
    }
}

fn ingest(args: &IngestArgs) -> Result<()> {
    let panel = panel::load_panel_csv(&args.panel)?;
    if panel.is_empty() {
        return Err(Error::Invalid(format!("{}: no rows", args.panel.display())));
    }
    let base = match args.contribution_base {
        Base::Province => ContributionBase::Province,
        Base::Region => ContributionBase::Region,
    };
    let rows = panel.feature_rows(base)?;
    let n = rows.len();
    features::save_feature_csv(&FeatureTable::from_rows(rows), &args.out)?;
    println!("wrote {n} feature rows to {}", args.out.display());
    Ok(())
}

pub fn pipeline_config(args: &RunArgs) -> Result<PipelineConfig> {
    let topology = match args.topology {
        TopologyArg::Hex => Topology::Hexagonal,
        TopologyArg::Rect => Topology::Rectangular,
    };
    let grid = GridSpec::new(args.grid.0, args.grid.1, topology)?;
    let som = SomConfig::new(grid).with_seed(args.seed).with_epochs(args.epochs);
    som.validate()?;
    Ok(PipelineConfig {
        som,
        normalize: args.normalize == Switch::On,
        swap_roles: args.swap_roles,
        ..PipelineConfig::default()
    })
}

pub struct RunOutcome {
    pub output: PipelineOutput,
    pub report: RunReport,
    pub manifest: RunManifest,
}

pub const OUTPUT_FILES: [&str; 7] = [
    "report.json",
    "som_model.json",
    "nb_model.json",
    "predictions.csv",
    "pseudo_labels.csv",
    "hitmap.txt",
    "hitmap.svg",
];

fn klassen_labels(table: &FeatureTable) -> Result<Vec<u32>> {
    Ok(klassen::classify_all(&table.rows)?
        .into_iter()
        .map(|q| u32::from(q.value()))
        .collect())
}

/// Runs the pipeline on two feature files and writes every output plus the
/// manifest into `out`.
pub fn run_files(train_path: &Path, test_path: &Path, config: &PipelineConfig, out: &Path) -> Result<RunOutcome> {
    let train_file = features::load_feature_csv(train_path)?;
    let test_file = features::load_feature_csv(test_path)?;
    let output = pipeline::run_pipeline(&train_file.rows, &test_file.rows, config)?;
    let (train, test) = if config.swap_roles {
        (&test_file, &train_file)
    } else {
        (&train_file, &test_file)
    };

    let mut comparisons = Vec::new();
    if !test.rows.is_empty() {
        let recomputed = klassen_labels(test)?;
        let mut headline = Comparison::new(
            "recomputed-klassen",
            "model",
            compare_with_klassen(&test.rows, &output.predictions)?,
        );
        if let Some(column) = &test.klassen {
            let differing = recomputed.iter().zip(column).filter(|(a, b)| a != b).count();
            if differing > 0 {
                headline.notes.push(format!(
                    "the test file's klassen column differs from the recomputed quadrants on {differing} of {} rows",
                    recomputed.len()
                ));
            }
            comparisons.push(headline);
            comparisons.push(Comparison::new(
                "klassen",
                "model",
                evaluate(column, &output.predictions)?,
            ));
        } else {
            comparisons.push(headline);
        }
        if let Some(column) = &test.model {
            comparisons.push(Comparison::new(
                "file-model",
                "model",
                evaluate(column, &output.predictions)?,
            ));
        }
    }
    let train_klassen = klassen_labels(train)?;
    comparisons.push(Comparison::new(
        "train-recomputed-klassen",
        "som-pseudo-label",
        evaluate(&train_klassen, &output.train_labels)?,
    ));

    let normalized_train = gdpsom_core::dataset::apply_normalizer(&output.som.normalization, &train.rows)?;
    let report = RunReport {
        schema: documents::RUN_REPORT_SCHEMA.into(),
        version: documents::DOCUMENT_VERSION,
        tool_version: crate::VERSION.into(),
        config: config.clone(),
        train_rows: train.rows.len(),
        test_rows: test.rows.len(),
        som_hits: output.hits.clone(),
        quantization_error: quantization_error(&output.som, &normalized_train)?,
        train_fidelity: output.train_fidelity.into(),
        comparisons,
        warnings: output.warnings.iter().map(ToString::to_string).collect(),
    };

    let predictions = FeatureTable {
        rows: test.rows.clone(),
        klassen: Some(klassen_labels(test)?),
        model: Some(output.predictions.clone()),
        annotations: vec!["klassen: recomputed quadrants; model: naive Bayes class".into()],
    };
    let pseudo = FeatureTable {
        rows: train.rows.clone(),
        klassen: Some(train_klassen),
        model: Some(output.train_labels.clone()),
        annotations: vec!["klassen: recomputed quadrants; model: SOM pseudo-label (unit + 1)".into()],
    };
    let contents = [
        documents::to_json(&report),
        documents::som_model_json(&output.som),
        documents::nb_model_json(&output.nb),
        features::feature_csv_string(&predictions)?,
        features::feature_csv_string(&pseudo)?,
        hitmap::text(&output.som, &output.hits),
        hitmap::svg(&output.som, &output.hits),
    ];

    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut outputs = Vec::with_capacity(contents.len());
    for (name, text) in OUTPUT_FILES.iter().zip(&contents) {
        documents::write_text(&out.join(name), text)?;
        outputs.push(OutputFile {
            file: (*name).into(),
            sha256: crate::sha256_hex(text.as_bytes()),
        });
    }
    let inputs = vec![
        InputFile {
            role: "train".into(),
            path: absolute(train_path),
            sha256: manifest::digest_file(train_path)?,
        },
        InputFile {
            role: "test".into(),
            path: absolute(test_path),
            sha256: manifest::digest_file(test_path)?,
        },
    ];
    let manifest = RunManifest::new(config, inputs, outputs);
    documents::write_text(&out.join(MANIFEST_FILE), &documents::to_json(&manifest))?;
    Ok(RunOutcome {
        output,
        report,
        manifest,
    })
}

/// Input paths are recorded absolute so a replay works from any directory.
fn absolute(path: &Path) -> String {
    fs::canonicalize(path)
        .unwrap_or_else(|_| path.to_path_buf())
        .display()
        .to_string()
}

fn summary(report: &RunReport) -> String {
    let mut s = format!(
        "trained on {} rows, tested on {} rows; SOM rows per class: {}\n",
        report.train_rows,
        report.test_rows,
        report
            .som_hits
            .iter()
            .enumerate()
            .map(|(u, n)| format!("{}={n}", u + 1))
            .collect::<Vec<_>>()
            .join(" ")
    );
    s.push_str(&format!(
        "naive Bayes vs SOM pseudo-labels on training rows: {}/{} = {}%\n",
        report.train_fidelity.num, report.train_fidelity.den, report.train_fidelity.percent
    ));
    for c in &report.comparisons {
        s.push_str(&c.render());
    }
    s
}

fn labeling(table: &FeatureTable, which: Labeling, path: &Path) -> Result<Vec<u32>> {
    match which {
        Labeling::Recomputed => klassen_labels(table),
        Labeling::Klassen | Labeling::Model => {
            let column = if which == Labeling::Klassen {
                LabelColumn::Klassen
            } else {
                LabelColumn::Model
            };
            table
                .labels(column)
                .map(<[u32]>::to_vec)
                .ok_or_else(|| Error::MissingColumn {
                    path: path.into(),
                    column: column.name().into(),
                })
        }
    }
}

fn compare(args: &CompareArgs) -> Result<()> {
    let table = features::load_feature_csv(&args.features)?;
    let left = labeling(&table, args.left, &args.features)?;
    let right = labeling(&table, args.right, &args.features)?;
    let mut comparison = Comparison::new(args.left.name(), args.right.name(), evaluate(&left, &right)?);

    if [args.left, args.right].contains(&Labeling::Klassen) {
        let recomputed = klassen_labels(&table)?;
        let column = table.klassen.as_deref().unwrap_or_default();
        let differing: Vec<String> = recomputed
            .iter()
            .zip(column)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| (i + 1).to_string())
            .collect();
        if !differing.is_empty() {
            comparison.notes.push(format!(
                "klassen column disagrees with quadrants recomputed from v1..v4 on {} rows: {}",
                differing.len(),
                differing.join(",")
            ));
            let other = if args.left == Labeling::Klassen { &right } else { &left };
            let recomputed_vs = pipeline::raw_agreement(&recomputed, other)?.ratio;
            comparison.notes.push(format!(
                "recomputed-klassen vs {}: {}/{} = {}%",
                if args.left == Labeling::Klassen {
                    args.right.name()
                } else {
                    args.left.name()
                },
                recomputed_vs.num,
                recomputed_vs.den,
                recomputed_vs.percent()
            ));
        }
    }

    print!("{}", comparison.render());
    if let Some(path) = &args.report {
        let report = CompareReport {
            schema: documents::COMPARE_REPORT_SCHEMA.into(),
            version: documents::DOCUMENT_VERSION,
            comparison,
        };
        documents::write_text(path, &documents::to_json(&report))?;
    }
    Ok(())
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let recorded = RunManifest::read(&args.manifest)?;
    if recorded.tool_version != crate::VERSION {
        eprintln!(
            "warning: manifest written by version {}, replaying with {}",
            recorded.tool_version,
            crate::VERSION
        );
    }
    let input = |role: &str| {
        recorded
            .input(role)
            .ok_or_else(|| Error::Invalid(format!("manifest has no `{role}` input")))
    };
    let (train, test) = (input("train")?, input("test")?);
    for file in [train, test] {
        let digest = manifest::digest_file(Path::new(&file.path))?;
        if digest != file.sha256 {
            return Err(Error::Invalid(format!(
                "input {} changed since the recorded run",
                file.path
            )));
        }
    }
    let outcome = run_files(
        Path::new(&train.path),
        Path::new(&test.path),
        &recorded.config,
        &args.out,
    )?;
    let mismatched: Vec<&str> = recorded
        .outputs
        .iter()
        .filter(|o| !outcome.manifest.outputs.contains(o))
        .map(|o| o.file.as_str())
        .collect();
    if !mismatched.is_empty() {
        return Err(Error::Invalid(format!("replay differs in: {}", mismatched.join(", "))));
    }
    println!("replay reproduced all {} outputs", recorded.outputs.len());
    Ok(())
}
