//! Versioned JSON documents for models and reports.
//!
//! Every document carries a `schema` name and a `version`. Floats are written
//! in their shortest round-trip form and parsed back exactly.

use std::fs;
use std::path::Path;

use gdpsom_core::bayes::NbModel;
use gdpsom_core::pipeline::{ConfusionMatrix, EvaluationReport, PipelineConfig, Ratio};
use gdpsom_core::som::SomModel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SOM_MODEL_SCHEMA: &str = "gdpsom.som-model";
pub const NB_MODEL_SCHEMA: &str = "gdpsom.nb-model";
pub const RUN_REPORT_SCHEMA: &str = "gdpsom.run-report";
pub const COMPARE_REPORT_SCHEMA: &str = "gdpsom.compare-report";
pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument<T> {
    schema: String,
    version: u32,
    model: T,
}

#[derive(Deserialize)]
struct Header {
    schema: String,
    version: u32,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_document<T: DeserializeOwned>(path: &Path, schema: &'static str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let json = |source| Error::Json {
        path: path.into(),
        source,
    };
    let header: Header = serde_json::from_str(&text).map_err(json)?;
    if header.schema != schema || header.version != DOCUMENT_VERSION {
        return Err(Error::Schema {
            path: path.into(),
            expected: schema,
            version: DOCUMENT_VERSION,
            found: header.schema,
            found_version: header.version,
        });
    }
    serde_json::from_str(&text).map_err(json)
}

pub fn som_model_json(model: &SomModel) -> String {
    to_json(&ModelDocument {
        schema: SOM_MODEL_SCHEMA.into(),
        version: DOCUMENT_VERSION,
        model,
    })
}

pub fn nb_model_json(model: &NbModel) -> String {
    to_json(&ModelDocument {
        schema: NB_MODEL_SCHEMA.into(),
        version: DOCUMENT_VERSION,
        model,
    })
}

pub fn read_som_model(path: &Path) -> Result<SomModel> {
    let doc: ModelDocument<SomModel> = read_document(path, SOM_MODEL_SCHEMA)?;
    doc.model.validate()?;
    Ok(doc.model)
}

pub fn read_nb_model(path: &Path) -> Result<NbModel> {
    let doc: ModelDocument<NbModel> = read_document(path, NB_MODEL_SCHEMA)?;
    doc.model.validate()?;
    Ok(doc.model)
}

/// An exact fraction with its float and two-decimal percentage renderings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
    pub value: f64,
    pub percent: String,
}

impl From<Ratio> for Fraction {
    fn from(r: Ratio) -> Self {
        Fraction {
            num: r.num,
            den: r.den,
            value: r.to_f64(),
            percent: r.percent(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelMap {
    pub predicted: u32,
    pub reference: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelCount {
    pub label: u32,
    pub count: u64,
}

/// One labeling compared against another.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Name of the reference labeling (rows of the confusion matrix).
    pub reference: String,
    /// Name of the compared labeling (columns).
    pub predicted: String,
    pub rows: usize,
    pub raw: Fraction,
    /// 1-based.
    pub matching_rows: Vec<usize>,
    pub aligned: Fraction,
    pub mapping: Vec<LabelMap>,
    pub confusion: ConfusionMatrix,
    pub reference_counts: Vec<LabelCount>,
    pub predicted_counts: Vec<LabelCount>,
    pub unused_reference_labels: Vec<u32>,
    pub unused_predicted_labels: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Comparison {
    pub fn new(reference: &str, predicted: &str, report: EvaluationReport) -> Self {
        let counts = |c: Vec<(u32, u64)>| {
            c.into_iter()
                .map(|(label, count)| LabelCount { label, count })
                .collect()
        };
        Comparison {
            reference: reference.into(),
            predicted: predicted.into(),
            rows: report.rows,
            raw: report.raw.into(),
            matching_rows: report.matching_rows,
            aligned: report.aligned.into(),
            mapping: report
                .mapping
                .into_iter()
                .map(|(predicted, reference)| LabelMap { predicted, reference })
                .collect(),
            confusion: report.confusion,
            reference_counts: counts(report.reference_counts),
            predicted_counts: counts(report.predicted_counts),
            unused_reference_labels: report.unused_reference_labels,
            unused_predicted_labels: report.unused_predicted_labels,
            notes: Vec::new(),
        }
    }

    /// Plain-text rendering for the terminal.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "{} vs {} ({} rows)", self.reference, self.predicted, self.rows);
        let _ = writeln!(
            s,
            "  raw agreement:     {}/{} = {}%",
            self.raw.num, self.raw.den, self.raw.percent
        );
        let rows: Vec<String> = self.matching_rows.iter().map(ToString::to_string).collect();
        let _ = writeln!(
            s,
            "  matching rows:     {}",
            if rows.is_empty() { "-".into() } else { rows.join(",") }
        );
        let _ = writeln!(
            s,
            "  aligned agreement: {}/{} = {}%",
            self.aligned.num, self.aligned.den, self.aligned.percent
        );
        let map: Vec<String> = self
            .mapping
            .iter()
            .map(|m| format!("{}->{}", m.predicted, m.reference))
            .collect();
        let _ = writeln!(s, "  best relabeling:   {}", map.join(" "));
        let _ = writeln!(s, "  confusion (rows {}, columns {}):", self.reference, self.predicted);
        let _ = write!(s, "      ");
        for l in &self.confusion.labels {
            let _ = write!(s, "{l:>5}");
        }
        let _ = writeln!(s);
        for (l, row) in self.confusion.labels.iter().zip(&self.confusion.counts) {
            let _ = write!(s, "  {l:>3} ");
            for c in row {
                let _ = write!(s, "{c:>5}");
            }
            let _ = writeln!(s);
        }
        if !self.unused_reference_labels.is_empty() {
            let _ = writeln!(
                s,
                "  unused {} labels: {:?}",
                self.reference, self.unused_reference_labels
            );
        }
        if !self.unused_predicted_labels.is_empty() {
            let _ = writeln!(
                s,
                "  unused {} labels: {:?}",
                self.predicted, self.unused_predicted_labels
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub version: u32,
    pub tool_version: String,
    pub config: PipelineConfig,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Training rows per SOM unit; unit `u` is class `u + 1`.
    pub som_hits: Vec<usize>,
    pub quantization_error: f64,
    /// Classifier re-predicting its own training pseudo-labels.
    pub train_fidelity: Fraction,
    pub comparisons: Vec<Comparison>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: String,
    pub version: u32,
    pub comparison: Comparison,
}

pub fn read_run_report(path: &Path) -> Result<RunReport> {
    read_document(path, RUN_REPORT_SCHEMA)
}

pub fn read_compare_report(path: &Path) -> Result<CompareReport> {
    read_document(path, COMPARE_REPORT_SCHEMA)
}
