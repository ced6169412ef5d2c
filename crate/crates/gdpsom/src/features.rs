//! Feature CSV: `region_id,sector,v1,v2,v3,v4[,klassen[,model]]`.
//!
//! Lines starting with `#` are annotations. An annotation of the form
//! `# key: a b c` can be read back with [`FeatureTable::annotation_list`].

use std::fs;
use std::io::Write;
use std::path::Path;

use gdpsom_core::dataset::FeatureRow;

use crate::{Error, Result};

const VALUE_COLUMNS: [&str; 4] = ["v1", "v2", "v3", "v4"];

/// Label columns a feature table may carry.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    Klassen,
    Model,
}

impl LabelColumn {
    pub fn name(self) -> &'static str {
        match self {
            LabelColumn::Klassen => "klassen",
            LabelColumn::Model => "model",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<FeatureRow>,
    pub klassen: Option<Vec<u32>>,
    pub model: Option<Vec<u32>>,
    /// Annotation lines without the leading `#`, trimmed.
    pub annotations: Vec<String>,
}

impl FeatureTable {
    pub fn from_rows(rows: Vec<FeatureRow>) -> Self {
        FeatureTable {
            rows,
            ..Default::default()
        }
    }

    pub fn labels(&self, column: LabelColumn) -> Option<&[u32]> {
        match column {
            LabelColumn::Klassen => self.klassen.as_deref(),
            LabelColumn::Model => self.model.as_deref(),
        }
    }

    /// Values of an annotation `# key: v1 v2 ...` (commas or spaces).
    pub fn annotation_list(&self, key: &str) -> Option<Vec<usize>> {
        self.annotations.iter().find_map(|a| {
            let rest = a.strip_prefix(key)?.trim_start().strip_prefix(':')?;
            rest.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().ok())
                .collect()
        })
    }
}

fn parse_label(field: &str) -> Option<u32> {
    field.trim().parse::<u32>().ok().filter(|l| (1..=4).contains(l))
}

fn opt_text(field: &str) -> Option<String> {
    let t = field.trim();
    (!t.is_empty()).then(|| t.to_string())
}

/// Reads a feature CSV. A header row is required; a header-only file yields
/// an empty table.
pub fn load_feature_csv(path: &Path) -> Result<FeatureTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_feature_csv(&text, path)
}

pub fn parse_feature_csv(text: &str, path: &Path) -> Result<FeatureTable> {
    let annotations = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.into(),
            source,
        })?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let mut value_idx = [0usize; 4];
    for (slot, name) in value_idx.iter_mut().zip(VALUE_COLUMNS) {
        *slot = find(name).ok_or_else(|| Error::MissingColumn {
            path: path.into(),
            column: name.into(),
        })?;
    }
    let region_idx = find("region_id");
    let sector_idx = find("sector");
    let klassen_idx = find("klassen");
    let model_idx = find("model");

    let mut table = FeatureTable {
        annotations,
        klassen: klassen_idx.map(|_| Vec::new()),
        model: model_idx.map(|_| Vec::new()),
        ..Default::default()
    };
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.into(),
            source,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let malformed = |reason: String| Error::MalformedRow {
            path: path.into(),
            line,
            reason,
        };
        if record.len() != headers.len() {
            return Err(malformed(format!(
                "expected {} fields, found {}",
                headers.len(),
                record.len()
            )));
        }
        let mut values = [0.0; 4];
        for (v, (&idx, name)) in values.iter_mut().zip(value_idx.iter().zip(VALUE_COLUMNS)) {
            let field = &record[idx];
            *v = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| malformed(format!("column {name}: `{field}` is not a finite number")))?;
        }
        let mut row = FeatureRow::new(values[0], values[1], values[2], values[3]);
        row.region_id = region_idx.and_then(|i| opt_text(&record[i]));
        row.sector = sector_idx.and_then(|i| opt_text(&record[i]));
        for (idx, column, name) in [
            (klassen_idx, &mut table.klassen, "klassen"),
            (model_idx, &mut table.model, "model"),
        ] {
            if let (Some(i), Some(labels)) = (idx, column.as_mut()) {
                let label = parse_label(&record[i])
                    .ok_or_else(|| malformed(format!("column {name}: `{}` is not a label in 1..4", &record[i])))?;
                labels.push(label);
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

/// Serializes a table. Floats use the shortest representation that parses
/// back to the same value.
pub fn feature_csv_string(table: &FeatureTable) -> Result<String> {
    let mut out = Vec::new();
    for a in &table.annotations {
        writeln!(out, "# {a}").expect("writing to memory");
    }
    {
        let mut writer = csv::Writer::from_writer(&mut out);
        let mut header = vec!["region_id", "sector", "v1", "v2", "v3", "v4"];
        for (present, name) in [(table.klassen.is_some(), "klassen"), (table.model.is_some(), "model")] {
            if present {
                header.push(name);
            }
        }
        let to_err = |e: csv::Error| Error::Invalid(e.to_string());
        writer.write_record(&header).map_err(to_err)?;
        for (i, row) in table.rows.iter().enumerate() {
            let mut rec = vec![
                row.region_id.clone().unwrap_or_default(),
                row.sector.clone().unwrap_or_default(),
            ];
            rec.extend(row.values.iter().map(|v| v.to_string()));
            for labels in [&table.klassen, &table.model].into_iter().flatten() {
                let label = labels
                    .get(i)
                    .ok_or_else(|| Error::Invalid(format!("label column shorter than rows ({i})")))?;
                rec.push(label.to_string());
            }
            writer.write_record(&rec).map_err(to_err)?;
        }
        writer.flush().map_err(|e| Error::Invalid(e.to_string()))?;
    }
    Ok(String::from_utf8(out).expect("csv output is utf-8"))
}

pub fn save_feature_csv(table: &FeatureTable, path: &Path) -> Result<()> {
    let text = feature_csv_string(table)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
