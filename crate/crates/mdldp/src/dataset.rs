//! CSV ingestion and the schema file that selects categorical columns.

use std::io::{Read, Write};
use std::path::Path;

use mdldp_core::data::Dataset;
use mdldp_core::multidim::MultiDomain;
use mdldp_core::AttributeDomain;
use serde::Deserialize;

use crate::error::{HarnessError, Result};

/// Which CSV columns to load, in order, and an optional identity column.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schema {
    pub columns: Vec<String>,
    #[serde(default)]
    pub identity: Option<String>,
}

impl Schema {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Schema { columns: columns.into_iter().map(Into::into).collect(), identity: None }
    }

    /// Reads a TOML schema file (`columns = [...]`, optional `identity`).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        toml::from_str(&text).map_err(|e| HarnessError::Data { path: path.into(), message: e.to_string() })
    }
}

pub fn load_dataset(path: &Path, schema: &Schema) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_dataset(file, schema, path)
}

/// Parses CSV text with a header row. Value dictionaries are built in order
/// of first appearance, so the same file always yields the same indices.
pub fn read_dataset<R: Read>(reader: R, schema: &Schema, origin: &Path) -> Result<Dataset> {
    let fail = |message: String| HarnessError::Data { path: origin.into(), message };
    if schema.columns.is_empty() {
        return Err(fail("schema lists no columns".into()));
    }
    let mut csv = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = csv.headers()?.clone();
    let position = |name: &str| {
        header.iter().position(|h| h.trim() == name).ok_or_else(|| fail(format!("column `{name}` not found in header")))
    };
    let picks = schema.columns.iter().map(|c| position(c)).collect::<Result<Vec<_>>>()?;
    let id_col = schema.identity.as_deref().map(position).transpose()?;

    let mut domains: Vec<Vec<String>> = vec![Vec::new(); picks.len()];
    let mut lookup: Vec<std::collections::HashMap<String, usize>> = vec![Default::default(); picks.len()];
    let mut cells = Vec::new();
    let mut identities = Vec::new();
    for record in csv.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(fail(format!("line {line}: expected {} fields, found {}", header.len(), record.len())));
        }
        for (j, &c) in picks.iter().enumerate() {
            let label = record[c].trim();
            if label.is_empty() {
                return Err(fail(format!("line {line}: empty value in column `{}`", schema.columns[j])));
            }
            let next = domains[j].len();
            let idx = *lookup[j].entry(label.to_string()).or_insert_with(|| {
                domains[j].push(label.to_string());
                next
            });
            cells.push(idx);
        }
        if let Some(c) = id_col {
            identities.push(record[c].trim().to_string());
        }
    }
    if cells.is_empty() {
        return Err(fail("no data rows".into()));
    }
    let attrs = schema
        .columns
        .iter()
        .zip(domains)
        .map(|(name, values)| AttributeDomain::new(name.clone(), values))
        .collect::<mdldp_core::Result<Vec<_>>>()
        .and_then(MultiDomain::new)
        .map_err(|e| fail(e.to_string()))?;
    let dataset = Dataset::new(attrs, cells).map_err(|e| fail(e.to_string()))?;
    match id_col {
        Some(_) => dataset.with_identities(identities).map_err(|e| fail(e.to_string())),
        None => Ok(dataset),
    }
}

/// Writes the dataset back as labelled CSV (identity column first when present).
pub fn write_dataset<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    let domains = dataset.domain().domains();
    let has_ids = dataset.identities().is_some();
    let mut header: Vec<&str> = Vec::new();
    if has_ids {
        header.push("id");
    }
    header.extend(domains.iter().map(AttributeDomain::name));
    out.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for (i, row) in dataset.rows().enumerate() {
        record.clear();
        if has_ids {
            record.push(dataset.identity(i));
        }
        record.extend(row.iter().zip(domains).map(|(&v, dom)| dom.label(v).unwrap_or_default().to_string()));
        out.write_record(&record)?;
    }
    out.flush().map_err(|e| HarnessError::io("<csv output>", e))?;
    Ok(())
}

/// `n=…, d=…, k=[…]` line for logs.
pub fn summary(dataset: &Dataset) -> String {
    format!("n={}, d={}, k={:?}", dataset.n(), dataset.d(), dataset.domain().ks())
}
