//! Labeled CSV streams and their key=value schema files.
//!
//! A schema file declares, one per line, `column=numeric`,
//! `column=nominal:a|b|c` or (class column only) `column=binary:negative`,
//! which maps the `negative` label to class 0 and every other label to
//! class 1. Blank lines and `#` comments are ignored. Only declared columns
//! are read, in declaration order, so the schema doubles as a column
//! selection.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::instance_base::{ClassId, Instance};
use crate::streams::schema::{AttrValue, Attribute, AttributeKind, StreamSchema};
use crate::streams::InstanceStream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Numeric,
    Nominal(Vec<String>),
    /// Binary class collapse: this label → 0, anything else → 1.
    Binary(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    columns: Vec<(String, ColumnSpec)>,
}

impl CsvSchema {
    pub fn new(columns: Vec<(String, ColumnSpec)>) -> Self {
        CsvSchema { columns }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut columns: Vec<(String, ColumnSpec)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: i + 1, message };
            let (name, spec) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got {line:?}")))?;
            let name = name.trim();
            let spec = spec.trim();
            if name.is_empty() {
                return Err(parse_err("empty column name".into()));
            }
            if columns.iter().any(|(n, _)| n == name) {
                return Err(parse_err(format!("column {name:?} declared twice")));
            }
            let spec = if spec == "numeric" {
                ColumnSpec::Numeric
            } else if let Some(cats) = spec.strip_prefix("nominal:") {
                let cats: Vec<String> = cats.split('|').map(|c| c.trim().to_string()).collect();
                if cats.iter().any(String::is_empty) {
                    return Err(parse_err(format!("empty category in {spec:?}")));
                }
                ColumnSpec::Nominal(cats)
            } else if let Some(neg) = spec.strip_prefix("binary:") {
                ColumnSpec::Binary(neg.trim().to_string())
            } else {
                return Err(parse_err(format!("unknown column type {spec:?}")));
            };
            columns.push((name.to_string(), spec));
        }
        if columns.is_empty() {
            return Err(Error::Schema("schema declares no columns".into()));
        }
        Ok(CsvSchema { columns })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
    }

    pub fn columns(&self) -> &[(String, ColumnSpec)] {
        &self.columns
    }
}

#[derive(Debug, Clone)]
enum ClassMapping {
    Nominal(Vec<String>),
    Binary(String),
}

impl ClassMapping {
    fn label(&self, value: &str) -> Option<ClassId> {
        match self {
            ClassMapping::Nominal(cats) => cats.iter().position(|c| c == value),
            ClassMapping::Binary(neg) => Some(usize::from(value != neg)),
        }
    }
}

/// Finite stream over a labeled CSV file, read lazily in file order.
pub struct CsvStream {
    path: PathBuf,
    schema: StreamSchema,
    reader: csv::Reader<BufReader<File>>,
    /// CSV column index of each schema attribute.
    attribute_columns: Vec<usize>,
    class_column: usize,
    class_mapping: ClassMapping,
    header_len: usize,
    record: csv::StringRecord,
    emitted: u64,
}

impl std::fmt::Debug for CsvStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CsvStream")
            .field("path", &self.path)
            .field("emitted", &self.emitted)
            .finish_non_exhaustive()
    }
}

/// Opens `path` as a labeled stream. The class is read from `class_column`
/// (a header name) or, when `None`, the last column.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema, class_column: Option<&str>) -> Result<CsvStream> {
    let path = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if header.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "missing header".into(),
        });
    }
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("column {name:?} not found in {}", path.display())))
    };
    let class_name = class_column
        .map(str::to_string)
        .unwrap_or_else(|| header[header.len() - 1].to_string());
    let class_idx = find(&class_name)?;

    let mut attributes = Vec::new();
    let mut attribute_columns = Vec::new();
    let mut class_mapping = None;
    for (name, spec) in schema.columns() {
        if *name == class_name {
            class_mapping = Some(match spec {
                ColumnSpec::Nominal(cats) => ClassMapping::Nominal(cats.clone()),
                ColumnSpec::Binary(neg) => ClassMapping::Binary(neg.clone()),
                ColumnSpec::Numeric => {
                    return Err(Error::Schema(format!(
                        "class column {name:?} must be nominal or binary"
                    )))
                }
            });
            continue;
        }
        attributes.push(match spec {
            ColumnSpec::Numeric => Attribute::numeric(name.clone()),
            ColumnSpec::Nominal(cats) => Attribute::nominal(name.clone(), cats.iter().cloned()),
            ColumnSpec::Binary(_) => {
                return Err(Error::Schema(format!(
                    "binary type is only valid for the class column ({name:?})"
                )))
            }
        });
        attribute_columns.push(find(name)?);
    }
    let class_mapping = class_mapping
        .ok_or_else(|| Error::Schema(format!("schema does not declare the class column {class_name:?}")))?;
    let class_names: Vec<String> = match &class_mapping {
        ClassMapping::Nominal(cats) => cats.clone(),
        ClassMapping::Binary(neg) => vec![neg.clone(), format!("not-{neg}")],
    };
    let schema = StreamSchema::new(attributes, class_names)?;
    Ok(CsvStream {
        header_len: header.len(),
        path,
        schema,
        reader,
        attribute_columns,
        class_column: class_idx,
        class_mapping,
        record: csv::StringRecord::new(),
        emitted: 0,
    })
}

impl CsvStream {
    pub fn path(&self) -> &Path {
        &self.path
    }

    fn parse_record(&self, line: usize) -> Result<Instance> {
        let err = |message: String| Error::Parse { line, message };
        if self.record.len() != self.header_len {
            return Err(err(format!(
                "expected {} fields, found {}",
                self.header_len,
                self.record.len()
            )));
        }
        let mut raw = Vec::with_capacity(self.attribute_columns.len());
        for (attr, &col) in self.schema.attributes().iter().zip(&self.attribute_columns) {
            let token = &self.record[col];
            raw.push(match &attr.kind {
                AttributeKind::Numeric => {
                    let v: f64 = token
                        .parse()
                        .map_err(|_| err(format!("column {:?}: {token:?} is not a number", attr.name)))?;
                    if !v.is_finite() {
                        return Err(err(format!("column {:?}: non-finite value {token:?}", attr.name)));
                    }
                    AttrValue::Numeric(v)
                }
                AttributeKind::Nominal(_) => AttrValue::Nominal(
                    attr.category_index(token)
                        .ok_or_else(|| err(format!("column {:?}: unknown category {token:?}", attr.name)))?,
                ),
            });
        }
        let class_token = &self.record[self.class_column];
        let label = self
            .class_mapping
            .label(class_token)
            .ok_or_else(|| err(format!("unknown class {class_token:?}")))?;
        let encoded = self.schema.encode(&raw).map_err(|e| err(e.to_string()))?;
        Ok(Instance {
            raw_attributes: raw,
            encoded,
            label,
            arrival_index: self.emitted + 1,
        })
    }

    /// Reads every remaining instance, stopping at the first error.
    pub fn collect_all(mut self) -> Result<Vec<Instance>> {
        let mut out = Vec::new();
        while let Some(inst) = InstanceStream::next_instance(&mut self) {
            out.push(inst?);
        }
        Ok(out)
    }
}

impl InstanceStream for CsvStream {
    fn schema(&self) -> &StreamSchema {
        &self.schema
    }

    fn next_instance(&mut self) -> Option<Result<Instance>> {
        let mut record = std::mem::take(&mut self.record);
        let read = self.reader.read_record(&mut record);
        self.record = record;
        match read {
            Ok(false) => None,
            Err(e) => {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                Some(Err(Error::Parse {
                    line,
                    message: e.to_string(),
                }))
            }
            Ok(true) => {
                let line = self.record.position().map(|p| p.line() as usize).unwrap_or(0);
                let parsed = self.parse_record(line);
                if parsed.is_ok() {
                    self.emitted += 1;
                }
                Some(parsed)
            }
        }
    }
}
