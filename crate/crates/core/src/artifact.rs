//! Versioned JSON documents and CSV tables.
//!
//! Every JSON file is an envelope `{schema_version, kind, meta, data}`; every
//! CSV table starts with `# key=value` metadata lines.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::category::{CategoryDump, FinCategory};
use crate::error::{invalid, Error, Result};
use crate::exactla::{Field, FieldDesc};
use crate::qcohom::{LesReport, LinearFunctor, QuillenTable, StableTable};
use crate::sset::FinSimplicialSet;
use crate::twisted::{TwAssCertificate, TwCategory, TwComCertificate};

pub const SCHEMA_VERSION: u32 = 1;

pub type Meta = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default)]
    pub meta: Meta,
    pub data: Value,
}

/// Something that can live in a [`Document`].
pub trait Artifact: Sized {
    const KIND: &'static str;

    fn to_data(&self) -> Result<Value>;

    fn from_data(data: &Value) -> Result<Self>;

    fn to_document(&self, meta: Meta) -> Result<Document> {
        Ok(Document { schema_version: SCHEMA_VERSION, kind: Self::KIND.to_string(), meta, data: self.to_data()? })
    }

    fn from_document(doc: &Document) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema { found: doc.schema_version, expected: SCHEMA_VERSION });
        }
        if doc.kind != Self::KIND {
            return invalid(format!("expected a {} document, found {}", Self::KIND, doc.kind));
        }
        Self::from_data(&doc.data)
    }
}

/// Pretty JSON with a trailing newline; key order is fixed, so equal inputs
/// give equal bytes.
pub fn render(doc: &Document) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

pub fn parse(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text)?;
    let found = value.get("schema_version").and_then(Value::as_u64);
    match found {
        None => invalid("document has no schema_version"),
        Some(v) if v != u64::from(SCHEMA_VERSION) => Err(Error::Schema { found: v as u32, expected: SCHEMA_VERSION }),
        Some(_) => Ok(serde_json::from_value(value)?),
    }
}

pub fn persist<A: Artifact>(artifact: &A, meta: Meta, path: &Path) -> Result<()> {
    fs::write(path, render(&artifact.to_document(meta)?)?)?;
    Ok(())
}

pub fn load<A: Artifact>(path: &Path) -> Result<A> {
    A::from_document(&parse(&fs::read_to_string(path)?)?)
}

impl Artifact for FinCategory {
    const KIND: &'static str = "category";

    fn to_data(&self) -> Result<Value> {
        Ok(serde_json::to_value(self.to_dump())?)
    }

    fn from_data(data: &Value) -> Result<Self> {
        FinCategory::from_dump(&serde_json::from_value::<CategoryDump>(data.clone())?)
    }
}

impl Artifact for FinSimplicialSet {
    const KIND: &'static str = "simplicial_set";

    fn to_data(&self) -> Result<Value> {
        Ok(self.to_json())
    }

    fn from_data(data: &Value) -> Result<Self> {
        FinSimplicialSet::from_json(data)
    }
}

/// A twisted arrow category as stored: its operation-level description and
/// the tabulated composition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwDump {
    pub operad: String,
    pub truncation: usize,
    pub structure: Value,
    pub category: CategoryDump,
}

impl TwDump {
    pub fn new(tw: &TwCategory) -> Result<Self> {
        Ok(TwDump {
            operad: tw.operad().name().to_string(),
            truncation: tw.truncation(),
            structure: tw.to_json(false)?,
            category: FinCategory::tabulate(tw, format!("Tw({})<={}", tw.operad().name(), tw.truncation())).to_dump(),
        })
    }

    pub fn category(&self) -> Result<FinCategory> {
        FinCategory::from_dump(&self.category)
    }
}

/// A linear functor together with its base category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredFunctor {
    pub field: FieldDesc,
    pub base: CategoryDump,
    pub functor: Value,
}

impl StoredFunctor {
    pub fn new<F: Field>(base: &FinCategory, functor: &LinearFunctor<F>) -> Self {
        StoredFunctor { field: functor.field().descriptor(), base: base.to_dump(), functor: functor.to_json() }
    }

    pub fn base(&self) -> Result<FinCategory> {
        FinCategory::from_dump(&self.base)
    }

    pub fn functor<F: Field>(&self, base: &FinCategory, field: &F) -> Result<LinearFunctor<F>> {
        if field.descriptor() != self.field {
            return Err(Error::FieldMismatch(format!("stored over {}, requested {}", self.field, field.descriptor())));
        }
        LinearFunctor::from_json(base, field, &self.functor)
    }
}

macro_rules! serde_artifact {
    ($($ty:ty => $kind:literal),* $(,)?) => {$(
        impl Artifact for $ty {
            const KIND: &'static str = $kind;

            fn to_data(&self) -> Result<Value> {
                Ok(serde_json::to_value(self)?)
            }

            fn from_data(data: &Value) -> Result<Self> {
                Ok(serde_json::from_value(data.clone())?)
            }
        }
    )*};
}

serde_artifact! {
    TwDump => "tw_category",
    StoredFunctor => "linear_functor",
    TwComCertificate => "tw_com_certificate",
    TwAssCertificate => "tw_ass_certificate",
    QuillenTable => "quillen_table",
    StableTable => "stable_table",
    LesReport => "les_report",
    Value => "report",
}

/// A CSV table with metadata lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub meta: Meta,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(meta: Meta, header: Vec<String>) -> Self {
        Table { meta, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# schema_version={SCHEMA_VERSION}\n");
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).map_err(csv_error)?;
        for row in &self.rows {
            writer.write_record(row).map_err(csv_error)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))?);
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut meta = Meta::new();
        let mut version = None;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let (k, v) = line[1..].trim().split_once('=').ok_or_else(|| Error::Invalid(format!("bad metadata line {line:?}")))?;
            if k == "schema_version" {
                version = Some(v.parse::<u32>().map_err(|e| Error::Invalid(e.to_string()))?);
            } else {
                meta.insert(k.to_string(), v.to_string());
            }
        }
        match version {
            Some(SCHEMA_VERSION) => {}
            Some(found) => return Err(Error::Schema { found, expected: SCHEMA_VERSION }),
            None => return invalid("table has no schema_version line"),
        }
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header = reader.headers().map_err(csv_error)?.iter().map(String::from).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(String::from).collect()).map_err(csv_error))
            .collect::<Result<_>>()?;
        Ok(Table { meta, header, rows })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

/// `values[k][j]` as a table with one row per degree and one column per
/// truncation.
pub fn degree_table(meta: Meta, degrees: &[i64], truncations: &[usize], values: &[Vec<usize>], stable: Option<&[bool]>) -> Table {
    let mut header = vec!["degree".to_string()];
    header.extend(truncations.iter().map(|n| format!("N={n}")));
    if stable.is_some() {
        header.push("stable".into());
    }
    let mut table = Table::new(meta, header);
    for (k, d) in degrees.iter().enumerate() {
        let mut row = vec![d.to_string()];
        row.extend(values[k].iter().map(|v| v.to_string()));
        if let Some(s) = stable {
            row.push(s[k].to_string());
        }
        table.push(row);
    }
    table
}

impl QuillenTable {
    pub fn to_table(&self, seed: Option<u64>) -> Table {
        let meta = table_meta(&self.field, &self.truncation.to_string(), &self.backend, seed);
        let degrees: Vec<i64> = self.degrees.iter().map(|d| d.0).collect();
        let values: Vec<Vec<usize>> = self.degrees.iter().map(|d| vec![d.1]).collect();
        let mut t = degree_table(meta, &degrees, &[self.truncation], &values, None);
        t.meta.insert("operad".into(), self.operad.clone());
        t
    }
}

impl StableTable {
    pub fn to_table(&self, seed: Option<u64>) -> Table {
        let truncs = self.truncations.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
        let meta = table_meta(&self.field, &truncs, &self.backend, seed);
        let degrees: Vec<i64> = (0..self.values.len() as i64).collect();
        degree_table(meta, &degrees, &self.truncations, &self.values, Some(&self.stable))
    }
}

/// The metadata every table carries.
pub fn table_meta(field: &str, truncation: &str, backend: &str, seed: Option<u64>) -> Meta {
    let mut meta = Meta::new();
    meta.insert("field".into(), field.to_string());
    meta.insert("truncation".into(), truncation.to_string());
    meta.insert("backend".into(), backend.to_string());
    meta.insert("seed".into(), seed.map_or("none".into(), |s| s.to_string()));
    meta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::pointed_op;
    use crate::collections::DiscreteOperad;
    use crate::exactla::PrimeField;
    use crate::qcohom::gamma_t;
    use crate::twisted::tw_category;

    fn roundtrip<A: Artifact>(a: &A) -> A {
        let text = render(&a.to_document(Meta::new()).unwrap()).unwrap();
        A::from_document(&parse(&text).unwrap()).unwrap()
    }

    #[test]
    fn tw_com_dump_roundtrips() {
        let tw = tw_category(&DiscreteOperad::com(4), 3).unwrap();
        let dump = TwDump::new(&tw).unwrap();
        let back = roundtrip(&dump);
        assert_eq!(back, dump);
        assert_eq!(back.category().unwrap(), FinCategory::tabulate(&tw, "Tw(com)<=3"));
    }

    #[test]
    fn functor_roundtrips() {
        let p = PrimeField::new(101).unwrap();
        let base = pointed_op(2);
        let t = gamma_t(&base, &p).unwrap();
        let back = roundtrip(&StoredFunctor::new(&base, &t));
        let base2 = back.base().unwrap();
        assert_eq!(base2, base);
        assert_eq!(back.functor(&base2, &p).unwrap(), t);
    }

    #[test]
    fn empty_category_roundtrips() {
        let empty = FinCategory::from_dump(&CategoryDump {
            name: "empty".into(),
            objects: vec![],
            homs: vec![],
            identities: vec![],
            compose: vec![],
        })
        .unwrap();
        assert_eq!(roundtrip(&empty), empty);
    }

    #[test]
    fn schema_mismatch_is_versioned() {
        let text = r#"{"schema_version": 99, "kind": "category", "data": {}}"#;
        assert!(matches!(parse(text), Err(Error::Schema { found: 99, expected: SCHEMA_VERSION })));
        let doc = Document { schema_version: SCHEMA_VERSION, kind: "simplicial_set".into(), meta: Meta::new(), data: Value::Null };
        assert!(FinCategory::from_document(&doc).is_err());
    }

    #[test]
    fn tables_roundtrip() {
        let mut t = Table::new(table_meta("fp:101", "3", "cover", Some(7)), vec!["degree".into(), "N=3".into()]);
        t.push(vec!["0".into(), "1".into()]);
        t.push(vec!["1".into(), "0".into()]);
        let text = t.to_csv().unwrap();
        assert!(text.starts_with("# schema_version=1\n# backend=cover\n"));
        assert_eq!(Table::from_csv(&text).unwrap(), t);
        assert!(matches!(Table::from_csv("# schema_version=2\na\n"), Err(Error::Schema { found: 2, .. })));
    }
}
