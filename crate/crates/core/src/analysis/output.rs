//! JSON and CSV documents. Every floating-point number is written with 17
//! significant digits so that parsing reproduces the exact `f64`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::window::WindowKind;

pub const FORMAT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub kind: WindowKind,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub seed: Option<u64>,
    pub route: Option<String>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Meta {
    pub fn new(seed: Option<u64>, route: Option<String>) -> Self {
        Self {
            version: FORMAT_VERSION.to_string(),
            seed,
            route,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn with_tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }
}

/// Top-level output object: `{spec, window, rows, meta}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub spec: Option<KernelSpec>,
    pub window: Option<WindowInfo>,
    pub rows: Vec<R>,
    pub meta: Meta,
}

/// Pretty JSON formatter writing `f64` as `d.dddddddddddddddde±x`.
struct SignificantDigits<'a> {
    inner: PrettyFormatter<'a>,
}

fn write_sig<W: ?Sized + Write>(writer: &mut W, value: f64) -> io::Result<()> {
    write!(writer, "{}", format_f64(value))
}

/// `value` with 17 significant digits; non-finite values become `NaN`,
/// `inf` or `-inf`.
pub fn format_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        value.to_string()
    }
}

impl Formatter for SignificantDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write_sig(writer, value)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write_sig(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Pretty-printed JSON with 17 significant digits; NaN and infinities are
/// written as `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let formatter = SignificantDigits {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn from_json_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))
}

fn csv_cell(value: &Value) -> Result<String> {
    Ok(match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (None, Some(i), _) => i.to_string(),
            (None, None, Some(f)) => format_f64(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(csv_cell)
            .collect::<Result<Vec<_>>>()?
            .join(";"),
        Value::Object(_) => {
            return Err(Error::Serialization(
                "nested objects cannot be written as CSV cells".into(),
            ))
        }
    })
}

/// CSV with a header line taken from the row field names.
pub fn write_csv<R: Serialize, W: Write>(rows: &[R], writer: W) -> Result<()> {
    let err = |e: csv::Error| Error::Serialization(e.to_string());
    let mut out = csv::Writer::from_writer(writer);
    let mut header: Option<Vec<String>> = None;
    for row in rows {
        let value = serde_json::to_value(row).map_err(|e| Error::Serialization(e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(Error::Serialization(
                "CSV rows must serialize to objects".into(),
            ));
        };
        let keys: Vec<String> = map.keys().cloned().collect();
        match &header {
            None => {
                out.write_record(&keys).map_err(err)?;
                header = Some(keys);
            }
            Some(h) if *h != keys => {
                return Err(Error::Serialization(
                    "CSV rows have differing fields".into(),
                ))
            }
            Some(_) => {}
        }
        let cells = map.values().map(csv_cell).collect::<Result<Vec<_>>>()?;
        out.write_record(&cells).map_err(err)?;
    }
    out.flush().map_err(|e| Error::Serialization(e.to_string()))
}

pub fn to_csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{SweepRoute, SweepRow};
    use proptest::prelude::*;

    fn row(radius: f64, mean: f64, variance: f64, se: Option<f64>) -> SweepRow {
        SweepRow {
            radius,
            mean,
            variance,
            ratio: variance / mean,
            scaled_ratio: radius * variance / mean,
            mean_se: se,
            variance_se: se,
        }
    }

    fn document(rows: Vec<SweepRow>) -> Document<SweepRow> {
        Document {
            spec: Some(KernelSpec::new(2, vec![0, 1]).unwrap()),
            window: Some(WindowInfo {
                kind: WindowKind::Polydisk,
                dimension: 2,
            }),
            rows,
            meta: Meta::new(Some(7), Some(SweepRoute::Spectrum.to_string()))
                .with_tolerance("tail_tol", 1e-9),
        }
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(format_f64(-2.5e10), "-2.5000000000000000e10");
        let json = to_json_string(&document(vec![row(1.0, 1.0, 0.5, None)])).unwrap();
        assert!(json.contains("\"radius\": 1.0000000000000000e0"));
        assert!(json.contains("\"mean_se\": null"));
        assert!(json.contains("\"seed\": 7"));
    }

    #[test]
    fn non_finite_values_become_null() {
        let json = to_json_string(&vec![f64::NAN, f64::INFINITY, 1.5]).unwrap();
        let back: Vec<Option<f64>> = from_json_str(&json).unwrap();
        assert_eq!(back, vec![None, None, Some(1.5)]);
    }

    #[test]
    fn document_layout() {
        let json = to_json_string(&document(vec![])).unwrap();
        let value: Value = serde_json::from_str(&json).unwrap();
        for key in ["spec", "window", "rows", "meta"] {
            assert!(value.get(key).is_some(), "{key}");
        }
        assert_eq!(value["meta"]["version"], FORMAT_VERSION);
        assert_eq!(value["spec"]["level"], serde_json::json!([0, 1]));
        assert_eq!(value["window"]["kind"], "polydisk");
    }

    #[test]
    fn csv_has_header_and_mirrors_rows() {
        let rows = vec![row(1.0, 1.0, 0.5, None), row(2.0, 4.0, 1.0, Some(0.25))];
        let text = to_csv_string(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "radius,mean,variance,ratio,scaled_ratio,mean_se,variance_se"
        );
        let second: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
        assert_eq!(second[0], "2.0000000000000000e0");
        assert_eq!(second[5], "2.5000000000000000e-1");
        let first = text.lines().nth(1).unwrap();
        assert!(first.ends_with(",,"));
        let parsed: f64 = second[3].parse().unwrap();
        assert_eq!(parsed, rows[1].ratio);
        assert_eq!(to_csv_string::<SweepRow>(&[]).unwrap(), "");
    }

    proptest! {
        #[test]
        fn json_round_trip(
            values in prop::collection::vec((1e-3f64..1e3, 1e-300f64..1e300, 0.0f64..1.0, prop::option::of(0.0f64..10.0)), 0..8)
        ) {
            let rows: Vec<SweepRow> = values.iter().map(|&(r, m, frac, se)| row(r, m, m * frac, se)).collect();
            let doc = document(rows);
            let back: Document<SweepRow> = from_json_str(&to_json_string(&doc).unwrap()).unwrap();
            prop_assert_eq!(back, doc);
        }
    }
}
