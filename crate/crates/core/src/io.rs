//! JSON algebra files and report emission.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::{Algebra, AnyMetrized, MetrizedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::BilinearForm;
use crate::scalar::{format_rational, parse_rational, NumericMode, Rat, Scalar};

/// Contents of an algebra file: a presentation and an optional metric.
#[derive(Debug, Clone)]
pub enum Loaded {
    Rational { algebra: Algebra<Rat>, metric: Option<BilinearForm<Rat>>, meta: Map<String, Value> },
    Float { algebra: Algebra<f64>, metric: Option<BilinearForm<f64>>, meta: Map<String, Value> },
}

impl Loaded {
    pub fn dim(&self) -> usize {
        match self {
            Loaded::Rational { algebra, .. } => algebra.dim(),
            Loaded::Float { algebra, .. } => algebra.dim(),
        }
    }

    pub fn meta(&self) -> &Map<String, Value> {
        match self {
            Loaded::Rational { meta, .. } | Loaded::Float { meta, .. } => meta,
        }
    }

    /// Pairs the presentation with its metric. Invariance is recorded, not required.
    pub fn metrized(&self) -> Result<AnyMetrized> {
        let missing = || Error::Parse { path: "metric".into(), msg: "a metric is required here".into() };
        match self {
            Loaded::Rational { algebra, metric, .. } => {
                let h = metric.clone().ok_or_else(missing)?;
                Ok(AnyMetrized::Rational(MetrizedAlgebra::with_form(algebra.clone(), h)?))
            }
            Loaded::Float { algebra, metric, .. } => {
                let h = metric.clone().ok_or_else(missing)?;
                Ok(AnyMetrized::Float(MetrizedAlgebra::with_form(algebra.clone(), h)?))
            }
        }
    }
}

fn perr(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.into(), msg: msg.into() }
}

trait FileScalar: Scalar {
    fn encode(&self) -> Value;
    fn decode(v: &Value, path: &str) -> Result<Self>;
}

impl FileScalar for Rat {
    fn encode(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn decode(v: &Value, path: &str) -> Result<Self> {
        match v {
            Value::String(s) => {
                let r = parse_rational(s).ok_or_else(|| perr(path, format!("not a rational: {s:?}")))?;
                // only canonical p/q forms are accepted, so the round trip is the identity
                if s.contains('/') && format_rational(&r) != s.trim() {
                    return Err(perr(path, format!("rational {s} is not in lowest terms")));
                }
                Ok(r)
            }
            Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(n.as_i64().unwrap().into())),
            _ => Err(perr(path, "expected a \"p/q\" string or an integer")),
        }
    }
}

impl FileScalar for f64 {
    fn encode(&self) -> Value {
        json!(self)
    }

    fn decode(v: &Value, path: &str) -> Result<Self> {
        v.as_f64().ok_or_else(|| perr(path, "expected a number"))
    }
}

fn encode<T: FileScalar>(a: &Algebra<T>, h: Option<&BilinearForm<T>>, meta: &Map<String, Value>) -> Value {
    let constants: Vec<Value> = a.constants().iter().map(|(i, j, k, c)| json!([i, j, k, c.encode()])).collect();
    let mut doc = Map::new();
    doc.insert("dim".into(), json!(a.dim()));
    doc.insert("mode".into(), json!(T::MODE));
    if let Some(l) = a.labels() {
        doc.insert("labels".into(), json!(l));
    }
    doc.insert("constants".into(), Value::Array(constants));
    if let Some(h) = h {
        let rows: Vec<Value> = h.rows().iter().map(|r| Value::Array(r.iter().map(FileScalar::encode).collect())).collect();
        doc.insert("metric".into(), Value::Array(rows));
    }
    doc.insert("meta".into(), Value::Object(meta.clone()));
    Value::Object(doc)
}

fn index(v: &Value, path: &str, dim: usize) -> Result<usize> {
    let i = v.as_u64().ok_or_else(|| perr(path, "expected a nonnegative integer index"))? as usize;
    if i >= dim {
        return Err(perr(path, format!("index {i} out of range for dimension {dim}")));
    }
    Ok(i)
}

fn decode<T: FileScalar>(doc: &Map<String, Value>, dim: usize) -> Result<(Algebra<T>, Option<BilinearForm<T>>)> {
    let labels = match doc.get("labels") {
        None | Some(Value::Null) => None,
        Some(Value::Array(ls)) => {
            if ls.len() != dim {
                return Err(perr("labels", format!("expected {dim} labels, got {}", ls.len())));
            }
            let v = ls
                .iter()
                .enumerate()
                .map(|(i, l)| l.as_str().map(str::to_string).ok_or_else(|| perr(format!("labels[{i}]"), "expected a string")))
                .collect::<Result<Vec<_>>>()?;
            Some(v)
        }
        Some(_) => return Err(perr("labels", "expected an array")),
    };
    let raw = doc.get("constants").and_then(Value::as_array).ok_or_else(|| perr("constants", "expected an array"))?;
    let mut constants = Vec::with_capacity(raw.len());
    for (t, entry) in raw.iter().enumerate() {
        let path = format!("constants[{t}]");
        let e = entry.as_array().filter(|e| e.len() == 4).ok_or_else(|| perr(&path, "expected [i, j, k, value]"))?;
        let i = index(&e[0], &format!("{path}[0]"), dim)?;
        let j = index(&e[1], &format!("{path}[1]"), dim)?;
        let k = index(&e[2], &format!("{path}[2]"), dim)?;
        let c = T::decode(&e[3], &format!("{path}[3]"))?;
        constants.push((i, j, k, c));
    }
    let algebra = Algebra::new(dim, constants, labels).map_err(|e| perr("constants", e.to_string()))?;
    let metric = match doc.get("metric") {
        None | Some(Value::Null) => None,
        Some(Value::Array(rows)) => {
            if rows.len() != dim {
                return Err(perr("metric", format!("expected {dim} rows, got {}", rows.len())));
            }
            let mut out = Vec::with_capacity(dim);
            for (r, row) in rows.iter().enumerate() {
                let row = row.as_array().filter(|x| x.len() == dim).ok_or_else(|| perr(format!("metric[{r}]"), format!("expected {dim} entries")))?;
                out.push(row.iter().enumerate().map(|(c, v)| T::decode(v, &format!("metric[{r}][{c}]"))).collect::<Result<Vec<T>>>()?);
            }
            Some(BilinearForm::new(out).map_err(|e| perr("metric", e.to_string()))?)
        }
        Some(_) => return Err(perr("metric", "expected an array of rows")),
    };
    Ok((algebra, metric))
}

pub fn to_json(m: &AnyMetrized, meta: &Map<String, Value>) -> Value {
    match m {
        AnyMetrized::Rational(q) => encode(q.algebra(), Some(q.form()), meta),
        AnyMetrized::Float(f) => encode(f.algebra(), Some(f.form()), meta),
    }
}

pub fn from_json(text: &str) -> Result<Loaded> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let doc = v.as_object().ok_or_else(|| perr("$", "expected an object"))?;
    let dim = doc.get("dim").and_then(Value::as_u64).ok_or_else(|| perr("dim", "expected a positive integer"))? as usize;
    if dim == 0 {
        return Err(perr("dim", "dimension must be positive"));
    }
    let mode = match doc.get("mode").and_then(Value::as_str) {
        Some("rational") | None => NumericMode::Rational,
        Some("float") => NumericMode::Float,
        Some(other) => return Err(perr("mode", format!("unknown mode {other:?}"))),
    };
    let meta = match doc.get("meta") {
        None | Some(Value::Null) => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(perr("meta", "expected an object")),
    };
    Ok(match mode {
        NumericMode::Rational => {
            let (algebra, metric) = decode::<Rat>(doc, dim)?;
            Loaded::Rational { algebra, metric, meta }
        }
        NumericMode::Float => {
            let (algebra, metric) = decode::<f64>(doc, dim)?;
            Loaded::Float { algebra, metric, meta }
        }
    })
}

pub fn save(path: &Path, m: &AnyMetrized, meta: &Map<String, Value>) -> Result<()> {
    let text = serde_json::to_string_pretty(&to_json(m, meta))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Loaded> {
    from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Envelope shared by every command's output.
#[derive(Debug, Clone, Serialize)]
pub struct Report<R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub input: Option<String>,
    pub seed: Option<u64>,
    pub config: Value,
    pub result: R,
}

impl<R: Serialize> Report<R> {
    pub fn new(command: &str, input: Option<&str>, seed: Option<u64>, config: Value, result: R) -> Self {
        Report {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            input: input.map(str::to_string),
            seed,
            config,
            result,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let v = serde_json::to_value(self)?;
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&v)? + "\n",
            Format::Csv => {
                let mut rows = Vec::new();
                flatten("", &v, &mut rows);
                let mut out = String::from("key,value\n");
                for (k, val) in rows {
                    out.push_str(&csv_field(&k));
                    out.push(',');
                    out.push_str(&csv_field(&val));
                    out.push('\n');
                }
                out
            }
        })
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::scalar::rat;

    #[test]
    fn rational_round_trip() {
        let p = presets::c_epsilon(&rat(1, 1)).unwrap();
        let text = serde_json::to_string(&to_json(&p.metrized, &Map::new())).unwrap();
        let back = from_json(&text).unwrap().metrized().unwrap();
        let (a, b) = (p.rational().unwrap(), back.as_rational().unwrap());
        assert_eq!(a.algebra(), b.algebra());
        assert_eq!(a.form(), b.form());
    }

    #[test]
    fn out_of_range_index_names_field() {
        let text = r#"{"dim": 2, "mode": "rational", "constants": [[0, 0, 0, "1"], [0, 1, 2, "1/2"]]}"#;
        match from_json(text) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "constants[1][2]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unreduced_rational_rejected() {
        let text = r#"{"dim": 1, "mode": "rational", "constants": [[0, 0, 0, "2/4"]]}"#;
        assert!(matches!(from_json(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn malformed_json_reports_line() {
        match from_json("{\n\"dim\": 2,,\n}") {
            Err(Error::Parse { path, .. }) => assert!(path.starts_with("line 2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_flattens_nested_fields() {
        let r = Report::new("x", None, Some(3), json!({"a": 1}), json!({"v": [1.5, "p,q"]}));
        let csv = r.render(Format::Csv).unwrap();
        assert!(csv.contains("result.v.0,1.5\n"));
        assert!(csv.contains("result.v.1,\"p,q\"\n"));
        assert!(csv.contains("seed,3\n"));
    }
}
