use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use eberlein_core::{
    CompactFunction, ConcreteMeasure, Error, GroupSpec, K2Function, ProbeReport, SemiMeasure, TracePoint,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug)]
pub enum CliError {
    /// Input does not match the wire format; `pointer` is a JSON pointer.
    Schema { path: String, pointer: String, message: String },
    NonConvergence(String),
    Usage(String),
    Io(String),
    Domain(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } => 3,
            CliError::NonConvergence(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Domain(_) => 65,
            CliError::Io(_) => 74,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema { path, pointer, message } => {
                write!(f, "schema violation in {path} at {pointer}: {message}")
            }
            CliError::NonConvergence(m) => write!(f, "did not converge: {m}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResolutionExhausted { .. } | Error::EvaluationDidNotConverge { .. } => {
                CliError::NonConvergence(e.to_string())
            }
            other => CliError::Domain(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        use serde_path_to_error::Segment;
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        "/".into()
    } else {
        out
    }
}

pub fn read_value(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        pointer: "/".into(),
        message: format!("not JSON: {e}"),
    })
}

pub fn decode<T: DeserializeOwned>(path: &Path, value: Value) -> CliResult<T> {
    serde_path_to_error::deserialize(value).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })
}

/// A semi-measure file, or a measure file read as the dual measure.
pub fn load_semimeasure(path: &Path) -> CliResult<SemiMeasure> {
    let value = read_value(path)?;
    if value.get("dual_measure").is_some() {
        return decode(path, value);
    }
    let nu: ConcreteMeasure = decode(path, value)?;
    SemiMeasure::from_dual(nu).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        pointer: "/".into(),
        message: e.to_string(),
    })
}

pub fn load_measure(path: &Path) -> CliResult<ConcreteMeasure> {
    let value = read_value(path)?;
    decode(path, value)
}

pub fn load_function(path: &Path, group: &GroupSpec) -> CliResult<K2Function> {
    let value = read_value(path)?;
    let raw = decode(path, value)?;
    K2Function::from_json(Some(group), &raw).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        pointer: "/terms".into(),
        message: e.to_string(),
    })
}

pub struct Meta {
    pub kind: &'static str,
    pub group: Option<GroupSpec>,
    pub options: Map<String, Value>,
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(kind: &'static str, group: &GroupSpec) -> Self {
        Meta { kind, group: Some(group.clone()), options: Map::new(), seed: None }
    }

    pub fn without_group(kind: &'static str) -> Self {
        Meta { kind, group: None, options: Map::new(), seed: None }
    }

    pub fn option(mut self, key: &str, value: impl Serialize) -> Self {
        self.options.insert(key.into(), serde_json::to_value(value).expect("serializable option"));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn to_value(&self) -> Value {
        json!({
            "schema": format!("eberlein/{}/{SCHEMA_VERSION}", self.kind),
            "version": eberlein_core::VERSION,
            "group": self.group,
            "options": self.options,
            "seed": self.seed,
        })
    }

    fn csv_header(&self) -> String {
        format!("# {}\n", self.to_value())
    }
}

/// Writes via a sibling temp file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// The payload's JSON object with a `meta` block added.
pub fn with_meta(payload: impl Serialize, meta: &Meta) -> Value {
    let mut v = serde_json::to_value(payload).expect("serializable payload");
    match &mut v {
        Value::Object(map) => {
            map.insert("meta".into(), meta.to_value());
            v
        }
        other => json!({ "meta": meta.to_value(), "data": other.take() }),
    }
}

/// JSON to `path`, or stdout when `path` is `None`.
pub fn emit_json(path: Option<&Path>, payload: impl Serialize, meta: &Meta) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&with_meta(payload, meta)).expect("serializable") + "\n";
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_bytes(meta: &Meta, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut buf = meta.csv_header().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let err = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(header).map_err(err)?;
        for row in rows {
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(buf)
}

pub fn write_csv(path: &Path, meta: &Meta, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    write_atomic(path, &csv_bytes(meta, header, rows)?)
}

/// `t,re,im` rows of a sampled function; finite groups use row-major
/// indices for `t`.
pub fn function_rows(f: &CompactFunction) -> Vec<Vec<String>> {
    let g = f.group();
    f.nodes()
        .map(|(m, v)| {
            let t = if g.is_finite() { m.to_string() } else { (m as f64 * g.step()).to_string() };
            vec![t, v.re.to_string(), v.im.to_string()]
        })
        .collect()
}

pub fn trace_rows(trace: &[TracePoint]) -> Vec<Vec<String>> {
    trace.iter().map(|p| vec![p.n.to_string(), p.scale.to_string(), p.value.to_string()]).collect()
}

pub fn report_exit(report: &ProbeReport) -> i32 {
    report.verdict.exit_code()
}
