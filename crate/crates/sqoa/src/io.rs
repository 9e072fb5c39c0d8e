//! File formats: edge lists, observables, tuning reports, transfer files.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sqoa_core::ansatz::{LinxferParams, ParamLayout, TuneReport};
use sqoa_core::encoding::{Observable, PauliAxis, PauliString};
use sqoa_core::graph::Graph;

use crate::error::{Error, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads `n m` followed by `m` lines `u v`. Blank lines and `#` comments
/// are skipped.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let pair = match fields.as_slice() {
            [a, b] => (a.parse::<usize>(), b.parse::<usize>()),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected two integers, found `{content}`"),
                })
            }
        };
        let (a, b) = match pair {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected two non-negative integers, found `{content}`"),
                })
            }
        };
        if header.is_none() {
            header = Some((a, b));
        } else {
            edges.push((a, b));
        }
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        message: "missing `n m` header".into(),
    })?;
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok(Graph::new(n, edges)?)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {}", g.n(), g.num_edges())?;
    for &(u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    read_edge_list(std::io::BufReader::new(file))
}

pub fn save_graph(path: &Path, g: &Graph) -> Result<()> {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).map_err(io_err(path))?;
    fs::write(path, buf).map_err(io_err(path))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        context: "serialize".into(),
        source,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: f64,
    /// Most significant qubit first.
    pub pauli: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableJson {
    pub n_qubits: usize,
    pub offset: f64,
    pub terms: Vec<TermJson>,
}

impl From<&Observable> for ObservableJson {
    fn from(h: &Observable) -> Self {
        Self {
            n_qubits: h.n_qubits(),
            offset: h.offset(),
            terms: h
                .terms()
                .iter()
                .map(|(c, s)| TermJson {
                    coeff: *c,
                    pauli: s.label(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&ObservableJson> for Observable {
    type Error = Error;

    fn try_from(j: &ObservableJson) -> Result<Self> {
        let terms = j
            .terms
            .iter()
            .map(|t| PauliString::from_label(&t.pauli).map(|s| (t.coeff, s)))
            .collect::<sqoa_core::Result<Vec<_>>>()?;
        Ok(Observable::from_terms(j.n_qubits, j.offset, terms)?)
    }
}

/// Serde adapter storing a mixer as `"X"`, `"Y"` or `"Z"`.
pub mod axis_serde {
    use serde::{Deserialize, Deserializer, Serializer};
    use sqoa_core::encoding::PauliAxis;

    pub fn serialize<S: Serializer>(a: &PauliAxis, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&a.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<PauliAxis, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinxferJson {
    pub gamma_slope: f64,
    pub gamma_int: f64,
    pub beta_slope: f64,
    pub beta_int: f64,
}

impl From<LinxferParams> for LinxferJson {
    fn from(p: LinxferParams) -> Self {
        Self {
            gamma_slope: p.gamma_slope,
            gamma_int: p.gamma_int,
            beta_slope: p.beta_slope,
            beta_int: p.beta_int,
        }
    }
}

impl TryFrom<LinxferJson> for LinxferParams {
    type Error = Error;

    fn try_from(j: LinxferJson) -> Result<Self> {
        Ok(LinxferParams::from_slice(&[
            j.gamma_slope,
            j.gamma_int,
            j.beta_slope,
            j.beta_int,
        ])?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub params: Vec<f64>,
    /// `null` when the objective was not finite.
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReportJson {
    /// `linear` (four schedule parameters) or `layered` (`2p` angles).
    pub layout: String,
    pub p: usize,
    #[serde(with = "axis_serde")]
    pub mixer: PauliAxis,
    pub best_params: Vec<f64>,
    pub best_objective: f64,
    pub evaluations: usize,
    pub trace: Vec<TracePoint>,
}

impl TuneReportJson {
    pub fn new(report: &TuneReport, mixer: PauliAxis, p: usize) -> Self {
        Self {
            layout: match report.layout {
                ParamLayout::Linear => "linear",
                ParamLayout::Layered { .. } => "layered",
            }
            .into(),
            p,
            mixer,
            best_params: report.best_params.clone(),
            best_objective: report.best_objective,
            evaluations: report.evaluations,
            trace: report
                .trace
                .iter()
                .map(|(x, f)| TracePoint {
                    params: x.clone(),
                    objective: f.is_finite().then_some(*f),
                })
                .collect(),
        }
    }
}

/// Where a set of transferred parameters came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneSource {
    pub n: usize,
    pub k: usize,
    pub budget: usize,
    pub seed: u64,
    /// Instance file, when the instance was read from disk.
    pub instance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferEntry {
    #[serde(with = "axis_serde")]
    pub mixer: PauliAxis,
    pub p: usize,
    pub params: LinxferJson,
    pub objective: f64,
    pub evaluations: usize,
    pub source: TuneSource,
}

/// Tuned linear-schedule parameters keyed by `(mixer, p)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransferFile {
    pub entries: Vec<TransferEntry>,
}

impl TransferFile {
    pub fn get(&self, mixer: PauliAxis, p: usize) -> Option<&TransferEntry> {
        self.entries.iter().find(|e| e.mixer == mixer && e.p == p)
    }

    pub fn params(&self, mixer: PauliAxis, p: usize) -> Result<LinxferParams> {
        let e = self.get(mixer, p).ok_or_else(|| {
            Error::Config(format!("no transfer parameters for mixer {mixer}, p = {p}"))
        })?;
        e.params.try_into()
    }

    /// Inserts or replaces the entry for `(mixer, p)`, keeping entries sorted.
    pub fn upsert(&mut self, entry: TransferEntry) {
        self.entries.retain(|e| !(e.mixer == entry.mixer && e.p == entry.p));
        self.entries.push(entry);
        self.entries.sort_by_key(|e| (e.mixer.as_char(), e.p));
    }

    pub fn load_or_default(path: &Path) -> Result<Self> {
        if path.exists() {
            read_json(path)
        } else {
            Ok(Self::default())
        }
    }
}
