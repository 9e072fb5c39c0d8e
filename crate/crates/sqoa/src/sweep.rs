//! Grid experiments over instance size, depth, subspace size and mixer,
//! written as CSV with per-cell aggregate rows.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use sqoa_core::decode::Prepared;
use sqoa_core::encoding::PauliAxis;
use sqoa_core::graph::generate_regular_graph;
use sqoa_core::qsci;
use sqoa_core::seed::{self, Stream};

use crate::error::{Error, Result};
use crate::io::TransferFile;
use crate::pipeline::{
    self, compute_oracles, BaselineConfig, Instance, Method, OracleMode, OracleRecord, StageLog,
    SubspaceSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SweepMethod {
    /// Transferred schedule, sampling and subspace diagonalization.
    Sqoa,
    /// Transferred schedule scored on the state itself.
    Linxfer,
    RandomInit,
    FineTune,
}

impl SweepMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sqoa => "sqoa",
            Self::Linxfer => "linxfer",
            Self::RandomInit => "random-init",
            Self::FineTune => "fine-tune",
        }
    }

    /// Whether rows carry a subspace size.
    pub fn uses_subspace(self) -> bool {
        self == Self::Sqoa
    }
}

impl fmt::Display for SweepMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Self::Sqoa, Self::Linxfer, Self::RandomInit, Self::FineTune]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}` (sqoa, linxfer, random-init, fine-tune)"))
    }
}

#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub ns: Vec<usize>,
    pub ps: Vec<usize>,
    /// Subspace sizes; ignored by methods without a subspace step.
    pub rs: Vec<usize>,
    pub mixers: Vec<PauliAxis>,
    pub instances: usize,
    pub degree: usize,
    pub k: usize,
    pub shots: u64,
    pub seed: u64,
    pub method: SweepMethod,
    /// Required by `sqoa`, `linxfer` and `fine-tune`.
    pub transfer: Option<TransferFile>,
    /// Objective evaluations for `random-init` and `fine-tune`.
    pub budget: usize,
    pub subspace: SubspaceSource,
    pub oracle: OracleMode,
    pub expm_tol: f64,
    pub eig_tol: f64,
    pub tie_threshold: f64,
    pub timings: bool,
}

impl SweepGrid {
    pub fn new(method: SweepMethod) -> Self {
        Self {
            ns: vec![16],
            ps: vec![1],
            rs: vec![1],
            mixers: vec![PauliAxis::X],
            instances: 1,
            degree: 3,
            k: pipeline::DEFAULT_K,
            shots: pipeline::DEFAULT_SHOTS,
            seed: 0,
            method,
            transfer: None,
            budget: sqoa_core::ansatz::DEFAULT_BASELINE_BUDGET,
            subspace: SubspaceSource::Sampled,
            oracle: OracleMode::Auto,
            expm_tol: sqoa_core::linalg::ExpmOptions::default().tol,
            eig_tol: 1e-8,
            tie_threshold: sqoa_core::decode::DEFAULT_TIE_THRESHOLD,
            timings: false,
        }
    }

    fn validate(&self) -> Result<()> {
        let empty = self.ns.is_empty() || self.ps.is_empty() || self.mixers.is_empty();
        if empty || self.instances == 0 {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.method.uses_subspace() && (self.rs.is_empty() || self.rs.contains(&0)) {
            return Err(Error::Config("subspace sizes must be positive".into()));
        }
        if self.ps.contains(&0) {
            return Err(Error::Config("p must be at least 1".into()));
        }
        if self.method != SweepMethod::RandomInit && self.transfer.is_none() {
            return Err(Error::Config(format!("method {} needs a transfer file", self.method)));
        }
        Ok(())
    }

    fn rs_for_method(&self) -> Vec<usize> {
        if self.method.uses_subspace() {
            self.rs.clone()
        } else {
            vec![0]
        }
    }
}

/// Seed of instance `index` at size `n`.
pub fn instance_seed(master: u64, n: usize, index: usize) -> u64 {
    Stream::Instance.seed(master, ((n as u64) << 32) | index as u64)
}

/// Seed of the `(mixer, p)` run on an instance.
fn run_seed(instance_seed: u64, mixer: PauliAxis, p: usize) -> u64 {
    let axis = PauliAxis::ALL.iter().position(|&a| a == mixer).unwrap_or(0) as u64;
    seed::derive(instance_seed, 0x5157, (axis << 32) | p as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowKind {
    Data,
    Aggregate,
}

impl RowKind {
    fn as_str(self) -> &'static str {
        match self {
            Self::Data => "data",
            Self::Aggregate => "aggregate",
        }
    }
}

/// One CSV line. Aggregate rows hold means over the data rows of a cell and
/// leave `seed` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub seed: Option<u64>,
    pub mixer: PauliAxis,
    pub p: usize,
    pub r: usize,
    pub n_qubits: Option<f64>,
    pub energy: Option<f64>,
    pub e_min: Option<f64>,
    pub alpha_r: Option<f64>,
    pub cut: Option<f64>,
    pub c_opt: Option<f64>,
    pub certified: Option<bool>,
    pub alpha_c: Option<f64>,
    pub ties: Option<f64>,
    pub time_ms: Option<f64>,
    pub method: SweepMethod,
    pub kind: RowKind,
    pub alpha_r_se: Option<f64>,
    pub alpha_c_se: Option<f64>,
    pub samples: usize,
    pub error: Option<String>,
}

pub const CSV_HEADER: [&str; 21] = [
    "n", "seed", "mixer", "p", "r", "n_qubits", "energy", "e_min", "alpha_r", "cut", "c_opt",
    "certified", "alpha_c", "ties", "time_ms", "method", "kind", "alpha_r_se", "alpha_c_se",
    "samples", "error",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl SweepRow {
    fn blank(n: usize, seed: Option<u64>, mixer: PauliAxis, p: usize, r: usize, method: SweepMethod) -> Self {
        Self {
            n,
            seed,
            mixer,
            p,
            r,
            n_qubits: None,
            energy: None,
            e_min: None,
            alpha_r: None,
            cut: None,
            c_opt: None,
            certified: None,
            alpha_c: None,
            ties: None,
            time_ms: None,
            method,
            kind: RowKind::Data,
            alpha_r_se: None,
            alpha_c_se: None,
            samples: 1,
            error: None,
        }
    }

    fn failed(mut self, e: &Error) -> Self {
        self.error = Some(e.to_string());
        self.samples = 0;
        self
    }

    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            opt(&self.seed),
            self.mixer.to_string(),
            self.p.to_string(),
            self.r.to_string(),
            opt(&self.n_qubits),
            opt(&self.energy),
            opt(&self.e_min),
            opt(&self.alpha_r),
            opt(&self.cut),
            opt(&self.c_opt),
            opt(&self.certified),
            opt(&self.alpha_c),
            opt(&self.ties),
            opt(&self.time_ms),
            self.method.to_string(),
            self.kind.as_str().to_string(),
            opt(&self.alpha_r_se),
            opt(&self.alpha_c_se),
            self.samples.to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }

    pub fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        let bad = |field: &str| Error::Parse {
            line: rec.position().map_or(0, |p| p.line() as usize),
            message: format!("bad `{field}` field"),
        };
        let get = |i: usize| rec.get(i).ok_or_else(|| bad(CSV_HEADER[i]));
        fn parse_opt<T: FromStr>(s: &str) -> std::result::Result<Option<T>, ()> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| ())
            }
        }
        macro_rules! field {
            ($i:expr) => {
                get($i)?.parse().map_err(|_| bad(CSV_HEADER[$i]))?
            };
        }
        macro_rules! field_opt {
            ($i:expr) => {
                parse_opt(get($i)?).map_err(|_| bad(CSV_HEADER[$i]))?
            };
        }
        let kind = match get(16)? {
            "data" => RowKind::Data,
            "aggregate" => RowKind::Aggregate,
            _ => return Err(bad("kind")),
        };
        let error = get(20)?;
        Ok(Self {
            n: field!(0),
            seed: field_opt!(1),
            mixer: field!(2),
            p: field!(3),
            r: field!(4),
            n_qubits: field_opt!(5),
            energy: field_opt!(6),
            e_min: field_opt!(7),
            alpha_r: field_opt!(8),
            cut: field_opt!(9),
            c_opt: field_opt!(10),
            certified: field_opt!(11),
            alpha_c: field_opt!(12),
            ties: field_opt!(13),
            time_ms: field_opt!(14),
            method: field!(15),
            kind,
            alpha_r_se: field_opt!(17),
            alpha_c_se: field_opt!(18),
            samples: field!(19),
            error: (!error.is_empty()).then(|| error.to_string()),
        })
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for row in rows {
        out.write_record(row.to_record())?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(r);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: "unexpected CSV header".into(),
        });
    }
    reader
        .records()
        .map(|rec| SweepRow::from_record(&rec?))
        .collect()
}

fn mean_se(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// One aggregate row per `(method, n, mixer, p, r)` cell over its successful
/// data rows, in sorted cell order.
pub fn aggregate(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut cells: BTreeMap<(SweepMethod, usize, char, usize, usize), Vec<&SweepRow>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.kind == RowKind::Data) {
        cells
            .entry((row.method, row.n, row.mixer.as_char(), row.p, row.r))
            .or_default()
            .push(row);
    }
    cells
        .into_values()
        .map(|group| {
            let first = group[0];
            let ok: Vec<&SweepRow> = group.iter().copied().filter(|r| r.error.is_none()).collect();
            let mut agg = SweepRow::blank(first.n, None, first.mixer, first.p, first.r, first.method);
            agg.kind = RowKind::Aggregate;
            agg.samples = ok.len();
            if ok.is_empty() {
                agg.error = Some("no successful runs".into());
                return agg;
            }
            let column = |f: fn(&SweepRow) -> Option<f64>| -> Option<Vec<f64>> { ok.iter().map(|r| f(r)).collect() };
            let mean = |f: fn(&SweepRow) -> Option<f64>| column(f).map(|v| mean_se(&v).0);
            agg.n_qubits = mean(|r| r.n_qubits);
            agg.energy = mean(|r| r.energy);
            agg.e_min = mean(|r| r.e_min);
            agg.cut = mean(|r| r.cut);
            agg.c_opt = mean(|r| r.c_opt);
            agg.ties = mean(|r| r.ties);
            agg.time_ms = mean(|r| r.time_ms);
            agg.certified = ok.iter().map(|r| r.certified).collect::<Option<Vec<_>>>().map(|c| c.iter().all(|&b| b));
            if let Some(v) = column(|r| r.alpha_r) {
                let (m, se) = mean_se(&v);
                agg.alpha_r = Some(m);
                agg.alpha_r_se = se;
            }
            if let Some(v) = column(|r| r.alpha_c) {
                let (m, se) = mean_se(&v);
                agg.alpha_c = Some(m);
                agg.alpha_c_se = se;
            }
            agg
        })
        .collect()
}

fn elapsed_ms(start: Option<Instant>) -> Option<f64> {
    start.map(|t| t.elapsed().as_secs_f64() * 1e3)
}

/// Runs every cell of the grid; failures become rows with an `error` and
/// the sweep continues. Data rows come first, ordered by
/// `(n, instance, mixer, p, r)`, followed by the aggregate rows.
pub fn run_sweep(grid: &SweepGrid, mut progress: impl FnMut(&str)) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    let rs = grid.rs_for_method();
    let mut rows = Vec::new();
    for &n in &grid.ns {
        for idx in 0..grid.instances {
            let iseed = instance_seed(grid.seed, n, idx);
            progress(&format!("n={n} instance {}/{}", idx + 1, grid.instances));
            let prepared = generate_regular_graph(n, grid.degree, iseed)
                .map_err(Error::from)
                .and_then(|g| Instance::new(g, grid.k))
                .and_then(|inst| {
                    let o = compute_oracles(&inst, grid.oracle, iseed, &mut StageLog::default())?;
                    Ok((inst, o))
                });
            let (inst, oracles) = match prepared {
                Ok(v) => v,
                Err(e) => {
                    for &mixer in &grid.mixers {
                        for &p in &grid.ps {
                            for &r in &rs {
                                rows.push(SweepRow::blank(n, Some(iseed), mixer, p, r, grid.method).failed(&e));
                            }
                        }
                    }
                    continue;
                }
            };
            for &mixer in &grid.mixers {
                for &p in &grid.ps {
                    let cell = |r| SweepRow::blank(n, Some(iseed), mixer, p, r, grid.method);
                    let run = run_seed(iseed, mixer, p);
                    match run_cell(grid, &inst, &oracles, mixer, p, run, &rs, &cell) {
                        Ok(mut cell_rows) => rows.append(&mut cell_rows),
                        Err(e) => rows.extend(rs.iter().map(|&r| cell(r).failed(&e))),
                    }
                }
            }
        }
    }
    let aggregates = aggregate(&rows);
    rows.extend(aggregates);
    Ok(rows)
}

fn fill(row: &mut SweepRow, inst: &Instance, oracles: &OracleRecord, m: &sqoa_core::decode::Metrics, ties: usize) {
    row.n_qubits = Some(inst.n_qubits() as f64);
    row.energy = Some(m.energy);
    row.e_min = Some(oracles.e_min);
    row.alpha_r = Some(m.alpha_r);
    row.cut = Some(m.cut as f64);
    row.c_opt = Some(m.c_opt as f64);
    row.certified = Some(m.certified_c_opt);
    row.alpha_c = Some(m.alpha_c);
    row.ties = Some(ties as f64);
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    grid: &SweepGrid,
    inst: &Instance,
    oracles: &OracleRecord,
    mixer: PauliAxis,
    p: usize,
    run_seed: u64,
    rs: &[usize],
    cell: &dyn Fn(usize) -> SweepRow,
) -> Result<Vec<SweepRow>> {
    let clock = || grid.timings.then(Instant::now);
    let transfer = || {
        grid.transfer
            .as_ref()
            .ok_or_else(|| Error::Config("missing transfer file".into()))?
            .params(mixer, p)
    };
    let mut log = StageLog::default();
    if grid.method != SweepMethod::Sqoa {
        let start = clock();
        let method = match grid.method {
            SweepMethod::Linxfer => Method::Linxfer(transfer()?),
            SweepMethod::RandomInit => Method::RandomInit { budget: grid.budget },
            SweepMethod::FineTune => Method::FineTune {
                start: transfer()?,
                budget: grid.budget,
            },
            SweepMethod::Sqoa => unreachable!(),
        };
        let cfg = BaselineConfig {
            method,
            mixer,
            p,
            seed: run_seed,
            expm_tol: grid.expm_tol,
            tie_threshold: grid.tie_threshold,
            timings: false,
        };
        let rec = pipeline::run_baseline(inst, oracles, &cfg)?;
        let mut row = cell(0);
        row.n_qubits = Some(rec.n_qubits as f64);
        row.energy = Some(rec.energy);
        row.e_min = Some(rec.e_min);
        row.alpha_r = Some(rec.alpha_r);
        row.cut = Some(rec.cut as f64);
        row.c_opt = Some(rec.c_opt as f64);
        row.certified = Some(rec.certified);
        row.alpha_c = Some(rec.alpha_c);
        row.ties = Some(rec.ties.len() as f64);
        row.time_ms = elapsed_ms(start);
        return Ok(vec![row]);
    }

    let start = clock();
    let params = transfer()?;
    let state = pipeline::linxfer_state(inst, mixer, p, &params, grid.expm_tol, &mut log)?;
    let samples = match grid.subspace {
        SubspaceSource::Sampled => Some(pipeline::measure(&state, grid.shots, run_seed, &mut log)?),
        SubspaceSource::ExactProbabilities => None,
    };
    let shared_ms = elapsed_ms(start);
    let full = 1u128 << inst.n_qubits();
    let mut rows = Vec::with_capacity(rs.len());
    for &r in rs {
        let start = clock();
        let outcome = (|| -> Result<SweepRow> {
            if r as u128 > full {
                return Err(Error::Config(format!(
                    "r = {r} exceeds the {full} basis states of {} qubits",
                    inst.n_qubits()
                )));
            }
            let subspace = match &samples {
                Some(s) => qsci::select_subspace(s, r)?,
                None => qsci::select_subspace_exact(&state, r)?,
            };
            let res = pipeline::subspace_ground(inst, &subspace, run_seed, grid.eig_tol, &mut log)?;
            let (m, sol) = pipeline::score(inst, Prepared::Qsci(&res), oracles, grid.tie_threshold, &mut log)?;
            let mut row = cell(r);
            fill(&mut row, inst, oracles, &m, sol.ties.len());
            Ok(row)
        })();
        let mut row = outcome.unwrap_or_else(|e| cell(r).failed(&e));
        if row.error.is_none() {
            row.time_ms = shared_ms.zip(elapsed_ms(start)).map(|(a, b)| a + b);
        }
        rows.push(row);
    }
    Ok(rows)
}
