//! The end-to-end solver: relaxation, transferred schedule, sampling,
//! subspace diagonalization, rounding and scoring. Nothing on the solve
//! path optimizes parameters; the stage trace records exactly what ran.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sqoa_core::ansatz::{
    self, expand_schedule, Ansatz, AngleSchedule, DescentOptions, LinxferParams, TuneReport,
};
use sqoa_core::decode::{self, Metrics, Oracles, Prepared, SpinSolution};
use sqoa_core::encoding::{build_encoding, build_relaxed_hamiltonian, EncodingMap, Observable, PauliAxis};
use sqoa_core::engine::{self, GroundOptions, SampleSet, Statevector};
use sqoa_core::graph::{self, Coloring, CutMode, Graph};
use sqoa_core::linalg::ExpmOptions;
use sqoa_core::qsci::{self, QsciResult, Subspace};
use sqoa_core::seed::Stream;

use crate::error::{Error, Result, StageExt};
use crate::io::{axis_serde, LinxferJson, TuneReportJson};

pub const DEFAULT_SHOTS: u64 = 1_000_000;
pub const DEFAULT_K: usize = 3;

/// Source of the reference cut `C_opt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    /// Certified enumeration when the graph is small enough, annealing otherwise.
    #[default]
    Auto,
    Certified,
    BestFound,
}

impl FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "certified" => Ok(Self::Certified),
            "best-found" => Ok(Self::BestFound),
            _ => Err(format!("unknown oracle mode `{s}` (auto, certified, best-found)")),
        }
    }
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Certified => "certified",
            Self::BestFound => "best-found",
        })
    }
}

/// How the subspace basis is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceSource {
    /// Most frequent bitstrings among `shots` measurements.
    #[default]
    Sampled,
    /// Largest exact probabilities; a noise-free ablation.
    ExactProbabilities,
}

/// Stage names with optional wall-clock timings.
#[derive(Debug, Clone, Default)]
pub struct StageLog {
    stages: Vec<String>,
    timings: Option<BTreeMap<String, f64>>,
}

impl StageLog {
    pub fn new(timed: bool) -> Self {
        Self {
            stages: Vec::new(),
            timings: timed.then(BTreeMap::new),
        }
    }

    pub fn run<T>(&mut self, name: &'static str, f: impl FnOnce() -> sqoa_core::Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f().stage(name);
        if let Some(t) = self.timings.as_mut() {
            *t.entry(name.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64() * 1e3;
        }
        if self.stages.last().map(String::as_str) != Some(name) {
            self.stages.push(name.to_string());
        }
        out
    }

    pub fn stages(&self) -> &[String] {
        &self.stages
    }

    pub fn timings(&self) -> Option<&BTreeMap<String, f64>> {
        self.timings.as_ref()
    }

    pub fn total_ms(&self) -> Option<f64> {
        self.timings.as_ref().map(|t| t.values().sum())
    }

    fn into_parts(self) -> (Vec<String>, Option<BTreeMap<String, f64>>) {
        (self.stages, self.timings)
    }
}

/// A graph with its coloring, encoding and relaxed Hamiltonian.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub coloring: Coloring,
    pub map: EncodingMap,
    pub hamiltonian: Observable,
    pub k: usize,
}

impl Instance {
    pub fn new(graph: Graph, k: usize) -> Result<Self> {
        Self::build(graph, k, &mut StageLog::default())
    }

    pub fn build(graph: Graph, k: usize, log: &mut StageLog) -> Result<Self> {
        if !(1..=3).contains(&k) {
            return Err(Error::Config(format!("k must be 1, 2 or 3, got {k}")));
        }
        let coloring = log.run("coloring", || Ok(graph::greedy_coloring(&graph)))?;
        let map = log.run("encoding", || build_encoding(&graph, &coloring, k))?;
        let hamiltonian = log.run("hamiltonian", || build_relaxed_hamiltonian(&graph, &map))?;
        Ok(Self {
            graph,
            coloring,
            map,
            hamiltonian,
            k,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.map.n_qubits()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub e_min: f64,
    pub c_opt: usize,
    pub certified: bool,
}

impl From<OracleRecord> for Oracles {
    fn from(o: OracleRecord) -> Self {
        Oracles {
            e_min: o.e_min,
            c_opt: o.c_opt,
            certified: o.certified,
        }
    }
}

/// Ground energy of the relaxed Hamiltonian and the best cut.
pub fn compute_oracles(inst: &Instance, mode: OracleMode, master_seed: u64, log: &mut StageLog) -> Result<OracleRecord> {
    let (e_min, _) = log.run("ground_energy", || {
        engine::lanczos_ground(
            &inst.hamiltonian,
            Stream::Eigensolver.seed(master_seed, 1),
            &GroundOptions::default(),
        )
    })?;
    let cut_mode = match mode {
        OracleMode::Certified => CutMode::Certified,
        OracleMode::BestFound => CutMode::BestFound,
        OracleMode::Auto if inst.graph.n() <= graph::MAX_CERTIFIED_VERTICES => CutMode::Certified,
        OracleMode::Auto => CutMode::BestFound,
    };
    let cut = log.run("max_cut", || {
        graph::best_cut(&inst.graph, cut_mode, Stream::Annealing.seed(master_seed, 0))
    })?;
    Ok(OracleRecord {
        e_min,
        c_opt: cut.value,
        certified: cut.certified,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub mixer: PauliAxis,
    pub p: usize,
    pub r: usize,
    pub shots: u64,
    pub k: usize,
    /// Master seed; per-stage seeds are derived from it.
    pub seed: u64,
    pub params: LinxferParams,
    pub expm_tol: f64,
    pub eig_tol: f64,
    pub tie_threshold: f64,
    pub subspace: SubspaceSource,
    pub oracle: OracleMode,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(mixer: PauliAxis, p: usize, r: usize, params: LinxferParams) -> Self {
        Self {
            mixer,
            p,
            r,
            shots: DEFAULT_SHOTS,
            k: DEFAULT_K,
            seed: 0,
            params,
            expm_tol: ExpmOptions::default().tol,
            eig_tol: 1e-8,
            tie_threshold: decode::DEFAULT_TIE_THRESHOLD,
            subspace: SubspaceSource::Sampled,
            oracle: OracleMode::Auto,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.p == 0 {
            return bad("p must be at least 1");
        }
        if self.r == 0 {
            return bad("r must be at least 1");
        }
        if self.shots == 0 {
            return bad("shots must be at least 1");
        }
        if !(1..=3).contains(&self.k) {
            return bad("k must be 1, 2 or 3");
        }
        if !(self.expm_tol > 0.0 && self.eig_tol > 0.0 && self.tie_threshold >= 0.0) {
            return bad("tolerances must be positive");
        }
        Ok(())
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            mixer: self.mixer,
            p: self.p,
            r: self.r,
            shots: self.shots,
            k: self.k,
            seed: self.seed,
            params: self.params.into(),
            expm_tol: self.expm_tol,
            eig_tol: self.eig_tol,
            tie_threshold: self.tie_threshold,
            subspace: self.subspace,
            oracle: self.oracle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(with = "axis_serde")]
    pub mixer: PauliAxis,
    pub p: usize,
    pub r: usize,
    pub shots: u64,
    pub k: usize,
    pub seed: u64,
    pub params: LinxferJson,
    pub expm_tol: f64,
    pub eig_tol: f64,
    pub tie_threshold: f64,
    pub subspace: SubspaceSource,
    pub oracle: OracleMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringSummary {
    pub num_colors: usize,
    pub class_sizes: Vec<usize>,
}

impl From<&Coloring> for ColoringSummary {
    fn from(c: &Coloring) -> Self {
        Self {
            num_colors: c.num_colors(),
            class_sizes: c.class_sizes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSummary {
    pub requested: usize,
    pub used: usize,
    pub shortfall: usize,
    /// Distinct bitstrings observed, when sampling was used.
    pub distinct_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ConfigEcho,
    pub n: usize,
    pub num_edges: usize,
    pub n_qubits: usize,
    pub coloring: ColoringSummary,
    pub subspace: SubspaceSummary,
    /// Subspace ground energy `E_R`.
    pub energy: f64,
    pub e_min: f64,
    pub cut: usize,
    pub c_opt: usize,
    pub certified: bool,
    pub alpha_r: f64,
    pub alpha_c: f64,
    /// Variables whose rounding expectation was within the tie threshold.
    pub ties: Vec<usize>,
    /// Binary solution, vertex 0 first, with spin `+1` written as `0`.
    pub solution: String,
    pub stages: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

pub fn solution_string(s: &SpinSolution) -> String {
    s.bits().iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// Linear-schedule state on the instance.
pub fn linxfer_state(
    inst: &Instance,
    mixer: PauliAxis,
    p: usize,
    params: &LinxferParams,
    expm_tol: f64,
    log: &mut StageLog,
) -> Result<Statevector> {
    let sched = log.run("schedule", || expand_schedule(params, p))?;
    log.run("state", || ansatz::prepare_state(&inst.hamiltonian, mixer, &sched, expm_tol))
}

/// Draws the measurement record used by every subspace size of a run.
pub fn measure(state: &Statevector, shots: u64, master_seed: u64, log: &mut StageLog) -> Result<SampleSet> {
    log.run("sampling", || {
        engine::sample_counts(state, shots, Stream::Sampling.seed(master_seed, 0))
    })
}

pub fn subspace_ground(
    inst: &Instance,
    subspace: &Subspace,
    master_seed: u64,
    eig_tol: f64,
    log: &mut StageLog,
) -> Result<QsciResult> {
    let h_eff = log.run("effective_hamiltonian", || {
        qsci::build_effective_hamiltonian(&inst.hamiltonian, subspace)
    })?;
    log.run("eigensolve", || {
        qsci::qsci_ground(&h_eff, Stream::Eigensolver.seed(master_seed, 0), eig_tol)
    })
}

pub fn score(
    inst: &Instance,
    prepared: Prepared<'_>,
    oracles: &OracleRecord,
    tie: f64,
    log: &mut StageLog,
) -> Result<(Metrics, SpinSolution)> {
    log.run("rounding", || {
        decode::compute_metrics(
            &inst.graph,
            &inst.hamiltonian,
            prepared,
            &inst.map,
            &(*oracles).into(),
            tie,
        )
    })
}

fn check_r(inst: &Instance, r: usize) -> Result<()> {
    let full = 1u128 << inst.n_qubits();
    if r as u128 > full {
        return Err(Error::Config(format!(
            "r = {r} exceeds the {full} basis states of {} qubits",
            inst.n_qubits()
        )));
    }
    Ok(())
}

/// The full solver on one graph.
pub fn run_sqoa(g: &Graph, cfg: &RunConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let mut log = StageLog::new(cfg.timings);
    let inst = Instance::build(g.clone(), cfg.k, &mut log)?;
    check_r(&inst, cfg.r)?;
    let oracles = compute_oracles(&inst, cfg.oracle, cfg.seed, &mut log)?;
    run_sqoa_prepared(&inst, &oracles, cfg, log)
}

/// Solver on an already prepared instance with known oracles; `log`
/// carries stages recorded so far.
pub fn run_sqoa_prepared(inst: &Instance, oracles: &OracleRecord, cfg: &RunConfig, mut log: StageLog) -> Result<RunRecord> {
    cfg.validate()?;
    if inst.k != cfg.k {
        return Err(Error::Config("instance encoding differs from configured k".into()));
    }
    check_r(inst, cfg.r)?;
    let state = linxfer_state(inst, cfg.mixer, cfg.p, &cfg.params, cfg.expm_tol, &mut log)?;
    let (subspace, distinct) = match cfg.subspace {
        SubspaceSource::Sampled => {
            let samples = measure(&state, cfg.shots, cfg.seed, &mut log)?;
            let s = log.run("subspace", || qsci::select_subspace(&samples, cfg.r))?;
            (s, Some(samples.distinct()))
        }
        SubspaceSource::ExactProbabilities => {
            (log.run("subspace", || qsci::select_subspace_exact(&state, cfg.r))?, None)
        }
    };
    drop(state);
    let res = subspace_ground(inst, &subspace, cfg.seed, cfg.eig_tol, &mut log)?;
    let (metrics, solution) = score(inst, Prepared::Qsci(&res), oracles, cfg.tie_threshold, &mut log)?;

    let mut warnings = Vec::new();
    if subspace.shortfall() > 0 {
        warnings.push(format!(
            "only {} distinct states available for r = {}",
            subspace.r(),
            cfg.r
        ));
    }
    if !solution.ties.is_empty() {
        warnings.push(format!("{} rounding ties resolved to +1", solution.ties.len()));
    }
    if !oracles.certified {
        warnings.push("c_opt is a best-found value, not certified".into());
    }
    let (stages, timings_ms) = log.into_parts();
    Ok(RunRecord {
        config: cfg.echo(),
        n: inst.graph.n(),
        num_edges: inst.graph.num_edges(),
        n_qubits: inst.n_qubits(),
        coloring: (&inst.coloring).into(),
        subspace: SubspaceSummary {
            requested: subspace.requested(),
            used: subspace.r(),
            shortfall: subspace.shortfall(),
            distinct_samples: distinct,
        },
        energy: metrics.energy,
        e_min: metrics.e_min,
        cut: metrics.cut,
        c_opt: metrics.c_opt,
        certified: metrics.certified_c_opt,
        alpha_r: metrics.alpha_r,
        alpha_c: metrics.alpha_c,
        ties: solution.ties.clone(),
        solution: solution_string(&solution),
        stages,
        warnings,
        timings_ms,
    })
}

/// Parameter-setting procedures compared against the transferred schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Transferred linear schedule, no optimization.
    Linxfer(LinxferParams),
    /// Uniform random angles followed by local descent.
    RandomInit { budget: usize },
    /// Local descent from the expanded transferred schedule.
    FineTune { start: LinxferParams, budget: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Linxfer(_) => "linxfer",
            Method::RandomInit { .. } => "random-init",
            Method::FineTune { .. } => "fine-tune",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub method: String,
    #[serde(with = "axis_serde")]
    pub mixer: PauliAxis,
    pub p: usize,
    pub k: usize,
    pub seed: u64,
    pub n: usize,
    pub n_qubits: usize,
    pub schedule: ScheduleJson,
    /// `<psi|H|psi>` of the final schedule.
    pub energy: f64,
    pub e_min: f64,
    pub cut: usize,
    pub c_opt: usize,
    pub certified: bool,
    pub alpha_r: f64,
    pub alpha_c: f64,
    pub ties: Vec<usize>,
    pub solution: String,
    /// Absent for the transferred schedule, which is not optimized.
    pub report: Option<TuneReportJson>,
    pub stages: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleJson {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl From<&AngleSchedule> for ScheduleJson {
    fn from(s: &AngleSchedule) -> Self {
        Self {
            gammas: s.gammas().to_vec(),
            betas: s.betas().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub method: Method,
    pub mixer: PauliAxis,
    pub p: usize,
    pub seed: u64,
    pub expm_tol: f64,
    pub tie_threshold: f64,
    pub timings: bool,
}

/// Scores the state of a parameter-setting procedure directly (no subspace
/// step): `alpha_r` from `<psi|H|psi>`, `alpha_c` from rounding `psi`.
pub fn run_baseline(inst: &Instance, oracles: &OracleRecord, cfg: &BaselineConfig) -> Result<BaselineRecord> {
    let mut log = StageLog::new(cfg.timings);
    let expm = ExpmOptions {
        tol: cfg.expm_tol,
        ..ExpmOptions::default()
    };
    let descent = |d: DescentOptions| DescentOptions { expm, ..d };
    let h = &inst.hamiltonian;
    let (schedule, report): (AngleSchedule, Option<TuneReport>) = match cfg.method {
        Method::Linxfer(lp) => (log.run("schedule", || expand_schedule(&lp, cfg.p))?, None),
        Method::RandomInit { budget } => {
            let rep = log.run("optimize", || {
                ansatz::optimize_random_init_with(
                    h,
                    cfg.mixer,
                    cfg.p,
                    budget,
                    Stream::Baseline.seed(cfg.seed, 0),
                    &descent(DescentOptions::random_init()),
                )
            })?;
            (log.run("schedule", || rep.best_schedule(cfg.p))?, Some(rep))
        }
        Method::FineTune { start, budget } => {
            let rep = log.run("optimize", || {
                ansatz::fine_tune_with(h, cfg.mixer, cfg.p, &start, budget, &descent(DescentOptions::warm_start()))
            })?;
            (log.run("schedule", || rep.best_schedule(cfg.p))?, Some(rep))
        }
    };
    let state = log.run("state", || Ansatz::new(h, cfg.mixer, expm)?.state(&schedule))?;
    let (metrics, solution) = score(inst, Prepared::State(&state), oracles, cfg.tie_threshold, &mut log)?;
    let (stages, timings_ms) = log.into_parts();
    Ok(BaselineRecord {
        method: cfg.method.name().into(),
        mixer: cfg.mixer,
        p: cfg.p,
        k: inst.k,
        seed: cfg.seed,
        n: inst.graph.n(),
        n_qubits: inst.n_qubits(),
        schedule: (&schedule).into(),
        energy: metrics.energy,
        e_min: metrics.e_min,
        cut: metrics.cut,
        c_opt: metrics.c_opt,
        certified: metrics.certified_c_opt,
        alpha_r: metrics.alpha_r,
        alpha_c: metrics.alpha_c,
        ties: solution.ties.clone(),
        solution: solution_string(&solution),
        report: report.map(|r| TuneReportJson::new(&r, cfg.mixer, cfg.p)),
        stages,
        timings_ms,
    })
}
