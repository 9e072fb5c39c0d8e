use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sqoa::io::{self, LinxferJson, ObservableJson, TransferEntry, TransferFile, TuneReportJson, TuneSource};
use sqoa::pipeline::{
    self, compute_oracles, BaselineConfig, Instance, Method, OracleMode, RunConfig, StageLog, SubspaceSource,
};
use sqoa::sweep::{self, SweepMethod, SweepGrid};
use sqoa_core::ansatz::{self, LinxferParams};
use sqoa_core::encoding::PauliAxis;
use sqoa_core::graph::{generate_regular_graph, Graph};
use sqoa_core::seed::Stream;

/// Sampling-based quantum relaxation solver for MaxCut.
#[derive(Parser)]
#[command(name = "sqoa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random regular instances as edge-list files.
    Gen(GenArgs),
    /// Tune linear-schedule parameters on one instance and store them.
    Tune(TuneArgs),
    /// Run the full solver on one instance and print a JSON record.
    Solve(SolveArgs),
    /// Run a baseline parameter-setting procedure on one instance.
    Baseline(BaselineArgs),
    /// Compute the relaxed ground energy and the best cut.
    Exact(ExactArgs),
    /// Run a grid of experiments and write CSV.
    Sweep(SweepArgs),
}

/// Comma-separated integers; items may be ranges `a..b` or `2^a..2^b`
/// (both inclusive).
#[derive(Debug, Clone)]
struct IntList(Vec<usize>);

impl FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad integer `{t}`"));
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once("..") {
                None => match item.strip_prefix("2^") {
                    Some(e) => out.push(pow2(num(e)?)?),
                    None => out.push(num(item)?),
                },
                Some((a, b)) => match (a.trim().strip_prefix("2^"), b.trim().strip_prefix("2^")) {
                    (Some(a), Some(b)) => {
                        for e in num(a)?..=num(b)? {
                            out.push(pow2(e)?);
                        }
                    }
                    (None, None) => out.extend(num(a)?..=num(b)?),
                    _ => return Err(format!("mixed range `{item}`")),
                },
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(Self(out))
    }
}

fn pow2(e: usize) -> std::result::Result<usize, String> {
    1usize.checked_shl(e as u32).filter(|_| e < 63).ok_or_else(|| format!("2^{e} is too large"))
}

/// Mixer axes as `X,Y,Z` or `XYZ`.
#[derive(Debug, Clone)]
struct MixerList(Vec<PauliAxis>);

impl FromStr for MixerList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let axes = s
            .chars()
            .filter(|c| !matches!(c, ',' | ' '))
            .map(|c| c.to_string().parse::<PauliAxis>().map_err(|e| e.to_string()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if axes.is_empty() {
            return Err("empty mixer list".into());
        }
        Ok(Self(axes))
    }
}

fn parse_axis(s: &str) -> std::result::Result<PauliAxis, String> {
    s.parse().map_err(|e: sqoa_core::Error| e.to_string())
}

fn parse_params(s: &str) -> std::result::Result<LinxferParams, String> {
    let x = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    LinxferParams::from_slice(&x).map_err(|e| e.to_string())
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Edge-list file; otherwise a random regular graph is generated.
    #[arg(long, env = "SQOA_INSTANCE")]
    instance: Option<PathBuf>,
    /// Vertex count of the generated graph.
    #[arg(long, env = "SQOA_N", required_unless_present = "instance")]
    n: Option<usize>,
    #[arg(long, env = "SQOA_DEGREE", default_value_t = 3)]
    degree: usize,
    /// Index of the generated graph among those of the same size and seed.
    #[arg(long, env = "SQOA_INDEX", default_value_t = 0)]
    index: usize,
}

impl InstanceArgs {
    fn load(&self, seed: u64) -> Result<Graph> {
        match (&self.instance, self.n) {
            (Some(path), _) => Ok(io::load_graph(path)?),
            (None, Some(n)) => Ok(generate_regular_graph(n, self.degree, sweep::instance_seed(seed, n, self.index))?),
            (None, None) => bail!("either --instance or --n is required"),
        }
    }

    fn name(&self) -> Option<String> {
        self.instance.as_ref().map(|p| p.display().to_string())
    }
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Transfer file written by `tune`.
    #[arg(long, env = "SQOA_TRANSFER")]
    transfer: Option<PathBuf>,
    /// Inline parameters `gamma_slope,gamma_int,beta_slope,beta_int`.
    #[arg(long, env = "SQOA_PARAMS", value_parser = parse_params, conflicts_with = "transfer")]
    params: Option<LinxferParams>,
}

impl ParamArgs {
    fn resolve(&self, mixer: PauliAxis, p: usize) -> Result<LinxferParams> {
        match (&self.params, &self.transfer) {
            (Some(lp), _) => Ok(*lp),
            (None, Some(path)) => Ok(io::read_json::<TransferFile>(path)?.params(mixer, p)?),
            (None, None) => bail!("either --transfer or --params is required"),
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long, short, env = "SQOA_OUT")]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        emit(self.out.as_deref(), io::to_json_string(value)?.as_bytes())
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            Ok(out.flush()?)
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Vertex counts, e.g. `16,24` or `16..20`.
    #[arg(long, env = "SQOA_N")]
    n: IntList,
    #[arg(long, env = "SQOA_DEGREE", default_value_t = 3)]
    degree: usize,
    /// Instances per vertex count.
    #[arg(long, env = "SQOA_COUNT", default_value_t = 1)]
    count: usize,
    #[arg(long, env = "SQOA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "SQOA_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, env = "SQOA_MIXER", default_value = "X", value_parser = parse_axis)]
    mixer: PauliAxis,
    /// Depths to tune, one transfer entry each.
    #[arg(long, env = "SQOA_P", default_value = "1")]
    p: IntList,
    #[arg(long, env = "SQOA_K", default_value_t = pipeline::DEFAULT_K)]
    k: usize,
    /// Objective evaluations per depth.
    #[arg(long, env = "SQOA_BUDGET", default_value_t = ansatz::DEFAULT_TUNE_BUDGET)]
    budget: usize,
    #[arg(long, env = "SQOA_SEED", default_value_t = 0)]
    seed: u64,
    /// Transfer file to create or update.
    #[arg(long, env = "SQOA_TRANSFER")]
    transfer: PathBuf,
    /// Optional file for the full tuning reports.
    #[arg(long, env = "SQOA_REPORT")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, env = "SQOA_MIXER", default_value = "X", value_parser = parse_axis)]
    mixer: PauliAxis,
    #[arg(long, env = "SQOA_P")]
    p: usize,
    /// Subspace size.
    #[arg(long, env = "SQOA_R")]
    r: usize,
    #[arg(long, env = "SQOA_SHOTS", default_value_t = pipeline::DEFAULT_SHOTS)]
    shots: u64,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, env = "SQOA_K", default_value_t = pipeline::DEFAULT_K)]
    k: usize,
    /// Master seed; every stage seed is derived from it.
    #[arg(long, env = "SQOA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "SQOA_EXPM_TOL", default_value_t = 1e-10)]
    expm_tol: f64,
    #[arg(long, env = "SQOA_EIG_TOL", default_value_t = 1e-8)]
    eig_tol: f64,
    /// Rounding expectations with magnitude at or below this count as ties.
    #[arg(long, env = "SQOA_TIE_THRESHOLD", default_value_t = sqoa_core::decode::DEFAULT_TIE_THRESHOLD)]
    tie_threshold: f64,
    /// `sampled` or `exact-probabilities`.
    #[arg(long, env = "SQOA_SUBSPACE", default_value = "sampled", value_parser = parse_subspace)]
    subspace: SubspaceSource,
    /// `auto`, `certified` or `best-found`.
    #[arg(long, env = "SQOA_ORACLE", default_value = "auto")]
    oracle: OracleMode,
    /// Record wall-clock timings (output is then no longer reproducible).
    #[arg(long, env = "SQOA_TIMINGS")]
    timings: bool,
}

fn parse_subspace(s: &str) -> std::result::Result<SubspaceSource, String> {
    match s {
        "sampled" => Ok(SubspaceSource::Sampled),
        "exact-probabilities" => Ok(SubspaceSource::ExactProbabilities),
        _ => Err(format!("unknown subspace source `{s}` (sampled, exact-probabilities)")),
    }
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// `linxfer`, `random-init` or `fine-tune`.
    #[arg(long, env = "SQOA_METHOD")]
    method: SweepMethod,
    #[arg(long, env = "SQOA_MIXER", default_value = "X", value_parser = parse_axis)]
    mixer: PauliAxis,
    #[arg(long, env = "SQOA_P")]
    p: usize,
    #[arg(long, env = "SQOA_BUDGET", default_value_t = ansatz::DEFAULT_BASELINE_BUDGET)]
    budget: usize,
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, env = "SQOA_K", default_value_t = pipeline::DEFAULT_K)]
    k: usize,
    #[arg(long, env = "SQOA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "SQOA_ORACLE", default_value = "auto")]
    oracle: OracleMode,
    /// Also write the relaxed Hamiltonian as observable JSON.
    #[arg(long, env = "SQOA_HAMILTONIAN")]
    hamiltonian: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, env = "SQOA_N")]
    n: IntList,
    #[arg(long, env = "SQOA_P")]
    p: IntList,
    /// Subspace sizes, e.g. `2^4..2^9`; ignored by the baseline methods.
    #[arg(long, env = "SQOA_R", default_value = "1")]
    r: IntList,
    #[arg(long, env = "SQOA_MIXER", default_value = "X")]
    mixer: MixerList,
    /// Fresh instances per grid cell.
    #[arg(long, env = "SQOA_INSTANCES", default_value_t = 1)]
    instances: usize,
    #[arg(long, env = "SQOA_DEGREE", default_value_t = 3)]
    degree: usize,
    #[arg(long, env = "SQOA_METHOD", default_value = "sqoa")]
    method: SweepMethod,
    #[arg(long, env = "SQOA_TRANSFER")]
    transfer: Option<PathBuf>,
    #[arg(long, env = "SQOA_SHOTS", default_value_t = pipeline::DEFAULT_SHOTS)]
    shots: u64,
    #[arg(long, env = "SQOA_BUDGET", default_value_t = ansatz::DEFAULT_BASELINE_BUDGET)]
    budget: usize,
    #[command(flatten)]
    common: CommonArgs,
    /// Suppress progress messages on standard error.
    #[arg(long, short, env = "SQOA_QUIET")]
    quiet: bool,
    #[command(flatten)]
    out: OutArgs,
}

fn gen(a: GenArgs) -> Result<()> {
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    for &n in &a.n.0 {
        for idx in 0..a.count {
            let g = generate_regular_graph(n, a.degree, sweep::instance_seed(a.seed, n, idx))?;
            let path = a.out_dir.join(format!("rr{}_n{n}_s{}_{idx}.txt", a.degree, a.seed));
            io::save_graph(&path, &g)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn tune(a: TuneArgs) -> Result<()> {
    let g = a.instance.load(a.seed)?;
    let inst = Instance::new(g, a.k)?;
    let mut transfer = TransferFile::load_or_default(&a.transfer)?;
    let mut reports = Vec::new();
    for &p in &a.p.0 {
        let seed = Stream::Tuning.seed(a.seed, p as u64);
        let report = ansatz::tune_linxfer(&inst.hamiltonian, a.mixer, p, a.budget, seed)
            .with_context(|| format!("tuning p = {p}"))?;
        let best = report.best_linear().context("tuning produced no linear parameters")?;
        transfer.upsert(TransferEntry {
            mixer: a.mixer,
            p,
            params: LinxferJson::from(best),
            objective: report.best_objective,
            evaluations: report.evaluations,
            source: TuneSource {
                n: inst.graph.n(),
                k: a.k,
                budget: a.budget,
                seed: a.seed,
                instance: a.instance.name(),
            },
        });
        eprintln!("p = {p}: energy {:.6} after {} evaluations", report.best_objective, report.evaluations);
        reports.push(TuneReportJson::new(&report, a.mixer, p));
    }
    io::write_json(&a.transfer, &transfer)?;
    if let Some(path) = &a.report {
        io::write_json(path, &reports)?;
    }
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let c = &a.common;
    let g = a.instance.load(c.seed)?;
    let cfg = RunConfig {
        shots: a.shots,
        k: c.k,
        seed: c.seed,
        expm_tol: c.expm_tol,
        eig_tol: c.eig_tol,
        tie_threshold: c.tie_threshold,
        subspace: c.subspace,
        oracle: c.oracle,
        timings: c.timings,
        ..RunConfig::new(a.mixer, a.p, a.r, a.params.resolve(a.mixer, a.p)?)
    };
    let record = pipeline::run_sqoa(&g, &cfg)?;
    for w in &record.warnings {
        eprintln!("warning: {w}");
    }
    a.out.json(&record)
}

fn baseline(a: BaselineArgs) -> Result<()> {
    let c = &a.common;
    let g = a.instance.load(c.seed)?;
    let inst = Instance::new(g, c.k)?;
    let oracles = compute_oracles(&inst, c.oracle, c.seed, &mut StageLog::default())?;
    let method = match a.method {
        SweepMethod::Linxfer => Method::Linxfer(a.params.resolve(a.mixer, a.p)?),
        SweepMethod::RandomInit => Method::RandomInit { budget: a.budget },
        SweepMethod::FineTune => Method::FineTune {
            start: a.params.resolve(a.mixer, a.p)?,
            budget: a.budget,
        },
        SweepMethod::Sqoa => bail!("use `solve` for the subspace method"),
    };
    let cfg = BaselineConfig {
        method,
        mixer: a.mixer,
        p: a.p,
        seed: c.seed,
        expm_tol: c.expm_tol,
        tie_threshold: c.tie_threshold,
        timings: c.timings,
    };
    a.out.json(&pipeline::run_baseline(&inst, &oracles, &cfg)?)
}

#[derive(Serialize)]
struct ExactRecord {
    n: usize,
    num_edges: usize,
    k: usize,
    n_qubits: usize,
    e_min: f64,
    c_opt: usize,
    certified: bool,
    /// `e_min / -c_opt`; at least 1 because the relaxation is a lower bound.
    relaxation_ratio: f64,
}

fn exact(a: ExactArgs) -> Result<()> {
    let g = a.instance.load(a.seed)?;
    let inst = Instance::new(g, a.k)?;
    if let Some(path) = &a.hamiltonian {
        io::write_json(path, &ObservableJson::from(&inst.hamiltonian))?;
    }
    let o = compute_oracles(&inst, a.oracle, a.seed, &mut StageLog::default())?;
    a.out.json(&ExactRecord {
        n: inst.graph.n(),
        num_edges: inst.graph.num_edges(),
        k: a.k,
        n_qubits: inst.n_qubits(),
        e_min: o.e_min,
        c_opt: o.c_opt,
        certified: o.certified,
        relaxation_ratio: if o.c_opt == 0 { 1.0 } else { -o.e_min / o.c_opt as f64 },
    })
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    let c = &a.common;
    let transfer = a.transfer.as_deref().map(io::read_json::<TransferFile>).transpose()?;
    let grid = SweepGrid {
        ns: a.n.0,
        ps: a.p.0,
        rs: a.r.0,
        mixers: a.mixer.0,
        instances: a.instances,
        degree: a.degree,
        k: c.k,
        shots: a.shots,
        seed: c.seed,
        method: a.method,
        transfer,
        budget: a.budget,
        subspace: c.subspace,
        oracle: c.oracle,
        expm_tol: c.expm_tol,
        eig_tol: c.eig_tol,
        tie_threshold: c.tie_threshold,
        timings: c.timings,
    };
    let quiet = a.quiet;
    let rows = sweep::run_sweep(&grid, |msg| {
        if !quiet {
            eprintln!("{msg}");
        }
    })?;
    let mut buf = Vec::new();
    sweep::write_csv(&rows, &mut buf)?;
    emit(a.out.out.as_deref(), &buf)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Tune(a) => tune(a),
        Command::Solve(a) => solve(a),
        Command::Baseline(a) => baseline(a),
        Command::Exact(a) => exact(a),
        Command::Sweep(a) => run_sweep(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_lists_expand_ranges() {
        let l = |s: &str| s.parse::<IntList>().map(|l| l.0);
        assert_eq!(l("2..6").unwrap(), [2, 3, 4, 5, 6]);
        assert_eq!(l("2^4..2^6,3").unwrap(), [16, 32, 64, 3]);
        assert_eq!(l("40").unwrap(), [40]);
        assert_eq!(l("2^9").unwrap(), [512]);
        assert!(l("2^3..5").is_err());
        assert!(l("").is_err());
        assert!(l("x").is_err());
    }

    #[test]
    fn mixer_lists_accept_both_spellings() {
        assert_eq!("X,Z".parse::<MixerList>().unwrap().0, [PauliAxis::X, PauliAxis::Z]);
        assert_eq!("XYZ".parse::<MixerList>().unwrap().0, PauliAxis::ALL);
        assert!("Q".parse::<MixerList>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
