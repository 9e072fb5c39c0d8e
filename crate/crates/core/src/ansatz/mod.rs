//! Alternating cost/mixer ansatz on the relaxed Hamiltonian, linear angle
//! schedules and the three parameter-setting procedures: linear-schedule
//! tuning, random-initialization descent and warm-started fine-tuning.

pub mod simplex;

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::encoding::Observable;
use crate::engine::{self, CompiledObservable, Mixer, Statevector};
use crate::linalg::ExpmOptions;
use crate::seed;
use crate::{Error, Result};

use simplex::{nelder_mead, Evaluator, SimplexOptions};

/// Four-parameter linear schedule `angle_l = slope * l / p + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinxferParams {
    pub gamma_slope: f64,
    pub gamma_int: f64,
    pub beta_slope: f64,
    pub beta_int: f64,
}

impl LinxferParams {
    pub fn to_array(self) -> [f64; 4] {
        [self.gamma_slope, self.gamma_int, self.beta_slope, self.beta_int]
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        match *x {
            [gamma_slope, gamma_int, beta_slope, beta_int] => {
                let p = Self {
                    gamma_slope,
                    gamma_int,
                    beta_slope,
                    beta_int,
                };
                if p.to_array().iter().all(|v| v.is_finite()) {
                    Ok(p)
                } else {
                    Err(Error::InvalidArgument("non-finite schedule parameter".into()))
                }
            }
            _ => Err(Error::InvalidArgument(alloc::format!(
                "expected 4 schedule parameters, got {}",
                x.len()
            ))),
        }
    }
}

/// Per-layer angles `(gamma_l, beta_l)` for `l = 1..=p`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSchedule {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl AngleSchedule {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "schedule needs p >= 1 equal-length angle lists (got {} and {})",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    /// Flat layout `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument("flat schedule must have even length".into()));
        }
        let p = x.len() / 2;
        Self::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Appends one layer.
    pub fn push(&mut self, gamma: f64, beta: f64) {
        self.gammas.push(gamma);
        self.betas.push(beta);
    }
}

/// Expands linear parameters into `p` layers with `l` running from 1 to `p`.
pub fn expand_schedule(lp: &LinxferParams, p: usize) -> Result<AngleSchedule> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let frac = |l: usize| l as f64 / p as f64;
    AngleSchedule::new(
        (1..=p).map(|l| lp.gamma_slope * frac(l) + lp.gamma_int).collect(),
        (1..=p).map(|l| lp.beta_slope * frac(l) + lp.beta_int).collect(),
    )
}

/// Cost Hamiltonian and mixer, compiled once for repeated state preparation.
#[derive(Debug, Clone)]
pub struct Ansatz {
    cost: CompiledObservable,
    mixer: Mixer,
    expm: ExpmOptions,
}

impl Ansatz {
    pub fn new(h_cost: &Observable, mixer: Mixer, expm: ExpmOptions) -> Result<Self> {
        Ok(Self {
            cost: CompiledObservable::new(h_cost)?,
            mixer,
            expm,
        })
    }

    pub fn cost(&self) -> &CompiledObservable {
        &self.cost
    }

    pub fn mixer(&self) -> Mixer {
        self.mixer
    }

    /// Initial state followed by `p` layers of cost exponential then mixer.
    pub fn state(&self, sched: &AngleSchedule) -> Result<Statevector> {
        let mut psi = engine::prepare_initial_state(self.cost.n_qubits(), self.mixer)?;
        for (&gamma, &beta) in sched.gammas.iter().zip(&sched.betas) {
            psi = engine::expm_apply_compiled(&self.cost, gamma, &psi, &self.expm)?;
            engine::apply_single_pauli_mixer_in_place(self.mixer, beta, &mut psi);
        }
        Ok(psi)
    }

    pub fn energy(&self, sched: &AngleSchedule) -> Result<f64> {
        self.cost.expectation(&self.state(sched)?)
    }
}

pub fn prepare_state(
    h_cost: &Observable,
    mixer: Mixer,
    sched: &AngleSchedule,
    tol: f64,
) -> Result<Statevector> {
    let expm = ExpmOptions {
        tol,
        ..ExpmOptions::default()
    };
    Ansatz::new(h_cost, mixer, expm)?.state(sched)
}

/// How the flat parameter vectors in a [`TuneReport`] are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamLayout {
    /// `[gamma_slope, gamma_int, beta_slope, beta_int]`
    Linear,
    /// `[gamma_1..gamma_p, beta_1..beta_p]`
    Layered { p: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneReport {
    pub layout: ParamLayout,
    pub best_params: Vec<f64>,
    pub best_objective: f64,
    pub evaluations: usize,
    pub trace: Vec<(Vec<f64>, f64)>,
}

impl TuneReport {
    fn from_trace(layout: ParamLayout, trace: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let (best_params, best_objective) = trace
            .iter()
            .fold(None, |acc: Option<(&Vec<f64>, f64)>, (x, f)| match acc {
                Some((_, bf)) if bf <= *f => acc,
                _ => Some((x, *f)),
            })
            .map(|(x, f)| (x.clone(), f))
            .ok_or_else(|| Error::InvalidArgument("no objective evaluations".into()))?;
        Ok(Self {
            layout,
            best_params,
            best_objective,
            evaluations: trace.len(),
            trace,
        })
    }

    pub fn best_linear(&self) -> Option<LinxferParams> {
        match self.layout {
            ParamLayout::Linear => LinxferParams::from_slice(&self.best_params).ok(),
            ParamLayout::Layered { .. } => None,
        }
    }

    /// Best angles as a per-layer schedule; linear results are expanded
    /// with the supplied `p`.
    pub fn best_schedule(&self, p: usize) -> Result<AngleSchedule> {
        match self.layout {
            ParamLayout::Linear => expand_schedule(&LinxferParams::from_slice(&self.best_params)?, p),
            ParamLayout::Layered { .. } => AngleSchedule::from_flat(&self.best_params),
        }
    }

    /// Running minimum of the trace objective.
    pub fn running_best(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |best, (_, f)| {
                *best = best.min(*f);
                Some(*best)
            })
            .collect()
    }
}

/// Search box for `[gamma_slope, gamma_int, beta_slope, beta_int]`,
/// `[-pi, pi]` per coordinate.
pub const LINEAR_BOX: [(f64, f64); 4] = [(-PI, PI); 4];

/// Box the initial design is drawn from. The single-Pauli mixers are
/// `pi`-periodic in beta up to a global phase, so the beta range loses
/// nothing; the gamma range keeps the design in the small-angle region
/// where most of the large box is rugged and poor.
pub const DESIGN_BOX: [(f64, f64); 4] = [(-1.0, 1.0), (-1.0, 1.0), (-PI / 2.0, PI / 2.0), (-PI / 2.0, PI / 2.0)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneOptions {
    pub expm: ExpmOptions,
    pub bounds: [(f64, f64); 4],
    pub design_box: [(f64, f64); 4],
    /// Cap on the random design size (the design uses
    /// `min(budget / 3, max_design)` points).
    pub max_design: usize,
    /// Local descents started from the best design points before the
    /// remaining budget refines the overall best.
    pub starts: usize,
    pub simplex: SimplexOptions,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            expm: ExpmOptions::default(),
            bounds: LINEAR_BOX,
            design_box: DESIGN_BOX,
            max_design: 64,
            starts: 3,
            simplex: SimplexOptions {
                initial_step: 0.4,
                xtol: 1e-5,
                ftol: 1e-9,
            },
        }
    }
}

pub const MIN_TUNE_BUDGET: usize = 16;
pub const DEFAULT_TUNE_BUDGET: usize = 300;
pub const DEFAULT_BASELINE_BUDGET: usize = 500;

fn latin_hypercube(points: usize, bounds: &[(f64, f64)], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed);
    let mut design = alloc::vec![alloc::vec![0.0; bounds.len()]; points];
    for (d, &(lo, hi)) in bounds.iter().enumerate() {
        let mut strata: Vec<usize> = (0..points).collect();
        strata.shuffle(&mut rng);
        for (row, s) in design.iter_mut().zip(strata) {
            let u = (s as f64 + rng.gen::<f64>()) / points as f64;
            row[d] = lo + (hi - lo) * u;
        }
    }
    design
}

/// Annealing-like ramps `gamma_l = a * l/p`, `beta_l = b * (l/p - 1)` in
/// both sign conventions, added to every tuning design.
fn annealing_ramps() -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        for a in [0.2, 0.4] {
            for b in [0.4, 0.8] {
                out.push(alloc::vec![sign * a, 0.0, sign * b, -sign * b]);
            }
        }
    }
    out
}

/// Minimizes `<psi(theta)|H|psi(theta)>` over linear parameters in the
/// search box: a few annealing ramps plus a Latin-hypercube design of
/// `min(budget/3, 64)` points from the design box,
/// short Nelder-Mead descents from the three best of them, then descent
/// from the overall best, restarted with a halved step each time it
/// converges, until the budget is spent.
pub fn tune_linxfer(
    h_cost: &Observable,
    mixer: Mixer,
    p: usize,
    budget: usize,
    seed: u64,
) -> Result<TuneReport> {
    tune_linxfer_with(h_cost, mixer, p, budget, seed, &TuneOptions::default())
}

pub fn tune_linxfer_with(
    h_cost: &Observable,
    mixer: Mixer,
    p: usize,
    budget: usize,
    seed: u64,
    opts: &TuneOptions,
) -> Result<TuneReport> {
    if budget < MIN_TUNE_BUDGET {
        return Err(Error::InvalidArgument(alloc::format!(
            "tuning budget must be at least {MIN_TUNE_BUDGET}"
        )));
    }
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    let ansatz = Ansatz::new(h_cost, mixer, opts.expm)?;
    let mut objective = |x: &[f64]| -> Result<f64> {
        ansatz.energy(&expand_schedule(&LinxferParams::from_slice(x)?, p)?)
    };
    let mut ev = Evaluator::new(&mut objective, budget, Some(&opts.bounds[..]));

    let mut design = annealing_ramps();
    design.extend(latin_hypercube((budget / 3).min(opts.max_design).max(1), &opts.design_box, seed));
    let mut scored = Vec::with_capacity(design.len());
    for x in &design {
        if let Some(r) = ev.eval(x)? {
            scored.push(r);
        }
    }
    scored.sort_by(|a, b| a.1.total_cmp(&b.1));

    // short descents from the best design points, then refine the winner
    let starts = opts.starts.min(scored.len());
    for (i, (x0, f0)) in scored.iter().take(starts).enumerate() {
        let cap = ev.remaining() / (starts - i + 1);
        let full = ev.limit(cap);
        nelder_mead(&mut ev, x0, Some(*f0), &opts.simplex)?;
        ev.set_budget(full);
    }
    let mut step = opts.simplex.initial_step;
    while ev.remaining() > 0 {
        let (x0, f0) = {
            let (x, f) = ev.best().expect("design evaluated at least one point");
            (x.to_vec(), f)
        };
        let sopts = SimplexOptions {
            initial_step: step,
            ..opts.simplex
        };
        match nelder_mead(&mut ev, &x0, Some(f0), &sopts)? {
            Some(d) if d.converged => step = (0.5 * step).max(4.0 * opts.simplex.xtol),
            _ => break,
        }
    }
    TuneReport::from_trace(ParamLayout::Linear, ev.trace)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub expm: ExpmOptions,
    pub simplex: SimplexOptions,
}

impl DescentOptions {
    fn with_step(step: f64) -> Self {
        Self {
            expm: ExpmOptions::default(),
            simplex: SimplexOptions {
                initial_step: step,
                xtol: 1e-5,
                ftol: 1e-9,
            },
        }
    }

    /// Defaults for descent from random angles.
    pub fn random_init() -> Self {
        Self::with_step(0.5)
    }

    /// Defaults for descent from a warm start.
    pub fn warm_start() -> Self {
        Self::with_step(0.05)
    }
}

fn layered_descent(
    ansatz: &Ansatz,
    start: &[f64],
    budget: usize,
    simplex: &SimplexOptions,
) -> Result<TuneReport> {
    let p = start.len() / 2;
    let mut objective = |x: &[f64]| -> Result<f64> { ansatz.energy(&AngleSchedule::from_flat(x)?) };
    let mut ev = Evaluator::new(&mut objective, budget, None);
    nelder_mead(&mut ev, start, None, simplex)?;
    TuneReport::from_trace(ParamLayout::Layered { p }, ev.trace)
}

/// Baseline: `2p` angles drawn uniformly from `[-pi, pi]`, then local
/// simplex descent on all of them (stops on convergence or budget).
pub fn optimize_random_init(
    h_cost: &Observable,
    mixer: Mixer,
    p: usize,
    budget: usize,
    seed: u64,
) -> Result<TuneReport> {
    optimize_random_init_with(h_cost, mixer, p, budget, seed, &DescentOptions::random_init())
}

pub fn optimize_random_init_with(
    h_cost: &Observable,
    mixer: Mixer,
    p: usize,
    budget: usize,
    seed: u64,
    opts: &DescentOptions,
) -> Result<TuneReport> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be at least 1".into()));
    }
    if budget < 2 * p + 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "budget must be at least 2p + 2 = {}",
            2 * p + 2
        )));
    }
    let mut rng = seed::rng(seed);
    let start: Vec<f64> = (0..2 * p).map(|_| rng.gen_range(-PI..=PI)).collect();
    let ansatz = Ansatz::new(h_cost, mixer, opts.expm)?;
    layered_descent(&ansatz, &start, budget, &opts.simplex)
}

/// Warm start from an expanded linear schedule, then unconstrained descent
/// on all `2p` angles. The first trace entry is the start point itself.
pub fn fine_tune(
    h_cost: &Observable,
    mixer: Mixer,
    p: usize,
    start: &LinxferParams,
    budget: usize,
) -> Result<TuneReport> {
    fine_tune_with(h_cost, mixer, p, start, budget, &DescentOptions::warm_start())
}

pub fn fine_tune_with(
    h_cost: &Observable,
    mixer: Mixer,
    p: usize,
    start: &LinxferParams,
    budget: usize,
    opts: &DescentOptions,
) -> Result<TuneReport> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be positive".into()));
    }
    let sched = expand_schedule(&LinxferParams::from_slice(&start.to_array())?, p)?;
    let ansatz = Ansatz::new(h_cost, mixer, opts.expm)?;
    layered_descent(&ansatz, &sched.to_flat(), budget, &opts.simplex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_encoding, build_relaxed_hamiltonian, PauliAxis};
    use crate::graph::{greedy_coloring, Graph};
    use crate::Complex64;
    use alloc::vec;
    use nalgebra::{DMatrix, DVector};

    fn edge_hamiltonian(k: usize) -> Observable {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let m = build_encoding(&g, &greedy_coloring(&g), k).unwrap();
        build_relaxed_hamiltonian(&g, &m).unwrap()
    }

    fn dense(h: &Observable) -> DMatrix<Complex64> {
        let dim = 1usize << h.n_qubits();
        DMatrix::from_row_slice(dim, dim, &h.to_dense().unwrap())
    }

    /// `exp(-i t H)` through a full eigendecomposition.
    fn dense_propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
        let eig = h.clone().symmetric_eigen();
        let phases = DMatrix::from_diagonal(&DVector::from_iterator(
            h.nrows(),
            eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -t * l)),
        ));
        &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
    }

    #[test]
    fn expansion_examples() {
        let flat = LinxferParams::from_slice(&[0.0, 0.7, 0.0, -0.3]).unwrap();
        let s = expand_schedule(&flat, 5).unwrap();
        assert!(s.gammas().iter().all(|&g| g == 0.7));
        assert!(s.betas().iter().all(|&b| b == -0.3));

        let ramp = LinxferParams::from_slice(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(expand_schedule(&ramp, 2).unwrap().gammas(), &[0.5, 1.0]);

        let lp = LinxferParams::from_slice(&[0.4, 0.1, -0.2, 0.3]).unwrap();
        let one = expand_schedule(&lp, 1).unwrap();
        assert_eq!(one.gammas(), &[0.4 + 0.1]);
        assert_eq!(one.betas(), &[-0.2 + 0.3]);
        assert!(expand_schedule(&lp, 0).is_err());
        assert!(LinxferParams::from_slice(&[0.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn expansion_is_affine() {
        let lp = LinxferParams::from_slice(&[0.25, -0.5, 0.75, 0.125]).unwrap();
        let a = 2.0;
        let scaled = LinxferParams::from_slice(&lp.to_array().map(|v| a * v)).unwrap();
        let base = expand_schedule(&lp, 6).unwrap();
        let big = expand_schedule(&scaled, 6).unwrap();
        for l in 0..6 {
            assert_eq!(big.gammas()[l], a * base.gammas()[l]);
            assert_eq!(big.betas()[l], a * base.betas()[l]);
        }
    }

    #[test]
    fn zero_angles_leave_the_initial_state() {
        let h = edge_hamiltonian(3);
        for mixer in PauliAxis::ALL {
            let sched = AngleSchedule::new(vec![0.0; 3], vec![0.0; 3]).unwrap();
            let psi = prepare_state(&h, mixer, &sched, 1e-12).unwrap();
            let init = engine::prepare_initial_state(2, mixer).unwrap();
            assert!((psi.inner(&init).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_layer_matches_dense_circuit() {
        let h = edge_hamiltonian(3);
        let (gamma, beta) = (0.3, 0.2);
        let sched = AngleSchedule::new(vec![gamma], vec![beta]).unwrap();
        let psi = prepare_state(&h, PauliAxis::X, &sched, 1e-12).unwrap();

        let (c, s) = (beta.cos(), beta.sin());
        let rx = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::new(0.0, -s),
                Complex64::new(0.0, -s),
                Complex64::new(c, 0.0),
            ],
        );
        let mixer = rx.kronecker(&rx);
        let plus = DVector::from_element(4, Complex64::new(0.5, 0.0));
        let expected = mixer * dense_propagator(&dense(&h), gamma) * plus;
        for (a, b) in psi.amplitudes().iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn identity_layer_changes_nothing() {
        let h = edge_hamiltonian(3);
        let mut sched = AngleSchedule::new(vec![0.3, -0.6], vec![0.2, 0.9]).unwrap();
        let ansatz = Ansatz::new(&h, PauliAxis::Y, ExpmOptions::default()).unwrap();
        let before = ansatz.energy(&sched).unwrap();
        sched.push(0.0, 0.0);
        assert!((ansatz.energy(&sched).unwrap() - before).abs() < 1e-12);
    }

    #[test]
    fn states_stay_normalized() {
        let h = edge_hamiltonian(3);
        let sched = AngleSchedule::new(vec![2.5, -3.0, 1.0], vec![0.4, 2.2, -1.7]).unwrap();
        for mixer in PauliAxis::ALL {
            let psi = prepare_state(&h, mixer, &sched, 1e-10).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn tuning_reaches_the_edge_ground_energy() {
        // X0 X1 commutes with the X mixer and |++> is its +1 eigenstate, so
        // the X ansatz is stuck at +1 here; Y and Z mixers are not.
        let h = edge_hamiltonian(3);
        let stuck = tune_linxfer(&h, PauliAxis::X, 3, 40, 11).unwrap();
        assert!((stuck.best_objective - 1.0).abs() < 1e-9);
        for mixer in [PauliAxis::Y, PauliAxis::Z] {
            check_tuned_edge(&h, mixer);
        }
    }

    fn check_tuned_edge(h: &Observable, mixer: Mixer) {
        let report = tune_linxfer(h, mixer, 3, 200, 11).unwrap();
        assert!(report.evaluations <= 200);
        assert!(report.best_objective >= -2.0 - 1e-9);
        assert!(report.best_objective < -2.0 + 0.05, "{}", report.best_objective);
        let rb = report.running_best();
        assert!(rb.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*rb.last().unwrap(), report.best_objective);
        let sched = report.best_schedule(3).unwrap();
        let e = Ansatz::new(h, mixer, ExpmOptions::default())
            .unwrap()
            .energy(&sched)
            .unwrap();
        assert_eq!(e, report.best_objective);
    }

    #[test]
    fn tuning_is_deterministic_and_bounded() {
        let h = edge_hamiltonian(3);
        let a = tune_linxfer(&h, PauliAxis::Z, 2, 40, 5).unwrap();
        let b = tune_linxfer(&h, PauliAxis::Z, 2, 40, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.evaluations <= 40);
        for (x, _) in &a.trace {
            assert!(x.iter().all(|v| (-PI..=PI).contains(v)));
        }
        assert!(tune_linxfer(&h, PauliAxis::Z, 2, MIN_TUNE_BUDGET - 1, 5).is_err());
    }

    #[test]
    fn random_init_descends() {
        let h = edge_hamiltonian(3);
        let r = optimize_random_init(&h, PauliAxis::X, 1, 300, 3).unwrap();
        assert!(r.evaluations <= 300);
        assert!(r.best_objective <= r.trace[0].1);
        assert_eq!(r, optimize_random_init(&h, PauliAxis::X, 1, 300, 3).unwrap());
        assert!(optimize_random_init(&h, PauliAxis::X, 2, 5, 3).is_err());
    }

    #[test]
    fn random_init_finds_ising_optimum() {
        let h = edge_hamiltonian(1);
        let ansatz = Ansatz::new(&h, PauliAxis::X, ExpmOptions::default()).unwrap();
        // grid oracle over one layer
        let steps = 80;
        let mut grid_best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let g = -PI + 2.0 * PI * i as f64 / steps as f64;
                let b = -PI + 2.0 * PI * j as f64 / steps as f64;
                let sched = AngleSchedule::new(vec![g], vec![b]).unwrap();
                grid_best = grid_best.min(ansatz.energy(&sched).unwrap());
            }
        }
        assert!((grid_best + 1.0).abs() < 0.01);
        let r = optimize_random_init(&h, PauliAxis::X, 1, 300, 8).unwrap();
        assert!((r.best_objective + 1.0).abs() < 0.05, "{}", r.best_objective);
    }

    #[test]
    fn fine_tune_starts_from_the_linear_schedule() {
        let h = edge_hamiltonian(3);
        let start = LinxferParams::from_slice(&[0.5, 0.2, -0.4, 0.6]).unwrap();
        let tiny = fine_tune(&h, PauliAxis::X, 3, &start, 1).unwrap();
        let expanded = expand_schedule(&start, 3).unwrap();
        assert_eq!(tiny.evaluations, 1);
        assert_eq!(tiny.best_params, expanded.to_flat());

        let full = fine_tune(&h, PauliAxis::X, 3, &start, 150).unwrap();
        assert_eq!(full.trace[0].0, expanded.to_flat());
        assert!(full.best_objective <= full.trace[0].1);
        assert!(full.evaluations <= 150);
        assert_eq!(full.best_schedule(3).unwrap().p(), 3);
    }
}
