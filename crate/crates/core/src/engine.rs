//! Matrix-free statevector numerics.
//!
//! Qubit `q` is bit `q` of the basis index (qubit 0 is least significant);
//! bitstrings are printed most-significant qubit first.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // Float is redundant when std is linked
use num_traits::{Float, Zero};
use rand::Rng;

use crate::encoding::{Observable, PauliAxis, PauliString};
use crate::linalg::{self, ExpmOptions, HermitianOperator, LanczosOptions};
use crate::seed;
use crate::{Error, Result};

type C64 = Complex64;

/// Mixer Hamiltonians are uniform single-Pauli sums, identified by axis.
pub type Mixer = PauliAxis;

/// Widest register a statevector may hold.
pub const MAX_STATE_QUBITS: usize = 30;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let v = Self::unchecked(n_qubits, amps)?;
        let nrm = linalg::norm(&v.amps);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(alloc::format!(
                "statevector norm {nrm} differs from 1"
            )));
        }
        Ok(v)
    }

    /// Wraps and rescales amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<C64>) -> Result<Self> {
        let nrm = linalg::norm(&amps);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        linalg::scale(1.0 / nrm, &mut amps);
        Self::unchecked(n_qubits, amps)
    }

    fn unchecked(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::TooLarge {
                what: "statevector",
                size: n_qubits,
                max: MAX_STATE_QUBITS,
            });
        }
        if amps.len() != 1usize << n_qubits {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} amplitudes do not match {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        let mut amps = vec![C64::zero(); 1usize << n_qubits.min(MAX_STATE_QUBITS)];
        let slot = amps
            .get_mut(index as usize)
            .ok_or_else(|| Error::InvalidArgument("basis index out of range".into()))?;
        *slot = C64::new(1.0, 0.0);
        Self::unchecked(n_qubits, amps)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Statevector) -> Result<C64> {
        check_width(self.n_qubits, other.n_qubits)?;
        Ok(linalg::dot(&self.amps, &other.amps))
    }

    /// Multiplies by a global phase `e^{i phi}`.
    pub fn with_global_phase(mut self, phi: f64) -> Self {
        let p = C64::from_polar(1.0, phi);
        self.amps.iter_mut().for_each(|a| *a *= p);
        self
    }
}

/// Formats a basis index as a bitstring, most significant qubit first.
pub fn bitstring(index: u64, n_qubits: usize) -> String {
    (0..n_qubits)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Result<u64> {
    if s.is_empty() || s.len() > 64 {
        return Err(Error::InvalidArgument(alloc::format!("bad bitstring {s:?}")));
    }
    s.chars().try_fold(0u64, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidArgument(alloc::format!("bad bitstring {s:?}"))),
    })
}

fn check_width(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::WidthMismatch { expected, found })
    }
}

/// Observable preprocessed for repeated matrix-vector products: the
/// diagonal (offset plus `Z`-type terms) is tabulated once and the remaining
/// terms are grouped by their X mask.
#[derive(Debug, Clone)]
pub struct CompiledObservable {
    n_qubits: usize,
    diag: Vec<f64>,
    groups: Vec<(usize, Vec<(u64, C64)>)>,
}

impl CompiledObservable {
    pub fn new(h: &Observable) -> Result<Self> {
        let n = h.n_qubits();
        if n > MAX_STATE_QUBITS {
            return Err(Error::TooLarge {
                what: "statevector",
                size: n,
                max: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let mut diag = vec![h.offset(); dim];
        let mut groups: BTreeMap<u64, Vec<(u64, C64)>> = BTreeMap::new();
        for (c, s) in h.terms() {
            if s.x_mask() == 0 {
                let z = s.z_mask();
                for (b, d) in diag.iter_mut().enumerate() {
                    if (b as u64 & z).count_ones() % 2 == 1 {
                        *d -= c;
                    } else {
                        *d += c;
                    }
                }
            } else {
                groups
                    .entry(s.x_mask())
                    .or_default()
                    .push((s.z_mask(), s.y_phase() * *c));
            }
        }
        Ok(Self {
            n_qubits: n,
            diag,
            groups: groups.into_iter().map(|(x, t)| (x as usize, t)).collect(),
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn expectation(&self, v: &Statevector) -> Result<f64> {
        check_width(self.n_qubits, v.n_qubits)?;
        let mut hv = vec![C64::zero(); v.dim()];
        self.apply(&v.amps, &mut hv);
        let e = linalg::dot(&v.amps, &hv);
        if e.im.abs() > 1e-10 * e.re.abs().max(1.0) {
            return Err(Error::Domain(alloc::format!(
                "expectation has imaginary part {:e}",
                e.im
            )));
        }
        Ok(e.re)
    }
}

impl HermitianOperator for CompiledObservable {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for ((yb, xb), d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yb = xb * d;
        }
        for (xm, terms) in &self.groups {
            let xm = *xm;
            // y[b] += sum_t c_t (-1)^{|c & z_t|} x[c],  c = b ^ xm
            if let [(z, c)] = terms.as_slice() {
                let z = *z as usize;
                let mask = x.len() - 1;
                // coefficients of the relaxed Hamiltonian are real or
                // imaginary; both cases stay branch-free here
                let (cr, ci) = (c.re, c.im);
                for (b, yb) in y.iter_mut().enumerate() {
                    let col = (b ^ xm) & mask;
                    let xv = x[col];
                    let s = sign(col & z);
                    yb.re += s * (xv.re * cr - xv.im * ci);
                    yb.im += s * (xv.re * ci + xv.im * cr);
                }
            } else {
                for (b, yb) in y.iter_mut().enumerate() {
                    let col = b ^ xm;
                    let coeff: C64 = terms.iter().map(|&(z, c)| c * sign(col & z as usize)).sum();
                    *yb += coeff * x[col];
                }
            }
        }
    }
}

/// `(-1)^{popcount(v)}` without relying on a hardware popcount.
#[inline(always)]
fn sign(mut v: usize) -> f64 {
    v ^= v >> 32;
    v ^= v >> 16;
    v ^= v >> 8;
    v ^= v >> 4;
    v ^= v >> 2;
    v ^= v >> 1;
    1.0 - 2.0 * (v & 1) as f64
}

/// Initial state matched to the mixer: `|+>`, `|i>` or `|0>` on every qubit.
pub fn prepare_initial_state(n_qubits: usize, mixer: Mixer) -> Result<Statevector> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    if n_qubits > MAX_STATE_QUBITS {
        return Err(Error::TooLarge {
            what: "statevector",
            size: n_qubits,
            max: MAX_STATE_QUBITS,
        });
    }
    let dim = 1usize << n_qubits;
    let amps = match mixer {
        PauliAxis::Z => {
            let mut a = vec![C64::zero(); dim];
            a[0] = C64::new(1.0, 0.0);
            a
        }
        PauliAxis::X => vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim],
        PauliAxis::Y => {
            // (|0> + i|1>)^n / 2^{n/2}: amplitude i^{popcount(b)}
            let s = (dim as f64).sqrt().recip();
            (0..dim)
                .map(|b| match b.count_ones() % 4 {
                    0 => C64::new(s, 0.0),
                    1 => C64::new(0.0, s),
                    2 => C64::new(-s, 0.0),
                    _ => C64::new(0.0, -s),
                })
                .collect()
        }
    };
    Statevector::unchecked(n_qubits, amps)
}

/// `(offset + sum_k c_k P_k) |v>` (unnormalized).
pub fn apply_observable(h: &Observable, v: &Statevector) -> Result<Vec<C64>> {
    check_width(h.n_qubits(), v.n_qubits)?;
    let op = CompiledObservable::new(h)?;
    let mut out = vec![C64::zero(); v.dim()];
    op.apply(&v.amps, &mut out);
    Ok(out)
}

/// Applies a single Pauli string to a vector.
pub fn apply_pauli(s: &PauliString, v: &Statevector) -> Result<Statevector> {
    check_width(s.width(), v.n_qubits)?;
    let mut out = vec![C64::zero(); v.dim()];
    let xm = s.x_mask() as usize;
    for (b, a) in v.amps.iter().enumerate() {
        out[b ^ xm] = s.phase_on(b as u64) * a;
    }
    Statevector::unchecked(v.n_qubits, out)
}

/// Real part of `<v|H|v>`.
pub fn expectation(h: &Observable, v: &Statevector) -> Result<f64> {
    check_width(h.n_qubits(), v.n_qubits)?;
    CompiledObservable::new(h)?.expectation(v)
}

/// `<v|P|v>` for a single Pauli string.
pub fn pauli_expectation(s: &PauliString, v: &Statevector) -> Result<f64> {
    check_width(s.width(), v.n_qubits)?;
    let xm = s.x_mask() as usize;
    let mut acc = C64::zero();
    for (b, a) in v.amps.iter().enumerate() {
        acc += v.amps[b ^ xm].conj() * s.phase_on(b as u64) * a;
    }
    Ok(acc.re)
}

/// `exp(-i t H) |v>` by Krylov projection; see [`linalg::krylov_expm`].
pub fn expm_apply(h: &Observable, t: f64, v: &Statevector, opts: &ExpmOptions) -> Result<Statevector> {
    check_width(h.n_qubits(), v.n_qubits)?;
    expm_apply_compiled(&CompiledObservable::new(h)?, t, v, opts)
}

pub fn expm_apply_compiled(
    h: &CompiledObservable,
    t: f64,
    v: &Statevector,
    opts: &ExpmOptions,
) -> Result<Statevector> {
    check_width(h.n_qubits, v.n_qubits)?;
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let out = linalg::krylov_expm(h, t, &v.amps, opts)?;
    Statevector::normalized(v.n_qubits, out)
}

/// `prod_q exp(-i beta P_q) |v>`; single-qubit factors commute, so this is
/// exact.
pub fn apply_single_pauli_mixer(mixer: Mixer, beta: f64, v: &Statevector) -> Statevector {
    let mut out = v.clone();
    apply_single_pauli_mixer_in_place(mixer, beta, &mut out);
    out
}

pub fn apply_single_pauli_mixer_in_place(mixer: Mixer, beta: f64, v: &mut Statevector) {
    if beta == 0.0 {
        return;
    }
    let (s, c) = beta.sin_cos();
    let dim = v.dim();
    let amps = &mut v.amps;
    for q in 0..v.n_qubits {
        let bit = 1usize << q;
        for b0 in (0..dim).filter(|b| b & bit == 0) {
            let b1 = b0 | bit;
            let (a0, a1) = (amps[b0], amps[b1]);
            let (n0, n1) = match mixer {
                // cos I - i sin X
                PauliAxis::X => (
                    a0 * c + a1 * C64::new(0.0, -s),
                    a0 * C64::new(0.0, -s) + a1 * c,
                ),
                // cos I - i sin Y = [[c, -s], [s, c]]
                PauliAxis::Y => (a0 * c - a1 * s, a0 * s + a1 * c),
                // cos I - i sin Z = diag(e^{-i beta}, e^{i beta})
                PauliAxis::Z => (a0 * C64::new(c, -s), a1 * C64::new(c, s)),
            };
            amps[b0] = n0;
            amps[b1] = n1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundOptions {
    pub lanczos: LanczosOptions,
    /// Refuse registers wider than this.
    pub max_qubits: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        Self {
            lanczos: LanczosOptions::default(),
            max_qubits: 20,
        }
    }
}

/// Random unit vector with i.i.d. uniform components in the unit square.
pub fn random_vector(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = seed::rng(seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let nrm = linalg::norm(&v);
    linalg::scale(1.0 / nrm, &mut v);
    v
}

/// Smallest eigenvalue of `h` and a unit eigenvector (restarted Lanczos
/// with full reorthogonalization from a seeded random start).
pub fn lanczos_ground(h: &Observable, seed: u64, opts: &GroundOptions) -> Result<(f64, Statevector)> {
    let n = h.n_qubits();
    if n > opts.max_qubits {
        return Err(Error::TooLarge {
            what: "Lanczos ground state",
            size: n,
            max: opts.max_qubits,
        });
    }
    let op = CompiledObservable::new(h)?;
    let mut lopts = opts.lanczos;
    if op.dim() >= 1 << 18 {
        lopts.max_basis = lopts.max_basis.min(24);
    }
    let start = random_vector(op.dim(), seed);
    let pair = linalg::lanczos_lowest(&op, &start, &lopts)?;
    Ok((pair.value, Statevector::normalized(n, pair.vector)?))
}

/// Measurement record: basis index to count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub shots: u64,
}

impl SampleSet {
    pub fn new(n_qubits: usize, counts: BTreeMap<u64, u64>) -> Self {
        let shots = counts.values().sum();
        Self {
            n_qubits,
            counts,
            shots,
        }
    }

    pub fn count_of(&self, index: u64) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }
}

/// Multinomial sampling of `shots` computational-basis outcomes from
/// `|amplitude|^2` using a cumulative table.
pub fn sample_counts(v: &Statevector, shots: u64, seed: u64) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(v.dim());
    let mut acc = 0.0;
    for a in &v.amps {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let total = acc;
    let last_nonzero = v.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
    let mut rng = seed::rng(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(last_nonzero);
        *counts.entry(idx as u64).or_insert(0) += 1;
    }
    Ok(SampleSet {
        n_qubits: v.n_qubits,
        counts,
        shots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_encoding, build_relaxed_hamiltonian};
    use crate::graph::{greedy_coloring, Graph};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn single_edge_relaxed() -> Observable {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let m = build_encoding(&g, &greedy_coloring(&g), 3).unwrap();
        build_relaxed_hamiltonian(&g, &m).unwrap()
    }

    #[test]
    fn initial_states() {
        let x = prepare_initial_state(1, PauliAxis::X).unwrap();
        assert!(close(x.amplitudes(), &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], 1e-15));
        let y = prepare_initial_state(1, PauliAxis::Y).unwrap();
        assert!(close(y.amplitudes(), &[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)], 1e-15));
        let z = prepare_initial_state(2, PauliAxis::Z).unwrap();
        assert!(close(z.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0));
        for axis in PauliAxis::ALL {
            assert!((prepare_initial_state(5, axis).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_actions() {
        let zero = Statevector::basis(1, 0).unwrap();
        let x = Observable::uniform_single_pauli(1, PauliAxis::X).unwrap();
        assert!(close(&apply_observable(&x, &zero).unwrap(), &[c(0.0, 0.0), c(1.0, 0.0)], 0.0));
        let y = Observable::uniform_single_pauli(1, PauliAxis::Y).unwrap();
        assert!(close(&apply_observable(&y, &zero).unwrap(), &[c(0.0, 0.0), c(0.0, 1.0)], 0.0));

        let h = single_edge_relaxed();
        let v = Statevector::basis(2, 0).unwrap();
        let hv = apply_observable(&h, &v).unwrap();
        assert!(close(&hv, &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.5, 0.0)], 1e-15));
        assert!((expectation(&h, &v).unwrap() + 0.5).abs() < 1e-15);

        let plus = prepare_initial_state(1, PauliAxis::X).unwrap();
        assert!((expectation(&x, &plus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn width_mismatch_is_reported() {
        let h = single_edge_relaxed();
        let v = Statevector::basis(3, 0).unwrap();
        assert!(matches!(expectation(&h, &v), Err(Error::WidthMismatch { .. })));
        assert!(matches!(apply_observable(&h, &v), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn expm_closed_forms() {
        let x = Observable::uniform_single_pauli(1, PauliAxis::X).unwrap();
        let zero = Statevector::basis(1, 0).unwrap();
        let opts = ExpmOptions::default();
        let same = expm_apply(&x, 0.0, &zero, &opts).unwrap();
        assert_eq!(same, zero);
        let out = expm_apply(&x, FRAC_PI_2, &zero, &opts).unwrap();
        assert!(close(out.amplitudes(), &[c(0.0, 0.0), c(0.0, -1.0)], 1e-10));
    }

    #[test]
    fn mixer_closed_form() {
        let v = Statevector::basis(2, 0).unwrap();
        let out = apply_single_pauli_mixer(PauliAxis::X, FRAC_PI_2, &v);
        assert!(close(out.amplitudes(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)], 1e-15));
        for axis in PauliAxis::ALL {
            assert_eq!(apply_single_pauli_mixer(axis, 0.0, &v), v);
        }
    }

    #[test]
    fn mixer_matches_krylov_on_pauli_sum() {
        let start = Statevector::normalized(4, random_vector(16, 3)).unwrap();
        for axis in PauliAxis::ALL {
            let h = Observable::uniform_single_pauli(4, axis).unwrap();
            for beta in [0.13, -0.8, 2.9] {
                let a = apply_single_pauli_mixer(axis, beta, &start);
                let b = expm_apply(&h, beta, &start, &ExpmOptions::default()).unwrap();
                assert!(close(a.amplitudes(), b.amplitudes(), 1e-10), "{axis} {beta}");
            }
        }
    }

    #[test]
    fn lanczos_examples() {
        let (e, v) = lanczos_ground(&single_edge_relaxed(), 1, &GroundOptions::default()).unwrap();
        assert!((e + 2.0).abs() < 1e-10);
        assert!((v.norm() - 1.0).abs() < 1e-12);

        let k4 = Graph::complete(4);
        let m = build_encoding(&k4, &greedy_coloring(&k4), 1).unwrap();
        let h = build_relaxed_hamiltonian(&k4, &m).unwrap();
        let (e, _) = lanczos_ground(&h, 2, &GroundOptions::default()).unwrap();
        assert!((e + 4.0).abs() < 1e-10);

        let id = Observable::from_terms(3, 1.25, []).unwrap();
        let (e, v) = lanczos_ground(&id, 3, &GroundOptions::default()).unwrap();
        assert!((e - 1.25).abs() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_respects_qubit_cap() {
        let h = Observable::from_terms(21, 0.0, []).unwrap();
        assert!(matches!(
            lanczos_ground(&h, 0, &GroundOptions::default()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn sampling_basis_state_and_conservation() {
        let v = Statevector::basis(2, 0).unwrap();
        let s = sample_counts(&v, 1000, 5).unwrap();
        assert_eq!(s.counts.len(), 1);
        assert_eq!(s.count_of(0), 1000);
        for seed in 0..100 {
            let v = Statevector::normalized(3, random_vector(8, seed)).unwrap();
            let s = sample_counts(&v, 1 + seed * 7, seed).unwrap();
            assert_eq!(s.counts.values().sum::<u64>(), s.shots);
            assert!(s.counts.keys().all(|&k| k < 8));
        }
        assert!(sample_counts(&v, 0, 0).is_err());
    }

    #[test]
    fn sampling_plus_state_statistics() {
        let plus = prepare_initial_state(1, PauliAxis::X).unwrap();
        let s = sample_counts(&plus, 1_000_000, 11).unwrap();
        let zeros = s.count_of(0) as f64;
        assert!((zeros - 500_000.0).abs() <= 3.0 * 500.0, "{zeros}");
        assert_eq!(s, sample_counts(&plus, 1_000_000, 11).unwrap());
    }

    #[test]
    fn bitstrings_are_msb_first() {
        assert_eq!(bitstring(1, 3), "001");
        assert_eq!(bitstring(6, 3), "110");
        assert_eq!(parse_bitstring("110").unwrap(), 6);
        assert!(parse_bitstring("12").is_err());
    }
}
