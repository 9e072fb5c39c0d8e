//! Sampled-subspace diagonalization.
//!
//! The `R` most frequent measured bitstrings span a subspace; the cost
//! Hamiltonian projected onto it is diagonalized classically. Nested
//! subspaces give non-increasing energies bounded below by the true ground
//! energy.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::encoding::Observable;
use crate::engine::{self, SampleSet, Statevector};
use crate::linalg::{self, HermitianOperator, LanczosOptions};
use crate::{Error, Result};

type C64 = Complex64;

/// Subspaces up to this dimension are diagonalized densely.
pub const DENSE_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    n_qubits: usize,
    basis: Vec<u64>,
    requested: usize,
}

impl Subspace {
    pub fn new(n_qubits: usize, basis: Vec<u64>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidArgument("subspace needs at least one state".into()));
        }
        let limit = if n_qubits >= 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        let mut sorted = basis.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("subspace basis has duplicates".into()));
        }
        if sorted.last().is_some_and(|&b| b > limit) {
            return Err(Error::InvalidArgument("basis state wider than register".into()));
        }
        let requested = basis.len();
        Ok(Self {
            n_qubits,
            basis,
            requested,
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.basis.len()
    }

    pub fn requested(&self) -> usize {
        self.requested
    }

    /// How many fewer states than requested were available.
    pub fn shortfall(&self) -> usize {
        self.requested.saturating_sub(self.basis.len())
    }

    /// First `r` basis states (still ordered by selection rank).
    pub fn truncated(&self, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            basis: self.basis[..r.min(self.basis.len())].to_vec(),
            requested: r,
        })
    }
}

fn top_r(mut ranked: Vec<(u64, u64)>, n_qubits: usize, r: usize) -> Result<Subspace> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    // count descending, then ascending bitstring value
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(r);
    let mut s = Subspace::new(n_qubits, ranked.into_iter().map(|(b, _)| b).collect())?;
    s.requested = r;
    Ok(s)
}

/// The `r` most frequent bitstrings; equal counts are ordered by ascending
/// bitstring value. When fewer than `r` distinct strings were observed all
/// of them are returned and the shortfall is recorded.
pub fn select_subspace(samples: &SampleSet, r: usize) -> Result<Subspace> {
    if samples.counts.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    top_r(
        samples.counts.iter().map(|(&b, &c)| (b, c)).collect(),
        samples.n_qubits,
        r,
    )
}

/// Noise-free variant: the `r` basis states of largest probability. States
/// of probability zero are never selected.
pub fn select_subspace_exact(v: &Statevector, r: usize) -> Result<Subspace> {
    let probs = v.probabilities();
    let mut ranked: Vec<(u64, f64)> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(b, &p)| (b as u64, p))
        .collect();
    if ranked.is_empty() || r == 0 {
        return Err(Error::InvalidArgument("no states to select".into()));
    }
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(r);
    let mut s = Subspace::new(v.n_qubits(), ranked.into_iter().map(|(b, _)| b).collect())?;
    s.requested = r;
    Ok(s)
}

/// `P_R H P_R` in the subspace basis, stored as sorted `(row, col, value)`
/// triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    subspace: Subspace,
    entries: Vec<(usize, usize, C64)>,
}

impl EffectiveHamiltonian {
    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let n = self.subspace.r();
        let mut m = DMatrix::zeros(n, n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest `|H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.to_dense();
        let n = m.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl HermitianOperator for EffectiveHamiltonian {
    fn dim(&self) -> usize {
        self.subspace.r()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::zero());
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
    }
}

/// For each Pauli term, basis state `x_j` maps to the single partner
/// `x_j ^ x_mask`; a matrix element is recorded only when that partner is
/// also in the subspace.
pub fn build_effective_hamiltonian(h: &Observable, s: &Subspace) -> Result<EffectiveHamiltonian> {
    if h.n_qubits() != s.n_qubits {
        return Err(Error::WidthMismatch {
            expected: h.n_qubits(),
            found: s.n_qubits,
        });
    }
    let mut index: Vec<(u64, usize)> = s.basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    index.sort_unstable();
    let position = |b: u64| index.binary_search_by_key(&b, |&(k, _)| k).ok().map(|i| index[i].1);

    let mut acc: alloc::collections::BTreeMap<(usize, usize), C64> = alloc::collections::BTreeMap::new();
    for (col, &b) in s.basis.iter().enumerate() {
        *acc.entry((col, col)).or_insert(C64::zero()) += h.offset();
        for (c, p) in h.terms() {
            if let Some(row) = position(b ^ p.x_mask()) {
                *acc.entry((row, col)).or_insert(C64::zero()) += p.phase_on(b) * *c;
            }
        }
    }
    let entries = acc.into_iter().map(|((r, c), v)| (r, c, v)).collect();
    Ok(EffectiveHamiltonian {
        subspace: s.clone(),
        entries,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QsciResult {
    pub energy: f64,
    /// Unit vector over the subspace basis.
    pub coefficients: Vec<C64>,
    pub subspace: Subspace,
    pub residual: f64,
}

/// Lowest eigenpair of the effective Hamiltonian: dense Hermitian
/// eigensolver up to [`DENSE_LIMIT`], restarted Lanczos above.
pub fn qsci_ground(h_eff: &EffectiveHamiltonian, seed: u64, tol: f64) -> Result<QsciResult> {
    let dim = h_eff.dim();
    let pair = if dim <= DENSE_LIMIT {
        let mut pair = linalg::dense_lowest(h_eff.to_dense());
        // residual against the sparse operator
        let mut r = vec![C64::zero(); dim];
        h_eff.apply(&pair.vector, &mut r);
        linalg::axpy(C64::new(-pair.value, 0.0), &pair.vector, &mut r);
        pair.residual = linalg::norm(&r);
        if pair.residual > tol {
            return Err(Error::NotConverged {
                what: "dense effective-Hamiltonian eigensolver",
                residual: pair.residual,
            });
        }
        pair
    } else {
        let start = engine::random_vector(dim, seed);
        let opts = LanczosOptions {
            tol,
            ..LanczosOptions::default()
        };
        linalg::lanczos_lowest(h_eff, &start, &opts)?
    };
    Ok(QsciResult {
        energy: pair.value,
        coefficients: pair.vector,
        subspace: h_eff.subspace.clone(),
        residual: pair.residual,
    })
}

/// Embeds the subspace ground state into the full register.
pub fn lift_to_statevector(res: &QsciResult, n_qubits: usize) -> Result<Statevector> {
    if n_qubits != res.subspace.n_qubits {
        return Err(Error::WidthMismatch {
            expected: res.subspace.n_qubits,
            found: n_qubits,
        });
    }
    let mut amps = vec![C64::zero(); 1usize << n_qubits];
    for (&b, &c) in res.subspace.basis.iter().zip(&res.coefficients) {
        amps[b as usize] = c;
    }
    Statevector::normalized(n_qubits, amps)
}
