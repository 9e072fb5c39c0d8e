//! Variable-to-qubit packing and the Pauli-sum cost Hamiltonians.
//!
//! Up to three binary variables share one qubit, each attached to a
//! different Pauli axis. Variables joined by an edge must live on different
//! qubits, which is why packing starts from a proper coloring: each color
//! class is split into groups of `k` variables, one group per qubit.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::graph::{Coloring, Graph};
use crate::{Error, Result};

/// Largest register width representable by [`PauliString`] masks.
pub const MAX_WIDTH: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn as_char(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for PauliAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(PauliAxis::X),
            "Y" | "y" => Ok(PauliAxis::Y),
            "Z" | "z" => Ok(PauliAxis::Z),
            other => Err(Error::InvalidArgument(format!("unknown Pauli axis {other:?}"))),
        }
    }
}

/// Pauli string in symplectic form. Bit `q` of `x_mask`/`z_mask` holds the
/// X/Z component on qubit `q`; `Y` sets both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    x_mask: u64,
    z_mask: u64,
    width: usize,
}

impl PauliString {
    pub fn identity(width: usize) -> Result<Self> {
        Self::from_masks(0, 0, width)
    }

    pub fn from_masks(x_mask: u64, z_mask: u64, width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::TooLarge {
                what: "Pauli string width",
                size: width,
                max: MAX_WIDTH,
            });
        }
        let limit = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        if (x_mask | z_mask) & !limit != 0 {
            return Err(Error::InvalidArgument(format!(
                "masks {x_mask:#x}/{z_mask:#x} exceed width {width}"
            )));
        }
        Ok(Self {
            x_mask,
            z_mask,
            width,
        })
    }

    pub fn single(width: usize, qubit: usize, axis: PauliAxis) -> Result<Self> {
        if qubit >= width {
            return Err(Error::InvalidArgument(format!(
                "qubit {qubit} outside width {width}"
            )));
        }
        let bit = 1u64 << qubit;
        let (x, z) = match axis {
            PauliAxis::X => (bit, 0),
            PauliAxis::Y => (bit, bit),
            PauliAxis::Z => (0, bit),
        };
        Self::from_masks(x, z, width)
    }

    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of `Y` factors.
    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    pub fn axis_at(&self, qubit: usize) -> Option<PauliAxis> {
        let x = (self.x_mask >> qubit) & 1 == 1;
        let z = (self.z_mask >> qubit) & 1 == 1;
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(PauliAxis::X),
            (true, true) => Some(PauliAxis::Y),
            (false, true) => Some(PauliAxis::Z),
        }
    }

    /// Product of strings acting on disjoint qubits.
    pub fn disjoint_product(&self, other: &PauliString) -> Result<PauliString> {
        check_width(self.width, other.width)?;
        if (self.x_mask | self.z_mask) & (other.x_mask | other.z_mask) != 0 {
            return Err(Error::Encoding("Pauli factors overlap on a qubit".into()));
        }
        Self::from_masks(
            self.x_mask | other.x_mask,
            self.z_mask | other.z_mask,
            self.width,
        )
    }

    /// Phase factor `i^{#Y}` so that the string equals
    /// `i^{#Y} X^{x_mask} Z^{z_mask}`.
    pub fn y_phase(&self) -> Complex64 {
        match self.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Matrix element `<b ^ x_mask| P |b>`; `P|b>` is this value times
    /// `|b ^ x_mask>`.
    #[inline]
    pub fn phase_on(&self, basis: u64) -> Complex64 {
        let p = self.y_phase();
        if (basis & self.z_mask).count_ones() % 2 == 1 {
            -p
        } else {
            p
        }
    }

    /// Label with qubit 0 as the rightmost character.
    pub fn label(&self) -> String {
        (0..self.width)
            .rev()
            .map(|q| self.axis_at(q).map_or('I', PauliAxis::as_char))
            .collect()
    }

    pub fn from_label(label: &str) -> Result<Self> {
        let width = label.chars().count();
        let mut x = 0u64;
        let mut z = 0u64;
        for (i, ch) in label.chars().enumerate() {
            let q = width - 1 - i;
            if q >= MAX_WIDTH {
                return Err(Error::TooLarge {
                    what: "Pauli string width",
                    size: width,
                    max: MAX_WIDTH,
                });
            }
            let bit = 1u64 << q;
            match ch {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit
                }
                'Z' => z |= bit,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid Pauli character {other:?}"
                    )))
                }
            }
        }
        Self::from_masks(x, z, width)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_width(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::WidthMismatch { expected, found })
    }
}

/// True iff the two strings commute, i.e. their symplectic inner product
/// vanishes.
pub fn strings_commute(a: &PauliString, b: &PauliString) -> Result<bool> {
    check_width(a.width, b.width)?;
    let anti = (a.x_mask & b.z_mask) ^ (a.z_mask & b.x_mask);
    Ok(anti.count_ones().is_multiple_of(2))
}

/// Real-weighted sum of Pauli strings plus a scalar offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    offset: f64,
    terms: Vec<(f64, PauliString)>,
}

impl Observable {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_WIDTH {
            return Err(Error::TooLarge {
                what: "observable width",
                size: n_qubits,
                max: MAX_WIDTH,
            });
        }
        Ok(Self {
            n_qubits,
            offset: 0.0,
            terms: Vec::new(),
        })
    }

    /// Builds an observable, merging repeated strings and folding identity
    /// terms into the offset.
    pub fn from_terms<I>(n_qubits: usize, offset: f64, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut obs = Self::new(n_qubits)?;
        obs.offset = offset;
        let mut merged: BTreeMap<(u64, u64), f64> = BTreeMap::new();
        for (c, s) in terms {
            check_width(n_qubits, s.width)?;
            if !c.is_finite() {
                return Err(Error::InvalidArgument("non-finite coefficient".into()));
            }
            if s.is_identity() {
                obs.offset += c;
            } else {
                *merged.entry((s.x_mask, s.z_mask)).or_insert(0.0) += c;
            }
        }
        if !obs.offset.is_finite() {
            return Err(Error::InvalidArgument("non-finite offset".into()));
        }
        obs.terms = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((x, z), c)| (c, PauliString { x_mask: x, z_mask: z, width: n_qubits }))
            .collect();
        Ok(obs)
    }

    /// `sum_q P_q` over all qubits.
    pub fn uniform_single_pauli(n_qubits: usize, axis: PauliAxis) -> Result<Self> {
        let terms = (0..n_qubits)
            .map(|q| PauliString::single(n_qubits, q, axis).map(|s| (1.0, s)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n_qubits, 0.0, terms)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.offset.abs() + self.terms.iter().map(|(c, _)| c.abs()).sum::<f64>()
    }

    /// Dense `2^n x 2^n` matrix, row-major. Intended for small widths.
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        if self.n_qubits > 14 {
            return Err(Error::TooLarge {
                what: "dense observable",
                size: self.n_qubits,
                max: 14,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = alloc::vec![Complex64::new(0.0, 0.0); dim * dim];
        for b in 0..dim {
            m[b * dim + b] += self.offset;
        }
        for (c, s) in &self.terms {
            for col in 0..dim {
                let row = col ^ s.x_mask as usize;
                m[row * dim + col] += s.phase_on(col as u64) * *c;
            }
        }
        Ok(m)
    }
}

/// Where a variable lives: qubit index and Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub qubit: usize,
    pub axis: PauliAxis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMap {
    slot_of: Vec<Slot>,
    n_qubits: usize,
    vars_per_qubit: usize,
}

impl EncodingMap {
    #[inline]
    pub fn slot_of(&self) -> &[Slot] {
        &self.slot_of
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn vars_per_qubit(&self) -> usize {
        self.vars_per_qubit
    }

    pub fn num_variables(&self) -> usize {
        self.slot_of.len()
    }

    /// Single-qubit Pauli string attached to variable `i`.
    pub fn variable_string(&self, i: usize) -> Result<PauliString> {
        let slot = self
            .slot_of
            .get(i)
            .ok_or_else(|| Error::InvalidArgument(format!("no variable {i}")))?;
        PauliString::single(self.n_qubits, slot.qubit, slot.axis)
    }
}

fn axes_for(k: usize) -> &'static [PauliAxis] {
    match k {
        1 => &[PauliAxis::Z],
        2 => &[PauliAxis::X, PauliAxis::Y],
        _ => &[PauliAxis::X, PauliAxis::Y, PauliAxis::Z],
    }
}

/// Packs each color class into `ceil(|V_c| / k)` qubits. Within a class,
/// vertices are taken in index order and fill axes `X`, `Y`, `Z` in turn
/// (`Z` only when `k = 1`).
pub fn build_encoding(g: &Graph, coloring: &Coloring, k: usize) -> Result<EncodingMap> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "variables per qubit must be 1, 2 or 3 (got {k})"
        )));
    }
    if coloring.color_of().len() != g.n() {
        return Err(Error::Encoding(format!(
            "coloring covers {} vertices, graph has {}",
            coloring.color_of().len(),
            g.n()
        )));
    }
    if let Some((u, v)) = coloring.conflict(g) {
        return Err(Error::ImproperColoring(u, v));
    }
    let axes = axes_for(k);
    let mut slot_of = alloc::vec![Slot { qubit: 0, axis: PauliAxis::Z }; g.n()];
    let mut next_qubit = 0;
    for class in coloring.classes() {
        for group in class.chunks(k) {
            for (&v, &axis) in group.iter().zip(axes) {
                slot_of[v] = Slot {
                    qubit: next_qubit,
                    axis,
                };
            }
            next_qubit += 1;
        }
    }
    if next_qubit > MAX_WIDTH {
        return Err(Error::TooLarge {
            what: "encoded register",
            size: next_qubit,
            max: MAX_WIDTH,
        });
    }
    Ok(EncodingMap {
        slot_of,
        n_qubits: next_qubit,
        vars_per_qubit: k,
    })
}

/// Relaxed MaxCut Hamiltonian `-sum_{(i,j)} (1 - k P_i P_j) / 2`.
///
/// With `k = 1` every variable sits on its own `Z` axis and this is the
/// diagonal Ising cost; with `k = 3` it is the (3,1)-QRAC relaxation.
pub fn build_relaxed_hamiltonian(g: &Graph, map: &EncodingMap) -> Result<Observable> {
    if map.num_variables() != g.n() {
        return Err(Error::Encoding(format!(
            "encoding has {} variables, graph has {} vertices",
            map.num_variables(),
            g.n()
        )));
    }
    let f = map.vars_per_qubit as f64;
    let mut terms = Vec::with_capacity(g.num_edges());
    for &(i, j) in g.edges() {
        let (si, sj) = (map.slot_of[i], map.slot_of[j]);
        if si.qubit == sj.qubit {
            return Err(Error::Encoding(format!(
                "edge ({i}, {j}) has both endpoints on qubit {}",
                si.qubit
            )));
        }
        let s = map.variable_string(i)?.disjoint_product(&map.variable_string(j)?)?;
        terms.push((0.5 * f, s));
    }
    Observable::from_terms(map.n_qubits, -0.5 * g.num_edges() as f64, terms)
}

/// One-qubit density matrix of the (3,1) quantum random access code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QracState {
    pub rho: [[Complex64; 2]; 2],
}

/// `(I + ((-1)^x1 X + (-1)^x2 Y + (-1)^x3 Z) / sqrt(3)) / 2`
pub fn qrac_state(x1: bool, x2: bool, x3: bool) -> QracState {
    let s = |b: bool| if b { -1.0 } else { 1.0 } / 3f64.sqrt();
    let (rx, ry, rz) = (s(x1), s(x2), s(x3));
    let c = Complex64::new;
    QracState {
        rho: [
            [c(0.5 * (1.0 + rz), 0.0), c(0.5 * rx, -0.5 * ry)],
            [c(0.5 * rx, 0.5 * ry), c(0.5 * (1.0 - rz), 0.0)],
        ],
    }
}

impl QracState {
    pub fn trace(&self) -> Complex64 {
        self.rho[0][0] + self.rho[1][1]
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += self.rho[i][j] * self.rho[j][i];
            }
        }
        acc.re
    }

    /// Bloch vector `(Tr rho X, Tr rho Y, Tr rho Z)`.
    pub fn bloch(&self) -> [f64; 3] {
        [
            2.0 * self.rho[1][0].re,
            2.0 * self.rho[1][0].im,
            (self.rho[0][0] - self.rho[1][1]).re,
        ]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [x, y, z] = self.bloch();
        let r = (x * x + y * y + z * z).sqrt();
        let t = self.trace().re;
        [0.5 * (t - r), 0.5 * (t + r)]
    }

    /// Probability of reading `bit` when measuring `axis`:
    /// `Tr[rho (I + (-1)^bit P) / 2]`.
    pub fn decode_probability(&self, axis: PauliAxis, bit: bool) -> f64 {
        let b = self.bloch();
        let e = match axis {
            PauliAxis::X => b[0],
            PauliAxis::Y => b[1],
            PauliAxis::Z => b[2],
        };
        let sign = if bit { -1.0 } else { 1.0 };
        0.5 * (self.trace().re + sign * e)
    }
}
