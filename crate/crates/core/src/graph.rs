//! MaxCut instances: simple undirected graphs, random regular generation,
//! greedy coloring and classical cut oracles.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

use crate::seed::{self, Stream};
use crate::{Error, Result};

/// A spin value, `+1` or `-1`.
pub type Spin = i8;

/// Undirected simple graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let e = if u < v { (u, v) } else { (v, u) };
            if !set.insert(e) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    /// Cycle `0-1-...-(n-1)-0`; requires `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph("cycle needs n >= 3".into()));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Number of edges whose endpoints carry different spins.
    pub fn cut_value(&self, spins: &[Spin]) -> usize {
        debug_assert_eq!(spins.len(), self.n);
        self.edges
            .iter()
            .filter(|&&(u, v)| spins[u] != spins[v])
            .count()
    }
}

pub const DEFAULT_GENERATION_ATTEMPTS: usize = 1000;

/// Random simple `degree`-regular graph from the pairing (configuration)
/// model, rejecting pairings with loops or parallel edges.
pub fn generate_regular_graph(n: usize, degree: usize, seed: u64) -> Result<Graph> {
    generate_regular_graph_with(n, degree, seed, DEFAULT_GENERATION_ATTEMPTS)
}

pub fn generate_regular_graph_with(
    n: usize,
    degree: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InfeasibleDegree {
            n,
            degree,
            reason: "n must be positive",
        });
    }
    if !(n * degree).is_multiple_of(2) {
        return Err(Error::InfeasibleDegree {
            n,
            degree,
            reason: "n * degree must be even",
        });
    }
    if degree >= n {
        return Err(Error::InfeasibleDegree {
            n,
            degree,
            reason: "degree must be smaller than n",
        });
    }
    let mut rng = seed::rng(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| core::iter::repeat_n(v, degree)).collect();
    'attempt: for _ in 0..max_attempts {
        points.shuffle(&mut rng);
        let mut set = BTreeSet::new();
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !set.insert((u, v)) {
                continue 'attempt;
            }
        }
        return Ok(Graph {
            n,
            edges: set.into_iter().collect(),
        });
    }
    Err(Error::GenerationFailed {
        attempts: max_attempts,
    })
}

/// Proper vertex coloring with contiguous color indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    color_of: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    /// Wraps an explicit color assignment. Colors are relabelled to be
    /// contiguous (in order of first use by ascending color value).
    pub fn from_colors(colors: Vec<usize>) -> Self {
        let used: BTreeSet<usize> = colors.iter().copied().collect();
        let remap: alloc::collections::BTreeMap<usize, usize> =
            used.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let color_of = colors.iter().map(|c| remap[c]).collect();
        Self {
            color_of,
            num_colors: used.len(),
        }
    }

    #[inline]
    pub fn color_of(&self) -> &[usize] {
        &self.color_of
    }

    #[inline]
    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_colors];
        for &c in &self.color_of {
            sizes[c] += 1;
        }
        sizes
    }

    /// Vertices of each color class in ascending index order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (v, &c) in self.color_of.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }

    /// First edge whose endpoints share a color, if any.
    pub fn conflict(&self, g: &Graph) -> Option<(usize, usize)> {
        if self.color_of.len() != g.n() {
            return Some((0, 0));
        }
        g.edges()
            .iter()
            .copied()
            .find(|&(u, v)| self.color_of[u] == self.color_of[v])
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.conflict(g).is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColoringOptions {
    /// When set, recolor vertices to reduce `sum_c ceil(|V_c| / k)`.
    pub balance_for: Option<usize>,
}

impl Default for ColoringOptions {
    fn default() -> Self {
        Self {
            balance_for: Some(3),
        }
    }
}

/// Greedy coloring in largest-degree-first order followed by the default
/// balancing pass for three variables per qubit.
pub fn greedy_coloring(g: &Graph) -> Coloring {
    greedy_coloring_with(g, ColoringOptions::default())
}

pub fn greedy_coloring_with(g: &Graph, opts: ColoringOptions) -> Coloring {
    let adj = g.adjacency();
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| adj[b].len().cmp(&adj[a].len()).then(a.cmp(&b)));

    const NONE: usize = usize::MAX;
    let mut color = vec![NONE; g.n()];
    let mut taken = Vec::new();
    for &v in &order {
        taken.clear();
        taken.extend(adj[v].iter().map(|&u| color[u]).filter(|&c| c != NONE));
        let mut c = 0;
        while taken.contains(&c) {
            c += 1;
        }
        color[v] = c;
    }
    if let Some(k) = opts.balance_for {
        balance(&adj, &mut color, k.max(1));
    }
    Coloring::from_colors(color)
}

fn qubit_cost(sizes: &[usize], k: usize) -> usize {
    sizes.iter().map(|s| s.div_ceil(k)).sum()
}

/// Strict-descent local search on `sum_c ceil(|V_c| / k)` using single and
/// pair vertex moves that preserve properness.
fn balance(adj: &[Vec<usize>], color: &mut [usize], k: usize) {
    let num_colors = color.iter().max().map_or(0, |c| c + 1);
    let mut sizes = vec![0usize; num_colors];
    for &c in color.iter() {
        sizes[c] += 1;
    }
    let fits = |color: &[usize], v: usize, target: usize| adj[v].iter().all(|&u| color[u] != target);

    loop {
        let current = qubit_cost(&sizes, k);
        let mut improved = false;
        'search: for a in 0..num_colors {
            for b in 0..num_colors {
                if a == b || sizes[a] == 0 {
                    continue;
                }
                let members: Vec<usize> = (0..color.len()).filter(|&v| color[v] == a).collect();
                let movable: Vec<usize> = members.iter().copied().filter(|&v| fits(color, v, b)).collect();
                if movable.is_empty() {
                    continue;
                }
                for m in 1..=movable.len().min(2) {
                    let mut trial = sizes.clone();
                    trial[a] -= m;
                    trial[b] += m;
                    if qubit_cost(&trial, k) < current {
                        for &v in movable.iter().take(m) {
                            color[v] = b;
                        }
                        sizes = trial;
                        improved = true;
                        break 'search;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// How [`best_cut`] obtains its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMode {
    /// Exhaustive Gray-code enumeration; exact.
    Certified,
    /// Multi-restart simulated annealing; a lower bound on the optimum.
    BestFound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    pub value: usize,
    pub certified: bool,
    pub assignment: Vec<Spin>,
}

pub const MAX_CERTIFIED_VERTICES: usize = 28;

pub fn best_cut(g: &Graph, mode: CutMode, seed: u64) -> Result<CutResult> {
    match mode {
        CutMode::Certified => exact_max_cut(g),
        CutMode::BestFound => Ok(anneal_max_cut(g, seed, &AnnealOptions::default())),
    }
}

/// Exact maximum cut by Gray-code enumeration over `2^(n-1)` assignments
/// (the last vertex is pinned to `+1`).
pub fn exact_max_cut(g: &Graph) -> Result<CutResult> {
    let n = g.n();
    if n > MAX_CERTIFIED_VERTICES {
        return Err(Error::TooLarge {
            what: "certified max-cut",
            size: n,
            max: MAX_CERTIFIED_VERTICES,
        });
    }
    let adj = g.adjacency();
    let nbr: Vec<u32> = adj
        .iter()
        .map(|ns| ns.iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let deg: Vec<i64> = adj.iter().map(|ns| ns.len() as i64).collect();

    // bit v of `mask` set <=> spin of v is -1
    let mut mask = 0u32;
    let mut cut = 0i64;
    let mut best = 0i64;
    let mut best_mask = 0u32;
    let free = n - 1;
    let steps: u64 = 1u64 << free;
    for i in 1..steps {
        let v = i.trailing_zeros() as usize;
        let differing = if mask & (1 << v) == 0 {
            (nbr[v] & mask).count_ones()
        } else {
            (nbr[v] & !mask).count_ones()
        } as i64;
        cut += deg[v] - 2 * differing;
        mask ^= 1 << v;
        if cut > best {
            best = cut;
            best_mask = mask;
        }
    }
    let assignment: Vec<Spin> = (0..n)
        .map(|v| if best_mask & (1 << v) != 0 { -1 } else { 1 })
        .collect();
    Ok(CutResult {
        value: best as usize,
        certified: true,
        assignment,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealOptions {
    pub restarts: usize,
    /// Total sweeps over all restarts.
    pub total_sweeps: usize,
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for AnnealOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            total_sweeps: 100_000,
            t_start: 2.0,
            t_end: 0.02,
        }
    }
}

/// Multi-restart simulated annealing with a geometric temperature schedule.
/// Each restart uses its own derived seed. The result is never certified.
pub fn anneal_max_cut(g: &Graph, seed: u64, opts: &AnnealOptions) -> CutResult {
    let n = g.n();
    let adj = g.adjacency();
    let restarts = opts.restarts.max(1);
    let sweeps = (opts.total_sweeps / restarts).max(1);
    let ratio = if sweeps > 1 {
        (opts.t_end / opts.t_start).powf(1.0 / (sweeps - 1) as f64)
    } else {
        1.0
    };

    let mut best: Vec<Spin> = vec![1; n];
    let mut best_value = 0usize;
    for r in 0..restarts {
        let mut rng = seed::rng(seed::derive(seed, Stream::Annealing as u64, r as u64));
        let mut spins: Vec<Spin> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let mut value = g.cut_value(&spins);
        let mut t = opts.t_start;
        let gain = |spins: &[Spin], v: usize| -> i64 {
            adj[v]
                .iter()
                .map(|&u| if spins[u] == spins[v] { 1 } else { -1 })
                .sum()
        };
        let consider = |spins: &[Spin], value: usize, best: &mut Vec<Spin>, best_value: &mut usize| {
            if value > *best_value {
                *best_value = value;
                best.copy_from_slice(spins);
            }
        };
        consider(&spins, value, &mut best, &mut best_value);
        for _ in 0..sweeps {
            for v in 0..n {
                let d = gain(&spins, v);
                if d >= 0 || rng.gen::<f64>() < (d as f64 / t).exp() {
                    spins[v] = -spins[v];
                    value = (value as i64 + d) as usize;
                    if value > best_value {
                        consider(&spins, value, &mut best, &mut best_value);
                    }
                }
            }
            t *= ratio;
        }
        // greedy polish
        loop {
            let mut moved = false;
            for v in 0..n {
                let d = gain(&spins, v);
                if d > 0 {
                    spins[v] = -spins[v];
                    value = (value as i64 + d) as usize;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        consider(&spins, value, &mut best, &mut best_value);
    }
    CutResult {
        value: best_value,
        certified: false,
        assignment: best,
    }
}
