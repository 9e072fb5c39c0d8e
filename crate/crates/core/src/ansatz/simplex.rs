//! Budgeted Nelder-Mead simplex descent.

use alloc::vec;
use alloc::vec::Vec;

use crate::Result;

/// Objective wrapper that counts evaluations against a budget and records
/// every point it sees.
pub struct Evaluator<'a> {
    objective: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    budget: usize,
    bounds: Option<&'a [(f64, f64)]>,
    pub trace: Vec<(Vec<f64>, f64)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        objective: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
        budget: usize,
        bounds: Option<&'a [(f64, f64)]>,
    ) -> Self {
        Self {
            objective,
            budget,
            bounds,
            trace: Vec::new(),
        }
    }

    /// Caps the total number of evaluations at `used + extra` (never above
    /// the current budget) and returns the previous budget.
    pub fn limit(&mut self, extra: usize) -> usize {
        let old = self.budget;
        self.budget = old.min(self.trace.len() + extra);
        old
    }

    pub fn set_budget(&mut self, budget: usize) {
        self.budget = budget;
    }

    pub fn remaining(&self) -> usize {
        self.budget.saturating_sub(self.trace.len())
    }

    fn project(&self, x: &mut [f64]) {
        if let Some(b) = self.bounds {
            for (xi, &(lo, hi)) in x.iter_mut().zip(b) {
                *xi = xi.clamp(lo, hi);
            }
        }
    }

    /// `None` once the budget is spent.
    pub fn eval(&mut self, x: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
        if self.remaining() == 0 {
            return Ok(None);
        }
        let mut p = x.to_vec();
        self.project(&mut p);
        let mut f = (self.objective)(&p)?;
        if f.is_nan() {
            f = f64::INFINITY;
        }
        self.trace.push((p.clone(), f));
        Ok(Some((p, f)))
    }

    pub fn best(&self) -> Option<(&[f64], f64)> {
        self.trace
            .iter()
            .fold(None, |acc: Option<(&[f64], f64)>, (x, f)| match acc {
                Some((_, bf)) if bf <= *f => acc,
                _ => Some((x.as_slice(), *f)),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub initial_step: f64,
    /// Converged when the simplex diameter falls below this.
    pub xtol: f64,
    /// Converged when the spread of objective values falls below this.
    pub ftol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.5,
            xtol: 1e-6,
            ftol: 1e-10,
        }
    }
}

/// Outcome of one descent.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) from `x0` with an axis-aligned initial simplex. Stops on
/// convergence or when the evaluator's budget runs out.
pub fn nelder_mead(ev: &mut Evaluator<'_>, x0: &[f64], f0: Option<f64>, opts: &SimplexOptions) -> Result<Option<Descent>> {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    match f0 {
        Some(f) => simplex.push((x0.to_vec(), f)),
        None => match ev.eval(x0)? {
            Some(p) => simplex.push(p),
            None => return Ok(None),
        },
    }
    for i in 0..dim {
        let mut x = simplex[0].0.clone();
        x[i] += opts.initial_step;
        match ev.eval(&x)? {
            Some(p) => simplex.push(p),
            None => return Ok(Some(best_of(simplex, false))),
        }
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter <= opts.xtol || (spread.is_finite() && spread <= opts.ftol) {
            return Ok(Some(best_of(simplex, true)));
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        macro_rules! eval_or_stop {
            ($x:expr) => {
                match ev.eval(&$x)? {
                    Some(p) => p,
                    None => return Ok(Some(best_of(simplex, false))),
                }
            };
        }

        let reflected = eval_or_stop!(along(1.0));
        if reflected.1 < simplex[0].1 {
            let expanded = eval_or_stop!(along(2.0));
            simplex[dim] = if expanded.1 < reflected.1 { expanded } else { reflected };
            continue;
        }
        if reflected.1 < simplex[dim - 1].1 {
            simplex[dim] = reflected;
            continue;
        }
        let contracted = if reflected.1 < worst.1 {
            eval_or_stop!(along(0.5))
        } else {
            eval_or_stop!(along(-0.5))
        };
        if contracted.1 < reflected.1.min(worst.1) {
            simplex[dim] = contracted;
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for i in 1..=dim {
            let x: Vec<f64> = best
                .iter()
                .zip(&simplex[i].0)
                .map(|(b, xi)| b + 0.5 * (xi - b))
                .collect();
            simplex[i] = eval_or_stop!(x);
        }
    }
}

fn best_of(simplex: Vec<(Vec<f64>, f64)>, converged: bool) -> Descent {
    let (x, f) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex is never empty");
    Descent { x, f, converged }
}
