//! Multiplicative projected ascent over the nonnegative cone.
//!
//! Objectives are scale-invariant ratios, so iterates live on the positive
//! orthant with a free normalization (max entry pinned to 1). Multiplicative
//! updates keep every coordinate positive; corners are reachable in the
//! limit and are also evaluated directly, so the returned value is always an
//! evaluated feasible point, hence a valid lower bound on the supremum.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::rng::task_rng;
use crate::vector::FiniteVector;

const LOG_PROBE: f64 = 1e-5;
const REL_STOP: f64 = 1e-10;
const MAX_ITERS: usize = 10_000;
const FLOOR: f64 = 1e-30;

#[derive(Clone, Debug)]
pub struct AscentResult {
    pub value: f64,
    pub maximizer: FiniteVector,
    /// Ascent iterations summed over all starts.
    pub iterations: usize,
    pub starts: usize,
}

/// Maximize `objective` over nonnegative x supported on [1, n].
///
/// Candidates: every corner e_j evaluated directly, then ascent from the
/// uniform start, from the best corner, and from `restarts` seeded random
/// starts. `objective(x)` returns None for infeasible points (conventionally
/// a zero denominator); it must be scale-invariant.
pub fn maximize_over_cone<F>(
    n: usize,
    restarts: usize,
    seed: u64,
    task: &str,
    mode: ExecMode,
    objective: F,
) -> Result<AscentResult>
where
    F: Fn(&FiniteVector) -> Result<Option<f64>> + Sync + Send,
{
    if n == 0 {
        return Err(Error::Precondition("ascent needs n >= 1".into()));
    }
    let mut best: Option<(f64, FiniteVector)> = None;
    let consider = |value: f64, x: FiniteVector, best: &mut Option<(f64, FiniteVector)>| {
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            *best = Some((value, x));
        }
    };

    let mut best_corner: Option<(f64, usize)> = None;
    for j in 1..=n {
        let corner = FiniteVector::basis(j);
        if let Some(v) = objective(&corner)? {
            consider(v, corner, &mut best);
            if best_corner.is_none_or(|(b, _)| v > b) {
                best_corner = Some((v, j));
            }
        }
    }

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(restarts + 2);
    starts.push(vec![1.0; n]);
    if let Some((_, j)) = best_corner {
        let mut x = vec![1e-6; n];
        x[j - 1] = 1.0;
        starts.push(x);
    }
    for r in 0..restarts {
        let mut rng = task_rng(seed, task, r as u64);
        starts.push((0..n).map(|_| 10f64.powf(rng.random::<f64>() * 2.0 - 2.0)).collect());
    }

    let climbed = exec::map_indexed(mode, starts.len(), |s| climb(&starts[s], &objective))?;
    let mut iterations = 0;
    for outcome in climbed {
        iterations += outcome.iterations;
        if let Some((v, x)) = outcome.peak {
            consider(v, x, &mut best);
        }
    }

    let (value, maximizer) =
        best.ok_or_else(|| Error::Estimation("no feasible point found by ascent".into()))?;
    // Prefer a cleaned maximizer (floor-level coordinates dropped) when it
    // evaluates at least as well; the reported value stays an evaluated
    // point either way.
    let cleaned = drop_floor_entries(&maximizer)?;
    let (value, maximizer) = match objective(&cleaned)? {
        Some(v) if v >= value => (v, cleaned),
        _ => (value, maximizer),
    };
    Ok(AscentResult { value, maximizer, iterations, starts: starts.len() })
}

struct Climb {
    peak: Option<(f64, FiniteVector)>,
    iterations: usize,
}

fn climb<F>(start: &[f64], objective: &F) -> Result<Climb>
where
    F: Fn(&FiniteVector) -> Result<Option<f64>>,
{
    let n = start.len();
    let mut x = start.to_vec();
    renormalize(&mut x);
    let mut current = match objective(&as_vector(&x)?)? {
        Some(v) => v,
        None => return Ok(Climb { peak: None, iterations: 0 }),
    };
    let mut step = 0.5f64;
    let mut iterations = 0;

    while iterations < MAX_ITERS {
        iterations += 1;
        // Central differences of ln(objective) in log coordinates.
        let mut grad = vec![0.0f64; n];
        let mut flat = true;
        for i in 0..n {
            let mut probe = |factor: f64| -> Result<f64> {
                let saved = x[i];
                x[i] = saved * factor;
                let v = objective(&as_vector(&x)?)?;
                x[i] = saved;
                Ok(v.unwrap_or(current).max(1e-300).ln())
            };
            let up = probe((LOG_PROBE).exp())?;
            let down = probe((-LOG_PROBE).exp())?;
            grad[i] = (up - down) / (2.0 * LOG_PROBE);
            if grad[i] != 0.0 {
                flat = false;
            }
        }
        if flat {
            break;
        }
        let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        for g in &mut grad {
            *g /= scale;
        }

        let mut accepted = None;
        while step >= 1e-12 {
            let candidate: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, g)| (xi * (step * g).exp()).max(FLOOR))
                .collect();
            if let Some(v) = objective(&as_vector(&candidate)?)? {
                if v > current {
                    accepted = Some((v, candidate));
                    break;
                }
            }
            step /= 2.0;
        }
        match accepted {
            None => break,
            Some((v, candidate)) => {
                let gain = (v - current) / current.max(1e-300);
                x = candidate;
                renormalize(&mut x);
                current = v;
                step = (step * 1.25).min(1.0);
                if gain < REL_STOP {
                    break;
                }
            }
        }
    }
    Ok(Climb { peak: Some((current, as_vector(&x)?)), iterations })
}

fn renormalize(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(*v));
    if max > 0.0 {
        for v in x.iter_mut() {
            *v = (*v / max).max(FLOOR);
        }
    }
}

fn as_vector(x: &[f64]) -> Result<FiniteVector> {
    FiniteVector::from_pairs(x.iter().enumerate().map(|(i, &v)| (i + 1, v)))
}

fn drop_floor_entries(x: &FiniteVector) -> Result<FiniteVector> {
    let max = x.values().fold(0.0f64, |m, v| m.max(v.abs()));
    FiniteVector::from_pairs(x.iter().filter(|(_, v)| v.abs() > 1e-12 * max))
}
