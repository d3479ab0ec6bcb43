//! Sum-space norm: infimum over decompositions f = f1 + f2 of
//! ‖f1‖_X + ‖f2‖_Y.
//!
//! Arbitrary decompositions are dominated by aligned ones (truncate f1
//! against f by the lattice structure and give the remainder to f2), so the
//! search runs over the box 0 ≤ u ≤ |f|: f1 = u·sign f, f2 = (|f|-u)·sign f.
//!
//! When both factors are norms the objective is convex and cyclic
//! coordinate-wise golden-section descent suffices; with a quasi-norm factor
//! the objective is multimodal, so the solver adds seeded multi-starts, a
//! per-coordinate scan before each line search, and a refinement grid.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::rng::task_rng;
use crate::vector::FiniteVector;
use rand::Rng;

use super::{norm_canonical, SpaceKind, SpaceSpec};

#[derive(Clone, Debug)]
pub struct SumNormOptions {
    pub seed: u64,
    /// Start count for the multimodal case; the convex case uses a fixed
    /// small set of starts.
    pub starts: usize,
    /// Relative improvement threshold that ends the descent.
    pub tol: f64,
    /// Refinement-grid resolution per coordinate.
    pub grid: usize,
    pub max_passes: usize,
    pub mode: ExecMode,
}

impl Default for SumNormOptions {
    fn default() -> Self {
        SumNormOptions {
            seed: 0,
            starts: 32,
            tol: 1e-8,
            grid: 64,
            max_passes: 200,
            mode: ExecMode::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SumDecomposition {
    /// inf ‖f1‖_X + ‖f2‖_Y over aligned decompositions, up to the solver
    /// tolerance.
    pub value: f64,
    pub left_part: FiniteVector,
    pub right_part: FiniteVector,
    pub left_norm: f64,
    pub right_norm: f64,
    /// Which start reached the reported value (lowest index on ties).
    pub start_index: usize,
    /// Final value of every start, in start order.
    pub start_values: Vec<f64>,
}

/// Public entry point; requires a Sum space.
pub fn sum_norm_decomposition(
    space: &SpaceSpec,
    f: &FiniteVector,
    opts: &SumNormOptions,
) -> Result<SumDecomposition> {
    space.validate()?;
    let canon = space.canonical();
    match &canon.kind {
        SpaceKind::Sum { left, right } => solve(left, right, f, opts),
        _ => Err(Error::Precondition(format!(
            "sum_norm_decomposition requires a Sum space, got {}",
            space.describe()
        ))),
    }
}

struct Objective<'a> {
    idx: Vec<usize>,
    mag: Vec<f64>,
    sgn: Vec<f64>,
    left: &'a SpaceSpec,
    right: &'a SpaceSpec,
}

impl Objective<'_> {
    fn part(&self, u: &[f64], left_side: bool) -> FiniteVector {
        let entries = (0..self.idx.len())
            .map(|i| {
                let m = if left_side { u[i] } else { self.mag[i] - u[i] };
                (self.idx[i], m.max(0.0) * self.sgn[i])
            })
            .collect();
        FiniteVector::from_sorted_magnitudes(entries)
    }

    fn eval_parts(&self, u: &[f64]) -> Result<(f64, f64)> {
        let a = norm_canonical(self.left, &self.part(u, true))?;
        let b = norm_canonical(self.right, &self.part(u, false))?;
        Ok((a, b))
    }

    fn eval(&self, u: &[f64]) -> Result<f64> {
        let (a, b) = self.eval_parts(u)?;
        Ok(a + b)
    }
}

pub(crate) fn solve(
    left: &SpaceSpec,
    right: &SpaceSpec,
    f: &FiniteVector,
    opts: &SumNormOptions,
) -> Result<SumDecomposition> {
    if f.is_zero() {
        return Ok(SumDecomposition {
            value: 0.0,
            left_part: FiniteVector::zero(),
            right_part: FiniteVector::zero(),
            left_norm: 0.0,
            right_norm: 0.0,
            start_index: 0,
            start_values: vec![0.0],
        });
    }

    let idx: Vec<usize> = f.support().collect();
    let mag: Vec<f64> = f.values().map(f64::abs).collect();
    let sgn: Vec<f64> = f.values().map(f64::signum).collect();
    let obj = Objective { idx, mag: mag.clone(), sgn, left, right };
    let k = mag.len();

    let convex = left.is_norm() && right.is_norm();
    let mut starts: Vec<Vec<f64>> = vec![
        vec![0.0; k],
        mag.clone(),
        mag.iter().map(|m| m / 2.0).collect(),
    ];
    let random_starts = if convex { 5 } else { opts.starts.max(3) - 3 };
    for t in 0..random_starts {
        let mut rng = task_rng(opts.seed, "sum-norm-start", t as u64);
        starts.push(mag.iter().map(|m| m * rng.random::<f64>()).collect());
    }

    let results = exec::map_indexed(opts.mode, starts.len(), |t| {
        let mut u = starts[t].clone();
        let v = descend(&obj, &mut u, convex, opts)?;
        Ok((v, u))
    })?;

    let mut best_t = 0usize;
    for (t, (v, _)) in results.iter().enumerate() {
        if *v < results[best_t].0 {
            best_t = t;
        }
    }
    let (_, ref u_best) = results[best_t];
    let left_part = obj.part(u_best, true);
    let right_part = obj.part(u_best, false);
    let (left_norm, right_norm) = obj.eval_parts(u_best)?;

    Ok(SumDecomposition {
        value: left_norm + right_norm,
        left_part,
        right_part,
        left_norm,
        right_norm,
        start_index: best_t,
        start_values: results.iter().map(|(v, _)| *v).collect(),
    })
}

fn descend(obj: &Objective, u: &mut [f64], convex: bool, opts: &SumNormOptions) -> Result<f64> {
    let k = u.len();
    let mut prev = obj.eval(u)?;
    for _ in 0..opts.max_passes {
        for i in 0..k {
            line_min(obj, u, i, convex)?;
        }
        let cur = obj.eval(u)?;
        if prev - cur <= opts.tol * cur.abs().max(1.0) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    if !convex {
        grid_refine(obj, u, opts)?;
        for i in 0..k {
            line_min(obj, u, i, false)?;
        }
        prev = obj.eval(u)?;
    }
    Ok(prev)
}

/// Minimize the objective over coordinate i on [0, mag_i], endpoints
/// included. The non-convex case brackets with a coarse scan first because
/// the slice need not be unimodal.
fn line_min(obj: &Objective, u: &mut [f64], i: usize, convex: bool) -> Result<()> {
    let hi = obj.mag[i];
    if hi == 0.0 {
        return Ok(());
    }

    let (mut lo_b, mut hi_b) = (0.0, hi);
    if !convex {
        let cells = 16;
        let mut best_t = 0.0;
        let mut best_v = f64::INFINITY;
        for c in 0..=cells {
            let t = hi * c as f64 / cells as f64;
            let v = eval_coord(obj, u, i, t)?;
            if v < best_v {
                best_v = v;
                best_t = t;
            }
        }
        let h = hi / cells as f64;
        lo_b = (best_t - h).max(0.0);
        hi_b = (best_t + h).min(hi);
    }

    // Golden-section on [lo_b, hi_b].
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo_b, hi_b);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = eval_coord(obj, u, i, c)?;
    let mut fd = eval_coord(obj, u, i, d)?;
    let width_tol = (hi_b - lo_b) * 1e-10;
    while b - a > width_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = eval_coord(obj, u, i, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = eval_coord(obj, u, i, d)?;
        }
    }
    let mid = 0.5 * (a + b);

    // Candidate set always includes the box corners and the current point.
    let mut best = (u[i], eval_coord(obj, u, i, u[i])?);
    for t in [mid, 0.0, hi] {
        let v = eval_coord(obj, u, i, t)?;
        if v < best.1 {
            best = (t, v);
        }
    }
    u[i] = best.0;
    Ok(())
}

fn eval_coord(obj: &Objective, u: &mut [f64], i: usize, t: f64) -> Result<f64> {
    let saved = u[i];
    u[i] = t;
    let v = obj.eval(u);
    u[i] = saved;
    v
}

fn grid_refine(obj: &Objective, u: &mut [f64], opts: &SumNormOptions) -> Result<()> {
    let k = u.len();
    let g = opts.grid.max(2);
    let mut current = obj.eval(u)?;
    for _ in 0..50 {
        let mut improved = false;
        for i in 0..k {
            let hi = obj.mag[i];
            if hi == 0.0 {
                continue;
            }
            let saved = u[i];
            let mut best = (saved, current);
            for c in 0..=g {
                let t = hi * c as f64 / g as f64;
                u[i] = t;
                let v = obj.eval(u)?;
                if v < best.1 {
                    best = (t, v);
                }
            }
            u[i] = best.0;
            if best.1 < current - 1e-15 * current.abs().max(1.0) {
                current = best.1;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(())
}
