//! Independent reference implementations used to certify the main
//! algorithms before they are trusted.
//!
//! Everything here favors being obviously right over being fast: plain
//! summation, full enumeration, exhaustive grids. None of it shares an
//! evaluation path with the routine it checks beyond vector arithmetic, so
//! agreement is evidence rather than tautology. The suite ships in the
//! library (exposed through the CLI) so users can re-certify on their own
//! matrices.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matop::MatrixOperator;
use crate::rng::task_rng;
use crate::seqspace::{self, SpaceKind, SpaceSpec};
use crate::util::conjugate_exponent;
use crate::vector::FiniteVector;
use crate::vmeasure::{integrate, AtomicVectorMeasure};

// ---------------------------------------------------------------------------
// Young-type inequality for powers.

/// Exponent r with 1/r = 1/s + 1/t.
pub fn young_r(s: f64, t: f64) -> f64 {
    s * t / (s + t)
}

/// Both sides of a^r b^r <= (r/s) a^s + (r/t) b^t.
pub fn young_gap(a: f64, b: f64, s: f64, t: f64) -> (f64, f64) {
    let r = young_r(s, t);
    let lhs = a.powf(r) * b.powf(r);
    let rhs = (r / s) * a.powf(s) + (r / t) * b.powf(t);
    (lhs, rhs)
}

/// True iff the inequality holds within 1e-12 relative slack.
pub fn young_check(a: f64, b: f64, s: f64, t: f64) -> bool {
    if !(a >= 0.0 && b >= 0.0 && s > 0.0 && t > 0.0) {
        return false;
    }
    let (lhs, rhs) = young_gap(a, b, s, t);
    lhs <= rhs + 1e-12 * rhs.abs().max(lhs.abs()).max(1.0)
}

// ---------------------------------------------------------------------------
// Naive norm evaluator: plain summation on the raw (uncanonicalized)
// structure. Sum spaces have no closed evaluation, so they are refused.

fn contains_sum(space: &SpaceSpec) -> bool {
    match &space.kind {
        SpaceKind::Lq { .. } | SpaceKind::WeightedLq { .. } => false,
        SpaceKind::Power { base, .. } => contains_sum(base),
        SpaceKind::Sum { .. } => true,
        SpaceKind::Intersection { left, right } => contains_sum(left) || contains_sum(right),
    }
}

/// Reference norm: recursive descent over the descriptor as written, plain
/// f64 accumulation, no canonicalization and no compensation.
pub fn naive_norm(space: &SpaceSpec, f: &FiniteVector) -> Result<f64> {
    match &space.kind {
        SpaceKind::Lq { q } => naive_lq(*q, None, f),
        SpaceKind::WeightedLq { q, weights } => {
            let w: Result<Vec<(usize, f64)>> =
                f.iter().map(|(i, _)| Ok((i, weights.value(i)?))).collect();
            naive_lq(*q, Some(&w?), f)
        }
        SpaceKind::Power { base, p } => Ok(naive_norm(base, &f.abs_pow(*p)?)?.powf(1.0 / p)),
        SpaceKind::Intersection { left, right } => {
            Ok(naive_norm(left, f)?.max(naive_norm(right, f)?))
        }
        SpaceKind::Sum { .. } => Err(Error::Estimation(
            "naive norm has no closed form for sum spaces".into(),
        )),
    }
}

fn naive_lq(q: f64, weights: Option<&[(usize, f64)]>, f: &FiniteVector) -> Result<f64> {
    let weight_at = |i: usize| -> f64 {
        weights.map_or(1.0, |w| {
            w.iter().find(|(k, _)| *k == i).map_or(1.0, |(_, v)| *v)
        })
    };
    if q.is_infinite() {
        return Ok(f
            .iter()
            .map(|(i, v)| weight_at(i) * v.abs())
            .fold(0.0, f64::max));
    }
    let mut s = 0.0f64;
    for (i, v) in f.iter() {
        s += weight_at(i) * v.abs().powf(q);
    }
    Ok(s.powf(1.0 / q))
}

// ---------------------------------------------------------------------------
// Sum-norm brute force: exhaustive aligned grid.

/// Minimum over the aligned grid u_i in {0, |f_i|/g, ..., |f_i|} of
/// ||u sign f||_X + ||(|f| - u) sign f||_Y. An upper bound on the true
/// infimum, tight within the grid modulus.
pub fn sum_norm_bruteforce(
    x_space: &SpaceSpec,
    y_space: &SpaceSpec,
    f: &FiniteVector,
    grid_steps: usize,
) -> Result<f64> {
    x_space.validate()?;
    y_space.validate()?;
    if contains_sum(x_space) || contains_sum(y_space) {
        return Err(Error::Estimation(
            "brute-force factors must not contain sum spaces".into(),
        ));
    }
    if grid_steps == 0 {
        return Err(Error::Precondition("grid_steps must be >= 1".into()));
    }
    let entries: Vec<(usize, f64)> = f.iter().collect();
    let k = entries.len();
    if k == 0 {
        return Ok(0.0);
    }
    if k > 4 {
        return Err(Error::Estimation(format!(
            "brute force is limited to support size 4, got {k}"
        )));
    }

    let g = grid_steps;
    let mut counters = vec![0usize; k];
    let mut best = f64::INFINITY;
    loop {
        let mut u_pairs = Vec::with_capacity(k);
        let mut rest_pairs = Vec::with_capacity(k);
        for (c, (i, v)) in counters.iter().zip(&entries) {
            let sign = v.signum();
            let mag = v.abs();
            let u = mag * (*c as f64) / g as f64;
            u_pairs.push((*i, sign * u));
            rest_pairs.push((*i, sign * (mag - u)));
        }
        let total = naive_norm(x_space, &FiniteVector::from_pairs(u_pairs)?)?
            + naive_norm(y_space, &FiniteVector::from_pairs(rest_pairs)?)?;
        if total < best {
            best = total;
        }

        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(best);
            }
            counters[pos] += 1;
            if counters[pos] <= g {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Exhaustive subset supremum.

/// Exact max over all 2^|supp f| subsets A of ||integrate(m, f, A)||_E, with
/// the lexicographically smallest maximizing subset.
pub fn exhaustive_subset_argmax(
    m: &AtomicVectorMeasure,
    f: &FiniteVector,
) -> Result<(f64, Vec<usize>)> {
    let support: Vec<usize> = f.support().collect();
    let k = support.len();
    if k > 20 {
        return Err(Error::Estimation(format!(
            "exhaustive subsets are limited to support size 20, got {k}"
        )));
    }
    if contains_sum(m.codomain()) {
        return Err(Error::Estimation(
            "exhaustive subset sup needs a sum-free codomain".into(),
        ));
    }
    let mut best = (0.0f64, Vec::new());
    for mask in 0u32..(1 << k) {
        let subset: Vec<usize> = support
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &j)| j)
            .collect();
        let v = naive_norm(m.codomain(), &integrate(m, f, &subset)?)?;
        // Strict improvement keeps the first (mask-lexicographic) maximizer,
        // and lower masks are subsets that come lexicographically first.
        if v > best.0 {
            best = (v, subset);
        }
    }
    Ok(best)
}

/// Value-only form of [`exhaustive_subset_argmax`].
pub fn exhaustive_subset_sup(m: &AtomicVectorMeasure, f: &FiniteVector) -> Result<f64> {
    Ok(exhaustive_subset_argmax(m, f)?.0)
}

// ---------------------------------------------------------------------------
// Randomized dual lower bound for the L1(m) norm.

/// Max over sampled unit vectors y of the dual ball of Σ_j |f_j| |<C_j, y>|.
/// Always a valid lower bound on the L1(m) norm; the sample set contains the
/// norming duals of every column, the normalized all-ones direction, and for
/// each sample index either the norming dual of a randomly signed column
/// combination or a random normalized direction.
pub fn l1m_norm_dual_sample(
    m: &AtomicVectorMeasure,
    f: &FiniteVector,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let q = match &m.codomain().canonical().kind {
        SpaceKind::Lq { q } if *q >= 1.0 => *q,
        _ => {
            return Err(Error::Precondition(format!(
                "dual sampling needs an lq codomain with q >= 1, got {}",
                m.codomain().describe()
            )))
        }
    };
    let qd = conjugate_exponent(q).expect("q >= 1 has a conjugate");
    let n = m.truncation();
    let support: Vec<usize> = f.support().collect();
    let k = support.len();
    if k == 0 {
        return Ok(0.0);
    }
    let mags: Vec<f64> = f.values().map(f64::abs).collect();
    let mut cols = Vec::with_capacity(k);
    for &j in &support {
        cols.push(m.atom(j)?.to_dense(n));
    }

    let value_at = |y: &[f64]| -> f64 {
        let mut total = 0.0;
        for (mag, col) in mags.iter().zip(&cols) {
            let dot: f64 = col.iter().zip(y).map(|(c, yi)| c * yi).sum();
            total += mag * dot.abs();
        }
        total
    };
    let norming = |v: &[f64]| -> Option<Vec<f64>> {
        if q.is_infinite() {
            let (imax, vmax) = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
            if *vmax == 0.0 {
                return None;
            }
            let mut y = vec![0.0; v.len()];
            y[imax] = vmax.signum();
            return Some(y);
        }
        if q == 1.0 {
            return Some(v.iter().map(|x| x.signum()).collect());
        }
        let y: Vec<f64> = v.iter().map(|x| x.signum() * x.abs().powf(q - 1.0)).collect();
        normalize(&y, qd)
    };

    let mut best = 0.0f64;
    for col in &cols {
        if let Some(y) = norming(col) {
            best = best.max(value_at(&y));
        }
    }
    if let Some(y) = normalize(&vec![1.0; n], qd) {
        best = best.max(value_at(&y));
    }

    for r in 0..samples {
        let mut rng = task_rng(seed, "dual-sample", r as u64);
        if r % 2 == 0 {
            // Norming dual of a randomly signed combination of the columns.
            let mut v = vec![0.0f64; n];
            for (mag, col) in mags.iter().zip(&cols) {
                let s: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
                for (vi, c) in v.iter_mut().zip(col) {
                    *vi += s * mag * c;
                }
            }
            if let Some(y) = norming(&v) {
                best = best.max(value_at(&y));
            }
        } else {
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            if let Some(y) = normalize(&raw, qd) {
                best = best.max(value_at(&y));
            }
        }
    }
    Ok(best)
}

fn normalize(y: &[f64], qd: f64) -> Option<Vec<f64>> {
    let nrm = if qd.is_infinite() {
        y.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    } else {
        y.iter().map(|x| x.abs().powf(qd)).sum::<f64>().powf(1.0 / qd)
    };
    if nrm == 0.0 || !nrm.is_finite() {
        return None;
    }
    Some(y.iter().map(|x| x / nrm).collect())
}

// ---------------------------------------------------------------------------
// Triangle-constant scan.

/// Observed max of ||f+g|| / (||f|| + ||g||) over adversarial and random
/// pairs. Callers assert it never exceeds the analytic constant.
pub fn quasinorm_axiom_scan(space: &SpaceSpec, samples: usize, seed: u64) -> Result<f64> {
    space.validate()?;
    let ratio = |f: &FiniteVector, g: &FiniteVector| -> Result<Option<f64>> {
        let den = seqspace::norm(space, f)? + seqspace::norm(space, g)?;
        if den < 1e-12 {
            return Ok(None);
        }
        Ok(Some(seqspace::norm(space, &f.add(g))? / den))
    };

    let mut best = 0.0f64;
    // Disjoint unit pairs saturate the constant for q < 1; equal pairs and
    // opposite pairs probe the other edges.
    let adversarial = [
        (FiniteVector::basis(1), FiniteVector::basis(2)),
        (FiniteVector::basis(1), FiniteVector::basis(1)),
        (
            FiniteVector::from_pairs([(1, 1.0), (2, 1.0)])?,
            FiniteVector::from_pairs([(1, 1.0), (2, -1.0)])?,
        ),
    ];
    for (f, g) in &adversarial {
        if let Some(v) = ratio(f, g)? {
            best = best.max(v);
        }
    }

    for r in 0..samples {
        let mut rng = task_rng(seed, "axiom-scan", r as u64);
        let f = random_vector(&mut rng, 24, 6)?;
        let g = if r % 2 == 0 {
            // Disjoint from f: shift the support window.
            random_vector_offset(&mut rng, 24, 6, 24)?
        } else {
            random_vector(&mut rng, 24, 6)?
        };
        if f.is_zero() || g.is_zero() {
            continue;
        }
        if let Some(v) = ratio(&f, &g)? {
            best = best.max(v);
        }
    }
    Ok(best)
}

fn random_vector(rng: &mut impl Rng, index_range: usize, max_support: usize) -> Result<FiniteVector> {
    random_vector_offset(rng, index_range, max_support, 0)
}

fn random_vector_offset(
    rng: &mut impl Rng,
    index_range: usize,
    max_support: usize,
    offset: usize,
) -> Result<FiniteVector> {
    let size = rng.random_range(1..=max_support);
    let mut pairs = Vec::with_capacity(size);
    for _ in 0..size {
        let i = offset + rng.random_range(1..=index_range);
        let mag = 10f64.powf(rng.random_range(-3.0..1.0));
        let v = if rng.random::<bool>() { mag } else { -mag };
        pairs.push((i, v));
    }
    pairs.sort_by_key(|&(i, _)| i);
    pairs.dedup_by_key(|&mut (i, _)| i);
    FiniteVector::from_pairs(pairs)
}

// ---------------------------------------------------------------------------
// Simplex-grid maximization for constants over the nonnegative cone.

/// Visit every x with x_i = k_i/steps, k_i >= 0 integers summing to steps,
/// supported on [1, n]. Scale-invariant objectives over the nonnegative cone
/// are covered ray by ray. `objective` returns None to skip a point.
pub fn simplex_grid_max(
    n: usize,
    steps: usize,
    mut objective: impl FnMut(&FiniteVector) -> Result<Option<f64>>,
) -> Result<f64> {
    if n == 0 || steps == 0 {
        return Err(Error::Precondition("simplex grid needs n >= 1 and steps >= 1".into()));
    }
    let mut counts = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    visit(&mut counts, 0, steps, &mut |counts| {
        let x = FiniteVector::from_pairs(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i + 1, c as f64 / steps as f64)),
        )?;
        if let Some(v) = objective(&x)? {
            if v > best {
                best = v;
            }
        }
        Ok(())
    })?;
    if best == f64::NEG_INFINITY {
        return Err(Error::Estimation("no feasible grid point".into()));
    }
    Ok(best)
}

fn visit(
    counts: &mut [usize],
    pos: usize,
    remaining: usize,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        f(counts)?;
        counts[pos] = 0;
        return Ok(());
    }
    for c in 0..=remaining {
        counts[pos] = c;
        visit(counts, pos + 1, remaining - c, f)?;
    }
    counts[pos] = 0;
    Ok(())
}

/// Grid reference for the best factorization constant: max over simplex rays
/// of ||Mx||_E / ||x||_domain, evaluated through apply + norm only.
pub fn grid_best_constant(
    m: &MatrixOperator,
    e: &SpaceSpec,
    domain: &SpaceSpec,
    n: usize,
    n_e: usize,
    steps: usize,
) -> Result<f64> {
    simplex_grid_max(n, steps, |x| {
        let den = seqspace::norm(domain, x)?;
        if den == 0.0 {
            return Ok(None);
        }
        let num = seqspace::norm(e, &m.apply(x, n_e)?)?;
        Ok(Some(num / den))
    })
}
