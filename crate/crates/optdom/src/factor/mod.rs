//! Constants governing p-th power factorability and r-power domination,
//! with the sufficient-condition series and verdict reports.
//!
//! Every constant reported here is an evaluated feasible point, a certified
//! lower bound on the corresponding supremum. Verdicts about the infinite
//! matrix are finite-truncation evidence unless a declared decay model
//! closes the tail; reports say which.

mod ascent;
pub mod report;

pub use ascent::{maximize_over_cone, AscentResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::growth::{fit_growth, GrowthFit, GrowthVerdict};
use crate::matop::{column_norm, MatrixOperator};
use crate::seqspace::{self, SpaceKind, SpaceSpec};
use crate::util::conjugate_exponent;
use crate::vector::FiniteVector;
use crate::vmeasure::{l1m_norm, lpm_norm, AtomicVectorMeasure, EvalOptions};

/// One optimized constant with the evidence behind it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub n: usize,
    pub n_e: usize,
    pub value: f64,
    pub maximizer: FiniteVector,
    pub starts: usize,
    pub iterations: usize,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesVerdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// Partial sums of a positive series with a growth-fit verdict and, when a
/// decay model covers the tail, a certified remainder bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesReport {
    pub exponent: f64,
    pub partial_sums: Vec<(usize, f64)>,
    pub tail_bound: Option<f64>,
    /// True only when every summand bracket closed and the tail is bounded
    /// by a declared model.
    pub certified: bool,
    pub verdict: SeriesVerdict,
    pub note: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorVerdict {
    BoundedEvidence,
    UnboundedEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorabilityReport {
    pub schema_version: u32,
    pub matrix: String,
    pub codomain: String,
    pub p: f64,
    pub schedule: Vec<usize>,
    pub constants: Vec<ConstantEstimate>,
    pub growth: GrowthFit,
    pub condition_i: SeriesReport,
    pub condition_ii: Option<SeriesReport>,
    /// C_p(n) must not decrease along the schedule; false flags the
    /// optimizer, not the matrix.
    pub monotone_ok: bool,
    pub verdict: FactorVerdict,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominationCheck {
    pub r: f64,
    pub d: ConstantEstimate,
    pub b: ConstantEstimate,
    pub tol: f64,
    pub first_half_ok: bool,
    pub second_half_ok: bool,
}

/// Growth fit for a partial-sum sequence. A convergent series front-loads its
/// mass, so the head of the sequence is all transient; only the tail half is
/// fit.
fn fit_series(partial_sums: &[(usize, f64)]) -> GrowthFit {
    let tail_start = partial_sums.len() / 2;
    let pts: Vec<(f64, f64)> =
        partial_sums[tail_start..].iter().map(|&(n, s)| (n as f64, s)).collect();
    fit_growth(&pts)
}

fn exponent_str(fit: &GrowthFit) -> String {
    match fit.exponent {
        Some(e) => format!("{e:.3}"),
        None => "undefined".into(),
    }
}

// ---------------------------------------------------------------------------
// Best factorization constant.

/// sup over nonnegative x on [1, n] of ‖Mx‖_E / ‖x‖_domain, at square
/// truncation n_E = n. The ascent value is a lower bound; when the image of
/// the window extends past row n the notes say so.
pub fn best_constant(
    m: &MatrixOperator,
    e: &SpaceSpec,
    domain: &SpaceSpec,
    n: usize,
    opts: &EvalOptions,
) -> Result<ConstantEstimate> {
    opts.validate()?;
    e.validate()?;
    domain.validate()?;
    if n == 0 {
        return Err(Error::Precondition("best_constant needs n >= 1".into()));
    }
    let n_e = n;
    let objective = |x: &FiniteVector| -> Result<Option<f64>> {
        let den = seqspace::norm(domain, x)?;
        if den == 0.0 {
            return Ok(None);
        }
        Ok(Some(seqspace::norm(e, &m.apply(x, n_e)?)? / den))
    };
    let res = maximize_over_cone(n, opts.restarts, opts.seed, "best-constant", opts.mode, objective)?;

    let mut notes = Vec::new();
    if image_extends_past(m, n, n_e) {
        notes.push(format!(
            "image of [1, {n}] extends past row {n_e}; value is a lower bound at this truncation"
        ));
    }
    Ok(ConstantEstimate {
        n,
        n_e,
        value: res.value,
        maximizer: res.maximizer,
        starts: res.starts,
        iterations: res.iterations,
        notes,
    })
}

fn image_extends_past(m: &MatrixOperator, n: usize, n_e: usize) -> bool {
    (1..=n).any(|j| match m.column_support_range(j) {
        (_, None) => true,
        (_, Some(hi)) => hi > n_e,
    })
}

// ---------------------------------------------------------------------------
// Condition (I): Σ_j ‖C_j‖_E^{p′}.

pub fn condition_i(
    m: &MatrixOperator,
    e: &SpaceSpec,
    p: f64,
    n: usize,
    use_tail: bool,
) -> Result<SeriesReport> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Precondition(format!(
            "condition (I) needs finite p > 1, got {p}"
        )));
    }
    let pd = conjugate_exponent(p).expect("p > 1 has a conjugate");
    let mut sum = 0.0f64;
    let mut partial_sums = Vec::with_capacity(n);
    let mut closed = true;
    for j in 1..=n {
        let est = column_norm(m, j, e, n, use_tail)?;
        let bound = match est.upper {
            Some(u) => u,
            None => {
                closed = false;
                est.lower
            }
        };
        sum += bound.powf(pd);
        partial_sums.push((j, sum));
    }
    let tail_bound = if use_tail {
        m.column_norm_decay().and_then(|model| model.series_tail(n, pd))
    } else {
        None
    };
    let certified = closed && tail_bound.is_some();

    let (verdict, note) = if certified {
        (
            SeriesVerdict::Converges,
            format!(
                "certified: column-norm brackets closed on [1, {n}] and the declared decay \
                 bounds the remainder"
            ),
        )
    } else if n == 0 {
        (SeriesVerdict::Inconclusive, "empty series".into())
    } else {
        let fit = fit_series(&partial_sums);
        match fit.verdict {
            GrowthVerdict::BoundedEvidence => (
                SeriesVerdict::Converges,
                format!(
                    "finite-truncation evidence: partial sums flatten \
                     (fit exponent {})",
                    exponent_str(&fit)
                ),
            ),
            GrowthVerdict::UnboundedEvidence => (
                SeriesVerdict::Diverges,
                format!(
                    "finite-truncation evidence: partial sums grow (fit exponent {}); \
                     the condition is sufficient only, divergence does not refute \
                     factorability",
                    exponent_str(&fit)
                ),
            ),
            GrowthVerdict::Inconclusive => {
                (SeriesVerdict::Inconclusive, "growth fit inconclusive".into())
            }
        }
    };
    Ok(SeriesReport { exponent: pd, partial_sums, tail_bound, certified, verdict, note })
}

// ---------------------------------------------------------------------------
// Condition (II) via rows: Σ_i ‖F_i‖_{ℓ¹}^q.

pub fn rows_condition(m: &MatrixOperator, q: f64, n: usize) -> Result<SeriesReport> {
    if !m.is_nonnegative() {
        return Err(Error::Precondition(format!(
            "rows condition applies to nonnegative matrices; {} is not known nonnegative",
            m.name()
        )));
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::Precondition(format!(
            "rows condition needs finite q >= 1, got {q}"
        )));
    }
    let mut sum = 0.0f64;
    let mut partial_sums = Vec::with_capacity(n);
    for i in 1..=n {
        sum += m.row_l1(i, n)?.powf(q);
        partial_sums.push((i, sum));
    }
    let (verdict, note) = if n == 0 {
        (SeriesVerdict::Inconclusive, "empty series".into())
    } else {
        let fit = fit_series(&partial_sums);
        match fit.verdict {
            GrowthVerdict::BoundedEvidence => (
                SeriesVerdict::Converges,
                format!(
                    "rows condition met at this truncation (fit exponent {}): \
                     power domination follows from the sufficient condition \
                     (finite-truncation evidence)",
                    exponent_str(&fit)
                ),
            ),
            GrowthVerdict::UnboundedEvidence => (
                SeriesVerdict::Diverges,
                format!(
                    "row sums grow (fit exponent {}); the sufficient condition fails \
                     at this truncation",
                    exponent_str(&fit)
                ),
            ),
            GrowthVerdict::Inconclusive => {
                (SeriesVerdict::Inconclusive, "growth fit inconclusive".into())
            }
        }
    };
    Ok(SeriesReport {
        exponent: q,
        partial_sums,
        tail_bound: None,
        certified: false,
        verdict,
        note,
    })
}

// ---------------------------------------------------------------------------
// r-power domination constant.

/// sup over nonnegative x ≠ 0 on [1, n] of
/// ‖Σ_j x_j^r C_j‖_E^{1/r} / sup_{N ⊆ [1,n]} ‖Σ_{j∈N} x_j C_j‖_E.
///
/// Denominator policy: full set for a nonnegative matrix, exhaustive subsets
/// for n ≤ n_enum, greedy subset search otherwise.
pub fn power_domination_constant(
    m: &MatrixOperator,
    e: &SpaceSpec,
    r: f64,
    n: usize,
    opts: &EvalOptions,
) -> Result<ConstantEstimate> {
    opts.validate()?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Precondition(format!(
            "domination exponent must be finite and positive, got {r}"
        )));
    }
    if n == 0 {
        return Err(Error::Precondition("power_domination_constant needs n >= 1".into()));
    }
    let n_e = n;
    let prepared = seqspace::PreparedNorm::new(e)?;
    let mut cols = Vec::with_capacity(n);
    for j in 1..=n {
        cols.push(m.column(j, n_e)?.to_dense(n_e));
    }
    let nonneg = m.is_nonnegative();
    let exhaustive = n <= opts.n_enum;

    let objective = |x: &FiniteVector| -> Result<Option<f64>> {
        let xd = x.to_dense(n);
        let num_vec = weighted_column_sum(&cols, &xd, Some(r));
        let num = prepared.eval_dense(&num_vec)?.powf(1.0 / r);
        let den = if nonneg {
            prepared.eval_dense(&weighted_column_sum(&cols, &xd, None))?
        } else if exhaustive {
            exhaustive_den(&prepared, &cols, &xd)?
        } else {
            greedy_den(&prepared, &cols, &xd)?
        };
        if den <= 0.0 {
            return Ok(None);
        }
        Ok(Some(num / den))
    };
    let res =
        maximize_over_cone(n, opts.restarts, opts.seed, "power-domination", opts.mode, objective)?;

    let mut notes = Vec::new();
    if r > 1.0 {
        notes.push(format!("exponent r = {r} > 1 is unusual; checks apply r in (0, 1]"));
    }
    notes.push(if nonneg {
        "denominator: full-set value (nonnegative matrix)".into()
    } else if exhaustive {
        format!("denominator: exhaustive subsets of [1, {n}]")
    } else {
        "denominator: greedy subset search (lower bound, ratio may overestimate)".into()
    });
    Ok(ConstantEstimate {
        n,
        n_e,
        value: res.value,
        maximizer: res.maximizer,
        starts: res.starts,
        iterations: res.iterations,
        notes,
    })
}

fn weighted_column_sum(cols: &[Vec<f64>], x: &[f64], power: Option<f64>) -> Vec<f64> {
    let n_e = cols[0].len();
    let mut y = vec![0.0f64; n_e];
    for (xj, col) in x.iter().zip(cols) {
        if *xj == 0.0 {
            continue;
        }
        let w = match power {
            Some(r) => xj.powf(r),
            None => *xj,
        };
        for (yi, c) in y.iter_mut().zip(col) {
            *yi += w * c;
        }
    }
    y
}

fn exhaustive_den(
    prepared: &seqspace::PreparedNorm,
    cols: &[Vec<f64>],
    x: &[f64],
) -> Result<f64> {
    let k = cols.len();
    let n_e = cols[0].len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << k) {
        let mut y = vec![0.0f64; n_e];
        for (j, col) in cols.iter().enumerate() {
            if mask >> j & 1 == 1 && x[j] != 0.0 {
                for (yi, c) in y.iter_mut().zip(col) {
                    *yi += x[j] * c;
                }
            }
        }
        best = best.max(prepared.eval_dense(&y)?);
    }
    Ok(best)
}

fn greedy_den(
    prepared: &seqspace::PreparedNorm,
    cols: &[Vec<f64>],
    x: &[f64],
) -> Result<f64> {
    let k = cols.len();
    let n_e = cols[0].len();
    let mut in_set = vec![false; k];
    let mut y = vec![0.0f64; n_e];
    let mut best = 0.0f64;
    loop {
        let mut improved = false;
        for j in 0..k {
            if x[j] == 0.0 {
                continue;
            }
            let sign = if in_set[j] { -1.0 } else { 1.0 };
            let toggled: Vec<f64> = y
                .iter()
                .zip(&cols[j])
                .map(|(yi, c)| yi + sign * x[j] * c)
                .collect();
            let v = prepared.eval_dense(&toggled)?;
            if v > best {
                y = toggled;
                in_set[j] = !in_set[j];
                best = v;
                improved = true;
            }
        }
        if !improved {
            return Ok(best);
        }
    }
}

// ---------------------------------------------------------------------------
// Domination vs embedding, both halves of the equivalence.

/// D = power domination constant; B = sup ‖x‖_{L^r(m)} / ‖x‖_{L¹(m)} over
/// nonnegative x on [1, n]. The quantitative halves of the equivalence are
/// asserted as D ≤ 2B + tol and B ≤ 2^{1/r}·D + tol.
pub fn domination_embedding_check(
    m: &MatrixOperator,
    e: &SpaceSpec,
    r: f64,
    n: usize,
    opts: &EvalOptions,
) -> Result<DominationCheck> {
    opts.validate()?;
    if n > opts.n_enum {
        return Err(Error::Precondition(format!(
            "embedding check needs exact measure norms: n = {n} exceeds n_enum = {}",
            opts.n_enum
        )));
    }
    let d = power_domination_constant(m, e, r, n, opts)?;

    let measure = AtomicVectorMeasure::new(m.clone(), e.clone(), n)?;
    let objective = |x: &FiniteVector| -> Result<Option<f64>> {
        let den = l1m_norm(&measure, x, opts)?;
        let den = den.value.expect("exact branch");
        if den == 0.0 {
            return Ok(None);
        }
        let num = lpm_norm(&measure, x, r, opts)?.value.expect("exact branch");
        Ok(Some(num / den))
    };
    let res =
        maximize_over_cone(n, opts.restarts, opts.seed, "embedding-ratio", opts.mode, objective)?;
    let b = ConstantEstimate {
        n,
        n_e: n,
        value: res.value,
        maximizer: res.maximizer,
        starts: res.starts,
        iterations: res.iterations,
        notes: vec!["ratio of exact measure norms".into()],
    };

    let tol = 1e-6;
    Ok(DominationCheck {
        r,
        first_half_ok: d.value <= 2.0 * b.value + tol,
        second_half_ok: b.value <= 2f64.powf(1.0 / r) * d.value + tol,
        d,
        b,
        tol,
    })
}

// ---------------------------------------------------------------------------
// Two routes to the same vector.

/// Integration against the attached measure must reproduce plain matrix
/// application coordinatewise to 1e-12.
pub fn extension_consistency(
    m: &MatrixOperator,
    e: &SpaceSpec,
    f: &FiniteVector,
    n_e: usize,
) -> Result<bool> {
    let measure = AtomicVectorMeasure::new(m.clone(), e.clone(), n_e)?;
    let support: Vec<usize> = f.support().collect();
    let via_measure = crate::vmeasure::integrate(&measure, f, &support)?;
    let direct = m.apply(f, n_e)?;
    for i in 1..=n_e {
        let (a, b) = (via_measure.get(i), direct.get(i));
        if (a - b).abs() > 1e-12 * b.abs().max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// The full report.

pub fn factorability_verdict(
    m: &MatrixOperator,
    e: &SpaceSpec,
    p: f64,
    schedule: &[usize],
    opts: &EvalOptions,
) -> Result<FactorabilityReport> {
    opts.validate()?;
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Precondition(format!(
            "factorability needs finite p > 1, got {p}"
        )));
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "schedule must be nonempty and strictly increasing".into(),
        ));
    }
    let domain = SpaceSpec::lq(p);
    let constants = exec::map_indexed(opts.mode, schedule.len(), |s| {
        best_constant(m, e, &domain, schedule[s], opts)
    })?;

    let mut warnings = Vec::new();
    let mut monotone_ok = true;
    for w in constants.windows(2) {
        if w[1].value < w[0].value - 1e-9 {
            monotone_ok = false;
            warnings.push(format!(
                "C_p({}) = {:.6e} fell below C_p({}) = {:.6e}: optimizer missed a feasible \
                 point",
                w[1].n, w[1].value, w[0].n, w[0].value
            ));
        }
    }

    let points: Vec<(f64, f64)> = constants.iter().map(|c| (c.n as f64, c.value)).collect();
    let growth = fit_growth(&points);
    let last_n = *schedule.last().expect("nonempty");
    let condition_i = condition_i(m, e, p, last_n, opts.use_tail)?;

    let condition_ii = match &e.canonical().kind {
        SpaceKind::Lq { q } if q.is_finite() && *q >= 1.0 && m.is_nonnegative() => {
            Some(rows_condition(m, *q, last_n)?)
        }
        _ => None,
    };

    let verdict = if condition_i.verdict == SeriesVerdict::Converges {
        FactorVerdict::BoundedEvidence
    } else {
        match growth.verdict {
            GrowthVerdict::BoundedEvidence => FactorVerdict::BoundedEvidence,
            GrowthVerdict::UnboundedEvidence => FactorVerdict::UnboundedEvidence,
            GrowthVerdict::Inconclusive => FactorVerdict::Inconclusive,
        }
    };

    Ok(FactorabilityReport {
        schema_version: 1,
        matrix: m.name().to_string(),
        codomain: e.describe(),
        p,
        schedule: schedule.to_vec(),
        constants,
        growth,
        condition_i,
        condition_ii,
        monotone_ok,
        verdict,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::seqspace::SeqGen;

    fn opts() -> EvalOptions {
        EvalOptions { restarts: 6, ..EvalOptions::default() }
    }

    #[test]
    fn best_constant_identity_l2_to_l1_is_sqrt_n() {
        let c = best_constant(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            &SpaceSpec::lq(2.0),
            4,
            &opts(),
        )
        .unwrap();
        assert!((c.value - 2.0).abs() < 1e-6, "got {}", c.value);
        assert!(c.notes.is_empty(), "identity image stays inside the window");

        let grid = oracle::grid_best_constant(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            &SpaceSpec::lq(2.0),
            4,
            4,
            64,
        )
        .unwrap();
        assert!((c.value - grid).abs() <= 0.01 * grid);
    }

    #[test]
    fn best_constant_diagonal_matches_hoelder_dual_norm() {
        let d = MatrixOperator::diagonal(SeqGen::Explicit { values: vec![1.0, 0.5, 0.25] })
            .unwrap();
        let c = best_constant(&d, &SpaceSpec::lq(1.0), &SpaceSpec::lq(2.0), 3, &opts()).unwrap();
        let expect = (1.0f64 + 0.25 + 0.0625).sqrt();
        assert!((c.value - expect).abs() < 1e-5, "got {} want {expect}", c.value);
        let grid =
            oracle::grid_best_constant(&d, &SpaceSpec::lq(1.0), &SpaceSpec::lq(2.0), 3, 3, 64)
                .unwrap();
        assert!((c.value - grid).abs() <= 0.01 * grid);
    }

    #[test]
    fn best_constant_single_point_is_the_column_ratio() {
        let c = best_constant(
            &MatrixOperator::hilbert(),
            &SpaceSpec::lq(2.0),
            &SpaceSpec::lq(1.0),
            1,
            &opts(),
        )
        .unwrap();
        let col = MatrixOperator::hilbert().column(1, 1).unwrap();
        let expect = seqspace::norm(&SpaceSpec::lq(2.0), &col).unwrap();
        assert!((c.value - expect).abs() < 1e-9);
        assert!(!c.notes.is_empty(), "hilbert image extends past the window");
    }

    #[test]
    fn best_constant_l1_domain_picks_the_best_column() {
        // Extreme points of the positive l1 sphere are the e_j, so the
        // constant is the largest column norm.
        let m = MatrixOperator::cesaro();
        let c = best_constant(&m, &SpaceSpec::lq(2.0), &SpaceSpec::lq(1.0), 5, &opts()).unwrap();
        let best_col = (1..=5)
            .map(|j| column_norm(&m, j, &SpaceSpec::lq(2.0), 5, false).unwrap().lower)
            .fold(0.0f64, f64::max);
        assert!((c.value - best_col).abs() < 1e-9, "got {} want {best_col}", c.value);
    }

    #[test]
    fn condition_i_geometric_diagonal_converges() {
        let d = MatrixOperator::diagonal(SeqGen::Geometric { constant: 1.0, ratio: 0.5 })
            .unwrap();
        let rep = condition_i(&d, &SpaceSpec::lq(1.0), 2.0, 10, false).unwrap();
        assert_eq!(rep.exponent, 2.0);
        let last = rep.partial_sums.last().unwrap().1;
        assert!((last - 1.0 / 3.0).abs() < 1e-5, "sum of 4^-j is 1/3, got {last}");
        assert_eq!(rep.verdict, SeriesVerdict::Converges);
        assert!(!rep.certified);
    }

    #[test]
    fn condition_i_certifies_with_declared_decay() {
        let json = serde_json::json!({
            "kind": "diagonal",
            "params": {"kind": "geometric", "ratio": 0.5},
            "column_norm_decay": {"kind": "geometric", "ratio": 0.5}
        });
        let d = MatrixOperator::from_json_value(&json, None).unwrap();
        let rep = condition_i(&d, &SpaceSpec::lq(1.0), 2.0, 8, true).unwrap();
        assert!(rep.certified);
        assert_eq!(rep.verdict, SeriesVerdict::Converges);
        let tail = rep.tail_bound.unwrap();
        // Remainder of sum 4^-j past n = 8.
        assert!((tail - 0.25f64.powi(9) / (1.0 - 0.25)).abs() < 1e-18);
    }

    #[test]
    fn condition_i_identity_diverges_but_is_sufficient_only() {
        let rep =
            condition_i(&MatrixOperator::identity(), &SpaceSpec::lq(2.0), 2.0, 16, false)
                .unwrap();
        assert_eq!(rep.verdict, SeriesVerdict::Diverges);
        assert!(rep.note.contains("sufficient only"));
        assert_eq!(rep.partial_sums.last().unwrap().1, 16.0);
        let empty = condition_i(&MatrixOperator::identity(), &SpaceSpec::lq(2.0), 2.0, 0, false)
            .unwrap();
        assert_eq!(empty.verdict, SeriesVerdict::Inconclusive);
    }

    #[test]
    fn rows_condition_pinned_examples() {
        // a_ij = 2^-i for j <= i: row sums i·2^-i, total -> 2.
        let m = MatrixOperator::lower(SeqGen::Geometric { constant: 1.0, ratio: 0.5 }).unwrap();
        let rep = rows_condition(&m, 1.0, 14).unwrap();
        let last = rep.partial_sums.last().unwrap().1;
        assert!((last - 2.0).abs() < 1e-2, "sum i 2^-i -> 2, got {last}");
        assert_eq!(rep.verdict, SeriesVerdict::Converges);

        let ces = rows_condition(&MatrixOperator::cesaro(), 1.0, 16).unwrap();
        assert_eq!(ces.partial_sums.last().unwrap().1, 16.0);
        assert_eq!(ces.verdict, SeriesVerdict::Diverges);

        let id = rows_condition(&MatrixOperator::identity(), 2.0, 16).unwrap();
        assert_eq!(id.verdict, SeriesVerdict::Diverges);

        let signed = MatrixOperator::dense(vec![vec![1.0, -1.0], vec![0.0, 1.0]]).unwrap();
        assert!(rows_condition(&signed, 1.0, 2).is_err());
    }

    #[test]
    fn domination_r_one_nonnegative_is_unity() {
        let c = power_domination_constant(
            &MatrixOperator::cesaro(),
            &SpaceSpec::lq(1.0),
            1.0,
            4,
            &opts(),
        )
        .unwrap();
        assert!((c.value - 1.0).abs() < 1e-9, "got {}", c.value);
    }

    #[test]
    fn domination_identity_sqrt_reaches_n() {
        let c = power_domination_constant(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            0.5,
            2,
            &opts(),
        )
        .unwrap();
        assert!((c.value - 2.0).abs() < 1e-6, "got {}", c.value);

        // Grid oracle: same ratio with the subset sup from the oracle side.
        let meas = AtomicVectorMeasure::new(MatrixOperator::identity(), SpaceSpec::lq(1.0), 2)
            .unwrap();
        let grid = oracle::simplex_grid_max(2, 64, |x| {
            let num = seqspace::norm(
                &SpaceSpec::lq(1.0),
                &MatrixOperator::identity().apply(&x.abs_pow(0.5)?, 2)?,
            )?
            .powf(2.0);
            let den = oracle::exhaustive_subset_sup(&meas, x)?;
            if den == 0.0 {
                return Ok(None);
            }
            Ok(Some(num / den))
        })
        .unwrap();
        assert!((c.value - grid).abs() <= 0.01 * grid, "ascent {} vs grid {grid}", c.value);
    }

    #[test]
    fn domination_single_column_identity_is_one() {
        for r in [0.25, 0.5, 1.0, 2.0] {
            let c = power_domination_constant(
                &MatrixOperator::identity(),
                &SpaceSpec::lq(1.0),
                r,
                1,
                &opts(),
            )
            .unwrap();
            assert!((c.value - 1.0).abs() < 1e-9, "r = {r}: got {}", c.value);
        }
        let flagged = power_domination_constant(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            2.0,
            1,
            &opts(),
        )
        .unwrap();
        assert!(flagged.notes.iter().any(|n| n.contains("unusual")));
    }

    #[test]
    fn embedding_check_identity_closed_form() {
        let check = domination_embedding_check(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            0.5,
            2,
            &opts(),
        )
        .unwrap();
        assert!((check.d.value - 2.0).abs() < 1e-6);
        assert!((check.b.value - 2.0).abs() < 1e-6);
        assert!(check.first_half_ok && check.second_half_ok);

        let single = domination_embedding_check(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            0.5,
            1,
            &opts(),
        )
        .unwrap();
        assert!((single.d.value - 1.0).abs() < 1e-9);
        assert!((single.b.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn extension_consistency_holds_for_builtins() {
        let f = FiniteVector::from_pairs([(1, 0.5), (2, -1.25), (4, 2.0)]).unwrap();
        for m in [MatrixOperator::identity(), MatrixOperator::cesaro(), MatrixOperator::hilbert()]
        {
            assert!(extension_consistency(&m, &SpaceSpec::lq(2.0), &f, 6).unwrap());
        }
        assert!(extension_consistency(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            &FiniteVector::zero(),
            3
        )
        .unwrap());
    }

    #[test]
    fn verdict_identity_into_l1_reports_unbounded_evidence() {
        let report = factorability_verdict(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(1.0),
            2.0,
            &[1, 2, 4, 8, 16],
            &opts(),
        )
        .unwrap();
        assert_eq!(report.schema_version, 1);
        for c in &report.constants {
            let expect = (c.n as f64).sqrt();
            assert!((c.value - expect).abs() < 1e-4, "C_2({}) = {} want {expect}", c.n, c.value);
        }
        assert!((report.growth.exponent.unwrap() - 0.5).abs() < 0.05);
        assert_eq!(report.verdict, FactorVerdict::UnboundedEvidence);
        assert!(report.monotone_ok);
        assert_eq!(report.condition_i.verdict, SeriesVerdict::Diverges);
        assert!(report.condition_ii.is_some(), "identity is nonnegative with lq codomain");
    }

    #[test]
    fn verdict_identity_into_l2_is_bounded() {
        let report = factorability_verdict(
            &MatrixOperator::identity(),
            &SpaceSpec::lq(2.0),
            2.0,
            &[1, 2, 4, 8],
            &opts(),
        )
        .unwrap();
        for c in &report.constants {
            assert!((c.value - 1.0).abs() < 1e-8, "isometry constant, got {}", c.value);
        }
        assert_eq!(report.verdict, FactorVerdict::BoundedEvidence);
    }

    #[test]
    fn verdict_geometric_diagonal_converges_via_condition_i() {
        let d = MatrixOperator::diagonal(SeqGen::Geometric { constant: 1.0, ratio: 0.5 })
            .unwrap();
        let report =
            factorability_verdict(&d, &SpaceSpec::lq(1.0), 2.0, &[2, 4, 8], &opts()).unwrap();
        assert_eq!(report.condition_i.verdict, SeriesVerdict::Converges);
        assert_eq!(report.verdict, FactorVerdict::BoundedEvidence);
        let limit = (1.0f64 / 3.0).sqrt();
        let last = report.constants.last().unwrap().value;
        assert!(last <= limit + 1e-9, "C_2(n) is below the Hoelder limit {limit}, got {last}");
        assert!((last - limit).abs() < 1e-3);
    }

    #[test]
    fn constants_are_monotone_on_builtins() {
        for m in [MatrixOperator::identity(), MatrixOperator::cesaro(), MatrixOperator::hilbert()]
        {
            let mut prev = 0.0f64;
            for n in [1usize, 2, 3, 4] {
                let c = best_constant(&m, &SpaceSpec::lq(2.0), &SpaceSpec::lq(2.0), n, &opts())
                    .unwrap();
                assert!(
                    c.value >= prev - 1e-8,
                    "{}: C({n}) = {} under C({}) = {prev}",
                    m.name(),
                    c.value,
                    n - 1
                );
                prev = c.value;
            }
        }
    }
}
