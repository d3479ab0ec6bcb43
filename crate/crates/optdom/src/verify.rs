//! Runnable cross-check suite: every estimation routine against its
//! brute-force reference.
//!
//! The checks ship in the library, not the test tree, so the same battery the
//! test suite freezes can be re-run on demand against a different seed or
//! scale. Each check reports how many cases it examined and how many violated
//! the stated tolerance; a failure is a tolerance violation, never a panic.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::ExecMode;
use crate::factor;
use crate::matop::MatrixOperator;
use crate::oracle;
use crate::rng::task_rng;
use crate::seqspace::{
    self, quasinorm_constant, sum_norm_decomposition, SeqGen, SpaceSpec, SumNormOptions,
};
use crate::vector::FiniteVector;
use crate::vmeasure::{self, AtomicVectorMeasure, EvalOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Quick,
    Full,
}

impl std::str::FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quick" => Ok(Scale::Quick),
            "full" => Ok(Scale::Full),
            other => Err(format!("unknown scale {other:?}, expected quick or full")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    /// Individual assertions examined.
    pub cases: usize,
    /// Assertions that violated their tolerance.
    pub failures: usize,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, cases: usize, failures: usize, detail: String) -> Self {
        CheckOutcome { name: name.into(), cases, failures, detail }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifySummary {
    pub scale: Scale,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn render(&self) -> String {
        let scale = match self.scale {
            Scale::Quick => "quick",
            Scale::Full => "full",
        };
        let mut out = format!("verify ({scale} scale, seed {})\n", self.seed);
        for c in &self.checks {
            let status = if c.passed() {
                "pass".to_string()
            } else {
                format!("FAIL ({}/{})", c.failures, c.cases)
            };
            out.push_str(&format!(
                "  {:<26} {:>7} cases   {}\n    {}\n",
                c.name, c.cases, status, c.detail
            ));
        }
        let good = self.checks.iter().filter(|c| c.passed()).count();
        out.push_str(&format!("{good}/{} checks passed\n", self.checks.len()));
        out
    }
}

/// Run the whole battery. Internal errors are folded into the summary as
/// failures so the caller always gets a complete report.
pub fn run_verify(seed: u64, scale: Scale, mode: ExecMode) -> VerifySummary {
    let full = scale == Scale::Full;
    let n = |quick: usize, fl: usize| if full { fl } else { quick };

    let checks = vec![
        check_young(seed, n(10_000, 100_000)),
        guard("nonnegative-reduction", check_nonnegative_reduction(seed, n(30, 200), mode)),
        guard("sign-sandwich", check_sandwich(seed, n(30, 200), mode)),
        guard("integral-contraction", check_contraction(seed, n(15, 100), mode)),
        guard("closed-form-constants", check_closed_form_constants(seed, mode)),
        guard("power-domination", check_domination(seed, n(6, 100), mode)),
        guard("sum-norm-floor", check_sum_norm(seed, n(8, 50), n(200, 1000), mode)),
        guard("space-identities", check_space_identities(seed, n(300, 1000))),
        guard("extension-consistency", check_extension(seed, n(200, 1000))),
        guard("condition-pipelines", check_condition_pipelines()),
        guard("dual-lower-bound", check_dual_lower_bound(seed, n(20, 100), n(2000, 10_000), mode)),
        guard("grid-agreement", check_grid_agreement(mode)),
    ];
    VerifySummary { scale, seed, checks }
}

fn guard(name: &str, r: Result<CheckOutcome>) -> CheckOutcome {
    r.unwrap_or_else(|e| CheckOutcome::new(name, 0, 1, format!("errored: {e}")))
}

// ---------------------------------------------------------------------------
// Random instances.

fn random_dense(seed: u64, task: &str, index: u64, n: usize, signed: bool) -> Result<MatrixOperator> {
    let mut rng = task_rng(seed, task, index);
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let mag = 10f64.powf(rng.random_range(-2.0..1.0));
                    if signed && rng.random::<bool>() {
                        -mag
                    } else {
                        mag
                    }
                })
                .collect()
        })
        .collect();
    MatrixOperator::dense(rows)
}

fn random_vector(rng: &mut impl Rng, n: usize, signed: bool) -> Result<FiniteVector> {
    let k = rng.random_range(1..=n);
    let mut idx: Vec<usize> = (1..=n).collect();
    for i in (1..idx.len()).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    idx.truncate(k);
    FiniteVector::from_pairs(idx.into_iter().map(|i| {
        let mag = 10f64.powf(rng.random_range(-2.0..1.0));
        let v = if signed && rng.random::<bool>() { -mag } else { mag };
        (i, v)
    }))
}

fn rel_exceeds(value: f64, bound: f64, tol: f64) -> bool {
    value > bound + tol * bound.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// The checks.

/// Young inequality sweep plus the equality case a^s = b^t.
pub fn check_young(seed: u64, samples: usize) -> CheckOutcome {
    let mut rng = task_rng(seed, "verify-young", 0);
    let mut failures = 0usize;
    for _ in 0..samples {
        let a = rng.random_range(0.0..10.0);
        let b = rng.random_range(0.0..10.0);
        let s = rng.random_range(0.1..10.0);
        let t = rng.random_range(0.1..10.0);
        if !oracle::young_check(a, b, s, t) {
            failures += 1;
        }
    }
    let equality_cases = samples / 10;
    let mut worst = 0.0f64;
    for _ in 0..equality_cases {
        let b: f64 = rng.random_range(0.5..2.0);
        let s = rng.random_range(0.5..5.0);
        let t = rng.random_range(0.5..5.0);
        let a = b.powf(t / s);
        let (lhs, rhs) = oracle::young_gap(a, b, s, t);
        let gap = (lhs - rhs).abs() / rhs.abs().max(1.0);
        worst = worst.max(gap);
        if gap > 1e-9 {
            failures += 1;
        }
    }
    CheckOutcome::new(
        "young-inequality",
        samples + equality_cases,
        failures,
        format!("random sweep at 1e-12 slack; worst equality-case gap {worst:.2e}"),
    )
}

/// Exact norm of a nonnegative instance collapses to ‖M|f|‖_E.
pub fn check_nonnegative_reduction(seed: u64, instances: usize, mode: ExecMode) -> Result<CheckOutcome> {
    let opts = EvalOptions { seed, mode, ..EvalOptions::default() };
    let spaces = [SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), SpaceSpec::lq(f64::INFINITY)];
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for k in 0..instances {
        let mut rng = task_rng(seed, "verify-reduction-f", k as u64);
        let n = rng.random_range(2..=12);
        let m = random_dense(seed, "verify-reduction-m", k as u64, n, false)?;
        let f = random_vector(&mut rng, n, false)?;
        let image = m.apply(&f, n)?;
        for e in &spaces {
            let measure = AtomicVectorMeasure::new(m.clone(), e.clone(), n)?;
            let exact = vmeasure::l1m_norm(&measure, &f, &opts)?.value.expect("exact branch");
            let expected = seqspace::norm(e, &image)?;
            let gap = (exact - expected).abs() / expected.abs().max(1.0);
            worst = worst.max(gap);
            if gap > 1e-12 {
                failures += 1;
            }
        }
    }
    Ok(CheckOutcome::new(
        "nonnegative-reduction",
        3 * instances,
        failures,
        format!("exact measure norm vs ‖M|f|‖_E at 1e-12; worst gap {worst:.2e}"),
    ))
}

/// Subset sup S and exact norm N satisfy S <= N <= 2S on signed instances.
pub fn check_sandwich(seed: u64, instances: usize, mode: ExecMode) -> Result<CheckOutcome> {
    let opts = EvalOptions { seed, mode, ..EvalOptions::default() };
    let mut failures = 0usize;
    let mut worst_ratio = 1.0f64;
    for k in 0..instances {
        let mut rng = task_rng(seed, "verify-sandwich-f", k as u64);
        let n = rng.random_range(2..=12);
        let m = random_dense(seed, "verify-sandwich-m", k as u64, n, true)?;
        let f = random_vector(&mut rng, n, true)?;
        let e = [SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), SpaceSpec::lq(f64::INFINITY)]
            [k % 3]
        .clone();
        let measure = AtomicVectorMeasure::new(m.clone(), e, n)?;
        let exact = vmeasure::l1m_norm(&measure, &f, &opts)?.value.expect("exact branch");
        let s = oracle::exhaustive_subset_sup(&measure, &f)?;
        let tol = 1e-9 * exact.max(1.0);
        if s > exact + tol || exact > 2.0 * s + tol {
            failures += 1;
        }
        if s > 0.0 {
            worst_ratio = worst_ratio.max(exact / s);
        }
    }
    Ok(CheckOutcome::new(
        "sign-sandwich",
        instances,
        failures,
        format!("S <= N <= 2S; worst observed N/S = {worst_ratio:.4}"),
    ))
}

/// ‖integrate(m, f, A)‖_E never exceeds the exact norm, for every subset A.
pub fn check_contraction(seed: u64, instances: usize, mode: ExecMode) -> Result<CheckOutcome> {
    let opts = EvalOptions { seed, mode, ..EvalOptions::default() };
    let mut cases = 0usize;
    let mut failures = 0usize;
    for k in 0..instances {
        let mut rng = task_rng(seed, "verify-contraction-f", k as u64);
        let n = rng.random_range(2..=10);
        let m = random_dense(seed, "verify-contraction-m", k as u64, n, true)?;
        let f = random_vector(&mut rng, n, true)?;
        let e = [SpaceSpec::lq(1.0), SpaceSpec::lq(2.0), SpaceSpec::lq(f64::INFINITY)]
            [k % 3]
        .clone();
        let measure = AtomicVectorMeasure::new(m.clone(), e.clone(), n)?;
        let exact = vmeasure::l1m_norm(&measure, &f, &opts)?.value.expect("exact branch");
        let support: Vec<usize> = f.support().collect();
        let tol = 1e-9 * exact.max(1.0);
        for mask in 0u32..(1u32 << support.len()) {
            let subset: Vec<usize> = support
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            let piece = vmeasure::integrate(&measure, &f, &subset)?;
            cases += 1;
            if seqspace::norm(&e, &piece)? > exact + tol {
                failures += 1;
            }
        }
    }
    Ok(CheckOutcome::new(
        "integral-contraction",
        cases,
        failures,
        "‖∫_A f dm‖_E <= exact norm over every subset of the support".into(),
    ))
}

/// Factorization constants with known closed forms.
pub fn check_closed_form_constants(seed: u64, mode: ExecMode) -> Result<CheckOutcome> {
    let opts = EvalOptions { seed, mode, restarts: 8, ..EvalOptions::default() };
    let mut cases = 0usize;
    let mut failures = 0usize;
    let mut worst = 0.0f64;

    // Identity into Lq(q) from domain Lq(p): n^(max(0, 1/q - 1/p)).
    for &(p, q) in &[(2.0, 1.0), (2.0, 2.0), (3.0, 1.0)] {
        for &n in &[2usize, 4, 8, 16] {
            let c = factor::best_constant(
                &MatrixOperator::identity(),
                &SpaceSpec::lq(q),
                &SpaceSpec::lq(p),
                n,
                &opts,
            )?;
            let target = (n as f64).powf((1.0 / q - 1.0 / p).max(0.0));
            let gap = (c.value - target).abs() / target;
            worst = worst.max(gap);
            cases += 1;
            if gap > 0.02 {
                failures += 1;
            }
        }
    }

    // Diagonal into Lq(1): Hoelder gives (sum d_j^p')^(1/p').
    let d = MatrixOperator::diagonal(SeqGen::Geometric { constant: 1.0, ratio: 0.5 })?;
    let c = factor::best_constant(&d, &SpaceSpec::lq(1.0), &SpaceSpec::lq(2.0), 4, &opts)?;
    let target = (1..=4).map(|j| 0.25f64.powi(j)).sum::<f64>().sqrt();
    let gap = (c.value - target).abs() / target;
    worst = worst.max(gap);
    cases += 1;
    if gap > 0.01 {
        failures += 1;
    }

    Ok(CheckOutcome::new(
        "closed-form-constants",
        cases,
        failures,
        format!("identity and diagonal closed forms; worst relative gap {worst:.2e}"),
    ))
}

/// Both halves of the domination sandwich on random nonnegative instances.
pub fn check_domination(seed: u64, instances: usize, mode: ExecMode) -> Result<CheckOutcome> {
    let opts = EvalOptions { seed, mode, restarts: 4, ..EvalOptions::default() };
    let mut cases = 0usize;
    let mut failures = 0usize;
    for k in 0..instances {
        let mut rng = task_rng(seed, "verify-domination-n", k as u64);
        let n = rng.random_range(2..=8);
        let m = random_dense(seed, "verify-domination-m", k as u64, n, false)?;
        for &r in &[0.5, 1.0 / 3.0] {
            let chk = factor::domination_embedding_check(&m, &SpaceSpec::lq(1.0), r, n, &opts)?;
            cases += 2;
            if !chk.first_half_ok {
                failures += 1;
            }
            if !chk.second_half_ok {
                failures += 1;
            }
        }
    }
    Ok(CheckOutcome::new(
        "power-domination",
        cases,
        failures,
        "D <= 2B and B <= 2^(1/r) D at 1e-6 for r in {1/2, 1/3}".into(),
    ))
}

/// The sum-norm solver beats random decompositions and matches the aligned
/// grid within its modulus.
pub fn check_sum_norm(
    seed: u64,
    instances: usize,
    decompositions: usize,
    mode: ExecMode,
) -> Result<CheckOutcome> {
    let spaces = [
        SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(f64::INFINITY)),
        SpaceSpec::sum(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0)),
        SpaceSpec::sum(SpaceSpec::lq(2.0), SpaceSpec::lq(f64::INFINITY)),
    ];
    let grid_steps = 16usize;
    let mut cases = 0usize;
    let mut failures = 0usize;

    // Pinned value first: Sum(Lq(1), Lq(inf)) at f = (2, 1).
    let pinned = seqspace::norm(&spaces[0], &FiniteVector::from_pairs([(1, 2.0), (2, 1.0)])?)?;
    cases += 1;
    if (pinned - 2.0).abs() > 1e-9 {
        failures += 1;
    }

    for k in 0..instances {
        let mut rng = task_rng(seed, "verify-sum", k as u64);
        let space = &spaces[k % spaces.len()];
        let f = loop {
            let cand = random_vector(&mut rng, 6, true)?;
            if cand.support_len() <= 4 {
                break cand;
            }
        };
        let sopts = SumNormOptions { seed, mode, ..SumNormOptions::default() };
        let dec = sum_norm_decomposition(space, &f, &sopts)?;
        let (left, right) = match &space.canonical().kind {
            crate::seqspace::SpaceKind::Sum { left, right } => {
                ((**left).clone(), (**right).clone())
            }
            _ => unreachable!("sum spaces stay sums under canonical"),
        };
        let tol = 1e-9 * dec.value.max(1.0);

        // No random split may beat the solver.
        let pairs: Vec<(usize, f64)> = f.iter().collect();
        for _ in 0..decompositions {
            let mut u = Vec::with_capacity(pairs.len());
            let mut v = Vec::with_capacity(pairs.len());
            for &(i, x) in &pairs {
                let frac = rng.random_range(0.0..=1.0);
                u.push((i, x * frac));
                v.push((i, x * (1.0 - frac)));
            }
            let val = seqspace::norm(&left, &FiniteVector::from_pairs(drop_zeros(u))?)?
                + seqspace::norm(&right, &FiniteVector::from_pairs(drop_zeros(v))?)?;
            cases += 1;
            if dec.value > val + tol {
                failures += 1;
            }
        }

        // Aligned-grid reference: within the grid modulus above the solver,
        // never meaningfully below.
        let brute = oracle::sum_norm_bruteforce(&left, &right, &f, grid_steps)?;
        let snapped = snap_split_value(&left, &right, &f, &dec.left_part, grid_steps)?;
        let modulus = (snapped - dec.value).max(0.0);
        cases += 1;
        if brute < dec.value - tol || brute > dec.value + modulus + tol {
            failures += 1;
        }
    }
    Ok(CheckOutcome::new(
        "sum-norm-floor",
        cases,
        failures,
        "solver value under every random split and aligned to the grid reference".into(),
    ))
}

fn drop_zeros(pairs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    pairs.into_iter().filter(|(_, v)| v.abs() >= 1e-300).collect()
}

/// Evaluate the split objective at the aligned-grid point nearest the
/// solver's left part; the gap to the solver value is the grid modulus.
fn snap_split_value(
    left: &SpaceSpec,
    right: &SpaceSpec,
    f: &FiniteVector,
    left_part: &FiniteVector,
    grid_steps: usize,
) -> Result<f64> {
    let mut u = Vec::new();
    let mut v = Vec::new();
    for (i, x) in f.iter() {
        let step = x.abs() / grid_steps as f64;
        let share = left_part.get(i).abs().min(x.abs());
        let snapped = (share / step).round() * step;
        u.push((i, snapped * x.signum()));
        v.push((i, (x.abs() - snapped) * x.signum()));
    }
    Ok(seqspace::norm(left, &FiniteVector::from_pairs(drop_zeros(u))?)?
        + seqspace::norm(right, &FiniteVector::from_pairs(drop_zeros(v))?)?)
}

/// Structural norm identities: Power(Lq(q), p) = Lq(qp) bit-for-bit,
/// intersection = max, and the axiom scan never beats the declared constant.
pub fn check_space_identities(seed: u64, samples: usize) -> Result<CheckOutcome> {
    let mut rng = task_rng(seed, "verify-identities", 0);
    let mut cases = 0usize;
    let mut failures = 0usize;

    for k in 0..samples {
        let f = random_vector(&mut rng, 10, true)?;
        let p = [0.5, 2.0, 3.0][k % 3];
        let power = SpaceSpec::power(SpaceSpec::lq(1.0), p);
        let lhs = seqspace::norm(&power, &f)?;
        let rhs = seqspace::norm(&SpaceSpec::lq(p), &f)?;
        cases += 1;
        if lhs != rhs {
            failures += 1;
        }

        let inter = SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0));
        let both = seqspace::norm(&inter, &f)?;
        let expect =
            seqspace::norm(&SpaceSpec::lq(1.0), &f)?.max(seqspace::norm(&SpaceSpec::lq(2.0), &f)?);
        cases += 1;
        if both != expect {
            failures += 1;
        }
    }

    let scan_spaces = [
        SpaceSpec::lq(2.0),
        SpaceSpec::lq(1.0),
        SpaceSpec::lq(0.5),
        SpaceSpec::intersection(SpaceSpec::lq(1.0), SpaceSpec::lq(2.0)),
        SpaceSpec::power(SpaceSpec::lq(0.5), 2.0),
    ];
    for (i, space) in scan_spaces.iter().enumerate() {
        let observed = oracle::quasinorm_axiom_scan(space, samples.min(300), seed + i as u64)?;
        let k = quasinorm_constant(space)?;
        cases += 1;
        if rel_exceeds(observed, k, 1e-9) {
            failures += 1;
        }
    }

    Ok(CheckOutcome::new(
        "space-identities",
        cases,
        failures,
        "power/intersection norm identities exact; axiom scan under the declared constant".into(),
    ))
}

/// Integration against the attached measure reproduces matrix application.
pub fn check_extension(seed: u64, instances: usize) -> Result<CheckOutcome> {
    let mut failures = 0usize;
    for k in 0..instances {
        let mut rng = task_rng(seed, "verify-extension-f", k as u64);
        let m = match k % 6 {
            0 => MatrixOperator::identity(),
            1 => MatrixOperator::cesaro(),
            2 => MatrixOperator::hilbert(),
            3 => MatrixOperator::diagonal(SeqGen::Geometric { constant: 1.0, ratio: 0.5 })?,
            4 => MatrixOperator::lower(SeqGen::PowerDecay { constant: 1.0, exponent: 1.0 })?,
            _ => random_dense(seed, "verify-extension-m", k as u64, 8, true)?,
        };
        let f = random_vector(&mut rng, 8, true)?;
        if !factor::extension_consistency(&m, &SpaceSpec::lq(2.0), &f, 8)? {
            failures += 1;
        }
    }
    Ok(CheckOutcome::new(
        "extension-consistency",
        instances,
        failures,
        "integrate over the support equals apply, coordinatewise at 1e-12".into(),
    ))
}

/// The two summability pipelines on their closed-form instances.
pub fn check_condition_pipelines() -> Result<CheckOutcome> {
    let mut cases = 0usize;
    let mut failures = 0usize;

    let d = MatrixOperator::diagonal(SeqGen::Geometric { constant: 1.0, ratio: 0.5 })?;
    let rep = factor::condition_i(&d, &SpaceSpec::lq(1.0), 2.0, 12, false)?;
    cases += 1;
    if (rep.partial_sums.last().unwrap().1 - 1.0 / 3.0).abs() > 1e-6
        || rep.verdict != factor::SeriesVerdict::Converges
    {
        failures += 1;
    }

    let rows = MatrixOperator::lower(SeqGen::Geometric { constant: 1.0, ratio: 0.5 })?;
    let rep = factor::rows_condition(&rows, 1.0, 26)?;
    cases += 1;
    if (rep.partial_sums.last().unwrap().1 - 2.0).abs() > 1e-6
        || rep.verdict != factor::SeriesVerdict::Converges
    {
        failures += 1;
    }

    let ces = factor::rows_condition(&MatrixOperator::cesaro(), 1.0, 16)?;
    cases += 1;
    if ces.verdict != factor::SeriesVerdict::Diverges {
        failures += 1;
    }

    let id = factor::condition_i(&MatrixOperator::identity(), &SpaceSpec::lq(2.0), 2.0, 16, false)?;
    cases += 1;
    if id.verdict != factor::SeriesVerdict::Diverges || !id.note.contains("sufficient only") {
        failures += 1;
    }

    Ok(CheckOutcome::new(
        "condition-pipelines",
        cases,
        failures,
        "diagonal sums to 1/3, triangular rows to 2, Cesaro rows diverge".into(),
    ))
}

/// The randomized dual evaluation stays below the exact norm and reaches it
/// on the deterministic norming instance.
pub fn check_dual_lower_bound(
    seed: u64,
    instances: usize,
    samples: usize,
    mode: ExecMode,
) -> Result<CheckOutcome> {
    let opts = EvalOptions { seed, mode, ..EvalOptions::default() };
    let mut cases = 0usize;
    let mut failures = 0usize;
    let mut worst_gap = 0.0f64;
    for k in 0..instances {
        let mut rng = task_rng(seed, "verify-dual-f", k as u64);
        let n = rng.random_range(2..=10);
        let m = random_dense(seed, "verify-dual-m", k as u64, n, true)?;
        let f = random_vector(&mut rng, n, true)?;
        let q = [1.0, 2.0, f64::INFINITY][k % 3];
        let measure = AtomicVectorMeasure::new(m.clone(), SpaceSpec::lq(q), n)?;
        let exact = vmeasure::l1m_norm(&measure, &f, &opts)?.value.expect("exact branch");
        let lower = oracle::l1m_norm_dual_sample(&measure, &f, samples, seed + k as u64)?;
        cases += 1;
        if rel_exceeds(lower, exact, 1e-9) {
            failures += 1;
        }
        if exact > 0.0 {
            worst_gap = worst_gap.max((exact - lower) / exact);
        }
    }

    // Deterministic norming case: diagonal (1, 2), all-ones f, E = Lq(1).
    let diag = MatrixOperator::diagonal(SeqGen::Explicit { values: vec![1.0, 2.0] })?;
    let measure = AtomicVectorMeasure::new(diag, SpaceSpec::lq(1.0), 2)?;
    let f = FiniteVector::from_pairs([(1, 1.0), (2, 1.0)])?;
    let lower = oracle::l1m_norm_dual_sample(&measure, &f, 4, seed)?;
    cases += 1;
    if (lower - 3.0).abs() > 1e-12 {
        failures += 1;
    }

    Ok(CheckOutcome::new(
        "dual-lower-bound",
        cases,
        failures,
        format!("sampled dual value under the exact norm; worst relative gap {worst_gap:.2e}"),
    ))
}

/// Ascent constants agree with the simplex-grid reference on small windows.
pub fn check_grid_agreement(mode: ExecMode) -> Result<CheckOutcome> {
    let opts = EvalOptions { seed: 7, mode, restarts: 8, ..EvalOptions::default() };
    let l1 = SpaceSpec::lq(1.0);
    let l2 = SpaceSpec::lq(2.0);
    let diag = MatrixOperator::diagonal(SeqGen::Geometric { constant: 1.0, ratio: 0.5 })?;
    let setups = [
        (MatrixOperator::identity(), l1.clone(), l2.clone(), 4usize),
        (diag, l1.clone(), l2.clone(), 3),
        (MatrixOperator::cesaro(), l2.clone(), l2.clone(), 3),
        (MatrixOperator::hilbert(), l2.clone(), l2.clone(), 3),
    ];
    let mut cases = 0usize;
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for (m, e, domain, n) in &setups {
        let c = factor::best_constant(m, e, domain, *n, &opts)?;
        let grid = oracle::grid_best_constant(m, e, domain, *n, *n, 48)?;
        let gap = (c.value - grid).abs() / grid;
        worst = worst.max(gap);
        cases += 2;
        if gap > 0.01 {
            failures += 1;
        }
        if c.value < grid - 1e-9 {
            failures += 1;
        }
    }
    Ok(CheckOutcome::new(
        "grid-agreement",
        cases,
        failures,
        format!("ascent within 1% of the simplex grid and never below it; worst gap {worst:.2e}"),
    ))
}

// ---------------------------------------------------------------------------
// Re-certification of a user-supplied operator.

/// The randomized cross-checks of the battery, pointed at one operator
/// instead of random dense blocks. Exact enumeration bounds the window.
pub fn check_instance(
    m: &MatrixOperator,
    e: &SpaceSpec,
    n: usize,
    seed: u64,
    trials: usize,
    mode: ExecMode,
) -> Result<Vec<CheckOutcome>> {
    if n == 0 || n > 20 {
        return Err(crate::error::Error::Precondition(format!(
            "instance checks enumerate sign patterns and subsets exactly, which needs \
             1 <= n <= 20, got {n}"
        )));
    }
    let opts = EvalOptions { seed, mode, n_enum: 20, ..EvalOptions::default() };
    let measure = AtomicVectorMeasure::new(m.clone(), e.clone(), n)?;

    let mut sandwich_fail = 0usize;
    let mut contraction = (0usize, 0usize);
    let mut extension_fail = 0usize;
    let mut dual_fail = 0usize;
    let mut reduction_fail = 0usize;
    for k in 0..trials {
        let mut rng = task_rng(seed, "instance-f", k as u64);
        let f = random_vector(&mut rng, n, true)?;
        let exact = vmeasure::l1m_norm(&measure, &f, &opts)?.value.expect("exact branch");
        let tol = 1e-9 * exact.max(1.0);

        let s = oracle::exhaustive_subset_sup(&measure, &f)?;
        if s > exact + tol || exact > 2.0 * s + tol {
            sandwich_fail += 1;
        }

        let support: Vec<usize> = f.support().collect();
        for mask in 0u32..(1u32 << support.len().min(10)) {
            let subset: Vec<usize> = support
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            let piece = vmeasure::integrate(&measure, &f, &subset)?;
            contraction.0 += 1;
            if seqspace::norm(e, &piece)? > exact + tol {
                contraction.1 += 1;
            }
        }

        if !factor::extension_consistency(m, e, &f, n)? {
            extension_fail += 1;
        }

        if matches!(e.canonical().kind, crate::seqspace::SpaceKind::Lq { q } if q >= 1.0) {
            let lower = oracle::l1m_norm_dual_sample(&measure, &f, 500, seed + k as u64)?;
            if rel_exceeds(lower, exact, 1e-9) {
                dual_fail += 1;
            }
        }

        if m.is_nonnegative() {
            let expected = seqspace::norm(e, &m.apply(&f.abs(), n)?)?;
            if (exact - expected).abs() > 1e-12 * expected.abs().max(1.0) {
                reduction_fail += 1;
            }
        }
    }

    let mut checks = vec![
        CheckOutcome::new(
            "instance-sandwich",
            trials,
            sandwich_fail,
            format!("S <= N <= 2S on random vectors against {}", m.name()),
        ),
        CheckOutcome::new(
            "instance-contraction",
            contraction.0,
            contraction.1,
            "no subset integral exceeds the exact norm".into(),
        ),
        CheckOutcome::new(
            "instance-extension",
            trials,
            extension_fail,
            "integrate equals apply coordinatewise at 1e-12".into(),
        ),
    ];
    if matches!(e.canonical().kind, crate::seqspace::SpaceKind::Lq { q } if q >= 1.0) {
        checks.push(CheckOutcome::new(
            "instance-dual",
            trials,
            dual_fail,
            "sampled dual value stays under the exact norm".into(),
        ));
    }
    if m.is_nonnegative() {
        checks.push(CheckOutcome::new(
            "instance-reduction",
            trials,
            reduction_fail,
            "exact norm collapses to the norm of M|f| at 1e-12".into(),
        ));
    }
    if n <= 4 {
        let c = factor::best_constant(m, e, &SpaceSpec::lq(2.0), n, &opts)?;
        let grid = oracle::grid_best_constant(m, e, &SpaceSpec::lq(2.0), n, n, 48)?;
        let gap = if grid > 0.0 { (c.value - grid).abs() / grid } else { 0.0 };
        checks.push(CheckOutcome::new(
            "instance-grid",
            1,
            usize::from(gap > 0.01 || c.value < grid - 1e-9),
            format!("ascent constant vs simplex grid, relative gap {gap:.2e}"),
        ));
    }
    Ok(checks)
}
