//! Infinite matrices as operators, accessed through truncation windows.
//!
//! A matrix is an entry generator plus declared analytic metadata. The
//! generator is pure, so no state is shared between parallel probes; dense
//! blocks carry their entries verbatim. Declared metadata is what a finite
//! computation cannot see for itself: nonnegativity, a bound on each column
//! past the truncation (`column_tail`), and a bound on whole column norms as
//! j grows (`column_norm_decay`).

pub mod expr;
pub mod tail;

pub use expr::ExprGen;
pub use tail::{extend_with_tail, TailModel};

use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimate::{EstimateMethod, NormEstimate};
use crate::exec::{self, ExecMode};
use crate::growth::{fit_growth, GrowthFit, GrowthVerdict};
use crate::seqspace::{self, SeqGen, SpaceSpec};
use crate::util::Accumulator;
use crate::vector::FiniteVector;

#[derive(Clone, Debug, PartialEq)]
enum MatrixKind {
    Identity,
    /// a_ij = d_i when i = j, else 0.
    Diagonal(SeqGen),
    /// a_ij = 1/i for j <= i, else 0.
    Cesaro,
    /// a_ij = 1/(i + j - 1).
    Hilbert,
    /// a_ij = g(i) for j <= i, else 0.
    Lower(SeqGen),
    Dense(DenseBlock),
    Expr(ExprGen),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseBlock {
    rows: Vec<Vec<f64>>,
    n_cols: usize,
}

impl DenseBlock {
    fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n_cols == 0 {
            return Err(Error::InvalidMatrix("dense block must be non-empty".into()));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "dense row {} has {} entries, expected {n_cols}",
                    k + 1,
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidMatrix(format!(
                    "dense row {} contains non-finite entry {v}",
                    k + 1
                )));
            }
        }
        Ok(DenseBlock { rows, n_cols })
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        if i <= self.rows.len() && j <= self.n_cols {
            self.rows[i - 1][j - 1]
        } else {
            0.0
        }
    }
}

/// An infinite matrix M = (a_ij), i, j >= 1, with declared metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOperator {
    kind: MatrixKind,
    nonnegative: bool,
    name: String,
    column_tail: Option<TailModel>,
    column_norm_decay: Option<TailModel>,
}

impl MatrixOperator {
    fn from_kind(kind: MatrixKind, nonnegative: bool, name: &str) -> Self {
        MatrixOperator {
            kind,
            nonnegative,
            name: name.to_string(),
            column_tail: None,
            column_norm_decay: None,
        }
    }

    pub fn identity() -> Self {
        Self::from_kind(MatrixKind::Identity, true, "identity")
    }

    pub fn cesaro() -> Self {
        Self::from_kind(MatrixKind::Cesaro, true, "cesaro")
    }

    pub fn hilbert() -> Self {
        Self::from_kind(MatrixKind::Hilbert, true, "hilbert")
    }

    pub fn diagonal(d: SeqGen) -> Result<Self> {
        d.validate_finite()?;
        let nonneg = gen_nonnegative(&d);
        Ok(Self::from_kind(MatrixKind::Diagonal(d), nonneg, "diagonal"))
    }

    /// Lower-triangular matrix with row-constant entries g(i).
    pub fn lower(g: SeqGen) -> Result<Self> {
        g.validate_finite()?;
        let nonneg = gen_nonnegative(&g);
        Ok(Self::from_kind(MatrixKind::Lower(g), nonneg, "lower"))
    }

    pub fn dense(rows: Vec<Vec<f64>>) -> Result<Self> {
        let block = DenseBlock::new(rows)?;
        let nonneg = block.rows.iter().flatten().all(|v| *v >= 0.0);
        Ok(Self::from_kind(MatrixKind::Dense(block), nonneg, "dense"))
    }

    pub fn expr(src: &str) -> Result<Self> {
        Ok(Self::from_kind(MatrixKind::Expr(ExprGen::parse(src)?), false, "expr"))
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_column_tail(mut self, model: TailModel) -> Result<Self> {
        model.validate()?;
        self.column_tail = Some(model);
        Ok(self)
    }

    pub fn with_column_norm_decay(mut self, model: TailModel) -> Result<Self> {
        model.validate()?;
        self.column_norm_decay = Some(model);
        Ok(self)
    }

    /// Declare every entry nonnegative. Checkable kinds are verified here;
    /// generator kinds are additionally checked at each probed entry.
    pub fn declare_nonnegative(mut self) -> Result<Self> {
        match &self.kind {
            MatrixKind::Dense(block) => {
                for (k, row) in block.rows.iter().enumerate() {
                    if let Some(v) = row.iter().find(|v| **v < 0.0) {
                        return Err(Error::InvalidMatrix(format!(
                            "declared nonnegative but dense row {} has entry {v}",
                            k + 1
                        )));
                    }
                }
            }
            MatrixKind::Diagonal(g) | MatrixKind::Lower(g) => {
                if !gen_nonnegative(g) {
                    return Err(Error::InvalidMatrix(
                        "declared nonnegative but the generator takes negative values".into(),
                    ));
                }
            }
            _ => {}
        }
        self.nonnegative = true;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn column_tail(&self) -> Option<&TailModel> {
        self.column_tail.as_ref()
    }

    pub fn column_norm_decay(&self) -> Option<&TailModel> {
        self.column_norm_decay.as_ref()
    }

    /// Entry a_ij, 1-based. Opportunistically enforces a nonnegativity
    /// declaration and finiteness of generated values.
    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        if i == 0 || j == 0 {
            return Err(Error::Precondition("matrix indices are 1-based".into()));
        }
        let v = match &self.kind {
            MatrixKind::Identity => {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            }
            MatrixKind::Diagonal(d) => {
                if i == j {
                    d.value(i)?
                } else {
                    0.0
                }
            }
            MatrixKind::Cesaro => {
                if j <= i {
                    1.0 / i as f64
                } else {
                    0.0
                }
            }
            MatrixKind::Hilbert => 1.0 / (i + j - 1) as f64,
            MatrixKind::Lower(g) => {
                if j <= i {
                    g.value(i)?
                } else {
                    0.0
                }
            }
            MatrixKind::Dense(block) => block.entry(i, j),
            MatrixKind::Expr(e) => e.eval(i, j),
        };
        if !v.is_finite() {
            return Err(Error::Range {
                index: i,
                message: format!("entry ({i}, {j}) of {} is {v}", self.name),
            });
        }
        if self.nonnegative && v < 0.0 {
            return Err(Error::InvalidMatrix(format!(
                "{} declared nonnegative but entry ({i}, {j}) = {v}",
                self.name
            )));
        }
        Ok(v)
    }

    /// Row index range [lo, hi] that can contain nonzeros of column j; hi is
    /// None when the column has unbounded support.
    pub(crate) fn column_support_range(&self, j: usize) -> (usize, Option<usize>) {
        match &self.kind {
            MatrixKind::Identity | MatrixKind::Diagonal(_) => (j, Some(j)),
            MatrixKind::Cesaro | MatrixKind::Lower(_) => (j, None),
            MatrixKind::Hilbert | MatrixKind::Expr(_) => (1, None),
            MatrixKind::Dense(block) => (1, Some(block.rows.len())),
        }
    }

    /// Largest row index at which column j can be nonzero, when known.
    pub fn column_support_bound(&self, j: usize) -> Option<usize> {
        self.column_support_range(j).1
    }

    /// Largest column index at which row i can be nonzero, when known.
    pub fn row_support_bound(&self, i: usize) -> Option<usize> {
        match &self.kind {
            MatrixKind::Identity | MatrixKind::Diagonal(_) => Some(i),
            MatrixKind::Cesaro | MatrixKind::Lower(_) => Some(i),
            MatrixKind::Hilbert | MatrixKind::Expr(_) => None,
            MatrixKind::Dense(block) => Some(block.n_cols),
        }
    }

    /// Column C_j truncated to rows 1..=n, in canonical form.
    pub fn column(&self, j: usize, n: usize) -> Result<FiniteVector> {
        if j == 0 || n == 0 {
            return Err(Error::Precondition("column requires j >= 1 and n >= 1".into()));
        }
        let (lo, hi) = self.column_support_range(j);
        let hi = hi.map_or(n, |b| b.min(n));
        let mut pairs = Vec::new();
        if lo <= hi {
            for i in lo..=hi {
                let v = self.entry(i, j)?;
                if v != 0.0 {
                    pairs.push((i, v));
                }
            }
        }
        FiniteVector::from_pairs(pairs)
    }

    /// First n_out coordinates of Mx, summed over the support of x with
    /// compensated accumulation.
    pub fn apply(&self, x: &FiniteVector, n_out: usize) -> Result<FiniteVector> {
        if n_out == 0 {
            return Err(Error::Precondition("apply requires n_out >= 1".into()));
        }
        let mut pairs = Vec::new();
        for i in 1..=n_out {
            let hi = self.row_support_bound(i);
            let mut acc = Accumulator::default();
            for (j, xj) in x.iter() {
                if hi.is_some_and(|b| j > b) {
                    break;
                }
                let a = self.entry(i, j)?;
                if a == 0.0 {
                    continue;
                }
                let t = a * xj;
                if !t.is_finite() {
                    return Err(Error::Range {
                        index: i,
                        message: format!("product a_({i},{j}) * x_{j} overflows"),
                    });
                }
                acc.add(t);
            }
            let yi = acc.value();
            if !yi.is_finite() {
                return Err(Error::Range {
                    index: i,
                    message: "row sum overflows".into(),
                });
            }
            if yi != 0.0 {
                pairs.push((i, yi));
            }
        }
        FiniteVector::from_pairs(pairs)
    }

    /// l1 norm of row i truncated to columns 1..=n_cols.
    pub fn row_l1(&self, i: usize, n_cols: usize) -> Result<f64> {
        if i == 0 || n_cols == 0 {
            return Err(Error::Precondition("row_l1 requires i >= 1 and n_cols >= 1".into()));
        }
        let hi = self.row_support_bound(i).map_or(n_cols, |b| b.min(n_cols));
        let mut acc = Accumulator::default();
        for j in 1..=hi {
            acc.add(self.entry(i, j)?.abs());
        }
        Ok(acc.value())
    }

    fn describe_kind(&self) -> &'static str {
        match &self.kind {
            MatrixKind::Identity => "identity",
            MatrixKind::Diagonal(_) => "diagonal",
            MatrixKind::Cesaro => "cesaro",
            MatrixKind::Hilbert => "hilbert",
            MatrixKind::Lower(_) => "lower",
            MatrixKind::Dense(_) => "dense",
            MatrixKind::Expr(_) => "expr",
        }
    }
}

fn gen_nonnegative(g: &SeqGen) -> bool {
    match g {
        SeqGen::PowerDecay { constant, .. } => *constant >= 0.0,
        SeqGen::Geometric { constant, ratio } => *constant >= 0.0 && *ratio >= 0.0,
        SeqGen::Explicit { values } => values.iter().all(|v| *v >= 0.0),
    }
}

/// Bracket on the full column norm ||C_j||_E from the window [1, n].
///
/// The lower bound is the norm of the truncated column. The bracket closes
/// when the column support provably fits in the window, or when `use_tail`
/// and a declared column tail extend it; otherwise it stays open above.
pub fn column_norm(
    m: &MatrixOperator,
    j: usize,
    e: &SpaceSpec,
    n: usize,
    use_tail: bool,
) -> Result<NormEstimate> {
    e.validate()?;
    let col = m.column(j, n)?;
    let head = seqspace::norm(e, &col)?;
    let zero_note = if col.is_zero() {
        format!("; column {j} is zero on [1, {n}]")
    } else {
        String::new()
    };

    if let Some(b) = m.column_support_bound(j) {
        if b <= n {
            return Ok(NormEstimate::exact(
                head,
                EstimateMethod::TruncatedNorm,
                format!("column support lies in [1, {b}] within the window{zero_note}"),
            ));
        }
    }

    if use_tail {
        if let Some(model) = m.column_tail() {
            if let Some(upper) = extend_with_tail(e, &col, n, model)? {
                return Ok(NormEstimate {
                    lower: head,
                    upper: Some(upper),
                    value: None,
                    method: EstimateMethod::TruncatedNorm,
                    certificate: format!(
                        "truncated norm plus declared column tail{zero_note}"
                    ),
                });
            }
            return Ok(NormEstimate {
                lower: head,
                upper: None,
                value: None,
                method: EstimateMethod::TruncatedNorm,
                certificate: format!(
                    "declared tail is not summable in {}; bracket open above{zero_note}",
                    e.describe()
                ),
            });
        }
    }
    Ok(NormEstimate {
        lower: head,
        upper: None,
        value: None,
        method: EstimateMethod::TruncatedNorm,
        certificate: format!("no tail bound applied; bracket open above{zero_note}"),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuityPoint {
    pub n: usize,
    /// max over j <= n of the column-norm lower bounds.
    pub sup_lower: f64,
    /// max over j <= n of the upper bounds, present only when all close.
    pub sup_upper: Option<f64>,
    /// smallest j attaining sup_lower.
    pub argmax_j: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub matrix: String,
    pub codomain: String,
    pub used_tail: bool,
    pub points: Vec<ContinuityPoint>,
    /// Column-norm brackets at the last schedule point, j = 1..=n_last.
    pub per_column: Vec<NormEstimate>,
    pub fit: GrowthFit,
    pub verdict: GrowthVerdict,
    pub warnings: Vec<String>,
}

/// Evidence for sup_j ||C_j||_E < infinity over a truncation schedule.
///
/// Requires the codomain to have the Fatou property: only then do the
/// truncated column norms exhaust the full ones from below.
pub fn continuity_check(
    m: &MatrixOperator,
    e: &SpaceSpec,
    schedule: &[usize],
    use_tail: bool,
    mode: ExecMode,
) -> Result<ContinuityReport> {
    e.validate()?;
    if !e.has_fatou() {
        return Err(Error::Precondition(format!(
            "continuity check needs the Fatou property, which {} lacks",
            e.describe()
        )));
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
        return Err(Error::Precondition(
            "schedule must be a strictly increasing list of positive truncations".into(),
        ));
    }

    let mut points = Vec::with_capacity(schedule.len());
    let mut per_column = Vec::new();
    let mut warnings = Vec::new();
    for &n in schedule {
        let ests =
            exec::map_indexed(mode, n, |j0| column_norm(m, j0 + 1, e, n, use_tail))?;
        let mut sup_lower = f64::NEG_INFINITY;
        let mut argmax_j = 1;
        let mut sup_upper = Some(f64::NEG_INFINITY);
        for (j0, est) in ests.iter().enumerate() {
            if est.lower > sup_lower {
                sup_lower = est.lower;
                argmax_j = j0 + 1;
            }
            sup_upper = match (sup_upper, est.upper) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        points.push(ContinuityPoint { n, sup_lower, sup_upper, argmax_j });
        if n == *schedule.last().unwrap() {
            for (j0, est) in ests.iter().enumerate() {
                if est.lower == 0.0 && !est.is_exact() {
                    warnings.push(format!(
                        "column {} is zero on [1, {n}] and has no closed bracket",
                        j0 + 1
                    ));
                } else if est.lower == 0.0 {
                    warnings.push(format!("column {} is identically zero", j0 + 1));
                }
            }
            per_column = ests;
        }
    }

    let series: Vec<(f64, f64)> =
        points.iter().map(|p| (p.n as f64, p.sup_lower)).collect();
    let fit = fit_growth(&series);
    Ok(ContinuityReport {
        matrix: m.name().to_string(),
        codomain: e.describe(),
        used_tail: use_tail,
        points,
        per_column,
        fit: fit.clone(),
        verdict: fit.verdict,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Serialization: {"kind", "params", "nonnegative", "column_tail",
// "column_norm_decay", "name"}. Dense blocks may point at a CSV file, which
// only the path-aware loaders can resolve.

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nonnegative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    column_tail: Option<TailModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    column_norm_decay: Option<TailModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl MatrixOperator {
    /// Build from a parsed JSON value. `base` resolves relative CSV paths in
    /// dense params; without it such params are a schema error.
    pub fn from_json_value(v: &serde_json::Value, base: Option<&Path>) -> Result<Self> {
        let repr: MatrixRepr = serde_json::from_value(v.clone())
            .map_err(|e| Error::Schema(format!("matrix: {e}")))?;
        build(repr, base)
    }

    /// Load a matrix description from disk: a JSON file in the matrix
    /// schema, or a bare CSV file treated as a dense block.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        if path.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
            let rows = parse_csv(&text)?;
            let stem =
                path.file_stem().map_or("dense", |s| s.to_str().unwrap_or("dense"));
            return Ok(Self::dense(rows)?.with_name(stem));
        }
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        Self::from_json_value(&v, path.parent())
    }
}

fn build(repr: MatrixRepr, base: Option<&Path>) -> Result<MatrixOperator> {
    fn no_params(repr: &MatrixRepr) -> Result<()> {
        match &repr.params {
            None => Ok(()),
            Some(serde_json::Value::Object(m)) if m.is_empty() => Ok(()),
            Some(_) => Err(Error::Schema(format!(
                "matrix kind {:?} takes no params",
                repr.kind
            ))),
        }
    }
    fn gen_params(repr: &MatrixRepr) -> Result<SeqGen> {
        let params = repr.params.clone().ok_or_else(|| {
            Error::Schema(format!("matrix kind {:?} requires params", repr.kind))
        })?;
        serde_json::from_value(params).map_err(|e| Error::Schema(format!("params: {e}")))
    }

    let mut m = match repr.kind.as_str() {
        "identity" => {
            no_params(&repr)?;
            MatrixOperator::identity()
        }
        "cesaro" => {
            no_params(&repr)?;
            MatrixOperator::cesaro()
        }
        "hilbert" => {
            no_params(&repr)?;
            MatrixOperator::hilbert()
        }
        "diagonal" => MatrixOperator::diagonal(gen_params(&repr)?)?,
        "lower" => MatrixOperator::lower(gen_params(&repr)?)?,
        "dense" => {
            let params = repr
                .params
                .clone()
                .ok_or_else(|| Error::Schema("dense matrix requires params".into()))?;
            let obj = params
                .as_object()
                .ok_or_else(|| Error::Schema("dense params must be an object".into()))?;
            if let Some(rows_v) = obj.get("rows") {
                let rows: Vec<Vec<f64>> = serde_json::from_value(rows_v.clone())
                    .map_err(|e| Error::Schema(format!("params.rows: {e}")))?;
                MatrixOperator::dense(rows)?
            } else if let Some(path_v) = obj.get("path") {
                let rel = path_v.as_str().ok_or_else(|| {
                    Error::Schema("params.path must be a string".into())
                })?;
                let base = base.ok_or_else(|| {
                    Error::Schema(
                        "dense params.path needs a file-based loader to resolve".into(),
                    )
                })?;
                let full = base.join(rel);
                let text = std::fs::read_to_string(&full).map_err(|source| Error::Io {
                    path: full.display().to_string(),
                    source,
                })?;
                MatrixOperator::dense(parse_csv(&text)?)?
            } else {
                return Err(Error::Schema("dense params need \"rows\" or \"path\"".into()));
            }
        }
        "expr" => {
            let params = repr
                .params
                .clone()
                .ok_or_else(|| Error::Schema("expr matrix requires params".into()))?;
            let src = params
                .get("expr")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::Schema("expr params need a string \"expr\"".into()))?;
            MatrixOperator::expr(src)?
        }
        other => {
            return Err(Error::Schema(format!("unknown matrix kind {other:?}")));
        }
    };

    match repr.nonnegative {
        Some(true) => m = m.declare_nonnegative()?,
        Some(false) => m.nonnegative = false,
        None => {}
    }
    if let Some(t) = repr.column_tail {
        m = m.with_column_tail(t)?;
    }
    if let Some(t) = repr.column_norm_decay {
        m = m.with_column_norm_decay(t)?;
    }
    if let Some(name) = repr.name {
        m = m.with_name(&name);
    }
    Ok(m)
}

/// CSV in two shapes: a header line "i,j,value" followed by sparse triples,
/// or a row-major grid of numbers.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let lines: Vec<&str> =
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    if lines.is_empty() {
        return Err(Error::Schema("empty CSV matrix".into()));
    }
    let header = lines[0].replace(' ', "").to_ascii_lowercase();
    if header == "i,j,value" {
        let mut triples = Vec::new();
        let (mut max_i, mut max_j) = (0usize, 0usize);
        for (ln, line) in lines[1..].iter().enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 3 {
                return Err(Error::Schema(format!(
                    "CSV triple line {} has {} cells",
                    ln + 2,
                    cells.len()
                )));
            }
            let i: usize = cells[0]
                .parse()
                .map_err(|_| Error::Schema(format!("CSV line {}: bad row index", ln + 2)))?;
            let j: usize = cells[1]
                .parse()
                .map_err(|_| Error::Schema(format!("CSV line {}: bad column index", ln + 2)))?;
            let v: f64 = cells[2]
                .parse()
                .map_err(|_| Error::Schema(format!("CSV line {}: bad value", ln + 2)))?;
            if i == 0 || j == 0 {
                return Err(Error::Schema(format!("CSV line {}: indices are 1-based", ln + 2)));
            }
            max_i = max_i.max(i);
            max_j = max_j.max(j);
            triples.push((i, j, v));
        }
        if triples.is_empty() {
            return Err(Error::Schema("CSV has a triple header but no triples".into()));
        }
        let mut rows = vec![vec![0.0; max_j]; max_i];
        for (i, j, v) in triples {
            rows[i - 1][j - 1] = v;
        }
        return Ok(rows);
    }
    lines
        .iter()
        .enumerate()
        .map(|(ln, line)| {
            line.split(',')
                .map(str::trim)
                .map(|c| {
                    c.parse::<f64>().map_err(|_| {
                        Error::Schema(format!("CSV line {}: bad number {c:?}", ln + 1))
                    })
                })
                .collect()
        })
        .collect()
}

impl Serialize for MatrixOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let params = match &self.kind {
            MatrixKind::Identity | MatrixKind::Cesaro | MatrixKind::Hilbert => None,
            MatrixKind::Diagonal(g) | MatrixKind::Lower(g) => {
                Some(serde_json::to_value(g).map_err(serde::ser::Error::custom)?)
            }
            MatrixKind::Dense(block) => Some(serde_json::json!({ "rows": block.rows })),
            MatrixKind::Expr(e) => Some(serde_json::json!({ "expr": e.source() })),
        };
        MatrixRepr {
            kind: self.describe_kind().to_string(),
            params,
            nonnegative: Some(self.nonnegative),
            column_tail: self.column_tail.clone(),
            column_norm_decay: self.column_norm_decay.clone(),
            name: Some(self.name.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        build(repr, None).map_err(D::Error::custom)
    }
}
