//! Exhaustive maximization of ||sum_j eps_j b_j||_E over sign patterns.
//!
//! Negating every sign leaves the norm unchanged, so the first sign is
//! pinned to +1 and 2^(k-1) patterns remain. Patterns walk in Gray-code
//! order (one column flips per step, costing one fused update per row), and
//! the walk is split into fixed-size chunks: each chunk rebuilds its state
//! from scratch with compensated sums, so results do not depend on how many
//! chunks run in parallel, and incremental drift cannot cross a chunk.

use crate::error::{Error, Result};
use crate::exec::{self, Best, ExecMode};
use crate::seqspace::PreparedNorm;
use crate::util::Accumulator;

const CHUNK: u64 = 4096;

#[derive(Clone, Debug)]
pub struct SignSearchResult {
    pub value: f64,
    /// Sign of each column in the maximizing pattern; pattern[0] = +1.
    pub pattern: Vec<i8>,
    pub patterns_scanned: u64,
}

fn gray(t: u64) -> u64 {
    t ^ (t >> 1)
}

fn signs_of(code: u64, k: usize) -> Vec<f64> {
    // Bit b governs column b+1; set bit means negative.
    (0..k)
        .map(|j| {
            if j > 0 && (code >> (j - 1)) & 1 == 1 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}

/// Max over sign patterns of the E-norm of the signed column sum. Columns
/// are dense over the codomain window; ties resolve to the lowest pattern
/// index, so the result is deterministic in either execution mode.
pub fn max_signed_combination(
    norm: &PreparedNorm,
    columns: &[Vec<f64>],
    mode: ExecMode,
) -> Result<SignSearchResult> {
    let k = columns.len();
    if k == 0 {
        return Err(Error::Estimation("sign search needs at least one column".into()));
    }
    if k > 63 {
        return Err(Error::Estimation(format!("{k} columns overflow the pattern index")));
    }
    let n_rows = columns[0].len();
    if columns.iter().any(|c| c.len() != n_rows) {
        return Err(Error::Estimation("columns must share the window length".into()));
    }
    let total: u64 = 1 << (k - 1);

    let scan = |start: u64, end: u64| -> Result<Option<Best>> {
        let mut signs = signs_of(gray(start), k);
        let mut y = vec![0.0f64; n_rows];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Accumulator::default();
            for (j, col) in columns.iter().enumerate() {
                acc.add(signs[j] * col[i]);
            }
            *yi = acc.value();
        }
        let mut best = Best { value: norm.eval_dense(&y)?, index: start };
        for t in start + 1..end {
            // gray(t) and gray(t-1) differ exactly at the lowest set bit of t.
            let j = t.trailing_zeros() as usize + 1;
            let s = signs[j];
            for (yi, &c) in y.iter_mut().zip(&columns[j]) {
                *yi -= 2.0 * s * c;
            }
            signs[j] = -s;
            let cand = Best { value: norm.eval_dense(&y)?, index: t };
            if cand.beats(&best) {
                best = cand;
            }
        }
        Ok(Some(best))
    };

    let best = exec::chunked_max(mode, total, CHUNK, scan)?
        .expect("at least one pattern is always scanned");
    let pattern = signs_of(gray(best.index), k)
        .into_iter()
        .map(|s| if s < 0.0 { -1 } else { 1 })
        .collect();
    Ok(SignSearchResult { value: best.value, pattern, patterns_scanned: total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::SpaceSpec;

    #[test]
    fn finds_the_aligned_pattern() {
        // b_1=(1,1), b_2=(1,-1), b_3=(0,2): the four patterns give sums
        // (2,2), (0,4), (0,0), (2,-2); the l2 maximizer is (0,4).
        let norm = PreparedNorm::new(&SpaceSpec::lq(2.0)).unwrap();
        let cols = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![0.0, 2.0]];
        let r = max_signed_combination(&norm, &cols, ExecMode::Sequential).unwrap();
        assert_eq!(r.patterns_scanned, 4);
        assert!((r.value - 4.0).abs() < 1e-12);
        assert_eq!(r.pattern, vec![1, -1, 1]);
    }

    #[test]
    fn modes_agree_bitwise() {
        let norm = PreparedNorm::new(&SpaceSpec::lq(1.5)).unwrap();
        let cols: Vec<Vec<f64>> = (0..10)
            .map(|j| (0..6).map(|i| ((i * 7 + j * 3) % 5) as f64 - 2.0).collect())
            .collect();
        let seq = max_signed_combination(&norm, &cols, ExecMode::Sequential).unwrap();
        let par = max_signed_combination(&norm, &cols, ExecMode::Parallel).unwrap();
        assert_eq!(seq.value, par.value);
        assert_eq!(seq.pattern, par.pattern);
    }

    #[test]
    fn single_column_is_its_norm() {
        let norm = PreparedNorm::new(&SpaceSpec::lq(1.0)).unwrap();
        let r = max_signed_combination(&norm, &[vec![3.0, -4.0]], ExecMode::Sequential)
            .unwrap();
        assert_eq!(r.value, 7.0);
        assert_eq!(r.pattern, vec![1]);
        assert_eq!(r.patterns_scanned, 1);
    }
}
