//! Execution strategy for the data-parallel inner loops.
//!
//! Every enumeration (sign patterns, subsets) and every multi-start search
//! reduces through [`Best`], which orders candidates by value and breaks ties
//! toward the lowest index. The reduction is associative and commutative, so
//! parallel and sequential runs return bit-identical winners.
//!
//! With the `parallel` feature disabled, [`ExecMode::Parallel`] degrades to
//! sequential execution and the public API is unchanged.

use crate::error::Result;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

/// Candidate with a deterministic total order: larger value wins, ties go to
/// the smaller index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Best {
    pub value: f64,
    pub index: u64,
}

impl Best {
    pub fn new(value: f64, index: u64) -> Self {
        Best { value, index }
    }

    pub fn beats(&self, other: &Best) -> bool {
        self.value > other.value || (self.value == other.value && self.index < other.index)
    }
}

/// Deterministic combine for reductions.
pub fn take_best(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.beats(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Scan the index range [0, total) in fixed-size chunks and reduce each
/// chunk's best candidate. `scan(start, end)` must return the best candidate
/// of [start, end) under the [`Best`] order.
pub fn chunked_max<S>(mode: ExecMode, total: u64, chunk: u64, scan: S) -> Result<Option<Best>>
where
    S: Fn(u64, u64) -> Result<Option<Best>> + Sync + Send,
{
    assert!(chunk > 0);
    let starts: Vec<u64> = (0..total).step_by(chunk.max(1) as usize).collect();
    let run = |&start: &u64| scan(start, (start + chunk).min(total));
    match effective(mode) {
        ExecMode::Sequential => {
            let mut best = None;
            for s in &starts {
                best = take_best(best, run(s)?);
            }
            Ok(best)
        }
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => starts
            .par_iter()
            .map(run)
            .try_reduce(|| None, |a, b| Ok(take_best(a, b))),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => unreachable!(),
    }
}

/// Evaluate `f` on 0..count, preserving order of results.
pub fn map_indexed<T, F>(mode: ExecMode, count: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T> + Sync + Send,
    T: Send,
{
    match effective(mode) {
        ExecMode::Sequential => (0..count).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => (0..count).into_par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => unreachable!(),
    }
}

fn effective(mode: ExecMode) -> ExecMode {
    #[cfg(feature = "parallel")]
    {
        mode
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = mode;
        ExecMode::Sequential
    }
}
