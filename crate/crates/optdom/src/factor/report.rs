//! Report serialization: versioned JSON and a human-readable summary.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::factor::{FactorabilityReport, FactorVerdict, SeriesReport, SeriesVerdict};

pub fn to_json(report: &FactorabilityReport) -> Result<String> {
    serde_json::to_string_pretty(report)
        .map_err(|e| Error::Schema(format!("report serialization failed: {e}")))
}

pub fn to_markdown(report: &FactorabilityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Factorability analysis: {}", report.matrix);
    let _ = writeln!(out);
    let _ = writeln!(out, "- codomain: `{}`", report.codomain);
    let _ = writeln!(out, "- exponent p: {}", report.p);
    let _ = writeln!(out, "- verdict: **{}** (finite-truncation evidence)", verdict_str(report.verdict));
    let _ = writeln!(out, "- schema version: {}", report.schema_version);
    let _ = writeln!(out);

    let _ = writeln!(out, "## Constants C_p(n)");
    let _ = writeln!(out);
    let _ = writeln!(out, "| n | n_E | C_p(n) | starts | iterations | notes |");
    let _ = writeln!(out, "|--:|----:|-------:|-------:|-----------:|-------|");
    for c in &report.constants {
        let _ = writeln!(
            out,
            "| {} | {} | {:.9e} | {} | {} | {} |",
            c.n,
            c.n_e,
            c.value,
            c.starts,
            c.iterations,
            c.notes.join("; ")
        );
    }
    let _ = writeln!(out);
    let exponent = match report.growth.exponent {
        Some(e) => format!("{e:.4}"),
        None => "undefined".into(),
    };
    let _ = writeln!(
        out,
        "Growth fit: exponent {exponent}, {:?} over {} points.",
        report.growth.verdict, report.growth.points_used
    );
    if !report.monotone_ok {
        let _ = writeln!(out);
        let _ = writeln!(out, "**Warning: constants are not monotone; optimizer flagged.**");
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "## Condition (I): column norms");
    let _ = writeln!(out);
    render_series(&mut out, &report.condition_i);

    if let Some(cond) = &report.condition_ii {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Condition (II): row sums");
        let _ = writeln!(out);
        render_series(&mut out, cond);
    }

    if !report.warnings.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "## Warnings");
        let _ = writeln!(out);
        for w in &report.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

fn render_series(out: &mut String, series: &SeriesReport) {
    let _ = writeln!(out, "- exponent: {}", series.exponent);
    if let Some((n, s)) = series.partial_sums.last() {
        let _ = writeln!(out, "- partial sum at {n}: {s:.9e}");
    } else {
        let _ = writeln!(out, "- empty series");
    }
    if let Some(t) = series.tail_bound {
        let _ = writeln!(out, "- tail bound: {t:.3e}");
    }
    let _ = writeln!(
        out,
        "- verdict: {}{}",
        series_str(series.verdict),
        if series.certified { " (certified)" } else { "" }
    );
    let _ = writeln!(out, "- note: {}", series.note);
}

fn verdict_str(v: FactorVerdict) -> &'static str {
    match v {
        FactorVerdict::BoundedEvidence => "bounded-evidence",
        FactorVerdict::UnboundedEvidence => "unbounded-evidence",
        FactorVerdict::Inconclusive => "inconclusive",
    }
}

fn series_str(v: SeriesVerdict) -> &'static str {
    match v {
        SeriesVerdict::Converges => "converges",
        SeriesVerdict::Diverges => "diverges",
        SeriesVerdict::Inconclusive => "inconclusive",
    }
}
