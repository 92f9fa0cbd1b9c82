//! Plain-text and CSV renderings of evaluation results.

use std::fmt::Write;

use super::{EvalReport, SweepReport};

/// One row per method, one column per metric.
pub fn render_table(report: &EvalReport) -> String {
    let Some(first) = report.methods.first() else {
        return String::new();
    };
    let labels = first.mean.labels();
    let width = report
        .methods
        .iter()
        .map(|m| m.method.len())
        .max()
        .unwrap_or(6)
        .max("Method".len());
    let mut s = String::new();
    write!(s, "{:<width$}", "Method").unwrap();
    for l in &labels {
        write!(s, "  {l:>7}").unwrap();
    }
    s.push('\n');
    for m in &report.methods {
        write!(s, "{:<width$}", m.method).unwrap();
        for v in m.mean.values() {
            write!(s, "  {v:>7.3}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Mean learned weight of each feature across folds.
pub fn render_weight_table(report: &EvalReport) -> String {
    let mut s = String::new();
    for m in &report.methods {
        let Some(w) = &m.mean_weights else { continue };
        writeln!(s, "Feature weights ({}), mean over {} folds", m.method, m.folds.len()).unwrap();
        writeln!(s, "{:<8}{:<20}{:>10}", "Feature", "Definition", "Weight").unwrap();
        for (j, (v, name)) in w.iter().zip(&report.feature_names).enumerate() {
            writeln!(s, "{:<8}{:<20}{:>10.4}", format!("x{}", j + 1), name, v).unwrap();
        }
    }
    s
}

pub fn render_sweep_table(sweep: &SweepReport) -> String {
    let Some(first) = sweep.rows.first() else {
        return String::new();
    };
    let mut s = String::new();
    write!(s, "{:>6}  {:>6}", "Train%", "n").unwrap();
    for l in first.metrics.labels() {
        write!(s, "  {l:>7}").unwrap();
    }
    s.push('\n');
    for r in &sweep.rows {
        write!(s, "{:>5.0}%  {:>6}", r.fraction * 100.0, r.n_train).unwrap();
        for v in r.metrics.values() {
            write!(s, "  {v:>7.3}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// `method,fold,<metrics…>` with one row per fold plus a `mean` row.
pub fn report_csv(report: &EvalReport) -> String {
    let mut s = String::new();
    let Some(first) = report.methods.first() else {
        return s;
    };
    write!(s, "method,fold").unwrap();
    for l in first.mean.labels() {
        write!(s, ",{l}").unwrap();
    }
    s.push('\n');
    for m in &report.methods {
        let rows = m
            .folds
            .iter()
            .enumerate()
            .map(|(i, f)| (i.to_string(), f))
            .chain(std::iter::once(("mean".to_string(), &m.mean)));
        for (label, suite) in rows {
            write!(s, "{},{}", m.method, label).unwrap();
            for v in suite.values() {
                write!(s, ",{v}").unwrap();
            }
            s.push('\n');
        }
    }
    s
}
