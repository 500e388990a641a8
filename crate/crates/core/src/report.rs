//! Deterministic renderers for stats tables, metric rows, and the
//! cross-comparison report.
//!
//! The markdown emitter lays the report out with datasets as row
//! groups, the four metrics as rows, and models as columns; the text
//! and CSV emitters use one long-form row per (dataset, model) cell.

use std::fmt::Write as _;

use crate::eval::{EvaluationReport, MetricRow};

/// Output format selected by `--emit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Table,
    Csv,
    Markdown,
}

impl EmitFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "table" => Some(EmitFormat::Table),
            "csv" => Some(EmitFormat::Csv),
            "markdown" | "md" => Some(EmitFormat::Markdown),
            _ => None,
        }
    }
}

fn fmt_metric(v: f64) -> String {
    format!("{v:.4}")
}

/// Render per-type row counts.
pub fn render_stats(stats: &[(String, usize)], fmt: EmitFormat) -> String {
    match fmt {
        EmitFormat::Csv => {
            let mut out = String::from("type,count\n");
            for (label, count) in stats {
                let _ = writeln!(out, "{label},{count}");
            }
            out
        }
        EmitFormat::Markdown => {
            let mut out = String::from("| type | count |\n| --- | ---: |\n");
            for (label, count) in stats {
                let _ = writeln!(out, "| {label} | {count} |");
            }
            out
        }
        EmitFormat::Table => {
            let width = stats
                .iter()
                .map(|(l, _)| l.len())
                .chain(std::iter::once("type".len()))
                .max()
                .unwrap_or(4);
            let mut out = format!("{:<width$}  count\n", "type");
            for (label, count) in stats {
                let _ = writeln!(out, "{label:<width$}  {count}");
            }
            out
        }
    }
}

const METRIC_NAMES: [&str; 4] = ["Accuracy", "Precision", "Recall", "F-measure"];

fn metric_value(row: &MetricRow, name: &str) -> f64 {
    match name {
        "Accuracy" => row.values.accuracy,
        "Precision" => row.values.precision,
        "Recall" => row.values.recall,
        "F-measure" => row.values.f_measure,
        _ => unreachable!("unknown metric name"),
    }
}

/// Render a comparison report.
pub fn render_report(report: &EvaluationReport, fmt: EmitFormat) -> String {
    match fmt {
        EmitFormat::Csv => render_report_csv(report),
        EmitFormat::Table => render_report_table(report),
        EmitFormat::Markdown => render_report_markdown(report),
    }
}

fn render_report_csv(report: &EvaluationReport) -> String {
    let mut out =
        String::from("dataset,model,task,averaging,accuracy,precision,recall,f_measure\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.dataset,
            row.model,
            row.task.as_str(),
            row.averaging.as_str(),
            fmt_metric(row.values.accuracy),
            fmt_metric(row.values.precision),
            fmt_metric(row.values.recall),
            fmt_metric(row.values.f_measure),
        );
    }
    for failure in &report.failures {
        let _ = writeln!(
            out,
            "{},{},error,\"{}\",,,,",
            failure.dataset,
            failure.model,
            failure.message.replace('"', "'")
        );
    }
    out
}

fn render_report_table(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let dataset_w = report
        .rows
        .iter()
        .map(|r| r.dataset.len())
        .chain(std::iter::once("dataset".len()))
        .max()
        .unwrap_or(7);
    let model_w = report
        .rows
        .iter()
        .map(|r| r.model.len())
        .chain(std::iter::once("model".len()))
        .max()
        .unwrap_or(5);
    let _ = writeln!(
        out,
        "{:<dataset_w$}  {:<model_w$}  accuracy  precision  recall  f-measure",
        "dataset", "model"
    );
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{:<dataset_w$}  {:<model_w$}  {:>8}  {:>9}  {:>6}  {:>9}",
            row.dataset,
            row.model,
            fmt_metric(row.values.accuracy),
            fmt_metric(row.values.precision),
            fmt_metric(row.values.recall),
            fmt_metric(row.values.f_measure),
        );
    }
    for failure in &report.failures {
        let _ =
            writeln!(out, "{}  {}  FAILED: {}", failure.dataset, failure.model, failure.message);
    }
    out
}

fn render_report_markdown(report: &EvaluationReport) -> String {
    // Model columns in first-appearance order.
    let mut models: Vec<String> = Vec::new();
    for row in &report.rows {
        if !models.contains(&row.model) {
            models.push(row.model.clone());
        }
    }
    for failure in &report.failures {
        if !models.contains(&failure.model) {
            models.push(failure.model.clone());
        }
    }
    let mut datasets: Vec<String> = Vec::new();
    for row in &report.rows {
        if !datasets.contains(&row.dataset) {
            datasets.push(row.dataset.clone());
        }
    }
    for failure in &report.failures {
        if !datasets.contains(&failure.dataset) {
            datasets.push(failure.dataset.clone());
        }
    }

    let mut out = String::from("| Dataset | Metric |");
    for model in &models {
        let _ = write!(out, " {model} |");
    }
    out.push('\n');
    out.push_str("| --- | --- |");
    for _ in &models {
        out.push_str(" ---: |");
    }
    out.push('\n');

    for dataset in &datasets {
        for (i, metric) in METRIC_NAMES.iter().enumerate() {
            let _ = write!(out, "| {} | {metric} |", if i == 0 { dataset } else { "" });
            for model in &models {
                let cell = report
                    .rows
                    .iter()
                    .find(|r| &r.dataset == dataset && &r.model == model)
                    .map(|r| fmt_metric(metric_value(r, metric)))
                    .unwrap_or_else(|| "n/a".to_string());
                let _ = write!(out, " {cell} |");
            }
            out.push('\n');
        }
    }
    if !report.failures.is_empty() {
        out.push('\n');
        for failure in &report.failures {
            let _ = writeln!(
                out,
                "failed cell: {} / {}: {}",
                failure.dataset, failure.model, failure.message
            );
        }
    }
    out
}
