//! Table rendering: every report table is emitted both as CSV (for
//! downstream analysis) and as Markdown (for human review).

use codemorph_core::metrics::{Breakdown, ChangeCategory, LengthBucket, MetricsReport, PrfScores};

fn fmt_pct(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_opt_pct(v: Option<f64>) -> String {
    v.map(fmt_pct).unwrap_or_else(|| "n/a".to_string())
}

fn fmt_score(v: f64) -> String {
    format!("{v:.4}")
}

fn category_pct(b: &Breakdown, cat: ChangeCategory) -> f64 {
    100.0 * b.count(cat) as f64 / b.total as f64
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_line(&self.header));
        for row in &self.rows {
            out.push_str(&csv_line(row));
        }
        out
    }

    fn markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("| {} |\n", self.header.join(" | ")));
        out.push_str(&format!(
            "|{}\n",
            self.header.iter().map(|_| " --- |").collect::<String>()
        ));
        for row in &self.rows {
            out.push_str(&format!("| {} |\n", row.join(" | ")));
        }
        out
    }
}

fn csv_line(fields: &[String]) -> String {
    let escaped: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    format!("{}\n", escaped.join(","))
}

/// Prediction-change percentage per transformation.
fn pcp_table(report: &MetricsReport) -> Table {
    let header =
        vec!["Transformation".into(), "Methods".into(), "Variants".into(), "PCP (%)".into()];
    let mut rows: Vec<Vec<String>> = report
        .kinds
        .iter()
        .map(|k| {
            vec![
                k.kind.name().to_string(),
                k.methods.to_string(),
                k.pairs.to_string(),
                fmt_pct(k.pcp),
            ]
        })
        .collect();
    if let Some(all) = &report.overall {
        rows.push(vec![
            "All".into(),
            all.methods.to_string(),
            all.pairs.to_string(),
            fmt_pct(all.pcp),
        ]);
    }
    Table { header, rows }
}

/// Five-way change breakdown plus the two switch ratios.
fn categories_table(report: &MetricsReport) -> Table {
    let header = vec![
        "Transformation".into(),
        "CCP (%)".into(),
        "CWP (%)".into(),
        "WCP (%)".into(),
        "WWSP (%)".into(),
        "WWDP (%)".into(),
        "CWP/(CCP+CWP) (%)".into(),
        "WCP/(WWSP+WWDP+WCP) (%)".into(),
    ];
    let mut rows = Vec::new();
    let mut push_row = |name: &str, b: &Breakdown| {
        rows.push(vec![
            name.to_string(),
            fmt_pct(category_pct(b, ChangeCategory::Ccp)),
            fmt_pct(category_pct(b, ChangeCategory::Cwp)),
            fmt_pct(category_pct(b, ChangeCategory::Wcp)),
            fmt_pct(category_pct(b, ChangeCategory::Wwsp)),
            fmt_pct(category_pct(b, ChangeCategory::Wwdp)),
            fmt_opt_pct(b.ratio_correct_to_wrong),
            fmt_opt_pct(b.ratio_wrong_to_correct),
        ]);
    };
    for k in &report.kinds {
        push_row(k.kind.name(), &k.breakdown);
    }
    if let Some(all) = &report.overall {
        push_row("All", &all.breakdown);
    }
    Table { header, rows }
}

/// Subtoken precision/recall/F1 before and after transformation.
fn prf_table(report: &MetricsReport) -> Table {
    let header = vec![
        "Transformation".into(),
        "Precision (orig)".into(),
        "Recall (orig)".into(),
        "F1 (orig)".into(),
        "Precision (variant)".into(),
        "Recall (variant)".into(),
        "F1 (variant)".into(),
    ];
    let mut rows = Vec::new();
    let mut push_row = |name: &str, before: &PrfScores, after: &PrfScores| {
        rows.push(vec![
            name.to_string(),
            fmt_score(before.precision),
            fmt_score(before.recall),
            fmt_score(before.f1),
            fmt_score(after.precision),
            fmt_score(after.recall),
            fmt_score(after.f1),
        ]);
    };
    for k in &report.kinds {
        push_row(k.kind.name(), &k.prf_before, &k.prf_after);
    }
    if let Some(all) = &report.overall {
        push_row("All", &all.prf_before, &all.prf_after);
    }
    Table { header, rows }
}

/// PCP by original method length (statement count buckets).
fn buckets_table(report: &MetricsReport) -> Table {
    let labels: Vec<String> = report
        .kinds
        .first()
        .map(|k| k.buckets.iter().map(|b| b.label.clone()).collect())
        .or_else(|| {
            report.overall.as_ref().map(|o| o.buckets.iter().map(|b| b.label.clone()).collect())
        })
        .unwrap_or_default();
    let mut header = vec!["Transformation".into()];
    header.extend(labels.iter().map(|l| format!("PCP {l} (%)")));
    let mut rows = Vec::new();
    let mut push_row = |name: &str, buckets: &[LengthBucket]| {
        let mut row = vec![name.to_string()];
        row.extend(buckets.iter().map(|b| fmt_opt_pct(b.pcp)));
        rows.push(row);
    };
    for k in &report.kinds {
        push_row(k.kind.name(), &k.buckets);
    }
    if let Some(all) = &report.overall {
        push_row("All", &all.buckets);
    }
    Table { header, rows }
}

/// All four tables as (file stem, csv content).
pub fn csv_tables(report: &MetricsReport) -> Vec<(&'static str, String)> {
    vec![
        ("pcp", pcp_table(report).csv()),
        ("categories", categories_table(report).csv()),
        ("prf", prf_table(report).csv()),
        ("buckets", buckets_table(report).csv()),
    ]
}

/// The combined Markdown report.
pub fn markdown_report(report: &MetricsReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# Generalizability report: {}\n\n", report.dataset_label));
    out.push_str("## Prediction change percentage\n\n");
    out.push_str(&pcp_table(report).markdown());
    out.push_str("\n## Change categories\n\n");
    out.push_str(&categories_table(report).markdown());
    out.push_str("\n## Subtoken precision / recall / F1\n\n");
    out.push_str(&prf_table(report).markdown());
    out.push_str("\n## PCP by method length\n\n");
    out.push_str(&buckets_table(report).markdown());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use codemorph_core::analysis::TransformKind;
    use codemorph_core::metrics::{build_report, PredictionPair, DEFAULT_BUCKET_EDGES};

    fn sample_report() -> MetricsReport {
        let pairs = vec![
            PredictionPair::from_raw("m1", "v1", "getCount", "getCount", "setValue", 3, TransformKind::VariableRenaming).unwrap(),
            PredictionPair::from_raw("m1", "v2", "getCount", "getCount", "getCount", 3, TransformKind::VariableRenaming).unwrap(),
            PredictionPair::from_raw("m2", "v3", "findMax", "findMin", "findMin", 12, TransformKind::SwitchToIf).unwrap(),
        ];
        build_report("sample", &pairs, &DEFAULT_BUCKET_EDGES)
    }

    #[test]
    fn tables_list_kinds_in_fixed_order_and_render_both_formats() {
        let report = sample_report();
        let md = markdown_report(&report);
        let vr = md.find("VariableRenaming").unwrap();
        let si = md.find("SwitchToIf").unwrap();
        assert!(vr < si);
        let csvs = csv_tables(&report);
        assert_eq!(csvs.len(), 4);
        assert!(csvs[0].1.starts_with("Transformation,Methods,Variants,PCP (%)\n"));
        assert!(csvs[1].1.contains("n/a"), "all-correct kind has an n/a ratio");
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = markdown_report(&sample_report());
        let b = markdown_report(&sample_report());
        assert_eq!(a, b);
    }
}
