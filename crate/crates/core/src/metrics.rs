//! Generalizability metrics: prediction-change percentage (PCP), the
//! five-way change taxonomy, subtoken precision/recall/F1, and PCP by
//! method length.
//!
//! Prediction equality is exact match on normalized full names; subtoken
//! scores are computed separately so partial overlap never counts as an
//! unchanged prediction. Aggregation uses only counts and sums, so sharded
//! evaluation merges exactly.

use std::collections::BTreeMap;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::TransformKind;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MetricsError {
    #[error("name is empty after normalization")]
    EmptyName,
    #[error("metric requires a non-empty input")]
    EmptyInput,
}

/// Splits a compound identifier at camel-case, acronym, underscore, and
/// letter/digit boundaries; subtokens come back lowercased.
pub fn split_subtokens(name: &str) -> Vec<String> {
    let mut tokens: Vec<String> = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = name.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            flush(&mut current, &mut tokens);
            continue;
        }
        if !current.is_empty() {
            let prev = chars[i - 1];
            let boundary =
                // lower or digit -> upper
                (c.is_uppercase() && (prev.is_lowercase() || prev.is_ascii_digit()))
                // acronym end: upper followed by lower splits before this upper
                || (c.is_uppercase()
                    && prev.is_uppercase()
                    && chars.get(i + 1).is_some_and(|n| n.is_lowercase()))
                // letter <-> digit
                || (c.is_ascii_digit() && prev.is_alphabetic())
                || (c.is_alphabetic() && prev.is_ascii_digit());
            if boundary {
                flush(&mut current, &mut tokens);
            }
        }
        current.extend(c.to_lowercase());
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    if !current.is_empty() {
        tokens.push(std::mem::take(current));
    }
}

/// Canonical comparison form: lowercase subtokens joined with `|`
/// (`compareTo` -> `compare|to`). Equality of normalized forms defines
/// prediction equality everywhere in this module.
pub fn normalize_name(raw: &str) -> Result<String, MetricsError> {
    if raw.is_empty() {
        return Err(MetricsError::EmptyName);
    }
    let tokens = split_subtokens(raw);
    if tokens.is_empty() {
        return Err(MetricsError::EmptyName);
    }
    Ok(tokens.join("|"))
}

/// (ground truth, prediction on original, prediction on variant) with the
/// grouping attributes the report tables need. Names are stored normalized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionPair {
    pub method_id: String,
    pub variant_id: String,
    pub truth: String,
    pub pred_original: String,
    pub pred_variant: String,
    /// Executable statements of the original method.
    pub statement_count: usize,
    pub kind: TransformKind,
}

impl PredictionPair {
    /// Builds a pair from raw names, rejecting any that fail to normalize.
    #[allow(clippy::too_many_arguments)]
    pub fn from_raw(
        method_id: impl Into<String>,
        variant_id: impl Into<String>,
        truth: &str,
        pred_original: &str,
        pred_variant: &str,
        statement_count: usize,
        kind: TransformKind,
    ) -> Result<PredictionPair, MetricsError> {
        Ok(PredictionPair {
            method_id: method_id.into(),
            variant_id: variant_id.into(),
            truth: normalize_name(truth)?,
            pred_original: normalize_name(pred_original)?,
            pred_variant: normalize_name(pred_variant)?,
            statement_count,
            kind,
        })
    }
}

/// The five-way change taxonomy; the categories partition all pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChangeCategory {
    /// correct -> correct
    Ccp,
    /// correct -> wrong
    Cwp,
    /// wrong -> correct
    Wcp,
    /// wrong -> wrong, same prediction
    Wwsp,
    /// wrong -> wrong, different prediction
    Wwdp,
}

impl ChangeCategory {
    pub const ALL: [ChangeCategory; 5] = [
        ChangeCategory::Ccp,
        ChangeCategory::Cwp,
        ChangeCategory::Wcp,
        ChangeCategory::Wwsp,
        ChangeCategory::Wwdp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChangeCategory::Ccp => "CCP",
            ChangeCategory::Cwp => "CWP",
            ChangeCategory::Wcp => "WCP",
            ChangeCategory::Wwsp => "WWSP",
            ChangeCategory::Wwdp => "WWDP",
        }
    }
}

/// Assigns a pair to exactly one category.
pub fn classify_pair(pair: &PredictionPair) -> ChangeCategory {
    let orig_correct = pair.pred_original == pair.truth;
    let var_correct = pair.pred_variant == pair.truth;
    let changed = pair.pred_original != pair.pred_variant;
    match (orig_correct, var_correct) {
        (true, true) => ChangeCategory::Ccp,
        (true, false) => ChangeCategory::Cwp,
        (false, true) => ChangeCategory::Wcp,
        (false, false) => {
            if changed {
                ChangeCategory::Wwdp
            } else {
                ChangeCategory::Wwsp
            }
        }
    }
}

/// Percentage of pairs whose variant prediction differs from the original
/// prediction; equals 100*(CWP+WCP+WWDP)/total.
pub fn compute_pcp(pairs: &[PredictionPair]) -> Result<f64, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let changed = pairs.iter().filter(|p| p.pred_original != p.pred_variant).count();
    Ok(100.0 * changed as f64 / pairs.len() as f64)
}

/// Exact category counts plus the two switch ratios (as percentages);
/// a ratio with a zero denominator is reported as `None`, never as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub total: usize,
    pub counts: BTreeMap<String, usize>,
    /// CWP / (CCP + CWP), percent.
    pub ratio_correct_to_wrong: Option<f64>,
    /// WCP / (WWSP + WWDP + WCP), percent.
    pub ratio_wrong_to_correct: Option<f64>,
}

impl Breakdown {
    pub fn count(&self, cat: ChangeCategory) -> usize {
        self.counts.get(cat.name()).copied().unwrap_or(0)
    }
}

pub fn compute_breakdown(pairs: &[PredictionPair]) -> Result<Breakdown, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for cat in ChangeCategory::ALL {
        counts.insert(cat.name().to_string(), 0);
    }
    for pair in pairs {
        let cat = classify_pair(pair);
        // CCP forces an unchanged prediction under exact-match correctness.
        if cat == ChangeCategory::Ccp {
            debug_assert_eq!(pair.pred_original, pair.pred_variant);
        }
        *counts.get_mut(cat.name()).expect("category") += 1;
    }
    let get = |c: ChangeCategory| counts[c.name()];
    let cw_denom = get(ChangeCategory::Ccp) + get(ChangeCategory::Cwp);
    let wc_denom =
        get(ChangeCategory::Wwsp) + get(ChangeCategory::Wwdp) + get(ChangeCategory::Wcp);
    Ok(Breakdown {
        total: pairs.len(),
        ratio_correct_to_wrong: percent_of(get(ChangeCategory::Cwp), cw_denom),
        ratio_wrong_to_correct: percent_of(get(ChangeCategory::Wcp), wc_denom),
        counts,
    })
}

fn percent_of(num: usize, denom: usize) -> Option<f64> {
    (denom > 0).then(|| 100.0 * num as f64 / denom as f64)
}

/// Micro-averaged subtoken precision/recall/F1 over (prediction, truth)
/// records. Per record, TP is the size of the intersection of the
/// deduplicated subtoken sets.
pub fn compute_prf(records: &[(String, String)]) -> Result<(f64, f64, f64), MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut tp = 0usize;
    let mut pred_total = 0usize;
    let mut truth_total = 0usize;
    for (pred, truth) in records {
        let pred_set: HashSet<String> = split_subtokens(pred).into_iter().collect();
        let truth_set: HashSet<String> = split_subtokens(truth).into_iter().collect();
        tp += pred_set.intersection(&truth_set).count();
        pred_total += pred_set.len();
        truth_total += truth_set.len();
    }
    let precision = if pred_total > 0 { tp as f64 / pred_total as f64 } else { 0.0 };
    let recall = if truth_total > 0 { tp as f64 / truth_total as f64 } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok((precision, recall, f1))
}

/// Inclusive upper edges of the default statement-count buckets
/// (1-5, 6-10, 11-20, 21-50, 51+).
pub const DEFAULT_BUCKET_EDGES: [usize; 4] = [5, 10, 20, 50];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthBucket {
    pub label: String,
    pub pairs: usize,
    /// `None` when the bucket is empty (absence is not a zero PCP).
    pub pcp: Option<f64>,
}

pub fn bucket_labels(edges: &[usize]) -> Vec<String> {
    let mut labels = Vec::with_capacity(edges.len() + 1);
    let mut low = 1usize;
    for &edge in edges {
        labels.push(format!("{low}-{edge}"));
        low = edge + 1;
    }
    labels.push(format!("{low}+"));
    labels
}

/// Groups pairs by original statement count and computes PCP per group.
/// Counts at or below the first edge share the first bucket.
pub fn bucket_by_length(pairs: &[PredictionPair], edges: &[usize]) -> Vec<LengthBucket> {
    let labels = bucket_labels(edges);
    let mut grouped: Vec<Vec<&PredictionPair>> = vec![Vec::new(); labels.len()];
    for pair in pairs {
        let idx = edges
            .iter()
            .position(|&edge| pair.statement_count <= edge)
            .unwrap_or(edges.len());
        grouped[idx].push(pair);
    }
    labels
        .into_iter()
        .zip(grouped)
        .map(|(label, group)| {
            let pcp = if group.is_empty() {
                None
            } else {
                let changed = group.iter().filter(|p| p.pred_original != p.pred_variant).count();
                Some(100.0 * changed as f64 / group.len() as f64)
            };
            LengthBucket { label, pairs: group.len(), pcp }
        })
        .collect()
}

// ---- report assembly ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Per-kind metrics row shaped like the report tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindReport {
    pub kind: TransformKind,
    pub methods: usize,
    pub pairs: usize,
    pub pcp: f64,
    pub breakdown: Breakdown,
    /// Subtoken scores of original predictions against truth.
    pub prf_before: PrfScores,
    /// Subtoken scores of variant predictions against truth.
    pub prf_after: PrfScores,
    pub buckets: Vec<LengthBucket>,
}

/// The full metrics report for one corpus label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub dataset_label: String,
    /// Rows in the fixed kind order; kinds with no pairs are omitted.
    pub kinds: Vec<KindReport>,
    /// Aggregate row over all pairs.
    pub overall: Option<KindReportless>,
}

/// Aggregate metrics without a kind attribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindReportless {
    pub methods: usize,
    pub pairs: usize,
    pub pcp: f64,
    pub breakdown: Breakdown,
    pub prf_before: PrfScores,
    pub prf_after: PrfScores,
    pub buckets: Vec<LengthBucket>,
}

/// Builds the per-kind and overall tables from classified pairs.
pub fn build_report(
    dataset_label: &str,
    pairs: &[PredictionPair],
    edges: &[usize],
) -> MetricsReport {
    let mut kinds = Vec::new();
    for kind in TransformKind::ALL {
        let subset: Vec<PredictionPair> =
            pairs.iter().filter(|p| p.kind == kind).cloned().collect();
        if subset.is_empty() {
            continue;
        }
        let methods = distinct_methods(&subset);
        kinds.push(KindReport {
            kind,
            methods,
            pairs: subset.len(),
            pcp: compute_pcp(&subset).expect("non-empty"),
            breakdown: compute_breakdown(&subset).expect("non-empty"),
            prf_before: prf_of(&subset, |p| p.pred_original.clone()),
            prf_after: prf_of(&subset, |p| p.pred_variant.clone()),
            buckets: bucket_by_length(&subset, edges),
        });
    }
    let overall = if pairs.is_empty() {
        None
    } else {
        Some(KindReportless {
            methods: distinct_methods(pairs),
            pairs: pairs.len(),
            pcp: compute_pcp(pairs).expect("non-empty"),
            breakdown: compute_breakdown(pairs).expect("non-empty"),
            prf_before: prf_of(pairs, |p| p.pred_original.clone()),
            prf_after: prf_of(pairs, |p| p.pred_variant.clone()),
            buckets: bucket_by_length(pairs, edges),
        })
    };
    MetricsReport { dataset_label: dataset_label.to_string(), kinds, overall }
}

fn distinct_methods(pairs: &[PredictionPair]) -> usize {
    pairs.iter().map(|p| p.method_id.as_str()).collect::<HashSet<_>>().len()
}

fn prf_of(pairs: &[PredictionPair], pick: impl Fn(&PredictionPair) -> String) -> PrfScores {
    let records: Vec<(String, String)> =
        pairs.iter().map(|p| (pick(p), p.truth.clone())).collect();
    let (precision, recall, f1) = compute_prf(&records).expect("non-empty");
    PrfScores { precision, recall, f1 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(truth: &str, orig: &str, var: &str) -> PredictionPair {
        PredictionPair::from_raw("m", "v", truth, orig, var, 3, TransformKind::VariableRenaming)
            .unwrap()
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_name("compareTo").unwrap(), "compare|to");
        assert_eq!(normalize_name("get_count").unwrap(), "get|count");
        assert_eq!(normalize_name("HTTPServer2").unwrap(), "http|server|2");
        assert_eq!(normalize_name("x").unwrap(), "x");
        assert!(normalize_name("").is_err());
        assert!(normalize_name("__").is_err());
    }

    #[test]
    fn normalization_is_idempotent_on_its_output_alphabet() {
        for raw in ["compareTo", "parseHTTPResponse", "a1b2", "get_count"] {
            let once = normalize_name(raw).unwrap();
            let again: Vec<String> =
                once.split('|').map(|t| normalize_name(t).unwrap()).collect();
            assert_eq!(again.join("|"), once);
        }
    }

    #[test]
    fn subtoken_splitting_rules() {
        assert_eq!(split_subtokens("toString"), ["to", "string"]);
        assert_eq!(split_subtokens("parseHTTPResponse"), ["parse", "http", "response"]);
        assert_eq!(split_subtokens("x"), ["x"]);
        assert_eq!(split_subtokens("value42x"), ["value", "42", "x"]);
    }

    #[test]
    fn classification_matrix() {
        assert_eq!(classify_pair(&pair("compareTo", "compareTo", "getCount")), ChangeCategory::Cwp);
        assert_eq!(classify_pair(&pair("x", "x", "x")), ChangeCategory::Ccp);
        assert_eq!(classify_pair(&pair("baz", "foo", "bar")), ChangeCategory::Wwdp);
        assert_eq!(classify_pair(&pair("baz", "foo", "foo")), ChangeCategory::Wwsp);
        assert_eq!(classify_pair(&pair("baz", "foo", "baz")), ChangeCategory::Wcp);
    }

    #[test]
    fn classification_ignores_surface_form() {
        // compare_to and compareTo normalize identically.
        assert_eq!(classify_pair(&pair("compare_to", "compareTo", "compareTo")), ChangeCategory::Ccp);
    }

    fn planted() -> Vec<PredictionPair> {
        let mut pairs = Vec::new();
        for _ in 0..10 {
            pairs.push(pair("t", "t", "t")); // CCP
        }
        for _ in 0..5 {
            pairs.push(pair("t", "t", "w")); // CWP
        }
        for _ in 0..3 {
            pairs.push(pair("t", "w", "t")); // WCP
        }
        for _ in 0..2 {
            pairs.push(pair("t", "w", "w")); // WWSP
        }
        for _ in 0..4 {
            pairs.push(pair("t", "w", "z")); // WWDP
        }
        pairs
    }

    #[test]
    fn planted_counts_give_pcp_50() {
        let pairs = planted();
        assert_eq!(pairs.len(), 24);
        let pcp = compute_pcp(&pairs).unwrap();
        assert!((pcp - 50.0).abs() < 1e-12, "{pcp}");
        let b = compute_breakdown(&pairs).unwrap();
        assert_eq!(b.count(ChangeCategory::Ccp), 10);
        assert_eq!(b.count(ChangeCategory::Cwp), 5);
        assert_eq!(b.count(ChangeCategory::Wcp), 3);
        assert_eq!(b.count(ChangeCategory::Wwsp), 2);
        assert_eq!(b.count(ChangeCategory::Wwdp), 4);
        let r1 = b.ratio_correct_to_wrong.unwrap();
        let r2 = b.ratio_wrong_to_correct.unwrap();
        assert!((r1 - 100.0 * 5.0 / 15.0).abs() < 1e-9, "{r1}");
        assert!((r2 - 100.0 * 3.0 / 9.0).abs() < 1e-9, "{r2}");
        // Partition: category counts sum to the total and PCP matches the
        // closed form.
        let sum: usize = ChangeCategory::ALL.iter().map(|&c| b.count(c)).sum();
        assert_eq!(sum, b.total);
        let closed = 100.0
            * (b.count(ChangeCategory::Cwp)
                + b.count(ChangeCategory::Wcp)
                + b.count(ChangeCategory::Wwdp)) as f64
            / b.total as f64;
        assert!((pcp - closed).abs() < 1e-12);
    }

    #[test]
    fn pcp_extremes() {
        let unchanged = vec![pair("t", "a", "a"), pair("t", "t", "t")];
        assert_eq!(compute_pcp(&unchanged).unwrap(), 0.0);
        let changed = vec![pair("t", "a", "b"), pair("t", "t", "x")];
        assert_eq!(compute_pcp(&changed).unwrap(), 100.0);
        assert!(compute_pcp(&[]).is_err());
    }

    #[test]
    fn zero_denominator_ratios_are_absent() {
        let all_correct = vec![pair("t", "t", "t")];
        let b = compute_breakdown(&all_correct).unwrap();
        assert!(b.ratio_wrong_to_correct.is_none());
        assert!(b.ratio_correct_to_wrong.is_some());
        let single_cwp = vec![pair("t", "t", "w")];
        let b = compute_breakdown(&single_cwp).unwrap();
        assert_eq!(b.count(ChangeCategory::Cwp), 1);
        assert_eq!(compute_pcp(&single_cwp).unwrap(), 100.0);
    }

    #[test]
    fn prf_hand_example() {
        let records = vec![("getItemCount".to_string(), "getCount".to_string())];
        let (p, r, f1) = compute_prf(&records).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-9);
        assert!((r - 1.0).abs() < 1e-12);
        assert!((f1 - 0.8).abs() < 1e-9);
    }

    #[test]
    fn prf_bounds_and_extremes() {
        let perfect = vec![("getCount".to_string(), "getCount".to_string()); 3];
        assert_eq!(compute_prf(&perfect).unwrap(), (1.0, 1.0, 1.0));
        let disjoint = vec![("foo".to_string(), "bar".to_string())];
        assert_eq!(compute_prf(&disjoint).unwrap(), (0.0, 0.0, 0.0));
        // F1 lies between min and max of P and R.
        let mixed = vec![
            ("getItemCount".to_string(), "getCount".to_string()),
            ("setX".to_string(), "setXY".to_string()),
        ];
        let (p, r, f1) = compute_prf(&mixed).unwrap();
        assert!(f1 >= p.min(r) - 1e-12 && f1 <= p.max(r) + 1e-12);
    }

    #[test]
    fn buckets_separate_lengths_and_report_absence() {
        let mut a = pair("t", "t", "t");
        a.statement_count = 3;
        let mut b = pair("t", "t", "w");
        b.statement_count = 15;
        let buckets = bucket_by_length(&[a, b], &DEFAULT_BUCKET_EDGES);
        assert_eq!(buckets.len(), 5);
        assert_eq!(buckets[0].label, "1-5");
        assert_eq!(buckets[0].pcp, Some(0.0));
        assert_eq!(buckets[2].label, "11-20");
        assert_eq!(buckets[2].pcp, Some(100.0));
        assert_eq!(buckets[1].pairs, 0);
        assert_eq!(buckets[1].pcp, None, "empty bucket is n/a, never 0");
    }

    #[test]
    fn single_length_collapses_to_global_pcp() {
        let pairs = vec![pair("t", "t", "t"), pair("t", "t", "w")];
        let buckets = bucket_by_length(&pairs, &DEFAULT_BUCKET_EDGES);
        assert_eq!(buckets[0].pairs, 2);
        assert_eq!(buckets[0].pcp, Some(compute_pcp(&pairs).unwrap()));
    }

    #[test]
    fn aggregation_is_order_independent() {
        let mut pairs = planted();
        let report_a = build_report("d", &pairs, &DEFAULT_BUCKET_EDGES);
        pairs.reverse();
        let report_b = build_report("d", &pairs, &DEFAULT_BUCKET_EDGES);
        assert_eq!(report_a, report_b);
    }

    #[test]
    fn report_orders_kinds_canonically() {
        let mk = |kind: TransformKind| {
            let mut p = pair("t", "t", "w");
            p.kind = kind;
            p
        };
        let pairs = vec![
            mk(TransformKind::UnusedStatement),
            mk(TransformKind::VariableRenaming),
            mk(TransformKind::SwitchToIf),
        ];
        let report = build_report("d", &pairs, &DEFAULT_BUCKET_EDGES);
        let order: Vec<TransformKind> = report.kinds.iter().map(|k| k.kind).collect();
        assert_eq!(
            order,
            vec![
                TransformKind::VariableRenaming,
                TransformKind::SwitchToIf,
                TransformKind::UnusedStatement
            ]
        );
    }
}
