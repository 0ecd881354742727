//! Corpus ingestion, variant emission with manifests, prediction joining,
//! and the deterministic baseline predictor used for end-to-end runs.
//!
//! Everything is JSON-Lines. Input corpora are either a directory tree of
//! `.java` files or a `.jsonl` file of `{id, source}` rows. Outputs are
//! reproducible: (corpus, request) fully determines every byte, files are
//! written atomically, and manifest rows are sorted by variant id.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    count_statements, enumerate_sites, resolve_scopes, SymbolTable, TransformKind,
};
use crate::metrics::{normalize_name, PredictionPair};
use crate::syntax::ast::MethodAst;
use crate::syntax::parser::extract_methods;
use crate::syntax::printer::print_method;
use crate::transform::{all_place, single_place, x_percent, Mode, TransformCtx, Variant};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("corpus at {0} contains no supported methods")]
    EmptyCorpus(PathBuf),
    #[error("transform failed: {0}")]
    Transform(#[from] crate::transform::TransformError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

/// One ingested method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub method_id: String,
    pub source_path: String,
    /// Ground-truth label: the declared method name.
    pub method_name: String,
    pub statement_count: usize,
    /// Site count per transformation kind (the paper's per-method `n`).
    pub site_counts: BTreeMap<String, usize>,
    /// Canonical source, so downstream steps never re-read the inputs.
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct CorpusManifest {
    pub label: String,
    pub entries: Vec<CorpusEntry>,
}

/// Ingested corpus with parsed methods aligned to `manifest.entries`.
pub struct IngestResult {
    pub manifest: CorpusManifest,
    pub methods: Vec<MethodAst>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct CorpusRow {
    id: String,
    source: String,
}

/// Reads a corpus from a directory tree of `.java` files or a JSON-Lines
/// file of `{id, source}` rows.
pub fn ingest(path: &Path) -> Result<IngestResult, CorpusError> {
    let mut diagnostics = Vec::new();
    let mut entries = Vec::new();
    let mut methods = Vec::new();

    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());

    if path.is_dir() {
        let mut files: Vec<PathBuf> = walkdir::WalkDir::new(path)
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file())
            .map(|e| e.into_path())
            .filter(|p| p.extension().is_some_and(|x| x == "java"))
            .collect();
        files.sort();
        for file in files {
            let text = fs::read_to_string(&file).map_err(io_err(&file))?;
            let rel = file
                .strip_prefix(path)
                .unwrap_or(&file)
                .to_string_lossy()
                .replace('\\', "/");
            ingest_source(&rel, &rel, &text, &mut entries, &mut methods, &mut diagnostics);
        }
    } else if path.extension().is_some_and(|x| x == "java") {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let display = path.to_string_lossy().into_owned();
        ingest_source(&name, &display, &text, &mut entries, &mut methods, &mut diagnostics);
    } else {
        let reader = BufReader::new(fs::File::open(path).map_err(io_err(path))?);
        let display = path.to_string_lossy().into_owned();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(io_err(path))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CorpusRow>(&line) {
                Ok(row) => ingest_source(
                    &row.id,
                    &display,
                    &row.source,
                    &mut entries,
                    &mut methods,
                    &mut diagnostics,
                ),
                Err(e) => {
                    diagnostics.push(format!("{display}:{}: malformed row skipped: {e}", lineno + 1));
                }
            }
        }
    }

    if entries.is_empty() {
        return Err(CorpusError::EmptyCorpus(path.to_path_buf()));
    }
    Ok(IngestResult { manifest: CorpusManifest { label, entries }, methods, diagnostics })
}

fn ingest_source(
    id_base: &str,
    source_path: &str,
    text: &str,
    entries: &mut Vec<CorpusEntry>,
    methods: &mut Vec<MethodAst>,
    diagnostics: &mut Vec<String>,
) {
    let outcome = extract_methods(text);
    for d in &outcome.diagnostics {
        diagnostics.push(format!("{source_path}: {d}"));
    }
    for (k, method) in outcome.methods.into_iter().enumerate() {
        let table = match resolve_scopes(&method) {
            Ok(t) => t,
            Err(e) => {
                diagnostics.push(format!("{source_path}: method '{}' skipped: {e}", method.name));
                continue;
            }
        };
        let mut site_counts = BTreeMap::new();
        for kind in TransformKind::ALL {
            site_counts
                .insert(kind.name().to_string(), enumerate_sites(&method, &table, kind).len());
        }
        entries.push(CorpusEntry {
            method_id: format!("{id_base}#{k}"),
            source_path: source_path.to_string(),
            method_name: method.name.clone(),
            statement_count: count_statements(&method),
            site_counts,
            source: print_method(&method),
        });
        methods.push(method);
    }
}

/// Keeps the entries whose site count for `kind` is at least `k`
/// (the paper's d_t^4 construction uses k = 4).
pub fn filter_min_sites(ingest: &IngestResult, kind: TransformKind, k: usize) -> IngestResult {
    let mut entries = Vec::new();
    let mut methods = Vec::new();
    for (entry, method) in ingest.manifest.entries.iter().zip(&ingest.methods) {
        if entry.site_counts.get(kind.name()).copied().unwrap_or(0) >= k {
            entries.push(entry.clone());
            methods.push(method.clone());
        }
    }
    IngestResult {
        manifest: CorpusManifest { label: ingest.manifest.label.clone(), entries },
        methods,
        diagnostics: Vec::new(),
    }
}

/// One row of the variant manifest (JSON-Lines; field names are fixed).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantRow {
    pub method_id: String,
    pub variant_id: String,
    pub transform: String,
    pub mode: String,
    pub percent: Option<u8>,
    pub seed: u64,
    pub sites_applied: usize,
    pub path: String,
}

impl VariantRow {
    pub fn kind(&self) -> Option<TransformKind> {
        TransformKind::parse(&self.transform)
    }
}

/// What to generate.
#[derive(Debug, Clone)]
pub struct EmitRequest {
    pub kinds: Vec<TransformKind>,
    pub mode: Mode,
    pub seed: u64,
    /// Percent mode re-runs with derived seeds seed+1..seed+repeat.
    pub repeat: u32,
    /// Per-kind eligibility floor: methods with fewer sites are skipped
    /// for that kind (the d_t^4 construction uses 4).
    pub min_sites: Option<usize>,
}

/// Variants for a single method under one request; pure, so callers may
/// fan methods out across worker threads.
pub fn variants_for_method(
    method_id: &str,
    method: &MethodAst,
    table: &SymbolTable,
    request: &EmitRequest,
) -> Result<(Vec<Variant>, Vec<String>), CorpusError> {
    let ctx = TransformCtx { method_id, ast: method, table };
    let mut variants = Vec::new();
    let mut diagnostics = Vec::new();
    for &kind in &request.kinds {
        if let Some(k) = request.min_sites {
            if enumerate_sites(method, table, kind).len() < k {
                continue;
            }
        }
        match request.mode {
            Mode::SinglePlace => {
                let (mut vs, skipped) = single_place(&ctx, kind, request.seed);
                variants.append(&mut vs);
                diagnostics.extend(skipped);
            }
            Mode::AllPlace => {
                if let Some(v) = all_place(&ctx, kind, request.seed)? {
                    variants.push(v);
                }
            }
            Mode::Percent(x) => {
                for r in 1..=request.repeat.max(1) {
                    let seed = request.seed + u64::from(r);
                    if let Some(v) = x_percent(&ctx, kind, x, seed)? {
                        variants.push(v);
                    }
                }
            }
        }
    }
    Ok((variants, diagnostics))
}

/// Everything `emit_variants` wrote.
pub struct EmitOutcome {
    pub rows: Vec<VariantRow>,
    pub diagnostics: Vec<String>,
    pub variants_manifest_path: PathBuf,
    pub corpus_manifest_path: PathBuf,
}

/// Generates variants for the whole corpus and writes them plus both
/// manifests under `out_dir`. Per-method work fans out over `jobs` worker
/// threads; results are identical for any job count because rows are
/// merged and sorted by variant id and every file path is distinct.
/// Re-running with identical inputs rewrites byte-identical content.
pub fn emit_variants(
    ingest: &IngestResult,
    request: &EmitRequest,
    out_dir: &Path,
    jobs: usize,
) -> Result<EmitOutcome, CorpusError> {
    use rayon::prelude::*;

    let variants_dir = out_dir.join("variants");
    fs::create_dir_all(&variants_dir).map_err(io_err(&variants_dir))?;

    let work: Vec<(&CorpusEntry, &MethodAst)> =
        ingest.manifest.entries.iter().zip(&ingest.methods).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("worker pool");
    let per_method: Vec<(Vec<VariantRow>, Vec<String>)> = pool.install(|| {
        work.par_iter()
            .map(|(entry, method)| {
                let table = resolve_scopes(method).expect("ingested methods resolve");
                let (variants, diags) =
                    variants_for_method(&entry.method_id, method, &table, request)?;
                let mut rows = Vec::with_capacity(variants.len());
                for v in variants {
                    rows.push(write_variant(&variants_dir, &v)?);
                }
                Ok((rows, diags))
            })
            .collect::<Result<Vec<_>, CorpusError>>()
    })?;

    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (r, d) in per_method {
        rows.extend(r);
        diagnostics.extend(d);
    }
    rows.sort_by(|a, b| a.variant_id.cmp(&b.variant_id));
    diagnostics.sort();

    let variants_manifest_path = out_dir.join("variants.jsonl");
    write_jsonl(&variants_manifest_path, &rows)?;
    let corpus_manifest_path = out_dir.join("corpus_manifest.jsonl");
    write_corpus_manifest(&corpus_manifest_path, &ingest.manifest)?;
    Ok(EmitOutcome { rows, diagnostics, variants_manifest_path, corpus_manifest_path })
}

/// Writes one variant source file atomically; returns its manifest row.
pub fn write_variant(variants_dir: &Path, v: &Variant) -> Result<VariantRow, CorpusError> {
    let file_name = format!("{}.java", v.variant_id);
    let path = variants_dir.join(&file_name);
    atomic_write(&path, format!("{}\n", v.source).as_bytes())?;
    Ok(VariantRow {
        method_id: v.method_id.clone(),
        variant_id: v.variant_id.clone(),
        transform: v.kind.name().to_string(),
        mode: v.mode.label().to_string(),
        percent: v.mode.percent(),
        seed: v.seed,
        sites_applied: v.applied_sites.len(),
        path: format!("variants/{file_name}"),
    })
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(bytes).map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))?;
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CorpusError> {
    let mut buf = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut buf, row).expect("serializable row");
        buf.push(b'\n');
    }
    atomic_write(path, &buf)
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let reader = BufReader::new(fs::File::open(path).map_err(io_err(path))?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| CorpusError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?;
        out.push(row);
    }
    Ok(out)
}

pub fn write_corpus_manifest(path: &Path, manifest: &CorpusManifest) -> Result<(), CorpusError> {
    write_jsonl(path, &manifest.entries)
}

pub fn read_corpus_manifest(path: &Path, label: &str) -> Result<CorpusManifest, CorpusError> {
    let entries = read_jsonl(path)?;
    Ok(CorpusManifest { label: label.to_string(), entries })
}

// ---- prediction joining ----

/// Prediction file row: `{id, prediction}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredRow {
    pub id: String,
    pub prediction: String,
}

/// Exact accounting of a join: pairs + missing = variants.
#[derive(Debug, Default)]
pub struct JoinReport {
    pub pairs: usize,
    pub missing: Vec<String>,
    pub rejected: Vec<String>,
    pub duplicate_warnings: Vec<String>,
}

/// Loads a prediction file into an id -> prediction map; duplicate ids are
/// last-write-wins with a warning.
pub fn load_predictions(
    path: &Path,
    warnings: &mut Vec<String>,
) -> Result<BTreeMap<String, String>, CorpusError> {
    let rows: Vec<PredRow> = read_jsonl(path)?;
    let mut map = BTreeMap::new();
    for row in rows {
        if map.insert(row.id.clone(), row.prediction).is_some() {
            warnings.push(format!(
                "duplicate prediction id '{}' in {}; keeping the last occurrence",
                row.id,
                path.display()
            ));
        }
    }
    Ok(map)
}

/// Joins variants with ground truth and both prediction files into
/// classification-ready pairs; variants lacking either prediction are
/// reported and excluded.
pub fn join_predictions(
    variants: &[VariantRow],
    corpus: &CorpusManifest,
    pred_original: &BTreeMap<String, String>,
    pred_variant: &BTreeMap<String, String>,
) -> (Vec<PredictionPair>, JoinReport) {
    let truth: BTreeMap<&str, (&str, usize)> = corpus
        .entries
        .iter()
        .map(|e| (e.method_id.as_str(), (e.method_name.as_str(), e.statement_count)))
        .collect();
    let mut pairs = Vec::new();
    let mut report = JoinReport::default();
    for row in variants {
        let Some(kind) = row.kind() else {
            report.rejected.push(format!("{}: unknown transform '{}'", row.variant_id, row.transform));
            continue;
        };
        let Some(&(truth_name, stmt_count)) = truth.get(row.method_id.as_str()) else {
            report.rejected.push(format!("{}: method '{}' not in corpus", row.variant_id, row.method_id));
            continue;
        };
        let Some(orig) = pred_original.get(&row.method_id) else {
            report.missing.push(format!("{}: no original prediction for '{}'", row.variant_id, row.method_id));
            continue;
        };
        let Some(var) = pred_variant.get(&row.variant_id) else {
            report.missing.push(format!("{}: no variant prediction", row.variant_id));
            continue;
        };
        match PredictionPair::from_raw(
            row.method_id.clone(),
            row.variant_id.clone(),
            truth_name,
            orig,
            var,
            stmt_count,
            kind,
        ) {
            Ok(pair) => pairs.push(pair),
            Err(e) => report.rejected.push(format!("{}: {e}", row.variant_id)),
        }
    }
    report.pairs = pairs.len();
    (pairs, report)
}

// ---- baseline predictor ----

/// Deterministic heuristic model: the two most frequent identifier
/// subtokens in the body, joined camelCase, ties broken lexicographically.
/// Sensitive to variable renaming by construction.
pub fn baseline_predict(method: &MethodAst) -> String {
    let mut names = Vec::new();
    collect_body_identifiers(method, &mut names);
    let mut freq: BTreeMap<String, usize> = BTreeMap::new();
    for name in names {
        for tok in crate::metrics::split_subtokens(&name) {
            *freq.entry(tok).or_insert(0) += 1;
        }
    }
    if freq.is_empty() {
        return "unknown".to_string();
    }
    let mut ranked: Vec<(String, usize)> = freq.into_iter().collect();
    // Highest count first; lexicographic among equals (BTreeMap order).
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let first = ranked[0].0.clone();
    match ranked.get(1) {
        Some((second, _)) => {
            let mut chars = second.chars();
            let capitalized = match chars.next() {
                Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
                None => String::new(),
            };
            format!("{first}{capitalized}")
        }
        None => first,
    }
}

fn collect_body_identifiers(method: &MethodAst, out: &mut Vec<String>) {
    use crate::syntax::ast::{ExprKind, StmtKind};
    crate::analysis::walk_stmts(&method.body, &mut |stmt| match &stmt.kind {
        StmtKind::VarDecl { name, .. } => out.push(name.clone()),
        StmtKind::Try { catch: Some(c), .. } => out.push(c.param.name.clone()),
        _ => {}
    });
    // Expression identifiers: variable references and call names.
    fn walk_exprs(method: &MethodAst, out: &mut Vec<String>) {
        use crate::analysis::walk_stmts;
        walk_stmts(&method.body, &mut |stmt| {
            let mut collect = |e: &crate::syntax::ast::Expr| {
                collect_expr_idents(e, out);
            };
            match &stmt.kind {
                StmtKind::VarDecl { init: Some(e), .. } => collect(e),
                StmtKind::Assign(a) => {
                    collect(&a.target);
                    if let Some(v) = &a.value {
                        collect(v);
                    }
                }
                StmtKind::ExprStmt(e) => collect(e),
                StmtKind::If { cond, .. } => collect(cond),
                StmtKind::While { cond, .. } => collect(cond),
                StmtKind::DoWhile { cond, .. } => collect(cond),
                StmtKind::For { cond, update, .. } => {
                    if let Some(c) = cond {
                        collect(c);
                    }
                    if let Some(u) = update {
                        collect(&u.target);
                        if let Some(v) = &u.value {
                            collect(v);
                        }
                    }
                }
                StmtKind::Switch { scrutinee, .. } => collect(scrutinee),
                StmtKind::Return(Some(e)) => collect(e),
                _ => {}
            }
        });
    }
    fn collect_expr_idents(expr: &crate::syntax::ast::Expr, out: &mut Vec<String>) {
        match &expr.kind {
            ExprKind::VarRef(name) => out.push(name.clone()),
            ExprKind::Unary { operand, .. } => collect_expr_idents(operand, out),
            ExprKind::Binary { lhs, rhs, .. } => {
                collect_expr_idents(lhs, out);
                collect_expr_idents(rhs, out);
            }
            ExprKind::Call { name, args } => {
                out.push(name.clone());
                for a in args {
                    collect_expr_idents(a, out);
                }
            }
            ExprKind::Ternary { cond, then_expr, else_expr } => {
                collect_expr_idents(cond, out);
                collect_expr_idents(then_expr, out);
                collect_expr_idents(else_expr, out);
            }
            _ => {}
        }
    }
    walk_exprs(method, out);
}

/// Original and variant predictions produced by the baseline model.
pub fn baseline_predictions(
    corpus: &CorpusManifest,
    variants: &[VariantRow],
    variants_root: &Path,
) -> Result<(Vec<PredRow>, Vec<PredRow>), CorpusError> {
    let mut originals = Vec::new();
    for entry in &corpus.entries {
        let method = crate::syntax::parser::parse_method(&entry.source).map_err(|e| {
            CorpusError::Io {
                path: PathBuf::from(&entry.method_id),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
            }
        })?;
        originals.push(PredRow { id: entry.method_id.clone(), prediction: baseline_predict(&method) });
    }
    let mut variant_preds = Vec::new();
    for row in variants {
        let path = variants_root.join(&row.path);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let method = crate::syntax::parser::parse_method(text.trim_end()).map_err(|e| {
            CorpusError::Io {
                path: path.clone(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
            }
        })?;
        variant_preds.push(PredRow { id: row.variant_id.clone(), prediction: baseline_predict(&method) });
    }
    Ok((originals, variant_preds))
}

/// Sanity gate used by ingest consumers: every entry's stored source must
/// parse and re-print identically.
pub fn verify_entry_sources(manifest: &CorpusManifest) -> Result<(), String> {
    for entry in &manifest.entries {
        let m = crate::syntax::parser::parse_method(&entry.source)
            .map_err(|e| format!("{}: stored source does not parse: {e}", entry.method_id))?;
        let printed = print_method(&m);
        if printed != entry.source {
            return Err(format!("{}: stored source is not canonical", entry.method_id));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_method;

    fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn ingest_directory_counts_methods() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "A.java",
            "class A { int one() { return 1; } int two() { return 2; } }",
        );
        write(
            dir.path(),
            "B.java",
            "class B { int three() { return 3; } int four() { return 4; } }",
        );
        let result = ingest(dir.path()).unwrap();
        assert_eq!(result.manifest.entries.len(), 4);
        assert_eq!(result.methods.len(), 4);
        assert!(result.diagnostics.is_empty());
        verify_entry_sources(&result.manifest).unwrap();
    }

    #[test]
    fn ingest_jsonl_skips_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let file = write(
            dir.path(),
            "corpus.jsonl",
            concat!(
                r#"{"id": "m1", "source": "int f() { return 1; }"}"#,
                "\n",
                "{not json}\n",
                r#"{"id": "m2", "source": "int g(int a) { return a; }"}"#,
                "\n",
            ),
        );
        let result = ingest(&file).unwrap();
        assert_eq!(result.manifest.entries.len(), 2);
        assert_eq!(result.diagnostics.len(), 1);
        assert_eq!(result.manifest.entries[0].method_id, "m1#0");
    }

    #[test]
    fn empty_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(ingest(dir.path()), Err(CorpusError::EmptyCorpus(_))));
    }

    #[test]
    fn filter_min_sites_keeps_threshold() {
        let dir = tempfile::tempdir().unwrap();
        let file = write(
            dir.path(),
            "c.jsonl",
            concat!(
                r#"{"id": "one", "source": "int f(int a) { return a; }"}"#,
                "\n",
                r#"{"id": "four", "source": "int f(int a) { int b = a; int c = b; int d = c; return d; }"}"#,
                "\n",
            ),
        );
        let result = ingest(&file).unwrap();
        let filtered = filter_min_sites(&result, TransformKind::VariableRenaming, 4);
        assert_eq!(filtered.manifest.entries.len(), 1);
        assert_eq!(filtered.manifest.entries[0].method_id, "four#0");
        let all = filter_min_sites(&result, TransformKind::VariableRenaming, 1);
        assert_eq!(all.manifest.entries.len(), 2);
    }

    #[test]
    fn emit_is_reproducible_and_files_reparse() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = write(
            dir.path(),
            "c.jsonl",
            concat!(
                r#"{"id": "m", "source": "int f(int a) { int b = a; int c = b + 1; return c; }"}"#,
                "\n"
            ),
        );
        let result = ingest(&corpus).unwrap();
        let request = EmitRequest {
            kinds: vec![TransformKind::VariableRenaming],
            mode: Mode::SinglePlace,
            seed: 7,
            repeat: 1,
            min_sites: None,
        };
        let out1 = dir.path().join("out");
        let e1 = emit_variants(&result, &request, &out1, 2).unwrap();
        assert_eq!(e1.rows.len(), 3);
        for row in &e1.rows {
            let text = fs::read_to_string(out1.join(&row.path)).unwrap();
            let m = parse_method(text.trim_end()).unwrap();
            assert_eq!(format!("{}\n", print_method(&m)), text);
        }
        // Second run is byte-identical.
        let manifest1 = fs::read(&e1.variants_manifest_path).unwrap();
        let e2 = emit_variants(&result, &request, &out1, 1).unwrap();
        let manifest2 = fs::read(&e2.variants_manifest_path).unwrap();
        assert_eq!(manifest1, manifest2);
        // Rows are sorted by variant id.
        let mut sorted = e1.rows.clone();
        sorted.sort_by(|a, b| a.variant_id.cmp(&b.variant_id));
        assert_eq!(
            e1.rows.iter().map(|r| &r.variant_id).collect::<Vec<_>>(),
            sorted.iter().map(|r| &r.variant_id).collect::<Vec<_>>()
        );
    }

    #[test]
    fn join_accounts_for_every_variant() {
        let corpus = CorpusManifest {
            label: "t".into(),
            entries: vec![CorpusEntry {
                method_id: "m#0".into(),
                source_path: "m".into(),
                method_name: "getCount".into(),
                statement_count: 2,
                site_counts: BTreeMap::new(),
                source: String::new(),
            }],
        };
        let mk_row = |vid: &str| VariantRow {
            method_id: "m#0".into(),
            variant_id: vid.into(),
            transform: "VariableRenaming".into(),
            mode: "single".into(),
            percent: None,
            seed: 1,
            sites_applied: 1,
            path: format!("variants/{vid}.java"),
        };
        let variants = vec![mk_row("v1"), mk_row("v2"), mk_row("v3")];
        let orig: BTreeMap<String, String> =
            [("m#0".to_string(), "getCount".to_string())].into();
        let vars: BTreeMap<String, String> = [
            ("v1".to_string(), "getCount".to_string()),
            ("v2".to_string(), "setValue".to_string()),
        ]
        .into();
        let (pairs, report) = join_predictions(&variants, &corpus, &orig, &vars);
        assert_eq!(pairs.len(), 2);
        assert_eq!(report.missing.len(), 1);
        assert_eq!(pairs.len() + report.missing.len(), variants.len());
    }

    #[test]
    fn duplicate_predictions_last_write_wins() {
        let dir = tempfile::tempdir().unwrap();
        let file = write(
            dir.path(),
            "p.jsonl",
            concat!(
                r#"{"id": "x", "prediction": "first"}"#,
                "\n",
                r#"{"id": "x", "prediction": "second"}"#,
                "\n"
            ),
        );
        let mut warnings = Vec::new();
        let map = load_predictions(&file, &mut warnings).unwrap();
        assert_eq!(map["x"], "second");
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn baseline_is_deterministic_and_name_sensitive() {
        let m = parse_method(
            "int getCount(int a) { int count = a; count = count + 1; return count; }",
        )
        .unwrap();
        let p1 = baseline_predict(&m);
        let p2 = baseline_predict(&m);
        assert_eq!(p1, p2);
        assert!(p1.to_lowercase().contains("count"), "{p1}");

        let renamed = parse_method(
            "int getCount(int a) { int var0 = a; var0 = var0 + 1; return var0; }",
        )
        .unwrap();
        assert_ne!(baseline_predict(&renamed), p1, "renaming must change the prediction");
    }

    #[test]
    fn baseline_fallback_for_empty_body() {
        let m = parse_method("void f() { }").unwrap();
        assert_eq!(baseline_predict(&m), "unknown");
    }
}
