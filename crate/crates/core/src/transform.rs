//! The six semantic-preserving transformations and the three application
//! modes (single-place, all-place, X%).
//!
//! Applications are pure given an explicit seed. Multi-site applications
//! rewrite sites in reverse document order so untouched nodes keep their
//! original ids while later sites are located; the result is renumbered
//! once at the end. Rng streams are derived per (seed, method-id, kind,
//! mode, anchor), never shared.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{
    enumerate_sites, independent, BindingId, LoopForm, Site, SitePayload, SymbolTable,
    TransformKind,
};
use crate::hashing::{content_id, Fnv64};
use crate::syntax::ast::*;
use crate::syntax::printer::print_method;

/// How sites are selected for one variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    SinglePlace,
    AllPlace,
    /// X in {25, 50, 75}.
    Percent(u8),
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::SinglePlace => "single",
            Mode::AllPlace => "all",
            Mode::Percent(_) => "percent",
        }
    }

    pub fn percent(self) -> Option<u8> {
        match self {
            Mode::Percent(x) => Some(x),
            _ => None,
        }
    }

    fn rng_tag(self) -> String {
        match self {
            Mode::SinglePlace => "single".into(),
            Mode::AllPlace => "all".into(),
            Mode::Percent(x) => format!("pct{x}"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TransformError {
    #[error("fresh name '{name}' already occurs in the method")]
    NameCollision { name: String },
    #[error("site is not eligible for {kind}: {reason}")]
    IneligibleSite { kind: TransformKind, reason: String },
    #[error("{mode} mode is not applicable to {kind}")]
    ModeUnsupported { kind: TransformKind, mode: &'static str },
    #[error("percent must be 25, 50, or 75 (got {0})")]
    InvalidPercent(u8),
}

/// One transformed method plus provenance.
#[derive(Debug, Clone)]
pub struct Variant {
    pub method_id: String,
    pub variant_id: String,
    pub kind: TransformKind,
    pub mode: Mode,
    pub applied_sites: Vec<Site>,
    pub seed: u64,
    pub ast: MethodAst,
    pub source: String,
}

/// Everything the drivers need about one method.
pub struct TransformCtx<'a> {
    pub method_id: &'a str,
    pub ast: &'a MethodAst,
    pub table: &'a SymbolTable,
}

// ---- individual transformations ----

/// Renames the binding at `site` to `fresh_name` everywhere; the AST shape
/// is preserved exactly.
pub fn rename_variable(
    ast: &MethodAst,
    table: &SymbolTable,
    site: &Site,
    fresh_name: &str,
) -> Result<MethodAst, TransformError> {
    let binding = expect_binding(site)?;
    if identifier_lexemes(ast).contains(fresh_name) {
        return Err(TransformError::NameCollision { name: fresh_name.to_string() });
    }
    let mut out = ast.clone();
    apply_rename(&mut out, table, binding, fresh_name);
    renumber(&mut out);
    Ok(out)
}

/// Negates the stored value of a boolean local: initializer and assigned
/// values are logically negated and every read is negation-wrapped (with
/// double negations collapsed).
pub fn boolean_exchange(
    ast: &MethodAst,
    table: &SymbolTable,
    site: &Site,
) -> Result<MethodAst, TransformError> {
    let binding = expect_binding(site)?;
    let mut out = ast.clone();
    apply_boolean_exchange(&mut out, table, binding)?;
    renumber(&mut out);
    Ok(out)
}

/// `for` -> block-wrapped `while` (update moved to the body tail), or
/// `while` -> `for (; cond;)`.
pub fn loop_exchange(ast: &MethodAst, site: &Site) -> Result<MethodAst, TransformError> {
    let mut out = ast.clone();
    apply_loop_exchange(&mut out, site)?;
    renumber(&mut out);
    Ok(out)
}

/// Replaces an eligible switch with an if/else-if chain over a fresh
/// temporary holding the scrutinee.
pub fn switch_to_if(
    ast: &MethodAst,
    table: &SymbolTable,
    site: &Site,
    temp_name: &str,
) -> Result<MethodAst, TransformError> {
    if identifier_lexemes(ast).contains(temp_name) {
        return Err(TransformError::NameCollision { name: temp_name.to_string() });
    }
    let mut out = ast.clone();
    apply_switch_to_if(&mut out, table, site, temp_name)?;
    renumber(&mut out);
    Ok(out)
}

/// Swaps an adjacent independent statement pair.
pub fn permute_statements(
    ast: &MethodAst,
    table: &SymbolTable,
    site: &Site,
) -> Result<MethodAst, TransformError> {
    let mut out = ast.clone();
    apply_permute(&mut out, table, site)?;
    renumber(&mut out);
    Ok(out)
}

/// Inserts `int <fresh> = <digit>;` at an rng-chosen position of the block.
pub fn insert_unused_statement(
    ast: &MethodAst,
    site: &Site,
    fresh_name: &str,
    rng: &mut ChaCha8Rng,
) -> Result<MethodAst, TransformError> {
    if identifier_lexemes(ast).contains(fresh_name) {
        return Err(TransformError::NameCollision { name: fresh_name.to_string() });
    }
    let mut out = ast.clone();
    apply_insert_unused(&mut out, site, fresh_name, rng)?;
    renumber(&mut out);
    Ok(out)
}

// ---- application modes ----

/// One variant per enumerated site, each differing from the original at
/// only that site. Sites that unexpectedly fail are skipped and reported
/// in the second return value.
pub fn single_place(ctx: &TransformCtx, kind: TransformKind, seed: u64) -> (Vec<Variant>, Vec<String>) {
    let sites = enumerate_sites(ctx.ast, ctx.table, kind);
    let mut variants = Vec::with_capacity(sites.len());
    let mut skipped = Vec::new();
    for site in &sites {
        match apply_selected(ctx, kind, Mode::SinglePlace, std::slice::from_ref(site), seed) {
            Ok(v) => variants.push(v),
            Err(e) => skipped.push(format!(
                "{}: {} site at node {} skipped: {e}",
                ctx.method_id, kind, site.anchor
            )),
        }
    }
    (variants, skipped)
}

/// Applies every site in one variant; `None` when the method has no sites.
pub fn all_place(
    ctx: &TransformCtx,
    kind: TransformKind,
    seed: u64,
) -> Result<Option<Variant>, TransformError> {
    if matches!(kind, TransformKind::PermuteStatement | TransformKind::UnusedStatement) {
        return Err(TransformError::ModeUnsupported { kind, mode: "all-place" });
    }
    let sites = enumerate_sites(ctx.ast, ctx.table, kind);
    if sites.is_empty() {
        return Ok(None);
    }
    apply_selected(ctx, kind, Mode::AllPlace, &sites, seed).map(Some)
}

/// Applies `floor(n*X/100)` sites chosen uniformly without replacement by
/// a seeded rng; `None` when that count is zero. The chosen site set is a
/// function of (seed, method-id, kind, X) only.
pub fn x_percent(
    ctx: &TransformCtx,
    kind: TransformKind,
    x: u8,
    seed: u64,
) -> Result<Option<Variant>, TransformError> {
    if matches!(kind, TransformKind::PermuteStatement | TransformKind::UnusedStatement) {
        return Err(TransformError::ModeUnsupported { kind, mode: "x-percent" });
    }
    if !matches!(x, 25 | 50 | 75) {
        return Err(TransformError::InvalidPercent(x));
    }
    let sites = enumerate_sites(ctx.ast, ctx.table, kind);
    let n = sites.len();
    let k = n * usize::from(x) / 100;
    if k == 0 {
        return Ok(None);
    }
    let mut rng = derive_rng(&[
        &seed.to_string(),
        ctx.method_id,
        kind.tag(),
        &Mode::Percent(x).rng_tag(),
    ]);
    let chosen = sample_without_replacement(n, k, &mut rng);
    let selected: Vec<Site> = chosen.into_iter().map(|i| sites[i].clone()).collect();
    apply_selected(ctx, kind, Mode::Percent(x), &selected, seed).map(Some)
}

/// Uniform k-subset of 0..n, returned sorted.
fn sample_without_replacement(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let mut chosen = idx[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

fn apply_selected(
    ctx: &TransformCtx,
    kind: TransformKind,
    mode: Mode,
    sites: &[Site],
    seed: u64,
) -> Result<Variant, TransformError> {
    let mut out = ctx.ast.clone();
    let used = identifier_lexemes(ctx.ast);

    match kind {
        TransformKind::VariableRenaming => {
            let mut namer = FreshNamer::new("var", used);
            // Fresh names follow site order: var0, var1, ...
            for site in sites {
                let binding = expect_binding(site)?;
                let name = namer.next();
                apply_rename(&mut out, ctx.table, binding, &name);
            }
        }
        TransformKind::BooleanExchange => {
            for site in sites {
                let binding = expect_binding(site)?;
                apply_boolean_exchange(&mut out, ctx.table, binding)?;
            }
        }
        TransformKind::LoopExchange => {
            // Reverse document order keeps outer anchors valid while inner
            // loops rewrite first.
            for site in sites.iter().rev() {
                apply_loop_exchange(&mut out, site)?;
            }
        }
        TransformKind::SwitchToIf => {
            let mut namer = FreshNamer::new("tmp", used);
            let names: Vec<String> = sites.iter().map(|_| namer.next()).collect();
            for (site, name) in sites.iter().zip(&names).rev() {
                apply_switch_to_if(&mut out, ctx.table, site, name)?;
            }
        }
        TransformKind::PermuteStatement => {
            let [site] = sites else {
                return Err(TransformError::ModeUnsupported { kind, mode: "multi-site" });
            };
            apply_permute(&mut out, ctx.table, site)?;
        }
        TransformKind::UnusedStatement => {
            let [site] = sites else {
                return Err(TransformError::ModeUnsupported { kind, mode: "multi-site" });
            };
            let mut namer = FreshNamer::new("unused", used);
            let name = namer.next();
            let mut rng = derive_rng(&[
                &seed.to_string(),
                ctx.method_id,
                kind.tag(),
                &mode.rng_tag(),
                &site.anchor.to_string(),
            ]);
            apply_insert_unused(&mut out, site, &name, &mut rng)?;
        }
    }

    renumber(&mut out);
    let source = print_method(&out);
    let variant_id = variant_id(ctx.method_id, kind, mode, seed, sites);
    Ok(Variant {
        method_id: ctx.method_id.to_string(),
        variant_id,
        kind,
        mode,
        applied_sites: sites.to_vec(),
        seed,
        ast: out,
        source,
    })
}

/// Content-addressed id: a function of (method-id, kind, mode, X, seed,
/// applied-site anchors).
fn variant_id(method_id: &str, kind: TransformKind, mode: Mode, seed: u64, sites: &[Site]) -> String {
    let anchors: Vec<String> = sites.iter().map(|s| s.anchor.to_string()).collect();
    let anchor_list = anchors.join(",");
    let seed_s = seed.to_string();
    let hash = content_id(&[method_id, kind.tag(), &mode.rng_tag(), &seed_s, &anchor_list]);
    format!("{}-{}", kind.tag(), hash)
}

fn derive_rng(parts: &[&str]) -> ChaCha8Rng {
    let mut h = Fnv64::new();
    for p in parts {
        h.write_str(p);
    }
    ChaCha8Rng::seed_from_u64(h.finish())
}

struct FreshNamer {
    base: &'static str,
    next: usize,
    used: BTreeSet<String>,
}

impl FreshNamer {
    fn new(base: &'static str, used: BTreeSet<String>) -> FreshNamer {
        FreshNamer { base, next: 0, used }
    }

    fn next(&mut self) -> String {
        loop {
            let candidate = format!("{}{}", self.base, self.next);
            self.next += 1;
            if !self.used.contains(&candidate) {
                self.used.insert(candidate.clone());
                return candidate;
            }
        }
    }
}

fn expect_binding(site: &Site) -> Result<BindingId, TransformError> {
    match &site.payload {
        SitePayload::Binding(b) => Ok(*b),
        _ => Err(TransformError::IneligibleSite {
            kind: site.kind,
            reason: "payload is not a binding".into(),
        }),
    }
}

// ---- rename ----

fn apply_rename(ast: &mut MethodAst, table: &SymbolTable, binding: BindingId, fresh: &str) {
    let occ: BTreeSet<NodeId> = table.occurrences(binding).into_iter().collect();
    for p in &mut ast.params {
        if occ.contains(&p.id) {
            p.name = fresh.to_string();
        }
    }
    rename_block(&mut ast.body, &occ, fresh);
}

fn rename_block(block: &mut Block, occ: &BTreeSet<NodeId>, fresh: &str) {
    for stmt in &mut block.stmts {
        rename_stmt(stmt, occ, fresh);
    }
}

fn rename_stmt(stmt: &mut Stmt, occ: &BTreeSet<NodeId>, fresh: &str) {
    let id = stmt.id;
    match &mut stmt.kind {
        StmtKind::VarDecl { name, init, .. } => {
            if occ.contains(&id) {
                *name = fresh.to_string();
            }
            if let Some(e) = init {
                rename_expr(e, occ, fresh);
            }
        }
        StmtKind::Assign(a) => rename_assign(a, occ, fresh),
        StmtKind::ExprStmt(e) => rename_expr(e, occ, fresh),
        StmtKind::If { cond, then_branch, else_branch } => {
            rename_expr(cond, occ, fresh);
            rename_block(then_branch, occ, fresh);
            if let Some(e) = else_branch {
                rename_stmt(e, occ, fresh);
            }
        }
        StmtKind::While { cond, body } => {
            rename_expr(cond, occ, fresh);
            rename_block(body, occ, fresh);
        }
        StmtKind::DoWhile { body, cond } => {
            rename_block(body, occ, fresh);
            rename_expr(cond, occ, fresh);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(s) = init {
                rename_stmt(s, occ, fresh);
            }
            if let Some(e) = cond {
                rename_expr(e, occ, fresh);
            }
            if let Some(a) = update {
                rename_assign(a, occ, fresh);
            }
            rename_block(body, occ, fresh);
        }
        StmtKind::Switch { scrutinee, arms } => {
            rename_expr(scrutinee, occ, fresh);
            for arm in arms {
                for s in &mut arm.stmts {
                    rename_stmt(s, occ, fresh);
                }
            }
        }
        StmtKind::Return(Some(e)) => rename_expr(e, occ, fresh),
        StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(b) => rename_block(b, occ, fresh),
        StmtKind::Try { body, catch, finally } => {
            rename_block(body, occ, fresh);
            if let Some(c) = catch {
                if occ.contains(&c.param.id) {
                    c.param.name = fresh.to_string();
                }
                rename_block(&mut c.body, occ, fresh);
            }
            if let Some(f) = finally {
                rename_block(f, occ, fresh);
            }
        }
    }
}

fn rename_assign(a: &mut AssignStmt, occ: &BTreeSet<NodeId>, fresh: &str) {
    rename_expr(&mut a.target, occ, fresh);
    if let Some(v) = &mut a.value {
        rename_expr(v, occ, fresh);
    }
}

fn rename_expr(expr: &mut Expr, occ: &BTreeSet<NodeId>, fresh: &str) {
    let id = expr.id;
    match &mut expr.kind {
        ExprKind::VarRef(name) => {
            if occ.contains(&id) {
                *name = fresh.to_string();
            }
        }
        ExprKind::Unary { operand, .. } => rename_expr(operand, occ, fresh),
        ExprKind::Binary { lhs, rhs, .. } => {
            rename_expr(lhs, occ, fresh);
            rename_expr(rhs, occ, fresh);
        }
        ExprKind::Call { args, .. } => {
            for a in args {
                rename_expr(a, occ, fresh);
            }
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            rename_expr(cond, occ, fresh);
            rename_expr(then_expr, occ, fresh);
            rename_expr(else_expr, occ, fresh);
        }
        _ => {}
    }
}

// ---- boolean exchange ----

fn apply_boolean_exchange(
    ast: &mut MethodAst,
    table: &SymbolTable,
    binding: BindingId,
) -> Result<(), TransformError> {
    let info = table.binding(binding);
    if info.ty != Some(TypeName::Boolean) {
        return Err(TransformError::IneligibleSite {
            kind: TransformKind::BooleanExchange,
            reason: format!("'{}' is not a boolean local", info.name),
        });
    }
    // Defense-in-depth: reject compound or increment writes.
    let mut bad = false;
    crate::analysis::walk_stmts(&ast.body, &mut |stmt| {
        let check = |a: &AssignStmt| {
            table.resolve(a.target.id) == Some(binding) && a.op != AssignOp::Set
        };
        match &stmt.kind {
            StmtKind::Assign(a) if check(a) => bad = true,
            StmtKind::For { update: Some(a), .. } if check(a) => bad = true,
            _ => {}
        }
    });
    if bad {
        return Err(TransformError::IneligibleSite {
            kind: TransformKind::BooleanExchange,
            reason: format!("'{}' has a compound or increment write", info.name),
        });
    }
    let occ: BTreeSet<NodeId> = table.occurrences(binding).into_iter().collect();
    let decl_node = info.decl_node;
    exchange_block(&mut ast.body, &occ, decl_node, table, binding);
    Ok(())
}

fn exchange_block(
    block: &mut Block,
    occ: &BTreeSet<NodeId>,
    decl: NodeId,
    table: &SymbolTable,
    binding: BindingId,
) {
    for stmt in &mut block.stmts {
        exchange_stmt(stmt, occ, decl, table, binding);
    }
}

fn exchange_stmt(
    stmt: &mut Stmt,
    occ: &BTreeSet<NodeId>,
    decl: NodeId,
    table: &SymbolTable,
    binding: BindingId,
) {
    let id = stmt.id;
    match &mut stmt.kind {
        StmtKind::VarDecl { init, .. } => {
            if let Some(e) = init {
                wrap_reads(e, occ);
                if id == decl {
                    negate_in_place(e);
                }
            }
        }
        StmtKind::Assign(a) => exchange_assign(a, occ, table, binding),
        StmtKind::ExprStmt(e) => wrap_reads(e, occ),
        StmtKind::If { cond, then_branch, else_branch } => {
            wrap_reads(cond, occ);
            exchange_block(then_branch, occ, decl, table, binding);
            if let Some(e) = else_branch {
                exchange_stmt(e, occ, decl, table, binding);
            }
        }
        StmtKind::While { cond, body } => {
            wrap_reads(cond, occ);
            exchange_block(body, occ, decl, table, binding);
        }
        StmtKind::DoWhile { body, cond } => {
            exchange_block(body, occ, decl, table, binding);
            wrap_reads(cond, occ);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(s) = init {
                exchange_stmt(s, occ, decl, table, binding);
            }
            if let Some(e) = cond {
                wrap_reads(e, occ);
            }
            if let Some(a) = update {
                exchange_assign(a, occ, table, binding);
            }
            exchange_block(body, occ, decl, table, binding);
        }
        StmtKind::Switch { scrutinee, arms } => {
            wrap_reads(scrutinee, occ);
            for arm in arms {
                for s in &mut arm.stmts {
                    exchange_stmt(s, occ, decl, table, binding);
                }
            }
        }
        StmtKind::Return(Some(e)) => wrap_reads(e, occ),
        StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(b) => exchange_block(b, occ, decl, table, binding),
        StmtKind::Try { body, catch, finally } => {
            exchange_block(body, occ, decl, table, binding);
            if let Some(c) = catch {
                exchange_block(&mut c.body, occ, decl, table, binding);
            }
            if let Some(f) = finally {
                exchange_block(f, occ, decl, table, binding);
            }
        }
    }
}

fn exchange_assign(a: &mut AssignStmt, occ: &BTreeSet<NodeId>, table: &SymbolTable, binding: BindingId) {
    // The write target itself is never wrapped.
    let is_exchanged_target = table.resolve(a.target.id) == Some(binding);
    if let Some(v) = &mut a.value {
        wrap_reads(v, occ);
        if is_exchanged_target {
            negate_in_place(v);
        }
    }
}

/// Wraps every read of the exchanged binding in a negation; a read already
/// under a negation loses it instead (double negation collapses).
fn wrap_reads(expr: &mut Expr, occ: &BTreeSet<NodeId>) {
    if let ExprKind::Unary { op: UnaryOp::Not, operand } = &expr.kind {
        if matches!(operand.kind, ExprKind::VarRef(_)) && occ.contains(&operand.id) {
            let inner = match std::mem::replace(&mut expr.kind, ExprKind::Null) {
                ExprKind::Unary { operand, .. } => *operand,
                _ => unreachable!(),
            };
            *expr = inner;
            return;
        }
    }
    if matches!(expr.kind, ExprKind::VarRef(_)) && occ.contains(&expr.id) {
        let inner = std::mem::replace(expr, Expr::new(ExprKind::Null));
        *expr = Expr::not(inner);
        return;
    }
    match &mut expr.kind {
        ExprKind::Unary { operand, .. } => wrap_reads(operand, occ),
        ExprKind::Binary { lhs, rhs, .. } => {
            wrap_reads(lhs, occ);
            wrap_reads(rhs, occ);
        }
        ExprKind::Call { args, .. } => {
            for a in args {
                wrap_reads(a, occ);
            }
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            wrap_reads(cond, occ);
            wrap_reads(then_expr, occ);
            wrap_reads(else_expr, occ);
        }
        _ => {}
    }
}

/// Logical negation of a whole expression: `!e`, with `!!e -> e` and
/// literal booleans flipped directly.
fn negate_in_place(expr: &mut Expr) {
    match &mut expr.kind {
        ExprKind::BoolLit(v) => *v = !*v,
        ExprKind::Unary { op: UnaryOp::Not, .. } => {
            let inner = match std::mem::replace(&mut expr.kind, ExprKind::Null) {
                ExprKind::Unary { operand, .. } => *operand,
                _ => unreachable!(),
            };
            *expr = inner;
        }
        _ => {
            let inner = std::mem::replace(expr, Expr::new(ExprKind::Null));
            *expr = Expr::not(inner);
        }
    }
}

// ---- loop exchange ----

fn apply_loop_exchange(ast: &mut MethodAst, site: &Site) -> Result<(), TransformError> {
    let SitePayload::Loop(form) = &site.payload else {
        return Err(TransformError::IneligibleSite {
            kind: TransformKind::LoopExchange,
            reason: "payload is not a loop".into(),
        });
    };
    let mut applied = false;
    rewrite_stmt_by_id(&mut ast.body, site.anchor, &mut |stmt| {
        applied = true;
        match (*form, stmt.kind) {
            (LoopForm::ForToWhile, StmtKind::For { init, cond, update, body }) => {
                let cond = cond.unwrap_or_else(|| Expr::new(ExprKind::BoolLit(true)));
                let mut while_body = body;
                if let Some(u) = update {
                    while_body.stmts.push(Stmt::new(StmtKind::Assign(u)));
                }
                let while_stmt = Stmt::new(StmtKind::While { cond, body: while_body });
                let mut stmts = Vec::new();
                if let Some(i) = init {
                    stmts.push(*i);
                }
                stmts.push(while_stmt);
                // The wrapping block contains the hoisted init's scope.
                Stmt::new(StmtKind::Block(Block::new(stmts)))
            }
            (LoopForm::WhileToFor, StmtKind::While { cond, body }) => {
                Stmt::new(StmtKind::For { init: None, cond: Some(cond), update: None, body })
            }
            (_, kind) => Stmt { id: site.anchor, kind },
        }
    });
    if applied {
        Ok(())
    } else {
        Err(TransformError::IneligibleSite {
            kind: TransformKind::LoopExchange,
            reason: format!("no loop at node {}", site.anchor),
        })
    }
}

// ---- switch to if ----

fn apply_switch_to_if(
    ast: &mut MethodAst,
    table: &SymbolTable,
    site: &Site,
    temp_name: &str,
) -> Result<(), TransformError> {
    let mut result: Result<(), TransformError> = Err(TransformError::IneligibleSite {
        kind: TransformKind::SwitchToIf,
        reason: format!("no switch at node {}", site.anchor),
    });
    rewrite_stmt_by_id(&mut ast.body, site.anchor, &mut |stmt| {
        let anchor = stmt.id;
        match stmt.kind {
            StmtKind::Switch { scrutinee, arms } => {
                match build_if_chain(scrutinee, arms, table, temp_name) {
                    Ok(block) => {
                        result = Ok(());
                        Stmt::new(StmtKind::Block(block))
                    }
                    Err(e) => {
                        result = Err(e);
                        // Rebuild a placeholder; the caller discards on error.
                        Stmt { id: anchor, kind: StmtKind::Block(Block::new(Vec::new())) }
                    }
                }
            }
            kind => Stmt { id: anchor, kind },
        }
    });
    result
}

fn build_if_chain(
    scrutinee: Expr,
    arms: Vec<CaseArm>,
    table: &SymbolTable,
    temp_name: &str,
) -> Result<Block, TransformError> {
    let ineligible = |reason: &str| TransformError::IneligibleSite {
        kind: TransformKind::SwitchToIf,
        reason: reason.into(),
    };
    let any_string = arms.iter().any(|a| matches!(a.label, CaseLabel::Str(_)));
    let label_ty = if any_string { TypeName::Str } else { TypeName::Int };
    // Prefer the scrutinee's static type so widened scrutinees keep their
    // width; fall back to the label type for calls.
    let temp_ty = infer_static_type(&scrutinee, table).unwrap_or(label_ty);

    // Group consecutive empty arms with the next non-empty body.
    struct Group {
        labels: Vec<CaseLabel>,
        stmts: Vec<Stmt>,
        has_default: bool,
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut pending: Vec<CaseLabel> = Vec::new();
    for arm in arms {
        let is_default = arm.label == CaseLabel::Default;
        pending.push(arm.label);
        if arm.stmts.is_empty() {
            continue;
        }
        match arm.stmts.last().map(|s| &s.kind) {
            Some(StmtKind::Break) | Some(StmtKind::Return(_)) => {}
            _ => return Err(ineligible("a non-empty case does not end in break or return")),
        }
        let mut stmts = arm.stmts;
        if matches!(stmts.last().map(|s| &s.kind), Some(StmtKind::Break)) {
            stmts.pop();
        }
        let has_default = pending.contains(&CaseLabel::Default) || is_default;
        groups.push(Group { labels: std::mem::take(&mut pending), stmts, has_default });
    }
    // Trailing empty labels fall out of the switch doing nothing, unless
    // one of them is the default (which then does nothing either).
    pending.clear();

    let temp_decl = Stmt::new(StmtKind::VarDecl {
        ty: temp_ty,
        name: temp_name.to_string(),
        init: Some(scrutinee),
    });

    let default_group = groups.iter().position(|g| g.has_default);
    let mut else_branch: Option<Box<Stmt>> = default_group
        .map(|i| Box::new(Stmt::new(StmtKind::Block(Block::new(groups[i].stmts.clone())))));

    // Build the chain from the last conditional group backwards.
    let conditional: Vec<&Group> =
        groups.iter().enumerate().filter(|(i, _)| Some(*i) != default_group).map(|(_, g)| g).collect();
    for group in conditional.iter().rev() {
        let cond = labels_condition(&group.labels, temp_name)
            .ok_or_else(|| ineligible("case group has no literal labels"))?;
        let if_stmt = Stmt::new(StmtKind::If {
            cond,
            then_branch: Block::new(group.stmts.clone()),
            else_branch,
        });
        else_branch = Some(Box::new(if_stmt));
    }

    let mut stmts = vec![temp_decl];
    match else_branch {
        Some(stmt) => match stmt.kind {
            // The chain head is an if; a bare default-only switch becomes
            // just its body.
            StmtKind::If { .. } => stmts.push(*stmt),
            StmtKind::Block(b) => stmts.extend(b.stmts),
            _ => unreachable!(),
        },
        None => {}
    }
    Ok(Block::new(stmts))
}

fn labels_condition(labels: &[CaseLabel], temp_name: &str) -> Option<Expr> {
    let mut tests: Vec<Expr> = Vec::new();
    for label in labels {
        let lit = match label {
            // Negative labels become a negation node; bare negative
            // literals would not survive a parse round-trip.
            CaseLabel::Int(v) if *v < 0 => Expr::new(ExprKind::Unary {
                op: UnaryOp::Neg,
                operand: Box::new(Expr::int(-*v)),
            }),
            CaseLabel::Int(v) => Expr::int(*v),
            CaseLabel::Str(s) => Expr::new(ExprKind::StringLit(s.clone())),
            CaseLabel::Default => continue,
        };
        tests.push(Expr::new(ExprKind::Binary {
            op: BinaryOp::Eq,
            lhs: Box::new(Expr::var(temp_name)),
            rhs: Box::new(lit),
        }));
    }
    tests.into_iter().reduce(|acc, t| {
        Expr::new(ExprKind::Binary { op: BinaryOp::Or, lhs: Box::new(acc), rhs: Box::new(t) })
    })
}

/// Static type of an expression where derivable without call signatures.
fn infer_static_type(expr: &Expr, table: &SymbolTable) -> Option<TypeName> {
    match &expr.kind {
        ExprKind::IntLit(_) => Some(TypeName::Int),
        ExprKind::LongLit(_) => Some(TypeName::Long),
        ExprKind::DoubleLit(_) => Some(TypeName::Double),
        ExprKind::BoolLit(_) => Some(TypeName::Boolean),
        ExprKind::StringLit(_) => Some(TypeName::Str),
        ExprKind::Null => Some(TypeName::Str),
        ExprKind::VarRef(_) => table.resolve(expr.id).and_then(|b| table.binding(b).ty),
        ExprKind::Unary { op: UnaryOp::Not, .. } => Some(TypeName::Boolean),
        ExprKind::Unary { op: UnaryOp::Neg, operand } => infer_static_type(operand, table),
        ExprKind::Binary { op, lhs, rhs } => match op {
            BinaryOp::And
            | BinaryOp::Or
            | BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => Some(TypeName::Boolean),
            _ => {
                let l = infer_static_type(lhs, table)?;
                let r = infer_static_type(rhs, table)?;
                promote_static(l, r)
            }
        },
        ExprKind::Call { .. } => None,
        ExprKind::Ternary { then_expr, else_expr, .. } => infer_static_type(then_expr, table)
            .or_else(|| infer_static_type(else_expr, table)),
    }
}

fn promote_static(l: TypeName, r: TypeName) -> Option<TypeName> {
    use TypeName::*;
    Some(match (l, r) {
        (Str, _) | (_, Str) => Str,
        (Double, _) | (_, Double) => Double,
        (Long, _) | (_, Long) => Long,
        (Int, Int) => Int,
        _ => return None,
    })
}

// ---- permute ----

fn apply_permute(ast: &mut MethodAst, table: &SymbolTable, site: &Site) -> Result<(), TransformError> {
    let SitePayload::StmtPair { block, index, .. } = &site.payload else {
        return Err(TransformError::IneligibleSite {
            kind: TransformKind::PermuteStatement,
            reason: "payload is not a statement pair".into(),
        });
    };
    let mut outcome: Result<(), TransformError> = Err(TransformError::IneligibleSite {
        kind: TransformKind::PermuteStatement,
        reason: format!("no block at node {block}"),
    });
    let index = *index;
    with_block_by_id(&mut ast.body, *block, &mut |b| {
        if index + 1 >= b.stmts.len() {
            outcome = Err(TransformError::IneligibleSite {
                kind: TransformKind::PermuteStatement,
                reason: "pair index out of range".into(),
            });
            return;
        }
        // Defense-in-depth: re-check independence before swapping.
        if !independent(&b.stmts[index], &b.stmts[index + 1], table) {
            outcome = Err(TransformError::IneligibleSite {
                kind: TransformKind::PermuteStatement,
                reason: "statements are not independent".into(),
            });
            return;
        }
        b.stmts.swap(index, index + 1);
        outcome = Ok(());
    });
    outcome
}

// ---- unused statement ----

fn apply_insert_unused(
    ast: &mut MethodAst,
    site: &Site,
    fresh_name: &str,
    rng: &mut ChaCha8Rng,
) -> Result<(), TransformError> {
    if site.payload != SitePayload::Block {
        return Err(TransformError::IneligibleSite {
            kind: TransformKind::UnusedStatement,
            reason: "payload is not a block".into(),
        });
    }
    let mut applied = false;
    let position_value = {
        // Draw both choices up front so rng use is independent of tree shape.
        let pos_draw: u64 = rng.random();
        let value: i64 = rng.random_range(0..=9);
        (pos_draw, value)
    };
    with_block_by_id(&mut ast.body, site.anchor, &mut |b| {
        let position = (position_value.0 % (b.stmts.len() as u64 + 1)) as usize;
        let decl = Stmt::new(StmtKind::VarDecl {
            ty: TypeName::Int,
            name: fresh_name.to_string(),
            init: Some(Expr::int(position_value.1)),
        });
        b.stmts.insert(position, decl);
        applied = true;
    });
    if applied {
        Ok(())
    } else {
        Err(TransformError::IneligibleSite {
            kind: TransformKind::UnusedStatement,
            reason: format!("no block at node {}", site.anchor),
        })
    }
}

// ---- mutable tree walkers ----

/// Replaces the statement whose id is `target` using `f`; at most one
/// statement is rewritten per call.
fn rewrite_stmt_by_id(block: &mut Block, target: NodeId, f: &mut impl FnMut(Stmt) -> Stmt) -> bool {
    for stmt in &mut block.stmts {
        if stmt.id == target {
            let taken = std::mem::replace(stmt, Stmt { id: UNNUMBERED, kind: StmtKind::Break });
            *stmt = f(taken);
            return true;
        }
        if rewrite_in_children(stmt, target, f) {
            return true;
        }
    }
    false
}

fn rewrite_in_children(stmt: &mut Stmt, target: NodeId, f: &mut impl FnMut(Stmt) -> Stmt) -> bool {
    match &mut stmt.kind {
        StmtKind::If { then_branch, else_branch, .. } => {
            if rewrite_stmt_by_id(then_branch, target, f) {
                return true;
            }
            if let Some(e) = else_branch {
                if e.id == target {
                    let taken =
                        std::mem::replace(e.as_mut(), Stmt { id: UNNUMBERED, kind: StmtKind::Break });
                    **e = f(taken);
                    return true;
                }
                return rewrite_in_children(e, target, f);
            }
            false
        }
        StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => {
            rewrite_stmt_by_id(body, target, f)
        }
        StmtKind::For { body, .. } => rewrite_stmt_by_id(body, target, f),
        StmtKind::Switch { arms, .. } => {
            for arm in arms {
                for s in &mut arm.stmts {
                    if s.id == target {
                        let taken =
                            std::mem::replace(s, Stmt { id: UNNUMBERED, kind: StmtKind::Break });
                        *s = f(taken);
                        return true;
                    }
                    if rewrite_in_children(s, target, f) {
                        return true;
                    }
                }
            }
            false
        }
        StmtKind::Block(b) => rewrite_stmt_by_id(b, target, f),
        StmtKind::Try { body, catch, finally } => {
            if rewrite_stmt_by_id(body, target, f) {
                return true;
            }
            if let Some(c) = catch {
                if rewrite_stmt_by_id(&mut c.body, target, f) {
                    return true;
                }
            }
            if let Some(fin) = finally {
                return rewrite_stmt_by_id(fin, target, f);
            }
            false
        }
        _ => false,
    }
}

/// Runs `f` on the block whose id is `target`, if present.
fn with_block_by_id(root: &mut Block, target: NodeId, f: &mut impl FnMut(&mut Block)) -> bool {
    if root.id == target {
        f(root);
        return true;
    }
    for stmt in &mut root.stmts {
        if with_block_in_stmt(stmt, target, f) {
            return true;
        }
    }
    false
}

fn with_block_in_stmt(stmt: &mut Stmt, target: NodeId, f: &mut impl FnMut(&mut Block)) -> bool {
    match &mut stmt.kind {
        StmtKind::If { then_branch, else_branch, .. } => {
            if with_block_by_id(then_branch, target, f) {
                return true;
            }
            if let Some(e) = else_branch {
                return with_block_in_stmt(e, target, f);
            }
            false
        }
        StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => {
            with_block_by_id(body, target, f)
        }
        StmtKind::For { body, .. } => with_block_by_id(body, target, f),
        StmtKind::Switch { arms, .. } => {
            for arm in arms {
                for s in &mut arm.stmts {
                    if with_block_in_stmt(s, target, f) {
                        return true;
                    }
                }
            }
            false
        }
        StmtKind::Block(b) => with_block_by_id(b, target, f),
        StmtKind::Try { body, catch, finally } => {
            if with_block_by_id(body, target, f) {
                return true;
            }
            if let Some(c) = catch {
                if with_block_by_id(&mut c.body, target, f) {
                    return true;
                }
            }
            if let Some(fin) = finally {
                return with_block_by_id(fin, target, f);
            }
            false
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::resolve_scopes;
    use crate::interp::{check_equivalence, EquivalenceStatus};
    use crate::syntax::parser::parse_method;

    fn prepared(src: &str) -> (MethodAst, SymbolTable) {
        let m = parse_method(src).unwrap();
        let t = resolve_scopes(&m).unwrap();
        (m, t)
    }

    fn assert_equivalent(original: &MethodAst, variant: &MethodAst) {
        let v = check_equivalence(original, variant, 30, 1234);
        match &v.status {
            EquivalenceStatus::Equivalent => {}
            other => panic!(
                "variant diverged: {other:?}\noriginal:\n{}\nvariant:\n{}",
                print_method(original),
                print_method(variant)
            ),
        }
    }

    fn sites_of(m: &MethodAst, t: &SymbolTable, kind: TransformKind) -> Vec<Site> {
        enumerate_sites(m, t, kind)
    }

    #[test]
    fn rename_rewrites_every_occurrence() {
        let (m, t) = prepared("int f(){int count = 0; return count;}");
        let sites = sites_of(&m, &t, TransformKind::VariableRenaming);
        let out = rename_variable(&m, &t, &sites[0], "var0").unwrap();
        assert_eq!(print_method(&out), "int f() {\n    int var0 = 0;\n    return var0;\n}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn rename_collision_is_rejected() {
        let (m, t) = prepared("int f(){int a = 0; int var0 = 1; return a + var0;}");
        let sites = sites_of(&m, &t, TransformKind::VariableRenaming);
        assert!(matches!(
            rename_variable(&m, &t, &sites[0], "var0"),
            Err(TransformError::NameCollision { .. })
        ));
    }

    #[test]
    fn rename_respects_shadowing() {
        let (m, t) = prepared(
            "int f(){int x = 1; {int x = 2; log(x);} return x;}",
        );
        let sites = sites_of(&m, &t, TransformKind::VariableRenaming);
        // First site is the outer x.
        let out = rename_variable(&m, &t, &sites[0], "var0").unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("int var0 = 1;"), "{printed}");
        assert!(printed.contains("log(x)"), "inner shadow must stay: {printed}");
        assert!(printed.contains("return var0;"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn boolean_exchange_flips_literal_and_wraps_reads() {
        let (m, t) = prepared("int f(int a){boolean flag = true; if (flag) {return a;} return 0;}");
        let sites = sites_of(&m, &t, TransformKind::BooleanExchange);
        let out = boolean_exchange(&m, &t, &sites[0]).unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("boolean flag = false;"), "{printed}");
        assert!(printed.contains("if (!flag)"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn boolean_exchange_negates_computed_initializer() {
        let (m, t) = prepared("boolean f(int x){boolean b = x > 0; return b;}");
        let sites = sites_of(&m, &t, TransformKind::BooleanExchange);
        let out = boolean_exchange(&m, &t, &sites[0]).unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("boolean b = !(x > 0);"), "{printed}");
        assert!(printed.contains("return !b;"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn boolean_exchange_collapses_double_negation() {
        let (m, t) = prepared("int f(int x){boolean flag = x > 0; if (!flag) {return 0;} return 1;}");
        let sites = sites_of(&m, &t, TransformKind::BooleanExchange);
        let out = boolean_exchange(&m, &t, &sites[0]).unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("if (flag)"), "double negation must collapse: {printed}");
        assert!(!printed.contains("!!"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn boolean_exchange_handles_self_reference_and_assignments() {
        let (m, t) = prepared(
            "int f(int x){boolean b = x > 0; b = b || x < -5; if (b) {return 1;} return 0;}",
        );
        let sites = sites_of(&m, &t, TransformKind::BooleanExchange);
        let out = boolean_exchange(&m, &t, &sites[0]).unwrap();
        assert_equivalent(&m, &out);
    }

    #[test]
    fn for_to_while_preserves_sum() {
        let (m, t) = prepared("int f(){int s = 0; for (int i = 0; i < 10; i++) {s += i;} return s;}");
        let sites = sites_of(&m, &t, TransformKind::LoopExchange);
        let out = loop_exchange(&m, &sites[0]).unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("while (i < 10)"), "{printed}");
        assert!(printed.contains("i++;"), "update must move into the body: {printed}");
        assert_equivalent(&m, &out);
        let outcome =
            crate::interp::evaluate(&out, &[], crate::interp::DEFAULT_FUEL).unwrap();
        assert_eq!(
            outcome.result,
            crate::interp::OutcomeResult::Returned(crate::interp::Value::Int(45))
        );
    }

    #[test]
    fn while_to_for_rewrites_header() {
        let (m, t) = prepared("int f(){int x = 9; while (x > 0) {x--;} return x;}");
        let sites = sites_of(&m, &t, TransformKind::LoopExchange);
        let out = loop_exchange(&m, &sites[0]).unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("for (; x > 0;)"), "{printed}");
        assert_equivalent(&m, &out);

        // A parameter-bound loop may hit the fuel limit at integer
        // boundaries; that must surface as NotCheckable, never Divergent.
        let (mp, tp) = prepared("int f(int x){while (x > 0) {x--;} return x;}");
        let sp = sites_of(&mp, &tp, TransformKind::LoopExchange);
        let outp = loop_exchange(&mp, &sp[0]).unwrap();
        let v = check_equivalence(&mp, &outp, 30, 1234);
        assert!(!v.is_divergent(), "{v:?}");
    }

    #[test]
    fn empty_for_condition_becomes_while_true() {
        let (m, t) = prepared("void f(){for (;;) {break;}}");
        let sites = sites_of(&m, &t, TransformKind::LoopExchange);
        let out = loop_exchange(&m, &sites[0]).unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("while (true)"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn break_behavior_is_unchanged() {
        let (m, t) = prepared(
            "int f(){int s = 0; for (int i = 0; i < 100; i++) {if (i == 3) {break;} s += i;} return s;}",
        );
        let sites = sites_of(&m, &t, TransformKind::LoopExchange);
        let out = loop_exchange(&m, &sites[0]).unwrap();
        assert_equivalent(&m, &out);
    }

    #[test]
    fn switch_to_if_basic() {
        let (m, t) = prepared(
            r#"String f(int x){switch (x) {case 1: return "a"; default: return "b";}}"#,
        );
        let sites = sites_of(&m, &t, TransformKind::SwitchToIf);
        let out = switch_to_if(&m, &t, &sites[0], "tmp0").unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("int tmp0 = x;"), "{printed}");
        assert!(printed.contains("if (tmp0 == 1)"), "{printed}");
        assert!(printed.contains("else"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn switch_without_default_has_no_else() {
        let (m, t) = prepared(
            "int f(int x){int r = 0; switch (x) {case 1: r = 10; break; case 2: r = 20; break;} return r;}",
        );
        let sites = sites_of(&m, &t, TransformKind::SwitchToIf);
        let out = switch_to_if(&m, &t, &sites[0], "tmp0").unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("} else if (tmp0 == 2) {"), "{printed}");
        assert!(!printed.contains("} else {"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn switch_groups_empty_cases() {
        let (m, t) = prepared(
            "int f(int x){int r = 0; switch (x) {case 1: case 2: r = 12; break; default: r = 99; break;} return r;}",
        );
        let sites = sites_of(&m, &t, TransformKind::SwitchToIf);
        let out = switch_to_if(&m, &t, &sites[0], "tmp0").unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("tmp0 == 1 || tmp0 == 2"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn string_switch_converts_with_string_equality() {
        let (m, t) = prepared(
            r#"int f(String s){switch (s) {case "a": return 1; case "": return 2; default: return 0;}}"#,
        );
        let sites = sites_of(&m, &t, TransformKind::SwitchToIf);
        let out = switch_to_if(&m, &t, &sites[0], "tmp0").unwrap();
        let printed = print_method(&out);
        assert!(printed.contains("String tmp0 = s;"), "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn permute_swaps_pair() {
        let (m, t) = prepared("int f(){int a = 1; int b = 2; return a + b;}");
        let sites = sites_of(&m, &t, TransformKind::PermuteStatement);
        assert_eq!(sites.len(), 1);
        let out = permute_statements(&m, &t, &sites[0]).unwrap();
        let printed = print_method(&out);
        let pos_b = printed.find("int b = 2;").unwrap();
        let pos_a = printed.find("int a = 1;").unwrap();
        assert!(pos_b < pos_a, "{printed}");
        assert_equivalent(&m, &out);
    }

    #[test]
    fn permute_rejects_dependent_pair() {
        let (m, t) = prepared("int f(){int a = 1; int b = a; return b;}");
        let fake = Site {
            kind: TransformKind::PermuteStatement,
            anchor: m.body.stmts[0].id,
            payload: SitePayload::StmtPair {
                block: m.body.id,
                index: 0,
                first: m.body.stmts[0].id,
                second: m.body.stmts[1].id,
            },
        };
        assert!(matches!(
            permute_statements(&m, &t, &fake),
            Err(TransformError::IneligibleSite { .. })
        ));
    }

    #[test]
    fn unused_insertion_into_empty_block() {
        let (m, t) = prepared("void f(){}");
        let sites = sites_of(&m, &t, TransformKind::UnusedStatement);
        assert_eq!(sites.len(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let out = insert_unused_statement(&m, &sites[0], "unused0", &mut rng).unwrap();
        assert_eq!(out.body.stmts.len(), 1);
        assert!(print_method(&out).contains("int unused0 = "));
        assert_equivalent(&m, &out);
    }

    #[test]
    fn unused_insertion_position_is_seed_stable() {
        let (m, t) = prepared("void f(int a){log(a); log(a); log(a);}");
        let sites = sites_of(&m, &t, TransformKind::UnusedStatement);
        let mk = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            print_method(&insert_unused_statement(&m, &sites[0], "unused0", &mut rng).unwrap())
        };
        assert_eq!(mk(3), mk(3));
        assert_eq!(
            crate::analysis::count_statements(
                &insert_unused_statement(&m, &sites[0], "unused0", &mut ChaCha8Rng::seed_from_u64(3))
                    .unwrap()
            ),
            crate::analysis::count_statements(&m) + 1
        );
    }

    #[test]
    fn single_place_yields_one_variant_per_site() {
        let (m, t) = prepared("int f(int a){int b = a; int c = b + 1; return c;}");
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        let (variants, skipped) = single_place(&ctx, TransformKind::VariableRenaming, 7);
        assert!(skipped.is_empty());
        assert_eq!(variants.len(), 3);
        // Every single-place rename uses var0.
        for v in &variants {
            assert!(v.source.contains("var0"), "{}", v.source);
            assert_eq!(v.applied_sites.len(), 1);
            assert_equivalent(&m, &v.ast);
        }
        // Distinct sites give distinct ids and sources.
        let ids: BTreeSet<_> = variants.iter().map(|v| v.variant_id.clone()).collect();
        assert_eq!(ids.len(), 3);
    }

    #[test]
    fn all_place_renames_in_site_order() {
        let (m, t) = prepared("int f(int a){int b = a; int c = b + 1; return c;}");
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        let v = all_place(&ctx, TransformKind::VariableRenaming, 7).unwrap().unwrap();
        assert_eq!(
            print_method(&v.ast),
            "int f(int var0) {\n    int var1 = var0;\n    int var2 = var1 + 1;\n    return var2;\n}"
        );
        assert_equivalent(&m, &v.ast);
    }

    #[test]
    fn all_place_with_no_sites_is_absent() {
        let (m, t) = prepared("int f(int a){return a;}");
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        assert!(all_place(&ctx, TransformKind::SwitchToIf, 7).unwrap().is_none());
    }

    #[test]
    fn all_place_rejects_permute_and_unused() {
        let (m, t) = prepared("int f(int a){return a;}");
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        for kind in [TransformKind::PermuteStatement, TransformKind::UnusedStatement] {
            assert!(matches!(
                all_place(&ctx, kind, 7),
                Err(TransformError::ModeUnsupported { .. })
            ));
            assert!(matches!(
                x_percent(&ctx, kind, 50, 7),
                Err(TransformError::ModeUnsupported { .. })
            ));
        }
    }

    #[test]
    fn x_percent_applies_floor_of_fraction() {
        // Four renaming sites: a, b, c, d.
        let (m, t) = prepared("int f(int a){int b = a; int c = b; int d = c; return d;}");
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        for (x, expected) in [(25u8, 1usize), (50, 2), (75, 3)] {
            let v = x_percent(&ctx, TransformKind::VariableRenaming, x, 9).unwrap().unwrap();
            assert_eq!(v.applied_sites.len(), expected, "X={x}");
            assert_equivalent(&m, &v.ast);
        }
        // Three sites at 25% floor to zero.
        let (m3, t3) = prepared("int f(int a){int b = a; int c = b; return c;}");
        let ctx3 = TransformCtx { method_id: "m3", ast: &m3, table: &t3 };
        assert!(x_percent(&ctx3, TransformKind::VariableRenaming, 25, 9).unwrap().is_none());
    }

    #[test]
    fn x_percent_selection_depends_only_on_inputs() {
        let (m, t) = prepared("int f(int a){int b = a; int c = b; int d = c; return d;}");
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        let v1 = x_percent(&ctx, TransformKind::VariableRenaming, 50, 11).unwrap().unwrap();
        let v2 = x_percent(&ctx, TransformKind::VariableRenaming, 50, 11).unwrap().unwrap();
        assert_eq!(v1.source, v2.source);
        assert_eq!(v1.variant_id, v2.variant_id);
        let v3 = x_percent(&ctx, TransformKind::VariableRenaming, 50, 12).unwrap().unwrap();
        assert_ne!(v1.variant_id, v3.variant_id);
    }

    #[test]
    fn variants_round_trip_through_the_printer() {
        let (m, t) = prepared(
            "int f(int a){int s = 0; boolean go = a > 0; for (int i = 0; i < 5; i++) {s += i;} if (go) {return s;} return -s;}",
        );
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        for kind in TransformKind::ALL {
            let (variants, skipped) = single_place(&ctx, kind, 3);
            assert!(skipped.is_empty(), "{skipped:?}");
            for v in variants {
                let reparsed = parse_method(&v.source).unwrap();
                assert_eq!(reparsed, v.ast, "round-trip mismatch for {kind}");
                assert_equivalent(&m, &v.ast);
            }
        }
    }

    #[test]
    fn renaming_preserves_node_kind_sequence() {
        let (m, t) = prepared("int f(int a){int b = a + 2; return b * a;}");
        let ctx = TransformCtx { method_id: "m0", ast: &m, table: &t };
        let (variants, _) = single_place(&ctx, TransformKind::VariableRenaming, 3);
        for v in variants {
            assert_eq!(crate::syntax::ast::node_count(&m), crate::syntax::ast::node_count(&v.ast));
            assert_eq!(kind_sequence(&m), kind_sequence(&v.ast));
        }
    }

    fn kind_sequence(m: &MethodAst) -> Vec<String> {
        let mut out = Vec::new();
        crate::analysis::walk_stmts(&m.body, &mut |s| {
            out.push(stmt_kind_tag(s).to_string());
        });
        out
    }

    fn stmt_kind_tag(s: &Stmt) -> &'static str {
        match &s.kind {
            StmtKind::VarDecl { .. } => "decl",
            StmtKind::Assign(_) => "assign",
            StmtKind::ExprStmt(_) => "expr",
            StmtKind::If { .. } => "if",
            StmtKind::While { .. } => "while",
            StmtKind::DoWhile { .. } => "dowhile",
            StmtKind::For { .. } => "for",
            StmtKind::Switch { .. } => "switch",
            StmtKind::Return(_) => "return",
            StmtKind::Break => "break",
            StmtKind::Continue => "continue",
            StmtKind::Block(_) => "block",
            StmtKind::Try { .. } => "try",
        }
    }
}
