//! Name resolution, read/write-set computation, statement independence,
//! and transformation-site enumeration.
//!
//! Scoping is block-structured with innermost-first shadowing; a local is
//! visible from its declaration to the end of its block. Identifiers that
//! resolve to no declaration (fields, externals) become `Free` bindings so
//! the independence formula covers them uniformly; methods with free
//! variables are flagged.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::ast::*;

/// Index into [`SymbolTable::bindings`].
pub type BindingId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingOrigin {
    Param,
    Local,
    CatchParam,
    /// Unresolved name (field or external); never a transformation target.
    Free,
}

#[derive(Debug, Clone)]
pub struct BindingInfo {
    pub id: BindingId,
    /// Declaring node (param, var-decl statement, or catch param); for free
    /// bindings, the first referencing node.
    pub decl_node: NodeId,
    pub name: String,
    /// Declared type; `None` for catch params and free names.
    pub ty: Option<TypeName>,
    pub origin: BindingOrigin,
}

#[derive(Debug, Clone)]
pub struct SymbolTable {
    bindings: Vec<BindingInfo>,
    /// Occurrence node id (VarRef or declaring node) -> binding.
    resolutions: HashMap<NodeId, BindingId>,
}

impl SymbolTable {
    pub fn bindings(&self) -> &[BindingInfo] {
        &self.bindings
    }

    pub fn binding(&self, id: BindingId) -> &BindingInfo {
        &self.bindings[id as usize]
    }

    pub fn resolve(&self, node: NodeId) -> Option<BindingId> {
        self.resolutions.get(&node).copied()
    }

    /// Every occurrence node of a binding, declaration site included,
    /// in ascending node-id order.
    pub fn occurrences(&self, id: BindingId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> =
            self.resolutions.iter().filter(|(_, b)| **b == id).map(|(n, _)| *n).collect();
        out.sort_unstable();
        out
    }

    pub fn free_names(&self) -> BTreeSet<&str> {
        self.bindings
            .iter()
            .filter(|b| b.origin == BindingOrigin::Free)
            .map(|b| b.name.as_str())
            .collect()
    }

    pub fn has_free_vars(&self) -> bool {
        self.bindings.iter().any(|b| b.origin == BindingOrigin::Free)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error("duplicate declaration of '{name}' (node {node})")]
    DuplicateDeclaration { name: String, node: NodeId },
}

/// Builds the binding map for a method; shadowing resolves innermost-first.
pub fn resolve_scopes(method: &MethodAst) -> Result<SymbolTable, AnalysisError> {
    let mut r = Resolver {
        table: SymbolTable { bindings: Vec::new(), resolutions: HashMap::new() },
        scopes: Vec::new(),
        free: BTreeMap::new(),
    };
    r.push_scope();
    for p in &method.params {
        r.declare(p.id, &p.name, Some(p.ty), BindingOrigin::Param)?;
    }
    r.visit_block(&method.body)?;
    r.pop_scope();
    Ok(r.table)
}

struct Resolver {
    table: SymbolTable,
    scopes: Vec<HashMap<String, BindingId>>,
    free: BTreeMap<String, BindingId>,
}

impl Resolver {
    fn push_scope(&mut self) {
        self.scopes.push(HashMap::new());
    }

    fn pop_scope(&mut self) {
        self.scopes.pop();
    }

    fn declare(
        &mut self,
        node: NodeId,
        name: &str,
        ty: Option<TypeName>,
        origin: BindingOrigin,
    ) -> Result<BindingId, AnalysisError> {
        let scope = self.scopes.last_mut().expect("scope stack");
        if scope.contains_key(name) {
            return Err(AnalysisError::DuplicateDeclaration { name: name.to_string(), node });
        }
        let id = self.table.bindings.len() as BindingId;
        self.table.bindings.push(BindingInfo {
            id,
            decl_node: node,
            name: name.to_string(),
            ty,
            origin,
        });
        scope.insert(name.to_string(), id);
        self.table.resolutions.insert(node, id);
        Ok(id)
    }

    fn reference(&mut self, node: NodeId, name: &str) {
        for scope in self.scopes.iter().rev() {
            if let Some(&id) = scope.get(name) {
                self.table.resolutions.insert(node, id);
                return;
            }
        }
        let id = *self.free.entry(name.to_string()).or_insert_with(|| {
            let id = self.table.bindings.len() as BindingId;
            self.table.bindings.push(BindingInfo {
                id,
                decl_node: node,
                name: name.to_string(),
                ty: None,
                origin: BindingOrigin::Free,
            });
            id
        });
        self.table.resolutions.insert(node, id);
    }

    fn visit_block(&mut self, block: &Block) -> Result<(), AnalysisError> {
        self.push_scope();
        for stmt in &block.stmts {
            self.visit_stmt(stmt)?;
        }
        self.pop_scope();
        Ok(())
    }

    fn visit_stmt(&mut self, stmt: &Stmt) -> Result<(), AnalysisError> {
        match &stmt.kind {
            StmtKind::VarDecl { ty, name, init } => {
                // Initializer resolves before the name becomes visible.
                if let Some(e) = init {
                    self.visit_expr(e);
                }
                self.declare(stmt.id, name, Some(*ty), BindingOrigin::Local)?;
            }
            StmtKind::Assign(a) => self.visit_assign(a),
            StmtKind::ExprStmt(e) => self.visit_expr(e),
            StmtKind::If { cond, then_branch, else_branch } => {
                self.visit_expr(cond);
                self.visit_block(then_branch)?;
                if let Some(e) = else_branch {
                    self.visit_stmt(e)?;
                }
            }
            StmtKind::While { cond, body } => {
                self.visit_expr(cond);
                self.visit_block(body)?;
            }
            StmtKind::DoWhile { body, cond } => {
                self.visit_block(body)?;
                self.visit_expr(cond);
            }
            StmtKind::For { init, cond, update, body } => {
                // The init declaration scopes over cond, update, and body.
                self.push_scope();
                if let Some(s) = init {
                    self.visit_stmt(s)?;
                }
                if let Some(e) = cond {
                    self.visit_expr(e);
                }
                if let Some(a) = update {
                    self.visit_assign(a);
                }
                self.visit_block(body)?;
                self.pop_scope();
            }
            StmtKind::Switch { scrutinee, arms } => {
                self.visit_expr(scrutinee);
                // Java gives the whole switch body one scope.
                self.push_scope();
                for arm in arms {
                    for s in &arm.stmts {
                        self.visit_stmt(s)?;
                    }
                }
                self.pop_scope();
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.visit_expr(e);
                }
            }
            StmtKind::Break | StmtKind::Continue => {}
            StmtKind::Block(b) => self.visit_block(b)?,
            StmtKind::Try { body, catch, finally } => {
                self.visit_block(body)?;
                if let Some(c) = catch {
                    self.push_scope();
                    self.declare(c.param.id, &c.param.name, None, BindingOrigin::CatchParam)?;
                    self.visit_block(&c.body)?;
                    self.pop_scope();
                }
                if let Some(f) = finally {
                    self.visit_block(f)?;
                }
            }
        }
        Ok(())
    }

    fn visit_assign(&mut self, a: &AssignStmt) {
        self.visit_expr(&a.target);
        if let Some(v) = &a.value {
            self.visit_expr(v);
        }
    }

    fn visit_expr(&mut self, expr: &Expr) {
        match &expr.kind {
            ExprKind::VarRef(name) => self.reference(expr.id, name),
            ExprKind::Unary { operand, .. } => self.visit_expr(operand),
            ExprKind::Binary { lhs, rhs, .. } => {
                self.visit_expr(lhs);
                self.visit_expr(rhs);
            }
            ExprKind::Call { args, .. } => {
                for a in args {
                    self.visit_expr(a);
                }
            }
            ExprKind::Ternary { cond, then_expr, else_expr } => {
                self.visit_expr(cond);
                self.visit_expr(then_expr);
                self.visit_expr(else_expr);
            }
            _ => {}
        }
    }
}

/// Reads, writes, and call presence over one statement subtree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReadWriteSets {
    pub reads: BTreeSet<BindingId>,
    pub writes: BTreeSet<BindingId>,
    pub calls: bool,
}

/// Computes def/use sets for a statement. Declarations and assignment
/// targets are writes; compound assignments and `++`/`--` also read their
/// target.
pub fn compute_def_use(stmt: &Stmt, table: &SymbolTable) -> ReadWriteSets {
    let mut sets = ReadWriteSets::default();
    defuse_stmt(stmt, table, &mut sets);
    sets
}

fn defuse_stmt(stmt: &Stmt, table: &SymbolTable, sets: &mut ReadWriteSets) {
    match &stmt.kind {
        StmtKind::VarDecl { init, .. } => {
            if let Some(e) = init {
                defuse_expr(e, table, sets);
            }
            if let Some(b) = table.resolve(stmt.id) {
                sets.writes.insert(b);
            }
        }
        StmtKind::Assign(a) => defuse_assign(a, table, sets),
        StmtKind::ExprStmt(e) => defuse_expr(e, table, sets),
        StmtKind::If { cond, then_branch, else_branch } => {
            defuse_expr(cond, table, sets);
            defuse_block(then_branch, table, sets);
            if let Some(e) = else_branch {
                defuse_stmt(e, table, sets);
            }
        }
        StmtKind::While { cond, body } => {
            defuse_expr(cond, table, sets);
            defuse_block(body, table, sets);
        }
        StmtKind::DoWhile { body, cond } => {
            defuse_block(body, table, sets);
            defuse_expr(cond, table, sets);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(s) = init {
                defuse_stmt(s, table, sets);
            }
            if let Some(e) = cond {
                defuse_expr(e, table, sets);
            }
            if let Some(a) = update {
                defuse_assign(a, table, sets);
            }
            defuse_block(body, table, sets);
        }
        StmtKind::Switch { scrutinee, arms } => {
            defuse_expr(scrutinee, table, sets);
            for arm in arms {
                for s in &arm.stmts {
                    defuse_stmt(s, table, sets);
                }
            }
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                defuse_expr(e, table, sets);
            }
        }
        StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(b) => defuse_block(b, table, sets),
        StmtKind::Try { body, catch, finally } => {
            defuse_block(body, table, sets);
            if let Some(c) = catch {
                defuse_block(&c.body, table, sets);
            }
            if let Some(f) = finally {
                defuse_block(f, table, sets);
            }
        }
    }
}

fn defuse_block(block: &Block, table: &SymbolTable, sets: &mut ReadWriteSets) {
    for s in &block.stmts {
        defuse_stmt(s, table, sets);
    }
}

fn defuse_assign(a: &AssignStmt, table: &SymbolTable, sets: &mut ReadWriteSets) {
    if let Some(b) = table.resolve(a.target.id) {
        sets.writes.insert(b);
        if a.op != AssignOp::Set {
            sets.reads.insert(b);
        }
    }
    if let Some(v) = &a.value {
        defuse_expr(v, table, sets);
    }
}

fn defuse_expr(expr: &Expr, table: &SymbolTable, sets: &mut ReadWriteSets) {
    match &expr.kind {
        ExprKind::VarRef(_) => {
            if let Some(b) = table.resolve(expr.id) {
                sets.reads.insert(b);
            }
        }
        ExprKind::Unary { operand, .. } => defuse_expr(operand, table, sets),
        ExprKind::Binary { lhs, rhs, .. } => {
            defuse_expr(lhs, table, sets);
            defuse_expr(rhs, table, sets);
        }
        ExprKind::Call { args, .. } => {
            sets.calls = true;
            for a in args {
                defuse_expr(a, table, sets);
            }
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            defuse_expr(cond, table, sets);
            defuse_expr(then_expr, table, sets);
            defuse_expr(else_expr, table, sets);
        }
        _ => {}
    }
}

fn contains_jump(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return(_) | StmtKind::Break | StmtKind::Continue => true,
        StmtKind::VarDecl { .. } | StmtKind::Assign(_) | StmtKind::ExprStmt(_) => false,
        StmtKind::If { then_branch, else_branch, .. } => {
            then_branch.stmts.iter().any(contains_jump)
                || else_branch.as_deref().is_some_and(contains_jump)
        }
        StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => {
            body.stmts.iter().any(contains_jump)
        }
        StmtKind::For { body, .. } => body.stmts.iter().any(contains_jump),
        StmtKind::Switch { arms, .. } => arms.iter().any(|a| a.stmts.iter().any(contains_jump)),
        StmtKind::Block(b) => b.stmts.iter().any(contains_jump),
        StmtKind::Try { body, catch, finally } => {
            body.stmts.iter().any(contains_jump)
                || catch.as_ref().is_some_and(|c| c.body.stmts.iter().any(contains_jump))
                || finally.as_ref().is_some_and(|f| f.stmts.iter().any(contains_jump))
        }
    }
}

/// Whether two adjacent statements of the same block can be reordered
/// without changing behavior.
///
/// Requires disjoint write/read+write sets (free names participate as
/// pseudo-bindings), no calls on either side, no abnormal control flow
/// anywhere in either subtree, and no name capture when a declaration
/// moves past a statement mentioning the declared name.
pub fn independent(a: &Stmt, b: &Stmt, table: &SymbolTable) -> bool {
    if contains_jump(a) || contains_jump(b) {
        return false;
    }
    let sa = compute_def_use(a, table);
    let sb = compute_def_use(b, table);
    if sa.calls || sb.calls {
        return false;
    }
    if sa.writes.intersection(&sb.reads).next().is_some()
        || sa.writes.intersection(&sb.writes).next().is_some()
        || sb.writes.intersection(&sa.reads).next().is_some()
    {
        return false;
    }
    // A moved declaration must not capture or collide with names mentioned
    // by its swap partner.
    !decl_captures(a, b) && !decl_captures(b, a)
}

fn decl_captures(decl_stmt: &Stmt, other: &Stmt) -> bool {
    if let StmtKind::VarDecl { name, .. } = &decl_stmt.kind {
        stmt_mentions_name(other, name)
    } else {
        false
    }
}

fn stmt_mentions_name(stmt: &Stmt, name: &str) -> bool {
    let mut found = false;
    visit_names(stmt, &mut |n| {
        if n == name {
            found = true;
        }
    });
    found
}

fn visit_names(stmt: &Stmt, f: &mut impl FnMut(&str)) {
    match &stmt.kind {
        StmtKind::VarDecl { name, init, .. } => {
            f(name);
            if let Some(e) = init {
                visit_expr_names(e, f);
            }
        }
        StmtKind::Assign(a) => {
            visit_expr_names(&a.target, f);
            if let Some(v) = &a.value {
                visit_expr_names(v, f);
            }
        }
        StmtKind::ExprStmt(e) => visit_expr_names(e, f),
        StmtKind::If { cond, then_branch, else_branch } => {
            visit_expr_names(cond, f);
            for s in &then_branch.stmts {
                visit_names(s, f);
            }
            if let Some(e) = else_branch {
                visit_names(e, f);
            }
        }
        StmtKind::While { cond, body } => {
            visit_expr_names(cond, f);
            for s in &body.stmts {
                visit_names(s, f);
            }
        }
        StmtKind::DoWhile { body, cond } => {
            for s in &body.stmts {
                visit_names(s, f);
            }
            visit_expr_names(cond, f);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(s) = init {
                visit_names(s, f);
            }
            if let Some(e) = cond {
                visit_expr_names(e, f);
            }
            if let Some(a) = update {
                visit_expr_names(&a.target, f);
                if let Some(v) = &a.value {
                    visit_expr_names(v, f);
                }
            }
            for s in &body.stmts {
                visit_names(s, f);
            }
        }
        StmtKind::Switch { scrutinee, arms } => {
            visit_expr_names(scrutinee, f);
            for arm in arms {
                for s in &arm.stmts {
                    visit_names(s, f);
                }
            }
        }
        StmtKind::Return(Some(e)) => visit_expr_names(e, f),
        StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(b) => {
            for s in &b.stmts {
                visit_names(s, f);
            }
        }
        StmtKind::Try { body, catch, finally } => {
            for s in &body.stmts {
                visit_names(s, f);
            }
            if let Some(c) = catch {
                f(&c.param.name);
                for s in &c.body.stmts {
                    visit_names(s, f);
                }
            }
            if let Some(fin) = finally {
                for s in &fin.stmts {
                    visit_names(s, f);
                }
            }
        }
    }
}

fn visit_expr_names(expr: &Expr, f: &mut impl FnMut(&str)) {
    match &expr.kind {
        ExprKind::VarRef(name) => f(name),
        ExprKind::Unary { operand, .. } => visit_expr_names(operand, f),
        ExprKind::Binary { lhs, rhs, .. } => {
            visit_expr_names(lhs, f);
            visit_expr_names(rhs, f);
        }
        ExprKind::Call { args, .. } => {
            for a in args {
                visit_expr_names(a, f);
            }
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            visit_expr_names(cond, f);
            visit_expr_names(then_expr, f);
            visit_expr_names(else_expr, f);
        }
        _ => {}
    }
}

// ---- transformation sites ----

/// The six transformation kinds, in the fixed reporting order.
#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    serde::Serialize,
    serde::Deserialize,
)]
pub enum TransformKind {
    VariableRenaming,
    BooleanExchange,
    LoopExchange,
    SwitchToIf,
    PermuteStatement,
    UnusedStatement,
}

impl TransformKind {
    pub const ALL: [TransformKind; 6] = [
        TransformKind::VariableRenaming,
        TransformKind::BooleanExchange,
        TransformKind::LoopExchange,
        TransformKind::SwitchToIf,
        TransformKind::PermuteStatement,
        TransformKind::UnusedStatement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::VariableRenaming => "VariableRenaming",
            TransformKind::BooleanExchange => "BooleanExchange",
            TransformKind::LoopExchange => "LoopExchange",
            TransformKind::SwitchToIf => "SwitchToIf",
            TransformKind::PermuteStatement => "PermuteStatement",
            TransformKind::UnusedStatement => "UnusedStatement",
        }
    }

    /// Short tag used in variant ids and rng stream derivation.
    pub fn tag(self) -> &'static str {
        match self {
            TransformKind::VariableRenaming => "vr",
            TransformKind::BooleanExchange => "be",
            TransformKind::LoopExchange => "le",
            TransformKind::SwitchToIf => "si",
            TransformKind::PermuteStatement => "ps",
            TransformKind::UnusedStatement => "us",
        }
    }

    pub fn parse(text: &str) -> Option<TransformKind> {
        let norm: String =
            text.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        Some(match norm.as_str() {
            "variablerenaming" | "vr" => TransformKind::VariableRenaming,
            "booleanexchange" | "be" => TransformKind::BooleanExchange,
            "loopexchange" | "le" => TransformKind::LoopExchange,
            "switchtoif" | "si" => TransformKind::SwitchToIf,
            "permutestatement" | "ps" => TransformKind::PermuteStatement,
            "unusedstatement" | "us" => TransformKind::UnusedStatement,
            _ => return None,
        })
    }
}

impl std::fmt::Display for TransformKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which way a loop-exchange site rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopForm {
    ForToWhile,
    WhileToFor,
}

/// One addressable location where a transformation kind applies.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub kind: TransformKind,
    pub anchor: NodeId,
    pub payload: SitePayload,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SitePayload {
    /// Variable renaming / boolean exchange: the binding to rewrite.
    Binding(BindingId),
    Loop(LoopForm),
    Switch,
    /// Adjacent independent pair: enclosing block, index of the first
    /// statement, and both statement node ids.
    StmtPair { block: NodeId, index: usize, first: NodeId, second: NodeId },
    /// Unused-statement insertion target (any block).
    Block,
}

impl Site {
    /// Human-readable payload summary for the `sites` listing.
    pub fn payload_summary(&self, table: &SymbolTable) -> String {
        match &self.payload {
            SitePayload::Binding(b) => table.binding(*b).name.clone(),
            SitePayload::Loop(LoopForm::ForToWhile) => "for->while".into(),
            SitePayload::Loop(LoopForm::WhileToFor) => "while->for".into(),
            SitePayload::Switch => "switch".into(),
            SitePayload::StmtPair { first, second, .. } => format!("stmts {first},{second}"),
            SitePayload::Block => "block".into(),
        }
    }
}

/// Enumerates eligible sites for one kind, sorted by anchor preorder index.
/// The list length is the per-method location count `n`.
pub fn enumerate_sites(method: &MethodAst, table: &SymbolTable, kind: TransformKind) -> Vec<Site> {
    let mut sites = match kind {
        TransformKind::VariableRenaming => renaming_sites(table),
        TransformKind::BooleanExchange => boolean_sites(method, table),
        TransformKind::LoopExchange => loop_sites(method),
        TransformKind::SwitchToIf => switch_sites(method),
        TransformKind::PermuteStatement => permute_sites(method, table),
        TransformKind::UnusedStatement => block_sites(method),
    };
    sites.sort_by_key(|s| (s.anchor, secondary_key(s)));
    sites
}

fn secondary_key(site: &Site) -> usize {
    match &site.payload {
        SitePayload::StmtPair { index, .. } => *index,
        _ => 0,
    }
}

fn renaming_sites(table: &SymbolTable) -> Vec<Site> {
    table
        .bindings()
        .iter()
        .filter(|b| {
            matches!(
                b.origin,
                BindingOrigin::Param | BindingOrigin::Local | BindingOrigin::CatchParam
            )
        })
        .map(|b| Site {
            kind: TransformKind::VariableRenaming,
            anchor: b.decl_node,
            payload: SitePayload::Binding(b.id),
        })
        .collect()
}

/// Boolean locals are exchangeable when every occurrence is a plain read or
/// a whole-variable `=` assignment; `++`/`--` or compound assignments on the
/// variable disqualify it.
fn boolean_sites(method: &MethodAst, table: &SymbolTable) -> Vec<Site> {
    let mut ok: BTreeMap<BindingId, bool> = BTreeMap::new();
    for b in table.bindings() {
        if b.origin == BindingOrigin::Local && b.ty == Some(TypeName::Boolean) {
            ok.insert(b.id, true);
        }
    }
    if ok.is_empty() {
        return Vec::new();
    }
    walk_stmts(&method.body, &mut |stmt| {
        let target = match &stmt.kind {
            StmtKind::Assign(a) => Some(a),
            _ => None,
        };
        if let Some(a) = target {
            if let Some(b) = table.resolve(a.target.id) {
                if ok.contains_key(&b) && a.op != AssignOp::Set {
                    ok.insert(b, false);
                }
            }
        }
        if let StmtKind::For { update: Some(a), .. } = &stmt.kind {
            if let Some(b) = table.resolve(a.target.id) {
                if ok.contains_key(&b) && a.op != AssignOp::Set {
                    ok.insert(b, false);
                }
            }
        }
    });
    ok.iter()
        .filter(|(_, &eligible)| eligible)
        .map(|(&id, _)| Site {
            kind: TransformKind::BooleanExchange,
            anchor: table.binding(id).decl_node,
            payload: SitePayload::Binding(id),
        })
        .collect()
}

/// For- and while-loops with no continue bound to them.
fn loop_sites(method: &MethodAst) -> Vec<Site> {
    let mut sites = Vec::new();
    walk_stmts(&method.body, &mut |stmt| match &stmt.kind {
        StmtKind::For { body, .. } => {
            if !has_bound_continue(body) {
                sites.push(Site {
                    kind: TransformKind::LoopExchange,
                    anchor: stmt.id,
                    payload: SitePayload::Loop(LoopForm::ForToWhile),
                });
            }
        }
        StmtKind::While { body, .. } => {
            if !has_bound_continue(body) {
                sites.push(Site {
                    kind: TransformKind::LoopExchange,
                    anchor: stmt.id,
                    payload: SitePayload::Loop(LoopForm::WhileToFor),
                });
            }
        }
        _ => {}
    });
    sites
}

/// A `continue` binds to the nearest enclosing loop; nested loops keep
/// their own.
fn has_bound_continue(body: &Block) -> bool {
    fn scan(stmts: &[Stmt]) -> bool {
        stmts.iter().any(|s| match &s.kind {
            StmtKind::Continue => true,
            StmtKind::If { then_branch, else_branch, .. } => {
                scan(&then_branch.stmts)
                    || else_branch.as_deref().is_some_and(|e| scan(std::slice::from_ref(e)))
            }
            StmtKind::Block(b) => scan(&b.stmts),
            StmtKind::Switch { arms, .. } => arms.iter().any(|a| scan(&a.stmts)),
            StmtKind::Try { body, catch, finally } => {
                scan(&body.stmts)
                    || catch.as_ref().is_some_and(|c| scan(&c.body.stmts))
                    || finally.as_ref().is_some_and(|f| scan(&f.stmts))
            }
            // A continue inside a nested loop binds to that loop.
            StmtKind::While { .. } | StmtKind::DoWhile { .. } | StmtKind::For { .. } => false,
            _ => false,
        })
    }
    scan(&body.stmts)
}

/// Switches where every non-empty case ends in break or return.
fn switch_sites(method: &MethodAst) -> Vec<Site> {
    let mut sites = Vec::new();
    walk_stmts(&method.body, &mut |stmt| {
        if let StmtKind::Switch { arms, .. } = &stmt.kind {
            let no_fallthrough = arms.iter().all(|arm| {
                arm.stmts.is_empty()
                    || matches!(
                        arm.stmts.last().map(|s| &s.kind),
                        Some(StmtKind::Break) | Some(StmtKind::Return(_))
                    )
            });
            if no_fallthrough && !arms.is_empty() {
                sites.push(Site {
                    kind: TransformKind::SwitchToIf,
                    anchor: stmt.id,
                    payload: SitePayload::Switch,
                });
            }
        }
    });
    sites
}

/// Every adjacent independent pair in every block.
fn permute_sites(method: &MethodAst, table: &SymbolTable) -> Vec<Site> {
    let mut sites = Vec::new();
    walk_blocks(&method.body, &mut |block| {
        for i in 0..block.stmts.len().saturating_sub(1) {
            let (a, b) = (&block.stmts[i], &block.stmts[i + 1]);
            if independent(a, b, table) {
                sites.push(Site {
                    kind: TransformKind::PermuteStatement,
                    anchor: a.id,
                    payload: SitePayload::StmtPair {
                        block: block.id,
                        index: i,
                        first: a.id,
                        second: b.id,
                    },
                });
            }
        }
    });
    sites
}

/// Every block is an insertion site.
fn block_sites(method: &MethodAst) -> Vec<Site> {
    let mut sites = Vec::new();
    walk_blocks(&method.body, &mut |block| {
        sites.push(Site {
            kind: TransformKind::UnusedStatement,
            anchor: block.id,
            payload: SitePayload::Block,
        });
    });
    sites
}

/// Visits every block in the method, outermost first.
pub fn walk_blocks(root: &Block, f: &mut impl FnMut(&Block)) {
    f(root);
    for stmt in &root.stmts {
        walk_stmt_blocks(stmt, f);
    }
}

fn walk_stmt_blocks(stmt: &Stmt, f: &mut impl FnMut(&Block)) {
    match &stmt.kind {
        StmtKind::If { then_branch, else_branch, .. } => {
            walk_blocks(then_branch, f);
            if let Some(e) = else_branch {
                walk_stmt_blocks(e, f);
            }
        }
        StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => walk_blocks(body, f),
        StmtKind::For { body, .. } => walk_blocks(body, f),
        StmtKind::Switch { arms, .. } => {
            for arm in arms {
                for s in &arm.stmts {
                    walk_stmt_blocks(s, f);
                }
            }
        }
        StmtKind::Block(b) => walk_blocks(b, f),
        StmtKind::Try { body, catch, finally } => {
            walk_blocks(body, f);
            if let Some(c) = catch {
                walk_blocks(&c.body, f);
            }
            if let Some(fin) = finally {
                walk_blocks(fin, f);
            }
        }
        _ => {}
    }
}

/// Visits every statement in the method, preorder.
pub fn walk_stmts(root: &Block, f: &mut impl FnMut(&Stmt)) {
    for stmt in &root.stmts {
        walk_one(stmt, f);
    }
}

fn walk_one(stmt: &Stmt, f: &mut impl FnMut(&Stmt)) {
    f(stmt);
    match &stmt.kind {
        StmtKind::If { then_branch, else_branch, .. } => {
            walk_stmts(then_branch, f);
            if let Some(e) = else_branch {
                walk_one(e, f);
            }
        }
        StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => walk_stmts(body, f),
        StmtKind::For { init, body, .. } => {
            if let Some(s) = init {
                walk_one(s, f);
            }
            walk_stmts(body, f);
        }
        StmtKind::Switch { arms, .. } => {
            for arm in arms {
                for s in &arm.stmts {
                    walk_one(s, f);
                }
            }
        }
        StmtKind::Block(b) => walk_stmts(b, f),
        StmtKind::Try { body, catch, finally } => {
            walk_stmts(body, f);
            if let Some(c) = catch {
                walk_stmts(&c.body, f);
            }
            if let Some(fin) = finally {
                walk_stmts(fin, f);
            }
        }
        _ => {}
    }
}

/// Counts executable statements: declarations, assignments, expression
/// statements, return/break/continue, and each compound-statement header,
/// excluding bare block braces.
pub fn count_statements(method: &MethodAst) -> usize {
    fn count_block(block: &Block) -> usize {
        block.stmts.iter().map(count_stmt).sum()
    }
    fn count_stmt(stmt: &Stmt) -> usize {
        match &stmt.kind {
            StmtKind::VarDecl { .. }
            | StmtKind::Assign(_)
            | StmtKind::ExprStmt(_)
            | StmtKind::Return(_)
            | StmtKind::Break
            | StmtKind::Continue => 1,
            StmtKind::If { then_branch, else_branch, .. } => {
                1 + count_block(then_branch) + else_branch.as_deref().map_or(0, count_stmt)
            }
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => 1 + count_block(body),
            StmtKind::For { body, .. } => 1 + count_block(body),
            StmtKind::Switch { arms, .. } => {
                1 + arms
                    .iter()
                    .map(|a| a.stmts.iter().map(count_stmt).sum::<usize>())
                    .sum::<usize>()
            }
            StmtKind::Block(b) => count_block(b),
            StmtKind::Try { body, catch, finally } => {
                count_block(body)
                    + catch.as_ref().map_or(0, |c| count_block(&c.body))
                    + finally.as_ref().map_or(0, count_block)
            }
        }
    }
    count_block(&method.body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_method;

    fn table_for(src: &str) -> (MethodAst, SymbolTable) {
        let m = parse_method(src).unwrap();
        let t = resolve_scopes(&m).unwrap();
        (m, t)
    }

    #[test]
    fn initializer_binds_to_parameter() {
        let (m, t) = table_for("int f(int a){int b = a; return b;}");
        let decl = &m.body.stmts[0];
        let init_ref = match &decl.kind {
            StmtKind::VarDecl { init: Some(e), .. } => e.id,
            _ => unreachable!(),
        };
        let b = t.resolve(init_ref).unwrap();
        assert_eq!(t.binding(b).origin, BindingOrigin::Param);
        assert_eq!(t.binding(b).name, "a");
    }

    #[test]
    fn inner_use_binds_to_inner_shadow() {
        let (m, t) = table_for("void f(){int x = 0; {int x = 1; use(x);}}");
        let inner_block = match &m.body.stmts[1].kind {
            StmtKind::Block(b) => b,
            _ => unreachable!(),
        };
        let inner_decl_id = inner_block.stmts[0].id;
        let use_arg = match &inner_block.stmts[1].kind {
            StmtKind::ExprStmt(Expr { kind: ExprKind::Call { args, .. }, .. }) => args[0].id,
            _ => unreachable!(),
        };
        let b = t.resolve(use_arg).unwrap();
        assert_eq!(t.binding(b).decl_node, inner_decl_id);
    }

    #[test]
    fn duplicate_declaration_in_same_scope_errors() {
        let m = parse_method("void f(){int x = 0; int x = 1;}").unwrap();
        assert!(matches!(resolve_scopes(&m), Err(AnalysisError::DuplicateDeclaration { .. })));
    }

    #[test]
    fn unresolved_names_become_free_bindings() {
        let (_, t) = table_for("int f(){return fieldValue + 1;}");
        assert!(t.has_free_vars());
        assert_eq!(t.free_names().into_iter().collect::<Vec<_>>(), ["fieldValue"]);
    }

    #[test]
    fn def_use_of_simple_assignment() {
        let (m, t) = table_for("void f(int a, int b, int c){a = b + c;}");
        let sets = compute_def_use(&m.body.stmts[0], &t);
        let names = |ids: &BTreeSet<BindingId>| {
            ids.iter().map(|&i| t.binding(i).name.clone()).collect::<Vec<_>>()
        };
        assert_eq!(names(&sets.reads), ["b", "c"]);
        assert_eq!(names(&sets.writes), ["a"]);
        assert!(!sets.calls);
    }

    #[test]
    fn def_use_flags_calls_and_decl_writes() {
        let (m, t) = table_for("void f(int x){int t = g(x);}");
        let sets = compute_def_use(&m.body.stmts[0], &t);
        assert!(sets.calls);
        assert_eq!(sets.writes.len(), 1);
        assert_eq!(sets.reads.len(), 1);
    }

    #[test]
    fn increment_reads_and_writes() {
        let (m, t) = table_for("void f(int i){i++;}");
        let sets = compute_def_use(&m.body.stmts[0], &t);
        assert_eq!(sets.reads, sets.writes);
        assert_eq!(sets.writes.len(), 1);
    }

    #[test]
    fn independence_rules() {
        let (m, t) = table_for(
            "void f(int x, int y){int a = 1; int b = 2; a = 1; b = a; log(x); y = 2; return;}",
        );
        let s = &m.body.stmts;
        assert!(independent(&s[0], &s[1], &t), "disjoint decls");
        assert!(!independent(&s[2], &s[3], &t), "read-after-write");
        assert!(!independent(&s[4], &s[5], &t), "call side effect");
        assert!(!independent(&s[5], &s[6], &t), "return is never independent");
        assert_eq!(independent(&s[0], &s[1], &t), independent(&s[1], &s[0], &t));
    }

    #[test]
    fn jump_inside_subtree_blocks_independence() {
        let (m, t) = table_for(
            "int f(int x, int y){if (x > 0) {return 1;} if (y > 0) {return 2;} return 0;}",
        );
        let s = &m.body.stmts;
        assert!(!independent(&s[0], &s[1], &t));
    }

    #[test]
    fn renaming_sites_count_params_and_locals() {
        let (m, t) = table_for("int f(int a){int b = a; int c = b; return c;}");
        let sites = enumerate_sites(&m, &t, TransformKind::VariableRenaming);
        assert_eq!(sites.len(), 3);
    }

    #[test]
    fn no_loops_means_no_loop_sites() {
        let (m, t) = table_for("int f(int a){return a;}");
        assert!(enumerate_sites(&m, &t, TransformKind::LoopExchange).is_empty());
    }

    #[test]
    fn continue_disqualifies_its_loop_only() {
        let (m, t) = table_for(
            "void f(){int i = 0; while (i < 10) {i++; if (i > 5) {continue;}} for (int j = 0; j < 3; j++) {log(j);}}",
        );
        let sites = enumerate_sites(&m, &t, TransformKind::LoopExchange);
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].payload, SitePayload::Loop(LoopForm::ForToWhile));
    }

    #[test]
    fn fallthrough_switch_is_ineligible() {
        let (m, t) = table_for(
            "int f(int x){switch (x) {case 1: x = 2; case 2: return x; default: return 0;}}",
        );
        assert!(enumerate_sites(&m, &t, TransformKind::SwitchToIf).is_empty());
        let (m2, t2) =
            table_for("int f(int x){switch (x) {case 1: return 1; default: return 0;}}");
        assert_eq!(enumerate_sites(&m2, &t2, TransformKind::SwitchToIf).len(), 1);
    }

    #[test]
    fn permute_sites_match_bruteforce_on_adjacent_pairs() {
        let (m, t) =
            table_for("void f(int p){int a = 1; int b = 2; int c = a + b; int d = p; log(d);}");
        let sites = enumerate_sites(&m, &t, TransformKind::PermuteStatement);
        let stmts = &m.body.stmts;
        let brute: Vec<usize> = (0..stmts.len() - 1)
            .filter(|&i| independent(&stmts[i], &stmts[i + 1], &t))
            .collect();
        let got: Vec<usize> = sites
            .iter()
            .map(|s| match s.payload {
                SitePayload::StmtPair { index, .. } => index,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(got, brute);
        assert!(!got.is_empty());
    }

    #[test]
    fn every_block_is_an_unused_site() {
        let (m, t) = table_for("void f(int a){if (a > 0) {log(a);} else {log(0);}}");
        // method body + then-block + else-block
        assert_eq!(enumerate_sites(&m, &t, TransformKind::UnusedStatement).len(), 3);
    }

    #[test]
    fn statement_counting_rule() {
        let m = parse_method("void f(){}").unwrap();
        assert_eq!(count_statements(&m), 0);
        let m = parse_method("void f(int a){int x = 0; if (a > 0) {x = 1;}}").unwrap();
        assert_eq!(count_statements(&m), 3);
        let m = parse_method("void f(){for (int i = 0; i < 3; i++) {log(i);}}").unwrap();
        // for header + body call
        assert_eq!(count_statements(&m), 2);
        let m = parse_method("void f(int a){{log(a);}}").unwrap();
        // bare braces excluded
        assert_eq!(count_statements(&m), 1);
    }

    #[test]
    fn boolean_eligibility_requires_clean_occurrences() {
        let (m, t) = table_for(
            "int f(int x){boolean flag = x > 0; if (flag) {return 1;} flag = false; return 0;}",
        );
        assert_eq!(enumerate_sites(&m, &t, TransformKind::BooleanExchange).len(), 1);
        // Parameters are not boolean-exchange sites.
        let (m2, t2) = table_for("int f(boolean b){if (b) {return 1;} return 0;}");
        assert!(enumerate_sites(&m2, &t2, TransformKind::BooleanExchange).is_empty());
    }

    #[test]
    fn site_enumeration_is_deterministic() {
        let src = "int f(int a){int b = a + 1; int c = 2; for (int i = 0; i < 5; i++) {c += i;} return b + c;}";
        let (m, t) = table_for(src);
        for kind in TransformKind::ALL {
            let s1 = enumerate_sites(&m, &t, kind);
            let s2 = enumerate_sites(&m, &t, kind);
            assert_eq!(s1, s2);
        }
    }
}
