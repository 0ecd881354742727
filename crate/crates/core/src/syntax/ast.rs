//! Typed AST for the supported Java-method subset.
//!
//! Every node carries a `NodeId` assigned in preorder by [`renumber`]; after
//! parsing or transforming, ids form a bijection onto `0..N-1`. Structural
//! equality (`PartialEq`) includes ids, so two renumbered trees compare equal
//! exactly when their shapes and lexemes match.

/// Preorder index of a node within its method.
pub type NodeId = u32;

/// Placeholder id for freshly built nodes; replaced by [`renumber`].
pub const UNNUMBERED: NodeId = u32::MAX;

/// Primitive and reference types of the subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeName {
    Int,
    Long,
    Double,
    Boolean,
    Str,
    Void,
}

impl TypeName {
    pub fn keyword(self) -> &'static str {
        match self {
            TypeName::Int => "int",
            TypeName::Long => "long",
            TypeName::Double => "double",
            TypeName::Boolean => "boolean",
            TypeName::Str => "String",
            TypeName::Void => "void",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<TypeName> {
        Some(match kw {
            "int" => TypeName::Int,
            "long" => TypeName::Long,
            "double" => TypeName::Double,
            "boolean" => TypeName::Boolean,
            "String" => TypeName::Str,
            "void" => TypeName::Void,
            _ => return None,
        })
    }
}

/// One method: the unit of transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodAst {
    pub id: NodeId,
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: TypeName,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub id: NodeId,
    pub ty: TypeName,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub id: NodeId,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// `int x = e;` or `int x;`
    VarDecl {
        ty: TypeName,
        name: String,
        init: Option<Expr>,
    },
    /// `x = e;`, `x += e;`, `x++;` — target is always a `VarRef` expression.
    Assign(AssignStmt),
    /// Expression used for effect; the subset restricts this to calls.
    ExprStmt(Expr),
    If {
        cond: Expr,
        then_branch: Block,
        /// `Stmt::If` (else-if chain) or `Stmt::Block`.
        else_branch: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    DoWhile {
        body: Block,
        cond: Expr,
    },
    For {
        /// VarDecl or Assign statement.
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Option<AssignStmt>,
        body: Block,
    },
    Switch {
        scrutinee: Expr,
        arms: Vec<CaseArm>,
    },
    Return(Option<Expr>),
    Break,
    Continue,
    Block(Block),
    /// Parses and prints; the interpreter runs body then finally and never
    /// enters catch (the subset has no throwing semantics).
    Try {
        body: Block,
        catch: Option<CatchClause>,
        finally: Option<Block>,
    },
}

/// Assignment forms, including the unary-increment form used in for-updates.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignStmt {
    /// Always `ExprKind::VarRef`.
    pub target: Expr,
    pub op: AssignOp,
    /// `None` exactly for `Inc`/`Dec`.
    pub value: Option<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Inc,
    Dec,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Rem => "%=",
            AssignOp::Inc => "++",
            AssignOp::Dec => "--",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseArm {
    pub id: NodeId,
    pub label: CaseLabel,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseLabel {
    Int(i64),
    Str(String),
    Default,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    /// Exception type name, kept verbatim (e.g. `Exception`).
    pub exc_type: String,
    pub param: CatchParam,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchParam {
    pub id: NodeId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    IntLit(i64),
    LongLit(i64),
    DoubleLit(f64),
    BoolLit(bool),
    StringLit(String),
    Null,
    VarRef(String),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        name: String,
        args: Vec<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then_expr: Box<Expr>,
        else_expr: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    And,
    Or,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr { id: UNNUMBERED, kind }
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::new(ExprKind::VarRef(name.into()))
    }

    pub fn int(v: i64) -> Expr {
        Expr::new(ExprKind::IntLit(v))
    }

    pub fn not(operand: Expr) -> Expr {
        Expr::new(ExprKind::Unary { op: UnaryOp::Not, operand: Box::new(operand) })
    }
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Stmt {
        Stmt { id: UNNUMBERED, kind }
    }
}

impl Block {
    pub fn new(stmts: Vec<Stmt>) -> Block {
        Block { id: UNNUMBERED, stmts }
    }
}

/// Assigns fresh preorder ids `0..N-1` over the whole method.
///
/// Preorder follows source order: method, params, body; each statement
/// before its children; `do-while` visits body before condition.
pub fn renumber(method: &mut MethodAst) {
    let mut next: NodeId = 0;
    let mut bump = move || {
        let id = next;
        next += 1;
        id
    };
    method.id = bump();
    for p in &mut method.params {
        p.id = bump();
    }
    renumber_block(&mut method.body, &mut bump);
}

fn renumber_block(block: &mut Block, next: &mut impl FnMut() -> NodeId) {
    block.id = next();
    for stmt in &mut block.stmts {
        renumber_stmt(stmt, next);
    }
}

fn renumber_stmt(stmt: &mut Stmt, next: &mut impl FnMut() -> NodeId) {
    stmt.id = next();
    match &mut stmt.kind {
        StmtKind::VarDecl { init, .. } => {
            if let Some(e) = init {
                renumber_expr(e, next);
            }
        }
        StmtKind::Assign(a) => renumber_assign(a, next),
        StmtKind::ExprStmt(e) => renumber_expr(e, next),
        StmtKind::If { cond, then_branch, else_branch } => {
            renumber_expr(cond, next);
            renumber_block(then_branch, next);
            if let Some(e) = else_branch {
                renumber_stmt(e, next);
            }
        }
        StmtKind::While { cond, body } => {
            renumber_expr(cond, next);
            renumber_block(body, next);
        }
        StmtKind::DoWhile { body, cond } => {
            renumber_block(body, next);
            renumber_expr(cond, next);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(s) = init {
                renumber_stmt(s, next);
            }
            if let Some(e) = cond {
                renumber_expr(e, next);
            }
            if let Some(a) = update {
                renumber_assign(a, next);
            }
            renumber_block(body, next);
        }
        StmtKind::Switch { scrutinee, arms } => {
            renumber_expr(scrutinee, next);
            for arm in arms {
                arm.id = next();
                for s in &mut arm.stmts {
                    renumber_stmt(s, next);
                }
            }
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                renumber_expr(e, next);
            }
        }
        StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(b) => renumber_block(b, next),
        StmtKind::Try { body, catch, finally } => {
            renumber_block(body, next);
            if let Some(c) = catch {
                c.param.id = next();
                renumber_block(&mut c.body, next);
            }
            if let Some(f) = finally {
                renumber_block(f, next);
            }
        }
    }
}

fn renumber_assign(a: &mut AssignStmt, next: &mut impl FnMut() -> NodeId) {
    renumber_expr(&mut a.target, next);
    if let Some(v) = &mut a.value {
        renumber_expr(v, next);
    }
}

fn renumber_expr(expr: &mut Expr, next: &mut impl FnMut() -> NodeId) {
    expr.id = next();
    match &mut expr.kind {
        ExprKind::Unary { operand, .. } => renumber_expr(operand, next),
        ExprKind::Binary { lhs, rhs, .. } => {
            renumber_expr(lhs, next);
            renumber_expr(rhs, next);
        }
        ExprKind::Call { args, .. } => {
            for a in args {
                renumber_expr(a, next);
            }
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            renumber_expr(cond, next);
            renumber_expr(then_expr, next);
            renumber_expr(else_expr, next);
        }
        _ => {}
    }
}

/// Total number of nodes (the `N` of the id bijection).
pub fn node_count(method: &MethodAst) -> usize {
    let mut n = 1 + method.params.len();
    count_block(&method.body, &mut n);
    n
}

fn count_block(block: &Block, n: &mut usize) {
    *n += 1;
    for s in &block.stmts {
        count_stmt(s, n);
    }
}

fn count_stmt(stmt: &Stmt, n: &mut usize) {
    *n += 1;
    match &stmt.kind {
        StmtKind::VarDecl { init, .. } => {
            if let Some(e) = init {
                count_expr(e, n);
            }
        }
        StmtKind::Assign(a) => count_assign(a, n),
        StmtKind::ExprStmt(e) => count_expr(e, n),
        StmtKind::If { cond, then_branch, else_branch } => {
            count_expr(cond, n);
            count_block(then_branch, n);
            if let Some(e) = else_branch {
                count_stmt(e, n);
            }
        }
        StmtKind::While { cond, body } => {
            count_expr(cond, n);
            count_block(body, n);
        }
        StmtKind::DoWhile { body, cond } => {
            count_block(body, n);
            count_expr(cond, n);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(s) = init {
                count_stmt(s, n);
            }
            if let Some(e) = cond {
                count_expr(e, n);
            }
            if let Some(a) = update {
                count_assign(a, n);
            }
            count_block(body, n);
        }
        StmtKind::Switch { scrutinee, arms } => {
            count_expr(scrutinee, n);
            for arm in arms {
                *n += 1;
                for s in &arm.stmts {
                    count_stmt(s, n);
                }
            }
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                count_expr(e, n);
            }
        }
        StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(b) => count_block(b, n),
        StmtKind::Try { body, catch, finally } => {
            count_block(body, n);
            if let Some(c) = catch {
                *n += 1;
                count_block(&c.body, n);
            }
            if let Some(f) = finally {
                count_block(f, n);
            }
        }
    }
}

fn count_assign(a: &AssignStmt, n: &mut usize) {
    count_expr(&a.target, n);
    if let Some(v) = &a.value {
        count_expr(v, n);
    }
}

fn count_expr(expr: &Expr, n: &mut usize) {
    *n += 1;
    match &expr.kind {
        ExprKind::Unary { operand, .. } => count_expr(operand, n),
        ExprKind::Binary { lhs, rhs, .. } => {
            count_expr(lhs, n);
            count_expr(rhs, n);
        }
        ExprKind::Call { args, .. } => {
            for a in args {
                count_expr(a, n);
            }
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            count_expr(cond, n);
            count_expr(then_expr, n);
            count_expr(else_expr, n);
        }
        _ => {}
    }
}

/// Collects every identifier lexeme occurring in the method (declarations,
/// references, call names, catch params). Fresh-name generation checks
/// against this set.
pub fn identifier_lexemes(method: &MethodAst) -> std::collections::BTreeSet<String> {
    let mut out = std::collections::BTreeSet::new();
    out.insert(method.name.clone());
    for p in &method.params {
        out.insert(p.name.clone());
    }
    idents_block(&method.body, &mut out);
    out
}

fn idents_block(block: &Block, out: &mut std::collections::BTreeSet<String>) {
    for s in &block.stmts {
        idents_stmt(s, out);
    }
}

fn idents_stmt(stmt: &Stmt, out: &mut std::collections::BTreeSet<String>) {
    match &stmt.kind {
        StmtKind::VarDecl { name, init, .. } => {
            out.insert(name.clone());
            if let Some(e) = init {
                idents_expr(e, out);
            }
        }
        StmtKind::Assign(a) => idents_assign(a, out),
        StmtKind::ExprStmt(e) => idents_expr(e, out),
        StmtKind::If { cond, then_branch, else_branch } => {
            idents_expr(cond, out);
            idents_block(then_branch, out);
            if let Some(e) = else_branch {
                idents_stmt(e, out);
            }
        }
        StmtKind::While { cond, body } => {
            idents_expr(cond, out);
            idents_block(body, out);
        }
        StmtKind::DoWhile { body, cond } => {
            idents_block(body, out);
            idents_expr(cond, out);
        }
        StmtKind::For { init, cond, update, body } => {
            if let Some(s) = init {
                idents_stmt(s, out);
            }
            if let Some(e) = cond {
                idents_expr(e, out);
            }
            if let Some(a) = update {
                idents_assign(a, out);
            }
            idents_block(body, out);
        }
        StmtKind::Switch { scrutinee, arms } => {
            idents_expr(scrutinee, out);
            for arm in arms {
                for s in &arm.stmts {
                    idents_stmt(s, out);
                }
            }
        }
        StmtKind::Return(Some(e)) => idents_expr(e, out),
        StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue => {}
        StmtKind::Block(b) => idents_block(b, out),
        StmtKind::Try { body, catch, finally } => {
            idents_block(body, out);
            if let Some(c) = catch {
                out.insert(c.exc_type.clone());
                out.insert(c.param.name.clone());
                idents_block(&c.body, out);
            }
            if let Some(f) = finally {
                idents_block(f, out);
            }
        }
    }
}

fn idents_assign(a: &AssignStmt, out: &mut std::collections::BTreeSet<String>) {
    idents_expr(&a.target, out);
    if let Some(v) = &a.value {
        idents_expr(v, out);
    }
}

fn idents_expr(expr: &Expr, out: &mut std::collections::BTreeSet<String>) {
    match &expr.kind {
        ExprKind::VarRef(name) => {
            out.insert(name.clone());
        }
        ExprKind::Unary { operand, .. } => idents_expr(operand, out),
        ExprKind::Binary { lhs, rhs, .. } => {
            idents_expr(lhs, out);
            idents_expr(rhs, out);
        }
        ExprKind::Call { name, args } => {
            out.insert(name.clone());
            for a in args {
                idents_expr(a, out);
            }
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            idents_expr(cond, out);
            idents_expr(then_expr, out);
            idents_expr(else_expr, out);
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_method() -> MethodAst {
        let ret = Stmt::new(StmtKind::Return(Some(Expr::int(1))));
        MethodAst {
            id: UNNUMBERED,
            name: "f".into(),
            params: vec![Param { id: UNNUMBERED, ty: TypeName::Int, name: "a".into() }],
            return_type: TypeName::Int,
            body: Block::new(vec![ret]),
        }
    }

    #[test]
    fn renumber_assigns_preorder_bijection() {
        let mut m = tiny_method();
        renumber(&mut m);
        assert_eq!(m.id, 0);
        assert_eq!(m.params[0].id, 1);
        assert_eq!(m.body.id, 2);
        assert_eq!(m.body.stmts[0].id, 3);
        assert_eq!(node_count(&m), 5);
    }

    #[test]
    fn identifier_set_includes_calls_and_params() {
        let call = Expr::new(ExprKind::Call { name: "log".into(), args: vec![Expr::var("a")] });
        let mut m = tiny_method();
        m.body.stmts.insert(0, Stmt::new(StmtKind::ExprStmt(call)));
        let ids = identifier_lexemes(&m);
        assert!(ids.contains("f"));
        assert!(ids.contains("a"));
        assert!(ids.contains("log"));
    }
}
