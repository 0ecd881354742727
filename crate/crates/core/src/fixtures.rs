//! Deterministic fixture-method generation for the self-check pipeline and
//! the test suites.
//!
//! Generated methods are well-formed, free-variable-free, and terminate
//! quickly (loops run over fresh local counters with small literal bounds),
//! so differential equivalence checks are fully conclusive. A `focus` kind
//! guarantees at least one eligible site for that transformation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::TransformKind;
use crate::syntax::ast::*;

const METHOD_NAMES: &[&str] = &[
    "getCount",
    "setValue",
    "computeTotal",
    "processItems",
    "updateIndex",
    "findMax",
    "checkStatus",
    "buildLabel",
    "mergeValues",
    "scanBuffer",
    "resolveTarget",
    "applyDelta",
];

const CALL_NAMES: &[&str] = &["log", "notify", "record", "emit"];

/// Generates one method; with a `focus`, the method contains at least one
/// eligible site for that kind.
pub fn generate_method(seed: u64, focus: Option<TransformKind>) -> MethodAst {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(seed)),
        next_local: 0,
        ints: Vec::new(),
        bools: Vec::new(),
    };
    let name = METHOD_NAMES[g.rng.random_range(0..METHOD_NAMES.len())].to_string();
    let param_count = g.rng.random_range(1..=3usize);
    let mut params = Vec::new();
    for i in 0..param_count {
        params.push(Param { id: UNNUMBERED, ty: TypeName::Int, name: format!("p{i}") });
    }
    for p in &params {
        g.ints.push(p.name.clone());
    }

    let mut stmts: Vec<Stmt> = Vec::new();
    // Leading declarations read only parameters, so adjacent pairs are
    // independent and permute sites always exist.
    let lead = g.rng.random_range(2..=3usize);
    let mut lead_names = Vec::new();
    for _ in 0..lead {
        let name = g.fresh("a");
        let init = g.int_expr(2);
        lead_names.push(name.clone());
        stmts.push(Stmt::new(StmtKind::VarDecl { ty: TypeName::Int, name, init: Some(init) }));
    }
    g.ints.extend(lead_names);

    match focus {
        Some(TransformKind::BooleanExchange) => g.emit_boolean_block(&mut stmts),
        Some(TransformKind::LoopExchange) => g.emit_loop(&mut stmts),
        Some(TransformKind::SwitchToIf) => g.emit_switch(&mut stmts),
        Some(TransformKind::PermuteStatement) | Some(TransformKind::UnusedStatement)
        | Some(TransformKind::VariableRenaming) | None => {}
    }

    // Optional extra texture drawn from the same menu.
    let extras = g.rng.random_range(0..=2usize);
    for _ in 0..extras {
        match g.rng.random_range(0..5u8) {
            0 => g.emit_loop(&mut stmts),
            1 => g.emit_if(&mut stmts),
            2 => g.emit_boolean_block(&mut stmts),
            3 => {
                let call_ok = focus != Some(TransformKind::PermuteStatement);
                if call_ok {
                    g.emit_call(&mut stmts);
                } else {
                    g.emit_if(&mut stmts);
                }
            }
            _ => g.emit_assign(&mut stmts),
        }
    }

    if focus == Some(TransformKind::SwitchToIf)
        && !stmts.iter().any(|s| matches!(s.kind, StmtKind::Switch { .. }))
    {
        g.emit_switch(&mut stmts);
    }

    let ret_expr = g.int_expr(2);
    stmts.push(Stmt::new(StmtKind::Return(Some(ret_expr))));

    let mut method = MethodAst {
        id: UNNUMBERED,
        name,
        params,
        return_type: TypeName::Int,
        body: Block::new(stmts),
    };
    renumber(&mut method);
    method
}

/// A mixed corpus cycling through kind-focused profiles.
pub fn generate_corpus(count: usize, seed: u64) -> Vec<MethodAst> {
    (0..count)
        .map(|i| {
            let focus = match i % 7 {
                0 => Some(TransformKind::VariableRenaming),
                1 => Some(TransformKind::BooleanExchange),
                2 => Some(TransformKind::LoopExchange),
                3 => Some(TransformKind::SwitchToIf),
                4 => Some(TransformKind::PermuteStatement),
                5 => Some(TransformKind::UnusedStatement),
                _ => None,
            };
            generate_method(seed.wrapping_add(i as u64), focus)
        })
        .collect()
}

/// The motivating two-prediction example: a comparator whose local
/// variable `other` is the interesting renaming site.
pub const COMPARE_TO_SOURCE: &str = "int compareTo(int value, int anotherValue) {
    int other = anotherValue;
    if (value == other) {
        return 0;
    }
    if (value < other) {
        return -1;
    }
    return 1;
}";

struct Gen {
    rng: ChaCha8Rng,
    next_local: usize,
    /// int-typed names currently in scope (params and locals).
    ints: Vec<String>,
    bools: Vec<String>,
}

impl Gen {
    fn fresh(&mut self, prefix: &str) -> String {
        let name = format!("{prefix}{}", self.next_local);
        self.next_local += 1;
        name
    }

    /// Literal in [lo, hi]; negatives are negation nodes so the tree
    /// survives a parse round-trip.
    fn int_lit(&mut self, lo: i64, hi: i64) -> Expr {
        let v = self.rng.random_range(lo..=hi);
        if v < 0 {
            Expr::new(ExprKind::Unary { op: UnaryOp::Neg, operand: Box::new(Expr::int(-v)) })
        } else {
            Expr::int(v)
        }
    }

    fn int_var(&mut self) -> Expr {
        let i = self.rng.random_range(0..self.ints.len());
        Expr::var(self.ints[i].clone())
    }

    fn int_expr(&mut self, depth: u8) -> Expr {
        if depth == 0 || self.rng.random_range(0..3u8) == 0 {
            return if self.rng.random_range(0..2u8) == 0 {
                self.int_lit(-20, 20)
            } else {
                self.int_var()
            };
        }
        match self.rng.random_range(0..6u8) {
            0..=2 => {
                let op = match self.rng.random_range(0..3u8) {
                    0 => BinaryOp::Add,
                    1 => BinaryOp::Sub,
                    _ => BinaryOp::Mul,
                };
                let lhs = self.int_expr(depth - 1);
                let rhs = self.int_expr(depth - 1);
                Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
            }
            3 => {
                // Literal divisor keeps division traps out of the common path.
                let op = if self.rng.random_range(0..2u8) == 0 { BinaryOp::Div } else { BinaryOp::Rem };
                let lhs = self.int_expr(depth - 1);
                let rhs = Expr::int(self.rng.random_range(1..=9));
                Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
            }
            4 => {
                let cond = self.bool_expr(1);
                let t = self.int_expr(depth - 1);
                let e = self.int_expr(depth - 1);
                Expr::new(ExprKind::Ternary {
                    cond: Box::new(cond),
                    then_expr: Box::new(t),
                    else_expr: Box::new(e),
                })
            }
            _ => {
                let operand = self.int_expr(depth - 1);
                Expr::new(ExprKind::Unary { op: UnaryOp::Neg, operand: Box::new(operand) })
            }
        }
    }

    fn bool_expr(&mut self, depth: u8) -> Expr {
        if depth == 0 || self.bools.is_empty() || self.rng.random_range(0..2u8) == 0 {
            let op = match self.rng.random_range(0..4u8) {
                0 => BinaryOp::Lt,
                1 => BinaryOp::Gt,
                2 => BinaryOp::Le,
                _ => BinaryOp::Ne,
            };
            let lhs = self.int_expr(1);
            let rhs = self.int_expr(1);
            return Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        let i = self.rng.random_range(0..self.bools.len());
        Expr::var(self.bools[i].clone())
    }

    fn emit_boolean_block(&mut self, stmts: &mut Vec<Stmt>) {
        let name = self.fresh("flag");
        let init = self.bool_expr(0);
        stmts.push(Stmt::new(StmtKind::VarDecl {
            ty: TypeName::Boolean,
            name: name.clone(),
            init: Some(init),
        }));
        self.bools.push(name.clone());
        let then_stmt = self.plain_assign();
        let else_stmt = self.plain_assign();
        stmts.push(Stmt::new(StmtKind::If {
            cond: Expr::var(name),
            then_branch: Block::new(vec![then_stmt]),
            else_branch: Some(Box::new(Stmt::new(StmtKind::Block(Block::new(vec![else_stmt]))))),
        }));
    }

    fn emit_loop(&mut self, stmts: &mut Vec<Stmt>) {
        let acc = self.fresh("acc");
        stmts.push(Stmt::new(StmtKind::VarDecl {
            ty: TypeName::Int,
            name: acc.clone(),
            init: Some(Expr::int(0)),
        }));
        self.ints.push(acc.clone());
        let bound = self.rng.random_range(1..=8i64);
        if self.rng.random_range(0..2u8) == 0 {
            let i = self.fresh("i");
            let init = Stmt::new(StmtKind::VarDecl {
                ty: TypeName::Int,
                name: i.clone(),
                init: Some(Expr::int(0)),
            });
            let cond = Expr::new(ExprKind::Binary {
                op: BinaryOp::Lt,
                lhs: Box::new(Expr::var(i.clone())),
                rhs: Box::new(Expr::int(bound)),
            });
            let update = AssignStmt {
                target: Expr::var(i.clone()),
                op: AssignOp::Inc,
                value: None,
            };
            let body_stmt = Stmt::new(StmtKind::Assign(AssignStmt {
                target: Expr::var(acc),
                op: AssignOp::Add,
                value: Some(Expr::var(i)),
            }));
            stmts.push(Stmt::new(StmtKind::For {
                init: Some(Box::new(init)),
                cond: Some(cond),
                update: Some(update),
                body: Block::new(vec![body_stmt]),
            }));
        } else {
            let w = self.fresh("w");
            stmts.push(Stmt::new(StmtKind::VarDecl {
                ty: TypeName::Int,
                name: w.clone(),
                init: Some(Expr::int(bound)),
            }));
            let cond = Expr::new(ExprKind::Binary {
                op: BinaryOp::Gt,
                lhs: Box::new(Expr::var(w.clone())),
                rhs: Box::new(Expr::int(0)),
            });
            let add = Stmt::new(StmtKind::Assign(AssignStmt {
                target: Expr::var(acc),
                op: AssignOp::Add,
                value: Some(Expr::var(w.clone())),
            }));
            let dec = Stmt::new(StmtKind::Assign(AssignStmt {
                target: Expr::var(w),
                op: AssignOp::Dec,
                value: None,
            }));
            stmts.push(Stmt::new(StmtKind::While { cond, body: Block::new(vec![add, dec]) }));
        }
    }

    fn emit_switch(&mut self, stmts: &mut Vec<Stmt>) {
        let out = self.fresh("sel");
        stmts.push(Stmt::new(StmtKind::VarDecl {
            ty: TypeName::Int,
            name: out.clone(),
            init: Some(Expr::int(0)),
        }));
        self.ints.push(out.clone());
        let scrutinee = Expr::new(ExprKind::Binary {
            op: BinaryOp::Rem,
            lhs: Box::new(self.int_var()),
            rhs: Box::new(Expr::int(self.rng.random_range(3..=5))),
        });
        let arm_count = self.rng.random_range(2..=3usize);
        let mut arms = Vec::new();
        for k in 0..arm_count {
            let assign = Stmt::new(StmtKind::Assign(AssignStmt {
                target: Expr::var(out.clone()),
                op: AssignOp::Set,
                value: Some(self.int_lit(-9, 9)),
            }));
            arms.push(CaseArm {
                id: UNNUMBERED,
                label: CaseLabel::Int(k as i64),
                stmts: vec![assign, Stmt::new(StmtKind::Break)],
            });
        }
        if self.rng.random_range(0..2u8) == 0 {
            let assign = Stmt::new(StmtKind::Assign(AssignStmt {
                target: Expr::var(out),
                op: AssignOp::Set,
                value: Some(Expr::new(ExprKind::Unary {
                    op: UnaryOp::Neg,
                    operand: Box::new(Expr::int(1)),
                })),
            }));
            arms.push(CaseArm {
                id: UNNUMBERED,
                label: CaseLabel::Default,
                stmts: vec![assign, Stmt::new(StmtKind::Break)],
            });
        }
        stmts.push(Stmt::new(StmtKind::Switch { scrutinee, arms }));
    }

    fn emit_if(&mut self, stmts: &mut Vec<Stmt>) {
        let cond = self.bool_expr(1);
        let then_stmt = self.plain_assign();
        let with_else = self.rng.random_range(0..2u8) == 0;
        let else_branch = if with_else {
            Some(Box::new(Stmt::new(StmtKind::Block(Block::new(vec![self.plain_assign()])))))
        } else {
            None
        };
        stmts.push(Stmt::new(StmtKind::If {
            cond,
            then_branch: Block::new(vec![then_stmt]),
            else_branch,
        }));
    }

    fn emit_call(&mut self, stmts: &mut Vec<Stmt>) {
        let name = CALL_NAMES[self.rng.random_range(0..CALL_NAMES.len())].to_string();
        let arg = self.int_expr(1);
        stmts.push(Stmt::new(StmtKind::ExprStmt(Expr::new(ExprKind::Call {
            name,
            args: vec![arg],
        }))));
    }

    fn emit_assign(&mut self, stmts: &mut Vec<Stmt>) {
        stmts.push(self.plain_assign());
    }

    /// Assignment to an existing int local or parameter.
    fn plain_assign(&mut self) -> Stmt {
        let target = self.int_var();
        let value = self.int_expr(2);
        Stmt::new(StmtKind::Assign(AssignStmt { target, op: AssignOp::Set, value: Some(value) }))
    }
}
