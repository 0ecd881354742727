//! Reference interpreter for the subset and differential equivalence
//! checking between original and transformed methods.
//!
//! Evaluation is a pure function of (ast, args, fuel). External calls are
//! stubbed: each call is recorded in the outcome's call trace and returns a
//! deterministic value derived from `hash(callee, args)` in the type the
//! context expects, so methods whose call results feed control flow remain
//! checkable. Equivalence requires identical results (doubles compared
//! bit-for-bit) and identical call traces.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::resolve_scopes;
use crate::hashing::Fnv64;
use crate::syntax::ast::*;

/// Default statement budget per evaluation.
pub const DEFAULT_FUEL: u64 = 100_000;

/// Runtime value of the subset.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Long(i64),
    Double(f64),
    Bool(bool),
    Str(String),
    Null,
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Long(_) => "long",
            Value::Double(_) => "double",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "String",
            Value::Null => "null",
        }
    }

    /// Exact equality: doubles compare by bit pattern, so results are
    /// reproducible even around NaN and signed zero.
    pub fn identical(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) | (Value::Long(a), Value::Long(b)) => a == b,
            (Value::Double(a), Value::Double(b)) => a.to_bits() == b.to_bits(),
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Null, Value::Null) => true,
            _ => false,
        }
    }

    fn hash_into(&self, h: &mut Fnv64) {
        match self {
            Value::Int(v) => {
                h.write(&[1]).write_u64(*v as u64);
            }
            Value::Long(v) => {
                h.write(&[2]).write_u64(*v as u64);
            }
            Value::Double(v) => {
                h.write(&[3]).write_u64(v.to_bits());
            }
            Value::Bool(v) => {
                h.write(&[4, u8::from(*v)]);
            }
            Value::Str(s) => {
                h.write(&[5]).write_str(s);
            }
            Value::Null => {
                h.write(&[6]);
            }
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Long(v) => write!(f, "{v}L"),
            Value::Double(v) => write!(f, "{v:?}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Null => write!(f, "null"),
        }
    }
}

/// One recorded external call.
#[derive(Debug, Clone, PartialEq)]
pub struct CallRecord {
    pub callee: String,
    pub args: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeResult {
    Returned(Value),
    /// Fell off the end of the body (void or missing return).
    Completed,
    /// Deterministic runtime error (division by zero, type error, ...).
    Trapped(String),
    FuelExhausted,
}

/// Result of one evaluation, including the external-call trace in
/// evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: OutcomeResult,
    pub call_trace: Vec<CallRecord>,
}

impl Outcome {
    pub fn identical(&self, other: &Outcome) -> bool {
        let results_match = match (&self.result, &other.result) {
            (OutcomeResult::Returned(a), OutcomeResult::Returned(b)) => a.identical(b),
            (a, b) => a == b,
        };
        results_match && traces_identical(&self.call_trace, &other.call_trace)
    }
}

fn traces_identical(a: &[CallRecord], b: &[CallRecord]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| calls_identical(x, y))
}

fn calls_identical(a: &CallRecord, b: &CallRecord) -> bool {
    a.callee == b.callee
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(x, y)| x.identical(y))
}

fn trace_prefix_consistent(a: &[CallRecord], b: &[CallRecord]) -> bool {
    let n = a.len().min(b.len());
    a[..n].iter().zip(&b[..n]).all(|(x, y)| calls_identical(x, y))
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InterpError {
    #[error("expected {expected} arguments, got {found}")]
    WrongArgCount { expected: usize, found: usize },
    #[error("argument {index} has type {found}, expected {expected}")]
    TypeMismatch { index: usize, expected: String, found: String },
}

/// Evaluates a method on the given arguments with a statement budget.
pub fn evaluate(method: &MethodAst, args: &[Value], fuel: u64) -> Result<Outcome, InterpError> {
    if args.len() != method.params.len() {
        return Err(InterpError::WrongArgCount {
            expected: method.params.len(),
            found: args.len(),
        });
    }
    for (i, (p, v)) in method.params.iter().zip(args).enumerate() {
        if !arg_matches(p.ty, v) {
            return Err(InterpError::TypeMismatch {
                index: i,
                expected: p.ty.keyword().to_string(),
                found: v.type_name().to_string(),
            });
        }
    }
    let mut m = Machine { scopes: Vec::new(), fuel, trace: Vec::new() };
    m.push_scope();
    for (p, v) in method.params.iter().zip(args) {
        m.define(&p.name, p.ty, Some(v.clone()));
    }
    let result = match m.exec_block(&method.body, method.return_type) {
        Ok(Signal::Return(Some(v))) => OutcomeResult::Returned(v),
        Ok(_) => OutcomeResult::Completed,
        Err(Stop::Trap(reason)) => OutcomeResult::Trapped(reason),
        Err(Stop::Fuel) => OutcomeResult::FuelExhausted,
    };
    Ok(Outcome { result, call_trace: m.trace })
}

fn arg_matches(ty: TypeName, v: &Value) -> bool {
    matches!(
        (ty, v),
        (TypeName::Int, Value::Int(_))
            | (TypeName::Long, Value::Long(_))
            | (TypeName::Double, Value::Double(_))
            | (TypeName::Boolean, Value::Bool(_))
            | (TypeName::Str, Value::Str(_))
            | (TypeName::Str, Value::Null)
    )
}

enum Signal {
    Normal,
    Break,
    Continue,
    Return(Option<Value>),
}

enum Stop {
    Trap(String),
    Fuel,
}

struct Slot {
    ty: TypeName,
    value: Option<Value>,
}

struct Machine {
    scopes: Vec<Vec<(String, Slot)>>,
    fuel: u64,
    trace: Vec<CallRecord>,
}

type ExecResult = Result<Signal, Stop>;
type EvalResult = Result<Value, Stop>;

impl Machine {
    fn push_scope(&mut self) {
        self.scopes.push(Vec::new());
    }

    fn pop_scope(&mut self) {
        self.scopes.pop();
    }

    fn define(&mut self, name: &str, ty: TypeName, value: Option<Value>) {
        self.scopes.last_mut().expect("scope").push((name.to_string(), Slot { ty, value }));
    }

    fn slot_mut(&mut self, name: &str) -> Option<&mut Slot> {
        for scope in self.scopes.iter_mut().rev() {
            if let Some((_, slot)) = scope.iter_mut().rev().find(|(n, _)| n == name) {
                return Some(slot);
            }
        }
        None
    }

    fn trap(&self, reason: impl Into<String>) -> Stop {
        Stop::Trap(reason.into())
    }

    fn spend(&mut self) -> Result<(), Stop> {
        if self.fuel == 0 {
            return Err(Stop::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn exec_block(&mut self, block: &Block, ret: TypeName) -> ExecResult {
        self.push_scope();
        let r = self.exec_stmts(&block.stmts, ret);
        self.pop_scope();
        r
    }

    fn exec_stmts(&mut self, stmts: &[Stmt], ret: TypeName) -> ExecResult {
        for stmt in stmts {
            match self.exec_stmt(stmt, ret)? {
                Signal::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Signal::Normal)
    }

    fn exec_stmt(&mut self, stmt: &Stmt, ret: TypeName) -> ExecResult {
        self.spend()?;
        match &stmt.kind {
            StmtKind::VarDecl { ty, name, init } => {
                let value = match init {
                    Some(e) => {
                        let raw = self.eval_owned(e, Some(*ty))?;
                        Some(self.coerce(raw, *ty)?)
                    }
                    None => None,
                };
                self.define(name, *ty, value);
                Ok(Signal::Normal)
            }
            StmtKind::Assign(a) => {
                self.exec_assign(a)?;
                Ok(Signal::Normal)
            }
            StmtKind::ExprStmt(e) => {
                self.eval_owned(e, Some(TypeName::Void))?;
                Ok(Signal::Normal)
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                if self.eval_bool(cond)? {
                    self.exec_block(then_branch, ret)
                } else if let Some(e) = else_branch {
                    self.exec_stmt(e, ret)
                } else {
                    Ok(Signal::Normal)
                }
            }
            StmtKind::While { cond, body } => {
                loop {
                    if !self.eval_bool(cond)? {
                        break;
                    }
                    match self.exec_block(body, ret)? {
                        Signal::Break => break,
                        Signal::Return(v) => return Ok(Signal::Return(v)),
                        Signal::Normal | Signal::Continue => {}
                    }
                }
                Ok(Signal::Normal)
            }
            StmtKind::DoWhile { body, cond } => {
                loop {
                    match self.exec_block(body, ret)? {
                        Signal::Break => break,
                        Signal::Return(v) => return Ok(Signal::Return(v)),
                        Signal::Normal | Signal::Continue => {}
                    }
                    if !self.eval_bool(cond)? {
                        break;
                    }
                }
                Ok(Signal::Normal)
            }
            StmtKind::For { init, cond, update, body } => {
                self.push_scope();
                let r = self.exec_for(init, cond, update, body, ret);
                self.pop_scope();
                r
            }
            StmtKind::Switch { scrutinee, arms } => self.exec_switch(scrutinee, arms, ret),
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => {
                        let raw = self.eval_owned(e, Some(ret))?;
                        Some(self.coerce(raw, ret)?)
                    }
                    None => None,
                };
                Ok(Signal::Return(v))
            }
            StmtKind::Break => Ok(Signal::Break),
            StmtKind::Continue => Ok(Signal::Continue),
            StmtKind::Block(b) => self.exec_block(b, ret),
            StmtKind::Try { body, catch: _, finally } => {
                // Opaque treatment: nothing in the subset throws, so the
                // catch block is dead code; body then finally.
                let signal = self.exec_block(body, ret)?;
                if let Some(f) = finally {
                    match self.exec_block(f, ret)? {
                        Signal::Normal => {}
                        other => return Ok(other),
                    }
                }
                Ok(signal)
            }
        }
    }

    fn exec_for(
        &mut self,
        init: &Option<Box<Stmt>>,
        cond: &Option<Expr>,
        update: &Option<AssignStmt>,
        body: &Block,
        ret: TypeName,
    ) -> ExecResult {
        if let Some(s) = init {
            match self.exec_stmt(s, ret)? {
                Signal::Normal => {}
                other => return Ok(other),
            }
        }
        loop {
            if let Some(c) = cond {
                if !self.eval_bool(c)? {
                    break;
                }
            }
            match self.exec_block(body, ret)? {
                Signal::Break => break,
                Signal::Return(v) => return Ok(Signal::Return(v)),
                Signal::Normal | Signal::Continue => {}
            }
            if let Some(u) = update {
                self.spend()?;
                self.exec_assign(u)?;
            }
        }
        Ok(Signal::Normal)
    }

    fn exec_switch(&mut self, scrutinee: &Expr, arms: &[CaseArm], ret: TypeName) -> ExecResult {
        let expected = if arms.iter().any(|a| matches!(a.label, CaseLabel::Str(_))) {
            TypeName::Str
        } else {
            TypeName::Int
        };
        let value = self.eval_owned(scrutinee, Some(expected))?;
        let mut start = None;
        for (i, arm) in arms.iter().enumerate() {
            let hit = match &arm.label {
                CaseLabel::Int(lv) => match &value {
                    Value::Int(v) | Value::Long(v) => v == lv,
                    other => {
                        return Err(self.trap(format!(
                            "type error: switch on {} with int case labels",
                            other.type_name()
                        )))
                    }
                },
                CaseLabel::Str(ls) => match &value {
                    Value::Str(s) => s == ls,
                    Value::Null => false,
                    other => {
                        return Err(self.trap(format!(
                            "type error: switch on {} with String case labels",
                            other.type_name()
                        )))
                    }
                },
                CaseLabel::Default => false,
            };
            if hit {
                start = Some(i);
                break;
            }
        }
        if start.is_none() {
            start = arms.iter().position(|a| a.label == CaseLabel::Default);
        }
        let Some(start) = start else {
            return Ok(Signal::Normal);
        };
        // Execute from the matched arm with Java fallthrough until break.
        self.push_scope();
        let mut outcome = Signal::Normal;
        'arms: for arm in &arms[start..] {
            for stmt in &arm.stmts {
                match self.exec_stmt(stmt, ret) {
                    Ok(Signal::Normal) => {}
                    Ok(Signal::Break) => break 'arms,
                    Ok(other) => {
                        outcome = other;
                        break 'arms;
                    }
                    Err(stop) => {
                        self.pop_scope();
                        return Err(stop);
                    }
                }
            }
        }
        self.pop_scope();
        Ok(outcome)
    }

    fn exec_assign(&mut self, a: &AssignStmt) -> Result<(), Stop> {
        let name = match &a.target.kind {
            ExprKind::VarRef(n) => n.clone(),
            _ => return Err(self.trap("invalid assignment target")),
        };
        let Some(slot) = self.slot_mut(&name) else {
            return Err(self.trap(format!("unbound variable '{name}'")));
        };
        let ty = slot.ty;
        match a.op {
            AssignOp::Set => {
                let value = self.eval_owned(a.value.as_ref().expect("value"), Some(ty))?;
                let value = self.coerce(value, ty)?;
                self.slot_mut(&name).expect("slot").value = Some(value);
            }
            AssignOp::Inc | AssignOp::Dec => {
                let current = self.read_slot(&name)?;
                let one = Value::Int(1);
                let op = if a.op == AssignOp::Inc { BinaryOp::Add } else { BinaryOp::Sub };
                let next = self.apply_binary(op, current, one)?;
                let next = self.coerce(next, ty)?;
                self.slot_mut(&name).expect("slot").value = Some(next);
            }
            compound => {
                let current = self.read_slot(&name)?;
                let rhs = self.eval_owned(a.value.as_ref().expect("value"), Some(ty))?;
                let op = match compound {
                    AssignOp::Add => BinaryOp::Add,
                    AssignOp::Sub => BinaryOp::Sub,
                    AssignOp::Mul => BinaryOp::Mul,
                    AssignOp::Div => BinaryOp::Div,
                    AssignOp::Rem => BinaryOp::Rem,
                    _ => unreachable!(),
                };
                let next = self.apply_binary(op, current, rhs)?;
                let next = self.coerce(next, ty)?;
                self.slot_mut(&name).expect("slot").value = Some(next);
            }
        }
        Ok(())
    }

    fn read_slot(&mut self, name: &str) -> EvalResult {
        match self.slot_mut(name) {
            Some(slot) => match &slot.value {
                Some(v) => Ok(v.clone()),
                None => Err(Stop::Trap(format!("read of uninitialized variable '{name}'"))),
            },
            None => Err(Stop::Trap(format!("unbound variable '{name}'"))),
        }
    }

    /// Widening conversions mirror Java: int -> long -> double.
    fn coerce(&self, value: Value, ty: TypeName) -> EvalResult {
        let out = match (ty, value) {
            (TypeName::Int, v @ Value::Int(_)) => v,
            (TypeName::Long, Value::Int(v)) => Value::Long(v),
            (TypeName::Long, v @ Value::Long(_)) => v,
            (TypeName::Double, Value::Int(v)) | (TypeName::Double, Value::Long(v)) => {
                Value::Double(v as f64)
            }
            (TypeName::Double, v @ Value::Double(_)) => v,
            (TypeName::Boolean, v @ Value::Bool(_)) => v,
            (TypeName::Str, v @ Value::Str(_)) => v,
            (TypeName::Str, Value::Null) => Value::Null,
            (TypeName::Void, v) => v,
            (ty, v) => {
                return Err(Stop::Trap(format!(
                    "type error: cannot use {} where {} is expected",
                    v.type_name(),
                    ty.keyword()
                )))
            }
        };
        Ok(out)
    }

    fn eval_bool(&mut self, expr: &Expr) -> Result<bool, Stop> {
        match self.eval_owned(expr, Some(TypeName::Boolean))? {
            Value::Bool(b) => Ok(b),
            other => Err(self.trap(format!("condition has type {}, not boolean", other.type_name()))),
        }
    }

    fn eval_owned(&mut self, expr: &Expr, expected: Option<TypeName>) -> EvalResult {
        match &expr.kind {
            ExprKind::IntLit(v) => Ok(Value::Int(*v)),
            ExprKind::LongLit(v) => Ok(Value::Long(*v)),
            ExprKind::DoubleLit(v) => Ok(Value::Double(*v)),
            ExprKind::BoolLit(v) => Ok(Value::Bool(*v)),
            ExprKind::StringLit(s) => Ok(Value::Str(s.clone())),
            ExprKind::Null => Ok(Value::Null),
            ExprKind::VarRef(name) => self.read_slot(name),
            ExprKind::Unary { op, operand } => {
                let inner_expected = match op {
                    UnaryOp::Not => Some(TypeName::Boolean),
                    UnaryOp::Neg => expected.filter(|t| {
                        matches!(t, TypeName::Int | TypeName::Long | TypeName::Double)
                    }),
                };
                let v = self.eval_owned(operand, inner_expected)?;
                match (op, v) {
                    (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    (UnaryOp::Neg, Value::Int(v)) => Ok(Value::Int(v.wrapping_neg())),
                    (UnaryOp::Neg, Value::Long(v)) => Ok(Value::Long(v.wrapping_neg())),
                    (UnaryOp::Neg, Value::Double(v)) => Ok(Value::Double(-v)),
                    (op, v) => Err(self.trap(format!(
                        "type error: unary {:?} on {}",
                        op,
                        v.type_name()
                    ))),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => {
                if matches!(op, BinaryOp::And | BinaryOp::Or) {
                    let l = self.eval_bool(lhs)?;
                    return match (op, l) {
                        (BinaryOp::And, false) => Ok(Value::Bool(false)),
                        (BinaryOp::Or, true) => Ok(Value::Bool(true)),
                        _ => Ok(Value::Bool(self.eval_bool(rhs)?)),
                    };
                }
                let l = self.eval_owned(lhs, None)?;
                let r = self.eval_owned(rhs, None)?;
                self.apply_binary(*op, l, r)
            }
            ExprKind::Call { name, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval_owned(a, None)?);
                }
                self.trace.push(CallRecord { callee: name.clone(), args: values.clone() });
                Ok(stub_value(name, &values, expected.unwrap_or(TypeName::Int)))
            }
            ExprKind::Ternary { cond, then_expr, else_expr } => {
                if self.eval_bool(cond)? {
                    self.eval_owned(then_expr, expected)
                } else {
                    self.eval_owned(else_expr, expected)
                }
            }
        }
    }

    fn apply_binary(&self, op: BinaryOp, l: Value, r: Value) -> EvalResult {
        use BinaryOp::*;
        // String concatenation takes priority for `+`.
        if op == Add {
            if let Value::Str(s) = &l {
                return Ok(Value::Str(format!("{}{}", s, display_for_concat(&r))));
            }
            if let Value::Str(s) = &r {
                return Ok(Value::Str(format!("{}{}", display_for_concat(&l), s)));
            }
        }
        match op {
            Eq | Ne => {
                let eq = self.values_equal(&l, &r)?;
                return Ok(Value::Bool(if op == Eq { eq } else { !eq }));
            }
            _ => {}
        }
        let (l, r) = promote_pair(l, r).map_err(Stop::Trap)?;
        let out = match (op, &l, &r) {
            (Add, Value::Int(a), Value::Int(b)) => Value::Int(a.wrapping_add(*b)),
            (Sub, Value::Int(a), Value::Int(b)) => Value::Int(a.wrapping_sub(*b)),
            (Mul, Value::Int(a), Value::Int(b)) => Value::Int(a.wrapping_mul(*b)),
            (Div, Value::Int(a), Value::Int(b)) => {
                if *b == 0 {
                    return Err(Stop::Trap("division by zero".into()));
                }
                Value::Int(a.wrapping_div(*b))
            }
            (Rem, Value::Int(a), Value::Int(b)) => {
                if *b == 0 {
                    return Err(Stop::Trap("division by zero".into()));
                }
                Value::Int(a.wrapping_rem(*b))
            }
            (Add, Value::Long(a), Value::Long(b)) => Value::Long(a.wrapping_add(*b)),
            (Sub, Value::Long(a), Value::Long(b)) => Value::Long(a.wrapping_sub(*b)),
            (Mul, Value::Long(a), Value::Long(b)) => Value::Long(a.wrapping_mul(*b)),
            (Div, Value::Long(a), Value::Long(b)) => {
                if *b == 0 {
                    return Err(Stop::Trap("division by zero".into()));
                }
                Value::Long(a.wrapping_div(*b))
            }
            (Rem, Value::Long(a), Value::Long(b)) => {
                if *b == 0 {
                    return Err(Stop::Trap("division by zero".into()));
                }
                Value::Long(a.wrapping_rem(*b))
            }
            (Add, Value::Double(a), Value::Double(b)) => Value::Double(a + b),
            (Sub, Value::Double(a), Value::Double(b)) => Value::Double(a - b),
            (Mul, Value::Double(a), Value::Double(b)) => Value::Double(a * b),
            (Div, Value::Double(a), Value::Double(b)) => Value::Double(a / b),
            (Rem, Value::Double(a), Value::Double(b)) => Value::Double(a % b),
            (Lt, Value::Int(a), Value::Int(b)) => Value::Bool(a < b),
            (Le, Value::Int(a), Value::Int(b)) => Value::Bool(a <= b),
            (Gt, Value::Int(a), Value::Int(b)) => Value::Bool(a > b),
            (Ge, Value::Int(a), Value::Int(b)) => Value::Bool(a >= b),
            (Lt, Value::Long(a), Value::Long(b)) => Value::Bool(a < b),
            (Le, Value::Long(a), Value::Long(b)) => Value::Bool(a <= b),
            (Gt, Value::Long(a), Value::Long(b)) => Value::Bool(a > b),
            (Ge, Value::Long(a), Value::Long(b)) => Value::Bool(a >= b),
            (Lt, Value::Double(a), Value::Double(b)) => Value::Bool(a < b),
            (Le, Value::Double(a), Value::Double(b)) => Value::Bool(a <= b),
            (Gt, Value::Double(a), Value::Double(b)) => Value::Bool(a > b),
            (Ge, Value::Double(a), Value::Double(b)) => Value::Bool(a >= b),
            (op, l, r) => {
                return Err(Stop::Trap(format!(
                    "type error: {} {} {}",
                    l.type_name(),
                    op.symbol(),
                    r.type_name()
                )))
            }
        };
        Ok(out)
    }

    /// Java-like `==` over the subset: numeric promotion, value equality on
    /// strings (mirrors the switch-on-String convention), null comparisons.
    fn values_equal(&self, l: &Value, r: &Value) -> Result<bool, Stop> {
        let eq = match (l, r) {
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Null, Value::Null) => true,
            (Value::Str(_), Value::Null) | (Value::Null, Value::Str(_)) => false,
            (a, b) if is_numeric(a) && is_numeric(b) => {
                let (a, b) = promote_pair(a.clone(), b.clone()).map_err(Stop::Trap)?;
                match (a, b) {
                    (Value::Int(x), Value::Int(y)) | (Value::Long(x), Value::Long(y)) => x == y,
                    (Value::Double(x), Value::Double(y)) => x == y,
                    _ => unreachable!(),
                }
            }
            (a, b) => {
                return Err(Stop::Trap(format!(
                    "type error: {} == {}",
                    a.type_name(),
                    b.type_name()
                )))
            }
        };
        Ok(eq)
    }
}

fn is_numeric(v: &Value) -> bool {
    matches!(v, Value::Int(_) | Value::Long(_) | Value::Double(_))
}

/// Java binary numeric promotion: int + long -> long, anything + double -> double.
fn promote_pair(l: Value, r: Value) -> Result<(Value, Value), String> {
    use Value::*;
    Ok(match (l, r) {
        (Int(a), Int(b)) => (Int(a), Int(b)),
        (Int(a), Long(b)) => (Long(a), Long(b)),
        (Long(a), Int(b)) => (Long(a), Long(b)),
        (Long(a), Long(b)) => (Long(a), Long(b)),
        (Double(a), Double(b)) => (Double(a), Double(b)),
        (Double(a), Int(b)) | (Double(a), Long(b)) => (Double(a), Double(b as f64)),
        (Int(a), Double(b)) | (Long(a), Double(b)) => (Double(a as f64), Double(b)),
        (l, r) => {
            return Err(format!(
                "type error: numeric operation on {} and {}",
                l.type_name(),
                r.type_name()
            ))
        }
    })
}

fn display_for_concat(v: &Value) -> String {
    match v {
        Value::Int(x) | Value::Long(x) => x.to_string(),
        Value::Double(x) => format!("{x:?}"),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => s.clone(),
        Value::Null => "null".to_string(),
    }
}

/// Deterministic stub return for an external call, in the expected type.
fn stub_value(name: &str, args: &[Value], expected: TypeName) -> Value {
    let mut h = Fnv64::new();
    h.write_str(name);
    for a in args {
        a.hash_into(&mut h);
    }
    let hash = h.finish();
    let small = (hash % 201) as i64 - 100;
    match expected {
        TypeName::Int | TypeName::Void => Value::Int(small),
        TypeName::Long => Value::Long(small),
        // Eighths stay exact in binary floating point.
        TypeName::Double => Value::Double(((hash % 2001) as f64 - 1000.0) / 8.0),
        TypeName::Boolean => Value::Bool(hash & 1 == 1),
        TypeName::Str => Value::Str(format!("s{}", hash % 100)),
    }
}

// ---- differential equivalence checking ----

#[derive(Debug, Clone, PartialEq)]
pub enum EquivalenceStatus {
    Equivalent,
    Divergent { input: Vec<Value>, outcome_a: Box<Outcome>, outcome_b: Box<Outcome> },
    NotCheckable { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceVerdict {
    pub status: EquivalenceStatus,
    /// Trials executed (a divergence stops early).
    pub trials: u32,
}

impl EquivalenceVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self.status, EquivalenceStatus::Equivalent)
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.status, EquivalenceStatus::Divergent { .. })
    }
}

/// Runs `trials` shared random input vectors through both methods and
/// compares outcomes exactly. Integer inputs mix boundary values
/// (MIN, -1, 0, 1, MAX) with draws from [-100, 100]; booleans take both
/// values; doubles come from a small exact grid; strings from a fixed pool
/// including the empty string.
pub fn check_equivalence(
    a: &MethodAst,
    b: &MethodAst,
    trials: u32,
    seed: u64,
) -> EquivalenceVerdict {
    check_equivalence_with_fuel(a, b, trials, seed, DEFAULT_FUEL)
}

pub fn check_equivalence_with_fuel(
    a: &MethodAst,
    b: &MethodAst,
    trials: u32,
    seed: u64,
    fuel: u64,
) -> EquivalenceVerdict {
    let sig_a: Vec<TypeName> = a.params.iter().map(|p| p.ty).collect();
    let sig_b: Vec<TypeName> = b.params.iter().map(|p| p.ty).collect();
    if sig_a != sig_b || a.return_type != b.return_type {
        return EquivalenceVerdict {
            status: EquivalenceStatus::NotCheckable { reason: "signature mismatch".into() },
            trials: 0,
        };
    }
    for (side, m) in [("original", a), ("variant", b)] {
        match resolve_scopes(m) {
            Ok(table) => {
                if table.has_free_vars() {
                    let names: Vec<_> =
                        table.free_names().into_iter().map(str::to_string).collect();
                    return EquivalenceVerdict {
                        status: EquivalenceStatus::NotCheckable {
                            reason: format!("{side} has free variables: {}", names.join(", ")),
                        },
                        trials: 0,
                    };
                }
            }
            Err(e) => {
                return EquivalenceVerdict {
                    status: EquivalenceStatus::NotCheckable { reason: e.to_string() },
                    trials: 0,
                };
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inconclusive = 0u32;
    for trial in 0..trials {
        let input: Vec<Value> = sig_a.iter().map(|ty| gen_value(*ty, &mut rng)).collect();
        let oa = evaluate(a, &input, fuel);
        let ob = evaluate(b, &input, fuel);
        let (oa, ob) = match (oa, ob) {
            (Ok(x), Ok(y)) => (x, y),
            (ea, eb) => {
                return EquivalenceVerdict {
                    status: EquivalenceStatus::NotCheckable {
                        reason: format!("evaluation rejected arguments: {ea:?} / {eb:?}"),
                    },
                    trials: trial,
                };
            }
        };
        let fuel_hit = matches!(oa.result, OutcomeResult::FuelExhausted)
            || matches!(ob.result, OutcomeResult::FuelExhausted);
        if fuel_hit {
            if trace_prefix_consistent(&oa.call_trace, &ob.call_trace) {
                inconclusive += 1;
                continue;
            }
            return divergent(input, oa, ob, trial + 1);
        }
        if !oa.identical(&ob) {
            return divergent(input, oa, ob, trial + 1);
        }
    }
    if inconclusive > 0 {
        EquivalenceVerdict {
            status: EquivalenceStatus::NotCheckable {
                reason: format!("fuel exhausted in {inconclusive} of {trials} trials"),
            },
            trials,
        }
    } else {
        EquivalenceVerdict { status: EquivalenceStatus::Equivalent, trials }
    }
}

fn divergent(input: Vec<Value>, oa: Outcome, ob: Outcome, trials: u32) -> EquivalenceVerdict {
    EquivalenceVerdict {
        status: EquivalenceStatus::Divergent {
            input,
            outcome_a: Box::new(oa),
            outcome_b: Box::new(ob),
        },
        trials,
    }
}

const INT_BOUNDARIES: [i64; 5] = [i64::MIN, -1, 0, 1, i64::MAX];
const DOUBLE_GRID: [f64; 9] = [-100.5, -2.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.5, 100.25];
const STRING_POOL: [&str; 8] = ["", "a", "b", "ab", "hello", "Test", "x1", "value"];

fn gen_value(ty: TypeName, rng: &mut ChaCha8Rng) -> Value {
    match ty {
        TypeName::Int => Value::Int(gen_int(rng)),
        TypeName::Long => Value::Long(gen_int(rng)),
        TypeName::Double => Value::Double(DOUBLE_GRID[rng.random_range(0..DOUBLE_GRID.len())]),
        TypeName::Boolean => Value::Bool(rng.random::<bool>()),
        TypeName::Str => Value::Str(STRING_POOL[rng.random_range(0..STRING_POOL.len())].to_string()),
        TypeName::Void => Value::Null,
    }
}

fn gen_int(rng: &mut ChaCha8Rng) -> i64 {
    if rng.random_range(0..4u8) == 0 {
        INT_BOUNDARIES[rng.random_range(0..INT_BOUNDARIES.len())]
    } else {
        rng.random_range(-100..=100)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_method;

    fn run(src: &str, args: &[Value]) -> Outcome {
        let m = parse_method(src).unwrap();
        evaluate(&m, args, DEFAULT_FUEL).unwrap()
    }

    #[test]
    fn constant_return() {
        let o = run("int f(){return 1;}", &[]);
        assert_eq!(o.result, OutcomeResult::Returned(Value::Int(1)));
        assert!(o.call_trace.is_empty());
    }

    #[test]
    fn sum_loop_returns_45() {
        let o = run("int f(){int s = 0; for (int i = 0; i < 10; i++) {s += i;} return s;}", &[]);
        assert_eq!(o.result, OutcomeResult::Returned(Value::Int(45)));
    }

    #[test]
    fn infinite_loop_exhausts_fuel() {
        let m = parse_method("void f(){while (true) {int x = 0;}}").unwrap();
        let o = evaluate(&m, &[], 1000).unwrap();
        assert_eq!(o.result, OutcomeResult::FuelExhausted);
    }

    #[test]
    fn division_by_zero_traps() {
        let o = run("int f(int a){return a / 0;}", &[Value::Int(1)]);
        assert!(matches!(o.result, OutcomeResult::Trapped(_)));
    }

    #[test]
    fn int_arithmetic_wraps() {
        let o = run(
            "long f(long a){return a + 1;}",
            &[Value::Long(i64::MAX)],
        );
        assert_eq!(o.result, OutcomeResult::Returned(Value::Long(i64::MIN)));
    }

    #[test]
    fn bad_args_are_type_mismatch() {
        let m = parse_method("int f(int a){return a;}").unwrap();
        assert!(matches!(
            evaluate(&m, &[Value::Bool(true)], DEFAULT_FUEL),
            Err(InterpError::TypeMismatch { .. })
        ));
        assert!(matches!(
            evaluate(&m, &[], DEFAULT_FUEL),
            Err(InterpError::WrongArgCount { .. })
        ));
    }

    #[test]
    fn calls_are_traced_and_deterministic() {
        let src = "int f(int x){int t = g(x); return t + h(t);}";
        let o1 = run(src, &[Value::Int(5)]);
        let o2 = run(src, &[Value::Int(5)]);
        assert!(o1.identical(&o2));
        assert_eq!(o1.call_trace.len(), 2);
        assert_eq!(o1.call_trace[0].callee, "g");
        assert_eq!(o1.call_trace[1].callee, "h");
    }

    #[test]
    fn call_results_feed_control_flow() {
        let src = "int f(int x){if (check(x)) {return 1;} return 0;}";
        let o1 = run(src, &[Value::Int(3)]);
        let o2 = run(src, &[Value::Int(3)]);
        assert!(o1.identical(&o2));
        assert!(matches!(o1.result, OutcomeResult::Returned(Value::Int(_))));
    }

    #[test]
    fn string_switch_uses_value_equality() {
        let src = r#"int f(String s){switch (s) {case "a": return 1; case "b": return 2; default: return 0;}}"#;
        assert_eq!(
            run(src, &[Value::Str("a".into())]).result,
            OutcomeResult::Returned(Value::Int(1))
        );
        assert_eq!(
            run(src, &[Value::Str("zz".into())]).result,
            OutcomeResult::Returned(Value::Int(0))
        );
    }

    #[test]
    fn switch_fallthrough_without_breaks() {
        let src = "int f(int x){int n = 0; switch (x) {case 1: n += 1; case 2: n += 10; default: n += 100;} return n;}";
        assert_eq!(run(src, &[Value::Int(1)]).result, OutcomeResult::Returned(Value::Int(111)));
        assert_eq!(run(src, &[Value::Int(2)]).result, OutcomeResult::Returned(Value::Int(110)));
        assert_eq!(run(src, &[Value::Int(9)]).result, OutcomeResult::Returned(Value::Int(100)));
    }

    #[test]
    fn continue_in_for_still_updates() {
        let src = "int f(){int s = 0; for (int i = 0; i < 5; i++) {if (i == 2) {continue;} s += i;} return s;}";
        // 0 + 1 + 3 + 4
        assert_eq!(run(src, &[]).result, OutcomeResult::Returned(Value::Int(8)));
    }

    #[test]
    fn do_while_runs_at_least_once() {
        let src = "int f(){int n = 0; do {n++;} while (false); return n;}";
        assert_eq!(run(src, &[]).result, OutcomeResult::Returned(Value::Int(1)));
    }

    #[test]
    fn try_runs_body_and_finally_catch_is_dead() {
        let src = "int f(){int n = 0; try {n = 1;} catch (Exception e) {n = 50;} finally {n += 10;} return n;}";
        assert_eq!(run(src, &[]).result, OutcomeResult::Returned(Value::Int(11)));
    }

    #[test]
    fn uninitialized_read_traps() {
        let o = run("int f(){int x; return x;}", &[]);
        assert!(matches!(o.result, OutcomeResult::Trapped(_)));
    }

    #[test]
    fn string_concat_matches_java_style() {
        let src = r#"String f(int n){return "n=" + n + "!";}"#;
        assert_eq!(
            run(src, &[Value::Int(7)]).result,
            OutcomeResult::Returned(Value::Str("n=7!".into()))
        );
    }

    #[test]
    fn evaluation_is_pure() {
        let m = parse_method("double f(double x){return x / 3.0 * 7.5;}").unwrap();
        let a = evaluate(&m, &[Value::Double(1.1)], DEFAULT_FUEL).unwrap();
        let b = evaluate(&m, &[Value::Double(1.1)], DEFAULT_FUEL).unwrap();
        assert!(a.identical(&b));
    }

    #[test]
    fn identity_is_equivalent() {
        let m = parse_method("int f(int a){return a * 2;}").unwrap();
        let v = check_equivalence(&m, &m, 20, 42);
        assert!(v.is_equivalent());
        assert_eq!(v.trials, 20);
    }

    #[test]
    fn off_by_one_is_divergent_with_witness() {
        let a = parse_method("int f(int x){return x;}").unwrap();
        let b = parse_method("int f(int x){return x + 1;}").unwrap();
        let v = check_equivalence(&a, &b, 20, 42);
        match v.status {
            EquivalenceStatus::Divergent { input, outcome_a, outcome_b } => {
                // The witness replays to unequal outcomes.
                let ra = evaluate(&a, &input, DEFAULT_FUEL).unwrap();
                let rb = evaluate(&b, &input, DEFAULT_FUEL).unwrap();
                assert!(!ra.identical(&rb));
                assert!(ra.identical(&outcome_a));
                assert!(rb.identical(&outcome_b));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn free_variables_are_not_checkable() {
        let a = parse_method("int f(){return someField;}").unwrap();
        let v = check_equivalence(&a, &a, 5, 1);
        assert!(matches!(v.status, EquivalenceStatus::NotCheckable { .. }));
    }

    #[test]
    fn fuel_exhaustion_is_not_divergence() {
        let a = parse_method("int f(int n){int s = 0; while (n > 0) {s += n; n--;} return s;}")
            .unwrap();
        let b = parse_method(
            "int f(int n){int s = 0; for (; n > 0;) {s += n; n--;} return s;}",
        )
        .unwrap();
        // Tiny fuel: large positive n exhausts it on both sides.
        let v = check_equivalence_with_fuel(&a, &b, 40, 7, 50);
        assert!(!v.is_divergent(), "fuel exhaustion must never report divergence: {v:?}");
    }

    #[test]
    fn signature_mismatch_not_checkable() {
        let a = parse_method("int f(int x){return x;}").unwrap();
        let b = parse_method("int f(long x){return 0;}").unwrap();
        let v = check_equivalence(&a, &b, 5, 1);
        assert!(matches!(v.status, EquivalenceStatus::NotCheckable { .. }));
    }
}
