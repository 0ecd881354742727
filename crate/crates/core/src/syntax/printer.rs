//! Deterministic canonical printer: 4-space indent, one statement per line,
//! minimal parentheses under Java precedence. Printing is a pure function of
//! tree shape, so `print(parse(print(a))) == print(a)` byte for byte.

use super::ast::*;

/// Renders a method in canonical form, without a trailing newline.
pub fn print_method(method: &MethodAst) -> String {
    let mut out = String::new();
    out.push_str(method.return_type.keyword());
    out.push(' ');
    out.push_str(&method.name);
    out.push('(');
    for (i, p) in method.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(p.ty.keyword());
        out.push(' ');
        out.push_str(&p.name);
    }
    out.push_str(") ");
    print_block(&method.body, 0, &mut out);
    out
}

/// Renders a single expression (used by diagnostics and site summaries).
pub fn expr_to_string(expr: &Expr) -> String {
    let mut out = String::new();
    print_expr(expr, 0, &mut out);
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn print_block(block: &Block, level: usize, out: &mut String) {
    out.push_str("{\n");
    for stmt in &block.stmts {
        print_stmt(stmt, level + 1, out);
    }
    indent(level, out);
    out.push('}');
}

fn print_stmt(stmt: &Stmt, level: usize, out: &mut String) {
    indent(level, out);
    match &stmt.kind {
        StmtKind::VarDecl { ty, name, init } => {
            out.push_str(ty.keyword());
            out.push(' ');
            out.push_str(name);
            if let Some(e) = init {
                out.push_str(" = ");
                print_expr(e, 0, out);
            }
            out.push_str(";\n");
        }
        StmtKind::Assign(a) => {
            print_assign(a, out);
            out.push_str(";\n");
        }
        StmtKind::ExprStmt(e) => {
            print_expr(e, 0, out);
            out.push_str(";\n");
        }
        StmtKind::If { cond, then_branch, else_branch } => {
            out.push_str("if (");
            print_expr(cond, 0, out);
            out.push_str(") ");
            print_block(then_branch, level, out);
            let mut cursor = else_branch;
            while let Some(stmt) = cursor {
                match &stmt.kind {
                    StmtKind::If { cond, then_branch, else_branch } => {
                        out.push_str(" else if (");
                        print_expr(cond, 0, out);
                        out.push_str(") ");
                        print_block(then_branch, level, out);
                        cursor = else_branch;
                    }
                    StmtKind::Block(b) => {
                        out.push_str(" else ");
                        print_block(b, level, out);
                        break;
                    }
                    // Parser only builds If or Block here.
                    _ => unreachable!("else branch must be a block or if"),
                }
            }
            out.push('\n');
        }
        StmtKind::While { cond, body } => {
            out.push_str("while (");
            print_expr(cond, 0, out);
            out.push_str(") ");
            print_block(body, level, out);
            out.push('\n');
        }
        StmtKind::DoWhile { body, cond } => {
            out.push_str("do ");
            print_block(body, level, out);
            out.push_str(" while (");
            print_expr(cond, 0, out);
            out.push_str(");\n");
        }
        StmtKind::For { init, cond, update, body } => {
            out.push_str("for (");
            if let Some(s) = init {
                match &s.kind {
                    StmtKind::VarDecl { ty, name, init } => {
                        out.push_str(ty.keyword());
                        out.push(' ');
                        out.push_str(name);
                        if let Some(e) = init {
                            out.push_str(" = ");
                            print_expr(e, 0, out);
                        }
                    }
                    StmtKind::Assign(a) => print_assign(a, out),
                    _ => unreachable!("for-init must be a declaration or assignment"),
                }
            }
            out.push(';');
            if let Some(e) = cond {
                out.push(' ');
                print_expr(e, 0, out);
            }
            out.push(';');
            if let Some(a) = update {
                out.push(' ');
                print_assign(a, out);
            }
            out.push_str(") ");
            print_block(body, level, out);
            out.push('\n');
        }
        StmtKind::Switch { scrutinee, arms } => {
            out.push_str("switch (");
            print_expr(scrutinee, 0, out);
            out.push_str(") {\n");
            for arm in arms {
                indent(level + 1, out);
                match &arm.label {
                    CaseLabel::Int(v) => {
                        out.push_str("case ");
                        out.push_str(&v.to_string());
                        out.push(':');
                    }
                    CaseLabel::Str(s) => {
                        out.push_str("case ");
                        print_string_lit(s, out);
                        out.push(':');
                    }
                    CaseLabel::Default => out.push_str("default:"),
                }
                out.push('\n');
                for s in &arm.stmts {
                    print_stmt(s, level + 2, out);
                }
            }
            indent(level, out);
            out.push_str("}\n");
        }
        StmtKind::Return(value) => {
            out.push_str("return");
            if let Some(e) = value {
                out.push(' ');
                print_expr(e, 0, out);
            }
            out.push_str(";\n");
        }
        StmtKind::Break => out.push_str("break;\n"),
        StmtKind::Continue => out.push_str("continue;\n"),
        StmtKind::Block(b) => {
            print_block(b, level, out);
            out.push('\n');
        }
        StmtKind::Try { body, catch, finally } => {
            out.push_str("try ");
            print_block(body, level, out);
            if let Some(c) = catch {
                out.push_str(" catch (");
                out.push_str(&c.exc_type);
                out.push(' ');
                out.push_str(&c.param.name);
                out.push_str(") ");
                print_block(&c.body, level, out);
            }
            if let Some(f) = finally {
                out.push_str(" finally ");
                print_block(f, level, out);
            }
            out.push('\n');
        }
    }
}

fn print_assign(a: &AssignStmt, out: &mut String) {
    print_expr(&a.target, 0, out);
    match a.op {
        AssignOp::Inc | AssignOp::Dec => out.push_str(a.op.symbol()),
        op => {
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            print_expr(a.value.as_ref().expect("assignment value"), 0, out);
        }
    }
}

// Precedence levels; higher binds tighter.
const PREC_TERNARY: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_EQ: u8 = 4;
const PREC_REL: u8 = 5;
const PREC_ADD: u8 = 6;
const PREC_MUL: u8 = 7;
const PREC_UNARY: u8 = 8;
const PREC_PRIMARY: u8 = 9;

fn precedence(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Ternary { .. } => PREC_TERNARY,
        ExprKind::Binary { op, .. } => match op {
            BinaryOp::Or => PREC_OR,
            BinaryOp::And => PREC_AND,
            BinaryOp::Eq | BinaryOp::Ne => PREC_EQ,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => PREC_REL,
            BinaryOp::Add | BinaryOp::Sub => PREC_ADD,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => PREC_MUL,
        },
        ExprKind::Unary { .. } => PREC_UNARY,
        _ => PREC_PRIMARY,
    }
}

fn print_expr(expr: &Expr, min_prec: u8, out: &mut String) {
    let prec = precedence(expr);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match &expr.kind {
        ExprKind::IntLit(v) => out.push_str(&v.to_string()),
        ExprKind::LongLit(v) => {
            out.push_str(&v.to_string());
            out.push('L');
        }
        ExprKind::DoubleLit(v) => out.push_str(&format!("{v:?}")),
        ExprKind::BoolLit(v) => out.push_str(if *v { "true" } else { "false" }),
        ExprKind::StringLit(s) => print_string_lit(s, out),
        ExprKind::Null => out.push_str("null"),
        ExprKind::VarRef(name) => out.push_str(name),
        ExprKind::Unary { op, operand } => {
            match op {
                UnaryOp::Not => out.push('!'),
                UnaryOp::Neg => out.push('-'),
            }
            // `-(-x)` must not print as `--x`, which lexes as a decrement.
            let force_parens = *op == UnaryOp::Neg
                && matches!(&operand.kind, ExprKind::Unary { op: UnaryOp::Neg, .. });
            if force_parens {
                out.push('(');
                print_expr(operand, 0, out);
                out.push(')');
            } else {
                print_expr(operand, PREC_UNARY, out);
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            print_expr(lhs, prec, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            print_expr(rhs, prec + 1, out);
        }
        ExprKind::Call { name, args } => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_expr(a, 0, out);
            }
            out.push(')');
        }
        ExprKind::Ternary { cond, then_expr, else_expr } => {
            print_expr(cond, PREC_OR, out);
            out.push_str(" ? ");
            print_expr(then_expr, PREC_TERNARY, out);
            out.push_str(" : ");
            print_expr(else_expr, PREC_TERNARY, out);
        }
    }
    if parens {
        out.push(')');
    }
}

fn print_string_lit(value: &str, out: &mut String) {
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            other => out.push(other),
        }
    }
    out.push('"');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_method;

    #[test]
    fn canonical_form_of_minimal_method() {
        let m = parse_method("int f(){return 1;}").unwrap();
        assert_eq!(print_method(&m), "int f() {\n    return 1;\n}");
    }

    #[test]
    fn print_is_idempotent() {
        let sources = [
            "int f(int a){if(a>0){return a;}else{return -a;}}",
            "void g(){for(int i=0;i<10;i++){log(i);}}",
            "int h(int x){switch(x){case 1: return 1; default: return 0;}}",
            "boolean k(boolean b){return !b && b || true;}",
            "double d(){return 1.5e2;}",
        ];
        for src in sources {
            let once = print_method(&parse_method(src).unwrap());
            let twice = print_method(&parse_method(&once).unwrap());
            assert_eq!(once, twice, "printing not idempotent for {src}");
        }
    }

    #[test]
    fn minimal_parentheses_preserve_structure() {
        let cases = [
            ("int f(){return 1-(2+3);}", "1 - (2 + 3)"),
            ("int f(){return 1-2+3;}", "1 - 2 + 3"),
            ("int f(){return (1+2)*3;}", "(1 + 2) * 3"),
            ("int f(){return -(-1);}", "-(-1)"),
            ("boolean f(){return !(true&&false);}", "!(true && false)"),
            ("int f(int a){return a>0?a:(a<0?-a:0);}", "a > 0 ? a : a < 0 ? -a : 0"),
            ("boolean f(boolean c){return (c?true:false)?false:true;}", "(c ? true : false) ? false : true"),
        ];
        for (src, expected) in cases {
            let m = parse_method(src).unwrap();
            let printed = print_method(&m);
            assert!(printed.contains(expected), "{printed:?} missing {expected:?}");
            let reparsed = parse_method(&printed).unwrap();
            assert_eq!(m, reparsed, "round-trip changed structure for {src}");
        }
    }

    #[test]
    fn double_literals_survive_round_trips() {
        for src in ["double f(){return 1.0;}", "double f(){return 0.25;}", "double f(){return 2e10;}"] {
            let m = parse_method(src).unwrap();
            let printed = print_method(&m);
            assert_eq!(m, parse_method(&printed).unwrap());
        }
    }

    #[test]
    fn string_escapes_print_canonically() {
        let m = parse_method(r#"String f(){return "a\nb\"c\\";}"#).unwrap();
        let printed = print_method(&m);
        assert!(printed.contains(r#""a\nb\"c\\""#));
        assert_eq!(m, parse_method(&printed).unwrap());
    }
}
