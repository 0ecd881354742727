//! Recursive-descent parser for the subset.
//!
//! Accepts a little more surface syntax than the AST keeps: access modifiers
//! and annotations are consumed and discarded, single unbraced statements
//! after `if`/`while`/`for` are normalized into blocks, and `package`/
//! `import` lines are skipped when parsing a compilation unit. Anything
//! outside the subset (generics, arrays, lambdas, field access, `new`, ...)
//! is rejected with `UnsupportedConstruct`.

use super::ast::*;
use super::error::{Diagnostic, SyntaxError};
use super::lexer::{tokenize, unescape_string};
use super::token::{Token, TokenKind};

/// Parses one method declaration; the entire input must be consumed.
pub fn parse_method(source: &str) -> Result<MethodAst, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut p = Parser::new(tokens);
    let mut method = p.parse_method_decl()?;
    if !p.at_end() {
        let t = p.peek().clone();
        return Err(p.error_at(&t, "end of input"));
    }
    renumber(&mut method);
    Ok(method)
}

/// Result of scanning a compilation unit: parsed methods in source order
/// plus one diagnostic per skipped member.
#[derive(Debug, Default)]
pub struct ExtractOutcome {
    pub methods: Vec<MethodAst>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Extracts every supported method from a source file. Class wrappers are
/// permitted; unsupported members are skipped with a diagnostic, never fatal.
pub fn extract_methods(source: &str) -> ExtractOutcome {
    let mut out = ExtractOutcome::default();
    let tokens = match tokenize(source) {
        Ok(t) => t,
        Err(e) => {
            out.diagnostics.push(Diagnostic::from(&e));
            return out;
        }
    };
    let mut p = Parser::new(tokens);
    p.parse_compilation_unit(&mut out);
    out
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const MODIFIERS: &[&str] =
    &["public", "private", "protected", "static", "final", "synchronized", "abstract", "native", "strictfp"];

impl Parser {
    fn new(tokens: Vec<Token>) -> Parser {
        Parser { tokens, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> &Token {
        static EOF: std::sync::OnceLock<Token> = std::sync::OnceLock::new();
        self.tokens.get(self.pos).unwrap_or_else(|| {
            EOF.get_or_init(|| Token {
                kind: TokenKind::Punctuation,
                lexeme: "<eof>".into(),
                line: 0,
                col: 0,
            })
        })
    }

    fn last_pos(&self) -> (u32, u32) {
        self.tokens.last().map(|t| (t.line, t.col)).unwrap_or((1, 1))
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if !self.at_end() {
            self.pos += 1;
        }
        t
    }

    fn check(&self, kind: TokenKind, lexeme: &str) -> bool {
        !self.at_end() && self.peek().is(kind, lexeme)
    }

    fn eat(&mut self, kind: TokenKind, lexeme: &str) -> bool {
        if self.check(kind, lexeme) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, lexeme: &str) -> Result<Token, SyntaxError> {
        if self.check(kind, lexeme) {
            Ok(self.advance())
        } else {
            let t = self.peek().clone();
            Err(self.error_at(&t, &format!("'{lexeme}'")))
        }
    }

    fn error_at(&self, found: &Token, expected: &str) -> SyntaxError {
        let (line, col) =
            if found.lexeme == "<eof>" { self.last_pos() } else { (found.line, found.col) };
        SyntaxError::Parse {
            line,
            col,
            expected: expected.to_string(),
            found: found.lexeme.clone(),
        }
    }

    fn unsupported(&self, at: &Token, construct: &str) -> SyntaxError {
        let (line, col) = if at.lexeme == "<eof>" { self.last_pos() } else { (at.line, at.col) };
        SyntaxError::Unsupported { line, col, construct: construct.to_string() }
    }

    // ---- compilation unit ----

    fn parse_compilation_unit(&mut self, out: &mut ExtractOutcome) {
        self.skip_header_lines();
        while !self.at_end() {
            if self.check(TokenKind::Punctuation, "}") || self.check(TokenKind::Punctuation, ";") {
                self.advance();
                continue;
            }
            let save = self.pos;
            if self.try_enter_class_body() {
                continue;
            }
            self.pos = save;
            match self.parse_method_decl() {
                Ok(mut m) => {
                    renumber(&mut m);
                    out.methods.push(m);
                }
                Err(e) => {
                    out.diagnostics.push(Diagnostic::from(&e));
                    self.recover_member(save);
                }
            }
        }
    }

    fn skip_header_lines(&mut self) {
        loop {
            if self.check(TokenKind::Identifier, "package") || self.check(TokenKind::Identifier, "import") {
                while !self.at_end() && !self.check(TokenKind::Punctuation, ";") {
                    self.advance();
                }
                self.eat(TokenKind::Punctuation, ";");
            } else {
                break;
            }
        }
    }

    /// If the upcoming tokens open a class declaration, consume through its
    /// `{` and return true; members then parse at this level and the closing
    /// `}` is swallowed by the unit loop.
    fn try_enter_class_body(&mut self) -> bool {
        self.skip_annotations_and_modifiers();
        if self.check(TokenKind::Identifier, "class") {
            self.advance();
            if self.peek().kind == TokenKind::Identifier {
                self.advance();
            }
            // Tolerate `extends X` / `implements X, Y` headers.
            while !self.at_end() && !self.check(TokenKind::Punctuation, "{") {
                self.advance();
            }
            return self.eat(TokenKind::Punctuation, "{");
        }
        false
    }

    /// Skips a failed member: to the next `;` at depth zero, or over one
    /// balanced `{...}` group.
    fn recover_member(&mut self, failed_at: usize) {
        self.pos = failed_at.max(self.pos);
        if self.pos == failed_at {
            self.pos += 1;
        }
        let mut depth = 0usize;
        while !self.at_end() {
            let t = self.peek();
            match (t.kind, t.lexeme.as_str()) {
                (TokenKind::Punctuation, "{") => {
                    depth += 1;
                    self.advance();
                }
                (TokenKind::Punctuation, "}") => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    self.advance();
                    if depth == 0 {
                        return;
                    }
                }
                (TokenKind::Punctuation, ";") if depth == 0 => {
                    self.advance();
                    return;
                }
                _ => {
                    self.advance();
                }
            }
        }
    }

    fn skip_annotations_and_modifiers(&mut self) {
        loop {
            if self.check(TokenKind::Punctuation, "@") {
                self.advance();
                if self.peek().kind == TokenKind::Identifier {
                    self.advance();
                }
                if self.check(TokenKind::Punctuation, "(") {
                    let mut depth = 0usize;
                    while !self.at_end() {
                        let t = self.advance();
                        match t.lexeme.as_str() {
                            "(" => depth += 1,
                            ")" => {
                                depth -= 1;
                                if depth == 0 {
                                    break;
                                }
                            }
                            _ => {}
                        }
                    }
                }
                continue;
            }
            if self.peek().kind == TokenKind::Identifier && MODIFIERS.contains(&self.peek().lexeme.as_str())
            {
                self.advance();
                continue;
            }
            break;
        }
    }

    // ---- method declaration ----

    fn parse_method_decl(&mut self) -> Result<MethodAst, SyntaxError> {
        self.skip_annotations_and_modifiers();
        let return_type = self.parse_type("return type")?;
        let name_tok = self.advance();
        if name_tok.kind != TokenKind::Identifier {
            return Err(self.error_at(&name_tok, "method name"));
        }
        self.expect(TokenKind::Punctuation, "(")?;
        let mut params = Vec::new();
        if !self.check(TokenKind::Punctuation, ")") {
            loop {
                let ty = self.parse_type("parameter type")?;
                if ty == TypeName::Void {
                    let t = self.peek().clone();
                    return Err(self.unsupported(&t, "void parameter"));
                }
                let pname = self.advance();
                if pname.kind != TokenKind::Identifier {
                    return Err(self.error_at(&pname, "parameter name"));
                }
                if params.iter().any(|p: &Param| p.name == pname.lexeme) {
                    return Err(SyntaxError::Parse {
                        line: pname.line,
                        col: pname.col,
                        expected: "distinct parameter name".into(),
                        found: pname.lexeme.clone(),
                    });
                }
                params.push(Param { id: UNNUMBERED, ty, name: pname.lexeme });
                if !self.eat(TokenKind::Punctuation, ",") {
                    break;
                }
            }
        }
        self.expect(TokenKind::Punctuation, ")")?;
        if self.check(TokenKind::Punctuation, ";") {
            let t = self.peek().clone();
            return Err(self.unsupported(&t, "abstract method (no body)"));
        }
        if self.check(TokenKind::Identifier, "throws") {
            self.advance();
            while self.peek().kind == TokenKind::Identifier {
                self.advance();
                if !self.eat(TokenKind::Punctuation, ",") {
                    break;
                }
            }
        }
        let body = self.parse_block()?;
        Ok(MethodAst { id: UNNUMBERED, name: name_tok.lexeme, params, return_type, body })
    }

    fn parse_type(&mut self, what: &str) -> Result<TypeName, SyntaxError> {
        let t = self.advance();
        let ty = match t.kind {
            TokenKind::Keyword => TypeName::from_keyword(&t.lexeme)
                .ok_or_else(|| self.error_at(&t, what))?,
            TokenKind::Identifier => {
                return Err(self.unsupported(&t, &format!("non-subset type '{}'", t.lexeme)));
            }
            _ => return Err(self.error_at(&t, what)),
        };
        if self.check(TokenKind::Punctuation, "[") {
            let t = self.peek().clone();
            return Err(self.unsupported(&t, "array type"));
        }
        if self.check(TokenKind::Operator, "<") {
            let t = self.peek().clone();
            return Err(self.unsupported(&t, "generic type"));
        }
        Ok(ty)
    }

    // ---- statements ----

    fn parse_block(&mut self) -> Result<Block, SyntaxError> {
        self.expect(TokenKind::Punctuation, "{")?;
        let mut stmts = Vec::new();
        while !self.check(TokenKind::Punctuation, "}") {
            if self.at_end() {
                let t = self.peek().clone();
                return Err(self.error_at(&t, "'}'"));
            }
            stmts.push(self.parse_stmt()?);
        }
        self.expect(TokenKind::Punctuation, "}")?;
        Ok(Block::new(stmts))
    }

    /// Parses a statement; a single unbraced body statement is wrapped into
    /// a one-statement block by the callers that need it.
    fn parse_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let t = self.peek().clone();
        match (t.kind, t.lexeme.as_str()) {
            (TokenKind::Punctuation, "{") => Ok(Stmt::new(StmtKind::Block(self.parse_block()?))),
            (TokenKind::Keyword, "if") => self.parse_if(),
            (TokenKind::Keyword, "while") => self.parse_while(),
            (TokenKind::Keyword, "do") => self.parse_do_while(),
            (TokenKind::Keyword, "for") => self.parse_for(),
            (TokenKind::Keyword, "switch") => self.parse_switch(),
            (TokenKind::Keyword, "try") => self.parse_try(),
            (TokenKind::Keyword, "return") => {
                self.advance();
                let value = if self.check(TokenKind::Punctuation, ";") {
                    None
                } else {
                    Some(self.parse_expr()?)
                };
                self.expect(TokenKind::Punctuation, ";")?;
                Ok(Stmt::new(StmtKind::Return(value)))
            }
            (TokenKind::Keyword, "break") => {
                self.advance();
                self.expect(TokenKind::Punctuation, ";")?;
                Ok(Stmt::new(StmtKind::Break))
            }
            (TokenKind::Keyword, "continue") => {
                self.advance();
                self.expect(TokenKind::Punctuation, ";")?;
                Ok(Stmt::new(StmtKind::Continue))
            }
            (TokenKind::Keyword, "int" | "long" | "double" | "boolean" | "String") => {
                let stmt = self.parse_var_decl()?;
                self.expect(TokenKind::Punctuation, ";")?;
                Ok(stmt)
            }
            (TokenKind::Keyword, "void") => Err(self.error_at(&t, "statement")),
            (TokenKind::Keyword, "new") => Err(self.unsupported(&t, "object allocation (new)")),
            (TokenKind::Identifier, _) => {
                let stmt = self.parse_simple_stmt()?;
                self.expect(TokenKind::Punctuation, ";")?;
                Ok(stmt)
            }
            (TokenKind::Punctuation, ";") => {
                // Empty statement: normalize to an empty block.
                self.advance();
                Ok(Stmt::new(StmtKind::Block(Block::new(Vec::new()))))
            }
            _ => Err(self.error_at(&t, "statement")),
        }
    }

    fn parse_var_decl(&mut self) -> Result<Stmt, SyntaxError> {
        let ty = self.parse_type("type")?;
        let name = self.advance();
        if name.kind != TokenKind::Identifier {
            return Err(self.error_at(&name, "variable name"));
        }
        let init = if self.eat(TokenKind::Operator, "=") { Some(self.parse_expr()?) } else { None };
        if self.check(TokenKind::Punctuation, ",") {
            let t = self.peek().clone();
            return Err(self.unsupported(&t, "multiple declarators in one statement"));
        }
        Ok(Stmt::new(StmtKind::VarDecl { ty, name: name.lexeme, init }))
    }

    /// Assignment, increment/decrement, or a call used as a statement.
    fn parse_simple_stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let name = self.advance();
        debug_assert_eq!(name.kind, TokenKind::Identifier);
        let next = self.peek().clone();
        match (next.kind, next.lexeme.as_str()) {
            (TokenKind::Operator, "=" | "+=" | "-=" | "*=" | "/=" | "%=") => {
                self.advance();
                let op = match next.lexeme.as_str() {
                    "=" => AssignOp::Set,
                    "+=" => AssignOp::Add,
                    "-=" => AssignOp::Sub,
                    "*=" => AssignOp::Mul,
                    "/=" => AssignOp::Div,
                    _ => AssignOp::Rem,
                };
                let value = self.parse_expr()?;
                Ok(Stmt::new(StmtKind::Assign(AssignStmt {
                    target: Expr::var(name.lexeme),
                    op,
                    value: Some(value),
                })))
            }
            (TokenKind::Operator, "++" | "--") => {
                self.advance();
                let op = if next.lexeme == "++" { AssignOp::Inc } else { AssignOp::Dec };
                Ok(Stmt::new(StmtKind::Assign(AssignStmt {
                    target: Expr::var(name.lexeme),
                    op,
                    value: None,
                })))
            }
            (TokenKind::Punctuation, "(") => {
                let call = self.parse_call_after_name(name)?;
                Ok(Stmt::new(StmtKind::ExprStmt(call)))
            }
            (TokenKind::Punctuation, ".") => Err(self.unsupported(&next, "qualified name or field access")),
            _ => Err(self.error_at(&next, "'=', '++', '--', or '('")),
        }
    }

    fn parse_body_as_block(&mut self) -> Result<Block, SyntaxError> {
        if self.check(TokenKind::Punctuation, "{") {
            self.parse_block()
        } else {
            let stmt = self.parse_stmt()?;
            Ok(Block::new(vec![stmt]))
        }
    }

    fn parse_if(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect(TokenKind::Keyword, "if")?;
        self.expect(TokenKind::Punctuation, "(")?;
        let cond = self.parse_expr()?;
        self.expect(TokenKind::Punctuation, ")")?;
        let then_branch = self.parse_body_as_block()?;
        let else_branch = if self.eat(TokenKind::Keyword, "else") {
            if self.check(TokenKind::Keyword, "if") {
                Some(Box::new(self.parse_if()?))
            } else {
                Some(Box::new(Stmt::new(StmtKind::Block(self.parse_body_as_block()?))))
            }
        } else {
            None
        };
        Ok(Stmt::new(StmtKind::If { cond, then_branch, else_branch }))
    }

    fn parse_while(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect(TokenKind::Keyword, "while")?;
        self.expect(TokenKind::Punctuation, "(")?;
        let cond = self.parse_expr()?;
        self.expect(TokenKind::Punctuation, ")")?;
        let body = self.parse_body_as_block()?;
        Ok(Stmt::new(StmtKind::While { cond, body }))
    }

    fn parse_do_while(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect(TokenKind::Keyword, "do")?;
        let body = self.parse_body_as_block()?;
        self.expect(TokenKind::Keyword, "while")?;
        self.expect(TokenKind::Punctuation, "(")?;
        let cond = self.parse_expr()?;
        self.expect(TokenKind::Punctuation, ")")?;
        self.expect(TokenKind::Punctuation, ";")?;
        Ok(Stmt::new(StmtKind::DoWhile { body, cond }))
    }

    fn parse_for(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect(TokenKind::Keyword, "for")?;
        self.expect(TokenKind::Punctuation, "(")?;
        let init = if self.check(TokenKind::Punctuation, ";") {
            None
        } else if self.peek().kind == TokenKind::Keyword
            && TypeName::from_keyword(&self.peek().lexeme).is_some()
        {
            Some(Box::new(self.parse_var_decl()?))
        } else {
            Some(Box::new(self.parse_simple_stmt()?))
        };
        if let Some(s) = &init {
            if matches!(s.kind, StmtKind::ExprStmt(_)) {
                let t = self.peek().clone();
                return Err(self.unsupported(&t, "call in for-init"));
            }
        }
        self.expect(TokenKind::Punctuation, ";")?;
        let cond =
            if self.check(TokenKind::Punctuation, ";") { None } else { Some(self.parse_expr()?) };
        self.expect(TokenKind::Punctuation, ";")?;
        let update = if self.check(TokenKind::Punctuation, ")") {
            None
        } else {
            let stmt = self.parse_simple_stmt()?;
            match stmt.kind {
                StmtKind::Assign(a) => Some(a),
                _ => {
                    let t = self.peek().clone();
                    return Err(self.unsupported(&t, "call in for-update"));
                }
            }
        };
        self.expect(TokenKind::Punctuation, ")")?;
        let body = self.parse_body_as_block()?;
        Ok(Stmt::new(StmtKind::For { init, cond, update, body }))
    }

    fn parse_switch(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect(TokenKind::Keyword, "switch")?;
        self.expect(TokenKind::Punctuation, "(")?;
        let scrutinee = self.parse_expr()?;
        self.expect(TokenKind::Punctuation, ")")?;
        self.expect(TokenKind::Punctuation, "{")?;
        let mut arms: Vec<CaseArm> = Vec::new();
        let mut seen_default = false;
        while !self.check(TokenKind::Punctuation, "}") {
            if self.at_end() {
                let t = self.peek().clone();
                return Err(self.error_at(&t, "'case', 'default', or '}'"));
            }
            let t = self.peek().clone();
            let label = if self.eat(TokenKind::Keyword, "case") {
                let label = self.parse_case_label()?;
                if arms.iter().any(|a| a.label == label) {
                    return Err(SyntaxError::Parse {
                        line: t.line,
                        col: t.col,
                        expected: "distinct case label".into(),
                        found: t.lexeme,
                    });
                }
                label
            } else if self.eat(TokenKind::Keyword, "default") {
                if seen_default {
                    return Err(SyntaxError::Parse {
                        line: t.line,
                        col: t.col,
                        expected: "at most one default clause".into(),
                        found: "default".into(),
                    });
                }
                seen_default = true;
                CaseLabel::Default
            } else {
                return Err(self.error_at(&t, "'case' or 'default'"));
            };
            self.expect(TokenKind::Operator, ":")?;
            let mut stmts = Vec::new();
            while !self.check(TokenKind::Punctuation, "}")
                && !self.check(TokenKind::Keyword, "case")
                && !self.check(TokenKind::Keyword, "default")
            {
                if self.at_end() {
                    let t = self.peek().clone();
                    return Err(self.error_at(&t, "'}'"));
                }
                stmts.push(self.parse_stmt()?);
            }
            arms.push(CaseArm { id: UNNUMBERED, label, stmts });
        }
        self.expect(TokenKind::Punctuation, "}")?;
        // Int and String labels must not mix.
        let has_int = arms.iter().any(|a| matches!(a.label, CaseLabel::Int(_)));
        let has_str = arms.iter().any(|a| matches!(a.label, CaseLabel::Str(_)));
        if has_int && has_str {
            let t = self.peek().clone();
            return Err(self.unsupported(&t, "mixed int and String case labels"));
        }
        Ok(Stmt::new(StmtKind::Switch { scrutinee, arms }))
    }

    fn parse_case_label(&mut self) -> Result<CaseLabel, SyntaxError> {
        let neg = self.eat(TokenKind::Operator, "-");
        let t = self.advance();
        if t.kind != TokenKind::Literal {
            return Err(self.error_at(&t, "literal case label"));
        }
        if t.lexeme.starts_with('"') {
            if neg {
                return Err(self.error_at(&t, "integer case label"));
            }
            return Ok(CaseLabel::Str(unescape_string(&t.lexeme)));
        }
        let value = parse_int_lexeme(&t)?;
        Ok(CaseLabel::Int(if neg { -value } else { value }))
    }

    fn parse_try(&mut self) -> Result<Stmt, SyntaxError> {
        self.expect(TokenKind::Keyword, "try")?;
        let body = self.parse_block()?;
        let catch = if self.eat(TokenKind::Keyword, "catch") {
            self.expect(TokenKind::Punctuation, "(")?;
            let ty = self.advance();
            if ty.kind != TokenKind::Identifier {
                return Err(self.error_at(&ty, "exception type"));
            }
            let name = self.advance();
            if name.kind != TokenKind::Identifier {
                return Err(self.error_at(&name, "exception variable"));
            }
            self.expect(TokenKind::Punctuation, ")")?;
            let cbody = self.parse_block()?;
            Some(CatchClause {
                exc_type: ty.lexeme,
                param: CatchParam { id: UNNUMBERED, name: name.lexeme },
                body: cbody,
            })
        } else {
            None
        };
        let finally =
            if self.eat(TokenKind::Keyword, "finally") { Some(self.parse_block()?) } else { None };
        if catch.is_none() && finally.is_none() {
            let t = self.peek().clone();
            return Err(self.error_at(&t, "'catch' or 'finally'"));
        }
        Ok(Stmt::new(StmtKind::Try { body, catch, finally }))
    }

    // ---- expressions (precedence climbing) ----

    fn parse_expr(&mut self) -> Result<Expr, SyntaxError> {
        self.parse_ternary()
    }

    fn parse_ternary(&mut self) -> Result<Expr, SyntaxError> {
        let cond = self.parse_or()?;
        if self.eat(TokenKind::Operator, "?") {
            let then_expr = self.parse_expr()?;
            self.expect(TokenKind::Operator, ":")?;
            let else_expr = self.parse_ternary()?;
            return Ok(Expr::new(ExprKind::Ternary {
                cond: Box::new(cond),
                then_expr: Box::new(then_expr),
                else_expr: Box::new(else_expr),
            }));
        }
        Ok(cond)
    }

    fn parse_or(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_and()?;
        while self.eat(TokenKind::Operator, "||") {
            let rhs = self.parse_and()?;
            lhs = binary(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_equality()?;
        while self.eat(TokenKind::Operator, "&&") {
            let rhs = self.parse_equality()?;
            lhs = binary(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_equality(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_relational()?;
        loop {
            let op = if self.eat(TokenKind::Operator, "==") {
                BinaryOp::Eq
            } else if self.eat(TokenKind::Operator, "!=") {
                BinaryOp::Ne
            } else {
                break;
            };
            let rhs = self.parse_relational()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_relational(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_additive()?;
        loop {
            let op = if self.eat(TokenKind::Operator, "<") {
                BinaryOp::Lt
            } else if self.eat(TokenKind::Operator, "<=") {
                BinaryOp::Le
            } else if self.eat(TokenKind::Operator, ">") {
                BinaryOp::Gt
            } else if self.eat(TokenKind::Operator, ">=") {
                BinaryOp::Ge
            } else {
                break;
            };
            let rhs = self.parse_additive()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_additive(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = if self.eat(TokenKind::Operator, "+") {
                BinaryOp::Add
            } else if self.eat(TokenKind::Operator, "-") {
                BinaryOp::Sub
            } else {
                break;
            };
            let rhs = self.parse_multiplicative()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_multiplicative(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = if self.eat(TokenKind::Operator, "*") {
                BinaryOp::Mul
            } else if self.eat(TokenKind::Operator, "/") {
                BinaryOp::Div
            } else if self.eat(TokenKind::Operator, "%") {
                BinaryOp::Rem
            } else {
                break;
            };
            let rhs = self.parse_unary()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat(TokenKind::Operator, "!") {
            let operand = self.parse_unary()?;
            return Ok(Expr::new(ExprKind::Unary { op: UnaryOp::Not, operand: Box::new(operand) }));
        }
        if self.eat(TokenKind::Operator, "-") {
            let operand = self.parse_unary()?;
            return Ok(Expr::new(ExprKind::Unary { op: UnaryOp::Neg, operand: Box::new(operand) }));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.advance();
        match (t.kind, t.lexeme.as_str()) {
            (TokenKind::Punctuation, "(") => {
                let inner = self.parse_expr()?;
                self.expect(TokenKind::Punctuation, ")")?;
                Ok(inner)
            }
            (TokenKind::Keyword, "true") => Ok(Expr::new(ExprKind::BoolLit(true))),
            (TokenKind::Keyword, "false") => Ok(Expr::new(ExprKind::BoolLit(false))),
            (TokenKind::Keyword, "null") => Ok(Expr::new(ExprKind::Null)),
            (TokenKind::Keyword, "new") => Err(self.unsupported(&t, "object allocation (new)")),
            (TokenKind::Literal, _) => {
                if t.lexeme.starts_with('"') {
                    Ok(Expr::new(ExprKind::StringLit(unescape_string(&t.lexeme))))
                } else if t.lexeme.contains(['.', 'e', 'E'])
                    && !t.lexeme.starts_with("0x")
                    && !t.lexeme.starts_with("0X")
                    || t.lexeme.ends_with(['d', 'D'])
                {
                    let text = t.lexeme.trim_end_matches(['d', 'D']);
                    let value: f64 = text.parse().map_err(|_| SyntaxError::Lex {
                        line: t.line,
                        col: t.col,
                        message: format!("malformed double literal: {}", t.lexeme),
                    })?;
                    Ok(Expr::new(ExprKind::DoubleLit(value)))
                } else if t.lexeme.ends_with(['l', 'L']) {
                    let value = parse_int_lexeme(&Token {
                        lexeme: t.lexeme[..t.lexeme.len() - 1].to_string(),
                        ..t.clone()
                    })?;
                    Ok(Expr::new(ExprKind::LongLit(value)))
                } else {
                    Ok(Expr::new(ExprKind::IntLit(parse_int_lexeme(&t)?)))
                }
            }
            (TokenKind::Identifier, _) => {
                if self.check(TokenKind::Punctuation, "(") {
                    self.parse_call_after_name(t)
                } else if self.check(TokenKind::Punctuation, ".") {
                    let dot = self.peek().clone();
                    Err(self.unsupported(&dot, "qualified name or field access"))
                } else {
                    Ok(Expr::var(t.lexeme))
                }
            }
            _ => Err(self.error_at(&t, "expression")),
        }
    }

    fn parse_call_after_name(&mut self, name: Token) -> Result<Expr, SyntaxError> {
        self.expect(TokenKind::Punctuation, "(")?;
        let mut args = Vec::new();
        if !self.check(TokenKind::Punctuation, ")") {
            loop {
                args.push(self.parse_expr()?);
                if !self.eat(TokenKind::Punctuation, ",") {
                    break;
                }
            }
        }
        self.expect(TokenKind::Punctuation, ")")?;
        Ok(Expr::new(ExprKind::Call { name: name.lexeme, args }))
    }
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
}

fn parse_int_lexeme(t: &Token) -> Result<i64, SyntaxError> {
    let text = &t.lexeme;
    let parsed = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        i64::from_str_radix(hex.trim_end_matches(['l', 'L']), 16).ok()
    } else {
        text.trim_end_matches(['l', 'L']).parse::<i64>().ok()
    };
    parsed.ok_or_else(|| SyntaxError::Lex {
        line: t.line,
        col: t.col,
        message: format!("integer literal out of range: {text}"),
    })
}
