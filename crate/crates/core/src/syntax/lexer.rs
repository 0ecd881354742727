//! Hand-rolled lexer for the subset.
//!
//! Comments (`//` and `/* */`) are dropped. Never panics on arbitrary input:
//! every failure is a positioned `LexError`.

use super::error::SyntaxError;
use super::token::{is_keyword, Token, TokenKind};

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

/// Tokenizes `source`, dropping whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer { src: source.as_bytes(), pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia()?;
        if lx.at_end() {
            return Ok(out);
        }
        out.push(lx.next_token()?);
    }
}

impl<'a> Lexer<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> u8 {
        self.src[self.pos]
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn err(&self, line: u32, col: u32, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Lex { line, col, message: message.into() }
    }

    fn skip_trivia(&mut self) -> Result<(), SyntaxError> {
        loop {
            if self.at_end() {
                return Ok(());
            }
            match self.peek() {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'/' if self.peek2() == Some(b'/') => {
                    while !self.at_end() && self.peek() != b'\n' {
                        self.bump();
                    }
                }
                b'/' if self.peek2() == Some(b'*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        if self.at_end() {
                            return Err(self.err(line, col, "unterminated block comment"));
                        }
                        if self.peek() == b'*' && self.peek2() == Some(b'/') {
                            self.bump();
                            self.bump();
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, SyntaxError> {
        let (line, col) = (self.line, self.col);
        let b = self.peek();
        if b.is_ascii_alphabetic() || b == b'_' || b == b'$' {
            return Ok(self.lex_word(line, col));
        }
        if b.is_ascii_digit() {
            return self.lex_number(line, col);
        }
        if b == b'.' && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            return self.lex_number(line, col);
        }
        if b == b'"' {
            return self.lex_string(line, col);
        }
        self.lex_symbol(line, col)
    }

    fn lex_word(&mut self, line: u32, col: u32) -> Token {
        let start = self.pos;
        while !self.at_end() {
            let b = self.peek();
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'$' {
                self.bump();
            } else {
                break;
            }
        }
        let lexeme = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        let kind = if is_keyword(&lexeme) { TokenKind::Keyword } else { TokenKind::Identifier };
        Token { kind, lexeme, line, col }
    }

    fn lex_number(&mut self, line: u32, col: u32) -> Result<Token, SyntaxError> {
        let start = self.pos;
        // Hex form: 0x... with optional L suffix.
        if self.peek() == b'0' && matches!(self.peek2(), Some(b'x') | Some(b'X')) {
            self.bump();
            self.bump();
            let digits_start = self.pos;
            while !self.at_end() && self.peek().is_ascii_hexdigit() {
                self.bump();
            }
            if self.pos == digits_start {
                return Err(self.err(line, col, "malformed hex literal"));
            }
            if !self.at_end() && matches!(self.peek(), b'l' | b'L') {
                self.bump();
            }
            let lexeme = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            self.check_literal_boundary(line, col)?;
            return Ok(Token { kind: TokenKind::Literal, lexeme, line, col });
        }

        let mut is_double = self.peek() == b'.';
        while !self.at_end() && self.peek().is_ascii_digit() {
            self.bump();
        }
        if !self.at_end() && self.peek() == b'.' && !is_double {
            is_double = true;
            self.bump();
            while !self.at_end() && self.peek().is_ascii_digit() {
                self.bump();
            }
        } else if is_double {
            // Leading-dot form: consume the dot then the fraction digits.
            self.bump();
            while !self.at_end() && self.peek().is_ascii_digit() {
                self.bump();
            }
        }
        if !self.at_end() && matches!(self.peek(), b'e' | b'E') {
            is_double = true;
            self.bump();
            if !self.at_end() && matches!(self.peek(), b'+' | b'-') {
                self.bump();
            }
            let exp_start = self.pos;
            while !self.at_end() && self.peek().is_ascii_digit() {
                self.bump();
            }
            if self.pos == exp_start {
                return Err(self.err(line, col, "malformed exponent in numeric literal"));
            }
        }
        if !self.at_end() {
            match self.peek() {
                b'l' | b'L' if !is_double => {
                    self.bump();
                }
                b'd' | b'D' => {
                    self.bump();
                    is_double = true;
                }
                b'f' | b'F' => {
                    return Err(self.err(line, col, "float literals are not supported"));
                }
                _ => {}
            }
        }
        let lexeme = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        // Range-check integers now so later phases never overflow.
        if !is_double && !lexeme.ends_with(['l', 'L']) && lexeme.parse::<i64>().is_err() {
            return Err(self.err(line, col, format!("integer literal out of range: {lexeme}")));
        }
        self.check_literal_boundary(line, col)?;
        Ok(Token { kind: TokenKind::Literal, lexeme, line, col })
    }

    fn check_literal_boundary(&self, line: u32, col: u32) -> Result<(), SyntaxError> {
        if !self.at_end() {
            let b = self.peek();
            if b.is_ascii_alphanumeric() || b == b'_' {
                return Err(self.err(line, col, "malformed numeric literal"));
            }
        }
        Ok(())
    }

    fn lex_string(&mut self, line: u32, col: u32) -> Result<Token, SyntaxError> {
        let start = self.pos;
        self.bump(); // opening quote
        loop {
            if self.at_end() {
                return Err(self.err(line, col, "unterminated string literal"));
            }
            match self.peek() {
                b'"' => {
                    self.bump();
                    break;
                }
                b'\n' => return Err(self.err(line, col, "unterminated string literal")),
                b'\\' => {
                    self.bump();
                    if self.at_end() {
                        return Err(self.err(line, col, "unterminated string literal"));
                    }
                    let esc = self.peek();
                    if !matches!(esc, b'n' | b't' | b'r' | b'b' | b'f' | b'\\' | b'"' | b'\'') {
                        let (l, c) = (self.line, self.col);
                        return Err(self.err(l, c, format!("unsupported escape '\\{}'", esc as char)));
                    }
                    self.bump();
                }
                _ => {
                    self.bump();
                }
            }
        }
        let lexeme = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        Ok(Token { kind: TokenKind::Literal, lexeme, line, col })
    }

    fn lex_symbol(&mut self, line: u32, col: u32) -> Result<Token, SyntaxError> {
        let b = self.bump();
        let two = |lx: &mut Self, second: u8, short: &str, long: &str| -> String {
            if !lx.at_end() && lx.peek() == second {
                lx.bump();
                long.to_string()
            } else {
                short.to_string()
            }
        };
        let (kind, lexeme) = match b {
            b'+' => {
                let lx = if !self.at_end() && self.peek() == b'+' {
                    self.bump();
                    "++".to_string()
                } else {
                    two(self, b'=', "+", "+=")
                };
                (TokenKind::Operator, lx)
            }
            b'-' => {
                let lx = if !self.at_end() && self.peek() == b'-' {
                    self.bump();
                    "--".to_string()
                } else {
                    two(self, b'=', "-", "-=")
                };
                (TokenKind::Operator, lx)
            }
            b'*' => (TokenKind::Operator, two(self, b'=', "*", "*=")),
            b'/' => (TokenKind::Operator, two(self, b'=', "/", "/=")),
            b'%' => (TokenKind::Operator, two(self, b'=', "%", "%=")),
            b'=' => (TokenKind::Operator, two(self, b'=', "=", "==")),
            b'!' => (TokenKind::Operator, two(self, b'=', "!", "!=")),
            b'<' => (TokenKind::Operator, two(self, b'=', "<", "<=")),
            b'>' => (TokenKind::Operator, two(self, b'=', ">", ">=")),
            b'&' => {
                if !self.at_end() && self.peek() == b'&' {
                    self.bump();
                    (TokenKind::Operator, "&&".to_string())
                } else {
                    return Err(self.err(line, col, "bitwise '&' is not supported"));
                }
            }
            b'|' => {
                if !self.at_end() && self.peek() == b'|' {
                    self.bump();
                    (TokenKind::Operator, "||".to_string())
                } else {
                    return Err(self.err(line, col, "bitwise '|' is not supported"));
                }
            }
            b'?' => (TokenKind::Operator, "?".to_string()),
            b':' => (TokenKind::Operator, ":".to_string()),
            b'(' | b')' | b'{' | b'}' | b';' | b',' | b'.' | b'@' | b'[' | b']' => {
                (TokenKind::Punctuation, (b as char).to_string())
            }
            other => {
                return Err(self.err(
                    line,
                    col,
                    format!("unrecognized character '{}'", other as char),
                ));
            }
        };
        Ok(Token { kind, lexeme, line, col })
    }
}

/// Decodes the value of a string literal lexeme (including its quotes).
pub fn unescape_string(lexeme: &str) -> String {
    let inner = &lexeme[1..lexeme.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some('r') => out.push('\r'),
                Some('b') => out.push('\u{8}'),
                Some('f') => out.push('\u{c}'),
                Some('\\') => out.push('\\'),
                Some('"') => out.push('"'),
                Some('\'') => out.push('\''),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_token_return() {
        let toks = tokenize("return a;").unwrap();
        assert_eq!(toks.len(), 3);
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert_eq!(toks[0].lexeme, "return");
        assert_eq!(toks[1].kind, TokenKind::Identifier);
        assert_eq!(toks[2].kind, TokenKind::Punctuation);
        assert_eq!(toks[2].lexeme, ";");
    }

    #[test]
    fn empty_input_yields_no_tokens() {
        assert!(tokenize("").unwrap().is_empty());
    }

    #[test]
    fn malformed_hex_literal_is_a_lex_error() {
        let err = tokenize("int x = 0x;").unwrap_err();
        match err {
            SyntaxError::Lex { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, 9);
            }
            other => panic!("expected lex error, got {other:?}"),
        }
    }

    #[test]
    fn comments_are_dropped() {
        let toks = tokenize("// hi\nint /* mid */ x;").unwrap();
        let lexemes: Vec<_> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(lexemes, ["int", "x", ";"]);
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("a\n  b").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (1, 1));
        assert_eq!((toks[1].line, toks[1].col), (2, 3));
    }

    #[test]
    fn operators_lex_greedily() {
        let toks = tokenize("i++ <= >= != && ||").unwrap();
        let lexemes: Vec<_> = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(lexemes, ["i", "++", "<=", ">=", "!=", "&&", "||"]);
    }

    #[test]
    fn string_escapes_round_trip() {
        let toks = tokenize(r#""a\nb\"c""#).unwrap();
        assert_eq!(unescape_string(&toks[0].lexeme), "a\nb\"c");
    }

    #[test]
    fn never_panics_on_arbitrary_bytes() {
        for s in ["#", "€", "int x = 9999999999999999999999;", "\"open", "'c'"] {
            let _ = tokenize(s);
        }
    }

    #[test]
    fn out_of_range_integer_rejected() {
        assert!(tokenize("9223372036854775807").is_ok());
        assert!(tokenize("9223372036854775808").is_err());
    }
}
