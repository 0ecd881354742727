//! Tokens produced by the lexer.

use std::fmt;

/// Reserved words of the subset. `String` is treated as a type keyword.
pub const KEYWORDS: &[&str] = &[
    "int", "long", "double", "boolean", "String", "void", "if", "else", "while", "do", "for",
    "switch", "case", "default", "break", "continue", "return", "true", "false", "null", "try",
    "catch", "finally", "new",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Literal,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based source line.
    pub line: u32,
    /// 1-based source column.
    pub col: u32,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}'", self.lexeme)
    }
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}
