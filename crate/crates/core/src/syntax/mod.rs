//! Front end for the supported Java-method subset: lexer, recursive-descent
//! parser, and deterministic canonical printer.
//!
//! All operations are pure functions of their inputs and are safe to call
//! from many threads.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod token;

pub use ast::{
    AssignOp, AssignStmt, Block, CaseArm, CaseLabel, CatchClause, CatchParam, Expr, ExprKind,
    MethodAst, NodeId, Param, Stmt, StmtKind, TypeName, UnaryOp, BinaryOp,
};
pub use error::{Diagnostic, SyntaxError};
pub use lexer::tokenize;
pub use parser::{extract_methods, parse_method, ExtractOutcome};
pub use printer::{expr_to_string, print_method};
