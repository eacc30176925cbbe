//! The SQL surface: lexer, parser, canonical printer and validator.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod plan;
pub mod validate;

pub use ast::{EmitSpec, Query};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_query, parse_sql};
pub use plan::{BoundQuery, LogicalPlan, PlanOp};
pub use validate::validate;
