//! Form-descriptor and PL/SQL frontend.

pub mod ast;
mod descriptor;
mod error;
pub mod lexer;
mod parser;
mod sql;

pub use descriptor::visit_expr_binds;
pub use error::ParseError;

use ast::{FormBundle, PlSqlBlock};
use lexer::LineIndex;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Block used to complete unqualified binds such as `:COMPANY`.
    pub default_block: Option<String>,
}

/// Parses a complete form descriptor. Spans index into `text`.
pub fn parse_form(text: &str) -> Result<FormBundle, ParseError> {
    let form = descriptor::parse_form(text)?;
    descriptor::check_binds(&form)?;
    Ok(form)
}

/// Parses a `BEGIN ... END;` block or a bare statement list.
pub fn parse_plsql(source: &str) -> Result<PlSqlBlock, ParseError> {
    parse_plsql_with(source, &ParseOptions::default())
}

pub fn parse_plsql_with(source: &str, opts: &ParseOptions) -> Result<PlSqlBlock, ParseError> {
    let index = LineIndex::new(source);
    let mut parser = parser::Parser::new(source, &index, 0, source.len(), opts)?;
    parser.parse_top_block()
}
