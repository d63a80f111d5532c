//! Finds host binds and candidate PL/SQL identifiers inside raw SQL text.

use super::ast::{Ident, SqlRef, SqlRefTarget};
use super::error::ParseError;
use super::lexer::{Tok, Token};
use super::parser::make_bind;
use super::ParseOptions;

const SQL_KEYWORDS: &[&str] = &[
    "ALL", "AND", "ANY", "AS", "ASC", "BETWEEN", "BY", "CASE", "CONNECT", "CROSS", "DELETE", "DESC",
    "DISTINCT", "ELSE", "END", "ESCAPE", "EXISTS", "FALSE", "FIRST", "FOR", "FROM", "FULL", "GROUP",
    "HAVING", "IN", "INNER", "INSERT", "INTERSECT", "INTO", "IS", "JOIN", "LAST", "LEFT", "LEVEL",
    "LIKE", "MINUS", "NOT", "NULL", "NULLS", "ON", "OR", "ORDER", "OUTER", "PRIOR", "RIGHT", "ROWID",
    "ROWNUM", "SELECT", "SET", "SOME", "START", "SYSDATE", "TABLE", "THEN", "TRUE", "UNION", "UPDATE",
    "USER", "USING", "VALUES", "WHEN", "WHERE", "WITH",
];

/// Keywords that close a FROM clause.
const FROM_END: &[&str] = &["WHERE", "GROUP", "ORDER", "HAVING", "UNION", "MINUS", "INTERSECT", "CONNECT", "START"];

/// Keywords whose next identifier names a table or alias.
const NAME_INTRODUCERS: &[&str] = &["INTO", "UPDATE", "JOIN", "TABLE", "AS"];

fn is_keyword(word: &str) -> bool {
    SQL_KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
}

/// Scans the tokens of one SQL fragment. `base` is the byte offset of the
/// fragment's first character. With `values == false` only host binds are
/// collected (select lists resolve names as columns first).
pub(crate) fn scan_refs(
    toks: &[Token],
    base: usize,
    opts: &ParseOptions,
    values: bool,
) -> Result<Vec<SqlRef>, ParseError> {
    let mut refs = Vec::new();
    // Paren depth at which the current FROM clause started.
    let mut from_depth: Option<i32> = None;
    let mut in_set = false;
    let mut column_list_depth: Option<i32> = None;
    let mut depth = 0i32;
    let mut i = 0;
    while i < toks.len() {
        let t = &toks[i];
        let prev = if i > 0 { Some(&toks[i - 1].tok) } else { None };
        let next = toks.get(i + 1).map(|t| &t.tok);
        match &t.tok {
            Tok::LParen => {
                // `INSERT INTO t (cols...)`
                if column_list_depth.is_none()
                    && i >= 2
                    && matches!(toks[i - 1].tok, Tok::Ident(_))
                    && toks[..i].iter().any(|t| t.tok.is_kw("INSERT"))
                    && !toks[..i].iter().any(|t| t.tok.is_kw("VALUES") || t.tok.is_kw("SELECT"))
                {
                    column_list_depth = Some(depth);
                }
                depth += 1;
            }
            Tok::RParen => {
                depth -= 1;
                if column_list_depth == Some(depth) {
                    column_list_depth = None;
                }
                if let Some(d) = from_depth {
                    if depth < d {
                        from_depth = None;
                    }
                }
            }
            Tok::Colon => {
                let Some(Tok::Ident(first)) = next else {
                    return Err(ParseError::syntax(t.span.line, t.span.col, "expected bind variable name after `:`"));
                };
                let first = Ident {
                    name: first.clone(),
                    span: toks[i + 1].span,
                };
                let mut end = i + 1;
                let second = match (toks.get(i + 2), toks.get(i + 3)) {
                    (Some(dot), Some(item)) if dot.tok == Tok::Dot => match &item.tok {
                        Tok::Ident(name) => {
                            end = i + 3;
                            Some(Ident {
                                name: name.clone(),
                                span: item.span,
                            })
                        }
                        _ => None,
                    },
                    _ => None,
                };
                let bind = make_bind(opts, t.span, first, second)?;
                refs.push(SqlRef {
                    offset: t.span.start - base,
                    len: toks[end].span.end - t.span.start,
                    target: SqlRefTarget::Bind(bind),
                });
                i = end + 1;
                continue;
            }
            Tok::Ident(word) => {
                let upper = word.to_uppercase();
                if upper == "FROM" {
                    from_depth = Some(depth);
                    in_set = false;
                } else if FROM_END.contains(&upper.as_str()) {
                    if from_depth == Some(depth) {
                        from_depth = None;
                    }
                    in_set = false;
                } else if upper == "SET" {
                    in_set = true;
                }
                let candidate = values
                    && !is_keyword(word)
                    && from_depth.is_none()
                    && column_list_depth.is_none()
                    && prev != Some(&Tok::Dot)
                    && prev != Some(&Tok::Colon)
                    && !matches!(next, Some(Tok::Dot) | Some(Tok::LParen))
                    && !matches!(prev, Some(p) if NAME_INTRODUCERS.iter().any(|k| p.is_kw(k)))
                    && !(in_set && next == Some(&Tok::Eq) && matches!(prev, Some(Tok::Comma)) || in_set && prev.is_some_and(|p| p.is_kw("SET")));
                if candidate {
                    refs.push(SqlRef {
                        offset: t.span.start - base,
                        len: t.span.end - t.span.start,
                        target: SqlRefTarget::Ident(Ident {
                            name: word.clone(),
                            span: t.span,
                        }),
                    });
                }
            }
            _ => {}
        }
        i += 1;
    }
    Ok(refs)
}
