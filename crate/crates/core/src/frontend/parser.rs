//! Recursive-descent parser for the PL/SQL subset.

use std::collections::BTreeSet;

use super::ast::*;
use super::error::ParseError;
use super::lexer::{tokenize, LineIndex, Tok, Token};
use super::sql;
use super::ParseOptions;

/// Constructs rejected by name rather than with a generic syntax error.
const UNSUPPORTED_STATEMENTS: &[(&str, &str)] = &[
    ("NULL", "NULL statement"),
    ("OPEN", "cursor OPEN"),
    ("FETCH", "cursor FETCH"),
    ("CLOSE", "cursor CLOSE"),
    ("GOTO", "GOTO"),
    ("EXECUTE", "EXECUTE IMMEDIATE"),
    ("MERGE", "MERGE"),
    ("FORALL", "FORALL"),
    ("PIPE", "PIPE ROW"),
    ("SAVEPOINT", "SAVEPOINT"),
    ("ROLLBACK", "ROLLBACK"),
];

const RESERVED: &[&str] = &[
    "BEGIN", "END", "IF", "THEN", "ELSE", "ELSIF", "CASE", "WHEN", "LOOP", "WHILE", "FOR", "EXIT",
    "RETURN", "RAISE", "SELECT", "INSERT", "UPDATE", "DELETE", "DECLARE", "EXCEPTION", "AND", "OR",
    "NOT", "NULL", "TRUE", "FALSE", "IS", "IN", "INTO", "FROM", "OTHERS",
];

pub(crate) struct Parser<'t> {
    text: &'t str,
    index: &'t LineIndex<'t>,
    toks: Vec<Token>,
    pos: usize,
    opts: &'t ParseOptions,
}

type PResult<T> = Result<T, ParseError>;

impl<'t> Parser<'t> {
    pub(crate) fn new(
        text: &'t str,
        index: &'t LineIndex<'t>,
        start: usize,
        end: usize,
        opts: &'t ParseOptions,
    ) -> PResult<Self> {
        let toks = tokenize(index, text, start, end, false)?;
        Ok(Parser {
            text,
            index,
            toks,
            pos: 0,
            opts,
        })
    }

    // ---- token helpers ----

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().tok.is_kw(kw)
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::syntax(
            t.span.line,
            t.span.col,
            format!("expected {expected}, found {}", t.tok.describe()),
        )
    }

    fn unsupported_here(&self, construct: &str) -> ParseError {
        let t = self.peek();
        ParseError::unsupported(t.span.line, t.span.col, construct)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            Err(self.error_here(kw))
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            let what = match &tok {
                Tok::Semi => "`;`".to_string(),
                other => other.describe(),
            };
            Err(self.error_here(&what))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Ident> {
        match &self.peek().tok {
            Tok::Ident(name) if !RESERVED.iter().any(|r| r.eq_ignore_ascii_case(name)) => {
                let t = self.bump();
                let Tok::Ident(name) = t.tok else { unreachable!() };
                Ok(Ident { name, span: t.span })
            }
            _ => Err(self.error_here(what)),
        }
    }

    pub(crate) fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error_here("end of input"))
        }
    }

    // ---- blocks ----

    /// `[DECLARE ...] BEGIN ... END;` or a bare statement list.
    pub(crate) fn parse_top_block(&mut self) -> PResult<PlSqlBlock> {
        if self.at_kw("DECLARE") || self.at_kw("BEGIN") {
            let first = self.peek().span;
            let block = self.parse_block(true)?;
            if self.at_eof() {
                return Ok(block);
            }
            // Block followed by more statements: treat everything as a list.
            self.pos = 0;
            let _ = first;
        }
        let start = self.peek().span;
        let statements = self.parse_statements(&[])?;
        self.expect_eof()?;
        let span = match statements.last() {
            Some(last) => statements[0].span.to(last.span),
            None => start,
        };
        Ok(PlSqlBlock {
            declarations: Vec::new(),
            statements,
            handlers: Vec::new(),
            span,
        })
    }

    /// Parses `[DECLARE decls] BEGIN stmts [EXCEPTION handlers] END [label] ;`.
    fn parse_block(&mut self, semicolon: bool) -> PResult<PlSqlBlock> {
        let start = self.peek().span;
        let declarations = if self.eat_kw("DECLARE") {
            self.parse_declarations()?
        } else {
            Vec::new()
        };
        self.parse_block_rest(start, declarations, semicolon)
    }

    fn parse_block_rest(&mut self, start: Span, declarations: Vec<Declaration>, semicolon: bool) -> PResult<PlSqlBlock> {
        self.expect_kw("BEGIN")?;
        let statements = self.parse_statements(&["END", "EXCEPTION"])?;
        let mut handlers = Vec::new();
        if self.eat_kw("EXCEPTION") {
            while self.at_kw("WHEN") {
                handlers.push(self.parse_handler()?);
            }
            if handlers.is_empty() {
                return Err(self.error_here("WHEN"));
            }
        }
        self.expect_kw("END")?;
        if let Tok::Ident(_) = self.peek().tok {
            if !self.at_kw("IF") && !self.at_kw("LOOP") && !self.at_kw("CASE") {
                self.bump();
            }
        }
        if semicolon || self.peek().tok == Tok::Semi {
            self.expect(Tok::Semi)?;
        }
        Ok(PlSqlBlock {
            declarations,
            statements,
            handlers,
            span: start.to(self.prev_span()),
        })
    }

    fn parse_declarations(&mut self) -> PResult<Vec<Declaration>> {
        let mut decls: Vec<Declaration> = Vec::new();
        let mut seen = BTreeSet::new();
        while !self.at_kw("BEGIN") && !self.at_eof() {
            if self.at_kw("CURSOR") {
                return Err(self.unsupported_here("cursor declaration"));
            }
            if self.at_kw("TYPE") || self.at_kw("SUBTYPE") {
                return Err(self.unsupported_here("type declaration"));
            }
            if self.at_kw("PROCEDURE") || self.at_kw("FUNCTION") {
                return Err(self.unsupported_here("nested subprogram"));
            }
            if self.at_kw("PRAGMA") {
                return Err(self.unsupported_here("PRAGMA"));
            }
            let name = self.expect_ident("declaration name")?;
            let constant = self.eat_kw("CONSTANT");
            let ty = self.parse_type()?;
            if self.at_kw("NOT") {
                self.bump();
                self.expect_kw("NULL")?;
            }
            let init = if self.eat(&Tok::Assign) || self.eat_kw("DEFAULT") {
                Some(self.parse_expr()?)
            } else {
                None
            };
            self.expect(Tok::Semi)?;
            if !seen.insert(name.key()) {
                return Err(ParseError::Duplicate {
                    line: name.span.line,
                    col: name.span.col,
                    what: "variable",
                    name: name.name.clone(),
                });
            }
            let span = name.span.to(self.prev_span());
            decls.push(Declaration {
                name,
                ty,
                constant,
                init,
                span,
            });
        }
        Ok(decls)
    }

    fn parse_type(&mut self) -> PResult<PlsqlType> {
        let t = self.peek().clone();
        let Tok::Ident(word) = &t.tok else {
            return Err(self.error_here("type name"));
        };
        if word.eq_ignore_ascii_case("EXCEPTION") {
            return Err(self.unsupported_here("exception declaration"));
        }
        let Some(ty) = PlsqlType::parse(word) else {
            if *self.peek_at(1) == Tok::Percent {
                return Err(self.unsupported_here("%TYPE / %ROWTYPE attribute"));
            }
            return Err(ParseError::unsupported(t.span.line, t.span.col, format!("type `{word}`")));
        };
        self.bump();
        if self.peek().tok == Tok::Percent {
            return Err(self.unsupported_here("%TYPE / %ROWTYPE attribute"));
        }
        if self.eat(&Tok::LParen) {
            loop {
                match self.peek().tok {
                    Tok::Number(_) => {
                        self.bump();
                    }
                    _ => return Err(self.error_here("size")),
                }
                if self.at_kw("CHAR") || self.at_kw("BYTE") {
                    self.bump();
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        Ok(ty)
    }

    fn parse_handler(&mut self) -> PResult<ExceptionHandler> {
        let start = self.expect_kw("WHEN")?.span;
        let mut exceptions = Vec::new();
        loop {
            if self.eat_kw("OTHERS") {
                exceptions.push(ExceptionName::Others);
            } else {
                exceptions.push(ExceptionName::Named(self.parse_dotted_name("exception name")?));
            }
            if !self.eat_kw("OR") {
                break;
            }
        }
        let then = self.expect_kw("THEN")?.span;
        let statements = self.parse_statements(&["WHEN", "END"])?;
        let end = statements.last().map(|s| s.span).unwrap_or(then);
        Ok(ExceptionHandler {
            exceptions,
            statements,
            span: start.to(end),
        })
    }

    // ---- statements ----

    fn parse_statements(&mut self, stop: &[&str]) -> PResult<Vec<Statement>> {
        let mut out = Vec::new();
        loop {
            if self.at_eof() || stop.iter().any(|kw| self.at_kw(kw)) {
                return Ok(out);
            }
            out.push(self.parse_statement()?);
        }
    }

    fn parse_statement(&mut self) -> PResult<Statement> {
        let start = self.peek().span;
        let kind = match self.peek().tok.clone() {
            Tok::LabelOpen => return Err(self.unsupported_here("label")),
            Tok::Colon => {
                let target = AssignTarget::Bind(self.parse_bind()?);
                self.expect(Tok::Assign)?;
                let value = self.parse_expr()?;
                self.expect(Tok::Semi)?;
                StatementKind::Assign { target, value }
            }
            Tok::Ident(word) => {
                let upper = word.to_uppercase();
                if let Some((_, what)) = UNSUPPORTED_STATEMENTS.iter().find(|(kw, _)| *kw == upper) {
                    // `NULL` and friends are only unsupported in statement position.
                    return Err(self.unsupported_here(what));
                }
                match upper.as_str() {
                    "IF" => self.parse_if()?,
                    "CASE" => self.parse_case()?,
                    "WHILE" => {
                        self.bump();
                        let cond = self.parse_expr()?;
                        let body = self.parse_loop_body()?;
                        StatementKind::While { cond, body }
                    }
                    "FOR" => self.parse_for()?,
                    "LOOP" => {
                        let body = self.parse_loop_body()?;
                        StatementKind::BasicLoop { body }
                    }
                    "EXIT" => {
                        self.bump();
                        let when = if self.eat_kw("WHEN") { Some(self.parse_expr()?) } else { None };
                        if let Tok::Ident(_) = self.peek().tok {
                            return Err(self.unsupported_here("EXIT with label"));
                        }
                        self.expect(Tok::Semi)?;
                        StatementKind::Exit { when }
                    }
                    "CONTINUE" => return Err(self.unsupported_here("CONTINUE")),
                    "RETURN" => {
                        self.bump();
                        let value = if self.peek().tok == Tok::Semi { None } else { Some(self.parse_expr()?) };
                        self.expect(Tok::Semi)?;
                        StatementKind::Return { value }
                    }
                    "RAISE" => {
                        self.bump();
                        if self.peek().tok == Tok::Semi {
                            return Err(ParseError::unsupported(start.line, start.col, "re-raise without exception name"));
                        }
                        let exception = self.parse_dotted_name("exception name")?;
                        self.expect(Tok::Semi)?;
                        StatementKind::Raise { exception }
                    }
                    "SELECT" => self.parse_select()?,
                    "INSERT" => self.parse_dml(DmlKind::Insert)?,
                    "UPDATE" => self.parse_dml(DmlKind::Update)?,
                    "DELETE" => self.parse_dml(DmlKind::Delete)?,
                    "BEGIN" | "DECLARE" => StatementKind::InnerBlock(self.parse_block(true)?),
                    "WITH" => return Err(self.unsupported_here("WITH query")),
                    _ => self.parse_assign_or_call()?,
                }
            }
            _ => return Err(self.error_here("statement")),
        };
        Ok(Statement {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn parse_loop_body(&mut self) -> PResult<Vec<Statement>> {
        self.expect_kw("LOOP")?;
        let body = self.parse_statements(&["END"])?;
        self.expect_kw("END")?;
        self.expect_kw("LOOP")?;
        if let Tok::Ident(_) = self.peek().tok {
            return Err(self.unsupported_here("loop label"));
        }
        self.expect(Tok::Semi)?;
        Ok(body)
    }

    fn parse_if(&mut self) -> PResult<StatementKind> {
        let mut branches = Vec::new();
        let mut else_branch = None;
        let mut kw_span = self.expect_kw("IF")?.span;
        loop {
            let cond = self.parse_expr()?;
            let then = self.expect_kw("THEN")?.span;
            let statements = self.parse_statements(&["ELSIF", "ELSE", "END"])?;
            let end = statements.last().map(|s| s.span).unwrap_or(then);
            branches.push(CondBranch {
                cond,
                statements,
                span: kw_span.to(end),
            });
            if self.at_kw("ELSIF") {
                kw_span = self.bump().span;
                continue;
            }
            if self.at_kw("ELSE") {
                let else_kw = self.bump().span;
                let statements = self.parse_statements(&["END"])?;
                let end = statements.last().map(|s| s.span).unwrap_or(else_kw);
                else_branch = Some(ElseBranch {
                    statements,
                    span: else_kw.to(end),
                });
            }
            break;
        }
        self.expect_kw("END")?;
        self.expect_kw("IF")?;
        self.expect(Tok::Semi)?;
        Ok(StatementKind::If { branches, else_branch })
    }

    fn parse_case(&mut self) -> PResult<StatementKind> {
        self.expect_kw("CASE")?;
        let selector = if self.at_kw("WHEN") { None } else { Some(self.parse_expr()?) };
        let mut whens = Vec::new();
        while self.at_kw("WHEN") {
            let kw = self.bump().span;
            let cond = self.parse_expr()?;
            let then = self.expect_kw("THEN")?.span;
            let statements = self.parse_statements(&["WHEN", "ELSE", "END"])?;
            let end = statements.last().map(|s| s.span).unwrap_or(then);
            whens.push(CondBranch {
                cond,
                statements,
                span: kw.to(end),
            });
        }
        if whens.is_empty() {
            return Err(self.error_here("WHEN"));
        }
        let else_branch = if self.at_kw("ELSE") {
            let kw = self.bump().span;
            let statements = self.parse_statements(&["END"])?;
            let end = statements.last().map(|s| s.span).unwrap_or(kw);
            Some(ElseBranch {
                statements,
                span: kw.to(end),
            })
        } else {
            None
        };
        self.expect_kw("END")?;
        self.expect_kw("CASE")?;
        self.expect(Tok::Semi)?;
        Ok(StatementKind::Case {
            selector,
            whens,
            else_branch,
        })
    }

    fn parse_for(&mut self) -> PResult<StatementKind> {
        self.expect_kw("FOR")?;
        let var = self.expect_ident("loop variable")?;
        self.expect_kw("IN")?;
        if self.at_kw("REVERSE") {
            return Err(self.unsupported_here("FOR ... IN REVERSE"));
        }
        if self.peek().tok == Tok::LParen && self.peek_at(1).is_kw("SELECT") {
            return Err(self.unsupported_here("cursor FOR loop"));
        }
        if let Tok::Ident(_) = self.peek().tok {
            if self.peek_at(1).is_kw("LOOP") {
                return Err(self.unsupported_here("cursor FOR loop"));
            }
        }
        let lo = self.parse_expr()?;
        self.expect(Tok::DotDot)?;
        let hi = self.parse_expr()?;
        let body = self.parse_loop_body()?;
        Ok(StatementKind::For { var, lo, hi, body })
    }

    fn parse_assign_or_call(&mut self) -> PResult<StatementKind> {
        let name = self.parse_dotted_name("statement")?;
        match self.peek().tok {
            Tok::Assign => {
                if name.name.contains('.') {
                    return Err(ParseError::unsupported(name.span.line, name.span.col, "record field assignment"));
                }
                self.bump();
                let value = self.parse_expr()?;
                self.expect(Tok::Semi)?;
                Ok(StatementKind::Assign {
                    target: AssignTarget::Var(name),
                    value,
                })
            }
            Tok::LParen => {
                let args = self.parse_args()?;
                self.expect(Tok::Semi)?;
                Ok(StatementKind::Call { name, args })
            }
            Tok::Semi => {
                self.bump();
                Ok(StatementKind::Call { name, args: Vec::new() })
            }
            Tok::Percent => Err(self.unsupported_here("attribute reference (%)")),
            _ => Err(self.error_here("`:=`, `(` or `;`")),
        }
    }

    /// `a` or `a.b.c`, joined with dots into one identifier.
    fn parse_dotted_name(&mut self, what: &str) -> PResult<Ident> {
        let mut id = self.expect_ident(what)?;
        while self.peek().tok == Tok::Dot {
            self.bump();
            let next = self.expect_ident("identifier after `.`")?;
            id.name.push('.');
            id.name.push_str(&next.name);
            id.span = id.span.to(next.span);
        }
        Ok(id)
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            if matches!(self.peek().tok, Tok::Ident(_)) && *self.peek_at(1) == Tok::Arrow {
                return Err(self.unsupported_here("named argument"));
            }
            args.push(self.parse_expr()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RParen)?;
            return Ok(args);
        }
    }

    fn parse_bind(&mut self) -> PResult<BindRef> {
        let colon = self.expect(Tok::Colon)?;
        let first = match &self.peek().tok {
            Tok::Ident(_) => {
                let t = self.bump();
                let Tok::Ident(name) = t.tok else { unreachable!() };
                Ident { name, span: t.span }
            }
            _ => return Err(self.error_here("bind variable name")),
        };
        let second = if self.peek().tok == Tok::Dot {
            self.bump();
            match &self.peek().tok {
                Tok::Ident(_) => {
                    let t = self.bump();
                    let Tok::Ident(name) = t.tok else { unreachable!() };
                    Some(Ident { name, span: t.span })
                }
                _ => return Err(self.error_here("item name")),
            }
        } else {
            None
        };
        make_bind(self.opts, colon.span, first, second)
    }

    // ---- SQL ----

    /// Index of the `;` ending the SQL statement that starts at the current token.
    fn find_sql_end(&self) -> PResult<usize> {
        let mut depth = 0i32;
        for (i, t) in self.toks.iter().enumerate().skip(self.pos) {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => depth -= 1,
                Tok::Semi if depth <= 0 => return Ok(i),
                Tok::Eof => {
                    return Err(ParseError::syntax(t.span.line, t.span.col, "expected `;` ending SQL statement"))
                }
                _ => {}
            }
        }
        unreachable!("token stream always ends with Eof")
    }

    fn fragment(&self, from: usize, to: usize, values: bool) -> PResult<SqlFragment> {
        let toks = &self.toks[from..to];
        let span = toks[0].span.to(toks[toks.len() - 1].span);
        let text = span.slice(self.text).to_string();
        let refs = sql::scan_refs(toks, span.start, self.opts, values)?;
        Ok(SqlFragment { text, span, refs })
    }

    fn parse_select(&mut self) -> PResult<StatementKind> {
        let select = self.pos;
        let end = self.find_sql_end()?;
        let mut depth = 0i32;
        let mut into = None;
        let mut commas = Vec::new();
        for i in select + 1..end {
            match &self.toks[i].tok {
                Tok::LParen => depth += 1,
                Tok::RParen => depth -= 1,
                Tok::Comma if depth == 0 && into.is_none() => commas.push(i),
                t if depth == 0 && t.is_kw("INTO") => {
                    into = Some(i);
                    break;
                }
                t if depth == 0 && t.is_kw("FROM") => break,
                t if depth == 0 && t.is_kw("BULK") => return Err(self.unsupported_at(i, "BULK COLLECT")),
                _ => {}
            }
        }
        let Some(into) = into else {
            let t = &self.toks[select].span;
            return Err(ParseError::unsupported(t.line, t.col, "SELECT without INTO"));
        };
        let mut columns = Vec::new();
        let mut from = select + 1;
        for &c in commas.iter().chain(std::iter::once(&into)) {
            if c == from {
                return Err(self.syntax_at(c, "expected select-list expression"));
            }
            columns.push(self.fragment(from, c, false)?);
            from = c + 1;
        }
        self.pos = into + 1;
        let mut targets = Vec::new();
        loop {
            let target = if self.peek().tok == Tok::Colon {
                AssignTarget::Bind(self.parse_bind()?)
            } else {
                AssignTarget::Var(self.expect_ident("INTO target")?)
            };
            targets.push(target);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if !self.at_kw("FROM") {
            return Err(self.error_here("FROM"));
        }
        if targets.len() != columns.len() {
            let t = self.toks[into].span;
            return Err(ParseError::syntax(
                t.line,
                t.col,
                format!("SELECT projects {} column(s) into {} target(s)", columns.len(), targets.len()),
            ));
        }
        let tail = self.fragment(self.pos, end, true)?;
        self.pos = end;
        self.expect(Tok::Semi)?;
        Ok(StatementKind::SelectInto {
            columns,
            into: targets,
            tail,
        })
    }

    fn parse_dml(&mut self, kind: DmlKind) -> PResult<StatementKind> {
        let start = self.pos;
        let end = self.find_sql_end()?;
        if end <= start + 1 {
            return Err(self.syntax_at(end, "incomplete SQL statement"));
        }
        if self.toks[start + 1..end].iter().any(|t| t.tok.is_kw("RETURNING")) {
            return Err(self.unsupported_at(start, "RETURNING clause"));
        }
        let sql = self.fragment(start, end, true)?;
        self.pos = end;
        self.expect(Tok::Semi)?;
        Ok(StatementKind::Dml { kind, sql })
    }

    fn syntax_at(&self, i: usize, msg: &str) -> ParseError {
        let s = self.toks[i].span;
        ParseError::syntax(s.line, s.col, msg)
    }

    fn unsupported_at(&self, i: usize, what: &str) -> ParseError {
        let s = self.toks[i].span;
        ParseError::unsupported(s.line, s.col, what)
    }

    // ---- expressions ----

    pub(crate) fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_or()
    }

    fn binary(lhs: Expr, op: BinOp, rhs: Expr) -> Expr {
        let span = lhs.span.to(rhs.span);
        Expr {
            kind: ExprKind::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            span,
        }
    }

    fn parse_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_and()?;
        while self.eat_kw("OR") {
            let rhs = self.parse_and()?;
            lhs = Self::binary(lhs, BinOp::Or, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_not()?;
        while self.eat_kw("AND") {
            let rhs = self.parse_not()?;
            lhs = Self::binary(lhs, BinOp::And, rhs);
        }
        Ok(lhs)
    }

    fn parse_not(&mut self) -> PResult<Expr> {
        if self.at_kw("NOT") {
            let kw = self.bump().span;
            let operand = self.parse_not()?;
            let span = kw.to(operand.span);
            return Ok(Expr {
                kind: ExprKind::Unary {
                    op: UnOp::Not,
                    operand: Box::new(operand),
                },
                span,
            });
        }
        self.parse_comparison()
    }

    fn parse_comparison(&mut self) -> PResult<Expr> {
        let lhs = self.parse_concat()?;
        let op = match self.peek().tok {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => {
                if self.at_kw("IS") {
                    self.bump();
                    let op = if self.eat_kw("NOT") { BinOp::Ne } else { BinOp::Eq };
                    let null = self.expect_kw("NULL")?.span;
                    let rhs = Expr {
                        kind: ExprKind::Literal(Literal::Null),
                        span: null,
                    };
                    return Ok(Self::binary(lhs, op, rhs));
                }
                for kw in ["LIKE", "BETWEEN", "IN"] {
                    if self.at_kw(kw) {
                        return Err(self.unsupported_here(&format!("{kw} operator")));
                    }
                }
                if self.at_kw("NOT") && (self.peek_at(1).is_kw("LIKE") || self.peek_at(1).is_kw("IN") || self.peek_at(1).is_kw("BETWEEN")) {
                    return Err(self.unsupported_here("NOT LIKE / NOT IN / NOT BETWEEN"));
                }
                return Ok(lhs);
            }
        };
        self.bump();
        let rhs = self.parse_concat()?;
        Ok(Self::binary(lhs, op, rhs))
    }

    fn parse_concat(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_additive()?;
        while self.eat(&Tok::Concat) {
            let rhs = self.parse_additive()?;
            lhs = Self::binary(lhs, BinOp::Concat, rhs);
        }
        Ok(lhs)
    }

    fn parse_additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_multiplicative()?;
            lhs = Self::binary(lhs, op, rhs);
        }
    }

    fn parse_multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Self::binary(lhs, op, rhs);
        }
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        match self.peek().tok {
            Tok::Minus => {
                let start = self.bump().span;
                let operand = self.parse_unary()?;
                let span = start.to(operand.span);
                Ok(Expr {
                    kind: ExprKind::Unary {
                        op: UnOp::Neg,
                        operand: Box::new(operand),
                    },
                    span,
                })
            }
            Tok::Plus => {
                // Unary plus is the identity.
                self.bump();
                self.parse_unary()
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let literal = |lit: Literal| Expr {
            kind: ExprKind::Literal(lit),
            span: t.span,
        };
        match &t.tok {
            Tok::Number(n) => {
                self.bump();
                Ok(literal(Literal::Number(n.clone())))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(literal(Literal::String(s.clone())))
            }
            Tok::LParen => {
                self.bump();
                if self.at_kw("SELECT") {
                    return Err(self.unsupported_here("scalar subquery"));
                }
                let inner = self.parse_expr()?;
                let close = self.expect(Tok::RParen)?.span;
                // Parentheses only affect the span.
                Ok(Expr {
                    kind: inner.kind,
                    span: t.span.to(close),
                })
            }
            Tok::Colon => {
                let bind = self.parse_bind()?;
                Ok(Expr {
                    kind: ExprKind::Bind(bind),
                    span: t.span.to(self.prev_span()),
                })
            }
            Tok::Ident(word) => {
                let upper = word.to_uppercase();
                match upper.as_str() {
                    "TRUE" => {
                        self.bump();
                        return Ok(literal(Literal::Boolean(true)));
                    }
                    "FALSE" => {
                        self.bump();
                        return Ok(literal(Literal::Boolean(false)));
                    }
                    "NULL" => {
                        self.bump();
                        return Ok(literal(Literal::Null));
                    }
                    "CASE" => return Err(self.unsupported_here("CASE expression")),
                    _ => {}
                }
                let name = self.parse_dotted_name("expression")?;
                match self.peek().tok {
                    Tok::LParen => {
                        let args = self.parse_args()?;
                        Ok(Expr {
                            kind: ExprKind::Call { name, args },
                            span: t.span.to(self.prev_span()),
                        })
                    }
                    Tok::Percent => Err(self.unsupported_here("attribute reference (%)")),
                    _ => {
                        if name.name.contains('.') {
                            return Err(ParseError::unsupported(name.span.line, name.span.col, "qualified variable reference"));
                        }
                        let span = name.span;
                        Ok(Expr {
                            kind: ExprKind::Var(name),
                            span,
                        })
                    }
                }
            }
            _ => Err(self.error_here("expression")),
        }
    }

    // ---- program units ----

    pub(crate) fn parse_program_unit(&mut self) -> PResult<ProgramUnit> {
        let start = self.peek().span;
        let kind = if self.eat_kw("FUNCTION") {
            UnitKind::Function
        } else if self.eat_kw("PROCEDURE") {
            UnitKind::Procedure
        } else {
            return Err(self.error_here("FUNCTION or PROCEDURE"));
        };
        let name = self.expect_ident("unit name")?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            let mut seen = BTreeSet::new();
            loop {
                let pname = self.expect_ident("parameter name")?;
                if self.eat_kw("IN") {
                    if self.at_kw("OUT") {
                        return Err(self.unsupported_here("IN OUT parameter"));
                    }
                } else if self.at_kw("OUT") {
                    return Err(self.unsupported_here("OUT parameter"));
                }
                let ty = self.parse_type()?;
                if self.at_kw("DEFAULT") || self.peek().tok == Tok::Assign {
                    return Err(self.unsupported_here("parameter default"));
                }
                if !seen.insert(pname.key()) {
                    return Err(ParseError::Duplicate {
                        line: pname.span.line,
                        col: pname.span.col,
                        what: "parameter",
                        name: pname.name.clone(),
                    });
                }
                let span = pname.span.to(self.prev_span());
                params.push(Param { name: pname, ty, span });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        let return_type = if kind == UnitKind::Function {
            self.expect_kw("RETURN")?;
            Some(self.parse_type()?)
        } else {
            if self.at_kw("RETURN") {
                return Err(self.error_here("IS"));
            }
            None
        };
        if !self.eat_kw("IS") && !self.eat_kw("AS") {
            return Err(self.error_here("IS or AS"));
        }
        let decl_start = self.peek().span;
        let declarations = self.parse_declarations()?;
        for d in &declarations {
            if params.iter().any(|p| p.name.key() == d.name.key()) {
                return Err(ParseError::Duplicate {
                    line: d.name.span.line,
                    col: d.name.span.col,
                    what: "variable",
                    name: d.name.name.clone(),
                });
            }
        }
        let body = self.parse_block_rest(decl_start, declarations, true)?;
        Ok(ProgramUnit {
            kind,
            name,
            params,
            return_type,
            body,
            span: start.to(self.prev_span()),
        })
    }

    #[allow(dead_code)]
    pub(crate) fn index(&self) -> &LineIndex<'t> {
        self.index
    }
}

pub(crate) fn make_bind(
    opts: &ParseOptions,
    colon: Span,
    first: Ident,
    second: Option<Ident>,
) -> PResult<BindRef> {
    match second {
        Some(item) => Ok(BindRef {
            block: first,
            item,
            qualified: true,
        }),
        None => match &opts.default_block {
            Some(block) => Ok(BindRef {
                block: Ident {
                    name: block.clone(),
                    span: colon,
                },
                item: first,
                qualified: false,
            }),
            None => Err(ParseError::syntax(
                colon.line,
                colon.col,
                format!("bind variable `:{}` needs a block qualifier here", first.name),
            )),
        },
    }
}
