//! Line-oriented form-descriptor reader.


use super::ast::*;
use super::error::ParseError;
use super::lexer::LineIndex;
use super::parser::Parser;
use super::ParseOptions;

struct Line<'a> {
    /// Byte offset of the first character of the line.
    start: usize,
    /// Byte offset just past the line's content (before `\n`).
    end: usize,
    /// Trimmed content and its byte offset.
    content: &'a str,
    content_start: usize,
}

fn split_lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for raw in text.split_inclusive('\n') {
        let body = raw.strip_suffix('\n').unwrap_or(raw);
        let body = body.strip_suffix('\r').unwrap_or(body);
        let lead = body.len() - body.trim_start().len();
        let content = body.trim();
        out.push(Line {
            start,
            end: start + body.len(),
            content,
            content_start: start + lead,
        });
        start += raw.len();
    }
    out
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn is_line(content: &str, expected: &[&str]) -> bool {
    let ws = words(content);
    ws.len() == expected.len() && ws.iter().zip(expected).all(|(a, b)| a.eq_ignore_ascii_case(b))
}

struct Reader<'t> {
    text: &'t str,
    index: LineIndex<'t>,
}

impl<'t> Reader<'t> {
    fn span(&self, start: usize, end: usize) -> Span {
        self.index.span(start, end)
    }

    fn err(&self, offset: usize, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.index.position(offset);
        ParseError::syntax(line, col, msg)
    }

    /// `word` must be a subslice of the descriptor text.
    fn ident_at(&self, word: &str) -> Ident {
        let offset = offset_of(self.text, word);
        Ident {
            name: word.to_string(),
            span: self.span(offset, offset + word.len()),
        }
    }

    fn check_name(&self, word: &str, offset: usize) -> Result<(), ParseError> {
        let ok = word.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && word.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '$' | '#' | '-'));
        if ok {
            Ok(())
        } else {
            Err(self.err(offset, format!("invalid name `{word}`")))
        }
    }
}

fn offset_of(text: &str, sub: &str) -> usize {
    sub.as_ptr() as usize - text.as_ptr() as usize
}

pub(crate) fn parse_form(text: &str) -> Result<FormBundle, ParseError> {
    let reader = Reader {
        text,
        index: LineIndex::new(text),
    };
    let lines = split_lines(text);
    let mut i = 0;
    let skip = |i: &mut usize| {
        while *i < lines.len() && (lines[*i].content.is_empty() || lines[*i].content.starts_with('#')) {
            *i += 1;
        }
    };

    skip(&mut i);
    let Some(first) = lines.get(i) else {
        return Err(reader.err(text.len(), "expected `FORM <name>`, found end of input"));
    };
    let ws = words(first.content);
    if ws.len() != 2 || !ws[0].eq_ignore_ascii_case("FORM") {
        return Err(reader.err(first.content_start, format!("expected `FORM <name>`, found `{}`", first.content)));
    }
    reader.check_name(ws[1], offset_of(text, ws[1]))?;
    let form_name = reader.ident_at(ws[1]);
    let form_start = first.content_start;
    i += 1;

    let mut windows: Vec<Window> = Vec::new();
    let mut program_units: Vec<ProgramUnit> = Vec::new();
    // Triggers waiting for their window to close, so items may follow them.
    let mut pending: Vec<(Ident, Ident, PlSqlBlock, Span)> = Vec::new();

    let close_window = |windows: &mut Vec<Window>, pending: &mut Vec<(Ident, Ident, PlSqlBlock, Span)>, end: usize| -> Result<(), ParseError> {
        let Some(w) = windows.last_mut() else {
            return Ok(());
        };
        for (owner, event, body, span) in pending.drain(..) {
            let owner_kind = if w.item(&owner.key()).is_some() {
                TriggerOwner::Item
            } else if w.answers_to(&owner.key()) {
                TriggerOwner::DataBlock
            } else {
                return Err(ParseError::UnknownItem {
                    line: owner.span.line,
                    col: owner.span.col,
                    name: owner.name.clone(),
                });
            };
            w.triggers.push(Trigger {
                owner,
                owner_kind,
                event,
                body,
                span,
            });
        }
        w.span = reader.span(w.span.start, end.max(w.span.end));
        Ok(())
    };

    let mut last_end = first.end;
    let mut in_window = false;
    loop {
        skip(&mut i);
        let Some(line) = lines.get(i) else {
            return Err(reader.err(text.len(), "expected `END FORM`, found end of input"));
        };
        let ws = words(line.content);
        let head = ws[0].to_uppercase();
        if is_line(line.content, &["END", "FORM"]) {
            if in_window {
                close_window(&mut windows, &mut pending, last_end)?;
            }
            let form_end = line.end;
            i += 1;
            skip(&mut i);
            if let Some(extra) = lines.get(i) {
                return Err(reader.err(extra.content_start, format!("unexpected `{}` after END FORM", extra.content)));
            }
            let span = reader.span(form_start, form_end);
            return Ok(FormBundle {
                form_name,
                windows,
                program_units,
                span,
            });
        }
        match head.as_str() {
            "WINDOW" => {
                if in_window {
                    close_window(&mut windows, &mut pending, last_end)?;
                }
                let block = match ws.len() {
                    2 => None,
                    4 if ws[2].eq_ignore_ascii_case("BLOCK") => Some(ws[3]),
                    _ => {
                        return Err(reader.err(line.content_start, "expected `WINDOW <name> [BLOCK <block>]`"));
                    }
                };
                reader.check_name(ws[1], offset_of(text, ws[1]))?;
                let name = reader.ident_at(ws[1]);
                for w in &windows {
                    if w.name.key() == name.key() {
                        return Err(ParseError::Duplicate {
                            line: name.span.line,
                            col: name.span.col,
                            what: "window",
                            name: name.name.clone(),
                        });
                    }
                }
                let block = match block {
                    Some(b) => {
                        reader.check_name(b, offset_of(text, b))?;
                        Some(reader.ident_at(b))
                    }
                    None => None,
                };
                in_window = true;
                windows.push(Window {
                    name,
                    block,
                    items: Vec::new(),
                    triggers: Vec::new(),
                    span: reader.span(line.content_start, line.end),
                });
                last_end = line.end;
                i += 1;
            }
            "ITEM" => {
                let Some(w) = windows.last_mut().filter(|_| in_window) else {
                    return Err(reader.err(line.content_start, "ITEM outside of a WINDOW section"));
                };
                // `ITEM <name> : <KIND>` with optional spaces around the colon.
                let rest = line.content[4..].trim();
                let Some((name_part, kind_part)) = rest.split_once(':') else {
                    return Err(reader.err(line.content_start, "expected `ITEM <name> : <TEXT|BUTTON|CHECKBOX|DISPLAY>`"));
                };
                let name_word = name_part.trim();
                let kind_word = kind_part.trim();
                reader.check_name(name_word, offset_of(text, name_word))?;
                let Some(widget) = WidgetKind::parse(kind_word) else {
                    return Err(reader.err(
                        offset_of(text, kind_word),
                        format!("expected TEXT, BUTTON, CHECKBOX or DISPLAY, found `{kind_word}`"),
                    ));
                };
                let name = reader.ident_at(name_word);
                if w.item(&name.key()).is_some() {
                    return Err(ParseError::Duplicate {
                        line: name.span.line,
                        col: name.span.col,
                        what: "item",
                        name: name.name.clone(),
                    });
                }
                w.items.push(Item {
                    name,
                    widget,
                    span: reader.span(line.content_start, line.end),
                });
                last_end = line.end;
                i += 1;
            }
            "TRIGGER" => {
                let Some(w) = windows.last().filter(|_| in_window) else {
                    return Err(reader.err(line.content_start, "TRIGGER outside of a WINDOW section"));
                };
                if ws.len() != 2 {
                    return Err(reader.err(line.content_start, "expected `TRIGGER <item>.<EVENT>`"));
                }
                let Some((owner_word, event_word)) = ws[1].split_once('.') else {
                    return Err(reader.err(offset_of(text, ws[1]), "expected `<item>.<EVENT>`"));
                };
                reader.check_name(owner_word, offset_of(text, owner_word))?;
                reader.check_name(event_word, offset_of(text, event_word))?;
                let owner = reader.ident_at(owner_word);
                let event = reader.ident_at(event_word);
                let header_start = line.content_start;
                let body_start = lines.get(i + 1).map(|l| l.start).unwrap_or(text.len());
                let mut j = i + 1;
                while j < lines.len() && !is_line(lines[j].content, &["END", "TRIGGER"]) {
                    j += 1;
                }
                if j == lines.len() {
                    return Err(reader.err(header_start, "TRIGGER without matching `END TRIGGER`"));
                }
                let body_end = lines[j].start;
                let opts = ParseOptions {
                    default_block: Some(w.block_name().name.clone()),
                };
                let body = parse_body(&reader, body_start, body_end, &opts)?;
                let span = reader.span(header_start, lines[j].end);
                let duplicate = w
                    .triggers
                    .iter()
                    .map(|t| (&t.owner, &t.event))
                    .chain(pending.iter().map(|p| (&p.0, &p.1)))
                    .any(|(o, e)| o.key() == owner.key() && e.key() == event.key());
                if duplicate {
                    return Err(ParseError::Duplicate {
                        line: owner.span.line,
                        col: owner.span.col,
                        what: "trigger",
                        name: format!("{}.{}", owner.name, event.name),
                    });
                }
                pending.push((owner, event, body, span));
                last_end = lines[j].end;
                i = j + 1;
            }
            "PROGRAM" if is_line(line.content, &["PROGRAM", "UNIT"]) => {
                if in_window {
                    close_window(&mut windows, &mut pending, last_end)?;
                }
                let body_start = lines.get(i + 1).map(|l| l.start).unwrap_or(text.len());
                let mut j = i + 1;
                while j < lines.len() && !is_line(lines[j].content, &["END", "UNIT"]) {
                    j += 1;
                }
                if j == lines.len() {
                    return Err(reader.err(line.content_start, "PROGRAM UNIT without matching `END UNIT`"));
                }
                let opts = ParseOptions::default();
                let mut parser = Parser::new(text, &reader.index, body_start, lines[j].start, &opts)?;
                let unit = parser.parse_program_unit()?;
                parser.expect_eof()?;
                if program_units.iter().any(|u| u.name.key() == unit.name.key()) {
                    return Err(ParseError::Duplicate {
                        line: unit.name.span.line,
                        col: unit.name.span.col,
                        what: "program unit",
                        name: unit.name.name.clone(),
                    });
                }
                program_units.push(unit);
                in_window = false;
                last_end = lines[j].end;
                i = j + 1;
            }
            _ => {
                return Err(reader.err(
                    line.content_start,
                    format!("expected WINDOW, ITEM, TRIGGER, PROGRAM UNIT or END FORM, found `{}`", ws[0]),
                ));
            }
        }
    }
}

fn parse_body(reader: &Reader<'_>, start: usize, end: usize, opts: &ParseOptions) -> Result<PlSqlBlock, ParseError> {
    let mut parser = Parser::new(reader.text, &reader.index, start, end, opts)?;
    parser.parse_top_block()
}

/// Checks that every bind in the form names a known window/block and item.
pub(crate) fn check_binds(form: &FormBundle) -> Result<(), ParseError> {
    let mut err = None;
    let mut check = |b: &BindRef| {
        if err.is_some() || b.is_global() {
            return;
        }
        let Some(w) = form.windows.iter().find(|w| w.answers_to(&b.block.key())) else {
            err = Some(ParseError::UnknownWindow {
                line: b.block.span.line,
                col: b.block.span.col,
                name: b.block.name.clone(),
            });
            return;
        };
        if w.item(&b.item.key()).is_none() {
            err = Some(ParseError::UnknownItem {
                line: b.item.span.line,
                col: b.item.span.col,
                name: format!("{}.{}", b.block.name, b.item.name),
            });
        }
    };
    let blocks = form
        .triggers()
        .map(|(_, t)| &t.body)
        .chain(form.program_units.iter().map(|u| &u.body));
    for block in blocks {
        visit_block_binds(block, &mut check);
    }
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn visit_block_binds(block: &PlSqlBlock, f: &mut dyn FnMut(&BindRef)) {
    for d in &block.declarations {
        if let Some(e) = &d.init {
            visit_expr_binds(e, f);
        }
    }
    let mut visit = |s: &Statement| visit_statement_binds(s, f);
    walk_block(block, &mut visit);
}

fn visit_statement_binds(s: &Statement, f: &mut dyn FnMut(&BindRef)) {
    let target = |t: &AssignTarget, f: &mut dyn FnMut(&BindRef)| {
        if let AssignTarget::Bind(b) = t {
            f(b)
        }
    };
    match &s.kind {
        StatementKind::Assign { target: t, value } => {
            target(t, f);
            visit_expr_binds(value, f);
        }
        StatementKind::If { branches, .. } => branches.iter().for_each(|b| visit_expr_binds(&b.cond, f)),
        StatementKind::Case { selector, whens, .. } => {
            if let Some(e) = selector {
                visit_expr_binds(e, f);
            }
            whens.iter().for_each(|b| visit_expr_binds(&b.cond, f));
        }
        StatementKind::While { cond, .. } => visit_expr_binds(cond, f),
        StatementKind::For { lo, hi, .. } => {
            visit_expr_binds(lo, f);
            visit_expr_binds(hi, f);
        }
        StatementKind::Exit { when: Some(e) } | StatementKind::Return { value: Some(e) } => visit_expr_binds(e, f),
        StatementKind::Call { args, .. } => args.iter().for_each(|a| visit_expr_binds(a, f)),
        StatementKind::SelectInto { columns, into, tail } => {
            for c in columns {
                c.binds().for_each(&mut *f);
            }
            for t in into {
                target(t, f);
            }
            tail.binds().for_each(&mut *f);
        }
        StatementKind::Dml { sql, .. } => sql.binds().for_each(&mut *f),
        StatementKind::InnerBlock(b) => {
            for d in &b.declarations {
                if let Some(e) = &d.init {
                    visit_expr_binds(e, f);
                }
            }
        }
        _ => {}
    }
}

pub fn visit_expr_binds(e: &Expr, f: &mut dyn FnMut(&BindRef)) {
    match &e.kind {
        ExprKind::Bind(b) => f(b),
        ExprKind::Binary { lhs, rhs, .. } => {
            visit_expr_binds(lhs, f);
            visit_expr_binds(rhs, f);
        }
        ExprKind::Unary { operand, .. } => visit_expr_binds(operand, f),
        ExprKind::Call { args, .. } => args.iter().for_each(|a| visit_expr_binds(a, f)),
        ExprKind::Literal(_) | ExprKind::Var(_) => {}
    }
}
