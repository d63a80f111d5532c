use super::ast::Span;
use super::error::ParseError;

/// Maps byte offsets to 1-based line/column pairs.
#[derive(Debug, Clone)]
pub struct LineIndex<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineIndex { text, line_starts }
    }

    pub fn position(&self, offset: usize) -> (u32, u32) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let col = self.text[self.line_starts[line]..offset].chars().count();
        (line as u32 + 1, col as u32 + 1)
    }

    pub fn span(&self, start: usize, end: usize) -> Span {
        let (line, col) = self.position(start);
        let (end_line, end_col) = self.position(end);
        Span {
            start,
            end,
            line,
            col,
            end_line,
            end_col,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Assign,
    Semi,
    Comma,
    LParen,
    RParen,
    Dot,
    DotDot,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Concat,
    Colon,
    Arrow,
    Percent,
    LabelOpen,
    LabelClose,
    /// Any other character. Only legal inside raw SQL text.
    Other(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Eof => "end of input".to_string(),
            Tok::Other(c) => format!("`{c}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Assign => ":=",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Eq => "=",
            Tok::Ne => "<>",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Concat => "||",
            Tok::Colon => ":",
            Tok::Arrow => "=>",
            Tok::Percent => "%",
            Tok::LabelOpen => "<<",
            Tok::LabelClose => ">>",
            _ => "?",
        }
    }

    /// True if this is the (case-insensitive) keyword `kw`.
    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(self, Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Tokenizes `text[start..end]`. Spans are absolute offsets into `text`.
/// With `hash_comments`, a line whose first non-blank character is `#` is skipped.
pub fn tokenize(
    index: &LineIndex<'_>,
    text: &str,
    start: usize,
    end: usize,
    hash_comments: bool,
) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = start;
    let mut at_line_start = start == 0 || bytes[start - 1] == b'\n';
    while i < end {
        let c = bytes[i];
        if c == b'\n' {
            at_line_start = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if hash_comments && at_line_start && c == b'#' {
            while i < end && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        at_line_start = false;
        let tok_start = i;
        let two = if i + 1 < end { Some(bytes[i + 1]) } else { None };
        let tok = match c {
            b'-' if two == Some(b'-') => {
                while i < end && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'/' if two == Some(b'*') => {
                i += 2;
                loop {
                    if i + 1 >= end {
                        let (line, col) = index.position(tok_start);
                        return Err(ParseError::syntax(line, col, "unterminated comment"));
                    }
                    if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                        i += 2;
                        break;
                    }
                    i += 1;
                }
                continue;
            }
            b'\'' => {
                let mut value = String::new();
                i += 1;
                loop {
                    if i >= end {
                        let (line, col) = index.position(tok_start);
                        return Err(ParseError::syntax(line, col, "unterminated string literal"));
                    }
                    if bytes[i] == b'\'' {
                        if i + 1 < end && bytes[i + 1] == b'\'' {
                            value.push('\'');
                            i += 2;
                            continue;
                        }
                        i += 1;
                        break;
                    }
                    let ch = text[i..].chars().next().unwrap();
                    value.push(ch);
                    i += ch.len_utf8();
                }
                out.push(Token {
                    tok: Tok::Str(value),
                    span: index.span(tok_start, i),
                });
                continue;
            }
            b'"' => {
                // Quoted identifier.
                i += 1;
                let name_start = i;
                while i < end && bytes[i] != b'"' {
                    i += 1;
                }
                if i >= end {
                    let (line, col) = index.position(tok_start);
                    return Err(ParseError::syntax(line, col, "unterminated quoted identifier"));
                }
                let name = text[name_start..i].to_string();
                i += 1;
                out.push(Token {
                    tok: Tok::Ident(name),
                    span: index.span(tok_start, i),
                });
                continue;
            }
            b'0'..=b'9' => {
                while i < end && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                // A fraction, but not the `..` range operator.
                if i + 1 < end && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < end && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                Tok::Number(text[tok_start..i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' || c >= 0x80 => {
                while i < end {
                    let b = bytes[i];
                    if b.is_ascii_alphanumeric() || b == b'_' || b == b'$' || b == b'#' {
                        i += 1;
                    } else if b >= 0x80 {
                        let ch = text[i..].chars().next().unwrap();
                        if ch.is_alphanumeric() {
                            i += ch.len_utf8();
                        } else {
                            break;
                        }
                    } else {
                        break;
                    }
                }
                if i == tok_start {
                    let ch = text[i..].chars().next().unwrap();
                    i += ch.len_utf8();
                    Tok::Other(ch)
                } else {
                    Tok::Ident(text[tok_start..i].to_string())
                }
            }
            _ => {
                let (tok, len) = match (c, two) {
                    (b':', Some(b'=')) => (Tok::Assign, 2),
                    (b'.', Some(b'.')) => (Tok::DotDot, 2),
                    (b'<', Some(b'>')) => (Tok::Ne, 2),
                    (b'!', Some(b'=')) => (Tok::Ne, 2),
                    (b'^', Some(b'=')) => (Tok::Ne, 2),
                    (b'<', Some(b'=')) => (Tok::Le, 2),
                    (b'>', Some(b'=')) => (Tok::Ge, 2),
                    (b'<', Some(b'<')) => (Tok::LabelOpen, 2),
                    (b'>', Some(b'>')) => (Tok::LabelClose, 2),
                    (b'|', Some(b'|')) => (Tok::Concat, 2),
                    (b'=', Some(b'>')) => (Tok::Arrow, 2),
                    (b';', _) => (Tok::Semi, 1),
                    (b',', _) => (Tok::Comma, 1),
                    (b'(', _) => (Tok::LParen, 1),
                    (b')', _) => (Tok::RParen, 1),
                    (b'.', _) => (Tok::Dot, 1),
                    (b'+', _) => (Tok::Plus, 1),
                    (b'-', _) => (Tok::Minus, 1),
                    (b'*', _) => (Tok::Star, 1),
                    (b'/', _) => (Tok::Slash, 1),
                    (b'=', _) => (Tok::Eq, 1),
                    (b'<', _) => (Tok::Lt, 1),
                    (b'>', _) => (Tok::Gt, 1),
                    (b':', _) => (Tok::Colon, 1),
                    (b'%', _) => (Tok::Percent, 1),
                    _ => {
                        let ch = text[i..].chars().next().unwrap();
                        (Tok::Other(ch), ch.len_utf8())
                    }
                };
                i += len;
                tok
            }
        };
        out.push(Token {
            tok,
            span: index.span(tok_start, i),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: index.span(end, end),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        let idx = LineIndex::new(src);
        tokenize(&idx, src, 0, src.len(), false).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_assignment_and_binds() {
        assert_eq!(
            toks("x := :B.I;"),
            vec![
                Tok::Ident("x".into()),
                Tok::Assign,
                Tok::Colon,
                Tok::Ident("B".into()),
                Tok::Dot,
                Tok::Ident("I".into()),
                Tok::Semi,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn distinguishes_range_from_fraction() {
        assert_eq!(
            toks("1..10 2.5"),
            vec![
                Tok::Number("1".into()),
                Tok::DotDot,
                Tok::Number("10".into()),
                Tok::Number("2.5".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn string_escapes_and_comments() {
        assert_eq!(
            toks("'it''s' -- trailing\n/* block */ a"),
            vec![Tok::Str("it's".into()), Tok::Ident("a".into()), Tok::Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let src = "ab\n  cd";
        let idx = LineIndex::new(src);
        let t = tokenize(&idx, src, 0, src.len(), false).unwrap();
        assert_eq!((t[1].span.line, t[1].span.col), (2, 3));
    }

    #[test]
    fn hash_lines_are_comments_only_when_enabled() {
        let src = "# note\nx";
        let idx = LineIndex::new(src);
        let t = tokenize(&idx, src, 0, src.len(), true).unwrap();
        assert_eq!(t[0].tok, Tok::Ident("x".into()));
    }

    #[test]
    fn unterminated_string_is_an_error() {
        let src = "'abc";
        let idx = LineIndex::new(src);
        assert!(tokenize(&idx, src, 0, src.len(), false).is_err());
    }
}
