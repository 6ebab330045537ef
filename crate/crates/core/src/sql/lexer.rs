use super::SqlError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Bare or backquoted identifier; keywords are identifiers too.
    Ident(String),
    Number(String),
    Str(String),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    /// Byte offset into the query text.
    pub pos: usize,
}

impl Token {
    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    pub fn is_sym(&self, sym: &str) -> bool {
        matches!(self.tok, Tok::Sym(s) if s == sym)
    }

    pub fn describe(&self) -> String {
        match &self.tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(_) => "string literal".into(),
            Tok::Sym(s) => format!("`{s}`"),
        }
    }
}

const SYMBOLS: [&str; 16] = ["!=", "<>", "<=", ">=", "==", "(", ")", ",", ".", "*", "+", "-", "/", "=", "<", ">"];

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, SqlError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = src[i..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        if c == '\'' || c == '"' {
            let (lit, end) = quoted(src, i, c)?;
            out.push(Token { tok: Tok::Str(lit), pos: start });
            i = end;
        } else if c == '`' {
            let (name, end) = quoted(src, i, '`')?;
            out.push(Token { tok: Tok::Ident(name), pos: start });
            i = end;
        } else if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut end = i;
            let mut seen_dot = false;
            while end < bytes.len() {
                match bytes[end] {
                    b'0'..=b'9' => end += 1,
                    b'.' if !seen_dot && bytes.get(end + 1).is_some_and(u8::is_ascii_digit) => {
                        seen_dot = true;
                        end += 1;
                    }
                    _ => break,
                }
            }
            out.push(Token { tok: Tok::Number(src[i..end].to_owned()), pos: start });
            i = end;
        } else if c.is_alphabetic() || c == '_' {
            let end = src[i..]
                .char_indices()
                .find(|&(_, ch)| !(ch.is_alphanumeric() || ch == '_'))
                .map_or(src.len(), |(off, _)| i + off);
            out.push(Token { tok: Tok::Ident(src[i..end].to_owned()), pos: start });
            i = end;
        } else if c == ';' {
            // Only a trailing semicolon is tolerated.
            if src[i + 1..].trim().is_empty() {
                break;
            }
            return Err(SqlError::Syntax { pos: i, message: "multiple statements are not supported".into() });
        } else if let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(*s)) {
            let sym: &'static str = if *sym == "==" { "=" } else { sym };
            out.push(Token { tok: Tok::Sym(sym), pos: start });
            i += if sym == "=" && src[i..].starts_with("==") { 2 } else { sym.len() };
        } else {
            return Err(SqlError::Syntax { pos: i, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// Quoted run starting at `start`; a doubled quote is an escaped quote.
fn quoted(src: &str, start: usize, q: char) -> Result<(String, usize), SqlError> {
    let mut out = String::new();
    let mut iter = src[start + 1..].char_indices().peekable();
    while let Some((off, ch)) = iter.next() {
        if ch == q {
            if iter.peek().is_some_and(|&(_, next)| next == q) {
                iter.next();
                out.push(q);
                continue;
            }
            return Ok((out, start + 1 + off + ch.len_utf8()));
        }
        out.push(ch);
    }
    Err(SqlError::Syntax { pos: start, message: "unterminated quoted literal".into() })
}
