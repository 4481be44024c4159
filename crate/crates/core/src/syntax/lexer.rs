use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase-initial identifier.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Int(i64),
    /// `/name`
    Macro(String),
    /// URL or path, kept opaque.
    Link(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Bar,
    Dot,
    Neck,
    Arrow,
    And,
    Eq,
    Colon,
    QueryMark,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Macro(s) => format!("`/{s}`"),
            Tok::Link(s) => format!("link `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::QueryMark => "`?-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_link_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '~' | '/')
}

pub(crate) fn tokenize(src: &str, origin: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let next = chars.get(i + 1).copied();
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: tl, col: tc });

        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }

        if c.is_ascii_lowercase() || (c == '.' && matches!(next, Some('.' | '/'))) {
            if let Some(len) = scan_link(&chars[i..]) {
                let s: String = chars[i..i + len].iter().collect();
                push(&mut out, Tok::Link(s));
                advance!(len);
                continue;
            }
        }

        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let s: String = chars[start..j].iter().collect();
            let tok = if c.is_ascii_lowercase() { Tok::Ident(s) } else { Tok::Var(s) };
            push(&mut out, tok);
            advance!(j - start);
            continue;
        }

        if c.is_ascii_digit() || (c == '-' && next.is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[start..j].iter().collect();
            let v: i64 = s.parse().map_err(|_| {
                ParseError::syntax(origin, tl, tc, format!("integer `{s}` out of range"))
            })?;
            push(&mut out, Tok::Int(v));
            advance!(j - start);
            continue;
        }

        let (tok, len) = match (c, next) {
            ('/', Some('\\')) => (Tok::And, 2),
            ('/', Some(d)) if d.is_ascii_alphabetic() || d == '_' => {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let name: String = chars[i + 1..j].iter().collect();
                (Tok::Macro(name), j - i)
            }
            (':', Some('-')) => (Tok::Neck, 2),
            (':', _) => (Tok::Colon, 1),
            ('=', Some('>')) => (Tok::Arrow, 2),
            ('=', _) => (Tok::Eq, 1),
            ('?', Some('-')) => (Tok::QueryMark, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            ('|', _) => (Tok::Bar, 1),
            ('.', _) => (Tok::Dot, 1),
            ('&', _) | ('∧', _) => (Tok::And, 1),
            ('⇒', _) => (Tok::Arrow, 1),
            _ => {
                return Err(ParseError::syntax(origin, tl, tc, format!("unexpected character `{c}`")));
            }
        };
        push(&mut out, tok);
        advance!(len);
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Length of a link token starting at `s[0]`, if one starts there.
///
/// A link is a maximal run of path characters containing a `/` that is
/// followed by a path character, optionally preceded by a `scheme:` prefix.
/// Trailing dots belong to the clause terminator, not the link.
fn scan_link(s: &[char]) -> Option<usize> {
    let mut j = 0;
    let scheme_end = s.iter().position(|c| !c.is_ascii_alphabetic()).unwrap_or(s.len());
    if scheme_end > 0 && s.get(scheme_end) == Some(&':') && s.get(scheme_end + 1) == Some(&'/') {
        j = scheme_end + 1;
    }
    while j < s.len() && is_link_char(s[j]) {
        j += 1;
    }
    while j > 0 && s[j - 1] == '.' {
        j -= 1;
    }
    let run = &s[..j];
    let has_path = run.windows(2).any(|w| w[0] == '/' && is_link_char(w[1]) && w[1] != '/')
        || run.windows(3).any(|w| w == [':', '/', '/']);
    has_path.then_some(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, "t").unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn link_tokens() {
        assert_eq!(
            toks("www.d.com/lists => p."),
            vec![Tok::Link("www.d.com/lists".into()), Tok::Arrow, Tok::Ident("p".into()), Tok::Dot, Tok::Eof]
        );
        assert_eq!(toks("www.d.com/arcs.")[0], Tok::Link("www.d.com/arcs".into()));
        assert_eq!(toks("https://x.org/a/b")[0], Tok::Link("https://x.org/a/b".into()));
        assert_eq!(toks("./fixtures/lists.lw")[0], Tok::Link("./fixtures/lists.lw".into()));
        assert_eq!(toks("file:///tmp/x.lw")[0], Tok::Link("file:///tmp/x.lw".into()));
    }

    #[test]
    fn operators_are_not_links() {
        assert_eq!(
            toks("/mem /\\ /app"),
            vec![Tok::Macro("mem".into()), Tok::And, Tok::Macro("app".into()), Tok::Eof]
        );
        assert_eq!(
            toks("p:-q."),
            vec![Tok::Ident("p".into()), Tok::Neck, Tok::Ident("q".into()), Tok::Dot, Tok::Eof]
        );
        assert_eq!(toks("a/\\b")[1], Tok::And);
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("% hi\n  foo", "t").unwrap();
        assert_eq!((t[0].line, t[0].col), (2, 3));
    }

    #[test]
    fn unicode_operators() {
        assert_eq!(toks("p ∧ q ⇒ r")[1], Tok::And);
        assert_eq!(toks("p ∧ q ⇒ r")[3], Tok::Arrow);
    }
}
