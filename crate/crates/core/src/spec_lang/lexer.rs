use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Digits with optional dotted groups, used for state names like `2.1`.
    Num(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest symbols first so that prefixes never shadow them.
const SYMBOLS: &[&str] = &[
    "|||", "<<|", "|->", "+->", "-->", "<->", ":|", ":=", "<+", "<:", "/:", "/=", "=>", "->", "||",
    "\\/", "/\\", "(", ")", "{", "}", ",", ";", ":", ".", "=", "!", "#", "&", "*", "-", "'", "/",
];

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let start = Span::new(line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(Diagnostic::error(start, "unterminated comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let span = Span::new(line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                bump!();
            }
            out.push(Token {
                tok: Tok::Ident(s),
                span,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            loop {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    bump!();
                }
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    s.push('.');
                    bump!();
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Num(s),
                span,
            });
            continue;
        }
        let rest = &chars[i..];
        let sym = SYMBOLS.iter().find(|s| {
            let n = s.chars().count();
            rest.len() >= n && s.chars().zip(rest).all(|(a, b)| a == *b)
        });
        match sym {
            Some(s) => {
                for _ in 0..s.chars().count() {
                    bump!();
                }
                out.push(Token {
                    tok: Tok::Sym(s),
                    span,
                });
            }
            None => {
                return Err(Diagnostic::error(
                    span,
                    format!("unexpected character `{}`", c.escape_default()),
                ))
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}
