//! Tokenizer for the C subset.
//!
//! Besides ordinary tokens it handles three preprocessor-ish duties so the
//! parser never sees them: `#include` lines are skipped, object-like
//! `#define NAME <integer|float>` constants are substituted at token level,
//! and `// offload: trip=N` comments are captured as trip annotations tied to
//! the next token.

use super::ast::{Loc, TripAnnotation};
use crate::error::FrontendError;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Int { value: i64, raw: String },
    Float { value: f64, raw: String },
    Str(String),
    Char(String),
    /// Operators and punctuation, longest-match.
    Punct(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub loc: Loc,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.kind, TokenKind::Punct(s) if *s == p)
    }

    pub fn is_ident(&self, name: &str) -> bool {
        matches!(&self.kind, TokenKind::Ident(s) if s == name)
    }
}

/// Lexer output: tokens plus trip annotations keyed by the index of the token
/// that immediately follows each annotation comment.
#[derive(Debug, Default)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub annotations: HashMap<usize, TripAnnotation>,
    /// Object-like integer/float constants seen in `#define` lines.
    pub defines: HashMap<String, TokenKind>,
}

const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%", "<", ">", "=", "!", "~",
    "&", "|", "^", "?", ":", ";", ",", ".", "(", ")", "[", "]", "{", "}",
];

/// Tokenize one file. `predefines` carries `#define` constants from files
/// lexed earlier in the same unit, standing in for header inclusion.
pub fn tokenize(
    file: &str,
    text: &str,
    predefines: HashMap<String, TokenKind>,
) -> Result<TokenStream, FrontendError> {
    let mut lx = Lexer {
        file,
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        out: TokenStream {
            defines: predefines,
            ..TokenStream::default()
        },
        pending_annotation: None,
    };
    lx.run()?;
    Ok(lx.out)
}

struct Lexer<'a> {
    file: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: u32,
    out: TokenStream,
    pending_annotation: Option<TripAnnotation>,
}

impl<'a> Lexer<'a> {
    fn loc(&self) -> Loc {
        Loc {
            file: self.file.to_string(),
            line: self.line,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn push(&mut self, kind: TokenKind, loc: Loc) {
        if let Some(ann) = self.pending_annotation.take() {
            self.out.annotations.insert(self.out.tokens.len(), ann);
        }
        self.out.tokens.push(Token { kind, loc });
    }

    fn run(&mut self) -> Result<(), FrontendError> {
        while let Some(c) = self.peek() {
            let loc = self.loc();
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '/' if self.peek_at(1) == Some('/') => self.line_comment(),
                '/' if self.peek_at(1) == Some('*') => self.block_comment()?,
                '#' => self.directive(),
                '"' => self.string_lit(loc)?,
                '\'' => self.char_lit(loc)?,
                c if c.is_ascii_digit() => self.number(loc)?,
                '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => self.number(loc)?,
                c if c.is_ascii_alphabetic() || c == '_' => self.ident(loc),
                _ => self.punct(loc)?,
            }
        }
        Ok(())
    }

    fn line_comment(&mut self) {
        let loc = self.loc();
        self.bump();
        self.bump();
        let mut body = String::new();
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            body.push(c);
            self.bump();
        }
        if let Some(raw_value) = parse_annotation(&body) {
            self.pending_annotation = Some(TripAnnotation { loc, raw_value });
        }
    }

    fn block_comment(&mut self) -> Result<(), FrontendError> {
        let loc = self.loc();
        self.bump();
        self.bump();
        loop {
            match self.peek() {
                Some('*') if self.peek_at(1) == Some('/') => {
                    self.bump();
                    self.bump();
                    return Ok(());
                }
                Some(_) => {
                    self.bump();
                }
                None => {
                    return Err(FrontendError::Syntax {
                        file: loc.file,
                        line: loc.line,
                        message: "unterminated block comment".into(),
                    })
                }
            }
        }
    }

    /// Consume a preprocessor line (with backslash continuations).
    /// `#define NAME <numeric literal>` is recorded for substitution; every
    /// other directive is skipped.
    fn directive(&mut self) {
        let mut text = String::new();
        self.bump(); // '#'
        loop {
            match self.peek() {
                Some('\\') if self.peek_at(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                    text.push(' ');
                }
                Some('\n') | None => break,
                Some(c) => {
                    text.push(c);
                    self.bump();
                }
            }
        }
        let mut words = text.split_whitespace();
        if words.next() != Some("define") {
            return;
        }
        let Some(name) = words.next() else { return };
        // Function-like macros have '(' glued to the name; not object-like.
        if name.contains('(') || !is_ident(name) {
            return;
        }
        let rest: Vec<&str> = words.collect();
        if rest.len() != 1 {
            return;
        }
        let value = rest[0];
        if let Ok(v) = parse_c_int(value) {
            self.out
                .defines
                .insert(name.to_string(), TokenKind::Int { value: v, raw: v.to_string() });
        } else if let Ok(f) = value.trim_end_matches(['f', 'F']).parse::<f64>() {
            self.out.defines.insert(
                name.to_string(),
                TokenKind::Float {
                    value: f,
                    raw: value.to_string(),
                },
            );
        }
    }

    fn string_lit(&mut self, loc: Loc) -> Result<(), FrontendError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.peek() {
                Some('\\') => {
                    s.push(self.bump().unwrap());
                    if let Some(c) = self.bump() {
                        s.push(c);
                    }
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some(c) => {
                    s.push(c);
                    self.bump();
                }
                None => {
                    return Err(FrontendError::Syntax {
                        file: loc.file,
                        line: loc.line,
                        message: "unterminated string literal".into(),
                    })
                }
            }
        }
        self.push(TokenKind::Str(s), loc);
        Ok(())
    }

    fn char_lit(&mut self, loc: Loc) -> Result<(), FrontendError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.peek() {
                Some('\\') => {
                    s.push(self.bump().unwrap());
                    if let Some(c) = self.bump() {
                        s.push(c);
                    }
                }
                Some('\'') => {
                    self.bump();
                    break;
                }
                Some(c) => {
                    s.push(c);
                    self.bump();
                }
                None => {
                    return Err(FrontendError::Syntax {
                        file: loc.file,
                        line: loc.line,
                        message: "unterminated character literal".into(),
                    })
                }
            }
        }
        self.push(TokenKind::Char(s), loc);
        Ok(())
    }

    fn number(&mut self, loc: Loc) -> Result<(), FrontendError> {
        let mut raw = String::new();
        let hex = self.peek() == Some('0')
            && matches!(self.peek_at(1), Some('x') | Some('X'));
        if hex {
            raw.push(self.bump().unwrap());
            raw.push(self.bump().unwrap());
            while let Some(c) = self.peek() {
                if c.is_ascii_hexdigit() {
                    raw.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            let value = i64::from_str_radix(&raw[2..], 16).map_err(|_| FrontendError::Syntax {
                file: loc.file.clone(),
                line: loc.line,
                message: format!("bad hex literal `{raw}`"),
            })?;
            self.eat_int_suffix();
            self.push(TokenKind::Int { value, raw }, loc);
            return Ok(());
        }
        let mut is_float = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                raw.push(c);
                self.bump();
            } else if c == '.' && !is_float {
                is_float = true;
                raw.push(c);
                self.bump();
            } else if (c == 'e' || c == 'E')
                && self
                    .peek_at(1)
                    .is_some_and(|d| d.is_ascii_digit() || d == '+' || d == '-')
            {
                is_float = true;
                raw.push(c);
                self.bump();
                if matches!(self.peek(), Some('+') | Some('-')) {
                    raw.push(self.bump().unwrap());
                }
            } else {
                break;
            }
        }
        if is_float {
            let value: f64 = raw.parse().map_err(|_| FrontendError::Syntax {
                file: loc.file.clone(),
                line: loc.line,
                message: format!("bad float literal `{raw}`"),
            })?;
            if matches!(self.peek(), Some('f') | Some('F') | Some('l') | Some('L')) {
                raw.push(self.bump().unwrap());
            }
            self.push(TokenKind::Float { value, raw }, loc);
        } else {
            let value: i64 = raw.parse().map_err(|_| FrontendError::Syntax {
                file: loc.file.clone(),
                line: loc.line,
                message: format!("bad integer literal `{raw}`"),
            })?;
            self.eat_int_suffix();
            self.push(TokenKind::Int { value, raw }, loc);
        }
        Ok(())
    }

    fn eat_int_suffix(&mut self) {
        while matches!(self.peek(), Some('u') | Some('U') | Some('l') | Some('L')) {
            self.bump();
        }
    }

    fn ident(&mut self, loc: Loc) {
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if let Some(kind) = self.out.defines.get(&name) {
            let kind = kind.clone();
            self.push(kind, loc);
        } else {
            self.push(TokenKind::Ident(name), loc);
        }
    }

    fn punct(&mut self, loc: Loc) -> Result<(), FrontendError> {
        for p in PUNCTS {
            if self.matches(p) {
                for _ in 0..p.chars().count() {
                    self.bump();
                }
                self.push(TokenKind::Punct(p), loc);
                return Ok(());
            }
        }
        let c = self.peek().unwrap();
        Err(FrontendError::Syntax {
            file: loc.file,
            line: loc.line,
            message: format!("unexpected character `{c}`"),
        })
    }

    fn matches(&self, p: &str) -> bool {
        p.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }
}

/// Recognize `offload: trip=<value>` inside a line comment body.
/// Arbitrary surrounding spaces are allowed; anything else is not an
/// annotation. The value text is validated later so malformed values can be
/// reported as annotation errors rather than silently ignored.
fn parse_annotation(comment_body: &str) -> Option<String> {
    let body = comment_body.trim();
    let rest = body.strip_prefix("offload")?.trim_start();
    let rest = rest.strip_prefix(':')?.trim_start();
    let rest = rest.strip_prefix("trip")?.trim_start();
    let rest = rest.strip_prefix('=')?.trim();
    Some(rest.to_string())
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_c_int(s: &str) -> Result<i64, ()> {
    let t = s.trim_end_matches(['u', 'U', 'l', 'L']);
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        return i64::from_str_radix(hex, 16).map_err(|_| ());
    }
    t.parse().map_err(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_simple_expression() {
        let ts = tokenize("t.c", "a[i] += 2.5f;", HashMap::new()).unwrap();
        let kinds: Vec<_> = ts.tokens.iter().map(|t| &t.kind).collect();
        assert_eq!(kinds.len(), 7);
        assert!(matches!(kinds[5], TokenKind::Float { value, .. } if *value == 2.5));
    }

    #[test]
    fn captures_annotation_before_next_token() {
        let ts = tokenize("t.c", "x = 1;\n//  offload:  trip=500  \nwhile (x) { }", HashMap::new()).unwrap();
        let (idx, ann) = ts.annotations.iter().next().unwrap();
        assert_eq!(ann.raw_value, "500");
        assert!(ts.tokens[*idx].is_ident("while"));
    }

    #[test]
    fn define_substitution() {
        let ts = tokenize("t.c", "#define N 128\nint a[N];", HashMap::new()).unwrap();
        assert!(ts
            .tokens
            .iter()
            .any(|t| matches!(&t.kind, TokenKind::Int { value: 128, .. })));
    }

    #[test]
    fn ordinary_comment_is_not_annotation() {
        let ts = tokenize("t.c", "// just a note\nfor(;;);", HashMap::new()).unwrap();
        assert!(ts.annotations.is_empty());
    }

    #[test]
    fn line_numbers_are_one_based() {
        let ts = tokenize("t.c", "\n\nint x;", HashMap::new()).unwrap();
        assert_eq!(ts.tokens[0].loc.line, 3);
    }
}
