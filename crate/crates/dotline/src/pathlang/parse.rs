//! Hand-rolled lexer and recursive-descent parser for path expressions.
//!
//! The surface grammar:
//!
//! ```text
//! expr      := root ( '/' step )*
//! root      := '.'
//! step      := STEPNAME predicate*
//! STEPNAME  := 'outE' | 'inE' | 'bothE' | 'inV' | 'outV' | 'bothV'
//! predicate := '[' ( '@' KEY ('='|'!=') literal
//!                  | 'g:assign(' QUOTED_VAR ')'
//!                  | 'g:except(' VAR ')' ) ']'
//! literal   := quoted string | integer | float | 'true' | 'false'
//! ```
//!
//! Strings open with a straight quote `'` or a typographic backtick `` ` ``
//! and always close with a straight quote, so both `'friend'` and
//! `` `friend' `` are accepted. Whitespace between tokens is ignored, which
//! lets multi-line expressions parse as written.

use std::fmt;

use crate::pathlang::ast::{is_valid_var, PathExpr, Predicate, Step, StepKind};
use crate::value::PropertyValue;

/// Parse failure: either malformed syntax (with the byte offset where the
/// parse stopped and the tokens that would have been accepted there) or a
/// step-alternation type error.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    Type {
        offset: usize,
        step: String,
        position: String,
        expected: Vec<String>,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Type { offset, .. } => *offset,
        }
    }

    fn syntax(offset: usize, expected: &[&str], found: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            offset,
            expected: expected.iter().map(|s| (*s).to_owned()).collect(),
            found: found.into(),
        }
    }
}

fn join_expected(expected: &[String]) -> String {
    expected.join(" or ")
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                offset,
                expected,
                found,
            } => write!(
                f,
                "syntax error at byte {offset}: expected {}, found {found}",
                join_expected(expected)
            ),
            ParseError::Type {
                offset,
                step,
                position,
                expected,
            } => write!(
                f,
                "type error at byte {offset}: step {step} cannot follow a {position} position; expected {}",
                join_expected(expected)
            ),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Dot,
    Slash,
    LBracket,
    RBracket,
    At,
    Eq,
    Neq,
    LParen,
    RParen,
    Colon,
    Ident(String),
    Var(String),
    Str(String),
    Int(i64),
    Float(f64),
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Dot => "'.'".into(),
            Token::Slash => "'/'".into(),
            Token::LBracket => "'['".into(),
            Token::RBracket => "']'".into(),
            Token::At => "'@'".into(),
            Token::Eq => "'='".into(),
            Token::Neq => "'!='".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::Colon => "':'".into(),
            Token::Ident(name) => format!("'{name}'"),
            Token::Var(var) => format!("variable {var}"),
            Token::Str(s) => format!("string '{s}'"),
            Token::Int(i) => format!("integer {i}"),
            Token::Float(x) => format!("float {x}"),
        }
    }
}

const END_OF_INPUT: &str = "end of input";

fn lex(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'.' => tokens.push((start, Token::Dot)),
            b'/' => tokens.push((start, Token::Slash)),
            b'[' => tokens.push((start, Token::LBracket)),
            b']' => tokens.push((start, Token::RBracket)),
            b'@' => tokens.push((start, Token::At)),
            b'(' => tokens.push((start, Token::LParen)),
            b')' => tokens.push((start, Token::RParen)),
            b':' => tokens.push((start, Token::Colon)),
            b'=' => tokens.push((start, Token::Eq)),
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    tokens.push((start, Token::Neq));
                    i += 1;
                } else {
                    return Err(ParseError::syntax(i + 1, &["'='"], char_at(src, i + 1)));
                }
            }
            b'\'' | b'`' => {
                let (token, end) = lex_string(src, start, start + 1)?;
                tokens.push((start, token));
                i = end;
                continue;
            }
            b'$' => {
                let mut end = i + 1;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                let var = &src[start..end];
                if !is_valid_var(var) {
                    return Err(ParseError::syntax(
                        start,
                        &["variable like $x"],
                        format!("'{var}'"),
                    ));
                }
                tokens.push((start, Token::Var(var.to_owned())));
                i = end;
                continue;
            }
            b'-' | b'0'..=b'9' => {
                let (token, end) = lex_number(src, start)?;
                tokens.push((start, token));
                i = end;
                continue;
            }
            _ if b.is_ascii_alphabetic() || b == b'_' => {
                let mut end = i + 1;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                tokens.push((start, Token::Ident(src[start..end].to_owned())));
                i = end;
                continue;
            }
            _ => {
                return Err(ParseError::syntax(
                    start,
                    &["a path expression token"],
                    char_at(src, start),
                ));
            }
        }
        i += 1;
    }
    Ok(tokens)
}

/// Reads a string opened at `open` whose content starts at `content`;
/// both quote styles close with a straight quote.
fn lex_string(src: &str, open: usize, content: usize) -> Result<(Token, usize), ParseError> {
    match src[content..].find('\'') {
        Some(rel) => {
            let close = content + rel;
            Ok((Token::Str(src[content..close].to_owned()), close + 1))
        }
        None => Err(ParseError::syntax(
            src.len(),
            &["closing '''"],
            format!("{END_OF_INPUT} (string opened at byte {open})"),
        )),
    }
}

fn lex_number(src: &str, start: usize) -> Result<(Token, usize), ParseError> {
    let bytes = src.as_bytes();
    let mut i = start;
    if bytes[i] == b'-' {
        i += 1;
    }
    let digits_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == digits_start {
        return Err(ParseError::syntax(i, &["a digit"], char_at(src, i)));
    }
    let mut is_float = false;
    if i < bytes.len() && bytes[i] == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
        is_float = true;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            is_float = true;
            i = j;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    let text = &src[start..i];
    let token = if is_float {
        let x: f64 = text.parse().expect("lexed float shape");
        if !x.is_finite() {
            return Err(ParseError::syntax(
                start,
                &["a representable float"],
                format!("'{text}'"),
            ));
        }
        Token::Float(x)
    } else {
        match text.parse::<i64>() {
            Ok(n) => Token::Int(n),
            Err(_) => {
                return Err(ParseError::syntax(
                    start,
                    &["an integer within 64 bits"],
                    format!("'{text}'"),
                ))
            }
        }
    };
    Ok((token, i))
}

fn char_at(src: &str, offset: usize) -> String {
    match src[offset.min(src.len())..].chars().next() {
        Some(c) => format!("'{c}'"),
        None => END_OF_INPUT.to_owned(),
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |(offset, _)| *offset)
    }

    fn found(&self) -> String {
        self.peek()
            .map_or(END_OF_INPUT.to_owned(), |(_, t)| t.describe())
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::syntax(self.here(), expected, self.found()))
    }

    fn expect(&mut self, want: &Token, expected: &[&str]) -> Result<usize, ParseError> {
        match self.peek() {
            Some((offset, t)) if t == want => {
                let offset = *offset;
                self.pos += 1;
                Ok(offset)
            }
            _ => self.fail(expected),
        }
    }

    fn parse_expr(&mut self) -> Result<PathExpr, ParseError> {
        self.expect(&Token::Dot, &["'.'"])?;
        let mut steps = vec![Step::bare(StepKind::Root)];
        let mut on_vertex = true;
        loop {
            match self.peek() {
                None => break,
                Some((_, Token::Slash)) => {
                    self.pos += 1;
                    let step = self.parse_step(on_vertex)?;
                    on_vertex = step.kind.lands_on_vertex();
                    steps.push(step);
                }
                Some(_) => return self.fail(&["'/'", END_OF_INPUT]),
            }
        }
        Ok(PathExpr::new(steps).expect("parser enforces expression structure"))
    }

    fn parse_step(&mut self, on_vertex: bool) -> Result<Step, ParseError> {
        let allowed = if on_vertex {
            StepKind::EDGE_STEPS
        } else {
            StepKind::VERTEX_STEPS
        };
        let allowed_names: Vec<&str> = allowed.iter().map(StepKind::name).collect();
        let (offset, name) = match self.peek() {
            Some((offset, Token::Ident(name))) => (*offset, name.clone()),
            _ => return self.fail(&allowed_names),
        };
        self.pos += 1;
        let Some(kind) = StepKind::from_name(&name) else {
            return Err(ParseError::syntax(
                offset,
                &allowed_names,
                format!("'{name}'"),
            ));
        };
        if kind.lands_on_vertex() == on_vertex {
            return Err(ParseError::Type {
                offset,
                step: name,
                position: if on_vertex { "vertex" } else { "edge" }.to_owned(),
                expected: allowed_names.iter().map(|s| (*s).to_owned()).collect(),
            });
        }
        let mut predicates = Vec::new();
        while matches!(self.peek(), Some((_, Token::LBracket))) {
            self.pos += 1;
            predicates.push(self.parse_predicate()?);
            self.expect(&Token::RBracket, &["']'"])?;
        }
        Ok(Step::new(kind, predicates))
    }

    fn parse_predicate(&mut self) -> Result<Predicate, ParseError> {
        match self.peek() {
            Some((_, Token::At)) => {
                self.pos += 1;
                let key = match self.peek() {
                    Some((_, Token::Ident(key))) => key.clone(),
                    _ => return self.fail(&["a property key"]),
                };
                self.pos += 1;
                let negated = match self.peek() {
                    Some((_, Token::Eq)) => false,
                    Some((_, Token::Neq)) => true,
                    _ => return self.fail(&["'='", "'!='"]),
                };
                self.pos += 1;
                let value = self.parse_literal()?;
                Ok(Predicate::PropEq {
                    key,
                    value,
                    negated,
                })
            }
            Some((_, Token::Ident(name))) if name == "g" => {
                self.pos += 1;
                self.expect(&Token::Colon, &["':'"])?;
                let (which_offset, which) = match self.peek() {
                    Some((offset, Token::Ident(which))) => (*offset, which.clone()),
                    _ => return self.fail(&["'assign'", "'except'"]),
                };
                self.pos += 1;
                match which.as_str() {
                    "assign" => {
                        self.expect(&Token::LParen, &["'('"])?;
                        let var = match self.peek() {
                            Some((offset, Token::Str(s))) => {
                                if !is_valid_var(s) {
                                    return Err(ParseError::syntax(
                                        *offset,
                                        &["a quoted variable like '$x'"],
                                        format!("string '{s}'"),
                                    ));
                                }
                                let s = s.clone();
                                self.pos += 1;
                                s
                            }
                            _ => return self.fail(&["a quoted variable like '$x'"]),
                        };
                        self.expect(&Token::RParen, &["')'"])?;
                        Ok(Predicate::Assign { var })
                    }
                    "except" => {
                        self.expect(&Token::LParen, &["'('"])?;
                        let var = match self.peek() {
                            Some((_, Token::Var(var))) => var.clone(),
                            _ => return self.fail(&["a variable like $x"]),
                        };
                        self.pos += 1;
                        self.expect(&Token::RParen, &["')'"])?;
                        Ok(Predicate::Except { var })
                    }
                    _ => Err(ParseError::syntax(
                        which_offset,
                        &["'assign'", "'except'"],
                        format!("'{which}'"),
                    )),
                }
            }
            _ => self.fail(&["'@'", "'g'"]),
        }
    }

    fn parse_literal(&mut self) -> Result<PropertyValue, ParseError> {
        match self.peek() {
            Some((_, Token::Str(s))) => {
                let v = PropertyValue::text(s.clone());
                self.pos += 1;
                Ok(v)
            }
            Some((_, Token::Int(i))) => {
                let v = PropertyValue::Int(*i);
                self.pos += 1;
                Ok(v)
            }
            Some((_, Token::Float(x))) => {
                let v = PropertyValue::Float(*x);
                self.pos += 1;
                Ok(v)
            }
            Some((_, Token::Ident(name))) if name == "true" || name == "false" => {
                let v = PropertyValue::Bool(name == "true");
                self.pos += 1;
                Ok(v)
            }
            _ => self.fail(&["a string", "a number", "'true'", "'false'"]),
        }
    }
}

/// Parses expression text into a validated [`PathExpr`].
pub fn parse(src: &str) -> Result<PathExpr, ParseError> {
    let tokens = lex(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: src.len(),
    };
    parser.parse_expr()
}
