use super::ast::{Atom, Axis, Literal, Relation, StlFormula, TemporalConjunct, TemporalOp};
use std::fmt;
use thiserror::Error;

/// Which rule of the restricted fragment an input violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentRule {
    /// `|` anywhere: conjunction is the only boolean combination.
    Disjunction,
    /// `->` anywhere: conjunction is the only boolean combination.
    Implication,
    /// `G`/`F` inside the body of another temporal operator.
    NestedTemporal,
    /// `!` applied to anything but a single atom.
    NegatedNonAtom,
    /// Temporal window must satisfy `0 <= t1 < t2`.
    WindowOrder,
}

impl fmt::Display for FragmentRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentRule::Disjunction => {
                write!(f, "disjunction is not allowed; conjunction is the only boolean combination")
            }
            FragmentRule::Implication => {
                write!(f, "implication is not allowed; conjunction is the only boolean combination")
            }
            FragmentRule::NestedTemporal => {
                write!(f, "nesting of temporal operators is not allowed")
            }
            FragmentRule::NegatedNonAtom => {
                write!(f, "only atomic formulas can be negated")
            }
            FragmentRule::WindowOrder => {
                write!(f, "temporal window must satisfy 0 <= t1 < t2")
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("fragment violation at byte {offset}: {rule}")]
    Fragment { offset: usize, rule: FragmentRule },
}

impl ParseError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { offset, message: message.into() }
    }

    fn fragment(offset: usize, rule: FragmentRule) -> Self {
        ParseError::Fragment { offset, rule }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Always,
    Eventually,
    AxisX,
    AxisY,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Amp,
    Bang,
    Ge,
    Gt,
    Eq,
    Pipe,
    Arrow,
    Num(f64),
}

#[derive(Debug, Clone, Copy)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'#' => {
                // line comment
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'G' => {
                tokens.push(Token { tok: Tok::Always, offset: start });
                i += 1;
            }
            b'F' => {
                tokens.push(Token { tok: Tok::Eventually, offset: start });
                i += 1;
            }
            b'x' => {
                tokens.push(Token { tok: Tok::AxisX, offset: start });
                i += 1;
            }
            b'y' => {
                tokens.push(Token { tok: Tok::AxisY, offset: start });
                i += 1;
            }
            b'[' => {
                tokens.push(Token { tok: Tok::LBracket, offset: start });
                i += 1;
            }
            b']' => {
                tokens.push(Token { tok: Tok::RBracket, offset: start });
                i += 1;
            }
            b'(' => {
                tokens.push(Token { tok: Tok::LParen, offset: start });
                i += 1;
            }
            b')' => {
                tokens.push(Token { tok: Tok::RParen, offset: start });
                i += 1;
            }
            b',' => {
                tokens.push(Token { tok: Tok::Comma, offset: start });
                i += 1;
            }
            b'&' => {
                tokens.push(Token { tok: Tok::Amp, offset: start });
                i += 1;
            }
            b'!' => {
                tokens.push(Token { tok: Tok::Bang, offset: start });
                i += 1;
            }
            b'|' => {
                tokens.push(Token { tok: Tok::Pipe, offset: start });
                i += 1;
            }
            b'>' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'=' {
                    tokens.push(Token { tok: Tok::Ge, offset: start });
                    i += 2;
                } else {
                    tokens.push(Token { tok: Tok::Gt, offset: start });
                    i += 1;
                }
            }
            b'=' => {
                tokens.push(Token { tok: Tok::Eq, offset: start });
                i += 1;
            }
            b'-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    tokens.push(Token { tok: Tok::Arrow, offset: start });
                    i += 2;
                } else {
                    i = lex_number(bytes, start, &mut tokens)?;
                }
            }
            b'0'..=b'9' | b'.' | b'+' => {
                i = lex_number(bytes, start, &mut tokens)?;
            }
            _ => {
                return Err(ParseError::syntax(
                    start,
                    format!("unexpected character '{}'", text[start..].chars().next().unwrap()),
                ));
            }
        }
    }
    Ok(tokens)
}

fn lex_number(bytes: &[u8], start: usize, tokens: &mut Vec<Token>) -> Result<usize, ParseError> {
    let mut i = start;
    if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
        i += 1;
    }
    let digits_start = i;
    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
        i += 1;
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        i += 1;
        if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
            i += 1;
        }
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i == digits_start {
        return Err(ParseError::syntax(start, "expected a number"));
    }
    let text = std::str::from_utf8(&bytes[start..i]).expect("lexed ascii");
    let value: f64 = text
        .parse()
        .map_err(|_| ParseError::syntax(start, format!("invalid number '{text}'")))?;
    if !value.is_finite() {
        return Err(ParseError::syntax(start, format!("non-finite number '{text}'")));
    }
    tokens.push(Token { tok: Tok::Num(value), offset: start });
    Ok(i)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).copied();
        self.pos += 1;
        t
    }

    fn offset(&self) -> usize {
        self.peek().map(|t| t.offset).unwrap_or(self.len)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        match self.next() {
            Some(t) if t.tok == want => Ok(t),
            Some(t) => Err(ParseError::syntax(t.offset, format!("expected {what}"))),
            None => Err(ParseError::syntax(self.len, format!("expected {what}, found end of input"))),
        }
    }

    fn expect_num(&mut self) -> Result<(f64, usize), ParseError> {
        match self.next() {
            Some(Token { tok: Tok::Num(v), offset }) => Ok((v, offset)),
            Some(t) => Err(ParseError::syntax(t.offset, "expected a number")),
            None => Err(ParseError::syntax(self.len, "expected a number, found end of input")),
        }
    }

    fn parse_formula(&mut self) -> Result<StlFormula, ParseError> {
        let mut conjuncts = vec![self.parse_tconj()?];
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Amp => {
                    self.pos += 1;
                    conjuncts.push(self.parse_tconj()?);
                }
                _ => {
                    return Err(ParseError::syntax(
                        t.offset,
                        "expected '&' between temporal conjuncts or end of input",
                    ));
                }
            }
        }
        Ok(StlFormula { conjuncts })
    }

    fn parse_tconj(&mut self) -> Result<TemporalConjunct, ParseError> {
        let op = match self.next() {
            Some(Token { tok: Tok::Always, .. }) => TemporalOp::Always,
            Some(Token { tok: Tok::Eventually, .. }) => TemporalOp::Eventually,
            Some(Token { tok: Tok::Bang, offset }) => {
                // `!G[..]` negates a temporal formula; anything else here is
                // an unquantified literal, a plain syntax problem.
                if matches!(self.peek(), Some(Token { tok: Tok::Always | Tok::Eventually, .. })) {
                    return Err(ParseError::fragment(offset, FragmentRule::NegatedNonAtom));
                }
                return Err(ParseError::syntax(
                    offset,
                    "expected 'G' or 'F' (every conjunct must be temporally quantified)",
                ));
            }
            Some(t) => {
                return Err(ParseError::syntax(
                    t.offset,
                    "expected 'G' or 'F' (every conjunct must be temporally quantified)",
                ));
            }
            None => {
                return Err(ParseError::syntax(self.len, "expected a formula, found end of input"));
            }
        };
        self.expect(Tok::LBracket, "'['")?;
        let (t1, t1_off) = self.expect_num()?;
        self.expect(Tok::Comma, "','")?;
        let (t2, _) = self.expect_num()?;
        self.expect(Tok::RBracket, "']'")?;
        if !(t1 >= 0.0 && t1 < t2) {
            return Err(ParseError::fragment(t1_off, FragmentRule::WindowOrder));
        }
        self.expect(Tok::LParen, "'('")?;
        let mut body = vec![self.parse_literal()?];
        loop {
            match self.peek() {
                Some(Token { tok: Tok::Amp, .. }) => {
                    self.pos += 1;
                    body.push(self.parse_literal()?);
                }
                Some(Token { tok: Tok::RParen, .. }) => {
                    self.pos += 1;
                    break;
                }
                Some(t) => {
                    return Err(ParseError::syntax(t.offset, "expected '&' or ')'"));
                }
                None => {
                    return Err(ParseError::syntax(self.len, "expected ')', found end of input"));
                }
            }
        }
        Ok(TemporalConjunct { op, window: (t1, t2), body })
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        let negated = matches!(self.peek(), Some(Token { tok: Tok::Bang, .. }));
        if negated {
            self.pos += 1;
        }
        match self.peek() {
            Some(Token { tok: Tok::Always | Tok::Eventually, offset }) => {
                let offset = *offset;
                // A temporal operator in literal position is nesting; under a
                // bang it is first of all a negation of a non-atom.
                if negated {
                    return Err(ParseError::fragment(offset, FragmentRule::NegatedNonAtom));
                }
                return Err(ParseError::fragment(offset, FragmentRule::NestedTemporal));
            }
            Some(Token { tok: Tok::LParen, .. }) => {
                let lparen_off = self.offset();
                self.pos += 1;
                if matches!(self.peek(), Some(Token { tok: Tok::Always | Tok::Eventually, .. })) {
                    let offset = self.offset();
                    if negated {
                        return Err(ParseError::fragment(offset, FragmentRule::NegatedNonAtom));
                    }
                    return Err(ParseError::fragment(offset, FragmentRule::NestedTemporal));
                }
                if negated && matches!(self.peek(), Some(Token { tok: Tok::Bang, .. })) {
                    // `!(!(..))`: negation scoped over a negation
                    return Err(ParseError::fragment(self.offset(), FragmentRule::NegatedNonAtom));
                }
                let atom = self.parse_atom()?;
                match self.peek() {
                    Some(Token { tok: Tok::RParen, .. }) => {
                        self.pos += 1;
                        Ok(Literal { atom, negated })
                    }
                    Some(Token { tok: Tok::Amp, offset }) if negated => {
                        // `!(p & q)`: negation scoped over a conjunction.
                        Err(ParseError::fragment(*offset, FragmentRule::NegatedNonAtom))
                    }
                    Some(t) => Err(ParseError::syntax(t.offset, "expected ')'")),
                    None => Err(ParseError::syntax(
                        self.len,
                        format!("unclosed '(' opened at byte {lparen_off}"),
                    )),
                }
            }
            _ => {
                let atom = self.parse_atom()?;
                Ok(Literal { atom, negated })
            }
        }
    }

    fn parse_atom(&mut self) -> Result<Atom, ParseError> {
        let axis = match self.next() {
            Some(Token { tok: Tok::AxisX, .. }) => Axis::X,
            Some(Token { tok: Tok::AxisY, .. }) => Axis::Y,
            Some(t) => {
                return Err(ParseError::syntax(t.offset, "expected 'x' or 'y'"));
            }
            None => {
                return Err(ParseError::syntax(self.len, "expected an atom, found end of input"));
            }
        };
        let relation = match self.next() {
            Some(Token { tok: Tok::Ge, .. }) => Relation::Ge,
            Some(Token { tok: Tok::Gt, .. }) => Relation::Gt,
            Some(Token { tok: Tok::Eq, .. }) => Relation::Eq,
            Some(t) => {
                return Err(ParseError::syntax(t.offset, "expected '>=', '>' or '='"));
            }
            None => {
                return Err(ParseError::syntax(self.len, "expected a relation, found end of input"));
            }
        };
        let (threshold, _) = self.expect_num()?;
        Ok(Atom { axis, relation, threshold })
    }
}

/// Parse a formula of the restricted fragment.
///
/// Disallowed connectives are rejected wherever they occur, so inputs
/// containing `|` or `->` can never mis-parse as something else.
pub fn parse(text: &str) -> Result<StlFormula, ParseError> {
    let tokens = lex(text)?;
    for t in &tokens {
        match t.tok {
            Tok::Pipe => return Err(ParseError::fragment(t.offset, FragmentRule::Disjunction)),
            Tok::Arrow => return Err(ParseError::fragment(t.offset, FragmentRule::Implication)),
            _ => {}
        }
    }
    let mut parser = Parser { tokens, pos: 0, len: text.len() };
    parser.parse_formula()
}
