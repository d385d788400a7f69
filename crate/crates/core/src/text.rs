//! Text syntax for polynomials, shared by every file format and the CLI.
//!
//! Terms are joined by `+`/`-`, coefficients are `num` or `num/den`,
//! variables are `x[p]` / `~x[p]` (or `x[i,j]` on grid spaces) with an
//! optional `^e` exponent, e.g. `4*x[1]^2 - 1/2*~x[1] + 3`. Printing is
//! deterministic: terms appear in descending graded-lexicographic order.

use num_traits::One;
use thiserror::Error;

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::space::{VarId, VariableSpace};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{0}` at byte {1}")]
    Unexpected(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("variable {0} is outside the space ({1})")]
    OutOfSpace(String, String),
    #[error("grid coordinates used but the space has no grid shape")]
    NoGrid,
    #[error("expected a single monomial with coefficient 1, got `{0}`")]
    NotAMonomial(String),
    #[error("{0}")]
    Other(String),
}

pub fn parse_scalar<T: Scalar>(s: &str) -> Result<T, ParseError> {
    T::from_str(s.trim()).map_err(|_| ParseError::BadNumber(s.trim().to_string()))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { bytes: s.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn expect(&mut self, want: u8) -> Result<(), ParseError> {
        match self.bump() {
            Some(b) if b == want => Ok(()),
            Some(b) => Err(ParseError::Unexpected(b as char, self.pos - 1)),
            None => Err(ParseError::UnexpectedEnd),
        }
    }

    fn eat(&mut self, want: u8) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.bytes.get(self.pos) {
                Some(&b) => Err(ParseError::Unexpected(b as char, self.pos)),
                None => Err(ParseError::UnexpectedEnd),
            };
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).unwrap())
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        let d = self.digits()?;
        d.parse().map_err(|_| ParseError::BadNumber(d.to_string()))
    }
}

fn parse_variable(cur: &mut Cursor, space: &VariableSpace) -> Result<VarId, ParseError> {
    let negated = cur.eat(b'~');
    cur.expect(b'x')?;
    cur.expect(b'[')?;
    let first = cur.number()?;
    let pair = if cur.eat(b',') {
        let second = cur.number()?;
        let (rows, cols) = space.grid_shape().ok_or(ParseError::NoGrid)?;
        if first == 0 || second == 0 || first > rows as u64 || second > cols as u64 {
            return Err(ParseError::OutOfSpace(
                format!("x[{first},{second}]"),
                space.to_string(),
            ));
        }
        space.pair_at(first as u32 - 1, second as u32 - 1)
    } else {
        if first == 0 || first > space.n_pairs() as u64 {
            return Err(ParseError::OutOfSpace(format!("x[{first}]"), space.to_string()));
        }
        first as u32 - 1
    };
    cur.expect(b']')?;
    Ok(VarId { pair, negated })
}

/// One signed term: optional coefficient, optional variable factors.
fn parse_term<T: Scalar>(
    cur: &mut Cursor,
    space: &VariableSpace,
) -> Result<(Monomial, T), ParseError> {
    let mut coeff = T::one();
    let mut saw_anything = false;

    if matches!(cur.peek(), Some(b) if b.is_ascii_digit()) {
        let num = cur.digits()?.to_string();
        let text = if cur.eat(b'/') {
            let den = cur.digits()?;
            format!("{num}/{den}")
        } else {
            num
        };
        coeff = parse_scalar(&text)?;
        saw_anything = true;
        if !cur.eat(b'*') {
            return Ok((Monomial::one(), coeff));
        }
    }

    let mut factors: Vec<(VarId, u32)> = Vec::new();
    loop {
        match cur.peek() {
            Some(b'x') | Some(b'~') => {
                let v = parse_variable(cur, space)?;
                let e = if cur.eat(b'^') { cur.number()? as u32 } else { 1 };
                factors.push((v, e));
                saw_anything = true;
                if !cur.eat(b'*') {
                    break;
                }
            }
            Some(b) if !saw_anything => return Err(ParseError::Unexpected(b as char, cur.pos)),
            None if !saw_anything => return Err(ParseError::UnexpectedEnd),
            _ => break,
        }
    }
    Ok((Monomial::from_factors(factors), coeff))
}

pub fn parse_poly<T: Scalar>(
    input: &str,
    space: &VariableSpace,
) -> Result<Polynomial<T>, ParseError> {
    let mut cur = Cursor::new(input);
    let mut out = Polynomial::zero();
    let mut negative = match cur.peek() {
        Some(b'-') => {
            cur.bump();
            true
        }
        Some(b'+') => {
            cur.bump();
            false
        }
        Some(_) => false,
        None => return Err(ParseError::UnexpectedEnd),
    };
    loop {
        let (m, c) = parse_term::<T>(&mut cur, space)?;
        let signed = if negative { c.neg() } else { c };
        out = &out + &Polynomial::monomial(m, signed);
        match cur.peek() {
            Some(b'+') => {
                cur.bump();
                negative = false;
            }
            Some(b'-') => {
                cur.bump();
                negative = true;
            }
            Some(b) => return Err(ParseError::Unexpected(b as char, cur.pos)),
            None => break,
        }
    }
    Ok(out)
}

/// Parses a single variable token such as `x[2]`, `~x[1,3]`.
pub fn parse_var(input: &str, space: &VariableSpace) -> Result<VarId, ParseError> {
    let mut cur = Cursor::new(input);
    let v = parse_variable(&mut cur, space)?;
    match cur.peek() {
        None => Ok(v),
        Some(b) => Err(ParseError::Unexpected(b as char, cur.pos)),
    }
}

pub fn monomial_to_text(m: &Monomial, space: &VariableSpace) -> String {
    if m.is_one() {
        return "1".to_string();
    }
    m.iter()
        .map(|(v, e)| {
            let tok = space.var_token(v);
            if e == 1 {
                tok
            } else {
                format!("{tok}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Parses a single monomial: either `1` or a product of variable factors.
pub fn parse_monomial(input: &str, space: &VariableSpace) -> Result<Monomial, ParseError> {
    let poly: Polynomial<crate::Rat> = parse_poly(input, space)?;
    let mut it = poly.iter();
    match (it.next(), it.next()) {
        (Some((m, c)), None) if c.is_one() => Ok(m.clone()),
        _ => Err(ParseError::NotAMonomial(input.trim().to_string())),
    }
}

pub fn poly_to_text<T: Scalar>(p: &Polynomial<T>, space: &VariableSpace) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    // Descending graded-lexicographic order.
    for (i, (m, c)) in p.iter().rev().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        if m.is_one() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&monomial_to_text(m, space));
        } else {
            out.push_str(&format!("{}*{}", mag, monomial_to_text(m, space)));
        }
    }
    out
}

impl<T: Scalar> Polynomial<T> {
    pub fn to_text(&self, space: &VariableSpace) -> String {
        poly_to_text(self, space)
    }

    pub fn parse(input: &str, space: &VariableSpace) -> Result<Self, ParseError> {
        parse_poly(input, space)
    }
}
