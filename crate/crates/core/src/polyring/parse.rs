//! Polynomial expressions:
//!
//! ```text
//! expression := ['+'|'-'] term (('+'|'-') term)*
//! term       := int | [int '*'] factor ('*' factor)*
//! factor     := 'x' index ['^' exponent]
//! ```
//!
//! Whitespace is ignored. Integers of any length are reduced modulo `p^e`.

use std::sync::Arc;

use super::poly::{weighted_degree, Poly, TermBuf};
use super::ring::{RingSpec, MAX_EXPONENT};
use super::AlgebraError;

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> AlgebraError {
        AlgebraError::Parse { offset: self.pos, message: message.into() }
    }

    fn digits(&mut self) -> Result<&'a [u8], AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a decimal integer"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn small_int(&mut self, what: &str) -> Result<u64, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        let ds = self.digits()?;
        let mut v: u64 = 0;
        for &d in ds {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((d - b'0') as u64))
                .filter(|v| *v <= MAX_EXPONENT)
                .ok_or(AlgebraError::Parse { offset: start, message: format!("{what} too large") })?;
        }
        Ok(v)
    }
}

/// Parses `src` into a polynomial over `ring`.
pub fn parse_poly(src: &str, ring: impl Into<Arc<RingSpec>>) -> Result<Poly, AlgebraError> {
    let ring = ring.into();
    let m = ring.modulus();
    let mut cur = Cursor { src: src.as_bytes(), pos: 0 };
    let mut buf = TermBuf::new(ring.nvars());
    let mut negative = false;
    match cur.peek() {
        Some(b'-') => {
            negative = true;
            cur.pos += 1;
        }
        Some(b'+') => cur.pos += 1,
        None => return Err(cur.err("empty expression")),
        _ => {}
    }
    loop {
        let (exps, coeff) = parse_term(&mut cur, &ring)?;
        let coeff = if negative { (m - coeff) % m } else { coeff };
        buf.push(&exps, coeff);
        match cur.peek() {
            None => break,
            Some(b'+') => negative = false,
            Some(b'-') => negative = true,
            Some(c) => return Err(cur.err(format!("unexpected '{}'", c as char))),
        }
        cur.pos += 1;
    }
    Ok(buf.finish(ring))
}

fn parse_term(cur: &mut Cursor<'_>, ring: &RingSpec) -> Result<(Vec<u64>, u64), AlgebraError> {
    let n = ring.nvars();
    let m = ring.modulus();
    let mut exps = vec![0u64; n];
    let mut coeff: u64 = 1;
    let start = cur.pos;
    let mut first = true;
    loop {
        match cur.peek() {
            Some(c) if c.is_ascii_digit() => {
                let mut v: u64 = 0;
                for &d in cur.digits()? {
                    v = ((v as u128 * 10 + (d - b'0') as u128) % m as u128) as u64;
                }
                coeff = ((coeff as u128 * v as u128) % m as u128) as u64;
            }
            Some(b'x') => {
                cur.pos += 1;
                let at = cur.pos;
                let idx = cur.small_int("variable index")?;
                if idx as usize >= n || idx > usize::MAX as u64 {
                    return Err(AlgebraError::Parse {
                        offset: at,
                        message: format!("variable x{idx} out of range for {n} variables"),
                    });
                }
                let mut e = 1;
                if cur.peek() == Some(b'^') {
                    cur.pos += 1;
                    e = cur.small_int("exponent")?;
                }
                let slot = &mut exps[idx as usize];
                *slot = slot
                    .checked_add(e)
                    .filter(|v| *v <= MAX_EXPONENT)
                    .ok_or(AlgebraError::Parse { offset: at, message: "exponent overflow".into() })?;
            }
            _ => {
                return Err(cur.err(if first { "expected a term" } else { "expected a factor after '*'" }));
            }
        }
        first = false;
        if cur.peek() == Some(b'*') {
            cur.pos += 1;
        } else {
            break;
        }
    }
    weighted_degree(&exps, ring.weights())
        .map_err(|_| AlgebraError::Parse { offset: start, message: "weighted degree overflow".into() })?;
    Ok((exps, coeff))
}
