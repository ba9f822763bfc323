//! Plain-text form of multivectors: `Cl(3,0) 1 + 3.5*e1^e3 - 2*e2`.
//!
//! Generator labels are one-based. `^` is the outer product of distinct
//! generators, so a repeated generator makes the term vanish and an
//! out-of-order blade picks up the permutation sign. Coefficients print in
//! Rust's shortest round-trip form, so print followed by parse is exact.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};
use core::str::FromStr;

use super::{Blade, CliffordError, Multivector, Signature};

pub(crate) fn write_coeff(out: &mut String, c: f64) {
    let a = c.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        let _ = write!(out, "{:e}", c);
    } else {
        let _ = write!(out, "{}", c);
    }
}

impl Multivector {
    /// Terms only, without the signature header.
    pub fn terms_to_string(&self) -> String {
        let mut out = String::new();
        if self.is_zero() {
            out.push('0');
            return out;
        }
        for (i, (blade, c)) in self.terms().enumerate() {
            let mag = if i == 0 {
                if c < 0.0 {
                    out.push('-');
                }
                c.abs()
            } else {
                out.push_str(if c < 0.0 { " - " } else { " + " });
                c.abs()
            };
            if blade == Blade::SCALAR {
                write_coeff(&mut out, mag);
            } else if mag == 1.0 {
                let _ = write!(out, "{}", blade);
            } else {
                write_coeff(&mut out, mag);
                let _ = write!(out, "*{}", blade);
            }
        }
        out
    }

    /// Parse a term list against a known signature (no header).
    pub fn parse_terms(signature: Signature, text: &str) -> Result<Multivector, CliffordError> {
        TermParser { src: text, pos: 0, sig: signature }.parse_all()
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.signature(), self.terms_to_string())
    }
}

impl FromStr for Multivector {
    type Err = CliffordError;

    /// Requires the `Cl(p,q)` header.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim_start();
        let rest = s.strip_prefix("Cl(").ok_or(CliffordError::Parse { pos: 0, msg: "expected `Cl(p,q)` header" })?;
        let close = rest.find(')').ok_or(CliffordError::Parse { pos: 3, msg: "unterminated signature header" })?;
        let inner = &rest[..close];
        let mut parts = inner.split(',');
        let bad = CliffordError::Parse { pos: 3, msg: "malformed signature header" };
        let p: usize = parts.next().and_then(|x| x.trim().parse().ok()).ok_or(bad.clone())?;
        let q: usize = parts.next().and_then(|x| x.trim().parse().ok()).ok_or(bad.clone())?;
        if parts.next().is_some() {
            return Err(bad);
        }
        let sig = Signature::new(p, q)?;
        let offset = 3 + close + 1;
        TermParser { src: &s[offset..], pos: 0, sig }
            .parse_all()
            .map_err(|e| match e {
                CliffordError::Parse { pos, msg } => CliffordError::Parse { pos: pos + offset, msg },
                other => other,
            })
    }
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
    sig: Signature,
}

impl TermParser<'_> {
    fn err(&self, msg: &'static str) -> CliffordError {
        CliffordError::Parse { pos: self.pos, msg }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn parse_all(mut self) -> Result<Multivector, CliffordError> {
        let mut mv = Multivector::zero(self.sig);
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.err("empty multivector"));
        }
        let mut sign = 1.0;
        if let Some(c @ (b'+' | b'-')) = self.peek() {
            sign = if c == b'-' { -1.0 } else { 1.0 };
            self.pos += 1;
        }
        loop {
            let (coeff, blade) = self.term()?;
            if let Some(blade) = blade {
                let (s, b) = blade;
                mv.add_term(b, sign * s * coeff)?;
            }
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => sign = 1.0,
                Some(b'-') => sign = -1.0,
                Some(_) => return Err(self.err("expected `+` or `-` between terms")),
            }
            self.pos += 1;
        }
        Ok(mv)
    }

    /// One term: `coeff`, `blade`, or `coeff*blade`. The blade is `None`
    /// when it vanishes (repeated generator).
    #[allow(clippy::type_complexity)]
    fn term(&mut self) -> Result<(f64, Option<(f64, Blade)>), CliffordError> {
        self.skip_ws();
        match self.peek() {
            Some(b'e') => Ok((1.0, self.blade()?)),
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let coeff = self.number()?;
                self.skip_ws();
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    self.skip_ws();
                    Ok((coeff, self.blade()?))
                } else {
                    Ok((coeff, Some((1.0, Blade::SCALAR))))
                }
            }
            _ => Err(self.err("expected a number or a blade")),
        }
    }

    fn number(&mut self) -> Result<f64, CliffordError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while let Some(&c) = bytes.get(self.pos) {
            let exp_sign = (c == b'+' || c == b'-') && matches!(bytes.get(self.pos - 1), Some(b'e' | b'E'));
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text.parse().map_err(|_| CliffordError::Parse { pos: start, msg: "malformed number" })?;
        if !v.is_finite() {
            return Err(CliffordError::Parse { pos: start, msg: "non-finite coefficient" });
        }
        Ok(v)
    }

    fn blade(&mut self) -> Result<Option<(f64, Blade)>, CliffordError> {
        let mut gens: Vec<usize> = Vec::new();
        loop {
            if self.peek() != Some(b'e') {
                return Err(self.err("expected generator `e<k>`"));
            }
            self.pos += 1;
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            let idx: usize = self.src[start..self.pos]
                .parse()
                .map_err(|_| CliffordError::Parse { pos: start, msg: "expected generator index" })?;
            if idx == 0 || idx > self.sig.dim() {
                return Err(CliffordError::Parse { pos: start, msg: "generator index out of range" });
            }
            gens.push(idx - 1);
            if self.peek() == Some(b'^') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(wedge_of(&gens, self.sig))
    }
}

/// Outer product of the listed generators as `sign * blade`, or `None` if a
/// generator repeats.
pub(crate) fn wedge_of(gens: &[usize], sig: Signature) -> Option<(f64, Blade)> {
    let mut mask = 0u16;
    for &g in gens {
        if mask & (1 << g) != 0 {
            return None;
        }
        mask |= 1 << g;
    }
    Some(Blade::from_ordered(gens, sig))
}
