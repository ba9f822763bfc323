//! Text grammar for symbolic fields:
//!
//! ```text
//! field   := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor* blade?            (at least one of the two)
//! factor  := primary ('/' primary)*    (juxtaposition or '*' multiplies)
//! primary := number | x<i> | symbol | d_<i>(sum) | exp(sum) | ln(sum) | (sum)
//! blade   := e<i> ('^' e<i>)*
//! ```
//!
//! Indices are one-based. Decimal numbers become exact rationals.

use alloc::vec::Vec;

use num_traits::{CheckedAdd, CheckedMul};

use super::expr::{Dependencies, Rational, ScalarExpr};
use super::field::SymField;
use super::SymError;
use crate::clifford::{wedge_of, Blade, Signature};

pub fn parse_field(text: &str, signature: Signature, deps: &Dependencies) -> Result<SymField, SymError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim: signature.dim(), deps, sig: signature };
    let f = p.field()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

/// Scalar expression in `dim` coordinates; blades are rejected.
pub fn parse_scalar(text: &str, dim: usize, deps: &Dependencies) -> Result<ScalarExpr, SymError> {
    let sig = Signature::euclidean(dim.min(crate::clifford::MAX_GENERATORS))?;
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim, deps, sig };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
    deps: &'a Dependencies,
    sig: Signature,
}

enum Ident<'a> {
    Blade,
    Coord(usize),
    Deriv(usize),
    Exp,
    Ln,
    Symbol(&'a str),
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &'static str) -> SymError {
        SymError::Parse { pos: self.pos, msg }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, msg: &'static str) -> Result<(), SymError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(msg))
        }
    }

    fn ident_end(&self) -> usize {
        let mut end = self.pos;
        while let Some(&c) = self.src.get(end) {
            if c.is_ascii_alphanumeric() || c == b'_' {
                end += 1;
            } else {
                break;
            }
        }
        end
    }

    /// Classify the identifier at the cursor without consuming it.
    fn classify(&self) -> Result<(Ident<'a>, usize), SymError> {
        let end = self.ident_end();
        let src: &'a [u8] = self.src;
        let word = core::str::from_utf8(&src[self.pos..end]).map_err(|_| self.err("invalid identifier"))?;
        let index = |digits: &str, skip: usize| -> Result<usize, SymError> {
            let pos = self.pos + skip;
            let i: usize = digits.parse().map_err(|_| SymError::Parse { pos, msg: "index too large" })?;
            if i == 0 || i > self.dim {
                return Err(SymError::IndexOutOfRange { pos, index: i, dim: self.dim });
            }
            Ok(i)
        };
        let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        let kind = if let Some(d) = word.strip_prefix('e').filter(|d| all_digits(d)) {
            index(d, 1)?;
            Ident::Blade
        } else if let Some(d) = word.strip_prefix('x').filter(|d| all_digits(d)) {
            Ident::Coord(index(d, 1)?)
        } else if let Some(d) = word.strip_prefix("d_").filter(|d| all_digits(d)) {
            Ident::Deriv(index(d, 2)?)
        } else if word == "exp" {
            Ident::Exp
        } else if word == "ln" {
            Ident::Ln
        } else {
            Ident::Symbol(word)
        };
        Ok((kind, end))
    }

    fn field(&mut self) -> Result<SymField, SymError> {
        let mut out = SymField::zero(self.sig, self.deps.clone());
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.err("empty expression"));
        }
        let mut negative = false;
        if self.eat(b'-') {
            negative = true;
        } else {
            self.eat(b'+');
        }
        loop {
            let (coeff, blade) = self.term()?;
            if let Some((sign, b)) = blade {
                let c = if negative != (sign < 0.0) { coeff.neg() } else { coeff };
                out.add_term(b, &c)?;
            }
            self.skip_ws();
            match self.peek() {
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(out)
    }

    /// One field term; the blade is `None` when a generator repeats.
    fn term(&mut self) -> Result<(ScalarExpr, Option<(f64, Blade)>), SymError> {
        let mut coeff = ScalarExpr::one();
        let mut any = false;
        loop {
            self.skip_ws();
            if self.starts_blade()? {
                return Ok((coeff, self.blade()?));
            }
            if !self.starts_primary() {
                break;
            }
            coeff = coeff.mul(&self.factor()?);
            any = true;
            if self.eat(b'*') && !self.starts_primary_or_blade()? {
                return Err(self.err("expected a factor after `*`"));
            }
        }
        if !any {
            return Err(self.err("expected a term"));
        }
        Ok((coeff, Some((1.0, Blade::SCALAR))))
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_' || c == b'(' || c == b'.')
    }

    fn starts_blade(&self) -> Result<bool, SymError> {
        if !matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            return Ok(false);
        }
        Ok(matches!(self.classify()?.0, Ident::Blade))
    }

    fn starts_primary_or_blade(&mut self) -> Result<bool, SymError> {
        self.skip_ws();
        Ok(self.starts_primary() || self.starts_blade()?)
    }

    fn blade(&mut self) -> Result<Option<(f64, Blade)>, SymError> {
        let mut gens: Vec<usize> = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            match self.classify() {
                Ok((Ident::Blade, end)) => {
                    let i: usize = core::str::from_utf8(&self.src[start + 1..end]).ok().and_then(|s| s.parse().ok()).unwrap_or(0);
                    gens.push(i - 1);
                    self.pos = end;
                }
                Ok(_) => return Err(self.err("expected generator `e<k>`")),
                Err(e) => return Err(e),
            }
            if !self.eat(b'^') {
                break;
            }
        }
        Ok(wedge_of(&gens, self.sig))
    }

    /// `[±] product (± product)*` with no blades.
    fn sum(&mut self) -> Result<ScalarExpr, SymError> {
        let mut out = ScalarExpr::zero();
        let mut negative = self.eat(b'-');
        if !negative {
            self.eat(b'+');
        }
        loop {
            let t = self.product()?;
            out = if negative { out.sub(&t) } else { out.add(&t) };
            self.skip_ws();
            match self.peek() {
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn product(&mut self) -> Result<ScalarExpr, SymError> {
        self.skip_ws();
        if !self.starts_primary() {
            return Err(self.err("expected a factor"));
        }
        let mut out = ScalarExpr::one();
        loop {
            self.skip_ws();
            if self.starts_blade()? {
                return Err(self.err("blade inside a scalar expression"));
            }
            if !self.starts_primary() {
                break;
            }
            out = out.mul(&self.factor()?);
            if self.eat(b'*') {
                self.skip_ws();
                if !self.starts_primary() {
                    return Err(self.err("expected a factor after `*`"));
                }
            }
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<ScalarExpr, SymError> {
        let mut out = self.primary()?;
        while self.eat(b'/') {
            self.skip_ws();
            let start = self.pos;
            let d = self.primary()?;
            out = out.mul(&d.recip().map_err(|_| SymError::Parse { pos: start, msg: "division by zero" })?);
        }
        Ok(out)
    }

    fn primary(&mut self) -> Result<ScalarExpr, SymError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')', "expected `)`")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let (kind, end) = self.classify()?;
                self.pos = end;
                match kind {
                    Ident::Blade => Err(SymError::Parse { pos: start, msg: "blade inside a scalar expression" }),
                    Ident::Coord(i) => Ok(ScalarExpr::coord(i as u8)),
                    Ident::Symbol(s) => Ok(ScalarExpr::symbol(s)),
                    Ident::Deriv(i) => Ok(self.call()?.diff(i as u8, self.deps)),
                    Ident::Exp => Ok(self.call()?.exp()),
                    Ident::Ln => {
                        let at = self.pos;
                        self.call()?.ln().map_err(|_| SymError::Parse { pos: at, msg: "logarithm of zero" })
                    }
                }
            }
            _ => Err(self.err("expected a factor")),
        }
    }

    fn call(&mut self) -> Result<ScalarExpr, SymError> {
        self.expect(b'(', "expected `(`")?;
        let e = self.sum()?;
        self.expect(b')', "expected `)`")?;
        Ok(e)
    }

    fn number(&mut self) -> Result<ScalarExpr, SymError> {
        let start = self.pos;
        let overflow = SymError::Parse { pos: start, msg: "number too large" };
        let mut value = Rational::from_integer(0);
        let mut scale: Option<Rational> = None;
        let ten = Rational::from_integer(10);
        let mut digits = 0;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                let d = Rational::from_integer((c - b'0') as i64);
                match &mut scale {
                    None => value = value.checked_mul(&ten).and_then(|v| v.checked_add(&d)).ok_or(overflow.clone())?,
                    Some(s) => {
                        *s = s.checked_mul(&Rational::new(1, 10)).ok_or(overflow.clone())?;
                        value = s.checked_mul(&d).and_then(|t| value.checked_add(&t)).ok_or(overflow.clone())?;
                    }
                }
                digits += 1;
            } else if c == b'.' && scale.is_none() {
                scale = Some(Rational::from_integer(1));
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits == 0 {
            return Err(SymError::Parse { pos: start, msg: "malformed number" });
        }
        Ok(ScalarExpr::constant(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::{String, ToString};

    fn deps(list: &[(&str, &[u8])]) -> Dependencies {
        list.iter().map(|(n, ix)| (String::from(*n), ix.iter().copied().collect::<BTreeSet<_>>())).collect()
    }

    fn cl3() -> Signature {
        Signature::euclidean(3).unwrap()
    }

    #[test]
    fn single_term() {
        let d = deps(&[("f", &[1, 2])]);
        let f = parse_field("f e1^e2", cl3(), &d).unwrap();
        assert_eq!(f.terms().count(), 1);
        assert_eq!(f.get(Blade::from_mask(0b11)), ScalarExpr::symbol("f"));
    }

    #[test]
    fn wedge_rules() {
        let d = Dependencies::new();
        assert!(parse_field("e1^e1", cl3(), &d).unwrap().is_zero());
        let f = parse_field("e2^e1", cl3(), &d).unwrap();
        assert_eq!(f.get(Blade::from_mask(0b11)), ScalarExpr::integer(-1));
    }

    #[test]
    fn cancellation_and_merging() {
        let d = Dependencies::new();
        assert!(parse_field("f e2^e1 + f e1^e2", cl3(), &d).unwrap().is_zero());
        let g = parse_field("(f + g) e1 - f e1", cl3(), &d).unwrap();
        assert_eq!(g, parse_field("g e1", cl3(), &d).unwrap());
    }

    #[test]
    fn rationals_and_division() {
        let d = deps(&[("g", &[1])]);
        let f = parse_field("0.5 d_1(g)/g e1 + 3/2 e2", cl3(), &d).unwrap();
        assert_eq!(f.to_string(), "1/2 d_1(g)/g e1 + 3/2 e2");
    }

    #[test]
    fn derivative_of_undeclared_coordinate_vanishes() {
        let d = deps(&[("g", &[1, 3])]);
        assert!(parse_field("d_2(g) e1", cl3(), &d).unwrap().is_zero());
    }

    #[test]
    fn errors_report_positions() {
        let d = Dependencies::new();
        assert!(matches!(parse_field("f e4", cl3(), &d), Err(SymError::IndexOutOfRange { pos: 3, index: 4, .. })));
        assert!(matches!(parse_field("f + ", cl3(), &d), Err(SymError::Parse { pos: 4, .. })));
        assert!(matches!(parse_field("exp(e1)", cl3(), &d), Err(SymError::Parse { pos: 4, .. })));
        assert!(matches!(parse_field("f e1 g", cl3(), &d), Err(SymError::Parse { pos: 5, .. })));
        assert!(parse_field("", cl3(), &d).is_err());
        assert!(parse_field("x0 e1", cl3(), &d).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let d = deps(&[("f", &[1, 2]), ("g", &[1, 3])]);
        for text in [
            "f e1^e2",
            "d_1(f)/f e1 + d_2(f)/f e2",
            "-d_2(f) e1 + d_1(f) e2",
            "exp(A1 x1 + A3 x3) e1^e2",
            "(f + g) e3 - 2 ln(g) e1^e2^e3",
            "1/(f + g) + 7",
        ] {
            let a = parse_field(text, cl3(), &d).unwrap();
            let b = parse_field(&a.to_string(), cl3(), &d).unwrap();
            assert_eq!(a, b, "{} -> {}", text, a);
        }
    }
}
