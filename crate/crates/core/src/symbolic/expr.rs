//! Scalar coefficient expressions in canonical sum-of-products form.
//!
//! An expression is a map from [`Monomial`] to a nonzero rational
//! coefficient. A monomial is a sorted map from [`Atom`] to a nonzero
//! integer exponent, so `f · (1/f)` collapses to `1` by exponent
//! arithmetic. Extra normal-form rules:
//!
//! * all `exp` factors of a monomial merge into one `exp(Σ k·E)`, and
//!   `exp(0)` disappears;
//! * `ln(exp(E)) → E`, `exp(ln(E)) → E`, `ln(1) → 0`;
//! * a sum only survives as an atom ([`Atom::Group`]) under a negative
//!   exponent; positive powers of sums are expanded.
//!
//! No other simplification is attempted.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use super::SymError;

pub type Rational = Ratio<i64>;

/// Which coordinates (one-based) each named symbol depends on. Symbols not
/// listed are constants.
pub type Dependencies = BTreeMap<String, BTreeSet<u8>>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Coordinate `x_i`, one-based.
    Coord(u8),
    Sym(String),
    /// Partial derivative `f_{,ij…}`; indices sorted, so mixed partials
    /// commute.
    Deriv(String, Vec<u8>),
    Exp(Box<ScalarExpr>),
    Ln(Box<ScalarExpr>),
    /// A multi-term sum held under a negative exponent.
    Group(Box<ScalarExpr>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Atom, i32>);

impl Monomial {
    pub fn factors(&self) -> impl Iterator<Item = (&Atom, i32)> {
        self.0.iter().map(|(a, &k)| (a, k))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut e = Self::zero();
        e.push(Monomial::default(), c);
        e
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(Rational::from_integer(n))
    }

    pub fn symbol(name: &str) -> Self {
        Self::atom(Atom::Sym(name.into()))
    }

    pub fn coord(i: u8) -> Self {
        Self::atom(Atom::Coord(i))
    }

    /// `∂_{indices} name`, indices one-based and unsorted.
    pub fn derivative_symbol(name: &str, indices: &[u8]) -> Self {
        if indices.is_empty() {
            return Self::symbol(name);
        }
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        Self::atom(Atom::Deriv(name.into(), idx))
    }

    fn atom(a: Atom) -> Self {
        let mut m = BTreeMap::new();
        m.insert(a, 1);
        let mut e = Self::zero();
        e.push(Monomial(m), Rational::one());
        e
    }

    fn push(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Rational)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `Some(c)` when the expression is a bare rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, &c) = self.terms.iter().next()?;
                m.is_empty().then_some(c)
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, &c)| (m, c))
        } else {
            None
        }
    }

    /// True when the leading coefficient is negative (used for printing).
    pub fn leading_negative(&self) -> bool {
        self.terms.values().next().is_some_and(|c| c.is_negative())
    }

    pub fn add(&self, other: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.push(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &ScalarExpr) -> ScalarExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ScalarExpr {
        self.scale(-Rational::one())
    }

    pub fn scale(&self, r: Rational) -> ScalarExpr {
        if r.is_zero() {
            return Self::zero();
        }
        ScalarExpr { terms: self.terms.iter().map(|(m, &c)| (m.clone(), c * r)).collect() }
    }

    pub fn mul(&self, other: &ScalarExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let factors = ma.factors().chain(mb.factors()).map(|(a, k)| (a.clone(), k));
                let prod = build_monomial(ca * cb, factors);
                for (m, c) in prod.terms() {
                    out.push(m.clone(), c);
                }
            }
        }
        out
    }

    /// Integer power. Negative powers of a multi-term sum become a
    /// [`Atom::Group`] factor.
    pub fn pow(&self, k: i32) -> Result<ScalarExpr, SymError> {
        if k >= 0 {
            let mut out = ScalarExpr::one();
            for _ in 0..k {
                out = out.mul(self);
            }
            return Ok(out);
        }
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if let Some((m, c)) = self.as_monomial() {
            let inv_c = c.recip();
            let mut coeff = Rational::one();
            for _ in 0..k.unsigned_abs() {
                coeff *= inv_c;
            }
            let factors = m.factors().map(|(a, e)| (a.clone(), e * k));
            return Ok(build_monomial(coeff, factors));
        }
        Ok(build_monomial(Rational::one(), core::iter::once((Atom::Group(Box::new(self.clone())), k))))
    }

    pub fn recip(&self) -> Result<ScalarExpr, SymError> {
        self.pow(-1)
    }

    pub fn exp(&self) -> ScalarExpr {
        if self.is_zero() {
            return ScalarExpr::one();
        }
        if let Some((m, c)) = self.as_monomial() {
            if c.is_one() {
                let mut f = m.factors();
                if let (Some((Atom::Ln(inner), 1)), None) = (f.next(), f.next()) {
                    return (**inner).clone();
                }
            }
        }
        ScalarExpr::atom(Atom::Exp(Box::new(self.clone())))
    }

    pub fn ln(&self) -> Result<ScalarExpr, SymError> {
        if self.is_zero() {
            return Err(SymError::LogOfZero);
        }
        if let Some((m, c)) = self.as_monomial() {
            if c.is_one() {
                if m.is_empty() {
                    return Ok(ScalarExpr::zero());
                }
                let mut f = m.factors();
                if let (Some((Atom::Exp(inner), 1)), None) = (f.next(), f.next()) {
                    return Ok((**inner).clone());
                }
            }
        }
        Ok(ScalarExpr::atom(Atom::Ln(Box::new(self.clone()))))
    }

    /// `∂/∂x_i` under the given dependency declaration.
    pub fn diff(&self, i: u8, deps: &Dependencies) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (m, c) in self.terms() {
            for (atom, k) in m.factors() {
                let d_atom = diff_atom(atom, i, deps);
                if d_atom.is_zero() {
                    continue;
                }
                let rest = m.factors().map(|(a, e)| (a.clone(), if a == atom { e - 1 } else { e }));
                let coeff = c * Rational::from_integer(k as i64);
                let part = build_monomial(coeff, rest).mul(&d_atom);
                out = out.add(&part);
            }
        }
        out
    }

    /// Replace the symbol `name` by `replacement`. Derivative atoms of
    /// `name` become the matching derivatives of `replacement`.
    pub fn substitute(&self, name: &str, replacement: &ScalarExpr, deps: &Dependencies) -> Result<ScalarExpr, SymError> {
        self.map_atoms(&mut |atom| match atom {
            Atom::Sym(s) if s == name => Ok(Some(replacement.clone())),
            Atom::Deriv(s, idx) if s == name => {
                let mut e = replacement.clone();
                for &i in idx {
                    e = e.diff(i, deps);
                }
                Ok(Some(e))
            }
            _ => Ok(None),
        })
    }

    /// Rebuild the expression with `f` applied to every atom (innermost
    /// first). `Ok(None)` keeps the atom.
    fn map_atoms<F>(&self, f: &mut F) -> Result<ScalarExpr, SymError>
    where
        F: FnMut(&Atom) -> Result<Option<ScalarExpr>, SymError>,
    {
        let mut out = ScalarExpr::zero();
        for (m, c) in self.terms() {
            let mut term = ScalarExpr::constant(c);
            for (atom, k) in m.factors() {
                let rebuilt = match atom {
                    Atom::Exp(inner) => inner.map_atoms(f)?.exp(),
                    Atom::Ln(inner) => inner.map_atoms(f)?.ln()?,
                    Atom::Group(inner) => inner.map_atoms(f)?,
                    other => match f(other)? {
                        Some(e) => e,
                        None => ScalarExpr::atom(other.clone()),
                    },
                };
                term = term.mul(&rebuilt.pow(k)?);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Symbols (plain or differentiated) appearing anywhere.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        for (m, _) in self.terms() {
            for (a, _) in m.factors() {
                match a {
                    Atom::Sym(s) | Atom::Deriv(s, _) => {
                        out.insert(s.clone());
                    }
                    Atom::Exp(e) | Atom::Ln(e) | Atom::Group(e) => e.collect_symbols(out),
                    Atom::Coord(_) => {}
                }
            }
        }
    }

    /// Evaluate numerically. `value(name, derivative_indices)` supplies
    /// symbol and derivative values; coordinates come from `x` (one-based
    /// label `i` reads `x[i-1]`).
    pub fn eval<F>(&self, x: &[f64], value: &mut F) -> f64
    where
        F: FnMut(&str, &[u8]) -> f64,
    {
        use num_traits::ToPrimitive;
        let mut total = 0.0;
        for (m, c) in self.terms() {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (a, k) in m.factors() {
                let v = match a {
                    Atom::Coord(i) => x.get(*i as usize - 1).copied().unwrap_or(f64::NAN),
                    Atom::Sym(s) => value(s, &[]),
                    Atom::Deriv(s, idx) => value(s, idx),
                    Atom::Exp(e) => libm::exp(e.eval(x, value)),
                    Atom::Ln(e) => libm::log(e.eval(x, value)),
                    Atom::Group(e) => e.eval(x, value),
                };
                t *= libm::pow(v, k as f64);
            }
            total += t;
        }
        total
    }
}

fn diff_atom(atom: &Atom, i: u8, deps: &Dependencies) -> ScalarExpr {
    let depends = |name: &str| deps.get(name).is_some_and(|s| s.contains(&i));
    match atom {
        Atom::Coord(j) => {
            if *j == i {
                ScalarExpr::one()
            } else {
                ScalarExpr::zero()
            }
        }
        Atom::Sym(s) => {
            if depends(s) {
                ScalarExpr::derivative_symbol(s, &[i])
            } else {
                ScalarExpr::zero()
            }
        }
        Atom::Deriv(s, idx) => {
            if depends(s) {
                let mut all = idx.clone();
                all.push(i);
                ScalarExpr::derivative_symbol(s, &all)
            } else {
                ScalarExpr::zero()
            }
        }
        Atom::Exp(e) => ScalarExpr::atom(atom.clone()).mul(&e.diff(i, deps)),
        Atom::Ln(e) => {
            let de = e.diff(i, deps);
            // ln's argument is never zero by construction
            de.mul(&e.recip().expect("ln argument is nonzero"))
        }
        Atom::Group(e) => e.diff(i, deps),
    }
}

/// Assemble `coeff · Π atom^k` into canonical form.
fn build_monomial<I>(coeff: Rational, factors: I) -> ScalarExpr
where
    I: IntoIterator<Item = (Atom, i32)>,
{
    if coeff.is_zero() {
        return ScalarExpr::zero();
    }
    let mut powers: BTreeMap<Atom, i32> = BTreeMap::new();
    let mut exp_arg = ScalarExpr::zero();
    for (a, k) in factors {
        if k == 0 {
            continue;
        }
        if let Atom::Exp(e) = &a {
            exp_arg = exp_arg.add(&e.scale(Rational::from_integer(k as i64)));
            continue;
        }
        *powers.entry(a).or_insert(0) += k;
    }
    powers.retain(|_, k| *k != 0);

    let mut expand: Vec<(ScalarExpr, i32)> = Vec::new();
    powers.retain(|a, k| match a {
        Atom::Group(e) if *k > 0 => {
            expand.push(((**e).clone(), *k));
            false
        }
        _ => true,
    });

    let mut out = ScalarExpr::zero();
    out.push(Monomial(powers), coeff);
    if !exp_arg.is_zero() {
        out = out.mul_atom_raw(Atom::Exp(Box::new(exp_arg)));
    }
    for (e, k) in expand {
        for _ in 0..k {
            out = out.mul(&e);
        }
    }
    out
}

impl ScalarExpr {
    /// Attach an atom to a single-monomial expression without
    /// renormalising (used for the merged `exp` factor).
    fn mul_atom_raw(mut self, atom: Atom) -> ScalarExpr {
        let (m, c) = self.terms.pop_first().expect("single monomial");
        let mut map = m.0;
        map.insert(atom, 1);
        self.terms.clear();
        self.push(Monomial(map), c);
        self
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Coord(i) => write!(f, "x{}", i),
            Atom::Sym(s) => f.write_str(s),
            Atom::Deriv(s, idx) => {
                for i in idx {
                    write!(f, "d_{}(", i)?;
                }
                f.write_str(s)?;
                for _ in idx {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Atom::Exp(e) => write!(f, "exp({})", e),
            Atom::Ln(e) => write!(f, "ln({})", e),
            Atom::Group(e) => write!(f, "({})", e),
        }
    }
}

/// Writes `|c| · monomial` (sign handled by the caller).
pub(crate) fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial, c: Rational) -> fmt::Result {
    let c = c.abs();
    let mut numer: Vec<(&Atom, i32)> = Vec::new();
    let mut denom: Vec<(&Atom, i32)> = Vec::new();
    for (a, k) in m.factors() {
        if k > 0 {
            numer.push((a, k));
        } else {
            denom.push((a, -k));
        }
    }
    let mut first = true;
    if !c.is_one() || numer.is_empty() {
        write!(f, "{}", c.numer())?;
        if !c.denom().is_one() {
            write!(f, "/{}", c.denom())?;
        }
        first = false;
    }
    for (a, k) in numer {
        for _ in 0..k {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}", a)?;
            first = false;
        }
    }
    for (a, k) in denom {
        for _ in 0..k {
            write!(f, "/{}", a)?;
        }
    }
    Ok(())
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            write_monomial(f, m, c)?;
        }
        Ok(())
    }
}
