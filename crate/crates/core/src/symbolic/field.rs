use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;

use super::expr::{write_monomial, Dependencies, Rational, ScalarExpr};
use super::SymError;
use crate::clifford::{Blade, CliffordError, Multivector, Signature};

/// A multivector field with symbolic coefficients. Coordinates `x1..xn`
/// pair with generators `e1..en` of the signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymField {
    signature: Signature,
    deps: Dependencies,
    terms: BTreeMap<Blade, ScalarExpr>,
}

impl SymField {
    pub fn zero(signature: Signature, deps: Dependencies) -> Self {
        Self { signature, deps, terms: BTreeMap::new() }
    }

    /// Euclidean `Cl(n,0)` field.
    pub fn euclidean(n: usize, deps: Dependencies) -> Result<Self, SymError> {
        Ok(Self::zero(Signature::euclidean(n)?, deps))
    }

    pub fn from_terms<I>(signature: Signature, deps: Dependencies, terms: I) -> Result<Self, SymError>
    where
        I: IntoIterator<Item = (Blade, ScalarExpr)>,
    {
        let mut f = Self::zero(signature, deps);
        for (b, e) in terms {
            f.add_term(b, &e)?;
        }
        Ok(f)
    }

    pub fn add_term(&mut self, blade: Blade, coeff: &ScalarExpr) -> Result<(), SymError> {
        if !blade.is_valid_for(self.signature) {
            return Err(CliffordError::BladeOutOfRange { blade, signature: self.signature }.into());
        }
        let slot = self.terms.entry(blade).or_default();
        *slot = slot.add(coeff);
        if slot.is_zero() {
            self.terms.remove(&blade);
        }
        Ok(())
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    pub fn deps(&self) -> &Dependencies {
        &self.deps
    }

    pub fn with_deps(mut self, deps: Dependencies) -> Self {
        self.deps = deps;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &ScalarExpr)> {
        self.terms.iter().map(|(&b, e)| (b, e))
    }

    pub fn get(&self, blade: Blade) -> ScalarExpr {
        self.terms.get(&blade).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Fields are normalised on construction; this rebuilds the term map
    /// from scratch, which must give back the same value.
    pub fn canonicalize(&self) -> SymField {
        let mut out = Self::zero(self.signature, self.deps.clone());
        for (b, e) in self.terms() {
            let rebuilt = e.terms().fold(ScalarExpr::zero(), |acc, (m, c)| {
                let mono = m.factors().fold(Ok(ScalarExpr::constant(c)), |t: Result<_, SymError>, (a, k)| {
                    let atom = ScalarExpr::zero().add(&atom_expr(a));
                    Ok(t?.mul(&atom.pow(k)?))
                });
                acc.add(&mono.expect("canonical atoms rebuild"))
            });
            out.add_term(b, &rebuilt).expect("blade already valid");
        }
        out
    }

    fn compatible(&self, other: &SymField) -> Result<Dependencies, SymError> {
        if self.signature != other.signature {
            return Err(CliffordError::SignatureMismatch { left: self.signature, right: other.signature }.into());
        }
        let mut deps = self.deps.clone();
        for (k, v) in &other.deps {
            deps.entry(k.clone()).or_default().extend(v.iter().copied());
        }
        Ok(deps)
    }

    pub fn add(&self, other: &SymField) -> Result<SymField, SymError> {
        let deps = self.compatible(other)?;
        let mut out = self.clone().with_deps(deps);
        for (b, e) in other.terms() {
            out.add_term(b, e)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SymField) -> Result<SymField, SymError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymField {
        self.map_coeffs(|e| e.neg())
    }

    /// Multiply every coefficient by a scalar expression.
    pub fn scale(&self, s: &ScalarExpr) -> SymField {
        self.map_coeffs(|e| e.mul(s))
    }

    fn map_coeffs<F: Fn(&ScalarExpr) -> ScalarExpr>(&self, f: F) -> SymField {
        let mut out = Self::zero(self.signature, self.deps.clone());
        for (b, e) in self.terms() {
            out.add_term(b, &f(e)).expect("blade already valid");
        }
        out
    }

    fn product_by<K>(&self, other: &SymField, keep: K) -> Result<SymField, SymError>
    where
        K: Fn(Blade, Blade, Blade) -> bool,
    {
        let deps = self.compatible(other)?;
        let mut out = Self::zero(self.signature, deps);
        for (a, ea) in self.terms() {
            for (b, eb) in other.terms() {
                let (sign, c) = a.product(b, self.signature);
                if sign == 0.0 || !keep(a, b, c) {
                    continue;
                }
                let coeff = ea.mul(eb).scale(sign_rational(sign));
                out.add_term(c, &coeff)?;
            }
        }
        Ok(out)
    }

    pub fn geometric(&self, other: &SymField) -> Result<SymField, SymError> {
        self.product_by(other, |_, _, _| true)
    }

    /// Grade `|r - s|` part of each blade product.
    pub fn inner(&self, other: &SymField) -> Result<SymField, SymError> {
        self.product_by(other, |a, b, c| c.grade() == a.grade().abs_diff(b.grade()))
    }

    /// Grade `r + s` part of each blade product.
    pub fn outer(&self, other: &SymField) -> Result<SymField, SymError> {
        self.product_by(other, |a, b, c| c.grade() == a.grade() + b.grade())
    }

    pub fn grade_project(&self, k: usize) -> SymField {
        let mut out = Self::zero(self.signature, self.deps.clone());
        out.terms = self.terms.iter().filter(|(b, _)| b.grade() == k).map(|(&b, e)| (b, e.clone())).collect();
        out
    }

    /// Inverse of a single term `s·B`: `(1/s)·B⁻¹` with `B⁻¹ = (B B) B`.
    pub fn blade_inverse(&self) -> Result<SymField, SymError> {
        let mut it = self.terms();
        let (b, s) = match (it.next(), it.next()) {
            (Some(t), None) => t,
            _ => return Err(SymError::NotABlade),
        };
        let (sq, _) = b.product(b, self.signature);
        if sq == 0.0 {
            return Err(SymError::NotABlade);
        }
        let inv = s.recip()?.scale(sign_rational(sq));
        SymField::from_terms(self.signature, self.deps.clone(), [(b, inv)])
    }

    /// Coordinate derivative `∂_i` (one-based) of every coefficient.
    pub fn partial(&self, i: u8) -> SymField {
        let deps = self.deps.clone();
        self.map_coeffs(|e| e.diff(i, &deps))
    }

    fn dirac_filtered<K: Fn(usize, Blade) -> bool>(&self, keep: K) -> SymField {
        let mut out = Self::zero(self.signature, self.deps.clone());
        for i in 0..self.dim() {
            let e_i = Blade::generator(i);
            for (b, e) in self.terms() {
                if !keep(i, b) {
                    continue;
                }
                let d = e.diff((i + 1) as u8, &self.deps);
                if d.is_zero() {
                    continue;
                }
                let (sign, c) = e_i.product(b, self.signature);
                out.add_term(c, &d.scale(sign_rational(sign))).expect("blade already valid");
            }
        }
        out
    }

    /// `∇G = Σ e_i ∂_i G`.
    pub fn dirac(&self) -> SymField {
        self.dirac_filtered(|_, _| true)
    }

    /// `∇·G`: the terms where `e_i` meets a blade containing it.
    pub fn interior(&self) -> SymField {
        self.dirac_filtered(|i, b| b.contains(i))
    }

    /// `∇∧G`: the terms where `e_i` is new to the blade.
    pub fn exterior(&self) -> SymField {
        self.dirac_filtered(|i, b| !b.contains(i))
    }

    /// `((∇·G)G⁻¹, (∇∧G)G⁻¹)` for a single-blade field.
    pub fn flux_ratios(&self) -> Result<(SymField, SymField), SymError> {
        let inv = self.blade_inverse()?;
        Ok((self.interior().geometric(&inv)?, self.exterior().geometric(&inv)?))
    }

    pub fn substitute(&self, name: &str, replacement: &ScalarExpr) -> Result<SymField, SymError> {
        let mut out = Self::zero(self.signature, self.deps.clone());
        for (b, e) in self.terms() {
            out.add_term(b, &e.substitute(name, replacement, &self.deps)?)?;
        }
        Ok(out)
    }

    /// Numeric value at a point. `value(name, indices)` gives symbol and
    /// derivative values.
    pub fn eval<F>(&self, x: &[f64], mut value: F) -> Multivector
    where
        F: FnMut(&str, &[u8]) -> f64,
    {
        let mut mv = Multivector::zero(self.signature);
        for (b, e) in self.terms() {
            mv.add_term(b, e.eval(x, &mut value)).expect("blade already valid");
        }
        mv
    }

    pub fn symbols(&self) -> Vec<String> {
        let mut all = alloc::collections::BTreeSet::new();
        for (_, e) in self.terms() {
            all.extend(e.symbols());
        }
        all.into_iter().collect()
    }
}

fn atom_expr(a: &super::Atom) -> ScalarExpr {
    use super::Atom;
    match a {
        Atom::Coord(i) => ScalarExpr::coord(*i),
        Atom::Sym(s) => ScalarExpr::symbol(s),
        Atom::Deriv(s, idx) => ScalarExpr::derivative_symbol(s, idx),
        Atom::Exp(e) => e.exp(),
        Atom::Ln(e) => e.ln().expect("canonical ln argument is nonzero"),
        Atom::Group(e) => (**e).clone(),
    }
}

fn sign_rational(s: f64) -> Rational {
    if s < 0.0 {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl fmt::Display for SymField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (b, e)) in self.terms().enumerate() {
            let neg = e.leading_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let shown = if neg { e.neg() } else { e.clone() };
            let scalar_blade = b == Blade::SCALAR;
            match shown.as_monomial() {
                Some((m, c)) if m.is_empty() && c.is_one() && !scalar_blade => {}
                Some((m, c)) => {
                    write_monomial(f, m, c)?;
                    if !scalar_blade {
                        f.write_str(" ")?;
                    }
                }
                None => {
                    write!(f, "({})", shown)?;
                    if !scalar_blade {
                        f.write_str(" ")?;
                    }
                }
            }
            if !scalar_blade {
                write!(f, "{}", b)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn deps(list: &[(&str, &[u8])]) -> Dependencies {
        list.iter().map(|(n, ix)| (String::from(*n), ix.iter().copied().collect::<BTreeSet<_>>())).collect()
    }

    fn e12() -> Blade {
        Blade::from_mask(0b011)
    }

    #[test]
    fn interior_and_exterior_of_planar_bivector() {
        let d = deps(&[("f", &[1, 2])]);
        let f = SymField::from_terms(Signature::euclidean(3).unwrap(), d, [(e12(), ScalarExpr::symbol("f"))]).unwrap();
        let div = f.interior();
        assert_eq!(div.get(Blade::generator(1)), ScalarExpr::derivative_symbol("f", &[1]));
        assert_eq!(div.get(Blade::generator(0)), ScalarExpr::derivative_symbol("f", &[2]).neg());
        assert!(f.exterior().is_zero());
        assert_eq!(f.dirac(), div);
    }

    #[test]
    fn constant_field_has_no_derivative() {
        let c = SymField::from_terms(Signature::euclidean(3).unwrap(), Dependencies::new(), [(Blade::SCALAR, ScalarExpr::integer(7))]).unwrap();
        assert!(c.dirac().is_zero());
    }

    #[test]
    fn generator_times_bivector() {
        let sig = Signature::euclidean(2).unwrap();
        let e1 = SymField::from_terms(sig, Dependencies::new(), [(Blade::generator(0), ScalarExpr::one())]).unwrap();
        let b = SymField::from_terms(sig, Dependencies::new(), [(e12(), ScalarExpr::one())]).unwrap();
        let prod = e1.geometric(&b).unwrap();
        assert_eq!(prod, SymField::from_terms(sig, Dependencies::new(), [(Blade::generator(1), ScalarExpr::one())]).unwrap());
    }

    #[test]
    fn blade_inverse_round_trip() {
        let sig = Signature::euclidean(3).unwrap();
        let g = SymField::from_terms(sig, Dependencies::new(), [(e12(), ScalarExpr::symbol("g"))]).unwrap();
        let one = g.geometric(&g.blade_inverse().unwrap()).unwrap();
        assert_eq!(one, SymField::from_terms(sig, Dependencies::new(), [(Blade::SCALAR, ScalarExpr::one())]).unwrap());
        let two = g.add(&SymField::from_terms(sig, Dependencies::new(), [(Blade::SCALAR, ScalarExpr::one())]).unwrap()).unwrap();
        assert_eq!(two.blade_inverse(), Err(SymError::NotABlade));
    }

    #[test]
    fn canonicalize_is_identity_on_normal_forms() {
        let d = deps(&[("g", &[1, 3])]);
        let g = SymField::from_terms(Signature::euclidean(3).unwrap(), d, [(e12(), ScalarExpr::symbol("g"))]).unwrap();
        let (i, e) = g.flux_ratios().unwrap();
        assert_eq!(i.canonicalize(), i);
        assert_eq!(e.canonicalize(), e);
    }
}
