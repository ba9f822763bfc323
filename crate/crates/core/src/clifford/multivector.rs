use alloc::collections::BTreeMap;
use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{Blade, CliffordError, Signature};

/// Coefficients with magnitude below this are dropped after every operation.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;

/// A sparse multivector: real coefficients over the basis blades of one
/// signature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multivector {
    signature: Signature,
    coeffs: BTreeMap<Blade, f64>,
}

impl Multivector {
    pub fn zero(signature: Signature) -> Self {
        Self { signature, coeffs: BTreeMap::new() }
    }

    pub fn scalar(signature: Signature, value: f64) -> Self {
        Self::from_blade(signature, Blade::SCALAR, value)
            .expect("scalar blade is valid in every signature")
    }

    pub fn from_blade(signature: Signature, blade: Blade, coeff: f64) -> Result<Self, CliffordError> {
        let mut mv = Self::zero(signature);
        mv.add_term(blade, coeff)?;
        Ok(mv)
    }

    /// Basis vector `e_{index}` (zero-based).
    pub fn generator(signature: Signature, index: usize) -> Result<Self, CliffordError> {
        Self::from_blade(signature, Blade::generator(index), 1.0)
    }

    /// Grade-1 element `Σ c_i e_i`.
    pub fn vector(signature: Signature, components: &[f64]) -> Result<Self, CliffordError> {
        let mut mv = Self::zero(signature);
        for (i, &c) in components.iter().enumerate() {
            mv.add_term(Blade::generator(i), c)?;
        }
        Ok(mv)
    }

    pub fn pseudoscalar(signature: Signature) -> Self {
        Self::from_blade(signature, Blade::pseudoscalar(signature.dim()), 1.0)
            .expect("pseudoscalar is valid for its own signature")
    }

    pub fn from_terms<I>(signature: Signature, terms: I) -> Result<Self, CliffordError>
    where
        I: IntoIterator<Item = (Blade, f64)>,
    {
        let mut mv = Self::zero(signature);
        for (b, c) in terms {
            mv.add_term(b, c)?;
        }
        Ok(mv)
    }

    /// Accumulate `coeff * blade`, pruning the slot if it cancels.
    pub fn add_term(&mut self, blade: Blade, coeff: f64) -> Result<(), CliffordError> {
        if !blade.is_valid_for(self.signature) {
            return Err(CliffordError::BladeOutOfRange { blade, signature: self.signature });
        }
        self.accumulate(blade, coeff);
        Ok(())
    }

    fn accumulate(&mut self, blade: Blade, coeff: f64) {
        let slot = self.coeffs.entry(blade).or_insert(0.0);
        *slot += coeff;
        if slot.abs() < DEFAULT_PRUNE_TOL {
            self.coeffs.remove(&blade);
        }
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn get(&self, blade: Blade) -> f64 {
        self.coeffs.get(&blade).copied().unwrap_or(0.0)
    }

    pub fn scalar_part(&self) -> f64 {
        self.get(Blade::SCALAR)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, f64)> + '_ {
        self.coeffs.iter().map(|(&b, &c)| (b, c))
    }

    /// Number of stored terms; `is_zero` is the emptiness test.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drop every coefficient with `|c| < tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.coeffs.retain(|_, c| c.abs() >= tol);
        self
    }

    /// Euclidean norm of the coefficient vector.
    pub fn magnitude(&self) -> f64 {
        libm::sqrt(self.coeffs.values().map(|c| c * c).sum::<f64>())
    }

    /// Largest coefficient difference between `self` and `other`.
    pub fn max_abs_diff(&self, other: &Multivector) -> f64 {
        let mut worst: f64 = 0.0;
        for (b, c) in self.terms() {
            worst = worst.max((c - other.get(b)).abs());
        }
        for (b, c) in other.terms() {
            if !self.coeffs.contains_key(&b) {
                worst = worst.max(c.abs());
            }
        }
        worst
    }

    /// Grades present with a nonzero coefficient.
    pub fn grades(&self) -> impl Iterator<Item = usize> + '_ {
        let mut seen = 0u32;
        self.coeffs.keys().filter_map(move |b| {
            let g = b.grade();
            if seen & (1 << g) == 0 {
                seen |= 1 << g;
                Some(g)
            } else {
                None
            }
        })
    }

    /// `Some(k)` if every term has grade `k` (the zero multivector has none).
    pub fn single_grade(&self) -> Option<usize> {
        let mut it = self.grades();
        let g = it.next()?;
        if it.next().is_some() {
            None
        } else {
            Some(g)
        }
    }

    fn check_same(&self, other: &Multivector) -> Result<(), CliffordError> {
        if self.signature != other.signature {
            return Err(CliffordError::SignatureMismatch { left: self.signature, right: other.signature });
        }
        Ok(())
    }

    fn product_filtered<F>(&self, other: &Multivector, keep: F) -> Result<Multivector, CliffordError>
    where
        F: Fn(Blade, Blade, Blade) -> bool,
    {
        self.check_same(other)?;
        let sig = self.signature;
        let mut raw: BTreeMap<Blade, f64> = BTreeMap::new();
        for (&a, &ca) in &self.coeffs {
            for (&b, &cb) in &other.coeffs {
                let (sign, c) = a.product(b, sig);
                if keep(a, b, c) {
                    *raw.entry(c).or_insert(0.0) += sign * ca * cb;
                }
            }
        }
        raw.retain(|_, c| c.abs() >= DEFAULT_PRUNE_TOL);
        Ok(Multivector { signature: sig, coeffs: raw })
    }

    /// The full Clifford product.
    pub fn geometric_product(&self, other: &Multivector) -> Result<Multivector, CliffordError> {
        self.product_filtered(other, |_, _, _| true)
    }

    /// Gradewise inner product: for each pair of grades `(r, s)` keep the
    /// grade `|r - s|` part of the geometric product.
    pub fn inner_product(&self, other: &Multivector) -> Result<Multivector, CliffordError> {
        self.product_filtered(other, |a, b, c| c.grade() == a.grade().abs_diff(b.grade()))
    }

    /// Gradewise outer product: the grade `r + s` part for each grade pair.
    pub fn outer_product(&self, other: &Multivector) -> Result<Multivector, CliffordError> {
        self.product_filtered(other, |a, b, _| a.mask() & b.mask() == 0)
    }

    pub fn grade_project(&self, k: usize) -> Multivector {
        Multivector {
            signature: self.signature,
            coeffs: self.coeffs.iter().filter(|(b, _)| b.grade() == k).map(|(&b, &c)| (b, c)).collect(),
        }
    }

    pub fn reverse(&self) -> Multivector {
        self.map_blades(|b, c| c * b.reverse_sign())
    }

    /// Grade involution: negates the odd grades.
    pub fn involute(&self) -> Multivector {
        self.map_blades(|b, c| if b.grade() % 2 == 0 { c } else { -c })
    }

    fn map_blades<F: Fn(Blade, f64) -> f64>(&self, f: F) -> Multivector {
        Multivector {
            signature: self.signature,
            coeffs: self.coeffs.iter().map(|(&b, &c)| (b, f(b, c))).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Multivector {
        let mut out = self.map_blades(|_, c| c * s);
        out.coeffs.retain(|_, c| c.abs() >= DEFAULT_PRUNE_TOL);
        out
    }

    /// Inverse of a nonzero multiple of a single basis blade.
    ///
    /// General multivector inversion is not supported: mixed or multi-term
    /// inputs are rejected.
    pub fn blade_inverse(&self) -> Result<Multivector, CliffordError> {
        let mut it = self.terms();
        let (blade, coeff) = it.next().ok_or(CliffordError::NotInvertible("zero multivector"))?;
        if it.next().is_some() {
            return Err(CliffordError::NotInvertible("not a single blade"));
        }
        let (square, _) = blade.product(blade, self.signature);
        if square == 0.0 {
            return Err(CliffordError::NotInvertible("null blade"));
        }
        Multivector::from_blade(self.signature, blade, 1.0 / (coeff * square))
    }

    /// `P_B(A) = (A · B) B⁻¹`.
    pub fn projection(&self, onto: &Multivector) -> Result<Multivector, CliffordError> {
        let inv = onto.blade_inverse()?;
        self.inner_product(onto)?.geometric_product(&inv)
    }

    /// `R_B(A) = (A ∧ B) B⁻¹`.
    pub fn rejection(&self, from: &Multivector) -> Result<Multivector, CliffordError> {
        let inv = from.blade_inverse()?;
        self.outer_product(from)?.geometric_product(&inv)
    }

    pub fn try_add(&self, other: &Multivector) -> Result<Multivector, CliffordError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.accumulate(b, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Multivector) -> Result<Multivector, CliffordError> {
        self.try_add(&-other)
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.map_blades(|_, c| -c)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        -&self
    }
}

// Operator forms panic on a signature mismatch; use the `try_*` and
// `*_product` methods where the signatures are not known to agree.

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.try_add(rhs).expect("signature mismatch in multivector addition")
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.try_sub(rhs).expect("signature mismatch in multivector subtraction")
    }
}

impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs).expect("signature mismatch in geometric product")
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn e(sig: Signature, gens: &[usize]) -> Multivector {
        let (s, b) = Blade::from_ordered(gens, sig);
        Multivector::from_blade(sig, b, s).unwrap()
    }

    #[test]
    fn e1_squared_is_one() {
        let sig = cl(2, 0);
        let e1 = e(sig, &[0]);
        assert_eq!(&e1 * &e1, Multivector::scalar(sig, 1.0));
    }

    #[test]
    fn e12_and_e21_are_negatives() {
        let sig = cl(2, 0);
        assert_eq!(e(sig, &[0, 1]), -e(sig, &[1, 0]));
        let prod = &e(sig, &[0]) * &e(sig, &[1]);
        let rev = &e(sig, &[1]) * &e(sig, &[0]);
        assert_eq!(prod, -rev);
    }

    #[test]
    fn cl2_pseudoscalar_squares_to_minus_one() {
        let sig = cl(2, 0);
        let i = Multivector::pseudoscalar(sig);
        assert_eq!(&i * &i, Multivector::scalar(sig, -1.0));
    }

    #[test]
    fn inner_of_vector_with_bivector() {
        let sig = cl(2, 0);
        let got = e(sig, &[0]).inner_product(&e(sig, &[0, 1])).unwrap();
        assert_eq!(got, e(sig, &[1]));
    }

    #[test]
    fn outer_products() {
        let sig = cl(3, 0);
        let e1 = e(sig, &[0]);
        assert!(e1.outer_product(&e1).unwrap().is_zero());
        let vol = e1.outer_product(&e(sig, &[1])).unwrap().outer_product(&e(sig, &[2])).unwrap();
        assert_eq!(vol, Multivector::pseudoscalar(sig));
    }

    #[test]
    fn grade_projection() {
        let sig = cl(2, 0);
        let mixed = &(&Multivector::scalar(sig, 1.0) + &e(sig, &[0])) + &e(sig, &[0, 1]);
        assert_eq!(mixed.grade_project(1), e(sig, &[0]));
        assert_eq!(mixed.grade_project(2), e(sig, &[0, 1]));
        assert!(Multivector::zero(sig).grade_project(1).is_zero());
    }

    #[test]
    fn blade_inverses() {
        let sig = cl(2, 0);
        assert_eq!(e(sig, &[0, 1]).blade_inverse().unwrap(), -e(sig, &[0, 1]));
        let two_e1 = e(sig, &[0]).scale(2.0);
        assert_eq!(two_e1.blade_inverse().unwrap(), e(sig, &[0]).scale(0.5));
        let mixed = &Multivector::scalar(sig, 1.0) + &e(sig, &[0]);
        assert!(matches!(mixed.blade_inverse(), Err(CliffordError::NotInvertible(_))));
        assert!(Multivector::zero(sig).blade_inverse().is_err());
    }

    #[test]
    fn negative_signature_inverse() {
        let sig = cl(3, 1);
        let t = e(sig, &[3]);
        let inv = t.blade_inverse().unwrap();
        assert_eq!(&t * &inv, Multivector::scalar(sig, 1.0));
        assert_eq!(inv, -t);
    }

    #[test]
    fn projection_and_rejection_examples() {
        let sig = cl(3, 0);
        let plane = e(sig, &[0, 1]);
        assert_eq!(e(sig, &[0]).projection(&plane).unwrap(), e(sig, &[0]));
        assert_eq!(e(sig, &[2]).rejection(&plane).unwrap(), e(sig, &[2]));
        assert!(e(sig, &[2]).projection(&plane).unwrap().is_zero());
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = Multivector::scalar(cl(2, 0), 1.0);
        let b = Multivector::scalar(cl(3, 0), 1.0);
        assert!(matches!(a.geometric_product(&b), Err(CliffordError::SignatureMismatch { .. })));
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn blade_outside_signature_rejected() {
        let sig = cl(2, 0);
        assert!(Multivector::from_blade(sig, Blade::generator(2), 1.0).is_err());
    }

    #[test]
    fn tiny_coefficients_are_pruned() {
        let sig = cl(2, 0);
        let a = Multivector::vector(sig, &[1.0, 1e-15]).unwrap();
        assert_eq!(a.len(), 1);
    }
}
