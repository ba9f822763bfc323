use core::fmt;

use serde::{Deserialize, Serialize};

use super::Signature;

/// A basis blade, stored as the bit set of its generators.
///
/// Generators are kept in canonical ascending order, so the mask alone
/// identifies the blade. The empty mask is the scalar blade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Blade(u16);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub const fn from_mask(mask: u16) -> Self {
        Blade(mask)
    }

    /// Single generator `e_{index}` (zero-based index).
    pub const fn generator(index: usize) -> Self {
        Blade(1 << index)
    }

    /// The pseudoscalar `e_1 e_2 ... e_n` of an `n`-generator algebra.
    pub const fn pseudoscalar(n: usize) -> Self {
        Blade(((1u32 << n) - 1) as u16)
    }

    pub const fn mask(self) -> u16 {
        self.0
    }

    pub const fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, generator: usize) -> bool {
        self.0 & (1 << generator) != 0
    }

    /// Highest generator index + 1, or 0 for the scalar blade.
    pub const fn span(self) -> usize {
        16 - self.0.leading_zeros() as usize
    }

    pub fn is_valid_for(self, sig: Signature) -> bool {
        self.span() <= sig.dim()
    }

    /// Zero-based generator indices in ascending order.
    pub fn generators(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..16).filter(move |i| mask & (1 << i) != 0)
    }

    /// Product of two basis blades: `self * other = sign * result`.
    ///
    /// The sign counts the transpositions needed to sort the concatenated
    /// generator list, times the square of every generator that cancels.
    pub fn product(self, other: Blade, sig: Signature) -> (f64, Blade) {
        let mut sign = reorder_sign(self.0, other.0);
        let common = self.0 & other.0;
        for g in Blade(common).generators() {
            sign *= sig.square(g);
        }
        (sign, Blade(self.0 ^ other.0))
    }

    /// Sign picked up by reversion, `(-1)^(k(k-1)/2)`.
    pub fn reverse_sign(self) -> f64 {
        let k = self.grade();
        if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Geometric product of an ordered list of generators, as
    /// `sign * blade`. Repeated generators contract through the metric.
    pub fn from_ordered(generators: &[usize], sig: Signature) -> (f64, Blade) {
        let mut sign = 1.0;
        let mut acc = Blade::SCALAR;
        for &g in generators {
            let (s, b) = acc.product(Blade::generator(g), sig);
            sign *= s;
            acc = b;
        }
        (sign, acc)
    }
}

/// `(-1)^N` where `N` counts pairs `(i in a, j in b)` with `i > j`.
fn reorder_sign(a: u16, b: u16) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl fmt::Display for Blade {
    /// One-based labels: the scalar blade prints as `1`, `e1^e3` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for g in self.generators() {
            if !first {
                f.write_str("^")?;
            }
            write!(f, "e{}", g + 1)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn generator_squares_follow_signature() {
        let sig = cl(3, 1);
        for i in 0..4 {
            let (s, b) = Blade::generator(i).product(Blade::generator(i), sig);
            assert_eq!(b, Blade::SCALAR);
            assert_eq!(s, if i < 3 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn distinct_generators_anticommute() {
        let sig = cl(2, 0);
        let (s12, b12) = Blade::generator(0).product(Blade::generator(1), sig);
        let (s21, b21) = Blade::generator(1).product(Blade::generator(0), sig);
        assert_eq!(b12, b21);
        assert_eq!(s12, -s21);
    }

    #[test]
    fn pseudoscalar_of_cl2_squares_to_minus_one() {
        let sig = cl(2, 0);
        let i = Blade::pseudoscalar(2);
        assert_eq!(i.product(i, sig), (-1.0, Blade::SCALAR));
    }

    #[test]
    fn ordered_products_sort_with_sign() {
        let sig = cl(3, 0);
        // e3 e1 e2 = e1 e2 e3 (two transpositions)
        assert_eq!(Blade::from_ordered(&[2, 0, 1], sig), (1.0, Blade::pseudoscalar(3)));
        // e2 e1 = -e1 e2
        assert_eq!(Blade::from_ordered(&[1, 0], sig), (-1.0, Blade::from_mask(0b11)));
    }

    #[test]
    fn labels_are_one_based() {
        assert_eq!(alloc::format!("{}", Blade::from_mask(0b101)), "e1^e3");
        assert_eq!(alloc::format!("{}", Blade::SCALAR), "1");
    }
}
