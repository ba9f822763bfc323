use core::fmt;

use serde::{Deserialize, Serialize};

use super::CliffordError;

/// Hard cap on `p + q`. A dense multivector in `Cl(12)` already has 4096
/// coefficients.
pub const MAX_GENERATORS: usize = 12;

/// Metric signature of a real Clifford algebra `Cl(p, q)`.
///
/// Generators `0..p` square to `+1`, generators `p..p+q` square to `-1`.
/// For the spacetime algebra `Cl(3,1)` this places the spatial directions
/// `γ1, γ2, γ3` at indices `0, 1, 2` (text labels `e1, e2, e3`) and the
/// timelike `γ0` at index `3` (label `e4`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    p: u8,
    q: u8,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self, CliffordError> {
        if p + q > MAX_GENERATORS {
            return Err(CliffordError::SignatureTooLarge { p, q });
        }
        Ok(Self { p: p as u8, q: q as u8 })
    }

    /// Euclidean signature `Cl(n, 0)`.
    pub fn euclidean(n: usize) -> Result<Self, CliffordError> {
        Self::new(n, 0)
    }

    pub fn p(&self) -> usize {
        self.p as usize
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    /// Number of generators `p + q`.
    pub fn dim(&self) -> usize {
        self.p() + self.q()
    }

    /// Number of basis blades, `2^(p+q)`.
    pub fn blade_count(&self) -> usize {
        1usize << self.dim()
    }

    /// `e_i e_i` for generator `i`.
    pub fn square(&self, generator: usize) -> f64 {
        if generator < self.p() {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cl({},{})", self.p, self.q)
    }
}
