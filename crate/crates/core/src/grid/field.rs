use alloc::vec::Vec;

use num_complex::Complex64;

use super::{Grid, GridError};
use crate::clifford::{Blade, Multivector, Signature};

/// One multivector per grid node, stored densely: node `k`, blade mask `b`
/// lives at `data[k * 2^n + b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid,
    signature: Signature,
    data: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: Grid, signature: Signature) -> Result<Self, GridError> {
        if signature.dim() < grid.dim() {
            return Err(GridError::SignatureTooSmall { sig: signature.dim(), grid: grid.dim() });
        }
        let len = grid.node_count() * signature.blade_count();
        Ok(Self { grid, signature, data: alloc::vec![0.0; len] })
    }

    pub fn from_data(grid: Grid, signature: Signature, data: Vec<f64>) -> Result<Self, GridError> {
        let mut f = Self::zeros(grid, signature)?;
        if data.len() != f.data.len() {
            return Err(GridError::ValueCount { expected: f.data.len(), got: data.len() });
        }
        f.data = data;
        Ok(f)
    }

    /// Sample `f(x)` at every node; `x` has one entry per grid axis.
    pub fn from_fn<F>(grid: Grid, signature: Signature, mut f: F) -> Result<Self, GridError>
    where
        F: FnMut(&[f64]) -> Multivector,
    {
        let mut out = Self::zeros(grid, signature)?;
        for node in 0..out.grid.node_count() {
            let x = out.grid.coords(node);
            let v = f(&x[..out.grid.dim()]);
            out.set(node, &v)?;
        }
        Ok(out)
    }

    /// Scalar-valued field.
    pub fn scalar_fn<F>(grid: Grid, signature: Signature, mut f: F) -> Result<Self, GridError>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut out = Self::zeros(grid, signature)?;
        let w = out.width();
        for node in 0..out.grid.node_count() {
            let x = out.grid.coords(node);
            out.data[node * w] = f(&x[..out.grid.dim()]);
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    /// Coefficients per node (`2^n`).
    pub fn width(&self) -> usize {
        self.signature.blade_count()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn component(&self, node: usize, blade: Blade) -> f64 {
        self.data[node * self.width() + blade.mask() as usize]
    }

    /// One blade component across all nodes.
    pub fn component_values(&self, blade: Blade) -> Vec<f64> {
        let w = self.width();
        (0..self.grid.node_count()).map(|n| self.data[n * w + blade.mask() as usize]).collect()
    }

    pub fn value(&self, node: usize) -> Multivector {
        let w = self.width();
        let terms = self.data[node * w..(node + 1) * w]
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(b, &c)| (Blade::from_mask(b as u16), c));
        Multivector::from_terms(self.signature, terms).expect("stored blades fit the signature")
    }

    pub fn set(&mut self, node: usize, v: &Multivector) -> Result<(), GridError> {
        if v.signature() != self.signature {
            return Err(GridError::Mismatch);
        }
        let w = self.width();
        let slot = &mut self.data[node * w..(node + 1) * w];
        slot.fill(0.0);
        for (b, c) in v.terms() {
            slot[b.mask() as usize] = c;
        }
        Ok(())
    }

    /// Blade masks with any nonzero coefficient.
    pub fn active_blades(&self) -> Vec<Blade> {
        let w = self.width();
        (0..w)
            .filter(|&b| (0..self.grid.node_count()).any(|n| self.data[n * w + b] != 0.0))
            .map(|b| Blade::from_mask(b as u16))
            .collect()
    }

    pub fn same_layout(&self, other: &GridField) -> bool {
        self.grid == other.grid && self.signature == other.signature
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GridField, f: F) -> Result<GridField, GridError> {
        if !self.same_layout(other) {
            return Err(GridError::Mismatch);
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridField { grid: self.grid.clone(), signature: self.signature, data })
    }

    pub fn try_add(&self, other: &GridField) -> Result<GridField, GridError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &GridField) -> Result<GridField, GridError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> GridField {
        GridField { grid: self.grid.clone(), signature: self.signature, data: self.data.iter().map(|c| c * s).collect() }
    }

    pub fn grade_project(&self, k: usize) -> GridField {
        let w = self.width();
        let mut out = self.clone();
        for (i, c) in out.data.iter_mut().enumerate() {
            if Blade::from_mask((i % w) as u16).grade() != k {
                *c = 0.0;
            }
        }
        out
    }

    /// Largest coefficient difference over all nodes.
    pub fn max_abs_diff(&self, other: &GridField) -> Result<f64, GridError> {
        if !self.same_layout(other) {
            return Err(GridError::Mismatch);
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Coefficient-space Euclidean norm at a node.
    pub fn node_norm(&self, node: usize) -> f64 {
        let w = self.width();
        libm::sqrt(self.data[node * w..(node + 1) * w].iter().map(|c| c * c).sum())
    }
}

/// A complex scalar per node, identified with the even part of Euclidean
/// `Cl(2)` by `u + iv ↔ u + v·e1e2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != grid.node_count() {
            return Err(GridError::ValueCount { expected: grid.node_count(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    /// Sample `f(x + iy)`; needs a 2-D grid.
    pub fn from_fn<F: FnMut(Complex64) -> Complex64>(grid: Grid, mut f: F) -> Result<Self, GridError> {
        if grid.dim() != 2 {
            return Err(GridError::NotPlanar);
        }
        let values = (0..grid.node_count())
            .map(|n| {
                let x = grid.coords(n);
                f(Complex64::new(x[0], x[1]))
            })
            .collect();
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn to_grid_field(&self) -> Result<GridField, GridError> {
        let sig = Signature::euclidean(2)?;
        let mut out = GridField::zeros(self.grid.clone(), sig)?;
        for (n, z) in self.values.iter().enumerate() {
            out.data[n * 4] = z.re;
            out.data[n * 4 + 3] = z.im;
        }
        Ok(out)
    }

    /// Inverse of [`to_grid_field`](Self::to_grid_field); rejects odd
    /// components larger than `tol`.
    pub fn from_grid_field(f: &GridField, tol: f64) -> Result<Self, GridError> {
        if f.signature != Signature::euclidean(2)? {
            return Err(GridError::NotPlanar);
        }
        let mut values = Vec::with_capacity(f.grid.node_count());
        for n in 0..f.grid.node_count() {
            let c = &f.data[n * 4..n * 4 + 4];
            if c[1].abs() > tol || c[2].abs() > tol {
                return Err(GridError::NotEven(n));
            }
            values.push(Complex64::new(c[0], c[3]));
        }
        Ok(Self { grid: f.grid.clone(), values })
    }
}

/// Vector-valued field `A = Σ Aⁱ e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePotential(GridField);

impl GaugePotential {
    pub fn new(field: GridField) -> Result<Self, GridError> {
        let w = field.width();
        for n in 0..field.grid.node_count() {
            for b in 0..w {
                if Blade::from_mask(b as u16).grade() != 1 && field.data[n * w + b] != 0.0 {
                    return Err(GridError::NotGradeOne(n));
                }
            }
        }
        Ok(Self(field))
    }

    /// From component functions `A^i(x)`, one per signature generator.
    pub fn from_fn<F>(grid: Grid, signature: Signature, mut f: F) -> Result<Self, GridError>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let field = GridField::from_fn(grid, signature, |x| {
            let comps = f(x);
            Multivector::vector(signature, &comps).expect("one component per generator")
        })?;
        Self::new(field)
    }

    pub fn field(&self) -> &GridField {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    #[test]
    fn complex_embedding_round_trip() {
        let g = Grid::uniform(2, 5, -1.0, 1.0, Boundary::Clamped).unwrap();
        let z = ComplexField::from_fn(g, |z| z * z).unwrap();
        let f = z.to_grid_field().unwrap();
        assert_eq!(f.component(7, Blade::from_mask(3)), z.values()[7].im);
        assert_eq!(ComplexField::from_grid_field(&f, 0.0).unwrap(), z);
    }

    #[test]
    fn gauge_potential_rejects_mixed_grades() {
        let g = Grid::uniform(1, 4, 0.0, 1.0, Boundary::Clamped).unwrap();
        let sig = Signature::euclidean(1).unwrap();
        let f = GridField::scalar_fn(g, sig, |_| 1.0).unwrap();
        assert_eq!(GaugePotential::new(f), Err(GridError::NotGradeOne(0)));
    }
}
