//! Mechanical checks of the planar-bivector flux identities and of the
//! exponential gauge solution.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{parse_field, Dependencies, SymError, SymField};
use crate::clifford::Signature;
use crate::Check;

pub fn example_dependencies() -> Dependencies {
    let mut d = Dependencies::new();
    d.insert(String::from("f"), BTreeSet::from([1, 2]));
    d.insert(String::from("g"), BTreeSet::from([1, 3]));
    d
}

fn cl3() -> Signature {
    Signature::euclidean(3).expect("3 generators")
}

fn field(text: &str, deps: &Dependencies) -> Result<SymField, SymError> {
    parse_field(text, cl3(), deps)
}

fn identity(name: &str, computed: &SymField, expected: &str, deps: &Dependencies) -> Result<Check, SymError> {
    let want = field(expected, deps)?;
    Ok(Check::flag(name, &want, computed, *computed == want))
}

/// `F = f(x1,x2) e1^e2` and `G = g(x1,x3) e1^e2`: interior and exterior
/// derivatives and their ratios against the blade.
pub fn flux_identities() -> Result<Vec<Check>, SymError> {
    let d = example_dependencies();
    let f = field("f e1^e2", &d)?;
    let g = field("g e1^e2", &d)?;
    let (f_in, f_ex) = f.flux_ratios()?;
    let (g_in, g_ex) = g.flux_ratios()?;
    let grad_ln_f = parse_field("ln(f)", cl3(), &d)?.dirac();
    Ok(alloc::vec![
        identity("div F", &f.interior(), "d_1(f) e2 - d_2(f) e1", &d)?,
        identity("(div F) F^-1", &f_in, "d_1(f)/f e1 + d_2(f)/f e2", &d)?,
        Check::flag("(div F) F^-1 = grad ln f", &grad_ln_f, &f_in, f_in == grad_ln_f),
        identity("curl F", &f.exterior(), "0", &d)?,
        identity("(curl F) F^-1", &f_ex, "0", &d)?,
        identity("div G", &g.interior(), "d_1(g) e2", &d)?,
        identity("(div G) G^-1", &g_in, "d_1(g)/g e1", &d)?,
        identity("curl G", &g.exterior(), "d_3(g) e1^e2^e3", &d)?,
        identity("(curl G) G^-1", &g_ex, "d_3(g)/g e3", &d)?,
    ])
}

/// Residuals of `(∇·G)G⁻¹ = (A·G)G⁻¹` and `(∇∧G)G⁻¹ = (A∧G)G⁻¹` for
/// `G = g e1^e2` and `A = A1 e1 + A2 e2 + A3 e3`, after substituting
/// `A2 := a2` and `g := solution`.
pub fn gauge_residuals(a2: &str, solution: &str) -> Result<(SymField, SymField), SymError> {
    let d = example_dependencies();
    let g = field("g e1^e2", &d)?;
    let a = field("A1 e1 + A2 e2 + A3 e3", &d)?;
    let inv = g.blade_inverse()?;
    let (lhs_in, lhs_ex) = g.flux_ratios()?;
    let rhs_in = a.inner(&g)?.geometric(&inv)?;
    let rhs_ex = a.outer(&g)?.geometric(&inv)?;
    let a2 = super::parse_scalar(a2, 3, &d)?;
    let sol = super::parse_scalar(solution, 3, &d)?;
    let settle = |r: SymField| -> Result<SymField, SymError> { r.substitute("A2", &a2)?.substitute("g", &sol) };
    Ok((settle(lhs_in.sub(&rhs_in)?)?, settle(lhs_ex.sub(&rhs_ex)?)?))
}

/// Same equations in the un-divided form `∇·G = A·G`, `∇∧G = A∧G`.
pub fn gauge_residuals_undivided(a2: &str, solution: &str) -> Result<(SymField, SymField), SymError> {
    let d = example_dependencies();
    let g = field("g e1^e2", &d)?;
    let a = field("A1 e1 + A2 e2 + A3 e3", &d)?;
    let a2 = super::parse_scalar(a2, 3, &d)?;
    let sol = super::parse_scalar(solution, 3, &d)?;
    let settle = |r: SymField| -> Result<SymField, SymError> { r.substitute("A2", &a2)?.substitute("g", &sol) };
    Ok((settle(g.interior().sub(&a.inner(&g)?)?)?, settle(g.exterior().sub(&a.outer(&g)?)?)?))
}

pub const GAUGE_SOLUTION: &str = "exp(A1 x1 + A3 x3)";

/// Substitutes `A2 = 0`, `g = exp(A1 x1 + A3 x3)` and checks that every
/// residual vanishes identically. Also records the perturbed and trivial
/// cases.
pub fn verify_gauge_example() -> Result<Vec<Check>, SymError> {
    let mut out = Vec::new();
    let (r_in, r_ex) = gauge_residuals("0", GAUGE_SOLUTION)?;
    let (u_in, u_ex) = gauge_residuals_undivided("0", GAUGE_SOLUTION)?;
    out.push(Check::flag("gauge interior ratio residual", "0", &r_in, r_in.is_zero()));
    out.push(Check::flag("gauge exterior ratio residual", "0", &r_ex, r_ex.is_zero()));
    out.push(Check::flag("gauge interior residual", "0", &u_in, u_in.is_zero()));
    out.push(Check::flag("gauge exterior residual", "0", &u_ex, u_ex.is_zero()));

    let (_, p_ex) = gauge_residuals_undivided("0", "exp(A1 x1)")?;
    let want = field("-A3 exp(A1 x1) e1^e2^e3", &example_dependencies())?;
    out.push(Check::flag("perturbed solution leaves exterior residual", &want, &p_ex, p_ex == want));

    let (t_in, t_ex) = trivial_gauge()?;
    out.push(Check::flag("A = 0 with constant g", "0", format!("{} ; {}", t_in, t_ex), t_in.is_zero() && t_ex.is_zero()));
    Ok(out)
}

fn trivial_gauge() -> Result<(SymField, SymField), SymError> {
    let d = Dependencies::new();
    let g = field("c e1^e2", &d)?;
    let a = field("0 e1", &d)?;
    let inv = g.blade_inverse()?;
    let (lhs_in, lhs_ex) = g.flux_ratios()?;
    Ok((lhs_in.sub(&a.inner(&g)?.geometric(&inv)?)?, lhs_ex.sub(&a.outer(&g)?.geometric(&inv)?)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_identities_hold() {
        for c in flux_identities().unwrap() {
            assert!(c.passed, "{}: expected {} got {}", c.name, c.expected, c.computed);
        }
    }

    #[test]
    fn gauge_example_holds() {
        for c in verify_gauge_example().unwrap() {
            assert!(c.passed, "{}: expected {} got {}", c.name, c.expected, c.computed);
        }
    }
}
