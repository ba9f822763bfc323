use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use crate::clifford::text::write_coeff;

fn num(x: f64) -> String {
    let mut s = String::new();
    write_coeff(&mut s, x);
    s
}

/// One verified claim: what was expected, what came out, and whether the
/// two agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    /// `None` for exact (symbolic or integer) comparisons.
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn exact(name: impl Into<String>, expected: impl ToString, computed: impl ToString) -> Self {
        let expected = expected.to_string();
        let computed = computed.to_string();
        let passed = expected == computed;
        Self { name: name.into(), expected, computed, tolerance: None, passed }
    }

    /// `|computed - expected| <= tolerance`.
    pub fn within(name: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        let passed = (computed - expected).abs() <= tolerance && computed.is_finite();
        Self {
            name: name.into(),
            expected: num(expected),
            computed: num(computed),
            tolerance: Some(tolerance),
            passed,
        }
    }

    /// `computed <= bound`.
    pub fn at_most(name: impl Into<String>, bound: f64, computed: f64) -> Self {
        Self {
            name: name.into(),
            expected: alloc::format!("<= {}", num(bound)),
            computed: num(computed),
            tolerance: Some(bound),
            passed: computed <= bound,
        }
    }

    /// `computed >= bound`.
    pub fn at_least(name: impl Into<String>, bound: f64, computed: f64) -> Self {
        Self {
            name: name.into(),
            expected: alloc::format!(">= {}", num(bound)),
            computed: num(computed),
            tolerance: Some(bound),
            passed: computed >= bound,
        }
    }

    pub fn flag(name: impl Into<String>, expected: impl ToString, computed: impl ToString, passed: bool) -> Self {
        Self {
            name: name.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            tolerance: None,
            passed,
        }
    }
}
