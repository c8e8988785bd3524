//! Diagonal operators on the truncated Fock basis `|0>, ..., |N>`.

use crate::error::{Error, Result};

/// Which diagonal operator a sequence of values is a function of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// `n` on `|n>`.
    Number,
    /// `sqrt(n)` on `|n>`.
    SqrtNumber,
    /// `phi = (a a^dag)^{1/2}`, i.e. `sqrt(n + 1)` on `|n>`.
    Phi,
}

impl BasisTag {
    /// Eigenvalue of the tagged operator on `|n>`.
    pub fn eigenvalue(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            BasisTag::Number => n,
            BasisTag::SqrtNumber => n.sqrt(),
            BasisTag::Phi => (n + 1.0).sqrt(),
        }
    }
}

/// A function of a diagonal operator, stored by its values on `|0>..|N>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDiagonal {
    values: Vec<f64>,
    tag: BasisTag,
}

impl FockDiagonal {
    /// Tabulates `f(x_n)` where `x_n` is the eigenvalue of `tag` on `|n>`.
    pub fn from_fn(n_max: usize, tag: BasisTag, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..=n_max).map(|n| f(tag.eigenvalue(n))).collect();
        Self { values, tag }
    }

    pub fn from_values(values: Vec<f64>, tag: BasisTag) -> Self {
        Self { values, tag }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    /// Highest Fock index `N`.
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            tag: self.tag,
        }
    }
}

/// Eigenvalues of `phi = (a a^dag)^{1/2}`: `sqrt(1), ..., sqrt(N + 1)`.
pub fn phi_eigenvalues(n: usize) -> Result<FockDiagonal> {
    if n == 0 {
        return Err(Error::BasisTooSmall(n));
    }
    Ok(FockDiagonal::from_fn(n, BasisTag::Phi, |x| x))
}
