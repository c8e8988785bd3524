//! Operators that move a Fock state by a fixed number of quanta.
//!
//! Every jump operator of the maser has the form `O|n> = f(n)|n + s>`: the
//! cavity ladder operators (`s = ±1`), functions of `phi` (`s = 0`), and the
//! gain operator `a^dag sinc(g tau phi)` (`s = 1`). Products of such
//! operators keep this form, so diagonal matrix elements of long products
//! reduce to following a single basis state.

use std::sync::Arc;

/// `O|n> = amplitude(n) |n + shift>`, zero when `n + shift < 0`.
#[derive(Clone)]
pub struct Ladder {
    shift: i64,
    amplitude: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Ladder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ladder").field("shift", &self.shift).finish()
    }
}

impl Ladder {
    pub fn new(shift: i64, amplitude: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            shift,
            amplitude: Arc::new(amplitude),
        }
    }

    /// `a`.
    pub fn annihilation() -> Self {
        Self::new(-1, |n| (n as f64).sqrt())
    }

    /// `a^dag`.
    pub fn creation() -> Self {
        Self::new(1, |n| ((n + 1) as f64).sqrt())
    }

    /// `F(phi)` with `phi = sqrt(n + 1)` on `|n>`.
    pub fn of_phi(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(0, move |n| f(((n + 1) as f64).sqrt()))
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn amplitude(&self, n: usize) -> f64 {
        (self.amplitude)(n)
    }

    /// Hermitian adjoint (amplitudes are real).
    pub fn adjoint(&self) -> Self {
        let shift = self.shift;
        let inner = Arc::clone(&self.amplitude);
        Self::new(-shift, move |m| {
            let source = m as i64 - shift;
            if source < 0 {
                0.0
            } else {
                inner(source as usize)
            }
        })
    }

    /// `self * scalar`.
    pub fn scaled(&self, scalar: f64) -> Self {
        let inner = Arc::clone(&self.amplitude);
        Self::new(self.shift, move |n| scalar * inner(n))
    }

    /// `self + c * identity`; only defined for diagonal operators.
    pub fn plus_identity(&self, c: f64) -> Self {
        assert_eq!(self.shift, 0, "identity shift on an off-diagonal operator");
        let inner = Arc::clone(&self.amplitude);
        Self::new(0, move |n| inner(n) + c)
    }

    /// Applies the operator to `amp |n>`.
    pub fn apply(&self, state: (usize, f64)) -> Option<(usize, f64)> {
        let (n, amp) = state;
        let target = n as i64 + self.shift;
        if target < 0 {
            return None;
        }
        Some((target as usize, amp * self.amplitude(n)))
    }
}

/// `<n| O_1 O_2 ... O_k |n>` for a product written left to right.
pub fn diagonal_element(product: &[&Ladder], n: usize) -> f64 {
    let mut state = (n, 1.0);
    for op in product.iter().rev() {
        match op.apply(state) {
            Some(next) => state = next,
            None => return 0.0,
        }
    }
    if state.0 == n {
        state.1
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_commutator() {
        let a = Ladder::annihilation();
        let ad = Ladder::creation();
        for n in 0..20 {
            let c = diagonal_element(&[&a, &ad], n) - diagonal_element(&[&ad, &a], n);
            assert!((c - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_of_creation_is_annihilation() {
        let ad = Ladder::creation().adjoint();
        let a = Ladder::annihilation();
        for n in 0..10 {
            assert_eq!(ad.apply((n, 1.0)), a.apply((n, 1.0)));
        }
    }

    #[test]
    fn phi_squared_is_a_a_dag() {
        let phi = Ladder::of_phi(|x| x);
        let a = Ladder::annihilation();
        let ad = Ladder::creation();
        for n in 0..15 {
            let lhs = diagonal_element(&[&phi, &phi], n);
            let rhs = diagonal_element(&[&a, &ad], n);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn off_diagonal_products_have_zero_trace() {
        let ad = Ladder::creation();
        assert_eq!(diagonal_element(&[&ad], 3), 0.0);
    }
}
