//! The root-of-unity product identity
//! `prod_{k<n} (beta + e^{2 pi i k/n} gamma) = beta^n - (-1)^n gamma^n`,
//! evaluated three ways: the product itself, the closed form, and the
//! determinant of the circulant `beta I + gamma P` (`P` the cyclic shift),
//! whose eigenvalues are exactly the product factors.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub fn product_lhs(beta: Complex64, gamma: Complex64, n: u32) -> Complex64 {
    (0..n)
        .map(|k| {
            // k/n in [0, 1) keeps the angle small for large n.
            let w = Complex64::from_polar(1.0, 2.0 * PI * f64::from(k) / f64::from(n));
            beta + w * gamma
        })
        .product()
}

pub fn product_rhs(beta: Complex64, gamma: Complex64, n: u32) -> Complex64 {
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    beta.powu(n) + sign * gamma.powu(n)
}

/// Determinant of the `n x n` matrix with `beta` on the diagonal, `gamma` on
/// the superdiagonal and `gamma` in the bottom-left corner.
///
/// For `n = 1` the corner entry would land on the diagonal; that case is
/// taken as the 1x1 matrix `[beta]`, which does not satisfy the identity.
pub fn circulant_determinant(beta: Complex64, gamma: Complex64, n: u32) -> Complex64 {
    let n = n as usize;
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if n == 1 {
        return beta;
    }
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        m[r * n + r] = beta;
        m[r * n + (r + 1) % n] = gamma;
    }
    determinant(&mut m, n)
}

/// LU elimination with partial pivoting; consumes `m`.
fn determinant(m: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a * n + col].norm().total_cmp(&m[b * n + col].norm()))
            .expect("nonempty range");
        if m[pivot * n + col] == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for c in 0..n {
                m.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..n {
                let v = m[col * n + c];
                m[r * n + c] -= f * v;
            }
        }
    }
    det
}

/// Worst relative residuals seen while checking the identity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityCheck {
    pub samples: usize,
    /// `max |lhs - rhs| / max(1, |rhs|)`
    pub product_residual: f64,
    /// Same measure for the determinant route (`n >= 2` only).
    pub determinant_residual: f64,
}

impl IdentityCheck {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.product_residual < tolerance && self.determinant_residual < tolerance
    }
}

/// Run all three routes over `samples` for every `n` in `orders`.
pub fn check_identity(samples: &[(Complex64, Complex64)], orders: &[u32]) -> IdentityCheck {
    let mut check = IdentityCheck::default();
    for &(beta, gamma) in samples {
        for &n in orders {
            let rhs = product_rhs(beta, gamma, n);
            let scale = rhs.norm().max(1.0);
            let r = (product_lhs(beta, gamma, n) - rhs).norm() / scale;
            check.product_residual = check.product_residual.max(r);
            if n >= 2 {
                let r = (circulant_determinant(beta, gamma, n) - rhs).norm() / scale;
                check.determinant_residual = check.determinant_residual.max(r);
            }
            check.samples += 1;
        }
    }
    check
}

/// Deterministic spread of `(beta, gamma)` pairs inside the disc `|z| <= radius`,
/// from a golden-ratio (Kronecker) sequence.
pub fn sample_pairs(count: usize, radius: f64) -> Vec<(Complex64, Complex64)> {
    // Additive recurrences with mutually irrational steps.
    const STEPS: [f64; 4] = [
        0.618_033_988_749_894_9,
        0.414_213_562_373_095_1,
        0.732_050_807_568_877_3,
        0.236_067_977_499_789_7,
    ];
    let frac = |x: f64| x - (x as u64) as f64;
    (1..=count)
        .map(|i| {
            let u: Vec<f64> = STEPS.iter().map(|s| frac(i as f64 * s)).collect();
            let b = Complex64::from_polar(radius * crate::math::sqrt(u[0]), 2.0 * PI * u[1]);
            let g = Complex64::from_polar(radius * crate::math::sqrt(u[2]), 2.0 * PI * u[3]);
            (b, g)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_small_cases() {
        assert!((product_lhs(c(1.0, 0.0), c(0.0, 0.0), 5) - 1.0).norm() < 1e-15);
        assert!((product_lhs(c(0.0, 0.0), c(1.0, 0.0), 2) + 1.0).norm() < 1e-15);
        let (b, g) = (c(0.3, -1.1), c(-0.7, 0.4));
        assert!((product_lhs(b, g, 7) - (b.powu(7) + g.powu(7))).norm() < 1e-12);
    }

    #[test]
    fn closed_form_cases() {
        for n in 1..10 {
            assert_eq!(product_rhs(c(1.0, 0.0), c(0.0, 0.0), n), c(1.0, 0.0));
        }
        assert_eq!(product_rhs(c(1.0, 0.0), c(1.0, 0.0), 2), c(0.0, 0.0));
        assert_eq!(product_rhs(c(2.0, 0.0), c(1.0, 0.0), 3), c(9.0, 0.0));
    }

    #[test]
    fn determinant_cases() {
        assert_eq!(
            circulant_determinant(c(1.5, 0.0), c(7.0, 0.0), 1),
            c(1.5, 0.0)
        );
        let d = circulant_determinant(c(1.0, 0.0), c(2.0, 0.0), 2);
        assert!((d - c(-3.0, 0.0)).norm() < 1e-14);
        assert!((d - product_rhs(c(1.0, 0.0), c(2.0, 0.0), 2)).norm() < 1e-14);

        // Explicit 3x3 cofactor expansion of [[b, g, 0], [0, b, g], [g, 0, b]].
        let (b, g) = (c(0.4, 0.9), c(-1.3, 0.2));
        let cofactor = b * (b * b - g * 0.0) - g * (0.0 * b - g * g) + 0.0 * (0.0 - b * g);
        let det = circulant_determinant(b, g, 3);
        assert!((det - cofactor).norm() < 1e-12);
        assert!((det - product_rhs(b, g, 3)).norm() < 1e-12);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // beta = 0 leaves only the cyclic shift, whose determinant is (-1)^{n+1} gamma^n.
        for n in 2..8 {
            let d = circulant_determinant(c(0.0, 0.0), c(1.0, 0.0), n);
            let want = if n % 2 == 0 { -1.0 } else { 1.0 };
            assert!((d - want).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn sampled_check_passes() {
        let samples = sample_pairs(200, 2.0);
        assert!(samples
            .iter()
            .all(|(b, g)| b.norm() <= 2.0 && g.norm() <= 2.0));
        let orders: Vec<u32> = (1..=12).collect();
        let check = check_identity(&samples, &orders);
        assert_eq!(check.samples, 200 * 12);
        assert!(check.passes(1e-9), "{check:?}");
    }
}
