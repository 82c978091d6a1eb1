//! Single-particle transfer matrices for passive multiport networks.
//!
//! Every element is an `M x M` unitary acting on mode operators. A network is
//! the product of its elements in propagation order, `T = E_last ... E_first`;
//! [`crate::evolve`] substitutes each input creation operator as
//! `a_k^dag = sum_m conj(T[m][k]) b_m^dag`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Maximum tolerated `max |U^dag U - I|` for anything called unitary here.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Where a transfer matrix came from; kept for reporting network layouts.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Identity,
    /// Discrete Fourier transform multiport on `n` modes.
    Canonical {
        n: usize,
    },
    /// Eight-port with free internal phase.
    FreePhase {
        theta: f64,
    },
    /// Phase `phi` on mode 0.
    PhaseShifter {
        phi: f64,
    },
    /// 50/50 splitter on modes 0 and 1, identity elsewhere.
    FinalBeamsplitter,
    /// 50/50 splitter on an arbitrary mode pair.
    Beamsplitter {
        modes: (usize, usize),
    },
    /// Matrix supplied by the caller.
    Custom,
    /// Result of multiplying other elements.
    Product,
}

/// Square complex matrix acting on mode creation operators, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    entries: Vec<Complex64>,
    origin: Element,
}

impl ModeUnitary {
    /// Build from row-major entries, rejecting anything not unitary to
    /// [`UNITARITY_TOLERANCE`].
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::TooFewModes { min: 1, got: 0 });
        }
        if entries.len() != dim * dim {
            return Err(Error::MalformedMatrix {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let u = Self {
            dim,
            entries,
            origin: Element::Custom,
        };
        let deviation = u.unitarity_deviation();
        if deviation.is_nan() || deviation >= UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::MalformedMatrix {
                    expected: dim * dim,
                    found: dim * row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::TooFewModes { min: 1, got: 0 });
        }
        Ok(Self::from_fn(dim, Element::Identity, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    fn from_fn(dim: usize, origin: Element, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self {
            dim,
            entries,
            origin,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn origin(&self) -> &Element {
        &self.origin
    }

    /// Row-major view of the entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks_exact(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, Element::Product, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, Element::Product, |r, c| self.get(c, r))
    }

    /// `max |(U^dag U - I)_{rc}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, r).conj() * self.get(k, c);
                }
                if r == c {
                    acc -= 1.0;
                }
                let d = acc.norm();
                if d > worst || d.is_nan() {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest entrywise modulus of `self - other`; infinite on a dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix product `self * rhs`.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        Ok(Self::from_fn(n, Element::Product, |r, c| {
            (0..n).map(|k| self.get(r, k) * rhs.get(k, c)).sum()
        }))
    }
}

impl Mul for &ModeUnitary {
    type Output = ModeUnitary;

    /// Panics on a dimension mismatch; use [`ModeUnitary::try_mul`] otherwise.
    fn mul(self, rhs: &ModeUnitary) -> ModeUnitary {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

/// Composite transfer matrix of a network together with its element layout.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTransfer {
    matrix: ModeUnitary,
    element_trace: Vec<Element>,
}

impl NetworkTransfer {
    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn matrix(&self) -> &ModeUnitary {
        &self.matrix
    }

    pub fn element_trace(&self) -> &[Element] {
        &self.element_trace
    }
}

impl From<ModeUnitary> for NetworkTransfer {
    fn from(matrix: ModeUnitary) -> Self {
        let element_trace = vec![matrix.origin.clone()];
        Self {
            matrix,
            element_trace,
        }
    }
}

/// DFT multiport: entry `(k, l)` is `exp(2 pi i k l / N) / sqrt(N)`.
pub fn canonical_multiport(n_modes: usize) -> Result<ModeUnitary> {
    if n_modes == 0 {
        return Err(Error::TooFewModes { min: 1, got: 0 });
    }
    let scale = 1.0 / math::sqrt(n_modes as f64);
    Ok(ModeUnitary::from_fn(
        n_modes,
        Element::Canonical { n: n_modes },
        |k, l| {
            // Reduce k*l mod N first so large exponents keep full precision.
            let e = (k * l) % n_modes;
            Complex64::from_polar(scale, 2.0 * PI * e as f64 / n_modes as f64)
        },
    ))
}

/// Eight-port (four modes) with free internal phase `theta`.
///
/// Equal to `canonical_multiport(4)` at `theta = pi/2`.
pub fn free_phase_8port(theta: f64) -> ModeUnitary {
    let one = Complex64::new(0.5, 0.0);
    let t = Complex64::from_polar(0.5, theta);
    let rows = [
        [one, one, one, one],
        [one, t, -one, -t],
        [one, -one, one, -one],
        [one, -t, -one, t],
    ];
    ModeUnitary::from_fn(4, Element::FreePhase { theta }, |r, c| rows[r][c])
}

/// `diag(exp(i phi), 1, ..., 1)`.
pub fn phase_shifter(n_modes: usize, phi: f64) -> Result<ModeUnitary> {
    if n_modes == 0 {
        return Err(Error::TooFewModes { min: 1, got: 0 });
    }
    let phase = Complex64::from_polar(1.0, phi);
    Ok(ModeUnitary::from_fn(
        n_modes,
        Element::PhaseShifter { phi },
        |r, c| match (r, c) {
            (0, 0) => phase,
            (r, c) if r == c => Complex64::new(1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        },
    ))
}

/// Identity with the top-left 2x2 block replaced by `canonical_multiport(2)`.
pub fn embedded_final_bs(n_modes: usize) -> Result<ModeUnitary> {
    let mut u = beamsplitter(n_modes, 0, 1)?;
    u.origin = Element::FinalBeamsplitter;
    Ok(u)
}

/// 50/50 splitter (`[[1, 1], [1, -1]] / sqrt 2`) between modes `i < j`,
/// identity on every other mode.
pub fn beamsplitter(n_modes: usize, i: usize, j: usize) -> Result<ModeUnitary> {
    if n_modes < 2 {
        return Err(Error::TooFewModes {
            min: 2,
            got: n_modes,
        });
    }
    for m in [i, j] {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange { mode: m, n_modes });
        }
    }
    if i == j {
        return Err(Error::DuplicateMode(i));
    }
    let h = core::f64::consts::FRAC_1_SQRT_2;
    Ok(ModeUnitary::from_fn(
        n_modes,
        Element::Beamsplitter { modes: (i, j) },
        |r, c| {
            let v = if r == j && c == j {
                -h
            } else if (r == i || r == j) && (c == i || c == j) {
                h
            } else if r == c {
                1.0
            } else {
                0.0
            };
            Complex64::new(v, 0.0)
        },
    ))
}

/// Product of `elements` in propagation order: the first element in the
/// slice acts on the light first, so the result is `E_last ... E_first`.
pub fn compose(elements: &[ModeUnitary]) -> Result<NetworkTransfer> {
    let (first, rest) = elements.split_first().ok_or(Error::EmptyNetwork)?;
    let mut matrix = first.clone();
    for e in rest {
        if e.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                found: e.dim,
            });
        }
        matrix = e.try_mul(&matrix)?;
    }
    if rest.is_empty() {
        matrix.origin = first.origin.clone();
    }
    Ok(NetworkTransfer {
        matrix,
        element_trace: elements.iter().map(|e| e.origin.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tritter_matches_printed_matrix() {
        let m = canonical_multiport(3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let w = Complex64::from_polar(s, 2.0 * PI / 3.0);
        let w2 = Complex64::from_polar(s, 4.0 * PI / 3.0);
        let one = c(s, 0.0);
        let expected =
            ModeUnitary::from_rows(&[vec![one, one, one], vec![one, w, w2], vec![one, w2, w]])
                .unwrap();
        assert!(m.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn small_canonical_cases() {
        let m1 = canonical_multiport(1).unwrap();
        assert_eq!(m1.get(0, 0), c(1.0, 0.0));

        let m2 = canonical_multiport(2).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected =
            ModeUnitary::from_rows(&[vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]])
                .unwrap();
        assert!(m2.max_abs_diff(&expected) < 1e-15);
        assert_eq!(
            canonical_multiport(0),
            Err(Error::TooFewModes { min: 1, got: 0 })
        );
    }

    #[test]
    fn canonical_is_unitary_and_symmetric() {
        for n in 1..=16 {
            let m = canonical_multiport(n).unwrap();
            assert!(m.unitarity_deviation() < UNITARITY_TOLERANCE, "n = {n}");
            assert!(m.max_abs_diff(&m.transpose()) == 0.0, "n = {n}");
        }
    }

    #[test]
    fn free_phase_reduces_to_canonical() {
        let d = free_phase_8port(FRAC_PI_2).max_abs_diff(&canonical_multiport(4).unwrap());
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn free_phase_zero_is_real_and_unitary() {
        let m = free_phase_8port(0.0);
        assert!(m.entries().iter().all(|z| z.im == 0.0));
        assert!(m.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn phase_shifter_cases() {
        assert_eq!(
            phase_shifter(3, 0.0)
                .unwrap()
                .max_abs_diff(&ModeUnitary::identity(3).unwrap()),
            0.0
        );
        let p = phase_shifter(2, PI).unwrap();
        assert!((p.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p.get(1, 1), c(1.0, 0.0));

        let p = phase_shifter(4, FRAC_PI_3).unwrap();
        assert!((p.get(0, 0) - c(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        for k in 1..4 {
            assert_eq!(p.get(k, k), c(1.0, 0.0));
        }
    }

    #[test]
    fn final_bs_embedding() {
        let b2 = embedded_final_bs(2).unwrap();
        assert!(b2.max_abs_diff(&canonical_multiport(2).unwrap()) < 1e-15);

        let h = FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let expected = ModeUnitary::from_rows(&[
            vec![c(h, 0.0), c(h, 0.0), z],
            vec![c(h, 0.0), c(-h, 0.0), z],
            vec![z, z, c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(embedded_final_bs(3).unwrap().max_abs_diff(&expected) < 1e-15);

        let b4 = embedded_final_bs(4).unwrap();
        assert!(b4.unitarity_deviation() < 1e-12);
        for r in 0..4 {
            for k in 2..4 {
                let want = if r == k { c(1.0, 0.0) } else { z };
                assert_eq!(b4.get(r, k), want);
                assert_eq!(b4.get(k, r), want);
            }
        }
        assert_eq!(
            embedded_final_bs(1),
            Err(Error::TooFewModes { min: 2, got: 1 })
        );
    }

    #[test]
    fn compose_order_and_errors() {
        let id = ModeUnitary::identity(3).unwrap();
        let t = compose(&[id.clone(), id.clone()]).unwrap();
        assert_eq!(t.matrix().max_abs_diff(&id), 0.0);

        let m3 = canonical_multiport(3).unwrap();
        let single = compose(core::slice::from_ref(&m3)).unwrap();
        assert_eq!(single.matrix(), &m3);

        let mzi = compose(&[
            m3.clone(),
            phase_shifter(3, 0.0).unwrap(),
            embedded_final_bs(3).unwrap(),
        ])
        .unwrap();
        let direct = &embedded_final_bs(3).unwrap() * &m3;
        assert!(mzi.matrix().max_abs_diff(&direct) < 1e-15);
        assert_eq!(
            mzi.element_trace(),
            &[
                Element::Canonical { n: 3 },
                Element::PhaseShifter { phi: 0.0 },
                Element::FinalBeamsplitter
            ]
        );

        assert_eq!(compose(&[]), Err(Error::EmptyNetwork));
        assert_eq!(
            compose(&[m3, ModeUnitary::identity(2).unwrap()]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn rejects_non_unitary() {
        let err = ModeUnitary::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(err, Err(Error::NotUnitary { .. })));
        assert!(matches!(
            ModeUnitary::new(2, vec![c(1.0, 0.0)]),
            Err(Error::MalformedMatrix { .. })
        ));
    }
}
