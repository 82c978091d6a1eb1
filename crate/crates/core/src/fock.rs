//! Sparse multimode photon-number states.
//!
//! A [`FockState`] maps occupation vectors to complex amplitudes. Keys are
//! kept in lexicographic order and amplitudes with modulus below
//! [`AMPLITUDE_EPSILON`] are pruned after every constructing operation, so
//! two states that agree physically also agree as maps.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Amplitudes below this modulus are dropped.
pub const AMPLITUDE_EPSILON: f64 = 1e-15;

/// Default tolerance for the discarded Poisson tail of a coherent source.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;

/// Photon count per mode; the Fock basis label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Self(counts)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self(vec![0; n_modes])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn n_modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `prod_m n_m!` as a float.
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(counts: Vec<u32>) -> Self {
        Self(counts)
    }
}

impl From<&[u32]> for Occupation {
    fn from(counts: &[u32]) -> Self {
        Self(counts.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// Sparse superposition of occupation-number kets over a fixed mode count.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_modes: usize,
    amplitudes: BTreeMap<Occupation, Complex64>,
    truncation_tail: f64,
}

impl FockState {
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        Self::basis(&vec![0; n_modes])
    }

    /// Single ket with amplitude one.
    pub fn basis(counts: &[u32]) -> Result<Self> {
        Self::from_amplitudes(counts.len(), [(counts.to_vec(), Complex64::new(1.0, 0.0))])
    }

    /// Empty (zero) state.
    pub fn zero(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::TooFewModes { min: 1, got: 0 });
        }
        Ok(Self {
            n_modes,
            amplitudes: BTreeMap::new(),
            truncation_tail: 0.0,
        })
    }

    /// Sum the given terms; repeated kets accumulate.
    pub fn from_amplitudes<I, O>(n_modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, Complex64)>,
        O: Into<Occupation>,
    {
        let mut state = Self::zero(n_modes)?;
        for (occ, amp) in terms {
            let occ = occ.into();
            if occ.n_modes() != n_modes {
                return Err(Error::DimensionMismatch {
                    expected: n_modes,
                    found: occ.n_modes(),
                });
            }
            *state.amplitudes.entry(occ).or_default() += amp;
        }
        state.prune();
        Ok(state)
    }

    pub(crate) fn from_map(
        n_modes: usize,
        amplitudes: BTreeMap<Occupation, Complex64>,
        truncation_tail: f64,
    ) -> Self {
        let mut s = Self {
            n_modes,
            amplitudes,
            truncation_tail,
        };
        s.prune();
        s
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= AMPLITUDE_EPSILON);
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Number of stored kets.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Poisson mass discarded when truncating a coherent source (0 otherwise).
    pub fn truncation_tail(&self) -> f64 {
        self.truncation_tail
    }

    /// Amplitude of a ket; zero if absent or of the wrong length.
    pub fn amplitude(&self, counts: &[u32]) -> Complex64 {
        self.amplitudes
            .get(&Occupation::from(counts))
            .copied()
            .unwrap_or_default()
    }

    /// Kets in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sqr())
    }

    /// Largest per-ket photon total.
    pub fn max_photons(&self) -> u32 {
        self.amplitudes
            .keys()
            .map(Occupation::total)
            .max()
            .unwrap_or(0)
    }

    /// The photon total if every ket carries the same one.
    pub fn definite_photon_number(&self) -> Option<u32> {
        let mut totals = self.amplitudes.keys().map(Occupation::total);
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    /// Multiply every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_map(
            self.n_modes,
            self.amplitudes
                .iter()
                .map(|(k, a)| (k.clone(), a * factor))
                .collect(),
            self.truncation_tail,
        )
    }

    /// Rescale to unit norm. The zero state is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / n, 0.0))
    }

    /// Vector sum; truncation tails add.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_modes(self.n_modes, other.n_modes)?;
        let mut amplitudes = self.amplitudes.clone();
        for (k, a) in &other.amplitudes {
            *amplitudes.entry(k.clone()).or_default() += a;
        }
        Ok(Self::from_map(
            self.n_modes,
            amplitudes,
            self.truncation_tail + other.truncation_tail,
        ))
    }

    /// Append `extra` vacuum modes after the existing ones.
    pub fn with_vacuum_modes(&self, extra: usize) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(k, a)| {
                let mut counts = k.counts().to_vec();
                counts.resize(self.n_modes + extra, 0);
                (Occupation(counts), *a)
            })
            .collect();
        Self {
            n_modes: self.n_modes + extra,
            amplitudes,
            truncation_tail: self.truncation_tail,
        }
    }

    /// Keep only kets satisfying `keep`, without renormalizing.
    pub(crate) fn filtered(&self, keep: impl Fn(&Occupation) -> bool) -> Self {
        Self {
            n_modes: self.n_modes,
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, a)| (k.clone(), *a))
                .collect(),
            truncation_tail: self.truncation_tail,
        }
    }

    pub(crate) fn into_map(self) -> BTreeMap<Occupation, Complex64> {
        self.amplitudes
    }
}

pub(crate) fn check_modes(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Validate a mode subset: nonempty, in range, no repeats.
pub(crate) fn check_mode_set(modes: &[usize], n_modes: usize) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange { mode: m, n_modes });
        }
        if modes[..i].contains(&m) {
            return Err(Error::DuplicateMode(m));
        }
    }
    Ok(())
}

/// What feeds one input mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Fock(u32),
    Coherent(Complex64),
}

/// Per-mode input declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSpec {
    pub sources: Vec<Source>,
    pub tail_epsilon: f64,
}

impl InputSpec {
    pub fn new(sources: Vec<Source>, tail_epsilon: f64) -> Self {
        Self {
            sources,
            tail_epsilon,
        }
    }

    /// Number-state input with the default tail tolerance.
    pub fn fock(counts: &[u32]) -> Self {
        Self::new(
            counts.iter().map(|&n| Source::Fock(n)).collect(),
            DEFAULT_TAIL_EPSILON,
        )
    }

    /// `|1, 1, ..., 1>` on `n` modes.
    pub fn single_photons(n: usize) -> Self {
        Self::fock(&vec![1; n])
    }

    /// Coherent amplitude `alpha` in mode 0, single photons in modes `1..n`.
    pub fn coherent_with_photons(n: usize, alpha: Complex64, tail_epsilon: f64) -> Self {
        let mut sources = vec![Source::Fock(1); n];
        if let Some(first) = sources.first_mut() {
            *first = Source::Coherent(alpha);
        }
        Self::new(sources, tail_epsilon)
    }

    pub fn n_modes(&self) -> usize {
        self.sources.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::TooFewModes { min: 1, got: 0 });
        }
        let coherent = self
            .sources
            .iter()
            .filter(|s| matches!(s, Source::Coherent(_)))
            .count();
        if coherent > 1 {
            return Err(Error::MultipleCoherentSources(coherent));
        }
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon < 1.0) {
            return Err(Error::InvalidTailEpsilon(self.tail_epsilon));
        }
        for s in &self.sources {
            if let Source::Coherent(a) = s {
                if !a.is_finite() {
                    return Err(Error::NonFiniteAmplitude);
                }
            }
        }
        Ok(())
    }
}

/// Smallest `n_max` whose Poisson(mean) tail `P(n > n_max)` is below
/// `tail_epsilon`, together with that tail mass.
pub fn poisson_cutoff(mean: f64, tail_epsilon: f64) -> (u32, f64) {
    if mean == 0.0 {
        return (0, 0.0);
    }
    // Enumerate the pmf in the log domain far enough past the mode that the
    // remainder is negligible, then accumulate tails from the far end.
    let ln_mean = math::ln(mean);
    let horizon = (mean + 40.0 * math::sqrt(mean) + 60.0) as u32;
    let mut pmf = Vec::with_capacity(horizon as usize + 1);
    let mut ln_p = -mean;
    pmf.push(math::exp(ln_p));
    for n in 1..=horizon {
        ln_p += ln_mean - math::ln(f64::from(n));
        pmf.push(math::exp(ln_p));
    }
    let mut tails = vec![0.0; pmf.len()];
    let mut acc = 0.0;
    for n in (0..pmf.len()).rev() {
        // tails[n] = P(N > n)
        tails[n] = acc;
        acc += pmf[n];
    }
    for (n, &t) in tails.iter().enumerate() {
        if t < tail_epsilon {
            return (n as u32, t);
        }
    }
    (horizon, 0.0)
}

/// Truncated single-mode coherent expansion `exp(-|a|^2/2) a^n / sqrt(n!)`.
fn coherent_terms(alpha: Complex64, tail_epsilon: f64) -> (Vec<(u32, Complex64)>, f64) {
    let (n_max, tail) = poisson_cutoff(alpha.norm_sqr(), tail_epsilon);
    let mut terms = Vec::with_capacity(n_max as usize + 1);
    let mut c = Complex64::new(math::exp(-alpha.norm_sqr() / 2.0), 0.0);
    terms.push((0, c));
    for n in 1..=n_max {
        c = c * alpha / math::sqrt(f64::from(n));
        terms.push((n, c));
    }
    (terms, tail)
}

/// Tensor product of the declared per-mode sources.
pub fn make_input(spec: &InputSpec) -> Result<FockState> {
    spec.validate()?;
    let n_modes = spec.n_modes();
    let mut partial: Vec<(Vec<u32>, Complex64)> = vec![(Vec::new(), Complex64::new(1.0, 0.0))];
    let mut tail = 0.0;
    for source in &spec.sources {
        let factor: Vec<(u32, Complex64)> = match *source {
            Source::Fock(n) => vec![(n, Complex64::new(1.0, 0.0))],
            Source::Coherent(alpha) => {
                let (terms, t) = coherent_terms(alpha, spec.tail_epsilon);
                tail += t;
                terms
            }
        };
        partial = partial
            .iter()
            .flat_map(|(counts, amp)| {
                factor.iter().map(move |&(n, c)| {
                    let mut counts = counts.clone();
                    counts.push(n);
                    (counts, amp * c)
                })
            })
            .collect();
    }
    let mut state = FockState::from_amplitudes(n_modes, partial)?;
    state.truncation_tail = tail;
    Ok(state)
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &FockState, b: &FockState) -> Result<Complex64> {
    check_modes(a.n_modes, b.n_modes)?;
    // Iterate the smaller map.
    let (small, large, flip) = if a.len() <= b.len() {
        (a, b, false)
    } else {
        (b, a, true)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, x) in &small.amplitudes {
        if let Some(y) = large.amplitudes.get(k) {
            acc += if flip { y.conj() * x } else { x.conj() * y };
        }
    }
    Ok(acc)
}

/// Distribution of the photon total summed over `modes`.
pub fn number_distribution(s: &FockState, modes: &[usize]) -> Result<BTreeMap<u32, f64>> {
    check_mode_set(modes, s.n_modes)?;
    let mut dist = BTreeMap::new();
    for (k, a) in &s.amplitudes {
        let total: u32 = modes.iter().map(|&m| k.counts()[m]).sum();
        *dist.entry(total).or_insert(0.0) += a.norm_sqr();
    }
    Ok(dist)
}
