//! Photon-counting measurements on evolved states.
//!
//! Conditioning comes in three forms: a total count over a mode subset
//! ([`postselect_total`]), vacuum on a subset ([`project_vacuum`]) and exact
//! per-mode counts ([`condition_counts`]). On top of those sit the two-mode
//! NOON fidelity, the parity observable `(-1)^{n}` on one detector, fringe
//! scans of the postselected interferometer and the analytic success rate.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::{evolve, mzi_network};
use crate::fock::{check_mode_set, make_input, FockState, InputSpec, Occupation};
use crate::math;
use crate::multiport::{beamsplitter, canonical_multiport, compose, phase_shifter};

/// Below this kept probability the conditional state is left empty.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-30;

/// Derivatives below this magnitude make a phase-uncertainty row singular.
pub const SINGULAR_SLOPE: f64 = 1e-6;

/// Conditional state after a measurement and the probability of the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PostselectionResult {
    pub state: FockState,
    pub probability: f64,
}

fn condition(s: &FockState, keep: impl Fn(&Occupation) -> bool) -> PostselectionResult {
    let kept = s.filtered(keep);
    let probability = kept.norm_sqr();
    let state = if probability < NEGLIGIBLE_PROBABILITY {
        FockState::zero(s.n_modes()).expect("source state has at least one mode")
    } else {
        kept.normalized()
    };
    PostselectionResult { state, probability }
}

/// Keep kets whose count summed over `modes` equals `total`.
pub fn postselect_total(s: &FockState, modes: &[usize], total: u32) -> Result<PostselectionResult> {
    check_mode_set(modes, s.n_modes())?;
    Ok(condition(s, |k| {
        modes.iter().map(|&m| k.counts()[m]).sum::<u32>() == total
    }))
}

/// Keep kets with no photon in any of `modes`.
pub fn project_vacuum(s: &FockState, modes: &[usize]) -> Result<PostselectionResult> {
    check_mode_set(modes, s.n_modes())?;
    Ok(condition(s, |k| modes.iter().all(|&m| k.counts()[m] == 0)))
}

/// Condition on exact counts `(mode, count)` in each listed mode.
///
/// The measured modes are left in definite number states, so the returned
/// state is over the remaining modes only, in their original order.
pub fn condition_counts(s: &FockState, counts: &[(usize, u32)]) -> Result<PostselectionResult> {
    let modes: Vec<usize> = counts.iter().map(|&(m, _)| m).collect();
    check_mode_set(&modes, s.n_modes())?;
    let remaining: Vec<usize> = (0..s.n_modes()).filter(|m| !modes.contains(m)).collect();
    if remaining.is_empty() {
        return Err(Error::TooFewModes { min: 1, got: 0 });
    }
    let kept = condition(s, |k| counts.iter().all(|&(m, n)| k.counts()[m] == n));
    let reduced = kept.state.into_map().into_iter().map(|(k, a)| {
        let counts: Vec<u32> = remaining.iter().map(|&m| k.counts()[m]).collect();
        (counts, a)
    });
    Ok(PostselectionResult {
        state: FockState::from_amplitudes(remaining.len(), reduced)?,
        probability: kept.probability,
    })
}

/// Overlap of a state with the closest two-mode NOON state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoonReport {
    /// `max_chi |<(|N,0> + e^{i chi}|0,N>)/sqrt 2 | s>|^2`.
    pub fidelity: f64,
    /// `arg(amp_0n) - arg(amp_n0)` wrapped to (-pi, pi].
    pub best_relative_phase: f64,
    pub amp_n0: Complex64,
    pub amp_0n: Complex64,
}

/// NOON fidelity of `s` on modes `(i, j)` with `n` photons; all other modes
/// must be empty in the contributing kets.
pub fn noon_fidelity(s: &FockState, mode_pair: (usize, usize), n: u32) -> Result<NoonReport> {
    let (i, j) = mode_pair;
    check_mode_set(&[i, j], s.n_modes())?;
    let mut ket = alloc::vec![0; s.n_modes()];
    ket[i] = n;
    let amp_n0 = s.amplitude(&ket);
    ket[i] = 0;
    ket[j] = n;
    let amp_0n = s.amplitude(&ket);
    let sum = amp_n0.norm() + amp_0n.norm();
    Ok(NoonReport {
        fidelity: sum * sum / 2.0,
        best_relative_phase: math::wrap_angle(amp_0n.arg() - amp_n0.arg()),
        amp_n0,
        amp_0n,
    })
}

/// `sum |amp|^2 (-1)^{n_mode}`.
pub fn parity_expectation(s: &FockState, mode: usize) -> Result<f64> {
    check_mode_set(&[mode], s.n_modes())?;
    Ok(s.iter()
        .map(|(k, a)| {
            let p = a.norm_sqr();
            if k.counts()[mode] % 2 == 0 {
                p
            } else {
                -p
            }
        })
        .sum())
}

/// One phase setting of a fringe scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub phi: f64,
    /// Probability of `n` counts on output modes 0 and 1, times `eta^n`.
    pub post_prob: f64,
    /// Parity of mode 1 on the postselected output.
    pub parity: f64,
    /// NOON fidelity inside the interferometer, before the final splitter.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub n: usize,
    pub input: InputSpec,
    pub detector_efficiency: f64,
    /// Sorted by `phi`.
    pub rows: Vec<ScanRow>,
}

fn check_efficiency(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidEfficiency(eta));
    }
    Ok(())
}

/// Evaluate a single scan row; rows are independent of each other.
pub fn fringe_point(
    n: usize,
    input_spec: &InputSpec,
    phi: f64,
    detector_efficiency: f64,
) -> Result<ScanRow> {
    check_efficiency(detector_efficiency)?;
    if !phi.is_finite() {
        return Err(Error::InvalidPhaseGrid);
    }
    crate::fock::check_modes(n, input_spec.n_modes())?;
    let input = make_input(input_spec)?;
    let photons = n as u32;

    let at_output = evolve(&input, &mzi_network(n, phi)?)?;
    let counted = postselect_total(&at_output, &[0, 1], photons)?;
    let parity = if counted.state.is_empty() {
        0.0
    } else {
        parity_expectation(&counted.state, 1)?.clamp(-1.0, 1.0)
    };

    let inside = evolve(
        &input,
        &compose(&[canonical_multiport(n)?, phase_shifter(n, phi)?])?,
    )?;
    let heralded = postselect_total(&inside, &[0, 1], photons)?;
    let fidelity = noon_fidelity(&heralded.state, (0, 1), photons)?
        .fidelity
        .min(1.0);

    Ok(ScanRow {
        phi,
        post_prob: counted.probability.min(1.0) * math::powi(detector_efficiency, photons as i32),
        parity,
        fidelity,
    })
}

/// Postselected interferometer response over a phase grid.
pub fn fringe_scan(
    n: usize,
    input_spec: &InputSpec,
    phis: &[f64],
    detector_efficiency: f64,
) -> Result<ScanResult> {
    if phis.is_empty() || phis.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidPhaseGrid);
    }
    let mut sorted = phis.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows = sorted
        .iter()
        .map(|&phi| fringe_point(n, input_spec, phi, detector_efficiency))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        n,
        input: input_spec.clone(),
        detector_efficiency,
        rows,
    })
}

/// Phase uncertainty at an interior scan point; `None` marks a singular slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyPoint {
    pub phi: f64,
    pub delta_phi: Option<f64>,
}

/// `sqrt(1 - <O>^2) / |d<O>/dphi|` on interior rows by central differences.
pub fn phase_uncertainty(scan: &ScanResult) -> Result<Vec<UncertaintyPoint>> {
    let rows = &scan.rows;
    if rows.len() < 3 {
        return Err(Error::TooFewRows {
            min: 3,
            got: rows.len(),
        });
    }
    let step = (rows[rows.len() - 1].phi - rows[0].phi) / (rows.len() - 1) as f64;
    if step.is_nan() || step <= 0.0 {
        return Err(Error::NonUniformGrid);
    }
    let uniform = rows
        .windows(2)
        .all(|w| ((w[1].phi - w[0].phi) - step).abs() <= 1e-9 * step.max(1.0));
    if !uniform {
        return Err(Error::NonUniformGrid);
    }
    Ok(rows
        .windows(3)
        .map(|w| {
            let slope = (w[2].parity - w[0].parity) / (2.0 * step);
            let o = w[1].parity;
            let delta_phi = (slope.abs() >= SINGULAR_SLOPE).then(|| {
                let spread = ((1.0 - o) * (1.0 + o)).max(0.0);
                math::sqrt(spread) / slope.abs()
            });
            UncertaintyPoint {
                phi: w[1].phi,
                delta_phi,
            }
        })
        .collect())
}

/// Triple-coincidence rate of the three-photon interferometer read out with
/// threshold detectors: one on output 0, and two behind a 50/50 splitter on
/// output 1.
pub fn nonresolving_n3_coincidence(phi: f64) -> Result<f64> {
    let at_output = evolve(
        &make_input(&InputSpec::single_photons(3))?,
        &mzi_network(3, phi)?,
    )?;
    // Mode 3 is the second port of the splitter on output 1.
    let split = evolve(
        &at_output.with_vacuum_modes(1),
        &beamsplitter(4, 1, 3)?.into(),
    )?;
    all_click_probability(&split, &[0, 1, 3])
}

/// `P(every detector in modes clicks) = sum_{A subset} (-1)^{|A|} P(vacuum on A)`.
fn all_click_probability(s: &FockState, modes: &[usize]) -> Result<f64> {
    check_mode_set(modes, s.n_modes())?;
    let mut total = 0.0;
    for mask in 0u32..(1 << modes.len()) {
        let subset: Vec<usize> = modes
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &m)| m)
            .collect();
        let p_vac = if subset.is_empty() {
            s.norm_sqr()
        } else {
            project_vacuum(s, &subset)?.probability
        };
        if subset.len().is_multiple_of(2) {
            total += p_vac;
        } else {
            total -= p_vac;
        }
    }
    Ok(total)
}

fn check_photons(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::TooFewModes { min: 1, got: 0 });
    }
    Ok(())
}

/// Postselection success rate `2 n! / n^n` of the single-photon multiport.
///
/// Evaluated as `2 prod_{k=1}^{n} (k/n)`, which cannot overflow. Note that
/// `n = 1` gives 2: the formula only describes a probability for `n >= 2`.
pub fn success_probability_exact(n: u32) -> Result<f64> {
    check_photons(n)?;
    let nf = f64::from(n);
    Ok(2.0 * (1..=n).map(|k| f64::from(k) / nf).product::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirlingScaling {
    /// `2 n! n^-n`
    pub exact: f64,
    /// `2 sqrt(2 pi n) e^-n`
    pub asymptotic: f64,
    pub ratio: f64,
}

/// Compare the success rate with its large-`n` form, in the log domain.
pub fn stirling_scaling(n: u32) -> Result<StirlingScaling> {
    check_photons(n)?;
    let nf = f64::from(n);
    let ln_exact = math::ln(2.0) + (1..=n).map(|k| math::ln(f64::from(k) / nf)).sum::<f64>();
    let ln_asymptotic = math::ln(2.0) + 0.5 * math::ln(2.0 * PI * nf) - nf;
    Ok(StirlingScaling {
        exact: math::exp(ln_exact),
        asymptotic: math::exp(ln_asymptotic),
        ratio: math::exp(ln_exact - ln_asymptotic),
    })
}
