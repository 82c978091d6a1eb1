//! Heisenberg-picture evolution of Fock states through linear networks.
//!
//! Each input ket `prod_k (a_k^dag)^{n_k} / sqrt(n_k!) |0>` is rewritten in
//! output creation operators with `a_k^dag = sum_m conj(T[m][k]) b_m^dag`
//! and expanded one photon at a time as a sparse polynomial. A monomial
//! `prod_m (b_m^dag)^{j_m}` acting on vacuum is `sqrt(prod_m j_m!)` times the
//! ket `|j>`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{check_modes, make_input, FockState, InputSpec, Occupation};
use crate::math;
use crate::multiport::{
    canonical_multiport, compose, embedded_final_bs, phase_shifter, NetworkTransfer,
};

/// Upper bound on the intermediate polynomial terms one call may generate.
pub const TERM_LIMIT: f64 = 1e7;

fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Worst-case term count: for each input ket with `p` photons over `m` modes,
/// `p` multiplication rounds each touching at most `C(p+m-1, m-1) * m` terms.
pub fn term_estimate(input: &FockState) -> f64 {
    let m = input.n_modes() as u64;
    input
        .iter()
        .map(|(k, _)| {
            let p = u64::from(k.total());
            p as f64 * m as f64 * binomial(p + m - 1, m - 1)
        })
        .sum()
}

/// Evolve `input` through `network`.
pub fn evolve(input: &FockState, network: &NetworkTransfer) -> Result<FockState> {
    let n_modes = network.dim();
    check_modes(n_modes, input.n_modes())?;
    let estimate = term_estimate(input);
    if estimate > TERM_LIMIT {
        return Err(Error::ComplexityGuard {
            estimate,
            limit: TERM_LIMIT,
        });
    }

    let t = network.matrix();
    // Column k of conj(T): output expansion of input mode k, nonzeros only.
    let substitutions: Vec<Vec<(usize, Complex64)>> = (0..n_modes)
        .map(|k| {
            (0..n_modes)
                .map(|m| (m, t.get(m, k).conj()))
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .collect()
        })
        .collect();

    let mut output: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (ket, amp) in input.iter() {
        let mut poly: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        poly.insert(
            Occupation::vacuum(n_modes),
            amp / math::sqrt(ket.factorial_product()),
        );
        for (k, &n) in ket.counts().iter().enumerate() {
            for _ in 0..n {
                poly = multiply_linear(&poly, &substitutions[k]);
            }
        }
        for (monomial, coef) in poly {
            let norm = math::sqrt(monomial.factorial_product());
            *output.entry(monomial).or_default() += coef * norm;
        }
    }
    Ok(FockState::from_map(
        n_modes,
        output,
        input.truncation_tail(),
    ))
}

/// `poly * sum_m coeffs[m] b_m^dag`.
fn multiply_linear(
    poly: &BTreeMap<Occupation, Complex64>,
    coeffs: &[(usize, Complex64)],
) -> BTreeMap<Occupation, Complex64> {
    let mut next = BTreeMap::new();
    for (monomial, coef) in poly {
        for &(m, c) in coeffs {
            let mut raised = monomial.clone();
            raised.counts_mut()[m] += 1;
            *next.entry(raised).or_default() += coef * c;
        }
    }
    next
}

/// Multiport, phase `phi` on mode 0, then a 50/50 splitter on modes 0 and 1.
pub fn mzi_network(n: usize, phi: f64) -> Result<NetworkTransfer> {
    compose(&[
        canonical_multiport(n)?,
        phase_shifter(n, phi)?,
        embedded_final_bs(n)?,
    ])
}

/// `make_input(input_spec)` evolved through [`mzi_network`].
pub fn evolve_mzi(input_spec: &InputSpec, n: usize, phi: f64) -> Result<FockState> {
    check_modes(n, input_spec.n_modes())?;
    let input = make_input(input_spec)?;
    evolve(&input, &mzi_network(n, phi)?)
}
