//! Test-only oracles, independent of the library's evolution path.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use noonsim_core::{Complex64, FockState, ModeUnitary};
use rand::Rng;

/// Dense brute-force evolution: every input photon is sent to every output
/// mode in turn (all `M^P` assignments), with `a_k^dag -> sum_m conj(T[m][k]) b_m^dag`.
pub fn brute_force_evolve(input: &FockState, t: &ModeUnitary) -> BTreeMap<Vec<u32>, Complex64> {
    let m = t.dim();
    let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    for (ket, amp) in input.iter() {
        let photons: Vec<usize> = ket
            .counts()
            .iter()
            .enumerate()
            .flat_map(|(k, &n)| std::iter::repeat_n(k, n as usize))
            .collect();
        let in_norm = 1.0 / factorial_product(ket.counts()).sqrt();
        let p = photons.len();
        let total = m.pow(p as u32);
        for code in 0..total {
            let mut rest = code;
            let mut coef = amp * in_norm;
            let mut occ = vec![0u32; m];
            for &k in &photons {
                let target = rest % m;
                rest /= m;
                coef *= t.get(target, k).conj();
                occ[target] += 1;
            }
            *out.entry(occ).or_default() += coef;
        }
    }
    out.into_iter()
        .map(|(occ, c)| {
            let s = factorial_product(&occ).sqrt();
            (occ, c * s)
        })
        .collect()
}

pub fn factorial_product(counts: &[u32]) -> f64 {
    counts
        .iter()
        .map(|&n| (1..=n).map(f64::from).product::<f64>())
        .product()
}

/// Largest amplitude difference between a simulated state and an oracle map.
pub fn max_amplitude_diff(state: &FockState, oracle: &BTreeMap<Vec<u32>, Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, a) in oracle {
        worst = worst.max((state.amplitude(k) - a).norm());
    }
    for (k, a) in state.iter() {
        if !oracle.contains_key(k.counts()) {
            worst = worst.max(a.norm());
        }
    }
    worst
}

/// Random unitary by modified Gram-Schmidt on a random complex matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> ModeUnitary {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let mut ok = true;
        for j in 0..n {
            for i in 0..j {
                let proj: Complex64 = (0..n).map(|r| cols[i][r].conj() * cols[j][r]).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (c, v) in tail[0].iter_mut().zip(&head[i]) {
                    *c -= proj * v;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for z in &mut cols[j] {
                *z /= norm;
            }
        }
        if !ok {
            continue;
        }
        let entries = (0..n)
            .flat_map(|r| cols.iter().map(move |c| c[r]).collect::<Vec<_>>())
            .collect();
        return ModeUnitary::new(n, entries).expect("Gram-Schmidt output is unitary");
    }
}

/// All occupation vectors over `modes` with total at most `max_total`.
pub fn occupations(modes: usize, max_total: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, modes: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == modes {
            out.push(prefix.clone());
            return;
        }
        for n in 0..=left {
            prefix.push(n);
            rec(prefix, modes, left - n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), modes, max_total, &mut out);
    out
}

/// `k * 2 pi / count` for `k in 0..count`.
pub fn uniform_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 2.0 * PI * k as f64 / count as f64)
        .collect()
}

/// Fit `values ~ s cos(n phi)` with `s` in {+1, -1}; returns `(s, max residual)`.
pub fn fit_signed_cos(phis: &[f64], values: &[f64], n: usize) -> (f64, f64) {
    let proj: f64 = phis
        .iter()
        .zip(values)
        .map(|(p, v)| v * (n as f64 * p).cos())
        .sum();
    let s = if proj >= 0.0 { 1.0 } else { -1.0 };
    let resid = phis
        .iter()
        .zip(values)
        .map(|(p, v)| (v - s * (n as f64 * p).cos()).abs())
        .fold(0.0, f64::max);
    (s, resid)
}

/// Fit `values ~ a (1 + s cos(n phi))` on a full-period uniform grid;
/// returns `(a, s, max residual)`.
pub fn fit_raised_cos(phis: &[f64], values: &[f64], n: usize) -> (f64, f64, f64) {
    let len = values.len() as f64;
    let a = values.iter().sum::<f64>() / len;
    let proj: f64 = phis
        .iter()
        .zip(values)
        .map(|(p, v)| v * (n as f64 * p).cos())
        .sum();
    let s = if proj >= 0.0 { 1.0 } else { -1.0 };
    let resid = phis
        .iter()
        .zip(values)
        .map(|(p, v)| (v - a * (1.0 + s * (n as f64 * p).cos())).abs())
        .fold(0.0, f64::max);
    (a, s, resid)
}
