//! Direct evaluation of the coupled congestion-avoidance formulas over plain
//! slices. Deliberately shares no code with the library: windows and RTTs
//! are passed as arrays and every expression is written out longhand.

#![allow(dead_code)]

pub fn lia_alpha(w: &[f64], tau: &[f64]) -> f64 {
    let w_total: f64 = w.iter().sum();
    let mut best = f64::MIN;
    let mut denom = 0.0;
    for i in 0..w.len() {
        let v = w[i] / (tau[i] * tau[i]);
        if v > best {
            best = v;
        }
        denom += w[i] / tau[i];
    }
    w_total * best / (denom * denom)
}

pub fn lia_increment(w: &[f64], tau: &[f64], r: usize) -> f64 {
    let w_total: f64 = w.iter().sum();
    let a = lia_alpha(w, tau) / w_total;
    let b = 1.0 / w[r];
    if a < b {
        a
    } else {
        b
    }
}

/// Returns (W, B, C) as sorted index vectors.
pub fn olia_sets(w: &[f64], ell: &[f64]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let wmax = w.iter().cloned().fold(f64::MIN, f64::max);
    let lmax = ell.iter().cloned().fold(f64::MIN, f64::max);
    let big: Vec<usize> = (0..w.len()).filter(|&i| w[i] == wmax).collect();
    let best: Vec<usize> = (0..w.len()).filter(|&i| ell[i] == lmax).collect();
    let collected: Vec<usize> = best.iter().cloned().filter(|i| !big.contains(i)).collect();
    (big, best, collected)
}

pub fn olia_alpha(n: usize, big: &[usize], collected: &[usize], r: usize) -> f64 {
    let p = n as f64;
    if collected.contains(&r) {
        (1.0 / p) / collected.len() as f64
    } else if big.contains(&r) && !collected.is_empty() {
        -(1.0 / p) / big.len() as f64
    } else {
        0.0
    }
}

pub fn olia_increment(w: &[f64], tau: &[f64], ell: &[f64], r: usize) -> f64 {
    let (big, _, collected) = olia_sets(w, ell);
    let mut denom = 0.0;
    for i in 0..w.len() {
        denom += w[i] / tau[i];
    }
    (w[r] / (tau[r] * tau[r])) / (denom * denom) + olia_alpha(w.len(), &big, &collected, r) / w[r]
}

pub fn balia_alpha(w: &[f64], tau: &[f64], r: usize) -> f64 {
    let x: Vec<f64> = (0..w.len()).map(|i| w[i] / tau[i]).collect();
    let xmax = x.iter().cloned().fold(f64::MIN, f64::max);
    xmax / x[r]
}

pub fn balia_increment(w: &[f64], tau: &[f64], r: usize) -> f64 {
    let x: Vec<f64> = (0..w.len()).map(|i| w[i] / tau[i]).collect();
    let sum: f64 = x.iter().sum();
    let a = balia_alpha(w, tau, r);
    (x[r] / tau[r]) / (sum * sum) * ((1.0 + a) / 2.0) * ((4.0 + a) / 5.0)
}

pub fn balia_decrement(w: f64, alpha: f64) -> f64 {
    let m = if alpha < 1.5 { alpha } else { 1.5 };
    w / 2.0 * m
}

pub fn wvegas_delta(w: f64, base_rtt: f64, avg_rtt: f64) -> f64 {
    (w / base_rtt - w / avg_rtt) * base_rtt
}

pub fn wvegas_weights(w: &[f64], avg_rtt: &[f64]) -> Vec<f64> {
    let x: Vec<f64> = (0..w.len()).map(|i| w[i] / avg_rtt[i]).collect();
    let sum: f64 = x.iter().sum();
    x.iter().map(|v| v / sum).collect()
}

pub fn wvegas_backoff(w: f64, base_rtt: f64, avg_rtt: f64) -> f64 {
    w * base_rtt / (2.0 * avg_rtt)
}
