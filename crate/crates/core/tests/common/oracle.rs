//! Exhaustive-powerset reference for Dempster's rule. Works on dense
//! `2^n` mass vectors indexed by subset bitmask and shares no code with the
//! library's sparse implementation.

#![allow(dead_code)]

use rand::Rng;

/// Dense mass vector; index 0 is the empty set.
pub type Dense = Vec<f64>;

/// Returns the normalized combination and the conflict K, or `None` when
/// K is 1.
pub fn combine_dense(a: &Dense, b: &Dense) -> Option<(Dense, f64)> {
    assert_eq!(a.len(), b.len());
    let size = a.len();
    let mut out = vec![0.0; size];
    for x in 0..size {
        for y in 0..size {
            out[x & y] += a[x] * b[y];
        }
    }
    let k = out[0];
    if k >= 1.0 - 1e-12 {
        return None;
    }
    out[0] = 0.0;
    for v in out.iter_mut().skip(1) {
        *v /= 1.0 - k;
    }
    Some((out, k))
}

pub fn belief_dense(m: &Dense, a: usize) -> f64 {
    (1..m.len()).filter(|&b| b & !a == 0).map(|b| m[b]).sum()
}

pub fn plausibility_dense(m: &Dense, a: usize) -> f64 {
    (1..m.len()).filter(|&b| b & a != 0).map(|b| m[b]).sum()
}

/// Random mass function on a frame of `n` labels with up to `focal_max`
/// focal sets.
pub fn random_dense<R: Rng>(rng: &mut R, n: usize, focal_max: usize) -> Dense {
    let size = 1usize << n;
    let mut m = vec![0.0; size];
    let count = rng.gen_range(1..=focal_max.min(size - 1));
    for _ in 0..count {
        let set = rng.gen_range(1..size);
        m[set] += rng.gen_range(0.05..1.0);
    }
    let total: f64 = m.iter().sum();
    for v in &mut m {
        *v /= total;
    }
    m
}
