//! Binomial probability mass evaluation and exact binomial coefficients.
//!
//! The pmf is built by walking the multiplicative recurrence
//! `B(k+1) / B(k) = (n-k)/(k+1) * p/(1-p)` outward from the mode and
//! normalizing at the end. No factorials or powers of `p` are formed, so the
//! evaluation stays finite for `n` in the hundreds of thousands; tail terms
//! that fall below the smallest subnormal simply underflow to zero.

use num_bigint::BigUint;
use num_traits::One;

/// Full pmf vector `[B(0; n, p), ..., B(n; n, p)]`.
///
/// `p` must lie in `[0, 1]`; callers validate it.
pub fn pmf_vec(n: usize, p: f64) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&p));
    let mut out = vec![0.0; n + 1];
    if p <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        out[n] = 1.0;
        return out;
    }

    let odds = p / (1.0 - p);
    let mode = (((n + 1) as f64) * p).floor().min(n as f64) as usize;
    out[mode] = 1.0;
    for k in mode..n {
        out[k + 1] = out[k] * ((n - k) as f64 / (k + 1) as f64) * odds;
    }
    for k in (0..mode).rev() {
        out[k] = out[k + 1] * ((k + 1) as f64 / (n - k) as f64) / odds;
    }

    let total: f64 = out.iter().sum();
    for v in &mut out {
        *v /= total;
    }
    out
}

/// Expectation `sum_k g(k) * B(k; n, p)`.
pub fn expect<F>(n: usize, p: f64, mut g: F) -> f64
where
    F: FnMut(usize) -> f64,
{
    pmf_vec(n, p)
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(k, w)| w * g(k))
        .sum()
}

/// Exact `C(n, k)`; zero when `k > n`.
pub fn choose(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc holds C(n, i) here, so the division is exact.
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
