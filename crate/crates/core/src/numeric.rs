//! Binomial ratios and log-space helpers.
//!
//! Ratios of binomials with a shared lower index are evaluated as telescoping
//! products, `C(a,k)/C(b,k) = prod_{j<k} (a-j)/(b-j)`, which cancel exactly
//! instead of subtracting two large log-gamma values. `C(a,k)` is zero when
//! `a < k`.

use statrs::function::gamma::ln_gamma;

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// `C(a, k) / C(b, k)` for `a <= b`, as a direct product.
pub fn binom_ratio(a: u64, b: u64, k: u64) -> f64 {
    debug_assert!(a <= b);
    if k > a {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, j| acc * ((a - j) as f64 / (b - j) as f64))
}

/// `ln(C(a, k) / C(b, k))` for `a <= b`; `-inf` when `k > a`.
pub fn ln_binom_ratio(a: u64, b: u64, k: u64) -> f64 {
    debug_assert!(a <= b);
    if k > a {
        return f64::NEG_INFINITY;
    }
    let gap = (b - a) as f64;
    if gap == 0.0 {
        return 0.0;
    }
    (0..k).map(|j| (-gap / (b - j) as f64).ln_1p()).sum()
}

/// `ln(sum_i exp(x_i))`, `-inf` for an empty or all `-inf` input.
pub fn ln_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln(sum_i mu_i * C(a, K_i) / C(b, K_i))`.
pub fn ln_mixture_ratio(mu: &[f64], ks: &[u64], a: u64, b: u64) -> f64 {
    ln_sum_exp(
        mu.iter()
            .zip(ks)
            .map(|(&m, &k)| m.ln() + ln_binom_ratio(a, b, k)),
    )
}
