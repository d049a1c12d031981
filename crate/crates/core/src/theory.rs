//! Closed-form connectivity quantities for `H(n; mu, K)`.
//!
//! Everything here is a pure function of [`ModelParams`]. Finite-`n` exact
//! expressions (edge probability, moments of the isolated-pair count `Y`,
//! isolation probability of a fixed node set, the union bound over isolated
//! sets) sit next to the asymptotic bounds:
//!
//! * upper bound `1 - C(mu, K)`, `C = 1 / (1 + (2 / mu_1^2) e^(2 K_avg))`,
//!   valid up to a vanishing term when `K_r` stays bounded;
//! * lower bound `1 - (mu~^2 / (1 - mu~)) Psi(n, mu, K)` where
//!   `mu~ = sum_{i<r} mu_i`, valid once `K_r >= ceil(4 * 0.5^(K_r-1) / mu~ + 1)`.
//!
//! `K*(mu~)` is evaluated in the `n -> inf` limit where only the first term of
//! `Psi` survives; that is the reading under which the published table of
//! `K*` values is reproduced.

use serde::Serialize;
use thiserror::Error;

use crate::model::ModelParams;
use crate::numeric::{binom_ratio, ln_choose, ln_mixture_ratio, ln_sum_exp};

/// Terms of the union bound below `e^FLOOR` are dropped.
pub const LN_TERM_FLOOR: f64 = -745.0;

/// Upper limit of the `K*` search.
pub const K_STAR_SEARCH_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("the lower bound needs at least two classes (mu~ = 0 for a single class)")]
    SingleClass,
    #[error("set size {ell} outside 2..={max} for n = {n}")]
    SetSizeOutOfRange { ell: u64, n: u64, max: u64 },
    #[error("n = {n} too small; this quantity needs n >= {min}")]
    TooFewNodes { n: u64, min: u64 },
    #[error("mu~ = {0} must lie strictly between 0 and 1")]
    MuTildeOutOfRange(f64),
    #[error("no K <= {K_STAR_SEARCH_LIMIT} satisfies the K* conditions for mu~ = {0}")]
    KStarNotFound(f64),
}

/// `P[u ~ v] = 1 - (1 - K_avg / (n - 1))^2`.
pub fn edge_probability(params: &ModelParams) -> f64 {
    let miss = 1.0 - params.k_avg() / (params.n() - 1) as f64;
    (1.0 - miss * miss).clamp(0.0, 1.0)
}

/// `C(mu, K) = 1 / (1 + (2 / mu_1^2) e^(2 K_avg))`.
pub fn c_value(params: &ModelParams) -> f64 {
    let mu1 = params.dist().mu_first();
    let exponent = std::f64::consts::LN_2 - 2.0 * mu1.ln() + 2.0 * params.k_avg();
    1.0 / (1.0 + exponent.exp())
}

/// `1 - C(mu, K)`, the asymptotic upper bound on the connectivity probability
/// with the vanishing term dropped.
pub fn zero_law_upper_bound(params: &ModelParams) -> f64 {
    1.0 - c_value(params)
}

/// `mu~` for a model with at least two classes.
pub fn mu_tilde(params: &ModelParams) -> Result<f64, TheoryError> {
    if params.num_classes() < 2 {
        return Err(TheoryError::SingleClass);
    }
    Ok(params.dist().mu_tilde())
}

/// The two exponentials whose maximum is `Psi`.
pub fn psi_terms(params: &ModelParams) -> Result<[f64; 2], TheoryError> {
    let mt = mu_tilde(params)?;
    let k_r = params.scaling().k_max();
    let n = params.n() as f64;
    let tail = 0.5f64.powf((k_r - 1) as f64) / mt;
    let first = (-2.0 * (1.0 - mt) * ((k_r - 1) as f64 / 4.0 - tail)).exp();
    let second = (-(1.0 - mt) * (n / 2.0) * (1.0 - (-1f64).exp() - tail)).exp();
    Ok([first, second])
}

pub fn psi(params: &ModelParams) -> Result<f64, TheoryError> {
    let [a, b] = psi_terms(params)?;
    Ok(a.max(b))
}

/// Whether `K_r >= ceil(4 * 0.5^(K_r - 1) / mu~ + 1)`.
pub fn one_law_condition(mu_tilde: f64, k_r: u64) -> bool {
    let needed = (4.0 * 0.5f64.powf(k_r as f64 - 1.0) / mu_tilde + 1.0).ceil();
    k_r as f64 >= needed
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneLawBound {
    /// `max(0, raw)`.
    pub value: f64,
    /// `1 - (mu~^2 / (1 - mu~)) Psi`, possibly negative.
    pub raw: f64,
    /// The `K_r` condition under which the bound is established.
    pub valid: bool,
    /// `raw > 0`.
    pub nontrivial: bool,
}

pub fn one_law_lower_bound(params: &ModelParams) -> Result<OneLawBound, TheoryError> {
    let mt = mu_tilde(params)?;
    let raw = 1.0 - mt * mt / (1.0 - mt) * psi(params)?;
    Ok(OneLawBound {
        value: raw.max(0.0),
        raw,
        valid: one_law_condition(mt, params.scaling().k_max()),
        nontrivial: raw > 0.0,
    })
}

/// Smallest `K >= 2` for which, as `n -> inf`, the lower bound is
/// established and non-trivial.
pub fn k_star(mu_tilde: f64) -> Result<u64, TheoryError> {
    if !(mu_tilde > 0.0 && mu_tilde < 1.0) {
        return Err(TheoryError::MuTildeOutOfRange(mu_tilde));
    }
    let factor = mu_tilde * mu_tilde / (1.0 - mu_tilde);
    (2..=K_STAR_SEARCH_LIMIT)
        .find(|&k| {
            let tail = 0.5f64.powf((k - 1) as f64) / mu_tilde;
            let second_term_vanishes = 1.0 - (-1f64).exp() - tail > 0.0;
            let first = (-2.0 * (1.0 - mu_tilde) * ((k - 1) as f64 / 4.0 - tail)).exp();
            one_law_condition(mu_tilde, k) && second_term_vanishes && factor * first < 1.0
        })
        .ok_or(TheoryError::KStarNotFound(mu_tilde))
}

/// Exact moments of the isolated-pair count `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMoments {
    /// `P[U_12]`.
    pub pair_prob: f64,
    /// `P[U_12 and U_34]`.
    pub double_pair_prob: f64,
    pub mean: f64,
    pub second_moment: f64,
}

/// `ln P[U_12]`; `-inf` when class-1 nodes make more than one selection.
fn ln_pair_prob(params: &ModelParams) -> f64 {
    let n = params.n();
    if params.k()[0] != 1 {
        return f64::NEG_INFINITY;
    }
    let mu1 = params.dist().mu_first();
    let others: f64 = params
        .mu()
        .iter()
        .zip(params.k())
        .map(|(&m, &k)| m * binom_ratio(n - 3, n - 1, k))
        .sum();
    2.0 * mu1.ln() - 2.0 * ((n - 1) as f64).ln() + (n - 2) as f64 * others.ln()
}

fn ln_double_pair_prob(params: &ModelParams) -> f64 {
    let n = params.n();
    if params.k()[0] != 1 {
        return f64::NEG_INFINITY;
    }
    let mu1 = params.dist().mu_first();
    let rest = if n == 4 {
        0.0
    } else {
        let others: f64 = params
            .mu()
            .iter()
            .zip(params.k())
            .map(|(&m, &k)| m * binom_ratio(n - 5, n - 1, k))
            .sum();
        (n - 4) as f64 * others.ln()
    };
    4.0 * mu1.ln() - 4.0 * ((n - 1) as f64).ln() + rest
}

fn require_nodes(params: &ModelParams, min: u64) -> Result<(), TheoryError> {
    if params.n() < min {
        return Err(TheoryError::TooFewNodes { n: params.n(), min });
    }
    Ok(())
}

/// `(ln E[Y], ln E[Y^2])`.
fn ln_pair_moments(params: &ModelParams) -> (f64, f64) {
    let n = params.n();
    let ln_pairs = ln_choose(n, 2);
    let ln_mean = ln_pairs + ln_pair_prob(params);
    let ln_disjoint = ln_pairs + ln_choose(n - 2, 2) + ln_double_pair_prob(params);
    (ln_mean, ln_sum_exp([ln_mean, ln_disjoint]))
}

/// `E[Y] = C(n,2) mu_1^2 (n-1)^-2 (sum_i mu_i C(n-3,K_i)/C(n-1,K_i))^(n-2)`.
pub fn expected_isolated_pairs(params: &ModelParams) -> Result<f64, TheoryError> {
    require_nodes(params, 4)?;
    Ok(ln_pair_moments(params).0.exp())
}

pub fn pair_moments(params: &ModelParams) -> Result<PairMoments, TheoryError> {
    require_nodes(params, 4)?;
    let (ln_mean, ln_second) = ln_pair_moments(params);
    Ok(PairMoments {
        pair_prob: ln_pair_prob(params).exp(),
        double_pair_prob: ln_double_pair_prob(params).exp(),
        mean: ln_mean.exp(),
        second_moment: ln_second.exp(),
    })
}

/// `1 - E[Y]^2 / E[Y^2]`, an exact upper bound on `P[Y = 0]` and hence on
/// the connectivity probability (for `n > 4`).
pub fn second_moment_upper_bound(params: &ModelParams) -> Result<f64, TheoryError> {
    require_nodes(params, 4)?;
    let (ln_mean, ln_second) = ln_pair_moments(params);
    if ln_mean == f64::NEG_INFINITY {
        return Ok(1.0);
    }
    let ratio = (2.0 * ln_mean - ln_second).exp();
    Ok((1.0 - ratio).clamp(0.0, 1.0))
}

/// `ln P[B_{n,l}]`, the log-probability that a fixed `l`-set is isolated.
pub fn ln_isolation_probability(params: &ModelParams, ell: u64) -> Result<f64, TheoryError> {
    let n = params.n();
    let max = n / 2;
    if ell < 2 || ell > max {
        return Err(TheoryError::SetSizeOutOfRange { ell, n, max });
    }
    let (mu, ks) = (params.mu(), params.k());
    let inside = ln_mixture_ratio(mu, ks, ell - 1, n - 1);
    if inside == f64::NEG_INFINITY {
        return Ok(inside);
    }
    let outside = ln_mixture_ratio(mu, ks, n - ell - 1, n - 1);
    Ok(ell as f64 * inside + (n - ell) as f64 * outside)
}

/// `P[B_{n,l}] = (sum_i mu_i C(l-1,K_i)/C(n-1,K_i))^l
///              (sum_i mu_i C(n-l-1,K_i)/C(n-1,K_i))^(n-l)`.
pub fn isolation_probability(params: &ModelParams, ell: u64) -> Result<f64, TheoryError> {
    Ok(ln_isolation_probability(params, ell)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnionBound {
    /// `sum_{l=2}^{floor(n/2)} C(n,l) P[B_{n,l}]`; may exceed 1.
    pub raw: f64,
    pub clamped: f64,
}

/// Union bound on the probability that the graph is disconnected.
pub fn union_bound_disconnect(params: &ModelParams) -> UnionBound {
    let n = params.n();
    let raw: f64 = (2..=n / 2)
        .map(|ell| {
            let ln_p = ln_isolation_probability(params, ell).expect("ell in range");
            ln_choose(n, ell) + ln_p
        })
        .filter(|&x| x >= LN_TERM_FLOOR)
        .map(f64::exp)
        .sum();
    UnionBound {
        raw,
        clamped: raw.min(1.0),
    }
}

/// `A_{n,l}`, the per-set-size factor that `Psi` dominates once the `K_r`
/// condition holds. Diagnostic only.
pub fn isolation_exponent_factor(n: u64, mu_tilde: f64, k_r: u64, ell: u64) -> f64 {
    let (nf, lf, km1) = (n as f64, ell as f64, (k_r - 1) as f64);
    let gain = (1.0 - mu_tilde) / mu_tilde * lf * (lf / nf).powf(km1);
    let loss = (1.0 - mu_tilde) * (nf - lf) * -(-lf * km1 / nf).exp_m1();
    (gain - loss).exp()
}

/// All closed-form quantities for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: u64,
    pub mu: Vec<f64>,
    pub k: Vec<u64>,
    pub k_avg: f64,
    pub edge_prob: f64,
    pub upper_bound_asymptotic: f64,
    pub c_value: f64,
    /// `None` for a single class.
    pub mu_tilde: Option<f64>,
    pub psi_value: Option<f64>,
    pub lower_bound_one_law: Option<f64>,
    pub lower_bound_valid: Option<bool>,
    pub lower_bound_nontrivial: Option<bool>,
    /// `None` for `n < 4`.
    pub expected_isolated_pairs: Option<f64>,
    pub second_moment_upper_bound: Option<f64>,
    pub union_bound_disconnect: f64,
    pub union_bound_disconnect_clamped: f64,
}

pub fn bound_report(params: &ModelParams) -> BoundReport {
    let one_law = one_law_lower_bound(params).ok();
    let union = union_bound_disconnect(params);
    BoundReport {
        n: params.n(),
        mu: params.mu().to_vec(),
        k: params.k().to_vec(),
        k_avg: params.k_avg(),
        edge_prob: edge_probability(params),
        upper_bound_asymptotic: zero_law_upper_bound(params),
        c_value: c_value(params),
        mu_tilde: mu_tilde(params).ok(),
        psi_value: psi(params).ok(),
        lower_bound_one_law: one_law.map(|b| b.value),
        lower_bound_valid: one_law.map(|b| b.valid),
        lower_bound_nontrivial: one_law.map(|b| b.nontrivial),
        expected_isolated_pairs: expected_isolated_pairs(params).ok(),
        second_moment_upper_bound: second_moment_upper_bound(params).ok(),
        union_bound_disconnect: union.raw,
        union_bound_disconnect_clamped: union.clamped,
    }
}
