//! Elementary inequalities used by the connectivity bounds, evaluated
//! numerically so they can be property tested.
//!
//! Each check computes both sides in `f64` and compares them with a relative
//! slack of [`SLACK`], since several of them hold with equality at the edge of
//! their domain.

use thiserror::Error;

use crate::numeric::{binom_ratio, ln_choose};

pub const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("argument outside the inequality's domain: {0}")]
pub struct DomainError(pub String);

/// Both sides of `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
}

impl Comparison {
    pub fn holds(&self) -> bool {
        let scale = 1f64.max(self.lhs.abs()).max(self.rhs.abs());
        self.lhs <= self.rhs + SLACK * scale
    }
}

fn domain(ok: bool, msg: impl FnOnce() -> String) -> Result<(), DomainError> {
    if ok {
        Ok(())
    } else {
        Err(DomainError(msg()))
    }
}

/// `1 - xy <= (1-x)^y <= 1 - xy + x^2 y^2 / 2` for `0 <= x < 1`, integer `y >= 0`.
pub fn power_sandwich(x: f64, y: u64) -> Result<[Comparison; 2], DomainError> {
    domain((0.0..1.0).contains(&x), || format!("x = {x} not in [0, 1)"))?;
    let xy = x * y as f64;
    let mid = (1.0 - x).powf(y as f64);
    Ok([
        Comparison { lhs: 1.0 - xy, rhs: mid },
        Comparison { lhs: mid, rhs: 1.0 - xy + 0.5 * xy * xy },
    ])
}

/// `C(y-z, x) / C(y, x) >= 1 - zx / (y - z)` for `y >= 2x`, `0 <= z <= x`.
pub fn shifted_binom_ratio(y: u64, x: u64, z: u64) -> Result<Comparison, DomainError> {
    domain(x >= 1 && y >= 2 * x, || format!("need 1 <= x and y >= 2x, got x = {x}, y = {y}"))?;
    domain(z <= x, || format!("z = {z} exceeds x = {x}"))?;
    let ratio = binom_ratio(y - z, y, x);
    Ok(Comparison {
        lhs: 1.0 - (z * x) as f64 / (y - z) as f64,
        rhs: ratio,
    })
}

/// `C(n, r) <= (n/r)^r (n/(n-r))^(n-r)` for `1 <= r <= n/2`, compared in logs.
pub fn binom_entropy_bound(n: u64, r: u64) -> Result<Comparison, DomainError> {
    domain(r >= 1 && r <= n / 2, || format!("need 1 <= r <= n/2, got n = {n}, r = {r}"))?;
    let (nf, rf) = (n as f64, r as f64);
    Ok(Comparison {
        lhs: ln_choose(n, r),
        rhs: rf * (nf / rf).ln() + (nf - rf) * (nf / (nf - rf)).ln(),
    })
}

/// `C(x, k) / C(y, k) <= (x / y)^k` for `0 <= k <= x <= y`.
pub fn binom_ratio_power_bound(x: u64, y: u64, k: u64) -> Result<Comparison, DomainError> {
    domain(k <= x && x <= y && y > 0, || format!("need k <= x <= y, got k = {k}, x = {x}, y = {y}"))?;
    Ok(Comparison {
        lhs: binom_ratio(x, y, k),
        rhs: (x as f64 / y as f64).powf(k as f64),
    })
}

/// `1 + x <= e^x` and `1 - x <= e^-x` for `0 <= x <= 1`.
pub fn linear_exp_bound(x: f64) -> Result<[Comparison; 2], DomainError> {
    domain((0.0..=1.0).contains(&x), || format!("x = {x} not in [0, 1]"))?;
    Ok([
        Comparison { lhs: 1.0 + x, rhs: x.exp() },
        Comparison { lhs: 1.0 - x, rhs: (-x).exp() },
    ])
}

/// `x / 2 <= 1 - e^-x` for `0 <= x <= 1`.
pub fn half_linear_exp_bound(x: f64) -> Result<Comparison, DomainError> {
    domain((0.0..=1.0).contains(&x), || format!("x = {x} not in [0, 1]"))?;
    Ok(Comparison {
        lhs: x / 2.0,
        rhs: -(-x).exp_m1(),
    })
}

/// Whether the power sandwich holds at `(x, y)`, the shifted ratio at
/// `(y, x, z)` and the entropy bound at `(n, r)`.
pub fn fact_inequalities(
    sandwich: (f64, u64),
    shifted: (u64, u64, u64),
    entropy: (u64, u64),
) -> Result<[bool; 3], DomainError> {
    let f1 = power_sandwich(sandwich.0, sandwich.1)?;
    let f2 = shifted_binom_ratio(shifted.0, shifted.1, shifted.2)?;
    let f3 = binom_entropy_bound(entropy.0, entropy.1)?;
    Ok([f1.iter().all(Comparison::holds), f2.holds(), f3.holds()])
}
