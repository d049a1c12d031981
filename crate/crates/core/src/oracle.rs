//! Exact connectivity probabilities for tiny instances by total enumeration.
//!
//! Every class assignment (`r^n` of them) is visited; for each, every tuple of
//! selection sets is enumerated with a mixed-radix counter and the induced
//! graph is checked with bitmask reachability. Counts are exact integers. The
//! assignment weights `prod_v mu_{t_v}` are exact rationals when every `mu_i`
//! is a decimal-like rational with denominator at most `10^6` and the
//! rationals sum to exactly one; otherwise they are `f64` with compensated
//! summation.
//!
//! This module shares no code with the sampler or the component census.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::ModelParams;

/// Upper limit on enumerated (assignment, selection tuple) states.
pub const MAX_STATES: u128 = 100_000_000;
/// Largest node count representable in the bitmask graphs.
pub const MAX_NODES: u64 = 20;
const MAX_DENOMINATOR: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance needs {states} enumerated states, limit is {MAX_STATES}")]
    TooLarge { states: u128 },
    #[error("n = {n} exceeds the enumeration limit of {MAX_NODES} nodes")]
    TooManyNodes { n: u64 },
}

/// An exact rational, or a compensated `f64` when `mu` is not rational enough.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactValue {
    Rational(BigRational),
    Float(f64),
}

impl ExactValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Self::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Self::Rational(r) => Some(r),
            Self::Float(_) => None,
        }
    }

    /// True if this is the rational `num / den`.
    pub fn is_ratio(&self, num: i64, den: i64) -> bool {
        self.as_rational()
            .is_some_and(|r| *r == BigRational::new(num.into(), den.into()))
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Self::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ExactValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExactValue", 2)?;
        match self {
            Self::Rational(_) => st.serialize_field("exact", &self.to_string())?,
            Self::Float(_) => st.serialize_field("exact", &Option::<String>::None)?,
        }
        st.serialize_field("value", &self.to_f64())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub p_connected: ExactValue,
    pub e_y: ExactValue,
    pub p_y_zero: ExactValue,
    /// Enumerated (class assignment, selection tuple) pairs.
    pub state_count: u64,
}

/// `(sum_i C(n-1, K_i))^n`, the total number of states visited.
pub fn state_count(params: &ModelParams) -> u128 {
    let per_node: u128 = params
        .k()
        .iter()
        .map(|&k| choose_u128(params.n() - 1, k))
        .fold(0u128, |a, b| a.saturating_add(b));
    (0..params.n()).fold(1u128, |acc, _| acc.saturating_mul(per_node))
}

fn choose_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

/// Integer tallies for one class assignment.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    tuples: u64,
    connected: u64,
    y_zero: u64,
    y_sum: u64,
}

/// All `k`-subsets of `{0..n} \ {v}` as bitmasks.
fn subset_masks(n: usize, v: usize, k: usize) -> Vec<u64> {
    let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(k);
    fn rec(others: &[usize], start: usize, k: usize, pick: &mut Vec<usize>, out: &mut Vec<u64>) {
        if pick.len() == k {
            out.push(pick.iter().fold(0u64, |m, &u| m | (1 << u)));
            return;
        }
        for i in start..others.len() {
            pick.push(others[i]);
            rec(others, i + 1, k, pick, out);
            pick.pop();
        }
    }
    rec(&others, 0, k, &mut pick, &mut out);
    out
}

fn tally_assignment(n: usize, classes: &[usize], ks: &[u64]) -> Tally {
    let options: Vec<Vec<u64>> = (0..n)
        .map(|v| subset_masks(n, v, ks[classes[v]] as usize))
        .collect();
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let mut digits = vec![0usize; n];
    let mut sel = vec![0u64; n];
    let mut tally = Tally::default();
    loop {
        for v in 0..n {
            sel[v] = options[v][digits[v]];
        }

        // Undirected adjacency.
        let mut adj = sel.clone();
        for (u, &row) in sel.iter().enumerate() {
            let mut m = row;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                adj[v] |= 1 << u;
                m &= m - 1;
            }
        }
        let mut reach = 1u64;
        loop {
            let mut next = reach;
            let mut m = reach;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                next |= adj[v];
                m &= m - 1;
            }
            if next == reach {
                break;
            }
            reach = next;
        }

        // Isolated class-1 pairs straight from the event definition.
        let mut y = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                let pair = (1u64 << i) | (1u64 << j);
                let isolated = classes[i] == 0
                    && classes[j] == 0
                    && sel[i] == 1 << j
                    && sel[j] == 1 << i
                    && (0..n).all(|l| l == i || l == j || sel[l] & pair == 0);
                y += isolated as u64;
            }
        }

        tally.tuples += 1;
        tally.connected += (reach == full) as u64;
        tally.y_zero += (y == 0) as u64;
        tally.y_sum += y;

        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == n {
                return tally;
            }
            digits[pos] += 1;
            if digits[pos] < options[pos].len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// `mu` as exact rationals if each entry is `p/q` with `q <= 10^6` and they
/// sum to exactly one.
fn rational_mu(mu: &[f64]) -> Option<Vec<BigRational>> {
    let mut out = Vec::with_capacity(mu.len());
    for &m in mu {
        let r = Ratio::<i64>::approximate_float(m)?;
        if *r.denom() > MAX_DENOMINATOR || (r.to_f64()? - m).abs() > 1e-12 {
            return None;
        }
        out.push(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())));
    }
    let sum: BigRational = out.iter().cloned().sum();
    sum.is_one().then_some(out)
}

/// Neumaier compensated sum.
fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exact `P[connected]`, `E[Y]` and `P[Y = 0]` by total enumeration.
pub fn exact_connectivity(params: &ModelParams) -> Result<ExactResult, OracleError> {
    if params.n() > MAX_NODES {
        return Err(OracleError::TooManyNodes { n: params.n() });
    }
    let states = state_count(params);
    if states > MAX_STATES {
        return Err(OracleError::TooLarge { states });
    }
    let n = params.n() as usize;
    let r = params.num_classes();
    let ks = params.k();
    let assignments = (r as u64).pow(n as u32);

    let decode = |mut idx: u64| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let c = (idx % r as u64) as usize;
                idx /= r as u64;
                c
            })
            .collect()
    };
    let tallies: Vec<(Vec<usize>, Tally)> = (0..assignments)
        .into_par_iter()
        .map(|a| {
            let classes = decode(a);
            let t = tally_assignment(n, &classes, ks);
            (classes, t)
        })
        .collect();
    let state_count = tallies.iter().map(|(_, t)| t.tuples).sum();

    let result = match rational_mu(params.mu()) {
        Some(mu) => {
            let (mut pc, mut ey, mut py0) =
                (BigRational::zero(), BigRational::zero(), BigRational::zero());
            for (classes, t) in &tallies {
                let w: BigRational = classes.iter().map(|&c| mu[c].clone()).product();
                let frac = |count: u64| {
                    w.clone() * BigRational::new(BigInt::from(count), BigInt::from(t.tuples))
                };
                pc += frac(t.connected);
                ey += frac(t.y_sum);
                py0 += frac(t.y_zero);
            }
            ExactResult {
                p_connected: ExactValue::Rational(pc),
                e_y: ExactValue::Rational(ey),
                p_y_zero: ExactValue::Rational(py0),
                state_count,
            }
        }
        None => {
            let mu = params.mu();
            let weighted = |pick: fn(&Tally) -> u64| {
                compensated_sum(tallies.iter().map(|(classes, t)| {
                    let w: f64 = classes.iter().map(|&c| mu[c]).product();
                    w * pick(t) as f64 / t.tuples as f64
                }))
            };
            ExactResult {
                p_connected: ExactValue::Float(weighted(|t| t.connected)),
                e_y: ExactValue::Float(weighted(|t| t.y_sum)),
                p_y_zero: ExactValue::Float(weighted(|t| t.y_zero)),
                state_count,
            }
        }
    };
    Ok(result)
}
