//! Model parameters for the inhomogeneous random K-out graph `H(n; mu, K)`.
//!
//! Nodes are assigned one of `r` classes independently according to a
//! [`ClassDistribution`]; a class-`i` node selects `K_i` distinct other nodes
//! uniformly at random. The selection counts live in a [`KScaling`].
//!
//! Class indices are 0-based in the API. Anything printed for a human uses
//! 1-based class numbers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on `sum(mu) == 1`.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("class distribution is empty")]
    EmptyDistribution,
    #[error("class {class} has probability {value}; every class probability must lie in (0, 1]")]
    NonPositiveProbability { class: usize, value: f64 },
    #[error("class probabilities sum to {sum}, expected 1 within {PROB_SUM_TOLERANCE:e}")]
    ProbabilitySum { sum: f64 },
    #[error("class {class} selects zero nodes; every K_i must be positive")]
    ZeroSelection { class: usize },
    #[error("selection counts must be nondecreasing, but K_{} = {} > K_{} = {}", .class, .prev, .class + 1, .next)]
    NonMonotoneK { class: usize, prev: u64, next: u64 },
    #[error("largest selection count K_r = {k_max} must be smaller than n = {n}")]
    KTooLarge { k_max: u64, n: u64 },
    #[error("mu has {mu_len} entries but k has {k_len}")]
    LengthMismatch { mu_len: usize, k_len: usize },
    #[error("n = {n} is too small; need at least 2 nodes")]
    TooFewNodes { n: u64 },
}

/// Class probabilities `mu_1, ..., mu_r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ClassDistribution(Vec<f64>);

impl ClassDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, ModelError> {
        if probs.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        for (class, &value) in probs.iter().enumerate() {
            if value.is_nan() || value <= 0.0 || value > 1.0 {
                return Err(ModelError::NonPositiveProbability {
                    class: class + 1,
                    value,
                });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(ModelError::ProbabilitySum { sum });
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    /// Number of classes `r`.
    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    /// Probability of the first (sparsest) class.
    pub fn mu_first(&self) -> f64 {
        self.0[0]
    }

    /// Total probability of all classes but the last, `sum_{i<r} mu_i`.
    /// Zero for a single-class distribution.
    pub fn mu_tilde(&self) -> f64 {
        self.0[..self.0.len() - 1].iter().sum()
    }
}

impl<'de> Deserialize<'de> for ClassDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        Self::new(probs).map_err(serde::de::Error::custom)
    }
}

/// Per-class selection counts `K_1 <= K_2 <= ... <= K_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct KScaling(Vec<u64>);

impl KScaling {
    pub fn new(ks: Vec<u64>) -> Result<Self, ModelError> {
        if ks.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        if let Some(class) = ks.iter().position(|&k| k == 0) {
            return Err(ModelError::ZeroSelection { class: class + 1 });
        }
        for (i, pair) in ks.windows(2).enumerate() {
            if pair[0] > pair[1] {
                return Err(ModelError::NonMonotoneK {
                    class: i + 1,
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }
        Ok(Self(ks))
    }

    pub fn ks(&self) -> &[u64] {
        &self.0
    }

    pub fn k_min(&self) -> u64 {
        self.0[0]
    }

    pub fn k_max(&self) -> u64 {
        self.0[self.0.len() - 1]
    }
}

impl<'de> Deserialize<'de> for KScaling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ks = Vec::<u64>::deserialize(d)?;
        Self::new(ks).map_err(serde::de::Error::custom)
    }
}

/// Full parameterization `(n, mu, K)` of one graph model.
///
/// Construct through [`ModelParams::new`] or [`validate`]; every value of
/// this type satisfies the model invariants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    n: u64,
    #[serde(rename = "mu")]
    dist: ClassDistribution,
    #[serde(rename = "k")]
    scaling: KScaling,
}

/// Unvalidated parameter document, `{"n": .., "mu": [..], "k": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub n: u64,
    pub mu: Vec<f64>,
    pub k: Vec<u64>,
}

impl ModelParams {
    pub fn new(n: u64, mu: Vec<f64>, k: Vec<u64>) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::TooFewNodes { n });
        }
        if mu.len() != k.len() {
            return Err(ModelError::LengthMismatch {
                mu_len: mu.len(),
                k_len: k.len(),
            });
        }
        let dist = ClassDistribution::new(mu)?;
        let scaling = KScaling::new(k)?;
        Self::from_parts(n, dist, scaling)
    }

    pub fn from_parts(
        n: u64,
        dist: ClassDistribution,
        scaling: KScaling,
    ) -> Result<Self, ModelError> {
        if n < 2 {
            return Err(ModelError::TooFewNodes { n });
        }
        if dist.num_classes() != scaling.ks().len() {
            return Err(ModelError::LengthMismatch {
                mu_len: dist.num_classes(),
                k_len: scaling.ks().len(),
            });
        }
        if scaling.k_max() >= n {
            return Err(ModelError::KTooLarge {
                k_max: scaling.k_max(),
                n,
            });
        }
        Ok(Self { n, dist, scaling })
    }

    /// Single-class (homogeneous) model `H(n; K)`.
    pub fn homogeneous(n: u64, k: u64) -> Result<Self, ModelError> {
        Self::new(n, vec![1.0], vec![k])
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dist(&self) -> &ClassDistribution {
        &self.dist
    }

    pub fn scaling(&self) -> &KScaling {
        &self.scaling
    }

    pub fn mu(&self) -> &[f64] {
        self.dist.probs()
    }

    pub fn k(&self) -> &[u64] {
        self.scaling.ks()
    }

    pub fn num_classes(&self) -> usize {
        self.dist.num_classes()
    }

    /// Expected number of selections per node, `sum_i mu_i K_i`.
    pub fn k_avg(&self) -> f64 {
        k_avg(self)
    }

    /// Copy with a different node count.
    pub fn with_n(&self, n: u64) -> Result<Self, ModelError> {
        Self::from_parts(n, self.dist.clone(), self.scaling.clone())
    }

    /// Copy with the last class's selection count replaced.
    pub fn with_k_max(&self, k_r: u64) -> Result<Self, ModelError> {
        let mut ks = self.scaling.ks().to_vec();
        *ks.last_mut().expect("non-empty") = k_r;
        Self::from_parts(self.n, self.dist.clone(), KScaling::new(ks)?)
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            n: self.n,
            mu: self.mu().to_vec(),
            k: self.k().to_vec(),
        }
    }
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ModelError;

    fn try_from(raw: RawParams) -> Result<Self, ModelError> {
        Self::new(raw.n, raw.mu, raw.k)
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawParams::deserialize(d)?;
        Self::try_from(raw).map_err(serde::de::Error::custom)
    }
}

/// Re-checks every invariant and hands the parameters back unchanged.
pub fn validate(params: ModelParams) -> Result<ModelParams, ModelError> {
    let checked = ModelParams::new(params.n, params.mu().to_vec(), params.k().to_vec())?;
    debug_assert_eq!(checked, params);
    Ok(params)
}

/// `K_avg = sum_i mu_i K_i`.
pub fn k_avg(params: &ModelParams) -> f64 {
    params
        .mu()
        .iter()
        .zip(params.k())
        .map(|(&m, &k)| m * k as f64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_class_reference_parameters_are_valid() {
        let p = ModelParams::new(1000, vec![0.9, 0.06, 0.04], vec![1, 2, 3]).unwrap();
        assert_eq!(validate(p.clone()).unwrap(), p);
    }

    #[test]
    fn minimal_homogeneous_instance() {
        assert!(ModelParams::new(2, vec![1.0], vec![1]).is_ok());
    }

    #[test]
    fn rejects_each_invariant_violation() {
        assert!(matches!(
            ModelParams::new(5, vec![0.5, 0.5], vec![3, 2]),
            Err(ModelError::NonMonotoneK { class: 1, prev: 3, next: 2 })
        ));
        assert!(matches!(
            ModelParams::new(5, vec![0.0, 1.0], vec![1, 2]),
            Err(ModelError::NonPositiveProbability { class: 1, .. })
        ));
        assert!(matches!(
            ModelParams::new(5, vec![-0.1, 1.1], vec![1, 2]),
            Err(ModelError::NonPositiveProbability { .. })
        ));
        assert!(matches!(
            ModelParams::new(5, vec![0.5, 0.4], vec![1, 2]),
            Err(ModelError::ProbabilitySum { .. })
        ));
        assert!(matches!(
            ModelParams::new(5, vec![0.5, 0.5], vec![1, 5]),
            Err(ModelError::KTooLarge { k_max: 5, n: 5 })
        ));
        assert!(matches!(
            ModelParams::new(5, vec![0.5, 0.5], vec![1]),
            Err(ModelError::LengthMismatch { .. })
        ));
        assert!(matches!(
            ModelParams::new(1, vec![1.0], vec![1]),
            Err(ModelError::TooFewNodes { n: 1 })
        ));
        assert!(matches!(
            ModelParams::new(5, vec![1.0], vec![0]),
            Err(ModelError::ZeroSelection { class: 1 })
        ));
        assert!(matches!(
            ModelParams::new(5, vec![f64::NAN, 1.0], vec![1, 1]),
            Err(ModelError::NonPositiveProbability { .. })
        ));
    }

    #[test]
    fn sum_tolerance_accepts_decimal_rounding() {
        assert!(ModelParams::new(10, vec![0.1; 10], vec![1; 10]).is_ok());
        assert!(ModelParams::new(10, vec![0.7, 0.2, 0.1], vec![1, 1, 1]).is_ok());
        assert!(ModelParams::new(10, vec![0.5, 0.5 + 1e-9], vec![1, 1]).is_err());
    }

    #[test]
    fn k_avg_examples() {
        let p = ModelParams::new(1000, vec![0.9, 0.06, 0.04], vec![1, 2, 3]).unwrap();
        assert!((p.k_avg() - 1.14).abs() < 1e-12);
        assert!((p.k_avg() - (0.9 + 0.12 + 0.12)).abs() < 1e-12);
        assert_eq!(ModelParams::homogeneous(10, 5).unwrap().k_avg(), 5.0);
        let p = ModelParams::new(10, vec![0.5, 0.5], vec![2, 2]).unwrap();
        assert_eq!(p.k_avg(), 2.0);
    }

    #[test]
    fn json_field_names() {
        let p: ModelParams =
            serde_json::from_str(r#"{"n": 1000, "mu": [0.9, 0.06, 0.04], "k": [1, 2, 3]}"#)
                .unwrap();
        assert_eq!(p.n(), 1000);
        assert_eq!(p.k(), &[1, 2, 3]);
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(back, r#"{"n":1000,"mu":[0.9,0.06,0.04],"k":[1,2,3]}"#);
        let bad = serde_json::from_str::<ModelParams>(r#"{"n": 5, "mu": [0.5, 0.5], "k": [3, 2]}"#);
        assert!(bad.unwrap_err().to_string().contains("nondecreasing"));
    }

    #[test]
    fn mu_tilde_is_all_but_last() {
        let p = ModelParams::new(10, vec![0.9, 0.06, 0.04], vec![1, 2, 3]).unwrap();
        assert!((p.dist().mu_tilde() - 0.96).abs() < 1e-12);
        assert_eq!(ModelParams::homogeneous(3, 1).unwrap().dist().mu_tilde(), 0.0);
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (1usize..5, 2u64..200)
            .prop_flat_map(|(r, n)| {
                (
                    Just(n),
                    prop::collection::vec(0.01f64..1.0, r),
                    prop::collection::vec(1u64..n, r),
                )
            })
            .prop_map(|(n, w, mut k)| {
                let total: f64 = w.iter().sum();
                let mut mu: Vec<f64> = w.iter().map(|x| x / total).collect();
                let head: f64 = mu[..mu.len() - 1].iter().sum();
                *mu.last_mut().unwrap() = 1.0 - head;
                k.sort_unstable();
                ModelParams::new(n, mu, k).unwrap()
            })
    }

    proptest! {
        #[test]
        fn k_avg_lies_between_extremes(p in arb_params()) {
            let ka = p.k_avg();
            prop_assert!(ka >= p.scaling().k_min() as f64 - 1e-9);
            prop_assert!(ka <= p.scaling().k_max() as f64 + 1e-9);
        }

        #[test]
        fn k_avg_monotone_in_k_max(p in arb_params()) {
            if p.scaling().k_max() + 1 < p.n() {
                let bigger = p.with_k_max(p.scaling().k_max() + 1).unwrap();
                prop_assert!(bigger.k_avg() >= p.k_avg());
            }
        }

        #[test]
        fn validate_is_idempotent(p in arb_params()) {
            let once = validate(p.clone()).unwrap();
            prop_assert_eq!(validate(once.clone()).unwrap(), once);
        }
    }
}
