//! Symmetric priors over valuation profiles and the statistics derived from them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{encode, permutations, permute};

/// Tolerance for probability sums.
pub const SUM_TOL: f64 = 1e-12;

/// An exchangeable distribution over value profiles on a finite value set in `[0, 1]`.
///
/// Profiles are tuples of indices into `values`. Only positive-probability
/// profiles are stored, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPrior {
    n: usize,
    values: Vec<f64>,
    support: Vec<(Vec<usize>, f64)>,
}

/// One row of the JSON prior schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmfEntry {
    pub profile: Vec<usize>,
    pub p: f64,
}

/// JSON prior schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorFile {
    pub n: usize,
    pub values: Vec<f64>,
    pub pmf: Vec<PmfEntry>,
}

impl SymmetricPrior {
    /// Build and validate a prior from a support list.
    ///
    /// Duplicate profiles, out-of-range indices and malformed value sets are
    /// rejected; exchangeability is checked, never imposed.
    pub fn new(n: usize, values: Vec<f64>, pmf: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPrior(format!("need at least 2 bidders, got {n}")));
        }
        if values.is_empty() {
            return Err(Error::InvalidPrior("empty value set".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::InvalidPrior("values must lie in [0, 1]".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPrior("values must be strictly ascending".into()));
        }
        let mut map: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (profile, p) in pmf {
            if profile.len() != n {
                return Err(Error::InvalidPrior(format!(
                    "profile {profile:?} has length {}, expected {n}",
                    profile.len()
                )));
            }
            if profile.iter().any(|&k| k >= values.len()) {
                return Err(Error::InvalidPrior(format!("profile {profile:?} indexes past the value set")));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidPrior(format!("profile {profile:?} has probability {p}")));
            }
            if map.insert(profile.clone(), p).is_some() {
                return Err(Error::InvalidPrior(format!("duplicate profile {profile:?}")));
            }
        }
        let support: Vec<_> = map.into_iter().filter(|(_, p)| *p > 0.0).collect();
        let prior = SymmetricPrior { n, values, support };
        prior.validate()?;
        Ok(prior)
    }

    /// Check normalization, nonempty support and exchangeability.
    pub fn validate(&self) -> Result<()> {
        if self.support.is_empty() {
            return Err(Error::EmptySupport);
        }
        let sum: f64 = self.support.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        // Adjacent transpositions generate the symmetric group.
        for (profile, p) in &self.support {
            for j in 0..self.n - 1 {
                let mut swapped = profile.clone();
                swapped.swap(j, j + 1);
                let q = self.prob(&swapped);
                if (p - q).abs() > SUM_TOL {
                    return Err(Error::NotExchangeable { profile: profile.clone(), permuted: swapped, p: *p, q });
                }
            }
        }
        Ok(())
    }

    /// Parse and validate the JSON schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PriorFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    /// Validate a deserialized prior file.
    pub fn from_file(file: PriorFile) -> Result<Self> {
        let pmf = file.pmf.into_iter().map(|e| (e.profile, e.p)).collect();
        Self::new(file.n, file.values, pmf)
    }

    /// Serializable form.
    pub fn to_file(&self) -> PriorFile {
        PriorFile {
            n: self.n,
            values: self.values.clone(),
            pmf: self.support.iter().map(|(profile, p)| PmfEntry { profile: profile.clone(), p: *p }).collect(),
        }
    }

    /// JSON text of [`to_file`](Self::to_file).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("prior serializes")
    }

    /// Number of bidders.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Common value set, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest value in the value set.
    pub fn v_bar(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// Positive-probability profiles, sorted.
    pub fn support(&self) -> &[(Vec<usize>, f64)] {
        &self.support
    }

    /// Probability of a profile (0 when absent).
    pub fn prob(&self, profile: &[usize]) -> f64 {
        match self.support.binary_search_by(|(q, _)| q.as_slice().cmp(profile)) {
            Ok(k) => self.support[k].1,
            Err(_) => 0.0,
        }
    }

    /// Real values of an index profile.
    pub fn value_profile(&self, profile: &[usize]) -> Vec<f64> {
        profile.iter().map(|&k| self.values[k]).collect()
    }

    /// Mixed-radix id of an index profile.
    pub fn profile_id(&self, profile: &[usize]) -> u64 {
        encode(profile, &vec![self.values.len(); self.n])
    }

    /// Inverse of [`profile_id`](Self::profile_id).
    pub fn profile_from_id(&self, id: u64) -> Vec<usize> {
        crate::util::decode(id, &vec![self.values.len(); self.n])
    }

    /// Marginal distribution of one coordinate over value indices.
    pub fn marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.values.len()];
        for (profile, p) in &self.support {
            m[profile[0]] += p;
        }
        m
    }

    /// Largest atom-wise deviation of the pmf from the product of its marginals.
    pub fn product_gap(&self) -> f64 {
        let m = self.marginal();
        let k = self.values.len();
        let total = (k as u64).pow(self.n as u32);
        let mut gap: f64 = 0.0;
        for id in 0..total {
            let profile = self.profile_from_id(id);
            let prod: f64 = profile.iter().map(|&a| m[a]).product();
            gap = gap.max((self.prob(&profile) - prod).abs());
        }
        gap
    }

    /// Smallest strictly positive entry of the value set, if any.
    pub fn min_positive_value(&self) -> Option<f64> {
        self.values.iter().copied().find(|v| *v > 0.0)
    }
}

/// Number of coordinates attaining the maximum.
pub fn tie_count<T: PartialOrd + Copy>(profile: &[T]) -> usize {
    crate::util::argmax_set(profile).len()
}

/// Statistics of a prior consumed by the constructions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorStats {
    /// Expected maximum value.
    pub wel_max: f64,
    /// Expected minimum value.
    pub wel_min: f64,
    /// Law of a designated bidder's value given that it wins under uniform tie-breaking,
    /// indexed like the value set.
    pub modified_prior: Vec<f64>,
    /// Tie-weighted profile law on the event that bidder 0 holds the maximum, sorted by profile.
    pub tie_weighted: Vec<(Vec<usize>, f64)>,
    /// Mean of `modified_prior`.
    pub v_hat: f64,
}

impl PriorStats {
    /// Tie-weighted law for designated bidder `i`, obtained by swapping coordinates 0 and `i`.
    pub fn tie_weighted_for(&self, i: usize) -> Vec<(Vec<usize>, f64)> {
        let mut out: Vec<_> = self
            .tie_weighted
            .iter()
            .map(|(v, p)| {
                let mut w = v.clone();
                w.swap(0, i);
                (w, *p)
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }
}

/// Compute every prior-derived statistic.
pub fn compute_stats(prior: &SymmetricPrior) -> PriorStats {
    let n = prior.n() as f64;
    let mut wel_max = 0.0;
    let mut wel_min = 0.0;
    let mut modified = vec![0.0; prior.values().len()];
    let mut tie_weighted = Vec::new();
    for (profile, p) in prior.support() {
        let hi = *profile.iter().max().expect("n >= 2");
        let lo = *profile.iter().min().expect("n >= 2");
        wel_max += p * prior.values()[hi];
        wel_min += p * prior.values()[lo];
        if profile[0] == hi {
            let w = n * p / tie_count(profile) as f64;
            modified[hi] += w;
            tie_weighted.push((profile.clone(), w));
        }
    }
    let v_hat = modified.iter().zip(prior.values()).map(|(p, v)| p * v).sum();
    PriorStats { wel_max, wel_min, modified_prior: modified, tie_weighted, v_hat }
}

/// Which constructions a prior admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PriorClass {
    /// Every support profile is constant or has at most one positive coordinate.
    BidderSurplusFriendly,
    /// The maximum equals the top value on every support profile, and some profile is not constant.
    DegenerateMax,
    General,
}

impl fmt::Display for PriorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PriorClass::BidderSurplusFriendly => "BidderSurplusFriendly",
            PriorClass::DegenerateMax => "DegenerateMax",
            PriorClass::General => "General",
        };
        f.write_str(s)
    }
}

/// Classify a prior; the bidder-surplus class takes precedence.
pub fn classify_prior(prior: &SymmetricPrior) -> PriorClass {
    let vals = prior.values();
    let friendly = prior.support().iter().all(|(profile, _)| {
        let constant = profile.iter().all(|&k| k == profile[0]);
        let positives = profile.iter().filter(|&&k| vals[k] > 0.0).count();
        constant || positives <= 1
    });
    if friendly {
        return PriorClass::BidderSurplusFriendly;
    }
    let top = vals.len() - 1;
    let max_is_top = prior.support().iter().all(|(profile, _)| profile.contains(&top));
    let all_constant = prior.support().iter().all(|(profile, _)| profile.iter().all(|&k| k == profile[0]));
    if max_is_top && !all_constant {
        PriorClass::DegenerateMax
    } else {
        PriorClass::General
    }
}

/// Apply a bidder permutation to every support profile.
pub fn permute_prior(prior: &SymmetricPrior, perm: &[usize]) -> Vec<(Vec<usize>, f64)> {
    let mut out: Vec<_> = prior.support().iter().map(|(v, p)| (permute(v, perm), *p)).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// All bidder permutations; exposed for invariance checks.
pub fn bidder_permutations(n: usize) -> Vec<Vec<usize>> {
    permutations(n)
}

/// Independent product prior from a marginal over `values`.
pub fn iid_prior(n: usize, values: Vec<f64>, marginal: &[f64]) -> Result<SymmetricPrior> {
    if marginal.len() != values.len() {
        return Err(Error::InvalidPrior("marginal length differs from value set".into()));
    }
    let k = values.len();
    let total = (k as u64).pow(n as u32);
    let radices = vec![k; n];
    let mut pmf = Vec::new();
    for id in 0..total {
        let profile = crate::util::decode(id, &radices);
        let p: f64 = profile.iter().map(|&a| marginal[a]).product();
        if p > 0.0 {
            pmf.push((profile, p));
        }
    }
    renormalize(&mut pmf);
    SymmetricPrior::new(n, values, pmf)
}

/// Rescale so the probabilities sum to one exactly in floating point as far as possible.
pub(crate) fn renormalize(pmf: &mut [(Vec<usize>, f64)]) {
    let sum: f64 = pmf.iter().map(|(_, p)| p).sum();
    if sum > 0.0 {
        for (_, p) in pmf.iter_mut() {
            *p /= sum;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn p1_validates() {
        let p = fixtures::p1();
        assert_eq!(p.support().len(), 4);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn asymmetric_rejected() {
        let e = SymmetricPrior::new(
            2,
            vec![0.0, 1.0],
            vec![(vec![0, 0], 0.25), (vec![1, 0], 0.3), (vec![0, 1], 0.2), (vec![1, 1], 0.25)],
        )
        .unwrap_err();
        assert!(matches!(e, Error::NotExchangeable { .. }));
    }

    #[test]
    fn unnormalized_rejected() {
        let e = SymmetricPrior::new(
            2,
            vec![0.0, 1.0],
            vec![(vec![0, 0], 0.25), (vec![1, 0], 0.25), (vec![0, 1], 0.25), (vec![1, 1], 0.3)],
        )
        .unwrap_err();
        match e {
            Error::NotNormalized { sum } => assert!((sum - 1.05).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_duplicate_rejected() {
        assert_eq!(SymmetricPrior::new(2, vec![0.0, 1.0], vec![]).unwrap_err(), Error::EmptySupport);
        let dup = SymmetricPrior::new(2, vec![1.0], vec![(vec![0, 0], 0.5), (vec![0, 0], 0.5)]);
        assert!(matches!(dup, Err(Error::InvalidPrior(_))));
    }

    #[test]
    fn tie_counts() {
        assert_eq!(tie_count(&[1.0, 1.0]), 2);
        assert_eq!(tie_count(&[1.0, 0.0]), 1);
        assert_eq!(tie_count(&[0.5, 0.5, 0.5]), 3);
    }

    #[test]
    fn p1_stats_match_enumeration() {
        let s = compute_stats(&fixtures::p1());
        assert!((s.wel_max - 0.75).abs() < 1e-15);
        assert!((s.wel_min - 0.25).abs() < 1e-15);
        assert!((s.modified_prior[0] - 0.25).abs() < 1e-15);
        assert!((s.modified_prior[1] - 0.75).abs() < 1e-15);
        assert!((s.v_hat - 0.75).abs() < 1e-15);
        let tw: BTreeMap<_, _> = s.tie_weighted.iter().cloned().collect();
        assert_eq!(tw.len(), 3);
        assert!((tw[&vec![0, 0]] - 0.25).abs() < 1e-15);
        assert!((tw[&vec![1, 0]] - 0.5).abs() < 1e-15);
        assert!((tw[&vec![1, 1]] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn degenerate_prior_stats() {
        let p = SymmetricPrior::new(3, vec![1.0], vec![(vec![0, 0, 0], 1.0)]).unwrap();
        let s = compute_stats(&p);
        assert_eq!(s.wel_max, 1.0);
        assert_eq!(s.wel_min, 1.0);
        assert_eq!(s.modified_prior, vec![1.0]);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_prior(&fixtures::p1()), PriorClass::BidderSurplusFriendly);
        assert_eq!(classify_prior(&fixtures::degenerate_max_pair()), PriorClass::DegenerateMax);
        assert_eq!(classify_prior(&fixtures::iid_three_point(2)), PriorClass::General);
    }

    #[test]
    fn product_gap_detects_correlation() {
        assert!(fixtures::p1().product_gap() < 1e-15);
        assert!(fixtures::degenerate_max_pair().product_gap() > 0.1);
    }

    #[test]
    fn json_roundtrip() {
        let p = fixtures::iid_three_point(3);
        let back = SymmetricPrior::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn tie_weighted_for_other_bidder() {
        let s = compute_stats(&fixtures::p1());
        let t = s.tie_weighted_for(1);
        assert!(t.iter().all(|(v, _)| v[1] >= v[0]));
    }
}
