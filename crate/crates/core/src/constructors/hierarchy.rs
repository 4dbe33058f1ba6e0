//! Private-private structures with a hierarchy of high signals: the first
//! bidder in index order holding a high signal wins, later bidders draw their
//! signals independently with marginals chosen so the joint law factorizes.

use serde::Serialize;
use serde_json::json;

use super::{require_class, FrontierParams, DEFAULT_LOW_ATOMS};
use crate::error::{Error, Result};
use crate::prior::{PriorClass, SymmetricPrior};
use crate::structure::{Alphabet, InfoStructure, JointBuilder};

/// Signal index of the low atom for bidders with binary alphabets.
const LOW: usize = 0;
/// Signal index of the high atom for bidders with binary alphabets.
const HIGH: usize = 1;

/// Binary alphabets `{low_j, high_j}` for every bidder but the last, whose alphabet is `{high}`.
fn binary_alphabets(low: &[f64], high: &[f64]) -> Result<Vec<Alphabet>> {
    let n = high.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n - 1 {
        out.push(Alphabet::numeric(vec![low[j], high[j]])?);
    }
    out.push(Alphabet::numeric(vec![high[n - 1]])?);
    Ok(out)
}

/// Signal index of "high" for bidder `j`.
fn high_index(j: usize, n: usize) -> usize {
    if j == n - 1 {
        0
    } else {
        HIGH
    }
}

/// Add mass `p` at value profile `v` with signals fixed on `prefix` and every
/// later bidder `j` independently high with probability `phi[j]`.
fn emit(builder: &mut JointBuilder, v: &[usize], p: f64, prefix: &[usize], phi: &[f64]) {
    let n = v.len();
    let free = n - prefix.len();
    for bits in 0..1usize << free {
        let mut s = prefix.to_vec();
        let mut q = p;
        for (t, j) in (prefix.len()..n).enumerate() {
            let hi = bits >> t & 1 == 1;
            if j == n - 1 && !hi {
                q = 0.0;
                break;
            }
            q *= if hi { phi[j] } else { 1.0 - phi[j] };
            s.push(if hi { high_index(j, n) } else { LOW });
        }
        if q > 0.0 {
            builder.add(v, &s, q);
        }
    }
}

/// Prefix giving bidders `0..f` the low signal and bidder `f` its high signal.
fn winner_prefix(f: usize, n: usize) -> Vec<usize> {
    let mut s = vec![LOW; f];
    s.push(high_index(f, n));
    s
}

/// Degenerate-max structure: every signal lies in `(v̄ - eps, v̄]`, the
/// lowest-index bidder holding `v̄` gets the unique top signal.
pub fn build_degenerate_max(prior: &SymmetricPrior, eps: f64) -> Result<InfoStructure> {
    require_class(prior, PriorClass::DegenerateMax)?;
    let v_bar = prior.v_bar();
    if !(eps > 0.0 && eps <= v_bar) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, {v_bar}], got {eps}")));
    }
    let n = prior.n();
    let top = prior.values().len() - 1;
    let d = eps / (2.0 * n as f64);
    let high: Vec<f64> = (0..n).map(|i| v_bar - i as f64 * d).collect();
    let low: Vec<f64> = (0..n - 1).map(|i| v_bar - (n + i) as f64 * d).collect();
    let first = |v: &[usize]| v.iter().position(|&x| x == top).expect("max is the top value");
    let mut p_first = vec![0.0; n];
    for (v, p) in prior.support() {
        p_first[first(v)] += p;
    }
    let phi: Vec<f64> = (0..n)
        .map(|j| {
            let tail: f64 = p_first[j..].iter().sum();
            if tail > 0.0 {
                (p_first[j] / tail).min(1.0)
            } else {
                1.0
            }
        })
        .collect();
    let mut builder = JointBuilder::new(prior, binary_alphabets(&low, &high)?)?;
    for (v, p) in prior.support() {
        let f = first(v);
        emit(&mut builder, v, *p, &winner_prefix(f, n), &phi);
    }
    Ok(builder.finish()?.with_construction("degenerate-max", json!({"eps": eps, "high": high, "low": low})))
}

/// Bidder-surplus structure with the default number of low atoms.
pub fn build_bidder_surplus(prior: &SymmetricPrior, eps: f64) -> Result<InfoStructure> {
    build_bidder_surplus_with(prior, eps, DEFAULT_LOW_ATOMS)
}

/// Bidder-surplus structure: efficient allocation with revenue at most `eps`.
///
/// With two bidders, bidder 0 observes its value and bidder 1 draws a signal
/// uniformly from `low_atoms` cell midpoints of `(0, eps)`. With three or more,
/// bidder 0 holds `{0, v̄}` and bidder `l` holds `{0, t_l}` with
/// `t_l = (N - l) eps / N`, and the single active bidder gets its high signal.
pub fn build_bidder_surplus_with(prior: &SymmetricPrior, eps: f64, low_atoms: usize) -> Result<InfoStructure> {
    require_class(prior, PriorClass::BidderSurplusFriendly)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if let Some(min_positive) = prior.min_positive_value() {
        if eps >= min_positive {
            return Err(Error::EpsilonTooLarge { eps, min_positive });
        }
    }
    let n = prior.n();
    let vals = prior.values();
    if n == 2 {
        if low_atoms == 0 {
            return Err(Error::InvalidParameter("need at least one low atom".into()));
        }
        let grid: Vec<f64> = (0..low_atoms).map(|k| (k as f64 + 0.5) * eps / low_atoms as f64).collect();
        let own = Alphabet::numeric(vals.to_vec())?;
        let mut builder = JointBuilder::new(prior, vec![own, Alphabet::numeric(grid)?])?;
        for (v, p) in prior.support() {
            for k in 0..low_atoms {
                builder.add(v, &[v[0], k], p / low_atoms as f64);
            }
        }
        return Ok(builder.finish()?.with_construction("bidder-surplus", json!({"eps": eps, "low_atoms": low_atoms})));
    }
    let v_bar = prior.v_bar();
    let mut high: Vec<f64> = (0..n).map(|j| (n - j) as f64 * eps / n as f64).collect();
    high[0] = v_bar;
    let low = vec![0.0; n - 1];
    let (q1, q2) = common_single_masses(prior);
    let mut phi: Vec<f64> = (0..n).map(|j| 1.0 / (n - j) as f64).collect();
    phi[0] = q1 + q2 / n as f64;
    let mut builder = JointBuilder::new(prior, binary_alphabets(&low, &high)?)?;
    for (v, p) in prior.support() {
        let f = active_bidder(v, vals).unwrap_or_default();
        emit(&mut builder, v, *p, &winner_prefix(f, n), &phi);
    }
    Ok(builder.finish()?.with_construction("bidder-surplus", json!({"eps": eps, "thresholds": high})))
}

/// The single positive coordinate of a non-constant profile.
fn active_bidder(v: &[usize], vals: &[f64]) -> Option<usize> {
    if v.iter().all(|&x| x == v[0]) {
        return None;
    }
    v.iter().position(|&x| vals[x] > 0.0)
}

/// Masses of constant profiles and of single-active profiles.
fn common_single_masses(prior: &SymmetricPrior) -> (f64, f64) {
    let vals = prior.values();
    let mut q1 = 0.0;
    let mut q2 = 0.0;
    for (v, p) in prior.support() {
        match active_bidder(v, vals) {
            None => q1 += p,
            Some(_) => q2 += p,
        }
    }
    (q1, q2)
}

/// Posterior-mean quantities of the alpha family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaQuantities {
    pub alpha: f64,
    pub alpha_max: f64,
    /// Mass of constant profiles.
    pub q1: f64,
    /// Mass of single-active profiles.
    pub q2: f64,
    /// Mean common value on constant profiles.
    pub v_common: f64,
    /// Mean value of the active bidder on single-active profiles.
    pub v_dagger: f64,
    /// Posterior weight on a constant profile for a bidder `l >= 2` holding its high signal.
    pub theta: f64,
    /// Posterior mean of a low-signal bidder that would win by deviating.
    pub v_inact: f64,
    /// Posterior mean of a high-signal winner `l >= 2`.
    pub v_win_rest: f64,
    /// Posterior mean of bidder 1 holding `v̄`.
    pub v_win_first: f64,
}

/// Evaluate the alpha-family quantities for a bidder-surplus-friendly prior.
pub fn alpha_quantities(prior: &SymmetricPrior, alpha: f64) -> Result<AlphaQuantities> {
    require_class(prior, PriorClass::BidderSurplusFriendly)?;
    let n = prior.n() as f64;
    let alpha_max = (n - 1.0) / n;
    if !(0.0..=alpha_max).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha, max: alpha_max });
    }
    let vals = prior.values();
    let (q1, q2) = common_single_masses(prior);
    let (mut common, mut single) = (0.0, 0.0);
    for (v, p) in prior.support() {
        match active_bidder(v, vals) {
            None => common += p * vals[v[0]],
            Some(i) => single += p * vals[v[i]],
        }
    }
    let v_common = if q1 > 0.0 { common / q1 } else { 0.0 };
    let v_dagger = if q2 > 0.0 { single / q2 } else { 0.0 };
    let shared = q1 * alpha / (n - 1.0);
    let theta = if shared + q2 / n > 0.0 { shared / (shared + q2 / n) } else { 0.0 };
    let first_mass = q1 * (1.0 - alpha) + q2 / n;
    let v_win_first =
        if first_mass > 0.0 { (q2 / n * v_dagger + q1 * (1.0 - alpha) * v_common) / first_mass } else { 0.0 };
    Ok(AlphaQuantities {
        alpha,
        alpha_max,
        q1,
        q2,
        v_common,
        v_dagger,
        theta,
        v_inact: v_common * theta,
        v_win_rest: (1.0 - theta) * v_dagger + theta * v_common,
        v_win_first,
    })
}

/// Efficient alpha-family structure.
///
/// Bidder 0 holds `{s_low, v̄}`, bidder `l` holds `{s_low, s_low + gap (N-l)/(N-1)}`,
/// the last bidder only its high signal. `s_low` moves linearly in
/// `alpha / alpha_max` from the inactive posterior mean up to the highest
/// placement keeping every high signal below both winner posterior means, so
/// revenue increases with `alpha`.
pub fn build_frontier_alpha(prior: &SymmetricPrior, params: FrontierParams) -> Result<InfoStructure> {
    let FrontierParams::Alpha { alpha, eps: gap } = params else {
        return Err(Error::InvalidParameter("alpha construction needs FrontierParams::Alpha".into()));
    };
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!("signal gap must be positive, got {gap}")));
    }
    let aq = alpha_quantities(prior, alpha)?;
    let n = prior.n();
    let v_bar = prior.v_bar();
    let upper = aq.v_win_rest.min(aq.v_win_first);
    if upper - gap < aq.v_inact {
        return Err(Error::NoFeasibleSignalGap { low: aq.v_inact, high: upper, gap });
    }
    let ratio = if aq.alpha_max > 0.0 { alpha / aq.alpha_max } else { 0.0 };
    let s_low = aq.v_inact + ratio * (upper - gap - aq.v_inact);
    let mut high: Vec<f64> = (0..n).map(|j| s_low + gap * (n - j) as f64 / (n - 1) as f64).collect();
    high[0] = v_bar;
    if high[1] >= v_bar {
        return Err(Error::NoFeasibleSignalGap { low: aq.v_inact, high: upper, gap });
    }
    let low = vec![s_low; n - 1];
    let mut phi: Vec<f64> = (0..n).map(|j| 1.0 / (n - j) as f64).collect();
    phi[0] = (1.0 - alpha) * aq.q1 + aq.q2 / n as f64;
    let vals = prior.values();
    let mut builder = JointBuilder::new(prior, binary_alphabets(&low, &high)?)?;
    for (v, p) in prior.support() {
        match active_bidder(v, vals) {
            Some(i) => emit(&mut builder, v, *p, &winner_prefix(i, n), &phi),
            None => {
                emit(&mut builder, v, p * (1.0 - alpha), &[HIGH], &phi);
                emit(&mut builder, v, p * alpha, &[LOW], &phi);
            }
        }
    }
    Ok(builder.finish()?.with_construction(
        "frontier-alpha",
        json!({"alpha": alpha, "gap": gap, "s_low": s_low, "high": high, "quantities": aq}),
    ))
}
