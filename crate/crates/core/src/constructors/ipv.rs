//! Threshold hybrid for product priors: high values are revealed, all-low
//! profiles use a full-extraction structure and low bidders facing a high
//! bidder draw uniform window signals.

use serde_json::json;

use super::{build_full_extraction, FrontierParams};
use crate::error::{Error, Result};
use crate::prior::{iid_prior, SymmetricPrior};
use crate::structure::{Alphabet, InfoStructure, JointBuilder};
use crate::util::decode;

/// Largest product-measure deviation accepted.
const PRODUCT_TOL: f64 = 1e-12;

/// Per-value high and low masses of a bidder's marginal for threshold `t` and share `q`.
struct Split {
    high: Vec<f64>,
    low: Vec<f64>,
}

fn split(prior: &SymmetricPrior, t: f64, q: f64) -> Result<Split> {
    let gap = prior.product_gap();
    if gap > PRODUCT_TOL {
        return Err(Error::NotProductPrior { gap });
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q must lie in [0, 1], got {q}")));
    }
    let vals = prior.values();
    let ti = vals
        .iter()
        .position(|v| (v - t).abs() <= 1e-12)
        .ok_or_else(|| Error::InvalidParameter(format!("threshold {t} is not a value atom")))?;
    let mu = prior.marginal();
    let high: Vec<f64> = mu
        .iter()
        .enumerate()
        .map(|(a, m)| {
            if a > ti {
                *m
            } else if a == ti {
                q * m
            } else {
                0.0
            }
        })
        .collect();
    let low = mu.iter().zip(&high).map(|(m, h)| m - h).collect();
    Ok(Split { high, low })
}

/// Low-region signal grid and its all-low structure (`None` when the low law is a point mass).
struct LowRegion {
    grid: Vec<f64>,
    /// Original value index of each low value.
    values: Vec<usize>,
    inner: Option<InfoStructure>,
    mass: f64,
}

fn low_region(prior: &SymmetricPrior, split: &Split, k: usize, eps_cap: f64) -> Result<Option<LowRegion>> {
    let mass: f64 = split.low.iter().sum();
    let values: Vec<usize> = (0..split.low.len()).filter(|&a| split.low[a] > 0.0).collect();
    if mass <= 0.0 || values.is_empty() {
        return Ok(None);
    }
    if values.len() == 1 {
        let c = prior.values()[values[0]];
        return Ok(Some(LowRegion { grid: vec![c], values, inner: None, mass }));
    }
    let reals: Vec<f64> = values.iter().map(|&a| prior.values()[a]).collect();
    let marginal: Vec<f64> = values.iter().map(|&a| split.low[a] / mass).collect();
    let low_prior = iid_prior(prior.n(), reals, &marginal)?;
    let inner = build_full_extraction(&low_prior, k, eps_cap)?;
    let grid = inner.alphabets()[0].atoms().to_vec();
    Ok(Some(LowRegion { grid, values, inner: Some(inner), mass }))
}

/// Threshold hybrid structure for a product prior.
pub fn build_ipv_hybrid(prior: &SymmetricPrior, params: FrontierParams) -> Result<InfoStructure> {
    let FrontierParams::Ipv { t, q, k, eps_cap } = params else {
        return Err(Error::InvalidParameter("threshold hybrid needs FrontierParams::Ipv".into()));
    };
    let sp = split(prior, t, q)?;
    let n = prior.n();
    let vals = prior.values();
    let low = low_region(prior, &sp, k, eps_cap)?;
    let high_values: Vec<usize> = (0..vals.len()).filter(|&a| sp.high[a] > 0.0).collect();
    let mut atoms: Vec<f64> = high_values.iter().map(|&a| vals[a]).collect();
    if let Some(l) = &low {
        atoms.extend(l.grid.iter().copied());
    }
    atoms.sort_by(f64::total_cmp);
    atoms.dedup();
    let index_of = |x: f64| atoms.iter().position(|&a| a == x).expect("atom present");
    let high_signal: Vec<usize> =
        (0..vals.len()).map(|a| if sp.high[a] > 0.0 { index_of(vals[a]) } else { 0 }).collect();
    let low_signal: Vec<usize> =
        low.as_ref().map(|l| l.grid.iter().map(|&g| index_of(g)).collect()).unwrap_or_default();
    let alphabet = Alphabet::numeric(atoms.clone())?;
    let mut builder = JointBuilder::new(prior, vec![alphabet; n])?;

    // (value index, signal index, mass) options per bidder state
    let high_opts: Vec<(usize, usize, f64)> = high_values.iter().map(|&a| (a, high_signal[a], sp.high[a])).collect();
    let low_opts: Vec<(usize, usize, f64)> = match &low {
        Some(l) => {
            let m = l.grid.len() as f64;
            let low_mass = &sp.low;
            l.values.iter().flat_map(|&a| low_signal.iter().map(move |&g| (a, g, low_mass[a] / m))).collect()
        }
        None => Vec::new(),
    };
    for mask in 0..1usize << n {
        if mask == 0 {
            continue;
        }
        let opts: Vec<&Vec<(usize, usize, f64)>> =
            (0..n).map(|j| if mask >> j & 1 == 1 { &high_opts } else { &low_opts }).collect();
        if opts.iter().any(|o| o.is_empty()) {
            continue;
        }
        let radices: Vec<usize> = opts.iter().map(|o| o.len()).collect();
        let count: usize = radices.iter().product();
        for id in 0..count as u64 {
            let pick = decode(id, &radices);
            let mut v = Vec::with_capacity(n);
            let mut s = Vec::with_capacity(n);
            let mut p = 1.0;
            for (j, &c) in pick.iter().enumerate() {
                let (a, g, w) = opts[j][c];
                v.push(a);
                s.push(g);
                p *= w;
            }
            builder.add(&v, &s, p);
        }
    }
    if let Some(l) = &low {
        let scale = l.mass.powi(n as i32);
        match &l.inner {
            Some(inner) => {
                for e in inner.entries() {
                    let v: Vec<usize> = inner.value_profile(e.v).iter().map(|&x| l.values[x]).collect();
                    let s: Vec<usize> = inner.signal_profile(e.s).iter().map(|&x| low_signal[x]).collect();
                    builder.add(&v, &s, e.p * scale);
                }
            }
            None => builder.add(&vec![l.values[0]; n], &vec![low_signal[0]; n], scale),
        }
    }
    let low_grid = low.as_ref().map(|l| l.grid.clone()).unwrap_or_default();
    Ok(builder
        .finish()?
        .with_construction("ipv-hybrid", json!({"t": t, "q": q, "K": k, "eps_cap": eps_cap, "low_grid": low_grid})))
}

/// Total bidder surplus of the hybrid under truthful bidding, computed from
/// order statistics of the values and the low grid alone.
///
/// All-low profiles contribute nothing. With one high bidder the winner pays
/// the largest of the other bidders' independent uniform grid signals; with
/// several the winner pays the second-highest high value.
pub fn ipv_surplus_oracle(prior: &SymmetricPrior, t: f64, q: f64, low_grid: &[f64]) -> Result<f64> {
    let sp = split(prior, t, q)?;
    let n = prior.n();
    let vals = prior.values();
    let nv = vals.len();
    let m = low_grid.len();
    // E[max of n - 1 iid uniform grid draws]
    let max_low = if m == 0 {
        0.0
    } else {
        let mf = m as f64;
        let e = (n - 1) as i32;
        low_grid.iter().enumerate().map(|(j, g)| g * (((j + 1) as f64).powi(e) - (j as f64).powi(e)) / mf.powi(e)).sum()
    };
    let low_mass: f64 = sp.low.iter().sum();
    let mut total = 0.0;
    // each bidder is low (state nv) or high with value index a
    let radices = vec![nv + 1; n];
    for id in 0..((nv + 1) as u64).pow(n as u32) {
        let st = decode(id, &radices);
        let highs: Vec<usize> = st.iter().copied().filter(|&x| x < nv).collect();
        if highs.is_empty() {
            continue;
        }
        let p: f64 = st.iter().map(|&x| if x < nv { sp.high[x] } else { low_mass }).product();
        if p == 0.0 {
            continue;
        }
        let mut hv: Vec<f64> = highs.iter().map(|&a| vals[a]).collect();
        hv.sort_by(|a, b| b.total_cmp(a));
        let gain = if hv.len() == 1 { (hv[0] - max_low).max(0.0) } else { hv[0] - hv[1] };
        total += p * gain;
    }
    Ok(total)
}
