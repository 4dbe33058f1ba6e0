//! Builders for every information-structure family: full extraction, strict
//! near-extraction, hierarchical high-signal structures, efficient frontier
//! families and the general extreme points of the feasible region.

mod extreme;
mod full_extraction;
mod hierarchy;
mod ipv;

use serde::{Deserialize, Serialize};

pub use extreme::{build_point_a, build_point_c, build_point_d, build_target_payoff, mixture_weights, MixtureWeights};
pub use full_extraction::{build_full_extraction, build_strict_eps};
pub use hierarchy::{
    alpha_quantities, build_bidder_surplus, build_bidder_surplus_with, build_degenerate_max, build_frontier_alpha,
    AlphaQuantities,
};
pub use ipv::{build_ipv_hybrid, ipv_surplus_oracle};

/// Default number of low atoms in the two-bidder surplus construction.
pub const DEFAULT_LOW_ATOMS: usize = 8;

/// Parameters of the efficient-frontier families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FrontierParams {
    /// Parametric family indexed by `alpha ∈ [0, (N-1)/N]` with signal gap `eps`.
    Alpha { alpha: f64, eps: f64 },
    /// Threshold hybrid: values above `t` (and a `q` share of the atom at `t`)
    /// are revealed; the low region uses a `k`-atom full-extraction window of
    /// length at most `eps_cap`.
    Ipv { t: f64, q: f64, k: usize, eps_cap: f64 },
}

use crate::error::{Error, Result};
use crate::prior::{classify_prior, PriorClass, SymmetricPrior};
use crate::structure::InfoStructure;

/// Names accepted by [`build_named`].
pub const KINDS: [&str; 12] = [
    "full-extraction",
    "strict-eps",
    "degenerate-max",
    "bidder-surplus",
    "frontier-alpha",
    "ipv-hybrid",
    "point-a",
    "point-c",
    "point-d",
    "target-payoff",
    "fully-revealing",
    "constant-signal",
];

/// Flat parameter set shared by every named constructor. Each kind reads
/// only the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildParams {
    /// Window grid atoms.
    #[serde(rename = "K")]
    pub k: usize,
    /// Window cap, strictness slack, signal gap or bidder-surplus bound, by kind.
    pub eps: f64,
    pub alpha: f64,
    /// Reveal threshold of the hybrid; the top value when absent.
    pub t: Option<f64>,
    pub q: f64,
    /// Target revenue.
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Target total bidder surplus.
    #[serde(rename = "B")]
    pub b: Option<f64>,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self { k: 64, eps: 0.1, alpha: 0.0, t: None, q: 0.0, r: None, b: None }
    }
}

/// Dispatch to a constructor by its name in [`KINDS`].
pub fn build_named(prior: &SymmetricPrior, kind: &str, p: &BuildParams) -> Result<InfoStructure> {
    let t = p.t.unwrap_or_else(|| prior.v_bar());
    match kind {
        "full-extraction" => build_full_extraction(prior, p.k, p.eps),
        "strict-eps" => build_strict_eps(prior, p.eps, p.k),
        "degenerate-max" => build_degenerate_max(prior, p.eps),
        "bidder-surplus" => build_bidder_surplus(prior, p.eps),
        "frontier-alpha" => build_frontier_alpha(prior, FrontierParams::Alpha { alpha: p.alpha, eps: p.eps }),
        "ipv-hybrid" => build_ipv_hybrid(prior, FrontierParams::Ipv { t, q: p.q, k: p.k, eps_cap: p.eps }),
        "point-a" => build_point_a(prior),
        "point-c" => build_point_c(prior),
        "point-d" => build_point_d(prior),
        "target-payoff" => match (p.r, p.b) {
            (Some(r), Some(b)) => build_target_payoff(prior, r, b),
            _ => Err(Error::InvalidParameter("target-payoff needs R and B".into())),
        },
        "fully-revealing" => Ok(crate::fixtures::fully_revealing(prior)),
        "constant-signal" => Ok(crate::fixtures::constant_signal(prior)),
        other => Err(Error::InvalidParameter(format!("unknown kind {other:?}; expected one of {}", KINDS.join(", ")))),
    }
}

fn require_class(prior: &SymmetricPrior, expected: PriorClass) -> Result<()> {
    let found = classify_prior(prior);
    if found != expected {
        return Err(Error::WrongPriorClass { expected: expected.to_string(), found: found.to_string() });
    }
    Ok(())
}
