//! Small priors and hand-made structures used by tests, the acceptance suite and the CLI.

use std::collections::BTreeMap;

use crate::prior::{iid_prior, renormalize, SymmetricPrior};
use crate::structure::{Alphabet, InfoStructure, JointBuilder};

/// Two bidders, values {0, 1}, all four profiles equally likely.
pub fn p1() -> SymmetricPrior {
    iid_prior(2, vec![0.0, 1.0], &[0.5, 0.5]).expect("valid")
}

/// Support {(1, 0.5), (0.5, 1), (1, 1)}, uniform: the maximum is always 1.
pub fn degenerate_max_pair() -> SymmetricPrior {
    let third = 1.0 / 3.0;
    SymmetricPrior::new(
        2,
        vec![0.5, 1.0],
        vec![(vec![1, 0], third), (vec![0, 1], third), (vec![1, 1], 1.0 - 2.0 * third)],
    )
    .expect("valid")
}

/// `n` bidders with values iid uniform on {0, 0.5, 1}.
pub fn iid_three_point(n: usize) -> SymmetricPrior {
    iid_prior(n, vec![0.0, 0.5, 1.0], &[1.0 / 3.0; 3]).expect("valid")
}

/// `n` bidders with values iid uniform on `m` cell midpoints of [0, 1].
pub fn iid_uniform(n: usize, m: usize) -> SymmetricPrior {
    let values = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
    iid_prior(n, values, &vec![1.0 / m as f64; m]).expect("valid")
}

/// Three bidders whose profiles are common-valued or have a single positive entry.
pub fn common_or_single_three() -> SymmetricPrior {
    let mut pmf = vec![(vec![0, 0, 0], 0.1), (vec![2, 2, 2], 0.2), (vec![1, 1, 1], 0.1)];
    for hi in [1usize, 2] {
        for pos in 0..3 {
            let mut v = vec![0; 3];
            v[pos] = hi;
            pmf.push((v, 0.1));
        }
    }
    SymmetricPrior::new(3, vec![0.0, 0.5, 1.0], pmf).expect("valid")
}

/// Point mass on the constant profile (c, ..., c).
pub fn constant(n: usize, c: f64) -> SymmetricPrior {
    SymmetricPrior::new(n, vec![c], vec![(vec![0; n], 1.0)]).expect("valid")
}

/// Every bidder observes its own value.
pub fn fully_revealing(prior: &SymmetricPrior) -> InfoStructure {
    let grid = Alphabet::numeric(prior.values().to_vec()).expect("ascending");
    let mut b = JointBuilder::new(prior, vec![grid; prior.n()]).expect("sizes");
    for (v, p) in prior.support() {
        b.add(v, v, *p);
    }
    b.finish().expect("valid").with_construction("fully-revealing", serde_json::json!({}))
}

/// Every bidder observes the constant signal 0.
pub fn constant_signal(prior: &SymmetricPrior) -> InfoStructure {
    let grid = Alphabet::numeric(vec![0.0]).expect("single atom");
    let mut b = JointBuilder::new(prior, vec![grid; prior.n()]).expect("sizes");
    for (v, p) in prior.support() {
        b.add(v, &vec![0; prior.n()], *p);
    }
    b.finish().expect("valid").with_construction("constant-signal", serde_json::json!({}))
}

/// Discretization of the two-bidder continuous example with uniform values and
/// signals on [1/2, 1]: given s1 > s2 the winner's value is uniform on
/// [2 s2 - 1, 1] and the loser's value is uniform below the winner's.
///
/// Values sit at the right endpoints `j/m` of a uniform partition of [0, 1] and
/// signals at `k` cell midpoints of [1/2, 1]. The prior is the induced value
/// marginal.
pub fn uniform_pair_example(m: usize, k: usize) -> InfoStructure {
    let values: Vec<f64> = (1..=m).map(|j| j as f64 / m as f64).collect();
    let signals: Vec<f64> = (0..k).map(|j| 0.5 + (j as f64 + 0.5) / (2.0 * k as f64)).collect();
    // density of (v_hi, v_lo) given the lower signal, for the high-signal bidder holding v_hi
    let dens = |v_hi: f64, s_lo: f64| {
        if s_lo <= (v_hi + 1.0) / 2.0 {
            2.0 / (v_hi * (1.0 - s_lo))
        } else {
            0.0
        }
    };
    let mut cells: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    for a in 0..k {
        for b in 0..k {
            for hi in 0..m {
                for lo in 0..hi {
                    let (v_hi, s) = (values[hi], [a, b]);
                    // bidder 0 holds the high signal and the high value
                    let w0 = if a > b {
                        dens(v_hi, signals[b])
                    } else if a == b {
                        0.5 * dens(v_hi, signals[b])
                    } else {
                        0.0
                    };
                    // bidder 1 holds the high signal and the high value
                    let w1 = if b > a {
                        dens(v_hi, signals[a])
                    } else if a == b {
                        0.5 * dens(v_hi, signals[a])
                    } else {
                        0.0
                    };
                    if w0 > 0.0 {
                        *cells.entry((vec![hi, lo], s.to_vec())).or_insert(0.0) += w0;
                    }
                    if w1 > 0.0 {
                        *cells.entry((vec![lo, hi], s.to_vec())).or_insert(0.0) += w1;
                    }
                }
            }
        }
    }
    let total: f64 = cells.values().sum();
    let mut pmf: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for ((v, _), p) in cells.iter_mut() {
        *p /= total;
        *pmf.entry(v.clone()).or_insert(0.0) += *p;
    }
    // symmetrize sums so exchangeability holds to rounding
    let mut sym: Vec<(Vec<usize>, f64)> = pmf
        .iter()
        .map(|(v, p)| {
            let q = pmf[&vec![v[1], v[0]]];
            (v.clone(), 0.5 * (p + q))
        })
        .collect();
    renormalize(&mut sym);
    let prior = SymmetricPrior::new(2, values, sym).expect("induced prior is exchangeable");
    let grid = Alphabet::numeric(signals).expect("ascending");
    let mut builder = JointBuilder::new(&prior, vec![grid.clone(), grid]).expect("sizes");
    for ((v, s), p) in cells {
        builder.add(&v, &s, p);
    }
    builder.finish().expect("valid").with_construction("uniform-pair-example", serde_json::json!({"m": m, "k": k}))
}
