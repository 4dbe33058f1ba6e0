//! Randomized invariants of priors, structures, payoffs and the equilibrium audit.

use aid_core::constructors::build_full_extraction;
use aid_core::coupling::{martingale_coupling, DiscreteDist};
use aid_core::equilibrium::{best_response, oracle};
use aid_core::prior::iid_prior;
use aid_core::util::{decode, encode, permutations, permute};
use aid_core::{
    compute_stats, evaluate, verify_bne, Alphabet, InfoStructure, JointBuilder, StrategyProfile, SymmetricPrior,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

/// `m` distinct sorted multiples of 0.1 in `[0, 1]`.
fn grid_values(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::sample::subsequence((0..=10u32).collect::<Vec<_>>(), m)
        .prop_map(|v| v.into_iter().map(|x| f64::from(x) / 10.0).collect())
}

/// Exchangeable prior: every profile inherits the weight of its sorted representative.
fn arb_prior() -> impl Strategy<Value = SymmetricPrior> {
    (2usize..=3, 2usize..=3)
        .prop_flat_map(|(n, m)| (Just(n), grid_values(m), prop::collection::vec(0u32..=4, m.pow(n as u32))))
        .prop_filter_map("no positive mass", |(n, values, w)| {
            let m = values.len();
            let radices = vec![m; n];
            let total = m.pow(n as u32) as u64;
            let mut pmf = Vec::new();
            for id in 0..total {
                let profile = decode(id, &radices);
                let mut key = profile.clone();
                key.sort_unstable();
                pmf.push((profile, f64::from(w[encode(&key, &radices) as usize])));
            }
            let z: f64 = pmf.iter().map(|e| e.1).sum();
            if z == 0.0 {
                return None;
            }
            pmf.retain(|e| e.1 > 0.0);
            pmf.iter_mut().for_each(|e| e.1 /= z);
            Some(SymmetricPrior::new(n, values, pmf).expect("exchangeable by construction"))
        })
}

/// Structure with per-bidder numeric alphabets of size 1..=3 and an
/// arbitrary (possibly sparse) signal kernel per value profile, together
/// with random bids of the form `j * v_bar / 10`.
fn arb_structure() -> impl Strategy<Value = (InfoStructure, StrategyProfile)> {
    arb_prior()
        .prop_flat_map(|prior| {
            let n = prior.n();
            let sizes = prop::collection::vec(1usize..=3, n);
            (Just(prior), sizes)
        })
        .prop_flat_map(|(prior, sizes)| {
            let grids: Vec<_> = sizes.iter().map(|&k| grid_values(k)).collect();
            let cells = prior.support().len() * sizes.iter().product::<usize>();
            let bids: Vec<_> = sizes.iter().map(|&k| prop::collection::vec(0u32..=10, k)).collect();
            (Just(prior), grids, prop::collection::vec(0u32..=3, cells), bids)
        })
        .prop_filter_map("kernel leaves a value profile without signals", |(prior, grids, w, bids)| {
            let v_bar = prior.v_bar();
            let scale = |x: f64| x * v_bar;
            let alphabets: Vec<Alphabet> = grids
                .iter()
                .map(|g| Alphabet::numeric(g.iter().map(|&x| scale(x)).collect()))
                .collect::<Result<_, _>>()
                .ok()?;
            let radices: Vec<usize> = alphabets.iter().map(Alphabet::len).collect();
            let per_v: usize = radices.iter().product();
            let mut b = JointBuilder::new(&prior, alphabets).ok()?;
            for (vi, (v, p)) in prior.support().iter().enumerate() {
                let row = &w[vi * per_v..(vi + 1) * per_v];
                let z: u32 = row.iter().sum();
                if z == 0 {
                    return None;
                }
                for (sid, &x) in row.iter().enumerate() {
                    b.add(v, &decode(sid as u64, &radices), p * f64::from(x) / f64::from(z));
                }
            }
            let s = b.finish().ok()?;
            let bids = bids.iter().map(|bs| bs.iter().map(|&j| f64::from(j) * v_bar / 10.0).collect()).collect();
            let sigma = StrategyProfile::from_bids(&s, bids).ok()?;
            Some((s, sigma))
        })
}

/// Relabel bidders: bidder `i` of the result is bidder `perm[i]` of `s`.
fn permute_structure(s: &InfoStructure, sigma: &StrategyProfile, perm: &[usize]) -> (InfoStructure, StrategyProfile) {
    let alphabets: Vec<Alphabet> = perm.iter().map(|&j| s.alphabets()[j].clone()).collect();
    let mut b = JointBuilder::new(s.prior(), alphabets).unwrap();
    for e in s.entries() {
        b.add(&permute(&s.value_profile(e.v), perm), &permute(&s.signal_profile(e.s), perm), e.p);
    }
    let t = b.finish().unwrap();
    let bids = perm.iter().map(|&j| sigma.bids()[j].clone()).collect();
    let tau = StrategyProfile::from_bids(&t, bids).unwrap();
    (t, tau)
}

/// Conditional payoff of bidder `i` at signal `k` when bidding `b`, from raw entries.
fn interim_payoff(s: &InfoStructure, sigma: &StrategyProfile, i: usize, k: usize, b: f64) -> Option<f64> {
    let (mut u, mut mass) = (0.0, 0.0);
    for e in s.entries() {
        let sp = s.signal_profile(e.s);
        if sp[i] != k {
            continue;
        }
        let v = s.values_of(e.v);
        let mut bids: Vec<f64> = (0..s.n()).map(|j| sigma.bid(j, sp[j])).collect();
        bids[i] = b;
        let top = bids.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let winners = bids.iter().filter(|&&x| x == top).count();
        let price = (0..s.n()).filter(|&j| j != i).map(|j| bids[j]).fold(0.0, f64::max);
        if b == top {
            u += e.p * (v[i] - price) / winners as f64;
        }
        mass += e.p;
    }
    (mass > 0.0).then(|| u / mass)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn payoffs_are_conserved((s, sigma) in arb_structure()) {
        let p = evaluate(&s, &sigma).unwrap();
        let st = compute_stats(s.prior());
        prop_assert!((p.revenue + p.bidder_surplus - p.welfare).abs() < TOL);
        prop_assert!((p.per_bidder.iter().sum::<f64>() - p.bidder_surplus).abs() < TOL);
        prop_assert!(p.welfare <= st.wel_max + TOL);
        prop_assert!((st.wel_max - p.welfare - p.efficiency_gap).abs() < TOL);
        prop_assert!((0.0..=1.0 + TOL).contains(&p.tie_mass));
        prop_assert!(p.revenue >= -TOL);
    }

    #[test]
    fn payoffs_are_invariant_to_bidder_relabeling((s, sigma) in arb_structure(), pick in 0usize..6) {
        let perms = permutations(s.n());
        let perm = &perms[pick % perms.len()];
        let (t, tau) = permute_structure(&s, &sigma, perm);
        let p = evaluate(&s, &sigma).unwrap();
        let q = evaluate(&t, &tau).unwrap();
        prop_assert!((p.revenue - q.revenue).abs() < TOL);
        prop_assert!((p.bidder_surplus - q.bidder_surplus).abs() < TOL);
        for (i, &j) in perm.iter().enumerate() {
            prop_assert!((q.per_bidder[i] - p.per_bidder[j]).abs() < TOL);
        }
        let a = verify_bne(&s, &sigma, TOL);
        let b = verify_bne(&t, &tau, TOL);
        prop_assert!((a.worst_gain - b.worst_gain).abs() < TOL);
    }

    #[test]
    fn audit_matches_brute_force((s, sigma) in arb_structure()) {
        let report = verify_bne(&s, &sigma, TOL);
        let brute = oracle::brute_force_bne(&s, &sigma, TOL);
        prop_assert!((report.worst_gain - brute.worst_gain).abs() < 1e-9,
            "audit {} vs brute force {}", report.worst_gain, brute.worst_gain);
        prop_assume!((report.worst_gain - TOL).abs() > 1e-9);
        prop_assert_eq!(report.is_bne, brute.is_bne);
    }

    #[test]
    fn no_grid_deviation_beats_the_audit((s, sigma) in arb_structure()) {
        let report = verify_bne(&s, &sigma, TOL);
        let top = s.prior().v_bar() * 1.2;
        for i in 0..s.n() {
            for k in 0..s.alphabets()[i].len() {
                let Some(base) = interim_payoff(&s, &sigma, i, k, sigma.bid(i, k)) else { continue };
                for j in 0..=240 {
                    let b = top * f64::from(j) / 240.0;
                    let u = interim_payoff(&s, &sigma, i, k, b).unwrap();
                    prop_assert!(u - base <= report.worst_gain + 1e-9,
                        "bidder {i} signal {k} bid {b} gains {} > {}", u - base, report.worst_gain);
                }
            }
        }
    }

    #[test]
    fn best_response_never_loses((s, sigma) in arb_structure()) {
        for i in 0..s.n() {
            for k in 0..s.alphabets()[i].len() {
                let Some(base) = interim_payoff(&s, &sigma, i, k, sigma.bid(i, k)) else { continue };
                let (b, u) = best_response(&s, i, k, &sigma).unwrap();
                let direct = interim_payoff(&s, &sigma, i, k, b).unwrap();
                prop_assert!((u - direct).abs() < 1e-9);
                prop_assert!(u >= base - 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip_is_exact((s, _sigma) in arb_structure()) {
        let text = s.to_json();
        let back = InfoStructure::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        let prior_text = s.prior().to_json();
        prop_assert_eq!(SymmetricPrior::from_json(&prior_text).unwrap().to_json(), prior_text);
    }

    #[test]
    fn mean_preserving_spread_admits_a_coupling(
        atoms in prop::collection::vec((0u32..=20, 1u32..=5), 1..5),
        spread in 1u32..=5,
    ) {
        let total: u32 = atoms.iter().map(|a| a.1).sum();
        let f: Vec<(f64, f64)> = atoms.iter().map(|&(x, w)| (f64::from(x) / 20.0, f64::from(w) / f64::from(total))).collect();
        let d = f64::from(spread) / 100.0;
        let g: Vec<(f64, f64)> = f.iter().flat_map(|&(x, p)| [(x - d, p / 2.0), (x + d, p / 2.0)]).collect();
        // the spread plays the value law and the base law the targets
        let (base, spread) = (DiscreteDist::from_pairs(f), DiscreteDist::from_pairs(g));
        let c = martingale_coupling(&spread, &base).unwrap();
        prop_assert!(c.residuals(&spread, &base).max() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn full_extraction_invariants(values in grid_values(3), w in prop::collection::vec(1u32..=5, 3), k in 4usize..=12) {
        let z: u32 = w.iter().sum();
        let marginal: Vec<f64> = w.iter().map(|&x| f64::from(x) / f64::from(z)).collect();
        let prior = iid_prior(2, values, &marginal).unwrap();
        let s = build_full_extraction(&prior, k, 0.1).unwrap();
        let sigma = StrategyProfile::truthful(&s);
        let st = compute_stats(&prior);
        let p = evaluate(&s, &sigma).unwrap();
        prop_assert!(s.independence_gap() < 1e-9);
        prop_assert!(s.value_marginal_gap() < 1e-9);
        prop_assert!(s.symmetry_gap().unwrap().joint_gap < 1e-9);
        prop_assert!((p.revenue - st.wel_max).abs() < 1e-9);
        // signal ties may misallocate; the loss is bounded by the tie mass
        let tie_bound = p.tie_mass * prior.v_bar() + 1e-9;
        prop_assert!(p.efficiency_gap <= tie_bound);
        prop_assert!(p.bidder_surplus.abs() <= tie_bound);
        let report = verify_bne(&s, &sigma, TOL);
        prop_assert!(report.worst_gain_no_tie <= TOL);
        prop_assert!(report.worst_gain <= report.tie_slack + TOL);
        prop_assert!(s.check_winner_dominance().holds_no_tie());
    }
}
