//! Exact payoff evaluation and Bayes-Nash / strict equilibrium audits for
//! second-price auctions with uniform tie-breaking.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::prior::compute_stats;
use crate::structure::InfoStructure;
use crate::util::{argmax_set, secmax};

/// Default BNE tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Payoff differences below this count as ties when picking best responses.
const PAYOFF_TIE: f64 = 1e-12;

/// Maximum witnesses kept in a report.
const WITNESS_CAP: usize = 64;

/// Pure strategy per bidder: the bid at each signal atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyProfile {
    bids: Vec<Vec<f64>>,
}

/// A bid that exceeds every value in the posterior support at that signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overbid {
    pub bidder: usize,
    pub signal: usize,
    pub bid: f64,
    pub max_value: f64,
}

impl StrategyProfile {
    /// Bid the atom: the signal itself for numeric alphabets, the prescribed bid for labeled ones.
    pub fn truthful(structure: &InfoStructure) -> Self {
        StrategyProfile { bids: structure.alphabets().iter().map(|a| a.atoms().to_vec()).collect() }
    }

    /// Explicit bids; shapes and range are checked against the structure.
    pub fn from_bids(structure: &InfoStructure, bids: Vec<Vec<f64>>) -> Result<Self> {
        let v_bar = structure.prior().v_bar();
        if bids.len() != structure.n() {
            return Err(Error::InvalidParameter("one bid vector per bidder required".into()));
        }
        for (i, (b, a)) in bids.iter().zip(structure.alphabets()).enumerate() {
            if b.len() != a.len() {
                return Err(Error::UndefinedSignal { bidder: i, signal: b.len().min(a.len()) });
            }
            if b.iter().any(|x| !x.is_finite() || *x < 0.0 || *x > v_bar) {
                return Err(Error::InvalidParameter(format!("bidder {i} bids outside [0, {v_bar}]")));
            }
        }
        Ok(StrategyProfile { bids })
    }

    pub fn bid(&self, bidder: usize, signal: usize) -> f64 {
        self.bids[bidder][signal]
    }

    pub fn bids(&self) -> &[Vec<f64>] {
        &self.bids
    }

    /// Bids exceeding the largest value in the bidder's posterior support.
    pub fn overbids(&self, structure: &InfoStructure) -> Vec<Overbid> {
        let mut max_value: Vec<Vec<f64>> =
            structure.alphabets().iter().map(|a| vec![f64::NEG_INFINITY; a.len()]).collect();
        for e in structure.entries() {
            let s = structure.signal_profile(e.s);
            let v = structure.values_of(e.v);
            for i in 0..structure.n() {
                max_value[i][s[i]] = max_value[i][s[i]].max(v[i]);
            }
        }
        let mut out = Vec::new();
        for (i, row) in max_value.iter().enumerate() {
            for (k, &m) in row.iter().enumerate() {
                if m > f64::NEG_INFINITY && self.bids[i][k] > m {
                    out.push(Overbid { bidder: i, signal: k, bid: self.bids[i][k], max_value: m });
                }
            }
        }
        out
    }
}

/// Ex ante payoffs under a strategy profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffPoint {
    pub revenue: f64,
    /// Total bidder surplus.
    pub bidder_surplus: f64,
    pub per_bidder: Vec<f64>,
    pub welfare: f64,
    /// `wel_max - welfare`.
    pub efficiency_gap: f64,
    /// Probability that the highest bid is tied.
    pub tie_mass: f64,
}

/// Exact expected payoffs, with shares `1 / |argmax b|` for top bidders.
pub fn evaluate(structure: &InfoStructure, sigma: &StrategyProfile) -> Result<PayoffPoint> {
    check_defined(structure, sigma)?;
    let n = structure.n();
    let mut per_bidder = vec![0.0; n];
    let (mut revenue, mut welfare, mut tie_mass) = (0.0, 0.0, 0.0);
    for group in structure.groups() {
        let s = structure.signal_profile(group[0].s);
        let bids: Vec<f64> = (0..n).map(|i| sigma.bid(i, s[i])).collect();
        let top = argmax_set(&bids);
        let price = secmax(&bids);
        let share = 1.0 / top.len() as f64;
        for e in group {
            let v = structure.values_of(e.v);
            revenue += e.p * price;
            for &w in &top {
                per_bidder[w] += e.p * share * (v[w] - price);
                welfare += e.p * share * v[w];
            }
            if top.len() > 1 {
                tie_mass += e.p;
            }
        }
    }
    let wel_max = compute_stats(structure.prior()).wel_max;
    Ok(PayoffPoint {
        revenue,
        bidder_surplus: per_bidder.iter().sum(),
        per_bidder,
        welfare,
        efficiency_gap: wel_max - welfare,
        tie_mass,
    })
}

fn check_defined(structure: &InfoStructure, sigma: &StrategyProfile) -> Result<()> {
    for (i, a) in structure.alphabets().iter().enumerate() {
        if sigma.bids.get(i).map(Vec::len) != Some(a.len()) {
            return Err(Error::UndefinedSignal { bidder: i, signal: 0 });
        }
    }
    Ok(())
}

/// Signal-marginal support of bidder `j`.
fn reachable_signals(structure: &InfoStructure, j: usize) -> Vec<usize> {
    structure.signal_marginal(j).iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(k, _)| k).collect()
}

/// `{0} ∪ R ∪ midpoints(R)` where `R` holds the opponents' reachable bids and `v̄`.
pub fn deviation_bid_set(structure: &InfoStructure, sigma: &StrategyProfile, i: usize) -> Vec<f64> {
    let v_bar = structure.prior().v_bar();
    let mut reach: Vec<f64> = (0..structure.n())
        .filter(|&j| j != i)
        .flat_map(|j| reachable_signals(structure, j).into_iter().map(move |k| (j, k)))
        .map(|(j, k)| sigma.bid(j, k))
        .chain(std::iter::once(v_bar))
        .collect();
    reach.sort_by(f64::total_cmp);
    reach.dedup();
    let mut out = vec![0.0];
    out.extend(reach.iter().copied());
    out.extend(reach.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Opponent summary of one signal profile from bidder `i`'s perspective.
#[derive(Debug, Clone, Copy)]
struct Event {
    /// Highest opponent bid.
    top: f64,
    /// Opponents bidding `top`.
    count: usize,
    /// Probability.
    p: f64,
    /// `E[v_i 1{s}]`.
    ev: f64,
    /// The prescribed bid profile has a tied top.
    tie: bool,
}

impl Event {
    /// Share and payment mass for own bid `b`.
    fn value(&self, b: f64) -> (f64, f64) {
        let share = if b > self.top {
            1.0
        } else if b == self.top {
            1.0 / (self.count + 1) as f64
        } else {
            0.0
        };
        (share, share * (self.ev - self.top * self.p))
    }
}

/// Interim payoff split by event type.
#[derive(Debug, Clone, Copy, Default)]
struct Split {
    no_tie: f64,
    tie: f64,
}

impl Split {
    fn total(&self) -> f64 {
        self.no_tie + self.tie
    }
}

fn payoff(events: &[Event], b: f64, mass: f64) -> Split {
    let mut out = Split::default();
    for e in events {
        let (_, u) = e.value(b);
        if e.tie {
            out.tie += u;
        } else {
            out.no_tie += u;
        }
    }
    out.no_tie /= mass;
    out.tie /= mass;
    out
}

/// Whether bid `b` changes bidder `i`'s share relative to `b0` on some event of the given kind.
fn changes_allocation(events: &[Event], b: f64, b0: f64, tie_events: bool) -> bool {
    events.iter().filter(|e| e.tie == tie_events && e.p > 0.0).any(|e| e.value(b).0 != e.value(b0).0)
}

/// Events grouped by bidder `i`'s signal.
fn events_for(structure: &InfoStructure, sigma: &StrategyProfile, i: usize) -> Vec<Vec<Event>> {
    let n = structure.n();
    let vals = structure.prior().values();
    let mut out: Vec<Vec<Event>> = vec![Vec::new(); structure.alphabets()[i].len()];
    for group in structure.groups() {
        let s = structure.signal_profile(group[0].s);
        let bids: Vec<f64> = (0..n).map(|j| sigma.bid(j, s[j])).collect();
        let tie = argmax_set(&bids).len() > 1;
        let mut top = f64::NEG_INFINITY;
        let mut count = 0;
        for (j, &b) in bids.iter().enumerate() {
            if j == i {
                continue;
            }
            if b > top {
                top = b;
                count = 1;
            } else if b == top {
                count += 1;
            }
        }
        let (mut p, mut ev) = (0.0, 0.0);
        for e in group {
            p += e.p;
            ev += e.p * vals[structure.value_profile(e.v)[i]];
        }
        out[s[i]].push(Event { top, count, p, ev, tie });
    }
    out
}

/// One (bidder, signal) row of an equilibrium audit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub bidder: usize,
    pub signal: usize,
    pub label: String,
    pub prob: f64,
    pub bid: f64,
    /// Interim payoff of the prescribed bid.
    pub payoff: f64,
    pub best_deviation: f64,
    pub best_payoff: f64,
    /// Largest deviation gain over the full payoff.
    pub gain: f64,
    /// Largest deviation gain on no-tie events only.
    pub gain_no_tie: f64,
    /// Largest absolute change of the tie-event payoff over deviations.
    pub tie_slack: f64,
    /// Smallest no-tie loss over deviations that change the no-tie allocation.
    pub strict_margin: Option<f64>,
    /// Smallest full-payoff loss over deviations that change the allocation on any event.
    pub strict_margin_all: Option<f64>,
}

/// A profitable deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub bidder: usize,
    pub signal: usize,
    pub deviation: f64,
    pub gain: f64,
}

/// Result of [`verify_bne`] / [`verify_strict`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub tol: f64,
    pub is_bne: bool,
    /// Every deviation that changes the allocation on no-tie events loses at least `tol` there.
    pub is_strict: bool,
    /// Same certificate over all events with full payoffs.
    pub is_strict_all_events: bool,
    pub worst_gain: f64,
    pub worst_gain_no_tie: f64,
    /// Largest change in tie-event payoff any deviation can cause.
    pub tie_slack: f64,
    pub strict_margin: f64,
    pub strict_margin_all_events: f64,
    pub witnesses: Vec<Witness>,
    pub rows: Vec<AuditRow>,
}

fn audit_row(
    structure: &InfoStructure,
    sigma: &StrategyProfile,
    i: usize,
    k: usize,
    events: &[Event],
    deviations: &[f64],
) -> (AuditRow, Vec<Witness>, f64) {
    let mass: f64 = events.iter().map(|e| e.p).sum();
    let b0 = sigma.bid(i, k);
    let base = payoff(events, b0, mass);
    let mut row = AuditRow {
        bidder: i,
        signal: k,
        label: structure.alphabets()[i].label(k),
        prob: mass,
        bid: b0,
        payoff: base.total(),
        best_deviation: b0,
        best_payoff: base.total(),
        gain: 0.0,
        gain_no_tie: 0.0,
        tie_slack: 0.0,
        strict_margin: None,
        strict_margin_all: None,
    };
    let mut witnesses = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for &d in deviations {
        let u = payoff(events, d, mass);
        let gain = u.total() - base.total();
        worst = worst.max(gain);
        row.gain = row.gain.max(gain);
        row.gain_no_tie = row.gain_no_tie.max(u.no_tie - base.no_tie);
        row.tie_slack = row.tie_slack.max((u.tie - base.tie).abs());
        if u.total() > row.best_payoff + PAYOFF_TIE {
            row.best_payoff = u.total();
            row.best_deviation = d;
        }
        if changes_allocation(events, d, b0, false) {
            let m = base.no_tie - u.no_tie;
            row.strict_margin = Some(row.strict_margin.map_or(m, |x: f64| x.min(m)));
        }
        if changes_allocation(events, d, b0, false) || changes_allocation(events, d, b0, true) {
            let m = base.total() - u.total();
            row.strict_margin_all = Some(row.strict_margin_all.map_or(m, |x: f64| x.min(m)));
        }
        if gain > 0.0 {
            witnesses.push(Witness { bidder: i, signal: k, deviation: d, gain });
        }
    }
    (row, witnesses, worst)
}

/// Audit every positive-probability (bidder, signal) against the deviation bid set.
pub fn verify_bne(structure: &InfoStructure, sigma: &StrategyProfile, tol: f64) -> EquilibriumReport {
    let n = structure.n();
    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..n {
        let deviations = deviation_bid_set(structure, sigma, i);
        let events = events_for(structure, sigma, i);
        let results: Vec<_> = events
            .par_iter()
            .enumerate()
            .filter(|(_, ev)| !ev.is_empty())
            .map(|(k, ev)| audit_row(structure, sigma, i, k, ev, &deviations))
            .collect();
        for (row, w, _) in results {
            rows.push(row);
            witnesses.extend(w.into_iter().filter(|w| w.gain > tol));
        }
    }
    witnesses.sort_by(|a, b| b.gain.total_cmp(&a.gain));
    witnesses.truncate(WITNESS_CAP);
    let worst_gain = rows.iter().map(|r| r.gain).fold(0.0, f64::max);
    let worst_gain_no_tie = rows.iter().map(|r| r.gain_no_tie).fold(0.0, f64::max);
    let tie_slack = rows.iter().map(|r| r.tie_slack).fold(0.0, f64::max);
    let strict_margin = rows.iter().filter_map(|r| r.strict_margin).fold(f64::INFINITY, f64::min);
    let strict_margin_all_events = rows.iter().filter_map(|r| r.strict_margin_all).fold(f64::INFINITY, f64::min);
    let is_bne = worst_gain <= tol;
    EquilibriumReport {
        tol,
        is_bne,
        is_strict: is_bne && strict_margin >= tol,
        is_strict_all_events: is_bne && strict_margin_all_events >= tol,
        worst_gain,
        worst_gain_no_tie,
        tie_slack,
        strict_margin,
        strict_margin_all_events,
        witnesses,
        rows,
    }
}

/// Same audit; the strictness fields carry the certificate.
pub fn verify_strict(structure: &InfoStructure, sigma: &StrategyProfile, tol: f64) -> EquilibriumReport {
    verify_bne(structure, sigma, tol)
}

/// Best bid for bidder `i` at signal `k` against `sigma`'s opponents, preferring
/// the prescribed bid on ties, else the lowest maximizer.
pub fn best_response(structure: &InfoStructure, i: usize, k: usize, sigma: &StrategyProfile) -> Result<(f64, f64)> {
    let events = events_for(structure, sigma, i);
    let ev = events.get(k).filter(|e| !e.is_empty()).ok_or_else(|| Error::ZeroProbabilitySignal(vec![i, k]))?;
    let mass: f64 = ev.iter().map(|e| e.p).sum();
    let b0 = sigma.bid(i, k);
    let prescribed = payoff(ev, b0, mass).total();
    let deviations = deviation_bid_set(structure, sigma, i);
    let (mut best_bid, mut best) = (b0, prescribed);
    for &d in &deviations {
        let u = payoff(ev, d, mass).total();
        if u > best + PAYOFF_TIE {
            best = u;
            best_bid = d;
        }
    }
    if prescribed >= best - PAYOFF_TIE {
        return Ok((b0, prescribed));
    }
    // lowest maximizer
    for &d in &deviations {
        let u = payoff(ev, d, mass).total();
        if u >= best - PAYOFF_TIE {
            return Ok((d, u));
        }
    }
    Ok((best_bid, best))
}

/// Independent re-enumeration used to cross-check the audit.
pub mod oracle {
    use super::*;

    /// Outcome of the brute-force check.
    #[derive(Debug, Clone, PartialEq, Serialize)]
    pub struct BruteForce {
        pub is_bne: bool,
        pub worst_gain: f64,
    }

    /// Loop deviation-first over raw joint entries, recomputing the auction from scratch.
    pub fn brute_force_bne(structure: &InfoStructure, sigma: &StrategyProfile, tol: f64) -> BruteForce {
        let n = structure.n();
        let mut worst: f64 = 0.0;
        for i in (0..n).rev() {
            let devs = deviation_bid_set(structure, sigma, i);
            let k_count = structure.alphabets()[i].len();
            for k in (0..k_count).rev() {
                let rows: Vec<(Vec<f64>, Vec<f64>, f64)> = structure
                    .entries()
                    .iter()
                    .filter_map(|e| {
                        let s = structure.signal_profile(e.s);
                        (s[i] == k).then(|| {
                            let bids: Vec<f64> = (0..n).map(|j| sigma.bid(j, s[j])).collect();
                            (bids, structure.values_of(e.v), e.p)
                        })
                    })
                    .collect();
                if rows.is_empty() {
                    continue;
                }
                let utility = |b: f64| -> f64 {
                    let mut u = 0.0;
                    for (bids, v, p) in &rows {
                        let mut bids = bids.clone();
                        bids[i] = b;
                        let top = argmax_set(&bids);
                        if top.contains(&i) {
                            u += p * (v[i] - secmax(&bids)) / top.len() as f64;
                        }
                    }
                    u
                };
                let mass: f64 = rows.iter().map(|r| r.2).sum();
                let base = utility(sigma.bid(i, k));
                for &d in devs.iter().rev() {
                    worst = worst.max((utility(d) - base) / mass);
                }
            }
        }
        BruteForce { is_bne: worst <= tol, worst_gain: worst }
    }
}

/// Monte-Carlo estimate of revenue and total bidder surplus from `samples` draws.
pub fn monte_carlo(structure: &InfoStructure, sigma: &StrategyProfile, samples: usize, seed: u64) -> (f64, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let entries = structure.entries();
    let mut cdf = Vec::with_capacity(entries.len());
    let mut acc = 0.0;
    for e in entries {
        acc += e.p;
        cdf.push(acc);
    }
    let n = structure.n();
    let (mut rev, mut bs) = (0.0, 0.0);
    for _ in 0..samples {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c < u).min(entries.len() - 1);
        let e = entries[idx];
        let s = structure.signal_profile(e.s);
        let v = structure.values_of(e.v);
        let bids: Vec<f64> = (0..n).map(|j| sigma.bid(j, s[j])).collect();
        let top = argmax_set(&bids);
        let price = secmax(&bids);
        rev += price;
        for &w in &top {
            bs += (v[w] - price) / top.len() as f64;
        }
    }
    (rev / samples as f64, bs / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structure::{Alphabet, JointBuilder};

    #[test]
    fn fully_revealing_payoffs() {
        let s = fixtures::fully_revealing(&fixtures::p1());
        let p = evaluate(&s, &StrategyProfile::truthful(&s)).unwrap();
        assert!((p.revenue - 0.25).abs() < 1e-15);
        assert!((p.bidder_surplus - 0.5).abs() < 1e-15);
        assert!((p.welfare - 0.75).abs() < 1e-15);
        assert!((p.revenue + p.bidder_surplus - p.welfare).abs() < 1e-15);
    }

    #[test]
    fn zero_bids_payoffs() {
        let s = fixtures::fully_revealing(&fixtures::iid_three_point(2));
        let zero = StrategyProfile::from_bids(&s, vec![vec![0.0; 3]; 2]).unwrap();
        let p = evaluate(&s, &zero).unwrap();
        assert_eq!(p.revenue, 0.0);
        assert!((p.welfare - 0.5).abs() < 1e-15);
        assert!((p.tie_mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deviation_set_examples() {
        // two bidders, bidder 1 bids in {0.2, 0.6}
        let prior = fixtures::p1();
        let g0 = Alphabet::numeric(vec![0.0]).unwrap();
        let g1 = Alphabet::numeric(vec![0.2, 0.6]).unwrap();
        let mut b = JointBuilder::new(&prior, vec![g0, g1]).unwrap();
        for (v, p) in prior.support() {
            b.add(v, &[0, v[1]], *p);
        }
        let s = b.finish().unwrap();
        let d = deviation_bid_set(&s, &StrategyProfile::truthful(&s), 0);
        let expect = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        assert_eq!(d.len(), expect.len());
        for (a, b) in d.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let c = fixtures::constant_signal(&prior);
        assert_eq!(deviation_bid_set(&c, &StrategyProfile::truthful(&c), 0), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn fully_revealing_is_bne_but_ties_are_neutral() {
        let s = fixtures::fully_revealing(&fixtures::p1());
        let sigma = StrategyProfile::truthful(&s);
        let r = verify_bne(&s, &sigma, DEFAULT_TOL);
        assert!(r.is_bne);
        assert!(!r.is_strict_all_events);
        assert!(r.witnesses.is_empty());
        assert_eq!(oracle::brute_force_bne(&s, &sigma, DEFAULT_TOL).is_bne, r.is_bne);
        let (b, _) = best_response(&s, 0, 1, &sigma).unwrap();
        assert_eq!(b, 1.0);
    }

    #[test]
    fn profitable_deviation_detected() {
        // everyone bids 0 under full revelation: a bidder with value 1 gains by bidding up
        let s = fixtures::fully_revealing(&fixtures::p1());
        let zero = StrategyProfile::from_bids(&s, vec![vec![0.0, 0.0]; 2]).unwrap();
        let r = verify_bne(&s, &zero, DEFAULT_TOL);
        assert!(!r.is_bne);
        assert!(r.witnesses.iter().any(|w| w.signal == 1));
        let o = oracle::brute_force_bne(&s, &zero, DEFAULT_TOL);
        assert!(!o.is_bne);
        assert!((o.worst_gain - r.worst_gain).abs() < 1e-12);
    }

    #[test]
    fn overbid_detection() {
        let s = fixtures::fully_revealing(&fixtures::p1());
        let high = StrategyProfile::from_bids(&s, vec![vec![1.0, 1.0]; 2]).unwrap();
        let o = high.overbids(&s);
        assert_eq!(o.len(), 2);
        assert!(StrategyProfile::truthful(&s).overbids(&s).is_empty());
    }

    #[test]
    fn monte_carlo_close_to_exact() {
        let s = fixtures::fully_revealing(&fixtures::p1());
        let sigma = StrategyProfile::truthful(&s);
        let (rev, bs) = monte_carlo(&s, &sigma, 20000, 7);
        assert!((rev - 0.25).abs() < 0.02);
        assert!((bs - 0.5).abs() < 0.02);
    }
}
