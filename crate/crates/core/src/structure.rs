//! Discrete information structures and the structural predicates evaluated on them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prior::{PriorFile, SymmetricPrior};
use crate::util::{argmax_set, decode, encode, permutations, permute, secmax};

/// Tolerance for joint-law invariants.
pub const JOINT_TOL: f64 = 1e-10;

/// Maximum number of violating profiles kept per report list.
const EXAMPLE_CAP: usize = 64;

/// One bidder's signal alphabet.
///
/// Numeric alphabets are strictly ascending reals in `[0, v̄]` and bidders bid
/// their signal by default. Labeled alphabets carry a symbolic name per atom;
/// the stored reals are the prescribed bids, which need not be distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    atoms: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    /// Numeric grid; checked against `v_bar` when attached to a structure.
    pub fn numeric(atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidStructure("empty signal grid".into()));
        }
        if atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStructure(format!("grid not strictly ascending: {atoms:?}")));
        }
        Ok(Alphabet { atoms, labels: None })
    }

    /// Symbolic alphabet with the bid prescribed at each label.
    pub fn labeled(labels: Vec<String>, bids: Vec<f64>) -> Result<Self> {
        if labels.is_empty() || labels.len() != bids.len() {
            return Err(Error::InvalidStructure("labels and bids must be nonempty and aligned".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !labels.iter().all(|l| seen.insert(l.clone())) {
            return Err(Error::InvalidStructure("duplicate signal label".into()));
        }
        Ok(Alphabet { atoms: bids, labels: Some(labels) })
    }

    /// Atom reals: signal values for numeric alphabets, prescribed bids for labeled ones.
    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_numeric(&self) -> bool {
        self.labels.is_none()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Human-readable name of atom `k`.
    pub fn label(&self, k: usize) -> String {
        match &self.labels {
            Some(l) => l[k].clone(),
            None => format!("{}", self.atoms[k]),
        }
    }
}

/// One cell of the sparse joint law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointEntry {
    /// Signal-profile id (mixed radix over alphabet sizes).
    pub s: u32,
    /// Value-profile id (mixed radix over the value set).
    pub v: u32,
    pub p: f64,
}

/// Provenance block recorded with a built structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub kind: String,
    pub params: serde_json::Value,
}

/// Finite information structure: per-bidder alphabets and a sparse joint law
/// over (value profile, signal profile).
#[derive(Debug, Clone, PartialEq)]
pub struct InfoStructure {
    prior: SymmetricPrior,
    alphabets: Vec<Alphabet>,
    radices: Vec<usize>,
    entries: Vec<JointEntry>,
    construction: Option<Construction>,
}

/// Accumulates joint mass before validation.
#[derive(Debug)]
pub struct JointBuilder {
    prior: SymmetricPrior,
    alphabets: Vec<Alphabet>,
    radices: Vec<usize>,
    value_radices: Vec<usize>,
    cells: Vec<JointEntry>,
}

impl JointBuilder {
    pub fn new(prior: &SymmetricPrior, alphabets: Vec<Alphabet>) -> Result<Self> {
        if alphabets.len() != prior.n() {
            return Err(Error::InvalidStructure(format!("{} alphabets for {} bidders", alphabets.len(), prior.n())));
        }
        let radices: Vec<usize> = alphabets.iter().map(Alphabet::len).collect();
        let total: f64 = radices.iter().map(|&r| r as f64).product();
        if total > u32::MAX as f64 {
            return Err(Error::InvalidStructure("too many signal profiles".into()));
        }
        Ok(JointBuilder {
            value_radices: vec![prior.values().len(); prior.n()],
            prior: prior.clone(),
            alphabets,
            radices,
            cells: Vec::new(),
        })
    }

    /// Signal-profile id for per-bidder atom indices.
    pub fn signal_id(&self, s: &[usize]) -> u32 {
        encode(s, &self.radices) as u32
    }

    /// Value-profile id for index profiles.
    pub fn value_id(&self, v: &[usize]) -> u32 {
        encode(v, &self.value_radices) as u32
    }

    /// Add mass to a cell given as index profiles.
    pub fn add(&mut self, v: &[usize], s: &[usize], p: f64) {
        if p > 0.0 {
            let cell = JointEntry { s: self.signal_id(s), v: self.value_id(v), p };
            self.cells.push(cell);
        }
    }

    /// Add mass to a cell given as ids.
    pub fn add_ids(&mut self, v: u32, s: u32, p: f64) {
        if p > 0.0 {
            self.cells.push(JointEntry { s, v, p });
        }
    }

    /// Merge duplicate cells and validate the structure.
    pub fn finish(mut self) -> Result<InfoStructure> {
        self.cells.sort_by_key(|a| (a.s, a.v));
        let mut merged: Vec<JointEntry> = Vec::with_capacity(self.cells.len());
        for c in self.cells {
            match merged.last_mut() {
                Some(last) if last.s == c.s && last.v == c.v => last.p += c.p,
                _ => merged.push(c),
            }
        }
        InfoStructure::from_parts(self.prior, self.alphabets, merged)
    }
}

impl InfoStructure {
    /// Assemble from sorted, merged entries and validate every invariant.
    pub fn from_parts(prior: SymmetricPrior, alphabets: Vec<Alphabet>, entries: Vec<JointEntry>) -> Result<Self> {
        let radices = alphabets.iter().map(Alphabet::len).collect();
        let s = InfoStructure { prior, alphabets, radices, entries, construction: None };
        s.validate()?;
        Ok(s)
    }

    /// Check alphabets, normalization, value marginal and support containment.
    pub fn validate(&self) -> Result<()> {
        let v_bar = self.prior.v_bar();
        if self.alphabets.len() != self.prior.n() {
            return Err(Error::InvalidStructure("alphabet count differs from bidder count".into()));
        }
        for (i, a) in self.alphabets.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidStructure(format!("bidder {i} has an empty alphabet")));
            }
            if a.atoms().iter().any(|x| !x.is_finite() || *x < 0.0 || *x > v_bar) {
                return Err(Error::InvalidStructure(format!("bidder {i} has atoms outside [0, {v_bar}]")));
            }
            if a.is_numeric() && a.atoms().windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!("bidder {i} grid not strictly ascending")));
            }
        }
        let n_signal: u64 = self.radices.iter().map(|&r| r as u64).product();
        let n_value = (self.prior.values().len() as u64).pow(self.prior.n() as u32);
        let mut total = 0.0;
        let mut marginal: HashMap<u32, f64> = HashMap::new();
        for (k, e) in self.entries.iter().enumerate() {
            if e.s as u64 >= n_signal || e.v as u64 >= n_value {
                return Err(Error::InvalidStructure(format!("entry {k} references a missing atom")));
            }
            if !(e.p > 0.0) || !e.p.is_finite() {
                return Err(Error::InvalidStructure(format!("entry {k} has probability {}", e.p)));
            }
            if k > 0 && (self.entries[k - 1].s, self.entries[k - 1].v) >= (e.s, e.v) {
                return Err(Error::InvalidStructure("entries not sorted and unique".into()));
            }
            total += e.p;
            *marginal.entry(e.v).or_insert(0.0) += e.p;
        }
        if (total - 1.0).abs() > JOINT_TOL {
            return Err(Error::InvalidStructure(format!("joint sums to {total}")));
        }
        for (&v, &p) in &marginal {
            let profile = self.prior.profile_from_id(v as u64);
            let q = self.prior.prob(&profile);
            if q == 0.0 {
                return Err(Error::InvalidStructure(format!("value profile {profile:?} outside prior support")));
            }
            if (p - q).abs() > JOINT_TOL {
                return Err(Error::InvalidStructure(format!("value marginal at {profile:?} is {p}, prior has {q}")));
            }
        }
        for (profile, q) in self.prior.support() {
            let id = self.prior.profile_id(profile) as u32;
            if !marginal.contains_key(&id) && *q > JOINT_TOL {
                return Err(Error::InvalidStructure(format!("prior profile {profile:?} missing from joint")));
            }
        }
        Ok(())
    }

    /// Attach a provenance block.
    pub fn with_construction(mut self, kind: &str, params: serde_json::Value) -> Self {
        self.construction = Some(Construction { kind: kind.to_string(), params });
        self
    }

    pub fn construction(&self) -> Option<&Construction> {
        self.construction.as_ref()
    }

    pub fn n(&self) -> usize {
        self.prior.n()
    }

    pub fn prior(&self) -> &SymmetricPrior {
        &self.prior
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn entries(&self) -> &[JointEntry] {
        &self.entries
    }

    /// Alphabet sizes, the radices of signal-profile ids.
    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn num_signal_profiles(&self) -> u64 {
        self.radices.iter().map(|&r| r as u64).product()
    }

    pub fn signal_id(&self, s: &[usize]) -> u32 {
        encode(s, &self.radices) as u32
    }

    pub fn signal_profile(&self, id: u32) -> Vec<usize> {
        decode(id as u64, &self.radices)
    }

    /// Atom reals of a signal profile.
    pub fn signal_values(&self, s: &[usize]) -> Vec<f64> {
        s.iter().enumerate().map(|(i, &k)| self.alphabets[i].atoms()[k]).collect()
    }

    /// Index profile of a value-profile id.
    pub fn value_profile(&self, id: u32) -> Vec<usize> {
        self.prior.profile_from_id(id as u64)
    }

    /// Real values of a value-profile id.
    pub fn values_of(&self, id: u32) -> Vec<f64> {
        self.prior.value_profile(&self.value_profile(id))
    }

    /// Consecutive entry ranges sharing a signal profile.
    pub fn groups(&self) -> impl Iterator<Item = &[JointEntry]> {
        self.entries.chunk_by(|a, b| a.s == b.s)
    }

    /// Entries for one signal profile.
    pub fn entries_for(&self, s_id: u32) -> &[JointEntry] {
        let lo = self.entries.partition_point(|e| e.s < s_id);
        let hi = self.entries.partition_point(|e| e.s <= s_id);
        &self.entries[lo..hi]
    }

    /// Law of the signal profile as `(id, probability)` pairs in id order.
    pub fn signal_law(&self) -> Vec<(u32, f64)> {
        self.groups().map(|g| (g[0].s, g.iter().map(|e| e.p).sum())).collect()
    }

    /// Exact marginal of bidder `i`'s signal.
    pub fn signal_marginal(&self, i: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.radices[i]];
        for e in &self.entries {
            m[self.signal_profile(e.s)[i]] += e.p;
        }
        m
    }

    /// Largest deviation of the signal law from the product of its marginals,
    /// over every signal profile.
    pub fn independence_gap(&self) -> f64 {
        let marginals: Vec<Vec<f64>> = (0..self.n()).map(|i| self.signal_marginal(i)).collect();
        let law = self.signal_law();
        let mut gap: f64 = 0.0;
        let mut next = law.iter().peekable();
        for id in 0..self.num_signal_profiles() as u32 {
            let s = self.signal_profile(id);
            let prod: f64 = s.iter().enumerate().map(|(i, &k)| marginals[i][k]).product();
            let p = match next.peek() {
                Some(&&(sid, p)) if sid == id => {
                    next.next();
                    p
                }
                _ => 0.0,
            };
            gap = gap.max((p - prod).abs());
        }
        gap
    }

    /// Permutation-invariance gap and marginal deviation from uniform.
    pub fn symmetry_gap(&self) -> Result<SymmetryGap> {
        let first = &self.alphabets[0];
        if self.alphabets.iter().any(|a| !a.is_numeric() || a.atoms() != first.atoms()) {
            return Err(Error::GridsDiffer);
        }
        let lookup: HashMap<(u32, u32), f64> = self.entries.iter().map(|e| ((e.s, e.v), e.p)).collect();
        let perms = permutations(self.n());
        let mut joint_gap: f64 = 0.0;
        for e in &self.entries {
            let s = self.signal_profile(e.s);
            let v = self.value_profile(e.v);
            for perm in &perms {
                let ps = self.signal_id(&permute(&s, perm));
                let pv = self.prior.profile_id(&permute(&v, perm)) as u32;
                let q = lookup.get(&(ps, pv)).copied().unwrap_or(0.0);
                joint_gap = joint_gap.max((e.p - q).abs());
            }
        }
        let k = first.len() as f64;
        let marginal_gap =
            (0..self.n()).flat_map(|i| self.signal_marginal(i)).fold(0.0_f64, |acc, p| acc.max((p - 1.0 / k).abs()));
        Ok(SymmetryGap { joint_gap, marginal_gap })
    }

    /// Posterior over value profiles given a positive-probability signal profile.
    pub fn posterior(&self, s: &[usize]) -> Result<PosteriorBelief> {
        self.check_signal(s)?;
        let group = self.entries_for(self.signal_id(s));
        let total: f64 = group.iter().map(|e| e.p).sum();
        if group.is_empty() || total <= 0.0 {
            return Err(Error::ZeroProbabilitySignal(s.to_vec()));
        }
        Ok(PosteriorBelief {
            signal: s.to_vec(),
            dist: group.iter().map(|e| (self.value_profile(e.v), e.p / total)).collect(),
        })
    }

    /// Posterior mean of bidder `i`'s value.
    pub fn interim_value(&self, s: &[usize], i: usize) -> Result<f64> {
        let post = self.posterior(s)?;
        let vals = self.prior.values();
        Ok(post.dist.iter().map(|(v, p)| p * vals[v[i]]).sum())
    }

    fn check_signal(&self, s: &[usize]) -> Result<()> {
        if s.len() != self.n() || s.iter().zip(&self.radices).any(|(&k, &r)| k >= r) {
            return Err(Error::InvalidParameter(format!("signal profile {s:?} out of range")));
        }
        Ok(())
    }

    /// Mass of signal profiles whose top atom is shared by two or more bidders.
    pub fn tie_mass(&self) -> f64 {
        self.groups()
            .filter(|g| argmax_set(&self.signal_values(&self.signal_profile(g[0].s))).len() > 1)
            .map(|g| g.iter().map(|e| e.p).sum::<f64>())
            .sum()
    }

    /// Posterior means of all bidders for one group of entries.
    fn group_means(&self, group: &[JointEntry]) -> (f64, Vec<f64>) {
        let vals = self.prior.values();
        let mut total = 0.0;
        let mut means = vec![0.0; self.n()];
        for e in group {
            total += e.p;
            for (m, &k) in means.iter_mut().zip(&self.value_profile(e.v)) {
                *m += e.p * vals[k];
            }
        }
        for m in &mut means {
            *m /= total;
        }
        (total, means)
    }

    /// Every top-signal bidder holds the highest value in every posterior state.
    pub fn check_winner_dominance(&self) -> PredicateReport {
        let mut report = PredicateReport::new("winner_dominance");
        for group in self.groups() {
            let s = self.signal_profile(group[0].s);
            let top = argmax_set(&self.signal_values(&s));
            let mut worst: f64 = 0.0;
            for e in group {
                let v = self.values_of(e.v);
                let vmax = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                for &w in &top {
                    worst = worst.max(vmax - v[w]);
                }
            }
            report.record(s, top.len() > 1, worst, 0.0);
        }
        report
    }

    /// Each top-signal bidder's posterior mean equals the second-highest signal.
    pub fn check_no_rent_winner(&self, tol: f64) -> PredicateReport {
        let mut report = PredicateReport::new("no_rent_winner");
        for group in self.groups() {
            let s = self.signal_profile(group[0].s);
            let sv = self.signal_values(&s);
            let top = argmax_set(&sv);
            let (_, means) = self.group_means(group);
            let sec = secmax(&sv);
            let worst = top.iter().map(|&w| (means[w] - sec).abs()).fold(0.0, f64::max);
            report.record(s, top.len() > 1, worst, tol);
        }
        report
    }

    /// Every bidder below the top signal has posterior mean at most the second-highest signal.
    pub fn check_loser_bound(&self, tol: f64) -> PredicateReport {
        let mut report = PredicateReport::new("loser_bound");
        for group in self.groups() {
            let s = self.signal_profile(group[0].s);
            let sv = self.signal_values(&s);
            let top = argmax_set(&sv);
            let (_, means) = self.group_means(group);
            let sec = secmax(&sv);
            let worst = (0..self.n()).filter(|j| !top.contains(j)).map(|j| means[j] - sec).fold(0.0, f64::max);
            report.record(s, top.len() > 1, worst, tol);
        }
        report
    }

    /// Largest atom-wise gap between the joint's value marginal and the prior.
    pub fn value_marginal_gap(&self) -> f64 {
        let mut marginal: HashMap<u32, f64> = HashMap::new();
        for e in &self.entries {
            *marginal.entry(e.v).or_insert(0.0) += e.p;
        }
        self.prior
            .support()
            .iter()
            .map(|(profile, q)| {
                let id = self.prior.profile_id(profile) as u32;
                (marginal.get(&id).copied().unwrap_or(0.0) - q).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Gap between the P(s)-average of posteriors and the prior.
    pub fn bayes_plausibility_gap(&self) -> f64 {
        let mut avg: HashMap<Vec<usize>, f64> = HashMap::new();
        for group in self.groups() {
            let s = self.signal_profile(group[0].s);
            let post = self.posterior(&s).expect("positive-probability group");
            let ps: f64 = group.iter().map(|e| e.p).sum();
            for (v, p) in post.dist {
                *avg.entry(v).or_insert(0.0) += ps * p;
            }
        }
        self.prior.support().iter().map(|(v, q)| (avg.get(v).copied().unwrap_or(0.0) - q).abs()).fold(0.0, f64::max)
    }

    /// Serializable form.
    pub fn to_file(&self) -> StructureFile {
        let labeled = self.alphabets.iter().any(|a| !a.is_numeric());
        StructureFile {
            n: self.n(),
            prior: self.prior.to_file(),
            grids: self.alphabets.iter().map(|a| a.atoms().to_vec()).collect(),
            labels: labeled
                .then(|| self.alphabets.iter().map(|a| (0..a.len()).map(|k| a.label(k)).collect()).collect()),
            joint: self
                .entries
                .iter()
                .map(|e| JointRow { v: self.value_profile(e.v), s: self.signal_profile(e.s), p: e.p })
                .collect(),
            construction: self.construction.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("structure serializes")
    }

    /// Load and validate a structure file.
    pub fn from_file(file: StructureFile) -> Result<Self> {
        let prior = SymmetricPrior::from_file(file.prior)?;
        if file.n != prior.n() || file.grids.len() != prior.n() {
            return Err(Error::InvalidStructure("bidder count mismatch".into()));
        }
        let alphabets = match file.labels {
            Some(labels) => {
                if labels.len() != file.grids.len() {
                    return Err(Error::InvalidStructure("labels misaligned with grids".into()));
                }
                labels.into_iter().zip(file.grids).map(|(l, g)| Alphabet::labeled(l, g)).collect::<Result<Vec<_>>>()?
            }
            None => file.grids.into_iter().map(Alphabet::numeric).collect::<Result<Vec<_>>>()?,
        };
        let mut builder = JointBuilder::new(&prior, alphabets)?;
        let mut seen = std::collections::HashSet::new();
        for row in &file.joint {
            if row.v.len() != prior.n()
                || row.s.len() != prior.n()
                || row.v.iter().any(|&k| k >= prior.values().len())
                || row.s.iter().zip(&builder.radices).any(|(&k, &r)| k >= r)
            {
                return Err(Error::InvalidStructure(format!("joint row {:?}/{:?} out of range", row.v, row.s)));
            }
            if !seen.insert((row.v.clone(), row.s.clone())) {
                return Err(Error::InvalidStructure(format!("duplicate joint row {:?}/{:?}", row.v, row.s)));
            }
            if !(row.p > 0.0) {
                return Err(Error::InvalidStructure("joint rows must have positive probability".into()));
            }
            builder.add(&row.v, &row.s, row.p);
        }
        let mut s = builder.finish()?;
        s.construction = file.construction;
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

/// Posterior belief over value profiles at a signal profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorBelief {
    pub signal: Vec<usize>,
    pub dist: Vec<(Vec<usize>, f64)>,
}

/// Result of [`InfoStructure::symmetry_gap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryGap {
    /// Max over cells and permutations of the joint-law difference.
    pub joint_gap: f64,
    /// Max deviation of any signal marginal from uniform.
    pub marginal_gap: f64,
}

/// A signal profile where a predicate fails, with its residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub signal: Vec<usize>,
    pub residual: f64,
}

/// Outcome of a structural predicate, split by whether the top signal is tied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredicateReport {
    pub name: String,
    pub checked_no_tie: usize,
    pub checked_tie: usize,
    pub no_tie_violation_count: usize,
    pub tie_violation_count: usize,
    /// Largest residual over no-tie profiles.
    pub max_no_tie_residual: f64,
    /// Largest residual over tie profiles.
    pub max_tie_residual: f64,
    /// First violating no-tie profiles.
    pub no_tie_violations: Vec<Violation>,
    /// First violating tie profiles.
    pub tie_violations: Vec<Violation>,
}

impl PredicateReport {
    fn new(name: &str) -> Self {
        PredicateReport {
            name: name.to_string(),
            checked_no_tie: 0,
            checked_tie: 0,
            no_tie_violation_count: 0,
            tie_violation_count: 0,
            max_no_tie_residual: 0.0,
            max_tie_residual: 0.0,
            no_tie_violations: Vec::new(),
            tie_violations: Vec::new(),
        }
    }

    fn record(&mut self, signal: Vec<usize>, tie: bool, residual: f64, tol: f64) {
        let violated = residual > tol;
        let (checked, count, max, list) = if tie {
            (&mut self.checked_tie, &mut self.tie_violation_count, &mut self.max_tie_residual, &mut self.tie_violations)
        } else {
            (
                &mut self.checked_no_tie,
                &mut self.no_tie_violation_count,
                &mut self.max_no_tie_residual,
                &mut self.no_tie_violations,
            )
        };
        *checked += 1;
        *max = max.max(residual);
        if violated {
            *count += 1;
            if list.len() < EXAMPLE_CAP {
                list.push(Violation { signal, residual });
            }
        }
    }

    /// The predicate holds on every no-tie profile.
    pub fn holds_no_tie(&self) -> bool {
        self.no_tie_violation_count == 0
    }
}

/// One row of the JSON joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRow {
    pub v: Vec<usize>,
    pub s: Vec<usize>,
    pub p: f64,
}

/// JSON structure schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureFile {
    pub n: usize,
    pub prior: PriorFile,
    pub grids: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
    pub joint: Vec<JointRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fully_revealing_posteriors() {
        let s = fixtures::fully_revealing(&fixtures::p1());
        assert_eq!(s.interim_value(&[1, 0], 0).unwrap(), 1.0);
        assert_eq!(s.interim_value(&[1, 0], 1).unwrap(), 0.0);
        assert!(s.independence_gap() < 1e-15);
        assert!(s.bayes_plausibility_gap() < 1e-15);
    }

    #[test]
    fn fully_revealing_predicates() {
        let s = fixtures::fully_revealing(&fixtures::p1());
        assert!(s.check_winner_dominance().holds_no_tie());
        let nrw = s.check_no_rent_winner(1e-9);
        assert_eq!(nrw.no_tie_violation_count, 2);
        assert!(nrw.no_tie_violations.iter().any(|v| v.signal == vec![1, 0] && (v.residual - 1.0).abs() < 1e-15));
        assert!(s.check_loser_bound(1e-9).holds_no_tie());
    }

    #[test]
    fn constant_signal_structure() {
        let s = fixtures::constant_signal(&fixtures::p1());
        assert_eq!(s.signal_marginal(0), vec![1.0]);
        assert_eq!(s.independence_gap(), 0.0);
        let wd = s.check_winner_dominance();
        assert_eq!(wd.checked_no_tie, 0);
        assert_eq!(wd.tie_violation_count, 1);
    }

    #[test]
    fn zero_probability_signal_errors() {
        let s = fixtures::fully_revealing(&fixtures::degenerate_max_pair());
        assert!(matches!(s.posterior(&[0, 0]), Err(Error::ZeroProbabilitySignal(_))));
    }

    #[test]
    fn json_roundtrip_is_bit_stable() {
        let s = fixtures::uniform_pair_example(8, 8);
        let text = s.to_json();
        let back = InfoStructure::from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn builder_rejects_bad_marginal() {
        let prior = fixtures::p1();
        let mut b = JointBuilder::new(&prior, vec![Alphabet::numeric(vec![0.0]).unwrap(); 2]).unwrap();
        b.add(&[0, 0], &[0, 0], 1.0);
        assert!(matches!(b.finish(), Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn uniform_example_posterior_means() {
        let k = 32;
        let s = fixtures::uniform_pair_example(64, k);
        let tol = 2.0 / k as f64;
        for group in s.groups() {
            let sig = s.signal_profile(group[0].s);
            if sig[0] <= sig[1] {
                continue;
            }
            let sv = s.signal_values(&sig);
            let x1 = s.interim_value(&sig, 0).unwrap();
            let x2 = s.interim_value(&sig, 1).unwrap();
            assert!((x1 - sv[1]).abs() <= tol, "x1={x1} s2={}", sv[1]);
            assert!((x2 - sv[1] / 2.0).abs() <= tol, "x2={x2} s2={}", sv[1]);
        }
    }
}
