//! Small combinatorial helpers.

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Apply `perm` to a profile: coordinate `j` of the result is `x[perm[j]]`.
pub fn permute<T: Copy>(x: &[T], perm: &[usize]) -> Vec<T> {
    perm.iter().map(|&j| x[j]).collect()
}

/// Mixed-radix encoding with digit 0 least significant.
pub fn encode(digits: &[usize], radices: &[usize]) -> u64 {
    let mut id = 0u64;
    for (d, r) in digits.iter().zip(radices).rev() {
        id = id * (*r as u64) + *d as u64;
    }
    id
}

/// Inverse of [`encode`].
pub fn decode(mut id: u64, radices: &[usize]) -> Vec<usize> {
    radices
        .iter()
        .map(|&r| {
            let d = (id % r as u64) as usize;
            id /= r as u64;
            d
        })
        .collect()
}

/// Binomial coefficient as a float.
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Positions attaining the maximum of `x` (exact comparison).
pub fn argmax_set<T: PartialOrd + Copy>(x: &[T]) -> Vec<usize> {
    let mut best = x[0];
    for &v in &x[1..] {
        if v > best {
            best = v;
        }
    }
    (0..x.len()).filter(|&j| x[j] == best).collect()
}

/// Second-highest entry counted with multiplicity.
pub fn secmax(x: &[f64]) -> f64 {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::NEG_INFINITY;
    for &v in x {
        if v > hi {
            lo = hi;
            hi = v;
        } else if v > lo {
            lo = v;
        }
    }
    lo
}
