//! Permutations in one-line notation, pattern occurrences and densities.
//!
//! A permutation of `[n]` is stored 1-based: `values[i - 1] = σ(i)`. The number
//! of occurrences `Λ(τ, π)` counts increasing index tuples of `π` whose images
//! are ordered like `τ`; the density `t(τ, π)` divides by `C(n, k)` and is zero
//! when the pattern is longer than the permutation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::fenwick::Fenwick;
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Largest pattern length accepted by [`pattern_distribution`].
pub const MAX_DISTRIBUTION_K: usize = 6;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    /// Validates that `values` is a bijection of `1..=n`, `n >= 1`.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPermutation);
        }
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for (i, &v) in values.iter().enumerate() {
            if v == 0 || v > n {
                return Err(Error::OutOfRange { value: v as i64, index: i + 1, len: n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::RepeatedValue { value: v, index: i + 1 });
            }
        }
        Ok(Permutation { values })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutations have length at least 1");
        Permutation { values: (1..=n).collect() }
    }

    pub fn reverse(n: usize) -> Self {
        assert!(n >= 1, "permutations have length at least 1");
        Permutation { values: (1..=n).rev().collect() }
    }

    /// Relative order of distinct-or-tied keys; ties resolve by position.
    pub fn standardize<T: Ord>(keys: &[T]) -> Self {
        Self::standardize_by(keys.len(), |a, b| keys[a].cmp(&keys[b]))
    }

    /// Relative order under `cmp` over positions `0..n`; ties resolve by position.
    pub fn standardize_by(n: usize, mut cmp: impl FnMut(usize, usize) -> Ordering) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| cmp(a, b).then(a.cmp(&b)));
        let mut values = vec![0; n];
        for (rank, &pos) in order.iter().enumerate() {
            values[pos] = rank + 1;
        }
        Permutation { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `σ(i)` for `1 <= i <= n`.
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn into_values(self) -> Vec<usize> {
        self.values
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { values: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(Permutation { values: other.values.iter().map(|&j| self.at(j)).collect() })
    }

    /// Pattern realised by the given increasing positions (1-based).
    pub fn pattern_at(&self, positions: &[usize]) -> Permutation {
        let images: Vec<usize> = positions.iter().map(|&p| self.at(p)).collect();
        Permutation::standardize(&images)
    }

    /// Lexicographic rank among `S_n`, in `0..n!`.
    pub fn lex_rank(&self) -> usize {
        let n = self.len();
        let mut used = Fenwick::new(n);
        let mut rank = 0usize;
        for (i, &v) in self.values.iter().enumerate() {
            let smaller_unused = v - 1 - used.prefix(v) as usize;
            rank = rank * (n - i) + smaller_unused;
            used.add(v, 1);
        }
        rank
    }

    /// One-line notation joined by `-`, e.g. `2-1`.
    pub fn dashed(&self) -> String {
        self.join("-")
    }

    fn join(&self, sep: &str) -> String {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        parts.join(sep)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.join(" "))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.join(","))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_permutation(s)
    }
}

impl serde::Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

/// Parses whitespace- or comma-separated 1-based integers.
pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let mut values = Vec::new();
    for (i, token) in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).enumerate() {
        let v: i64 = token.parse().map_err(|_| Error::InvalidToken { token: token.to_string(), position: i + 1 })?;
        values.push(v);
    }
    let n = values.len();
    let mut checked = Vec::with_capacity(n);
    for (i, v) in values.into_iter().enumerate() {
        if v < 1 || v as u64 > n as u64 {
            return Err(Error::OutOfRange { value: v, index: i + 1, len: n });
        }
        checked.push(v as usize);
    }
    Permutation::new(checked)
}

/// All of `S_k` in lexicographic order.
pub fn all_permutations(k: usize) -> Vec<Permutation> {
    assert!(k >= 1);
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=k).collect();
    loop {
        out.push(Permutation { values: current.clone() });
        // next lexicographic permutation
        let Some(i) = (0..k - 1).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// `Λ(τ, π)`: occurrences of `tau` as a pattern of `pi`.
pub fn occurrences(tau: &Permutation, pi: &Permutation) -> u128 {
    let (k, n) = (tau.len(), pi.len());
    if k > n {
        return 0;
    }
    match k {
        1 => n as u128,
        2 => {
            let inv = inversions(pi);
            if tau.at(1) == 2 {
                inv
            } else {
                pairs(n) - inv
            }
        }
        3 => counts_of_length_three(pi)[tau.lex_rank()],
        _ => occurrences_by_search(tau, pi),
    }
}

/// `t(τ, π) = Λ(τ, π) / C(n, k)`, or zero when `k > n`.
pub fn density(tau: &Permutation, pi: &Permutation) -> Rational {
    let (k, n) = (tau.len(), pi.len());
    if k > n {
        return rational::zero();
    }
    let total = subset_count(n, k);
    rational::ratio(occurrences(tau, pi), total)
}

fn subset_count(n: usize, k: usize) -> num_bigint::BigInt {
    match rational::binomial(n as u64, k as u64) {
        Some(c) => c.into(),
        None => {
            let mut acc = num_bigint::BigInt::from(1u8);
            for i in 0..k {
                acc = acc * (n - i) / (i + 1);
            }
            acc
        }
    }
}

fn pairs(n: usize) -> u128 {
    let n = n as u128;
    n * (n.saturating_sub(1)) / 2
}

/// Number of inversions in `O(n log n)`.
pub fn inversions(pi: &Permutation) -> u128 {
    let n = pi.len();
    let mut seen = Fenwick::new(n);
    let mut inv: u128 = 0;
    for (i, &v) in pi.values().iter().enumerate() {
        // earlier entries larger than v
        inv += (i as u64 - seen.prefix(v)) as u128;
        seen.add(v, 1);
    }
    inv
}

/// Occurrence counts of the six patterns of length three, indexed by
/// lexicographic rank: 123, 132, 213, 231, 312, 321.
///
/// For each middle position `b` let `ls`, `lg` count smaller and larger
/// values to its left, and `rs`, `rg` to its right. Then
/// `123 = Σ ls·rg`, `321 = Σ lg·rs`, and the identities
/// `Σ C(rg, 2) = 123 + 132`, `Σ C(rs, 2) = 321 + 312`,
/// `Σ ls·rs = 132 + 231`, `Σ lg·rg = 213 + 312` recover the rest.
fn counts_of_length_three(pi: &Permutation) -> [u128; 6] {
    let n = pi.len();
    let mut left = Fenwick::new(n);
    let (mut c123, mut c321) = (0u128, 0u128);
    let (mut first_small, mut first_large) = (0u128, 0u128);
    let (mut peak, mut valley) = (0u128, 0u128);
    for (i, &v) in pi.values().iter().enumerate() {
        let ls = left.prefix(v) as u128;
        let lg = i as u128 - ls;
        let rs = (v as u128 - 1) - ls;
        let rg = (n - 1 - i) as u128 - rs;
        c123 += ls * rg;
        c321 += lg * rs;
        first_small += rg * rg.saturating_sub(1) / 2;
        first_large += rs * rs.saturating_sub(1) / 2;
        peak += ls * rs;
        valley += lg * rg;
        left.add(v, 1);
    }
    let c132 = first_small - c123;
    let c231 = peak - c132;
    let c312 = first_large - c321;
    let c213 = valley - c312;
    [c123, c132, c213, c231, c312, c321]
}

/// Backtracking over increasing index tuples, pruning as soon as a chosen
/// prefix disagrees with the relative order of `tau`.
fn occurrences_by_search(tau: &Permutation, pi: &Permutation) -> u128 {
    fn go(tau: &[usize], pi: &[usize], chosen: &mut Vec<usize>, start: usize) -> u128 {
        let d = chosen.len();
        if d == tau.len() {
            return 1;
        }
        let remaining = tau.len() - d;
        let mut total = 0;
        for pos in start..=pi.len() - remaining {
            let v = pi[pos];
            let consistent = chosen.iter().enumerate().all(|(e, &u)| (u < v) == (tau[e] < tau[d]));
            if consistent {
                chosen.push(v);
                total += go(tau, pi, chosen, pos + 1);
                chosen.pop();
            }
        }
        total
    }
    go(tau.values(), pi.values(), &mut Vec::with_capacity(tau.len()), 0)
}

/// Exact `t(τ, π)` for every `τ ∈ S_k`.
#[derive(Clone, Debug)]
pub struct PatternDistribution {
    k: usize,
    n: usize,
    /// Occurrence counts keyed by pattern; empty when `k > n`.
    counts: BTreeMap<Permutation, u128>,
}

impl PatternDistribution {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `C(n, k)`, zero when `k > n`.
    pub fn denominator(&self) -> u128 {
        rational::binomial(self.n as u64, self.k as u64).unwrap_or(u128::MAX)
    }

    pub fn occurrences(&self, tau: &Permutation) -> u128 {
        self.counts.get(tau).copied().unwrap_or(0)
    }

    pub fn density(&self, tau: &Permutation) -> Rational {
        match self.counts.get(tau) {
            Some(&c) => rational::ratio(c, subset_count(self.n, self.k)),
            None => rational::zero(),
        }
    }

    pub fn is_defined(&self) -> bool {
        !self.counts.is_empty()
    }

    /// `(τ, Λ(τ, π))` for every `τ ∈ S_k` in lexicographic order; all zero
    /// when the distribution is undefined.
    pub fn entries(&self) -> Vec<(Permutation, u128)> {
        all_permutations(self.k)
            .into_iter()
            .map(|t| {
                let c = self.occurrences(&t);
                (t, c)
            })
            .collect()
    }

    pub fn total(&self) -> Rational {
        self.counts.keys().map(|t| self.density(t)).sum()
    }

    /// CSV with columns `pattern,numerator,denominator,density_float`.
    ///
    /// Numerators and denominators are unreduced: `Λ` and `C(n, k)`.
    /// Undefined distributions are written as all-zero rows over `0/1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,numerator,denominator,density_float\n");
        let den = if self.is_defined() { self.denominator() } else { 1 };
        for (tau, c) in self.entries() {
            let f = c as f64 / den as f64;
            out.push_str(&format!("{},{},{},{}\n", tau.dashed(), c, den, f));
        }
        out
    }
}

/// `t(τ, π)` for all `τ ∈ S_k` in one pass; `1 <= k <= 6`.
pub fn pattern_distribution(pi: &Permutation, k: usize) -> Result<PatternDistribution> {
    if k == 0 || k > MAX_DISTRIBUTION_K {
        return Err(Error::Guard(format!("pattern length {k} outside 1..={MAX_DISTRIBUTION_K}")));
    }
    let n = pi.len();
    let mut counts = BTreeMap::new();
    if k > n {
        return Ok(PatternDistribution { k, n, counts });
    }
    let patterns = all_permutations(k);
    let raw: Vec<u128> = match k {
        1 => vec![n as u128],
        2 => {
            let inv = inversions(pi);
            vec![pairs(n) - inv, inv]
        }
        3 => counts_of_length_three(pi).to_vec(),
        _ => {
            let mut c = vec![0u128; patterns.len()];
            for_each_subset(n, k, |positions| {
                c[pi.pattern_at(positions).lex_rank()] += 1;
            });
            c
        }
    };
    for (tau, c) in patterns.into_iter().zip(raw) {
        counts.insert(tau, c);
    }
    Ok(PatternDistribution { k, n, counts })
}

/// Calls `f` with every increasing `k`-tuple of `1..=n`.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n || k == 0 {
        return;
    }
    let mut idx: Vec<usize> = (1..=k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - (k - 1 - i)) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `σ(k, π)`: the pattern of a uniformly chosen `k`-subset of positions.
pub fn random_subpermutation<R: Rng + ?Sized>(pi: &Permutation, k: usize, rng: &mut R) -> Result<Permutation> {
    let n = pi.len();
    if k == 0 {
        return Err(Error::InvalidArgument("subpermutation length must be at least 1".into()));
    }
    if k > n {
        return Err(Error::PatternTooLong { k, n });
    }
    let mut positions: Vec<usize> = rand::seq::index::sample(rng, n, k).into_iter().map(|i| i + 1).collect();
    positions.sort_unstable();
    Ok(pi.pattern_at(&positions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::rng::seeded;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("5 6 2 4 7 1 3").values(), &[5, 6, 2, 4, 7, 1, 3]);
        assert_eq!(p("5,6, 2,4 7,1,3"), p("5 6 2 4 7 1 3"));
        assert_eq!(p("1").values(), &[1]);
        match parse_permutation("2 2 1") {
            Err(Error::RepeatedValue { value: 2, index: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_permutation("1 x"), Err(Error::InvalidToken { position: 2, .. })));
        assert!(matches!(parse_permutation("1 3"), Err(Error::OutOfRange { value: 3, index: 2, .. })));
        assert!(matches!(parse_permutation("0 1"), Err(Error::OutOfRange { value: 0, index: 1, .. })));
        assert!(matches!(parse_permutation("  "), Err(Error::EmptyPermutation)));
    }

    #[test]
    fn occurrence_examples() {
        assert_eq!(occurrences(&p("2 1"), &p("2 1")), 1);
        assert_eq!(occurrences(&p("1 2"), &p("1 2 3 4")), 6);
        let pi = p("5 6 2 4 7 1 3");
        let tau = p("3 1 4 2");
        assert_eq!(pi.pattern_at(&[1, 3, 5, 7]), tau);
        // frozen from exhaustive enumeration of the 35 four-subsets
        assert_eq!(occurrences(&tau, &pi), 2);
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&p("1 2"), &p("1 2 3")), int(1));
        assert_eq!(density(&p("2 1"), &p("1 2 3")), int(0));
        assert_eq!(density(&p("2 1 4 3"), &p("3 1 2")), int(0));
        assert_eq!(density(&p("3 1 4 2"), &p("5 6 2 4 7 1 3")), ratio(2, 35));
    }

    #[test]
    fn distribution_examples() {
        let d = pattern_distribution(&p("1 2 3"), 2).unwrap();
        assert_eq!(d.density(&p("1 2")), int(1));
        assert_eq!(d.density(&p("2 1")), int(0));
        let d = pattern_distribution(&p("2 1"), 2).unwrap();
        assert_eq!(d.density(&p("1 2")), int(0));
        assert_eq!(d.density(&p("2 1")), int(1));
        let d = pattern_distribution(&p("5 6 2 4 7 1 3"), 3).unwrap();
        assert_eq!(d.entries().len(), 6);
        assert_eq!(d.total(), int(1));
        assert!(matches!(pattern_distribution(&p("1"), 7), Err(Error::Guard(_))));
        assert!(matches!(pattern_distribution(&p("1"), 0), Err(Error::Guard(_))));
        let undefined = pattern_distribution(&p("2 1"), 3).unwrap();
        assert!(!undefined.is_defined());
        assert_eq!(undefined.total(), int(0));
    }

    #[test]
    fn csv_layout() {
        let d = pattern_distribution(&p("2 1 3"), 2).unwrap();
        assert_eq!(
            d.to_csv(),
            "pattern,numerator,denominator,density_float\n1-2,2,3,0.6666666666666666\n2-1,1,3,0.3333333333333333\n"
        );
    }

    #[test]
    fn lex_rank_matches_enumeration_order() {
        for k in 1..=5 {
            for (i, t) in all_permutations(k).iter().enumerate() {
                assert_eq!(t.lex_rank(), i);
            }
        }
        assert_eq!(all_permutations(4).len(), 24);
    }

    #[test]
    fn subsets_enumerated_once() {
        let mut count = 0;
        for_each_subset(7, 3, |s| {
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            count += 1;
        });
        assert_eq!(count, 35);
    }

    #[test]
    fn inverse_and_compose() {
        let s = p("3 1 2");
        assert_eq!(s.inverse(), p("2 3 1"));
        assert_eq!(s.compose(&s.inverse()).unwrap(), Permutation::identity(3));
        assert!(s.compose(&p("1 2")).is_err());
    }

    #[test]
    fn random_subpermutation_examples() {
        let mut rng = seeded(1);
        assert_eq!(random_subpermutation(&p("1 2 3"), 3, &mut rng).unwrap(), p("1 2 3"));
        assert_eq!(random_subpermutation(&p("2 1"), 1, &mut rng).unwrap(), p("1"));
        assert!(matches!(random_subpermutation(&p("2 1"), 3, &mut rng), Err(Error::PatternTooLong { .. })));
    }

    #[test]
    fn random_subpermutation_frequency_matches_density() {
        let pi = p("5 6 2 4 7 1 3");
        let target = p("2 1");
        let t = rational::to_f64(&density(&target, &pi));
        let mut rng = seeded(2024);
        let draws = 100_000;
        let hits = (0..draws).filter(|_| random_subpermutation(&pi, 2, &mut rng).unwrap() == target).count();
        let est = hits as f64 / draws as f64;
        let se = (t * (1.0 - t) / draws as f64).sqrt();
        assert!((est - t).abs() <= 3.0 * se, "est {est} vs {t}");
    }
}
