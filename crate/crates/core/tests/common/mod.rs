//! Slow, obviously-correct reference implementations shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use permlimit::rational::{self, Rational};
use permlimit::{GridPermuton, Permutation};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn p(s: &str) -> Permutation {
    s.parse().unwrap()
}

pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Permutation::new(v).unwrap()
}

/// Counts occurrences by checking every increasing `k`-tuple of positions.
pub fn naive_occurrences(tau: &Permutation, pi: &Permutation) -> u128 {
    let (k, n) = (tau.len(), pi.len());
    if k > n {
        return 0;
    }
    fn go(tau: &[usize], pi: &[usize], chosen: &mut Vec<usize>, start: usize) -> u128 {
        if chosen.len() == tau.len() {
            let vals: Vec<usize> = chosen.iter().map(|&i| pi[i]).collect();
            let ok = (0..tau.len()).all(|a| (0..tau.len()).all(|b| (vals[a] < vals[b]) == (tau[a] < tau[b])));
            return u128::from(ok);
        }
        let mut total = 0;
        for i in start..pi.len() {
            chosen.push(i);
            total += go(tau, pi, chosen, i + 1);
            chosen.pop();
        }
        total
    }
    go(tau.values(), pi.values(), &mut Vec::new(), 0)
}

pub fn naive_inversions(pi: &Permutation) -> u128 {
    let v = pi.values();
    let mut c = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            c += u128::from(v[i] > v[j]);
        }
    }
    c
}

/// Random doubly stochastic `m × m` matrix: a convex combination of
/// `terms` permutation matrices with small integer weights.
pub fn random_grid<R: Rng>(m: usize, terms: usize, rng: &mut R) -> GridPermuton {
    let mut num = vec![vec![0i64; m]; m];
    let mut total = 0i64;
    for _ in 0..terms {
        let w = rng.gen_range(1..=9);
        total += w;
        let sigma = random_permutation(m, rng);
        for i in 1..=m {
            num[i - 1][sigma.at(i) - 1] += w;
        }
    }
    let matrix = num.into_iter().map(|row| row.into_iter().map(|a| rational::ratio(a, total)).collect()).collect();
    GridPermuton::new(matrix).unwrap()
}

/// `t(τ, Z)` by summing over all `(m²)^k` ordered cell assignments.
///
/// For a fixed assignment the in-cell offsets are independent uniforms, so
/// within a shared row band all orders of the points are equally likely and
/// likewise for columns. The pattern probability is the number of pairs
/// (x-order, y-order) consistent with the bands and with `τ`, divided by
/// `∏ row-multiplicity! · ∏ column-multiplicity!`.
pub fn exact_by_assignments(z: &GridPermuton, tau: &Permutation) -> Rational {
    let m = z.resolution();
    let k = tau.len();
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|r| (0..m).map(move |c| (r, c))).collect();
    let orders = permlimit::perm::all_permutations(k);
    let mut total = Rational::zero();
    let mut assign = vec![0usize; k];
    loop {
        let mut w = Rational::one();
        for &a in &assign {
            let (r, c) = cells[a];
            w *= z.cell_mass(r + 1, c + 1);
        }
        if !w.is_zero() {
            let mut consistent = 0u64;
            for rho in &orders {
                // rho(i) = point with x-rank i
                let pt = |i: usize| rho.at(i) - 1;
                if (1..k).any(|i| cells[assign[pt(i)]].0 > cells[assign[pt(i + 1)]].0) {
                    continue;
                }
                let mut by_y = vec![0usize; k];
                for i in 1..=k {
                    by_y[tau.at(i) - 1] = pt(i);
                }
                if (0..k - 1).any(|j| cells[assign[by_y[j]]].1 > cells[assign[by_y[j + 1]]].1) {
                    continue;
                }
                consistent += 1;
            }
            let mut rows: HashMap<usize, usize> = HashMap::new();
            let mut cols: HashMap<usize, usize> = HashMap::new();
            for &a in &assign {
                *rows.entry(cells[a].0).or_default() += 1;
                *cols.entry(cells[a].1).or_default() += 1;
            }
            let div: u128 = rows.values().chain(cols.values()).map(|&g| rational::factorial(g)).product();
            total += w * rational::ratio(consistent, div);
        }
        let Some(i) = (0..k).rev().find(|&i| assign[i] + 1 < cells.len()) else { break };
        assign[i] += 1;
        assign[i + 1..].iter_mut().for_each(|a| *a = 0);
    }
    total
}

/// `d_□(σ₁, σ₂)` by trying every pair of intervals.
pub fn naive_d_square_perms(s1: &Permutation, s2: &Permutation) -> Rational {
    let n = s1.len();
    let mut best = 0i64;
    for a in 1..=n {
        for b in a..=n {
            for c in 1..=n {
                for d in c..=n {
                    let count = |s: &Permutation| (a..=b).filter(|&l| (c..=d).contains(&s.at(l))).count() as i64;
                    best = best.max((count(s1) - count(s2)).abs());
                }
            }
        }
    }
    rational::ratio(best, n)
}

/// `D(σ)` by trying every pair of intervals.
pub fn naive_discrepancy(s: &Permutation) -> Rational {
    let n = s.len() as i64;
    let mut best = Rational::zero();
    for a in 1..=s.len() {
        for b in a..=s.len() {
            for c in 1..=s.len() {
                for d in c..=s.len() {
                    let hits = (a..=b).filter(|&l| (c..=d).contains(&s.at(l))).count() as i64;
                    let exp = rational::ratio(((b - a + 1) * (d - c + 1)) as i64, n);
                    let v = (rational::int(hits) - exp).abs();
                    if v > best {
                        best = v;
                    }
                }
            }
        }
    }
    best
}
