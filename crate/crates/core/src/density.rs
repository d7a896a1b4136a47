//! Pattern densities in permutons.
//!
//! `t(τ, Z)` is the probability that `σ(k, Z) = τ`. It is estimated by Monte
//! Carlo for any permuton and computed exactly for step-density permutons.
//!
//! The exact evaluator uses exchangeability of the `k` points: the event
//! `σ(k, Z) = τ` splits into `k!` equally likely events according to which
//! point is leftmost, second leftmost, and so on, so
//!
//! ```text
//! t(τ, Z) = k! · P(X_1 < … < X_k and the Y-ranks of points 1..k are τ).
//! ```
//!
//! Conditional on the grid cells of the points, the in-cell offsets are
//! independent uniforms. Points in different row bands are ordered by band;
//! the `g` points sharing a row band are in any of `g!` orders with equal
//! probability, and likewise for column bands, independently. Only
//! assignments with row bands non-decreasing along `1..k` and column bands
//! non-decreasing along the Y-rank order contribute, each with weight
//! `∏ μ(cell_i) / (∏ row-run! · ∏ column-run!)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::perm::{self, Permutation};
use crate::permuton::{GridPermuton, Permuton};
use crate::rational::{self, Rational};
use crate::rng::{derive_seed, seeded};
use crate::sampling::z_random_permutation;
use crate::{Error, Result};

/// Largest pattern length for [`density_in_permuton_exact`].
pub const MAX_EXACT_K: usize = 4;
/// Largest grid resolution for [`density_in_permuton_exact`].
pub const MAX_EXACT_M: usize = 8;

const MC_CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MonteCarlo,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub estimate: f64,
    /// Wald standard error `sqrt(p̂(1 − p̂)/trials)`; zero for exact values.
    pub stderr: f64,
    pub trials: u64,
    pub method: Method,
    #[serde(skip)]
    pub exact: Option<Rational>,
}

impl DensityEstimate {
    pub fn exact(value: Rational) -> Self {
        DensityEstimate {
            estimate: rational::to_f64(&value),
            stderr: 0.0,
            trials: 0,
            method: Method::Exact,
            exact: Some(value),
        }
    }

    fn from_hits(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        DensityEstimate {
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            method: Method::MonteCarlo,
            exact: None,
        }
    }
}

/// Fraction of `trials` draws of `σ(k, Z)` equal to `tau`.
///
/// Draws one `u64` from `rng` and splits the trials into fixed chunks with
/// derived seeds, so the result does not depend on the thread count.
pub fn density_in_permuton_mc<P, R>(z: &P, tau: &Permutation, trials: u64, rng: &mut R) -> Result<DensityEstimate>
where
    P: Permuton + ?Sized,
    R: Rng + ?Sized,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let master: u64 = rng.gen();
    let k = tau.len();
    let chunks = trials.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = seeded(derive_seed(master, c));
            let count = MC_CHUNK.min(trials - c * MC_CHUNK);
            (0..count).filter(|_| z_random_permutation(z, k, &mut local) == *tau).count() as u64
        })
        .sum();
    Ok(DensityEstimate::from_hits(hits, trials))
}

fn check_exact_guards(z: &GridPermuton, k: usize) -> Result<()> {
    if k > MAX_EXACT_K {
        return Err(Error::Guard(format!("exact density needs pattern length <= {MAX_EXACT_K}, got {k}")));
    }
    if z.resolution() > MAX_EXACT_M {
        return Err(Error::Guard(format!(
            "exact density needs grid resolution <= {MAX_EXACT_M}, got {}",
            z.resolution()
        )));
    }
    Ok(())
}

/// Non-decreasing sequences of length `k` over `0..m` with `k! / ∏ run!`.
fn monotone_sequences(m: usize, k: usize) -> Vec<(Vec<usize>, BigInt)> {
    fn go(m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().copied().unwrap_or(0);
        for v in start..m {
            cur.push(v);
            go(m, k, cur, out);
            cur.pop();
        }
    }
    let mut seqs = Vec::new();
    go(m, k, &mut Vec::with_capacity(k), &mut seqs);
    let kf = BigInt::from(rational::factorial(k));
    seqs.into_iter()
        .map(|s| {
            let runs: u128 = s.chunk_by(|a, b| a == b).map(|r| rational::factorial(r.len())).product();
            (s, &kf / BigInt::from(runs))
        })
        .collect()
}

/// Exact `t(τ, Z)` for a step permuton; `|τ| <= 4`, `m <= 8`.
pub fn density_in_permuton_exact(z: &GridPermuton, tau: &Permutation) -> Result<Rational> {
    let k = tau.len();
    check_exact_guards(z, k)?;
    let m = z.resolution();

    // integer numerators over a common denominator: M = A / d
    let d = z.matrix().iter().flatten().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let a: Vec<Vec<BigInt>> =
        z.matrix().iter().map(|row| row.iter().map(|v| v.numer() * (&d / v.denom())).collect()).collect();

    let seqs = monotone_sequences(m, k);
    let mut total = BigInt::zero();
    for (rows, row_factor) in &seqs {
        for (cols, col_factor) in &seqs {
            // point i (in x order) takes the column of its y-rank τ(i)
            let mut w = BigInt::one();
            for i in 0..k {
                let entry = &a[rows[i]][cols[tau.at(i + 1) - 1]];
                if entry.is_zero() {
                    w = BigInt::zero();
                    break;
                }
                w *= entry;
            }
            if !w.is_zero() {
                total += w * row_factor * col_factor;
            }
        }
    }
    // t = k! · Σ ∏(A/(d·m)) / (∏run!·∏run!), and each factor above carries k!
    let kf = BigInt::from(rational::factorial(k));
    let denom = num_traits::pow(d * BigInt::from(m), k) * kf;
    Ok(Rational::new(total, denom))
}

/// Exact [`DensityEstimate`] wrapper around [`density_in_permuton_exact`].
pub fn density_estimate_exact(z: &GridPermuton, tau: &Permutation) -> Result<DensityEstimate> {
    density_in_permuton_exact(z, tau).map(DensityEstimate::exact)
}

/// `|t(τ, σ) − t(τ, Z_σ)|` against the bound `C(k, 2) / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapCheck {
    pub gap: Rational,
    pub bound: Rational,
    pub ok: bool,
}

pub fn step_permuton_gap(tau: &Permutation, sigma: &Permutation) -> Result<GapCheck> {
    let (k, n) = (tau.len(), sigma.len());
    if k > n {
        return Err(Error::PatternTooLong { k, n });
    }
    let z = GridPermuton::from_permutation(sigma);
    check_exact_guards(&z, k)?;
    let in_perm = perm::density(tau, sigma);
    let in_permuton = density_in_permuton_exact(&z, tau)?;
    let diff = in_perm - in_permuton;
    let gap = if diff < Rational::zero() { -diff } else { diff };
    let bound = rational::ratio(k * (k - 1) / 2, n);
    let ok = gap <= bound;
    Ok(GapCheck { gap, bound, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::permuton::uniform_permuton;
    use crate::rational::{int, ratio};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn diag() -> GridPermuton {
        GridPermuton::from_strings(&[vec!["0.8", "0.2"], vec!["0.2", "0.8"]]).unwrap()
    }

    #[test]
    fn singleton_pattern_is_certain() {
        let est = density_in_permuton_mc(&diag(), &p("1"), 500, &mut seeded(1)).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.method, Method::MonteCarlo);
        assert!(density_in_permuton_mc(&diag(), &p("1"), 0, &mut seeded(1)).is_err());
    }

    #[test]
    fn uniform_mc_symmetry() {
        let mut rng = seeded(2);
        let est = density_in_permuton_mc(&uniform_permuton(), &p("2 1"), 100_000, &mut rng).unwrap();
        assert!((est.estimate - 0.5).abs() <= 3.0 * est.stderr, "{est:?}");
        for tau in all_permutations(3) {
            let est = density_in_permuton_mc(&uniform_permuton(), &tau, 100_000, &mut rng).unwrap();
            assert!((est.estimate - 1.0 / 6.0).abs() <= 3.0 * est.stderr, "{tau:?} {est:?}");
        }
    }

    #[test]
    fn mc_is_deterministic() {
        let a = density_in_permuton_mc(&diag(), &p("2 1"), 10_000, &mut seeded(7)).unwrap();
        let b = density_in_permuton_mc(&diag(), &p("2 1"), 10_000, &mut seeded(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exact_uniform_grid() {
        let one = uniform_permuton().to_grid();
        for k in 1..=4 {
            let expected = ratio(1, rational::factorial(k));
            for tau in all_permutations(k) {
                assert_eq!(density_in_permuton_exact(&one, &tau).unwrap(), expected);
            }
        }
    }

    #[test]
    fn exact_totals_are_one() {
        for z in [diag(), GridPermuton::from_permutation(&p("2 3 1"))] {
            for k in 1..=3 {
                let s: Rational = all_permutations(k).iter().map(|t| density_in_permuton_exact(&z, t).unwrap()).sum();
                assert_eq!(s, int(1));
            }
        }
    }

    #[test]
    fn exact_diag_inversion() {
        // frozen from the full (m²)^k cell-assignment oracle in tests/exact_density.rs
        assert_eq!(density_in_permuton_exact(&diag(), &p("2 1")).unwrap(), ratio(7, 20));
    }

    #[test]
    fn exact_guards() {
        let big = GridPermuton::from_permutation(&Permutation::identity(9));
        assert!(matches!(density_in_permuton_exact(&big, &p("1 2")), Err(Error::Guard(_))));
        assert!(matches!(density_in_permuton_exact(&diag(), &p("1 2 3 4 5")), Err(Error::Guard(_))));
    }

    #[test]
    fn gap_examples() {
        let g = step_permuton_gap(&p("1"), &p("3 1 2")).unwrap();
        assert_eq!((g.gap, g.bound, g.ok), (int(0), int(0), true));
        let g = step_permuton_gap(&p("2 1"), &p("2 1")).unwrap();
        assert_eq!(g.bound, ratio(1, 2));
        // t((2,1), Z_(2,1)) = 3/4: both points in one band w.p. 1/2, then a fair coin
        assert_eq!(g.gap, ratio(1, 4));
        assert!(g.ok);
        assert!(matches!(step_permuton_gap(&p("1 2 3"), &p("2 1")), Err(Error::PatternTooLong { .. })));
    }
}
