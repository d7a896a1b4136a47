//! Rectangular distance, sup distance and discrepancy.
//!
//! For two step-density permutons the difference of joint cdfs
//! `G = F₁ − F₂` is bilinear on every cell of the common refinement, whose
//! breakpoints are the union of both grids. The rectangle functional
//! `G(x₂,y₂) − G(x₁,y₂) − G(x₂,y₁) + G(x₁,y₁)` is therefore affine in each
//! coordinate separately on every refinement interval (and jointly affine in
//! `(x₁, x₂)` when both share an interval), so its extrema over rectangles
//! are attained with all four coordinates at breakpoints. The same holds for
//! `|G|` itself, so both distances are exact maxima over a finite grid.
//!
//! With breakpoints fixed, `max |rect|` over `y₁ < y₂` for a given pair
//! `x₁ < x₂` is `max_y D − min_y D` where `D(y) = G(x₂, y) − G(x₁, y)`,
//! which makes every search cubic in the refinement size.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::perm::Permutation;
use crate::permuton::{GridPermuton, Permuton};
use crate::rational::{self, serialize_exact, Rational};
use crate::rng::{derive_seed, seeded};
use crate::sampling::z_random_permutation;
use crate::{Error, Result};

/// Maximizer of a distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// Half-open 1-based intervals `S = [s.0, s.1)`, `T = [t.0, t.1)` of `[n]`.
    Intervals { s: (usize, usize), t: (usize, usize) },
    Rectangle {
        #[serde(serialize_with = "serialize_exact")]
        x1: Rational,
        #[serde(serialize_with = "serialize_exact")]
        x2: Rational,
        #[serde(serialize_with = "serialize_exact")]
        y1: Rational,
        #[serde(serialize_with = "serialize_exact")]
        y2: Rational,
    },
    Point {
        #[serde(serialize_with = "serialize_exact")]
        x: Rational,
        #[serde(serialize_with = "serialize_exact")]
        y: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    #[serde(serialize_with = "serialize_exact")]
    pub value: Rational,
    pub value_float: f64,
    pub witness: Witness,
}

impl DistanceReport {
    fn new(value: Rational, witness: Witness) -> Self {
        DistanceReport { value_float: rational::to_f64(&value), value, witness }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Integer sweep over interval pairs.
///
/// For each start `a` the running vector `diff[y]` holds the signed count
/// difference over `S = [a+1, b]` and `T = [1, y]`; any `T` interval is a
/// difference of two prefixes, so the best `T` for a fixed `S` is spanned by
/// the positions of `min diff` and `max diff`.
fn best_interval_pair(n: usize, mut add: impl FnMut(usize, &mut [i64])) -> (i64, Witness) {
    let mut best = (0i64, Witness::Intervals { s: (1, 1), t: (1, 1) });
    let mut diff = vec![0i64; n + 1];
    for a in 0..n {
        diff.iter_mut().for_each(|d| *d = 0);
        for b in a + 1..=n {
            add(b, &mut diff);
            let (mut lo, mut hi) = (0, 0);
            for y in 1..=n {
                if diff[y] < diff[lo] {
                    lo = y;
                }
                if diff[y] > diff[hi] {
                    hi = y;
                }
            }
            let v = diff[hi] - diff[lo];
            if v > best.0 {
                let (c, d) = (lo.min(hi), lo.max(hi));
                best = (v, Witness::Intervals { s: (a + 1, b + 1), t: (c + 1, d + 1) });
            }
        }
    }
    best
}

/// `d_□(σ₁, σ₂) = (1/n) max_{S,T} ||σ₁(S) ∩ T| − |σ₂(S) ∩ T||`.
pub fn d_square_perms(s1: &Permutation, s2: &Permutation) -> Result<DistanceReport> {
    let n = s1.len();
    if s2.len() != n {
        return Err(Error::LengthMismatch { left: n, right: s2.len() });
    }
    let (v, witness) = best_interval_pair(n, |b, diff| {
        let (u, w) = (s1.at(b), s2.at(b));
        if u < w {
            diff[u..w].iter_mut().for_each(|d| *d += 1);
        } else {
            diff[w..u].iter_mut().for_each(|d| *d -= 1);
        }
    });
    Ok(DistanceReport::new(rational::ratio(v, n), witness))
}

/// Cooper discrepancy `D(σ) = max_{S,T} ||σ(S) ∩ T| − |S||T|/n|`, which equals
/// `n · d_□(σ, Z_u)`. Exact, `O(n³)`.
pub fn discrepancy(sigma: &Permutation) -> DistanceReport {
    let n = sigma.len();
    // scaled by n: diff[y] = n·|σ(S) ∩ [1,y]| − |S|·y
    let (v, witness) = best_interval_pair(n, |b, diff| {
        let u = sigma.at(b);
        for (y, d) in diff.iter_mut().enumerate() {
            *d -= y as i64;
            if y >= u {
                *d += n as i64;
            }
        }
    });
    DistanceReport::new(rational::ratio(v, n), witness)
}

/// `d_∞(Z_σ, Z_u) = max_{i,j} |F_σ(i/n, j/n) − ij/n²|`, exact in `O(n²)`.
///
/// Brackets the discrepancy: `d_∞ <= D(σ)/n <= 4·d_∞`, which is what makes
/// large `n` tractable.
pub fn d_infty_perm_uniform(sigma: &Permutation) -> DistanceReport {
    let n = sigma.len();
    let mut below = vec![0i64; n + 1]; // below[j] = #{ℓ <= i : σ(ℓ) <= j}
    let (mut best, mut at) = (0i64, (0usize, 0usize));
    for i in 1..=n {
        let u = sigma.at(i);
        below[u..].iter_mut().for_each(|c| *c += 1);
        for (j, &c) in below.iter().enumerate() {
            let v = (n as i64 * c - (i * j) as i64).abs();
            if v > best {
                best = v;
                at = (i, j);
            }
        }
    }
    DistanceReport::new(
        rational::ratio(best, n * n),
        Witness::Point { x: rational::ratio(at.0, n), y: rational::ratio(at.1, n) },
    )
}

/// Numerators `a` of the sorted union of `{i/m₁}` and `{j/m₂}` written as `a/L`,
/// `L = lcm(m₁, m₂)`.
fn breakpoints(m1: usize, m2: usize) -> (usize, Vec<usize>) {
    let l = m1.lcm(&m2);
    let mut pts: Vec<usize> = (0..=m1).map(|i| i * (l / m1)).chain((0..=m2).map(|j| j * (l / m2))).collect();
    pts.sort_unstable();
    pts.dedup();
    (l, pts)
}

/// Joint cdf of a step permuton at the points `a/L`, scaled to integers.
///
/// `F` is bilinear on each cell, so `L²·s·F(a/L, b/L)` is an integer
/// combination of the integer corner values `s·F(i/m, j/m)`.
struct ScaledCdf {
    m: usize,
    scale: BigInt,
    corners: Vec<Vec<BigInt>>,
}

impl ScaledCdf {
    fn new(z: &GridPermuton) -> Self {
        let m = z.resolution();
        let scale = (0..=m)
            .flat_map(|i| (0..=m).map(move |j| (i, j)))
            .fold(BigInt::one(), |acc, (i, j)| acc.lcm(z.corner_cdf(i, j).denom()));
        let corners = (0..=m)
            .map(|i| {
                (0..=m)
                    .map(|j| {
                        let c = z.corner_cdf(i, j);
                        c.numer() * (&scale / c.denom())
                    })
                    .collect()
            })
            .collect();
        ScaledCdf { m, scale, corners }
    }

    /// Band and offset of `a/L` in units of `1/L`.
    fn split(&self, a: usize, l: usize) -> (usize, usize) {
        let t = a * self.m;
        let (i, r) = (t / l, t % l);
        if i == self.m {
            (self.m - 1, l)
        } else {
            (i, r)
        }
    }

    /// `L²·scale·F(a/L, b/L)`.
    fn at(&self, a: usize, b: usize, l: usize) -> BigInt {
        let (i, rx) = self.split(a, l);
        let (j, ry) = self.split(b, l);
        let c = &self.corners;
        let w = |u: usize, v: usize| BigInt::from(u) * BigInt::from(v);
        w(l - rx, l - ry) * &c[i][j]
            + w(rx, l - ry) * &c[i + 1][j]
            + w(l - rx, ry) * &c[i][j + 1]
            + w(rx, ry) * &c[i + 1][j + 1]
    }
}

/// `F₁ − F₂` on the refinement grid as integers over a common denominator.
struct Difference {
    pts: Vec<Rational>,
    values: Vec<Vec<BigInt>>,
    denom: BigInt,
}

impl Difference {
    fn new(z1: &GridPermuton, z2: &GridPermuton) -> Self {
        let (l, pts) = breakpoints(z1.resolution(), z2.resolution());
        let (f1, f2) = (ScaledCdf::new(z1), ScaledCdf::new(z2));
        let s = f1.scale.lcm(&f2.scale);
        let (k1, k2) = (&s / &f1.scale, &s / &f2.scale);
        let values = pts
            .par_iter()
            .map(|&a| pts.iter().map(|&b| f1.at(a, b, l) * &k1 - f2.at(a, b, l) * &k2).collect())
            .collect();
        let denom = s * BigInt::from(l) * BigInt::from(l);
        Difference { pts: pts.into_iter().map(|a| rational::ratio(a, l)).collect(), values, denom }
    }

    fn as_i128(&self) -> Option<Vec<Vec<i128>>> {
        self.values.iter().map(|row| row.iter().map(|v| v.to_i128()).collect()).collect()
    }
}

/// `(max − min, argmin, argmax)` of `a[y] − b[y]`, preferring the first index.
fn spread<T: Ord + Clone + std::ops::Sub<Output = T>>(a: &[T], b: &[T]) -> (T, usize, usize) {
    let d = |y: usize| a[y].clone() - b[y].clone();
    let (mut lo, mut hi) = (0, 0);
    let (mut lo_v, mut hi_v) = (d(0), d(0));
    for y in 1..a.len() {
        let v = d(y);
        if v < lo_v {
            lo_v = v.clone();
            lo = y;
        }
        if v > hi_v {
            hi_v = v;
            hi = y;
        }
    }
    (hi_v - lo_v, lo, hi)
}

fn best_rectangle<T: Ord + Clone + Zero + std::ops::Sub<Output = T> + Send + Sync>(g: &[Vec<T>]) -> (T, [usize; 4]) {
    let l = g.len();
    (0..l)
        .into_par_iter()
        .map(|i1| {
            let mut best = (T::zero(), [0, 0, 0, 0]);
            for i2 in i1 + 1..l {
                let (v, lo, hi) = spread(&g[i2], &g[i1]);
                if v > best.0 {
                    best = (v, [i1, i2, lo.min(hi), lo.max(hi)]);
                }
            }
            best
        })
        .reduce(|| (T::zero(), [0, 0, 0, 0]), |a, b| if b.0 > a.0 { b } else { a })
}

fn best_point<T: Ord + Clone + Zero + Signed>(g: &[Vec<T>]) -> (T, [usize; 2]) {
    let mut best = (T::zero(), [0, 0]);
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let a = v.abs();
            if a > best.0 {
                best = (a, [i, j]);
            }
        }
    }
    best
}

fn to_rational(v: BigInt, denom: &BigInt) -> Rational {
    Rational::new(v, denom.clone())
}

/// `d_□(Z₁, Z₂) = sup_R |μ₁(R) − μ₂(R)|`, exact for step permutons.
pub fn d_square_permutons<P1, P2>(z1: &P1, z2: &P2) -> DistanceReport
where
    P1: Permuton + ?Sized,
    P2: Permuton + ?Sized,
{
    grid_d_square(&z1.to_grid(), &z2.to_grid())
}

fn grid_d_square(z1: &GridPermuton, z2: &GridPermuton) -> DistanceReport {
    let diff = Difference::new(z1, z2);
    let (v, idx) = match diff.as_i128() {
        Some(g) => {
            let (v, idx) = best_rectangle(&g);
            (BigInt::from(v), idx)
        }
        None => best_rectangle(&diff.values),
    };
    let p = |i: usize| diff.pts[i].clone();
    DistanceReport::new(
        to_rational(v, &diff.denom),
        Witness::Rectangle { x1: p(idx[0]), x2: p(idx[1]), y1: p(idx[2]), y2: p(idx[3]) },
    )
}

/// `d_∞(Z₁, Z₂) = ‖F₁ − F₂‖_∞`, exact for step permutons.
pub fn d_infty<P1, P2>(z1: &P1, z2: &P2) -> DistanceReport
where
    P1: Permuton + ?Sized,
    P2: Permuton + ?Sized,
{
    let diff = Difference::new(&z1.to_grid(), &z2.to_grid());
    let (v, [i, j]) = match diff.as_i128() {
        Some(g) => {
            let (v, idx) = best_point(&g);
            (BigInt::from(v), idx)
        }
        None => best_point(&diff.values),
    };
    DistanceReport::new(to_rational(v, &diff.denom), Witness::Point { x: diff.pts[i].clone(), y: diff.pts[j].clone() })
}

/// `d_□(σ, Z) = d_□(Z_σ, Z)`.
pub fn d_square_perm_permuton<P: Permuton + ?Sized>(sigma: &Permutation, z: &P) -> DistanceReport {
    grid_d_square(&GridPermuton::from_permutation(sigma), &z.to_grid())
}

/// `d_□` between permutations of any lengths, through their permutons.
pub fn d_square_any(s1: &Permutation, s2: &Permutation) -> DistanceReport {
    grid_d_square(&GridPermuton::from_permutation(s1), &GridPermuton::from_permutation(s2))
}

/// `F_k(i/k, j/k) = (1/k) Σ_{ℓ<=i} 1[σ(ℓ) <= j]` on the `(k+1)²` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalJointCdf {
    k: usize,
    counts: Vec<Vec<u64>>,
}

impl EmpiricalJointCdf {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `F_k(i/k, j/k)`.
    pub fn value(&self, i: usize, j: usize) -> Rational {
        rational::ratio(self.counts[i][j], self.k)
    }

    pub fn grid(&self) -> Vec<Vec<Rational>> {
        (0..=self.k).map(|i| (0..=self.k).map(|j| self.value(i, j)).collect()).collect()
    }
}

pub fn empirical_joint_cdf(sigma: &Permutation) -> EmpiricalJointCdf {
    let k = sigma.len();
    let mut counts = Vec::with_capacity(k + 1);
    let mut row = vec![0u64; k + 1];
    counts.push(row.clone());
    for i in 1..=k {
        row[sigma.at(i)..].iter_mut().for_each(|c| *c += 1);
        counts.push(row.clone());
    }
    EmpiricalJointCdf { k, counts }
}

/// Mass of `Z_σ` in each cell of the `m × m` grid, as integers over `n·m²`.
///
/// Position `ℓ` occupies `[(ℓ−1)/n, ℓ/n]`; measured in units of `1/(nm)`
/// that is `[(ℓ−1)m, ℓm]`, and grid band `i` is `[(i−1)n, in]`. The mass of
/// `Z_σ` in cell `(i, j)` is `Σ_ℓ ox·oy / (n·m²)` with `ox`, `oy` the overlaps.
pub fn block_masses(sigma: &Permutation, m: usize) -> Vec<Vec<u128>> {
    let n = sigma.len();
    let mut mass = vec![vec![0u128; m]; m];
    let split = |pos: usize| -> Vec<(usize, u128)> {
        let (lo, hi) = ((pos - 1) * m, pos * m);
        let first = lo / n;
        let last = (hi - 1) / n;
        (first..=last)
            .map(|band| {
                let (b_lo, b_hi) = (band * n, (band + 1) * n);
                (band, (hi.min(b_hi) - lo.max(b_lo)) as u128)
            })
            .collect()
    };
    for l in 1..=n {
        let xs = split(l);
        let ys = split(sigma.at(l));
        for &(i, ox) in &xs {
            for &(j, oy) in &ys {
                mass[i][j] += ox * oy;
            }
        }
    }
    mass
}

/// Result of [`concentration_experiment`].
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub k: usize,
    pub trials: usize,
    /// `16 · k^{-1/4}`.
    pub bound: f64,
    /// Resolution of the evaluation grid.
    pub resolution: usize,
    /// Additive error of the grid sup: `2/m + 4/k`.
    pub envelope: f64,
    /// Per trial: `max` of `|F − F_k|` over the `m`-grid corners.
    pub grid_d_infty: Vec<f64>,
    /// Per trial: `4 · (grid d_∞ + envelope)`, an upper bound on `d_□`.
    pub d_square_upper: Vec<f64>,
    pub successes: usize,
    pub success_frequency: f64,
    pub warning: Option<String>,
}

/// Default evaluation grid for [`concentration_experiment`].
pub const CONCENTRATION_RESOLUTION: usize = 256;

/// Samples `σ(k, Z)` `trials` times and counts how often
/// `d_□(Z, σ(k, Z)) <= 16 k^{-1/4}` is certified.
///
/// `d_∞` is evaluated on the `m`-grid only. Both cdfs are 1-Lipschitz in
/// each coordinate, so moving to the nearest corner costs at most `2/m`;
/// `4/k` is added on top for the resolution of `F_k`. The sandwich
/// `d_□ <= 4·d_∞` then gives a certified upper bound on `d_□`.
pub fn concentration_experiment<P, R>(
    z: &P,
    k: usize,
    trials: usize,
    resolution: usize,
    rng: &mut R,
) -> Result<ConcentrationReport>
where
    P: Permuton + ?Sized,
    R: Rng + ?Sized,
{
    if k == 0 || trials == 0 || resolution == 0 {
        return Err(Error::InvalidArgument("k, trials and resolution must be positive".into()));
    }
    let bound = 16.0 * (k as f64).powf(-0.25);
    let warning = (bound >= 1.0).then(|| format!("vacuous bound: 16·k^(-1/4) = {bound:.4} >= 1 for k = {k}"));
    let m = resolution;
    let envelope = 2.0 / m as f64 + 4.0 / k as f64;
    let master: u64 = rng.gen();
    let target: Vec<Vec<f64>> =
        (0..=m).map(|i| (0..=m).map(|j| z.joint_cdf_f64(i as f64 / m as f64, j as f64 / m as f64)).collect()).collect();
    let grid_d_infty: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let sigma = z_random_permutation(z, k, &mut seeded(derive_seed(master, t)));
            let mass = block_masses(&sigma, m);
            let scale = (k * m * m) as f64;
            let mut worst = 0.0f64;
            let mut col = vec![0u128; m + 1];
            for i in 1..=m {
                let mut run = 0u128;
                for j in 1..=m {
                    run += mass[i - 1][j - 1];
                    col[j] += run;
                    worst = worst.max((col[j] as f64 / scale - target[i][j]).abs());
                }
            }
            worst
        })
        .collect();
    let d_square_upper: Vec<f64> = grid_d_infty.iter().map(|d| 4.0 * (d + envelope)).collect();
    let successes = d_square_upper.iter().filter(|&&u| u <= bound).count();
    Ok(ConcentrationReport {
        k,
        trials,
        bound,
        resolution: m,
        envelope,
        grid_d_infty,
        d_square_upper,
        successes,
        success_frequency: successes as f64 / trials as f64,
        warning,
    })
}

/// `d_□(σ, Z_u) = D(σ)/n` bracket `[d_∞, 4·d_∞]` in `O(n²)`.
pub fn discrepancy_bracket(sigma: &Permutation) -> (Rational, Rational) {
    let d = d_infty_perm_uniform(sigma).value;
    let upper = &d * rational::int(4);
    (d, upper)
}
