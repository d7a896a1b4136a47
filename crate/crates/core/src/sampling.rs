//! Z-random permutations.
//!
//! Each point consumes exactly two uniform variates from the caller's source,
//! in order: `X` and then the `U` fed through the inverse row cdf to get `Y`.
//! Variates are 53-bit floats in `[0, 1)`. Exact ties, which have probability
//! zero in theory, are broken by point index.

use std::cmp::Ordering;

use rand::Rng;

use crate::perm::Permutation;
use crate::permuton::Permuton;

#[derive(Clone, Debug, PartialEq)]
pub struct PointSample {
    pub points: Vec<(f64, f64)>,
    /// Seed of the source that produced the sample, when known.
    pub seed: Option<u64>,
}

impl PointSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `R(i) = |{j : X_j <= X_i}|`, ties by index.
    pub fn x_ranks(&self) -> Permutation {
        rank_by(&self.points, |p| p.0)
    }

    /// `S(i) = |{j : Y_j <= Y_i}|`, ties by index.
    pub fn y_ranks(&self) -> Permutation {
        rank_by(&self.points, |p| p.1)
    }

    /// `S ∘ R⁻¹`.
    pub fn permutation(&self) -> Permutation {
        self.y_ranks().compose(&self.x_ranks().inverse()).expect("equal lengths")
    }

    /// Vertical ranks read off in order of increasing horizontal coordinate.
    pub fn permutation_by_sorting(&self) -> Permutation {
        let mut by_x: Vec<usize> = (0..self.len()).collect();
        by_x.sort_by(|&a, &b| self.points[a].0.total_cmp(&self.points[b].0).then(a.cmp(&b)));
        let ys: Vec<f64> = by_x.iter().map(|&i| self.points[i].1).collect();
        // ties in Y are broken by original point index, not sorted position
        Permutation::standardize_by(ys.len(), |a, b| ys[a].total_cmp(&ys[b]).then(by_x[a].cmp(&by_x[b])))
    }

    /// Pattern of the first `n` points.
    pub fn prefix_permutation(&self, n: usize) -> Permutation {
        let prefix = PointSample { points: self.points[..n].to_vec(), seed: None };
        prefix.permutation()
    }

    /// `x,y` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

fn rank_by(points: &[(f64, f64)], key: impl Fn(&(f64, f64)) -> f64) -> Permutation {
    Permutation::standardize_by(points.len(), |a, b| -> Ordering { key(&points[a]).total_cmp(&key(&points[b])) })
}

/// `n` iid points of the measure associated with `z`.
pub fn sample_points<P, R>(z: &P, n: usize, rng: &mut R) -> PointSample
where
    P: Permuton + ?Sized,
    R: Rng + ?Sized,
{
    let points = (0..n)
        .map(|_| {
            let x: f64 = rng.gen();
            let u: f64 = rng.gen();
            (x, z.inverse_conditional_cdf_f64(x, u))
        })
        .collect();
    PointSample { points, seed: None }
}

/// `σ(n, Z)`; `n >= 1`.
pub fn z_random_permutation<P, R>(z: &P, n: usize, rng: &mut R) -> Permutation
where
    P: Permuton + ?Sized,
    R: Rng + ?Sized,
{
    assert!(n >= 1, "a Z-random permutation needs at least one point");
    sample_points(z, n, rng).permutation()
}

/// Coupled sequence `σ_1, σ_2, …` read off one shared point stream, so that
/// each `σ_n` is the pattern of the first `n` points and therefore occurs in
/// every later `σ_m`.
#[derive(Clone, Debug)]
pub struct NestedSequence {
    sample: PointSample,
}

pub fn nested_sequence<P, R>(z: &P, n_max: usize, rng: &mut R) -> NestedSequence
where
    P: Permuton + ?Sized,
    R: Rng + ?Sized,
{
    assert!(n_max >= 1);
    NestedSequence { sample: sample_points(z, n_max, rng) }
}

impl NestedSequence {
    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    /// `σ_n` for `1 <= n <= n_max`.
    pub fn get(&self, n: usize) -> Permutation {
        assert!((1..=self.len()).contains(&n), "index {n} outside 1..={}", self.len());
        self.sample.prefix_permutation(n)
    }

    pub fn points(&self) -> &PointSample {
        &self.sample
    }

    /// Lazily yields `σ_1, …, σ_{n_max}`.
    pub fn iter(&self) -> impl Iterator<Item = Permutation> + '_ {
        (1..=self.len()).map(|n| self.get(n))
    }
}
