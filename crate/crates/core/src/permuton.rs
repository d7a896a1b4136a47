//! Limit permutations.
//!
//! A permuton `Z` assigns to every `x ∈ [0,1]` a cdf `Z(x, ·)` on `[0,1]`
//! such that `∫₀¹ Z(x, y) dx = y`. Equivalently it is the law of a random
//! point `(X, Y)` with uniform marginals, where `X ~ U[0,1]` and `Y` given `X`
//! has cdf `Z(X, ·)`.
//!
//! Two concrete kinds are provided: the uniform permuton `Z(x, y) = y` and
//! step-density permutons given by an `m × m` doubly stochastic matrix `M`,
//! whose joint density is `m · M[⌈mx⌉][⌈my⌉]` (with `⌈0⌉` read as 1). The
//! permuton `Z_σ` of a permutation is the `m = n` case with `M` the
//! permutation matrix of `σ`.
//!
//! Every row cdf of a step permuton is continuous and piecewise linear, so
//! there are no atoms to handle.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::perm::Permutation;
use crate::rational::{self, Rational};
use crate::{Error, Result};

pub mod json;

pub use json::PermutonSpec;

/// Evaluation interface shared by all permuton kinds.
///
/// Exact methods take and return [`Rational`]s. The `*_f64` methods are the
/// fast paths used by samplers and large-scale approximations.
pub trait Permuton: Send + Sync {
    /// `Z(x, y)`.
    fn conditional_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational>;

    /// `F(x, y) = P(X <= x, Y <= y) = ∫₀ˣ Z(s, y) ds`.
    fn joint_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational>;

    /// `inf { y : Z(x, y) >= u }`.
    fn inverse_conditional_cdf(&self, x: &Rational, u: &Rational) -> Result<Rational>;

    /// `∫₀¹ Z(x, y) dx`; equals `y` for every valid permuton.
    fn mass_integral(&self, y: &Rational) -> Result<Rational>;

    fn joint_cdf_f64(&self, x: f64, y: f64) -> f64;

    /// Float generalized inverse used when sampling; `x, u ∈ [0, 1)`.
    fn inverse_conditional_cdf_f64(&self, x: f64, u: f64) -> f64;

    /// The same measure as a step-density permuton.
    fn to_grid(&self) -> GridPermuton;

    /// `μ([x1, x2] × [y1, y2])` by inclusion–exclusion of the joint cdf.
    fn rect_mass(&self, x1: &Rational, x2: &Rational, y1: &Rational, y2: &Rational) -> Result<Rational> {
        check_bounds(x1, x2)?;
        check_bounds(y1, y2)?;
        Ok(self.joint_cdf(x2, y2)? - self.joint_cdf(x1, y2)? - self.joint_cdf(x2, y1)? + self.joint_cdf(x1, y1)?)
    }
}

fn check_unit(v: &Rational) -> Result<()> {
    if v.is_negative() || *v > Rational::one() {
        return Err(Error::CoordinateOutOfRange { value: rational::format(v) });
    }
    Ok(())
}

fn check_bounds(lo: &Rational, hi: &Rational) -> Result<()> {
    check_unit(lo)?;
    check_unit(hi)?;
    if lo > hi {
        return Err(Error::InvertedBounds { low: rational::format(lo), high: rational::format(hi) });
    }
    Ok(())
}

/// `Z_u(x, y) = y`: the law of two independent uniforms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UniformPermuton;

pub fn uniform_permuton() -> UniformPermuton {
    UniformPermuton
}

impl Permuton for UniformPermuton {
    fn conditional_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        check_unit(x)?;
        check_unit(y)?;
        Ok(y.clone())
    }

    fn joint_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        check_unit(x)?;
        check_unit(y)?;
        Ok(x * y)
    }

    fn inverse_conditional_cdf(&self, x: &Rational, u: &Rational) -> Result<Rational> {
        check_unit(x)?;
        check_unit(u)?;
        Ok(u.clone())
    }

    fn mass_integral(&self, y: &Rational) -> Result<Rational> {
        check_unit(y)?;
        Ok(y.clone())
    }

    fn joint_cdf_f64(&self, x: f64, y: f64) -> f64 {
        x * y
    }

    fn inverse_conditional_cdf_f64(&self, _x: f64, u: f64) -> f64 {
        u
    }

    fn to_grid(&self) -> GridPermuton {
        GridPermuton::new(vec![vec![rational::one()]]).expect("1x1 identity is doubly stochastic")
    }
}

/// Step-density permuton on an `m × m` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPermuton {
    m: usize,
    matrix: Vec<Vec<Rational>>,
    /// `row_cum[r][c] = Σ_{j < c} M[r][j]`, `c ∈ 0..=m`.
    row_cum: Vec<Vec<Rational>>,
    /// `corner[i][j] = F(i/m, j/m) = (1/m) Σ_{r < i, c < j} M[r][c]`.
    corner: Vec<Vec<Rational>>,
    row_cum_f64: Vec<Vec<f64>>,
    corner_f64: Vec<Vec<f64>>,
}

impl GridPermuton {
    /// Validates a square, nonnegative, exactly doubly stochastic matrix.
    pub fn new(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let m = matrix.len();
        if m == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidMatrix(format!("row {} has {} entries, expected {m}", i + 1, row.len())));
            }
            if let Some(j) = row.iter().position(|v| v.is_negative()) {
                return Err(Error::InvalidMatrix(format!("negative entry at ({}, {})", i + 1, j + 1)));
            }
            let s: Rational = row.iter().sum();
            if !s.is_one() {
                return Err(Error::InvalidMatrix(format!("row {} sums to {}", i + 1, rational::format(&s))));
            }
        }
        for j in 0..m {
            let s: Rational = matrix.iter().map(|row| &row[j]).sum();
            if !s.is_one() {
                return Err(Error::InvalidMatrix(format!("column {} sums to {}", j + 1, rational::format(&s))));
            }
        }
        Ok(Self::build(matrix))
    }

    fn build(matrix: Vec<Vec<Rational>>) -> Self {
        let m = matrix.len();
        let row_cum: Vec<Vec<Rational>> = matrix
            .iter()
            .map(|row| {
                let mut acc = vec![rational::zero(); m + 1];
                for c in 0..m {
                    acc[c + 1] = &acc[c] + &row[c];
                }
                acc
            })
            .collect();
        let scale = rational::ratio(1, m);
        let mut corner = vec![vec![rational::zero(); m + 1]; m + 1];
        for i in 0..m {
            for j in 0..=m {
                corner[i + 1][j] = &corner[i][j] + &row_cum[i][j] * &scale;
            }
        }
        let to_f = |v: &Vec<Vec<Rational>>| -> Vec<Vec<f64>> {
            v.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect()
        };
        GridPermuton { m, row_cum_f64: to_f(&row_cum), corner_f64: to_f(&corner), matrix, row_cum, corner }
    }

    /// Parses entries with [`rational::parse`] and validates.
    pub fn from_strings<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let matrix = rows
            .iter()
            .map(|r| r.iter().map(|s| rational::parse(s.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrix)
    }

    /// `Z_σ`: density `n` on the cells `(i, σ(i))`, zero elsewhere.
    pub fn from_permutation(sigma: &Permutation) -> Self {
        let n = sigma.len();
        let mut matrix = vec![vec![rational::zero(); n]; n];
        for i in 1..=n {
            matrix[i - 1][sigma.at(i) - 1] = rational::one();
        }
        Self::build(matrix)
    }

    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    /// `M[i][j]` for 1-based `i, j`.
    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.matrix[i - 1][j - 1]
    }

    /// `μ` of cell `(i, j)`: `M[i][j] / m`.
    pub fn cell_mass(&self, i: usize, j: usize) -> Rational {
        self.entry(i, j) / rational::int(self.m)
    }

    /// Joint density `f(x, y) = m · M[⌈mx⌉][⌈my⌉]`.
    pub fn density_at(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        check_unit(x)?;
        check_unit(y)?;
        Ok(self.entry(self.band(x), self.band(y)) * rational::int(self.m))
    }

    /// `F(i/m, j/m)`, `0 <= i, j <= m`.
    pub fn corner_cdf(&self, i: usize, j: usize) -> &Rational {
        &self.corner[i][j]
    }

    /// Grid band `⌈m·t⌉` with `⌈0⌉` read as 1.
    fn band(&self, t: &Rational) -> usize {
        let scaled = t * rational::int(self.m);
        scaled.ceil().to_integer().to_usize().unwrap_or(1).clamp(1, self.m)
    }

    fn band_f64(&self, t: f64) -> usize {
        ((t * self.m as f64).ceil() as usize).clamp(1, self.m)
    }

    /// Row cdf of band `r` (1-based) at `y`.
    fn row_cdf(&self, r: usize, y: &Rational) -> Rational {
        let c = self.band(y);
        let within = y * rational::int(self.m) - rational::int(c - 1);
        &self.row_cum[r - 1][c - 1] + &self.matrix[r - 1][c - 1] * within
    }

    /// Lower-left corner index and in-cell offsets, `offset ∈ [0, 1]`.
    fn locate(&self, t: &Rational) -> (usize, Rational) {
        let scaled = t * rational::int(self.m);
        let mut i = scaled.floor().to_integer().to_usize().unwrap_or(0);
        if i >= self.m {
            i = self.m - 1;
        }
        let frac = scaled - rational::int(i);
        (i, frac)
    }

    pub fn is_permutation_matrix(&self) -> bool {
        self.matrix.iter().all(|row| row.iter().all(|v| v.is_zero() || v.is_one()))
    }

    /// The pattern of a permutation matrix, if this is one.
    pub fn as_permutation(&self) -> Option<Permutation> {
        if !self.is_permutation_matrix() {
            return None;
        }
        let values = self.matrix.iter().map(|row| row.iter().position(|v| v.is_one()).unwrap() + 1).collect();
        Permutation::new(values).ok()
    }
}

impl Permuton for GridPermuton {
    fn conditional_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        check_unit(x)?;
        check_unit(y)?;
        Ok(self.row_cdf(self.band(x), y))
    }

    fn joint_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        check_unit(x)?;
        check_unit(y)?;
        // bilinear inside each cell: the density is constant there
        let (i, a) = self.locate(x);
        let (j, b) = self.locate(y);
        let one = rational::one();
        let c = &self.corner;
        Ok(&c[i][j] * (&one - &a) * (&one - &b)
            + &c[i + 1][j] * &a * (&one - &b)
            + &c[i][j + 1] * (&one - &a) * &b
            + &c[i + 1][j + 1] * &a * &b)
    }

    fn inverse_conditional_cdf(&self, x: &Rational, u: &Rational) -> Result<Rational> {
        check_unit(x)?;
        check_unit(u)?;
        if u.is_zero() {
            return Ok(rational::zero());
        }
        let r = self.band(x) - 1;
        let cum = &self.row_cum[r];
        let c = (1..=self.m).find(|&c| &cum[c] >= u).expect("row cdf reaches 1");
        // cum[c-1] < u <= cum[c], so M[r][c-1] > 0
        let within = (u - &cum[c - 1]) / &self.matrix[r][c - 1];
        Ok((rational::int(c - 1) + within) / rational::int(self.m))
    }

    fn mass_integral(&self, y: &Rational) -> Result<Rational> {
        check_unit(y)?;
        let total: Rational = (1..=self.m).map(|r| self.row_cdf(r, y)).sum();
        Ok(total / rational::int(self.m))
    }

    fn joint_cdf_f64(&self, x: f64, y: f64) -> f64 {
        let m = self.m as f64;
        let (sx, sy) = (x.clamp(0.0, 1.0) * m, y.clamp(0.0, 1.0) * m);
        let i = (sx.floor() as usize).min(self.m - 1);
        let j = (sy.floor() as usize).min(self.m - 1);
        let (a, b) = (sx - i as f64, sy - j as f64);
        let c = &self.corner_f64;
        c[i][j] * (1.0 - a) * (1.0 - b)
            + c[i + 1][j] * a * (1.0 - b)
            + c[i][j + 1] * (1.0 - a) * b
            + c[i + 1][j + 1] * a * b
    }

    fn inverse_conditional_cdf_f64(&self, x: f64, u: f64) -> f64 {
        let r = self.band_f64(x) - 1;
        let cum = &self.row_cum_f64[r];
        // first column whose cumulative mass exceeds u
        let c = cum.partition_point(|&v| v <= u);
        if c == 0 {
            return 0.0;
        }
        if c > self.m {
            // u at or above the rounded row total: top of the last populated column
            let last = (1..=self.m).rev().find(|&c| !self.matrix[r][c - 1].is_zero()).unwrap_or(self.m);
            return last as f64 / self.m as f64;
        }
        let mass = cum[c] - cum[c - 1];
        let within = ((u - cum[c - 1]) / mass).clamp(0.0, 1.0);
        (c as f64 - 1.0 + within) / self.m as f64
    }

    fn to_grid(&self) -> GridPermuton {
        self.clone()
    }
}

/// Either concrete kind, as read from a JSON spec.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPermuton {
    Uniform(UniformPermuton),
    Grid(GridPermuton),
}

impl AnyPermuton {
    pub fn from_json(text: &str) -> Result<Self> {
        PermutonSpec::from_json(text)?.build()
    }

    pub fn to_spec(&self) -> PermutonSpec {
        match self {
            AnyPermuton::Uniform(_) => PermutonSpec::Uniform,
            AnyPermuton::Grid(g) => match g.as_permutation() {
                Some(p) => PermutonSpec::FromPermutation { values: p.into_values() },
                None => PermutonSpec::grid_of(g),
            },
        }
    }

    fn inner(&self) -> &dyn Permuton {
        match self {
            AnyPermuton::Uniform(u) => u,
            AnyPermuton::Grid(g) => g,
        }
    }
}

impl From<GridPermuton> for AnyPermuton {
    fn from(g: GridPermuton) -> Self {
        AnyPermuton::Grid(g)
    }
}

impl From<UniformPermuton> for AnyPermuton {
    fn from(u: UniformPermuton) -> Self {
        AnyPermuton::Uniform(u)
    }
}

impl Permuton for AnyPermuton {
    fn conditional_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        self.inner().conditional_cdf(x, y)
    }
    fn joint_cdf(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        self.inner().joint_cdf(x, y)
    }
    fn inverse_conditional_cdf(&self, x: &Rational, u: &Rational) -> Result<Rational> {
        self.inner().inverse_conditional_cdf(x, u)
    }
    fn mass_integral(&self, y: &Rational) -> Result<Rational> {
        self.inner().mass_integral(y)
    }
    fn joint_cdf_f64(&self, x: f64, y: f64) -> f64 {
        self.inner().joint_cdf_f64(x, y)
    }
    fn inverse_conditional_cdf_f64(&self, x: f64, u: f64) -> f64 {
        self.inner().inverse_conditional_cdf_f64(x, u)
    }
    fn to_grid(&self) -> GridPermuton {
        self.inner().to_grid()
    }
}

/// Exact matrix entry as written in JSON: a number or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(serde_json::Number),
    Text(String),
}

impl Entry {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Entry::Number(n) => rational::parse(&n.to_string()),
            Entry::Text(s) => rational::parse(s),
        }
    }
}
