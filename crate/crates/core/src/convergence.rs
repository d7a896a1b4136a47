//! Finite-prefix diagnostics for permutation sequences.
//!
//! Convergence is a statement about infinite sequences. Everything here looks
//! at finitely many terms and reports per-index values, never verdicts about
//! the limit.
//!
//! Sequences are pulled from any iterator of `Result<Permutation>`, so long
//! files and generators stream; only the terms at requested indices are kept.

use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;

use crate::metrics::{block_masses, d_square_any, d_square_perms};
use crate::perm::{self, Permutation};
use crate::permuton::GridPermuton;
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Largest union breakpoint grid accepted by [`cauchy_check`] for terms of
/// different lengths.
pub const MAX_CAUCHY_GRID: usize = 1024;

/// `t(τ, σ_n)` for selected indices `n` and patterns `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub patterns: Vec<Permutation>,
    /// 1-based sequence indices, increasing.
    pub indices: Vec<usize>,
    /// `|σ_n|` for each index.
    pub lengths: Vec<usize>,
    /// `values[row][col] = t(patterns[col], σ_{indices[row]})`.
    pub values: Vec<Vec<Rational>>,
}

impl TrajectoryTable {
    /// Long format: `index,length,pattern,value,value_float`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,length,pattern,value,value_float\n");
        for (row, (&n, &len)) in self.indices.iter().zip(&self.lengths).enumerate() {
            for (tau, v) in self.patterns.iter().zip(&self.values[row]) {
                out.push_str(&format!("{n},{len},{},{},{}\n", tau.dashed(), rational::format(v), rational::to_f64(v)));
            }
        }
        out
    }

    /// Column of values for one pattern.
    pub fn series(&self, tau: &Permutation) -> Option<Vec<Rational>> {
        let col = self.patterns.iter().position(|p| p == tau)?;
        Some(self.values.iter().map(|row| row[col].clone()).collect())
    }
}

/// Sorted, deduplicated 1-based indices; rejects 0 and the empty list.
pub fn normalize_indices(indices: &[usize]) -> Result<Vec<usize>> {
    if indices.contains(&0) {
        return Err(Error::InvalidArgument("sequence indices are 1-based".into()));
    }
    let mut out = indices.to_vec();
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(Error::InvalidArgument("no indices requested".into()));
    }
    Ok(out)
}

/// Pulls the terms at `indices` (1-based) from `seq`.
pub fn collect_terms<I>(seq: I, indices: &[usize]) -> Result<(Vec<usize>, Vec<Permutation>)>
where
    I: IntoIterator<Item = Result<Permutation>>,
{
    let indices = normalize_indices(indices)?;
    let mut terms = Vec::with_capacity(indices.len());
    let mut wanted = indices.iter().peekable();
    for (pos, item) in seq.into_iter().enumerate() {
        let Some(&&next) = wanted.peek() else { break };
        if pos + 1 == next {
            terms.push(item?);
            wanted.next();
        }
    }
    if let Some(&&missing) = wanted.peek() {
        return Err(Error::InvalidArgument(format!("sequence ended before index {missing}")));
    }
    Ok((indices, terms))
}

/// Trajectories `n ↦ t(τ, σ_n)` at the requested indices.
pub fn density_trajectory<I>(seq: I, patterns: &[Permutation], indices: &[usize]) -> Result<TrajectoryTable>
where
    I: IntoIterator<Item = Result<Permutation>>,
{
    let (indices, terms) = collect_terms(seq, indices)?;
    trajectory_of_terms(patterns, indices, &terms)
}

/// [`density_trajectory`] over terms already pulled at `indices`.
pub fn trajectory_of_terms(
    patterns: &[Permutation],
    indices: Vec<usize>,
    terms: &[Permutation],
) -> Result<TrajectoryTable> {
    if patterns.is_empty() {
        return Err(Error::InvalidArgument("no patterns requested".into()));
    }
    if indices.len() != terms.len() {
        return Err(Error::LengthMismatch { left: indices.len(), right: terms.len() });
    }
    let values =
        terms.par_iter().map(|sigma| patterns.par_iter().map(|tau| perm::density(tau, sigma)).collect()).collect();
    Ok(TrajectoryTable {
        patterns: patterns.to_vec(),
        lengths: terms.iter().map(Permutation::len).collect(),
        indices,
        values,
    })
}

/// Tail-window maxima of pairwise `d_□`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyReport {
    pub indices: Vec<usize>,
    pub lengths: Vec<usize>,
    #[serde(serialize_with = "serialize_rationals")]
    pub window_max: Vec<Rational>,
    pub window_max_float: Vec<f64>,
    pub epsilon: f64,
    /// `window_max[w] <= epsilon`.
    pub below_epsilon: Vec<bool>,
    #[serde(skip)]
    pub pairwise: Vec<Vec<Rational>>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

fn pair_distance(a: &Permutation, b: &Permutation) -> Result<Rational> {
    if a.len() == b.len() {
        return Ok(d_square_perms(a, b)?.value);
    }
    // {i/|a|} and {j/|b|} share gcd + 1 points
    let g = num_integer::gcd(a.len(), b.len());
    let points = a.len() + b.len() - g + 1;
    if points > MAX_CAUCHY_GRID {
        return Err(Error::Guard(format!(
            "d_□ between lengths {} and {} needs a {points}-point grid (limit {MAX_CAUCHY_GRID})",
            a.len(),
            b.len()
        )));
    }
    Ok(d_square_any(a, b).value)
}

/// For each requested index `n₀`, `max d_□(σ_n, σ_m)` over requested
/// `n, m >= n₀`.
pub fn cauchy_check<I>(seq: I, indices: &[usize], epsilon: f64) -> Result<CauchyReport>
where
    I: IntoIterator<Item = Result<Permutation>>,
{
    let (indices, terms) = collect_terms(seq, indices)?;
    cauchy_of_terms(indices, &terms, epsilon)
}

/// [`cauchy_check`] over terms already pulled at `indices`.
pub fn cauchy_of_terms(indices: Vec<usize>, terms: &[Permutation], epsilon: f64) -> Result<CauchyReport> {
    if indices.len() != terms.len() {
        return Err(Error::LengthMismatch { left: indices.len(), right: terms.len() });
    }
    let t = terms.len();
    let pairs: Vec<(usize, usize)> = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).collect();
    let dists: Vec<Rational> =
        pairs.par_iter().map(|&(i, j)| pair_distance(&terms[i], &terms[j])).collect::<Result<_>>()?;
    let mut pairwise = vec![vec![rational::zero(); t]; t];
    for (&(i, j), d) in pairs.iter().zip(dists) {
        pairwise[i][j] = d.clone();
        pairwise[j][i] = d;
    }
    let mut window_max = vec![rational::zero(); t];
    for w in (0..t).rev() {
        let mut best = if w + 1 < t { window_max[w + 1].clone() } else { rational::zero() };
        for d in &pairwise[w][w..] {
            if *d > best {
                best = d.clone();
            }
        }
        window_max[w] = best;
    }
    let window_max_float: Vec<f64> = window_max.iter().map(rational::to_f64).collect();
    Ok(CauchyReport {
        lengths: terms.iter().map(Permutation::len).collect(),
        indices,
        below_epsilon: window_max_float.iter().map(|&v| v <= epsilon).collect(),
        window_max,
        window_max_float,
        epsilon,
        pairwise,
    })
}

/// Finite-prefix reading of "bounded lengths, hence eventually constant".
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventualConstancy {
    /// Number of terms inspected.
    pub observed: usize,
    /// False when the last term sets a new length record, which is what a
    /// strictly growing sequence looks like on any prefix.
    pub bounded_lengths: bool,
    /// Earliest 1-based index from which all observed terms coincide, when
    /// that tail holds at least two terms.
    pub constant_tail_from: Option<usize>,
    /// Always `"finite-prefix heuristic"`.
    pub scope: &'static str,
}

pub fn eventually_constant_check(seq: &[Permutation]) -> EventualConstancy {
    let observed = seq.len();
    let bounded_lengths = match seq.split_last() {
        None => true,
        Some((last, rest)) => rest.iter().any(|s| s.len() >= last.len()),
    };
    let constant_tail_from = seq.last().and_then(|last| {
        let start = seq.iter().rposition(|s| s != last).map_or(0, |i| i + 1);
        (observed - start >= 2).then_some(start + 1)
    });
    EventualConstancy { observed, bounded_lengths, constant_tail_from, scope: "finite-prefix heuristic" }
}

/// Step permuton on an `m × m` grid approximating `Z_σ`.
///
/// Each cell gets `m` times the mass `Z_σ` puts on it, so the result is the
/// conditional expectation of the density of `Z_σ` on the `m`-grid. It is
/// doubly stochastic for every `m`, and when `m | n` it coincides with the
/// scaled block counts `(m/n)·|{ℓ : ⌈mℓ/n⌉ = i, ⌈mσ(ℓ)/n⌉ = j}|`.
pub fn estimate_permuton(sigma: &Permutation, m: usize) -> Result<GridPermuton> {
    let n = sigma.len();
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("resolution {m} must lie in 1..={n}")));
    }
    let mass = block_masses(sigma, m);
    let scale = (n * m) as u128;
    let matrix = mass.into_iter().map(|row| row.into_iter().map(|c| rational::ratio(c, scale)).collect()).collect();
    GridPermuton::new(matrix).map_err(|e| Error::Internal(format!("block projection not doubly stochastic: {e}")))
}

/// Terms of a newline-separated permutation file, tagged with line numbers.
/// Blank lines and lines starting with `#` are skipped.
pub fn read_sequence<R: BufRead>(reader: R) -> impl Iterator<Item = Result<Permutation>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(Error::InvalidArgument(e.to_string()).at_line(i + 1))),
        };
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            return None;
        }
        Some(perm::parse_permutation(t).map_err(|e| e.at_line(i + 1)))
    })
}

/// `σ, σ, σ, …`
pub fn constant(sigma: Permutation) -> impl Iterator<Item = Result<Permutation>> {
    std::iter::repeat(sigma).map(Ok)
}

/// `id_1, id_2, …`
pub fn identities() -> impl Iterator<Item = Result<Permutation>> {
    (1..).map(|n| Ok(Permutation::identity(n)))
}

/// `id_1, reverse_2, id_3, reverse_4, …`
pub fn alternating() -> impl Iterator<Item = Result<Permutation>> {
    (1..).map(|n| Ok(if n % 2 == 1 { Permutation::identity(n) } else { Permutation::reverse(n) }))
}
