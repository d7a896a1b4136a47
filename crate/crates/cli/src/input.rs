use std::fs;
use std::path::Path;

use permlimit::convergence::{self, read_sequence};
use permlimit::rng::{derive_seed, seeded};
use permlimit::sampling::{nested_sequence, z_random_permutation};
use permlimit::{parse_permutation, AnyPermuton, Error, Permutation, Result};

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

/// A permutation given inline (`"2 1 3"`) or as a path to a file holding
/// exactly one permutation (blank and `#` lines are ignored).
pub fn permutation(arg: &str) -> Result<Permutation> {
    let path = Path::new(arg);
    if !path.is_file() {
        return parse_permutation(arg);
    }
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'));
    let Some((i, first)) = lines.next() else {
        return Err(Error::EmptyPermutation.at_line(1));
    };
    let sigma = parse_permutation(first).map_err(|e| e.at_line(i + 1))?;
    if let Some((j, _)) = lines.next() {
        return Err(Error::InvalidArgument("expected a single permutation".into()).at_line(j + 1));
    }
    Ok(sigma)
}

/// A permuton given as `uniform`, inline JSON, or a path to a JSON spec.
pub fn permuton(arg: &str) -> Result<AnyPermuton> {
    let trimmed = arg.trim();
    if trimmed == "uniform" {
        return AnyPermuton::from_json(r#"{"kind":"uniform"}"#);
    }
    if trimmed.starts_with('{') {
        return AnyPermuton::from_json(trimmed);
    }
    AnyPermuton::from_json(&read_file(Path::new(trimmed))?)
}

/// Either a permutation (inline or file) or a permuton spec, for `dist`.
pub enum Operand {
    Perm(Permutation),
    Permuton(AnyPermuton),
}

pub fn operand(arg: &str) -> Result<Operand> {
    let trimmed = arg.trim();
    let is_spec = trimmed == "uniform" || trimmed.starts_with('{') || trimmed.ends_with(".json");
    if is_spec {
        permuton(trimmed).map(Operand::Permuton)
    } else {
        permutation(trimmed).map(Operand::Perm)
    }
}

/// `"2 1;1 2 3"` or `"2-1,1-2-3"`.
pub fn patterns(arg: &str) -> Result<Vec<Permutation>> {
    let sep = if arg.contains(';') { ';' } else { ',' };
    arg.split(sep).map(|p| parse_permutation(&p.replace('-', " "))).collect()
}

/// `10,100,1000`.
pub fn indices(arg: &str) -> Result<Vec<usize>> {
    arg.split(',').map(|t| t.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad index {t:?}")))).collect()
}

/// Sequence source. Generators:
///
/// * `constant:<perm>`: the same permutation forever
/// * `identity`: `id_1, id_2, …`
/// * `alternating`: `id_1, reverse_2, id_3, …`
/// * `nested:<permuton>`: prefixes of one point stream from the permuton
/// * `zrandom:<permuton>`: independent `σ(n, Z)` with per-index derived seeds
///
/// Anything else is read as a file with one permutation per line.
pub enum Source {
    Stream(Box<dyn Iterator<Item = Result<Permutation>>>),
    Nested(AnyPermuton),
    Independent(AnyPermuton),
}

impl Source {
    pub fn parse(arg: &str) -> Result<Self> {
        let (head, rest) = arg.split_once(':').unwrap_or((arg, ""));
        Ok(match head {
            "constant" => Source::Stream(Box::new(convergence::constant(parse_permutation(rest)?))),
            "identity" => Source::Stream(Box::new(convergence::identities())),
            "alternating" => Source::Stream(Box::new(convergence::alternating())),
            "nested" => Source::Nested(permuton(rest)?),
            "zrandom" => Source::Independent(permuton(rest)?),
            _ => {
                let text = read_file(Path::new(arg))?;
                let terms: Vec<Result<Permutation>> = read_sequence(text.as_bytes()).collect();
                Source::Stream(Box::new(terms.into_iter()))
            }
        })
    }

    pub fn is_randomized(&self) -> bool {
        !matches!(self, Source::Stream(_))
    }

    /// Terms at the given 1-based indices. Random sources only build the
    /// requested terms.
    pub fn terms_at(self, indices: &[usize], seed: u64) -> Result<(Vec<usize>, Vec<Permutation>)> {
        match self {
            Source::Stream(terms) => convergence::collect_terms(terms, indices),
            Source::Nested(z) => {
                let indices = convergence::normalize_indices(indices)?;
                let seq = nested_sequence(&z, *indices.last().unwrap(), &mut seeded(seed));
                let terms = indices.iter().map(|&n| seq.get(n)).collect();
                Ok((indices, terms))
            }
            Source::Independent(z) => {
                let indices = convergence::normalize_indices(indices)?;
                let terms = indices
                    .iter()
                    .map(|&n| z_random_permutation(&z, n, &mut seeded(derive_seed(seed, n as u64))))
                    .collect();
                Ok((indices, terms))
            }
        }
    }
}
