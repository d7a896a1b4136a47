use permlimit::convergence::{cauchy_of_terms, estimate_permuton, trajectory_of_terms};
use permlimit::density::{density_estimate_exact, density_in_permuton_mc, MAX_EXACT_K, MAX_EXACT_M};
use permlimit::metrics::{
    concentration_experiment, d_infty, d_infty_perm_uniform, d_square_perms, d_square_permutons, discrepancy,
    DistanceReport,
};
use permlimit::permuton::PermutonSpec;
use permlimit::rational::{self, Rational};
use permlimit::rng::seeded;
use permlimit::sampling::sample_points;
use permlimit::{
    occurrences, parse_permutation, pattern_distribution, AnyPermuton, Error, GridPermuton, Permuton, Result,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{self, Operand, Source};
use crate::{Format, Global, Metric};

/// Largest `n` for which `disc` computes `D(σ)` exactly; beyond it only the
/// `d_∞` bracket is reported.
const MAX_EXACT_DISCREPANCY: usize = 2000;

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn exact(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn float(r: &Rational) -> Value {
    json!(rational::to_f64(r))
}

fn seed_header(seed: u64) -> String {
    format!("# seed={seed}\n")
}

pub fn count(g: &Global, pattern: Option<&str>, perm: &str, k: Option<usize>) -> Result<String> {
    let pi = input::permutation(perm)?;
    if let Some(k) = k {
        let dist = pattern_distribution(&pi, k)?;
        if g.format == Format::Csv {
            return Ok(dist.to_csv());
        }
        let entries: Vec<Value> = dist
            .entries()
            .into_iter()
            .map(|(tau, c)| {
                let d = dist.density(&tau);
                json!({"pattern": tau.values(), "occurrences": c, "density": exact(&d), "density_float": float(&d)})
            })
            .collect();
        return Ok(to_json(&json!({"n": pi.len(), "k": k, "defined": dist.is_defined(), "entries": entries})));
    }
    let tau = parse_permutation(pattern.expect("clap requires --pattern without --k"))?;
    let c = occurrences(&tau, &pi);
    let d = permlimit::density(&tau, &pi);
    Ok(match g.format {
        Format::Csv => format!(
            "pattern,occurrences,density,density_float\n{},{c},{},{}\n",
            tau.dashed(),
            rational::format(&d),
            rational::to_f64(&d)
        ),
        Format::Json => to_json(&json!({
            "pattern": tau.values(),
            "n": pi.len(),
            "occurrences": c,
            "density": exact(&d),
            "density_float": float(&d),
        })),
    })
}

fn exact_applies(z: &AnyPermuton, k: usize) -> bool {
    k <= MAX_EXACT_K && z.to_grid().resolution() <= MAX_EXACT_M
}

pub fn density(
    g: &Global,
    pattern: &str,
    perm: Option<&str>,
    permuton: Option<&str>,
    want_exact: bool,
    want_mc: bool,
    trials: u64,
) -> Result<String> {
    let tau = parse_permutation(pattern)?;
    if let Some(perm) = perm {
        let pi = input::permutation(perm)?;
        let d = permlimit::density(&tau, &pi);
        return Ok(match g.format {
            Format::Csv => format!(
                "pattern,density,density_float\n{},{},{}\n",
                tau.dashed(),
                rational::format(&d),
                rational::to_f64(&d)
            ),
            Format::Json => to_json(&json!({
                "pattern": tau.values(),
                "n": pi.len(),
                "density": exact(&d),
                "density_float": float(&d),
            })),
        });
    }
    let z = input::permuton(permuton.expect("clap requires --perm or --permuton"))?;
    let use_exact = want_exact || (!want_mc && exact_applies(&z, tau.len()));
    let (est, seed) = if use_exact {
        (density_estimate_exact(&z.to_grid(), &tau)?, None)
    } else {
        (density_in_permuton_mc(&z, &tau, trials, &mut seeded(g.seed))?, Some(g.seed))
    };
    let mut out = serde_json::to_value(&est).expect("estimate serializes");
    if let Some(e) = &est.exact {
        out["exact"] = exact(e);
    }
    if let Some(s) = seed {
        out["seed"] = json!(s);
    }
    out["pattern"] = json!(tau.values());
    Ok(match g.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let head = seed.map(seed_header).unwrap_or_default();
            let exact_text = est.exact.as_ref().map(rational::format).unwrap_or_default();
            let method = out["method"].as_str().unwrap_or_default().to_string();
            format!(
                "{head}pattern,estimate,stderr,trials,method,exact\n{},{},{},{},{method},{exact_text}\n",
                tau.dashed(),
                est.estimate,
                est.stderr,
                est.trials
            )
        }
    })
}

pub fn sample(g: &Global, permuton: &str, n: usize) -> Result<String> {
    if n == 0 {
        return Err(Error::InvalidArgument("--n must be at least 1".into()));
    }
    let z = input::permuton(permuton)?;
    let points = sample_points(&z, n, &mut seeded(g.seed));
    Ok(match g.format {
        Format::Csv => seed_header(g.seed) + &points.to_csv(),
        Format::Json => to_json(&json!({"seed": g.seed, "n": n, "permutation": points.permutation().values()})),
    })
}

fn report(g: &Global, r: &DistanceReport) -> String {
    match g.format {
        Format::Json => to_json(r),
        Format::Csv => format!("value,value_float\n{},{}\n", rational::format(&r.value), r.value_float),
    }
}

fn as_grid(o: Operand) -> GridPermuton {
    match o {
        Operand::Perm(p) => GridPermuton::from_permutation(&p),
        Operand::Permuton(z) => z.to_grid(),
    }
}

pub fn dist(g: &Global, a: &str, b: &str, metric: Metric) -> Result<String> {
    let (a, b) = (input::operand(a)?, input::operand(b)?);
    let r = match (metric, a, b) {
        (Metric::Square, Operand::Perm(x), Operand::Perm(y)) if x.len() == y.len() => d_square_perms(&x, &y)?,
        (Metric::Square, a, b) => d_square_permutons(&as_grid(a), &as_grid(b)),
        (Metric::Infty, a, b) => d_infty(&as_grid(a), &as_grid(b)),
    };
    Ok(report(g, &r))
}

pub fn disc(g: &Global, perm: &str) -> Result<String> {
    let sigma = input::permutation(perm)?;
    let n = sigma.len();
    let scale = rational::int(n as i64);
    if n <= MAX_EXACT_DISCREPANCY {
        let r = discrepancy(&sigma);
        let normalized = &r.value / &scale;
        return Ok(match g.format {
            Format::Csv => format!(
                "n,method,value,value_float,normalized\n{n},exact,{},{},{}\n",
                rational::format(&r.value),
                r.value_float,
                rational::to_f64(&normalized)
            ),
            Format::Json => to_json(&json!({
                "n": n,
                "method": "exact",
                "value": exact(&r.value),
                "value_float": r.value_float,
                "normalized": exact(&normalized),
                "normalized_float": float(&normalized),
                "witness": r.witness,
            })),
        });
    }
    // n·d_∞ <= D(σ) <= 4n·d_∞
    let inf = d_infty_perm_uniform(&sigma);
    let lower = &inf.value * &scale;
    let upper = &lower * rational::int(4);
    Ok(match g.format {
        Format::Csv => format!(
            "n,method,lower,lower_float,upper,upper_float\n{n},bracket,{},{},{},{}\n",
            rational::format(&lower),
            rational::to_f64(&lower),
            rational::format(&upper),
            rational::to_f64(&upper)
        ),
        Format::Json => to_json(&json!({
            "n": n,
            "method": "bracket",
            "lower": exact(&lower),
            "lower_float": float(&lower),
            "upper": exact(&upper),
            "upper_float": float(&upper),
            "witness": inf.witness,
        })),
    })
}

pub fn estimate(g: &Global, perm: &str, m: usize) -> Result<String> {
    let sigma = input::permutation(perm)?;
    let z = estimate_permuton(&sigma, m)?;
    Ok(match g.format {
        Format::Json => to_json(&PermutonSpec::grid_of(&z)),
        Format::Csv => {
            let rows: Vec<String> =
                z.matrix().iter().map(|row| row.iter().map(rational::format).collect::<Vec<_>>().join(",")).collect();
            rows.join("\n") + "\n"
        }
    })
}

pub fn converge(g: &Global, seq: &str, patterns: &str, indices: &str, epsilon: Option<f64>) -> Result<String> {
    let patterns = input::patterns(patterns)?;
    let indices = input::indices(indices)?;
    let source = Source::parse(seq)?;
    let randomized = source.is_randomized();
    let (indices, terms) = source.terms_at(&indices, g.seed)?;
    let table = trajectory_of_terms(&patterns, indices.clone(), &terms)?;
    let cauchy = epsilon.map(|eps| cauchy_of_terms(indices, &terms, eps)).transpose()?;
    Ok(match g.format {
        Format::Csv => {
            let mut out = if randomized { seed_header(g.seed) } else { String::new() };
            out.push_str(&table.to_csv());
            if let Some(c) = &cauchy {
                out.push_str("\nindex,window_max,window_max_float,below_epsilon\n");
                for (w, &n) in c.indices.iter().enumerate() {
                    out.push_str(&format!(
                        "{n},{},{},{}\n",
                        rational::format(&c.window_max[w]),
                        c.window_max_float[w],
                        c.below_epsilon[w]
                    ));
                }
            }
            out
        }
        Format::Json => {
            let mut rows = Vec::new();
            for (r, (&n, &len)) in table.indices.iter().zip(&table.lengths).enumerate() {
                for (tau, v) in table.patterns.iter().zip(&table.values[r]) {
                    rows.push(json!({"index": n, "length": len, "pattern": tau.values(), "value": exact(v), "value_float": float(v)}));
                }
            }
            let mut out = json!({"source": seq, "trajectory": rows});
            if randomized {
                out["seed"] = json!(g.seed);
            }
            if let Some(c) = &cauchy {
                out["cauchy"] = serde_json::to_value(c).expect("report serializes");
            }
            to_json(&out)
        }
    })
}

pub fn experiment(g: &Global, permuton: &str, k: usize, trials: usize, resolution: usize) -> Result<String> {
    let z = input::permuton(permuton)?;
    let r = concentration_experiment(&z, k, trials, resolution, &mut seeded(g.seed))?;
    if let Some(w) = &r.warning {
        eprintln!("warning: {w}");
    }
    Ok(match g.format {
        Format::Json => {
            let mut out = serde_json::to_value(&r).expect("report serializes");
            out["seed"] = json!(g.seed);
            to_json(&out)
        }
        Format::Csv => {
            let mut out = seed_header(g.seed);
            out.push_str(&format!(
                "# k={} bound={} resolution={} envelope={}\n",
                r.k, r.bound, r.resolution, r.envelope
            ));
            out.push_str("trial,grid_d_infty,d_square_upper,success\n");
            for (t, (d, u)) in r.grid_d_infty.iter().zip(&r.d_square_upper).enumerate() {
                out.push_str(&format!("{},{d},{u},{}\n", t + 1, *u <= r.bound));
            }
            out
        }
    })
}
