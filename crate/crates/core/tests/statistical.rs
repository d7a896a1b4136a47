mod common;

use common::{naive_d_square_perms, naive_discrepancy, p};
use permlimit::convergence::{cauchy_check, estimate_permuton, trajectory_of_terms};
use permlimit::density::density_in_permuton_exact;
use permlimit::metrics::{
    d_infty, d_infty_perm_uniform, d_square_perm_permuton, d_square_perms, d_square_permutons, discrepancy,
    discrepancy_bracket, empirical_joint_cdf,
};
use permlimit::perm::all_permutations;
use permlimit::rational::{self, int, ratio};
use permlimit::rng::{derive_seed, seeded};
use permlimit::sampling::{nested_sequence, z_random_permutation};
use permlimit::{density, uniform_permuton, GridPermuton, Permutation, Permuton};

fn diag() -> GridPermuton {
    GridPermuton::from_strings(&[vec!["0.8", "0.2"], vec!["0.2", "0.8"]]).unwrap()
}

fn scan_rect<A: Permuton, B: Permuton>(a: &A, b: &B, res: usize) -> f64 {
    let f = |z: &dyn Permuton, i: usize, j: usize| z.joint_cdf_f64(i as f64 / res as f64, j as f64 / res as f64);
    let g: Vec<Vec<f64>> = (0..=res).map(|i| (0..=res).map(|j| f(a, i, j) - f(b, i, j)).collect()).collect();
    let mut best = 0.0f64;
    for x1 in 0..=res {
        for x2 in x1..=res {
            let d: Vec<f64> = (0..=res).map(|y| g[x2][y] - g[x1][y]).collect();
            let hi = d.iter().cloned().fold(f64::MIN, f64::max);
            let lo = d.iter().cloned().fold(f64::MAX, f64::min);
            best = best.max(hi - lo);
        }
    }
    best
}

#[test]
fn identity_against_reverse_matches_enumeration() {
    let (a, b) = (Permutation::identity(10), Permutation::reverse(10));
    assert_eq!(d_square_perms(&a, &b).unwrap().value, naive_d_square_perms(&a, &b));
}

#[test]
fn identity_permuton_against_uniform_matches_dense_scan() {
    let z = GridPermuton::from_permutation(&Permutation::identity(4));
    let exact = rational::to_f64(&d_square_permutons(&z, &uniform_permuton()).value);
    let scan = scan_rect(&z, &uniform_permuton(), 64);
    assert!(scan <= exact + 1e-12 && exact <= scan + 4.0 / 64.0, "{scan} vs {exact}");
}

#[test]
fn sup_distance_matches_dense_scan() {
    let z = GridPermuton::from_permutation(&p("2 1"));
    let exact = d_infty(&z, &uniform_permuton()).value;
    assert_eq!(exact, ratio(1, 4));
    let res = 128;
    let scan = (0..=res)
        .flat_map(|i| (0..=res).map(move |j| (i as f64 / res as f64, j as f64 / res as f64)))
        .map(|(x, y)| (z.joint_cdf_f64(x, y) - uniform_permuton().joint_cdf_f64(x, y)).abs())
        .fold(0.0, f64::max);
    let e = rational::to_f64(&exact);
    assert!(scan <= e + 1e-12 && e <= scan + 2.0 / res as f64);
}

#[test]
fn identity_discrepancy_matches_enumeration() {
    let id = Permutation::identity(8);
    assert_eq!(discrepancy(&id).value, naive_discrepancy(&id));
    assert_eq!(discrepancy(&p("1")).value, int(0));
}

#[test]
fn bracket_contains_discrepancy() {
    let mut rng = seeded(3);
    for n in [5, 20, 60] {
        let s = z_random_permutation(&uniform_permuton(), n, &mut rng);
        let d = discrepancy(&s).value / int(n as i64);
        let (lo, hi) = discrepancy_bracket(&s);
        assert!(lo <= d && d <= hi, "n={n}");
    }
}

#[test]
fn uniform_sample_is_quasirandom() {
    // empirical threshold: D(σ)/n <= 4·d_∞ < 0.05 at n = 10⁴
    let s = z_random_permutation(&uniform_permuton(), 10_000, &mut seeded(4));
    let upper = rational::to_f64(&d_infty_perm_uniform(&s).value) * 4.0;
    assert!(upper < 0.05, "{upper}");
}

#[test]
fn empirical_cdf_has_uniform_marginals() {
    let s = z_random_permutation(&diag(), 40, &mut seeded(5));
    let f = empirical_joint_cdf(&s);
    for i in 0..=40 {
        assert_eq!(f.value(i, 40), ratio(i, 40));
        assert_eq!(f.value(40, i), ratio(i, 40));
        for j in 0..40 {
            assert!(f.value(i, j) <= f.value(i, j + 1));
            if i < 40 {
                assert!(f.value(i, j) <= f.value(i + 1, j));
            }
        }
    }
}

#[test]
fn two_point_samples_follow_exact_density() {
    let z = diag();
    let t = rational::to_f64(&density_in_permuton_exact(&z, &p("1 2")).unwrap());
    let mut rng = seeded(6);
    let trials = 100_000;
    let hits = (0..trials).filter(|_| z_random_permutation(&z, 2, &mut rng) == p("1 2")).count();
    let freq = hits as f64 / trials as f64;
    assert!((freq - t).abs() <= 3.0 * (t * (1.0 - t) / trials as f64).sqrt(), "{freq} vs {t}");
}

#[test]
fn uniform_inversion_density_trajectory() {
    let indices = vec![100, 1_000, 10_000];
    let terms: Vec<Permutation> = indices
        .iter()
        .map(|&n| z_random_permutation(&uniform_permuton(), n, &mut seeded(derive_seed(7, n as u64))))
        .collect();
    let t = trajectory_of_terms(&[p("2 1")], indices, &terms).unwrap();
    let v = rational::to_f64(&t.values[2][0]);
    assert!((v - 0.5).abs() <= 0.02, "{v}");
}

#[test]
fn nested_windows_shrink() {
    let seq = nested_sequence(&diag(), 400, &mut seeded(8));
    let r = cauchy_check(seq.iter().map(Ok), &[25, 50, 100, 200, 400], 0.1).unwrap();
    assert!(r.window_max.windows(2).all(|w| w[0] >= w[1]));
    assert!(r.window_max[0] > r.window_max[3], "{:?}", r.window_max_float);
}

#[test]
fn estimate_closes_in_on_source() {
    // mean over seeds of d_□(Z, estimate(σ(n, Z), 4)) for n = 10³, 10⁴, 10⁵
    let z = diag();
    let means: Vec<f64> = [1_000, 10_000, 100_000]
        .iter()
        .map(|&n| {
            (0..4u64)
                .map(|s| {
                    let sigma = z_random_permutation(&z, n, &mut seeded(derive_seed(9, s)));
                    rational::to_f64(&d_square_permutons(&z, &estimate_permuton(&sigma, 4).unwrap()).value)
                })
                .sum::<f64>()
                / 4.0
        })
        .collect();
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
}

#[test]
fn distance_and_density_gaps_fall_together() {
    // both modes of convergence along one nested sequence
    let z = diag();
    let seq = nested_sequence(&z, 1000, &mut seeded(10));
    let s3 = all_permutations(3);
    let limits: Vec<_> = s3.iter().map(|t| density_in_permuton_exact(&z, t).unwrap()).collect();
    let mut dist = Vec::new();
    let mut gap = Vec::new();
    for n in [10, 100, 1000] {
        let sigma = seq.get(n);
        dist.push(rational::to_f64(&d_square_perm_permuton(&sigma, &z).value));
        let g = s3
            .iter()
            .zip(&limits)
            .map(|(t, l)| (rational::to_f64(&density(t, &sigma)) - rational::to_f64(l)).abs())
            .fold(0.0, f64::max);
        gap.push(g);
    }
    assert!(dist[2] < dist[0] && gap[2] < gap[0], "{dist:?} {gap:?}");
    assert!(dist[2] < 0.15 && gap[2] < 0.05, "{dist:?} {gap:?}");
}
