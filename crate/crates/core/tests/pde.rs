use num_complex::Complex64;
use osm_core::pde::{
    discretize, gmres_solve, random_vector, stationary_solve, strip_partition, sweep_mesh, sweep_subdomains,
    Forcing, GmresOptions, ParamSource, Preconditioner, StationaryOptions, SubdomainLayout, SweepOptions,
    DEFAULT_SEED,
};
use osm_core::symbol::{Family, ProblemParams, TransmissionParams};
use proptest::prelude::*;

fn dense_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

#[test]
fn fast_solver_matches_dense_elimination_on_small_grid() {
    let h = 1.0 / 9.0;
    let pp = ProblemParams::new(0.0, 0.0, 0.5, 1.0, 2, 0.1).unwrap();
    let dp = discretize(&pp, h, &Forcing::Point { col: 3, row: 5 }).unwrap();
    assert_eq!((dp.nx, dp.ny), (8, 8));
    let n = dp.n();
    let mut dense = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, j, v) in dp.operator.triplets() {
        dense[i][j] = v;
    }
    let want = dense_solve(dense, dp.rhs.clone());
    let got = dp.solve_exact(&dp.rhs).unwrap();
    let scale = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).norm() < 1e-12 * scale);
    }
}

#[test]
fn single_mode_converges_at_second_order() {
    let pp = ProblemParams::new(1.0, 1.0, 0.5, 1.0, 2, 0.1).unwrap();
    let width = 1.0;
    let symbol = std::f64::consts::PI.powi(2) * (1.0 + 1.0 / (width * width)) + pp.shift();
    let error = |h: f64| {
        let dp = discretize(&pp, h, &Forcing::Mode { mx: 1, my: 1 }).unwrap();
        let u = dp.solve_exact(&dp.rhs).unwrap();
        let mut worst: f64 = 0.0;
        for col in 1..=dp.nx {
            for row in 1..=dp.ny {
                let f = (std::f64::consts::PI * col as f64 * h / width).sin() * (std::f64::consts::PI * row as f64 * h).sin();
                let exact = -f / symbol;
                worst = worst.max((u[dp.index(col, row)] - exact).norm());
            }
        }
        worst
    };
    let (e1, e2) = (error(1.0 / 20.0), error(1.0 / 40.0));
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.1, "observed order {order}");
    assert!(e2 < 1e-3 / symbol.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn boolean_weights_partition_unity(j in 2usize..7, cells in 4usize..9, half in 0usize..3, ras in any::<bool>()) {
        let h = 1.0 / 64.0;
        let l = cells as f64 * h * 2.0;
        let delta = 2.0 * half as f64 * h;
        prop_assume!(delta < l);
        let pp = ProblemParams::new(1.0, 1.0, l, 0.25, j, delta.max(1e-300)).unwrap();
        let pp = if half == 0 { pp.with_delta(2.0 * h).unwrap() } else { pp };
        let dp = discretize(&pp, h, &Forcing::Zero).unwrap();
        let tp = if ras { TransmissionParams::Dirichlet } else { TransmissionParams::Robin1 { p: 3.0 } };
        let subs = strip_partition(&dp, &tp).unwrap();
        for col in 1..=dp.nx {
            let total: u32 = subs.iter().map(|s| u32::from(s.weight(col))).sum();
            prop_assert_eq!(total, 1);
        }
        for w in subs.windows(2) {
            let overlap = w[0].last_col() + 1 - w[1].first_col();
            prop_assert_eq!(overlap, (pp.delta / h).round() as usize + 1);
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let pp = ProblemParams::new(1.0, 1.0, 0.5, 1.0, 4, 0.05).unwrap();
    let dp = discretize(&pp, 1.0 / 40.0, &Forcing::Zero).unwrap();
    let subs = strip_partition(&dp, &TransmissionParams::Ventcell1 { p: 6.0, q: 0.02 }).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| stationary_solve(&dp, &subs, &StationaryOptions::default()).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.error_history, b.error_history);
}

#[test]
fn measured_contraction_matches_the_analysis() {
    let opts = SweepOptions {
        source: ParamSource::Numeric,
        ..Default::default()
    };
    for j in [2usize, 4] {
        let pp = ProblemParams::new(1.0, 1.0, 1.0, 1.0, j, 0.02).unwrap();
        for row in sweep_mesh(&pp, Family::Robin1, &[1.0 / 50.0, 1.0 / 100.0], &opts).unwrap() {
            let rel = (row.contraction - row.predicted_rho).abs() / row.predicted_rho;
            assert!(rel < 0.15, "J={j} h={}: {} vs {}", row.h, row.contraction, row.predicted_rho);
        }
    }
}

#[test]
fn iteration_counts_respect_the_family_hierarchy() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 1.0, 4, 0.04).unwrap();
    let opts = SweepOptions::default();
    let count = |f| sweep_mesh(&pp, f, &[1.0 / 50.0], &opts).unwrap()[0].iterations;
    let (ras, robin, ventcell) = (count(Family::Dirichlet), count(Family::Robin1), count(Family::Ventcell1));
    assert!(ras >= robin && robin >= ventcell, "{ras} {robin} {ventcell}");
}

#[test]
fn two_strip_list_is_the_two_subdomain_run() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 1.0, 2, 0.04).unwrap();
    let opts = SweepOptions::default();
    let h = 1.0 / 50.0;
    let a = sweep_subdomains(&pp, Family::Robin1, &[2], SubdomainLayout::FixedGlobal, h, &opts).unwrap();
    let b = sweep_mesh(&pp, Family::Robin1, &[h], &opts).unwrap();
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].iterations, b[0].iterations);
    assert_eq!(a[0].predicted_rho, b[0].predicted_rho);
}

#[test]
fn preconditioning_reduces_gmres_iterations() {
    let pp = ProblemParams::new(1.0, 1.0, 1.0, 1.0, 4, 0.02).unwrap();
    let dp = discretize(&pp, 1.0 / 100.0, &Forcing::Zero).unwrap();
    let b = random_vector(dp.n(), DEFAULT_SEED);
    let subs = strip_partition(&dp, &TransmissionParams::Robin1 { p: 7.0 }).unwrap();
    let (oras, x) = gmres_solve(&dp, &Preconditioner::Schwarz(subs), &b, &GmresOptions::default());
    let plain_opts = GmresOptions {
        itmax: 4 * oras.iterations,
        ..Default::default()
    };
    let (plain, _) = gmres_solve(&dp, &Preconditioner::Identity, &b, &plain_opts);
    assert!(oras.converged);
    assert!(plain.iterations > oras.iterations);
    let ax = dp.apply(&x);
    let rel = ax.iter().zip(&b).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt() / b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    assert!(rel <= 2e-6);
}

#[test]
fn stalled_iteration_is_not_reported_converged() {
    let pp = ProblemParams::new(0.0, 0.0, 0.25, 1.0, 4, 0.05).unwrap();
    let dp = discretize(&pp, 1.0 / 40.0, &Forcing::Zero).unwrap();
    let subs = strip_partition(&dp, &TransmissionParams::Robin1 { p: 1e-3 }).unwrap();
    let rep = stationary_solve(&dp, &subs, &StationaryOptions { itmax: 50, divergence: 1e2, ..Default::default() }).unwrap();
    assert!(!rep.converged);
}
