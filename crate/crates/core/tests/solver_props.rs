use proptest::prelude::*;
use skt_lab::grid::total_mass;
use skt_lab::kernel::{compute_c1, discretize};
use skt_lab::local_solver::{run_local, LocalRunConfig};
use skt_lab::nonlocal_solver::{run, NonlocalRunConfig};
use skt_lab::{
    uniform_times, Field, Grid, KernelFamily, KernelKind, KernelProfile, ModelParams, NonlocalOperator, SolverSettings,
    Species, SpeciesPair,
};

fn operator(grid: Grid, n: u32) -> NonlocalOperator {
    let p = KernelProfile::new(KernelFamily::PolynomialBump, 1.0, grid.dim()).unwrap();
    let c = compute_c1(&p, 1024);
    NonlocalOperator::new(discretize(&p, &c, n, &grid, 8.0, KernelKind::Rescaled).unwrap(), grid).unwrap()
}

/// Classical RK4 for the spatially constant competition ODE.
fn rk4(params: &ModelParams, u0: [f64; 2], t: f64, steps: usize) -> [f64; 2] {
    let f = |u: [f64; 2]| {
        [
            u[0] * (params.alpha[0] - params.beta[0][0] * u[0] - params.beta[0][1] * u[1]),
            u[1] * (params.alpha[1] - params.beta[1][0] * u[0] - params.beta[1][1] * u[1]),
        ]
    };
    let dt = t / steps as f64;
    let mut u = u0;
    for _ in 0..steps {
        let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
        let k1 = f(u);
        let k2 = f(add(u, k1, dt / 2.0));
        let k3 = f(add(u, k2, dt / 2.0));
        let k4 = f(add(u, k3, dt));
        u = [
            u[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            u[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
    }
    u
}

fn competition() -> ModelParams {
    ModelParams { c: [0.1, 0.2], a: [1.0, 0.5], alpha: [1.0, 0.8], beta: [[1.0, 0.5], [0.3, 1.0]], t_final: 0.5 }
}

fn constant_pair(g: Grid, a: f64, b: f64) -> SpeciesPair {
    SpeciesPair::new(Field::constant(g, a), Field::constant(g, b)).unwrap()
}

#[test]
fn constant_data_follow_the_reaction_ode() {
    let params = competition();
    let u0 = [0.3, 1.2];
    let exact = rk4(&params, u0, params.t_final, 20_000);
    let settings = SolverSettings { dt_max: Some(1e-5), ..SolverSettings::default() };
    let g = Grid::new_1d(1.0, 64).unwrap();

    let cfg =
        NonlocalRunConfig::new(operator(g, 2), params, constant_pair(g, u0[0], u0[1]), settings, vec![params.t_final])
            .unwrap();
    let nl = run(&cfg).unwrap();
    let cfg = LocalRunConfig::new(g, params, constant_pair(g, u0[0], u0[1]), settings, vec![params.t_final]).unwrap();
    let loc = run_local(&cfg).unwrap();

    for traj in [&nl, &loc] {
        let end = &traj.snapshots[0].1;
        for s in Species::BOTH {
            for &v in end.get(s).values() {
                assert!((v - exact[s.index()]).abs() < 1e-5, "{v} vs {}", exact[s.index()]);
            }
        }
    }
}

#[test]
fn logistic_growth_matches_closed_form() {
    let params =
        ModelParams { c: [1.0; 2], a: [0.0; 2], alpha: [2.0, 0.0], beta: [[1.0, 0.0], [0.0, 0.0]], t_final: 1.0 };
    let g = Grid::new_1d(1.0, 32).unwrap();
    let settings = SolverSettings { dt_max: Some(1e-5), ..SolverSettings::default() };
    let cfg = NonlocalRunConfig::new(operator(g, 2), params, constant_pair(g, 0.1, 0.0), settings, vec![1.0]).unwrap();
    let traj = run(&cfg).unwrap();
    // u' = u(2 − u), u(0) = 0.1
    let k = 2.0;
    let exact = k / (1.0 + (k / 0.1 - 1.0) * (-2.0f64).exp());
    let got = traj.snapshots[0].1.u1().values()[5];
    assert!((got - exact).abs() < 1e-5, "{got} vs {exact}");
}

#[test]
fn snapshots_land_on_requested_times() {
    let params = ModelParams { t_final: 0.03, ..competition() };
    let g = Grid::new_1d(1.0, 64).unwrap();
    let times = uniform_times(0.03, 7);
    let u = SpeciesPair::new(Field::from_fn(g, |x| 1.0 + x[0]), Field::constant(g, 0.5)).unwrap();
    let cfg = NonlocalRunConfig::new(operator(g, 4), params, u, SolverSettings::default(), times.clone()).unwrap();
    let traj = run(&cfg).unwrap();
    let got: Vec<f64> = traj.snapshots.iter().map(|(t, _)| *t).collect();
    assert_eq!(got, times);
    assert_eq!(traj.diagnostics.last().unwrap().t, 0.03);
}

#[test]
fn two_dimensional_run_conserves_mass() {
    let params = ModelParams { alpha: [0.0; 2], beta: [[0.0; 2]; 2], t_final: 0.01, ..competition() };
    let g = Grid::new_2d(1.0, 1.0, 48, 48).unwrap();
    let u = SpeciesPair::new(
        Field::from_fn(g, |x| 0.2 + (-((x[0] - 0.4).powi(2) + (x[1] - 0.5).powi(2)) / 0.02).exp()),
        Field::from_fn(g, |x| 0.5 + 0.3 * (3.0 * x[1]).cos()),
    )
    .unwrap();
    let cfg = NonlocalRunConfig::new(operator(g, 2), params, u.clone(), SolverSettings::default(), vec![0.01]).unwrap();
    let end = &run(&cfg).unwrap().snapshots[0].1;
    for s in Species::BOTH {
        let (m0, m1) = (total_mass(u.get(s)), total_mass(end.get(s)));
        assert!(((m1 - m0) / m0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_data_stay_positive_and_dissipate_entropy(
        v1 in prop::collection::vec(0.0f64..2.0, 64),
        v2 in prop::collection::vec(0.0f64..2.0, 64),
        n in prop::sample::select(vec![2u32, 4]),
    ) {
        let params = ModelParams { alpha: [0.0; 2], beta: [[0.0; 2]; 2], t_final: 0.005, ..competition() };
        let g = Grid::new_1d(1.0, 64).unwrap();
        let u = SpeciesPair::new(Field::from_values(g, v1).unwrap(), Field::from_values(g, v2).unwrap()).unwrap();
        let settings = SolverSettings { diag_stride: 1, ..SolverSettings::default() };
        let cfg = NonlocalRunConfig::new(operator(g, n), params, u, settings, vec![]).unwrap();
        let traj = run(&cfg).unwrap();
        let d = &traj.diagnostics;
        for r in d {
            prop_assert!(r.min[0] >= -1e-10 && r.min[1] >= -1e-10);
        }
        for w in d.windows(2) {
            prop_assert!(w[1].entropy <= w[0].entropy + 1e-8, "{} -> {}", w[0].entropy, w[1].entropy);
        }
        let (first, last) = (d.first().unwrap(), d.last().unwrap());
        prop_assert!(last.entropy + last.dissipation <= first.entropy + 1e-6);
        for s in 0..2 {
            prop_assert!((last.mass[s] - first.mass[s]).abs() <= 1e-12 * first.mass[s].max(1e-300));
        }
    }

    #[test]
    fn local_solver_conserves_mass(
        v1 in prop::collection::vec(0.1f64..2.0, 48),
        v2 in prop::collection::vec(0.1f64..2.0, 48),
    ) {
        let params = ModelParams { alpha: [0.0; 2], beta: [[0.0; 2]; 2], t_final: 0.002, ..competition() };
        let g = Grid::new_1d(1.0, 48).unwrap();
        let u = SpeciesPair::new(Field::from_values(g, v1).unwrap(), Field::from_values(g, v2).unwrap()).unwrap();
        let cfg = LocalRunConfig::new(g, params, u.clone(), SolverSettings::default(), vec![0.002]).unwrap();
        let end = &run_local(&cfg).unwrap().snapshots[0].1;
        for s in Species::BOTH {
            let (m0, m1) = (total_mass(u.get(s)), total_mass(end.get(s)));
            prop_assert!(((m1 - m0) / m0).abs() <= 1e-12);
            prop_assert!(end.get(s).values().iter().all(|&x| x >= -1e-10));
        }
    }
}
