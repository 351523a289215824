use proptest::prelude::*;
use skt_lab::grid::{format_snapshot, parse_snapshot, read_snapshot, write_snapshot};
use skt_lab::study::config::{Bumps, DualSpec, GridSpec, KernelSpec};
use skt_lab::study::{InitialSpec, StudyConfig, TestFunction};
use skt_lab::{Field, Grid, KernelFamily, ModelParams, SolverSettings, Species};

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

fn bumps(dim: usize) -> impl Strategy<Value = Bumps> {
    (1usize..4).prop_flat_map(move |m| {
        (
            finite(0.0, 1.0),
            prop::collection::vec(finite(0.0, 3.0), m),
            prop::collection::vec(finite(0.0, 1.0), m),
            prop::collection::vec(finite(0.0, 1.0), if dim == 2 { m } else { 0 }),
            prop::collection::vec(finite(0.01, 0.5), m),
        )
            .prop_map(|(background, amplitudes, centers_x, centers_y, widths)| Bumps {
                background,
                amplitudes,
                centers_x,
                centers_y,
                widths,
            })
    })
}

fn initial(dim: usize) -> impl Strategy<Value = InitialSpec> {
    prop_oneof![
        (finite(0.0, 5.0), finite(0.0, 5.0)).prop_map(|(a, b)| InitialSpec::Constant([a, b])),
        (bumps(dim), bumps(dim)).prop_map(|(a, b)| InitialSpec::Gaussian([a, b])),
        (finite(0.0, 1.0), finite(0.0, 1.0), finite(0.0, 2.0), 1u32..5).prop_map(|(a1, a2, extra, mode)| {
            InitialSpec::Cosine { mean: [a1 + extra, a2 + extra], amplitude: [a1, a2], mode }
        }),
    ]
}

fn config() -> impl Strategy<Value = StudyConfig> {
    (1usize..=2).prop_flat_map(|dim| {
        (
            (0usize..3, finite(0.5, 2.0), 64usize..5000),
            (prop::sample::select(vec![256usize, 512]), finite(0.5, 2.0)),
            prop::collection::vec(finite(0.0, 3.0), 11),
            initial(dim),
            (finite(0.05, 1.0), finite(0.0, 1e-6), 1usize..50, prop::option::of(finite(1e-7, 1e-3)), 2usize..64),
            (prop::sample::select(vec![1u32, 2]), finite(1.0, 2.999)),
            (0usize..4, finite(1.0, 6.0)),
            (
                1usize..=2,
                finite(0.0, 3.0),
                finite(1e-14, 1e-6),
                1usize..500,
                1usize..100,
                finite(0.05, 0.95),
                finite(0.0, 2.0),
                finite(0.01, 1.0),
            ),
        )
            .prop_map(move |(k, g, m, initial, s, st, misc, d)| {
                let extent = g.1;
                let cells = g.0;
                let family = KernelFamily::ALL[k.0];
                let radius = k.1;
                // keep every scale resolved: r/(n h) ≥ 8
                let h = extent / cells as f64;
                let n_max = ((radius / (8.0 * h)).floor() as u32).max(1);
                let n_list: Vec<u32> = (0..3).map(|i| st.0 << i).filter(|&n| n <= n_max).collect();
                let n_list = if n_list.is_empty() { vec![1] } else { n_list };
                StudyConfig {
                    kernel: KernelSpec {
                        family,
                        radius: radius.max(8.0 * h),
                        min_cells_per_radius: 8.0,
                        quad_resolution: k.2,
                    },
                    grid: GridSpec {
                        dimension: dim,
                        extent: [extent, if dim == 2 { extent } else { 0.0 }],
                        cells: [cells, if dim == 2 { cells } else { 1 }],
                    },
                    model: ModelParams {
                        c: [m[0], m[1]],
                        a: [m[2], m[3]],
                        alpha: [m[4], m[5]],
                        beta: [[m[6], m[7]], [m[8], m[9]]],
                        t_final: m[10] + 0.01,
                    },
                    initial,
                    solver: SolverSettings { dt_safety: s.0, positivity_tol: s.1, diag_stride: s.2, dt_max: s.3 },
                    snapshots: s.4,
                    n: n_list[0],
                    n_list,
                    q: st.1,
                    consistency_function: [
                        TestFunction::Constant,
                        TestFunction::Quadratic,
                        TestFunction::Cosine,
                        TestFunction::PolynomialBump,
                    ][misc.0],
                    lemma4_p: misc.1,
                    dual: DualSpec {
                        species: if d.0 == 1 { Species::U1 } else { Species::U2 },
                        lambda: d.1,
                        picard_tol: d.2,
                        max_iters: d.3,
                        subintervals: d.4,
                        slab_safety: d.5,
                        psi_amplitude: d.6,
                        psi_width: d.7,
                    },
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_emit_parse_is_value_exact(cfg in config()) {
        let text = cfg.emit();
        let back = StudyConfig::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn snapshot_text_round_trips(
        values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 16),
        t in 0.0f64..10.0,
        two_d in any::<bool>(),
    ) {
        let g = if two_d { Grid::new_2d(1.0, 1.0, 4, 4).unwrap() } else { Grid::new_1d(2.0, 16).unwrap() };
        let f = Field::from_values(g, values).unwrap();
        let (t2, f2) = parse_snapshot(&format_snapshot(t, &f)).unwrap();
        prop_assert_eq!(t2, t);
        prop_assert_eq!(f2.values(), f.values());
        prop_assert_eq!(f2.grid().nx(), g.nx());
        prop_assert_eq!(f2.grid().ny(), g.ny());
        prop_assert!((f2.grid().h() - g.h()).abs() <= 1e-15 * g.h());
    }
}

#[test]
fn snapshot_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new_2d(2.0, 1.0, 8, 4).unwrap();
    let f = Field::from_fn(g, |x| x[0] * 3.0 - x[1]);
    let path = dir.path().join("u.txt");
    write_snapshot(&path, 0.125, &f).unwrap();
    let (t, back) = read_snapshot(&path).unwrap();
    assert_eq!(t, 0.125);
    assert_eq!(back.values(), f.values());
}

#[test]
fn shipped_config_parses() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default_1d.conf");
    let cfg = StudyConfig::from_file(&path).unwrap();
    assert_eq!(cfg.n_list, vec![4, 8, 16, 32]);
    assert_eq!(StudyConfig::parse(&cfg.emit()).unwrap(), cfg);
}
