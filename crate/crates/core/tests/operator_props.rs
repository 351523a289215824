use proptest::prelude::*;
use skt_lab::grid::total_mass;
use skt_lab::kernel::{compute_c1, discretize};
use skt_lab::{Field, Grid, KernelFamily, KernelKind, KernelProfile, NonlocalOperator};

fn operator(family: KernelFamily, dim: usize, cells: usize, n: u32) -> NonlocalOperator {
    let p = KernelProfile::new(family, 1.0, dim).unwrap();
    let c = compute_c1(&p, 512);
    let g = if dim == 1 { Grid::new_1d(1.0, cells).unwrap() } else { Grid::new_2d(1.0, 1.0, cells, cells).unwrap() };
    NonlocalOperator::new(discretize(&p, &c, n, &g, 8.0, KernelKind::Rescaled).unwrap(), g).unwrap()
}

/// Direct double loop over cells and offsets, dropping neighbours outside Ω.
fn naive_apply(op: &NonlocalOperator, f: &Field) -> Vec<f64> {
    let g = op.grid();
    let (nx, ny) = (g.nx() as i64, g.ny() as i64);
    let stencil: Vec<([i64; 2], f64)> = op.kernel().iter().collect();
    let v = f.values();
    (0..g.len())
        .map(|i| {
            let (ix, iy) = g.coords(i);
            let mut acc = 0.0;
            for &(k, w) in &stencil {
                let (jx, jy) = (ix as i64 + k[0], iy as i64 + k[1]);
                if jx >= 0 && jx < nx && jy >= 0 && jy < ny {
                    acc += w * (v[(jy * nx + jx) as usize] - v[i]);
                }
            }
            acc
        })
        .collect()
}

fn naive_dissipation(op: &NonlocalOperator, f: &Field) -> f64 {
    let g = op.grid();
    let (nx, ny) = (g.nx() as i64, g.ny() as i64);
    let v = f.values();
    let mut acc = 0.0;
    for i in 0..g.len() {
        let (ix, iy) = g.coords(i);
        for (k, w) in op.kernel().iter() {
            let (jx, jy) = (ix as i64 + k[0], iy as i64 + k[1]);
            if jx >= 0 && jx < nx && jy >= 0 && jy < ny {
                let d = v[(jy * nx + jx) as usize] - v[i];
                acc += w * d * d;
            }
        }
    }
    acc * g.cell_volume()
}

fn field_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

#[test]
fn matches_naive_loop() {
    for (dim, cells, n) in [(1, 200, 3), (2, 48, 2)] {
        for family in KernelFamily::ALL {
            let op = operator(family, dim, cells, n);
            let f = Field::from_fn(*op.grid(), |x| (7.0 * x[0]).sin() + x[1] * x[1] + 0.3);
            let fast = op.apply(&f).unwrap();
            let slow = naive_apply(&op, &f);
            let scale = fast.max_abs();
            for (a, b) in fast.values().iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
            }
            let d = op.dissipation(&f).unwrap();
            assert!((d - naive_dissipation(&op, &f)).abs() <= 1e-12 * d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mass_neutral_1d(v in field_strategy(160), fam in 0usize..3) {
        let op = operator(KernelFamily::ALL[fam], 1, 160, 4);
        let f = Field::from_values(*op.grid(), v).unwrap();
        let l1: f64 = f.values().iter().map(|x| x.abs()).sum::<f64>() * op.grid().cell_volume();
        let m = total_mass(&op.apply(&f).unwrap());
        prop_assert!(m.abs() <= 1e-12 * l1, "{m} vs {l1}");
    }

    #[test]
    fn mass_neutral_2d(v in field_strategy(32 * 32), fam in 0usize..3) {
        let op = operator(KernelFamily::ALL[fam], 2, 32, 2);
        let f = Field::from_values(*op.grid(), v).unwrap();
        let l1: f64 = f.values().iter().map(|x| x.abs()).sum::<f64>() * op.grid().cell_volume();
        let m = total_mass(&op.apply(&f).unwrap());
        prop_assert!(m.abs() <= 1e-12 * l1, "{m} vs {l1}");
    }

    #[test]
    fn dissipation_identity(v in field_strategy(128), fam in 0usize..3) {
        let op = operator(KernelFamily::ALL[fam], 1, 128, 2);
        let f = Field::from_values(*op.grid(), v).unwrap();
        let d = op.dissipation(&f).unwrap();
        let lap = op.apply(&f).unwrap();
        let pairing: f64 = f.values().iter().zip(lap.values()).map(|(a, b)| a * b).sum::<f64>() * op.grid().cell_volume();
        prop_assert!(d >= 0.0);
        prop_assert!((d + 2.0 * pairing).abs() <= 1e-10 * d.max(1e-300));
    }

    #[test]
    fn linear_and_shift_invariant(v in field_strategy(96), w in field_strategy(96), a in -3.0f64..3.0, c in -5.0f64..5.0) {
        let op = operator(KernelFamily::Tent, 1, 96, 2);
        let g = *op.grid();
        let f = Field::from_values(g, v).unwrap();
        let h = Field::from_values(g, w).unwrap();
        let combo = f.scaled(a).axpy(1.0, &h).unwrap();
        let lhs = op.apply(&combo).unwrap();
        let rhs = op.apply(&f).unwrap().scaled(a).axpy(1.0, &op.apply(&h).unwrap()).unwrap();
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).abs() <= 1e-11 * scale);
        }
        let shifted = op.apply(&f.map(|x| x + c)).unwrap();
        let base = op.apply(&f).unwrap();
        for (x, y) in shifted.values().iter().zip(base.values()) {
            prop_assert!((x - y).abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn maximum_principle(v in prop::collection::vec(0.0f64..1.0, 128)) {
        // At a global maximum every difference is nonpositive.
        let op = operator(KernelFamily::PolynomialBump, 1, 128, 2);
        let f = Field::from_values(*op.grid(), v).unwrap();
        let (imax, _) = f.values().iter().enumerate().fold((0, f64::MIN), |b, (i, &x)| if x > b.1 { (i, x) } else { b });
        prop_assert!(op.apply(&f).unwrap().values()[imax] <= 0.0);
    }
}
