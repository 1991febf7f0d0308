use confmodel::continuation::{fiber_roots, seed_trials, track_branch};
use confmodel::modeler::{depressed_cubic_coeffs, model, ModelCase, PhiRepresentation};
use confmodel::verify::{
    critical_value_defect, injectivity_sample, uniqueness_probe, verify_model, Tolerances,
};
use confmodel::{Complex, FiniteBlaschkeProduct, PolarGridSpec};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn worked_example() -> FiniteBlaschkeProduct {
    FiniteBlaschkeProduct::with_zeros(vec![c(0.0, 0.0), c(0.75, 0.0), c(0.25, 0.875)]).unwrap()
}

fn symmetric_example() -> FiniteBlaschkeProduct {
    FiniteBlaschkeProduct::with_zeros(vec![c(0.4, 0.0), c(-0.4, 0.0), c(0.0, 0.0)]).unwrap()
}

#[test]
fn worked_example_end_to_end() {
    let b = worked_example();
    let m = model(&b).unwrap();
    assert_eq!(m.case, ModelCase::Degree3Generic);
    assert_eq!(m.degree(), 3);
    assert!(m.residual_certificate <= 1e-8, "{}", m.residual_certificate);
    let report =
        verify_model(&b, &m, &PolarGridSpec::default(), &Tolerances::default(), 0).unwrap();
    assert!(report.passed, "{report:?}");
    assert_eq!(report.unique_branch, Some(true));
    assert!(report.boundary_defect <= report.residual_sup + 1e-12);
    assert!(m.branch_grid().unwrap().monodromy_ok);
}

#[test]
fn symmetric_zeros_tracked_branch_matches_pointwise_solve() {
    // the critical points lie on grid rays, so continuation must route round them
    let b = symmetric_example();
    let m = model(&b).unwrap();
    assert_eq!(m.case, ModelCase::Degree3Generic);
    assert!(m.residual_certificate <= 1e-8);
    let (k1, k2) = (m.critical_values[0], m.critical_values[1]);
    assert!(critical_value_defect(&m, k1, k2).unwrap() <= 1e-10);
    let grid = m.branch_grid().unwrap();
    let cubic = m.depressed_cubic().unwrap();
    for (z, &v) in grid.spec.nodes().zip(&grid.values) {
        let roots = fiber_roots(&cubic, b.eval(z)).unwrap();
        let best = roots
            .iter()
            .map(|r| (r - v).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-9);
    }
    assert!(uniqueness_probe(&b, &m));
}

#[test]
fn exactly_one_seed_is_single_valued() {
    for b in [worked_example(), symmetric_example()] {
        let cd = b.critical_points_in_disk().unwrap();
        let cubic = depressed_cubic_coeffs(cd.values[0], cd.values[1]).unwrap();
        let trials = seed_trials(&cubic, &b, &PolarGridSpec::default()).unwrap();
        let single_valued = trials
            .iter()
            .filter(|t| t.grid.as_ref().is_ok_and(|g| g.monodromy_ok))
            .count();
        assert_eq!(single_valued, 1);
        assert_eq!(trials.iter().filter(|t| t.passed).count(), 1);
    }
}

#[test]
fn tracking_is_reproducible() {
    let b = worked_example();
    let cd = b.critical_points_in_disk().unwrap();
    let cubic = depressed_cubic_coeffs(cd.values[0], cd.values[1]).unwrap();
    let spec = PolarGridSpec::new(16, 64, 0.999).unwrap();
    let a = track_branch(&cubic, &b, &spec, 0).unwrap();
    let again = track_branch(&cubic, &b, &spec, 0).unwrap();
    assert_eq!(a, again);
}

#[test]
fn corrupted_ring_is_caught() {
    let b = worked_example();
    let mut m = model(&b).unwrap();
    let PhiRepresentation::TrackedBranch { grid, cubic, .. } = &mut m.phi else {
        panic!("expected a tracked branch");
    };
    // move the outer ring onto another sheet of the fiber
    let spec = grid.spec;
    let last = spec.n_radii - 1;
    for j in 0..spec.n_angles {
        let k = last * spec.n_angles + j;
        let v = grid.values[k];
        let roots = fiber_roots(cubic, b.eval(spec.node(last, j))).unwrap();
        grid.values[k] = roots
            .into_iter()
            .filter(|r| (r - v).norm() > 1e-9)
            .min_by(|x, y| (x - v).norm().total_cmp(&(y - v).norm()))
            .unwrap();
    }
    let sample = injectivity_sample(&m, 2000, 1e-3, &spec, 0).unwrap();
    assert!(
        !sample.crossings.is_empty() || sample.min_separation < 1e-9,
        "{sample:?}"
    );
    let report = verify_model(&b, &m, &spec, &Tolerances::default(), 0).unwrap();
    assert!(!report.passed);
}
