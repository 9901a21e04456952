use super::*;
use crate::gas::{build_edney1, uniform_flow, PatternGeometry};
use crate::grid::Extent;

fn gas() -> GasModel {
    GasModel::default()
}

fn uniform_inflow(mach: f64) -> Inflow {
    let g = gas();
    Inflow::pattern(uniform_flow(PrimitiveState::freestream(mach, &g), &g).unwrap())
}

fn edney1_inflow() -> Inflow {
    let g = gas();
    let free = PrimitiveState::freestream(4.0, &g);
    Inflow::pattern(
        build_edney1(
            free,
            20f64.to_radians(),
            15f64.to_radians(),
            PatternGeometry::default(),
            &g,
        )
        .unwrap(),
    )
}

#[test]
fn scheme_labels_round_trip() {
    for id in SchemeId::ALL {
        assert_eq!(id.label().parse::<SchemeId>().unwrap(), id);
    }
    assert!("S9".parse::<SchemeId>().is_err());
    assert_eq!(SchemeId::MC2.viscosity(), Viscosity::Second(0.002));
    assert_eq!(SchemeId::MC4.viscosity(), Viscosity::Fourth(0.01));
}

#[test]
fn every_scheme_preserves_freestream() {
    let grid = Grid::unit_square(12).unwrap();
    for id in SchemeId::ALL {
        let cfg = SolverConfig::new(id, grid, gas(), uniform_inflow(3.0));
        let u0 = cfg.initial_state().unwrap();
        let mut m = Marcher::new(&cfg, &u0, None).unwrap();
        for _ in 0..200 {
            m.advance().unwrap();
        }
        let u = m.solution();
        let dev = u.sub(&u0).unwrap().max_abs();
        assert!(dev <= 1e-12, "{id}: {dev}");
    }
}

#[test]
fn config_validation() {
    let grid = Grid::unit_square(4).unwrap();
    let mut cfg = SolverConfig::new(SchemeId::S1, grid, gas(), uniform_inflow(3.0));
    cfg.cfl = 1.5;
    assert!(cfg.validate().is_err());
    cfg.cfl = 0.5;
    cfg.steady_tol = 0.0;
    assert!(cfg.validate().is_err());
    let sub = SolverConfig::new(SchemeId::S1, grid, gas(), uniform_inflow(0.5));
    assert!(matches!(sub.validate().unwrap_err(), Error::Subsonic(_)));
}

#[test]
fn runs_are_deterministic_and_policy_independent() {
    let grid = Grid::unit_square(16).unwrap();
    for id in [SchemeId::S2H, SchemeId::MC4, SchemeId::LW] {
        let mut cfg = SolverConfig::new(id, grid, gas(), edney1_inflow());
        cfg.max_steps = 40;
        let (a, la) = run_scheme(&cfg).unwrap();
        let (b, lb) = run_scheme(&cfg).unwrap();
        cfg.execution = Execution::Sequential;
        let (c, lc) = run_scheme(&cfg).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.values(), c.values());
        assert_eq!(la, lb);
        assert_eq!(la, lc);
    }
}

#[test]
fn zero_source_is_bit_identical() {
    let grid = Grid::unit_square(10).unwrap();
    let mut cfg = SolverConfig::new(SchemeId::S1, grid, gas(), edney1_inflow());
    cfg.max_steps = 30;
    let (a, _) = run_scheme(&cfg).unwrap();
    let (b, _) = run_scheme_with_source(&cfg, &GridFunction::zeros(grid, 4)).unwrap();
    assert_eq!(a.values(), b.values());
}

#[test]
fn manufactured_source_makes_exact_state_steady() {
    let m = ManufacturedFlow::default();
    let grid = Grid::unit_square(16).unwrap();
    for id in [SchemeId::S1, SchemeId::S2H, SchemeId::MC1, SchemeId::LW] {
        let mut cfg = SolverConfig::new(id, grid, gas(), Inflow::Manufactured(m));
        cfg.initial = InitialCondition::Exact;
        let exact = cfg.initial_state().unwrap();
        let source = steady_residual(&cfg, &exact).unwrap().scale(-1.0);
        // start away from the target and march back
        cfg.initial = InitialCondition::Freestream;
        cfg.steady_tol = 1e-10;
        let (u, log) = run_scheme_with_source(&cfg, &source).unwrap();
        assert!(log.converged, "{id} residual {}", log.final_residual());
        let err = crate::grid::distance(&u, &exact, crate::grid::ComponentMask::DENSITY).unwrap();
        assert!(err < 10.0 * 1e-8, "{id}: {err}");
    }
}

#[test]
fn mass_update_balances_boundary_flux() {
    let grid = Grid::unit_square(20).unwrap();
    for id in SchemeId::ALL {
        let cfg = SolverConfig::new(id, grid, gas(), edney1_inflow());
        let mut m = Marcher::new(&cfg, &cfg.initial_state().unwrap(), None).unwrap();
        for _ in 0..20 {
            let before = m.total_mass();
            m.advance().unwrap();
            let change = m.total_mass() - before;
            let expected = -m.last_dt() * m.boundary_mass_outflow();
            assert!((change - expected).abs() < 1e-13, "{id}: {change} vs {expected}");
        }
    }
}

#[test]
fn divergence_names_step_and_cell() {
    let grid = Grid::unit_square(8).unwrap();
    let mut cfg = SolverConfig::new(SchemeId::S1, grid, gas(), uniform_inflow(3.0));
    cfg.max_steps = 5;
    let mut source = GridFunction::zeros(grid, 4).into_values();
    source[(3 * 8 + 5) * 4] = -1e6;
    let source = GridFunction::from_values(grid, 4, source).unwrap();
    let err = run_scheme_with_source(&cfg, &source).unwrap_err();
    match err {
        Error::Divergence { step, i, j, .. } => {
            assert_eq!((step, i, j), (1, 5, 3));
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn digest_tracks_result_relevant_fields() {
    let grid = Grid::new(10, 12, Extent::UNIT).unwrap();
    let a = SolverConfig::new(SchemeId::S1, grid, gas(), edney1_inflow());
    let mut b = a.clone();
    b.execution = Execution::Sequential;
    assert_eq!(a.digest(), b.digest());
    b.cfl = 0.4;
    assert_ne!(a.digest(), b.digest());
    assert_ne!(a.digest(), a.with_scheme(SchemeId::S2H).digest());
    assert_eq!(a.digest().len(), 64);
}

#[test]
fn ensemble_rejects_duplicates_and_mixed_grids() {
    let grid = Grid::unit_square(6).unwrap();
    let mut cfg = SolverConfig::new(SchemeId::S1, grid, gas(), uniform_inflow(3.0));
    cfg.max_steps = 3;
    assert!(run_ensemble(&[cfg.clone(), cfg.clone()], Execution::Sequential).is_err());
    let mut other = cfg.with_scheme(SchemeId::LW);
    other.grid = Grid::unit_square(7).unwrap();
    assert!(matches!(
        run_ensemble(&[cfg.clone(), other], Execution::Sequential).unwrap_err(),
        Error::GridMismatch(_)
    ));
    let single = run_ensemble(&[cfg.clone()], Execution::Sequential).unwrap();
    assert_eq!(single.labels(), vec!["S1"]);
    let pair = run_ensemble(&[cfg.clone(), cfg.with_scheme(SchemeId::MC)], Execution::Parallel).unwrap();
    assert_eq!(pair.labels(), vec!["S1", "MC"]);
}

#[test]
fn convergence_csv_layout() {
    let log = ConvergenceLog {
        records: vec![StepRecord {
            step: 1,
            residual: 0.5,
            dt: 0.01,
        }],
        converged: false,
        steady_tol: 1e-8,
    };
    assert_eq!(log.to_csv(), "step,residual,dt\n1,5e-1,1e-2\n");
}
