use num_complex::Complex64;
use triwave::{
    ark_step, relax_step, ArkTableau, BbmModel, ConservationPolicy, ConserveMode, HypNlsModel,
    InvariantTriple, KdvModel, NlsModel, Projectable, RelaxError, SpectralGrid, StateOps,
    Workspace,
};

fn grid() -> SpectralGrid {
    SpectralGrid::new(-10.0, 10.0, 64).unwrap()
}

fn real_profile(x: f64) -> f64 {
    let s = std::f64::consts::PI / 10.0;
    0.3 + 0.5 * (s * x).cos() + 0.2 * (2.0 * s * x).sin() + 0.1 * (3.0 * s * x - 0.4).cos()
}

fn complex_profile(x: f64) -> Complex64 {
    let s = std::f64::consts::PI / 10.0;
    Complex64::new(real_profile(x), 0.2 + 0.7 * (2.0 * s * x + 0.3).cos())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-8)
}

struct RunReport {
    start: InvariantTriple,
    end: InvariantTriple,
    max_gamma_dev: f64,
}

impl RunReport {
    fn mass_drift(&self) -> f64 {
        rel(self.end.mass, self.start.mass)
    }
    fn momentum_drift(&self) -> f64 {
        rel(self.end.momentum, self.start.momentum)
    }
    fn energy_drift(&self) -> f64 {
        rel(self.end.energy, self.start.energy)
    }
}

fn run<M: Projectable>(
    model: &M,
    ws: &mut Workspace,
    tableau: &ArkTableau,
    dt: f64,
    steps: usize,
    u0: &M::State,
    mode: ConserveMode,
) -> RunReport {
    let policy = ConservationPolicy::new(mode);
    let start = model.invariants(ws, u0).unwrap();
    let mut u = u0.clone();
    let mut max_gamma_dev = 0.0f64;
    for _ in 0..steps {
        let out = relax_step(model, ws, tableau, dt, &u, &policy).unwrap();
        max_gamma_dev = max_gamma_dev.max((out.gamma - 1.0).abs());
        u = out.state;
    }
    let end = model.invariants(ws, &u).unwrap();
    RunReport {
        start,
        end,
        max_gamma_dev,
    }
}

#[test]
fn bbm_relaxation_enforces_selected_invariants() {
    let mut ws = Workspace::new();
    let tableau = ArkTableau::ark436();
    let model = BbmModel::new(grid());
    let u0 = model.state_from_fn(&mut ws, real_profile).unwrap();

    let none = run(&model, &mut ws, &tableau, 0.15, 20, &u0, ConserveMode::None);
    let me = run(
        &model,
        &mut ws,
        &tableau,
        0.15,
        20,
        &u0,
        ConserveMode::MassEnergy,
    );
    let full = run(
        &model,
        &mut ws,
        &tableau,
        0.15,
        20,
        &u0,
        ConserveMode::MassMomentumEnergy,
    );

    // mass rides on the zero mode, which every tangent leaves untouched
    assert!(none.mass_drift() < 1e-14);
    assert!(me.mass_drift() < 1e-14);
    assert!(full.mass_drift() < 1e-14);

    assert!(me.energy_drift() < 5e-12);
    assert!(full.energy_drift() < 5e-12);
    assert!(full.momentum_drift() < 1e-13);

    // unenforced quantities keep their truncation-level drift
    assert!(none.energy_drift() > 1e-12);
    assert!(me.momentum_drift() > 1e-12);
    assert!(me.momentum_drift() > 50.0 * full.momentum_drift());

    assert!(me.max_gamma_dev < 1e-6);
    assert!(full.max_gamma_dev < 1e-6);
}

#[test]
fn kdv_relaxation_enforces_selected_invariants() {
    let mut ws = Workspace::new();
    let tableau = ArkTableau::ark436();
    let model = KdvModel::new(grid());
    let u0 = model.state_from_fn(&mut ws, real_profile).unwrap();

    let none = run(&model, &mut ws, &tableau, 0.05, 20, &u0, ConserveMode::None);
    let me = run(
        &model,
        &mut ws,
        &tableau,
        0.05,
        20,
        &u0,
        ConserveMode::MassEnergy,
    );
    let full = run(
        &model,
        &mut ws,
        &tableau,
        0.05,
        20,
        &u0,
        ConserveMode::MassMomentumEnergy,
    );

    assert!(full.mass_drift() < 1e-14);
    assert!(full.momentum_drift() < 1e-13);
    assert!(full.energy_drift() < 5e-12);

    assert!(me.mass_drift() < 1e-14);
    assert!(me.energy_drift() < 5e-12);
    assert!(me.momentum_drift() > 1e-10);

    assert!(none.energy_drift() > 1e-10);
}

#[test]
fn nls_relaxation_enforces_selected_invariants() {
    let mut ws = Workspace::new();
    let tableau = ArkTableau::ark436();
    let model = NlsModel::new(grid(), 2.0);
    let u0 = model.state_from_fn(&mut ws, complex_profile).unwrap();

    let none = run(&model, &mut ws, &tableau, 0.05, 20, &u0, ConserveMode::None);
    let me = run(
        &model,
        &mut ws,
        &tableau,
        0.05,
        20,
        &u0,
        ConserveMode::MassEnergy,
    );
    let full = run(
        &model,
        &mut ws,
        &tableau,
        0.05,
        20,
        &u0,
        ConserveMode::MassMomentumEnergy,
    );

    assert!(full.mass_drift() < 5e-12);
    assert!(full.momentum_drift() < 5e-12);
    assert!(full.energy_drift() < 5e-12);

    assert!(me.mass_drift() < 5e-12);
    assert!(me.energy_drift() < 5e-12);
    assert!(me.momentum_drift() > 1e-5);

    // the raw step visibly loses all three at this step size
    assert!(none.mass_drift() > 1e-5);
    assert!(none.energy_drift() > 1e-4);
}

#[test]
fn hyperbolized_relaxation_enforces_mass_and_energy() {
    let mut ws = Workspace::new();
    let tableau = ArkTableau::ark436();
    let model = HypNlsModel::new(grid(), 2.0, 0.1);
    let u0 = model.state_from_fn(&mut ws, complex_profile).unwrap();

    let none = run(&model, &mut ws, &tableau, 0.02, 20, &u0, ConserveMode::None);
    let me = run(
        &model,
        &mut ws,
        &tableau,
        0.02,
        20,
        &u0,
        ConserveMode::MassEnergy,
    );

    assert!(me.mass_drift() < 1e-13);
    assert!(me.energy_drift() < 1e-12);
    assert!(none.energy_drift() > 1e-8);

    let err = relax_step(
        &model,
        &mut ws,
        &tableau,
        0.02,
        &u0,
        &ConservationPolicy::full(),
    )
    .unwrap_err();
    assert!(matches!(err, RelaxError::UnsupportedPolicy { .. }));
}

/// The relaxation parameter approaches 1 as the step shrinks: its
/// deviation scales like `dt^(p-1)` for an order-`p` step, so halving
/// `dt` should shrink it by roughly `2^(p-1)`.
#[test]
fn gamma_deviation_shrinks_with_step_size() {
    let mut ws = Workspace::new();
    let tableau = ArkTableau::ark436();
    let model = KdvModel::new(grid());
    let u0 = model.state_from_fn(&mut ws, real_profile).unwrap();

    let coarse = run(
        &model,
        &mut ws,
        &tableau,
        0.05,
        20,
        &u0,
        ConserveMode::MassMomentumEnergy,
    );
    let fine = run(
        &model,
        &mut ws,
        &tableau,
        0.025,
        40,
        &u0,
        ConserveMode::MassMomentumEnergy,
    );
    assert!(coarse.max_gamma_dev > 1e-8);
    assert!(fine.max_gamma_dev > 1e-10);
    assert!(coarse.max_gamma_dev > 3.0 * fine.max_gamma_dev);
}

#[test]
fn none_policy_matches_the_raw_step() {
    let mut ws = Workspace::new();
    let tableau = ArkTableau::ark436();
    let model = KdvModel::new(grid());
    let u0 = model.state_from_fn(&mut ws, real_profile).unwrap();

    let raw = ark_step(&model, &mut ws, &tableau, 0.05, &u0).unwrap();
    let out = relax_step(
        &model,
        &mut ws,
        &tableau,
        0.05,
        &u0,
        &ConservationPolicy::none(),
    )
    .unwrap();
    assert_eq!(out.state.l2_distance(&raw), 0.0);
    assert_eq!(out.gamma, 1.0);
}

#[test]
fn constant_state_accepts_gamma_one() {
    let mut ws = Workspace::new();
    let tableau = ArkTableau::ark436();
    let model = BbmModel::new(grid());
    let u0 = model.state_from_fn(&mut ws, |_| 0.7).unwrap();

    let out = relax_step(
        &model,
        &mut ws,
        &tableau,
        0.1,
        &u0,
        &ConservationPolicy::mass_energy(),
    )
    .unwrap();
    assert_eq!(out.gamma, 1.0);
    assert_eq!(out.root_evaluations, 1);
    assert!(!out.degenerate);
    assert!(out.state.l2_distance(&u0) < 1e-14);
}
