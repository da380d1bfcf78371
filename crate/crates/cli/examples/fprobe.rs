use triwave::{
    ark_step, nls_bright, ConservationPolicy, Conserved, NlsModel, NlsState, Projectable,
    SpectralGrid, StateOps, Workspace, NLS_BRIGHT_BETA,
};
use triwave_cli::scenario::resolve_tableau;

fn main() {
    let grid = SpectralGrid::new(-40.0, 40.0, 1024).unwrap();
    let model = NlsModel::new(grid, NLS_BRIGHT_BETA);
    let mut ws = Workspace::new();
    let mut u = model
        .state_from_fn(&mut ws, |x| nls_bright(0.0, x))
        .unwrap();
    let tab = resolve_tableau("ark548").unwrap();
    let policy = ConservationPolicy::full();
    let dt = 1.0 / 512.0;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for step in 0..200 {
        let targets = model.invariants(&mut ws, &u).unwrap();
        let raw = ark_step(&model, &mut ws, &tab, dt, &u).unwrap();
        let uhat = model.project(&mut ws, &raw, &targets, &policy).unwrap();
        let f = |g: f64, ws: &mut Workspace| {
            let s = NlsState::lerp(&u, &uhat, g);
            let p = model.project(ws, &s, &targets, &policy).unwrap();
            model.energy(ws, &p).unwrap() - targets.energy
        };
        let f_lo = f(0.5, &mut ws);
        let f_one = f(1.0, &mut ws);
        let f_hi = f(1.5, &mut ws);
        if f_lo.abs().max(f_hi.abs()) > worst.0.abs().max(worst.2.abs()) {
            worst = (f_lo, f_one, f_hi);
        }
        if step < 4 || (step % 50) == 0 {
            println!("step {step}: f(0.5) = {f_lo:+.3e}  f(1) = {f_one:+.3e}  f(1.5) = {f_hi:+.3e}");
        }
        u = uhat;
    }
    let e0 = {
        let u0 = model
            .state_from_fn(&mut ws, |x| nls_bright(0.0, x))
            .unwrap();
        model.invariants(&mut ws, &u0).unwrap().energy
    };
    println!(
        "worst endpoints: f(0.5) = {:+.3e}, f(1) = {:+.3e}, f(1.5) = {:+.3e}; band = {:.3e}",
        worst.0,
        worst.1,
        worst.2,
        1e-13 * (1.0 + e0.abs())
    );
}
