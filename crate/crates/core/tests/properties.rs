//! Randomized structural properties: transform round trips, quadrature
//! equivalences, skew-symmetry of differentiation, exactness of the
//! de-aliased projection, consistency of the split right-hand sides,
//! per-step preservation of linear invariants, and the algebraic laws of
//! the conservation projections.

use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;
use triwave::{
    ark_step, integrate, ArkTableau, BbmModel, Conserved, ConservationPolicy, HypNlsModel,
    KdvModel, ModalField, NlsModel, NlsState, Projectable, SpectralGrid, StateOps, System,
    Workspace,
};

fn field_from(grid: SpectralGrid, raw: &[(f64, f64)], determined_nyquist: bool) -> ModalField {
    let mut coeffs: Vec<Complex64> = raw[..grid.half_len()]
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    if determined_nyquist {
        // n samples only see the Nyquist cosine referenced to the first
        // node: the coefficients they determine lie on the real ray
        // rotated by the domain offset
        if let Some(ny) = grid.nyquist() {
            let ray = Complex64::from_polar(1.0, -grid.wavenumber(ny) * grid.xmin());
            coeffs[ny] = coeffs[ny].re * ray;
        }
    }
    ModalField::from_coeffs(grid, coeffs).unwrap()
}

/// Band-limited profile with geometrically decaying random amplitudes.
fn eval_profile(params: &[(f64, f64)], length: f64, offset: f64, x: f64) -> f64 {
    offset
        + params
            .iter()
            .enumerate()
            .map(|(j, &(a, p))| {
                let k = 2.0 * std::f64::consts::PI * (j + 1) as f64 / length;
                a * 0.7f64.powi(j as i32) * (k * x + p).cos()
            })
            .sum::<f64>()
}

fn mode_params() -> impl Strategy<Value = Vec<(f64, f64)>> {
    vec((-0.5..0.5f64, 0.0..std::f64::consts::TAU), 4)
}

fn coeff_pairs(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    vec((-1.0..1.0f64, -1.0..1.0f64), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// N nodal samples determine the field for odd N always, and for
    /// even N exactly when the Nyquist sine component vanishes.
    #[test]
    fn round_trip_recovers_determined_fields(
        n in prop_oneof![Just(31usize), Just(32), Just(47), Just(48)],
        raw in coeff_pairs(25),
    ) {
        let grid = SpectralGrid::new(-4.0, 11.0, n).unwrap();
        let f = field_from(grid, &raw, true);
        let mut ws = Workspace::new();
        let nodal = ws.evaluate(&f, n).unwrap();
        let back = ws.forward(grid, &nodal).unwrap();
        let scale = f
            .coeffs()
            .iter()
            .map(|c| c.norm())
            .fold(1e-30f64, f64::max);
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-13 * scale);
        }
    }

    /// The modal inner product is positive semi-definite and agrees with
    /// the node mean of the squared field on any grid fine enough for the
    /// squared band, Nyquist sine component included.
    #[test]
    fn inner_product_matches_oversampled_quadrature(
        n in prop_oneof![Just(24usize), Just(31), Just(32)],
        raw in coeff_pairs(17),
    ) {
        let grid = SpectralGrid::new(-2.0, 13.0, n).unwrap();
        let f = field_from(grid, &raw, false);
        let ip = f.inner_product(&f).unwrap();
        prop_assert!(ip >= 0.0);
        let mut ws = Workspace::new();
        let tol = 1e-12 * (1.0 + ip.abs());
        for m in [n + 1, 2 * n + 3, 3 * n] {
            let vals = ws.evaluate(&f, m).unwrap();
            let quad = grid.length() * vals.iter().map(|v| v * v).sum::<f64>() / m as f64;
            prop_assert!((quad - ip).abs() <= tol, "m = {}: {} vs {}", m, quad, ip);
        }
        let packaged = ws
            .integral_of_nonlinearity(&[&f], 2, |a| a[0] * a[0])
            .unwrap();
        prop_assert!((packaged - ip).abs() <= tol);
    }

    #[test]
    fn differentiation_is_skew_symmetric(
        n in prop_oneof![Just(31usize), Just(32)],
        raw_f in coeff_pairs(17),
        raw_g in coeff_pairs(17),
    ) {
        let grid = SpectralGrid::new(0.0, 9.0, n).unwrap();
        let f = field_from(grid, &raw_f, false);
        let g = field_from(grid, &raw_g, false);
        let a = f.derivative(1).inner_product(&g).unwrap();
        let b = f.inner_product(&g.derivative(1)).unwrap();
        let scale = 1.0 + f.norm_l2() * g.derivative(1).norm_l2();
        prop_assert!((a + b).abs() <= 1e-12 * scale, "{} vs {}", a, -b);
    }

    /// The de-aliased product is the exact `L^2` projection: its defect
    /// against the true product is orthogonal to every retained mode.
    #[test]
    fn projected_product_is_orthogonal_to_no_retained_mode(
        raw in coeff_pairs(9),
    ) {
        let grid = SpectralGrid::new(0.0, 7.0, 16).unwrap();
        let u = field_from(grid, &raw, false);
        let mut ws = Workspace::new();
        let p = ws
            .project_nonlinearity(&[&u], 2, |a| 0.5 * a[0] * a[0])
            .unwrap();
        let tol = 1e-12 * (1.0 + u.norm_l2() * u.norm_l2());
        for j in 0..grid.half_len() {
            for comp in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                if j == 0 && comp.im != 0.0 {
                    continue;
                }
                let mut phi = ModalField::zeros(grid);
                phi.set_coeff(j, comp);
                let lhs = p.inner_product(&phi).unwrap();
                let rhs = ws
                    .integral_of_nonlinearity(&[&u, &phi], 3, |a| 0.5 * a[0] * a[0] * a[1])
                    .unwrap();
                prop_assert!((lhs - rhs).abs() <= tol, "mode {}: {} vs {}", j, lhs, rhs);
            }
        }
    }
}

fn grid() -> SpectralGrid {
    SpectralGrid::new(-3.0, 9.0, 32).unwrap()
}

fn assert_close<S: StateOps>(got: &S, want: &S, tol_scale: f64, label: &str) -> Result<(), TestCaseError> {
    let norm = want.l2_distance(&want.zeros_like());
    let dist = got.l2_distance(want);
    prop_assert!(
        dist <= tol_scale * (1.0 + norm),
        "{label}: split sum deviates by {dist:.3e} (norm {norm:.3e})"
    );
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The split tangents sum to an independently transcribed right-hand
    /// side for every model.
    #[test]
    fn split_tangents_sum_to_the_unsplit_right_hand_side(
        re in mode_params(),
        im in mode_params(),
        offset in -0.4..0.4f64,
        beta in -2.0..2.0f64,
        tau in 0.02..0.5f64,
    ) {
        let g = grid();
        let len = g.length();
        let mut ws = Workspace::new();

        let bbm = BbmModel::new(g);
        let s = bbm
            .state_from_fn(&mut ws, |x| 1.0 + eval_profile(&re, len, offset, x))
            .unwrap();
        let t = bbm.tangent(&mut ws, &s).unwrap();
        let ux = s.u.derivative(1);
        let q = ws.project_nonlinearity(&[&s.u, &ux], 2, |a| a[0] * a[1]).unwrap();
        let direct = q
            .apply_symbol(|k| Complex64::new(-1.0 / (1.0 + k * k), 0.0))
            .unwrap();
        assert_close(&t, &triwave::BbmState { u: direct }, 1e-14, "bbm")?;

        let kdv = KdvModel::new(g);
        let s = kdv
            .state_from_fn(&mut ws, |x| eval_profile(&re, len, offset, x))
            .unwrap();
        let t = kdv.tangent(&mut ws, &s).unwrap();
        let ux = s.u.derivative(1);
        let mut direct = ws
            .project_nonlinearity(&[&s.u, &ux], 2, |a| -a[0] * a[1])
            .unwrap();
        direct.axpy(-1.0, &s.u.derivative(3));
        assert_close(&t, &triwave::KdvState { u: direct }, 1e-14, "kdv")?;

        let nls = NlsModel::new(g, beta);
        let s = nls
            .state_from_fn(&mut ws, |x| {
                Complex64::new(
                    eval_profile(&re, len, offset, x),
                    eval_profile(&im, len, -offset, x),
                )
            })
            .unwrap();
        let t = nls.tangent(&mut ws, &s).unwrap();
        let mut dv = ws
            .project_nonlinearity(&[&s.v, &s.w], 3, |a| {
                -beta * (a[0] * a[0] + a[1] * a[1]) * a[1]
            })
            .unwrap();
        dv.axpy(-1.0, &s.w.derivative(2));
        let mut dw = ws
            .project_nonlinearity(&[&s.v, &s.w], 3, |a| {
                beta * (a[0] * a[0] + a[1] * a[1]) * a[0]
            })
            .unwrap();
        dw.axpy(1.0, &s.v.derivative(2));
        assert_close(&t, &NlsState { v: dv, w: dw }, 1e-14, "nls")?;

        let hyp = HypNlsModel::new(g, beta, tau);
        let mut s = hyp
            .state_from_fn(&mut ws, |x| {
                Complex64::new(
                    eval_profile(&re, len, offset, x),
                    eval_profile(&im, len, -offset, x),
                )
            })
            .unwrap();
        // consistency must hold off the slow manifold too
        s.nu.axpy(0.3, &s.w);
        s.omega.axpy(-0.2, &s.v);
        let t = hyp.tangent(&mut ws, &s).unwrap();
        let mut dv = ws
            .project_nonlinearity(&[&s.v, &s.w], 3, |a| {
                -beta * (a[0] * a[0] + a[1] * a[1]) * a[1]
            })
            .unwrap();
        dv.axpy(-1.0, &s.omega.derivative(1));
        let mut dw = ws
            .project_nonlinearity(&[&s.v, &s.w], 3, |a| {
                beta * (a[0] * a[0] + a[1] * a[1]) * a[0]
            })
            .unwrap();
        dw.axpy(1.0, &s.nu.derivative(1));
        let mut dnu = s.w.derivative(1);
        dnu.axpy(-1.0, &s.omega);
        dnu.scale(1.0 / tau);
        let mut domega = s.nu.clone();
        domega.axpy(-1.0, &s.v.derivative(1));
        domega.scale(1.0 / tau);
        let direct = triwave::HypNlsState { v: dv, w: dw, nu: dnu, omega: domega };
        assert_close(&t, &direct, 1e-14, "hypnls")?;
    }

    /// Mass is a linear functional, so every Runge-Kutta step carries it
    /// exactly for BBM and KdV, with no correction involved.
    #[test]
    fn uncorrected_steps_conserve_the_linear_mass(
        re in mode_params(),
        offset in -0.4..0.4f64,
        dt in 0.005..0.1f64,
        which in 0..3usize,
    ) {
        let g = grid();
        let len = g.length();
        let tableau = match which {
            0 => ArkTableau::rk4(),
            1 => ArkTableau::ark436(),
            _ => ArkTableau::ark548(),
        };
        let mut ws = Workspace::new();

        let bbm = BbmModel::new(g);
        let u0 = bbm
            .state_from_fn(&mut ws, |x| 1.0 + eval_profile(&re, len, offset, x))
            .unwrap();
        let m0 = bbm.invariants(&mut ws, &u0).unwrap().mass;
        let u1 = ark_step(&bbm, &mut ws, &tableau, dt, &u0).unwrap();
        let m1 = bbm.invariants(&mut ws, &u1).unwrap().mass;
        prop_assert!((m1 - m0).abs() <= 1e-12 * (1.0 + m0.abs()));

        let kdv = KdvModel::new(g);
        let u0 = kdv
            .state_from_fn(&mut ws, |x| eval_profile(&re, len, offset, x))
            .unwrap();
        let m0 = kdv.invariants(&mut ws, &u0).unwrap().mass;
        let u1 = ark_step(&kdv, &mut ws, &tableau, dt, &u0).unwrap();
        let m1 = kdv.invariants(&mut ws, &u1).unwrap().mass;
        prop_assert!((m1 - m0).abs() <= 1e-12 * (1.0 + m0.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Applying any projection twice is the same as applying it once.
    #[test]
    fn projections_are_idempotent(
        re in mode_params(),
        im in mode_params(),
        bump in mode_params(),
        eps in -0.03..0.03f64,
    ) {
        let g = grid();
        let len = g.length();
        let mut ws = Workspace::new();
        let full = ConservationPolicy::full();
        let reduced = ConservationPolicy::mass_energy();

        let bbm = BbmModel::new(g);
        let u = bbm
            .state_from_fn(&mut ws, |x| 1.0 + eval_profile(&re, len, 0.0, x))
            .unwrap();
        let targets = bbm.invariants(&mut ws, &u).unwrap();
        let probe = bbm
            .state_from_fn(&mut ws, |x| {
                1.0 + eval_profile(&re, len, 0.0, x) + eps * eval_profile(&bump, len, 0.1, x)
            })
            .unwrap();
        for policy in [&reduced, &full] {
            let p1 = bbm.project(&mut ws, &probe, &targets, policy).unwrap();
            let p2 = bbm.project(&mut ws, &p1, &targets, policy).unwrap();
            assert_close(&p2, &p1, 1e-13, "bbm projection")?;
        }

        let kdv = KdvModel::new(g);
        let u = kdv
            .state_from_fn(&mut ws, |x| eval_profile(&re, len, 0.2, x))
            .unwrap();
        let targets = kdv.invariants(&mut ws, &u).unwrap();
        let probe = kdv
            .state_from_fn(&mut ws, |x| {
                eval_profile(&re, len, 0.2, x) + eps * eval_profile(&bump, len, -0.1, x)
            })
            .unwrap();
        for policy in [&reduced, &full] {
            let p1 = kdv.project(&mut ws, &probe, &targets, policy).unwrap();
            let p2 = kdv.project(&mut ws, &p1, &targets, policy).unwrap();
            assert_close(&p2, &p1, 1e-13, "kdv projection")?;
        }

        let nls = NlsModel::new(g, 1.0);
        let u = nls
            .state_from_fn(&mut ws, |x| {
                Complex64::new(
                    0.5 + eval_profile(&re, len, 0.0, x),
                    eval_profile(&im, len, 0.0, x),
                )
            })
            .unwrap();
        let targets = nls.invariants(&mut ws, &u).unwrap();
        let probe = nls
            .state_from_fn(&mut ws, |x| {
                Complex64::new(
                    0.5 + eval_profile(&re, len, 0.0, x) + eps * eval_profile(&bump, len, 0.3, x),
                    eval_profile(&im, len, 0.0, x) - eps * eval_profile(&bump, len, 0.7, x),
                )
            })
            .unwrap();
        for policy in [&reduced, &full] {
            let p1 = nls.project(&mut ws, &probe, &targets, policy).unwrap();
            let p2 = nls.project(&mut ws, &p1, &targets, policy).unwrap();
            assert_close(&p2, &p1, 1e-13, "nls projection")?;
        }

        let hyp = HypNlsModel::new(g, 1.0, 0.1);
        let u = hyp
            .state_from_fn(&mut ws, |x| {
                Complex64::new(
                    0.5 + eval_profile(&re, len, 0.0, x),
                    eval_profile(&im, len, 0.0, x),
                )
            })
            .unwrap();
        let targets = hyp.invariants(&mut ws, &u).unwrap();
        let mut probe = u.clone();
        probe.scale(1.0 + eps);
        let p1 = hyp.project(&mut ws, &probe, &targets, &reduced).unwrap();
        let p2 = hyp.project(&mut ws, &p1, &targets, &reduced).unwrap();
        assert_close(&p2, &p1, 1e-13, "hypnls projection")?;
    }

    /// The shift-and-scale projection depends only on the direction of the
    /// zero-mean deviation, not on its size: inputs on the same ray map to
    /// the same point of the constraint manifold.
    #[test]
    fn shift_and_scale_projection_ignores_radial_scaling(
        re in mode_params(),
        bump in mode_params(),
        s in 0.1..10.0f64,
    ) {
        let g = grid();
        let len = g.length();
        let mut ws = Workspace::new();
        let full = ConservationPolicy::full();

        let bbm = BbmModel::new(g);
        let u = bbm
            .state_from_fn(&mut ws, |x| 1.0 + eval_profile(&re, len, 0.0, x))
            .unwrap();
        let targets = bbm.invariants(&mut ws, &u).unwrap();
        let probe = bbm
            .state_from_fn(&mut ws, |x| {
                1.0 + eval_profile(&re, len, 0.0, x) + 0.02 * eval_profile(&bump, len, 0.4, x)
            })
            .unwrap();
        let mut scaled = probe.clone();
        let mean = scaled.u.mean();
        scaled.u.shift_mean(-mean);
        scaled.u.scale(s);
        scaled.u.shift_mean(mean);
        let a = bbm.project(&mut ws, &probe, &targets, &full).unwrap();
        let b = bbm.project(&mut ws, &scaled, &targets, &full).unwrap();
        assert_close(&b, &a, 1e-12, "bbm ray")?;

        let kdv = KdvModel::new(g);
        let u = kdv
            .state_from_fn(&mut ws, |x| eval_profile(&re, len, -0.2, x))
            .unwrap();
        let targets = kdv.invariants(&mut ws, &u).unwrap();
        let probe = kdv
            .state_from_fn(&mut ws, |x| {
                eval_profile(&re, len, -0.2, x) + 0.02 * eval_profile(&bump, len, 0.4, x)
            })
            .unwrap();
        let mut scaled = probe.clone();
        let mean = scaled.u.mean();
        scaled.u.shift_mean(-mean);
        scaled.u.scale(s);
        scaled.u.shift_mean(mean);
        let a = kdv.project(&mut ws, &probe, &targets, &full).unwrap();
        let b = kdv.project(&mut ws, &scaled, &targets, &full).unwrap();
        assert_close(&b, &a, 1e-12, "kdv ray")?;
    }
}

#[test]
fn integration_is_bit_reproducible() {
    let g = grid();
    let run = || {
        let mut ws = Workspace::new();
        let model = KdvModel::new(g);
        let u0 = model
            .state_from_fn(&mut ws, |x| {
                0.3 + 0.5 * (2.0 * std::f64::consts::PI * x / g.length()).cos()
            })
            .unwrap();
        integrate(&model, &mut ws, &ArkTableau::ark436(), u0, 0.0, 1.0, 0.05).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.u, b.u);
}
