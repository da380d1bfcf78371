use num_complex::Complex64;

use crate::spectral::{SpectralError, SpectralGrid, Workspace};

/// Step of the five-point finite-difference stencil supplying the time
/// derivative inside the residual oracle. Chosen so the `O(h^4)`
/// truncation error and the `O(eps / h)` rounding error are both well
/// below the residual thresholds of every shipped closed form.
const TIME_FD_STEP: f64 = 2.5e-4;

fn time_derivative(
    mut sample: impl FnMut(f64) -> Result<Vec<f64>, SpectralError>,
    t: f64,
) -> Result<Vec<f64>, SpectralError> {
    let h = TIME_FD_STEP;
    let m2 = sample(t - 2.0 * h)?;
    let m1 = sample(t - h)?;
    let p1 = sample(t + h)?;
    let p2 = sample(t + 2.0 * h)?;
    Ok((0..m2.len())
        .map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
        .collect())
}

/// Step of the complex-step time derivative used for the elliptic
/// equation: `Im u(t + ih) / h` involves no subtraction of near-equal
/// samples, so `h` can be made small enough that the `O(h^2)`
/// truncation error vanishes without any rounding penalty.
const TIME_CS_STEP: f64 = 1e-5;

/// Max-norm residual of `d/dt (u - u_xx) + u u_x` for a closed form
/// `u(t, x)` assumed periodic on `[xmin, xmax]` to roundoff. The form
/// is evaluated at complex time: its analytic continuation supplies
/// the time derivative via a complex step.
///
/// Space derivatives are spectral on a grid of `resolution` nodes, the
/// time derivative is an independent complex-step difference, so
/// agreement validates the closed form without sharing code with the
/// solver. A real finite-difference stencil is ruled out here: the
/// elliptic combination `u - u_xx` amplifies the stencil's rounding
/// noise by the largest `k^2` on the grid, while the complex step
/// keeps the floor near roundoff.
pub fn bbm_residual(
    u: impl Fn(Complex64, f64) -> Complex64,
    xmin: f64,
    xmax: f64,
    t: f64,
    resolution: usize,
) -> Result<f64, SpectralError> {
    let grid = SpectralGrid::new(xmin, xmax, resolution)?;
    let mut ws = Workspace::new();
    let nodes = grid.nodes();
    let h = TIME_CS_STEP;
    let tc = Complex64::new(t, h);
    let ut: Vec<f64> = nodes.iter().map(|&x| u(tc, x).im / h).collect();
    let modal_ut = ws.forward(grid, &ut)?;
    let mut wt_modal = modal_ut.clone();
    wt_modal.axpy(-1.0, &modal_ut.derivative(2));
    let wt = ws.evaluate(&wt_modal, resolution)?;
    let u0: Vec<f64> = nodes
        .iter()
        .map(|&x| u(Complex64::new(t, 0.0), x).re)
        .collect();
    let modal = ws.forward(grid, &u0)?;
    let ux = ws.evaluate(&modal.derivative(1), resolution)?;
    let mut worst = 0.0f64;
    for i in 0..resolution {
        worst = worst.max((wt[i] + u0[i] * ux[i]).abs());
    }
    Ok(worst)
}

/// Max-norm residual of `u_t + u u_x + u_xxx`, same protocol as
/// [`bbm_residual`].
pub fn kdv_residual(
    u: impl Fn(f64, f64) -> f64,
    xmin: f64,
    xmax: f64,
    t: f64,
    resolution: usize,
) -> Result<f64, SpectralError> {
    let grid = SpectralGrid::new(xmin, xmax, resolution)?;
    let mut ws = Workspace::new();
    let nodes = grid.nodes();
    let ut = time_derivative(
        |tt| Ok(nodes.iter().map(|&x| u(tt, x)).collect()),
        t,
    )?;
    let u0: Vec<f64> = nodes.iter().map(|&x| u(t, x)).collect();
    let modal = ws.forward(grid, &u0)?;
    let ux = ws.evaluate(&modal.derivative(1), resolution)?;
    let uxxx = ws.evaluate(&modal.derivative(3), resolution)?;
    let mut worst = 0.0f64;
    for i in 0..resolution {
        worst = worst.max((ut[i] + u0[i] * ux[i] + uxxx[i]).abs());
    }
    Ok(worst)
}

/// Max-norm residual of `i u_t + u_xx + beta |u|^2 u` over both real and
/// imaginary parts, same protocol as [`bbm_residual`].
pub fn nls_residual(
    u: impl Fn(f64, f64) -> Complex64,
    beta: f64,
    xmin: f64,
    xmax: f64,
    t: f64,
    resolution: usize,
) -> Result<f64, SpectralError> {
    let grid = SpectralGrid::new(xmin, xmax, resolution)?;
    let mut ws = Workspace::new();
    let nodes = grid.nodes();
    let vt = time_derivative(
        |tt| Ok(nodes.iter().map(|&x| u(tt, x).re).collect()),
        t,
    )?;
    let wt = time_derivative(
        |tt| Ok(nodes.iter().map(|&x| u(tt, x).im).collect()),
        t,
    )?;
    let v0: Vec<f64> = nodes.iter().map(|&x| u(t, x).re).collect();
    let w0: Vec<f64> = nodes.iter().map(|&x| u(t, x).im).collect();
    let modal_v = ws.forward(grid, &v0)?;
    let modal_w = ws.forward(grid, &w0)?;
    let vxx = ws.evaluate(&modal_v.derivative(2), resolution)?;
    let wxx = ws.evaluate(&modal_w.derivative(2), resolution)?;
    let mut worst = 0.0f64;
    for i in 0..resolution {
        let q = v0[i] * v0[i] + w0[i] * w0[i];
        let re = -wt[i] + vxx[i] + beta * q * v0[i];
        let im = vt[i] + wxx[i] + beta * q * w0[i];
        worst = worst.max(re.abs()).max(im.abs());
    }
    Ok(worst)
}
