use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use super::{dealias_grid_size, quadrature_grid_size, ModalField, SpectralError, SpectralGrid};

/// Most inputs a pointwise map can take.
const MAX_MAP_INPUTS: usize = 8;

/// FFT plans and scratch buffers shared by every transform of one solver run.
///
/// Plans are cached per transform size, phase tables per `(size, xmin/L)`
/// pair, so repeated steps never replan or reallocate.  The same sequence of
/// calls always produces bit-identical results.
pub struct Workspace {
    planner: RealFftPlanner<f64>,
    plans: HashMap<usize, PlanPair>,
    /// `exp(-i k_j xmin)` tables keyed by mode count and `xmin / L` bits.
    twiddles: HashMap<(usize, u64), Arc<Vec<Complex64>>>,
    values: Vec<f64>,
    spectrum: Vec<Complex64>,
    scratch: Vec<Complex64>,
    node_buffers: Vec<Vec<f64>>,
}

struct PlanPair {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
}

impl Default for Workspace {
    fn default() -> Self {
        Self::new()
    }
}

impl Workspace {
    pub fn new() -> Self {
        Self {
            planner: RealFftPlanner::new(),
            plans: HashMap::new(),
            twiddles: HashMap::new(),
            values: Vec::new(),
            spectrum: Vec::new(),
            scratch: Vec::new(),
            node_buffers: Vec::new(),
        }
    }

    fn plan(&mut self, m: usize) -> (Arc<dyn RealToComplex<f64>>, Arc<dyn ComplexToReal<f64>>) {
        let planner = &mut self.planner;
        let pair = self.plans.entry(m).or_insert_with(|| PlanPair {
            r2c: planner.plan_fft_forward(m),
            c2r: planner.plan_fft_inverse(m),
        });
        (pair.r2c.clone(), pair.c2r.clone())
    }

    /// Phase table `exp(-i 2 pi j r)` for `j = 0 .. modes`, `r = xmin / L`.
    ///
    /// The table converts between coefficients of `exp(i k_j x)` in absolute
    /// coordinates and the plain DFT of the node values, whose phases are
    /// relative to the left endpoint.
    fn twiddle(&mut self, modes: usize, ratio: f64) -> Arc<Vec<Complex64>> {
        self.twiddles
            .entry((modes, ratio.to_bits()))
            .or_insert_with(|| {
                Arc::new(
                    (0..modes)
                        .map(|j| {
                            let theta = -2.0 * std::f64::consts::PI * j as f64 * ratio;
                            Complex64::new(theta.cos(), theta.sin())
                        })
                        .collect(),
                )
            })
            .clone()
    }

    /// Transforms `n` node values into the modal representation.
    ///
    /// For even `n` the Nyquist coefficient comes out real: a sine at the
    /// Nyquist frequency vanishes on the nodes, so nodal data cannot carry
    /// an imaginary part there.
    pub fn forward(
        &mut self,
        grid: SpectralGrid,
        values: &[f64],
    ) -> Result<ModalField, SpectralError> {
        let n = grid.n();
        if values.len() != n {
            return Err(SpectralError::CoeffCount {
                got: values.len(),
                want: n,
                n,
            });
        }
        let (r2c, _) = self.plan(n);
        self.values.clear();
        self.values.extend_from_slice(values);
        self.spectrum.resize(grid.half_len(), Complex64::default());
        self.scratch
            .resize(r2c.get_scratch_len(), Complex64::default());
        r2c.process_with_scratch(&mut self.values, &mut self.spectrum, &mut self.scratch)
            .expect("buffer lengths match the plan");

        let tw = self.twiddle(grid.half_len(), grid.xmin() / grid.length());
        let inv_n = 1.0 / n as f64;
        let mut coeffs = Vec::with_capacity(grid.half_len());
        for (j, &x) in self.spectrum.iter().enumerate() {
            coeffs.push(x * inv_n * tw[j]);
        }
        coeffs[0].im = 0.0;
        if let Some(ny) = grid.nyquist() {
            // real input: the raw DFT Nyquist bin is real, and the twiddle
            // rotation is the only imaginary content
            coeffs[ny] = Complex64::new(self.spectrum[ny].re * inv_n, 0.0) * tw[ny];
        }
        ModalField::from_coeffs(grid, coeffs)
    }

    /// Evaluates the field on `m >= n` equispaced nodes of its own domain.
    ///
    /// Zero padding makes this exact; for `m > n` the imaginary (sine) part
    /// of an even-`n` Nyquist coefficient becomes visible, entering through
    /// the conjugate pair with weight 1/2 each.
    pub fn evaluate(&mut self, f: &ModalField, m: usize) -> Result<Vec<f64>, SpectralError> {
        let grid = f.grid();
        let n = grid.n();
        if m < n {
            return Err(SpectralError::EvalTooSmall { m, n });
        }
        let half_m = m / 2 + 1;
        self.spectrum.clear();
        self.spectrum.resize(half_m, Complex64::default());

        let tw = self.twiddle(grid.half_len(), grid.xmin() / grid.length());
        for (j, &c) in f.coeffs().iter().enumerate() {
            self.spectrum[j] = c * tw[j].conj();
        }
        if let Some(ny) = grid.nyquist() {
            if m > n {
                self.spectrum[ny] *= 0.5;
            } else {
                // the sine component vanishes on the coarse nodes
                self.spectrum[ny].im = 0.0;
            }
        }
        self.spectrum[0].im = 0.0;
        if m.is_multiple_of(2) {
            self.spectrum[half_m - 1].im = 0.0;
        }

        let (_, c2r) = self.plan(m);
        let mut out = vec![0.0; m];
        self.scratch
            .resize(c2r.get_scratch_len(), Complex64::default());
        c2r.process_with_scratch(&mut self.spectrum, &mut out, &mut self.scratch)
            .expect("buffer lengths match the plan");
        Ok(out)
    }

    /// Exact `L^2` projection of `m`-node samples onto the `n`-grid modes.
    ///
    /// Inverse of [`Workspace::evaluate`] when the sampled function has no
    /// content above the retained band.  For even `n` and `m > n` the
    /// Nyquist mode, interior on the fine grid, is doubled back into the
    /// single-slot storage convention.
    pub fn project_samples(
        &mut self,
        grid: SpectralGrid,
        values: &[f64],
    ) -> Result<ModalField, SpectralError> {
        let n = grid.n();
        let m = values.len();
        if m < n {
            return Err(SpectralError::EvalTooSmall { m, n });
        }
        if m == n {
            return self.forward(grid, values);
        }
        let (r2c, _) = self.plan(m);
        self.values.clear();
        self.values.extend_from_slice(values);
        self.spectrum.resize(m / 2 + 1, Complex64::default());
        self.scratch
            .resize(r2c.get_scratch_len(), Complex64::default());
        r2c.process_with_scratch(&mut self.values, &mut self.spectrum, &mut self.scratch)
            .expect("buffer lengths match the plan");

        let tw = self.twiddle(grid.half_len(), grid.xmin() / grid.length());
        let inv_m = 1.0 / m as f64;
        let mut coeffs = Vec::with_capacity(grid.half_len());
        for j in 0..grid.half_len() {
            coeffs.push(self.spectrum[j] * inv_m * tw[j]);
        }
        coeffs[0].im = 0.0;
        if let Some(ny) = grid.nyquist() {
            coeffs[ny] *= 2.0;
        }
        ModalField::from_coeffs(grid, coeffs)
    }

    /// De-aliased pointwise nonlinearity.
    ///
    /// Evaluates `inputs` on the padded grid for a degree-`degree` product,
    /// applies `map` node by node and projects back: the exact `L^2`
    /// projection of the nonlinearity onto the common grid of the inputs.
    pub fn project_nonlinearity(
        &mut self,
        inputs: &[&ModalField],
        degree: u32,
        mut map: impl FnMut(&[f64]) -> f64,
    ) -> Result<ModalField, SpectralError> {
        let grid = common_grid(inputs)?;
        let m = dealias_grid_size(grid.n(), degree);
        let nodal = self.input_values(inputs, m)?;
        let mut out = vec![0.0; m];
        let mut args = [0.0; MAX_MAP_INPUTS];
        for i in 0..m {
            for (a, buf) in args.iter_mut().zip(&nodal) {
                *a = buf[i];
            }
            out[i] = map(&args[..inputs.len()]);
        }
        let projected = self.project_samples(grid, &out);
        self.node_buffers = nodal;
        projected
    }

    /// Exact integral of a degree-`degree` pointwise product over the domain.
    ///
    /// The integrand is sampled on enough nodes that its node mean equals
    /// its true mean; the sum is compensated so the result is reproducible
    /// to the last bit.
    pub fn integral_of_nonlinearity(
        &mut self,
        inputs: &[&ModalField],
        degree: u32,
        mut map: impl FnMut(&[f64]) -> f64,
    ) -> Result<f64, SpectralError> {
        let grid = common_grid(inputs)?;
        let m = quadrature_grid_size(grid.n(), degree);
        let nodal = self.input_values(inputs, m)?;
        let mut args = [0.0; MAX_MAP_INPUTS];
        // Kahan summation of the node values
        let mut sum = 0.0;
        let mut carry = 0.0;
        for i in 0..m {
            for (a, buf) in args.iter_mut().zip(&nodal) {
                *a = buf[i];
            }
            let y = map(&args[..inputs.len()]) - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        self.node_buffers = nodal;
        Ok(grid.length() * sum / m as f64)
    }

    /// Evaluates every input on `m` nodes, reusing cached buffers.
    fn input_values(
        &mut self,
        inputs: &[&ModalField],
        m: usize,
    ) -> Result<Vec<Vec<f64>>, SpectralError> {
        let mut bufs = std::mem::take(&mut self.node_buffers);
        bufs.truncate(inputs.len());
        let mut out = Vec::with_capacity(inputs.len());
        for (idx, f) in inputs.iter().enumerate() {
            let mut buf = bufs.get_mut(idx).map(std::mem::take).unwrap_or_default();
            let vals = self.evaluate(f, m)?;
            buf.clear();
            buf.extend_from_slice(&vals);
            out.push(buf);
        }
        Ok(out)
    }
}

fn common_grid(inputs: &[&ModalField]) -> Result<SpectralGrid, SpectralError> {
    let first = inputs.first().ok_or(SpectralError::NoInputs)?.grid();
    if inputs.len() > MAX_MAP_INPUTS {
        return Err(SpectralError::TooManyInputs {
            got: inputs.len(),
            max: MAX_MAP_INPUTS,
        });
    }
    for f in &inputs[1..] {
        if f.grid() != first {
            return Err(SpectralError::GridMismatch {
                left: first,
                right: f.grid(),
            });
        }
    }
    Ok(first)
}
