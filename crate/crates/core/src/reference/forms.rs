use num_complex::Complex64;

/// Solitary wave `u = 1 + A cosh(k (x - x0 - c t))^-2` on the unit
/// background, with `A = 3 (c - 1)` and `k = sqrt(1 - 1/c) / 2`.
#[derive(Debug, Clone, Copy)]
pub struct BbmSolitary {
    pub x0: f64,
    pub c: f64,
}

impl BbmSolitary {
    pub fn new(x0: f64, c: f64) -> Self {
        assert!(c > 1.0, "solitary wave requires speed c > 1");
        Self { x0, c }
    }

    pub fn amplitude(&self) -> f64 {
        3.0 * (self.c - 1.0)
    }

    pub fn width(&self) -> f64 {
        0.5 * (1.0 - 1.0 / self.c).sqrt()
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.eval_complex(Complex64::new(t, 0.0), x).re
    }

    /// Analytic continuation in time, consumed by the residual oracle's
    /// complex-step time derivative.
    pub fn eval_complex(&self, t: Complex64, x: f64) -> Complex64 {
        let sech = 1.0 / ((self.width() * (x - self.x0 - self.c * t)).cosh());
        1.0 + self.amplitude() * sech * sech
    }
}

/// Two-wave initial data: a faster solitary wave launched behind a slower
/// one on a shared unit background, so they collide during the run.
pub fn bbm_two_wave(t: f64, x: f64) -> f64 {
    bbm_two_wave_complex(Complex64::new(t, 0.0), x).re
}

/// [`bbm_two_wave`] at complex time, for the residual oracle.
pub fn bbm_two_wave_complex(t: Complex64, x: f64) -> Complex64 {
    BbmSolitary::new(-20.0, 1.3).eval_complex(t, x) + BbmSolitary::new(20.0, 1.2).eval_complex(t, x)
        - 1.0
}

/// Multi-soliton solution `u = 12 (log F)_xx` where `F` is a sum of
/// exponentials with one term per subset of solitons and pairwise
/// interaction coefficients `a_ij = ((k_i - k_j) / (k_i + k_j))^2`.
///
/// The second derivative is evaluated in closed form as
/// `12 (F F'' - F'^2) / F^2`; all exponents are shifted by their maximum
/// before exponentiation, so the ratio stays finite for any `t`, `x`.
#[derive(Debug, Clone)]
pub struct KdvSolitons {
    k: Vec<f64>,
    x0: Vec<f64>,
}

impl KdvSolitons {
    pub fn new(k: Vec<f64>, x0: Vec<f64>) -> Self {
        assert_eq!(k.len(), x0.len(), "one position per soliton");
        assert!(!k.is_empty(), "at least one soliton");
        assert!(k.iter().all(|&ki| ki > 0.0), "wavenumbers must be positive");
        for i in 0..k.len() {
            for j in 0..i {
                assert!(k[i] != k[j], "wavenumbers must be distinct");
            }
        }
        Self { k, x0 }
    }

    pub fn two_soliton() -> Self {
        Self::new(vec![0.75, 0.5], vec![-50.0, 50.0])
    }

    pub fn three_soliton() -> Self {
        Self::new(vec![0.75, 0.5, 0.25], vec![-100.0, 0.0, 100.0])
    }

    pub fn order(&self) -> usize {
        self.k.len()
    }

    /// Pairwise interaction coefficient `((k_i - k_j) / (k_i + k_j))^2`.
    pub fn interaction(&self, i: usize, j: usize) -> f64 {
        ((self.k[i] - self.k[j]) / (self.k[i] + self.k[j])).powi(2)
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let n = self.k.len();
        // per subset S: theta_S = sum eta_i, kappa_S = sum k_i,
        // coefficient A_S = prod of pairwise interactions within S
        let mut theta = Vec::with_capacity(1 << n);
        let mut kappa = Vec::with_capacity(1 << n);
        let mut coeff = Vec::with_capacity(1 << n);
        for mask in 0usize..(1 << n) {
            let mut th = 0.0;
            let mut ka = 0.0;
            let mut a = 1.0;
            for i in 0..n {
                if mask & (1 << i) == 0 {
                    continue;
                }
                th += self.k[i] * (x - self.x0[i]) - self.k[i].powi(3) * t;
                ka += self.k[i];
                for j in 0..i {
                    if mask & (1 << j) != 0 {
                        a *= self.interaction(i, j);
                    }
                }
            }
            theta.push(th);
            kappa.push(ka);
            coeff.push(a);
        }
        let shift = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (mut g0, mut g1, mut g2) = (0.0, 0.0, 0.0);
        for s in 0..theta.len() {
            let e = coeff[s] * (theta[s] - shift).exp();
            g0 += e;
            g1 += kappa[s] * e;
            g2 += kappa[s] * kappa[s] * e;
        }
        12.0 * (g0 * g2 - g1 * g1) / (g0 * g0)
    }
}

/// Coupling strength of the focusing cubic equation solved by
/// [`nls_bright`].
pub const NLS_BRIGHT_BETA: f64 = 2.0;

/// Bright soliton of the focusing cubic equation: a unit sech envelope
/// moving left at speed 4 under a linear phase.
pub fn nls_bright(t: f64, x: f64) -> Complex64 {
    let env = 1.0 / (x + 4.0 * t).cosh();
    let phase = -(2.0 * x + 3.0 * t);
    env * Complex64::new(phase.cos(), phase.sin())
}

/// Coupling strength of the defocusing cubic equation solved by the gray
/// solitons.
pub const NLS_GRAY_BETA: f64 = -1.0;

/// Half-width of the domain on which the standard one-gray soliton is
/// periodic to machine precision: the carrier phase advance across the
/// domain closes the phase jump of the dip against a multiple of `2 pi`.
pub const GRAY_ONE_HALF_WIDTH: f64 = 31.970600318475647;

/// Half-width of the domain on which the standard two-gray soliton is
/// periodic to machine precision (`261 pi / 2`, matching the `k = 2`
/// carrier).
pub const GRAY_TWO_HALF_WIDTH: f64 = 409.97784129346803;

/// One gray soliton of the defocusing cubic equation: a moving density
/// dip from the background `b0` down to `b1`, with carrier wavenumber
/// and frequency tied to the speed `c`.
#[derive(Debug, Clone, Copy)]
pub struct NlsGrayOne {
    pub b0: f64,
    pub b1: f64,
    pub c: f64,
}

impl NlsGrayOne {
    pub fn new(b0: f64, b1: f64, c: f64) -> Self {
        assert!(
            0.0 < b1 && b1 < b0,
            "gray soliton requires densities 0 < b1 < b0"
        );
        Self { b0, b1, c }
    }

    /// Background density 1.5, dip density 1, speed `2 sqrt(2)`; periodic
    /// on `[-GRAY_ONE_HALF_WIDTH, GRAY_ONE_HALF_WIDTH]`.
    pub fn standard() -> Self {
        Self::new(1.5, 1.0, 2.0 * std::f64::consts::SQRT_2)
    }

    /// Carrier wavenumber `(c - sqrt(2 b1)) / 2`.
    pub fn kappa(&self) -> f64 {
        (self.c - (2.0 * self.b1).sqrt()) / 2.0
    }

    /// Carrier frequency `b0 - (c^2 - 2 b1) / 4`.
    pub fn omega(&self) -> f64 {
        self.b0 - (self.c * self.c - 2.0 * self.b1) / 4.0
    }

    pub fn eval(&self, t: f64, x: f64) -> Complex64 {
        let xi = x - self.c * t;
        let dip = (self.b1 / self.b0).sqrt();
        let depth = (1.0 - self.b1 / self.b0).sqrt();
        let th = ((self.b0 - self.b1) / 2.0).sqrt() * xi;
        let bracket = Complex64::new(depth * th.tanh(), dip);
        let phase = self.kappa() * xi - self.omega() * t;
        self.b0.sqrt() * Complex64::new(phase.cos(), phase.sin()) * bracket
    }

    /// Evaluates the wave as seen on the periodic domain
    /// `[-half_width, half_width]`: `x` is shifted by whole periods so
    /// that it lands within one half-width of the moving dip, where the
    /// tanh tails have saturated and the phase closure holds. Required
    /// once the dip has crossed the domain boundary, since the raw form
    /// is a traveling wave on the whole line.
    pub fn eval_periodic(&self, half_width: f64, t: f64, x: f64) -> Complex64 {
        let period = 2.0 * half_width;
        let shift = ((x - self.c * t + half_width) / period).floor() * period;
        self.eval(t, x - shift)
    }
}

/// Two gray solitons of the defocusing cubic equation colliding at
/// `t = 0`, written in a frame moving with the carrier `exp(i(kx - k^2 t))`.
#[derive(Debug, Clone, Copy)]
pub struct NlsGrayTwo {
    pub a1: f64,
    pub a3: f64,
    pub k: f64,
}

impl NlsGrayTwo {
    pub fn new(a1: f64, a3: f64, k: f64) -> Self {
        assert!(
            0.0 < a1 && a1 < a3,
            "gray solitons require densities 0 < a1 < a3"
        );
        Self { a1, a3, k }
    }

    /// Background density 1.5, dip density 1, carrier wavenumber 2;
    /// periodic on `[-GRAY_TWO_HALF_WIDTH, GRAY_TWO_HALF_WIDTH]`.
    pub fn standard() -> Self {
        Self::new(1.0, 1.5, 2.0)
    }

    /// Temporal interaction rate `4 sqrt(a1 (a3 - a1))`.
    pub fn mu(&self) -> f64 {
        4.0 * (self.a1 * (self.a3 - self.a1)).sqrt()
    }

    /// Spatial decay rate `sqrt(a3 - a1)`.
    pub fn p(&self) -> f64 {
        (self.a3 - self.a1).sqrt()
    }

    pub fn eval(&self, t: f64, x: f64) -> Complex64 {
        let (a1, a3, k) = (self.a1, self.a3, self.k);
        let xi = x - 2.0 * k * t;
        let half_mu_t = 0.5 * self.mu() * t;
        let cht = half_mu_t.cosh();
        let sht = half_mu_t.sinh();
        let chx = (2.0 * self.p() * xi / std::f64::consts::SQRT_2).cosh();
        let num = Complex64::new(
            (2.0 * a3 - 4.0 * a1) * cht - 2.0 * (a1 * a3).sqrt() * chx,
            -self.mu() * sht,
        );
        let den = 2.0 * a3.sqrt() * cht + 2.0 * a1.sqrt() * chx;
        let phase = k * x - k * k * t - a3 * t;
        Complex64::new(phase.cos(), phase.sin()) * num / den
    }
}
