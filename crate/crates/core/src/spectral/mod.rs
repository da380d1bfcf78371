//! Fourier spectral representation on uniform periodic grids.
//!
//! A real trigonometric polynomial of degree `n/2` is stored through the
//! half-spectrum `c_0 .. c_{n/2}`; the negative modes are implied by the
//! Hermitian symmetry of real functions.  Two storage rules matter
//! throughout:
//!
//! * the mean coefficient `c_0` is real,
//! * for even `n` the Nyquist coefficient is kept as a full complex number.
//!
//! Keeping the Nyquist sine component is deliberate: it makes the
//! differentiation matrix skew-symmetric and is required for the discrete
//! conservation identities.  An even-`n` field therefore carries `n + 1`
//! real degrees of freedom, one more than it has nodes, and the extra
//! component is only visible when the field is evaluated on a finer grid.

mod field;
mod workspace;

pub use field::ModalField;
pub use workspace::Workspace;

use thiserror::Error;

/// Errors produced by grid construction and spectral kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid grid: n = {n}, domain = [{xmin}, {xmax})")]
    InvalidGrid { n: usize, xmin: f64, xmax: f64 },
    #[error("coefficient count {got} does not match the {want} modes of an n = {n} grid")]
    CoeffCount { got: usize, want: usize, n: usize },
    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch {
        left: SpectralGrid,
        right: SpectralGrid,
    },
    #[error("evaluation grid too small: m = {m} < n = {n}")]
    EvalTooSmall { m: usize, n: usize },
    #[error("diagonal symbol is not finite at k = {k}")]
    SingularSymbol { k: f64 },
    #[error("pointwise map takes at most {max} inputs, got {got}")]
    TooManyInputs { got: usize, max: usize },
    #[error("pointwise map needs at least one input field")]
    NoInputs,
}

/// Uniform periodic grid on `[xmin, xmax)` with `n` nodes.
///
/// Node `i` sits at `xmin + i * (xmax - xmin) / n`; the right endpoint is
/// excluded.  Wavenumbers are `k_j = 2 pi j / (xmax - xmin)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    xmin: f64,
    xmax: f64,
    n: usize,
}

impl SpectralGrid {
    pub fn new(xmin: f64, xmax: f64, n: usize) -> Result<Self, SpectralError> {
        if n < 2 || !xmin.is_finite() || !xmax.is_finite() || xmax <= xmin {
            return Err(SpectralError::InvalidGrid { n, xmin, xmax });
        }
        Ok(Self { xmin, xmax, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    /// Domain length `xmax - xmin`.
    pub fn length(&self) -> f64 {
        self.xmax - self.xmin
    }

    /// Node spacing `length / n`.
    pub fn spacing(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.xmin + self.length() * (i as f64 / self.n as f64)
    }

    /// All node coordinates, left endpoint included, right excluded.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Wavenumber of stored mode `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.length()
    }

    /// Number of stored modes, `floor(n/2) + 1`.
    pub fn half_len(&self) -> usize {
        self.n / 2 + 1
    }

    /// Index of the Nyquist mode for even `n`.
    pub fn nyquist(&self) -> Option<usize> {
        self.n.is_multiple_of(2).then_some(self.n / 2)
    }

    /// Real degrees of freedom: `n + 1` for even `n`, `n` for odd.
    pub fn dof(&self) -> usize {
        if self.n.is_multiple_of(2) {
            self.n + 1
        } else {
            self.n
        }
    }
}

fn seven_smooth(mut m: usize) -> bool {
    for p in [2usize, 3, 5, 7] {
        while m.is_multiple_of(p) {
            m /= p;
        }
    }
    m == 1
}

/// Smallest 7-smooth grid size `m` with `m > (degree + 1) * n / 2`.
///
/// Evaluating a degree-`degree` pointwise product of `n`-grid fields on `m`
/// nodes and transforming back returns the exact `L^2` projection of the
/// product: every aliased mode of the degree-`degree * n/2` integrand lands
/// strictly above the retained band.  `degree = 2` recovers the 3/2 rule.
pub fn dealias_grid_size(n: usize, degree: u32) -> usize {
    assert!(degree >= 1 && n >= 1);
    // m > (degree + 1) * n / 2, kept in integers as 2m > (degree + 1) * n
    let bound = (degree as usize + 1) * n;
    let mut m = bound / 2 + 1;
    while 2 * m <= bound || !seven_smooth(m) {
        m += 1;
    }
    m
}

/// Smallest 7-smooth grid size `m` with `m > degree * n / 2 + 1`.
///
/// The node mean on `m` points integrates a degree-`degree * n/2`
/// trigonometric polynomial exactly; no mode of the integrand can alias
/// onto mode zero.
pub fn quadrature_grid_size(n: usize, degree: u32) -> usize {
    assert!(degree >= 1 && n >= 1);
    // m > degree * n / 2 + 1  <=>  2m > degree * n + 2
    let bound = degree as usize * n + 2;
    let mut m = bound / 2 + 1;
    while 2 * m <= bound || !seven_smooth(m) {
        m += 1;
    }
    m
}
