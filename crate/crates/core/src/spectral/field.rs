use num_complex::Complex64;

use super::{SpectralError, SpectralGrid};

/// Real trigonometric polynomial stored through its half-spectrum.
///
/// `coeff(j)` is the coefficient of `exp(i k_j x)` in the interpolant; the
/// conjugate modes are implied.  The field evaluates as
///
/// ```text
/// u(x) = Re[ c_0 + 2 sum_{0 < j < n/2} c_j exp(i k_j x) + c_{n/2} exp(i k_{n/2} x) ]
/// ```
///
/// with the Nyquist term present only for even `n` and entering once, not
/// twice, so that a pure nodal cosine at the Nyquist frequency round-trips
/// with coefficient 1.  `c_0` stays real under every operation here.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalField {
    grid: SpectralGrid,
    coeffs: Vec<Complex64>,
}

impl ModalField {
    /// Zero field on `grid`.
    pub fn zeros(grid: SpectralGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.half_len()],
        }
    }

    /// Builds a field from raw half-spectrum coefficients.
    ///
    /// The imaginary part of `c_0` is dropped: the mean of a real field is
    /// real by definition.
    pub fn from_coeffs(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.half_len() {
            return Err(SpectralError::CoeffCount {
                got: coeffs.len(),
                want: grid.half_len(),
                n: grid.n(),
            });
        }
        let mut f = Self { grid, coeffs };
        f.coeffs[0].im = 0.0;
        Ok(f)
    }

    /// Builds a field without adjusting `c_0`.
    ///
    /// Mode-by-mode solves with a synthetic complex shift can produce a
    /// complex mean; those callers keep the raw result so residuals stay
    /// exact.  Real shifts never put an imaginary part there.
    pub(crate) fn from_coeffs_unchecked(grid: SpectralGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.half_len());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs[j]
    }

    /// Overwrites mode `j`; writes to mode 0 keep only the real part.
    pub fn set_coeff(&mut self, j: usize, value: Complex64) {
        self.coeffs[j] = if j == 0 {
            Complex64::new(value.re, 0.0)
        } else {
            value
        };
    }

    /// Mean value of the field over the domain.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Spectral derivative of order `r`: mode `j` is scaled by `(i k_j)^r`.
    ///
    /// The scaling is applied to every stored mode, the even-`n` Nyquist
    /// mode included; its imaginary part carries the sine component that a
    /// nodal differentiation would discard.
    pub fn derivative(&self, r: u32) -> Self {
        let mut out = self.clone();
        for (j, c) in out.coeffs.iter_mut().enumerate() {
            let ik = Complex64::new(0.0, self.grid.wavenumber(j));
            *c *= ik.powu(r);
        }
        out.coeffs[0].im = 0.0;
        out
    }

    /// Multiplies mode `j` by `symbol(k_j)`.
    ///
    /// Fails if the symbol is not finite at some stored wavenumber.  The
    /// mean coefficient stays real.
    pub fn apply_symbol(
        &self,
        symbol: impl Fn(f64) -> Complex64,
    ) -> Result<Self, SpectralError> {
        let mut out = self.clone();
        for (j, c) in out.coeffs.iter_mut().enumerate() {
            let k = self.grid.wavenumber(j);
            let s = symbol(k);
            if !s.re.is_finite() || !s.im.is_finite() {
                return Err(SpectralError::SingularSymbol { k });
            }
            *c *= s;
        }
        out.coeffs[0].im = 0.0;
        Ok(out)
    }

    /// `L^2` inner product `integral of self * other` over the domain.
    ///
    /// Computed from Parseval's identity with mode weights 1 (mean),
    /// 2 (interior) and 1/2 (even-`n` Nyquist, which the implied conjugate
    /// pair splits in half).
    pub fn inner_product(&self, other: &Self) -> Result<f64, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch {
                left: self.grid,
                right: other.grid,
            });
        }
        let nyq = self.grid.nyquist();
        let mut sum = self.coeffs[0].re * other.coeffs[0].re;
        for j in 1..self.coeffs.len() {
            let prod = (self.coeffs[j] * other.coeffs[j].conj()).re;
            let w = if Some(j) == nyq { 0.5 } else { 2.0 };
            sum += w * prod;
        }
        Ok(self.grid.length() * sum)
    }

    /// `L^2` norm of the field.
    pub fn norm_l2(&self) -> f64 {
        self.inner_product(self).expect("same grid").max(0.0).sqrt()
    }

    /// `self += a * other`.  Both fields must live on the same grid.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
    }

    /// `self *= a`.
    pub fn scale(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    /// Adds the constant `a` to the field.
    pub fn shift_mean(&mut self, a: f64) {
        self.coeffs[0].re += a;
    }

    /// `a + g * (b - a)` without intermediate clones.
    pub fn lerp(a: &Self, b: &Self, g: f64) -> Self {
        assert_eq!(a.grid, b.grid, "lerp on mismatched grids");
        let mut out = a.clone();
        for (c, (&ca, &cb)) in out.coeffs.iter_mut().zip(a.coeffs.iter().zip(&b.coeffs)) {
            *c = ca + g * (cb - ca);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::new(0.0, 2.0 * PI, n).unwrap()
    }

    /// cos(x) on an n = 8 grid: c_1 = 1/2.
    fn cos_x() -> ModalField {
        let mut f = ModalField::zeros(grid(8));
        f.set_coeff(1, Complex64::new(0.5, 0.0));
        f
    }

    /// sin(x) on an n = 8 grid: c_1 = -i/2.
    fn sin_x() -> ModalField {
        let mut f = ModalField::zeros(grid(8));
        f.set_coeff(1, Complex64::new(0.0, -0.5));
        f
    }

    #[test]
    fn mean_is_real_by_construction() {
        let g = grid(8);
        let coeffs = vec![Complex64::new(1.0, 3.0); g.half_len()];
        let f = ModalField::from_coeffs(g, coeffs).unwrap();
        assert_eq!(f.coeff(0), Complex64::new(1.0, 0.0));
        let mut f2 = ModalField::zeros(g);
        f2.set_coeff(0, Complex64::new(2.0, -1.0));
        assert_eq!(f2.mean(), 2.0);
        assert_eq!(f2.coeff(0).im, 0.0);
    }

    #[test]
    fn from_coeffs_checks_length() {
        let g = grid(8);
        let err = ModalField::from_coeffs(g, vec![Complex64::new(0.0, 0.0); 3]).unwrap_err();
        assert!(matches!(err, SpectralError::CoeffCount { got: 3, want: 5, .. }));
    }

    #[test]
    fn derivative_of_sin_is_cos() {
        let d = sin_x().derivative(1);
        // d/dx sin = cos: c_1 = (i * 1) * (-i/2) = 1/2
        assert_relative_eq!(d.coeff(1).re, 0.5, max_relative = 1e-15);
        assert_relative_eq!(d.coeff(1).im, 0.0, max_relative = 1e-15);
    }

    #[test]
    fn derivative_keeps_nyquist_complex() {
        // cos(2x) on n = 4 has Nyquist coefficient 1; its derivative
        // -2 sin(2x) must live in the imaginary part of the same mode.
        let g = SpectralGrid::new(0.0, 2.0 * PI, 4).unwrap();
        let mut f = ModalField::zeros(g);
        f.set_coeff(2, Complex64::new(1.0, 0.0));
        let d = f.derivative(1);
        assert_relative_eq!(d.coeff(2).im, 2.0, max_relative = 1e-15);
        assert_relative_eq!(d.coeff(2).re, 0.0, max_relative = 1e-15);
    }

    #[test]
    fn second_derivative_is_minus_k_squared() {
        let d2 = cos_x().derivative(2);
        assert_relative_eq!(d2.coeff(1).re, -0.5, max_relative = 1e-15);
    }

    #[test]
    fn symbol_inverts_derivative_on_zero_mean_fields() {
        let f = sin_x();
        let d3 = f.derivative(3);
        let back = d3
            .apply_symbol(|k| {
                if k == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(1.0, 0.0) / Complex64::new(0.0, k).powu(3)
                }
            })
            .unwrap();
        for j in 0..f.coeffs().len() {
            assert_relative_eq!(back.coeff(j).re, f.coeff(j).re, epsilon = 1e-15);
            assert_relative_eq!(back.coeff(j).im, f.coeff(j).im, epsilon = 1e-15);
        }
    }

    #[test]
    fn singular_symbol_is_rejected() {
        let err = sin_x()
            .apply_symbol(|k| Complex64::new(1.0 / k, 0.0))
            .unwrap_err();
        assert_eq!(err, SpectralError::SingularSymbol { k: 0.0 });
    }

    #[test]
    fn inner_product_of_sin_with_itself_is_pi() {
        let s = sin_x();
        assert_relative_eq!(s.inner_product(&s).unwrap(), PI, max_relative = 1e-14);
        // <sin, cos> = 0
        assert_relative_eq!(s.inner_product(&cos_x()).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_product_weights_nyquist_by_half() {
        // cos(2x) on n = 4: integral of cos^2(2x) over [0, 2 pi) is pi.
        let g = SpectralGrid::new(0.0, 2.0 * PI, 4).unwrap();
        let mut f = ModalField::zeros(g);
        f.set_coeff(2, Complex64::new(1.0, 0.0));
        assert_relative_eq!(f.inner_product(&f).unwrap(), PI, max_relative = 1e-14);
        // -0.5 sin(2x) stored as c_2 = 0.5 i: integral of its square is pi/4.
        let mut s = ModalField::zeros(g);
        s.set_coeff(2, Complex64::new(0.0, 0.5));
        assert_relative_eq!(s.inner_product(&s).unwrap(), PI / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn constants_integrate_to_domain_length() {
        let g = SpectralGrid::new(-100.0, 100.0, 16).unwrap();
        let mut one = ModalField::zeros(g);
        one.set_coeff(0, Complex64::new(1.0, 0.0));
        assert_relative_eq!(one.inner_product(&one).unwrap(), 200.0, max_relative = 1e-15);
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = ModalField::zeros(grid(8));
        let b = ModalField::zeros(grid(16));
        assert!(matches!(
            a.inner_product(&b),
            Err(SpectralError::GridMismatch { .. })
        ));
    }

    #[test]
    fn derivative_is_skew_symmetric() {
        // <f', g> = -<f, g'> including the Nyquist mode.
        let g = grid(8);
        let mut f = ModalField::zeros(g);
        f.set_coeff(1, Complex64::new(0.3, -0.1));
        f.set_coeff(3, Complex64::new(-0.2, 0.7));
        f.set_coeff(4, Complex64::new(0.4, 0.9));
        let mut h = ModalField::zeros(g);
        h.set_coeff(1, Complex64::new(-1.0, 0.25));
        h.set_coeff(2, Complex64::new(0.6, 0.6));
        h.set_coeff(4, Complex64::new(-0.3, 0.8));
        let lhs = f.derivative(1).inner_product(&h).unwrap();
        let rhs = -f.inner_product(&h.derivative(1)).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
    }

    #[test]
    fn lerp_matches_axpy() {
        let mut a = ModalField::zeros(grid(8));
        a.set_coeff(2, Complex64::new(1.0, -2.0));
        let mut b = ModalField::zeros(grid(8));
        b.set_coeff(2, Complex64::new(-3.0, 0.5));
        let l = ModalField::lerp(&a, &b, 0.25);
        let mut expect = a.clone();
        let mut diff = b.clone();
        diff.axpy(-1.0, &a);
        expect.axpy(0.25, &diff);
        assert_eq!(l, expect);
    }
}
