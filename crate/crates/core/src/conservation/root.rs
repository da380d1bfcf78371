use crate::conservation::RelaxError;

/// Interior samples taken when the bracket endpoints agree in sign.
const SCAN: usize = 16;

/// Root of a scalar function by safeguarded secant iteration.
///
/// When `[lo, hi]` shows no sign change at its endpoints, the interval is
/// scanned at interior points — a defect curve can dip across zero and
/// back inside the bracket — and, among the sign changes found, the one
/// nearest the bracket center is kept. The bracket is never widened: a
/// root outside it is reported as [`RelaxError::NoBracket`] so the caller
/// can decide how to recover. Secant candidates are accepted only inside
/// the current bracket; otherwise the step falls back to bisection, so
/// convergence is guaranteed once a sign change is found. Returns
/// `(root, residual, evaluations)`.
///
/// The closure is fallible so callers can evaluate functionals that
/// themselves can fail; such errors abort the solve immediately.
pub fn solve_scalar_root<F>(
    mut f: F,
    bracket: (f64, f64),
    tol: f64,
    max_evals: usize,
) -> Result<(f64, f64, usize), RelaxError>
where
    F: FnMut(f64) -> Result<f64, RelaxError>,
{
    assert!(bracket.0 < bracket.1, "empty bracket");
    assert!(tol > 0.0, "tolerance must be positive");
    let mut evals = 0usize;
    let mut eval = |x: f64, evals: &mut usize| -> Result<f64, RelaxError> {
        *evals += 1;
        f(x)
    };

    let (mut lo, mut hi) = bracket;
    let mut flo = eval(lo, &mut evals)?;
    if flo.abs() <= tol {
        return Ok((lo, flo, evals));
    }
    let mut fhi = eval(hi, &mut evals)?;
    if fhi.abs() <= tol {
        return Ok((hi, fhi, evals));
    }

    if flo * fhi > 0.0 {
        let prefer = 0.5 * (bracket.0 + bracket.1);
        let mut samples = Vec::with_capacity(SCAN + 1);
        samples.push((lo, flo));
        for i in 1..SCAN {
            let x = lo + (hi - lo) * (i as f64) / (SCAN as f64);
            let fx = eval(x, &mut evals)?;
            if fx.abs() <= tol {
                return Ok((x, fx, evals));
            }
            samples.push((x, fx));
        }
        samples.push((hi, fhi));
        let change = samples
            .windows(2)
            .filter(|w| w[0].1 * w[1].1 < 0.0)
            .min_by(|a, b| {
                let da = (0.5 * (a[0].0 + a[1].0) - prefer).abs();
                let db = (0.5 * (b[0].0 + b[1].0) - prefer).abs();
                da.total_cmp(&db)
            })
            .map(|w| (w[0], w[1]));
        match change {
            Some(((x0, f0), (x1, f1))) => {
                lo = x0;
                flo = f0;
                hi = x1;
                fhi = f1;
            }
            None => {
                return Err(RelaxError::NoBracket {
                    lo,
                    hi,
                    f_lo: flo,
                    f_hi: fhi,
                });
            }
        }
    }

    // secant iterates (x_prev, x) with the bracket [lo, hi] as safeguard
    let (mut x_prev, mut f_prev) = (lo, flo);
    let (mut x, mut fx) = (hi, fhi);
    loop {
        if evals >= max_evals {
            return Err(RelaxError::RootEvaluations(max_evals));
        }
        let denom = fx - f_prev;
        let mut cand = if denom.abs() > f64::MIN_POSITIVE {
            x - fx * (x - x_prev) / denom
        } else {
            0.5 * (lo + hi)
        };
        if !(cand > lo && cand < hi) {
            cand = 0.5 * (lo + hi);
        }
        let fc = eval(cand, &mut evals)?;
        if fc.abs() <= tol || hi - lo <= f64::EPSILON * (1.0 + cand.abs()) {
            return Ok((cand, fc, evals));
        }
        if flo * fc < 0.0 {
            hi = cand;
        } else {
            lo = cand;
            flo = fc;
        }
        x_prev = x;
        f_prev = fx;
        x = cand;
        fx = fc;
    }
}
