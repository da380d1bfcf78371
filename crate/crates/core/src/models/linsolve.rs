use num_complex::Complex64;

/// Solves a dense complex `N x N` system by Gaussian elimination with
/// partial pivoting.  Returns `None` when a pivot degenerates.
///
/// Only tiny systems pass through here (one per Fourier mode), so a plain
/// array implementation beats any general linear algebra machinery.
pub(crate) fn solve_dense<const N: usize>(
    mut a: [[Complex64; N]; N],
    mut b: [Complex64; N],
) -> Option<[Complex64; N]> {
    let mut scale = 0.0f64;
    for row in &a {
        for e in row {
            scale = scale.max(e.norm());
        }
    }
    let tiny = scale * 1e-14 + f64::MIN_POSITIVE;
    for col in 0..N {
        let pivot_row = (col..N)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot_row][col].norm() <= tiny {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col];
        for row in col + 1..N {
            let f = a[row][col] / pivot[col];
            a[row][col] = Complex64::default();
            for (entry, upper) in a[row].iter_mut().zip(pivot.iter()).skip(col + 1) {
                *entry -= f * upper;
            }
            let rhs = b[col];
            b[row] -= f * rhs;
        }
    }
    let mut x = [Complex64::default(); N];
    for col in (0..N).rev() {
        let mut acc = b[col];
        for k in col + 1..N {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}
