//! Natural cubic spline through a set of strictly increasing knots.

/// Fits a natural cubic spline through `(xs[k], ys[k])` and evaluates it at
/// the integer grid `0..len`, writing into `out`.
///
/// Knots may lie outside the grid (mirrored extrema do); evaluation points
/// beyond the outermost knots extrapolate the end cubic.
pub(crate) fn natural_cubic_on_grid(xs: &[f64], ys: &[f64], out: &mut [f64]) {
    let k = xs.len();
    debug_assert!(k >= 2 && ys.len() == k);

    let m = second_derivatives(xs, ys);

    let mut seg = 0;
    for (t, slot) in out.iter_mut().enumerate() {
        let x = t as f64;
        while seg + 2 < k && x > xs[seg + 1] {
            seg += 1;
        }
        let (x0, x1) = (xs[seg], xs[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        *slot = a * ys[seg]
            + b * ys[seg + 1]
            + ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / 6.0;
    }
}

/// Second derivatives at the knots with zero curvature at both ends,
/// solved with the Thomas algorithm.
fn second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let k = xs.len();
    let mut m = vec![0.0; k];
    if k < 3 {
        return m;
    }
    let n = k - 2;
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let h0 = xs[i + 1] - xs[i];
        let h1 = xs[i + 2] - xs[i + 1];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
    }
    // forward sweep; sub-diagonal entry of row i is h0 of that row
    for i in 1..n {
        let lower = xs[i + 1] - xs[i];
        let w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m[n] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
    }
    m
}
