//! Shape-preserving piecewise cubic Hermite interpolation (Fritsch–Carlson).

/// A knot `(x, y, slope)`.
pub type Knot = (f64, f64, f64);

/// Slopes for strictly increasing `x`, with the three-point endpoint rule
/// clipped so the curve never overshoots the data.
pub fn pchip_knots(x: &[f64], y: &[f64]) -> Vec<Knot> {
    let n = x.len();
    assert_eq!(n, y.len());
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![(x[0], y[0], 0.0)];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
    } else {
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] <= 0.0 {
                d[k] = 0.0;
            } else {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        d[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    (0..n).map(|k| (x[k], y[k], d[k])).collect()
}

fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Evaluates the interpolant; `None` outside the knot range.
pub fn pchip_eval(knots: &[Knot], t: f64) -> Option<f64> {
    let first = knots.first()?;
    let last = knots.last()?;
    if t < first.0 || t > last.0 {
        return None;
    }
    if knots.len() == 1 {
        return Some(first.1);
    }
    let k = match knots.binary_search_by(|kn| kn.0.total_cmp(&t)) {
        Ok(i) => return Some(knots[i].1),
        Err(i) => i - 1,
    };
    let (x0, y0, d0) = knots[k];
    let (x1, y1, d1) = knots[k + 1];
    let h = x1 - x0;
    let s = (t - x0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    Some(h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1)
}
