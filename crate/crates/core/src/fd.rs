//! Eighth-order central finite differences.

const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

/// Default step for the stencils at coordinate magnitude `scale`.
pub fn step(scale: f64) -> f64 {
    2e-2 * (1.0 + scale.abs())
}

/// First derivative of a scalar function.
pub fn d1(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    let mut acc = 0.0;
    for (k, c) in D1.iter().enumerate() {
        let t = (k + 1) as f64 * h;
        acc += c * (f(x + t) - f(x - t));
    }
    acc / h
}

/// Second derivative of a scalar function.
pub fn d2(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    let mut acc = D2[0] * f(x);
    for (k, c) in D2.iter().enumerate().skip(1) {
        let t = k as f64 * h;
        acc += c * (f(x + t) + f(x - t));
    }
    acc / (h * h)
}

/// Partial derivative of `f` with respect to component `i` of `x`.
pub fn partial(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut y = x.to_vec();
    d1(
        |t| {
            y[i] = t;
            f(&y)
        },
        x[i],
        h,
    )
}

/// Gradient of `f` at `x`.
pub fn gradient(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len()).map(|i| partial(&mut f, x, i, h)).collect()
}

/// Laplacian of `f` at `x`.
pub fn laplacian(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> f64 {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            let v = d2(
                |t| {
                    y[i] = t;
                    f(&y)
                },
                x[i],
                h,
            );
            y[i] = x[i];
            v
        })
        .sum()
}
