//! Gauss-Legendre quadrature on intervals and rectangles, plus the graded
//! subdivision used to integrate boundary-layer forcing terms.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Supported orders: 1..=8. Exact for polynomials of degree 2n-1.
pub fn gauss_legendre(n: usize) -> (&'static [f64], &'static [f64]) {
    match n {
        1 => (&GL1_X, &GL1_W),
        2 => (&GL2_X, &GL2_W),
        3 => (&GL3_X, &GL3_W),
        4 => (&GL4_X, &GL4_W),
        5 => (&GL5_X, &GL5_W),
        6 => (&GL6_X, &GL6_W),
        7 => (&GL7_X, &GL7_W),
        8 => (&GL8_X, &GL8_W),
        _ => panic!("Gauss-Legendre order {n} not tabulated (supported: 1..=8)"),
    }
}

const GL1_X: [f64; 1] = [0.0];
const GL1_W: [f64; 1] = [2.0];
const GL2_X: [f64; 2] = [-0.5773502691896257, 0.5773502691896257];
const GL2_W: [f64; 2] = [1.0, 1.0];
const GL3_X: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
const GL3_W: [f64; 3] = [0.5555555555555556, 0.8888888888888888, 0.5555555555555556];
const GL4_X: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const GL4_W: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];
const GL5_X: [f64; 5] = [
    -0.9061798459386640,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.9061798459386640,
];
const GL5_W: [f64; 5] = [
    0.2369268850561891,
    0.4786286704993665,
    0.5688888888888889,
    0.4786286704993665,
    0.2369268850561891,
];
const GL6_X: [f64; 6] = [
    -0.9324695142031521,
    -0.6612093864662645,
    -0.2386191860831969,
    0.2386191860831969,
    0.6612093864662645,
    0.9324695142031521,
];
const GL6_W: [f64; 6] = [
    0.1713244923791704,
    0.3607615730481386,
    0.4679139345726910,
    0.4679139345726910,
    0.3607615730481386,
    0.1713244923791704,
];
const GL7_X: [f64; 7] = [
    -0.9491079123427585,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427585,
];
const GL7_W: [f64; 7] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892766,
    0.1294849661688697,
];
const GL8_X: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.5255324099163290,
    -0.1834346424956498,
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];
const GL8_W: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.3626837833783620,
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// n-point Gauss rule mapped to [a, b]: returns (points, weights).
pub fn gauss_on_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let pts = xs.iter().map(|&x| mid + half * x).collect();
    let wts = ws.iter().map(|&w| w * half).collect();
    (pts, wts)
}

/// Composite Gauss rule over the given breakpoints (sorted, covering [b0, bk]).
pub fn composite_gauss(n: usize, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for w in breaks.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let (p, q) = gauss_on_interval(n, w[0], w[1]);
        pts.extend(p);
        wts.extend(q);
    }
    (pts, wts)
}

/// Uniform breakpoints 0 = b_0 < ... < b_m = len with m cells.
pub fn uniform_breaks(m: usize, len: f64) -> Vec<f64> {
    (0..=m).map(|i| len * i as f64 / m as f64).collect()
}

/// Breakpoints on [0, len] geometrically graded towards 0 so that a feature of
/// the given width is resolved: the first cell has size ~width/4 and cells grow
/// by a fixed ratio until they reach len. Returns at least one cell.
pub fn graded_breaks(len: f64, width: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    if !(width > 0.0) || width >= len {
        b.push(len);
        return b;
    }
    let mut step = 0.25 * width;
    let mut x = 0.0;
    while x + step < len {
        x += step;
        b.push(x);
        step *= 1.3;
    }
    b.push(len);
    b
}

/// Sorted union of two breakpoint lists, deduplicated with tolerance.
pub fn merge_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let span = all.last().copied().unwrap_or(0.0) - all.first().copied().unwrap_or(0.0);
    let tol = 1e-12 * span.max(1.0);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for v in all {
        if out.last().map_or(true, |&l| v - l > tol) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        // n-point rule is exact up to degree 2n-1
        for n in 1..=8 {
            let (pts, wts) = gauss_on_interval(n, 0.0, 1.0);
            for deg in 0..(2 * n) {
                let val: f64 = pts
                    .iter()
                    .zip(&wts)
                    .map(|(&x, &w)| w * x.powi(deg as i32))
                    .sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!(
                    (val - exact).abs() < 1e-13,
                    "n={n} deg={deg}: {val} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn composite_rule_sums_cells() {
        let breaks = uniform_breaks(7, 2.0);
        let (pts, wts) = composite_gauss(3, &breaks);
        let val: f64 = pts.iter().zip(&wts).map(|(&x, &w)| w * x * x).sum();
        assert!((val - 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn graded_breaks_resolve_layer() {
        let b = graded_breaks(1.0, 1e-4);
        assert!(b[1] <= 0.25e-4 * 1.0001);
        assert_eq!(*b.last().unwrap(), 1.0);
        // resolves exp(-x/w) to high relative accuracy
        let w = 1e-4;
        let (pts, wts) = composite_gauss(4, &b);
        let val: f64 = pts.iter().zip(&wts).map(|(&x, &g)| g * (-x / w).exp()).sum();
        let exact = w * (1.0 - (-1.0 / w).exp());
        assert!((val - exact).abs() < 1e-8 * exact.abs());
    }

    #[test]
    fn merge_dedups() {
        let m = merge_breaks(&[0.0, 0.5, 1.0], &[0.0, 0.25, 0.5 + 1e-15, 1.0]);
        assert_eq!(m.len(), 4);
    }
}
