//! Shared oracle utilities for integration tests: plain Q1 Galerkin on
//! (possibly nonuniform) tensor grids, assembled with its own quadrature,
//! independent of the library's table machinery.

#![allow(dead_code)]

use bmzfem::sparse::{compress, solve_linear, SolveOptions, Triplets};

/// Plain bilinear Galerkin solve of -eps*lap(u) + a.grad(u) = f with zero
/// Dirichlet data on the tensor grid given by the sorted node coordinates.
pub struct TensorGalerkin {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub u: Vec<f64>, // nodal values, row-major in y
}

const G3: [(f64, f64); 3] = [
    (0.1127016653792583, 0.2777777777777778),
    (0.5, 0.4444444444444444),
    (0.8872983346207417, 0.2777777777777778),
];

impl TensorGalerkin {
    pub fn solve(
        xs: &[f64],
        ys: &[f64],
        eps: f64,
        wind: [f64; 2],
        f: &dyn Fn(f64, f64) -> f64,
        boundary: Option<&dyn Fn(f64, f64) -> f64>,
    ) -> Self {
        let nx = xs.len() - 1;
        let ny = ys.len() - 1;
        let node = |i: usize, j: usize| j * (nx + 1) + i;
        let mut dof = vec![-1i64; (nx + 1) * (ny + 1)];
        let mut next = 0i64;
        for j in 1..ny {
            for i in 1..nx {
                dof[node(i, j)] = next;
                next += 1;
            }
        }
        let n = next as usize;
        let mut trip = Triplets::new(n, n);
        let mut rhs = vec![0.0; n];
        let bval = |x: f64, y: f64| boundary.map_or(0.0, |g| g(x, y));

        for cy in 0..ny {
            for cx in 0..nx {
                let (x0, x1) = (xs[cx], xs[cx + 1]);
                let (y0, y1) = (ys[cy], ys[cy + 1]);
                let (hx, hy) = (x1 - x0, y1 - y0);
                let corners = [(cx, cy), (cx + 1, cy), (cx + 1, cy + 1), (cx, cy + 1)];
                let mut ke = [[0.0f64; 4]; 4];
                let mut fe = [0.0f64; 4];
                for &(gx, wx) in &G3 {
                    for &(gy, wy) in &G3 {
                        let w = wx * wy * hx * hy;
                        let (px, py) = (x0 + gx * hx, y0 + gy * hy);
                        let sh = [
                            (1.0 - gx) * (1.0 - gy),
                            gx * (1.0 - gy),
                            gx * gy,
                            (1.0 - gx) * gy,
                        ];
                        let dx = [
                            -(1.0 - gy) / hx,
                            (1.0 - gy) / hx,
                            gy / hx,
                            -gy / hx,
                        ];
                        let dy = [
                            -(1.0 - gx) / hy,
                            -gx / hy,
                            gx / hy,
                            (1.0 - gx) / hy,
                        ];
                        for a in 0..4 {
                            for b in 0..4 {
                                ke[b][a] += w
                                    * (eps * (dx[a] * dx[b] + dy[a] * dy[b])
                                        + (wind[0] * dx[a] + wind[1] * dy[a]) * sh[b]);
                            }
                        }
                        let fv = f(px, py);
                        for a in 0..4 {
                            fe[a] += w * fv * sh[a];
                        }
                    }
                }
                for (b, &(bi, bj)) in corners.iter().enumerate() {
                    let db = dof[node(bi, bj)];
                    if db < 0 {
                        continue;
                    }
                    rhs[db as usize] += fe[b];
                    for (a, &(ai, aj)) in corners.iter().enumerate() {
                        let da = dof[node(ai, aj)];
                        if da >= 0 {
                            trip.push(db as usize, da as usize, ke[b][a]);
                        } else {
                            rhs[db as usize] -= ke[b][a] * bval(xs[ai], ys[aj]);
                        }
                    }
                }
            }
        }
        let a = compress(&trip).unwrap();
        let sol = solve_linear(&a, &rhs, &SolveOptions::default()).unwrap();
        let mut u = vec![0.0; (nx + 1) * (ny + 1)];
        for j in 0..=ny {
            for i in 0..=nx {
                let d = dof[node(i, j)];
                u[node(i, j)] = if d >= 0 {
                    sol[d as usize]
                } else {
                    bval(xs[i], ys[j])
                };
            }
        }
        TensorGalerkin {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            u,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let nx = self.xs.len() - 1;
        let ny = self.ys.len() - 1;
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(nx - 1),
            Err(i) => i.saturating_sub(1).min(nx - 1),
        };
        let j = match self.ys.binary_search_by(|v| v.partial_cmp(&y).unwrap()) {
            Ok(j) => j.min(ny - 1),
            Err(j) => j.saturating_sub(1).min(ny - 1),
        };
        let tx = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        let ty = (y - self.ys[j]) / (self.ys[j + 1] - self.ys[j]);
        let n = |i: usize, j: usize| self.u[j * (nx + 1) + i];
        n(i, j) * (1.0 - tx) * (1.0 - ty)
            + n(i + 1, j) * tx * (1.0 - ty)
            + n(i + 1, j + 1) * tx * ty
            + n(i, j + 1) * (1.0 - tx) * ty
    }
}

/// Uniform node coordinates.
pub fn uniform_nodes(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Shishkin-type nodes on [0, len]: half the intervals in a layer of the
/// given width at the `at_zero` end (or both ends if `both`).
pub fn shishkin_nodes(n: usize, len: f64, width: f64, at_zero: bool, both: bool) -> Vec<f64> {
    let tau = (2.5 * width).min(len / 4.0);
    let mut xs = Vec::new();
    if both {
        let n4 = n / 4;
        let nmid = n - 2 * n4;
        for i in 0..n4 {
            xs.push(tau * i as f64 / n4 as f64);
        }
        for i in 0..nmid {
            xs.push(tau + (len - 2.0 * tau) * i as f64 / nmid as f64);
        }
        for i in 0..=n4 {
            xs.push(len - tau + tau * i as f64 / n4 as f64);
        }
    } else {
        let nl = n / 2;
        let nr = n - nl;
        if at_zero {
            for i in 0..nl {
                xs.push(tau * i as f64 / nl as f64);
            }
            for i in 0..=nr {
                xs.push(tau + (len - tau) * i as f64 / nr as f64);
            }
        } else {
            for i in 0..nl {
                xs.push((len - tau) * i as f64 / nl as f64);
            }
            for i in 0..=nr {
                xs.push(len - tau + tau * i as f64 / nr as f64);
            }
        }
    }
    xs
}
