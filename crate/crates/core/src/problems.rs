//! The two benchmark problems: the channel flow with constant forcing and the
//! manufactured problem with a prescribed layered exact solution.
//!
//! Both use the leftward wind `a = (-1, 0)`, so the strong operator is
//! `-eps*lap(u) - u_x`. The manufactured solution is `u(x,y) = psi(x) psi(y^2)`
//! built from the one-dimensional layer profile `psi` with
//! `-eps psi'' - psi' = 1`, `psi(0) = psi(1) = 0`.

/// One-dimensional layer profile and its derivatives, underflow-safe: the
/// exponentials flush to zero for large negative arguments.
#[derive(Debug, Clone, Copy)]
pub struct Psi {
    pub eps: f64,
    /// 1 - exp(-1/eps), the normalizing denominator.
    denom: f64,
}

impl Psi {
    pub fn new(eps: f64) -> Self {
        Psi {
            eps,
            denom: 1.0 - (-1.0 / eps).exp(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        1.0 - t - ((-t / self.eps).exp() - (-1.0 / self.eps).exp()) / self.denom
    }

    pub fn deriv(&self, t: f64) -> f64 {
        -1.0 + (-t / self.eps).exp() / (self.eps * self.denom)
    }

    pub fn second_deriv(&self, t: f64) -> f64 {
        -(-t / self.eps).exp() / (self.eps * self.eps * self.denom)
    }
}

/// Forcing of the channel problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelForcing {
    One,
    Zero,
}

/// Benchmark problem selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    Channel { forcing: ChannelForcing },
    Manufactured { eps: f64 },
}

impl Problem {
    pub fn manufactured(eps: f64) -> Self {
        Problem::Manufactured { eps }
    }

    pub fn channel() -> Self {
        Problem::Channel {
            forcing: ChannelForcing::One,
        }
    }

    /// Right-hand side f(x, y).
    pub fn forcing(&self, x: f64, y: f64) -> f64 {
        match self {
            Problem::Channel { forcing: ChannelForcing::One } => 1.0,
            Problem::Channel { forcing: ChannelForcing::Zero } => 0.0,
            Problem::Manufactured { eps } => manufactured_forcing(*eps, x, y),
        }
    }

    /// Characteristic width of the forcing layer along y at the bottom wall,
    /// if any; used to grade quadrature in wall-touching elements.
    pub fn forcing_layer_width_y(&self) -> Option<f64> {
        match self {
            Problem::Manufactured { eps } => Some(eps.sqrt()),
            Problem::Channel { .. } => None,
        }
    }

    /// Same along x at the outflow wall x = 0.
    pub fn forcing_layer_width_x(&self) -> Option<f64> {
        match self {
            Problem::Manufactured { eps } => Some(*eps),
            Problem::Channel { .. } => None,
        }
    }
}

/// Exact manufactured solution u(x, y) = psi(x) psi(y^2).
pub fn manufactured_value(eps: f64, x: f64, y: f64) -> f64 {
    let psi = Psi::new(eps);
    psi.value(x) * psi.value(y * y)
}

/// Gradient of the manufactured solution.
pub fn manufactured_gradient(eps: f64, x: f64, y: f64) -> (f64, f64) {
    let psi = Psi::new(eps);
    (
        psi.deriv(x) * psi.value(y * y),
        psi.value(x) * 2.0 * y * psi.deriv(y * y),
    )
}

/// Forcing consistent with the manufactured solution:
/// f = psi(y^2) - eps * psi(x) * (2 psi'(y^2) + 4 y^2 psi''(y^2)).
///
/// The eps-weighted derivative terms are expanded so no intermediate larger
/// than O(1/eps * exp(-t/eps)) is formed; t*exp(-t) stays bounded.
pub fn manufactured_forcing(eps: f64, x: f64, y: f64) -> f64 {
    let psi = Psi::new(eps);
    let denom = 1.0 - (-1.0 / eps).exp();
    let t = y * y / eps;
    let e = (-t).exp();
    let px = psi.value(x);
    // eps * 2 psi'(y^2) = -2 eps + 2 exp(-y^2/eps)/denom
    // eps * 4 y^2 psi''(y^2) = -4 t exp(-t)/denom
    psi.value(y * y) - px * (-2.0 * eps + 2.0 * e / denom - 4.0 * t * e / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_satisfies_its_ode_and_bcs() {
        for eps in [1e-2, 1e-4, 1e-6] {
            let psi = Psi::new(eps);
            assert!(psi.value(0.0).abs() < 1e-14);
            assert!(psi.value(1.0).abs() < 1e-14);
            for t in [0.0, eps, 5.0 * eps, 0.3, 0.9] {
                let r = -eps * psi.second_deriv(t) - psi.deriv(t);
                assert!((r - 1.0).abs() < 1e-9, "eps={eps} t={t}: {r}");
            }
        }
    }

    #[test]
    fn forcing_matches_operator_by_finite_differences() {
        // -eps lap(u) - u_x == f, checked at moderate eps where the FD step
        // resolves the layers
        for eps in [1e-2, 1e-3] {
            let d = 1e-5;
            for &(x, y) in &[(0.3, 0.4), (0.7, 0.12), (0.5, 0.8), (0.05, 0.3), (0.4, 0.04)] {
                let u = |x: f64, y: f64| manufactured_value(eps, x, y);
                let lap = (u(x + d, y) + u(x - d, y) + u(x, y + d) + u(x, y - d)
                    - 4.0 * u(x, y))
                    / (d * d);
                let ux = (u(x + d, y) - u(x - d, y)) / (2.0 * d);
                let f_fd = -eps * lap - ux;
                let f = manufactured_forcing(eps, x, y);
                let scale = f.abs().max(1.0);
                assert!(
                    (f_fd - f).abs() / scale < 2e-4,
                    "eps={eps} ({x},{y}): fd={f_fd} analytic={f}"
                );
            }
        }
    }

    #[test]
    fn gradient_matches_value_by_finite_differences() {
        let eps = 1e-3;
        let d = 1e-5;
        for &(x, y) in &[(0.3, 0.4), (0.6, 0.25), (0.2, 0.7)] {
            let u = |x: f64, y: f64| manufactured_value(eps, x, y);
            let gx = (u(x + d, y) - u(x - d, y)) / (2.0 * d);
            let gy = (u(x, y + d) - u(x, y - d)) / (2.0 * d);
            let (ax, ay) = manufactured_gradient(eps, x, y);
            assert!((gx - ax).abs() < 1e-4 * ax.abs().max(1.0));
            assert!((gy - ay).abs() < 1e-4 * ay.abs().max(1.0));
        }
    }

    #[test]
    fn manufactured_solution_vanishes_on_boundary() {
        let eps = 1e-6;
        for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!(manufactured_value(eps, 0.0, s).abs() < 1e-13);
            assert!(manufactured_value(eps, 1.0, s).abs() < 1e-13);
            assert!(manufactured_value(eps, s, 0.0).abs() < 1e-13);
            assert!(manufactured_value(eps, s, 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn tiny_eps_underflow_is_safe() {
        let eps = 1e-6;
        for &(x, y) in &[(0.0, 0.0), (1.0, 1.0), (0.5, 0.0), (0.0, 0.5), (1e-7, 1e-4)] {
            assert!(manufactured_forcing(eps, x, y).is_finite());
            assert!(manufactured_value(eps, x, y).is_finite());
            let (gx, gy) = manufactured_gradient(eps, x, y);
            assert!(gx.is_finite() && gy.is_finite());
        }
        // deep in the interior the forcing is close to 1 - y^2
        let f = manufactured_forcing(eps, 0.5, 0.5);
        assert!((f - (1.0 - 0.25)).abs() < 1e-3);
    }
}
