//! Edge bubbles with analytic one-dimensional traces: on each element of the
//! patch the homogeneous equation is solved with the reduced 1D trace
//! prescribed at the shared-edge nodes and zero elsewhere.

use super::refsolve::{DirichletEdge, LevelOp, LevelSolution};
use super::tables::Side;
use super::{field_key, Aspect, BubbleCache, BubbleError, BubbleField, RhsKey};
use std::sync::Arc;

/// Analytic solution of the 1D two-point problem
/// `-eps_hat * psi'' + beta * psi' = r` on `(0, len)`, `psi(0) = psi(len) = 0`,
/// with the boundary-layer exponentials evaluated in underflow-safe form.
pub fn psi_1d(t: f64, eps_hat: f64, beta: f64, r: f64, len: f64) -> f64 {
    if beta == 0.0 {
        return r * t * (len - t) / (2.0 * eps_hat);
    }
    let u = beta / eps_hat;
    // (exp(u t) - 1) / (exp(u len) - 1), stable for both signs of u
    let ratio = if u < 0.0 {
        (u * t).exp_m1() / (u * len).exp_m1()
    } else {
        (u * (t - len)).exp() * (-u * t).exp_m1() / (-u * len).exp_m1()
    };
    (r / beta) * (t - len * ratio)
}

/// One half of an edge bubble: the element solve with the trace on `shared`.
pub(crate) fn rfbe_half(
    cache: &BubbleCache,
    eps_hat: f64,
    wind: [f64; 2],
    zoom: usize,
    shared: Side,
) -> Result<Arc<LevelSolution>, BubbleError> {
    let class = 8 + shared as u64;
    if let Some(s) = cache.get_solution(Aspect::Element, eps_hat, wind, zoom, class) {
        return Ok(s);
    }
    let beta = match shared {
        Side::L | Side::R => wind[1],
        Side::B | Side::T => wind[0],
    };
    let op = LevelOp::get(cache, Aspect::Element, eps_hat, wind, zoom)?;
    let values: Vec<f64> = (0..=zoom)
        .map(|i| psi_1d(i as f64 / zoom as f64, eps_hat, beta, 1.0, 1.0))
        .collect();
    let dir = DirichletEdge {
        side: shared,
        values,
    };
    let sol = op.solve_load(&|_, _| 0.0, Some(&dir))?;
    Ok(cache.put_solution(Aspect::Element, eps_hat, wind, zoom, class, sol))
}

/// The two halves of an edge bubble, ordered (near origin, far from origin).
pub(crate) fn rfbe_halves(
    cache: &BubbleCache,
    aspect: Aspect,
    eps_hat: f64,
    wind: [f64; 2],
    zoom: usize,
) -> Result<(Arc<LevelSolution>, Arc<LevelSolution>), BubbleError> {
    match aspect {
        Aspect::HPatch => Ok((
            rfbe_half(cache, eps_hat, wind, zoom, Side::R)?,
            rfbe_half(cache, eps_hat, wind, zoom, Side::L)?,
        )),
        Aspect::VPatch => Ok((
            rfbe_half(cache, eps_hat, wind, zoom, Side::T)?,
            rfbe_half(cache, eps_hat, wind, zoom, Side::B)?,
        )),
        Aspect::Element => Err(BubbleError::BadRhs(
            "an edge bubble needs a two-element patch".into(),
        )),
    }
}

/// Patch bubble in the style of the enhanced RFB method: on the shared edge
/// the analytic solution of the reduced 1D problem with unit load, inside
/// each element the homogeneous equation, solved with the same recursive
/// machinery as the other bubbles.
pub fn rfbe_bubble(
    aspect: Aspect,
    eps_hat: f64,
    wind: [f64; 2],
    zoom: usize,
    cache: &BubbleCache,
) -> Result<Arc<BubbleField>, BubbleError> {
    if zoom < 4 {
        return Err(BubbleError::BadZoom(zoom));
    }
    let key = field_key(aspect, eps_hat, RhsKey::RfbeTrace, wind, zoom);
    if let Some(f) = cache.get_field(&key) {
        return Ok(f);
    }
    let (near, far) = rfbe_halves(cache, aspect, eps_hat, wind, zoom)?;

    let m = zoom;
    let (nx, ny) = (aspect.cells().0 * m, aspect.cells().1 * m);
    let mut vals = vec![0.0; (nx + 1) * (ny + 1)];
    match aspect {
        Aspect::HPatch => {
            for j in 0..=ny {
                for i in 0..=m {
                    vals[j * (nx + 1) + i] = near.nodal[j * (m + 1) + i];
                }
                for i in m..=nx {
                    vals[j * (nx + 1) + i] = far.nodal[j * (m + 1) + (i - m)];
                }
            }
        }
        Aspect::VPatch => {
            for j in 0..=m {
                for i in 0..=nx {
                    vals[j * (nx + 1) + i] = near.nodal[j * (m + 1) + i];
                }
            }
            for j in m..=ny {
                for i in 0..=nx {
                    vals[j * (nx + 1) + i] = far.nodal[(j - m) * (m + 1) + i];
                }
            }
        }
        Aspect::Element => unreachable!(),
    }

    let field = BubbleField {
        aspect,
        m,
        nx,
        ny,
        vals,
        depth: near.depth.max(far.depth),
        eps_hat,
    };
    Ok(cache.put_field(key, field))
}
