//! Exact integral tables for nested discrete functions.
//!
//! A bubble at one level is a discrete solution one zoom level down: Q1 nodal
//! values plus its own bubble coefficients. Integrals of products of such
//! functions over a cell are therefore exact algebraic contractions of their
//! coefficient vectors against the tables of the level below. The recursion
//! bottoms out at plain Q1 cells.

use super::refsolve::LevelSolution;
use crate::quadrature::gauss_on_interval;
use std::sync::Arc;

/// Bubble class of an entity; `Nodal(k)` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum ClassId {
    Nodal(u8),
    Rfbe,
}

/// Which edge of a cell a patch entity hangs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Side {
    L,
    R,
    B,
    T,
}

impl Side {
    pub(crate) const ALL: [Side; 4] = [Side::L, Side::R, Side::B, Side::T];

    /// Offset of the cell within the patch grid, in units of whole cells.
    pub(crate) fn patch_offset(&self) -> (usize, usize) {
        match self {
            Side::L => (1, 0),
            Side::R => (0, 0),
            Side::B => (0, 1),
            Side::T => (0, 0),
        }
    }
}

/// One basis function restricted to a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Entity {
    /// Cell corner k in 0..4, counterclockwise from the lower-left.
    Q1(u8),
    Elem(ClassId),
    Patch(Side, ClassId),
}

pub(crate) fn q1_value_grad(k: u8, x: f64, y: f64) -> (f64, f64, f64) {
    match k {
        0 => ((1.0 - x) * (1.0 - y), -(1.0 - y), -(1.0 - x)),
        1 => (x * (1.0 - y), 1.0 - y, -x),
        2 => (x * y, y, x),
        3 => ((1.0 - x) * y, -y, 1.0 - x),
        _ => unreachable!(),
    }
}

/// Integral tables of a set of entities over the unit cell, in cell-local
/// coordinates:
/// `k = int grad(u).grad(v)`, `c = int (a.grad u) v`,
/// `cc = int (a.grad u)(a.grad v)`, `mass = int u v`. The optional weighted
/// variants `kw`, `cw` carry the factor `exp(-h_cell * a.xi)` inside.
pub(crate) struct CellTables {
    pub entities: Vec<Entity>,
    pub ne: usize,
    pub k: Vec<f64>,
    pub c: Vec<f64>,
    pub cc: Vec<f64>,
    pub mass: Vec<f64>,
    pub kw: Option<Vec<f64>>,
    pub cw: Option<Vec<f64>>,
    /// Max recursion depth of the entities behind this table.
    pub depth: usize,
}

impl CellTables {
    #[inline]
    pub(crate) fn idx(&self, u: usize, v: usize) -> usize {
        u * self.ne + v
    }

    pub(crate) fn entity_index(&self, e: Entity) -> Option<usize> {
        self.entities.iter().position(|&x| x == e)
    }
}

/// Q1-only tables of the unit cell (terminal level of the nesting).
pub(crate) fn plain_q1_tables(wind: [f64; 2], q: usize) -> CellTables {
    let entities: Vec<Entity> = (0..4).map(Entity::Q1).collect();
    let ne = 4;
    let (xs, ws) = gauss_on_interval(q, 0.0, 1.0);
    let mut k = vec![0.0; 16];
    let mut c = vec![0.0; 16];
    let mut cc = vec![0.0; 16];
    let mut mass = vec![0.0; 16];
    for (j, &y) in xs.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let w = ws[i] * ws[j];
            let vg: Vec<(f64, f64, f64)> = (0..4).map(|k| q1_value_grad(k, x, y)).collect();
            for u in 0..4 {
                for v in 0..4 {
                    let t = u * 4 + v;
                    let (vu, gxu, gyu) = vg[u];
                    let (vv, gxv, gyv) = vg[v];
                    let au = wind[0] * gxu + wind[1] * gyu;
                    let av = wind[0] * gxv + wind[1] * gyv;
                    k[t] += w * (gxu * gxv + gyu * gyv);
                    c[t] += w * au * vv;
                    cc[t] += w * au * av;
                    mass[t] += w * vu * vv;
                }
            }
        }
    }
    CellTables {
        entities,
        ne,
        k,
        c,
        cc,
        mass,
        kw: None,
        cw: None,
        depth: 0,
    }
}

/// How a table entity is represented on the cell.
pub(crate) enum EntitySource {
    /// Bilinear corner function of the cell itself.
    ParentQ1(u8),
    /// A nested solution whose grid is offset by whole cells against the
    /// current cell (patches hang over by one cell).
    Sol {
        sol: Arc<LevelSolution>,
        ox: usize,
        oy: usize,
    },
}

pub(crate) struct EntitySpec {
    pub label: Entity,
    pub source: EntitySource,
}

/// Pair a set of nested entities into exact cell tables.
///
/// `sub` holds the tables of the level the solutions are built on; `m` is the
/// solutions' cells per unit. `weight` is `Some(h_cell)` for the additional
/// weighted variants, evaluated per fine cell at its center.
pub(crate) fn pair_tables(
    specs: Vec<EntitySpec>,
    sub: &CellTables,
    m: usize,
    wind: [f64; 2],
    weight: Option<f64>,
) -> CellTables {
    let ne = specs.len();
    let nsub = sub.ne;
    let delta = 1.0 / m as f64;
    let mut k = vec![0.0; ne * ne];
    let mut c = vec![0.0; ne * ne];
    let mut cc = vec![0.0; ne * ne];
    let mut mass = vec![0.0; ne * ne];
    let mut kw = weight.map(|_| vec![0.0; ne * ne]);
    let mut cw = weight.map(|_| vec![0.0; ne * ne]);

    let mut wvec = vec![vec![0.0f64; nsub]; ne];
    let mut tk = vec![vec![0.0f64; nsub]; ne];
    let mut tc = vec![vec![0.0f64; nsub]; ne];
    let mut tcc = vec![vec![0.0f64; nsub]; ne];
    let mut tm = vec![vec![0.0f64; nsub]; ne];

    for fy in 0..m {
        for fx in 0..m {
            for (e, spec) in specs.iter().enumerate() {
                let w = &mut wvec[e];
                w.iter_mut().for_each(|v| *v = 0.0);
                match &spec.source {
                    EntitySource::ParentQ1(kk) => {
                        // bilinear on the cell restricted to the fine cell is
                        // bilinear again: corner values of the parent function
                        let corners = [
                            (fx as f64 * delta, fy as f64 * delta),
                            ((fx + 1) as f64 * delta, fy as f64 * delta),
                            ((fx + 1) as f64 * delta, (fy + 1) as f64 * delta),
                            (fx as f64 * delta, (fy + 1) as f64 * delta),
                        ];
                        for (kc, &(x, y)) in corners.iter().enumerate() {
                            let sq = sub
                                .entity_index(Entity::Q1(kc as u8))
                                .expect("sub tables carry Q1");
                            w[sq] += q1_value_grad(*kk, x, y).0;
                        }
                    }
                    EntitySource::Sol { sol, ox, oy } => {
                        sol.weights_on_cell(fx + ox * m, fy + oy * m, 1.0, sub, w);
                    }
                }
            }
            // tmp = T . w_v for each table
            for v in 0..ne {
                let wv = &wvec[v];
                let (ttk, ttc, ttcc, ttm) = (&mut tk[v], &mut tc[v], &mut tcc[v], &mut tm[v]);
                for gu in 0..nsub {
                    let (mut ak, mut ac, mut acc, mut am) = (0.0, 0.0, 0.0, 0.0);
                    let row = gu * nsub;
                    for gv in 0..nsub {
                        let x = wv[gv];
                        if x != 0.0 {
                            ak += sub.k[row + gv] * x;
                            ac += sub.c[row + gv] * x;
                            acc += sub.cc[row + gv] * x;
                            am += sub.mass[row + gv] * x;
                        }
                    }
                    ttk[gu] = ak;
                    ttc[gu] = ac;
                    ttcc[gu] = acc;
                    ttm[gu] = am;
                }
            }
            let wgt = weight.map(|h| {
                let cxm = (fx as f64 + 0.5) * delta;
                let cym = (fy as f64 + 0.5) * delta;
                (-h * (wind[0] * cxm + wind[1] * cym)).exp()
            });
            for u in 0..ne {
                let wu = &wvec[u];
                for v in 0..ne {
                    let (mut ak, mut ac, mut acc, mut am) = (0.0, 0.0, 0.0, 0.0);
                    for gu in 0..nsub {
                        let x = wu[gu];
                        if x != 0.0 {
                            ak += x * tk[v][gu];
                            ac += x * tc[v][gu];
                            acc += x * tcc[v][gu];
                            am += x * tm[v][gu];
                        }
                    }
                    let t = u * ne + v;
                    k[t] += ak;
                    c[t] += delta * ac;
                    cc[t] += acc;
                    mass[t] += delta * delta * am;
                    if let Some(wg) = wgt {
                        kw.as_mut().unwrap()[t] += wg * ak;
                        cw.as_mut().unwrap()[t] += wg * delta * ac;
                    }
                }
            }
        }
    }

    let depth = specs
        .iter()
        .map(|s| match &s.source {
            EntitySource::ParentQ1(_) => 0,
            EntitySource::Sol { sol, .. } => sol.depth,
        })
        .max()
        .unwrap_or(0);
    let labels = specs.iter().map(|s| s.label).collect();
    CellTables {
        entities: labels,
        ne,
        k,
        c,
        cc,
        mass,
        kw,
        cw,
        depth,
    }
}
