//! Reference-domain solver behind every bubble: Q1 on an M-per-cell sub-mesh,
//! enriched while the local diffusion does not resolve, plain Galerkin once it
//! does. Each cell carries the four nodal element bubbles; each interior edge
//! carries the patch-bubble span with redundant directions removed: when the
//! wind has no component across an edge, the data combinations antisymmetric
//! about it reduce to element bubbles by reflection, so only the symmetric
//! pair remains.
//!
//! Operators are assembled from the exact nested tables of `tables`, so the
//! energy of sub-cell layers enters the coupling integrals in full. The space
//! does not depend on the right-hand side, which keeps every solve exactly
//! linear in the load and the cache sound under data combination.

use super::tables::{
    pair_tables, plain_q1_tables, q1_value_grad, CellTables, ClassId, Entity, EntitySource,
    EntitySpec, Side,
};
use super::{depth_bound, Aspect, BubbleCache, BubbleError, RhsClass, REC_QUAD};
use crate::quadrature::gauss_on_interval;
use crate::sparse::{compress, CsrMatrix, LuFactors, SolveOptions, Triplets};
use std::sync::Arc;

impl Side {
    pub(crate) fn aspect(&self) -> Aspect {
        match self {
            Side::L | Side::R => Aspect::HPatch,
            Side::B | Side::T => Aspect::VPatch,
        }
    }
}

/// Patch-bubble directions of an interior edge, as weights over the four
/// nodal patch classes: constant data and tangential-linear data.
///
/// The remaining two bilinear data combinations degenerate onto the element
/// bubbles: data antisymmetric about the shared edge does so exactly when the
/// wind has no tangential component (reflection symmetry), and data with
/// vanishing upwind mean does so in the transport limit. Keeping them makes
/// the enriched system exactly or asymptotically singular.
pub(crate) fn edge_directions(vertical: bool, _wind: [f64; 2]) -> &'static [[f64; 4]] {
    // patch corners are ordered counterclockwise from the origin corner
    const DIRS_V: [[f64; 4]; 2] = [[1.0, 1.0, 1.0, 1.0], [0.0, 0.0, 1.0, 1.0]];
    const DIRS_H: [[f64; 4]; 2] = [[1.0, 1.0, 1.0, 1.0], [0.0, 1.0, 1.0, 0.0]];
    if vertical {
        &DIRS_V
    } else {
        &DIRS_H
    }
}

/// Number of interior edges of an nx x ny cell grid (vertical first).
fn edge_counts(nx: usize, ny: usize) -> (usize, usize) {
    ((nx - 1) * ny, nx * (ny - 1))
}

/// Factorized discrete operator of one reference sub-problem.
pub(crate) struct LevelOp {
    pub aspect: Aspect,
    pub eps_hat: f64,
    pub wind: [f64; 2],
    pub m: usize,
    pub nx: usize,
    pub ny: usize,
    pub enriched: bool,
    pub depth: usize,
    pub n_dofs: usize,
    pub n_int: usize,
    node_dof: Vec<i64>,
    /// First patch DOF id per interior edge (vertical edges first); each edge
    /// carries `edge_directions(...)` consecutive DOFs.
    edge_dof: Vec<usize>,
    /// Tables of the entities living on this operator's cells.
    pub tables: Arc<CellTables>,
    /// Solutions backing the cell entities (None on the plain branch).
    pub ents: Option<Arc<EntitySols>>,
    matrix: CsrMatrix,
    lu: LuFactors,
    /// Entity indices into `tables`: Q1, element classes, patch classes.
    q1_ent: [usize; 4],
    elem_ent: [usize; 4],
    patch_ent: [[usize; 4]; 4],
}

/// The twelve nodal solutions one zoom level down.
pub(crate) struct EntitySols {
    pub elem: [Arc<LevelSolution>; 4],
    pub hpatch: [Arc<LevelSolution>; 4],
    pub vpatch: [Arc<LevelSolution>; 4],
}

impl EntitySols {
    pub(crate) fn by_aspect(&self, aspect: Aspect, k: usize) -> &Arc<LevelSolution> {
        match aspect {
            Aspect::Element => &self.elem[k],
            Aspect::HPatch => &self.hpatch[k],
            Aspect::VPatch => &self.vpatch[k],
        }
    }
}

/// A discrete sub-problem solution: nodal values on the full grid plus the
/// bubble coefficients, tied to the operator that produced it.
pub(crate) struct LevelSolution {
    pub op: Arc<LevelOp>,
    /// All grid nodes, boundary included.
    pub nodal: Vec<f64>,
    /// Bubble coefficients, indexed by dof - n_int.
    pub bub: Vec<f64>,
    pub depth: usize,
}

impl LevelSolution {
    /// Accumulate this solution's entity weights on its cell (cx, cy) into a
    /// dense vector over `sub` entities.
    pub(crate) fn weights_on_cell(
        &self,
        cx: usize,
        cy: usize,
        scale: f64,
        sub: &CellTables,
        out: &mut [f64],
    ) {
        let op = &self.op;
        let _ = sub;
        let corners = [(cx, cy), (cx + 1, cy), (cx + 1, cy + 1), (cx, cy + 1)];
        for (k, (ix, iy)) in corners.iter().enumerate() {
            out[op.q1_ent[k]] += scale * self.nodal[iy * (op.nx + 1) + ix];
        }
        if !op.enriched {
            return;
        }
        let base = 4 * (cy * op.nx + cx);
        for k in 0..4 {
            out[op.elem_ent[k]] += scale * self.bub[base + k];
        }
        for (s, interior, vertical, ex, ey) in op.cell_sides(cx, cy) {
            if !interior {
                continue;
            }
            let base = op.edge_dof[op.edge_index(vertical, ex, ey)];
            let dirs = edge_directions(vertical, op.wind);
            let si = s as usize;
            for (d, w) in dirs.iter().enumerate() {
                let coeff = scale * self.bub[base + d - op.n_int];
                for k in 0..4 {
                    if w[k] != 0.0 {
                        out[op.patch_ent[si][k]] += coeff * w[k];
                    }
                }
            }
        }
    }
}

/// Interior-edge patch tables for the enriched branch: Q1 corners, nodal
/// element classes, nodal patch classes per side.
fn enriched_entity_specs(ents: &EntitySols) -> Vec<EntitySpec> {
    let mut specs: Vec<EntitySpec> = (0..4u8)
        .map(|k| EntitySpec {
            label: Entity::Q1(k),
            source: EntitySource::ParentQ1(k),
        })
        .collect();
    for k in 0..4usize {
        specs.push(EntitySpec {
            label: Entity::Elem(ClassId::Nodal(k as u8)),
            source: EntitySource::Sol {
                sol: ents.elem[k].clone(),
                ox: 0,
                oy: 0,
            },
        });
    }
    for s in Side::ALL {
        let (ox, oy) = s.patch_offset();
        for k in 0..4usize {
            specs.push(EntitySpec {
                label: Entity::Patch(s, ClassId::Nodal(k as u8)),
                source: EntitySource::Sol {
                    sol: ents.by_aspect(s.aspect(), k).clone(),
                    ox,
                    oy,
                },
            });
        }
    }
    specs
}

/// Tables for entities living at local diffusion `eps_cell`, with the entity
/// solutions behind them. Cached per (eps_cell, wind, zoom).
pub(crate) fn cell_tables(
    cache: &BubbleCache,
    eps_cell: f64,
    wind: [f64; 2],
    zoom: usize,
) -> Result<(Arc<CellTables>, Arc<EntitySols>), BubbleError> {
    if let Some(hit) = cache.get_tables(eps_cell, wind, zoom) {
        return Ok(hit);
    }
    let mut build = |k: usize, aspect: Aspect| -> Result<Arc<LevelSolution>, BubbleError> {
        nodal_solution(cache, aspect, eps_cell, wind, zoom, k as u8)
    };
    let ents = Arc::new(EntitySols {
        elem: [
            build(0, Aspect::Element)?,
            build(1, Aspect::Element)?,
            build(2, Aspect::Element)?,
            build(3, Aspect::Element)?,
        ],
        hpatch: [
            build(0, Aspect::HPatch)?,
            build(1, Aspect::HPatch)?,
            build(2, Aspect::HPatch)?,
            build(3, Aspect::HPatch)?,
        ],
        vpatch: [
            build(0, Aspect::VPatch)?,
            build(1, Aspect::VPatch)?,
            build(2, Aspect::VPatch)?,
            build(3, Aspect::VPatch)?,
        ],
    });
    let sub = ents.elem[0].op.tables.clone();
    let tables = Arc::new(pair_tables(
        enriched_entity_specs(&ents),
        &sub,
        zoom,
        wind,
        None,
    ));
    Ok(cache.put_tables(eps_cell, wind, zoom, tables, ents))
}

/// Solve for one nodal class (0-based) at local diffusion `eps_hat`.
fn nodal_solution(
    cache: &BubbleCache,
    aspect: Aspect,
    eps_hat: f64,
    wind: [f64; 2],
    zoom: usize,
    k: u8,
) -> Result<Arc<LevelSolution>, BubbleError> {
    if let Some(s) = cache.get_solution(aspect, eps_hat, wind, zoom, k as u64) {
        return Ok(s);
    }
    let rhs = RhsClass::NodalQ1(k + 1);
    let op = LevelOp::get(cache, aspect, eps_hat, wind, zoom)?;
    let sol = op.solve_load(&|x, y| rhs.eval(aspect, x, y).unwrap_or(0.0), None)?;
    Ok(cache.put_solution(aspect, eps_hat, wind, zoom, k as u64, sol))
}

pub(crate) fn class_solution(
    cache: &BubbleCache,
    aspect: Aspect,
    eps_hat: f64,
    wind: [f64; 2],
    zoom: usize,
    k: u8,
) -> Result<Arc<LevelSolution>, BubbleError> {
    nodal_solution(cache, aspect, eps_hat, wind, zoom, k)
}

impl LevelOp {
    #[inline]
    pub(crate) fn edge_index(&self, vertical: bool, ex: usize, ey: usize) -> usize {
        if vertical {
            (ex - 1) * self.ny + ey
        } else {
            (self.nx - 1) * self.ny + (ey - 1) * self.nx + ex
        }
    }

    /// The four sides of a cell: (side, is_interior, vertical, ex, ey).
    #[inline]
    pub(crate) fn cell_sides(&self, cx: usize, cy: usize) -> [(Side, bool, bool, usize, usize); 4] {
        [
            (Side::L, cx >= 1, true, cx, cy),
            (Side::R, cx + 1 <= self.nx - 1, true, cx + 1, cy),
            (Side::B, cy >= 1, false, cx, cy),
            (Side::T, cy + 1 <= self.ny - 1, false, cx, cy + 1),
        ]
    }

    /// Local DOFs of a cell as (dof, entity, weight) triples.
    fn cell_dofs(&self, cx: usize, cy: usize, out: &mut Vec<(usize, usize, f64)>) {
        out.clear();
        let corners = [(cx, cy), (cx + 1, cy), (cx + 1, cy + 1), (cx, cy + 1)];
        for (k, (ix, iy)) in corners.iter().enumerate() {
            let d = self.node_dof[iy * (self.nx + 1) + ix];
            if d >= 0 {
                out.push((d as usize, self.q1_ent[k], 1.0));
            }
        }
        if !self.enriched {
            return;
        }
        let base = self.n_int + 4 * (cy * self.nx + cx);
        for k in 0..4 {
            out.push((base + k, self.elem_ent[k], 1.0));
        }
        for (s, interior, vertical, ex, ey) in self.cell_sides(cx, cy) {
            if !interior {
                continue;
            }
            let base = self.edge_dof[self.edge_index(vertical, ex, ey)];
            let dirs = edge_directions(vertical, self.wind);
            let si = s as usize;
            for (d, w) in dirs.iter().enumerate() {
                for k in 0..4 {
                    if w[k] != 0.0 {
                        out.push((base + d, self.patch_ent[si][k], w[k]));
                    }
                }
            }
        }
    }

    /// Build (or fetch) the operator of a reference sub-problem.
    pub(crate) fn get(
        cache: &BubbleCache,
        aspect: Aspect,
        eps_hat: f64,
        wind: [f64; 2],
        zoom: usize,
    ) -> Result<Arc<LevelOp>, BubbleError> {
        let enriched = eps_hat < 1.0;
        if let Some(op) = cache.get_op(aspect, eps_hat, wind, zoom) {
            return Ok(op);
        }
        let (wc, hc) = aspect.cells();
        let (nx, ny) = (wc * zoom, hc * zoom);
        let delta = 1.0 / zoom as f64;

        let (tables, ents) = if enriched {
            let (t, e) = cell_tables(cache, eps_hat * zoom as f64, wind, zoom)?;
            (t, Some(e))
        } else {
            (
                cache.get_or_build_plain(wind, || Arc::new(plain_q1_tables(wind, REC_QUAD))),
                None,
            )
        };
        let depth = if enriched { tables.depth + 1 } else { 0 };
        let bound = depth_bound(eps_hat, zoom);
        if depth > bound {
            return Err(BubbleError::DepthExceeded {
                depth,
                bound,
                eps_hat,
            });
        }

        let ent_index = |e: Entity| tables.entity_index(e).unwrap_or(usize::MAX);
        let q1_ent = [0u8, 1, 2, 3].map(|k| ent_index(Entity::Q1(k)));
        let elem_ent = [0u8, 1, 2, 3].map(|k| ent_index(Entity::Elem(ClassId::Nodal(k))));
        let patch_ent = Side::ALL
            .map(|s| [0u8, 1, 2, 3].map(|k| ent_index(Entity::Patch(s, ClassId::Nodal(k)))));

        let mut node_dof = vec![-1i64; (nx + 1) * (ny + 1)];
        let mut next = 0i64;
        for j in 1..ny {
            for i in 1..nx {
                node_dof[j * (nx + 1) + i] = next;
                next += 1;
            }
        }
        let n_int = next as usize;
        let mut n_dofs = n_int;
        let mut edge_dof = Vec::new();
        if enriched {
            n_dofs += 4 * nx * ny;
            let (nv, nh) = edge_counts(nx, ny);
            let ndv = edge_directions(true, wind).len();
            let ndh = edge_directions(false, wind).len();
            for e in 0..nv + nh {
                edge_dof.push(n_dofs + if e < nv { e * ndv } else { nv * ndv + (e - nv) * ndh });
            }
            // simpler: recompute bases directly
            edge_dof.clear();
            let mut next = n_dofs;
            for _ in 0..nv {
                edge_dof.push(next);
                next += ndv;
            }
            for _ in 0..nh {
                edge_dof.push(next);
                next += ndh;
            }
            n_dofs = next;
        }

        let mut op = LevelOp {
            aspect,
            eps_hat,
            wind,
            m: zoom,
            nx,
            ny,
            enriched,
            depth,
            n_dofs,
            n_int,
            node_dof,
            edge_dof,
            tables,
            ents,
            matrix: CsrMatrix {
                n_rows: 1,
                n_cols: 1,
                row_ptr: vec![0, 1],
                col_idx: vec![0],
                values: vec![1.0],
            },
            lu: LuFactors::factorize(
                &CsrMatrix {
                    n_rows: 1,
                    n_cols: 1,
                    row_ptr: vec![0, 1],
                    col_idx: vec![0],
                    values: vec![1.0],
                },
                &SolveOptions::default(),
            )?,
            q1_ent,
            elem_ent,
            patch_ent,
        };

        let mut trip = Triplets::with_capacity(n_dofs, n_dofs, nx * ny * 600);
        let mut locals: Vec<(usize, usize, f64)> = Vec::with_capacity(24);
        for cy in 0..ny {
            for cx in 0..nx {
                op.cell_dofs(cx, cy, &mut locals);
                for &(du, eu, wu) in &locals {
                    for &(dv, ev, wv) in &locals {
                        let t = op.tables.idx(eu, ev);
                        let val = wu * wv * (eps_hat * op.tables.k[t] + delta * op.tables.c[t]);
                        trip.push(dv, du, val);
                    }
                }
            }
        }
        let matrix = compress(&trip)?;
        let lu = LuFactors::factorize(&matrix, &SolveOptions::default())?;
        op.matrix = matrix;
        op.lu = lu;
        Ok(cache.put_op(aspect, eps_hat, wind, zoom, op))
    }

    /// Load vector of `g` against all DOFs, assembled one zoom level deep:
    /// Q1 parts pair `g` by Gauss quadrature on the fine grid, bubble parts
    /// contract the Q1-interpolated data of `g` on fine cells against the
    /// mass tables of the level below.
    pub(crate) fn load_vector(
        &self,
        g: &dyn Fn(f64, f64) -> f64,
        dirichlet: Option<&DirichletEdge>,
    ) -> Result<Vec<f64>, BubbleError> {
        let m = self.m;
        let delta = 1.0 / m as f64;
        let fine = delta / m as f64; // fine cell size in domain coordinates
        let mut rhs = vec![0.0; self.n_dofs];

        // mass tables one level below the entities, for the bubble legs
        let sub_mass: Option<Arc<CellTables>> = match &self.ents {
            Some(ents) => Some(ents.elem[0].op.tables.clone()),
            None => None,
        };

        let (gx, gw) = gauss_on_interval(REC_QUAD, 0.0, 1.0);

        let mut locals: Vec<(usize, usize, f64)> = Vec::with_capacity(24);
        // per level cell: fine-grid corner data and per-fine-cell Q1 loads
        let mut gq1 = vec![[0.0f64; 4]; m * m];
        let mut gcorn = vec![0.0f64; (m + 1) * (m + 1)];

        for cy in 0..self.ny {
            for cx in 0..self.nx {
                let ox = cx as f64 * delta;
                let oy = cy as f64 * delta;
                // fine corner data
                for j in 0..=m {
                    for i in 0..=m {
                        gcorn[j * (m + 1) + i] =
                            g(ox + fine * i as f64, oy + fine * j as f64);
                    }
                }
                // per-fine-cell integrals of g against the fine Q1 corners,
                // in fine-cell-local coordinates (unit measure)
                for fy in 0..m {
                    for fx in 0..m {
                        let bx = ox + fine * fx as f64;
                        let by = oy + fine * fy as f64;
                        let mut acc = [0.0f64; 4];
                        for (j, &yy) in gx.iter().enumerate() {
                            for (i, &xx) in gx.iter().enumerate() {
                                let w = gw[i] * gw[j];
                                let gv = g(bx + fine * xx, by + fine * yy);
                                for (kc, a) in acc.iter_mut().enumerate() {
                                    *a += w * gv * q1_value_grad(kc as u8, xx, yy).0;
                                }
                            }
                        }
                        gq1[fy * m + fx] = acc;
                    }
                }

                self.cell_dofs(cx, cy, &mut locals);
                for &(dv, ev, wv) in &locals {
                    let val = self.entity_load(ev, &gq1, &gcorn, sub_mass.as_deref());
                    rhs[dv] += wv * val * delta * delta;
                }
            }
        }
        if let Some(d) = dirichlet {
            self.apply_dirichlet_load(d, &mut rhs);
        }
        Ok(rhs)
    }

    /// Integral of g against one entity over one cell, in cell-local measure.
    fn entity_load(
        &self,
        ent: usize,
        gq1: &[[f64; 4]],
        gcorn: &[f64],
        sub_mass: Option<&CellTables>,
    ) -> f64 {
        let m = self.m;
        let finesq = 1.0 / (m * m) as f64;
        // Q1 entity of the cell: exact fine-grid decomposition
        if let Some(kq) = self.q1_ent.iter().position(|&e| e == ent) {
            let mut acc = 0.0;
            let delta = 1.0 / m as f64;
            for fy in 0..m {
                for fx in 0..m {
                    let corners = [
                        (fx as f64 * delta, fy as f64 * delta),
                        ((fx + 1) as f64 * delta, fy as f64 * delta),
                        ((fx + 1) as f64 * delta, (fy + 1) as f64 * delta),
                        (fx as f64 * delta, (fy + 1) as f64 * delta),
                    ];
                    for (kc, &(x, y)) in corners.iter().enumerate() {
                        acc += q1_value_grad(kq as u8, x, y).0 * gq1[fy * m + fx][kc];
                    }
                }
            }
            return acc * finesq;
        }
        // bubble entity: walk its solution's cells
        let ents = self.ents.as_ref().expect("bubble entity on plain branch");
        let (sol, ox, oy) = if let Some(k) = self.elem_ent.iter().position(|&e| e == ent) {
            (&ents.elem[k], 0usize, 0usize)
        } else {
            let mut found = None;
            'outer: for s in Side::ALL {
                for k in 0..4 {
                    if self.patch_ent[s as usize][k] == ent {
                        let (ox, oy) = s.patch_offset();
                        found = Some((ents.by_aspect(s.aspect(), k), ox, oy));
                        break 'outer;
                    }
                }
            }
            let (sol, ox, oy) = found.expect("unknown entity");
            (sol, ox, oy)
        };
        let sop = &sol.op;
        let mut acc = 0.0;
        let mut w = vec![0.0f64; sop.tables.ne];
        for fy in 0..m {
            for fx in 0..m {
                let (sx, sy) = (fx + ox * m, fy + oy * m);
                // Q1 part of the solution on this fine cell
                let corners = [(sx, sy), (sx + 1, sy), (sx + 1, sy + 1), (sx, sy + 1)];
                for (kc, (ix, iy)) in corners.iter().enumerate() {
                    acc += sol.nodal[iy * (sop.nx + 1) + ix] * gq1[fy * m + fx][kc];
                }
                if !sop.enriched {
                    continue;
                }
                // bubble part: contract Q1 data of g with the sub mass table
                let sub = sub_mass.expect("enriched entities need sub tables");
                w.iter_mut().for_each(|v| *v = 0.0);
                bubble_weights_on_cell(sol, sx, sy, sub, &mut w);
                let gk = [
                    gcorn[fy * (m + 1) + fx],
                    gcorn[fy * (m + 1) + fx + 1],
                    gcorn[(fy + 1) * (m + 1) + fx + 1],
                    gcorn[(fy + 1) * (m + 1) + fx],
                ];
                let mut cellacc = 0.0;
                for (kc, &gv) in gk.iter().enumerate() {
                    if gv != 0.0 {
                        let row = sop.q1_ent[kc];
                        for (ge, &wv) in w.iter().enumerate() {
                            if wv != 0.0 {
                                cellacc += gv * wv * sub.mass[sub.idx(row, ge)];
                            }
                        }
                    }
                }
                acc += cellacc;
            }
        }
        acc * finesq
    }

    /// Solve with the load `g`; optional inhomogeneous Dirichlet data on one
    /// boundary edge (used by the edge-trace bubbles).
    pub(crate) fn solve_load(
        self: &Arc<Self>,
        g: &dyn Fn(f64, f64) -> f64,
        dirichlet: Option<&DirichletEdge>,
    ) -> Result<Arc<LevelSolution>, BubbleError> {
        let rhs = self.load_vector(g, dirichlet)?;
        let x = self
            .lu
            .solve_refined(&self.matrix, &rhs, &SolveOptions::default())?;
        let mut nodal = vec![0.0; (self.nx + 1) * (self.ny + 1)];
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                let d = self.node_dof[j * (self.nx + 1) + i];
                if d >= 0 {
                    nodal[j * (self.nx + 1) + i] = x[d as usize];
                }
            }
        }
        if let Some(d) = dirichlet {
            for (node, val) in d.node_values(self) {
                nodal[node] = val;
            }
        }
        let depth = self.depth;
        Ok(Arc::new(LevelSolution {
            op: self.clone(),
            nodal,
            bub: x[self.n_int..].to_vec(),
            depth,
        }))
    }

    /// Add the coupling of known boundary values into the load vector.
    fn apply_dirichlet_load(&self, d: &DirichletEdge, rhs: &mut [f64]) {
        let delta = 1.0 / self.m as f64;
        let mut locals: Vec<(usize, usize, f64)> = Vec::with_capacity(24);
        for (cx, cy, corner, val) in d.cell_corner_values(self) {
            if val == 0.0 {
                continue;
            }
            let eu = self.q1_ent[corner];
            self.cell_dofs(cx, cy, &mut locals);
            for &(dv, ev, wv) in &locals {
                let t = self.tables.idx(eu, ev);
                rhs[dv] -= val * wv * (self.eps_hat * self.tables.k[t] + delta * self.tables.c[t]);
            }
        }
    }
}

/// Bubble-coefficient part of `weights_on_cell` (no nodal legs).
fn bubble_weights_on_cell(
    sol: &LevelSolution,
    cx: usize,
    cy: usize,
    sub: &CellTables,
    out: &mut [f64],
) {
    let op = &sol.op;
    let _ = sub;
    if !op.enriched {
        return;
    }
    let base = 4 * (cy * op.nx + cx);
    for k in 0..4 {
        out[op.elem_ent[k]] += sol.bub[base + k];
    }
    for (s, interior, vertical, ex, ey) in op.cell_sides(cx, cy) {
        if !interior {
            continue;
        }
        let dbase = op.edge_dof[op.edge_index(vertical, ex, ey)];
        let dirs = edge_directions(vertical, op.wind);
        let si = s as usize;
        for (d, w) in dirs.iter().enumerate() {
            let coeff = sol.bub[dbase + d - op.n_int];
            for k in 0..4 {
                if w[k] != 0.0 {
                    out[op.patch_ent[si][k]] += coeff * w[k];
                }
            }
        }
    }
}

/// Inhomogeneous Dirichlet data on one boundary edge of an element solve.
pub(crate) struct DirichletEdge {
    pub side: Side,
    /// Trace values at the grid nodes along that edge (length grid-side + 1).
    pub values: Vec<f64>,
}

impl DirichletEdge {
    /// Boundary nodes of the edge with their prescribed values.
    fn node_values(&self, op: &LevelOp) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        match self.side {
            Side::L | Side::R => {
                let i = if self.side == Side::L { 0 } else { op.nx };
                for j in 0..=op.ny {
                    out.push((j * (op.nx + 1) + i, self.values[j]));
                }
            }
            Side::B | Side::T => {
                let j = if self.side == Side::B { 0 } else { op.ny };
                for i in 0..=op.nx {
                    out.push((j * (op.nx + 1) + i, self.values[i]));
                }
            }
        }
        out
    }

    /// Cells adjacent to the edge with the local corner carrying each value.
    fn cell_corner_values(&self, op: &LevelOp) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        match self.side {
            Side::L | Side::R => {
                let (cx, c0, c1) = if self.side == Side::L {
                    (0usize, 0usize, 3usize)
                } else {
                    (op.nx - 1, 1, 2)
                };
                for cy in 0..op.ny {
                    out.push((cx, cy, c0, self.values[cy]));
                    out.push((cx, cy, c1, self.values[cy + 1]));
                }
            }
            Side::B | Side::T => {
                let (cy, c0, c1) = if self.side == Side::B {
                    (0usize, 0usize, 1usize)
                } else {
                    (op.ny - 1, 3, 2)
                };
                for cx in 0..op.nx {
                    out.push((cx, cy, c0, self.values[cx]));
                    out.push((cx, cy, c1, self.values[cx + 1]));
                }
            }
        }
        out
    }
}
