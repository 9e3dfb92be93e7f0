//! Residual-free bubbles on elements and two-element patches.
//!
//! A bubble solves `-eps*lap(b) + a.grad(b) = g` with zero boundary values on
//! its support. Every sub-problem is translated to a reference rectangle with
//! unit cells and local diffusion `eps_hat = eps / h_loc`; since the operator
//! has constant coefficients, all sub-problems of equal shape, class and
//! `eps_hat` are translates of each other and share one cached solution.
//!
//! Sub-problems whose mesh does not resolve the diffusion scale are themselves
//! solved with the bubble-enriched method on a zoomed sub-mesh, recursively,
//! until `eps_hat >= 1`; from there a plain Q1 Galerkin solve is accurate.

mod refsolve;
mod rfbe;
mod tables;

pub(crate) use refsolve::{
    cell_tables, class_solution, edge_directions, DirichletEdge, EntitySols, LevelOp,
    LevelSolution,
};
pub(crate) use tables::{
    pair_tables, plain_q1_tables, q1_value_grad, CellTables, ClassId, Entity, EntitySource,
    EntitySpec, Side,
};

use crate::sparse::SparseError;
use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Quadrature order used inside recursive bubble solves.
pub(crate) const REC_QUAD: usize = 4;

#[derive(Debug, Error)]
pub enum BubbleError {
    #[error("linear solver failed in a bubble sub-problem: {0}")]
    Solver(#[from] SparseError),
    #[error("recursion depth {depth} exceeds the stop-rule bound {bound} at eps_hat = {eps_hat}")]
    DepthExceeded {
        depth: usize,
        bound: usize,
        eps_hat: f64,
    },
    #[error("zoom factor must be at least 4, got {0}")]
    BadZoom(usize),
    #[error("quadrature order must be at least 2, got {0}")]
    BadQuadOrder(usize),
    #[error("point ({0}, {1}) lies outside the reference domain")]
    PointOutsideDomain(f64, f64),
    #[error("right-hand side {0} is not defined on this sub-domain")]
    BadRhs(String),
}

/// Shape of a bubble support in units of the local cell size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aspect {
    /// One element, reference domain (0,1)^2.
    Element,
    /// Patch of a vertical edge, reference domain (0,2) x (0,1).
    HPatch,
    /// Patch of a horizontal edge, reference domain (0,1) x (0,2).
    VPatch,
}

impl Aspect {
    /// Extent in cells (width, height).
    pub fn cells(&self) -> (usize, usize) {
        match self {
            Aspect::Element => (1, 1),
            Aspect::HPatch => (2, 1),
            Aspect::VPatch => (1, 2),
        }
    }

    pub fn size(&self) -> (f64, f64) {
        let (w, h) = self.cells();
        (w as f64, h as f64)
    }
}

/// A bubble sub-domain: shape, physical cell size, and local diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubDomain {
    pub aspect: Aspect,
    pub h_loc: f64,
    pub eps_hat: f64,
}

impl SubDomain {
    pub fn new(aspect: Aspect, h_loc: f64, eps: f64) -> Self {
        SubDomain {
            aspect,
            h_loc,
            eps_hat: eps / h_loc,
        }
    }
}

/// Right-hand-side class of a bubble problem, in reference coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhsClass {
    Constant(f64),
    /// 1 - y on a domain of height 1 (wall-touching ramp).
    RampBottom,
    /// y on a domain of height 1.
    RampTop,
    /// Nodal Q1 basis function of corner k in 1..=4, counterclockwise from the
    /// origin corner.
    NodalQ1(u8),
    /// Bilinear data with the four corner values, resolved by linearity into
    /// the nodal classes.
    Q1Data([f64; 4]),
}

impl RhsClass {
    /// Pointwise evaluation on the reference domain of the given aspect.
    pub fn eval(&self, aspect: Aspect, x: f64, y: f64) -> Result<f64, BubbleError> {
        let (w, h) = aspect.size();
        match self {
            RhsClass::Constant(c) => Ok(*c),
            RhsClass::RampBottom => {
                if h != 1.0 {
                    return Err(BubbleError::BadRhs("RampBottom needs height 1".into()));
                }
                Ok(1.0 - y)
            }
            RhsClass::RampTop => {
                if h != 1.0 {
                    return Err(BubbleError::BadRhs("RampTop needs height 1".into()));
                }
                Ok(y)
            }
            RhsClass::NodalQ1(k) => {
                let (sx, sy) = (x / w, y / h);
                Ok(match k {
                    1 => (1.0 - sx) * (1.0 - sy),
                    2 => sx * (1.0 - sy),
                    3 => sx * sy,
                    4 => (1.0 - sx) * sy,
                    _ => return Err(BubbleError::BadRhs(format!("corner {k} not in 1..=4"))),
                })
            }
            RhsClass::Q1Data(v) => {
                let mut acc = 0.0;
                for (k, &vk) in v.iter().enumerate() {
                    acc += vk * RhsClass::NodalQ1(k as u8 + 1).eval(aspect, x, y)?;
                }
                Ok(acc)
            }
        }
    }

    fn key(&self) -> RhsKey {
        match self {
            RhsClass::Constant(c) => RhsKey::Constant(c.to_bits()),
            RhsClass::RampBottom => RhsKey::RampBottom,
            RhsClass::RampTop => RhsKey::RampTop,
            RhsClass::NodalQ1(k) => RhsKey::NodalQ1(*k),
            RhsClass::Q1Data(v) => RhsKey::Q1Data(v.map(f64::to_bits)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum RhsKey {
    Constant(u64),
    RampBottom,
    RampTop,
    NodalQ1(u8),
    Q1Data([u64; 4]),
    RfbeTrace,
}

/// Cache key of a bubble field: two bubbles with equal keys are the identical
/// function up to translation. The physical translation factor is applied by
/// the caller, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BubbleKey {
    aspect: Aspect,
    eps_hat_bits: u64,
    rhs: RhsKey,
    wind_bits: [u64; 2],
    zoom: usize,
}

/// Discrete bubble on its reference sub-mesh: nodal values, evaluated by
/// bilinear interpolation.
#[derive(Debug, Clone)]
pub struct BubbleField {
    pub aspect: Aspect,
    /// Sub-mesh resolution per unit cell.
    pub m: usize,
    /// Cells in x and y; `(nx+1)*(ny+1)` nodal values, row-major in y.
    pub nx: usize,
    pub ny: usize,
    pub vals: Vec<f64>,
    /// Recursion depth of the solve that produced this field (0 = plain
    /// Galerkin at the diffusion scale).
    pub depth: usize,
    pub eps_hat: f64,
}

impl BubbleField {
    #[inline]
    fn node(&self, i: usize, j: usize) -> f64 {
        self.vals[j * (self.nx + 1) + i]
    }

    /// Bilinear interpolation at a reference point; exact 0 on the boundary.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64, BubbleError> {
        let (w, h) = self.aspect.size();
        if !(x >= -1e-12 && x <= w + 1e-12 && y >= -1e-12 && y <= h + 1e-12) {
            return Err(BubbleError::PointOutsideDomain(x, y));
        }
        Ok(self.eval_unchecked(x, y))
    }

    pub fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        let delta = 1.0 / self.m as f64;
        let fx = (x / delta).clamp(0.0, self.nx as f64);
        let fy = (y / delta).clamp(0.0, self.ny as f64);
        let i = (fx as usize).min(self.nx - 1);
        let j = (fy as usize).min(self.ny - 1);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let v00 = self.node(i, j);
        let v10 = self.node(i + 1, j);
        let v11 = self.node(i + 1, j + 1);
        let v01 = self.node(i, j + 1);
        v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v11 * tx * ty + v01 * (1.0 - tx) * ty
    }

    /// Gradient of the interpolant in reference coordinates.
    pub fn grad_unchecked(&self, x: f64, y: f64) -> (f64, f64) {
        let delta = 1.0 / self.m as f64;
        let fx = (x / delta).clamp(0.0, self.nx as f64);
        let fy = (y / delta).clamp(0.0, self.ny as f64);
        let i = (fx as usize).min(self.nx - 1);
        let j = (fy as usize).min(self.ny - 1);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let v00 = self.node(i, j);
        let v10 = self.node(i + 1, j);
        let v11 = self.node(i + 1, j + 1);
        let v01 = self.node(i, j + 1);
        let gx = ((v10 - v00) * (1.0 - ty) + (v11 - v01) * ty) / delta;
        let gy = ((v01 - v00) * (1.0 - tx) + (v11 - v10) * tx) / delta;
        (gx, gy)
    }

    pub fn sup_norm(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Weighted nodal combination of fields on the same grid.
    pub fn combine(parts: &[(f64, &BubbleField)]) -> BubbleField {
        let first = parts[0].1;
        let mut vals = vec![0.0; first.vals.len()];
        let mut depth = 0;
        for &(w, f) in parts {
            assert_eq!(f.vals.len(), vals.len(), "combine needs identical grids");
            for (acc, &v) in vals.iter_mut().zip(&f.vals) {
                *acc += w * v;
            }
            depth = depth.max(f.depth);
        }
        BubbleField {
            aspect: first.aspect,
            m: first.m,
            nx: first.nx,
            ny: first.ny,
            vals,
            depth,
            eps_hat: first.eps_hat,
        }
    }

    /// Dump the field as a CSV grid `x,y,value`.
    pub fn dump_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "x,y,value")?;
        let delta = 1.0 / self.m as f64;
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                writeln!(
                    out,
                    "{:.12e},{:.12e},{:.12e}",
                    i as f64 * delta,
                    j as f64 * delta,
                    self.node(i, j)
                )?;
            }
        }
        Ok(())
    }
}

/// Stop-rule bound on the recursion depth for a sub-problem at `eps_hat`.
pub fn depth_bound(eps_hat: f64, zoom: usize) -> usize {
    if eps_hat >= 1.0 {
        0
    } else {
        ((1.0 / eps_hat).ln() / (zoom as f64).ln()).ceil() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct OpKey {
    aspect: Aspect,
    eps_hat_bits: u64,
    wind_bits: [u64; 2],
    zoom: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct TabKey {
    eps_hat_bits: u64,
    wind_bits: [u64; 2],
    zoom: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct SolKey {
    aspect: Aspect,
    eps_hat_bits: u64,
    wind_bits: [u64; 2],
    zoom: usize,
    class: u64,
}

/// Once-per-key store for bubble fields and the factorized sub-mesh operators
/// behind them. Concurrent duplicate computation is allowed; the first writer
/// wins and all candidates are identical by determinism of the solve path.
pub struct BubbleCache {
    fields: Mutex<HashMap<BubbleKey, Arc<BubbleField>>>,
    ops: Mutex<HashMap<OpKey, Arc<LevelOp>>>,
    tabs: Mutex<HashMap<TabKey, (Arc<CellTables>, Arc<EntitySols>)>>,
    sols: Mutex<HashMap<SolKey, Arc<LevelSolution>>>,
    plain: Mutex<HashMap<[u64; 2], Arc<CellTables>>>,
}

impl BubbleCache {
    pub fn new() -> Self {
        BubbleCache {
            fields: Mutex::new(HashMap::new()),
            ops: Mutex::new(HashMap::new()),
            tabs: Mutex::new(HashMap::new()),
            sols: Mutex::new(HashMap::new()),
            plain: Mutex::new(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.fields.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn get_field(&self, key: &BubbleKey) -> Option<Arc<BubbleField>> {
        self.fields.lock().unwrap().get(key).cloned()
    }

    pub(crate) fn put_field(&self, key: BubbleKey, field: BubbleField) -> Arc<BubbleField> {
        let mut map = self.fields.lock().unwrap();
        map.entry(key).or_insert_with(|| Arc::new(field)).clone()
    }

    pub(crate) fn get_op(
        &self,
        aspect: Aspect,
        eps_hat: f64,
        wind: [f64; 2],
        zoom: usize,
    ) -> Option<Arc<LevelOp>> {
        let key = OpKey {
            aspect,
            eps_hat_bits: eps_hat.to_bits(),
            wind_bits: [wind[0].to_bits(), wind[1].to_bits()],
            zoom,
        };
        self.ops.lock().unwrap().get(&key).cloned()
    }

    pub(crate) fn put_op(
        &self,
        aspect: Aspect,
        eps_hat: f64,
        wind: [f64; 2],
        zoom: usize,
        op: LevelOp,
    ) -> Arc<LevelOp> {
        let key = OpKey {
            aspect,
            eps_hat_bits: eps_hat.to_bits(),
            wind_bits: [wind[0].to_bits(), wind[1].to_bits()],
            zoom,
        };
        let mut map = self.ops.lock().unwrap();
        map.entry(key).or_insert_with(|| Arc::new(op)).clone()
    }

    pub(crate) fn get_tables(
        &self,
        eps_cell: f64,
        wind: [f64; 2],
        zoom: usize,
    ) -> Option<(Arc<CellTables>, Arc<EntitySols>)> {
        let key = TabKey {
            eps_hat_bits: eps_cell.to_bits(),
            wind_bits: [wind[0].to_bits(), wind[1].to_bits()],
            zoom,
        };
        self.tabs.lock().unwrap().get(&key).cloned()
    }

    pub(crate) fn put_tables(
        &self,
        eps_cell: f64,
        wind: [f64; 2],
        zoom: usize,
        tables: Arc<CellTables>,
        ents: Arc<EntitySols>,
    ) -> (Arc<CellTables>, Arc<EntitySols>) {
        let key = TabKey {
            eps_hat_bits: eps_cell.to_bits(),
            wind_bits: [wind[0].to_bits(), wind[1].to_bits()],
            zoom,
        };
        let mut map = self.tabs.lock().unwrap();
        map.entry(key).or_insert((tables, ents)).clone()
    }

    pub(crate) fn get_solution(
        &self,
        aspect: Aspect,
        eps_hat: f64,
        wind: [f64; 2],
        zoom: usize,
        class: u64,
    ) -> Option<Arc<LevelSolution>> {
        let key = SolKey {
            aspect,
            eps_hat_bits: eps_hat.to_bits(),
            wind_bits: [wind[0].to_bits(), wind[1].to_bits()],
            zoom,
            class,
        };
        self.sols.lock().unwrap().get(&key).cloned()
    }

    pub(crate) fn put_solution(
        &self,
        aspect: Aspect,
        eps_hat: f64,
        wind: [f64; 2],
        zoom: usize,
        class: u64,
        sol: Arc<LevelSolution>,
    ) -> Arc<LevelSolution> {
        let key = SolKey {
            aspect,
            eps_hat_bits: eps_hat.to_bits(),
            wind_bits: [wind[0].to_bits(), wind[1].to_bits()],
            zoom,
            class,
        };
        let mut map = self.sols.lock().unwrap();
        map.entry(key).or_insert(sol).clone()
    }

    pub(crate) fn get_or_build_plain(
        &self,
        wind: [f64; 2],
        build: impl FnOnce() -> Arc<CellTables>,
    ) -> Arc<CellTables> {
        let key = [wind[0].to_bits(), wind[1].to_bits()];
        let mut map = self.plain.lock().unwrap();
        map.entry(key).or_insert_with(build).clone()
    }

    /// Snapshot of all cached fields with their keys, for property sweeps.
    pub fn snapshot_fields(&self) -> Vec<(BubbleKeyInfo, Arc<BubbleField>)> {
        self.fields
            .lock()
            .unwrap()
            .iter()
            .map(|(k, v)| {
                (
                    BubbleKeyInfo {
                        aspect: k.aspect,
                        eps_hat: f64::from_bits(k.eps_hat_bits),
                        rhs: match k.rhs {
                            RhsKey::Constant(b) => Some(RhsClass::Constant(f64::from_bits(b))),
                            RhsKey::RampBottom => Some(RhsClass::RampBottom),
                            RhsKey::RampTop => Some(RhsClass::RampTop),
                            RhsKey::NodalQ1(k) => Some(RhsClass::NodalQ1(k)),
                            RhsKey::Q1Data(v) => Some(RhsClass::Q1Data(v.map(f64::from_bits))),
                            RhsKey::RfbeTrace => None,
                        },
                    },
                    v.clone(),
                )
            })
            .collect()
    }
}

impl Default for BubbleCache {
    fn default() -> Self {
        Self::new()
    }
}

/// Readable key data returned by [`BubbleCache::snapshot_fields`];
/// `rhs = None` marks trace-driven (RFBe) fields.
#[derive(Debug, Clone, Copy)]
pub struct BubbleKeyInfo {
    pub aspect: Aspect,
    pub eps_hat: f64,
    pub rhs: Option<RhsClass>,
}

pub(crate) fn field_key(aspect: Aspect, eps_hat: f64, rhs: RhsKey, wind: [f64; 2], zoom: usize) -> BubbleKey {
    BubbleKey {
        aspect,
        eps_hat_bits: eps_hat.to_bits(),
        rhs,
        wind_bits: [wind[0].to_bits(), wind[1].to_bits()],
        zoom,
    }
}

/// Solve the bubble problem `-eps*lap(b) + a.grad(b) = g`, `b = 0` on the
/// boundary of the sub-domain, by zooming onto an `M`-per-cell sub-mesh; the
/// sub-mesh is itself bubble-enriched while `eps_hat < 1`.
pub fn solve_bubble(
    dom: &SubDomain,
    rhs: &RhsClass,
    wind: [f64; 2],
    zoom: usize,
    cache: &BubbleCache,
) -> Result<Arc<BubbleField>, BubbleError> {
    if zoom < 4 {
        return Err(BubbleError::BadZoom(zoom));
    }
    bubble_field(cache, dom.aspect, dom.eps_hat, wind, zoom, rhs)
}

pub(crate) fn bubble_field(
    cache: &BubbleCache,
    aspect: Aspect,
    eps_hat: f64,
    wind: [f64; 2],
    zoom: usize,
    rhs: &RhsClass,
) -> Result<Arc<BubbleField>, BubbleError> {
    // validate the class against the aspect up front
    rhs.eval(aspect, 0.0, 0.0)?;
    let key = field_key(aspect, eps_hat, rhs.key(), wind, zoom);
    if let Some(f) = cache.get_field(&key) {
        return Ok(f);
    }
    // every class in use is bilinear, so anything except the nodal classes
    // themselves resolves exactly into the four nodal solutions
    let data: Option<[f64; 4]> = match rhs {
        RhsClass::NodalQ1(_) => None,
        RhsClass::Q1Data(v) => Some(*v),
        RhsClass::Constant(c) => Some([*c; 4]),
        RhsClass::RampBottom => Some([1.0, 1.0, 0.0, 0.0]),
        RhsClass::RampTop => Some([0.0, 0.0, 1.0, 1.0]),
    };
    if let Some(v) = data {
        let parts: Vec<Arc<BubbleField>> = (1..=4u8)
            .map(|k| bubble_field(cache, aspect, eps_hat, wind, zoom, &RhsClass::NodalQ1(k)))
            .collect::<Result<_, _>>()?;
        let combo = BubbleField::combine(
            &v.iter()
                .cloned()
                .zip(parts.iter().map(|p| p.as_ref()))
                .collect::<Vec<_>>(),
        );
        return Ok(cache.put_field(key, combo));
    }
    let RhsClass::NodalQ1(k) = rhs else {
        unreachable!("non-nodal classes resolve to data combinations")
    };
    let sol = class_solution(cache, aspect, eps_hat, wind, zoom, k - 1)?;
    let (nx, ny) = (aspect.cells().0 * zoom, aspect.cells().1 * zoom);
    let field = BubbleField {
        aspect,
        m: zoom,
        nx,
        ny,
        vals: sol.nodal.clone(),
        depth: sol.depth,
        eps_hat,
    };
    Ok(cache.put_field(key, field))
}

pub use rfbe::{psi_1d, rfbe_bubble};

/// Bilinear form variant for coupling integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// eps grad(u).grad(v) + (a.grad u) v
    Standard,
    /// exp(-a.x) [ eps grad(u).grad(v) + (1-eps) (a.grad u) v ]
    Weighted,
}

/// A bubble field placed on a physical axis-aligned rectangle.
#[derive(Clone, Copy)]
pub struct PlacedField<'a> {
    pub field: &'a BubbleField,
    /// (x0, y0, x1, y1) of the physical support.
    pub rect: (f64, f64, f64, f64),
}

impl<'a> PlacedField<'a> {
    fn scale(&self) -> (f64, f64) {
        let (w, h) = self.field.aspect.size();
        (
            (self.rect.2 - self.rect.0) / w,
            (self.rect.3 - self.rect.1) / h,
        )
    }

    /// Value and physical gradient at a physical point inside the support.
    pub fn value_grad(&self, x: f64, y: f64) -> (f64, (f64, f64)) {
        let (sx, sy) = self.scale();
        let rx = (x - self.rect.0) / sx;
        let ry = (y - self.rect.1) / sy;
        let v = self.field.eval_unchecked(rx, ry);
        let (gx, gy) = self.field.grad_unchecked(rx, ry);
        (v, (gx / sx, gy / sy))
    }

    /// Sub-mesh breakpoints along x and y in physical coordinates.
    fn breaks(&self) -> (Vec<f64>, Vec<f64>) {
        let (sx, sy) = self.scale();
        let d = 1.0 / self.field.m as f64;
        let bx = (0..=self.field.nx)
            .map(|i| self.rect.0 + sx * d * i as f64)
            .collect();
        let by = (0..=self.field.ny)
            .map(|j| self.rect.1 + sy * d * j as f64)
            .collect();
        (bx, by)
    }
}

/// Partner of a bubble in a coupling integral.
pub enum Partner<'a> {
    /// Nodal Q1 function of corner k in 1..=4 of the given physical element.
    Q1 {
        rect: (f64, f64, f64, f64),
        corner: u8,
    },
    Bubble(PlacedField<'a>),
}

/// Bilinear-form entries of a bubble against a partner over the intersection
/// of their supports, plus the load integral of `f` against the bubble.
///
/// Returns `(a(b, partner), a(partner, b), F(b))`, all computed with composite
/// Gauss quadrature on the finest common sub-mesh of the overlap. For the
/// Weighted form the exponential weight is `exp(-a.(x - x_w))` with the
/// translation point `x_w = weight_origin` supplied by the caller.
#[allow(clippy::too_many_arguments)]
pub fn coupling_integrals(
    b: &PlacedField,
    partner: &Partner,
    form: FormKind,
    eps: f64,
    wind: [f64; 2],
    quad: usize,
    load: &dyn Fn(f64, f64) -> f64,
    weight_origin: (f64, f64),
) -> Result<(f64, f64, f64), BubbleError> {
    if quad < 2 {
        return Err(BubbleError::BadQuadOrder(quad));
    }
    let prect = match partner {
        Partner::Q1 { rect, .. } => *rect,
        Partner::Bubble(p) => p.rect,
    };
    let x0 = b.rect.0.max(prect.0);
    let y0 = b.rect.1.max(prect.1);
    let x1 = b.rect.2.min(prect.2);
    let y1 = b.rect.3.min(prect.3);
    if x1 - x0 <= 1e-14 || y1 - y0 <= 1e-14 {
        return Ok((0.0, 0.0, 0.0));
    }

    let clip = |v: &mut Vec<f64>| {
        v.retain(|&t| t > x0 - 1e-14 && t < x1 + 1e-14);
    };
    let (mut bx, mut by) = b.breaks();
    clip(&mut bx);
    by.retain(|&t| t > y0 - 1e-14 && t < y1 + 1e-14);
    let (px, py) = match partner {
        Partner::Q1 { .. } => (vec![x0, x1], vec![y0, y1]),
        Partner::Bubble(p) => {
            let (mut px, mut py) = p.breaks();
            px.retain(|&t| t > x0 - 1e-14 && t < x1 + 1e-14);
            py.retain(|&t| t > y0 - 1e-14 && t < y1 + 1e-14);
            (px, py)
        }
    };
    let xs = crate::quadrature::merge_breaks(&crate::quadrature::merge_breaks(&bx, &px), &[x0, x1]);
    let ys = crate::quadrature::merge_breaks(&crate::quadrature::merge_breaks(&by, &py), &[y0, y1]);
    let (qx, wx) = crate::quadrature::composite_gauss(quad, &xs);
    let (qy, wy) = crate::quadrature::composite_gauss(quad, &ys);

    let partner_value_grad = |x: f64, y: f64| -> (f64, (f64, f64)) {
        match partner {
            Partner::Q1 { rect, corner } => {
                let (ex0, ey0, ex1, ey1) = *rect;
                let sx = (x - ex0) / (ex1 - ex0);
                let sy = (y - ey0) / (ey1 - ey0);
                let (v, gx, gy) = match corner {
                    1 => ((1.0 - sx) * (1.0 - sy), -(1.0 - sy), -(1.0 - sx)),
                    2 => (sx * (1.0 - sy), 1.0 - sy, -sx),
                    3 => (sx * sy, sy, sx),
                    4 => ((1.0 - sx) * sy, -sy, 1.0 - sx),
                    _ => (0.0, 0.0, 0.0),
                };
                (v, (gx / (ex1 - ex0), gy / (ey1 - ey0)))
            }
            Partner::Bubble(p) => p.value_grad(x, y),
        }
    };

    let mut a_bp = 0.0; // a(b, partner): b trial, partner test
    let mut a_pb = 0.0;
    let mut fb = 0.0;
    for (j, &y) in qy.iter().enumerate() {
        for (i, &x) in qx.iter().enumerate() {
            let w = wx[i] * wy[j];
            let (bv, bg) = b.value_grad(x, y);
            let (pv, pg) = partner_value_grad(x, y);
            match form {
                FormKind::Standard => {
                    let adv_b = wind[0] * bg.0 + wind[1] * bg.1;
                    let adv_p = wind[0] * pg.0 + wind[1] * pg.1;
                    let diff = eps * (bg.0 * pg.0 + bg.1 * pg.1);
                    a_bp += w * (diff + adv_b * pv);
                    a_pb += w * (diff + adv_p * bv);
                    fb += w * load(x, y) * bv;
                }
                FormKind::Weighted => {
                    let e = (-(wind[0] * (x - weight_origin.0) + wind[1] * (y - weight_origin.1)))
                        .exp();
                    let adv_b = wind[0] * bg.0 + wind[1] * bg.1;
                    let adv_p = wind[0] * pg.0 + wind[1] * pg.1;
                    let diff = eps * (bg.0 * pg.0 + bg.1 * pg.1);
                    a_bp += w * e * (diff + (1.0 - eps) * adv_b * pv);
                    a_pb += w * e * (diff + (1.0 - eps) * adv_p * bv);
                    fb += w * e * load(x, y) * bv;
                }
            }
        }
    }
    Ok((a_bp, a_pb, fb))
}
