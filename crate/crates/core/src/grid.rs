//! Uniform square meshes of the unit square with element and edge labeling,
//! two-element patches, and outflow-edge classification.
//!
//! Internal storage is row-major from the lower-left corner: element `(ix, iy)`
//! covers `[ix*h, (ix+1)*h] x [iy*h, (iy+1)*h]`. The right-to-left labeling
//! `T_{i,j}` with lower-left corner `(1 - i*h, (j-1)*h)` is provided as a
//! conversion layer so tests can be written against those labels directly.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("mesh needs at least 2 elements per side, got {0}")]
    TooFewElements(usize),
    #[error("wind must be a unit vector, |a| = {0}")]
    NonUnitWind(f64),
    #[error("diffusion coefficient must satisfy 0 < eps <= {max}, got {eps}")]
    BadEpsilon { eps: f64, max: f64 },
    #[error("element/edge index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("operation requires wind (-1, 0), got ({0}, {1})")]
    UnsupportedWind(f64, f64),
}

/// Parameters of a uniform N x N partition of (0,1)^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub h: f64,
    pub eps: f64,
    pub wind: [f64; 2],
}

impl GridSpec {
    /// Validated spec with the default upper bound `eps <= 0.5`.
    pub fn new(n: usize, eps: f64, wind: [f64; 2]) -> Result<Self, GridError> {
        Self::with_eps_max(n, eps, wind, 0.5)
    }

    /// Validated spec with a caller-chosen upper bound for `eps`.
    pub fn with_eps_max(n: usize, eps: f64, wind: [f64; 2], eps_max: f64) -> Result<Self, GridError> {
        if n < 2 {
            return Err(GridError::TooFewElements(n));
        }
        let norm = (wind[0] * wind[0] + wind[1] * wind[1]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(GridError::NonUnitWind(norm));
        }
        if !(eps > 0.0) || eps > eps_max {
            return Err(GridError::BadEpsilon { eps, max: eps_max });
        }
        Ok(GridSpec {
            n,
            h: 1.0 / n as f64,
            eps,
            wind,
        })
    }

    pub fn is_leftward_wind(&self) -> bool {
        self.wind == [-1.0, 0.0]
    }
}

/// Element label `T_{i,j}` with `1 <= i, j <= N`; `i` counts from the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementId {
    pub i: usize,
    pub j: usize,
}

/// Lower-left corner `(1 - i*h, (j-1)*h)` of element `T_{i,j}`.
pub fn paper_corner(id: ElementId, spec: &GridSpec) -> Result<(f64, f64), GridError> {
    if id.i < 1 || id.i > spec.n || id.j < 1 || id.j > spec.n {
        return Err(GridError::IndexOutOfRange(format!("T_({},{})", id.i, id.j)));
    }
    Ok((1.0 - id.i as f64 * spec.h, (id.j as f64 - 1.0) * spec.h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// An interior edge of the partition together with its two-element patch.
///
/// Vertical edge `(ex, ey)` sits at `x = ex*h`, `y in [ey*h, (ey+1)*h]` and is
/// labeled `S_{i+1/2, j}`; horizontal edge `(ex, ey)` sits at `y = ey*h`,
/// `x in [ex*h, (ex+1)*h]` and is labeled `S_{i, j+1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub orientation: Orientation,
    pub ex: usize,
    pub ey: usize,
    /// Adjacent elements: [left, right] for vertical, [below, above] for horizontal.
    pub elems: [usize; 2],
    /// Interior edges only are stored; kept for clarity in call sites.
    pub interior: bool,
    /// Member of the outflow set (only classified for wind (-1,0)).
    pub on_sigma_plus: bool,
}

impl Edge {
    /// Paper label as doubled indices `(2i, 2j)`, so `S_{i+1/2,j} -> (2i+1, 2j)`.
    pub fn paper_label2(&self, n: usize) -> (usize, usize) {
        match self.orientation {
            Orientation::Vertical => (2 * (n - self.ex) + 1, 2 * (self.ey + 1)),
            Orientation::Horizontal => (2 * (n - self.ex), 2 * self.ey + 1),
        }
    }

    /// Patch rectangle (union of the two adjacent elements) as (x0, y0, x1, y1).
    pub fn patch_rect(&self, h: f64) -> (f64, f64, f64, f64) {
        match self.orientation {
            Orientation::Vertical => (
                (self.ex as f64 - 1.0) * h,
                self.ey as f64 * h,
                (self.ex as f64 + 1.0) * h,
                (self.ey as f64 + 1.0) * h,
            ),
            Orientation::Horizontal => (
                self.ex as f64 * h,
                (self.ey as f64 - 1.0) * h,
                (self.ex as f64 + 1.0) * h,
                (self.ey as f64 + 1.0) * h,
            ),
        }
    }
}

/// Uniform mesh: elements, interior edges, nodes, boundary classification.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub spec: GridSpec,
    /// Interior edges, vertical first, each with its two-element patch.
    pub edges: Vec<Edge>,
    /// Node coordinates, index `iy * (n+1) + ix`.
    pub nodes: Vec<(f64, f64)>,
    pub boundary_node: Vec<bool>,
    /// For each element, the indices of its four edges [left, right, bottom, top]
    /// into `edges`; `None` where the edge lies on the domain boundary.
    pub elem_edges: Vec<[Option<usize>; 4]>,
}

impl Mesh {
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn n_elements(&self) -> usize {
        self.spec.n * self.spec.n
    }

    pub fn n_nodes(&self) -> usize {
        (self.spec.n + 1) * (self.spec.n + 1)
    }

    #[inline]
    pub fn elem_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.spec.n + ix
    }

    #[inline]
    pub fn elem_coords(&self, e: usize) -> (usize, usize) {
        (e % self.spec.n, e / self.spec.n)
    }

    #[inline]
    pub fn node_index(&self, ix: usize, iy: usize) -> usize {
        iy * (self.spec.n + 1) + ix
    }

    /// Lower-left corner of element `e` in internal indexing.
    pub fn elem_corner(&self, e: usize) -> (f64, f64) {
        let (ix, iy) = self.elem_coords(e);
        (ix as f64 * self.spec.h, iy as f64 * self.spec.h)
    }

    /// The four node indices of element `e`, counterclockwise from lower-left.
    pub fn elem_nodes(&self, e: usize) -> [usize; 4] {
        let (ix, iy) = self.elem_coords(e);
        [
            self.node_index(ix, iy),
            self.node_index(ix + 1, iy),
            self.node_index(ix + 1, iy + 1),
            self.node_index(ix, iy + 1),
        ]
    }

    /// Conversion from paper label to internal element index.
    pub fn elem_from_paper(&self, id: ElementId) -> Result<usize, GridError> {
        let n = self.spec.n;
        if id.i < 1 || id.i > n || id.j < 1 || id.j > n {
            return Err(GridError::IndexOutOfRange(format!("T_({},{})", id.i, id.j)));
        }
        Ok(self.elem_index(n - id.i, id.j - 1))
    }

    /// Conversion from internal element index to paper label.
    pub fn elem_to_paper(&self, e: usize) -> ElementId {
        let (ix, iy) = self.elem_coords(e);
        ElementId {
            i: self.spec.n - ix,
            j: iy + 1,
        }
    }

    /// Element containing the point, clamping onto the closure of the domain.
    pub fn locate(&self, x: f64, y: f64) -> usize {
        let n = self.spec.n;
        let ix = ((x / self.spec.h).floor() as isize).clamp(0, n as isize - 1) as usize;
        let iy = ((y / self.spec.h).floor() as isize).clamp(0, n as isize - 1) as usize;
        self.elem_index(ix, iy)
    }

    /// Interior edges touching the outflow boundary; requires wind (-1, 0).
    pub fn outflow_edges(&self) -> Result<Vec<usize>, GridError> {
        if !self.spec.is_leftward_wind() {
            return Err(GridError::UnsupportedWind(self.spec.wind[0], self.spec.wind[1]));
        }
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.on_sigma_plus)
            .map(|(k, _)| k)
            .collect())
    }
}

/// Build the uniform mesh for the given spec.
pub fn build_mesh(spec: GridSpec) -> Mesh {
    let n = spec.n;
    let h = spec.h;
    let leftward = spec.is_leftward_wind();

    let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
    let mut boundary_node = Vec::with_capacity((n + 1) * (n + 1));
    for iy in 0..=n {
        for ix in 0..=n {
            nodes.push((ix as f64 * h, iy as f64 * h));
            boundary_node.push(ix == 0 || ix == n || iy == 0 || iy == n);
        }
    }

    let mut edges = Vec::with_capacity(2 * n * (n - 1));
    let mut elem_edges = vec![[None; 4]; n * n];
    // vertical interior edges at x = ex*h
    for ex in 1..n {
        for ey in 0..n {
            let left = ey * n + (ex - 1);
            let right = ey * n + ex;
            let on_sigma_plus = leftward && (ey == 0 || ey == n - 1);
            let idx = edges.len();
            edges.push(Edge {
                orientation: Orientation::Vertical,
                ex,
                ey,
                elems: [left, right],
                interior: true,
                on_sigma_plus,
            });
            elem_edges[left][1] = Some(idx);
            elem_edges[right][0] = Some(idx);
        }
    }
    // horizontal interior edges at y = ey*h
    for ey in 1..n {
        for ex in 0..n {
            let below = (ey - 1) * n + ex;
            let above = ey * n + ex;
            let on_sigma_plus = leftward && ex == 0;
            let idx = edges.len();
            edges.push(Edge {
                orientation: Orientation::Horizontal,
                ex,
                ey,
                elems: [below, above],
                interior: true,
                on_sigma_plus,
            });
            elem_edges[below][3] = Some(idx);
            elem_edges[above][2] = Some(idx);
        }
    }

    Mesh {
        spec,
        edges,
        nodes,
        boundary_node,
        elem_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> GridSpec {
        GridSpec::new(n, 1e-3, [-1.0, 0.0]).unwrap()
    }

    #[test]
    fn counts_small() {
        let m = build_mesh(spec(2));
        assert_eq!(m.n_elements(), 4);
        assert_eq!(m.edges.len(), 4);
        assert_eq!(m.n_nodes(), 9);
    }

    #[test]
    fn counts_paper_grid() {
        let m = build_mesh(spec(50));
        assert_eq!(m.n_elements(), 2500);
    }

    #[test]
    fn interior_edge_count_n3() {
        let m = build_mesh(spec(3));
        // exhaustive: every pair of horizontally/vertically adjacent elements
        let mut count = 0;
        for iy in 0..3 {
            for ix in 0..3 {
                if ix + 1 < 3 {
                    count += 1;
                }
                if iy + 1 < 3 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 12);
        assert_eq!(m.edges.len(), 12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert_eq!(
            GridSpec::new(1, 1e-3, [-1.0, 0.0]).unwrap_err(),
            GridError::TooFewElements(1)
        );
        assert!(matches!(
            GridSpec::new(4, 1e-3, [-1.0, 0.5]),
            Err(GridError::NonUnitWind(_))
        ));
        assert!(matches!(
            GridSpec::new(4, 0.0, [-1.0, 0.0]),
            Err(GridError::BadEpsilon { .. })
        ));
        assert!(matches!(
            GridSpec::new(4, 0.7, [-1.0, 0.0]),
            Err(GridError::BadEpsilon { .. })
        ));
        assert!(GridSpec::with_eps_max(4, 1.0, [-1.0, 0.0], 1.0).is_ok());
    }

    #[test]
    fn paper_corners() {
        let s = spec(4);
        assert_eq!(paper_corner(ElementId { i: 1, j: 1 }, &s).unwrap(), (0.75, 0.0));
        // outflow-bottom corner element T_{N,1}
        assert_eq!(paper_corner(ElementId { i: 4, j: 1 }, &s).unwrap(), (0.0, 0.0));
        assert_eq!(paper_corner(ElementId { i: 1, j: 4 }, &s).unwrap(), (0.75, 0.75));
        assert!(paper_corner(ElementId { i: 5, j: 1 }, &s).is_err());
        assert!(paper_corner(ElementId { i: 1, j: 0 }, &s).is_err());
    }

    #[test]
    fn outflow_edge_counts() {
        for (n, expect) in [(2usize, 3usize), (3, 6), (8, 21)] {
            let m = build_mesh(spec(n));
            let of = m.outflow_edges().unwrap();
            assert_eq!(of.len(), expect, "n = {n}");
            assert_eq!(of.len(), 3 * (n - 1));
            // enumeration oracle: an interior edge is in the set iff one endpoint
            // lies on x=0, y=0 or y=1
            for (k, e) in m.edges.iter().enumerate() {
                let h = m.spec.h;
                let (p, q) = match e.orientation {
                    Orientation::Vertical => {
                        let x = e.ex as f64 * h;
                        ((x, e.ey as f64 * h), (x, (e.ey + 1) as f64 * h))
                    }
                    Orientation::Horizontal => {
                        let y = e.ey as f64 * h;
                        ((e.ex as f64 * h, y), ((e.ex + 1) as f64 * h, y))
                    }
                };
                let touches = |pt: (f64, f64)| pt.0 == 0.0 || pt.1 == 0.0 || pt.1 == 1.0;
                assert_eq!(e.on_sigma_plus, touches(p) || touches(q), "edge {k}");
            }
        }
    }

    #[test]
    fn outflow_requires_leftward_wind() {
        let s = GridSpec::new(3, 1e-3, [0.0, 1.0]).unwrap();
        let m = build_mesh(s);
        assert!(matches!(m.outflow_edges(), Err(GridError::UnsupportedWind(_, _))));
    }

    #[test]
    fn patches_are_two_element_rects() {
        let m = build_mesh(spec(5));
        let h = m.spec.h;
        for e in &m.edges {
            let (x0, y0, x1, y1) = e.patch_rect(h);
            let area = (x1 - x0) * (y1 - y0);
            assert!((area - 2.0 * h * h).abs() < 1e-15);
            // patch equals the union of the two adjacent elements
            for &el in &e.elems {
                let (cx, cy) = m.elem_corner(el);
                assert!(cx >= x0 - 1e-15 && cx + h <= x1 + 1e-15);
                assert!(cy >= y0 - 1e-15 && cy + h <= y1 + 1e-15);
            }
        }
    }

    #[test]
    fn node_counts() {
        let m = build_mesh(spec(7));
        let nb = m.boundary_node.iter().filter(|&&b| b).count();
        assert_eq!(nb, 4 * 7);
        assert_eq!(m.n_nodes() - nb, (7 - 1) * (7 - 1));
    }

    #[test]
    fn paper_roundtrip_elements_and_edges() {
        let m = build_mesh(spec(6));
        for e in 0..m.n_elements() {
            let id = m.elem_to_paper(e);
            assert_eq!(m.elem_from_paper(id).unwrap(), e);
            let (cx, cy) = m.elem_corner(e);
            let (px, py) = paper_corner(id, &m.spec).unwrap();
            assert!((cx - px).abs() < 1e-15 && (cy - py).abs() < 1e-15);
        }
        let mut seen = std::collections::HashSet::new();
        for e in &m.edges {
            assert!(seen.insert(e.paper_label2(m.spec.n)), "duplicate label");
        }
    }
}
