//! Minimal sparse linear algebra: triplet assembly, compressed row storage,
//! and a direct solver with an explicit residual contract.

mod lu;
mod ordering;

pub use lu::LuFactors;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("index ({row}, {col}) out of range for {n_rows} x {n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular (detected at pivot {0})")]
    SingularMatrix(usize),
    #[error("iterative refinement did not reach the residual tolerance in {0} iterations")]
    NoConvergence(usize),
    #[error("invalid solve options: {0}")]
    BadOptions(String),
}

/// Unassembled (row, col, value) entries; duplicates are summed on compression.
#[derive(Debug, Clone)]
pub struct Triplets {
    pub n_rows: usize,
    pub n_cols: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl Triplets {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Triplets {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, cap: usize) -> Self {
        Triplets {
            n_rows,
            n_cols,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.entries.push((row as u32, col as u32, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Compressed sparse row matrix. Column indices are strictly increasing within
/// each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

/// Sum duplicates and build CSR storage. Explicit zeros are kept.
pub fn compress(t: &Triplets) -> Result<CsrMatrix, SparseError> {
    for &(r, c, _) in &t.entries {
        if r as usize >= t.n_rows || c as usize >= t.n_cols {
            return Err(SparseError::IndexOutOfRange {
                row: r as usize,
                col: c as usize,
                n_rows: t.n_rows,
                n_cols: t.n_cols,
            });
        }
    }
    // stable sort keeps duplicate summation order deterministic in the
    // insertion order of the triplets
    let mut order: Vec<u32> = (0..t.entries.len() as u32).collect();
    order.sort_by_key(|&k| {
        let (r, c, _) = t.entries[k as usize];
        ((r as u64) << 32) | c as u64
    });

    let mut row_ptr = vec![0usize; t.n_rows + 1];
    let mut col_idx = Vec::with_capacity(t.entries.len());
    let mut values = Vec::with_capacity(t.entries.len());
    let mut last: Option<(u32, u32)> = None;
    for &k in &order {
        let (r, c, v) = t.entries[k as usize];
        if last == Some((r, c)) {
            *values.last_mut().unwrap() += v;
        } else {
            col_idx.push(c);
            values.push(v);
            row_ptr[r as usize + 1] += 1;
            last = Some((r, c));
        }
    }
    for i in 0..t.n_rows {
        row_ptr[i + 1] += row_ptr[i];
    }
    Ok(CsrMatrix {
        n_rows: t.n_rows,
        n_cols: t.n_cols,
        row_ptr,
        col_idx,
        values,
    })
}

impl CsrMatrix {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row-order sparse product A*x with fixed summation order.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.n_cols {
            return Err(SparseError::DimensionMismatch(format!(
                "matvec: matrix is {} x {}, vector has length {}",
                self.n_rows,
                self.n_cols,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.n_rows];
        for i in 0..self.n_rows {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// Entry lookup, zero for positions outside the stored pattern.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&(col as u32)) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }
}

/// Fill-reducing ordering used by the direct solver.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum FillOrdering {
    /// Minimum degree on the symmetrized pattern (default).
    #[default]
    MinDegree,
    /// Factor in the given index order.
    Natural,
    /// Caller-supplied elimination order.
    Given(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative residual tolerance: the solution satisfies |Ax-b| <= tol * |b|.
    pub rel_tol: f64,
    /// Maximum iterative-refinement sweeps before giving up.
    pub max_iterations: usize,
    /// Threshold for partial pivoting; 0 keeps the elimination order, 1 is
    /// full partial pivoting.
    pub pivot_threshold: f64,
    pub ordering: FillOrdering,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rel_tol: 1e-12,
            max_iterations: 40,
            pivot_threshold: 0.1,
            ordering: FillOrdering::MinDegree,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<(), SparseError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(SparseError::BadOptions(format!(
                "relative tolerance must lie in (0,1), got {}",
                self.rel_tol
            )));
        }
        if self.max_iterations < 1 {
            return Err(SparseError::BadOptions("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Direct solve of A x = b with iterative refinement until the residual
/// contract |Ax-b| <= rel_tol * |b| holds.
pub fn solve_linear(a: &CsrMatrix, b: &[f64], opts: &SolveOptions) -> Result<Vec<f64>, SparseError> {
    let lu = LuFactors::factorize(a, opts)?;
    lu.solve_refined(a, b, opts)
}

impl LuFactors {
    /// Triangular solve followed by refinement against the residual contract.
    pub fn solve_refined(
        &self,
        a: &CsrMatrix,
        b: &[f64],
        opts: &SolveOptions,
    ) -> Result<Vec<f64>, SparseError> {
        opts.validate()?;
        if b.len() != a.n_rows {
            return Err(SparseError::DimensionMismatch(format!(
                "solve: matrix is {} x {}, rhs has length {}",
                a.n_rows,
                a.n_cols,
                b.len()
            )));
        }
        let bnorm = norm2(b);
        let mut x = self.solve(b);
        if bnorm == 0.0 {
            return Ok(vec![0.0; b.len()]);
        }
        for _ in 0..opts.max_iterations {
            let ax = a.matvec(&x)?;
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            if norm2(&r) <= opts.rel_tol * bnorm {
                return Ok(x);
            }
            let d = self.solve(&r);
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
        }
        let ax = a.matvec(&x)?;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        if norm2(&r) <= opts.rel_tol * bnorm {
            Ok(x)
        } else {
            Err(SparseError::NoConvergence(opts.max_iterations))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
            }
        }
        compress(&t).unwrap()
    }

    #[test]
    fn compress_sums_duplicates() {
        let mut t = Triplets::new(1, 1);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        let a = compress(&t).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
    }

    #[test]
    fn compress_empty() {
        let t = Triplets::new(3, 3);
        let a = compress(&t).unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn compress_rejects_out_of_range() {
        let mut t = Triplets::new(2, 2);
        t.push(2, 0, 1.0);
        assert!(matches!(compress(&t), Err(SparseError::IndexOutOfRange { .. })));
    }

    #[test]
    fn poisson_stencil_rows() {
        // hand assembly of the 1D Poisson stencil for n = 3
        let a = tridiag(3);
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(0, 1), -1.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.get(1, 1), 2.0);
        assert_eq!(a.get(1, 2), -1.0);
        assert_eq!(a.get(2, 2), 2.0);
        assert_eq!(a.nnz(), 7);
    }

    #[test]
    fn matvec_examples() {
        let mut t = Triplets::new(3, 3);
        for i in 0..3 {
            t.push(i, i, 1.0);
        }
        let eye = compress(&t).unwrap();
        let x = vec![4.0, -1.0, 0.5];
        assert_eq!(eye.matvec(&x).unwrap(), x);

        let zero = compress(&Triplets::new(3, 3)).unwrap();
        assert_eq!(zero.matvec(&x).unwrap(), vec![0.0; 3]);

        let a = tridiag(3);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn solve_identity_and_tridiag() {
        let mut t = Triplets::new(5, 5);
        for i in 0..5 {
            t.push(i, i, 1.0);
        }
        let eye = compress(&t).unwrap();
        let b = vec![3.0, -1.0, 0.0, 7.5, 2.0];
        let x = solve_linear(&eye, &b, &SolveOptions::default()).unwrap();
        assert_eq!(x, b);

        // dense elimination oracle gives (1.5, 2, 1.5)
        let a = tridiag(3);
        let x = solve_linear(&a, &[1.0, 1.0, 1.0], &SolveOptions::default()).unwrap();
        for (xi, ei) in x.iter().zip([1.5, 2.0, 1.5]) {
            assert!((xi - ei).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_is_singular() {
        let zero = compress(&Triplets::new(4, 4)).unwrap();
        let r = solve_linear(&zero, &[1.0; 4], &SolveOptions::default());
        assert!(matches!(r, Err(SparseError::SingularMatrix(_))));
    }

    #[test]
    fn solve_is_deterministic() {
        let a = tridiag(40);
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let x1 = solve_linear(&a, &b, &SolveOptions::default()).unwrap();
        let x2 = solve_linear(&a, &b, &SolveOptions::default()).unwrap();
        assert_eq!(x1, x2);
    }
}
