//! Left-looking sparse LU with threshold partial pivoting.
//!
//! Columns are factored in a fill-reducing order; within each column a sparse
//! triangular solve against the already-computed part of L yields the new
//! column of U and L. Pivoting prefers the diagonal of the symmetrically
//! permuted matrix and falls back to the largest entry when the diagonal is
//! smaller than `pivot_threshold` times the column maximum.

use super::ordering::min_degree;
use super::{CsrMatrix, FillOrdering, SolveOptions, SparseError};

#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    l_ptr: Vec<usize>,
    l_rows: Vec<u32>, // original row ids, pivoted later than their column
    l_vals: Vec<f64>,
    u_ptr: Vec<usize>,
    u_rows: Vec<u32>, // pivot positions k < j, ascending within a column
    u_vals: Vec<f64>,
    u_diag: Vec<f64>,
    pivrow: Vec<u32>, // pivot position -> original row
    pinv: Vec<i64>,   // original row -> pivot position
    colorder: Vec<u32>,
}

struct Csc {
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<f64>,
}

fn to_csc(a: &CsrMatrix) -> Csc {
    let mut col_ptr = vec![0usize; a.n_cols + 1];
    for &c in &a.col_idx {
        col_ptr[c as usize + 1] += 1;
    }
    for c in 0..a.n_cols {
        col_ptr[c + 1] += col_ptr[c];
    }
    let mut next = col_ptr.clone();
    let mut row_idx = vec![0u32; a.nnz()];
    let mut vals = vec![0.0; a.nnz()];
    for r in 0..a.n_rows {
        for k in a.row_ptr[r]..a.row_ptr[r + 1] {
            let c = a.col_idx[k] as usize;
            row_idx[next[c]] = r as u32;
            vals[next[c]] = a.values[k];
            next[c] += 1;
        }
    }
    Csc {
        col_ptr,
        row_idx,
        vals,
    }
}

impl LuFactors {
    pub fn factorize(a: &CsrMatrix, opts: &SolveOptions) -> Result<Self, SparseError> {
        if a.n_rows != a.n_cols {
            return Err(SparseError::DimensionMismatch(format!(
                "factorize needs a square matrix, got {} x {}",
                a.n_rows, a.n_cols
            )));
        }
        let n = a.n_rows;
        let colorder: Vec<u32> = match &opts.ordering {
            FillOrdering::MinDegree => min_degree(a).into_iter().map(|v| v as u32).collect(),
            FillOrdering::Natural => (0..n as u32).collect(),
            FillOrdering::Given(p) => {
                if p.len() != n {
                    return Err(SparseError::BadOptions(format!(
                        "given ordering has length {}, matrix has {} rows",
                        p.len(),
                        n
                    )));
                }
                p.iter().map(|&v| v as u32).collect()
            }
        };
        let csc = to_csc(a);
        let thresh = opts.pivot_threshold.clamp(0.0, 1.0);

        let mut lu = LuFactors {
            n,
            l_ptr: vec![0; n + 1],
            l_rows: Vec::new(),
            l_vals: Vec::new(),
            u_ptr: vec![0; n + 1],
            u_rows: Vec::new(),
            u_vals: Vec::new(),
            u_diag: vec![0.0; n],
            pivrow: vec![0; n],
            pinv: vec![-1; n],
            colorder,
        };

        let mut x = vec![0.0f64; n];
        let mut mark = vec![0u32; n];
        let mut xrows: Vec<u32> = Vec::new();
        let mut reach: Vec<u32> = Vec::new(); // pivot positions reached
        let mut rstamp = vec![0u32; n]; // per pivot position
        let mut dfs_stack: Vec<(u32, usize)> = Vec::new();

        for j in 0..n {
            let c = lu.colorder[j] as usize;
            let stamp = j as u32 + 1;
            xrows.clear();
            reach.clear();

            // scatter A(:, c) and seed the reach with already-pivoted rows
            for k in csc.col_ptr[c]..csc.col_ptr[c + 1] {
                let r = csc.row_idx[k] as usize;
                x[r] = csc.vals[k];
                mark[r] = stamp;
                xrows.push(r as u32);
            }

            // depth-first closure over columns of L; edges lead to strictly
            // larger pivot positions, so ascending order is topological
            for k in csc.col_ptr[c]..csc.col_ptr[c + 1] {
                let r = csc.row_idx[k] as usize;
                let p = lu.pinv[r];
                if p >= 0 && rstamp[p as usize] != stamp {
                    rstamp[p as usize] = stamp;
                    dfs_stack.push((p as u32, lu.l_ptr[p as usize]));
                    while !dfs_stack.is_empty() {
                        let top = dfs_stack.len() - 1;
                        let (node, mut ptr) = dfs_stack[top];
                        let end = lu.l_ptr[node as usize + 1];
                        let mut child = None;
                        while ptr < end {
                            let rr = lu.l_rows[ptr] as usize;
                            ptr += 1;
                            let pp = lu.pinv[rr];
                            if pp >= 0 && rstamp[pp as usize] != stamp {
                                rstamp[pp as usize] = stamp;
                                child = Some((pp as u32, lu.l_ptr[pp as usize]));
                                break;
                            }
                        }
                        dfs_stack[top].1 = ptr;
                        match child {
                            Some(c) => dfs_stack.push(c),
                            None => reach.push(dfs_stack.pop().unwrap().0),
                        }
                    }
                }
            }
            reach.sort_unstable();

            // numeric sparse solve against the reached columns of L
            for &kk in reach.iter() {
                let k = kk as usize;
                let ukj = x[lu.pivrow[k] as usize];
                if ukj != 0.0 {
                    for t in lu.l_ptr[k]..lu.l_ptr[k + 1] {
                        let r = lu.l_rows[t] as usize;
                        if mark[r] != stamp {
                            mark[r] = stamp;
                            x[r] = 0.0;
                            xrows.push(r as u32);
                        }
                        x[r] -= lu.l_vals[t] * ukj;
                    }
                }
            }

            // pivot among not-yet-pivoted rows
            let mut maxabs = 0.0f64;
            let mut argmax: i64 = -1;
            for &rr in &xrows {
                let r = rr as usize;
                if lu.pinv[r] < 0 {
                    let v = x[r].abs();
                    if v > maxabs || (v == maxabs && maxabs > 0.0 && (r as i64) < argmax) {
                        maxabs = v;
                        argmax = r as i64;
                    }
                }
            }
            if maxabs == 0.0 {
                // restore workspace before bailing out
                for &rr in &xrows {
                    x[rr as usize] = 0.0;
                }
                return Err(SparseError::SingularMatrix(j));
            }
            let dcand = lu.colorder[j] as usize;
            let prow = if lu.pinv[dcand] < 0 && mark[dcand] == stamp && x[dcand].abs() >= thresh * maxabs && x[dcand] != 0.0
            {
                dcand
            } else {
                argmax as usize
            };
            let piv = x[prow];
            lu.pivrow[j] = prow as u32;
            lu.pinv[prow] = j as i64;
            lu.u_diag[j] = piv;

            // gather U (pivoted rows) and L (remaining rows, scaled)
            for &kk in reach.iter() {
                let k = kk as usize;
                let v = x[lu.pivrow[k] as usize];
                if v != 0.0 {
                    lu.u_rows.push(kk);
                    lu.u_vals.push(v);
                }
            }
            lu.u_ptr[j + 1] = lu.u_rows.len();
            for &rr in &xrows {
                let r = rr as usize;
                if lu.pinv[r] < 0 && x[r] != 0.0 {
                    lu.l_rows.push(rr);
                    lu.l_vals.push(x[r] / piv);
                }
                x[r] = 0.0;
            }
            lu.l_ptr[j + 1] = lu.l_rows.len();
        }
        Ok(lu)
    }

    /// Triangular solves; panics only on length mismatch.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y: Vec<f64> = (0..n).map(|k| b[self.pivrow[k] as usize]).collect();
        for k in 0..n {
            let yk = y[k];
            if yk != 0.0 {
                for t in self.l_ptr[k]..self.l_ptr[k + 1] {
                    let r = self.l_rows[t] as usize;
                    y[self.pinv[r] as usize] -= self.l_vals[t] * yk;
                }
            }
        }
        for j in (0..n).rev() {
            let yj = y[j] / self.u_diag[j];
            y[j] = yj;
            if yj != 0.0 {
                for t in self.u_ptr[j]..self.u_ptr[j + 1] {
                    y[self.u_rows[t] as usize] -= self.u_vals[t] * yj;
                }
            }
        }
        let mut out = vec![0.0; n];
        for j in 0..n {
            out[self.colorder[j] as usize] = y[j];
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.l_rows.len() + self.u_rows.len() + self.n
    }
}
