//! Minimum-degree fill-reducing ordering on the quotient graph of the
//! symmetrized pattern, with element absorption.

use super::CsrMatrix;

/// Elimination order for the symmetric pattern of A + A^T.
pub fn min_degree(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n_rows;
    if n == 0 {
        return Vec::new();
    }

    // symmetrized adjacency without the diagonal
    let mut deg = vec![0usize; n];
    for i in 0..n {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            let j = a.col_idx[k] as usize;
            if i != j {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    let mut adj: Vec<Vec<u32>> = deg.iter().map(|&d| Vec::with_capacity(d)).collect();
    for i in 0..n {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            let j = a.col_idx[k] as usize;
            if i != j {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
    }
    let mut stamp = vec![0u32; n];
    let mut cur_stamp = 0u32;
    for (i, list) in adj.iter_mut().enumerate() {
        cur_stamp += 1;
        stamp[i] = cur_stamp;
        list.retain(|&v| {
            let keep = stamp[v as usize] != cur_stamp;
            stamp[v as usize] = cur_stamp;
            keep
        });
    }

    const ACTIVE: u8 = 0;
    const ELEMENT: u8 = 1; // eliminated, representing a live clique
    const ABSORBED: u8 = 2; // eliminated, clique merged into another element
    let mut state = vec![ACTIVE; n];
    // boundary variables of live elements, reusing the adjacency storage
    let mut elem_vars: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut elems: Vec<Vec<u32>> = vec![Vec::new(); n];

    // degree buckets with lazy revalidation
    let mut degree: Vec<usize> = adj.iter().map(|l| l.len()).collect();
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); n.max(1)];
    for v in 0..n {
        buckets[degree[v].min(n - 1)].push(v as u32);
    }
    let mut bucket_of: Vec<usize> = degree.iter().map(|&d| d.min(n - 1)).collect();

    let mut order = Vec::with_capacity(n);
    let mut reach: Vec<u32> = Vec::new();
    let mut cur = 0usize;

    for _ in 0..n {
        // pop the minimum-degree active node, skipping stale bucket entries
        let v = loop {
            while cur < n && buckets[cur].is_empty() {
                cur += 1;
            }
            let cand = buckets[cur].pop().unwrap() as usize;
            if state[cand] == ACTIVE && bucket_of[cand] == cur {
                break cand;
            }
        };

        // reach(v): adjacent variables plus boundaries of adjacent elements
        cur_stamp += 1;
        stamp[v] = cur_stamp;
        reach.clear();
        for &u in &adj[v] {
            let u = u as usize;
            if state[u] == ACTIVE && stamp[u] != cur_stamp {
                stamp[u] = cur_stamp;
                reach.push(u as u32);
            }
        }
        for &e in &elems[v] {
            let e = e as usize;
            if state[e] != ELEMENT {
                continue;
            }
            for &u in &elem_vars[e] {
                let u = u as usize;
                if state[u] == ACTIVE && stamp[u] != cur_stamp {
                    stamp[u] = cur_stamp;
                    reach.push(u as u32);
                }
            }
        }

        // v becomes an element; its previous elements are absorbed
        order.push(v);
        state[v] = ELEMENT;
        for &e in &elems[v] {
            let e = e as usize;
            if state[e] == ELEMENT {
                state[e] = ABSORBED;
                elem_vars[e] = Vec::new();
            }
        }
        elems[v] = Vec::new();
        adj[v] = Vec::new();
        elem_vars[v] = reach.clone();

        // update the boundary variables: prune edges covered by the new
        // element, attach the element, recompute degrees
        for &uu in &reach {
            let u = uu as usize;
            // stamp still marks reach(v) ∪ {v}
            adj[u].retain(|&w| state[w as usize] == ACTIVE && stamp[w as usize] != cur_stamp);
            elems[u].retain(|&e| state[e as usize] == ELEMENT);
            elems[u].push(v as u32);
        }
        for &uu in &reach {
            let u = uu as usize;
            let marker = {
                cur_stamp += 1;
                cur_stamp
            };
            stamp[u] = marker;
            let mut d = 0usize;
            for &w in &adj[u] {
                let w = w as usize;
                if state[w] == ACTIVE && stamp[w] != marker {
                    stamp[w] = marker;
                    d += 1;
                }
            }
            for &e in &elems[u] {
                for &w in &elem_vars[e as usize] {
                    let w = w as usize;
                    if state[w] == ACTIVE && stamp[w] != marker {
                        stamp[w] = marker;
                        d += 1;
                    }
                }
            }
            degree[u] = d;
            let b = d.min(n - 1);
            bucket_of[u] = b;
            buckets[b].push(u as u32);
            if b < cur {
                cur = b;
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{compress, Triplets};

    fn grid_laplacian(nx: usize, ny: usize) -> CsrMatrix {
        let n = nx * ny;
        let mut t = Triplets::new(n, n);
        for y in 0..ny {
            for x in 0..nx {
                let i = y * nx + x;
                t.push(i, i, 4.0);
                if x + 1 < nx {
                    t.push(i, i + 1, -1.0);
                    t.push(i + 1, i, -1.0);
                }
                if y + 1 < ny {
                    t.push(i, i + nx, -1.0);
                    t.push(i + nx, i, -1.0);
                }
            }
        }
        compress(&t).unwrap()
    }

    #[test]
    fn order_is_a_permutation() {
        let a = grid_laplacian(13, 7);
        let ord = min_degree(&a);
        let mut seen = vec![false; a.n_rows];
        for &v in &ord {
            assert!(!seen[v]);
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn corner_eliminated_before_center() {
        // on a grid, corners have degree 2 and go first
        let a = grid_laplacian(5, 5);
        let ord = min_degree(&a);
        let first = ord[0];
        let (x, y) = (first % 5, first / 5);
        assert!((x == 0 || x == 4) && (y == 0 || y == 4));
    }
}
