use bmzfem::sparse::*;

fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let (p, mx) = (k..n).map(|r| (r, a[r][k].abs())).max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if mx == 0.0 { return None; }
        a.swap(k, p); b.swap(k, p);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n { a[r][c] -= f * a[k][c]; }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in k + 1..n { s -= a[k][c] * x[c]; }
        x[k] = s / a[k][k];
    }
    Some(x)
}

#[test]
fn lu_stress_random() {
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut rnd = move || { state ^= state << 13; state ^= state >> 7; state ^= state << 17; (state >> 11) as f64 / (1u64 << 53) as f64 };
    for trial in 0..30 {
        let n = 30 + (trial * 17) % 170;
        let mut t = Triplets::new(n, n);
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            t.push(i, i, 2.0 + rnd());
            d[i][i] += 0.0; // will be set below through the same entries
        }
        // rebuild dense alongside
        let mut t2 = Triplets::new(n, n);
        let mut add = |tt: &mut Triplets, dd: &mut Vec<Vec<f64>>, i: usize, j: usize, v: f64| { tt.push(i, j, v); dd[i][j] += v; };
        let mut d2 = vec![vec![0.0; n]; n];
        for i in 0..n {
            add(&mut t2, &mut d2, i, i, 2.0 + rnd());
            let nn = 3 + (i % 5);
            for _ in 0..nn {
                let j = (rnd() * n as f64) as usize % n;
                let v = 2.0 * rnd() - 1.0;
                add(&mut t2, &mut d2, i, j, v);
            }
        }
        let _ = (t, d);
        let a = compress(&t2).unwrap();
        let b: Vec<f64> = (0..n).map(|_| 2.0 * rnd() - 1.0).collect();
        let x = solve_linear(&a, &b, &SolveOptions::default()).unwrap();
        let xd = dense_solve(d2, b.clone()).unwrap();
        let err: f64 = x.iter().zip(&xd).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let scale: f64 = xd.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(err < 1e-8 * scale.max(1.0), "trial {trial} n={n}: err {err:e} scale {scale:e}");
    }
}
