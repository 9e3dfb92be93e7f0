use bmzfem::bubbles::*;
#[test]
fn deep_hierarchy() {
    let cache = BubbleCache::new();
    for eh in [1e-1f64, 1e-2, 1e-3, 1e-4, 1e-5] {
        let t0 = std::time::Instant::now();
        let dom = SubDomain { aspect: Aspect::Element, h_loc: 1.0, eps_hat: eh };
        let b = solve_bubble(&dom, &RhsClass::Constant(1.0), [-1.0, 0.0], 10, &cache).unwrap();
        let min = b.vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let j = b.ny / 2;
        let v1 = b.vals[j * (b.nx + 1) + 1];
        println!("eps_hat={eh:7.0e}: depth={} sup={:.4} min={:+.1e} v(0.1,0.5)={:.4} t={:?}",
                 b.depth, b.sup_norm(), min, v1, t0.elapsed());
    }
    // rfbe at 1e-3
    let rb = rfbe_bubble(Aspect::VPatch, 1e-3, [-1.0, 0.0], 10, &cache).unwrap();
    println!("rfbe vpatch sup={:.4} depth={}", rb.sup_norm(), rb.depth);
    let rb2 = rfbe_bubble(Aspect::HPatch, 1e-3, [-1.0, 0.0], 10, &cache).unwrap();
    println!("rfbe hpatch sup={:.3} (1/(8e)={:.3}) depth={}", rb2.sup_norm(), 1.0/(8.0*1e-3), rb2.depth);
    println!("fields cached: {}", cache.len());
}

mod common;
use common::{shishkin_nodes, TensorGalerkin};

#[test]
fn classes_vs_fine_oracle_after_fix() {
    let wind = [-1.0, 0.0];
    let zoom = 10usize;
    let cache = BubbleCache::new();
    let eh = 1e-2f64;
    let fine = 192;
    let xs = shishkin_nodes(fine, 1.0, eh, true, false);
    let ys = shishkin_nodes(fine, 1.0, eh.sqrt(), true, true);
    let mut worst_all = 0.0f64;
    for k in 1..=4u8 {
        let f = move |x: f64, y: f64| match k {
            1 => (1.0 - x) * (1.0 - y),
            2 => x * (1.0 - y),
            3 => x * y,
            _ => (1.0 - x) * y,
        };
        let orc = TensorGalerkin::solve(&xs, &ys, eh, wind, &f, None);
        let dom = SubDomain { aspect: Aspect::Element, h_loc: 1.0, eps_hat: eh };
        let b = solve_bubble(&dom, &RhsClass::NodalQ1(k), wind, zoom, &cache).unwrap();
        for j in 0..=b.ny {
            for i in 0..=b.nx {
                let (x, y) = (i as f64 / zoom as f64, j as f64 / zoom as f64);
                let d = (b.vals[j * (b.nx + 1) + i] - orc.eval(x, y)).abs();
                worst_all = worst_all.max(d);
            }
        }
    }
    println!("worst class-vs-oracle diff: {worst_all:.5}");
    assert!(worst_all < 5e-3);
    // exact linearity: Const == sum of nodal classes
    let dom = SubDomain { aspect: Aspect::Element, h_loc: 1.0, eps_hat: eh };
    let c = solve_bubble(&dom, &RhsClass::Constant(1.0), wind, zoom, &cache).unwrap();
    let parts: Vec<_> = (1..=4u8)
        .map(|k| solve_bubble(&dom, &RhsClass::NodalQ1(k), wind, zoom, &cache).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for n in 0..c.vals.len() {
        let s: f64 = parts.iter().map(|p| p.vals[n]).sum();
        worst = worst.max((c.vals[n] - s).abs());
    }
    println!("linearity residual: {worst:.2e}");
    assert!(worst < 1e-13);
}
