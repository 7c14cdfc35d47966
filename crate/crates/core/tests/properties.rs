mod common;

use common::*;
use gfmmd::spectral::{apply_filter_chebyshev, apply_filter_exact, ChebyshevFilter, FilterSpec};
use gfmmd::{build_knn_graph, normalize_signals, Engine, Gfmmd, Graph, KernelSpec, SignalMatrix};
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_signals(r: &mut ChaCha8Rng, n: usize, m: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, m), |_| r.gen_range(-1.0..1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_form_is_edge_sum(seed: u64, n in 2usize..40) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.2);
        let f: Array1<f64> = Array1::from_shape_fn(n, |_| r.gen_range(-3.0..3.0));
        let edge_sum: f64 = g
            .edges()
            .iter()
            .map(|e| e.weight * (f[e.a] - f[e.b]).powi(2))
            .sum();
        let q = g.laplacian().quadratic_form(f.view());
        prop_assert!(rel_err(q, edge_sum) <= 1e-12, "{} vs {}", q, edge_sum);
    }

    #[test]
    fn knn_adjacency_is_symmetric(seed: u64, n in 3usize..40, k in 1usize..6) {
        let mut r = rng(seed);
        let pts = Array2::from_shape_fn((n, 3), |_| r.gen_range(-2.0..2.0));
        let k = k.min(n - 1);
        for kernel in [KernelSpec::Gaussian { sigma: 0.7 }, KernelSpec::AdaptiveGaussian { k_bw: 1 }] {
            let g = build_knn_graph(pts.view(), k, kernel).unwrap();
            for a in 0..n {
                for &(b, w) in g.neighbors(a) {
                    prop_assert_eq!(g.weight(b, a).to_bits(), w.to_bits());
                }
            }
            // every vertex keeps at least its k nearest
            for a in 0..n {
                prop_assert!(g.neighbors(a).len() >= k);
            }
        }
    }

    #[test]
    fn gaussian_weights_decrease_with_distance(sigma in 0.1f64..5.0, d1 in 0.0f64..5.0, gap in 1e-6f64..5.0) {
        // three collinear points: 0 at the origin, 1 at d1, 2 at d1 + gap
        let pts = ndarray::array![[0.0], [d1], [-(d1 + gap)]];
        let g = build_knn_graph(pts.view(), 2, KernelSpec::Gaussian { sigma }).unwrap();
        prop_assert!(g.weight(0, 1) >= g.weight(0, 2));
    }

    #[test]
    fn components_ignore_vertex_order(seed: u64, n in 2usize..30) {
        let mut r = rng(seed);
        let edges: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .filter(|_| r.gen::<f64>() < 0.08)
            .map(|(a, b)| (a, b, 1.0))
            .collect();
        let g = Graph::from_edges(n, edges.iter().copied()).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut r);
        let h = Graph::from_edges(n, edges.iter().map(|&(a, b, w)| (perm[a], perm[b], w))).unwrap();
        let (cg, ch) = (g.connected_components(), h.connected_components());
        prop_assert_eq!(cg.count(), ch.count());
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(cg.same_component(a, b), ch.same_component(perm[a], perm[b]));
            }
        }
    }

    #[test]
    fn filters_are_linear(seed: u64, n in 2usize..30, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.2);
        let ctx = Gfmmd::new(g);
        let s1 = random_signals(&mut r, n, 2);
        let s2 = random_signals(&mut r, n, 2);
        let mix = &s1 * alpha + &s2 * beta;
        let dec = ctx.decomposition().unwrap();
        let heat = FilterSpec::Heat { tau: 0.7 };
        let fit = ChebyshevFilter::fit(heat, ctx.lambda_hat(), 30).unwrap();
        let exact = |s: &Array2<f64>| apply_filter_exact(dec, &heat, s.view()).unwrap();
        let cheb = |s: &Array2<f64>| apply_filter_chebyshev(ctx.laplacian(), &fit, s.view()).unwrap();
        for apply in [&exact as &dyn Fn(&Array2<f64>) -> Array2<f64>, &cheb] {
            let lhs = apply(&mix);
            let rhs = apply(&s1) * alpha + apply(&s2) * beta;
            let err = (&lhs - &rhs).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(err <= 1e-12, "{}", err);
        }
    }

    #[test]
    fn pseudoinverse_identity(seed: u64, n in 2usize..30) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.2);
        let ctx = Gfmmd::new(g);
        let mut f = random_signals(&mut r, n, 1);
        ctx.center(&mut f);
        let dec = ctx.decomposition().unwrap();
        let half = FilterSpec::InverseSqrt { epsilon: 0.0 };
        let twice = apply_filter_exact(dec, &half, apply_filter_exact(dec, &half, f.view()).unwrap().view()).unwrap();
        let back = ctx.laplacian().apply(twice.column(0));
        let err = (&back - &f.column(0)).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(err <= 1e-8, "{}", err);
    }

    #[test]
    fn chebyshev_matches_exact(seed: u64, n in 4usize..60) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.15);
        let ctx = Gfmmd::new(g);
        let mut s = random_signals(&mut r, n, 3);
        ctx.center(&mut s);
        let exact = ctx.feature_map(s.view(), &Engine::Exact).unwrap();
        let cheb = ctx.feature_map(s.view(), &Engine::chebyshev(512)).unwrap();
        let rel = (&cheb - &exact).mapv(|v| v * v).sum().sqrt() / exact.mapv(|v| v * v).sum().sqrt();
        prop_assert!(rel <= 0.01, "inverse sqrt rel err {}", rel);

        let heat = FilterSpec::Heat { tau: 1.5 };
        let fit = ChebyshevFilter::fit(heat, ctx.lambda_hat(), 50).unwrap();
        let a = apply_filter_chebyshev(ctx.laplacian(), &fit, s.view()).unwrap();
        let b = apply_filter_exact(ctx.decomposition().unwrap(), &heat, s.view()).unwrap();
        let rel = (&a - &b).mapv(|v| v * v).sum().sqrt() / b.mapv(|v| v * v).sum().sqrt();
        prop_assert!(rel <= 1e-8, "heat rel err {}", rel);
    }

    #[test]
    fn metric_axioms(seed: u64, n in 2usize..64) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.1);
        let ctx = Gfmmd::new(g);
        let p = random_distribution(&mut r, n);
        let q = random_distribution(&mut r, n);
        let s = random_distribution(&mut r, n);
        let d = |a: &Array1<f64>, b: &Array1<f64>| ctx.gfmmd(a.view(), b.view(), &Engine::Exact).unwrap();
        prop_assert_eq!(d(&p, &q).to_bits(), d(&q, &p).to_bits());
        prop_assert_eq!(d(&p, &p), 0.0);
        prop_assert!(d(&p, &q) >= 0.0);
        prop_assert!(d(&p, &s) <= d(&p, &q) + d(&q, &s) + 1e-8);
    }

    #[test]
    fn distances_equal_embedding_gaps(seed: u64, n in 2usize..40, m in 2usize..6) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.15);
        let ctx = Gfmmd::new(g);
        let cols: Vec<Array1<f64>> = (0..m).map(|_| random_distribution(&mut r, n)).collect();
        let mut raw = Array2::zeros((n, m));
        for (j, c) in cols.iter().enumerate() {
            raw.column_mut(j).assign(c);
        }
        let signals = normalize_signals(raw, SignalMatrix::default_labels(m)).unwrap();
        for engine in [Engine::Exact, Engine::chebyshev(64)] {
            let e = ctx.embed(&signals, &engine).unwrap();
            let dm = ctx.distances(&signals, &engine).unwrap();
            for i in 0..m {
                for j in 0..m {
                    let diff = &e.row(i) - &e.row(j);
                    let direct = ctx.gfmmd(signals.column(i), signals.column(j), &engine).unwrap();
                    prop_assert!((diff.dot(&diff).sqrt() - direct).abs() <= 1e-10);
                    prop_assert!((dm.get(i, j) - direct).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn scaling_weights_scales_distances(seed: u64, n in 2usize..30, c in 0.05f64..50.0) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.2);
        let p = random_distribution(&mut r, n);
        let q = random_distribution(&mut r, n);
        let base = Gfmmd::new(g.clone()).gfmmd(p.view(), q.view(), &Engine::Exact).unwrap();
        let scaled = Gfmmd::new(g.scaled(c).unwrap()).gfmmd(p.view(), q.view(), &Engine::Exact).unwrap();
        prop_assert!(rel_err(scaled, base / c.sqrt()) <= 1e-10, "{} vs {}", scaled, base / c.sqrt());
    }

    #[test]
    fn witness_attains_supremum(seed: u64, n in 2usize..30) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.2);
        let ctx = Gfmmd::new(g);
        let p = random_distribution(&mut r, n);
        let q = random_distribution(&mut r, n);
        prop_assume!(p != q);
        let d = ctx.gfmmd(p.view(), q.view(), &Engine::Exact).unwrap();
        let w = ctx.witness_function(p.view(), q.view()).unwrap();
        prop_assert!((w.gap - d).abs() <= 1e-8);
        let diff = &p - &q;
        for _ in 0..20 {
            let f = Array1::from_shape_fn(n, |_| r.gen_range(-1.0..1.0));
            let energy = ctx.laplacian().quadratic_form(f.view());
            let f = f / energy.sqrt();
            prop_assert!(diff.dot(&f) <= w.gap + 1e-8);
        }
    }

    #[test]
    fn distances_match_pseudoinverse_oracle(seed: u64, n in 2usize..30) {
        let mut r = rng(seed);
        let g = random_connected_graph(&mut r, n, 0.2);
        let p = random_distribution(&mut r, n);
        let q = random_distribution(&mut r, n);
        let d = Gfmmd::new(g.clone()).gfmmd(p.view(), q.view(), &Engine::Exact).unwrap();
        let oracle = squared_distance_oracle(&g, &p, &q).max(0.0).sqrt();
        prop_assert!(rel_err(d, oracle) <= 1e-8, "{} vs {}", d, oracle);
    }
}

#[test]
fn diffusion_lowers_localization_on_grid() {
    let ctx = Gfmmd::new(gfmmd::grid_graph(16, 16).unwrap());
    let scores: Vec<f64> = [1.0, 16.0, 256.0, 4096.0]
        .iter()
        .map(|&tau| {
            let h = ctx
                .heat_diffuse_dirac(7 * 16 + 3, tau, &Engine::Exact)
                .unwrap();
            ctx.localization_score(h.view(), &Engine::Exact).unwrap()
        })
        .collect();
    assert!(scores.windows(2).all(|w| w[0] > w[1]), "{scores:?}");
}

#[test]
fn chebyshev_error_shrinks_with_order_on_swiss_roll() {
    let data = gfmmd::bench::sample_swiss_roll(20, 20, 0.8, 10, 0).unwrap();
    let g = build_knn_graph(data.points.view(), 10, KernelSpec::default()).unwrap();
    let ctx = Gfmmd::new(g);
    let signals = data.cloud_distributions().unwrap();
    let exact = ctx.feature_map(signals.values(), &Engine::Exact).unwrap();
    let errors: Vec<f64> = [8, 64, 512]
        .iter()
        .map(|&order| {
            let c = ctx
                .feature_map(signals.values(), &Engine::chebyshev(order))
                .unwrap();
            (&c - &exact).mapv(|v| v * v).sum().sqrt()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
}
