//! Property tests for the spline, quadrature and gauging invariants.

use hbgauge::bspline::{KnotVector, UnivariateSpace};
use hbgauge::config::ExperimentConfig;
use hbgauge::gauging::verify_level_tree;
use hbgauge::hierarchy::{check_admissibility, CellBox, HierarchicalMesh};
use hbgauge::pipeline::execute;
use hbgauge::quadrature::gauss_on;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Open knot vector of degree `p` with random interior knots (simple, well separated).
fn knot_vector() -> impl Strategy<Value = KnotVector> {
    (1usize..=3, prop::collection::vec(0.02f64..0.98, 1..7)).prop_map(|(p, mut interior)| {
        interior.sort_by(f64::total_cmp);
        interior.dedup_by(|a, b| (*a - *b).abs() < 0.02);
        let mut knots = vec![0.0; p + 1];
        knots.extend(interior);
        knots.extend(std::iter::repeat_n(1.0, p + 1));
        KnotVector::new(p, knots).unwrap()
    })
}

fn combination(space: &UnivariateSpace, coeffs: &[f64], x: f64, deriv: usize) -> f64 {
    let b = space.eval_basis(x, deriv).unwrap();
    b.indices().zip(&b.values).map(|(i, v)| coeffs[i] * v).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_basis_is_a_partition_of_unity(kv in knot_vector(), x in 0.0f64..=1.0) {
        let s = UnivariateSpace::standard(kv);
        let b = s.eval_basis(x, 0).unwrap();
        prop_assert!((b.values.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        prop_assert!(b.values.iter().all(|&v| v >= -1e-15));
    }

    #[test]
    fn derivative_maps_into_curry_schoenberg_differences(
        kv in knot_vector(),
        x in 0.0f64..=1.0,
        seed in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let s = UnivariateSpace::standard(kv.clone());
        let d = UnivariateSpace::curry_schoenberg(kv);
        let c = &seed[..s.dim()];
        let diffs: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
        let lhs = combination(&s, c, x, 1);
        let rhs = combination(&d, &diffs, x, 0);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn derivatives_match_finite_differences(kv in knot_vector(), t in 0.0f64..1.0) {
        let s = UnivariateSpace::standard(kv);
        let bp = s.breakpoints().to_vec();
        // stay inside one element so the spline is smooth around x
        let e = ((t * s.num_elements() as f64) as usize).min(s.num_elements() - 1);
        let (a, b) = (bp[e], bp[e + 1]);
        let x = a + (0.25 + 0.5 * t.fract()) * (b - a);
        let h = 1e-6 * (b - a);
        for i in s.functions_on_element(e) {
            let fd = (s.eval_single(i, x + h, 0).unwrap() - s.eval_single(i, x - h, 0).unwrap()) / (2.0 * h);
            let exact = s.eval_single(i, x, 1).unwrap();
            prop_assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "function {i}: {fd} vs {exact}");
        }
    }

    #[test]
    fn greville_abscissae_reproduce_linears(kv in knot_vector(), x in 0.0f64..=1.0) {
        let s = UnivariateSpace::standard(kv);
        let g = s.greville_abscissae().unwrap();
        prop_assert!((combination(&s, &g, x, 0) - x).abs() < 1e-13);
    }

    #[test]
    fn dyadic_refinement_is_nested(kv in knot_vector(), x in 0.0f64..=1.0, cs in any::<bool>()) {
        let make = if cs { UnivariateSpace::curry_schoenberg } else { UnivariateSpace::standard };
        let coarse = make(kv.clone());
        let fine = make(kv.dyadic_refine());
        let rows = coarse.refinement_coefficients(&fine).unwrap();
        for (c, row) in rows.iter().enumerate() {
            let lhs = coarse.eval_single(c, x, 0).unwrap();
            let rhs: f64 = row.iter().map(|&(m, r)| r * fine.eval_single(m, x, 0).unwrap()).sum();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn greville_collocation_is_nonsingular(kv in knot_vector()) {
        let s = UnivariateSpace::standard(kv);
        let g = s.greville_abscissae().unwrap();
        let n = s.dim();
        let mut a = DMatrix::zeros(n, n);
        for (r, &x) in g.iter().enumerate() {
            for i in 0..n {
                a[(r, i)] = s.eval_single(i, x, 0).unwrap();
            }
        }
        prop_assert_eq!(a.rank(1e-10), n);
    }

    #[test]
    fn gauss_rule_is_exact_to_degree_2n_minus_1(
        n in 1usize..8,
        a in -2.0f64..0.0,
        len in 0.1f64..3.0,
        coeffs in prop::collection::vec(-1.0f64..1.0, 16),
    ) {
        let b = a + len;
        let c = &coeffs[..2 * n];
        let (x, w) = gauss_on(n, a, b);
        let quad: f64 = x.iter().zip(&w).map(|(&x, &w)| w * c.iter().rev().fold(0.0, |acc, &k| acc * x + k)).sum();
        let exact: f64 = c
            .iter()
            .enumerate()
            .map(|(k, &ck)| ck * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k + 1) as f64)
            .sum();
        prop_assert!((quad - exact).abs() < 1e-11 * (1.0 + exact.abs()), "{quad} vs {exact}");
    }
}

/// Random two-level refinement: coarse-aligned boxes at least `p` coarse cells wide,
/// so each is a union of `X²` supports, optionally refined once more inside.
#[derive(Debug, Clone)]
struct RandomMesh {
    degree: usize,
    base: usize,
    refinement: Vec<Vec<CellBox>>,
}

fn coarse_box(degree: usize, base: usize) -> impl Strategy<Value = [usize; 4]> {
    (0..=base - degree, 0..=base - degree).prop_flat_map(move |(x0, y0)| {
        ((x0 + degree)..=base, (y0 + degree)..=base).prop_map(move |(x1, y1)| [x0, x1, y0, y1])
    })
}

fn random_mesh() -> impl Strategy<Value = RandomMesh> {
    (1usize..=3, 4usize..=6)
        .prop_flat_map(|(degree, base)| {
            (
                Just(degree),
                Just(base),
                prop::collection::vec(coarse_box(degree, base), 1..=2),
                prop::option::of(coarse_box(degree, 2 * base)),
            )
        })
        .prop_map(|(degree, base, level1, level2)| {
            let scale = |b: [usize; 4], f: usize| CellBox::new([f * b[0], f * b[1]], [f * b[2], f * b[3]]);
            let mut refinement = vec![level1.into_iter().map(|b| scale(b, 2)).collect::<Vec<_>>()];
            if let Some(b) = level2 {
                refinement.push(vec![scale(b, 2)]);
            }
            RandomMesh { degree, base, refinement }
        })
}

fn admissible(m: &RandomMesh) -> Option<HierarchicalMesh> {
    let mesh = HierarchicalMesh::build(m.degree, [m.base, m.base], &m.refinement).ok()?;
    check_admissibility(&mesh).passed().then_some(mesh)
}

fn experiment_config(m: &RandomMesh) -> ExperimentConfig {
    let refinement = serde_json::to_value(&m.refinement).unwrap();
    ExperimentConfig::from_json(
        &serde_json::json!({
            "degree": m.degree,
            "base_elements": [m.base, m.base],
            "levels": m.refinement.len(),
            "refinement": refinement,
        })
        .to_string(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, max_global_rejects: 4096, ..ProptestConfig::default() })]

    #[test]
    fn random_admissible_meshes_gauge_exactly(m in random_mesh()) {
        prop_assume!(admissible(&m).is_some());
        let e = execute(&experiment_config(&m)).unwrap();
        for (g, t) in e.graphs.iter().zip(&e.trees) {
            prop_assert!(verify_level_tree(g, t).is_ok());
        }
        let w = [0, 1, 2].map(|k| e.space.basis(k).len() as isize);
        prop_assert_eq!(w[0] - w[1] + w[2], 1, "Euler characteristic of the discrete complex");
        prop_assert_eq!(e.multilevel.len() as isize, w[0]);
        prop_assert_eq!(e.ungauged.zero_count, e.multilevel.len());
        prop_assert_eq!(e.gauged.zero_count, 0);
        prop_assert!(e.comparison.max_rel_diff() < 1e-8, "max rel diff {:e}", e.comparison.max_rel_diff());
    }
}
