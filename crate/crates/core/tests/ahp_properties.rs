use fqfd_core::ahp::{
    aggregate_group, analyze_hierarchy, consistency, derive_weights, derive_weights_with, principal_eigen,
    random_index, synthesize, Hierarchy, PairwiseMatrix, PowerIteration, SynthesisOptions, WeightMethod, SAATY_SCALE,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn ids(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("E{k}")).collect()
}

fn weights(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    n.prop_flat_map(|n| prop::collection::vec(0.05..10.0f64, n))
}

fn saaty_matrix(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PairwiseMatrix> {
    n.prop_flat_map(|n| {
        prop::collection::vec(0..SAATY_SCALE.len(), n * (n - 1) / 2).prop_map(move |steps| {
            let mut rows = vec![vec![1.0; n]; n];
            let mut it = steps.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let v = SAATY_SCALE[it.next().unwrap()];
                    rows[i][j] = v;
                    rows[j][i] = 1.0 / v;
                }
            }
            PairwiseMatrix::from_rows(ids(n), rows).unwrap()
        })
    })
}

fn dense_lambda_max(m: &PairwiseMatrix) -> f64 {
    let n = m.n();
    let dense = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    dense.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn consistent_matrices_recover_their_weights(w in weights(2..=9)) {
        let m = PairwiseMatrix::from_weights(ids(w.len()), &w).unwrap();
        let want = normalized(&w);
        for method in [WeightMethod::Eigenvector, WeightMethod::Rowgeomean] {
            let got = derive_weights_with(&m, method, &PowerIteration::default()).unwrap();
            for (g, e) in got.weights.iter().zip(&want) {
                prop_assert!((g - e).abs() < 1e-6, "{method}: {g} vs {e}");
            }
        }
        let c = consistency(&m).unwrap();
        prop_assert!(c.cr.abs() < 1e-9);
        prop_assert!(c.acceptable);
    }

    #[test]
    fn weights_are_positive_and_sum_to_one(m in saaty_matrix(1..=9)) {
        let w = derive_weights(&m).unwrap();
        prop_assert!(w.weights.iter().all(|&v| v > 0.0));
        prop_assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_max_bounds_and_index(m in saaty_matrix(1..=9)) {
        let n = m.n() as f64;
        let c = consistency(&m).unwrap();
        prop_assert!(c.lambda_max >= n - 1e-9);
        if m.n() <= 2 {
            prop_assert_eq!(c.ci, 0.0);
            prop_assert_eq!(c.cr, 0.0);
        } else {
            prop_assert!((c.ci - (c.lambda_max - n) / (n - 1.0)).abs() < 1e-12);
            prop_assert!((c.cr - c.ci / random_index(m.n())).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_max_matches_dense_eigensolver(m in saaty_matrix(3..=6)) {
        let got = principal_eigen(&m, &PowerIteration::default()).unwrap().lambda_max;
        let want = dense_lambda_max(&m);
        prop_assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }

    #[test]
    fn weights_follow_element_permutations(m in saaty_matrix(2..=7), seed in any::<u64>()) {
        let n = m.n();
        let mut order: Vec<usize> = (0..n).collect();
        // Fisher-Yates driven by the seed keeps the strategy simple.
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let base = derive_weights(&m).unwrap();
        let perm = derive_weights(&m.permuted(&order)).unwrap();
        for (k, &src) in order.iter().enumerate() {
            prop_assert!((perm.weights[k] - base.weights[src]).abs() < 1e-9);
            prop_assert_eq!(&perm.element_ids[k], &base.element_ids[src]);
        }
    }

    #[test]
    fn group_of_consistent_matrices_is_consistent(w1 in weights(4..=4), w2 in weights(4..=4), w3 in weights(4..=4)) {
        let ms: Vec<_> = [&w1, &w2, &w3].iter().map(|w| PairwiseMatrix::from_weights(ids(4), w).unwrap()).collect();
        let g = aggregate_group(&ms).unwrap();
        let geo: Vec<f64> = (0..4).map(|i| (w1[i] * w2[i] * w3[i]).cbrt()).collect();
        let want = normalized(&geo);
        let got = derive_weights(&g).unwrap();
        for (a, b) in got.weights.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((g.get(i, j) * g.get(j, i) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn aggregating_identical_matrices_is_identity(m in saaty_matrix(2..=6)) {
        let g = aggregate_group(&[m.clone(), m.clone(), m.clone()]).unwrap();
        for i in 0..m.n() {
            for j in 0..m.n() {
                prop_assert!((g.get(i, j) - m.get(i, j)).abs() <= 1e-12 * m.get(i, j));
            }
        }
    }

    #[test]
    fn synthesis_sums_to_one_and_ignores_criteria_order(
        cw in weights(3..=3),
        l in prop::collection::vec(weights(5..=5), 3),
        rotate in 0usize..3,
    ) {
        let criteria = PairwiseMatrix::from_weights(ids(3), &cw).unwrap();
        let local: Vec<_> = l.iter().map(|w| PairwiseMatrix::from_weights(ids(5), w).unwrap()).collect();
        let h = Hierarchy::new(criteria, local).unwrap();
        let opts = SynthesisOptions::default();
        let g = synthesize(&h, &opts).unwrap();
        prop_assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);

        let order: Vec<usize> = (0..3).map(|k| (k + rotate) % 3).collect();
        let g2 = synthesize(&h.with_criteria_order(&order), &opts).unwrap();
        for (a, b) in g.weights.iter().zip(&g2.weights) {
            prop_assert!((a - b).abs() < 1e-9);
        }

        let ncw = normalized(&cw);
        for k in 0..5 {
            let want: f64 = (0..3).map(|c| ncw[c] * normalized(&l[c])[k]).sum();
            prop_assert!((g.weights[k] - want).abs() < 1e-6);
        }
    }
}

#[test]
fn inconsistent_hierarchy_is_refused_unless_allowed() {
    let bad =
        PairwiseMatrix::from_rows(ids(3), vec![vec![1.0, 3.0, 0.5], vec![1.0 / 3.0, 1.0, 4.0], vec![2.0, 0.25, 1.0]])
            .unwrap();
    let local = vec![PairwiseMatrix::identity(ids(2)).unwrap(); 3];
    let h = Hierarchy::new(bad, local).unwrap();
    let strict = SynthesisOptions::default();
    assert_eq!(synthesize(&h, &strict).unwrap_err().code(), "InconsistentInput");
    let a = analyze_hierarchy(&h, &strict).unwrap();
    assert!(a.global.is_none());
    assert_eq!(a.inconsistent().count(), 1);
    let lenient = SynthesisOptions { allow_inconsistent: true, ..strict };
    let w = synthesize(&h, &lenient).unwrap();
    assert!((w.weights[0] - 0.5).abs() < 1e-12);
}
