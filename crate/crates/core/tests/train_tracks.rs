use std::sync::Arc;

use proptest::prelude::*;
use ttforge::fixtures;
use ttforge::graph::Reduction;
use ttforge::random::{case_rng, random_graph, random_immersed_map, random_train_track, CorpusBounds};
use ttforge::traintrack::{
    find_invariant_subgraph, is_expanding, is_invariant, is_irreducible, is_train_track, iterates_immersed,
    pf_eigenvalue, transition_matrix, TransitionMatrix,
};
use ttforge::GraphMap;

/// Characteristic polynomial coefficients `c₀..cₙ` (monic, `cₙ = 1`) by
/// Faddeev–LeVerrier over exact integers.
fn char_poly(a: &[Vec<u64>]) -> Vec<i128> {
    let n = a.len();
    let a: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mul = |x: &Vec<Vec<i128>>, y: &Vec<Vec<i128>>| -> Vec<Vec<i128>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
    };
    let mut c = vec![0i128; n + 1];
    c[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        let mut am = mul(&a, &m);
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += c[n + 1 - k];
        }
        m = am;
        let am = mul(&a, &m);
        let trace: i128 = (0..n).map(|i| am[i][i]).sum();
        c[n - k] = -trace / k as i128;
    }
    c
}

/// Largest real root, found by scanning down from the maximal row sum and
/// bisecting at the first sign change.
fn largest_root(c: &[i128], rows: &[Vec<u64>]) -> f64 {
    let p = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci as f64);
    let mut hi = rows.iter().map(|r| r.iter().sum::<u64>()).max().unwrap() as f64 + 1.0;
    let step = 1e-3;
    let mut lo = hi - step;
    while p(lo) > 0.0 {
        hi = lo;
        lo -= step;
    }
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Whether every edge length grows, read off saturating powers of the
/// transition matrix.
fn expanding_oracle(rows: &[Vec<u64>]) -> bool {
    const CAP: u128 = 1 << 100;
    let n = rows.len();
    let step = |len: &Vec<u128>| -> Vec<u128> {
        (0..n)
            .map(|i| (0..n).fold(0u128, |s, j| s.saturating_add((rows[i][j] as u128).saturating_mul(len[j]))).min(CAP))
            .collect()
    };
    let mut len = vec![1u128; n];
    for _ in 0..2 * n + 720 {
        len = step(&len);
    }
    let early = len.clone();
    for _ in 0..720 {
        len = step(&len);
    }
    (0..n).all(|i| len[i] == CAP || len[i] > early[i])
}

fn arbitrary_map(seed: u64) -> GraphMap {
    let mut rng = case_rng(seed, 3);
    loop {
        let g = Arc::new(random_graph(&mut rng, &CorpusBounds::default()));
        if let Some(f) = random_immersed_map(&mut rng, &g, 4) {
            return f;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pf_matches_characteristic_polynomial(seed in any::<u64>()) {
        let f = random_train_track(&mut case_rng(seed, 4), &CorpusBounds::default());
        let a = transition_matrix(&f).unwrap();
        let rows = a.to_u64_rows();
        let pf = pf_eigenvalue(&a).unwrap();
        let oracle = largest_root(&char_poly(&rows), &rows);
        prop_assert!((pf.value - oracle).abs() < 1e-7, "{} vs {}", pf.value, oracle);
        prop_assert!(pf.lower <= pf.value && pf.value <= pf.upper);
    }

    #[test]
    fn expansion_matches_iteration(seed in any::<u64>()) {
        let f = arbitrary_map(seed);
        let rows = transition_matrix(&f).unwrap().to_u64_rows();
        let e = is_expanding(&f).unwrap();
        prop_assert_eq!(e.expanding, expanding_oracle(&rows));
        prop_assert_eq!(e.expanding, e.bounded.is_none());
    }

    #[test]
    fn train_track_iterates_stay_immersed(seed in any::<u64>()) {
        let f = random_train_track(&mut case_rng(seed, 5), &CorpusBounds::default());
        prop_assert!(is_train_track(&f).is_ok());
        let f3 = f.power(3, Reduction::Keep).unwrap();
        for e in f.domain().edges() {
            let img = f3.edge_image(e);
            prop_assert!(img.windows(2).all(|w| w[1] != w[0].inverse()));
        }
        prop_assert!(iterates_immersed(&f, 4));
    }

    #[test]
    fn invariant_subgraph_witnesses_reducibility(seed in any::<u64>()) {
        let f = arbitrary_map(seed);
        let a = transition_matrix(&f).unwrap();
        let irreducible = is_irreducible(&a).irreducible;
        match find_invariant_subgraph(&f) {
            Some(w) => {
                prop_assert!(!irreducible);
                prop_assert!(is_invariant(&f, &w.edges));
            }
            None => prop_assert!(irreducible),
        }
    }
}

#[test]
fn golden_ratio_and_doubling() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let fib = pf_eigenvalue(&transition_matrix(&fixtures::fib()).unwrap()).unwrap();
    assert!((fib.value - phi).abs() < 1e-9);
    let sigma = pf_eigenvalue(&transition_matrix(&fixtures::sigma()).unwrap()).unwrap();
    assert!((sigma.value - 2.0).abs() < 1e-9);
}

#[test]
fn char_poly_oracle_sanity() {
    let rows = TransitionMatrix::from_rows(vec![vec![0, 1], vec![1, 1]]).to_u64_rows();
    assert_eq!(char_poly(&rows), vec![-1, -1, 1]);
}

#[test]
fn triangular_map_is_not_expanding() {
    let e = is_expanding(&fixtures::triangular()).unwrap();
    assert!(!e.expanding);
    assert!(!expanding_oracle(&transition_matrix(&fixtures::triangular()).unwrap().to_u64_rows()));
}
