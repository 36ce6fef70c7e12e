mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use revcheck::{
    build_support, generate_reversible, is_irreducible, is_symmetric, is_zero_pattern_symmetric,
    oracle_check, period, spanning_tree, stationary_balance, stationary_detailed, symmetrize_check,
    three_loop_check, verify_detailed_balance, GeneratorConfig, Scalable, SquareMatrix,
    TransitionMatrix, Verdict, WorkMatrix,
};

/// Mixed corpus: reversible, perturbed, asymmetric-zero and fully random.
fn corpus_matrix(n: usize, seed: u64) -> TransitionMatrix {
    let mut rng = rng(seed);
    match rng.gen_range(0..4) {
        0 => random_reversible(n, &mut rng),
        1 => {
            let p = random_reversible(n, &mut rng);
            perturb(&p, &mut rng)
        }
        2 => {
            let p = random_reversible(n, &mut rng);
            break_zero_symmetry(&p, &mut rng).unwrap_or(p)
        }
        _ => {
            let density = rng.gen_range(0.3..1.0);
            random_irreducible(n, density, &mut rng)
        }
    }
}

/// Reachability by Warshall's transitive closure.
fn closure_irreducible(p: &TransitionMatrix) -> bool {
    let n = p.n();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || p.get(i, j) > 0.0).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                reach[i][j] |= reach[i][k] && reach[k][j];
            }
        }
    }
    reach.iter().all(|r| r.iter().all(|&x| x))
}

fn any_chain(max_n: usize) -> impl Strategy<Value = (usize, u64)> {
    (3..=max_n, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetry_is_transpose_invariant(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..2.0) }).collect())
            .collect();
        let w = WorkMatrix::from_rows(m).unwrap();
        let tol = Default::default();
        prop_assert_eq!(is_symmetric(&w, &tol), is_symmetric(&w.transpose(), &tol));
    }

    #[test]
    fn symmetric_implies_zero_symmetric((n, seed) in any_chain(6)) {
        let p = random_symmetric(n, &mut rng(seed));
        prop_assert!(is_symmetric(&p, &p.tolerance()));
        prop_assert!(is_zero_pattern_symmetric(&p));
    }

    #[test]
    fn irreducibility_matches_transitive_closure(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut row: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.6) { 0.0 } else { rng.gen_range(0.1..1.0) }).collect();
                if row.iter().all(|&x| x == 0.0) {
                    row[rng.gen_range(0..n)] = 1.0;
                }
                let s: f64 = row.iter().sum();
                row.iter().map(|x| x / s).collect()
            })
            .collect();
        let p = TransitionMatrix::from_rows(m).unwrap();
        prop_assert_eq!(is_irreducible(&p), closure_irreducible(&p));
    }

    #[test]
    fn spanning_tree_exists_for_zero_symmetric_irreducible((n, seed) in any_chain(7)) {
        let p = random_reversible(n, &mut rng(seed));
        prop_assert!(is_irreducible(&p) && is_zero_pattern_symmetric(&p));
        let tree = spanning_tree(&build_support(&p), 0).unwrap();
        prop_assert_eq!(tree.edges().len(), n - 1);
    }

    #[test]
    fn positive_diagonal_means_aperiodic((n, seed) in any_chain(6)) {
        let p = corpus_matrix(n, seed);
        if (0..n).any(|i| p.get(i, i) > 0.0) {
            prop_assert_eq!(period(&p), Ok(1));
        }
    }

    #[test]
    fn oracle_verdict_is_relabeling_invariant((n, seed) in any_chain(6)) {
        let p = corpus_matrix(n, seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng(seed ^ 0xfeed));
        let q = p.permuted(&perm);
        prop_assert_eq!(oracle_check(&p).unwrap().verdict, oracle_check(&q).unwrap().verdict);
    }

    #[test]
    fn symmetric_matrices_are_reversible((n, seed) in any_chain(6)) {
        let p = random_symmetric(n, &mut rng(seed));
        prop_assert_eq!(oracle_check(&p).unwrap().verdict, Verdict::Reversible);
        prop_assert_eq!(symmetrize_check(&p).unwrap().verdict, Verdict::Reversible);
    }

    #[test]
    fn kelly_shortcut_matches_oracle((n, seed) in any_chain(6)) {
        let p = random_with_full_column(n, &mut rng(seed));
        prop_assert_eq!(three_loop_check(&p).unwrap().verdict, oracle_check(&p).unwrap().verdict);
    }

    #[test]
    fn symmetrizer_agrees_with_oracle((n, seed) in any_chain(7)) {
        let p = corpus_matrix(n, seed);
        let sym = symmetrize_check(&p).unwrap();
        prop_assert_eq!(sym.verdict, oracle_check(&p).unwrap().verdict);
        prop_assert!(sym.ops_count() < n);
        if sym.verdict == Verdict::NotReversible {
            match (&sym.witness, sym.zero_pair) {
                (Some(w), None) => prop_assert!(w.verifies_against(&p)),
                (None, Some((i, j))) => {
                    let tol = p.tolerance();
                    prop_assert!(tol.is_zero(p.get(i, j)) != tol.is_zero(p.get(j, i)));
                }
                other => prop_assert!(false, "bad certificate {:?}", other),
            }
        } else {
            prop_assert!(is_symmetric(sym.final_matrix.as_ref().unwrap(), &p.tolerance()));
        }
    }

    #[test]
    fn scaling_preserves_status_and_zeros((n, seed) in any_chain(6)) {
        let p = corpus_matrix(n, seed);
        let mut rng = rng(seed.wrapping_add(1));
        let i = rng.gen_range(0..n);
        let row = rng.gen_bool(0.5);
        let bound = if row { revcheck::max_row_factor(&p, i) } else { revcheck::max_col_factor(&p, i) }.unwrap();
        let c = bound * rng.gen_range(0.05..=1.0);
        let q = if row { p.apply_row_op(i, c) } else { p.apply_col_op(i, c) }.unwrap();

        for a in 0..n {
            let sum: f64 = q.row(a).iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(q.row(a).iter().all(|&x| x >= 0.0));
            for b in (0..n).filter(|&b| b != a) {
                prop_assert_eq!(p.get(a, b) > 0.0, q.get(a, b) > 0.0);
            }
        }
        prop_assert_eq!(oracle_check(&p).unwrap().verdict, oracle_check(&q).unwrap().verdict);
        prop_assert_eq!(symmetrize_check(&p).unwrap().verdict, symmetrize_check(&q).unwrap().verdict);
    }

    #[test]
    fn inverse_row_op_restores_off_diagonal((n, seed) in any_chain(6)) {
        let w = corpus_matrix(n, seed).to_work();
        let mut rng = rng(seed);
        let i = rng.gen_range(0..n);
        let c = rng.gen_range(0.01..100.0);
        let back = w.apply_row_op(i, c).unwrap().apply_row_op(i, 1.0 / c).unwrap();
        let tol = revcheck::Tolerance::default();
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                prop_assert!(tol.approx_eq(w.get(a, b), back.get(a, b)));
            }
        }
    }

    #[test]
    fn generated_matrices_are_reversible(n in 2usize..=7, ops_count in 0usize..=20, seed in any::<u64>()) {
        let zero_pairs = random_zero_pairs(n, &mut rng(seed));
        let g = generate_reversible(&GeneratorConfig { n, ops_count, seed, zero_pairs }).unwrap();
        prop_assert_eq!(oracle_check(&g.matrix).unwrap().verdict, Verdict::Reversible);
    }

    #[test]
    fn stationary_invariants((n, seed) in any_chain(7)) {
        let p = corpus_matrix(n, seed);
        let tol = p.tolerance();
        let balance = stationary_balance(&p).unwrap();
        prop_assert!(balance.residuals.global < n as f64 * (tol.abs_tol + tol.rel_tol));
        prop_assert!((balance.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let db = verify_detailed_balance(&p, &balance.pi).unwrap();
        match symmetrize_check(&p).unwrap().verdict {
            Verdict::Reversible => {
                prop_assert!(db.holds());
                let g = build_support(&p);
                for root in [0, n - 1] {
                    let tree = spanning_tree(&g, root).unwrap();
                    let detailed = stationary_detailed(&p, &tree).unwrap();
                    for (a, b) in detailed.pi.iter().zip(&balance.pi) {
                        prop_assert!((a - b).abs() < 10.0 * (tol.abs_tol + tol.rel_tol));
                    }
                }
            }
            Verdict::NotReversible => prop_assert!(!db.holds()),
        }
    }
}
