mod common;

use common::*;
use rand::Rng;
use toda_polytope::sets::proper_subsets;
use toda_polytope::sieve::{boundary_limit_detailed, partition_from_direction};
use toda_polytope::{
    bfr, boundary_limit, examples, flow_limit, j_of_i, sieve, toda_action, DenseMatrix, Error,
    OrderedPartition, SpectralPair, TodaDirection, Tolerances,
};

fn direction(v: &[f64]) -> TodaDirection {
    TodaDirection::new(v.to_vec()).unwrap()
}

fn partition(n: usize, blocks: &[&[usize]]) -> OrderedPartition {
    OrderedPartition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
}

fn assert_sieve_invariants(m: &DenseMatrix, part: &OrderedPartition, tol: f64) {
    let dec = sieve(m, part, 1e-9).unwrap();
    let (q, r) = (&dec.q_sieved, &dec.r_upper);
    assert!((q * r).max_diff(m) <= tol, "reconstruction {:e}", (q * r).max_diff(m));
    for i in 0..r.rows() {
        assert!(r[(i, i)] != 0.0);
        for j in 0..i {
            assert_eq!(r[(i, j)], 0.0);
        }
    }
    let rows = part.blocks();
    let cols = dec.j_partition.blocks();
    assert_eq!(rows.len(), cols.len());
    for (alpha, (ri, cj)) in rows.iter().zip(cols).enumerate() {
        assert_eq!(ri.len(), cj.len());
        let block = q.select(ri, cj);
        assert!(block.orthogonality_defect() <= tol);
        for later in &cols[alpha + 1..] {
            assert!(q.select(ri, later).max_abs() <= tol);
        }
    }
    let mut all: Vec<usize> = cols.concat();
    all.sort_unstable();
    assert_eq!(all, (0..m.rows()).collect::<Vec<_>>());
}

#[test]
fn sieve_invariants_on_random_cases() {
    let mut rng = rng(101);
    for case in 0..50 {
        let n = 2 + case % 5;
        let m = random_matrix(n, &mut rng);
        let part = OrderedPartition::new(n, random_proper_partition(n, &mut rng)).unwrap();
        assert_sieve_invariants(&m, &part, 1e-10);
    }
}

#[test]
fn sieve_invariants_on_orthogonal_and_structured_inputs() {
    let mut rng = rng(102);
    for _ in 0..20 {
        let n = 3 + rng.gen_range(0..4);
        let part = OrderedPartition::new(n, random_proper_partition(n, &mut rng)).unwrap();
        assert_sieve_invariants(&random_orthogonal(n, &mut rng), &part, 1e-10);
    }
    let part = partition(3, &[&[1], &[0], &[2]]);
    assert_sieve_invariants(&examples::quadrilateral_q(), &part, 1e-12);
    assert_sieve_invariants(&examples::hexagon_q(), &part, 1e-12);
}

#[test]
fn single_block_sieve_matches_qr() {
    let mut rng = rng(103);
    let m = random_matrix(5, &mut rng);
    let dec = sieve(&m, &OrderedPartition::trivial(5), 1e-9).unwrap();
    let qr = toda_polytope::qr_pos(&m, 1e-9).unwrap();
    assert!(dec.q_sieved.max_diff(&qr.q) <= 1e-12);
    assert!(dec.r_upper.max_diff(&qr.r) <= 1e-12);
    assert_eq!(dec.j_partition.blocks(), &[vec![0, 1, 2, 3, 4]]);
}

#[test]
fn j_of_i_is_the_lexicographically_smallest_nonsingular_column_set() {
    let mut rng = rng(104);
    let mut matrices = vec![examples::hexagon_q(), examples::quadrilateral_q()];
    for n in 2..=6 {
        matrices.push(random_orthogonal(n, &mut rng));
        // Block-diagonal orthogonal matrices with a shuffled row order have
        // many vanishing minors.
        let k = n / 2;
        let a = random_orthogonal(k, &mut rng);
        let b = random_orthogonal(n - k, &mut rng);
        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                p.swap(i, rng.gen_range(0..=i));
            }
            p
        };
        matrices.push(DenseMatrix::from_fn(n, n, |i, j| {
            let r = perm[i];
            match (r < k, j < k) {
                (true, true) => a[(r, j)],
                (false, false) => b[(r - k, j - k)],
                _ => 0.0,
            }
        }));
    }
    for q in &matrices {
        for set in proper_subsets(q.rows()) {
            let j = j_of_i(q, &set, 1e-9).unwrap();
            assert_eq!(Some(j), brute_force_j(q, &set, 1e-9), "I = {set:?}");
        }
    }
}

#[test]
fn generic_orthogonal_matrices_have_leading_j_sets() {
    let mut rng = rng(105);
    for n in 2..=6 {
        let q = random_orthogonal(n, &mut rng);
        for set in proper_subsets(n) {
            let expected: Vec<usize> = (0..set.len()).collect();
            assert_eq!(j_of_i(&q, &set, 1e-9).unwrap(), expected);
        }
    }
}

#[test]
fn quadrilateral_j_sets() {
    // Only the pair {0, 1} has a vanishing leading minor.
    let q = examples::quadrilateral_q();
    for set in proper_subsets(3) {
        let j = j_of_i(&q, &set, 1e-9).unwrap();
        if set == [0, 1] {
            assert_eq!(j, vec![0, 2]);
        } else {
            assert_eq!(j, (0..set.len()).collect::<Vec<_>>());
        }
    }
}

#[test]
fn singular_input_is_rejected() {
    let m = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    let part = partition(2, &[&[0], &[1]]);
    assert!(matches!(sieve(&m, &part, 1e-9), Err(Error::SingularInput { .. })));
    let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[1.0, 2.0]]).unwrap();
    assert!(matches!(sieve(&m, &part, 1e-9), Err(Error::RankDeficiency { .. })));
}

#[test]
fn near_threshold_ratios_are_indeterminate() {
    let eps: f64 = 5e-9;
    let c = (1.0 - eps * eps).sqrt();
    let m = DenseMatrix::from_rows(&[&[eps, 1.0], &[c, 0.0]]).unwrap();
    let part = partition(2, &[&[0], &[1]]);
    assert!(matches!(sieve(&m, &part, 1e-9), Err(Error::IndeterminateRank { .. })));
}

#[test]
fn hexagon_singleton_boundary_limit() {
    let tol = Tolerances::default();
    let pair = examples::hexagon();
    let part = partition(3, &[&[1], &[0], &[2]]);
    let limit = boundary_limit(&pair, &part, &[1.0; 3], &tol).unwrap();
    let q_inf = DenseMatrix::from_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
    assert!(limit.q().max_diff(&q_inf) <= 1e-12);
    assert!(limit.reconstruct().max_diff(&DenseMatrix::from_diag(&[2.0, 4.0, 1.0])) <= 1e-12);
}

#[test]
fn quadrilateral_singleton_boundary_limit() {
    let tol = Tolerances::default();
    let pair = examples::quadrilateral();
    let part = partition(3, &[&[1], &[0], &[2]]);
    let limit = boundary_limit_detailed(&pair, &part, &[1.0; 3], &tol).unwrap();
    assert!(limit.pair.reconstruct().max_diff(&DenseMatrix::from_diag(&[2.0, 1.0, 4.0])) <= 1e-12);
    assert_eq!(limit.j_partition.blocks(), &[vec![0], vec![2], vec![1]]);
}

#[test]
fn flows_converge_to_their_limits() {
    let tol = Tolerances::default();
    let mut rng = rng(106);
    for _ in 0..10 {
        let n = 3 + rng.gen_range(0..3);
        let pair = random_pair(n, &mut rng);
        // Levels on a half-integer grid: ties give multi-index blocks and
        // distinct levels are separated enough to converge by t = 40.
        let levels: Vec<f64> = (0..n).map(|_| -0.5 * rng.gen_range(0..n) as f64).collect();
        let sigma = direction(&levels);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
        let limit = flow_limit(&pair, &sigma, &weights, &tol).unwrap().reconstruct();
        let log_w = direction(&weights.iter().map(|w| w.ln()).collect::<Vec<_>>());
        let mut previous = f64::INFINITY;
        for t in [5.0, 10.0, 20.0, 40.0] {
            let s = toda_action(&pair, &log_w.plus(&sigma.scaled(t))).unwrap().reconstruct();
            let err = s.max_diff(&limit);
            assert!(err <= previous.max(1e-11), "error grew to {err:e} at t = {t}");
            previous = err;
        }
        assert!(previous <= 1e-6, "final error {previous:e}");
    }
}

#[test]
fn paper_examples_converge_along_a_generic_direction() {
    let tol = Tolerances::default();
    let sigma = direction(&[-1.0, 0.0, -2.0]);
    let t = 1e6f64.ln();
    for pair in [examples::hexagon(), examples::quadrilateral()] {
        let limit = flow_limit(&pair, &sigma, &[1.0; 3], &tol).unwrap();
        let moved = toda_action(&pair, &sigma.scaled(t)).unwrap();
        assert!(moved.reconstruct().max_diff(&limit.reconstruct()) <= 1e-4);
    }
}

#[test]
fn limits_are_block_invariant_with_block_spectra() {
    let tol = Tolerances::default();
    let mut rng = rng(107);
    for _ in 0..30 {
        let n = 3 + rng.gen_range(0..4);
        let pair = random_pair(n, &mut rng);
        let part = OrderedPartition::new(n, random_proper_partition(n, &mut rng)).unwrap();
        let weights: Vec<f64> = {
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            for block in part.blocks() {
                w[block[0]] = 1.0;
            }
            w
        };
        let limit = boundary_limit_detailed(&pair, &part, &weights, &tol).unwrap();
        let s = limit.pair.reconstruct();
        let cols = limit.j_partition.blocks();
        for (a, ja) in cols.iter().enumerate() {
            for (b, jb) in cols.iter().enumerate() {
                if a != b {
                    assert!(s.select(ja, jb).max_abs() <= 1e-9);
                }
            }
            let mut expected: Vec<f64> = part.blocks()[a].iter().map(|&i| pair.lambda()[i]).collect();
            expected.sort_by(|x, y| y.total_cmp(x));
            assert!(max_abs_diff(&eigenvalues(&s.select(ja, ja)), &expected) <= 1e-9);
        }
    }
}

#[test]
fn hexagon_edge_family_lies_on_one_side() {
    // σ = (−1, −1, 0): the third row dominates, leaving a one-parameter family
    // of limits indexed by the ratio of the first two weights.
    let tol = Tolerances::default();
    let pair = examples::hexagon();
    let sigma = direction(&[-1.0, -1.0, 0.0]);
    for ratio in [1e-3, 0.1, 0.5, 1.0, 3.0, 40.0] {
        let a = flow_limit(&pair, &sigma, &[ratio, 1.0, 1.0], &tol).unwrap();
        let b = flow_limit(&pair, &sigma, &[2.0 * ratio, 2.0, 1.0], &tol).unwrap();
        assert!(a.reconstruct().max_diff(&b.reconstruct()) <= 1e-12);
        let s = a.reconstruct();
        assert!((s[(0, 0)] - 1.0).abs() <= 1e-12);
        assert!(s[(0, 1)].abs() <= 1e-12 && s[(0, 2)].abs() <= 1e-12);
        assert!((bfr(&a).0[2] - 4.0).abs() <= 1e-12);
    }
}

#[test]
fn quadrilateral_chopped_edge_family() {
    let tol = Tolerances::default();
    let pair = examples::quadrilateral();
    let sigma = direction(&[0.0, 0.0, -1.0]);
    let x_at = |ratio: f64| bfr(&flow_limit(&pair, &sigma, &[ratio, 1.0, 1.0], &tol).unwrap()).0;
    for ratio in [1e-2, 0.3, 1.0, 7.0] {
        let x = x_at(ratio);
        assert!((x[2] - 2.0).abs() <= 1e-12);
        assert!((x[0] + x[1] - 5.0).abs() <= 1e-12);
    }
    let mut ends = [x_at(1e-8), x_at(1e8)];
    ends.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert!(max_abs_diff(&ends[0], &[1.0, 4.0, 2.0]) <= 1e-6);
    assert!(max_abs_diff(&ends[1], &[4.0, 1.0, 2.0]) <= 1e-6);
}

#[test]
fn quadrilateral_degenerate_direction_has_a_unique_limit() {
    let tol = Tolerances::default();
    let pair = examples::quadrilateral();
    let sigma = direction(&[-1.0, 0.0, -1.0]);
    for (a, b) in [(1.0, 1.0), (0.01, 1.0), (1.0, 0.2), (5.0, 3.0)] {
        let s = flow_limit(&pair, &sigma, &[a, 1.0, b], &tol).unwrap().reconstruct();
        assert!(s.max_diff(&DenseMatrix::from_diag(&[2.0, 1.0, 4.0])) <= 1e-12);
    }
}

#[test]
fn constant_direction_limit_is_the_weighted_action() {
    let tol = Tolerances::default();
    let pair = examples::hexagon();
    let weights = [0.5, 2.0, 1.0];
    let limit = flow_limit(&pair, &direction(&[3.0, 3.0, 3.0]), &weights, &tol).unwrap();
    let tau = direction(&weights.iter().map(|w: &f64| w.ln()).collect::<Vec<_>>());
    assert_eq!(limit, toda_action(&pair, &tau).unwrap());
}

#[test]
fn partitions_follow_decreasing_direction_values() {
    let p = partition_from_direction(&direction(&[-1.0, 0.0, -2.0, 0.0]), 1e-12);
    assert_eq!(p.blocks(), &[vec![1, 3], vec![0], vec![2]]);
}

#[test]
fn limit_of_a_diagonal_pair_is_itself() {
    let tol = Tolerances::default();
    let s = DenseMatrix::from_diag(&[1.0, 5.0, 3.0]);
    let pair = SpectralPair::from_symmetric(&s, &tol).unwrap();
    let limit = flow_limit(&pair, &direction(&[2.0, -1.0, 0.5]), &[1.0; 3], &tol).unwrap();
    assert!(limit.reconstruct().max_diff(&s) <= 1e-14);
}
