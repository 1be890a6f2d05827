//! Structural and algebraic invariants: canonicalization, enumeration,
//! Pochhammer products, and the exact moment comparison against the
//! matched-concentration Dirichlet.

use proptest::prelude::*;

use pdp::discrete::{dirichlet_equivalent_concentration, pdp_moments, third_central_moment};
use pdp::laws::crd_log_prob;
use pdp::partition::{enumerate_partitions, for_each_partition};
use pdp::pochhammer::{log_poch_ratio, log_pochhammer_inc};
use pdp::{canonicalize, PdParams};

const BELL: [usize; 11] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];

#[test]
fn enumeration_counts_blocks_and_distinctness() {
    for n in 1..=10_usize {
        let parts = enumerate_partitions(n).unwrap();
        assert_eq!(parts.len(), BELL[n], "partition count at n={n}");
        let unique: std::collections::HashSet<_> = parts.iter().collect();
        assert_eq!(unique.len(), parts.len(), "all partitions distinct at n={n}");
        for p in &parts {
            assert_eq!(p.n(), n);
            assert_eq!(p.counts().iter().sum::<usize>(), n);
            // canonical form: block labels appear in first-use order
            let canon = canonicalize(p.assignments()).unwrap();
            assert_eq!(&canon, p);
        }
    }
}

#[test]
fn streaming_enumeration_agrees_with_collected() {
    for n in 1..=8_usize {
        let collected = enumerate_partitions(n).unwrap();
        let mut streamed = Vec::new();
        for_each_partition(n, |sp| streamed.push(sp.clone())).unwrap();
        assert_eq!(collected, streamed);
    }
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_label_invariant(labels in prop::collection::vec(0usize..6, 1..40)) {
        let canon = canonicalize(&labels).unwrap();
        // idempotent: canonicalizing the canonical assignments changes nothing
        let again = canonicalize(canon.assignments()).unwrap();
        prop_assert_eq!(&again, &canon);
        // invariant under any injective relabeling
        let relabeled: Vec<String> = labels.iter().map(|&x| format!("tag-{}", 9 - x)).collect();
        let canon2 = canonicalize(&relabeled).unwrap();
        prop_assert_eq!(&canon2, &canon);
    }

    #[test]
    fn pochhammer_matches_direct_product(x in 0.1f64..5.0, y in -0.9f64..2.0, n in 0usize..20) {
        // the unsigned form requires every factor positive
        prop_assume!((0..n).all(|i| x + i as f64 * y > 1e-6));
        let direct: f64 = (0..n).map(|i| x + i as f64 * y).product();
        let log = log_pochhammer_inc(x, y, n).unwrap();
        prop_assert!((log.exp() - direct).abs() <= 1e-10 * direct.abs());
    }

    #[test]
    fn pochhammer_ratio_matches_direct_quotient(b in 0.05f64..4.0, a in 0.0f64..0.9, m in 1usize..8, extra in 0usize..20) {
        let n = m + extra;
        // (b|a)_m / (b)_n with the shared leading b cancelled analytically
        let numer: f64 = (0..m).map(|i| b + i as f64 * a).product();
        let denom: f64 = (0..n).map(|i| b + i as f64).product();
        let log = log_poch_ratio(b, a, m, n).unwrap();
        let direct = numer / denom;
        prop_assert!((log.exp() - direct).abs() <= 1e-10 * direct.abs());
    }

    #[test]
    fn crd_log_prob_ignores_count_order(seed_counts in prop::collection::vec(1usize..5, 1..6)) {
        let params = PdParams::new(0.5, 1.0).unwrap();
        let base = crd_log_prob(&seed_counts, params).unwrap();
        let mut reversed = seed_counts.clone();
        reversed.reverse();
        let flipped = crd_log_prob(&reversed, params).unwrap();
        prop_assert!((base - flipped).abs() < 1e-12);
    }
}

// Exact comparison with the Dirichlet sharing the matched concentration
// (a+b)/(1-a): orders one and two match exactly; all three third-moment
// cases share the ratio (2-a)(b+2-a) / (2(1-a)(b+2)), so the relative gap
// grows like a*b/(2(b+2)) for small a -- linear in a for fixed b > 0 and
// quadratic only at b = 0.
#[test]
fn third_moments_vs_matched_dirichlet() {
    let theta = [0.2_f64, 0.3, 0.5];

    // Dirichlet(c * theta) central moments up to order three
    let dir_var = |c: f64, tj: f64| tj * (1.0 - tj) / (c + 1.0);
    let dir_cov = |c: f64, ti: f64, tj: f64| -ti * tj / (c + 1.0);
    let dir_third = |c: f64, t: &[f64; 3], i: usize, j: usize, k: usize| {
        // raw-moment expansion of E[(p_i-t_i)(p_j-t_j)(p_k-t_k)]
        let same = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
        let raw2 = |x: usize, y: usize| {
            (t[x] * c * (t[y] * c + same(x, y))) / (c * (c + 1.0))
        };
        let raw3 = |x: usize, y: usize, z: usize| {
            (t[x] * c * (t[y] * c + same(x, y)) * (t[z] * c + same(x, z) + same(y, z)))
                / (c * (c + 1.0) * (c + 2.0))
        };
        raw3(i, j, k) - t[i] * raw2(j, k) - t[j] * raw2(i, k) - t[k] * raw2(i, j)
            + 2.0 * t[i] * t[j] * t[k]
    };

    for (a, b) in [(0.0, 1.0), (0.01, 1.0), (0.05, 0.5), (0.1, 2.0), (0.3, 1.0)] {
        let params = PdParams::new(a, b).unwrap();
        let alpha = dirichlet_equivalent_concentration(params);
        let moments = pdp_moments(&theta, params).unwrap();
        let predicted_ratio = (2.0 - a) * (b + 2.0 - a) / (2.0 * (1.0 - a) * (b + 2.0));

        for j in 0..3 {
            // orders one and two are matched exactly, not approximately
            assert!((moments.mean[j] - theta[j]).abs() < 1e-15);
            let dv = dir_var(alpha, theta[j]);
            assert!(
                (moments.covariance[j][j] - dv).abs() <= 1e-14 * dv,
                "variance identity at (a,b)=({a},{b})"
            );
        }
        let dc = dir_cov(alpha, theta[0], theta[1]);
        assert!((moments.covariance[0][1] - dc).abs() <= 1e-14 * dc.abs());

        // all three third-moment coincidence patterns realize the same ratio
        for (i, j, k) in [(0, 0, 0), (0, 0, 1), (0, 1, 2)] {
            let ours = third_central_moment(&theta, params, i, j, k).unwrap();
            let dir = dir_third(alpha, &theta, i, j, k);
            assert!(
                (ours - predicted_ratio * dir).abs() <= 1e-13 * ours.abs().max(dir.abs()),
                "third-moment ratio at (a,b)=({a},{b}) indices ({i},{j},{k})"
            );
        }
    }

    // trend of the relative gap across small a: linear in a at b = 1
    // (coefficient b/(2(b+2)) = 1/6), quadratic at b = 0
    let gap = |a: f64, b: f64| {
        let ratio = (2.0 - a) * (b + 2.0 - a) / (2.0 * (1.0 - a) * (b + 2.0));
        (ratio - 1.0).abs()
    };
    let grid = [0.01_f64, 0.02, 0.05, 0.1];
    let slope = |b: f64| {
        let pts: Vec<(f64, f64)> = grid.iter().map(|&a| (a.ln(), gap(a, b).ln())).collect();
        let n = pts.len() as f64;
        let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(x, y), p| (x + p.0, y + p.1));
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    // the quadratic correction term nudges the fitted slopes slightly above
    // their leading orders on this grid
    let slope_b1 = slope(1.0);
    let slope_b0 = slope(0.0);
    assert!((0.95..1.25).contains(&slope_b1), "gap is first order at b=1, slope {slope_b1:.3}");
    assert!((1.95..2.25).contains(&slope_b0), "gap is second order at b=0, slope {slope_b0:.3}");
    for &a in &grid {
        let predicted = a * 1.0 / (2.0 * 3.0);
        assert!(
            (gap(a, 1.0) - predicted).abs() <= 0.6 * a * a,
            "first-order coefficient b/(2(b+2)) at a={a}"
        );
    }
}
