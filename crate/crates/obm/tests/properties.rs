//! Property tests for the structural invariants of Orlicz addition.

use obm::additions::{lp_sum_support, orlicz_sum};
use obm::bodies::{ConvexBody, DirectionGrid};
use obm::oracle::{random_polytope, BodyFamily, Seed};
use obm::phi::{PhiFunction, PhiM};
use proptest::prelude::*;

fn grid() -> DirectionGrid {
    DirectionGrid::uniform2d(64)
}

fn seeded_pair(seed: u64) -> (ConvexBody, ConvexBody) {
    let s = Seed::new(seed);
    let k = random_polytope(&s.derive("k"), 2, 7, BodyFamily::OriginInterior).unwrap();
    let l = random_polytope(&s.derive("l"), 2, 6, BodyFamily::OriginInterior).unwrap();
    (k, l)
}

fn power_sum(p: f64) -> PhiM {
    PhiM::replicate(&PhiFunction::power(p).unwrap(), 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // phi = t^p reduces to L_p addition
    #[test]
    fn lp_consistency(seed in 0u64..1 << 32, p in 1.0f64..4.0) {
        let (k, l) = seeded_pair(seed);
        let sum = orlicz_sum(&power_sum(p), &[k.clone(), l.clone()]).unwrap();
        for u in &grid().directions {
            let want = lp_sum_support(p, &k, &l, u);
            prop_assert!((sum.support(u) - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }

    // A(K + L) = AK + AL for nonsingular A: compare supports through A^T
    #[test]
    fn gl2_covariance(
        seed in 0u64..1 << 32,
        p in 1.0f64..4.0,
        a in -2.0f64..2.0, b in -2.0f64..2.0,
        c in -2.0f64..2.0, d in -2.0f64..2.0,
    ) {
        prop_assume!((a * d - b * c).abs() > 0.3);
        let (k, l) = seeded_pair(seed);
        let m = vec![vec![a, b], vec![c, d]];
        let ka = k.linear_image(&m).unwrap();
        let la = l.linear_image(&m).unwrap();
        let pm = power_sum(p);
        let sum_a = orlicz_sum(&pm, &[ka, la]).unwrap();
        let sum = orlicz_sum(&pm, &[k, l]).unwrap();
        for u in &grid().directions {
            let at_u = vec![a * u[0] + c * u[1], b * u[0] + d * u[1]];
            let want = sum.support(&at_u);
            prop_assert!(
                (sum_a.support(u) - want).abs() <= 1e-9 * want.abs().max(1.0),
                "direction {u:?}: {} vs {}", sum_a.support(u), want
            );
        }
    }

    // K subset K' implies K + L subset K' + L
    #[test]
    fn monotonicity(seed in 0u64..1 << 32, p in 1.0f64..4.0, s in 1.0f64..2.5) {
        let (k, l) = seeded_pair(seed);
        let k_big = k.scale_body(s);
        let pm = power_sum(p);
        let small = orlicz_sum(&pm, &[k, l.clone()]).unwrap();
        let big = orlicz_sum(&pm, &[k_big, l]).unwrap();
        for u in &grid().directions {
            prop_assert!(small.support(u) <= big.support(u) + 1e-10 * big.support(u).abs().max(1.0));
        }
    }

    // o-symmetric summands give an o-symmetric sum
    #[test]
    fn symmetry_preserved(seed in 0u64..1 << 32, p in 1.0f64..4.0) {
        let s = Seed::new(seed);
        let k = random_polytope(&s.derive("ks"), 2, 6, BodyFamily::Symmetric).unwrap();
        let l = random_polytope(&s.derive("ls"), 2, 5, BodyFamily::Symmetric).unwrap();
        let g = grid();
        let sum = orlicz_sum(&power_sum(p), &[k, l]).unwrap();
        let scale = sum.max_support_on(&g).max(1.0);
        prop_assert!(sum.is_o_symmetric(&g, 1e-9 * scale));
    }

    // the origin is the neutral element of any normalized addition
    #[test]
    fn origin_is_identity(seed in 0u64..1 << 32, p in 1.0f64..4.0) {
        let (k, _) = seeded_pair(seed);
        let sum = orlicz_sum(&power_sum(p), &[k.clone(), ConvexBody::origin(2)]).unwrap();
        for u in &grid().directions {
            let want = k.support(u);
            prop_assert!((sum.support(u) - want).abs() <= 1e-11 * want.abs().max(1.0));
        }
    }
}
