//! Acceptance gate: one pass/fail line per criterion, run as a single test
//! so every line prints even when an earlier criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use obm::additions::{
    associativity_defect, lp_sum_support, m_sum, m_sum_bruteforce, naive_sum_probe, orlicz_sum,
    orlicz_linear_combination, orlicz_sum_parametric, CoeffSet,
};
use obm::bodies::{support_distance, ConvexBody, DirectionGrid};
use obm::inequalities::{
    compare_vphi_vs_hat, first_variation, hab_sign_flip, mixed_volume_vphi,
    mixed_volume_vphi_hat, validate_bm_m_addition, validate_bm_split, validate_log_inequality,
    validate_log_minkowski, validate_orlicz_bm, validate_orlicz_minkowski,
    validate_vphi_hat_minkowski, InequalityReport,
};
use obm::oracle::{random_polytope, BodyFamily, Seed};
use obm::phi::{decompose_2d, f_phi_limit, DecompositionCase, PhiFunction, PhiLimit, PhiM};
use rand::Rng;

fn grid2() -> DirectionGrid {
    DirectionGrid::default_for(2)
}

fn rect_vs_disk(case: usize) -> (ConvexBody, ConvexBody) {
    // seeded aspect ratios, never close to a disk dilatate
    let a = 1.5 + 0.25 * (case % 7) as f64;
    let r = 0.4 + 0.05 * (case % 5) as f64;
    (ConvexBody::rectangle(a, 1.0, true), ConvexBody::ball(2, r))
}

fn report_scale(r: &InequalityReport) -> f64 {
    r.lhs.abs().max(r.rhs.abs()).max(1e-30)
}

fn assert_holds(r: &InequalityReport, ctx: &str) {
    assert!(
        r.holds && r.slack >= -1e-10 * report_scale(r),
        "{ctx}: {} slack {:.3e} (lhs {:.6e}, rhs {:.6e})",
        r.name,
        r.slack,
        r.lhs,
        r.rhs
    );
}

fn assert_equality(r: &InequalityReport, ctx: &str) {
    assert!(
        r.slack.abs() < 1e-6 * report_scale(r),
        "{ctx}: {} expected equality, slack {:.3e}",
        r.name,
        r.slack
    );
    assert!(r.equality_detected(), "{ctx}: {} equality detector did not fire", r.name);
}

fn assert_strict(r: &InequalityReport, ctx: &str) {
    assert!(
        r.slack > 1e-4 * report_scale(r),
        "{ctx}: {} expected strict slack, got {:.3e}",
        r.name,
        r.slack
    );
}

// --- criterion 1: H(a,b) sign study for the rectangle vs the disk ---

fn criterion_1() {
    let h21 = compare_vphi_vs_hat(2.0, 1.0).unwrap();
    assert!(h21.closed < 0.0, "H(2,1) = {:.6e} not negative", h21.closed);

    let b_star = hab_sign_flip(2.0, 128.0)
        .unwrap()
        .expect("no sign flip for a = 2 up to b = 128");
    assert!(b_star <= 128.0);
    assert!(compare_vphi_vs_hat(2.0, b_star).unwrap().closed > 0.0);

    // closed form vs the mixed-volume route, with the rectangle's support
    // data discretized on a 2880-direction grid
    let grid = DirectionGrid::uniform2d(2880);
    let phi = PhiFunction::exp_normalized();
    let l = ConvexBody::ball(2, 1.0);
    for (a, b) in [(2.0, 1.0), (2.0, 4.0), (3.0, 1.0), (1.5, 8.0), (2.0, b_star)] {
        let closed = compare_vphi_vs_hat(a, b).unwrap().closed;
        let kg = ConvexBody::rectangle(a, b, true).outer_polytope(&grid).unwrap();
        let vphi = mixed_volume_vphi(&phi, &kg, &l).unwrap().value;
        let lam1 = mixed_volume_vphi_hat(&phi, &kg, &l).unwrap().value;
        let g = |t: f64| (2.0 / (a * t)).exp() + (2.0 / (b * t)).exp();
        let geometric = g(phi.inverse(vphi / kg.volume()).unwrap()) - g(lam1);
        assert!(
            (closed - geometric).abs() <= 1e-4,
            "H({a},{b}): closed {closed:.8e} vs geometric {geometric:.8e}"
        );
    }
}

// --- criterion 2: L_p reduction of the Orlicz sum ---

fn criterion_2() {
    let grid = grid2();
    let root = Seed::new(202);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let phi = PhiFunction::power(p).unwrap();
        let pm = PhiM::replicate(&phi, 2).unwrap();
        for case in 0..50usize {
            let s = root.derive(&format!("p{p}-case{case}"));
            let k =
                random_polytope(&s.derive("k"), 2, 6 + case % 5, BodyFamily::OriginInterior)
                    .unwrap();
            let l = random_polytope(
                &s.derive("l"),
                2,
                6 + (case / 5) % 5,
                BodyFamily::OriginInterior,
            )
            .unwrap();
            let sum = orlicz_sum(&pm, &[k.clone(), l.clone()]).unwrap();
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for u in &grid.directions {
                let got = sum.support(u);
                let want = lp_sum_support(p, &k, &l, u);
                worst = worst.max((got - want).abs());
                scale = scale.max(want.abs());
            }
            assert!(
                worst <= 1e-9 * scale.max(1.0),
                "p = {p} case {case}: grid defect {worst:.3e} (scale {scale:.3e})"
            );
        }
    }

    // radii 3 and 4 disks under p = 2 give the radius 5 disk
    let pm = PhiM::replicate(&PhiFunction::power(2.0).unwrap(), 2).unwrap();
    let sum = orlicz_sum(&pm, &[ConvexBody::ball(2, 3.0), ConvexBody::ball(2, 4.0)]).unwrap();
    for u in &grid.directions {
        assert!((sum.support(u) - 5.0).abs() <= 1e-9 * 5.0);
    }
}

// --- criterion 3: inequality validators on seeded case suites ---

fn phi_cycle(case: usize) -> PhiFunction {
    match case % 5 {
        0 => PhiFunction::power(1.0).unwrap(),
        1 => PhiFunction::power(1.5).unwrap(),
        2 => PhiFunction::power(2.0).unwrap(),
        3 => PhiFunction::power(3.0).unwrap(),
        _ => PhiFunction::exp_normalized(),
    }
}

fn strictly_convex_phi(case: usize) -> PhiFunction {
    match case % 3 {
        0 => PhiFunction::power(2.0).unwrap(),
        1 => PhiFunction::power(3.0).unwrap(),
        _ => PhiFunction::exp_normalized(),
    }
}

fn criterion_3() {
    let root = Seed::new(303);
    let grid = grid2();
    const CASES: usize = 500;

    for case in 0..CASES {
        let s = root.derive(&format!("case{case}"));
        let k = random_polytope(&s.derive("k"), 2, 5 + case % 6, BodyFamily::OriginInterior)
            .unwrap();
        let l = random_polytope(&s.derive("l"), 2, 5 + (case / 6) % 6, BodyFamily::OriginInterior)
            .unwrap();
        let phi = phi_cycle(case);
        let pm = PhiM::replicate(&phi, 2).unwrap();

        for r in validate_orlicz_bm(&pm, &k, &l).unwrap() {
            assert_holds(&r, &format!("obm case {case}"));
        }
        assert_holds(&validate_orlicz_minkowski(&phi, &k, &l).unwrap(), "orlicz-minkowski");
        assert_holds(&validate_vphi_hat_minkowski(&phi, &k, &l).unwrap(), "vphi-hat");

        // contained copy of l for the log inequality
        let ratio = grid
            .directions
            .iter()
            .map(|u| k.support(u) / l.support(u).max(1e-12))
            .fold(f64::INFINITY, f64::min);
        let inner = l.scale_body(0.5 * ratio);
        assert_holds(&validate_log_inequality(&k, &inner).unwrap(), "log inequality");

        let bodies = [k.clone(), l.clone()];
        for r in
            validate_bm_m_addition(&CoeffSet::singleton_ones(2), &bodies, Some(&[1.0, 1.0]))
                .unwrap()
        {
            assert_holds(&r, &format!("bm minkowski case {case}"));
        }
        let p = [1.0, 1.5, 2.0, 3.0][case % 4];
        for r in validate_bm_m_addition(&CoeffSet::lp_arc(2, p).unwrap(), &bodies, None).unwrap()
        {
            assert_holds(&r, &format!("bm lp case {case}"));
        }

        let ks = random_polytope(&s.derive("ks"), 2, 5 + case % 5, BodyFamily::Symmetric).unwrap();
        let ls = random_polytope(&s.derive("ls"), 2, 5 + (case / 5) % 5, BodyFamily::Symmetric)
            .unwrap();
        assert_holds(&validate_log_minkowski(&ks, &ls).unwrap(), "log-minkowski");
    }

    // constructed dilatate pairs: near-zero slack and the detector fires
    for case in 0..10usize {
        let s = root.derive(&format!("dil{case}"));
        let mut rng = s.rng();
        let k = random_polytope(&s.derive("k"), 2, 6 + case % 4, BodyFamily::Symmetric).unwrap();
        let c: f64 = 0.2 + 0.6 * rng.gen::<f64>();
        let l = k.scale_body(c);
        let phi = strictly_convex_phi(case);
        let pm = PhiM::replicate(&phi, 2).unwrap();
        for r in validate_orlicz_bm(&pm, &k, &l).unwrap() {
            assert_equality(&r, "dilatate obm");
        }
        assert_equality(&validate_orlicz_minkowski(&phi, &k, &l).unwrap(), "dilatate mi");
        assert_equality(&validate_vphi_hat_minkowski(&phi, &k, &l).unwrap(), "dilatate hat");
        assert_equality(&validate_log_inequality(&k, &l).unwrap(), "dilatate log");
        let bodies = [k.clone(), l.clone()];
        for r in
            validate_bm_m_addition(&CoeffSet::singleton_ones(2), &bodies, Some(&[1.0, 1.0]))
                .unwrap()
        {
            assert_equality(&r, "dilatate bm");
        }
        assert_equality(&validate_log_minkowski(&k, &l).unwrap(), "dilatate log-mink");
    }

    // constructed non-dilatate pairs with strictly convex phi: strict slack
    for case in 0..10usize {
        let (k, l) = rect_vs_disk(case);
        let phi = strictly_convex_phi(case);
        let pm = PhiM::replicate(&phi, 2).unwrap();
        for r in validate_orlicz_bm(&pm, &k, &l).unwrap() {
            assert_strict(&r, "strict obm");
        }
        assert_strict(&validate_orlicz_minkowski(&phi, &k, &l).unwrap(), "strict mi");
        assert_strict(&validate_vphi_hat_minkowski(&phi, &k, &l).unwrap(), "strict hat");
        assert_strict(&validate_log_inequality(&k, &l.scale_body(0.3)).unwrap(), "strict log");
        let bodies = [k.clone(), l.clone()];
        for r in
            validate_bm_m_addition(&CoeffSet::singleton_ones(2), &bodies, Some(&[1.0, 1.0]))
                .unwrap()
        {
            assert_strict(&r, "strict bm");
        }
        assert_strict(&validate_log_minkowski(&k, &l).unwrap(), "strict log-mink");
    }
}

// --- criterion 4: first variation vs the Orlicz mixed volume ---

fn criterion_4() {
    let root = Seed::new(404);
    let grid = grid2();
    for case in 0..20usize {
        let s = root.derive(&format!("case{case}"));
        let k = random_polytope(&s.derive("k"), 2, 6 + case % 5, BodyFamily::OriginInterior)
            .unwrap();
        let l = random_polytope(&s.derive("l"), 2, 6 + (case / 4) % 5, BodyFamily::OriginInterior)
            .unwrap();
        let phi1 = phi_cycle(case);
        let phi2 = phi_cycle(case / 5 + 2 * case);
        let fv = first_variation(&phi1, &phi2, &k, &l, &[]).unwrap();
        assert!(
            fv.rel_deviation < 1e-3,
            "case {case} ({:?}, {:?}): rel deviation {:.3e}",
            phi1,
            phi2,
            fv.rel_deviation
        );

        // Hausdorff convergence of the eps-combination back to K, monotone
        if case < 5 {
            let mut prev = f64::INFINITY;
            for exp in 2..=6 {
                let eps = 10f64.powi(-exp);
                let sum = orlicz_linear_combination(&phi1, &phi2, &k, &l, 1.0, eps).unwrap();
                let d = support_distance(&sum, &k, &grid);
                assert!(
                    d < prev,
                    "case {case}: distance not monotone at eps = 1e-{exp}: {d:.3e} vs {prev:.3e}"
                );
                prev = d;
            }
            assert!(prev < 1e-4, "case {case}: final distance {prev:.3e}");
        }
    }
}

// --- criterion 5: the Orlicz sum as an M-addition ---

fn phi_m_suite() -> Vec<PhiM> {
    let pw = |p: f64| PhiFunction::power(p).unwrap();
    let exp = PhiFunction::exp_normalized;
    let ml = |t: f64| PhiFunction::maxlinear(t).unwrap();
    let pl = PhiFunction::piecewise(vec![(0.0, 0.0), (0.4, 0.2), (1.0, 1.0), (2.0, 3.0)]).unwrap();
    let nl = PhiFunction::neglog;
    let mut out = vec![
        PhiM::sum(vec![pw(1.0), pw(1.0)]).unwrap(),
        PhiM::sum(vec![pw(1.5), pw(2.0)]).unwrap(),
        PhiM::sum(vec![pw(2.0), pw(2.0)]).unwrap(),
        PhiM::sum(vec![pw(3.0), pw(1.5)]).unwrap(),
        PhiM::sum(vec![pw(2.5), pw(2.5)]).unwrap(),
        PhiM::sum(vec![exp(), exp()]).unwrap(),
        PhiM::sum(vec![exp(), pw(2.0)]).unwrap(),
        PhiM::sum(vec![pw(1.5), exp()]).unwrap(),
        PhiM::sum(vec![ml(0.3), pw(2.0)]).unwrap(),
        PhiM::sum(vec![ml(0.5), ml(0.5)]).unwrap(),
        PhiM::sum(vec![pl.clone(), pw(2.0)]).unwrap(),
        PhiM::sum(vec![pl.clone(), pl.clone()]).unwrap(),
        PhiM::sum(vec![nl(), nl()]).unwrap(),
        PhiM::sum(vec![nl(), pw(2.0)]).unwrap(),
        PhiM::max(vec![pw(2.0), pw(3.0)]).unwrap(),
        PhiM::max(vec![exp(), pw(1.5)]).unwrap(),
        PhiM::max(vec![ml(0.4), pw(2.0)]).unwrap(),
        PhiM::sum(vec![pw(1.0), exp()]).unwrap(),
        PhiM::sum(vec![pw(4.0), pw(1.0)]).unwrap(),
        PhiM::sum(vec![exp(), pl]).unwrap(),
    ];
    assert_eq!(out.len(), 20);
    out.drain(..).collect()
}

fn criterion_5() {
    let root = Seed::new(505);
    let grid = grid2();
    for (case, pm) in phi_m_suite().into_iter().enumerate() {
        let s = root.derive(&format!("phi{case}"));
        let k = random_polytope(&s.derive("k"), 2, 6 + case % 5, BodyFamily::OriginInterior)
            .unwrap();
        let l = random_polytope(&s.derive("l"), 2, 6 + (case / 3) % 5, BodyFamily::OriginInterior)
            .unwrap();
        let orlicz = orlicz_sum(&pm, &[k.clone(), l.clone()]).unwrap();
        let msum = m_sum(&CoeffSet::j_polar(pm), &[k.clone(), l.clone()]).unwrap();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for u in &grid.directions {
            worst = worst.max((orlicz.support(u) - msum.support(u)).abs());
            scale = scale.max(orlicz.support(u).abs());
        }
        assert!(
            worst <= 1e-9 * scale.max(1.0),
            "phi {case}: sum mismatch {worst:.3e} on the grid"
        );
    }

    // support rule vs explicit point-cloud summation
    for case in 0..3usize {
        let s = root.derive(&format!("bf{case}"));
        let k = random_polytope(&s.derive("k"), 2, 7, BodyFamily::OriginInterior).unwrap();
        let l = random_polytope(&s.derive("l"), 2, 6, BodyFamily::OriginInterior).unwrap();
        let m = CoeffSet::lp_arc(2, [1.5, 2.0, 3.0][case]).unwrap();
        let exact = m_sum(&m, &[k.clone(), l.clone()]).unwrap();
        let coarse = m_sum_bruteforce(&m, &[k.clone(), l.clone()], 100, 7);
        let fine = m_sum_bruteforce(&m, &[k, l], 10_000, 7);
        let d_coarse = support_distance(&exact, &coarse, &grid);
        let d_fine = support_distance(&exact, &fine, &grid);
        assert!(d_fine < 2e-2, "case {case}: defect {d_fine:.3e} at 1e4 samples");
        assert!(
            d_fine <= d_coarse,
            "case {case}: defect grew with samples ({d_coarse:.3e} -> {d_fine:.3e})"
        );
    }
}

// --- criterion 6: planar decomposition of 1-unconditional bodies ---

fn random_unconditional_polygon(seed: &Seed) -> ConvexBody {
    let mut rng = seed.rng();
    loop {
        let count = 4 + (rng.gen::<u64>() % 5) as usize;
        let mut pts: Vec<Vec<f64>> = (0..count)
            .map(|_| {
                vec![0.05 + 0.95 * rng.gen::<f64>(), 0.05 + 0.95 * rng.gen::<f64>()]
            })
            .collect();
        let quadrant = pts.clone();
        for p in quadrant {
            pts.push(vec![-p[0], p[1]]);
            pts.push(vec![p[0], -p[1]]);
            pts.push(vec![-p[0], -p[1]]);
        }
        let body = match ConvexBody::from_vertices(2, pts) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let verts = body.vertices().unwrap();
        let mx = verts.iter().map(|v| v[0].abs()).fold(0.0, f64::max);
        let my = verts.iter().map(|v| v[1].abs()).fold(0.0, f64::max);
        let scaled = body
            .linear_image(&[vec![1.0 / mx, 0.0], vec![0.0, 1.0 / my]])
            .unwrap();
        if scaled.volume() > 1e-6 {
            return scaled;
        }
    }
}

fn criterion_6() {
    // disk: closed-form decomposition
    let d = decompose_2d(&ConvexBody::ball(2, 1.0)).unwrap();
    let s2 = 2.0f64.sqrt();
    let phi0 = |s: f64| {
        if s <= 1.0 / s2 {
            (1.0 - (1.0 - s * s).sqrt()) / (2.0 - s2)
        } else {
            (s + 1.0 - s2) / (2.0 - s2)
        }
    };
    for i in 0..=100 {
        let s = i as f64 / 100.0;
        assert!((d.phi1.eval(s) - phi0(s)).abs() < 1e-8, "disk phi1 at {s}");
        assert!((d.phi2.eval(s) - phi0(s)).abs() < 1e-8, "disk phi2 at {s}");
    }

    // seeded 1-unconditional polygons: the boundary identity holds
    let root = Seed::new(606);
    let mut checked = 0;
    let mut case = 0;
    while checked < 30 {
        let k = random_unconditional_polygon(&root.derive(&format!("poly{case}")));
        case += 1;
        let dec = match decompose_2d(&k) {
            Ok(dec) => dec,
            Err(e) => panic!("decomposition failed: {e}"),
        };
        if dec.case == DecompositionCase::MaxCase {
            continue; // the square's boundary is not a level set of a sum
        }
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let y = dec.boundary(x);
            let v = dec.phi1.eval(x) + dec.phi2.eval(y);
            assert!(
                (v - 1.0).abs() <= 1e-8,
                "polygon {case}: identity off by {:.3e} at x = {x}",
                v - 1.0
            );
        }
        checked += 1;
    }

    // parametric extension of the sum matches the support-rule hull
    let pm = PhiM::replicate(&PhiFunction::power(2.0).unwrap(), 2).unwrap();
    let dec = decompose_2d(&ConvexBody::ball(2, 1.0)).unwrap();
    let k = ConvexBody::cube(2, 1.0);
    let l = ConvexBody::from_vertices(
        2,
        vec![vec![1.0, 0.0], vec![0.0, 1.5], vec![-1.0, 0.0], vec![0.0, -1.5]],
    )
    .unwrap();
    let par = orlicz_sum_parametric(&dec, &k.sample_boundary(64), &l.sample_boundary(64), 129, 2)
        .unwrap();
    let hull_sum = orlicz_sum(&pm, &[k, l]).unwrap();
    let defect = support_distance(&par.hull, &hull_sum, &grid2());
    assert!(defect < 5e-3, "parametric defect {defect:.3e}");
}

// --- criterion 7: naive-sum and associativity probes ---

fn rotated(theta: f64, c: f64, p: [f64; 2]) -> Vec<f64> {
    vec![
        c * (p[0] * theta.cos() - p[1] * theta.sin()),
        c * (p[0] * theta.sin() + p[1] * theta.cos()),
    ]
}

fn criterion_7() {
    let exp = PhiFunction::exp_normalized();
    let p2 = PhiFunction::power(2.0).unwrap();
    let root = Seed::new(707);

    // seeded suite of near-orthogonal segment pairs
    for case in 0..10usize {
        let mut rng = root.derive(&format!("seg{case}")).rng();
        let theta: f64 = rng.gen::<f64>() * std::f64::consts::FRAC_PI_2;
        let c: f64 = 0.5 + 0.7 * rng.gen::<f64>();
        let k = ConvexBody::segment(rotated(theta, c, [-1.0, 0.3]), rotated(theta, c, [1.0, -0.3]));
        let l = ConvexBody::segment(rotated(theta, c, [0.2, -1.0]), rotated(theta, c, [-0.2, 1.0]));
        let probe = naive_sum_probe(&exp, &k, &l, 3000, 42 + case as u64).unwrap();
        assert!(
            !probe.is_support_function && probe.worst_defect > 1e-6,
            "segment case {case}: defect {:.3e}",
            probe.worst_defect
        );
        let power_probe = naive_sum_probe(&p2, &k, &l, 3000, 42 + case as u64).unwrap();
        assert!(
            power_probe.is_support_function,
            "power phi flagged a violation: {:.3e}",
            power_probe.worst_defect
        );
    }

    // associativity: exact for power phi, broken for exp
    let grid = grid2();
    for case in 0..5usize {
        let s = root.derive(&format!("assoc{case}"));
        let k = random_polytope(&s.derive("k"), 2, 6, BodyFamily::OriginInterior).unwrap();
        let l = random_polytope(&s.derive("l"), 2, 7, BodyFamily::OriginInterior).unwrap();
        let m = random_polytope(&s.derive("m"), 2, 5, BodyFamily::OriginInterior).unwrap();
        let d_exp = associativity_defect(&exp, &k, &l, &m, &grid).unwrap();
        let d_pow = associativity_defect(&p2, &k, &l, &m, &grid).unwrap();
        assert!(d_exp > 1e-6, "assoc case {case}: exp defect {d_exp:.3e}");
        assert!(d_pow < 1e-8, "assoc case {case}: power defect {d_pow:.3e}");
    }

    // small-argument limit trichotomy
    let pw = PhiFunction::pathological();
    match f_phi_limit(&pw, 0.5) {
        PhiLimit::Value(v) => assert!(v.abs() < 1e-9, "limit at 1/2: {v}"),
        other => panic!("limit at 1/2: {other:?}"),
    }
    assert_eq!(f_phi_limit(&pw, 1.0), PhiLimit::Value(1.0));
    assert_eq!(f_phi_limit(&pw, 2.0), PhiLimit::Divergent);
}

// --- criterion 8: planar split of Brunn-Minkowski for symmetric pairs ---

fn criterion_8() {
    let root = Seed::new(808);
    for case in 0..100usize {
        let s = root.derive(&format!("case{case}"));
        let k = random_polytope(&s.derive("k"), 2, 5 + case % 6, BodyFamily::Symmetric).unwrap();
        let l = random_polytope(&s.derive("l"), 2, 5 + (case / 6) % 6, BodyFamily::Symmetric)
            .unwrap();
        let split = validate_bm_split(&k, &l).unwrap();
        for r in [&split.link1, &split.link2, &split.bm] {
            assert!(
                r.slack >= -1e-8 * report_scale(r).max(1.0),
                "case {case}: {} slack {:.3e}",
                r.name,
                r.slack
            );
        }
    }
}

#[test]
fn acceptance_gate() {
    let criteria: Vec<(&str, Option<Duration>, Box<dyn FnOnce() + std::panic::UnwindSafe>)> = vec![
        ("rectangle-vs-disk sign study", Some(Duration::from_secs(5)), Box::new(criterion_1)),
        ("L_p reduction", Some(Duration::from_secs(10)), Box::new(criterion_2)),
        ("inequality validators", Some(Duration::from_secs(120)), Box::new(criterion_3)),
        ("first variation", Some(Duration::from_secs(30)), Box::new(criterion_4)),
        ("M-addition correspondence", None, Box::new(criterion_5)),
        ("planar decomposition", None, Box::new(criterion_6)),
        ("probes", None, Box::new(criterion_7)),
        ("planar split", None, Box::new(criterion_8)),
    ];

    let mut failures = Vec::new();
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let within = budget.map_or(true, |b| elapsed <= b);
        let ok = outcome.is_ok() && within;
        println!(
            "criterion {} ({name}): {} [{:.2}s{}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.map_or(String::new(), |b| format!(" / budget {}s", b.as_secs())),
        );
        if !ok {
            if outcome.is_ok() {
                failures.push(format!("criterion {}: over time budget", i + 1));
            } else {
                failures.push(format!("criterion {}: assertion failed", i + 1));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("; "));
}
