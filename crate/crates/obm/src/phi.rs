//! Orlicz function machinery: univariate convex functions phi with phi(0)=0
//! (class Phi), multivariate combinations (class Phi_m), the associated
//! 1-unconditional body J_phi and its polar, the Luxemburg-norm solver, and
//! the constructive planar decomposition of a 1-unconditional body into
//! phi_1(x_1) + phi_2(x_2) = 1.

use std::sync::Arc;

use serde::Deserialize;

use crate::bodies::{ConvexBody, DirectionGrid};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

const E: f64 = std::f64::consts::E;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum PhiKind {
    Power { p: f64 },
    /// (e^t - 1)/(e - 1)
    ExpNormalized,
    /// -ln(1 - t) on [0, 1)
    NegLog,
    /// max(t - tau, 0)/(1 - tau)
    MaxLinear { tau: f64 },
    /// convex piecewise-linear through knots, extended with the last slope
    Piecewise { knots: Vec<(f64, f64)> },
    /// e^{4(1 - t^{-2})} on (0,1], 8t - 7 on [1, inf)
    Pathological,
    Custom {
        f: ScalarFn,
        bound: f64,
        tau: f64,
        strictly_convex: bool,
    },
}

/// A convex function [0, a) -> [0, inf) with phi(0) = 0, nondecreasing.
/// Evaluation at or beyond the domain bound a returns +inf, which the
/// Luxemburg solver treats as predicate-false.
#[derive(Clone)]
pub struct PhiFunction {
    kind: PhiKind,
}

impl std::fmt::Debug for PhiFunction {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "PhiFunction({})", self.family())
    }
}

impl PhiFunction {
    pub fn power(p: f64) -> Result<PhiFunction> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("power exponent {p} < 1")));
        }
        Ok(PhiFunction { kind: PhiKind::Power { p } })
    }

    pub fn identity() -> PhiFunction {
        PhiFunction { kind: PhiKind::Power { p: 1.0 } }
    }

    pub fn exp_normalized() -> PhiFunction {
        PhiFunction { kind: PhiKind::ExpNormalized }
    }

    pub fn neglog() -> PhiFunction {
        PhiFunction { kind: PhiKind::NegLog }
    }

    pub fn maxlinear(tau: f64) -> Result<PhiFunction> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::InvalidParameter(format!("maxlinear tau {tau} not in [0,1)")));
        }
        Ok(PhiFunction { kind: PhiKind::MaxLinear { tau } })
    }

    /// Convex nondecreasing piecewise-linear function through `knots`
    /// (must start at (0, 0)); extended beyond the last knot with the last
    /// slope.
    pub fn piecewise(knots: Vec<(f64, f64)>) -> Result<PhiFunction> {
        if knots.len() < 2 || knots[0] != (0.0, 0.0) {
            return Err(Error::InvalidParameter(
                "piecewise needs >= 2 knots starting at (0,0)".into(),
            ));
        }
        let mut prev_slope = f64::NEG_INFINITY;
        for w in knots.windows(2) {
            let (t0, y0) = w[0];
            let (t1, y1) = w[1];
            if !(t1 > t0) || y1 < y0 {
                return Err(Error::InvalidParameter(
                    "piecewise knots must increase in t and be nondecreasing in y".into(),
                ));
            }
            let s = (y1 - y0) / (t1 - t0);
            if s < prev_slope - 1e-12 {
                return Err(Error::InvalidParameter("piecewise knots not convex".into()));
            }
            prev_slope = s;
        }
        Ok(PhiFunction { kind: PhiKind::Piecewise { knots } })
    }

    pub fn pathological() -> PhiFunction {
        PhiFunction { kind: PhiKind::Pathological }
    }

    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        bound: f64,
        tau: f64,
        strictly_convex: bool,
    ) -> PhiFunction {
        PhiFunction {
            kind: PhiKind::Custom { f: Arc::new(f), bound, tau, strictly_convex },
        }
    }

    pub fn family(&self) -> String {
        match &self.kind {
            PhiKind::Power { p } => format!("power({p})"),
            PhiKind::ExpNormalized => "exp-normalized".into(),
            PhiKind::NegLog => "neglog".into(),
            PhiKind::MaxLinear { tau } => format!("maxlinear({tau})"),
            PhiKind::Piecewise { .. } => "piecewise".into(),
            PhiKind::Pathological => "pathological".into(),
            PhiKind::Custom { .. } => "custom".into(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        if t >= self.bound() {
            return f64::INFINITY;
        }
        match &self.kind {
            PhiKind::Power { p } => t.powf(*p),
            PhiKind::ExpNormalized => (t.exp() - 1.0) / (E - 1.0),
            PhiKind::NegLog => -(1.0 - t).ln(),
            PhiKind::MaxLinear { tau } => (t - tau).max(0.0) / (1.0 - tau),
            PhiKind::Piecewise { knots } => {
                let last = knots.len() - 1;
                if t >= knots[last].0 {
                    let (t0, y0) = knots[last - 1];
                    let (t1, y1) = knots[last];
                    return y1 + (t - t1) * (y1 - y0) / (t1 - t0);
                }
                let i = knots.partition_point(|&(tk, _)| tk <= t).max(1);
                let (t0, y0) = knots[i - 1];
                let (t1, y1) = knots[i];
                y0 + (t - t0) * (y1 - y0) / (t1 - t0)
            }
            PhiKind::Pathological => {
                if t == 0.0 {
                    0.0
                } else if t <= 1.0 {
                    (4.0 * (1.0 - t.powi(-2))).exp()
                } else {
                    8.0 * t - 7.0
                }
            }
            PhiKind::Custom { f, .. } => f(t),
        }
    }

    /// ln(phi(t)), computed analytically where phi(t) underflows double
    /// precision (the pathological family near 0).
    pub fn log_eval(&self, t: f64) -> f64 {
        match &self.kind {
            PhiKind::Pathological => {
                if t <= 0.0 {
                    f64::NEG_INFINITY
                } else if t <= 1.0 {
                    4.0 * (1.0 - t.powi(-2))
                } else {
                    (8.0 * t - 7.0).ln()
                }
            }
            _ => self.eval(t).ln(),
        }
    }

    /// Supremum of the domain; evaluation at and beyond it returns +inf.
    pub fn bound(&self) -> f64 {
        match &self.kind {
            PhiKind::NegLog => 1.0,
            PhiKind::Custom { bound, .. } => *bound,
            _ => f64::INFINITY,
        }
    }

    /// Largest t with phi(t) = 0.
    pub fn tau(&self) -> f64 {
        match &self.kind {
            PhiKind::MaxLinear { tau } => *tau,
            PhiKind::Piecewise { knots } => knots
                .iter()
                .filter(|&&(_, y)| y == 0.0)
                .map(|&(t, _)| t)
                .fold(0.0, f64::max),
            PhiKind::Custom { tau, .. } => *tau,
            _ => 0.0,
        }
    }

    pub fn strictly_convex(&self) -> bool {
        match &self.kind {
            PhiKind::Power { p } => *p > 1.0,
            PhiKind::ExpNormalized | PhiKind::NegLog => true,
            PhiKind::Custom { strictly_convex, .. } => *strictly_convex,
            _ => false,
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.eval(1.0) - 1.0).abs() <= 1e-12
    }

    /// Left derivative at 1: analytic when the family admits one, otherwise
    /// the limit of the monotone sequence of difference quotients
    /// (phi(1) - phi(1-h))/h, h = 2^{-k}, which is nondecreasing as h
    /// shrinks since phi is convex.
    pub fn left_derivative_at_1(&self) -> f64 {
        match &self.kind {
            PhiKind::Power { p } => *p,
            PhiKind::ExpNormalized => E / (E - 1.0),
            PhiKind::NegLog => f64::INFINITY,
            PhiKind::MaxLinear { tau } => 1.0 / (1.0 - tau),
            PhiKind::Pathological => 8.0,
            PhiKind::Piecewise { knots } => {
                // slope of the segment whose interior or right endpoint is 1
                let mut slope = 0.0;
                for w in knots.windows(2) {
                    let (t0, y0) = w[0];
                    let (t1, y1) = w[1];
                    if t0 < 1.0 {
                        slope = (y1 - y0) / (t1 - t0);
                    }
                }
                slope
            }
            PhiKind::Custom { .. } => {
                let phi1 = self.eval(1.0);
                if !phi1.is_finite() {
                    return f64::INFINITY;
                }
                let mut best = f64::NEG_INFINITY;
                for k in 10..=40 {
                    let h = 2f64.powi(-k);
                    let q = (phi1 - self.eval(1.0 - h)) / h;
                    if !q.is_finite() {
                        break;
                    }
                    if q + 1e-11 < best {
                        break; // rounding noise has taken over
                    }
                    let done = q - best < 1e-10 * (1.0 + best.abs());
                    best = best.max(q);
                    if done && k > 12 {
                        break;
                    }
                }
                best
            }
        }
    }

    /// Inverse of phi restricted to [tau, a): the unique t there with
    /// phi(t) = y. Analytic where available, else bisection.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::OutOfRange);
        }
        if y == 0.0 {
            return Ok(self.tau());
        }
        match &self.kind {
            PhiKind::Power { p } => Ok(y.powf(1.0 / p)),
            PhiKind::ExpNormalized => Ok((1.0 + y * (E - 1.0)).ln()),
            PhiKind::NegLog => Ok(1.0 - (-y).exp()),
            PhiKind::MaxLinear { tau } => Ok(tau + y * (1.0 - tau)),
            _ => {
                let mut lo = self.tau();
                let mut hi = (lo + 1.0).max(1.0);
                let bound = self.bound();
                let mut iter = 0;
                while self.eval(hi.min(bound * (1.0 - 1e-15))) < y {
                    if bound.is_finite() {
                        // range check: sup over the domain
                        let sup = self.eval(bound * (1.0 - 1e-12));
                        if sup < y {
                            return Err(Error::OutOfRange);
                        }
                        hi = bound;
                        break;
                    }
                    hi *= 2.0;
                    iter += 1;
                    if iter > 400 {
                        return Err(Error::OutOfRange);
                    }
                }
                hi = hi.min(bound);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-13 * hi.max(1.0) {
                        break;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

/// A function [0, inf)^m -> [0, inf], convex, increasing in each variable,
/// with phi(o) = 0: the combining function of an m-fold Orlicz addition.
#[derive(Clone)]
pub struct PhiM {
    kind: PhiMKind,
}

type MultiFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum PhiMKind {
    Sum { terms: Vec<PhiFunction>, weights: Vec<f64> },
    Max { terms: Vec<PhiFunction> },
    /// gauge of a 1-unconditional body restricted to the positive orthant
    Gauge { body: ConvexBody },
    Custom { m: usize, f: MultiFn },
}

impl std::fmt::Debug for PhiM {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            PhiMKind::Sum { terms, .. } => write!(fm, "PhiM::Sum(m={})", terms.len()),
            PhiMKind::Max { terms } => write!(fm, "PhiM::Max(m={})", terms.len()),
            PhiMKind::Gauge { body } => write!(fm, "PhiM::Gauge(dim={})", body.dim),
            PhiMKind::Custom { m, .. } => write!(fm, "PhiM::Custom(m={m})"),
        }
    }
}

impl PhiM {
    /// phi(x) = sum_j phi_j(x_j).
    pub fn sum(terms: Vec<PhiFunction>) -> Result<PhiM> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("sum needs at least one term".into()));
        }
        let weights = vec![1.0; terms.len()];
        Ok(PhiM { kind: PhiMKind::Sum { terms, weights } })
    }

    /// phi(x) = sum_j alpha_j phi_j(x_j). With non-unit weights the axis
    /// normalization phi(e_j) = 1 is deliberately relaxed.
    pub fn weighted_sum(terms: Vec<PhiFunction>, weights: Vec<f64>) -> Result<PhiM> {
        if terms.is_empty() || terms.len() != weights.len() {
            return Err(Error::InvalidParameter("weighted sum arity mismatch".into()));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter("weights must be >= 0".into()));
        }
        Ok(PhiM { kind: PhiMKind::Sum { terms, weights } })
    }

    /// phi(x) = max_j phi_j(x_j).
    pub fn max(terms: Vec<PhiFunction>) -> Result<PhiM> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("max needs at least one term".into()));
        }
        Ok(PhiM { kind: PhiMKind::Max { terms } })
    }

    pub fn custom(m: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> PhiM {
        PhiM { kind: PhiMKind::Custom { m, f: Arc::new(f) } }
    }

    /// Replicate one scalar function across m summed arguments.
    pub fn replicate(phi: &PhiFunction, m: usize) -> Result<PhiM> {
        PhiM::sum(vec![phi.clone(); m])
    }

    pub fn arity(&self) -> usize {
        match &self.kind {
            PhiMKind::Sum { terms, .. } | PhiMKind::Max { terms } => terms.len(),
            PhiMKind::Gauge { body } => body.dim,
            PhiMKind::Custom { m, .. } => *m,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            PhiMKind::Sum { terms, weights } => terms
                .iter()
                .zip(weights)
                .zip(x)
                .map(|((phi, w), &t)| if *w == 0.0 { 0.0 } else { w * phi.eval(t) })
                .sum(),
            PhiMKind::Max { terms } => terms
                .iter()
                .zip(x)
                .map(|(phi, &t)| phi.eval(t))
                .fold(0.0, f64::max),
            PhiMKind::Gauge { body } => body.gauge(x).unwrap_or(f64::INFINITY),
            PhiMKind::Custom { m: _, f } => f(x),
        }
    }

    /// True when the weights make this a relaxed (non-axis-normalized)
    /// combination.
    pub fn is_weight_relaxed(&self) -> bool {
        match &self.kind {
            PhiMKind::Sum { weights, .. } => weights.iter().any(|w| (w - 1.0).abs() > 1e-15),
            _ => false,
        }
    }

    /// The summands, when this is a sum-structured combination.
    pub fn sum_terms(&self) -> Option<(&[PhiFunction], &[f64])> {
        match &self.kind {
            PhiMKind::Sum { terms, weights } => Some((terms, weights)),
            _ => None,
        }
    }

    /// Check phi(e_j) = 1 for all j.
    pub fn check_axis_normalized(&self) -> Result<()> {
        let m = self.arity();
        for j in 0..m {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            if (self.eval(&e) - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized);
            }
        }
        Ok(())
    }
}

/// Luxemburg norm of a nonnegative vector: inf { lam > 0 : phi(w/lam) <= 1 },
/// 0 when w = o. Bracketed predicate bisection; +inf values of phi count as
/// predicate-false, and flat regions resolve to the least admissible lam.
pub fn luxemburg_norm(phi: &PhiM, w: &[f64]) -> Result<f64> {
    let tols = Tolerances::get();
    let wmax = w.iter().copied().fold(0.0, f64::max);
    if wmax <= 0.0 {
        return Ok(0.0);
    }
    let ok = |lam: f64| -> bool {
        let x: Vec<f64> = w.iter().map(|v| v.max(0.0) / lam).collect();
        let g = phi.eval(&x);
        g.is_finite() && g <= 1.0
    };
    let mut hi = wmax;
    let mut iter = 0;
    while !ok(hi) {
        hi *= 2.0;
        iter += 1;
        if iter > tols.solver_max_iter {
            return Err(Error::SolverFailure { direction: w.to_vec(), lo: wmax, hi });
        }
    }
    let mut lo = hi / 2.0;
    while ok(lo) {
        hi = lo;
        lo /= 2.0;
        if lo < 1e-300 {
            return Ok(0.0);
        }
    }
    for _ in 0..tols.solver_max_iter {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= tols.solver_rel * hi {
            break;
        }
    }
    Ok(hi)
}

/// The 1-unconditional body J_phi = closure of {x : phi(|x_1|,...,|x_m|) <= 1}
/// as an exact polygon (m = 2) or 3D polytope (m = 3), traced radially.
pub fn j_body(phi: &PhiM, samples_per_quadrant: usize) -> Result<ConvexBody> {
    phi.check_axis_normalized()?;
    let m = phi.arity();
    if m != 2 && m != 3 {
        return Err(Error::InvalidParameter("j_body supports arity 2 or 3".into()));
    }
    // radial extent along a positive-orthant unit direction
    let radius = |u: &[f64]| -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
        // J_phi is contained in [-1,1]^m, so r <= sqrt(m) < 2
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let x: Vec<f64> = u.iter().map(|&c| c * mid).collect();
            let g = phi.eval(&x);
            if g.is_finite() && g <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let mut quadrant: Vec<Vec<f64>> = Vec::new();
    if m == 2 {
        quadrant.push(vec![1.0, 0.0]);
        quadrant.push(vec![0.0, 1.0]);
        let n = samples_per_quadrant.max(8);
        for i in 1..n {
            let th = std::f64::consts::FRAC_PI_2 * i as f64 / n as f64;
            let u = vec![th.cos(), th.sin()];
            let r = radius(&u);
            quadrant.push(vec![u[0] * r, u[1] * r]);
        }
    } else {
        for j in 0..3 {
            let mut e = vec![0.0; 3];
            e[j] = 1.0;
            quadrant.push(e);
        }
        let grid = DirectionGrid::icosahedral(16);
        for u in &grid.directions {
            if u.iter().all(|&c| c >= 0.0) {
                let r = radius(u);
                quadrant.push(u.iter().map(|&c| c * r).collect());
            }
        }
    }
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(quadrant.len() << m);
    for p in &quadrant {
        for mask in 0..(1usize << m) {
            pts.push(
                p.iter()
                    .enumerate()
                    .map(|(j, &c)| if mask >> j & 1 == 1 { -c } else { c })
                    .collect(),
            );
        }
    }
    ConvexBody::from_vertices(m, pts)
}

/// Polar of J_phi: the coefficient body realizing +_phi as an M-addition.
pub fn j_polar(phi: &PhiM, samples_per_quadrant: usize) -> Result<ConvexBody> {
    j_body(phi, samples_per_quadrant)?.polar()
}

/// Support function of J_phi-polar evaluated directly through phi: for
/// w >= 0, h_{J_phi^o}(w) is the Luxemburg norm of w. Exact to solver
/// tolerance without any polygonal approximation.
pub fn j_polar_support(phi: &PhiM, w: &[f64]) -> Result<f64> {
    let a: Vec<f64> = w.iter().map(|v| v.abs()).collect();
    luxemburg_norm(phi, &a)
}

/// Degree-1-homogeneous member of Phi_m from a 1-unconditional body with
/// e_j on its boundary: the gauge restricted to the positive orthant.
pub fn gauge_phi_from_body(k: &ConvexBody) -> Result<PhiM> {
    check_unconditional(k)?;
    let m = k.dim;
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        let g = k.gauge(&e)?;
        if (g - 1.0).abs() > 1e-10 {
            return Err(Error::BoundaryNormalization);
        }
    }
    Ok(PhiM { kind: PhiMKind::Gauge { body: k.clone() } })
}

fn check_unconditional(k: &ConvexBody) -> Result<()> {
    let grid = DirectionGrid::with_min_count(k.dim, if k.dim == 2 { 64 } else { 320 });
    let scale = k.max_support_on(&grid).abs().max(1e-300);
    for u in &grid.directions {
        let h = k.support(u);
        for mask in 1..(1usize << k.dim) {
            let v: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(j, &c)| if mask >> j & 1 == 1 { -c } else { c })
                .collect();
            if (k.support(&v) - h).abs() > 1e-9 * scale {
                return Err(Error::NotUnconditional);
            }
        }
    }
    Ok(())
}

/// Which branch of the planar decomposition fired.
#[derive(Clone, Debug, PartialEq)]
pub enum DecompositionCase {
    /// the body is the full square; boundary is max(x1, x2) = 1
    MaxCase,
    /// f'_r(tau1) < 0
    RightSlope,
    /// f'_l(1) > -inf
    LeftSlope,
    /// slope -1 point a with b = f(a)
    Corner { a: f64, b: f64 },
}

type BoundaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Result of decomposing the positive-quadrant boundary f of a planar
/// 1-unconditional body into phi1(x1) + phi2(x2) = 1.
pub struct DecompositionResult {
    pub phi1: PhiFunction,
    pub phi2: PhiFunction,
    pub case: DecompositionCase,
    pub tau1: f64,
    pub tau2: f64,
    boundary: BoundaryFn,
}

impl DecompositionResult {
    /// The concave boundary function f with K cap [0,1]^2 under its graph.
    pub fn boundary(&self, t: f64) -> f64 {
        (self.boundary)(t)
    }
}

/// Decompose a planar 1-unconditional body K with e_1, e_2 on its boundary:
/// find convex phi_1, phi_2 with
/// boundary(K) cap [0,1]^2 = { phi_1(x_1) + phi_2(x_2) = 1 },
/// except for the square, whose boundary is max(x_1, x_2) = 1.
pub fn decompose_2d(k: &ConvexBody) -> Result<DecompositionResult> {
    if k.dim != 2 {
        return Err(Error::InvalidParameter("decomposition is planar only".into()));
    }
    check_unconditional(k)?;
    for e in [[1.0, 0.0], [0.0, 1.0]] {
        let g = k.gauge(&e)?;
        if (g - 1.0).abs() > 1e-10 {
            return Err(Error::BoundaryNormalization);
        }
    }
    let tols = Tolerances::get();

    // square case: (1,1) inside K forces K = [-1,1]^2
    if k.contains(&[1.0 - 1e-12, 1.0 - 1e-12], 1e-9) {
        let id = PhiFunction::identity();
        return Ok(DecompositionResult {
            phi1: id.clone(),
            phi2: id,
            case: DecompositionCase::MaxCase,
            tau1: 0.0,
            tau2: 0.0,
            boundary: Arc::new(|_| 1.0),
        });
    }

    // boundary height f(t) = max{ y : (t, y) in K }, exact membership
    let kb = k.clone();
    let f: BoundaryFn = Arc::new(move |t: f64| -> f64 {
        let t = t.clamp(0.0, 1.0);
        let (mut lo, mut hi) = (0.0_f64, 1.0 + 1e-12);
        if !kb.contains(&[t, lo], 1e-12) {
            return 0.0;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if kb.contains(&[t, mid], 1e-13) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.min(1.0)
    });

    // tau1 = max{t : (t,1) in K}, tau2 = max{t : (1,t) in K}. Membership
    // bisection is ill-conditioned where the boundary is tangent to the
    // edge (a smooth body gives tau = 0 but admits points at distance
    // O(sqrt(tol))), so polytopes read their vertices exactly and other
    // backends fall back to support evidence: tau > 0 requires an actual
    // edge segment, i.e. h(e_j) attained on an interval.
    let edge_extent = |vertical: bool| -> f64 {
        if let Some(verts) = k.vertices() {
            let mut best = 0.0_f64;
            for v in verts {
                let (along, across) = if vertical { (v[0], v[1]) } else { (v[1], v[0]) };
                if across >= 1.0 - 1e-9 {
                    best = best.max(along);
                }
            }
            return best.min(1.0);
        }
        // smooth/oracle backend: secant probe of the boundary height
        let kb = k.clone();
        let height = |t: f64| -> f64 {
            let (mut lo, mut hi) = (0.0_f64, 1.0 + 1e-12);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let p = if vertical { [t, mid] } else { [mid, t] };
                if kb.contains(&p, 1e-13) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        // largest t with height(t) >= 1 - t_gap where the gap rules out
        // tangency artifacts: bisect on height(t) >= 1 - 1e-9, then verify
        // the flat stretch with a midpoint probe
        if height(1e-4) < 1.0 - 1e-9 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if height(mid) >= 1.0 - 1e-9 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let tau1 = edge_extent(true);
    let tau2 = edge_extent(false);

    // strictly-decreasing inverse of f on [tau1, 1], extended by 1 on [0, tau2]
    let f_for_inv = f.clone();
    let (t1c, t2c) = (tau1, tau2);
    let f_inv: BoundaryFn = Arc::new(move |s: f64| -> f64 {
        let s = s.clamp(0.0, 1.0);
        if s <= t2c {
            return 1.0;
        }
        if s >= 1.0 {
            return t1c;
        }
        let (mut lo, mut hi) = (t1c, 1.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f_for_inv(mid) >= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    });

    // one-sided slopes by stable secants: a secant is trusted when halving
    // the step barely changes it (exact on straight facets)
    let h = 1e-7;
    let sec = |x0: f64, x1: f64| (f(x1) - f(x0)) / (x1 - x0);
    let stable = |s1: f64, s2: f64| (s1 - s2).abs() <= 1e-3 * (1.0 + s1.abs());

    let fr_tau1 = {
        let s1 = sec(tau1, (tau1 + h).min(1.0));
        let s2 = sec(tau1, (tau1 + 2.0 * h).min(1.0));
        if stable(s1, s2) { s1 } else { s1.min(s2) }
    };
    let (fl_1, fl_1_finite) = {
        let s1 = sec(1.0 - h, 1.0);
        let s2 = sec(1.0 - 2.0 * h, 1.0);
        (s1, stable(s1, s2))
    };

    let denom_phi = |case: DecompositionCase| -> Result<DecompositionResult> {
        let (phi1, phi2): (PhiFunction, PhiFunction) = match case {
            DecompositionCase::RightSlope => {
                let d = 1.0 - tau1;
                let phi1 = PhiFunction::custom(
                    move |s| (s - t1c).max(0.0) / d,
                    f64::INFINITY,
                    tau1,
                    false,
                );
                // left derivative of f^{-1} at 1 (finite in this case)
                let dinv = (f_inv(1.0) - f_inv(1.0 - h)) / h;
                let fi = f_inv.clone();
                let phi2 = PhiFunction::custom(
                    move |s| {
                        if s <= 1.0 {
                            (1.0 - fi(s)) / d
                        } else {
                            -dinv / d * (s - 1.0) + 1.0
                        }
                    },
                    f64::INFINITY,
                    tau2,
                    false,
                );
                (phi1, phi2)
            }
            DecompositionCase::LeftSlope => {
                let d = 1.0 - tau2;
                let fb = f.clone();
                let slope = fl_1;
                let phi1 = PhiFunction::custom(
                    move |s| {
                        if s <= 1.0 {
                            (1.0 - fb(s)) / d
                        } else {
                            -slope / d * (s - 1.0) + 1.0
                        }
                    },
                    f64::INFINITY,
                    tau1,
                    false,
                );
                let phi2 = PhiFunction::custom(
                    move |s| (s - t2c).max(0.0) / d,
                    f64::INFINITY,
                    tau2,
                    false,
                );
                (phi1, phi2)
            }
            DecompositionCase::Corner { a, b } => {
                let d = 2.0 - a - b;
                let fb = f.clone();
                let phi1 = PhiFunction::custom(
                    move |s| {
                        if s <= a {
                            (1.0 - fb(s)) / d
                        } else {
                            (s + 1.0 - a - b) / d
                        }
                    },
                    f64::INFINITY,
                    tau1,
                    false,
                );
                let fi = f_inv.clone();
                let phi2 = PhiFunction::custom(
                    move |s| {
                        if s <= b {
                            (1.0 - fi(s)) / d
                        } else {
                            (s + 1.0 - a - b) / d
                        }
                    },
                    f64::INFINITY,
                    tau2,
                    false,
                );
                (phi1, phi2)
            }
            DecompositionCase::MaxCase => unreachable!(),
        };
        Ok(DecompositionResult {
            phi1,
            phi2,
            case,
            tau1,
            tau2,
            boundary: f.clone(),
        })
    };

    let result = if fr_tau1 < -1e-6 {
        denom_phi(DecompositionCase::RightSlope)?
    } else if fl_1_finite {
        denom_phi(DecompositionCase::LeftSlope)?
    } else {
        // corner case: the slope of f crosses -1 at a unique a in (tau1, 1)
        let hs = 1e-5;
        let slope_at = |x: f64| (f(x + hs) - f(x - hs)) / (2.0 * hs);
        let (mut lo, mut hi) = (tau1 + 2.0 * hs, 1.0 - 2.0 * hs);
        if slope_at(lo) < -1.0 {
            hi = lo;
            lo = tau1 + 1e-12;
        } else if slope_at(hi) > -1.0 {
            lo = hi;
            hi = 1.0 - 1e-12;
        } else {
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if slope_at(mid) > -1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-13 {
                    break;
                }
            }
        }
        let a = 0.5 * (lo + hi);
        let b = f(a);
        denom_phi(DecompositionCase::Corner { a, b })?
    };

    // verify the boundary identity phi1(x) + phi2(f(x)) = 1 before returning
    for i in 0..=200usize {
        let x = i as f64 / 200.0;
        let v = result.phi1.eval(x) + result.phi2.eval(result.boundary(x));
        if (v - 1.0).abs() > tols.decomposition {
            return Err(Error::InvalidParameter(format!(
                "decomposition identity failed at x = {x}: {v}"
            )));
        }
    }
    Ok(result)
}

/// Outcome of probing f_phi(t) = lim_{eps -> 0+} phi(eps t)/phi(eps).
#[derive(Clone, Debug, PartialEq)]
pub enum PhiLimit {
    Value(f64),
    Divergent,
    Undetermined,
}

/// Probe the small-argument limit of phi(eps t)/phi(eps) over a decreasing
/// eps schedule.
pub fn f_phi_limit(phi: &PhiFunction, t: f64) -> PhiLimit {
    let mut prev: Option<f64> = None;
    let mut growing = true;
    let mut last = f64::NEG_INFINITY;
    for k in 2..=12 {
        let eps = 10f64.powi(-k);
        // ratio in log space: phi can underflow long before eps reaches 0
        let ld = phi.log_eval(eps * t) - phi.log_eval(eps);
        if ld.is_nan() {
            return PhiLimit::Undetermined;
        }
        let r = if ld > 709.0 { f64::INFINITY } else { ld.exp() };
        if !r.is_finite() {
            return PhiLimit::Divergent;
        }
        if r < last {
            growing = false;
        }
        last = r;
        if r > 1e8 && growing {
            return PhiLimit::Divergent;
        }
        if let Some(p) = prev {
            if (r - p).abs() <= 1e-6 * (1.0 + r.abs()) && k >= 6 {
                return PhiLimit::Value(r);
            }
        }
        prev = Some(r);
    }
    if last > 1e8 && growing {
        PhiLimit::Divergent
    } else if let Some(p) = prev {
        // accept a slowly converging finite value
        if (last - p).abs() <= 1e-4 * (1.0 + last.abs()) {
            PhiLimit::Value(last)
        } else {
            PhiLimit::Undetermined
        }
    } else {
        PhiLimit::Undetermined
    }
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
enum PhiSpec {
    Power { p: f64 },
    ExpNormalized,
    Neglog,
    Maxlinear {
        #[serde(default)]
        tau: Option<f64>,
    },
    Piecewise { knots: Vec<(f64, f64)> },
    Pathological,
    Sum {
        terms: Vec<serde_json::Value>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    Max {
        #[serde(default)]
        terms: Option<Vec<serde_json::Value>>,
    },
}

/// A parsed phi description: either a scalar function (to be replicated
/// across the arguments of a sum) or a full multivariate combination.
pub enum ParsedPhi {
    Scalar(PhiFunction),
    Multi(PhiM),
}

impl ParsedPhi {
    /// Resolve to arity m: scalars replicate into a sum of m copies.
    pub fn resolve(&self, m: usize) -> Result<PhiM> {
        match self {
            ParsedPhi::Scalar(phi) => PhiM::replicate(phi, m),
            ParsedPhi::Multi(pm) => {
                if pm.arity() != m {
                    return Err(Error::InvalidParameter(format!(
                        "phi arity {} but {} bodies supplied",
                        pm.arity(),
                        m
                    )));
                }
                Ok(pm.clone())
            }
        }
    }

    pub fn scalar(&self) -> Result<PhiFunction> {
        match self {
            ParsedPhi::Scalar(phi) => Ok(phi.clone()),
            ParsedPhi::Multi(_) => Err(Error::InvalidParameter(
                "a scalar phi is required here, got a multivariate one".into(),
            )),
        }
    }
}

/// Parse a phi description from JSON: scalar families `power`,
/// `exp-normalized`, `neglog`, `maxlinear`, `piecewise`, `pathological`,
/// and combinations `sum` (terms + optional weights) and `max`.
pub fn phi_from_json(v: &serde_json::Value) -> Result<ParsedPhi> {
    let spec: PhiSpec =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    match spec {
        PhiSpec::Power { p } => Ok(ParsedPhi::Scalar(PhiFunction::power(p)?)),
        PhiSpec::ExpNormalized => Ok(ParsedPhi::Scalar(PhiFunction::exp_normalized())),
        PhiSpec::Neglog => Ok(ParsedPhi::Scalar(PhiFunction::neglog())),
        PhiSpec::Maxlinear { tau } => {
            Ok(ParsedPhi::Scalar(PhiFunction::maxlinear(tau.unwrap_or(0.5))?))
        }
        PhiSpec::Piecewise { knots } => Ok(ParsedPhi::Scalar(PhiFunction::piecewise(knots)?)),
        PhiSpec::Pathological => Ok(ParsedPhi::Scalar(PhiFunction::pathological())),
        PhiSpec::Sum { terms, weights } => {
            let parsed: Result<Vec<PhiFunction>> =
                terms.iter().map(|t| phi_from_json(t)?.scalar()).collect();
            let parsed = parsed?;
            match weights {
                Some(w) => Ok(ParsedPhi::Multi(PhiM::weighted_sum(parsed, w)?)),
                None => Ok(ParsedPhi::Multi(PhiM::sum(parsed)?)),
            }
        }
        PhiSpec::Max { terms } => {
            let parsed = match terms {
                Some(ts) => {
                    let p: Result<Vec<PhiFunction>> =
                        ts.iter().map(|t| phi_from_json(t)?.scalar()).collect();
                    p?
                }
                None => vec![PhiFunction::identity(); 2],
            };
            Ok(ParsedPhi::Multi(PhiM::max(parsed)?))
        }
    }
}
