//! Set additions: M-addition through the support rule, Orlicz addition and
//! linear combination via the Luxemburg solver, hull extensions to compact
//! sets, the parametric planar extension, the Wulff-shape perturbation, and
//! the naive "apply phi to both supports" probe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{ConvexBody, DirectionGrid};
use crate::error::{Error, Result};
use crate::geom::{add, dot, norm, scale};
use crate::phi::{luxemburg_norm, DecompositionResult, PhiFunction, PhiM};
use crate::tol::Tolerances;

/// The coefficient set M of an M-addition, in one of three exact
/// representations: a finite point set (its convex hull when the support
/// rule is taken), the positive L_p arc, or the polar of a J-body given
/// implicitly through its phi.
#[derive(Clone, Debug)]
pub struct CoeffSet {
    kind: CoeffKind,
}

#[derive(Clone)]
enum CoeffKind {
    Points { m: usize, pts: Vec<Vec<f64>> },
    /// { a >= 0 : sum a_j^{p'} <= 1 }, whose support at w >= 0 is the
    /// l_p norm of w (1/p + 1/p' = 1)
    LpArc { m: usize, p: f64 },
    JPolar { phi: PhiM },
}

impl std::fmt::Debug for CoeffKind {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoeffKind::Points { m, pts } => write!(fm, "Points(m={m}, {} pts)", pts.len()),
            CoeffKind::LpArc { m, p } => write!(fm, "LpArc(m={m}, p={p})"),
            CoeffKind::JPolar { phi } => write!(fm, "JPolar({phi:?})"),
        }
    }
}

impl CoeffSet {
    pub fn from_points(pts: Vec<Vec<f64>>) -> Result<CoeffSet> {
        if pts.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient set".into()));
        }
        let m = pts[0].len();
        if pts.iter().any(|p| p.len() != m) {
            return Err(Error::InvalidParameter("coefficient dimension mismatch".into()));
        }
        Ok(CoeffSet { kind: CoeffKind::Points { m, pts } })
    }

    /// M = {(1, ..., 1)}: ordinary Minkowski addition.
    pub fn singleton_ones(m: usize) -> CoeffSet {
        CoeffSet::from_points(vec![vec![1.0; m]]).unwrap()
    }

    /// M = conv{e_1, ..., e_m}; for two bodies in K^n_o this gives
    /// conv(K cup L).
    pub fn simplex(m: usize) -> CoeffSet {
        let pts = (0..m)
            .map(|j| {
                let mut e = vec![0.0; m];
                e[j] = 1.0;
                e
            })
            .collect();
        CoeffSet::from_points(pts).unwrap()
    }

    /// Positive L_p arc: support at nonnegative w is the l_p norm, so the
    /// M-sum is L_p addition.
    pub fn lp_arc(m: usize, p: f64) -> Result<CoeffSet> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("lp arc needs p >= 1, got {p}")));
        }
        Ok(CoeffSet { kind: CoeffKind::LpArc { m, p } })
    }

    /// M = J_phi-polar intersected with the positive orthant: the
    /// coefficient set that realizes +_phi as an M-addition. Its support is
    /// evaluated directly through the Luxemburg norm of phi (no polygonal
    /// approximation).
    pub fn j_polar(phi: PhiM) -> CoeffSet {
        CoeffSet { kind: CoeffKind::JPolar { phi } }
    }

    pub fn arity(&self) -> usize {
        match &self.kind {
            CoeffKind::Points { m, .. } | CoeffKind::LpArc { m, .. } => *m,
            CoeffKind::JPolar { phi } => phi.arity(),
        }
    }

    /// Support function of M (of its convex hull for point sets).
    pub fn support(&self, w: &[f64]) -> f64 {
        match &self.kind {
            CoeffKind::Points { pts, .. } => pts
                .iter()
                .map(|a| dot(a, w))
                .fold(f64::NEG_INFINITY, f64::max),
            CoeffKind::LpArc { p, .. } => {
                if p.is_infinite() {
                    w.iter().map(|v| v.max(0.0)).fold(0.0, f64::max)
                } else {
                    w.iter().map(|v| v.max(0.0).powf(*p)).sum::<f64>().powf(1.0 / p)
                }
            }
            CoeffKind::JPolar { phi } => {
                let wp: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
                luxemburg_norm(phi, &wp).unwrap_or(f64::NAN)
            }
        }
    }

    /// True when M lies in the nonnegative orthant (the regime in which the
    /// support rule holds for bodies containing the origin).
    pub fn nonnegative(&self) -> bool {
        match &self.kind {
            CoeffKind::Points { pts, .. } => {
                pts.iter().all(|a| a.iter().all(|&c| c >= -1e-12))
            }
            CoeffKind::LpArc { .. } | CoeffKind::JPolar { .. } => true,
        }
    }

    /// Deterministic dense sample of M itself (not of its hull): convex
    /// combinations for point sets, the arc parametrization for L_p, the
    /// traced positive boundary plus interior for J-polars.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4d5f_c0ef);
        match &self.kind {
            CoeffKind::Points { pts, m } => {
                let mut out = pts.clone();
                while out.len() < count {
                    // random convex combination of the generators
                    let mut w: Vec<f64> = (0..pts.len()).map(|_| rng.gen::<f64>()).collect();
                    let s: f64 = w.iter().sum();
                    if s <= 0.0 {
                        continue;
                    }
                    w.iter_mut().for_each(|x| *x /= s);
                    let mut p = vec![0.0; *m];
                    for (a, wi) in pts.iter().zip(&w) {
                        p = add(&p, &scale(a, *wi));
                    }
                    out.push(p);
                }
                out
            }
            CoeffKind::LpArc { m, p } => {
                let mut out = Vec::with_capacity(count);
                let q = if *p <= 1.0 { f64::INFINITY } else { p / (p - 1.0) };
                // only m = 2 arcs are needed; higher arities sample the
                // sphere of the dual norm by normalization
                for i in 0..count {
                    let mut u: Vec<f64> = (0..*m).map(|_| rng.gen::<f64>()).collect();
                    if i < count / 2 && *m == 2 {
                        let t = std::f64::consts::FRAC_PI_2 * i as f64 / (count / 2) as f64;
                        u = vec![t.cos(), t.sin()];
                    }
                    let nq = if q.is_infinite() {
                        u.iter().cloned().fold(0.0, f64::max)
                    } else {
                        u.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
                    };
                    if nq > 0.0 {
                        out.push(scale(&u, 1.0 / nq));
                    }
                }
                out
            }
            CoeffKind::JPolar { phi } => {
                // trace the polar of the J-body as a polytope and keep the
                // positive-orthant reflection of its boundary samples
                let m = phi.arity();
                match crate::phi::j_body(phi, count.max(64)).and_then(|j| j.polar()) {
                    Ok(mp) => mp
                        .sample_boundary(count)
                        .into_iter()
                        .map(|p| p.iter().map(|c| c.abs()).collect())
                        .collect(),
                    Err(_) => (0..m)
                        .map(|j| {
                            let mut e = vec![0.0; m];
                            e[j] = 1.0;
                            e
                        })
                        .collect(),
                }
            }
        }
    }
}

fn collect_preferred(bodies: &[ConvexBody]) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for b in bodies {
        if b.is_polytope() {
            if let Ok(facets) = b.facets() {
                dirs.extend(facets.iter().map(|f| f.normal.clone()));
            }
        }
        dirs.extend(b.preferred_directions().iter().cloned());
    }
    crate::geom::dedup_points(&mut dirs, 1e-12);
    dirs
}

/// M-addition through the support rule
/// h(x) = h_M(h_{K_1}(x), ..., h_{K_m}(x)).
/// Valid when M is nonnegative (bodies containing o) or when all bodies are
/// o-symmetric and M is 1-unconditional; outside those regimes the result
/// falls back to the brute-force hull with a warning on stderr.
pub fn m_sum(m: &CoeffSet, bodies: &[ConvexBody]) -> Result<ConvexBody> {
    if bodies.len() != m.arity() {
        return Err(Error::InvalidParameter(format!(
            "coefficient arity {} vs {} bodies",
            m.arity(),
            bodies.len()
        )));
    }
    if bodies.is_empty() {
        return Err(Error::InvalidParameter("no bodies".into()));
    }
    let dim = bodies[0].dim;
    if bodies.iter().any(|b| b.dim != dim) {
        return Err(Error::InvalidParameter("body dimension mismatch".into()));
    }
    if !m.nonnegative() {
        let grid = DirectionGrid::with_min_count(dim, 64);
        let tols = Tolerances::get();
        if !bodies.iter().all(|b| b.is_o_symmetric(&grid, tols.support)) {
            eprintln!(
                "warning: coefficient set has negative coordinates and a body is not \
                 o-symmetric; support rule not guaranteed, using brute-force hull"
            );
            return Ok(m_sum_bruteforce(m, bodies, 20_000, 0));
        }
    }
    let mc = m.clone();
    let bs: Vec<ConvexBody> = bodies.to_vec();
    let preferred = collect_preferred(bodies);
    Ok(ConvexBody::from_support(
        dim,
        move |x| {
            let w: Vec<f64> = bs.iter().map(|b| b.support(x)).collect();
            mc.support(&w)
        },
        preferred,
    ))
}

/// Brute-force M-sum: the convex hull of { sum_j a_j x_j } over dense
/// samples of M and boundary samples of the bodies. Independent reference
/// for `m_sum`; always an inner approximation, converging as the sample
/// budget grows.
pub fn m_sum_bruteforce(
    m: &CoeffSet,
    bodies: &[ConvexBody],
    samples: usize,
    seed: u64,
) -> ConvexBody {
    let dim = bodies[0].dim;
    let nb = bodies.len();
    // split the budget: samples = n_coeff * per_body^nb
    let per_body = ((samples as f64).powf(1.0 / (nb as f64 + 1.0)) as usize).clamp(8, 96);
    let n_coeff = (samples / per_body.pow(nb as u32).max(1)).max(8);
    let body_pts: Vec<Vec<Vec<f64>>> = bodies
        .iter()
        .map(|b| b.sample_boundary(per_body))
        .collect();
    let coeffs = m.sample(n_coeff, seed);
    let cloud = m_sum_cloud(&coeffs, &body_pts, dim);
    ConvexBody::from_vertices(dim, cloud).unwrap_or_else(|_| ConvexBody::origin(dim))
}

/// The raw (not convexified) point set { sum_j a_j x_j }: the full product
/// of the coefficient samples with the per-body point sets. M-addition of
/// arbitrary compact sets.
pub fn m_sum_cloud(
    coeffs: &[Vec<f64>],
    body_pts: &[Vec<Vec<f64>>],
    dim: usize,
) -> Vec<Vec<f64>> {
    let total: usize = body_pts.iter().map(|b| b.len()).product();
    let mut cloud: Vec<Vec<f64>> = Vec::with_capacity(coeffs.len() * total);
    for a in coeffs {
        let mut choice = vec![0usize; body_pts.len()];
        'product: loop {
            let mut p = vec![0.0; dim];
            for (j, &ci) in choice.iter().enumerate() {
                p = add(&p, &scale(&body_pts[j][ci], a[j]));
            }
            cloud.push(p);
            let mut j = 0;
            loop {
                choice[j] += 1;
                if choice[j] < body_pts[j].len() {
                    break;
                }
                choice[j] = 0;
                j += 1;
                if j == body_pts.len() {
                    break 'product;
                }
            }
        }
    }
    cloud
}

/// Orlicz sum of bodies containing the origin: the support function is the
/// Luxemburg norm of the support vector, direction by direction.
pub fn orlicz_sum(phi: &PhiM, bodies: &[ConvexBody]) -> Result<ConvexBody> {
    if bodies.len() != phi.arity() {
        return Err(Error::InvalidParameter(format!(
            "phi arity {} vs {} bodies",
            phi.arity(),
            bodies.len()
        )));
    }
    let dim = bodies[0].dim;
    if bodies.iter().any(|b| b.dim != dim) {
        return Err(Error::InvalidParameter("body dimension mismatch".into()));
    }
    let tols = Tolerances::get();
    for b in bodies {
        if !b.contains(&vec![0.0; dim], tols.support) {
            return Err(Error::InvalidParameter(
                "orlicz addition requires bodies containing the origin".into(),
            ));
        }
    }
    let phic = phi.clone();
    let bs: Vec<ConvexBody> = bodies.to_vec();
    let preferred = collect_preferred(bodies);
    let body = ConvexBody::from_support(
        dim,
        move |x| {
            let w: Vec<f64> = bs.iter().map(|b| b.support(x).max(0.0)).collect();
            // single-support shortcut: with a normalized summand, the sum
            // reduces to that body's support exactly
            let positive: Vec<usize> =
                (0..w.len()).filter(|&j| w[j] > 0.0).collect();
            if positive.is_empty() {
                return 0.0;
            }
            if positive.len() == 1 {
                if let Some((terms, weights)) = phic.sum_terms() {
                    let j = positive[0];
                    if (weights[j] - 1.0).abs() < 1e-15 && terms[j].is_normalized() {
                        return w[j];
                    }
                }
            }
            luxemburg_norm(&phic, &w).unwrap_or(f64::NAN)
        },
        preferred,
    );
    // eagerly validate the solver on a coarse grid
    let grid = DirectionGrid::with_min_count(dim, 16);
    for u in &grid.directions {
        let h = body.support(u);
        if h.is_nan() {
            return Err(Error::SolverFailure {
                direction: u.clone(),
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    Ok(body)
}

/// Orlicz linear combination: per direction the least lam with
/// alpha phi1(h_K/lam) + beta phi2(h_L/lam) <= 1.
pub fn orlicz_linear_combination(
    phi1: &PhiFunction,
    phi2: &PhiFunction,
    k: &ConvexBody,
    l: &ConvexBody,
    alpha: f64,
    beta: f64,
) -> Result<ConvexBody> {
    if alpha < 0.0 || beta < 0.0 {
        return Err(Error::InvalidParameter("coefficients must be >= 0".into()));
    }
    if alpha + beta == 0.0 {
        return Ok(ConvexBody::origin(k.dim));
    }
    let pm = PhiM::weighted_sum(vec![phi1.clone(), phi2.clone()], vec![alpha, beta])?;
    orlicz_sum(&pm, &[k.clone(), l.clone()])
}

/// Orlicz addition extended to arbitrary compact convex inputs by summing
/// conv{K, o} instead of K.
pub fn orlicz_sum_compact(phi: &PhiM, sets: &[ConvexBody]) -> Result<ConvexBody> {
    let hulls: Vec<ConvexBody> = sets
        .iter()
        .map(|s| {
            if s.is_polytope() {
                let mut v = s.vertices().unwrap().clone();
                v.push(vec![0.0; s.dim]);
                ConvexBody::from_vertices(s.dim, v)
            } else {
                let inner = s.clone();
                Ok(ConvexBody::from_support(
                    s.dim,
                    move |x| inner.support(x).max(0.0),
                    s.preferred_directions().to_vec(),
                ))
            }
        })
        .collect::<Result<_>>()?;
    orlicz_sum(phi, &hulls)
}

/// The sampled parametric extension of a planar-decomposed Orlicz addition:
/// the point set { psihat1^{-1}(1-t) x + psihat2^{-1}(t) y } over a t-grid
/// and boundary samples. Convexity of the raw cloud is NOT assumed.
pub struct ParametricSum {
    pub cloud: Vec<Vec<f64>>,
    pub hull: ConvexBody,
    pub t_samples: usize,
    pub boundary_samples: usize,
}

pub fn orlicz_sum_parametric(
    decomp: &DecompositionResult,
    k_pts: &[Vec<f64>],
    l_pts: &[Vec<f64>],
    t_samples: usize,
    dim: usize,
) -> Result<ParametricSum> {
    use crate::phi::DecompositionCase;
    if decomp.case == DecompositionCase::MaxCase {
        return Err(Error::SquareCase);
    }
    let t_samples = t_samples.max(3);
    let mut cloud: Vec<Vec<f64>> = Vec::with_capacity(t_samples * k_pts.len().max(1));
    for it in 0..t_samples {
        let t = it as f64 / (t_samples - 1) as f64;
        let c1 = decomp.phi1.inverse(1.0 - t)?;
        let c2 = decomp.phi2.inverse(t)?;
        for x in k_pts {
            for y in l_pts {
                cloud.push(add(&scale(x, c1), &scale(y, c2)));
            }
        }
    }
    let hull = ConvexBody::from_vertices(dim, cloud.clone())?;
    Ok(ParametricSum {
        cloud,
        hull,
        t_samples,
        boundary_samples: k_pts.len().max(l_pts.len()),
    })
}

/// Wulff-shape perturbation of K by L at scale eps: the intersection of
/// { x . u <= phihat^{-1}( phi(h_K(u)) + eps phi(h_L(u)) ) } over the grid.
pub fn wulff_sum(
    phi: &PhiFunction,
    k: &ConvexBody,
    l: &ConvexBody,
    eps: f64,
    grid: &DirectionGrid,
) -> Result<ConvexBody> {
    let tols = Tolerances::get();
    if k.min_support_on(grid) <= tols.support {
        return Err(Error::OriginNotInterior);
    }
    if eps < 0.0 {
        return Err(Error::InvalidParameter("eps must be >= 0".into()));
    }
    let mut dirs = grid.directions.clone();
    for p in collect_preferred(&[k.clone(), l.clone()]) {
        dirs.push(p);
    }
    crate::geom::dedup_points(&mut dirs, 1e-12);
    let mut offsets = Vec::with_capacity(dirs.len());
    for u in &dirs {
        let v = phi.eval(k.support(u)) + eps * phi.eval(l.support(u)).min(f64::MAX);
        offsets.push(phi.inverse(v)?);
    }
    ConvexBody::from_halfspaces(&dirs, &offsets)
}

/// Report of the naive-sum subadditivity probe.
#[derive(Clone, Debug)]
pub struct NaiveProbe {
    pub is_support_function: bool,
    pub worst_defect: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Probe whether the naive sum phi^{-1}(phi(h_K) + phi(h_L)), taken on the
/// unit sphere as any support-grid evaluation is, extends to a support
/// function: its 1-homogeneous extension H is searched for subadditivity
/// violations H(x+y) > H(x) + H(y), first over a deterministic sweep of
/// direction pairs (violations concentrate where one summand's support is
/// near zero, a narrow region random pairs can miss), then over seeded
/// random pairs. For phi = t^p the expression is already homogeneous and
/// no violation exists.
pub fn naive_sum_probe(
    phi: &PhiFunction,
    k: &ConvexBody,
    l: &ConvexBody,
    pairs: usize,
    seed: u64,
) -> Result<NaiveProbe> {
    let dim = k.dim;
    let h = |x: &[f64]| -> Result<f64> {
        let r = norm(x);
        if r == 0.0 {
            return Ok(0.0);
        }
        let u = scale(x, 1.0 / r);
        let v = phi.inverse(
            phi.eval(k.support(&u).max(0.0)) + phi.eval(l.support(&u).max(0.0)),
        )?;
        Ok(r * v)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e61_6976);
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let sweep = DirectionGrid::with_min_count(dim, 96);
    for x in &sweep.directions {
        for y in &sweep.directions {
            let defect = h(&add(x, y))? - h(x)? - h(y)?;
            if defect > worst {
                worst = defect;
                witness = Some((x.clone(), y.clone()));
            }
        }
    }
    for _ in 0..pairs {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        if norm(&x) < 1e-6 || norm(&y) < 1e-6 {
            continue;
        }
        let defect = h(&add(&x, &y))? - h(&x)? - h(&y)?;
        if defect > worst {
            worst = defect;
            witness = Some((x, y));
        }
    }
    Ok(NaiveProbe {
        is_support_function: worst <= 1e-9,
        worst_defect: worst,
        witness,
    })
}

/// Associativity defect of the two-fold Orlicz sum with a scalar phi:
/// sup over the grid of |h_{(K+L)+M} - h_{K+(L+M)}|.
pub fn associativity_defect(
    phi: &PhiFunction,
    k: &ConvexBody,
    l: &ConvexBody,
    m: &ConvexBody,
    grid: &DirectionGrid,
) -> Result<f64> {
    let pm = PhiM::replicate(phi, 2)?;
    let left = orlicz_sum(&pm, &[orlicz_sum(&pm, &[k.clone(), l.clone()])?, m.clone()])?;
    let right = orlicz_sum(&pm, &[k.clone(), orlicz_sum(&pm, &[l.clone(), m.clone()])?])?;
    Ok(crate::bodies::support_distance(&left, &right, grid))
}

/// Closed-form L_p sum support, the reference for the power-family paths.
pub fn lp_sum_support(p: f64, k: &ConvexBody, l: &ConvexBody, x: &[f64]) -> f64 {
    let (a, b) = (k.support(x).max(0.0), l.support(x).max(0.0));
    if p.is_infinite() {
        a.max(b)
    } else {
        (a.powf(p) + b.powf(p)).powf(1.0 / p)
    }
}
