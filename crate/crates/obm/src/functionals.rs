//! The general Luxemburg construction over finite atomic body-measures,
//! with projection bodies, centroid bodies, and their asymmetric variants
//! as configured special cases.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{ConvexBody, DirectionGrid};
use crate::error::{Error, Result};
use crate::geom::dot;
use crate::phi::{PhiFunction, PhiM};
use crate::tol::Tolerances;

/// A finite atomic measure on m-tuples of convex bodies. Each atom pairs a
/// tuple (K_{i1}, ..., K_{im}) with a positive weight.
#[derive(Clone, Debug)]
pub struct DiscreteBodyMeasure {
    pub dim: usize,
    pub arity: usize,
    atoms: Vec<(Vec<ConvexBody>, f64)>,
}

impl DiscreteBodyMeasure {
    pub fn new(atoms: Vec<(Vec<ConvexBody>, f64)>) -> Result<DiscreteBodyMeasure> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let arity = atoms[0].0.len();
        let dim = atoms[0].0[0].dim;
        for (tuple, w) in &atoms {
            if tuple.len() != arity || arity == 0 {
                return Err(Error::InvalidParameter("atom arity mismatch".into()));
            }
            if tuple.iter().any(|b| b.dim != dim) {
                return Err(Error::InvalidParameter("atom dimension mismatch".into()));
            }
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("atom weight {w} must be > 0")));
            }
        }
        Ok(DiscreteBodyMeasure { dim, arity, atoms })
    }

    /// Scalar atoms (arity 1) from body/weight pairs.
    pub fn scalar(atoms: Vec<(ConvexBody, f64)>) -> Result<DiscreteBodyMeasure> {
        DiscreteBodyMeasure::new(atoms.into_iter().map(|(b, w)| (vec![b], w)).collect())
    }

    /// The product measure delta_{K_1} x ... x delta_{K_m}: one atom of
    /// weight 1 carrying the whole tuple.
    pub fn product(bodies: Vec<ConvexBody>) -> Result<DiscreteBodyMeasure> {
        DiscreteBodyMeasure::new(vec![(bodies, 1.0)])
    }

    pub fn atoms(&self) -> &[(Vec<ConvexBody>, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Image measure under a linear map: every body in every atom is
    /// replaced by its image.
    pub fn linear_image(&self, a: &[Vec<f64>]) -> Result<DiscreteBodyMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|(tuple, w)| {
                let imgs = tuple.iter().map(|b| b.linear_image(a)).collect::<Result<_>>()?;
                Ok((imgs, *w))
            })
            .collect::<Result<_>>()?;
        DiscreteBodyMeasure::new(atoms)
    }

    /// Same atoms with perturbed weights (clamped positive).
    pub fn with_weights(&self, weights: &[f64]) -> Result<DiscreteBodyMeasure> {
        if weights.len() != self.atoms.len() {
            return Err(Error::InvalidParameter("weight count mismatch".into()));
        }
        DiscreteBodyMeasure::new(
            self.atoms
                .iter()
                .zip(weights)
                .map(|((t, _), &w)| (t.clone(), w))
                .collect(),
        )
    }
}

/// The body C_{phi,mu} whose support at x is the Luxemburg norm of the
/// atomwise support vector.
#[derive(Clone)]
pub struct LuxemburgBody {
    pub phi: PhiM,
    pub mu: DiscreteBodyMeasure,
    pub result: ConvexBody,
}

/// Weighted-sum Luxemburg solve at a fixed table of per-atom support
/// vectors: the least lam with sum_i w_i phi(s_i / lam) <= 1.
fn luxemburg_weighted(
    phi: &PhiM,
    table: &[(Vec<f64>, f64)],
    direction: &[f64],
) -> Result<f64> {
    let tols = Tolerances::get();
    let smax = table
        .iter()
        .flat_map(|(s, _)| s.iter().copied())
        .fold(0.0_f64, f64::max);
    if smax <= 0.0 {
        return Ok(0.0);
    }
    let total = |lam: f64| -> f64 {
        let mut acc = 0.0;
        for (s, w) in table {
            let scaled: Vec<f64> = s.iter().map(|v| v / lam).collect();
            acc += w * phi.eval(&scaled);
            if !acc.is_finite() {
                return f64::INFINITY;
            }
        }
        acc
    };
    let ok = |lam: f64| total(lam) <= 1.0;
    let mut hi = smax;
    let mut iters = 0;
    while !ok(hi) {
        hi *= 2.0;
        iters += 1;
        if iters > tols.solver_max_iter {
            return Err(Error::SolverFailure {
                direction: direction.to_vec(),
                lo: smax,
                hi,
            });
        }
    }
    let mut lo = hi;
    while ok(lo) {
        lo *= 0.5;
        if lo < 1e-300 {
            return Ok(0.0);
        }
    }
    for _ in 0..tols.solver_max_iter {
        if hi - lo <= tols.solver_rel * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn luxemburg_body(phi: &PhiM, mu: &DiscreteBodyMeasure) -> Result<LuxemburgBody> {
    if mu.arity != phi.arity() {
        return Err(Error::InvalidParameter(format!(
            "phi arity {} vs measure arity {}",
            phi.arity(),
            mu.arity
        )));
    }
    let dim = mu.dim;
    let phic = phi.clone();
    let atoms = mu.atoms.clone();
    let mut preferred: Vec<Vec<f64>> = Vec::new();
    for (tuple, _) in &atoms {
        for b in tuple {
            if let Ok(facets) = b.facets() {
                preferred.extend(facets.iter().map(|f| f.normal.clone()));
            }
        }
    }
    crate::geom::dedup_points(&mut preferred, 1e-12);
    let result = ConvexBody::from_support(
        dim,
        move |x| {
            let table: Vec<(Vec<f64>, f64)> = atoms
                .iter()
                .map(|(tuple, w)| {
                    (tuple.iter().map(|b| b.support(x).max(0.0)).collect(), *w)
                })
                .collect();
            luxemburg_weighted(&phic, &table, x).unwrap_or(f64::NAN)
        },
        preferred,
    );
    // finiteness: exhibit a working lambda at a handful of directions
    let grid = DirectionGrid::with_min_count(dim, 8);
    for u in &grid.directions {
        if result.support(u).is_nan() {
            return Err(Error::SolverFailure {
                direction: u.clone(),
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    Ok(LuxemburgBody {
        phi: phi.clone(),
        mu: mu.clone(),
        result,
    })
}

/// Orlicz projection body of a polytope with the origin interior: the
/// Luxemburg body of the normalized-cone-measure atoms carrying the
/// o-symmetric segments [-v/h_K(v), v/h_K(v)] over the facet normals v.
pub fn orlicz_projection_body(phi: &PhiFunction, k: &ConvexBody) -> Result<ConvexBody> {
    let facets = k.facets()?;
    let vol = k.volume();
    if vol <= 0.0 {
        return Err(Error::ZeroVolume);
    }
    let n = k.dim as f64;
    let mut atoms = Vec::with_capacity(facets.len());
    for f in facets {
        let h = f.offset;
        if h <= Tolerances::get().support {
            return Err(Error::OriginNotInterior);
        }
        let seg = ConvexBody::segment(
            f.normal.iter().map(|c| -c / h).collect(),
            f.normal.iter().map(|c| c / h).collect(),
        );
        atoms.push((seg, f.measure * h / (n * vol)));
    }
    let mu = DiscreteBodyMeasure::scalar(atoms)?;
    let pm = PhiM::replicate(phi, 1)?;
    Ok(luxemburg_body(&pm, &mu)?.result)
}

/// Integration scheme for the centroid body.
#[derive(Clone, Debug)]
pub enum Quadrature {
    /// n x n (x n) product grid of cells clipped to the body.
    Cells(usize),
    /// Seeded rejection sampling inside the body's bounding box.
    MonteCarlo { samples: usize, seed: u64 },
}

fn quadrature_nodes(k: &ConvexBody, quad: &Quadrature) -> Result<Vec<(Vec<f64>, f64)>> {
    let dim = k.dim;
    // bounding box from axis supports
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        hi[j] = k.support(&e);
        e[j] = -1.0;
        lo[j] = -k.support(&e);
    }
    let tol = 0.0;
    let mut nodes = Vec::new();
    match quad {
        Quadrature::Cells(n) => {
            let n = (*n).max(8);
            if dim == 2 {
                let (dx, dy) = ((hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64);
                let cell = dx * dy;
                for i in 0..n {
                    for j in 0..n {
                        let x = vec![lo[0] + (i as f64 + 0.5) * dx, lo[1] + (j as f64 + 0.5) * dy];
                        if k.contains(&x, tol) {
                            nodes.push((x, cell));
                        }
                    }
                }
            } else {
                let n = n.min(128);
                let d: Vec<f64> = (0..dim).map(|j| (hi[j] - lo[j]) / n as f64).collect();
                let cell: f64 = d.iter().product();
                let mut idx = vec![0usize; dim];
                'grid: loop {
                    let x: Vec<f64> = (0..dim)
                        .map(|j| lo[j] + (idx[j] as f64 + 0.5) * d[j])
                        .collect();
                    if k.contains(&x, tol) {
                        nodes.push((x, cell));
                    }
                    let mut j = 0;
                    loop {
                        idx[j] += 1;
                        if idx[j] < n {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                        if j == dim {
                            break 'grid;
                        }
                    }
                }
            }
        }
        Quadrature::MonteCarlo { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed ^ 0x6374_726f);
            let box_vol: f64 = (0..dim).map(|j| hi[j] - lo[j]).product();
            let mut inside = Vec::with_capacity(*samples);
            for _ in 0..*samples {
                let x: Vec<f64> = (0..dim)
                    .map(|j| lo[j] + rng.gen::<f64>() * (hi[j] - lo[j]))
                    .collect();
                if k.contains(&x, tol) {
                    inside.push(x);
                }
            }
            let w = box_vol / *samples as f64;
            nodes.extend(inside.into_iter().map(|x| (x, w)));
        }
    }
    if nodes.is_empty() {
        return Err(Error::ZeroVolume);
    }
    Ok(nodes)
}

fn centroid_body_impl(
    phi: &PhiFunction,
    k: &ConvexBody,
    quad: &Quadrature,
    asymmetric: bool,
) -> Result<ConvexBody> {
    let tols = Tolerances::get();
    if k.min_support_on(&DirectionGrid::with_min_count(k.dim, 32)) <= tols.support {
        return Err(Error::OriginNotInterior);
    }
    let nodes = Arc::new(quadrature_nodes(k, quad)?);
    let mass: f64 = nodes.iter().map(|(_, w)| w).sum();
    let phic = phi.clone();
    let dim = k.dim;
    Ok(ConvexBody::from_support(
        dim,
        move |u| {
            let smax = nodes
                .iter()
                .map(|(x, _)| {
                    let s = dot(u, x);
                    if asymmetric {
                        s.max(0.0)
                    } else {
                        s.abs()
                    }
                })
                .fold(0.0_f64, f64::max);
            if smax <= 0.0 {
                return 0.0;
            }
            let total = |lam: f64| -> f64 {
                let mut acc = 0.0;
                for (x, w) in nodes.iter() {
                    let s = dot(u, x);
                    let s = if asymmetric { s.max(0.0) } else { s.abs() };
                    acc += w * phic.eval(s / lam);
                    if !acc.is_finite() {
                        return f64::INFINITY;
                    }
                }
                acc / mass
            };
            let ok = |lam: f64| total(lam) <= 1.0;
            let mut hi = smax;
            while !ok(hi) {
                hi *= 2.0;
                if hi > smax * 1e6 {
                    return f64::NAN;
                }
            }
            let mut lo = hi;
            while ok(lo) {
                lo *= 0.5;
                if lo < 1e-300 {
                    return 0.0;
                }
            }
            for _ in 0..100 {
                if hi - lo <= 1e-13 * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        },
        Vec::new(),
    ))
}

/// Orlicz centroid body: per direction u the least lam with
/// (1/V(K)) * sum_cells phi(|u.x_c| / lam) vol_c <= 1.
pub fn orlicz_centroid_body(
    phi: &PhiFunction,
    k: &ConvexBody,
    quad: &Quadrature,
) -> Result<ConvexBody> {
    centroid_body_impl(phi, k, quad, false)
}

/// Asymmetric variant: max{u.x, 0} replaces |u.x|.
pub fn orlicz_centroid_body_asymmetric(
    phi: &PhiFunction,
    k: &ConvexBody,
    quad: &Quadrature,
) -> Result<ConvexBody> {
    centroid_body_impl(phi, k, quad, true)
}

/// Image-measure identity: sup grid defect between A C_{phi,mu} and
/// C_{phi,A mu}.
pub fn linear_image_identity_check(
    phi: &PhiM,
    mu: &DiscreteBodyMeasure,
    a: &[Vec<f64>],
    grid: &DirectionGrid,
) -> Result<f64> {
    let lhs = luxemburg_body(phi, mu)?.result.linear_image(a)?;
    let rhs = luxemburg_body(phi, &mu.linear_image(a)?)?.result;
    Ok(crate::bodies::support_distance(&lhs, &rhs, grid))
}
