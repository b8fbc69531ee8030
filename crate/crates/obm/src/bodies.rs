//! Convex bodies in R^2 and R^3: polytope, ball, and support-function
//! backends, direction grids, support/radial/gauge evaluation, polar duals,
//! outer polytope approximation, volume, and discrete surface-area / cone
//! measures.

use std::sync::{Arc, OnceLock};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geom::{
    self, add, dot, hull2d, hull3d_facets, norm, normalize, polygon_area, polygon_contains,
    polygon_facets, scale, sub, Facet,
};
use crate::tol::Tolerances;

/// Volume of the unit ball.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("dimension must be 1, 2 or 3"),
    }
}

/// A finite set of unit directions used for support sampling, outer
/// polytopes, and symmetry checks. Closed under negation.
#[derive(Clone, Debug)]
pub struct DirectionGrid {
    pub dim: usize,
    pub directions: Vec<Vec<f64>>,
}

impl DirectionGrid {
    /// 2D grid of `count` equally spaced angles. `count` is rounded up to
    /// the next even number so the grid is closed under negation.
    pub fn uniform2d(count: usize) -> Self {
        let count = if count % 2 == 0 { count } else { count + 1 }.max(4);
        let directions = (0..count)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        DirectionGrid { dim: 2, directions }
    }

    /// 3D grid from a frequency-`f` subdivision of the icosahedron,
    /// 10f^2 + 2 directions, antipodally symmetric.
    pub fn icosahedral(frequency: usize) -> Self {
        let f = frequency.max(1);
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let mut base: Vec<Vec<f64>> = Vec::new();
        for &s in &[1.0, -1.0] {
            for &t in &[phi, -phi] {
                base.push(vec![0.0, s, t]);
                base.push(vec![s, t, 0.0]);
                base.push(vec![t, 0.0, s]);
            }
        }
        let base: Vec<Vec<f64>> = base.iter().map(|v| normalize(v)).collect();
        let faces = geom::hull3d(&base);
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for face in &faces {
            let (a, b, c) = (
                &base[face.idx[0]],
                &base[face.idx[1]],
                &base[face.idx[2]],
            );
            for i in 0..=f {
                for j in 0..=(f - i) {
                    let k = f - i - j;
                    let p = add(
                        &add(&scale(a, i as f64), &scale(b, j as f64)),
                        &scale(c, k as f64),
                    );
                    pts.push(normalize(&p));
                }
            }
        }
        geom::dedup_points(&mut pts, 1e-9);
        pts.sort_by(|a, b| {
            a.partial_cmp(b).unwrap()
        });
        DirectionGrid { dim: 3, directions: pts }
    }

    /// Grid with at least `min_count` directions in the given dimension.
    pub fn with_min_count(dim: usize, min_count: usize) -> Self {
        match dim {
            2 => DirectionGrid::uniform2d(min_count),
            3 => {
                let mut f = 1;
                while 10 * f * f + 2 < min_count {
                    f += 1;
                }
                DirectionGrid::icosahedral(f)
            }
            _ => panic!("dimension must be 2 or 3"),
        }
    }

    /// Default working grid: 720 directions in 2D, 1442 in 3D.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            2 => DirectionGrid::uniform2d(720),
            3 => DirectionGrid::icosahedral(12),
            _ => panic!("dimension must be 2 or 3"),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

type SupportFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Backend {
    /// Vertices; in 2D stored in counterclockwise hull order.
    Polytope(Vec<Vec<f64>>),
    Ball { radius: f64 },
    Support(SupportFn),
}

/// A compact convex body, dimension 2 or 3. Possibly degenerate (a point
/// or segment is a valid body), possibly given only through its support
/// function.
#[derive(Clone)]
pub struct ConvexBody {
    pub dim: usize,
    backend: Backend,
    /// Directions worth adding to any outer grid built around this body
    /// (facet normals of polytope ingredients survive sums and scalings,
    /// which makes outer polytopes of dilatate combinations exact).
    preferred: Vec<Vec<f64>>,
    facets: OnceLock<Option<Vec<Facet>>>,
}

impl std::fmt::Debug for ConvexBody {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.backend {
            Backend::Polytope(v) => write!(fm, "Polytope(dim={}, {} verts)", self.dim, v.len()),
            Backend::Ball { radius } => write!(fm, "Ball(dim={}, r={})", self.dim, radius),
            Backend::Support(_) => write!(fm, "SupportOracle(dim={})", self.dim),
        }
    }
}

impl ConvexBody {
    pub fn from_vertices(dim: usize, vertices: Vec<Vec<f64>>) -> Result<ConvexBody> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("empty vertex list".into()));
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter("vertex dimension mismatch".into()));
        }
        let verts = match dim {
            2 => hull2d(&vertices),
            3 => {
                let mut v = vertices;
                geom::dedup_points(&mut v, 1e-13);
                v
            }
            _ => return Err(Error::InvalidParameter("dimension must be 2 or 3".into())),
        };
        Ok(ConvexBody {
            dim,
            backend: Backend::Polytope(verts),
            preferred: Vec::new(),
            facets: OnceLock::new(),
        })
    }

    /// `{x : normals[i] . x <= offsets[i]}`. The intersection must be
    /// bounded with nonempty interior.
    pub fn from_halfspaces(normals: &[Vec<f64>], offsets: &[f64]) -> Result<ConvexBody> {
        if normals.is_empty() || normals.len() != offsets.len() {
            return Err(Error::InvalidParameter(
                "halfspace normals/offsets mismatch".into(),
            ));
        }
        let dim = normals[0].len();
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter("dimension must be 2 or 3".into()));
        }
        let mut units: Vec<Vec<f64>> = Vec::with_capacity(normals.len());
        let mut offs: Vec<f64> = Vec::with_capacity(normals.len());
        for (nv, &c) in normals.iter().zip(offsets) {
            let l = norm(nv);
            if l < 1e-300 {
                return Err(Error::ZeroVector);
            }
            units.push(scale(nv, 1.0 / l));
            offs.push(c / l);
        }
        // bounded iff the unit normals positively span: o interior to their hull
        let spanning = match dim {
            2 => {
                let h = hull2d(&units);
                h.len() >= 3 && polygon_facets(&h).iter().all(|f| f.offset > 1e-9)
            }
            _ => {
                !geom::degenerate3d(&units)
                    && hull3d_facets(&units).iter().all(|f| f.offset > 1e-9)
            }
        };
        if !spanning {
            return Err(Error::DegenerateBody);
        }
        let p = interior_point(&units, &offs).ok_or(Error::DegenerateBody)?;
        let shifted: Vec<f64> = units.iter().zip(&offs).map(|(u, c)| c - dot(u, &p)).collect();
        let mut verts = geom::halfspace_intersection(&units, &shifted);
        for v in verts.iter_mut() {
            *v = add(v, &p);
        }
        // reject unbounded input: duality of an unbounded region produces
        // vertices violating some constraint or escaping to huge norms
        let big = 1e12 * offs.iter().fold(1.0_f64, |a, c| a.max(c.abs()));
        for v in &verts {
            if norm(v) > big {
                return Err(Error::DegenerateBody);
            }
            for (u, &c) in units.iter().zip(&offs) {
                if dot(u, v) > c + 1e-7 * (1.0 + c.abs()) {
                    return Err(Error::DegenerateBody);
                }
            }
        }
        let mut body = ConvexBody::from_vertices(dim, verts)?;
        body.preferred = units;
        Ok(body)
    }

    pub fn ball(dim: usize, radius: f64) -> ConvexBody {
        assert!(radius >= 0.0 && (dim == 2 || dim == 3));
        ConvexBody {
            dim,
            backend: Backend::Ball { radius },
            preferred: Vec::new(),
            facets: OnceLock::new(),
        }
    }

    /// Body given through a sublinear support function. `preferred` seeds
    /// the outer-grid direction set (e.g. facet normals of ingredients).
    pub fn from_support(
        dim: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        preferred: Vec<Vec<f64>>,
    ) -> ConvexBody {
        ConvexBody {
            dim,
            backend: Backend::Support(Arc::new(f)),
            preferred,
            facets: OnceLock::new(),
        }
    }

    pub fn origin(dim: usize) -> ConvexBody {
        ConvexBody::from_vertices(dim, vec![vec![0.0; dim]]).unwrap()
    }

    /// Axis-parallel rectangle with side lengths `a x b`, centered at the
    /// origin when `centered`, otherwise `[0,a] x [0,b]`.
    pub fn rectangle(a: f64, b: f64, centered: bool) -> ConvexBody {
        let verts = if centered {
            vec![
                vec![-a / 2.0, -b / 2.0],
                vec![a / 2.0, -b / 2.0],
                vec![a / 2.0, b / 2.0],
                vec![-a / 2.0, b / 2.0],
            ]
        } else {
            vec![vec![0.0, 0.0], vec![a, 0.0], vec![a, b], vec![0.0, b]]
        };
        ConvexBody::from_vertices(2, verts).unwrap()
    }

    pub fn cube(dim: usize, half_side: f64) -> ConvexBody {
        let mut verts = Vec::new();
        let n = 1usize << dim;
        for mask in 0..n {
            let v: Vec<f64> = (0..dim)
                .map(|j| if mask >> j & 1 == 1 { half_side } else { -half_side })
                .collect();
            verts.push(v);
        }
        ConvexBody::from_vertices(dim, verts).unwrap()
    }

    pub fn segment(p: Vec<f64>, q: Vec<f64>) -> ConvexBody {
        let dim = p.len();
        ConvexBody::from_vertices(dim, vec![p, q]).unwrap()
    }

    pub fn is_polytope(&self) -> bool {
        matches!(self.backend, Backend::Polytope(_))
    }

    pub fn vertices(&self) -> Option<&Vec<Vec<f64>>> {
        match &self.backend {
            Backend::Polytope(v) => Some(v),
            _ => None,
        }
    }

    pub fn preferred_directions(&self) -> &[Vec<f64>] {
        &self.preferred
    }

    pub fn with_preferred(mut self, dirs: Vec<Vec<f64>>) -> ConvexBody {
        self.preferred = dirs;
        self
    }

    /// Support function h(x) = sup { x . y : y in the body }. Positively
    /// homogeneous; x need not be a unit vector.
    pub fn support(&self, x: &[f64]) -> f64 {
        match &self.backend {
            Backend::Polytope(v) => v
                .iter()
                .map(|p| dot(p, x))
                .fold(f64::NEG_INFINITY, f64::max),
            Backend::Ball { radius } => radius * norm(x),
            Backend::Support(f) => f(x),
        }
    }

    /// Facets (unit outward normal, measure, offset) of a full-dimensional
    /// polytope. Errors for ball/support backends and degenerate polytopes.
    pub fn facets(&self) -> Result<&[Facet]> {
        let computed = self.facets.get_or_init(|| match &self.backend {
            Backend::Polytope(v) => match self.dim {
                2 => {
                    if v.len() < 3 {
                        None
                    } else {
                        Some(polygon_facets(v))
                    }
                }
                3 => {
                    if geom::degenerate3d(v) {
                        None
                    } else {
                        Some(hull3d_facets(v))
                    }
                }
                _ => None,
            },
            _ => None,
        });
        match computed {
            Some(f) => Ok(f),
            None => Err(Error::DegenerateBody),
        }
    }

    pub fn translate(&self, t: &[f64]) -> ConvexBody {
        let t = t.to_vec();
        match &self.backend {
            Backend::Polytope(v) => {
                let verts = v.iter().map(|p| add(p, &t)).collect();
                ConvexBody {
                    dim: self.dim,
                    backend: Backend::Polytope(verts),
                    preferred: self.preferred.clone(),
                    facets: OnceLock::new(),
                }
            }
            Backend::Ball { radius } => {
                let r = *radius;
                ConvexBody::from_support(
                    self.dim,
                    move |x| r * norm(x) + dot(&t, x),
                    self.preferred.clone(),
                )
            }
            Backend::Support(f) => {
                let f = f.clone();
                ConvexBody::from_support(
                    self.dim,
                    move |x| f(x) + dot(&t, x),
                    self.preferred.clone(),
                )
            }
        }
    }

    /// Dilate by a nonnegative factor.
    pub fn scale_body(&self, r: f64) -> ConvexBody {
        assert!(r >= 0.0, "scale factor must be nonnegative");
        match &self.backend {
            Backend::Polytope(v) => {
                let verts = v.iter().map(|p| scale(p, r)).collect();
                ConvexBody {
                    dim: self.dim,
                    backend: Backend::Polytope(verts),
                    preferred: self.preferred.clone(),
                    facets: OnceLock::new(),
                }
            }
            Backend::Ball { radius } => ConvexBody::ball(self.dim, radius * r),
            Backend::Support(f) => {
                let f = f.clone();
                ConvexBody::from_support(self.dim, move |x| r * f(x), self.preferred.clone())
            }
        }
    }

    /// Image under a linear map given as a row-major matrix. Polytopes map
    /// exactly through their vertices; other backends become support
    /// oracles via h_{AK}(x) = h_K(A^T x).
    pub fn linear_image(&self, m: &[Vec<f64>]) -> Result<ConvexBody> {
        let dim = self.dim;
        if m.len() != dim || m.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidParameter("matrix shape mismatch".into()));
        }
        let apply = |x: &[f64], mat: &[Vec<f64>]| -> Vec<f64> {
            mat.iter().map(|row| dot(row, x)).collect()
        };
        match &self.backend {
            Backend::Polytope(v) => {
                let verts: Vec<Vec<f64>> = v.iter().map(|p| apply(p, m)).collect();
                ConvexBody::from_vertices(dim, verts)
            }
            _ => {
                let mt: Vec<Vec<f64>> = (0..dim)
                    .map(|i| (0..dim).map(|j| m[j][i]).collect())
                    .collect();
                let inner = self.clone();
                Ok(ConvexBody::from_support(
                    dim,
                    move |x| inner.support(&mt.iter().map(|row| dot(row, x)).collect::<Vec<f64>>()),
                    Vec::new(),
                ))
            }
        }
    }

    /// (n-1)-volume of the orthogonal projection onto the hyperplane
    /// through o normal to `u` (Cauchy's formula for polytopes).
    pub fn projection_volume(&self, u: &[f64]) -> Result<f64> {
        let un = normalize(u);
        if norm(&un) == 0.0 {
            return Err(Error::ZeroVector);
        }
        match &self.backend {
            Backend::Ball { radius } => Ok(unit_ball_volume(self.dim - 1)
                * radius.powi(self.dim as i32 - 1)),
            Backend::Polytope(v) => {
                if self.dim == 2 {
                    let w = vec![-un[1], un[0]];
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for p in v {
                        let t = dot(p, &w);
                        lo = lo.min(t);
                        hi = hi.max(t);
                    }
                    Ok((hi - lo).max(0.0))
                } else {
                    let facets = self.facets()?;
                    Ok(facets.iter().map(|f| (dot(&f.normal, &un)).abs() * f.measure).sum::<f64>()
                        / 2.0)
                }
            }
            Backend::Support(_) => {
                // project the outer polytope
                self.outer_polytope(&DirectionGrid::default_for(self.dim))?
                    .projection_volume(u)
            }
        }
    }

    /// Orthogonal projection of a 3D body onto the plane normal to `u`,
    /// returned as a 2D polygon in an orthonormal basis of that plane.
    pub fn project_to_plane(&self, u: &[f64]) -> Result<ConvexBody> {
        if self.dim != 3 {
            return Err(Error::InvalidParameter("projection needs a 3D body".into()));
        }
        let un = normalize(u);
        let mut e1 = if un[0].abs() < 0.9 {
            vec![1.0, 0.0, 0.0]
        } else {
            vec![0.0, 1.0, 0.0]
        };
        e1 = normalize(&sub(&e1, &scale(&un, dot(&e1, &un))));
        let e2 = geom::cross3(&un, &e1);
        match &self.backend {
            Backend::Polytope(v) => {
                let pts: Vec<Vec<f64>> = v.iter().map(|p| vec![dot(p, &e1), dot(p, &e2)]).collect();
                ConvexBody::from_vertices(2, pts)
            }
            Backend::Ball { radius } => Ok(ConvexBody::ball(2, *radius)),
            Backend::Support(_) => self
                .outer_polytope(&DirectionGrid::default_for(3))?
                .project_to_plane(u),
        }
    }

    /// Largest t with t*x in the body (radial function), requiring the
    /// origin to belong to the body. Exact for polytopes via facets.
    pub fn radial(&self, x: &[f64]) -> Result<f64> {
        let tols = Tolerances::get();
        if norm(x) == 0.0 {
            return Err(Error::ZeroVector);
        }
        match &self.backend {
            Backend::Ball { radius } => Ok(radius / norm(x)),
            Backend::Polytope(_) => {
                let facets = self.facets()?;
                if facets.iter().any(|f| f.offset < -tols.support) {
                    return Err(Error::OriginNotInterior);
                }
                let mut r = f64::INFINITY;
                for f in facets {
                    let d = dot(&f.normal, x);
                    if d > 0.0 {
                        r = r.min((f.offset.max(0.0)) / d);
                    }
                }
                Ok(r)
            }
            Backend::Support(_) => {
                let grid = DirectionGrid::default_for(self.dim);
                let mut r = f64::INFINITY;
                for u in &grid.directions {
                    let d = dot(u, x);
                    if d > 0.0 {
                        let h = self.support(u);
                        if h < -tols.support {
                            return Err(Error::OriginNotInterior);
                        }
                        r = r.min(h.max(0.0) / d);
                    }
                }
                Ok(r)
            }
        }
    }

    /// Gauge (Minkowski functional): min { t >= 0 : x in t * body }.
    /// Requires the origin in the interior; gauge(o) = 0.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        if norm(x) == 0.0 {
            return Ok(0.0);
        }
        let r = self.radial(x)?;
        if !(r > 0.0) {
            return Err(Error::OriginNotInterior);
        }
        Ok(1.0 / r)
    }

    /// Membership test with tolerance.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match &self.backend {
            Backend::Ball { radius } => norm(x) <= radius + tol,
            Backend::Polytope(v) => {
                if self.dim == 2 {
                    polygon_contains(v, x, tol)
                } else if let Ok(facets) = self.facets() {
                    facets.iter().all(|f| dot(&f.normal, x) <= f.offset + tol)
                } else {
                    // degenerate 3D set: distance to hull of the points
                    v.iter().any(|p| norm(&sub(p, x)) <= tol) || {
                        // fall back to segment checks between stored points
                        v.iter().enumerate().any(|(i, p)| {
                            v[i + 1..].iter().any(|q| {
                                let d = sub(q, p);
                                let dd = dot(&d, &d);
                                if dd == 0.0 {
                                    return false;
                                }
                                let t = (dot(&sub(x, p), &d) / dd).clamp(0.0, 1.0);
                                norm(&sub(x, &add(p, &scale(&d, t)))) <= tol
                            })
                        })
                    }
                }
            }
            Backend::Support(_) => {
                let grid = DirectionGrid::default_for(self.dim);
                grid.directions
                    .iter()
                    .all(|u| dot(u, x) <= self.support(u) + tol)
            }
        }
    }

    pub fn min_support_on(&self, grid: &DirectionGrid) -> f64 {
        grid.directions
            .iter()
            .map(|u| self.support(u))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_support_on(&self, grid: &DirectionGrid) -> f64 {
        grid.directions
            .iter()
            .map(|u| self.support(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Symmetry about the origin, checked on a grid closed under negation.
    pub fn is_o_symmetric(&self, grid: &DirectionGrid, tol: f64) -> bool {
        let s = self.max_support_on(grid).abs().max(1.0);
        grid.directions.iter().all(|u| {
            let mu = scale(u, -1.0);
            (self.support(u) - self.support(&mu)).abs() <= tol * s
        })
    }

    /// Circumscribed polytope: intersection of the supporting halfspaces in
    /// the grid directions plus this body's preferred directions. Contains
    /// the body; equals it when the body is a polytope whose facet normals
    /// are covered.
    pub fn outer_polytope(&self, grid: &DirectionGrid) -> Result<ConvexBody> {
        let mut dirs: Vec<Vec<f64>> = grid.directions.clone();
        for p in &self.preferred {
            let pn = normalize(p);
            if norm(&pn) > 0.0 {
                dirs.push(pn);
            }
        }
        geom::dedup_points(&mut dirs, 1e-12);
        let offs: Vec<f64> = dirs.iter().map(|u| self.support(u)).collect();

        // approximate Steiner point: always interior, shifts the offsets
        // positive so polar duality applies
        let m = grid.len() as f64;
        let mut p = vec![0.0; self.dim];
        for u in &grid.directions {
            p = add(&p, &scale(u, self.support(u)));
        }
        p = scale(&p, self.dim as f64 / m);
        let shifted: Vec<f64> = dirs.iter().zip(&offs).map(|(u, c)| c - dot(u, &p)).collect();
        let scale_hint = offs.iter().fold(1e-300_f64, |a, c| a.max(c.abs()));
        let worst = shifted.iter().copied().fold(f64::INFINITY, f64::min);
        let (p, shifted) = if worst > 1e-9 * scale_hint {
            (p, shifted)
        } else {
            let p2 = interior_point(&dirs, &offs).ok_or(Error::DegenerateBody)?;
            let s2: Vec<f64> = dirs.iter().zip(&offs).map(|(u, c)| c - dot(u, &p2)).collect();
            if s2.iter().copied().fold(f64::INFINITY, f64::min) <= 0.0 {
                return Err(Error::DegenerateBody);
            }
            (p2, s2)
        };
        let mut verts = geom::halfspace_intersection(&dirs, &shifted);
        for v in verts.iter_mut() {
            *v = add(v, &p);
        }
        let mut body = ConvexBody::from_vertices(self.dim, verts)?;
        body.preferred = self.preferred.clone();
        Ok(body)
    }

    /// Volume. Exact for polytopes and balls; support oracles use the outer
    /// polytope on the default grid (an overestimate).
    pub fn volume(&self) -> f64 {
        match &self.backend {
            Backend::Polytope(v) => match self.dim {
                2 => polygon_area(v),
                _ => geom::volume3d(v),
            },
            Backend::Ball { radius } => unit_ball_volume(self.dim) * radius.powi(self.dim as i32),
            Backend::Support(_) => self.volume_on_grid(&DirectionGrid::default_for(self.dim)),
        }
    }

    /// Volume of the outer polytope on a given grid, for every backend:
    /// two bodies measured on the same grid share the discretization bias,
    /// which matters for finite differences. Exact volumes come from
    /// `volume`.
    pub fn volume_on_grid(&self, grid: &DirectionGrid) -> f64 {
        match &self.backend {
            Backend::Polytope(_) => self.volume(),
            _ => match self.outer_polytope(grid) {
                Ok(p) => p.volume(),
                Err(_) => 0.0,
            },
        }
    }

    /// Polar body `{x : x.y <= 1 for all y}`. Requires the origin interior.
    /// Exact for polytopes; support oracles go through the outer polytope.
    pub fn polar(&self) -> Result<ConvexBody> {
        match &self.backend {
            Backend::Ball { radius } => {
                if *radius <= 0.0 {
                    return Err(Error::OriginNotInterior);
                }
                Ok(ConvexBody::ball(self.dim, 1.0 / radius))
            }
            Backend::Polytope(v) => {
                let facets = self.facets()?;
                let tols = Tolerances::get();
                let scale_hint = v.iter().map(|p| norm(p)).fold(1.0_f64, f64::max);
                if facets.iter().any(|f| f.offset <= tols.support * scale_hint) {
                    return Err(Error::OriginNotInterior);
                }
                let normals: Vec<Vec<f64>> = v.iter().map(|p| p.clone()).collect();
                let offsets = vec![1.0; normals.len()];
                // drop vertices at the origin is unnecessary: o interior
                // means no vertex is o
                let verts = geom::halfspace_intersection(&normals, &offsets);
                ConvexBody::from_vertices(self.dim, verts)
            }
            Backend::Support(_) => self
                .outer_polytope(&DirectionGrid::default_for(self.dim))?
                .polar(),
        }
    }

    /// Centroid (of the polytope volume; o for balls).
    pub fn centroid(&self) -> Result<Vec<f64>> {
        match &self.backend {
            Backend::Ball { .. } => Ok(vec![0.0; self.dim]),
            Backend::Polytope(v) => match self.dim {
                2 => {
                    let a = polygon_area(v);
                    if a <= 0.0 {
                        return Err(Error::DegenerateBody);
                    }
                    let mut cx = 0.0;
                    let mut cy = 0.0;
                    let n = v.len();
                    for i in 0..n {
                        let p = &v[i];
                        let q = &v[(i + 1) % n];
                        let w = p[0] * q[1] - q[0] * p[1];
                        cx += (p[0] + q[0]) * w;
                        cy += (p[1] + q[1]) * w;
                    }
                    Ok(vec![cx / (6.0 * a), cy / (6.0 * a)])
                }
                _ => {
                    if geom::degenerate3d(v) {
                        return Err(Error::DegenerateBody);
                    }
                    let faces = geom::hull3d(v);
                    let mut base = vec![0.0; 3];
                    for p in v {
                        base = add(&base, p);
                    }
                    base = scale(&base, 1.0 / v.len() as f64);
                    let mut vol = 0.0;
                    let mut c = vec![0.0; 3];
                    for f in &faces {
                        let a = &v[f.idx[0]];
                        let b = &v[f.idx[1]];
                        let d = &v[f.idx[2]];
                        let t = dot(
                            &sub(a, &base),
                            &geom::cross3(&sub(b, &base), &sub(d, &base)),
                        )
                        .abs()
                            / 6.0;
                        let tc = scale(&add(&add(&add(a, b), d), &base), 0.25);
                        c = add(&c, &scale(&tc, t));
                        vol += t;
                    }
                    if vol <= 0.0 {
                        return Err(Error::DegenerateBody);
                    }
                    Ok(scale(&c, 1.0 / vol))
                }
            },
            Backend::Support(_) => self
                .outer_polytope(&DirectionGrid::default_for(self.dim))?
                .centroid(),
        }
    }

    /// Deterministic boundary points: polytope vertices (padded with edge
    /// points in 2D), sphere grids for balls, outer-polytope vertices for
    /// support oracles. At least min(count, vertices) points.
    pub fn sample_boundary(&self, count: usize) -> Vec<Vec<f64>> {
        match &self.backend {
            Backend::Polytope(v) => {
                let mut out = v.clone();
                if self.dim == 2 && v.len() >= 2 {
                    let per_edge = (count.saturating_sub(v.len())) / v.len().max(1);
                    for i in 0..v.len() {
                        let a = &v[i];
                        let b = &v[(i + 1) % v.len()];
                        for k in 1..=per_edge {
                            let t = k as f64 / (per_edge + 1) as f64;
                            out.push(add(&scale(a, 1.0 - t), &scale(b, t)));
                        }
                    }
                }
                out
            }
            Backend::Ball { radius } => {
                let grid = DirectionGrid::with_min_count(self.dim, count.max(8));
                grid.directions.iter().map(|u| scale(u, *radius)).collect()
            }
            Backend::Support(_) => {
                let grid = DirectionGrid::with_min_count(self.dim, count.max(32));
                match self.outer_polytope(&grid) {
                    Ok(p) => p.sample_boundary(count),
                    Err(_) => Vec::new(),
                }
            }
        }
    }

    /// Discrete surface-area measure: one atom (unit normal, facet measure)
    /// per facet. Non-polytope backends are converted to the outer polytope
    /// on the given grid first.
    pub fn surface_area_measure(&self, grid: &DirectionGrid) -> Result<SurfaceMeasure> {
        match &self.backend {
            Backend::Polytope(_) => {
                let atoms = self
                    .facets()?
                    .iter()
                    .map(|f| (f.normal.clone(), f.measure))
                    .collect();
                Ok(SurfaceMeasure { dim: self.dim, atoms, from_grid: None })
            }
            _ => {
                let mut m = self.outer_polytope(grid)?.surface_area_measure(grid)?;
                m.from_grid = Some(grid.len());
                Ok(m)
            }
        }
    }

    /// Normalized cone-volume probability measure on facet normals, weights
    /// h(u_i) * s_i / (n V) with V recomputed from the same atoms so the
    /// weights sum to one exactly.
    pub fn cone_measure(&self, grid: &DirectionGrid) -> Result<ConeMeasure> {
        let sm = self.surface_area_measure(grid)?;
        let n = self.dim as f64;
        let raw: Vec<(Vec<f64>, f64)> = sm
            .atoms
            .iter()
            .map(|(u, s)| (u.clone(), self.support(u) * s / n))
            .collect();
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Err(Error::ZeroVolume);
        }
        Ok(ConeMeasure {
            dim: self.dim,
            volume: total,
            atoms: raw.into_iter().map(|(u, w)| (u, w / total)).collect(),
        })
    }
}

/// Discrete surface-area measure of a polytope: atoms (unit normal, measure).
#[derive(Clone, Debug)]
pub struct SurfaceMeasure {
    pub dim: usize,
    pub atoms: Vec<(Vec<f64>, f64)>,
    /// grid size that produced the circumscribing polytope, if any
    pub from_grid: Option<usize>,
}

impl SurfaceMeasure {
    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|(_, s)| s).sum()
    }
}

/// Normalized cone-volume measure; `volume` keeps the body volume implied
/// by the atoms.
#[derive(Clone, Debug)]
pub struct ConeMeasure {
    pub dim: usize,
    pub atoms: Vec<(Vec<f64>, f64)>,
    pub volume: f64,
}

/// Finite measure on convex bodies (atoms with positive weights), the
/// integration domain of the Luxemburg-norm construction.
#[derive(Clone, Debug)]
pub struct BodyMeasure {
    pub atoms: Vec<(ConvexBody, f64)>,
}

impl BodyMeasure {
    pub fn new(atoms: Vec<(ConvexBody, f64)>) -> Result<BodyMeasure> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if atoms.iter().any(|(_, w)| !(*w > 0.0)) {
            return Err(Error::InvalidParameter(
                "body-measure weights must be positive".into(),
            ));
        }
        Ok(BodyMeasure { atoms })
    }
}

/// Result of the dilatate test.
#[derive(Clone, Debug)]
pub enum DilatateCheck {
    /// L = r K within tolerance
    Yes { ratio: f64 },
    /// max_u |h_L - r h_K| normalized by max h_K
    No { defect: f64 },
}

/// Decide whether `l` is a dilatate of `k` (including the degenerate
/// ratio 0 when `l` is the origin). Uses the median support ratio over the
/// grid and checks the uniform support defect against `tol * max h_K`.
pub fn is_dilatate_pair(
    k: &ConvexBody,
    l: &ConvexBody,
    grid: &DirectionGrid,
    tol: f64,
) -> DilatateCheck {
    let hk_max = k.max_support_on(grid);
    let hl_max = l.max_support_on(grid);
    if hk_max <= 0.0 {
        // K is the origin: L must be too
        return if hl_max.abs() <= tol {
            DilatateCheck::Yes { ratio: 0.0 }
        } else {
            DilatateCheck::No { defect: hl_max.abs() }
        };
    }
    if hl_max.abs() <= tol * hk_max {
        return DilatateCheck::Yes { ratio: 0.0 };
    }
    let mut ratios: Vec<f64> = Vec::with_capacity(grid.len());
    for u in &grid.directions {
        let hk = k.support(u);
        let hl = l.support(u);
        if hk.abs() > 1e-12 * hk_max {
            ratios.push(hl / hk);
        }
    }
    if ratios.is_empty() {
        return DilatateCheck::No { defect: f64::INFINITY };
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let r = ratios[ratios.len() / 2];
    let mut defect = 0.0_f64;
    for u in &grid.directions {
        defect = defect.max((l.support(u) - r * k.support(u)).abs());
    }
    defect /= hk_max;
    if r >= 0.0 && defect <= tol {
        DilatateCheck::Yes { ratio: r }
    } else {
        DilatateCheck::No { defect }
    }
}

/// Uniform support-function distance on a grid (the Hausdorff distance up
/// to grid resolution, and exactly for bodies sharing facet normals).
pub fn support_distance(a: &ConvexBody, b: &ConvexBody, grid: &DirectionGrid) -> f64 {
    grid.directions
        .iter()
        .map(|u| (a.support(u) - b.support(u)).abs())
        .fold(0.0, f64::max)
}

/// Subgradient ascent on p -> min_i (c_i - p . u_i), a point strictly
/// inside `{x : u_i . x <= c_i}` when one exists.
fn interior_point(units: &[Vec<f64>], offs: &[f64]) -> Option<Vec<f64>> {
    let dim = units[0].len();
    let scale_hint = offs.iter().fold(1.0_f64, |a, c| a.max(c.abs()));
    let eval = |p: &[f64]| -> (f64, usize) {
        let mut worst = f64::INFINITY;
        let mut arg = 0;
        for (i, (u, &c)) in units.iter().zip(offs).enumerate() {
            let v = c - dot(u, p);
            if v < worst {
                worst = v;
                arg = i;
            }
        }
        (worst, arg)
    };
    let mut p = vec![0.0; dim];
    let (mut best_val, _) = eval(&p);
    let mut best = p.clone();
    for k in 1..=4000usize {
        let (_, arg) = eval(&p);
        let step = 2.0 * scale_hint / k as f64;
        p = sub(&p, &scale(&units[arg], step));
        let (v, _) = eval(&p);
        if v > best_val {
            best_val = v;
            best = p.clone();
        }
    }
    if best_val > 1e-9 * scale_hint {
        Some(best)
    } else {
        None
    }
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum BodySpec {
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Hpolytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    Ball {
        dim: usize,
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Rectangle {
        a: f64,
        b: f64,
        #[serde(default)]
        centered: Option<bool>,
    },
}

/// Parse a body from its JSON description. Supported types: `vpolytope`
/// (vertices), `hpolytope` (normals/offsets), `ball` (dim, radius,
/// optional center), `rectangle` (side lengths a, b; centered by default).
pub fn body_from_json(v: &serde_json::Value) -> Result<ConvexBody> {
    let spec: BodySpec =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    match spec {
        BodySpec::Vpolytope { vertices } => {
            if vertices.is_empty() {
                return Err(Error::Parse("vpolytope needs at least one vertex".into()));
            }
            let dim = vertices[0].len();
            ConvexBody::from_vertices(dim, vertices)
        }
        BodySpec::Hpolytope { normals, offsets } => {
            ConvexBody::from_halfspaces(&normals, &offsets)
        }
        BodySpec::Ball { dim, radius, center } => {
            if radius < 0.0 {
                return Err(Error::Parse("ball radius must be nonnegative".into()));
            }
            let b = ConvexBody::ball(dim, radius);
            match center {
                Some(c) if c.iter().any(|x| *x != 0.0) => {
                    if c.len() != dim {
                        return Err(Error::Parse("ball center dimension mismatch".into()));
                    }
                    Ok(b.translate(&c))
                }
                _ => Ok(b),
            }
        }
        BodySpec::Rectangle { a, b, centered } => {
            if a <= 0.0 || b <= 0.0 {
                return Err(Error::Parse("rectangle sides must be positive".into()));
            }
            Ok(ConvexBody::rectangle(a, b, centered.unwrap_or(true)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes_and_symmetry() {
        for f in [1usize, 3, 12] {
            let g = DirectionGrid::icosahedral(f);
            assert_eq!(g.len(), 10 * f * f + 2);
            for u in &g.directions {
                assert!((norm(u) - 1.0).abs() < 1e-12);
                let mu = scale(u, -1.0);
                assert!(
                    g.directions.iter().any(|v| norm(&sub(v, &mu)) < 1e-8),
                    "grid not antipodally closed"
                );
            }
        }
        let g2 = DirectionGrid::uniform2d(360);
        assert_eq!(g2.len(), 360);
    }

    #[test]
    fn support_of_square_and_ball() {
        let k = ConvexBody::cube(2, 1.0);
        assert!((k.support(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((k.support(&[1.0, 1.0]) - 2.0).abs() < 1e-15);
        let b = ConvexBody::ball(2, 2.0);
        assert!((b.support(&[3.0, 4.0]) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn volumes() {
        assert!((ConvexBody::cube(2, 1.0).volume() - 4.0).abs() < 1e-14);
        assert!((ConvexBody::cube(3, 1.0).volume() - 8.0).abs() < 1e-12);
        assert!((ConvexBody::ball(3, 1.0).volume() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        // degenerate bodies have volume zero
        assert_eq!(ConvexBody::segment(vec![0.0, 0.0], vec![1.0, 1.0]).volume(), 0.0);
        assert_eq!(
            ConvexBody::from_vertices(3, vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
                .unwrap()
                .volume(),
            0.0
        );
    }

    #[test]
    fn outer_polytope_of_ball_overestimates_tightly() {
        let b = ConvexBody::ball(2, 1.0);
        let grid = DirectionGrid::uniform2d(720);
        let outer = b.outer_polytope(&grid).unwrap();
        let v = outer.volume();
        let pi = std::f64::consts::PI;
        assert!(v >= pi);
        assert!(v < pi * 1.0001);

        let b3 = ConvexBody::ball(3, 1.0);
        let g3 = DirectionGrid::icosahedral(12);
        let v3 = b3.outer_polytope(&g3).unwrap().volume();
        let k3 = 4.0 * pi / 3.0;
        assert!(v3 >= k3);
        assert!(v3 < k3 * 1.005, "v3 = {v3}");
    }

    #[test]
    fn outer_polytope_exact_for_shifted_polytope() {
        // origin on the boundary: the Steiner shift must still work
        let k = ConvexBody::from_vertices(
            2,
            vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let normals: Vec<Vec<f64>> = k.facets().unwrap().iter().map(|f| f.normal.clone()).collect();
        let oracle = ConvexBody::from_support(
            2,
            {
                let k2 = k.clone();
                move |x| k2.support(x)
            },
            normals,
        );
        let outer = oracle.outer_polytope(&DirectionGrid::uniform2d(64)).unwrap();
        assert!((outer.volume() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let k = ConvexBody::cube(2, 1.0);
        let p = k.polar().unwrap();
        assert!((p.volume() - 2.0).abs() < 1e-12);
        // bipolar round trip
        let pp = p.polar().unwrap();
        let grid = DirectionGrid::uniform2d(256);
        assert!(support_distance(&k, &pp, &grid) < 1e-10);
    }

    #[test]
    fn polar_requires_interior_origin() {
        let k = ConvexBody::rectangle(1.0, 1.0, false); // [0,1]^2
        assert!(k.polar().is_err());
    }

    #[test]
    fn radial_and_gauge_of_square() {
        let k = ConvexBody::cube(2, 1.0);
        assert!((k.radial(&[3.0, 1.0]).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((k.gauge(&[3.0, 1.0]).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(k.gauge(&[0.0, 0.0]).unwrap(), 0.0);
        let b = ConvexBody::ball(3, 2.0);
        assert!((b.radial(&[0.0, 0.0, 4.0]).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn halfspace_body_round_trip() {
        // diamond |x|+|y| <= 1
        let normals = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        let offsets = vec![1.0; 4];
        let k = ConvexBody::from_halfspaces(&normals, &offsets).unwrap();
        assert!((k.volume() - 2.0).abs() < 1e-12);
        // shifted: same diamond around (5, 5), origin far outside
        let offsets3: Vec<f64> = normals.iter().map(|n| 1.0 + n[0] * 5.0 + n[1] * 5.0).collect();
        let k2 = ConvexBody::from_halfspaces(&normals, &offsets3).unwrap();
        assert!((k2.volume() - k.volume()).abs() < 1e-9);
        let c = k2.centroid().unwrap();
        assert!((c[0] - 5.0).abs() < 1e-9 && (c[1] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_halfspaces_rejected() {
        let normals = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let offsets = vec![1.0, 1.0];
        assert!(ConvexBody::from_halfspaces(&normals, &offsets).is_err());
    }

    #[test]
    fn projection_volumes() {
        let c = ConvexBody::cube(3, 1.0);
        assert!((c.projection_volume(&[0.0, 0.0, 1.0]).unwrap() - 4.0).abs() < 1e-10);
        // along the main diagonal the shadow of the cube is a hexagon of
        // area 4*sqrt(3)
        let d = 3.0f64.sqrt();
        let v = c.projection_volume(&[1.0 / d, 1.0 / d, 1.0 / d]).unwrap();
        assert!((v - 4.0 * 3.0f64.sqrt()).abs() < 1e-9, "v = {v}");
        let sq = ConvexBody::cube(2, 1.0);
        assert!((sq.projection_volume(&[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn surface_and_cone_measures() {
        let k = ConvexBody::cube(2, 1.0);
        let grid = DirectionGrid::uniform2d(32);
        let sm = k.surface_area_measure(&grid).unwrap();
        assert_eq!(sm.atoms.len(), 4);
        assert!((sm.total() - 8.0).abs() < 1e-12);
        let cm = k.cone_measure(&grid).unwrap();
        let s: f64 = cm.atoms.iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert!((cm.volume - 4.0).abs() < 1e-12);
        for (_, w) in &cm.atoms {
            assert!((w - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn dilatate_detection() {
        let grid = DirectionGrid::uniform2d(128);
        let k = ConvexBody::cube(2, 1.0);
        let l = k.scale_body(2.5);
        match is_dilatate_pair(&k, &l, &grid, 1e-9) {
            DilatateCheck::Yes { ratio } => assert!((ratio - 2.5).abs() < 1e-12),
            DilatateCheck::No { .. } => panic!("dilatate not detected"),
        }
        match is_dilatate_pair(&k, &ConvexBody::origin(2), &grid, 1e-9) {
            DilatateCheck::Yes { ratio } => assert_eq!(ratio, 0.0),
            DilatateCheck::No { .. } => panic!("origin must count as ratio 0"),
        }
        let m = ConvexBody::ball(2, 1.0);
        match is_dilatate_pair(&k, &m, &grid, 1e-6) {
            DilatateCheck::Yes { .. } => panic!("square and disk are not dilatates"),
            DilatateCheck::No { defect } => assert!(defect > 1e-2),
        }
    }

    #[test]
    fn linear_image_and_translate() {
        let k = ConvexBody::cube(2, 1.0);
        let sheared = k.linear_image(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!((sheared.volume() - 4.0).abs() < 1e-12); // det = 1
        let t = k.translate(&[3.0, -1.0]);
        assert!((t.support(&[1.0, 0.0]) - 4.0).abs() < 1e-14);
        // ball translate keeps volume through the support backend
        let b = ConvexBody::ball(2, 1.0).translate(&[2.0, 2.0]);
        let v = b.volume_on_grid(&DirectionGrid::uniform2d(720));
        assert!((v - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn json_bodies() {
        let v: serde_json::Value = serde_json::from_str(
            r#"{"type":"vpolytope","vertices":[[0,0],[1,0],[0,1]]}"#,
        )
        .unwrap();
        let k = body_from_json(&v).unwrap();
        assert!((k.volume() - 0.5).abs() < 1e-14);

        let v: serde_json::Value =
            serde_json::from_str(r#"{"type":"ball","dim":3,"radius":2.0}"#).unwrap();
        let b = body_from_json(&v).unwrap();
        assert!((b.volume() - 32.0 * std::f64::consts::PI / 3.0).abs() < 1e-10);

        let v: serde_json::Value =
            serde_json::from_str(r#"{"type":"rectangle","a":2.0,"b":1.0}"#).unwrap();
        let r = body_from_json(&v).unwrap();
        assert!((r.volume() - 2.0).abs() < 1e-14);
        assert!((r.support(&[1.0, 0.0]) - 1.0).abs() < 1e-14);

        let v: serde_json::Value = serde_json::from_str(
            r#"{"type":"hpolytope","normals":[[1,0],[-1,0],[0,1],[0,-1]],"offsets":[1,1,1,1]}"#,
        )
        .unwrap();
        let h = body_from_json(&v).unwrap();
        assert!((h.volume() - 4.0).abs() < 1e-9);
    }
}
