//! Independent brute-force references used by tests: Monte-Carlo volume,
//! analytic integrals, and seeded random body generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{ConvexBody, DirectionGrid};
use crate::error::{Error, Result};
use crate::geom::scale;
use crate::tol::Tolerances;

/// A reproducible random stream: a 64-bit root plus a derivation path of
/// labels. Same (root, path) always yields the same stream.
#[derive(Clone, Debug)]
pub struct Seed {
    pub root: u64,
    pub path: Vec<String>,
}

impl Seed {
    pub fn new(root: u64) -> Seed {
        Seed { root, path: Vec::new() }
    }

    pub fn derive(&self, label: &str) -> Seed {
        let mut path = self.path.clone();
        path.push(label.to_string());
        Seed { root: self.root, path }
    }

    /// FNV-1a fold of the root and path into the stream key.
    fn key(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325_u64 ^ self.root;
        for label in &self.path {
            for b in label.as_bytes() {
                h ^= *b as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
            h ^= 0x7c;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        h
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.key())
    }
}

/// Monte-Carlo volume estimate with its binomial standard error.
#[derive(Clone, Copy, Debug)]
pub struct McVolume {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

pub fn mc_volume(body: &ConvexBody, samples: usize, seed: &Seed) -> McVolume {
    let dim = body.dim;
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        hi[j] = body.support(&e);
        e[j] = -1.0;
        lo[j] = -body.support(&e);
    }
    let box_vol: f64 = (0..dim).map(|j| (hi[j] - lo[j]).max(0.0)).product();
    let mut rng = seed.rng();
    let mut hits = 0usize;
    for _ in 0..samples {
        let x: Vec<f64> = (0..dim)
            .map(|j| lo[j] + rng.gen::<f64>() * (hi[j] - lo[j]))
            .collect();
        if body.contains(&x, 0.0) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    McVolume {
        estimate: p * box_vol,
        stderr: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    }
}

/// The classes of random polytopes the generators produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyFamily {
    /// arbitrary compact convex (hull of a shifted cloud)
    General,
    /// contains the origin (possibly on the boundary: one vertex at o)
    ContainsOrigin,
    /// origin interior
    OriginInterior,
    /// o-symmetric with origin interior
    Symmetric,
}

/// Hull of k random points with the family constraint enforced; retries a
/// few times when the sample is degenerate.
pub fn random_polytope(
    seed: &Seed,
    dim: usize,
    k: usize,
    family: BodyFamily,
) -> Result<ConvexBody> {
    if k < dim + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} vertices in dimension {dim}",
            dim + 1
        )));
    }
    let mut rng = seed.rng();
    for _attempt in 0..10 {
        let mut pts: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        match family {
            BodyFamily::General => {
                let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0).collect();
                for p in &mut pts {
                    *p = crate::geom::add(p, &shift);
                }
            }
            BodyFamily::ContainsOrigin => {
                pts.push(vec![0.0; dim]);
            }
            BodyFamily::OriginInterior => {
                // force interior by adding a small cross polytope around o
                for j in 0..dim {
                    let mut e = vec![0.0; dim];
                    e[j] = 0.05;
                    pts.push(e.clone());
                    pts.push(scale(&e, -1.0));
                }
            }
            BodyFamily::Symmetric => {
                let mirrored: Vec<Vec<f64>> = pts.iter().map(|p| scale(p, -1.0)).collect();
                pts.extend(mirrored);
            }
        }
        if let Ok(body) = ConvexBody::from_vertices(dim, pts) {
            if body.volume() > 1e-9 {
                let good = match family {
                    BodyFamily::OriginInterior | BodyFamily::Symmetric => {
                        body.min_support_on(&DirectionGrid::with_min_count(dim, 32))
                            > Tolerances::get().support
                    }
                    _ => true,
                };
                if good {
                    return Ok(body);
                }
            }
        }
    }
    Err(Error::DegenerateBody)
}

/// First moment of the unit disk against phi = t: for any direction,
/// (1/V) * integral of |u.x| over the disk = (4/3)/pi.
pub fn disk_centroid_integral(_direction: &[f64]) -> f64 {
    4.0 / (3.0 * std::f64::consts::PI)
}

/// Exact surface-area total of an axis rectangle [-a,a] x [-b,b].
pub fn rectangle_perimeter(a: f64, b: f64) -> f64 {
    4.0 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_determinism_and_separation() {
        let s = Seed::new(42);
        let a: Vec<u32> = {
            let mut r = s.derive("a").rng();
            (0..4).map(|_| r.gen()).collect()
        };
        let a2: Vec<u32> = {
            let mut r = s.derive("a").rng();
            (0..4).map(|_| r.gen()).collect()
        };
        let b: Vec<u32> = {
            let mut r = s.derive("b").rng();
            (0..4).map(|_| r.gen()).collect()
        };
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }

    #[test]
    fn mc_volume_unit_square_and_disk() {
        let sq = ConvexBody::cube(2, 0.5);
        let est = mc_volume(&sq, 1_000_000, &Seed::new(7));
        assert!((est.estimate - 1.0).abs() <= 3.0 * est.stderr.max(1e-12) + 1e-9);

        let disk = ConvexBody::ball(2, 1.0);
        let est = mc_volume(&disk, 400_000, &Seed::new(8));
        assert!((est.estimate - std::f64::consts::PI).abs() <= 5.0 * est.stderr);

        let b3 = ConvexBody::ball(3, 1.0);
        let est = mc_volume(&b3, 400_000, &Seed::new(9));
        assert!((est.estimate - 4.0 * std::f64::consts::PI / 3.0).abs() <= 5.0 * est.stderr);
    }

    #[test]
    fn random_polytope_families() {
        let seed = Seed::new(123);
        let grid = DirectionGrid::uniform2d(64);
        let s = random_polytope(&seed.derive("sym"), 2, 6, BodyFamily::Symmetric).unwrap();
        for u in &grid.directions {
            let neg: Vec<f64> = u.iter().map(|c| -c).collect();
            assert!((s.support(u) - s.support(&neg)).abs() < 1e-10);
        }
        let oo = random_polytope(&seed.derive("oo"), 2, 5, BodyFamily::OriginInterior).unwrap();
        assert!(oo.min_support_on(&grid) > 0.0);
        let o = random_polytope(&seed.derive("o"), 2, 5, BodyFamily::ContainsOrigin).unwrap();
        assert!(o.contains(&[0.0, 0.0], 1e-12));
        // determinism
        let again = random_polytope(&seed.derive("sym"), 2, 6, BodyFamily::Symmetric).unwrap();
        assert_eq!(s.vertices().unwrap(), again.vertices().unwrap());
        // 3D
        let t = random_polytope(&seed.derive("3d"), 3, 8, BodyFamily::Symmetric).unwrap();
        assert!(t.volume() > 0.0);
    }

    #[test]
    fn disk_integral_matches_centroid_body() {
        let u = [0.3_f64.cos(), 0.3_f64.sin()];
        assert!((disk_centroid_integral(&u) - 0.4244131815783876).abs() < 1e-12);
        let c = crate::functionals::orlicz_centroid_body(
            &crate::phi::PhiFunction::identity(),
            &ConvexBody::ball(2, 1.0),
            &crate::functionals::Quadrature::Cells(1024),
        )
        .unwrap();
        assert!((c.support(&u) - disk_centroid_integral(&u)).abs() < 1e-4);
    }
}
