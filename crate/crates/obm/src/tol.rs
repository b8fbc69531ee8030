//! Central tolerance record. Tests and validators state tolerances once,
//! here. `OBM_TOL` scales every entry by a positive factor.

#[derive(Clone, Debug)]
pub struct Tolerances {
    /// unit-vector normalization
    pub unit: f64,
    /// grid-level support identities (symmetry, origin membership)
    pub support: f64,
    /// exact polytope identities (volume/surface consistency, centroid)
    pub exact: f64,
    /// bipolar / Hausdorff round trips
    pub hausdorff: f64,
    /// relative bisection tolerance of the implicit-equation solver
    pub solver_rel: f64,
    /// maximum bisection iterations
    pub solver_max_iter: usize,
    /// inequality validators: slack floor is -validate * scale
    pub validate: f64,
    /// equality scan triggers when |slack| < equality * scale
    pub equality: f64,
    /// boundary identities of the planar decomposition
    pub decomposition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = std::env::var("OBM_TOL")
            .ok()
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|v| *v > 0.0)
            .unwrap_or(1.0);
        Tolerances {
            unit: 1e-14 * s,
            support: 1e-12 * s,
            exact: 1e-10 * s,
            hausdorff: 1e-9 * s,
            solver_rel: 1e-12 * s,
            solver_max_iter: 200,
            validate: 1e-10 * s,
            equality: 1e-6 * s,
            decomposition: 1e-8 * s,
        }
    }
}

impl Tolerances {
    pub fn get() -> Self {
        Tolerances::default()
    }
}
