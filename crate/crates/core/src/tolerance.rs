/// Numerical thresholds shared by surface construction and verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute accuracy of arc-length integrals and their inversion.
    pub arc_length: f64,
    /// Bisection depth limit of the adaptive quadrature.
    pub max_depth: u32,
    /// Minimum director speed `|e'|`; below it the surface is treated as cylindrical.
    pub cylindrical: f64,
    /// Minimum of `cos θ + γ sin θ` accepted when building an offset.
    pub monotone: f64,
    /// Number of uniform panels in an arc-length table.
    pub arc_panels: usize,
    /// Absolute developability threshold on `|Δ|`; `None` selects
    /// `1e-8 · (1 + max |c|)`.
    pub developable: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            arc_length: 1e-10,
            max_depth: 40,
            cylindrical: 1e-8,
            monotone: 1e-6,
            arc_panels: 64,
            developable: None,
        }
    }
}
