//! Published reference data: the optimal-settings table used for regression
//! and optimizer warm starts, plus comparison constants.
//!
//! The table's t_b column is an amplitude transmissivity; the engine works
//! with intensity transmittances throughout, so consumers must go through
//! [`TableRow::t_b_intensity`].

/// One row of the published optimal-settings table.
#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    pub eta_d: f64,
    /// Amplitude transmissivity as published.
    pub t_b_amplitude: f64,
    pub g: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub s: f64,
}

impl TableRow {
    /// Intensity transmittance t_b (the square of the published column).
    pub fn t_b_intensity(&self) -> f64 {
        self.t_b_amplitude * self.t_b_amplitude
    }
}

/// Optimal state-preparation and measurement settings per detection
/// efficiency, with the achieved CHSH value.
pub const TABLE_S1: [TableRow; 10] = [
    TableRow { eta_d: 0.65, t_b_amplitude: 0.999, g: 0.090, alpha1: 0.000, alpha2: -0.013, beta1: 0.000, beta2: 0.013, s: 2.000000 },
    TableRow { eta_d: 0.67, t_b_amplitude: 0.945, g: 0.048, alpha1: 0.001, alpha2: -0.128, beta1: -0.001, beta2: 0.128, s: 2.000002 },
    TableRow { eta_d: 0.68, t_b_amplitude: 0.905, g: 0.132, alpha1: 0.010, alpha2: -0.241, beta1: -0.010, beta2: 0.241, s: 2.000133 },
    TableRow { eta_d: 0.70, t_b_amplitude: 0.823, g: 0.226, alpha1: 0.035, alpha2: -0.364, beta1: -0.035, beta2: 0.364, s: 2.002067 },
    TableRow { eta_d: 0.75, t_b_amplitude: 0.614, g: 0.279, alpha1: 0.097, alpha2: -0.501, beta1: -0.097, beta2: 0.501, s: 2.027202 },
    TableRow { eta_d: 0.80, t_b_amplitude: 0.181, g: 0.094, alpha1: 0.139, alpha2: -0.554, beta1: -0.139, beta2: 0.554, s: 2.088839 },
    TableRow { eta_d: 0.85, t_b_amplitude: 0.435, g: 0.320, alpha1: 0.162, alpha2: -0.574, beta1: -0.162, beta2: 0.574, s: 2.186472 },
    TableRow { eta_d: 0.90, t_b_amplitude: 0.414, g: 0.364, alpha1: 0.172, alpha2: -0.579, beta1: -0.172, beta2: 0.579, s: 2.318223 },
    TableRow { eta_d: 0.95, t_b_amplitude: 0.296, g: 0.284, alpha1: 0.172, alpha2: -0.573, beta1: -0.172, beta2: 0.573, s: 2.483976 },
    TableRow { eta_d: 1.00, t_b_amplitude: 0.280, g: 0.300, alpha1: 0.165, alpha2: -0.560, beta1: -0.165, beta2: 0.560, s: 2.685871 },
];

/// Detection-efficiency threshold of the anticorrelated single-photon
/// path-entangled family (82.6%).
pub const SPPE_THRESHOLD: f64 = 0.826;

/// Eberhard limit: 2/3 detection efficiency.
pub const EBERHARD_LIMIT: f64 = 2.0 / 3.0;

/// Polarisation-protocol comparison constants (reference values only; no
/// internal model): detection-efficiency threshold and success-rate scaling
/// exponent in η_C.
pub const POLARIZATION_THRESHOLD: f64 = 0.6667;
pub const POLARIZATION_SCALING_EXPONENT: f64 = 1.0;
