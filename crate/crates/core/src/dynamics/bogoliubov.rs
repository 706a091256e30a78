//! Linear-coupling diagonalization of two modes and the dressed Kerr
//! coefficients.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{NemsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledModeFrame {
    /// Hybridization angle `½·atan(2|g12/Δ|)`.
    pub lambda: f64,
    /// Signed rotation angle diagonalizing the linear block with
    /// `R = [[cos θ, −sin θ], [sin θ, cos θ]]`.
    pub theta: f64,
    pub g12: f64,
    /// `ω1 − ω2`.
    pub delta: f64,
    pub omega: (f64, f64),
    pub dressed_freqs: (f64, f64),
    /// `(K̃1, K̃2, χ12)`.
    pub dressed_kerrs: (f64, f64, f64),
}

/// Dress two linearly coupled Kerr modes.
pub fn bogoliubov(omega1: f64, omega2: f64, g12: f64, k1: f64, k2: f64) -> Result<CoupledModeFrame> {
    let delta = omega1 - omega2;
    if delta == 0.0 {
        return Err(NemsError::Validation("degenerate modes (Δ = 0) have no perturbative dressing".into()));
    }
    let lambda = 0.5 * (2.0 * (g12 / delta).abs()).atan();
    let theta = 0.5 * (2.0 * g12 / delta).atan();
    let root = (4.0 * g12 * g12 + delta * delta).sqrt();
    let mean = 0.5 * (omega1 + omega2);
    // Each dressed mode keeps the label of the bare mode it connects to.
    let (hi, lo) = (mean + 0.5 * root, mean - 0.5 * root);
    let dressed_freqs = if delta > 0.0 { (hi, lo) } else { (lo, hi) };
    let (c2, s2) = (lambda.cos().powi(2), lambda.sin().powi(2));
    let dressed_kerrs = (k1 * c2 * c2 + k2 * s2 * s2, k1 * s2 * s2 + k2 * c2 * c2, 2.0 * (k1 + k2) * c2 * s2);
    Ok(CoupledModeFrame { lambda, theta, g12, delta, omega: (omega1, omega2), dressed_freqs, dressed_kerrs })
}

impl CoupledModeFrame {
    /// Rotated linear block `Rᵀ M R` with `M = [[ω1, g], [g, ω2]]`.
    pub fn transformed_linear_block(&self) -> Matrix2<f64> {
        let m = Matrix2::new(self.omega.0, self.g12, self.g12, self.omega.1);
        let (c, s) = (self.theta.cos(), self.theta.sin());
        let r = Matrix2::new(c, -s, s, c);
        r.transpose() * m * r
    }

    /// Conditional three-photon rate `(3/2)·g3·ε·cos²Λ·sinΛ`, GHz.
    pub fn bpcnot_rate(&self, g3_driven: f64, eps: f64) -> f64 {
        1.5 * g3_driven * eps * self.lambda.cos().powi(2) * self.lambda.sin()
    }
}
