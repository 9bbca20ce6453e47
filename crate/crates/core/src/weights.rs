//! Weight functions: the piecewise-parabolic profile φ, its tangentially
//! perturbed variants ψ_ε, ψ_{ε,g}, the scaled weight ϕ_δ, the linear-in-x
//! weight of the y-only estimate, and parameter admissibility.

use crate::coeffs::SymbolBounds;

/// The full weight-parameter tuple. Calibration constants carry defaults
/// found by sweep; every report records the values actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightParams {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub beta: f64,
    /// Tangential tilt magnitude, in [0, s0].
    pub s: f64,
    /// Unit (or shorter) tangential direction of the tilt.
    pub gamma: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub tau: f64,
    // calibration floors / ceilings
    pub s0: f64,
    pub r0: f64,
    pub tau0: f64,
    pub beta0: f64,
    pub delta0: f64,
    /// Support radii of the one-sided localization lemmas; conservative
    /// default min(α₋, 1) / (2β) for both.
    pub rho1: f64,
    pub rho2: f64,
}

impl WeightParams {
    /// Calibrated defaults for a tangential dimension `d = n - 1`.
    pub fn defaults(d: usize) -> Self {
        let alpha_minus: f64 = 1.0;
        let alpha_plus = 2.0; // alpha_minus * (L + 1) for the identity preset
        let beta = 8.0;
        let rho = alpha_minus.min(1.0) / (2.0 * beta);
        let mut gamma = vec![0.0; d];
        gamma[0] = 1.0;
        WeightParams {
            alpha_plus,
            alpha_minus,
            beta,
            s: 0.05,
            gamma,
            epsilon: 0.1,
            delta: 0.1,
            tau: 16.0,
            s0: 0.05,
            r0: 0.1,
            tau0: 16.0,
            beta0: 8.0,
            delta0: 0.1,
            rho1: rho,
            rho2: rho,
        }
    }

    /// Pick α₊ = α₋ (L + 1), guaranteeing margin 1 over the measured L.
    pub fn with_measured_l(mut self, l_ratio: f64) -> Self {
        self.alpha_plus = self.alpha_minus * (l_ratio + 1.0);
        self
    }

    /// Default slice support radius: ρ = min(α₋, 1) / (2β), small enough for
    /// every one-sided support hypothesis simultaneously.
    pub fn rho(&self) -> f64 {
        self.alpha_minus.min(1.0) / (2.0 * self.beta)
    }

    /// φ(y): α₊ y + β y²/2 for y ≥ 0, α₋ y + β y²/2 for y < 0.
    pub fn phi(&self, y: f64) -> f64 {
        let alpha = if y >= 0.0 { self.alpha_plus } else { self.alpha_minus };
        alpha * y + 0.5 * self.beta * y * y
    }

    /// One-sided slope φ'±(y) = α± + β y.
    pub fn phi_prime(&self, y: f64, plus_side: bool) -> f64 {
        let alpha = if plus_side { self.alpha_plus } else { self.alpha_minus };
        alpha + self.beta * y
    }

    /// ψ_ε(x, y) = φ(y) - (ε/2)|x|².
    pub fn psi_eps(&self, x: &[f64], y: f64) -> f64 {
        self.phi(y) - 0.5 * self.epsilon * sq_norm(x)
    }

    /// Linearization of ψ_ε at the cell center x_g:
    /// ψ_{ε,g}(x, y) = φ(y) - ε x_g·(x - x_g) - (ε/2)|x_g|².
    pub fn psi_eps_linearized(&self, x: &[f64], y: f64, x_g: &[f64]) -> f64 {
        let dot: f64 = x_g.iter().zip(x).map(|(&g, &xi)| g * (xi - g)).sum();
        self.phi(y) - self.epsilon * dot - 0.5 * self.epsilon * sq_norm(x_g)
    }

    /// ϕ_δ(x, y) = ψ_δ(x/δ, y/δ) = φ(y/δ) - |x|²/(2δ).
    pub fn phi_delta(&self, x: &[f64], y: f64) -> f64 {
        self.phi(y / self.delta) - 0.5 * sq_norm(x) / self.delta
    }

    /// The weight of the y-only estimate: φ(y) + s γ·x.
    pub fn linear_phi(&self, x: &[f64], y: f64) -> f64 {
        let dot: f64 = self.gamma.iter().zip(x).map(|(&g, &xi)| g * xi).sum();
        self.phi(y) + self.s * dot
    }

    /// μ = (ετ)^{1/2}, rounded up to the nearest value making 1/μ an
    /// integer number of grid cells of width `h`.
    pub fn derive_mu(&self, h: f64) -> f64 {
        let raw = (self.epsilon * self.tau).sqrt();
        let cells = (1.0 / (raw * h)).floor().max(1.0);
        1.0 / (cells * h)
    }

    /// Admissibility verdict against measured bounds.
    pub fn validate(&self, b: &SymbolBounds) -> Admissibility {
        let mut reasons = Vec::new();
        let margin = self.alpha_plus / self.alpha_minus - b.l_ratio;
        if !(margin > 0.0) {
            reasons.push(format!(
                "L = {} >= alpha_plus/alpha_minus = {}",
                b.l_ratio,
                self.alpha_plus / self.alpha_minus
            ));
        }
        if self.beta < self.beta0 {
            reasons.push(format!("beta = {} < beta0 = {}", self.beta, self.beta0));
        }
        if self.s > self.s0 {
            reasons.push(format!("s = {} > s0 = {}", self.s, self.s0));
        }
        let tau_floor = self.tau0.max(1.0 / self.epsilon);
        if self.tau < tau_floor {
            reasons.push(format!(
                "tau = {} < max(tau0, 1/epsilon) = {}",
                self.tau, tau_floor
            ));
        }
        Admissibility {
            admissible: reasons.is_empty(),
            margin,
            reasons,
        }
    }
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Outcome of the admissibility check; `margin` is α₊/α₋ - L.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub admissible: bool,
    pub margin: f64,
    pub reasons: Vec<String>,
}
