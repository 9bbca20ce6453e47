//! Seeded random test-data generators: smooth bumps times low-order
//! trigonometric polynomials, frequency slices, interface traces,
//! two-sided fields, and the named coefficient-field presets.

use nalgebra::{dmatrix, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeffs::CoefficientField;
use crate::error::{Error, Result};
use crate::freq::FrequencySlice;
use crate::global::TwoSidedField;
use crate::grid::{Grid1, HalfGrid, TensorGrid};
use crate::seminorms::InterfaceTrace;

/// C∞ bump: e^{1 − 1/(1 − t²)} on |t| < 1, zero outside; peak value 1.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Polynomial window (1 − t²)⁴ on |t| < 1, zero outside. Unlike [`bump`]
/// its derivatives stay bounded near the support edge, which makes it the
/// right probe for finite-difference consistency checks.
pub fn smooth_window(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - t * t).powi(4)
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on two uniform draws
    let u: f64 = rng.gen_range(1e-12..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(std_normal(rng), std_normal(rng))
}

/// Random trigonometric polynomial with ≤ 8 modes on scale `period`,
/// complex i.i.d. standard normal coefficients.
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
    period: f64,
}

impl TrigPoly {
    pub fn random(rng: &mut ChaCha8Rng, period: f64) -> Self {
        let coeffs = (0..=8).map(|_| complex_normal(rng)).collect();
        TrigPoly { coeffs, period }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let base = std::f64::consts::TAU * t / self.period;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::new(0.0, k as f64 * base).exp())
            .sum()
    }
}

/// Band-limited random slice supported in [−ρ, ρ] on both half-lines.
pub fn random_slice(rng: &mut ChaCha8Rng, y: &HalfGrid, xi: Vec<f64>, rho: f64) -> FrequencySlice {
    let poly_p = TrigPoly::random(rng, 2.0 * rho);
    let poly_m = TrigPoly::random(rng, 2.0 * rho);
    let v_plus = y
        .nodes_plus()
        .iter()
        .map(|&t| poly_p.eval(t) * bump(t / rho))
        .collect();
    let v_minus = y
        .nodes_minus()
        .iter()
        .map(|&t| poly_m.eval(t) * bump(t / rho))
        .collect();
    FrequencySlice::new(xi, y.clone(), v_plus, v_minus, rho)
}

/// Random smooth trace supported in [−r, r].
pub fn random_trace(rng: &mut ChaCha8Rng, grid: &Grid1, r: f64) -> InterfaceTrace {
    let poly = TrigPoly::random(rng, 2.0 * r);
    let values = grid
        .nodes()
        .iter()
        .map(|&x| poly.eval(x) * bump(x / r))
        .collect();
    InterfaceTrace::new(grid.clone(), values, (-r, r))
}

/// Random two-sided field: separable bump-times-trig per side, supported
/// in [−rx, rx] × [−ry, ry].
///
/// In matched mode both halves restrict one smooth function whose
/// y-factor is odd, so h0 = 0 exactly and the one-sided difference
/// stencils produce identical interface slopes: for coefficient fields
/// continuous across y = 0 the discrete h1 vanishes to roundoff too.
pub fn random_two_sided(
    rng: &mut ChaCha8Rng,
    grid: &TensorGrid,
    rx: f64,
    ry: f64,
    matched: bool,
) -> TwoSidedField {
    let px = TrigPoly::random(rng, 2.0 * rx);
    let py = TrigPoly::random(rng, 2.0 * ry);
    if matched {
        let (px2, py2) = (
            TrigPoly { coeffs: px.coeffs.clone(), period: px.period },
            TrigPoly { coeffs: py.coeffs.clone(), period: py.period },
        );
        // odd part of the trig factor in y
        let f_plus = move |x: f64, y: f64| {
            (py.eval(y) - py.eval(-y)) * px.eval(x) * bump(x / rx) * bump(y / ry)
        };
        let f_minus = move |x: f64, y: f64| {
            (py2.eval(y) - py2.eval(-y)) * px2.eval(x) * bump(x / rx) * bump(y / ry)
        };
        return TwoSidedField::from_fn(grid.clone(), (-rx, rx), (-ry, ry), f_plus, f_minus);
    }
    let qx = TrigPoly::random(rng, 2.0 * rx);
    let qy = TrigPoly::random(rng, 2.0 * ry);
    TwoSidedField::from_fn(
        grid.clone(),
        (-rx, rx),
        (-ry, ry),
        move |x, y| px.eval(x) * py.eval(y) * bump(x / rx) * bump(y / ry),
        move |x, y| qx.eval(x) * qy.eval(y) * bump(x / rx) * bump(y / ry),
    )
}

/// Named coefficient presets used by the command-line suites.
pub fn field_preset(name: &str) -> Result<CoefficientField> {
    match name {
        "identity" => Ok(CoefficientField::constant(
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
            1.0,
        )),
        "aniso-diag" => Ok(CoefficientField::constant(
            dmatrix![4.0, 0.0; 0.0, 1.0],
            DMatrix::identity(2, 2),
            0.25,
        )),
        "aniso-mixed" => Ok(CoefficientField::constant(
            dmatrix![2.0, 0.5; 0.5, 1.5],
            dmatrix![1.2, -0.3; -0.3, 1.0],
            0.3,
        )),
        "lipschitz-y" => Ok(CoefficientField::y_only(
            2,
            |y: f64| {
                let mut m = DMatrix::identity(2, 2);
                m[(0, 0)] = 2.0 - 0.2 * y.tanh();
                m[(1, 1)] = 1.0 + 0.3 * (1.0 + y * y).sqrt();
                m
            },
            |y: f64| {
                let mut m = DMatrix::identity(2, 2);
                m[(1, 1)] = 1.5 + 0.1 * y.sin();
                m
            },
            0.4,
            1.0,
        )),
        "lipschitz-xy" => Ok(CoefficientField::general(
            2,
            |x: &[f64], y: f64| {
                let mut m = DMatrix::identity(2, 2);
                m[(0, 0)] = 1.8 + 0.1 * (x[0].sin() - y.tanh());
                m[(1, 1)] = 1.2 + 0.1 * (0.5 * x[0]).cos() * (1.0 + y * y).sqrt().recip();
                m[(0, 1)] = 0.1 * (x[0] + y).sin();
                m[(1, 0)] = m[(0, 1)];
                m
            },
            |x: &[f64], y: f64| {
                let mut m = DMatrix::identity(2, 2);
                m[(0, 0)] = 1.5 + 0.1 * (0.3 * x[0]).cos();
                m[(1, 1)] = 1.1 + 0.1 * y.cos();
                m
            },
            0.4,
            1.0,
        )),
        other => Err(Error::Config(format!("unknown coefficient preset '{other}'"))),
    }
}

pub const PRESETS: [&str; 5] = [
    "identity",
    "aniso-diag",
    "aniso-mixed",
    "lipschitz-y",
    "lipschitz-xy",
];
