//! H^{1/2} norms and seminorms of interface traces, in Fourier and
//! Gagliardo form, on the full (torus-embedded) line and on cubes Q_r.
//!
//! The Fourier form is the reference implementation. The full-line
//! Gagliardo sum uses the periodized kernel (π/L)² / sin²(π u / L), which
//! matches the DFT-based Fourier form with constant exactly 1 in d = 1 and
//! keeps both forms translation invariant on the torus. Cube seminorms use
//! the plain |x - y|⁻² kernel; cells with |x - y| < h are handled by the
//! local-slope rule |f'(x)|² integrated over the cell.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{deriv1, Grid1};

/// A complex-valued trace on a uniform tangential grid, with a declared
/// support interval used to police periodic wraparound.
#[derive(Debug, Clone)]
pub struct InterfaceTrace {
    pub grid: Grid1,
    pub values: Vec<Complex64>,
    pub declared_support: (f64, f64),
}

impl InterfaceTrace {
    pub fn new(grid: Grid1, values: Vec<Complex64>, declared_support: (f64, f64)) -> Self {
        assert_eq!(values.len(), grid.n);
        InterfaceTrace {
            grid,
            values,
            declared_support,
        }
    }

    pub fn from_real(grid: Grid1, values: &[f64], declared_support: (f64, f64)) -> Self {
        let v = values.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        Self::new(grid, v, declared_support)
    }

    pub fn l2_sq(&self) -> f64 {
        let h = self.grid.step();
        self.values.iter().map(|v| v.norm_sqr() * h).sum()
    }

    pub fn l2_sq_on(&self, center: f64, r: f64) -> f64 {
        let h = self.grid.step();
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .filter(|(&x, _)| (x - center).abs() <= r + 1e-12)
            .map(|(_, v)| v.norm_sqr() * h)
            .sum()
    }

    /// Support/padding audit: values must vanish outside the declared
    /// support, and the padding to the box edge must be at least half the
    /// box half-width. Returns an estimated wraparound bound on violation.
    pub fn wraparound_warning(&self) -> Option<f64> {
        let (a, b) = self.declared_support;
        let tol = 1e-13
            * self
                .values
                .iter()
                .map(|v| v.norm())
                .fold(0.0f64, f64::max)
                .max(1.0);
        let mut outside = 0.0f64;
        for (&x, v) in self.grid.nodes().iter().zip(&self.values) {
            if (x < a || x > b) && v.norm() > tol {
                outside = outside.max(v.norm());
            }
        }
        let half_width = 0.5 * self.grid.width();
        let padding = (a - self.grid.min).min(self.grid.max - b);
        if outside > 0.0 || padding < 0.5 * half_width {
            // kernel decay |x|^-2 gives ~ 4 ||f||^2 / padding contamination
            let bound = 4.0 * self.l2_sq() / padding.max(1e-30) + outside * outside;
            Some(bound)
        } else {
            None
        }
    }
}

/// Region for Gagliardo seminorms.
#[derive(Debug, Clone, Copy)]
pub enum Region {
    /// The whole (torus-embedded) line.
    Full,
    /// The cube Q_r(center) = { |x - center| <= r }.
    Cube { center: f64, r: f64 },
}

/// Result of the Fourier-side computation.
#[derive(Debug, Clone, Copy)]
pub struct FourierH12 {
    /// Seminorm squared: ∫ |ξ| |f̂(ξ)|² dξ.
    pub seminorm_sq: f64,
    /// Norm squared: ∫ (1 + |ξ|²)^{1/2} |f̂(ξ)|² dξ.
    pub norm_sq: f64,
    /// Set when the support/padding invariant is violated.
    pub wraparound_bound: Option<f64>,
}

/// Fourier form of the H^{1/2} quantities, with the e^{-ixξ} transform
/// convention scaled to approximate the continuum integral.
pub fn h12_fourier(f: &InterfaceTrace) -> FourierH12 {
    let n = f.grid.n;
    // Drop the duplicated right endpoint: the DFT sees one period.
    let m = n - 1;
    let h = f.grid.step();
    let len = m as f64 * h;
    let mut buf: Vec<Complex64> = f.values[..m].to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let dxi = 2.0 * std::f64::consts::PI / len;
    let mut semi = 0.0;
    let mut norm = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let k_signed = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
        let xi = dxi * k_signed;
        let fhat_sq = (h * c.norm()).powi(2);
        semi += xi.abs() * fhat_sq * dxi;
        norm += (1.0 + xi * xi).sqrt() * fhat_sq * dxi;
    }
    // Euler-Maclaurin correction for the kink of |ξ| at ξ = 0: the plain
    // Riemann sum undershoots the integral by dξ² |f̂(0)|² / 6 + O(dξ⁴).
    // (1 + ξ²)^{1/2} is smooth, so only the seminorm needs it.
    let kink = dxi * dxi * (h * buf[0].norm()).powi(2) / 6.0;
    semi += kink;
    FourierH12 {
        seminorm_sq: semi,
        norm_sq: norm,
        wraparound_bound: f.wraparound_warning(),
    }
}

/// Gagliardo double-sum seminorm squared on the given region.
pub fn gagliardo_sq(f: &InterfaceTrace, region: Region) -> f64 {
    let h = f.grid.step();
    let nodes = f.grid.nodes();
    let slope = deriv1(&f.values, h);
    match region {
        Region::Full => {
            let m = f.grid.n - 1; // one period
            let len = m as f64 * h;
            let pi = std::f64::consts::PI;
            // periodized kernel by index offset
            let kernel: Vec<f64> = (0..m)
                .map(|d| {
                    if d == 0 {
                        0.0
                    } else {
                        let u = d as f64 * h;
                        (pi / len).powi(2) / (pi * u / len).sin().powi(2)
                    }
                })
                .collect();
            let mut total = 0.0;
            for i in 0..m {
                let fi = f.values[i];
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let d = if i > j { i - j } else { j - i };
                    total += (fi - f.values[j]).norm_sqr() * kernel[d] * h * h;
                }
                // diagonal cell: integrand ~ |f'(x)|^2 over an h x h cell
                total += slope[i].norm_sqr() * h * h;
            }
            total
        }
        Region::Cube { center, r } => {
            let idx: Vec<usize> = (0..f.grid.n)
                .filter(|&i| (nodes[i] - center).abs() <= r + 1e-12)
                .collect();
            let mut total = 0.0;
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a + 1..] {
                    let u = nodes[i] - nodes[j];
                    total += 2.0 * (f.values[i] - f.values[j]).norm_sqr() / (u * u) * h * h;
                }
                total += slope[i].norm_sqr() * h * h;
            }
            total
        }
    }
}

/// Outcome of the localization-chain check of the cube seminorm against
/// the full H^{1/2} norm for f supported in Q_{3r/4}.
#[derive(Debug, Clone, Copy)]
pub struct LocalizationCheck {
    /// [f]²_{1/2, Q_r}
    pub gagliardo_qr: f64,
    /// ∫_{Q_r} |f|²
    pub l2_qr: f64,
    /// ‖f‖²_{H^{1/2}} (Fourier form)
    pub h12_norm_sq: f64,
    /// Smallest C making both sides of the chain hold.
    pub c_measured: f64,
}

/// Check the two-sided localization inequality
/// [f]² + C⁻¹ r⁻¹ ∫|f|² ≤ ‖f‖² ≤ [f]² + C r⁻¹ ∫|f|² for f supported in
/// Q_{3r/4} with r ≤ 1.
pub fn lemma41_check(f: &InterfaceTrace, r: f64) -> Result<LocalizationCheck> {
    if r > 1.0 {
        return Err(Error::Precondition(format!("r = {r} > 1")));
    }
    let (a, b) = f.declared_support;
    if a < -0.75 * r - 1e-12 || b > 0.75 * r + 1e-12 {
        return Err(Error::Precondition(format!(
            "support [{a}, {b}] not inside Q_{{3r/4}} with r = {r}"
        )));
    }
    let g = gagliardo_sq(f, Region::Cube { center: 0.0, r });
    let l2 = f.l2_sq_on(0.0, r);
    let norm = h12_fourier(f).norm_sq;
    let c_measured = if l2 == 0.0 {
        1.0
    } else {
        let gap = norm - g;
        if gap <= 0.0 {
            f64::INFINITY
        } else {
            // upper side needs C >= gap*r/l2; lower side needs C >= l2/(gap*r)
            (gap * r / l2).max(l2 / (gap * r)).max(1.0)
        }
    };
    Ok(LocalizationCheck {
        gagliardo_qr: g,
        l2_qr: l2,
        h12_norm_sq: norm,
        c_measured,
    })
}

/// Bracket of Gagliardo/Fourier ratios over an ensemble.
pub fn equivalence_constant(ensemble: &[InterfaceTrace]) -> Result<(f64, f64)> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for f in ensemble {
        let four = h12_fourier(f).seminorm_sq;
        if four == 0.0 {
            continue;
        }
        let gag = gagliardo_sq(f, Region::Full);
        let ratio = gag / four;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    if !lo.is_finite() {
        return Err(Error::EmptyEnsemble);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian_trace(x_max: f64, n: usize) -> InterfaceTrace {
        let grid = Grid1::symmetric(x_max, n);
        let vals: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| if x.abs() >= 8.0 { 0.0 } else { (-0.5 * x * x).exp() })
            .collect();
        InterfaceTrace::from_real(grid, &vals, (-8.0, 8.0))
    }

    #[test]
    fn zero_trace_is_zero() {
        let grid = Grid1::symmetric(4.0, 129);
        let f = InterfaceTrace::from_real(grid, &vec![0.0; 129], (-1.0, 1.0));
        assert_eq!(h12_fourier(&f).seminorm_sq, 0.0);
        assert_eq!(gagliardo_sq(&f, Region::Full), 0.0);
    }

    #[test]
    fn gaussian_fourier_value() {
        // closed form: integral |xi| |fhat|^2 = 2 pi for f = exp(-x^2/2)
        let f = gaussian_trace(16.0, 2049);
        let v = h12_fourier(&f);
        assert_relative_eq!(
            v.seminorm_sq,
            2.0 * std::f64::consts::PI,
            max_relative = 1e-4
        );
    }

    #[test]
    fn gaussian_gagliardo_matches_fourier() {
        let f = gaussian_trace(16.0, 1025);
        let four = h12_fourier(&f).seminorm_sq;
        let gag = gagliardo_sq(&f, Region::Full);
        assert_relative_eq!(gag, four, max_relative = 0.02);
    }

    #[test]
    fn constant_on_cube_is_zero() {
        let grid = Grid1::symmetric(4.0, 257);
        let vals: Vec<f64> = grid.nodes().iter().map(|_| 1.0).collect();
        let f = InterfaceTrace::from_real(grid, &vals, (-4.0, 4.0));
        let g = gagliardo_sq(&f, Region::Cube { center: 0.0, r: 1.0 });
        assert!(g < 1e-20);
    }

    #[test]
    fn scaling_is_quadratic() {
        let f = gaussian_trace(16.0, 513);
        let mut g = f.clone();
        for v in &mut g.values {
            *v *= Complex64::new(0.0, 3.0);
        }
        assert_relative_eq!(
            h12_fourier(&g).seminorm_sq,
            9.0 * h12_fourier(&f).seminorm_sq,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            gagliardo_sq(&g, Region::Full),
            9.0 * gagliardo_sq(&f, Region::Full),
            max_relative = 1e-12
        );
    }

    #[test]
    fn translation_invariance_on_torus() {
        let grid = Grid1::symmetric(8.0, 513);
        let vals: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| if x.abs() < 1.0 { (1.0 - x * x).powi(3) } else { 0.0 })
            .collect();
        let f = InterfaceTrace::from_real(grid.clone(), &vals, (-1.0, 1.0));
        // shift by 40 whole cells
        let m = grid.n - 1;
        let shifted: Vec<f64> = (0..grid.n).map(|i| vals[(i + m - 40) % m]).collect();
        let g = InterfaceTrace::from_real(grid, &shifted, (-1.0 + 40.0 * f.grid.step(), 1.0 + 40.0 * f.grid.step()));
        assert_relative_eq!(
            h12_fourier(&g).seminorm_sq,
            h12_fourier(&f).seminorm_sq,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            gagliardo_sq(&g, Region::Full),
            gagliardo_sq(&f, Region::Full),
            max_relative = 1e-10
        );
    }

    #[test]
    fn lemma41_zero_and_bump() {
        let grid = Grid1::symmetric(4.0, 513);
        let zero = InterfaceTrace::from_real(grid.clone(), &vec![0.0; 513], (-0.5, 0.5));
        let c = lemma41_check(&zero, 1.0).unwrap();
        assert_eq!(c.c_measured, 1.0);

        let vals: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| {
                let t = x / 0.7;
                if t.abs() < 1.0 { (1.0 - t * t).powi(3) } else { 0.0 }
            })
            .collect();
        let f = InterfaceTrace::from_real(grid, &vals, (-0.7, 0.7));
        let c = lemma41_check(&f, 1.0).unwrap();
        assert!(c.c_measured.is_finite() && c.c_measured >= 1.0);
    }

    #[test]
    fn lemma41_support_violation() {
        let grid = Grid1::symmetric(4.0, 129);
        let f = InterfaceTrace::from_real(grid, &vec![0.0; 129], (-0.9, 0.9));
        assert!(lemma41_check(&f, 1.0).is_err());
    }

    #[test]
    fn equivalence_bracket_gaussian() {
        let f = gaussian_trace(16.0, 1025);
        let (lo, hi) = equivalence_constant(std::slice::from_ref(&f)).unwrap();
        assert!(lo > 0.98 && hi < 1.02, "bracket ({lo}, {hi})");
    }

    #[test]
    fn equivalence_empty_errors() {
        assert!(matches!(equivalence_constant(&[]), Err(Error::EmptyEnsemble)));
    }

    #[test]
    fn triangle_inequality() {
        let f = gaussian_trace(16.0, 257);
        let grid = f.grid.clone();
        let vals: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| if x.abs() < 2.0 { (x * 1.7).sin() * (1.0 - (x / 2.0).powi(2)) } else { 0.0 })
            .collect();
        let g = InterfaceTrace::from_real(grid.clone(), &vals, (-2.0, 2.0));
        let sum = InterfaceTrace::new(
            grid,
            f.values.iter().zip(&g.values).map(|(a, b)| a + b).collect(),
            (-8.0, 8.0),
        );
        let sf = gagliardo_sq(&f, Region::Full).sqrt();
        let sg = gagliardo_sq(&g, Region::Full).sqrt();
        let ss = gagliardo_sq(&sum, Region::Full).sqrt();
        assert!(ss <= sf + sg + 1e-12);
    }

    #[test]
    fn dilation_covariance_d1() {
        // the 1/2-seminorm is scale invariant in d = 1
        let grid = Grid1::symmetric(16.0, 2049);
        let bump = |x: f64| if x.abs() < 1.0 { (1.0 - x * x).powi(4) } else { 0.0 };
        let f = InterfaceTrace::from_real(
            grid.clone(),
            &grid.nodes().iter().map(|&x| bump(x)).collect::<Vec<_>>(),
            (-1.0, 1.0),
        );
        let g = InterfaceTrace::from_real(
            grid.clone(),
            &grid.nodes().iter().map(|&x| bump(2.0 * x)).collect::<Vec<_>>(),
            (-0.5, 0.5),
        );
        assert_relative_eq!(
            h12_fourier(&f).seminorm_sq,
            h12_fourier(&g).seminorm_sq,
            max_relative = 0.02
        );
    }
}
