//! Coefficient fields A± and the Fourier-side symbols derived from them:
//! the reduced tangential matrix B±, the drift t±, the principal root m±,
//! the quadratic symbol ζ± and its principal square root, sampled spectral
//! bounds, and the three-regime classification of the (ξ, τ) quadrant.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::grid::Grid1;

use crate::error::{Error, Result};
use crate::weights::WeightParams;

/// Which side of the interface y = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Plus => write!(f, "+"),
            Side::Minus => write!(f, "-"),
        }
    }
}

/// Structural tag for a coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Constant,
    YOnly,
    General,
}

type MatrixFn = Arc<dyn Fn(&[f64], f64) -> DMatrix<f64> + Send + Sync>;

/// The pair of symmetric matrix fields A±(x, y) with ellipticity constant
/// `lambda0` and Lipschitz constant `m0`.
///
/// Fields are supplied as closures; an optional analytic y-derivative can
/// be attached, otherwise symbol derivatives fall back to centered
/// differences with a relative step of 1e-5.
#[derive(Clone)]
pub struct CoefficientField {
    pub dim: usize,
    a_plus: MatrixFn,
    a_minus: MatrixFn,
    pub lambda0: f64,
    pub m0: f64,
    pub kind: FieldKind,
    dy_plus: Option<MatrixFn>,
    dy_minus: Option<MatrixFn>,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("dim", &self.dim)
            .field("lambda0", &self.lambda0)
            .field("m0", &self.m0)
            .field("kind", &self.kind)
            .finish()
    }
}

impl CoefficientField {
    pub fn constant(a_plus: DMatrix<f64>, a_minus: DMatrix<f64>, lambda0: f64) -> Self {
        let dim = a_plus.nrows();
        assert_eq!(a_minus.nrows(), dim);
        CoefficientField {
            dim,
            a_plus: Arc::new(move |_, _| a_plus.clone()),
            a_minus: Arc::new(move |_, _| a_minus.clone()),
            lambda0,
            m0: 0.0,
            kind: FieldKind::Constant,
            dy_plus: None,
            dy_minus: None,
        }
    }

    pub fn y_only<F, G>(dim: usize, a_plus: F, a_minus: G, lambda0: f64, m0: f64) -> Self
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
        G: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        CoefficientField {
            dim,
            a_plus: Arc::new(move |_, y| a_plus(y)),
            a_minus: Arc::new(move |_, y| a_minus(y)),
            lambda0,
            m0,
            kind: FieldKind::YOnly,
            dy_plus: None,
            dy_minus: None,
        }
    }

    pub fn general<F, G>(dim: usize, a_plus: F, a_minus: G, lambda0: f64, m0: f64) -> Self
    where
        F: Fn(&[f64], f64) -> DMatrix<f64> + Send + Sync + 'static,
        G: Fn(&[f64], f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        CoefficientField {
            dim,
            a_plus: Arc::new(a_plus),
            a_minus: Arc::new(a_minus),
            lambda0,
            m0,
            kind: FieldKind::General,
            dy_plus: None,
            dy_minus: None,
        }
    }

    pub fn with_analytic_dy<F, G>(mut self, dy_plus: F, dy_minus: G) -> Self
    where
        F: Fn(&[f64], f64) -> DMatrix<f64> + Send + Sync + 'static,
        G: Fn(&[f64], f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.dy_plus = Some(Arc::new(dy_plus));
        self.dy_minus = Some(Arc::new(dy_minus));
        self
    }

    /// Freeze the tangential variable at `x_g`, yielding a y-only field.
    /// Used by the partition mechanism which localizes to cell centers.
    pub fn freeze_x(&self, x_g: &[f64]) -> CoefficientField {
        let xg: Vec<f64> = x_g.to_vec();
        let ap = self.a_plus.clone();
        let am = self.a_minus.clone();
        let xg2 = xg.clone();
        CoefficientField {
            dim: self.dim,
            a_plus: Arc::new(move |_, y| ap(&xg, y)),
            a_minus: Arc::new(move |_, y| am(&xg2, y)),
            lambda0: self.lambda0,
            m0: self.m0,
            kind: FieldKind::YOnly,
            dy_plus: None,
            dy_minus: None,
        }
    }

    /// The rescaled field A±(δx, δy) of the change-of-variables step.
    pub fn rescaled(&self, delta: f64) -> CoefficientField {
        let ap = self.a_plus.clone();
        let am = self.a_minus.clone();
        CoefficientField {
            dim: self.dim,
            a_plus: Arc::new(move |x, y| {
                let xs: Vec<f64> = x.iter().map(|&t| delta * t).collect();
                ap(&xs, delta * y)
            }),
            a_minus: Arc::new(move |x, y| {
                let xs: Vec<f64> = x.iter().map(|&t| delta * t).collect();
                am(&xs, delta * y)
            }),
            lambda0: self.lambda0,
            m0: self.m0 * delta,
            kind: self.kind,
            dy_plus: None,
            dy_minus: None,
        }
    }

    pub fn matrix(&self, side: Side, x: &[f64], y: f64) -> Result<DMatrix<f64>> {
        let a = match side {
            Side::Plus => (self.a_plus)(x, y),
            Side::Minus => (self.a_minus)(x, y),
        };
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite entry in A{side} at y = {y}"
            )));
        }
        Ok(a)
    }

    fn matrix_dy(&self, side: Side, x: &[f64], y: f64) -> Result<DMatrix<f64>> {
        let analytic = match side {
            Side::Plus => &self.dy_plus,
            Side::Minus => &self.dy_minus,
        };
        if let Some(d) = analytic {
            return Ok(d(x, y));
        }
        let h = 1e-5 * (1.0 + y.abs());
        let ap = self.matrix(side, x, y + h)?;
        let am = self.matrix(side, x, y - h)?;
        Ok((ap - am) / (2.0 * h))
    }

    /// Schur complement of a_nn: b_jk = a_jk - a_nj a_nk / a_nn.
    pub fn reduced_matrix(&self, side: Side, x: &[f64], y: f64) -> Result<DMatrix<f64>> {
        let a = self.matrix(side, x, y)?;
        Ok(schur_reduce(&a))
    }

    /// The drift t±(ξ, y) = Σ_j a_nj / a_nn ξ_j.
    pub fn tangential_drift(&self, side: Side, x: &[f64], y: f64, xi: &[f64]) -> Result<f64> {
        let a = self.matrix(side, x, y)?;
        Ok(drift_of(&a, xi))
    }

    /// The principal root symbol m±(ξ, y) = sqrt(B(ξ, ξ) / a_nn).
    pub fn principal_root(&self, side: Side, x: &[f64], y: f64, xi: &[f64]) -> Result<f64> {
        if xi.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let a = self.matrix(side, x, y)?;
        let b = schur_reduce(&a);
        let n = a.nrows();
        Ok((quad_form(&b, xi, xi) / a[(n - 1, n - 1)]).sqrt())
    }

    /// ζ±(ξ, y) = [B(ξ,ξ) + 2isτ B(ξ,γ) - s²τ² B(γ,γ)] / a_nn.
    pub fn zeta(
        &self,
        side: Side,
        x: &[f64],
        y: f64,
        xi: &[f64],
        s: f64,
        tau: f64,
        gamma: &[f64],
    ) -> Result<Complex64> {
        let a = self.matrix(side, x, y)?;
        let b = schur_reduce(&a);
        let ann = a[(a.nrows() - 1, a.nrows() - 1)];
        let st = s * tau;
        let re = quad_form(&b, xi, xi) - st * st * quad_form(&b, gamma, gamma);
        let im = 2.0 * st * quad_form(&b, xi, gamma);
        Ok(Complex64::new(re / ann, im / ann))
    }

    /// ∂_y of the product a_nn(y) √ζ(ξ, y): analytic derivative when the
    /// field carries one, centered differences otherwise.
    pub fn d_ann_sqrt_zeta(
        &self,
        side: Side,
        x: &[f64],
        y: f64,
        xi: &[f64],
        s: f64,
        tau: f64,
        gamma: &[f64],
    ) -> Result<Complex64> {
        let g = |yy: f64| -> Result<Complex64> {
            let a = self.matrix(side, x, yy)?;
            let ann = a[(a.nrows() - 1, a.nrows() - 1)];
            Ok(branch_sqrt(self.zeta(side, x, yy, xi, s, tau, gamma)?)? * ann)
        };
        if self.kind == FieldKind::Constant {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let h = 1e-5 * (1.0 + y.abs());
        Ok((g(y + h)? - g(y - h)?) / (2.0 * h))
    }

    /// Validate the ellipticity and Lipschitz hypotheses by sampling.
    pub fn validate_hypotheses(&self, grid: &SampleGrid, tol: f64) -> Result<()> {
        for side in Side::BOTH {
            for xs in &grid.xs {
                for &y in &grid.ys {
                    let a = self.matrix(side, xs, y)?;
                    let n = a.nrows();
                    if a[(n - 1, n - 1)] < self.lambda0 - tol {
                        return Err(Error::InvalidField(format!(
                            "a{side}_nn({y}) = {} < lambda0 = {}",
                            a[(n - 1, n - 1)],
                            self.lambda0
                        )));
                    }
                    let eig = a.clone().symmetric_eigen().eigenvalues;
                    let (lo, hi) = (eig.min(), eig.max());
                    if lo < self.lambda0 - tol || hi > 1.0 / self.lambda0 + tol {
                        return Err(Error::InvalidField(format!(
                            "eigenvalues of A{side} at y = {y} outside [{}, {}]: [{lo}, {hi}]",
                            self.lambda0,
                            1.0 / self.lambda0
                        )));
                    }
                }
                // Lipschitz difference quotients in y.
                for w in grid.ys.windows(2) {
                    let (y0, y1) = (w[0], w[1]);
                    let d = self.matrix(side, xs, y1)? - self.matrix(side, xs, y0)?;
                    let norm = d.norm();
                    if norm > self.m0 * (y1 - y0).abs() + tol {
                        return Err(Error::InvalidField(format!(
                            "Lipschitz violation on A{side} between y = {y0} and {y1}: |dA| = {norm}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Sampled spectral bounds λ₁, λ₂, λ₃⁻¹, L and the measured derivative
    /// constants M₁–M₄. The sample sets are part of the run configuration.
    pub fn spectral_bounds(&self, grid: &SampleGrid) -> Result<SymbolBounds> {
        let mut lam1_min = f64::INFINITY;
        let mut lam1_inv_min = f64::INFINITY;
        let mut lam3_inv = 0.0f64;
        let mut m1 = 0.0f64;
        let mut m2 = 0.0f64;
        let mut m3 = 0.0f64;
        let mut m4 = 0.0f64;
        for side in Side::BOTH {
            for xs in &grid.xs {
                for &y in &grid.ys {
                    let a = self.matrix(side, xs, y)?;
                    let ann = a[(a.nrows() - 1, a.nrows() - 1)];
                    let b = schur_reduce(&a);
                    let eig = b.clone().symmetric_eigen().eigenvalues;
                    lam1_min = lam1_min.min(eig.min());
                    lam1_inv_min = lam1_inv_min.min(1.0 / eig.max());
                    let da = self.matrix_dy(side, xs, y)?;
                    let db = schur_reduce_dy(&a, &da);
                    let dann = da[(a.nrows() - 1, a.nrows() - 1)];
                    for d in &grid.xi_dirs {
                        lam3_inv = lam3_inv.max(drift_of(&a, d).abs());
                        let m = (quad_form(&b, d, d) / ann).sqrt();
                        for d2 in &grid.xi_dirs {
                            m1 = m1.max(quad_form(&db, d, d2).abs());
                        }
                        let bdd = quad_form(&b, d, d);
                        let dbdd = quad_form(&db, d, d);
                        // d/dy of m = d/dy sqrt(B(d,d)/ann)
                        let dm = 0.5 / m * (dbdd / ann - bdd * dann / (ann * ann));
                        m2 = m2.max(dm.abs());
                        // d/dy of t(d, y)
                        let t = drift_of(&a, d);
                        let dt = drift_dy(&a, &da, d) - t * dann / ann;
                        m3 = m3.max(dt.abs());
                        // d/dy of B(d,d)/ann controls the zeta derivative bound;
                        // the factor 2 covers the mixed B(ξ, γ) term.
                        m4 = m4.max(2.0 * (dbdd / ann - bdd * dann / (ann * ann)).abs());
                    }
                }
            }
        }
        if !(lam1_min > 0.0) {
            return Err(Error::InvalidField(format!(
                "degenerate reduced matrix: lambda1 = {lam1_min}"
            )));
        }
        let lambda1 = lam1_min.min(lam1_inv_min).min(self.lambda0);
        let lambda2 = (self.lambda0 * lambda1).sqrt();
        // L = sup m+(ξ, 0) / m-(ξ, 0) over the declared ξ sample set; for
        // general fields the sup also runs over the x samples.
        let mut l_ratio = 0.0f64;
        for xs in &grid.xs {
            for d in &grid.xi_dirs {
                let mp = self.principal_root(Side::Plus, xs, 0.0, d)?;
                let mm = self.principal_root(Side::Minus, xs, 0.0, d)?;
                l_ratio = l_ratio.max(mp / mm);
            }
        }
        if !l_ratio.is_finite() || l_ratio <= 0.0 {
            return Err(Error::InvalidField(format!("bad L ratio: {l_ratio}")));
        }
        Ok(SymbolBounds {
            lambda1,
            lambda2,
            lambda3_inv: lam3_inv,
            l_ratio,
            m1,
            m2,
            m3,
            m4,
        })
    }
}

fn schur_reduce(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let ann = a[(n - 1, n - 1)];
    let mut b = DMatrix::zeros(n - 1, n - 1);
    for j in 0..n - 1 {
        for k in 0..n - 1 {
            b[(j, k)] = a[(j, k)] - a[(n - 1, j)] * a[(n - 1, k)] / ann;
        }
    }
    b
}

/// y-derivative of the Schur complement given A and dA/dy.
fn schur_reduce_dy(a: &DMatrix<f64>, da: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let ann = a[(n - 1, n - 1)];
    let dann = da[(n - 1, n - 1)];
    let mut db = DMatrix::zeros(n - 1, n - 1);
    for j in 0..n - 1 {
        for k in 0..n - 1 {
            db[(j, k)] = da[(j, k)]
                - (da[(n - 1, j)] * a[(n - 1, k)] + a[(n - 1, j)] * da[(n - 1, k)]) / ann
                + a[(n - 1, j)] * a[(n - 1, k)] * dann / (ann * ann);
        }
    }
    db
}

fn drift_of(a: &DMatrix<f64>, xi: &[f64]) -> f64 {
    let n = a.nrows();
    let ann = a[(n - 1, n - 1)];
    (0..n - 1).map(|j| a[(n - 1, j)] / ann * xi[j]).sum()
}

/// d/dy of Σ a_nj ξ_j (the numerator part; the quotient rule is finished
/// by the caller).
fn drift_dy(a: &DMatrix<f64>, da: &DMatrix<f64>, xi: &[f64]) -> f64 {
    let n = a.nrows();
    let ann = a[(n - 1, n - 1)];
    (0..n - 1).map(|j| da[(n - 1, j)] / ann * xi[j]).sum()
}

fn quad_form(b: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..b.nrows() {
        for k in 0..b.ncols() {
            s += b[(j, k)] * u[j] * v[k];
        }
    }
    s
}

/// Principal square root with the cut along the negative real axis,
/// computed from the explicit real-pair formula; Re √z ≥ 0 always.
pub fn branch_sqrt(z: Complex64) -> Result<Complex64> {
    let (a, b) = (z.re, z.im);
    if a == 0.0 && b == 0.0 {
        return Err(Error::SqrtAtZero);
    }
    if b == 0.0 && a < 0.0 {
        return Err(Error::BranchCut);
    }
    let r = a.hypot(b);
    let re = ((a + r) / 2.0).sqrt();
    let im = b / (2.0 * (a + r)).sqrt();
    Ok(Complex64::new(re, im))
}

/// Sample sets used for bound measurement and hypothesis validation.
/// Part of the configuration; recorded in reports.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<f64>,
    /// Unit tangential directions for the ξ-dependent bounds.
    pub xi_dirs: Vec<Vec<f64>>,
}

impl SampleGrid {
    /// Default sample set for n = 2 over the working box [-x_max, x_max] x
    /// [-y_max, y_max].
    pub fn default_2d(x_max: f64, y_max: f64, n_samples: usize) -> Self {
        let xg = Grid1::symmetric(x_max, n_samples);
        let yg = Grid1::symmetric(y_max, n_samples);
        SampleGrid {
            xs: xg.nodes().into_iter().map(|v| vec![v]).collect(),
            ys: yg.nodes(),
            xi_dirs: vec![vec![1.0], vec![-1.0]],
        }
    }
}

/// Measured spectral bounds of the symbol calculus.
#[derive(Debug, Clone, Copy)]
pub struct SymbolBounds {
    /// Reduced-matrix ellipticity: λ₁ ≤ eigenvalues of B± ≤ λ₁⁻¹.
    pub lambda1: f64,
    /// λ₂ = sqrt(λ₀ λ₁); brackets m±/|ξ|.
    pub lambda2: f64,
    /// Bound on |t±(ξ, y)| / |ξ|.
    pub lambda3_inv: f64,
    /// L = sup m₊(ξ, 0) / m₋(ξ, 0) over the sample set.
    pub l_ratio: f64,
    /// Measured |∂_y B(ξ, η)| / (|ξ||η|).
    pub m1: f64,
    /// Measured |∂_y m±| / |ξ|.
    pub m2: f64,
    /// Measured |∂_y t±| / |ξ|.
    pub m3: f64,
    /// Measured |∂_y ζ±| / (|ξ|² + s²τ²).
    pub m4: f64,
}

impl SymbolBounds {
    /// κ = ½ (1 - L α₋ / α₊); lies in (0, ½] exactly when L < α₊/α₋.
    pub fn kappa(&self, p: &WeightParams) -> f64 {
        0.5 * (1.0 - self.l_ratio * p.alpha_minus / p.alpha_plus)
    }
}

/// The three-regime split of the (ξ, τ) quadrant. Closed thresholds assign
/// boundary points to the lower-numbered case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    Case1,
    Case2,
    Case3,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Case1 => write!(f, "case1"),
            Regime::Case2 => write!(f, "case2"),
            Regime::Case3 => write!(f, "case3"),
        }
    }
}

pub fn classify_regime(
    xi: &[f64],
    tau: f64,
    p: &WeightParams,
    bounds: &SymbolBounds,
    m_plus_at_0: f64,
) -> Regime {
    let xi_norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let kappa = bounds.kappa(p);
    let case1_floor = bounds.lambda2 * bounds.lambda2 * xi_norm / (2.0 * p.s0);
    let case2_floor = m_plus_at_0 / ((1.0 - kappa) * p.alpha_plus);
    if tau >= case1_floor {
        Regime::Case1
    } else if tau >= case2_floor {
        Regime::Case2
    } else {
        Regime::Case3
    }
}
