//! Assembly of the full two-sided Carleman inequalities: the discrete
//! divergence-form operator, transmission data, the itemized left/right
//! sides with the three weight families, the spectral-vs-direct
//! conjugation cross-check, the Ξ functional, and the partition assembly
//! inequality.
//!
//! All of this is specific to one tangential dimension (n = 2): fields
//! live on a tensor grid [−X, X] × [−Y, Y] with y = 0 a shared node row.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::coeffs::{CoefficientField, FieldKind, Side};
use crate::error::{Error, Result};
use crate::freq::{conjugated_p, FrequencySlice};
use crate::grid::{deriv1, trapezoid_weights, TensorGrid};
use crate::partition::PartitionFamily;
use crate::seminorms::{h12_fourier, InterfaceTrace};
use crate::weights::WeightParams;

/// A two-sided scalar field; both halves own the y = 0 node row.
/// Values are indexed `[ix][iy]` with iy ascending (plus half starts at
/// y = 0, minus half ends at y = 0).
#[derive(Debug, Clone)]
pub struct TwoSidedField {
    pub grid: TensorGrid,
    pub u_plus: Vec<Vec<Complex64>>,
    pub u_minus: Vec<Vec<Complex64>>,
    pub support_x: (f64, f64),
    pub support_y: (f64, f64),
}

impl TwoSidedField {
    pub fn zeros(grid: TensorGrid) -> Self {
        let col = vec![Complex64::new(0.0, 0.0); grid.y.len()];
        let plane = vec![col; grid.x.n];
        TwoSidedField {
            grid,
            u_plus: plane.clone(),
            u_minus: plane,
            support_x: (0.0, 0.0),
            support_y: (0.0, 0.0),
        }
    }

    pub fn from_fn<F, G>(grid: TensorGrid, support_x: (f64, f64), support_y: (f64, f64), f_plus: F, f_minus: G) -> Self
    where
        F: Fn(f64, f64) -> Complex64,
        G: Fn(f64, f64) -> Complex64,
    {
        let xs = grid.x.nodes();
        let yp = grid.y.nodes_plus();
        let ym = grid.y.nodes_minus();
        let u_plus = xs
            .iter()
            .map(|&x| yp.iter().map(|&y| f_plus(x, y)).collect())
            .collect();
        let u_minus = xs
            .iter()
            .map(|&x| ym.iter().map(|&y| f_minus(x, y)).collect())
            .collect();
        TwoSidedField {
            grid,
            u_plus,
            u_minus,
            support_x,
            support_y,
        }
    }

    pub fn values(&self, side: Side) -> &Vec<Vec<Complex64>> {
        match side {
            Side::Plus => &self.u_plus,
            Side::Minus => &self.u_minus,
        }
    }

    pub fn scale(&mut self, c: Complex64) {
        for col in self.u_plus.iter_mut().chain(self.u_minus.iter_mut()) {
            for v in col {
                *v *= c;
            }
        }
    }

    fn y_nodes(&self, side: Side) -> Vec<f64> {
        match side {
            Side::Plus => self.grid.y.nodes_plus(),
            Side::Minus => self.grid.y.nodes_minus(),
        }
    }

    fn interface_index(&self, side: Side) -> usize {
        match side {
            Side::Plus => 0,
            Side::Minus => self.grid.y.len() - 1,
        }
    }

    /// Require the declared support inside the given box, and the values to
    /// actually vanish outside the declared support.
    pub fn check_support(&self, x_half: f64, y_half: f64) -> Result<()> {
        let (xa, xb) = self.support_x;
        let (ya, yb) = self.support_y;
        if xa < -x_half - 1e-12 || xb > x_half + 1e-12 || ya < -y_half - 1e-12 || yb > y_half + 1e-12
        {
            return Err(Error::Precondition(format!(
                "declared support [{xa}, {xb}] x [{ya}, {yb}] exceeds the box {x_half} x {y_half}"
            )));
        }
        let amp = self
            .u_plus
            .iter()
            .chain(&self.u_minus)
            .flatten()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let xs = self.grid.x.nodes();
        for side in Side::BOTH {
            let ys = self.y_nodes(side);
            for (ix, col) in self.values(side).iter().enumerate() {
                for (iy, v) in col.iter().enumerate() {
                    let inside = xs[ix] >= xa - 1e-12
                        && xs[ix] <= xb + 1e-12
                        && ys[iy] >= ya - 1e-12
                        && ys[iy] <= yb + 1e-12;
                    if !inside && v.norm() > 1e-12 * amp {
                        return Err(Error::Precondition(format!(
                            "field does not vanish outside its declared support at ({}, {})",
                            xs[ix], ys[iy]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn d_x(vals: &[Vec<Complex64>], hx: f64) -> Vec<Vec<Complex64>> {
    let nx = vals.len();
    let ny = vals[0].len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ny]; nx];
    let mut row = vec![Complex64::new(0.0, 0.0); nx];
    for iy in 0..ny {
        for ix in 0..nx {
            row[ix] = vals[ix][iy];
        }
        let d = deriv1(&row, hx);
        for ix in 0..nx {
            out[ix][iy] = d[ix];
        }
    }
    out
}

fn d_y(vals: &[Vec<Complex64>], hy: f64) -> Vec<Vec<Complex64>> {
    vals.iter().map(|col| deriv1(col, hy)).collect()
}

/// Conservative application of div(A ∇u) on each closed half-space via
/// node fluxes: exact on quadratics for constant A.
pub fn apply_operator(u: &TwoSidedField, field: &CoefficientField) -> Result<TwoSidedField> {
    let hx = u.grid.x.step();
    let hy = u.grid.y.h();
    let xs = u.grid.x.nodes();
    let mut out = TwoSidedField::zeros(u.grid.clone());
    out.support_x = (u.grid.x.min, u.grid.x.max);
    out.support_y = (-u.grid.y.y_max, u.grid.y.y_max);
    for side in Side::BOTH {
        let vals = u.values(side);
        let ys = u.y_nodes(side);
        let gx = d_x(vals, hx);
        let gy = d_y(vals, hy);
        let nx = vals.len();
        let ny = vals[0].len();
        let mut f1 = vec![vec![Complex64::new(0.0, 0.0); ny]; nx];
        let mut f2 = vec![vec![Complex64::new(0.0, 0.0); ny]; nx];
        for ix in 0..nx {
            for iy in 0..ny {
                let a = field.matrix(side, &xs[ix..ix + 1], ys[iy])?;
                f1[ix][iy] = gx[ix][iy] * a[(0, 0)] + gy[ix][iy] * a[(0, 1)];
                f2[ix][iy] = gx[ix][iy] * a[(1, 0)] + gy[ix][iy] * a[(1, 1)];
            }
        }
        let div = {
            let d1 = d_x(&f1, hx);
            let d2 = d_y(&f2, hy);
            (0..nx)
                .map(|ix| (0..ny).map(|iy| d1[ix][iy] + d2[ix][iy]).collect())
                .collect()
        };
        match side {
            Side::Plus => out.u_plus = div,
            Side::Minus => out.u_minus = div,
        }
    }
    Ok(out)
}

/// Interface transmission data: the trace jump h0 and the conormal-flux
/// jump h1 with ν = −e_n.
#[derive(Debug, Clone)]
pub struct TransmissionData {
    pub h0: InterfaceTrace,
    pub h1: InterfaceTrace,
}

/// One-sided interface traces of u and its first derivatives.
fn interface_gradients(
    u: &TwoSidedField,
    side: Side,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let hx = u.grid.x.step();
    let hy = u.grid.y.h();
    let vals = u.values(side);
    let nx = vals.len();
    let j = u.interface_index(side);
    let trace: Vec<Complex64> = (0..nx).map(|ix| vals[ix][j]).collect();
    let gx = deriv1(&trace, hx);
    let gy: Vec<Complex64> = (0..nx)
        .map(|ix| {
            let c = &vals[ix];
            match side {
                Side::Plus => (-c[2] + c[1] * 4.0 - c[0] * 3.0) / (2.0 * hy),
                Side::Minus => (c[j] * 3.0 - c[j - 1] * 4.0 + c[j - 2]) / (2.0 * hy),
            }
        })
        .collect();
    (trace, gx, gy)
}

pub fn transmission(u: &TwoSidedField, field: &CoefficientField) -> Result<TransmissionData> {
    let xs = u.grid.x.nodes();
    let (tp, gxp, gyp) = interface_gradients(u, Side::Plus);
    let (tm, gxm, gym) = interface_gradients(u, Side::Minus);
    let mut h0 = Vec::with_capacity(xs.len());
    let mut h1 = Vec::with_capacity(xs.len());
    for ix in 0..xs.len() {
        h0.push(tp[ix] - tm[ix]);
        let ap = field.matrix(Side::Plus, &xs[ix..ix + 1], 0.0)?;
        let am = field.matrix(Side::Minus, &xs[ix..ix + 1], 0.0)?;
        // A ∇u · ν with ν = −e_n picks out minus the n-th flux component
        let flux_p = gxp[ix] * ap[(1, 0)] + gyp[ix] * ap[(1, 1)];
        let flux_m = gxm[ix] * am[(1, 0)] + gym[ix] * am[(1, 1)];
        h1.push(-(flux_p - flux_m));
    }
    Ok(TransmissionData {
        h0: InterfaceTrace::new(u.grid.x.clone(), h0, u.support_x),
        h1: InterfaceTrace::new(u.grid.x.clone(), h1, u.support_x),
    })
}

/// Residual of the transmission sign identity: the drift form
/// a_nn(∂y + T)u jumped across the interface must equal −h1 exactly.
pub fn sign_identity_residual(u: &TwoSidedField, field: &CoefficientField) -> Result<f64> {
    let xs = u.grid.x.nodes();
    let data = transmission(u, field)?;
    let (_, gxp, gyp) = interface_gradients(u, Side::Plus);
    let (_, gxm, gym) = interface_gradients(u, Side::Minus);
    let mut worst = 0.0f64;
    let mut scale = 1e-300f64;
    for ix in 0..xs.len() {
        let x = &xs[ix..ix + 1];
        let ap = field.matrix(Side::Plus, x, 0.0)?;
        let am = field.matrix(Side::Minus, x, 0.0)?;
        let lhs = (gyp[ix] + gxp[ix] * (ap[(1, 0)] / ap[(1, 1)])) * ap[(1, 1)]
            - (gym[ix] + gxm[ix] * (am[(1, 0)] / am[(1, 1)])) * am[(1, 1)];
        worst = worst.max((lhs + data.h1.values[ix]).norm());
        scale = scale.max(lhs.norm());
    }
    Ok(worst / scale.max(1.0))
}

/// Itemized sides of a weighted estimate.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub lhs_terms: Vec<(&'static str, f64)>,
    pub rhs_terms: Vec<(&'static str, f64)>,
    pub lhs_total: f64,
    pub rhs_total: f64,
    /// lhs/rhs; NaN when the right side vanishes.
    pub ratio: f64,
    pub params: WeightParams,
}

impl EstimateReport {
    pub fn term(&self, name: &str) -> f64 {
        self.lhs_terms
            .iter()
            .chain(&self.rhs_terms)
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .unwrap_or(f64::NAN)
    }
}

type WeightFn<'a> = &'a dyn Fn(f64, f64) -> f64;

/// Left-hand terms of the (2.10)/(3.7)/(4.22)-shaped functional with an
/// arbitrary weight exponent.
fn lhs_terms(u: &TwoSidedField, p: &WeightParams, weight: WeightFn) -> Vec<(&'static str, f64)> {
    let hx = u.grid.x.step();
    let hy = u.grid.y.h();
    let xs = u.grid.x.nodes();
    let wx = trapezoid_weights(u.grid.x.n, hx);
    let wy = trapezoid_weights(u.grid.y.len(), hy);
    let tau = p.tau;
    let mut vol = [0.0f64; 3];
    let mut iface = [0.0f64; 2];
    let mut trace_half = 0.0;
    let mut dy_half = 0.0;
    let mut dx_half = 0.0;
    for side in Side::BOTH {
        let vals = u.values(side);
        let ys = u.y_nodes(side);
        let gx = d_x(vals, hx);
        let gy = d_y(vals, hy);
        let gxx = d_x(&gx, hx);
        let gxy = d_y(&gx, hy);
        let gyy = d_y(&gy, hy);
        let nx = vals.len();
        let ny = vals[0].len();
        for ix in 0..nx {
            for iy in 0..ny {
                let e2 = (2.0 * tau * weight(xs[ix], ys[iy])).exp();
                let q = wx[ix] * wy[iy] * e2;
                vol[0] += q * vals[ix][iy].norm_sqr();
                vol[1] += q * (gx[ix][iy].norm_sqr() + gy[ix][iy].norm_sqr());
                vol[2] += q
                    * (gxx[ix][iy].norm_sqr()
                        + 2.0 * gxy[ix][iy].norm_sqr()
                        + gyy[ix][iy].norm_sqr());
            }
        }
        // interface terms with one-sided normal derivatives
        let (trace, tgx, tgy) = interface_gradients(u, side);
        for ix in 0..nx {
            let e2 = (2.0 * tau * weight(xs[ix], 0.0)).exp();
            iface[0] += wx[ix] * e2 * trace[ix].norm_sqr();
            iface[1] += wx[ix] * e2 * (tgx[ix].norm_sqr() + tgy[ix].norm_sqr());
        }
        // weighted half-seminorms of the interface data
        let weighted_trace: Vec<Complex64> = (0..nx)
            .map(|ix| trace[ix] * (tau * weight(xs[ix], 0.0)).exp())
            .collect();
        let f = InterfaceTrace::new(u.grid.x.clone(), weighted_trace, u.support_x);
        trace_half += tau * tau * h12_fourier(&f).seminorm_sq;
        // ∂y(e^{τw} u)(·, 0) by the one-sided stencil on the weighted field
        let j = u.interface_index(side);
        let dy_weighted: Vec<Complex64> = (0..nx)
            .map(|ix| {
                let col = &vals[ix];
                let wv = |iy: usize| col[iy] * (tau * weight(xs[ix], ys[iy])).exp();
                match side {
                    Side::Plus => (-wv(2) + wv(1) * 4.0 - wv(0) * 3.0) / (2.0 * hy),
                    Side::Minus => (wv(j) * 3.0 - wv(j - 1) * 4.0 + wv(j - 2)) / (2.0 * hy),
                }
            })
            .collect();
        let f = InterfaceTrace::new(u.grid.x.clone(), dy_weighted, u.support_x);
        dy_half += h12_fourier(&f).seminorm_sq;
        let dx_weighted = deriv1(
            &(0..nx)
                .map(|ix| trace[ix] * (tau * weight(xs[ix], 0.0)).exp())
                .collect::<Vec<_>>(),
            hx,
        );
        let f = InterfaceTrace::new(u.grid.x.clone(), dx_weighted, u.support_x);
        dx_half += h12_fourier(&f).seminorm_sq;
    }
    vec![
        ("volume_k0", tau.powi(3) * vol[0]),
        ("volume_k1", tau * vol[1]),
        ("volume_k2", vol[2] / tau),
        ("interface_k0", tau.powi(3) * iface[0]),
        ("interface_k1", tau * iface[1]),
        ("trace_half", trace_half),
        ("dy_half", dy_half),
        ("dx_half", dx_half),
    ]
}

fn rhs_terms(
    u: &TwoSidedField,
    p: &WeightParams,
    field: &CoefficientField,
    weight: WeightFn,
) -> Result<Vec<(&'static str, f64)>> {
    let hx = u.grid.x.step();
    let hy = u.grid.y.h();
    let xs = u.grid.x.nodes();
    let wx = trapezoid_weights(u.grid.x.n, hx);
    let wy = trapezoid_weights(u.grid.y.len(), hy);
    let tau = p.tau;
    let lu = apply_operator(u, field)?;
    let mut residual = 0.0;
    for side in Side::BOTH {
        let vals = lu.values(side);
        let ys = u.y_nodes(side);
        for (ix, col) in vals.iter().enumerate() {
            for (iy, v) in col.iter().enumerate() {
                residual += wx[ix] * wy[iy] * (2.0 * tau * weight(xs[ix], ys[iy])).exp() * v.norm_sqr();
            }
        }
    }
    let data = transmission(u, field)?;
    let weighted = |t: &InterfaceTrace| -> Vec<Complex64> {
        t.values
            .iter()
            .zip(&xs)
            .map(|(v, &x)| v * (tau * weight(x, 0.0)).exp())
            .collect()
    };
    let wh1 = InterfaceTrace::new(u.grid.x.clone(), weighted(&data.h1), u.support_x);
    let h1_half = h12_fourier(&wh1).seminorm_sq;
    let wh0 = weighted(&data.h0);
    let dxh0 = InterfaceTrace::new(u.grid.x.clone(), deriv1(&wh0, hx), u.support_x);
    let dx_h0_half = h12_fourier(&dxh0).seminorm_sq;
    let mut h0_l2 = 0.0;
    let mut h1_l2 = 0.0;
    for ix in 0..xs.len() {
        let e2 = (2.0 * tau * weight(xs[ix], 0.0)).exp();
        h0_l2 += wx[ix] * e2 * data.h0.values[ix].norm_sqr();
        h1_l2 += wx[ix] * e2 * data.h1.values[ix].norm_sqr();
    }
    Ok(vec![
        ("residual", residual),
        ("h1_half", h1_half),
        ("dx_h0_half", dx_h0_half),
        ("h0_l2_tau3", tau.powi(3) * h0_l2),
        ("h1_l2_tau", tau * h1_l2),
    ])
}

fn assemble(
    lhs: Vec<(&'static str, f64)>,
    rhs: Vec<(&'static str, f64)>,
    p: &WeightParams,
) -> EstimateReport {
    let lhs_total: f64 = lhs.iter().map(|(_, v)| v).sum();
    let rhs_total: f64 = rhs.iter().map(|(_, v)| v).sum();
    EstimateReport {
        lhs_terms: lhs,
        rhs_terms: rhs,
        lhs_total,
        rhs_total,
        ratio: if rhs_total > 0.0 {
            lhs_total / rhs_total
        } else {
            f64::NAN
        },
        params: p.clone(),
    }
}

/// Both sides of the y-only-coefficient estimate with the linear-in-x
/// weight φ(y) + sγ·x.
pub fn theorem31_sides(
    w: &TwoSidedField,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<EstimateReport> {
    if field.kind == FieldKind::General {
        return Err(Error::Precondition(
            "theorem31_sides needs a y-only coefficient field".into(),
        ));
    }
    if p.tau < p.tau0 {
        return Err(Error::Precondition(format!("tau = {} < tau0", p.tau)));
    }
    w.check_support(1.0, p.r0)?;
    let weight = |x: f64, y: f64| p.linear_phi(&[x], y);
    let lhs = lhs_terms(w, p, &weight);
    let rhs = rhs_terms(w, p, field, &weight)?;
    Ok(assemble(lhs, rhs, p))
}

/// Both sides of the general estimate with the weight ϕ_δ, plus the
/// internal rescaling cross-check: the same report evaluated in the
/// rescaled frame (w(x, y) = u(δx, δy), weight ψ_ε with ε = δ, rescaled
/// coefficients) must match term-by-term through the exact δ powers.
pub fn theorem21_sides(
    u: &TwoSidedField,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<(EstimateReport, f64)> {
    if p.delta > p.delta0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "delta = {} above delta0 = {}",
            p.delta, p.delta0
        )));
    }
    if p.tau < p.tau0 {
        return Err(Error::Precondition(format!("tau = {} < tau0", p.tau)));
    }
    let d = p.delta;
    u.check_support(d / 2.0, d * p.r0)?;
    let weight = |x: f64, y: f64| p.phi_delta(&[x], y);
    let report = assemble(
        lhs_terms(u, p, &weight),
        rhs_terms(u, p, field, &weight)?,
        p,
    );

    // rescaled frame: identical node values on a relabeled grid
    let mut grid_w = u.grid.clone();
    grid_w.x.min /= d;
    grid_w.x.max /= d;
    grid_w.y.y_max /= d;
    let w_field = TwoSidedField {
        grid: grid_w,
        u_plus: u.u_plus.clone(),
        u_minus: u.u_minus.clone(),
        support_x: (u.support_x.0 / d, u.support_x.1 / d),
        support_y: (u.support_y.0 / d, u.support_y.1 / d),
    };
    let mut pw = p.clone();
    pw.epsilon = d;
    let coeffs_w = field.rescaled(d);
    let weight_w = |x: f64, y: f64| pw.psi_eps(&[x], y);
    let report_w = assemble(
        lhs_terms(&w_field, &pw, &weight_w),
        rhs_terms(&w_field, &pw, &coeffs_w, &weight_w)?,
        &pw,
    );
    let powers: &[(&str, i32)] = &[
        ("volume_k0", 2),
        ("volume_k1", 0),
        ("volume_k2", -2),
        ("interface_k0", 1),
        ("interface_k1", -1),
        ("trace_half", 0),
        ("dy_half", -2),
        ("dx_half", -2),
        ("residual", -2),
        ("h1_half", -2),
        ("dx_h0_half", -2),
        ("h0_l2_tau3", 1),
        ("h1_l2_tau", -1),
    ];
    let mut worst = 0.0f64;
    for (name, pow) in powers {
        let a = report.term(name);
        let b = report_w.term(name) * d.powi(*pow);
        let scale = a.abs().max(b.abs());
        if scale > 0.0 {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    Ok((report, worst))
}

/// Relative sup-norm mismatch between the direct and the spectral
/// computation of e^{τϕ}L(e^{−τϕ}v) for the linear weight ϕ.
pub fn conjugation_consistency(
    v: &TwoSidedField,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<f64> {
    if field.kind == FieldKind::General {
        return Err(Error::Precondition(
            "spectral path needs a y-only coefficient field".into(),
        ));
    }
    let xs = v.grid.x.nodes();
    let tau = p.tau;
    let phi = |x: f64, y: f64| p.linear_phi(&[x], y);
    // direct path
    let mut damped = v.clone();
    for side in Side::BOTH {
        let ys = v.y_nodes(side);
        let vals = match side {
            Side::Plus => &mut damped.u_plus,
            Side::Minus => &mut damped.u_minus,
        };
        for (ix, col) in vals.iter_mut().enumerate() {
            for (iy, val) in col.iter_mut().enumerate() {
                *val *= (-tau * phi(xs[ix], ys[iy])).exp();
            }
        }
    }
    damped.support_x = (v.grid.x.min, v.grid.x.max);
    damped.support_y = (-v.grid.y.y_max, v.grid.y.y_max);
    let mut direct = apply_operator(&damped, field)?;
    for side in Side::BOTH {
        let ys = v.y_nodes(side);
        let vals = match side {
            Side::Plus => &mut direct.u_plus,
            Side::Minus => &mut direct.u_minus,
        };
        for (ix, col) in vals.iter_mut().enumerate() {
            for (iy, val) in col.iter_mut().enumerate() {
                *val *= (tau * phi(xs[ix], ys[iy])).exp();
            }
        }
    }

    // spectral path: DFT in x over one period, conjugated operator per
    // frequency, inverse DFT
    let n = v.grid.x.n - 1;
    let ny = v.grid.y.len();
    let len = n as f64 * v.grid.x.step();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut hat_plus = vec![vec![Complex64::new(0.0, 0.0); n]; ny];
    let mut hat_minus = vec![vec![Complex64::new(0.0, 0.0); n]; ny];
    for iy in 0..ny {
        let mut row: Vec<Complex64> = (0..n).map(|ix| v.u_plus[ix][iy]).collect();
        fwd.process(&mut row);
        hat_plus[iy] = row;
        let mut row: Vec<Complex64> = (0..n).map(|ix| v.u_minus[ix][iy]).collect();
        fwd.process(&mut row);
        hat_minus[iy] = row;
    }
    let mut out_plus = vec![vec![Complex64::new(0.0, 0.0); n]; ny];
    let mut out_minus = vec![vec![Complex64::new(0.0, 0.0); n]; ny];
    for k in 0..n {
        let k_signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let xi = 2.0 * std::f64::consts::PI * k_signed / len;
        let slice = FrequencySlice::new(
            vec![xi],
            v.grid.y.clone(),
            (0..ny).map(|iy| hat_plus[iy][k]).collect(),
            (0..ny).map(|iy| hat_minus[iy][k]).collect(),
            v.grid.y.y_max,
        );
        let pp = conjugated_p(&slice, Side::Plus, p, field)?;
        let pm = conjugated_p(&slice, Side::Minus, p, field)?;
        for iy in 0..ny {
            out_plus[iy][k] = pp[iy];
            out_minus[iy][k] = pm[iy];
        }
    }
    let scale = 1.0 / n as f64;
    let mut worst = 0.0f64;
    let mut amp = 1e-300f64;
    for iy in 0..ny {
        inv.process(&mut out_plus[iy]);
        inv.process(&mut out_minus[iy]);
        // both discretizations drop to first order on the one-sided
        // endpoint stencils, so compare where both are second order
        if iy < 2 || iy + 2 >= ny {
            continue;
        }
        for ix in 0..n {
            let sp = out_plus[iy][ix] * scale;
            let sm = out_minus[iy][ix] * scale;
            worst = worst
                .max((direct.u_plus[ix][iy] - sp).norm())
                .max((direct.u_minus[ix][iy] - sm).norm());
            amp = amp
                .max(direct.u_plus[ix][iy].norm())
                .max(direct.u_minus[ix][iy].norm());
        }
    }
    Ok(worst / amp)
}

/// Ξ(w): the left-hand functional with the paraboloid weight ψ_ε.
pub fn xi_functional(w: &TwoSidedField, p: &WeightParams) -> f64 {
    let weight = |x: f64, y: f64| p.psi_eps(&[x], y);
    lhs_terms(w, p, &weight).iter().map(|(_, v)| v).sum()
}

/// Outcome of the partition assembly inequality.
#[derive(Debug, Clone)]
pub struct AssemblyCheck {
    pub xi_total: f64,
    pub cell_sum: f64,
    pub r1: f64,
    pub mu: f64,
    pub cells_used: usize,
    /// Ξ(w) / (ΣΞ(wη_g) + R₁).
    pub c_measured: f64,
}

/// Verify Ξ(w) ≤ C (Σ_g Ξ(wη_g) + R₁) with frozen-center weights inside
/// each cell, μ = (ετ)^{1/2} grid-aligned.
pub fn partition_assembly_check(
    w: &TwoSidedField,
    p: &WeightParams,
) -> Result<AssemblyCheck> {
    if p.tau * p.epsilon < 1.0 - 1e-12 {
        return Err(Error::Precondition(format!(
            "tau = {} below 1/epsilon = {}",
            p.tau,
            1.0 / p.epsilon
        )));
    }
    w.check_support(0.5, p.r0)?;
    let hx = w.grid.x.step();
    let mu = p.derive_mu(hx);
    if mu < 4.0 {
        return Err(Error::Precondition(format!("mu = {mu} < 4")));
    }
    let family = PartitionFamily::build(mu, w.grid.x.clone())?;
    let xi_total = xi_functional(w, p);
    let xs = w.grid.x.nodes();
    let amp = w
        .u_plus
        .iter()
        .chain(&w.u_minus)
        .flatten()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut cell_sum = 0.0;
    let mut cells_used = 0;
    for &g in &family.indices {
        let xg = family.center(g);
        // skip cells whose cutoff does not meet the support
        if xg + 1.5 / mu < w.support_x.0 - 1e-12 || xg - 1.5 / mu > w.support_x.1 + 1e-12 {
            continue;
        }
        let mut cut = w.clone();
        let mut nonzero = false;
        for (ix, &x) in xs.iter().enumerate() {
            let e = family.eta(g, x);
            for val in cut.u_plus[ix].iter_mut().chain(cut.u_minus[ix].iter_mut()) {
                *val *= e;
                if val.norm() > 1e-14 * amp {
                    nonzero = true;
                }
            }
        }
        if !nonzero {
            continue;
        }
        cut.support_x = (
            w.support_x.0.max(xg - 1.5 / mu),
            w.support_x.1.min(xg + 1.5 / mu),
        );
        let weight = |x: f64, y: f64| p.psi_eps_linearized(&[x], y, &[xg]);
        cell_sum += lhs_terms(&cut, p, &weight).iter().map(|(_, v)| v).sum::<f64>();
        cells_used += 1;
    }
    // R1: weighted first-order interface energy times (eps tau)^{1/2}
    let wx = trapezoid_weights(w.grid.x.n, hx);
    let mut r1 = 0.0;
    for side in Side::BOTH {
        let (trace, gx, gy) = interface_gradients(w, side);
        for ix in 0..xs.len() {
            let e2 = (2.0 * p.tau * p.psi_eps(&xs[ix..ix + 1], 0.0)).exp();
            r1 += wx[ix]
                * e2
                * (gy[ix].norm_sqr()
                    + gx[ix].norm_sqr()
                    + p.tau * p.tau * trace[ix].norm_sqr());
        }
    }
    r1 *= (p.epsilon * p.tau).sqrt();
    let denom = cell_sum + r1;
    Ok(AssemblyCheck {
        xi_total,
        cell_sum,
        r1,
        mu,
        cells_used,
        c_measured: if denom > 0.0 { xi_total / denom } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1, HalfGrid};
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, DMatrix};

    fn identity_field() -> CoefficientField {
        CoefficientField::constant(DMatrix::identity(2, 2), DMatrix::identity(2, 2), 1.0)
    }

    fn small_grid() -> TensorGrid {
        TensorGrid::new(Grid1::symmetric(4.0, 65), HalfGrid::new(1.0, 32))
    }

    fn bump(t: f64) -> f64 {
        if t.abs() < 1.0 {
            (1.0 - t * t).powi(3)
        } else {
            0.0
        }
    }

    #[test]
    fn operator_on_constants_and_quadratics() {
        let field = identity_field();
        let grid = small_grid();
        let ones = TwoSidedField::from_fn(
            grid.clone(),
            (-4.0, 4.0),
            (-1.0, 1.0),
            |_, _| Complex64::new(1.0, 0.0),
            |_, _| Complex64::new(1.0, 0.0),
        );
        let l = apply_operator(&ones, &field).unwrap();
        for col in l.u_plus.iter().chain(&l.u_minus) {
            for v in col {
                assert!(v.norm() < 1e-10);
            }
        }
        // u+ = y^2: Laplacian = 2 on the upper half
        let quad = TwoSidedField::from_fn(
            grid,
            (-4.0, 4.0),
            (-1.0, 1.0),
            |_, y| Complex64::new(y * y, 0.0),
            |_, _| Complex64::new(0.0, 0.0),
        );
        let l = apply_operator(&quad, &field).unwrap();
        for col in &l.u_plus {
            for v in col {
                assert_relative_eq!(v.re, 2.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn operator_anisotropic_exact_on_quadratics() {
        let a = dmatrix![2.0, 0.5; 0.5, 1.5];
        let field = CoefficientField::constant(a.clone(), a, 0.4);
        let q = |x: f64, y: f64| Complex64::new(3.0 * x * x + 2.0 * x * y - y * y, 0.0);
        let u = TwoSidedField::from_fn(small_grid(), (-4.0, 4.0), (-1.0, 1.0), q, q);
        let l = apply_operator(&u, &field).unwrap();
        // trace(A Hessian): a11*6 + 2*a12*2 + a22*(-2)
        let expect = 2.0 * 6.0 + 2.0 * 0.5 * 2.0 - 1.5 * 2.0;
        for col in l.u_plus.iter().chain(&l.u_minus) {
            for v in col {
                assert_relative_eq!(v.re, expect, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn operator_self_adjoint_for_interior_supported() {
        let a = dmatrix![2.0, 0.5; 0.5, 1.5];
        let field = CoefficientField::constant(a.clone(), a, 0.4);
        let grid = small_grid();
        let mk = |cx: f64, cy: f64| {
            TwoSidedField::from_fn(
                grid.clone(),
                (-4.0, 4.0),
                (-1.0, 1.0),
                move |x, y| Complex64::new(bump((x - cx) / 1.5) * bump((y - cy) / 0.3), 0.0),
                |_, _| Complex64::new(0.0, 0.0),
            )
        };
        let u = mk(0.3, 0.5);
        let v = mk(-0.2, 0.45);
        let lu = apply_operator(&u, &field).unwrap();
        let lv = apply_operator(&v, &field).unwrap();
        let hx = grid.x.step();
        let hy = grid.y.h();
        let wx = trapezoid_weights(grid.x.n, hx);
        let wy = trapezoid_weights(grid.y.len(), hy);
        let inner = |a: &TwoSidedField, b: &TwoSidedField| -> Complex64 {
            let mut s = Complex64::new(0.0, 0.0);
            for ix in 0..grid.x.n {
                for iy in 0..grid.y.len() {
                    s += a.u_plus[ix][iy] * b.u_plus[ix][iy].conj() * wx[ix] * wy[iy];
                }
            }
            s
        };
        let asym = inner(&lu, &v) - inner(&u, &lv);
        let scale = inner(&lu, &v).norm().max(1e-300);
        assert!(asym.norm() / scale < 1e-9, "{}", asym.norm() / scale);
    }

    #[test]
    fn transmission_examples() {
        let field = identity_field();
        let grid = small_grid();
        // matched traces and fluxes
        let f = |x: f64, y: f64| Complex64::new(bump(x / 2.0) * (1.0 + y), 0.0);
        let u = TwoSidedField::from_fn(grid.clone(), (-2.0, 2.0), (-1.0, 1.0), f, f);
        let t = transmission(&u, &field).unwrap();
        for v in t.h0.values.iter().chain(&t.h1.values) {
            assert!(v.norm() < 1e-9);
        }
        // slope jump: dy u+ = 1, dy u- = 0, traces equal -> h1 = -1
        let u2 = TwoSidedField::from_fn(
            grid.clone(),
            (-4.0, 4.0),
            (-1.0, 1.0),
            |_, y| Complex64::new(y, 0.0),
            |_, _| Complex64::new(0.0, 0.0),
        );
        let t2 = transmission(&u2, &field).unwrap();
        for v in &t2.h1.values {
            assert_relative_eq!(v.re, -1.0, epsilon = 1e-10);
        }
        // trace jump h0(x) = x
        let u3 = TwoSidedField::from_fn(
            grid,
            (-4.0, 4.0),
            (-1.0, 1.0),
            |x, _| Complex64::new(x, 0.0),
            |_, _| Complex64::new(0.0, 0.0),
        );
        let t3 = transmission(&u3, &field).unwrap();
        for (x, v) in t3.h0.grid.nodes().iter().zip(&t3.h0.values) {
            assert_relative_eq!(v.re, *x, epsilon = 1e-10);
        }
    }

    #[test]
    fn sign_identity_holds() {
        let ap = dmatrix![2.0, 0.4; 0.4, 1.3];
        let am = dmatrix![1.1, -0.2; -0.2, 2.2];
        let field = CoefficientField::constant(ap, am, 0.3);
        let u = TwoSidedField::from_fn(
            small_grid(),
            (-2.0, 2.0),
            (-1.0, 1.0),
            |x, y| Complex64::new(bump(x / 2.0) * (1.0 + y + 0.5 * y * y), 0.3 * bump(x / 2.0)),
            |x, y| Complex64::new(bump(x / 2.0) * (1.0 - 2.0 * y), 0.0),
        );
        let r = sign_identity_residual(&u, &field).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    fn supported_w(grid: &TensorGrid, r0: f64) -> TwoSidedField {
        TwoSidedField::from_fn(
            grid.clone(),
            (-0.9, 0.9),
            (-r0, r0),
            move |x, y| Complex64::new(bump(x / 0.9) * bump(y / r0), 0.0),
            move |x, y| Complex64::new(0.7 * bump(x / 0.9) * bump(y / r0), 0.1 * bump(x / 0.9) * bump(y / r0)),
        )
    }

    #[test]
    fn theorem31_zero_and_homogeneity() {
        let field = identity_field();
        let mut p = WeightParams::defaults(1);
        p.tau = 16.0;
        let grid = TensorGrid::new(Grid1::symmetric(4.0, 65), HalfGrid::new(0.25, 32));
        let zero = {
            let mut z = TwoSidedField::zeros(grid.clone());
            z.support_x = (-0.5, 0.5);
            z.support_y = (-0.05, 0.05);
            z
        };
        let rep = theorem31_sides(&zero, &p, &field).unwrap();
        assert_eq!(rep.lhs_total, 0.0);
        assert_eq!(rep.rhs_total, 0.0);
        assert!(rep.ratio.is_nan());

        let w = supported_w(&grid, p.r0);
        let rep1 = theorem31_sides(&w, &p, &field).unwrap();
        let mut w2 = w.clone();
        w2.scale(Complex64::new(3.0, 0.0));
        let rep2 = theorem31_sides(&w2, &p, &field).unwrap();
        assert_relative_eq!(rep2.lhs_total, 9.0 * rep1.lhs_total, max_relative = 1e-12);
        assert_relative_eq!(rep2.rhs_total, 9.0 * rep1.rhs_total, max_relative = 1e-12);
        assert!(rep1.ratio.is_finite() && rep1.ratio > 0.0);
    }

    #[test]
    fn theorem31_rejects_bad_support() {
        let field = identity_field();
        let p = WeightParams::defaults(1);
        let grid = small_grid();
        let w = TwoSidedField::from_fn(
            grid,
            (-2.0, 2.0),
            (-1.0, 1.0),
            |x, y| Complex64::new(bump(x / 2.0) * bump(y), 0.0),
            |_, _| Complex64::new(0.0, 0.0),
        );
        assert!(theorem31_sides(&w, &p, &field).is_err());
    }

    #[test]
    fn theorem21_rescaling_consistency() {
        let a = dmatrix![1.8, 0.3; 0.3, 1.2];
        let field = CoefficientField::constant(a, DMatrix::identity(2, 2), 0.4);
        let mut p = WeightParams::defaults(1);
        p.tau = 16.0;
        p.delta = 0.1;
        let d = p.delta;
        let grid = TensorGrid::new(Grid1::symmetric(0.1, 65), HalfGrid::new(0.02, 32));
        let u = TwoSidedField::from_fn(
            grid,
            (-0.045, 0.045),
            (-d * p.r0, d * p.r0),
            move |x, y| Complex64::new(bump(x / 0.045) * bump(y / (d * 0.1)), 0.0),
            move |x, y| Complex64::new(0.5 * bump(x / 0.045) * bump(y / (d * 0.1)), 0.0),
        );
        let (rep, mismatch) = theorem21_sides(&u, &p, &field).unwrap();
        assert!(mismatch < 1e-8, "rescaling mismatch {mismatch}");
        assert!(rep.ratio.is_finite());
    }

    #[test]
    fn theorem21_matched_mode_rhs_residual_only() {
        let field = identity_field();
        let mut p = WeightParams::defaults(1);
        p.tau = 16.0;
        let d = p.delta;
        let grid = TensorGrid::new(Grid1::symmetric(0.1, 65), HalfGrid::new(0.02, 32));
        // odd-in-y profile: traces vanish and the one-sided interface
        // stencils agree exactly, so h0 = h1 = 0 to roundoff
        let f = move |x: f64, y: f64| {
            let t = y / (d * 0.1);
            Complex64::new(bump(x / 0.045) * t * bump(t), 0.0)
        };
        let u = TwoSidedField::from_fn(grid, (-0.045, 0.045), (-d * p.r0, d * p.r0), f, f);
        let (rep, _) = theorem21_sides(&u, &p, &field).unwrap();
        let residual = rep.term("residual");
        let others = rep.rhs_total - residual;
        assert!(others < 1e-9 * residual, "non-residual rhs {others}");
    }

    #[test]
    fn conjugation_zero_and_quadratic() {
        let field = identity_field();
        let mut p = WeightParams::defaults(1);
        p.tau = 0.0;
        p.s = 0.0;
        let grid = small_grid();
        let zero = TwoSidedField::zeros(grid.clone());
        assert_eq!(conjugation_consistency(&zero, &p, &field).unwrap(), 0.0);

        // tau = 0, s = 0: both paths are the plain operator; on data with
        // no x-dependence the x-discretizations agree too
        let v = TwoSidedField::from_fn(
            grid,
            (-4.0, 4.0),
            (-1.0, 1.0),
            |_, y| Complex64::new(y * y - 0.3 * y, 0.0),
            |_, y| Complex64::new(y * y + 0.1 * y, 0.0),
        );
        let r = conjugation_consistency(&v, &p, &field).unwrap();
        assert!(r < 1e-9, "tau=0 residual {r}");
    }

    #[test]
    fn conjugation_single_mode() {
        use crate::ensemble::smooth_window;
        let field = identity_field();
        let mut p = WeightParams::defaults(1);
        p.tau = 16.0;
        // The damping e^{-tau phi} varies on the scale 1/(tau phi') ~ 1/32,
        // so the y step must be well below that; polynomial windows keep
        // the finite-difference truncation constants bounded.
        let k = 2.0 * std::f64::consts::PI * 2.0 / 8.0;
        let f = move |x: f64, y: f64| {
            Complex64::new(0.0, k * x).exp()
                * smooth_window(y / 0.1)
                * smooth_window(x / 3.0)
        };
        let mut prev = f64::INFINITY;
        let mut last = f64::INFINITY;
        for m in [256usize, 512] {
            let grid = TensorGrid::new(Grid1::symmetric(4.0, 513), HalfGrid::new(0.125, m));
            let v = TwoSidedField::from_fn(grid, (-3.0, 3.0), (-0.1, 0.1), f, f);
            prev = last;
            last = conjugation_consistency(&v, &p, &field).unwrap();
        }
        assert!(last < 1e-4, "single-mode residual {last}");
        let order = (prev / last).log2();
        assert!(order > 1.9, "convergence order {order}");
    }

    #[test]
    fn assembly_check_runs() {
        let mut p = WeightParams::defaults(1);
        p.epsilon = 0.1;
        p.tau = 160.0;
        let grid = TensorGrid::new(Grid1::symmetric(4.0, 129), HalfGrid::new(0.25, 32));
        let w = TwoSidedField::from_fn(
            grid,
            (-0.45, 0.45),
            (-p.r0 * 0.9, p.r0 * 0.9),
            {
                let r0 = p.r0;
                move |x, y| Complex64::new(bump(x / 0.45) * bump(y / (0.9 * r0)), 0.0)
            },
            {
                let r0 = p.r0;
                move |x, y| Complex64::new(0.6 * bump(x / 0.45) * bump(y / (0.9 * r0)), 0.0)
            },
        );
        let chk = partition_assembly_check(&w, &p).unwrap();
        assert!(chk.mu >= 4.0);
        assert!(chk.cells_used >= 3, "cells {}", chk.cells_used);
        assert!(chk.c_measured.is_finite() && chk.c_measured > 0.0);
    }

    #[test]
    fn assembly_rejects_small_tau() {
        let mut p = WeightParams::defaults(1);
        p.epsilon = 0.1;
        p.tau = 5.0; // below 1/epsilon
        let grid = TensorGrid::new(Grid1::symmetric(4.0, 65), HalfGrid::new(0.25, 16));
        let w = TwoSidedField::zeros(grid);
        assert!(partition_assembly_check(&w, &p).is_err());
    }
}
