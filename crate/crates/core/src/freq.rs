//! Fourier-side machinery: the conjugated operator P±, its first-order
//! factors E± and F±, the interface quantities η₀, η₁, V±, the
//! per-frequency two-sided inequality, and the symbol-bound audit.
//!
//! All y-derivatives are 3-point second-order stencils (one-sided at the
//! interface and at the outer ends); all L² norms are trapezoid sums over
//! the half-lines, so the two halves add up exactly.

use num_complex::Complex64;

use crate::coeffs::{branch_sqrt, CoefficientField, Regime, Side, SymbolBounds};
use crate::error::{Error, Result};
use crate::grid::{deriv1, deriv2, trapezoid_weights, HalfGrid};
use crate::weights::WeightParams;

/// One tangential frequency ξ with complex profiles on both closed
/// half-lines; both profiles own the y = 0 node.
#[derive(Debug, Clone)]
pub struct FrequencySlice {
    pub xi: Vec<f64>,
    pub y: HalfGrid,
    /// Values on 0 = y₀ < y₁ < … < y_m (index 0 is the interface).
    pub v_plus: Vec<Complex64>,
    /// Values on −Y = y₀ < … < y_m = 0 (last index is the interface).
    pub v_minus: Vec<Complex64>,
    pub support_radius: f64,
}

impl FrequencySlice {
    pub fn new(
        xi: Vec<f64>,
        y: HalfGrid,
        v_plus: Vec<Complex64>,
        v_minus: Vec<Complex64>,
        support_radius: f64,
    ) -> Self {
        assert_eq!(v_plus.len(), y.len());
        assert_eq!(v_minus.len(), y.len());
        FrequencySlice {
            xi,
            y,
            v_plus,
            v_minus,
            support_radius,
        }
    }

    pub fn xi_norm(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Λ = (|ξ|² + τ²)^{1/2}.
    pub fn lambda(&self, tau: f64) -> f64 {
        (self.xi_norm().powi(2) + tau * tau).sqrt()
    }

    /// Largest |v| outside [−ρ, ρ], relative to the overall amplitude.
    pub fn support_violation(&self) -> f64 {
        let amp = self
            .v_plus
            .iter()
            .chain(&self.v_minus)
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut worst = 0.0f64;
        for (y, v) in self
            .y
            .nodes_plus()
            .iter()
            .zip(&self.v_plus)
            .chain(self.y.nodes_minus().iter().zip(&self.v_minus))
        {
            if y.abs() > self.support_radius + 1e-12 {
                worst = worst.max(v.norm());
            }
        }
        worst / amp
    }

    pub fn check_support(&self) -> Result<()> {
        let v = self.support_violation();
        if v > 1e-12 {
            return Err(Error::Precondition(format!(
                "slice leaves [-rho, rho], relative excess {v:.3e}"
            )));
        }
        Ok(())
    }

    fn values(&self, side: Side) -> &[Complex64] {
        match side {
            Side::Plus => &self.v_plus,
            Side::Minus => &self.v_minus,
        }
    }

    fn y_nodes(&self, side: Side) -> Vec<f64> {
        match side {
            Side::Plus => self.y.nodes_plus(),
            Side::Minus => self.y.nodes_minus(),
        }
    }
}

fn origin(dim: usize) -> Vec<f64> {
    vec![0.0; dim - 1]
}

/// t̃(y) = t(ξ, y) + iτs t(γ, y) evaluated along the half-line.
fn drift_tilde(
    slice: &FrequencySlice,
    side: Side,
    p: &WeightParams,
    field: &CoefficientField,
    ys: &[f64],
) -> Result<Vec<Complex64>> {
    let x0 = origin(field.dim);
    ys.iter()
        .map(|&y| {
            let tr = field.tangential_drift(side, &x0, y, &slice.xi)?;
            let tg = field.tangential_drift(side, &x0, y, &p.gamma)?;
            Ok(Complex64::new(tr, p.tau * p.s * tg))
        })
        .collect()
}

/// First-order conjugated derivative Q₁v = ∂yv + it̃v − τφ′v.
fn q1(
    vals: &[Complex64],
    ys: &[f64],
    h: f64,
    tilde: &[Complex64],
    p: &WeightParams,
    plus_side: bool,
) -> Vec<Complex64> {
    let dv = deriv1(vals, h);
    vals.iter()
        .enumerate()
        .map(|(i, &v)| {
            dv[i] + v * (Complex64::i() * tilde[i] - p.tau * p.phi_prime(ys[i], plus_side))
        })
        .collect()
}

/// The conjugated second-order operator P± of the factorized form:
/// P v = Q₁(a_nn Q₁ v) − a_nn ζ v.
pub fn conjugated_p(
    slice: &FrequencySlice,
    side: Side,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<Vec<Complex64>> {
    let ys = slice.y_nodes(side);
    let h = slice.y.h();
    let x0 = origin(field.dim);
    let plus = side == Side::Plus;
    let tilde = drift_tilde(slice, side, p, field, &ys)?;
    let ann: Vec<f64> = ys
        .iter()
        .map(|&y| {
            let a = field.matrix(side, &x0, y)?;
            Ok(a[(a.nrows() - 1, a.ncols() - 1)])
        })
        .collect::<Result<_>>()?;
    let inner = q1(slice.values(side), &ys, h, &tilde, p, plus);
    let weighted: Vec<Complex64> = inner.iter().zip(&ann).map(|(q, &a)| q * a).collect();
    let outer = q1(&weighted, &ys, h, &tilde, p, plus);
    let mut out = Vec::with_capacity(ys.len());
    for (i, &y) in ys.iter().enumerate() {
        let zeta = field.zeta(side, &x0, y, &slice.xi, p.s, p.tau, &p.gamma)?;
        out.push(outer[i] - slice.values(side)[i] * zeta * ann[i]);
    }
    Ok(out)
}

fn factor_apply(
    vals: &[Complex64],
    slice: &FrequencySlice,
    side: Side,
    p: &WeightParams,
    field: &CoefficientField,
    root_sign: f64,
) -> Result<Vec<Complex64>> {
    let ys = slice.y_nodes(side);
    let h = slice.y.h();
    let x0 = origin(field.dim);
    let plus = side == Side::Plus;
    let tilde = drift_tilde(slice, side, p, field, &ys)?;
    let dv = deriv1(vals, h);
    let mut out = Vec::with_capacity(ys.len());
    for (i, &y) in ys.iter().enumerate() {
        let zeta = field.zeta(side, &x0, y, &slice.xi, p.s, p.tau, &p.gamma)?;
        let root = branch_sqrt(zeta)?;
        let mult = Complex64::i() * tilde[i]
            - (p.tau * p.phi_prime(y, plus) + root_sign * root);
        out.push(dv[i] + vals[i] * mult);
    }
    Ok(out)
}

/// E± v = ∂yv + it̃v − (τφ′ + √ζ)v, applied to the slice's own profile.
pub fn factor_e(
    slice: &FrequencySlice,
    side: Side,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<Vec<Complex64>> {
    factor_apply(slice.values(side), slice, side, p, field, 1.0)
}

/// F± v = ∂yv + it̃v − (τφ′ − √ζ)v.
pub fn factor_f(
    slice: &FrequencySlice,
    side: Side,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<Vec<Complex64>> {
    factor_apply(slice.values(side), slice, side, p, field, -1.0)
}

/// Sup-norm residual of the exact factorization identity on the given
/// side (plus: P = E a F − v ∂y(a√ζ); minus: P = F a E + v ∂y(a√ζ)),
/// relative to the sup of Pv.
pub fn factorization_residual(
    slice: &FrequencySlice,
    side: Side,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<f64> {
    let ys = slice.y_nodes(side);
    let x0 = origin(field.dim);
    let vals = slice.values(side);
    let pv = conjugated_p(slice, side, p, field)?;
    let inner_sign = if side == Side::Plus { -1.0 } else { 1.0 };
    // first factor applied to v, then a_nn, then the outer factor
    let first = factor_apply(vals, slice, side, p, field, inner_sign)?;
    let weighted: Vec<Complex64> = ys
        .iter()
        .zip(&first)
        .map(|(&y, f)| {
            let a = field.matrix(side, &x0, y)?;
            Ok(f * a[(a.nrows() - 1, a.ncols() - 1)])
        })
        .collect::<Result<_>>()?;
    let outer = factor_apply(&weighted, slice, side, p, field, -inner_sign)?;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (i, &y) in ys.iter().enumerate() {
        let dg = field.d_ann_sqrt_zeta(side, &x0, y, &slice.xi, p.s, p.tau, &p.gamma)?;
        let rhs = outer[i] + inner_sign * vals[i] * dg;
        worst = worst.max((pv[i] - rhs).norm());
        scale = scale.max(pv[i].norm());
    }
    Ok(worst / scale.max(1e-300))
}

/// Interface traces and transmission quantities of a slice.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceData {
    pub v_plus_0: Complex64,
    pub v_minus_0: Complex64,
    pub dv_plus_0: Complex64,
    pub dv_minus_0: Complex64,
    pub v_big_plus: Complex64,
    pub v_big_minus: Complex64,
    pub eta0: Complex64,
    pub eta1: Complex64,
}

pub fn interface_data(
    slice: &FrequencySlice,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<InterfaceData> {
    let h = slice.y.h();
    let x0 = origin(field.dim);
    // second-order one-sided traces of ∂y at the interface
    let vp = &slice.v_plus;
    let vm = &slice.v_minus;
    let m = vm.len() - 1;
    let dv_plus_0 = (-vp[2] + vp[1] * 4.0 - vp[0] * 3.0) / (2.0 * h);
    let dv_minus_0 = (vm[m] * 3.0 - vm[m - 1] * 4.0 + vm[m - 2]) / (2.0 * h);
    let mut big = [Complex64::new(0.0, 0.0); 2];
    for (k, side) in Side::BOTH.into_iter().enumerate() {
        let a = field.matrix(side, &x0, 0.0)?;
        let ann = a[(a.nrows() - 1, a.ncols() - 1)];
        let alpha = if side == Side::Plus {
            p.alpha_plus
        } else {
            p.alpha_minus
        };
        let tr = field.tangential_drift(side, &x0, 0.0, &slice.xi)?;
        let tg = field.tangential_drift(side, &x0, 0.0, &p.gamma)?;
        let tilde = Complex64::new(tr, p.tau * p.s * tg);
        let (v0, dv0) = if side == Side::Plus {
            (vp[0], dv_plus_0)
        } else {
            (vm[m], dv_minus_0)
        };
        big[k] = (dv0 - v0 * (p.tau * alpha) + Complex64::i() * tilde * v0) * ann;
    }
    Ok(InterfaceData {
        v_plus_0: vp[0],
        v_minus_0: vm[m],
        dv_plus_0,
        dv_minus_0,
        v_big_plus: big[0],
        v_big_minus: big[1],
        eta0: vp[0] - vm[m],
        eta1: big[0] - big[1],
    })
}

/// Fully itemized sides of the per-frequency inequality.
#[derive(Debug, Clone, Copy, Default)]
pub struct Prop31Breakdown {
    pub d2_term: f64,
    pub d1_term: f64,
    pub d0_term: f64,
    pub v_big_term: f64,
    pub trace_term: f64,
    pub p_term: f64,
    pub eta1_term: f64,
    pub eta0_term: f64,
}

/// Evaluate LHS and core RHS of the two-sided per-frequency estimate.
pub fn prop31_sides(
    slice: &FrequencySlice,
    p: &WeightParams,
    field: &CoefficientField,
) -> Result<(f64, f64, Prop31Breakdown)> {
    slice.check_support()?;
    if p.tau < p.tau0 {
        return Err(Error::Precondition(format!(
            "tau = {} below tau0 = {}",
            p.tau, p.tau0
        )));
    }
    let h = slice.y.h();
    let w = trapezoid_weights(slice.y.len(), h);
    let lam = slice.lambda(p.tau);
    let mut bd = Prop31Breakdown::default();
    for side in Side::BOTH {
        let vals = slice.values(side);
        let d1 = deriv1(vals, h);
        let d2 = deriv2(vals, h);
        for i in 0..vals.len() {
            bd.d2_term += w[i] * d2[i].norm_sqr() / p.tau;
            bd.d1_term += w[i] * d1[i].norm_sqr() * lam * lam / p.tau;
            bd.d0_term += w[i] * vals[i].norm_sqr() * lam.powi(4) / p.tau;
        }
        let pv = conjugated_p(slice, side, p, field)?;
        for i in 0..vals.len() {
            bd.p_term += w[i] * pv[i].norm_sqr();
        }
    }
    let id = interface_data(slice, p, field)?;
    bd.v_big_term = lam * (id.v_big_plus.norm_sqr() + id.v_big_minus.norm_sqr());
    bd.trace_term = lam.powi(3) * (id.v_plus_0.norm_sqr() + id.v_minus_0.norm_sqr());
    bd.eta1_term = lam * id.eta1.norm_sqr();
    bd.eta0_term = lam.powi(3) * id.eta0.norm_sqr();
    let lhs = bd.d2_term + bd.d1_term + bd.d0_term + bd.v_big_term + bd.trace_term;
    let rhs = bd.p_term + bd.eta1_term + bd.eta0_term;
    Ok((lhs, rhs, bd))
}

/// One audited sample point.
#[derive(Debug, Clone)]
pub struct AuditPoint {
    pub xi: Vec<f64>,
    pub y: f64,
    pub tau: f64,
    pub regime: Regime,
}

/// A failed bound, with the point, the bound label, and the signed slack
/// (negative = violated amount).
#[derive(Debug, Clone)]
pub struct Violation {
    pub point: AuditPoint,
    pub bound: &'static str,
    pub slack: f64,
}

/// Audit every regime-conditional symbol bound at the sampled points.
/// Measured constants get a 2% headroom since they themselves come from
/// finite sampling.
pub fn symbol_bound_audit(
    points: &[AuditPoint],
    p: &WeightParams,
    field: &CoefficientField,
    bounds: &SymbolBounds,
) -> Result<Vec<Violation>> {
    let x0 = origin(field.dim);
    let slack_factor = 1.02;
    let mut out = Vec::new();
    let mut push = |pt: &AuditPoint, bound: &'static str, lhs: f64, rhs: f64| {
        // requires lhs <= rhs (with headroom on the measured rhs)
        let slack = rhs * slack_factor + 1e-12 - lhs;
        if slack < 0.0 {
            out.push(Violation {
                point: pt.clone(),
                bound,
                slack,
            });
        }
    };
    let fd = 1e-5;
    for pt in points {
        let xin = pt.xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let st = p.s * pt.tau;
        for side in Side::BOTH {
            let b = field.reduced_matrix(side, &x0, pt.y)?;
            let bq = {
                let xi = nalgebra::DVector::from_column_slice(&pt.xi);
                (&b * &xi).dot(&xi)
            };
            push(pt, "3.34-lower", bounds.lambda1 * xin * xin, bq * slack_factor);
            push(pt, "3.34-upper", bq, xin * xin / bounds.lambda1);
            let bq_prime = {
                let xi = nalgebra::DVector::from_column_slice(&pt.xi);
                let bp = field.reduced_matrix(side, &x0, pt.y + fd)?;
                let bm = field.reduced_matrix(side, &x0, pt.y - fd)?;
                ((&bp * &xi).dot(&xi) - (&bm * &xi).dot(&xi)) / (2.0 * fd)
            };
            push(pt, "3.35", bq_prime.abs(), bounds.m1 * xin * xin);
            let m = field.principal_root(side, &x0, pt.y, &pt.xi)?;
            push(pt, "3.36-lower", bounds.lambda2 * xin, m * slack_factor);
            push(pt, "3.36-upper", m, xin / bounds.lambda2);
            let m_prime = (field.principal_root(side, &x0, pt.y + fd, &pt.xi)?
                - field.principal_root(side, &x0, pt.y - fd, &pt.xi)?)
                / (2.0 * fd);
            push(pt, "3.37", m_prime.abs(), bounds.m2 * xin);
            let t = field.tangential_drift(side, &x0, pt.y, &pt.xi)?;
            push(pt, "3.38", t.abs(), bounds.lambda3_inv * xin);
            let t_prime = (field.tangential_drift(side, &x0, pt.y + fd, &pt.xi)?
                - field.tangential_drift(side, &x0, pt.y - fd, &pt.xi)?)
                / (2.0 * fd);
            push(pt, "3.39", t_prime.abs(), bounds.m3 * xin);
            let zeta = field.zeta(side, &x0, pt.y, &pt.xi, p.s, pt.tau, &p.gamma)?;
            let budget = xin * xin + st * st;
            push(
                pt,
                "3.40",
                zeta.norm(),
                budget / (field.lambda0 * bounds.lambda1),
            );
            let zeta_prime = (field.zeta(side, &x0, pt.y + fd, &pt.xi, p.s, pt.tau, &p.gamma)?
                - field.zeta(side, &x0, pt.y - fd, &pt.xi, p.s, pt.tau, &p.gamma)?)
                / (2.0 * fd);
            push(pt, "3.41", zeta_prime.norm(), bounds.m4 * budget);
            match pt.regime {
                Regime::Case1 => {}
                Regime::Case2 => {
                    push(
                        pt,
                        "3.85",
                        0.75 * bounds.lambda2.powi(2) * xin * xin,
                        zeta.re * slack_factor,
                    );
                    let r = branch_sqrt(zeta)?.re;
                    push(pt, "3.99", r, m);
                }
                Regime::Case3 => {
                    let lam2 = bounds.lambda2;
                    push(
                        pt,
                        "3.119-rezeta",
                        0.25 * lam2 * lam2 * xin * xin,
                        zeta.re * slack_factor,
                    );
                    let root = branch_sqrt(zeta)?;
                    push(pt, "3.119-r", 0.5 * lam2 * xin, root.re * slack_factor);
                    push(pt, "3.119-j", root.im.abs(), 4.0 * st / lam2.powi(3));
                    let m6 = bounds.m4
                        * (1.0
                            + 4.0 * p.s0 * p.s0 / (lam2 * lam2)
                                / (p.alpha_plus + bounds.l_ratio * p.alpha_minus).powi(2));
                    push(pt, "3.119-dzeta", zeta_prime.norm(), m6 * xin * xin);
                    let root_prime =
                        (branch_sqrt(field.zeta(side, &x0, pt.y + fd, &pt.xi, p.s, pt.tau, &p.gamma)?)?
                            - branch_sqrt(field.zeta(
                                side,
                                &x0,
                                pt.y - fd,
                                &pt.xi,
                                p.s,
                                pt.tau,
                                &p.gamma,
                            )?)?)
                            / (2.0 * fd);
                    push(pt, "3.119-droot", root_prime.norm(), m6 / lam2 * xin);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::SampleGrid;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn identity_field() -> CoefficientField {
        CoefficientField::constant(DMatrix::identity(2, 2), DMatrix::identity(2, 2), 1.0)
    }

    fn gaussian_slice(m: usize, xi: f64) -> FrequencySlice {
        let y = HalfGrid::new(1.0, m);
        let vp = y
            .nodes_plus()
            .iter()
            .map(|&t| Complex64::new((-t * t).exp(), 0.0))
            .collect();
        let vm = y
            .nodes_minus()
            .iter()
            .map(|&t| Complex64::new((-t * t).exp(), 0.0))
            .collect();
        FrequencySlice::new(vec![xi], y, vp, vm, 1.0)
    }

    fn params_for_example() -> WeightParams {
        let mut p = WeightParams::defaults(1);
        p.alpha_plus = 2.0;
        p.alpha_minus = 1.0;
        p.beta = 1.0;
        p.s = 0.0;
        p.tau = 1.0;
        p
    }

    #[test]
    fn conjugated_p_gaussian_at_interface() {
        // identity coefficients, tau = 1, alpha+ = 2, beta = 1, xi = 1:
        // all terms cancel at y = 0 for v = exp(-y^2)
        let field = identity_field();
        let p = params_for_example();
        let slice = gaussian_slice(2048, 1.0);
        let pv = conjugated_p(&slice, Side::Plus, &p, &field).unwrap();
        assert!(pv[0].norm() < 1e-4, "P v(0) = {}", pv[0]);
    }

    #[test]
    fn conjugated_p_zero_and_linearity() {
        let field = identity_field();
        let p = params_for_example();
        let mut z = gaussian_slice(64, 1.0);
        z.v_plus.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let pv = conjugated_p(&z, Side::Plus, &p, &field).unwrap();
        assert!(pv.iter().all(|c| c.norm() == 0.0));

        let s1 = gaussian_slice(64, 1.0);
        let mut s2 = gaussian_slice(64, 1.0);
        for (i, v) in s2.v_plus.iter_mut().enumerate() {
            *v = Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos());
        }
        let (a, b) = (Complex64::new(1.3, -0.4), Complex64::new(-0.2, 2.1));
        let mut combo = s1.clone();
        for i in 0..combo.v_plus.len() {
            combo.v_plus[i] = a * s1.v_plus[i] + b * s2.v_plus[i];
        }
        let p1 = conjugated_p(&s1, Side::Plus, &p, &field).unwrap();
        let p2 = conjugated_p(&s2, Side::Plus, &p, &field).unwrap();
        let pc = conjugated_p(&combo, Side::Plus, &p, &field).unwrap();
        for i in 0..p1.len() {
            assert!((pc[i] - (a * p1[i] + b * p2[i])).norm() < 1e-9);
        }
    }

    #[test]
    fn e_minus_f_is_twice_root() {
        let field = identity_field();
        let p = params_for_example();
        let slice = gaussian_slice(128, 3.0);
        let e = factor_e(&slice, Side::Plus, &p, &field).unwrap();
        let f = factor_f(&slice, Side::Plus, &p, &field).unwrap();
        for (i, v) in slice.v_plus.iter().enumerate() {
            let diff = e[i] - f[i];
            let expect = -v * 2.0 * 3.0; // -2 sqrt(zeta) v = -2 |xi| v
            assert!((diff - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn factor_on_plateau() {
        // piecewise-constant plateau in the middle of the plus half-line
        let field = identity_field();
        let p = params_for_example();
        let y = HalfGrid::new(1.0, 128);
        let c = Complex64::new(0.7, -0.2);
        let vp: Vec<Complex64> = y
            .nodes_plus()
            .iter()
            .map(|&t| if (0.3..0.6).contains(&t) { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        let vm = vec![Complex64::new(0.0, 0.0); y.len()];
        let slice = FrequencySlice::new(vec![2.0], y.clone(), vp, vm, 1.0);
        let e = factor_e(&slice, Side::Plus, &p, &field).unwrap();
        // interior of the plateau: derivative term vanishes
        let nodes = y.nodes_plus();
        let i = nodes.iter().position(|&t| t > 0.4).unwrap();
        let expect = -c * (p.tau * p.phi_prime(nodes[i], true) + 2.0);
        assert!((e[i] - expect).norm() < 1e-12);
    }

    #[test]
    fn factorization_exact_for_constant_field() {
        let field = identity_field();
        let p = params_for_example();
        let slice = gaussian_slice(128, 1.5);
        for side in Side::BOTH {
            let r = factorization_residual(&slice, side, &p, &field).unwrap();
            assert!(r < 1e-12, "{side}: {r}");
        }
    }

    #[test]
    fn factorization_second_order_for_lipschitz_field() {
        let field = CoefficientField::y_only(
            2,
            |y: f64| {
                let mut m = DMatrix::identity(2, 2);
                m[(1, 1)] = 1.0 + 0.3 * (1.0 + y * y).sqrt();
                m[(0, 0)] = 2.0 - 0.2 * y.tanh();
                m
            },
            |y: f64| {
                let mut m = DMatrix::identity(2, 2);
                m[(1, 1)] = 1.5 + 0.1 * y.sin();
                m
            },
            0.4,
            1.0,
        );
        let p = params_for_example();
        let mut resid = Vec::new();
        for m in [128usize, 256, 512] {
            let slice = gaussian_slice(m, 1.5);
            resid.push(factorization_residual(&slice, Side::Plus, &p, &field).unwrap());
        }
        let order1 = (resid[0] / resid[1]).log2();
        let order2 = (resid[1] / resid[2]).log2();
        assert!(order1 > 1.9 && order2 > 1.9, "orders {order1}, {order2}");
        assert!(resid[2] < 1e-5, "final residual {}", resid[2]);
    }

    #[test]
    fn interface_data_examples() {
        let field = identity_field();
        let p = params_for_example();
        let y = HalfGrid::new(1.0, 64);
        let h = y.h();
        // equal quadratic traces on both sides: eta0 = eta1 = 0
        let vp: Vec<Complex64> = y
            .nodes_plus()
            .iter()
            .map(|&t| Complex64::new(1.0 + t + t * t, 0.0))
            .collect();
        let vm: Vec<Complex64> = y
            .nodes_minus()
            .iter()
            .map(|&t| Complex64::new(1.0 + t + t * t, 0.0))
            .collect();
        let slice = FrequencySlice::new(vec![0.0], y.clone(), vp, vm, 1.0);
        let mut p0 = p.clone();
        p0.alpha_minus = p0.alpha_plus; // identical weight slopes across y=0
        let id = interface_data(&slice, &p0, &field).unwrap();
        assert!(id.eta0.norm() < 1e-14);
        assert!(id.eta1.norm() < 1e-10, "eta1 = {}", id.eta1);

        // jump trace: v+(0) = 1, v-(0) = 0
        let m = y.len() - 1;
        let mut vp2 = vec![Complex64::new(0.0, 0.0); y.len()];
        vp2[0] = Complex64::new(1.0, 0.0);
        let slice2 = FrequencySlice::new(
            vec![0.0],
            y.clone(),
            vp2,
            vec![Complex64::new(0.0, 0.0); y.len()],
            1.0,
        );
        let id2 = interface_data(&slice2, &p, &field).unwrap();
        assert_relative_eq!(id2.eta0.re, 1.0, epsilon = 1e-14);

        // slope jump: dv+(0) = 1, all traces zero, tau terms drop out
        let vp3: Vec<Complex64> = y
            .nodes_plus()
            .iter()
            .map(|&t| Complex64::new(t, 0.0))
            .collect();
        let slice3 = FrequencySlice::new(
            vec![0.0],
            y,
            vp3,
            vec![Complex64::new(0.0, 0.0); m + 1],
            1.0,
        );
        let id3 = interface_data(&slice3, &p, &field).unwrap();
        assert_relative_eq!(id3.v_big_plus.re, 1.0, epsilon = 1e-10);
        assert!(id3.v_big_minus.norm() < 1e-14);
        assert_relative_eq!(id3.eta1.re, 1.0, epsilon = 1e-10);
        let _ = h;
    }

    #[test]
    fn prop31_zero_and_scaling() {
        let field = identity_field();
        let mut p = WeightParams::defaults(1);
        p.tau = 20.0;
        let y = HalfGrid::new(2.0 * p.rho(), 64);
        let zero = FrequencySlice::new(
            vec![1.0],
            y,
            vec![Complex64::new(0.0, 0.0); 65],
            vec![Complex64::new(0.0, 0.0); 65],
            p.rho(),
        );
        let (l, r, _) = prop31_sides(&zero, &p, &field).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(r, 0.0);

        let bump = |t: f64, rho: f64| {
            let u = t / rho;
            if u.abs() < 1.0 {
                (1.0 - u * u).powi(3)
            } else {
                0.0
            }
        };
        let y2 = HalfGrid::new(2.0 * p.rho(), 64);
        let vp: Vec<Complex64> = y2
            .nodes_plus()
            .iter()
            .map(|&t| Complex64::new(bump(t, p.rho()), 0.1 * bump(t, p.rho())))
            .collect();
        let vm: Vec<Complex64> = y2
            .nodes_minus()
            .iter()
            .map(|&t| Complex64::new(0.5 * bump(t, p.rho()), 0.0))
            .collect();
        let s = FrequencySlice::new(vec![1.0], y2, vp, vm, p.rho());
        let (l1, r1, _) = prop31_sides(&s, &p, &field).unwrap();
        let mut s2 = s.clone();
        let c = Complex64::new(0.0, 2.0);
        s2.v_plus.iter_mut().for_each(|v| *v *= c);
        s2.v_minus.iter_mut().for_each(|v| *v *= c);
        let (l2, r2, _) = prop31_sides(&s2, &p, &field).unwrap();
        assert_relative_eq!(l2, 4.0 * l1, max_relative = 1e-12);
        assert_relative_eq!(r2, 4.0 * r1, max_relative = 1e-12);
    }

    #[test]
    fn prop31_rejects_bad_support() {
        let field = identity_field();
        let mut p = WeightParams::defaults(1);
        p.tau = 20.0;
        let y = HalfGrid::new(1.0, 64);
        let s = FrequencySlice::new(
            vec![1.0],
            y,
            vec![Complex64::new(1.0, 0.0); 65],
            vec![Complex64::new(0.0, 0.0); 65],
            p.rho(),
        );
        assert!(prop31_sides(&s, &p, &field).is_err());
    }

    #[test]
    fn audit_identity_clean() {
        let field = identity_field();
        let p = WeightParams::defaults(1);
        let bounds = field
            .spectral_bounds(&SampleGrid::default_2d(1.0, 1.0, 9))
            .unwrap();
        let pts: Vec<AuditPoint> = [
            (1.0, 2.0, Regime::Case2),
            (1.0, 200.0, Regime::Case1),
            (10.0, 0.5, Regime::Case3),
        ]
        .iter()
        .map(|&(xi, tau, regime)| AuditPoint {
            xi: vec![xi],
            y: 0.1,
            tau,
            regime,
        })
        .collect();
        let v = symbol_bound_audit(&pts, &p, &field, &bounds).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn audit_case2_example() {
        // identity coefficients at xi = 1: Re zeta = 1 >= 3/4, R = m exactly
        let field = identity_field();
        let p = WeightParams::defaults(1);
        let zeta = field
            .zeta(Side::Plus, &[0.0], 0.0, &[1.0], 0.0, 2.0, &[1.0])
            .unwrap();
        assert_relative_eq!(zeta.re, 1.0, epsilon = 1e-14);
        let r = branch_sqrt(zeta).unwrap().re;
        let m = field.principal_root(Side::Plus, &[0.0], 0.0, &[1.0]).unwrap();
        assert_relative_eq!(r, m, epsilon = 1e-14);
    }
}
