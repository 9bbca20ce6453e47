//! Scaled partition of unity on the interface: lattice cutoffs
//! ϑ_{g,μ}(x) = ϑ₀(μ(x − x_g)) with x_g = g/μ, the normalized family
//! η_{g,μ} = ϑ_{g,μ} / Σϑ, and the quantitative checks on localized
//! H^{1/2} seminorms that the global assembly relies on.
//!
//! The mother profile ϑ₀ is 1 on |t| ≤ 1, 0 on |t| ≥ 3/2, and a quintic
//! smoothstep in between, so it has two continuous derivatives and the
//! measured derivative constants are reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1;
use crate::seminorms::{gagliardo_sq, h12_fourier, InterfaceTrace, Region};
use crate::weights::WeightParams;

/// Mother cutoff ϑ₀.
pub fn theta0(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 1.5 {
        0.0
    } else {
        let u = 2.0 * (a - 1.0);
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// dϑ₀/dt.
pub fn theta0_prime(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 || a >= 1.5 {
        0.0
    } else {
        let u = 2.0 * (a - 1.0);
        let ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
        -2.0 * ds * t.signum()
    }
}

/// d²ϑ₀/dt².
pub fn theta0_second(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 || a >= 1.5 {
        0.0
    } else {
        let u = 2.0 * (a - 1.0);
        let dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
        -4.0 * dds
    }
}

/// One-dimensional lattice partition family on a working box.
#[derive(Debug, Clone)]
pub struct PartitionFamily {
    pub mu: f64,
    pub box_grid: Grid1,
    /// Lattice indices g whose cutoff support meets the box.
    pub indices: Vec<i64>,
}

/// Measured derivative-bound constants.
#[derive(Debug, Clone, Copy)]
pub struct PartitionConstants {
    /// max_k sup |D^k ϑ₀| (k = 1, 2, scaled by the k-th power of 1).
    pub c1: f64,
    /// sup over the box of |ϑ̄'|/μ and |ϑ̄''|/μ².
    pub c2: f64,
    /// max_k sup |D^k η_{g,μ}| / μ^k over k = 0, 1, 2 and all g.
    pub c3: f64,
    /// largest number of cutoffs meeting any single point.
    pub overlap: usize,
}

impl PartitionFamily {
    pub fn build(mu: f64, box_grid: Grid1) -> Result<Self> {
        if mu < 4.0 {
            return Err(Error::Precondition(format!("mu = {mu} < 4")));
        }
        let g_min = ((box_grid.min - 1.5 / mu) * mu).ceil() as i64;
        let g_max = ((box_grid.max + 1.5 / mu) * mu).floor() as i64;
        Ok(PartitionFamily {
            mu,
            box_grid,
            indices: (g_min..=g_max).collect(),
        })
    }

    pub fn center(&self, g: i64) -> f64 {
        g as f64 / self.mu
    }

    pub fn theta(&self, g: i64, x: f64) -> f64 {
        theta0(self.mu * (x - self.center(g)))
    }

    /// ϑ̄_μ(x) = Σ_g ϑ_{g,μ}(x) over the whole lattice (the sum is local).
    pub fn theta_bar(&self, x: f64) -> f64 {
        self.nearby(x).map(|g| self.theta(g, x)).sum()
    }

    fn nearby(&self, x: f64) -> impl Iterator<Item = i64> {
        let g0 = (x * self.mu).round() as i64;
        (g0 - 2)..=(g0 + 2)
    }

    fn theta_bar_derivs(&self, x: f64) -> (f64, f64, f64) {
        let mut s = 0.0;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for g in self.nearby(x) {
            let t = self.mu * (x - self.center(g));
            s += theta0(t);
            s1 += self.mu * theta0_prime(t);
            s2 += self.mu * self.mu * theta0_second(t);
        }
        (s, s1, s2)
    }

    pub fn eta(&self, g: i64, x: f64) -> f64 {
        let bar = self.theta_bar(x);
        if bar == 0.0 {
            0.0
        } else {
            self.theta(g, x) / bar
        }
    }

    /// (η, η', η'') at x, by the quotient rule on analytic ϑ derivatives.
    pub fn eta_derivs(&self, g: i64, x: f64) -> (f64, f64, f64) {
        let (bar, bar1, bar2) = self.theta_bar_derivs(x);
        if bar == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let t = self.mu * (x - self.center(g));
        let th = theta0(t);
        let th1 = self.mu * theta0_prime(t);
        let th2 = self.mu * self.mu * theta0_second(t);
        let e = th / bar;
        let e1 = (th1 * bar - th * bar1) / (bar * bar);
        let e2 = (th2 * bar * bar - 2.0 * th1 * bar1 * bar - th * bar2 * bar
            + 2.0 * th * bar1 * bar1)
            / (bar * bar * bar);
        (e, e1, e2)
    }

    /// Σ_g η_{g,μ}(x); equals 1 wherever ϑ̄ > 0.
    pub fn eta_sum(&self, x: f64) -> f64 {
        let bar = self.theta_bar(x);
        if bar == 0.0 {
            0.0
        } else {
            self.nearby(x).map(|g| self.theta(g, x)).sum::<f64>() / bar
        }
    }

    /// x lies in the box interior where the lattice is complete on both sides.
    pub fn is_interior(&self, x: f64) -> bool {
        x - self.box_grid.min >= 1.5 / self.mu && self.box_grid.max - x >= 1.5 / self.mu
    }

    /// Measure the derivative-bound constants by dense sampling.
    pub fn measure_constants(&self) -> PartitionConstants {
        let samples = 4001;
        let dense = Grid1::new(self.box_grid.min, self.box_grid.max, samples);
        let mut c1 = 0.0f64;
        let mut c2 = 0.0f64;
        let mut c3 = 0.0f64;
        let mut overlap = 0usize;
        for &x in &dense.nodes() {
            if !self.is_interior(x) {
                continue;
            }
            let (bar, bar1, bar2) = self.theta_bar_derivs(x);
            c2 = c2.max((bar1 / self.mu).abs()).max((bar2 / (self.mu * self.mu)).abs());
            let mut count = 0usize;
            for g in self.nearby(x) {
                let t = self.mu * (x - self.center(g));
                if theta0(t) > 0.0 {
                    count += 1;
                }
                c1 = c1.max(theta0_prime(t).abs()).max(theta0_second(t).abs());
                let (e, e1, e2) = self.eta_derivs(g, x);
                c3 = c3
                    .max(e.abs())
                    .max((e1 / self.mu).abs())
                    .max((e2 / (self.mu * self.mu)).abs());
            }
            overlap = overlap.max(count);
            debug_assert!(bar >= 1.0 - 1e-12);
        }
        PartitionConstants { c1, c2, c3, overlap }
    }

    fn cell_region(&self, g: i64) -> Region {
        Region::Cube {
            center: self.center(g),
            r: 2.0 / self.mu,
        }
    }

    fn support_ok(&self, f: &InterfaceTrace, g: i64) -> bool {
        let (a, b) = f.declared_support;
        let c = self.center(g);
        a >= c - 1.5 / self.mu - 1e-12 && b <= c + 1.5 / self.mu + 1e-12
    }
}

fn full_seminorm_sq(f: &InterfaceTrace) -> f64 {
    h12_fourier(f).seminorm_sq
}

/// Superposition bound: [Σς_g]² ≤ C (Σ[ς_g]²_{Q_{2/μ}(x_g)} + μ Σ∫|ς_g|²).
/// Returns the smallest C making the inequality hold.
pub fn prop41_check(family: &PartitionFamily, pieces: &[(i64, InterfaceTrace)]) -> Result<f64> {
    if pieces.is_empty() {
        return Ok(0.0);
    }
    let grid = pieces[0].1.grid.clone();
    let mut sum = vec![Complex64::new(0.0, 0.0); grid.n];
    let mut rhs = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (g, f) in pieces {
        if !family.support_ok(f, *g) {
            return Err(Error::Precondition(format!(
                "piece at g = {g} leaves Q_{{3/(2mu)}}(x_g)"
            )));
        }
        for (s, v) in sum.iter_mut().zip(&f.values) {
            *s += v;
        }
        rhs += gagliardo_sq(f, family.cell_region(*g)) + family.mu * f.l2_sq();
        let (a, b) = f.declared_support;
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let total = InterfaceTrace::new(grid, sum, (lo, hi));
    let lhs = full_seminorm_sq(&total);
    Ok(if rhs == 0.0 { 0.0 } else { lhs / rhs })
}

/// Multiplier bound: [aF]² ≤ C (E_a²[F]² + K_a² μ⁻¹ ∫|F|²) on Q_{2/μ}(x_g).
pub fn prop42_check(
    family: &PartitionFamily,
    g: i64,
    f: &InterfaceTrace,
    a: &dyn Fn(f64) -> f64,
    e_a: f64,
    k_a: f64,
) -> Result<f64> {
    if !family.support_ok(f, g) {
        return Err(Error::Precondition("F leaves Q_{3/(2mu)}(x_g)".into()));
    }
    let af = InterfaceTrace::new(
        f.grid.clone(),
        f.grid
            .nodes()
            .iter()
            .zip(&f.values)
            .map(|(&x, v)| v * a(x))
            .collect(),
        f.declared_support,
    );
    let region = family.cell_region(g);
    let lhs = gagliardo_sq(&af, region);
    let rhs = e_a * e_a * gagliardo_sq(f, region) + k_a * k_a / family.mu * f.l2_sq();
    Ok(if rhs == 0.0 { 0.0 } else { lhs / rhs })
}

/// Localization sum: Σ_g [f η_g]²_{Q_{2/μ}(x_g)} ≤ C ([f]² + μ∫|f|²).
pub fn prop43_check(family: &PartitionFamily, f: &InterfaceTrace) -> f64 {
    let mut lhs = 0.0;
    for &g in &family.indices {
        let prod = multiply_by(family, g, f, false);
        lhs += gagliardo_sq(&prod, family.cell_region(g));
    }
    let rhs = full_seminorm_sq(f) + family.mu * f.l2_sq();
    if rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Gradient-cutoff sum: Σ_g [f η'_g]²_{Q_{2/μ}(x_g)} ≤ C (μ²[f]² + μ³∫|f|²).
pub fn prop44_check(family: &PartitionFamily, f: &InterfaceTrace) -> f64 {
    let mu = family.mu;
    let mut lhs = 0.0;
    for &g in &family.indices {
        let prod = multiply_by(family, g, f, true);
        lhs += gagliardo_sq(&prod, family.cell_region(g));
    }
    let rhs = mu * mu * full_seminorm_sq(f) + mu * mu * mu * f.l2_sq();
    if rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

fn multiply_by(family: &PartitionFamily, g: i64, f: &InterfaceTrace, gradient: bool) -> InterfaceTrace {
    let vals = f
        .grid
        .nodes()
        .iter()
        .zip(&f.values)
        .map(|(&x, v)| {
            let (e, e1, _) = family.eta_derivs(g, x);
            v * if gradient { e1 } else { e }
        })
        .collect();
    let c = family.center(g);
    InterfaceTrace::new(f.grid.clone(), vals, (c - 1.5 / family.mu, c + 1.5 / family.mu))
}

/// Weighted-localization check: [f e^{τψ_ε}]² vs [f e^{τψ_{ε,g}}]² + μ ∫
/// e^{2τψ_ε}|f|² for f supported in Q_{3/(2μ)}(x_g), both ways.
pub fn lemma42_check(
    family: &PartitionFamily,
    g: i64,
    f: &InterfaceTrace,
    p: &WeightParams,
) -> Result<f64> {
    if !family.support_ok(f, g) {
        return Err(Error::Precondition("f leaves Q_{3/(2mu)}(x_g)".into()));
    }
    let xg = family.center(g);
    let weighted = |lin: bool| -> InterfaceTrace {
        let vals = f
            .grid
            .nodes()
            .iter()
            .zip(&f.values)
            .map(|(&x, v)| {
                let psi = if lin {
                    p.psi_eps_linearized(&[x], 0.0, &[xg])
                } else {
                    p.psi_eps(&[x], 0.0)
                };
                v * (p.tau * psi).exp()
            })
            .collect();
        InterfaceTrace::new(f.grid.clone(), vals, f.declared_support)
    };
    let exact = weighted(false);
    let frozen = weighted(true);
    let l2w: f64 = f
        .grid
        .nodes()
        .iter()
        .zip(&f.values)
        .map(|(&x, v)| (v * (p.tau * p.psi_eps(&[x], 0.0)).exp()).norm_sqr() * f.grid.step())
        .sum();
    let se = full_seminorm_sq(&exact);
    let sf = full_seminorm_sq(&frozen);
    let c_fwd = if sf + family.mu * l2w == 0.0 {
        0.0
    } else {
        se / (sf + family.mu * l2w)
    };
    let c_bwd = if se + family.mu * l2w == 0.0 {
        0.0
    } else {
        sf / (se + family.mu * l2w)
    };
    Ok(c_fwd.max(c_bwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> Grid1 {
        Grid1::symmetric(4.0, 513)
    }

    #[test]
    fn profile_shape() {
        assert_eq!(theta0(0.0), 1.0);
        assert_eq!(theta0(1.0), 1.0);
        assert_eq!(theta0(1.5), 0.0);
        assert_eq!(theta0(-2.0), 0.0);
        assert_relative_eq!(theta0(1.25), 0.5, max_relative = 1e-12);
        // C^2 matching at band ends
        for t in [1.0, 1.5] {
            assert!(theta0_prime(t).abs() < 1e-12);
            assert!(theta0_second(t).abs() < 1e-12);
        }
        // finite-difference agreement in the band
        let h = 1e-6;
        for t in [1.1, 1.3, -1.2, -1.45] {
            let fd1 = (theta0(t + h) - theta0(t - h)) / (2.0 * h);
            assert_relative_eq!(theta0_prime(t), fd1, max_relative = 1e-6, epsilon = 1e-6);
            let fd2 = (theta0(t + h) - 2.0 * theta0(t) + theta0(t - h)) / (h * h);
            assert_relative_eq!(theta0_second(t), fd2, max_relative = 1e-3, epsilon = 1e-3);
        }
    }

    #[test]
    fn build_rejects_small_mu() {
        assert!(PartitionFamily::build(2.0, grid()).is_err());
    }

    #[test]
    fn unity_interior_all_mu() {
        for mu in [4.0, 8.0, 16.0, 32.0] {
            let fam = PartitionFamily::build(mu, grid()).unwrap();
            for &x in &Grid1::symmetric(3.0, 257).nodes() {
                assert!((fam.eta_sum(x) - 1.0).abs() < 1e-12, "mu = {mu}, x = {x}");
            }
        }
    }

    #[test]
    fn eta_at_center() {
        let fam = PartitionFamily::build(4.0, grid()).unwrap();
        let bar = fam.theta_bar(0.0);
        assert_relative_eq!(fam.eta(0, 0.0), 1.0 / bar, max_relative = 1e-14);
    }

    #[test]
    fn overlap_cardinality() {
        let fam = PartitionFamily::build(8.0, grid()).unwrap();
        let c = fam.measure_constants();
        assert_eq!(c.overlap, 3);
    }

    #[test]
    fn constants_mu_independent() {
        let mut vals: Vec<PartitionConstants> = Vec::new();
        for mu in [4.0, 8.0, 16.0, 32.0] {
            vals.push(PartitionFamily::build(mu, grid()).unwrap().measure_constants());
        }
        for pair in vals.windows(2) {
            assert_relative_eq!(pair[0].c1, pair[1].c1, max_relative = 0.05);
            assert_relative_eq!(pair[0].c2, pair[1].c2, max_relative = 0.05);
            assert_relative_eq!(pair[0].c3, pair[1].c3, max_relative = 0.05);
        }
    }

    fn bump_at(c: f64, w: f64, g: &Grid1) -> Vec<Complex64> {
        g.nodes()
            .iter()
            .map(|&x| {
                let t = (x - c) / w;
                Complex64::new(if t.abs() < 1.0 { (1.0 - t * t).powi(3) } else { 0.0 }, 0.0)
            })
            .collect()
    }

    #[test]
    fn prop41_zero_and_single() {
        let fam = PartitionFamily::build(4.0, grid()).unwrap();
        assert_eq!(prop41_check(&fam, &[]).unwrap(), 0.0);
        let g = grid();
        let f = InterfaceTrace::new(g.clone(), bump_at(0.0, 0.3, &g), (-0.3, 0.3));
        let c = prop41_check(&fam, &[(0, f)]).unwrap();
        assert!(c.is_finite() && c > 0.0 && c < 50.0, "C = {c}");
    }

    #[test]
    fn prop41_rejects_bad_support() {
        let fam = PartitionFamily::build(8.0, grid()).unwrap();
        let g = grid();
        let f = InterfaceTrace::new(g.clone(), bump_at(0.0, 0.5, &g), (-0.5, 0.5));
        assert!(prop41_check(&fam, &[(0, f)]).is_err());
    }

    #[test]
    fn prop42_constant_multiplier() {
        let fam = PartitionFamily::build(4.0, grid()).unwrap();
        let g = grid();
        let f = InterfaceTrace::new(g.clone(), bump_at(0.0, 0.3, &g), (-0.3, 0.3));
        let c = prop42_check(&fam, 0, &f, &|_| 3.0, 3.0, 0.0).unwrap();
        assert!(c <= 1.0 + 1e-12, "C = {c}");
        let zero = InterfaceTrace::new(g.clone(), vec![Complex64::new(0.0, 0.0); g.n], (-0.1, 0.1));
        assert_eq!(prop42_check(&fam, 0, &zero, &|x| x, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn prop43_prop44_gaussian() {
        let g = grid();
        let vals: Vec<Complex64> = g
            .nodes()
            .iter()
            .map(|&x| Complex64::new(if x.abs() < 2.0 { (-2.0 * x * x).exp() - (-8.0f64).exp() } else { 0.0 }, 0.0))
            .collect();
        let f = InterfaceTrace::new(g, vals, (-2.0, 2.0));
        let c4 = PartitionFamily::build(4.0, grid()).unwrap();
        let c8 = PartitionFamily::build(8.0, grid()).unwrap();
        let c43a = prop43_check(&c4, &f);
        let c43b = prop43_check(&c8, &f);
        assert!(c43a.is_finite() && c43a > 0.0 && c43b < 4.0 * c43a, "{c43a} {c43b}");
        let c44a = prop44_check(&c4, &f);
        let c44b = prop44_check(&c8, &f);
        assert!(c44a.is_finite() && c44a > 0.0 && c44b < 4.0 * c44a, "{c44a} {c44b}");
    }

    #[test]
    fn lemma42_finite() {
        let fam = PartitionFamily::build(4.0, grid()).unwrap();
        let g = grid();
        let f = InterfaceTrace::new(g.clone(), bump_at(0.25, 0.1, &g), (0.15, 0.35));
        let p = WeightParams::defaults(1);
        let c = lemma42_check(&fam, 1, &f, &p).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }
}
