//! Uniform grids: tangential lines, half-line pairs in the normal variable,
//! and the tensor grid used by the two-sided field checks.

/// Uniform 1-D grid with `n` nodes on `[min, max]` (endpoints included).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1 {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid1 {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        assert!(n >= 2 && max > min, "degenerate grid");
        Grid1 { min, max, n }
    }

    /// Symmetric grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Self {
        Self::new(-half_width, half_width, n)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + self.step() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// Pair of half-line grids in y sharing the interface node y = 0.
///
/// Each half carries `m + 1` nodes with spacing `h = y_max / m`; the
/// interface node belongs to both halves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfGrid {
    pub y_max: f64,
    pub m: usize,
}

impl HalfGrid {
    pub fn new(y_max: f64, m: usize) -> Self {
        assert!(m >= 2 && y_max > 0.0, "degenerate half grid");
        HalfGrid { y_max, m }
    }

    pub fn h(&self) -> f64 {
        self.y_max / self.m as f64
    }

    /// Nodes of the upper half, ascending from 0 to y_max.
    pub fn nodes_plus(&self) -> Vec<f64> {
        (0..=self.m).map(|i| self.h() * i as f64).collect()
    }

    /// Nodes of the lower half, ascending from -y_max to 0.
    pub fn nodes_minus(&self) -> Vec<f64> {
        (0..=self.m).map(|i| -self.y_max + self.h() * i as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }
}

/// Tensor grid for two-sided fields: tangential grid times a half-line pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    pub x: Grid1,
    pub y: HalfGrid,
}

impl TensorGrid {
    pub fn new(x: Grid1, y: HalfGrid) -> Self {
        TensorGrid { x, y }
    }
}

/// Second-order first derivative on a uniform grid: centered in the
/// interior, one-sided three-point stencils at both ends.
pub fn deriv1<T>(vals: &[T], h: f64) -> Vec<T>
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let n = vals.len();
    assert!(n >= 3, "need at least 3 nodes for second-order stencils");
    let mut out = Vec::with_capacity(n);
    out.push((vals[1] * 4.0 - vals[2] - vals[0] * 3.0) * (0.5 / h));
    for i in 1..n - 1 {
        out.push((vals[i + 1] - vals[i - 1]) * (0.5 / h));
    }
    out.push((vals[n - 1] * 3.0 - vals[n - 2] * 4.0 + vals[n - 3]) * (0.5 / h));
    out
}

/// Second-order second derivative: centered in the interior, one-sided
/// four-point stencils at both ends.
pub fn deriv2<T>(vals: &[T], h: f64) -> Vec<T>
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let n = vals.len();
    assert!(n >= 4, "need at least 4 nodes for second-order stencils");
    let h2 = h * h;
    let mut out = Vec::with_capacity(n);
    out.push((vals[0] * 2.0 - vals[1] * 5.0 + vals[2] * 4.0 - vals[3]) * (1.0 / h2));
    for i in 1..n - 1 {
        out.push((vals[i + 1] - vals[i] * 2.0 + vals[i - 1]) * (1.0 / h2));
    }
    out.push(
        (vals[n - 1] * 2.0 - vals[n - 2] * 5.0 + vals[n - 3] * 4.0 - vals[n - 4]) * (1.0 / h2),
    );
    out
}

/// Trapezoid quadrature weights: h at interior nodes, h/2 at endpoints.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deriv1_exact_on_quadratics() {
        let g = Grid1::new(0.0, 1.0, 11);
        let vals: Vec<f64> = g.nodes().iter().map(|&x| 3.0 * x * x - x + 2.0).collect();
        let d = deriv1(&vals, g.step());
        for (i, &x) in g.nodes().iter().enumerate() {
            assert!((d[i] - (6.0 * x - 1.0)).abs() < 1e-12, "node {i}");
        }
    }

    #[test]
    fn deriv2_exact_on_cubics() {
        let g = Grid1::new(-1.0, 1.0, 9);
        let vals: Vec<f64> = g.nodes().iter().map(|&x| x * x * x + x * x).collect();
        let d = deriv2(&vals, g.step());
        for (i, &x) in g.nodes().iter().enumerate() {
            assert!((d[i] - (6.0 * x + 2.0)).abs() < 1e-10, "node {i}");
        }
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let g = Grid1::new(0.0, 2.0, 21);
        let w = trapezoid_weights(g.n, g.step());
        let s: f64 = g
            .nodes()
            .iter()
            .zip(&w)
            .map(|(&x, &wi)| (2.0 * x + 1.0) * wi)
            .sum();
        assert!((s - 6.0).abs() < 1e-12);
    }
}
