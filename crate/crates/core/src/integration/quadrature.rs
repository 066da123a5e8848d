//! Product quadrature on `S^{2N-1}` from the polar decomposition
//! `z_i = r_i e^{i theta_i}`.
//!
//! The measure `prod d^2 z_i delta(sum |z_i|^2 - 1)` splits into `N` phase
//! circles and `(1/2^N) du_1 ... du_{N-1}` over the simplex of squared radii
//! `u_i = r_i^2`. The simplex is mapped to the unit cube by the iterated chain
//! `u_1 = x_1`, `u_k = (1 - x_1)...(1 - x_{k-1}) x_k`, `u_N = prod (1 - x_j)`,
//! which generalizes the `x = sin^2`, `y = sin^2` substitutions of the three-mode
//! case, and each cube axis gets Gauss-Legendre nodes.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::SpherePoint;
use crate::C64;

/// Gauss-Legendre nodes and weights on `[0, 1]`, exact for degree `2m - 1`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(m, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1].
        nodes[i] = 0.5 * (1.0 - x);
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// What a grid integrates exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exactness {
    /// Largest `sum a_i` with `prod |z_i|^{2 a_i}` integrated exactly.
    pub max_radial_degree: usize,
    /// Phase sums are exact for `|frequency| <= max_phase_frequency`.
    pub max_phase_frequency: usize,
}

/// A simplex node: squared radii and its weight (Jacobian and `1/2^N` included).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialNode {
    pub u: Vec<f64>,
    pub weight: f64,
}

/// Product grid of radial simplex nodes and equispaced phases.
#[derive(Debug, Clone, Serialize)]
pub struct QuadratureGrid {
    sphere_dim: usize,
    radial_order: usize,
    phase_points: usize,
    radial: Vec<RadialNode>,
    exactness: Exactness,
}

/// Builds the polar-decomposition grid on `S^{2N-1}`.
pub fn polar_grid(n: usize, radial_order: usize, phase_points: usize) -> Result<QuadratureGrid> {
    if n < 2 {
        return Err(Error::InvalidOrder(format!("sphere needs N >= 2 complex dimensions, got {n}")));
    }
    if radial_order < 1 || phase_points < 1 {
        return Err(Error::InvalidOrder(format!(
            "radial_order = {radial_order} and phase_points = {phase_points} must be >= 1"
        )));
    }
    // The first cube axis carries degree D + N - 2, which must be <= 2m - 1.
    let max_radial_degree = (2 * radial_order + 1).checked_sub(n).ok_or_else(|| {
        Error::InvalidOrder(format!(
            "radial_order {radial_order} cannot integrate the S^{} Jacobian exactly",
            2 * n - 1
        ))
    })?;
    let (x, wx) = gauss_legendre(radial_order);
    let axes = n - 1;
    let base = 1.0 / f64::powi(2.0, n as i32);
    let count = radial_order.pow(axes as u32);
    let mut radial = Vec::with_capacity(count);
    let mut idx = vec![0usize; axes];
    for _ in 0..count {
        let mut u = Vec::with_capacity(n);
        let mut rest = 1.0;
        let mut weight = base;
        for (k, &i) in idx.iter().enumerate() {
            u.push(rest * x[i]);
            weight *= wx[i] * (1.0 - x[i]).powi((axes - 1 - k) as i32);
            rest *= 1.0 - x[i];
        }
        u.push(rest);
        radial.push(RadialNode { u, weight });
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < radial_order {
                break;
            }
            *slot = 0;
        }
    }
    Ok(QuadratureGrid {
        sphere_dim: n,
        radial_order,
        phase_points,
        radial,
        exactness: Exactness { max_radial_degree, max_phase_frequency: phase_points - 1 },
    })
}

impl QuadratureGrid {
    pub fn sphere_dim(&self) -> usize {
        self.sphere_dim
    }

    pub fn radial_order(&self) -> usize {
        self.radial_order
    }

    pub fn phase_points(&self) -> usize {
        self.phase_points
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn radial_nodes(&self) -> &[RadialNode] {
        &self.radial
    }

    /// Phase angles `2 pi t / P`.
    pub fn phases(&self) -> Vec<f64> {
        (0..self.phase_points).map(|t| 2.0 * PI * t as f64 / self.phase_points as f64).collect()
    }

    /// Weight of one phase node on one circle.
    pub fn phase_weight(&self) -> f64 {
        2.0 * PI / self.phase_points as f64
    }

    fn phase_count(&self) -> usize {
        self.phase_points.pow(self.sphere_dim as u32)
    }

    /// Number of product nodes.
    pub fn len(&self) -> usize {
        self.radial.len() * self.phase_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th product node; radial index varies slowest.
    pub fn node(&self, i: usize) -> (SpherePoint, f64) {
        let phases = self.phase_count();
        let rad = &self.radial[i / phases];
        let mut t = i % phases;
        let mut coords = vec![C64::default(); self.sphere_dim];
        for k in (0..self.sphere_dim).rev() {
            let angle = 2.0 * PI * (t % self.phase_points) as f64 / self.phase_points as f64;
            t /= self.phase_points;
            coords[k] = C64::from_polar(rad.u[k].sqrt(), angle);
        }
        let w = rad.weight * self.phase_weight().powi(self.sphere_dim as i32);
        (SpherePoint::from_unnormalized(coords).expect("simplex node is nonzero"), w)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (SpherePoint, f64)> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Sum of all product weights.
    pub fn total_weight(&self) -> f64 {
        let radial: f64 = self.radial.iter().map(|r| r.weight).sum();
        radial * (2.0 * PI).powi(self.sphere_dim as i32)
    }

    /// Quadrature of `prod |z_i|^{2 a_i}` using only the radial nodes (the phase
    /// factor integrates to `(2 pi)^N` exactly).
    pub fn radial_moment(&self, exponents: &[u32]) -> f64 {
        let sum: f64 = self
            .radial
            .iter()
            .map(|r| r.weight * r.u.iter().zip(exponents).map(|(u, &a)| u.powi(a as i32)).product::<f64>())
            .sum();
        sum * (2.0 * PI).powi(self.sphere_dim as i32)
    }

    /// Smallest grid certifying `degree` and `frequency`.
    pub fn minimal(n: usize, degree: usize, frequency: usize) -> Result<Self> {
        let radial_order = (degree + n - 1).div_ceil(2).max(1);
        polar_grid(n, radial_order, frequency + 1)
    }

    pub fn covers(&self, degree: usize, frequency: usize) -> bool {
        self.exactness.max_radial_degree >= degree && self.exactness.max_phase_frequency >= frequency
    }
}
