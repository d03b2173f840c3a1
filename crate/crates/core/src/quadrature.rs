//! Product quadrature over the angle torus `[0, 2π]^4`.
//!
//! The first three angles enter every integrand through integer Fourier modes,
//! so they use the uniform periodic rule, which is exact for frequencies below
//! the point count. The fourth angle also enters through `cos(φ3/4)` and
//! `sin(φ3/4)`, which are not periodic on `[0, 2π]`; that axis uses a
//! Gauss–Legendre rule with twice as many nodes.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    points_per_axis: usize,
    periodic_nodes: Vec<f64>,
    legendre_nodes: Vec<f64>,
    legendre_weights: Vec<f64>,
}

impl QuadratureGrid {
    pub const DEFAULT_POINTS: usize = 16;

    pub fn new(points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::argument(format!(
                "quadrature needs at least 2 points per axis, got {points_per_axis}"
            )));
        }
        let step = TAU / points_per_axis as f64;
        let periodic_nodes = (0..points_per_axis).map(|j| j as f64 * step).collect();
        let (x, w) = gauss_legendre(2 * points_per_axis);
        // [-1, 1] → [0, 2π]
        let legendre_nodes = x.iter().map(|x| PI * (x + 1.0)).collect();
        let legendre_weights = w.iter().map(|w| PI * w).collect();
        Ok(Self {
            points_per_axis,
            periodic_nodes,
            legendre_nodes,
            legendre_weights,
        })
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Node count along each axis.
    pub fn shape(&self) -> [usize; 4] {
        let p = self.points_per_axis;
        [p, p, p, self.legendre_nodes.len()]
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn axis_nodes(&self, axis: usize) -> &[f64] {
        if axis < 3 {
            &self.periodic_nodes
        } else {
            &self.legendre_nodes
        }
    }

    pub fn axis_weight(&self, axis: usize, j: usize) -> f64 {
        if axis < 3 {
            TAU / self.points_per_axis as f64
        } else {
            self.legendre_weights[j]
        }
    }

    /// Splits a flat node index (last axis fastest) into per-axis indices.
    pub fn unravel(&self, flat: usize) -> [usize; 4] {
        let [_, s1, s2, s3] = self.shape();
        [flat / (s1 * s2 * s3), flat / (s2 * s3) % s1, flat / s3 % s2, flat % s3]
    }

    pub fn node(&self, idx: [usize; 4]) -> [f64; 4] {
        [
            self.periodic_nodes[idx[0]],
            self.periodic_nodes[idx[1]],
            self.periodic_nodes[idx[2]],
            self.legendre_nodes[idx[3]],
        ]
    }

    pub fn weight(&self, idx: [usize; 4]) -> f64 {
        let h = TAU / self.points_per_axis as f64;
        h * h * h * self.legendre_weights[idx[3]]
    }

    /// Σ weight · f(node), summed in a fixed order.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
        F: Fn([f64; 4]) -> T,
    {
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                f(self.node(idx)) * self.weight(idx)
            })
            .sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((approx - exact).abs() < 1e-13, "n={n}");
            let even = (deg - 1) as i32;
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(even)).sum();
            assert!((approx - 2.0 / (even as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn grid_weights_sum_to_torus_volume() {
        let g = QuadratureGrid::new(4).unwrap();
        assert_eq!(g.shape(), [4, 4, 4, 8]);
        let vol: f64 = g.integrate(|_| 1.0);
        assert!((vol - TAU.powi(4)).abs() < 1e-9);
        assert!(QuadratureGrid::new(1).is_err());
    }

    #[test]
    fn unravel_matches_layout() {
        let g = QuadratureGrid::new(3).unwrap();
        assert_eq!(g.unravel(0), [0, 0, 0, 0]);
        assert_eq!(g.unravel(1), [0, 0, 0, 1]);
        assert_eq!(g.unravel(6), [0, 0, 1, 0]);
        assert_eq!(g.unravel(g.len() - 1), [2, 2, 2, 5]);
    }
}
