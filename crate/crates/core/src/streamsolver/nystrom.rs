//! Nyström discretization of the single-layer operator on a smooth closed
//! boundary, with the logarithmic part of the kernel integrated by the
//! trigonometric product rule
//!
//! ```text
//! ∫₀^{2π} ln(4 sin²((t − τ)/2)) f(τ) dτ ≈ Σ_j R_j(t) f(t_j),
//! R_j(t) = −(2π/n) Σ_{m=1}^{n−1} cos(m(t − t_j))/m − (π/n²) cos(n(t − t_j))
//! ```
//!
//! on `2n` equispaced nodes. The remaining smooth part uses the trapezoidal
//! rule, so the scheme converges spectrally for analytic boundaries.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::geometry::{boundary_nodes, BoundaryNodes, CrossSection};

use super::kernel::{ring_kernel, ring_kernel_gradient, split_kernel, Target};
use super::SolverError;

/// Log-quadrature weights `R_k = R_j(t_j + 2πk/N)` for `k = 0..N`.
pub(crate) fn log_weights(count: usize) -> Vec<f64> {
    let n = count / 2;
    (0..count).map(|k| log_weight(n, 2.0 * PI * k as f64 / count as f64)).collect()
}

fn log_weight(n: usize, tau: f64) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|m| (m as f64 * tau).cos() / m as f64).sum();
    -2.0 * PI / nf * sum - PI / (nf * nf) * (nf * tau).cos()
}

/// Assembled single-layer operator and the exterior normal derivative of
/// its potential on a smooth cross-section.
#[derive(Debug, Clone)]
pub struct SingleLayer {
    shape: CrossSection,
    nodes: BoundaryNodes,
    curvature: Vec<f64>,
    /// `(Sσ)_i = ψ(x_i)`
    single: DMatrix<f64>,
    /// `(Mσ)_i = ∂_n ψ(x_i)` on the exterior side
    normal: DMatrix<f64>,
}

impl SingleLayer {
    pub fn new(shape: &CrossSection) -> Result<SingleLayer, SolverError> {
        if shape.is_polygon() {
            return Err(SolverError::PolygonNotSupported);
        }
        let nodes = boundary_nodes(shape);
        let count = nodes.len();
        let curvature = nodes.pointwise_curvature().expect("smooth shape").to_vec();
        let weights = log_weights(count);
        let smooth_weight = 2.0 * PI / count as f64;

        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let target = Target {
                    t: nodes.param[i],
                    x: nodes.points[i],
                    normal: nodes.normals[i],
                    speed: nodes.speed[i],
                    curvature: curvature[i],
                };
                let mut s_row = vec![0.0; count];
                let mut m_row = vec![0.0; count];
                for j in 0..count {
                    let split = split_kernel(&target, nodes.param[j], nodes.points[j]);
                    let r_w = weights[(i + count - j) % count];
                    s_row[j] = (r_w * split.g1 + smooth_weight * split.g2) * nodes.speed[j];
                    m_row[j] = (r_w * split.d1 + smooth_weight * split.d2) * nodes.speed[j];
                }
                m_row[i] -= 0.5 * nodes.points[i][0];
                (s_row, m_row)
            })
            .collect();

        let single = DMatrix::from_fn(count, count, |i, j| rows[i].0[j]);
        let normal = DMatrix::from_fn(count, count, |i, j| rows[i].1[j]);
        Ok(SingleLayer {
            shape: shape.clone(),
            nodes,
            curvature,
            single,
            normal,
        })
    }

    pub fn shape(&self) -> &CrossSection {
        &self.shape
    }

    pub fn nodes(&self) -> &BoundaryNodes {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn single_matrix(&self) -> &DMatrix<f64> {
        &self.single
    }

    pub fn normal_matrix(&self) -> &DMatrix<f64> {
        &self.normal
    }

    /// `ψ` at the nodes.
    pub fn trace(&self, density: &[f64]) -> Vec<f64> {
        (&self.single * DVector::from_column_slice(density)).as_slice().to_vec()
    }

    /// Exterior `∂_n ψ` at the nodes, from the jump relation.
    pub fn normal_derivative(&self, density: &[f64]) -> Vec<f64> {
        (&self.normal * DVector::from_column_slice(density)).as_slice().to_vec()
    }

    /// `ψ` at the boundary point with parameter `t`, which need not be a
    /// node.
    pub fn trace_at(&self, density: &[f64], t: f64) -> f64 {
        let p = self.shape.point(t);
        let target = Target {
            t,
            x: [p.r, p.z],
            normal: p.normal(),
            speed: p.speed(),
            curvature: p.curvature(),
        };
        let count = self.len();
        let n = count / 2;
        let smooth_weight = 2.0 * PI / count as f64;
        (0..count)
            .map(|j| {
                let split = split_kernel(&target, self.nodes.param[j], self.nodes.points[j]);
                let r_w = log_weight(n, t - self.nodes.param[j]);
                (r_w * split.g1 + smooth_weight * split.g2) * self.nodes.speed[j] * density[j]
            })
            .sum()
    }

    /// `ψ` off the boundary by the trapezoidal rule. Accurate only at a
    /// distance of several node spacings from `∂E`; on the axis it is zero.
    pub fn potential(&self, density: &[f64], at: [f64; 2]) -> Result<f64, SolverError> {
        if at[0] == 0.0 {
            return Ok(0.0);
        }
        self.nodes
            .points
            .iter()
            .zip(&self.nodes.weights)
            .zip(density)
            .map(|((&x, w), s)| Ok(ring_kernel(x, at)? * w * s))
            .sum()
    }

    /// `∇ψ` off the boundary by the trapezoidal rule.
    pub fn potential_gradient(&self, density: &[f64], at: [f64; 2]) -> Result<[f64; 2], SolverError> {
        let mut grad = [0.0; 2];
        for ((&x, w), s) in self.nodes.points.iter().zip(&self.nodes.weights).zip(density) {
            let g = ring_kernel_gradient(x, at)?;
            grad[0] += g[0] * w * s;
            grad[1] += g[1] * w * s;
        }
        Ok(grad)
    }

    /// Density whose potential equals `data` at the nodes.
    pub fn solve(&self, data: &[f64]) -> Result<Vec<f64>, SolverError> {
        let lu = self.single.clone().lu();
        let x = lu
            .solve(&DVector::from_column_slice(data))
            .ok_or(SolverError::Singular)?;
        Ok(x.as_slice().to_vec())
    }
}
