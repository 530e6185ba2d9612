use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::geometry::{CrossSection, MAX_RESOLUTION};

use super::nystrom::SingleLayer;
use super::{BoundarySolution, SolverError, CIRCULATION_TOLERANCE, MAX_CONDITION, SOLVER_TOLERANCE};

/// Largest node count the self-refining solve will try.
pub const MAX_SOLVER_RESOLUTION: usize = 2048;

/// Factorized bordered system
///
/// ```text
/// [ S   −1 ] [σ]   [W r²/2]
/// [ cᵀ   0 ] [γ] = [  1   ]
/// ```
///
/// where `cᵀσ = −∮ (1/r) ∂_n ψ ds`. The data is affine in `W`, so two basis
/// solutions give every `W` at the cost of a vector combination.
pub struct DirichletSolver {
    layer: SingleLayer,
    basis_const: Vec<f64>,
    basis_w: Vec<f64>,
    condition: f64,
}

impl std::fmt::Debug for DirichletSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirichletSolver")
            .field("resolution", &self.layer.len())
            .field("condition", &self.condition)
            .finish()
    }
}

impl DirichletSolver {
    pub fn new(shape: &CrossSection) -> Result<DirichletSolver, SolverError> {
        let layer = SingleLayer::new(shape)?;
        let count = layer.len();
        let nodes = layer.nodes();
        let normal = layer.normal_matrix();

        let mut system = DMatrix::zeros(count + 1, count + 1);
        system.view_mut((0, 0), (count, count)).copy_from(layer.single_matrix());
        for i in 0..count {
            system[(i, count)] = -1.0;
        }
        for j in 0..count {
            let mut c = 0.0;
            for i in 0..count {
                c -= nodes.weights[i] / nodes.points[i][0] * normal[(i, j)];
            }
            system[(count, j)] = c;
        }

        let norm1 = one_norm(&system);
        let lu = system.lu();
        let condition = norm1 * inverse_one_norm(&lu, count + 1);
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(SolverError::IllConditioned { condition });
        }

        let mut rhs_const = DVector::zeros(count + 1);
        rhs_const[count] = 1.0;
        let mut rhs_w = DVector::zeros(count + 1);
        for i in 0..count {
            let r = nodes.points[i][0];
            rhs_w[i] = 0.5 * r * r;
        }
        let basis_const = lu.solve(&rhs_const).ok_or(SolverError::Singular)?;
        let basis_w = lu.solve(&rhs_w).ok_or(SolverError::Singular)?;
        Ok(DirichletSolver {
            layer,
            basis_const: basis_const.as_slice().to_vec(),
            basis_w: basis_w.as_slice().to_vec(),
            condition,
        })
    }

    pub fn layer(&self) -> &SingleLayer {
        &self.layer
    }

    /// 1-norm condition estimate of the bordered system.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// `γ` as an affine function of `W`: `(γ(0), dγ/dW)`.
    pub fn gamma_coefficients(&self) -> (f64, f64) {
        let n = self.layer.len();
        (self.basis_const[n], self.basis_w[n])
    }

    pub fn solution(&self, w: f64) -> Result<BoundarySolution, SolverError> {
        if !w.is_finite() {
            return Err(SolverError::InvalidInput(format!("W must be finite, got {w}")));
        }
        let n = self.layer.len();
        let x: Vec<f64> = self
            .basis_const
            .iter()
            .zip(&self.basis_w)
            .map(|(a, b)| a + w * b)
            .collect();
        let density = x[..n].to_vec();
        let gamma = x[n];
        let psi_trace = self.layer.trace(&density);
        let dn_psi = self.layer.normal_derivative(&density);
        let nodes = self.layer.nodes();
        let circulation = -dn_psi
            .iter()
            .zip(&nodes.points)
            .zip(&nodes.weights)
            .map(|((d, p), wt)| d / p[0] * wt)
            .sum::<f64>();
        let collocation_residual = psi_trace
            .iter()
            .zip(&nodes.points)
            .map(|(psi, p)| (psi - (0.5 * w * p[0] * p[0] + gamma)).abs())
            .fold(0.0, f64::max);
        if (circulation - 1.0).abs() > CIRCULATION_TOLERANCE {
            return Err(SolverError::CirculationMismatch { circulation });
        }
        Ok(BoundarySolution {
            resolution: n,
            density,
            psi_trace,
            dn_psi,
            w,
            gamma,
            circulation,
            collocation_residual,
            condition_estimate: self.condition,
            refinement_estimate: None,
        })
    }

    /// Largest Dirichlet defect at the midpoints between nodes, where the
    /// equation was not enforced.
    pub fn offgrid_residual(&self, sol: &BoundarySolution) -> f64 {
        let nodes = self.layer.nodes();
        let h = nodes.param[1] - nodes.param[0];
        nodes
            .param
            .iter()
            .map(|&t| {
                let t = t + 0.5 * h;
                let r = self.layer.shape().point(t).r;
                (self.layer.trace_at(&sol.density, t) - (0.5 * sol.w * r * r + sol.gamma)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves the exterior problem with data `W r²/2 + γ` on `∂E` and unit
/// circulation, doubling the resolution until `γ` agrees with the half
/// resolution solve to [`SOLVER_TOLERANCE`].
///
/// Coordinates are taken as given; callers normalize the shape first.
pub fn solve_dirichlet(shape: &CrossSection, w: f64) -> Result<BoundarySolution, SolverError> {
    if !w.is_finite() {
        return Err(SolverError::InvalidInput(format!("W must be finite, got {w}")));
    }
    let mut resolution = shape.resolution();
    let mut coarse = DirichletSolver::new(&shape.with_resolution(resolution / 2)?)?.solution(w)?;
    loop {
        let fine = DirichletSolver::new(&shape.with_resolution(resolution)?)?.solution(w)?;
        let change = (fine.gamma - coarse.gamma).abs();
        if change <= SOLVER_TOLERANCE * fine.gamma.abs().max(1.0) {
            return Ok(BoundarySolution {
                refinement_estimate: Some(change),
                ..fine
            });
        }
        if 2 * resolution > MAX_SOLVER_RESOLUTION.min(MAX_RESOLUTION) {
            return Err(SolverError::NotConverged { resolution, change });
        }
        coarse = fine;
        resolution *= 2;
    }
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager's estimate of `‖A⁻¹‖₁` from an LU factorization `PA = LU`.
fn inverse_one_norm(lu: &LU<f64, Dyn, Dyn>, n: usize) -> f64 {
    let l = lu.l();
    let u = lu.u();
    let solve = |b: &DVector<f64>| lu.solve(b);
    // Aᵀ = Uᵀ Lᵀ P
    let solve_transpose = |b: &DVector<f64>| -> Option<DVector<f64>> {
        let y = u.tr_solve_upper_triangular(b)?;
        let mut x = l.tr_solve_lower_triangular(&y)?;
        lu.p().inv_permute_rows(&mut x);
        Some(x)
    };

    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut estimate = 0.0;
    for _ in 0..5 {
        let Some(y) = solve(&x) else {
            return f64::INFINITY;
        };
        estimate = y.iter().map(|v| v.abs()).sum::<f64>();
        let sign = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let Some(z) = solve_transpose(&sign) else {
            return f64::INFINITY;
        };
        let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |acc, (i, v)| {
            if v.abs() > acc.1 {
                (i, v.abs())
            } else {
                acc
            }
        });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(n);
        x[j] = 1.0;
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transposed_solve_and_condition_estimate() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 2.0, 0.5, 3.0, 1.0, 2.0, -1.0, 5.0]);
        let inv = a.clone().try_inverse().unwrap();
        let exact = one_norm(&inv);
        let est = inverse_one_norm(&a.clone().lu(), 3);
        assert!(est <= exact * (1.0 + 1e-12) && est >= 0.3 * exact, "{est} {exact}");

        let lu = a.clone().lu();
        let b = DVector::from_row_slice(&[1.0, -2.0, 0.5]);
        let y = lu.u().tr_solve_upper_triangular(&b).unwrap();
        let mut x = lu.l().tr_solve_lower_triangular(&y).unwrap();
        lu.p().inv_permute_rows(&mut x);
        assert!((a.transpose() * x - b).norm() < 1e-13);
    }

    #[test]
    fn circulation_and_dirichlet_data() {
        let shape = CrossSection::disk(2.0, 2f64.sqrt()).unwrap().with_resolution(128).unwrap();
        let solver = DirichletSolver::new(&shape).unwrap();
        for &w in &[0.0, 0.3, -1.0] {
            let sol = solver.solution(w).unwrap();
            assert!((sol.circulation - 1.0).abs() < 1e-12);
            assert!(sol.collocation_residual < 1e-12);
        }
        let (g0, g1) = solver.gamma_coefficients();
        let sol = solver.solution(0.7).unwrap();
        assert!((sol.gamma - (g0 + 0.7 * g1)).abs() < 1e-14);
        assert!(solver.condition_estimate() > 1.0 && solver.condition_estimate() < 1e6);
    }

    #[test]
    fn zero_speed_disk_is_even() {
        let shape = CrossSection::disk(2.5, 1.0).unwrap().with_resolution(128).unwrap();
        let sol = DirichletSolver::new(&shape).unwrap().solution(0.0).unwrap();
        let n = sol.resolution;
        for j in 1..n / 2 {
            assert!((sol.dn_psi[j] - sol.dn_psi[n - j]).abs() < 1e-10);
            assert!((sol.density[j] - sol.density[n - j]).abs() < 1e-10);
        }
    }

    #[test]
    fn refinement_reports_change() {
        let shape = CrossSection::ellipse(3.0, 1.0, 1.2).unwrap().with_resolution(64).unwrap();
        let sol = solve_dirichlet(&shape, 0.2).unwrap();
        assert!(sol.refinement_estimate.unwrap() <= SOLVER_TOLERANCE * sol.gamma.abs().max(1.0));
        assert!(solve_dirichlet(&shape, f64::NAN).is_err());
    }
}
