use crate::geometry::{boundary_nodes, CrossSection};

use super::{BoundarySolution, ResidualReport, SolverError};

/// Pointwise defect of the dynamic condition
/// `f = 2H + λ − We ((1/r) ∂_n ψ − W n_r)²` at the nodes, with
/// `H = κ + n_r / r`.
pub fn dynamic_defect(
    shape: &CrossSection,
    sol: &BoundarySolution,
    we: f64,
    lambda: f64,
) -> Result<Vec<f64>, SolverError> {
    let fields = Fields::new(shape, sol)?;
    Ok(fields.defect(we, lambda))
}

/// Norms of [`dynamic_defect`], the integrated identity
/// `∮ f ds = 2∮H ds + λ|∂E| − We ∮ q² ds`, and the maximum principle
/// violation `∮ max(∂_n Ψ, 0) ds` with `Ψ = ψ − W r²/2`.
pub fn dynamic_residual(
    shape: &CrossSection,
    sol: &BoundarySolution,
    we: f64,
    lambda: f64,
) -> Result<ResidualReport, SolverError> {
    if !(we > 0.0) || !we.is_finite() {
        return Err(SolverError::InvalidInput(format!("We must be positive, got {we}")));
    }
    if !lambda.is_finite() {
        return Err(SolverError::InvalidInput(format!("lambda must be finite, got {lambda}")));
    }
    Ok(Fields::new(shape, sol)?.report(we, lambda))
}

/// `λ ≥ 0` minimizing the L² norm of the defect.
pub fn optimal_lambda(shape: &CrossSection, sol: &BoundarySolution, we: f64) -> Result<f64, SolverError> {
    Ok(Fields::new(shape, sol)?.optimal_lambda(we))
}

/// Boundary data the residual is built from.
pub(crate) struct Fields {
    weights: Vec<f64>,
    /// `2H`
    twice_h: Vec<f64>,
    /// `(1/r) ∂_n ψ − W n_r`
    q: Vec<f64>,
    /// `∂_n Ψ`
    dn_big_psi: Vec<f64>,
    w: f64,
}

impl Fields {
    pub(crate) fn new(shape: &CrossSection, sol: &BoundarySolution) -> Result<Fields, SolverError> {
        if shape.is_polygon() {
            return Err(SolverError::PolygonNotSupported);
        }
        let nodes = boundary_nodes(&shape.with_resolution(sol.resolution)?);
        if nodes.len() != sol.dn_psi.len() {
            return Err(SolverError::InvalidInput("solution does not match the shape".into()));
        }
        let kappa = nodes.pointwise_curvature().expect("smooth shape");
        let mut fields = Fields {
            weights: nodes.weights.clone(),
            twice_h: Vec::with_capacity(nodes.len()),
            q: Vec::with_capacity(nodes.len()),
            dn_big_psi: Vec::with_capacity(nodes.len()),
            w: sol.w,
        };
        for (i, &k) in kappa.iter().enumerate() {
            let r = nodes.points[i][0];
            let nr = nodes.normals[i][0];
            fields.twice_h.push(2.0 * (k + nr / r));
            let dn_big = sol.dn_psi[i] - sol.w * r * nr;
            fields.dn_big_psi.push(dn_big);
            fields.q.push(dn_big / r);
        }
        Ok(fields)
    }

    pub(crate) fn defect(&self, we: f64, lambda: f64) -> Vec<f64> {
        self.twice_h
            .iter()
            .zip(&self.q)
            .map(|(h2, q)| h2 + lambda - we * q * q)
            .collect()
    }

    pub(crate) fn optimal_lambda(&self, we: f64) -> f64 {
        let total: f64 = self.weights.iter().sum();
        let mean = self
            .twice_h
            .iter()
            .zip(&self.q)
            .zip(&self.weights)
            .map(|((h2, q), w)| (we * q * q - h2) * w)
            .sum::<f64>()
            / total;
        mean.max(0.0)
    }

    pub(crate) fn report(&self, we: f64, lambda: f64) -> ResidualReport {
        let defect = self.defect(we, lambda);
        let l2 = defect
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| f * f * w)
            .sum::<f64>()
            .sqrt();
        let max = defect.iter().fold(0.0, |m: f64, f| m.max(f.abs()));
        let integral: f64 = defect.iter().zip(&self.weights).map(|(f, w)| f * w).sum();
        let h_scale: f64 = self.twice_h.iter().zip(&self.weights).map(|(h2, w)| 0.5 * h2.abs() * w).sum();
        let violation = self
            .dn_big_psi
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| d.max(0.0) * w)
            .sum();
        ResidualReport {
            dyn_residual_l2: l2,
            dyn_residual_max: max,
            identity15_gap: integral.abs(),
            identity15_gap_relative: integral.abs() / h_scale,
            max_principle_violation: violation,
            lambda,
            we,
            w: self.w,
            perimeter: self.weights.iter().sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streamsolver::DirichletSolver;

    fn setup() -> (CrossSection, BoundarySolution) {
        let shape = CrossSection::ellipse(3.0, 1.2, 1.0).unwrap().with_resolution(64).unwrap();
        let sol = DirichletSolver::new(&shape).unwrap().solution(0.1).unwrap();
        (shape, sol)
    }

    #[test]
    fn gap_is_integral_of_defect() {
        let (shape, sol) = setup();
        let f = dynamic_defect(&shape, &sol, 2.0, 0.3).unwrap();
        let nodes = boundary_nodes(&shape);
        let integral: f64 = f.iter().zip(&nodes.weights).map(|(f, w)| f * w).sum();
        let rep = dynamic_residual(&shape, &sol, 2.0, 0.3).unwrap();
        assert!((rep.identity15_gap - integral.abs()).abs() <= 1e-10 * integral.abs().max(1.0));
        assert!(rep.identity15_gap <= rep.perimeter * rep.dyn_residual_max);
        assert!(rep.dyn_residual_l2 >= 0.0 && rep.dyn_residual_max >= 0.0);
    }

    #[test]
    fn optimal_lambda_minimizes_l2() {
        let (shape, sol) = setup();
        let we = 3.0;
        let lam = optimal_lambda(&shape, &sol, we).unwrap();
        let best = dynamic_residual(&shape, &sol, we, lam).unwrap().dyn_residual_l2;
        for d in [-1e-3, 1e-3, 0.1] {
            let other = (lam + d).max(0.0);
            assert!(dynamic_residual(&shape, &sol, we, other).unwrap().dyn_residual_l2 >= best - 1e-14);
        }
    }

    #[test]
    fn no_violation_for_inward_flux() {
        // the bound vortex makes ∂_n Ψ negative everywhere on a ring at rest
        let (shape, _) = setup();
        let sol = DirichletSolver::new(&shape).unwrap().solution(0.0).unwrap();
        let rep = dynamic_residual(&shape, &sol, 1.0, 0.0).unwrap();
        assert!(sol.dn_psi.iter().all(|d| *d <= 0.0));
        assert_eq!(rep.max_principle_violation, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let (shape, sol) = setup();
        assert!(dynamic_residual(&shape, &sol, 0.0, 0.0).is_err());
        let other = shape.with_resolution(32).unwrap();
        let tri = CrossSection::polygon(vec![[1.0, -1.0], [2.0, 0.0], [1.0, 1.0]]).unwrap();
        assert!(dynamic_residual(&tri, &sol, 1.0, 0.0).is_err());
        // resolution is taken from the solution, so a coarser shape still works
        assert!(dynamic_residual(&other, &sol, 1.0, 0.0).is_ok());
    }
}
