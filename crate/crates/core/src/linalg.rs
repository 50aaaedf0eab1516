//! Symmetric positive definite design-matrix state.
//!
//! [`SpdState`] tracks `Z = λI + Σ w·x·xᵀ` together with its inverse and the
//! log-determinant growth `log det Z − log det(λI)`. The inverse is maintained
//! with Sherman–Morrison updates and recomputed from `Z` every
//! [`REFRESH_INTERVAL`] updates so that round-off cannot accumulate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Number of rank-1 updates between full recomputations of the inverse.
pub const REFRESH_INTERVAL: usize = 500;

/// Target accuracy for `‖y‖ − radius` in [`SpdState::project_onto_ball`].
pub const PROJECTION_TOL: f64 = 1e-10;

/// Bisection budget for [`SpdState::project_onto_ball`].
pub const PROJECTION_MAX_ITER: usize = 200;

/// Which quadratic form [`SpdState::mahalanobis_sq`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `vᵀ Z v`
    Design,
    /// `vᵀ Z⁻¹ v`
    Inverse,
}

#[derive(Debug, Clone)]
pub struct SpdState {
    dim: usize,
    lambda: f64,
    z: DMatrix<f64>,
    z_inv: DMatrix<f64>,
    logdet_ratio: f64,
    update_count: usize,
}

impl SpdState {
    /// `Z = λI`, `Z⁻¹ = I/λ`.
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self {
            dim,
            lambda,
            z: DMatrix::identity(dim, dim) * lambda,
            z_inv: DMatrix::identity(dim, dim) / lambda,
            logdet_ratio: 0.0,
            update_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.z_inv
    }

    /// `log det Z − log det(λI)`, maintained incrementally.
    pub fn logdet_ratio(&self) -> f64 {
        self.logdet_ratio
    }

    pub fn update_count(&self) -> usize {
        self.update_count
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::invalid(format!(
                "expected vector of length {}, got {}",
                self.dim,
                v.len()
            )));
        }
        Ok(())
    }

    /// `Z ← Z + weight·x·xᵀ`.
    pub fn rank1_update(&mut self, x: &[f64], weight: f64) -> Result<()> {
        self.check_len(x)?;
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::invalid(format!(
                "update weight must be finite and non-negative, got {weight}"
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("update vector has non-finite entries"));
        }
        self.update_count += 1;

        if weight > 0.0 && x.iter().any(|&v| v != 0.0) {
            let xv = DVector::from_column_slice(x);
            let u = &self.z_inv * &xv;
            let quad = xv.dot(&u);
            let denom = 1.0 + weight * quad;

            self.z.ger(weight, &xv, &xv, 1.0);
            self.z_inv.ger(-weight / denom, &u, &u, 1.0);
            self.logdet_ratio += denom.ln();
        }

        if self.update_count.is_multiple_of(REFRESH_INTERVAL) {
            self.refresh();
        }
        Ok(())
    }

    /// Recomputes `Z⁻¹` and the log-determinant directly from `Z`.
    pub fn refresh(&mut self) {
        let zt = self.z.transpose();
        self.z = (&self.z + zt) * 0.5;
        if let Some(chol) = self.z.clone().cholesky() {
            let direct = log_det_from_cholesky(chol.l_dirty(), self.dim) - self.base_logdet();
            self.z_inv = chol.inverse();
            let zt = self.z_inv.transpose();
            self.z_inv = (&self.z_inv + zt) * 0.5;
            // keep the ratio monotone against sub-ulp disagreement with the incremental value
            self.logdet_ratio = direct.max(self.logdet_ratio.min(direct + 1e-12));
        }
    }

    fn base_logdet(&self) -> f64 {
        self.dim as f64 * self.lambda.ln()
    }

    /// `log det Z − log det(λI)` computed from a fresh Cholesky factorization.
    pub fn direct_logdet_ratio(&self) -> Result<f64> {
        let chol = self.z.clone().cholesky().ok_or(Error::NumericalFailure {
            what: "design matrix lost positive definiteness",
            residual: f64::NAN,
        })?;
        Ok(log_det_from_cholesky(chol.l_dirty(), self.dim) - self.base_logdet())
    }

    /// `max |Z·Z⁻¹ − I|` over all entries.
    pub fn inverse_residual(&self) -> f64 {
        let prod = &self.z * &self.z_inv;
        let mut worst = 0.0f64;
        for j in 0..self.dim {
            for i in 0..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn mahalanobis_sq(&self, v: &[f64], metric: Metric) -> Result<f64> {
        self.check_len(v)?;
        let m = match metric {
            Metric::Design => &self.z,
            Metric::Inverse => &self.z_inv,
        };
        Ok(quad_form(m, v).max(0.0))
    }

    /// Generalized projection `argmin_{‖y‖ ≤ radius} (y − p)ᵀ Z (y − p)`.
    ///
    /// Points already inside the ball are returned unchanged. Otherwise the KKT
    /// condition gives `y(ν) = (Z + νI)⁻¹ Z p` with `‖y(ν)‖` decreasing in `ν`,
    /// and `ν` is located by bisection.
    pub fn project_onto_ball(&self, point: &[f64], radius: f64) -> Result<Vec<f64>> {
        self.check_len(point)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!(
                "projection radius must be positive, got {radius}"
            )));
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("projection point has non-finite entries"));
        }
        let p = DVector::from_column_slice(point);
        let p_norm = p.norm();
        if p_norm <= radius {
            return Ok(point.to_vec());
        }

        let zp = &self.z * &p;
        let solve = |nu: f64| -> Result<DVector<f64>> {
            let mut shifted = self.z.clone();
            for i in 0..self.dim {
                shifted[(i, i)] += nu;
            }
            let chol = shifted.cholesky().ok_or(Error::NumericalFailure {
                what: "shifted design matrix is not positive definite",
                residual: f64::NAN,
            })?;
            Ok(chol.solve(&zp))
        };

        // ‖y(ν)‖ ≤ λ_max‖p‖/ν ≤ tr(Z)‖p‖/ν, so this ν is feasible.
        let mut lo = 0.0;
        let mut hi = self.z.trace() * p_norm / radius;
        let mut residual = f64::INFINITY;
        for _ in 0..PROJECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            let y = solve(mid)?;
            residual = y.norm() - radius;
            if residual.abs() <= PROJECTION_TOL {
                return Ok(y.as_slice().to_vec());
            }
            if residual > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if mid == lo && mid == hi {
                break;
            }
        }
        Err(Error::NumericalFailure {
            what: "ball projection bisection did not converge",
            residual,
        })
    }
}

fn log_det_from_cholesky(l: &DMatrix<f64>, dim: usize) -> f64 {
    (0..dim).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0
}

/// `vᵀ M v` for a square matrix stored column-major.
pub(crate) fn quad_form(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (j, &vj) in v.iter().enumerate() {
        if vj == 0.0 {
            continue;
        }
        let col = m.column(j);
        let mut inner = 0.0;
        for (i, &vi) in v.iter().enumerate() {
            inner += col[i] * vi;
        }
        acc += inner * vj;
    }
    acc
}
