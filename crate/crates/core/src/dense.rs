//! Brute-force oracle: build `H_M` as a dense matrix and diagonalize it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::model::PotentialSample;
use crate::{Error, Result};

pub const DENSE_LIMIT: usize = 1024;

/// `H_M = −(1/M)·𝟙𝟙ᵀ + κ_M·diag(V)` in site order.
pub fn dense_hamiltonian(sample: &PotentialSample) -> Result<DMatrix<f64>> {
    let m = sample.m();
    if m > DENSE_LIMIT {
        return Err(Error::Size {
            size: m,
            limit: DENSE_LIMIT,
        });
    }
    let kappa = sample.kappa();
    let mut h = DMatrix::from_element(m, m, -1.0 / m as f64);
    for (i, v) in sample.raw_values.iter().enumerate() {
        h[(i, i)] += kappa * v;
    }
    Ok(h)
}

/// All eigenvalues of `H_M`, ascending.
pub fn dense_oracle(sample: &PotentialSample) -> Result<Vec<f64>> {
    let h = dense_hamiltonian(sample)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `‖H_M ψ − E ψ‖₂ / ‖ψ‖₂` for `ψ` given in site order.
pub fn relative_residual(sample: &PotentialSample, e: f64, psi: &[f64]) -> Result<f64> {
    let h = dense_hamiltonian(sample)?;
    let v = DVector::from_column_slice(psi);
    let r = &h * &v - &v * e;
    Ok(r.norm() / v.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    #[test]
    fn two_by_two() {
        let p = ModelParams::new(2, 1.0, 0).unwrap();
        let s = PotentialSample::from_scaled(p, &[0.0, 2.0]).unwrap();
        let ev = dense_oracle(&s).unwrap();
        let sq5 = 5f64.sqrt();
        assert!((ev[0] - (1.0 - sq5) / 2.0).abs() < 1e-14);
        assert!((ev[1] - (1.0 + sq5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_potential() {
        let p = ModelParams::new(16, 1.0, 0).unwrap();
        let s = PotentialSample::from_raw(p, vec![0.0; 16]).unwrap();
        let ev = dense_oracle(&s).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-13);
        assert!(ev[1..].iter().all(|e| e.abs() < 1e-13));
    }

    #[test]
    fn size_limit() {
        let p = ModelParams::new(1025, 1.0, 0).unwrap();
        let s = PotentialSample::from_raw(p, vec![0.0; 1025]).unwrap();
        assert!(matches!(dense_oracle(&s), Err(Error::Size { .. })));
    }
}
