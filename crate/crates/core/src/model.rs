//! Model parameters and random potential samples.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::rng::{substream, RESAMPLE_STRIDE};
use crate::{Error, Result};

/// Parameters of `H_M = -|φ₀⟩⟨φ₀| + κ_M V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: usize,
    pub lambda: f64,
    pub kappa: f64,
    pub seed: u64,
}

impl ModelParams {
    pub fn new(m: usize, lambda: f64, seed: u64) -> Result<Self> {
        let kappa = compute_kappa(lambda, m)?;
        Ok(Self {
            m,
            lambda,
            kappa,
            seed,
        })
    }

    /// `2 ln M`, the squared Gaussian extreme-value scale.
    pub fn two_ln_m(&self) -> f64 {
        2.0 * (self.m as f64).ln()
    }
}

/// `κ_M = λ / √(2 ln M)`.
pub fn compute_kappa(lambda: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("M must be at least 2, got {m}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(lambda / (2.0 * (m as f64).ln()).sqrt())
}

/// One realization of the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub params: ModelParams,
    /// `V(1), …, V(M)` in site order.
    pub raw_values: Vec<f64>,
    /// `κ_M V` sorted ascending: the poles of the secular function.
    pub sorted_scaled: Vec<f64>,
    /// `sort_permutation[k]` is the site holding the rank-`k` value.
    pub sort_permutation: Vec<usize>,
    /// Substream the values were drawn from (after any resampling).
    pub stream: u64,
}

impl PotentialSample {
    /// Builds a sample from given site values, bypassing the random draw.
    /// Ties are allowed here; solvers that need distinct poles check for them.
    pub fn from_raw(params: ModelParams, raw_values: Vec<f64>) -> Result<Self> {
        if raw_values.len() != params.m {
            return Err(Error::Domain(format!(
                "expected {} values, got {}",
                params.m,
                raw_values.len()
            )));
        }
        if raw_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("potential values must be finite".into()));
        }
        let mut perm: Vec<usize> = (0..raw_values.len()).collect();
        perm.sort_by(|&i, &j| raw_values[i].total_cmp(&raw_values[j]).then(i.cmp(&j)));
        let sorted_scaled = perm.iter().map(|&i| params.kappa * raw_values[i]).collect();
        Ok(Self {
            params,
            raw_values,
            sorted_scaled,
            sort_permutation: perm,
            stream: 0,
        })
    }

    /// Builds a sample whose poles `κ_M V` are exactly `scaled` (any order).
    pub fn from_scaled(params: ModelParams, scaled: &[f64]) -> Result<Self> {
        let raw = scaled.iter().map(|s| s / params.kappa).collect();
        let mut sample = Self::from_raw(params, raw)?;
        let mut sorted = scaled.to_vec();
        sorted.sort_by(f64::total_cmp);
        sample.sorted_scaled = sorted;
        Ok(sample)
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa
    }

    /// First pair of sorted ranks holding equal values, if any.
    pub fn find_tie(&self) -> Option<(usize, usize)> {
        self.sorted_scaled
            .windows(2)
            .position(|w| w[0] >= w[1])
            .map(|k| (k, k + 1))
    }

    pub fn ensure_nondegenerate(&self) -> Result<()> {
        match self.find_tie() {
            Some((a, b)) => Err(Error::Degenerate(a, b)),
            None => Ok(()),
        }
    }

    pub fn min_pole(&self) -> f64 {
        self.sorted_scaled[0]
    }

    pub fn max_pole(&self) -> f64 {
        self.sorted_scaled[self.sorted_scaled.len() - 1]
    }

    /// Largest raw value `max V`.
    pub fn max_raw(&self) -> f64 {
        self.raw_values[self.sort_permutation[self.m() - 1]]
    }
}

fn draw_raw(m: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = substream(seed, stream);
    (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Draws sample number `index` of the ensemble keyed by `params.seed`.
/// A sample with tied values is rejected and redrawn from the next
/// resampling stream.
pub fn sample_potential_indexed(params: ModelParams, index: u64) -> PotentialSample {
    let mut attempt = 0u64;
    loop {
        let stream = index.wrapping_add(attempt.wrapping_mul(RESAMPLE_STRIDE));
        let raw = draw_raw(params.m, params.seed, stream);
        let mut sample = PotentialSample::from_raw(params, raw)
            .expect("length and finiteness hold by construction");
        sample.stream = stream;
        if sample.find_tie().is_none() {
            return sample;
        }
        attempt += 1;
    }
}

/// Draws the sample of stream 0 under `params.seed`.
pub fn sample_potential(params: ModelParams) -> PotentialSample {
    sample_potential_indexed(params, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        let k = compute_kappa(1.0, 100).unwrap();
        assert!((k - 0.329_505_114_491_130_4).abs() < 1e-15);
        assert_eq!(compute_kappa(2.0, 100).unwrap(), 2.0 * k);
        assert!((compute_kappa(1.0, 1_000_000).unwrap() - 0.190_239_866_550_812_6).abs() < 1e-15);
        assert!(compute_kappa(1.0, 1).is_err());
        assert!(compute_kappa(0.0, 10).is_err());
        assert!(compute_kappa(-1.0, 10).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = ModelParams::new(4, 1.0, 99).unwrap();
        let a = sample_potential(p);
        let b = sample_potential(p);
        assert_eq!(a, b);
        for (k, &site) in a.sort_permutation.iter().enumerate() {
            assert_eq!(a.sorted_scaled[k], p.kappa * a.raw_values[site]);
        }
    }

    #[test]
    fn moments_of_a_large_sample() {
        let p = ModelParams::new(100_000, 1.0, 5).unwrap();
        let s = sample_potential(p);
        let n = s.m() as f64;
        let mean = s.raw_values.iter().sum::<f64>() / n;
        let var = s.raw_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 4.0 / n.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() <= 0.05, "var {var}");
    }

    #[test]
    fn ties_are_detected() {
        let p = ModelParams::new(3, 1.0, 0).unwrap();
        let s = PotentialSample::from_raw(p, vec![0.5, -1.0, 0.5]).unwrap();
        assert_eq!(s.find_tie(), Some((1, 2)));
        assert!(matches!(
            s.ensure_nondegenerate(),
            Err(Error::Degenerate(1, 2))
        ));
    }
}
