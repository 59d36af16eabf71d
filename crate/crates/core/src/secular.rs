//! The secular equation `F_M(E) = (1/M) Σ_x 1/(κ_M V(x) − E) = 1`.
//!
//! Its roots are exactly the eigenvalues of `H_M`: one below the smallest
//! pole and one in each gap between consecutive poles.

use serde::{Deserialize, Serialize};

use crate::model::PotentialSample;
use crate::pole_solver::{GapRoot, GapSolver};
use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// Default absolute root tolerance at energy `e`.
pub fn default_tol(e: f64) -> f64 {
    1e-12 * e.abs().max(1.0)
}

/// Default tolerance for a spectrum solve (the spectrum lies within a few
/// units of the origin).
pub const DEFAULT_TOL: f64 = 1e-12;

/// Eigenvalues of `H_M` in increasing order with their brackets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    /// Rank `k` of the gap `(p[k−1], p[k])` holding each eigenvalue; 0 is the
    /// region below the smallest pole.
    pub pole_index: Vec<usize>,
    /// `E − p[k−1]`, computed without cancellation (`+∞` for rank 0).
    pub dist_left: Vec<f64>,
    /// `p[k] − E`, computed without cancellation.
    pub dist_right: Vec<f64>,
    /// Energy range in which the result is complete.
    pub range: (f64, f64),
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Distance of eigenvalue `i` to the nearest pole.
    pub fn pole_distance(&self, i: usize) -> f64 {
        self.dist_left[i].min(self.dist_right[i])
    }

    /// Whether the result holds every eigenvalue in `[lo, hi]`.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.range.0 <= lo && hi <= self.range.1
    }

    fn from_roots(poles: &[f64], roots: &[GapRoot], range: (f64, f64)) -> Self {
        let mut r = SpectrumResult {
            eigenvalues: Vec::with_capacity(roots.len()),
            pole_index: Vec::with_capacity(roots.len()),
            dist_left: Vec::with_capacity(roots.len()),
            dist_right: Vec::with_capacity(roots.len()),
            range,
        };
        for root in roots {
            let e = root.value(poles);
            if e < range.0 || e > range.1 {
                continue;
            }
            r.eigenvalues.push(e);
            r.pole_index.push(root.gap);
            r.dist_left.push(root.dist_left());
            r.dist_right.push(root.dist_right());
        }
        r
    }
}

/// `F_M(E)`, summing terms in order of decreasing `|κV − E|` with
/// compensation.
pub fn secular_value(sample: &PotentialSample, e: f64) -> Result<f64> {
    let p = &sample.sorted_scaled;
    let m = p.len();
    let (mut i, mut j) = (0usize, m);
    let mut sum = NeumaierSum::new();
    while i < j {
        let dl = (p[i] - e).abs();
        let dr = (p[j - 1] - e).abs();
        let q = if dl >= dr {
            i += 1;
            p[i - 1]
        } else {
            j -= 1;
            p[j]
        };
        let d = q - e;
        if d == 0.0 {
            return Err(Error::Pole { energy: e, pole: q });
        }
        sum.add(1.0 / d);
    }
    Ok(sum.value() / m as f64)
}

/// `F_M'(E) = (1/M) Σ 1/(κV − E)²`.
pub fn secular_derivative(sample: &PotentialSample, e: f64) -> Result<f64> {
    let mut sum = NeumaierSum::new();
    for &q in &sample.sorted_scaled {
        let d = q - e;
        if d == 0.0 {
            return Err(Error::Pole { energy: e, pole: q });
        }
        sum.add(1.0 / (d * d));
    }
    Ok(sum.value() / sample.m() as f64)
}

fn ground_root(sample: &PotentialSample, tol: f64) -> Result<GapRoot> {
    let start = 2.0 * (1.0 + sample.params.lambda.abs());
    GapSolver::new(&sample.sorted_scaled, sample.m() as f64, tol).solve_below(start)
}

/// All `M` eigenvalues.
pub fn solve_spectrum_full(sample: &PotentialSample, tol: f64) -> Result<SpectrumResult> {
    check_tol(tol)?;
    sample.ensure_nondegenerate()?;
    let p = &sample.sorted_scaled;
    let mut roots = vec![ground_root(sample, tol)?];
    roots.extend(GapSolver::new(p, p.len() as f64, tol).solve_gaps(1..p.len())?);
    Ok(SpectrumResult::from_roots(
        p,
        &roots,
        (f64::NEG_INFINITY, f64::INFINITY),
    ))
}

/// The eigenvalues lying in `[a, b]`; each is bitwise identical to the
/// corresponding entry of the full solve.
pub fn solve_spectrum_window(
    sample: &PotentialSample,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<SpectrumResult> {
    check_tol(tol)?;
    if !(a < b) {
        return Err(Error::Domain(format!("empty window [{a}, {b}]")));
    }
    sample.ensure_nondegenerate()?;
    let p = &sample.sorted_scaled;
    let m = p.len();
    let mut roots = Vec::new();
    if a < p[0] {
        roots.push(ground_root(sample, tol)?);
    }
    // Gaps (p[k−1], p[k]) meeting [a, b].
    let first = p.partition_point(|&v| v <= a).max(1);
    let last = p.partition_point(|&v| v < b).min(m - 1);
    if first <= last {
        roots.extend(GapSolver::new(p, m as f64, tol).solve_gaps(first..last + 1)?);
    }
    Ok(SpectrumResult::from_roots(p, &roots, (a, b)))
}

/// The smallest eigenvalue.
pub fn ground_state_energy(sample: &PotentialSample, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    Ok(ground_root(sample, tol)?.value(&sample.sorted_scaled))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// `ψ_E(x) = C/(κ V(x) − E)` in site order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionValues {
    pub energy: f64,
    pub values: Vec<f64>,
    pub normalization_constant: f64,
}

impl EigenfunctionValues {
    pub fn ell1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn ell2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn ell_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn eigenfunction(sample: &PotentialSample, e: f64, c: f64) -> Result<EigenfunctionValues> {
    let kappa = sample.kappa();
    let mut values = Vec::with_capacity(sample.m());
    for &v in &sample.raw_values {
        let d = kappa * v - e;
        if d == 0.0 {
            return Err(Error::Pole {
                energy: e,
                pole: kappa * v,
            });
        }
        values.push(c / d);
    }
    Ok(EigenfunctionValues {
        energy: e,
        values,
        normalization_constant: c,
    })
}

/// Norms `(ℓ¹, ℓ², ℓ∞)` of the eigenfunction of the eigenvalue lying in gap
/// `gap` of the sorted poles, with the nearest-pole distance supplied
/// exactly. The constant cancels in every ratio, so `C = 1`.
pub fn eigenfunction_norms(
    sample: &PotentialSample,
    e: f64,
    gap: usize,
    dist_left: f64,
    dist_right: f64,
) -> (f64, f64, f64) {
    let p = &sample.sorted_scaled;
    let mut l1 = NeumaierSum::new();
    let mut l2 = NeumaierSum::new();
    let mut linf = 0.0f64;
    for (k, &q) in p.iter().enumerate() {
        let d = if gap > 0 && k == gap - 1 {
            dist_left
        } else if k == gap {
            dist_right
        } else {
            (q - e).abs()
        };
        let r = 1.0 / d;
        l1.add(r);
        l2.add(r * r);
        linf = linf.max(r);
    }
    (l1.value(), l2.value().sqrt(), linf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_potential_indexed, ModelParams};

    fn two_pole() -> PotentialSample {
        let p = ModelParams::new(2, 1.0, 0).unwrap();
        PotentialSample::from_scaled(p, &[0.0, 2.0]).unwrap()
    }

    #[test]
    fn secular_value_examples() {
        let p = ModelParams::new(2, 1.0, 0).unwrap();
        let sym = PotentialSample::from_scaled(p, &[-1.0, 1.0]).unwrap();
        assert_eq!(secular_value(&sym, 0.0).unwrap(), 0.0);
        let s = two_pole();
        assert!((secular_value(&s, 0.5).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        let golden = (1.0 - 5f64.sqrt()) / 2.0;
        assert!((secular_value(&s, golden).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(secular_value(&s, 2.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn two_by_two_spectrum() {
        let r = solve_spectrum_full(&two_pole(), DEFAULT_TOL).unwrap();
        let sq5 = 5f64.sqrt();
        assert!((r.eigenvalues[0] - (1.0 - sq5) / 2.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - (1.0 + sq5) / 2.0).abs() < 1e-14);
        assert_eq!(r.pole_index, vec![0, 1]);
    }

    #[test]
    fn one_site_special_case() {
        let params = ModelParams {
            m: 1,
            lambda: 1.0,
            kappa: 0.7,
            seed: 0,
        };
        let s = PotentialSample::from_raw(params, vec![2.0]).unwrap();
        let r = solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.eigenvalues[0] - (0.7 * 2.0 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn constant_potential_ground_state() {
        let params = ModelParams::new(50, 1.0, 0).unwrap();
        let c = 0.3;
        let s = PotentialSample::from_raw(params, vec![c; 50]).unwrap();
        let e0 = ground_state_energy(&s, DEFAULT_TOL).unwrap();
        assert!((e0 - (params.kappa * c - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn eigenfunction_two_pole() {
        let s = two_pole();
        let e = (1.0 - 5f64.sqrt()) / 2.0;
        let psi = eigenfunction(&s, e, 1.0).unwrap();
        assert!((psi.values[0] - 1.618_033_988_749_895).abs() < 1e-12);
        assert!((psi.values[1] - 0.381_966_011_250_105).abs() < 1e-12);
        let zero = eigenfunction(&s, e, 0.0).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        assert!(eigenfunction(&s, 0.0, 1.0).is_err());
    }

    #[test]
    fn window_partition_reproduces_full_solve() {
        let params = ModelParams::new(4096, 1.0, 11).unwrap();
        let s = sample_potential_indexed(params, 0);
        let full = solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        let w = solve_spectrum_window(&s, -0.6, -0.4, DEFAULT_TOL).unwrap();
        let expect: Vec<f64> = full
            .eigenvalues
            .iter()
            .copied()
            .filter(|e| (-0.6..=-0.4).contains(e))
            .collect();
        assert_eq!(w.eigenvalues, expect);

        let lo = s.min_pole() - 2.0;
        let hi = s.max_pole() + 1.0;
        let cuts: Vec<f64> = (0..=7).map(|i| lo + (hi - lo) * i as f64 / 7.0).collect();
        let mut union = Vec::new();
        for c in cuts.windows(2) {
            let part = solve_spectrum_window(&s, c[0], c[1], DEFAULT_TOL).unwrap();
            for e in part.eigenvalues {
                if union.last() != Some(&e) {
                    union.push(e);
                }
            }
        }
        assert_eq!(union, full.eigenvalues);
    }

    #[test]
    fn empty_window_between_poles() {
        let params = ModelParams::new(64, 1.0, 3).unwrap();
        let s = sample_potential_indexed(params, 0);
        let full = solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        // The gap holding eigenvalue 10 has a root-free part next to its left pole.
        let a = s.sorted_scaled[9];
        let e = full.eigenvalues[10];
        let w =
            solve_spectrum_window(&s, a + 0.25 * (e - a), a + 0.5 * (e - a), DEFAULT_TOL).unwrap();
        assert!(w.is_empty());
    }
}
