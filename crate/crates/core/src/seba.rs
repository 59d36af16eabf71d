//! Direct simulation of the Šeba point process: a Poisson configuration `ω`
//! of intensity one together with the solutions of `S_ω(u) = −α`, where
//! `S_ω(x) = Σ_v 1/(v − x)` is summed symmetrically outward from 0.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::pole_solver::GapSolver;
use crate::rng::{substream, RESAMPLE_STRIDE};
use crate::stats::binomial_slack;
use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// Default truncation half-length of simulated configurations.
pub const DEFAULT_TRUNCATION: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonConfiguration {
    pub truncation: f64,
    /// Strictly increasing points in `[−L, L]`.
    pub points: Vec<f64>,
}

impl PoissonConfiguration {
    pub fn new(truncation: f64, mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "configuration points must be distinct".into(),
            ));
        }
        Ok(Self { truncation, points })
    }

    /// Rank of the point labeled 0 (the largest point `≤ 0`), or −1.
    pub fn zero_rank(&self) -> i64 {
        self.points.partition_point(|&v| v <= 0.0) as i64 - 1
    }

    /// Points in `[lo, hi]`.
    pub fn points_in(&self, lo: f64, hi: f64) -> &[f64] {
        let a = self.points.partition_point(|&v| v < lo);
        let b = self.points.partition_point(|&v| v <= hi);
        &self.points[a..b]
    }

    /// The configuration translated by `b` (same truncation).
    pub fn shifted(&self, b: f64) -> Self {
        Self {
            truncation: self.truncation,
            points: self.points.iter().map(|v| v + b).collect(),
        }
    }
}

/// Draws configuration `index` under `seed`: `N ~ Poisson(2L)`, then `N`
/// uniform points on `[−L, L]`, sorted.
pub fn sample_poisson(truncation: f64, seed: u64, index: u64) -> Result<PoissonConfiguration> {
    if !(truncation > 0.0 && truncation.is_finite()) {
        return Err(Error::Domain(format!(
            "truncation must be positive, got {truncation}"
        )));
    }
    let count = Poisson::new(2.0 * truncation)
        .map_err(|e| Error::Domain(format!("poisson parameter: {e}")))?;
    let mut attempt = 0u64;
    loop {
        let stream = index.wrapping_add(attempt.wrapping_mul(RESAMPLE_STRIDE));
        let mut rng = substream(seed, stream);
        let n = count.sample(&mut rng) as usize;
        let mut points: Vec<f64> = (0..n)
            .map(|_| truncation * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        points.sort_by(f64::total_cmp);
        if points.windows(2).all(|w| w[0] < w[1]) {
            return Ok(PoissonConfiguration { truncation, points });
        }
        attempt += 1;
    }
}

fn check_inner(config: &PoissonConfiguration, x: f64) -> Result<()> {
    if x.abs() > config.truncation / 10.0 {
        return Err(Error::Domain(format!(
            "|x| = {} exceeds a tenth of the truncation {}",
            x.abs(),
            config.truncation
        )));
    }
    Ok(())
}

/// `S_ω(x)`, summed in order of increasing `|v|`.
pub fn stieltjes(config: &PoissonConfiguration, x: f64) -> Result<f64> {
    check_inner(config, x)?;
    let p = &config.points;
    let mid = p.partition_point(|&v| v < 0.0);
    let (mut i, mut j) = (mid, mid);
    let mut sum = NeumaierSum::new();
    while i > 0 || j < p.len() {
        let v = if j < p.len() && (i == 0 || p[j] <= -p[i - 1]) {
            j += 1;
            p[j - 1]
        } else {
            i -= 1;
            p[i]
        };
        let d = v - x;
        if d == 0.0 {
            return Err(Error::Pole { energy: x, pole: v });
        }
        sum.add(1.0 / d);
    }
    Ok(sum.value())
}

/// `S'_ω(x) = Σ 1/(v − x)²`.
pub fn stieltjes_derivative(config: &PoissonConfiguration, x: f64) -> Result<f64> {
    check_inner(config, x)?;
    let mut sum = NeumaierSum::new();
    for &v in &config.points {
        let d = v - x;
        if d == 0.0 {
            return Err(Error::Pole { energy: x, pole: v });
        }
        sum.add(1.0 / (d * d));
    }
    Ok(sum.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SebaRoot {
    pub label: i64,
    pub u: f64,
    /// Rank of the configuration point right of `u`.
    pub gap: usize,
    pub dist_left: f64,
    pub dist_right: f64,
    /// `‖Ψ‖∞ = 1/dist(u, ω)`.
    pub ell_inf: f64,
    /// `‖Ψ‖₂² = S'_ω(u)`.
    pub ell2_sq: f64,
}

impl SebaRoot {
    pub fn pole_distance(&self) -> f64 {
        self.dist_left.min(self.dist_right)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SebaSolution {
    pub alpha: f64,
    pub half_width: f64,
    /// One root per gap of `ω` meeting `[−W, W]`, ascending.
    pub roots: Vec<SebaRoot>,
}

impl SebaSolution {
    /// Roots with `|u| ≤ W`.
    pub fn in_window(&self) -> impl Iterator<Item = &SebaRoot> + '_ {
        self.roots
            .iter()
            .filter(move |r| r.u.abs() <= self.half_width)
    }
}

fn squared_norm(config: &PoissonConfiguration, gap: usize, u: f64, dl: f64, dr: f64) -> f64 {
    let mut sum = NeumaierSum::new();
    for (k, &v) in config.points.iter().enumerate() {
        let d = if k + 1 == gap {
            dl
        } else if k == gap {
            dr
        } else {
            v - u
        };
        sum.add(1.0 / (d * d));
    }
    sum.value()
}

/// Solves `S_ω(u) = −α` in every gap of `ω` that meets `[−W, W]`.
pub fn solve_seba(
    config: &PoissonConfiguration,
    alpha: f64,
    w: f64,
    tol: f64,
) -> Result<SebaSolution> {
    if !(w > 0.0 && w <= config.truncation / 10.0) {
        return Err(Error::Domain(format!(
            "window half-width {w} must lie in (0, L/10]"
        )));
    }
    let p = &config.points;
    if p.len() < 2 {
        return Err(Error::Empty("configuration has fewer than two points"));
    }
    let first = p.partition_point(|&v| v <= -w).max(1);
    let last = p.partition_point(|&v| v < w).min(p.len() - 1);
    let zero = config.zero_rank();
    let mut roots = Vec::new();
    if first <= last {
        let solver = GapSolver::new(p, -alpha, tol);
        for r in solver.solve_gaps(first..last + 1)? {
            let u = r.value(p);
            let (dl, dr) = (r.dist_left(), r.dist_right());
            roots.push(SebaRoot {
                label: r.gap as i64 - zero,
                u,
                gap: r.gap,
                dist_left: dl,
                dist_right: dr,
                ell_inf: 1.0 / dl.min(dr),
                ell2_sq: squared_norm(config, r.gap, u, dl, dr),
            });
        }
    }
    Ok(SebaSolution {
        alpha,
        half_width: w,
        roots,
    })
}

/// `Σ_{|v| ≤ W'} 1/|v − u|`: the ℓ¹ norm of the Šeba eigenfunction
/// restricted to `[−W', W']`.
pub fn ell1_partial(config: &PoissonConfiguration, root: &SebaRoot, w_prime: f64) -> f64 {
    let p = &config.points;
    let lo = p.partition_point(|&v| v < -w_prime);
    let hi = p.partition_point(|&v| v <= w_prime);
    let mut sum = NeumaierSum::new();
    for (k, &v) in p.iter().enumerate().take(hi).skip(lo) {
        let d = if k + 1 == root.gap {
            root.dist_left
        } else if k == root.gap {
            root.dist_right
        } else {
            (v - root.u).abs()
        };
        sum.add(1.0 / d);
    }
    sum.value()
}

/// Smallest and largest consecutive spacing of the points in `[−W, W]`.
pub fn gap_extremes(points: &[f64], w: f64) -> Result<(f64, f64)> {
    let inside: Vec<f64> = points.iter().copied().filter(|v| v.abs() <= w).collect();
    if inside.len() < 2 {
        return Err(Error::Empty("fewer than two points in the window"));
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for g in inside.windows(2).map(|x| x[1] - x[0]) {
        lo = lo.min(g);
        hi = hi.max(g);
    }
    Ok((lo, hi))
}

/// Empirical frequency against a probability bound, with binomial slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub t: f64,
    pub empirical: f64,
    pub bound: f64,
    /// `2·√(p(1−p)/n)` with `p` the bound clamped to `[0, 1]`.
    pub slack: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(t: f64, hits: usize, n: usize, bound: f64) -> Self {
        let empirical = hits as f64 / n as f64;
        let slack = binomial_slack(bound, n);
        Self {
            t,
            empirical,
            bound,
            slack,
            pass: empirical <= bound + slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub alpha: f64,
    pub half_width: f64,
    pub members: usize,
    /// `P(max_n dist(u_n, ω ∪ {±W}) ≥ t·2W/max(|α|, 1)) ≤ 1/t`.
    pub far_from_poles: Vec<BoundCheck>,
    /// `P(min_n dist(u_n, ω) ≤ 1/t) ≤ 2W/(t − |α|)`, `t > |α|`.
    pub near_poles: Vec<BoundCheck>,
}

impl LocalizationReport {
    pub fn pass(&self) -> bool {
        self.far_from_poles
            .iter()
            .chain(&self.near_poles)
            .all(|c| c.pass)
    }
}

pub const MIN_LOCALIZATION_ENSEMBLE: usize = 1000;

/// Compares an ensemble of solutions (all at level `alpha`, window `W`)
/// against both localization bounds.
pub fn localization_bound_check(
    ensemble: &[SebaSolution],
    alpha: f64,
    w: f64,
    t_far: &[f64],
    t_near: &[f64],
) -> Result<LocalizationReport> {
    if ensemble.len() < MIN_LOCALIZATION_ENSEMBLE {
        return Err(Error::InsufficientEnsemble {
            need: MIN_LOCALIZATION_ENSEMBLE,
            got: ensemble.len(),
        });
    }
    let n = ensemble.len();
    // Per member: max over in-window roots of the distance to ω ∪ {±W}, and
    // min over in-window roots of the distance to ω.
    let stats: Vec<(f64, f64)> = ensemble
        .iter()
        .map(|sol| {
            let mut max_d = 0.0f64;
            let mut min_d = f64::INFINITY;
            for r in sol.in_window() {
                let d = r.pole_distance();
                let edge = (w - r.u).abs().min((r.u + w).abs());
                max_d = max_d.max(d.min(edge));
                min_d = min_d.min(d);
            }
            (max_d, min_d)
        })
        .collect();
    let scale = 2.0 * w / alpha.abs().max(1.0);
    let far_from_poles = t_far
        .iter()
        .map(|&t| {
            let hits = stats.iter().filter(|s| s.0 >= t * scale).count();
            BoundCheck::new(t, hits, n, 1.0 / t)
        })
        .collect();
    let near_poles = t_near
        .iter()
        .filter(|&&t| t > alpha.abs())
        .map(|&t| {
            let hits = stats.iter().filter(|s| s.1 <= 1.0 / t).count();
            BoundCheck::new(t, hits, n, 2.0 * w / (t - alpha.abs()))
        })
        .collect();
    Ok(LocalizationReport {
        alpha,
        half_width: w,
        members: n,
        far_from_poles,
        near_poles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(points: &[f64]) -> PoissonConfiguration {
        PoissonConfiguration::new(100.0, points.to_vec()).unwrap()
    }

    #[test]
    fn stieltjes_examples() {
        assert_eq!(stieltjes(&cfg(&[-1.0, 1.0]), 0.0).unwrap(), 0.0);
        assert_eq!(stieltjes(&cfg(&[0.5]), 0.0).unwrap(), 2.0);
        assert_eq!(stieltjes_derivative(&cfg(&[-1.0, 1.0]), 0.0).unwrap(), 2.0);
        assert!(stieltjes(&cfg(&[0.5]), 0.5).is_err());
        assert!(stieltjes(&cfg(&[0.5]), 50.0).is_err());
    }

    #[test]
    fn symmetric_pair_root_at_origin() {
        let sol = solve_seba(&cfg(&[-1.0, 1.0]), 0.0, 2.0, 1e-15).unwrap();
        assert_eq!(sol.roots.len(), 1);
        assert!(sol.roots[0].u.abs() < 1e-15);
        assert_eq!(sol.roots[0].label, 1);
        assert!((sol.roots[0].ell2_sq - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_poisson(50.0, 3, 7).unwrap();
        let b = sample_poisson(50.0, 3, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|v| v.abs() <= 50.0));
        assert_ne!(a, sample_poisson(50.0, 3, 8).unwrap());
    }

    #[test]
    fn gap_extremes_examples() {
        assert_eq!(gap_extremes(&[-1.0, 0.0, 2.0], 3.0).unwrap(), (1.0, 2.0));
        let eq: Vec<f64> = (0..5).map(|i| i as f64 * 0.5).collect();
        let (a, b) = gap_extremes(&eq, 10.0).unwrap();
        assert_eq!(a, b);
        assert!(gap_extremes(&[0.0], 1.0).is_err());
    }

    #[test]
    fn huge_level_pushes_roots_onto_poles() {
        let c = sample_poisson(1000.0, 1, 0).unwrap();
        for alpha in [1e6, -1e6] {
            let sol = solve_seba(&c, alpha, 10.0, 1e-15).unwrap();
            assert!(sol.roots.iter().all(|r| r.pole_distance() <= 1e-4));
        }
    }

    #[test]
    fn bound_check_slack() {
        let c = BoundCheck::new(10.0, 115, 1000, 0.1);
        assert!((c.slack - 2.0 * (0.09f64 / 1000.0).sqrt()).abs() < 1e-15);
        assert!(c.pass);
        assert!(!BoundCheck::new(10.0, 125, 1000, 0.1).pass);
    }
}
