//! Microscopic scaling windows around an energy `ℰ`.
//!
//! Poles and eigenvalues are rescaled as `ω = (κV − ℰ)/Δ` and
//! `u = (E − ℰ)/Δ` with the local mean level spacing `Δ = Δ_M(ℰ)`, and
//! labeled so that `ω₀ ≤ 0 < ω₁` and `u_n ∈ (ω_{n−1}, ω_n]`. The secular
//! equation then reads `S(u) = −R(u)`, where `S` sums over the poles with
//! `|ω| ≤ L` and the tail function `R = T − MΔ` collects the rest.

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, PotentialSample};
use crate::secular::{secular_value, SpectrumResult};
use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// `Δ_M(ℰ) = √(2π) κ_M M^{(ℰ/λ)² − 1}`, restricted to the band `|ℰ| < λ`.
pub fn mean_gap(params: &ModelParams, center: f64) -> Result<f64> {
    if !(center.abs() < params.lambda) {
        return Err(Error::Domain(format!(
            "center {center} lies outside the band (-{0}, {0})",
            params.lambda
        )));
    }
    Ok(gap_scale(params, center))
}

/// The same formula without the band restriction (outside the band it
/// exceeds the spacing of the extreme poles).
pub fn gap_scale(params: &ModelParams, center: f64) -> f64 {
    let r = center / params.lambda;
    (2.0 * std::f64::consts::PI).sqrt() * params.kappa * (params.m as f64).powf(r * r - 1.0)
}

/// Default cutoff `L_M = ln M`.
pub fn default_cutoff(m: usize) -> f64 {
    (m as f64).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingWindow {
    pub center: f64,
    pub delta: f64,
    pub half_width: f64,
    pub cutoff: f64,
    /// `M·Δ`.
    pub m_delta: f64,
    /// Rescaled poles with `|ω| ≤ cutoff`, ascending; `omega[i]` carries
    /// label `omega_first_label + i`.
    pub omega: Vec<f64>,
    pub omega_first_label: i64,
    /// Rescaled eigenvalues with `|u| ≤ half_width`, ascending; `u[i]` carries
    /// label `u_first_label + i`.
    pub u: Vec<f64>,
    pub u_first_label: i64,
    /// `(u_n − ω_{n−1}, ω_n − u_n)` for each eigenvalue, without cancellation.
    pub u_gaps: Vec<(f64, f64)>,
    /// Sorted rank of the pole labeled 0 (may be −1 when no pole lies at or
    /// below the center).
    pub zero_rank: i64,
    /// Rank range `[lo, hi)` of the poles inside the cutoff.
    pub cutoff_ranks: (usize, usize),
}

impl ScalingWindow {
    /// Builds the window with an explicit gap scale `delta`.
    pub fn build(
        sample: &PotentialSample,
        spectrum: &SpectrumResult,
        center: f64,
        delta: f64,
        half_width: f64,
        cutoff: f64,
    ) -> Result<Self> {
        if !(delta > 0.0 && half_width > 0.0 && cutoff > 0.0) {
            return Err(Error::Domain(
                "delta, half-width and cutoff must be positive".into(),
            ));
        }
        let margin = (half_width + 2.0) * delta;
        let (lo, hi) = (center - margin, center + margin);
        if !spectrum.covers(lo, hi) {
            return Err(Error::Coverage {
                lo,
                hi,
                have_lo: spectrum.range.0,
                have_hi: spectrum.range.1,
            });
        }
        let p = &sample.sorted_scaled;
        let zero_rank = p.partition_point(|&v| v <= center) as i64 - 1;
        let rank_lo = p.partition_point(|&v| (v - center) / delta < -cutoff);
        let rank_hi = p.partition_point(|&v| (v - center) / delta <= cutoff);
        let omega = p[rank_lo..rank_hi]
            .iter()
            .map(|&v| (v - center) / delta)
            .collect();

        let mut u = Vec::new();
        let mut u_gaps = Vec::new();
        let mut u_first_label = 0;
        for i in 0..spectrum.len() {
            let x = (spectrum.eigenvalues[i] - center) / delta;
            if x.abs() <= half_width {
                if u.is_empty() {
                    u_first_label = spectrum.pole_index[i] as i64 - zero_rank;
                }
                u.push(x);
                u_gaps.push((
                    spectrum.dist_left[i] / delta,
                    spectrum.dist_right[i] / delta,
                ));
            }
        }
        Ok(Self {
            center,
            delta,
            half_width,
            cutoff,
            m_delta: sample.m() as f64 * delta,
            omega,
            omega_first_label: rank_lo as i64 - zero_rank,
            u,
            u_first_label,
            u_gaps,
            zero_rank,
            cutoff_ranks: (rank_lo, rank_hi),
        })
    }

    /// Window carrying poles only (no eigenvalues), for statistics that
    /// depend on `ω` alone such as `R` and `Y`.
    pub fn poles_only(
        sample: &PotentialSample,
        center: f64,
        delta: f64,
        half_width: f64,
        cutoff: f64,
    ) -> Result<Self> {
        let empty = SpectrumResult {
            eigenvalues: Vec::new(),
            pole_index: Vec::new(),
            dist_left: Vec::new(),
            dist_right: Vec::new(),
            range: (f64::NEG_INFINITY, f64::INFINITY),
        };
        Self::build(sample, &empty, center, delta, half_width, cutoff)
    }

    /// Labels of the stored poles.
    pub fn omega_labels(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.omega.len() as i64).map(move |i| self.omega_first_label + i)
    }

    pub fn u_labels(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.u.len() as i64).map(move |i| self.u_first_label + i)
    }

    pub fn omega_by_label(&self, n: i64) -> Option<f64> {
        let i = n - self.omega_first_label;
        (0..self.omega.len() as i64)
            .contains(&i)
            .then(|| self.omega[i as usize])
    }

    pub fn u_by_label(&self, n: i64) -> Option<f64> {
        let i = n - self.u_first_label;
        (0..self.u.len() as i64)
            .contains(&i)
            .then(|| self.u[i as usize])
    }

    /// Distance from each in-window eigenvalue to the nearest pole.
    pub fn pole_distances(&self) -> Vec<f64> {
        self.u_gaps.iter().map(|&(l, r)| l.min(r)).collect()
    }
}

/// Window centered at `center` with the in-band gap scale.
pub fn build_window(
    sample: &PotentialSample,
    spectrum: &SpectrumResult,
    center: f64,
    half_width: f64,
    cutoff: f64,
) -> Result<ScalingWindow> {
    let delta = mean_gap(&sample.params, center)?;
    ScalingWindow::build(sample, spectrum, center, delta, half_width, cutoff)
}

/// `(S, T)` at rescaled energy `u`: sums of `1/(ω − u)` over the poles with
/// `|ω| ≤ L` and `|ω| > L` respectively.
pub fn split_secular(
    window: &ScalingWindow,
    sample: &PotentialSample,
    u: f64,
) -> Result<(f64, f64)> {
    let p = &sample.sorted_scaled;
    let (lo, hi) = window.cutoff_ranks;
    let term = |v: f64| -> Result<f64> {
        let d = (v - window.center) / window.delta - u;
        if d == 0.0 {
            Err(Error::Pole {
                energy: window.center + u * window.delta,
                pole: v,
            })
        } else {
            Ok(1.0 / d)
        }
    };
    let mut s = NeumaierSum::new();
    for &v in &p[lo..hi] {
        s.add(term(v)?);
    }
    let mut t = NeumaierSum::new();
    // Outermost terms first.
    let (mut i, mut j) = (0usize, p.len());
    while i < lo || j > hi {
        let take_left =
            i < lo && (j <= hi || (p[i] - window.center).abs() >= (p[j - 1] - window.center).abs());
        let v = if take_left {
            i += 1;
            p[i - 1]
        } else {
            j -= 1;
            p[j]
        };
        t.add(term(v)?);
    }
    Ok((s.value(), t.value()))
}

/// `R(u) = T(u) − MΔ`.
pub fn tail_function(window: &ScalingWindow, sample: &PotentialSample, u: f64) -> Result<f64> {
    Ok(split_secular(window, sample, u)?.1 - window.m_delta)
}

/// `R` on a grid; poles inside the cutoff do not enter.
pub fn tail_on_grid(
    window: &ScalingWindow,
    sample: &PotentialSample,
    grid: &[f64],
) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&u| tail_function(window, sample, u))
        .collect()
}

/// Relative mismatch of `S + T` against `MΔ·F_M(ℰ + uΔ)`.
pub fn split_identity_error(
    window: &ScalingWindow,
    sample: &PotentialSample,
    u: f64,
) -> Result<f64> {
    let (s, t) = split_secular(window, sample, u)?;
    let f = secular_value(sample, window.center + u * window.delta)?;
    let rhs = window.m_delta * f;
    let scale = rhs.abs().max(s.abs()).max(t.abs()).max(1e-300);
    Ok(((s + t) - rhs).abs() / scale)
}

/// `Y = Σ_{W < |ω| < L} 1/ω` over the window's poles.
pub fn y_statistic(window: &ScalingWindow, w: f64) -> f64 {
    let l = window.cutoff;
    window
        .omega
        .iter()
        .filter(|o| o.abs() > w && o.abs() < l)
        .map(|o| 1.0 / o)
        .collect::<NeumaierSum>()
        .value()
}

/// Decision thresholds for [`classify_tail`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailThresholds {
    pub slope: f64,
    pub spread: f64,
    pub magnitude: f64,
    /// Fraction of ensemble members that must show a singular behavior.
    pub fraction: f64,
}

impl Default for TailThresholds {
    fn default() -> Self {
        Self {
            slope: 0.5,
            spread: 0.5,
            magnitude: 10.0,
            fraction: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TailKind {
    RegularLinear {
        a: f64,
        b: f64,
    },
    SingularPlus,
    SingularMinus,
    SingularWithTransition {
        tau: f64,
    },
    /// The thresholds are straddled; no case is claimed.
    Ambiguous,
}

impl TailKind {
    pub fn name(&self) -> &'static str {
        match self {
            TailKind::RegularLinear { .. } => "regular_linear",
            TailKind::SingularPlus => "singular_plus",
            TailKind::SingularMinus => "singular_minus",
            TailKind::SingularWithTransition { .. } => "singular_transition",
            TailKind::Ambiguous => "ambiguous",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailClassification {
    pub kind: TailKind,
    pub median_slope: f64,
    pub median_intercept: f64,
    /// Half the interquartile range of the per-member slopes.
    pub slope_spread: f64,
    /// Half the interquartile range of the per-member intercepts.
    pub intercept_spread: f64,
    pub fraction_plus: f64,
    pub fraction_minus: f64,
    pub fraction_transition: f64,
    pub members: usize,
    pub thresholds: TailThresholds,
}

/// Least-squares `(slope, intercept)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Sample quantile by linear interpolation (`q ∈ [0, 1]`); input need not be
/// sorted.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

pub fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

fn half_iqr(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    0.5 * (quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25))
}

/// First zero crossing of `r` on the grid, by linear interpolation.
fn zero_crossing(grid: &[f64], r: &[f64]) -> Option<f64> {
    (1..grid.len()).find_map(|i| {
        let (a, b) = (r[i - 1], r[i]);
        if a == 0.0 {
            Some(grid[i - 1])
        } else if a.signum() != b.signum() {
            Some(grid[i - 1] + (grid[i] - grid[i - 1]) * a / (a - b))
        } else {
            None
        }
    })
}

/// Standard grid: `points` equispaced on `[−W, W]`, shifted by `jitter`.
pub fn classification_grid(w: f64, points: usize, jitter: f64) -> Vec<f64> {
    (0..points)
        .map(|i| -w + 2.0 * w * i as f64 / (points - 1) as f64 + jitter)
        .collect()
}

/// Classifies an ensemble of tail functions, each sampled on its own grid
/// over `[−W, W]`.
pub fn classify_tail(
    grids: &[Vec<f64>],
    values: &[Vec<f64>],
    thresholds: TailThresholds,
) -> Result<TailClassification> {
    const MIN_MEMBERS: usize = 50;
    const MIN_POINTS: usize = 9;
    if grids.len() != values.len() {
        return Err(Error::Domain(
            "grid and value ensembles differ in size".into(),
        ));
    }
    if values.len() < MIN_MEMBERS {
        return Err(Error::InsufficientEnsemble {
            need: MIN_MEMBERS,
            got: values.len(),
        });
    }
    let n = values.len();
    let mut slopes = Vec::with_capacity(n);
    let mut intercepts = Vec::with_capacity(n);
    let mut crossings = Vec::new();
    let (mut plus, mut minus, mut transition) = (0usize, 0usize, 0usize);
    for (g, r) in grids.iter().zip(values) {
        if g.len() < MIN_POINTS || g.len() != r.len() {
            return Err(Error::Domain(format!(
                "each member needs at least {MIN_POINTS} grid points"
            )));
        }
        let (a, b) = linear_fit(g, r);
        slopes.push(a);
        intercepts.push(b);
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo > thresholds.magnitude {
            plus += 1;
        }
        if hi < -thresholds.magnitude {
            minus += 1;
        }
        if lo < 0.0 && hi > 0.0 && a.abs() > thresholds.magnitude {
            transition += 1;
            if let Some(t) = zero_crossing(g, r) {
                crossings.push(t);
            }
        }
    }
    let frac = |k: usize| k as f64 / n as f64;
    let median_slope = median(&slopes);
    let median_intercept = median(&intercepts);
    let slope_spread = half_iqr(&slopes);
    let intercept_spread = half_iqr(&intercepts);
    let kind = if frac(plus) >= thresholds.fraction {
        TailKind::SingularPlus
    } else if frac(minus) >= thresholds.fraction {
        TailKind::SingularMinus
    } else if frac(transition) >= thresholds.fraction {
        TailKind::SingularWithTransition {
            tau: median(&crossings),
        }
    } else if median_slope.abs() <= thresholds.slope
        && intercept_spread <= thresholds.spread
        && median_intercept.abs() <= thresholds.magnitude
    {
        TailKind::RegularLinear {
            a: median_slope,
            b: median_intercept,
        }
    } else {
        TailKind::Ambiguous
    };
    Ok(TailClassification {
        kind,
        median_slope,
        median_intercept,
        slope_spread,
        intercept_spread,
        fraction_plus: frac(plus),
        fraction_minus: frac(minus),
        fraction_transition: frac(transition),
        members: n,
        thresholds,
    })
}

/// Worst ratio of the chord-slope deviation to the bound
/// `(6W/L)·(R(u₁) − R(u₀))/(u₁ − u₀)` over all grid triples.
pub fn interpolation_check(grid: &[f64], r: &[f64], w: f64, l: f64) -> Result<f64> {
    if !(w < l / 10.0) {
        return Err(Error::Domain(format!("need W < L/10, got W={w}, L={l}")));
    }
    if grid.len() != r.len() || grid.len() < 3 {
        return Err(Error::Domain("need at least three grid points".into()));
    }
    if let Some(i) = (1..grid.len()).find(|&i| !(grid[i] > grid[i - 1]) || r[i] < r[i - 1]) {
        return Err(Error::Monotonicity(i));
    }
    let k = 6.0 * w / l;
    let mut worst = 0.0f64;
    let n = grid.len();
    for i0 in 0..n {
        for i1 in 0..n {
            if i1 == i0 {
                continue;
            }
            let chord = (r[i1] - r[i0]) / (grid[i1] - grid[i0]);
            let bound = k * chord;
            for i in 0..n {
                if i == i0 || i == i1 {
                    continue;
                }
                let dev = ((r[i] - r[i0]) / (grid[i] - grid[i0]) - chord).abs();
                let ratio = if bound > 0.0 {
                    dev / bound
                } else if dev == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(ratio);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sample_potential_indexed;
    use crate::secular::{solve_spectrum_window, DEFAULT_TOL};

    fn params() -> ModelParams {
        ModelParams::new(100, 1.0, 0).unwrap()
    }

    #[test]
    fn mean_gap_examples() {
        let p = params();
        let d = mean_gap(&p, 0.0).unwrap();
        assert!((d - 0.008_259_468_366_189_925).abs() < 1e-15);
        assert!(mean_gap(&p, 1.0).is_err());
        let d = mean_gap(&p, 1.0 / 2f64.sqrt()).unwrap();
        let expect = (2.0 * std::f64::consts::PI).sqrt() * p.kappa / 10.0;
        assert!((d - expect).abs() < 1e-15);
    }

    fn synthetic_window(shift: f64) -> (PotentialSample, ScalingWindow) {
        let p = params();
        let c = 0.1;
        let delta = mean_gap(&p, c).unwrap();
        // Three poles near the center and the rest far away.
        let mut scaled = vec![c - 1.5 * delta, c - 0.5 * delta, c + 0.5 * delta];
        scaled.extend((0..97).map(|i| 5.0 + i as f64));
        let s = PotentialSample::from_scaled(p, &scaled).unwrap();
        let center = c + shift * delta;
        let spec = crate::solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        let w = ScalingWindow::build(&s, &spec, center, delta, 3.0, 3.0).unwrap();
        (s, w)
    }

    #[test]
    fn labeling_rule() {
        let (_, w) = synthetic_window(0.0);
        for (n, want) in [(-1, -1.5), (0, -0.5), (1, 0.5)] {
            assert!((w.omega_by_label(n).unwrap() - want).abs() < 1e-12);
        }
        for (n, &u) in w.u_labels().zip(&w.u) {
            let right = w.omega_by_label(n).unwrap_or(f64::INFINITY);
            let left = w.omega_by_label(n - 1).unwrap_or(f64::NEG_INFINITY);
            assert!(left < u && u <= right, "label {n}: {left} < {u} <= {right}");
        }
        // Shifting the center by +Δ relabels: old ω₁ becomes ω₀ = −0.5.
        let (_, w2) = synthetic_window(1.0);
        assert!((w2.omega_by_label(0).unwrap() + 0.5).abs() < 1e-12);
        assert!((w2.omega_by_label(-1).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn coverage_is_enforced() {
        let p = ModelParams::new(1000, 1.0, 2).unwrap();
        let s = sample_potential_indexed(p, 0);
        let spec = solve_spectrum_window(&s, -0.002, 0.002, DEFAULT_TOL).unwrap();
        assert!(matches!(
            build_window(&s, &spec, 0.0, 10.0, 5.0),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn split_and_tail_examples() {
        let p = ModelParams::new(2, 1.0, 0).unwrap();
        let delta = mean_gap(&p, 0.0).unwrap();
        // One pole at ω = 1, the other far outside the cutoff.
        let s = PotentialSample::from_scaled(p, &[delta, 1e3]).unwrap();
        let spec = crate::solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        let w = ScalingWindow::build(&s, &spec, 0.0, delta, 1.0, 5.0).unwrap();
        let (st, tt) = split_secular(&w, &s, 0.0).unwrap();
        assert!((st - 1.0).abs() < 1e-14);
        assert!((tt - delta / 1e3).abs() < 1e-15);

        let s = PotentialSample::from_scaled(p, &[-2.0 * delta, 2.0 * delta]).unwrap();
        let spec = crate::solve_spectrum_full(&s, DEFAULT_TOL).unwrap();
        let w = ScalingWindow::build(&s, &spec, 0.0, delta, 1.0, 5.0).unwrap();
        let (st, tt) = split_secular(&w, &s, 0.0).unwrap();
        assert_eq!(st, 0.0);
        assert_eq!(tt, 0.0);
        assert_eq!(tail_function(&w, &s, 0.3).unwrap(), -w.m_delta);
    }

    #[test]
    fn y_statistic_cancels_symmetric_poles() {
        let (_, mut w) = synthetic_window(0.0);
        w.omega = vec![-2.0, -0.5, 0.5, 2.0];
        assert_eq!(y_statistic(&w, 1.0), 0.0);
        w.omega = vec![-0.5, 0.5];
        assert_eq!(y_statistic(&w, 1.0), 0.0);
    }

    #[test]
    fn interpolation_examples() {
        let grid = classification_grid(1.0, 17, 0.0);
        let lin: Vec<f64> = grid.iter().map(|u| 3.0 * u + 1.0).collect();
        assert!(interpolation_check(&grid, &lin, 1.0, 20.0).unwrap() < 1e-12);
        let l = 40.0;
        let w = l / 20.0;
        let grid = classification_grid(w, 17, 0.0);
        let r: Vec<f64> = grid.iter().map(|u| 1.0 / (2.0 * l - u)).collect();
        assert!(interpolation_check(&grid, &r, w, l).unwrap() <= 1.0);
        assert!(interpolation_check(&grid, &r, 5.0, l).is_err());
        let dec: Vec<f64> = grid.iter().map(|u| -u).collect();
        assert!(matches!(
            interpolation_check(&grid, &dec, w, l),
            Err(Error::Monotonicity(_))
        ));
    }

    #[test]
    fn classification_of_synthetic_ensembles() {
        let grid = classification_grid(1.0, 17, 0.0);
        let grids = vec![grid.clone(); 60];
        let plus: Vec<Vec<f64>> = (0..60)
            .map(|i| grid.iter().map(|u| 50.0 + u + i as f64 * 0.1).collect())
            .collect();
        let k = classify_tail(&grids, &plus, TailThresholds::default()).unwrap();
        assert_eq!(k.kind, TailKind::SingularPlus);
        let minus: Vec<Vec<f64>> = plus
            .iter()
            .map(|r| r.iter().map(|v| -v - 100.0).collect())
            .collect();
        assert_eq!(
            classify_tail(&grids, &minus, TailThresholds::default())
                .unwrap()
                .kind,
            TailKind::SingularMinus
        );
        let trans: Vec<Vec<f64>> = (0..60)
            .map(|_| grid.iter().map(|u| 100.0 * (u - 0.2)).collect())
            .collect();
        match classify_tail(&grids, &trans, TailThresholds::default())
            .unwrap()
            .kind
        {
            TailKind::SingularWithTransition { tau } => assert!((tau - 0.2).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        assert!(classify_tail(&grids[..10], &trans[..10], TailThresholds::default()).is_err());
    }
}
