//! Localization statistics of eigenfunctions, distributional comparison
//! metrics, and the hybridization heuristic.

use serde::{Deserialize, Serialize};

use crate::hilbert::rho_hat;
use crate::model::PotentialSample;
use crate::scaling::{gap_scale, ScalingWindow};
use crate::summation::NeumaierSum;
use crate::{Error, Result};

/// `2·√(p(1−p)/n)`, with `p` clamped to `[0, 1]`.
pub fn binomial_slack(p: f64, n: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    2.0 * (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormProfile {
    pub ell1: f64,
    pub ell2: f64,
    pub ell_inf: f64,
    pub ratio21: f64,
    pub ratio11: f64,
    /// Squared peak.
    pub head_sq: f64,
    /// Remaining poles inside the cutoff.
    pub body_sq: f64,
    /// Poles outside the cutoff.
    pub tail_sq: f64,
}

impl NormProfile {
    /// Builds a profile from inverse distances `1/|ω_k − u|`, where `peak`
    /// indexes the nearest pole and `inside[k]` says whether `|ω_k| ≤ L`.
    fn from_terms(terms: impl Iterator<Item = (f64, bool, bool)>) -> Self {
        let mut l1 = NeumaierSum::new();
        let mut body = NeumaierSum::new();
        let mut tail = NeumaierSum::new();
        let mut head_sq = 0.0;
        let mut ell_inf = 0.0f64;
        for (r, is_peak, inside) in terms {
            l1.add(r);
            let sq = r * r;
            if is_peak {
                head_sq = sq;
            } else if inside {
                body.add(sq);
            } else {
                tail.add(sq);
            }
            ell_inf = ell_inf.max(r);
        }
        let (body_sq, tail_sq) = (body.value(), tail.value());
        let ell2 = (head_sq + body_sq + tail_sq).sqrt();
        let ell1 = l1.value();
        Self {
            ell1,
            ell2,
            ell_inf,
            ratio21: ell2 / ell_inf,
            ratio11: ell1 / ell_inf,
            head_sq,
            body_sq,
            tail_sq,
        }
    }
}

/// Norm profile of the eigenfunction with label `n` in rescaled units,
/// `ψ(ω_k) = 1/(ω_k − u_n)`, split at the window's cutoff.
pub fn norm_profile(
    window: &ScalingWindow,
    sample: &PotentialSample,
    n: i64,
) -> Result<NormProfile> {
    let u = window.u_by_label(n).ok_or(Error::MissingLabel(n))?;
    let (dl, dr) = window.u_gaps[(n - window.u_first_label) as usize];
    // Sorted rank of the pole right of u_n.
    let gap = n + window.zero_rank;
    let peak_rank = if dl <= dr { gap - 1 } else { gap };
    let (lo, hi) = window.cutoff_ranks;
    let e = window.center + u * window.delta;
    let terms = sample.sorted_scaled.iter().enumerate().map(|(k, &p)| {
        let k = k as i64;
        let d = if k == gap - 1 {
            dl
        } else if k == gap {
            dr
        } else {
            ((p - e) / window.delta).abs()
        };
        let inside = (lo as i64..hi as i64).contains(&k);
        (1.0 / d, k == peak_rank, inside)
    });
    Ok(NormProfile::from_terms(terms))
}

/// Norm profile of `x ↦ 1/(v − u)` for an explicit finite set of rescaled
/// poles (ascending) split at `cutoff`.
pub fn norm_profile_points(poles: &[f64], u: f64, cutoff: f64) -> Result<NormProfile> {
    if poles.is_empty() {
        return Err(Error::Empty("no poles"));
    }
    let peak = poles
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - u).abs().total_cmp(&(b.1 - u).abs()))
        .map(|(k, _)| k)
        .unwrap();
    if poles[peak] == u {
        return Err(Error::Pole { energy: u, pole: u });
    }
    Ok(NormProfile::from_terms(poles.iter().enumerate().map(
        |(k, &p)| (1.0 / (p - u).abs(), k == peak, p.abs() <= cutoff),
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipationRatio {
    pub q: f64,
    pub p_q: f64,
    /// `ℓ∞/ℓ²`.
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ParticipationRatio {
    /// `r^{2q} ≤ P_q ≤ r^{2(q−1)}` up to a few ulps of rounding; the upper
    /// bound is only asserted for `q > 1`.
    pub fn sandwich_holds(&self) -> bool {
        let slack = 1e-12;
        let lower_ok = self.lower <= self.p_q * (1.0 + slack);
        let upper_ok = self.q <= 1.0 || self.p_q <= self.upper * (1.0 + slack);
        lower_ok && upper_ok
    }
}

/// `P_q = Σ|ψ|^{2q} / (Σ|ψ|²)^q`, evaluated after scaling by the peak.
pub fn participation_ratio(values: &[f64], q: f64) -> Result<ParticipationRatio> {
    if !(q > 0.5) {
        return Err(Error::Domain(format!("q must exceed 1/2, got {q}")));
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return Err(Error::Empty("function vanishes identically"));
    }
    let mut s2 = NeumaierSum::new();
    let mut sq = NeumaierSum::new();
    for v in values {
        let x = (v.abs() / peak).powi(2);
        s2.add(x);
        sq.add(x.powf(q));
    }
    let s2 = s2.value();
    let p_q = sq.value() / s2.powf(q);
    let r = 1.0 / s2.sqrt();
    Ok(ParticipationRatio {
        q,
        p_q,
        r,
        lower: r.powf(2.0 * q),
        upper: r.powf(2.0 * (q - 1.0)),
    })
}

/// Fraction of `ℓ²` mass outside the `d` largest sites, for each `d`.
pub fn p_vol_curve(values: &[f64], ds: &[usize]) -> Result<Vec<f64>> {
    let mut sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sq.iter().sum();
    if total == 0.0 {
        return Err(Error::Empty("function vanishes identically"));
    }
    Ok(ds
        .iter()
        .map(|&d| {
            let rest: NeumaierSum = sq.iter().skip(d).copied().collect();
            rest.value() / total
        })
        .collect())
}

/// A closed subset of the line: finitely many points and closed intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClosedSet {
    pub points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

impl ClosedSet {
    pub fn from_points(points: &[f64]) -> Self {
        Self {
            points: points.to_vec(),
            intervals: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        let p = self.points.iter().map(|&p| (p - x).abs());
        let i = self
            .intervals
            .iter()
            .map(|&(a, b)| (a - x).max(x - b).max(0.0));
        p.chain(i).fold(f64::INFINITY, f64::min)
    }
}

/// Largest distance from a point of `b` to the finite sorted set `a`.
fn sup_distance_to_finite(b: &ClosedSet, a: &[f64]) -> f64 {
    let dist = |y: f64| {
        let k = a.partition_point(|&x| x < y);
        let mut d = f64::INFINITY;
        if k < a.len() {
            d = d.min(a[k] - y);
        }
        if k > 0 {
            d = d.min(y - a[k - 1]);
        }
        d
    };
    let mut worst = b.points.iter().map(|&y| dist(y)).fold(0.0, f64::max);
    for &(lo, hi) in &b.intervals {
        // The distance to `a` is piecewise linear on [lo, hi]; its maxima sit
        // at the endpoints or at midpoints between consecutive elements.
        worst = worst.max(dist(lo)).max(dist(hi));
        for w in a.windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            if lo < m && m < hi {
                worst = worst.max(dist(m));
            }
        }
    }
    worst
}

/// Hausdorff distance between a finite set and a closed set.
pub fn hausdorff_distance(a: &[f64], b: &ClosedSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("Hausdorff distance of an empty set"));
    }
    let mut sorted = a.to_vec();
    sorted.sort_by(f64::total_cmp);
    let forward = a.iter().map(|&x| b.distance_to(x)).fold(0.0, f64::max);
    Ok(forward.max(sup_distance_to_finite(b, &sorted)))
}

/// Two-sample Kolmogorov–Smirnov statistic of sorted samples.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("KS distance of an empty sample"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample KS statistic of a sorted sample against a continuous CDF.
pub fn ks_distance_cdf<F: Fn(f64) -> f64>(a: &[f64], cdf: F) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Empty("KS distance of an empty sample"));
    }
    let n = a.len() as f64;
    Ok(a.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    }))
}

/// Asymptotic 95% two-sample critical value, `1.36·√(2/n)` with `n` the
/// smaller sample size.
pub fn ks_critical_95(n: usize) -> f64 {
    1.36 * (2.0 / n as f64).sqrt()
}

/// `a(max V − a) + ½ ln(4π ln M)` with `a = √(2 ln M)`: asymptotically
/// standard Gumbel.
pub fn gumbel_rescale(max_v: f64, m: usize) -> f64 {
    let ln_m = (m as f64).ln();
    let a = (2.0 * ln_m).sqrt();
    a * (max_v - a) + 0.5 * (4.0 * std::f64::consts::PI * ln_m).ln()
}

pub fn gumbel_cdf(u: f64) -> f64 {
    (-(-u).exp()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunnelingResult {
    pub tau: f64,
    /// `|1 − (1/M)Σ_{n≠i,j} 1/(κV_n − E)|⁻¹`.
    pub boost: f64,
    /// `M·Δ(E)·|1 − ρ̂(E)|`.
    pub criterion: f64,
    /// Order of the fluctuation correction, `√(ln M)/(λ M^{(E/λ)²})`,
    /// reported separately because its constant is unknown.
    pub fluctuation: f64,
}

/// Pairwise tunneling amplitude between the sites `i` and `j` at energy `e`.
pub fn tunneling_amplitude(
    sample: &PotentialSample,
    i: usize,
    j: usize,
    e: f64,
) -> Result<TunnelingResult> {
    let m = sample.m();
    if i == j || i >= m || j >= m {
        return Err(Error::Domain(format!(
            "need distinct sites below {m}, got {i}, {j}"
        )));
    }
    let kappa = sample.kappa();
    let mut sum = NeumaierSum::new();
    for (n, &v) in sample.raw_values.iter().enumerate() {
        if n == i || n == j {
            continue;
        }
        let d = kappa * v - e;
        if d == 0.0 {
            return Err(Error::Pole {
                energy: e,
                pole: kappa * v,
            });
        }
        sum.add(1.0 / d);
    }
    let mf = m as f64;
    let boost = 1.0 / (1.0 - sum.value() / mf).abs();
    let lambda = sample.params.lambda;
    let delta = gap_scale(&sample.params, e);
    Ok(TunnelingResult {
        tau: boost / mf,
        boost,
        criterion: mf * delta * (1.0 - rho_hat(e, kappa)).abs(),
        fluctuation: mf.ln().sqrt() / (lambda * mf.powf((e / lambda).powi(2))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationPoint {
    pub tau: f64,
    pub empirical: f64,
    /// Bound evaluated at the calibrated constant.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub members: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// `E|dT/du|`.
    pub mean_slope: f64,
    pub cutoff: f64,
    /// Largest `c` for which `P(|T − E T| ≥ τ) ≤ 2 exp(−cτ min(τ/E|T'|, L))`
    /// holds at every grid point.
    pub c: f64,
    pub points: Vec<ConcentrationPoint>,
}

pub const MIN_CONCENTRATION_ENSEMBLE: usize = 1000;

/// Calibrates the exponential concentration constant from samples of
/// `T(u, L)` and of `|dT/du|` at the same `u`.
pub fn concentration_check(
    values: &[f64],
    slopes: &[f64],
    cutoff: f64,
    tau_grid: &[f64],
) -> Result<ConcentrationReport> {
    if values.len() < MIN_CONCENTRATION_ENSEMBLE || slopes.len() != values.len() {
        return Err(Error::InsufficientEnsemble {
            need: MIN_CONCENTRATION_ENSEMBLE,
            got: values.len().min(slopes.len()),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<NeumaierSum>().value() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mean_slope = slopes.iter().map(|s| s.abs()).sum::<f64>() / n;
    let exponent = |tau: f64| tau * (tau / mean_slope).min(cutoff);
    let empirical: Vec<f64> = tau_grid
        .iter()
        .map(|&t| values.iter().filter(|v| (*v - mean).abs() >= t).count() as f64 / n)
        .collect();
    let c = tau_grid
        .iter()
        .zip(&empirical)
        .filter(|(&t, &p)| t > 0.0 && p > 0.0)
        .map(|(&t, &p)| (2.0 / p).ln() / exponent(t))
        .fold(f64::INFINITY, f64::min);
    let points = tau_grid
        .iter()
        .zip(&empirical)
        .map(|(&tau, &p)| ConcentrationPoint {
            tau,
            empirical: p,
            bound: if c.is_finite() {
                2.0 * (-c * exponent(tau)).exp()
            } else {
                2.0
            },
        })
        .collect();
    Ok(ConcentrationReport {
        members: values.len(),
        mean,
        std_dev: var.sqrt(),
        mean_slope,
        cutoff,
        c,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    #[test]
    fn profile_examples() {
        let p = norm_profile_points(&[1.0], 0.0, 5.0).unwrap();
        assert_eq!((p.head_sq, p.body_sq, p.ratio21), (1.0, 0.0, 1.0));
        let p = norm_profile_points(&[-1.0, 1.0], 0.0, 5.0).unwrap();
        assert_eq!((p.head_sq, p.body_sq), (1.0, 1.0));
        assert!((p.ell2 - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.ratio21 - 2f64.sqrt()).abs() < 1e-15);
        let p = norm_profile_points(&[-1.0, 1.0, 10.0], 0.0, 5.0).unwrap();
        assert!((p.tail_sq - 0.01).abs() < 1e-17);
    }

    #[test]
    fn participation_examples() {
        let delta = participation_ratio(&[0.0, 3.0, 0.0], 2.0).unwrap();
        assert_eq!(delta.p_q, 1.0);
        let flat = participation_ratio(&[0.5; 100], 2.0).unwrap();
        assert!((flat.p_q - 0.01).abs() < 1e-15);
        assert!(flat.sandwich_holds() && delta.sandwich_holds());
        assert!(participation_ratio(&[0.0, 0.0], 2.0).is_err());
    }

    #[test]
    fn p_vol_examples() {
        let c = p_vol_curve(&[3.0, 0.0, 4.0], &[0, 1, 2]).unwrap();
        assert_eq!(c, vec![1.0, 9.0 / 25.0, 0.0]);
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(
            hausdorff_distance(&[0.0], &ClosedSet::from_points(&[0.0])).unwrap(),
            0.0
        );
        let b = ClosedSet {
            points: vec![-1.0],
            intervals: vec![(-0.5, 0.5)],
        };
        let d = hausdorff_distance(&[-1.0, 0.3], &b).unwrap();
        assert!((d - 0.65).abs() < 1e-15);
        // Brute force over a fine discretization of B.
        let brute = (0..=100_000)
            .map(|k| -0.5 + k as f64 * 1e-5)
            .chain([-1.0])
            .map(|y| (y + 1.0).abs().min((y - 0.3).abs()))
            .fold(0.0, f64::max);
        assert!((d - brute).abs() < 1e-5);
        assert!(hausdorff_distance(&[], &b).is_err());
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_distance(&[0.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(ks_distance(&[0.0, 1.0], &[1.0]).unwrap(), 0.5);
        let d = ks_distance_cdf(&[0.5], |x| x).unwrap();
        assert_eq!(d, 0.5);
        assert!((ks_critical_95(1000) - 0.0608).abs() < 1e-3);
    }

    #[test]
    fn gumbel_helpers() {
        assert!((gumbel_cdf(0.0) - (-1f64).exp()).abs() < 1e-16);
        let m = 100_000;
        let a = (2.0 * (m as f64).ln()).sqrt();
        let shift = 0.5 * (4.0 * std::f64::consts::PI * (m as f64).ln()).ln();
        assert!((gumbel_rescale(a, m) - shift).abs() < 1e-14);
    }

    #[test]
    fn tunneling_three_sites() {
        let p = ModelParams::new(3, 1.0, 0).unwrap();
        let s = PotentialSample::from_raw(p, vec![0.0, 0.0, 0.0]).unwrap();
        let t = tunneling_amplitude(&s, 0, 1, -0.5).unwrap();
        assert!((t.tau - 1.0).abs() < 1e-15);
        assert!(tunneling_amplitude(&s, 1, 1, -0.5).is_err());
        assert!(matches!(
            tunneling_amplitude(&s, 0, 1, 0.0),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn concentration_trivial_tau() {
        let v: Vec<f64> = (0..2000)
            .map(|k| ((k * 7919) % 2000) as f64 / 2000.0 - 0.5)
            .collect();
        let s = vec![1.0; 2000];
        let r = concentration_check(&v, &s, 5.0, &[0.0, 0.1, 0.3]).unwrap();
        assert_eq!(r.points[0].bound, 2.0);
        assert!(r
            .points
            .iter()
            .all(|p| p.empirical <= p.bound * (1.0 + 1e-12)));
        assert!(concentration_check(&v[..10], &s[..10], 5.0, &[0.1]).is_err());
    }
}
