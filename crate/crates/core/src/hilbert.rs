//! Principal-value Hilbert transform of the standard Gaussian density and
//! the reference energies where `ρ̂_M(E) = 1`.

use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate, QuadOptions};
use crate::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn gaussian_density(v: f64) -> f64 {
    (-0.5 * v * v).exp() * INV_SQRT_2PI
}

/// Dawson's integral `D(x) = e^{−x²} ∫₀ˣ e^{t²} dt`.
///
/// Below `|x| = 6` the series `e^{−x²} Σ x^{2n+1}/(n!(2n+1))` is used (all
/// terms positive, so no cancellation); above, the asymptotic expansion
/// `(1/2x) Σ (2n−1)!!/(2x²)ⁿ`, truncated at its smallest term.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 6.0 {
        let x2 = ax * ax;
        let mut term = ax; // x^{2n+1}/n!
        let mut sum = ax;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= x2 / n;
            let t = term / (2.0 * n + 1.0);
            sum += t;
            if t <= sum * 1e-17 {
                break;
            }
        }
        sum * (-x2).exp()
    } else {
        let y = 1.0 / (2.0 * ax * ax);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 0.0;
        loop {
            n += 1.0;
            let next = term * (2.0 * n - 1.0) * y;
            if next >= term || next < sum * 1e-17 {
                if next < term {
                    sum += next;
                }
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * ax)
    };
    v.copysign(x)
}

/// `H(ξ) = PV ∫ ϱ(v)/(v − ξ) dv = −√2 · D(ξ/√2)`.
pub fn gaussian_hilbert(xi: f64) -> f64 {
    -std::f64::consts::SQRT_2 * dawson(xi / std::f64::consts::SQRT_2)
}

/// Independent evaluation of `H(ξ)` as `∫₀^cutoff [ϱ(ξ+w) − ϱ(ξ−w)]/w dw`.
pub fn pv_quadrature_oracle(xi: f64, cutoff: f64, opts: QuadOptions) -> Result<f64> {
    if !(cutoff >= xi.abs() + 12.0) {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} must be at least |xi| + 12"
        )));
    }
    if xi == 0.0 {
        return Ok(0.0);
    }
    let a = xi.abs();
    // ϱ(a+w) − ϱ(a−w) = ϱ(a−w)·expm1(−2aw), free of cancellation.
    let f = |w: f64| {
        if w == 0.0 {
            -2.0 * a * gaussian_density(a)
        } else {
            gaussian_density(a - w) * (-2.0 * a * w).exp_m1() / w
        }
    };
    let pieces = cutoff.ceil() as usize;
    let r = integrate(f, 0.0, cutoff, pieces, opts)?;
    Ok(if xi < 0.0 { -r.value } else { r.value })
}

/// Default-configured oracle.
pub fn pv_oracle(xi: f64) -> Result<f64> {
    pv_quadrature_oracle(xi, xi.abs() + 14.0, QuadOptions::default())
}

/// `ρ̂_M(E) = (1/κ) H(E/κ)`.
pub fn rho_hat(e: f64, kappa: f64) -> f64 {
    gaussian_hilbert(e / kappa) / kappa
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEnergies {
    pub e_minus1: f64,
    pub e_zero: f64,
    pub kappa: f64,
}

impl ReferenceEnergies {
    /// Leading-order asymptotic for the lower root, `−1 − κ²`.
    pub fn asymptotic_minus1(&self) -> f64 {
        -1.0 - self.kappa * self.kappa
    }

    /// Small-`κ` estimate of the upper root from the slope `H'(0) = −1`.
    pub fn slope_estimate_zero(&self) -> f64 {
        -self.kappa * self.kappa
    }

    /// The same estimate with the slope `−2√π` instead of `−1`; reported
    /// for comparison only (it does not match the transform).
    pub fn alternative_estimate_zero(&self) -> f64 {
        -self.kappa * self.kappa / (2.0 * std::f64::consts::PI.sqrt())
    }
}

/// Bisection for `f(x) = 0` on `[lo, hi]` with a sign change, to machine
/// precision.
pub(crate) fn bisect_root<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    what: &str,
) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            what: format!("{what} (values {flo:e}, {fhi:e})"),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The two solutions of `ρ̂_M(E) = 1`, one near `−1` and one just below 0.
pub fn solve_reference_energies(kappa: f64) -> Result<ReferenceEnergies> {
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err(Error::Domain(format!(
            "reference energies are defined here for 0 < kappa <= 0.5, got {kappa}"
        )));
    }
    let k2 = kappa * kappa;
    let f = |e: f64| rho_hat(e, kappa) - 1.0;
    let describe = |lo: f64, hi: f64| {
        let profile: Vec<String> = (0..=8)
            .map(|i| {
                let e = lo + (hi - lo) * i as f64 / 8.0;
                format!("{e:.6}:{:.6}", f(e) + 1.0)
            })
            .collect();
        format!("rho_hat - 1; profile {}", profile.join(" "))
    };
    let (a, b) = (-1.0 - 4.0 * k2, -1.0);
    let e_minus1 = bisect_root(f, a, b, &describe(a, b))?;
    let (a, b) = (-4.0 * k2, 0.0);
    let e_zero = bisect_root(f, a, b, &describe(a, b))?;
    Ok(ReferenceEnergies {
        e_minus1,
        e_zero,
        kappa,
    })
}

/// Constants of the two-sided bound on `∫_{|u−v|≥δ} ϱ(u)/(u−v)² du`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntRhoConstants {
    pub c: f64,
    pub big_c: f64,
}

impl Default for IntRhoConstants {
    fn default() -> Self {
        Self {
            c: 0.05,
            big_c: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntRhoCheck {
    pub v: f64,
    pub delta: f64,
    pub integral: f64,
    pub lower: f64,
    pub upper: f64,
}

impl IntRhoCheck {
    pub fn holds(&self) -> bool {
        self.lower <= self.integral && self.integral <= self.upper
    }
}

/// `∫_{|u−v|≥δ} ϱ(u)/(u−v)² du = ∫_δ^∞ [ϱ(v+w) + ϱ(v−w)]/w² dw`.
pub fn intrho(v: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    let end = v.abs() + 40.0;
    let f = |w: f64| (gaussian_density(v + w) + gaussian_density(v - w)) / (w * w);
    let pieces = (end - delta).ceil() as usize;
    let body = integrate(f, delta, end, pieces, QuadOptions::default())?;
    // Beyond `end` the density factor is below e^{−800}.
    Ok(body.value)
}

pub fn intrho_bounds_check(v: f64, delta: f64, k: IntRhoConstants) -> Result<IntRhoCheck> {
    let integral = intrho(v, delta)?;
    let w = 1.0 / (1.0 + v.abs()).powi(2);
    Ok(IntRhoCheck {
        v,
        delta,
        integral,
        lower: k.c * w,
        upper: k.big_c * (gaussian_density(v) / delta + w),
    })
}

/// Tightest constants for which the bound holds on the given grid:
/// `(min_v I·(1+|v|)², max_v I/(ϱ(v)/δ + (1+|v|)^{−2}))`.
pub fn calibrate_intrho(vs: &[f64], deltas: &[f64]) -> Result<IntRhoConstants> {
    let mut c = f64::INFINITY;
    let mut big_c = 0.0f64;
    for &d in deltas {
        for &v in vs {
            let i = intrho(v, d)?;
            let w = 1.0 / (1.0 + v.abs()).powi(2);
            c = c.min(i / w);
            big_c = big_c.max(i / (gaussian_density(v) / d + w));
        }
    }
    Ok(IntRhoConstants { c, big_c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dawson_reference_values() {
        // D(1) and the maximum D(0.9241388730) = 0.5410442246.
        assert!((dawson(1.0) - 0.538_079_506_912_768_4).abs() < 1e-15);
        assert!((dawson(0.924_138_873_0) - 0.541_044_224_635_181).abs() < 1e-12);
        assert!((dawson(-2.0) + 0.301_340_388_923_791_97).abs() < 1e-15);
        assert!((dawson(6.0) - 0.084_542_688_974_543_85).abs() < 1e-16);
        assert_eq!(dawson(0.0), 0.0);
    }

    #[test]
    fn dawson_is_continuous_across_the_switch() {
        let below = dawson(6.0 - 1e-12);
        let above = dawson(6.0);
        assert!((below - above).abs() < 1e-13);
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(gaussian_hilbert(0.0), 0.0);
        assert!((gaussian_hilbert(10.0) + 0.101).abs() < 2e-4);
        assert!((gaussian_hilbert(0.1) + 0.0997).abs() < 1e-4);
    }

    #[test]
    fn oracle_matches_closed_form() {
        for &xi in &[0.1, 0.5, 1.0, 2.5, 7.0, 13.0, 40.0, -3.0] {
            let q = pv_oracle(xi).unwrap();
            let c = gaussian_hilbert(xi);
            assert!((q - c).abs() < 1e-10, "xi {xi}: {q} vs {c}");
        }
        assert_eq!(pv_oracle(0.0).unwrap(), 0.0);
        assert!(pv_quadrature_oracle(1.0, 5.0, QuadOptions::default()).is_err());
    }

    #[test]
    fn rho_hat_limits() {
        assert_eq!(rho_hat(0.0, 0.3), 0.0);
        assert!((rho_hat(-0.5, 0.05) - 2.0).abs() <= 0.05);
        let k: f64 = 0.1;
        assert!((rho_hat(-1.0 - k * k, k) - 1.0).abs() < 10.0 * k.powi(4));
    }

    #[test]
    fn reference_energies() {
        let r = solve_reference_energies(0.1).unwrap();
        assert!((r.e_minus1 + 1.01).abs() <= 5e-4);
        assert!((rho_hat(r.e_minus1, 0.1) - 1.0).abs() < 1e-10);
        assert!((rho_hat(r.e_zero, 0.1) - 1.0).abs() < 1e-10);
        assert!(r.e_minus1 < -1.0 && -1.0 < r.e_zero && r.e_zero < 0.0);
        // Slope −1 at the origin puts the upper root near −κ².
        assert!((r.e_zero + 0.01).abs() < 1e-3, "{}", r.e_zero);
        let r = solve_reference_energies(0.05).unwrap();
        assert!((r.e_minus1 + 1.0 + 0.0025).abs() <= 5.0 * 0.05f64.powi(4));
        assert!(solve_reference_energies(0.8).is_err());
    }

    #[test]
    fn intrho_examples() {
        let chk = intrho_bounds_check(0.0, 1.0, IntRhoConstants::default()).unwrap();
        assert!((chk.integral - INTRHO_V0_D1).abs() < 1e-10);
        assert!(chk.holds());
        let small = intrho(0.0, 0.01).unwrap();
        let ratio = small / (gaussian_density(0.0) / 0.01);
        assert!((1.5..=2.5).contains(&ratio), "{ratio}");
        assert!(intrho(0.0, 0.0).is_err());
    }

    // 2∫₁^∞ ϱ(u)/u² du = 2[ϱ(1) − (1 − Φ(1))], by parts.
    const INTRHO_V0_D1: f64 = 0.166_630_941_175_372_6;
}
