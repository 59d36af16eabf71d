//! Roots of `g(x) = Σ_i 1/(p_i − x) − target` between consecutive sorted
//! poles `p`.
//!
//! `g` increases from −∞ to +∞ across every gap, so each gap holds exactly
//! one root. Two ingredients keep this fast and accurate:
//!
//! * Gaps are grouped into leaves of `LEAF_SIZE` consecutive gaps. Poles far
//!   from a leaf (at least `NEAR_FACTOR` leaf radii from its center) enter
//!   through Taylor expansions about the center, one for each side, so an
//!   evaluation touches only the few hundred nearby poles. A leaf's field
//!   depends only on the poles and the leaf index, which makes windowed and
//!   full solves bitwise identical.
//! * The iteration runs in the offset `s` from the nearer bracketing pole,
//!   so roots lying extremely close to a pole keep full relative accuracy in
//!   their distance to it. Steps come from the two-pole rational model
//!   ("middle way"), safeguarded by a bracket.

use crate::summation::NeumaierSum;
use crate::{Error, Result};

pub(crate) const LEAF_SIZE: usize = 64;
const NEAR_FACTOR: f64 = 3.0;
const MAX_TERMS: usize = 40;
const MAX_ITER: usize = 300;

/// Root of gap `gap` (between poles `gap − 1` and `gap`), or of the region
/// below the smallest pole when `gap == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GapRoot {
    pub gap: usize,
    /// Whether `offset` is measured from the left pole (otherwise the right).
    pub from_left: bool,
    pub offset: f64,
    /// Pole spacing of the gap; `+∞` below the smallest pole.
    pub width: f64,
}

impl GapRoot {
    pub fn value(&self, poles: &[f64]) -> f64 {
        if self.from_left {
            poles[self.gap - 1] + self.offset
        } else {
            poles[self.gap] - self.offset
        }
    }

    /// Distance to the left pole (`+∞` below the smallest pole).
    pub fn dist_left(&self) -> f64 {
        if self.from_left {
            self.offset
        } else {
            self.width - self.offset
        }
    }

    pub fn dist_right(&self) -> f64 {
        if self.from_left {
            self.width - self.offset
        } else {
            self.offset
        }
    }
}

#[derive(Debug, Clone)]
struct LeafField {
    center: f64,
    near_lo: usize,
    near_hi: usize,
    left: Vec<f64>,
    right: Vec<f64>,
}

/// Returns `(Σ a_n h^n, Σ n a_n h^{n−1})`.
#[inline]
fn taylor(coeffs: &[f64], h: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &a in coeffs.iter().rev() {
        d = d * h + v;
        v = v * h + a;
    }
    (v, d)
}

/// `a_n = Σ_i (p_i − c)^{−(n+1)}` for `n < terms`.
#[inline(always)]
fn far_moments_impl(poles: &[f64], c: f64, terms: usize) -> Vec<f64> {
    let mut acc = vec![[0.0f64; 8]; terms];
    let mut chunks = poles.chunks_exact(8);
    let step = |t: [f64; 8], acc: &mut [[f64; 8]]| {
        let mut pw = t;
        for a in acc.iter_mut() {
            for l in 0..8 {
                a[l] += pw[l];
                pw[l] *= t[l];
            }
        }
    };
    for ch in &mut chunks {
        let mut t = [0.0f64; 8];
        for l in 0..8 {
            t[l] = 1.0 / (ch[l] - c);
        }
        step(t, &mut acc);
    }
    let mut t = [0.0f64; 8];
    for (l, &p) in chunks.remainder().iter().enumerate() {
        t[l] = 1.0 / (p - c);
    }
    step(t, &mut acc);
    acc.into_iter()
        .map(|a| ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7])))
        .collect()
}

/// `(Σ 1/d_i, Σ 1/d_i²)` with `d_i = (p_i − origin) − shift`.
#[inline(always)]
fn near_sums_impl(poles: &[f64], origin: f64, shift: f64) -> (f64, f64) {
    let mut v = [0.0f64; 8];
    let mut d2 = [0.0f64; 8];
    let mut chunks = poles.chunks_exact(8);
    for ch in &mut chunks {
        for l in 0..8 {
            let r = 1.0 / ((ch[l] - origin) - shift);
            v[l] += r;
            d2[l] += r * r;
        }
    }
    for (l, &p) in chunks.remainder().iter().enumerate() {
        let r = 1.0 / ((p - origin) - shift);
        v[l] += r;
        d2[l] += r * r;
    }
    let fold = |a: [f64; 8]| ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7]));
    (fold(v), fold(d2))
}

// The kernels are compiled twice: once for the baseline target and once with
// AVX2 enabled, selected at run time. Both perform the same IEEE operations
// in the same order (no contraction into fused multiply-adds), so results are
// bitwise identical either way.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn far_moments_avx2(poles: &[f64], c: f64, terms: usize) -> Vec<f64> {
    far_moments_impl(poles, c, terms)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn near_sums_avx2(poles: &[f64], origin: f64, shift: f64) -> (f64, f64) {
    near_sums_impl(poles, origin, shift)
}

#[cfg(target_arch = "x86_64")]
fn has_avx2() -> bool {
    static AVX2: std::sync::OnceLock<bool> = std::sync::OnceLock::new();
    *AVX2.get_or_init(|| std::arch::is_x86_feature_detected!("avx2"))
}

fn far_moments(poles: &[f64], c: f64, terms: usize) -> Vec<f64> {
    #[cfg(target_arch = "x86_64")]
    if has_avx2() {
        // SAFETY: the CPU supports AVX2 (checked at run time).
        return unsafe { far_moments_avx2(poles, c, terms) };
    }
    far_moments_impl(poles, c, terms)
}

#[inline]
fn near_sums(poles: &[f64], origin: f64, shift: f64) -> (f64, f64) {
    #[cfg(target_arch = "x86_64")]
    if has_avx2() {
        // SAFETY: as above.
        return unsafe { near_sums_avx2(poles, origin, shift) };
    }
    near_sums_impl(poles, origin, shift)
}

struct Eval {
    g: f64,
    der_left: f64,
    der_right: f64,
}

pub(crate) struct GapSolver<'a> {
    poles: &'a [f64],
    target: f64,
    /// Relative tolerance on the pole offset.
    rel_tol: f64,
}

impl<'a> GapSolver<'a> {
    /// `tol` is applied relative to the offset of each root from its nearer
    /// pole (so the absolute error never exceeds `tol · gap / 2`); values
    /// below machine precision are raised to it.
    pub fn new(poles: &'a [f64], target: f64, tol: f64) -> Self {
        Self {
            poles,
            target,
            rel_tol: tol.clamp(2.0 * f64::EPSILON, 0.25),
        }
    }

    pub fn gap_count(&self) -> usize {
        self.poles.len().saturating_sub(1)
    }

    fn leaf_of_gap(gap: usize) -> usize {
        (gap - 1) / LEAF_SIZE
    }

    fn build_leaf(&self, leaf: usize) -> LeafField {
        let p = self.poles;
        let lo = leaf * LEAF_SIZE;
        let hi = ((leaf + 1) * LEAF_SIZE).min(p.len() - 1);
        let (a, b) = (p[lo], p[hi]);
        let rho = 0.5 * (b - a);
        let center = a + rho;
        let reach = NEAR_FACTOR * rho;
        let near_lo = p.partition_point(|&v| v <= center - reach).min(lo);
        let near_hi = p.partition_point(|&v| v < center + reach).max(hi + 1);

        let mut nearest_far = f64::INFINITY;
        if near_lo > 0 {
            nearest_far = nearest_far.min(center - p[near_lo - 1]);
        }
        if near_hi < p.len() {
            nearest_far = nearest_far.min(p[near_hi] - center);
        }
        let ratio = rho / nearest_far;
        let terms = if ratio > 0.0 {
            let t = (f64::EPSILON * 0.25).ln() / ratio.ln();
            (t.ceil() as usize + 1).clamp(1, MAX_TERMS)
        } else {
            1
        };
        LeafField {
            center,
            near_lo,
            near_hi,
            left: if near_lo > 0 {
                far_moments(&p[..near_lo], center, terms)
            } else {
                Vec::new()
            },
            right: if near_hi < p.len() {
                far_moments(&p[near_hi..], center, terms)
            } else {
                Vec::new()
            },
        }
    }

    /// Evaluates `g` at `x = origin + shift` for a point inside `gap`.
    fn eval(&self, f: &LeafField, gap: usize, origin: f64, shift: f64) -> Eval {
        let p = self.poles;
        let (vl, dl) = near_sums(&p[f.near_lo..gap], origin, shift);
        let (vr, dr) = near_sums(&p[gap..f.near_hi], origin, shift);
        let h = (origin - f.center) + shift;
        let (fl, fdl) = taylor(&f.left, h);
        let (fr, fdr) = taylor(&f.right, h);
        Eval {
            g: ((vl + fl) + (vr + fr)) - self.target,
            der_left: dl + fdl,
            der_right: dr + fdr,
        }
    }

    fn converged(&self, step: f64, s: f64) -> bool {
        step.abs() <= self.rel_tol * s
    }

    fn solve_in_leaf(&self, f: &LeafField, gap: usize) -> Result<GapRoot> {
        let p = self.poles;
        let (a, b) = (p[gap - 1], p[gap]);
        let width = b - a;
        let half = 0.5 * width;
        let mid = self.eval(f, gap, a, half);
        if mid.g == 0.0 {
            return Ok(GapRoot {
                gap,
                from_left: true,
                offset: half,
                width,
            });
        }
        let from_left = mid.g > 0.0;
        let (origin, sigma) = if from_left { (a, 1.0) } else { (b, -1.0) };

        // In the offset s the reflected function G(s) = σ·g(origin + σ s)
        // increases from −∞ at s = 0⁺; the bracket is (lo, hi] with G(hi) ≥ 0.
        let mut lo = 0.0f64;
        let mut hi = half;
        let mut s = half;
        let mut e = mid;
        for _ in 0..MAX_ITER {
            let big_g = sigma * e.g;
            let (d_origin, d_other) = if from_left {
                (e.der_left, e.der_right)
            } else {
                (e.der_right, e.der_left)
            };
            let b_o = s * s * d_origin;
            let b_t = (width - s) * (width - s) * d_other;
            let a_m = big_g + b_o / s - b_t / (width - s);
            let beta = a_m * width + b_o + b_t;
            let gamma = b_o * width;
            let disc = (beta * beta - 4.0 * a_m * gamma).max(0.0);
            let mut s_new = if beta > 0.0 {
                2.0 * gamma / (beta + disc.sqrt())
            } else {
                (beta - disc.sqrt()) / (2.0 * a_m)
            };
            if !(s_new > lo && s_new < hi) {
                s_new = bisect(lo, hi);
            }
            let step = s_new - s;
            s = s_new;
            if self.converged(step, s) {
                return Ok(GapRoot {
                    gap,
                    from_left,
                    offset: s,
                    width,
                });
            }
            e = self.eval(f, gap, origin, sigma * s);
            let big_g = sigma * e.g;
            if big_g == 0.0 {
                break;
            }
            if big_g < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            if hi - lo <= self.rel_tol * hi {
                break;
            }
        }
        if !(s > 0.0 && s < width) {
            return Err(Error::NonConvergence {
                gap,
                width: hi - lo,
            });
        }
        Ok(GapRoot {
            gap,
            from_left,
            offset: s,
            width,
        })
    }

    /// Solves every gap in `gaps` (a range of gap indices, each ≥ 1).
    pub fn solve_gaps(&self, gaps: std::ops::Range<usize>) -> Result<Vec<GapRoot>> {
        let mut out = Vec::with_capacity(gaps.len());
        let mut k = gaps.start.max(1);
        let end = gaps.end.min(self.gap_count() + 1);
        while k < end {
            let leaf = Self::leaf_of_gap(k);
            let leaf_end = ((leaf + 1) * LEAF_SIZE + 1).min(end);
            let field = self.build_leaf(leaf);
            for gap in k..leaf_end {
                out.push(self.solve_in_leaf(&field, gap)?);
            }
            k = leaf_end;
        }
        Ok(out)
    }

    /// The root below the smallest pole. It exists only for `target > 0`;
    /// `start` is an initial guess for its distance to that pole.
    pub fn solve_below(&self, start: f64) -> Result<GapRoot> {
        let p = self.poles;
        if !(self.target > 0.0) {
            return Err(Error::Domain(
                "no root below the smallest pole for a non-positive level".into(),
            ));
        }
        let p0 = p[0];
        // G(s) = −g(p0 − s): increasing in s from −∞ to target.
        let eval = |s: f64| -> (f64, f64) {
            let mut v = NeumaierSum::new();
            let mut d = 0.0;
            for &q in p {
                let r = 1.0 / ((q - p0) + s);
                v.add(r);
                d += r * r;
            }
            (self.target - v.value(), d)
        };
        let mut lo = 0.0f64;
        let mut hi = start.max(f64::MIN_POSITIVE);
        let (mut g_hi, mut d_hi) = eval(hi);
        while g_hi <= 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NonConvergence {
                    gap: 0,
                    width: f64::INFINITY,
                });
            }
            (g_hi, d_hi) = eval(hi);
        }
        let (mut s, mut g, mut d) = (hi, g_hi, d_hi);
        for _ in 0..MAX_ITER {
            let b_o = s * s * d;
            let a_m = g + b_o / s;
            let mut s_new = if a_m > 0.0 { b_o / a_m } else { f64::NAN };
            if !(s_new > lo && s_new < hi) {
                s_new = bisect(lo, hi);
            }
            let step = s_new - s;
            s = s_new;
            if self.converged(step, s) {
                break;
            }
            (g, d) = eval(s);
            if g == 0.0 {
                break;
            }
            if g < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            if hi - lo <= self.rel_tol * hi {
                break;
            }
        }
        Ok(GapRoot {
            gap: 0,
            from_left: false,
            offset: s,
            width: f64::INFINITY,
        })
    }
}

#[inline]
fn bisect(lo: f64, hi: f64) -> f64 {
    if lo == 0.0 {
        0.125 * hi
    } else if hi > 4.0 * lo {
        (lo * hi).sqrt()
    } else {
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_g(p: &[f64], target: f64, x: f64) -> f64 {
        p.iter().map(|q| 1.0 / (q - x)).sum::<f64>() - target
    }

    #[test]
    fn taylor_matches_direct_far_sum() {
        let far: Vec<f64> = (0..50).map(|i| 10.0 + i as f64 * 0.37).collect();
        let c = 0.3;
        let coeffs = far_moments(&far, c, 40);
        for &h in &[-1.0, 0.0, 0.5, 2.0] {
            let (v, d) = taylor(&coeffs, h);
            let x = c + h;
            let exact: f64 = far.iter().map(|p| 1.0 / (p - x)).sum();
            let exact_d: f64 = far.iter().map(|p| 1.0 / (p - x).powi(2)).sum();
            assert!((v - exact).abs() <= 1e-13 * exact.abs(), "{v} {exact}");
            assert!((d - exact_d).abs() <= 1e-12 * exact_d.abs());
        }
    }

    #[test]
    fn roots_of_a_uniform_grid() {
        let p: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01 - 5.0).collect();
        let solver = GapSolver::new(&p, 1000.0, 1e-14);
        let roots = solver.solve_gaps(1..1000).unwrap();
        assert_eq!(roots.len(), 999);
        for r in &roots {
            let x = r.value(&p);
            assert!(x > p[r.gap - 1] && x < p[r.gap]);
            // Residual relative to the local slope.
            let g = direct_g(&p, 1000.0, x);
            let slope: f64 = p.iter().map(|q| 1.0 / (q - x).powi(2)).sum();
            assert!(
                g.abs() / slope <= 1e-12,
                "gap {} residual {}",
                r.gap,
                g / slope
            );
        }
        let below = solver.solve_below(1.0).unwrap();
        let x = below.value(&p);
        assert!(x < p[0]);
        assert!(direct_g(&p, 1000.0, x).abs() < 1e-9);
    }

    #[test]
    fn roots_hugging_a_pole_keep_relative_accuracy() {
        // A huge target pushes every root against its right pole.
        let p = [0.0, 1.0, 2.0];
        let solver = GapSolver::new(&p, 1e12, 1e-15);
        let r = solver.solve_gaps(1..3).unwrap();
        for root in r {
            assert!(!root.from_left);
            // Σ ≈ 1/offset, so offset ≈ 1e-12 to relative ~1e-12.
            assert!((root.offset * 1e12 - 1.0).abs() < 1e-10, "{}", root.offset);
        }
    }
}
