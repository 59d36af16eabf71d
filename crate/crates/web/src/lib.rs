//! wasm-bindgen entry points for the static demo in `www/`. Each returns a
//! JSON document; errors come back as strings so the page can show them.
//! Everything here is single-threaded and builds natively too.

use rankone::experiments::CenterSpec;
use rankone::hilbert::{gaussian_hilbert, rho_hat, solve_reference_energies};
use rankone::model::{sample_potential_indexed, ModelParams};
use rankone::scaling::{default_cutoff, gap_scale, tail_on_grid, ScalingWindow};
use rankone::seba::{sample_poisson, solve_seba};
use rankone::secular::{eigenfunction_norms, solve_spectrum_window, DEFAULT_TOL};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest system size the page may request; keeps one call well under a second.
pub const MAX_M: usize = 2_000_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Rescaled poles `ω` and eigenvalues `u` of one sample in the window
/// `|u| ≤ half_width` around `center` (a number, `E_hat_minus1` or
/// `E_hat_zero`), with each eigenvector's ℓ²/ℓ∞ ratio and the tail `R(u)`.
#[wasm_bindgen]
pub fn scaling_window(
    m: usize,
    lambda: f64,
    center: &str,
    seed: u64,
    half_width: f64,
) -> Result<String, String> {
    if !(2..=MAX_M).contains(&m) {
        return Err(format!("M must lie in [2, {MAX_M}]"));
    }
    if !(half_width > 0.0 && half_width <= 50.0) {
        return Err("half-width must lie in (0, 50]".into());
    }
    let params = ModelParams::new(m, lambda, seed).map_err(err)?;
    let spec: CenterSpec = center.parse().map_err(err)?;
    let e = spec.resolve(&params).map_err(err)?;
    let delta = gap_scale(&params, e);
    let sample = sample_potential_indexed(params, 0);
    let margin = (half_width + 2.0) * delta;
    let spectrum =
        solve_spectrum_window(&sample, e - margin, e + margin, DEFAULT_TOL).map_err(err)?;
    let window = ScalingWindow::build(&sample, &spectrum, e, delta, half_width, default_cutoff(m))
        .map_err(err)?;
    let ratios: Vec<f64> = (0..spectrum.len())
        .filter(|&k| ((spectrum.eigenvalues[k] - e) / delta).abs() <= half_width)
        .map(|k| {
            let (_, l2, linf) = eigenfunction_norms(
                &sample,
                spectrum.eigenvalues[k],
                spectrum.pole_index[k],
                spectrum.dist_left[k],
                spectrum.dist_right[k],
            );
            l2 / linf
        })
        .collect();
    let grid: Vec<f64> = (0..=40)
        .map(|i| half_width * (i as f64 / 20.0 - 1.0))
        .collect();
    // The tail is singular at poles beyond the cutoff only, so grid points are safe.
    let tail = tail_on_grid(&window, &sample, &grid).unwrap_or_default();
    Ok(json!({
        "m": m, "lambda": lambda, "kappa": params.kappa, "center": e, "delta": delta,
        "in_band": e.abs() < lambda,
        "omega": window.omega, "u": window.u, "ratio21": ratios,
        "tail_grid": grid, "tail": tail,
    })
    .to_string())
}

/// One Šeba configuration on `[−truncation, truncation]` and its roots at
/// level `alpha` inside `[−half_width, half_width]`.
#[wasm_bindgen]
pub fn seba_sample(
    alpha: f64,
    half_width: f64,
    seed: u64,
    truncation: f64,
) -> Result<String, String> {
    if !(half_width > 0.0 && half_width <= 50.0) {
        return Err("half-width must lie in (0, 50]".into());
    }
    if !(truncation >= 10.0 * half_width && truncation <= 1e5) {
        return Err("truncation must lie in [10·W, 1e5]".into());
    }
    let config = sample_poisson(truncation, seed, 0).map_err(err)?;
    let solution = solve_seba(&config, alpha, half_width, DEFAULT_TOL).map_err(err)?;
    let roots: Vec<_> = solution
        .in_window()
        .map(|r| json!({"u": r.u, "dist": r.pole_distance(), "ratio21": r.ell2_sq.sqrt() / r.ell_inf}))
        .collect();
    Ok(json!({
        "alpha": alpha, "half_width": half_width,
        "points": config.points_in(-half_width, half_width),
        "roots": roots,
    })
    .to_string())
}

/// `H(ξ)` on `points` equally spaced values in `[−xi_max, xi_max]`, the
/// density-of-states correction `ρ̂(E)` at coupling `kappa`, and the
/// reference energies where `ρ̂ = 1`.
#[wasm_bindgen]
pub fn hilbert_curve(xi_max: f64, points: usize, kappa: f64) -> Result<String, String> {
    if !(xi_max > 0.0 && xi_max <= 100.0) || !(2..=10_000).contains(&points) {
        return Err("need 0 < ξ_max ≤ 100 and 2 ≤ points ≤ 10000".into());
    }
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err("κ must lie in (0, 0.5]".into());
    }
    let xi: Vec<f64> = (0..points)
        .map(|i| xi_max * (2.0 * i as f64 / (points - 1) as f64 - 1.0))
        .collect();
    let h: Vec<f64> = xi.iter().map(|&x| gaussian_hilbert(x)).collect();
    let energies: Vec<f64> = (0..points)
        .map(|i| -1.5 + 2.0 * i as f64 / (points - 1) as f64)
        .collect();
    let rho: Vec<f64> = energies.iter().map(|&e| rho_hat(e, kappa)).collect();
    let reference = solve_reference_energies(kappa).map_err(err)?;
    Ok(json!({
        "xi": xi, "h": h, "energies": energies, "rho_hat": rho,
        "e_hat_minus1": reference.e_minus1, "e_hat_zero": reference.e_zero,
    })
    .to_string())
}
