//! Browser bindings for the qubit reservoir examples.
//!
//! Each exported function has a plain Rust counterpart returning `Result<_, String>`
//! so it can be tested natively; the `wasm_bindgen` wrappers only convert errors.
//! Results are flat `Float64Array`s with the layouts documented per function.

use qrc_core::basis::{BlochVector, DensityMatrix, GellMannBasis};
use qrc_core::channels::{InputDomain, ParamChannel};
use qrc_core::lindblad::{self, Encoding, QubitExample};
use qrc_core::numerics::{self, c64, CMatrix};
use qrc_core::rng::SplitMix64;
use qrc_core::sas::{self, SuperOpMatrix};
use wasm_bindgen::prelude::*;

/// Example names accepted by every function: `ing`, `bad`, `good`, `measured`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Example(QubitExample),
    Measured,
}

fn parse_model(name: &str) -> Result<Model, String> {
    match name {
        "ing" => Ok(Model::Example(QubitExample::UnitalDephasing)),
        "bad" => Ok(Model::Example(QubitExample::BadZField)),
        "good" => Ok(Model::Example(QubitExample::GoodXField)),
        "measured" => Ok(Model::Measured),
        other => Err(format!("unknown example '{other}' (expected ing, bad, good or measured)")),
    }
}

fn check_finite(pairs: &[(&str, f64)]) -> Result<(), String> {
    match pairs.iter().find(|(_, v)| !v.is_finite()) {
        Some((name, v)) => Err(format!("{name} must be finite, got {v}")),
        None => Ok(()),
    }
}

fn transfer(model: Model, gamma: f64, h: f64, dt: f64, g: f64) -> Result<SuperOpMatrix, String> {
    let p = match model {
        Model::Example(ex) => ex.closed_form(gamma, h, dt),
        Model::Measured => lindblad::measurement_composed(gamma, h, dt, g),
    };
    p.map(|p| p.superop).map_err(|e| e.to_string())
}

fn pauli_of(rho: &CMatrix) -> [f64; 3] {
    let off = rho[(0, 1)];
    [2.0 * off.re, -2.0 * off.im, rho[(0, 0)].re - rho[(1, 1)].re]
}

/// Traceless singular values `(σ₂, σ₃)` over an `n × n` grid of `(h, γ)` with
/// `h = (i+1)/n · h_max` varying fastest, `γ = (j+1)/n · γ_max`.
///
/// Layout: `[σ₂, σ₃]` per cell, row-major in `γ`; `NaN` on the removable-singularity
/// locus. For `measured` the two largest singular values of `p` at strength `g`.
pub fn singular_value_grid_impl(example: &str, n: usize, h_max: f64, gamma_max: f64, dt: f64, g: f64) -> Result<Vec<f64>, String> {
    let model = parse_model(example)?;
    check_finite(&[("h_max", h_max), ("gamma_max", gamma_max), ("dt", dt), ("g", g)])?;
    if n == 0 || n > 512 {
        return Err(format!("grid size must be in 1..=512, got {n}"));
    }
    if h_max <= 0.0 || gamma_max <= 0.0 || dt <= 0.0 {
        return Err("h_max, gamma_max and dt must be positive".into());
    }
    let mut out = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        let gamma = (j + 1) as f64 / n as f64 * gamma_max;
        for i in 0..n {
            let h = (i + 1) as f64 / n as f64 * h_max;
            let pair = match model {
                Model::Example(ex) if ex.on_singular_locus(gamma, h, 1e-9 * (gamma * gamma + 16.0 * h * h)) => [f64::NAN; 2],
                Model::Example(ex) => {
                    let s = ex.singular_values(gamma, h, dt).map_err(|e| e.to_string())?;
                    [s[1], s[2]]
                }
                Model::Measured => {
                    let p = transfer(model, gamma, h, dt, g)?.decompose().map_err(|e| e.to_string())?.p;
                    let mut s = numerics::singular_values(&p);
                    s.sort_by(|a, b| b.total_cmp(a));
                    [s[0], s[1]]
                }
            };
            out.extend(pair);
        }
    }
    Ok(out)
}

/// Drives the example with `steps` uniform inputs `z_t ∈ [0, 1]`, field `h·z_t`,
/// starting from `|+⟩⟨+|`.
///
/// Layout: `[z_t, ⟨σx⟩, ⟨σy⟩, ⟨σz⟩]` per step, `t = 1..=steps`.
pub fn drive_trajectory_impl(example: &str, gamma: f64, h: f64, dt: f64, g: f64, steps: usize, seed: u64) -> Result<Vec<f64>, String> {
    let model = parse_model(example)?;
    check_finite(&[("gamma", gamma), ("h", h), ("dt", dt), ("g", g)])?;
    if steps > 100_000 {
        return Err(format!("at most 100000 steps, got {steps}"));
    }
    let domain = InputDomain::unit(1);
    let encoding = Encoding::Linear { scale: h };
    let channel: ParamChannel = match model {
        Model::Example(ex) => lindblad::example_channel(ex, gamma, dt, encoding, domain),
        Model::Measured => lindblad::measurement_channel(gamma, dt, g, encoding, domain),
    }
    .map_err(|e| e.to_string())?;
    let inputs = channel.domain().sample_sequence(steps, &mut SplitMix64::new(seed));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::pure(&numerics::CVector::from_vec(vec![c64(s, 0.0), c64(s, 0.0)]));
    let traj = sas::iterate_density(&channel, &plus, &inputs).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(4 * steps);
    for (z, rho) in inputs.iter().zip(&traj) {
        out.push(z[0]);
        out.extend(pauli_of(rho.matrix()));
    }
    Ok(out)
}

/// Single-point summary at field `h`.
///
/// Layout: `[σ₁, σ₂, σ₃, |λ₁|, |λ₂|, |λ₃|, |λ₄|, mixing, fx, fy, fz]`, singular values
/// descending, eigenvalue moduli descending, `mixing ∈ {0, 1}`, `f` the Pauli
/// expectations of the fixed point (`NaN` when not mixing).
pub fn point_summary_impl(example: &str, gamma: f64, h: f64, dt: f64, g: f64) -> Result<Vec<f64>, String> {
    let model = parse_model(example)?;
    check_finite(&[("gamma", gamma), ("h", h), ("dt", dt), ("g", g)])?;
    let t = transfer(model, gamma, h, dt, g)?;
    let block = t.decompose().map_err(|e| e.to_string())?;
    let mut sv = numerics::singular_values(&block.p);
    sv.sort_by(|a, b| b.total_cmp(a));
    let spec = sas::spectrum_analysis(&t).map_err(|e| e.to_string())?;
    let mut out = sv;
    out.extend(spec.eigenvalues.iter().map(|l| l.norm()));
    out.push(if spec.is_mixing { 1.0 } else { 0.0 });
    if spec.is_mixing {
        let x = block.affine_fixed_point().map_err(|e| e.to_string())?;
        let rho = GellMannBasis::qubit().from_real_coords(&BlochVector::new(2, x).full_coords()).map_err(|e| e.to_string())?;
        out.extend(pauli_of(&rho));
    } else {
        out.extend([f64::NAN; 3]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = singularValueGrid)]
pub fn singular_value_grid(example: &str, n: usize, h_max: f64, gamma_max: f64, dt: f64, g: f64) -> Result<Vec<f64>, JsError> {
    singular_value_grid_impl(example, n, h_max, gamma_max, dt, g).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = driveTrajectory)]
pub fn drive_trajectory(example: &str, gamma: f64, h: f64, dt: f64, g: f64, steps: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    drive_trajectory_impl(example, gamma, h, dt, g, steps, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pointSummary)]
pub fn point_summary(example: &str, gamma: f64, h: f64, dt: f64, g: f64) -> Result<Vec<f64>, JsError> {
    point_summary_impl(example, gamma, h, dt, g).map_err(|e| JsError::new(&e))
}
