//! `analyze`, `scan` and `drive`.

use qrc_core::basis::{BlochVector, DensityMatrix};
use qrc_core::lindblad::{self, QubitExample};
use qrc_core::numerics::{self, c64, CMatrix, CVector};
use qrc_core::rng::SplitMix64;
use qrc_core::sas::{self, Lattice, SasModel, SuperOpMatrix};
use serde_json::{json, Value};

use crate::output::{fmt_cell, fmt_f64};
use crate::spec::{ChannelSpec, Family};
use crate::CliError;

const MAX_LATTICE_POINTS: usize = 200_000;

fn core_err(e: impl std::fmt::Display) -> CliError {
    CliError::InvalidInput(e.to_string())
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn bloch_json(model: &SasModel, x: &BlochVector) -> Value {
    let mut v = json!({ "coords": x.coords.as_slice() });
    if let Some(p) = x.to_pauli() {
        v["pauli"] = json!(p);
    }
    if let Ok(rho) = model.to_density(x) {
        v["rho"] = json!(complex_rows(rho.matrix()));
    }
    v
}

/// Pauli expectations `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a qubit state.
pub fn pauli_expectations(rho: &DensityMatrix) -> [f64; 3] {
    let m = rho.matrix();
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re]
}

/// Full analysis report for a channel spec.
pub fn analyze(spec: &ChannelSpec) -> Result<Value, CliError> {
    let channel = spec.channel()?;
    let model = spec.sas_model()?;
    let domain = spec.domain()?;
    let z_ref = spec.reference_input();
    let total = spec.run.lattice.checked_pow(domain.input_dim() as u32).unwrap_or(usize::MAX);
    if total > MAX_LATTICE_POINTS {
        return Err(core_err(format!("lattice of {total} points exceeds the limit of {MAX_LATTICE_POINTS}")));
    }
    let lattice = Lattice::new(&domain, spec.run.lattice, spec.run.random_points, spec.run.seed);

    let t = sas::superop_matrix(&channel, &z_ref, model.basis()).map_err(core_err)?;
    let block = t.decompose().map_err(core_err)?;
    let spectrum = sas::spectrum_analysis(&t).map_err(core_err)?;
    let cptp = channel.worst_cptp_report(&lattice.points).map_err(core_err)?;
    let esp = sas::contraction_certificate(&model, &lattice, spec.run.k_max).map_err(core_err)?;

    let mut report = json!({
        "spec": spec,
        "reference_input": z_ref,
        "superoperator": matrix_rows(t.matrix()),
        "p": matrix_rows(&block.p),
        "q": block.q.as_slice(),
        "singular_values_p": numerics::singular_values(&block.p),
        "spectrum": spectrum,
        "cptp": cptp,
        "cptp_ok": cptp.is_cptp(),
        "esp": esp,
    });
    if spec.dim() == 2 {
        report["q_pauli"] = json!(block.q_expectation().as_slice());
    }
    if let Some(cf) = closed_form_section(spec, &z_ref, &t)? {
        report["closed_form"] = cf;
    }

    let (fixed, fixed_ok) = match sas::fixed_point_report(&model, &lattice) {
        Ok(fp) => {
            let reference = model.fixed_point(&z_ref).map_err(core_err)?;
            (
                json!({
                    "input_independent": fp.input_independent,
                    "unital": fp.unital,
                    "max_q_norm": fp.max_q_norm,
                    "witness_deviation": fp.witness_deviation,
                    "max_fixed_point_spread": fp.max_fixed_point_spread,
                    "reference": bloch_json(&model, &reference.x),
                }),
                Some(fp),
            )
        }
        Err(e) => (json!({ "error": e.to_string() }), None),
    };
    report["fixed_points"] = fixed;

    let theorems = if esp.is_certified() && fixed_ok.is_some() {
        let th = sas::theorem_checks(&model, &lattice, &esp, spec.run.sequences, spec.run.seed).map_err(core_err)?;
        json!({
            "unital_trivial": th.unital_trivial,
            "constant_filter": th.constant_filter.as_ref().map(|r| complex_rows(r.matrix())),
            "predicted_bloch": th.predicted_bloch.as_ref().map(|x| bloch_json(&model, x)),
            "max_prediction_deviation": th.max_prediction_deviation,
            "filter_spread": th.filter_spread,
            "sequences": th.sequences,
            "consistent": th.consistent,
        })
    } else {
        json!({ "skipped": "requires a contraction certificate and nonsingular fixed points" })
    };
    report["theorems"] = theorems;

    let fp = fixed_ok.as_ref();
    report["assertions"] = json!({
        "esp_certified": esp.is_certified(),
        "mixing_everywhere": esp.mixing_per_input.iter().all(|&m| m),
        "unital": fp.map(|f| f.unital),
        "constant_filter": fp.map(|f| esp.is_certified() && (f.unital || f.input_independent)),
        "input_dependent_fixed_points": fp.map(|f| !f.input_independent),
    });
    Ok(report)
}

fn closed_form_section(spec: &ChannelSpec, z: &[f64], numeric: &SuperOpMatrix) -> Result<Option<Value>, CliError> {
    let p = &spec.params;
    let h_t = spec.input.encoding.field(z);
    let (closed, example) = match spec.family {
        Family::LindbladIng | Family::LindbladBad | Family::LindbladGood => {
            let ex = spec.family.example().expect("lindblad family");
            (ex.closed_form(p.gamma, h_t, p.dt).map_err(core_err)?, Some(ex))
        }
        Family::MeasurementComposed => (lindblad::measurement_composed(p.gamma, h_t, p.dt, p.g).map_err(core_err)?, None),
        _ => return Ok(None),
    };
    let mut v = json!({ "h_t": h_t, "provenance": closed.provenance });
    if let Some(ex) = example {
        let expm = ex.model(p.gamma, p.dt, spec.input.encoding).map_err(core_err)?;
        let prop = expm.propagator(z, &qrc_core::GellMannBasis::qubit()).map_err(core_err)?;
        v["max_abs_diff_vs_expm"] = json!(numerics::max_abs_diff(closed.matrix(), prop.matrix()));
        v["singular_values"] = json!(ex.singular_values(p.gamma, h_t, p.dt).map_err(core_err)?);
        let ev = ex.eigenvalues(p.gamma, h_t, p.dt).map_err(core_err)?;
        v["eigenvalues"] = json!(ev.iter().map(|l| [l.re, l.im]).collect::<Vec<_>>());
        if let Ok(rho) = ex.fixed_point(p.gamma, h_t) {
            v["fixed_point"] = json!(complex_rows(&rho));
        }
    } else {
        let rho = lindblad::measurement_fixed_point(p.gamma, h_t, p.dt, p.g).map_err(core_err)?;
        v["fixed_point"] = json!(complex_rows(&rho));
    }
    v["max_abs_diff_vs_channel"] = json!(numerics::max_abs_diff(closed.matrix(), numeric.matrix()));
    Ok(Some(v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub h_t: f64,
    pub gamma: f64,
    /// `(σ₁, σ₂, σ₃, max |λ| on the traceless block)`; `None` on an excluded locus.
    pub values: Option<[f64; 4]>,
}

pub const SCAN_HEADER: &str = "h_t,gamma,sigma1,sigma2,sigma3,max_eig_mod_traceless";

fn traceless_max_modulus(eigs: &[numerics::C64]) -> f64 {
    let unit = eigs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - c64(1.0, 0.0)).norm().total_cmp(&(b.1 - c64(1.0, 0.0)).norm()))
        .map(|(i, _)| i);
    eigs.iter().enumerate().filter(|(i, _)| Some(*i) != unit).map(|(_, l)| l.norm()).fold(0.0, f64::max)
}

/// Singular values and traceless spectral radius at one `(h_t, γ)` point.
pub fn scan_point(family: Family, gamma: f64, h_t: f64, dt: f64, g: f64) -> Result<Option<[f64; 4]>, CliError> {
    let locus = match family {
        Family::MeasurementComposed => QubitExample::GoodXField,
        f => f.example().ok_or_else(|| core_err(format!("scan needs a Lindblad family, got {f}")))?,
    };
    let band = 1e-9 * (gamma * gamma + 16.0 * h_t * h_t);
    if locus.on_singular_locus(gamma, h_t, band) {
        return Ok(None);
    }
    Ok(Some(match family {
        Family::MeasurementComposed => {
            let t = lindblad::measurement_composed(gamma, h_t, dt, g).map_err(core_err)?;
            let p = t.superop.decompose().map_err(core_err)?.p;
            let sv = numerics::singular_values(&p);
            let ev = numerics::eig_real(t.matrix()).map_err(core_err)?.eigenvalues;
            [sv[0], sv[1], sv[2], traceless_max_modulus(&ev)]
        }
        _ => {
            let sv = locus.singular_values(gamma, h_t, dt).map_err(core_err)?;
            let ev = locus.eigenvalues(gamma, h_t, dt).map_err(core_err)?;
            [sv[0], sv[1], sv[2], traceless_max_modulus(&ev)]
        }
    }))
}

/// `N x N` grid over `(0, scan_h_max] x (0, scan_gamma_max]`, `h_t` varying fastest.
pub fn scan(spec: &ChannelSpec) -> Result<Vec<ScanRow>, CliError> {
    let n = spec.run.lattice;
    let mut rows = Vec::with_capacity(n * n);
    for j in 1..=n {
        let gamma = spec.run.scan_gamma_max * j as f64 / n as f64;
        for i in 1..=n {
            let h_t = spec.run.scan_h_max * i as f64 / n as f64;
            let values = scan_point(spec.family, gamma, h_t, spec.params.dt, spec.params.g)?;
            rows.push(ScanRow { h_t, gamma, values });
        }
    }
    Ok(rows)
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = match r.values {
            Some(v) => v.iter().map(|x| fmt_f64(*x)).collect(),
            None => vec![fmt_cell(None); 4],
        };
        out.push_str(&format!("{},{},{}\n", fmt_f64(r.h_t), fmt_f64(r.gamma), cells.join(",")));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveRow {
    pub t: usize,
    pub z: Vec<f64>,
    pub pauli: [f64; 3],
}

/// `|+⟩⟨+|`, the maximally coherent qubit state.
pub fn plus_state() -> DensityMatrix {
    let a = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityMatrix::pure(&CVector::from_vec(vec![a, a]))
}

/// Seeded uniform inputs driving the channel from `|+⟩⟨+|`.
pub fn drive(spec: &ChannelSpec) -> Result<Vec<DriveRow>, CliError> {
    if spec.dim() != 2 {
        return Err(core_err(format!("drive needs a qubit family, got dimension {}", spec.dim())));
    }
    let channel = spec.channel()?;
    let mut rng = SplitMix64::new(spec.run.seed);
    let inputs = channel.domain().sample_sequence(spec.run.steps, &mut rng);
    let states = sas::iterate_density(&channel, &plus_state(), &inputs).map_err(core_err)?;
    Ok(inputs
        .into_iter()
        .zip(&states)
        .enumerate()
        .map(|(k, (z, rho))| DriveRow { t: k + 1, z, pauli: pauli_expectations(rho) })
        .collect())
}

pub fn drive_csv(rows: &[DriveRow], input_dim: usize) -> String {
    let mut out = String::from("t,");
    if input_dim == 1 {
        out.push_str("z_t");
    } else {
        out.push_str(&(0..input_dim).map(|i| format!("z_t_{i}")).collect::<Vec<_>>().join(","));
    }
    out.push_str(",sx,sy,sz\n");
    for r in rows {
        let z: Vec<String> = r.z.iter().map(|x| fmt_f64(*x)).collect();
        let s: Vec<String> = r.pauli.iter().map(|x| fmt_f64(*x)).collect();
        out.push_str(&format!("{},{},{}\n", r.t, z.join(","), s.join(",")));
    }
    out
}
