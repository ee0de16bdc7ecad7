//! Channel-spec files.
//!
//! Flat `key = value` lines grouped under `[channel]`, `[input]` and `[run]`.
//! `#` and `;` start comments. Example:
//!
//! ```text
//! [channel]
//! family = lindblad_good
//! gamma = 1
//! h = 1
//! dt = 1
//!
//! [input]
//! lo = 0
//! hi = 1
//! encoding = linear
//!
//! [run]
//! seed = 7
//! steps = 500
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use qrc_core::basis::{DensityMatrix, GellMannBasis};
use qrc_core::channels::{self, InputDomain, ParamChannel};
use qrc_core::lindblad::{self, Encoding, LindbladModel, QubitExample};
use qrc_core::numerics::{c64, CMatrix, CVector};
use qrc_core::sas::SasModel;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Depolarizing,
    Dephasing,
    LindbladIng,
    LindbladBad,
    LindbladGood,
    MeasurementComposed,
    Composed,
    Blend,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Depolarizing,
        Family::Dephasing,
        Family::LindbladIng,
        Family::LindbladBad,
        Family::LindbladGood,
        Family::MeasurementComposed,
        Family::Composed,
        Family::Blend,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Depolarizing => "depolarizing",
            Family::Dephasing => "dephasing",
            Family::LindbladIng => "lindblad_ing",
            Family::LindbladBad => "lindblad_bad",
            Family::LindbladGood => "lindblad_good",
            Family::MeasurementComposed => "measurement_composed",
            Family::Composed => "composed",
            Family::Blend => "blend",
        }
    }

    pub fn example(&self) -> Option<QubitExample> {
        match self {
            Family::LindbladIng => Some(QubitExample::UnitalDephasing),
            Family::LindbladBad => Some(QubitExample::BadZField),
            Family::LindbladGood => Some(QubitExample::GoodXField),
            _ => None,
        }
    }
}

impl FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| invalid(format!("unknown family `{s}`")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(&self) -> CMatrix {
        match self {
            Axis::X => lindblad::pauli_x(),
            Axis::Y => lindblad::pauli_y(),
            Axis::Z => lindblad::pauli_z(),
        }
    }
}

/// Reference state of the ε-blend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlendState {
    Mixed,
    Ground,
    Excited,
    Plus,
}

impl BlendState {
    pub fn density(&self, d: usize) -> DensityMatrix {
        match self {
            BlendState::Mixed => DensityMatrix::maximally_mixed(d),
            BlendState::Ground => DensityMatrix::basis_state(d, 0),
            BlendState::Excited => DensityMatrix::basis_state(d, d - 1),
            BlendState::Plus => {
                let amp = c64(1.0 / (d as f64).sqrt(), 0.0);
                DensityMatrix::pure(&CVector::from_element(d, amp))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelParams {
    /// Hilbert-space dimension (depolarizing only; the other families are qubits).
    pub d: usize,
    pub gamma: f64,
    pub h: f64,
    pub dt: f64,
    pub g: f64,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub axis: Axis,
    pub inner: Option<Family>,
    pub sigma: BlendState,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            d: 2,
            gamma: 1.0,
            h: 1.0,
            dt: 1.0,
            g: 0.0,
            epsilon: None,
            lambda: None,
            lambda_min: None,
            lambda_max: None,
            axis: Axis::X,
            inner: None,
            sigma: BlendState::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSpec {
    pub dim: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub encoding: Encoding,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub seed: u64,
    pub steps: usize,
    /// Lattice points per input axis (analyze) or grid points per scan axis (scan).
    pub lattice: usize,
    pub random_points: usize,
    pub k_max: usize,
    /// Input at which single-point quantities are reported; defaults to the upper corner.
    pub z: Option<Vec<f64>>,
    pub scan_h_max: f64,
    pub scan_gamma_max: f64,
    pub sequences: usize,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            steps: 500,
            lattice: 101,
            random_points: 1000,
            k_max: 8,
            z: None,
            scan_h_max: 2.0,
            scan_gamma_max: 2.0,
            sequences: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub family: Family,
    pub params: ChannelParams,
    pub input: InputSpec,
    pub run: RunSpec,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidInput(msg.into())
}

fn parse_num<T: FromStr>(section: &str, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| invalid(format!("[{section}] {key}: cannot parse `{v}`")))
}

fn parse_list(section: &str, key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|s| parse_num(section, key, s.trim())).collect()
}

impl ChannelSpec {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if !matches!(name.as_str(), "channel" | "input" | "run") {
                    return Err(invalid(format!("line {}: unknown section [{name}]", lineno + 1)));
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let section = current.clone().ok_or_else(|| invalid(format!("line {}: key outside a section", lineno + 1)))?;
            let (k, v) = line.split_once('=').ok_or_else(|| invalid(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            let table = sections.get_mut(&section).expect("section exists");
            if table.insert(k.clone(), (lineno + 1, v)).is_some() {
                return Err(invalid(format!("line {}: duplicate key `{k}` in [{section}]", lineno + 1)));
            }
        }

        let empty = BTreeMap::new();
        let channel = sections.get("channel").ok_or_else(|| invalid("missing [channel] section"))?;
        let family: Family = channel.get("family").ok_or_else(|| invalid("[channel] family is required"))?.1.parse()?;

        let mut params = ChannelParams::default();
        for (k, (_, v)) in channel {
            match k.as_str() {
                "family" => {}
                "d" => params.d = parse_num("channel", k, v)?,
                "gamma" => params.gamma = parse_num("channel", k, v)?,
                "h" => params.h = parse_num("channel", k, v)?,
                "dt" => params.dt = parse_num("channel", k, v)?,
                "g" => params.g = parse_num("channel", k, v)?,
                "epsilon" => params.epsilon = Some(parse_num("channel", k, v)?),
                "lambda" => params.lambda = Some(parse_num("channel", k, v)?),
                "lambda_min" => params.lambda_min = Some(parse_num("channel", k, v)?),
                "lambda_max" => params.lambda_max = Some(parse_num("channel", k, v)?),
                "axis" => {
                    params.axis = match v.as_str() {
                        "x" => Axis::X,
                        "y" => Axis::Y,
                        "z" => Axis::Z,
                        _ => return Err(invalid(format!("[channel] axis must be x, y or z, got `{v}`"))),
                    }
                }
                "inner" => params.inner = Some(v.parse()?),
                "sigma" => {
                    params.sigma = match v.as_str() {
                        "mixed" => BlendState::Mixed,
                        "ground" => BlendState::Ground,
                        "excited" => BlendState::Excited,
                        "plus" => BlendState::Plus,
                        _ => return Err(invalid(format!("[channel] sigma must be mixed, ground, excited or plus, got `{v}`"))),
                    }
                }
                _ => return Err(invalid(format!("[channel] unknown key `{k}`"))),
            }
        }

        let input_table = sections.get("input").unwrap_or(&empty);
        let mut dim = 1usize;
        let (mut lo, mut hi) = (None, None);
        let (mut enc_name, mut offset) = ("linear".to_string(), 0.0);
        for (k, (_, v)) in input_table {
            match k.as_str() {
                "dim" => dim = parse_num("input", k, v)?,
                "lo" => lo = Some(parse_list("input", k, v)?),
                "hi" => hi = Some(parse_list("input", k, v)?),
                "encoding" => enc_name = v.clone(),
                "offset" => offset = parse_num("input", k, v)?,
                _ => return Err(invalid(format!("[input] unknown key `{k}`"))),
            }
        }
        let broadcast = |v: Option<Vec<f64>>, default: f64| -> Result<Vec<f64>, CliError> {
            match v {
                None => Ok(vec![default; dim]),
                Some(v) if v.len() == 1 => Ok(vec![v[0]; dim]),
                Some(v) if v.len() == dim => Ok(v),
                Some(v) => Err(invalid(format!("[input] box has {} bounds for dim {dim}", v.len()))),
            }
        };
        if dim == 0 {
            return Err(invalid("[input] dim must be positive"));
        }
        let lo = broadcast(lo, 0.0)?;
        let hi = broadcast(hi, 1.0)?;
        let encoding = Encoding::from_name(&enc_name, params.h, offset)
            .ok_or_else(|| invalid(format!("[input] unknown encoding `{enc_name}` (linear or affine)")))?;

        let mut run = RunSpec::default();
        for (k, (_, v)) in sections.get("run").unwrap_or(&empty) {
            match k.as_str() {
                "seed" => run.seed = parse_num("run", k, v)?,
                "steps" => run.steps = parse_num("run", k, v)?,
                "lattice" => run.lattice = parse_num("run", k, v)?,
                "random_points" => run.random_points = parse_num("run", k, v)?,
                "k_max" => run.k_max = parse_num("run", k, v)?,
                "z" => run.z = Some(parse_list("run", k, v)?),
                "scan_h_max" => run.scan_h_max = parse_num("run", k, v)?,
                "scan_gamma_max" => run.scan_gamma_max = parse_num("run", k, v)?,
                "sequences" => run.sequences = parse_num("run", k, v)?,
                _ => return Err(invalid(format!("[run] unknown key `{k}`"))),
            }
        }

        let spec = ChannelSpec { family, params, input: InputSpec { dim, lo, hi, encoding }, run };
        spec.validate()?;
        Ok(spec)
    }

    pub fn domain(&self) -> Result<InputDomain, CliError> {
        InputDomain::new(self.input.lo.clone(), self.input.hi.clone()).map_err(|e| invalid(format!("[input] {e}")))
    }

    /// Input used for single-point quantities.
    pub fn reference_input(&self) -> Vec<f64> {
        self.run.z.clone().unwrap_or_else(|| self.input.hi.clone())
    }

    pub fn dim(&self) -> usize {
        match self.family {
            Family::Depolarizing => self.params.d,
            Family::Blend => match self.params.inner {
                Some(Family::Depolarizing) => self.params.d,
                _ => 2,
            },
            _ => 2,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let p = &self.params;
        let finite = [p.gamma, p.h, p.dt, p.g].iter().all(|x| x.is_finite());
        if !finite {
            return Err(invalid("[channel] parameters must be finite"));
        }
        if p.dt <= 0.0 {
            return Err(invalid(format!("[channel] dt must be positive, got {}", p.dt)));
        }
        if p.gamma < 0.0 || p.g < 0.0 {
            return Err(invalid("[channel] gamma and g must be nonnegative"));
        }
        let domain = self.domain()?;
        if !domain.contains(&self.reference_input()) {
            return Err(invalid(format!("[run] z = {:?} lies outside the input box", self.reference_input())));
        }
        if self.run.lattice == 0 {
            return Err(invalid("[run] lattice must be positive"));
        }
        if self.run.scan_h_max <= 0.0 || self.run.scan_gamma_max <= 0.0 {
            return Err(invalid("[run] scan axes must have positive extent"));
        }
        let scalar = !matches!(self.family, Family::Depolarizing)
            && !(self.family == Family::Blend && p.inner == Some(Family::Depolarizing));
        if scalar && self.input.dim != 1 {
            return Err(invalid(format!("family {} takes a scalar input, got dim {}", self.family, self.input.dim)));
        }
        match self.family {
            Family::Blend => {
                let eps = p.epsilon.ok_or_else(|| invalid("[channel] blend needs epsilon"))?;
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(invalid(format!("[channel] epsilon must lie in (0, 1), got {eps}")));
                }
                match p.inner {
                    None => return Err(invalid("[channel] blend needs inner = <family>")),
                    Some(Family::Blend) => return Err(invalid("[channel] blend cannot wrap another blend")),
                    _ => {}
                }
            }
            Family::Depolarizing => {
                if p.d < 2 {
                    return Err(invalid("[channel] d must be at least 2"));
                }
                let ok = p.lambda.is_some() || (p.lambda_min.is_some() && p.lambda_max.is_some());
                if !ok {
                    return Err(invalid("[channel] depolarizing needs lambda or lambda_min and lambda_max"));
                }
            }
            Family::LindbladBad | Family::LindbladGood | Family::MeasurementComposed if p.gamma == 0.0 => {
                return Err(invalid(format!("[channel] {} needs gamma > 0 (no dissipation means no mixing)", self.family)));
            }
            _ => {}
        }
        Ok(())
    }

    /// Input-driven channel for this spec.
    pub fn channel(&self) -> Result<ParamChannel, CliError> {
        let domain = self.domain()?;
        let built = self.family_channel(self.family, domain.clone())?;
        if self.family == Family::Blend {
            let sigma = self.params.sigma.density(built.dim());
            let eps = self.params.epsilon.expect("validated");
            return channels::blend(&built, &sigma, eps).map_err(|e| invalid(e.to_string()));
        }
        Ok(built)
    }

    fn family_channel(&self, family: Family, domain: InputDomain) -> Result<ParamChannel, CliError> {
        let p = &self.params;
        let enc = self.input.encoding;
        let err = |e: lindblad::LindbladError| invalid(e.to_string());
        Ok(match family {
            Family::Depolarizing => {
                let d = p.d;
                let upper = (d * d) as f64 / (d * d - 1) as f64;
                let check = |l: f64| {
                    if (0.0..=upper).contains(&l) {
                        Ok(())
                    } else {
                        Err(invalid(format!("[channel] depolarizing probability {l} outside [0, {upper}]")))
                    }
                };
                if let Some(l) = p.lambda {
                    check(l)?;
                    input_depolarizing(d, domain, l, l)
                } else {
                    let (a, b) = (p.lambda_min.expect("validated"), p.lambda_max.expect("validated"));
                    check(a)?;
                    check(b)?;
                    input_depolarizing(d, domain, a, b)
                }
            }
            Family::Dephasing => {
                ParamChannel::new("dephasing", 2, domain, move |z| Ok(channels::dephasing(enc.field(z).abs())?.to_map()))
            }
            Family::LindbladIng | Family::LindbladBad | Family::LindbladGood => {
                lindblad::example_channel(family.example().expect("lindblad family"), p.gamma, p.dt, enc, domain).map_err(err)?
            }
            Family::MeasurementComposed => lindblad::measurement_channel(p.gamma, p.dt, p.g, enc, domain).map_err(err)?,
            Family::Composed => {
                let lambda = p.lambda.unwrap_or(0.0);
                if !(0.0..=4.0 / 3.0).contains(&lambda) {
                    return Err(invalid(format!("[channel] composed noise lambda {lambda} outside [0, 4/3]")));
                }
                let noise = channels::compose(
                    &channels::dephasing(p.g).map_err(|e| invalid(e.to_string()))?.to_map(),
                    &channels::depolarizing(lambda, 2).map_err(|e| invalid(e.to_string()))?,
                )
                .map_err(|e| invalid(e.to_string()))?;
                let gen = p.axis.pauli();
                ParamChannel::new("composed", 2, domain, move |z| {
                    let u = rotation(&gen, enc.field(z));
                    channels::compose(&noise, &channels::unitary_channel(&u)?.to_map())
                })
            }
            Family::Blend => self.family_channel(self.params.inner.expect("validated"), domain)?,
        })
    }

    /// Direct state-affine model (closed forms for the Lindblad families).
    pub fn sas_model(&self) -> Result<SasModel, CliError> {
        let basis = GellMannBasis::new(self.dim()).map_err(|e| invalid(e.to_string()))?;
        let channel = self.channel()?;
        SasModel::from_channel(&channel, &basis).map_err(|e| invalid(e.to_string()))
    }

    /// Numeric Lindblad model behind a Lindblad family, if any.
    pub fn lindblad_model(&self) -> Option<LindbladModel> {
        self.family.example().and_then(|ex| ex.model(self.params.gamma, self.params.dt, self.input.encoding).ok())
    }
}

/// `exp(-i θ σ/2)` for a Pauli matrix `σ`.
pub fn rotation(pauli: &CMatrix, theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    CMatrix::identity(2, 2) * c64(c, 0.0) - pauli * c64(0.0, s)
}

/// Depolarizing probability interpolated linearly across the input box.
fn input_depolarizing(d: usize, domain: InputDomain, lo: f64, hi: f64) -> ParamChannel {
    let (dlo, dhi) = (domain.lo.clone(), domain.hi.clone());
    channels::input_depolarizing(d, domain, move |z| {
        let n = z.len() as f64;
        let t: f64 = z
            .iter()
            .zip(dlo.iter().zip(&dhi))
            .map(|(x, (a, b))| if b > a { (x - a) / (b - a) } else { 0.0 })
            .sum::<f64>()
            / n;
        lo + (hi - lo) * t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "
        # working reservoir
        [channel]
        family = lindblad_good
        gamma = 1
        h = 1
        dt = 1

        [input]
        lo = 0
        hi = 1
        encoding = linear

        [run]
        seed = 7 ; trailing comment
        steps = 20
    ";

    #[test]
    fn parses_sections() {
        let s = ChannelSpec::parse(GOOD).unwrap();
        assert_eq!(s.family, Family::LindbladGood);
        assert_eq!(s.run.seed, 7);
        assert_eq!(s.run.steps, 20);
        assert_eq!(s.input.encoding, Encoding::Linear { scale: 1.0 });
        assert_eq!(s.reference_input(), vec![1.0]);
        assert!(s.channel().unwrap().at(&[0.5]).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "[channel]\nfamily = nope\n",
            "family = depolarizing\n",
            "[channel]\nfamily = depolarizing\n",
            "[channel]\nfamily = depolarizing\nlambda = 0.1\nfoo = 1\n",
            "[channel]\nfamily = lindblad_good\ngamma = 0\n",
            "[channel]\nfamily = blend\ninner = lindblad_good\n",
            "[channel]\nfamily = blend\nepsilon = 0.2\n",
            "[channel]\nfamily = lindblad_bad\n[input]\nlo = 1\nhi = 0\n",
            "[channel]\nfamily = lindblad_bad\n[input]\nencoding = cubic\n",
            "[channel]\nfamily = lindblad_bad\n[input]\ndim = 2\n",
            "[channel]\nfamily = lindblad_bad\ndt = -1\n",
            "[channel]\nfamily = lindblad_bad\n[run]\nz = 3\n",
            "[channel]\nfamily = lindblad_bad\nh = 1\nh = 2\n",
            "[other]\n",
        ] {
            assert!(matches!(ChannelSpec::parse(text), Err(CliError::InvalidInput(_))), "{text}");
        }
        let s = ChannelSpec::parse("[channel]\nfamily = depolarizing\nlambda = 2\n").unwrap();
        assert!(s.channel().is_err());
    }

    #[test]
    fn builds_every_family() {
        for (family, extra) in [
            ("depolarizing", "lambda_min = 0.1\nlambda_max = 0.9\nd = 3"),
            ("dephasing", "g = 1"),
            ("lindblad_ing", ""),
            ("lindblad_bad", ""),
            ("lindblad_good", ""),
            ("measurement_composed", "g = 1"),
            ("composed", "lambda = 0.5\ng = 1\naxis = y"),
            ("blend", "inner = lindblad_good\nepsilon = 0.3\nsigma = plus"),
        ] {
            let s = ChannelSpec::parse(&format!("[channel]\nfamily = {family}\n{extra}\n")).unwrap();
            let ch = s.channel().unwrap();
            assert!(ch.at(&vec![0.3; s.input.dim]).unwrap().cptp_report().is_cptp(), "{family}");
            assert!(s.sas_model().is_ok());
        }
    }

    #[test]
    fn rotation_is_unitary() {
        let u = rotation(&lindblad::pauli_x(), 0.7);
        assert!((u.adjoint() * &u - CMatrix::identity(2, 2)).norm() < 1e-15);
    }
}
