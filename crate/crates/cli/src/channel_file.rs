//! JSON channel files.
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs. A `null`
//! component stands for a non-finite value (only meaningful in Kraus
//! derivatives, where it marks a divergent derivative).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use seqmetro::channels::{
    kraus_to_transition, DensityMatrix, DerivativeMode, KrausChannel, MatrixFn, ParamChannel,
    TransitionFn, TransitionMatrix,
};
use seqmetro::error::Error;
use seqmetro::numerics::{c64, conj, is_finite, kron, CMatrix};

use crate::exit::CliError;

pub type JsonMatrix = Vec<Vec<[Option<f64>; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Sample {
    pub theta: f64,
    pub transition: JsonMatrix,
}

/// Kraus form at θ₀ carried next to a transition-based representation, used
/// for the error-correction diagnostic only.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KrausSidecar {
    pub kraus: Vec<JsonMatrix>,
    pub kraus_dot: Vec<JsonMatrix>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim: usize,
    pub theta0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_dot: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_dot: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<Sample>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hnks: Option<KrausSidecar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_state: Option<JsonMatrix>,
}

/// Kraus operators at θ₀ with their derivatives.
pub type KrausData = (KrausChannel, Vec<CMatrix>);

/// A loaded channel with what the analysis needs besides the family itself.
#[derive(Clone)]
pub struct LoadedChannel {
    pub pc: ParamChannel,
    /// Kraus operators and derivatives at θ₀, when known.
    pub kraus: Option<KrausData>,
    pub input_state: Option<DensityMatrix>,
}

pub fn to_json(m: &CMatrix) -> JsonMatrix {
    let fin = |x: f64| x.is_finite().then_some(x);
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [fin(m[(i, j)].re), fin(m[(i, j)].im)]).collect())
        .collect()
}

/// Parses a matrix; `allow_nonfinite` maps `null` to NaN instead of failing.
pub fn from_json(m: &JsonMatrix, what: &str, allow_nonfinite: bool) -> Result<CMatrix, CliError> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::malformed(format!("{what}: matrix rows must be non-empty and of equal length")));
    }
    let mut out = CMatrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            let part = |x: &Option<f64>| match x {
                Some(v) => Ok(*v),
                None if allow_nonfinite => Ok(f64::NAN),
                None => Err(CliError::malformed(format!("{what}: entry ({i}, {j}) is null"))),
            };
            out[(i, j)] = c64(part(re)?, part(im)?);
        }
    }
    Ok(out)
}

fn square(m: CMatrix, n: usize, what: &str) -> Result<CMatrix, CliError> {
    if m.shape() != (n, n) {
        return Err(CliError::malformed(format!(
            "{what}: expected {n}x{n}, found {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

impl ChannelFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::malformed(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::malformed(format!("invalid channel file: {e}")))
    }

    pub fn load(&self) -> Result<LoadedChannel, CliError> {
        let d = self.dim;
        if d == 0 {
            return Err(CliError::malformed("dim must be positive"));
        }
        if !self.theta0.is_finite() {
            return Err(CliError::malformed("theta0 must be finite"));
        }
        let present = [self.kraus.is_some(), self.transition.is_some(), self.samples.is_some()]
            .iter()
            .filter(|&&x| x)
            .count();
        if present != 1 {
            return Err(CliError::malformed(
                "exactly one of kraus, transition or samples must be present",
            ));
        }
        if self.kraus_dot.is_some() && self.kraus.is_none() {
            return Err(CliError::malformed("kraus_dot requires kraus"));
        }
        let t_dot = self
            .t_dot
            .as_ref()
            .map(|m| from_json(m, "t_dot", false).and_then(|m| square(m, d * d, "t_dot")))
            .transpose()?;

        let (mut pc, kraus) = if let Some(ops) = &self.kraus {
            self.load_kraus(ops, t_dot)?
        } else if let Some(t) = &self.transition {
            let t = TransitionMatrix::from_untrusted(square(from_json(t, "transition", false)?, d * d, "transition")?)?;
            let dot = t_dot.unwrap_or_else(|| CMatrix::zeros(d * d, d * d));
            (fixed_family(d, self.theta0, t, dot), None)
        } else {
            (self.load_samples(t_dot)?, None)
        };
        if let Some([lo, hi]) = self.domain {
            if !(lo <= self.theta0 && self.theta0 <= hi) {
                return Err(CliError::malformed("theta0 lies outside domain"));
            }
            pc = pc.with_domain(lo, hi);
        }
        let kraus = match (kraus, &self.hnks) {
            (Some(k), _) => Some(k),
            (None, Some(side)) => Some(self.load_sidecar(side)?),
            (None, None) => None,
        };
        let input_state = self
            .input_state
            .as_ref()
            .map(|m| -> Result<DensityMatrix, CliError> {
                Ok(DensityMatrix::new(square(from_json(m, "input_state", false)?, d, "input_state")?)?)
            })
            .transpose()?;
        Ok(LoadedChannel { pc, kraus, input_state })
    }

    fn load_kraus(
        &self,
        ops: &[JsonMatrix],
        t_dot: Option<CMatrix>,
    ) -> Result<(ParamChannel, Option<KrausData>), CliError> {
        let d = self.dim;
        let ks = ops
            .iter()
            .enumerate()
            .map(|(i, m)| square(from_json(m, &format!("kraus[{i}]"), false)?, d, "kraus"))
            .collect::<Result<Vec<_>, _>>()?;
        let ch = KrausChannel::new(ks)?;
        let dots = match &self.kraus_dot {
            Some(list) => {
                if list.len() != ch.ops().len() {
                    return Err(CliError::malformed("kraus_dot must have one entry per Kraus operator"));
                }
                Some(
                    list.iter()
                        .enumerate()
                        .map(|(i, m)| square(from_json(m, &format!("kraus_dot[{i}]"), true)?, d, "kraus_dot"))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            None => None,
        };
        let t = kraus_to_transition(&ch);
        let dot = match (t_dot, &dots) {
            (Some(m), _) => m,
            (None, Some(ds)) => {
                let m = ch.ops().iter().zip(ds).fold(CMatrix::zeros(d * d, d * d), |acc, (k, kd)| {
                    acc + kron(kd, &conj(k)) + kron(k, &conj(kd))
                });
                if !is_finite(&m) {
                    return Err(CliError::malformed(
                        "kraus_dot is not finite; supply t_dot for the transition derivative",
                    ));
                }
                m
            }
            (None, None) => CMatrix::zeros(d * d, d * d),
        };
        let pc = fixed_family(d, self.theta0, t, dot);
        Ok((pc, dots.map(|ds| (ch, ds))))
    }

    fn load_samples(&self, t_dot: Option<CMatrix>) -> Result<ParamChannel, CliError> {
        let d = self.dim;
        let samples = self.samples.as_ref().expect("checked");
        let mut parsed = Vec::with_capacity(samples.len());
        for (i, s) in samples.iter().enumerate() {
            if !s.theta.is_finite() {
                return Err(CliError::malformed(format!("samples[{i}]: theta must be finite")));
            }
            let m = square(from_json(&s.transition, &format!("samples[{i}]"), false)?, d * d, "sample")?;
            parsed.push((s.theta, TransitionMatrix::from_untrusted(m)?));
        }
        parsed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * (1.0 + y.abs());
        let centre = parsed
            .iter()
            .position(|(th, _)| close(*th, self.theta0))
            .ok_or_else(|| CliError::malformed("samples must include theta0"))?;
        let dot = match t_dot {
            Some(m) => m,
            None => {
                if parsed.len() < 2 {
                    return Err(CliError::malformed(
                        "a sampled family needs at least two samples or a t_dot matrix",
                    ));
                }
                let pick = |target: f64| parsed.iter().position(|(th, _)| close(*th, target));
                let (lo, hi) = match self.fd_step {
                    Some(h) => (
                        pick(self.theta0 - h).unwrap_or(centre.saturating_sub(1)),
                        pick(self.theta0 + h).unwrap_or((centre + 1).min(parsed.len() - 1)),
                    ),
                    None => (centre.saturating_sub(1), (centre + 1).min(parsed.len() - 1)),
                };
                if lo == hi {
                    return Err(CliError::malformed("samples do not bracket theta0"));
                }
                let span = parsed[hi].0 - parsed[lo].0;
                (parsed[hi].1.matrix() - parsed[lo].1.matrix()).unscale(span)
            }
        };
        let table = Arc::new(parsed);
        let at: TransitionFn = Arc::new(move |theta| {
            table
                .iter()
                .find(|(th, _)| close(*th, theta))
                .map(|(_, t)| t.clone())
                .ok_or_else(|| Error::InvalidInput(format!("theta = {theta} is not a sampled point")))
        });
        let dot_fn: MatrixFn = Arc::new(move |_| Ok(dot.clone()));
        Ok(ParamChannel::new(d, self.theta0, at, DerivativeMode::Analytic(dot_fn)))
    }

    fn load_sidecar(&self, side: &KrausSidecar) -> Result<(KrausChannel, Vec<CMatrix>), CliError> {
        let d = self.dim;
        let ks = side
            .kraus
            .iter()
            .map(|m| square(from_json(m, "hnks.kraus", false)?, d, "hnks.kraus"))
            .collect::<Result<Vec<_>, _>>()?;
        let ds = side
            .kraus_dot
            .iter()
            .map(|m| square(from_json(m, "hnks.kraus_dot", true)?, d, "hnks.kraus_dot"))
            .collect::<Result<Vec<_>, _>>()?;
        if ks.len() != ds.len() {
            return Err(CliError::malformed("hnks: kraus and kraus_dot lengths differ"));
        }
        Ok((KrausChannel::new(ks)?, ds))
    }
}

/// A family known only at θ₀, with a given derivative there.
fn fixed_family(d: usize, theta0: f64, t: TransitionMatrix, dot: CMatrix) -> ParamChannel {
    let at: TransitionFn = Arc::new(move |theta| {
        if (theta - theta0).abs() <= 1e-12 * (1.0 + theta0.abs()) {
            Ok(t.clone())
        } else {
            Err(Error::InvalidInput(format!(
                "the channel is only known at theta0 = {theta0}"
            )))
        }
    });
    let dot_fn: MatrixFn = Arc::new(move |_| Ok(dot.clone()));
    ParamChannel::new(d, theta0, at, DerivativeMode::Analytic(dot_fn))
}
