use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{c, KrausMap};
use crate::error::{Error, Result};
use crate::qcore::{sigma_x, sigma_y, sigma_z, ComplexMatrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Identity,
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    GeneralizedAmplitudeDamping,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 7] = [
        ChannelKind::Identity,
        ChannelKind::BitFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
        ChannelKind::GeneralizedAmplitudeDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Identity => "identity",
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::PhaseFlip => "phase_flip",
            ChannelKind::BitPhaseFlip => "bit_phase_flip",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
            ChannelKind::GeneralizedAmplitudeDamping => "generalized_amplitude_damping",
        }
    }

    /// Number of real parameters the kind expects.
    pub fn arity(self) -> usize {
        match self {
            ChannelKind::Identity => 0,
            ChannelKind::GeneralizedAmplitudeDamping => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownChannel(s.to_string()))
    }
}

/// A named noise model with its parameters, e.g. `bit_flip:0.25` or
/// `generalized_amplitude_damping:0.3,0.1` (damping rate, thermal weight).
#[derive(Debug, Clone, PartialEq)]
pub struct NamedChannel {
    pub kind: ChannelKind,
    pub params: Vec<f64>,
}

impl NamedChannel {
    pub fn new(kind: ChannelKind, params: &[f64]) -> Self {
        NamedChannel { kind, params: params.to_vec() }
    }

    pub fn build(&self) -> Result<KrausMap> {
        named_channel(self.kind, &self.params)
    }
}

impl fmt::Display for NamedChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, ":{}", ps.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for NamedChannel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), Some(r)),
            None => (s.trim(), None),
        };
        let kind: ChannelKind = kind.parse()?;
        let params = match rest {
            None => Vec::new(),
            Some(r) => r
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("parameter `{p}`: {e}"))))
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(NamedChannel { kind, params })
    }
}

fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(value.is_finite() && value >= lo && value <= hi) {
        return Err(Error::InvalidParameter(format!("{name} = {value} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Standard qubit noise models.
///
/// Flip probabilities live in `[0, 1/2]`; depolarizing strength, damping rate
/// and thermal weight in `[0, 1]`.
pub fn named_channel(kind: ChannelKind, params: &[f64]) -> Result<KrausMap> {
    if params.len() != kind.arity() {
        return Err(Error::InvalidParameter(format!(
            "{kind} expects {} parameter(s), got {}",
            kind.arity(),
            params.len()
        )));
    }
    let id = ComplexMatrix::identity(2);
    let flip = |p: f64, sigma: ComplexMatrix| -> Result<Vec<ComplexMatrix>> {
        check_range("flip probability", p, 0.0, 0.5)?;
        Ok(vec![id.scale_real((1.0 - p).sqrt()), sigma.scale_real(p.sqrt())])
    };
    let damping = |eta: f64| {
        vec![
            ComplexMatrix::from_rows(&[[c(1.0), ZERO], [ZERO, c((1.0 - eta).sqrt())]]),
            ComplexMatrix::from_rows(&[[ZERO, c(eta.sqrt())], [ZERO, ZERO]]),
        ]
    };
    let kraus = match kind {
        ChannelKind::Identity => vec![id.clone()],
        ChannelKind::BitFlip => flip(params[0], sigma_x())?,
        ChannelKind::PhaseFlip => flip(params[0], sigma_z())?,
        ChannelKind::BitPhaseFlip => flip(params[0], sigma_y())?,
        ChannelKind::Depolarizing => {
            let p = params[0];
            check_range("depolarizing strength", p, 0.0, 1.0)?;
            let w = (p / 4.0).sqrt();
            vec![
                id.scale_real((1.0 - 3.0 * p / 4.0).sqrt()),
                sigma_x().scale_real(w),
                sigma_y().scale_real(w),
                sigma_z().scale_real(w),
            ]
        }
        ChannelKind::AmplitudeDamping => {
            check_range("damping rate", params[0], 0.0, 1.0)?;
            damping(params[0])
        }
        ChannelKind::GeneralizedAmplitudeDamping => {
            let (eta, nth) = (params[0], params[1]);
            check_range("damping rate", eta, 0.0, 1.0)?;
            check_range("thermal weight", nth, 0.0, 1.0)?;
            let down = (1.0 - nth).sqrt();
            let up = nth.sqrt();
            let mut ks: Vec<ComplexMatrix> = damping(eta).iter().map(|k| k.scale_real(down)).collect();
            ks.push(ComplexMatrix::from_rows(&[[c((1.0 - eta).sqrt() * up), ZERO], [ZERO, c(up)]]));
            ks.push(ComplexMatrix::from_rows(&[[ZERO, ZERO], [c((eta).sqrt() * up), ZERO]]));
            ks
        }
    };
    let label = NamedChannel::new(kind, params).to_string();
    KrausMap::new(kraus, label)
}
