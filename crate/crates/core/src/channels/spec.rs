//! JSON channel files.
//!
//! Two shapes are accepted:
//!
//! ```json
//! {"label": "my channel", "dim": 2, "kraus": [[[re, im], ...], ...]}
//! {"kind": "bit_flip", "param": 0.25}
//! ```
//!
//! Matrices are flat row-major lists of `[re, im]` pairs. Floats are written
//! in shortest round-trip form, so parse → serialize is lossless.

use serde::{Deserialize, Serialize};

use super::{named_channel, ChannelKind, KrausMap, NamedChannel};
use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, C64};

/// Flat row-major `[re, im]` encoding of a square matrix.
pub type MatrixJson = Vec<[f64; 2]>;

pub fn encode_matrix(m: &ComplexMatrix) -> MatrixJson {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

pub fn decode_matrix(dim: usize, entries: &[[f64; 2]]) -> Result<ComplexMatrix> {
    if entries.len() != dim * dim {
        return Err(Error::Dimension { expected: dim * dim, found: entries.len() });
    }
    ComplexMatrix::from_vec(dim, dim, entries.iter().map(|[re, im]| C64::new(*re, *im)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Explicit {
        #[serde(default)]
        label: String,
        dim: usize,
        kraus: Vec<MatrixJson>,
    },
    Named {
        kind: ChannelKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<ParamValue>,
    },
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel specs always serialize")
    }

    pub fn from_map(map: &KrausMap) -> Result<Self> {
        let dim = map.square_dim()?;
        Ok(ChannelSpec::Explicit {
            label: map.label().to_string(),
            dim,
            kraus: map.kraus().iter().map(encode_matrix).collect(),
        })
    }

    pub fn from_named(named: &NamedChannel) -> Self {
        let param = match named.params.len() {
            0 => None,
            1 => Some(ParamValue::One(named.params[0])),
            _ => Some(ParamValue::Many(named.params.clone())),
        };
        ChannelSpec::Named { kind: named.kind, param }
    }

    pub fn build(&self) -> Result<KrausMap> {
        match self {
            ChannelSpec::Explicit { label, dim, kraus } => {
                if *dim == 0 {
                    return Err(Error::InvalidParameter("channel dimension must be positive".into()));
                }
                let ops = kraus.iter().map(|k| decode_matrix(*dim, k)).collect::<Result<Vec<_>>>()?;
                KrausMap::new(ops, label.clone())
            }
            ChannelSpec::Named { kind, param } => {
                let params = match param {
                    None => vec![],
                    Some(ParamValue::One(p)) => vec![*p],
                    Some(ParamValue::Many(ps)) => ps.clone(),
                };
                named_channel(*kind, &params)
            }
        }
    }
}
