//! JSON description of a state, shared by every command and report.
//!
//! Either explicit entries,
//! `{"dim": 2, "re": [[0.5, 0.5], [0.5, 0.5]], "im": [[0, 0], [0, 0]]}`,
//! or a named family,
//! `{"named": "werner", "params": {"p": 0.5}}`.
//!
//! The inline form `werner:p=0.5`, `bell:phi-`, `separable:01`,
//! `horodecki:q=0.3` parses to the named variant.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{make_bell, make_horodecki, make_separable, make_werner, BellKind, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bell,
    Separable,
    Werner,
    Horodecki,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDescriptor {
    Named {
        named: Family,
        #[serde(default)]
        params: FamilyParams,
    },
    Explicit {
        dim: usize,
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Vec<Vec<f64>>,
    },
}

impl StateDescriptor {
    pub fn bell(kind: BellKind) -> Self {
        StateDescriptor::Named {
            named: Family::Bell,
            params: FamilyParams { kind: Some(kind.label().into()), ..Default::default() },
        }
    }

    pub fn separable(bits: &str) -> Self {
        StateDescriptor::Named {
            named: Family::Separable,
            params: FamilyParams { bits: Some(bits.into()), ..Default::default() },
        }
    }

    pub fn werner(p: f64) -> Self {
        StateDescriptor::Named { named: Family::Werner, params: FamilyParams { p: Some(p), ..Default::default() } }
    }

    pub fn horodecki(q: f64) -> Self {
        StateDescriptor::Named { named: Family::Horodecki, params: FamilyParams { q: Some(q), ..Default::default() } }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.entries();
        let rows = |f: fn(&Complex64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        StateDescriptor::Explicit { dim: rho.dim(), re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            StateDescriptor::Named { named, params } => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| Error::input(format!("{named:?} state needs parameter '{name}'")))
                };
                match named {
                    Family::Bell => {
                        let kind = params.kind.as_deref().ok_or_else(|| Error::input("bell state needs 'kind'"))?;
                        Ok(make_bell(kind.parse()?))
                    }
                    Family::Separable => {
                        make_separable(params.bits.as_deref().ok_or_else(|| Error::input("separable state needs 'bits'"))?)
                    }
                    Family::Werner => make_werner(need(params.p, "p")?),
                    Family::Horodecki => make_horodecki(need(params.q, "q")?),
                }
            }
            StateDescriptor::Explicit { dim, re, im } => {
                let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == *dim && rows.iter().all(|r| r.len() == *dim);
                if !shape_ok(re) || !(im.is_empty() || shape_ok(im)) {
                    return Err(Error::input(format!("explicit state entries must be {dim}x{dim}")));
                }
                let m = DMatrix::from_fn(*dim, *dim, |i, j| {
                    Complex64::new(re[i][j], if im.is_empty() { 0.0 } else { im[i][j] })
                });
                DensityMatrix::new(m)
            }
        }
    }

    /// Parses `family[:arg[,key=value...]]`.
    pub fn parse_inline(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let named = match name.trim().to_ascii_lowercase().as_str() {
            "bell" => Family::Bell,
            "separable" | "sep" => Family::Separable,
            "werner" => Family::Werner,
            "horodecki" => Family::Horodecki,
            other => return Err(Error::input(format!("unknown state family '{other}'"))),
        };
        let mut params = FamilyParams::default();
        for item in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (key, value) = match item.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (
                    match named {
                        Family::Bell => "kind",
                        Family::Separable => "bits",
                        Family::Werner => "p",
                        Family::Horodecki => "q",
                    },
                    item,
                ),
            };
            let number = || value.parse::<f64>().map_err(|_| Error::input(format!("'{value}' is not a number")));
            match key {
                "kind" => params.kind = Some(value.to_string()),
                "bits" => params.bits = Some(value.to_string()),
                "p" => params.p = Some(number()?),
                "q" => params.q = Some(number()?),
                _ => return Err(Error::input(format!("unknown parameter '{key}'"))),
            }
        }
        let desc = StateDescriptor::Named { named, params };
        desc.build()?;
        Ok(desc)
    }

    /// Inline form when `arg` names a known family, otherwise a JSON file path.
    pub fn load(arg: &str) -> Result<Self> {
        let family = arg.split(':').next().unwrap_or_default().to_ascii_lowercase();
        if ["bell", "separable", "sep", "werner", "horodecki"].contains(&family.as_str()) && !Path::new(arg).exists() {
            return Self::parse_inline(arg);
        }
        let text = std::fs::read_to_string(arg)?;
        let desc: StateDescriptor = serde_json::from_str(&text)?;
        desc.build()?;
        Ok(desc)
    }
}
