//! JSON instance files and serde helpers for signals.
//!
//! Instance schema:
//!
//! ```text
//! { "n": .., "m": .., "field": "real" | "complex", "seed": ..,
//!   "A": [[[re, im], ...] per row], "b": [...], "eta": [...],
//!   "xhat": [[re, im], ...], "x0": [[re, im], ...] (optional) }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so write-read cycles are bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::{MeasurementEnsemble, ProblemInstance};
use crate::error::{Error, Result};
use crate::linalg::{Cx, Field, MeasurementMatrix, Signal};

type Pair = [f64; 2];

fn to_pairs(v: &[Cx]) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(v: &[Pair]) -> Vec<Cx> {
    v.iter().map(|p| Cx::new(p[0], p[1])).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub field: Field,
    pub seed: u64,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Pair>>,
    pub b: Vec<f64>,
    pub eta: Vec<f64>,
    pub xhat: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<Pair>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let e = &inst.ensemble;
        Self {
            n: e.n(),
            m: e.m(),
            field: e.field(),
            seed: e.seed,
            a: (0..e.m()).map(|i| to_pairs(e.matrix.row(i).entries())).collect(),
            b: e.magnitudes.clone(),
            eta: e.noise.clone(),
            xhat: to_pairs(inst.xhat.entries()),
            x0: inst.truth.as_ref().map(|t| to_pairs(t.entries())),
        }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let bad = |what: &str| Error::Format(what.to_string());
        if self.n == 0 || self.m == 0 {
            return Err(bad("n and m must be positive"));
        }
        if self.a.len() != self.m || self.b.len() != self.m || self.eta.len() != self.m {
            return Err(bad("A, b and eta must each have m entries"));
        }
        if self.xhat.len() != self.n || self.a.iter().any(|r| r.len() != self.n) {
            return Err(bad("rows of A and xhat must have n entries"));
        }
        let sig = |v: &[Pair]| {
            Signal::new(from_pairs(v), self.field)
                .map_err(|_| bad("real-field signal with nonzero imaginary part"))
        };
        let rows = self.a.iter().map(|r| sig(r)).collect::<Result<Vec<_>>>()?;
        let matrix = MeasurementMatrix::from_rows(&rows)?;
        let ensemble = MeasurementEnsemble::new(matrix, self.b.clone(), self.eta.clone(), self.seed)?;
        let xhat = sig(&self.xhat)?;
        let truth = match &self.x0 {
            Some(v) if v.len() != self.n => return Err(bad("x0 must have n entries")),
            Some(v) => Some(sig(v)?),
            None => None,
        };
        ProblemInstance::new(ensemble, xhat, truth)
    }
}

pub fn instance_to_json(inst: &ProblemInstance) -> String {
    serde_json::to_string(&InstanceFile::from_instance(inst)).expect("instance serializes")
}

pub fn instance_from_json(s: &str) -> Result<ProblemInstance> {
    let f: InstanceFile = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
    f.to_instance()
}

pub fn write_instance(path: &Path, inst: &ProblemInstance) -> Result<()> {
    std::fs::write(path, instance_to_json(inst))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

/// Serializes a `Signal` as `{"field": .., "entries": [[re, im], ...]}`.
pub mod signal_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{from_pairs, to_pairs, Pair};
    use crate::linalg::{Field, Signal};

    #[derive(Serialize, Deserialize)]
    pub(super) struct Repr {
        field: Field,
        entries: Vec<Pair>,
    }

    impl Repr {
        pub(super) fn of(x: &Signal) -> Self {
            Repr {
                field: x.field(),
                entries: to_pairs(x.entries()),
            }
        }

        pub(super) fn into_signal<E: serde::de::Error>(self) -> Result<Signal, E> {
            Signal::new(from_pairs(&self.entries), self.field).map_err(E::custom)
        }
    }

    pub fn serialize<S: Serializer>(x: &Signal, s: S) -> Result<S::Ok, S::Error> {
        Repr::of(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Signal, D::Error> {
        Repr::deserialize(d)?.into_signal()
    }
}

pub mod opt_signal_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::signal_serde::Repr;
    use crate::linalg::Signal;

    pub fn serialize<S: Serializer>(x: &Option<Signal>, s: S) -> Result<S::Ok, S::Error> {
        x.as_ref().map(Repr::of).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Signal>, D::Error> {
        Option::<Repr>::deserialize(d)?
            .map(Repr::into_signal)
            .transpose()
    }
}
