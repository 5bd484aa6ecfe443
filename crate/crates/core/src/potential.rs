//! Radial potentials `q(r)` on `[0, R]`.
//!
//! JSON form:
//!
//! ```json
//! {"kind": "constant", "value": [-0.25, 0.0], "radius": 1.0}
//! {"kind": "polynomial", "coeffs": [[1.0, 0.0], [0.0, 0.0], [-2.0, 0.5]], "radius": 1.0}
//! {"kind": "tabulated", "nodes": [[0.0, 1.0, 0.0], [0.5, 0.8, 0.0], [1.0, 0.2, 0.0]], "radius": 1.0}
//! ```
//!
//! Complex numbers are `[re, im]`; a bare number is read as a real value.
//! Tabulated nodes are `[r, re, im]` (or `[r, re]`) and are interpolated by
//! local cubic Lagrange polynomials.

use num_complex::Complex64 as C64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialKind {
    Constant {
        #[serde(with = "complex_json")]
        value: C64,
    },
    /// `q(r) = Σ coeffs[k]·r^k`.
    Polynomial {
        #[serde(with = "complex_json::list")]
        coeffs: Vec<C64>,
    },
    Tabulated { nodes: Vec<TabulatedNode> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TabulatedNode {
    pub r: f64,
    pub value: C64,
}

impl Serialize for TabulatedNode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        seq.serialize_element(&self.r)?;
        seq.serialize_element(&self.value.re)?;
        seq.serialize_element(&self.value.im)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for TabulatedNode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        match raw.as_slice() {
            &[r, re] => Ok(TabulatedNode { r, value: C64::new(re, 0.0) }),
            &[r, re, im] => Ok(TabulatedNode { r, value: C64::new(re, im) }),
            _ => Err(de::Error::custom("tabulated node must be [r, re] or [r, re, im]")),
        }
    }
}

/// A potential together with the radius of the disk it lives on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    pub radius: f64,
}

impl PotentialSpec {
    pub fn constant(value: C64, radius: f64) -> Result<Self> {
        PotentialSpec { kind: PotentialKind::Constant { value }, radius }.validated()
    }

    pub fn zero(radius: f64) -> Result<Self> {
        Self::constant(C64::new(0.0, 0.0), radius)
    }

    pub fn polynomial(coeffs: Vec<C64>, radius: f64) -> Result<Self> {
        PotentialSpec { kind: PotentialKind::Polynomial { coeffs }, radius }.validated()
    }

    pub fn tabulated(nodes: Vec<TabulatedNode>, radius: f64) -> Result<Self> {
        PotentialSpec { kind: PotentialKind::Tabulated { nodes }, radius }.validated()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PotentialSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidPotential(e.to_string()))?;
        spec.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPotential(msg));
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        match &self.kind {
            PotentialKind::Constant { value } => {
                if !value.is_finite() {
                    return bad("constant value is not finite".into());
                }
            }
            PotentialKind::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return bad("polynomial coefficient is not finite".into());
                }
            }
            PotentialKind::Tabulated { nodes } => {
                if nodes.len() < 2 {
                    return bad("tabulated potential needs at least two nodes".into());
                }
                if nodes[0].r != 0.0 {
                    return bad(format!("first tabulated node must be at r = 0, got {}", nodes[0].r));
                }
                if nodes.windows(2).any(|w| !(w[1].r > w[0].r)) {
                    return bad("tabulated nodes must be strictly increasing".into());
                }
                let last = nodes[nodes.len() - 1].r;
                if last < self.radius * (1.0 - 1e-12) {
                    return bad(format!("tabulated nodes end at {last}, short of R = {}", self.radius));
                }
                if nodes.iter().any(|n| !n.r.is_finite() || !n.value.is_finite()) {
                    return bad("tabulated node is not finite".into());
                }
            }
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `q(r)`.
    pub fn eval(&self, r: f64) -> C64 {
        match &self.kind {
            PotentialKind::Constant { value } => *value,
            PotentialKind::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(C64::new(0.0, 0.0), |acc, &c| acc * r + c),
            PotentialKind::Tabulated { nodes } => eval_tabulated(nodes, r),
        }
    }

    /// True when `q ≡ 0` by construction.
    pub fn is_identically_zero(&self) -> bool {
        let zero = C64::new(0.0, 0.0);
        match &self.kind {
            PotentialKind::Constant { value } => *value == zero,
            PotentialKind::Polynomial { coeffs } => coeffs.iter().all(|&c| c == zero),
            PotentialKind::Tabulated { nodes } => nodes.iter().all(|n| n.value == zero),
        }
    }
}

fn eval_tabulated(nodes: &[TabulatedNode], r: f64) -> C64 {
    let n = nodes.len();
    // Index of the last node with nodes[i].r <= r.
    let i = nodes.partition_point(|node| node.r <= r).saturating_sub(1);
    if nodes[i].r == r {
        return nodes[i].value;
    }
    let lo = i.saturating_sub(1).min(n.saturating_sub(4));
    let hi = (lo + 4).min(n);
    let stencil = &nodes[lo..hi];
    stencil
        .iter()
        .enumerate()
        .map(|(j, nj)| {
            let l: f64 = stencil
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, nk)| (r - nk.r) / (nj.r - nk.r))
                .product();
            nj.value * l
        })
        .sum()
}

/// Serde helpers for complex numbers written as `[re, im]`.
pub(crate) mod complex_json {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Pair([f64; 2]),
        Real(f64),
    }

    impl From<Repr> for C64 {
        fn from(r: Repr) -> C64 {
            match r {
                Repr::Pair([re, im]) => C64::new(re, im),
                Repr::Real(re) => C64::new(re, 0.0),
            }
        }
    }

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        Ok(Repr::deserialize(d)?.into())
    }

    pub mod list {
        use super::*;

        pub fn serialize<S: Serializer>(zs: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
            let pairs: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
            pairs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<C64>, D::Error> {
            Ok(Vec::<Repr>::deserialize(d)?.into_iter().map(C64::from).collect())
        }
    }
}
