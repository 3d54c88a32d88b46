//! JSON form of a BF instance.
//!
//! ```json
//! {
//!   "p": 3, "m": 2,
//!   "groups": { "A": [2], "B": [2], "C": [2] },
//!   "d": [[1]],
//!   "pairing": [[1]],
//!   "grading": { "A": [0], "B": [0], "C": [0] }
//! }
//! ```
//!
//! Group entries are exponents r_i of cyclic factors Z/p^{r_i}. `d` has one
//! row per generator of C and one column per generator of A; `pairing` has
//! one row per generator of C and one column per generator of B, holding
//! p^m·⟨c_i, b_j⟩. `grading` is optional.

use serde::{Deserialize, Serialize};

use super::{BFInstance, FiniteAbelianPGroup, Grading, Homomorphism, Pairing};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Triple<T> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
    #[serde(rename = "C")]
    pub c: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub p: u64,
    pub m: u32,
    pub groups: Triple<Vec<u32>>,
    pub d: Vec<Vec<i64>>,
    pub pairing: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Triple<Vec<u64>>>,
}

impl InstanceDoc {
    pub fn parse(text: &str) -> Result<InstanceDoc> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_instance(&self) -> Result<BFInstance> {
        if self.m == 0 {
            return Err(Error::Schema("m must be at least 1".into()));
        }
        let group = |e: &Vec<u32>| {
            FiniteAbelianPGroup::new(self.p, e.clone()).map_err(|e| Error::Schema(e.to_string()))
        };
        let a = group(&self.groups.a)?;
        let b = group(&self.groups.b)?;
        let c = group(&self.groups.c)?;
        let d = Homomorphism::new(a, c.clone(), self.d.clone())?;
        let pairing = Pairing::new(c, b, self.m, self.pairing.clone())?;
        let grading = self.grading.as_ref().map(|g| Grading { a: g.a.clone(), b: g.b.clone(), c: g.c.clone() });
        BFInstance::new(d, pairing, grading)
    }

    pub fn from_instance(inst: &BFInstance) -> InstanceDoc {
        let signed = |m: &[Vec<u64>]| -> Vec<Vec<i64>> {
            m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect()
        };
        InstanceDoc {
            p: inst.p(),
            m: inst.m(),
            groups: Triple {
                a: inst.a().exponents().to_vec(),
                b: inst.b().exponents().to_vec(),
                c: inst.c().exponents().to_vec(),
            },
            d: signed(inst.d().matrix()),
            pairing: signed(inst.pairing().matrix()),
            grading: inst.grading().map(|g| Triple { a: g.a.clone(), b: g.b.clone(), c: g.c.clone() }),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<BFInstance> {
    InstanceDoc::parse(text)?.to_instance()
}
