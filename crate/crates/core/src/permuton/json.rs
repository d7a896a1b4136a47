//! JSON permuton specs.
//!
//! ```json
//! {"kind": "uniform"}
//! {"kind": "from_permutation", "values": [2, 1]}
//! {"kind": "grid", "matrix": [[0.8, "1/5"], ["1/5", 0.8]]}
//! ```
//!
//! Numeric entries are read from their decimal text, so `0.8` is exactly
//! `4/5`.

use serde::{Deserialize, Serialize};

use super::{AnyPermuton, Entry, GridPermuton, UniformPermuton};
use crate::perm::Permutation;
use crate::rational;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PermutonSpec {
    Uniform,
    FromPermutation { values: Vec<usize> },
    Grid { matrix: Vec<Vec<Entry>> },
}

impl PermutonSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<AnyPermuton> {
        Ok(match self {
            PermutonSpec::Uniform => AnyPermuton::Uniform(UniformPermuton),
            PermutonSpec::FromPermutation { values } => {
                AnyPermuton::Grid(GridPermuton::from_permutation(&Permutation::new(values.clone())?))
            }
            PermutonSpec::Grid { matrix } => {
                let m = matrix
                    .iter()
                    .map(|row| row.iter().map(Entry::to_rational).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                AnyPermuton::Grid(GridPermuton::new(m)?)
            }
        })
    }

    /// Exact `"p/q"` strings for every entry.
    pub fn grid_of(g: &GridPermuton) -> Self {
        let matrix =
            g.matrix().iter().map(|row| row.iter().map(|v| Entry::Text(rational::format(v))).collect()).collect();
        PermutonSpec::Grid { matrix }
    }
}
