//! The external group-file format: a JSON object carrying a modulus and a
//! list of generator matrices, row-major. Unknown keys are ignored, so any
//! `group` or `lift --orbit-index` emission is itself ingestible. Emission
//! reduces entries into 0..m, which makes emit → ingest → emit the identity
//! byte for byte.

use atlas_core::group::MatGroup;
use atlas_core::{AlgebraError, Mat2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub modulus: u64,
    pub generators: Vec<[i64; 4]>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<GroupFile, AlgebraError> {
        serde_json::from_str(text)
            .map_err(|e| AlgebraError::Precondition(format!("invalid group file: {e}")))
    }

    /// Validate the file and generate its group. Non-invertible generators
    /// and out-of-range moduli are rejected; the closure runs under the
    /// default element cap. Returns the canonical (entry-reduced) file
    /// alongside the group.
    pub fn realize(&self) -> Result<(GroupFile, MatGroup), AlgebraError> {
        if self.generators.is_empty() {
            return Err(AlgebraError::Precondition("group file has no generators".into()));
        }
        let mats: Vec<Mat2> = self
            .generators
            .iter()
            .map(|&e| Mat2::new(e, self.modulus))
            .collect::<Result<_, _>>()?;
        let group = MatGroup::closure(&mats)?;
        let canonical = GroupFile {
            modulus: self.modulus,
            generators: mats.iter().map(|m| m.entries().map(i64::from)).collect(),
        };
        Ok((canonical, group))
    }
}
