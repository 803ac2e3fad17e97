//! Runtime caps shared by the search and pairing routines.

use serde::{Deserialize, Serialize};

use crate::error::HfError;

/// Guard rails for enumeration, box-product evaluation, and localized
/// homology searches. All caps must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    /// Maximum number of candidate classes an enumeration may visit.
    pub enumeration_cap: u64,
    /// Maximum delta-path length explored by a box tensor product.
    pub box_path_cap: usize,
    /// Maximum U/V exponent used in localized searches.
    pub uv_exponent_cap: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            enumeration_cap: 1 << 20,
            box_path_cap: 64,
            uv_exponent_cap: 3,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), HfError> {
        if self.enumeration_cap == 0 || self.box_path_cap == 0 || self.uv_exponent_cap == 0 {
            return Err(HfError::Invalid("all caps must be positive".into()));
        }
        Ok(())
    }
}
