//! Symbolic and numeric machinery for generating stabilizer Hamiltonians on
//! coupled-qubit lattices with pulse sequences.

pub mod codes;
pub mod compile;
pub mod error;
pub mod lattice;
pub mod pauli;
pub mod prep;
pub mod sim;
pub mod text;

pub use error::{Error, Result};
pub use pauli::{Angle, Axis, ElementaryOp, PauliString, PauliSum, Phase};

use serde::{Deserialize, Serialize};

/// The two always-on coupling types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InteractionKind {
    Xy,
    Ising,
}

impl InteractionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InteractionKind::Xy => "xy",
            InteractionKind::Ising => "ising",
        }
    }
}

impl std::fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for InteractionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xy" => Ok(InteractionKind::Xy),
            "ising" | "zz" => Ok(InteractionKind::Ising),
            other => Err(Error::Parse(format!("unknown interaction kind `{other}`"))),
        }
    }
}
