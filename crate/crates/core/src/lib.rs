pub mod codes;
pub mod correction;
pub mod eec;
pub mod error;
pub mod faultsim;
pub mod harness;
pub mod pauli;
pub mod protocol;
pub mod stab;
pub mod zmod;

pub use error::{Error, Result};
pub use pauli::PauliOp;
pub use stab::{CanonicalGenSet, StabilizerGroup, SyndromeRecord};
