//! Truncated Fock-space representation of m mode pairs shared between two
//! sides A and B.

pub mod density;
pub mod entropy;
pub mod ket;
pub mod occupation;
pub mod ops;

use serde::{Deserialize, Serialize};

pub use density::DensityOperator;
pub use entropy::{reduced_entropy_dense, schmidt_entropy, EntropyUnit, DENSE_LIMIT};
pub use ket::{KetRecord, PairKey, SparseKet, DEFAULT_PRUNE};
pub use occupation::{compositions, Occupation};
pub use ops::{
    apply_annihilation, apply_number_damping, make_tmss_auto, make_tmss_pairs,
    maximal_sector_state, project_sector, project_total_number, required_j_max, tail_mass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}
