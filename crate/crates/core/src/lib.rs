//! Two-generator p-groups of class at most three: normal-form arithmetic,
//! automorphism counts against Hall's bound, and the regular dessins they
//! determine.

pub mod autos;
pub mod dessin;
pub mod oracle;
pub mod params;
pub mod pcgroup;
pub mod structure;

pub use autos::{automorphism_count, AutError, AutReport, CountOptions};
pub use dessin::{combinatorial_map, euler_genus, CombinatorialMap, DessinError, DessinReport};
pub use oracle::{to_cayley, CayleyGroup, OracleError};
pub use params::{
    build_presentation, hall_bound, validate_params, Family, GroupParams, ParamsError,
    PcPresentation,
};
pub use pcgroup::{check_consistency, ConsistencyReport, Element, Gen};
pub use structure::{AbelianType, StructureError};
