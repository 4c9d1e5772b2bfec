//! Multipartite entanglement purification of stabilizer states with
//! stabilizer codes: signed Pauli algebra over bit-packed symplectic rows,
//! stabilizer groups with exact sign tracking, code classification,
//! multi-party parity-check construction, and purification-round simulation
//! with exact and Monte Carlo reporting.

mod gf2;

pub mod codes;
pub mod dense;
pub mod multicopy;
pub mod pauli;
pub mod stab;

pub use codes::{StabilizerCode, Syndrome, SyndromeTable};
pub use multicopy::{
    build_check_plan, build_rotated_check_plan, class_compatibility, decoded_logical_group,
    CheckPlan, CodeClass, IncompatibilityReport, MultiCopySetup, OperatorArray,
};
pub use pauli::{Factor, PauliError, PauliProduct, Sign};
pub use stab::{
    classify_state, random_stabilizer_state, CanonicalForm, GroupError, PauliGroup,
    StabilizerState, StateClass,
};
