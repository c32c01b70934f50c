//! Exact and numerical tools for binary forms `F(X, Y)` over the integers:
//! regular families of forms, counts of represented integers, areas of
//! fundamental domains `{|F| ≤ 1}`, automorphism and isomorphism decisions
//! over `ℚ`, the exponent system `η_d, θ_d, κ_d`, and executable checks
//! of the supporting analytic lemmas.

pub mod areas;
pub mod arith;
pub mod checks;
pub mod counting;
pub mod exponents;
pub mod families;
pub mod forms;
pub mod quadrature;
pub mod structure;

pub use forms::{
    make_form, root_proximity_constants, BinaryForm, CappedInteger, ExactRoot, FormError, ProjPoint, RationalMatrix,
    RootSet, DEFAULT_CAP,
};
pub use areas::{area, AutClass};
pub use checks::CheckOutcome;
pub use counting::{count_common, count_nn, count_r, CountOptions, CountReport};
pub use families::{parse_member, FamilyId, RegularityTuple, SquarefreeSequence};
pub use structure::{automorphisms, is_isomorphic, AutGroup, Homography, IsoVerdict, NoCertificate, P1};
