//! Integer index identities: mapping degrees, Poincaré–Hopf sums and the verifiers
//! that compare the signed strata counts against them.

mod degree;
mod fields;

pub use degree::*;
pub use fields::*;
mod verify;

pub use verify::*;
