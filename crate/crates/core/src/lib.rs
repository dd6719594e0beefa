//! Non-Hermitian quantum dynamics through generalized operator brackets.
//!
//! * [`operator`]: dense complex operators, Hermitian splitting, commutators,
//!   exponentials and guarded inverses.
//! * [`bracket`]: the 2×2 operator-valued bracket matrices `Ω`, `Ω₋₊`, `Λ`
//!   and `Ω_ξ`, and the identities relating them to commutators.
//! * [`dynamics`]: Heisenberg and Schrödinger evolution, exact propagators,
//!   RK4, expectation values and the picture gap.
//! * [`dsl`]: the operator expression language.
//! * [`scenario`], [`timeseries`], [`verify`]: the batch front-end.

pub mod bracket;
pub mod dsl;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod sampling;
pub mod scenario;
pub mod timeseries;
pub mod verify;

pub use error::{Error, Result};
pub use operator::{Operator, C64};
