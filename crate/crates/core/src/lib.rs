//! Numerics for the partial theta function
//! `theta(q, z) = sum_{j >= 0} q^{j(j+1)/2} z^j` with `0 < |q| < 1`.
//!
//! [`series`] evaluates `theta`, its relatives and the triple-product factors
//! with rigorous truncation bounds; [`zeros`] counts and locates zeros in
//! `z`; [`lemmas`] re-checks the numerical inequalities behind the
//! strong-separation property on the left half of the unit disk;
//! [`asymptotics`] tabulates zero-free radii for large `k`.

pub mod asymptotics;
pub mod error;
pub mod lemmas;
pub mod series;
pub mod types;
pub mod zeros;

pub use error::{Result, ThetaError};
pub use lemmas::{GridSpec, VerificationReport};
pub use series::{EvalResult, SeriesBudget, ThetaStarMethod};
pub use types::{ComplexPoint, QParameter, C0};
pub use zeros::{Annulus, SeparationReport, SeparationVerdict, ZeroRecord};
