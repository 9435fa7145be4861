//! Lifting factorization of two-channel causal FIR perfect-reconstruction
//! filter banks.

pub mod analysis;
pub mod bank;
pub mod cca;
pub mod eea;
pub mod error;
pub mod field;
pub mod pmat;
pub mod poly;
pub mod session;
pub mod signatures;

pub use analysis::{cascade_conditioning, ConditionReport};
pub use bank::{builtin, builtin_bank, Builtin, FilterBank, Signal};
pub use cca::{run_schema, Handed, Schema, StepChoice};
pub use eea::{complexity_report, eea_factor, Axis};
pub use error::{Error, Result};
pub use field::{FieldContext, Realization, Scalar};
pub use pmat::{Cascade, CascadeFactor, Coprimification, Perm, PolyMatrix2};
pub use poly::{CausalPoly, Degree, OpCounter};
pub use signatures::{enumerate_left, lifting_signature, LiftingSignature};
