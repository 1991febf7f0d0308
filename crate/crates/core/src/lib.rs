//! Polynomial conformal models for finite Blaschke products.
//!
//! For a finite Blaschke product `B` of degree at most three, or of any degree
//! when its zeros are equally spaced on a circle about the origin, this crate
//! constructs a polynomial `p` of the same degree and an injective analytic
//! map `phi` on the unit disk with `B = p o phi`.

pub mod algebra;
pub mod blaschke;
pub mod continuation;
pub mod error;
mod geometry;
pub mod modeler;
pub mod render;
pub mod verify;

pub use algebra::{Complex, ComplexPolynomial, ComplexRational};
pub use blaschke::{CriticalData, EquallySpacedForm, FiniteBlaschkeProduct, MobiusDisk};
pub use continuation::{BranchGrid, PolarGridSpec};
pub use error::{Error, Result};
pub use modeler::{
    model, model_with, ConformalModel, DepressedCubic, ModelCase, ModelOptions, PhiRepresentation,
};
pub use verify::{verify_model, Tolerances, VerificationReport};
