//! Sharp integral John–Nirenberg inequality for BMO with the quadratic norm
//! `‖φ‖ = sup_J (⟨φ²⟩_J - ⟨φ⟩_J²)^{1/2}`.
//!
//! For `φ` with `‖φ‖ ≤ ε` the averages `⟨e^φ⟩` are controlled by the Bellman
//! functions `B±_δ` evaluated at `(⟨φ⟩, ⟨φ²⟩)`: `δ = ε` on intervals and
//! `δ = δ±(ε)` on dyadic intervals. This crate computes those functions, the
//! sharp constants, explicit extremizers, and numerical checks of every step
//! of the argument.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example sharp_constants
//! cargo run --example bellman_surface
//! cargo run --example continuous_extremal
//! cargo run --example dyadic_extremal
//! cargo run --example interval_split
//! cargo run --example two_stage_scan
//! cargo run --example bellman_induction
//! cargo run --example brute_force_oracle
//! cargo run --example conjectured_dimensions
//! ```
//!
//! and the `jn-bellman` binary for `constants`, `eval`, `extremal`, `verify`
//! and `sweep`.

pub mod bellman;
pub mod cli;
pub mod constants;
pub mod domain;
pub mod error;
pub mod extremal;
pub mod piecewise;
pub mod verify;

pub use bellman::{bellman_derivatives, bellman_value, quadratic_form, w_profile, Sign};
pub use constants::{c_continuous, c_dyadic, conjectured_nd, delta_root, ExtendedValue};
pub use domain::{BellmanPoint, ParabolicStrip};
pub use error::{Error, Result};
pub use piecewise::{DyadicStepFunction, MomentTriple, Moments, PiecewiseFunction};
