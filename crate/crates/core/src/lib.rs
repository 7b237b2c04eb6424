//! Exact finite-field incidence geometry.
//!
//! Everything here works at desk scale over `F_q` with `q = p^r` odd:
//! rigid motions `x -> gx + z` with `g` orthogonal, incidences between point
//! pairs and motions, congruence classes of simplices, the reduction of
//! oriented motions to lines of `F_q^3`, and unions of motion images.
//! Asymptotic bounds are turned into [`report::AuditReport`]s carrying the
//! empirical constant an instance implies.

pub mod calibrate;
pub mod constructions;
mod error;
pub mod ffield;
pub mod guard;
pub mod incidence;
pub mod lineworld;
pub mod manifest;
pub mod motions;
pub mod report;
pub mod rng;
pub mod simplex;

pub use error::{Error, Result};
pub use ffield::{Elem, Field, Point};
pub use guard::Guardrails;
pub use incidence::PairSet;
pub use motions::{MotionClass, OrthoMatrix, RigidMotion};
pub use report::AuditReport;
pub use simplex::{LabeledSimplex, SimplexKey};
