//! Exact p-adic arithmetic and the dynamics of Henon maps over Q_p (odd p):
//! parameter-region classification, filtration and escape certificates,
//! fixed points and 2-cycles, finite ball dynamics (cycle structure of the
//! reduced map, attractor analysis, orbit equidistribution), and the
//! region-III symbolic coding conjugating the map to the two-sided shift.

pub mod ball_dynamics;
pub mod error;
pub mod henon;
pub mod horseshoe;
pub mod localfield;
pub mod periodic;

pub use error::{Error, Result};
pub use henon::{
    HenonParams, OrbitFate, OrbitTrace, PlanePoint, RegionTag, SectorFlags,
};
pub use localfield::{HalfLogNorm, NormBound, PadicNumber};
