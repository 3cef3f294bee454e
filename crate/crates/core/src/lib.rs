//! Classical mechanics of a charged particle on a noncommutative plane (or
//! n-space): exact Poisson algebra, the generalized gauge transformation as a
//! series in θ, bracket structures, θ-deformed equations of motion and the
//! Darboux-coordinate Lagrangian.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod darboux;
pub mod dynamics;
pub mod gauge;
pub mod polyalg;
pub mod structure;
