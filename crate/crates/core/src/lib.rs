//! Exact, combinatorial and closed-form routes to the free-field 2D Ising
//! model on the planar square lattice.
//!
//! The crate is `no_std` (it needs `alloc`). Every route is a pure function
//! over immutable inputs so callers can split work by index range and merge
//! the partial results in a fixed order; the `kacward` crate does exactly
//! that with a thread pool.
//!
//! Routes:
//!
//! - [`hightemp`]: brute-force spin sums and the even-subgraph expansion.
//! - [`paths`]: closed non-backtracking words, winding signs, and the
//!   product of `1 + W_p` over path classes as an exact polynomial.
//! - [`transfer`]: direction-resolved amplitude recursions, the 4×4
//!   momentum-space step matrix and its trace / log-determinant integrals.
//! - [`onsager`]: thermodynamic-limit free energy, internal energy and
//!   specific heat.
#![no_std]

extern crate alloc;

mod error;
pub mod hightemp;
pub mod lattice;
pub mod math;
pub mod onsager;
pub mod paths;
pub mod poly;
pub mod quadrature;
pub mod transfer;

pub use error::{Error, Result};
pub use lattice::{Bond, BondId, Direction, Lattice, Site, SpinConfig, Turn};
pub use poly::IntPolynomial;
