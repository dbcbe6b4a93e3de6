//! Drivers, file formats and the command-line front end for
//! [`kacward_core`].
//!
//! The core crate holds every route as a pure, single-threaded function;
//! this crate splits the expensive ones across a thread pool
//! ([`parallel`]), serializes results ([`report`]), ships the reference
//! amplitude fixtures ([`fixtures`]) and bundles the cross-route checks into
//! one suite ([`verify`]) that the CLI exposes.

pub mod cli;
pub mod fixtures;
pub mod parallel;
pub mod report;
pub mod verify;

pub use kacward_core as core;
