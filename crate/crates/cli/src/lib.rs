//! Support library for the `posthoc` binary: error/exit-code mapping, file
//! formats, and the simulation driver. The command definitions live in the
//! binary; everything testable sits here.

pub mod error;
pub mod formats;
pub mod sim;
