//! File formats, the end-to-end solver and grid sweeps on top of `sqoa-core`.

pub mod error;
pub mod io;
pub mod pipeline;
pub mod sweep;

pub use error::{Error, Result};
pub use sqoa_core;
