//! Minimal segment list compilation for deterministic network paths, with
//! the surrounding machinery: topology model, ECMP routing state, SID
//! numbering and forwarding tables, a forwarding simulator that checks a
//! segment list realizes exactly one intended path, and a two-phase traffic
//! engineering heuristic producing the paths worth compiling.
//!
//! The crate is no_std with `alloc` so the algorithms stay portable; disk,
//! clocks and file formats live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod fwdsim;
pub mod path;
pub mod routing;
pub mod sid;
pub mod srcompile;
pub mod te;
#[cfg(feature = "testutil")]
pub mod testutil;
pub mod topology;
