//! Fixture language, theorem harness runner and command implementations for
//! the `lechkit` binary.

pub mod commands;
pub mod dsl;
pub mod fixture;
pub mod harness;
pub mod registry;
