//! SCyTAG-style pipeline: network topology -> Datalog facts -> logical attack
//! graph -> reduced graph -> minimal viable twin plan -> simulated adversary
//! emulation -> utility and effectiveness metrics.
//!
//! Each module maps to one pipeline stage; [`pipeline`] chains them the same
//! way the CLI does, so every stage is independently testable from files.

pub mod ag_engine;
pub mod emu_sim;
pub mod fact_model;
pub mod metrics;
pub mod path_reducer;
pub mod pipeline;
pub mod scenario_mapper;
pub mod twin_builder;
