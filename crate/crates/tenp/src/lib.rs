//! Task- and energy-aware placement of wirelessly rechargeable sensor
//! nodes on a grid.
//!
//! Sensors must sit close enough to their task to meet its utility
//! requirement (utility is the reciprocal Manhattan distance) and on a cell
//! receiving enough RF charge from the energy transmitters to meet a global
//! charging requirement. The crate provides:
//!
//! - [`solver::distance_minimization`]: the greedy placement heuristic,
//!   deterministic and partial-solution preserving;
//! - [`oracle::exact_solve`]: an exhaustive exact solver for small
//!   instances, plus a search for instances the greedy gets wrong;
//! - [`sim::simulate`]: the frame-structured charging simulation with the
//!   two evaluation metrics;
//! - [`sweep`]: parameter sweeps over the charging requirement and the
//!   task utility requirement, stall detection, and per-variant summaries;
//! - [`config`]: strict TOML instance configs, placement artifacts, and
//!   CSV emission.

pub mod config;
pub mod constraints;
pub mod model;
pub mod oracle;
pub mod radio;
pub mod sim;
pub mod solver;
pub mod sweep;

pub use model::{
    Cell, EnergyTransmitter, GridEnvironment, Placement, ProblemInstance, ProblemVariant,
    SensorId, SensorTaskPartition, Task, TaskId, Verdict, build_environment, manhattan_distance,
};
pub use radio::{ChargeAmount, RadioParams};
