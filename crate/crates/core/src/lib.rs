//! Swap-insertion scheduling for phase-separation circuits on fixed qubit
//! chips.
//!
//! Build an [`instance::Instance`], route it with [`router`], search it
//! exactly with [`cpsolver`] or combine both through [`hybrid`]. Every
//! schedule can be checked with [`schedule::validate`]; [`bench`] holds the
//! benchmark matrix, Gantt charts and the command line.

pub mod bench;
pub mod bounds;
pub mod budget;
pub mod cpsolver;
pub mod hybrid;
pub mod instance;
pub mod router;
pub mod schedule;
