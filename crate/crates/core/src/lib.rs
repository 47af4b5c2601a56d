//! Quantum Simulation Logic.
//!
//! Every simulated qubit is a pair of classical bits, one computational and
//! one phase, with gate and measurement rules chosen so that the usual circuit
//! identities hold. On top of that sit query-counting Deutsch-Jozsa and Simon
//! oracles, the solvers that run against them, classical baselines, and a
//! small dense statevector simulator used to check the QSL outputs against
//! real quantum predictions.
//!
//! ```
//! use qsl_core::{algorithms, oracles, DjKind, DjOracleSpec, PermSpec, RngStream};
//!
//! let spec = DjOracleSpec::new(3, DjKind::Balanced(PermSpec::identity(3))).unwrap();
//! let mut oracle = oracles::build_dj_oracle(&spec).unwrap();
//! let result = algorithms::deutsch_jozsa(&mut oracle, &mut RngStream::new(1, 0)).unwrap();
//! assert_eq!(result.verdict, algorithms::DjVerdict::Balanced);
//! assert_eq!(result.queries, 1);
//! ```

pub mod algorithms;
pub mod circuit;
pub mod experiment;
pub mod gf2;
pub mod oracles;
pub mod perm;
pub mod reference;
pub mod register;
pub mod rng;

pub use circuit::{Circuit, GateOp};
pub use gf2::{BitMatrix, BitVec, SecretSolution};
pub use oracles::{DjKind, DjOracleSpec, Oracle, OracleSpec, SimonOracleSpec};
pub use perm::{PermSpec, RevGate};
pub use register::{QslBit, QslError, QslRegister};
pub use rng::RngStream;
