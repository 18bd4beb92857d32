//! Influence diagrams compiled into strong junction trees and solved by
//! collect-to-root message passing.
//!
//! ```
//! use idjt::{compile, model::parse_model, solver::solve, Heuristic};
//!
//! let src = "
//!     decision D states d1 d2 index 1
//!     chance x states lo hi stage 1
//!     cpt x given D : 0.8 0.2 0.4 0.6
//!     utility u over x : 0 10
//! ";
//! let id = parse_model(src).unwrap();
//! let compiled = compile(&id, &Heuristic::MinFill, 0).unwrap();
//! let result = solve(&id, &compiled.tree).unwrap();
//! assert!((result.meu - 6.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod compiler;
pub mod error;
pub mod generate;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod table;

pub use compiler::{compile, Compiled, Heuristic, StrongJunctionTree};
pub use error::{Error, ParseError, Result};
pub use model::{parse_model, validate, InfluenceDiagram};
pub use solver::{solve, SolveResult};
pub use table::{Domain, Table, VarId};
