//! Musielak-Orlicz function calculus, norms on discrete fields, executable
//! structural-hypothesis checkers, and a mountain-pass solver for the
//! Dirichlet problem driven by the G(·)-Laplacian
//! −div(g(x,|∇u|)·∇u/|∇u|) = f(x,u).

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod mountain;
pub mod num;
pub mod orlicz;
pub mod phi;
pub mod problem;
pub mod verify;

pub use error::{Error, Result};
