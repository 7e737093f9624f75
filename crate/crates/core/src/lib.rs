//! Coherent quantum Zeno dynamics on tight-binding chains.
//!
//! A chain of `N` sites has strong interior bonds (`H_w`) and weak end bonds
//! (`H`); the total Hamiltonian is `H_tot = λ⁻¹ H_w + H`. For large `λ⁻¹` the
//! dynamics started on site 1 is confined to the zero-eigenvalue level of
//! `H_w`, and on even chains the effective generator is the first-order
//! term `λ P_0 H Q̃ H P_0`, an end-to-end hopping of strength `λk`.
//!
//! ```
//! use zeno_chain::chain::ChainSpec;
//! use zeno_chain::dynamics::{default_window, simulate_chain};
//!
//! let spec = ChainSpec::new(4, 20.0);
//! let grid = default_window(&spec, 400).unwrap();
//! let (_, leakage) = simulate_chain(&spec, &grid).unwrap();
//! assert!(leakage.delta < 0.02);
//! ```

pub mod analytic;
pub mod chain;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod perturbation;
pub mod qzd;

pub use chain::{build_chain, ChainHamiltonians, ChainSpec};
pub use error::{Error, Result};
pub use qzd::{classify, QzdClassification, QzdOrder};
