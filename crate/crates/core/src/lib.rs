//! Kernel Gram matrices, their spectra, and the Welch family of inequalities.
//!
//! The Welch bound on a set of unit vectors is the trace inequality
//! `‖G‖²_F ≥ tr(G)² / rank(G)` applied to the Gram matrix of the homogeneous
//! polynomial kernel `⟨x, y⟩ᵖ`, whose feature space has dimension
//! `C(n+p−1, p)`. This crate makes each piece of that argument computable:
//!
//! * [`linalg`]: dense complex matrices, a cyclic Jacobi Hermitian eigensolver,
//!   trace, Frobenius norm and numerical rank.
//! * [`kernels`]: vector sets, kernel functions and Gram matrices.
//! * [`features`]: explicit symmetric-tensor feature maps with `G = DᴴD`.
//! * [`bounds`]: left/right-hand sides, slack and tightness of every bound.
//! * [`frames`]: structured and random vector sets, and frame potential
//!   minimization on the product of unit spheres.
//! * [`rank`]: ε-rank profiles and scans across kernel families.
//! * [`formats`]: JSON/CSV file formats shared with the command-line tool.

pub mod bounds;
pub mod error;
pub mod features;
pub mod formats;
pub mod frames;
pub mod kernels;
pub mod linalg;
pub mod rank;

pub use error::{Error, Result};
pub use num_complex::Complex64;
