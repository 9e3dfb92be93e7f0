//! Finite-element laboratory for the convection-dominated convection-diffusion
//! equation
//!
//! ```text
//!   -eps * lap(u) + a . grad(u) = f   in (0,1)^2,      u = 0 on the boundary,
//! ```
//!
//! with a constant unit wind `a` and `0 < eps << 1`. Bilinear (Q1) elements on a
//! uniform square grid are enriched with residual-free bubbles supported on
//! elements and on two-element edge patches. Bubble sub-problems are solved by
//! recursively zooming into the patches with the same enriched method until the
//! local mesh resolves the diffusion scale.
//!
//! The crate provides four methods behind one assembly path:
//! plain Galerkin, classical element-bubble RFB, the enhanced RFBe variant with
//! analytic edge traces, and the recursive patch-bubble method (BMZ), together
//! with error norms on reduced domains, EOC reporting, and the zeroth-order
//! asymptotic correctors of the channel problem for verification sweeps.

pub mod asymptotics;
pub mod assembly;
pub mod bubbles;
pub mod grid;
pub mod norms;
pub mod problems;
pub mod quadrature;
pub mod sparse;

pub use grid::{build_mesh, GridSpec, Mesh};
