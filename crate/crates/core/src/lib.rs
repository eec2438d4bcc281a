//! Matrix-free cut finite element Poisson solver on Cartesian meshes.
//!
//! The domain is given implicitly by a level set that is positive inside.
//! Cells of a uniform background mesh are classified as inside, outside or
//! cut; the operator combines a sum-factorized Laplacian on inside cells,
//! point-wise evaluation with implicit-domain quadrature on cut cells,
//! Nitsche boundary terms, and a ghost-penalty face stabilization applied as
//! a Kronecker product of one-dimensional matrices.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` aliases below name the double precision instantiations.

pub mod cutquad;
pub mod error;
pub mod gauss;
pub mod geometry;
pub mod linalg;
pub mod operator;
pub mod scalar;
pub mod solver;
pub mod sumfac;
pub mod tensor1d;

pub use error::{Error, Result};
pub use scalar::Real;

pub type MatF64 = linalg::Mat<f64>;
pub type ReferenceElementF64 = tensor1d::ReferenceElement1D<f64>;
pub type TensorFieldF64 = sumfac::TensorField<f64>;
pub type MeshF64 = geometry::CartesianMesh<f64>;
pub type CutCellQuadratureF64 = cutquad::CutCellQuadrature<f64>;
pub type OperatorContextF64 = operator::OperatorContext<f64>;
pub type ParametersF64 = operator::Parameters<f64>;
pub type SolveReportF64 = solver::SolveReport<f64>;

pub type OperatorContextF32 = operator::OperatorContext<f32>;
