//! Background mesh, implicit domains, cell classification, stabilized faces
//! and degree-of-freedom bookkeeping.

mod balls;
mod classify;
mod dofmap;
mod levelset;
mod mesh;

pub use balls::{random_balls, read_balls, write_balls};
pub use classify::{cell_weight, classify_cells, ghost_faces, CellClassification, CellLabel, GhostFace};
pub use dofmap::DofMap;
pub use levelset::{HalfSpace, LevelSet, Sphere, UnionOfBalls};
pub use mesh::CartesianMesh;
