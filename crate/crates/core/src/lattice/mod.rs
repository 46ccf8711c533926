//! Exact integer linear algebra and small-dimensional convex geometry.

pub mod cone;
pub mod hull;
mod matrix;
pub mod normal_forms;
mod vector;

pub use cone::{extreme_rays, ConeRay};
pub use hull::{
    convex_hull, lattice_points, normalized_volume, Facet, RationalPolyhedron, MAX_DIM,
};
pub use matrix::IntegerMatrix;
pub use normal_forms::{
    hermite_normal_form, integer_kernel, lattice_basis, smith_normal_form, HermiteForm, SmithForm,
};
pub use vector::{lv, LatticeVector};
