//! Sphere quadrature, Monte Carlo sampling and resolution-of-identity checks.

mod mc;
mod quadrature;
mod roi;

pub use mc::{mc_sphere, McSphere, MC_CHUNK, MC_RNG_NAME};
pub use quadrature::{gauss_legendre, polar_grid, Exactness, QuadratureGrid, RadialNode};
pub use roi::{
    basis_requirements, beta_moment, mc_roi, project_su2_charge_onto_fixed_n,
    project_su3_charge_onto_fixed_n, rational_to_f64, reconstruct_charge_from_fixed_n,
    reconstruct_su3_charge_from_fixed_n, roi_matrix, roi_matrix_nodewise, roi_residual,
    sphere_measure, FamilySpec, McRoiEstimate,
};
