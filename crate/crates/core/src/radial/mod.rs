//! Bessel functions, radial transforms and the smoothed-kernel machinery.

mod bessel;
mod enu;
mod kernel;
mod profile;
mod quad;
mod transform;

pub use bessel::{bessel_j, MAX_ORDER, MIN_ORDER};
pub use enu::{verify_enu_identity, EnuIdentityCheck};
pub use kernel::{
    build_kernel_suite, smoothstep, verify_support_lemma, KernelSuite, SupportLemmaReport,
};
pub use profile::{RadialProfile, Support};
pub use quad::{
    fixed_panel_nodes, integrate, integrate_endpoint_singular, oscillatory_cosine_tail, QuadConfig,
};
pub use transform::{
    cosine_transform, fourier_radial, fourier_radial_tol, inverse_cosine_transform, sample_fourier,
    transplant, unit_sphere_area,
};
