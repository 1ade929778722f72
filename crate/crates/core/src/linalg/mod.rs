//! Exact integer linear algebra over incidence matrices.

mod camion;
mod det;
mod minors;

pub(crate) use camion::least_square_core;
pub use camion::{
    camion_unimodular, camion_unimodular_mixed, camion_unimodular_mixed_with, camion_unimodular_with, CamionResult,
    CamionWitness,
};
pub use det::det_exact;
pub use minors::{
    is_almost_tu, is_almost_tu_with, is_tu_bruteforce, is_tu_bruteforce_with, max_abs_subdet, max_abs_subdet_with,
    DeltaResult, Limits,
};
