//! Complex bending stiffness of the constrained-layer fin and its causal surrogate.

mod layup;
mod prony;
mod rku;
mod zener;

pub use layup::*;
pub use prony::{
    fit_prony, fit_prony_with, prony_frequency_response, PronyBranch, PronyFit, PronyFitOptions,
};
pub use rku::{rku_complex_stiffness, rku_terms, RkuTerms, FIRST_CANTILEVER_ROOT};
pub use zener::{zener_shear_modulus, FractionalZenerParams};
