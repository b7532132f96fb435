//! Ross–Kerwin–Ungar flexural rigidity of the symmetric constrained-layer plate.
//!
//! The five-layer laminate is treated as the bare base plate plus two mirrored
//! three-layer corrections (core + constraining film), one per face:
//!
//! ```text
//! EI* = E_b I_b + 2·coverage·[E_c I_c + E_c A_c d² · g*/(1 + g*)]
//! g*  = G*(ω) / (E_c h_c h_v p²),   p = 1.875 / L
//! K*  = EI* / L
//! ```
//!
//! `d` is the distance between the base-plate and constraining-layer neutral
//! axes; `p` is the first cantilever-mode wavenumber.

use num_complex::Complex64;

use super::layup::SandwichLayup;
use crate::error::{Error, Result};
use crate::stiffness::ComplexStiffness;

/// First cantilever-mode root `βL`, rounded to the customary three decimals.
pub const FIRST_CANTILEVER_ROOT: f64 = 1.875;

/// Intermediate terms of the RKU evaluation, exposed for inspection and tests.
#[derive(Clone, Copy, Debug)]
pub struct RkuTerms {
    pub base_rigidity: f64,
    pub constraining_own_rigidity: f64,
    pub transfer_rigidity: f64,
    pub shear_parameter: Complex64,
    pub flexural_rigidity: Complex64,
}

pub fn rku_terms(layup: &SandwichLayup, omega: f64) -> Result<RkuTerms> {
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite and >= 0, got {omega}")));
    }
    layup.validate()?;

    let w = layup.width;
    let (hb, hv, hc) = (
        layup.base.thickness,
        layup.core.thickness,
        layup.constraining.thickness,
    );
    // validate() guarantees the constitutive descriptions match the layer kinds
    let eb = layup.base.youngs_modulus().expect("validated base layer");
    let ec = layup.constraining.youngs_modulus().expect("validated constraining layer");
    let zener = layup.core.zener().expect("validated core layer");

    let base_rigidity = eb * w * hb.powi(3) / 12.0;
    let constraining_own_rigidity = ec * w * hc.powi(3) / 12.0;
    let d = 0.5 * hb + hv + 0.5 * hc;
    let transfer_rigidity = ec * (w * hc) * d * d;

    let p = FIRST_CANTILEVER_ROOT / layup.length;
    let g_star = zener.shear_modulus(omega)?;
    let shear_parameter = g_star / (ec * hc * hv * p * p);

    let correction =
        constraining_own_rigidity + transfer_rigidity * (shear_parameter / (1.0 + shear_parameter));
    let flexural_rigidity = base_rigidity + 2.0 * layup.coverage * correction;

    Ok(RkuTerms {
        base_rigidity,
        constraining_own_rigidity,
        transfer_rigidity,
        shear_parameter,
        flexural_rigidity,
    })
}

/// Lumped root stiffness `K*(ω) = EI*(ω)/L` of the layup.
pub fn rku_complex_stiffness(layup: &SandwichLayup, omega: f64) -> Result<ComplexStiffness> {
    let terms = rku_terms(layup, omega)?;
    let k = terms.flexural_rigidity / layup.length;
    // exact zero loss at DC and for the bare plate
    let loss = if omega == 0.0 || layup.coverage == 0.0 {
        0.0
    } else {
        k.im
    };
    Ok(ComplexStiffness::new(k.re, loss))
}
