use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Four-parameter fractional Zener description of the viscoelastic core in shear.
///
/// `G*(ω) = (g_low + g_high·(iωτ)^α) / (1 + (iωτ)^α)`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalZenerParams {
    /// Relaxed (low-frequency) shear modulus, Pa.
    pub g_low: f64,
    /// Unrelaxed (high-frequency) shear modulus, Pa.
    pub g_high: f64,
    /// Relaxation time, s.
    pub tau: f64,
    /// Fractional order in (0, 1].
    pub alpha: f64,
}

impl FractionalZenerParams {
    pub fn new(g_low: f64, g_high: f64, tau: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            g_low,
            g_high,
            tau,
            alpha,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g_low, self.g_high, self.tau, self.alpha]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain(format!("non-finite Zener parameters {self:?}")));
        }
        if !(self.g_low > 0.0) {
            return Err(Error::Domain(format!("g_low must be > 0, got {}", self.g_low)));
        }
        if !(self.g_high > self.g_low) {
            return Err(Error::Domain(format!(
                "g_high ({}) must exceed g_low ({})",
                self.g_high, self.g_low
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Domain(format!("tau must be > 0, got {}", self.tau)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn shear_modulus(&self, omega: f64) -> Result<Complex64> {
        zener_shear_modulus(self, omega)
    }
}

/// Complex shear modulus of a fractional Zener solid at angular frequency `omega`.
///
/// Validation is skipped for the degenerate `g_low == g_high` case, which is
/// purely elastic and is accepted here even though it is not a valid
/// [`FractionalZenerParams`] for a layup.
pub fn zener_shear_modulus(params: &FractionalZenerParams, omega: f64) -> Result<Complex64> {
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be finite and >= 0, got {omega}")));
    }
    if params.g_low == params.g_high && params.g_low > 0.0 {
        return Ok(Complex64::new(params.g_low, 0.0));
    }
    params.validate()?;
    if omega == 0.0 {
        return Ok(Complex64::new(params.g_low, 0.0));
    }
    // (iωτ)^α = (ωτ)^α · e^{iαπ/2}
    let mag = (omega * params.tau).powf(params.alpha);
    let arg = params.alpha * std::f64::consts::FRAC_PI_2;
    let s = Complex64::from_polar(mag, arg);
    Ok((params.g_low + params.g_high * s) / (1.0 + s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference() -> FractionalZenerParams {
        FractionalZenerParams::new(0.2e6, 2.0e6, 0.05, 0.6).unwrap()
    }

    #[test]
    fn zero_frequency_is_relaxed_modulus() {
        let g = reference().shear_modulus(0.0).unwrap();
        assert_eq!(g, Complex64::new(0.2e6, 0.0));
    }

    #[test]
    fn degenerate_zener_is_elastic() {
        let p = FractionalZenerParams {
            g_low: 3.0e5,
            g_high: 3.0e5,
            tau: 0.01,
            alpha: 0.4,
        };
        for w in [0.0, 1.0, 100.0, 1e6] {
            assert_eq!(zener_shear_modulus(&p, w).unwrap(), Complex64::new(3.0e5, 0.0));
        }
    }

    #[test]
    fn closed_form_value_at_three_hz() {
        // Evaluated independently with mpmath (50 digits):
        //   s = (1j*2*pi*3*0.05)**0.6 ; (0.2e6 + 2e6*s)/(1+s)
        let g = reference().shear_modulus(2.0 * PI * 3.0).unwrap();
        let expected = Complex64::new(1_079_855.471_313_130_9, 458_390.500_289_126_9);
        assert!((g - expected).norm() / expected.norm() < 1e-12, "{g}");
    }

    #[test]
    fn high_frequency_limit() {
        let g = reference().shear_modulus(1e12).unwrap();
        assert!((g.re - 2.0e6).abs() / 2.0e6 < 1e-3);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FractionalZenerParams::new(0.0, 1.0, 1.0, 0.5).is_err());
        assert!(FractionalZenerParams::new(2.0, 1.0, 1.0, 0.5).is_err());
        assert!(FractionalZenerParams::new(1.0, 2.0, 0.0, 0.5).is_err());
        assert!(FractionalZenerParams::new(1.0, 2.0, 1.0, 0.0).is_err());
        assert!(FractionalZenerParams::new(1.0, 2.0, 1.0, 1.5).is_err());
        assert!(reference().shear_modulus(-1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn loss_is_non_negative(
            g_low in 1e3f64..1e7,
            ratio in 1.001f64..100.0,
            tau in 1e-5f64..10.0,
            alpha in 0.01f64..=1.0,
            omega in 0.0f64..1e4,
        ) {
            let p = FractionalZenerParams::new(g_low, g_low * ratio, tau, alpha).unwrap();
            let g = p.shear_modulus(omega).unwrap();
            proptest::prop_assert!(g.im >= -1e-9 * g.re.abs());
            proptest::prop_assert!(g.re > 0.0);
        }
    }
}
