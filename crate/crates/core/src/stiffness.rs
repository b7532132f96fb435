use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex bending stiffness `K* = K' + i K''` in N·m/rad.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexStiffness {
    pub storage: f64,
    pub loss: f64,
}

impl ComplexStiffness {
    pub const fn new(storage: f64, loss: f64) -> Self {
        Self { storage, loss }
    }

    pub fn from_complex(k: Complex64) -> Self {
        Self::new(k.re, k.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.storage, self.loss)
    }

    pub fn magnitude(self) -> f64 {
        self.storage.hypot(self.loss)
    }

    /// Phase lag of torque behind angle, `atan2(K'', K')`.
    pub fn phase(self) -> f64 {
        self.loss.atan2(self.storage)
    }

    /// `K''/K'`.
    pub fn loss_factor(self) -> f64 {
        self.loss / self.storage
    }

    pub fn fractions(self) -> Result<ImpedanceFractions> {
        impedance_fractions(self)
    }
}

/// Share of the impedance held by storage versus loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpedanceFractions {
    pub elastic: f64,
    pub dissipative: f64,
}

/// `f_elastic = K'/(K'+K'')`, `f_dissipative = K''/(K'+K'')`.
///
/// The dissipative share is computed as the complement of the elastic share so
/// the pair sums to one exactly.
pub fn impedance_fractions(k: ComplexStiffness) -> Result<ImpedanceFractions> {
    let total = k.storage + k.loss;
    if !total.is_finite() {
        return Err(Error::Domain(format!("non-finite stiffness {k:?}")));
    }
    if total == 0.0 {
        return Err(Error::DegenerateImpedance);
    }
    if k.storage < 0.0 || k.loss < 0.0 {
        return Err(Error::Domain(format!(
            "fractions need non-negative storage and loss, got {k:?}"
        )));
    }
    let elastic = k.storage / total;
    Ok(ImpedanceFractions {
        elastic,
        dissipative: 1.0 - elastic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purely_elastic() {
        let f = impedance_fractions(ComplexStiffness::new(5.0, 0.0)).unwrap();
        assert_eq!(f.elastic, 1.0);
        assert_eq!(f.dissipative, 0.0);
    }

    #[test]
    fn equal_parts_split_evenly() {
        for x in [1e-9, 0.3, 7.0, 1e12] {
            let f = impedance_fractions(ComplexStiffness::new(x, x)).unwrap();
            assert_eq!(f.elastic, 0.5);
            assert_eq!(f.dissipative, 0.5);
        }
    }

    #[test]
    fn zero_impedance_is_degenerate() {
        assert!(matches!(
            impedance_fractions(ComplexStiffness::new(0.0, 0.0)),
            Err(Error::DegenerateImpedance)
        ));
    }

    #[test]
    fn negative_parts_rejected() {
        assert!(impedance_fractions(ComplexStiffness::new(-1.0, 2.0)).is_err());
    }

    proptest::proptest! {
        #[test]
        fn fractions_sum_to_one(s in 0.0f64..1e6, l in 0.0f64..1e6) {
            proptest::prop_assume!(s + l > 0.0);
            let f = impedance_fractions(ComplexStiffness::new(s, l)).unwrap();
            proptest::prop_assert_eq!(f.elastic + f.dissipative, 1.0);
            proptest::prop_assert!((0.0..=1.0).contains(&f.elastic));
            proptest::prop_assert!((0.0..=1.0).contains(&f.dissipative));
        }
    }
}
