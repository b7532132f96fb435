use serde::{Deserialize, Serialize};

use super::zener::FractionalZenerParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Base,
    Viscoelastic,
    Constraining,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constitutive {
    /// Young's modulus, Pa.
    Elastic { youngs_modulus: f64 },
    Viscoelastic(FractionalZenerParams),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub kind: LayerKind,
    /// m
    pub thickness: f64,
    /// kg/m³
    pub density: f64,
    pub material: Constitutive,
}

impl Layer {
    pub fn elastic(kind: LayerKind, thickness: f64, youngs_modulus: f64, density: f64) -> Self {
        Self {
            kind,
            thickness,
            density,
            material: Constitutive::Elastic { youngs_modulus },
        }
    }

    pub fn viscoelastic(thickness: f64, zener: FractionalZenerParams, density: f64) -> Self {
        Self {
            kind: LayerKind::Viscoelastic,
            thickness,
            density,
            material: Constitutive::Viscoelastic(zener),
        }
    }

    pub fn youngs_modulus(&self) -> Option<f64> {
        match self.material {
            Constitutive::Elastic { youngs_modulus } => Some(youngs_modulus),
            Constitutive::Viscoelastic(_) => None,
        }
    }

    pub fn zener(&self) -> Option<&FractionalZenerParams> {
        match &self.material {
            Constitutive::Viscoelastic(z) => Some(z),
            Constitutive::Elastic { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness > 0.0 && self.thickness.is_finite()) {
            return Err(Error::Domain(format!(
                "{:?} layer thickness must be > 0, got {}",
                self.kind, self.thickness
            )));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::Domain(format!(
                "{:?} layer density must be > 0, got {}",
                self.kind, self.density
            )));
        }
        match (self.kind, &self.material) {
            (LayerKind::Viscoelastic, Constitutive::Viscoelastic(z)) => z.validate(),
            (LayerKind::Base | LayerKind::Constraining, Constitutive::Elastic { youngs_modulus }) => {
                if *youngs_modulus > 0.0 && youngs_modulus.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "{:?} layer Young's modulus must be > 0, got {youngs_modulus}",
                        self.kind
                    )))
                }
            }
            (kind, _) => Err(Error::Domain(format!(
                "{kind:?} layer has the wrong constitutive description"
            ))),
        }
    }
}

/// Symmetric constrained-layer sandwich: base plate with a viscoelastic core and
/// a constraining layer bonded to each face.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichLayup {
    pub base: Layer,
    pub core: Layer,
    pub constraining: Layer,
    /// Free length of the module, m.
    pub length: f64,
    /// m
    pub width: f64,
    /// Treated fraction of the base plate in [0, 1].
    pub coverage: f64,
}

/// PLA base plate.
pub const DEFAULT_BASE_THICKNESS: f64 = 0.5e-3;
pub const DEFAULT_BASE_MODULUS: f64 = 3.5e9;
pub const DEFAULT_BASE_DENSITY: f64 = 1240.0;
/// Closed-cell acrylic foam core.
pub const DEFAULT_CORE_THICKNESS: f64 = 1.0e-3;
pub const DEFAULT_CORE_DENSITY: f64 = 720.0;
/// PET constraining film.
pub const DEFAULT_CONSTRAINING_THICKNESS: f64 = 0.3e-3;
pub const DEFAULT_CONSTRAINING_MODULUS: f64 = 3.0e9;
pub const DEFAULT_CONSTRAINING_DENSITY: f64 = 1380.0;
pub const DEFAULT_LENGTH: f64 = 0.100;
pub const DEFAULT_WIDTH: f64 = 0.0765;

/// Core shear law used by [`SandwichLayup::default`].
pub const DEFAULT_CORE_ZENER: FractionalZenerParams = FractionalZenerParams {
    g_low: 20.0e3,
    g_high: 1.0e6,
    tau: 1.0e-3,
    alpha: 1.0,
};

impl Default for SandwichLayup {
    fn default() -> Self {
        Self {
            base: Layer::elastic(
                LayerKind::Base,
                DEFAULT_BASE_THICKNESS,
                DEFAULT_BASE_MODULUS,
                DEFAULT_BASE_DENSITY,
            ),
            core: Layer::viscoelastic(DEFAULT_CORE_THICKNESS, DEFAULT_CORE_ZENER, DEFAULT_CORE_DENSITY),
            constraining: Layer::elastic(
                LayerKind::Constraining,
                DEFAULT_CONSTRAINING_THICKNESS,
                DEFAULT_CONSTRAINING_MODULUS,
                DEFAULT_CONSTRAINING_DENSITY,
            ),
            length: DEFAULT_LENGTH,
            width: DEFAULT_WIDTH,
            coverage: 1.0,
        }
    }
}

impl SandwichLayup {
    pub fn with_coverage(mut self, coverage: f64) -> Self {
        self.coverage = coverage;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Domain(format!("length must be > 0, got {}", self.length)));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::Domain(format!("width must be > 0, got {}", self.width)));
        }
        if !(0.0..=1.0).contains(&self.coverage) {
            return Err(Error::Domain(format!(
                "coverage must lie in [0, 1], got {}",
                self.coverage
            )));
        }
        for (layer, expected) in [
            (&self.base, LayerKind::Base),
            (&self.core, LayerKind::Viscoelastic),
            (&self.constraining, LayerKind::Constraining),
        ] {
            if layer.kind != expected {
                return Err(Error::Domain(format!(
                    "expected a {expected:?} layer, found {:?}",
                    layer.kind
                )));
            }
            layer.validate()?;
        }
        Ok(())
    }

    /// Mass of the laminate (both faces treated over `coverage` of the length), kg.
    pub fn mass(&self) -> f64 {
        let area = self.length * self.width;
        let treated = 2.0
            * (self.core.thickness * self.core.density
                + self.constraining.thickness * self.constraining.density);
        area * (self.base.thickness * self.base.density + self.coverage * treated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SandwichLayup::default().validate().unwrap();
    }

    #[test]
    fn coverage_bounds() {
        assert!(SandwichLayup::default().with_coverage(-0.01).validate().is_err());
        assert!(SandwichLayup::default().with_coverage(1.01).validate().is_err());
        assert!(SandwichLayup::default().with_coverage(0.0).validate().is_ok());
    }

    #[test]
    fn mismatched_constitutive_rejected() {
        let mut l = SandwichLayup::default();
        l.core.material = Constitutive::Elastic { youngs_modulus: 1e6 };
        assert!(l.validate().is_err());

        let mut l = SandwichLayup::default();
        std::mem::swap(&mut l.base, &mut l.constraining);
        assert!(l.validate().is_err());
    }

    #[test]
    fn zero_thickness_rejected() {
        let mut l = SandwichLayup::default();
        l.constraining.thickness = 0.0;
        assert!(l.validate().is_err());
    }
}
