use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper bound on grid length, so a typo such as `0:5:1e-9` fails fast.
pub const MAX_GRID_POINTS: usize = 100_000;

/// Ordered set of sample points, written either as an explicit list or as the
/// `start:stop:step` shorthand (stop inclusive).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    /// Original shorthand, kept so configs round-trip in the form they were written.
    spec: Option<String>,
}

impl Grid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        check_increasing(&points)?;
        Ok(Self { points, spec: None })
    }

    pub fn range(start: f64, stop: f64, step: f64) -> Result<Self> {
        let points = expand_range(start, stop, step)?;
        Ok(Self {
            points,
            spec: Some(format!("{start}:{stop}:{step}")),
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }
}

fn check_increasing(points: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Config("grid is empty".into()));
    }
    if let Some(bad) = points.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("grid value {bad} is not finite")));
    }
    if let Some(w) = points.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn expand_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::Config("grid bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Config(format!("grid step must be > 0, got {step}")));
    }
    if stop < start {
        return Err(Error::Config(format!("grid stop {stop} is below start {start}")));
    }
    let span = (stop - start) / step;
    if span + 1.0 > MAX_GRID_POINTS as f64 {
        return Err(Error::Config(format!(
            "grid {start}:{stop}:{step} exceeds {MAX_GRID_POINTS} points"
        )));
    }
    let n = (span + 1e-9).floor() as usize + 1;
    let points: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
    check_increasing(&points)?;
    Ok(points)
}

/// Parses `start:stop:step`, a comma-separated list, or a single value.
pub fn parse_grid(text: &str) -> Result<Grid> {
    let text = text.trim();
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number `{}` in grid `{text}`", s.trim())))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "grid shorthand must be start:stop:step, got `{text}`"
            )));
        }
        let points = expand_range(num(parts[0])?, num(parts[1])?, num(parts[2])?)?;
        return Ok(Grid {
            points,
            spec: Some(text.to_string()),
        });
    }
    let points = text.split(',').map(num).collect::<Result<Vec<f64>>>()?;
    Grid::from_points(points)
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grid(s)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec {
            Some(s) => f.write_str(s),
            None => {
                let parts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawGrid {
    Text(String),
    List(Vec<f64>),
    One(f64),
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGrid::deserialize(d)?;
        let grid = match raw {
            RawGrid::Text(s) => parse_grid(&s),
            RawGrid::List(v) => Grid::from_points(v),
            RawGrid::One(v) => Grid::from_points(vec![v]),
        };
        grid.map_err(serde::de::Error::custom)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.spec {
            Some(text) => s.serialize_str(text),
            None => self.points.serialize(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shorthand_includes_stop() {
        let g = parse_grid("0.5:2:0.25").unwrap();
        assert_eq!(g.points(), &[0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]);
        let g = parse_grid("0:5:0.5").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.points()[10], 5.0);
    }

    #[test]
    fn lists_and_scalars() {
        assert_eq!(parse_grid("1, 2,3.5").unwrap().points(), &[1.0, 2.0, 3.5]);
        assert_eq!(parse_grid("2").unwrap().points(), &[2.0]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "1:2", "1:2:0", "2:1:0.1", "1,1", "3,2", "a:b:c", "1:2:3:4", "nan", "0:1e9:1e-9"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn serde_forms() {
        #[derive(Deserialize, Serialize)]
        struct W {
            g: Grid,
        }
        let w: W = toml::from_str("g = \"0:1:0.5\"").unwrap();
        assert_eq!(w.g.points(), &[0.0, 0.5, 1.0]);
        assert_eq!(toml::to_string(&w).unwrap().trim(), "g = \"0:1:0.5\"");
        let w: W = toml::from_str("g = [1.0, 4.0]").unwrap();
        assert_eq!(w.g.points(), &[1.0, 4.0]);
        assert!(toml::from_str::<W>("g = [4.0, 1.0]").is_err());
    }

    proptest! {
        #[test]
        fn shorthand_is_strictly_increasing(start in -10.0f64..10.0, len in 0.0f64..20.0, step in 0.01f64..5.0) {
            let g = Grid::range(start, start + len, step).unwrap();
            prop_assert!(g.points().windows(2).all(|w| w[1] > w[0]));
            prop_assert!(*g.points().last().unwrap() <= start + len + 1e-9 * step);
            prop_assert_eq!(g.points()[0], start);
        }
    }
}
