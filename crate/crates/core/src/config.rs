//! Experiment configuration files (JSON). The schema is published in
//! `configs/experiment.schema.json`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::Material;
use crate::eigen::DEFAULT_ZERO_FACTOR;
use crate::error::{Error, Result};
use crate::hierarchy::CellBox;
use crate::tensor::Geometry;

fn default_scale() -> [f64; 2] {
    [PI, PI]
}

fn one() -> f64 {
    1.0
}

fn default_zero() -> f64 {
    DEFAULT_ZERO_FACTOR
}

fn default_spectral() -> f64 {
    1e-8
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out(), svg: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Free-form label copied into the summary.
    #[serde(default)]
    pub name: String,
    pub degree: usize,
    pub base_elements: [usize; 2],
    /// Physical domain `(0, a) × (0, b)`.
    #[serde(default = "default_scale")]
    pub domain_scale: [f64; 2],
    /// Number `L` of refinement steps; `refinement` must have `L` entries.
    pub levels: usize,
    /// `refinement[ℓ]` lists half-open boxes of level-`(ℓ+1)` cells forming `Ω_{ℓ+1}`.
    #[serde(default)]
    pub refinement: Vec<Vec<CellBox>>,
    #[serde(default = "one")]
    pub nu: f64,
    #[serde(default = "one")]
    pub epsilon: f64,
    /// Factor `c` in the zero threshold `τ = c · λ_max`.
    #[serde(default = "default_zero")]
    pub zero_tolerance: f64,
    /// Largest accepted relative difference between gauged and ungauged eigenvalues.
    #[serde(default = "default_spectral")]
    pub spectral_tolerance: f64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Schema-level checks. Admissibility of the regions is checked later, when the
    /// mesh is built.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.degree == 0 {
            return bad("degree must be at least 1".into());
        }
        if self.base_elements.iter().any(|&m| m < 2) {
            return bad("base_elements must be at least 2 in each direction".into());
        }
        if self.domain_scale.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return bad("domain_scale entries must be positive".into());
        }
        if self.refinement.len() != self.levels {
            return bad(format!(
                "levels = {} but refinement lists {} regions",
                self.levels,
                self.refinement.len()
            ));
        }
        for (l, boxes) in self.refinement.iter().enumerate() {
            let scale = 1usize << (l + 1);
            let dims = [self.base_elements[0] * scale, self.base_elements[1] * scale];
            for b in boxes {
                if b.x[0] >= b.x[1] || b.y[0] >= b.y[1] || b.x[1] > dims[0] || b.y[1] > dims[1] {
                    return bad(format!(
                        "refinement[{l}] box x={:?} y={:?} is empty or outside the {}x{} cells of level {}",
                        b.x,
                        b.y,
                        dims[0],
                        dims[1],
                        l + 1
                    ));
                }
            }
        }
        for (name, v) in [("nu", self.nu), ("epsilon", self.epsilon)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive"));
            }
        }
        for (name, v) in [("zero_tolerance", self.zero_tolerance), ("spectral_tolerance", self.spectral_tolerance)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive"));
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        Geometry { scale: self.domain_scale }
    }

    pub fn material(&self) -> Material {
        Material { nu: self.nu, epsilon: self.epsilon }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"degree": 2, "base_elements": [4, 4], "levels": 0}"#;

    #[test]
    fn defaults_are_filled_in() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.domain_scale, [PI, PI]);
        assert_eq!((c.nu, c.epsilon), (1.0, 1.0));
        assert_eq!(c.zero_tolerance, 1e-10);
        assert_eq!(c.output, OutputConfig::default());
    }

    #[test]
    fn schema_violations() {
        let cases = [
            r#"{"degree": 2, "base_elements": [4, 4], "levels": 0, "colour": 1}"#,
            r#"{"degree": 0, "base_elements": [4, 4], "levels": 0}"#,
            r#"{"degree": 1, "base_elements": [4, 4], "levels": 1}"#,
            r#"{"degree": 1, "base_elements": [4, 4], "levels": 1, "refinement": [[{"x": [0, 9], "y": [0, 2]}]]}"#,
            r#"{"degree": 1, "base_elements": [4, 4], "levels": 0, "nu": -1}"#,
            r#"{"degree": 1, "base_elements": [4], "levels": 0}"#,
        ];
        for text in cases {
            assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::from_json(
            r#"{"degree": 1, "base_elements": [4, 4], "levels": 1, "refinement": [[{"x": [2, 6], "y": [2, 6]}]]}"#,
        )
        .unwrap();
        let again = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}
