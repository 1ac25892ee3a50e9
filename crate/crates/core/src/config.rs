use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the stylized image (or a baseline fill) is written into the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchMode {
    /// Copy a random rectangle of the stylized image.
    Subregion,
    /// Copy each pixel position independently with probability `pixel_probability`.
    Pixel,
    /// Return the stylized image.
    Full,
    /// Random erasing baseline: fill a random rectangle with uniform noise.
    EraseNoise,
    /// Random erasing baseline: fill a random rectangle with the per-channel mean.
    EraseMean,
    /// Gate is drawn and recorded but the image is never modified.
    None,
}

impl PatchMode {
    pub const ALL: [PatchMode; 6] = [
        PatchMode::Subregion,
        PatchMode::Pixel,
        PatchMode::Full,
        PatchMode::EraseNoise,
        PatchMode::EraseMean,
        PatchMode::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatchMode::Subregion => "subregion",
            PatchMode::Pixel => "pixel",
            PatchMode::Full => "full",
            PatchMode::EraseNoise => "erase-noise",
            PatchMode::EraseMean => "erase-mean",
            PatchMode::None => "none",
        }
    }

    /// Modes that sample a rectangle and therefore need a feasible shape range.
    pub fn samples_region(self) -> bool {
        matches!(
            self,
            PatchMode::Subregion | PatchMode::EraseNoise | PatchMode::EraseMean
        )
    }

    /// Modes that call the style provider.
    pub fn stylizes(self) -> bool {
        matches!(self, PatchMode::Subregion | PatchMode::Pixel | PatchMode::Full)
    }
}

impl std::fmt::Display for PatchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatchMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown patch mode `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Probability that an image is augmented at all.
    pub gate_probability: f64,
    /// Patch area as a fraction of the image area, `[min, max]`.
    pub area_ratio_min: f64,
    pub area_ratio_max: f64,
    /// Patch aspect ratio `height / width`, `[min, max]`.
    pub aspect_ratio_min: f64,
    pub aspect_ratio_max: f64,
    pub patch_mode: PatchMode,
    /// Per-position replacement probability in pixel mode.
    pub pixel_probability: f64,
    /// Blend weight of the fully stylized image against the original.
    pub style_alpha: f64,
    /// Corner draws per shape before the shape is redrawn.
    pub max_placement_attempts: u32,
    /// Shape redraws after the first shape is exhausted.
    pub max_shape_resamples: u32,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            gate_probability: 0.5,
            area_ratio_min: 0.02,
            area_ratio_max: 0.4,
            aspect_ratio_min: 0.3,
            aspect_ratio_max: 1.0 / 0.3,
            patch_mode: PatchMode::Subregion,
            pixel_probability: 0.5,
            style_alpha: 0.5,
            max_placement_attempts: 100,
            max_shape_resamples: 10,
        }
    }
}

impl AugmentConfig {
    pub fn with_mode(mut self, mode: PatchMode) -> Self {
        self.patch_mode = mode;
        self
    }

    pub fn with_gate(mut self, p: f64) -> Self {
        self.gate_probability = p;
        self
    }

    /// Checks every bound and, for region-sampling modes, that at least one
    /// shape in the configured ranges fits a `width x height` image after
    /// rounding its sides.
    pub fn validate(&self, width: usize, height: usize) -> Result<&Self> {
        unit_interval("gate_probability", self.gate_probability)?;
        unit_interval("pixel_probability", self.pixel_probability)?;
        unit_interval("style_alpha", self.style_alpha)?;

        if !(self.area_ratio_min > 0.0 && self.area_ratio_min <= 1.0) {
            return Err(Error::OutOfBounds {
                field: "area_ratio_min",
                value: self.area_ratio_min,
                bounds: "(0, 1]",
            });
        }
        if !(self.area_ratio_max > 0.0 && self.area_ratio_max <= 1.0) {
            return Err(Error::OutOfBounds {
                field: "area_ratio_max",
                value: self.area_ratio_max,
                bounds: "(0, 1]",
            });
        }
        ordered("area_ratio", self.area_ratio_min, self.area_ratio_max)?;

        for (field, v) in [
            ("aspect_ratio_min", self.aspect_ratio_min),
            ("aspect_ratio_max", self.aspect_ratio_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfBounds {
                    field,
                    value: v,
                    bounds: "(0, inf)",
                });
            }
        }
        ordered("aspect_ratio", self.aspect_ratio_min, self.aspect_ratio_max)?;

        if self.max_placement_attempts == 0 {
            return Err(Error::OutOfBounds {
                field: "max_placement_attempts",
                value: 0.0,
                bounds: "[1, inf)",
            });
        }
        if self.max_shape_resamples == 0 {
            return Err(Error::OutOfBounds {
                field: "max_shape_resamples",
                value: 0.0,
                bounds: "[1, inf)",
            });
        }

        if self.patch_mode.samples_region() {
            self.check_feasible(width, height)?;
        } else if width == 0 || height == 0 {
            return Err(Error::Infeasible {
                width,
                height,
                reason: "image has a zero dimension".into(),
            });
        }
        Ok(self)
    }

    // Rounded side `round(v)` stays within `limit` iff `v < limit + 0.5`. The
    // smallest area minimizes both sides, so a fitting shape exists iff some
    // aspect in [r_l, r_h] lies strictly inside (S_l / (W + .5)^2, (H + .5)^2 / S_l).
    fn check_feasible(&self, width: usize, height: usize) -> Result<()> {
        if width == 0 || height == 0 {
            return Err(Error::Infeasible {
                width,
                height,
                reason: "image has a zero dimension".into(),
            });
        }
        let min_area = self.area_ratio_min * (width * height) as f64;
        let w_lim = width as f64 + 0.5;
        let h_lim = height as f64 + 0.5;
        let aspect_above = min_area / (w_lim * w_lim);
        let aspect_below = h_lim * h_lim / min_area;
        if aspect_above >= self.aspect_ratio_max {
            return Err(Error::Infeasible {
                width,
                height,
                reason: format!(
                    "aspect_ratio_max = {} is too small: area_ratio_min = {} needs aspect > {aspect_above:.6} to keep the width within {width}",
                    self.aspect_ratio_max, self.area_ratio_min
                ),
            });
        }
        if aspect_below <= self.aspect_ratio_min {
            return Err(Error::Infeasible {
                width,
                height,
                reason: format!(
                    "aspect_ratio_min = {} is too large: area_ratio_min = {} needs aspect < {aspect_below:.6} to keep the height within {height}",
                    self.aspect_ratio_min, self.area_ratio_min
                ),
            });
        }
        if aspect_above >= aspect_below {
            return Err(Error::Infeasible {
                width,
                height,
                reason: format!(
                    "area_ratio_min = {} is too large for any aspect ratio",
                    self.area_ratio_min
                ),
            });
        }
        Ok(())
    }
}

fn unit_interval(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfBounds {
            field,
            value: v,
            bounds: "[0, 1]",
        })
    }
}

fn ordered(field: &'static str, min: f64, max: f64) -> Result<()> {
    if min > max {
        Err(Error::EmptyRanges { field, min, max })
    } else {
        Ok(())
    }
}

/// Validates `cfg` for a `width x height` image and returns a copy.
pub fn validate_config(cfg: &AugmentConfig, width: usize, height: usize) -> Result<AugmentConfig> {
    cfg.validate(width, height).cloned()
}
