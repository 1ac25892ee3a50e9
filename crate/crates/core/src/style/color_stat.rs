//! Per-channel statistical color transfer with randomly drawn target moments.
//!
//! Each channel is standardized with its own mean and standard deviation,
//! rescaled to a target mean and deviation drawn from configured boxes, then
//! blended with the original by `alpha` and clamped to `[0, 1]`.

use serde::{Deserialize, Serialize};

use super::{StyleParams, StyleProvider};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::rng::RngStream;

/// Lower bound applied to a source channel's standard deviation.
pub const VARIANCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorSpace {
    /// Statistics per R, G, B channel.
    #[default]
    Rgb,
    /// Statistics along an orthonormal opponent basis: luminance
    /// `(R+G+B)/sqrt3`, red-green `(R-G)/sqrt2`, yellow-blue `(R+G-2B)/sqrt6`.
    /// Target means are drawn in RGB and rotated into this basis.
    Opponent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorStatConfig {
    /// Box for each channel's target mean.
    pub mean_range: (f64, f64),
    /// Box for each channel's target standard deviation.
    pub std_range: (f64, f64),
    pub alpha: f64,
    #[serde(default)]
    pub color_space: ColorSpace,
}

impl Default for ColorStatConfig {
    fn default() -> Self {
        Self {
            mean_range: (0.25, 0.75),
            std_range: (0.05, 0.3),
            alpha: 0.5,
            color_space: ColorSpace::Rgb,
        }
    }
}

impl ColorStatConfig {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (m_lo, m_hi) = self.mean_range;
        let (s_lo, s_hi) = self.std_range;
        if !(0.0..=1.0).contains(&m_lo) || !(0.0..=1.0).contains(&m_hi) {
            return Err(Error::OutOfBounds {
                field: "mean_range",
                value: if (0.0..=1.0).contains(&m_lo) { m_hi } else { m_lo },
                bounds: "[0, 1]",
            });
        }
        if m_lo > m_hi {
            return Err(Error::EmptyRanges {
                field: "mean_range",
                min: m_lo,
                max: m_hi,
            });
        }
        if !(s_lo > 0.0 && s_lo <= 0.5) || !(s_hi > 0.0 && s_hi <= 0.5) {
            return Err(Error::OutOfBounds {
                field: "std_range",
                value: if s_lo > 0.0 && s_lo <= 0.5 { s_hi } else { s_lo },
                bounds: "(0, 0.5]",
            });
        }
        if s_lo > s_hi {
            return Err(Error::EmptyRanges {
                field: "std_range",
                min: s_lo,
                max: s_hi,
            });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::OutOfBounds {
                field: "style_alpha",
                value: self.alpha,
                bounds: "[0, 1]",
            });
        }
        Ok(())
    }
}

/// Sampled targets for one call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorStatParams {
    pub target_mean: [f64; 3],
    pub target_std: [f64; 3],
    pub alpha: f64,
    pub color_space: ColorSpace,
}

impl ColorStatParams {
    /// Draws the three means, then the three deviations.
    pub fn sample(cfg: &ColorStatConfig, rng: &mut RngStream) -> Self {
        let mut target_mean = [0.0; 3];
        for m in &mut target_mean {
            *m = rng.uniform_range(cfg.mean_range.0, cfg.mean_range.1);
        }
        let mut target_std = [0.0; 3];
        for s in &mut target_std {
            *s = rng.uniform_range(cfg.std_range.0, cfg.std_range.1);
        }
        Self {
            target_mean,
            target_std,
            alpha: cfg.alpha,
            color_space: cfg.color_space,
        }
    }
}

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const INV_SQRT3: f64 = 0.577_350_269_189_625_8;
const INV_SQRT6: f64 = 0.408_248_290_463_863;

// Rows are the opponent axes; the transpose is the inverse.
const OPPONENT: [[f64; 3]; 3] = [
    [INV_SQRT3, INV_SQRT3, INV_SQRT3],
    [INV_SQRT2, -INV_SQRT2, 0.0],
    [INV_SQRT6, INV_SQRT6, -2.0 * INV_SQRT6],
];

fn rotate(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn rotate_back(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    ]
}

/// Population mean and standard deviation per channel.
fn moments(values: impl Iterator<Item = [f64; 3]>, n: usize) -> ([f64; 3], [f64; 3]) {
    let mut sum = [0.0f64; 3];
    let mut sum_sq = [0.0f64; 3];
    for v in values {
        for c in 0..3 {
            sum[c] += v[c];
            sum_sq[c] += v[c] * v[c];
        }
    }
    let n = n as f64;
    let mut mean = [0.0; 3];
    let mut std = [0.0; 3];
    for c in 0..3 {
        mean[c] = sum[c] / n;
        std[c] = (sum_sq[c] / n - mean[c] * mean[c]).max(0.0).sqrt();
    }
    (mean, std)
}

fn pixels(image: &Image) -> impl Iterator<Item = [f64; 3]> + '_ {
    image
        .as_slice()
        .chunks_exact(3)
        .map(|p| [f64::from(p[0]), f64::from(p[1]), f64::from(p[2])])
}

/// Applies fixed targets to `image`. Deterministic; no randomness.
pub fn apply_color_stat(image: &Image, params: &ColorStatParams) -> Result<Image> {
    if image.channels() != 3 {
        return Err(Error::ChannelMismatch {
            expected: 3,
            actual: image.channels(),
        });
    }
    let alpha = params.alpha;
    let keep = 1.0 - alpha;
    let n = image.area();
    let mut out = Vec::with_capacity(n * 3);

    match params.color_space {
        ColorSpace::Rgb => {
            let (mean, std) = moments(pixels(image), n);
            let mut scale = [0.0; 3];
            for c in 0..3 {
                scale[c] = params.target_std[c] / std[c].max(VARIANCE_FLOOR);
            }
            for p in pixels(image) {
                for c in 0..3 {
                    let stylized = (p[c] - mean[c]) * scale[c] + params.target_mean[c];
                    out.push(blend(alpha, keep, stylized, p[c]));
                }
            }
        }
        ColorSpace::Opponent => {
            let (mean, std) = moments(pixels(image).map(|p| rotate(&OPPONENT, p)), n);
            let target_mean = rotate(&OPPONENT, params.target_mean);
            let mut scale = [0.0; 3];
            for c in 0..3 {
                scale[c] = params.target_std[c] / std[c].max(VARIANCE_FLOOR);
            }
            for p in pixels(image) {
                let o = rotate(&OPPONENT, p);
                let mut s = [0.0; 3];
                for c in 0..3 {
                    s[c] = (o[c] - mean[c]) * scale[c] + target_mean[c];
                }
                let stylized = rotate_back(&OPPONENT, s);
                for c in 0..3 {
                    out.push(blend(alpha, keep, stylized[c], p[c]));
                }
            }
        }
    }
    Ok(Image::from_parts(image.width(), image.height(), 3, out))
}

#[inline]
fn blend(alpha: f64, keep: f64, stylized: f64, original: f64) -> f32 {
    ((alpha * stylized + keep * original) as f32).clamp(0.0, 1.0)
}

/// Draws targets from `cfg` and applies them.
pub fn color_stat_transfer(
    image: &Image,
    rng: &mut RngStream,
    cfg: &ColorStatConfig,
) -> Result<(Image, ColorStatParams)> {
    if image.channels() != 3 {
        return Err(Error::ChannelMismatch {
            expected: 3,
            actual: image.channels(),
        });
    }
    let params = ColorStatParams::sample(cfg, rng);
    let out = apply_color_stat(image, &params)?;
    Ok((out, params))
}

#[derive(Debug, Clone, Default)]
pub struct ColorStatProvider {
    cfg: ColorStatConfig,
}

impl ColorStatProvider {
    pub fn new(cfg: ColorStatConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &ColorStatConfig {
        &self.cfg
    }
}

impl StyleProvider for ColorStatProvider {
    fn name(&self) -> &str {
        "colorstat"
    }

    fn stylize(&self, image: &Image, rng: &mut RngStream) -> Result<(Image, StyleParams)> {
        let (out, params) = color_stat_transfer(image, rng, &self.cfg)?;
        Ok((out, StyleParams::ColorStat(params)))
    }
}
