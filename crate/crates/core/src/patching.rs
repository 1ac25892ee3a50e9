//! Rectangle sampling and the ways a source image is written into a base.

use serde::{Deserialize, Serialize};

use crate::config::AugmentConfig;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::region::Region;
use crate::rng::RngStream;

/// A sampled region together with the real-valued shape it was rounded from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub region: Region,
    /// Target area `S_e` in pixels before rounding.
    pub target_area: f64,
    /// Aspect ratio `H_e / W_e`.
    pub aspect_ratio: f64,
    /// Unrounded `W_e`.
    pub raw_width: f64,
    /// Unrounded `H_e`.
    pub raw_height: f64,
    /// Corner draws consumed, over all shapes.
    pub attempts_used: u64,
    /// Shapes drawn, including the accepted one.
    pub shapes_drawn: u32,
}

/// Draws a rectangle that fits a `width x height` image.
///
/// Each shape draws a target area uniformly in `[s_l, s_h) * S` and an aspect
/// ratio in `[r_l, r_h)`, sets `H_e = sqrt(S_e * r_e)` and `W_e = sqrt(S_e / r_e)`,
/// and rounds both sides to the nearest integer (at least 1). Corners are drawn
/// uniformly over the whole image and rejected until the rectangle fits. After
/// `max_placement_attempts` rejections the shape is redrawn, at most
/// `max_shape_resamples` times.
pub fn sample_region(
    rng: &mut RngStream,
    width: usize,
    height: usize,
    cfg: &AugmentConfig,
) -> Result<RegionSample> {
    let image_area = (width * height) as f64;
    let mut attempts = 0u64;
    let shapes = 1 + cfg.max_shape_resamples;
    for shape in 1..=shapes {
        let target_area = rng.uniform_range(cfg.area_ratio_min, cfg.area_ratio_max) * image_area;
        let aspect_ratio = rng.uniform_range(cfg.aspect_ratio_min, cfg.aspect_ratio_max);
        let raw_height = (target_area * aspect_ratio).sqrt();
        let raw_width = (target_area / aspect_ratio).sqrt();
        let w = round_side(raw_width);
        let h = round_side(raw_height);
        for _ in 0..cfg.max_placement_attempts {
            attempts += 1;
            let x = rng.below(width as u64) as usize;
            let y = rng.below(height as u64) as usize;
            if x + w <= width && y + h <= height {
                return Ok(RegionSample {
                    region: Region {
                        x,
                        y,
                        width: w,
                        height: h,
                    },
                    target_area,
                    aspect_ratio,
                    raw_width,
                    raw_height,
                    attempts_used: attempts,
                    shapes_drawn: shape,
                });
            }
        }
    }
    Err(Error::SamplingExhausted {
        attempts,
        shapes,
    })
}

fn round_side(v: f64) -> usize {
    (v.round() as usize).max(1)
}

/// `style` inside `region`, `base` everywhere else.
pub fn patch_subregion(base: &Image, style: &Image, region: Region) -> Result<Image> {
    base.check_same_dims(style)?;
    region.check_fits(base.width(), base.height())?;
    let mut out = base.as_slice().to_vec();
    let row_len = region.width * base.channels();
    for y in region.y..region.y + region.height {
        let o = base.offset(region.x, y);
        out[o..o + row_len].copy_from_slice(&style.as_slice()[o..o + row_len]);
    }
    Ok(Image::from_parts(
        base.width(),
        base.height(),
        base.channels(),
        out,
    ))
}

/// Which pixel positions were replaced in pixel mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Row-major, one entry per position.
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Replaces each pixel position (all channels together) with the `style`
/// pixel with probability `q`, one draw per position in row-major order.
pub fn patch_pixels(
    base: &Image,
    style: &Image,
    rng: &mut RngStream,
    q: f64,
) -> Result<(Image, PixelMask)> {
    base.check_same_dims(style)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfBounds {
            field: "pixel_probability",
            value: q,
            bounds: "[0, 1]",
        });
    }
    let c = base.channels();
    let mut out = base.as_slice().to_vec();
    let mut bits = Vec::with_capacity(base.area());
    for (dst, src) in out.chunks_exact_mut(c).zip(style.as_slice().chunks_exact(c)) {
        let take = rng.bernoulli(q);
        if take {
            dst.copy_from_slice(src);
        }
        bits.push(take);
    }
    Ok((
        Image::from_parts(base.width(), base.height(), c, out),
        PixelMask {
            width: base.width(),
            height: base.height(),
            bits,
        },
    ))
}

#[derive(Debug)]
pub enum Fill<'a> {
    /// Independent uniform intensities, drawn in row-major then channel order.
    Noise(&'a mut RngStream),
    /// The per-channel mean of the whole base image.
    Mean,
    Zero,
}

/// Overwrites `region` of `base` according to `fill`.
pub fn fill_region(base: &Image, region: Region, fill: Fill<'_>) -> Result<Image> {
    region.check_fits(base.width(), base.height())?;
    let c = base.channels();
    let mut out = base.as_slice().to_vec();
    let mut write = |f: &mut dyn FnMut(usize) -> f32| {
        for y in region.y..region.y + region.height {
            let start = base.offset(region.x, y);
            for px in out[start..start + region.width * c].chunks_exact_mut(c) {
                for (ch, v) in px.iter_mut().enumerate() {
                    *v = f(ch);
                }
            }
        }
    };
    match fill {
        Fill::Noise(rng) => write(&mut |_| rng.uniform() as f32),
        Fill::Mean => {
            let means: Vec<f32> = base
                .channel_means()
                .into_iter()
                .map(|m| (m as f32).clamp(0.0, 1.0))
                .collect();
            write(&mut |ch| means[ch])
        }
        Fill::Zero => write(&mut |_| 0.0),
    }
    Ok(Image::from_parts(base.width(), base.height(), c, out))
}
