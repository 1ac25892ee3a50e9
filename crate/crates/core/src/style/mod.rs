//! Style providers: the "random stylizer" half of the augmentation.
//!
//! A provider turns an image into a fully stylized copy of the same shape,
//! drawing whatever randomness it needs from the caller's stream. The
//! pipeline then blends or patches that copy into the original.

mod color_stat;
#[cfg(feature = "onnx")]
mod external;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::Image;
use crate::rng::RngStream;

pub use color_stat::{
    apply_color_stat, color_stat_transfer, ColorSpace, ColorStatConfig, ColorStatParams,
    ColorStatProvider, VARIANCE_FLOOR,
};
#[cfg(feature = "onnx")]
pub use external::{load_external_provider, ExternalModelProvider, ModelSignature};

/// A fast, randomized stylizer.
///
/// Implementations must return an image with the input's dimensions and
/// channel count, with every intensity in `[0, 1]`, and must be deterministic
/// given the image and the stream state.
pub trait StyleProvider: Send + Sync {
    /// Short tag recorded in manifests.
    fn name(&self) -> &str;

    fn stylize(&self, image: &Image, rng: &mut RngStream) -> Result<(Image, StyleParams)>;
}

/// The random draws behind one stylization, kept for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StyleParams {
    Identity,
    ColorStat(ColorStatParams),
    External {
        alpha: f64,
        embedding: Vec<f32>,
    },
}

/// Returns its input. Useful as a control: with it every patch mode is a no-op.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityProvider;

impl StyleProvider for IdentityProvider {
    fn name(&self) -> &str {
        "identity"
    }

    fn stylize(&self, image: &Image, _rng: &mut RngStream) -> Result<(Image, StyleParams)> {
        Ok((identity_stylize(image), StyleParams::Identity))
    }
}

pub fn identity_stylize(image: &Image) -> Image {
    image.clone()
}

impl<P: StyleProvider + ?Sized> StyleProvider for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn stylize(&self, image: &Image, rng: &mut RngStream) -> Result<(Image, StyleParams)> {
        (**self).stylize(image, rng)
    }
}

impl<P: StyleProvider + ?Sized> StyleProvider for std::sync::Arc<P> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn stylize(&self, image: &Image, rng: &mut RngStream) -> Result<(Image, StyleParams)> {
        (**self).stylize(image, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patching::{patch_pixels, patch_subregion};
    use crate::region::Region;
    use crate::rng::derive_stream;

    fn sample() -> Image {
        Image::from_fn(7, 5, 3, |x, y, c| ((x * 31 + y * 17 + c * 5) % 256) as f32 / 255.0).unwrap()
    }

    #[test]
    fn identity_returns_input() {
        let img = sample();
        let (out, params) = IdentityProvider
            .stylize(&img, &mut derive_stream(0, 0))
            .unwrap();
        assert_eq!(out, img);
        assert_eq!(params, StyleParams::Identity);
    }

    #[test]
    fn identity_composed_with_patches_is_noop() {
        let img = sample();
        let styled = identity_stylize(&img);
        let r = Region::new(1, 2, 4, 3).unwrap();
        assert_eq!(patch_subregion(&img, &styled, r).unwrap(), img);
        let (out, _) = patch_pixels(&img, &styled, &mut derive_stream(1, 1), 1.0).unwrap();
        assert_eq!(out, img);
    }
}
