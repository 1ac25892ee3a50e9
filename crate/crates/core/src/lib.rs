//! Random style replacement for image augmentation.
//!
//! An image is gated with probability `p`; when selected it is stylized by a
//! [`StyleProvider`](style::StyleProvider) and the stylized copy is written
//! back into the original either over a randomly sampled rectangle or at
//! independently chosen pixels. Random-erasing baselines, deterministic
//! per-item random streams, STL-10 and PNG-directory codecs, and JSON Lines
//! provenance manifests round out the crate.
//!
//! ```
//! use style_replace::{derive_stream, random_style_replacement, AugmentConfig, Image};
//! use style_replace::style::ColorStatProvider;
//!
//! let image = Image::filled(96, 96, 3, 0.5).unwrap();
//! let cfg = AugmentConfig::default().with_gate(1.0);
//! let mut rng = derive_stream(7, 0);
//! let (out, record) =
//!     random_style_replacement(&image, &mut rng, &cfg, &ColorStatProvider::default()).unwrap();
//! assert!(record.applied);
//! assert_eq!(out.dims(), image.dims());
//! ```

pub mod config;
pub mod dataset;
pub mod error;
pub mod image;
pub mod io;
pub mod patching;
pub mod pipeline;
pub mod record;
pub mod region;
pub mod rng;
pub mod style;

pub use config::{validate_config, AugmentConfig, PatchMode};
pub use dataset::{DatasetItem, DatasetView};
pub use error::{Error, Result};
pub use image::{Image, ImageDims};
pub use patching::{fill_region, patch_pixels, patch_subregion, sample_region, Fill, PixelMask, RegionSample};
pub use pipeline::{augment_dataset, augment_in_place, random_style_replacement, replay, RunOptions};
pub use record::{AugmentRecord, ShapeDraw};
pub use region::Region;
pub use rng::{derive_stream, RngStream};
