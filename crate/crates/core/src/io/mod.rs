//! Dataset codecs and manifest serialization.

mod image_dir;
mod manifest;
mod stl10;

pub use image_dir::{read_image_dir, write_image_dir};
pub use manifest::{read_manifest, write_manifest, Manifest, ManifestHeader, MANIFEST_FORMAT, MANIFEST_VERSION};
pub use stl10::{decode_stl10, encode_stl10, read_stl10, write_stl10, STL10_CHANNELS, STL10_RECORD_BYTES, STL10_SIDE};
