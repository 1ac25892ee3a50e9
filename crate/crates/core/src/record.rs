use serde::{Deserialize, Serialize};

use crate::config::PatchMode;
use crate::region::Region;
use crate::style::StyleParams;

/// Real-valued shape behind a sampled region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeDraw {
    pub target_area: f64,
    pub aspect_ratio: f64,
}

/// Provenance for one augmented item: enough to replay it bit-exactly given
/// the source image, the run config and the provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentRecord {
    pub source_id: String,
    /// 1-based copy number for dataset expansion, 0 when augmenting in place.
    pub copy: u32,
    pub master_seed: u64,
    pub stream_index: u64,
    /// Gate outcome; also false when region sampling was exhausted.
    pub applied: bool,
    pub patch_mode: PatchMode,
    /// The rectangle that was written, for region modes that were applied.
    pub region: Option<Region>,
    pub shape: Option<ShapeDraw>,
    /// Stream that drew the pixel mask (pixel mode only).
    pub pixel_mask_seed: Option<u64>,
    pub replaced_pixels: Option<u64>,
    pub style_params: Option<StyleParams>,
    pub attempts_used: u64,
    /// Why an applied gate produced no change, if it did not.
    pub note: Option<String>,
}

impl AugmentRecord {
    pub(crate) fn unapplied(mode: PatchMode, master_seed: u64, stream_index: u64) -> Self {
        Self {
            source_id: String::new(),
            copy: 0,
            master_seed,
            stream_index,
            applied: false,
            patch_mode: mode,
            region: None,
            shape: None,
            pixel_mask_seed: None,
            replaced_pixels: None,
            style_params: None,
            attempts_used: 0,
            note: None,
        }
    }
}
