//! Side-by-side comparison grid.
//!
//! One row per input image, five columns in this order: the original, a
//! random-erasing baseline (noise fill), the fully stylized image, subregion
//! replacement and pixel replacement. Cells are separated by 2-pixel white
//! gutters; there is no outer border. Row `i` uses stream `i` of the seed:
//! the stylization is drawn first and shared by columns three to five, then
//! the erased region and its noise, then the replaced region, then the pixel
//! mask. Every column is applied unconditionally (no gate).

use std::path::Path;

use image::{ColorType, ImageFormat};

use style_replace::{
    derive_stream, fill_region, patch_pixels, patch_subregion, sample_region, AugmentConfig,
    DatasetView, Error, Fill, Image,
};
use style_replace::style::StyleProvider;

pub const GUTTER: usize = 2;
pub const COLUMNS: [&str; 5] = ["original", "erased", "stylized", "subregion", "pixel"];

/// The five cells of one gallery row.
pub fn row(
    image: &Image,
    cfg: &AugmentConfig,
    provider: &dyn StyleProvider,
    seed: u64,
    index: u64,
) -> Result<[Image; 5], Error> {
    let (w, h) = (image.width(), image.height());
    let mut rng = derive_stream(seed, index);
    let (stylized, _) = provider.stylize(image, &mut rng)?;
    let erase_at = sample_region(&mut rng, w, h, cfg)?.region;
    let erased = fill_region(image, erase_at, Fill::Noise(&mut rng))?;
    let patch_at = sample_region(&mut rng, w, h, cfg)?.region;
    let subregion = patch_subregion(image, &stylized, patch_at)?;
    let (pixel, _) = patch_pixels(image, &stylized, &mut rng, cfg.pixel_probability)?;
    Ok([image.clone(), erased, stylized, subregion, pixel])
}

/// Grid for the first `n` items (fewer if the dataset is smaller).
pub fn render(
    data: &DatasetView,
    cfg: &AugmentConfig,
    provider: &dyn StyleProvider,
    n: usize,
    seed: u64,
) -> Result<Image, Error> {
    let dims = data.dims().ok_or_else(|| Error::InvalidImage("empty dataset".into()))?;
    cfg.validate(dims.width, dims.height)?;
    let rows = n.min(data.len());
    let cols = COLUMNS.len();
    let (w, h, c) = (dims.width, dims.height, dims.channels);
    let grid_w = cols * w + (cols - 1) * GUTTER;
    let grid_h = rows * h + rows.saturating_sub(1) * GUTTER;
    let mut grid = vec![1.0f32; grid_w * grid_h * c];
    for (r, item) in data.items().iter().take(rows).enumerate() {
        let cells = row(&item.image, cfg, provider, seed, r as u64)?;
        for (col, cell) in cells.iter().enumerate() {
            let x0 = col * (w + GUTTER);
            let y0 = r * (h + GUTTER);
            for y in 0..h {
                let dst = ((y0 + y) * grid_w + x0) * c;
                let src = y * w * c;
                grid[dst..dst + w * c].copy_from_slice(&cell.as_slice()[src..src + w * c]);
            }
        }
    }
    Image::new(grid_w, grid_h, c, grid)
}

pub fn save_png(image: &Image, path: &Path) -> Result<(), Error> {
    let color = if image.channels() == 1 {
        ColorType::L8
    } else {
        ColorType::Rgb8
    };
    image::save_buffer_with_format(
        path,
        &image.to_u8(),
        image.width() as u32,
        image.height() as u32,
        color,
        ImageFormat::Png,
    )
    .map_err(|e| Error::Io {
        context: format!("writing {}", path.display()),
        source: std::io::Error::other(e),
    })
}
