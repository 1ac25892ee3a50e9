//! STL-10 binary layout.
//!
//! Each image is 27,648 bytes: three 96x96 planes in R, G, B order, each plane
//! stored column-major (byte `k` of a plane is column `k / 96`, row `k % 96`).
//! The label file holds one byte per image, classes numbered 1 to 10.

use std::fs;
use std::path::Path;

use crate::dataset::{DatasetItem, DatasetView};
use crate::error::{Error, Result};
use crate::image::{u8_to_unit, unit_to_u8, Image};

pub const STL10_SIDE: usize = 96;
pub const STL10_CHANNELS: usize = 3;
const PLANE: usize = STL10_SIDE * STL10_SIDE;
pub const STL10_RECORD_BYTES: usize = PLANE * STL10_CHANNELS;

fn decode_one(record: &[u8]) -> Image {
    let mut data = vec![0.0f32; STL10_RECORD_BYTES];
    for (c, plane) in record.chunks_exact(PLANE).enumerate() {
        for (k, &b) in plane.iter().enumerate() {
            let (col, row) = (k / STL10_SIDE, k % STL10_SIDE);
            data[(row * STL10_SIDE + col) * STL10_CHANNELS + c] = u8_to_unit(b);
        }
    }
    Image::from_parts(STL10_SIDE, STL10_SIDE, STL10_CHANNELS, data)
}

fn encode_one(image: &Image, out: &mut Vec<u8>) {
    let px = image.as_slice();
    for c in 0..STL10_CHANNELS {
        for k in 0..PLANE {
            let (col, row) = (k / STL10_SIDE, k % STL10_SIDE);
            out.push(unit_to_u8(px[(row * STL10_SIDE + col) * STL10_CHANNELS + c]));
        }
    }
}

/// Decodes in-memory image and label bytes. Item ids are the 0-based indices.
pub fn decode_stl10(images: &[u8], labels: Option<&[u8]>) -> Result<DatasetView> {
    let n = images.len() / STL10_RECORD_BYTES;
    if let Some(labels) = labels {
        if labels.len() != n {
            return Err(Error::LabelCountMismatch {
                images: n,
                labels: labels.len(),
            });
        }
        if let Some((index, &value)) = labels
            .iter()
            .enumerate()
            .find(|(_, &v)| !(1..=10).contains(&v))
        {
            return Err(Error::LabelOutOfRange {
                index,
                value: u32::from(value),
            });
        }
    }
    let items = images
        .chunks_exact(STL10_RECORD_BYTES)
        .enumerate()
        .map(|(i, record)| DatasetItem {
            image: decode_one(record),
            label: labels.map(|l| u32::from(l[i]) - 1),
            source_id: i.to_string(),
        })
        .collect();
    DatasetView::new(items)
}

pub fn read_stl10(image_file: impl AsRef<Path>, label_file: Option<&Path>) -> Result<DatasetView> {
    let image_file = image_file.as_ref();
    let images = fs::read(image_file)
        .map_err(|e| Error::io(format!("reading {}", image_file.display()), e))?;
    if images.len() % STL10_RECORD_BYTES != 0 {
        return Err(Error::TruncatedFile {
            path: image_file.to_path_buf(),
            len: images.len() as u64,
            record: STL10_RECORD_BYTES as u64,
        });
    }
    let labels = label_file
        .map(|p| fs::read(p).map_err(|e| Error::io(format!("reading {}", p.display()), e)))
        .transpose()?;
    decode_stl10(&images, labels.as_deref())
}

/// Encodes images (and labels when `with_labels`) into STL-10 bytes.
pub fn encode_stl10(data: &DatasetView, with_labels: bool) -> Result<(Vec<u8>, Option<Vec<u8>>)> {
    let mut images = Vec::with_capacity(data.len() * STL10_RECORD_BYTES);
    let mut labels = with_labels.then(|| Vec::with_capacity(data.len()));
    for item in data.items() {
        let d = item.image.dims();
        if (d.width, d.height, d.channels) != (STL10_SIDE, STL10_SIDE, STL10_CHANNELS) {
            return Err(Error::DimensionMismatch {
                expected: format!("{STL10_SIDE}x{STL10_SIDE}x{STL10_CHANNELS}"),
                actual: d.to_string(),
            });
        }
        encode_one(&item.image, &mut images);
        if let Some(labels) = labels.as_mut() {
            let label = item
                .label
                .ok_or_else(|| Error::MissingLabel(item.source_id.clone()))?;
            if label > 9 {
                return Err(Error::LabelOutOfRange {
                    index: labels.len(),
                    value: label + 1,
                });
            }
            labels.push(label as u8 + 1);
        }
    }
    Ok((images, labels))
}

pub fn write_stl10(
    data: &DatasetView,
    image_file: impl AsRef<Path>,
    label_file: Option<&Path>,
) -> Result<()> {
    let image_file = image_file.as_ref();
    let (images, labels) = encode_stl10(data, label_file.is_some())?;
    fs::write(image_file, images)
        .map_err(|e| Error::io(format!("writing {}", image_file.display()), e))?;
    if let (Some(path), Some(labels)) = (label_file, labels) {
        fs::write(path, labels).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    Ok(())
}
