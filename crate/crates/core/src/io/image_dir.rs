//! A directory of PNG files, optionally grouped into one subdirectory per class.
//!
//! Files directly inside the root are unlabeled. Files inside a subdirectory
//! are labeled by the position of that subdirectory's name among all class
//! subdirectories in sorted order. Items are ordered by relative path.

use std::fs;
use std::path::{Path, PathBuf};

use image::{ColorType, DynamicImage, ImageFormat};

use crate::dataset::{DatasetItem, DatasetView};
use crate::error::{Error, Result};
use crate::image::Image;

fn is_hidden(name: &str) -> bool {
    name.starts_with('.')
}

fn list_dir(dir: &Path) -> Result<Vec<(String, PathBuf, bool)>> {
    let mut out = Vec::new();
    let entries =
        fs::read_dir(dir).map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(format!("listing {}", dir.display()), e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if is_hidden(&name) {
            continue;
        }
        let ty = entry
            .file_type()
            .map_err(|e| Error::io(format!("inspecting {}", entry.path().display()), e))?;
        out.push((name, entry.path(), ty.is_dir()));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn decode_png(path: &Path) -> Result<Image> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    if ext.as_deref() != Some("png") {
        return Err(Error::UnsupportedFormat(format!(
            "{} (only .png is read)",
            path.display()
        )));
    }
    let bytes = fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Png)
        .map_err(|e| Error::UnsupportedFormat(format!("{}: {e}", path.display())))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(buf) => Image::from_u8(w, h, 1, buf.as_raw()),
        DynamicImage::ImageRgb8(buf) => Image::from_u8(w, h, 3, buf.as_raw()),
        other => Err(Error::UnsupportedFormat(format!(
            "{}: color type {:?} (expected 8-bit gray or RGB)",
            path.display(),
            other.color()
        ))),
    }
}

pub fn read_image_dir(path: impl AsRef<Path>) -> Result<DatasetView> {
    let root = path.as_ref();
    let mut files: Vec<(String, PathBuf, Option<usize>)> = Vec::new();
    let mut classes: Vec<String> = Vec::new();
    for (name, p, is_dir) in list_dir(root)? {
        if is_dir {
            let label = classes.len();
            classes.push(name.clone());
            for (file, fp, sub_is_dir) in list_dir(&p)? {
                if sub_is_dir {
                    return Err(Error::UnsupportedFormat(format!(
                        "nested directory {}",
                        fp.display()
                    )));
                }
                files.push((format!("{name}/{file}"), fp, Some(label)));
            }
        } else {
            files.push((name, p, None));
        }
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));

    let items = files
        .into_iter()
        .map(|(id, p, label)| {
            Ok(DatasetItem {
                image: decode_png(&p)?,
                label: label.map(|l| l as u32),
                source_id: id,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let names = (!classes.is_empty()).then_some(classes);
    Ok(DatasetView::new(items)?.with_class_names(names))
}

fn file_stem(source_id: &str) -> String {
    let last = source_id.rsplit('/').next().unwrap_or(source_id);
    let stem = last.strip_suffix(".png").unwrap_or(last);
    stem.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.#".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes one PNG per item, named `{position:06}_{id}.png` so that reading the
/// directory back preserves order within each class.
pub fn write_image_dir(data: &DatasetView, path: impl AsRef<Path>) -> Result<()> {
    let root = path.as_ref();
    fs::create_dir_all(root).map_err(|e| Error::io(format!("creating {}", root.display()), e))?;
    for (i, item) in data.items().iter().enumerate() {
        let dir = match item.label {
            Some(l) => {
                let class = data
                    .class_names()
                    .and_then(|names| names.get(l as usize).cloned())
                    .unwrap_or_else(|| format!("{l:03}"));
                let dir = root.join(class);
                fs::create_dir_all(&dir)
                    .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
                dir
            }
            None => root.to_path_buf(),
        };
        let file = dir.join(format!("{i:06}_{}.png", file_stem(&item.source_id)));
        let img = &item.image;
        let color = if img.channels() == 1 {
            ColorType::L8
        } else {
            ColorType::Rgb8
        };
        image::save_buffer_with_format(
            &file,
            &img.to_u8(),
            img.width() as u32,
            img.height() as u32,
            color,
            ImageFormat::Png,
        )
        .map_err(|e| Error::io(format!("writing {}", file.display()), std::io::Error::other(e)))?;
    }
    Ok(())
}
