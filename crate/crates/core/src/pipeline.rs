//! The per-image gate and composition, and dataset-level orchestration.

use rayon::prelude::*;

use crate::config::{AugmentConfig, PatchMode};
use crate::dataset::{DatasetItem, DatasetView};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::patching::{fill_region, patch_pixels, patch_subregion, sample_region, Fill};
use crate::record::{AugmentRecord, ShapeDraw};
use crate::rng::{derive_stream, RngStream};
use crate::style::StyleProvider;

/// Augments one image.
///
/// Draws `p1` uniformly in `[0, 1)` and leaves the image unchanged when
/// `p1 >= gate_probability`. Otherwise the configured patch mode runs, with
/// every further draw taken from the same stream in a fixed order: stylize,
/// then region or pixel mask, then fill noise. The record's `source_id` and
/// `copy` are left empty for the caller to fill in.
pub fn random_style_replacement(
    image: &Image,
    rng: &mut RngStream,
    cfg: &AugmentConfig,
    provider: &dyn StyleProvider,
) -> Result<(Image, AugmentRecord)> {
    let mode = cfg.patch_mode;
    let mut record = AugmentRecord::unapplied(mode, rng.master_seed(), rng.stream_index());
    let p1 = rng.uniform();
    if p1 >= cfg.gate_probability {
        return Ok((image.clone(), record));
    }

    let stylized = if mode.stylizes() {
        let (stylized, params) = provider.stylize(image, rng)?;
        record.style_params = Some(params);
        Some(stylized)
    } else {
        None
    };

    let out = match mode {
        PatchMode::None => {
            record.applied = true;
            image.clone()
        }
        PatchMode::Full => {
            record.applied = true;
            stylized.expect("full mode stylizes")
        }
        PatchMode::Pixel => {
            let stylized = stylized.expect("pixel mode stylizes");
            record.pixel_mask_seed = Some(rng.stream_index());
            let (out, mask) = patch_pixels(image, &stylized, rng, cfg.pixel_probability)?;
            record.replaced_pixels = Some(mask.count() as u64);
            record.applied = true;
            out
        }
        PatchMode::Subregion | PatchMode::EraseNoise | PatchMode::EraseMean => {
            let sample = match sample_region(rng, image.width(), image.height(), cfg) {
                Ok(s) => s,
                Err(e @ Error::SamplingExhausted { attempts, .. }) => {
                    record.attempts_used = attempts;
                    record.note = Some(e.to_string());
                    return Ok((image.clone(), record));
                }
                Err(e) => return Err(e),
            };
            record.region = Some(sample.region);
            record.shape = Some(ShapeDraw {
                target_area: sample.target_area,
                aspect_ratio: sample.aspect_ratio,
            });
            record.attempts_used = sample.attempts_used;
            record.applied = true;
            match mode {
                PatchMode::Subregion => patch_subregion(
                    image,
                    stylized.as_ref().expect("subregion mode stylizes"),
                    sample.region,
                )?,
                PatchMode::EraseNoise => fill_region(image, sample.region, Fill::Noise(rng))?,
                _ => fill_region(image, sample.region, Fill::Mean)?,
            }
        }
    };
    Ok((out, record))
}

/// Re-runs the item described by `record` on its source image.
pub fn replay(
    record: &AugmentRecord,
    source: &Image,
    cfg: &AugmentConfig,
    provider: &dyn StyleProvider,
) -> Result<Image> {
    let mut rng = derive_stream(record.master_seed, record.stream_index);
    let cfg = AugmentConfig {
        patch_mode: record.patch_mode,
        ..cfg.clone()
    };
    random_style_replacement(source, &mut rng, &cfg, provider).map(|(img, _)| img)
}

/// Execution settings that never change results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

fn run_on_pool<T: Send>(opts: RunOptions, f: impl FnOnce() -> T + Send) -> Result<T> {
    match opts.threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::io("building worker pool", std::io::Error::other(e)))?;
            Ok(pool.install(f))
        }
    }
}

struct Job<'a> {
    item: &'a DatasetItem,
    copy: u32,
    stream_index: u64,
}

fn run_jobs(
    jobs: &[Job<'_>],
    cfg: &AugmentConfig,
    provider: &dyn StyleProvider,
    master_seed: u64,
    opts: RunOptions,
) -> Result<Vec<(Image, AugmentRecord)>> {
    run_on_pool(opts, || {
        jobs.par_iter()
            .map(|job| {
                let mut rng = derive_stream(master_seed, job.stream_index);
                let (img, mut rec) =
                    random_style_replacement(&job.item.image, &mut rng, cfg, provider).map_err(
                        |e| Error::Item {
                            source_id: job.item.source_id.clone(),
                            source: Box::new(e),
                        },
                    )?;
                rec.source_id = job.item.source_id.clone();
                rec.copy = job.copy;
                Ok((img, rec))
            })
            .collect::<Result<Vec<_>>>()
    })?
}

fn validate_for(input: &DatasetView, cfg: &AugmentConfig) -> Result<()> {
    if let Some(d) = input.dims() {
        cfg.validate(d.width, d.height)?;
    } else {
        cfg.validate(1, 1).map(|_| ()).or_else(|e| match e {
            Error::Infeasible { .. } => Ok(()),
            e => Err(e),
        })?;
    }
    Ok(())
}

/// Emits every original in order, followed by `ratio` rounds of augmented
/// copies. Round `k` (1-based) holds one copy of each original, in input
/// order; the copy of item `i` in round `k` uses stream
/// `n + (k - 1) * n + i`, which is also its position in the output.
pub fn augment_dataset(
    input: &DatasetView,
    cfg: &AugmentConfig,
    provider: &dyn StyleProvider,
    ratio: u32,
    master_seed: u64,
    opts: RunOptions,
) -> Result<(DatasetView, Vec<AugmentRecord>)> {
    validate_for(input, cfg)?;
    let n = input.len() as u64;
    let jobs: Vec<Job<'_>> = (1..=ratio)
        .flat_map(|copy| {
            input.items().iter().enumerate().map(move |(i, item)| Job {
                item,
                copy,
                stream_index: n + u64::from(copy - 1) * n + i as u64,
            })
        })
        .collect();
    let results = run_jobs(&jobs, cfg, provider, master_seed, opts)?;

    let mut items = input.items().to_vec();
    let mut records = Vec::with_capacity(results.len());
    items.reserve(results.len());
    for (job, (image, record)) in jobs.iter().zip(results) {
        items.push(DatasetItem {
            image,
            label: job.item.label,
            source_id: copy_id(&job.item.source_id, job.copy),
        });
        records.push(record);
    }
    let out = DatasetView::new(items)?.with_class_names(input.class_names().map(<[_]>::to_vec));
    Ok((out, records))
}

/// Gates the originals themselves (item `i` uses stream `i`), returning a
/// dataset of the same size and one record per item.
pub fn augment_in_place(
    input: &DatasetView,
    cfg: &AugmentConfig,
    provider: &dyn StyleProvider,
    master_seed: u64,
    opts: RunOptions,
) -> Result<(DatasetView, Vec<AugmentRecord>)> {
    validate_for(input, cfg)?;
    let jobs: Vec<Job<'_>> = input
        .items()
        .iter()
        .enumerate()
        .map(|(i, item)| Job {
            item,
            copy: 0,
            stream_index: i as u64,
        })
        .collect();
    let results = run_jobs(&jobs, cfg, provider, master_seed, opts)?;
    let mut items = Vec::with_capacity(results.len());
    let mut records = Vec::with_capacity(results.len());
    for (job, (image, record)) in jobs.iter().zip(results) {
        items.push(DatasetItem {
            image,
            label: job.item.label,
            source_id: job.item.source_id.clone(),
        });
        records.push(record);
    }
    let out = DatasetView::new(items)?.with_class_names(input.class_names().map(<[_]>::to_vec));
    Ok((out, records))
}

/// Identifier given to copy `copy` of `source_id`.
pub fn copy_id(source_id: &str, copy: u32) -> String {
    format!("{source_id}#aug{copy}")
}
