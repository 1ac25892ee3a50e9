//! Command-line front end: `augment`, `gallery` and `validate`.

pub mod gallery;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use style_replace::io::{
    read_image_dir, read_stl10, write_image_dir, write_manifest, write_stl10, Manifest,
    ManifestHeader,
};
use style_replace::style::{ColorSpace, ColorStatConfig, ColorStatProvider, IdentityProvider, StyleProvider};
use style_replace::{
    augment_dataset, augment_in_place, AugmentConfig, DatasetView, Error, PatchMode, RunOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Environment variable read for `--threads` when the flag is absent.
pub const THREADS_ENV: &str = "STYLE_REPLACE_THREADS";

#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "style-replace", version, about = "Random style replacement augmentation")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Augment a dataset and write it with a provenance manifest.
    Augment(AugmentCmd),
    /// Render original / erased / stylized / subregion / pixel columns for the first N images.
    Gallery(GalleryCmd),
    /// Check a configuration against an image size.
    Validate(ValidateCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// STL-10 binary (images file plus optional labels file).
    Stl10,
    /// Directory of PNG files, one subdirectory per class.
    Imgdir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Subregion,
    Pixel,
    Full,
    EraseNoise,
    EraseMean,
    None,
}

impl From<Mode> for PatchMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Subregion => PatchMode::Subregion,
            Mode::Pixel => PatchMode::Pixel,
            Mode::Full => PatchMode::Full,
            Mode::EraseNoise => PatchMode::EraseNoise,
            Mode::EraseMean => PatchMode::EraseMean,
            Mode::None => PatchMode::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliColorSpace {
    Rgb,
    Opponent,
}

/// `identity`, `colorstat`, or `external:<model.onnx>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum StyleChoice {
    Identity,
    ColorStat,
    External(PathBuf),
}

impl FromStr for StyleChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(StyleChoice::Identity),
            "colorstat" => Ok(StyleChoice::ColorStat),
            _ => match s.strip_prefix("external:") {
                Some(p) if !p.is_empty() => Ok(StyleChoice::External(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown style `{s}` (expected identity, colorstat or external:<path>)"
                )),
            },
        }
    }
}

impl std::fmt::Display for StyleChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StyleChoice::Identity => f.write_str("identity"),
            StyleChoice::ColorStat => f.write_str("colorstat"),
            StyleChoice::External(p) => write!(f, "external:{}", p.display()),
        }
    }
}

impl From<StyleChoice> for String {
    fn from(s: StyleChoice) -> Self {
        s.to_string()
    }
}

impl TryFrom<String> for StyleChoice {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Augmentation parameters shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct AugmentFlags {
    /// Patch mode.
    #[arg(long, value_enum, default_value = "subregion")]
    pub mode: Mode,
    /// Gate probability: chance that an item is augmented.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Per-pixel replacement probability in pixel mode.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Blend weight of the stylized image.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Minimum patch area ratio.
    #[arg(long = "s-l", default_value_t = 0.02)]
    pub s_l: f64,
    /// Maximum patch area ratio.
    #[arg(long = "s-h", default_value_t = 0.4)]
    pub s_h: f64,
    /// Minimum patch aspect ratio (height / width).
    #[arg(long = "r-l", default_value_t = 0.3)]
    pub r_l: f64,
    /// Maximum patch aspect ratio.
    #[arg(long = "r-h", default_value_t = 1.0 / 0.3)]
    pub r_h: f64,
    #[arg(long, default_value_t = 100)]
    pub max_placement_attempts: u32,
    #[arg(long, default_value_t = 10)]
    pub max_shape_resamples: u32,
    /// Style provider: identity, colorstat or external:<model.onnx>.
    #[arg(long, default_value = "colorstat")]
    pub style: StyleChoice,
    /// Color space for the colorstat provider.
    #[arg(long, value_enum, default_value = "rgb")]
    pub color_space: CliColorSpace,
    /// Master seed. A random seed is generated and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl AugmentFlags {
    pub fn augment_config(&self) -> AugmentConfig {
        AugmentConfig {
            gate_probability: self.p,
            area_ratio_min: self.s_l,
            area_ratio_max: self.s_h,
            aspect_ratio_min: self.r_l,
            aspect_ratio_max: self.r_h,
            patch_mode: self.mode.into(),
            pixel_probability: self.q,
            style_alpha: self.alpha,
            max_placement_attempts: self.max_placement_attempts,
            max_shape_resamples: self.max_shape_resamples,
        }
    }

    pub fn provider(&self) -> Result<Arc<dyn StyleProvider>, Error> {
        Ok(match &self.style {
            StyleChoice::Identity => Arc::new(IdentityProvider),
            StyleChoice::ColorStat => Arc::new(ColorStatProvider::new(ColorStatConfig {
                alpha: self.alpha,
                color_space: match self.color_space {
                    CliColorSpace::Rgb => ColorSpace::Rgb,
                    CliColorSpace::Opponent => ColorSpace::Opponent,
                },
                ..ColorStatConfig::default()
            })?),
            StyleChoice::External(path) => external_provider(path, self.alpha)?,
        })
    }
}

fn external_provider(path: &Path, alpha: f64) -> Result<Arc<dyn StyleProvider>, Error> {
    let provider = style_replace::style::load_external_provider(path)?.with_alpha(alpha)?;
    Ok(Arc::new(provider))
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InputFlags {
    /// Input dataset: STL-10 image file or PNG directory.
    #[arg(long)]
    pub input: PathBuf,
    /// STL-10 label file for the input.
    #[arg(long)]
    pub input_labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "stl10")]
    pub format: Format,
}

impl InputFlags {
    fn read(&self) -> Result<DatasetView, Error> {
        match self.format {
            Format::Stl10 => read_stl10(&self.input, self.input_labels.as_deref()),
            Format::Imgdir => read_image_dir(&self.input),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct AugmentCmd {
    #[command(flatten)]
    pub input: InputFlags,
    /// Output dataset path.
    #[arg(long)]
    pub output: PathBuf,
    /// STL-10 label file for the output.
    #[arg(long)]
    pub output_labels: Option<PathBuf>,
    /// Output format; defaults to the input format.
    #[arg(long, value_enum)]
    pub output_format: Option<Format>,
    /// Augmented copies per original.
    #[arg(long, default_value_t = 1)]
    pub ratio: u32,
    /// Gate the originals themselves instead of appending copies.
    #[arg(long, conflicts_with = "ratio")]
    pub in_place: bool,
    /// Manifest path (JSON Lines).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Worker threads (output does not depend on it).
    #[arg(long, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Print a JSON summary on stdout.
    #[arg(long)]
    pub json_summary: bool,
    #[command(flatten)]
    pub augment: AugmentFlags,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GalleryCmd {
    #[command(flatten)]
    pub input: InputFlags,
    /// PNG file to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Number of rows (input images).
    #[arg(long, short = 'n', default_value_t = 5)]
    pub n: usize,
    #[command(flatten)]
    pub augment: AugmentFlags,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ValidateCmd {
    /// Take the image size from this STL-10 file or PNG directory.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub input_labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "stl10")]
    pub format: Format,
    #[arg(long, default_value_t = 96)]
    pub width: usize,
    #[arg(long, default_value_t = 96)]
    pub height: usize,
    #[command(flatten)]
    pub augment: AugmentFlags,
}

/// Outcome of a successful `augment` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub items_in: usize,
    pub items_out: usize,
    pub augmented: usize,
    pub applied: usize,
    pub seed: u64,
    pub seconds: f64,
    pub images_per_second: f64,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Io(e.to_string())
        }
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Diagnostics go to `stderr`; only the JSON summary goes to `stdout`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

fn resolve_seed(flags: &mut AugmentFlags, stderr: &mut dyn Write) -> u64 {
    *flags.seed.get_or_insert_with(|| {
        let seed = rand::random::<u64>();
        let _ = writeln!(stderr, "seed: {seed} (pass --seed {seed} to reproduce)");
        seed
    })
}

fn dispatch(mut cli: CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match &mut cli.command {
        Command::Validate(cmd) => {
            let (w, h) = match &cmd.input {
                Some(path) => {
                    let input = InputFlags {
                        input: path.clone(),
                        input_labels: cmd.input_labels.clone(),
                        format: cmd.format,
                    };
                    let ds = input.read()?;
                    ds.dims()
                        .map(|d| (d.width, d.height))
                        .unwrap_or((cmd.width, cmd.height))
                }
                None => (cmd.width, cmd.height),
            };
            cmd.augment.augment_config().validate(w, h)?;
            ColorStatConfig::default()
                .with_alpha(cmd.augment.alpha)
                .validate()?;
            let _ = writeln!(stderr, "ok: configuration is valid for {w}x{h} images");
            Ok(())
        }
        Command::Gallery(cmd) => {
            if cmd.n == 0 {
                return Err(Failure::Config("--n must be at least 1".into()));
            }
            let seed = resolve_seed(&mut cmd.augment, stderr);
            let cfg = cmd.augment.augment_config();
            let provider = cmd.augment.provider()?;
            let ds = cmd.input.read()?;
            let grid = gallery::render(&ds, &cfg, provider.as_ref(), cmd.n, seed)?;
            gallery::save_png(&grid, &cmd.output)?;
            let _ = writeln!(
                stderr,
                "gallery: {} rows x {} columns -> {}",
                cmd.n.min(ds.len()),
                gallery::COLUMNS.len(),
                cmd.output.display()
            );
            Ok(())
        }
        Command::Augment(_) => {
            let effective = {
                let Command::Augment(cmd) = &mut cli.command else { unreachable!() };
                resolve_seed(&mut cmd.augment, stderr);
                cli.clone()
            };
            let Command::Augment(cmd) = &cli.command else { unreachable!() };
            let summary = augment(cmd, &effective, stderr)?;
            if cmd.json_summary {
                let _ = writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string(&summary).expect("summary serializes")
                );
            }
            Ok(())
        }
    }
}

fn augment(cmd: &AugmentCmd, effective: &CliConfig, stderr: &mut dyn Write) -> Result<Summary, Failure> {
    let seed = cmd.augment.seed.expect("seed resolved");
    let cfg = cmd.augment.augment_config();
    let provider = cmd.augment.provider()?;
    let input = cmd.input.read()?;
    let opts = RunOptions {
        threads: cmd.threads,
    };

    let started = Instant::now();
    let (output, records) = if cmd.in_place {
        augment_in_place(&input, &cfg, provider.as_ref(), seed, opts)?
    } else {
        augment_dataset(&input, &cfg, provider.as_ref(), cmd.ratio, seed, opts)?
    };
    let seconds = started.elapsed().as_secs_f64();

    match cmd.output_format.unwrap_or(cmd.input.format) {
        Format::Stl10 => write_stl10(&output, &cmd.output, cmd.output_labels.as_deref())?,
        Format::Imgdir => write_image_dir(&output, &cmd.output)?,
    }

    if let Some(path) = &cmd.manifest {
        let mut header = ManifestHeader::new(seed, cfg.clone(), provider.name(), if cmd.in_place { 0 } else { cmd.ratio });
        header.in_place = cmd.in_place;
        header.invocation = Some(serde_json::to_value(effective).expect("config serializes"));
        write_manifest(
            &Manifest {
                header,
                records: records.clone(),
            },
            path,
        )?;
    }

    let applied = records.iter().filter(|r| r.applied).count();
    let summary = Summary {
        items_in: input.len(),
        items_out: output.len(),
        augmented: records.len(),
        applied,
        seed,
        seconds,
        images_per_second: if seconds > 0.0 {
            records.len() as f64 / seconds
        } else {
            0.0
        },
    };
    let _ = writeln!(
        stderr,
        "augment: {} in, {} out, {} applied of {} gated, {:.3} s, {:.1} images/s",
        summary.items_in,
        summary.items_out,
        summary.applied,
        summary.augmented,
        summary.seconds,
        summary.images_per_second
    );
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn style_choice_parses() {
        assert_eq!("identity".parse::<StyleChoice>().unwrap(), StyleChoice::Identity);
        assert_eq!(
            "external:/tmp/m.onnx".parse::<StyleChoice>().unwrap(),
            StyleChoice::External("/tmp/m.onnx".into())
        );
        assert!("external:".parse::<StyleChoice>().is_err());
        assert!("neural".parse::<StyleChoice>().is_err());
    }

    #[test]
    fn defaults_match_documented_values() {
        let cli = CliConfig::try_parse_from(["style-replace", "validate"]).unwrap();
        let Command::Validate(cmd) = cli.command else { panic!() };
        let f = &cmd.augment;
        assert_eq!((f.p, f.q, f.alpha), (0.5, 0.5, 0.5));
        assert_eq!((f.s_l, f.s_h, f.r_l), (0.02, 0.4, 0.3));
        assert!((f.r_h - 3.333).abs() < 1e-3);
        assert_eq!(f.style, StyleChoice::ColorStat);
        assert_eq!(f.augment_config(), AugmentConfig::default());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cli = CliConfig::try_parse_from([
            "style-replace", "augment", "--input", "a.bin", "--output", "b.bin", "--mode", "pixel",
            "--q", "0.25", "--seed", "9", "--style", "external:m.onnx", "--threads", "3",
        ])
        .unwrap();
        let v = serde_json::to_value(&cli).unwrap();
        let back: CliConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, cli);
    }
}
