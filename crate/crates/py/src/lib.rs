//! Python bindings. Images cross the boundary as raw `uint8` buffers in
//! `H x W x C` order; records come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use style_replace::style::{ColorSpace, ColorStatConfig, ColorStatProvider, IdentityProvider, StyleProvider};
use style_replace::{
    derive_stream, random_style_replacement, AugmentConfig, DatasetItem, DatasetView, Error, Image,
    PatchMode, RunOptions,
};

create_exception!(style_replace_py, LayoutError, PyValueError);
create_exception!(style_replace_py, ConfigError, PyValueError);

fn to_py(e: Error) -> PyErr {
    if e.is_config_error() {
        ConfigError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// Augmentation settings plus the choice of style provider.
#[pyclass(name = "Config", from_py_object)]
#[derive(Clone)]
pub struct PyConfig {
    inner: AugmentConfig,
    style: String,
    color_space: ColorSpace,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (
        mode = "subregion", p = 0.5, q = 0.5, alpha = 0.5,
        s_l = 0.02, s_h = 0.4, r_l = 0.3, r_h = 1.0 / 0.3,
        max_placement_attempts = 100, max_shape_resamples = 10,
        style = "colorstat", color_space = "rgb",
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        mode: &str,
        p: f64,
        q: f64,
        alpha: f64,
        s_l: f64,
        s_h: f64,
        r_l: f64,
        r_h: f64,
        max_placement_attempts: u32,
        max_shape_resamples: u32,
        style: &str,
        color_space: &str,
    ) -> PyResult<Self> {
        let patch_mode: PatchMode = mode.parse().map_err(|e: String| ConfigError::new_err(e))?;
        if !matches!(style, "colorstat" | "identity") {
            return Err(ConfigError::new_err(format!(
                "unknown style `{style}` (expected colorstat or identity)"
            )));
        }
        let color_space = match color_space {
            "rgb" => ColorSpace::Rgb,
            "opponent" => ColorSpace::Opponent,
            other => return Err(ConfigError::new_err(format!("unknown color space `{other}`"))),
        };
        Ok(Self {
            inner: AugmentConfig {
                gate_probability: p,
                area_ratio_min: s_l,
                area_ratio_max: s_h,
                aspect_ratio_min: r_l,
                aspect_ratio_max: r_h,
                patch_mode,
                pixel_probability: q,
                style_alpha: alpha,
                max_placement_attempts,
                max_shape_resamples,
            },
            style: style.to_owned(),
            color_space,
        })
    }

    /// Raises `ConfigError` if no valid region exists for `width x height`.
    fn validate(&self, width: usize, height: usize) -> PyResult<()> {
        self.inner.validate(width, height).map_err(to_py)?;
        self.color_stat().validate().map_err(to_py)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.patch_mode.as_str()
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.gate_probability
    }

    fn __repr__(&self) -> String {
        format!("Config({}, style={})", self.to_json(), self.style)
    }
}

impl PyConfig {
    fn color_stat(&self) -> ColorStatConfig {
        ColorStatConfig {
            alpha: self.inner.style_alpha,
            color_space: self.color_space,
            ..ColorStatConfig::default()
        }
    }

    fn provider(&self) -> PyResult<Box<dyn StyleProvider>> {
        Ok(match self.style.as_str() {
            "identity" => Box::new(IdentityProvider),
            _ => Box::new(ColorStatProvider::new(self.color_stat()).map_err(to_py)?),
        })
    }
}

fn check_layout(len: usize, count: usize, width: usize, height: usize, channels: usize) -> PyResult<()> {
    let expected = count * width * height * channels;
    if len != expected || !matches!(channels, 1 | 3) || width == 0 || height == 0 {
        return Err(LayoutError::new_err(format!(
            "buffer of {len} bytes does not hold {count} image(s) of {width}x{height}x{channels}"
        )));
    }
    Ok(())
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).expect("records serialize");
    py.import("json")?.call_method1("loads", (text,))
}

/// Augments one image on stream `(seed, index)`.
///
/// Returns `(bytes, record)` where `bytes` has the input layout.
#[pyfunction]
#[pyo3(signature = (data, width, height, channels, seed, index = 0, config = None))]
fn augment_image<'py>(
    py: Python<'py>,
    data: &[u8],
    width: usize,
    height: usize,
    channels: usize,
    seed: u64,
    index: u64,
    config: Option<PyConfig>,
) -> PyResult<(Bound<'py, PyBytes>, Bound<'py, PyAny>)> {
    check_layout(data.len(), 1, width, height, channels)?;
    let config = config.map_or_else(PyConfig::default_py, Ok)?;
    config.inner.validate(width, height).map_err(to_py)?;
    let image = Image::from_u8(width, height, channels, data).map_err(to_py)?;
    let provider = config.provider()?;
    let (out, record) = py
        .detach(|| random_style_replacement(&image, &mut derive_stream(seed, index), &config.inner, provider.as_ref()))
        .map_err(to_py)?;
    Ok((PyBytes::new(py, &out.to_u8()), to_dict(py, &record)?))
}

/// Augments `count` stacked images, appending `ratio` copies of each.
///
/// Returns `(bytes, records)` with originals first, then copies round by round.
#[pyfunction]
#[pyo3(signature = (data, count, width, height, channels, seed, ratio = 1, config = None, threads = None))]
#[allow(clippy::too_many_arguments)]
fn augment_dataset<'py>(
    py: Python<'py>,
    data: &[u8],
    count: usize,
    width: usize,
    height: usize,
    channels: usize,
    seed: u64,
    ratio: u32,
    config: Option<PyConfig>,
    threads: Option<usize>,
) -> PyResult<(Bound<'py, PyBytes>, Bound<'py, PyAny>)> {
    check_layout(data.len(), count, width, height, channels)?;
    let config = config.map_or_else(PyConfig::default_py, Ok)?;
    let stride = width * height * channels;
    let items = data
        .chunks_exact(stride.max(1))
        .enumerate()
        .map(|(i, chunk)| {
            Ok(DatasetItem {
                image: Image::from_u8(width, height, channels, chunk)?,
                label: None,
                source_id: i.to_string(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(to_py)?;
    let input = DatasetView::new(items).map_err(to_py)?;
    let provider = config.provider()?;
    let (out, records) = py
        .detach(|| {
            style_replace::augment_dataset(&input, &config.inner, provider.as_ref(), ratio, seed, RunOptions { threads })
        })
        .map_err(to_py)?;
    let bytes: Vec<u8> = out.items().iter().flat_map(|i| i.image.to_u8()).collect();
    Ok((PyBytes::new(py, &bytes), to_dict(py, &records)?))
}

impl PyConfig {
    fn default_py() -> PyResult<Self> {
        Self::new("subregion", 0.5, 0.5, 0.5, 0.02, 0.4, 0.3, 1.0 / 0.3, 100, 10, "colorstat", "rgb")
    }
}

#[pymodule]
fn style_replace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_function(wrap_pyfunction!(augment_image, m)?)?;
    m.add_function(wrap_pyfunction!(augment_dataset, m)?)?;
    m.add("LayoutError", m.py().get_type::<LayoutError>())?;
    m.add("ConfigError", m.py().get_type::<ConfigError>())?;
    Ok(())
}
