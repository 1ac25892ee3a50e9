//! Feed-forward stylizer loaded from an ONNX file.
//!
//! The model must take two float inputs, an image tensor `N x 3 x H x W` with
//! intensities in `[0, 1]` and a style embedding `N x D`, and return one image
//! tensor of the same shape as its image input. Inputs are told apart by rank.
//! `D` must be a fixed dimension; `H` and `W` default to 96 when the model
//! leaves them symbolic. Each call draws the embedding from a standard normal,
//! runs the network with `N = 1`, blends the result with the input by `alpha`
//! and clamps to `[0, 1]`.

use std::path::{Path, PathBuf};

use tract_onnx::pb;
use tract_onnx::pb::tensor_shape_proto::dimension::Value as DimValue;
use tract_onnx::prelude::*;

use super::{StyleParams, StyleProvider};
use crate::error::{Error, Result};
use crate::image::Image;
use crate::rng::RngStream;

const DEFAULT_SIDE: usize = 96;

/// Resolved input/output layout of a loaded model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSignature {
    pub image_input: usize,
    pub style_input: usize,
    pub width: usize,
    pub height: usize,
    pub embedding_dim: usize,
}

pub struct ExternalModelProvider {
    path: PathBuf,
    plan: std::sync::Arc<TypedRunnableModel>,
    signature: ModelSignature,
    alpha: f64,
}

impl std::fmt::Debug for ExternalModelProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalModelProvider")
            .field("path", &self.path)
            .field("signature", &self.signature)
            .field("alpha", &self.alpha)
            .finish()
    }
}

/// Loads `model_path` with the default blend weight of 0.5.
pub fn load_external_provider(model_path: impl AsRef<Path>) -> Result<ExternalModelProvider> {
    ExternalModelProvider::load(model_path)
}

fn declared_shape(info: &pb::ValueInfoProto) -> Option<Vec<Option<usize>>> {
    let ty = info.r#type.as_ref()?.value.as_ref()?;
    let pb::type_proto::Value::TensorType(t) = ty;
    let shape = t.shape.as_ref()?;
    Some(
        shape
            .dim
            .iter()
            .map(|d| match d.value {
                Some(DimValue::DimValue(v)) if v > 0 => Some(v as usize),
                _ => None,
            })
            .collect(),
    )
}

impl ExternalModelProvider {
    pub fn load(model_path: impl AsRef<Path>) -> Result<Self> {
        Self::load_inner(model_path.as_ref(), None)
    }

    /// Like [`load`](Self::load) but fixes symbolic spatial dimensions to
    /// `width x height`.
    pub fn load_for_size(model_path: impl AsRef<Path>, width: usize, height: usize) -> Result<Self> {
        Self::load_inner(model_path.as_ref(), Some((width, height)))
    }

    fn load_inner(path: &Path, size: Option<(usize, usize)>) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::ModelNotFound(path.to_path_buf()));
        }
        let parse_err = |e: TractError| Error::ModelParse {
            path: path.to_path_buf(),
            message: format!("{e:#}"),
        };
        let onnx = tract_onnx::onnx();
        let proto = onnx.proto_model_for_path(path).map_err(parse_err)?;
        let graph = proto.graph.as_ref().ok_or_else(|| Error::ModelParse {
            path: path.to_path_buf(),
            message: "model has no graph".into(),
        })?;

        let initializers: Vec<&str> = graph.initializer.iter().map(|t| t.name.as_str()).collect();
        let inputs: Vec<&pb::ValueInfoProto> = graph
            .input
            .iter()
            .filter(|i| !initializers.contains(&i.name.as_str()))
            .collect();
        if inputs.len() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "expected 2 inputs (image, style embedding), model has {}",
                inputs.len()
            )));
        }
        if graph.output.len() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected 1 output, model has {}",
                graph.output.len()
            )));
        }

        let shapes: Vec<Vec<Option<usize>>> = inputs
            .iter()
            .map(|i| {
                declared_shape(i).ok_or_else(|| {
                    Error::ShapeMismatch(format!("input `{}` declares no tensor shape", i.name))
                })
            })
            .collect::<Result<_>>()?;
        let image_input = shapes.iter().position(|s| s.len() == 4).ok_or_else(|| {
            Error::ShapeMismatch("no rank-4 image input (N x 3 x H x W)".into())
        })?;
        let style_input = 1 - image_input;
        let image_shape = &shapes[image_input];
        let style_shape = &shapes[style_input];
        if style_shape.len() != 2 {
            return Err(Error::ShapeMismatch(format!(
                "style input `{}` has rank {}, expected 2 (N x D)",
                inputs[style_input].name,
                style_shape.len()
            )));
        }
        let embedding_dim = style_shape[1].ok_or_else(|| {
            Error::ShapeMismatch("style embedding dimension D must be fixed".into())
        })?;
        if let Some(c) = image_shape[1] {
            if c != 3 {
                return Err(Error::ShapeMismatch(format!(
                    "image input has {c} channels, expected 3"
                )));
            }
        }
        let (default_w, default_h) = size.unwrap_or((DEFAULT_SIDE, DEFAULT_SIDE));
        let height = image_shape[2].unwrap_or(default_h);
        let width = image_shape[3].unwrap_or(default_w);
        if let Some((w, h)) = size {
            if (w, h) != (width, height) {
                return Err(Error::ShapeMismatch(format!(
                    "model image input is {width}x{height}, requested {w}x{h}"
                )));
            }
        }

        let model = onnx
            .model_for_proto_model(&proto)
            .map_err(parse_err)?
            .with_input_fact(image_input, f32::fact([1, 3, height, width]).into())
            .and_then(|m| m.with_input_fact(style_input, f32::fact([1, embedding_dim]).into()))
            .map_err(parse_err)?
            .into_optimized()
            .map_err(|e| Error::ShapeMismatch(format!("{e:#}")))?;

        let out_fact = model.output_fact(0).map_err(parse_err)?;
        let expected = [1, 3, height, width];
        let concrete = out_fact.shape.as_concrete().map(|s| s.to_vec());
        if concrete.as_deref() != Some(&expected[..]) {
            return Err(Error::ShapeMismatch(format!(
                "output shape {:?} differs from image input shape {expected:?}",
                out_fact.shape
            )));
        }
        if out_fact.datum_type != f32::datum_type() {
            return Err(Error::ShapeMismatch(format!(
                "output type {:?}, expected f32",
                out_fact.datum_type
            )));
        }
        let plan = model.into_runnable().map_err(parse_err)?;

        Ok(Self {
            path: path.to_path_buf(),
            plan,
            signature: ModelSignature {
                image_input,
                style_input,
                width,
                height,
                embedding_dim,
            },
            alpha: 0.5,
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfBounds {
                field: "style_alpha",
                value: alpha,
                bounds: "[0, 1]",
            });
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn signature(&self) -> ModelSignature {
        self.signature
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl StyleProvider for ExternalModelProvider {
    fn name(&self) -> &str {
        "external"
    }

    fn stylize(&self, image: &Image, rng: &mut RngStream) -> Result<(Image, StyleParams)> {
        let sig = self.signature;
        if image.channels() != 3 || image.width() != sig.width || image.height() != sig.height {
            return Err(Error::ShapeMismatch(format!(
                "model expects {}x{}x3 images, got {}",
                sig.width,
                sig.height,
                image.dims()
            )));
        }
        let embedding: Vec<f32> = (0..sig.embedding_dim)
            .map(|_| rng.standard_normal() as f32)
            .collect();

        let (w, h) = (sig.width, sig.height);
        let plane = w * h;
        let mut nchw = vec![0.0f32; 3 * plane];
        for (i, px) in image.as_slice().chunks_exact(3).enumerate() {
            for c in 0..3 {
                nchw[c * plane + i] = px[c];
            }
        }
        let image_tensor =
            Tensor::from_shape(&[1, 3, h, w], &nchw).map_err(|e| Error::Inference(e.to_string()))?;
        let style_tensor = Tensor::from_shape(&[1, sig.embedding_dim], &embedding)
            .map_err(|e| Error::Inference(e.to_string()))?;
        let mut inputs: TVec<TValue> = tvec![TValue::from(Tensor::default()); 2];
        inputs[sig.image_input] = image_tensor.into();
        inputs[sig.style_input] = style_tensor.into();

        let outputs = self
            .plan
            .run(inputs)
            .map_err(|e| Error::Inference(format!("{e:#}")))?;
        let view = outputs[0]
            .try_as_plain_ram()
            .map_err(|e| Error::Inference(e.to_string()))?;
        let out = view
            .as_slice::<f32>()
            .map_err(|e| Error::Inference(e.to_string()))?;
        if out.len() != 3 * plane {
            return Err(Error::ShapeMismatch(format!(
                "network produced {} values, expected {}",
                out.len(),
                3 * plane
            )));
        }

        let alpha = self.alpha;
        let keep = 1.0 - alpha;
        let mut data = Vec::with_capacity(3 * plane);
        for (i, px) in image.as_slice().chunks_exact(3).enumerate() {
            for c in 0..3 {
                let net = f64::from(out[c * plane + i]);
                if !net.is_finite() {
                    return Err(Error::Inference(format!(
                        "non-finite network output at pixel {i}, channel {c}"
                    )));
                }
                let v = alpha * net + keep * f64::from(px[c]);
                data.push((v as f32).clamp(0.0, 1.0));
            }
        }
        Ok((
            Image::from_parts(w, h, 3, data),
            StyleParams::External { alpha, embedding },
        ))
    }
}
