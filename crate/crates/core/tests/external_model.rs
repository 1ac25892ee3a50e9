#![cfg(feature = "onnx")]

use std::path::Path;

use prost::Message;
use tract_onnx::pb::{
    self, tensor_shape_proto, type_proto, AttributeProto, GraphProto, ModelProto, NodeProto,
    OperatorSetIdProto, TensorProto, TensorShapeProto, TypeProto, ValueInfoProto,
};

use style_replace::style::{load_external_provider, ExternalModelProvider, StyleParams, StyleProvider};
use style_replace::{derive_stream, Error, Image};

const FLOAT: i32 = 1;

fn value_info(name: &str, dims: &[i64]) -> ValueInfoProto {
    ValueInfoProto {
        name: name.into(),
        r#type: Some(TypeProto {
            value: Some(type_proto::Value::TensorType(type_proto::Tensor {
                elem_type: FLOAT,
                shape: Some(TensorShapeProto {
                    dim: dims
                        .iter()
                        .map(|&d| tensor_shape_proto::Dimension {
                            value: Some(tensor_shape_proto::dimension::Value::DimValue(d)),
                            ..Default::default()
                        })
                        .collect(),
                }),
            })),
            ..Default::default()
        }),
        ..Default::default()
    }
}

fn ints(name: &str, v: &[i64]) -> AttributeProto {
    AttributeProto {
        name: name.into(),
        r#type: pb::attribute_proto::AttributeType::Ints as i32,
        ints: v.to_vec(),
        ..Default::default()
    }
}

/// One 1x1 convolution over the image with the given per-channel weights;
/// the style embedding input is declared but unused.
fn conv_model(side: i64, stride: i64, weights: [[f32; 3]; 3], embedding: i64) -> Vec<u8> {
    let out_side = (side - 1) / stride + 1;
    let graph = GraphProto {
        name: "test-stylizer".into(),
        node: vec![NodeProto {
            input: vec!["image".into(), "w".into()],
            output: vec!["out".into()],
            op_type: "Conv".into(),
            attribute: vec![ints("kernel_shape", &[1, 1]), ints("strides", &[stride, stride])],
            ..Default::default()
        }],
        initializer: vec![TensorProto {
            name: "w".into(),
            dims: vec![3, 3, 1, 1],
            data_type: FLOAT,
            float_data: weights.iter().flatten().copied().collect(),
            ..Default::default()
        }],
        input: vec![
            value_info("image", &[1, 3, side, side]),
            value_info("style", &[1, embedding]),
        ],
        output: vec![value_info("out", &[1, 3, out_side, out_side])],
        ..Default::default()
    };
    ModelProto {
        ir_version: 7,
        opset_import: vec![OperatorSetIdProto {
            domain: String::new(),
            version: 13,
        }],
        producer_name: "style-replace-tests".into(),
        graph: Some(graph),
        ..Default::default()
    }
    .encode_to_vec()
}

const IDENTITY: [[f32; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn write(dir: &Path, name: &str, bytes: &[u8]) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, bytes).unwrap();
    p
}

fn test_image(side: usize) -> Image {
    Image::from_fn(side, side, 3, |x, y, c| ((x * 7 + y * 13 + c * 50) % 256) as f32 / 255.0).unwrap()
}

#[test]
fn missing_model() {
    assert!(matches!(
        load_external_provider("/definitely/not/here.onnx"),
        Err(Error::ModelNotFound(_))
    ));
}

#[test]
fn garbage_model() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "junk.onnx", b"\x08\x07not a protobuf at all\xff\xff\xff");
    assert!(matches!(load_external_provider(&p), Err(Error::ModelParse { .. })));
}

#[test]
fn strided_model_is_a_shape_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "strided.onnx", &conv_model(96, 2, IDENTITY, 8));
    match load_external_provider(&p) {
        Err(Error::ShapeMismatch(msg)) => assert!(msg.contains("48"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn identity_network_gives_back_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "identity.onnx", &conv_model(96, 1, IDENTITY, 8));
    let provider = load_external_provider(&p).unwrap();
    let sig = provider.signature();
    assert_eq!((sig.width, sig.height, sig.embedding_dim), (96, 96, 8));

    let img = test_image(96);
    let (out, params) = provider.stylize(&img, &mut derive_stream(3, 4)).unwrap();
    for (a, b) in out.as_slice().iter().zip(img.as_slice()) {
        assert!((a - b).abs() <= 1e-4, "{a} vs {b}");
    }
    match params {
        StyleParams::External { alpha, embedding } => {
            assert_eq!(alpha, 0.5);
            assert_eq!(embedding.len(), 8);
            let mut rng = derive_stream(3, 4);
            let expected: Vec<f32> = (0..8).map(|_| rng.standard_normal() as f32).collect();
            assert_eq!(embedding, expected);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn channel_swap_network_blends_by_alpha() {
    // Output channel 0 reads input channel 2 and vice versa.
    let swap = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "swap.onnx", &conv_model(16, 1, swap, 4));
    let provider = ExternalModelProvider::load(&p).unwrap().with_alpha(0.25).unwrap();
    let img = test_image(16);
    let (out, _) = provider.stylize(&img, &mut derive_stream(0, 0)).unwrap();
    for y in 0..16 {
        for x in 0..16 {
            let px = img.pixel(x, y);
            let expect = [
                0.25 * px[2] + 0.75 * px[0],
                px[1],
                0.25 * px[0] + 0.75 * px[2],
            ];
            for c in 0..3 {
                assert!((out.get(x, y, c) - expect[c]).abs() <= 1e-4);
            }
        }
    }
    // Repeated calls on the same stream state agree exactly.
    let (again, _) = provider.stylize(&img, &mut derive_stream(0, 0)).unwrap();
    assert_eq!(out, again);
}

#[test]
fn wrong_image_size_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "identity.onnx", &conv_model(16, 1, IDENTITY, 4));
    let provider = load_external_provider(&p).unwrap();
    assert!(matches!(
        provider.stylize(&test_image(20), &mut derive_stream(0, 0)),
        Err(Error::ShapeMismatch(_))
    ));
    assert!(matches!(
        ExternalModelProvider::load_for_size(&p, 32, 32),
        Err(Error::ShapeMismatch(_))
    ));
}
