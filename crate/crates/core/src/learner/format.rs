//! Model file: the 13-byte magic `GIFSMODL v001`, a little-endian `u32`
//! length and a JSON block of that length, then every tensor as packed
//! little-endian `f32` in the order the block lists them.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{ModelConfig, ModelParams};
use crate::{GifsError, Result};

pub const MODEL_MAGIC: &[u8; 13] = b"GIFSMODL v001";

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ModelHeader {
    config: ModelConfig,
    tensors: Vec<TensorEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
}

pub fn write_model(params: &ModelParams<f32>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_model_to(params, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_model_to<W: Write>(params: &ModelParams<f32>, w: &mut W) -> Result<()> {
    let header = ModelHeader {
        config: params.config.clone(),
        tensors: params
            .tensor_shapes()
            .into_iter()
            .map(|(name, shape)| TensorEntry { name, shape })
            .collect(),
    };
    let json = serde_json::to_vec(&header)?;
    w.write_all(MODEL_MAGIC)?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    for t in params.tensors() {
        for v in t {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ModelParams<f32>> {
    read_model_from(&mut BufReader::new(File::open(path)?))
}

pub fn read_model_from<R: Read>(r: &mut R) -> Result<ModelParams<f32>> {
    let mut magic = [0u8; 13];
    read_exact(r, &mut magic, "magic")?;
    if &magic != MODEL_MAGIC {
        return Err(GifsError::FormatError("not a model file (bad magic)".into()));
    }
    let mut len = [0u8; 4];
    read_exact(r, &mut len, "header length")?;
    let mut json = vec![0u8; u32::from_le_bytes(len) as usize];
    read_exact(r, &mut json, "header")?;
    let header: ModelHeader =
        serde_json::from_slice(&json).map_err(|e| GifsError::FormatError(format!("model header: {e}")))?;
    header
        .config
        .validate()
        .map_err(|e| GifsError::FormatError(format!("model config: {e}")))?;
    let mut params = ModelParams::<f32>::zeros(&header.config);
    let expected: Vec<TensorEntry> = params
        .tensor_shapes()
        .into_iter()
        .map(|(name, shape)| TensorEntry { name, shape })
        .collect();
    if expected != header.tensors {
        return Err(GifsError::FormatError("tensor list does not match the model config".into()));
    }
    let mut buf = [0u8; 4];
    for t in params.tensors_mut() {
        for v in t.iter_mut() {
            read_exact(r, &mut buf, "tensor data")?;
            *v = f32::from_le_bytes(buf);
        }
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(GifsError::FormatError("trailing bytes after the last tensor".into()));
    }
    if !params.is_finite() {
        return Err(GifsError::FormatError("model contains non-finite weights".into()));
    }
    Ok(params)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            GifsError::TruncatedFile(format!("model ended inside the {what}"))
        } else {
            GifsError::Io(e)
        }
    })
}
