//! Binary dataset file: a 16-byte magic, a little-endian `u32` length and a
//! JSON header of that length, then fixed 36-byte records
//! (`6 x f32` coordinates, `2 x f32` distances, `u8` flag, 3 zero bytes).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Dataset, DatasetHeader, TrainingPair};
use crate::{GifsError, Result};

pub const DATASET_MAGIC: &[u8; 16] = b"GIFSDATA\0\0\0\0v001";
pub const DATASET_VERSION: u32 = 1;
pub const RECORD_BYTES: usize = 36;

pub fn write_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dataset_to(ds, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_dataset_to<W: Write>(ds: &Dataset, w: &mut W) -> Result<()> {
    if ds.header.record_count != ds.records.len() as u64 {
        return Err(GifsError::InvalidConfig("header record count does not match records".into()));
    }
    let header = serde_json::to_vec(&ds.header)?;
    w.write_all(DATASET_MAGIC)?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    let mut buf = [0u8; RECORD_BYTES];
    for r in &ds.records {
        encode_record(r, &mut buf);
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset_from(&mut BufReader::new(File::open(path)?))
}

pub fn read_dataset_from<R: Read>(r: &mut R) -> Result<Dataset> {
    let mut magic = [0u8; 16];
    read_exact(r, &mut magic, "magic")?;
    if &magic != DATASET_MAGIC {
        return Err(GifsError::FormatError("not a dataset file (bad magic)".into()));
    }
    let mut len = [0u8; 4];
    read_exact(r, &mut len, "header length")?;
    let mut header = vec![0u8; u32::from_le_bytes(len) as usize];
    read_exact(r, &mut header, "header")?;
    let header: DatasetHeader =
        serde_json::from_slice(&header).map_err(|e| GifsError::FormatError(format!("dataset header: {e}")))?;
    if header.format_version != DATASET_VERSION {
        return Err(GifsError::FormatError(format!(
            "unsupported dataset version {}",
            header.format_version
        )));
    }
    let count = usize::try_from(header.record_count)
        .map_err(|_| GifsError::FormatError("record count too large".into()))?;
    let mut records = Vec::with_capacity(count.min(1 << 24));
    let mut buf = [0u8; RECORD_BYTES];
    for index in 0..count {
        read_exact(r, &mut buf, "record")?;
        records.push(decode_record(&buf, index)?);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(GifsError::FormatError("trailing bytes after the last record".into()));
    }
    Ok(Dataset { header, records })
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            GifsError::TruncatedFile(format!("dataset ended inside the {what}"))
        } else {
            GifsError::Io(e)
        }
    })
}

fn encode_record(r: &TrainingPair, buf: &mut [u8; RECORD_BYTES]) {
    let floats = [r.p1[0], r.p1[1], r.p1[2], r.p2[0], r.p2[1], r.p2[2], r.udf1, r.udf2];
    for (k, v) in floats.iter().enumerate() {
        buf[4 * k..4 * k + 4].copy_from_slice(&v.to_le_bytes());
    }
    buf[32] = r.flag;
    buf[33..36].fill(0);
}

fn decode_record(buf: &[u8; RECORD_BYTES], index: usize) -> Result<TrainingPair> {
    let f = |k: usize| f32::from_le_bytes(buf[4 * k..4 * k + 4].try_into().unwrap());
    let corrupt = |reason: &str| GifsError::CorruptRecord {
        index,
        reason: reason.into(),
    };
    let r = TrainingPair {
        p1: [f(0), f(1), f(2)],
        p2: [f(3), f(4), f(5)],
        udf1: f(6),
        udf2: f(7),
        flag: buf[32],
    };
    if !r.p1.iter().chain(&r.p2).all(|c| c.is_finite()) {
        return Err(corrupt("non-finite coordinate"));
    }
    if !(r.udf1 >= 0.0 && r.udf2 >= 0.0 && r.udf1.is_finite() && r.udf2.is_finite()) {
        return Err(corrupt("distance must be finite and nonnegative"));
    }
    if r.flag > 1 {
        return Err(corrupt("flag must be 0 or 1"));
    }
    if buf[33..36] != [0, 0, 0] {
        return Err(corrupt("nonzero padding"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::SamplerConfig;
    use crate::geometry::{Normalization, RngSeed};

    fn sample() -> Dataset {
        let records = vec![
            TrainingPair {
                p1: [0.1, 0.2, 0.3],
                p2: [-0.1, 0.0, 0.25],
                flag: 1,
                udf1: 0.01,
                udf2: 0.0,
            },
            TrainingPair {
                p1: [0.4, -0.4, 0.0],
                p2: [0.0, 0.0, 0.0],
                flag: 0,
                udf1: 0.3,
                udf2: 0.02,
            },
        ];
        Dataset {
            header: DatasetHeader {
                format_version: DATASET_VERSION,
                shape_id: "demo".into(),
                normalization: Normalization::identity(),
                sampler: SamplerConfig {
                    seed: RngSeed(9),
                    ..SamplerConfig::default()
                },
                record_count: 2,
                grid_pairs: 0,
            },
            records,
        }
    }

    fn bytes(ds: &Dataset) -> Vec<u8> {
        let mut buf = Vec::new();
        write_dataset_to(ds, &mut buf).unwrap();
        buf
    }

    #[test]
    fn layout_is_fixed_stride() {
        let ds = sample();
        let buf = bytes(&ds);
        let header_len = u32::from_le_bytes(buf[16..20].try_into().unwrap()) as usize;
        assert_eq!(buf.len(), 16 + 4 + header_len + 2 * RECORD_BYTES);
        assert_eq!(&buf[..16], b"GIFSDATA\0\0\0\0v001");
    }

    #[test]
    fn round_trip() {
        let ds = sample();
        assert_eq!(read_dataset_from(&mut bytes(&ds).as_slice()).unwrap(), ds);
    }

    #[test]
    fn bad_magic() {
        let mut buf = bytes(&sample());
        buf[0] = b'X';
        assert!(matches!(read_dataset_from(&mut buf.as_slice()), Err(GifsError::FormatError(_))));
    }

    #[test]
    fn truncated_mid_record() {
        let mut buf = bytes(&sample());
        buf.truncate(buf.len() - 10);
        assert!(matches!(read_dataset_from(&mut buf.as_slice()), Err(GifsError::TruncatedFile(_))));
        let mut buf = bytes(&sample());
        buf.truncate(18);
        assert!(matches!(read_dataset_from(&mut buf.as_slice()), Err(GifsError::TruncatedFile(_))));
    }

    #[test]
    fn corrupt_records() {
        let ds = sample();
        let buf = bytes(&ds);
        let first = buf.len() - 2 * RECORD_BYTES;
        let mut bad_flag = buf.clone();
        bad_flag[first + 32] = 7;
        assert!(matches!(
            read_dataset_from(&mut bad_flag.as_slice()),
            Err(GifsError::CorruptRecord { index: 0, .. })
        ));
        let mut bad_udf = buf.clone();
        let second = first + RECORD_BYTES;
        bad_udf[second + 24..second + 28].copy_from_slice(&(-1.0f32).to_le_bytes());
        assert!(matches!(
            read_dataset_from(&mut bad_udf.as_slice()),
            Err(GifsError::CorruptRecord { index: 1, .. })
        ));
    }

    #[test]
    fn wrong_version_and_trailing_bytes() {
        let mut ds = sample();
        ds.header.format_version = 2;
        let buf = bytes(&ds);
        assert!(matches!(read_dataset_from(&mut buf.as_slice()), Err(GifsError::FormatError(_))));
        let mut buf = bytes(&sample());
        buf.push(0);
        assert!(matches!(read_dataset_from(&mut buf.as_slice()), Err(GifsError::FormatError(_))));
    }
}
