//! Versioned binary checkpoint: model metadata, the vocabulary and label
//! tables, and the seven parameter arrays as little-endian 64-bit floats.
//! Values round-trip bit for bit, so a reloaded checkpoint is the trained
//! model, not an approximation of it.

use std::io::Write;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use qpdn::model::{ParamSet, VariantTag, PARAM_BLOCKS};
use qpdn::{Error, ParamSet64, Result};

const MAGIC: &[u8; 4] = b"QPDN";
const VERSION: u32 = 1;

/// A trained model plus everything needed to use it on raw text.
#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub params: ParamSet64,
    pub vocab: Vec<String>,
    pub labels: Vec<String>,
    pub seed: u64,
}

fn bad(message: impl Into<String>) -> Error {
    Error::Checkpoint(message.into())
}

pub fn save(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let params = &checkpoint.params;
    if checkpoint.vocab.len() != params.vocab_size {
        return Err(bad(format!(
            "vocabulary has {} entries but the model expects {}",
            checkpoint.vocab.len(),
            params.vocab_size
        )));
    }
    if checkpoint.labels.len() != params.label_count {
        return Err(bad(format!(
            "label table has {} entries but the model expects {}",
            checkpoint.labels.len(),
            params.label_count
        )));
    }

    let mut out: Vec<u8> = Vec::new();
    out.write_all(MAGIC)?;
    out.write_u32::<LittleEndian>(VERSION)?;
    out.write_u64::<LittleEndian>(params.embedding_dim as u64)?;
    out.write_u64::<LittleEndian>(params.measurement_count as u64)?;
    out.write_u64::<LittleEndian>(params.vocab_size as u64)?;
    out.write_u64::<LittleEndian>(params.label_count as u64)?;
    out.write_u64::<LittleEndian>(checkpoint.seed)?;
    write_string(&mut out, params.variant.as_str())?;
    for token in &checkpoint.vocab {
        write_string(&mut out, token)?;
    }
    for label in &checkpoint.labels {
        write_string(&mut out, label)?;
    }
    for block in PARAM_BLOCKS {
        let (rows, cols) = block_shape(params, block.name());
        write_string(&mut out, block.name())?;
        out.write_u64::<LittleEndian>(rows as u64)?;
        out.write_u64::<LittleEndian>(cols as u64)?;
        for &value in params.block(block) {
            out.write_f64::<LittleEndian>(value)?;
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Checkpoint> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read {
        path: path.display().to_string(),
        source,
    })?;
    let mut cursor = std::io::Cursor::new(bytes.as_slice());

    let mut magic = [0u8; 4];
    read_exact(&mut cursor, &mut magic)?;
    if &magic != MAGIC {
        return Err(bad("magic bytes missing; not a checkpoint file"));
    }
    let version = cursor.read_u32::<LittleEndian>().map_err(truncated)?;
    if version != VERSION {
        return Err(bad(format!(
            "version mismatch: file is v{version}, reader understands v{VERSION}"
        )));
    }
    let embedding_dim = read_dim(&mut cursor, "embedding_dim")?;
    let measurement_count = read_dim(&mut cursor, "measurement_count")?;
    let vocab_size = read_dim(&mut cursor, "vocab_size")?;
    let label_count = read_dim(&mut cursor, "label_count")?;
    let seed = cursor.read_u64::<LittleEndian>().map_err(truncated)?;
    let variant = VariantTag::parse(&read_string(&mut cursor)?)
        .map_err(|e| bad(format!("bad variant field: {e}")))?;

    let mut vocab = Vec::with_capacity(vocab_size);
    for _ in 0..vocab_size {
        vocab.push(read_string(&mut cursor)?);
    }
    let mut labels = Vec::with_capacity(label_count);
    for _ in 0..label_count {
        labels.push(read_string(&mut cursor)?);
    }

    let mut params = ParamSet::<f64>::zeros(
        embedding_dim,
        vocab_size,
        measurement_count,
        label_count,
        variant,
    );
    for block in PARAM_BLOCKS {
        let name = read_string(&mut cursor)?;
        if name != block.name() {
            return Err(bad(format!(
                "shape mismatch: expected array {:?}, found {:?}",
                block.name(),
                name
            )));
        }
        let rows = read_dim(&mut cursor, "rows")?;
        let cols = read_dim(&mut cursor, "cols")?;
        let (want_rows, want_cols) = block_shape(&params, block.name());
        if (rows, cols) != (want_rows, want_cols) {
            return Err(bad(format!(
                "shape mismatch: array {} is {rows}x{cols}, model needs {want_rows}x{want_cols}",
                block.name()
            )));
        }
        for slot in params.block_mut(block) {
            *slot = cursor.read_f64::<LittleEndian>().map_err(truncated)?;
        }
    }
    if (cursor.position() as usize) != bytes.len() {
        return Err(bad(format!(
            "{} trailing bytes after the last array",
            bytes.len() - cursor.position() as usize
        )));
    }
    Ok(Checkpoint {
        params,
        vocab,
        labels,
        seed,
    })
}

/// Declared (rows, cols) per array; vectors are stored as single columns.
fn block_shape(params: &ParamSet64, name: &str) -> (usize, usize) {
    match name {
        "R" | "Phi" => (params.vocab_size, params.embedding_dim),
        "Pi" => (params.vocab_size, 1),
        "V_amplitudes" | "V_phases" => (params.measurement_count, params.embedding_dim),
        "W" => (params.feature_dim(), params.label_count),
        "b" => (params.label_count, 1),
        other => unreachable!("unknown block {other}"),
    }
}

fn truncated(_: std::io::Error) -> Error {
    bad("truncated file")
}

fn read_exact(cursor: &mut std::io::Cursor<&[u8]>, buf: &mut [u8]) -> Result<()> {
    std::io::Read::read_exact(cursor, buf).map_err(truncated)?;
    Ok(())
}

fn read_dim(cursor: &mut std::io::Cursor<&[u8]>, what: &str) -> Result<usize> {
    let value = cursor.read_u64::<LittleEndian>().map_err(truncated)?;
    usize::try_from(value).map_err(|_| bad(format!("{what} {value} exceeds the address space")))
}

fn write_string(out: &mut Vec<u8>, s: &str) -> Result<()> {
    out.write_u64::<LittleEndian>(s.len() as u64)?;
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn read_string(cursor: &mut std::io::Cursor<&[u8]>) -> Result<String> {
    let len = read_dim(cursor, "string length")?;
    let remaining = cursor.get_ref().len() - cursor.position() as usize;
    if len > remaining {
        return Err(bad("truncated file"));
    }
    let mut buf = vec![0u8; len];
    read_exact(cursor, &mut buf)?;
    String::from_utf8(buf).map_err(|_| bad("string field is not UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Checkpoint {
        let mut params = ParamSet::<f64>::zeros(3, 5, 2, 2, VariantTag::Full);
        let mut x = 0.0f64;
        for block in PARAM_BLOCKS {
            for slot in params.block_mut(block) {
                x += 0.137;
                *slot = x.sin() * 3.0;
            }
        }
        Checkpoint {
            params,
            vocab: ["<oov>", "a", "b", "c", "d"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            labels: vec!["neg".into(), "pos".into()],
            seed: 77,
        }
    }

    #[test]
    fn round_trip_is_bitwise_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.qpdn");
        let original = sample();
        save(&path, &original).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.vocab, original.vocab);
        assert_eq!(loaded.labels, original.labels);
        assert_eq!(loaded.seed, original.seed);
        assert_eq!(loaded.params.variant, original.params.variant);
        for block in PARAM_BLOCKS {
            let a: Vec<u64> = original
                .params
                .block(block)
                .iter()
                .map(|v| v.to_bits())
                .collect();
            let b: Vec<u64> = loaded
                .params
                .block(block)
                .iter()
                .map(|v| v.to_bits())
                .collect();
            assert_eq!(a, b, "block {}", block.name());
        }
    }

    #[test]
    fn rejects_foreign_and_corrupted_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.qpdn");

        std::fs::write(&path, b"not a checkpoint").unwrap();
        assert!(matches!(load(&path), Err(Error::Checkpoint(_))));

        save(&path, &sample()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 9);
        std::fs::write(&path, &bytes).unwrap();
        let err = load(&path).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn rejects_version_drift() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.qpdn");
        save(&path, &sample()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 9;
        std::fs::write(&path, &bytes).unwrap();
        let err = load(&path).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn rejects_shape_drift() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.qpdn");
        let mut ckpt = sample();
        // Lie about the embedding dimension; the R array no longer fits.
        ckpt.params.embedding_dim = 3;
        save(&path, &ckpt).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 4;
        std::fs::write(&path, &bytes).unwrap();
        let err = load(&path).unwrap_err();
        assert!(
            err.to_string().contains("mismatch") || err.to_string().contains("truncated"),
            "{err}"
        );
    }
}
