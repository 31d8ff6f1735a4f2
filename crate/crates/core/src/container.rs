//! Shared binary container:
//!
//! ```text
//! magic[8] | version u32 | meta_len u32 | metadata (UTF-8 JSON) | body | crc32 u32
//! ```
//!
//! All integers are little-endian. The CRC32 covers every byte before it.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{Error, Result};

pub(crate) struct Container<M> {
    pub meta: M,
    pub body: Vec<u8>,
}

pub(crate) fn encode<M: Serialize>(
    magic: &'static [u8; 8],
    version: u32,
    meta: &M,
    body: &[u8],
) -> Result<Vec<u8>> {
    let meta = serde_json::to_vec(meta)?;
    let meta_len = u32::try_from(meta.len())
        .map_err(|_| Error::Format("metadata block exceeds 4 GiB".into()))?;
    let mut out = Vec::with_capacity(8 + 4 + 4 + meta.len() + body.len() + 4);
    out.extend_from_slice(magic);
    out.extend_from_slice(&version.to_le_bytes());
    out.extend_from_slice(&meta_len.to_le_bytes());
    out.extend_from_slice(&meta);
    out.extend_from_slice(body);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub(crate) fn decode<M: DeserializeOwned>(
    bytes: &[u8],
    magic: &'static [u8; 8],
    magic_name: &'static str,
    version: u32,
) -> Result<Container<M>> {
    if bytes.len() < 8 || &bytes[..8] != magic {
        return Err(Error::Magic {
            expected: magic_name,
        });
    }
    if bytes.len() < 16 + 4 {
        return Err(Error::Format("file is truncated".into()));
    }
    let found = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if found != version {
        return Err(Error::Version {
            found,
            supported: version,
        });
    }
    let (payload, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    let meta_len = u32::from_le_bytes(payload[12..16].try_into().unwrap()) as usize;
    let meta_end = 16usize
        .checked_add(meta_len)
        .filter(|&e| e <= payload.len())
        .ok_or_else(|| Error::Format("metadata length exceeds file size".into()))?;
    let meta = serde_json::from_slice(&payload[16..meta_end])?;
    Ok(Container {
        meta,
        body: payload[meta_end..].to_vec(),
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub(crate) fn push_f32s(out: &mut Vec<u8>, values: impl IntoIterator<Item = f64>) {
    for v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
}

pub(crate) fn push_u32s(out: &mut Vec<u8>, values: impl IntoIterator<Item = u32>) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Sequential little-endian reader over a body.
pub(crate) struct BodyReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BodyReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("body is shorter than its metadata declares".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn f32s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::Format("size overflow".into()))?,
        )?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
            .collect())
    }

    pub fn u32s(&mut self, n: usize) -> Result<Vec<u32>> {
        let raw = self.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::Format("size overflow".into()))?,
        )?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes after body",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAGIC: &[u8; 8] = b"TESTTEST";

    #[test]
    fn round_trip_and_corruption() {
        let mut body = Vec::new();
        push_f32s(&mut body, [1.5, -2.0]);
        push_u32s(&mut body, [7]);
        let bytes = encode(MAGIC, 1, &vec![1, 2, 3], &body).unwrap();

        let c: Container<Vec<u32>> = decode(&bytes, MAGIC, "TESTTEST", 1).unwrap();
        assert_eq!(c.meta, vec![1, 2, 3]);
        let mut r = BodyReader::new(&c.body);
        assert_eq!(r.f32s(2).unwrap(), vec![1.5, -2.0]);
        assert_eq!(r.u32s(1).unwrap(), vec![7]);
        r.finish().unwrap();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            decode::<Vec<u32>>(&bad, MAGIC, "TESTTEST", 1),
            Err(Error::Magic { .. })
        ));

        let mut flipped = bytes.clone();
        let last_body = bytes.len() - 5;
        flipped[last_body] ^= 0xFF;
        assert!(matches!(
            decode::<Vec<u32>>(&flipped, MAGIC, "TESTTEST", 1),
            Err(Error::Checksum { .. })
        ));

        assert!(matches!(
            decode::<Vec<u32>>(&bytes, MAGIC, "TESTTEST", 2),
            Err(Error::Version {
                found: 1,
                supported: 2
            })
        ));
    }
}
