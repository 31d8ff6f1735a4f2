use std::io::{self, Read, Write};

use crate::error::FrameError;

pub const PROTOCOL_VERSION: u8 = 1;
/// Version, kind and length.
pub const HEADER_LEN: usize = 6;
/// Largest payload a reader accepts; anything bigger is treated as malformed
/// rather than allocated.
pub const MAX_PAYLOAD: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum FrameKind {
    Hello = 0,
    Window = 1,
    Transformed = 2,
    Error = 3,
}

impl FrameKind {
    pub fn from_u8(v: u8) -> Option<Self> {
        Some(match v {
            0 => Self::Hello,
            1 => Self::Window,
            2 => Self::Transformed,
            3 => Self::Error,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameKind,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: FrameKind, payload: Vec<u8>) -> Self {
        Self { kind, payload }
    }

    pub fn hello(k: usize, d: usize) -> Self {
        Self::new(FrameKind::Hello, shape_payload(k, d))
    }

    pub fn window(values: &[f32]) -> Self {
        Self::new(FrameKind::Window, f32s_to_payload(values))
    }

    pub fn transformed(values: &[f32]) -> Self {
        Self::new(FrameKind::Transformed, f32s_to_payload(values))
    }

    pub fn error(code: u16, message: &str) -> Self {
        let mut payload = code.to_le_bytes().to_vec();
        payload.extend_from_slice(message.as_bytes());
        Self::new(FrameKind::Error, payload)
    }

    /// `(k, d)` from a hello payload.
    pub fn shape(&self) -> Result<(usize, usize), FrameError> {
        if self.payload.len() != 8 {
            return Err(FrameError::Payload(format!(
                "hello payload has {} bytes, expected 8",
                self.payload.len()
            )));
        }
        let k = u32::from_le_bytes(self.payload[..4].try_into().unwrap());
        let d = u32::from_le_bytes(self.payload[4..].try_into().unwrap());
        Ok((k as usize, d as usize))
    }

    /// Code and message of an error frame.
    pub fn error_parts(&self) -> Result<(u16, String), FrameError> {
        if self.payload.len() < 2 {
            return Err(FrameError::Payload(
                "error payload shorter than its code".into(),
            ));
        }
        let code = u16::from_le_bytes([self.payload[0], self.payload[1]]);
        Ok((
            code,
            String::from_utf8_lossy(&self.payload[2..]).into_owned(),
        ))
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }
}

pub fn shape_payload(k: usize, d: usize) -> Vec<u8> {
    let mut p = (k as u32).to_le_bytes().to_vec();
    p.extend_from_slice(&(d as u32).to_le_bytes());
    p
}

pub fn f32s_to_payload(values: &[f32]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn f32s_from_payload(payload: &[u8]) -> Result<Vec<f32>, FrameError> {
    if !payload.len().is_multiple_of(4) {
        return Err(FrameError::Payload(format!(
            "{} bytes is not a whole number of f32 values",
            payload.len()
        )));
    }
    Ok(payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn encode_frame(kind: FrameKind, payload: &[u8]) -> Result<Vec<u8>, FrameError> {
    let len = u32::try_from(payload.len()).map_err(|_| FrameError::TooLarge {
        len: payload.len(),
        max: u32::MAX as usize,
    })?;
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.push(PROTOCOL_VERSION);
    out.push(kind as u8);
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(payload);
    Ok(out)
}

fn parse_header(h: &[u8; HEADER_LEN]) -> Result<(FrameKind, usize), FrameError> {
    if h[0] != PROTOCOL_VERSION {
        return Err(FrameError::Version(h[0]));
    }
    let kind = FrameKind::from_u8(h[1]).ok_or(FrameError::Kind(h[1]))?;
    let len = u32::from_le_bytes(h[2..6].try_into().unwrap()) as usize;
    Ok((kind, len))
}

/// Decodes exactly one frame occupying all of `bytes`.
pub fn decode_frame(bytes: &[u8]) -> Result<Frame, FrameError> {
    let header: &[u8; HEADER_LEN] = bytes
        .get(..HEADER_LEN)
        .and_then(|h| h.try_into().ok())
        .ok_or(FrameError::Incomplete {
            needed: HEADER_LEN,
            available: bytes.len(),
        })?;
    let (kind, len) = parse_header(header)?;
    let needed = HEADER_LEN + len;
    if bytes.len() < needed {
        return Err(FrameError::Incomplete {
            needed,
            available: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(FrameError::Trailing(bytes.len() - needed));
    }
    Ok(Frame::new(kind, bytes[HEADER_LEN..].to_vec()))
}

/// Reads the next frame. `Ok(None)` means the stream ended cleanly between
/// frames; an end inside a frame is [`FrameError::Incomplete`].
pub fn read_frame<R: Read>(reader: &mut R) -> Result<Option<Frame>, FrameError> {
    let mut header = [0u8; HEADER_LEN];
    let got = read_full(reader, &mut header)?;
    if got == 0 {
        return Ok(None);
    }
    if got < HEADER_LEN {
        return Err(FrameError::Incomplete {
            needed: HEADER_LEN,
            available: got,
        });
    }
    let (kind, len) = parse_header(&header)?;
    if len > MAX_PAYLOAD {
        return Err(FrameError::TooLarge {
            len,
            max: MAX_PAYLOAD,
        });
    }
    let mut payload = vec![0u8; len];
    let got = read_full(reader, &mut payload)?;
    if got < len {
        return Err(FrameError::Incomplete {
            needed: HEADER_LEN + len,
            available: HEADER_LEN + got,
        });
    }
    Ok(Some(Frame::new(kind, payload)))
}

/// Like `read_exact`, but reports how much arrived before end of stream.
fn read_full<R: Read>(reader: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// Writes the whole frame with one call so concurrent writers on different
/// sockets never see partial frames.
pub fn write_frame<W: Write>(writer: &mut W, frame: &Frame) -> Result<(), FrameError> {
    writer.write_all(&encode_frame(frame.kind, &frame.payload)?)?;
    writer.flush()?;
    Ok(())
}
