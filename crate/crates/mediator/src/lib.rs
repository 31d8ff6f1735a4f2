//! Streaming mediator: a TCP service that applies a trained replacement
//! autoencoder to each window a client sends, before the data leaves the
//! user's side.
//!
//! Every message is a [`Frame`]: a version byte, a kind byte, a `u32` LE
//! payload length and the payload. A session opens with a hello carrying the
//! client's window shape `(k, d)` as two `u32` LE; the server answers with its
//! own hello of the same form or with an error frame if the shapes disagree.
//! Each window frame (raw sensor units, `k·d` `f32` LE, channels first) is
//! then answered by exactly one transformed frame, in order.
//!
//! There is no authentication or encryption.

mod client;
mod error;
mod frame;
mod server;

pub use client::Client;
pub use error::{ErrorCode, FrameError, MediatorError};
pub use frame::{
    decode_frame, encode_frame, f32s_from_payload, f32s_to_payload, read_frame, shape_payload,
    write_frame, Frame, FrameKind, HEADER_LEN, MAX_PAYLOAD, PROTOCOL_VERSION,
};
pub use server::{Server, ShutdownHandle};
