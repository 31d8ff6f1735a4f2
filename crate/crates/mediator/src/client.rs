use std::io::BufReader;
use std::net::{TcpStream, ToSocketAddrs};

use crate::error::MediatorError;
use crate::frame::{f32s_from_payload, read_frame, write_frame, Frame, FrameKind};

/// Blocking client for one mediator session.
pub struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    shape: (usize, usize),
}

impl Client {
    /// Connects and performs the hello exchange for windows of `shape`.
    pub fn connect<A: ToSocketAddrs>(
        addr: A,
        shape: (usize, usize),
    ) -> Result<Self, MediatorError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let mut client = Self {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
            shape,
        };
        write_frame(&mut client.writer, &Frame::hello(shape.0, shape.1))?;
        let reply = client.expect(FrameKind::Hello)?;
        let server_shape = reply.shape()?;
        if server_shape != shape {
            return Err(MediatorError::Protocol(format!(
                "server answered shape {server_shape:?} to {shape:?}"
            )));
        }
        Ok(client)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Sends one window without waiting for its reply.
    pub fn send(&mut self, raw: &[f32]) -> Result<(), MediatorError> {
        write_frame(&mut self.writer, &Frame::window(raw))?;
        Ok(())
    }

    /// Receives the reply to the oldest unanswered window.
    pub fn recv(&mut self) -> Result<Vec<f32>, MediatorError> {
        let frame = self.expect(FrameKind::Transformed)?;
        Ok(f32s_from_payload(&frame.payload)?)
    }

    pub fn transform(&mut self, raw: &[f32]) -> Result<Vec<f32>, MediatorError> {
        self.send(raw)?;
        self.recv()
    }

    fn expect(&mut self, kind: FrameKind) -> Result<Frame, MediatorError> {
        let frame = read_frame(&mut self.reader)?
            .ok_or_else(|| MediatorError::Protocol("server closed the connection".into()))?;
        if frame.kind == FrameKind::Error {
            let (code, message) = frame.error_parts()?;
            return Err(MediatorError::Remote { code, message });
        }
        if frame.kind != kind {
            return Err(MediatorError::Protocol(format!(
                "expected {kind:?}, got {:?}",
                frame.kind
            )));
        }
        Ok(frame)
    }
}
