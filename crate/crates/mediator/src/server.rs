use std::io::{self, BufReader, BufWriter};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use raekit::rae::TrainedRae;

use crate::error::{ErrorCode, FrameError};
use crate::frame::{f32s_from_payload, read_frame, write_frame, Frame, FrameKind};

const DRAIN_TIMEOUT: Duration = Duration::from_millis(500);

/// Accepts connections and serves each one on its own thread. The model is
/// shared read-only between handlers.
pub struct Server {
    listener: TcpListener,
    model: Arc<TrainedRae>,
    stop: Arc<AtomicBool>,
}

/// Stops a running [`Server::run`] from another thread.
#[derive(Clone)]
pub struct ShutdownHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
}

impl ShutdownHandle {
    /// Stops accepting new connections. Sessions already open run to
    /// completion.
    pub fn shutdown(&self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the blocking accept.
        let _ = TcpStream::connect(self.addr);
    }
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(addr: A, model: TrainedRae) -> io::Result<Self> {
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            model: Arc::new(model),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn shutdown_handle(&self) -> io::Result<ShutdownHandle> {
        Ok(ShutdownHandle {
            addr: self.local_addr()?,
            stop: Arc::clone(&self.stop),
        })
    }

    /// Serves until [`ShutdownHandle::shutdown`] is called.
    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                // A client that gave up before being accepted.
                Err(e) if e.kind() == io::ErrorKind::ConnectionAborted => continue,
                Err(e) => return Err(e),
            };
            let model = Arc::clone(&self.model);
            thread::spawn(move || {
                let _ = handle(stream, &model);
            });
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> io::Result<(ShutdownHandle, thread::JoinHandle<io::Result<()>>)> {
        let handle = self.shutdown_handle()?;
        Ok((handle, thread::spawn(move || self.run())))
    }
}

/// Sends an error frame and ends the session. Input still in flight is
/// drained first: closing a socket with unread data resets it, and the reset
/// can destroy the error frame before the client reads it.
fn reject(
    reader: &mut BufReader<TcpStream>,
    writer: &mut BufWriter<TcpStream>,
    code: ErrorCode,
    message: &str,
) -> Result<(), FrameError> {
    write_frame(writer, &Frame::error(code as u16, message))?;
    let stream = writer.get_ref();
    stream.shutdown(Shutdown::Write)?;
    stream.set_read_timeout(Some(DRAIN_TIMEOUT))?;
    let _ = io::copy(reader, &mut io::sink());
    Ok(())
}

fn frame_error_code(e: &FrameError) -> ErrorCode {
    match e {
        FrameError::Io(_) => ErrorCode::Internal,
        _ => ErrorCode::Malformed,
    }
}

/// One session: hello, then window/transformed pairs until the client
/// closes. Any violation is answered with an error frame and ends the session.
fn handle(stream: TcpStream, model: &TrainedRae) -> Result<(), FrameError> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    let (k, d) = model.window_shape();
    let mut greeted = false;
    loop {
        let frame = match read_frame(&mut reader) {
            Ok(Some(f)) => f,
            Ok(None) => return Ok(()),
            Err(FrameError::Io(e)) => return Err(e.into()),
            Err(e) => {
                return reject(
                    &mut reader,
                    &mut writer,
                    frame_error_code(&e),
                    &e.to_string(),
                )
            }
        };
        match (frame.kind, greeted) {
            (FrameKind::Hello, false) => {
                let shape = match frame.shape() {
                    Ok(s) => s,
                    Err(e) => {
                        return reject(
                            &mut reader,
                            &mut writer,
                            ErrorCode::Malformed,
                            &e.to_string(),
                        )
                    }
                };
                if shape != (k, d) {
                    let msg = format!("client shape {shape:?} does not match model ({k}, {d})");
                    return reject(&mut reader, &mut writer, ErrorCode::ShapeMismatch, &msg);
                }
                write_frame(&mut writer, &Frame::hello(k, d))?;
                greeted = true;
            }
            (FrameKind::Window, true) => {
                let values = match f32s_from_payload(&frame.payload) {
                    Ok(v) => v,
                    Err(e) => {
                        return reject(
                            &mut reader,
                            &mut writer,
                            ErrorCode::Malformed,
                            &e.to_string(),
                        )
                    }
                };
                if values.len() != k * d {
                    let msg = format!(
                        "window has {} values, model expects {}",
                        values.len(),
                        k * d
                    );
                    return reject(&mut reader, &mut writer, ErrorCode::ShapeMismatch, &msg);
                }
                match model.transform_raw_f32(&values) {
                    Ok(out) => write_frame(&mut writer, &Frame::transformed(&out))?,
                    Err(e) => {
                        return reject(
                            &mut reader,
                            &mut writer,
                            ErrorCode::Internal,
                            &e.to_string(),
                        )
                    }
                }
            }
            (FrameKind::Window, false) => {
                return reject(
                    &mut reader,
                    &mut writer,
                    ErrorCode::Protocol,
                    "window sent before hello",
                )
            }
            (FrameKind::Hello, true) => {
                return reject(
                    &mut reader,
                    &mut writer,
                    ErrorCode::Protocol,
                    "second hello",
                )
            }
            (kind, _) => {
                let msg = format!("clients may not send {kind:?} frames");
                return reject(&mut reader, &mut writer, ErrorCode::Protocol, &msg);
            }
        }
    }
}
