//! Outsourced-computation server: accepts evaluation keys, answers encoded
//! inputs with responses, and survives malformed traffic.
//!
//! One thread per connection; the function store is shared behind a mutex
//! and keyed by the content digest of the registered key, so registration
//! is idempotent and last-write-wins. A decode failure or an unknown
//! function id produces an error frame on the same connection and the
//! serve loop carries on; only transport failures end a connection.

use super::{
    decode_evaluation_key, decode_input, encode_response, function_id, read_frame, write_frame,
    Frame, MsgType, WireError,
};
use crate::algebra::Group;
use crate::scheme::{compute_on_input, EvaluationKey};
use log::{debug, warn};
use std::collections::HashMap;
use std::io;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

type FunctionStore = Arc<Mutex<HashMap<[u8; 32], (Group, EvaluationKey)>>>;

fn reply_for(store: &FunctionStore, frame: &Frame) -> Frame {
    match handle_request(store, frame) {
        Ok(reply) => reply,
        Err(err) => Frame::error(&err.to_string()),
    }
}

fn handle_request(store: &FunctionStore, frame: &Frame) -> Result<Frame, WireError> {
    match frame.msg_type {
        MsgType::Ekf => {
            let (group, ek) = decode_evaluation_key(&frame.payload)?;
            let id = function_id(&frame.payload);
            store.lock().unwrap().insert(id, (group, ek));
            debug!("registered function {}", hex32(&id));
            Ok(Frame::new(MsgType::Resp, id.to_vec()))
        }
        MsgType::Enc => {
            if frame.payload.len() < 32 {
                return Err(WireError::ShortRead);
            }
            let (id_bytes, input_payload) = frame.payload.split_at(32);
            let mut id = [0u8; 32];
            id.copy_from_slice(id_bytes);
            let (group, x) = decode_input(input_payload)?;
            let entry = store.lock().unwrap().get(&id).cloned();
            let (key_group, ek) = entry.ok_or(WireError::UnknownFunction)?;
            if key_group != group {
                return Err(WireError::ProtocolMismatch(
                    "input and function use different groups".into(),
                ));
            }
            let resp = compute_on_input(&group, &ek, &x)?;
            Ok(Frame::new(
                MsgType::Resp,
                encode_response(&group, &resp).bytes,
            ))
        }
        other => Err(WireError::ProtocolMismatch(format!(
            "unexpected message type {}",
            other as u8
        ))),
    }
}

fn hex32(id: &[u8; 32]) -> String {
    id.iter().map(|b| format!("{b:02x}")).collect()
}

fn serve_connection(mut stream: TcpStream, store: FunctionStore) {
    let peer = stream
        .peer_addr()
        .map(|a| a.to_string())
        .unwrap_or_else(|_| "unknown".into());
    loop {
        let frame = match read_frame(&mut stream) {
            Ok(frame) => frame,
            // EOF between frames is an orderly close.
            Err(WireError::ShortRead) => break,
            Err(WireError::Io(err)) => {
                debug!("connection {peer}: {err}");
                break;
            }
            Err(err) => {
                // The stream may be desynchronized, but the peer still gets
                // told what went wrong before we keep listening for a
                // recognizable frame boundary.
                warn!("connection {peer}: {err}");
                if write_frame(&mut stream, &Frame::error(&err.to_string())).is_err() {
                    break;
                }
                continue;
            }
        };
        let reply = reply_for(&store, &frame);
        if let Err(err) = write_frame(&mut stream, &reply) {
            debug!("connection {peer}: {err}");
            break;
        }
    }
}

/// Serves forever on an already-bound listener. Used by the CLI.
pub fn serve(listener: TcpListener) -> io::Result<()> {
    let store: FunctionStore = Arc::new(Mutex::new(HashMap::new()));
    for stream in listener.incoming() {
        match stream {
            Ok(stream) => {
                let store = Arc::clone(&store);
                std::thread::spawn(move || serve_connection(stream, store));
            }
            Err(err) => warn!("accept failed: {err}"),
        }
    }
    Ok(())
}

/// A background server that shuts down when dropped.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    accept_thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(handle) = self.accept_thread.take() {
            let _ = handle.join();
        }
    }
}

/// Binds and serves on a background thread; `addr` may use port 0.
pub fn spawn(addr: impl ToSocketAddrs) -> io::Result<ServerHandle> {
    let listener = TcpListener::bind(addr)?;
    let addr = listener.local_addr()?;
    listener.set_nonblocking(true)?;
    let stop = Arc::new(AtomicBool::new(false));
    let stop_flag = Arc::clone(&stop);
    let accept_thread = std::thread::spawn(move || {
        let store: FunctionStore = Arc::new(Mutex::new(HashMap::new()));
        while !stop_flag.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    // Connections use blocking reads; the nonblocking flag
                    // is only for the accept loop.
                    if stream.set_nonblocking(false).is_err() {
                        continue;
                    }
                    let store = Arc::clone(&store);
                    std::thread::spawn(move || serve_connection(stream, store));
                }
                Err(err) if err.kind() == io::ErrorKind::WouldBlock => {
                    std::thread::sleep(Duration::from_millis(5));
                }
                Err(err) => {
                    warn!("accept failed: {err}");
                    std::thread::sleep(Duration::from_millis(5));
                }
            }
        }
    });
    Ok(ServerHandle {
        addr,
        stop,
        accept_thread: Some(accept_thread),
    })
}
