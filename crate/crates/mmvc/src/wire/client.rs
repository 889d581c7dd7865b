//! Client-side protocol helpers: register a function, request a computation.

use super::{
    decode_response, encode_evaluation_key, encode_input, read_frame, write_frame, Frame, MsgType,
    WireError,
};
use crate::algebra::{Group, Scalar};
use crate::scheme::{EvaluationKey, ServerResponse};
use std::io;
use std::net::{TcpStream, ToSocketAddrs};

/// One connection to a computation server.
pub struct Client {
    stream: TcpStream,
}

impl Client {
    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<Client> {
        Ok(Client {
            stream: TcpStream::connect(addr)?,
        })
    }

    fn exchange(&mut self, request: &Frame) -> Result<Frame, WireError> {
        write_frame(&mut self.stream, request)?;
        let reply = read_frame(&mut self.stream)?;
        if reply.msg_type == MsgType::Err {
            return Err(WireError::Server(
                String::from_utf8_lossy(&reply.payload).into_owned(),
            ));
        }
        Ok(reply)
    }

    /// Uploads an evaluation key; the server answers with its content id.
    pub fn register_function(
        &mut self,
        group: &Group,
        ek: &EvaluationKey,
    ) -> Result<[u8; 32], WireError> {
        let payload = encode_evaluation_key(group, ek).bytes;
        let reply = self.exchange(&Frame::new(MsgType::Ekf, payload))?;
        if reply.msg_type != MsgType::Resp || reply.payload.len() != 32 {
            return Err(WireError::ProtocolMismatch(
                "registration reply malformed".into(),
            ));
        }
        let mut id = [0u8; 32];
        id.copy_from_slice(&reply.payload);
        Ok(id)
    }

    /// Sends an encoded input for a registered function and decodes the
    /// response. The proof element is validated on arrival; verification
    /// against the input key stays with the caller.
    pub fn request_compute(
        &mut self,
        id: &[u8; 32],
        group: &Group,
        x: &[Scalar],
    ) -> Result<ServerResponse, WireError> {
        let mut payload = id.to_vec();
        payload.extend_from_slice(&encode_input(group, x).bytes);
        let reply = self.exchange(&Frame::new(MsgType::Enc, payload))?;
        if reply.msg_type != MsgType::Resp {
            return Err(WireError::ProtocolMismatch(
                "compute reply malformed".into(),
            ));
        }
        let (resp_group, resp) = decode_response(&reply.payload)?;
        if resp_group != *group {
            return Err(WireError::ProtocolMismatch(
                "response uses a different group".into(),
            ));
        }
        Ok(resp)
    }
}
