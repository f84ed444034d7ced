//! Command implementations and the HTTP service behind the `dcv` binary.
//! Everything lives in the library so integration tests can drive the
//! router and the command plumbing in-process.

pub mod commands;
pub mod render;
pub mod server;

/// 128-bit random id, hex-rendered. Used for sessions and validation runs.
pub fn new_validation_id() -> String {
    use rand::RngCore;
    let mut bytes = [0u8; 16];
    rand::rngs::OsRng.fill_bytes(&mut bytes);
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
