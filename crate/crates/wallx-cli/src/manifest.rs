use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Mode;

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Canonical arguments after merging the config file.
    pub arguments: serde_json::Value,
    pub input_sha256: String,
    pub output_sha256: String,
    pub mode: Mode,
    pub threads: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(command: &str, arguments: serde_json::Value, input: &[u8], output: &serde_json::Value, mode: Mode) -> Self {
        let mut hashed = serde_json::to_vec(&arguments).expect("arguments serialize");
        hashed.extend_from_slice(input);
        let out = serde_json::to_vec(output).expect("output serializes");
        Self {
            tool: "wallx",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            arguments,
            input_sha256: sha256_hex(&hashed),
            output_sha256: sha256_hex(&out),
            mode,
            threads: rayon::current_num_threads(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
