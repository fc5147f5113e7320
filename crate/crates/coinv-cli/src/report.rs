//! Machine-readable run reports for the CLI.

use serde::Serialize;
use std::collections::BTreeMap;

/// What a run concluded. `Mismatch` means the computation finished but a
/// verdict-style check (computed vs predicted, torsion isomorphism, …)
/// failed; it maps to exit code 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Mismatch,
}

#[derive(Serialize)]
pub struct RunReport<T: Serialize> {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub digest: String,
    pub result: T,
    pub status: Status,
}

impl<T: Serialize> RunReport<T> {
    pub fn new(command: &str, inputs: BTreeMap<String, String>, result: T, status: Status) -> Self {
        let digest = digest_inputs(&inputs);
        RunReport {
            command: command.to_string(),
            inputs,
            digest,
            result,
            status,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// FNV-1a over the sorted key=value input pairs; a stable fingerprint of
/// what the command actually consumed.
pub fn digest_inputs(inputs: &BTreeMap<String, String>) -> String {
    let mut hash = Fnv::new();
    for (k, v) in inputs {
        hash.feed(k.as_bytes());
        hash.feed(&[0]);
        hash.feed(v.as_bytes());
        hash.feed(&[0xff]);
    }
    hash.hex()
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hash = Fnv::new();
    hash.feed(bytes);
    hash.hex()
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }

    fn feed(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    fn hex(&self) -> String {
        format!("{:016x}", self.0)
    }
}
