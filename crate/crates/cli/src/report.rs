//! Report envelope: schema version, embedded configuration, input hash, and
//! results.  Field order is fixed by struct declaration so serialization is
//! byte-deterministic.

use serde::Serialize;

#[derive(Serialize)]
pub struct Envelope<C: Serialize, R: Serialize> {
    pub schema: u32,
    pub command: &'static str,
    pub config: C,
    /// FNV-1a hash of the canonical serialization of the inputs.
    pub input_hash: String,
    pub guarantee_met: bool,
    pub results: R,
}

pub fn render<C: Serialize, R: Serialize>(e: &Envelope<C, R>) -> String {
    let mut s = serde_json::to_string_pretty(e).expect("report serializes");
    s.push('\n');
    s
}
