//! Binary trajectory dump: the magic `OPTOSIM1`, then little-endian
//! dt (f64), seed (u64), member (u64), sample count (u64), followed by the
//! displacement and intensity samples (f64 each).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DUMP_MAGIC: &[u8; 8] = b"OPTOSIM1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub seed: u64,
    pub member: u64,
    pub displacement: Vec<f64>,
    pub intensity: Vec<f64>,
}

impl Trajectory {
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.displacement.len();
        let mut out = Vec::with_capacity(40 + 16 * n);
        out.extend_from_slice(DUMP_MAGIC);
        out.extend_from_slice(&self.dt.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.member.to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        for v in self.displacement.iter().chain(&self.intensity) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 40 || &bytes[..8] != DUMP_MAGIC {
            return Err(Error::Parse("not an oracle trajectory dump".into()));
        }
        let word = |i: usize| -> [u8; 8] { bytes[i..i + 8].try_into().expect("8 bytes") };
        let dt = f64::from_le_bytes(word(8));
        let seed = u64::from_le_bytes(word(16));
        let member = u64::from_le_bytes(word(24));
        let n = u64::from_le_bytes(word(32)) as usize;
        if bytes.len() != 40 + 16 * n {
            return Err(Error::Parse(format!("dump length {} does not match {n} samples", bytes.len())));
        }
        let read = |k: usize| f64::from_le_bytes(word(40 + 8 * k));
        Ok(Self {
            dt,
            seed,
            member,
            displacement: (0..n).map(read).collect(),
            intensity: (n..2 * n).map(read).collect(),
        })
    }
}
