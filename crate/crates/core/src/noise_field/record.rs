//! Flat binary records for noise realizations and grid fields.
//!
//! Layout (all integers and floats little-endian):
//!
//! | offset | size | content                                         |
//! |--------|------|-------------------------------------------------|
//! | 0      | 8    | magic `b"WICKNLS\0"`                             |
//! | 8      | 4    | format version (`1`)                            |
//! | 12     | 4    | kind: `1` noise, `2` field                      |
//! | 16     | 8    | size: lattice half-width K (noise) or grid N    |
//! | 24     | 8    | seed                                            |
//! | 32     | 8    | ε as f64 (`0` for noise and limit objects)       |
//! | 40     | 8    | noise amplitude as f64                          |
//! | 48     | 4    | components per sample: `1` real, `2` complex    |
//! | 52     | 4    | reserved, zero                                  |
//! | 56     | 8    | payload length in f64 values                    |
//! | 64     | …    | payload, f64 row-major                          |
//!
//! Noise payloads run over `n₁, n₂ ∈ [-K, K]` (n₂ fastest) with real and
//! imaginary parts interleaved. Field payloads run over grid indices
//! `(i₁, i₂)`, `i₂` fastest.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::NoiseRealization;
use crate::spectral::GridField;
use crate::{Error, Result};

pub const MAGIC: [u8; 8] = *b"WICKNLS\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u32)]
pub enum RecordKind {
    Noise = 1,
    Field = 2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecordHeader {
    pub kind: RecordKind,
    pub size: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub amplitude: f64,
    pub components: u32,
    pub payload_len: u64,
}

impl RecordHeader {
    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..8].copy_from_slice(&MAGIC);
        b[8..12].copy_from_slice(&VERSION.to_le_bytes());
        b[12..16].copy_from_slice(&(self.kind as u32).to_le_bytes());
        b[16..24].copy_from_slice(&self.size.to_le_bytes());
        b[24..32].copy_from_slice(&self.seed.to_le_bytes());
        b[32..40].copy_from_slice(&self.epsilon.to_le_bytes());
        b[40..48].copy_from_slice(&self.amplitude.to_le_bytes());
        b[48..52].copy_from_slice(&self.components.to_le_bytes());
        b[56..64].copy_from_slice(&self.payload_len.to_le_bytes());
        b
    }

    fn decode(b: &[u8; HEADER_LEN]) -> Result<Self> {
        let u32_at = |o: usize| u32::from_le_bytes(b[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(b[o..o + 8].try_into().unwrap());
        if b[0..8] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        if u32_at(8) != VERSION {
            return Err(Error::Format(format!("unsupported version {}", u32_at(8))));
        }
        let kind = match u32_at(12) {
            1 => RecordKind::Noise,
            2 => RecordKind::Field,
            k => return Err(Error::Format(format!("unknown record kind {k}"))),
        };
        Ok(RecordHeader {
            kind,
            size: u64_at(16),
            seed: u64_at(24),
            epsilon: f64::from_le_bytes(b[32..40].try_into().unwrap()),
            amplitude: f64::from_le_bytes(b[40..48].try_into().unwrap()),
            components: u32_at(48),
            payload_len: u64_at(56),
        })
    }
}

fn write_payload(out: &mut Vec<u8>, values: impl Iterator<Item = f64>) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn read_record(mut r: impl Read) -> Result<(RecordHeader, Vec<f64>)> {
    let io = |e| Error::Format(format!("truncated record: {e}"));
    let mut hb = [0u8; HEADER_LEN];
    r.read_exact(&mut hb).map_err(io)?;
    let header = RecordHeader::decode(&hb)?;
    let len = usize::try_from(header.payload_len)
        .map_err(|_| Error::Format("payload length overflows".into()))?;
    let mut bytes = vec![0u8; len.checked_mul(8).ok_or_else(|| Error::Format("payload too large".into()))?];
    r.read_exact(&mut bytes).map_err(io)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(io)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    let payload = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, payload))
}

pub fn encode_noise(noise: &NoiseRealization) -> Vec<u8> {
    let c = noise.coefficients();
    let header = RecordHeader {
        kind: RecordKind::Noise,
        size: noise.halfwidth() as u64,
        seed: noise.seed,
        epsilon: 0.0,
        amplitude: noise.amplitude,
        components: 2,
        payload_len: 2 * c.len() as u64,
    };
    let mut out = header.encode().to_vec();
    write_payload(&mut out, c.iter().flat_map(|z| [z.re, z.im]));
    out
}

/// Decodes a noise record and re-checks the symmetry invariants.
pub fn decode_noise(bytes: &[u8]) -> Result<NoiseRealization> {
    let (h, payload) = read_record(bytes)?;
    if h.kind != RecordKind::Noise || h.components != 2 {
        return Err(Error::Format("not a complex noise record".into()));
    }
    let coeffs = payload
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let k = usize::try_from(h.size).map_err(|_| Error::Format("bad lattice size".into()))?;
    NoiseRealization::from_coefficients(h.seed, k, h.amplitude, coeffs)
        .map_err(|e| Error::Format(e.to_string()))
}

/// Metadata carried alongside a serialized field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldMeta {
    pub seed: u64,
    pub epsilon: f64,
    pub amplitude: f64,
}

/// Encodes a field; `real_only` drops the imaginary parts.
pub fn encode_field(field: &GridField, meta: FieldMeta, real_only: bool) -> Vec<u8> {
    let v = field.values();
    let components = if real_only { 1 } else { 2 };
    let header = RecordHeader {
        kind: RecordKind::Field,
        size: field.n() as u64,
        seed: meta.seed,
        epsilon: meta.epsilon,
        amplitude: meta.amplitude,
        components,
        payload_len: components as u64 * v.len() as u64,
    };
    let mut out = header.encode().to_vec();
    if real_only {
        write_payload(&mut out, v.iter().map(|z| z.re));
    } else {
        write_payload(&mut out, v.iter().flat_map(|z| [z.re, z.im]));
    }
    out
}

pub fn decode_field(bytes: &[u8]) -> Result<(GridField, FieldMeta)> {
    let (h, payload) = read_record(bytes)?;
    if h.kind != RecordKind::Field {
        return Err(Error::Format("not a field record".into()));
    }
    let n = usize::try_from(h.size).map_err(|_| Error::Format("bad grid size".into()))?;
    let values: Vec<Complex64> = match h.components {
        1 => payload.iter().map(|&re| Complex64::new(re, 0.0)).collect(),
        2 => payload.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect(),
        c => return Err(Error::Format(format!("bad component count {c}"))),
    };
    let field = GridField::new(n, values).map_err(|e| Error::Format(e.to_string()))?;
    Ok((
        field,
        FieldMeta {
            seed: h.seed,
            epsilon: h.epsilon,
            amplitude: h.amplitude,
        },
    ))
}

pub fn write_bytes(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))?;
    f.sync_all().map_err(|e| Error::io(path, e))
}
