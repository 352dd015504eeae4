//! WITL binary trace format, little-endian throughout:
//!
//! | offset | type    | field            |
//! |--------|---------|------------------|
//! | 0      | [u8; 4] | magic `WITL`     |
//! | 4      | u8      | version (1)      |
//! | 5      | u8      | flags (0)        |
//! | 6      | u16     | reserved (0)     |
//! | 8      | u32     | sample rate, Hz  |
//! | 12     | u16     | streams          |
//! | 14     | u16     | subcarriers      |
//! | 16     | u64     | frame count      |
//! | 24     | u64     | first timestamp  |
//!
//! followed by `frames * streams * subcarriers` pairs of `f32` (re, im).

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex32;

use crate::error::{Error, Result};
use crate::trace::CsiTrace;

pub const MAGIC: [u8; 4] = *b"WITL";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 32;

pub fn encode_trace<W: Write>(trace: &CsiTrace, mut w: W) -> Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(&MAGIC);
    header[4] = VERSION;
    header[8..12].copy_from_slice(&trace.sample_rate().to_le_bytes());
    header[12..14].copy_from_slice(&(trace.n_streams() as u16).to_le_bytes());
    header[14..16].copy_from_slice(&(trace.n_subcarriers() as u16).to_le_bytes());
    header[16..24].copy_from_slice(&(trace.n_frames() as u64).to_le_bytes());
    header[24..32].copy_from_slice(&trace.t0_ns().to_le_bytes());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(trace.samples().len() * 8);
    for c in trace.samples() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn decode_trace<R: Read>(mut r: R) -> Result<CsiTrace> {
    let mut header = [0u8; HEADER_LEN];
    let got = read_full(&mut r, &mut header)?;
    if got >= 4 && header[0..4] != MAGIC {
        return Err(Error::BadMagic(header[0..4].try_into().expect("4 bytes")));
    }
    if got < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN as u64,
            found: got as u64,
        });
    }
    if header[4] != VERSION {
        return Err(Error::UnsupportedVersion(header[4]));
    }
    let u16_at = |o: usize| u16::from_le_bytes([header[o], header[o + 1]]);
    let u64_at = |o: usize| u64::from_le_bytes(header[o..o + 8].try_into().expect("8 bytes"));
    let sample_rate = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes"));
    let (n_streams, n_subcarriers) = (u16_at(12), u16_at(14));
    let n_frames = u64_at(16);
    let t0_ns = u64_at(24);

    let payload = n_frames
        .checked_mul(n_streams as u64 * n_subcarriers as u64)
        .and_then(|n| n.checked_mul(8))
        .filter(|&b| usize::try_from(b).is_ok())
        .ok_or_else(|| {
            Error::ShapeOverflow(format!(
                "{n_frames} frames x {n_streams} streams x {n_subcarriers} subcarriers"
            ))
        })?;

    let mut bytes = Vec::new();
    r.take(payload + 1).read_to_end(&mut bytes)?;
    if (bytes.len() as u64) < payload {
        return Err(Error::Truncated {
            expected: payload,
            found: bytes.len() as u64,
        });
    }
    if bytes.len() as u64 > payload {
        return Err(Error::ShapeOverflow(format!(
            "payload longer than the {payload} bytes the header declares"
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| {
            Complex32::new(
                f32::from_le_bytes(c[0..4].try_into().expect("4 bytes")),
                f32::from_le_bytes(c[4..8].try_into().expect("4 bytes")),
            )
        })
        .collect();
    CsiTrace::new(sample_rate, n_streams, n_subcarriers, t0_ns, data)
}

fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match r.read(&mut buf[n..])? {
            0 => break,
            k => n += k,
        }
    }
    Ok(n)
}

pub fn write_trace(path: impl AsRef<Path>, trace: &CsiTrace) -> Result<()> {
    let mut bytes = Vec::with_capacity(HEADER_LEN + trace.samples().len() * 8);
    encode_trace(trace, &mut bytes)?;
    super::write_atomic(path.as_ref(), &bytes)
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<CsiTrace> {
    decode_trace(BufReader::new(File::open(path)?))
}
