//! Canonical byte encodings shared by the commitment layer, the challenge
//! oracle, and the wire format: little-endian minimal-width entries for
//! mod-q values, length prefixes for variable fields.

use crate::error::{Error, Result};
use crate::zq::{Modulus, ZqVector};

pub fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Append one mod-q entry at the modulus's canonical width.
pub fn put_zq_entry(out: &mut Vec<u8>, q: Modulus, v: u64) {
    debug_assert!(v < q.get());
    let w = q.entry_width();
    out.extend_from_slice(&v.to_le_bytes()[..w]);
}

pub fn put_zq_vector(out: &mut Vec<u8>, v: &ZqVector) {
    for &x in &v.data {
        put_zq_entry(out, v.q, x);
    }
}

pub fn zq_vector_bytes(v: &ZqVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(v.len() * v.q.entry_width());
    put_zq_vector(&mut out, v);
    out
}

pub struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Encoding("truncated input".into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    pub fn zq_entry(&mut self, q: Modulus) -> Result<u64> {
        let w = q.entry_width();
        let b = self.take(w)?;
        let mut buf = [0u8; 8];
        buf[..w].copy_from_slice(b);
        let v = u64::from_le_bytes(buf);
        if v >= q.get() {
            return Err(Error::Encoding(format!(
                "entry {v} not reduced mod {}",
                q.get()
            )));
        }
        Ok(v)
    }

    pub fn zq_vector(&mut self, q: Modulus, len: usize) -> Result<ZqVector> {
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(self.zq_entry(q)?);
        }
        Ok(ZqVector::from_u64(q, data))
    }

    pub fn finished(&self) -> bool {
        self.pos == self.data.len()
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.finished() {
            Ok(())
        } else {
            Err(Error::Encoding("trailing bytes".into()))
        }
    }
}
