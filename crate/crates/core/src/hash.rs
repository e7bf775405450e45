//! Hash plumbing: a counter-mode SHA-256 expander standing in for an XOF,
//! the random-oracle commitment, the matrix-derivation oracle, and the
//! ternary challenge oracle.

use crate::zq::{Modulus, ZqMatrix};
use sha2::{Digest, Sha256};

/// Deterministic byte stream keyed by a domain tag and a seed.
pub struct XofStream {
    seed: Vec<u8>,
    counter: u64,
    buf: [u8; 32],
    used: usize,
}

impl XofStream {
    pub fn new(domain: &[u8], seed: &[u8]) -> Self {
        let mut keyed = Vec::with_capacity(domain.len() + seed.len() + 8);
        keyed.extend_from_slice(&(domain.len() as u64).to_le_bytes());
        keyed.extend_from_slice(domain);
        keyed.extend_from_slice(seed);
        Self {
            seed: keyed,
            counter: 0,
            buf: [0; 32],
            used: 32,
        }
    }

    pub fn next_byte(&mut self) -> u8 {
        if self.used == 32 {
            let mut h = Sha256::new();
            h.update(&self.seed);
            h.update(self.counter.to_le_bytes());
            self.buf = h.finalize().into();
            self.counter += 1;
            self.used = 0;
        }
        let b = self.buf[self.used];
        self.used += 1;
        b
    }

    pub fn next_u32(&mut self) -> u32 {
        let mut b = [0u8; 4];
        for x in b.iter_mut() {
            *x = self.next_byte();
        }
        u32::from_le_bytes(b)
    }
}

pub fn digest(domain: &[u8], payload: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((domain.len() as u64).to_le_bytes());
    h.update(domain);
    h.update(payload);
    h.finalize().into()
}

/// Statistically hiding, computationally binding commitment in the random
/// oracle model: a domain-tagged digest of the randomness and the canonical
/// payload.
pub fn com_commit(payload: &[u8], rho: &[u8; 32]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"fsgs:com:v1");
    h.update(rho);
    h.update((payload.len() as u64).to_le_bytes());
    h.update(payload);
    h.finalize().into()
}

/// Derive an n x ell matrix over Z_q from arbitrary bytes (the one-time key
/// in signing): uniform entries via rejection on 32-bit chunks.
pub fn derive_matrix(q: Modulus, n: usize, ell: usize, input: &[u8]) -> ZqMatrix {
    let mut s = XofStream::new(b"fsgs:h0:v1", input);
    let qq = q.get();
    let limit = (u32::MAX as u64 / qq) * qq;
    let mut m = ZqMatrix::zero(q, n, ell);
    for r in 0..n {
        for c in 0..ell {
            loop {
                let v = s.next_u32() as u64;
                if v < limit {
                    m.set(r, c, v % qq);
                    break;
                }
            }
        }
    }
    m
}

/// Challenge oracle: kappa trits in {1, 2, 3}, uniform via rejection on
/// bytes (accept below 252).
pub fn challenge_trits(context: &[u8], kappa: usize) -> Vec<u8> {
    let mut s = XofStream::new(b"fsgs:h1:v1", context);
    let mut out = Vec::with_capacity(kappa);
    while out.len() < kappa {
        let b = s.next_byte();
        if b < 252 {
            out.push(b % 3 + 1);
        }
    }
    out
}
