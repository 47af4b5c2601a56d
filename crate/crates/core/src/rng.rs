//! Seedable random streams.
//!
//! Every random draw in the engine (phase bits of a computational preparation,
//! measurement disturbance, random oracle specs) goes through an [`RngStream`].
//! A stream is addressed by a `(seed, stream)` pair and backed by ChaCha8, a
//! counter-based generator, so distinct stream ids give independent sequences
//! and trials can run in any order.
//!
//! For checking that an algorithm does not depend on its random draws a stream
//! can also be a constant source that yields only zeros or only ones.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gf2::BitVec;

#[derive(Clone, Debug)]
enum Source {
    ChaCha(Box<ChaCha8Rng>),
    Constant(bool),
}

/// A reproducible source of random bits.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    source: Source,
    buffer: u64,
    available: u32,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            seed,
            stream,
            source: Source::ChaCha(Box::new(rng)),
            buffer: 0,
            available: 0,
        }
    }

    /// A degenerate source whose every bit is `bit`.
    ///
    /// Only bit-level draws are meaningful on a constant source; rejection
    /// samplers built on top of it (e.g. `gen_range`) may never terminate.
    pub fn constant(bit: bool) -> Self {
        Self {
            seed: 0,
            stream: 0,
            source: Source::Constant(bit),
            buffer: 0,
            available: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.source, Source::Constant(_))
    }

    /// One uniform bit.
    #[inline]
    pub fn bit(&mut self) -> bool {
        if let Source::Constant(b) = self.source {
            return b;
        }
        if self.available == 0 {
            self.buffer = self.next_u64();
            self.available = 64;
        }
        let b = self.buffer & 1 == 1;
        self.buffer >>= 1;
        self.available -= 1;
        b
    }

    /// A vector of `len` uniform bits, filled a word at a time.
    pub fn bits(&mut self, len: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        for w in v.words_mut() {
            *w = self.next_u64();
        }
        v.clear_tail();
        v
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        match &mut self.source {
            Source::ChaCha(rng) => rng.next_u32(),
            Source::Constant(b) => {
                if *b {
                    u32::MAX
                } else {
                    0
                }
            }
        }
    }

    fn next_u64(&mut self) -> u64 {
        match &mut self.source {
            Source::ChaCha(rng) => rng.next_u64(),
            Source::Constant(b) => {
                if *b {
                    u64::MAX
                } else {
                    0
                }
            }
        }
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        match &mut self.source {
            Source::ChaCha(rng) => rng.fill_bytes(dest),
            Source::Constant(b) => dest.fill(if *b { 0xff } else { 0 }),
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_stream_reproduce() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        for _ in 0..200 {
            assert_eq!(a.bit(), b.bit());
        }
        assert_eq!(a.bits(300), b.bits(300));
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::new(7, 0);
        let mut b = RngStream::new(7, 1);
        assert_ne!(a.bits(256), b.bits(256));
    }

    #[test]
    fn constant_sources() {
        let mut zero = RngStream::constant(false);
        let mut one = RngStream::constant(true);
        assert!(zero.bits(130).is_zero());
        assert_eq!(one.bits(130).count_ones(), 130);
        assert!(!zero.bit());
        assert!(one.bit());
    }

    #[test]
    fn bit_stream_is_balanced() {
        let mut rng = RngStream::new(11, 0);
        let ones = (0..100_000).filter(|_| rng.bit()).count();
        // 5 sigma = 5 * sqrt(100000 / 4) ~ 790
        assert!((ones as i64 - 50_000).abs() < 790, "{ones}");
    }
}
