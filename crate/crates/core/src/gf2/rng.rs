use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BitMatrix, BitVec};
use crate::error::{Error, Result};

/// Seeded, portable random stream.
///
/// Wraps ChaCha8 so that `(seed, stream, counter)` fully determines the next
/// draw on every platform. `counter` counts 64-bit words drawn so far; every
/// draw goes through [`RngState::next_word`], so the counter maps exactly onto
/// the ChaCha word position and [`RngState::at`] can resume any stream.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    stream: u64,
    counter: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::at(seed, 0, 0)
    }

    /// Positions a stream at an arbitrary draw count.
    pub fn at(seed: u64, stream: u64, counter: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        inner.set_word_pos(u128::from(counter) * 2);
        Self {
            seed,
            stream,
            counter,
            inner,
        }
    }

    /// An independent stream derived from this state's seed.
    ///
    /// Forks depend only on `(seed, id)`, never on how far the parent has
    /// advanced, so per-trial and per-server streams are reproducible no
    /// matter the order they are consumed in.
    pub fn fork(&self, id: u64) -> Self {
        let stream = self
            .stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(id.wrapping_add(1));
        Self::at(self.seed, stream, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_word(&mut self) -> u64 {
        self.counter += 1;
        self.inner.next_u64()
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_word() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A Bernoulli(`p`) draw; `p = 0` never fires and `p = 1` always does.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_unit() < p
    }

    /// Uniform index in `[0, bound)`, rejection-sampled to avoid modulo bias.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let w = self.next_word();
            if w < zone {
                return (w % bound) as usize;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.next_word() as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next_word()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let w = self.next_word().to_le_bytes();
            chunk.copy_from_slice(&w[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

/// A vector with every bit drawn independently and uniformly.
pub fn random_bitvec(rng: &mut RngState, len: usize) -> Result<BitVec> {
    if len == 0 {
        return Err(Error::EmptyVector);
    }
    let words = (0..len.div_ceil(64)).map(|_| rng.next_word()).collect();
    Ok(BitVec::from_words(len, words))
}

/// A uniformly random `rows x cols` matrix.
pub fn random_matrix(rng: &mut RngState, rows: usize, cols: usize) -> BitMatrix {
    let data = (0..rows)
        .map(|_| {
            let words = (0..cols.div_ceil(64)).map(|_| rng.next_word()).collect();
            BitVec::from_words(cols, words)
        })
        .collect();
    BitMatrix::from_rows(cols, data)
}
