//! Carry-propagating byte range coder with an adaptive order-1 model.
//!
//! Coder registers: 32-bit `range`, 64-bit `low` whose bit 32 carries into
//! the already-buffered output byte (cache + pending-0xFF run), normalizing
//! whenever `range` drops below 2^24 and flushing five bytes at the end.
//!
//! Model: one frequency table per context byte (the previous stream byte,
//! initially 0). Tables start uniform at 1, bump the coded symbol by 32, and
//! halve every count (keeping >= 1) once the total reaches 2^16. Cumulative
//! frequencies live in a Fenwick tree so encode and decode stay O(log 256)
//! per symbol. Encoder and decoder drive identical model updates, so the
//! range evolution — and therefore the byte counts consumed — match exactly.

use crate::error::{Error, Result};

const TOP: u32 = 1 << 24;
const SYMBOLS: usize = 256;
const INCREMENT: u32 = 32;
const RESCALE_LIMIT: u32 = 1 << 16;

/// Fenwick-tree frequency table over 256 symbols.
struct FreqTable {
    tree: [u32; SYMBOLS + 1],
    total: u32,
}

impl FreqTable {
    fn new() -> Self {
        // All-ones frequencies: each Fenwick node covers `i & -i` leaves.
        let mut tree = [0u32; SYMBOLS + 1];
        for (i, node) in tree.iter_mut().enumerate().skip(1) {
            *node = (i & i.wrapping_neg()) as u32;
        }
        Self { tree, total: SYMBOLS as u32 }
    }

    fn add(&mut self, symbol: usize, delta: u32) {
        self.total += delta;
        let mut i = symbol + 1;
        while i <= SYMBOLS {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of frequencies of symbols strictly below `symbol`.
    fn cumulative(&self, symbol: usize) -> u32 {
        let mut sum = 0;
        let mut i = symbol;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

    fn frequency(&self, symbol: usize) -> u32 {
        self.cumulative(symbol + 1) - self.cumulative(symbol)
    }

    /// Finds the symbol whose cumulative interval contains `target`,
    /// returning `(symbol, cum_below, freq)`.
    fn locate(&self, target: u32) -> (usize, u32, u32) {
        let mut pos = 0usize;
        let mut remaining = target;
        let mut step = SYMBOLS; // 256, a power of two
        while step > 0 {
            let next = pos + step;
            if next <= SYMBOLS && self.tree[next] <= remaining {
                remaining -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        let symbol = pos.min(SYMBOLS - 1);
        let cum = target - remaining;
        (symbol, cum, self.frequency(symbol))
    }

    fn bump(&mut self, symbol: usize) {
        self.add(symbol, INCREMENT);
        if self.total >= RESCALE_LIMIT {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        let mut freqs = [0u32; SYMBOLS];
        for (s, f) in freqs.iter_mut().enumerate() {
            *f = (self.frequency(s) + 1) >> 1;
        }
        self.tree = [0; SYMBOLS + 1];
        self.total = 0;
        for (s, &f) in freqs.iter().enumerate() {
            self.add(s, f.max(1));
        }
    }
}

struct Order1Model {
    contexts: Vec<FreqTable>,
    prev: u8,
}

impl Order1Model {
    fn new() -> Self {
        Self { contexts: (0..SYMBOLS).map(|_| FreqTable::new()).collect(), prev: 0 }
    }

    fn table(&mut self) -> &mut FreqTable {
        &mut self.contexts[self.prev as usize]
    }

    fn advance(&mut self, symbol: u8) {
        self.contexts[self.prev as usize].bump(symbol as usize);
        self.prev = symbol;
    }
}

struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl RangeEncoder {
    fn new() -> Self {
        Self { low: 0, range: u32::MAX, cache: 0, cache_size: 1, out: Vec::new() }
    }

    fn encode(&mut self, cum: u32, freq: u32, total: u32) {
        debug_assert!(freq > 0 && cum + freq <= total);
        let r = self.range / total;
        self.low += r as u64 * cum as u64;
        self.range = r * freq;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000 || self.low > 0xFFFF_FFFF {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low << 8) & 0xFFFF_FFFF;
    }

    fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

struct RangeDecoder<'a> {
    code: u32,
    range: u32,
    input: &'a [u8],
    pos: usize,
}

impl<'a> RangeDecoder<'a> {
    fn new(input: &'a [u8]) -> Result<Self> {
        let mut d = Self { code: 0, range: u32::MAX, input, pos: 0 };
        for _ in 0..5 {
            d.code = (d.code << 8) | d.next_byte()? as u32;
        }
        Ok(d)
    }

    fn next_byte(&mut self) -> Result<u8> {
        let b = self
            .input
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::CorruptEntropyStream("range stream exhausted".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn decode_symbol(&mut self, table: &FreqTable) -> Result<usize> {
        let r = self.range / table.total;
        let target = (self.code / r).min(table.total - 1);
        let (symbol, cum, freq) = table.locate(target);
        self.code -= r * cum;
        self.range = r * freq;
        while self.range < TOP {
            self.code = (self.code << 8) | self.next_byte()? as u32;
            self.range <<= 8;
        }
        Ok(symbol)
    }
}

/// Range-codes `data` with the adaptive order-1 model.
pub(crate) fn encode(data: &[u8]) -> Vec<u8> {
    let mut model = Order1Model::new();
    let mut enc = RangeEncoder::new();
    for &b in data {
        let table = model.table();
        let cum = table.cumulative(b as usize);
        let freq = table.frequency(b as usize);
        enc.encode(cum, freq, table.total);
        model.advance(b);
    }
    enc.finish()
}

/// Decodes exactly `count` bytes produced by [`encode`].
pub(crate) fn decode(data: &[u8], count: usize) -> Result<Vec<u8>> {
    let mut model = Order1Model::new();
    let mut dec = RangeDecoder::new(data)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let table = model.table();
        let symbol = dec.decode_symbol(table)?;
        model.advance(symbol as u8);
        out.push(symbol as u8);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fenwick_table_basics() {
        let mut t = FreqTable::new();
        assert_eq!(t.total, 256);
        assert_eq!(t.frequency(0), 1);
        assert_eq!(t.cumulative(256), 256);
        t.add(10, 5);
        assert_eq!(t.frequency(10), 6);
        assert_eq!(t.cumulative(11), 16);
        let (sym, cum, freq) = t.locate(10);
        assert_eq!((sym, cum, freq), (10, 10, 6));
        let (sym, cum, freq) = t.locate(15);
        assert_eq!((sym, cum, freq), (10, 10, 6));
        let (sym, _, _) = t.locate(16);
        assert_eq!(sym, 11);
    }

    #[test]
    fn rescale_keeps_every_symbol_reachable() {
        let mut t = FreqTable::new();
        for _ in 0..4000 {
            t.bump(7);
        }
        assert!(t.total < RESCALE_LIMIT + INCREMENT);
        for s in 0..SYMBOLS {
            assert!(t.frequency(s) >= 1, "symbol {s} starved");
        }
    }

    #[test]
    fn empty_roundtrip() {
        let encoded = encode(&[]);
        assert_eq!(decode(&encoded, 0).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn random_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let len = rng.random_range(0..8192);
            let data: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let encoded = encode(&data);
            assert_eq!(decode(&encoded, data.len()).unwrap(), data);
        }
    }

    #[test]
    fn skewed_input_compresses() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let data: Vec<u8> =
            (0..20_000).map(|_| if rng.random_bool(0.95) { 0u8 } else { rng.random() }).collect();
        let encoded = encode(&data);
        assert!(encoded.len() < data.len() / 4, "encoded {} bytes", encoded.len());
        assert_eq!(decode(&encoded, data.len()).unwrap(), data);
    }

    #[test]
    fn truncated_stream_is_detected() {
        let data = vec![7u8; 4096];
        let encoded = encode(&data);
        let cut = &encoded[..encoded.len() / 2];
        assert!(decode(cut, data.len()).is_err());
    }
}
