//! LZ77 tokenization with a 32 KiB sliding window.
//!
//! Match search uses zlib-style hash chains over 3-byte prefixes with a
//! bounded chain walk, so compression is deterministic and close to linear
//! time. Tokens serialize to a flat byte stream that the range coder
//! consumes:
//!
//! ```text
//! 0x00 <byte>                          literal
//! 0x01 <len-3> <dist-1 lo> <dist-1 hi> match, len in 3..=258, dist in 1..=32768
//! ```

use crate::error::{Error, Result};

pub(crate) const WINDOW_SIZE: usize = 32 * 1024;
pub(crate) const MIN_MATCH: usize = 3;
pub(crate) const MAX_MATCH: usize = 258;

const HASH_BITS: u32 = 15;
const HASH_SIZE: usize = 1 << HASH_BITS;
const MAX_CHAIN: usize = 64;
const NO_POS: usize = usize::MAX;

const TOKEN_LITERAL: u8 = 0x00;
const TOKEN_MATCH: u8 = 0x01;

#[inline]
fn hash3(data: &[u8], i: usize) -> usize {
    let h = (data[i] as u32) | ((data[i + 1] as u32) << 8) | ((data[i + 2] as u32) << 16);
    (h.wrapping_mul(0x9E37_79B1) >> (32 - HASH_BITS)) as usize
}

/// Tokenizes `input`, returning the serialized token stream.
pub(crate) fn compress(input: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(input.len() / 2 + 16);
    if input.is_empty() {
        return out;
    }
    let mut head = vec![NO_POS; HASH_SIZE];
    let mut prev = vec![NO_POS; input.len()];
    let insert = |head: &mut Vec<usize>, prev: &mut Vec<usize>, i: usize| {
        if i + MIN_MATCH <= input.len() {
            let h = hash3(input, i);
            prev[i] = head[h];
            head[h] = i;
        }
    };

    let mut pos = 0;
    while pos < input.len() {
        let mut best_len = 0usize;
        let mut best_dist = 0usize;
        if pos + MIN_MATCH <= input.len() {
            let limit = (input.len() - pos).min(MAX_MATCH);
            let mut candidate = head[hash3(input, pos)];
            let mut chain = 0;
            while candidate != NO_POS && pos - candidate <= WINDOW_SIZE && chain < MAX_CHAIN {
                let mut len = 0;
                while len < limit && input[candidate + len] == input[pos + len] {
                    len += 1;
                }
                if len > best_len {
                    best_len = len;
                    best_dist = pos - candidate;
                    if len == limit {
                        break;
                    }
                }
                candidate = prev[candidate];
                chain += 1;
            }
        }
        if best_len >= MIN_MATCH {
            out.push(TOKEN_MATCH);
            out.push((best_len - MIN_MATCH) as u8);
            let d = (best_dist - 1) as u16;
            out.extend_from_slice(&d.to_le_bytes());
            for i in pos..pos + best_len {
                insert(&mut head, &mut prev, i);
            }
            pos += best_len;
        } else {
            out.push(TOKEN_LITERAL);
            out.push(input[pos]);
            insert(&mut head, &mut prev, pos);
            pos += 1;
        }
    }
    out
}

/// Replays a serialized token stream back into the original bytes.
pub(crate) fn decompress(tokens: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut pos = 0;
    while pos < tokens.len() {
        match tokens[pos] {
            TOKEN_LITERAL => {
                let Some(&b) = tokens.get(pos + 1) else {
                    return Err(Error::CorruptEntropyStream("truncated literal token".into()));
                };
                out.push(b);
                pos += 2;
            }
            TOKEN_MATCH => {
                if pos + 4 > tokens.len() {
                    return Err(Error::CorruptEntropyStream("truncated match token".into()));
                }
                let len = tokens[pos + 1] as usize + MIN_MATCH;
                let dist = u16::from_le_bytes([tokens[pos + 2], tokens[pos + 3]]) as usize + 1;
                if dist > out.len() {
                    return Err(Error::CorruptEntropyStream(format!(
                        "match distance {dist} exceeds output length {}",
                        out.len()
                    )));
                }
                let start = out.len() - dist;
                for i in 0..len {
                    let b = out[start + i];
                    out.push(b);
                }
                pos += 4;
            }
            other => {
                return Err(Error::CorruptEntropyStream(format!("unknown token flag {other:#x}")));
            }
        }
    }
    Ok(out)
}
