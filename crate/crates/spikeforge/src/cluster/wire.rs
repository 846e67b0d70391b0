//! Byte encoding of spike sets crossing the worker boundary: a sequence of
//! `step u32, count u32, ids u32 * count`, little-endian, steps ascending and
//! ids ascending within a step.

use spikeforge_core::{NeuronId, Step};

pub type SpikeSets = Vec<(Step, Vec<NeuronId>)>;

pub fn encode(sets: &[(Step, Vec<NeuronId>)]) -> Vec<u8> {
    let words: usize = sets.iter().map(|(_, ids)| 2 + ids.len()).sum();
    let mut out = Vec::with_capacity(words * 4);
    for (t, ids) in sets {
        out.extend_from_slice(&t.to_le_bytes());
        out.extend_from_slice(&(ids.len() as u32).to_le_bytes());
        for id in ids {
            out.extend_from_slice(&id.to_le_bytes());
        }
    }
    out
}

fn word(bytes: &[u8], i: usize) -> u32 {
    u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap())
}

/// Panics on malformed input; buffers only ever come from [`encode`].
pub fn decode(bytes: &[u8]) -> SpikeSets {
    assert!(bytes.len() % 4 == 0, "truncated spike buffer");
    let words = bytes.len() / 4;
    let mut sets = Vec::new();
    let mut i = 0;
    while i < words {
        let t = word(bytes, i);
        let n = word(bytes, i + 1) as usize;
        assert!(i + 2 + n <= words, "truncated spike buffer");
        sets.push((t, (0..n).map(|k| word(bytes, i + 2 + k)).collect()));
        i += 2 + n;
    }
    sets
}

/// Total number of ids in an encoded buffer, read from the headers only.
pub fn count(bytes: &[u8]) -> u64 {
    let mut i = 0;
    let mut total = 0;
    while i * 4 < bytes.len() {
        let n = word(bytes, i + 1) as u64;
        total += n;
        i += 2 + n as usize;
    }
    total
}

fn union_ids(a: &[NeuronId], b: &[NeuronId]) -> Vec<NeuronId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorted-merge union of two spike sets.
pub fn union(a: SpikeSets, b: SpikeSets) -> SpikeSets {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) if x.0 < y.0 => a.next(),
            (Some(x), Some(y)) if x.0 > y.0 => b.next(),
            (Some(_), Some(_)) => {
                let (t, x) = a.next().unwrap();
                let (_, y) = b.next().unwrap();
                Some((t, union_ids(&x, &y)))
            }
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => break,
        };
        out.extend(next);
    }
    out
}

/// Merges the encoded buffer `src` into `dst`.
pub fn merge_into(dst: &mut Vec<u8>, src: &[u8]) {
    if src.is_empty() {
        return;
    }
    if dst.is_empty() {
        dst.extend_from_slice(src);
        return;
    }
    *dst = encode(&union(decode(dst), decode(src)));
}
