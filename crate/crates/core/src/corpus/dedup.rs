//! Exact line deduplication keyed on 128-bit digests. Only digests are
//! retained, never the lines; a digest collision silently drops a line.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};

use dashmap::DashSet;
use xxhash_rust::xxh3::xxh3_128;

pub fn digest(line: &str) -> u128 {
    xxh3_128(line.as_bytes())
}

/// The digests are already uniformly distributed; hash them by truncation.
#[derive(Default)]
pub struct DigestHasher(u64);

impl Hasher for DigestHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            self.0 ^= u64::from_le_bytes(buf);
        }
    }

    fn write_u128(&mut self, v: u128) {
        self.0 = v as u64;
    }
}

type DigestBuild = BuildHasherDefault<DigestHasher>;

/// Single-threaded digest set.
#[derive(Default)]
pub struct LineDeduper {
    seen: HashSet<u128, DigestBuild>,
}

impl LineDeduper {
    pub fn new() -> Self {
        Self::default()
    }

    /// True the first time `line` is seen.
    pub fn insert(&mut self, line: &str) -> bool {
        self.seen.insert(digest(line))
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Digest set shared across threads. `insert` is an atomic
/// insert-if-absent, so concurrent inserts of one line admit exactly one.
#[derive(Default)]
pub struct SharedDeduper {
    seen: DashSet<u128, DigestBuild>,
}

impl SharedDeduper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&self, line: &str) -> bool {
        self.seen.insert(digest(line))
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Keep the first occurrence of each distinct line, in input order.
pub fn dedup_lines<I, S>(lines: I) -> impl Iterator<Item = S>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut seen = LineDeduper::new();
    lines.into_iter().filter(move |l| seen.insert(l.as_ref()))
}
