//! Permutations of `{0..n-1}` and the generator families used by the
//! benchmark corpus.
//!
//! A permutation doubles as an access sequence: `entries[i]` is the key at
//! input position `i`. Keys are 0-based.

use crate::error::CoreError;

/// A bijection on `{0..n-1}`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    entries: Vec<usize>,
}

impl Permutation {
    /// Validates that `entries` is a bijection on `{0..n-1}` with `n >= 1`.
    pub fn new(entries: Vec<usize>) -> Result<Self, CoreError> {
        if entries.is_empty() {
            return Err(CoreError::Empty);
        }
        let n = entries.len();
        let mut seen = vec![false; n];
        for (i, &v) in entries.iter().enumerate() {
            if v >= n {
                return Err(CoreError::OutOfRange {
                    line: i + 1,
                    value: v as i64,
                    n,
                });
            }
            if seen[v] {
                return Err(CoreError::DuplicateValue {
                    line: i + 1,
                    value: v,
                });
            }
            seen[v] = true;
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    /// Key at input position `i`.
    pub fn key_at(&self, i: usize) -> usize {
        self.entries[i]
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// The inverse bijection: `q[p[i]] = i`.
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.entries.len()];
        for (i, &v) in self.entries.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { entries: inv }
    }

    /// Parses the text permutation format: one decimal integer per line,
    /// values `0..n-1`, LF line endings, optional trailing blank line.
    /// 1-based input is not auto-detected. Errors carry 1-based line numbers.
    ///
    /// Validation is two-phase (tokens first, then range/duplicates) so that
    /// `n` is known when reporting range errors.
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        let mut raw: Vec<(usize, i64)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let tok = line.trim();
            if tok.is_empty() {
                continue;
            }
            let v: i64 = tok.parse().map_err(|_| CoreError::NonInteger {
                line: idx + 1,
                token: tok.to_string(),
            })?;
            raw.push((idx + 1, v));
        }
        if raw.is_empty() {
            return Err(CoreError::Empty);
        }
        let n = raw.len();
        let mut seen = vec![false; n];
        let mut entries = Vec::with_capacity(n);
        for &(line, v) in &raw {
            if v < 0 || v as usize >= n {
                return Err(CoreError::OutOfRange { line, value: v, n });
            }
            let v = v as usize;
            if seen[v] {
                return Err(CoreError::DuplicateValue { line, value: v });
            }
            seen[v] = true;
            entries.push(v);
        }
        Ok(Self { entries })
    }

    /// Inverse of [`Permutation::parse`]: one integer per line, trailing LF.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for &v in &self.entries {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

/// Identity permutation `[0, 1, .., n-1]`.
pub fn gen_sorted(n: usize) -> Result<Permutation, CoreError> {
    if n == 0 {
        return Err(CoreError::Empty);
    }
    Ok(Permutation {
        entries: (0..n).collect(),
    })
}

/// Reversal `[n-1, .., 1, 0]`.
pub fn gen_reversed(n: usize) -> Result<Permutation, CoreError> {
    if n == 0 {
        return Err(CoreError::Empty);
    }
    Ok(Permutation {
        entries: (0..n).rev().collect(),
    })
}

/// Uniform random permutation from a deterministic seeded generator.
///
/// Uses a Fisher-Yates shuffle driven by [`SplitMix64`]; both are fixed
/// algorithms, so a given `(n, seed)` yields the same permutation on every
/// platform and build.
pub fn gen_random(n: usize, seed: u64) -> Result<Permutation, CoreError> {
    if n == 0 {
        return Err(CoreError::Empty);
    }
    let mut rng = SplitMix64::new(seed);
    let mut entries: Vec<usize> = (0..n).collect();
    // Fisher-Yates, high-to-low, index drawn as next_u64 % (i+1).
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        entries.swap(i, j);
    }
    Ok(Permutation { entries })
}

/// Bit-reversal permutation: entry `i` is `i` with its `k` bits reversed,
/// `n = 2^k`.
pub fn gen_bit_reversal(n: usize) -> Result<Permutation, CoreError> {
    if n == 0 {
        return Err(CoreError::Empty);
    }
    if !n.is_power_of_two() {
        return Err(CoreError::NotPowerOfTwo(n));
    }
    let k = n.trailing_zeros();
    let entries = (0..n)
        .map(|i| {
            if k == 0 {
                0
            } else {
                i.reverse_bits() >> (usize::BITS - k)
            }
        })
        .collect();
    Ok(Permutation { entries })
}

/// Splits the sorted list into `n / block_size` contiguous blocks and
/// reorders the blocks by the bit-reversal permutation, preserving order
/// within each block. Requires `block_size` to divide `n` and the block
/// count to be a power of two.
pub fn gen_block_bit_reversal(n: usize, block_size: usize) -> Result<Permutation, CoreError> {
    if n == 0 || block_size == 0 {
        return Err(CoreError::Empty);
    }
    if !n.is_multiple_of(block_size) {
        return Err(CoreError::BlockDoesNotDivide {
            block: block_size,
            n,
        });
    }
    let count = n / block_size;
    if !count.is_power_of_two() {
        return Err(CoreError::BlockCountNotPowerOfTwo { count });
    }
    let block_order = gen_bit_reversal(count)?;
    let mut entries = Vec::with_capacity(n);
    for b in 0..count {
        let src = block_order.key_at(b);
        for j in 0..block_size {
            entries.push(src * block_size + j);
        }
    }
    Ok(Permutation { entries })
}

/// Default block size for [`gen_block_bit_reversal`]: `floor(lg n)`,
/// decreased until it divides `n` and leaves a power-of-two block count.
pub fn default_block_size(n: usize) -> usize {
    let mut b = usize::max(1, n.ilog2() as usize);
    while b > 1 {
        if n.is_multiple_of(b) && (n / b).is_power_of_two() {
            return b;
        }
        b -= 1;
    }
    1
}

/// SplitMix64 (Steele, Lea, Vigna): a fixed 64-bit mixing generator.
/// Chosen for the corpus generators because its output is specified exactly
/// and has no platform- or version-dependent behavior.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..bound` via modulo; bias is negligible for the
    /// small bounds used here and keeps the recipe one line.
    pub fn next_below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }
}
