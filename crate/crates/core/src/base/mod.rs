//! Binary-string substrate: strings over {0,1}, unary numerals, the
//! self-delimiting pair encoding, polynomials over the naturals and the
//! parameterizations built on top of them.

mod param;
mod poly;

pub use param::{unary_range_encoded_len, ParamSet, Parameterization};
pub use poly::{eval_poly, PolyBound, PolyNat, MAGNITUDE_CAP, MAX_DEGREE};

use std::fmt;

use crate::error::{Error, Result};

/// A finite string over the alphabet {0,1}.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinStr(Vec<bool>);

impl BinStr {
    pub fn new() -> Self {
        BinStr(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        BinStr(Vec::with_capacity(n))
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BinStr(bits)
    }

    /// Parses a string of `0`/`1` characters; surrounding whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::malformed(format!("non-binary character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BinStr)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BinStr) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn push_ones(&mut self, n: usize) {
        self.0.resize(self.0.len() + n, true);
    }

    /// Appends `value` as a `width`-bit big-endian number.
    pub fn push_fixed(&mut self, value: u64, width: usize) {
        for i in (0..width).rev() {
            self.0.push((value >> i) & 1 == 1);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    pub fn slice(&self, start: usize, end: usize) -> BinStr {
        BinStr(self.0[start..end].to_vec())
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: &self.0, pos: 0 }
    }

    /// Flips the bit at `index`; out-of-range indices are ignored.
    pub fn flip(&mut self, index: usize) {
        if let Some(b) = self.0.get_mut(index) {
            *b = !*b;
        }
    }

    /// Packs the bits MSB-first into bytes; the final byte is zero-padded.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.0.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            if b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    pub fn from_packed(len: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Artifact(format!(
                "packed string of {len} bits needs {} bytes, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        Ok(BinStr(
            (0..len).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect(),
        ))
    }

    /// Position of this string in the length-then-lexicographic order of
    /// Σ*: "" ↦ 0, "0" ↦ 1, "1" ↦ 2, "00" ↦ 3, ...
    pub fn shortlex_index(&self) -> Option<u64> {
        if self.len() >= 63 {
            return None;
        }
        let base = (1u64 << self.len()) - 1;
        let value = self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Some(base + value)
    }

    /// Inverse of [`BinStr::shortlex_index`].
    pub fn from_shortlex_index(index: u64) -> BinStr {
        let len = (64 - (index + 1).leading_zeros() - 1) as usize;
        let value = index + 1 - (1u64 << len);
        let mut s = BinStr::with_capacity(len);
        s.push_fixed(value, len);
        s
    }
}

impl fmt::Display for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinStr(\"{self}\")")
    }
}

impl FromIterator<bool> for BinStr {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BinStr(iter.into_iter().collect())
    }
}

/// Sequential decoder over a bit slice.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn is_done(&self) -> bool {
        self.pos == self.bits.len()
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let b = self.bits.get(self.pos).copied();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    /// Reads `1^n 0` and returns `n`; `None` if no terminating zero exists.
    pub fn read_unary(&mut self) -> Option<usize> {
        let rest = &self.bits[self.pos..];
        let n = rest.iter().position(|&b| !b)?;
        self.pos += n + 1;
        Some(n)
    }

    pub fn read_fixed(&mut self, width: usize) -> Option<u64> {
        if self.remaining() < width {
            return None;
        }
        let v = self.bits[self.pos..self.pos + width]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64);
        self.pos += width;
        Some(v)
    }

    pub fn read_slice(&mut self, n: usize) -> Option<&'a [bool]> {
        if self.remaining() < n {
            return None;
        }
        let s = &self.bits[self.pos..self.pos + n];
        self.pos += n;
        Some(s)
    }

    pub fn rest(&mut self) -> &'a [bool] {
        let s = &self.bits[self.pos..];
        self.pos = self.bits.len();
        s
    }
}

/// Number of bits needed to write any index in `0..n` (zero when `n <= 1`).
pub fn index_width(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// The unary numeral `1^n`.
pub fn encode_unary(n: usize) -> BinStr {
    BinStr(vec![true; n])
}

pub fn decode_unary(s: &BinStr) -> Result<usize> {
    if s.is_all_ones() {
        Ok(s.len())
    } else {
        Err(Error::malformed(format!("{s} is not a unary numeral")))
    }
}

/// `1^|x| 0 x y`.
pub fn encode_pair(x: &BinStr, y: &BinStr) -> BinStr {
    let mut out = BinStr::with_capacity(2 * x.len() + 1 + y.len());
    out.push_ones(x.len());
    out.push(false);
    out.extend_from(x);
    out.extend_from(y);
    out
}

pub fn decode_pair(s: &BinStr) -> Result<(BinStr, BinStr)> {
    let (x, y) = split_pair(s)?;
    Ok((BinStr(x.to_vec()), BinStr(y.to_vec())))
}

/// [`decode_pair`] without copying the components.
pub fn split_pair(s: &BinStr) -> Result<(&[bool], &[bool])> {
    let mut r = s.reader();
    let n = r.read_unary().ok_or(Error::MalformedPair)?;
    let x = r.read_slice(n).ok_or(Error::MalformedPair)?;
    Ok((x, r.rest()))
}

/// Length of `encode_pair(x, y)` given the component lengths.
pub fn pair_len(x_len: usize, y_len: usize) -> usize {
    2 * x_len + 1 + y_len
}

/// Self-delimiting list: every item is written as `1^|item| 0 item`.
pub fn encode_seq<'a, I>(items: I) -> BinStr
where
    I: IntoIterator<Item = &'a BinStr>,
{
    let mut out = BinStr::new();
    for item in items {
        out.push_ones(item.len());
        out.push(false);
        out.extend_from(item);
    }
    out
}

/// Lazily walks the items of an [`encode_seq`] string.
pub fn seq_items(s: &BinStr) -> SeqItems<'_> {
    SeqItems { reader: s.reader() }
}

pub struct SeqItems<'a> {
    reader: BitReader<'a>,
}

impl<'a> Iterator for SeqItems<'a> {
    type Item = Result<&'a [bool]>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.reader.is_done() {
            return None;
        }
        let item = self
            .reader
            .read_unary()
            .and_then(|n| self.reader.read_slice(n))
            .ok_or(Error::MalformedPair);
        if item.is_err() {
            // poison: stop after reporting once
            self.reader.rest();
        }
        Some(item)
    }
}

pub fn decode_seq(s: &BinStr) -> Result<Vec<BinStr>> {
    seq_items(s)
        .map(|r| r.map(|b| BinStr(b.to_vec())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BinStr {
        BinStr::parse(s).unwrap()
    }

    fn all_strings(max_len: usize) -> Vec<BinStr> {
        (0..(1u64 << (max_len + 1)) - 1)
            .map(BinStr::from_shortlex_index)
            .collect()
    }

    #[test]
    fn unary_examples() {
        assert_eq!(encode_unary(0), BinStr::new());
        assert_eq!(encode_unary(3).to_string(), "111");
        assert_eq!(encode_unary(7).to_string(), "1111111");
        assert_eq!(decode_unary(&bs("1111")).unwrap(), 4);
        assert!(decode_unary(&bs("101")).is_err());
    }

    #[test]
    fn pair_examples() {
        assert_eq!(encode_pair(&bs("0"), &bs("1")).to_string(), "1001");
        assert_eq!(encode_pair(&bs(""), &bs("")).to_string(), "0");
        assert_eq!(
            decode_pair(&encode_pair(&bs("01"), &bs("1"))).unwrap(),
            (bs("01"), bs("1"))
        );
        // "110011": two-bit x = "01", y = "1"
        assert_eq!(decode_pair(&bs("110011")).unwrap(), (bs("01"), bs("1")));
    }

    #[test]
    fn malformed_pairs() {
        assert_eq!(decode_pair(&bs("")), Err(Error::MalformedPair));
        assert_eq!(decode_pair(&bs("111")), Err(Error::MalformedPair));
        assert_eq!(decode_pair(&bs("1101")), Err(Error::MalformedPair));
    }

    #[test]
    fn pair_round_trip_exhaustive() {
        let strings = all_strings(6);
        for x in &strings {
            for y in &strings {
                let e = encode_pair(x, y);
                assert_eq!(e.len(), pair_len(x.len(), y.len()));
                assert_eq!(decode_pair(&e).unwrap(), (x.clone(), y.clone()));
            }
        }
    }

    #[test]
    fn pair_injective_exhaustive() {
        // lengths ≤ 8: 511 strings per side, 261k pairs
        let strings = all_strings(8);
        let mut seen = std::collections::HashSet::new();
        for x in &strings {
            for y in &strings {
                assert!(seen.insert(encode_pair(x, y)), "collision at ({x}, {y})");
            }
        }
    }

    #[test]
    fn shortlex_order_is_bijective() {
        let strings = all_strings(5);
        for (i, s) in strings.iter().enumerate() {
            assert_eq!(s.shortlex_index(), Some(i as u64));
        }
        assert_eq!(strings[0], BinStr::new());
        assert_eq!(strings[3].to_string(), "00");
    }

    #[test]
    fn seq_round_trip() {
        let items = vec![bs(""), bs("0"), bs("1101"), bs("")];
        let enc = encode_seq(&items);
        assert_eq!(decode_seq(&enc).unwrap(), items);
        assert!(decode_seq(&bs("110")).is_err());
    }

    #[test]
    fn packing_round_trip() {
        for s in all_strings(10) {
            let p = s.to_packed();
            assert_eq!(BinStr::from_packed(s.len(), &p).unwrap(), s);
        }
    }

    #[test]
    fn widths() {
        assert_eq!(index_width(0), 0);
        assert_eq!(index_width(1), 0);
        assert_eq!(index_width(2), 1);
        assert_eq!(index_width(3), 2);
        assert_eq!(index_width(4), 2);
        assert_eq!(index_width(5), 3);
    }
}
