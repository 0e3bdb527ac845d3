use rayon::prelude::*;

use super::{CompilationScheme, SchemeKind};
use crate::base::{BinStr, PolyNat};
use crate::error::{Error, Result};
use crate::problems::{Language, Meter};

/// Largest magnitude for which a literal table over `Σ^{≤m}` is built.
pub const LITERAL_CAP: usize = 22;
/// Oracle step budget for deciding a single table string.
pub const PER_STRING_STEPS: u64 = 1_000_000;

/// Membership bits of every string of length at most `magnitude`, in
/// length-then-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChopTable {
    pub magnitude: usize,
    bits: Vec<u8>,
}

impl ChopTable {
    pub fn bit_count(&self) -> u64 {
        (1u64 << (self.magnitude + 1)) - 1
    }

    pub fn get(&self, x: &BinStr) -> Option<bool> {
        if x.len() > self.magnitude {
            return None;
        }
        let i = x.shortlex_index()? as usize;
        Some(self.bits[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    /// Bytes actually stored for the table.
    pub fn byte_len(&self) -> usize {
        self.bits.len()
    }

    pub fn ones(&self) -> u64 {
        self.bits.iter().map(|b| b.count_ones() as u64).sum()
    }
}

/// `(hash(x′), bit)` pairs sorted by hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTable {
    pub magnitude: usize,
    entries: Vec<(u64, bool)>,
}

impl SparseTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, x: &BinStr) -> Option<bool> {
        let h = fnv1a(x);
        self.entries
            .binary_search_by_key(&h, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// 64-bit FNV-1a over the bit length followed by the packed bits.
pub fn fnv1a(x: &BinStr) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let len = (x.len() as u64).to_le_bytes();
    for b in len.iter().chain(x.to_packed().iter()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    ChopLiteral = 0,
    ChopSparse = 1,
    KernelCache = 2,
    Normalizer = 3,
}

impl PayloadKind {
    pub fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            0 => PayloadKind::ChopLiteral,
            1 => PayloadKind::ChopSparse,
            2 => PayloadKind::KernelCache,
            3 => PayloadKind::Normalizer,
            _ => return Err(Error::Artifact(format!("unknown payload kind {b}"))),
        })
    }
}

/// The compiled value for one parameter: the offline result `c(k)` and,
/// except for normalized schemes, a membership table over online outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    ChopLiteral { table: ChopTable, offline: BinStr },
    ChopSparse { table: SparseTable, offline: BinStr },
    KernelCache { table: SparseTable, offline: BinStr },
    Normalizer { offline: BinStr },
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::ChopLiteral { .. } => PayloadKind::ChopLiteral,
            Payload::ChopSparse { .. } => PayloadKind::ChopSparse,
            Payload::KernelCache { .. } => PayloadKind::KernelCache,
            Payload::Normalizer { .. } => PayloadKind::Normalizer,
        }
    }

    pub fn offline(&self) -> &BinStr {
        match self {
            Payload::ChopLiteral { offline, .. }
            | Payload::ChopSparse { offline, .. }
            | Payload::KernelCache { offline, .. }
            | Payload::Normalizer { offline } => offline,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            Payload::ChopLiteral { table, offline } => {
                put_u32(&mut out, table.magnitude as u32);
                put_bits(&mut out, offline);
                out.extend_from_slice(&table.bits);
            }
            Payload::ChopSparse { table, offline } | Payload::KernelCache { table, offline } => {
                put_u32(&mut out, table.magnitude as u32);
                put_bits(&mut out, offline);
                put_u32(&mut out, table.entries.len() as u32);
                for &(h, b) in &table.entries {
                    out.extend_from_slice(&h.to_le_bytes());
                    out.push(b as u8);
                }
            }
            Payload::Normalizer { offline } => put_bits(&mut out, offline),
        }
        out
    }

    pub fn from_bytes(kind: PayloadKind, bytes: &[u8]) -> Result<Payload> {
        let mut r = ByteReader { bytes, pos: 0 };
        let payload = match kind {
            PayloadKind::ChopLiteral => {
                let magnitude = r.u32()? as usize;
                if magnitude > LITERAL_CAP {
                    return Err(Error::Artifact(format!("literal magnitude {magnitude}")));
                }
                let offline = r.bits()?;
                let nbits = (1usize << (magnitude + 1)) - 1;
                let bits = r.take(nbits.div_ceil(8))?.to_vec();
                Payload::ChopLiteral {
                    table: ChopTable { magnitude, bits },
                    offline,
                }
            }
            PayloadKind::ChopSparse | PayloadKind::KernelCache => {
                let magnitude = r.u32()? as usize;
                let offline = r.bits()?;
                let n = r.u32()? as usize;
                let mut entries = Vec::with_capacity(n.min(1 << 24));
                for _ in 0..n {
                    let h = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
                    let b = match r.take(1)?[0] {
                        0 => false,
                        1 => true,
                        v => return Err(Error::Artifact(format!("table bit {v}"))),
                    };
                    entries.push((h, b));
                }
                if !entries.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(Error::Artifact("sparse table not strictly sorted".into()));
                }
                let table = SparseTable { magnitude, entries };
                if kind == PayloadKind::ChopSparse {
                    Payload::ChopSparse { table, offline }
                } else {
                    Payload::KernelCache { table, offline }
                }
            }
            PayloadKind::Normalizer => Payload::Normalizer { offline: r.bits()? },
        };
        if r.pos != bytes.len() {
            return Err(Error::Artifact("trailing payload bytes".into()));
        }
        Ok(payload)
    }
}

pub(crate) fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_bits(out: &mut Vec<u8>, s: &BinStr) {
    put_u32(out, s.len() as u32);
    out.extend_from_slice(&s.to_packed());
}

pub(crate) struct ByteReader<'a> {
    pub bytes: &'a [u8],
    pub pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Artifact("truncated".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn bits(&mut self) -> Result<BinStr> {
        let len = self.u32()? as usize;
        BinStr::from_packed(len, self.take(len.div_ceil(8))?)
    }
}

/// Persistable result of compiling one parameter value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledArtifact {
    pub problem_id: String,
    pub parameterization_id: String,
    pub scheme_id: String,
    pub param_value: BinStr,
    pub payload: Payload,
    pub declared_poly: PolyNat,
    /// CRC-32 of the payload bytes.
    pub checksum: u32,
}

impl CompiledArtifact {
    pub fn new(
        scheme: &CompilationScheme,
        param_value: BinStr,
        payload: Payload,
        declared_poly: PolyNat,
    ) -> Self {
        let checksum = crc32fast::hash(&payload.to_bytes());
        CompiledArtifact {
            problem_id: scheme.problem.id().to_string(),
            parameterization_id: scheme.param().id().to_string(),
            scheme_id: scheme.id.clone(),
            param_value,
            payload,
            declared_poly,
            checksum,
        }
    }

    pub fn checksum_ok(&self) -> bool {
        crc32fast::hash(&self.payload.to_bytes()) == self.checksum
    }
}

#[derive(Debug, Clone)]
pub enum ChopMode {
    /// Every string of length at most the chopped bound.
    Literal,
    /// Only the online images of the given source instances, all of which
    /// must carry the compiled parameter value.
    Sparse(Vec<BinStr>),
}

fn decide_bit(target: &dyn Language, y: &BinStr) -> Result<bool> {
    let mut meter = Meter::new(PER_STRING_STEPS);
    match target.decide_metered(y, &mut meter) {
        Err(Error::MalformedInstance(_)) | Err(Error::MalformedPair) => Ok(false),
        other => other,
    }
}

/// Builds the table `c⁺(k) = (table, c(k), k)` for a chopped scheme.
pub fn compile_chop_table(
    scheme: &CompilationScheme,
    k: &BinStr,
    mode: ChopMode,
) -> Result<CompiledArtifact> {
    let bound = scheme.chopped_bound().ok_or_else(|| {
        Error::SchemePrecondition(scheme.id.clone(), "no chopped claim".into())
    })?;
    let magnitude = bound.eval(k.len() as u64)? as usize;
    let declared = bound.expand()?;
    if let ChopMode::Literal = mode {
        if magnitude > LITERAL_CAP {
            return Err(Error::scale(format!(
                "literal table of magnitude {magnitude} exceeds the cap of {LITERAL_CAP}"
            )));
        }
    }
    let offline = scheme.map.offline(k)?;
    let target = scheme.target.as_ref();
    let payload = match mode {
        ChopMode::Literal => {
            let count = (1u64 << (magnitude + 1)) - 1;
            let bytes: Vec<u8> = (0..count.div_ceil(8))
                .into_par_iter()
                .map(|byte| {
                    let mut v = 0u8;
                    for bit in 0..8 {
                        let i = byte * 8 + bit;
                        if i < count && decide_bit(target, &BinStr::from_shortlex_index(i))? {
                            v |= 0x80 >> bit;
                        }
                    }
                    Ok(v)
                })
                .collect::<Result<_>>()?;
            Payload::ChopLiteral {
                table: ChopTable { magnitude, bits: bytes },
                offline,
            }
        }
        ChopMode::Sparse(universe) => {
            let param = scheme.param();
            let online = scheme.map.prepare(&offline)?;
            let mut keys: Vec<(u64, BinStr)> = universe
                .par_iter()
                .map(|x| {
                    let got = param.apply(x)?;
                    if &got != k {
                        return Err(Error::ParamMismatch {
                            expected: k.to_string(),
                            got: got.to_string(),
                        });
                    }
                    let y = online(x)?;
                    if y.len() > magnitude {
                        return Err(Error::OutOfTable {
                            len: y.len(),
                            magnitude,
                        });
                    }
                    Ok((fnv1a(&y), y))
                })
                .collect::<Result<_>>()?;
            keys.par_sort_unstable();
            keys.dedup();
            if keys.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::HashCollision);
            }
            let entries: Vec<(u64, bool)> = keys
                .par_iter()
                .map(|(h, y)| Ok((*h, decide_bit(target, y)?)))
                .collect::<Result<_>>()?;
            let table = SparseTable { magnitude, entries };
            if scheme.kind == SchemeKind::Kernel {
                Payload::KernelCache { table, offline }
            } else {
                Payload::ChopSparse { table, offline }
            }
        }
    };
    Ok(CompiledArtifact::new(scheme, k.clone(), payload, declared))
}

/// Stores `c(k)` for a normalized scheme; queries read the first output bit.
pub fn compile_normalized(scheme: &CompilationScheme, k: &BinStr) -> Result<CompiledArtifact> {
    if scheme.kind != SchemeKind::Normalized {
        return Err(Error::SchemePrecondition(scheme.id.clone(), "not a normalized scheme".into()));
    }
    let offline = scheme.map.offline(k)?;
    Ok(CompiledArtifact::new(
        scheme,
        k.clone(),
        Payload::Normalizer { offline },
        PolyNat::constant(1),
    ))
}

/// Answers `x ∈ Q` from a compiled artifact: `x′ = f(c(k), x)` and a table
/// lookup. Neither the offline compiler nor the target decider is called.
pub fn query_compiled(
    artifact: &CompiledArtifact,
    scheme: &CompilationScheme,
    x: &BinStr,
) -> Result<bool> {
    if artifact.scheme_id != scheme.id {
        return Err(Error::Artifact(format!(
            "artifact built by scheme {}, queried with {}",
            artifact.scheme_id, scheme.id
        )));
    }
    let k = scheme.param().apply(x)?;
    if k != artifact.param_value {
        return Err(Error::ParamMismatch {
            expected: artifact.param_value.to_string(),
            got: k.to_string(),
        });
    }
    let y = scheme.map.online(artifact.payload.offline(), x)?;
    match &artifact.payload {
        Payload::ChopLiteral { table, .. } => table.get(&y).ok_or(Error::OutOfTable {
            len: y.len(),
            magnitude: table.magnitude,
        }),
        Payload::ChopSparse { table, .. } | Payload::KernelCache { table, .. } => {
            match table.lookup(&y) {
                Some(b) => Ok(b),
                None if y.len() <= table.magnitude && !scheme.target.validate(&y) => Ok(false),
                None => Err(Error::OutOfTable {
                    len: y.len(),
                    magnitude: table.magnitude,
                }),
            }
        }
        Payload::Normalizer { .. } => Ok(y.bits().first() == Some(&true)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::scheme_by_id;
    use super::*;
    use crate::base::encode_unary;
    use crate::problems::{all_strings, Budget, ThreeSat};

    #[test]
    fn literal_table_sizes() {
        let s = scheme_by_id("parity.len.identity").unwrap();
        for m in 0..6 {
            let a = compile_chop_table(&s, &encode_unary(m), ChopMode::Literal).unwrap();
            let Payload::ChopLiteral { table, .. } = &a.payload else { panic!() };
            assert_eq!(table.bit_count(), (1 << (m + 1)) - 1);
            // exactly half of all nonempty strings of each length have odd parity
            assert_eq!(table.ones(), ((1u64 << (m + 1)) - 2) / 2);
        }
    }

    #[test]
    fn parity_artifact_queries() {
        let s = scheme_by_id("parity.len.identity").unwrap();
        let a = compile_chop_table(&s, &encode_unary(4), ChopMode::Literal).unwrap();
        let calls = s.map.offline_calls();
        let b = |t| BinStr::parse(t).unwrap();
        assert!(query_compiled(&a, &s, &b("1011")).unwrap());
        assert!(!query_compiled(&a, &s, &b("0000")).unwrap());
        assert!(matches!(
            query_compiled(&a, &s, &b("")),
            Err(Error::ParamMismatch { .. })
        ));
        assert_eq!(s.map.offline_calls(), calls);
    }

    #[test]
    fn literal_cap() {
        let s = scheme_by_id("parity.len.identity").unwrap();
        assert!(matches!(
            compile_chop_table(&s, &encode_unary(30), ChopMode::Literal),
            Err(Error::ScaleExceeded(_))
        ));
    }

    #[test]
    fn sparse_3sat_small() {
        let s = scheme_by_id("3sat.nu.dedup").unwrap();
        let universe: Vec<BinStr> = ThreeSat
            .enumerate(&Budget::exactly(1))
            .unwrap()
            .collect();
        let a = compile_chop_table(&s, &encode_unary(1), ChopMode::Sparse(universe.clone())).unwrap();
        for x in &universe {
            assert_eq!(query_compiled(&a, &s, x).unwrap(), ThreeSat.decide(x).unwrap());
        }
        assert!(a.checksum_ok());
        let back = Payload::from_bytes(a.payload.kind(), &a.payload.to_bytes()).unwrap();
        assert_eq!(back, a.payload);
    }

    #[test]
    fn sparse_rejects_foreign_parameters() {
        let s = scheme_by_id("parity.len.identity").unwrap();
        let universe: Vec<BinStr> = all_strings(0, 3).collect();
        assert!(matches!(
            compile_chop_table(&s, &encode_unary(3), ChopMode::Sparse(universe)),
            Err(Error::ParamMismatch { .. })
        ));
    }

    #[test]
    fn hash_is_length_sensitive() {
        assert_ne!(fnv1a(&BinStr::parse("0").unwrap()), fnv1a(&BinStr::parse("00").unwrap()));
        assert_ne!(fnv1a(&BinStr::new()), fnv1a(&BinStr::parse("0").unwrap()));
    }
}
