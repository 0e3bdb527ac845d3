//! The `CPLC` artifact container.
//!
//! ```text
//! "CPLC" | version u8 = 1
//! problem_id | parameterization_id | scheme_id      u32 length + UTF-8
//! param_value                                      u32 bit length + packed bits
//! declared_poly                                    u32 count + u64 coefficients
//! payload_kind u8 | payload                        u32 length + bytes
//! CRC-32 of everything above                       u32
//! ```
//!
//! Integers are little-endian.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::base::{BinStr, PolyNat};
use crate::error::{Error, Result};
use crate::schemes::{CompiledArtifact, Payload, PayloadKind};

pub const MAGIC: &[u8; 4] = b"CPLC";
pub const VERSION: u8 = 1;

fn put_u32(out: &mut Vec<u8>, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Artifact("field longer than 2^32".into()))?;
    out.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

fn put_bytes(out: &mut Vec<u8>, b: &[u8]) -> Result<()> {
    put_u32(out, b.len())?;
    out.extend_from_slice(b);
    Ok(())
}

pub fn to_bytes(a: &CompiledArtifact) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    for s in [&a.problem_id, &a.parameterization_id, &a.scheme_id] {
        put_bytes(&mut out, s.as_bytes())?;
    }
    put_u32(&mut out, a.param_value.len())?;
    out.extend_from_slice(&a.param_value.to_packed());
    let coeffs = a.declared_poly.coeffs();
    put_u32(&mut out, coeffs.len())?;
    for c in coeffs {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out.push(a.payload.kind() as u8);
    put_bytes(&mut out, &a.payload.to_bytes())?;
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .at
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Artifact("truncated file".into()))?;
        let s = &self.buf[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Artifact("identifier is not UTF-8".into()))
    }
}

pub fn from_bytes(buf: &[u8]) -> Result<CompiledArtifact> {
    if buf.len() < MAGIC.len() + 1 + 4 || &buf[..4] != MAGIC {
        return Err(Error::Artifact("not a CPLC file".into()));
    }
    let (body, crc) = buf.split_at(buf.len() - 4);
    if crc32fast::hash(body) != u32::from_le_bytes(crc.try_into().unwrap()) {
        return Err(Error::Artifact("CRC mismatch".into()));
    }
    let mut c = Cursor { buf: body, at: 4 };
    let version = c.u8()?;
    if version != VERSION {
        return Err(Error::Artifact(format!("version {version}, expected {VERSION}")));
    }
    let problem_id = c.string()?;
    let parameterization_id = c.string()?;
    let scheme_id = c.string()?;
    let bits = c.u32()?;
    let param_value = BinStr::from_packed(bits, c.take(bits.div_ceil(8))?)?;
    let count = c.u32()?;
    let coeffs = (0..count).map(|_| c.u64()).collect::<Result<Vec<_>>>()?;
    let declared_poly = PolyNat::new(coeffs)?;
    let kind = PayloadKind::from_byte(c.u8()?)?;
    let n = c.u32()?;
    let raw = c.take(n)?;
    let payload = Payload::from_bytes(kind, raw)?;
    if c.at != body.len() {
        return Err(Error::Artifact("trailing bytes before the CRC".into()));
    }
    Ok(CompiledArtifact {
        problem_id,
        parameterization_id,
        scheme_id,
        param_value,
        checksum: crc32fast::hash(raw),
        payload,
        declared_poly,
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

/// Writes under an exclusive advisory lock on `<path>.lock`, through a
/// temporary file renamed into place.
pub fn save(a: &CompiledArtifact, path: &Path) -> Result<()> {
    let bytes = to_bytes(a)?;
    let lock = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(sibling(path, ".lock"))?;
    lock.try_lock()
        .map_err(|_| Error::Io(format!("{} is being written by another process", path.display())))?;
    let tmp = sibling(path, &format!(".tmp{}", std::process::id()));
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    drop(lock);
    result
}

pub fn load(path: &Path) -> Result<CompiledArtifact> {
    from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::encode_unary;
    use crate::schemes::{compile_chop_table, scheme_by_id, ChopMode};

    fn parity_artifact() -> CompiledArtifact {
        let w = scheme_by_id("parity.len.identity").unwrap();
        compile_chop_table(&w, &encode_unary(3), ChopMode::Literal).unwrap()
    }

    #[test]
    fn round_trip() {
        let a = parity_artifact();
        let bytes = to_bytes(&a).unwrap();
        assert_eq!(&bytes[..5], b"CPLC\x01");
        let b = from_bytes(&bytes).unwrap();
        assert_eq!(a, b);
        assert_eq!(to_bytes(&b).unwrap(), bytes);
    }

    #[test]
    fn corruption_is_detected() {
        let mut bytes = to_bytes(&parity_artifact()).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 1;
        assert!(matches!(from_bytes(&bytes), Err(Error::Artifact(_))));
    }

    #[test]
    fn version_mismatch_is_fatal() {
        let mut bytes = to_bytes(&parity_artifact()).unwrap();
        bytes[4] = 2;
        let n = bytes.len() - 4;
        let crc = crc32fast::hash(&bytes[..n]);
        bytes[n..].copy_from_slice(&crc.to_le_bytes());
        let e = from_bytes(&bytes).unwrap_err();
        assert!(e.to_string().contains("version 2"), "{e}");
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("parity.cplc");
        let a = parity_artifact();
        save(&a, &path).unwrap();
        assert_eq!(load(&path).unwrap(), a);
        assert_eq!(fs::read(&path).unwrap(), to_bytes(&a).unwrap());
    }
}
