//! Saving and loading compiled artifacts in the `CPLC` container.

use compilance::base::{encode_unary, BinStr};
use compilance::cli::artifact;
use compilance::schemes::{compile_chop_table, query_compiled, scheme_by_id, ChopMode};

fn main() -> compilance::Result<()> {
    let w = scheme_by_id("parity.len.identity")?;
    let a = compile_chop_table(&w, &encode_unary(8), ChopMode::Literal)?;

    let dir = std::env::temp_dir().join(format!("compilance-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("parity8.cplc");
    artifact::save(&a, &path)?;
    let bytes = std::fs::read(&path)?;
    println!("{}: {} bytes, header {:?}", path.display(), bytes.len(), std::str::from_utf8(&bytes[..4]).unwrap());

    let b = artifact::load(&path)?;
    println!("reloaded artifact equal: {}", a == b);
    let x = BinStr::parse("10110001")?;
    println!("query {x}: {}", query_compiled(&b, &w, &x)?);

    let mut damaged = bytes.clone();
    damaged[20] ^= 1;
    println!("flipped bit: {}", artifact::from_bytes(&damaged).unwrap_err());

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
