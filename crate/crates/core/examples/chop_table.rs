//! Literal and sparse chop tables.
//!
//! A literal table stores one answer bit per string of length at most `m`
//! in shortlex order. A sparse table stores `(hash, bit)` pairs for the
//! images of a chosen set of instances.

use compilance::base::{encode_unary, BinStr};
use compilance::schemes::{compile_chop_table, query_compiled, scheme_by_id, ChopMode, Payload};
use compilance::verify::{random_graphs, SEED};

fn main() -> compilance::Result<()> {
    let parity = scheme_by_id("parity.len.identity")?;
    for m in [4, 8, 12] {
        let a = compile_chop_table(&parity, &encode_unary(m), ChopMode::Literal)?;
        if let Payload::ChopLiteral { table, .. } = &a.payload {
            println!("parity m={m:<2} {} bits, {} bytes, crc {:08x}", table.bit_count(), table.byte_len(), a.checksum);
        }
    }

    let a = compile_chop_table(&parity, &encode_unary(6), ChopMode::Literal)?;
    for x in ["000000", "100000", "110111"] {
        let x = BinStr::parse(x)?;
        println!("  {x} -> {}", query_compiled(&a, &parity, &x)?);
    }

    // Sparse: only the graphs we expect to be asked about
    let ham = scheme_by_id("hampath.gamma.identity")?;
    let graphs = random_graphs(7, 200, SEED);
    let a = compile_chop_table(&ham, &encode_unary(7), ChopMode::Sparse(graphs.clone()))?;
    let mut yes = 0;
    for g in &graphs {
        yes += query_compiled(&a, &ham, g)? as usize;
    }
    if let Payload::ChopSparse { table, .. } = &a.payload {
        println!("hampath n=7 sparse table: {} entries, {yes}/200 graphs traceable", table.len());
    }
    Ok(())
}
