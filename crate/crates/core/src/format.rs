//! Binary codeword files.
//!
//! A file is one ASCII header line
//! `PMDS1 m=<m> n=<n> r=<r> s=<s> variant=<c0|c1|c2> modulus=<mp:p|octal>\n`
//! followed by the `m*n` symbols in row-major order, each `b` bits wide (`b` = degree
//! of the modulus), packed least significant bit first. The last byte is zero-padded.

use crate::codec::ArrayCodeword;
use crate::construction::{CodeParams, Variant};
use crate::error::CodecError;
use crate::poly::BinPoly;
use crate::ring::Ring;

const MAGIC: &str = "PMDS1";

pub fn packed_len(count: usize, bits: usize) -> usize {
    (count * bits).div_ceil(8)
}

pub fn pack_symbols(symbols: &[BinPoly], bits: usize) -> Vec<u8> {
    let mut out = vec![0u8; packed_len(symbols.len(), bits)];
    for (idx, s) in symbols.iter().enumerate() {
        for e in s.exponents() {
            assert!(e < bits, "symbol wider than {bits} bits");
            let t = idx * bits + e;
            out[t / 8] |= 1 << (t % 8);
        }
    }
    out
}

pub fn unpack_symbols(bytes: &[u8], count: usize, bits: usize) -> Result<Vec<BinPoly>, CodecError> {
    let need = packed_len(count, bits);
    if bytes.len() != need {
        return Err(CodecError::SizeMismatch(format!("expected {need} bytes for {count} symbols of {bits} bits, got {}", bytes.len())));
    }
    Ok((0..count)
        .map(|idx| BinPoly::from_exponents((0..bits).filter(|&k| {
            let t = idx * bits + k;
            bytes[t / 8] >> (t % 8) & 1 == 1
        })))
        .collect())
}

pub fn header(params: &CodeParams) -> String {
    format!(
        "{MAGIC} m={} n={} r={} s={} variant={} modulus={}\n",
        params.m(),
        params.n(),
        params.r(),
        params.s(),
        params.variant(),
        params.ring()
    )
}

pub fn parse_header(line: &str) -> Result<CodeParams, CodecError> {
    let bad = |msg: &str| CodecError::Format(msg.to_string());
    let mut parts = line.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(bad("missing PMDS1 magic"));
    }
    let (mut m, mut n, mut r, mut s, mut variant, mut modulus) = (None, None, None, None, None, None);
    for kv in parts {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad("header fields must be key=value"))?;
        let num = || v.parse::<usize>().map_err(|_| CodecError::Format(format!("bad number in {kv}")));
        match k {
            "m" => m = Some(num()?),
            "n" => n = Some(num()?),
            "r" => r = Some(num()?),
            "s" => s = Some(num()?),
            "variant" => variant = Some(v.parse::<Variant>()?),
            "modulus" => modulus = Some(Ring::parse(v)?),
            _ => return Err(CodecError::Format(format!("unknown header field {k}"))),
        }
    }
    let missing = |f: &str| CodecError::Format(format!("header lacks {f}"));
    Ok(CodeParams::new(
        m.ok_or_else(|| missing("m"))?,
        n.ok_or_else(|| missing("n"))?,
        r.ok_or_else(|| missing("r"))?,
        s.ok_or_else(|| missing("s"))?,
        variant.ok_or_else(|| missing("variant"))?,
        modulus.ok_or_else(|| missing("modulus"))?,
    )?)
}

pub fn write_codeword(w: &ArrayCodeword) -> Vec<u8> {
    let mut out = header(w.params()).into_bytes();
    out.extend(pack_symbols(w.cells(), w.params().ring().degree()));
    out
}

pub fn read_codeword(bytes: &[u8]) -> Result<ArrayCodeword, CodecError> {
    let nl = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| CodecError::Format("no header line".into()))?;
    let line = std::str::from_utf8(&bytes[..nl]).map_err(|_| CodecError::Format("header is not ASCII".into()))?;
    let params = parse_header(line)?;
    let cells = unpack_symbols(&bytes[nl + 1..], params.cells(), params.ring().degree())?;
    ArrayCodeword::from_cells(&params, cells)
}
