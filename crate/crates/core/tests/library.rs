use proptest::prelude::*;

use pmds::codec::{CodeInstance, DecodeStrategy};
use pmds::construction::{CodeParams, ErasurePattern, Position, Variant};
use pmds::error::CodecError;
use pmds::poly::BinPoly;
use pmds::ring::Ring;
use pmds::tables::{run_preset, Preset};
use pmds::verifier::{check_fast, oracle_is_pmds, pattern_is_correctable};

fn params(m: usize, n: usize, r: usize, s: usize, v: Variant, modulus: &str) -> CodeParams {
    CodeParams::new(m, n, r, s, v, Ring::parse(modulus).unwrap()).unwrap()
}

#[test]
fn irreducible_table_reproduced() {
    let rows = run_preset(Preset::Table1).unwrap();
    assert_eq!(rows.len(), 32);
    for r in &rows {
        assert!(r.matches() && r.verdict.is_pmds, "{:?}", r.entry);
    }
}

#[test]
fn witnesses_are_uncorrectable() {
    for (m, n, s, v, modulus) in [
        (5, 6, 2, Variant::Squared, "mp:31"),
        (4, 4, 3, Variant::Squared, "mp:17"),
        (3, 7, 3, Variant::Consecutive, "mp:23"),
        (3, 4, 2, Variant::RowColumn, "mp:13"),
    ] {
        let p = params(m, n, 1, s, v, modulus);
        for verdict in [check_fast(&p).unwrap(), oracle_is_pmds(&p).unwrap()] {
            assert!(!verdict.is_pmds, "{p}");
            let w = verdict.witness.unwrap();
            let profile = verdict.failing_profile.unwrap();
            assert_eq!(w.len(), profile.sum() + profile.rows());
            assert!(!pattern_is_correctable(&p, &w), "{p} {w}");
        }
    }
}

#[test]
fn non_pmds_code_still_decodes_its_good_patterns() {
    let p = params(5, 6, 1, 2, Variant::Squared, "mp:31");
    let inst = CodeInstance::new(&p).unwrap();
    let data: Vec<BinPoly> = (0..p.data_len() as u64).map(|i| BinPoly::from_u64(i * 12345 % (1 << 30))).collect();
    let word = inst.encode_polys(&data).unwrap();
    let witness = oracle_is_pmds(&p).unwrap().witness.unwrap();
    assert_eq!(inst.decode_erasures(&word.erased(&witness), &witness), Err(CodecError::NotCorrectable));
    let good = ErasurePattern::for_params(vec![Position::new(0, 0), Position::new(0, 1), Position::new(0, 2), Position::new(3, 5)], &p).unwrap();
    assert!(pattern_is_correctable(&p, &good));
    assert_eq!(inst.decode_erasures(&word.erased(&good), &good).unwrap(), word);
}

fn code_strategy() -> impl Strategy<Value = CodeParams> {
    prop_oneof![
        Just(params(4, 4, 1, 2, Variant::Squared, "mp:17")),
        Just(params(3, 5, 2, 1, Variant::Consecutive, "mp:17")),
        Just(params(3, 7, 1, 2, Variant::Consecutive, "mp:23")),
        Just(params(5, 5, 1, 2, Variant::Squared, "435")),
        Just(params(4, 4, 1, 3, Variant::Squared, "435")),
        Just(params(3, 2, 1, 1, Variant::RowColumn, "mp:5")),
        Just(params(4, 5, 2, 2, Variant::Consecutive, "mp:37")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    /// Whatever the oracle calls correctable, both decoding strategies recover exactly.
    #[test]
    fn roundtrip_matches_oracle(p in code_strategy(), seed in any::<u64>(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..8)) {
        let inst = CodeInstance::new(&p).unwrap();
        let bits = p.ring().degree();
        let data: Vec<BinPoly> = (0..p.data_len() as u64)
            .map(|i| p.ring().reduce(&BinPoly::from_u64(seed.rotate_left(i as u32 * 7) & ((1u64 << bits.min(63)) - 1))))
            .collect();
        let word = inst.encode_polys(&data).unwrap();
        prop_assert!(inst.is_codeword(&word));
        prop_assert_eq!(inst.extract_data(&word), data);
        let mut cells: Vec<Position> = picks.iter().map(|ix| {
            let k = ix.index(p.cells());
            Position::new(k / p.n(), k % p.n())
        }).collect();
        cells.sort();
        cells.dedup();
        let pattern = ErasurePattern::for_params(cells, &p).unwrap();
        let damaged = word.erased(&pattern);
        let ok = pattern_is_correctable(&p, &pattern);
        for strategy in [DecodeStrategy::Auto, DecodeStrategy::Generic] {
            match inst.decode_with(&damaged, &pattern, strategy) {
                Ok(w) => {
                    prop_assert!(ok, "decoded an uncorrectable pattern {}", pattern);
                    prop_assert_eq!(&w, &word);
                }
                Err(CodecError::NotCorrectable) => prop_assert!(!ok, "gave up on correctable {}", pattern),
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }
}
