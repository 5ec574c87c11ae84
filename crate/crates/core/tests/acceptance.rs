//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1 and 2 compare against published tables that contain three rows the verifier
//! disproves with an explicit singular pattern. Those rows are listed in `KNOWN_MISPRINTS`;
//! their criteria still print FAIL, but the process only exits nonzero when something else
//! fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pmds::codec::CodeInstance;
use pmds::construction::{build_parity_check, CodeParams, ErasurePattern, Position, Variant};
use pmds::error::CodecError;
use pmds::poly::{primes_up_to, BinPoly};
use pmds::reliability::{matches_printed, parse_printed, table5, ReliabilityParams, DEFAULT_GRID, INCONSISTENT_CELLS, COLUMNS, PUBLISHED};
use pmds::ring::{Ring, RingElement};
use pmds::tables::{run_preset, Preset, TableRow};
use pmds::verifier::{
    check_fast, count_patterns, enumerate_profiles, moore_determinant, moore_matrix, oracle_is_correcting, oracle_is_pmds,
    pattern_is_correctable, reduce_profile_odd,
};

/// Published rows whose printed verdict is contradicted by a singular erasure pattern.
const KNOWN_MISPRINTS: [(Preset, &str, usize, usize); 3] =
    [(Preset::Table2, "mp:127", 11, 11), (Preset::Table2, "mp:127", 13, 9), (Preset::Table4, "mp:23", 4, 5)];

/// Table 5 cells are compared at the printed precision: within one unit of the last digit.
const RELIABILITY_RUNTIME_LIMIT_SECS: f64 = 1.0;
const CROSS_VALIDATION_RUNTIME_LIMIT_SECS: f64 = 600.0;

struct Outcome {
    pass: bool,
    /// A failure made up entirely of `KNOWN_MISPRINTS` rows.
    known: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, known: false, detail }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn is_known(preset: Preset, row: &TableRow) -> bool {
    KNOWN_MISPRINTS.iter().any(|&(p, modulus, m, n)| p == preset && row.entry.modulus == modulus && row.entry.m == m && row.entry.n == n)
}

fn describe(row: &TableRow) -> String {
    format!(
        "{} {}/{} computed {} published {} witness {}",
        row.entry.modulus,
        row.entry.m,
        row.entry.n,
        if row.verdict.is_pmds { "YES" } else { "NO" },
        match row.entry.published_pmds {
            Some(true) => "YES",
            Some(false) => "NO",
            None => "-",
        },
        row.verdict.witness.as_ref().map(|w| w.to_string()).unwrap_or_else(|| "none".into())
    )
}

/// Mismatching rows, and whether all of them are known misprints.
fn compare(preset: Preset, rows: &[TableRow]) -> (Vec<String>, bool) {
    let bad: Vec<&TableRow> = rows.iter().filter(|r| !r.matches()).collect();
    let all_known = bad.iter().all(|r| is_known(preset, r));
    (bad.iter().map(|r| format!("{preset}: {}", describe(r))).collect(), all_known)
}

fn verdict_of(rows: &[TableRow], modulus: &str, m: usize, n: usize) -> Option<bool> {
    rows.iter().find(|r| r.entry.modulus == modulus && r.entry.m == m && r.entry.n == n).map(|r| r.verdict.is_pmds)
}

fn criterion_1(table2: &[TableRow]) -> Outcome {
    let (bad, all_known) = compare(Preset::Table2, table2);
    let asym = [verdict_of(table2, "mp:89", 8, 11), verdict_of(table2, "mp:89", 9, 9), verdict_of(table2, "mp:89", 11, 8)];
    let asym_ok = asym == [Some(false), Some(false), Some(true)];
    let mut detail = format!(
        "{} of {} rows match; p=89 8/11 NO, 9/9 NO, 11/8 YES: {}",
        table2.len() - bad.len(),
        table2.len(),
        if asym_ok { "reproduced" } else { "not reproduced" }
    );
    for b in &bad {
        detail += &format!("\n      mismatch {b}");
    }
    let pass = bad.is_empty() && asym_ok;
    Outcome { pass, known: !pass && asym_ok && all_known, detail }
}

fn criterion_2(table3: &[TableRow], table4: &[TableRow]) -> Outcome {
    let (mut bad, known3) = compare(Preset::Table3, table3);
    let (bad4, known4) = compare(Preset::Table4, table4);
    bad.extend(bad4);
    let highlights = [
        verdict_of(table3, "mp:17", 4, 4) == Some(false),
        verdict_of(table3, "mp:89", 11, 8) == Some(false),
        verdict_of(table4, "mp:23", 3, 7) == Some(false),
        verdict_of(table4, "mp:41", 5, 8) == Some(false),
        [(10, 11), (11, 10), (12, 9)].iter().all(|&(m, n)| verdict_of(table4, "mp:113", m, n) == Some(false)),
    ];
    let highlights_ok = highlights.iter().all(|&b| b);
    let mut detail = format!(
        "table3 {}/{} and table4 {}/{} rows match; highlighted divergences (17/4/4, 89/11/8, 23/3/7, 41/5/8, 113 x3): {}",
        table3.iter().filter(|r| r.matches()).count(),
        table3.len(),
        table4.iter().filter(|r| r.matches()).count(),
        table4.len(),
        if highlights_ok { "reproduced" } else { "not reproduced" }
    );
    for b in &bad {
        detail += &format!("\n      mismatch {b}");
    }
    let pass = bad.is_empty() && highlights_ok;
    Outcome { pass, known: !pass && highlights_ok && known3 && known4, detail }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (mut instances, mut disagreements, mut patterns) = (0usize, Vec::new(), 0u128);
    for p in primes_up_to(47).into_iter().filter(|&p| p >= 3) {
        let ring = Ring::all_ones(p).unwrap();
        for variant in [Variant::Squared, Variant::Consecutive] {
            for s in 1..=3 {
                for m in 1..p as usize {
                    for n in 2..p as usize {
                        if m * n >= p as usize {
                            break;
                        }
                        let Ok(params) = CodeParams::new(m, n, 1, s, variant, ring.clone()) else { continue };
                        patterns += enumerate_profiles(s, m).iter().map(|pr| count_patterns(&params, pr)).sum::<u128>();
                        let fast = check_fast(&params).map(|v| v.is_pmds);
                        let oracle = oracle_is_pmds(&params).map(|v| v.is_pmds);
                        instances += 1;
                        if fast.is_err() || oracle.is_err() || fast != oracle {
                            disagreements.push(format!("{params}: fast {fast:?} oracle {oracle:?}"));
                        }
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut detail = format!("{instances} instances, {patterns} oracle patterns, {} disagreements, {secs:.1}s", disagreements.len());
    for d in disagreements.iter().take(10) {
        detail += &format!("\n      {d}");
    }
    Outcome::new(disagreements.is_empty() && secs < CROSS_VALIDATION_RUNTIME_LIMIT_SECS, detail)
}

fn criterion_4() -> Outcome {
    let (mut count, mut bad) = (0, Vec::new());
    for p in [19u64, 29, 37] {
        let ring = Ring::all_ones(p).unwrap();
        for m in 1..p as usize {
            for n in 2..p as usize {
                if m * n >= p as usize {
                    break;
                }
                let Ok(params) = CodeParams::new(m, n, 1, 2, Variant::Squared, ring.clone()) else { continue };
                count += 1;
                let fast = check_fast(&params).map(|v| v.is_pmds);
                let oracle = oracle_is_pmds(&params).map(|v| v.is_pmds);
                if fast != Ok(true) || oracle != Ok(true) {
                    bad.push(format!("{params}: fast {fast:?} oracle {oracle:?}"));
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{count} instances over p = 19, 29, 37, {} not PMDS by some path {:?}", bad.len(), bad))
}

fn random_symbol(rng: &mut ChaCha8Rng, ring: &Ring) -> BinPoly {
    let bits = ring.degree();
    let mut v = BinPoly::zero();
    for k in 0..bits {
        if rng.gen::<bool>() {
            v.set_coeff(k, true);
        }
    }
    ring.reduce(&v)
}

/// A pattern with one PMDS profile: `s_j + r` erasures in each of `t` rows.
fn random_profile_pattern(rng: &mut ChaCha8Rng, params: &CodeParams) -> ErasurePattern {
    let profiles: Vec<_> = enumerate_profiles(params.s(), params.m())
        .into_iter()
        .filter(|p| p.parts().iter().all(|&s| s + params.r() <= params.n()))
        .collect();
    let profile = &profiles[rng.gen_range(0..profiles.len())];
    let rows = sample(rng, params.m(), profile.rows()).into_vec();
    let mut positions = Vec::new();
    for (row, &part) in rows.iter().zip(profile.parts()) {
        for col in sample(rng, params.n(), part + params.r()) {
            positions.push(Position::new(*row, col));
        }
    }
    ErasurePattern::for_params(positions, params).unwrap()
}

fn criterion_5() -> Outcome {
    let params = CodeParams::new(5, 5, 1, 2, Variant::Squared, Ring::parse("435").unwrap()).unwrap();
    let fast = check_fast(&params).map(|v| v.is_pmds);
    let oracle = oracle_is_pmds(&params).map(|v| v.is_pmds);
    let inst = CodeInstance::new(&params).unwrap();
    let mut r = rng(5);
    let (mut ok, mut failures) = (0usize, Vec::new());
    for _ in 0..100 {
        let data: Vec<BinPoly> = (0..params.data_len()).map(|_| random_symbol(&mut r, params.ring())).collect();
        let word = inst.encode_polys(&data).unwrap();
        for _ in 0..100 {
            let pattern = random_profile_pattern(&mut r, &params);
            match inst.decode_erasures(&word.erased(&pattern), &pattern) {
                Ok(w) if w == word => ok += 1,
                other => failures.push(format!("{pattern}: {:?}", other.map(|_| "wrong word"))),
            }
        }
    }
    let pass = fast == Ok(true) && oracle == Ok(true) && failures.is_empty();
    Outcome::new(
        pass,
        format!(
            "GF(2^8) f=435 5x5: fast {fast:?}, oracle {oracle:?}; {ok}/10000 roundtrips exact{}",
            failures.first().map(|f| format!(", first failure {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let rows = table5(&DEFAULT_GRID, &ReliabilityParams::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (mut checked, mut bad) = (0, Vec::new());
    for (q, line) in PUBLISHED.iter().enumerate() {
        for (g, cell) in line.iter().enumerate() {
            if INCONSISTENT_CELLS.contains(&(q, g)) {
                continue;
            }
            let (printed, digits) = parse_printed(cell);
            let computed = rows[g].values()[q + 1];
            checked += 1;
            if !matches_printed(computed, printed, digits) {
                bad.push(format!("{}@{}: computed {computed:.3e}, printed {cell}", COLUMNS[q + 1], DEFAULT_GRID[g]));
            }
        }
    }
    // each skipped cell contradicts other printed cells
    let cell = |q: usize, g: usize| parse_printed(PUBLISHED[q][g]).0;
    let skipped_inconsistent = [
        cell(1, 3) < cell(0, 3),            // P_H below P
        cell(3, 8) * 10.0 < cell(5, 8),     // EC = S13 + S21 with S13 two orders smaller
        cell(3, 0) > cell(5, 0),            // S21 above EC
        cell(4, 4) == cell(4, 5) && cell(4, 3) < cell(4, 4) * 1e-6,
    ];
    let quoted = matches_printed(rows[6].P_DL_111EC, 7.8e-5, 2) && matches_printed(rows[7].P_DL_12PMDS, 6.3e-6, 2);
    let pass = bad.is_empty() && quoted && skipped_inconsistent.iter().all(|&b| b) && secs < RELIABILITY_RUNTIME_LIMIT_SECS;
    let skipped: Vec<String> = INCONSISTENT_CELLS.iter().map(|&(q, g)| format!("{}@{}", COLUMNS[q + 1], DEFAULT_GRID[g])).collect();
    Outcome::new(
        pass,
        format!(
            "{checked} cells within one unit of the printed last digit, {} off; P_DL_111EC(.0007) = {:.2e}, P_DL_12PMDS(.0008) = {:.2e}; skipped as self-contradictory: {}; {:.3}s{}",
            bad.len(),
            rows[6].P_DL_111EC,
            rows[7].P_DL_12PMDS,
            skipped.join(", "),
            secs,
            if bad.is_empty() { String::new() } else { format!("\n      {}", bad.join("\n      ")) }
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut bad = 0;
    let mut total = 0;
    for modulus in ["435", "mp:17"] {
        let ring = Ring::parse(modulus).unwrap();
        for _ in 0..1000 {
            let size = r.gen_range(1..=5);
            let first: Vec<RingElement> = (0..size).map(|_| ring.elem(&random_symbol(&mut r, &ring))).collect();
            let direct = moore_matrix(&first).unwrap().determinant().unwrap();
            let product = moore_determinant(&first).unwrap();
            total += 1;
            if direct != product {
                bad += 1;
            }
        }
    }
    Outcome::new(bad == 0, format!("{total} random first rows over GF(2^8) and mod M_17, {bad} mismatches"))
}

fn criterion_8() -> Outcome {
    let primes = [31u64, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73];
    let mut r = rng(8);
    let (mut instances, mut comparisons, mut negatives, mut bad) = (0, 0, 0, Vec::new());
    while instances < 200 {
        let p = primes[r.gen_range(0..primes.len())];
        let m = r.gen_range(1..=15);
        let n = r.gen_range(2..=(30 / m).max(2));
        let s = r.gen_range(2..=4);
        if m * n > 30 {
            continue;
        }
        let Ok(params) = CodeParams::new(m, n, 1, s, Variant::Squared, Ring::all_ones(p).unwrap()) else { continue };
        instances += 1;
        for profile in enumerate_profiles(s, m) {
            if profile.is_odd() || count_patterns(&params, &profile) == 0 {
                continue;
            }
            let reduced = reduce_profile_odd(&profile);
            let Ok(smaller) = params.with_global_parities(reduced.sum()) else {
                bad.push(format!("{params} {profile}: reduced code invalid"));
                continue;
            };
            let a = oracle_is_correcting(&params, &profile).map(|v| v.is_pmds);
            let b = oracle_is_correcting(&smaller, &reduced).map(|v| v.is_pmds);
            comparisons += 1;
            if a == Ok(false) {
                negatives += 1;
            }
            if a.is_err() || a != b {
                bad.push(format!("{params} {profile} -> {reduced}: {a:?} vs {b:?}"));
            }
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!(
            "{instances} instances (c0, mn <= 30), {comparisons} even-part profiles, {negatives} not correctable, {} disagreements{}",
            bad.len(),
            bad.first().map(|b| format!(", first {b}")).unwrap_or_default()
        ),
    )
}

fn criterion_9() -> Outcome {
    let moduli = ["mp:17", "mp:23", "mp:31", "mp:41", "mp:73", "mp:127", "435", "567", "1021", "1231"];
    let mut r = rng(9);
    let (mut done, mut bad) = (0, Vec::new());
    while done < 20 {
        let ring = Ring::parse(moduli[r.gen_range(0..moduli.len())]).unwrap();
        let m = r.gen_range(1..=8);
        let n = r.gen_range(2..=10);
        let (Ok(a), Ok(b)) = (
            CodeParams::new(m, n, 1, 2, Variant::Squared, ring.clone()),
            CodeParams::new(m, n, 1, 2, Variant::Consecutive, ring.clone()),
        ) else {
            continue;
        };
        done += 1;
        if build_parity_check(&a) != build_parity_check(&b) {
            bad.push(format!("{m}x{n} {ring}"));
        }
    }
    Outcome::new(bad.is_empty(), format!("{done} random (m, n, modulus), {} differ {:?}", bad.len(), bad))
}

fn criterion_10(table2: &[TableRow]) -> Outcome {
    let mut r = rng(10);
    let (mut negatives, mut recovered, mut bad) = (0, 0, Vec::new());
    for row in table2.iter().filter(|row| !row.verdict.is_pmds) {
        let params = pmds::tables::entry_params(Preset::Table2, &row.entry).unwrap();
        let inst = match CodeInstance::new(&params) {
            Ok(i) => i,
            Err(e) => {
                bad.push(format!("{params}: no encoder ({e})"));
                continue;
            }
        };
        let data: Vec<BinPoly> = (0..params.data_len()).map(|_| random_symbol(&mut r, params.ring())).collect();
        let word = inst.encode_polys(&data).unwrap();
        let witness = row.verdict.witness.clone().expect("negative verdict has a witness");
        match inst.decode_erasures(&word.erased(&witness), &witness) {
            Err(CodecError::NotCorrectable) => negatives += 1,
            other => bad.push(format!("{params} witness {witness}: {:?}", other.map(|_| "decoded"))),
        }
        let mut found = 0;
        for _ in 0..200 {
            if found == 5 {
                break;
            }
            let pattern = random_profile_pattern(&mut r, &params);
            if !pattern_is_correctable(&params, &pattern) {
                continue;
            }
            found += 1;
            match inst.decode_erasures(&word.erased(&pattern), &pattern) {
                Ok(w) if w == word => recovered += 1,
                other => bad.push(format!("{params} {pattern}: {:?}", other.map(|_| "wrong word"))),
            }
        }
    }
    Outcome::new(
        bad.is_empty() && negatives > 0,
        format!(
            "{negatives} witnesses rejected as not correctable, {recovered} oracle-correctable patterns recovered exactly, {} failures{}",
            bad.len(),
            bad.first().map(|b| format!(", first {b}")).unwrap_or_default()
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let timed = |f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (o, t.elapsed().as_secs_f64())
    };

    let t = Instant::now();
    let table2 = run_preset(Preset::Table2).expect("table2 runs");
    let t2 = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let table3 = run_preset(Preset::Table3).expect("table3 runs");
    let table4 = run_preset(Preset::Table4).expect("table4 runs");
    let t34 = t.elapsed().as_secs_f64();

    results.push((1, "table 2 reproduction", criterion_1(&table2), t2));
    results.push((2, "tables 3 and 4 reproduction", criterion_2(&table3, &table4), t34));
    let (o, s) = timed(&mut criterion_3);
    results.push((3, "oracle vs fast check, p <= 47", o, s));
    let (o, s) = timed(&mut criterion_4);
    results.push((4, "2 primitive, s = 2", o, s));
    let (o, s) = timed(&mut criterion_5);
    results.push((5, "GF(2^8) instance and roundtrips", o, s));
    let (o, s) = timed(&mut criterion_6);
    results.push((6, "reliability table", o, s));
    let (o, s) = timed(&mut criterion_7);
    results.push((7, "Moore determinant", o, s));
    let (o, s) = timed(&mut criterion_8);
    results.push((8, "even-part profile reduction", o, s));
    let (o, s) = timed(&mut criterion_9);
    results.push((9, "c0 = c1 at s = 2", o, s));
    let (o, s) = timed(&mut || criterion_10(&table2));
    results.push((10, "decoder negative path", o, s));

    let mut unexpected = 0;
    for (id, name, o, secs) in &results {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && o.known { " (published-table misprints only, see README)" } else { "" };
        println!("criterion {id:>2} {status} {name}{note} [{secs:.1}s]\n      {}", o.detail);
        if !o.pass && !o.known {
            unexpected += 1;
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("acceptance: {passed}/{} PASS, {unexpected} unexpected failures", results.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
