use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pmds::format::{pack_symbols, read_codeword};
use pmds::poly::BinPoly;

fn pmds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmds")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const C0_17: [&str; 10] = ["--variant", "c0", "--m", "4", "--n", "4", "--r", "1", "--s", "2"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn check_pmds_yes() {
    let o = pmds(&with(&["check"], &with(&C0_17, &["--modulus", "mp:17"])));
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("PMDS: yes"));
}

#[test]
fn check_pmds_no_with_witness() {
    let o = pmds(&["check", "--variant", "c0", "--m", "5", "--n", "6", "--r", "1", "--s", "2", "--modulus", "mp:31"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("PMDS: no"));
    assert!(text.contains("witness: "));
}

#[test]
fn check_consecutive_two_row_parities_both_paths() {
    let o = pmds(&["check", "--variant", "c1", "--m", "3", "--n", "5", "--r", "2", "--s", "1", "--modulus", "mp:17", "--both"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("agree: yes"));
}

#[test]
fn check_json_is_deterministic() {
    let args = ["check", "--m", "4", "--n", "4", "--s", "3", "--modulus", "mp:17", "--oracle", "--json"];
    let a = pmds(&args);
    let b = pmds(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&a), 1);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["is_pmds"], false);
    assert_eq!(v["method"], "oracle");
    assert_eq!(v["witness"].as_array().unwrap().len(), 6);
}

#[test]
fn single_profile() {
    let o = pmds(&["check", "--m", "4", "--n", "4", "--s", "3", "--modulus", "mp:17", "--profile", "3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = pmds(&["check", "--m", "4", "--n", "4", "--s", "3", "--modulus", "mp:17", "--profile", "1,1,1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn exit_codes_for_errors() {
    assert_eq!(code(&pmds(&["check", "--m", "20", "--n", "20", "--s", "2", "--modulus", "mp:17"])), 2);
    assert_eq!(code(&pmds(&["check", "--m", "2", "--n", "2", "--s", "1", "--modulus", "mp:15"])), 2);
    assert_eq!(code(&pmds(&["check", "--m", "2"])), 2);
    let o = pmds(&["check", "--m", "20", "--n", "12", "--s", "3", "--modulus", "mp:257", "--oracle", "--budget", "1000"]);
    assert_eq!(code(&o), 3);
}

fn symbols(count: usize, bits: usize, seed: u64) -> Vec<BinPoly> {
    (0..count as u64)
        .map(|i| BinPoly::from_u64((i.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed) & ((1u64 << bits) - 1)))
        .collect()
}

fn encode(dir: &Path, modulus: &str, bits: usize, shape: &[&str], data_len: usize) -> std::path::PathBuf {
    let data = dir.join("data.bin");
    fs::write(&data, pack_symbols(&symbols(data_len, bits, 7), bits)).unwrap();
    let out = dir.join("word.pmds");
    let mut args = vec!["encode", "--modulus", modulus, "--input", data.to_str().unwrap(), "--output", out.to_str().unwrap()];
    args.extend(shape);
    let o = pmds(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn encode_decode_without_erasures_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let word = encode(dir.path(), "mp:17", 16, &C0_17, 10);
    let back = dir.path().join("back.pmds");
    let data_back = dir.path().join("data_back.bin");
    let o = pmds(&[
        "decode",
        "--input",
        word.to_str().unwrap(),
        "--output",
        back.to_str().unwrap(),
        "--data-output",
        data_back.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&word).unwrap(), fs::read(&back).unwrap());
    assert_eq!(fs::read(dir.path().join("data.bin")).unwrap(), fs::read(&data_back).unwrap());
}

#[test]
fn decode_column_plus_two() {
    let dir = tempfile::tempdir().unwrap();
    let word = encode(dir.path(), "435", 8, &["--m", "5", "--n", "5", "--s", "2"], 18);
    let original = read_codeword(&fs::read(&word).unwrap()).unwrap();
    // column 2 lost, plus two more entries in different rows
    let erasures = "0,2;1,2;2,2;3,2;4,2;1,0;3,4";
    let mut damaged = original.clone();
    for p in pmds::construction::ErasurePattern::parse(erasures, 5, 5).unwrap().positions() {
        damaged.set(p.row, p.col, &BinPoly::from_u64(0xff));
    }
    let input = dir.path().join("damaged.pmds");
    fs::write(&input, pmds::format::write_codeword(&damaged)).unwrap();
    let out = dir.path().join("fixed.pmds");
    let o = pmds(&["decode", "--input", input.to_str().unwrap(), "--erasures", erasures, "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_codeword(&fs::read(&out).unwrap()).unwrap(), original);
}

#[test]
fn decode_too_many_in_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let word = encode(dir.path(), "mp:17", 16, &C0_17, 10);
    let out = dir.path().join("x.pmds");
    // s + r + 1 = 4 erasures in row 1
    let o = pmds(&["decode", "--input", word.to_str().unwrap(), "--erasures", "1,0;1,1;1,2;1,3", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(!out.exists());
}

#[test]
fn encode_rejects_wrong_size() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("short.bin");
    fs::write(&data, [1u8, 2, 3]).unwrap();
    let out = dir.path().join("w.pmds");
    let o = pmds(&with(&["encode", "--modulus", "mp:17", "--input", data.to_str().unwrap(), "--output", out.to_str().unwrap()], &C0_17));
    assert_eq!(code(&o), 2);
}

#[test]
fn decode_rejects_unparseable_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("junk.pmds");
    fs::write(&input, b"not a codeword\n").unwrap();
    let out = dir.path().join("o.pmds");
    assert_eq!(code(&pmds(&["decode", "--input", input.to_str().unwrap(), "--output", out.to_str().unwrap()])), 2);
}

#[test]
fn tables_preset_one() {
    let o = pmds(&["tables", "--preset", "table1", "--csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("f,e,m,n,pmds,published,match"));
    assert_eq!(text.lines().count(), 33);
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn tables_custom_grid() {
    let o = pmds(&["tables", "--moduli", "mp:17,mp:89", "--shapes", "4/4,8/11,11/8", "--s", "2"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<Vec<String>> =
        stdout(&o).lines().skip(1).map(|l| l.split_whitespace().map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][..4], ["17", "17", "4", "4"]);
    assert_eq!(rows[1][..4], ["89", "89", "4", "4"]);
    assert_eq!(rows[2][..4], ["89", "8", "11", "NO"]);
    assert_eq!(rows[3][..4], ["89", "11", "8", "YES"]);
}

#[test]
fn reliability_defaults() {
    let o = pmds(&["reliability", "--csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "p,P,P_H,P_S_m13,P_S_m21,P_S_m31,P_S_111EC,P_S_12PMDS,P_DL_111EC,P_DL_12PMDS");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    assert!((rows[7][9] - 6.3e-6).abs() < 0.05e-6);
    let json = pmds(&["reliability", "--p", "0.0007", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!((v[0]["P_DL_111EC"].as_f64().unwrap() - 7.85e-5).abs() < 0.01e-5);
}

#[test]
fn matrix_grid() {
    let o = pmds(&["matrix", "--m", "2", "--n", "3", "--s", "2", "--modulus", "mp:7"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["1", "1", "1", "0", "0", "0"]);
    assert_eq!(lines[3].split_whitespace().collect::<Vec<_>>(), ["1", "a^2", "a^4", "a^6", "a", "a^3"]);
}
