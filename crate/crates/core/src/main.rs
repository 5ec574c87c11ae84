use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pmds::codec::CodeInstance;
use pmds::construction::{CodeParams, ErasurePattern, Variant};
use pmds::error::{CodecError, VerifyError};
use pmds::format::{pack_symbols, read_codeword, unpack_symbols, write_codeword};
use pmds::reliability::{format_table, table5, ReliabilityParams, DEFAULT_GRID};
use pmds::ring::Ring;
use pmds::tables::{format_rows, run_custom, run_preset, Preset};
use pmds::verifier::{check_fast, oracle_is_correcting_with, oracle_is_pmds_with, ErasureProfile, OracleOptions, DEFAULT_BUDGET};

/// Partial-MDS array codes: verification, encoding, decoding and reliability tables.
#[derive(Parser)]
#[command(name = "pmds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// c0 (squared powers), c1 (consecutive powers) or c2 (row-column)
    #[arg(long, default_value = "c0")]
    variant: Variant,
    /// Array rows
    #[arg(long)]
    m: usize,
    /// Array columns (devices)
    #[arg(long)]
    n: usize,
    /// Parities per row
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Global parities
    #[arg(long)]
    s: usize,
    /// mp:<prime> or an octal polynomial such as 435
    #[arg(long)]
    modulus: String,
}

impl CodeArgs {
    fn params(&self) -> Result<CodeParams, Failure> {
        let ring = Ring::parse(&self.modulus).map_err(|e| Failure::Usage(e.to_string()))?;
        CodeParams::new(self.m, self.n, self.r, self.s, self.variant, ring).map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a code is PMDS
    Check {
        #[command(flatten)]
        code: CodeArgs,
        /// Exhaustive search only
        #[arg(long, conflicts_with_all = ["fast", "both"])]
        oracle: bool,
        /// Closed-form conditions only
        #[arg(long, conflicts_with = "both")]
        fast: bool,
        /// Run both and fail if they disagree
        #[arg(long)]
        both: bool,
        /// Oracle pattern budget
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Oracle: only odd profiles, lifting witnesses (one row parity, c0)
        #[arg(long)]
        odd_only: bool,
        /// Check a single erasure profile such as 2,1 with the oracle
        #[arg(long, conflicts_with_all = ["fast", "both"])]
        profile: Option<ErasureProfile>,
        #[arg(long)]
        json: bool,
    },
    /// Encode packed data symbols into a codeword file
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// k = m(n-r)-s symbols, each deg(f) bits, packed LSB first
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Recover erased entries of a codeword file
    Decode {
        #[arg(long)]
        input: PathBuf,
        /// Erased positions as row,col pairs separated by ';' or spaces
        #[arg(long, default_value = "")]
        erasures: String,
        #[arg(long)]
        output: PathBuf,
        /// Also write the recovered data symbols, packed like the encoder input
        #[arg(long)]
        data_output: Option<PathBuf>,
    },
    /// Reproduce the published PMDS tables or run a custom grid
    Tables {
        /// table1, table2, table3 or table4
        #[arg(long, alias = "paper", conflicts_with_all = ["moduli", "shapes"])]
        preset: Option<Preset>,
        /// Comma-separated moduli, e.g. mp:17,mp:23
        #[arg(long, value_delimiter = ',')]
        moduli: Vec<String>,
        /// Comma-separated shapes m/n, e.g. 4/4,3/7
        #[arg(long, value_delimiter = ',', value_parser = parse_shape)]
        shapes: Vec<(usize, usize)>,
        #[arg(long, default_value = "c0")]
        variant: Variant,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
    },
    /// Data-loss probabilities after one device failure
    Reliability {
        /// Comma-separated bit error probabilities
        #[arg(long = "p", value_delimiter = ',')]
        ps: Vec<f64>,
        /// BCH correction capability
        #[arg(long, default_value_t = 15)]
        t: u64,
        /// Stripes per block
        #[arg(long, default_value_t = 16)]
        m: u64,
        /// Devices
        #[arg(long, default_value_t = 6)]
        n: u64,
        /// Blocks per device (pages / m)
        #[arg(long, default_value_t = 500_000)]
        blocks: u64,
        #[arg(long, default_value_t = 8)]
        sectors_per_page: u64,
        #[arg(long, default_value_t = 4096)]
        info_bits: u64,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the parity-check matrix as exponents of alpha
    Matrix {
        #[command(flatten)]
        code: CodeArgs,
    },
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once('/').ok_or_else(|| format!("expected m/n, got {s:?}"))?;
    Ok((m.trim().parse().map_err(|_| format!("bad m in {s:?}"))?, n.trim().parse().map_err(|_| format!("bad n in {s:?}"))?))
}

enum Failure {
    /// Exit 1.
    Negative(String),
    /// Exit 2.
    Usage(String),
    /// Exit 3.
    Budget(String),
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::NotCorrectable => Failure::Negative(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &PathBuf, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn json_line(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Prints the report; `Ok(false)` means a negative result.
fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Check { code, oracle, fast, both, budget, odd_only, profile, json } => {
            let params = code.params()?;
            let opts = OracleOptions { budget, odd_only };
            if both {
                let f = check_fast(&params)?;
                let o = oracle_is_pmds_with(&params, &opts)?;
                let agree = f.is_pmds == o.is_pmds;
                if json {
                    print!(
                        "{}",
                        json_line(&serde_json::json!({ "fast": f.to_json(&params), "oracle": o.to_json(&params), "agree": agree }))
                    );
                } else {
                    println!("{}{}agree: {}", f.to_text(&params), o.to_text(&params), if agree { "yes" } else { "no" });
                }
                if !agree {
                    return Err(Failure::Negative("fast check and oracle disagree".into()));
                }
                return Ok(o.is_pmds);
            }
            let verdict = match (&profile, oracle, fast) {
                (Some(p), _, _) => oracle_is_correcting_with(&params, p, budget)?,
                (None, true, _) => oracle_is_pmds_with(&params, &opts)?,
                (None, _, true) => check_fast(&params)?,
                _ => match check_fast(&params) {
                    Err(VerifyError::UnsupportedCase(_)) => oracle_is_pmds_with(&params, &opts)?,
                    other => other?,
                },
            };
            if json {
                print!("{}", json_line(&verdict.to_json(&params)));
            } else {
                print!("{}", verdict.to_text(&params));
            }
            Ok(verdict.is_pmds)
        }
        Command::Encode { code, input, output } => {
            let params = code.params()?;
            let inst = CodeInstance::new(&params)?;
            let data = unpack_symbols(&read(&input)?, params.data_len(), params.ring().degree())?;
            let w = inst.encode_polys(&data)?;
            write(&output, &write_codeword(&w))?;
            Ok(true)
        }
        Command::Decode { input, erasures, output, data_output } => {
            let w = read_codeword(&read(&input)?)?;
            let params = w.params().clone();
            let pattern = ErasurePattern::parse(&erasures, params.m(), params.n())?;
            let inst = CodeInstance::new(&params)?;
            let fixed = inst.decode_erasures(&w, &pattern)?;
            write(&output, &write_codeword(&fixed))?;
            if let Some(path) = data_output {
                write(&path, &pack_symbols(&inst.extract_data(&fixed), params.ring().degree()))?;
            }
            Ok(true)
        }
        Command::Tables { preset, moduli, shapes, variant, s, csv, json } => {
            let (head, rows) = match preset {
                Some(p) => (p.modulus_head(), run_preset(p)?),
                None => {
                    if moduli.is_empty() || shapes.is_empty() {
                        return Err(Failure::Usage("give --preset, or both --moduli and --shapes".into()));
                    }
                    ("modulus", run_custom(&moduli, &shapes, variant, s)?)
                }
            };
            if json {
                print!("{}", json_line(&rows));
            } else {
                print!("{}", format_rows(head, &rows, csv));
            }
            let mismatches = rows.iter().filter(|r| !r.matches()).count();
            if mismatches > 0 {
                eprintln!("{mismatches} row(s) differ from the published verdict");
            }
            Ok(mismatches == 0)
        }
        Command::Reliability { ps, t, m, n, blocks, sectors_per_page, info_bits, csv, json } => {
            let ps = if ps.is_empty() { DEFAULT_GRID.to_vec() } else { ps };
            let params = ReliabilityParams { p: 0.0, t, info_bits, sectors_per_page, m, n, pages: blocks.saturating_mul(m) };
            let rows = table5(&ps, &params).map_err(|e| Failure::Usage(e.to_string()))?;
            if json {
                print!("{}", json_line(&rows));
            } else {
                print!("{}", format_table(&rows, csv));
            }
            Ok(true)
        }
        Command::Matrix { code } => {
            let params = code.params()?;
            print!("{}", params.parity_check().alpha_grid());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
