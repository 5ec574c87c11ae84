//! Probability of data loss after one device has failed, for a flash array whose sectors are
//! protected by a `t`-error-correcting BCH code.

use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::ReliabilityError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReliabilityParams {
    /// Raw bit error probability.
    pub p: f64,
    /// BCH correction capability in bits.
    pub t: u64,
    pub info_bits: u64,
    pub sectors_per_page: u64,
    /// Stripes per block.
    pub m: u64,
    /// Devices.
    pub n: u64,
    /// Pages per device.
    pub pages: u64,
}

impl Default for ReliabilityParams {
    fn default() -> Self {
        ReliabilityParams { p: 0.0, t: 15, info_bits: 4096, sectors_per_page: 8, m: 16, n: 6, pages: 8_000_000 }
    }
}

impl ReliabilityParams {
    pub fn validate(&self) -> Result<(), ReliabilityError> {
        if !(0.0..1.0).contains(&self.p) {
            return Err(ReliabilityError::BadProbability(self.p));
        }
        for (name, v) in [
            ("t", self.t),
            ("info_bits", self.info_bits),
            ("sectors_per_page", self.sectors_per_page),
            ("m", self.m),
            ("n", self.n),
            ("pages", self.pages),
        ] {
            if v == 0 {
                return Err(ReliabilityError::NonPositive(name));
            }
        }
        if self.n < 2 {
            return Err(ReliabilityError::NonPositive("n - 1"));
        }
        if !self.pages.is_multiple_of(self.m) {
            return Err(ReliabilityError::PagesNotMultiple { pages: self.pages, m: self.m });
        }
        Ok(())
    }

    pub fn redundancy_bits(&self) -> u64 {
        13 * self.t
    }

    pub fn codeword_bits(&self) -> u64 {
        self.info_bits + self.redundancy_bits()
    }

    pub fn blocks(&self) -> u64 {
        self.pages / self.m
    }

    pub fn with_p(&self, p: f64) -> Self {
        ReliabilityParams { p, ..self.clone() }
    }
}

/// `P(X >= from)` for `X ~ Binomial(trials, prob)`, summing terms upward from `from`.
pub fn binomial_tail(trials: u64, prob: f64, from: u64) -> f64 {
    if from == 0 {
        return 1.0;
    }
    if from > trials || prob == 0.0 {
        return 0.0;
    }
    if prob >= 1.0 {
        return 1.0;
    }
    let ratio = prob / (1.0 - prob);
    let mut term = (ln_binomial(trials, from) + from as f64 * prob.ln() + (trials - from) as f64 * (-prob).ln_1p()).exp();
    let mode = (trials as f64 + 1.0) * prob;
    let mut sum = 0.0;
    let mut i = from;
    loop {
        sum += term;
        if i == trials {
            break;
        }
        term *= (trials - i) as f64 / (i + 1) as f64 * ratio;
        i += 1;
        if (i as f64) > mode && term <= sum * 1e-30 {
            break;
        }
    }
    sum.min(1.0)
}

/// Same tail, summed in the log domain.
pub fn binomial_tail_log(trials: u64, prob: f64, from: u64) -> f64 {
    if from > trials || prob == 0.0 {
        return 0.0;
    }
    let (lp, lq) = (prob.ln(), (-prob).ln_1p());
    let logs: Vec<f64> =
        (from..=trials).map(|i| ln_binomial(trials, i) + i as f64 * lp + (trials - i) as f64 * lq).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()).exp().min(1.0)
}

/// Probability that a sector codeword has more than `t` bit errors.
pub fn codeword_failure(params: &ReliabilityParams) -> f64 {
    binomial_tail(params.codeword_bits(), params.p, params.t + 1)
}

/// Probability that at least one sector of a page fails.
pub fn page_hard_error(codeword: f64, sectors_per_page: u64) -> f64 {
    -(sectors_per_page as f64 * (-codeword).ln_1p()).exp_m1()
}

/// Hard error counts among the `n - 1` surviving pages of a stripe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StripeProbs {
    pub exactly_one: f64,
    pub more_than_one: f64,
    pub more_than_two: f64,
}

pub fn stripe_probs(page: f64, n: u64) -> StripeProbs {
    let survivors = n - 1;
    let exactly_one = if survivors == 0 { 0.0 } else { survivors as f64 * page * (1.0 - page).powi(survivors as i32 - 1) };
    StripeProbs {
        exactly_one,
        more_than_one: binomial_tail(survivors, page, 2),
        more_than_two: binomial_tail(survivors, page, 3),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockProbs {
    /// Exactly one hard error in at least three stripes.
    pub single_in_three: f64,
    /// Two or more hard errors in some stripe.
    pub double_in_any: f64,
    /// Three or more hard errors in some stripe.
    pub triple_in_any: f64,
}

pub fn block_probs(m: u64, n: u64, page: f64, stripe: &StripeProbs) -> BlockProbs {
    let clean = (n - 1) as f64 * (-page).ln_1p();
    let single_in_three = if stripe.exactly_one == 0.0 {
        0.0
    } else {
        (3..=m)
            .map(|i| {
                (ln_binomial(m, i) + i as f64 * stripe.exactly_one.ln() + (m - i) as f64 * clean).exp()
            })
            .sum()
    };
    BlockProbs {
        single_in_three,
        double_in_any: (m as f64 * stripe.more_than_one).min(1.0),
        triple_in_any: (m as f64 * stripe.more_than_two).min(1.0),
    }
}

/// Block loss for the (1;1,1) erasure-correcting scheme and the (1;2) PMDS scheme.
/// Union bounds are clamped to 1.
pub fn scheme_block_loss(block: &BlockProbs) -> (f64, f64) {
    ((block.single_in_three + block.double_in_any).min(1.0), (block.single_in_three + block.triple_in_any).min(1.0))
}

/// Probability that at least one of `blocks` independent blocks loses data.
pub fn device_data_loss(block_loss: f64, blocks: u64) -> f64 {
    -(blocks as f64 * (-block_loss).ln_1p()).exp_m1()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct ReliabilityRow {
    pub p: f64,
    pub P: f64,
    pub P_H: f64,
    pub P_S_m13: f64,
    pub P_S_m21: f64,
    pub P_S_m31: f64,
    pub P_S_111EC: f64,
    pub P_S_12PMDS: f64,
    pub P_DL_111EC: f64,
    pub P_DL_12PMDS: f64,
}

pub const COLUMNS: [&str; 10] =
    ["p", "P", "P_H", "P_S_m13", "P_S_m21", "P_S_m31", "P_S_111EC", "P_S_12PMDS", "P_DL_111EC", "P_DL_12PMDS"];

impl ReliabilityRow {
    pub fn values(&self) -> [f64; 10] {
        [
            self.p,
            self.P,
            self.P_H,
            self.P_S_m13,
            self.P_S_m21,
            self.P_S_m31,
            self.P_S_111EC,
            self.P_S_12PMDS,
            self.P_DL_111EC,
            self.P_DL_12PMDS,
        ]
    }
}

pub fn compute_row(params: &ReliabilityParams) -> Result<ReliabilityRow, ReliabilityError> {
    params.validate()?;
    let codeword = codeword_failure(params);
    let page = page_hard_error(codeword, params.sectors_per_page);
    let stripe = stripe_probs(page, params.n);
    let block = block_probs(params.m, params.n, page, &stripe);
    let (ec, pmds) = scheme_block_loss(&block);
    Ok(ReliabilityRow {
        p: params.p,
        P: codeword,
        P_H: page,
        P_S_m13: block.single_in_three,
        P_S_m21: block.double_in_any,
        P_S_m31: block.triple_in_any,
        P_S_111EC: ec,
        P_S_12PMDS: pmds,
        P_DL_111EC: device_data_loss(ec, params.blocks()),
        P_DL_12PMDS: device_data_loss(pmds, params.blocks()),
    })
}

pub fn table5(ps: &[f64], params: &ReliabilityParams) -> Result<Vec<ReliabilityRow>, ReliabilityError> {
    ps.iter().map(|&p| compute_row(&params.with_p(p))).collect()
}

/// The grid of bit error probabilities used by the published table.
pub const DEFAULT_GRID: [f64; 10] = [0.0001, 0.0002, 0.0003, 0.0004, 0.0005, 0.0006, 0.0007, 0.0008, 0.0009, 0.001];

/// Published values as printed, one line per quantity in `COLUMNS[1..]` order, one entry per
/// `DEFAULT_GRID` point.
pub const PUBLISHED: [[&str; 10]; 9] = [
    ["4.1E-20", "1.8E-15", "7.9E-13", "5.3E-11", "1.3E-9", "1.6E-8", "1.2E-7", "7.0E-7", "3.1E-6", "1.1E-5"],
    ["3.3E-19", "1.4E-14", "6.3E-12", "7.9E-13", "1.0E-8", "1.3E-7", "9.9E-7", "5.6E-6", "2.5E-5", "9.0E-5"],
    ["2.5E-51", "2.1E-37", "1.8E-29", "5.3E-24", "7.2E-20", "1.4E-16", "6.8E-14", "1.3E-11", "1.1E-9", "5.2E-8"],
    ["5.3E-35", "3.3E-26", "6.4E-21", "2.9E-17", "1.6E-14", "2.5E-12", "1.6E-10", "5.1E-9", "1.0E-9", "1.3E-6"],
    ["5.7E-54", "4.8E-40", "4.1E-32", "1.2E-26", "3.1E-19", "3.1E-19", "1.6E-16", "2.9E-14", "2.5E-12", "1.2E-10"],
    ["1.7E-35", "3.3E-26", "6.4E-21", "2.9E-17", "1.6E-14", "2.5E-12", "1.6E-10", "5.1E-9", "1.0E-7", "1.4E-6"],
    ["2.5E-51", "2.1E-37", "1.8E-29", "5.3E-24", "7.2E-20", "1.4E-16", "6.8E-14", "1.3E-11", "1.1E-9", "5.2E-8"],
    ["8.6E-30", "1.7E-20", "3.2E-15", "1.4E-11", "8.2E-9", "1.3E-6", "7.8E-5", "2.5E-3", ".05", ".5"],
    ["1.2E-45", "1.1E-31", "8.9E-24", "2.7E-18", "3.6E-14", "6.9E-11", "3.4E-8", "6.3E-6", "5.4E-4", ".026"],
];

/// Value and number of significant digits of a printed cell such as `5.2E-8` or `.026`.
pub fn parse_printed(cell: &str) -> (f64, i32) {
    let mantissa = cell.split(['E', 'e']).next().unwrap_or(cell);
    let digits = mantissa.chars().filter(char::is_ascii_digit).collect::<String>();
    let significant = digits.trim_start_matches('0').len().max(1) as i32;
    (cell.parse().expect("numeric cell"), significant)
}

/// Published cells that contradict other published cells, as (quantity index into `PUBLISHED`, grid index).
pub const INCONSISTENT_CELLS: [(usize, usize); 4] = [(1, 3), (3, 8), (3, 0), (4, 4)];

/// Whether `computed` agrees with a value printed to `digits` significant figures, allowing
/// either rounding or truncation of the printed value.
pub fn matches_printed(computed: f64, printed: f64, digits: i32) -> bool {
    if printed == 0.0 {
        return computed == 0.0;
    }
    let ulp = 10f64.powi(printed.abs().log10().floor() as i32 - digits + 1);
    (computed - printed).abs() <= ulp * (1.0 + 1e-9)
}

pub fn format_table(rows: &[ReliabilityRow], csv: bool) -> String {
    let mut out = String::new();
    if csv {
        out += &COLUMNS.join(",");
        out.push('\n');
        for r in rows {
            let cells: Vec<String> = r.values().iter().map(|v| format!("{v:.6e}")).collect();
            out += &cells.join(",");
            out.push('\n');
        }
        return out;
    }
    for (c, name) in COLUMNS.iter().enumerate() {
        out += &format!("{name:<12}");
        for r in rows {
            let v = r.values()[c];
            if c == 0 {
                out += &format!(" {v:>8}");
            } else {
                out += &format!(" {v:>8.1e}");
            }
        }
        out.push('\n');
    }
    out
}
