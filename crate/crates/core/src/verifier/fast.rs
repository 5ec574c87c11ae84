//! Fast PMDS checks.
//!
//! Each supported `(variant, r, s)` reduces PMDS to "some explicit expression is a unit" for
//! every tuple of row offsets and column subsets in a finite range. Expressions are evaluated
//! at the roots of the modulus (see [`Evaluator`]); a zero at any root is a failure. Every
//! failure is turned into a concrete erasure pattern and confirmed singular before it is
//! reported.

use rayon::prelude::*;

use super::eval::{Evaluator, Gf2k};
use super::oracle::pattern_is_correctable;
use super::profile::odd_profiles;
use super::{Condition, Method, PmdsVerdict};
use crate::codec::combinations;
use crate::construction::{CodeParams, ErasurePattern, Position, Variant};
use crate::error::VerifyError;
use crate::poly::multiplicative_order_of_two;
use crate::ring::ModulusKind;

pub fn check_fast(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    let (variant, r, s) = (params.variant(), params.r(), params.s());
    match (variant, r, s) {
        (_, _, 0) => Err(VerifyError::UnsupportedCase("no global parities".into())),
        (Variant::RowColumn, 1, 1) => Ok(PmdsVerdict::pass(Method::Fast)),
        (Variant::RowColumn, 1, 2) => row_column_two(params),
        (Variant::Squared, 1, _) | (Variant::Consecutive, 1, 1 | 2) => odd_sum_recursion(params),
        (Variant::Squared, _, 1) => row_odd_sums(params),
        (Variant::Squared, 2, 2) => two_row_quadratic(params),
        (Variant::Consecutive, _, 1) => Ok(PmdsVerdict::pass(Method::Fast)),
        (Variant::Consecutive, 1, 3) => consecutive_three(params),
        _ => Err(VerifyError::UnsupportedCase(format!("{variant} with r = {r}, s = {s}"))),
    }
}

fn evaluator(params: &CodeParams) -> Result<Evaluator, VerifyError> {
    Evaluator::new(params.ring())
        .ok_or_else(|| VerifyError::UnsupportedCase(format!("roots of {} need a field above GF(2^128)", params.ring())))
}

/// Builds the pattern and checks that it really is unrecoverable.
fn confirm(params: &CodeParams, rows: &[(usize, Vec<usize>)], condition: Condition) -> Result<PmdsVerdict, VerifyError> {
    let pattern = to_pattern(params, rows)?;
    if pattern_is_correctable(params, &pattern) {
        return Err(VerifyError::Inconsistent(format!("{condition} fails but pattern {pattern} is recoverable")));
    }
    Ok(PmdsVerdict::fail(params, pattern, condition, Method::Fast))
}

fn to_pattern(params: &CodeParams, rows: &[(usize, Vec<usize>)]) -> Result<ErasurePattern, VerifyError> {
    let positions = rows.iter().flat_map(|(i, cs)| cs.iter().map(move |&c| Position::new(*i, c))).collect();
    ErasurePattern::for_params(positions, params).map_err(|e| VerifyError::Inconsistent(e.to_string()))
}

/// Adds erasures until the pattern has `extra` more than `r` per affected row in total:
/// free columns of the rows already used first, then fresh rows.
fn extend(params: &CodeParams, mut rows: Vec<(usize, Vec<usize>)>, mut extra: usize) -> Vec<(usize, Vec<usize>)> {
    let n = params.n();
    for (_, cols) in rows.iter_mut() {
        for c in 0..n {
            if extra == 0 {
                break;
            }
            if !cols.contains(&c) {
                cols.push(c);
                extra -= 1;
            }
        }
        cols.sort_unstable();
    }
    for i in 0..params.m() {
        if extra == 0 {
            break;
        }
        if rows.iter().any(|(k, _)| *k == i) {
            continue;
        }
        let take = (params.r() + extra).min(n);
        extra -= take - params.r();
        rows.push((i, (0..take).collect()));
    }
    rows.sort();
    rows
}

/// `gcd(sum x^flat, f) = 1` over all odd profiles of every stage up to `s`.
fn odd_sum_recursion(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    let (m, n, s) = (params.m(), params.n(), params.s());
    let ring = params.ring();
    let field_like = match ring.kind() {
        ModulusKind::Irreducible => true,
        ModulusKind::AllOnes { p } => multiplicative_order_of_two(p) == p - 1,
    };
    // every sum has degree below mn, so it cannot be a multiple of an irreducible modulus of higher degree
    if field_like && m * n <= ring.degree() {
        return Ok(PmdsVerdict::pass(Method::Fast));
    }
    let ev = evaluator(params)?;
    for stage in 1..=s {
        for profile in odd_profiles(stage, m) {
            if profile.parts().iter().any(|&p| p + 1 > n) {
                continue;
            }
            if let Some(rows) = odd_sum_failure(&ev, m, n, profile.parts()) {
                let rows = extend(params, rows, s - stage);
                return confirm(params, &rows, Condition::OddSum { stage });
            }
        }
    }
    Ok(PmdsVerdict::pass(Method::Fast))
}

/// First pattern (row offsets from 0, columns per row) with the given parts whose sum of
/// `x^(d n + c)` vanishes at some root.
fn odd_sum_failure(ev: &Evaluator, m: usize, n: usize, parts: &[usize]) -> Option<Vec<(usize, Vec<usize>)>> {
    let t = parts.len();
    let np = ev.points();
    let subsets: Vec<Vec<Vec<usize>>> = parts.iter().map(|&p| combinations(n, p + 1).collect()).collect();
    let lens: Vec<usize> = subsets.iter().map(Vec::len).collect();
    // values[j][(d * lens[j] + idx) * np + pt]
    let values: Vec<Vec<u128>> = (0..t)
        .map(|j| {
            let mut v = vec![0u128; m * lens[j] * np];
            let ds = if j == 0 { 0..1 } else { 1..m };
            for d in ds {
                for (idx, set) in subsets[j].iter().enumerate() {
                    for pt in 0..np {
                        v[(d * lens[j] + idx) * np + pt] = set.iter().fold(0, |a, &c| a ^ ev.power(pt, (d * n + c) as i64));
                    }
                }
            }
            v
        })
        .collect();
    let offsets: Vec<Vec<usize>> = if t == 1 {
        vec![vec![0]]
    } else {
        combinations(m - 1, t - 1).map(|c| std::iter::once(0).chain(c.iter().map(|x| x + 1)).collect()).collect()
    };
    let items: Vec<(usize, usize)> = (0..offsets.len()).flat_map(|o| (0..lens[0]).map(move |s0| (o, s0))).collect();
    let scan = |&(o, s0): &(usize, usize)| -> Option<Vec<(usize, Vec<usize>)>> {
        let ds = &offsets[o];
        let mut acc = vec![0u128; np * t];
        acc[..np].copy_from_slice(&values[0][s0 * np..(s0 + 1) * np]);
        let mut chosen = vec![s0];
        let found = if t == 1 {
            acc[..np].contains(&0)
        } else {
            descend(1, ds, &values, &lens, np, &mut acc, &mut chosen)
        };
        found.then(|| ds.iter().zip(&chosen).enumerate().map(|(j, (&d, &idx))| (d, subsets[j][idx].clone())).collect())
    };
    items.par_iter().find_map_first(scan)
}

fn descend(level: usize, ds: &[usize], values: &[Vec<u128>], lens: &[usize], np: usize, acc: &mut [u128], chosen: &mut Vec<usize>) -> bool {
    let last = level + 1 == ds.len();
    let d = ds[level];
    for idx in 0..lens[level] {
        let base = (d * lens[level] + idx) * np;
        let vals = &values[level][base..base + np];
        if last {
            let prev = &acc[(level - 1) * np..level * np];
            if prev.iter().zip(vals).any(|(a, b)| a == b) {
                chosen.push(idx);
                return true;
            }
        } else {
            for pt in 0..np {
                acc[level * np + pt] = acc[(level - 1) * np + pt] ^ vals[pt];
            }
            chosen.push(idx);
            if descend(level + 1, ds, values, lens, np, acc, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Squared construction with one global parity: `1 + x^l1 + ... + x^lk` must be a unit for
/// every odd `k` from 3 to `r` and columns `1 <= l1 < ... < lk <= n - 1`.
fn row_odd_sums(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    let (n, r) = (params.n(), params.r());
    if r < 3 {
        return Ok(PmdsVerdict::pass(Method::Fast));
    }
    let ev = evaluator(params)?;
    for size in (3..=r).step_by(2) {
        if let Some(cols) = row_sum_failure(&ev, n, size) {
            let mut row: Vec<usize> = std::iter::once(0).chain(cols).collect();
            for c in 1..n {
                if row.len() == r + 1 {
                    break;
                }
                if !row.contains(&c) {
                    row.push(c);
                }
            }
            row.sort_unstable();
            return confirm(params, &[(0, row)], Condition::RowOddSum { size });
        }
    }
    Ok(PmdsVerdict::pass(Method::Fast))
}

fn row_sum_failure(ev: &Evaluator, n: usize, size: usize) -> Option<Vec<usize>> {
    if size > n - 1 {
        return None;
    }
    combinations(n - 1, size).find_map(|c| {
        let exps: Vec<i64> = std::iter::once(0).chain(c.iter().map(|&l| l as i64 + 1)).collect();
        (!ev.is_unit_sparse(&exps)).then(|| c.iter().map(|l| l + 1).collect())
    })
}

/// Squared construction with two row parities and two global parities.
fn two_row_quadratic(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    let (m, n) = (params.m(), params.n());
    let ev = evaluator(params)?;
    if let Some(cols) = row_sum_failure(&ev, n, 3) {
        let row: Vec<usize> = std::iter::once(0).chain(cols).collect();
        return confirm(params, &[(0, row)], Condition::RowOddSum { size: 3 });
    }
    let np = ev.points();
    let field = ev.field();
    let triples: Vec<Vec<usize>> = combinations(n, 3).collect();
    // q(a) = sum of x^e over e in {0, a1, a2, 2a1, 2a2, a1 + a2}, a relative to the first column
    let quad = |pt: usize, t: &[usize]| -> u128 {
        let (a1, a2) = ((t[1] - t[0]) as i64, (t[2] - t[0]) as i64);
        [0, a1, a2, 2 * a1, 2 * a2, a1 + a2].iter().fold(0, |acc, &e| acc ^ ev.power(pt, e))
    };
    // with both sides scaled by x^(2 a0): q(A) x^(2 a0) + x^(2 i n) q(B) x^(2 b0)
    let left: Vec<u128> = triples.iter().flat_map(|t| (0..np).map(move |pt| (pt, t))).map(|(pt, t)| field.mul(quad(pt, t), ev.power(pt, 2 * t[0] as i64))).collect();
    let right: Vec<u128> = triples.iter().flat_map(|t| (0..np).map(move |pt| (pt, t))).map(|(pt, t)| field.mul(quad(pt, t), ev.power(pt, 2 * t[0] as i64))).collect();
    let hit = (1..m).into_par_iter().find_map_first(|i| {
        let shifted: Vec<u128> =
            (0..triples.len()).flat_map(|b| (0..np).map(move |pt| (b, pt))).map(|(b, pt)| field.mul(right[b * np + pt], ev.power(pt, (2 * i * n) as i64))).collect();
        for a in 0..triples.len() {
            for b in 0..triples.len() {
                if (0..np).any(|pt| left[a * np + pt] == shifted[b * np + pt]) {
                    return Some((i, a, b));
                }
            }
        }
        None
    });
    if let Some((i, a, b)) = hit {
        return confirm(params, &[(0, triples[a].clone()), (i, triples[b].clone())], Condition::TwoRowQuadratic);
    }
    Ok(PmdsVerdict::pass(Method::Fast))
}

/// Per-point data for a pair of erased cells `x < y` in one row: with `u = z^x`, `v = z^y`,
/// the recovery column `(u^k + v^k)` for `k = 1, 2, 3` divided by `u + v` is `(1, e, f)` with
/// `e = u + v` and `f = e^2 + uv`.
struct PairTable {
    np: usize,
    pairs: Vec<(usize, usize)>,
    /// `[(row * pairs + idx) * np + pt]`
    e: Vec<u128>,
    f: Vec<u128>,
}

impl PairTable {
    fn new(ev: &Evaluator, m: usize, n: usize) -> Self {
        let np = ev.points();
        let field = ev.field();
        let pairs: Vec<(usize, usize)> = combinations(n, 2).map(|c| (c[0], c[1])).collect();
        let len = m * pairs.len() * np;
        let (mut e, mut f) = (vec![0u128; len], vec![0u128; len]);
        for i in 0..m {
            for (idx, &(x, y)) in pairs.iter().enumerate() {
                for pt in 0..np {
                    let u = ev.power(pt, (i * n + x) as i64);
                    let v = ev.power(pt, (i * n + y) as i64);
                    let k = (i * pairs.len() + idx) * np + pt;
                    e[k] = u ^ v;
                    f[k] = field.mul(e[k], e[k]) ^ field.mul(u, v);
                }
            }
        }
        PairTable { np, pairs, e, f }
    }

    fn at(&self, row: usize, idx: usize) -> (&[u128], &[u128]) {
        let k = (row * self.pairs.len() + idx) * self.np;
        (&self.e[k..k + self.np], &self.f[k..k + self.np])
    }
}

/// Cross product of two normalized columns, for the test `w1 + e w2 + f w3 = 0`.
#[inline]
fn cross(field: &Gf2k, (ea, fa): (u128, u128), (eb, fb): (u128, u128)) -> [u128; 3] {
    [field.mul(ea, fb) ^ field.mul(eb, fa), fa ^ fb, ea ^ eb]
}

#[inline]
fn vanishes(field: &Gf2k, w: &[u128; 3], e: u128, f: u128) -> bool {
    w[0] ^ field.mul(e, w[1]) ^ field.mul(f, w[2]) == 0
}

/// Consecutive construction, one row parity, three global parities.
fn consecutive_three(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    let (m, n) = (params.m(), params.n());
    if m < 2 {
        return Ok(PmdsVerdict::pass(Method::Fast));
    }
    let ev = evaluator(params)?;
    let field = ev.field();
    let table = PairTable::new(&ev, m, n);
    let np = table.np;
    let npairs = table.pairs.len();
    let pair_idx = |x: usize, y: usize| table.pairs.iter().position(|&p| p == (x, y)).unwrap();

    // three erasures in one row, two in another
    if n >= 3 {
        let triples: Vec<Vec<usize>> = combinations(n, 3).collect();
        let row_pairs: Vec<(usize, usize)> = (1..m).flat_map(|d| [(0, d), (d, 0)]).collect();
        let hit = row_pairs.par_iter().find_map_first(|&(i1, i2)| {
            let mut w = vec![[0u128; 3]; np];
            for t in &triples {
                let (ea, fa) = table.at(i1, pair_idx(t[0], t[1]));
                let (eb, fb) = table.at(i1, pair_idx(t[0], t[2]));
                for pt in 0..np {
                    w[pt] = cross(field, (ea[pt], fa[pt]), (eb[pt], fb[pt]));
                }
                for c in 0..npairs {
                    let (ec, fc) = table.at(i2, c);
                    if (0..np).any(|pt| vanishes(field, &w[pt], ec[pt], fc[pt])) {
                        let (x, y) = table.pairs[c];
                        return Some(vec![(i1, t.clone()), (i2, vec![x, y])]);
                    }
                }
            }
            None
        });
        if let Some(mut rows) = hit {
            rows.sort();
            return confirm(params, &rows, Condition::TripleAndPair);
        }
    }

    // two erasures in each of three rows
    if m >= 3 {
        let items: Vec<(usize, usize, usize)> = combinations(m - 1, 2)
            .flat_map(|c| (0..npairs).map(move |a| (c[0] + 1, c[1] + 1, a)))
            .collect();
        let hit = items.par_iter().find_map_first(|&(i2, i3, a)| {
            let (ea, fa) = table.at(0, a);
            let mut w = vec![[0u128; 3]; np];
            for b in 0..npairs {
                let (eb, fb) = table.at(i2, b);
                for pt in 0..np {
                    w[pt] = cross(field, (ea[pt], fa[pt]), (eb[pt], fb[pt]));
                }
                // shifting every column by the same amount scales the determinant by a unit,
                // so some pair may be assumed to start at column 0; pairs (0, y) come first
                let upto = if table.pairs[a].0 == 0 || table.pairs[b].0 == 0 { npairs } else { n - 1 };
                for c in 0..upto {
                    let (ec, fc) = table.at(i3, c);
                    if (0..np).any(|pt| vanishes(field, &w[pt], ec[pt], fc[pt])) {
                        let pair = |k: usize| vec![table.pairs[k].0, table.pairs[k].1];
                        return Some(vec![(0, pair(a)), (i2, pair(b)), (i3, pair(c))]);
                    }
                }
            }
            None
        });
        if let Some(rows) = hit {
            return confirm(params, &rows, Condition::ThreePairs);
        }
    }
    Ok(PmdsVerdict::pass(Method::Fast))
}

/// Row/column construction with two global parities: pairs in two rows are recoverable when
/// `1 + x^d` is a unit for the column and row distances involved, while three erasures in
/// one row never are.
fn row_column_two(params: &CodeParams) -> Result<PmdsVerdict, VerifyError> {
    let (m, n) = (params.m(), params.n());
    if n >= 3 {
        return confirm(params, &[(0, vec![0, 1, 2])], Condition::ThreeInRow);
    }
    let ev = evaluator(params)?;
    for d in 1..m.max(n) {
        if !ev.is_unit_sparse(&[0, d as i64]) {
            let rows = if d < m { vec![(0, vec![0, 1]), (d, vec![0, 1])] } else { vec![(0, vec![0, 1]), (1, vec![0, 1])] };
            return confirm(params, &rows, Condition::Binomial);
        }
    }
    Ok(PmdsVerdict::pass(Method::Fast))
}

/// Whether the squared code with four global parities handles both four extra erasures in
/// one row and two extra in each of two rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComboVerdict {
    pub holds: bool,
    pub failed_condition: Option<Condition>,
    /// A pattern of profile (2,2) or (4) that cannot be recovered, when the array is wide
    /// enough to hold one.
    pub witness: Option<ErasurePattern>,
}

pub fn check_special_combo_1_4(params: &CodeParams) -> Result<ComboVerdict, VerifyError> {
    if params.variant() != Variant::Squared || params.r() != 1 || params.s() != 4 {
        return Err(VerifyError::UnsupportedCase("needs the squared construction with r = 1, s = 4".into()));
    }
    let (m, n) = (params.m(), params.n());
    let ev = evaluator(params)?;
    let failure = if m >= 2 {
        odd_sum_failure(&ev, m, n, &[1, 1]).map(|rows| (rows, Condition::OddSum { stage: 2 }))
    } else {
        None
    };
    let failure = failure.or_else(|| {
        row_sum_failure(&ev, n, 3).map(|cols| (vec![(0, std::iter::once(0).chain(cols).collect())], Condition::OddSum { stage: 3 }))
    });
    let Some((mut rows, condition)) = failure else {
        return Ok(ComboVerdict { holds: true, failed_condition: None, witness: None });
    };
    let mut witness = None;
    if rows.iter().all(|(_, cols)| cols.len() < n) {
        for (_, cols) in rows.iter_mut() {
            let free = (0..n).find(|c| !cols.contains(c)).unwrap();
            cols.push(free);
            cols.sort_unstable();
        }
        let pattern = to_pattern(params, &rows)?;
        if pattern_is_correctable(params, &pattern) {
            return Err(VerifyError::Inconsistent(format!("{condition} fails but pattern {pattern} is recoverable")));
        }
        witness = Some(pattern);
    }
    Ok(ComboVerdict { holds: false, failed_condition: Some(condition), witness })
}
