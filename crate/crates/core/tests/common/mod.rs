//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the solver or window code it is used to check.

#![allow(dead_code)]

use std::collections::HashMap;

use cagame::{Background, Params, Tape};
use rand::Rng;

/// `C(n, k) mod 2` by Lucas' theorem: odd iff every binary digit of `k` is
/// at most the matching digit of `n`.
pub fn binomial_parity(n: u64, k: u64) -> bool {
    if k > n {
        return false;
    }
    let (mut n, mut k) = (n, k);
    while k > 0 {
        if k % 2 > n % 2 {
            return false;
        }
        n /= 2;
        k /= 2;
    }
    true
}

/// Rule 60 over `...000111...`: row 0 is the step, row `y >= 1` is
/// `C(y - 1, x - 1) mod 2`.
pub fn pascal_cell(x: i64, y: u32) -> bool {
    if y == 0 {
        return x >= 1;
    }
    x >= 1 && binomial_parity(u64::from(y) - 1, (x - 1) as u64)
}

/// Plain recursive reading of the take-away rules, memoized on its own
/// table. Returns `true` for P.
pub struct NaiveTakeAway<'a> {
    pub params: Params,
    pub tape: &'a dyn Tape,
    memo: HashMap<(i64, i64, i64), bool>,
}

impl<'a> NaiveTakeAway<'a> {
    pub fn new(params: Params, tape: &'a dyn Tape) -> Self {
        NaiveTakeAway {
            params,
            tape,
            memo: HashMap::new(),
        }
    }

    pub fn is_p(&mut self, x: i64, y: i64, mp: i64) -> bool {
        if let Some(&v) = self.memo.get(&(x, y, mp)) {
            return v;
        }
        let gamma = i64::from(self.params.reach_right);
        let big = i64::from(self.params.reach_left);
        let mut p = true;
        'outer: for m in 1..=y {
            for t in 0..=x {
                let ranged = gamma * (m - 1) <= t && t <= gamma * m + mp + big;
                let exception = t == x && x < gamma * (m - 1);
                if !(ranged || exception) {
                    continue;
                }
                if m == y {
                    let rest = x - t;
                    let blocked = (rest - y.min(rest) + 1..=rest).any(|i| self.tape.value(i));
                    if blocked {
                        continue;
                    }
                }
                if self.is_p(x - t, y - m, m) {
                    p = false;
                    break 'outer;
                }
            }
        }
        self.memo.insert((x, y, mp), p);
        p
    }
}

/// Every row of the spacetime diagram over `[x0, x1]`, computed cell by cell
/// from the update rule with no shared state.
pub fn naive_rows(params: Params, tape: &dyn Tape, x0: i64, x1: i64, rows: u32) -> Vec<Vec<bool>> {
    let (gl, gr) = (params.left_slope(), params.right_slope());
    let lo = x0 - i64::from(rows) * gl;
    let hi = x1 + i64::from(rows) * gr;
    let mut row: Vec<bool> = (lo..=hi).map(|x| tape.value(x)).collect();
    let mut row_lo = lo;
    let mut out = Vec::new();
    for y in 0..=rows {
        out.push(row[(x0 - row_lo) as usize..=(x1 - row_lo) as usize].to_vec());
        if y == rows {
            break;
        }
        let mut next = Vec::new();
        let next_lo = row_lo + gl;
        let next_hi = row_lo + row.len() as i64 - 1 - gr;
        for x in next_lo..=next_hi {
            let at = |p: i64| row[(p - row_lo) as usize];
            let quiet = !at(x - 1) && !at(x);
            let saturated = (x - gl..=x + gr).all(at);
            next.push(!(quiet || saturated));
        }
        row = next;
        row_lo = next_lo;
    }
    out
}

/// Leftmost offsets where `pattern` occurs in `row`.
pub fn naive_scan(row: &[bool], pattern: &[bool]) -> Vec<usize> {
    let mut hits = Vec::new();
    if pattern.len() > row.len() {
        return hits;
    }
    for start in 0..=row.len() - pattern.len() {
        let mut ok = true;
        for (j, &b) in pattern.iter().enumerate() {
            if row[start + j] != b {
                ok = false;
                break;
            }
        }
        if ok {
            hits.push(start);
        }
    }
    hits
}

pub fn random_bits(rng: &mut impl Rng, min_len: usize, max_len: usize) -> Vec<bool> {
    let n = rng.gen_range(min_len..=max_len);
    (0..n).map(|_| rng.gen_bool(0.5)).collect()
}

/// Random background with `|L|, |R|` in `1..=4`, `|C|` in `0..=4` and shift
/// in `-3..=3`.
pub fn random_background(rng: &mut impl Rng) -> Background {
    Background::new(
        random_bits(rng, 1, 4),
        random_bits(rng, 0, 4),
        random_bits(rng, 1, 4),
        rng.gen_range(-3..=3),
    )
    .unwrap()
}

pub fn random_params(rng: &mut impl Rng, max: u32) -> Params {
    Params::new(rng.gen_range(0..=max), rng.gen_range(0..=max))
}

/// Plain recursive triangle-placing solver. Returns `true` for P.
pub struct NaiveTriangle<'a> {
    pub params: Params,
    pub tape: &'a dyn Tape,
    memo: HashMap<(i64, u32, u32), bool>,
}

impl<'a> NaiveTriangle<'a> {
    pub fn new(params: Params, tape: &'a dyn Tape) -> Self {
        NaiveTriangle {
            params,
            tape,
            memo: HashMap::new(),
        }
    }

    pub fn is_p(&mut self, x: i64, y: u32, h: u32) -> bool {
        if let Some(&v) = self.memo.get(&(x, y, h)) {
            return v;
        }
        let lo = x - i64::from(self.params.reach_left) - 1 - i64::from(h);
        let hi = x + i64::from(self.params.reach_right);
        let mut p = true;
        'outer: for nx in lo..=hi {
            for nh in 0..y {
                let ny = y - 1 - nh;
                if ny == 0 && (nx - i64::from(nh)..=nx).any(|i| self.tape.value(i)) {
                    continue;
                }
                if self.is_p(nx, ny, nh) {
                    p = false;
                    break 'outer;
                }
            }
        }
        self.memo.insert((x, y, h), p);
        p
    }
}
