//! Exact evaluation of `CA(A, γ, Γ)`.
//!
//! A cell at row `y > 0` is `0` iff its left and center parents on row
//! `y - 1` are both `0`, or all of its parents `x - Γ - 1 ..= x + γ` are `1`.
//! Otherwise it is `1`. With `γ = Γ = 0` this is `left XOR center`
//! (Wolfram rule 60); with `γ = 1, Γ = 0` it is Wolfram code 124, the
//! left-right mirror image of rule 110.
//!
//! The printed update condition reads `a_{x-1} = a_i = 0`; the second index is
//! taken to be the center cell `x`, the only reading that reduces to the XOR
//! rule when both reaches are zero.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Default guard on the number of cells a single window evolution may touch.
pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

/// Cone size above which [`CaSystem::cell`] evaluates a miss by sweeping its
/// dependency cone instead of recursing through the memo.
const DIRECT_THRESHOLD: u64 = 1 << 16;

/// Default cap on the neighborhood width for which a full rule table is built.
pub const DEFAULT_TABLE_CAP: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaError {
    #[error("invalid bit {found:?} at offset {offset}; expected '0' or '1'")]
    InvalidBit { found: char, offset: usize },
    #[error("the {0} word of a background must be non-empty")]
    EmptyWord(&'static str),
    #[error("empty window: x0 = {x0} is greater than x1 = {x1}")]
    EmptyWindow { x0: i64, x1: i64 },
    #[error("window evolution needs {requested} cells, over the budget of {budget}")]
    WindowTooLarge { requested: u64, budget: u64 },
    #[error("rule table over {bits} neighborhood bits exceeds the cap of {cap}")]
    TableTooLarge { bits: u32, cap: u32 },
}

/// Parses a string over `{0, 1}`, index 0 first.
pub fn parse_bits(s: &str) -> Result<Vec<bool>, CaError> {
    s.chars()
        .enumerate()
        .map(|(offset, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            found => Err(CaError::InvalidBit { found, offset }),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// The two reach parameters of the automaton.
///
/// A cell's parents on the previous row are `x - reach_left - 1 ..= x + reach_right`,
/// so `reach_right` is `γ` and `reach_left` is `Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Params {
    pub reach_right: u32,
    pub reach_left: u32,
}

impl Params {
    pub const fn new(reach_right: u32, reach_left: u32) -> Self {
        Params {
            reach_right,
            reach_left,
        }
    }

    /// Rule 60: `γ = Γ = 0`.
    pub const RULE_60: Params = Params::new(0, 0);
    /// Mirrored rule 110: `γ = 1, Γ = 0`.
    pub const RULE_110_MIRROR: Params = Params::new(1, 0);

    /// Number of parents, `Γ + γ + 2`.
    pub fn window_len(&self) -> usize {
        self.reach_left as usize + self.reach_right as usize + 2
    }

    /// How far the dependency cone widens to the left per row, `Γ + 1`.
    pub fn left_slope(&self) -> i64 {
        i64::from(self.reach_left) + 1
    }

    /// How far the dependency cone widens to the right per row, `γ`.
    pub fn right_slope(&self) -> i64 {
        i64::from(self.reach_right)
    }

    /// Applies the update rule to the parents `x - Γ - 1 ..= x + γ`.
    pub fn apply(&self, parents: &[bool]) -> bool {
        debug_assert_eq!(parents.len(), self.window_len());
        let center = self.reach_left as usize + 1;
        let quiet = !parents[center - 1] && !parents[center];
        let saturated = parents.iter().all(|&b| b);
        !(quiet || saturated)
    }

    /// Tape interval `[lo, hi]` that determines cell `(x, y)`.
    pub fn dependency_cone(&self, x: i64, y: u32) -> (i64, i64) {
        let y = i64::from(y);
        (x - y * self.left_slope(), x + y * self.right_slope())
    }
}

/// A doubly infinite binary string, read by integer position.
pub trait Tape {
    fn value(&self, x: i64) -> bool;

    /// True when every position `x <= 0` is known to hold `0`.
    fn zero_left_of_origin(&self) -> bool {
        false
    }
}

impl<T: Tape + ?Sized> Tape for &T {
    fn value(&self, x: i64) -> bool {
        (**self).value(x)
    }

    fn zero_left_of_origin(&self) -> bool {
        (**self).zero_left_of_origin()
    }
}

/// The string `...LLL C RRR...`, shifted by `shift`.
///
/// With `shift = 0`, `C` occupies positions `1 ..= |C|`, `R` repeats from
/// `|C| + 1` rightward and `L` repeats leftward ending at position `0`
/// (position `0` holds the last symbol of `L`). In general the value at `x`
/// is the unshifted value at `x + shift`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Background {
    left: Vec<bool>,
    center: Vec<bool>,
    right: Vec<bool>,
    shift: i64,
}

impl Background {
    pub fn new(
        left: Vec<bool>,
        center: Vec<bool>,
        right: Vec<bool>,
        shift: i64,
    ) -> Result<Self, CaError> {
        if left.is_empty() {
            return Err(CaError::EmptyWord("left"));
        }
        if right.is_empty() {
            return Err(CaError::EmptyWord("right"));
        }
        Ok(Background {
            left,
            center,
            right,
            shift,
        })
    }

    pub fn parse(left: &str, center: &str, right: &str, shift: i64) -> Result<Self, CaError> {
        Background::new(
            parse_bits(left)?,
            parse_bits(center)?,
            parse_bits(right)?,
            shift,
        )
    }

    /// `...000111...` with the first `1` at position 1.
    pub fn step() -> Self {
        Background::new(vec![false], Vec::new(), vec![true], 0).unwrap()
    }

    pub fn zeros() -> Self {
        Background::new(vec![false], Vec::new(), vec![false], 0).unwrap()
    }

    pub fn ones() -> Self {
        Background::new(vec![true], Vec::new(), vec![true], 0).unwrap()
    }

    /// Zeros on both sides with `center` at positions `1 ..= |center|`.
    pub fn finite(center: Vec<bool>) -> Self {
        Background::new(vec![false], center, vec![false], 0).unwrap()
    }

    pub fn left(&self) -> &[bool] {
        &self.left
    }

    pub fn center(&self) -> &[bool] {
        &self.center
    }

    pub fn right(&self) -> &[bool] {
        &self.right
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn with_shift(&self, shift: i64) -> Self {
        Background {
            shift,
            ..self.clone()
        }
    }

    /// Positions not covered by the periodic tails alone: the last `L` cell,
    /// all of `C` and the first `R` cell.
    pub fn core_span(&self) -> (i64, i64) {
        (-self.shift, self.center.len() as i64 + 1 - self.shift)
    }

    fn unshifted(&self, p: i64) -> bool {
        let c = self.center.len() as i64;
        if p <= 0 {
            let n = self.left.len() as i64;
            self.left[(n - 1 - (-p).rem_euclid(n)) as usize]
        } else if p <= c {
            self.center[(p - 1) as usize]
        } else {
            self.right[(p - c - 1).rem_euclid(self.right.len() as i64) as usize]
        }
    }
}

impl Tape for Background {
    fn value(&self, x: i64) -> bool {
        self.unshifted(x + self.shift)
    }

    fn zero_left_of_origin(&self) -> bool {
        // x <= 0 reads unshifted positions p <= shift.
        self.left.iter().all(|&b| !b) && (1..=self.shift).all(|p| !self.unshifted(p))
    }
}

impl fmt::Display for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})* {} ({})* shift {}",
            format_bits(&self.left),
            format_bits(&self.center),
            format_bits(&self.right),
            self.shift
        )
    }
}

/// A tape with finitely many positions overridden.
#[derive(Debug, Clone)]
pub struct Patched<T> {
    base: T,
    patches: HashMap<i64, bool>,
}

impl<T: Tape> Patched<T> {
    pub fn new(base: T) -> Self {
        Patched {
            base,
            patches: HashMap::new(),
        }
    }

    pub fn set(&mut self, x: i64, value: bool) -> &mut Self {
        self.patches.insert(x, value);
        self
    }

    pub fn flip(&mut self, x: i64) -> &mut Self {
        let v = self.value(x);
        self.set(x, !v)
    }
}

impl<T: Tape> Tape for Patched<T> {
    fn value(&self, x: i64) -> bool {
        match self.patches.get(&x) {
            Some(&v) => v,
            None => self.base.value(x),
        }
    }
}

/// `CA(A, γ, Γ)` over a tape, with a memo of evaluated cells.
///
/// The memo makes the system `!Sync`; concurrent readers should each hold
/// their own clone.
#[derive(Debug, Clone)]
pub struct CaSystem<T = Background> {
    params: Params,
    tape: T,
    memo: RefCell<HashMap<(i64, u32), bool>>,
}

impl<T: Tape> CaSystem<T> {
    pub fn new(params: Params, tape: T) -> Self {
        CaSystem {
            params,
            tape,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn tape(&self) -> &T {
        &self.tape
    }

    pub fn into_tape(self) -> T {
        self.tape
    }

    /// Value of `a_x^y`, memoized.
    pub fn cell(&self, x: i64, y: u32) -> bool {
        if y == 0 {
            return self.tape.value(x);
        }
        if let Some(&v) = self.memo.borrow().get(&(x, y)) {
            return v;
        }
        if window_work(self.params, x, x, y) > DIRECT_THRESHOLD {
            // Large cones are cheaper to sweep row by row than to memoize cell
            // by cell.
            let v = self.cell_direct(x, y);
            self.memo.borrow_mut().insert((x, y), v);
            return v;
        }
        let mut memo = self.memo.borrow_mut();
        let left = self.params.left_slope();
        let right = self.params.right_slope();
        let mut parents = Vec::with_capacity(self.params.window_len());
        // Explicit stack: the recursion depth would otherwise be `y`.
        let mut stack = vec![(x, y)];
        while let Some(&(cx, cy)) = stack.last() {
            if memo.contains_key(&(cx, cy)) {
                stack.pop();
                continue;
            }
            parents.clear();
            let mut missing = false;
            for px in cx - left..=cx + right {
                if cy == 1 {
                    parents.push(self.tape.value(px));
                } else if let Some(&v) = memo.get(&(px, cy - 1)) {
                    parents.push(v);
                } else {
                    missing = true;
                    stack.push((px, cy - 1));
                }
            }
            if !missing {
                memo.insert((cx, cy), self.params.apply(&parents));
                stack.pop();
            }
        }
        memo[&(x, y)]
    }

    /// Value of `a_x^y` evolved from its dependency cone on row 0, bypassing
    /// the memo.
    pub fn cell_direct(&self, x: i64, y: u32) -> bool {
        let (lo, hi) = self.params.dependency_cone(x, y);
        let mut row: Vec<bool> = (lo..=hi).map(|p| self.tape.value(p)).collect();
        for _ in 0..y {
            row = step_row(self.params, &row);
        }
        debug_assert_eq!(row.len(), 1);
        row[0]
    }

    pub fn cached_cells(&self) -> usize {
        self.memo.borrow().len()
    }

    /// Evolves rows `0 ..= rows` over `[x0, x1]` with the default cell budget.
    pub fn evolve_window(&self, x0: i64, x1: i64, rows: u32) -> Result<Window, CaError> {
        self.evolve_window_with_budget(x0, x1, rows, DEFAULT_CELL_BUDGET)
    }

    /// Evolves rows `0 ..= rows` over `[x0, x1]`.
    ///
    /// Row 0 is read over the widened base `[x0 - rows(Γ+1), x1 + rows·γ]`
    /// and each update shrinks the row by the cone slopes, so every cell of
    /// the result is exact.
    pub fn evolve_window_with_budget(
        &self,
        x0: i64,
        x1: i64,
        rows: u32,
        budget: u64,
    ) -> Result<Window, CaError> {
        if x0 > x1 {
            return Err(CaError::EmptyWindow { x0, x1 });
        }
        let requested = window_work(self.params, x0, x1, rows);
        if requested > budget {
            return Err(CaError::WindowTooLarge { requested, budget });
        }
        let width = (x1 - x0 + 1) as usize;
        let mut cells = Vec::with_capacity(width * (rows as usize + 1));
        let (mut lo, hi) = (
            x0 - i64::from(rows) * self.params.left_slope(),
            x1 + i64::from(rows) * self.params.right_slope(),
        );
        let mut row: Vec<bool> = (lo..=hi).map(|p| self.tape.value(p)).collect();
        for y in 0..=rows {
            let start = (x0 - lo) as usize;
            cells.extend_from_slice(&row[start..start + width]);
            if y < rows {
                row = step_row(self.params, &row);
                lo += self.params.left_slope();
            }
        }
        Ok(Window {
            x0,
            x1,
            rows,
            cells,
        })
    }
}

/// Total number of cells touched by [`CaSystem::evolve_window`].
pub fn window_work(params: Params, x0: i64, x1: i64, rows: u32) -> u64 {
    let width = (x1 - x0 + 1).max(0) as u64;
    let rows = u64::from(rows);
    let growth = (params.left_slope() + params.right_slope()) as u64;
    (rows + 1)
        .saturating_mul(width)
        .saturating_add(rows.saturating_mul(rows + 1) / 2 * growth)
}

/// One update over a row segment; the result is `window_len - 1` cells shorter.
fn step_row(params: Params, row: &[bool]) -> Vec<bool> {
    let n = params.window_len();
    if row.len() < n {
        return Vec::new();
    }
    let center = params.reach_left as usize + 1;
    let mut out = Vec::with_capacity(row.len() + 1 - n);
    let mut ones = row[..n].iter().filter(|&&b| b).count();
    for i in 0..=row.len() - n {
        if i > 0 {
            ones = ones - usize::from(row[i - 1]) + usize::from(row[i + n - 1]);
        }
        let quiet = !row[i + center - 1] && !row[i + center];
        out.push(!(quiet || ones == n));
    }
    out
}

/// A rectangle of the spacetime diagram, rows `0 ..= rows` by `[x0, x1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    x0: i64,
    x1: i64,
    rows: u32,
    cells: Vec<bool>,
}

impl Window {
    /// Builds a window from row-major cells, row 0 first.
    pub fn from_cells(x0: i64, x1: i64, rows: u32, cells: Vec<bool>) -> Result<Self, CaError> {
        if x0 > x1 {
            return Err(CaError::EmptyWindow { x0, x1 });
        }
        assert_eq!(
            cells.len(),
            (x1 - x0 + 1) as usize * (rows as usize + 1),
            "cell count does not match shape"
        );
        Ok(Window {
            x0,
            x1,
            rows,
            cells,
        })
    }

    pub fn x0(&self) -> i64 {
        self.x0
    }

    pub fn x1(&self) -> i64 {
        self.x1
    }

    /// The last row index; the window holds `rows + 1` rows.
    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn width(&self) -> usize {
        (self.x1 - self.x0 + 1) as usize
    }

    pub fn row(&self, y: u32) -> &[bool] {
        let w = self.width();
        let start = y as usize * w;
        &self.cells[start..start + w]
    }

    pub fn get(&self, x: i64, y: u32) -> bool {
        assert!(
            x >= self.x0 && x <= self.x1 && y <= self.rows,
            "({x}, {y}) outside window"
        );
        self.row(y)[(x - self.x0) as usize]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }
}

/// Output bit for each neighborhood `x - Γ - 1 ..= x + γ`.
///
/// Neighborhood index bits are read with the leftmost parent as the most
/// significant bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    params: Params,
    outputs: Vec<bool>,
}

impl RuleTable {
    pub fn new(params: Params) -> Result<Self, CaError> {
        Self::with_cap(params, DEFAULT_TABLE_CAP)
    }

    pub fn with_cap(params: Params, cap: u32) -> Result<Self, CaError> {
        let bits = params.window_len() as u32;
        if bits > cap {
            return Err(CaError::TableTooLarge { bits, cap });
        }
        let n = params.window_len();
        let mut parents = vec![false; n];
        let outputs = (0..1usize << n)
            .map(|index| {
                for (i, p) in parents.iter_mut().enumerate() {
                    *p = (index >> (n - 1 - i)) & 1 == 1;
                }
                params.apply(&parents)
            })
            .collect();
        Ok(RuleTable { params, outputs })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn lookup(&self, parents: &[bool]) -> bool {
        let index = parents
            .iter()
            .fold(0usize, |acc, &b| acc << 1 | usize::from(b));
        self.outputs[index]
    }

    /// Wolfram code when the neighborhood fits `(x-1, x, x+1)`, i.e. `Γ = 0`
    /// and `γ <= 1`. With `γ = 0` the right neighbor is ignored.
    pub fn wolfram_code(&self) -> Option<u8> {
        if self.params.reach_left != 0 || self.params.reach_right > 1 {
            return None;
        }
        let mut code = 0u8;
        for index in 0..8usize {
            let out = if self.params.reach_right == 1 {
                self.outputs[index]
            } else {
                self.outputs[index >> 1]
            };
            if out {
                code |= 1 << index;
            }
        }
        Some(code)
    }
}
