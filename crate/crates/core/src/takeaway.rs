//! The move-size dynamic take-away game `G(A, γ, Γ)`.
//!
//! A position `(X, Y, m_p)` has `X` ordered tokens (token `i` is black iff
//! the tape holds `1` at `i`; token 1 is at the bottom), `Y` matches, and
//! `m_p`, the number of matches the previous player removed. A move removes
//! `t` tokens from the top and `m >= 1` matches, where
//!
//! * `γ(m-1) <= t <= γm + m_p + Γ` and `t <= X`, or `t = X` when
//!   `X < γ(m-1)`;
//! * taking the last match (`m = Y`) requires the top `min(Y, X - t)`
//!   remaining tokens to be white.
//!
//! A player who cannot move loses. Position `(x + γy, y, m_p)` is P exactly
//! when the automaton column `a_x^y ..= a_x^{y+m_p-1}` is all zero and, for
//! `y > 0`, `a_x^{y-1} = 1`; [`TakeAway::predicate`] computes that
//! condition and [`TakeAway::verify_theorem`] checks it against the solver.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ca::{Background, CaSystem, Params, Tape};
use crate::outcome::{MismatchReport, Outcome};

/// Game state: token count `X`, match count `Y` and previous match count `m_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub tokens: u32,
    pub matches: u32,
    pub prev: u32,
}

impl Position {
    pub const fn new(tokens: u32, matches: u32, prev: u32) -> Self {
        Position {
            tokens,
            matches,
            prev,
        }
    }

    /// Automaton column `x = X - γY` read by this position.
    pub fn column(&self, params: Params) -> i64 {
        i64::from(self.tokens) - i64::from(params.reach_right) * i64::from(self.matches)
    }

    /// `X >= (Γ + γ + 1)Y + m_p`: no line of play can empty the tape-heap
    /// before the time-heap.
    pub fn is_supercritical(&self, params: Params) -> bool {
        let slope = u64::from(params.reach_left) + u64::from(params.reach_right) + 1;
        u64::from(self.tokens) >= slope * u64::from(self.matches) + u64::from(self.prev)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.tokens, self.matches, self.prev)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub tokens: u32,
    pub matches: u32,
}

impl Move {
    pub const fn new(tokens: u32, matches: u32) -> Self {
        Move { tokens, matches }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={},m={}", self.tokens, self.matches)
    }
}

/// The rule a rejected move breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IllegalClause {
    /// `m` is zero or exceeds the matches left.
    MatchRange,
    /// `t` is outside the window allowed by `m` and `m_p`.
    TokenRange,
    /// Taking the last match would leave a black token among the top `Y`.
    BlackToken,
}

impl IllegalClause {
    pub fn code(self) -> &'static str {
        match self {
            IllegalClause::MatchRange => "match-range",
            IllegalClause::TokenRange => "token-range",
            IllegalClause::BlackToken => "black-token",
        }
    }
}

impl fmt::Display for IllegalClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("illegal move ({0})")]
    IllegalMove(IllegalClause),
    #[error(
        "position {0} has no matches but m_p > 0; the automaton predicate is not defined there"
    )]
    OutOfVerifiedDomain(Position),
}

/// Why a claimed optimal path is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathFailure {
    Illegal(IllegalClause),
    /// The winning side was asked to move from a P-position.
    NotNBeforeWinnerMove,
    /// A move by the winning side did not land on a P-position.
    NotPAfterWinnerMove,
}

impl fmt::Display for PathFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFailure::Illegal(clause) => write!(f, "illegal ({clause})"),
            PathFailure::NotNBeforeWinnerMove => f.write_str("not-N-before-winner-move"),
            PathFailure::NotPAfterWinnerMove => f.write_str("not-P-after-winner-move"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathVerdict {
    Optimal,
    FailureAt { index: usize, reason: PathFailure },
}

/// Region bounds for [`TakeAway::verify_theorem`]: `X <= tokens`,
/// `Y <= matches`, `m_p <= prev`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub tokens: u32,
    pub matches: u32,
    pub prev: u32,
}

impl Bounds {
    pub const fn new(tokens: u32, matches: u32, prev: u32) -> Self {
        Bounds {
            tokens,
            matches,
            prev,
        }
    }

    pub fn positions(self) -> impl Iterator<Item = Position> {
        (0..=self.matches).flat_map(move |y| {
            (0..=self.prev)
                .flat_map(move |mp| (0..=self.tokens).map(move |x| Position::new(x, y, mp)))
        })
    }
}

/// A take-away game over a fixed coloring, with solver and automaton memos.
#[derive(Debug, Clone)]
pub struct TakeAway<T = Background> {
    ca: CaSystem<T>,
    memo: RefCell<HashMap<Position, Outcome>>,
}

impl<T: Tape> TakeAway<T> {
    pub fn new(params: Params, tape: T) -> Self {
        TakeAway {
            ca: CaSystem::new(params, tape),
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> Params {
        self.ca.params()
    }

    pub fn tape(&self) -> &T {
        self.ca.tape()
    }

    pub fn automaton(&self) -> &CaSystem<T> {
        &self.ca
    }

    /// Whether token `i` (1-based, from the bottom) is black.
    pub fn is_black(&self, i: u32) -> bool {
        self.ca.tape().value(i64::from(i))
    }

    fn top_is_white(&self, remaining: u32, depth: u32) -> bool {
        let k = depth.min(remaining);
        (remaining - k + 1..=remaining).all(|i| !self.is_black(i))
    }

    fn token_window(&self, pos: Position, m: u32) -> (u64, u64) {
        let p = self.params();
        let gamma = u64::from(p.reach_right);
        let lo = gamma * u64::from(m - 1);
        let hi = gamma * u64::from(m) + u64::from(pos.prev) + u64::from(p.reach_left);
        (lo, hi)
    }

    pub fn check_move(&self, pos: Position, mv: Move) -> Result<(), IllegalClause> {
        let Move {
            tokens: t,
            matches: m,
        } = mv;
        if m == 0 || m > pos.matches {
            return Err(IllegalClause::MatchRange);
        }
        let (lo, hi) = self.token_window(pos, m);
        let (t64, x64) = (u64::from(t), u64::from(pos.tokens));
        let in_window = lo <= t64 && t64 <= hi && t <= pos.tokens;
        let clear_all = t == pos.tokens && x64 < lo;
        if !(in_window || clear_all) {
            return Err(IllegalClause::TokenRange);
        }
        if m == pos.matches && !self.top_is_white(pos.tokens - t, pos.matches) {
            return Err(IllegalClause::BlackToken);
        }
        Ok(())
    }

    /// All legal moves, ascending in `m` and then in `t`.
    pub fn legal_moves(&self, pos: Position) -> Vec<Move> {
        let mut moves = Vec::new();
        for m in 1..=pos.matches {
            let (lo, hi) = self.token_window(pos, m);
            let x = u64::from(pos.tokens);
            let range = if x < lo { x..=x } else { lo..=hi.min(x) };
            for t in range {
                let t = t as u32;
                if m == pos.matches && !self.top_is_white(pos.tokens - t, pos.matches) {
                    continue;
                }
                moves.push(Move::new(t, m));
            }
        }
        moves
    }

    pub fn apply(&self, pos: Position, mv: Move) -> Result<Position, GameError> {
        self.check_move(pos, mv).map_err(GameError::IllegalMove)?;
        Ok(successor(pos, mv))
    }

    /// Normal-play outcome by memoized search over `(X, Y, m_p)`.
    pub fn outcome(&self, pos: Position) -> Outcome {
        if let Some(&o) = self.memo.borrow().get(&pos) {
            return o;
        }
        let mut memo = self.memo.borrow_mut();
        let mut stack = vec![pos];
        let mut pending = Vec::new();
        while let Some(&cur) = stack.last() {
            if memo.contains_key(&cur) {
                stack.pop();
                continue;
            }
            pending.clear();
            let mut result = Outcome::P;
            for mv in self.legal_moves(cur) {
                let next = successor(cur, mv);
                match memo.get(&next) {
                    Some(Outcome::P) => {
                        result = Outcome::N;
                        break;
                    }
                    Some(Outcome::N) => {}
                    None => pending.push(next),
                }
            }
            if result == Outcome::N || pending.is_empty() {
                memo.insert(cur, result);
                stack.pop();
            } else {
                stack.append(&mut pending);
            }
        }
        memo[&pos]
    }

    /// First move (in [`legal_moves`](Self::legal_moves) order) to a
    /// P-position; `None` exactly when `pos` is P.
    pub fn best_move(&self, pos: Position) -> Option<Move> {
        if self.outcome(pos).is_p() {
            return None;
        }
        self.legal_moves(pos)
            .into_iter()
            .find(|&mv| self.outcome(successor(pos, mv)).is_p())
    }

    pub fn solved_positions(&self) -> usize {
        self.memo.borrow().len()
    }

    /// The automaton characterization of P-positions.
    ///
    /// With `x = X - γY`, the position is P iff `a_x^{Y+i} = 0` for
    /// `0 <= i < m_p` and, when `Y > 0`, `a_x^{Y-1} = 1`. Positions with no
    /// matches and `m_p > 0` cannot arise from play and are rejected.
    pub fn predicate(&self, pos: Position) -> Result<Outcome, GameError> {
        if pos.matches == 0 && pos.prev > 0 {
            return Err(GameError::OutOfVerifiedDomain(pos));
        }
        let x = pos.column(self.params());
        let y = pos.matches;
        let column_clear = (0..pos.prev).all(|i| !self.ca.cell(x, y + i));
        let base_set = y == 0 || self.ca.cell(x, y - 1);
        Ok(Outcome::from_is_p(column_clear && base_set))
    }

    /// Whether the predicate is claimed for `pos` on this tape: always when
    /// the tape is zero at positions `<= 0`, otherwise only for
    /// `X - γY >= (Γ + 1)Y + m_p`.
    ///
    /// Opening positions (`Y > 0`, `m_p = 0`) are excluded unless
    /// `γ = Γ = 0`: with an empty column nothing forces the cells beside
    /// `a_x^{Y-1}` to be 1, and the predicate fails there.
    pub fn in_verified_region(&self, pos: Position) -> bool {
        if pos.matches == 0 && pos.prev > 0 {
            return false;
        }
        let p = self.params();
        if pos.matches > 0 && pos.prev == 0 && p != Params::RULE_60 {
            return false;
        }
        if self.tape().zero_left_of_origin() {
            return true;
        }
        pos.column(p) >= p.left_slope() * i64::from(pos.matches) + i64::from(pos.prev)
    }

    /// Compares [`outcome`](Self::outcome) with [`predicate`](Self::predicate)
    /// on every position of the verified region within `bounds`.
    pub fn verify_theorem(&self, bounds: Bounds) -> MismatchReport<Position> {
        self.verify_theorem_with(bounds, |game, pos| {
            game.predicate(pos)
                .expect("region excludes undefined positions")
        })
    }

    /// As [`verify_theorem`](Self::verify_theorem) with a caller-supplied
    /// reference predicate.
    pub fn verify_theorem_with<F>(&self, bounds: Bounds, predicate: F) -> MismatchReport<Position>
    where
        F: Fn(&Self, Position) -> Outcome,
    {
        let mut report = MismatchReport::new();
        for pos in bounds.positions().filter(|&p| self.in_verified_region(p)) {
            report.record(pos, self.outcome(pos), predicate(self, pos));
        }
        report
    }

    /// Checks that `path`, played from `start`, is optimal for the side that
    /// makes its final move: every move is legal, and that side only moves
    /// from N-positions to P-positions.
    pub fn verify_path(&self, start: Position, path: &[Move]) -> PathVerdict {
        let winner_parity = (path.len() + 1) % 2;
        let mut pos = start;
        for (index, &mv) in path.iter().enumerate() {
            if let Err(clause) = self.check_move(pos, mv) {
                return PathVerdict::FailureAt {
                    index,
                    reason: PathFailure::Illegal(clause),
                };
            }
            let next = successor(pos, mv);
            if index % 2 == winner_parity {
                if self.outcome(pos).is_p() {
                    return PathVerdict::FailureAt {
                        index,
                        reason: PathFailure::NotNBeforeWinnerMove,
                    };
                }
                if !self.outcome(next).is_p() {
                    return PathVerdict::FailureAt {
                        index,
                        reason: PathFailure::NotPAfterWinnerMove,
                    };
                }
            }
            pos = next;
        }
        PathVerdict::Optimal
    }
}

fn successor(pos: Position, mv: Move) -> Position {
    Position::new(pos.tokens - mv.tokens, pos.matches - mv.matches, mv.matches)
}
