//! The triangle-placing game `T(A, γ, Γ)`.
//!
//! A position `(x, y, h)` is a triangle with its top at `(x, y + h)`, a
//! base-sensor on row `y - 1` over `x - (Γ + 1 + h) ..= x + γ`, and an
//! IRT-sensor: the isosceles right triangle with base `x - h ..= x` on row `y`
//! and top `(x, y + h)`. The next player places `(x', y - 1 - h', h')` with
//! its top on the previous base-sensor. A triangle may rest on row 0 only if
//! the tape is `0` under its IRT base.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::ca::{Background, CaSystem, Params, Tape};
use crate::outcome::{MismatchReport, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrianglePosition {
    pub x: i64,
    pub y: u32,
    pub h: u32,
}

impl TrianglePosition {
    pub const fn new(x: i64, y: u32, h: u32) -> Self {
        TrianglePosition { x, y, h }
    }

    pub fn top(&self) -> (i64, u32) {
        (self.x, self.y + self.h)
    }

    /// Columns covered by the base-sensor on row `y - 1`.
    pub fn base_sensor(&self, params: Params) -> (i64, i64) {
        (
            self.x - params.left_slope() - i64::from(self.h),
            self.x + params.right_slope(),
        )
    }
}

impl fmt::Display for TrianglePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.h)
    }
}

/// A placement `(x', h')`; the new triangle sits at `(x', y - 1 - h', h')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub x: i64,
    pub h: u32,
}

impl Placement {
    pub const fn new(x: i64, h: u32) -> Self {
        Placement { x, h }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={},h={}", self.x, self.h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlacementClause {
    /// The new top misses the previous base-sensor.
    Column,
    /// The new triangle would not fit above row 0.
    Height,
    /// A triangle on row 0 would cover a `1` of the tape.
    EndingCondition,
}

impl PlacementClause {
    pub fn code(self) -> &'static str {
        match self {
            PlacementClause::Column => "column",
            PlacementClause::Height => "height",
            PlacementClause::EndingCondition => "ending-condition",
        }
    }
}

impl fmt::Display for PlacementClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("illegal placement ({0})")]
    IllegalPlacement(PlacementClause),
}

/// Region for [`TriangleGame::verify_theorem`]: `x` in `[x_min, x_max]`,
/// `y <= y_max`, `h <= h_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleBounds {
    pub x_min: i64,
    pub x_max: i64,
    pub y_max: u32,
    pub h_max: u32,
}

impl TriangleBounds {
    pub fn positions(self) -> impl Iterator<Item = TrianglePosition> {
        (0..=self.y_max).flat_map(move |y| {
            (0..=self.h_max).flat_map(move |h| {
                (self.x_min..=self.x_max).map(move |x| TrianglePosition::new(x, y, h))
            })
        })
    }
}

#[derive(Debug, Clone)]
pub struct TriangleGame<T = Background> {
    ca: CaSystem<T>,
    memo: RefCell<HashMap<TrianglePosition, Outcome>>,
}

impl<T: Tape> TriangleGame<T> {
    pub fn new(params: Params, tape: T) -> Self {
        TriangleGame {
            ca: CaSystem::new(params, tape),
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> Params {
        self.ca.params()
    }

    pub fn automaton(&self) -> &CaSystem<T> {
        &self.ca
    }

    /// Heights allowed for a placement from row `y`: the new base `y - 1 - h'`
    /// must stay on the board. Zero height is allowed at every row; the
    /// winning reply is sometimes a single cell whose zero comes from an
    /// all-ones neighborhood below it.
    fn heights(y: u32) -> std::ops::RangeInclusive<u32> {
        if y == 0 {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        0..=y - 1
    }

    fn rests_on_zeros(&self, x: i64, h: u32) -> bool {
        (0..=i64::from(h)).all(|j| !self.ca.tape().value(x - j))
    }

    /// A triangle on row 0 must rest on zeros; anything above row 0 is a
    /// board position.
    pub fn is_valid(&self, pos: TrianglePosition) -> bool {
        pos.y > 0 || self.rests_on_zeros(pos.x, pos.h)
    }

    pub fn check_placement(
        &self,
        pos: TrianglePosition,
        mv: Placement,
    ) -> Result<(), PlacementClause> {
        let (lo, hi) = pos.base_sensor(self.params());
        if mv.x < lo || mv.x > hi {
            return Err(PlacementClause::Column);
        }
        if !Self::heights(pos.y).contains(&mv.h) {
            return Err(PlacementClause::Height);
        }
        if pos.y - 1 - mv.h == 0 && !self.rests_on_zeros(mv.x, mv.h) {
            return Err(PlacementClause::EndingCondition);
        }
        Ok(())
    }

    /// Legal placements, ascending in `x'` and then in `h'`.
    pub fn legal_moves(&self, pos: TrianglePosition) -> Vec<Placement> {
        let (lo, hi) = pos.base_sensor(self.params());
        let mut moves = Vec::new();
        for x in lo..=hi {
            for h in Self::heights(pos.y) {
                if pos.y - 1 - h == 0 && !self.rests_on_zeros(x, h) {
                    continue;
                }
                moves.push(Placement::new(x, h));
            }
        }
        moves
    }

    pub fn apply(
        &self,
        pos: TrianglePosition,
        mv: Placement,
    ) -> Result<TrianglePosition, TriangleError> {
        self.check_placement(pos, mv)
            .map_err(TriangleError::IllegalPlacement)?;
        Ok(successor(pos, mv))
    }

    pub fn outcome(&self, pos: TrianglePosition) -> Outcome {
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

    pub fn best_move(&self, pos: TrianglePosition) -> Option<Placement> {
        if self.outcome(pos).is_p() {
            return None;
        }
        self.legal_moves(pos)
            .into_iter()
            .find(|&mv| self.outcome(successor(pos, mv)).is_p())
    }

    /// P iff the IRT base `a_{x-h}^y ..= a_x^y` is all `0` and, for `y > 0`,
    /// the base-sensor on row `y - 1` is all `1`.
    pub fn predicate(&self, pos: TrianglePosition) -> Outcome {
        let irt_clear = (0..=i64::from(pos.h)).all(|j| !self.ca.cell(pos.x - j, pos.y));
        let sensor_set = pos.y == 0 || {
            let (lo, hi) = pos.base_sensor(self.params());
            (lo..=hi).all(|x| self.ca.cell(x, pos.y - 1))
        };
        Outcome::from_is_p(irt_clear && sensor_set)
    }

    pub fn verify_theorem(&self, bounds: TriangleBounds) -> MismatchReport<TrianglePosition> {
        self.verify_theorem_with(bounds, |game, pos| game.predicate(pos))
    }

    pub fn verify_theorem_with<F>(
        &self,
        bounds: TriangleBounds,
        predicate: F,
    ) -> MismatchReport<TrianglePosition>
    where
        F: Fn(&Self, TrianglePosition) -> Outcome,
    {
        let mut report = MismatchReport::new();
        for pos in bounds.positions().filter(|&p| self.is_valid(p)) {
            report.record(pos, self.outcome(pos), predicate(self, pos));
        }
        report
    }
}

fn successor(pos: TrianglePosition, mv: Placement) -> TrianglePosition {
    TrianglePosition::new(mv.x, pos.y - 1 - mv.h, mv.h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::parse_bits;

    fn rule_60() -> TriangleGame {
        TriangleGame::new(Params::RULE_60, Background::step())
    }

    #[test]
    fn placements() {
        let g = rule_60();
        assert!(g.legal_moves(TrianglePosition::new(5, 1, 2)).is_empty());
        assert_eq!(
            g.legal_moves(TrianglePosition::new(1, 1, 1)),
            vec![Placement::new(-1, 0), Placement::new(0, 0)]
        );
        assert!(g.legal_moves(TrianglePosition::new(3, 0, 4)).is_empty());
    }

    #[test]
    fn apply() {
        let g = rule_60();
        assert_eq!(
            g.apply(TrianglePosition::new(5, 3, 1), Placement::new(4, 2)),
            Err(TriangleError::IllegalPlacement(
                PlacementClause::EndingCondition
            ))
        );
        let zeros = TriangleGame::new(Params::RULE_60, Background::zeros());
        assert_eq!(
            zeros.apply(TrianglePosition::new(5, 3, 1), Placement::new(4, 2)),
            Ok(TrianglePosition::new(4, 0, 2))
        );
        assert_eq!(
            g.apply(TrianglePosition::new(1, 1, 1), Placement::new(0, 0)),
            Ok(TrianglePosition::new(0, 0, 0))
        );
        assert_eq!(
            g.apply(TrianglePosition::new(5, 1, 2), Placement::new(5, 0)),
            Err(TriangleError::IllegalPlacement(
                PlacementClause::EndingCondition
            ))
        );
        assert_eq!(
            g.apply(TrianglePosition::new(5, 1, 2), Placement::new(1, 0)),
            Err(TriangleError::IllegalPlacement(PlacementClause::Column))
        );
        assert_eq!(
            g.apply(TrianglePosition::new(5, 1, 2), Placement::new(3, 1)),
            Err(TriangleError::IllegalPlacement(PlacementClause::Height))
        );
    }

    #[test]
    fn outcomes_and_predicate() {
        let g = rule_60();
        assert_eq!(g.outcome(TrianglePosition::new(5, 1, 2)), Outcome::P);
        assert_eq!(g.predicate(TrianglePosition::new(5, 1, 2)), Outcome::P);
        assert_eq!(g.outcome(TrianglePosition::new(1, 1, 1)), Outcome::N);
        assert_eq!(g.predicate(TrianglePosition::new(1, 1, 1)), Outcome::N);
        assert_eq!(g.outcome(TrianglePosition::new(0, 0, 0)), Outcome::P);
        assert_eq!(
            g.best_move(TrianglePosition::new(1, 1, 1)),
            Some(Placement::new(-1, 0))
        );

        let zeros = TriangleGame::new(Params::new(2, 1), Background::zeros());
        for pos in [
            TrianglePosition::new(0, 1, 0),
            TrianglePosition::new(7, 4, 3),
        ] {
            assert_eq!(zeros.predicate(pos), Outcome::N);
        }
    }

    #[test]
    fn characterization_holds_on_sample_systems() {
        let bounds = TriangleBounds {
            x_min: -5,
            x_max: 20,
            y_max: 8,
            h_max: 4,
        };
        assert!(rule_60().verify_theorem(bounds).is_empty());
        let g = TriangleGame::new(
            Params::RULE_110_MIRROR,
            Background::finite(parse_bits("11010011101100").unwrap()),
        );
        let report = g.verify_theorem(bounds);
        assert!(
            report.is_empty(),
            "{:?}",
            &report.mismatches[..report.mismatches.len().min(5)]
        );
    }

    #[test]
    fn negated_predicate_is_caught() {
        let bounds = TriangleBounds {
            x_min: 0,
            x_max: 4,
            y_max: 3,
            h_max: 2,
        };
        let report = rule_60().verify_theorem_with(bounds, |g, p| g.predicate(p).flip());
        assert_eq!(report.mismatches.len(), report.checked);
    }
}
