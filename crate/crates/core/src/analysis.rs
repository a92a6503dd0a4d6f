//! Bounded evidence-gathering over spacetime diagrams.
//!
//! Eventual periodicity, convergence of two automata and the appearance of a
//! given row pattern are undecidable in general for these automata, so
//! nothing here claims a decision: every verdict is either a concrete
//! witness or a statement about the window that was actually scanned.

use thiserror::Error;

use crate::ca::{Background, CaError, CaSystem, Tape, Window, DEFAULT_CELL_BUDGET};
use crate::outcome::MismatchReport;
use crate::takeaway::{Position, TakeAway};

/// Row pattern whose appearance signals an F-glider in rule 110 ether.
pub const GLIDER_MARKER: &str = "01101001101000";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(
        "window [{given_lo}, {given_hi}] does not cover the required [{needed_lo}, {needed_hi}]"
    )]
    InsufficientWindow {
        needed_lo: i64,
        needed_hi: i64,
        given_lo: i64,
        given_hi: i64,
    },
    #[error("the two systems use different parameters")]
    ParamsMismatch,
    #[error("invalid bounds: {0}")]
    InvalidBounds(&'static str),
    #[error(transparent)]
    Ca(#[from] CaError),
}

/// A rectangle of the spacetime diagram: columns `x0 ..= x1`, rows
/// `y_from ..= y_to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub x0: i64,
    pub x1: i64,
    pub y_from: u32,
    pub y_to: u32,
}

impl Region {
    pub const fn new(x0: i64, x1: i64, y_from: u32, y_to: u32) -> Self {
        Region {
            x0,
            x1,
            y_from,
            y_to,
        }
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        if self.x0 > self.x1 {
            return Err(AnalysisError::InvalidBounds("x0 > x1"));
        }
        if self.y_from > self.y_to {
            return Err(AnalysisError::InvalidBounds("y_from > y_to"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodicityVerdict {
    /// `a_x^y = a_{x+drift}^{y+period}` held on every scanned cell with
    /// `y >= onset`.
    Periodic { drift: u32, period: u32, onset: u32 },
    UnknownWithinBounds {
        drift_max: u32,
        period_max: u32,
        rows: u32,
    },
}

/// Search space for [`detect_periodicity`].
///
/// Candidate `(period, drift)` pairs are tried with `period` ascending and
/// then `drift` ascending; the congruence is checked for every `x` in
/// `[x0, x1]` and every row `y` in `[burn_in, rows]`. A pair is accepted at
/// the smallest onset from which it holds through `rows`, provided that
/// leaves at least two full periods of evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodSearch {
    pub drift_max: u32,
    pub period_max: u32,
    pub burn_in: u32,
    pub rows: u32,
    pub x0: i64,
    pub x1: i64,
    pub budget: u64,
}

impl PeriodSearch {
    /// A search over the narrowest window [`detect_periodicity`] accepts.
    pub fn covering(
        sys: &CaSystem<Background>,
        drift_max: u32,
        period_max: u32,
        burn_in: u32,
        rows: u32,
    ) -> Self {
        let (x0, x1) = required_window(sys, rows);
        PeriodSearch {
            drift_max,
            period_max,
            burn_in,
            rows,
            x0,
            x1,
            budget: DEFAULT_CELL_BUDGET,
        }
    }
}

/// Columns a periodicity scan up to row `rows` must cover: everything the
/// non-periodic core of the background can influence by then, plus one full
/// tail period on each side.
pub fn required_window(sys: &CaSystem<Background>, rows: u32) -> (i64, i64) {
    let bg = sys.tape();
    let p = sys.params();
    let (core_lo, core_hi) = bg.core_span();
    let rows = i64::from(rows);
    (
        core_lo - rows * p.right_slope() - bg.left().len() as i64,
        core_hi + rows * p.left_slope() + bg.right().len() as i64,
    )
}

pub fn detect_periodicity(
    sys: &CaSystem<Background>,
    search: &PeriodSearch,
) -> Result<PeriodicityVerdict, AnalysisError> {
    if search.period_max == 0 {
        return Err(AnalysisError::InvalidBounds(
            "period_max must be at least 1",
        ));
    }
    if search.x0 > search.x1 {
        return Err(AnalysisError::InvalidBounds("x0 > x1"));
    }
    let (needed_lo, needed_hi) = required_window(sys, search.rows);
    if search.x0 > needed_lo || search.x1 < needed_hi {
        return Err(AnalysisError::InsufficientWindow {
            needed_lo,
            needed_hi,
            given_lo: search.x0,
            given_hi: search.x1,
        });
    }
    let window = sys.evolve_window_with_budget(
        search.x0,
        search.x1 + i64::from(search.drift_max),
        search.rows + search.period_max,
        search.budget,
    )?;
    let width = (search.x1 - search.x0 + 1) as usize;
    for period in 1..=search.period_max {
        for drift in 0..=search.drift_max {
            let holds = |y: u32| {
                let here = &window.row(y)[..width];
                let there = &window.row(y + period)[drift as usize..drift as usize + width];
                here == there
            };
            let onset = (search.burn_in..=search.rows)
                .rev()
                .find(|&y| !holds(y))
                .map_or(search.burn_in, |y| y + 1);
            if u64::from(onset) + 2 * u64::from(period) <= u64::from(search.rows) {
                return Ok(PeriodicityVerdict::Periodic {
                    drift,
                    period,
                    onset,
                });
            }
        }
    }
    Ok(PeriodicityVerdict::UnknownWithinBounds {
        drift_max: search.drift_max,
        period_max: search.period_max,
        rows: search.rows,
    })
}

/// Spatial period of game outcomes on super-critical tape-heaps for an
/// automaton with spacetime period `(drift, period)`: `drift + γ·period`.
/// The time period carries over unchanged.
pub fn transfer_period(drift: i64, period: u32, reach_right: u32) -> i64 {
    drift + i64::from(reach_right) * i64::from(period)
}

/// Bounds for [`check_game_periodicity`]: positions with `X <= tokens`,
/// `burn_in <= Y <= matches`, `m_p <= prev`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GamePeriodBounds {
    pub tokens: u32,
    pub matches: u32,
    pub prev: u32,
    pub burn_in: u32,
}

/// Compares `(X, Y, m_p)` with `(X + drift, Y + period, m_p)` wherever both
/// are super-critical. Mismatches record the shifted outcome as `observed`.
pub fn check_game_periodicity<T: Tape>(
    game: &TakeAway<T>,
    drift: u32,
    period: u32,
    bounds: GamePeriodBounds,
) -> Result<MismatchReport<Position>, AnalysisError> {
    if period == 0 {
        return Err(AnalysisError::InvalidBounds("period must be at least 1"));
    }
    let params = game.params();
    let mut report = MismatchReport::new();
    for y in bounds.burn_in..=bounds.matches {
        for mp in 0..=bounds.prev {
            for x in 0..=bounds.tokens {
                let pos = Position::new(x, y, mp);
                let shifted = Position::new(x + drift, y + period, mp);
                if pos.is_supercritical(params) && shifted.is_supercritical(params) {
                    report.record(pos, game.outcome(shifted), game.outcome(pos));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    /// The two automata differ at `(x, y)`.
    DivergenceWitness { x: i64, y: u32 },
    /// No difference inside the scanned region; not a proof of convergence.
    AgreeOnTested(Region),
}

/// Scans `region` row by row (ascending `y`, then `x`) for the first cell
/// where the two automata differ.
pub fn check_convergence<A: Tape, B: Tape>(
    a: &CaSystem<A>,
    b: &CaSystem<B>,
    region: Region,
) -> Result<ConvergenceVerdict, AnalysisError> {
    if a.params() != b.params() {
        return Err(AnalysisError::ParamsMismatch);
    }
    region.validate()?;
    let wa = a.evolve_window(region.x0, region.x1, region.y_to)?;
    let wb = b.evolve_window(region.x0, region.x1, region.y_to)?;
    for y in region.y_from..=region.y_to {
        if let Some(i) = wa.row(y).iter().zip(wb.row(y)).position(|(p, q)| p != q) {
            return Ok(ConvergenceVerdict::DivergenceWitness {
                x: region.x0 + i as i64,
                y,
            });
        }
    }
    Ok(ConvergenceVerdict::AgreeOnTested(region))
}

/// An occurrence of a pattern with its leftmost cell at `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternHit {
    pub y: u32,
    pub x: i64,
    /// The reversed pattern matched (never set for palindromes).
    pub reversed: bool,
}

/// All occurrences of `pattern` lying entirely inside `region`, ordered by
/// `(y, x)` with forward matches before reversed ones.
pub fn find_pattern<T: Tape>(
    sys: &CaSystem<T>,
    pattern: &[bool],
    include_reversed: bool,
    region: Region,
) -> Result<Vec<PatternHit>, AnalysisError> {
    if pattern.is_empty() {
        return Err(AnalysisError::InvalidBounds("pattern must be non-empty"));
    }
    region.validate()?;
    let window = sys.evolve_window(region.x0, region.x1, region.y_to)?;
    Ok(scan_window(
        &window,
        pattern,
        include_reversed,
        region.y_from,
    ))
}

fn scan_window(
    window: &Window,
    pattern: &[bool],
    include_reversed: bool,
    y_from: u32,
) -> Vec<PatternHit> {
    let reversed: Vec<bool> = pattern.iter().rev().copied().collect();
    let search_reversed = include_reversed && reversed != pattern;
    let mut hits = Vec::new();
    for y in y_from..=window.rows() {
        for (i, cells) in window.row(y).windows(pattern.len()).enumerate() {
            let x = window.x0() + i as i64;
            if cells == pattern {
                hits.push(PatternHit {
                    y,
                    x,
                    reversed: false,
                });
            }
            if search_reversed && cells == reversed.as_slice() {
                hits.push(PatternHit {
                    y,
                    x,
                    reversed: true,
                });
            }
        }
    }
    hits
}
