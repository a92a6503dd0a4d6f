//! Operations shared by the command line and the HTTP service. Each returns
//! a serializable result or an [`ApiError`], so both front ends emit the
//! same JSON for the same inputs.

use cagame::analysis::{
    self, AnalysisError, ConvergenceVerdict, PeriodSearch, PeriodicityVerdict, Region,
};
use cagame::ca::window_work;
use cagame::takeaway::Bounds;
use cagame::triangle::TriangleBounds;
use cagame::{
    CaError, CaSystem, GameError, Move, Outcome, Params, PathFailure, PathVerdict, Position,
    TakeAway, TriangleGame, TrianglePosition,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spec::SpecDocument;

pub const DEFAULT_CELL_BUDGET: u64 = cagame::ca::DEFAULT_CELL_BUDGET;
/// Upper bound on the solver states a single request may explore.
pub const DEFAULT_STATE_BUDGET: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The request itself is unusable: bad JSON, bad bits, inverted bounds.
    Malformed,
    /// Well-formed, but the game or automaton rules refuse it.
    Domain,
    /// Refused by a resource guard.
    Resource,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{code}: {message}")]
pub struct ApiError {
    #[serde(skip)]
    pub kind: ErrorKind,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<&'static str>,
}

impl ApiError {
    pub fn malformed(code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            kind: ErrorKind::Malformed,
            code,
            message: message.into(),
            clause: None,
        }
    }

    pub fn domain(code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            kind: ErrorKind::Domain,
            code,
            message: message.into(),
            clause: None,
        }
    }

    pub fn resource(message: impl Into<String>) -> Self {
        ApiError {
            kind: ErrorKind::Resource,
            code: "resource-limit",
            message: message.into(),
            clause: None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Malformed | ErrorKind::Domain => 1,
            ErrorKind::Resource => 2,
        }
    }

    pub fn http_status(&self) -> u16 {
        match self.kind {
            ErrorKind::Malformed => 400,
            ErrorKind::Domain | ErrorKind::Resource => 422,
        }
    }
}

impl From<CaError> for ApiError {
    fn from(e: CaError) -> Self {
        match e {
            CaError::WindowTooLarge { .. } | CaError::TableTooLarge { .. } => {
                ApiError::resource(e.to_string())
            }
            CaError::EmptyWindow { .. } => ApiError::malformed("invalid-bounds", e.to_string()),
            CaError::InvalidBit { .. } | CaError::EmptyWord(_) => {
                ApiError::malformed("malformed-spec", e.to_string())
            }
        }
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Ca(e) => e.into(),
            AnalysisError::InvalidBounds(_) => ApiError::malformed("invalid-bounds", e.to_string()),
            AnalysisError::InsufficientWindow { .. } => {
                ApiError::domain("insufficient-window", e.to_string())
            }
            AnalysisError::ParamsMismatch => ApiError::domain("params-mismatch", e.to_string()),
        }
    }
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::IllegalMove(clause) => ApiError {
                kind: ErrorKind::Domain,
                code: "illegal-move",
                message: e.to_string(),
                clause: Some(clause.code()),
            },
            GameError::OutOfVerifiedDomain(_) => ApiError::domain("out-of-domain", e.to_string()),
        }
    }
}

/// Resource limits applied to one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub cells: u64,
    pub states: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cells: DEFAULT_CELL_BUDGET,
            states: DEFAULT_STATE_BUDGET,
        }
    }
}

impl Limits {
    fn check_states(&self, states: u64) -> Result<(), ApiError> {
        if states > self.states {
            return Err(ApiError::resource(format!(
                "about {states} solver states needed, budget is {}",
                self.states
            )));
        }
        Ok(())
    }

    fn check_cells(&self, params: Params, x0: i64, x1: i64, rows: u32) -> Result<(), ApiError> {
        let work = window_work(params, x0, x1, rows);
        if work > self.cells {
            return Err(CaError::WindowTooLarge {
                requested: work,
                budget: self.cells,
            }
            .into());
        }
        Ok(())
    }
}

fn takeaway_states(tokens: u32, matches: u32, prev: u32) -> u64 {
    let (x, y, mp) = (u64::from(tokens), u64::from(matches), u64::from(prev));
    (x + 1) * (y + 1) * (y.max(mp) + 1)
}

fn triangle_states(params: Params, width: u64, y: u32, h: u32) -> u64 {
    let y = u64::from(y);
    let slope = (params.left_slope() + params.right_slope()) as u64;
    (width + slope * (y + 1) + u64::from(h) + 1) * (y + 1) * (y + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionDoc {
    #[serde(rename = "X")]
    pub tokens: u32,
    #[serde(rename = "Y")]
    pub matches: u32,
    pub mp: u32,
}

impl From<PositionDoc> for Position {
    fn from(p: PositionDoc) -> Self {
        Position::new(p.tokens, p.matches, p.mp)
    }
}

impl From<Position> for PositionDoc {
    fn from(p: Position) -> Self {
        PositionDoc {
            tokens: p.tokens,
            matches: p.matches,
            mp: p.prev,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveDoc {
    pub t: u32,
    pub m: u32,
}

impl From<MoveDoc> for Move {
    fn from(m: MoveDoc) -> Self {
        Move::new(m.t, m.m)
    }
}

impl From<Move> for MoveDoc {
    fn from(m: Move) -> Self {
        MoveDoc {
            t: m.tokens,
            m: m.matches,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrianglePositionDoc {
    pub x: i64,
    pub y: u32,
    pub h: u32,
}

impl From<TrianglePositionDoc> for TrianglePosition {
    fn from(p: TrianglePositionDoc) -> Self {
        TrianglePosition::new(p.x, p.y, p.h)
    }
}

impl From<TrianglePosition> for TrianglePositionDoc {
    fn from(p: TrianglePosition) -> Self {
        TrianglePositionDoc {
            x: p.x,
            y: p.y,
            h: p.h,
        }
    }
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::P => "P",
        Outcome::N => "N",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowResult {
    pub x0: i64,
    pub x1: i64,
    pub rows: u32,
    /// Row `y` of the diagram at index `y`, one 0/1 entry per column.
    pub cells: Vec<Vec<u8>>,
}

pub fn ca_window(
    spec: &SpecDocument,
    x0: i64,
    x1: i64,
    rows: u32,
    limits: Limits,
) -> Result<WindowResult, ApiError> {
    let window = evolve(spec, x0, x1, rows, limits)?;
    let cells = (0..=rows)
        .map(|y| window.row(y).iter().map(|&b| u8::from(b)).collect())
        .collect();
    Ok(WindowResult {
        x0,
        x1,
        rows,
        cells,
    })
}

pub fn evolve(
    spec: &SpecDocument,
    x0: i64,
    x1: i64,
    rows: u32,
    limits: Limits,
) -> Result<cagame::Window, ApiError> {
    if x0 > x1 {
        return Err(ApiError::malformed(
            "invalid-bounds",
            "x0 must not exceed x1",
        ));
    }
    let sys = CaSystem::new(spec.params(), spec.background()?);
    Ok(sys.evolve_window_with_budget(x0, x1, rows, limits.cells)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MovesResult {
    pub moves: Vec<MoveDoc>,
}

pub fn game_moves(spec: &SpecDocument, pos: PositionDoc) -> Result<MovesResult, ApiError> {
    let game = TakeAway::new(spec.params(), spec.background()?);
    Ok(MovesResult {
        moves: game
            .legal_moves(pos.into())
            .into_iter()
            .map(MoveDoc::from)
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApplyResult {
    pub position: PositionDoc,
}

pub fn game_apply(
    spec: &SpecDocument,
    pos: PositionDoc,
    mv: MoveDoc,
) -> Result<ApplyResult, ApiError> {
    let game = TakeAway::new(spec.params(), spec.background()?);
    let next = game.apply(pos.into(), mv.into())?;
    Ok(ApplyResult {
        position: next.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomeResult {
    pub outcome: &'static str,
    #[serde(rename = "bestMove")]
    pub best_move: Option<MoveDoc>,
}

pub fn game_outcome(
    spec: &SpecDocument,
    pos: PositionDoc,
    limits: Limits,
) -> Result<OutcomeResult, ApiError> {
    limits.check_states(takeaway_states(pos.tokens, pos.matches, pos.mp))?;
    let game = TakeAway::new(spec.params(), spec.background()?);
    let pos = pos.into();
    Ok(OutcomeResult {
        outcome: outcome_str(game.outcome(pos)),
        best_move: game.best_move(pos).map(MoveDoc::from),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredicateResult {
    pub outcome: &'static str,
}

pub fn game_predicate(
    spec: &SpecDocument,
    pos: PositionDoc,
    limits: Limits,
) -> Result<PredicateResult, ApiError> {
    let game = TakeAway::new(spec.params(), spec.background()?);
    let p: Position = pos.into();
    let x = p.column(game.params());
    limits.check_cells(game.params(), x, x, p.matches + p.prev)?;
    Ok(PredicateResult {
        outcome: outcome_str(game.predicate(p)?),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangleOutcomeResult {
    pub outcome: &'static str,
    pub predicate: &'static str,
}

pub fn triangle_outcome(
    spec: &SpecDocument,
    pos: TrianglePositionDoc,
    limits: Limits,
) -> Result<TriangleOutcomeResult, ApiError> {
    let params = spec.params();
    limits.check_states(triangle_states(params, 1, pos.y, pos.h))?;
    let game = TriangleGame::new(params, spec.background()?);
    let pos: TrianglePosition = pos.into();
    if !game.is_valid(pos) {
        return Err(ApiError::domain(
            "invalid-position",
            format!("{pos} rests on a 1 of the bottom row"),
        ));
    }
    Ok(TriangleOutcomeResult {
        outcome: outcome_str(game.outcome(pos)),
        predicate: outcome_str(game.predicate(pos)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MismatchDoc<P> {
    pub position: P,
    pub observed: &'static str,
    pub expected: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyResult<P> {
    pub checked: usize,
    pub mismatches: Vec<MismatchDoc<P>>,
}

impl<P> VerifyResult<P> {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn verify_result<P, D: From<P>>(report: cagame::MismatchReport<P>) -> VerifyResult<D> {
    VerifyResult {
        checked: report.checked,
        mismatches: report
            .mismatches
            .into_iter()
            .map(|m| MismatchDoc {
                position: D::from(m.position),
                observed: outcome_str(m.observed),
                expected: outcome_str(m.expected),
            })
            .collect(),
    }
}

pub fn verify_thm2(
    spec: &SpecDocument,
    xmax: u32,
    ymax: u32,
    mpmax: u32,
    limits: Limits,
) -> Result<VerifyResult<PositionDoc>, ApiError> {
    limits.check_states(takeaway_states(xmax, ymax, mpmax))?;
    let game = TakeAway::new(spec.params(), spec.background()?);
    Ok(verify_result(
        game.verify_theorem(Bounds::new(xmax, ymax, mpmax)),
    ))
}

pub fn verify_thm3(
    spec: &SpecDocument,
    xmin: i64,
    xmax: i64,
    ymax: u32,
    hmax: u32,
    limits: Limits,
) -> Result<VerifyResult<TrianglePositionDoc>, ApiError> {
    if xmin > xmax {
        return Err(ApiError::malformed(
            "invalid-bounds",
            "xmin must not exceed xmax",
        ));
    }
    let params = spec.params();
    limits.check_states(triangle_states(
        params,
        (xmax - xmin) as u64 + 1,
        ymax,
        hmax,
    ))?;
    let game = TriangleGame::new(params, spec.background()?);
    Ok(verify_result(game.verify_theorem(TriangleBounds {
        x_min: xmin,
        x_max: xmax,
        y_max: ymax,
        h_max: hmax,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PeriodicityDoc {
    Periodic {
        drift: u32,
        period: u32,
        onset: u32,
        #[serde(rename = "gameDrift")]
        game_drift: i64,
    },
    UnknownWithinBounds {
        #[serde(rename = "driftMax")]
        drift_max: u32,
        #[serde(rename = "periodMax")]
        period_max: u32,
        rows: u32,
    },
}

pub fn periodicity(
    spec: &SpecDocument,
    drift_max: u32,
    period_max: u32,
    burn_in: u32,
    rows: u32,
    limits: Limits,
) -> Result<PeriodicityDoc, ApiError> {
    let sys = CaSystem::new(spec.params(), spec.background()?);
    let search = PeriodSearch {
        budget: limits.cells,
        ..PeriodSearch::covering(&sys, drift_max, period_max, burn_in, rows)
    };
    Ok(match analysis::detect_periodicity(&sys, &search)? {
        PeriodicityVerdict::Periodic {
            drift,
            period,
            onset,
        } => PeriodicityDoc::Periodic {
            drift,
            period,
            onset,
            game_drift: analysis::transfer_period(drift.into(), period, spec.gamma),
        },
        PeriodicityVerdict::UnknownWithinBounds {
            drift_max,
            period_max,
            rows,
        } => PeriodicityDoc::UnknownWithinBounds {
            drift_max,
            period_max,
            rows,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionDoc {
    pub x0: i64,
    pub x1: i64,
    #[serde(rename = "yFrom")]
    pub y_from: u32,
    #[serde(rename = "yTo")]
    pub y_to: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConvergenceDoc {
    DivergenceWitness { x: i64, y: u32 },
    AgreeOnTested { region: RegionDoc },
}

pub fn converge(
    a: &SpecDocument,
    b: &SpecDocument,
    region: Region,
    limits: Limits,
) -> Result<ConvergenceDoc, ApiError> {
    if region.x0 > region.x1 || region.y_from > region.y_to {
        return Err(ApiError::malformed("invalid-bounds", "empty region"));
    }
    limits.check_cells(a.params(), region.x0, region.x1, region.y_to)?;
    let sa = CaSystem::new(a.params(), a.background()?);
    let sb = CaSystem::new(b.params(), b.background()?);
    Ok(match analysis::check_convergence(&sa, &sb, region)? {
        ConvergenceVerdict::DivergenceWitness { x, y } => {
            ConvergenceDoc::DivergenceWitness { x, y }
        }
        ConvergenceVerdict::AgreeOnTested(r) => ConvergenceDoc::AgreeOnTested {
            region: RegionDoc {
                x0: r.x0,
                x1: r.x1,
                y_from: r.y_from,
                y_to: r.y_to,
            },
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HitDoc {
    pub x: i64,
    pub y: u32,
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub region: RegionDoc,
    pub hits: Vec<HitDoc>,
}

/// Pattern search; without explicit columns the scan covers everything the
/// background's core can reach by row `y_to`.
pub fn search(
    spec: &SpecDocument,
    pattern: &str,
    include_reversed: bool,
    columns: Option<(i64, i64)>,
    y_from: u32,
    y_to: u32,
    limits: Limits,
) -> Result<SearchResult, ApiError> {
    let bits = cagame::ca::parse_bits(pattern)
        .map_err(|e| ApiError::malformed("malformed-pattern", e.to_string()))?;
    if bits.is_empty() {
        return Err(ApiError::malformed(
            "malformed-pattern",
            "pattern must be non-empty",
        ));
    }
    let sys = CaSystem::new(spec.params(), spec.background()?);
    let (x0, x1) = columns.unwrap_or_else(|| analysis::required_window(&sys, y_to));
    let region = Region::new(x0, x1, y_from, y_to);
    if x0 > x1 || y_from > y_to {
        return Err(ApiError::malformed("invalid-bounds", "empty region"));
    }
    limits.check_cells(sys.params(), x0, x1, y_to)?;
    let hits = analysis::find_pattern(&sys, &bits, include_reversed, region)?;
    Ok(SearchResult {
        region: RegionDoc {
            x0,
            x1,
            y_from,
            y_to,
        },
        hits: hits
            .into_iter()
            .map(|h| HitDoc {
                x: h.x,
                y: h.y,
                reversed: h.reversed,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PathDoc {
    Optimal,
    Failure { index: usize, reason: String },
}

pub fn path_check(
    spec: &SpecDocument,
    start: PositionDoc,
    path: &[MoveDoc],
    limits: Limits,
) -> Result<PathDoc, ApiError> {
    limits.check_states(takeaway_states(start.tokens, start.matches, start.mp))?;
    let game = TakeAway::new(spec.params(), spec.background()?);
    let moves: Vec<Move> = path.iter().map(|&m| m.into()).collect();
    Ok(match game.verify_path(start.into(), &moves) {
        PathVerdict::Optimal => PathDoc::Optimal,
        PathVerdict::FailureAt { index, reason } => PathDoc::Failure {
            index,
            reason: match reason {
                PathFailure::Illegal(clause) => format!("illegal-move:{}", clause.code()),
                PathFailure::NotNBeforeWinnerMove => "not-N-before-winner-move".into(),
                PathFailure::NotPAfterWinnerMove => "not-P-after-winner-move".into(),
            },
        },
    })
}

/// Parses `t,m` or `t=..,m=..`.
pub fn parse_move(s: &str) -> Result<MoveDoc, ApiError> {
    let bad = || ApiError::malformed("malformed-move", format!("expected \"t,m\", got {s:?}"));
    let (t, m) = s.trim().split_once(',').ok_or_else(bad)?;
    let num = |part: &str, key: &str| {
        let part = part.trim();
        let part = part
            .strip_prefix(key)
            .map_or(part, |rest| rest.trim_start().trim_start_matches('='));
        part.trim().parse::<u32>().map_err(|_| bad())
    };
    Ok(MoveDoc {
        t: num(t, "t")?,
        m: num(m, "m")?,
    })
}

/// Parses `t,m;t,m;...`; an empty string is the empty path.
pub fn parse_path(s: &str) -> Result<Vec<MoveDoc>, ApiError> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_move)
        .collect()
}
