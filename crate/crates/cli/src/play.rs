//! Line-oriented human-versus-engine take-away session.

use std::io::{self, BufRead, Write};

use cagame::{Move, PathVerdict, Position, TakeAway, Tape};

use crate::api::parse_move;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Human,
    Engine,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Human => Side::Engine,
            Side::Engine => Side::Human,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub start: Position,
    pub transcript: Vec<Move>,
    /// `None` if the human quit or input ended early.
    pub winner: Option<Side>,
    /// The winner's play checked from the first N-position it faced.
    pub verdict: Option<PathVerdict>,
}

/// Plays until someone cannot move. The engine answers with a winning move
/// whenever one exists and otherwise with its first legal move.
pub fn play<T: Tape, R: BufRead, W: Write>(
    game: &TakeAway<T>,
    start: Position,
    engine_first: bool,
    mut input: R,
    mut out: W,
) -> io::Result<Session> {
    let mut pos = start;
    let mut to_move = if engine_first {
        Side::Engine
    } else {
        Side::Human
    };
    let mut transcript = Vec::new();
    let mut positions = Vec::new();
    loop {
        let moves = game.legal_moves(pos);
        writeln!(out, "position {pos} is {}", game.outcome(pos))?;
        if moves.is_empty() {
            let winner = to_move.other();
            let who = if winner == Side::Human {
                "you win"
            } else {
                "engine wins"
            };
            writeln!(out, "no legal move; {who}")?;
            let verdict =
                winner_verdict(game, start, &transcript, &positions, winner, engine_first);
            if let Some(v) = &verdict {
                writeln!(out, "winner's play: {}", describe(v))?;
            }
            return Ok(Session {
                start,
                transcript,
                winner: Some(winner),
                verdict,
            });
        }
        let mv = match to_move {
            Side::Engine => {
                let mv = game.best_move(pos).unwrap_or(moves[0]);
                writeln!(out, "engine plays {mv}")?;
                mv
            }
            Side::Human => loop {
                write!(out, "your move (t,m), 'moves' or 'quit': ")?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    writeln!(out)?;
                    return Ok(Session {
                        start,
                        transcript,
                        winner: None,
                        verdict: None,
                    });
                }
                let line = line.trim();
                if line == "quit" {
                    return Ok(Session {
                        start,
                        transcript,
                        winner: None,
                        verdict: None,
                    });
                }
                if line == "moves" {
                    let list: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
                    writeln!(out, "{}", list.join(" "))?;
                    continue;
                }
                match parse_move(line) {
                    Ok(doc) => {
                        let mv = Move::from(doc);
                        match game.check_move(pos, mv) {
                            Ok(()) => break mv,
                            Err(clause) => writeln!(out, "illegal move ({clause})")?,
                        }
                    }
                    Err(e) => writeln!(out, "{}", e.message)?,
                }
            },
        };
        positions.push(pos);
        transcript.push(mv);
        pos = game.apply(pos, mv).expect("move was checked");
        to_move = to_move.other();
    }
}

fn winner_verdict<T: Tape>(
    game: &TakeAway<T>,
    start: Position,
    transcript: &[Move],
    positions: &[Position],
    winner: Side,
    engine_first: bool,
) -> Option<PathVerdict> {
    let first_side = if engine_first {
        Side::Engine
    } else {
        Side::Human
    };
    let winner_moves_at = |i: usize| i.is_multiple_of(2) == (first_side == winner);
    let from =
        (0..transcript.len()).find(|&i| winner_moves_at(i) && !game.outcome(positions[i]).is_p());
    match from {
        Some(k) => Some(game.verify_path(positions[k], &transcript[k..])),
        None if transcript.is_empty() => Some(game.verify_path(start, transcript)),
        None => None,
    }
}

fn describe(v: &PathVerdict) -> String {
    match v {
        PathVerdict::Optimal => "optimal".into(),
        PathVerdict::FailureAt { index, reason } => format!("failure at move {index}: {reason}"),
    }
}
