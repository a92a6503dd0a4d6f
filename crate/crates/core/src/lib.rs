//! One-dimensional cellular automata of the `CA(A, γ, Γ)` family and the two
//! impartial games whose P-positions reproduce their spacetime diagrams:
//!
//! * [`takeaway`]: a move-size dynamic take-away game on a tape-heap of
//!   colored tokens and a time-heap of matches;
//! * [`triangle`]: a triangle-placing game on the upper half plane.
//!
//! [`ca`] evaluates the automaton exactly over backgrounds of the form
//! `...LLL C RRR...`, [`render`] writes spacetime windows as text or PBM, and
//! [`analysis`] holds bounded evidence-gathering tools (periodicity,
//! convergence, pattern search).
//!
//! Both games are solved by exhaustive memoized search and checked against
//! closed-form predicates read off the automaton.

pub mod analysis;
pub mod ca;
pub mod outcome;
pub mod render;
pub mod takeaway;
pub mod triangle;

pub use ca::{Background, CaError, CaSystem, Params, Patched, RuleTable, Tape, Window};
pub use outcome::{Mismatch, MismatchReport, Outcome};
pub use takeaway::{GameError, IllegalClause, Move, PathFailure, PathVerdict, Position, TakeAway};
pub use triangle::{Placement, PlacementClause, TriangleError, TriangleGame, TrianglePosition};
