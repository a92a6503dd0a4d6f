use std::fmt;

/// Normal-play outcome class of a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// The previous player wins; the player to move loses.
    P,
    /// The next player (the one to move) wins.
    N,
}

impl Outcome {
    pub fn is_p(self) -> bool {
        self == Outcome::P
    }

    pub fn from_is_p(is_p: bool) -> Self {
        if is_p {
            Outcome::P
        } else {
            Outcome::N
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::P => Outcome::N,
            Outcome::N => Outcome::P,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::P => "P",
            Outcome::N => "N",
        })
    }
}

/// A position where two outcome computations disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch<P> {
    pub position: P,
    /// Outcome from the exhaustive solver (or the shifted position, for
    /// periodicity checks).
    pub observed: Outcome,
    /// Outcome from the reference being checked against.
    pub expected: Outcome,
}

/// All disagreements found over a bounded region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MismatchReport<P> {
    pub checked: usize,
    pub mismatches: Vec<Mismatch<P>>,
}

impl<P> MismatchReport<P> {
    pub fn new() -> Self {
        MismatchReport {
            checked: 0,
            mismatches: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn record(&mut self, position: P, observed: Outcome, expected: Outcome) {
        self.checked += 1;
        if observed != expected {
            self.mismatches.push(Mismatch {
                position,
                observed,
                expected,
            });
        }
    }

    pub fn merge(&mut self, other: MismatchReport<P>) {
        self.checked += other.checked;
        self.mismatches.extend(other.mismatches);
    }
}

impl<P> Default for MismatchReport<P> {
    fn default() -> Self {
        Self::new()
    }
}
