//! Shared record type for invariant monitors.
//!
//! Engines never panic on a violated run-time inequality; they record it and
//! keep going, leaving the judgement to tests and callers.

use std::fmt;

/// A violated run-time inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub round: usize,
    pub kind: ViolationKind,
    /// How far past the tolerance the check landed.
    pub magnitude: f64,
}

/// Which monitored inequality failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Recomputed gradient mapping disagrees with the step displacement.
    MappingIdentity,
    /// `<grad, x' - x> <= -|x' - x|^2 / a` failed.
    DescentInnerProduct,
    /// Guaranteed per-round objective decrease failed.
    PerRoundDecrease,
    /// Objective increased between rounds.
    Monotonicity,
    /// Mean tracking vector drifted from the mean local gradient.
    Tracking,
    /// Mean dual vector failed its one-step recursion.
    DualMeanRecursion,
    /// An agent strayed further from the auxiliary iterate than its dual
    /// disagreement allows.
    DeviationBound,
    /// The auxiliary-sequence descent inequality failed.
    CostDescent,
    /// Residual stayed at numerical zero while agents still disagreed.
    StationaryDisagreement,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::MappingIdentity => "mapping-identity",
            Self::DescentInnerProduct => "descent-inner-product",
            Self::PerRoundDecrease => "per-round-decrease",
            Self::Monotonicity => "monotonicity",
            Self::Tracking => "tracking",
            Self::DualMeanRecursion => "dual-mean-recursion",
            Self::DeviationBound => "deviation-bound",
            Self::CostDescent => "cost-descent",
            Self::StationaryDisagreement => "stationary-disagreement",
        };
        f.write_str(name)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round {}: {} exceeded tolerance by {:e}",
            self.round, self.kind, self.magnitude
        )
    }
}
