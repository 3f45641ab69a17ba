//! Three-valued decisions: a witness proves `Holds`, a discrete certificate
//! proves `Refuted`, and anything in between is reported as `Unknown`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::ComplexMatrix;
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Refuted,
    Unknown,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Refuted => "refuted",
            Status::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Isometric intertwiner `Ω` with `ΩA = BΩ` (unitary for equivalence).
    Isometry(ComplexMatrix),
    /// Unitaries `(τ, τ′)` with `G(λ) = τ F(λ) τ′` on the sampled grid.
    Coincidence {
        tau: ComplexMatrix,
        tau_prime: ComplexMatrix,
    },
}

/// Reason a relation cannot hold. Each variant carries enough data to be
/// re-checked independently of the search that produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `dim H_A > dim H_B` (or the dimensions differ where equality is needed).
    Dimension { dim_a: usize, dim_b: usize },
    /// Defect-index inequality fails for completely nonunitary `B`.
    Defect {
        defect_a: usize,
        codefect_a: usize,
        defect_b: usize,
        codefect_b: usize,
    },
    /// Eigenvalue whose geometric multiplicity in `A` exceeds that in `B`.
    PointSpectrum {
        eigenvalue: Complex64,
        multiplicity_a: usize,
        multiplicity_b: usize,
    },
    /// Trace of a word in `(M, M*)` differs; `word` uses `'a'` for `M` and
    /// `'s'` for `M*`, applied left to right as a product.
    WordTrace {
        word: String,
        trace_a: Complex64,
        trace_b: Complex64,
    },
    /// Singular-value profiles differ at a grid point.
    SingularValueProduct {
        point: usize,
        k: usize,
        lhs: f64,
        rhs: f64,
    },
    /// Block shapes of two sampled functions differ.
    BlockShape {
        left: (usize, usize),
        right: (usize, usize),
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Dimension { .. } => "dimension",
            Certificate::Defect { .. } => "defect",
            Certificate::PointSpectrum { .. } => "point-spectrum",
            Certificate::WordTrace { .. } => "word-trace",
            Certificate::SingularValueProduct { .. } => "singular-value-product",
            Certificate::BlockShape { .. } => "block-shape",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub starts_used: usize,
    pub iterations: usize,
    pub best_residual: f64,
    /// Number of sample points a grid-relative verdict was decided on.
    pub grid_points: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub certificate: Option<Certificate>,
    pub diagnostics: Diagnostics,
}

impl OrderVerdict {
    pub fn holds(witness: Witness, diagnostics: Diagnostics) -> Self {
        OrderVerdict {
            status: Status::Holds,
            witness: Some(witness),
            certificate: None,
            diagnostics,
        }
    }

    pub fn refuted(certificate: Certificate, diagnostics: Diagnostics) -> Self {
        OrderVerdict {
            status: Status::Refuted,
            witness: None,
            certificate: Some(certificate),
            diagnostics,
        }
    }

    pub fn unknown(diagnostics: Diagnostics) -> Self {
        OrderVerdict {
            status: Status::Unknown,
            witness: None,
            certificate: None,
            diagnostics,
        }
    }

    pub fn isometry(&self) -> Option<&ComplexMatrix> {
        match &self.witness {
            Some(Witness::Isometry(m)) => Some(m),
            _ => None,
        }
    }
}

/// Multi-start search budget shared by the intertwiner and coincidence
/// searches. Start `i` draws from stream `i` of `seed`, so results do not
/// depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub starts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            starts: 32,
            max_iters: 2000,
            seed: 0,
        }
    }
}
