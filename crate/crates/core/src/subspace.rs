//! Subspaces of `C^n` carried as orthonormal frames.
//!
//! Frames are not canonical, so equality is mutual containment. Intersections
//! and containment use principal angles: a pair of principal vectors counts as
//! shared when `1 - cos θ <= rank_tol`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::sqrt;
use crate::linalg::{
    canonical_frame, ensure_finite, range_vectors, right_null_vectors, svd, zeros, ComplexMatrix,
    Tolerance,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    frame: ComplexMatrix,
    tol: Tolerance,
}

impl Subspace {
    pub fn zero(ambient_dim: usize, tol: Tolerance) -> Self {
        Subspace {
            ambient_dim,
            frame: zeros(ambient_dim, 0),
            tol,
        }
    }

    pub fn full(ambient_dim: usize, tol: Tolerance) -> Self {
        Subspace {
            ambient_dim,
            frame: ComplexMatrix::identity(ambient_dim, ambient_dim),
            tol,
        }
    }

    /// Span of the columns of `vectors` (need not be orthonormal).
    pub fn span(vectors: &ComplexMatrix, tol: Tolerance) -> Result<Self> {
        range_basis(vectors, tol)
    }

    /// Wrap a frame that is already orthonormal. The frame is re-expressed in
    /// canonical form; orthonormality is the caller's responsibility.
    pub fn from_orthonormal(frame: ComplexMatrix, tol: Tolerance) -> Self {
        Subspace {
            ambient_dim: frame.nrows(),
            frame: canonical_frame(&frame),
            tol,
        }
    }

    /// Standard-basis coordinate subspace `span{e_i : i in indices}`.
    pub fn coordinate(ambient_dim: usize, indices: &[usize], tol: Tolerance) -> Self {
        let mut frame = zeros(ambient_dim, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            frame[(i, c)] = crate::linalg::ONE;
        }
        Subspace {
            ambient_dim,
            frame,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.frame * self.frame.adjoint()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        Ok(())
    }

    /// Principal-angle data between `self` and `other`: cosines padded with
    /// zeros to `other.dim()` and a full unitary basis of `other`'s coordinates
    /// aligned with them (columns ordered by nonincreasing cosine), plus the
    /// matching left vectors for the first `min` columns.
    fn principal(&self, other: &Subspace) -> Result<(Vec<f64>, ComplexMatrix, ComplexMatrix)> {
        let k1 = self.dim();
        let k2 = other.dim();
        let cross = self.frame.adjoint() * &other.frame;
        let padded = if k1 < k2 {
            let mut p = zeros(k2, k2);
            p.view_mut((0, 0), (k1, k2)).copy_from(&cross);
            p
        } else {
            cross
        };
        let s = svd(&padded)?;
        let mut cosines = s.sigma.clone();
        cosines.truncate(k2);
        while cosines.len() < k2 {
            cosines.push(0.0);
        }
        let u = s.u.rows(0, k1).into_owned();
        Ok((cosines, s.v, u))
    }

    fn shared_count(&self, cosines: &[f64]) -> usize {
        cosines
            .iter()
            .take_while(|&&c| 1.0 - c <= self.tol.rank_tol)
            .count()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient_dim, self.tol));
        }
        let (cosines, _v, u) = self.principal(other)?;
        let shared = self.shared_count(&cosines);
        let vectors = &self.frame * u.columns(0, shared);
        Ok(Subspace::from_orthonormal(vectors, self.tol))
    }

    /// `self ∨ other`. Built from `self` plus the non-shared principal
    /// directions of `other`, so `dim(S1 ∩ S2) + dim(S1 ∨ S2) = dim S1 + dim S2`
    /// holds exactly under the same angle threshold.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let (cosines, v, _u) = self.principal(other)?;
        let shared = self.shared_count(&cosines);
        let n = self.ambient_dim;
        let extra = other.dim() - shared;
        let mut frame = zeros(n, self.dim() + extra);
        frame
            .view_mut((0, 0), (n, self.dim()))
            .copy_from(&self.frame);
        let proj = self.projector();
        for (c, j) in (shared..other.dim()).enumerate() {
            let dir = &other.frame * v.column(j);
            let mut perp = &dir - &proj * &dir;
            // Second pass against the already appended directions.
            for p in 0..(self.dim() + c) {
                let q = frame.column(p).into_owned();
                let coeff = (q.adjoint() * &perp)[(0, 0)];
                perp -= q * coeff;
            }
            let nrm = perp.norm();
            let col = perp / crate::Complex64::new(nrm.max(f64::MIN_POSITIVE), 0.0);
            frame.column_mut(self.dim() + c).copy_from(&col);
        }
        Ok(Subspace::from_orthonormal(frame, self.tol))
    }

    pub fn complement(&self) -> Result<Subspace> {
        let n = self.ambient_dim;
        if self.is_zero() {
            return Ok(Subspace::full(n, self.tol));
        }
        let null = right_null_vectors(&self.frame.adjoint(), &self.tol)?;
        Ok(Subspace::from_orthonormal(null, self.tol))
    }

    /// True when `other ⊆ self` under the principal-angle test.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        if other.is_zero() {
            return Ok(true);
        }
        if other.dim() > self.dim() {
            return Ok(false);
        }
        let (cosines, _, _) = self.principal(other)?;
        Ok(self.shared_count(&cosines) == other.dim())
    }

    /// Mutual containment.
    pub fn same_as(&self, other: &Subspace) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.contains(other)? && other.contains(self)?)
    }

    /// `||(I - P_self) x||` maximised over unit `x` in `other`: sine of the
    /// largest principal angle from `other` into `self`.
    pub fn gap_from(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        if other.is_zero() {
            return Ok(0.0);
        }
        let resid = other.frame() - self.projector() * other.frame();
        Ok(crate::linalg::op_norm(&resid))
    }

    /// Image `M(self)` as a subspace of `C^{rows(M)}`.
    pub fn image(&self, m: &ComplexMatrix) -> Result<Subspace> {
        if m.ncols() != self.ambient_dim {
            return Err(Error::AmbientMismatch {
                left: m.ncols(),
                right: self.ambient_dim,
            });
        }
        range_basis(&(m * &self.frame), self.tol)
    }

    /// `||(I - P) M P||`: zero exactly when the subspace is invariant under `M`.
    pub fn invariance_residual(&self, m: &ComplexMatrix) -> f64 {
        let p = self.projector();
        let moved = m * &self.frame;
        crate::linalg::op_norm(&(&moved - &p * &moved))
    }

    /// Coordinates of the compression `F* M F`.
    pub fn compress(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.frame.adjoint() * m * &self.frame
    }
}

/// Orthonormal frame of `{x : ||Mx|| <= rank_tol·σ_max(M)·||x||}`.
pub fn kernel_basis(m: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let null = right_null_vectors(m, &tol)?;
    if m.ncols() == 0 {
        return Ok(Subspace::zero(0, tol));
    }
    Ok(Subspace::from_orthonormal(null, tol))
}

/// Orthonormal frame of the numerical column space of `M`.
pub fn range_basis(m: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let range = range_vectors(m, &tol)?;
    Ok(Subspace::from_orthonormal(range, tol))
}

pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersect(b)
}

pub fn sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.sum(b)
}

pub fn complement(s: &Subspace) -> Result<Subspace> {
    s.complement()
}

/// `b ⊆ a`.
pub fn contains(a: &Subspace, b: &Subspace) -> Result<bool> {
    a.contains(b)
}

/// Sine of the angle `θ` for which `1 - cos θ = rank_tol`; handy as a
/// residual-scale companion of the angle test.
pub fn angle_threshold_sine(tol: &Tolerance) -> f64 {
    let c = 1.0 - tol.rank_tol;
    sqrt((1.0 - c * c).max(0.0))
}
