//! Regular factorizations and the correspondence between invariant subspaces
//! and factorizations `Θ_T = Θ₂Θ₁` of the characteristic function.
//!
//! The identification unitaries between the factors and the characteristic
//! functions of the blocks are existence objects; the checks here work at the
//! level of coincidence and singular-value products, which do not need them.
//! Boundary statements ("for almost all t") are tested on the boundary ring of
//! the grid and are grid-relative.

use alloc::vec::Vec;

use crate::charfn::{coincide, pure_split, sample_charfn, CharFnSample, GridSpec};
use crate::contraction::{unitary_cnu_split, Contraction};
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, identity, singular_values, ComplexMatrix, Tolerance};
use crate::subspace::Subspace;
use crate::verdict::{Budget, Status};

/// `T = [T₁ X; 0 T₂]` with respect to `ℋ′ ⊕ ℋ′⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub invariant_space: Subspace,
    pub complement: Subspace,
    pub t1: Contraction,
    pub t2: Contraction,
    pub x_block: ComplexMatrix,
}

impl Triangulation {
    /// `[F G] [T₁ X; 0 T₂] [F G]*`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let f = self.invariant_space.frame();
        let g = self.complement.frame();
        f * self.t1.matrix() * f.adjoint()
            + f * &self.x_block * g.adjoint()
            + g * self.t2.matrix() * g.adjoint()
    }
}

/// Whether `T₂T₁` is regular: `D_{T₂}ℰ₂ ∩ D_{T₁*}ℰ₂ = {0}`. `T₁: ℰ₁ → ℰ₂`
/// and `T₂: ℰ₂ → ℰ₃` may be rectangular.
pub fn is_regular_pair(t1: &ComplexMatrix, t2: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    if t2.ncols() != t1.nrows() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "T1 maps into dimension {} but T2 acts on dimension {}",
            t1.nrows(),
            t2.ncols()
        )));
    }
    // Richardson boundary values may exceed norm one by round-off.
    let floor = 3.0 * tol.residual_tol;
    let (_, d2) = crate::linalg::defect_with_floor(t2, tol, floor)?;
    let (_, d1_star) = crate::linalg::defect_with_floor(&t1.adjoint(), tol, floor)?;
    let a = Subspace::from_orthonormal(d2, *tol);
    let b = Subspace::from_orthonormal(d1_star, *tol);
    Ok(a.intersect(&b)?.is_zero())
}

/// `Θ₂(ζ)Θ₁(ζ)` regular at every sampled boundary point (grid-relative).
pub fn is_regular_factorization(f1: &CharFnSample, f2: &CharFnSample) -> Result<bool> {
    if f1.boundary_points != f2.boundary_points {
        return Err(Error::GridMismatch);
    }
    if f1.boundary_points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if f1.codomain_dim() != f2.domain_dim() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "first factor maps into dimension {} but second acts on dimension {}",
            f1.codomain_dim(),
            f2.domain_dim()
        )));
    }
    for (a, b) in f1.boundary_blocks.iter().zip(f2.boundary_blocks.iter()) {
        if !is_regular_pair(a, b, &f1.tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Split `T` along an invariant subspace `Y`.
pub fn triangulate(t: &Contraction, y: &Subspace) -> Result<Triangulation> {
    if y.ambient_dim() != t.dim() {
        return Err(Error::AmbientMismatch {
            left: t.dim(),
            right: y.ambient_dim(),
        });
    }
    let tol = t.tolerance();
    let residual = y.invariance_residual(t.matrix());
    if residual > tol.residual_tol {
        return Err(Error::NotInvariant { residual });
    }
    let complement = y.complement()?;
    let f = y.frame();
    let g = complement.frame();
    let m = t.matrix();
    Ok(Triangulation {
        t1: Contraction::validate(f.adjoint() * m * f, tol)?,
        t2: Contraction::validate(g.adjoint() * m * g, tol)?,
        x_block: f.adjoint() * m * g,
        invariant_space: y.clone(),
        complement,
    })
}

/// `I_before ⊕ Ξ(λ) ⊕ I_after` at every sample point.
pub fn pad_sample(f: &CharFnSample, before: usize, after: usize) -> Result<CharFnSample> {
    let (ib, ia) = (identity(before), identity(after));
    let pad = |b: &ComplexMatrix| direct_sum(&[&ib, b, &ia]);
    CharFnSample::from_blocks(
        f.disk_points.clone(),
        f.disk_blocks.iter().map(pad).collect(),
        f.boundary_points.clone(),
        f.boundary_blocks.iter().map(pad).collect(),
        f.boundary_eps,
        f.tol,
    )
}

/// Coincidence-level consequences of `Θ_T = Θ₂Θ₁` for an invariant `Y`.
///
/// The factors are modelled as `Θ₁′ = Θ_{T₁} ⊕ I` and `Θ₂′ = I ⊕ Θ_{T₂}`
/// (identity padding up to `dim 𝒟_T`), which coincide with the true factors'
/// pure parts plus constant unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    pub grid_points: usize,
    pub defect_dims: (usize, usize, usize),
    /// `max_λ |∏σ(Θ_T) - ∏σ(Θ_{T₁}) ∏σ(Θ_{T₂})|` (absolute determinants).
    pub determinant_deviation: f64,
    /// Largest violation of `∏_{t≤k} σ_t(Θ_T) ≤ ∏_{t≤k} σ_t(Θ₁′) ∏_{t≤k} σ_t(Θ₂′)`
    /// and of the corollary bounds by each factor alone (0 when all hold).
    pub horn_violation: f64,
    /// Status of `coincide(pure part of Θ₁′, Θ_{T₁})`.
    pub domain_factor_coincidence: Status,
    /// `dim 𝒟_T = dim 𝒟_{T₁}`: the domain-side factor must then be pure.
    pub minimal_case: bool,
    /// Unitary-part dimension found by `pure_split` on `Θ_{T₁}` in the
    /// minimal case.
    pub minimal_case_unitary_dim: Option<usize>,
    pub regular: bool,
    pub tolerance: f64,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.determinant_deviation <= self.tolerance
            && self.horn_violation <= self.tolerance
            && self.domain_factor_coincidence == Status::Holds
            && self.minimal_case_unitary_dim.unwrap_or(0) == 0
            && self.regular
    }
}

fn padded_profile(sigma: &[f64], ones: usize) -> Vec<f64> {
    let mut out = alloc::vec![1.0; ones];
    out.extend_from_slice(sigma);
    out
}

fn prefix(sigma: &[f64], k: usize) -> f64 {
    (0..k).map(|t| sigma.get(t).copied().unwrap_or(0.0)).product()
}

pub fn verify_factorization_theorem(
    t: &Contraction,
    y: &Subspace,
    grid: &GridSpec,
    budget: &Budget,
) -> Result<FactorizationReport> {
    let tol = t.tolerance();
    let split = unitary_cnu_split(t)?;
    if !split.unitary_space.is_zero() {
        return Err(Error::PreconditionViolated(alloc::format!(
            "T has a unitary part of dimension {}",
            split.unitary_space.dim()
        )));
    }
    let tri = triangulate(t, y)?;
    let theta = sample_charfn(t, grid)?;
    let theta1 = sample_charfn(&tri.t1, grid)?;
    let theta2 = sample_charfn(&tri.t2, grid)?;
    let d = theta.domain_dim();
    let d1 = theta1.domain_dim();
    let d2 = theta2.domain_dim();
    let pad = |di: usize| {
        d.checked_sub(di).ok_or_else(|| {
            Error::PreconditionViolated(alloc::format!("factor defect {di} exceeds dim D_T = {d}"))
        })
    };
    let (pad1, pad2) = (pad(d1)?, pad(d2)?);
    let f1 = pad_sample(&theta1, 0, pad1)?;
    let f2 = pad_sample(&theta2, pad2, 0)?;

    let mut determinant_deviation: f64 = 0.0;
    let mut horn_violation: f64 = 0.0;
    let blocks = theta.all_blocks().zip(theta1.all_blocks()).zip(theta2.all_blocks());
    for ((b, b1), b2) in blocks {
        let s = singular_values(b)?;
        let s1 = padded_profile(&singular_values(b1)?, pad1);
        let s2 = padded_profile(&singular_values(b2)?, pad2);
        determinant_deviation =
            determinant_deviation.max((prefix(&s, d) - prefix(&s1, d) * prefix(&s2, d)).abs());
        for k in 1..=d {
            let lhs = prefix(&s, k);
            let (r1, r2) = (prefix(&s1, k), prefix(&s2, k));
            horn_violation = horn_violation
                .max(lhs - r1 * r2)
                .max(lhs - r1)
                .max(lhs - r2);
        }
    }

    let pure = pure_split(&f1)?;
    let pure_sample = CharFnSample {
        domain_space: Subspace::full(pure.pure_domain.dim(), tol),
        codomain_space: Subspace::full(pure.pure_codomain.dim(), tol),
        disk_points: f1.disk_points.clone(),
        disk_blocks: pure.pure_blocks.clone(),
        boundary_points: f1.boundary_points.clone(),
        boundary_blocks: f1
            .boundary_blocks
            .iter()
            .map(|b| pure.pure_codomain.frame().adjoint() * b * pure.pure_domain.frame())
            .collect(),
        boundary_eps: f1.boundary_eps,
        tol,
    };
    let domain_factor_coincidence = coincide(&pure_sample, &theta1, budget)?.status;
    let minimal_case = d == d1;
    let minimal_case_unitary_dim = if minimal_case {
        Some(pure_split(&theta1)?.unitary_domain.dim())
    } else {
        None
    };
    let regular = if grid.boundary_angles == 0 {
        true
    } else {
        is_regular_factorization(&f1, &f2)?
    };
    Ok(FactorizationReport {
        grid_points: theta.point_count(),
        defect_dims: (d, d1, d2),
        determinant_deviation,
        horn_violation,
        domain_factor_coincidence,
        minimal_case,
        minimal_case_unitary_dim,
        regular,
        tolerance: tol.residual_tol,
    })
}
