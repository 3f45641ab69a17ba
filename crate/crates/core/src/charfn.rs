//! Characteristic functions `Θ_T(λ) = -T + λ D_{T*}(I - λT*)^{-1} D_T |𝒟_T`
//! of contractions, sampled on a deterministic grid.
//!
//! Blocks are expressed in the canonical frames of `𝒟_T` (domain) and
//! `𝒟_{T*}` (codomain). Boundary values are radial limits: each one is the
//! Richardson extrapolation `2Θ((1-ε)ζ) - Θ((1-2ε)ζ)` of two interior
//! evaluations, which removes the first-order radial error. Every verdict
//! derived from a sample is relative to its grid.

use alloc::vec::Vec;

use crate::contraction::{isometric_directions, Contraction};
use crate::error::{Error, Result};
use crate::exec::{batched_search, map_indexed};
use crate::float::{cos, sin};
use crate::linalg::{
    op_norm, polar_isometry, range_vectors_with_floor, right_null_vectors,
    right_null_vectors_with_floor, singular_values, zeros, ComplexMatrix, Tolerance,
};
use crate::rng::{gaussian, seeded};
use crate::subspace::Subspace;
use crate::verdict::{Budget, Certificate, Diagnostics, OrderVerdict, Witness};
use crate::Complex64;

/// Sample grid: `radii × angles` interior points plus any explicit extra
/// points, and a ring of `boundary_angles` radial limits.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub extra_points: Vec<Complex64>,
    pub boundary_angles: usize,
    pub boundary_eps: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radii: alloc::vec![0.1, 0.3, 0.5, 0.7, 0.9],
            angles: 5,
            extra_points: Vec::new(),
            boundary_angles: 64,
            boundary_eps: 1e-6,
        }
    }
}

impl GridSpec {
    /// Grid made of exactly the given interior points, no boundary ring.
    pub fn points(points: Vec<Complex64>) -> Self {
        GridSpec {
            radii: Vec::new(),
            angles: 0,
            extra_points: points,
            boundary_angles: 0,
            boundary_eps: 1e-6,
        }
    }

    pub fn disk_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.radii.len() * self.angles + self.extra_points.len());
        for &r in &self.radii {
            for j in 0..self.angles {
                pts.push(polar(r, core::f64::consts::TAU * j as f64 / self.angles as f64));
            }
        }
        pts.extend(self.extra_points.iter().copied());
        pts
    }

    pub fn boundary_points(&self) -> Vec<Complex64> {
        (0..self.boundary_angles)
            .map(|j| polar(1.0, core::f64::consts::TAU * j as f64 / self.boundary_angles as f64))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let pts = self.disk_points();
        if pts.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(bad) = pts.iter().find(|z| z.norm() >= 1.0) {
            return Err(Error::LambdaOnBoundary {
                modulus: bad.norm(),
            });
        }
        if self.boundary_angles > 0 && !(self.boundary_eps > 0.0 && self.boundary_eps < 0.25) {
            return Err(Error::PreconditionViolated(alloc::format!(
                "boundary_eps must lie in (0, 0.25), got {}",
                self.boundary_eps
            )));
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.radii.len() * self.angles + self.extra_points.len() + self.boundary_angles
    }
}

fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::new(r * cos(t), r * sin(t))
}

/// Sampled contractive analytic function. `disk_blocks[i]` is the value at
/// `disk_points[i]`; `boundary_blocks[j]` the radial limit at
/// `boundary_points[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFnSample {
    pub domain_space: Subspace,
    pub codomain_space: Subspace,
    pub disk_points: Vec<Complex64>,
    pub disk_blocks: Vec<ComplexMatrix>,
    pub boundary_points: Vec<Complex64>,
    pub boundary_blocks: Vec<ComplexMatrix>,
    pub boundary_eps: f64,
    pub tol: Tolerance,
}

impl CharFnSample {
    /// Wrap explicit blocks (a function given by its values rather than by an
    /// operator). Domain and codomain are the full coordinate spaces.
    pub fn from_blocks(
        disk_points: Vec<Complex64>,
        disk_blocks: Vec<ComplexMatrix>,
        boundary_points: Vec<Complex64>,
        boundary_blocks: Vec<ComplexMatrix>,
        boundary_eps: f64,
        tol: Tolerance,
    ) -> Result<Self> {
        if disk_points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if disk_points.len() != disk_blocks.len() || boundary_points.len() != boundary_blocks.len() {
            return Err(Error::ShapeMismatch(alloc::string::String::from(
                "one block per sample point is required",
            )));
        }
        let (q, p) = disk_blocks[0].shape();
        for b in disk_blocks.iter().chain(boundary_blocks.iter()) {
            if b.shape() != (q, p) {
                return Err(Error::ShapeMismatch(alloc::format!(
                    "block of shape {:?} in a {q}x{p} sample",
                    b.shape()
                )));
            }
            crate::linalg::ensure_finite(b)?;
            let s = op_norm(b);
            if s > 1.0 + tol.residual_tol {
                return Err(Error::NotContractive { sigma_max: s });
            }
        }
        Ok(CharFnSample {
            domain_space: Subspace::full(p, tol),
            codomain_space: Subspace::full(q, tol),
            disk_points,
            disk_blocks,
            boundary_points,
            boundary_blocks,
            boundary_eps,
            tol,
        })
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_space.dim()
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_space.dim()
    }

    pub fn point_count(&self) -> usize {
        self.disk_points.len() + self.boundary_points.len()
    }

    /// Interior blocks followed by boundary blocks.
    pub fn all_blocks(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.disk_blocks.iter().chain(self.boundary_blocks.iter())
    }

    pub fn same_grid(&self, other: &CharFnSample) -> bool {
        self.disk_points == other.disk_points && self.boundary_points == other.boundary_points
    }

    /// Largest `σ_max` over all blocks.
    pub fn max_norm(&self) -> f64 {
        self.all_blocks().map(op_norm).fold(0.0, f64::max)
    }
}

/// `Θ_T(λ)` in the frames of `𝒟_T` and `𝒟_{T*}`.
///
/// The formula is evaluated even when `T` has a unitary part (that part
/// simply contributes nothing to the defect spaces).
pub fn eval_charfn(t: &Contraction, lambda: Complex64) -> Result<ComplexMatrix> {
    if lambda.norm() >= 1.0 {
        return Err(Error::LambdaOnBoundary {
            modulus: lambda.norm(),
        });
    }
    eval_unchecked(t, lambda)
}

fn eval_unchecked(t: &Contraction, lambda: Complex64) -> Result<ComplexMatrix> {
    let n = t.dim();
    let domain = t.defect_space().frame();
    let codomain = t.codefect_space().frame();
    if domain.ncols() == 0 || codomain.ncols() == 0 {
        return Ok(zeros(codomain.ncols(), domain.ncols()));
    }
    let resolvent = ComplexMatrix::identity(n, n) - t.matrix().adjoint() * lambda;
    let rhs = t.defect() * domain;
    let solved = resolvent.lu().solve(&rhs).ok_or(Error::SingularResolvent)?;
    let full = -(t.matrix() * domain) + t.codefect() * solved * lambda;
    Ok(codomain.adjoint() * full)
}

fn radial_limit<F>(eval: F, zeta: Complex64, eps: f64) -> Result<ComplexMatrix>
where
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    let near = eval(zeta * (1.0 - eps))?;
    let far = eval(zeta * (1.0 - 2.0 * eps))?;
    Ok(near * Complex64::new(2.0, 0.0) - far)
}

/// Deterministic sample of `Θ_T` on `grid`; blocks are assembled in grid
/// order whatever the evaluation schedule.
pub fn sample_charfn(t: &Contraction, grid: &GridSpec) -> Result<CharFnSample> {
    grid.validate()?;
    let disk_points = grid.disk_points();
    let boundary_points = grid.boundary_points();
    let eps = grid.boundary_eps;
    let disk_blocks = map_indexed(disk_points.len(), |i| eval_charfn(t, disk_points[i]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let boundary_blocks = map_indexed(boundary_points.len(), |i| {
        radial_limit(|z| eval_charfn(t, z), boundary_points[i], eps)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CharFnSample {
        domain_space: t.defect_space().clone(),
        codomain_space: t.codefect_space().clone(),
        disk_points,
        disk_blocks,
        boundary_points,
        boundary_blocks,
        boundary_eps: eps,
        tol: t.tolerance(),
    })
}

/// Sample an explicitly given `q × p` function on `grid`, using the same
/// radial-limit rule as [`sample_charfn`].
pub fn sample_function<F>(grid: &GridSpec, tol: Tolerance, f: F) -> Result<CharFnSample>
where
    F: Fn(Complex64) -> ComplexMatrix + Sync + Send,
{
    grid.validate()?;
    let disk_points = grid.disk_points();
    let boundary_points = grid.boundary_points();
    let eps = grid.boundary_eps;
    let disk_blocks = map_indexed(disk_points.len(), |i| f(disk_points[i]));
    let boundary_blocks = map_indexed(boundary_points.len(), |i| {
        radial_limit(|z| Ok(f(z)), boundary_points[i], eps).expect("explicit evaluation")
    });
    CharFnSample::from_blocks(
        disk_points,
        disk_blocks,
        boundary_points,
        boundary_blocks,
        eps,
        tol,
    )
}

/// Decomposition `Ξ(λ) = Ξ^p(λ) ⊕ Ξ₀` of a sampled function. Subspaces are
/// in the coordinates of the sample's domain (`C^p`) and codomain (`C^q`).
#[derive(Debug, Clone, PartialEq)]
pub struct PureSplit {
    pub pure_domain: Subspace,
    pub unitary_domain: Subspace,
    pub pure_codomain: Subspace,
    pub unitary_codomain: Subspace,
    /// `Ξ₀` from `unitary_domain` onto `unitary_codomain` (their frames).
    pub unitary_constant: ComplexMatrix,
    /// Compressions of the interior blocks to the pure parts.
    pub pure_blocks: Vec<ComplexMatrix>,
    /// `max_λ ||Ξ(λ)|_{E''} - Ξ₀||` over the sample.
    pub constancy_deviation: f64,
    /// `min (1 - ||Ξ^p(λ) x||)` over sampled `λ` and pure-domain frame vectors.
    pub purity_margin: f64,
}

/// Split off the largest constant unitary summand: vectors on which every
/// interior block is isometric and all blocks agree.
pub fn pure_split(f: &CharFnSample) -> Result<PureSplit> {
    let tol = f.tol;
    let p = f.domain_dim();
    let q = f.codomain_dim();
    let mut common = Subspace::full(p, tol);
    for block in &f.disk_blocks {
        if common.is_zero() {
            break;
        }
        common = common.intersect(&isometric_directions(block, tol)?)?;
    }
    let unitary_domain = if common.is_zero() || f.disk_blocks.len() < 2 {
        common
    } else {
        // Restrict to vectors mapped identically at every sampled point.
        let frame = common.frame();
        let base = &f.disk_blocks[0] * frame;
        let r = frame.ncols();
        let mut stacked = zeros(q * (f.disk_blocks.len() - 1), r);
        for (i, block) in f.disk_blocks.iter().skip(1).enumerate() {
            let diff = block * frame - &base;
            stacked.view_mut((i * q, 0), (q, r)).copy_from(&diff);
        }
        let null = right_null_vectors_with_floor(&stacked, &tol, tol.residual_tol)?;
        Subspace::from_orthonormal(frame * null, tol)
    };
    let reference = &f.disk_blocks[0];
    let image = reference * unitary_domain.frame();
    let unitary_codomain = Subspace::from_orthonormal(
        range_vectors_with_floor(&image, &tol, tol.residual_tol)?,
        tol,
    );
    let unitary_constant = unitary_codomain.frame().adjoint() * &image;
    let pure_domain = unitary_domain.complement()?;
    let pure_codomain = if q == 0 {
        Subspace::zero(0, tol)
    } else {
        unitary_codomain.complement()?
    };
    let mut constancy_deviation: f64 = 0.0;
    let mut purity_margin = f64::INFINITY;
    let mut pure_blocks = Vec::with_capacity(f.disk_blocks.len());
    for block in &f.disk_blocks {
        let on_unitary = unitary_codomain.frame().adjoint() * block * unitary_domain.frame();
        constancy_deviation = constancy_deviation.max(op_norm(&(on_unitary - &unitary_constant)));
        let pure = pure_codomain.frame().adjoint() * block * pure_domain.frame();
        for j in 0..pure.ncols() {
            purity_margin = purity_margin.min(1.0 - pure.column(j).norm());
        }
        pure_blocks.push(pure);
    }
    Ok(PureSplit {
        pure_domain,
        unitary_domain,
        pure_codomain,
        unitary_codomain,
        unitary_constant,
        pure_blocks,
        constancy_deviation,
        purity_margin,
    })
}

/// `⋁_λ Θ(λ)𝒟` over the sampled interior points, and its complement in the
/// codomain (the `𝒟′` / `𝒟″` pair).
pub fn analytic_range_span(f: &CharFnSample) -> Result<(Subspace, Subspace)> {
    let tol = f.tol;
    let q = f.codomain_dim();
    let p = f.domain_dim();
    let mut wide = zeros(q, p * f.disk_blocks.len());
    for (i, block) in f.disk_blocks.iter().enumerate() {
        wide.view_mut((0, i * p), (q, p)).copy_from(block);
    }
    let span = Subspace::from_orthonormal(range_vectors_with_floor(&wide, &tol, tol.residual_tol)?, tol);
    let rest = span.complement()?;
    Ok((span, rest))
}

fn prefix_products(sigma: &[f64], len: usize) -> Vec<f64> {
    let mut acc = 1.0;
    (0..len)
        .map(|t| {
            acc *= sigma.get(t).copied().unwrap_or(0.0);
            acc
        })
        .collect()
}

/// First grid point where the singular-value profiles of `f` and `g`
/// differ by more than `threshold`, compared first through prefix products
/// and then value by value.
pub(crate) fn profile_mismatch(
    f: &[&ComplexMatrix],
    g: &[&ComplexMatrix],
    threshold: f64,
) -> Result<Option<Certificate>> {
    for (i, (a, b)) in f.iter().zip(g.iter()).enumerate() {
        let sa = singular_values(a)?;
        let sb = singular_values(b)?;
        let len = sa.len().max(sb.len());
        let pa = prefix_products(&sa, len);
        let pb = prefix_products(&sb, len);
        for k in 0..len {
            if (pa[k] - pb[k]).abs() > threshold {
                return Ok(Some(Certificate::SingularValueProduct {
                    point: i,
                    k: k + 1,
                    lhs: pa[k],
                    rhs: pb[k],
                }));
            }
        }
        for k in 0..len {
            let x = sa.get(k).copied().unwrap_or(0.0);
            let y = sb.get(k).copied().unwrap_or(0.0);
            if (x - y).abs() > threshold {
                return Ok(Some(Certificate::SingularValueProduct {
                    point: i,
                    k: k + 1,
                    lhs: x,
                    rhs: y,
                }));
            }
        }
    }
    Ok(None)
}

fn reshape(v: &[Complex64], rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, cols, v)
}

struct CoincidenceRun {
    residual: f64,
    iterations: usize,
    tau: ComplexMatrix,
    tau_prime: ComplexMatrix,
}

/// Decide whether `G(λ) = τ F(λ) τ′` for unitaries `τ`, `τ′` on the common
/// grid.
///
/// Refutes on block-shape or singular-value-profile mismatch. Otherwise the
/// linear relation `G(λ)Y = τF(λ)` (with `Y = τ′*`) is solved for its null
/// space and a unitary pair inside it is sought by alternating polar
/// projections from seeded random starts. Starts run in batches of eight; the
/// first batch whose best start reaches `residual_tol` decides.
pub fn coincide(f: &CharFnSample, g: &CharFnSample, budget: &Budget) -> Result<OrderVerdict> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    let tol = f.tol;
    let mut diagnostics = Diagnostics {
        grid_points: f.point_count(),
        ..Diagnostics::default()
    };
    let fs: Vec<&ComplexMatrix> = f.all_blocks().collect();
    let gs: Vec<&ComplexMatrix> = g.all_blocks().collect();
    let (q, p) = fs[0].shape();
    if gs[0].shape() != (q, p) {
        return Ok(OrderVerdict::refuted(
            Certificate::BlockShape {
                left: (q, p),
                right: gs[0].shape(),
            },
            diagnostics,
        ));
    }
    if let Some(cert) = profile_mismatch(&fs, &gs, tol.residual_tol)? {
        return Ok(OrderVerdict::refuted(cert, diagnostics));
    }
    if p == 0 || q == 0 {
        let witness = Witness::Coincidence {
            tau: ComplexMatrix::identity(q, q),
            tau_prime: ComplexMatrix::identity(p, p),
        };
        return Ok(OrderVerdict::holds(witness, diagnostics));
    }

    // Unknown z = [vec τ ; vec Y], equation G_i Y - τ F_i = 0 per point.
    let unknowns = q * q + p * p;
    let mut system = zeros(fs.len() * q * p, unknowns);
    let eye_q = ComplexMatrix::identity(q, q);
    let eye_p = ComplexMatrix::identity(p, p);
    for (i, (fb, gb)) in fs.iter().zip(gs.iter()).enumerate() {
        let tau_part = -(fb.transpose().kronecker(&eye_q));
        let y_part = eye_p.kronecker(*gb);
        let r0 = i * q * p;
        system.view_mut((r0, 0), (q * p, q * q)).copy_from(&tau_part);
        system.view_mut((r0, q * q), (q * p, p * p)).copy_from(&y_part);
    }
    let null = right_null_vectors(&system, &tol)?;
    let dim = null.ncols();
    if dim == 0 {
        diagnostics.notes.push(alloc::string::String::from(
            "linear relation G(λ)Y = τF(λ) has only the trivial solution on this grid",
        ));
        return Ok(OrderVerdict::unknown(diagnostics));
    }

    let residual_of = |tau: &ComplexMatrix, y: &ComplexMatrix| -> f64 {
        fs.iter()
            .zip(gs.iter())
            .map(|(fb, gb)| op_norm(&(*gb * y - tau * *fb)))
            .fold(0.0, f64::max)
    };
    let run = |start: usize| -> Result<CoincidenceRun> {
        let mut rng = seeded(budget.seed, start as u64);
        let mut coeffs = ComplexMatrix::from_fn(dim, 1, |_, _| gaussian(&mut rng));
        let mut tau = eye_q.clone();
        let mut y = eye_p.clone();
        let mut iterations = 0;
        for it in 0..budget.max_iters.max(1) {
            iterations = it + 1;
            let z = &null * &coeffs;
            tau = polar_isometry(&reshape(&z.as_slice()[..q * q], q, q))?;
            y = polar_isometry(&reshape(&z.as_slice()[q * q..], p, p))?;
            let mut zu = zeros(unknowns, 1);
            zu.view_mut((0, 0), (q * q, 1))
                .copy_from_slice(tau.as_slice());
            zu.view_mut((q * q, 0), (p * p, 1)).copy_from_slice(y.as_slice());
            coeffs = null.adjoint() * &zu;
            let gap = (&zu - &null * &coeffs).norm();
            if gap <= 0.05 * tol.residual_tol {
                break;
            }
        }
        Ok(CoincidenceRun {
            residual: residual_of(&tau, &y),
            iterations,
            tau,
            tau_prime: y.adjoint(),
        })
    };

    let best = batched_search(budget, &mut diagnostics, tol.residual_tol, |s| {
        run(s).map(|r| (r.residual, r.iterations, r))
    })?;
    match best {
        Some(r) if r.residual <= tol.residual_tol => Ok(OrderVerdict::holds(
            Witness::Coincidence {
                tau: r.tau,
                tau_prime: r.tau_prime,
            },
            diagnostics,
        )),
        _ => Ok(OrderVerdict::unknown(diagnostics)),
    }
}
