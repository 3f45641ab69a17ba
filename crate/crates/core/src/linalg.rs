//! Dense complex kernels shared by every other module, plus the tolerance
//! policy that turns exact identities into thresholded tests.
//!
//! Hermitian eigendecomposition, Schur and QR are delegated to `nalgebra`;
//! the SVD is a one-sided Jacobi iteration on top of its QR. This module
//! normalizes their output (sorted spectra, full bases, canonical frames)
//! and adds the pieces the rest of the crate needs on top.

use alloc::vec::Vec;

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::float::{hypot, sqrt};

/// Dense complex matrix with explicit shape. Storage is column-major
/// (`nalgebra`); documents serialize it row-major.
pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Thresholds applied wherever an exact equality becomes a numerical test.
///
/// `rank_tol` cuts singular values relative to the largest one (or, for
/// defect-type operators `I - X*X`, relative to the identity); `residual_tol`
/// bounds operator-norm residuals absolutely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_tol: 1e-9,
            residual_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_tol: f64, residual_tol: f64) -> Result<Self> {
        let ok = |t: f64| t > 0.0 && t < 1.0;
        if ok(rank_tol) && ok(residual_tol) {
            Ok(Tolerance {
                rank_tol,
                residual_tol,
            })
        } else {
            Err(Error::InvalidTolerance {
                rank_tol,
                residual_tol,
            })
        }
    }

    /// Number of singular values (sorted, nonincreasing) above the relative cut.
    pub fn numerical_rank(&self, sigma: &[f64]) -> usize {
        self.numerical_rank_with_floor(sigma, 0.0)
    }

    /// Like [`Tolerance::numerical_rank`], but singular values at or below the
    /// absolute `floor` never count. Used where an all-round-off matrix must
    /// read as zero rather than as full rank.
    pub fn numerical_rank_with_floor(&self, sigma: &[f64], floor: f64) -> usize {
        match sigma.first() {
            Some(&smax) if smax > f64::MIN_POSITIVE => {
                let cut = (self.rank_tol * smax).max(floor);
                sigma.iter().take_while(|&&s| s > cut).count()
            }
            _ => 0,
        }
    }
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::InvalidInput)
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Build a complex matrix from real row-major entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count must equal rows*cols");
    ComplexMatrix::from_fn(rows, cols, |i, j| Complex64::new(entries[i * cols + j], 0.0))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(values[i], 0.0)
        } else {
            ZERO
        }
    })
}

pub fn diag(values: &[Complex64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Horizontal concatenation `[a, b]`.
pub fn hstack(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

pub fn power(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Frobenius inner product `tr(a* b)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    sqrt(m.iter().map(|z| z.norm_sqr()).sum())
}

/// Thin singular value decomposition with nonincreasing singular values.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            let mut col = us.column_mut(j);
            col *= Complex64::new(s, 0.0);
        }
        us * self.v.adjoint()
    }
}

const MAX_SWEEPS: usize = 80;

fn raw_svd(m: &ComplexMatrix) -> Result<Svd> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(Svd {
            u: zeros(rows, 0),
            sigma: Vec::new(),
            v: zeros(cols, 0),
        });
    }
    if rows < cols {
        let s = jacobi_svd(&m.adjoint())?;
        return Ok(Svd {
            u: s.v,
            sigma: s.sigma,
            v: s.u,
        });
    }
    jacobi_svd(m)
}

/// One-sided (Hestenes) Jacobi SVD of a matrix with `rows >= cols`. Tall
/// inputs are first reduced to their square triangular QR factor.
fn jacobi_svd(m: &ComplexMatrix) -> Result<Svd> {
    let (rows, n) = m.shape();
    let (q, mut a) = if rows > n {
        let (q, r) = m.clone().qr().unpack();
        (Some(q), r)
    } else {
        (None, m.clone())
    };
    let mut v = identity(n);
    // Tighter thresholds let round-off keep equal-norm columns spinning.
    let threshold = 64.0 * f64::EPSILON;
    // Columns below this norm are numerically zero; rotating them only
    // shuffles round-off.
    let negligible = 1e-2 * f64::EPSILON * a.norm();
    let negligible_sq = negligible * negligible;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for r in p + 1..n {
                let (alpha, beta, gamma) = column_gram(&a, p, r);
                let g = gamma.norm();
                if g == 0.0
                    || alpha <= negligible_sq
                    || beta <= negligible_sq
                    || g <= threshold * sqrt(alpha) * sqrt(beta)
                {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + hypot(1.0, zeta));
                let c = 1.0 / hypot(1.0, t);
                let s = c * t;
                rotate_columns(&mut a, p, r, phase, c, s);
                rotate_columns(&mut v, p, r, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Decomposition("svd: Jacobi sweeps did not converge"));
    }
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let mut u = zeros(n, n);
    let mut v_sorted = zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut filled = 0;
    for (k, &j) in order.iter().enumerate() {
        sigma.push(norms[j]);
        v_sorted.set_column(k, &v.column(j));
        if norms[j] > negligible {
            u.set_column(k, &(a.column(j) / Complex64::new(norms[j], 0.0)));
            filled = k + 1;
        }
    }
    complete_columns(&mut u, filled);
    let u = match q {
        Some(q) => q * u,
        None => u,
    };
    Ok(Svd {
        u,
        sigma,
        v: v_sorted,
    })
}

/// `(||a_p||^2, ||a_r||^2, <a_p, a_r>)`.
fn column_gram(a: &ComplexMatrix, p: usize, r: usize) -> (f64, f64, Complex64) {
    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for (x, y) in a.column(p).iter().zip(a.column(r).iter()) {
        alpha += x.norm_sqr();
        beta += y.norm_sqr();
        gamma += x.conj() * y;
    }
    (alpha, beta, gamma)
}

/// Columns `p, r` times `diag(1, phase)` then the real rotation `[[c, s], [-s, c]]`.
fn rotate_columns(a: &mut ComplexMatrix, p: usize, r: usize, phase: Complex64, c: f64, s: f64) {
    for i in 0..a.nrows() {
        let x = a[(i, p)];
        let y = a[(i, r)] * phase;
        a[(i, p)] = x * c - y * s;
        a[(i, r)] = x * s + y * c;
    }
}

/// Extends the first `filled` orthonormal columns of a square matrix to a
/// unitary one with Gram-Schmidt on standard basis vectors.
fn complete_columns(u: &mut ComplexMatrix, filled: usize) {
    let n = u.nrows();
    for k in filled..u.ncols() {
        let mut best: Option<(f64, ComplexMatrix)> = None;
        for e in 0..n {
            let mut x = zeros(n, 1);
            x[(e, 0)] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for j in 0..k {
                    let col = u.column(j);
                    let proj = col.dotc(&x.column(0));
                    x -= col * proj;
                }
            }
            let norm = x.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, x));
            }
        }
        if let Some((norm, x)) = best {
            u.set_column(k, &(x.column(0) / Complex64::new(norm, 0.0)));
        }
    }
}

/// `M = U diag(sigma) V*` with `U`, `V` orthonormal columns and `sigma`
/// nonincreasing.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    raw_svd(m)
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(raw_svd(m)?.sigma)
}

/// Largest singular value, from the top eigenvalue of the smaller Gram
/// matrix. A failed eigensolve falls back to the Frobenius norm,
/// which is an upper bound.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if !is_finite(m) {
        return f64::INFINITY;
    }
    let gram = if m.nrows() < m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    match hermitian_eigen(&gram) {
        Ok((mu, _)) => sqrt(mu.first().copied().unwrap_or(0.0).max(0.0)),
        Err(_) => frobenius_norm(m),
    }
}

/// Orthonormal basis of the right null space, `cols - rank` columns.
pub fn right_null_vectors(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    right_null_vectors_with_floor(m, tol, 0.0)
}

/// Right null space with an absolute singular-value floor, see
/// [`Tolerance::numerical_rank_with_floor`].
pub fn right_null_vectors_with_floor(
    m: &ComplexMatrix,
    tol: &Tolerance,
    floor: f64,
) -> Result<ComplexMatrix> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(zeros(0, 0));
    }
    if rows == 0 {
        return Ok(identity(cols));
    }
    // Pad with zero rows so the thin SVD yields a full right basis.
    let padded;
    let target = if rows < cols {
        let mut p = zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let s = raw_svd(target)?;
    let rank = tol.numerical_rank_with_floor(&s.sigma, floor);
    Ok(s.v.columns(rank, cols - rank).into_owned())
}

/// Orthonormal basis of the column space, `rank` columns.
pub fn range_vectors(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    range_vectors_with_floor(m, tol, 0.0)
}

pub fn range_vectors_with_floor(
    m: &ComplexMatrix,
    tol: &Tolerance,
    floor: f64,
) -> Result<ComplexMatrix> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(zeros(rows, 0));
    }
    let s = raw_svd(m)?;
    let rank = tol.numerical_rank_with_floor(&s.sigma, floor);
    Ok(s.u.columns(0, rank).into_owned())
}

/// Eigendecomposition of the Hermitian part `(H + H*)/2`; eigenvalues are
/// returned in nonincreasing order with matching eigenvector columns.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    ensure_finite(h)?;
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: h.ncols(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(herm, f64::EPSILON, 0)
        .ok_or(Error::Decomposition("hermitian eigen"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Complex Schur form `M = Q T Q*`, `T` upper triangular.
pub fn schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    ensure_finite(m)?;
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    if n == 0 {
        return Ok((zeros(0, 0), zeros(0, 0)));
    }
    let s = Schur::try_new(m.clone(), f64::EPSILON, 0).ok_or(Error::Decomposition("schur"))?;
    Ok(s.unpack())
}

/// Eigenvalues read off the diagonal of the complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Nearest matrix with orthonormal columns (polar factor `U V*`).
pub fn polar_isometry(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return Ok(zeros(rows, cols));
    }
    if rows < cols {
        return Err(Error::ShapeMismatch(alloc::format!(
            "polar isometry needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let s = raw_svd(m)?;
    Ok(&s.u * s.v.adjoint())
}

/// `||X* X - I||`, the isometry defect of `X`.
pub fn isometry_residual(x: &ComplexMatrix) -> f64 {
    op_norm(&(x.adjoint() * x - identity(x.ncols())))
}

/// `max(||U*U - I||, ||UU* - I||)` for square `U`.
pub fn unitary_residual(u: &ComplexMatrix) -> f64 {
    let a = isometry_residual(u);
    let b = op_norm(&(u * u.adjoint() - identity(u.nrows())));
    a.max(b)
}

/// Deterministic orthonormal frame for the column span of an orthonormal
/// `frame`: pivoted Gram–Schmidt over the columns of the projector.
///
/// Coordinate subspaces come back as exact standard basis vectors, and each
/// column has its pivot entry real and positive, so the result depends only on
/// the subspace (up to rounding), not on which basis produced it.
pub fn canonical_frame(frame: &ComplexMatrix) -> ComplexMatrix {
    let (n, k) = frame.shape();
    if k == 0 {
        return zeros(n, 0);
    }
    let proj = frame * frame.adjoint();
    let mut residual: Vec<nalgebra::DVector<Complex64>> =
        (0..n).map(|j| proj.column(j).into_owned()).collect();
    let mut out = zeros(n, k);
    let mut used = alloc::vec![false; n];
    for c in 0..k {
        let mut best = None;
        let mut best_norm = -1.0;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let nrm = residual[j].norm();
            // Prefer the earliest index among numerically tied candidates.
            if nrm > best_norm * (1.0 + 1e-12) + 1e-14 {
                best_norm = nrm;
                best = Some(j);
            }
        }
        let j = match best {
            Some(j) => j,
            None => break,
        };
        used[j] = true;
        let mut v = residual[j].clone();
        // Two passes of Gram–Schmidt against the accepted columns.
        for _ in 0..2 {
            for p in 0..c {
                let q = out.column(p);
                let coeff: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for i in 0..n {
                    v[i] -= q[i] * coeff;
                }
            }
        }
        let nrm = v.norm();
        if nrm <= 0.0 {
            break;
        }
        // Rotate the phase so the pivot entry is real positive.
        let pivot = v[j];
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            ONE
        };
        for i in 0..n {
            out[(i, c)] = v[i] * phase / nrm;
        }
        let q = out.column(c).into_owned();
        for r in residual.iter_mut() {
            let coeff: Complex64 = q.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum();
            for i in 0..n {
                r[i] -= q[i] * coeff;
            }
        }
    }
    out
}

/// Defect data of a (possibly rectangular) contraction `X`: the positive
/// square root `(I - X*X)^{1/2}` and an orthonormal frame of its range.
///
/// Eigenvalues of `I - X*X` at or below `rank_tol` are treated as zero
/// (down to `-residual_tol`; anything more negative means `X` is not a
/// contraction). Range membership is
/// decided on `I - X*X` itself with cut `rank_tol` (the identity sets the
/// scale), never on the square root, which would amplify round-off.
pub fn defect(x: &ComplexMatrix, tol: &Tolerance) -> Result<(ComplexMatrix, ComplexMatrix)> {
    defect_with_floor(x, tol, tol.residual_tol)
}

/// [`defect`] with an explicit clamp floor: eigenvalues of `I - X*X` in
/// `[-floor, 0)` are treated as zero.
pub fn defect_with_floor(
    x: &ComplexMatrix,
    tol: &Tolerance,
    floor: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    ensure_finite(x)?;
    let n = x.ncols();
    let gram = identity(n) - x.adjoint() * x;
    let (mu, vecs) = hermitian_eigen(&gram)?;
    if let Some(&lowest) = mu.last() {
        if lowest < -floor {
            return Err(Error::NotContractive {
                sigma_max: sqrt(1.0 - lowest),
            });
        }
    }
    // Eigenvalues at or below the cut are dropped from the root too, so the
    // root's range is exactly the returned frame.
    let rank = mu.iter().take_while(|&&m| m > tol.rank_tol).count();
    let mut root = zeros(n, n);
    for (j, &m) in mu.iter().take(rank).enumerate() {
        let v = vecs.column(j);
        root += (v * v.adjoint()) * Complex64::new(sqrt(m), 0.0);
    }
    let frame = canonical_frame(&vecs.columns(0, rank).into_owned());
    Ok((root, frame))
}

/// Orthonormal basis (Frobenius inner product) of the joint null space of the
/// linear maps `X ↦ Σ_k L_k X R_k` for each equation in `equations`, where
/// `X` is `rows × cols`.
///
/// Each equation is a list of `(L, R)` pairs; the maps are stacked and the
/// null space of the stacked `vec` matrix is returned, reshaped back into
/// `rows × cols` matrices.
pub fn linear_null_space(
    rows: usize,
    cols: usize,
    equations: &[Vec<(ComplexMatrix, ComplexMatrix)>],
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    let unknowns = rows * cols;
    if unknowns == 0 {
        return Ok(Vec::new());
    }
    let mut blocks = Vec::new();
    for terms in equations {
        let (out_r, out_c) = match terms.first() {
            Some((l, r)) => (l.nrows(), r.ncols()),
            None => continue,
        };
        let mut op = zeros(out_r * out_c, unknowns);
        for (l, r) in terms {
            // vec(L X R) = (R^T ⊗ L) vec(X), column-major vec.
            let kron = r.transpose().kronecker(l);
            op += kron;
        }
        blocks.push(op);
    }
    let total_rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut stacked = zeros(total_rows, unknowns);
    let mut r0 = 0;
    for b in &blocks {
        stacked.view_mut((r0, 0), (b.nrows(), unknowns)).copy_from(b);
        r0 += b.nrows();
    }
    let null = right_null_vectors(&stacked, tol)?;
    Ok((0..null.ncols())
        .map(|j| ComplexMatrix::from_column_slice(rows, cols, null.column(j).as_slice()))
        .collect())
}
