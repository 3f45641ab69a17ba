//! Truncated Schäffer dilations.
//!
//! The dilation space is `𝒟_{A*}^{d} ⊕ ℋ ⊕ 𝒟_A^{d}` (backward copies
//! `B_{-d} … B_{-1}`, then `ℋ`, then forward copies `F_1 … F_d`). The middle
//! row is the Julia operator `[A D_{A*}; D_A -A*]`, the copies shift forward,
//! and the last forward copy wraps round to the first backward one, which
//! keeps `U` exactly unitary. Anything leaving `ℋ` needs `2d + 1` steps to
//! come back, so `A^n = P_ℋ U^n|ℋ` holds for `n <= 2d`.

use alloc::vec::Vec;

use crate::contraction::Contraction;
use crate::error::{Error, Result};
use crate::linalg::{
    identity, isometry_residual, op_norm, power, svd, unitary_residual, zeros, ComplexMatrix,
};
use crate::order::witness_residual;
use crate::subspace::Subspace;

pub const DEFAULT_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDilation {
    pub depth: usize,
    pub space_dim: usize,
    /// `dim 𝒟_A`, the size of each buffer copy.
    pub defect_dim: usize,
    pub u: ComplexMatrix,
    /// Copy of `ℋ` inside the dilation space.
    pub embed: Subspace,
}

impl TruncatedDilation {
    /// Offset of `ℋ` in the dilation space.
    pub fn h_offset(&self) -> usize {
        self.depth * self.defect_dim
    }

    /// `P_ℋ U^n|ℋ`.
    pub fn compressed_power(&self, n: usize) -> ComplexMatrix {
        let f = self.embed.frame();
        f.adjoint() * power(&self.u, n) * f
    }

    /// `max_{n <= horizon} ||A^n - P_ℋ U^n|ℋ||`.
    pub fn power_residual(&self, a: &ComplexMatrix, horizon: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let f = self.embed.frame();
        let mut un = identity(self.space_dim);
        let mut an = identity(a.nrows());
        for n in 0..=horizon {
            if n > 0 {
                un = &un * &self.u;
                an = &an * a;
            }
            worst = worst.max(op_norm(&(&an - f.adjoint() * &un * f)));
        }
        worst
    }

    pub fn unitary_residual(&self) -> f64 {
        unitary_residual(&self.u)
    }

    /// `dim ⋁_{|k| <= d} U^k ℋ`.
    pub fn orbit_span_dim(&self) -> Result<usize> {
        let orbit = orbit(&self.u, self.embed.frame(), self.depth);
        Ok(Subspace::span(&orbit, self.embed.tolerance())?.dim())
    }
}

/// Truncated minimal unitary dilation of `A` with `depth` buffer copies on
/// each side.
pub fn schaffer_dilation(a: &Contraction, depth: usize) -> Result<TruncatedDilation> {
    if depth == 0 {
        return Err(Error::WindowTooSmall(alloc::string::String::from(
            "dilation depth must be at least 1",
        )));
    }
    let tol = a.tolerance();
    let n = a.dim();
    let m = a.matrix();
    let ea = a.defect_space().frame();
    let es = a.codefect_space().frame();
    let delta = ea.ncols();
    if es.ncols() != delta {
        return Err(Error::PreconditionViolated(alloc::format!(
            "defect indices differ: {} and {}",
            delta,
            es.ncols()
        )));
    }
    let dim = n + 2 * depth * delta;
    let h = depth * delta;
    // Slot offsets: B_{-k} at (depth - k)·δ, F_k at h + n + (k - 1)·δ.
    let back = |k: usize| (depth - k) * delta;
    let fwd = |k: usize| h + n + (k - 1) * delta;
    let mut u = zeros(dim, dim);
    u.view_mut((h, h), (n, n)).copy_from(m);
    if delta > 0 {
        u.view_mut((fwd(1), h), (delta, n))
            .copy_from(&(ea.adjoint() * a.defect()));
        u.view_mut((h, back(1)), (n, delta))
            .copy_from(&(a.codefect() * es));
        u.view_mut((fwd(1), back(1)), (delta, delta))
            .copy_from(&(-(ea.adjoint() * m.adjoint() * es)));
        let eye = identity(delta);
        for k in 2..=depth {
            u.view_mut((back(k - 1), back(k)), (delta, delta)).copy_from(&eye);
            u.view_mut((fwd(k), fwd(k - 1)), (delta, delta)).copy_from(&eye);
        }
        u.view_mut((back(depth), fwd(depth)), (delta, delta)).copy_from(&eye);
    }
    let idx: Vec<usize> = (h..h + n).collect();
    Ok(TruncatedDilation {
        depth,
        space_dim: dim,
        defect_dim: delta,
        u,
        embed: Subspace::coordinate(dim, &idx, tol),
    })
}

/// Columns `[U^{-d}F, …, U^{d}F]`.
fn orbit(u: &ComplexMatrix, f: &ComplexMatrix, depth: usize) -> ComplexMatrix {
    let (rows, cols) = f.shape();
    let mut out = zeros(rows, (2 * depth + 1) * cols);
    let adj = u.adjoint();
    let mut fwd = f.clone();
    let mut bwd = f.clone();
    out.view_mut((0, depth * cols), (rows, cols)).copy_from(f);
    for k in 1..=depth {
        fwd = u * fwd;
        bwd = &adj * bwd;
        out.view_mut((0, (depth + k) * cols), (rows, cols)).copy_from(&fwd);
        out.view_mut((0, (depth - k) * cols), (rows, cols)).copy_from(&bwd);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilationOrderReport {
    pub depth: usize,
    /// `dim ⋁_{|k|<=d} U^k ℋ_A`.
    pub domain_span_dim: usize,
    /// `dim 𝒦 = dim ⋁_{|k|<=d} V^k Ωℋ_A`.
    pub k_span_dim: usize,
    /// `||Ω̃*Ω̃ - I||` on the window.
    pub isometry_residual: f64,
    /// Size of `Σ V^kΩx_k` over combinations with `Σ U^k x_k = 0`.
    pub well_defined_residual: f64,
    /// `||Ω̃U - VΩ̃||` on `U^k ℋ_A`, `|k| < d`.
    pub intertwining_residual: f64,
    /// `||Ω̃|ℋ_A - Ω||`.
    pub restriction_residual: f64,
    /// Power identities of both dilations up to `2d`.
    pub power_residual: f64,
    /// `𝒦` is invariant under `V` (the window already holds the whole orbit).
    pub window_closed: bool,
    pub tolerance: f64,
}

impl DilationOrderReport {
    pub fn passed(&self) -> bool {
        let t = self.tolerance;
        self.isometry_residual <= t
            && self.well_defined_residual <= t
            && self.intertwining_residual <= t
            && self.restriction_residual <= t
            && self.power_residual <= t
            && self.k_span_dim == self.domain_span_dim
    }
}

/// Extend a witness `Ω` of `A ≼ B` to the truncated dilations by
/// `Ω̃U^k x = V^kΩx` on the window `|k| <= depth`, and check it.
pub fn verify_order_extends_to_dilations(
    a: &Contraction,
    b: &Contraction,
    omega: &ComplexMatrix,
    depth: usize,
) -> Result<DilationOrderReport> {
    if depth == 0 {
        return Err(Error::WindowTooSmall(alloc::string::String::from(
            "depth 0 leaves no orbit to compare; use depth >= 1",
        )));
    }
    let tol = a.tolerance();
    let residual = witness_residual(omega, a.matrix(), b.matrix(), false)?;
    if residual > tol.residual_tol {
        return Err(Error::PreconditionViolated(alloc::format!(
            "Omega does not witness A below B (residual {residual:e})"
        )));
    }
    let u = schaffer_dilation(a, depth)?;
    let v = schaffer_dilation(b, depth)?;
    let power_residual = u
        .power_residual(a.matrix(), 2 * depth)
        .max(v.power_residual(b.matrix(), 2 * depth));
    let ja = u.embed.frame();
    let jb_omega = v.embed.frame() * omega;
    let xu = orbit(&u.u, ja, depth);
    let xv = orbit(&v.u, &jb_omega, depth);

    let s = svd(&xu)?;
    let rank = tol.numerical_rank(&s.sigma);
    let null_residual = if rank < xu.ncols() {
        op_norm(&(&xv * s.v.columns(rank, s.v.ncols() - rank)))
    } else {
        0.0
    };
    // Ω̃ in the frame s.u[:, ..rank] of the domain window.
    let mut inv_sigma = zeros(rank, rank);
    for i in 0..rank {
        inv_sigma[(i, i)] = crate::Complex64::new(1.0 / s.sigma[i], 0.0);
    }
    let frame = s.u.columns(0, rank).into_owned();
    let m = &xv * s.v.columns(0, rank) * inv_sigma;
    let tilde = &m * frame.adjoint();

    let n = a.dim();
    let inner = xu.columns(0, 2 * depth * n).into_owned();
    let intertwining_residual = if inner.ncols() == 0 {
        0.0
    } else {
        op_norm(&(&tilde * &u.u * &inner - &v.u * &tilde * &inner))
    };
    let restriction_residual = op_norm(&(&tilde * ja - &jb_omega));
    let k_span = Subspace::span(&xv, tol)?;
    let window_closed = k_span.invariance_residual(&v.u) <= tol.residual_tol;
    Ok(DilationOrderReport {
        depth,
        domain_span_dim: rank,
        k_span_dim: k_span.dim(),
        isometry_residual: isometry_residual(&m),
        well_defined_residual: null_residual,
        intertwining_residual,
        restriction_residual,
        power_residual,
        window_closed,
        tolerance: tol.residual_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cyclic_permutation, jordan_block, jordan_matrix};
    use crate::linalg::{direct_sum, from_real_rows};
    use crate::Tolerance;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn unitary_needs_no_buffers() {
        let z = Contraction::validate(cyclic_permutation(3), tol()).unwrap();
        let d = schaffer_dilation(&z, 4).unwrap();
        assert_eq!(d.space_dim, 3);
        assert!(op_norm(&(&d.u - z.matrix())) < 1e-14);
    }

    #[test]
    fn zero_operator_gives_five_cycle() {
        let a = jordan_block(1, tol()).unwrap();
        let d = schaffer_dilation(&a, 2).unwrap();
        assert_eq!(d.space_dim, 5);
        // Every column has a single unit entry and U^5 = I with no shorter
        // return: a cyclic permutation of the five slots.
        for j in 0..5 {
            let ones = d.u.column(j).iter().filter(|x| (x.re - 1.0).abs() < 1e-15).count();
            let zeros = d.u.column(j).iter().filter(|x| x.norm() < 1e-15).count();
            assert_eq!((ones, zeros), (1, 4));
        }
        for k in 1..5 {
            assert!(op_norm(&(power(&d.u, k) - identity(5))) > 0.5);
        }
        assert!(op_norm(&(power(&d.u, 5) - identity(5))) < 1e-15);
        for n in 1..=2 {
            assert!(op_norm(&d.compressed_power(n)) < 1e-15);
        }
    }

    #[test]
    fn jordan_power_identity() {
        let a = jordan_block(2, tol()).unwrap();
        let d = schaffer_dilation(&a, 3).unwrap();
        assert!(d.power_residual(a.matrix(), 3) < 1e-14);
        assert!(d.power_residual(a.matrix(), 6) < 1e-14);
        assert!(d.unitary_residual() < 1e-14);
        assert_eq!(d.orbit_span_dim().unwrap(), d.space_dim);
    }

    #[test]
    fn depth_zero_rejected() {
        let a = jordan_block(2, tol()).unwrap();
        assert!(matches!(schaffer_dilation(&a, 0), Err(Error::WindowTooSmall(_))));
        assert!(matches!(
            verify_order_extends_to_dilations(&a, &a, &identity(2), 0),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn order_extends_examples() {
        let s2 = jordan_block(2, tol()).unwrap();
        let r = verify_order_extends_to_dilations(&s2, &s2, &identity(2), 3).unwrap();
        assert!(r.passed(), "{r:?}");
        let s3 = Contraction::validate(jordan_matrix(3), tol()).unwrap();
        let omega = from_real_rows(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let r = verify_order_extends_to_dilations(&s2, &s3, &omega, 4).unwrap();
        assert!(r.passed(), "{r:?}");
        let z = cyclic_permutation(3);
        let b = Contraction::validate(direct_sum(&[&z, &jordan_matrix(2)]), tol()).unwrap();
        let a = Contraction::validate(z, tol()).unwrap();
        let omega = from_real_rows(5, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = verify_order_extends_to_dilations(&a, &b, &omega, 2).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.k_span_dim, 3);
        assert!(r.window_closed);
    }
}
