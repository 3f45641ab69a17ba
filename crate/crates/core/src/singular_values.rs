//! Singular-value products: Horn's inequality
//! `∏_{t≤k} σ_t(YX) ≤ ∏_{t≤k} σ_t(Y) ∏_{t≤k} σ_t(X)`, its contraction
//! corollary, and the equal-singular-values range lemma.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{exp, ln};
use crate::linalg::{defect, op_norm, range_vectors, singular_values, ComplexMatrix, Tolerance};

const UNDERFLOW: f64 = 1e-150;

/// Relative slack used by the inequality checks.
pub const RELATIVE_SLACK: f64 = 1e-10;

fn first_k(sigma: &[f64], k: usize) -> Vec<f64> {
    (0..k).map(|t| sigma.get(t).copied().unwrap_or(0.0)).collect()
}

/// `∏ values`, accumulated in log-space when a factor would underflow.
fn product(values: &[f64]) -> f64 {
    if values.iter().any(|&v| v < UNDERFLOW) {
        if values.contains(&0.0) {
            return 0.0;
        }
        exp(values.iter().map(|&v| ln(v)).sum())
    } else {
        values.iter().product()
    }
}

fn log_product(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&v| if v == 0.0 { f64::NEG_INFINITY } else { ln(v) })
        .sum()
}

fn check_composable(x: &ComplexMatrix, y: &ComplexMatrix, k: usize) -> Result<()> {
    if y.ncols() != x.nrows() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "Y is {}x{} but X is {}x{}",
            y.nrows(),
            y.ncols(),
            x.nrows(),
            x.ncols()
        )));
    }
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 1".into()));
    }
    Ok(())
}

/// The three first-`k` profiles `σ(YX)`, `σ(Y)`, `σ(X)`, zero-padded.
fn profiles(x: &ComplexMatrix, y: &ComplexMatrix, k: usize) -> Result<[Vec<f64>; 3]> {
    check_composable(x, y, k)?;
    let yx = y * x;
    Ok([
        first_k(&singular_values(&yx)?, k),
        first_k(&singular_values(y)?, k),
        first_k(&singular_values(x)?, k),
    ])
}

/// `(∏_{t≤k} σ_t(YX), ∏_{t≤k} σ_t(Y) · ∏_{t≤k} σ_t(X))`; missing singular
/// values count as zero.
pub fn horn_products(x: &ComplexMatrix, y: &ComplexMatrix, k: usize) -> Result<(f64, f64)> {
    let [yx, sy, sx] = profiles(x, y, k)?;
    Ok((product(&yx), product(&sy) * product(&sx)))
}

/// Round-off allowance for `∏σ_t(YX)`. Each computed `σ_t(YX)` is off by at
/// most `δ = 64ε σ₁(Y)σ₁(X)` (Weyl), and every `j`-subset of the exact values
/// multiplies to at most `P_j = ∏_{t≤j} σ_t(Y)σ_t(X)` (Horn), so the excess is
/// bounded by `Σ_{j<k} C(k, j) δ^{k-j} P_j`.
fn absolute_floor(sy: &[f64], sx: &[f64]) -> f64 {
    let k = sy.len().min(sx.len());
    let top = sy.first().copied().unwrap_or(0.0) * sx.first().copied().unwrap_or(0.0);
    let delta = 64.0 * f64::EPSILON * top;
    let mut floor = 0.0;
    let mut leading = 1.0;
    let mut binomial = 1.0;
    for j in 0..k {
        let mut term = binomial * leading;
        for _ in j..k {
            term *= delta;
        }
        floor += term;
        leading *= sy[j] * sx[j];
        binomial = binomial * (k - j) as f64 / (j + 1) as f64;
    }
    floor
}

fn inequality_holds(lhs: &[f64], rhs_a: &[f64], rhs_b: &[f64], floor: f64) -> bool {
    let all = lhs.iter().chain(rhs_a).chain(rhs_b);
    if all.clone().any(|&v| v > 0.0 && v < UNDERFLOW) {
        let l = log_product(lhs);
        let r = log_product(rhs_a) + log_product(rhs_b);
        return l == f64::NEG_INFINITY || l <= r + ln(1.0 + RELATIVE_SLACK) || exp(l) <= floor;
    }
    let l = product(lhs);
    let r = product(rhs_a) * product(rhs_b);
    l <= r * (1.0 + RELATIVE_SLACK) + floor
}

/// Horn's inequality for the first `k` singular values, with relative slack
/// [`RELATIVE_SLACK`] plus a round-off floor for rank-deficient factors.
pub fn horn_inequality_holds(x: &ComplexMatrix, y: &ComplexMatrix, k: usize) -> Result<bool> {
    let [yx, sy, sx] = profiles(x, y, k)?;
    Ok(inequality_holds(&yx, &sy, &sx, absolute_floor(&sy, &sx)))
}

/// `∏_{t≤k} σ_t(YX) ≤ ∏_{t≤k} σ_t(X)` for a contraction `Y`.
pub fn contraction_corollary_check(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    k: usize,
    tol: &Tolerance,
) -> Result<bool> {
    check_composable(x, y, k)?;
    let sigma_max = op_norm(y);
    if sigma_max > 1.0 + tol.residual_tol {
        return Err(Error::YNotContraction { sigma_max });
    }
    let [yx, _, sx] = profiles(x, y, k)?;
    let ones = alloc::vec![1.0; k];
    Ok(inequality_holds(&yx, &ones, &sx, absolute_floor(&ones, &sx)))
}

/// Outcome of the range lemma: if `X` and `YX` share singular values then
/// `ℛ(X) ⊥ 𝒟_Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeLemmaReport {
    /// `max_t |σ_t(X) - σ_t(YX)|`.
    pub profile_gap: f64,
    /// `||D_Y Q||` for an orthonormal frame `Q` of `ℛ(X)`.
    pub defect_residual: f64,
    pub range_dim: usize,
    pub holds: bool,
}

pub fn equal_sv_range_lemma(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<RangeLemmaReport> {
    check_composable(x, y, 1)?;
    let sigma_max = op_norm(y);
    if sigma_max > 1.0 + tol.residual_tol {
        return Err(Error::YNotContraction { sigma_max });
    }
    let sx = singular_values(x)?;
    let syx = singular_values(&(y * x))?;
    let len = sx.len().max(syx.len());
    let profile_gap = (0..len)
        .map(|t| {
            (sx.get(t).copied().unwrap_or(0.0) - syx.get(t).copied().unwrap_or(0.0)).abs()
        })
        .fold(0.0, f64::max);
    if profile_gap > tol.residual_tol {
        return Err(Error::NotApplicable {
            max_gap: profile_gap,
        });
    }
    let (d, _) = defect(y, tol)?;
    let range = range_vectors(x, tol)?;
    let defect_residual = op_norm(&(d * &range));
    Ok(RangeLemmaReport {
        profile_gap,
        defect_residual,
        range_dim: range.ncols(),
        holds: defect_residual <= tol.residual_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, from_real_rows, identity, zeros};
    use crate::rng::{contraction_with_norm, gaussian_matrix, seeded, unitary};

    #[test]
    fn horn_examples() {
        let (l, r) = horn_products(&identity(3), &identity(3), 2).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-15);
        let x = diag_real(&[0.5, 0.2]);
        let y = diag_real(&[0.4, 0.1]);
        let (l, r) = horn_products(&x, &y, 2).unwrap();
        assert!((l - 0.004).abs() < 1e-12 && (r - 0.004).abs() < 1e-12);
        let mut rng = seeded(5, 0);
        let x = gaussian_matrix(&mut rng, 5, 5);
        let y = gaussian_matrix(&mut rng, 5, 5);
        for k in 1..=5 {
            let (l, r) = horn_products(&x, &y, k).unwrap();
            assert!(l <= r + 1e-12 * r);
            assert!(horn_inequality_holds(&x, &y, k).unwrap());
        }
    }

    #[test]
    fn horn_rejects_bad_shapes() {
        assert!(matches!(
            horn_products(&zeros(2, 2), &zeros(3, 3), 1),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(horn_products(&zeros(2, 2), &zeros(2, 2), 0).is_err());
    }

    #[test]
    fn missing_singular_values_are_zero() {
        let x = from_real_rows(2, 1, &[1.0, 0.0]);
        let (l, r) = horn_products(&x, &identity(2), 2).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
    }

    #[test]
    fn tiny_products_use_log_space() {
        let x = diag_real(&[1e-160, 1e-160]);
        let y = diag_real(&[1e-160, 1e-160]);
        let (l, r) = horn_products(&x, &y, 2).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(r, 0.0);
        assert!(horn_inequality_holds(&x, &y, 2).unwrap());
    }

    #[test]
    fn corollary_examples() {
        let mut rng = seeded(9, 0);
        let x = gaussian_matrix(&mut rng, 4, 4);
        let tol = Tolerance::default();
        for k in 1..=4 {
            assert!(contraction_corollary_check(&x, &identity(4), k, &tol).unwrap());
            assert!(contraction_corollary_check(&x, &zeros(4, 4), k, &tol).unwrap());
            let y = contraction_with_norm(&mut rng, 4, 0.9);
            assert!(contraction_corollary_check(&x, &y, k, &tol).unwrap());
        }
        assert!(matches!(
            contraction_corollary_check(&x, &(identity(4) * crate::Complex64::new(1.5, 0.0)), 1, &tol),
            Err(Error::YNotContraction { .. })
        ));
    }

    #[test]
    fn range_lemma_examples() {
        let tol = Tolerance::default();
        let mut rng = seeded(2, 0);
        let u = unitary(&mut rng, 3);
        let x = gaussian_matrix(&mut rng, 3, 2);
        assert!(equal_sv_range_lemma(&x, &u, &tol).unwrap().holds);
        let y = diag_real(&[1.0, 0.5]);
        let e1 = from_real_rows(2, 1, &[1.0, 0.0]);
        let report = equal_sv_range_lemma(&e1, &y, &tol).unwrap();
        assert!(report.holds);
        assert_eq!(report.range_dim, 1);
        match equal_sv_range_lemma(&identity(1), &diag_real(&[0.5]), &tol) {
            Err(Error::NotApplicable { max_gap }) => assert!((max_gap - 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }
}
