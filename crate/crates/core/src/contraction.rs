//! Validated contractions with cached defect data, and the canonical split
//! `H = H^c ⊕ H^u` into a completely nonunitary and a unitary part.
//!
//! In finite dimension every unitary has purely atomic spectrum, so the
//! absolutely continuous unitary part is always zero and the unitary part
//! coincides with the singular part; [`Decomposition::unitary_part`] plays
//! both roles.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    defect_with_floor, eigenvalues, hermitian_eigen, identity, op_norm, singular_values,
    unitary_residual, ComplexMatrix, Tolerance,
};
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    matrix: ComplexMatrix,
    sigma_max: f64,
    defect: ComplexMatrix,
    defect_space: Subspace,
    codefect: ComplexMatrix,
    codefect_space: Subspace,
    tol: Tolerance,
}

impl Contraction {
    /// Check that `m` is square with `||m|| <= 1 + residual_tol` and cache
    /// `D_A`, `D_{A*}` and their ranges.
    pub fn validate(m: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        crate::linalg::ensure_finite(&m)?;
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let sigma_max = singular_values(&m)?.first().copied().unwrap_or(0.0);
        if sigma_max > 1.0 + tol.residual_tol {
            return Err(Error::NotContractive { sigma_max });
        }
        // Accepted norms up to 1 + residual_tol can push I - A*A down to about
        // -2·residual_tol; those eigenvalues are clamped.
        let floor = 3.0 * tol.residual_tol;
        let (defect, defect_frame) = defect_with_floor(&m, &tol, floor)?;
        let (codefect, codefect_frame) = defect_with_floor(&m.adjoint(), &tol, floor)?;
        Ok(Contraction {
            defect_space: Subspace::from_orthonormal(defect_frame, tol),
            codefect_space: Subspace::from_orthonormal(codefect_frame, tol),
            matrix: m,
            sigma_max,
            defect,
            codefect,
            tol,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    /// `D_A = (I - A*A)^{1/2}`.
    pub fn defect(&self) -> &ComplexMatrix {
        &self.defect
    }

    /// `𝒟_A`, closure of the range of `D_A`.
    pub fn defect_space(&self) -> &Subspace {
        &self.defect_space
    }

    /// `D_{A*} = (I - AA*)^{1/2}`.
    pub fn codefect(&self) -> &ComplexMatrix {
        &self.codefect
    }

    pub fn codefect_space(&self) -> &Subspace {
        &self.codefect_space
    }

    pub fn defect_index(&self) -> usize {
        self.defect_space.dim()
    }

    pub fn codefect_index(&self) -> usize {
        self.codefect_space.dim()
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn adjoint(&self) -> Result<Contraction> {
        Contraction::validate(self.matrix.adjoint(), self.tol)
    }

    /// Compression `F* A F` onto a subspace, validated as a contraction.
    pub fn compress(&self, space: &Subspace) -> Result<Contraction> {
        Contraction::validate(space.compress(&self.matrix), self.tol)
    }
}

pub fn validate(m: ComplexMatrix, tol: Tolerance) -> Result<Contraction> {
    Contraction::validate(m, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub cnu_space: Subspace,
    pub unitary_space: Subspace,
    pub cnu_part: Contraction,
    /// `A_u`; also the singular unitary part, the absolutely continuous one
    /// being zero in finite dimension.
    pub unitary_part: ComplexMatrix,
    /// First power at which the intersection chain stabilised.
    pub stabilized_at: usize,
}

impl Decomposition {
    /// Largest off-diagonal block norm of `A` with respect to the split.
    pub fn reducing_residual(&self, a: &ComplexMatrix) -> f64 {
        let c = self.cnu_space.frame();
        let u = self.unitary_space.frame();
        let upper = c.adjoint() * a * u;
        let lower = u.adjoint() * a * c;
        op_norm(&upper).max(op_norm(&lower))
    }
}

/// Vectors on which the positive semidefinite `I - X*X` vanishes, i.e. on
/// which `X` is isometric (cut: eigenvalue `<= rank_tol`).
pub fn isometric_directions(x: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    let n = x.ncols();
    let (mu, vecs) = hermitian_eigen(&(identity(n) - x.adjoint() * x))?;
    let start = mu.iter().take_while(|&&m| m > tol.rank_tol).count();
    Ok(Subspace::from_orthonormal(
        vecs.columns(start, n - start).into_owned(),
        tol,
    ))
}

/// Largest reducing subspace on which `A` is unitary, as the stabilised
/// intersection `∩_n ker(I - A*ⁿAⁿ) ∩ ker(I - AⁿA*ⁿ)`.
///
/// If the chain is equal at two consecutive powers the common subspace is
/// invariant under `A` and `A*` and `A` is unitary on it, so the first repeat
/// is the answer; dimensions strictly drop before that, which bounds the
/// number of steps by `dim + 1`.
pub fn unitary_cnu_split(a: &Contraction) -> Result<Decomposition> {
    let tol = a.tol;
    let n = a.dim();
    let mut current = Subspace::full(n, tol);
    let mut power = identity(n);
    let mut stabilized_at = 0;
    for step in 1..=n + 1 {
        power = &power * a.matrix();
        let forward = isometric_directions(&power, tol)?;
        let backward = isometric_directions(&power.adjoint(), tol)?;
        let next = current.intersect(&forward)?.intersect(&backward)?;
        let stable = next.dim() == current.dim();
        current = next;
        stabilized_at = step;
        if stable || current.is_zero() {
            break;
        }
    }
    let unitary_space = current;
    let cnu_space = unitary_space.complement()?;
    let unitary_part = unitary_space.compress(a.matrix());
    let cnu_part = a.compress(&cnu_space)?;
    Ok(Decomposition {
        cnu_space,
        unitary_space,
        cnu_part,
        unitary_part,
        stabilized_at,
    })
}

/// Largest subspace of `ker M` that reduces `M`: the limit of
/// `K₀ = ker M`, `K_{j+1} = {x ∈ K_j : M*x ∈ K_j}` (on `ker M` the operator
/// already acts as zero, so only `M*`-invariance has to be enforced).
pub fn reducing_subspace_in_kernel(m: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    let n = m.ncols();
    let mut current = crate::subspace::kernel_basis(m, tol)?;
    for _ in 0..=n {
        if current.is_zero() {
            break;
        }
        let f = current.frame();
        let p = current.projector();
        let leak = (identity(n) - p) * m.adjoint() * f;
        let null = crate::linalg::right_null_vectors_with_floor(&leak, &tol, tol.residual_tol)?;
        if null.ncols() == current.dim() {
            break;
        }
        current = Subspace::from_orthonormal(f * null, tol);
    }
    Ok(current)
}

/// Maximum eigenvalue multiplicity of a unitary, i.e. the least number of
/// cyclic summands. Eigenvalues closer than `residual_tol` are clustered
/// (single linkage).
pub fn unitary_multiplicity(u: &ComplexMatrix, tol: Tolerance) -> Result<usize> {
    let (rows, cols) = u.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let residual = unitary_residual(u);
    if residual > tol.residual_tol {
        return Err(Error::NotUnitary { residual });
    }
    let eig = eigenvalues(u)?;
    let clusters = cluster_eigenvalues(&eig, tol.residual_tol);
    Ok(clusters.iter().map(|c| c.len()).max().unwrap_or(0))
}

/// Single-linkage clusters of complex numbers at gap `gap`, each returned as
/// a list of indices; clusters are ordered by their smallest index.
pub(crate) fn cluster_eigenvalues(values: &[crate::Complex64], gap: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= gap {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(i),
            None => groups.push((r, alloc::vec![i])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Defect-index inequalities that `A ≼ B` forces for completely nonunitary
/// `B`: `dim 𝒟_A <= dim 𝒟_B` and `dim 𝒟_{A*} <= dim 𝒟_B + dim 𝒟_{B*}`.
pub fn check_defect_inequalities(a: &Contraction, b: &Contraction) -> Result<bool> {
    let split = unitary_cnu_split(b)?;
    if !split.unitary_space.is_zero() {
        return Err(Error::BNotCnu {
            unitary_dim: split.unitary_space.dim(),
        });
    }
    Ok(a.defect_index() <= b.defect_index()
        && a.codefect_index() <= b.defect_index() + b.codefect_index())
}
