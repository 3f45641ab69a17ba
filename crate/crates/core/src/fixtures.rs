//! Deterministic generators: finite truncations of the shift and Jordan-sum
//! examples, and random instances with known ground truth.
//!
//! Basis convention for Jordan cells: `S_m e_k = e_{k+1}` for `k < m` and
//! `S_m e_m = 0`, i.e. ones on the subdiagonal. The bilateral shift is
//! truncated to a cyclic permutation (stays unitary) and the unilateral shift
//! to a Jordan cell (stays completely nonunitary).

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::contraction::{unitary_cnu_split, Contraction};
use crate::error::{Error, Result};
use crate::linalg::{diag, direct_sum, identity, zeros, ComplexMatrix, Tolerance, ONE};
use crate::rng::{seeded, unit_phase, unitary, with_singular_values};
use crate::Complex64;

/// Largest total dimension accepted by the random pair generators.
pub const MAX_FIXTURE_DIM: usize = 24;

/// An infinite-dimensional claim attached to a fixture, flagged by whether it survives
/// finite truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Caveat {
    pub claim: &'static str,
    pub survives_truncation: bool,
}

/// Fixture request; identical specs produce bit-identical output.
#[derive(Debug, Clone, PartialEq)]
pub enum FixtureSpec {
    JordanSum { n: usize },
    TruncatedShifts { n: usize, copies: usize },
    ConjugatedPair { n: usize, seed: u64 },
    SimPair { common: usize, swapped: usize, seed: u64 },
    ApproxPair { n: usize, defect: usize, seed: u64 },
    RandomContraction { n: usize, sigma_max: f64, seed: u64 },
}

impl FixtureSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FixtureSpec::JordanSum { .. } => "jordan_sum",
            FixtureSpec::TruncatedShifts { .. } => "truncated_shifts",
            FixtureSpec::ConjugatedPair { .. } => "conjugated_pair",
            FixtureSpec::SimPair { .. } => "sim_pair",
            FixtureSpec::ApproxPair { .. } => "approx_pair",
            FixtureSpec::RandomContraction { .. } => "random_contraction",
        }
    }
}

/// Named matrices produced by a fixture, plus its truncation caveats.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub kind: &'static str,
    pub matrices: Vec<(String, ComplexMatrix)>,
    pub caveats: Vec<Caveat>,
}

impl Fixture {
    pub fn get(&self, name: &str) -> Option<&ComplexMatrix> {
        self.matrices
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }
}

pub fn generate(spec: &FixtureSpec, tol: Tolerance) -> Result<Fixture> {
    let named = |pairs: Vec<(&str, ComplexMatrix)>| -> Vec<(String, ComplexMatrix)> {
        pairs.into_iter().map(|(n, m)| (String::from(n), m)).collect()
    };
    let fixture = match *spec {
        FixtureSpec::JordanSum { n } => {
            let pair = jordan_sum_pair(n);
            Fixture {
                kind: spec.kind(),
                matrices: named(alloc::vec![
                    ("A", pair.a),
                    ("B", pair.b),
                    ("omega", pair.omega),
                    ("embedding", pair.embedding),
                ]),
                caveats: jordan_sum_caveats(),
            }
        }
        FixtureSpec::TruncatedShifts { n, copies } => {
            let pair = shift_pair(n, copies);
            Fixture {
                kind: spec.kind(),
                matrices: named(alloc::vec![
                    ("A", pair.a),
                    ("B", pair.b),
                    ("embedding", pair.embedding),
                ]),
                caveats: shift_caveats(),
            }
        }
        FixtureSpec::ConjugatedPair { n, seed } => {
            let pair = conjugated_pair(seed, n)?;
            Fixture {
                kind: spec.kind(),
                matrices: named(alloc::vec![("A", pair.a), ("B", pair.b), ("Q", pair.omega)]),
                caveats: Vec::new(),
            }
        }
        FixtureSpec::SimPair {
            common,
            swapped,
            seed,
        } => {
            let pair = sim_pair(seed, common, swapped)?;
            Fixture {
                kind: spec.kind(),
                matrices: named(alloc::vec![
                    ("A", pair.a),
                    ("B", pair.b),
                    ("omega", pair.omega),
                    ("omega_prime", pair.omega_prime),
                ]),
                caveats: Vec::new(),
            }
        }
        FixtureSpec::ApproxPair { n, defect, seed } => {
            let pair = approx_pair(seed, n, defect, tol)?;
            Fixture {
                kind: spec.kind(),
                matrices: named(alloc::vec![
                    ("A", pair.a),
                    ("B", pair.b),
                    ("omega", pair.omega),
                    ("omega_prime", pair.omega_prime),
                ]),
                caveats: Vec::new(),
            }
        }
        FixtureSpec::RandomContraction { n, sigma_max, seed } => {
            let c = random_contraction(seed, n, sigma_max, tol)?;
            Fixture {
                kind: spec.kind(),
                matrices: named(alloc::vec![("A", c.matrix().clone())]),
                caveats: Vec::new(),
            }
        }
    };
    Ok(fixture)
}

/// `m × m` Jordan cell of eigenvalue 0 (`S_1` is the zero scalar).
pub fn jordan_matrix(m: usize) -> ComplexMatrix {
    let mut s = zeros(m, m);
    for k in 0..m.saturating_sub(1) {
        s[(k + 1, k)] = ONE;
    }
    s
}

pub fn jordan_block(m: usize, tol: Tolerance) -> Result<Contraction> {
    Contraction::validate(jordan_matrix(m), tol)
}

/// Cyclic permutation `e_k ↦ e_{k+1 mod n}`, the unitary stand-in for the
/// bilateral shift.
pub fn cyclic_permutation(n: usize) -> ComplexMatrix {
    let mut z = zeros(n, n);
    for k in 0..n {
        z[((k + 1) % n, k)] = ONE;
    }
    z
}

/// `⊕ S_m` over the given sizes.
pub fn jordan_sum(sizes: impl IntoIterator<Item = usize>) -> ComplexMatrix {
    let blocks: Vec<ComplexMatrix> = sizes.into_iter().map(jordan_matrix).collect();
    let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
    direct_sum(&refs)
}

/// Offset of block `m` inside `⊕_{j=first}^{..} S_j`.
fn block_offset(first: usize, m: usize) -> usize {
    (first..m).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanSumPair {
    /// `⊕_{m=1}^{N} S_m`.
    pub a: ComplexMatrix,
    /// `⊕_{m=2}^{N+1} S_m`.
    pub b: ComplexMatrix,
    /// `e^m_k ↦ e^{m+1}_{k+1}`, so `ΩA = BΩ`.
    pub omega: ComplexMatrix,
    /// Standard embedding of `⊕_{m=2}^{N} S_m` into `A`.
    pub embedding: ComplexMatrix,
}

/// Truncation at `N` of the Jordan-sum pair. All entries are 0/1.
pub fn jordan_sum_pair(n: usize) -> JordanSumPair {
    let a = jordan_sum(1..=n);
    let b = jordan_sum(2..=n + 1);
    let mut omega = zeros(b.nrows(), a.nrows());
    for m in 1..=n {
        for k in 0..m {
            let src = block_offset(1, m) + k;
            let dst = block_offset(2, m + 1) + k + 1;
            omega[(dst, src)] = ONE;
        }
    }
    let inner_dim: usize = (2..=n).sum();
    let mut embedding = zeros(a.nrows(), inner_dim);
    for m in 2..=n {
        for k in 0..m {
            embedding[(block_offset(1, m) + k, block_offset(2, m) + k)] = ONE;
        }
    }
    JordanSumPair {
        a,
        b,
        omega,
        embedding,
    }
}

pub fn jordan_sum_caveats() -> Vec<Caveat> {
    alloc::vec![
        Caveat {
            claim: "Omega is an isometry with Omega A = B Omega",
            survives_truncation: true,
        },
        Caveat {
            claim: "ker A contains a one-dimensional reducing subspace; ker B contains none",
            survives_truncation: true,
        },
        Caveat {
            claim: "B is unitarily equivalent to the restriction of A (B below A)",
            survives_truncation: false,
        },
        Caveat {
            claim: "both defect spaces are infinite-dimensional",
            survives_truncation: false,
        },
        Caveat {
            claim: "characteristic functions are inner and *-inner (grid-relative check only)",
            survives_truncation: true,
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPair {
    /// `⊕^{copies} Z_N`.
    pub a: ComplexMatrix,
    /// `A ⊕ S_N`.
    pub b: ComplexMatrix,
    /// First-summand embedding witnessing `A ≺ B`.
    pub embedding: ComplexMatrix,
}

pub fn shift_pair(n: usize, copies: usize) -> ShiftPair {
    let z = cyclic_permutation(n);
    let zs: Vec<&ComplexMatrix> = (0..copies).map(|_| &z).collect();
    let a = direct_sum(&zs);
    let s = jordan_matrix(n);
    let b = direct_sum(&[&a, &s]);
    let mut embedding = zeros(b.nrows(), a.nrows());
    embedding
        .view_mut((0, 0), (a.nrows(), a.nrows()))
        .copy_from(&identity(a.nrows()));
    ShiftPair { a, b, embedding }
}

pub fn shift_caveats() -> Vec<Caveat> {
    alloc::vec![
        Caveat {
            claim: "A reduces into B (A strictly below B via a summand)",
            survives_truncation: true,
        },
        Caveat {
            claim: "B is below A (needs infinite multiplicity of the bilateral shift)",
            survives_truncation: false,
        },
        Caveat {
            claim: "A is unitary while B is not",
            survives_truncation: true,
        },
    ]
}

/// Pair of matrices with intertwiners in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessedPair {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// `ΩA = BΩ`.
    pub omega: ComplexMatrix,
    /// `Ω′B = AΩ′`.
    pub omega_prime: ComplexMatrix,
}

fn check_dims(total: usize) -> Result<()> {
    if total > MAX_FIXTURE_DIM {
        return Err(Error::DimsTooLarge {
            total,
            limit: MAX_FIXTURE_DIM,
        });
    }
    Ok(())
}

/// Gaussian matrix scaled to `||A|| = sigma_max`.
pub fn random_contraction(seed: u64, n: usize, sigma_max: f64, tol: Tolerance) -> Result<Contraction> {
    let mut rng = seeded(seed, 0);
    let m = crate::rng::contraction_with_norm(&mut rng, n, sigma_max);
    Contraction::validate(m, tol)
}

/// `B = QAQ*` for a random contraction `A` (norm 0.9) and Haar `Q`;
/// `omega = Q`, `omega_prime = Q*`.
pub fn conjugated_pair(seed: u64, n: usize) -> Result<WitnessedPair> {
    check_dims(n)?;
    let mut rng = seeded(seed, 1);
    let a = crate::rng::contraction_with_norm(&mut rng, n, 0.9);
    let q = unitary(&mut rng, n);
    let b = &q * &a * q.adjoint();
    Ok(WitnessedPair {
        a,
        omega_prime: q.adjoint(),
        omega: q,
        b,
    })
}

/// `C = A₀ ⊕ R ⊕ R′` with `R′ = QRQ*`; returns `A = A₀ ⊕ R`, `B = A₀ ⊕ R′`
/// and reducing isometries in both directions. `Ω′` carries independent
/// phases on each summand so it is not simply `Ω*`.
pub fn sim_pair(seed: u64, common: usize, swapped: usize) -> Result<WitnessedPair> {
    check_dims(common + 2 * swapped)?;
    let mut rng = seeded(seed, 2);
    let a0 = random_block(&mut rng, common);
    let r = random_block(&mut rng, swapped);
    let q = unitary(&mut rng, swapped);
    let r_prime = &q * &r * q.adjoint();
    let a = direct_sum(&[&a0, &r]);
    let b = direct_sum(&[&a0, &r_prime]);
    let omega = direct_sum(&[&identity(common), &q]);
    let p0 = unit_phase(&mut rng);
    let p1 = unit_phase(&mut rng);
    let back = direct_sum(&[&identity(common), &q.adjoint()]);
    let phases = diag(
        &core::iter::repeat_n(p0, common)
            .chain(core::iter::repeat_n(p1, swapped))
            .collect::<Vec<Complex64>>(),
    );
    let omega_prime = phases * back;
    Ok(WitnessedPair {
        a,
        b,
        omega,
        omega_prime,
    })
}

fn random_block<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let sigma_max = rng.random_range(0.3..0.95);
    crate::rng::contraction_with_norm(rng, n, sigma_max)
}

/// Completely nonunitary `A` of size `n` with `dim 𝒟_A = defect` (singular
/// values: `n - defect` ones, the rest drawn in `(0.05, 0.95)`), `B = QAQ*`,
/// `omega = Q` and `omega_prime = Q*`.
///
/// Draws that happen to carry a unitary part are rejected and redrawn from the
/// next stream.
pub fn approx_pair(seed: u64, n: usize, defect: usize, tol: Tolerance) -> Result<WitnessedPair> {
    check_dims(2 * n)?;
    if defect == 0 || defect > n {
        return Err(Error::PreconditionViolated(alloc::format!(
            "approx_pair needs 1 <= defect <= n, got defect={defect}, n={n}"
        )));
    }
    for stream in 0..64u64 {
        let mut rng = seeded(seed, 100 + stream);
        let mut singular: Vec<f64> = Vec::with_capacity(n);
        singular.extend(core::iter::repeat_n(1.0, n - defect));
        for _ in 0..defect {
            singular.push(rng.random_range(0.05..0.95));
        }
        let a = with_singular_values(&mut rng, &singular);
        let c = Contraction::validate(a.clone(), tol)?;
        if c.defect_index() != defect || !unitary_cnu_split(&c)?.unitary_space.is_zero() {
            continue;
        }
        let q = unitary(&mut rng, n);
        let b = &q * &a * q.adjoint();
        return Ok(WitnessedPair {
            a,
            omega_prime: q.adjoint(),
            omega: q,
            b,
        });
    }
    Err(Error::NoConvergence { iterations: 64 })
}
