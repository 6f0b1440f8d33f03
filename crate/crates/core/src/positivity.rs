//! Exact definiteness of rank-2 tensors with witnesses and sum-of-squares
//! certificates, positivity checks on `h^2`-vectors and Ehrhart matrix
//! coefficients, palindromicity versus reflexivity, and seeded scans for
//! positivity statements in higher dimensions.

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ehrhart::{ehrhart_tensor_polynomial, to_hr_vector};
use crate::error::{Error, Result};
use crate::json::tensor_to_json;
use crate::linalg::{determinant, inverse};
use crate::polytope::{random_lattice_polytope_with, Polytope, PolytopeJson};
use crate::rational::{serde_rational_vec, serde_rational_vec_opt, Rational};
use crate::tensor::{outer_power_rational, HrVector, SymTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    NegativeSemidefinite,
    NegativeDefinite,
    Zero,
}

impl Definiteness {
    /// Positive semidefinite in the wide sense (including zero and PD).
    pub fn is_psd(self) -> bool {
        matches!(self, Definiteness::PositiveDefinite | Definiteness::PositiveSemidefinite | Definiteness::Zero)
    }
}

/// Classification of a symmetric matrix with exact witnesses.
///
/// `witness` is a vector `v` with `T(v, v) < 0` whenever one exists;
/// `kernel` is a nonzero `v` with `T v = 0` whenever `T` is singular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefinitenessReport {
    pub classification: Definiteness,
    #[serde(with = "serde_rational_vec_opt")]
    pub witness: Option<Vec<Rational>>,
    #[serde(with = "serde_rational_vec_opt")]
    pub kernel: Option<Vec<Rational>>,
}

/// `P A P^t = D` with `P` invertible and `D` diagonal.
struct Congruence {
    p: Vec<Vec<Rational>>,
    diag: Vec<Rational>,
}

/// Symmetric Gaussian elimination. When every remaining diagonal entry
/// vanishes, a row/column with a nonzero off-diagonal entry is added to the
/// pivot row/column to create a nonzero pivot.
fn congruence(a: &[Vec<Rational>]) -> Congruence {
    let d = a.len();
    let mut m = a.to_vec();
    let mut p: Vec<Vec<Rational>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect())
        .collect();
    for k in 0..d {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..d).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
                p.swap(k, j);
            } else if let Some(j) = (k + 1..d).find(|&j| !m[k][j].is_zero()) {
                for c in 0..d {
                    let x = m[j][c].clone();
                    m[k][c] += x;
                }
                for r in 0..d {
                    let x = m[r][j].clone();
                    m[r][k] += x;
                }
                for c in 0..d {
                    let x = p[j][c].clone();
                    p[k][c] += x;
                }
            } else {
                continue;
            }
        }
        let pivot = m[k][k].clone();
        for i in k + 1..d {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pivot;
            for c in 0..d {
                let x = &f * &m[k][c];
                m[i][c] -= x;
            }
            for r in 0..d {
                let x = &f * &m[r][k];
                m[r][i] -= x;
            }
            for c in 0..d {
                let x = &f * &p[k][c];
                p[i][c] -= x;
            }
        }
    }
    Congruence { diag: (0..d).map(|k| m[k][k].clone()).collect(), p }
}

fn require_rank2(t: &SymTensor) -> Result<Vec<Vec<Rational>>> {
    if t.rank() != 2 {
        return Err(Error::RankMismatch { expected: 2, found: t.rank() });
    }
    t.to_matrix()
}

/// `e_k`: sum of the principal `k x k` minors, for `k = 1..=d`.
fn principal_minor_sums(a: &[Vec<Rational>]) -> Vec<Rational> {
    let d = a.len();
    let mut e = vec![Rational::zero(); d];
    for mask in 1u32..(1 << d) {
        let idx: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<Rational>> = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect()).collect();
        e[idx.len() - 1] += determinant(&sub);
    }
    e
}

/// Exact classification from the signs of the coefficients of the
/// characteristic polynomial, with witnesses from a congruence
/// diagonalisation.
pub fn classify_definiteness(t: &SymTensor) -> Result<DefinitenessReport> {
    let a = require_rank2(t)?;
    let d = a.len();
    let e = principal_minor_sums(&a);
    let classification = if t.is_zero() {
        Definiteness::Zero
    } else if e.iter().all(Signed::is_positive) {
        Definiteness::PositiveDefinite
    } else if e.iter().all(|x| !x.is_negative()) {
        Definiteness::PositiveSemidefinite
    } else {
        // Eigenvalues of -A have e_k(-A) = (-1)^k e_k(A).
        let neg: Vec<Rational> = e.iter().enumerate().map(|(k, x)| if k % 2 == 0 { -x } else { x.clone() }).collect();
        if neg.iter().all(Signed::is_positive) {
            Definiteness::NegativeDefinite
        } else if neg.iter().all(|x| !x.is_negative()) {
            Definiteness::NegativeSemidefinite
        } else {
            Definiteness::Indefinite
        }
    };
    let c = congruence(&a);
    let witness = (0..d).find(|&k| c.diag[k].is_negative()).map(|k| c.p[k].clone());
    let kernel = if e[d - 1].is_zero() {
        (0..d).find(|&k| c.diag[k].is_zero()).map(|k| c.p[k].clone())
    } else {
        None
    };
    Ok(DefinitenessReport { classification, witness, kernel })
}

/// `T = Σ λ_k u_k u_k^t` with `λ_k > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SosCertificate {
    pub terms: Vec<SosTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SosTerm {
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_rational_vec")]
    pub u: Vec<Rational>,
}

impl SosCertificate {
    pub fn reconstruct(&self, dim: usize) -> SymTensor {
        self.terms
            .iter()
            .fold(SymTensor::zeros(2, dim), |acc, t| &acc + &outer_power_rational(&t.u, 2).scale(&t.lambda))
    }
}

/// Sum-of-squares certificate from `P A P^t = D`: `A = Σ D_k u_k u_k^t` with
/// `u_k` the columns of `P^{-1}`. Refuses tensors that are not PSD, returning
/// a vector on which the form is negative.
pub fn sos_certificate(t: &SymTensor) -> Result<SosCertificate> {
    let a = require_rank2(t)?;
    let c = congruence(&a);
    if let Some(k) = (0..a.len()).find(|&k| c.diag[k].is_negative()) {
        return Err(Error::NotPositiveSemidefinite { witness: c.p[k].clone() });
    }
    let inv = inverse(&c.p).expect("congruence transform is invertible");
    let terms = (0..a.len())
        .filter(|&k| !c.diag[k].is_zero())
        .map(|k| SosTerm { lambda: c.diag[k].clone(), u: inv.iter().map(|row| row[k].clone()).collect() })
        .collect();
    Ok(SosCertificate { terms })
}

/// Classification of every entry of the `h^2`-vector.
pub fn check_h2_psd(p: &Polytope) -> Vec<DefinitenessReport> {
    classify_all(&to_hr_vector(p, 2).entries)
}

/// Classification of the coefficients of `n^1, ..., n^{d+r}` of the Ehrhart
/// tensor polynomial for `r = 2`.
pub fn check_ehrhart_psd(p: &Polytope) -> Vec<DefinitenessReport> {
    classify_all(&ehrhart_tensor_polynomial(p, 2).coeffs[1..])
}

fn classify_all(ts: &[SymTensor]) -> Vec<DefinitenessReport> {
    ts.iter().map(|t| classify_definiteness(t).expect("rank 2")).collect()
}

/// `h_i = h_{len-1-i}` for all `i`.
pub fn palindromic(h: &HrVector) -> bool {
    let n = h.entries.len();
    (0..n / 2).all(|i| h.entries[i] == h.entries[n - 1 - i])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexivityReport {
    pub reflexive: bool,
    pub palindromic: bool,
}

impl ReflexivityReport {
    pub fn consistent(&self) -> bool {
        self.reflexive == self.palindromic
    }
}

/// Reflexivity of `P` and palindromicity of its `h^r`-vector, for even `r`
/// and `P` with the origin in its interior.
pub fn reflexivity_report(p: &Polytope, r: usize) -> Result<ReflexivityReport> {
    if r % 2 == 1 {
        return Err(Error::OddRank(r));
    }
    if !p.has_origin_in_interior() {
        return Err(Error::OriginNotInterior);
    }
    Ok(ReflexivityReport { reflexive: p.is_reflexive(), palindromic: palindromic(&to_hr_vector(p, r)) })
}

/// Whether `P` is reflexive exactly when its `h^r`-vector is palindromic.
pub fn reflexivity_palindromicity_check(p: &Polytope, r: usize) -> Result<bool> {
    Ok(reflexivity_report(p, r)?.consistent())
}

/// Which positivity statement a scan tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjecture {
    /// Every `h^2_i(P)` is positive semidefinite.
    Psd,
    /// `h^2_i(P) - h^2_1(P)` is positive semidefinite for `1 <= i < d + 2`
    /// when `P` has an interior lattice point. The last index `i = d + 2`
    /// is checked and reported separately.
    Hibi,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub dim: usize,
    pub trials: usize,
    pub coord_bound: i64,
    pub num_gens: usize,
    pub seed: u64,
    pub conjecture: Conjecture,
}

impl ScanConfig {
    /// Coordinates in `[-3, 3]` and `d + 4` random points per trial.
    pub fn new(dim: usize, trials: usize, seed: u64, conjecture: Conjecture) -> Self {
        ScanConfig { dim, trials, coord_bound: 3, num_gens: dim + 4, seed, conjecture }
    }
}

/// A matrix that failed to be PSD.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub polytope: PolytopeJson,
    /// Index `i` of `h^2_i` (or of `h^2_i - h^2_1`).
    pub index: usize,
    /// `"psd"`, `"hibi"` for `1 <= i < d + 2`, or `"hibi_last"` for `i = d + 2`.
    pub range: String,
    pub matrix: Value,
    pub report: DefinitenessReport,
}

/// Result of a scan. Contains no timing data, so equal configurations give
/// byte-identical serialisations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: ScanConfig,
    /// Polytopes on which the statement was checked.
    pub checked: usize,
    /// Polytopes skipped because they have no interior lattice point.
    pub skipped: usize,
    /// Number of matrices classified.
    pub matrices: usize,
    pub violations: Vec<Violation>,
    /// Violations with index `i < d + 2` (for `psd`: all of them).
    pub main_violations: usize,
    /// Violations at the last index `i = d + 2` of the Hibi-type check.
    pub last_index_violations: usize,
}

struct TrialOutcome {
    checked: bool,
    matrices: usize,
    violations: Vec<Violation>,
}

fn run_trial(cfg: &ScanConfig, trial: usize) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let p = random_lattice_polytope_with(&mut rng, cfg.dim, cfg.coord_bound, cfg.num_gens)?;
    let d = p.dim();
    if cfg.conjecture == Conjecture::Hibi && p.interior_lattice_points(1).is_empty() {
        return Ok(TrialOutcome { checked: false, matrices: 0, violations: vec![] });
    }
    let h = to_hr_vector(&p, 2);
    let candidates: Vec<(usize, SymTensor, &str)> = match cfg.conjecture {
        Conjecture::Psd => h.entries.iter().cloned().enumerate().map(|(i, t)| (i, t, "psd")).collect(),
        Conjecture::Hibi => (1..=d + 2)
            .map(|i| (i, &h.entries[i] - &h.entries[1], if i < d + 2 { "hibi" } else { "hibi_last" }))
            .collect(),
    };
    let mut violations = Vec::new();
    for (index, m, range) in &candidates {
        let report = classify_definiteness(m)?;
        if !report.classification.is_psd() {
            violations.push(Violation {
                trial,
                polytope: p.to_json(),
                index: *index,
                range: range.to_string(),
                matrix: tensor_to_json(m),
                report,
            });
        }
    }
    Ok(TrialOutcome { checked: true, matrices: candidates.len(), violations })
}

/// Runs `trials` independent random trials in parallel. Trial `k` draws
/// from stream `k` of a ChaCha8 generator seeded with `seed`, so the report
/// does not depend on scheduling.
pub fn conjecture_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    if !(2..=4).contains(&cfg.dim) {
        return Err(Error::InvalidInput(format!("scan dimension must be 2, 3 or 4 (got {})", cfg.dim)));
    }
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|k| run_trial(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    let mut report = ScanReport {
        config: cfg.clone(),
        checked: 0,
        skipped: 0,
        matrices: 0,
        violations: vec![],
        main_violations: 0,
        last_index_violations: 0,
    };
    for o in outcomes {
        if o.checked {
            report.checked += 1;
        } else {
            report.skipped += 1;
        }
        report.matrices += o.matrices;
        report.violations.extend(o.violations);
    }
    report.last_index_violations = report.violations.iter().filter(|v| v.range == "hibi_last").count();
    report.main_violations = report.violations.len() - report.last_index_violations;
    Ok(report)
}
