//! Perturbation bounds for singular subspace projectors and their numerical
//! certificates.
//!
//! Everything here is oracle-side: validators read the ground-truth T_0 and
//! are never used on the recovery path, which only sees T(x).

use serde::Serialize;

use crate::chain::PerturbationInstance;
use crate::error::{Error, Result};
use crate::matrix::{ClusterPartition, Matrix};
use crate::spectral::{ideal_projector, spectral_split, symmetric_eigenprojector, DEFAULT_GAP_TOL};

/// Additive slack on the right-hand side of every certificate.
pub const CERTIFICATE_SLACK: f64 = 1e-10;

/// The projector deviation budget
/// eps = 2 x ||E|| / (sigma_{n-k}(I - T_0) - 2 x ||E||).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsilonBound {
    pub x: f64,
    pub norm_e: f64,
    pub sigma_gap: f64,
    pub epsilon: f64,
}

pub fn epsilon_bound(x: f64, norm_e: f64, sigma_gap: f64) -> Result<EpsilonBound> {
    if !(norm_e > 0.0 && norm_e.is_finite()) {
        return Err(Error::Parameter(format!("||E|| must be positive, got {norm_e}")));
    }
    if !(sigma_gap > 0.0 && sigma_gap.is_finite()) {
        return Err(Error::Parameter(format!("sigma gap must be positive, got {sigma_gap}")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Parameter(format!("x must be nonnegative, got {x}")));
    }
    let push = 2.0 * x * norm_e;
    if push >= sigma_gap {
        return Err(Error::OutOfRegime { lhs: push, sigma_gap });
    }
    Ok(EpsilonBound { x, norm_e, sigma_gap, epsilon: push / (sigma_gap - push) })
}

/// Largest x with eps(x) below c = (1/4) sqrt(1/n_1 + 1/n_2), the regime in
/// which a threshold of 2 eps separates same-block from cross-block pairs.
pub fn exact_recovery_xmax(partition: &ClusterPartition, sigma_gap: f64, norm_e: f64) -> Result<f64> {
    if partition.k() < 2 {
        return Err(Error::Parameter("exact recovery needs at least two blocks".into()));
    }
    if !(sigma_gap > 0.0 && norm_e > 0.0) {
        return Err(Error::Parameter("sigma gap and ||E|| must be positive".into()));
    }
    let c = separation_budget(partition);
    Ok(sigma_gap * c / (2.0 * norm_e * (1.0 + c)))
}

/// (1/4) sqrt(1/n_1 + 1/n_2) for the two largest blocks.
pub fn separation_budget(partition: &ClusterPartition) -> f64 {
    let sizes = partition.sizes_desc();
    0.25 * (1.0 / sizes[0] as f64 + 1.0 / sizes[1] as f64).sqrt()
}

/// Instance descriptor attached to a certificate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CertContext {
    pub n: usize,
    pub k: usize,
    pub x: Option<f64>,
    pub seed: Option<u64>,
}

/// One numerically checked inequality lhs <= rhs (+ slack).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    #[serde(flatten)]
    pub context: CertContext,
}

impl BoundCertificate {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, context: CertContext) -> Self {
        BoundCertificate {
            name: name.into(),
            lhs,
            rhs,
            satisfied: lhs <= rhs + CERTIFICATE_SLACK,
            context,
        }
    }
}

/// Checks ||P_k(A) - P_k(B)|| <= 2 ||A - B|| / (beta - alpha) for symmetric
/// A, B whose k smallest-magnitude eigenvalues are <= alpha and whose other
/// eigenvalues are >= beta in magnitude.
pub fn lemma1_validate(
    a: &Matrix,
    b: &Matrix,
    k: usize,
    alpha: f64,
    beta: f64,
) -> Result<BoundCertificate> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Dimension("A and B differ in shape".into()));
    }
    for (name, m) in [("A", a), ("B", b)] {
        if !m.is_symmetric(1e-10) {
            return Err(Error::Domain(format!("{name} is not symmetric")));
        }
    }
    if !(beta > alpha && alpha > 0.0) {
        return Err(Error::Parameter(format!("need beta > alpha > 0, got alpha = {alpha}, beta = {beta}")));
    }
    let n = a.rows();
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!("need 1 <= k < n, got k = {k}")));
    }
    let (pa, ea) = symmetric_eigenprojector(a, k)?;
    let (pb, eb) = symmetric_eigenprojector(b, k)?;
    let mut offending = Vec::new();
    for (name, ev) in [("A", &ea), ("B", &eb)] {
        for (i, lam) in ev.iter().enumerate() {
            let bad = if i < k { lam.abs() > alpha } else { lam.abs() < beta };
            if bad {
                offending.push(format!("{name}: lambda = {lam:e} (rank {i})"));
            }
        }
    }
    if !offending.is_empty() {
        return Err(Error::Hypothesis(offending.join(", ")));
    }
    let lhs = pa.sub(&pb)?.spectral_norm();
    let rhs = 2.0 * a.sub(b)?.spectral_norm() / (beta - alpha);
    Ok(BoundCertificate::new("lemma1", lhs, rhs, CertContext { n, k, ..Default::default() }))
}

/// Weyl envelope for the singular values of I - T(x):
/// the k small ones stay below x ||E||, the rest stay above
/// sigma_{n-k}(I - T_0) - x ||E||.
pub fn weyl_envelope(inst: &PerturbationInstance, x: f64, k: usize, seed: Option<u64>) -> Result<Vec<BoundCertificate>> {
    if k != inst.k() {
        return Err(Error::Parameter(format!("k = {k} but the instance has {} blocks", inst.k())));
    }
    let n = inst.n();
    if k >= n {
        return Err(Error::Parameter("Weyl envelope needs k < n".into()));
    }
    let norm_e = inst.norm_e();
    let sigma_gap = inst.sigma_gap();
    let sv = inst.transition_at(x)?.laplacian()?.singular_values_ascending();
    let ctx = CertContext { n, k, x: Some(x), seed };
    let max_small = sv[..k].iter().copied().fold(0.0, f64::max);
    let min_large = sv[k..].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(vec![
        BoundCertificate::new("weyl_small", max_small, x * norm_e, ctx),
        BoundCertificate::new("weyl_large", sigma_gap - x * norm_e, min_large, ctx),
    ])
}

/// Projector deviations of both sides against the eps budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem3Report {
    pub left_deviation: f64,
    pub right_deviation: f64,
    pub epsilon: EpsilonBound,
    /// lhs = max(left, right), rhs = eps.
    pub certificate: BoundCertificate,
}

/// Checks ||P^L(x) - P^L(0)||, ||P^R(x) - P^R(0)|| <= eps.
pub fn theorem3_validate(inst: &PerturbationInstance, x: f64, seed: Option<u64>) -> Result<Theorem3Report> {
    let eps = epsilon_bound(x, inst.norm_e(), inst.sigma_gap())?;
    let k = inst.k();
    let ideal = ideal_projector(inst.base())?;
    let lap = inst.transition_at(x)?.laplacian()?;
    let split = spectral_split(&lap, k, DEFAULT_GAP_TOL)?;
    let left = split.p_left.sub(&ideal.p_left)?.spectral_norm();
    let right = split.p_right.sub(&ideal.p_right)?.spectral_norm();
    let ctx = CertContext { n: inst.n(), k, x: Some(x), seed };
    Ok(Theorem3Report {
        left_deviation: left,
        right_deviation: right,
        epsilon: eps,
        certificate: BoundCertificate::new("theorem3", left.max(right), eps.epsilon, ctx),
    })
}
