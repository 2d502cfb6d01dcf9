//! Minimum-error discrimination and the pre-/post-measurement guessing
//! probabilities of a partitioned ensemble.
//!
//! Two solvers are provided for the optimal guessing probability:
//!
//! * [`pguess_analytic`] applies when the top eigenprojections of the
//!   ensemble members (restricted to the labels attaining the overall largest
//!   eigenvalue) sum to a multiple of the identity. The optimum is then
//!   `d·λ_max`, attained by the rescaled projections.
//! * [`pguess_iterative`] is a fixed-point iteration on the measurement,
//!   `M(z) ← R⁻¹ E(z)M(z)E(z) R⁻¹` with `R = (Σ E M E)^{1/2}`, stopped by the
//!   dual gap: with `K` the Hermitian part of `Σ E(z)M(z)` and
//!   `s = max_z λ_max(E(z) − K)⁺`, the operator `K + s·I` is dual feasible, so
//!   the optimum lies in `[tr K, tr K + d·s]`.
//!
//! The post-measurement optimum is reduced to ordinary discrimination of the
//! auxiliary ensemble on `X × Y`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::ensemble::{auxiliary_ensemble, auxiliary_pairs, PartitionedEnsemble, StateEnsemble};
use crate::error::{IwitError, Result};
use crate::operator::{eig, trace_pair, HermitianOperator, C64, DEGENERACY_TOL};
use crate::povm::{validate_povm, MeasurementPair, Povm, POVM_TOL};

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Allowed Frobenius deviation of the projector sum from `ν·I`.
pub const ANALYTIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Iterative,
}

#[derive(Debug, Clone)]
pub struct DiscriminationResult {
    pub value: f64,
    pub optimal_povm: Option<Povm>,
    pub method: Method,
    pub iterations: usize,
    /// Analytic: projector-sum deviation. Iterative: dual gap `d·s`.
    pub residual: f64,
    /// The constant `ν` of the projector-sum condition (analytic path only).
    pub nu: Option<f64>,
    /// Dual operator `K` (iterative path only).
    pub dual: Option<HermitianOperator>,
}

fn check_labels(expected: &[String], got: &[String], what: &str) -> Result<()> {
    if expected.len() != got.len() || expected.iter().any(|l| !got.contains(l)) {
        return Err(IwitError::LabelMismatch(format!("{what}: expected labels {expected:?}, got {got:?}")));
    }
    Ok(())
}

/// `Σ_z tr[E(z) M(z)]`.
pub fn pguess_with(e: &StateEnsemble, m: &Povm) -> Result<f64> {
    if e.dim() != m.dim() {
        return Err(IwitError::DimensionMismatch { expected: e.dim(), found: m.dim() });
    }
    check_labels(e.labels(), m.outcomes(), "measurement outcomes")?;
    e.iter().map(|(l, op)| trace_pair(op, m.effect(l).unwrap())).sum()
}

/// Closed-form optimum, or `None` when the projector-sum condition fails.
pub fn pguess_analytic(e: &StateEnsemble) -> Result<Option<DiscriminationResult>> {
    let d = e.dim();
    let mut tops = Vec::with_capacity(e.len());
    for op in e.operators() {
        let sd = eig(op)?;
        tops.push((sd.eigenvalues[0], sd.projectors[0].clone()));
    }
    let lam = tops.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    let active: Vec<bool> = tops.iter().map(|t| t.0 >= lam - DEGENERACY_TOL).collect();
    let sum = tops
        .iter()
        .zip(&active)
        .filter(|(_, &a)| a)
        .fold(HermitianOperator::zeros(d), |acc, (t, _)| acc.add(&t.1));
    let nu = sum.trace() / d as f64;
    let deviation = sum.distance(&HermitianOperator::identity(d).scale(nu));
    if deviation > ANALYTIC_TOL {
        return Ok(None);
    }
    let effects = tops
        .iter()
        .zip(&active)
        .map(|(t, &a)| if a { t.1.scale(1.0 / nu) } else { HermitianOperator::zeros(d) })
        .collect();
    let povm = validate_povm(effects, e.labels().to_vec(), POVM_TOL.max(2.0 * deviation / nu))?;
    Ok(Some(DiscriminationResult {
        value: d as f64 * lam,
        optimal_povm: Some(povm),
        method: Method::Analytic,
        iterations: 0,
        residual: deviation,
        nu: Some(nu),
        dual: None,
    }))
}

/// Inverse square root on the support of a PSD matrix, plus the kernel projector.
fn inv_sqrt_with_kernel(r2: &HermitianOperator) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let (vals, vecs) = r2.eigh()?;
    let d = r2.dim();
    let cutoff = vals[0].max(0.0) * 1e-14;
    let mut inv = DMatrix::<C64>::zeros(d, d);
    let mut kernel = DMatrix::<C64>::zeros(d, d);
    for (i, &v) in vals.iter().enumerate() {
        let col = vecs.column(i);
        let outer = col * col.adjoint();
        if v > cutoff {
            inv += outer.map(|z| z / v.sqrt());
        } else {
            kernel += outer;
        }
    }
    Ok((inv, kernel))
}

/// Fixed-point minimum-error solver with a dual-gap stopping rule.
pub fn pguess_iterative(e: &StateEnsemble, max_iter: usize, tol: f64) -> Result<DiscriminationResult> {
    if max_iter == 0 || tol.is_nan() || tol <= 0.0 {
        return Err(IwitError::InvalidArgument("max_iter must be ≥ 1 and tol > 0".into()));
    }
    let d = e.dim();
    let n = e.len();
    let ops: Vec<&DMatrix<C64>> = e.operators().iter().map(|o| o.matrix()).collect();
    let mut m: Vec<DMatrix<C64>> = vec![DMatrix::<C64>::identity(d, d).map(|z: C64| z / n as f64); n];
    let mut best: Option<(f64, f64)> = None;

    for it in 1..=max_iter {
        let k = ops.iter().zip(&m).fold(DMatrix::<C64>::zeros(d, d), |acc, (eo, mo)| acc + *eo * mo);
        let k = HermitianOperator::hermitize(k);
        let value = k.trace();
        let mut s: f64 = 0.0;
        for op in e.operators() {
            s = s.max(op.sub(&k).max_eigenvalue()?);
        }
        let gap = d as f64 * s;
        if best.is_none_or(|(_, g)| gap < g) {
            best = Some((value, gap));
        }
        if gap < tol {
            let effects = m.into_iter().map(HermitianOperator::hermitize).collect();
            let povm = validate_povm(effects, e.labels().to_vec(), POVM_TOL)?;
            return Ok(DiscriminationResult {
                value,
                optimal_povm: Some(povm),
                method: Method::Iterative,
                iterations: it,
                residual: gap,
                nu: None,
                dual: Some(k),
            });
        }
        let r2 = ops
            .iter()
            .zip(&m)
            .fold(DMatrix::<C64>::zeros(d, d), |acc, (eo, mo)| acc + *eo * mo * *eo);
        let (rinv, kernel) = inv_sqrt_with_kernel(&HermitianOperator::hermitize(r2))?;
        for (mo, eo) in m.iter_mut().zip(&ops) {
            *mo = &rinv * *eo * &*mo * *eo * &rinv;
        }
        // outcomes never fire on the common kernel of the ensemble; park it on the first label
        m[0] += kernel;
    }
    let (best_value, residual) = best.unwrap();
    Err(IwitError::MaxIterExceeded { best_value, residual })
}

/// Optimal guessing probability: analytic when applicable, iterative otherwise.
pub fn pguess(e: &StateEnsemble) -> Result<DiscriminationResult> {
    if let Some(r) = pguess_analytic(e)? {
        return Ok(r);
    }
    log::debug!("analytic discrimination inapplicable for {} labels; iterating", e.len());
    pguess_iterative(e, DEFAULT_MAX_ITER, DEFAULT_TOL)
}

/// `Σ_x tr[E(x)A(x)] + Σ_y tr[E(y)B(y)] = p(X)P(E_X;A) + p(Y)P(E_Y;B)`.
pub fn p_prior_with(pe: &PartitionedEnsemble, pair: &MeasurementPair) -> Result<f64> {
    if pe.dim() != pair.dim() {
        return Err(IwitError::DimensionMismatch { expected: pe.dim(), found: pair.dim() });
    }
    check_labels(pe.block_x(), pair.a().outcomes(), "first measurement")?;
    check_labels(pe.block_y(), pair.b().outcomes(), "second measurement")?;
    let mut total = 0.0;
    for (l, op) in pe.restrict_x() {
        total += trace_pair(&op, pair.a().effect(&l).unwrap())?;
    }
    for (l, op) in pe.restrict_y() {
        total += trace_pair(&op, pair.b().effect(&l).unwrap())?;
    }
    Ok(total)
}

/// Optimum with pre-measurement information and the two underlying solves.
#[derive(Debug, Clone)]
pub struct PriorOptimum {
    pub value: f64,
    pub x: DiscriminationResult,
    pub y: DiscriminationResult,
}

pub fn p_prior_opt(pe: &PartitionedEnsemble) -> Result<PriorOptimum> {
    let sub = crate::ensemble::subensembles(pe)?;
    let x = pguess(&sub.x)?;
    let y = pguess(&sub.y)?;
    Ok(PriorOptimum { value: sub.p_x * x.value + sub.p_y * y.value, x, y })
}

/// Optimum with post-measurement information, via the auxiliary ensemble.
///
/// The returned POVM (when present) lives on `X × Y`; its margins are an
/// optimal compatible pair.
pub fn p_post_opt(pe: &PartitionedEnsemble) -> Result<DiscriminationResult> {
    let aux = auxiliary_ensemble(pe)?;
    let norm = pe.auxiliary_normalizer();
    let r = pguess(&aux)?;
    let optimal_povm = match r.optimal_povm {
        Some(m) => Some(Povm::product(auxiliary_pairs(pe), m.effects().to_vec(), POVM_TOL.max(r.residual))?),
        None => None,
    };
    Ok(DiscriminationResult { value: norm * r.value, optimal_povm, residual: norm * r.residual, ..r })
}
