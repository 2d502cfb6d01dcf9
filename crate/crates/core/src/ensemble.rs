//! State ensembles, two-block partitions and the ensembles built from them.

use serde::{Deserialize, Serialize};

use crate::error::{IwitError, Result};
use crate::mub::MubPair;
use crate::operator::HermitianOperator;
use crate::povm::{check_distinct, common_dim, product_label, POVM_TOL};

/// Positivity and unit-trace tolerance for ensembles.
pub const ENSEMBLE_TOL: f64 = 1e-9;

/// Labeled family `E(z) = p(z)ρ_z`: positive operators of unit total trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleJson", into = "EnsembleJson")]
pub struct StateEnsemble {
    dim: usize,
    labels: Vec<String>,
    operators: Vec<HermitianOperator>,
}

/// Wire form shared by plain and partitioned ensembles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub dim: usize,
    pub labels: Vec<String>,
    pub operators: Vec<HermitianOperator>,
    #[serde(rename = "blockX", default, skip_serializing_if = "Option::is_none")]
    pub block_x: Option<Vec<String>>,
    #[serde(rename = "blockY", default, skip_serializing_if = "Option::is_none")]
    pub block_y: Option<Vec<String>>,
}

impl TryFrom<EnsembleJson> for StateEnsemble {
    type Error = IwitError;
    fn try_from(j: EnsembleJson) -> Result<Self> {
        let e = validate_ensemble(j.operators, j.labels)?;
        if e.dim != j.dim {
            return Err(IwitError::DimensionMismatch { expected: j.dim, found: e.dim });
        }
        Ok(e)
    }
}

impl From<StateEnsemble> for EnsembleJson {
    fn from(e: StateEnsemble) -> Self {
        EnsembleJson { dim: e.dim, labels: e.labels, operators: e.operators, block_x: None, block_y: None }
    }
}

/// Checks `E(z) ⪰ 0` and `Σ tr E(z) = 1` within [`ENSEMBLE_TOL`].
pub fn validate_ensemble(operators: Vec<HermitianOperator>, labels: Vec<String>) -> Result<StateEnsemble> {
    if labels.len() != operators.len() {
        return Err(IwitError::LengthMismatch { labels: labels.len(), operators: operators.len() });
    }
    let dim = common_dim(&operators)?;
    check_distinct(labels.iter().cloned())?;
    for (l, op) in labels.iter().zip(&operators) {
        let min = op.min_eigenvalue()?;
        if min < -ENSEMBLE_TOL {
            return Err(IwitError::NotPositive { label: l.clone(), min_eigenvalue: min });
        }
    }
    let total: f64 = operators.iter().map(HermitianOperator::trace).sum();
    if (total - 1.0).abs() > ENSEMBLE_TOL {
        return Err(IwitError::TraceNotOne { residual: total - 1.0 });
    }
    Ok(StateEnsemble { dim, labels, operators })
}

impl StateEnsemble {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn operators(&self) -> &[HermitianOperator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&HermitianOperator> {
        self.labels.iter().position(|l| l == label).map(|i| &self.operators[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &HermitianOperator)> {
        self.labels.iter().zip(&self.operators)
    }

    /// Probability `p(S) = Σ_{z∈S} tr E(z)` of a label subset.
    pub fn probability(&self, subset: &[String]) -> f64 {
        subset.iter().filter_map(|l| self.get(l)).map(HermitianOperator::trace).sum()
    }
}

/// A state ensemble with its labels split into blocks `X` and `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleJson", into = "EnsembleJson")]
pub struct PartitionedEnsemble {
    ensemble: StateEnsemble,
    block_x: Vec<String>,
    block_y: Vec<String>,
}

impl TryFrom<EnsembleJson> for PartitionedEnsemble {
    type Error = IwitError;
    fn try_from(mut j: EnsembleJson) -> Result<Self> {
        let bx = j.block_x.take().ok_or_else(|| IwitError::InvalidPartition("missing field blockX".into()))?;
        let by = j.block_y.take().ok_or_else(|| IwitError::InvalidPartition("missing field blockY".into()))?;
        PartitionedEnsemble::new(StateEnsemble::try_from(j)?, bx, by)
    }
}

impl From<PartitionedEnsemble> for EnsembleJson {
    fn from(pe: PartitionedEnsemble) -> Self {
        let mut j = EnsembleJson::from(pe.ensemble);
        j.block_x = Some(pe.block_x);
        j.block_y = Some(pe.block_y);
        j
    }
}

impl PartitionedEnsemble {
    pub fn new(ensemble: StateEnsemble, block_x: Vec<String>, block_y: Vec<String>) -> Result<Self> {
        check_distinct(block_x.iter().chain(&block_y).cloned())
            .map_err(|e| IwitError::InvalidPartition(format!("blocks overlap or repeat: {e}")))?;
        if block_x.len() + block_y.len() != ensemble.len()
            || block_x.iter().chain(&block_y).any(|l| ensemble.get(l).is_none())
        {
            return Err(IwitError::InvalidPartition("blocks must cover exactly the ensemble labels".into()));
        }
        if block_x.is_empty() || block_y.is_empty() {
            return Err(IwitError::InvalidPartition("both blocks must be nonempty".into()));
        }
        Ok(Self { ensemble, block_x, block_y })
    }

    pub fn ensemble(&self) -> &StateEnsemble {
        &self.ensemble
    }

    pub fn block_x(&self) -> &[String] {
        &self.block_x
    }

    pub fn block_y(&self) -> &[String] {
        &self.block_y
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim
    }

    pub fn p_x(&self) -> f64 {
        self.ensemble.probability(&self.block_x)
    }

    pub fn p_y(&self) -> f64 {
        self.ensemble.probability(&self.block_y)
    }

    /// Restriction `E|_X` as (labels, operators).
    pub fn restrict_x(&self) -> Vec<(String, HermitianOperator)> {
        self.restrict(&self.block_x)
    }

    pub fn restrict_y(&self) -> Vec<(String, HermitianOperator)> {
        self.restrict(&self.block_y)
    }

    fn restrict(&self, block: &[String]) -> Vec<(String, HermitianOperator)> {
        block.iter().map(|l| (l.clone(), self.ensemble.get(l).unwrap().clone())).collect()
    }

    /// Normalizer `|X|p(Y) + |Y|p(X)` of the auxiliary ensemble.
    pub fn auxiliary_normalizer(&self) -> f64 {
        self.block_x.len() as f64 * self.p_y() + self.block_y.len() as f64 * self.p_x()
    }
}

/// Conditional ensembles `E_X = E|_X / p(X)` and `E_Y = E|_Y / p(Y)`.
#[derive(Debug, Clone)]
pub struct Subensembles {
    pub x: StateEnsemble,
    pub y: StateEnsemble,
    pub p_x: f64,
    pub p_y: f64,
}

pub fn subensembles(pe: &PartitionedEnsemble) -> Result<Subensembles> {
    let (p_x, p_y) = (pe.p_x(), pe.p_y());
    if p_x <= f64::EPSILON {
        return Err(IwitError::EmptyBlock { block: "X" });
    }
    if p_y <= f64::EPSILON {
        return Err(IwitError::EmptyBlock { block: "Y" });
    }
    let cond = |rows: Vec<(String, HermitianOperator)>, p: f64| {
        let (labels, ops): (Vec<_>, Vec<_>) = rows.into_iter().map(|(l, o)| (l, o.scale(1.0 / p))).unzip();
        validate_ensemble(ops, labels)
    };
    Ok(Subensembles { x: cond(pe.restrict_x(), p_x)?, y: cond(pe.restrict_y(), p_y)?, p_x, p_y })
}

/// Noise parameters `(μ_φ, μ_ψ)` of the MUB ensemble family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseVector {
    pub mu_phi: f64,
    pub mu_psi: f64,
}

impl NoiseVector {
    pub fn new(mu_phi: f64, mu_psi: f64) -> Self {
        Self { mu_phi, mu_psi }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::new(alpha * self.mu_phi, alpha * self.mu_psi)
    }

    /// Errors unless both components lie in `[1/(1−d), 1]`.
    pub fn check_range(&self, d: usize) -> Result<()> {
        let min = 1.0 / (1.0 - d as f64);
        for mu in [self.mu_phi, self.mu_psi] {
            if !(min - 1e-12..=1.0 + 1e-12).contains(&mu) || !mu.is_finite() {
                return Err(IwitError::MuOutOfRange { mu, min });
            }
        }
        Ok(())
    }
}

pub fn phi_labels(d: usize) -> Vec<String> {
    crate::povm::labels("phi", d)
}

pub fn psi_labels(d: usize) -> Vec<String> {
    crate::povm::labels("psi", d)
}

/// `E_μ(j,ℓ) = (1/2d)[μ_ℓ|ℓ_j⟩⟨ℓ_j| + (1−μ_ℓ) I/d]`, split into the φ-block
/// `X = {phi0..}` and the ψ-block `Y = {psi0..}`.
pub fn mub_ensemble(mu: NoiseVector, bases: &MubPair) -> Result<PartitionedEnsemble> {
    let d = bases.dim();
    mu.check_range(d)?;
    let df = d as f64;
    let member = |ket, m: f64| HermitianOperator::projector(ket).scale(m).shift((1.0 - m) / df).scale(1.0 / (2.0 * df));
    let mut labels = phi_labels(d);
    labels.extend(psi_labels(d));
    let ops = bases
        .phi()
        .iter()
        .map(|k| member(k, mu.mu_phi))
        .chain(bases.psi().iter().map(|k| member(k, mu.mu_psi)))
        .collect();
    let e = validate_ensemble(ops, labels)?;
    PartitionedEnsemble::new(e, phi_labels(d), psi_labels(d))
}

/// `Ẽ(x,y) = [E(x) + E(y)] / (|X|p(Y) + |Y|p(X))` on `X × Y`.
pub fn auxiliary_ensemble(pe: &PartitionedEnsemble) -> Result<StateEnsemble> {
    let norm = pe.auxiliary_normalizer();
    let mut labels = Vec::new();
    let mut ops = Vec::new();
    for (x, ex) in pe.restrict_x() {
        for (y, ey) in pe.restrict_y() {
            labels.push(product_label(&x, &y));
            ops.push(ex.add(&ey).scale(1.0 / norm));
        }
    }
    validate_ensemble(ops, labels)
}

/// The pairs `(x, y)` in the order used by [`auxiliary_ensemble`].
pub fn auxiliary_pairs(pe: &PartitionedEnsemble) -> Vec<(String, String)> {
    pe.block_x()
        .iter()
        .flat_map(|x| pe.block_y().iter().map(move |y| (x.clone(), y.clone())))
        .collect()
}

// Keep POVM and ensemble tolerances in lockstep.
const _: () = assert!(POVM_TOL == ENSEMBLE_TOL);
