//! Finite-outcome POVMs, measurement pairs and joint-measurement margins.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{IwitError, Result};
use crate::operator::{orthonormality_deviation, HermitianOperator, Ket, PSD_TOL};

/// Tolerance used for POVM positivity and normalization unless overridden.
pub const POVM_TOL: f64 = 1e-9;

/// Label of the outcome `(x, y)` of a measurement on `X × Y`.
///
/// Encoded as a JSON array so that component labels containing separators
/// cannot collide.
pub fn product_label(x: &str, y: &str) -> String {
    serde_json::to_string(&[x, y]).expect("string array serializes")
}

/// A measurement with finitely many labeled outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    dim: usize,
    outcomes: Vec<String>,
    effects: Vec<HermitianOperator>,
    pairs: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmJson {
    pub dim: usize,
    pub outcomes: Vec<String>,
    pub effects: Vec<HermitianOperator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_pairs: Option<Vec<(String, String)>>,
}

impl TryFrom<PovmJson> for Povm {
    type Error = IwitError;

    fn try_from(j: PovmJson) -> Result<Self> {
        let mut p = validate_povm(j.effects, j.outcomes, POVM_TOL)?;
        if p.dim != j.dim {
            return Err(IwitError::DimensionMismatch { expected: j.dim, found: p.dim });
        }
        if let Some(pairs) = j.outcome_pairs {
            if pairs.len() != p.outcomes.len() {
                return Err(IwitError::LengthMismatch { labels: pairs.len(), operators: p.outcomes.len() });
            }
            check_distinct(pairs.iter().map(|(x, y)| product_label(x, y)))?;
            p.pairs = Some(pairs);
        }
        Ok(p)
    }
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> Self {
        PovmJson { dim: p.dim, outcomes: p.outcomes, effects: p.effects, outcome_pairs: p.pairs }
    }
}

pub(crate) fn check_distinct<I: IntoIterator<Item = String>>(labels: I) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.clone()) {
            return Err(IwitError::DuplicateLabel(l));
        }
    }
    Ok(())
}

pub(crate) fn common_dim(ops: &[HermitianOperator]) -> Result<usize> {
    let d = ops.first().ok_or(IwitError::EmptyFamily)?.dim();
    for op in ops {
        if op.dim() != d {
            return Err(IwitError::DimensionMismatch { expected: d, found: op.dim() });
        }
    }
    Ok(d)
}

/// Checks positivity of every effect and `Σ effects = I` (Frobenius) within `tol`.
pub fn validate_povm(effects: Vec<HermitianOperator>, labels: Vec<String>, tol: f64) -> Result<Povm> {
    if labels.len() != effects.len() {
        return Err(IwitError::LengthMismatch { labels: labels.len(), operators: effects.len() });
    }
    let dim = common_dim(&effects)?;
    check_distinct(labels.iter().cloned())?;
    for (l, e) in labels.iter().zip(&effects) {
        let min = e.min_eigenvalue()?;
        if min < -tol {
            return Err(IwitError::NotPositive { label: l.clone(), min_eigenvalue: min });
        }
    }
    let sum = effects.iter().fold(HermitianOperator::zeros(dim), |acc, e| acc.add(e));
    let residual = sum.distance(&HermitianOperator::identity(dim));
    if residual > tol {
        return Err(IwitError::NotNormalized { residual });
    }
    Ok(Povm { dim, outcomes: labels, effects, pairs: None })
}

impl Povm {
    /// A POVM on `X × Y` whose outcomes are given structurally.
    pub fn product(pairs: Vec<(String, String)>, effects: Vec<HermitianOperator>, tol: f64) -> Result<Self> {
        let labels = pairs.iter().map(|(x, y)| product_label(x, y)).collect();
        let mut p = validate_povm(effects, labels, tol)?;
        p.pairs = Some(pairs);
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn outcome_pairs(&self) -> Option<&[(String, String)]> {
        self.pairs.as_deref()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn effect(&self, label: &str) -> Option<&HermitianOperator> {
        self.outcomes.iter().position(|l| l == label).map(|i| &self.effects[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &HermitianOperator)> {
        self.outcomes.iter().zip(&self.effects)
    }
}

/// `U_Z(z) = I/|Z|`.
pub fn uniform_povm(labels: &[String], dim: usize) -> Result<Povm> {
    if labels.is_empty() {
        return Err(IwitError::EmptyFamily);
    }
    if dim == 0 {
        return Err(IwitError::InvalidDimension(0));
    }
    let e = HermitianOperator::identity(dim).scale(1.0 / labels.len() as f64);
    validate_povm(vec![e; labels.len()], labels.to_vec(), POVM_TOL)
}

/// `effect(h) = γ|e_h⟩⟨e_h| + (1−γ) I/d`, admissible for `γ ∈ [1/(1−d), 1]`.
pub fn noisy_basis_povm(basis: &[Ket], gamma: f64, labels: &[String]) -> Result<Povm> {
    let d = basis.len();
    if d < 2 {
        return Err(IwitError::InvalidDimension(d));
    }
    if labels.len() != d {
        return Err(IwitError::LengthMismatch { labels: labels.len(), operators: d });
    }
    if basis.iter().any(|k| k.len() != d) {
        return Err(IwitError::DimensionMismatch { expected: d, found: basis[0].len() });
    }
    let max_deviation = orthonormality_deviation(basis);
    if max_deviation > 1e-10 {
        return Err(IwitError::NotOrthonormal { max_deviation });
    }
    let min = 1.0 / (1.0 - d as f64);
    if !(min - 1e-12..=1.0 + 1e-12).contains(&gamma) {
        return Err(IwitError::GammaOutOfRange { gamma, min });
    }
    let effects = basis
        .iter()
        .map(|k| HermitianOperator::projector(k).scale(gamma).shift((1.0 - gamma) / d as f64))
        .collect();
    validate_povm(effects, labels.to_vec(), POVM_TOL)
}

/// Two measurements on disjoint outcome sets `X` and `Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairJson", into = "PairJson")]
pub struct MeasurementPair {
    a: Povm,
    b: Povm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    pub a: Povm,
    pub b: Povm,
}

impl TryFrom<PairJson> for MeasurementPair {
    type Error = IwitError;
    fn try_from(j: PairJson) -> Result<Self> {
        MeasurementPair::new(j.a, j.b)
    }
}

impl From<MeasurementPair> for PairJson {
    fn from(p: MeasurementPair) -> Self {
        PairJson { a: p.a, b: p.b }
    }
}

impl MeasurementPair {
    pub fn new(a: Povm, b: Povm) -> Result<Self> {
        if a.dim != b.dim {
            return Err(IwitError::DimensionMismatch { expected: a.dim, found: b.dim });
        }
        if let Some(l) = a.outcomes.iter().find(|l| b.outcomes.contains(l)) {
            return Err(IwitError::LabelMismatch(format!("label {l:?} occurs in both X and Y")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Povm {
        &self.a
    }

    pub fn b(&self) -> &Povm {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim
    }
}

/// The two margins `A(x) = Σ_y M(x,y)` and `B(y) = Σ_x M(x,y)`.
pub fn margins(m: &Povm) -> Result<MeasurementPair> {
    // tolerance widens with the number of summed effects
    margins_with_tol(m, POVM_TOL.max(PSD_TOL * m.len() as f64))
}

/// [`margins`] with an explicit validation tolerance for the summed effects.
pub fn margins_with_tol(m: &Povm, tol: f64) -> Result<MeasurementPair> {
    let pairs = m.pairs.as_ref().ok_or(IwitError::NotProductLabeled)?;
    let mut xs: Vec<String> = Vec::new();
    let mut ys: Vec<String> = Vec::new();
    for (x, y) in pairs {
        if !xs.contains(x) {
            xs.push(x.clone());
        }
        if !ys.contains(y) {
            ys.push(y.clone());
        }
    }
    if xs.len() * ys.len() != pairs.len() {
        return Err(IwitError::NotProductLabeled);
    }
    let d = m.dim;
    let mut a = vec![HermitianOperator::zeros(d); xs.len()];
    let mut b = vec![HermitianOperator::zeros(d); ys.len()];
    for ((x, y), e) in pairs.iter().zip(&m.effects) {
        let i = xs.iter().position(|l| l == x).unwrap();
        let j = ys.iter().position(|l| l == y).unwrap();
        a[i] = a[i].add(e);
        b[j] = b[j].add(e);
    }
    MeasurementPair::new(validate_povm(a, xs, tol)?, validate_povm(b, ys, tol)?)
}

/// Point-mass POVM: the whole identity on `labels[index]`.
pub fn point_mass_povm(labels: &[String], index: usize, dim: usize) -> Result<Povm> {
    let effects = (0..labels.len())
        .map(|i| if i == index { HermitianOperator::identity(dim) } else { HermitianOperator::zeros(dim) })
        .collect();
    validate_povm(effects, labels.to_vec(), POVM_TOL)
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}
