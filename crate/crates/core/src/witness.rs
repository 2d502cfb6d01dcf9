//! Linear incompatibility witnesses
//! `W(A,B) = δ − Σ_x tr[F(x)A(x)] − Σ_y tr[G(y)B(y)]`.

use serde::{Deserialize, Serialize};

use crate::discrimination::{p_post_opt, p_prior_opt};
use crate::ensemble::{validate_ensemble, PartitionedEnsemble};
use crate::error::{IwitError, Result};
use crate::operator::{trace_pair, HermitianOperator};
use crate::povm::{check_distinct, common_dim, MeasurementPair, Povm};

/// Minimum `P_prior − P_post` for an ensemble to define a witness.
pub const GAP_TOL: f64 = 1e-8;
pub const EQUIVALENCE_TOL: f64 = 1e-8;

/// Operators indexed by outcome labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFamily {
    pub labels: Vec<String>,
    pub operators: Vec<HermitianOperator>,
}

impl OperatorFamily {
    pub fn new(labels: Vec<String>, operators: Vec<HermitianOperator>) -> Result<Self> {
        if labels.len() != operators.len() {
            return Err(IwitError::LengthMismatch { labels: labels.len(), operators: operators.len() });
        }
        common_dim(&operators)?;
        check_distinct(labels.iter().cloned())?;
        Ok(Self { labels, operators })
    }

    fn get(&self, label: &str) -> Option<&HermitianOperator> {
        self.labels.iter().position(|l| l == label).map(|i| &self.operators[i])
    }

    fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    fn same_labels(&self, other: &[String]) -> bool {
        self.labels.len() == other.len() && other.iter().all(|l| self.labels.contains(l))
    }

    fn mean(&self) -> HermitianOperator {
        let n = self.operators.len() as f64;
        self.operators.iter().fold(HermitianOperator::zeros(self.dim()), |acc, o| acc.add_scaled(o, 1.0 / n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WitnessJson", into = "WitnessJson")]
pub struct Witness {
    f: OperatorFamily,
    g: OperatorFamily,
    delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessJson {
    pub delta: f64,
    pub f: OperatorFamily,
    pub g: OperatorFamily,
}

impl TryFrom<WitnessJson> for Witness {
    type Error = IwitError;
    fn try_from(j: WitnessJson) -> Result<Self> {
        Witness::new(j.f, j.g, j.delta)
    }
}

impl From<Witness> for WitnessJson {
    fn from(w: Witness) -> Self {
        WitnessJson { delta: w.delta, f: w.f, g: w.g }
    }
}

impl Witness {
    pub fn new(f: OperatorFamily, g: OperatorFamily, delta: f64) -> Result<Self> {
        let f = OperatorFamily::new(f.labels, f.operators)?;
        let g = OperatorFamily::new(g.labels, g.operators)?;
        if f.dim() != g.dim() {
            return Err(IwitError::DimensionMismatch { expected: f.dim(), found: g.dim() });
        }
        if let Some(l) = f.labels.iter().find(|l| g.labels.contains(l)) {
            return Err(IwitError::LabelMismatch(format!("label {l:?} occurs in both families")));
        }
        if !delta.is_finite() {
            return Err(IwitError::InvalidArgument(format!("delta must be finite, got {delta}")));
        }
        Ok(Self { f, g, delta })
    }

    pub fn f(&self) -> &OperatorFamily {
        &self.f
    }

    pub fn g(&self) -> &OperatorFamily {
        &self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// `α·W`, i.e. `(αF, αG, αδ)`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let sc = |fam: &OperatorFamily| OperatorFamily {
            labels: fam.labels.clone(),
            operators: fam.operators.iter().map(|o| o.scale(alpha)).collect(),
        };
        Self { f: sc(&self.f), g: sc(&self.g), delta: alpha * self.delta }
    }

    /// Same operators with a different constant.
    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..self.clone() }
    }
}

fn pairing(fam: &OperatorFamily, p: &Povm, which: &str) -> Result<f64> {
    if !fam.same_labels(p.outcomes()) {
        return Err(IwitError::LabelMismatch(format!("{which} labels {:?} do not match {:?}", p.outcomes(), fam.labels)));
    }
    let mut s = 0.0;
    for (l, e) in p.iter() {
        s += trace_pair(fam.get(l).expect("labels checked"), e)?;
    }
    Ok(s)
}

pub fn eval_witness(w: &Witness, pair: &MeasurementPair) -> Result<f64> {
    if pair.dim() != w.dim() {
        return Err(IwitError::DimensionMismatch { expected: w.dim(), found: pair.dim() });
    }
    Ok(w.delta - pairing(&w.f, pair.a(), "first measurement")? - pairing(&w.g, pair.b(), "second measurement")?)
}

/// `(E|_X, E|_Y, δ)` with `δ = P_post` unless overridden by a value in `[P_post, P_prior)`.
pub fn witness_from_ensemble(pe: &PartitionedEnsemble, delta_override: Option<f64>) -> Result<Witness> {
    let p_prior = p_prior_opt(pe)?.value;
    let p_post = p_post_opt(pe)?.value;
    if p_prior - p_post <= GAP_TOL {
        return Err(IwitError::NoGap { p_prior, p_post });
    }
    let delta = match delta_override {
        None => p_post,
        Some(delta) if delta >= p_post - 1e-9 && delta < p_prior => delta,
        Some(delta) => return Err(IwitError::DeltaOutOfRange { delta, lower: p_post, upper: p_prior }),
    };
    let family = |block: Vec<(String, HermitianOperator)>| {
        let (labels, ops) = block.into_iter().unzip();
        OperatorFamily::new(labels, ops)
    };
    Witness::new(family(pe.restrict_x())?, family(pe.restrict_y())?, delta)
}

/// `μ = −(Σ_x ‖F(x)‖ + Σ_y ‖G(y)‖)` in the operator norm.
pub fn witness_shift(w: &Witness) -> Result<f64> {
    let mut s = 0.0;
    for o in w.f.operators.iter().chain(&w.g.operators) {
        s += o.operator_norm()?;
    }
    Ok(-s)
}

/// True iff every operator is the same multiple `cI` of the identity.
fn common_identity_multiple(ops: &[HermitianOperator], tol: f64) -> bool {
    let c = ops[0].trace() / ops[0].dim() as f64;
    let target = HermitianOperator::identity(ops[0].dim()).scale(c);
    ops.iter().all(|o| o.distance(&target) <= tol)
}

/// Partitioned ensemble `E = α(F − μI) ⊔ α(G − μI)` and the scale `α > 0`.
///
/// `α·W(A,B) = δ′ − Σ tr[E(x)A(x)] − Σ tr[E(y)B(y)]` with `δ′ = α(δ − 2μd)`,
/// see [`normalized_delta`].
pub fn normalize_to_ensemble(w: &Witness) -> Result<(PartitionedEnsemble, f64)> {
    let scale = w.f.operators.iter().chain(&w.g.operators).map(|o| o.frobenius_norm()).fold(1.0, f64::max);
    let all: Vec<HermitianOperator> = w.f.operators.iter().chain(&w.g.operators).cloned().collect();
    if common_identity_multiple(&all, 1e-12 * scale) {
        return Err(IwitError::ConstantWitness);
    }
    let mu = witness_shift(w)?;
    let shifted: Vec<HermitianOperator> = w.f.operators.iter().chain(&w.g.operators).map(|o| o.shift(-mu)).collect();
    let total: f64 = shifted.iter().map(|o| o.trace()).sum();
    if total <= 0.0 {
        return Err(IwitError::ConstantWitness);
    }
    let alpha = 1.0 / total;
    let labels = w.f.labels.iter().chain(&w.g.labels).cloned().collect();
    let e = validate_ensemble(shifted.iter().map(|o| o.scale(alpha)).collect(), labels)?;
    let pe = PartitionedEnsemble::new(e, w.f.labels.clone(), w.g.labels.clone())?;
    Ok((pe, alpha))
}

/// `δ′ = α(δ − 2μd)` for the normalization of `w` with scale `alpha`.
pub fn normalized_delta(w: &Witness, alpha: f64) -> Result<f64> {
    Ok(alpha * (w.delta - 2.0 * witness_shift(w)? * w.dim() as f64))
}

/// `F₂ = αF₁ + A`, `G₂ = αG₁ + B`, `δ₂ = αδ₁ + tr[A + B]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCertificate {
    pub alpha: f64,
    pub op_a: HermitianOperator,
    pub op_b: HermitianOperator,
}

/// Decides whether `w1` and `w2` detect the same pairs, returning the
/// relating `(α, A, B)` if so.
pub fn detection_equivalent(w1: &Witness, w2: &Witness, tol: f64) -> Result<Option<EquivalenceCertificate>> {
    if !w1.f.same_labels(&w2.f.labels) || !w1.g.same_labels(&w2.g.labels) {
        return Err(IwitError::LabelMismatch("witnesses are indexed by different labels".into()));
    }
    if w1.dim() != w2.dim() {
        return Err(IwitError::DimensionMismatch { expected: w1.dim(), found: w2.dim() });
    }
    // align w2 to w1's label order
    let aligned = |fam1: &OperatorFamily, fam2: &OperatorFamily| -> Vec<HermitianOperator> {
        fam1.labels.iter().map(|l| fam2.get(l).expect("labels checked").clone()).collect()
    };
    let f2 = OperatorFamily { labels: w1.f.labels.clone(), operators: aligned(&w1.f, &w2.f) };
    let g2 = OperatorFamily { labels: w1.g.labels.clone(), operators: aligned(&w1.g, &w2.g) };

    let (mf1, mg1, mf2, mg2) = (w1.f.mean(), w1.g.mean(), f2.mean(), g2.mean());
    let centered = |fam: &OperatorFamily, m: &HermitianOperator| -> Vec<HermitianOperator> {
        fam.operators.iter().map(|o| o.sub(m)).collect()
    };
    let (cf1, cg1) = (centered(&w1.f, &mf1), centered(&w1.g, &mg1));
    let (cf2, cg2) = (centered(&f2, &mf2), centered(&g2, &mg2));

    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in cf1.iter().zip(&cf2).chain(cg1.iter().zip(&cg2)) {
        num += trace_pair(a, b)?;
        den += trace_pair(a, a)?;
    }
    if den <= tol * tol {
        return Ok(None);
    }
    let alpha = num / den;
    if alpha <= tol {
        return Ok(None);
    }
    let op_a = mf2.add_scaled(&mf1, -alpha);
    let op_b = mg2.add_scaled(&mg1, -alpha);
    let scale = w2.f.operators.iter().chain(&w2.g.operators).map(|o| o.frobenius_norm()).fold(1.0, f64::max);
    let fits = |one: &[HermitianOperator], two: &[HermitianOperator], shift: &HermitianOperator| {
        one.iter().zip(two).all(|(o1, o2)| o1.scale(alpha).add(shift).distance(o2) <= tol * scale)
    };
    if !fits(&w1.f.operators, &f2.operators, &op_a) || !fits(&w1.g.operators, &g2.operators, &op_b) {
        return Ok(None);
    }
    let delta_gap = w2.delta - alpha * w1.delta - (op_a.trace() + op_b.trace());
    if delta_gap.abs() > tol * scale.max(w2.delta.abs()) {
        return Ok(None);
    }
    Ok(Some(EquivalenceCertificate { alpha, op_a, op_b }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::p_prior_with;
    use crate::ensemble::{mub_ensemble, NoiseVector};
    use crate::mub::{fourier_mub, noisy_mub_pair, optimal_margins_mub, SmearingVector};
    use crate::operator::basis_ket;
    use crate::povm::labels;

    fn xi(d: usize, a: f64, b: f64) -> PartitionedEnsemble {
        mub_ensemble(NoiseVector::new(a, b), &fourier_mub(d)).unwrap()
    }

    fn zero_witness(d: usize, delta: f64) -> Witness {
        let fam = |p: &str| OperatorFamily::new(labels(p, d), vec![HermitianOperator::zeros(d); d]).unwrap();
        Witness::new(fam("phi"), fam("psi"), delta).unwrap()
    }

    #[test]
    fn constant_functional() {
        let pair = noisy_mub_pair(&fourier_mub(3), SmearingVector::new(0.2, 0.9)).unwrap();
        assert!((eval_witness(&zero_witness(3, 0.3), &pair).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn label_mismatch() {
        let pair = noisy_mub_pair(&fourier_mub(2), SmearingVector::new(0.2, 0.9)).unwrap();
        let fam = |p: &str| OperatorFamily::new(labels(p, 2), vec![HermitianOperator::zeros(2); 2]).unwrap();
        let w = Witness::new(fam("a"), fam("b"), 0.0).unwrap();
        assert!(matches!(eval_witness(&w, &pair), Err(IwitError::LabelMismatch(_))));
    }

    #[test]
    fn qubit_mub_witness() {
        let w = witness_from_ensemble(&xi(2, 1.0, 1.0), None).unwrap();
        assert!((w.delta() - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-8);
        let b = fourier_mub(2);
        for h in 0..2 {
            let want = HermitianOperator::projector(&b.phi()[h]).scale(0.25);
            assert!(w.f().get(&format!("phi{h}")).unwrap().distance(&want) < 1e-14);
        }
        let sharp = noisy_mub_pair(&b, SmearingVector::new(1.0, 1.0)).unwrap();
        assert!((eval_witness(&w, &sharp).unwrap() + (1.0 - 1.0 / 2f64.sqrt()) / 2.0).abs() < 1e-8);
        let opt = noisy_mub_pair(&b, optimal_margins_mub(2, NoiseVector::new(1.0, 1.0)).unwrap()).unwrap();
        assert!(eval_witness(&w, &opt).unwrap().abs() < 1e-8);
        let pe = xi(2, 1.0, 1.0);
        assert!((eval_witness(&w, &sharp).unwrap() - (w.delta() - p_prior_with(&pe, &sharp).unwrap())).abs() < 1e-10);
    }

    #[test]
    fn no_gap_and_override() {
        assert!(matches!(witness_from_ensemble(&xi(3, -0.3, -0.4), None), Err(IwitError::NoGap { .. })));
        let pe = xi(2, 1.0, 1.0);
        let coarse = witness_from_ensemble(&pe, Some(0.9)).unwrap();
        assert_eq!(coarse.delta(), 0.9);
        let b = fourier_mub(2);
        let sharp = noisy_mub_pair(&b, SmearingVector::new(1.0, 1.0)).unwrap();
        let tight = witness_from_ensemble(&pe, None).unwrap();
        assert!(eval_witness(&coarse, &sharp).unwrap() > eval_witness(&tight, &sharp).unwrap());
        assert!(matches!(witness_from_ensemble(&pe, Some(1.0)), Err(IwitError::DeltaOutOfRange { .. })));
        assert!(matches!(witness_from_ensemble(&pe, Some(0.5)), Err(IwitError::DeltaOutOfRange { .. })));
    }

    #[test]
    fn normalization_example() {
        let f = OperatorFamily::new(vec!["x".into()], vec![HermitianOperator::projector(&basis_ket(2, 0))]).unwrap();
        let g = OperatorFamily::new(vec!["y".into()], vec![HermitianOperator::zeros(2)]).unwrap();
        let w = Witness::new(f, g, 0.5).unwrap();
        assert_eq!(witness_shift(&w).unwrap(), -1.0);
        let (pe, alpha) = normalize_to_ensemble(&w).unwrap();
        assert!((alpha - 1.0 / 5.0).abs() < 1e-15);
        let total: f64 = pe.ensemble().operators().iter().map(|o| o.trace()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_witness_rejected() {
        let fam = |p: &str| OperatorFamily::new(labels(p, 2), vec![HermitianOperator::identity(2); 2]).unwrap();
        let w = Witness::new(fam("a"), fam("b"), 1.0).unwrap();
        assert_eq!(normalize_to_ensemble(&w), Err(IwitError::ConstantWitness));
    }

    #[test]
    fn normalization_round_trip_is_equivalent() {
        let w = witness_from_ensemble(&xi(2, 1.0, 1.0), None).unwrap();
        let (pe, alpha) = normalize_to_ensemble(&w).unwrap();
        let back = Witness::new(w.f().clone(), w.g().clone(), 0.0).unwrap();
        let mut fam_f = back.f().clone();
        let mut fam_g = back.g().clone();
        fam_f.operators = pe.restrict_x().into_iter().map(|(_, o)| o).collect();
        fam_g.operators = pe.restrict_y().into_iter().map(|(_, o)| o).collect();
        let w2 = Witness::new(fam_f, fam_g, normalized_delta(&w, alpha).unwrap()).unwrap();
        let cert = detection_equivalent(&w, &w2, EQUIVALENCE_TOL).unwrap().unwrap();
        assert!((cert.alpha - alpha).abs() < 1e-10);
    }

    #[test]
    fn equivalence_examples() {
        let w = witness_from_ensemble(&xi(3, 0.4, 0.3), None).unwrap();
        let c = detection_equivalent(&w, &w.scaled(2.0), EQUIVALENCE_TOL).unwrap().unwrap();
        assert!((c.alpha - 2.0).abs() < 1e-12 && c.op_a.frobenius_norm() < 1e-12 && c.op_b.frobenius_norm() < 1e-12);
        let c = detection_equivalent(&w, &w, EQUIVALENCE_TOL).unwrap().unwrap();
        assert!((c.alpha - 1.0).abs() < 1e-10 && c.op_a.frobenius_norm() < 1e-10);

        let w2 = witness_from_ensemble(&xi(3, 0.8, 0.6), None).unwrap();
        let c = detection_equivalent(&w, &w2, EQUIVALENCE_TOL).unwrap().unwrap();
        assert!((c.alpha - 2.0).abs() < 1e-8);

        let a = witness_from_ensemble(&xi(2, 1.0, 1.0), None).unwrap();
        let b = witness_from_ensemble(&xi(2, 1.0, 0.5), None).unwrap();
        assert!(detection_equivalent(&a, &b, EQUIVALENCE_TOL).unwrap().is_none());
    }

    #[test]
    fn json_shape() {
        let w = witness_from_ensemble(&xi(2, 1.0, 1.0), None).unwrap();
        let v: serde_json::Value = serde_json::to_value(&w).unwrap();
        assert!(v["delta"].is_f64() && v["f"]["labels"].is_array() && v["g"]["operators"].is_array());
        let back: Witness = serde_json::from_value(v).unwrap();
        assert_eq!(back, w);
    }
}
