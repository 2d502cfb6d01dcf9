//! Closed-form results for ensembles and measurements built from two
//! mutually unbiased bases (MUB) `{φ_h}` and `{ψ_k}`.
//!
//! The central object is the G-norm `‖(q,p)‖_G = √(q² + p² − 2Δqp)` with
//! `Δ = 1 − 2/d`, which governs the spectrum of `qQ + pP` for two rank-one
//! projectors with overlap `1/d`. All formulas hold for any MUB pair, not only
//! the Fourier pair generated by [`fourier_mub`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ensemble::{phi_labels, psi_labels, NoiseVector};
use crate::error::{IwitError, Result};
use crate::operator::{orthonormality_deviation, HermitianOperator, Ket, C64};
use crate::povm::{noisy_basis_povm, MeasurementPair};

/// Tolerance on `|⟨φ_h|ψ_k⟩|² − 1/d`.
pub const MUB_TOL: f64 = 1e-9;
/// Components with `|μ| ≤ ZERO_MU_TOL` count as exactly zero.
pub const ZERO_MU_TOL: f64 = 1e-12;
/// Equality tolerance for region boundaries.
pub const REGION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MubPair {
    phi: Vec<Ket>,
    psi: Vec<Ket>,
}

impl MubPair {
    pub fn new(phi: Vec<Ket>, psi: Vec<Ket>) -> Result<Self> {
        let d = phi.len();
        if d < 2 {
            return Err(IwitError::InvalidDimension(d));
        }
        if psi.len() != d || phi.iter().chain(&psi).any(|k| k.len() != d) {
            return Err(IwitError::DimensionMismatch { expected: d, found: psi.len() });
        }
        let max_deviation = orthonormality_deviation(&phi).max(orthonormality_deviation(&psi));
        if max_deviation > 1e-10 {
            return Err(IwitError::NotOrthonormal { max_deviation });
        }
        let max_deviation = mub_deviation(&phi, &psi);
        if max_deviation > MUB_TOL {
            return Err(IwitError::NotMub { max_deviation });
        }
        Ok(Self { phi, psi })
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[Ket] {
        &self.phi
    }

    pub fn psi(&self) -> &[Ket] {
        &self.psi
    }
}

/// `max_{h,k} | |⟨φ_h|ψ_k⟩|² − 1/d |`.
pub fn mub_deviation(phi: &[Ket], psi: &[Ket]) -> f64 {
    let inv = 1.0 / phi.len() as f64;
    phi.iter()
        .flat_map(|a| psi.iter().map(move |b| (a.dotc(b).norm_sqr() - inv).abs()))
        .fold(0.0, f64::max)
}

/// Computational basis and its discrete Fourier transform, `ψ_k(h) = ω^{hk}/√d`.
pub fn fourier_mub(d: usize) -> MubPair {
    assert!(d >= 2, "MUB need d ≥ 2");
    let phi = (0..d).map(|i| crate::operator::basis_ket(d, i)).collect();
    let s = 1.0 / (d as f64).sqrt();
    let psi = (0..d)
        .map(|k| Ket::from_fn(d, |h, _| C64::from_polar(s, 2.0 * PI * ((h * k) % d) as f64 / d as f64)))
        .collect();
    MubPair { phi, psi }
}

fn delta(d: usize) -> f64 {
    1.0 - 2.0 / d as f64
}

/// `‖(q,p)‖_G = √(q² + p² − 2Δqp)`.
pub fn gnorm_qp(q: f64, p: f64, d: usize) -> f64 {
    (q * q + p * p - 2.0 * delta(d) * q * p).max(0.0).sqrt()
}

pub fn gnorm(mu: NoiseVector, d: usize) -> f64 {
    gnorm_qp(mu.mu_phi, mu.mu_psi, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseLabel {
    /// `d = 2` or `max μ > 0`.
    C1,
    /// `d ≥ 3` and `max μ < 0`.
    C2,
    /// `d ≥ 3` and `max μ = 0`.
    C3,
}

fn is_zero(x: f64) -> bool {
    x.abs() <= ZERO_MU_TOL
}

pub fn classify_case(d: usize, mu: NoiseVector) -> Result<CaseLabel> {
    if is_zero(mu.mu_phi) && is_zero(mu.mu_psi) {
        return Err(IwitError::TrivialMu);
    }
    let max = mu.mu_phi.max(mu.mu_psi);
    Ok(if d == 2 || (max > 0.0 && !is_zero(max)) {
        CaseLabel::C1
    } else if is_zero(max) {
        CaseLabel::C3
    } else {
        CaseLabel::C2
    })
}

/// Spectral data of `S = qQ + pP` for unit vectors with `|⟨φ|ψ⟩|² = 1/d`.
#[derive(Debug, Clone)]
pub struct RankOnePairSpectrum {
    pub lam_plus: f64,
    pub lam_minus: f64,
    pub pi_plus: HermitianOperator,
    pub pi_minus: HermitianOperator,
    pub pi_zero: HermitianOperator,
}

pub fn rank_one_pair_spectrum(q: f64, p: f64, phi: &Ket, psi: &Ket) -> Result<RankOnePairSpectrum> {
    let d = phi.len();
    if psi.len() != d {
        return Err(IwitError::DimensionMismatch { expected: d, found: psi.len() });
    }
    let max_deviation = (phi.dotc(psi).norm_sqr() - 1.0 / d as f64).abs();
    if max_deviation > MUB_TOL {
        return Err(IwitError::NotMub { max_deviation });
    }
    if q == 0.0 && p == 0.0 {
        return Err(IwitError::DegenerateInput);
    }
    let g = gnorm_qp(q, p, d);
    let lam_plus = 0.5 * ((q + p) + g);
    let lam_minus = 0.5 * ((q + p) - g);

    let qq = HermitianOperator::projector(phi);
    let pp = HermitianOperator::projector(psi);
    // Q + P − (QP + PQ), which is (d−1)/d times the projection onto span{φ, ψ}
    let anti = qq.matrix() * pp.matrix() + pp.matrix() * qq.matrix();
    let plane = HermitianOperator::hermitize(qq.matrix() + pp.matrix() - anti);
    let dd = d as f64 / (d as f64 - 1.0);
    let s = qq.scale(q).add_scaled(&pp, p);

    let pi_plus = s.add_scaled(&plane, -dd * lam_minus).scale(1.0 / (lam_plus - lam_minus));
    let pi_minus = s.add_scaled(&plane, -dd * lam_plus).scale(1.0 / (lam_minus - lam_plus));
    let pi_zero = HermitianOperator::identity(d).add_scaled(&plane, -dd);
    Ok(RankOnePairSpectrum { lam_plus, lam_minus, pi_plus, pi_minus, pi_zero })
}

/// `P_prior = ¼[2 + |μ_φ| + |μ_ψ| + (1 − 2/d)(μ_φ + μ_ψ − 2)]`.
pub fn p_prior_mub(d: usize, mu: NoiseVector) -> Result<f64> {
    mu.check_range(d)?;
    Ok(0.25 * (2.0 + mu.mu_phi.abs() + mu.mu_psi.abs() + delta(d) * (mu.mu_phi + mu.mu_psi - 2.0)))
}

pub fn p_post_mub(d: usize, mu: NoiseVector) -> Result<f64> {
    mu.check_range(d)?;
    let df = d as f64;
    Ok(match classify_case(d, mu)? {
        CaseLabel::C1 => 0.25 * (delta(d) * (mu.mu_phi + mu.mu_psi) + 4.0 / df + gnorm(mu, d)),
        CaseLabel::C2 | CaseLabel::C3 => (2.0 - (mu.mu_phi + mu.mu_psi)) / (2.0 * df),
    })
}

/// `ν` with `Σ Π(x,y) = ν·I` for the auxiliary ensemble: `d`, `d(d−2)`, `d(d−1)`.
pub fn nu_mub(d: usize, mu: NoiseVector) -> Result<f64> {
    let df = d as f64;
    Ok(match classify_case(d, mu)? {
        CaseLabel::C1 => df,
        CaseLabel::C2 => df * (df - 2.0),
        CaseLabel::C3 => df * (df - 1.0),
    })
}

/// Smearing parameters `(γ_φ, γ_ψ)` of the noisy basis measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmearingVector {
    pub gamma_phi: f64,
    pub gamma_psi: f64,
}

impl SmearingVector {
    pub fn new(gamma_phi: f64, gamma_psi: f64) -> Self {
        Self { gamma_phi, gamma_psi }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.gamma_phi, s * self.gamma_psi)
    }

    pub fn check_range(&self, d: usize) -> Result<()> {
        let min = 1.0 / (1.0 - d as f64);
        for gamma in [self.gamma_phi, self.gamma_psi] {
            if !(min - 1e-12..=1.0 + 1e-12).contains(&gamma) || !gamma.is_finite() {
                return Err(IwitError::GammaOutOfRange { gamma, min });
            }
        }
        Ok(())
    }
}

/// Smearings of the margins of the optimal joint measurement for `Ξ_μ`.
pub fn optimal_margins_mub(d: usize, mu: NoiseVector) -> Result<SmearingVector> {
    mu.check_range(d)?;
    let df = d as f64;
    Ok(match classify_case(d, mu)? {
        CaseLabel::C1 => {
            let g = gnorm(mu, d);
            let f = |own: f64, other: f64| (df * own - (df - 2.0) * (other - g)) / (2.0 * (df - 1.0) * g);
            SmearingVector::new(f(mu.mu_phi, mu.mu_psi), f(mu.mu_psi, mu.mu_phi))
        }
        CaseLabel::C2 | CaseLabel::C3 => {
            let f = |m: f64| if is_zero(m) { 0.0 } else { 1.0 / (1.0 - df) };
            SmearingVector::new(f(mu.mu_phi), f(mu.mu_psi))
        }
    })
}

/// True iff `P_post < P_prior` for `Ξ_μ`: `μ_φμ_ψ ≠ 0` and (`d = 2` or `max μ > 0`).
pub fn has_gap(d: usize, mu: NoiseVector) -> bool {
    !is_zero(mu.mu_phi) && !is_zero(mu.mu_psi) && classify_case(d, mu) == Ok(CaseLabel::C1)
}

/// Constant term `¼(μ_φ + μ_ψ + ‖μ‖_G)` of the tight MUB witness.
pub fn witness_constant(d: usize, mu: NoiseVector) -> f64 {
    0.25 * (mu.mu_phi + mu.mu_psi + gnorm(mu, d))
}

/// The pair `(A_γ, B_γ)` of noisy basis measurements on the φ and ψ blocks.
pub fn noisy_mub_pair(bases: &MubPair, gamma: SmearingVector) -> Result<MeasurementPair> {
    let d = bases.dim();
    MeasurementPair::new(
        noisy_basis_povm(bases.phi(), gamma.gamma_phi, &phi_labels(d))?,
        noisy_basis_povm(bases.psi(), gamma.gamma_psi, &psi_labels(d))?,
    )
}

/// Tight witness of `Ξ_μ` evaluated on `pair`:
/// `¼(μ_φ+μ_ψ+‖μ‖_G) − (1/2d) Σ_j [μ_φ⟨φ_j|A(j)φ_j⟩ + μ_ψ⟨ψ_j|B(j)ψ_j⟩]`.
pub fn mub_witness_value(bases: &MubPair, mu: NoiseVector, pair: &MeasurementPair) -> Result<f64> {
    let d = bases.dim();
    mu.check_range(d)?;
    if !has_gap(d, mu) {
        return Err(IwitError::NoGapForMu { dim: d, mu_phi: mu.mu_phi, mu_psi: mu.mu_psi });
    }
    if pair.dim() != d {
        return Err(IwitError::DimensionMismatch { expected: d, found: pair.dim() });
    }
    let mut diag_a = 0.0;
    let mut diag_b = 0.0;
    for (j, (xl, yl)) in phi_labels(d).iter().zip(psi_labels(d).iter()).enumerate() {
        let a = pair.a().effect(xl).ok_or_else(|| IwitError::LabelMismatch(format!("first measurement lacks {xl:?}")))?;
        let b = pair.b().effect(yl).ok_or_else(|| IwitError::LabelMismatch(format!("second measurement lacks {yl:?}")))?;
        diag_a += a.expectation(&bases.phi()[j]);
        diag_b += b.expectation(&bases.psi()[j]);
    }
    if pair.a().len() != d || pair.b().len() != d {
        return Err(IwitError::LabelMismatch("measurements must have exactly d outcomes".into()));
    }
    Ok(witness_constant(d, mu) - (mu.mu_phi * diag_a + mu.mu_psi * diag_b) / (2.0 * d as f64))
}

/// `θ₀ = π − arctan √(d−1)`.
pub fn theta0(d: usize) -> f64 {
    PI - ((d as f64) - 1.0).sqrt().atan()
}

/// Direction of the MUB ensemble parameter along the ellipse
/// `μ(θ) = α(√d cos θ ± √(d/(d−1)) sin θ)` with `α = 1/(d√(d−1))`.
pub fn mu_of_theta(d: usize, theta: f64) -> NoiseVector {
    let df = d as f64;
    let alpha = 1.0 / (df * (df - 1.0).sqrt());
    let c = df.sqrt() * theta.cos();
    let s = (df / (df - 1.0)).sqrt() * theta.sin();
    NoiseVector::new(alpha * (c + s), alpha * (c - s))
}

/// Point `γ(θ)` on the boundary of the compatible region.
///
/// `θ ∈ [−θ₀, θ₀]` for `d ≥ 3`; in `d = 2` the whole circle `[−π, π]` is boundary.
pub fn boundary_curve(d: usize, theta: f64) -> Result<SmearingVector> {
    if d < 2 {
        return Err(IwitError::InvalidDimension(d));
    }
    let t0 = theta0(d);
    let limit = if d == 2 { PI } else { t0 };
    if theta.is_nan() || theta.abs() > limit + 1e-12 {
        return Err(IwitError::ThetaOutOfRange { theta, theta0: limit });
    }
    let df = d as f64;
    let f = |c: f64| (df - 2.0 - df * c) / (2.0 * (df - 1.0));
    Ok(SmearingVector::new(f((theta + t0).cos()), f((theta - t0).cos())))
}

/// Left side of `d(γ_φ² + γ_ψ²) + 2(d−2)γ_φγ_ψ − 2(d−2)(γ_φ + γ_ψ) = 4 − d`.
pub fn ellipse_form(d: usize, g: SmearingVector) -> f64 {
    let df = d as f64;
    let (a, b) = (g.gamma_phi, g.gamma_psi);
    df * (a * a + b * b) + 2.0 * (df - 2.0) * a * b - 2.0 * (df - 2.0) * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Compatible,
    Boundary,
    Incompatible,
}

/// Closed-form joint measurability of `(A_γ, B_γ)`.
pub fn region_membership(d: usize, g: SmearingVector) -> Result<Region> {
    if d < 2 {
        return Err(IwitError::InvalidDimension(d));
    }
    g.check_range(d)?;
    if d == 2 {
        let r2 = g.gamma_phi.powi(2) + g.gamma_psi.powi(2);
        return Ok(if (r2 - 1.0).abs() <= REGION_TOL {
            Region::Boundary
        } else if r2 < 1.0 {
            Region::Compatible
        } else {
            Region::Incompatible
        });
    }
    let df = d as f64;
    let line = (df - 3.0) / (df - 1.0);
    let sum = g.gamma_phi + g.gamma_psi;
    let form = ellipse_form(d, g);
    let target = 4.0 - df;
    if !(sum <= line + REGION_TOL || form <= target + REGION_TOL) {
        return Ok(Region::Incompatible);
    }
    let min = 1.0 / (1.0 - df);
    let on_edge = (g.gamma_phi - min).abs() <= REGION_TOL || (g.gamma_psi - min).abs() <= REGION_TOL;
    let on_arc = (form - target).abs() <= REGION_TOL && sum >= line - REGION_TOL;
    Ok(if on_edge || on_arc { Region::Boundary } else { Region::Compatible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{basis_ket, eig};
    use crate::povm::margins;

    #[test]
    fn fourier_pairs_are_mub() {
        let b = fourier_mub(2);
        let s = 1.0 / 2f64.sqrt();
        assert!((b.psi()[0][0].re - s).abs() < 1e-15 && (b.psi()[0][1].re - s).abs() < 1e-15);
        assert!((b.psi()[1][1].re + s).abs() < 1e-15);
        assert!(mub_deviation(fourier_mub(3).phi(), fourier_mub(3).psi()) < 1e-12);
        let b5 = fourier_mub(5);
        assert!(MubPair::new(b5.phi().to_vec(), b5.psi().to_vec()).is_ok());
    }

    #[test]
    fn rejects_non_mub() {
        let phi: Vec<Ket> = (0..2).map(|i| basis_ket(2, i)).collect();
        assert!(matches!(MubPair::new(phi.clone(), phi), Err(IwitError::NotMub { .. })));
    }

    #[test]
    fn gnorm_examples() {
        assert!((gnorm(NoiseVector::new(1.0, 1.0), 2) - 2f64.sqrt()).abs() < 1e-15);
        assert!((gnorm(NoiseVector::new(1.0, 1.0), 3) - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        for d in 2..7 {
            assert!((gnorm(NoiseVector::new(1.0, 0.0), d) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn case_examples() {
        assert_eq!(classify_case(2, NoiseVector::new(-0.3, -0.4)), Ok(CaseLabel::C1));
        assert_eq!(classify_case(3, NoiseVector::new(-0.3, -0.4)), Ok(CaseLabel::C2));
        assert_eq!(classify_case(3, NoiseVector::new(0.0, -0.4)), Ok(CaseLabel::C3));
        assert_eq!(classify_case(3, NoiseVector::new(0.0, 0.0)), Err(IwitError::TrivialMu));
    }

    #[test]
    fn spectrum_d2_unit_weights() {
        let b = fourier_mub(2);
        let sp = rank_one_pair_spectrum(1.0, 1.0, &b.phi()[0], &b.psi()[0]).unwrap();
        assert!((sp.lam_plus - (2.0 + 2f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((sp.lam_minus - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!(sp.pi_zero.frobenius_norm() < 1e-14);
        let dense = eig(&HermitianOperator::projector(&b.phi()[0]).add(&HermitianOperator::projector(&b.psi()[0]))).unwrap();
        assert!((dense.eigenvalues[0] - sp.lam_plus).abs() < 1e-12);
    }

    #[test]
    fn spectrum_single_projector() {
        let b = fourier_mub(3);
        let sp = rank_one_pair_spectrum(1.0, 0.0, &b.phi()[1], &b.psi()[2]).unwrap();
        assert!((sp.lam_plus - 1.0).abs() < 1e-15 && sp.lam_minus.abs() < 1e-15);
        assert!(sp.pi_plus.distance(&HermitianOperator::projector(&b.phi()[1])) < 1e-12);
        assert!(matches!(rank_one_pair_spectrum(0.0, 0.0, &b.phi()[0], &b.psi()[0]), Err(IwitError::DegenerateInput)));
    }

    #[test]
    fn spectrum_mixed_signs() {
        let b = fourier_mub(4);
        let sp = rank_one_pair_spectrum(0.5, -0.7, &b.phi()[0], &b.psi()[3]).unwrap();
        assert!(sp.lam_plus > 0.0 && sp.lam_minus < 0.0);
        assert_eq!(sp.pi_zero.rank(1e-9).unwrap(), 2);
    }

    #[test]
    fn prior_post_closed_forms() {
        assert!((p_prior_mub(5, NoiseVector::new(1.0, 1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((p_prior_mub(3, NoiseVector::new(-0.3, -0.4)).unwrap() - 0.45).abs() < 1e-15);
        assert!((p_prior_mub(2, NoiseVector::new(0.5, 0.5)).unwrap() - 0.75).abs() < 1e-15);
        assert!((p_post_mub(2, NoiseVector::new(1.0, 1.0)).unwrap() - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((p_post_mub(3, NoiseVector::new(1.0, 1.0)).unwrap() - 0.5 * (1.0 + 1.0 / 3f64.sqrt())).abs() < 1e-15);
        assert!((p_post_mub(3, NoiseVector::new(-0.3, -0.4)).unwrap() - 0.45).abs() < 1e-15);
        assert!(matches!(p_prior_mub(3, NoiseVector::new(-0.6, 0.0)), Err(IwitError::MuOutOfRange { .. })));
        assert!(matches!(p_post_mub(3, NoiseVector::new(0.0, 0.0)), Err(IwitError::TrivialMu)));
    }

    #[test]
    fn optimal_margin_examples() {
        let g = optimal_margins_mub(2, NoiseVector::new(1.0, 1.0)).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((g.gamma_phi - s).abs() < 1e-15 && (g.gamma_psi - s).abs() < 1e-15);
        assert_eq!(optimal_margins_mub(3, NoiseVector::new(-0.3, -0.4)).unwrap(), SmearingVector::new(-0.5, -0.5));
        assert_eq!(optimal_margins_mub(3, NoiseVector::new(0.0, -0.4)).unwrap(), SmearingVector::new(0.0, -0.5));
    }

    #[test]
    fn optimal_joint_povm_margins_d2() {
        // Margins of M₀ = ν⁻¹Π from the analytic solve are the γ = 1/√2 pair.
        let bases = fourier_mub(2);
        let pe = crate::ensemble::mub_ensemble(NoiseVector::new(1.0, 1.0), &bases).unwrap();
        let r = crate::discrimination::p_post_opt(&pe).unwrap();
        assert_eq!(r.method, crate::discrimination::Method::Analytic);
        let got = margins(r.optimal_povm.as_ref().unwrap()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let want = noisy_mub_pair(&bases, SmearingVector::new(s, s)).unwrap();
        for (x, e) in want.a().iter() {
            assert!(got.a().effect(x).unwrap().distance(e) < 1e-10);
        }
        for (y, e) in want.b().iter() {
            assert!(got.b().effect(y).unwrap().distance(e) < 1e-10);
        }
    }

    #[test]
    fn witness_values_d2() {
        let b = fourier_mub(2);
        let mu = NoiseVector::new(1.0, 1.0);
        let sharp = noisy_mub_pair(&b, SmearingVector::new(1.0, 1.0)).unwrap();
        let w = mub_witness_value(&b, mu, &sharp).unwrap();
        assert!((w + (1.0 - 1.0 / 2f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((w + 0.146447).abs() < 1e-6);
        let flat = noisy_mub_pair(&b, SmearingVector::new(0.0, 0.0)).unwrap();
        assert!((mub_witness_value(&b, mu, &flat).unwrap() - (0.25 * (2.0 + 2f64.sqrt()) - 0.5)).abs() < 1e-12);
        let opt = noisy_mub_pair(&b, optimal_margins_mub(2, mu).unwrap()).unwrap();
        assert!(mub_witness_value(&b, mu, &opt).unwrap().abs() < 1e-12);
        assert!(matches!(mub_witness_value(&b, NoiseVector::new(1.0, 0.0), &opt), Err(IwitError::NoGapForMu { .. })));
    }

    #[test]
    fn boundary_examples() {
        let s = 1.0 / 2f64.sqrt();
        let g = boundary_curve(2, 0.0).unwrap();
        assert!((g.gamma_phi - s).abs() < 1e-15 && (g.gamma_psi - s).abs() < 1e-15);
        let g = boundary_curve(3, 0.0).unwrap();
        assert!((g.gamma_phi - (1.0 + 3f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((g.gamma_phi - 0.683013).abs() < 1e-6);
        for t in [-theta0(2), theta0(2)] {
            let g = boundary_curve(2, t).unwrap();
            assert!((g.gamma_phi.powi(2) + g.gamma_psi.powi(2) - 1.0).abs() < 1e-10);
        }
        assert!(matches!(boundary_curve(3, theta0(3) + 0.01), Err(IwitError::ThetaOutOfRange { .. })));
        assert!(boundary_curve(2, 3.0).is_ok());
    }

    #[test]
    fn curve_endpoints_meet_square_edge() {
        for d in 3..7 {
            let g = boundary_curve(d, theta0(d)).unwrap();
            let df = d as f64;
            assert!((g.gamma_phi - (df - 2.0) / (df - 1.0)).abs() < 1e-12);
            assert!((g.gamma_psi + 1.0 / (df - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn region_examples() {
        assert_eq!(region_membership(2, SmearingVector::new(0.6, 0.8)), Ok(Region::Boundary));
        assert!((ellipse_form(3, SmearingVector::new(0.7, 0.7)) - 1.12).abs() < 1e-12);
        assert_eq!(region_membership(3, SmearingVector::new(0.7, 0.7)), Ok(Region::Incompatible));
        assert_eq!(region_membership(5, SmearingVector::new(-0.25, -0.25)), Ok(Region::Boundary));
        assert_eq!(region_membership(3, SmearingVector::new(0.1, 0.2)), Ok(Region::Compatible));
        assert_eq!(region_membership(2, SmearingVector::new(-0.9, -0.9)), Ok(Region::Incompatible));
        assert!(matches!(region_membership(3, SmearingVector::new(-0.6, 0.0)), Err(IwitError::GammaOutOfRange { .. })));
    }

    #[test]
    fn mu_of_theta_has_constant_gnorm() {
        for d in 2..6 {
            let df = d as f64;
            let alpha = 1.0 / (df * (df - 1.0).sqrt());
            for k in 0..20 {
                let t = -PI + k as f64 * PI / 10.0;
                assert!((gnorm(mu_of_theta(d, t), d) - 2.0 * alpha).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gamma_of_mu_theta_matches_curve() {
        for d in 2..6 {
            let t0 = theta0(d);
            for k in 1..10 {
                let t = -t0 + 2.0 * t0 * k as f64 / 10.0;
                let g = optimal_margins_mub(d, mu_of_theta(d, t)).unwrap();
                let c = boundary_curve(d, t).unwrap();
                assert!((g.gamma_phi - c.gamma_phi).abs() < 1e-12 && (g.gamma_psi - c.gamma_psi).abs() < 1e-12);
            }
        }
    }
}
