//! Seeded random instances: unitaries, states, POVMs, ensembles, witnesses.
//!
//! Core computations never draw random numbers; these samplers back the CLI
//! self-checks and the test suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{validate_ensemble, PartitionedEnsemble, StateEnsemble};
use crate::error::Result;
use crate::mub::MubPair;
use crate::operator::{HermitianOperator, Ket, C64};
use crate::povm::{labels, validate_povm, MeasurementPair, Povm, POVM_TOL};
use crate::witness::{OperatorFamily, Witness};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `rows × cols` matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = ginibre(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random positive operator `GG†` of rank at most `rank`.
pub fn random_psd<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(d, rank, rng);
    HermitianOperator::from_matrix(&g * g.adjoint()).expect("GG† is Hermitian")
}

/// Hermitian operator with Gaussian entries of standard deviation `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, scale: f64, rng: &mut R) -> HermitianOperator {
    let g = ginibre(d, d, rng);
    HermitianOperator::from_matrix((&g + g.adjoint()).scale(0.5 * scale)).expect("G + G† is Hermitian")
}

/// Random pure state.
pub fn random_ket<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Ket {
    let v = Ket::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// `M(i) = S^{-1/2} W(i) S^{-1/2}` for random positive `W(i)` and `S = Σ W`.
pub fn random_povm<R: Rng + ?Sized>(outcomes: &[String], d: usize, rng: &mut R) -> Result<Povm> {
    let mut total_rank = 0;
    let w: Vec<HermitianOperator> = outcomes.iter().enumerate().map(|(i, _)| {
        let mut rank = rng.random_range(1..=d);
        // keep S = Σ W invertible
        if i + 1 == outcomes.len() {
            rank = rank.max(d.saturating_sub(total_rank)).min(d);
        }
        total_rank += rank;
        random_psd(d, rank, rng)
    }).collect();
    let s = w.iter().fold(HermitianOperator::zeros(d), |acc, x| acc.add(x));
    let s_inv_half = s.map_spectrum(|l| 1.0 / l.sqrt())?;
    let effects = w.iter().map(|x| x.conjugate(s_inv_half.matrix())).collect();
    validate_povm(effects, outcomes.to_vec(), POVM_TOL)
}

/// Independent random POVMs on `x0..` and `y0..`.
pub fn random_pair<R: Rng + ?Sized>(nx: usize, ny: usize, d: usize, rng: &mut R) -> Result<MeasurementPair> {
    MeasurementPair::new(random_povm(&labels("x", nx), d, rng)?, random_povm(&labels("y", ny), d, rng)?)
}

/// Margins of a random joint measurement on `X × Y`.
pub fn random_compatible_pair<R: Rng + ?Sized>(nx: usize, ny: usize, d: usize, rng: &mut R) -> Result<MeasurementPair> {
    let xs = labels("x", nx);
    let ys = labels("y", ny);
    let pairs: Vec<(String, String)> = xs.iter().flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone()))).collect();
    let joint = random_povm(&pairs.iter().map(|(x, y)| crate::povm::product_label(x, y)).collect::<Vec<_>>(), d, rng)?;
    let m = Povm::product(pairs, joint.effects().to_vec(), POVM_TOL)?;
    crate::povm::margins(&m)
}

/// Random positive operators normalized to unit total trace.
pub fn random_ensemble<R: Rng + ?Sized>(labels: &[String], d: usize, rng: &mut R) -> Result<StateEnsemble> {
    let ops: Vec<HermitianOperator> = labels.iter().map(|_| {
        let rank = rng.random_range(1..=d);
        random_psd(d, rank, rng)
    }).collect();
    let total: f64 = ops.iter().map(|o| o.trace()).sum();
    validate_ensemble(ops.iter().map(|o| o.scale(1.0 / total)).collect(), labels.to_vec())
}

/// Random ensemble partitioned into blocks `x0..` and `y0..`.
pub fn random_partitioned_ensemble<R: Rng + ?Sized>(nx: usize, ny: usize, d: usize, rng: &mut R) -> Result<PartitionedEnsemble> {
    let (xs, ys) = (labels("x", nx), labels("y", ny));
    let all: Vec<String> = xs.iter().chain(&ys).cloned().collect();
    PartitionedEnsemble::new(random_ensemble(&all, d, rng)?, xs, ys)
}

/// Witness with Gaussian Hermitian `F`, `G` and `δ` uniform in `[-1, 1]`.
pub fn random_witness<R: Rng + ?Sized>(nx: usize, ny: usize, d: usize, rng: &mut R) -> Result<Witness> {
    let f = OperatorFamily::new(labels("x", nx), (0..nx).map(|_| random_hermitian(d, 1.0, rng)).collect())?;
    let g = OperatorFamily::new(labels("y", ny), (0..ny).map(|_| random_hermitian(d, 1.0, rng)).collect())?;
    Witness::new(f, g, rng.random_range(-1.0..=1.0))
}

/// `(Uφ, Uψ)` for a Haar unitary `U`: again a MUB pair.
pub fn rotated_mub<R: Rng + ?Sized>(bases: &MubPair, rng: &mut R) -> MubPair {
    let u = random_unitary(bases.dim(), rng);
    let rot = |ks: &[Ket]| ks.iter().map(|k| &u * k).collect::<Vec<_>>();
    MubPair::new(rot(bases.phi()), rot(bases.psi())).expect("unitaries preserve unbiasedness")
}
