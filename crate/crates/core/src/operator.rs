//! Dense complex Hermitian operators on a `d`-dimensional Hilbert space.
//!
//! Everything else in the crate (effects, ensemble members, witness
//! coefficients) is a [`HermitianOperator`]. Matrices are small (d ≤ ~16),
//! so all storage is dense.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{IwitError, Result};

pub type C64 = Complex<f64>;
pub type Ket = DVector<C64>;

/// Maximum |H - H†| entry accepted from user input.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Slack on the smallest eigenvalue when testing positivity.
pub const PSD_TOL: f64 = 1e-9;
/// Frobenius tolerance on spectral reconstruction.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are merged into one eigenprojection.
pub const DEGENERACY_TOL: f64 = 1e-8;

const EIG_MAX_SWEEPS: usize = 10_000;

/// A `d×d` complex self-adjoint matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct HermitianOperator {
    mat: DMatrix<C64>,
}

/// Wire form: `{"dim": d, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<OperatorJson> for HermitianOperator {
    type Error = IwitError;

    fn try_from(j: OperatorJson) -> Result<Self> {
        let op = make_hermitian(&j.re, &j.im)?;
        if op.dim() != j.dim {
            return Err(IwitError::DimensionMismatch { expected: j.dim, found: op.dim() });
        }
        Ok(op)
    }
}

impl From<HermitianOperator> for OperatorJson {
    fn from(op: HermitianOperator) -> Self {
        let d = op.dim();
        let re = (0..d).map(|i| (0..d).map(|j| op.mat[(i, j)].re).collect()).collect();
        let im = (0..d).map(|i| (0..d).map(|j| op.mat[(i, j)].im).collect()).collect();
        OperatorJson { dim: d, re, im }
    }
}

/// Builds an operator from its real and imaginary parts.
///
/// `re` must be symmetric and `im` antisymmetric within [`HERMITIAN_TOL`].
pub fn make_hermitian(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<HermitianOperator> {
    let d = re.len();
    if d == 0 {
        return Err(IwitError::InvalidDimension(0));
    }
    if im.len() != d {
        return Err(IwitError::DimensionMismatch { expected: d, found: im.len() });
    }
    for row in re.iter().chain(im.iter()) {
        if row.len() != d {
            return Err(IwitError::DimensionMismatch { expected: d, found: row.len() });
        }
    }
    let mat = DMatrix::from_fn(d, d, |i, j| C64::new(re[i][j], im[i][j]));
    HermitianOperator::from_matrix(mat)
}

impl HermitianOperator {
    /// Validates Hermiticity of `mat` and stores its exactly-Hermitian part.
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(IwitError::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        if mat.nrows() == 0 {
            return Err(IwitError::InvalidDimension(0));
        }
        let deviation = (&mat - mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > HERMITIAN_TOL {
            return Err(IwitError::NotHermitian { deviation });
        }
        Ok(Self::hermitize(mat))
    }

    /// Takes the Hermitian part `(M + M†)/2` without validation. Used for
    /// results of arithmetic that is Hermitian up to rounding.
    pub(crate) fn hermitize(mat: DMatrix<C64>) -> Self {
        let adj = mat.adjoint();
        Self { mat: (mat + adj).scale(0.5) }
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: DMatrix::identity(d, d) }
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: DMatrix::zeros(d, d) }
    }

    pub fn diag(values: &[f64]) -> Self {
        let d = values.len();
        Self { mat: DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) }) }
    }

    /// Rank-one projector `|v⟩⟨v|` (v is used as given, not normalized).
    pub fn projector(v: &Ket) -> Self {
        Self::hermitize(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: self.mat.map(|z| z * s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { mat: &self.mat - &other.mat }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        Self { mat: &self.mat + other.mat.map(|z| z * s) }
    }

    /// `self + s·I`.
    pub fn shift(&self, s: f64) -> Self {
        let mut mat = self.mat.clone();
        for i in 0..mat.nrows() {
            mat[(i, i)] += C64::new(s, 0.0);
        }
        Self { mat }
    }

    /// Expectation `⟨v|H|v⟩` (real for Hermitian H).
    pub fn expectation(&self, v: &Ket) -> f64 {
        (v.adjoint() * &self.mat * v)[(0, 0)].re
    }

    /// Frobenius distance `‖self − other‖₂`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.mat.iter().zip(other.mat.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_entry_deviation(&self, other: &Self) -> f64 {
        self.mat.iter().zip(other.mat.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Sorted (descending) eigenvalues with eigenvectors as matrix columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, DMatrix<C64>)> {
        let se = SymmetricEigen::try_new(self.mat.clone(), f64::EPSILON, EIG_MAX_SWEEPS)
            .ok_or(IwitError::ConvergenceFailure)?;
        let d = self.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
        let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(d, d, |r, c| se.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("nonempty operator"))
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Uniform operator norm: the largest absolute eigenvalue.
    pub fn operator_norm(&self) -> Result<f64> {
        let ev = self.eigenvalues()?;
        Ok(ev[0].abs().max(ev[ev.len() - 1].abs()))
    }

    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|v| v.abs() > tol).count())
    }

    /// `f(H) = Σ f(λᵢ)|vᵢ⟩⟨vᵢ|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (values, vectors) = self.eigh()?;
        let d = self.dim();
        let mut mat = DMatrix::<C64>::zeros(d, d);
        for (i, &l) in values.iter().enumerate() {
            let v = vectors.column(i);
            let fl = f(l);
            mat += (v * v.adjoint()).map(|z| z * fl);
        }
        Ok(Self::hermitize(mat))
    }

    /// `U H U†` for a square `u` of matching size.
    pub fn conjugate(&self, u: &DMatrix<C64>) -> Self {
        Self::hermitize(u * &self.mat * u.adjoint())
    }
}

/// Eigenvalues (distinct, descending) with their eigenprojections.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<HermitianOperator>,
    pub multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    /// `Σ λᵢ Πᵢ`.
    pub fn reconstruct(&self) -> HermitianOperator {
        let d = self.projectors[0].dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(HermitianOperator::zeros(d), |acc, (l, p)| acc.add_scaled(p, *l))
    }
}

/// Spectral decomposition with eigenvalues within [`DEGENERACY_TOL`] merged.
pub fn eig(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let (values, vectors) = h.eigh()?;
    let d = h.dim();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..d {
        match groups.last_mut() {
            Some(g) if values[g[g.len() - 1]] - values[i] <= DEGENERACY_TOL => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut out = SpectralDecomposition { eigenvalues: vec![], projectors: vec![], multiplicities: vec![] };
    for g in groups {
        let mean = g.iter().map(|&i| values[i]).sum::<f64>() / g.len() as f64;
        let mut proj = DMatrix::<C64>::zeros(d, d);
        for &i in &g {
            let v = vectors.column(i);
            proj += v * v.adjoint();
        }
        out.eigenvalues.push(mean);
        out.projectors.push(HermitianOperator::hermitize(proj));
        out.multiplicities.push(g.len());
    }
    Ok(out)
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(h: &HermitianOperator, tol: f64) -> Result<bool> {
    Ok(h.min_eigenvalue()? >= -tol)
}

/// Frobenius-nearest positive semidefinite operator: clips negative eigenvalues.
pub fn project_psd(h: &HermitianOperator) -> Result<HermitianOperator> {
    let (values, vectors) = h.eigh()?;
    if values[values.len() - 1] >= 0.0 {
        return Ok(h.clone());
    }
    let d = h.dim();
    let mut mat = DMatrix::<C64>::zeros(d, d);
    for (i, &l) in values.iter().enumerate() {
        if l > 0.0 {
            let v = vectors.column(i);
            mat += (v * v.adjoint()).map(|z| z * l);
        }
    }
    Ok(HermitianOperator::hermitize(mat))
}

/// The real trace pairing `Re tr[AB]`.
pub fn trace_pair(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(IwitError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    // tr[AB] = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij) for Hermitian B
    Ok(a.mat.iter().zip(b.mat.iter()).map(|(x, y)| (x * y.conj()).re).sum())
}

/// Computational basis ket `|i⟩` in dimension `d`.
pub fn basis_ket(d: usize, i: usize) -> Ket {
    let mut v = Ket::zeros(d);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Max deviation of the Gram matrix of `kets` from the identity.
pub fn orthonormality_deviation(kets: &[Ket]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate() {
            let ip = a.dotc(b);
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((ip - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> HermitianOperator {
        make_hermitian(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap()
    }

    fn plus() -> Ket {
        let s = 1.0 / 2f64.sqrt();
        Ket::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)])
    }

    #[test]
    fn make_hermitian_identity() {
        let op = make_hermitian(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap();
        assert_eq!(op, HermitianOperator::identity(2));
    }

    #[test]
    fn pauli_x_spectrum() {
        let ev = pauli_x().eigenvalues().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_is_hermitian() {
        let y = make_hermitian(&[vec![0.0; 2], vec![0.0; 2]], &[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let m = y.matrix();
        assert_eq!(m, &m.adjoint());
        assert_eq!(m[(0, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn rejects_non_hermitian_and_ragged() {
        let err = make_hermitian(&[vec![0.0, 1.0], vec![0.5, 0.0]], &[vec![0.0; 2], vec![0.0; 2]]);
        assert!(matches!(err, Err(IwitError::NotHermitian { .. })));
        let err = make_hermitian(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[vec![0.0; 2]]);
        assert!(matches!(err, Err(IwitError::DimensionMismatch { .. })));
        let err = make_hermitian(&[vec![0.0, 1.0], vec![1.0]], &[vec![0.0; 2], vec![0.0; 2]]);
        assert!(matches!(err, Err(IwitError::DimensionMismatch { .. })));
    }

    #[test]
    fn eig_identity_is_one_block() {
        let sd = eig(&HermitianOperator::identity(3)).unwrap();
        assert_eq!(sd.eigenvalues.len(), 1);
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert_eq!(sd.multiplicities, vec![3]);
    }

    #[test]
    fn eig_diagonal() {
        let sd = eig(&HermitianOperator::diag(&[1.0, 2.0])).unwrap();
        assert!((sd.eigenvalues[0] - 2.0).abs() < 1e-14 && (sd.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(sd.projectors[0].distance(&HermitianOperator::diag(&[0.0, 1.0])) < 1e-12);
        assert!(sd.projectors[1].distance(&HermitianOperator::diag(&[1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn eig_zero_plus_plus() {
        // char. polynomial of [[1.5, .5], [.5, .5]]: λ² − 2λ + 0.5 = 0
        let h = HermitianOperator::projector(&basis_ket(2, 0)).add(&HermitianOperator::projector(&plus()));
        let sd = eig(&h).unwrap();
        let disc = (4.0f64 - 2.0).sqrt();
        assert!((sd.eigenvalues[0] - (2.0 + disc) / 2.0).abs() < 1e-12);
        assert!((sd.eigenvalues[1] - (2.0 - disc) / 2.0).abs() < 1e-12);
        assert!((sd.eigenvalues[0] - 1.7071068).abs() < 1e-7);
        assert!(sd.reconstruct().distance(&h) < SPECTRAL_TOL);
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&HermitianOperator::identity(4), 0.0).unwrap());
        assert!(!is_psd(&HermitianOperator::diag(&[1.0, -0.5]), 1e-9).unwrap());
        assert!(is_psd(&HermitianOperator::diag(&[1.0, -1e-12]), 1e-9).unwrap());
    }

    #[test]
    fn project_psd_clips() {
        let p = project_psd(&HermitianOperator::diag(&[2.0, -3.0])).unwrap();
        assert!(p.distance(&HermitianOperator::diag(&[2.0, 0.0])) < 1e-14);
        let q = HermitianOperator::diag(&[0.3, 0.0, 1.0]);
        assert_eq!(project_psd(&q).unwrap(), q);
    }

    #[test]
    fn trace_pair_examples() {
        assert!((trace_pair(&HermitianOperator::identity(3), &HermitianOperator::identity(3)).unwrap() - 3.0).abs() < 1e-15);
        let q0 = HermitianOperator::projector(&basis_ket(2, 0));
        let q1 = HermitianOperator::projector(&basis_ket(2, 1));
        assert_eq!(trace_pair(&q0, &q1).unwrap(), 0.0);
        let pp = HermitianOperator::projector(&plus());
        assert!((trace_pair(&q0, &pp).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_pair(&q0, &HermitianOperator::identity(3)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let y = make_hermitian(&[vec![1.0, 0.0], vec![0.0, 0.0]], &[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let s = serde_json::to_string(&y).unwrap();
        assert!(s.contains("\"dim\":2"));
        let back: HermitianOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, y);
        let bad = r#"{"dim":3,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<HermitianOperator>(bad).is_err());
    }
}
