//! Numerical joint measurability: search for `M ⪰ 0` on `X × Y` whose margins
//! are a given pair, by Dykstra alternating projections between the PSD cone
//! and the affine set of families with the prescribed margins.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{IwitError, Result};
use crate::operator::{project_psd, HermitianOperator, C64};
use crate::povm::{margins_with_tol, MeasurementPair, Povm, POVM_TOL};

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 50_000;
/// Trailing window over which a stalled residual counts as infeasibility.
pub const PLATEAU_WINDOW: usize = 500;
/// Relative residual decrease over the window below which it has stalled.
const PLATEAU_REL_CHANGE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Compatible,
    Incompatible,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub verdict: Verdict,
    /// Joint measurement, present iff the verdict is `Compatible`.
    pub certificate: Option<Povm>,
    /// Final Frobenius distance between the PSD and affine iterates.
    pub residual: f64,
    pub iterations: usize,
}

struct Problem {
    d: usize,
    a: Vec<DMatrix<C64>>,
    b: Vec<DMatrix<C64>>,
}

impl Problem {
    fn nx(&self) -> usize {
        self.a.len()
    }

    fn ny(&self) -> usize {
        self.b.len()
    }

    /// Orthogonal projection onto `{M : Σ_y M(x,y) = A(x), Σ_x M(x,y) = B(y)}`.
    fn affine(&self, m: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
        let (nx, ny, d) = (self.nx(), self.ny(), self.d);
        let mut rows = self.a.clone();
        let mut cols = self.b.clone();
        let mut total = DMatrix::<C64>::identity(d, d);
        for x in 0..nx {
            for y in 0..ny {
                let e = &m[x * ny + y];
                rows[x] -= e;
                cols[y] -= e;
                total -= e;
            }
        }
        let (fx, fy, fxy) = (1.0 / ny as f64, 1.0 / nx as f64, 1.0 / (nx * ny) as f64);
        let mut out = Vec::with_capacity(nx * ny);
        for x in 0..nx {
            for y in 0..ny {
                let mut e = m[x * ny + y].clone();
                e += rows[x].scale(fx);
                e += cols[y].scale(fy);
                e -= total.scale(fxy);
                out.push(e);
            }
        }
        out
    }
}

fn psd(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    Ok(project_psd(&HermitianOperator::hermitize(m.clone()))?.matrix().clone())
}

fn dist2(p: &[DMatrix<C64>], q: &[DMatrix<C64>]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).norm_squared()).sum()
}

/// Decides whether `pair` has a joint measurement.
///
/// `Compatible` carries a certificate that is re-validated independently of
/// the solver: PSD effects summing to `I` with margins equal to the pair, all
/// within `tol`. `Incompatible` means the residual stalled above `10·tol` for
/// [`PLATEAU_WINDOW`] iterations. Anything else is `Undetermined`.
pub fn joint_feasibility(pair: &MeasurementPair, tol: f64, max_iter: usize) -> Result<CompatibilityReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(IwitError::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let d = pair.dim();
    let prob = Problem {
        d,
        a: pair.a().effects().iter().map(|e| e.matrix().clone()).collect(),
        b: pair.b().effects().iter().map(|e| e.matrix().clone()).collect(),
    };
    let n = prob.nx() * prob.ny();
    let sqrt_n = (n as f64).sqrt();

    // symmetrized products (A(x)B(y) + B(y)A(x))/2 already sum to I
    let mut x: Vec<DMatrix<C64>> = Vec::with_capacity(n);
    for a in &prob.a {
        for b in &prob.b {
            x.push((a * b + b * a).scale(0.5));
        }
    }
    let mut corr = vec![DMatrix::<C64>::zeros(d, d); n];
    let mut history: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;

    for k in 1..=max_iter {
        let q = prob.affine(&x);
        let mut p = Vec::with_capacity(n);
        for (qi, ci) in q.iter().zip(corr.iter_mut()) {
            let y = qi + &*ci;
            let pi = psd(&y)?;
            *ci = y - &pi;
            p.push(pi);
        }
        residual = dist2(&p, &q).sqrt();
        log::trace!("dykstra iter {k}: residual {residual:.3e}");

        if residual * sqrt_n < tol {
            if let Some(cert) = certificate(pair, &q, tol)? {
                log::debug!("compatible after {k} iterations, residual {residual:.3e}");
                return Ok(CompatibilityReport { verdict: Verdict::Compatible, certificate: Some(cert), residual, iterations: k });
            }
        }
        history.push(residual);
        if k > PLATEAU_WINDOW && residual > 10.0 * tol {
            let old = history[k - 1 - PLATEAU_WINDOW];
            if old - residual <= PLATEAU_REL_CHANGE * residual {
                log::debug!("residual plateau {residual:.3e} after {k} iterations");
                return Ok(CompatibilityReport { verdict: Verdict::Incompatible, certificate: None, residual, iterations: k });
            }
        }
        x = p;
    }
    log::debug!("no verdict within {max_iter} iterations, residual {residual:.3e}");
    Ok(CompatibilityReport { verdict: Verdict::Undetermined, certificate: None, residual, iterations: max_iter })
}

/// PSD part of the affine iterate, accepted only if it passes an independent
/// recheck as a joint measurement of `pair` within `tol`.
fn certificate(pair: &MeasurementPair, q: &[DMatrix<C64>], tol: f64) -> Result<Option<Povm>> {
    let tol = tol.max(POVM_TOL);
    let mut labels = Vec::with_capacity(q.len());
    for x in pair.a().outcomes() {
        for y in pair.b().outcomes() {
            labels.push((x.clone(), y.clone()));
        }
    }
    let effects = q.iter().map(psd).map(|m| m.map(HermitianOperator::hermitize)).collect::<Result<Vec<_>>>()?;
    let Ok(m) = Povm::product(labels, effects, tol) else { return Ok(None) };
    if certifies(&m, pair, tol)? {
        Ok(Some(m))
    } else {
        Ok(None)
    }
}

/// True iff `m` is a POVM within `tol` whose margins equal `pair` within `tol`.
pub fn certifies(m: &Povm, pair: &MeasurementPair, tol: f64) -> Result<bool> {
    let Ok(mm) = margins_with_tol(m, tol) else { return Ok(false) };
    if m.effects().iter().any(|e| e.min_eigenvalue().is_ok_and(|v| v < -tol)) {
        return Ok(false);
    }
    let close = |got: &Povm, want: &Povm| {
        got.len() == want.len() && want.iter().all(|(l, e)| got.effect(l).is_some_and(|g| g.distance(e) <= tol))
    };
    Ok(close(mm.a(), pair.a()) && close(mm.b(), pair.b()))
}

/// `(1−λ)(U_X, U_Y) + λ(A, B)` componentwise.
pub fn scale_toward_uniform(pair: &MeasurementPair, lambda: f64) -> Result<MeasurementPair> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(IwitError::LambdaOutOfRange(lambda));
    }
    let d = pair.dim();
    let mix = |p: &Povm| {
        let u = HermitianOperator::identity(d).scale((1.0 - lambda) / p.len() as f64);
        let effects = p.effects().iter().map(|e| e.scale(lambda).add(&u)).collect();
        crate::povm::validate_povm(effects, p.outcomes().to_vec(), POVM_TOL)
    };
    MeasurementPair::new(mix(pair.a())?, mix(pair.b())?)
}
