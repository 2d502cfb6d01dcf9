//! Frozen reference values. SDP figures come from `data/oracle_gen.py`
//! (interior-point solver, accurate to roughly 1e-9); the rest are textbook
//! closed forms.

use iwit::compatibility::{joint_feasibility, scale_toward_uniform, Verdict, DEFAULT_MAX_ITER, DEFAULT_TOL};
use iwit::discrimination::{p_post_opt, p_prior_opt, pguess};
use iwit::ensemble::{mub_ensemble, validate_ensemble, NoiseVector, PartitionedEnsemble};
use iwit::mub::{fourier_mub, p_post_mub, p_prior_mub};
use iwit::operator::{HermitianOperator, Ket, C64};
use iwit::povm::{labels, validate_povm, MeasurementPair, POVM_TOL};

const SDP_TOL: f64 = 1e-6;

fn ket(v: &[C64]) -> Ket {
    let k = Ket::from_column_slice(v);
    let n = k.norm();
    k / C64::new(n, 0.0)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn proj(v: &[C64]) -> HermitianOperator {
    HermitianOperator::projector(&ket(v))
}

fn partitioned(xs: Vec<HermitianOperator>, ys: Vec<HermitianOperator>) -> PartitionedEnsemble {
    let (lx, ly) = (labels("x", xs.len()), labels("y", ys.len()));
    let all = lx.iter().chain(&ly).cloned().collect();
    let e = validate_ensemble(xs.into_iter().chain(ys).collect(), all).unwrap();
    PartitionedEnsemble::new(e, lx, ly).unwrap()
}

fn ensemble_a() -> PartitionedEnsemble {
    let i = C64::new(0.0, 1.0);
    partitioned(
        vec![proj(&[re(1.0), re(0.0)]).scale(0.3), proj(&[re(1.0), re(1.0)]).scale(0.2)],
        vec![
            proj(&[re(1.0), i]).scale(0.25),
            proj(&[re(0.0), re(1.0)]).scale(0.7).shift(0.15).scale(0.25),
        ],
    )
}

fn ensemble_b() -> PartitionedEnsemble {
    let i = C64::new(0.0, 1.0);
    partitioned(
        vec![
            proj(&[re(1.0), re(0.0), re(0.0)]).scale(0.2),
            proj(&[re(1.0), re(1.0), re(1.0)]).scale(0.15),
            proj(&[re(1.0), i, re(0.0)]).scale(0.15),
        ],
        vec![proj(&[re(0.0), re(1.0), re(-1.0)]).scale(0.3), HermitianOperator::identity(3).scale(0.2 / 3.0)],
    )
}

#[test]
fn helstrom_two_pure_states() {
    // P = ½(1 + √(1 − 4 p q |⟨a|b⟩|²)) for priors p, q
    let a = ket(&[re(1.0), re(0.0)]);
    let b = ket(&[re(0.6), C64::new(0.0, 0.8)]);
    let (p, q) = (0.35, 0.65);
    let e = validate_ensemble(
        vec![HermitianOperator::projector(&a).scale(p), HermitianOperator::projector(&b).scale(q)],
        vec!["a".into(), "b".into()],
    )
    .unwrap();
    let overlap = a.dotc(&b).norm_sqr();
    let want = 0.5 * (1.0 + (1.0 - 4.0 * p * q * overlap).sqrt());
    assert!((pguess(&e).unwrap().value - want).abs() < 1e-8);
}

#[test]
fn orthogonal_states_are_perfectly_distinguishable() {
    let e = validate_ensemble(
        (0..3).map(|i| HermitianOperator::projector(&iwit::operator::basis_ket(3, i)).scale(1.0 / 3.0)).collect(),
        labels("z", 3),
    )
    .unwrap();
    assert!((pguess(&e).unwrap().value - 1.0).abs() < 1e-10);
}

#[test]
fn sdp_reference_ensemble_qubit() {
    let pe = ensemble_a();
    assert!((p_prior_opt(&pe).unwrap().value - 0.832859508963).abs() < SDP_TOL);
    assert!((p_post_opt(&pe).unwrap().value - 0.786410980934).abs() < SDP_TOL);
}

#[test]
fn sdp_reference_ensemble_qutrit() {
    let pe = ensemble_b();
    assert!((p_prior_opt(&pe).unwrap().value - 0.823193717977).abs() < SDP_TOL);
    assert!((p_post_opt(&pe).unwrap().value - 0.799856210358).abs() < SDP_TOL);
}

#[test]
fn sdp_reference_mub_ensembles() {
    let cases = [
        (3, (0.4, 0.3), 0.566666666658, 0.494744307298),
        (4, (-0.2, 0.5), 0.462499998465, 0.443624948733),
        (3, (-0.3, -0.4), 0.449999999844, 0.449999999987),
        (5, (1.0, -0.25), 0.624999999999, 0.604315438068),
    ];
    for (d, (a, b), prior, post) in cases {
        let mu = NoiseVector::new(a, b);
        assert!((p_prior_mub(d, mu).unwrap() - prior).abs() < SDP_TOL, "closed prior d={d}");
        assert!((p_post_mub(d, mu).unwrap() - post).abs() < SDP_TOL, "closed post d={d}");
        let pe = mub_ensemble(mu, &fourier_mub(d)).unwrap();
        assert!((p_prior_opt(&pe).unwrap().value - prior).abs() < SDP_TOL, "solver prior d={d}");
        assert!((p_post_opt(&pe).unwrap().value - post).abs() < SDP_TOL, "solver post d={d}");
    }
}

fn robustness_sandwich(pair: &MeasurementPair, lambda_star: f64) {
    let inside = scale_toward_uniform(pair, lambda_star - 0.005).unwrap();
    let outside = scale_toward_uniform(pair, lambda_star + 0.005).unwrap();
    assert_eq!(joint_feasibility(&inside, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap().verdict, Verdict::Compatible);
    assert_eq!(joint_feasibility(&outside, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap().verdict, Verdict::Incompatible);
}

#[test]
fn qubit_observables_at_sixty_degrees() {
    // unsharp qubit observables at Bloch angle t: λ* = 1/(cos(t/2) + sin(t/2))
    let t = std::f64::consts::PI / 3.0;
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    let z = validate_povm(vec![proj(&[re(1.0), re(0.0)]), proj(&[re(0.0), re(1.0)])], labels("z", 2), POVM_TOL).unwrap();
    let n = validate_povm(vec![proj(&[re(c), re(s)]), proj(&[re(-s), re(c)])], labels("n", 2), POVM_TOL).unwrap();
    let lambda_star = 1.0 / (c + s);
    assert!((lambda_star - 0.732050807569).abs() < 1e-12);
    robustness_sandwich(&MeasurementPair::new(z, n).unwrap(), lambda_star);
}

#[test]
fn trine_against_sigma_x() {
    let trine = (0..3)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            proj(&[re(a.cos()), re(a.sin())]).scale(2.0 / 3.0)
        })
        .collect();
    let t = validate_povm(trine, labels("t", 3), POVM_TOL).unwrap();
    let x = validate_povm(vec![proj(&[re(1.0), re(1.0)]), proj(&[re(1.0), re(-1.0)])], labels("x", 2), POVM_TOL).unwrap();
    robustness_sandwich(&MeasurementPair::new(t, x).unwrap(), 0.806898221357);
}
