//! Incompatibility witnesses for pairs of quantum measurements, built from
//! minimum-error state discrimination with pre- and post-measurement
//! information.
//!
//! A partitioned state ensemble `E` on blocks `X ⊔ Y` yields two guessing
//! probabilities: `P_prior` (block announced before measuring) and `P_post`
//! (announced after). Whenever `P_post < P_prior`, the functional
//! `W(A,B) = P_post − Σ tr[E(x)A(x)] − Σ tr[E(y)B(y)]` is negative only on
//! incompatible pairs `(A, B)`.

pub mod cli;
pub mod compatibility;
pub mod discrimination;
pub mod ensemble;
pub mod error;
pub mod mub;
pub mod operator;
pub mod povm;
pub mod random;
pub mod witness;

pub use compatibility::{joint_feasibility, scale_toward_uniform, CompatibilityReport, Verdict};
pub use discrimination::{p_post_opt, p_prior_opt, p_prior_with, pguess, DiscriminationResult};
pub use ensemble::{auxiliary_ensemble, mub_ensemble, NoiseVector, PartitionedEnsemble, StateEnsemble};
pub use error::{IwitError, Result};
pub use mub::{fourier_mub, MubPair, SmearingVector};
pub use operator::{HermitianOperator, Ket, C64};
pub use povm::{margins, MeasurementPair, Povm};
pub use witness::{detection_equivalent, eval_witness, normalize_to_ensemble, witness_from_ensemble, Witness};
