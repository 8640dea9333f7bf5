//! Bell measurement on `A` and `C` of `ρ_AB ⊗ |ψ_C⟩⟨ψ_C|` and the resulting
//! states of the distant subsystem `B`.
//!
//! No correcting unitary is applied to `B`: the outcomes are the raw
//! post-measurement states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{
    bell_channel, classical_corr_channel, density_from_pure, BipartiteDensityMatrix, DensityMatrix,
    PureState, STATE_TOL,
};
use crate::tensor::{embed_op, kron, partial_trace, ComplexMatrix, Dims};

/// Outcomes with smaller probability report no post-measurement state.
pub const P_FLOOR: f64 = 1e-12;

/// Normalized input qubit `c₁|C₁⟩ + c₂|C₂⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputStateC {
    c1: Complex64,
    c2: Complex64,
}

impl InputStateC {
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        let norm_sqr = c1.norm_sqr() + c2.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(Error::State(format!(
                "input amplitudes have |c1|² + |c2|² = {norm_sqr}, expected 1"
            )));
        }
        Ok(Self { c1, c2 })
    }

    pub fn real(c1: f64, c2: f64) -> Result<Self> {
        Self::new(Complex64::new(c1, 0.0), Complex64::new(c2, 0.0))
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn c2(&self) -> Complex64 {
        self.c2
    }

    pub fn to_pure(&self) -> PureState {
        PureState::new(
            Dims::single(2).expect("static dims"),
            vec![self.c1, self.c2],
        )
        .expect("validated at construction")
    }
}

/// One Bell-measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportOutcome {
    /// 1-based, in the order of [`bell_basis`].
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state_b: Option<DensityMatrix>,
}

/// The four Bell states on `A⊗C`:
/// `(|A₁C₁⟩ ± |A₂C₂⟩)/√2` then `(|A₁C₂⟩ ± |A₂C₁⟩)/√2`.
pub fn bell_basis() -> [PureState; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(s, 0.0);
    let dims = Dims::bipartite(2, 2).expect("static dims");
    let make =
        |amps: [Complex64; 4]| PureState::new(dims.clone(), amps.to_vec()).expect("normalized");
    [
        make([p, z, z, p]),
        make([p, z, z, -p]),
        make([z, p, p, z]),
        make([z, p, -p, z]),
    ]
}

/// Runs the Bell measurement on `A` and `C` for the given two-qubit channel
/// on `A⊗B` and input state on `C`.
pub fn teleport(
    channel: &BipartiteDensityMatrix,
    input: &InputStateC,
) -> Result<Vec<TeleportOutcome>> {
    if channel.n() != 2 || channel.m() != 2 {
        return Err(Error::Dims(format!(
            "teleportation needs a 2x2 channel, got dims ({}, {})",
            channel.n(),
            channel.m()
        )));
    }
    let input = InputStateC::new(input.c1, input.c2)?;
    let dims = Dims::new(vec![2, 2, 2])?;
    let total = kron(channel.matrix(), &input.to_pure().projector());

    bell_basis()
        .iter()
        .enumerate()
        .map(|(k, bell)| {
            let proj = embed_op(&bell.projector(), &dims, &[0, 2])?;
            let collapsed = &(&proj * &total) * &proj;
            let probability = collapsed.trace().re;
            let post_state_b = if probability >= P_FLOOR {
                let b = partial_trace(&collapsed, &dims, &[1])?.scale_real(1.0 / probability);
                Some(DensityMatrix::single(b)?)
            } else {
                None
            };
            Ok(TeleportOutcome {
                outcome_index: k + 1,
                probability,
                post_state_b,
            })
        })
        .collect()
}

/// `|ρ₀₁| + |ρ₁₀|` of a single-qubit state.
pub fn coherence_info(rho_b: &DensityMatrix) -> Result<f64> {
    if rho_b.dim() != 2 {
        return Err(Error::Dims(format!(
            "coherence is defined for qubit states, got dimension {}",
            rho_b.dim()
        )));
    }
    let m = rho_b.matrix();
    Ok(m[(0, 1)].norm() + m[(1, 0)].norm())
}

/// `Σ_k p_k · coherence(ρ_{B,k})` over outcomes that carry a state.
pub fn aggregate_coherence(outcomes: &[TeleportOutcome]) -> Result<f64> {
    outcomes
        .iter()
        .try_fold(0.0, |acc, o| match &o.post_state_b {
            Some(rho) => Ok(acc + o.probability * coherence_info(rho)?),
            None => Ok(acc),
        })
}

/// Outcome tables for both named channels and their aggregate coherence.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelComparison {
    pub input: InputStateC,
    pub classical: Vec<TeleportOutcome>,
    pub bell: Vec<TeleportOutcome>,
    pub classical_coherence: f64,
    pub bell_coherence: f64,
}

/// Teleports `input` through the classically correlated channel and through
/// the Bell channel.
///
/// Fails with [`Error::Numerical`] if the classical aggregate coherence is not
/// zero or the Bell aggregate differs from `2|c₁c₂|` by more than `1e-10`.
pub fn channel_comparison(input: &InputStateC) -> Result<ChannelComparison> {
    let bell_rho = BipartiteDensityMatrix::from_density(density_from_pure(&bell_channel())?)?;
    let classical = teleport(&classical_corr_channel(), input)?;
    let bell = teleport(&bell_rho, input)?;
    let classical_coherence = aggregate_coherence(&classical)?;
    let bell_coherence = aggregate_coherence(&bell)?;

    let expected_bell = 2.0 * (input.c1 * input.c2).norm();
    if classical_coherence.abs() > 1e-10 || (bell_coherence - expected_bell).abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "coherence check failed: classical {classical_coherence:.3e}, bell {bell_coherence} (expected {expected_bell})"
        )));
    }
    Ok(ChannelComparison {
        input: *input,
        classical,
        bell,
        classical_coherence,
        bell_coherence,
    })
}

/// Bell-basis projector completeness residual `max |Σ_k |ψ_k⟩⟨ψ_k| − I|`.
pub fn bell_completeness_residual() -> f64 {
    let sum = bell_basis()
        .iter()
        .fold(ComplexMatrix::zeros(4), |acc, b| &acc + &b.projector());
    sum.max_abs_diff(&ComplexMatrix::identity(4))
}
