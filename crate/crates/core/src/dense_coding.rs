//! Encoding unitaries, the encode/measure/decode round, and capacity.
//!
//! `U_mn` sends `|j> -> exp(2 pi i j n / q) |(j + m) mod p>` for `j < q`.
//! Columns `q <= j < p` are not determined by the channel, so they are filled
//! with the phase-free shift `|j> -> |(j + m) mod p>`, which makes `U_mn` a
//! unitary (a shift times a diagonal phase) for every `p >= q`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bell_basis::{check_dims, root_of_unity, BellBasis};
use crate::tensor_core::{ComplexMatrix, StateVector, UnitaryOperator};
use crate::{Complex64, Error, Result};

/// Probabilities below this are treated as exact zeros before sampling.
pub const PROBABILITY_FLOOR: f64 = 1e-15;

/// Probabilities within this of the maximum count as ties for
/// deterministic decoding.
pub const TIE_TOL: f64 = 1e-12;

/// Classical message `(m, n)` with `m < p`, `n < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MessageSymbol {
    pub m: usize,
    pub n: usize,
}

impl MessageSymbol {
    pub fn new(m: usize, n: usize, p: usize, q: usize) -> Result<Self> {
        check_dims(p, q)?;
        if m >= p || n >= q {
            return Err(Error::SymbolOutOfRange { m, n, p, q });
        }
        Ok(Self { m, n })
    }

    pub fn from_flat(k: usize, q: usize) -> Self {
        Self { m: k / q, n: k % q }
    }

    pub fn flat_index(&self, q: usize) -> usize {
        self.m * q + self.n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub symbol: MessageSymbol,
    pub probability: f64,
    /// Outcome probabilities indexed by `m * q + n`.
    pub distribution: Vec<f64>,
}

pub fn encoding_unitary(p: usize, q: usize, m: usize, n: usize) -> Result<UnitaryOperator> {
    MessageSymbol::new(m, n, p, q)?;
    let mut u = ComplexMatrix::zeros(p);
    for j in 0..p {
        let phase = if j < q { root_of_unity(j * n, q) } else { Complex64::new(1.0, 0.0) };
        u.set((j + m) % p, j, phase);
    }
    UnitaryOperator::new(u)
}

/// Applies `U_mn` to the sender's particle (subsystem 0) of a `[p, q]` channel.
pub fn encode(channel: &StateVector, msg: MessageSymbol) -> Result<StateVector> {
    let (p, q) = pair_dims(channel)?;
    let u = encoding_unitary(p, q, msg.m, msg.n)?;
    channel.apply_on(&u, &[0])
}

/// Projective measurement in the Bell basis; reports the most likely symbol,
/// lowest flat index first among ties.
pub fn decode_deterministic(state: &StateVector, basis: &BellBasis) -> Result<MeasurementOutcome> {
    let distribution = outcome_distribution(state, basis)?;
    let max = distribution.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let k = distribution.iter().position(|&x| x >= max - TIE_TOL).unwrap_or(0);
    Ok(outcome(k, basis.q(), distribution))
}

/// Projective measurement in the Bell basis with the outcome drawn from a
/// ChaCha8 stream seeded by `seed`.
pub fn decode_sampled(state: &StateVector, basis: &BellBasis, seed: u64) -> Result<MeasurementOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    decode_sampled_with(state, basis, &mut rng)
}

pub(crate) fn decode_sampled_with(
    state: &StateVector,
    basis: &BellBasis,
    rng: &mut ChaCha8Rng,
) -> Result<MeasurementOutcome> {
    let mut distribution = outcome_distribution(state, basis)?;
    for x in distribution.iter_mut() {
        if *x < PROBABILITY_FLOOR {
            *x = 0.0;
        }
    }
    let sampler = WeightedIndex::new(&distribution).map_err(|_| Error::ZeroVector)?;
    let k = sampler.sample(rng);
    Ok(outcome(k, basis.q(), distribution))
}

/// `log2(p q)` bits per transmitted particle.
pub fn capacity_bits(p: usize, q: usize) -> f64 {
    ((p * q) as f64).log2()
}

fn outcome_distribution(state: &StateVector, basis: &BellBasis) -> Result<Vec<f64>> {
    if state.layout().dims() != [basis.p(), basis.q()] {
        return Err(Error::LayoutMismatch { left: state.layout().dims().to_vec(), right: vec![basis.p(), basis.q()] });
    }
    basis.states().iter().map(|b| b.fidelity(state)).collect()
}

fn outcome(k: usize, q: usize, distribution: Vec<f64>) -> MeasurementOutcome {
    MeasurementOutcome { symbol: MessageSymbol::from_flat(k, q), probability: distribution[k], distribution }
}

fn pair_dims(state: &StateVector) -> Result<(usize, usize)> {
    match *state.layout().dims() {
        [p, q] => {
            check_dims(p, q)?;
            Ok((p, q))
        }
        ref dims => Err(Error::LayoutMismatch { left: dims.to_vec(), right: vec![0, 0] }),
    }
}
