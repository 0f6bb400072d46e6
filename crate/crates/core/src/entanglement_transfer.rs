//! Moving a symmetric `q x q` pair onto a `p`-level ancilla.
//!
//! Particles are ordered `[1, 2, 3]` with dims `[q, q, p]`. Particles 1 and 3
//! are the sender's; particle 2 is the receiver's. Both transfer unitaries act
//! on the joint `(1, 3)` space with particle 1 as the most significant digit,
//! so ket `|a b>_13` has index `a * p + b`.

use serde::{Deserialize, Serialize};

use crate::bell_basis::{channel_state, check_dims};
use crate::dense_coding::capacity_bits;
use crate::tensor_core::{ComplexMatrix, StateVector, SubsystemLayout, UnitaryOperator};
use crate::{Complex64, Error, Result};

/// Subsystems the transfer unitaries act on.
pub const SENDER_PAIR: [usize; 2] = [0, 2];

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub q: usize,
    pub p: usize,
    pub initial_state: StateVector,
    pub final_state: StateVector,
    pub particle1_purity: f64,
    pub channel23_fidelity: f64,
    /// Eigenvalues of particle 2's reduced state after the transfer, descending.
    pub particle2_spectrum: Vec<f64>,
    pub capacity_before: f64,
    pub capacity_after: f64,
}

impl TransferReport {
    pub fn capacity_gain(&self) -> f64 {
        self.capacity_after - self.capacity_before
    }

    /// The transferred channel as a `[p, q]` state: sender particle 3 first,
    /// receiver particle 2 second, with particle 1 (left in `|0>`) dropped.
    pub fn transferred_channel(&self) -> Result<StateVector> {
        self.final_state.discard_basis_factor(0, 0)?.permute(&[1, 0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KetMap {
    pub from: (usize, usize),
    pub to: (usize, usize),
}

/// Builds a permutation operator from `|to><from|` terms, failing if any
/// basis ket is hit zero or several times as a source or a destination.
fn permutation_from_terms(
    operator: &'static str,
    q: usize,
    p: usize,
    terms: impl IntoIterator<Item = KetMap>,
) -> Result<UnitaryOperator> {
    let dim = q * p;
    let index = |(a, b): (usize, usize)| a * p + b;
    let mut sources = vec![0usize; dim];
    let mut targets = vec![0usize; dim];
    let mut u = ComplexMatrix::zeros(dim);
    for t in terms {
        let (from, to) = (index(t.from), index(t.to));
        sources[from] += 1;
        targets[to] += 1;
        u.set(to, from, Complex64::new(1.0, 0.0));
    }
    for counts in [&sources, &targets] {
        if let Some((index, &count)) = counts.iter().enumerate().find(|(_, &c)| c != 1) {
            return Err(Error::Coverage { operator, index, count });
        }
    }
    UnitaryOperator::new(u)
}

/// Terms of the first step: `|i0> -> |ii>`, `|jj> -> |j0>` for `j >= 1`, and
/// identity on `|mn>` with `n >= 1`, `m != n`.
pub fn first_step_terms(q: usize, p: usize) -> Vec<KetMap> {
    let mut terms: Vec<KetMap> = (0..q).map(|i| KetMap { from: (i, 0), to: (i, i) }).collect();
    terms.extend((1..q).map(|j| KetMap { from: (j, j), to: (j, 0) }));
    for m in 0..q {
        for n in (1..p).filter(|&n| n != m) {
            terms.push(KetMap { from: (m, n), to: (m, n) });
        }
    }
    terms
}

/// Terms of the second step: `|ii> -> |0i>`, `|0j> -> |jj>` for `j >= 1`, and
/// identity on `|0n>` for `n >= q` and on `|mn>` for `m >= 1`, `n != m`.
pub fn second_step_terms(q: usize, p: usize) -> Vec<KetMap> {
    let mut terms: Vec<KetMap> = (0..q).map(|i| KetMap { from: (i, i), to: (0, i) }).collect();
    terms.extend((1..q).map(|j| KetMap { from: (0, j), to: (j, j) }));
    terms.extend((q..p).map(|n| KetMap { from: (0, n), to: (0, n) }));
    for m in 1..q {
        for n in (0..p).filter(|&n| n != m) {
            terms.push(KetMap { from: (m, n), to: (m, n) });
        }
    }
    terms
}

/// The two sender-side unitaries on particles `(1, 3)`, first step first.
pub fn transfer_unitaries(q: usize, p: usize) -> Result<(UnitaryOperator, UnitaryOperator)> {
    check_dims(p, q)?;
    let first = permutation_from_terms("first transfer step", q, p, first_step_terms(q, p))?;
    let second = permutation_from_terms("second transfer step", q, p, second_step_terms(q, p))?;
    Ok((first, second))
}

/// Runs the transfer on `channel_state(q, q) ⊗ |0>_3` and checks the result
/// against `|0>_1 ⊗ channel_{23}`.
pub fn run_transfer(q: usize, p: usize) -> Result<TransferReport> {
    let (first, second) = transfer_unitaries(q, p)?;
    let ancilla = StateVector::basis(SubsystemLayout::new(vec![p])?, &[0])?;
    let initial_state = channel_state(q, q)?.tensor(&ancilla)?;
    let final_state = initial_state.apply_on(&first, &SENDER_PAIR)?.apply_on(&second, &SENDER_PAIR)?;

    let target = transfer_target(q, p)?;
    let channel23_fidelity = target.fidelity(&final_state)?.min(1.0);
    let particle1_purity = final_state.reduce(&[0])?.purity().min(1.0);
    let particle2_spectrum = final_state.reduce(&[1])?.eigenvalues().to_vec();

    Ok(TransferReport {
        q,
        p,
        initial_state,
        final_state,
        particle1_purity,
        channel23_fidelity,
        particle2_spectrum,
        capacity_before: capacity_bits(q, q),
        capacity_after: capacity_bits(p, q),
    })
}

/// `|0>_1 ⊗ (sum_k |k>_2 |k>_3) / sqrt(q)` over layout `[q, q, p]`.
pub fn transfer_target(q: usize, p: usize) -> Result<StateVector> {
    check_dims(p, q)?;
    let layout = SubsystemLayout::new(vec![q, q, p])?;
    let scale = (1.0 / q as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.size()];
    for k in 0..q {
        amps[layout.encode(&[0, k, k])] = Complex64::new(scale, 0.0);
    }
    StateVector::new(layout, amps)
}

/// `log2(p q) - log2(q^2)`.
pub fn capacity_gain(q: usize, p: usize) -> f64 {
    capacity_bits(p, q) - capacity_bits(q, q)
}
