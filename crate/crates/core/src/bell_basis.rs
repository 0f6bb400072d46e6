//! Shared channel state and the generalized Bell family for a `p x q` pair.
//!
//! `|Psi_mn> = sum_j exp(2 pi i j n / q) |(j + m) mod p> ⊗ |j> / sqrt(q)` for
//! `0 <= m < p`, `0 <= n < q`, `0 <= j < q`. States are kept exactly in
//! this phase convention (no re-phasing).

use num_complex::Complex64;

use crate::tensor_core::{ComplexMatrix, StateVector, SubsystemLayout};
use crate::{Error, Result};

/// Checks `1 <= q <= p`.
pub fn check_dims(p: usize, q: usize) -> Result<()> {
    if q == 0 || q > p {
        return Err(Error::InvalidDimensions { p, q });
    }
    Ok(())
}

/// `exp(2 pi i k / q)`, exact at multiples of a quarter turn.
pub fn root_of_unity(k: usize, q: usize) -> Complex64 {
    let k = k % q;
    if (4 * k).is_multiple_of(q) {
        return match 4 * k / q {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / q as f64)
}

/// The maximally entangled `(|00> + |11> + ... + |q-1 q-1>) / sqrt(q)` over `[p, q]`.
pub fn channel_state(p: usize, q: usize) -> Result<StateVector> {
    bell_state(p, q, 0, 0)
}

pub fn bell_state(p: usize, q: usize, m: usize, n: usize) -> Result<StateVector> {
    check_dims(p, q)?;
    if m >= p || n >= q {
        return Err(Error::SymbolOutOfRange { m, n, p, q });
    }
    let layout = SubsystemLayout::new(vec![p, q])?;
    let scale = (1.0 / q as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.size()];
    for j in 0..q {
        amps[layout.encode(&[(j + m) % p, j])] = root_of_unity(j * n, q) * scale;
    }
    StateVector::new(layout, amps)
}

/// All `p * q` Bell states, enumerated by `k = m * q + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellBasis {
    p: usize,
    q: usize,
    states: Vec<StateVector>,
}

impl BellBasis {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        check_dims(p, q)?;
        SubsystemLayout::new(vec![p, q])?;
        let states = (0..p * q).map(|k| bell_state(p, q, k / q, k % q)).collect::<Result<_>>()?;
        Ok(Self { p, q, states })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, m: usize, n: usize) -> &StateVector {
        &self.states[self.flat_index(m, n)]
    }

    pub fn flat_index(&self, m: usize, n: usize) -> usize {
        m * self.q + n
    }

    pub fn label(&self, k: usize) -> (usize, usize) {
        (k / self.q, k % self.q)
    }

    /// Entry `(k, l) = <states[k] | states[l]>`.
    pub fn gram_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.len(), |k, l| {
            self.states[k].inner(&self.states[l]).expect("basis states share a layout")
        })
    }
}

pub fn full_basis(p: usize, q: usize) -> Result<BellBasis> {
    BellBasis::new(p, q)
}

pub fn gram_matrix(basis: &BellBasis) -> ComplexMatrix {
    basis.gram_matrix()
}
