//! End-to-end dense coding sessions over an ideal channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bell_basis::{channel_state, check_dims, BellBasis};
use crate::dense_coding::{capacity_bits, decode_deterministic, decode_sampled_with, encode, MessageSymbol};
use crate::entanglement_transfer::run_transfer;
use crate::tensor_core::{StateVector, VALIDATION_TOL};
use crate::{Error, Result};

/// ChaCha stream used for sampled measurements; framing uses stream 0.
const MEASUREMENT_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    Deterministic,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub p: usize,
    pub q: usize,
    pub num_symbols: usize,
    pub seed: u64,
    pub decode_mode: DecodeMode,
    /// Start from a `q x q` pair and transfer it onto a `p`-level ancilla
    /// before every round.
    pub use_transfer: bool,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        check_dims(self.p, self.q)?;
        if self.num_symbols == 0 {
            return Err(Error::InvalidConfig("num_symbols must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSummary {
    pub bits_before: f64,
    pub bits_after: f64,
    /// Worst channel fidelity seen over all rounds.
    pub min_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub sent: Vec<MessageSymbol>,
    pub received: Vec<MessageSymbol>,
    pub error_count: usize,
    pub empirical_mutual_information: f64,
    pub theoretical_capacity: f64,
    pub per_symbol_bits: f64,
    pub transfer: Option<TransferSummary>,
}

/// `num_symbols` uniform draws from the `p * q` alphabet.
pub fn frame_messages(num_symbols: usize, p: usize, q: usize, seed: u64) -> Result<Vec<MessageSymbol>> {
    check_dims(p, q)?;
    if num_symbols == 0 {
        return Err(Error::InvalidConfig("num_symbols must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..num_symbols).map(|_| MessageSymbol::from_flat(rng.gen_range(0..p * q), q)).collect())
}

pub fn run_session(cfg: &SessionConfig) -> Result<SessionReport> {
    cfg.validate()?;
    let (p, q) = (cfg.p, cfg.q);
    let sent = frame_messages(cfg.num_symbols, p, q, cfg.seed)?;
    let basis = BellBasis::new(p, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(MEASUREMENT_STREAM);

    let mut min_fidelity = 1.0f64;
    let mut received = Vec::with_capacity(sent.len());
    for &msg in &sent {
        let channel = if cfg.use_transfer {
            let (ch, fidelity) = transferred_channel(q, p)?;
            min_fidelity = min_fidelity.min(fidelity);
            ch
        } else {
            channel_state(p, q)?
        };
        let state = encode(&channel, msg)?;
        let outcome = match cfg.decode_mode {
            DecodeMode::Deterministic => decode_deterministic(&state, &basis)?,
            DecodeMode::Sampled => decode_sampled_with(&state, &basis, &mut rng)?,
        };
        received.push(outcome.symbol);
    }

    let alphabet = p * q;
    let mut joint = vec![vec![0u64; alphabet]; alphabet];
    for (s, r) in sent.iter().zip(&received) {
        joint[s.flat_index(q)][r.flat_index(q)] += 1;
    }
    let error_count = sent.iter().zip(&received).filter(|(s, r)| s != r).count();

    Ok(SessionReport {
        error_count,
        empirical_mutual_information: mutual_information(&joint)?,
        theoretical_capacity: capacity_bits(p, q),
        per_symbol_bits: capacity_bits(p, q),
        transfer: cfg.use_transfer.then(|| TransferSummary {
            bits_before: capacity_bits(q, q),
            bits_after: capacity_bits(p, q),
            min_fidelity,
        }),
        sent,
        received,
    })
}

fn transferred_channel(q: usize, p: usize) -> Result<(StateVector, f64)> {
    let report = run_transfer(q, p)?;
    if report.channel23_fidelity < 1.0 - VALIDATION_TOL {
        return Err(Error::Verification(format!(
            "transferred channel fidelity {} below 1 - {VALIDATION_TOL:e}",
            report.channel23_fidelity
        )));
    }
    Ok((report.transferred_channel()?, report.channel23_fidelity))
}

/// Plug-in estimate of `I(X; Y)` in bits from a joint count table with rows
/// indexed by `X`. Zero cells contribute nothing.
pub fn mutual_information(joint_counts: &[Vec<u64>]) -> Result<f64> {
    let cols = joint_counts.first().map_or(0, Vec::len);
    if joint_counts.iter().any(|row| row.len() != cols) {
        return Err(Error::InvalidConfig("joint count rows have different lengths".into()));
    }
    let total: u64 = joint_counts.iter().flatten().sum();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let total = total as f64;
    let row_sums: Vec<f64> = joint_counts.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols).map(|c| joint_counts.iter().map(|r| r[c]).sum::<u64>() as f64).collect();

    let mut mi = 0.0;
    for (row, &rs) in joint_counts.iter().zip(&row_sums) {
        for (&count, &cs) in row.iter().zip(&col_sums) {
            if count > 0 {
                let c = count as f64;
                mi += c / total * (c * total / (rs * cs)).log2();
            }
        }
    }
    // Exact zero for product tables even when rounding gives -1e-17.
    Ok(mi.max(0.0))
}
