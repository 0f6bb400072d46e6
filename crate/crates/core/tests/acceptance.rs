//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails. Run with `--nocapture` to see the lines.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use qudit_densecode::bell_basis::{bell_state, channel_state, full_basis};
use qudit_densecode::dense_coding::{
    capacity_bits, decode_deterministic, decode_sampled, encode, encoding_unitary, MessageSymbol,
};
use qudit_densecode::entanglement_transfer::{capacity_gain, run_transfer, transfer_target, transfer_unitaries};
use qudit_densecode::protocol_runner::{run_session, DecodeMode, SessionConfig};
use qudit_densecode::tensor_core::{ComplexMatrix, StateVector, SubsystemLayout};
use qudit_densecode::Complex64;

type Check = Result<(), String>;
type Criterion = fn() -> Check;
type GoldenState = ((usize, usize), [([usize; 2], f64); 2]);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Check {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn real_matrix(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).unwrap()
}

/// The six sender operators of the 3 x 2 example, written out by hand.
fn golden_3x2_unitaries() -> Vec<((usize, usize), ComplexMatrix)> {
    vec![
        ((0, 0), real_matrix(&[&[1., 0., 0.], &[0., 1., 0.], &[0., 0., 1.]])),
        ((0, 1), real_matrix(&[&[1., 0., 0.], &[0., -1., 0.], &[0., 0., 1.]])),
        ((1, 0), real_matrix(&[&[0., 0., 1.], &[1., 0., 0.], &[0., 1., 0.]])),
        ((1, 1), real_matrix(&[&[0., 0., 1.], &[1., 0., 0.], &[0., -1., 0.]])),
        ((2, 0), real_matrix(&[&[0., 1., 0.], &[0., 0., 1.], &[1., 0., 0.]])),
        ((2, 1), real_matrix(&[&[0., -1., 0.], &[0., 0., 1.], &[1., 0., 0.]])),
    ]
}

/// The six encoded states of the 3 x 2 example as (ket, sign) pairs.
fn golden_3x2_states() -> Vec<GoldenState> {
    vec![
        ((0, 0), [([0, 0], 1.0), ([1, 1], 1.0)]),
        ((0, 1), [([0, 0], 1.0), ([1, 1], -1.0)]),
        ((1, 0), [([1, 0], 1.0), ([2, 1], 1.0)]),
        ((1, 1), [([1, 0], 1.0), ([2, 1], -1.0)]),
        ((2, 0), [([2, 0], 1.0), ([0, 1], 1.0)]),
        ((2, 1), [([2, 0], 1.0), ([0, 1], -1.0)]),
    ]
}

fn golden_fixtures_3x2() -> Check {
    let start = Instant::now();
    let channel = channel_state(3, 2).map_err(|e| e.to_string())?;
    for ((m, n), want) in golden_3x2_unitaries() {
        let u = encoding_unitary(3, 2, m, n).map_err(|e| e.to_string())?;
        ensure(u.matrix() == &want, || format!("U_{m}{n} = {:?}", u.matrix()))?;
    }
    let layout = SubsystemLayout::new(vec![3, 2]).unwrap();
    for ((m, n), terms) in golden_3x2_states() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 6];
        for (ket, sign) in terms {
            amps[layout.encode(&ket)] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
        }
        let encoded = encode(&channel, MessageSymbol { m, n }).map_err(|e| e.to_string())?;
        ensure(encoded.amplitudes() == amps.as_slice(), || format!("state ({m},{n}) = {:?}", encoded.amplitudes()))?;
        let direct = bell_state(3, 2, m, n).map_err(|e| e.to_string())?;
        ensure(direct.amplitudes() == amps.as_slice(), || format!("bell_state({m},{n}) differs"))?;
    }
    within(Duration::from_secs(1), start)
}

fn orthonormality_sweep() -> Check {
    let start = Instant::now();
    for p in 1..=6 {
        for q in 1..=p {
            let g = full_basis(p, q).map_err(|e| e.to_string())?.gram_matrix();
            let dev = g.max_abs_diff(&ComplexMatrix::identity(p * q));
            ensure(dev <= 1e-10, || format!("(p,q)=({p},{q}) Gram deviation {dev:e}"))?;
        }
    }
    within(Duration::from_secs(5), start)
}

fn round_trip_decoding() -> Check {
    let mut errors = 0;
    for p in 1..=6 {
        for q in 1..=p {
            let basis = full_basis(p, q).map_err(|e| e.to_string())?;
            let channel = channel_state(p, q).map_err(|e| e.to_string())?;
            for k in 0..p * q {
                let msg = MessageSymbol::from_flat(k, q);
                let out = decode_deterministic(&encode(&channel, msg).map_err(|e| e.to_string())?, &basis)
                    .map_err(|e| e.to_string())?;
                if out.symbol != msg || out.probability < 1.0 - 1e-10 {
                    errors += 1;
                }
            }
        }
    }
    ensure(errors == 0, || format!("{errors} decoding errors"))
}

fn capacity_claims() -> Check {
    let c = capacity_bits(3, 2);
    ensure((c - 6f64.log2()).abs() <= 1e-12, || format!("capacity(3,2) = {c}"))?;
    ensure(capacity_bits(2, 2) == 2.0, || format!("capacity(2,2) = {}", capacity_bits(2, 2)))?;
    for p in 1..=6 {
        let c = capacity_bits(p, p);
        ensure((c - 2.0 * (p as f64).log2()).abs() <= 1e-12, || format!("capacity({p},{p}) = {c}"))?;
    }
    Ok(())
}

fn transfer_fixtures() -> Check {
    let first_want = real_matrix(&[
        &[1., 0., 0., 0., 0., 0.],
        &[0., 1., 0., 0., 0., 0.],
        &[0., 0., 1., 0., 0., 0.],
        &[0., 0., 0., 0., 1., 0.],
        &[0., 0., 0., 1., 0., 0.],
        &[0., 0., 0., 0., 0., 1.],
    ]);
    let second_want = real_matrix(&[
        &[1., 0., 0., 0., 0., 0.],
        &[0., 0., 0., 0., 1., 0.],
        &[0., 0., 1., 0., 0., 0.],
        &[0., 0., 0., 1., 0., 0.],
        &[0., 1., 0., 0., 0., 0.],
        &[0., 0., 0., 0., 0., 1.],
    ]);
    let (first, second) = transfer_unitaries(2, 3).map_err(|e| e.to_string())?;
    ensure(first.matrix() == &first_want, || "first transfer step differs from fixture".into())?;
    ensure(second.matrix() == &second_want, || "second transfer step differs from fixture".into())?;

    let report = run_transfer(2, 3).map_err(|e| e.to_string())?;
    let layout = SubsystemLayout::new(vec![2, 2, 3]).unwrap();
    let mut amps = vec![Complex64::new(0.0, 0.0); 12];
    amps[layout.encode(&[0, 0, 0])] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[layout.encode(&[0, 1, 1])] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let want = StateVector::new(layout, amps).unwrap();
    let dev = report.final_state.max_abs_diff(&want).map_err(|e| e.to_string())?;
    ensure(dev <= 1e-10, || format!("final state deviation {dev:e}"))?;

    let gain = capacity_gain(2, 3);
    ensure((gain - (6f64.log2() - 2.0)).abs() <= 1e-12, || format!("gain {gain}"))?;
    ensure((report.capacity_gain() - (6f64.log2() - 2.0)).abs() <= 1e-12, || "report gain".into())
}

fn general_transfer() -> Check {
    for p in 1..=6 {
        for q in 1..=p {
            let r = run_transfer(q, p).map_err(|e| e.to_string())?;
            ensure((r.channel23_fidelity - 1.0).abs() <= 1e-10, || {
                format!("(q,p)=({q},{p}) fidelity {}", r.channel23_fidelity)
            })?;
            ensure((r.particle1_purity - 1.0).abs() <= 1e-10, || {
                format!("(q,p)=({q},{p}) purity {}", r.particle1_purity)
            })?;
            let target = transfer_target(q, p).unwrap();
            let dev = r.final_state.max_abs_diff(&target).unwrap();
            ensure(dev <= 1e-10, || format!("(q,p)=({q},{p}) final deviation {dev:e}"))?;
            let spectrum = &r.particle2_spectrum;
            ensure(spectrum.len() == q, || format!("(q,p)=({q},{p}) spectrum length {}", spectrum.len()))?;
            for &e in spectrum {
                ensure((e - 1.0 / q as f64).abs() <= 1e-10, || format!("(q,p)=({q},{p}) eigenvalue {e}"))?;
            }
        }
    }
    Ok(())
}

fn composed_pipeline() -> Check {
    let start = Instant::now();
    let cfg = SessionConfig {
        p: 3,
        q: 2,
        num_symbols: 600,
        seed: 20_240_611,
        decode_mode: DecodeMode::Deterministic,
        use_transfer: true,
    };
    let report = run_session(&cfg).map_err(|e| e.to_string())?;
    ensure(report.error_count == 0, || format!("{} errors", report.error_count))?;
    let gap = (report.empirical_mutual_information - 6f64.log2()).abs();
    ensure(gap <= 0.05, || format!("MI {} is {gap} bits from log2 6", report.empirical_mutual_information))?;
    let t = report.transfer.as_ref().ok_or("missing transfer summary")?;
    ensure(t.bits_before == 2.0 && (t.bits_after - 6f64.log2()).abs() <= 1e-12, || format!("{t:?}"))?;
    within(Duration::from_secs(5), start)
}

fn determinism() -> Check {
    for mode in [DecodeMode::Deterministic, DecodeMode::Sampled] {
        for use_transfer in [false, true] {
            let cfg = SessionConfig { p: 5, q: 3, num_symbols: 300, seed: 42, decode_mode: mode, use_transfer };
            let a = serde_json::to_vec(&run_session(&cfg).map_err(|e| e.to_string())?).unwrap();
            let b = serde_json::to_vec(&run_session(&cfg).map_err(|e| e.to_string())?).unwrap();
            ensure(a == b, || format!("{mode:?} transfer={use_transfer}: reports differ"))?;
        }
    }
    for p in 1..=6 {
        for q in 1..=p {
            let basis = full_basis(p, q).unwrap();
            let channel = channel_state(p, q).unwrap();
            for k in 0..p * q {
                let msg = MessageSymbol::from_flat(k, q);
                let s = encode(&channel, msg).unwrap();
                for seed in [0u64, 1, 42, u64::MAX] {
                    let got = decode_sampled(&s, &basis, seed).map_err(|e| e.to_string())?.symbol;
                    ensure(got == msg, || format!("({p},{q}) seed {seed}: sent {msg:?} got {got:?}"))?;
                }
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Criterion); 8] = [
        ("1 golden 3x2 unitaries and encoded states", golden_fixtures_3x2),
        ("2 Bell family orthonormality for q <= p <= 6", orthonormality_sweep),
        ("3 deterministic round-trip decoding for q <= p <= 6", round_trip_decoding),
        ("4 capacity claims", capacity_claims),
        ("5 transfer fixtures for q=2, p=3", transfer_fixtures),
        ("6 general transfer for q <= p <= 6", general_transfer),
        ("7 transfer-enabled 600-symbol session", composed_pipeline),
        ("8 determinism and point-mass sampling", determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS  criterion {name}"),
            Err(why) => {
                println!("FAIL  criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
