//! Command-line front end: argument types, output documents and rendering.
//!
//! Every command produces one [`OutputDocument`] on stdout, either as JSON
//! (`--format json`) or as plain text. Exit codes: 0 success, 2 invalid
//! arguments, 3 failed physics verification.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bell_basis::{channel_state, check_dims, BellBasis};
use crate::dense_coding::{decode_deterministic, encode, encoding_unitary, MeasurementOutcome, MessageSymbol};
use crate::entanglement_transfer::{run_transfer, transfer_unitaries};
use crate::protocol_runner::{run_session, DecodeMode, SessionConfig, SessionReport};
use crate::tensor_core::{ComplexMatrix, StateVector, VALIDATION_TOL};
use crate::{Complex64, Error};

pub const SCHEMA_VERSION: &str = "1";

/// Amplitudes below this modulus are left out of sparse listings.
pub const LISTING_CUTOFF: f64 = 1e-12;

/// Largest `p * q` accepted by `basis`.
pub const MAX_BASIS_SIZE: usize = 1000;

/// Largest `p * q` for which transfer matrices are emitted.
pub const MAX_EMITTED_MATRIX: usize = 36;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "densecode", version, about = "Dense coding over non-symmetric qudit channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the generalized Bell basis for a p x q pair.
    Basis(BasisArgs),
    /// Print the encoding unitary U_mn and the encoded state.
    Encode(EncodeArgs),
    /// Transfer a q x q pair onto a p-level ancilla and verify the result.
    Transfer(TransferArgs),
    /// Simulate a stream of dense-coded symbols.
    Session(SessionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Deterministic,
    Sampled,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: usize,
    /// Number of symbols to send.
    #[arg(long, visible_alias = "n", default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Deterministic)]
    pub mode: Mode,
    /// Build the p x q channel by entanglement transfer from a q x q pair.
    #[arg(long)]
    pub use_transfer: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

/// Complex number serialized as `[re, im]`, with `-0.0` folded to `0.0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amp(pub f64, pub f64);

impl From<Complex64> for Amp {
    fn from(z: Complex64) -> Self {
        Amp(clean(z.re), clean(z.im))
    }
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument<T> {
    pub schema_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub result: T,
}

impl<T> OutputDocument<T> {
    fn new(command: &str, parameters: Value, result: T) -> Self {
        let parameters = match parameters {
            Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        Self { schema_version: SCHEMA_VERSION.into(), command: command.into(), parameters, result }
    }
}

/// One nonzero entry of a state listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetAmplitude {
    pub ket: Vec<usize>,
    pub index: usize,
    pub amplitude: Amp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellEntry {
    pub m: usize,
    pub n: usize,
    pub index: usize,
    pub amplitudes: Vec<KetAmplitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisPayload {
    pub p: usize,
    pub q: usize,
    pub states: Vec<BellEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodePayload {
    pub p: usize,
    pub q: usize,
    pub symbol: MessageSymbol,
    pub unitary: Vec<Vec<Amp>>,
    pub encoded_state: Vec<KetAmplitude>,
    /// `<channel | encoded>`.
    pub channel_overlap: Amp,
    pub decoded: MeasurementOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferPayload {
    pub q: usize,
    pub p: usize,
    pub layout: Vec<usize>,
    pub initial_state: Vec<KetAmplitude>,
    pub final_state: Vec<KetAmplitude>,
    pub particle1_purity: f64,
    pub channel23_fidelity: f64,
    pub particle2_spectrum: Vec<f64>,
    pub capacity_before: f64,
    pub capacity_after: f64,
    pub capacity_gain: f64,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_step: Option<Vec<Vec<Amp>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_step: Option<Vec<Vec<Amp>>>,
}

/// What a command printed and how it should exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

impl Emission {
    fn invalid(err: Error) -> Self {
        Self { stdout: String::new(), stderr: format!("error: {err}\n"), exit_code: EXIT_INVALID }
    }
}

pub fn sparse_listing(state: &StateVector) -> Vec<KetAmplitude> {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() >= LISTING_CUTOFF)
        .map(|(index, &a)| KetAmplitude { ket: state.layout().decode(index), index, amplitude: a.into() })
        .collect()
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Amp>> {
    m.rows().map(|r| r.iter().map(|&z| z.into()).collect()).collect()
}

pub fn cmd_basis(p: usize, q: usize) -> Result<OutputDocument<BasisPayload>, Error> {
    check_dims(p, q)?;
    if p * q > MAX_BASIS_SIZE {
        return Err(Error::TooLarge { size: p * q, limit: MAX_BASIS_SIZE });
    }
    let basis = BellBasis::new(p, q)?;
    let states = basis
        .states()
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let (m, n) = basis.label(index);
            BellEntry { m, n, index, amplitudes: sparse_listing(s) }
        })
        .collect();
    Ok(OutputDocument::new("basis", json!({ "p": p, "q": q }), BasisPayload { p, q, states }))
}

pub fn cmd_encode(p: usize, q: usize, m: usize, n: usize) -> Result<OutputDocument<EncodePayload>, Error> {
    let symbol = MessageSymbol::new(m, n, p, q)?;
    let unitary = encoding_unitary(p, q, m, n)?;
    let channel = channel_state(p, q)?;
    let encoded = encode(&channel, symbol)?;
    let decoded = decode_deterministic(&encoded, &BellBasis::new(p, q)?)?;
    let payload = EncodePayload {
        p,
        q,
        symbol,
        unitary: matrix_rows(unitary.matrix()),
        encoded_state: sparse_listing(&encoded),
        channel_overlap: channel.inner(&encoded)?.into(),
        decoded,
    };
    Ok(OutputDocument::new("encode", json!({ "p": p, "q": q, "m": m, "n": n }), payload))
}

pub fn cmd_transfer(q: usize, p: usize) -> Result<OutputDocument<TransferPayload>, Error> {
    let report = run_transfer(q, p)?;
    let matrices = if p * q <= MAX_EMITTED_MATRIX {
        let (a, b) = transfer_unitaries(q, p)?;
        Some((matrix_rows(a.matrix()), matrix_rows(b.matrix())))
    } else {
        None
    };
    let (first_step, second_step) = matrices.unzip();
    let payload = TransferPayload {
        q,
        p,
        layout: report.final_state.layout().dims().to_vec(),
        initial_state: sparse_listing(&report.initial_state),
        final_state: sparse_listing(&report.final_state),
        particle1_purity: report.particle1_purity,
        channel23_fidelity: report.channel23_fidelity,
        particle2_spectrum: report.particle2_spectrum.iter().map(|&x| clean(x)).collect(),
        capacity_before: report.capacity_before,
        capacity_after: report.capacity_after,
        capacity_gain: clean(report.capacity_gain()),
        verified: report.channel23_fidelity >= 1.0 - VALIDATION_TOL,
        first_step,
        second_step,
    };
    Ok(OutputDocument::new("transfer", json!({ "q": q, "p": p }), payload))
}

pub fn cmd_session(cfg: &SessionConfig) -> Result<OutputDocument<SessionReport>, Error> {
    let report = run_session(cfg)?;
    let parameters = serde_json::to_value(cfg).expect("config serializes");
    Ok(OutputDocument::new("session", parameters, report))
}

/// Runs a parsed command and returns what to print.
pub fn execute(cli: &Cli) -> Emission {
    match &cli.command {
        Command::Basis(a) => finish(cmd_basis(a.p, a.q), a.format, |_| true, render_basis),
        Command::Encode(a) => finish(cmd_encode(a.p, a.q, a.m, a.n), a.format, |_| true, render_encode),
        Command::Transfer(a) => finish(cmd_transfer(a.q, a.p), a.format, |d| d.result.verified, render_transfer),
        Command::Session(a) => {
            let cfg = SessionConfig {
                p: a.p,
                q: a.q,
                num_symbols: a.count,
                seed: a.seed,
                decode_mode: match a.mode {
                    Mode::Deterministic => DecodeMode::Deterministic,
                    Mode::Sampled => DecodeMode::Sampled,
                },
                use_transfer: a.use_transfer,
            };
            let deterministic = cfg.decode_mode == DecodeMode::Deterministic;
            finish(cmd_session(&cfg), a.format, |d| !(deterministic && d.result.error_count > 0), render_session)
        }
    }
}

fn finish<T: Serialize>(
    doc: Result<OutputDocument<T>, Error>,
    format: Format,
    verified: impl Fn(&OutputDocument<T>) -> bool,
    render: impl Fn(&T, &mut String),
) -> Emission {
    let doc = match doc {
        Ok(doc) => doc,
        Err(Error::Verification(msg)) => {
            return Emission {
                stdout: String::new(),
                stderr: format!("verification failed: {msg}\n"),
                exit_code: EXIT_VERIFICATION,
            }
        }
        Err(e) => return Emission::invalid(e),
    };
    let ok = verified(&doc);
    let mut stdout = match format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("document serializes"),
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "schema_version: {}", doc.schema_version);
            let _ = writeln!(out, "command: {}", doc.command);
            let params: Vec<String> = doc.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "parameters: {}", params.join(" "));
            render(&doc.result, &mut out);
            out
        }
    };
    if !stdout.ends_with('\n') {
        stdout.push('\n');
    }
    let (stderr, exit_code) =
        if ok { (String::new(), EXIT_OK) } else { ("verification failed\n".to_string(), EXIT_VERIFICATION) };
    Emission { stdout, stderr, exit_code }
}

/// Real with 12 digits after the point, `-0` folded to `0`.
pub fn fmt_real(x: f64) -> String {
    let s = format!("{:.12}", clean(x));
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn fmt_amp(a: Amp) -> String {
    if a.1.abs() < LISTING_CUTOFF {
        format!("{:+}", ForceSign(a.0))
    } else if a.0.abs() < LISTING_CUTOFF {
        format!("{:+}i", ForceSign(a.1))
    } else {
        format!("({:+}{:+}i)", ForceSign(a.0), ForceSign(a.1))
    }
}

struct ForceSign(f64);

impl std::fmt::Display for ForceSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = fmt_real(self.0);
        if s.starts_with('-') {
            f.write_str(&s)
        } else {
            write!(f, "+{s}")
        }
    }
}

/// `|ab>` for single-digit levels, `|a,b>` otherwise.
pub fn fmt_ket(digits: &[usize]) -> String {
    let sep = if digits.iter().all(|&d| d < 10) { "" } else { "," };
    let body: Vec<String> = digits.iter().map(ToString::to_string).collect();
    format!("|{}⟩", body.join(sep))
}

fn fmt_listing(listing: &[KetAmplitude]) -> String {
    listing.iter().map(|k| format!("{} {}", fmt_amp(k.amplitude), fmt_ket(&k.ket))).collect::<Vec<_>>().join(" ")
}

fn fmt_matrix(rows: &[Vec<Amp>], out: &mut String) {
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&a| fmt_amp(a)).collect();
        let _ = writeln!(out, "  [{}]", cells.join(" "));
    }
}

fn render_basis(b: &BasisPayload, out: &mut String) {
    let _ = writeln!(out, "bell basis p={} q={} ({} states)", b.p, b.q, b.states.len());
    for s in &b.states {
        let _ = writeln!(out, "Psi_{},{} = {}", s.m, s.n, fmt_listing(&s.amplitudes));
    }
}

fn render_encode(e: &EncodePayload, out: &mut String) {
    let _ = writeln!(out, "U_{},{} (p={} q={}):", e.symbol.m, e.symbol.n, e.p, e.q);
    fmt_matrix(&e.unitary, out);
    let _ = writeln!(out, "encoded state = {}", fmt_listing(&e.encoded_state));
    let _ = writeln!(out, "overlap with channel = {}", fmt_amp(e.channel_overlap));
    let _ = writeln!(
        out,
        "decoded = ({}, {}) with probability {}",
        e.decoded.symbol.m,
        e.decoded.symbol.n,
        fmt_real(e.decoded.probability)
    );
}

fn render_transfer(t: &TransferPayload, out: &mut String) {
    let _ = writeln!(out, "transfer q={} p={} layout {:?}", t.q, t.p, t.layout);
    let _ = writeln!(out, "initial = {}", fmt_listing(&t.initial_state));
    if let (Some(a), Some(b)) = (&t.first_step, &t.second_step) {
        let _ = writeln!(out, "first step on particles (1,3):");
        fmt_matrix(a, out);
        let _ = writeln!(out, "second step on particles (1,3):");
        fmt_matrix(b, out);
    }
    let _ = writeln!(out, "final = {}", fmt_listing(&t.final_state));
    let _ = writeln!(out, "channel (2,3) fidelity = {}", fmt_real(t.channel23_fidelity));
    let _ = writeln!(out, "particle 1 purity = {}", fmt_real(t.particle1_purity));
    let spectrum: Vec<String> = t.particle2_spectrum.iter().map(|&x| fmt_real(x)).collect();
    let _ = writeln!(out, "particle 2 spectrum = [{}]", spectrum.join(", "));
    let _ = writeln!(
        out,
        "capacity {} -> {} bits (gain {})",
        fmt_real(t.capacity_before),
        fmt_real(t.capacity_after),
        fmt_real(t.capacity_gain)
    );
    let _ = writeln!(out, "verified = {}", t.verified);
}

fn render_session(s: &SessionReport, out: &mut String) {
    let _ = writeln!(out, "symbols = {}", s.sent.len());
    let _ = writeln!(out, "errors = {}", s.error_count);
    let _ = writeln!(out, "empirical mutual information = {} bits", fmt_real(s.empirical_mutual_information));
    let _ = writeln!(out, "theoretical capacity = {} bits", fmt_real(s.theoretical_capacity));
    let _ = writeln!(out, "per symbol = {} bits", fmt_real(s.per_symbol_bits));
    if let Some(t) = &s.transfer {
        let _ = writeln!(
            out,
            "transfer: {} -> {} bits (min fidelity {})",
            fmt_real(t.bits_before),
            fmt_real(t.bits_after),
            fmt_real(t.min_fidelity)
        );
    }
    let pairs = |v: &[MessageSymbol]| v.iter().map(|s| format!("({},{})", s.m, s.n)).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "sent = {}", pairs(&s.sent));
    let _ = writeln!(out, "received = {}", pairs(&s.received));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amp_folds_negative_zero() {
        let a: Amp = Complex64::new(-0.0, -0.0).into();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[0.0,0.0]");
        assert_eq!(fmt_real(-0.0), "0.000000000000");
        assert_eq!(fmt_real(-1e-15), "0.000000000000");
    }

    #[test]
    fn ket_and_amp_formatting() {
        assert_eq!(fmt_ket(&[2, 1]), "|21⟩");
        assert_eq!(fmt_ket(&[10, 3]), "|10,3⟩");
        assert_eq!(fmt_amp(Amp(-std::f64::consts::FRAC_1_SQRT_2, 0.0)), "-0.707106781187");
        assert_eq!(fmt_amp(Amp(0.0, 1.0)), "+1.000000000000i");
        assert_eq!(fmt_amp(Amp(0.5, -0.5)), "(+0.500000000000-0.500000000000i)");
    }

    #[test]
    fn basis_limits() {
        assert!(cmd_basis(2, 3).is_err());
        assert!(matches!(cmd_basis(40, 30), Err(Error::TooLarge { .. })));
        assert_eq!(cmd_basis(1, 1).unwrap().result.states.len(), 1);
    }

    #[test]
    fn transfer_matrices_only_for_small_systems() {
        assert!(cmd_transfer(2, 3).unwrap().result.first_step.is_some());
        assert!(cmd_transfer(6, 6).unwrap().result.first_step.is_some());
        assert!(cmd_transfer(3, 13).unwrap().result.first_step.is_none());
    }

    #[test]
    fn verification_errors_map_to_exit_3() {
        let e = finish::<()>(Err(Error::Verification("x".into())), Format::Json, |_| true, |_, _| {});
        assert_eq!(e.exit_code, EXIT_VERIFICATION);
        assert!(e.stdout.is_empty());
        let e = finish(cmd_basis(1, 1), Format::Json, |_| false, |_, _| {});
        assert_eq!(e.exit_code, EXIT_VERIFICATION);
        assert!(!e.stdout.is_empty());
        let e = finish(cmd_basis(1, 2), Format::Json, |_| true, |_, _| {});
        assert_eq!(e.exit_code, EXIT_INVALID);
    }
}
