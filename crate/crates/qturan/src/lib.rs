//! q-exponential functions, their series remainders, and certified
//! Turan-type inequality verdicts.
//!
//! The building blocks, bottom up:
//!
//! - [`qcore`]: q-shifted factorials (a;q)_n and (a;q)_inf, the q-factorial
//!   (q;q)_n with a shared per-q prefix cache, and the [`QDomain`] /
//!   [`EvalResult`] plumbing.
//! - [`qexp`]: dual-route evaluation of e(q;z) = 1/(z;q)_inf and
//!   E(q;z) = (-z;q)_inf, series against product, with cross-checking and the
//!   Euler pairing e(q;z) E(q;-z) = 1.
//! - [`tails`]: the remainders I_n and J_n as direct, cancellation-free tail
//!   series, plus the index-shift recurrences.
//! - [`turan`]: Turan ratios, the sharp constants (1-q^{n+1})/(1-q^{n+2}) and
//!   (q-q^{n+2})/(1-q^{n+2}), closed-form determinant series, three-state
//!   certification verdicts, sharpness probes, and the q -> 1 classical
//!   limit.
//! - [`scan`]: (q, n, z) grid scans with deterministic CSV output and
//!   exit-code policy; [`exact`]: exact-rational oracle routes for tests.
//!
//! Every reported value carries a conservative absolute error bound, and a
//! verdict is `certified` only when its inequality margins exceed that
//! bound — a floating-point result then implies the real-number inequality
//! at that point.

mod dd;
mod error;
mod sums;

pub mod exact;
pub mod qcore;
pub mod qexp;
pub mod scan;
pub mod tails;
pub mod turan;

pub use error::{Error, Result};
pub use qcore::{qfact, qpoch, qpoch_inf, qpoch_multi, EvalResult, Method, QDomain};
pub use qexp::{eval_qexp, euler_pair_residual, EvalMethod, QExpKind};
pub use scan::{
    emit_csv, emit_sharpness, exit_code, parse_csv_str, read_csv, scan, scan_alzer, scan_serial,
    write_csv, AlzerSpec, GridSpec, ScanKind, ScanRecord, ScanSummary, CSV_HEADER,
};
pub use tails::{remainder, shift_remainder, RemainderKind, ShiftDirection};
pub use turan::{
    best_constant, classical_remainder, q_limit_check, sharpness_probe, turan_determinant_series,
    turan_ratio, verify_alzer, verify_turan, Outcome, SharpnessPoint, TuranVerdict,
};
