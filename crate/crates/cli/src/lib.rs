//! Batch front end: generation, verification, metrics, functional checks and
//! the growth experiment, glued together over the text file formats.

pub mod commands;
pub mod experiment;
pub mod io;

pub use commands::dispatch;

/// Hard safety cap (in bits) on any single coefficient component, settable
/// via the `WORKBENCH_MAX_BITS` environment variable.
pub fn max_bits_cap() -> u64 {
    std::env::var("WORKBENCH_MAX_BITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1 << 24)
}

/// Raised when a generated or loaded object holds a coefficient whose
/// numerator or denominator exceeds the safety cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitCapExceeded {
    pub bits: u64,
    pub cap: u64,
}

impl std::fmt::Display for BitCapExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "coefficient component of {} bits exceeds the WORKBENCH_MAX_BITS cap of {} bits",
            self.bits, self.cap
        )
    }
}

impl std::error::Error for BitCapExceeded {}

pub fn enforce_bit_cap(bits: u64) -> Result<(), BitCapExceeded> {
    let cap = max_bits_cap();
    if bits > cap {
        Err(BitCapExceeded { bits, cap })
    } else {
        Ok(())
    }
}
