//! The growth experiment: generate both refutation kinds across a range of
//! sizes, verify, measure, and emit a CSV table.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use workbench_core::families::{generate_qn_pcr_refutation, generate_qn_sos_refutation};
use workbench_core::{pcr, sos, Rat};

use crate::{enforce_bit_cap, io};

pub const CSV_HEADER: &str =
    "n,system,degree,monomial_size,distinct_significant,height,max_coeff_bits,bit_complexity,verify_ok,wall_time_ms";

/// One measured (size, proof system) cell. Rows are only emitted for
/// verified objects.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExperimentRow {
    pub n: u32,
    pub system: String,
    pub degree: u64,
    pub monomial_size: u64,
    /// Only meaningful for the certificate rows.
    pub distinct_significant: Option<u64>,
    /// Only meaningful for the line-proof rows.
    pub height: Option<u64>,
    pub max_coeff_bits: u64,
    pub bit_complexity: u64,
    pub verify_ok: bool,
    pub wall_time_ms: u64,
}

impl ExperimentRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: &Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.system,
            self.degree,
            self.monomial_size,
            opt(&self.distinct_significant),
            opt(&self.height),
            self.max_coeff_bits,
            self.bit_complexity,
            self.verify_ok,
            self.wall_time_ms
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            bail!("expected 10 CSV fields, got {} in `{line}`", fields.len());
        }
        let num = |s: &str| -> Result<u64> { s.parse().with_context(|| format!("field `{s}`")) };
        let opt = |s: &str| -> Result<Option<u64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        Ok(ExperimentRow {
            n: fields[0].parse().with_context(|| format!("field `{}`", fields[0]))?,
            system: fields[1].to_string(),
            degree: num(fields[2])?,
            monomial_size: num(fields[3])?,
            distinct_significant: opt(fields[4])?,
            height: opt(fields[5])?,
            max_coeff_bits: num(fields[6])?,
            bit_complexity: num(fields[7])?,
            verify_ok: fields[8].parse().with_context(|| format!("field `{}`", fields[8]))?,
            wall_time_ms: num(fields[9])?,
        })
    }
}

pub fn read_rows(path: &Path) -> Result<Vec<ExperimentRow>> {
    let text = io::read(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => bail!("unexpected CSV header {other:?}"),
    }
    lines.map(ExperimentRow::from_csv).collect()
}

/// Generates, verifies and measures both refutations for every `n` up to
/// `n_max`, asserting on the way that the top coefficient is exactly the
/// expected `2^n + 1` bits and that encoded sizes keep growing. Verification
/// failure aborts the run with the verifier's diagnostic.
///
/// Sizes above 4 produce coefficients in the billions of bits and must be
/// requested explicitly.
pub fn run_growth_experiment(n_max: u32, out: &Path, allow_large: bool) -> Result<Vec<ExperimentRow>> {
    if n_max < 1 {
        bail!("experiment needs n-max >= 1");
    }
    if n_max > 4 && !allow_large {
        bail!("n-max {n_max} exceeds the desk-scale default of 4; pass --allow-large to override");
    }

    let mut rows: Vec<ExperimentRow> = Vec::new();
    for n in 1..=n_max {
        let expected_bits = (1u64 << n) + 1;

        let start = Instant::now();
        let proof = generate_qn_pcr_refutation::<Rat>(n);
        let metrics = match pcr::pcr_metrics(&proof) {
            Ok(m) => m,
            Err(failure) => bail!("line proof for n={n} failed verification: {failure}"),
        };
        let bits = pcr::max_component_bits(&proof);
        enforce_bit_cap(bits)?;
        if bits != expected_bits {
            bail!("line proof for n={n}: top coefficient has {bits} bits, expected {expected_bits}");
        }
        rows.push(ExperimentRow {
            n,
            system: "pcr".into(),
            degree: metrics.degree,
            monomial_size: metrics.monomial_size,
            distinct_significant: None,
            height: Some(metrics.height),
            max_coeff_bits: bits,
            bit_complexity: metrics.bit_complexity,
            verify_ok: true,
            wall_time_ms: start.elapsed().as_millis() as u64,
        });

        let start = Instant::now();
        let cert = generate_qn_sos_refutation::<Rat>(n);
        let metrics = match sos::sos_metrics(&cert) {
            Ok(m) => m,
            Err(failure) => bail!("certificate for n={n} failed verification: {failure}"),
        };
        let bits = sos::max_component_bits(&cert);
        enforce_bit_cap(bits)?;
        if bits != expected_bits {
            bail!("certificate for n={n}: top coefficient has {bits} bits, expected {expected_bits}");
        }
        rows.push(ExperimentRow {
            n,
            system: "sos".into(),
            degree: metrics.degree,
            monomial_size: metrics.monomial_size,
            distinct_significant: Some(metrics.distinct_significant_monomials),
            height: None,
            max_coeff_bits: bits,
            bit_complexity: metrics.bit_complexity,
            verify_ok: true,
            wall_time_ms: start.elapsed().as_millis() as u64,
        });
    }

    for kind in ["pcr", "sos"] {
        let sizes: Vec<u64> = rows
            .iter()
            .filter(|r| r.system == kind)
            .map(|r| r.bit_complexity)
            .collect();
        if sizes.windows(2).any(|w| w[1] <= w[0]) {
            bail!("{kind} encoded sizes are not strictly increasing: {sizes:?}");
        }
    }

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    io::write(out, &csv)?;
    Ok(rows)
}
