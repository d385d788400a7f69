//! File loading and shared text-format helpers.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use workbench_core::families::{self, ConstraintSystem};
use workbench_core::{pcr, sos, text, Monomial, Rat, RatPcrProof, RatSosCertificate, VariableSpace};

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Resolves a reference found in a proof/certificate header relative to the
/// referencing file's directory.
fn resolve_ref(base: &Path, reference: &str) -> PathBuf {
    let candidate = Path::new(reference);
    if candidate.is_absolute() {
        candidate.to_path_buf()
    } else {
        base.parent().unwrap_or_else(|| Path::new(".")).join(candidate)
    }
}

pub fn load_system(path: &Path) -> Result<ConstraintSystem<Rat>> {
    let text = read(path)?;
    families::parse_system::<Rat>(&text)
        .with_context(|| format!("parsing constraint system {}", path.display()))
}

pub fn load_pcr(path: &Path) -> Result<RatPcrProof> {
    let text = read(path)?;
    let system_ref = pcr::proof_system_ref(&text)?;
    let system = load_system(&resolve_ref(path, &system_ref))?;
    pcr::parse_proof::<Rat>(&text, system)
        .with_context(|| format!("parsing proof {}", path.display()))
}

pub fn load_sos(path: &Path) -> Result<RatSosCertificate> {
    let text = read(path)?;
    let header = sos::certificate_header(&text)?;
    let system = match &header.system {
        Some(reference) => {
            let system = load_system(&resolve_ref(path, reference))?;
            if system.space().n_pairs() != header.pairs {
                bail!(
                    "certificate declares {} pairs but its system has {}",
                    header.pairs,
                    system.space().n_pairs()
                );
            }
            system
        }
        None => ConstraintSystem::new(header.space()),
    };
    sos::parse_certificate::<Rat>(&text, system)
        .with_context(|| format!("parsing certificate {}", path.display()))
}

/// Monomial list file: optional `pairs:` / `grid:` headers (required when no
/// space is supplied), then one monomial per line.
pub fn parse_monomials(input: &str, space: Option<VariableSpace>) -> Result<(VariableSpace, Vec<Monomial>)> {
    let mut declared_pairs: Option<u32> = None;
    let mut declared_grid: Option<(u32, u32)> = None;
    let mut body: Vec<&str> = Vec::new();
    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("pairs:") {
            declared_pairs = Some(rest.trim().parse().context("malformed pairs header")?);
        } else if let Some(rest) = line.strip_prefix("grid:") {
            let nums: Vec<u32> = rest.split_whitespace().filter_map(|w| w.parse().ok()).collect();
            if nums.len() != 2 {
                bail!("malformed grid header `{rest}`");
            }
            declared_grid = Some((nums[0], nums[1]));
        } else {
            body.push(line);
        }
    }
    let space = match (space, declared_grid, declared_pairs) {
        (Some(s), _, _) => s,
        (None, Some((r, c)), _) => VariableSpace::grid(r, c),
        (None, None, Some(p)) => VariableSpace::new(p),
        (None, None, None) => bail!("monomial file needs a `pairs:` or `grid:` header"),
    };
    let mut monomials = Vec::new();
    for line in body {
        monomials.push(
            text::parse_monomial(line, &space).with_context(|| format!("parsing monomial `{line}`"))?,
        );
    }
    Ok((space, monomials))
}

/// Matrix file: first line the dimension, then row-major whitespace-separated
/// rationals.
pub fn parse_matrix(input: &str) -> Result<Vec<Vec<Rat>>> {
    let mut entries: Vec<Rat> = Vec::new();
    let mut dim: Option<usize> = None;
    for tok in input.split_whitespace() {
        match dim {
            None => dim = Some(tok.parse().context("malformed matrix dimension")?),
            Some(_) => entries.push(
                text::parse_scalar::<Rat>(tok).with_context(|| format!("matrix entry `{tok}`"))?,
            ),
        }
    }
    let n = dim.context("empty matrix file")?;
    if entries.len() != n * n {
        bail!("expected {} entries for a {n}x{n} matrix, found {}", n * n, entries.len());
    }
    let mut rows = Vec::with_capacity(n);
    for chunk in entries.chunks(n) {
        rows.push(chunk.to_vec());
    }
    Ok(rows)
}
