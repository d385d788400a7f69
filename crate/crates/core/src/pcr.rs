//! Line-based proofs: rational linear combinations and variable lifts.
//!
//! A proof is a sequence of polynomial lines, each carrying the rule that
//! produced it. The verifier re-derives every line from its premises and
//! demands exact polynomial identity -- never identity modulo the Boolean
//! ideal -- so a stored line is either exactly what its rule yields or the
//! proof is rejected.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::families::ConstraintSystem;
use crate::monomial::Monomial;
use crate::poly::{self, Degree, Polynomial};
use crate::scalar::{bitlen_u64, Scalar};
use crate::space::{VarId, VariableSpace};
use crate::text::{self, ParseError};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoolKind {
    /// `x^2 - x`
    Square,
    /// `x + ~x - 1`
    Twin,
}

/// How a line was derived. Premise indices are 1-based positions of earlier
/// lines.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Justification<T: Scalar> {
    Axiom { name: String },
    BooleanAxiom { pair: u32, kind: BoolKind },
    Lift { premise: usize, var: VarId },
    LinComb { j: usize, k: usize, a: T, b: T },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PcrLine<T: Scalar> {
    pub poly: Polynomial<T>,
    pub justification: Justification<T>,
}

/// A derivation of `target = 0` from a constraint system. A refutation is a
/// proof whose target is the constant 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PcrProof<T: Scalar> {
    pub system: ConstraintSystem<T>,
    pub lines: Vec<PcrLine<T>>,
    pub target: Polynomial<T>,
}

impl<T: Scalar> PcrProof<T> {
    pub fn space(&self) -> &VariableSpace {
        self.system.space()
    }

    pub fn is_refutation(&self) -> bool {
        self.target == Polynomial::one()
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PcrFailureReason {
    #[error("proof has no lines")]
    EmptyProof,
    #[error("axiom `{0}` is not in the constraint system")]
    UnknownAxiom(String),
    #[error("stored polynomial differs from axiom `{0}`")]
    AxiomMismatch(String),
    #[error("stored polynomial differs from the Boolean axiom for pair {0}")]
    BooleanAxiomMismatch(u32),
    #[error("pair {0} is outside the variable space")]
    PairOutOfRange(u32),
    #[error("premise index {0} does not refer to an earlier line")]
    PremiseOutOfRange(usize),
    #[error("stored polynomial is not the variable lift of its premise")]
    LiftMismatch,
    #[error("stored polynomial is not the stated linear combination")]
    LinCombMismatch,
    #[error("line uses variables outside the proof's space")]
    VariableOutsideSpace,
    #[error("last line does not equal the target polynomial")]
    TargetMismatch,
}

/// Verification failure at a specific line (1-based; 0 marks proof-level
/// failures such as an empty proof).
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct PcrFailure {
    pub line: usize,
    pub reason: PcrFailureReason,
}

fn fail(line: usize, reason: PcrFailureReason) -> PcrFailure {
    PcrFailure { line, reason }
}

/// Checks every line against its justification, exactly.
pub fn verify_pcr<T: Scalar>(proof: &PcrProof<T>) -> Result<(), PcrFailure> {
    if proof.lines.is_empty() {
        return Err(fail(0, PcrFailureReason::EmptyProof));
    }
    let space = proof.space();
    for (pos, line) in proof.lines.iter().enumerate() {
        let idx = pos + 1;
        if line.poly.max_pair().is_some_and(|p| p >= space.n_pairs()) {
            return Err(fail(idx, PcrFailureReason::VariableOutsideSpace));
        }
        let premise = |j: usize| -> Result<&Polynomial<T>, PcrFailure> {
            if j == 0 || j >= idx {
                Err(fail(idx, PcrFailureReason::PremiseOutOfRange(j)))
            } else {
                Ok(&proof.lines[j - 1].poly)
            }
        };
        match &line.justification {
            Justification::Axiom { name } => {
                let q = proof
                    .system
                    .get(name)
                    .ok_or_else(|| fail(idx, PcrFailureReason::UnknownAxiom(name.clone())))?;
                if line.poly != *q {
                    return Err(fail(idx, PcrFailureReason::AxiomMismatch(name.clone())));
                }
            }
            Justification::BooleanAxiom { pair, kind } => {
                if *pair >= space.n_pairs() {
                    return Err(fail(idx, PcrFailureReason::PairOutOfRange(*pair)));
                }
                let expected = match kind {
                    BoolKind::Square => poly::square_generator::<T>(*pair),
                    BoolKind::Twin => poly::twin_generator::<T>(*pair),
                };
                if line.poly != expected {
                    return Err(fail(idx, PcrFailureReason::BooleanAxiomMismatch(*pair)));
                }
            }
            Justification::Lift { premise: j, var } => {
                if !space.contains(*var) {
                    return Err(fail(idx, PcrFailureReason::VariableOutsideSpace));
                }
                let expected = premise(*j)?.mul_monomial(&Monomial::var(*var));
                if line.poly != expected {
                    return Err(fail(idx, PcrFailureReason::LiftMismatch));
                }
            }
            Justification::LinComb { j, k, a, b } => {
                let expected = &premise(*j)?.scale(a) + &premise(*k)?.scale(b);
                if line.poly != expected {
                    return Err(fail(idx, PcrFailureReason::LinCombMismatch));
                }
            }
        }
    }
    if proof.lines.last().unwrap().poly != proof.target {
        return Err(fail(proof.lines.len(), PcrFailureReason::TargetMismatch));
    }
    Ok(())
}

/// Complexity measures of a verified proof.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PcrMetrics<T: Scalar> {
    pub degree: u64,
    pub monomial_size: u64,
    pub height: u64,
    pub bit_complexity: u64,
    pub max_abs_coefficient: T,
    pub max_abs_scalar: T,
}

/// Measures a proof; the proof is verified first and rejected on failure.
pub fn pcr_metrics<T: Scalar>(proof: &PcrProof<T>) -> Result<PcrMetrics<T>, PcrFailure> {
    verify_pcr(proof)?;

    let mut degree = 0u64;
    let mut monomial_size = 0u64;
    let mut bit_complexity = 0u64;
    let mut max_abs_coefficient = T::zero();
    let mut max_abs_scalar = T::zero();
    let mut heights: Vec<u64> = Vec::with_capacity(proof.lines.len());

    for line in &proof.lines {
        if let Degree::Of(d) = line.poly.degree() {
            degree = degree.max(d);
        }
        monomial_size += line.poly.num_terms() as u64;
        bit_complexity += line.poly.bit_size();
        let norm = line.poly.norm_inf();
        if norm > max_abs_coefficient {
            max_abs_coefficient = norm;
        }
        let h = match &line.justification {
            Justification::Axiom { .. } | Justification::BooleanAxiom { .. } => 0,
            Justification::Lift { premise, .. } => {
                bit_complexity += bitlen_u64(*premise as u64);
                heights[premise - 1] + 1
            }
            Justification::LinComb { j, k, a, b } => {
                bit_complexity += bitlen_u64(*j as u64) + bitlen_u64(*k as u64);
                bit_complexity += a.bit_size() + b.bit_size();
                for s in [a, b] {
                    let m = s.abs();
                    if m > max_abs_scalar {
                        max_abs_scalar = m;
                    }
                }
                heights[j - 1].max(heights[k - 1]) + 1
            }
        };
        heights.push(h);
    }

    Ok(PcrMetrics {
        degree,
        monomial_size,
        height: *heights.last().unwrap(),
        bit_complexity,
        max_abs_coefficient,
        max_abs_scalar,
    })
}

/// True iff every coefficient of every line and every combination scalar has
/// absolute value at most `r`. `r` must be positive.
pub fn is_r_bounded<T: Scalar>(proof: &PcrProof<T>, r: &T) -> bool {
    assert!(*r > T::zero(), "bound must be positive");
    for line in &proof.lines {
        if line.poly.norm_inf() > *r {
            return false;
        }
        if let Justification::LinComb { a, b, .. } = &line.justification {
            if a.abs() > *r || b.abs() > *r {
                return false;
            }
        }
    }
    true
}

/// Largest numerator/denominator binary length over every coefficient and
/// scalar stored in the proof.
pub fn max_component_bits<T: Scalar>(proof: &PcrProof<T>) -> u64 {
    let mut bits = 0u64;
    for line in &proof.lines {
        bits = bits.max(line.poly.max_component_bits());
        if let Justification::LinComb { a, b, .. } = &line.justification {
            bits = bits.max(a.component_bits()).max(b.component_bits());
        }
    }
    bits
}

/// Serializes a proof. The header names the constraint-system file (as given
/// in `system_ref`) and the target; each line is
/// `idx | RULE args | polynomial`.
pub fn proof_to_text<T: Scalar>(proof: &PcrProof<T>, system_ref: &str) -> String {
    let space = proof.space();
    let mut out = String::new();
    out.push_str(&format!("system: {system_ref}\n"));
    out.push_str(&format!("target: {}\n", proof.target.to_text(space)));
    for (pos, line) in proof.lines.iter().enumerate() {
        let idx = pos + 1;
        let rule = match &line.justification {
            Justification::Axiom { name } => format!("AXIOM {name}"),
            Justification::BooleanAxiom { pair, kind } => {
                let kind = match kind {
                    BoolKind::Square => "square",
                    BoolKind::Twin => "twin",
                };
                format!("BOOL {} {kind}", pair_token(space, *pair))
            }
            Justification::Lift { premise, var } => {
                format!("LIFT {premise} {}", space.var_token(*var))
            }
            Justification::LinComb { j, k, a, b } => format!("LIN {j} {k} {a} {b}"),
        };
        out.push_str(&format!("{idx} | {rule} | {}\n", line.poly.to_text(space)));
    }
    out
}

fn pair_token(space: &VariableSpace, pair: u32) -> String {
    match space.coords(pair) {
        Some((i, j)) => format!("{},{}", i + 1, j + 1),
        None => format!("{}", pair + 1),
    }
}

fn parse_pair_token(tok: &str, space: &VariableSpace) -> Result<u32, ParseError> {
    let parse_num = |s: &str| -> Result<u32, ParseError> {
        s.trim().parse().map_err(|_| ParseError::Other(format!("bad pair `{tok}`")))
    };
    let pair = match tok.split_once(',') {
        Some((i, j)) => {
            let (i, j) = (parse_num(i)?, parse_num(j)?);
            let (rows, cols) = space.grid_shape().ok_or(ParseError::NoGrid)?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(ParseError::Other(format!("pair `{tok}` is off the grid")));
            }
            space.pair_at(i - 1, j - 1)
        }
        None => {
            let p = parse_num(tok)?;
            if p == 0 || p > space.n_pairs() {
                return Err(ParseError::Other(format!("pair `{tok}` is out of range")));
            }
            p - 1
        }
    };
    Ok(pair)
}

/// Extracts the `system:` reference from a proof file without parsing the
/// body.
pub fn proof_system_ref(text: &str) -> Result<String, ParseError> {
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix("system:") {
            return Ok(rest.trim().to_string());
        }
    }
    Err(ParseError::Other("missing `system:` header".into()))
}

pub fn parse_proof<T: Scalar>(
    input: &str,
    system: ConstraintSystem<T>,
) -> Result<PcrProof<T>, ParseError> {
    let space = system.space().clone();
    let mut target: Option<Polynomial<T>> = None;
    let mut lines: Vec<PcrLine<T>> = Vec::new();

    for raw in input.lines() {
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') || raw.starts_with("system:") {
            continue;
        }
        if let Some(rest) = raw.strip_prefix("target:") {
            target = Some(text::parse_poly(rest, &space)?);
            continue;
        }
        let mut parts = raw.splitn(3, '|');
        let (idx_part, rule_part, poly_part) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c)) => (a.trim(), b.trim(), c.trim()),
            _ => return Err(ParseError::Other(format!("malformed proof line `{raw}`"))),
        };
        let idx: usize = idx_part
            .parse()
            .map_err(|_| ParseError::Other(format!("bad line index `{idx_part}`")))?;
        if idx != lines.len() + 1 {
            return Err(ParseError::Other(format!(
                "line index {idx} out of order (expected {})",
                lines.len() + 1
            )));
        }
        let mut words = rule_part.split_whitespace();
        let rule = words.next().unwrap_or_default();
        let justification = match rule {
            "AXIOM" => {
                let name = words.next().ok_or_else(|| missing_arg(rule))?;
                Justification::Axiom { name: name.to_string() }
            }
            "BOOL" => {
                let pair = parse_pair_token(words.next().ok_or_else(|| missing_arg(rule))?, &space)?;
                let kind = match words.next().ok_or_else(|| missing_arg(rule))? {
                    "square" => BoolKind::Square,
                    "twin" => BoolKind::Twin,
                    other => {
                        return Err(ParseError::Other(format!("unknown Boolean axiom `{other}`")))
                    }
                };
                Justification::BooleanAxiom { pair, kind }
            }
            "LIFT" => {
                let premise = parse_index(words.next().ok_or_else(|| missing_arg(rule))?)?;
                let var = text::parse_var(words.next().ok_or_else(|| missing_arg(rule))?, &space)?;
                Justification::Lift { premise, var }
            }
            "LIN" => {
                let j = parse_index(words.next().ok_or_else(|| missing_arg(rule))?)?;
                let k = parse_index(words.next().ok_or_else(|| missing_arg(rule))?)?;
                let a = text::parse_scalar::<T>(words.next().ok_or_else(|| missing_arg(rule))?)?;
                let b = text::parse_scalar::<T>(words.next().ok_or_else(|| missing_arg(rule))?)?;
                Justification::LinComb { j, k, a, b }
            }
            other => return Err(ParseError::Other(format!("unknown rule `{other}`"))),
        };
        if words.next().is_some() {
            return Err(ParseError::Other(format!("trailing tokens in rule `{rule_part}`")));
        }
        let poly = text::parse_poly(poly_part, &space)?;
        lines.push(PcrLine { poly, justification });
    }

    let target = target.ok_or_else(|| ParseError::Other("missing `target:` header".into()))?;
    Ok(PcrProof { system, lines, target })
}

fn missing_arg(rule: &str) -> ParseError {
    ParseError::Other(format!("missing argument for rule `{rule}`"))
}

fn parse_index(tok: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| ParseError::Other(format!("bad premise index `{tok}`")))
}

/// Restricted evaluation helper: value of every line at a Boolean point.
pub fn line_values_at<T: Scalar>(
    proof: &PcrProof<T>,
    assignment: &BTreeMap<u32, bool>,
) -> Result<Vec<T>, poly::EvalError> {
    proof.lines.iter().map(|l| l.poly.evaluate(assignment)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate_qn_pcr_refutation, qn_system};
    use crate::{Poly, Rat};
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    /// Axiom I followed by one linear combination: a proof of ks1/2 - 1/4.
    fn two_line_proof() -> PcrProof<Rat> {
        let system = qn_system::<Rat>(1);
        let q = system.get("I").unwrap().clone();
        let half = q.scale(&rat(1, 2));
        let lines = vec![
            PcrLine { poly: q, justification: Justification::Axiom { name: "I".into() } },
            PcrLine {
                poly: half.clone(),
                justification: Justification::LinComb { j: 1, k: 1, a: rat(1, 2), b: rat(0, 1) },
            },
        ];
        PcrProof { system, lines, target: half }
    }

    #[test]
    fn linear_combination_proof_verifies() {
        let proof = two_line_proof();
        assert_eq!(verify_pcr(&proof), Ok(()));
        let m = pcr_metrics(&proof).unwrap();
        assert_eq!(m.height, 1);
        assert_eq!(m.degree, 1);
    }

    #[test]
    fn lift_must_be_exact() {
        let system = qn_system::<Rat>(1);
        let q = system.get("I").unwrap().clone();
        let var = VarId::pos(0);
        let lifted_plus_one = &q.mul_monomial(&Monomial::var(var)) + &Poly::one();
        let proof = PcrProof {
            system,
            lines: vec![
                PcrLine { poly: q, justification: Justification::Axiom { name: "I".into() } },
                PcrLine {
                    poly: lifted_plus_one.clone(),
                    justification: Justification::Lift { premise: 1, var },
                },
            ],
            target: lifted_plus_one,
        };
        let err = verify_pcr(&proof).unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.reason, PcrFailureReason::LiftMismatch);
    }

    #[test]
    fn generated_refutations_verify() {
        for n in 1..=4 {
            let proof = generate_qn_pcr_refutation::<Rat>(n);
            assert_eq!(verify_pcr(&proof), Ok(()), "n={n}");
            assert!(proof.is_refutation());
        }
    }

    #[test]
    fn generated_metrics_match_the_chain() {
        let m1 = pcr_metrics(&generate_qn_pcr_refutation::<Rat>(1)).unwrap();
        assert_eq!(m1.degree, 2);
        assert_eq!(m1.max_abs_scalar, rat(4, 1));

        let m3 = pcr_metrics(&generate_qn_pcr_refutation::<Rat>(3)).unwrap();
        assert_eq!(m3.degree, 2);
        assert_eq!(m3.max_abs_scalar, rat(256, 1));

        // The 17-bit final scalar alone already contributes more than 2^4
        // bits at n = 4.
        let m4 = pcr_metrics(&generate_qn_pcr_refutation::<Rat>(4)).unwrap();
        assert!(m4.bit_complexity > 17);
        assert_eq!(max_component_bits(&generate_qn_pcr_refutation::<Rat>(4)), 17);
    }

    #[test]
    fn single_axiom_line_has_height_zero() {
        let system = qn_system::<Rat>(1);
        let q = system.get("I").unwrap().clone();
        let proof = PcrProof {
            system,
            lines: vec![PcrLine {
                poly: q.clone(),
                justification: Justification::Axiom { name: "I".into() },
            }],
            target: q,
        };
        let m = pcr_metrics(&proof).unwrap();
        assert_eq!(m.height, 0);
        assert_eq!(m.max_abs_scalar, rat(0, 1));
        assert!(is_r_bounded(&proof, &rat(3, 2)));
        assert!(!is_r_bounded(&proof, &rat(1, 1)));
    }

    #[test]
    fn r_boundedness_of_generated_proofs() {
        for n in 1..=3u32 {
            let proof = generate_qn_pcr_refutation::<Rat>(n);
            let big = Rat::pow2(1 << n);
            assert!(is_r_bounded(&proof, &big));
            assert!(!is_r_bounded(&proof, &(big - Rat::one())));
        }
    }

    #[test]
    fn structural_invariants_of_generated_proofs() {
        for n in 1..=3u32 {
            let proof = generate_qn_pcr_refutation::<Rat>(n);
            let m = pcr_metrics(&proof).unwrap();
            assert!(m.height <= proof.lines.len() as u64 - 1);
            assert!(m.monomial_size >= proof.lines.len() as u64);
        }
    }

    #[test]
    fn satisfiable_toy_system_lines_vanish_at_the_witness() {
        // x1 - 1 = 0, witness x1 = 1; every derived line evaluates to 0.
        let mut system = ConstraintSystem::new(VariableSpace::new(1));
        let q = &Poly::var(VarId::pos(0)) - &Poly::one();
        system.push("K", q.clone()).unwrap();
        let lifted = q.mul_monomial(&Monomial::var(VarId::pos(0)));
        let combo = &q.scale(&rat(2, 1)) + &lifted.scale(&rat(-3, 1));
        let proof = PcrProof {
            system,
            lines: vec![
                PcrLine { poly: q, justification: Justification::Axiom { name: "K".into() } },
                PcrLine {
                    poly: lifted,
                    justification: Justification::Lift { premise: 1, var: VarId::pos(0) },
                },
                PcrLine {
                    poly: combo.clone(),
                    justification: Justification::LinComb { j: 1, k: 2, a: rat(2, 1), b: rat(-3, 1) },
                },
            ],
            target: combo,
        };
        assert_eq!(verify_pcr(&proof), Ok(()));
        let witness = BTreeMap::from([(0u32, true)]);
        assert!(proof.system.is_satisfied_by(&witness).unwrap());
        for v in line_values_at(&proof, &witness).unwrap() {
            assert!(v.is_zero());
        }
    }

    #[test]
    fn proof_file_round_trip() {
        for n in 1..=2u32 {
            let proof = generate_qn_pcr_refutation::<Rat>(n);
            let text = proof_to_text(&proof, "sys.txt");
            assert_eq!(proof_system_ref(&text).unwrap(), "sys.txt");
            let back = parse_proof::<Rat>(&text, proof.system.clone()).unwrap();
            assert_eq!(back, proof);
            assert_eq!(proof_to_text(&back, "sys.txt"), text);
        }
    }
}
