//! Constraint systems and the built-in families, with their explicit
//! degree-2 refutation generators.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::monomial::Monomial;
use crate::pcr::{Justification, PcrLine, PcrProof};
use crate::poly::{EvalError, Polynomial};
use crate::scalar::Scalar;
use crate::sos::SosCertificate;
use crate::space::{VarId, VariableSpace};
use crate::text::{self, ParseError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("duplicate constraint name `{0}`")]
    DuplicateName(String),
    #[error("constraint `{0}` is the zero polynomial")]
    ZeroConstraint(String),
    #[error("constraint `{0}` uses variables outside the space")]
    OutOfSpace(String),
}

/// An ordered, named list of polynomial equality constraints `q = 0` over a
/// common variable space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstraintSystem<T: Scalar> {
    space: VariableSpace,
    constraints: Vec<(String, Polynomial<T>)>,
}

impl<T: Scalar> ConstraintSystem<T> {
    pub fn new(space: VariableSpace) -> Self {
        ConstraintSystem { space, constraints: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, poly: Polynomial<T>) -> Result<(), SystemError> {
        let name = name.into();
        if self.constraints.iter().any(|(n, _)| *n == name) {
            return Err(SystemError::DuplicateName(name));
        }
        if poly.is_zero() {
            return Err(SystemError::ZeroConstraint(name));
        }
        if poly.max_pair().is_some_and(|p| p >= self.space.n_pairs()) {
            return Err(SystemError::OutOfSpace(name));
        }
        self.constraints.push((name, poly));
        Ok(())
    }

    pub fn space(&self) -> &VariableSpace {
        &self.space
    }

    pub fn get(&self, name: &str) -> Option<&Polynomial<T>> {
        self.constraints.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Polynomial<T>)> {
        self.constraints.iter().map(|(n, p)| (n.as_str(), p))
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// True when every constraint evaluates to zero at the Boolean point.
    pub fn is_satisfied_by(&self, assignment: &BTreeMap<u32, bool>) -> Result<bool, EvalError> {
        for (_, q) in &self.constraints {
            if !q.evaluate(assignment)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Single constraint `x_1 + ... + x_v - k = 0`.
pub fn knapsack_system<T: Scalar>(vars: u32, k: T) -> ConstraintSystem<T> {
    assert!(vars >= 1, "knapsack needs at least one variable");
    let space = VariableSpace::new(vars);
    let sum = Polynomial::from_terms(
        (0..vars).map(|p| (Monomial::var(VarId::pos(p)), T::one())),
    );
    let poly = &sum - &Polynomial::constant(k);
    let mut sys = ConstraintSystem::new(space);
    sys.push("K", poly).expect("fresh system");
    sys
}

/// The squaring-chain family over an `n x 2n` grid of pairs.
///
/// Row sums `ks_i = sum_j x_{ij} - n` are pinned by the constraints
/// `ks_1 = 1/2`, `ks_i^2 = ks_{i+1}` and `ks_n^2 = 0`: each row's value is
/// forced to the square of the previous one, which is what drives the
/// doubly exponential coefficients in any refutation the generators build.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct QnFamily {
    pub n: u32,
}

impl QnFamily {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "family needs n >= 1");
        QnFamily { n }
    }

    pub fn space(&self) -> VariableSpace {
        VariableSpace::grid(self.n, 2 * self.n)
    }

    /// Row sum `ks_i` (1-based row).
    pub fn ks<T: Scalar>(&self, i: u32) -> Polynomial<T> {
        assert!(1 <= i && i <= self.n);
        let space = self.space();
        let sum = Polynomial::from_terms(
            (0..2 * self.n).map(|j| (Monomial::var(VarId::pos(space.pair_at(i - 1, j))), T::one())),
        );
        &sum - &Polynomial::constant(T::from_int(self.n as i64))
    }
}

/// Constraints `I: ks_1 - 1/2`, `II-i: ks_i^2 - ks_{i+1}`, `III: ks_n^2`.
pub fn qn_system<T: Scalar>(n: u32) -> ConstraintSystem<T> {
    let fam = QnFamily::new(n);
    let mut sys = ConstraintSystem::new(fam.space());
    let ks = |i: u32| fam.ks::<T>(i);
    sys.push("I", &ks(1) - &Polynomial::constant(T::from_ratio(1, 2))).unwrap();
    for i in 1..n {
        let sq = &ks(i) * &ks(i);
        sys.push(format!("II-{i}"), &sq - &ks(i + 1)).unwrap();
    }
    sys.push("III", &ks(n) * &ks(n)).unwrap();
    sys
}

/// `1 / 2^(2^i)`; `chain_value(0) = 1/2`.
fn chain_value<T: Scalar>(i: u32) -> T {
    T::pow2(-(1i64 << i))
}

/// Builds the explicit degree-2 line proof of `1 = 0` from the family
/// constraints.
///
/// Stage `i` starts from the proven line `E_i = ks_i - c` (with
/// `c = chain_value(i-1)`; stage 1 starts from axiom I), lifts it over the
/// row's variables to accumulate `ks_i * E_i`, and telescopes to
/// `ks_i^2 - c^2`, which axiom II-i turns into `E_{i+1}`. The endgame
/// combines axiom III with `ks_n * E_n` and closes with a single linear
/// combination whose scalar is exactly `2^(2^n)`.
pub fn generate_qn_pcr_refutation<T: Scalar>(n: u32) -> PcrProof<T> {
    let fam = QnFamily::new(n);
    let system = qn_system::<T>(n);
    let space = fam.space();
    let cols = 2 * n;

    let mut lines: Vec<PcrLine<T>> = Vec::new();
    let push = |lines: &mut Vec<PcrLine<T>>, poly: Polynomial<T>, justification: Justification<T>| -> usize {
        lines.push(PcrLine { poly, justification });
        lines.len()
    };

    let axiom_i = system.get("I").unwrap().clone();
    let mut e_idx = push(&mut lines, axiom_i.clone(), Justification::Axiom { name: "I".into() });
    let mut e_poly = axiom_i;

    for stage in 1..=n {
        let c = chain_value::<T>(stage - 1);

        // Left-to-right accumulation of sum_j x_{stage,j} * E.
        let mut acc_idx = 0usize;
        let mut acc_poly = Polynomial::zero();
        for j in 0..cols {
            let var = VarId::pos(space.pair_at(stage - 1, j));
            let lifted = e_poly.mul_monomial(&Monomial::var(var));
            let l_idx = push(&mut lines, lifted.clone(), Justification::Lift { premise: e_idx, var });
            if j == 0 {
                acc_idx = l_idx;
                acc_poly = lifted;
            } else {
                acc_poly = &acc_poly + &lifted;
                acc_idx = push(
                    &mut lines,
                    acc_poly.clone(),
                    Justification::LinComb { j: acc_idx, k: l_idx, a: T::one(), b: T::one() },
                );
            }
        }

        // acc = (ks + n) * E, so subtracting n copies of E leaves ks * E.
        let minus_n = T::from_int(-(n as i64));
        let t_poly = &acc_poly + &e_poly.scale(&minus_n);
        let t_idx = push(
            &mut lines,
            t_poly.clone(),
            Justification::LinComb { j: acc_idx, k: e_idx, a: T::one(), b: minus_n },
        );

        if stage < n {
            // Scaled copy c*E, then ks^2 - c^2, then axiom II-stage.
            let v_poly = e_poly.scale(&c);
            let v_idx = push(
                &mut lines,
                v_poly.clone(),
                Justification::LinComb { j: e_idx, k: e_idx, a: c.clone(), b: T::zero() },
            );
            let d_poly = &t_poly + &v_poly;
            let d_idx = push(
                &mut lines,
                d_poly.clone(),
                Justification::LinComb { j: t_idx, k: v_idx, a: T::one(), b: T::one() },
            );
            let name = format!("II-{stage}");
            let a_poly = system.get(&name).unwrap().clone();
            let a_idx = push(&mut lines, a_poly.clone(), Justification::Axiom { name });
            e_poly = &d_poly - &a_poly;
            e_idx = push(
                &mut lines,
                e_poly.clone(),
                Justification::LinComb { j: d_idx, k: a_idx, a: T::one(), b: T::one().neg() },
            );
        } else {
            let a_poly = system.get("III").unwrap().clone();
            let a_idx = push(&mut lines, a_poly.clone(), Justification::Axiom { name: "III".into() });
            // III - ks*E = c * ks.
            let u_poly = &a_poly - &t_poly;
            let u_idx = push(
                &mut lines,
                u_poly.clone(),
                Justification::LinComb { j: a_idx, k: t_idx, a: T::one(), b: T::one().neg() },
            );
            // 2^(2^n) * (c*ks) - 2^(2^(n-1)) * (ks - c) = 1.
            let big = T::pow2(1i64 << n);
            let half = T::pow2(1i64 << (n - 1));
            let final_poly = &u_poly.scale(&big) + &e_poly.scale(&half.clone().neg());
            push(
                &mut lines,
                final_poly,
                Justification::LinComb { j: u_idx, k: e_idx, a: big, b: half.neg() },
            );
        }
    }

    PcrProof { system, lines, target: Polynomial::one() }
}

/// Builds the weighted-squares certificate for target `-1`.
///
/// The telescoping scheme uses squares `(lambda_i, ks_i - c_i)` with
/// `c_i = chain_value(i-1)` and `lambda_i = 2^(n-i+2^i)`, a constant lift
/// `2^(n+1)` of constraint I, lifts `-lambda_i` of the II constraints and
/// `-2^(2^n)` of constraint III. All cross terms cancel exactly; the
/// verifier is the ground truth for that.
pub fn generate_qn_sos_refutation<T: Scalar>(n: u32) -> SosCertificate<T> {
    let fam = QnFamily::new(n);
    let system = qn_system::<T>(n);

    let lambda = |i: u32| T::pow2((n - i) as i64 + (1i64 << i));

    let mut weighted_squares = Vec::new();
    for i in 1..=n {
        let r = &fam.ks::<T>(i) - &Polynomial::constant(chain_value::<T>(i - 1));
        weighted_squares.push((lambda(i), r));
    }

    let mut axiom_lifts: BTreeMap<String, Polynomial<T>> = BTreeMap::new();
    axiom_lifts.insert("I".into(), Polynomial::constant(T::pow2(n as i64 + 1)));
    for i in 1..n {
        axiom_lifts.insert(format!("II-{i}"), Polynomial::constant(lambda(i).neg()));
    }
    axiom_lifts.insert("III".into(), Polynomial::constant(T::pow2(1i64 << n).neg()));

    SosCertificate {
        system,
        weighted_squares,
        axiom_lifts,
        boolean_lifts: BTreeMap::new(),
        target: Polynomial::constant(T::one().neg()),
    }
}

/// Serializes a constraint system: a `pairs:` header, a `grid:` header when
/// the space is a grid, then one `name | poly` line per constraint.
pub fn system_to_text<T: Scalar>(sys: &ConstraintSystem<T>) -> String {
    let mut out = String::new();
    out.push_str(&format!("pairs: {}\n", sys.space().n_pairs()));
    if let Some((r, c)) = sys.space().grid_shape() {
        out.push_str(&format!("grid: {r} {c}\n"));
    }
    for (name, poly) in sys.iter() {
        out.push_str(&format!("{name} | {}\n", poly.to_text(sys.space())));
    }
    out
}

pub fn parse_system<T: Scalar>(text: &str) -> Result<ConstraintSystem<T>, ParseError> {
    let mut pairs: Option<u32> = None;
    let mut grid: Option<(u32, u32)> = None;
    let mut body: Vec<(&str, &str)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("pairs:") {
            pairs = Some(
                rest.trim().parse().map_err(|_| ParseError::Other(header_err("pairs", rest)))?,
            );
        } else if let Some(rest) = line.strip_prefix("grid:") {
            let mut it = rest.split_whitespace();
            let r = it.next().and_then(|s| s.parse().ok());
            let c = it.next().and_then(|s| s.parse().ok());
            match (r, c, it.next()) {
                (Some(r), Some(c), None) => grid = Some((r, c)),
                _ => return Err(ParseError::Other(header_err("grid", rest))),
            }
        } else if let Some((name, poly)) = line.split_once('|') {
            body.push((name.trim(), poly.trim()));
        } else {
            return Err(ParseError::Other(format!("unrecognized system line `{line}`")));
        }
    }
    let n_pairs = pairs.ok_or_else(|| ParseError::Other("missing `pairs:` header".into()))?;
    let space = match grid {
        Some((r, c)) => {
            if r * c != n_pairs {
                return Err(ParseError::Other("grid shape does not match pair count".into()));
            }
            VariableSpace::grid(r, c)
        }
        None => VariableSpace::new(n_pairs),
    };
    let mut sys = ConstraintSystem::new(space.clone());
    for (name, poly_text) in body {
        let poly = text::parse_poly::<T>(poly_text, &space)?;
        sys.push(name, poly).map_err(|e| ParseError::Other(e.to_string()))?;
    }
    Ok(sys)
}

fn header_err(key: &str, rest: &str) -> String {
    format!("malformed `{key}:` header: `{}`", rest.trim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Degree;
    use crate::{Rat, RatSystem};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn knapsack_examples() {
        let sys = knapsack_system::<Rat>(2, rat(3, 2));
        let q = sys.get("K").unwrap();
        let expected = Polynomial::from_terms([
            (Monomial::var(VarId::pos(0)), rat(1, 1)),
            (Monomial::var(VarId::pos(1)), rat(1, 1)),
            (Monomial::one(), rat(-3, 2)),
        ]);
        assert_eq!(*q, expected);

        // Satisfiable instance: x1 = 1.
        let sat = knapsack_system::<Rat>(1, rat(1, 1));
        let a = BTreeMap::from([(0, true)]);
        assert!(sat.is_satisfied_by(&a).unwrap());

        // Any Boolean value of the constraint is an integer minus k.
        let q = sys.get("K").unwrap();
        for bits in 0..4u32 {
            let a = BTreeMap::from([(0, bits & 1 != 0), (1, bits & 2 != 0)]);
            let v = q.evaluate(&a).unwrap() + rat(3, 2);
            assert!(v.denom() == &num_bigint::BigInt::from(1));
        }
    }

    #[test]
    fn qn_system_shapes() {
        let s1 = qn_system::<Rat>(1);
        assert_eq!(s1.space().n_pairs(), 2);
        assert_eq!(s1.len(), 2);
        assert!(s1.get("I").is_some());
        assert!(s1.get("III").is_some());
        assert!(s1.get("II-1").is_none());

        let s2 = qn_system::<Rat>(2);
        assert_eq!(s2.space().n_pairs(), 8);
        assert_eq!(s2.len(), 3);
        assert_eq!(s2.get("I").unwrap().degree(), Degree::Of(1));
        assert_eq!(s2.get("II-1").unwrap().degree(), Degree::Of(2));
        assert_eq!(s2.get("III").unwrap().degree(), Degree::Of(2));
    }

    #[test]
    fn qn_is_unsatisfiable_exhaustively() {
        for n in [1u32, 2] {
            let sys = qn_system::<Rat>(n);
            let pairs = sys.space().n_pairs();
            for mask in 0u32..(1 << pairs) {
                let a: BTreeMap<u32, bool> =
                    (0..pairs).map(|p| (p, mask >> p & 1 != 0)).collect();
                assert!(!sys.is_satisfied_by(&a).unwrap(), "n={n} mask={mask}");
            }
        }
    }

    #[test]
    fn system_text_round_trip() {
        for n in [1u32, 2] {
            let sys = qn_system::<Rat>(n);
            let text = system_to_text(&sys);
            let back: RatSystem = parse_system(&text).unwrap();
            assert_eq!(back, sys);
            assert_eq!(system_to_text(&back), text);
        }
    }

    #[test]
    fn push_validates() {
        let mut sys = RatSystem::new(VariableSpace::new(1));
        sys.push("a", Polynomial::var(VarId::pos(0))).unwrap();
        assert!(matches!(
            sys.push("a", Polynomial::one()),
            Err(SystemError::DuplicateName(_))
        ));
        assert!(matches!(
            sys.push("b", Polynomial::zero()),
            Err(SystemError::ZeroConstraint(_))
        ));
        assert!(matches!(
            sys.push("c", Polynomial::var(VarId::pos(5))),
            Err(SystemError::OutOfSpace(_))
        ));
    }
}
