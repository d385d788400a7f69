//! Pseudoexpectations: linear functionals on monomials that make an
//! unsatisfiable system look satisfiable to limited certificates.
//!
//! Two constructions are provided. The symmetric knapsack functional sends a
//! multilinear monomial of degree `t` to `prod_{l<t} (k-l)/(v-l)`, which
//! kills every product of a small monomial with the knapsack constraint. The
//! product functional evaluates each grid row with its own block functional
//! and multiplies the results.
//!
//! General polynomials are evaluated by reducing to canonical form first and
//! extending linearly, so both functionals respect the Boolean ideal by
//! construction.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::families::ConstraintSystem;
use crate::monomial::Monomial;
use crate::poly::{self, Polynomial};
use crate::scalar::Scalar;
use crate::space::{VarId, VariableSpace};
use crate::text;

/// Maps grid variables to their row block and extracts per-block factors of
/// a monomial; a grid monomial is the product of its block projections.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ProjectionIndex {
    pub blocks: u32,
    pub cols: u32,
}

impl ProjectionIndex {
    pub fn block_of(&self, pair: u32) -> u32 {
        pair / self.cols
    }

    /// Factor of `m` supported on the given block, keeping global ids.
    pub fn project(&self, m: &Monomial, block: u32) -> Monomial {
        m.filter(|v| self.block_of(v.pair) == block)
    }

    /// Same factor re-indexed to the block's local pair numbering.
    pub fn project_local(&self, m: &Monomial, block: u32) -> Monomial {
        let offset = block * self.cols;
        self.project(m, block).map_vars(|v| VarId { pair: v.pair - offset, negated: v.negated })
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PeError {
    #[error("knapsack functional needs 0 < k < vars")]
    BadKnapsackBound,
    #[error("expected {expected} block functionals, got {got}")]
    BlockCountMismatch { expected: u32, got: u32 },
    #[error("block {0} is not over {1} pairs")]
    BlockSpaceMismatch(u32, u32),
}

/// A unit-normalized evaluator on multilinear positive monomials, extended
/// to all polynomials by canonical-form reduction and linearity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Pseudoexpectation<T: Scalar> {
    Knapsack { vars: u32, k: T },
    Product { blocks: Vec<Pseudoexpectation<T>>, idx: ProjectionIndex },
}

/// Symmetric functional for `x_1 + ... + x_v = k`.
pub fn knapsack_pe<T: Scalar>(vars: u32, k: T) -> Result<Pseudoexpectation<T>, PeError> {
    if vars == 0 || !k.is_positive() || k >= T::from_int(vars as i64) {
        return Err(PeError::BadKnapsackBound);
    }
    Ok(Pseudoexpectation::Knapsack { vars, k })
}

/// Product of one block functional per grid row.
pub fn product_pe<T: Scalar>(
    blocks: Vec<Pseudoexpectation<T>>,
    idx: ProjectionIndex,
) -> Result<Pseudoexpectation<T>, PeError> {
    if blocks.len() as u32 != idx.blocks {
        return Err(PeError::BlockCountMismatch { expected: idx.blocks, got: blocks.len() as u32 });
    }
    for (b, pe) in blocks.iter().enumerate() {
        if pe.space().n_pairs() != idx.cols {
            return Err(PeError::BlockSpaceMismatch(b as u32, idx.cols));
        }
    }
    Ok(Pseudoexpectation::Product { blocks, idx })
}

impl<T: Scalar> Pseudoexpectation<T> {
    pub fn space(&self) -> VariableSpace {
        match self {
            Pseudoexpectation::Knapsack { vars, .. } => VariableSpace::new(*vars),
            Pseudoexpectation::Product { idx, .. } => VariableSpace::grid(idx.blocks, idx.cols),
        }
    }

    /// Value on a multilinear positive monomial.
    fn multilinear_value(&self, m: &Monomial) -> T {
        debug_assert!(m.is_multilinear_positive());
        match self {
            Pseudoexpectation::Knapsack { vars, k } => {
                let t = m.degree();
                let mut val = T::one();
                for l in 0..t {
                    let num = k.clone() - T::from_int(l as i64);
                    let den = T::from_int(*vars as i64) - T::from_int(l as i64);
                    val = val * num / den;
                }
                val
            }
            Pseudoexpectation::Product { blocks, idx } => {
                let mut val = T::one();
                for (b, pe) in blocks.iter().enumerate() {
                    let local = idx.project_local(m, b as u32);
                    val = val * pe.multilinear_value(&local);
                }
                val
            }
        }
    }

    /// Linear extension over the canonical form of `p`.
    pub fn value(&self, p: &Polynomial<T>) -> T {
        let canon = p.canonical_form();
        let mut total = T::zero();
        for (m, c) in canon.iter() {
            total = total + c.clone() * self.multilinear_value(m);
        }
        total
    }
}

/// Free-function spelling of [`Pseudoexpectation::value`].
pub fn pe_value<T: Scalar>(pe: &Pseudoexpectation<T>, p: &Polynomial<T>) -> T {
    pe.value(p)
}

/// Symmetric matrix `(E(m * m'))` over an ordered monomial list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MomentMatrix<T: Scalar> {
    pub index: Vec<Monomial>,
    pub entries: Vec<Vec<T>>,
}

pub fn moment_matrix<T: Scalar>(
    pe: &Pseudoexpectation<T>,
    s: &[Monomial],
) -> MomentMatrix<T> {
    let n = s.len();
    let mut entries = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let prod = Polynomial::monomial(s[i].mul(&s[j]), T::one());
            let val = pe.value(&prod);
            entries[i][j] = val.clone();
            entries[j][i] = val;
        }
    }
    MomentMatrix { index: s.to_vec(), entries }
}

impl<T: Scalar> MomentMatrix<T> {
    pub fn is_psd(&self) -> bool {
        is_psd_matrix(&self.entries).expect("moment matrices are square and symmetric")
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PsdError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

/// Exact positive-semidefiniteness by pivoted Schur-complement elimination.
///
/// Repeatedly pivots on a maximal positive diagonal entry. When no positive
/// diagonal remains, the block is positive semidefinite iff it is zero: a
/// negative diagonal entry is an immediate witness, and a zero diagonal
/// entry with a nonzero off-diagonal row gives a negative 2x2 principal
/// minor.
pub fn is_psd_matrix<T: Scalar>(mat: &[Vec<T>]) -> Result<bool, PsdError> {
    let n = mat.len();
    if mat.iter().any(|row| row.len() != n) {
        return Err(PsdError::NotSquare);
    }
    for i in 0..n {
        for j in 0..i {
            if mat[i][j] != mat[j][i] {
                return Err(PsdError::NotSymmetric);
            }
        }
    }
    let mut m: Vec<Vec<T>> = mat.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    loop {
        let pivot = active
            .iter()
            .copied()
            .filter(|&i| m[i][i] > T::zero())
            .max_by(|&i, &j| m[i][i].cmp(&m[j][j]));
        match pivot {
            Some(p) => {
                active.retain(|&i| i != p);
                let d = m[p][p].clone();
                for &i in &active {
                    for &j in &active {
                        let update = m[i][p].clone() * m[j][p].clone() / d.clone();
                        m[i][j] = m[i][j].clone() - update;
                    }
                }
            }
            None => {
                for &i in &active {
                    if m[i][i] < T::zero() {
                        return Ok(false);
                    }
                    for &j in &active {
                        if i != j && !m[i][j].is_zero() {
                            return Ok(false);
                        }
                    }
                }
                return Ok(true);
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub clause: String,
    pub detail: String,
}

/// Outcome of the sufficient-condition checks for a functional against a
/// constraint system over a monomial set.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SPeReport {
    pub violations: Vec<Violation>,
    pub untestable: Vec<String>,
    pub checks: usize,
}

impl SPeReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn violate(&mut self, clause: &str, detail: String) {
        self.violations.push(Violation { clause: clause.to_string(), detail });
    }
}

impl fmt::Display for SPeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok: {} checks passed", self.checks)?;
        } else {
            writeln!(f, "FAILED: {} violation(s)", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  clause {}: {}", v.clause, v.detail)?;
            }
        }
        if !self.untestable.is_empty() {
            write!(f, "\nuntestable (outside the product span): {}", self.untestable.join(", "))?;
        }
        Ok(())
    }
}

/// Checks the decidable sufficient conditions for being a valid functional
/// for `system` over `s`:
///
/// (a) `E(1) = 1`;
/// (b) `E(m * q) = 0` for every `m` in `s` and constraint `q`, whenever the
///     canonical form of the product is spanned by products of two set
///     members (other pairs are reported untestable);
/// (c) `E(m * g) = 0` for the Boolean-ideal generators `g`;
/// (d) the moment matrix over `s` is positive semidefinite.
pub fn check_s_pe_axioms<T: Scalar>(
    pe: &Pseudoexpectation<T>,
    system: &ConstraintSystem<T>,
    s: &[Monomial],
) -> SPeReport {
    let mut report = SPeReport::default();
    let space = pe.space();

    if !s.contains(&Monomial::one()) {
        report.violate("pre", "the monomial set must contain 1".to_string());
    }

    // (a)
    report.checks += 1;
    let e1 = pe.value(&Polynomial::one());
    if !e1.is_one() {
        report.violate("a", format!("E(1) = {e1}"));
    }

    // Support of the canonical forms of all two-member products.
    let mut span_support: BTreeSet<Monomial> = BTreeSet::new();
    for m1 in s {
        for m2 in s {
            let prod = Polynomial::monomial(m1.mul(m2), T::one());
            for (m, _) in prod.canonical_form().iter() {
                span_support.insert(m.clone());
            }
        }
    }

    // (b)
    for m in s {
        for (name, q) in system.iter() {
            let prod = &Polynomial::monomial(m.clone(), T::one()) * q;
            let canon = prod.canonical_form();
            if canon.monomials().any(|mm| !span_support.contains(mm)) {
                report
                    .untestable
                    .push(format!("({}, {name})", text::monomial_to_text(m, &space)));
                continue;
            }
            report.checks += 1;
            let val = pe.value(&prod);
            if !val.is_zero() {
                report.violate(
                    "b",
                    format!(
                        "E({} * {name}) = {val}",
                        text::monomial_to_text(m, &space)
                    ),
                );
            }
        }
    }

    // (c)
    for m in s {
        let mp = Polynomial::monomial(m.clone(), T::one());
        for pair in 0..space.n_pairs() {
            for (kind, gen) in [
                ("square", poly::square_generator::<T>(pair)),
                ("twin", poly::twin_generator::<T>(pair)),
            ] {
                report.checks += 1;
                let val = pe.value(&(&mp * &gen));
                if !val.is_zero() {
                    report.violate(
                        "c",
                        format!(
                            "E({} * {kind}[{}]) = {val}",
                            text::monomial_to_text(m, &space),
                            pair + 1
                        ),
                    );
                }
            }
        }
    }

    // (d)
    report.checks += 1;
    if !moment_matrix(pe, s).is_psd() {
        report.violate("d", "moment matrix is not positive semidefinite".to_string());
    }

    report
}

/// Per-property outcome of [`check_product_properties`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PropertyStatus {
    pub label: &'static str,
    pub tested: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProductReport {
    pub properties: Vec<PropertyStatus>,
}

impl ProductReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(|p| p.failures.is_empty())
    }
}

impl fmt::Display for ProductReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            let state = if p.failures.is_empty() { "ok" } else { "FAILED" };
            write!(f, "{}: {state} ({} tested, {} skipped)", p.label, p.tested, p.skipped)?;
            for failure in &p.failures {
                write!(f, "\n    {failure}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Number of sign-pattern samples drawn for the lift bound property.
pub const SIGN_SAMPLES: usize = 32;

/// Exact verification of the product functional's seven properties over the
/// squaring-chain family with `n` rows:
///
/// 1. normalization `E(1) = 1`;
/// 2./3. the Boolean-ideal generators are annihilated (checked for every
///    set member and pair; these hold by canonical-form evaluation and
///    assert the functional is well defined modulo the ideal);
/// 4. lifts of the first row constraint vanish;
/// 5. lifts of the squaring constraints vanish;
/// 6. `|E(p * q_last)| <= |s| * ||p|| / 2^(2^n)` for the last-row square
///    constraint, checked on set members and on random sign combinations;
/// 7. the moment matrix over `s` is positive semidefinite.
///
/// Products whose per-block projections leave the set of two-member products
/// are outside the functional's domain of guarantees; properties 4-6 skip
/// and report those pairs instead of extending the functional.
pub fn check_product_properties<T: Scalar>(
    n: u32,
    s: &[Monomial],
    seed: u64,
) -> Result<ProductReport, PeError> {
    let idx = ProjectionIndex { blocks: n, cols: 2 * n };
    let blocks: Vec<Pseudoexpectation<T>> = (1..=n)
        .map(|i| {
            let k = T::from_int(n as i64) + T::pow2(-(1i64 << (i - 1)));
            knapsack_pe(2 * n, k)
        })
        .collect::<Result<_, _>>()?;
    let pe = product_pe(blocks, idx)?;
    let space = pe.space();
    let fam = crate::families::QnFamily::new(n);
    let ks = |i: u32| fam.ks::<T>(i);

    // Per-block product sets for the domain discipline: the projection of a
    // raw product monomial must itself be a product of two projections.
    let block_products: Vec<BTreeSet<Monomial>> = (0..n)
        .map(|b| {
            let proj: Vec<Monomial> = s.iter().map(|m| idx.project(m, b)).collect();
            let mut set = BTreeSet::new();
            for a in &proj {
                for b2 in &proj {
                    set.insert(a.mul(b2));
                }
            }
            set
        })
        .collect();
    let in_domain = |p: &Polynomial<T>| -> bool {
        p.monomials().all(|m| (0..n).all(|b| block_products[b as usize].contains(&idx.project(m, b))))
    };

    let mut properties = Vec::new();

    // (i)
    let mut status = PropertyStatus { label: "(i) E(1) = 1", tested: 1, skipped: 0, failures: vec![] };
    let e1 = pe.value(&Polynomial::one());
    if !e1.is_one() {
        status.failures.push(format!("E(1) = {e1}"));
    }
    properties.push(status);

    // (ii), (iii)
    let generator_kinds: [(&'static str, fn(u32) -> Polynomial<T>); 2] = [
        ("(ii) square axioms annihilated", poly::square_generator::<T>),
        ("(iii) twin axioms annihilated", poly::twin_generator::<T>),
    ];
    for (label, generator) in generator_kinds {
        let mut status = PropertyStatus { label, tested: 0, skipped: 0, failures: vec![] };
        for m in s {
            let mp = Polynomial::monomial(m.clone(), T::one());
            for pair in 0..space.n_pairs() {
                status.tested += 1;
                let val = pe.value(&(&mp * &generator(pair)));
                if !val.is_zero() {
                    status.failures.push(format!(
                        "E({} * g[{}]) = {val}",
                        text::monomial_to_text(m, &space),
                        pair + 1
                    ));
                }
            }
        }
        properties.push(status);
    }

    // (iv) first-row constraint, (v) squaring constraints.
    let q1 = &ks(1) - &Polynomial::constant(T::from_ratio(1, 2));
    let mut status =
        PropertyStatus { label: "(iv) first-row lifts vanish", tested: 0, skipped: 0, failures: vec![] };
    check_vanishing(&pe, s, &q1, "I", &space, &in_domain, &mut status);
    properties.push(status);

    let mut status =
        PropertyStatus { label: "(v) squaring lifts vanish", tested: 0, skipped: 0, failures: vec![] };
    for i in 1..n {
        let q = &(&ks(i) * &ks(i)) - &ks(i + 1);
        check_vanishing(&pe, s, &q, &format!("II-{i}"), &space, &in_domain, &mut status);
    }
    properties.push(status);

    // (vi) bound on lifts of the last-row square constraint.
    let q_last = &ks(n) * &ks(n);
    let bound_unit = T::from_int(s.len() as i64) * T::pow2(-(1i64 << n));
    let mut status =
        PropertyStatus { label: "(vi) last-row lift bound", tested: 0, skipped: 0, failures: vec![] };
    let mut testable: Vec<Monomial> = Vec::new();
    for m in s {
        let prod = &Polynomial::monomial(m.clone(), T::one()) * &q_last;
        if in_domain(&prod) {
            testable.push(m.clone());
            status.tested += 1;
            let val = pe.value(&prod);
            if val.abs() > bound_unit {
                status.failures.push(format!(
                    "|E({} * III)| = {} exceeds {bound_unit}",
                    text::monomial_to_text(m, &space),
                    val.abs()
                ));
            }
        } else {
            status.skipped += 1;
        }
    }
    if !testable.is_empty() {
        let mut state = seed;
        for _ in 0..SIGN_SAMPLES {
            let bits = splitmix64(&mut state);
            let p = Polynomial::from_terms(testable.iter().enumerate().map(|(i, m)| {
                let sign = if bits >> (i % 64) & 1 == 1 { T::one() } else { T::one().neg() };
                (m.clone(), sign)
            }));
            status.tested += 1;
            let val = pe.value(&(&p * &q_last));
            if val.abs() > bound_unit {
                status.failures.push(format!(
                    "|E(p * III)| = {} exceeds {bound_unit} for p = {}",
                    val.abs(),
                    p.to_text(&space)
                ));
            }
        }
    }
    properties.push(status);

    // (vii)
    let mut status =
        PropertyStatus { label: "(vii) moment matrix PSD", tested: 1, skipped: 0, failures: vec![] };
    if !moment_matrix(&pe, s).is_psd() {
        status.failures.push("moment matrix is not positive semidefinite".to_string());
    }
    properties.push(status);

    Ok(ProductReport { properties })
}

fn check_vanishing<T: Scalar>(
    pe: &Pseudoexpectation<T>,
    s: &[Monomial],
    q: &Polynomial<T>,
    name: &str,
    space: &VariableSpace,
    in_domain: &impl Fn(&Polynomial<T>) -> bool,
    status: &mut PropertyStatus,
) {
    for m in s {
        let prod = &Polynomial::monomial(m.clone(), T::one()) * q;
        if !in_domain(&prod) {
            status.skipped += 1;
            continue;
        }
        status.tested += 1;
        let val = pe.value(&prod);
        if !val.is_zero() {
            status.failures.push(format!(
                "E({} * {name}) = {val}",
                text::monomial_to_text(m, space)
            ));
        }
    }
}
