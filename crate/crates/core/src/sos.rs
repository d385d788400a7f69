//! Sums-of-squares certificates: a single polynomial identity
//!
//! ```text
//! target = sum_i lambda_i * r_i^2
//!        + sum_q t_q * q
//!        + sum_p ( u_p * (x_p^2 - x_p) + v_p * (x_p + ~x_p - 1) )
//! ```
//!
//! checked as an exact identity. Weighted squares with rational
//! `lambda_i >= 0` stand in for plain squares so that every stored number
//! stays rational (`sqrt(lambda_i) * r_i` would not); mathematically the
//! right-hand side is still a sum of squares plus lifts.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::families::ConstraintSystem;
use crate::monomial::Monomial;
use crate::poly::{self, Degree, Polynomial};
use crate::scalar::Scalar;
use crate::space::VariableSpace;
use crate::text::{self, ParseError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SosCertificate<T: Scalar> {
    pub system: ConstraintSystem<T>,
    /// `(lambda, r)` summands `lambda * r^2`; weights must be nonnegative.
    pub weighted_squares: Vec<(T, Polynomial<T>)>,
    /// Lift per non-logical axiom, keyed by constraint name.
    pub axiom_lifts: BTreeMap<String, Polynomial<T>>,
    /// Lifts `(u, v)` of the logical axioms, keyed by pair.
    pub boolean_lifts: BTreeMap<u32, (Polynomial<T>, Polynomial<T>)>,
    pub target: Polynomial<T>,
}

impl<T: Scalar> SosCertificate<T> {
    pub fn space(&self) -> &VariableSpace {
        self.system.space()
    }

    pub fn empty(system: ConstraintSystem<T>, target: Polynomial<T>) -> Self {
        SosCertificate {
            system,
            weighted_squares: Vec::new(),
            axiom_lifts: BTreeMap::new(),
            boolean_lifts: BTreeMap::new(),
            target,
        }
    }

    pub fn is_refutation(&self) -> bool {
        self.target == Polynomial::constant(T::one().neg())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SosFailure<T: Scalar> {
    #[error("square {index} has a negative weight")]
    NegativeWeight { index: usize },
    #[error("lift refers to unknown constraint `{name}`")]
    UnknownConstraint { name: String },
    #[error("identity does not close; residual (target - rhs) is `{residual_text}`")]
    Residual { residual: Polynomial<T>, residual_text: String },
}

/// Assembles the right-hand side of the certificate identity.
fn assemble_rhs<T: Scalar>(cert: &SosCertificate<T>) -> Result<Polynomial<T>, SosFailure<T>> {
    let mut rhs = Polynomial::zero();
    for (i, (lambda, r)) in cert.weighted_squares.iter().enumerate() {
        if lambda.is_negative() {
            return Err(SosFailure::NegativeWeight { index: i });
        }
        rhs = &rhs + &(&(r * r)).scale(lambda);
    }
    for (name, t) in &cert.axiom_lifts {
        let q = cert
            .system
            .get(name)
            .ok_or_else(|| SosFailure::UnknownConstraint { name: name.clone() })?;
        rhs = &rhs + &(t * q);
    }
    for (&pair, (u, v)) in &cert.boolean_lifts {
        rhs = &rhs + &(u * &poly::square_generator::<T>(pair));
        rhs = &rhs + &(v * &poly::twin_generator::<T>(pair));
    }
    Ok(rhs)
}

/// Exact identity check; on failure the full residual polynomial
/// `target - rhs` is reported.
pub fn verify_sos<T: Scalar>(cert: &SosCertificate<T>) -> Result<(), SosFailure<T>> {
    let rhs = assemble_rhs(cert)?;
    let residual = &cert.target - &rhs;
    if residual.is_zero() {
        Ok(())
    } else {
        let residual_text = residual.to_text(cert.space());
        Err(SosFailure::Residual { residual, residual_text })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SosMetrics<T: Scalar> {
    pub degree: u64,
    pub distinct_explicit_monomials: u64,
    pub distinct_significant_monomials: u64,
    pub monomial_size: u64,
    pub bit_complexity: u64,
    /// `||t_q * q||` per lifted constraint.
    pub lift_norms: BTreeMap<String, T>,
}

/// Measures a certificate; the certificate is verified first.
///
/// The counted written proof consists of the squares, the lifts together
/// with the axioms they multiply, and the logical-axiom polynomials behind
/// nonzero Boolean lifts; the monomials of the lifted axioms are explicit
/// (they appear in the written identity) but not significant.
pub fn sos_metrics<T: Scalar>(cert: &SosCertificate<T>) -> Result<SosMetrics<T>, SosFailure<T>> {
    verify_sos(cert)?;

    let mut degree = Degree::NegInfinity;
    let mut explicit: BTreeSet<Monomial> = BTreeSet::new();
    let mut significant: BTreeSet<Monomial> = BTreeSet::new();
    let mut monomial_size = 0u64;
    let mut bit_complexity = cert.target.bit_size();
    let mut lift_norms = BTreeMap::new();

    let absorb = |poly: &Polynomial<T>,
                      sig: bool,
                      explicit: &mut BTreeSet<Monomial>,
                      significant: &mut BTreeSet<Monomial>,
                      monomial_size: &mut u64,
                      bit_complexity: &mut u64| {
        for (m, _) in poly.iter() {
            explicit.insert(m.clone());
            if sig {
                significant.insert(m.clone());
            }
        }
        *monomial_size += poly.num_terms() as u64;
        *bit_complexity += poly.bit_size();
    };

    for (lambda, r) in &cert.weighted_squares {
        if let Degree::Of(d) = r.degree() {
            degree = degree.max(Degree::Of(d * 2));
        }
        bit_complexity += lambda.bit_size();
        absorb(r, true, &mut explicit, &mut significant, &mut monomial_size, &mut bit_complexity);
    }

    for (name, t) in &cert.axiom_lifts {
        if t.is_zero() {
            continue;
        }
        let q = cert.system.get(name).expect("verified certificate");
        let product = t * q;
        if let Degree::Of(d) = product.degree() {
            degree = degree.max(Degree::Of(d));
        }
        lift_norms.insert(name.clone(), product.norm_inf());
        absorb(t, true, &mut explicit, &mut significant, &mut monomial_size, &mut bit_complexity);
        absorb(q, false, &mut explicit, &mut significant, &mut monomial_size, &mut bit_complexity);
    }

    for (&pair, (u, v)) in &cert.boolean_lifts {
        for (lift, gen) in [
            (u, poly::square_generator::<T>(pair)),
            (v, poly::twin_generator::<T>(pair)),
        ] {
            if lift.is_zero() {
                continue;
            }
            if let Degree::Of(d) = (lift * &gen).degree() {
                degree = degree.max(Degree::Of(d));
            }
            absorb(lift, false, &mut explicit, &mut significant, &mut monomial_size, &mut bit_complexity);
            absorb(&gen, false, &mut explicit, &mut significant, &mut monomial_size, &mut bit_complexity);
        }
    }

    Ok(SosMetrics {
        degree: degree.as_u64_or_zero(),
        distinct_explicit_monomials: explicit.len() as u64,
        distinct_significant_monomials: significant.len() as u64,
        monomial_size,
        bit_complexity,
        lift_norms,
    })
}

/// Largest numerator/denominator binary length over everything the
/// certificate writes down (weights, squares, lifts, lifted axioms, target).
pub fn max_component_bits<T: Scalar>(cert: &SosCertificate<T>) -> u64 {
    let mut bits = cert.target.max_component_bits();
    for (lambda, r) in &cert.weighted_squares {
        bits = bits.max(lambda.component_bits()).max(r.max_component_bits());
    }
    for (name, t) in &cert.axiom_lifts {
        if t.is_zero() {
            continue;
        }
        bits = bits.max(t.max_component_bits());
        if let Some(q) = cert.system.get(name) {
            bits = bits.max(q.max_component_bits());
        }
    }
    for (u, v) in cert.boolean_lifts.values() {
        bits = bits.max(u.max_component_bits()).max(v.max_component_bits());
    }
    bits
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DegreeCriterionError {
    #[error("refutation degree {d} is below the threshold k + 4 = {min}")]
    DegreeTooSmall { d: u64, min: u64 },
}

/// A rational interval `[lo, hi]` certified to contain the true value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Enclosure<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Enclosure<T> {
    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }
}

/// Lower bound on the number of distinct significant monomials any
/// refutation needs, as a function of the minimum refutation degree:
/// `exp((d - k - 4)^2 / (32 (n + 1)))` over `n` pairs with constraint
/// degree at most `k`. Returned as a rational enclosure of width at most
/// `1/1024`; the enclosure's lower end is the usable bound.
pub fn degree_criterion_bound<T: Scalar>(
    n_pairs: u32,
    k: u64,
    d: u64,
) -> Result<Enclosure<T>, DegreeCriterionError> {
    if d < k + 4 {
        return Err(DegreeCriterionError::DegreeTooSmall { d, min: k + 4 });
    }
    let num = (d - k - 4) * (d - k - 4);
    let den = 32 * (n_pairs as u64 + 1);
    let x = T::from_ratio(num as i64, den as i64);
    Ok(exp_enclosure(x, T::from_ratio(1, 1024)))
}

/// Certified enclosure of `exp(x)` for `x >= 0` with width at most
/// `max_width`: argument scaling by powers of two, exact Taylor partial
/// sums, and a geometric tail bound.
fn exp_enclosure<T: Scalar>(x: T, max_width: T) -> Enclosure<T> {
    assert!(!x.is_negative());
    if x.is_zero() {
        return Enclosure { lo: T::one(), hi: T::one() };
    }
    // Halve until the argument is at most 1/2, then square back up.
    let mut shifts = 0u32;
    let mut y = x;
    let half = T::from_ratio(1, 2);
    while y > half {
        y = y * half.clone();
        shifts += 1;
    }
    let mut terms = 8usize;
    loop {
        let mut sum = T::one();
        let mut power = T::one();
        let mut factorial = T::one();
        for j in 1..terms {
            power = power * y.clone();
            factorial = factorial * T::from_int(j as i64);
            sum = sum + power.clone() / factorial.clone();
        }
        // Tail: y^terms / terms! * 1/(1 - y) <= 2 * y^terms / terms!.
        let tail = power * y.clone() / (factorial * T::from_int(terms as i64))
            * T::from_int(2);
        let mut lo = sum.clone();
        let mut hi = sum + tail;
        for _ in 0..shifts {
            lo = lo.clone() * lo;
            hi = hi.clone() * hi;
        }
        if hi.clone() - lo.clone() <= max_width {
            return Enclosure { lo, hi };
        }
        terms += 4;
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BoundCertError {
    #[error("the monomial set must contain 1")]
    MissingUnit,
    #[error("monomial `{0}` of the input is not a product of two set members")]
    NotOverProducts(String),
}

/// Constructive upper-bound certificates: given `p` whose monomials all are
/// products of two members of `s`, produces `r >= 0` and a certificate that
/// `r - p` is nonnegative (an identity with no constraint lifts). All
/// significant monomials of the produced certificate lie in `s` up to the
/// sums/differences used by the square gadgets.
///
/// Per term `a * mu` the gadget is:
/// * `mu = 1`: positive terms raise the bound, negative terms become a
///   weighted square of 1;
/// * `mu` in `s` (or `mu = m^2`): `-a*m = (-a)*m^2 (mod ideal)` for `a < 0`,
///   and `a - a*m = a*(1-m)^2 (mod ideal)` for `a > 0`;
/// * `mu = m1*m2`: `-a*(m1+m2)^2` resp. `a*(m1-m2)^2` plus the single-factor
///   gadgets, each contributing `|a|/2`.
///
/// The corrections that make the identity exact rather than modulo the ideal
/// are recovered afterwards by cofactor-recording reduction and stored as the
/// certificate's Boolean lifts.
pub fn bound_certificate<T: Scalar>(
    p: &Polynomial<T>,
    s: &[Monomial],
    space: &VariableSpace,
) -> Result<(T, SosCertificate<T>), BoundCertError> {
    let set: BTreeSet<Monomial> = s.iter().cloned().collect();
    if !set.contains(&Monomial::one()) {
        return Err(BoundCertError::MissingUnit);
    }

    let mut bound = T::zero();
    let mut squares: Vec<(T, Polynomial<T>)> = Vec::new();

    for (mu, a) in p.iter() {
        let negative = a.is_negative();
        let mag = a.abs();
        if mu.is_one() {
            if negative {
                squares.push((mag, Polynomial::one()));
            } else {
                bound = bound + mag;
            }
            continue;
        }
        if let Some(m) = single_factor(&set, mu) {
            if negative {
                squares.push((mag, Polynomial::monomial(m, T::one())));
            } else {
                let one_minus = &Polynomial::one() - &Polynomial::monomial(m, T::one());
                bound = bound + mag.clone();
                squares.push((mag, one_minus));
            }
            continue;
        }
        match pair_factors(&set, mu) {
            Some((m1, m2)) => {
                let p1 = Polynomial::monomial(m1, T::one());
                let p2 = Polynomial::monomial(m2, T::one());
                let half_mag = mag.clone() * T::from_ratio(1, 2);
                let mixed = if negative { &p1 + &p2 } else { &p1 - &p2 };
                squares.push((half_mag.clone(), mixed));
                squares.push((half_mag.clone(), &Polynomial::one() - &p1));
                squares.push((half_mag, &Polynomial::one() - &p2));
                bound = bound + mag;
            }
            None => {
                return Err(BoundCertError::NotOverProducts(text::monomial_to_text(mu, space)))
            }
        }
    }

    let target = &Polynomial::constant(bound.clone()) - p;
    let mut rhs_squares = Polynomial::zero();
    for (lambda, r) in &squares {
        rhs_squares = &rhs_squares + &(&(r * r)).scale(lambda);
    }
    let correction = &target - &rhs_squares;
    let decomposition = correction.ideal_decompose();
    assert!(
        decomposition.canonical.is_zero(),
        "bound gadgets must close modulo the Boolean ideal"
    );

    let mut boolean_lifts: BTreeMap<u32, (Polynomial<T>, Polynomial<T>)> = BTreeMap::new();
    for (pair, u) in decomposition.u {
        boolean_lifts.entry(pair).or_insert_with(|| (Polynomial::zero(), Polynomial::zero())).0 = u;
    }
    for (pair, v) in decomposition.v {
        boolean_lifts.entry(pair).or_insert_with(|| (Polynomial::zero(), Polynomial::zero())).1 = v;
    }

    let cert = SosCertificate {
        system: ConstraintSystem::new(space.clone()),
        weighted_squares: squares,
        axiom_lifts: BTreeMap::new(),
        boolean_lifts,
        target,
    };
    Ok((bound, cert))
}

/// `mu` itself when it is a set member; prefers the tight single-factor
/// gadget over a pair decomposition.
fn single_factor(set: &BTreeSet<Monomial>, mu: &Monomial) -> Option<Monomial> {
    if set.contains(mu) {
        return Some(mu.clone());
    }
    // A member's square also admits the single-square gadget.
    set.iter().find(|m| m.mul(m) == *mu).cloned()
}

fn pair_factors(set: &BTreeSet<Monomial>, mu: &Monomial) -> Option<(Monomial, Monomial)> {
    for m1 in set {
        for m2 in set {
            if m1.mul(m2) == *mu {
                return Some((m1.clone(), m2.clone()));
            }
        }
    }
    None
}

/// Header of a certificate file: the variable space and an optional
/// constraint-system reference.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SosFileHeader {
    pub pairs: u32,
    pub grid: Option<(u32, u32)>,
    pub system: Option<String>,
}

impl SosFileHeader {
    pub fn space(&self) -> VariableSpace {
        match self.grid {
            Some((r, c)) => VariableSpace::grid(r, c),
            None => VariableSpace::new(self.pairs),
        }
    }
}

pub fn certificate_header(input: &str) -> Result<SosFileHeader, ParseError> {
    let mut pairs = None;
    let mut grid = None;
    let mut system = None;
    for line in input.lines() {
        let line = line.trim();
        if line.starts_with('[') {
            break;
        }
        if let Some(rest) = line.strip_prefix("pairs:") {
            pairs = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| ParseError::Other(format!("malformed pairs header `{rest}`")))?,
            );
        } else if let Some(rest) = line.strip_prefix("grid:") {
            let nums: Vec<u32> =
                rest.split_whitespace().filter_map(|w| w.parse().ok()).collect();
            if nums.len() != 2 {
                return Err(ParseError::Other(format!("malformed grid header `{rest}`")));
            }
            grid = Some((nums[0], nums[1]));
        } else if let Some(rest) = line.strip_prefix("system:") {
            let rest = rest.trim();
            if !rest.is_empty() && rest != "-" {
                system = Some(rest.to_string());
            }
        }
    }
    let pairs = pairs.ok_or_else(|| ParseError::Other("missing `pairs:` header".into()))?;
    Ok(SosFileHeader { pairs, grid, system })
}

pub fn certificate_to_text<T: Scalar>(cert: &SosCertificate<T>, system_ref: Option<&str>) -> String {
    let space = cert.space();
    let mut out = String::new();
    out.push_str(&format!("pairs: {}\n", space.n_pairs()));
    if let Some((r, c)) = space.grid_shape() {
        out.push_str(&format!("grid: {r} {c}\n"));
    }
    out.push_str(&format!("system: {}\n", system_ref.unwrap_or("-")));
    out.push_str("[SQUARES]\n");
    for (lambda, r) in &cert.weighted_squares {
        out.push_str(&format!("{lambda} | {}\n", r.to_text(space)));
    }
    out.push_str("[LIFTS]\n");
    for (name, t) in &cert.axiom_lifts {
        out.push_str(&format!("{name} | {}\n", t.to_text(space)));
    }
    out.push_str("[BOOL-LIFTS]\n");
    for (&pair, (u, v)) in &cert.boolean_lifts {
        let tok = match space.coords(pair) {
            Some((i, j)) => format!("{},{}", i + 1, j + 1),
            None => format!("{}", pair + 1),
        };
        out.push_str(&format!("{tok} | {} | {}\n", u.to_text(space), v.to_text(space)));
    }
    out.push_str("[TARGET]\n");
    out.push_str(&format!("{}\n", cert.target.to_text(space)));
    out
}

pub fn parse_certificate<T: Scalar>(
    input: &str,
    system: ConstraintSystem<T>,
) -> Result<SosCertificate<T>, ParseError> {
    let space = system.space().clone();
    let mut cert = SosCertificate::empty(system, Polynomial::zero());

    #[derive(PartialEq)]
    enum Section {
        Header,
        Squares,
        Lifts,
        BoolLifts,
        Target,
    }
    let mut section = Section::Header;
    let mut saw_target = false;

    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[SQUARES]" => {
                section = Section::Squares;
                continue;
            }
            "[LIFTS]" => {
                section = Section::Lifts;
                continue;
            }
            "[BOOL-LIFTS]" => {
                section = Section::BoolLifts;
                continue;
            }
            "[TARGET]" => {
                section = Section::Target;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Header => continue,
            Section::Squares => {
                let (lambda, r) = line
                    .split_once('|')
                    .ok_or_else(|| ParseError::Other(format!("malformed square line `{line}`")))?;
                cert.weighted_squares.push((
                    text::parse_scalar(lambda)?,
                    text::parse_poly(r, &space)?,
                ));
            }
            Section::Lifts => {
                let (name, t) = line
                    .split_once('|')
                    .ok_or_else(|| ParseError::Other(format!("malformed lift line `{line}`")))?;
                cert.axiom_lifts.insert(name.trim().to_string(), text::parse_poly(t, &space)?);
            }
            Section::BoolLifts => {
                let mut parts = line.splitn(3, '|');
                let (tok, u, v) = match (parts.next(), parts.next(), parts.next()) {
                    (Some(a), Some(b), Some(c)) => (a.trim(), b, c),
                    _ => {
                        return Err(ParseError::Other(format!(
                            "malformed boolean lift line `{line}`"
                        )))
                    }
                };
                let pair = parse_pair(tok, &space)?;
                cert.boolean_lifts.insert(
                    pair,
                    (text::parse_poly(u, &space)?, text::parse_poly(v, &space)?),
                );
            }
            Section::Target => {
                cert.target = text::parse_poly(line, &space)?;
                saw_target = true;
            }
        }
    }
    if !saw_target {
        return Err(ParseError::Other("missing [TARGET] section".into()));
    }
    Ok(cert)
}

fn parse_pair(tok: &str, space: &VariableSpace) -> Result<u32, ParseError> {
    let parse_num = |s: &str| -> Result<u32, ParseError> {
        s.trim().parse().map_err(|_| ParseError::Other(format!("bad pair `{tok}`")))
    };
    match tok.split_once(',') {
        Some((i, j)) => {
            let (i, j) = (parse_num(i)?, parse_num(j)?);
            let (rows, cols) = space.grid_shape().ok_or(ParseError::NoGrid)?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(ParseError::Other(format!("pair `{tok}` is off the grid")));
            }
            Ok(space.pair_at(i - 1, j - 1))
        }
        None => {
            let p = parse_num(tok)?;
            if p == 0 || p > space.n_pairs() {
                return Err(ParseError::Other(format!("pair `{tok}` is out of range")));
            }
            Ok(p - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate_qn_sos_refutation, qn_system, QnFamily};
    use crate::space::VarId;
    use crate::{Poly, Rat};
    use num_traits::One;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn hand_expanded_identity_for_the_smallest_instance() {
        // -1 = 4*(ks1 - 1/2)^2 + 4*(ks1 - 1/2) - 4*ks1^2.
        let system = qn_system::<Rat>(1);
        let fam = QnFamily::new(1);
        let r = &fam.ks::<Rat>(1) - &Poly::constant(rat(1, 2));
        let mut axiom_lifts = BTreeMap::new();
        axiom_lifts.insert("I".to_string(), Poly::constant(rat(4, 1)));
        axiom_lifts.insert("III".to_string(), Poly::constant(rat(-4, 1)));
        let cert = SosCertificate {
            system,
            weighted_squares: vec![(rat(4, 1), r)],
            axiom_lifts,
            boolean_lifts: BTreeMap::new(),
            target: Poly::constant(rat(-1, 1)),
        };
        assert_eq!(verify_sos(&cert), Ok(()));
        assert_eq!(cert, generate_qn_sos_refutation::<Rat>(1));
    }

    #[test]
    fn generated_certificates_verify() {
        for n in 1..=4 {
            let cert = generate_qn_sos_refutation::<Rat>(n);
            assert_eq!(verify_sos(&cert), Ok(()), "n={n}");
            assert!(cert.is_refutation());
        }
    }

    #[test]
    fn perturbed_weight_reports_the_residual() {
        let mut cert = generate_qn_sos_refutation::<Rat>(1);
        cert.weighted_squares[0].0 += Rat::one();
        match verify_sos(&cert) {
            Err(SosFailure::Residual { residual, .. }) => {
                // The residual is exactly -r^2 for the perturbed square.
                let r = &cert.weighted_squares[0].1;
                assert_eq!(residual, -&(r * r));
            }
            other => panic!("expected residual failure, got {other:?}"),
        }
    }

    #[test]
    fn empty_certificate_with_zero_target_verifies() {
        let system = qn_system::<Rat>(1);
        let cert = SosCertificate::empty(system, Poly::zero());
        assert_eq!(verify_sos(&cert), Ok(()));
    }

    #[test]
    fn negative_weight_is_rejected() {
        let mut cert = generate_qn_sos_refutation::<Rat>(1);
        cert.weighted_squares[0].0 = rat(-4, 1);
        assert!(matches!(verify_sos(&cert), Err(SosFailure::NegativeWeight { index: 0 })));
    }

    #[test]
    fn generated_metrics() {
        for n in 1..=4u32 {
            let cert = generate_qn_sos_refutation::<Rat>(n);
            let m = sos_metrics(&cert).unwrap();
            assert_eq!(m.degree, 2, "n={n}");
            // Significant monomials: the grid variables plus the constant.
            assert_eq!(m.distinct_significant_monomials, (2 * n * n + 1) as u64);
            assert!(m.distinct_significant_monomials <= (2 * n * n + 2) as u64);
            assert!(m.distinct_significant_monomials <= m.distinct_explicit_monomials);
            assert!(m.distinct_explicit_monomials <= m.monomial_size);
            // The lift of constraint III is exactly -2^(2^n).
            let t3 = cert.axiom_lifts.get("III").unwrap();
            assert_eq!(t3.norm_inf(), Rat::pow2(1 << n));
        }
    }

    #[test]
    fn degree_criterion_examples() {
        // 20 pairs, constraint degree 1, refutation degree 20:
        // exp(225/672), about 1.3977.
        let e = degree_criterion_bound::<Rat>(20, 1, 20).unwrap();
        assert!(e.lo >= rat(139, 100) && e.hi <= rat(140, 100), "{e:?}");
        assert!(e.width() <= rat(1, 1000));

        let one = degree_criterion_bound::<Rat>(20, 1, 5).unwrap();
        assert_eq!(one.lo, rat(1, 1));
        assert_eq!(one.hi, rat(1, 1));

        assert!(degree_criterion_bound::<Rat>(20, 1, 4).is_err());

        // Strictly monotone in d at fixed n, k.
        let mut prev = rat(0, 1);
        for d in [5u64, 8, 12, 20, 30] {
            let e = degree_criterion_bound::<Rat>(10, 1, d).unwrap();
            assert!(e.lo > prev);
            prev = e.lo;
        }
    }

    #[test]
    fn bound_certificate_single_negative_term() {
        let space = VariableSpace::new(1);
        let m = Monomial::var(VarId::pos(0));
        let s = vec![Monomial::one(), m.clone()];
        let p = Poly::monomial(m, rat(-3, 1));
        let (r, cert) = bound_certificate(&p, &s, &space).unwrap();
        assert_eq!(r, rat(0, 1));
        assert_eq!(verify_sos(&cert), Ok(()));
        // One square: 3 * x^2, congruent to 3x.
        assert_eq!(cert.weighted_squares.len(), 1);
        assert_eq!(cert.weighted_squares[0].0, rat(3, 1));
    }

    #[test]
    fn bound_certificate_of_zero_is_empty() {
        let space = VariableSpace::new(1);
        let s = vec![Monomial::one()];
        let (r, cert) = bound_certificate(&Poly::zero(), &s, &space).unwrap();
        assert_eq!(r, rat(0, 1));
        assert!(cert.weighted_squares.is_empty());
        assert!(cert.boolean_lifts.is_empty());
        assert_eq!(verify_sos(&cert), Ok(()));
    }

    #[test]
    fn bound_certificate_rejects_foreign_monomials() {
        let space = VariableSpace::new(2);
        let s = vec![Monomial::one(), Monomial::var(VarId::pos(0))];
        let p = Poly::var(VarId::pos(1));
        assert!(matches!(
            bound_certificate(&p, &s, &space),
            Err(BoundCertError::NotOverProducts(_))
        ));
        assert!(matches!(
            bound_certificate(&p, &[Monomial::var(VarId::pos(1))], &space),
            Err(BoundCertError::MissingUnit)
        ));
    }

    #[test]
    fn certificate_file_round_trip() {
        for n in 1..=2u32 {
            let cert = generate_qn_sos_refutation::<Rat>(n);
            let text = certificate_to_text(&cert, Some("sys.txt"));
            let header = certificate_header(&text).unwrap();
            assert_eq!(header.pairs, 2 * n * n);
            assert_eq!(header.system.as_deref(), Some("sys.txt"));
            let back = parse_certificate::<Rat>(&text, cert.system.clone()).unwrap();
            assert_eq!(back, cert);
            assert_eq!(certificate_to_text(&back, Some("sys.txt")), text);
        }
    }
}
