//! Sparse multivariate polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::monomial::Monomial;
use crate::scalar::{bitlen_u64, Scalar};
use crate::space::VarId;

/// Total degree, with a dedicated bottom element for the zero polynomial so
/// it never corrupts max-degree metrics.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Degree {
    NegInfinity,
    Of(u64),
}

impl Degree {
    pub fn as_u64_or_zero(self) -> u64 {
        match self {
            Degree::NegInfinity => 0,
            Degree::Of(d) => d,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("assignment is missing pair {0}")]
    MissingAssignment(u32),
}

/// A polynomial as a sparse association from monomials to nonzero
/// coefficients. Two polynomials are equal iff their term maps are identical;
/// all constructors and operations drop zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<T: Scalar> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn var(v: VarId) -> Self {
        Self::monomial(Monomial::var(v), T::one())
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(items: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in items {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&T> {
        self.terms.get(m)
    }

    /// The constant term, zero if absent.
    pub fn constant_term(&self) -> T {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| m.degree())
            .max()
            .map_or(Degree::NegInfinity, Degree::Of)
    }

    /// Largest pair index appearing in any monomial.
    pub fn max_pair(&self) -> Option<u32> {
        self.terms.keys().filter_map(|m| m.max_pair()).max()
    }

    /// Maximum coefficient in absolute value; zero for the zero polynomial.
    pub fn norm_inf(&self) -> T {
        let mut best = T::zero();
        for c in self.terms.values() {
            let a = c.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Encoded size in bits: for every term, the coefficient's reduced
    /// fraction size plus, per variable, the pair index bits, one polarity
    /// bit and the exponent bits. The zero polynomial encodes in 0 bits.
    pub fn bit_size(&self) -> u64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mono: u64 = m
                    .iter()
                    .map(|(v, e)| bitlen_u64(v.pair as u64) + 1 + bitlen_u64(e as u64))
                    .sum();
                c.bit_size() + mono
            })
            .sum()
    }

    /// Largest numerator/denominator binary length over all coefficients.
    pub fn max_component_bits(&self) -> u64 {
        self.terms.values().map(|c| c.component_bits()).max().unwrap_or(0)
    }

    pub fn scale(&self, a: &T) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * a.clone())).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    /// Exact value at a Boolean point; negated twins take `1 - value`.
    pub fn evaluate(&self, assignment: &BTreeMap<u32, bool>) -> Result<T, EvalError> {
        for m in self.terms.keys() {
            for v in m.vars() {
                if !assignment.contains_key(&v.pair) {
                    return Err(EvalError::MissingAssignment(v.pair));
                }
            }
        }
        let mut total = T::zero();
        'terms: for (m, c) in &self.terms {
            for v in m.vars() {
                let bit = assignment[&v.pair] ^ v.negated;
                if !bit {
                    continue 'terms;
                }
            }
            total = total + c.clone();
        }
        Ok(total)
    }

    /// The unique multilinear polynomial in positive twins congruent to
    /// `self` modulo the Boolean ideal: substitutes `~x -> 1 - x`, then caps
    /// every exponent at 1. Membership in the ideal is exactly "the canonical
    /// form is zero".
    pub fn canonical_form(&self) -> Self {
        let mut acc = Self::zero();
        for (m, c) in &self.terms {
            // x^e and (1-x)^e are idempotent modulo the ideal, so only the
            // set of variables matters, not the exponents.
            let mut cur = Self::constant(c.clone());
            for (v, _) in m.iter() {
                let lifted = cur.boolean_mul_var(v.pair);
                cur = if v.negated { &cur - &lifted } else { lifted };
            }
            acc = &acc + &cur;
        }
        acc
    }

    /// Multiplication by `x_pair` in the multilinear quotient ring.
    fn boolean_mul_var(&self, pair: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut factors: Vec<(VarId, u32)> =
                m.iter().filter(|&(v, _)| v.pair != pair).collect();
            factors.push((VarId::pos(pair), 1));
            out.add_term(Monomial::from_factors(factors), c.clone());
        }
        out
    }

    /// Rewrites `self` as an explicit combination over the Boolean ideal
    /// generators plus its canonical form, recording the cofactors.
    pub fn ideal_decompose(&self) -> IdealDecomposition<T> {
        let mut u: BTreeMap<u32, Polynomial<T>> = BTreeMap::new();
        let mut v: BTreeMap<u32, Polynomial<T>> = BTreeMap::new();
        let mut canonical = Polynomial::zero();
        let mut work: Vec<(Monomial, T)> =
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();

        while let Some((m, c)) = work.pop() {
            let first_negated = m.vars().find(|w| w.negated);
            let first_square = m.iter().find(|&(_, e)| e >= 2);
            if let Some(neg) = first_negated {
                // c*~x*w = c*w*(x + ~x - 1) - c*x*w + c*w
                let mut rest: Vec<(VarId, u32)> = m.iter().collect();
                for f in rest.iter_mut() {
                    if f.0 == neg {
                        f.1 -= 1;
                        break;
                    }
                }
                let w = Monomial::from_factors(rest);
                let entry = v.entry(neg.pair).or_insert_with(Polynomial::zero);
                *entry = &*entry + &Polynomial::monomial(w.clone(), c.clone());
                work.push((w.mul(&Monomial::var(VarId::pos(neg.pair))), c.clone().neg()));
                work.push((w, c));
            } else if let Some((sq, e)) = first_square {
                // c*x^e*w = c*x^(e-2)*w*(x^2 - x) + c*x^(e-1)*w
                let rest = m.filter(|w| w != sq);
                let low = rest.mul(&Monomial::var(sq).pow(e - 2));
                let entry = u.entry(sq.pair).or_insert_with(Polynomial::zero);
                *entry = &*entry + &Polynomial::monomial(low, c.clone());
                work.push((rest.mul(&Monomial::var(sq).pow(e - 1)), c));
            } else {
                canonical.add_term(m, c);
            }
        }
        IdealDecomposition { u, v, canonical }
    }
}

/// Result of [`Polynomial::ideal_decompose`]: cofactors `u` against the
/// square generators and `v` against the twin generators, per pair, plus the
/// multilinear remainder.
#[derive(Clone, Debug)]
pub struct IdealDecomposition<T: Scalar> {
    pub u: BTreeMap<u32, Polynomial<T>>,
    pub v: BTreeMap<u32, Polynomial<T>>,
    pub canonical: Polynomial<T>,
}

impl<T: Scalar> IdealDecomposition<T> {
    /// Reassembles `sum u*(x^2-x) + sum v*(x+~x-1) + canonical`.
    pub fn recompose(&self) -> Polynomial<T> {
        let mut acc = self.canonical.clone();
        for (&pair, cof) in &self.u {
            acc = &acc + &(cof * &square_generator(pair));
        }
        for (&pair, cof) in &self.v {
            acc = &acc + &(cof * &twin_generator(pair));
        }
        acc
    }
}

/// `x^2 - x` for the given pair.
pub fn square_generator<T: Scalar>(pair: u32) -> Polynomial<T> {
    let x = VarId::pos(pair);
    Polynomial::from_terms([
        (Monomial::var(x).pow(2), T::one()),
        (Monomial::var(x), T::one().neg()),
    ])
}

/// `x + ~x - 1` for the given pair.
pub fn twin_generator<T: Scalar>(pair: u32) -> Polynomial<T> {
    Polynomial::from_terms([
        (Monomial::var(VarId::pos(pair)), T::one()),
        (Monomial::var(VarId::neg(pair)), T::one()),
        (Monomial::one(), T::one().neg()),
    ])
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone().neg());
        }
        out
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone().neg())).collect(),
        }
    }
}

impl<T: Scalar> Neg for Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Poly, Rat};

    fn x(p: u32) -> Poly {
        Poly::var(VarId::pos(p))
    }

    fn nx(p: u32) -> Poly {
        Poly::var(VarId::neg(p))
    }

    fn c(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn add_cancels_constants() {
        // (x1 + 1) + (~x1 - 1) = x1 + ~x1
        let lhs = &(&x(0) + &Poly::one()) + &(&nx(0) - &Poly::one());
        assert_eq!(lhs, &x(0) + &nx(0));
    }

    #[test]
    fn add_identity_and_exact_fractions() {
        let p = &x(0).scale(&c(1, 2)) + &Poly::constant(c(7, 3));
        assert_eq!(&p + &Poly::zero(), p);
        let q = &x(0).scale(&c(1, 2)) + &x(0).scale(&c(1, 3));
        assert_eq!(q, x(0).scale(&c(5, 6)));
    }

    #[test]
    fn binomial_square() {
        // (x1 - 1/2)^2 = x1^2 - x1 + 1/4
        let p = &x(0) - &Poly::constant(c(1, 2));
        let sq = &p * &p;
        let expected = Poly::from_terms([
            (Monomial::var(VarId::pos(0)).pow(2), c(1, 1)),
            (Monomial::var(VarId::pos(0)), c(-1, 1)),
            (Monomial::one(), c(1, 4)),
        ]);
        assert_eq!(sq, expected);
    }

    #[test]
    fn mul_identity_and_no_reduction() {
        let p = &(&x(0) * &x(1)) + &nx(0).scale(&c(3, 1));
        assert_eq!(&p * &Poly::one(), p);
        // x * ~x stays a genuine degree-2 monomial; mul never reduces.
        let m = &x(0) * &nx(0);
        assert_eq!(m.degree(), Degree::Of(2));
        assert_eq!(m.num_terms(), 1);
    }

    #[test]
    fn scale_covers_huge_and_degenerate_factors() {
        // 2^(2^3) * 1/2^(2^3) = 1
        let p = Poly::constant(Rat::pow2(-8));
        assert_eq!(p.scale(&Rat::pow2(8)), Poly::one());
        assert_eq!(p.scale(&Rat::from_int(0)), Poly::zero());
        let q = &x(0) - &Poly::one();
        assert_eq!(q.scale(&c(-1, 1)), &Poly::one() - &x(0));
    }

    #[test]
    fn canonical_form_kills_generators() {
        let twin = &(&x(0) + &nx(0)) - &Poly::one();
        assert!(twin.canonical_form().is_zero());
        let sq = Poly::monomial(Monomial::var(VarId::pos(0)).pow(2), c(1, 1));
        assert_eq!(sq.canonical_form(), x(0));
        let prod = &x(0) * &nx(0);
        assert!(prod.canonical_form().is_zero());
    }

    #[test]
    fn canonical_form_is_idempotent_here() {
        let p = &(&x(0) * &nx(1)).scale(&c(3, 2)) + &nx(0).scale(&c(-2, 1));
        let once = p.canonical_form();
        assert_eq!(once.canonical_form(), once);
    }

    #[test]
    fn ideal_decompose_reassembles_exactly() {
        let p = &(&(&x(0) * &nx(0)) * &x(1)).scale(&c(5, 3))
            - &Poly::monomial(Monomial::var(VarId::neg(1)).pow(3), c(7, 2));
        let d = p.ideal_decompose();
        assert_eq!(d.recompose(), p);
        assert_eq!(d.canonical, p.canonical_form());
    }

    #[test]
    fn norm_inf_examples() {
        let p = &x(0).scale(&c(3, 1)) - &Poly::constant(c(5, 1));
        assert_eq!(p.norm_inf(), c(5, 1));
        assert_eq!(Poly::zero().norm_inf(), c(0, 1));
    }

    #[test]
    fn norm_of_expanded_knapsack_square() {
        // (x1 + x2 - 1)^2 has max |coefficient| 2.
        let ks = &(&x(0) + &x(1)) - &Poly::one();
        assert_eq!((&ks * &ks).norm_inf(), c(2, 1));
    }

    #[test]
    fn bit_size_examples() {
        assert_eq!(Poly::zero().bit_size(), 0);
        // Constant 2^16: 17 numerator bits + 1 denominator bit + sign.
        assert_eq!(Poly::constant(Rat::pow2(16)).bit_size(), 19);
        let small = Poly::constant(c(3, 1));
        let doubled = Poly::constant(c(6, 1));
        assert!(doubled.bit_size() > small.bit_size());
    }

    #[test]
    fn evaluate_examples() {
        let twin = &(&x(0) + &nx(0)) - &Poly::one();
        for bits in [false, true] {
            let a = BTreeMap::from([(0, bits)]);
            assert_eq!(twin.evaluate(&a).unwrap(), c(0, 1));
        }
        let ks = &(&x(0) + &x(1)) - &Poly::one();
        let ones = BTreeMap::from([(0, true), (1, true)]);
        assert_eq!(ks.evaluate(&ones).unwrap(), c(1, 1));
        assert_eq!(Poly::one().evaluate(&BTreeMap::new()).unwrap(), c(1, 1));
        assert_eq!(
            ks.evaluate(&BTreeMap::from([(0, true)])),
            Err(EvalError::MissingAssignment(1))
        );
    }

    #[test]
    fn degree_of_zero_is_bottom() {
        assert_eq!(Poly::zero().degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Of(0));
    }
}
