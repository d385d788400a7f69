//! Sparse monomials over twin variables.

use std::cmp::Ordering;

use crate::space::VarId;

/// A product of variables with positive integer exponents, stored sparsely
/// as a sorted `(variable, exponent)` list. The empty product is `1`.
///
/// The derived notion of size is graded lexicographic: compare total degree
/// first, then exponents along the global variable order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    factors: Vec<(VarId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn var(v: VarId) -> Self {
        Monomial { factors: vec![(v, 1)] }
    }

    /// Builds a monomial from arbitrary factors: merges duplicates, drops
    /// zero exponents, sorts by variable.
    pub fn from_factors(factors: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut fs: Vec<(VarId, u32)> = Vec::new();
        for (v, e) in factors {
            if e == 0 {
                continue;
            }
            fs.push((v, e));
        }
        fs.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(VarId, u32)> = Vec::with_capacity(fs.len());
        for (v, e) in fs {
            match merged.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { factors: merged }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.factors
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.factors.iter().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.factors.iter().map(|&(v, _)| v)
    }

    /// Largest pair index used, if any.
    pub fn max_pair(&self) -> Option<u32> {
        self.factors.iter().map(|&(v, _)| v.pair).max()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut a, mut b) = (self.factors.iter().peekable(), other.factors.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((va, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => {
                    out.extend(a.by_ref().copied());
                    break;
                }
                (None, Some(_)) => {
                    out.extend(b.by_ref().copied());
                    break;
                }
                (None, None) => break,
            }
        }
        Monomial { factors: out }
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial { factors: self.factors.iter().map(|&(v, x)| (v, x * e)).collect() }
    }

    /// True when every exponent is 1 and every variable is a positive twin.
    pub fn is_multilinear_positive(&self) -> bool {
        self.factors.iter().all(|&(v, e)| e == 1 && !v.negated)
    }

    /// Keeps only the variables selected by the predicate.
    pub fn filter(&self, keep: impl Fn(VarId) -> bool) -> Monomial {
        Monomial { factors: self.factors.iter().copied().filter(|&(v, _)| keep(v)).collect() }
    }

    /// Applies a variable renaming; factors are re-sorted.
    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Monomial {
        Monomial::from_factors(self.factors.iter().map(|&(v, e)| (f(v), e)))
    }
}

/// All multilinear monomials in positive twins over `pairs` variables with
/// degree at most `max_degree`, ascending in the graded-lex order (so the
/// constant monomial comes first).
pub fn multilinear_monomials(pairs: u32, max_degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for support in &frontier {
            let start = support.last().map_or(0, |&p| p + 1);
            for p in start..pairs {
                let mut grown = support.clone();
                grown.push(p);
                out.push(Monomial::from_factors(grown.iter().map(|&q| (VarId::pos(q), 1))));
                next.push(grown);
            }
        }
        frontier = next;
    }
    out.sort();
    out
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Lexicographic tie-break: the first variable (in global order) where
        // the exponents differ decides; the higher exponent is the larger
        // monomial.
        let (mut a, mut b) = (self.factors.iter().peekable(), other.factors.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match ea.cmp(&eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (None, None) => return Ordering::Equal,
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(p: u32) -> Monomial {
        Monomial::var(VarId::pos(p))
    }

    #[test]
    fn product_merges_exponents() {
        let m = x(0).mul(&x(1)).mul(&x(0));
        assert_eq!(m.exponent(VarId::pos(0)), 2);
        assert_eq!(m.exponent(VarId::pos(1)), 1);
        assert_eq!(m.degree(), 3);
    }

    #[test]
    fn graded_lex_order() {
        // Degree dominates.
        assert!(x(5).mul(&x(5)) > x(0));
        // Same degree: earlier variable with higher exponent wins.
        assert!(x(0).mul(&x(0)) > x(0).mul(&x(1)));
        assert!(x(0).mul(&x(1)) > x(1).mul(&x(1)));
        // Positive twin sorts above its negation at equal degree.
        assert!(x(0) > Monomial::var(VarId::neg(0)));
        assert_eq!(x(3).cmp(&x(3)), Ordering::Equal);
    }

    #[test]
    fn multilinear_enumeration() {
        let ms = multilinear_monomials(4, 2);
        assert_eq!(ms.len(), 1 + 4 + 6);
        assert_eq!(ms[0], Monomial::one());
        assert!(ms.iter().all(|m| m.is_multilinear_positive()));
        assert_eq!(multilinear_monomials(2, 2).len(), 4);
    }

    #[test]
    fn from_factors_normalizes() {
        let m = Monomial::from_factors(vec![(VarId::pos(2), 1), (VarId::pos(0), 2), (VarId::pos(2), 0)]);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![(VarId::pos(0), 2), (VarId::pos(2), 1)]);
    }
}
