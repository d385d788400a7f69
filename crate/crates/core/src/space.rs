//! Twin-variable spaces.
//!
//! Variables come in pairs: a positive variable and its negated twin. The
//! twins are distinct variables linked only by the logical axiom
//! `x + ~x - 1`. A space optionally carries a grid shape (rows x cols) used
//! by families that index variables two-dimensionally.

use std::fmt;

/// One Boolean variable: a pair index plus a polarity.
///
/// Ordering is by pair first, positive twin before negated twin; this is the
/// variable order every lexicographic comparison in the crate refers to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId {
    pub pair: u32,
    pub negated: bool,
}

impl VarId {
    pub fn pos(pair: u32) -> Self {
        VarId { pair, negated: false }
    }

    pub fn neg(pair: u32) -> Self {
        VarId { pair, negated: true }
    }

    pub fn twin(self) -> Self {
        VarId { pair: self.pair, negated: !self.negated }
    }
}

/// A set of twin pairs, optionally arranged as a grid.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VariableSpace {
    n_pairs: u32,
    grid: Option<(u32, u32)>,
}

impl VariableSpace {
    pub fn new(n_pairs: u32) -> Self {
        VariableSpace { n_pairs, grid: None }
    }

    /// A `rows x cols` grid; pair `(i, j)` (0-based) lives at `i * cols + j`.
    pub fn grid(rows: u32, cols: u32) -> Self {
        VariableSpace { n_pairs: rows * cols, grid: Some((rows, cols)) }
    }

    pub fn n_pairs(&self) -> u32 {
        self.n_pairs
    }

    pub fn grid_shape(&self) -> Option<(u32, u32)> {
        self.grid
    }

    pub fn contains(&self, var: VarId) -> bool {
        var.pair < self.n_pairs
    }

    /// Pair index of grid cell `(row, col)`, 0-based. Panics off-grid.
    pub fn pair_at(&self, row: u32, col: u32) -> u32 {
        let (rows, cols) = self.grid.expect("space has no grid shape");
        assert!(row < rows && col < cols, "grid coordinates out of range");
        row * cols + col
    }

    /// Grid coordinates of a pair when the space has a grid shape.
    pub fn coords(&self, pair: u32) -> Option<(u32, u32)> {
        self.grid.map(|(_, cols)| (pair / cols, pair % cols))
    }

    /// Text form of a variable, 1-based: `x[3]`, `~x[2]`, or `x[1,2]` on grids.
    pub fn var_token(&self, var: VarId) -> String {
        let sign = if var.negated { "~" } else { "" };
        match self.coords(var.pair) {
            Some((i, j)) => format!("{sign}x[{},{}]", i + 1, j + 1),
            None => format!("{sign}x[{}]", var.pair + 1),
        }
    }
}

impl fmt::Display for VariableSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.grid {
            Some((r, c)) => write!(f, "{} pairs ({r}x{c} grid)", self.n_pairs),
            None => write!(f, "{} pairs", self.n_pairs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_indexing_round_trips() {
        let s = VariableSpace::grid(2, 4);
        assert_eq!(s.n_pairs(), 8);
        assert_eq!(s.pair_at(1, 2), 6);
        assert_eq!(s.coords(6), Some((1, 2)));
        assert_eq!(s.var_token(VarId::pos(6)), "x[2,3]");
        assert_eq!(s.var_token(VarId::neg(0)), "~x[1,1]");
    }

    #[test]
    fn variable_order_is_pair_then_polarity() {
        assert!(VarId::pos(0) < VarId::neg(0));
        assert!(VarId::neg(0) < VarId::pos(1));
    }
}
