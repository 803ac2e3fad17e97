//! Exact linear algebra over the two-element field.
//!
//! Everything downstream (structure equations, morphism homology, nullhomotopy
//! witnesses, candidate enumeration) reduces to rank / solve / homology over
//! F2, so this module is deliberately small and deterministic: pivots are
//! always chosen lowest-index-first and free variables are set to zero, which
//! makes every answer reproducible byte for byte.
//!
//! Matrices are stored as a set of one-positions. Elimination densifies rows
//! into packed `u64` words while the column count stays below a configurable
//! cap (default 2^16) and falls back to sorted index lists beyond it.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::HfError;

/// Default column width up to which elimination uses packed words.
pub const DEFAULT_DENSE_CAP: usize = 1 << 16;

/// A dense vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                let i = wi * 64 + w.trailing_zeros() as usize;
                if i < self.len {
                    return Some(i);
                }
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { 1 } else { 0 })?;
        }
        write!(f, "]")
    }
}

/// A matrix over F2, stored as the set of its one-entries.
///
/// Acts on column vectors: `m.apply(x)` has length `rows` for `x` of length
/// `cols`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeSet<(usize, usize)>,
    dense_cap: usize,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            entries: BTreeSet::new(),
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.insert(i, i);
        }
        m
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, HfError> {
        let mut m = Self::zero(rows, cols);
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(HfError::Dimension(format!(
                    "entry ({r},{c}) out of bounds for {rows}x{cols} matrix"
                )));
            }
            if !m.entries.insert((r, c)) {
                return Err(HfError::Dimension(format!(
                    "duplicate entry ({r},{c}) in matrix"
                )));
            }
        }
        Ok(m)
    }

    /// Builds from rows given as dense vectors.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zero(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for c in row.ones() {
                m.insert(r, c);
            }
        }
        m
    }

    /// Overrides the dense elimination cap (used by tests of the sparse path).
    pub fn with_dense_cap(mut self, cap: usize) -> Self {
        self.dense_cap = cap.max(1);
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.entries.contains(&(r, c))
    }

    /// Toggles an entry (F2 addition of a one).
    pub fn insert(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        if !self.entries.insert((r, c)) {
            self.entries.remove(&(r, c));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut m = BitMatrix::zero(self.cols, self.rows);
        for &(r, c) in &self.entries {
            m.entries.insert((c, r));
        }
        m.dense_cap = self.dense_cap;
        m
    }

    pub fn row(&self, r: usize) -> BitVec {
        let mut v = BitVec::zeros(self.cols);
        for &(_, c) in self.entries.range((r, 0)..=(r, self.cols.max(1) - 1)) {
            v.set(c, true);
        }
        v
    }

    /// Matrix times column vector.
    pub fn apply(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "apply: dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for &(r, c) in &self.entries {
            if x.get(c) {
                out.flip(r);
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "compose: dimension mismatch");
        let mut out = BitMatrix::zero(self.rows, other.cols);
        for &(r, k) in &self.entries {
            for &(_, c) in other.entries.range((k, 0)..=(k, other.cols.max(1) - 1)) {
                out.insert(r, c);
            }
        }
        out
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        let mut out = self.clone();
        for &(r, c) in &other.entries {
            out.insert(r, c);
        }
        out
    }

    fn dense_rows(&self) -> Vec<BitVec> {
        let mut rows = vec![BitVec::zeros(self.cols); self.rows];
        for &(r, c) in &self.entries {
            rows[r].set(c, true);
        }
        rows
    }

    fn sparse_rows(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.rows];
        for &(r, c) in &self.entries {
            rows[r].push(c);
        }
        rows
    }

    /// Rank over F2 by Gaussian elimination, lowest pivot column first.
    pub fn rank(&self) -> usize {
        if self.cols <= self.dense_cap {
            let mut ech = Echelon::new(self.cols);
            for row in self.dense_rows() {
                ech.insert(row);
            }
            ech.rank()
        } else {
            sparse_rank(self.sparse_rows())
        }
    }

    /// Solves `self * x = b`.
    ///
    /// Returns the solution with all free variables zero (so the answer is
    /// unique and lexicographically least in pivot order), or `None` when the
    /// system is inconsistent.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>, HfError> {
        if b.len() != self.rows {
            return Err(HfError::Dimension(format!(
                "solve: rhs length {} does not match {} rows",
                b.len(),
                self.rows
            )));
        }
        // Eliminate on [A | b] rows; dense path only (solve is never called on
        // matrices wide enough to need the sparse fallback).
        let mut rows: Vec<(BitVec, bool)> = self
            .dense_rows()
            .into_iter()
            .zip((0..self.rows).map(|r| b.get(r)))
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (column, row index in kept list)
        let mut kept: Vec<(BitVec, bool)> = Vec::new();
        for (mut row, mut rhs) in rows.drain(..) {
            loop {
                match row.first_one() {
                    None => {
                        if rhs {
                            return Ok(None); // 0 = 1
                        }
                        break;
                    }
                    Some(p) => {
                        if let Some(&(_, ki)) = pivots.iter().find(|&&(c, _)| c == p) {
                            let (krow, krhs) = kept[ki].clone();
                            row.xor_assign(&krow);
                            rhs ^= krhs;
                        } else {
                            pivots.push((p, kept.len()));
                            kept.push((row, rhs));
                            break;
                        }
                    }
                }
            }
        }
        // Back-substitute with free variables zero.
        pivots.sort();
        let mut x = BitVec::zeros(self.cols);
        for &(col, ki) in pivots.iter().rev() {
            let (row, rhs) = &kept[ki];
            let mut val = *rhs;
            for c in row.ones() {
                if c != col && x.get(c) {
                    val ^= true;
                }
            }
            x.set(col, val);
        }
        Ok(Some(x))
    }

    /// Basis of the null space, deterministic (one vector per free column,
    /// ordered by column index).
    pub fn kernel(&self) -> Vec<BitVec> {
        let mut ech = Echelon::new(self.cols);
        for row in self.dense_rows() {
            ech.insert(row);
        }
        ech.reduce_fully();
        let pivot_cols: BTreeSet<usize> = ech.pivots.iter().map(|&(c, _)| c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for &(pc, ri) in &ech.pivots {
                if ech.rows[ri].get(free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of the column space (image), as echelon representatives.
    pub fn image(&self) -> Vec<BitVec> {
        let t = self.transpose();
        let mut ech = Echelon::new(self.rows);
        for row in t.dense_rows() {
            ech.insert(row);
        }
        ech.basis()
    }
}

fn sparse_rank(rows: Vec<Vec<usize>>) -> usize {
    // Sorted-index-list elimination for matrices too wide to pack densely.
    let mut basis: Vec<Vec<usize>> = Vec::new(); // kept rows, each sorted, keyed by first index
    let mut rank = 0;
    for mut row in rows {
        row.sort_unstable();
        row.dedup();
        loop {
            let Some(&lead) = row.first() else { break };
            match basis.iter().find(|r| r[0] == lead) {
                None => {
                    basis.push(row);
                    rank += 1;
                    break;
                }
                Some(other) => {
                    row = xor_sorted(&row, other);
                }
            }
        }
    }
    rank
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// A growing row-echelon basis with lowest-index pivots.
#[derive(Clone, Debug)]
pub struct Echelon {
    ambient: usize,
    rows: Vec<BitVec>,
    pivots: Vec<(usize, usize)>, // (pivot column, row index), kept sorted by column
}

impl Echelon {
    pub fn new(ambient: usize) -> Self {
        Echelon {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis, clearing every pivot position.
    ///
    /// Rows carry no bits below their own pivot, so one ascending pass over
    /// the (sorted) pivots yields a normal form with no pivot-position bits
    /// at all, which makes the remainder map linear.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        for &(c, ri) in &self.pivots {
            if v.get(c) {
                v.xor_assign(&self.rows[ri]);
            }
        }
        v
    }

    /// Inserts a vector; returns true if it enlarged the span.
    pub fn insert(&mut self, v: BitVec) -> bool {
        assert_eq!(v.len(), self.ambient);
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(lead) => {
                self.pivots.push((lead, self.rows.len()));
                self.pivots.sort();
                self.rows.push(r);
                true
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    /// Back-eliminates so each pivot column appears in exactly one row.
    pub fn reduce_fully(&mut self) {
        let order: Vec<(usize, usize)> = self.pivots.clone();
        for &(col, ri) in order.iter().rev() {
            for &(_, rj) in &order {
                if rj != ri && self.rows[rj].get(col) {
                    let row = self.rows[ri].clone();
                    self.rows[rj].xor_assign(&row);
                }
            }
        }
    }

    pub fn basis(&self) -> Vec<BitVec> {
        let mut out: Vec<BitVec> = Vec::new();
        for &(_, ri) in &self.pivots {
            out.push(self.rows[ri].clone());
        }
        out
    }
}

/// A list of independent vectors in a common ambient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub vectors: Vec<BitVec>,
}

impl SubspaceBasis {
    pub fn new(ambient_dim: usize, vectors: Vec<BitVec>) -> Result<Self, HfError> {
        let mut ech = Echelon::new(ambient_dim);
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(HfError::Dimension(
                    "basis vector length does not match ambient dimension".into(),
                ));
            }
            if !ech.insert(v.clone()) {
                return Err(HfError::Dimension(
                    "basis vectors are linearly dependent".into(),
                ));
            }
        }
        Ok(SubspaceBasis {
            ambient_dim,
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Homology of a two-step complex `A --d_in--> B --d_out--> C` at `B`,
/// together with enough data to express any cycle in the class basis.
#[derive(Clone, Debug)]
pub struct Homology {
    pub dim: usize,
    pub representatives: SubspaceBasis,
    image: Echelon,
    /// Echelon over image ⊕ representatives; used to write classes in
    /// representative coordinates.
    class_ech: Echelon,
    /// For each row of class_ech, its representative coordinates.
    class_coords: Vec<BitVec>,
}

impl Homology {
    /// Coordinates of the class of `cycle` in the representative basis.
    pub fn class_coords(&self, cycle: &BitVec) -> BitVec {
        let mut v = self.image.reduce(cycle.clone());
        let mut coords = BitVec::zeros(self.dim);
        loop {
            let Some(lead) = v.first_one() else { break };
            let pos = self
                .class_ech
                .pivots
                .iter()
                .position(|&(c, _)| c == lead)
                .unwrap_or_else(|| panic!("class_coords: vector is not a cycle"));
            let (_, ri) = self.class_ech.pivots[pos];
            v.xor_assign(&self.class_ech.rows[ri]);
            coords.xor_assign(&self.class_coords[ri]);
        }
        coords
    }

    /// True when the class of `cycle` vanishes.
    pub fn is_boundary(&self, cycle: &BitVec) -> bool {
        self.image.contains(cycle)
    }
}

/// Computes homology at the middle of `d_in`, `d_out` (`d_out ∘ d_in = 0`).
pub fn homology(d_in: &BitMatrix, d_out: &BitMatrix) -> Result<Homology, HfError> {
    if d_in.rows() != d_out.cols() {
        return Err(HfError::Dimension(format!(
            "homology: d_in has {} rows but d_out has {} cols",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !d_out.compose(d_in).is_zero() {
        return Err(HfError::NotAComplex(
            "d_out ∘ d_in is nonzero".to_string(),
        ));
    }
    let n = d_in.rows();
    let mut image = Echelon::new(n);
    for v in d_in.image() {
        image.insert(v);
    }
    let kernel = d_out.kernel();

    let mut class_ech = Echelon::new(n);
    let mut class_coords: Vec<BitVec> = Vec::new();
    let mut reps: Vec<BitVec> = Vec::new();
    // Representative selection: kernel vectors whose class is new, in
    // deterministic kernel order.
    let expected_dim = kernel.len() - image.rank();
    for v in kernel {
        let reduced = image.reduce(v.clone());
        if reduced.is_zero() {
            continue;
        }
        // Is the class already spanned?
        let mut w = reduced.clone();
        let mut coords = BitVec::zeros(expected_dim);
        loop {
            let Some(lead) = w.first_one() else { break };
            match class_ech.pivots.iter().find(|&&(c, _)| c == lead) {
                Some(&(_, ri)) => {
                    w.xor_assign(&class_ech.rows[ri]);
                    coords.xor_assign(&class_coords[ri]);
                }
                None => break,
            }
        }
        if w.is_zero() {
            continue;
        }
        // New class: record representative (the original cycle v).
        let idx = reps.len();
        reps.push(v);
        let mut c = BitVec::zeros(expected_dim);
        c.set(idx, true);
        c.xor_assign(&coords);
        class_ech.pivots.push((w.first_one().unwrap(), class_ech.rows.len()));
        class_ech.pivots.sort();
        class_ech.rows.push(w);
        class_coords.push(c);
    }
    debug_assert_eq!(reps.len(), expected_dim);
    let dim = reps.len();
    Ok(Homology {
        dim,
        representatives: SubspaceBasis::new(n, reps)?,
        image,
        class_ech,
        class_coords,
    })
}
