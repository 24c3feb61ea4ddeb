//! Exact integer linear algebra: Smith normal form with transforms, Hermite
//! normal form by columns, integer kernels, linear solving, and finitely
//! generated abelian group invariants presented as lattice quotients.
//!
//! Everything is over BigInt; no modular shortcuts. Sizes here stay in the
//! low hundreds, so the classical pivoting algorithms are the right tool.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*x));
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: BigInt) {
        self.data[r * self.cols + c] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs.get(k, j);
                    if !add.is_zero() {
                        let cur = out.get(i, j) + add;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_cols(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Columns of `rhs` appended to the right.
    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "dimension mismatch");
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    /// Rows of `rhs` appended below.
    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "dimension mismatch");
        Self::from_fn(self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                rhs.get(i - self.rows, j).clone()
            }
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i -= q · row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let x = self.get(i, k) - q * self.get(j, k);
            self.set(i, k, x);
        }
    }

    /// col_i -= q · col_j
    fn col_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for k in 0..self.rows {
            let x = self.get(k, i) - q * self.get(k, j);
            self.set(k, i, x);
        }
    }

    /// row_i += row_j
    fn row_add(&mut self, i: usize, j: usize) {
        for k in 0..self.cols {
            let x = self.get(i, k) + self.get(j, k);
            self.set(i, k, x);
        }
    }

    fn neg_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let x = -self.get(i, k);
            self.set(i, k, x);
        }
    }

    fn neg_col(&mut self, j: usize) {
        for k in 0..self.rows {
            let x = -self.get(k, j);
            self.set(k, j, x);
        }
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// u · a · v = s with u, v unimodular and s diagonal, each diagonal entry
/// nonnegative and dividing the next. The inverse transforms are tracked
/// alongside so callers can move between original and normal coordinates in
/// either direction (u·u_inv = I, v·v_inv = I).
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub u: IntMat,
    pub s: IntMat,
    pub v: IntMat,
    pub u_inv: IntMat,
    pub v_inv: IntMat,
    pub rank: usize,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s.get(i, i).clone()).collect()
    }
}

fn pivot_search(s: &IntMat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = s.get(i, j);
            if x.is_zero() {
                continue;
            }
            match &best {
                None => best = Some((i, j)),
                Some((bi, bj)) if x.abs() < s.get(*bi, *bj).abs() => best = Some((i, j)),
                _ => {}
            }
        }
    }
    best
}

/// Which transform matrices `snf_with` should maintain. Skipping unused
/// ones matters: on an r×c input the u-pair costs O(r) per row operation and
/// the v-pair O(c) per column operation, which dominates large eliminations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Track {
    pub u: bool,
    pub u_inv: bool,
    pub v: bool,
    pub v_inv: bool,
}

impl Track {
    pub(crate) const ALL: Track = Track { u: true, u_inv: true, v: true, v_inv: true };
    pub(crate) const NONE: Track = Track { u: false, u_inv: false, v: false, v_inv: false };
    /// Left transforms only: original ↔ normal row coordinates.
    pub(crate) const U_PAIR: Track = Track { u: true, u_inv: true, v: false, v_inv: false };
    /// Forward transforms only, as needed to solve linear systems.
    pub(crate) const FORWARD: Track = Track { u: true, u_inv: false, v: true, v_inv: false };
}

pub fn snf(a: &IntMat) -> SnfResult {
    snf_with(a, Track::ALL)
}

/// Smith normal form maintaining only the requested transforms; untracked
/// fields of the result are 0×0 placeholders. The diagonal, rank, and every
/// tracked transform are identical to the full computation.
pub(crate) fn snf_with(a: &IntMat, tr: Track) -> SnfResult {
    let (r, c) = (a.rows(), a.cols());
    let mut s = a.clone();
    let dim = |on: bool, n: usize| if on { n } else { 0 };
    let mut u = IntMat::identity(dim(tr.u, r));
    let mut v = IntMat::identity(dim(tr.v, c));
    let mut u_inv = IntMat::identity(dim(tr.u_inv, r));
    let mut v_inv = IntMat::identity(dim(tr.v_inv, c));
    // Each elementary row operation E applied on the left (u ← E·u) is
    // mirrored by its inverse on u_inv's columns (u_inv ← u_inv·E⁻¹), and
    // symmetrically for v on the right.
    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = pivot_search(&s, t) else { break };
        let pivot_to = |s: &mut IntMat,
                            u: &mut IntMat,
                            u_inv: &mut IntMat,
                            v: &mut IntMat,
                            v_inv: &mut IntMat,
                            pi: usize,
                            pj: usize| {
            s.swap_rows(t, pi);
            if tr.u {
                u.swap_rows(t, pi);
            }
            if tr.u_inv {
                u_inv.swap_cols(t, pi);
            }
            s.swap_cols(t, pj);
            if tr.v {
                v.swap_cols(t, pj);
            }
            if tr.v_inv {
                v_inv.swap_rows(t, pj);
            }
        };
        pivot_to(&mut s, &mut u, &mut u_inv, &mut v, &mut v_inv, pi, pj);
        loop {
            // Clear below and to the right of the pivot; truncated quotients
            // strictly shrink residues, so re-picking a smaller pivot when
            // residues remain terminates.
            for i in (t + 1)..r {
                let q = s.get(i, t) / s.get(t, t);
                if q.is_zero() {
                    continue;
                }
                s.row_sub(i, t, &q);
                if tr.u {
                    u.row_sub(i, t, &q);
                }
                if tr.u_inv {
                    u_inv.col_sub(t, i, &-&q);
                }
            }
            for j in (t + 1)..c {
                let q = s.get(t, j) / s.get(t, t);
                if q.is_zero() {
                    continue;
                }
                s.col_sub(j, t, &q);
                if tr.v {
                    v.col_sub(j, t, &q);
                }
                if tr.v_inv {
                    v_inv.row_sub(t, j, &-&q);
                }
            }
            let residue = ((t + 1)..r).any(|i| !s.get(i, t).is_zero())
                || ((t + 1)..c).any(|j| !s.get(t, j).is_zero());
            if residue {
                let (pi, pj) = pivot_search(&s, t).expect("residues are nonzero");
                pivot_to(&mut s, &mut u, &mut u_inv, &mut v, &mut v_inv, pi, pj);
                continue;
            }
            // Divisibility sweep: drag any offending entry of the remaining
            // block into the pivot's row and go again.
            let offender = ((t + 1)..r)
                .flat_map(|i| ((t + 1)..c).map(move |j| (i, j)))
                .find(|&(i, j)| !s.get(i, j).mod_floor(s.get(t, t)).is_zero());
            match offender {
                Some((i, _)) => {
                    s.row_add(t, i);
                    if tr.u {
                        u.row_add(t, i);
                    }
                    if tr.u_inv {
                        u_inv.col_sub(i, t, &BigInt::one());
                    }
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.neg_row(t);
            if tr.u {
                u.neg_row(t);
            }
            if tr.u_inv {
                u_inv.neg_col(t);
            }
        }
        t += 1;
    }
    let rank = (0..r.min(c)).take_while(|&i| !s.get(i, i).is_zero()).count();
    SnfResult { u, s, v, u_inv, v_inv, rank }
}

/// Columns form a basis of { x ∈ Z^cols : a·x = 0 }.
pub fn kernel_basis(a: &IntMat) -> IntMat {
    // Column-reduce [a; I] to echelon form. Column operations preserve the
    // lattice {(a·x, x)}, so a reduced column with vanishing a-block reads
    // a kernel element off its identity block, and echelon structure makes
    // those columns a basis of the kernel sublattice.
    let stacked = a.vstack(&IntMat::identity(a.cols()));
    let h = col_hnf(&stacked);
    let mut cols: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..h.cols() {
        if (0..a.rows()).all(|i| h.get(i, j).is_zero()) {
            cols.push((a.rows()..h.rows()).map(|i| h.get(i, j).clone()).collect());
        }
    }
    IntMat::from_cols(a.cols(), &cols)
}

/// Spanning columns, in column-echelon form (leading entries positive and at
/// strictly increasing rows; zero columns dropped), of the solution lattice
///
///   { x ∈ Z^cols : (a·x)_i ≡ 0 mod row_moduli[i] for every row i },
///
/// where modulus 0 demands exact vanishing and modulus 1 imposes nothing.
/// An entry sol_moduli[j] = s > 0 promises that s·e_j is itself a solution
/// (typically the known order of the j-th source generator). The moduli are
/// what make this routine scale: every working entry of a modular row stays
/// reduced into [0, m) during elimination, which tames the coefficient
/// explosion plain Hermite elimination suffers on the large mostly-torsion
/// systems that resolution stages produce.
pub(crate) fn kernel_with_moduli(
    a: &IntMat,
    row_moduli: &[BigInt],
    sol_moduli: &[BigInt],
) -> IntMat {
    let (r, c) = (a.rows(), a.cols());
    assert_eq!(row_moduli.len(), r, "one modulus per constraint row");
    assert_eq!(sol_moduli.len(), c, "one modulus per solution coordinate");
    debug_assert!(sol_moduli.iter().all(|s| !s.is_one()), "solution moduli are 0 or at least 2");
    #[cfg(debug_assertions)]
    for (j, s) in sol_moduli.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        for i in 0..r {
            let x = s * a.get(i, j);
            let ok = if row_moduli[i].is_zero() {
                x.is_zero()
            } else {
                x.mod_floor(&row_moduli[i]).is_zero()
            };
            debug_assert!(ok, "a declared solution modulus must yield genuine solutions");
        }
    }

    let keep: Vec<usize> = (0..r).filter(|&i| !row_moduli[i].is_one()).collect();
    let top = keep.len();
    let rows = top + c;
    let mods: Vec<BigInt> =
        keep.iter().map(|&i| row_moduli[i].clone()).chain(sol_moduli.iter().cloned()).collect();

    // Working columns over the stacked rows [constraints; solution coords]:
    // one column [a_j; e_j] per source coordinate, then one m·e_row per row
    // with a finite modulus. Reducing an entry modulo its row's modulus is
    // an elementary operation against that m·e_row vector, which lies in the
    // column span initially and therefore forever; the span of the columns
    // is invariant throughout.
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(c + rows);
    for j in 0..c {
        let mut col = vec![BigInt::zero(); rows];
        for (t, &i) in keep.iter().enumerate() {
            let x = a.get(i, j).clone();
            col[t] = if mods[t].is_zero() { x } else { x.mod_floor(&mods[t]) };
        }
        col[top + j] = BigInt::one();
        cols.push(col);
    }
    for t in 0..rows {
        if !mods[t].is_zero() {
            let mut col = vec![BigInt::zero(); rows];
            col[t] = mods[t].clone();
            cols.push(col);
        }
    }

    let mut pivot = 0usize;
    let mut bottom_pivots: Vec<usize> = Vec::new();
    for row in 0..rows {
        if pivot == cols.len() {
            break;
        }
        // gcd the row into a single positive pivot entry, as in row_hnf but
        // columnwise and with modular reduction of everything below the row.
        loop {
            let best = (pivot..cols.len())
                .filter(|&k| !cols[k][row].is_zero())
                .min_by_key(|&k| cols[k][row].abs());
            let Some(best) = best else { break };
            cols.swap(pivot, best);
            let mut residue = false;
            let (head, tail) = cols.split_at_mut(pivot + 1);
            let p = &head[pivot];
            for col in tail.iter_mut() {
                if col[row].is_zero() {
                    continue;
                }
                let q = &col[row] / &p[row];
                if !q.is_zero() {
                    for i in row..rows {
                        let mut x = &col[i] - &(&q * &p[i]);
                        if i > row && !mods[i].is_zero() {
                            x = x.mod_floor(&mods[i]);
                        }
                        col[i] = x;
                    }
                }
                if !col[row].is_zero() {
                    residue = true;
                }
            }
            if !residue {
                break;
            }
        }
        if cols[pivot][row].is_zero() {
            continue;
        }
        if cols[pivot][row].is_negative() {
            for x in cols[pivot].iter_mut() {
                *x = -&*x;
            }
        }
        if row >= top {
            bottom_pivots.push(pivot);
        }
        pivot += 1;
    }

    let sols: Vec<Vec<BigInt>> = bottom_pivots.iter().map(|&k| cols[k][top..].to_vec()).collect();
    IntMat::from_cols(c, &sols)
}

/// Row Hermite normal form: row echelon with positive pivots and entries
/// above each pivot reduced into [0, pivot). Zero rows are dropped.
pub fn row_hnf(a: &IntMat) -> IntMat {
    let (r, c) = (a.rows(), a.cols());
    let trace = r * c > 40_000;
    let t_start = std::time::Instant::now();
    let mut h = a.clone();
    let mut pivot_row = 0;
    for col in 0..c {
        if trace && col % 20 == 0 {
            let max_bits =
                (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| h.get(i, j).bits()).max();
            eprintln!(
                "hnf {r}x{c}: col {col}, pivots {pivot_row}, max_bits {max_bits:?}, {:?}",
                t_start.elapsed()
            );
        }
        if pivot_row == r {
            break;
        }
        // gcd the column below pivot_row into a single entry
        loop {
            let best = (pivot_row..r)
                .filter(|&i| !h.get(i, col).is_zero())
                .min_by_key(|&i| h.get(i, col).abs());
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            let mut residue = false;
            for i in (pivot_row + 1)..r {
                let q = h.get(i, col) / h.get(pivot_row, col);
                h.row_sub(i, pivot_row, &q);
                if !h.get(i, col).is_zero() {
                    residue = true;
                }
            }
            if !residue {
                break;
            }
        }
        if h.get(pivot_row, col).is_zero() {
            continue;
        }
        if h.get(pivot_row, col).is_negative() {
            h.neg_row(pivot_row);
        }
        for i in 0..pivot_row {
            let q = h.get(i, col).div_floor(h.get(pivot_row, col));
            h.row_sub(i, pivot_row, &q);
        }
        pivot_row += 1;
    }
    let kept: Vec<Vec<BigInt>> =
        (0..pivot_row).map(|i| (0..c).map(|j| h.get(i, j).clone()).collect()).collect();
    let mut out = IntMat::zeros(pivot_row, c);
    for (i, row) in kept.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            out.set(i, j, x.clone());
        }
    }
    out
}

/// Column Hermite normal form of the column lattice: echelon columns with
/// pivots in strictly increasing rows; zero columns dropped.
pub fn col_hnf(a: &IntMat) -> IntMat {
    row_hnf(&a.transpose()).transpose()
}

/// Coordinates of `v` in the basis formed by the columns of a column-HNF
/// matrix, or None when `v` lies outside their span. Echelon structure makes
/// the greedy top-down reduction exact.
pub fn hnf_coords(h: &IntMat, v: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(h.rows(), v.len(), "dimension mismatch");
    let mut w: Vec<BigInt> = v.to_vec();
    let mut coords = vec![BigInt::zero(); h.cols()];
    for (j, coord) in coords.iter_mut().enumerate() {
        let p = (0..h.rows()).find(|&i| !h.get(i, j).is_zero()).expect("HNF columns are nonzero");
        if w[..p].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let (q, rem) = w[p].div_rem(h.get(p, j));
        if !rem.is_zero() {
            return None;
        }
        for (i, wi) in w.iter_mut().enumerate().skip(p) {
            *wi -= &q * h.get(i, j);
        }
        *coord = q;
    }
    if w.iter().all(|x| x.is_zero()) {
        Some(coords)
    } else {
        None
    }
}

/// Membership of `v` in the lattice spanned by the columns of a column-HNF
/// matrix.
pub fn in_col_span(h: &IntMat, v: &[BigInt]) -> bool {
    hnf_coords(h, v).is_some()
}

/// One integer solution of a·x = b, when one exists.
pub fn solve(a: &IntMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let res = snf_with(a, Track::FORWARD);
    let ub = res.u.mat_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for i in 0..a.rows() {
        if i < res.rank {
            let d = res.s.get(i, i);
            let (q, rem) = ub[i].div_rem(d);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(res.v.mat_vec(&y))
}

/// Finitely generated abelian group in invariant-factor form: torsion
/// entries exceed 1 and each divides the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbGroup {
    pub fn free(rank: usize) -> Self {
        AbGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Z^ambient / (column span of rels), in invariant-factor form.
pub fn lattice_quotient(ambient: usize, rels: &IntMat) -> AbGroup {
    assert_eq!(rels.rows(), ambient, "relations live in the ambient lattice");
    if rels.cols() == 0 {
        return AbGroup::free(ambient);
    }
    let res = snf_with(rels, Track::NONE);
    let torsion: Vec<BigInt> = res.diagonal().into_iter().filter(|d| d > &BigInt::one()).collect();
    AbGroup { free_rank: ambient - res.rank, torsion }
}

/// Fraction-free determinant; the test oracle for unimodularity of the SNF
/// transforms.
pub fn det_bareiss(a: &IntMat) -> BigInt {
    assert_eq!(a.rows(), a.cols(), "determinant of a square matrix");
    let n = a.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..(n - 1) {
        if m.get(k, k).is_zero() {
            let Some(swap) = ((k + 1)..n).find(|&i| !m.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, swap);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j);
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free step must divide exactly");
                m.set(i, j, q);
            }
        }
        for i in (k + 1)..n {
            m.set(i, k, BigInt::zero());
        }
        prev = m.get(k, k).clone();
    }
    sign * m.get(n - 1, n - 1).clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_contract(a: &IntMat) {
        let res = snf(a);
        assert_eq!(res.u.mul(a).mul(&res.v), res.s, "u·a·v = s");
        assert_eq!(det_bareiss(&res.u).abs(), BigInt::one(), "u unimodular");
        assert_eq!(det_bareiss(&res.v).abs(), BigInt::one(), "v unimodular");
        assert_eq!(res.u.mul(&res.u_inv), IntMat::identity(a.rows()), "u·u_inv = I");
        assert_eq!(res.v.mul(&res.v_inv), IntMat::identity(a.cols()), "v·v_inv = I");
        for i in 0..a.rows().min(a.cols()) {
            for j in 0..a.rows().min(a.cols()) {
                if i != j {
                    assert!(res.s.get(i, j).is_zero(), "off-diagonal");
                }
            }
        }
        let d = res.diagonal();
        for w in d.windows(2) {
            assert!(!w[0].is_zero());
            assert!(w[1].mod_floor(&w[0]).is_zero(), "divisibility chain");
        }
        for i in res.rank..a.rows().min(a.cols()) {
            assert!(res.s.get(i, i).is_zero());
        }
    }

    #[test]
    fn snf_worked_example() {
        let a = IntMat::from_rows(&[vec![2, 4], vec![6, 8]]);
        let res = snf(&a);
        assert_eq!(res.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        check_contract(&a);
    }

    #[test]
    fn snf_shapes_and_degenerate_cases() {
        check_contract(&IntMat::identity(4));
        check_contract(&IntMat::zeros(3, 5));
        check_contract(&IntMat::from_rows(&[vec![0, 0, 7]]));
        check_contract(&IntMat::from_rows(&[vec![3], vec![-6], vec![9]]));
        let res = snf(&IntMat::zeros(2, 2));
        assert_eq!(res.rank, 0);
    }

    #[test]
    fn snf_randomized_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for _ in 0..40 {
            let r = rng.random_range(1..=6);
            let c = rng.random_range(1..=6);
            let a = IntMat::from_fn(r, c, |_, _| BigInt::from(rng.random_range(-30i64..=30)));
            check_contract(&a);
        }
    }

    #[test]
    fn kernel_is_exact() {
        let a = IntMat::from_rows(&[vec![1, 2, 3]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        // Rank of the kernel matrix is full.
        assert_eq!(snf(&k).rank, 2);
        // Injective maps have trivial kernel.
        let inj = IntMat::from_rows(&[vec![2, 0], vec![0, 3], vec![1, 1]]);
        assert_eq!(kernel_basis(&inj).cols(), 0);
    }

    #[test]
    fn kernel_captures_all_solutions() {
        // Every kernel vector of a random matrix must be an integer
        // combination of the basis columns: check by HNF membership.
        let a = IntMat::from_rows(&[vec![2, 4, 6], vec![1, 2, 3]]);
        let k = kernel_basis(&a);
        let h = col_hnf(&k);
        // (2, -1, 0) and (3, 0, -1) are kernel vectors.
        assert!(in_col_span(&h, &[2.into(), (-1).into(), 0.into()]));
        assert!(in_col_span(&h, &[3.into(), 0.into(), (-1).into()]));
        assert!(!in_col_span(&h, &[1.into(), 0.into(), 0.into()]));
    }

    /// Reference route: solutions of (a·x)_i ≡ 0 mod m_i as the projection
    /// of the exact kernel of [a | diag(m)] onto the x block.
    fn moduli_kernel_by_stacking(a: &IntMat, m: &[BigInt]) -> IntMat {
        let diag_cols: Vec<Vec<BigInt>> = m
            .iter()
            .enumerate()
            .filter(|(_, mi)| !mi.is_zero())
            .map(|(i, mi)| {
                let mut v = vec![BigInt::zero(); a.rows()];
                v[i] = mi.clone();
                v
            })
            .collect();
        let aug = a.hstack(&IntMat::from_cols(a.rows(), &diag_cols));
        let ker = kernel_basis(&aug);
        let projected: Vec<Vec<BigInt>> = (0..ker.cols())
            .map(|j| (0..a.cols()).map(|i| ker.get(i, j).clone()).collect())
            .collect();
        col_hnf(&IntMat::from_cols(a.cols(), &projected))
    }

    #[test]
    fn moduli_kernel_small_cases() {
        // x ≡ 0 mod 4 on one coordinate.
        let a = IntMat::from_rows(&[vec![1]]);
        let k = kernel_with_moduli(&a, &[4.into()], &[BigInt::zero()]);
        assert_eq!(col_hnf(&k), IntMat::from_rows(&[vec![4]]));
        // 2x ≡ 0 mod 4 with the declared solution 2·e.
        let a = IntMat::from_rows(&[vec![2]]);
        let k = kernel_with_moduli(&a, &[4.into()], &[2.into()]);
        assert_eq!(col_hnf(&k), IntMat::from_rows(&[vec![2]]));
        // Modulus 1 imposes nothing.
        let a = IntMat::from_rows(&[vec![7, 3]]);
        let k = kernel_with_moduli(&a, &[1.into()], &[BigInt::zero(), BigInt::zero()]);
        assert_eq!(col_hnf(&k), IntMat::identity(2));
        // Mixed exact and modular rows.
        let a = IntMat::from_rows(&[vec![2, 4], vec![1, 1]]);
        let k = kernel_with_moduli(&a, &[BigInt::zero(), 3.into()], &[BigInt::zero(); 2]);
        assert_eq!(col_hnf(&k), moduli_kernel_by_stacking(&a, &[BigInt::zero(), 3.into()]));
    }

    #[test]
    fn moduli_kernel_matches_plain_kernel_and_stacking() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        for _ in 0..60 {
            let r = rng.random_range(1..=5);
            let c = rng.random_range(1..=5);
            let a = IntMat::from_fn(r, c, |_, _| BigInt::from(rng.random_range(-9i64..=9)));
            let m: Vec<BigInt> = (0..r)
                .map(|_| BigInt::from(*[0i64, 0, 1, 2, 3, 4, 6].get(rng.random_range(0..7)).unwrap()))
                .collect();
            let k = kernel_with_moduli(&a, &m, &vec![BigInt::zero(); c]);
            assert_eq!(col_hnf(&k), moduli_kernel_by_stacking(&a, &m));
            if m.iter().all(|x| x.is_zero()) {
                assert_eq!(col_hnf(&k), col_hnf(&kernel_basis(&a)));
            }
        }
    }

    #[test]
    fn hnf_membership() {
        // Lattice {(a, b) : a + b even} ⊂ Z².
        let gens = IntMat::from_rows(&[vec![2, 0, 1], vec![0, 2, 1]]);
        let h = col_hnf(&gens);
        assert!(in_col_span(&h, &[1.into(), 1.into()]));
        assert!(in_col_span(&h, &[2.into(), 0.into()]));
        assert!(in_col_span(&h, &[(-3).into(), 5.into()]));
        assert!(!in_col_span(&h, &[1.into(), 0.into()]));
        assert!(in_col_span(&h, &[0.into(), 0.into()]));
        // Coordinates reconstruct the vector exactly.
        let v: Vec<BigInt> = vec![(-3).into(), 5.into()];
        let coords = hnf_coords(&h, &v).unwrap();
        assert_eq!(h.mat_vec(&coords), v);
    }

    #[test]
    fn solving_linear_systems() {
        let a = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        let x = solve(&a, &[4.into(), 6.into()]).unwrap();
        assert_eq!(a.mat_vec(&x), vec![BigInt::from(4), BigInt::from(6)]);
        assert!(solve(&a, &[1.into(), 0.into()]).is_none());
        // Underdetermined but consistent.
        let a = IntMat::from_rows(&[vec![1, 2, 3]]);
        let x = solve(&a, &[5.into()]).unwrap();
        assert_eq!(a.mat_vec(&x), vec![BigInt::from(5)]);
        // Overdetermined inconsistent.
        let a = IntMat::from_rows(&[vec![1], vec![1]]);
        assert!(solve(&a, &[0.into(), 1.into()]).is_none());
    }

    #[test]
    fn quotient_invariant_factors() {
        // Z²/⟨(2,0),(0,3)⟩ ≅ Z/6.
        let rels = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        let g = lattice_quotient(2, &rels);
        assert_eq!(g, AbGroup { free_rank: 0, torsion: vec![6.into()] });
        // Z³ / ⟨(2,0,0)⟩ ≅ Z² ⊕ Z/2.
        let rels = IntMat::from_rows(&[vec![2], vec![0], vec![0]]);
        let g = lattice_quotient(3, &rels);
        assert_eq!(g, AbGroup { free_rank: 2, torsion: vec![2.into()] });
        // No relations.
        let g = lattice_quotient(2, &IntMat::zeros(2, 0));
        assert_eq!(g, AbGroup::free(2));
        // Unimodular relations kill everything.
        let g = lattice_quotient(2, &IntMat::from_rows(&[vec![1, 0], vec![0, 1]]));
        assert!(g.is_trivial());
    }

    #[test]
    fn bareiss_determinant() {
        let a = IntMat::from_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(det_bareiss(&a), BigInt::from(-2));
        let b = IntMat::from_rows(&[vec![2, 0, 1], vec![1, 1, 0], vec![0, 3, 1]]);
        // Cofactor check: 2(1·1-0·3) - 0 + 1(1·3-1·0) = 2 + 3 = 5.
        assert_eq!(det_bareiss(&b), BigInt::from(5));
        assert_eq!(det_bareiss(&IntMat::zeros(3, 3)), BigInt::zero());
        assert_eq!(det_bareiss(&IntMat::identity(5)), BigInt::one());
        // Singular with a zero pivot on the way.
        let c = IntMat::from_rows(&[vec![0, 1], vec![0, 2]]);
        assert_eq!(det_bareiss(&c), BigInt::zero());
    }
}
