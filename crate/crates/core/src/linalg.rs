//! Exact integer linear algebra: dense `i128` matrices, Smith and Hermite
//! normal forms with explicit transformations, and congruence solving.
//!
//! Every module/homology computation in this crate reduces to the routines
//! here, so they are written for correctness at desk scale rather than for
//! asymptotics. Arithmetic is checked; an overflow aborts loudly instead of
//! corrupting an invariant-factor computation.

use std::fmt;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    a: Vec<i128>,
}

fn ck_add(x: i128, y: i128) -> i128 {
    x.checked_add(y).expect("integer overflow in exact kernel")
}

fn ck_mul(x: i128, y: i128) -> i128 {
    x.checked_mul(y).expect("integer overflow in exact kernel")
}

/// Euclidean remainder in `[0, m)` for `m > 0`.
pub fn umod(x: i128, m: i128) -> i128 {
    debug_assert!(m > 0);
    x.rem_euclid(m)
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, a: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i128>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, a: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i128) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> i128 {
        self.a[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i128) {
        self.a[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i128] {
        &self.a[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col_vec(&self, c: usize) -> Vec<i128> {
        (0..self.rows).map(|r| self.at(r, c)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.at(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = ck_add(out.at(i, j), ck_mul(x, other.at(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0i128, |acc, (&x, &y)| ck_add(acc, ck_mul(x, y)))
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| ck_add(self.at(i, j), other.at(i, j)))
    }

    pub fn neg(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| -self.at(i, j))
    }

    pub fn scale(&self, c: i128) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| ck_mul(c, self.at(i, j)))
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j)
            } else {
                other.at(i, j - self.cols)
            }
        })
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        Mat::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.at(i, j)
            } else {
                other.at(i - self.rows, j)
            }
        })
    }

    /// Reduce each row `i` modulo `orders[i]` (entries into `[0, orders[i])`).
    pub fn reduce_rows_mod(&self, orders: &[i128]) -> Mat {
        assert_eq!(self.rows, orders.len());
        Mat::from_fn(self.rows, self.cols, |i, j| umod(self.at(i, j), orders[i]))
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.a.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: i128) {
        for k in 0..self.cols {
            let v = ck_add(self.at(i, k), ck_mul(c, self.at(j, k)));
            self.set(i, k, v);
        }
    }

    /// col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: i128) {
        for k in 0..self.rows {
            let v = ck_add(self.at(k, i), ck_mul(c, self.at(k, j)));
            self.set(k, i, v);
        }
    }

    fn neg_row(&mut self, i: usize) {
        for k in 0..self.cols {
            self.set(i, k, -self.at(i, k));
        }
    }

    fn neg_col(&mut self, i: usize) {
        for k in 0..self.rows {
            self.set(k, i, -self.at(k, i));
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `row_t * a * col_t = s` with `s` diagonal and
/// `s[0][0] | s[1][1] | ...`; all four transformations are unimodular.
pub struct Smith {
    pub s: Mat,
    pub row_t: Mat,
    pub row_t_inv: Mat,
    pub col_t: Mat,
    pub col_t_inv: Mat,
}

impl Smith {
    pub fn diag(&self) -> Vec<i128> {
        let n = self.s.nrows().min(self.s.ncols());
        (0..n).map(|i| self.s.at(i, i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diag().iter().filter(|&&d| d != 0).count()
    }
}

/// Smallest-pivot Смith reduction; adequate and numerically tame at desk scale.
pub fn smith(a: &Mat) -> Smith {
    let mut s = a.clone();
    let (nr, nc) = (s.nrows(), s.ncols());
    let mut u = Mat::identity(nr);
    let mut u_inv = Mat::identity(nr);
    let mut v = Mat::identity(nc);
    let mut v_inv = Mat::identity(nc);

    // row op: row_i += c*row_j  =>  u_inv col_j -= c*col_i
    // col op: col_i += c*col_j  =>  v_inv row_j -= c*row_i
    let mut k = 0usize;
    while k < nr.min(nc) {
        // locate smallest nonzero entry in the trailing block
        let mut pivot: Option<(usize, usize, i128)> = None;
        for i in k..nr {
            for j in k..nc {
                let x = s.at(i, j);
                if x != 0 && pivot.is_none_or(|(_, _, p)| x.abs() < p.abs()) {
                    pivot = Some((i, j, x));
                }
            }
        }
        let Some((pi, pj, _)) = pivot else { break };
        s.swap_rows(k, pi);
        u.swap_rows(k, pi);
        u_inv.swap_cols(k, pi);
        s.swap_cols(k, pj);
        v.swap_cols(k, pj);
        v_inv.swap_rows(k, pj);

        // clear row/column k; restart when a remainder becomes the new pivot
        let mut clean = true;
        for i in (k + 1)..nr {
            let q = s.at(i, k).div_euclid(s.at(k, k));
            if q != 0 {
                s.add_row(i, k, -q);
                u.add_row(i, k, -q);
                u_inv.add_col(k, i, q);
            }
            if s.at(i, k) != 0 {
                clean = false;
            }
        }
        for j in (k + 1)..nc {
            let q = s.at(k, j).div_euclid(s.at(k, k));
            if q != 0 {
                s.add_col(j, k, -q);
                v.add_col(j, k, -q);
                v_inv.add_row(k, j, q);
            }
            if s.at(k, j) != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility sweep over the trailing block
        let d = s.at(k, k);
        let mut fixed = true;
        'scan: for i in (k + 1)..nr {
            for j in (k + 1)..nc {
                if s.at(i, j) % d != 0 {
                    s.add_row(k, i, 1);
                    u.add_row(k, i, 1);
                    u_inv.add_col(i, k, -1);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        if s.at(k, k) < 0 {
            s.neg_row(k);
            u.neg_row(k);
            u_inv.neg_col(k);
        }
        k += 1;
    }
    debug_assert_eq!(u.mul(a).mul(&v), s);
    debug_assert_eq!(u.mul(&u_inv), Mat::identity(nr));
    debug_assert_eq!(v.mul(&v_inv), Mat::identity(nc));
    Smith { s, row_t: u, row_t_inv: u_inv, col_t: v, col_t_inv: v_inv }
}

/// Canonical row Hermite normal form: echelon rows, positive pivots, entries
/// above a pivot reduced into `[0, pivot)`. Zero rows are dropped, so equal
/// lattices produce identical matrices.
pub fn hermite_rows(a: &Mat) -> Mat {
    let mut rows = a.row_vecs();
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let cols = a.ncols();
    let mut out: Vec<Vec<i128>> = Vec::new();
    let mut col = 0usize;
    while col < cols && !rows.is_empty() {
        // gcd the column down to a single pivot row
        loop {
            let mut best: Option<usize> = None;
            for (i, r) in rows.iter().enumerate() {
                if r[col] != 0 && best.is_none_or(|b| r[col].abs() < rows[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            let mut done = true;
            let pivot_row = rows[b].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i == b || r[col] == 0 {
                    continue;
                }
                let q = r[col].div_euclid(pivot_row[col]);
                for (x, p) in r.iter_mut().zip(&pivot_row) {
                    *x = ck_add(*x, ck_mul(-q, *p));
                }
                if r[col] != 0 {
                    done = false;
                }
            }
            if done {
                let mut pr = rows.remove(b);
                if pr[col] < 0 {
                    for x in pr.iter_mut() {
                        *x = -*x;
                    }
                }
                out.push(pr);
                rows.retain(|r| r.iter().any(|&x| x != 0));
                break;
            }
        }
        col += 1;
    }
    // reduce entries above each pivot
    for i in (0..out.len()).rev() {
        let pivot_col = out[i].iter().position(|&x| x != 0).unwrap();
        let p = out[i][pivot_col];
        for j in 0..i {
            let q = out[j][pivot_col].div_euclid(p);
            if q != 0 {
                let lower = out[i].clone();
                for (x, l) in out[j].iter_mut().zip(&lower) {
                    *x = ck_add(*x, ck_mul(-q, *l));
                }
            }
        }
    }
    Mat { rows: out.len(), cols, a: out.into_iter().flatten().collect() }
}

/// Basis (as columns) of `{x : a*x ≡ 0 (mod moduli)}`, where row `i` of the
/// system is exact when `moduli[i] == 0`. Includes no reduction of `x` itself;
/// callers quotient by their own source lattice.
pub fn kernel_lattice(a: &Mat, moduli: &[i128]) -> Vec<Vec<i128>> {
    assert_eq!(a.nrows(), moduli.len());
    let slack_cols: Vec<usize> = (0..moduli.len()).filter(|&i| moduli[i] != 0).collect();
    let mut b = Mat::zeros(a.nrows(), a.ncols() + slack_cols.len());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            b.set(i, j, a.at(i, j));
        }
    }
    for (jj, &i) in slack_cols.iter().enumerate() {
        b.set(i, a.ncols() + jj, moduli[i]);
    }
    let sm = smith(&b);
    let rank = sm.rank();
    let mut gens = Vec::new();
    for j in rank..b.ncols() {
        let col = sm.col_t.col_vec(j);
        let x = col[..a.ncols()].to_vec();
        if x.iter().any(|&v| v != 0) {
            gens.push(x);
        }
    }
    gens
}

/// One particular solution of `a*x ≡ b (mod moduli)` (same row convention as
/// [`kernel_lattice`]), if any.
pub fn solve_mod(a: &Mat, b: &[i128], moduli: &[i128]) -> Option<Vec<i128>> {
    assert_eq!(a.nrows(), b.len());
    assert_eq!(a.nrows(), moduli.len());
    let slack_cols: Vec<usize> = (0..moduli.len()).filter(|&i| moduli[i] != 0).collect();
    let mut m = Mat::zeros(a.nrows(), a.ncols() + slack_cols.len());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m.set(i, j, a.at(i, j));
        }
    }
    for (jj, &i) in slack_cols.iter().enumerate() {
        m.set(i, a.ncols() + jj, moduli[i]);
    }
    let sm = smith(&m);
    let rhs = sm.row_t.mul_vec(b);
    let n = m.ncols();
    let mut z = vec![0i128; n];
    for i in 0..m.nrows() {
        let d = if i < n { sm.s.at(i, i) } else { 0 };
        if d != 0 {
            if rhs[i] % d != 0 {
                return None;
            }
            z[i] = rhs[i] / d;
        } else if rhs[i] != 0 {
            return None;
        }
    }
    let w = sm.col_t.mul_vec(&z);
    Some(w[..a.ncols()].to_vec())
}

/// Presentation of the subgroup of `⊕ Z/ambient_orders` generated by the
/// columns of `gens_in`: canonical invariant factors, lifted generators, and
/// a coordinate solver for membership.
pub struct LatticePresentation {
    /// Invariant factors `> 1` in divisibility order.
    pub orders: Vec<i128>,
    /// One ambient-coordinate column per invariant factor.
    pub gens: Mat,
    raw_gens: Mat,
    row_t: Mat,
    kept: Vec<usize>,
    ambient_orders: Vec<i128>,
}

impl LatticePresentation {
    /// Canonical coordinates of an ambient vector, or `None` when it lies
    /// outside the subgroup.
    pub fn express(&self, v: &[i128]) -> Option<Vec<i128>> {
        let z = solve_mod(&self.raw_gens, v, &self.ambient_orders)?;
        let y = self.row_t.mul_vec(&z);
        Some(
            self.kept
                .iter()
                .zip(&self.orders)
                .map(|(&i, &s)| umod(y[i], s))
                .collect(),
        )
    }
}

pub fn present_lattice(gens_cols: &Mat, ambient_orders: &[i128]) -> LatticePresentation {
    assert_eq!(gens_cols.nrows(), ambient_orders.len());
    let n = gens_cols.ncols();
    let relations = kernel_lattice(gens_cols, ambient_orders);
    let rel = if relations.is_empty() {
        Mat::zeros(n, 1)
    } else {
        let mut m = Mat::zeros(n, relations.len());
        for (j, r) in relations.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, r[i]);
            }
        }
        m
    };
    let sm = smith(&rel);
    let mut kept = Vec::new();
    let mut orders = Vec::new();
    for i in 0..n {
        let s = if i < sm.s.ncols() { sm.s.at(i, i) } else { 0 };
        assert!(s != 0, "finite group has full-rank relation lattice");
        if s > 1 {
            kept.push(i);
            orders.push(s);
        }
    }
    let lifted = gens_cols.mul(&sm.row_t_inv);
    let gens = Mat::from_fn(ambient_orders.len(), kept.len(), |r, j| {
        umod(lifted.at(r, kept[j]), ambient_orders[r])
    });
    LatticePresentation {
        orders,
        gens,
        raw_gens: gens_cols.clone(),
        row_t: sm.row_t,
        kept,
        ambient_orders: ambient_orders.to_vec(),
    }
}

/// Presentation of the quotient of `⊕ Z/ambient_orders` by the subgroup
/// generated by `sub_rows`.
pub struct QuotientPresentation {
    /// Invariant factors `> 1` in divisibility order.
    pub orders: Vec<i128>,
    /// Ambient coordinates to canonical quotient coordinates (reduce mod
    /// `orders` after applying).
    pub project: Mat,
    /// A chosen lift of each canonical generator.
    pub section: Mat,
}

impl QuotientPresentation {
    pub fn apply(&self, v: &[i128]) -> Vec<i128> {
        self.project
            .mul_vec(v)
            .into_iter()
            .zip(&self.orders)
            .map(|(x, &s)| umod(x, s))
            .collect()
    }
}

pub fn present_quotient(sub_rows: &[Vec<i128>], ambient_orders: &[i128]) -> QuotientPresentation {
    let k = ambient_orders.len();
    let mut cols: Vec<Vec<i128>> = sub_rows.to_vec();
    for (i, &d) in ambient_orders.iter().enumerate() {
        let mut r = vec![0i128; k];
        r[i] = d;
        cols.push(r);
    }
    // relation columns of the quotient presentation
    let rel = Mat::from_rows(cols).transpose();
    let sm = smith(&rel);
    let mut kept = Vec::new();
    let mut orders = Vec::new();
    for i in 0..k {
        let s = if i < sm.s.ncols() { sm.s.at(i, i) } else { 0 };
        assert!(s != 0, "quotient of finite group is finite");
        if s > 1 {
            kept.push(i);
            orders.push(s);
        }
    }
    let project = Mat::from_fn(kept.len(), k, |j, c| sm.row_t.at(kept[j], c));
    let section = Mat::from_fn(k, kept.len(), |r, j| {
        umod(sm.row_t_inv.at(r, kept[j]), ambient_orders[r])
    });
    QuotientPresentation { orders, project, section }
}

/// A finite-index sublattice of `⊕ Z/orders`, canonicalized so equal
/// subgroups compare equal. Always contains the relation lattice
/// `diag(orders)·Z^k`.
#[derive(Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub ambient_orders: Vec<i128>,
    basis: Mat,
}

impl Subgroup {
    pub fn from_rows(ambient_orders: &[i128], rows: &[Vec<i128>]) -> Self {
        let k = ambient_orders.len();
        let mut all: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), k, "generator length mismatch");
                r.iter().zip(ambient_orders).map(|(&x, &d)| umod(x, d)).collect()
            })
            .collect();
        for (i, &d) in ambient_orders.iter().enumerate() {
            let mut row = vec![0i128; k];
            row[i] = d;
            all.push(row);
        }
        let basis = hermite_rows(&Mat::from_rows(all));
        Subgroup { ambient_orders: ambient_orders.to_vec(), basis }
    }

    pub fn zero(ambient_orders: &[i128]) -> Self {
        Subgroup::from_rows(ambient_orders, &[])
    }

    pub fn whole(ambient_orders: &[i128]) -> Self {
        let k = ambient_orders.len();
        let mut id = Vec::new();
        for i in 0..k {
            let mut row = vec![0i128; k];
            row[i] = 1;
            id.push(row);
        }
        Subgroup::from_rows(ambient_orders, &id)
    }

    pub fn basis_rows(&self) -> Vec<Vec<i128>> {
        self.basis.row_vecs()
    }

    /// Reduce `v` by the basis; returns the residue (zero iff `v` is a member).
    fn residue(&self, v: &[i128]) -> Vec<i128> {
        let mut x: Vec<i128> =
            v.iter().zip(&self.ambient_orders).map(|(&a, &d)| umod(a, d)).collect();
        for r in 0..self.basis.nrows() {
            let row = self.basis.row(r);
            let pc = row.iter().position(|&e| e != 0).unwrap();
            let q = x[pc].div_euclid(row[pc]);
            if q != 0 {
                for (xi, &bi) in x.iter_mut().zip(row) {
                    *xi = ck_add(*xi, ck_mul(-q, bi));
                }
            }
        }
        x
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.residue(v).iter().all(|&x| x == 0)
    }

    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.basis.row_vecs().iter().all(|r| self.contains(r))
    }

    /// Number of elements of the subgroup inside `⊕ Z/orders`.
    pub fn order(&self) -> i128 {
        let ambient: i128 = self.ambient_orders.iter().product();
        let mut idx = 1i128;
        for r in 0..self.basis.nrows() {
            let row = self.basis.row(r);
            let p = row.iter().find(|&&x| x != 0).unwrap();
            idx = ck_mul(idx, *p);
        }
        ambient / idx
    }

    /// Index in the ambient group, i.e. the order of the quotient.
    pub fn index(&self) -> i128 {
        let ambient: i128 = self.ambient_orders.iter().product();
        ambient / self.order()
    }

    pub fn is_zero(&self) -> bool {
        self.order() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.index() == 1
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        assert_eq!(self.ambient_orders, other.ambient_orders);
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Subgroup::from_rows(&self.ambient_orders, &rows)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        assert_eq!(self.ambient_orders, other.ambient_orders);
        let b1 = &self.basis;
        let b2 = &other.basis;
        // x = y1·B1 = y2·B2  ⇔  (y1, y2) in the kernel of [B1ᵀ | -B2ᵀ]
        let stacked = b1.transpose().hstack(&b2.transpose().neg());
        let moduli = vec![0i128; stacked.nrows()];
        let mut rows = Vec::new();
        for g in kernel_lattice(&stacked, &moduli) {
            let y1 = &g[..b1.nrows()];
            let x = b1.transpose().mul_vec(y1);
            rows.push(x);
        }
        Subgroup::from_rows(&self.ambient_orders, &rows)
    }

    /// All elements, in deterministic order. Intended for small subgroups.
    pub fn elements(&self) -> Vec<Vec<i128>> {
        let order = self.order();
        assert!(order <= 1 << 16, "subgroup too large to enumerate");
        let gens = self.basis.row_vecs();
        let mut seen = std::collections::BTreeSet::new();
        let zero = vec![0i128; self.ambient_orders.len()];
        seen.insert(zero.clone());
        let mut frontier = vec![zero];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y: Vec<i128> = x
                    .iter()
                    .zip(g)
                    .zip(&self.ambient_orders)
                    .map(|((&a, &b), &d)| umod(a + b, d))
                    .collect();
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.basis.row_vecs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smith_small() {
        let a = Mat::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let sm = smith(&a);
        assert_eq!(sm.row_t.mul(&a).mul(&sm.col_t), sm.s);
        assert_eq!(sm.diag(), vec![2, 2, 156]);
    }

    #[test]
    fn smith_divisibility_chain() {
        let a = Mat::from_rows(vec![vec![6, 4], vec![4, 6]]);
        let sm = smith(&a);
        let d = sm.diag();
        assert!(d[0] != 0 && d[1] % d[0] == 0);
    }

    #[test]
    fn kernel_mod_4() {
        // 2x ≡ 0 (mod 4): solutions generated by 2 (and 4)
        let a = Mat::from_rows(vec![vec![2]]);
        let gens = kernel_lattice(&a, &[4]);
        let sg = Subgroup::from_rows(&[4], &gens);
        assert_eq!(sg.order(), 2);
        assert!(sg.contains(&[2]));
        assert!(!sg.contains(&[1]));
    }

    #[test]
    fn solve_particular() {
        // 3x ≡ 6 (mod 12) has x = 2 as a solution family
        let a = Mat::from_rows(vec![vec![3]]);
        let x = solve_mod(&a, &[6], &[12]).unwrap();
        assert_eq!(umod(3 * x[0], 12), 6);
        assert!(solve_mod(&Mat::from_rows(vec![vec![2]]), &[1], &[4]).is_none());
    }

    #[test]
    fn hermite_canonical() {
        let a = Mat::from_rows(vec![vec![2, 0], vec![0, 2], vec![1, 1]]);
        let b = Mat::from_rows(vec![vec![1, 1], vec![2, 2], vec![0, 2]]);
        assert_eq!(hermite_rows(&a), hermite_rows(&b));
    }

    #[test]
    fn subgroup_order_and_membership() {
        // subgroup of Z/12 generated by 3
        let sg = Subgroup::from_rows(&[12], &[vec![3]]);
        assert_eq!(sg.order(), 4);
        assert!(sg.contains(&[9]));
        assert!(!sg.contains(&[2]));
        assert_eq!(sg.elements().len(), 4);
    }

    #[test]
    fn subgroup_sum_intersect() {
        let a = Subgroup::from_rows(&[12], &[vec![4]]);
        let b = Subgroup::from_rows(&[12], &[vec![6]]);
        assert_eq!(a.sum(&b).order(), 6); // (2)
        assert_eq!(a.intersect(&b).order(), 1); // (4)∩(6) = {0} in Z/12
    }

    #[test]
    fn presentation_of_sublattice() {
        // subgroup of Z/4 ⊕ Z/2 generated by (2,1): cyclic of order 2... no —
        // (2,1) has order 2? 2*(2,1) = (0,0). order 2.
        let gens = Mat::from_rows(vec![vec![2], vec![1]]);
        let p = present_lattice(&gens, &[4, 2]);
        assert_eq!(p.orders, vec![2]);
        assert_eq!(p.express(&[2, 1]), Some(vec![1]));
        assert_eq!(p.express(&[0, 0]), Some(vec![0]));
        assert_eq!(p.express(&[1, 0]), None);
    }

    #[test]
    fn presentation_of_quotient() {
        // Z/4 ⊕ Z/2 modulo (2,1): order 8/2 = 4
        let q = present_quotient(&[vec![2, 1]], &[4, 2]);
        let total: i128 = q.orders.iter().product();
        assert_eq!(total, 4);
        assert_eq!(q.apply(&[2, 1]), vec![0; q.orders.len()]);
        // projection of the section is the identity on canonical coords
        for j in 0..q.orders.len() {
            let v = q.section.col_vec(j);
            let mut unit = vec![0i128; q.orders.len()];
            unit[j] = 1;
            assert_eq!(q.apply(&v), unit);
        }
    }

    fn small_mat() -> impl Strategy<Value = Mat> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-9i128..10, r * c)
                .prop_map(move |v| Mat { rows: r, cols: c, a: v })
        })
    }

    proptest! {
        #[test]
        fn smith_transform_identity(a in small_mat()) {
            let sm = smith(&a);
            prop_assert_eq!(sm.row_t.mul(&a).mul(&sm.col_t), sm.s.clone());
            prop_assert_eq!(sm.row_t.mul(&sm.row_t_inv), Mat::identity(a.nrows()));
            prop_assert_eq!(sm.col_t.mul(&sm.col_t_inv), Mat::identity(a.ncols()));
            let d = sm.diag();
            for w in d.windows(2) {
                if w[0] != 0 && w[1] != 0 {
                    prop_assert_eq!(w[1] % w[0], 0);
                }
            }
        }

        #[test]
        fn kernel_members_satisfy_system(a in small_mat()) {
            let moduli: Vec<i128> = (0..a.nrows()).map(|i| [0, 2, 3, 4, 6][i % 5]).collect();
            for g in kernel_lattice(&a, &moduli) {
                let img = a.mul_vec(&g);
                for (i, &x) in img.iter().enumerate() {
                    if moduli[i] == 0 {
                        prop_assert_eq!(x, 0);
                    } else {
                        prop_assert_eq!(x.rem_euclid(moduli[i]), 0);
                    }
                }
            }
        }
    }
}
