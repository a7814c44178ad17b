//! Finite commutative rings presented by additive cyclic factors and
//! multiplication structure constants, with local decomposition, prime
//! spectra and the ideal-geometry primitives (`V`, `U`, specialization
//! closure, min/max).
//!
//! Every prime of a finite commutative ring is maximal, and the ring splits
//! as a product of local artinian rings; both facts are recomputed and
//! checked rather than assumed.

use crate::linalg::{
    self, present_lattice, present_quotient, umod, Mat, Subgroup,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Hard cap on ring cardinality; elementwise sweeps stay cheap below it.
pub const MAX_RING_ORDER: i128 = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum RingError {
    #[error("ring order {0} exceeds the cap {MAX_RING_ORDER}")]
    TooLarge(i128),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(i128),
    #[error("{0} is not prime")]
    NotPrime(i128),
    #[error("minimal polynomial must be monic of degree {0}")]
    BadMinPoly(usize),
    #[error("minimal polynomial is reducible: divisible by a degree-{0} factor")]
    ReduciblePoly(usize),
    #[error("variable {0:?} has no nilpotency relation; quotient is not finite")]
    UnboundVariable(String),
    #[error("duplicate relation for variable {0:?}")]
    DuplicateRelation(String),
    #[error("structure constants are not commutative at generators {0}, {1}")]
    NotCommutative(usize, usize),
    #[error("structure constants are not associative at generators {0}, {1}, {2}")]
    NotAssociative(usize, usize, usize),
    #[error("declared identity is not a unit for generator {0}")]
    BadUnit(usize),
    #[error("structure constant out of range at ({0}, {1})")]
    ConstantRange(usize, usize),
    #[error("empty product")]
    EmptyProduct,
    #[error("prime ideal does not belong to this ring's spectrum")]
    ForeignPrime,
}

/// Serializable construction recipe for a finite commutative ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RingSpec {
    /// Integers modulo `n`.
    Zmod { n: i64 },
    /// Finite field of order `p^deg` presented by a monic irreducible
    /// polynomial (constant coefficient first, length `deg + 1`).
    Gf { p: i64, deg: usize, min_poly: Vec<i64> },
    /// `(Z/char)[vars] / (var_i^{k_i})` with one nilpotency relation per
    /// variable; relations are pairs `[var, k]`.
    Quot { char: i64, vars: Vec<String>, relations: Vec<(String, u32)> },
    /// Finite direct product.
    Product { factors: Vec<RingSpec> },
}

/// One local factor of a finite ring: a primitive idempotent together with
/// the factor ring `e·R` and the coordinate maps both ways.
pub struct LocalFactor {
    pub idempotent: Vec<i128>,
    pub ring: Arc<Ring>,
    /// factor coordinates -> ambient coordinates
    pub embed: Mat,
    /// ambient coordinates -> factor coordinates (`xable ↦ e·x`)
    pub project: Mat,
}

/// A maximal ideal, stored as a canonical additive-subgroup basis plus the
/// index of the local factor it comes from.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub subgroup: Subgroup,
    pub local_index: usize,
}

impl fmt::Debug for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeIdeal#{} {:?}", self.local_index, self.subgroup)
    }
}

/// A finitely generated ideal: its generators and the additive subgroup they
/// span (which is multiplication-closed by construction).
#[derive(Clone, PartialEq, Eq)]
pub struct Ideal {
    pub generators: Vec<Vec<i128>>,
    pub subgroup: Subgroup,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{:?}", self.subgroup)
    }
}

pub struct Decomposition {
    pub jacobson: Ideal,
    pub factors: Vec<LocalFactor>,
    pub spectrum: Vec<PrimeIdeal>,
}

/// Finite commutative ring: additive group `⊕ Z/d_i` with multiplication
/// given on generators by structure constants. Immutable after construction;
/// the local decomposition is computed once on demand.
pub struct Ring {
    additive_orders: Vec<i128>,
    /// `mul_table[i][j]` = coordinates of `g_i · g_j`
    mul_table: Vec<Vec<Vec<i128>>>,
    one: Vec<i128>,
    label: String,
    decomp: OnceLock<Decomposition>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.additive_orders == other.additive_orders
            && self.mul_table == other.mul_table
            && self.one == other.one
    }
}
impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({}, orders {:?})", self.label, self.additive_orders)
    }
}

impl Ring {
    pub fn additive_orders(&self) -> &[i128] {
        &self.additive_orders
    }

    pub fn dim(&self) -> usize {
        self.additive_orders.len()
    }

    pub fn order(&self) -> i128 {
        self.additive_orders.iter().product()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn one(&self) -> Vec<i128> {
        self.one.clone()
    }

    pub fn zero(&self) -> Vec<i128> {
        vec![0; self.dim()]
    }

    pub fn structure_constant(&self, i: usize, j: usize) -> &[i128] {
        &self.mul_table[i][j]
    }

    pub fn reduce(&self, v: &[i128]) -> Vec<i128> {
        v.iter().zip(&self.additive_orders).map(|(&x, &d)| umod(x, d)).collect()
    }

    pub fn add(&self, x: &[i128], y: &[i128]) -> Vec<i128> {
        x.iter()
            .zip(y)
            .zip(&self.additive_orders)
            .map(|((&a, &b), &d)| umod(a + b, d))
            .collect()
    }

    pub fn neg(&self, x: &[i128]) -> Vec<i128> {
        x.iter().zip(&self.additive_orders).map(|(&a, &d)| umod(-a, d)).collect()
    }

    pub fn mul(&self, x: &[i128], y: &[i128]) -> Vec<i128> {
        let mut acc = vec![0i128; self.dim()];
        for i in 0..self.dim() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.dim() {
                if y[j] == 0 {
                    continue;
                }
                let c = x[i] * y[j];
                for (a, &t) in acc.iter_mut().zip(&self.mul_table[i][j]) {
                    *a += c * t;
                }
            }
        }
        self.reduce(&acc)
    }

    pub fn pow(&self, x: &[i128], mut n: u64) -> Vec<i128> {
        let mut base = x.to_vec();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn is_nilpotent(&self, x: &[i128]) -> bool {
        let mut y = self.reduce(x);
        // nilpotency index is at most |R| ≤ 2^16, so 17 squarings decide
        for _ in 0..17 {
            if y.iter().all(|&v| v == 0) {
                return true;
            }
            y = self.mul(&y, &y);
        }
        y.iter().all(|&v| v == 0)
    }

    /// Matrix of multiplication by `x` on the additive generators.
    pub fn mul_matrix(&self, x: &[i128]) -> Mat {
        let k = self.dim();
        Mat::from_fn(k, k, |r, c| {
            let mut acc = 0i128;
            for i in 0..k {
                if x[i] != 0 {
                    acc += x[i] * self.mul_table[i][c][r];
                }
            }
            umod(acc, self.additive_orders[r])
        })
    }

    /// Deterministic enumeration of all elements in mixed-radix order.
    pub fn elements(&self) -> ElementIter {
        ElementIter { orders: self.additive_orders.clone(), next: Some(vec![0; self.dim()]) }
    }

    pub fn spec(self: &Arc<Self>) -> &Decomposition {
        self.decomp.get_or_init(|| decompose(self))
    }

    pub fn spectrum(self: &Arc<Self>) -> &[PrimeIdeal] {
        &self.spec().spectrum
    }

    pub fn jacobson_radical(self: &Arc<Self>) -> &Ideal {
        &self.spec().jacobson
    }

    pub fn local_factors(self: &Arc<Self>) -> &[LocalFactor] {
        &self.spec().factors
    }

    /// Index of `p` inside this ring's spectrum.
    pub fn prime_index(self: &Arc<Self>, p: &PrimeIdeal) -> Result<usize, RingError> {
        self.spectrum()
            .iter()
            .position(|q| q == p)
            .ok_or(RingError::ForeignPrime)
    }

    pub fn ideal(&self, generators: &[Vec<i128>]) -> Ideal {
        let mut rows = Vec::new();
        for g in generators {
            let g = self.reduce(g);
            // additive closure under multiplication by all ring generators
            for i in 0..self.dim() {
                let mut unit = self.zero();
                unit[i] = 1;
                rows.push(self.mul(&g, &unit));
            }
            rows.push(g);
        }
        Ideal {
            generators: generators.iter().map(|g| self.reduce(g)).collect(),
            subgroup: Subgroup::from_rows(&self.additive_orders, &rows),
        }
    }

    pub fn zero_ideal(&self) -> Ideal {
        self.ideal(&[])
    }

    pub fn unit_ideal(&self) -> Ideal {
        self.ideal(&[self.one()])
    }
}

pub struct ElementIter {
    orders: Vec<i128>,
    next: Option<Vec<i128>>,
}

impl Iterator for ElementIter {
    type Item = Vec<i128>;
    fn next(&mut self) -> Option<Vec<i128>> {
        let cur = self.next.take()?;
        // lexicographic order: the last coordinate varies fastest
        let mut nxt = cur.clone();
        let mut i = nxt.len();
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            nxt[i] += 1;
            if nxt[i] < self.orders[i] {
                self.next = Some(nxt);
                break;
            }
            nxt[i] = 0;
        }
        Some(cur)
    }
}

/// Validate structure constants and canonicalize the generator order
/// (additive orders ascending, stable).
pub fn build_ring(spec: &RingSpec) -> Result<Arc<Ring>, RingError> {
    let raw = construct(spec)?;
    if raw.order() > MAX_RING_ORDER {
        return Err(RingError::TooLarge(raw.order()));
    }
    let canon = canonicalize(raw);
    validate(&canon)?;
    Ok(Arc::new(canon))
}

fn construct(spec: &RingSpec) -> Result<Ring, RingError> {
    match spec {
        RingSpec::Zmod { n } => {
            let n = *n as i128;
            if n < 2 {
                return Err(RingError::BadModulus(n));
            }
            Ok(Ring {
                additive_orders: vec![n],
                mul_table: vec![vec![vec![1]]],
                one: vec![1],
                label: format!("Z/{n}"),
                decomp: OnceLock::new(),
            })
        }
        RingSpec::Gf { p, deg, min_poly } => {
            let poly: Vec<i128> = min_poly.iter().map(|&c| c as i128).collect();
            build_gf(*p as i128, *deg, &poly)
        }
        RingSpec::Quot { char, vars, relations } => build_quot(*char as i128, vars, relations),
        RingSpec::Product { factors } => {
            if factors.is_empty() {
                return Err(RingError::EmptyProduct);
            }
            let built: Result<Vec<Ring>, _> = factors.iter().map(construct).collect();
            Ok(product(built?))
        }
    }
}

fn is_prime(n: i128) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of polynomial division over F_p; coefficients constant-first.
fn poly_rem(mut a: Vec<i128>, b: &[i128], p: i128) -> Vec<i128> {
    let db = b.len() - 1;
    let lead_inv = mod_inverse(b[db], p);
    while a.len() > db {
        let da = a.len() - 1;
        let c = umod(a[da] * lead_inv, p);
        if c != 0 {
            for i in 0..=db {
                a[da - db + i] = umod(a[da - db + i] - c * b[i], p);
            }
        }
        while a.len() > 1 && *a.last().unwrap() == 0 {
            a.pop();
        }
        if a.len() == da + 1 {
            break; // leading coefficient survived; should not happen over a field
        }
    }
    a
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    // p is prime here; Fermat
    let mut acc = 1i128;
    let mut base = umod(a, p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = umod(acc * base, p);
        }
        base = umod(base * base, p);
        e >>= 1;
    }
    acc
}

fn build_gf(p: i128, deg: usize, min_poly: &[i128]) -> Result<Ring, RingError> {
    if !is_prime(p) {
        return Err(RingError::NotPrime(p));
    }
    if deg == 0 || min_poly.len() != deg + 1 || umod(min_poly[deg], p) != 1 {
        return Err(RingError::BadMinPoly(deg));
    }
    let poly: Vec<i128> = min_poly.iter().map(|&c| umod(c, p)).collect();
    // trial division by every monic polynomial of degree 1..=deg/2
    for d in 1..=deg / 2 {
        let mut counter = vec![0i128; d];
        loop {
            let mut cand = counter.clone();
            cand.push(1);
            let rem = poly_rem(poly.clone(), &cand, p);
            if rem.iter().all(|&c| c == 0) {
                return Err(RingError::ReduciblePoly(d));
            }
            let mut i = 0;
            loop {
                if i == d {
                    break;
                }
                counter[i] += 1;
                if counter[i] < p {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
    }
    // basis 1, x, ..., x^{deg-1}; multiply and reduce by the minimal polynomial
    let mut table = vec![vec![vec![0i128; deg]; deg]; deg];
    for i in 0..deg {
        for j in 0..deg {
            let mut prod = vec![0i128; i + j + 1];
            prod[i + j] = 1;
            let rem = poly_rem(prod, &poly, p);
            let mut coords = vec![0i128; deg];
            for (t, &c) in rem.iter().enumerate() {
                coords[t] = umod(c, p);
            }
            table[i][j] = coords;
        }
    }
    let mut one = vec![0i128; deg];
    one[0] = 1;
    Ok(Ring {
        additive_orders: vec![p; deg],
        mul_table: table,
        one,
        label: format!("GF({})", p.pow(deg as u32)),
        decomp: OnceLock::new(),
    })
}

fn build_quot(ch: i128, vars: &[String], relations: &[(String, u32)]) -> Result<Ring, RingError> {
    if ch < 2 {
        return Err(RingError::BadModulus(ch));
    }
    let mut bound = vec![None; vars.len()];
    for (v, k) in relations {
        let idx = vars
            .iter()
            .position(|w| w == v)
            .ok_or_else(|| RingError::UnboundVariable(v.clone()))?;
        if bound[idx].is_some() {
            return Err(RingError::DuplicateRelation(v.clone()));
        }
        if *k == 0 {
            return Err(RingError::BadMinPoly(0));
        }
        bound[idx] = Some(*k);
    }
    let bounds: Result<Vec<u32>, RingError> = bound
        .iter()
        .zip(vars)
        .map(|(b, v)| b.ok_or_else(|| RingError::UnboundVariable(v.clone())))
        .collect();
    let bounds = bounds?;
    // monomial basis: exponent vectors below the bounds, lex order
    let mut basis: Vec<Vec<u32>> = vec![vec![]];
    for &b in &bounds {
        let mut next = Vec::new();
        for e in &basis {
            for x in 0..b {
                let mut e2 = e.clone();
                e2.push(x);
                next.push(e2);
            }
        }
        basis = next;
    }
    let n = basis.len();
    let mut table = vec![vec![vec![0i128; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let sum: Vec<u32> = basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect();
            let vanishes = sum.iter().zip(&bounds).any(|(&s, &b)| s >= b);
            if !vanishes {
                let pos = basis.iter().position(|e| *e == sum).unwrap();
                table[i][j][pos] = 1;
            }
        }
    }
    let mut one = vec![0i128; n];
    one[0] = 1;
    let rel_label = vars
        .iter()
        .zip(&bounds)
        .map(|(v, b)| format!("{v}^{b}"))
        .collect::<Vec<_>>()
        .join(",");
    Ok(Ring {
        additive_orders: vec![ch; n],
        mul_table: table,
        one,
        label: format!("Z/{ch}[{}]/({rel_label})", vars.join(",")),
        decomp: OnceLock::new(),
    })
}

fn product(factors: Vec<Ring>) -> Ring {
    let mut orders = Vec::new();
    let mut one = Vec::new();
    let mut offsets = Vec::new();
    for f in &factors {
        offsets.push(orders.len());
        orders.extend_from_slice(&f.additive_orders);
        one.extend(f.one.iter().copied());
    }
    let n = orders.len();
    let mut table = vec![vec![vec![0i128; n]; n]; n];
    for (f, &off) in factors.iter().zip(&offsets) {
        let d = f.dim();
        for i in 0..d {
            for j in 0..d {
                for t in 0..d {
                    table[off + i][off + j][off + t] = f.mul_table[i][j][t];
                }
            }
        }
    }
    let label = factors.iter().map(|f| f.label.clone()).collect::<Vec<_>>().join(" x ");
    Ring { additive_orders: orders, mul_table: table, one, label, decomp: OnceLock::new() }
}

/// Stable-sort generators by additive order so serialization is canonical.
fn canonicalize(r: Ring) -> Ring {
    let mut perm: Vec<usize> = (0..r.dim()).collect();
    perm.sort_by_key(|&i| r.additive_orders[i]);
    if perm.iter().enumerate().all(|(a, &b)| a == b) {
        return r;
    }
    let inv: Vec<usize> = {
        let mut v = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            v[old] = new;
        }
        v
    };
    let orders: Vec<i128> = perm.iter().map(|&i| r.additive_orders[i]).collect();
    let n = r.dim();
    let mut table = vec![vec![vec![0i128; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for t in 0..n {
                table[inv[i]][inv[j]][inv[t]] = r.mul_table[i][j][t];
            }
        }
    }
    let one: Vec<i128> = perm.iter().map(|&i| r.one[i]).collect();
    Ring {
        additive_orders: orders,
        mul_table: table,
        one,
        label: r.label,
        decomp: OnceLock::new(),
    }
}

fn validate(r: &Ring) -> Result<(), RingError> {
    let n = r.dim();
    for i in 0..n {
        for j in 0..n {
            for t in 0..n {
                let c = r.mul_table[i][j][t];
                if c < 0 || c >= r.additive_orders[t] {
                    return Err(RingError::ConstantRange(i, j));
                }
            }
            if r.mul_table[i][j] != r.mul_table[j][i] {
                return Err(RingError::NotCommutative(i, j));
            }
        }
    }
    let gen = |i: usize| {
        let mut v = vec![0i128; n];
        v[i] = 1;
        v
    };
    for i in 0..n {
        if r.mul(&r.one, &gen(i)) != gen(i) {
            return Err(RingError::BadUnit(i));
        }
        for j in 0..n {
            for t in 0..n {
                let ab_c = r.mul(&r.mul_table[i][j], &gen(t));
                let a_bc = r.mul(&gen(i), &r.mul_table[j][t]);
                if ab_c != a_bc {
                    return Err(RingError::NotAssociative(i, j, t));
                }
            }
        }
    }
    Ok(())
}

/// Compute J(R) as the nilpotent elements, split R/J into fields by
/// enumerating idempotents of the semisimple quotient, then Hensel-lift the
/// primitive idempotents back along `e ← 3e² − 2e³`.
fn decompose(ring: &Arc<Ring>) -> Decomposition {
    let nilpotent_rows: Vec<Vec<i128>> =
        ring.elements().filter(|x| ring.is_nilpotent(x)).collect();
    let jac_sub = Subgroup::from_rows(ring.additive_orders(), &nilpotent_rows);
    let jacobson = Ideal { generators: jac_sub.basis_rows(), subgroup: jac_sub.clone() };

    // semisimple quotient
    let q = present_quotient(&jac_sub.basis_rows(), ring.additive_orders());
    let semisimple = quotient_ring_raw(ring, &q);

    // primitive idempotents of R/J: minimal nonzero under e ≤ f ⇔ ef = e
    let all_idems: Vec<Vec<i128>> = semisimple
        .elements()
        .filter(|e| e.iter().any(|&x| x != 0) && semisimple.mul(e, e) == *e)
        .collect();
    let idems: Vec<Vec<i128>> = all_idems
        .iter()
        .filter(|e| {
            !all_idems
                .iter()
                .any(|f| f != *e && &semisimple.mul(e, f) == f)
        })
        .cloned()
        .collect();

    // lift each primitive idempotent along the section and stabilize
    let mut lifted: Vec<Vec<i128>> = Vec::new();
    for e_bar in &idems {
        let mut e = ring.reduce(&q.section.mul_vec(e_bar));
        loop {
            // 3e² − 2e³
            let e2 = ring.mul(&e, &e);
            let e3 = ring.mul(&e2, &e);
            let next = ring.add(
                &ring.add(&e2, &ring.add(&e2, &e2)),
                &ring.neg(&ring.add(&e3, &e3)),
            );
            if next == e {
                break;
            }
            e = next;
        }
        debug_assert_eq!(ring.mul(&e, &e), e);
        lifted.push(e);
    }
    // deterministic factor order: by lifted idempotent coordinates
    lifted.sort();
    // orthogonality and completeness are consequences; check them anyway
    let mut total = ring.zero();
    for (a, ea) in lifted.iter().enumerate() {
        total = ring.add(&total, ea);
        for eb in lifted.iter().skip(a + 1) {
            assert!(
                ring.mul(ea, eb).iter().all(|&x| x == 0),
                "lifted idempotents must be orthogonal"
            );
        }
    }
    assert_eq!(total, ring.one(), "lifted idempotents must sum to 1");

    let mut factors = Vec::new();
    let mut spectrum = Vec::new();
    for (idx, e) in lifted.iter().enumerate() {
        let p_mat = ring.mul_matrix(e);
        let pres = present_lattice(&p_mat, ring.additive_orders());
        let k = pres.orders.len();
        // structure constants of e·R on the canonical basis
        let mut table = vec![vec![vec![0i128; k]; k]; k];
        for i in 0..k {
            for j in 0..k {
                let prod = ring.mul(&pres.gens.col_vec(i), &pres.gens.col_vec(j));
                table[i][j] = pres.express(&prod).expect("product stays in the factor");
            }
        }
        let one_f = pres.express(&ring.mul(e, &ring.one())).expect("e is the factor unit");
        let factor = Ring {
            additive_orders: pres.orders.clone(),
            mul_table: table,
            one: one_f,
            label: format!("{}|e{}", ring.label, idx),
            decomp: OnceLock::new(),
        };
        validate(&factor).expect("factor ring inherits the ring axioms");
        let factor = Arc::new(factor);

        // project: x ↦ e·x in factor coordinates
        let mut proj_cols = Vec::new();
        for c in 0..ring.dim() {
            let col = pres
                .express(&p_mat.col_vec(c))
                .expect("e·g lies in the factor subgroup");
            proj_cols.push(col);
        }
        let project = Mat::from_fn(k, ring.dim(), |r, c| proj_cols[c][r]);
        let embed = pres.gens.clone();

        // maximal ideal of the factor (its nilpotents), pulled back to R
        let m_rows: Vec<Vec<i128>> = {
            let mut rows: Vec<Vec<i128>> = factor
                .elements()
                .filter(|x| factor.is_nilpotent(x))
                .map(|x| embed.mul_vec(&x))
                .collect();
            // everything outside the factor also lies in the preimage
            for (other_idx, other) in lifted.iter().enumerate() {
                if other_idx != idx {
                    let m = ring.mul_matrix(other);
                    for c in 0..ring.dim() {
                        rows.push(m.col_vec(c));
                    }
                }
            }
            rows
        };
        let subgroup = Subgroup::from_rows(ring.additive_orders(), &m_rows);
        assert!(is_prime(subgroup.index()) || is_prime_power(subgroup.index()));
        spectrum.push(PrimeIdeal { subgroup, local_index: idx });
        factors.push(LocalFactor { idempotent: e.clone(), ring: factor, embed, project });
    }
    // J(R) must be the intersection of the spectrum
    let mut inter = Subgroup::whole(ring.additive_orders());
    for p in &spectrum {
        inter = inter.intersect(&p.subgroup);
    }
    assert_eq!(inter, jacobson.subgroup, "Jacobson radical equals the intersection of Spec");
    // every prime here is maximal: the quotient must be a field
    for p in &spectrum {
        let q = quotient_ring_raw(
            ring,
            &present_quotient(&p.subgroup.basis_rows(), ring.additive_orders()),
        );
        let q = Arc::new(q);
        assert!(is_field(&q), "Spec = Max over a finite ring");
    }
    Decomposition { jacobson, factors, spectrum }
}

fn is_prime_power(n: i128) -> bool {
    let mut m = n;
    if m < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            return m == 1;
        }
        d += 1;
    }
    true // n itself prime
}

fn quotient_ring_raw(ring: &Ring, q: &linalg::QuotientPresentation) -> Ring {
    let k = q.orders.len();
    let mut table = vec![vec![vec![0i128; k]; k]; k];
    for i in 0..k {
        for j in 0..k {
            let a = q.section.col_vec(i);
            let b = q.section.col_vec(j);
            table[i][j] = q.apply(&ring.mul(&a, &b));
        }
    }
    Ring {
        additive_orders: q.orders.clone(),
        mul_table: table,
        one: q.apply(&ring.one),
        label: format!("{}/~", ring.label),
        decomp: OnceLock::new(),
    }
}

/// Quotient ring `R/a` with projection and a chosen section.
pub struct QuotientRing {
    pub ring: Arc<Ring>,
    pub project: Mat,
    pub section: Mat,
    pub orders: Vec<i128>,
}

pub fn quotient_ring(ring: &Arc<Ring>, ideal: &Ideal) -> QuotientRing {
    let q = present_quotient(&ideal.subgroup.basis_rows(), ring.additive_orders());
    let raw = quotient_ring_raw(ring, &q);
    validate(&raw).expect("quotient of a commutative ring is a commutative ring");
    QuotientRing {
        ring: Arc::new(raw),
        project: q.project.clone(),
        section: q.section.clone(),
        orders: q.orders.clone(),
    }
}

/// True when the finite commutative ring is a field: reduced and connected.
pub fn is_field(ring: &Arc<Ring>) -> bool {
    if ring.order() == 1 {
        return false;
    }
    let reduced = ring.elements().all(|x| {
        !ring.is_nilpotent(&x) || x.iter().all(|&v| v == 0)
    });
    if !reduced {
        return false;
    }
    ring.elements()
        .filter(|e| ring.mul(e, e) == *e)
        .all(|e| e.iter().all(|&v| v == 0) || e == ring.one())
}

// --- locus operations ---------------------------------------------------

/// `V(a)`: primes containing the ideal.
pub fn v_of_ideal(ring: &Arc<Ring>, a: &Ideal) -> Vec<usize> {
    ring.spectrum()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.subgroup.contains_subgroup(&a.subgroup))
        .map(|(i, _)| i)
        .collect()
}

/// `U(p)`: primes contained in `p`.
pub fn u_of_prime(ring: &Arc<Ring>, p: &PrimeIdeal) -> Result<Vec<usize>, RingError> {
    ring.prime_index(p)?;
    Ok(ring
        .spectrum()
        .iter()
        .enumerate()
        .filter(|(_, q)| p.subgroup.contains_subgroup(&q.subgroup))
        .map(|(i, _)| i)
        .collect())
}

/// Specialization closure of a set of primes (indices into the spectrum).
pub fn specialization_closure(ring: &Arc<Ring>, set: &[usize]) -> Vec<usize> {
    let spec = ring.spectrum();
    let mut out: Vec<usize> = spec
        .iter()
        .enumerate()
        .filter(|(_, p)| set.iter().any(|&i| p.subgroup.contains_subgroup(&spec[i].subgroup)))
        .map(|(i, _)| i)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Minimal elements of a prime set under containment.
pub fn minimal_primes(ring: &Arc<Ring>, set: &[usize]) -> Vec<usize> {
    let spec = ring.spectrum();
    let mut out: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&i| {
            !set.iter().any(|&j| {
                j != i
                    && spec[i].subgroup.contains_subgroup(&spec[j].subgroup)
                    && spec[i].subgroup != spec[j].subgroup
            })
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Maximal elements of a prime set under containment.
pub fn maximal_primes(ring: &Arc<Ring>, set: &[usize]) -> Vec<usize> {
    let spec = ring.spectrum();
    let mut out: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&i| {
            !set.iter().any(|&j| {
                j != i
                    && spec[j].subgroup.contains_subgroup(&spec[i].subgroup)
                    && spec[i].subgroup != spec[j].subgroup
            })
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Zariski closure: `V` of the intersection of the primes in the set.
pub fn zariski_closure(ring: &Arc<Ring>, set: &[usize]) -> Vec<usize> {
    if set.is_empty() {
        return Vec::new();
    }
    let spec = ring.spectrum();
    let mut inter = spec[set[0]].subgroup.clone();
    for &i in &set[1..] {
        inter = inter.intersect(&spec[i].subgroup);
    }
    let ideal = Ideal { generators: inter.basis_rows(), subgroup: inter };
    v_of_ideal(ring, &ideal)
}

/// Display label for a prime: a principal generator when the ring is
/// presented on a single additive generator, otherwise basis rows.
pub fn prime_label(ring: &Arc<Ring>, idx: usize) -> String {
    let p = &ring.spectrum()[idx];
    if ring.dim() == 1 {
        let g = p
            .subgroup
            .basis_rows()
            .iter()
            .map(|r| r[0])
            .filter(|&x| x > 0)
            .min()
            .unwrap_or(0);
        format!("({g})")
    } else {
        format!("m{}", p.local_index)
    }
}

// --- catalog --------------------------------------------------------------

/// The ten-ring suite catalog: local and non-local rings, principal and
/// non-principal socles, several characteristics.
pub fn catalog_specs() -> Vec<(&'static str, RingSpec)> {
    vec![
        ("z4", RingSpec::Zmod { n: 4 }),
        ("z8", RingSpec::Zmod { n: 8 }),
        ("z9", RingSpec::Zmod { n: 9 }),
        ("z6", RingSpec::Zmod { n: 6 }),
        ("z12", RingSpec::Zmod { n: 12 }),
        (
            "f2x2",
            RingSpec::Quot {
                char: 2,
                vars: vec!["x".into()],
                relations: vec![("x".into(), 2)],
            },
        ),
        (
            "f2x3",
            RingSpec::Quot {
                char: 2,
                vars: vec!["x".into()],
                relations: vec![("x".into(), 3)],
            },
        ),
        (
            "f3x2",
            RingSpec::Quot {
                char: 3,
                vars: vec!["x".into()],
                relations: vec![("x".into(), 2)],
            },
        ),
        ("gf4", RingSpec::Gf { p: 2, deg: 2, min_poly: vec![1, 1, 1] }),
        (
            "z2xz4",
            RingSpec::Product {
                factors: vec![RingSpec::Zmod { n: 2 }, RingSpec::Zmod { n: 4 }],
            },
        ),
    ]
}

pub fn catalog() -> Vec<(&'static str, Arc<Ring>)> {
    catalog_specs()
        .into_iter()
        .map(|(name, spec)| (name, build_ring(&spec).expect("catalog ring builds")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmod(n: i64) -> Arc<Ring> {
        build_ring(&RingSpec::Zmod { n }).unwrap()
    }

    #[test]
    fn z12_builds() {
        let r = zmod(12);
        assert_eq!(r.additive_orders(), &[12]);
        assert_eq!(r.order(), 12);
    }

    #[test]
    fn gf4_multiplicative_order() {
        // independent oracle: exhaust the multiplication table of 4 elements
        let r = build_ring(&RingSpec::Gf { p: 2, deg: 2, min_poly: vec![1, 1, 1] }).unwrap();
        assert_eq!(r.additive_orders(), &[2, 2]);
        let x_plus_one = vec![1, 1];
        let sq = r.mul(&x_plus_one, &x_plus_one);
        let cube = r.mul(&sq, &x_plus_one);
        assert_ne!(sq, r.one());
        assert_eq!(cube, r.one(), "1+x has multiplicative order 3 in GF(4)");
        // every nonzero element is invertible
        for a in r.elements().filter(|a| a.iter().any(|&v| v != 0)) {
            let inv_exists = r
                .elements()
                .any(|b| r.mul(&a, &b) == r.one());
            assert!(inv_exists);
        }
    }

    #[test]
    fn reducible_poly_rejected() {
        // x^2 + 1 = (x+1)^2 over F_2
        let e = build_ring(&RingSpec::Gf { p: 2, deg: 2, min_poly: vec![1, 0, 1] });
        assert!(matches!(e, Err(RingError::ReduciblePoly(_))));
    }

    #[test]
    fn product_componentwise() {
        // independent componentwise oracle for Z/4 × F_2[x]/(x²)
        let spec = RingSpec::Product {
            factors: vec![
                RingSpec::Zmod { n: 4 },
                RingSpec::Quot {
                    char: 2,
                    vars: vec!["x".into()],
                    relations: vec![("x".into(), 2)],
                },
            ],
        };
        let r = build_ring(&spec).unwrap();
        assert_eq!(r.order(), 16);
        assert_eq!(r.local_factors().len(), 2);
    }

    #[test]
    fn z6_idempotents() {
        // independent oracle: enumerate all e with e² = e in Z/6
        let r = zmod(6);
        let idems: Vec<i128> = r
            .elements()
            .filter(|e| r.mul(e, e) == *e && e.iter().any(|&x| x != 0) && *e != r.one())
            .map(|e| e[0])
            .collect();
        assert_eq!(idems, vec![3, 4]);
        let f = r.local_factors();
        assert_eq!(f.len(), 2);
        let mut orders: Vec<i128> = f.iter().map(|x| x.ring.order()).collect();
        orders.sort();
        assert_eq!(orders, vec![2, 3]);
    }

    #[test]
    fn z4_already_local() {
        let r = zmod(4);
        assert_eq!(r.local_factors().len(), 1);
        assert_eq!(r.local_factors()[0].idempotent, r.one());
        // J(Z/4) = {0, 2} by the nilpotent oracle
        assert_eq!(r.jacobson_radical().subgroup.order(), 2);
        assert!(r.jacobson_radical().subgroup.contains(&[2]));
    }

    #[test]
    fn spectrum_z12() {
        // (2) = {0,2,4,6,8,10}, (3) = {0,3,6,9} via nilpotent/idempotent oracle
        let r = zmod(12);
        let spec = r.spectrum();
        assert_eq!(spec.len(), 2);
        let mut orders: Vec<i128> = spec.iter().map(|p| p.subgroup.order()).collect();
        orders.sort();
        assert_eq!(orders, vec![4, 6]);
        let two = spec.iter().find(|p| p.subgroup.contains(&[2])).unwrap();
        assert_eq!(two.subgroup.order(), 6);
    }

    #[test]
    fn spectrum_of_field_is_zero_ideal() {
        let r = build_ring(&RingSpec::Gf { p: 2, deg: 3, min_poly: vec![1, 1, 0, 1] }).unwrap();
        assert_eq!(r.order(), 8);
        let spec = r.spectrum();
        assert_eq!(spec.len(), 1);
        assert!(spec[0].subgroup.is_zero());
        assert!(is_field(&r));
    }

    #[test]
    fn residue_fields() {
        let r = zmod(12);
        for p in r.spectrum() {
            let q = quotient_ring(&r, &Ideal {
                generators: p.subgroup.basis_rows(),
                subgroup: p.subgroup.clone(),
            });
            assert!(is_field(&q.ring), "R/p must be a field");
        }
    }

    #[test]
    fn v_of_six_in_z12() {
        let r = zmod(12);
        let a = r.ideal(&[vec![6]]);
        assert_eq!(v_of_ideal(&r, &a).len(), 2, "V((6)) = {{(2),(3)}}");
        let unit = r.unit_ideal();
        assert!(v_of_ideal(&r, &unit).is_empty(), "V(R) = ∅");
    }

    #[test]
    fn closure_is_identity_on_finite_spectra() {
        let r = zmod(12);
        let spec_len = r.spectrum().len();
        for i in 0..spec_len {
            assert_eq!(specialization_closure(&r, &[i]), vec![i]);
            assert_eq!(minimal_primes(&r, &[i]), vec![i]);
            assert_eq!(maximal_primes(&r, &[i]), vec![i]);
        }
    }

    #[test]
    fn catalog_invariants() {
        for (_, r) in catalog() {
            let total: i128 = r.local_factors().iter().map(|f| f.ring.order()).product();
            assert_eq!(total, r.order(), "product of factor orders is |R|");
            // idempotents orthogonal, sum to 1
            let mut sum = r.zero();
            for (i, f) in r.local_factors().iter().enumerate() {
                sum = r.add(&sum, &f.idempotent);
                for g in r.local_factors().iter().skip(i + 1) {
                    assert!(r
                        .mul(&f.idempotent, &g.idempotent)
                        .iter()
                        .all(|&x| x == 0));
                }
            }
            assert_eq!(sum, r.one());
            // every element of J is nilpotent and J = ∩ Spec
            for x in r.jacobson_radical().subgroup.elements() {
                assert!(r.is_nilpotent(&x));
            }
            for p in r.spectrum() {
                assert!(p.subgroup.contains_subgroup(&r.jacobson_radical().subgroup));
            }
        }
    }

    #[test]
    fn ideal_lattice_laws() {
        // V(a) ∪ V(b) = V(a∩b), V(a) ∩ V(b) = V(a+b)
        let r = zmod(12);
        let pairs = [
            (vec![2i128], vec![3i128]),
            (vec![4], vec![6]),
            (vec![2], vec![4]),
            (vec![6], vec![6]),
        ];
        for (ga, gb) in pairs {
            let a = r.ideal(&[ga]);
            let b = r.ideal(&[gb]);
            let inter = Ideal {
                generators: vec![],
                subgroup: a.subgroup.intersect(&b.subgroup),
            };
            let sum = Ideal { generators: vec![], subgroup: a.subgroup.sum(&b.subgroup) };
            let mut va = v_of_ideal(&r, &a);
            let vb = v_of_ideal(&r, &b);
            va.extend(vb.iter().copied());
            va.sort_unstable();
            va.dedup();
            assert_eq!(va, v_of_ideal(&r, &inter));
            let vcap: Vec<usize> = v_of_ideal(&r, &a)
                .into_iter()
                .filter(|i| v_of_ideal(&r, &b).contains(i))
                .collect();
            assert_eq!(vcap, v_of_ideal(&r, &sum));
        }
    }

    #[test]
    fn product_spectrum_is_disjoint_union() {
        let a = RingSpec::Zmod { n: 4 };
        let b = RingSpec::Quot {
            char: 2,
            vars: vec!["x".into()],
            relations: vec![("x".into(), 2)],
        };
        let ra = build_ring(&a).unwrap();
        let rb = build_ring(&b).unwrap();
        let prod = build_ring(&RingSpec::Product { factors: vec![a, b] }).unwrap();
        assert_eq!(
            prod.spectrum().len(),
            ra.spectrum().len() + rb.spectrum().len(),
            "one prime per factor prime"
        );
        // residue orders of the product primes, as a multiset, are the union
        let mut residues: Vec<i128> =
            prod.spectrum().iter().map(|p| p.subgroup.index()).collect();
        residues.sort_unstable();
        let mut expected: Vec<i128> = ra
            .spectrum()
            .iter()
            .chain(rb.spectrum())
            .map(|p| p.subgroup.index())
            .collect();
        expected.sort_unstable();
        assert_eq!(residues, expected);
        let total: i128 = prod.local_factors().iter().map(|f| f.ring.order()).product();
        assert_eq!(total, prod.order());
    }

    #[test]
    fn canonical_orders_ascending() {
        let spec = RingSpec::Product {
            factors: vec![RingSpec::Zmod { n: 4 }, RingSpec::Zmod { n: 2 }],
        };
        let r = build_ring(&spec).unwrap();
        assert_eq!(r.additive_orders(), &[2, 4]);
        assert_eq!(r.local_factors().len(), 2);
    }

    mod ideal_laws {
        use super::super::*;
        use proptest::prelude::*;

        fn zmod(n: i64) -> Arc<Ring> {
            build_ring(&RingSpec::Zmod { n }).unwrap()
        }

        proptest! {
            #[test]
            fn v_turns_ideal_lattice_into_set_lattice(
                n in prop::sample::select(vec![4i64, 6, 8, 9, 12]),
                a in 0i128..12,
                b in 0i128..12,
            ) {
                let r = zmod(n);
                let ia = r.ideal(&[vec![a % (n as i128)]]);
                let ib = r.ideal(&[vec![b % (n as i128)]]);
                let inter = Ideal { generators: vec![], subgroup: ia.subgroup.intersect(&ib.subgroup) };
                let sum = Ideal { generators: vec![], subgroup: ia.subgroup.sum(&ib.subgroup) };
                let mut v_union = v_of_ideal(&r, &ia);
                v_union.extend(v_of_ideal(&r, &ib));
                v_union.sort_unstable();
                v_union.dedup();
                prop_assert_eq!(v_union, v_of_ideal(&r, &inter));
                let v_cap: Vec<usize> = v_of_ideal(&r, &ia)
                    .into_iter()
                    .filter(|i| v_of_ideal(&r, &ib).contains(i))
                    .collect();
                prop_assert_eq!(v_cap, v_of_ideal(&r, &sum));
            }
        }
    }

    #[test]
    fn spec_json_round_trip() {
        for (_, spec) in catalog_specs() {
            let text = serde_json::to_string(&spec).unwrap();
            let back: RingSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
        let parsed: RingSpec = serde_json::from_str(r#"{"kind":"zmod","n":12}"#).unwrap();
        assert_eq!(parsed, RingSpec::Zmod { n: 12 });
        let gf: RingSpec =
            serde_json::from_str(r#"{"kind":"gf","p":2,"deg":2,"min_poly":[1,1,1]}"#).unwrap();
        assert!(matches!(gf, RingSpec::Gf { .. }));
        let q: RingSpec = serde_json::from_str(
            r#"{"kind":"quot","char":2,"vars":["x"],"relations":[["x",2]]}"#,
        )
        .unwrap();
        assert!(matches!(q, RingSpec::Quot { .. }));
    }
}
