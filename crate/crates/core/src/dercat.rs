//! Bounded chain complexes of finite modules: homology, shifts, soft
//! truncations, mapping cones, free resolution windows, windowed hyper-Ext
//! and hyper-Tor, duality functors applied degreewise, and the finite
//! nonvanishing criteria that decide derived nonvanishing without unbounded
//! resolutions.
//!
//! Degree convention is homological: the differential lowers degree, and
//! `σ≥n` replaces the degree-`n` module by `Ker d_n` while `σ≤n` replaces it
//! by `Coker d_{n+1}`.

use crate::finmod::{
    self, char_dual, char_dual_map, direct_sum, hom_induced, hom_module, injective_envelope,
    kernel, localize, quotient_by_columns, ring_module, submodule_from_columns, subquotient,
    FinModule, HomModule, ModError, ModuleMap,
};
use crate::finring::{PrimeIdeal, Ring};
use crate::linalg::{kernel_lattice, Mat};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Longest permitted resolution window.
pub const MAX_WINDOW: i64 = 32;
/// Largest free-module dimension tolerated inside a resolution window.
pub const MAX_FREE_DIM: usize = 512;

#[derive(Debug, thiserror::Error)]
pub enum DercatError {
    #[error("differentials do not compose to zero at degree {0}")]
    SquareNonzero(i64),
    #[error("differential at degree {0} does not match the adjacent modules")]
    BoundaryMismatch(i64),
    #[error("complex modules live over different rings")]
    RingMismatch,
    #[error("maps do not commute with the differentials at degree {0}")]
    NotChainMap(i64),
    #[error("requested window [{0}, {1}] exceeds the cap {MAX_WINDOW}")]
    WindowTooLarge(i64, i64),
    #[error("free modules in the resolution window grew past {MAX_FREE_DIM} generators")]
    ResolutionTooLarge,
    #[error("nonvanishing criterion disagrees with the windowed computation (kernel bug)")]
    NvMismatch,
    #[error(transparent)]
    Module(#[from] ModError),
}

/// Bounded chain complex. `modules[i]` sits in degree `lo + i`;
/// `diffs[i] : modules[i+1] → modules[i]`.
#[derive(Clone)]
pub struct Complex {
    pub ring: Arc<Ring>,
    pub lo: i64,
    pub modules: Vec<FinModule>,
    pub diffs: Vec<ModuleMap>,
}

impl std::fmt::Debug for Complex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Complex[{}..{}] over {}", self.lo, self.hi(), self.ring.label())?;
        for (i, m) in self.modules.iter().enumerate() {
            write!(f, " {}:{:?}", self.lo + i as i64, m.orders)?;
        }
        Ok(())
    }
}

impl Complex {
    pub fn build(
        ring: Arc<Ring>,
        lo: i64,
        modules: Vec<FinModule>,
        diffs: Vec<ModuleMap>,
    ) -> Result<Complex, DercatError> {
        if modules.is_empty() {
            return Ok(Complex { ring, lo: 0, modules: vec![], diffs: vec![] });
        }
        assert_eq!(diffs.len() + 1, modules.len(), "one differential between adjacent degrees");
        for m in &modules {
            if m.ring != ring {
                return Err(DercatError::RingMismatch);
            }
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.source != modules[i + 1] || d.target != modules[i] {
                return Err(DercatError::BoundaryMismatch(lo + i as i64 + 1));
            }
            d.validate()?;
        }
        for i in 0..diffs.len().saturating_sub(1) {
            if !diffs[i].compose(&diffs[i + 1]).is_zero_map() {
                return Err(DercatError::SquareNonzero(lo + i as i64 + 2));
            }
        }
        Ok(Complex { ring, lo, modules, diffs }.trim())
    }

    pub fn zero(ring: &Arc<Ring>) -> Complex {
        Complex { ring: ring.clone(), lo: 0, modules: vec![], diffs: vec![] }
    }

    pub fn from_module(m: FinModule, degree: i64) -> Complex {
        let ring = m.ring.clone();
        if m.is_zero() {
            return Complex::zero(&ring);
        }
        Complex { ring, lo: degree, modules: vec![m], diffs: vec![] }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.modules.len() as i64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn module_at(&self, degree: i64) -> FinModule {
        let idx = degree - self.lo;
        if idx < 0 || idx >= self.modules.len() as i64 {
            finmod::zero_module(&self.ring)
        } else {
            self.modules[idx as usize].clone()
        }
    }

    /// `d_degree : M_degree → M_{degree-1}`; a zero map outside the stored
    /// range.
    pub fn diff_at(&self, degree: i64) -> ModuleMap {
        let idx = degree - self.lo - 1;
        if idx < 0 || idx >= self.diffs.len() as i64 {
            ModuleMap::zero(self.module_at(degree), self.module_at(degree - 1))
        } else {
            self.diffs[idx as usize].clone()
        }
    }

    /// Strip zero modules at both ends (their adjacent differentials are
    /// forced zero maps).
    fn trim(mut self) -> Complex {
        while let Some(first) = self.modules.first() {
            if !first.is_zero() {
                break;
            }
            self.modules.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.lo += 1;
        }
        while let Some(last) = self.modules.last() {
            if !last.is_zero() {
                break;
            }
            self.modules.pop();
            self.diffs.pop();
        }
        if self.modules.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn total_order(&self) -> i128 {
        self.modules.iter().map(FinModule::order).product()
    }
}

/// Nonzero homology, degree by degree.
#[derive(Clone, Debug)]
pub struct HomologyProfile {
    pub summands: BTreeMap<i64, FinModule>,
}

impl HomologyProfile {
    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn inf(&self) -> Option<i64> {
        self.summands.keys().next().copied()
    }

    pub fn sup(&self) -> Option<i64> {
        self.summands.keys().last().copied()
    }

    pub fn module_at(&self, degree: i64, ring: &Arc<Ring>) -> FinModule {
        self.summands.get(&degree).cloned().unwrap_or_else(|| finmod::zero_module(ring))
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.summands.keys().copied().collect()
    }
}

/// Kernel generators of `d_degree` as ambient columns.
fn cycle_columns(c: &Complex, degree: i64) -> Vec<Vec<i128>> {
    let m = c.module_at(degree);
    if degree <= c.lo {
        // no outgoing differential: everything is a cycle
        return (0..m.dim())
            .map(|i| {
                let mut v = vec![0i128; m.dim()];
                v[i] = 1;
                v
            })
            .collect();
    }
    let d = c.diff_at(degree);
    kernel_lattice(&d.matrix, &d.target.orders)
}

fn boundary_columns(c: &Complex, degree: i64) -> Vec<Vec<i128>> {
    let d = c.diff_at(degree + 1);
    (0..d.source.dim()).map(|j| d.target.reduce(&d.matrix.col_vec(j))).collect()
}

pub fn homology(c: &Complex) -> HomologyProfile {
    let mut summands = BTreeMap::new();
    for degree in c.lo..=c.hi() {
        let ambient = c.module_at(degree);
        if ambient.is_zero() {
            continue;
        }
        let sq = subquotient(&ambient, &cycle_columns(c, degree), &boundary_columns(c, degree));
        if !sq.module.is_zero() {
            summands.insert(degree, sq.module);
        }
    }
    HomologyProfile { summands }
}

pub fn shift(c: &Complex, k: i64) -> Complex {
    if c.is_empty() {
        return c.clone();
    }
    let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
    let diffs = c
        .diffs
        .iter()
        .map(|d| ModuleMap {
            source: d.source.clone(),
            target: d.target.clone(),
            matrix: d.matrix.scale(sign).reduce_rows_mod(&d.target.orders),
        })
        .collect();
    Complex { ring: c.ring.clone(), lo: c.lo + k, modules: c.modules.clone(), diffs }
}

/// Soft right-truncation `σ≥n`: degrees above `n` unchanged, `Ker d_n` at
/// degree `n`. Homology at degrees `≥ n` is preserved (checked).
pub fn truncate_ge(c: &Complex, n: i64) -> Complex {
    if c.is_empty() || n <= c.lo {
        return c.clone();
    }
    if n > c.hi() {
        return Complex::zero(&c.ring);
    }
    let ker = submodule_from_columns(&c.module_at(n), &cycle_columns(c, n));
    let mut modules = vec![ker.module.clone()];
    let mut diffs = Vec::new();
    if n < c.hi() {
        let d_next = c.diff_at(n + 1);
        let cols: Vec<Vec<i128>> = (0..d_next.source.dim())
            .map(|j| {
                ker.express(&d_next.target.reduce(&d_next.matrix.col_vec(j)))
                    .expect("boundaries are cycles")
            })
            .collect();
        let corestricted = ModuleMap {
            source: d_next.source.clone(),
            target: ker.module.clone(),
            matrix: Mat::from_fn(ker.module.dim(), d_next.source.dim(), |r, cidx| cols[cidx][r]),
        };
        diffs.push(corestricted);
        for deg in (n + 1)..=c.hi() {
            modules.push(c.module_at(deg));
            if deg < c.hi() {
                diffs.push(c.diff_at(deg + 1));
            }
        }
    }
    let out = Complex { ring: c.ring.clone(), lo: n, modules, diffs }.trim();
    debug_assert!(truncation_preserves(c, &out, n, true));
    out
}

/// Soft left-truncation `σ≤n`: degrees below `n` unchanged, `Coker d_{n+1}`
/// at degree `n`, with the induced differential on residue classes.
pub fn truncate_le(c: &Complex, n: i64) -> Complex {
    if c.is_empty() || n >= c.hi() {
        return c.clone();
    }
    if n < c.lo {
        return Complex::zero(&c.ring);
    }
    let quo = quotient_by_columns(&c.module_at(n), &boundary_columns(c, n));
    let mut modules = Vec::new();
    let mut diffs = Vec::new();
    for deg in c.lo..n {
        modules.push(c.module_at(deg));
        if deg < n - 1 {
            diffs.push(c.diff_at(deg + 1));
        }
    }
    if n > c.lo {
        let d_n = c.diff_at(n);
        let induced = ModuleMap {
            source: quo.module.clone(),
            target: d_n.target.clone(),
            matrix: d_n.matrix.mul(&quo.section).reduce_rows_mod(&d_n.target.orders),
        };
        debug_assert!(induced.validate().is_ok());
        diffs.push(induced);
    }
    modules.push(quo.module.clone());
    let out = Complex { ring: c.ring.clone(), lo: c.lo.min(n), modules, diffs }.trim();
    debug_assert!(truncation_preserves(c, &out, n, false));
    out
}

fn truncation_preserves(orig: &Complex, trunc: &Complex, n: i64, ge: bool) -> bool {
    let h0 = homology(orig);
    let h1 = homology(trunc);
    let degrees: Vec<i64> = if ge {
        h0.degrees().into_iter().filter(|&d| d >= n).collect()
    } else {
        h0.degrees().into_iter().filter(|&d| d <= n).collect()
    };
    for d in degrees {
        if h0.module_at(d, &orig.ring).orders != h1.module_at(d, &orig.ring).orders {
            return false;
        }
    }
    let extra: Vec<i64> = h1
        .degrees()
        .into_iter()
        .filter(|&d| if ge { d < n } else { d > n })
        .collect();
    extra.is_empty()
}

/// Degreewise morphism of complexes.
pub struct ComplexMap {
    pub source: Complex,
    pub target: Complex,
    pub maps: BTreeMap<i64, ModuleMap>,
}

impl ComplexMap {
    pub fn new(
        source: Complex,
        target: Complex,
        maps: BTreeMap<i64, ModuleMap>,
    ) -> Result<ComplexMap, DercatError> {
        let cm = ComplexMap { source, target, maps };
        cm.validate()?;
        Ok(cm)
    }

    pub fn identity(c: &Complex) -> ComplexMap {
        let maps = (c.lo..=c.hi())
            .map(|d| (d, ModuleMap::identity(c.module_at(d))))
            .collect();
        ComplexMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &Complex, target: &Complex) -> ComplexMap {
        ComplexMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn map_at(&self, degree: i64) -> ModuleMap {
        self.maps.get(&degree).cloned().unwrap_or_else(|| {
            ModuleMap::zero(self.source.module_at(degree), self.target.module_at(degree))
        })
    }

    fn validate(&self) -> Result<(), DercatError> {
        let lo = self.source.lo.min(self.target.lo);
        let hi = self.source.hi().max(self.target.hi());
        for degree in lo..=hi {
            let f_here = self.map_at(degree);
            f_here.validate()?;
            if f_here.source != self.source.module_at(degree)
                || f_here.target != self.target.module_at(degree)
            {
                return Err(DercatError::BoundaryMismatch(degree));
            }
            // f ∘ d = d ∘ f
            let lhs = self.map_at(degree - 1).compose(&self.source.diff_at(degree));
            let rhs = self.target.diff_at(degree).compose(&f_here);
            if lhs.matrix.reduce_rows_mod(&lhs.target.orders)
                != rhs.matrix.reduce_rows_mod(&rhs.target.orders)
            {
                return Err(DercatError::NotChainMap(degree));
            }
        }
        Ok(())
    }
}

/// Mapping cone of `f : L → N`: `cone_n = N_n ⊕ L_{n-1}` with
/// `d(x, l) = (d x + f l, −d l)`.
pub fn cone(f: &ComplexMap) -> Result<Complex, DercatError> {
    let l = &f.source;
    let n = &f.target;
    let ring = n.ring.clone();
    if l.is_empty() && n.is_empty() {
        return Ok(Complex::zero(&ring));
    }
    let lo = n.lo.min(l.lo + 1) - 1;
    let hi = n.hi().max(l.hi() + 1) + 1;
    let mut modules = Vec::new();
    let mut sums = Vec::new();
    for degree in lo..=hi {
        let parts = [n.module_at(degree), l.module_at(degree - 1)];
        let ds = direct_sum(&ring, &parts);
        modules.push(ds.module.clone());
        sums.push(ds);
    }
    let mut diffs = Vec::new();
    for degree in (lo + 1)..=hi {
        let src = &sums[(degree - lo) as usize];
        let dst = &sums[(degree - lo - 1) as usize];
        let d_n = n.diff_at(degree);
        let d_l = l.diff_at(degree - 1);
        let f_prev = f.map_at(degree - 1);
        let first = dst.injections[0]
            .compose(&d_n)
            .compose(&src.projections[0])
            .add(&dst.injections[0].compose(&f_prev).compose(&src.projections[1]));
        let neg_dl = ModuleMap {
            source: d_l.source.clone(),
            target: d_l.target.clone(),
            matrix: d_l.matrix.neg().reduce_rows_mod(&d_l.target.orders),
        };
        let second = dst.injections[1].compose(&neg_dl).compose(&src.projections[1]);
        diffs.push(first.add(&second));
    }
    diffs.reverse();
    let mut diffs_ordered = Vec::new();
    for degree in (lo + 1)..=hi {
        diffs_ordered.push(diffs[(hi - degree) as usize].clone());
    }
    let out = Complex::build(ring, lo, modules, diffs_ordered)?;
    debug_assert!(cone_order_identities(l, n, &out), "triangle homology bookkeeping");
    Ok(out)
}

/// Order identities forced by the long exact sequence of the triangle
/// `L → N → cone`: the total homology of the cone divides the product of
/// the other two, and the alternating products match multiplicatively.
fn cone_order_identities(l: &Complex, n: &Complex, cone: &Complex) -> bool {
    let total = |c: &Complex| -> i128 {
        homology(c).summands.values().map(FinModule::order).product()
    };
    let signed = |c: &Complex| -> (i128, i128) {
        let mut even = 1;
        let mut odd = 1;
        for (d, m) in &homology(c).summands {
            if d.rem_euclid(2) == 0 {
                even *= m.order();
            } else {
                odd *= m.order();
            }
        }
        (even, odd)
    };
    if total(l) * total(n) % total(cone) != 0 {
        return false;
    }
    // χ(N) = χ(L) · χ(cone) as alternating products
    let (ne, no) = signed(n);
    let (le, lo_) = signed(l);
    let (ce, co) = signed(cone);
    ne * lo_ * co == no * le * ce
}

// --- free resolutions --------------------------------------------------------

/// Window of a free resolution `F_len → … → F_0 ↠ M`, with the additive
/// matrices and the ring-element entries of every step.
pub struct Resolution {
    pub ring: Arc<Ring>,
    pub ranks: Vec<usize>,
    /// additive matrices `F_{j} → F_{j-1}` for `j = 1..=len`
    pub steps: Vec<ModuleMap>,
    /// ring-element entries of each step: `entries[j-1][r][c]` is the
    /// coefficient of target copy `r` in the image of source generator `c`
    pub entries: Vec<Vec<Vec<Vec<i128>>>>,
    pub augmentation: ModuleMap,
    pub free_modules: Vec<FinModule>,
}

impl Resolution {
    pub fn as_complex(&self) -> Complex {
        Complex {
            ring: self.ring.clone(),
            lo: 0,
            modules: self.free_modules.clone(),
            diffs: self.steps.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Surjection `R^{rank} ↠ M` onto a greedily minimized generating set.
fn free_cover(m: &FinModule) -> (FinModule, ModuleMap, usize) {
    let ring = m.ring.clone();
    let gens = finmod::minimal_generators(m);
    let rank = gens.len();
    let free = finmod::free_module(&ring, rank);
    let k = ring.dim();
    let matrix = Mat::from_fn(m.dim(), rank * k, |r, col| {
        let (copy, gen) = (col / k, col % k);
        let moved = m.reduce(&m.action[gen].mul_vec(&gens[copy]));
        moved[r]
    });
    let aug = ModuleMap { source: free.clone(), target: m.clone(), matrix };
    debug_assert!(aug.validate().is_ok());
    (free, aug, rank)
}

/// Ring-element entries of an additive matrix between free modules.
fn ring_entries(ring: &Arc<Ring>, matrix: &Mat, src_rank: usize, dst_rank: usize) -> Vec<Vec<Vec<i128>>> {
    let k = ring.dim();
    let one = ring.one();
    (0..dst_rank)
        .map(|r| {
            (0..src_rank)
                .map(|c| {
                    // image of 1 in source copy c, read off in target copy r
                    let mut acc = vec![0i128; k];
                    for (i, &oi) in one.iter().enumerate() {
                        if oi == 0 {
                            continue;
                        }
                        for t in 0..k {
                            acc[t] += oi * matrix.at(r * k + t, c * k + i);
                        }
                    }
                    ring.reduce(&acc)
                })
                .collect()
        })
        .collect()
}

pub fn free_resolution(m: &FinModule, len: i64) -> Result<Resolution, DercatError> {
    if !(0..=MAX_WINDOW).contains(&len) {
        return Err(DercatError::WindowTooLarge(0, len));
    }
    let ring = m.ring.clone();
    if m.is_zero() {
        return Ok(Resolution {
            ring,
            ranks: vec![0],
            steps: vec![],
            entries: vec![],
            augmentation: ModuleMap::zero(finmod::zero_module(&m.ring), m.clone()),
            free_modules: vec![finmod::zero_module(&m.ring)],
        });
    }
    let (f0, aug, r0) = free_cover(m);
    let mut free_modules = vec![f0];
    let mut ranks = vec![r0];
    let mut steps: Vec<ModuleMap> = Vec::new();
    let mut entries = Vec::new();
    let mut boundary = aug.clone();
    for _ in 0..len {
        let ker = kernel(&boundary);
        let (f_next, cover, r_next) = free_cover(&ker.module);
        if f_next.dim() > MAX_FREE_DIM {
            return Err(DercatError::ResolutionTooLarge);
        }
        let step = ker.include.compose(&cover);
        let prev_rank = *ranks.last().unwrap();
        entries.push(ring_entries(&ring, &step.matrix, r_next, prev_rank));
        ranks.push(r_next);
        free_modules.push(f_next);
        steps.push(step.clone());
        boundary = step;
    }
    Ok(Resolution { ring, ranks, steps, entries, augmentation: aug, free_modules })
}

// --- windowed hyper Ext/Tor ----------------------------------------------------

/// `⊕_j Hom(F_j, C_{j+i})` realized as `⊕_j C_{j+i}^{rank_j}`, assembled
/// without solving, since every `F_j` is free.
pub fn rhom_window(res: &Resolution, c: &Complex, range: (i64, i64)) -> HomologyProfile {
    let ring = res.ring.clone();
    if c.is_empty() {
        return HomologyProfile { summands: BTreeMap::new() };
    }
    let len = res.len() as i64;
    let lo = c.lo - len;
    let hi = c.hi();
    // pieces[(i, j)] = index of Hom(F_j, C_{j+i}) inside the degree-i sum
    let mut degree_parts: BTreeMap<i64, Vec<(usize, FinModule)>> = BTreeMap::new();
    for i in lo..=hi {
        let mut parts = Vec::new();
        for j in 0..=len {
            let target = c.module_at(j + i);
            if target.is_zero() || res.ranks[j as usize] == 0 {
                continue;
            }
            parts.push((j as usize, power_module(&ring, &target, res.ranks[j as usize])));
        }
        degree_parts.insert(i, parts);
    }
    let sums: BTreeMap<i64, finmod::DirectSum> = degree_parts
        .iter()
        .map(|(&i, parts)| {
            let mods: Vec<FinModule> = parts.iter().map(|(_, m)| m.clone()).collect();
            (i, direct_sum(&ring, &mods))
        })
        .collect();
    let mut modules = Vec::new();
    let mut diffs = Vec::new();
    for i in lo..=hi {
        modules.push(sums[&i].module.clone());
    }
    for i in (lo + 1)..=hi {
        let src = &sums[&i];
        let dst = &sums[&(i - 1)];
        let src_parts = &degree_parts[&i];
        let dst_parts = &degree_parts[&(i - 1)];
        let mut total = ModuleMap::zero(src.module.clone(), dst.module.clone());
        for (sp, (j, _)) in src_parts.iter().enumerate() {
            let j = *j;
            let target_c = c.module_at(j as i64 + i);
            let rank = res.ranks[j];
            // post-composition d_C ∘ φ into Hom(F_j, C_{j+i-1})
            if let Some(dp) = dst_parts.iter().position(|(jj, _)| *jj == j) {
                let d_c = c.diff_at(j as i64 + i);
                if !d_c.target.is_zero() {
                    let block = power_map(&ring, &d_c, rank);
                    let piece = dst.injections[dp].compose(&block).compose(&src.projections[sp]);
                    total = total.add(&piece);
                }
            }
            // pre-composition ±φ ∘ d_F into Hom(F_{j+1}, C_{j+1+i-1})
            if j < len as usize {
                if let Some(dp) = dst_parts.iter().position(|(jj, _)| *jj == j + 1) {
                    let sign: i128 = if i.rem_euclid(2) == 0 { -1 } else { 1 };
                    let entry = &res.entries[j]; // F_{j+1} → F_j
                    let next_rank = res.ranks[j + 1];
                    let block = evaluation_map(&target_c, entry, rank, next_rank, sign);
                    let piece = dst.injections[dp].compose(&block).compose(&src.projections[sp]);
                    total = total.add(&piece);
                }
            }
        }
        diffs.push(total);
    }
    let complex = Complex::build(ring, lo, modules, diffs).expect("Hom window is a complex");
    restrict_profile(homology(&complex), range)
}

/// `⊕_j F_j ⊗ C_{i-j}` realized as `⊕_j C_{i-j}^{rank_j}`.
pub fn tor_window(res: &Resolution, c: &Complex, range: (i64, i64)) -> HomologyProfile {
    let ring = res.ring.clone();
    if c.is_empty() {
        return HomologyProfile { summands: BTreeMap::new() };
    }
    let len = res.len() as i64;
    let lo = c.lo;
    let hi = c.hi() + len;
    let mut degree_parts: BTreeMap<i64, Vec<(usize, FinModule)>> = BTreeMap::new();
    for i in lo..=hi {
        let mut parts = Vec::new();
        for j in 0..=len {
            let leg = c.module_at(i - j);
            if leg.is_zero() || res.ranks[j as usize] == 0 {
                continue;
            }
            parts.push((j as usize, power_module(&ring, &leg, res.ranks[j as usize])));
        }
        degree_parts.insert(i, parts);
    }
    let sums: BTreeMap<i64, finmod::DirectSum> = degree_parts
        .iter()
        .map(|(&i, parts)| {
            let mods: Vec<FinModule> = parts.iter().map(|(_, m)| m.clone()).collect();
            (i, direct_sum(&ring, &mods))
        })
        .collect();
    let mut modules = Vec::new();
    let mut diffs = Vec::new();
    for i in lo..=hi {
        modules.push(sums[&i].module.clone());
    }
    for i in (lo + 1)..=hi {
        let src = &sums[&i];
        let dst = &sums[&(i - 1)];
        let src_parts = &degree_parts[&i];
        let dst_parts = &degree_parts[&(i - 1)];
        let mut total = ModuleMap::zero(src.module.clone(), dst.module.clone());
        for (sp, (j, _)) in src_parts.iter().enumerate() {
            let j = *j;
            let leg = c.module_at(i - j as i64);
            let rank = res.ranks[j];
            // d_F ⊗ id into F_{j-1} ⊗ C_{i-j}
            if j >= 1 {
                if let Some(dp) = dst_parts.iter().position(|(jj, _)| *jj == j - 1) {
                    let entry = &res.entries[j - 1]; // F_j → F_{j-1}
                    let prev_rank = res.ranks[j - 1];
                    let direct = tensor_step_map(&leg, entry, rank, prev_rank);
                    let piece =
                        dst.injections[dp].compose(&direct).compose(&src.projections[sp]);
                    total = total.add(&piece);
                }
            }
            // ±id ⊗ d_C into F_j ⊗ C_{i-j-1}
            if let Some(dp) = dst_parts.iter().position(|(jj, _)| *jj == j) {
                let d_c = c.diff_at(i - j as i64);
                if !d_c.target.is_zero() {
                    let sign: i128 = if (j as i64).rem_euclid(2) == 0 { 1 } else { -1 };
                    let signed = ModuleMap {
                        source: d_c.source.clone(),
                        target: d_c.target.clone(),
                        matrix: d_c.matrix.scale(sign).reduce_rows_mod(&d_c.target.orders),
                    };
                    let block = power_map(&ring, &signed, rank);
                    let piece = dst.injections[dp].compose(&block).compose(&src.projections[sp]);
                    total = total.add(&piece);
                }
            }
        }
        diffs.push(total);
    }
    let complex = Complex::build(ring, lo, modules, diffs).expect("tensor window is a complex");
    restrict_profile(homology(&complex), range)
}

/// `N^rank` with the diagonal action.
fn power_module(ring: &Arc<Ring>, n: &FinModule, rank: usize) -> FinModule {
    direct_sum(ring, &vec![n.clone(); rank]).module
}

/// Diagonal application of `f` on `N^rank`.
fn power_map(ring: &Arc<Ring>, f: &ModuleMap, rank: usize) -> ModuleMap {
    let src = power_module(ring, &f.source, rank);
    let dst = power_module(ring, &f.target, rank);
    let (sn, tn) = (f.source.dim(), f.target.dim());
    let matrix = Mat::from_fn(tn * rank, sn * rank, |r, c| {
        let (rc, rr) = (r / tn, r % tn);
        let (cc, cs) = (c / sn, c % sn);
        if rc == cc {
            f.matrix.at(rr, cs)
        } else {
            0
        }
    });
    ModuleMap { source: src, target: dst, matrix }
}

/// For Hom orientation: `Hom(F_j, N) = N^{r_j} → Hom(F_{j+1}, N) = N^{r_next}`,
/// `φ ↦ sign·φ∘d`; entry `(c', c)` of `d` acts by the ring element
/// `entries[c'][c]`... rows of the output are indexed by the *source*
/// generators of `d`.
fn evaluation_map(
    n: &FinModule,
    entries: &[Vec<Vec<i128>>],
    rank: usize,
    next_rank: usize,
    sign: i128,
) -> ModuleMap {
    let ring = n.ring.clone();
    let src = power_module(&ring, n, rank);
    let dst = power_module(&ring, n, next_rank);
    let nd = n.dim();
    let mut matrix = Mat::zeros(nd * next_rank, nd * rank);
    // (φ∘d)(1_{c'}) = Σ_c act(entries[c][c'])·φ(1_c)
    for cprime in 0..next_rank {
        for c in 0..rank {
            let act = n.act_matrix(&entries[c][cprime]);
            for r in 0..nd {
                for s in 0..nd {
                    let v = matrix.at(cprime * nd + r, c * nd + s) + sign * act.at(r, s);
                    matrix.set(cprime * nd + r, c * nd + s, v);
                }
            }
        }
    }
    let matrix = matrix.reduce_rows_mod(&dst.orders);
    ModuleMap { source: src, target: dst, matrix }
}

/// For tensor orientation: `F_j ⊗ N = N^{r_j} → F_{j-1} ⊗ N = N^{r_prev}`,
/// `(x_c)_c ↦ (Σ_c act(entries[r][c]) x_c)_r`.
fn tensor_step_map(
    n: &FinModule,
    entries: &[Vec<Vec<i128>>],
    rank: usize,
    prev_rank: usize,
) -> ModuleMap {
    let ring = n.ring.clone();
    let src = power_module(&ring, n, rank);
    let dst = power_module(&ring, n, prev_rank);
    let nd = n.dim();
    let mut matrix = Mat::zeros(nd * prev_rank, nd * rank);
    for r_copy in 0..prev_rank {
        for c_copy in 0..rank {
            let act = n.act_matrix(&entries[r_copy][c_copy]);
            for r in 0..nd {
                for s in 0..nd {
                    matrix.set(r_copy * nd + r, c_copy * nd + s, act.at(r, s));
                }
            }
        }
    }
    let matrix = matrix.reduce_rows_mod(&dst.orders);
    ModuleMap { source: src, target: dst, matrix }
}

fn restrict_profile(profile: HomologyProfile, range: (i64, i64)) -> HomologyProfile {
    HomologyProfile {
        summands: profile
            .summands
            .into_iter()
            .filter(|(d, _)| *d >= range.0 && *d <= range.1)
            .collect(),
    }
}

pub enum DerivedKind {
    Ext,
    Tor,
}

/// Windowed hyper-Ext/Tor of a module against a bounded complex, with the
/// resolution padded two degrees past what the window requires.
pub fn ext_tor_window(
    first: &FinModule,
    second: &Complex,
    kind: DerivedKind,
    range: (i64, i64),
) -> Result<HomologyProfile, DercatError> {
    if range.0 > range.1 || range.1 - range.0 > MAX_WINDOW {
        return Err(DercatError::WindowTooLarge(range.0, range.1));
    }
    if second.is_empty() || first.is_zero() {
        return Ok(HomologyProfile { summands: BTreeMap::new() });
    }
    match kind {
        DerivedKind::Tor => {
            let len = (range.1 - second.lo).max(0) + 2;
            if len > MAX_WINDOW {
                return Err(DercatError::WindowTooLarge(range.0, range.1));
            }
            let res = free_resolution(first, len)?;
            Ok(tor_window(&res, second, range))
        }
        DerivedKind::Ext => {
            let len = (second.hi() - range.0).max(0) + 2;
            if len > MAX_WINDOW {
                return Err(DercatError::WindowTooLarge(range.0, range.1));
            }
            let res = free_resolution(first, len)?;
            Ok(rhom_window(&res, second, range))
        }
    }
}

/// `Tor_i(a, b)` for `0 ≤ i ≤ max_i`.
pub fn tor_modules(a: &FinModule, b: &FinModule, max_i: i64) -> Result<Vec<FinModule>, DercatError> {
    let c = Complex::from_module(b.clone(), 0);
    let profile = ext_tor_window(a, &c, DerivedKind::Tor, (0, max_i))?;
    Ok((0..=max_i).map(|i| profile.module_at(i, &a.ring)).collect())
}

/// `Ext^i(a, b)` for `0 ≤ i ≤ max_i` (cohomological indexing:
/// `Ext^i = H_{-i}` of the Hom window).
pub fn ext_modules(a: &FinModule, b: &FinModule, max_i: i64) -> Result<Vec<FinModule>, DercatError> {
    let c = Complex::from_module(b.clone(), 0);
    let profile = ext_tor_window(a, &c, DerivedKind::Ext, (-max_i, 0))?;
    Ok((0..=max_i).map(|i| profile.module_at(-i, &a.ring)).collect())
}

// --- derived nonvanishing ------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NvKind {
    /// `RHom(k(p), C_p) ≄ 0`
    RhomResidue,
    /// `k(p) ⊗^L C_p ≄ 0`
    TensorResidue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NvOutcome {
    pub nonzero: bool,
    /// `sup` of the localized homology for RHom, `inf` for tensor
    pub witness: Option<i64>,
}

/// Localized homology of a complex at a prime.
pub fn localized_homology(c: &Complex, p: &PrimeIdeal) -> Result<BTreeMap<i64, FinModule>, DercatError> {
    let profile = homology(c);
    let mut out = BTreeMap::new();
    for (deg, h) in &profile.summands {
        let loc = localize(h, p)?;
        if !loc.module.is_zero() {
            out.insert(*deg, loc.module);
        }
    }
    Ok(out)
}

/// Decide derived nonvanishing over the artinian local factor: `RHom(k, −)`
/// and `k ⊗^L −` detect exactly the nonvanishing of localized homology, with
/// witness degree at the top (socle) resp. bottom (Nakayama) edge.
pub fn nv_decision(c: &Complex, p: &PrimeIdeal, kind: NvKind) -> Result<NvOutcome, DercatError> {
    let loc = localized_homology(c, p)?;
    if loc.is_empty() {
        return Ok(NvOutcome { nonzero: false, witness: None });
    }
    let witness = match kind {
        NvKind::RhomResidue => *loc.keys().last().unwrap(),
        NvKind::TensorResidue => *loc.keys().next().unwrap(),
    };
    Ok(NvOutcome { nonzero: true, witness: Some(witness) })
}

/// `k(p) = R/p` as a module.
pub fn residue_module(ring: &Arc<Ring>, p: &PrimeIdeal) -> FinModule {
    let rm = ring_module(ring);
    quotient_by_columns(&rm, &p.subgroup.basis_rows()).module
}

/// The NV criterion cross-checked against the windowed Ext/Tor on
/// `[inf−2, sup+2]`; a mismatch is a kernel bug, not a property failure.
pub fn derived_nonvanishing(
    c: &Complex,
    p: &PrimeIdeal,
    kind: NvKind,
    validate: bool,
) -> Result<NvOutcome, DercatError> {
    let decision = nv_decision(c, p, kind)?;
    if !validate {
        return Ok(decision);
    }
    let ring = c.ring.clone();
    let k_p = residue_module(&ring, p);
    let local = localize_complex(c, p)?;
    if local.is_empty() {
        if decision.nonzero {
            return Err(DercatError::NvMismatch);
        }
        return Ok(decision);
    }
    let range = (local.lo - 2, local.hi() + 2);
    let profile = match kind {
        NvKind::RhomResidue => ext_tor_window(&k_p, &local, DerivedKind::Ext, range)?,
        NvKind::TensorResidue => ext_tor_window(&k_p, &local, DerivedKind::Tor, range)?,
    };
    if profile.is_zero() == decision.nonzero {
        return Err(DercatError::NvMismatch);
    }
    if let Some(w) = decision.witness {
        let at_witness = profile.module_at(w, &ring);
        if at_witness.is_zero() {
            return Err(DercatError::NvMismatch);
        }
    }
    Ok(decision)
}

// --- degreewise functors ---------------------------------------------------------

pub fn localize_complex(c: &Complex, p: &PrimeIdeal) -> Result<Complex, DercatError> {
    if c.is_empty() {
        return Ok(c.clone());
    }
    let mut locs = Vec::new();
    for m in &c.modules {
        locs.push(localize(m, p)?);
    }
    let mut diffs = Vec::new();
    for (i, d) in c.diffs.iter().enumerate() {
        // e·d(x) read in e·target coordinates
        let matrix = locs[i]
            .project
            .compose(d)
            .compose(&locs[i + 1].include)
            .matrix;
        diffs.push(ModuleMap {
            source: locs[i + 1].module.clone(),
            target: locs[i].module.clone(),
            matrix,
        });
    }
    let modules = locs.into_iter().map(|l| l.module).collect();
    Complex::build(c.ring.clone(), c.lo, modules, diffs)
}

/// `Hom(−, T)` applied degreewise: contravariant, so degree `n` of the output
/// is `Hom(C_{-n}, T)`.
fn hom_into_complex(c: &Complex, t: &FinModule) -> Result<Complex, DercatError> {
    if c.is_empty() {
        return Ok(Complex::zero(&c.ring));
    }
    let lo = -c.hi();
    let hi = -c.lo;
    let mut homs: BTreeMap<i64, HomModule> = BTreeMap::new();
    for n in lo..=hi {
        homs.insert(n, hom_module(&c.module_at(-n), t)?);
    }
    let mut modules = Vec::new();
    let mut diffs = Vec::new();
    for n in lo..=hi {
        modules.push(homs[&n].module.clone());
    }
    for n in (lo + 1)..=hi {
        // Hom(C_{-n}, T) → Hom(C_{-n+1}, T): precompose with d_{-n+1}
        let d = c.diff_at(-n + 1);
        let id_t = ModuleMap::identity(t.clone());
        diffs.push(hom_induced(&homs[&n], &homs[&(n - 1)], &d, &id_t));
    }
    Complex::build(c.ring.clone(), lo, modules, diffs)
}

/// Character-dual complex (the fast route for `D_R`).
pub fn char_dual_complex(c: &Complex) -> Complex {
    if c.is_empty() {
        return c.clone();
    }
    let lo = -c.hi();
    let hi = -c.lo;
    let mut modules = Vec::new();
    let mut diffs = Vec::new();
    for n in lo..=hi {
        modules.push(char_dual(&c.module_at(-n)));
    }
    for n in (lo + 1)..=hi {
        diffs.push(char_dual_map(&c.diff_at(-n + 1)));
    }
    Complex::build(c.ring.clone(), lo, modules, diffs).expect("dual of a complex is a complex")
}

#[derive(Clone, Copy, Debug)]
pub enum DualityFunctor {
    /// `D_R = Hom(−, ⊕ E(R/m))`, computed along the fast character-dual route
    MatlisAll,
    /// literal `Hom(−, ⊕ E(R/m))`
    MatlisAllLiteral,
    /// `D_m = Hom(−, E(R/m))` for the maximal ideal of one local factor
    MatlisAt(usize),
    Localize(usize),
    Colocalize(usize),
    TildeBidual,
}

pub fn apply_duality(c: &Complex, functor: DualityFunctor) -> Result<Complex, DercatError> {
    let ring = c.ring.clone();
    match functor {
        DualityFunctor::MatlisAll => Ok(char_dual_complex(c)),
        DualityFunctor::MatlisAllLiteral => {
            let envs: Result<Vec<FinModule>, ModError> = ring
                .spectrum()
                .iter()
                .map(|p| injective_envelope(&ring, p))
                .collect();
            let target = direct_sum(&ring, &envs?).module;
            hom_into_complex(c, &target)
        }
        DualityFunctor::MatlisAt(idx) => {
            let p = ring.spectrum()[idx].clone();
            let e = injective_envelope(&ring, &p)?;
            hom_into_complex(c, &e)
        }
        DualityFunctor::Localize(idx) => {
            let p = ring.spectrum()[idx].clone();
            localize_complex(c, &p)
        }
        DualityFunctor::Colocalize(idx) => {
            // ^p C = Hom(D_R(C)_p, E(R/m_p)), built functorially in three steps
            let p = ring.spectrum()[idx].clone();
            let dual = apply_duality(c, DualityFunctor::MatlisAllLiteral)?;
            let localized = localize_complex(&dual, &p)?;
            let e = injective_envelope(&ring, &p)?;
            hom_into_complex(&localized, &e)
        }
        DualityFunctor::TildeBidual => {
            let n_primes = ring.spectrum().len();
            let mut components = Vec::new();
            for idx in 0..n_primes {
                let once = apply_duality(c, DualityFunctor::MatlisAt(idx))?;
                components.push(apply_duality(&once, DualityFunctor::MatlisAt(idx))?);
            }
            sum_complexes(&ring, &components)
        }
    }
}

/// Degreewise direct sum of complexes.
pub fn sum_complexes(ring: &Arc<Ring>, parts: &[Complex]) -> Result<Complex, DercatError> {
    let nonzero: Vec<&Complex> = parts.iter().filter(|c| !c.is_empty()).collect();
    if nonzero.is_empty() {
        return Ok(Complex::zero(ring));
    }
    let lo = nonzero.iter().map(|c| c.lo).min().unwrap();
    let hi = nonzero.iter().map(|c| c.hi()).max().unwrap();
    let mut sums = Vec::new();
    for degree in lo..=hi {
        let mods: Vec<FinModule> = nonzero.iter().map(|c| c.module_at(degree)).collect();
        sums.push(direct_sum(ring, &mods));
    }
    let mut diffs = Vec::new();
    for degree in (lo + 1)..=hi {
        let src = &sums[(degree - lo) as usize];
        let dst = &sums[(degree - lo - 1) as usize];
        let mut total = ModuleMap::zero(src.module.clone(), dst.module.clone());
        for (pi, part) in nonzero.iter().enumerate() {
            let d = part.diff_at(degree);
            if d.source.is_zero() || d.target.is_zero() {
                continue;
            }
            let piece = dst.injections[pi].compose(&d).compose(&src.projections[pi]);
            total = total.add(&piece);
        }
        diffs.push(total);
    }
    let modules = sums.into_iter().map(|s| s.module).collect();
    Complex::build(ring.clone(), lo, modules, diffs)
}

/// Restrict a complex of `e_p`-local modules to the local factor ring.
pub fn restrict_complex_to_factor(c: &Complex, p: &PrimeIdeal) -> Result<Complex, DercatError> {
    if c.is_empty() {
        let ring = c.ring.clone();
        let idx = ring.prime_index(p).map_err(|_| ModError::ForeignPrime)?;
        return Ok(Complex::zero(&ring.local_factors()[idx].ring));
    }
    let ring = c.ring.clone();
    let idx = ring.prime_index(p).map_err(|_| ModError::ForeignPrime)?;
    let factor = ring.local_factors()[idx].ring.clone();
    let modules: Result<Vec<FinModule>, ModError> = c
        .modules
        .iter()
        .map(|m| finmod::restrict_to_factor(m, p))
        .collect();
    let modules = modules?;
    let diffs: Vec<ModuleMap> = c
        .diffs
        .iter()
        .enumerate()
        .map(|(i, d)| ModuleMap {
            source: modules[i + 1].clone(),
            target: modules[i].clone(),
            matrix: d.matrix.clone(),
        })
        .collect();
    Complex::build(factor, c.lo, modules, diffs)
}

/// Alternating product identity `∏ |C_n|^{(-1)^n} = ∏ |H_n|^{(-1)^n}`,
/// stated multiplicatively to stay in integers.
pub fn euler_characteristic_consistent(c: &Complex) -> bool {
    let h = homology(c);
    let mut lhs_even: i128 = 1;
    let mut lhs_odd: i128 = 1;
    for degree in c.lo..=c.hi() {
        let size = c.module_at(degree).order();
        if degree.rem_euclid(2) == 0 {
            lhs_even *= size;
        } else {
            lhs_odd *= size;
        }
    }
    let mut rhs_even: i128 = 1;
    let mut rhs_odd: i128 = 1;
    for (degree, m) in &h.summands {
        if degree.rem_euclid(2) == 0 {
            rhs_even *= m.order();
        } else {
            rhs_odd *= m.order();
        }
    }
    lhs_even * rhs_odd == rhs_even * lhs_odd
}
