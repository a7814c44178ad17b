//! Symbolic layer over a complete discrete valuation ring with the two-point
//! spectrum `{(0), m}`. Objects are formal sums over the closed alphabet
//! `{R, K, R/m^k, E(R/m)}` and every invariant is a closed rule table, which
//! is exactly what the non-artinian separating examples need: strict
//! inclusions between support and cosupport, and the probe where the printed
//! minimality identity for small cosupport fails on a chain.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DvrPrime {
    Zero,
    Max,
}

impl fmt::Display for DvrPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DvrPrime::Zero => write!(f, "(0)"),
            DvrPrime::Max => write!(f, "m"),
        }
    }
}

pub type DvrSet = BTreeSet<DvrPrime>;

pub fn spec() -> DvrSet {
    [DvrPrime::Zero, DvrPrime::Max].into_iter().collect()
}

pub fn max_only() -> DvrSet {
    [DvrPrime::Max].into_iter().collect()
}

pub fn zero_only() -> DvrSet {
    [DvrPrime::Zero].into_iter().collect()
}

/// `U(p)`: primes contained in `p` (the spectrum is the chain `(0) ⊂ m`).
pub fn under(p: DvrPrime) -> DvrSet {
    match p {
        DvrPrime::Zero => zero_only(),
        DvrPrime::Max => spec(),
    }
}

pub fn minimal(set: &DvrSet) -> DvrSet {
    if set.contains(&DvrPrime::Zero) {
        zero_only()
    } else {
        set.clone()
    }
}

pub fn maximal(set: &DvrSet) -> DvrSet {
    if set.contains(&DvrPrime::Max) {
        max_only()
    } else {
        set.clone()
    }
}

/// Formal sum over the alphabet: `free`·R ⊕ `frac`·K ⊕ `env`·E(R/m) ⊕
/// ⊕_k tors[k]·R/m^k.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BasicObject {
    pub free: u32,
    pub frac: u32,
    pub env: u32,
    /// exponent ≥ 1 → multiplicity
    pub tors: std::collections::BTreeMap<u32, u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum DvrError {
    #[error("cannot parse {0:?} as a formal sum over R, K, E, T(k)")]
    Parse(String),
    #[error("torsion exponent must be at least 1")]
    BadExponent,
    #[error("the dual of the fraction field leaves the closed alphabet")]
    OutsideDualityTable,
}

impl BasicObject {
    pub fn zero() -> BasicObject {
        BasicObject::default()
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.frac == 0 && self.env == 0 && self.tors.values().all(|&m| m == 0)
    }

    pub fn free_part(n: u32) -> BasicObject {
        BasicObject { free: n, ..Default::default() }
    }

    pub fn frac_part(n: u32) -> BasicObject {
        BasicObject { frac: n, ..Default::default() }
    }

    pub fn env_part(n: u32) -> BasicObject {
        BasicObject { env: n, ..Default::default() }
    }

    pub fn tors_part(k: u32, n: u32) -> BasicObject {
        let mut tors = std::collections::BTreeMap::new();
        if n > 0 {
            tors.insert(k, n);
        }
        BasicObject { tors, ..Default::default() }
    }

    pub fn add(&self, other: &BasicObject) -> BasicObject {
        let mut tors = self.tors.clone();
        for (&k, &m) in &other.tors {
            *tors.entry(k).or_insert(0) += m;
        }
        BasicObject {
            free: self.free + other.free,
            frac: self.frac + other.frac,
            env: self.env + other.env,
            tors,
        }
    }

    pub fn has_tors(&self) -> bool {
        self.tors.values().any(|&m| m > 0)
    }

    /// Parse expressions like `"R + 2*E + T(3) + K"`.
    pub fn parse(input: &str) -> Result<BasicObject, DvrError> {
        let mut out = BasicObject::zero();
        let trimmed = input.trim();
        if trimmed.is_empty() {
            return Err(DvrError::Parse(input.into()));
        }
        if trimmed == "0" {
            return Ok(out);
        }
        for raw in trimmed.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                return Err(DvrError::Parse(input.into()));
            }
            let (count, atom) = match term.split_once('*') {
                Some((n, a)) => (
                    n.trim().parse::<u32>().map_err(|_| DvrError::Parse(term.into()))?,
                    a.trim(),
                ),
                None => (1, term),
            };
            let part = if atom == "R" {
                BasicObject::free_part(count)
            } else if atom == "K" {
                BasicObject::frac_part(count)
            } else if atom == "E" {
                BasicObject::env_part(count)
            } else if let Some(rest) = atom.strip_prefix("T(") {
                let inner = rest.strip_suffix(')').ok_or_else(|| DvrError::Parse(term.into()))?;
                let k: u32 = inner.trim().parse().map_err(|_| DvrError::Parse(term.into()))?;
                if k == 0 {
                    return Err(DvrError::BadExponent);
                }
                BasicObject::tors_part(k, count)
            } else {
                return Err(DvrError::Parse(term.into()));
            };
            out = out.add(&part);
        }
        Ok(out)
    }
}

impl fmt::Display for BasicObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        let fmt_term = |n: u32, atom: String| {
            if n == 1 {
                atom
            } else {
                format!("{n}*{atom}")
            }
        };
        if self.free > 0 {
            terms.push(fmt_term(self.free, "R".into()));
        }
        if self.frac > 0 {
            terms.push(fmt_term(self.frac, "K".into()));
        }
        for (&k, &m) in &self.tors {
            if m > 0 {
                terms.push(fmt_term(m, format!("T({k})")));
            }
        }
        if self.env > 0 {
            terms.push(fmt_term(self.env, "E".into()));
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DvrKind {
    Supp,
    SmallSupp,
    BigCosupp,
    SmallCosupp,
    Ass,
    Coass,
}

impl DvrKind {
    pub const ALL: [DvrKind; 6] = [
        DvrKind::Supp,
        DvrKind::SmallSupp,
        DvrKind::BigCosupp,
        DvrKind::SmallCosupp,
        DvrKind::Ass,
        DvrKind::Coass,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DvrKind::Supp => "Supp",
            DvrKind::SmallSupp => "supp",
            DvrKind::BigCosupp => "coSupp",
            DvrKind::SmallCosupp => "cosupp",
            DvrKind::Ass => "Ass",
            DvrKind::Coass => "Coass",
        }
    }

    pub fn parse(s: &str) -> Option<DvrKind> {
        DvrKind::ALL.into_iter().find(|k| k.label() == s)
    }
}

/// The closed rule table, one set per alphabet generator, unioned over the
/// summands actually present.
pub fn dvr_support(obj: &BasicObject, kind: DvrKind) -> DvrSet {
    let mut out = DvrSet::new();
    let mut put = |set: DvrSet| out.extend(set);
    match kind {
        DvrKind::Supp | DvrKind::SmallSupp => {
            if obj.free > 0 {
                put(spec());
            }
            if obj.frac > 0 {
                put(zero_only());
            }
            if obj.has_tors() {
                put(max_only());
            }
            if obj.env > 0 {
                put(max_only());
            }
        }
        DvrKind::SmallCosupp => {
            if obj.free > 0 {
                put(max_only());
            }
            if obj.frac > 0 {
                put(zero_only());
            }
            if obj.has_tors() {
                put(max_only());
            }
            if obj.env > 0 {
                put(under(DvrPrime::Max));
            }
        }
        DvrKind::BigCosupp => {
            if obj.free > 0 {
                put(max_only());
            }
            if obj.frac > 0 {
                put(spec());
            }
            if obj.has_tors() {
                put(max_only());
            }
            if obj.env > 0 {
                put(spec());
            }
        }
        DvrKind::Ass => {
            if obj.free > 0 || obj.frac > 0 {
                put(zero_only());
            }
            if obj.has_tors() || obj.env > 0 {
                put(max_only());
            }
        }
        DvrKind::Coass => {
            if obj.free > 0 || obj.has_tors() {
                put(max_only());
            }
            if obj.frac > 0 || obj.env > 0 {
                put(zero_only());
            }
        }
    }
    out
}

/// Complex-valued inputs evaluate homology-degreewise: big cosupport is the
/// union over the homology objects, and for small cosupport only the
/// minimal-element form is certified (the literal union is the flagged
/// probe, not a rule).
pub fn dvr_complex_big_cosupp(homologies: &[BasicObject]) -> DvrSet {
    let mut out = DvrSet::new();
    for h in homologies {
        out.extend(dvr_support(h, DvrKind::BigCosupp));
    }
    out
}

pub fn dvr_complex_min_small_cosupp(homologies: &[BasicObject]) -> DvrSet {
    let mut union = DvrSet::new();
    for h in homologies {
        union.extend(dvr_support(h, DvrKind::SmallCosupp));
    }
    minimal(&union)
}

/// Matlis duality on the closed alphabet: `R ↔ E`, `R/m^k` self-dual; the
/// fraction field leaves the table.
pub fn dvr_dual(obj: &BasicObject) -> Result<BasicObject, DvrError> {
    if obj.frac > 0 {
        return Err(DvrError::OutsideDualityTable);
    }
    Ok(BasicObject {
        free: obj.env,
        env: obj.free,
        frac: 0,
        tors: obj.tors.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeStatus {
    Holds,
    Flagged,
}

#[derive(Clone, Debug)]
pub struct ProbeClaim {
    pub label: String,
    pub status: ProbeStatus,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct DemoReport {
    pub probe: String,
    pub claims: Vec<ProbeClaim>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    Strictness,
    Cor34,
    MaxMin,
}

impl Probe {
    pub fn parse(s: &str) -> Option<Probe> {
        match s {
            "strictness" => Some(Probe::Strictness),
            "cor34" => Some(Probe::Cor34),
            "maxmin" => Some(Probe::MaxMin),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Probe::Strictness => "strictness",
            Probe::Cor34 => "cor34",
            Probe::MaxMin => "maxmin",
        }
    }
}

fn set_str(s: &DvrSet) -> String {
    let items: Vec<String> = s.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn dvr_demo(probe: Probe) -> DemoReport {
    match probe {
        Probe::Strictness => {
            let free = BasicObject::free_part(1);
            let env = BasicObject::env_part(1);
            let frac = BasicObject::frac_part(1);
            let co_r = dvr_support(&free, DvrKind::SmallCosupp);
            let su_r = dvr_support(&free, DvrKind::SmallSupp);
            let su_e = dvr_support(&env, DvrKind::SmallSupp);
            let co_e = dvr_support(&env, DvrKind::SmallCosupp);
            let co_k = dvr_support(&frac, DvrKind::SmallCosupp);
            let big_k = dvr_support(&frac, DvrKind::BigCosupp);
            let claims = vec![
                ProbeClaim {
                    label: "cosupp R = {m} strictly inside Spec R = supp R".into(),
                    status: if co_r == max_only() && su_r == spec() && co_r != su_r {
                        ProbeStatus::Holds
                    } else {
                        ProbeStatus::Flagged
                    },
                    detail: format!("cosupp R = {}, supp R = {}", set_str(&co_r), set_str(&su_r)),
                },
                ProbeClaim {
                    label: "supp E = {m} strictly inside Spec R = cosupp E".into(),
                    status: if su_e == max_only() && co_e == spec() && su_e != co_e {
                        ProbeStatus::Holds
                    } else {
                        ProbeStatus::Flagged
                    },
                    detail: format!("supp E = {}, cosupp E = {}", set_str(&su_e), set_str(&co_e)),
                },
                ProbeClaim {
                    label: "cosupp K strictly inside coSupp K (strict outside the artinian regime)"
                        .into(),
                    status: if co_k.is_subset(&big_k) && co_k != big_k {
                        ProbeStatus::Holds
                    } else {
                        ProbeStatus::Flagged
                    },
                    detail: format!(
                        "cosupp K = {}, coSupp K = {}",
                        set_str(&co_k),
                        set_str(&big_k)
                    ),
                },
            ];
            DemoReport { probe: "strictness".into(), claims }
        }
        Probe::Cor34 => {
            // the envelope in degree 0: its own homology, so the printed
            // identity forces the set to be an antichain — but it is a chain
            let env = BasicObject::env_part(1);
            let cosupp = dvr_support(&env, DvrKind::SmallCosupp);
            let min_of_h = minimal(&cosupp);
            let literal_holds = cosupp == min_of_h;
            let minmin_holds = minimal(&cosupp) == min_of_h;
            let claims = vec![
                ProbeClaim {
                    label: "literal form: cosupp M equals min of cosupp H(M)".into(),
                    status: if literal_holds { ProbeStatus::Holds } else { ProbeStatus::Flagged },
                    detail: format!(
                        "cosupp E = {} but min(cosupp H) = {}",
                        set_str(&cosupp),
                        set_str(&min_of_h)
                    ),
                },
                ProbeClaim {
                    label: "corrected form: min(cosupp M) equals min(cosupp H(M))".into(),
                    status: if minmin_holds { ProbeStatus::Holds } else { ProbeStatus::Flagged },
                    detail: format!("both sides are {}", set_str(&min_of_h)),
                },
            ];
            DemoReport { probe: "cor34".into(), claims }
        }
        Probe::MaxMin => {
            let objs: Vec<(&str, BasicObject)> = vec![
                ("R", BasicObject::free_part(1)),
                ("K", BasicObject::frac_part(1)),
                ("T(1)", BasicObject::tors_part(1, 1)),
                ("T(3)", BasicObject::tors_part(3, 1)),
                ("E", BasicObject::env_part(1)),
            ];
            let mut claims = Vec::new();
            for (name, obj) in objs {
                let supp = dvr_support(&obj, DvrKind::SmallSupp);
                let cosupp = dvr_support(&obj, DvrKind::SmallCosupp);
                let big_co = dvr_support(&obj, DvrKind::BigCosupp);
                let max_ok = maximal(&supp) == maximal(&cosupp);
                let min_ok = minimal(&cosupp) == minimal(&big_co);
                claims.push(ProbeClaim {
                    label: format!("{name}: max(supp) = max(cosupp) and min(cosupp) = min(coSupp)"),
                    status: if max_ok && min_ok { ProbeStatus::Holds } else { ProbeStatus::Flagged },
                    detail: format!(
                        "max supp = {}, max cosupp = {}, min cosupp = {}, min coSupp = {}",
                        set_str(&maximal(&supp)),
                        set_str(&maximal(&cosupp)),
                        set_str(&minimal(&cosupp)),
                        set_str(&minimal(&big_co))
                    ),
                });
            }
            DemoReport { probe: "maxmin".into(), claims }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_reproduces_the_computations() {
        // cosupp R = Max, supp R = Spec
        let r = BasicObject::free_part(1);
        assert_eq!(dvr_support(&r, DvrKind::SmallCosupp), max_only());
        assert_eq!(dvr_support(&r, DvrKind::SmallSupp), spec());
        // residue field and fraction field: cosupp k(p) = {p} = supp k(p)
        let k_max = BasicObject::tors_part(1, 1);
        assert_eq!(dvr_support(&k_max, DvrKind::SmallCosupp), max_only());
        assert_eq!(dvr_support(&k_max, DvrKind::SmallSupp), max_only());
        let k_zero = BasicObject::frac_part(1);
        assert_eq!(dvr_support(&k_zero, DvrKind::SmallCosupp), zero_only());
        assert_eq!(dvr_support(&k_zero, DvrKind::SmallSupp), zero_only());
        // envelopes: supp E(R/m) = {m}, cosupp E(R/m) = U(m); E(R/0) = K
        let e = BasicObject::env_part(1);
        assert_eq!(dvr_support(&e, DvrKind::SmallSupp), max_only());
        assert_eq!(dvr_support(&e, DvrKind::SmallCosupp), under(DvrPrime::Max));
        assert_eq!(dvr_support(&k_zero, DvrKind::SmallCosupp), under(DvrPrime::Zero));
    }

    #[test]
    fn duality_on_closed_alphabet() {
        let free = BasicObject::free_part(1);
        let env = BasicObject::env_part(1);
        let tors = BasicObject::tors_part(3, 2);
        assert_eq!(dvr_dual(&free).unwrap(), env);
        assert_eq!(dvr_dual(&env).unwrap(), free);
        assert_eq!(dvr_dual(&tors).unwrap(), tors);
        assert!(matches!(
            dvr_dual(&BasicObject::frac_part(1)),
            Err(DvrError::OutsideDualityTable)
        ));
    }

    #[test]
    fn duality_consistency_of_the_tables() {
        // cosupp X = supp D(X), coSupp X = Supp D(X), Coass X = Ass D(X)
        let objs = [
            BasicObject::free_part(1),
            BasicObject::env_part(1),
            BasicObject::tors_part(1, 1),
            BasicObject::tors_part(4, 2),
            BasicObject::free_part(2).add(&BasicObject::tors_part(2, 1)),
        ];
        for obj in &objs {
            let dual = dvr_dual(obj).unwrap();
            assert_eq!(
                dvr_support(obj, DvrKind::SmallCosupp),
                dvr_support(&dual, DvrKind::SmallSupp),
                "{obj}"
            );
            assert_eq!(
                dvr_support(obj, DvrKind::BigCosupp),
                dvr_support(&dual, DvrKind::Supp),
                "{obj}"
            );
            assert_eq!(
                dvr_support(obj, DvrKind::Coass),
                dvr_support(&dual, DvrKind::Ass),
                "{obj}"
            );
        }
    }

    #[test]
    fn additivity_over_sums() {
        let a = BasicObject::free_part(1);
        let b = BasicObject::env_part(1);
        let sum = a.add(&b);
        for kind in DvrKind::ALL {
            let mut expected = dvr_support(&a, kind);
            expected.extend(dvr_support(&b, kind));
            assert_eq!(dvr_support(&sum, kind), expected);
        }
    }

    #[test]
    fn inclusion_strict_exactly_at_frac() {
        let objs = [
            ("R", BasicObject::free_part(1), false),
            ("K", BasicObject::frac_part(1), true),
            ("T(2)", BasicObject::tors_part(2, 1), false),
            ("E", BasicObject::env_part(1), false),
        ];
        for (name, obj, strict) in objs {
            let small = dvr_support(&obj, DvrKind::SmallCosupp);
            let big = dvr_support(&obj, DvrKind::BigCosupp);
            assert!(small.is_subset(&big), "{name}");
            assert_eq!(small != big, strict, "{name}");
        }
    }

    #[test]
    fn parse_round_trip() {
        let obj = BasicObject::parse("R + 2*E + T(3) + K").unwrap();
        assert_eq!(obj.free, 1);
        assert_eq!(obj.env, 2);
        assert_eq!(obj.frac, 1);
        assert_eq!(obj.tors.get(&3), Some(&1));
        let printed = obj.to_string();
        assert_eq!(BasicObject::parse(&printed).unwrap(), obj);
        assert!(BasicObject::parse("Q + R").is_err());
        assert!(BasicObject::parse("T(0)").is_err());
        assert_eq!(BasicObject::parse("0").unwrap(), BasicObject::zero());
    }

    #[test]
    fn demo_probes() {
        let strict = dvr_demo(Probe::Strictness);
        assert!(strict.claims.iter().all(|c| c.status == ProbeStatus::Holds));

        let cor = dvr_demo(Probe::Cor34);
        assert_eq!(cor.claims[0].status, ProbeStatus::Flagged, "literal form fails on E");
        assert_eq!(cor.claims[1].status, ProbeStatus::Holds, "min-min form holds");

        let mm = dvr_demo(Probe::MaxMin);
        assert!(mm.claims.iter().all(|c| c.status == ProbeStatus::Holds));
    }

    #[test]
    fn zero_object_has_empty_sets() {
        for kind in DvrKind::ALL {
            assert!(dvr_support(&BasicObject::zero(), kind).is_empty());
        }
    }

    #[test]
    fn complexes_evaluate_degreewise() {
        // a two-homology formal complex: E in one degree, T(2) in another
        let hs = vec![BasicObject::env_part(1), BasicObject::tors_part(2, 1)];
        assert_eq!(dvr_complex_big_cosupp(&hs), spec());
        assert_eq!(dvr_complex_min_small_cosupp(&hs), zero_only());
        let torsion_only = vec![BasicObject::tors_part(3, 2)];
        assert_eq!(dvr_complex_min_small_cosupp(&torsion_only), max_only());
    }
}
