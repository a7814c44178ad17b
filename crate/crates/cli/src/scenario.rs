//! Scenario files: a ring spec plus named modules and complexes, with
//! optional embedded computation requests. All invariants are checked at
//! parse time so execution works on validated objects only.

use cosupp_core::dercat::Complex;
use cosupp_core::finmod::{self, FinModule, ModuleMap};
use cosupp_core::finring::{build_ring, Ring, RingSpec};
use cosupp_core::linalg::Mat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug)]
pub enum ScenarioError {
    /// schema violations and invariant failures: exit code 2
    Input(String),
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Input(m) => write!(f, "{m}"),
        }
    }
}

fn input_err<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Input(msg.into()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub ring: RingSpec,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleDef>,
    #[serde(default)]
    pub complexes: BTreeMap<String, ComplexDef>,
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default)]
    pub requests: Vec<RequestDef>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleDef {
    Cokernel {
        cokernel: CokernelDef,
    },
    Direct {
        #[serde(default)]
        ring: Option<String>,
        orders: Vec<i64>,
        action: BTreeMap<String, Vec<Vec<i64>>>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CokernelDef {
    pub rows: usize,
    pub entries: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexDef {
    pub modules: BTreeMap<String, String>,
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RequestDef {
    pub op: String,
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub route: Option<String>,
    #[serde(default)]
    pub prime: Option<usize>,
    #[serde(default)]
    pub target: Option<String>,
}

pub struct Scenario {
    pub ring: Arc<Ring>,
    pub modules: BTreeMap<String, FinModule>,
    pub complexes: BTreeMap<String, Complex>,
    pub target: Option<String>,
    pub requests: Vec<RequestDef>,
}

pub fn parse_scenario(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| ScenarioError::Input(format!("schema violation: {e}")))?;
    build_scenario(file)
}

pub fn build_scenario(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
    let ring = build_ring(&file.ring)
        .map_err(|e| ScenarioError::Input(format!("invalid ring spec: {e}")))?;
    let mut modules = BTreeMap::new();
    for (name, def) in &file.modules {
        let m = build_module(&ring, name, def)?;
        modules.insert(name.clone(), m);
    }
    let mut complexes = BTreeMap::new();
    for (name, def) in &file.complexes {
        let c = build_complex(&ring, &modules, name, def)?;
        complexes.insert(name.clone(), c);
    }
    if let Some(t) = &file.target {
        if !modules.contains_key(t) && !complexes.contains_key(t) {
            return input_err(format!("target {t:?} does not resolve to a module or complex"));
        }
    }
    for r in &file.requests {
        if let Some(t) = &r.target {
            if !modules.contains_key(t) && !complexes.contains_key(t) {
                return input_err(format!("request target {t:?} does not resolve"));
            }
        }
    }
    Ok(Scenario {
        ring,
        modules,
        complexes,
        target: file.target,
        requests: file.requests,
    })
}

fn build_module(
    ring: &Arc<Ring>,
    name: &str,
    def: &ModuleDef,
) -> Result<FinModule, ScenarioError> {
    match def {
        ModuleDef::Cokernel { cokernel } => {
            let entries: Vec<Vec<Vec<i128>>> = cokernel
                .entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| e.iter().map(|&x| x as i128).collect())
                        .collect()
                })
                .collect();
            for row in &entries {
                for e in row {
                    if e.len() != ring.dim() {
                        return input_err(format!(
                            "module {name:?}: ring element has {} coordinates, expected {}",
                            e.len(),
                            ring.dim()
                        ));
                    }
                }
            }
            finmod::cokernel_presentation(ring, cokernel.rows, &entries)
                .map_err(|e| ScenarioError::Input(format!("module {name:?}: {e}")))
        }
        ModuleDef::Direct { ring: ring_ref, orders, action } => {
            if let Some(rr) = ring_ref {
                if rr != "ring" {
                    return input_err(format!(
                        "module {name:?}: dangling ring reference {rr:?}"
                    ));
                }
            }
            let orders: Vec<i128> = orders.iter().map(|&x| x as i128).collect();
            let n = orders.len();
            let mut mats = Vec::new();
            for g in 0..ring.dim() {
                let key = g.to_string();
                let rows = action.get(&key).ok_or_else(|| {
                    ScenarioError::Input(format!(
                        "module {name:?}: missing action for ring generator {g}"
                    ))
                })?;
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return input_err(format!(
                        "module {name:?}: action {g} is not a {n}x{n} matrix"
                    ));
                }
                mats.push(Mat::from_rows(
                    rows.iter()
                        .map(|r| r.iter().map(|&x| x as i128).collect())
                        .collect(),
                ));
            }
            finmod::from_presentation(ring, orders, mats)
                .map_err(|e| ScenarioError::Input(format!("module {name:?}: {e}")))
        }
    }
}

fn build_complex(
    ring: &Arc<Ring>,
    modules: &BTreeMap<String, FinModule>,
    name: &str,
    def: &ComplexDef,
) -> Result<Complex, ScenarioError> {
    let mut degrees: Vec<(i64, &String)> = Vec::new();
    for (deg, mref) in &def.modules {
        let d: i64 = deg.parse().map_err(|_| {
            ScenarioError::Input(format!("complex {name:?}: degree {deg:?} is not an integer"))
        })?;
        degrees.push((d, mref));
    }
    degrees.sort_by_key(|(d, _)| *d);
    if degrees.is_empty() {
        return Ok(Complex::zero(ring));
    }
    let lo = degrees[0].0;
    let hi = degrees.last().unwrap().0;
    let mut mods = Vec::new();
    for d in lo..=hi {
        match degrees.iter().find(|(dd, _)| *dd == d) {
            Some((_, mref)) => {
                let m = modules.get(*mref).ok_or_else(|| {
                    ScenarioError::Input(format!(
                        "complex {name:?}: dangling module reference {mref:?} at degree {d}"
                    ))
                })?;
                mods.push(m.clone());
            }
            None => mods.push(finmod::zero_module(ring)),
        }
    }
    let mut diffs = Vec::new();
    for d in (lo + 1)..=hi {
        let source = mods[(d - lo) as usize].clone();
        let target = mods[(d - lo - 1) as usize].clone();
        let matrix = match def.maps.get(&d.to_string()) {
            Some(rows) => {
                if rows.len() != target.dim() || rows.iter().any(|r| r.len() != source.dim()) {
                    return input_err(format!(
                        "complex {name:?}: map at degree {d} is not {}x{}",
                        target.dim(),
                        source.dim()
                    ));
                }
                Mat::from_rows(
                    rows.iter()
                        .map(|r| r.iter().map(|&x| x as i128).collect())
                        .collect(),
                )
            }
            None => Mat::zeros(target.dim(), source.dim()),
        };
        let map = ModuleMap::new(source, target, matrix).map_err(|e| {
            ScenarioError::Input(format!("complex {name:?}: map at degree {d}: {e}"))
        })?;
        diffs.push(map);
    }
    Complex::build(ring.clone(), lo, mods, diffs)
        .map_err(|e| ScenarioError::Input(format!("complex {name:?}: {e}")))
}

/// Serialize a module in the scenario schema so computed artifacts round-trip
/// through `parse_scenario`.
pub fn module_to_json(m: &FinModule) -> serde_json::Value {
    let mut action = serde_json::Map::new();
    for (g, a) in m.action.iter().enumerate() {
        let rows: Vec<Vec<i64>> = (0..a.nrows())
            .map(|r| a.row(r).iter().map(|&x| x as i64).collect())
            .collect();
        action.insert(g.to_string(), serde_json::json!(rows));
    }
    serde_json::json!({
        "ring": "ring",
        "orders": m.orders.iter().map(|&x| x as i64).collect::<Vec<i64>>(),
        "action": action,
    })
}
