//! Batch command-line surface: parse scenario files, run computations and
//! property suites, emit human-readable tables and machine JSON.
//!
//! Exit codes are a stable contract: 0 success / all-pass, 1 property
//! failure or route disagreement, 2 input error.

mod scenario;

use clap::{Parser, Subcommand};
use cosupp_core::dercat::Complex;
use cosupp_core::dvr::{self, BasicObject, DvrKind, Probe, ProbeStatus};
use cosupp_core::finring::{self, prime_label, Ring, RingSpec};
use cosupp_core::supports::{
    ann_complex, ass_coass, depth_width, support_set, support_set_all_routes, PrimeFamily, Route,
    SupportError, SupportKind, SupportSet,
};
use cosupp_core::verify::{run_suite, write_jsonl, GenProfile, SuiteConfig, Verdict};
use scenario::{parse_scenario, RequestDef, Scenario, ScenarioError};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "cosupp", version, about = "support/cosupport computations over finite rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a ring specification file
    Ring {
        #[command(subcommand)]
        command: RingCommand,
    },
    /// Run computations from a scenario file
    Compute {
        /// support kind (Supp, supp, coSupp, cosupp, co-supp, Co-supp, all,
        /// Ass, Coass, ann, depth-width)
        #[arg(long = "set")]
        set: Option<String>,
        /// route selection (definitional, dual, homology, all)
        #[arg(long, default_value = "all")]
        route: String,
        /// spectrum index for prime-parametrized computations
        #[arg(long)]
        prime: Option<usize>,
        #[arg(long)]
        input: PathBuf,
        /// named module/complex to compute on
        #[arg(long)]
        target: Option<String>,
        /// print machine JSON instead of the table
        #[arg(long)]
        json: bool,
        /// also write the machine JSON to a file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Property suites
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// The symbolic complete-DVR layer
    Dvr {
        #[command(subcommand)]
        command: DvrCommand,
    },
}

#[derive(Subcommand)]
enum RingCommand {
    /// Print order, local factors, spectrum and the Jacobson radical
    Info {
        file: PathBuf,
        /// emit the canonical machine form: additive orders ascending,
        /// structure constants row-major
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Run a property suite over seeded instances
    Run {
        /// comma-separated property ids, or "all" (default)
        #[arg(long)]
        suite: Option<String>,
        /// seed range "a..b", end exclusive (default 0..50)
        #[arg(long)]
        seeds: Option<String>,
        /// JSONL verdict corpus to append to
        #[arg(long)]
        out: Option<PathBuf>,
        /// worker threads (default 1)
        #[arg(long)]
        jobs: Option<usize>,
        /// module-order cap for generated instances (default 1024)
        #[arg(long)]
        max_module_order: Option<i64>,
        /// turn off windowed cross-checks (validation is on by default)
        #[arg(long)]
        fast: bool,
        /// JSON config file (registry subset, seeds, caps); explicit flags
        /// override file values
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DvrCommand {
    /// Run a named probe: strictness, cor34, maxmin
    Demo {
        probe: String,
        /// append the report to a JSONL file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a support set of a formal object like "R + 2*E + T(3) + K"
    Eval {
        expr: String,
        #[arg(long = "set")]
        set: String,
    },
}

enum CliError {
    Input(String),
    Failure(String),
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<SupportError> for CliError {
    fn from(e: SupportError) -> CliError {
        match e {
            SupportError::RouteDisagreement { .. } | SupportError::AssRouteDisagreement(_) => {
                CliError::Failure(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            eprintln!("failure: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ring { command: RingCommand::Info { file, json } } => ring_info(&file, json),
        Command::Compute { set, route, prime, input, target, json, out } => {
            compute(set, route, prime, &input, target, json, out)
        }
        Command::Verify {
            command:
                VerifyCommand::Run { suite, seeds, out, jobs, max_module_order, fast, config },
        } => verify_run(suite, seeds, out, jobs, max_module_order, !fast, config),
        Command::Dvr { command: DvrCommand::Demo { probe, out } } => dvr_demo_cmd(&probe, out),
        Command::Dvr { command: DvrCommand::Eval { expr, set } } => dvr_eval(&expr, &set),
    }
}

fn read_ring_spec(file: &std::path::Path) -> Result<(RingSpec, Arc<Ring>), CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", file.display())))?;
    let spec: RingSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("schema violation: {e}")))?;
    let ring = finring::build_ring(&spec).map_err(|e| CliError::Input(e.to_string()))?;
    Ok((spec, ring))
}

fn ring_info(file: &std::path::Path, json: bool) -> Result<(), CliError> {
    let (spec, ring) = read_ring_spec(file)?;
    if json {
        let k = ring.dim();
        let mut constants = Vec::with_capacity(k * k * k);
        for i in 0..k {
            for j in 0..k {
                for t in 0..k {
                    constants.push(ring.structure_constant(i, j)[t] as i64);
                }
            }
        }
        let machine = json!({
            "spec": spec,
            "label": ring.label(),
            "order": ring.order() as i64,
            "additive_orders": ring.additive_orders().iter().map(|&d| d as i64).collect::<Vec<i64>>(),
            "one": ring.one().iter().map(|&x| x as i64).collect::<Vec<i64>>(),
            "structure_constants_row_major": constants,
            "spectrum": ring.spectrum().iter().enumerate().map(|(i, p)| json!({
                "local_index": p.local_index,
                "label": prime_label(&ring, i),
                "generators": p.subgroup.basis_rows().iter()
                    .map(|r| r.iter().map(|&x| x as i64).collect::<Vec<i64>>())
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&machine).expect("serializable"));
        return Ok(());
    }
    println!("ring        {}", ring.label());
    println!("order       {}", ring.order());
    println!(
        "additive    {}",
        ring.additive_orders()
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect::<Vec<_>>()
            .join(" + ")
    );
    let factors = ring.local_factors();
    println!("local factors ({})", factors.len());
    for (i, f) in factors.iter().enumerate() {
        println!(
            "  e{i} = {:?}   factor of order {}   residue field of order {}",
            f.idempotent,
            f.ring.order(),
            ring.spectrum()[i].subgroup.index()
        );
    }
    println!("spectrum");
    for (i, p) in ring.spectrum().iter().enumerate() {
        println!(
            "  {}  basis {:?}  |p| = {}",
            prime_label(&ring, i),
            p.subgroup.basis_rows(),
            p.subgroup.order()
        );
    }
    let j = ring.jacobson_radical();
    println!("J(R)        basis {:?}  |J| = {}", j.subgroup.basis_rows(), j.subgroup.order());
    Ok(())
}

fn resolve_target(s: &Scenario, flag: Option<String>) -> Result<(String, Complex), CliError> {
    let name = flag
        .or_else(|| s.target.clone())
        .or_else(|| {
            if s.complexes.len() == 1 {
                s.complexes.keys().next().cloned()
            } else if s.complexes.is_empty() && s.modules.len() == 1 {
                s.modules.keys().next().cloned()
            } else {
                None
            }
        })
        .ok_or_else(|| {
            CliError::Input("no target: pass --target or declare one in the scenario".into())
        })?;
    if let Some(c) = s.complexes.get(&name) {
        return Ok((name, c.clone()));
    }
    if let Some(m) = s.modules.get(&name) {
        return Ok((name, Complex::from_module(m.clone(), 0)));
    }
    Err(CliError::Input(format!("target {name:?} does not resolve")))
}

fn support_set_json(ring: &Arc<Ring>, s: &SupportSet) -> Value {
    let primes: Vec<Value> = s
        .indices()
        .iter()
        .map(|&i| {
            json!({
                "local_index": ring.spectrum()[i].local_index,
                "generators": ring.spectrum()[i].subgroup.basis_rows().iter()
                    .map(|r| r.iter().map(|&x| x as i64).collect::<Vec<i64>>())
                    .collect::<Vec<_>>(),
                "label": prime_label(ring, i),
                "route": s.provenance.get(&i).cloned().unwrap_or_default(),
            })
        })
        .collect();
    json!(primes)
}

fn set_display(ring: &Arc<Ring>, s: &SupportSet) -> String {
    let labels: Vec<String> = s.indices().iter().map(|&i| prime_label(ring, i)).collect();
    format!("{{{}}}", labels.join(", "))
}

fn compute(
    set: Option<String>,
    route: String,
    prime: Option<usize>,
    input: &std::path::Path,
    target: Option<String>,
    json_only: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let scen = parse_scenario(input)?;
    let ring = scen.ring.clone();
    let (target_name, complex) = resolve_target(&scen, target)?;

    let mut requests: Vec<RequestDef> = Vec::new();
    if let Some(kind) = set {
        requests.push(RequestDef {
            op: "support".into(),
            kind: Some(kind),
            route: Some(route.clone()),
            prime,
            target: Some(target_name.clone()),
        });
    } else if !scen.requests.is_empty() {
        requests = scen.requests.clone();
    } else {
        requests.push(RequestDef {
            op: "support".into(),
            kind: Some("all".into()),
            route: Some(route.clone()),
            prime,
            target: Some(target_name.clone()),
        });
    }

    let mut table = Vec::new();
    let mut results = Vec::new();
    for req in &requests {
        let c = match &req.target {
            Some(t) if *t != target_name => {
                let (_, cc) = resolve_target(&scen, Some(t.clone()))?;
                cc
            }
            _ => complex.clone(),
        };
        run_request(&ring, &c, req, &mut table, &mut results)?;
    }

    // computed homology modules round-trip through the module schema
    let profile = cosupp_core::dercat::homology(&complex);
    let mut artifacts = serde_json::Map::new();
    for (deg, m) in &profile.summands {
        artifacts.insert(format!("H_{deg}"), scenario::module_to_json(m));
    }

    let machine = json!({
        "ring": ring.label(),
        "target": target_name,
        "results": results,
        "artifacts": artifacts,
    });
    if json_only {
        println!("{}", serde_json::to_string_pretty(&machine).expect("serializable"));
    } else {
        println!("ring {}   target {}", ring.label(), target_name);
        for line in &table {
            println!("{line}");
        }
    }
    if let Some(path) = out {
        std::fs::write(&path, serde_json::to_string_pretty(&machine).expect("serializable"))
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_request(
    ring: &Arc<Ring>,
    complex: &Complex,
    req: &RequestDef,
    table: &mut Vec<String>,
    results: &mut Vec<Value>,
) -> Result<(), CliError> {
    match req.op.as_str() {
        "support" => {
            let kind_str = req.kind.clone().unwrap_or_else(|| "all".into());
            let route_str = req.route.clone().unwrap_or_else(|| "all".into());
            let kinds: Vec<SupportKind> = if kind_str == "all" {
                SupportKind::ALL.to_vec()
            } else {
                match SupportKind::parse(&kind_str) {
                    Some(k) => vec![k],
                    None => return bundle_request(ring, complex, &kind_str, req, table, results),
                }
            };
            for kind in kinds {
                let s = if route_str == "all" {
                    support_set_all_routes(complex, kind, true)?
                } else {
                    let r = Route::parse(&route_str)
                        .ok_or_else(|| CliError::Input(format!("unknown route {route_str:?}")))?;
                    support_set(complex, kind, r, true)?
                };
                table.push(format!(
                    "{:<9} [{}]  {}",
                    kind.label(),
                    route_str,
                    set_display(ring, &s)
                ));
                results.push(json!({
                    "op": "support",
                    "kind": kind.label(),
                    "route": route_str,
                    "primes": support_set_json(ring, &s),
                }));
            }
            Ok(())
        }
        other => bundle_request(ring, complex, other, req, table, results),
    }
}

fn bundle_request(
    ring: &Arc<Ring>,
    complex: &Complex,
    op: &str,
    req: &RequestDef,
    table: &mut Vec<String>,
    results: &mut Vec<Value>,
) -> Result<(), CliError> {
    match op {
        "Ass" | "ass" | "Coass" | "coass" => {
            let family = if op.eq_ignore_ascii_case("ass") { PrimeFamily::Ass } else { PrimeFamily::Coass };
            let bundle = ass_coass(complex, family, true)?;
            let (derived_name, edge_name, small_u, big_u) = match family {
                PrimeFamily::Ass => ("Ass", "ass", "z", "Z"),
                PrimeFamily::Coass => ("Coass", "coass", "w", "W"),
            };
            table.push(format!("{:<9} {}", derived_name, set_display(ring, &bundle.derived)));
            table.push(format!("{:<9} {}", edge_name, set_display(ring, &bundle.edge)));
            table.push(format!(
                "{:<9} union of {}",
                small_u,
                set_display(ring, &SupportSet::new(bundle.small_union.iter().copied().collect(), "union"))
            ));
            table.push(format!(
                "{:<9} union of {}",
                big_u,
                set_display(ring, &SupportSet::new(bundle.big_union.iter().copied().collect(), "union"))
            ));
            results.push(json!({
                "op": derived_name,
                "derived": support_set_json(ring, &bundle.derived),
                "edge": support_set_json(ring, &bundle.edge),
                "small_union_primes": bundle.small_union,
                "big_union_primes": bundle.big_union,
            }));
            Ok(())
        }
        "ann" => {
            let ideal = ann_complex(complex);
            table.push(format!(
                "Ann       basis {:?}  |Ann| = {}",
                ideal.subgroup.basis_rows(),
                ideal.subgroup.order()
            ));
            results.push(json!({
                "op": "ann",
                "basis": ideal.subgroup.basis_rows().iter()
                    .map(|r| r.iter().map(|&x| x as i64).collect::<Vec<i64>>())
                    .collect::<Vec<_>>(),
            }));
            Ok(())
        }
        "depth-width" => {
            let idx = req
                .prime
                .ok_or_else(|| CliError::Input("depth-width needs --prime <index>".into()))?;
            let spectrum = ring.spectrum();
            let p = spectrum
                .get(idx)
                .ok_or_else(|| CliError::Input(format!("prime index {idx} out of range")))?;
            let (d, w) = depth_width(complex, p, true)?;
            table.push(format!("depth at {}  {}", prime_label(ring, idx), d));
            table.push(format!("width at {}  {}", prime_label(ring, idx), w));
            results.push(json!({
                "op": "depth-width",
                "prime": idx,
                "depth": d.to_string(),
                "width": w.to_string(),
            }));
            Ok(())
        }
        other => Err(CliError::Input(format!("unknown computation {other:?}"))),
    }
}

fn parse_seed_range(s: &str) -> Result<(u64, u64), CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| CliError::Input(format!("seed range {s:?} is not of the form a..b")))?;
    let lo: u64 = a.trim().parse().map_err(|_| CliError::Input(format!("bad seed {a:?}")))?;
    let hi: u64 = b.trim().parse().map_err(|_| CliError::Input(format!("bad seed {b:?}")))?;
    if hi < lo {
        return Err(CliError::Input(format!("empty seed range {s:?}")));
    }
    Ok((lo, hi))
}

#[allow(clippy::too_many_arguments)]
fn verify_run(
    suite: Option<String>,
    seeds: Option<String>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    max_module_order: Option<i64>,
    validate: bool,
    config_path: Option<PathBuf>,
) -> Result<(), CliError> {
    // defaults, then the config file, then explicit flags
    let mut config = SuiteConfig {
        properties: vec!["all".into()],
        seed_start: 0,
        seed_end: 50,
        jobs: 1,
        validate,
        profile: GenProfile::default(),
    };
    if let Some(path) = config_path {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let file: cosupp_core::verify::SuiteConfigFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config schema violation: {e}")))?;
        config = file.apply(config).map_err(CliError::Input)?;
    }
    if let Some(s) = &suite {
        config.properties = s.split(',').map(|p| p.trim().to_string()).collect();
    }
    if let Some(r) = &seeds {
        let (a, b) = parse_seed_range(r)?;
        config.seed_start = a;
        config.seed_end = b;
    }
    if let Some(j) = jobs {
        config.jobs = j;
    }
    if let Some(c) = max_module_order {
        config.profile.max_module_order = c as i128;
    }
    let known = cosupp_core::verify::resolve_properties(&["all".to_string()]);
    for p in &config.properties {
        if p != "all" && !known.contains(&p.as_str()) {
            return Err(CliError::Input(format!("no registry property matches {p:?}")));
        }
    }
    let summary = run_suite(&config);
    let mut per_prop: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for r in &summary.records {
        let e = per_prop.entry(r.property.clone()).or_insert((0, 0, 0));
        match r.verdict {
            Verdict::Pass => e.0 += 1,
            Verdict::Fail => e.1 += 1,
            Verdict::Flagged => e.2 += 1,
        }
    }
    println!("{:<22} {:>6} {:>6} {:>8} {:>8}", "property", "pass", "fail", "flagged", "vacuous");
    for (prop, (p, f, fl)) in &per_prop {
        let vac = summary.vacuous_by_property.get(prop).map_or(0, |v| v.0);
        println!("{prop:<22} {p:>6} {f:>6} {fl:>8} {vac:>8}");
    }
    let flagged: Vec<_> = summary
        .records
        .iter()
        .filter(|r| r.verdict == Verdict::Flagged)
        .collect();
    if !flagged.is_empty() {
        println!("\nflagged (printed-statement probes, not failures):");
        for r in flagged.iter().take(10) {
            println!("  {} seed {}: {}", r.property, r.seed, r.detail);
        }
        if flagged.len() > 10 {
            println!("  ... and {} more", flagged.len() - 10);
        }
    }
    for r in summary.records.iter().filter(|r| r.verdict == Verdict::Fail).take(10) {
        println!("FAIL {} seed {} ring {}: {}", r.property, r.seed, r.ring, r.detail);
        if let Some(s) = &r.shrunk {
            println!("  shrunk: {s}");
        }
    }
    for v in &summary.vacuity_violations {
        println!("VACUITY {v}");
    }
    println!(
        "\ntotal: pass {} fail {} flagged {} in {} ms",
        summary.pass, summary.fail, summary.flagged, summary.elapsed_ms
    );
    if let Some(path) = out {
        write_jsonl(&summary.records, &path)
            .map_err(|e| CliError::Input(format!("cannot append to {}: {e}", path.display())))?;
        println!("corpus appended to {}", path.display());
    }
    if summary.is_green() {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "{} failing verdicts, {} vacuity violations",
            summary.fail,
            summary.vacuity_violations.len()
        )))
    }
}

fn dvr_demo_cmd(probe: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let probe = Probe::parse(probe)
        .ok_or_else(|| CliError::Input(format!("unknown probe {probe:?} (strictness, cor34, maxmin)")))?;
    let report = dvr::dvr_demo(probe);
    println!("probe {}", report.probe);
    for claim in &report.claims {
        let status = match claim.status {
            ProbeStatus::Holds => "holds ",
            ProbeStatus::Flagged => "flagged",
        };
        println!("  [{status}] {}", claim.label);
        println!("            {}", claim.detail);
    }
    if let Some(path) = out {
        use std::io::Write;
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| CliError::Input(format!("cannot append to {}: {e}", path.display())))?;
        for claim in &report.claims {
            let verdict = match claim.status {
                ProbeStatus::Holds => "pass",
                ProbeStatus::Flagged => "flagged",
            };
            let line = json!({
                "property": format!("dvr-demo-{}", report.probe),
                "seed": 0,
                "ring": "dvr",
                "verdict": verdict,
                "details": {"note": claim.label, "values": claim.detail},
            });
            writeln!(file, "{line}")
                .map_err(|e| CliError::Input(format!("write failed: {e}")))?;
        }
        println!("report appended to {}", path.display());
    }
    Ok(())
}

fn dvr_eval(expr: &str, set: &str) -> Result<(), CliError> {
    let obj = BasicObject::parse(expr).map_err(|e| CliError::Input(e.to_string()))?;
    let kind = DvrKind::parse(set)
        .ok_or_else(|| CliError::Input(format!("unknown set kind {set:?}")))?;
    let result = dvr::dvr_support(&obj, kind);
    let items: Vec<String> = result.iter().map(|p| p.to_string()).collect();
    println!("{}({}) = {{{}}}", kind.label(), obj, items.join(", "));
    Ok(())
}
