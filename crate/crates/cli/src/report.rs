//! Run reports for a scenario file, in text and JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ghz_worlds::ghz::{ghz_constraints, verify_worldset};
use ghz_worlds::lhv::{impossibility_census, parity_certificate, Census, ParityCertificate};
use ghz_worlds::{
    joint_vs_product_count, local_worlds, nonselective_reduced_state, run_scenario, Branch,
    Observer, OutcomeRecord, Slot, WorldSet, TOLERANCE,
};
use serde::Serialize;

use crate::scenario_file::{Check, ScenarioFile};
use crate::SchemaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Status::Pass
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorldRow {
    pub label: String,
    pub records: Vec<OutcomeRecord>,
    pub weight: f64,
    /// Exact dyadic fraction such as `1/16`, when the weight is one.
    pub weight_exact: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JointVsProduct {
    pub product: usize,
    pub joint: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquationRow {
    pub equation: String,
    pub applicable_worlds: usize,
    pub weight: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationBlock {
    pub equations: Vec<EquationRow>,
    pub incomplete_worlds: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusBlock {
    pub census: Census,
    pub parity_certificate: ParityCertificate,
    pub status: Status,
}

impl CensusBlock {
    pub fn compute() -> CensusBlock {
        let census = impossibility_census();
        let parity_certificate = parity_certificate();
        let status = Status::from_bool(census.full_satisfiers == 0 && parity_certificate.all_even);
        CensusBlock {
            census,
            parity_certificate,
            status,
        }
    }

    pub fn render_text(&self, out: &mut String) {
        let c = &self.census;
        let p = &self.parity_certificate;
        writeln!(out, "assignments: {}", c.assignments).unwrap();
        writeln!(out, "full_satisfiers: {}", c.full_satisfiers).unwrap();
        writeln!(out, "max_simultaneous: {}", c.max_simultaneous).unwrap();
        writeln!(out, "histogram:").unwrap();
        for (k, n) in &c.histogram {
            writeln!(out, "  {k} equations satisfied: {n}").unwrap();
        }
        writeln!(out, "parity exponents:").unwrap();
        for e in &p.exponents {
            writeln!(out, "  {}{}: {}", e.axis, e.observer, e.exponent).unwrap();
        }
        writeln!(out, "all_even: {}", p.all_even).unwrap();
        writeln!(out, "required_product: {}", p.required_product).unwrap();
        writeln!(out, "contradiction: {}", p.contradiction).unwrap();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoSignalingRow {
    pub observers: Vec<Observer>,
    pub qubits: Vec<usize>,
    /// Largest entrywise change of the observers' reduced state.
    pub delta: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub n_qubits: usize,
    pub worlds: Vec<WorldRow>,
    pub local_world_counts: BTreeMap<Observer, usize>,
    pub joint_vs_product: JointVsProduct,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusBlock>,
    pub no_signaling: Vec<NoSignalingRow>,
    pub checks: Vec<CheckRow>,
    pub status: Status,
}

/// Rounds to the 1e-12 grid so reports do not carry rounding noise.
fn tidy(w: f64) -> f64 {
    let t = (w * 1e12).round() / 1e12;
    if t == 0.0 {
        0.0
    } else {
        t
    }
}

/// `n/2^k` in lowest terms when `w` is within 1e-12 of such a fraction (k ≤ 20).
pub fn exact_weight(w: f64) -> Option<String> {
    (0..=20).find_map(|k| {
        let d = (1u64 << k) as f64;
        let n = (w * d).round();
        ((w - n / d).abs() <= TOLERANCE).then(|| match k {
            0 => format!("{n}"),
            _ => format!("{n}/{}", 1u64 << k),
        })
    })
}

fn row_label(b: &Branch) -> String {
    let aux = b.label(Some(Slot::Aux));
    let primary = b.label(Some(Slot::Primary));
    match (aux.as_str(), primary.as_str()) {
        ("()", _) => primary,
        (_, "()") => format!("aux {aux}"),
        _ => format!("aux {aux} primary {primary}"),
    }
}

fn world_rows(ws: &WorldSet) -> Vec<WorldRow> {
    ws.iter()
        .map(|b| WorldRow {
            label: row_label(b),
            records: b.records().to_vec(),
            weight: tidy(b.weight()),
            weight_exact: exact_weight(b.weight()),
        })
        .collect()
}

/// Executes `file` and evaluates its declared checks.
pub fn run_file(file: &ScenarioFile) -> Result<RunReport, SchemaError> {
    let engine = |e: ghz_worlds::Error| SchemaError::new(vec![e.to_string()]);
    let initial = file.initial()?;
    let scenario = file.scenario()?;
    let ws = run_scenario(&initial, &scenario).map_err(engine)?;

    let parties = scenario.parties();
    let local_world_counts = parties
        .iter()
        .map(|o| (o.clone(), local_worlds(&ws, o).len()))
        .collect();
    let (product, joint) = joint_vs_product_count(&ws, parties);

    let mut checks = Vec::new();
    let mut verification = None;
    let mut census = None;
    let mut no_signaling = Vec::new();

    for check in &file.checks {
        match check {
            Check::WorldCount(expected) => checks.push(CheckRow {
                check: format!("world_count == {expected} (got {})", ws.len()),
                status: Status::from_bool(ws.len() == *expected),
            }),
            Check::Constraints => {
                let report = verify_worldset(&ws, &ghz_constraints());
                let block = VerificationBlock {
                    equations: report
                        .equations
                        .iter()
                        .map(|s| EquationRow {
                            equation: s.equation.label(),
                            applicable_worlds: s.applicable_worlds,
                            weight: tidy(s.weight),
                            violations: s.violations,
                        })
                        .collect(),
                    incomplete_worlds: report.incomplete_worlds.len(),
                    status: Status::from_bool(report.passed),
                };
                checks.push(CheckRow {
                    check: "constraint equations hold in every applicable world".into(),
                    status: block.status,
                });
                verification = Some(block);
            }
            Check::NoSignaling(observers) => {
                let qubits = scenario.qubits_of(observers);
                let others: Vec<Observer> = parties
                    .iter()
                    .filter(|p| !observers.contains(p))
                    .cloned()
                    .collect();
                let program = scenario.restricted_to(&others);
                let before = initial.partial_trace(&qubits).map_err(engine)?;
                let after =
                    nonselective_reduced_state(&initial, &program, &qubits).map_err(engine)?;
                let delta = after.max_abs_diff(&before).map_err(engine)?;
                let status = Status::from_bool(delta <= TOLERANCE);
                let names: Vec<&str> = observers.iter().map(Observer::name).collect();
                checks.push(CheckRow {
                    check: format!("no_signaling to {{{}}}: delta <= 1e-12", names.join(",")),
                    status,
                });
                no_signaling.push(NoSignalingRow {
                    observers: observers.clone(),
                    qubits,
                    delta,
                    status,
                });
            }
            Check::Census => {
                let block = CensusBlock::compute();
                checks.push(CheckRow {
                    check: "no local hidden-variable assignment satisfies all equations".into(),
                    status: block.status,
                });
                census = Some(block);
            }
        }
    }

    let status = Status::from_bool(checks.iter().all(|c| c.status.passed()));
    Ok(RunReport {
        scenario: file.name.clone(),
        n_qubits: initial.n_qubits(),
        worlds: world_rows(&ws),
        local_world_counts,
        joint_vs_product: JointVsProduct { product, joint },
        verification,
        census,
        no_signaling,
        checks,
        status,
    })
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "scenario: {}", self.scenario).unwrap();
        writeln!(out, "qubits: {}", self.n_qubits).unwrap();
        writeln!(out, "worlds: {}", self.worlds.len()).unwrap();
        for (i, w) in self.worlds.iter().enumerate() {
            let exact = w.weight_exact.as_deref().unwrap_or("-");
            writeln!(
                out,
                "  {:>3}  {}  weight {} ({})",
                i + 1,
                w.label,
                w.weight,
                exact
            )
            .unwrap();
        }
        writeln!(out, "local worlds:").unwrap();
        for (o, n) in &self.local_world_counts {
            writeln!(out, "  {o}: {n}").unwrap();
        }
        writeln!(
            out,
            "joint_vs_product: product {} joint {}",
            self.joint_vs_product.product, self.joint_vs_product.joint
        )
        .unwrap();
        if let Some(v) = &self.verification {
            writeln!(out, "constraint verification: {}", v.status.as_str()).unwrap();
            for e in &v.equations {
                writeln!(
                    out,
                    "  {}  applicable in {} worlds, weight {}, violations {}",
                    e.equation, e.applicable_worlds, e.weight, e.violations
                )
                .unwrap();
            }
            if v.incomplete_worlds > 0 {
                writeln!(out, "  incomplete worlds: {}", v.incomplete_worlds).unwrap();
            }
        }
        if let Some(c) = &self.census {
            writeln!(out, "census: {}", c.status.as_str()).unwrap();
            let mut block = String::new();
            c.render_text(&mut block);
            for line in block.lines() {
                writeln!(out, "  {line}").unwrap();
            }
        }
        for ns in &self.no_signaling {
            let names: Vec<&str> = ns.observers.iter().map(Observer::name).collect();
            writeln!(
                out,
                "no_signaling {{{}}} qubits {:?}: delta {:e} {}",
                names.join(","),
                ns.qubits,
                ns.delta,
                ns.status.as_str()
            )
            .unwrap();
        }
        writeln!(out, "checks:").unwrap();
        for c in &self.checks {
            writeln!(out, "  {}: {}", c.check, c.status.as_str()).unwrap();
        }
        writeln!(out, "status: {}", self.status.as_str()).unwrap();
        out
    }
}
