//! One-shot reproduction of every quantitative claim about the GHZ
//! experiments: correlations, world tables, constraint checks, the
//! hidden-variable census and no-signaling.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use ghz_worlds::ghz::{
    canonical_scenario, epr_prediction, ghz3_settings_experiment, ghz_constraints, parties,
    slot_tuple, tables, verify_worldset, Prediction, ALICE_BOB_ONLY, ALL_Z, CHARLEY_DEVIATION,
    GHZ_PROTOCOL,
};
use ghz_worlds::lhv::{
    covering_assignment, impossibility_census, local_extensions, parity_certificate,
};
use ghz_worlds::quantum::ghz_state;
use ghz_worlds::scenario::RecordKey;
use ghz_worlds::{
    joint_vs_product_count, local_worlds, nonselective_reduced_state, Basis, DensityMatrix,
    Observer, Outcome, Slot, StateVector, WorldSet, TOLERANCE,
};
use serde::Serialize;

use crate::report::Status;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub claim: &'static str,
    pub detail: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimsReport {
    pub claims: Vec<Claim>,
    pub status: Status,
}

impl ClaimsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let id_width = self.claims.iter().map(|c| c.id.len()).max().unwrap_or(0);
        let width = self.claims.iter().map(|c| c.claim.len()).max().unwrap_or(0);
        for c in &self.claims {
            writeln!(
                out,
                "{:<id_width$}  {:<width$}  {}",
                c.id,
                c.claim,
                c.status.as_str()
            )
            .unwrap();
            writeln!(out, "{:<id_width$}  {}", "", c.detail).unwrap();
        }
        writeln!(out, "status: {}", self.status.as_str()).unwrap();
        out
    }
}

fn run(name: &str) -> WorldSet {
    canonical_scenario(name)
        .expect("built-in")
        .run()
        .expect("built-in scenarios run")
}

fn all_weights(ws: &WorldSet, w: f64) -> bool {
    ws.iter().all(|b| (b.weight() - w).abs() <= TOLERANCE)
}

fn obs(names: &[&str]) -> Vec<Observer> {
    names.iter().map(|&n| Observer::new(n)).collect()
}

/// Evaluates every claim; the report passes iff all of them do.
pub fn verify_all() -> ClaimsReport {
    let mut claims = Vec::new();
    let mut push = |id, claim, ok: bool, detail: String| {
        claims.push(Claim {
            id,
            claim,
            detail,
            status: Status::from_bool(ok),
        });
    };

    // GHZ state in the all-x product basis.
    let g = ghz_state(3).expect("three parties");
    let mut terms = Vec::new();
    for bits in 0..8usize {
        let outcomes: Vec<Outcome> = (0..3)
            .map(|k| {
                if bits >> k & 1 == 0 {
                    Outcome::Plus
                } else {
                    Outcome::Minus
                }
            })
            .collect();
        let bra =
            StateVector::product(&outcomes.iter().map(|&o| (Basis::X, o)).collect::<Vec<_>>())
                .expect("three qubits");
        let overlap: num_complex::Complex64 = bra
            .amplitudes()
            .iter()
            .zip(g.amplitudes())
            .map(|(b, a)| b.conj() * a)
            .sum();
        if overlap.norm() > TOLERANCE {
            terms.push((outcomes, overlap));
        }
    }
    let ok = terms.len() == 4
        && terms.iter().all(|(o, c)| {
            o.iter().map(|v| v.value()).product::<i8>() == -1 && (c.norm() - 0.5).abs() <= TOLERANCE
        });
    push(
        "ghz-x-expansion",
        "GHZ state in the x basis: four terms of weight 1/2, product -1",
        ok,
        format!("{} nonzero x-basis terms", terms.len()),
    );

    // Fixed-setting correlations on a single triple.
    use Basis::{X, Y};
    let mut detail = Vec::new();
    let mut ok = true;
    for (settings, required) in [
        ([X, X, X], -1i8),
        ([X, Y, Y], 1),
        ([Y, X, Y], 1),
        ([Y, Y, X], 1),
    ] {
        let exp = ghz3_settings_experiment(settings);
        let ws = exp.run().expect("runs");
        let products: BTreeSet<i8> = ws
            .iter()
            .map(|b| b.records().iter().map(|r| r.outcome.value()).product())
            .collect();
        ok &= products == BTreeSet::from([required]) && ws.len() == 4 && all_weights(&ws, 0.25);
        detail.push(format!(
            "{}: {} worlds, products {:?}",
            exp.name,
            ws.len(),
            products
        ));
    }
    push(
        "ghz-correlations",
        "xxx gives -1; xyy, yxy, yyx give +1 with certainty",
        ok,
        detail.join("; "),
    );

    // The two-set protocol.
    let protocol = run(GHZ_PROTOCOL);
    let triples: BTreeSet<_> = protocol
        .iter()
        .filter_map(|b| slot_tuple(b, &parties(), Slot::Primary))
        .collect();
    push(
        "protocol-worlds",
        "two-set protocol yields exactly the 16 tabulated worlds",
        protocol.len() == 16 && triples == tables::as_set(&tables::PROTOCOL_WORLDS),
        format!(
            "{} worlds, {} distinct primary triples",
            protocol.len(),
            triples.len()
        ),
    );
    push(
        "protocol-weights",
        "each protocol world carries weight 1/16",
        all_weights(&protocol, 1.0 / 16.0),
        format!("total weight {}", protocol.total_weight()),
    );

    let report = verify_worldset(&protocol, &ghz_constraints());
    let counts: Vec<usize> = report
        .equations
        .iter()
        .map(|s| s.applicable_worlds)
        .collect();
    push(
        "constraints",
        "constraint equations satisfied in all applicable worlds",
        report.passed && counts.iter().all(|&n| n == 4),
        format!("applicable worlds per equation {counts:?}"),
    );

    let (product, joint) = joint_vs_product_count(&protocol, &parties());
    push(
        "joint-vs-product",
        "joint 16 < product 64",
        (product, joint) == (64, 16),
        format!("product {product}, joint {joint}"),
    );
    let local: Vec<usize> = parties()
        .iter()
        .map(|o| local_worlds(&protocol, o).len())
        .collect();
    push(
        "local-worlds",
        "each observer has 4 local worlds",
        local == [4, 4, 4],
        format!("local world counts {local:?}"),
    );

    // Deviations.
    let deviation = run(CHARLEY_DEVIATION);
    let (dp, dj) = joint_vs_product_count(&deviation, &parties());
    let charley = local_worlds(&deviation, &Observer::new("C"));
    push(
        "charley-deviation",
        "Charley's swapped rule yields 32 worlds, 8 per local outcome",
        deviation.len() == 32
            && (dp, dj) == (64, 32)
            && charley.iter().all(|(_, w)| w.members == 8),
        format!("{} worlds, product {dp}, joint {dj}", deviation.len()),
    );

    let all_z = run(ALL_Z);
    let z_rows: BTreeSet<Vec<(Basis, Outcome)>> = all_z
        .iter()
        .map(|b| {
            parties()
                .iter()
                .flat_map(|o| b.local_records(o).into_iter().map(|r| (r.basis, r.outcome)))
                .collect()
        })
        .collect();
    push(
        "all-z-worlds",
        "all-z measurements yield exactly the 4 tabulated worlds",
        all_z.len() == 4
            && z_rows == tables::as_set(&tables::ALL_Z_WORLDS)
            && all_weights(&all_z, 0.25),
        format!("{} worlds", all_z.len()),
    );

    // Before Charley measures.
    let ab_exp = canonical_scenario(ALICE_BOB_ONLY).expect("built-in");
    let ab = ab_exp.run().expect("runs");
    let pairs: BTreeSet<_> = ab
        .iter()
        .filter_map(|b| slot_tuple(b, &obs(&["A", "B"]), Slot::Primary))
        .collect();
    let charley_local = local_worlds(&ab, &Observer::new("C")).len();
    push(
        "pre-charley-worlds",
        "16 worlds before Charley measures, all in one local world of his",
        ab.len() == 16 && pairs == tables::as_set(&tables::ALICE_BOB_WORLDS) && charley_local == 1,
        format!("{} worlds, Charley local worlds {charley_local}", ab.len()),
    );

    let c_qubit = ab_exp
        .scenario
        .qubit(&RecordKey::new("C", Slot::Primary))
        .expect("mapped");
    let predictions = epr_prediction(&ab, &Observer::new("C"), c_qubit).expect("C unmeasured");
    let definite = predictions
        .iter()
        .filter(|p| matches!(p, Prediction::Definite { .. }))
        .count();
    let x_values: BTreeSet<Outcome> = predictions
        .iter()
        .filter_map(|p| match p {
            Prediction::Definite {
                basis: Basis::X,
                outcome,
            } => Some(*outcome),
            _ => None,
        })
        .collect();
    push(
        "epr-relativity",
        "Charley's predicted x outcome differs between worlds",
        definite == ab.len() && x_values.len() == 2,
        format!(
            "{definite}/{} worlds definite, x predictions {:?}",
            ab.len(),
            x_values
        ),
    );

    // Hidden variables.
    let census = impossibility_census();
    push(
        "lhv-census",
        "no local assignment satisfies all four equations",
        census.full_satisfiers == 0 && census.max_simultaneous == 3,
        format!(
            "full_satisfiers {}, max_simultaneous {}, histogram {:?}",
            census.full_satisfiers, census.max_simultaneous, census.histogram
        ),
    );
    let cert = parity_certificate();
    push(
        "parity-certificate",
        "every variable appears squared; right-hand sides multiply to -1",
        cert.all_even && cert.required_product == Outcome::Minus,
        format!(
            "exponents {:?}",
            cert.exponents
                .iter()
                .map(|e| e.exponent)
                .collect::<Vec<_>>()
        ),
    );
    let eqs = ghz_constraints();
    let each_local = protocol
        .iter()
        .all(|b| !local_extensions(b, &eqs).is_empty());
    let cover = covering_assignment(&protocol, &eqs);
    push(
        "single-world-contradiction",
        "each world is locally explainable, no single assignment covers all",
        each_local && cover.is_none(),
        format!(
            "every world extendible: {each_local}, covering assignment: {}",
            cover.is_some()
        ),
    );

    // No-signaling.
    let exp = canonical_scenario(GHZ_PROTOCOL).expect("built-in");
    let initial = exp.initial_state();
    let mut deltas = Vec::new();
    for (acting, watching) in [
        (obs(&["A"]), obs(&["B", "C"])),
        (obs(&["A", "B"]), obs(&["C"])),
    ] {
        let keep = exp.scenario.qubits_of(&watching);
        let program = exp.scenario.restricted_to(&acting);
        let before = initial.partial_trace(&keep).expect("valid keep");
        let after = nonselective_reduced_state(&initial, &program, &keep).expect("runs");
        deltas.push(after.max_abs_diff(&before).expect("same dimension"));
    }
    push(
        "no-signaling",
        "no-signaling delta <= 1e-12",
        deltas.iter().all(|&d| d <= TOLERANCE),
        format!("deltas {deltas:?} (Alice only; Alice and Bob)"),
    );

    let mixed = DensityMatrix::maximally_mixed(1);
    let single: Vec<f64> = (0..3)
        .map(|q| {
            g.partial_trace(&[q])
                .expect("valid")
                .max_abs_diff(&mixed)
                .expect("2x2")
        })
        .collect();
    push(
        "unpolarized-spins",
        "every single spin of the GHZ state is unpolarized",
        single.iter().all(|&d| d <= TOLERANCE),
        format!("deviation from I/2 {single:?}"),
    );

    let status = Status::from_bool(claims.iter().all(|c| c.status.passed()));
    ClaimsReport { claims, status }
}
