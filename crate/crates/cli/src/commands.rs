use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use trustlp::equilibrium::{
    default_delta, eps_ses_sequence, kernel_to_strategies, sgv_info_bounds_with, solve_game_with,
    EquilibriumReport, InfoBounds,
};
use trustlp::graph::{
    closed_form_informativeness, closed_form_sgv, compare_settings, detect_shape,
    max_weight_matching, ObfuscationGraph, ShapeTag, StrongSenderGraph,
};
use trustlp::lp::{solve_trust_program, InformativenessForm};
use trustlp::oracle::{check_best_responses_trusted, cross_check, GridSpec, DEFAULT_GRID_BUDGET};
use trustlp::{sample, Error, Rational, Result, UtilityMatrixQ};

use crate::report::{labels, rational, table, vector, Report};

/// A report plus an optional failed check; the report is printed either way.
pub type Outcome = Result<(Value, Option<Error>)>;

fn form(joint: bool) -> InformativenessForm {
    if joint {
        InformativenessForm::Joint
    } else {
        InformativenessForm::TwoStage
    }
}

fn form_name(form: InformativenessForm) -> &'static str {
    match form {
        InformativenessForm::TwoStage => "two-stage",
        InformativenessForm::Joint => "joint",
    }
}

pub fn sgv(u: &UtilityMatrixQ, mut report: Report) -> Outcome {
    let cert = solve_trust_program(u)?;
    report.number("sgv", &cert.objective);
    report.set("kernel", table(cert.kernel.table()));
    report.set(
        "dual",
        json!({ "w": vector(&cert.dual.w), "v": table(&cert.dual.v) }),
    );
    report.set(
        "certification",
        json!({
            "primal_objective": rational(&cert.report.primal_objective),
            "dual_objective": rational(&cert.report.dual_objective),
            "strong_duality": cert.strong_duality_verified,
            "complementary_slackness": cert.complementary_slackness_verified,
            "slackness_pairs_checked": cert.report.slackness_pairs_checked,
        }),
    );
    Ok((report.into_value(), None))
}

pub fn info(u: &UtilityMatrixQ, joint: bool, mut report: Report) -> Outcome {
    let rep = solve_game_with(u, form(joint))?;
    report.number("sgv", &rep.sgv);
    report.number("informativeness", &rep.informativeness);
    report.set("form", json!(form_name(rep.form)));
    report.set("full_disclosure", json!(rep.full_disclosure));
    report.set("sgv_attained_exactly", json!(rep.sgv_attained_exactly));
    match sgv_info_bounds_with(u, &rep.sgv) {
        InfoBounds::Bounds { lower, upper } => {
            report.set(
                "bounds",
                json!({ "lower": rational(&lower), "upper": rational(&upper) }),
            );
        }
        InfoBounds::Inapplicable => {
            report.set(
                "bounds",
                json!("not applicable: some off-diagonal utility is zero"),
            );
        }
    }
    witness(&mut report, &rep);
    Ok((report.into_value(), None))
}

fn witness(report: &mut Report, rep: &EquilibriumReport<Rational>) {
    report.set("kernel", table(rep.kernel.table()));
    report.set("sender", table(rep.sender.table()));
    report.set("receiver", table(rep.receiver.table()));
}

pub fn eps_ses(
    u: &UtilityMatrixQ,
    ks: &[u64],
    delta: Option<Rational>,
    mut report: Report,
) -> Outcome {
    let rep = solve_game_with(u, InformativenessForm::TwoStage)?;
    report.number("sgv", &rep.sgv);
    let (limit, _) = kernel_to_strategies(&rep.kernel)?;
    let steps = if u.q() == 1 {
        Vec::new()
    } else {
        eps_ses_sequence(u, &rep.kernel, ks, delta.clone())?
    };
    report.set("sgv_attained_exactly", json!(rep.sgv_attained_exactly));
    if !rep.sgv_attained_exactly {
        let d = delta.unwrap_or_else(|| default_delta(&rep.kernel));
        report.number("delta", &d);
    }
    let rows: Vec<Value> = steps
        .iter()
        .map(|s| {
            json!({
                "k": s.k,
                "epsilon": rational(&s.epsilon),
                "wceu": rational(&s.wceu),
                "unique_best_response": s.unique_br,
            })
        })
        .collect();
    report.set("steps", Value::Array(rows));
    report.set("kernel", table(rep.kernel.table()));
    report.set("limit_strategy", table(limit.table()));
    Ok((report.into_value(), None))
}

fn closed_or_reason(value: Result<Rational>) -> (Value, Option<Rational>) {
    match value {
        Ok(v) => (rational(&v), Some(v)),
        Err(Error::NotApplicable(reason)) => (json!(format!("not applicable: {reason}")), None),
        Err(e) => (json!(e.to_string()), None),
    }
}

pub fn graph(u: &UtilityMatrixQ, mut report: Report) -> Outcome {
    let g = ObfuscationGraph::from_utility(u);
    let strong = StrongSenderGraph::from_utility(u);
    report.set(
        "obfuscation_edges",
        Value::Array(
            g.edges()
                .iter()
                .map(|e| json!({ "tail": e.tail + 1, "head": e.head + 1, "weight": rational(&e.weight) }))
                .collect(),
        ),
    );
    report.set(
        "strong_sender_edges",
        Value::Array(
            strong
                .edges()
                .iter()
                .map(|&(a, b)| labels(&[a, b]))
                .collect(),
        ),
    );
    let shape = detect_shape(&g);
    let mut shape_json = json!({ "name": shape.name() });
    match &shape.tag {
        ShapeTag::Star { center } => shape_json["center"] = json!(center + 1),
        ShapeTag::Chain { order } | ShapeTag::Cycle { order } => {
            shape_json["order"] = labels(order)
        }
        ShapeTag::Other => {}
    }
    shape_json["uniform_weight"] = shape.uniform_weight.as_ref().map_or(Value::Null, rational);
    report.set("shape", shape_json);

    let matching = max_weight_matching(&g)?;
    report.set(
        "matching",
        json!({
            "weight": rational(&matching.weight),
            "edges": matching
                .edges
                .iter()
                .map(|e| json!({ "tail": e.tail + 1, "head": e.head + 1, "weight": rational(&e.weight) }))
                .collect::<Vec<_>>(),
        }),
    );

    let rep = solve_game_with(u, InformativenessForm::TwoStage)?;
    report.set(
        "lp",
        json!({ "sgv": rational(&rep.sgv), "informativeness": rational(&rep.informativeness) }),
    );
    let (cf_sgv_json, cf_sgv) = closed_or_reason(closed_form_sgv(&shape, &g));
    let (cf_info_json, cf_info) = closed_or_reason(closed_form_informativeness(&shape, &g));
    report.set(
        "closed_form",
        json!({ "sgv": cf_sgv_json, "informativeness": cf_info_json }),
    );

    let mut failures = Vec::new();
    let sgv_ok = cf_sgv.map(|v| v == rep.sgv);
    let info_ok = cf_info.map(|v| v == rep.informativeness);
    let matching_ok = matching.weight <= rep.sgv;
    if sgv_ok == Some(false) {
        failures.push("closed-form value differs from the LP");
    }
    if info_ok == Some(false) {
        failures.push("closed-form informativeness differs from the LP");
    }
    if !matching_ok {
        failures.push("matching weight exceeds the LP value");
    }
    report.set(
        "agreement",
        json!({ "sgv": sgv_ok, "informativeness": info_ok, "matching_at_most_sgv": matching_ok }),
    );
    let failure = (!failures.is_empty()).then(|| Error::VerificationFailure(failures.join("; ")));
    Ok((report.into_value(), failure))
}

pub fn compare(u: &UtilityMatrixQ, mut report: Report) -> Outcome {
    let c = compare_settings(u)?;
    report.number("behavioral_informativeness", &c.behavioral);
    report.set("deterministic_informativeness", json!(c.deterministic));
    report.set(
        "clique_cover",
        Value::Array(
            c.cover
                .cliques
                .iter()
                .map(|clique| labels(clique))
                .collect(),
        ),
    );
    let ordering = match c.ordering {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    };
    report.set("ordering", json!(ordering));
    Ok((report.into_value(), None))
}

/// Largest nested grids from 2, 4, 8, 16 within the default budget.
pub fn default_grids(q: usize) -> Vec<u32> {
    [2, 4, 8, 16]
        .into_iter()
        .filter(|&n| GridSpec::new(n).count(q) <= DEFAULT_GRID_BUDGET)
        .collect()
}

pub fn verify(
    u: &UtilityMatrixQ,
    grids: &[u32],
    seed: u64,
    samples: usize,
    mut report: Report,
) -> Outcome {
    let specs: Vec<GridSpec> = grids.iter().map(|&n| GridSpec::new(n)).collect();
    let oracle = cross_check(u, &specs)?;
    report.number("lp_sgv", &oracle.lp_sgv);
    let rows: Vec<Value> = oracle
        .grids
        .iter()
        .zip(&oracle.gaps)
        .map(|(g, (_, gap))| {
            json!({
                "resolution": g.resolution,
                "strategies": g.evaluated.to_string(),
                "best_wceu": rational(&g.best_wceu),
                "gap": rational(gap),
            })
        })
        .collect();
    report.set("grids", Value::Array(rows));
    report.set(
        "vertex_enumeration",
        match &oracle.vertex {
            Some(v) => json!({ "value": rational(&v.value), "vertices": v.vertex_count, "kernel": table(v.witness.table()) }),
            None => json!("skipped: alphabet too large"),
        },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut responses = 0usize;
    for _ in 0..samples {
        let pi = sample::random_sender::<Rational, _>(&mut rng, u.q());
        responses += check_best_responses_trusted(&pi)?;
    }
    report.set(
        "best_response_trust",
        json!({ "seed": seed, "senders": samples, "responses_checked": responses }),
    );
    Ok((report.into_value(), None))
}
