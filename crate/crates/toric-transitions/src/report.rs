//! Pipeline orchestration and deterministic report documents.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{
    minimal_relations, narrow_by_interior_cones, paper_basis_candidates, ring_presentation,
};
use crate::error::Error;
use crate::fan::{interior_cones, twisted_sectors, Model};
use crate::input::{InputDocument, Request};
use crate::kernel::rat::{rat_to_string, Rat};
use crate::presentation::{paper_indices, validate};
use crate::transition::{
    check_conditions, crepancy_check, degenerate_filter, delta_polytope_points,
    dtilde_coefficients, support_function, verify_blowup_fan, verify_total_space, wall_chart,
    Pipeline,
};

/// The full verdict sheet, serialized with stable key order.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub version: String,
    pub input: InputDocument,
    pub stages: BTreeMap<String, Value>,
    pub verdict: BTreeMap<String, Value>,
    pub convention_flags: Vec<String>,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization");
        out.push('\n');
        out
    }
}

fn rat_json(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

fn rats_json(rs: &[Rat]) -> Value {
    Value::Array(rs.iter().map(rat_json).collect())
}

fn ints_json(xs: &[num::BigInt]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(x.to_string())).collect())
}

fn cones_json(cones: &[Vec<usize>]) -> Value {
    Value::Array(
        cones
            .iter()
            .map(|c| Value::Array(c.iter().map(|&i| Value::from(i)).collect()))
            .collect(),
    )
}

/// Run the requested pipeline depth. Returns the report and the exit code:
/// `0` clean, `1` validation failure, `2` internal error.
pub fn run(doc: &InputDocument) -> (ReportDocument, i32) {
    let mut report = ReportDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        input: doc.clone(),
        stages: BTreeMap::new(),
        verdict: BTreeMap::new(),
        convention_flags: vec![
            "indices in reports are 0-based; human-readable text uses 1-based names".into(),
            "age labels sum fractional pairings over all characters, extended ones included; \
             they are a convention and feed no verdict"
                .into(),
        ],
    };
    let code = match run_stages(doc, &mut report) {
        Ok(()) => {
            report.verdict.insert("clean".into(), json!(true));
            0
        }
        Err(err) => {
            let code = classify_error(&err);
            report.verdict.insert("clean".into(), json!(false));
            report.verdict.insert("error".into(), json!(err.to_string()));
            report
                .verdict
                .insert("exit_code".into(), json!(code));
            code
        }
    };
    (report, code)
}

fn classify_error(err: &Error) -> i32 {
    match err {
        Error::Validation(_)
        | Error::NotUpwardClosed { .. }
        | Error::OmegaOnWall
        | Error::ChamberChanged { .. }
        | Error::CenterNotCone { .. }
        | Error::CenterMeetsExtendedSet { .. }
        | Error::Schema(_)
        | Error::Parse(_)
        | Error::UnknownPreset(_)
        | Error::UnboundedPolytope => 1,
        _ => 2,
    }
}

fn run_stages(doc: &InputDocument, report: &mut ReportDocument) -> crate::Result<()> {
    let presentation = doc.presentation();
    let validation = validate(&presentation)?;
    report.stages.insert(
        "anticones".into(),
        json!({
            "minimal": cones_json(&validation.minimal_anticones),
            "extended_set": validation.extended_set.clone(),
            "valid": validation.is_valid(),
            "failures": validation.failures.clone(),
        }),
    );
    report
        .verdict
        .insert("valid".into(), json!(validation.is_valid()));
    if !validation.is_valid() {
        return Err(Error::Validation(validation.failures.join("; ")));
    }
    if matches!(doc.request, Request::Validate) {
        return Ok(());
    }

    let model = Model::analyze(presentation)?;
    report.stages.insert(
        "fan".into(),
        json!({
            "free_rank": model.fan.n_free_rank,
            "torsion": ints_json(&model.fan.n_torsion),
            "rays": model.fan.rays.iter().map(|r| rats_json(r)).collect::<Vec<_>>(),
            "maximal_cones": cones_json(&model.fan.maximal_cones),
            "interior_cones": cones_json(&interior_cones(&model.fan)?),
        }),
    );
    if matches!(doc.request, Request::Fan) {
        return Ok(());
    }

    if matches!(doc.request, Request::Cohomology) {
        let options = doc.options();
        let candidates = paper_basis_candidates(&model.presentation, None, None);
        let ring = ring_presentation(&model, &candidates)?;
        let relations: Vec<String> = minimal_relations(&ring)
            .iter()
            .map(|p| ring.poly_string(p))
            .collect();
        let mut stage = serde_json::Map::new();
        stage.insert("variables".into(), json!(ring.var_labels.clone()));
        stage.insert("basis".into(), json!(ring.basis_labels.clone()));
        stage.insert("dims".into(), json!(ring.dims()));
        stage.insert("relations".into(), json!(relations));
        if options.narrow {
            let narrow = narrow_by_interior_cones(&model, &ring)?;
            stage.insert("narrow_dims".into(), json!(narrow.dims()));
            stage.insert("narrow_generators".into(), json!(narrow.provenance.clone()));
        }
        if options.sectors {
            let data = crate::cohomology::chen_ruan(&model, &ring)?;
            let sectors: Vec<Value> = data
                .iter()
                .map(|(sector, _, sring)| {
                    json!({
                        "key": rats_json(&sector.key),
                        "nu": rats_json(&sector.nu),
                        "fixed_indices": sector.i_nu.clone(),
                        "age_label": rat_json(&sector.age_label),
                        "dims": sring.dims(),
                        "relations": minimal_relations(sring)
                            .iter()
                            .map(|p| sring.poly_string(p))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            stage.insert("sectors".into(), json!(sectors));
        }
        report.stages.insert("cohomology".into(), Value::Object(stage));
        return Ok(());
    }

    // Full transition pipeline.
    let spec = doc.transition_spec()?;
    let pipeline = Pipeline::build(spec.clone())?;
    if spec.is_weighted() {
        report.convention_flags.push(
            "weighted blow-up requested: supported but experimental, no worked reference values"
                .into(),
        );
    }

    let base_support = support_function(&pipeline.base.fan, &spec.divisor)?;
    let dt = dtilde_coefficients(&spec);
    let dt_support = support_function(&pipeline.x_tilde.fan, &dt)?;
    let crepancy = crepancy_check(&spec, &pipeline.hat, &pipeline.base.fan, &base_support)?;
    let fan_checks = verify_blowup_fan(&pipeline);

    let polytope = match delta_polytope_points(&pipeline.base.fan, &spec.divisor, &base_support) {
        Ok(points) => {
            let filter = degenerate_filter(
                &points,
                &pipeline.base.fan,
                &spec.divisor,
                &spec.center,
                &spec.resolved_weights(),
            );
            json!({
                "point_count": points.len(),
                "survivors": filter.survivors.len(),
                "dropped": filter.dropped.len(),
                "routes_agree": filter.routes_agree,
            })
        }
        Err(Error::UnboundedPolytope) => json!({
            "point_count": Value::Null,
            "note": "divisor polytope unbounded; the base is not proper",
        }),
        Err(other) => return Err(other),
    };

    report.stages.insert(
        "blowup".into(),
        json!({
            "epsilon": rat_json(&pipeline.hat.selected_epsilon),
            "hat_characters": pipeline.hat.characters.iter().map(|c| ints_json(c)).collect::<Vec<_>>(),
            "omega_plus": rats_json(&pipeline.hat.omega_plus),
            "omega_minus": rats_json(&pipeline.hat.omega_minus),
            "center": spec.center.clone(),
            "weights": ints_json(&spec.resolved_weights()),
            "minus_fan_equals_base": fan_checks.minus_equals_base.matches,
            "plus_fan_families_match": fan_checks.plus_families.matches,
            "type1_count": fan_checks.type1_count,
            "type2_count": fan_checks.type2_count,
            "divisor": {
                "nef": base_support.nef(),
                "cartier": base_support.cartier,
            },
            "transform": {
                "coefficients": ints_json(&dt),
                "nef": dt_support.nef(),
                "cartier": dt_support.cartier,
            },
            "crepancy": {
                "holds": crepancy.holds,
                "pullback_class": ints_json(&crepancy.pullback_d),
                "transform_class": ints_json(&crepancy.dtilde),
                "discrepancy_multiple": crepancy.discrepancy_multiple.to_string(),
                "support_function_route_agrees": crepancy.phi_route_agrees,
            },
            "polytope": polytope,
        }),
    );

    let totals = verify_total_space(&pipeline)?;
    let bar_sectors = twisted_sectors(&pipeline.t_bar.presentation, &pipeline.t_bar.family)?;
    report.stages.insert(
        "total_spaces".into(),
        json!({
            "fiber_character": ints_json(&crate::transition::fiber_character(&spec)),
            "t_tilde_cones_match": totals.t_tilde_cones.matches,
            "t_bar_cones_match": totals.t_bar_cones.matches,
            "unique_interior_ray_is_fiber": totals.unique_interior_ray_is_f,
            "sector_bijection": totals.sector_bijection,
            "extended_sets_match": totals.extended_sets_match,
            "extended_ample_splitting": totals.ample_splitting,
            "ample_splitting": totals.prime_ample_splitting,
            "mori_splitting": totals.mori_splitting,
            "t_bar_sector_keys": bar_sectors
                .iter()
                .map(|s| rats_json(&s.key))
                .collect::<Vec<_>>(),
        }),
    );
    report
        .verdict
        .insert("structure_checks".into(), json!(totals.all_pass()));

    let ts_chart = wall_chart(&pipeline.t_bar, &pipeline.t_tilde)?;
    let bl_chart = wall_chart(&pipeline.x_minus, &pipeline.x_tilde)?;
    let chart_json = |c: &crate::transition::WallChart| {
        json!({
            "normal": ints_json(&c.e),
            "pairings": ints_json(&c.pairings),
            "pairing_sum": c.pairing_sum.to_string(),
            "crepant": c.crepant,
            "warning": c.warning.clone(),
            "conifold_constant": rat_to_string(&c.c_frak),
            "wall_basis": c.wall_basis.iter().map(|b| ints_json(b)).collect::<Vec<_>>(),
            "p_plus": ints_json(&c.p_plus),
            "p_minus": ints_json(&c.p_minus),
            "exponents": ints_json(&c.exponents),
        })
    };
    report.stages.insert(
        "wall_chart".into(),
        json!({
            "total_space_wall": chart_json(&ts_chart),
            "blowup_wall": chart_json(&bl_chart),
        }),
    );

    let conditions = check_conditions(&pipeline)?;
    let sector_json: Vec<Value> = conditions
        .sectors
        .iter()
        .map(|s| {
            json!({
                "key": rats_json(&s.key),
                "dims": s.dims,
                "relations": s.relations,
                "injective": s.injective,
                "surjective": s.surjective,
                "kernel_matches": s.kernel_matches,
                "fiber_ideal_dims": s.fiber_ideal_dims,
                "narrow_dims": s.narrow_dims,
            })
        })
        .collect();
    report.stages.insert(
        "conditions".into(),
        json!({
            "condition1": {
                "holds": conditions.condition1.holds,
                "witnesses": conditions.condition1.witnesses,
            },
            "condition2": {
                "holds": conditions.condition2.holds,
                "witnesses": conditions.condition2.witnesses,
            },
            "sectors": sector_json,
            "paper_inconsistency": conditions.paper_inconsistency,
            "t_bar_dims": conditions.t_bar_dims,
            "t_bar_relations": conditions.t_bar_relations,
            "t_bar_narrow_dims": conditions.t_bar_narrow_dims,
            "t_bar_narrow_generators": conditions.t_bar_narrow_generators,
        }),
    );
    report.convention_flags.push(format!(
        "H^2 basis of the compactified total space: {}",
        conditions.t_bar_ring.basis_labels.join(", ")
    ));

    report.verdict.insert("crepant".into(), json!(crepancy.holds));
    report.verdict.insert("divisor_nef".into(), json!(base_support.nef()));
    report
        .verdict
        .insert("transform_nef".into(), json!(dt_support.nef()));
    report
        .verdict
        .insert("condition1".into(), json!(conditions.condition1.holds));
    report
        .verdict
        .insert("condition2".into(), json!(conditions.condition2.holds));
    report.verdict.insert(
        "strong_form".into(),
        json!(conditions.condition1.holds && conditions.condition2.holds),
    );
    Ok(())
}

/// Human-readable rendering of a report.
pub fn plain_text(report: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("toric-transitions report (v{})\n", report.version));
    for (name, verdict) in &report.verdict {
        out.push_str(&format!("  verdict.{name} = {verdict}\n"));
    }
    for (stage, value) in &report.stages {
        out.push_str(&format!("stage {stage}:\n"));
        render_value(&mut out, value, 1);
    }
    if !report.convention_flags.is_empty() {
        out.push_str("conventions:\n");
        for flag in &report.convention_flags {
            out.push_str(&format!("  - {flag}\n"));
        }
    }
    out
}

fn render_value(out: &mut String, value: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(out, v, indent + 1);
                    }
                    Value::Array(items) if items.iter().any(Value::is_object) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for item in items {
                            render_value(out, item, indent + 1);
                            out.push_str(&format!("{pad}  --\n"));
                        }
                    }
                    other => out.push_str(&format!("{pad}{k} = {other}\n")),
                }
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}

/// 1-based pretty-printer for index sets used in messages.
pub fn cone_names(cones: &[Vec<usize>]) -> Vec<Vec<usize>> {
    cones.iter().map(|c| paper_indices(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::preset;
    use std::collections::BTreeMap;

    #[test]
    fn quintic_report_runs_clean() {
        let doc = preset("quintic-conifold", &BTreeMap::new()).unwrap();
        let (report, code) = run(&doc);
        assert_eq!(code, 0, "{:?}", report.verdict);
        assert_eq!(report.verdict["condition1"], json!(true));
        assert_eq!(report.verdict["condition2"], json!(false));
        assert_eq!(report.verdict["crepant"], json!(true));
    }

    #[test]
    fn reports_are_byte_stable() {
        let doc = preset("quintic-conifold", &BTreeMap::new()).unwrap();
        let (a, _) = run(&doc);
        let (b, _) = run(&doc);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn wall_sitting_stability_exits_one() {
        let text = r#"{
            "torus_rank": 2,
            "characters": [[1,0],[0,1]],
            "stability": [1, 0],
            "request": "validate"
        }"#;
        let doc = crate::input::parse_input(text).unwrap();
        let (report, code) = run(&doc);
        assert_eq!(code, 1);
        assert_eq!(report.verdict["valid"], json!(false));
    }
}
