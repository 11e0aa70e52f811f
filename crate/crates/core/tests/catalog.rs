use std::collections::BTreeMap;

use superint::catalog::{
    catalog, instantiate, lookup, sweep_table, verify_entry, Catalog, Claim, ClaimKind, Constraint,
    EntryOptions, Filter, Param, TableId, UNCHECKED_REVOLUTION,
};
use superint::geometry::curvature;
use superint::{Class, Error};

fn opts() -> EntryOptions {
    EntryOptions::default()
}

#[test]
fn table_sizes() {
    let sizes: Vec<usize> = TableId::ALL
        .iter()
        .map(|&t| lookup(&Filter::table(t)).len())
        .collect();
    assert_eq!(sizes[..4], [6, 13, 11, 7]);
    assert!(sizes[4..].iter().all(|&n| n > 0));
}

#[test]
fn flat_row_verifies() {
    let entry = catalog().entry("F_2").unwrap();
    let report = verify_entry(entry, &opts()).unwrap();
    assert!(report.passed(), "{}", report.to_human());
    assert!(report.identity("curvature-zero").is_some());
}

#[test]
fn constant_curvature_row_verifies_at_unit_curvature() {
    let entry = catalog().entry("C_7").unwrap();
    let report = verify_entry(
        entry,
        &EntryOptions {
            curvature: Some(1.0),
            ..opts()
        },
    )
    .unwrap();
    assert!(report.passed(), "{}", report.to_human());
    assert!(report.identity("curvature-mean").unwrap().max_residual <= 1e-7);
}

#[test]
fn tampered_row_fails_curvature_zero() {
    let mut entry = catalog().entry("F_4").unwrap().clone();
    entry.constraints.set(Param::Nu, Constraint::Fixed(1.0));
    let report = verify_entry(&entry, &opts()).unwrap();
    assert!(!report.passed());
    assert!(!report.identity("curvature-zero").unwrap().pass);
    // The algebra itself still closes: only the flatness claim is wrong.
    assert!(report.identity("AC-row").unwrap().pass);

    let with_kappa = |kappa: f64| {
        let mut free: BTreeMap<Param, f64> =
            entry.free_params().into_iter().map(|p| (p, 0.3)).collect();
        free.insert(Param::Kappa, kappa);
        instantiate(&entry, &free, None).unwrap()
    };
    let spec = with_kappa(1.5);
    let k = curvature(&spec, 1.2, 0.7).unwrap();
    assert!((k - -0.064_973_452_713_533_95).abs() <= 1e-12, "{k}");
    let spec = with_kappa(1.0);
    assert!((curvature(&spec, 1.0, 1.0).unwrap() - -1.0 / 16.0).abs() <= 1e-12);
}

#[test]
fn both_alias_signs_hold() {
    for id in ["GL_1@I3+", "GL_1@I3-"] {
        let entry = catalog().entry(id).unwrap();
        assert_eq!(entry.class, Class::I3);
        assert_eq!(entry.alias_of.as_deref(), Some("GL_1"));
        let report = verify_entry(entry, &opts()).unwrap();
        assert!(report.passed(), "{id}: {}", report.to_human());
    }
}

#[test]
fn unchecked_revolution_rows_are_annotated() {
    for id in ["R_6", "R_8", "R_12"] {
        let report = verify_entry(catalog().entry(id).unwrap(), &opts()).unwrap();
        assert!(
            report.notes.iter().any(|n| n == UNCHECKED_REVOLUTION),
            "{id}"
        );
        assert!(report.identity("revolution").is_none());
    }
    for id in ["R_1", "R_2", "R_3", "R_9", "R_10"] {
        let report = verify_entry(catalog().entry(id).unwrap(), &opts()).unwrap();
        assert!(report.identity("revolution").unwrap().pass, "{id}");
    }
}

#[test]
fn every_checkable_row_passes() {
    for table in &TableId::ALL[1..] {
        for row in sweep_table(
            *table,
            &EntryOptions {
                draws: 2,
                n_points: 30,
                ..opts()
            },
        ) {
            assert!(row.passed(), "{table} {}: {:?}", row.row_id, row.result);
        }
    }
}

#[test]
fn metadata_rows_are_unverifiable() {
    let entry = catalog().entry("KO_I1").unwrap();
    assert!(!entry.is_checkable());
    assert!(matches!(
        verify_entry(entry, &opts()),
        Err(Error::Unverifiable(_))
    ));
}

#[test]
fn filters_combine() {
    let rows = lookup(&Filter {
        table: None,
        class: Some(Class::II3),
        claim: Some(ClaimKind::CurvatureZero),
    });
    let ids: Vec<&str> = rows.iter().map(|e| e.row_id.as_str()).collect();
    assert!(ids.contains(&"F_8") && ids.contains(&"F_11"));
    assert!(rows.iter().all(|e| e.class == Class::II3));
}

#[test]
fn instantiate_checks_free_values() {
    let entry = catalog().entry("F_2").unwrap();
    assert!(matches!(
        instantiate(entry, &BTreeMap::new(), None),
        Err(Error::Constraint(_))
    ));
    let extra = BTreeMap::from([
        (Param::Nu, 1.0),
        (Param::Kappa, 1.0),
        (Param::Lambda, 0.3),
        (Param::Mu, 0.2),
        (Param::N, 0.1),
    ]);
    assert!(matches!(
        instantiate(entry, &extra, None),
        Err(Error::Constraint(_))
    ));
    let c1 = catalog().entry("C_1").unwrap();
    let free: BTreeMap<Param, f64> = c1.free_params().into_iter().map(|p| (p, 0.5)).collect();
    assert!(instantiate(c1, &free, None).is_err());
    let spec = instantiate(c1, &free, Some(2.0)).unwrap();
    assert_eq!(spec.metric()[2], 0.5);
}

#[test]
fn json_round_trip() {
    let text = catalog().to_json();
    let again = Catalog::from_json(&text).unwrap();
    assert_eq!(again.to_json(), text);
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let r8 = value["entries"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|e| e["row_id"] == "R_8")
        .unwrap();
    r8["constraints"]["mu"] = serde_json::json!({"tied": {"to": "kappa", "factor": 1.0}});
    assert!(Catalog::from_json(&value.to_string()).is_err());
    let claims: Vec<&Claim> = again.entries.iter().flat_map(|e| &e.claims).collect();
    assert!(claims
        .iter()
        .any(|c| matches!(c, Claim::KoenigsForm { .. })));
}
