use mblo_web::{channel_value, compile_value, curve_value};

#[test]
fn curve_covers_range() {
    let rows = curve_value(2, 40, 150e-9).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 39);
    assert!((rows[18]["db_1day"].as_f64().unwrap() - 36.2861).abs() < 1e-3);
    assert!(curve_value(1, 4, 150e-9).is_err());
}

#[test]
fn compile_grid_shape() {
    let v = compile_value(6, 3).unwrap();
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
    let grid = v["grid"].as_array().unwrap();
    assert_eq!(grid.len(), 7);
    assert!(grid.iter().all(|row| row.as_array().unwrap().len() == 8));
    assert!(compile_value(13, 0).is_err());
}

#[test]
fn channel_matches_closed_form() {
    let v = channel_value(2.32, 6).unwrap();
    let sim = v["gamma_eff_simulated"].as_f64().unwrap();
    assert!((sim - v["gamma_eff"].as_f64().unwrap()).abs() < 1e-9);
    assert!((sim - 0.58).abs() < 0.005);
    assert_eq!(v["curve"].as_array().unwrap().len(), 7);
}
