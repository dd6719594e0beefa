use proptest::prelude::*;

use nhbracket::scenario::{load_scenario, run_scenario};
use nhbracket::timeseries::{emit_timeseries, FieldKind, Format, Sample, TimeSeries};
use nhbracket::C64;

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL
        | prop::num::f64::SUBNORMAL
        | prop::num::f64::ZERO
        | prop::num::f64::NEGATIVE
        | prop::num::f64::POSITIVE
}

fn bits(ts: &TimeSeries) -> Vec<u64> {
    let mut out: Vec<u64> = ts.times().iter().map(|t| t.to_bits()).collect();
    for i in 0..ts.len() {
        for s in ts.record(i) {
            match s {
                Sample::Real(x) => out.push(x.to_bits()),
                Sample::Complex(z) => out.extend([z.re.to_bits(), z.im.to_bits()]),
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn csv_and_json_are_bit_exact(rows in prop::collection::vec((finite(), finite(), finite()), 1..20)) {
        let mut ts = TimeSeries::new(vec![("z".into(), FieldKind::Complex), ("x".into(), FieldKind::Real)]);
        for (k, (re, im, x)) in rows.into_iter().enumerate() {
            ts.push(k as f64 / 3.0, vec![Sample::Complex(C64::new(re, im)), Sample::Real(x)]).unwrap();
        }
        let csv = TimeSeries::read_csv(ts.to_csv_string().as_bytes()).unwrap();
        let json = TimeSeries::read_json(ts.to_json_string().unwrap().as_bytes()).unwrap();
        prop_assert_eq!(bits(&csv), bits(&ts));
        prop_assert_eq!(bits(&json), bits(&ts));
    }
}

#[test]
fn scenario_output_resolves_relative_to_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("runs")).unwrap();
    let path = dir.path().join("runs/dimer.toml");
    std::fs::write(
        &path,
        r#"
name = "dimer"
hamiltonian_expr = "pt_dimer(0.5, 1)"
observable_expr = "sigma_z"
initial_state_expr = "ket(2, 0)"
picture = "schrodinger-density"
integrator = "exact"
dt = 0.1
t_final = 1.0
normalize = true

[output]
path = "dimer.json"
format = "json"
"#,
    )
    .unwrap();
    let scenario = load_scenario(&path).unwrap();
    let out = scenario.output.clone().unwrap();
    assert_eq!(out.path, dir.path().join("runs/dimer.json"));
    assert_eq!(out.format, Format::Json);

    let ts = run_scenario(&scenario).unwrap();
    emit_timeseries(&ts, out.format, &out.path).unwrap();
    let back = TimeSeries::read_json(std::fs::File::open(&out.path).unwrap()).unwrap();
    assert_eq!(bits(&back), bits(&ts));
    // normalized expectation of σz stays within [−1, 1] even as the trace grows
    for z in back.complex_column("chi_exp").unwrap() {
        assert!(z.re.abs() <= 1.0 + 1e-12 && z.im.abs() < 1e-12);
    }
}

#[test]
fn csv_header_flattens_complex_fields() {
    let mut ts = TimeSeries::new(vec![("trace".into(), FieldKind::Complex), ("min_eig".into(), FieldKind::Real)]);
    ts.push(0.0, vec![Sample::Complex(C64::new(1.0, 0.0)), Sample::Real(0.0)]).unwrap();
    assert_eq!(ts.to_csv_string().lines().next().unwrap(), "t,trace.re,trace.im,min_eig");
}
