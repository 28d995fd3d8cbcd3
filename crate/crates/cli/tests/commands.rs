use resfin_cli::commands::parse_system_text;
use resfin_cli::fixtures::fixture;
use resfin_cli::format::SystemFile;
use resfin_cli::rfmx;
use resfin_cli::{exit_code, run, CliError, Input, Options, Status};
use resfin_core::matrix::{encode_action, MatrixTuple};
use resfin_core::rational::q;
use resfin_core::system::ShiftSpace;
use resfin_core::{FiniteAction, SystemDescriptor};

fn opts() -> Options {
    Options::default()
}

fn eps(p: i64, d: i64) -> Options {
    Options { epsilon: Some(q(p, d)), ..Options::default() }
}

#[test]
fn minimal_z_shift_parses() {
    let sys = parse_system_text("s.toml", "version = 1\nkind = \"z-shift\"\nalphabet = 2\n").unwrap();
    let SystemFile::Descriptor(SystemDescriptor::Shift(space)) = sys else { panic!("not a shift") };
    assert_eq!(space, ShiftSpace::full(2, 1));
}

#[test]
fn forbidden_transitions_parse() {
    let text = "version = 1\nkind = \"z-shift\"\nalphabet = 2\nforbidden = [[1, 1]]\n";
    let SystemFile::Descriptor(SystemDescriptor::Shift(space)) = parse_system_text("gm.toml", text).unwrap() else {
        panic!()
    };
    assert!(!space.is_full());
}

#[test]
fn boundary_of_rank_two() {
    let sys = parse_system_text("b.toml", "version = 1\nkind = \"fr-boundary\"\nrank = 2\n").unwrap();
    assert_eq!(sys.kind(), "fr-boundary");
}

#[test]
fn triangle_violation_names_the_triple() {
    let text = "version = 1\nkind = \"finite-sample\"\nmetric = \"table\"\n\
                distances = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]\nmaps = [[1, 2, 0]]\n";
    let err = parse_system_text("bad.toml", text).unwrap_err();
    let CliError::Parse { field, message, line, .. } = &err else { panic!("{err}") };
    assert_eq!(field, "distances");
    assert_eq!(*line, Some(4));
    assert!(message.contains("(0,2,1)") || message.contains("triangle"), "{message}");
}

#[test]
fn missing_and_future_versions() {
    let err = parse_system_text("a.toml", "kind = \"fr-boundary\"\nrank = 2\n").unwrap_err();
    assert!(matches!(&err, CliError::Parse { field, .. } if field == "version"), "{err}");
    let err = parse_system_text("b.toml", "version = 2\nkind = \"fr-boundary\"\nrank = 2\n").unwrap_err();
    assert!(matches!(err, CliError::UnsupportedVersion { version: 2, .. }));
}

#[test]
fn syntax_errors_carry_a_line() {
    let err = parse_system_text("c.toml", "version = 1\nkind = \"z-shift\nalphabet = 2\n").unwrap_err();
    assert!(matches!(err, CliError::Parse { line: Some(2), .. }), "{err}");
}

#[test]
fn unknown_field_values_are_reported_by_field() {
    let err = parse_system_text("d.toml", "version = 1\nkind = \"z-shift\"\nalphabet = \"two\"\n").unwrap_err();
    assert!(matches!(&err, CliError::Parse { field, line: Some(3), .. } if field == "alphabet"), "{err}");
    let err = parse_system_text("e.toml", "version = 1\nkind = \"klein-bottle\"\n").unwrap_err();
    assert!(matches!(&err, CliError::Parse { field, .. } if field == "kind"), "{err}");
}

#[test]
fn unknown_command_is_a_usage_error() {
    let r = run("frobnicate", &[], &opts());
    assert_eq!(exit_code(&r), 2);
    assert!(r.unwrap_err().to_string().contains("usage: resfin"));
}

#[test]
fn finite_action_is_not_paradoxical() {
    let art = run("paradox", &[fixture("cycle4_action.toml"), fixture("paradox_finite.toml")], &opts()).unwrap();
    assert_eq!(art.status, Status::NoneAtContext);
    assert_eq!(art.status.exit_code(), 1);
    assert!(art.report.get("context").is_some(), "{}", art.report);
}

#[test]
fn finite_action_carries_uniform_measure() {
    let art = run("invariant-measure", &[fixture("cycle4_action.toml"), fixture("paradox_finite.toml")], &opts())
        .unwrap();
    assert_eq!(art.status, Status::Found);
}

#[test]
fn reruns_are_byte_identical() {
    let inputs = [fixture("rotation8.toml")];
    let a = run("chain-recurrence", &inputs, &eps(1, 4)).unwrap().to_json();
    let b = run("chain-recurrence", &inputs, &eps(1, 4)).unwrap().to_json();
    assert_eq!(a, b);
    assert!(a.contains(&inputs[0].digest()));
}

#[test]
fn toml_witness_checks() {
    let art = run("check-witness", &[fixture("rotation8.toml"), fixture("rotation8_witness.toml")], &opts()).unwrap();
    assert_eq!(art.status, Status::Verified, "{}", art.report);
}

#[test]
fn tampered_artifact_is_refuted() {
    let art = run("chain-recurrence", &[fixture("rotation8.toml")], &eps(1, 4)).unwrap();
    let json = art.to_json().replace("\"equivariance_defect\": \"0\"", "\"equivariance_defect\": \"1/9\"");
    let r = run("check-witness", &[fixture("rotation8.toml"), Input::new("t.json", json)], &opts()).unwrap();
    assert_eq!(r.status, Status::Refuted);
}

#[test]
fn parameter_file_commands() {
    let cases: [(&str, &str, &str, Status); 6] = [
        ("measure-to-model", "z2_shift.toml", "coin.toml", Status::Found),
        ("bernoulli-model", "z2_shift.toml", "bernoulli_c5.toml", Status::Found),
        ("algebraic", "algebraic_3tt.toml", "algebraic_period6.toml", Status::Found),
        ("fixed-point-model", "square_quarter_turn.toml", "fixed_point_square.toml", Status::Found),
        ("berg", "golden_rotation.toml", "berg_n8.toml", Status::Verified),
        ("paradox", "fr2_boundary.toml", "paradox_boundary.toml", Status::Found),
    ];
    for (cmd, sys, params, want) in cases {
        let art = run(cmd, &[fixture(sys), fixture(params)], &opts()).unwrap_or_else(|e| panic!("{cmd}: {e}"));
        assert_eq!(art.status, want, "{cmd}: {}", art.report);
    }
}

#[test]
fn compressible_reports_per_window() {
    let w = Options { window: Some(2), ..Options::default() };
    let art = run("compressible", &[fixture("z2_shift.toml")], &w).unwrap();
    assert_eq!(art.status, Status::NoneAtContext);
}

#[test]
fn rfmx_round_trip() {
    let action = FiniteAction::new(5, vec![vec![1, 2, 0, 4, 3], vec![0, 3, 2, 4, 1]]).unwrap();
    let mut tuple = encode_action(&action);
    tuple.tolerances.insert("delta".into(), 0.01);
    let bytes = rfmx::encode(&tuple);
    let back: MatrixTuple = rfmx::decode("m.rfmx", &bytes).unwrap();
    assert_eq!(back, tuple);
    let art = run("microstate-extract", &[Input::new("m.rfmx", bytes.clone())], &opts()).unwrap();
    assert_eq!(art.status, Status::Found);
    assert!(rfmx::decode("m.rfmx", &bytes[..bytes.len() - 3]).is_err());
    let mut trailing = bytes.clone();
    trailing.push(0);
    assert!(rfmx::decode("m.rfmx", &trailing).is_err());
    let mut future = bytes;
    future[4] = 9;
    assert!(matches!(rfmx::decode("m.rfmx", &future), Err(CliError::UnsupportedVersion { version: 9, .. })));
}

#[test]
fn atom_cap_bounds_contexts() {
    let tight = Options { cap_atoms: Some(2), ..Options::default() };
    let r = run("paradox", &[fixture("fr2_boundary.toml"), fixture("paradox_boundary.toml")], &tight);
    assert_eq!(exit_code(&r), 2);
}
