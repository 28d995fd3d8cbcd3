//! Fixture files bundled into the binary for `selftest`.

use crate::format::Input;

pub const FIXTURES: &[(&str, &str)] = &[
    ("algebraic_3tt.toml", include_str!("../fixtures/algebraic_3tt.toml")),
    ("algebraic_period6.toml", include_str!("../fixtures/algebraic_period6.toml")),
    ("berg_n8.toml", include_str!("../fixtures/berg_n8.toml")),
    ("bernoulli_c5.toml", include_str!("../fixtures/bernoulli_c5.toml")),
    ("coin.toml", include_str!("../fixtures/coin.toml")),
    ("compactified_z.toml", include_str!("../fixtures/compactified_z.toml")),
    ("cycle4_action.toml", include_str!("../fixtures/cycle4_action.toml")),
    ("f2_action5.toml", include_str!("../fixtures/f2_action5.toml")),
    ("fixed_point_square.toml", include_str!("../fixtures/fixed_point_square.toml")),
    ("fr2_boundary.toml", include_str!("../fixtures/fr2_boundary.toml")),
    ("golden_rotation.toml", include_str!("../fixtures/golden_rotation.toml")),
    ("paradox_boundary.toml", include_str!("../fixtures/paradox_boundary.toml")),
    ("paradox_finite.toml", include_str!("../fixtures/paradox_finite.toml")),
    ("rotation8.toml", include_str!("../fixtures/rotation8.toml")),
    ("rotation8_witness.toml", include_str!("../fixtures/rotation8_witness.toml")),
    ("square_quarter_turn.toml", include_str!("../fixtures/square_quarter_turn.toml")),
    ("three_point_table.toml", include_str!("../fixtures/three_point_table.toml")),
    ("z2_shift.toml", include_str!("../fixtures/z2_shift.toml")),
];

/// A bundled fixture by file name.
pub fn fixture(name: &str) -> Input {
    let (_, text) = FIXTURES.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no fixture {name}"));
    Input::new(format!("fixtures/{name}"), text.as_bytes())
}
