use resfin_cli::acceptance::{run_criterion, DEFAULT_SEED};

fn check(id: usize) {
    let r = run_criterion(id, DEFAULT_SEED);
    println!("{r}");
    assert!(r.passed, "{r}");
}

macro_rules! criteria {
    ($($name:ident = $id:expr;)*) => {$(
        #[test]
        fn $name() {
            check($id);
        }
    )*};
}

criteria! {
    c01_chain_recurrence_oracle = 1;
    c02_chain_model_round_trip = 2;
    c03_compressible_fixtures = 3;
    c04_paradox_measure_duality = 4;
    c05_algebraic_fixed_point_counts = 5;
    c06_bernoulli_density_law = 6;
    c07_cut_projection_bounds = 7;
    c08_microstate_recovery = 8;
    c09_rotation_orbit_projection_bounds = 9;
    c10_fixed_point_model_bound = 10;
    c11_measure_model_exactness = 11;
}
