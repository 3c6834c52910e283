macro_rules! examples {
    ($($name:ident = $path:literal),* $(,)?) => {
        $(
            #[path = $path]
            mod $name;
        )*

        #[test]
        fn every_example_runs() {
            $(
                let out = $name::run_example()
                    .unwrap_or_else(|e| panic!("{}: {e}", stringify!($name)));
                assert!(!out.is_empty(), "{}", stringify!($name));
            )*
        }
    };
}

examples!(
    measure_basics = "../examples/measure_basics.rs",
    pointwise_norms = "../examples/pointwise_norms.rs",
    hom_and_duals = "../examples/hom_and_duals.rs",
    direct_limits = "../examples/direct_limits.rs",
    inverse_limits = "../examples/inverse_limits.rs",
    pullbacks = "../examples/pullbacks.rs",
    fg_presentation = "../examples/fg_presentation.rs",
    harness_fixtures = "../examples/harness_fixtures.rs",
);
