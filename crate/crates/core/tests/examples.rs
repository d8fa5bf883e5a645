macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(recover_signal, "recover_signal.rs");
example!(thresholding, "thresholding.rs");
example!(greedy_baselines, "greedy_baselines.rs");
example!(export_results, "export_results.rs");

#[test]
fn recover_signal_runs() {
    recover_signal::run_example().unwrap();
}

#[test]
fn thresholding_runs() {
    thresholding::run_example().unwrap();
}

#[test]
fn greedy_baselines_runs() {
    greedy_baselines::run_example().unwrap();
}

#[test]
fn export_results_runs() {
    export_results::run_example().unwrap();
}
