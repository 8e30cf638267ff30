use fastscc::simlab::{run_rejection_experiment, ExperimentSettings, Method, Preset};
use fastscc::*;

#[test]
fn experiments_are_identical_across_execution_modes() {
    let mut settings = ExperimentSettings::new(
        Preset::Ib.spec(0.3, 5.0, 50, 17),
        vec![Method::FAST_BONFERRONI, Method::Bootstrap { resamples: 20 }],
        12,
    );
    settings.procedure.cluster.restarts = 10;
    settings.bootstrap.cluster.restarts = 5;
    settings.execution = Execution::Sequential;
    let seq = run_rejection_experiment(&settings, 3, &[0.05, 0.1]).unwrap();
    settings.execution = Execution::Parallel;
    let par = run_rejection_experiment(&settings, 3, &[0.05, 0.1]).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn clustering_and_bootstrap_ignore_execution_mode() {
    let data = Preset::III.spec(0.0, 5.0, 60, 3).generate(1).unwrap();
    let curves = grid_curves(&data, 50).unwrap();
    let seq_cfg = ClusterConfig {
        execution: Execution::Sequential,
        ..Default::default()
    };
    let par_cfg = ClusterConfig {
        execution: Execution::Parallel,
        ..Default::default()
    };
    assert_eq!(
        cluster(&curves, 3, &seq_cfg).unwrap(),
        cluster(&curves, 3, &par_cfg).unwrap()
    );

    let mut boot = BootstrapConfig {
        resamples: 40,
        cluster: ClusterConfig {
            restarts: 5,
            ..Default::default()
        },
        ..Default::default()
    };
    boot.execution = Execution::Sequential;
    let a = bootstrap_test_h0k(&data, 2, &boot).unwrap();
    boot.execution = Execution::Parallel;
    let b = bootstrap_test_h0k(&data, 2, &boot).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seeds_change_restart_streams() {
    let data = Preset::Ia.spec(0.0, 5.0, 50, 3).generate(0).unwrap();
    let a = BootstrapConfig {
        resamples: 30,
        seed: 1,
        ..Default::default()
    };
    let b = BootstrapConfig { seed: 2, ..a };
    let ra = bootstrap_test_h0k(&data, 3, &a).unwrap();
    let rb = bootstrap_test_h0k(&data, 3, &b).unwrap();
    assert_ne!(ra.boot_statistics, rb.boot_statistics);
}
