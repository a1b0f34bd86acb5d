use qdisc_core::crit::{derivative, extrapolate_critical, peak_location};
use qdisc_core::discord::{asymmetric_discord, global_discord, mutual_information, symmetric_discord};
use qdisc_core::model::{chain_ground_state, reduced_pair_state, LanczosConfig};
use qdisc_core::{Boundary, Curve, Mode, OptimizerConfig};

#[test]
fn two_site_singlet_end_to_end() {
    let gs = chain_ground_state(2, 0.0, Boundary::Open, &LanczosConfig::default()).unwrap();
    assert!((gs.energy + 2.0).abs() < 1e-9);
    let rho = reduced_pair_state(&gs.state, 0, 1).unwrap();
    let cfg = OptimizerConfig::default();
    let log3 = 3f64.log2();
    assert!((mutual_information(&rho).unwrap() - 2.0 * log3).abs() < 1e-9);
    assert!((asymmetric_discord(&rho, &cfg).unwrap().value - log3).abs() < 1e-7);
    let sym = symmetric_discord(&rho, Mode::Real, &cfg).unwrap().value;
    assert!((sym - log3).abs() < 1e-7);
    let gqd = global_discord(&gs.state, true, &cfg).unwrap().value;
    assert!((gqd - sym).abs() < 1e-7);
}

#[test]
fn discord_curve_feeds_the_scaling_tools() {
    let cfg = OptimizerConfig { grid_points: 5, restarts: 2, ..Default::default() };
    let us: Vec<f64> = (0..9).map(|i| -0.8 + 0.1 * i as f64).collect();
    let mut peaks = Vec::new();
    let sizes = [4usize, 6, 8];
    for &l in &sizes {
        let ys: Vec<f64> = us
            .iter()
            .map(|&u| {
                let gs = chain_ground_state(l, u, Boundary::Periodic, &LanczosConfig::default()).unwrap();
                let rho = reduced_pair_state(&gs.state, 0, 1).unwrap();
                symmetric_discord(&rho, Mode::Real, &cfg).unwrap().value
            })
            .collect();
        let d1 = derivative(&Curve::new(us.clone(), ys, l).unwrap(), 1).unwrap();
        let peak = peak_location(&d1, (-0.8, 0.0)).unwrap();
        assert!(peak.x.is_finite() && (-0.8..=0.0).contains(&peak.x));
        peaks.push(peak.x);
    }
    let fit = extrapolate_critical(&sizes, &peaks, 0).unwrap();
    assert!(fit.u_c.is_finite());
    assert_eq!(fit.sizes, sizes);
}
