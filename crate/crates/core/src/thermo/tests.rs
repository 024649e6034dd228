use super::*;
use crate::geometry::{
    build_chain, build_rectangle, build_ring, Coupling, GeometryLabel, SpinGeometry,
};
use crate::operator::{commutator, herm_eig, hermiticity_error, trace};

fn chain45() -> OperatorSet {
    OperatorSet::from_ratio(&build_chain(4).unwrap(), 45.0).unwrap()
}

fn pair_chain() -> OperatorSet {
    OperatorSet::from_ratio(&build_chain(2).unwrap(), 45.0).unwrap()
}

fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn default_eps(ops: &OperatorSet) -> f64 {
    0.01 * ops.omega_d
}

#[test]
fn infinite_temperature_is_maximally_mixed() {
    let ops = chain45();
    let rho = qe_density(&ops, ThermoState::new(0.0, 0.0)).unwrap();
    let mixed = ComplexMatrix::identity(16, 16) * Complex64::new(1.0 / 16.0, 0.0);
    assert!(max_abs(&(rho - mixed)) < 1e-15);
    let (ez, ed) = energies(&ops, ThermoState::new(0.0, 0.0)).unwrap();
    assert!(ez.abs() < 1e-13 && ed.abs() < 1e-13);
}

#[test]
fn equal_temperatures_give_secular_gibbs_state() {
    let ops = chain45();
    let beta = 0.3;
    let rho = qe_density(&ops, ThermoState::equilibrium(beta)).unwrap();
    let x = (&ops.hz + &ops.hd) * Complex64::new(-beta, 0.0);
    let e = crate::operator::mat_exp_hermitian(&x).unwrap();
    let z = trace(&e);
    assert!(max_abs(&(rho - e / z)) < 1e-13);
}

#[test]
fn zeeman_only_populations_follow_magnetization() {
    // beta_d = 0: populations ~ exp(beta_z omega_0 m), m the total I_z.
    let ops = pair_chain();
    let bz = 1.0 / ops.omega0;
    let rho = qe_density(&ops, ThermoState::new(bz, 0.0)).unwrap();
    let m = [1.0, 0.0, 0.0, -1.0];
    let w: Vec<f64> = m
        .iter()
        .map(|&m: &f64| (bz * ops.omega0 * m).exp())
        .collect();
    let z: f64 = w.iter().sum();
    for i in 0..4 {
        assert!((rho[(i, i)].re - w[i] / z).abs() < 1e-14);
    }
}

#[test]
fn qe_state_is_a_commuting_density_matrix() {
    let ops = chain45();
    for s in [
        ThermoState::new(0.01, 5.0),
        ThermoState::new(0.4, 0.02),
        ThermoState::new(2.0, 30.0),
    ] {
        let rho = qe_density(&ops, s).unwrap();
        assert!((trace(&rho).re - 1.0).abs() < 1e-12);
        assert!(herm_eig(&rho).unwrap().min_value() > -1e-12);
        assert!(max_abs(&commutator(&rho, &ops.hz).unwrap()) < 1e-12 * ops.omega0);
        assert!(max_abs(&commutator(&rho, &ops.hd).unwrap()) < 1e-12);
    }
}

#[test]
fn huge_exponents_stay_finite() {
    let ops = chain45();
    let rho = qe_density(&ops, ThermoState::new(500.0, 900.0)).unwrap();
    assert!(rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    assert!((trace(&rho).re - 1.0).abs() < 1e-12);
}

#[test]
fn cold_zeeman_saturates_at_ground_energy() {
    let ops = chain45();
    let (ez, _) = energies(&ops, ThermoState::new(5.0, 0.0)).unwrap();
    assert!((ez + 2.0 * ops.omega0).abs() < 1e-9 * ops.omega0);
}

#[test]
fn energies_are_log_partition_derivatives() {
    let ops = chain45();
    let h = 1e-5;
    for s in [ThermoState::new(0.02, 0.5), ThermoState::new(0.1, 3.0)] {
        let (ez, ed) = energies(&ops, s).unwrap();
        let lz = |bz, bd| log_partition(&ops, ThermoState::new(bz, bd)).unwrap();
        let fz = -(lz(s.beta_z + h, s.beta_d) - lz(s.beta_z - h, s.beta_d)) / (2.0 * h);
        let fd = -(lz(s.beta_z, s.beta_d + h) - lz(s.beta_z, s.beta_d - h)) / (2.0 * h);
        assert!(((ez - fz) / ez).abs() < 1e-6, "{ez} vs {fz}");
        assert!(((ed - fd) / ed).abs() < 1e-6, "{ed} vs {fd}");
    }
}

#[test]
fn susceptibility_at_infinite_temperature() {
    let ops = chain45();
    let m = susceptibility(&ops, ThermoState::new(0.0, 0.0)).unwrap();
    let hz2 = trace_product(&ops.hz, &ops.hz).unwrap().re / 16.0;
    assert!((m[(0, 0)] + hz2).abs() < 1e-12 * hz2);
    assert!((m[(0, 1)] - m[(1, 0)]).abs() < 1e-12);
}

#[test]
fn susceptibility_matches_finite_differences() {
    let ops = chain45();
    let h = 1e-5;
    for s in [
        ThermoState::new(1e-4, 7e-3),
        ThermoState::new(0.05, 1.0),
        ThermoState::new(0.2, 10.0),
    ] {
        let m = susceptibility(&ops, s).unwrap();
        let e = |bz, bd| energies(&ops, ThermoState::new(bz, bd)).unwrap();
        let (zp, zm) = (e(s.beta_z + h, s.beta_d), e(s.beta_z - h, s.beta_d));
        let (dp, dm) = (e(s.beta_z, s.beta_d + h), e(s.beta_z, s.beta_d - h));
        let fd = Matrix2::new(
            (zp.0 - zm.0) / (2.0 * h),
            (dp.0 - dm.0) / (2.0 * h),
            (zp.1 - zm.1) / (2.0 * h),
            (dp.1 - dm.1) / (2.0 * h),
        );
        assert!((m - fd).norm() < 1e-5 * m.norm(), "{s:?}: {m} vs {fd}");
        assert!(m.symmetric_eigenvalues().iter().all(|&l| l < 0.0));
    }
}

#[test]
fn degenerate_scenario_is_singular() {
    // no field and a magic-angle pair: both reservoirs vanish
    let magic = (1.0 / 3f64.sqrt()).acos();
    let g = SpinGeometry::new(
        2,
        vec![Coupling {
            j: 1,
            k: 2,
            d: 1.0,
            theta: magic,
            phi: 0.0,
        }],
        GeometryLabel::Custom,
    )
    .unwrap();
    let ops = OperatorSet::with_omega0(&g, 0.0).unwrap();
    let res = susceptibility(&ops, ThermoState::new(1.0, 1.0));
    assert!(matches!(res, Err(Error::SingularSusceptibility { .. })));
}

#[test]
fn condition_number_of_diagonal() {
    assert_eq!(condition_number(&Matrix2::new(-4.0, 0.0, 0.0, -2.0)), 2.0);
    assert_eq!(
        condition_number(&Matrix2::new(-4.0, 0.0, 0.0, 0.0)),
        f64::INFINITY
    );
}

#[test]
fn flux_correction_structure() {
    let ops = chain45();
    let eps = default_eps(&ops);
    let j = flux_correction(&ops, eps).unwrap();
    assert!(hermiticity_error(&j) < 1e-12 * j.norm());
    let jt = ops.eig_h.to_eigenbasis(&j);
    let kt = ops.eig_h.to_eigenbasis(&ops.k);
    for a in 0..16 {
        assert!((jt[(a, a)] - kt[(a, a)] / eps).norm() < 1e-9);
    }
    assert!(flux_correction(&ops, 0.0).is_err());
    assert!(flux_correction(&ops, -1.0).is_err());

    let frozen = OperatorSet::from_ratio(&build_chain(4).unwrap(), 0.0).unwrap();
    assert_eq!(max_abs(&flux_correction(&frozen, eps).unwrap()), 0.0);
}

#[test]
fn ne_state_reduces_to_qe_on_the_diagonal() {
    let ops = chain45();
    let s = ThermoState::equilibrium(0.7);
    let ne = ne_density(&ops, s, default_eps(&ops)).unwrap();
    assert_eq!(ne, qe_density(&ops, s).unwrap());
}

#[test]
fn large_regularization_suppresses_the_correction() {
    let ops = chain45();
    let s = ThermoState::new(0.1, 3.0);
    let ne = ne_density(&ops, s, 1e12).unwrap();
    assert!(max_abs(&(ne - qe_density(&ops, s).unwrap())) < 1e-9);
}

#[test]
fn ne_state_is_a_density_matrix() {
    let ops = chain45();
    let rho = ne_density(&ops, ThermoState::new(1.0, 5.0), default_eps(&ops)).unwrap();
    assert!((trace(&rho).re - 1.0).abs() < 1e-12);
    assert!(
        herm_eig(&rho).unwrap().min_value() > 0.0 || herm_eig(&rho).unwrap().min_value() > -1e-12
    );
}

#[test]
fn quasi_equilibrium_carries_no_flux() {
    for g in [
        build_chain(4).unwrap(),
        build_ring(4).unwrap(),
        build_rectangle(),
    ] {
        let ops = OperatorSet::from_ratio(&g, 45.0).unwrap();
        for s in [
            ThermoState::new(0.1, 7.0),
            ThermoState::new(1e-4, 7e-3),
            ThermoState::new(2.0, 0.5),
        ] {
            assert!(qe_flux(&ops, s).unwrap().abs() < 1e-10);
        }
    }
}

#[test]
fn flux_vanishes_on_the_diagonal() {
    let ops = chain45();
    let model = FluxModel::new(&ops, default_eps(&ops)).unwrap();
    assert_eq!(model.avg_flux(ThermoState::equilibrium(3.0)).unwrap(), 0.0);
    assert_eq!(
        model.rhs(ThermoState::equilibrium(3.0)).unwrap(),
        (0.0, 0.0)
    );
}

#[test]
fn colder_dipolar_reservoir_warms() {
    let ops = chain45();
    let model = FluxModel::new(&ops, default_eps(&ops)).unwrap();
    let s = ThermoState::new(0.1, 7.0);
    // energy flows out of the Zeeman reservoir into the colder dipolar one
    assert!(model.avg_flux(s).unwrap() < 0.0);
    let (dz, dd) = model.rhs(s).unwrap();
    assert!(dd < 0.0, "dbeta_d/dt = {dd}");
    let m = susceptibility(&ops, s).unwrap();
    // energy balance: M * rate sums to zero
    let de = m * Vector2::new(dz, dd);
    assert!((de[0] + de[1]).abs() < 1e-12 * de[0].abs().max(1e-300));
}

#[test]
fn no_field_means_no_motion() {
    let ops = OperatorSet::from_ratio(&build_rectangle(), 0.0).unwrap();
    let model = FluxModel::new(&ops, 0.01 * ops.omega_d).unwrap();
    assert_eq!(model.avg_flux(ThermoState::new(0.5, 2.0)).unwrap(), 0.0);
    assert_eq!(model.rhs(ThermoState::new(0.5, 2.0)).unwrap(), (0.0, 0.0));
}

#[test]
fn total_energy_decreases_with_common_beta() {
    let ops = chain45();
    let mut prev = f64::INFINITY;
    for i in 0..=60 {
        let beta = i as f64 * 0.01;
        let e = total_energy(&ops, ThermoState::equilibrium(beta)).unwrap();
        assert!(e < prev, "beta = {beta}");
        prev = e;
    }
}

#[test]
fn equilibrium_beta_solves_conservation() {
    let ops = chain45();
    let s0 = ThermoState::new(1e-4, 7e-3);
    let beta = equilibrium_beta(&ops, s0).unwrap();
    let e0 = total_energy(&ops, s0).unwrap();
    let e = total_energy(&ops, ThermoState::equilibrium(beta)).unwrap();
    assert!((e - e0).abs() < 1e-10 * e0.abs());
    assert!(beta > s0.beta_z && beta < s0.beta_d);
    assert_eq!(
        equilibrium_beta(&ops, ThermoState::equilibrium(0.3)).unwrap(),
        0.3
    );
}

#[test]
fn equilibrium_beta_reports_unreachable_energy() {
    // negative temperatures put the energy above the beta >= 0 range
    let ops = chain45();
    let res = equilibrium_beta(&ops, ThermoState::new(-0.01, 0.001));
    assert!(matches!(res, Err(Error::Domain(_))));
}

#[test]
fn integrate_fixed_point_is_constant() {
    let ops = chain45();
    let s0 = ThermoState::equilibrium(0.05);
    let traj = integrate(
        &ops,
        s0,
        &IntegrationSettings::new(default_eps(&ops), 10.0, 1e-8),
    )
    .unwrap();
    assert!(traj.records.iter().all(|r| r.state == s0));
    assert!(traj.records.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn integrate_outputs_on_schedule() {
    let ops = chain45();
    let mut settings = IntegrationSettings::new(default_eps(&ops), 5.0, 1e-8);
    settings.output_every = Some(0.5);
    let traj = integrate(&ops, ThermoState::new(1e-4, 7e-3), &settings).unwrap();
    assert_eq!(traj.records.len(), 11);
    assert_eq!(traj.records[0].t, 0.0);
    assert_eq!(traj.last().t, 5.0);
    assert!(!traj.meta.stopped_early);
    let e0 = traj.records[0].total_energy();
    for r in &traj.records {
        assert!((r.total_energy() - e0).abs() <= 10.0 * 1e-8 * e0.abs());
    }

    settings.output_every = None;
    let traj = integrate(&ops, ThermoState::new(1e-4, 7e-3), &settings).unwrap();
    assert_eq!(traj.records.len(), 200);
}

#[test]
fn integrate_rejects_bad_settings() {
    let ops = chain45();
    let s0 = ThermoState::new(0.1, 1.0);
    assert!(integrate(&ops, s0, &IntegrationSettings::new(0.01, 0.0, 1e-8)).is_err());
    assert!(integrate(&ops, s0, &IntegrationSettings::new(0.01, 1.0, 0.0)).is_err());
    assert!(integrate(&ops, s0, &IntegrationSettings::new(0.0, 1.0, 1e-8)).is_err());
}

#[test]
fn trajectory_csv_round_trip() {
    let ops = pair_chain();
    let mut settings = IntegrationSettings::new(default_eps(&ops), 2.0, 1e-8);
    settings.output_every = Some(0.25);
    let traj = integrate(&ops, ThermoState::new(0.01, 0.4), &settings).unwrap();
    let text = traj.to_csv_string().unwrap();
    assert!(text.starts_with("t,beta_z,beta_d,E_z,E_d,C_12\n"));
    let back = Trajectory::read_csv(text.as_bytes()).unwrap();
    assert_eq!(back.records, traj.records);
    assert_eq!(back.to_csv_string().unwrap(), text);
}

#[test]
fn pair_labels() {
    assert_eq!(trajectory::pair_label((1, 2)), "C_12");
    assert_eq!(trajectory::pair_label((3, 11)), "C_3_11");
}
