use approx::assert_abs_diff_eq;
use fockstab::fock::{DensityMatrix, HilbertSpace};
use fockstab::liouville::{steady_state, SteadyStateOptions};
use fockstab::models::*;
use fockstab::C64;

fn regime(g_tilde: f64, kappa: f64, up: f64, down: f64) -> GenericParams {
    GenericParams {
        g_tilde,
        conversion_rate: 10.0,
        kappa,
        gamma_down: down,
        gamma_up: up,
        dims: [3, 8],
    }
}

fn element(rho: &DensityMatrix, (k, n): (usize, usize), (k2, n2): (usize, usize)) -> C64 {
    let s = rho.space();
    rho.element(s.index_of(&[k, n]).unwrap(), s.index_of(&[k2, n2]).unwrap())
}

fn numeric_coefficients(rho: &DensityMatrix) -> Vec<(&'static str, C64)> {
    let d = |k, n| element(rho, (k, n), (k, n));
    vec![
        ("rho_00_0", d(0, 0)),
        ("rho_00_1", d(0, 1)),
        ("rho_00_2", d(0, 2)),
        ("rho_00_3", d(0, 3)),
        ("rho_11_0", d(1, 0)),
        ("rho_11_1", d(1, 1)),
        ("rho_10_0", element(rho, (1, 0), (0, 2))),
        ("rho_10_1", element(rho, (1, 1), (0, 3))),
    ]
}

fn analytic_coefficients(a: &AnalyticSolution) -> Vec<C64> {
    let r = |v: f64| C64::new(v, 0.0);
    vec![
        r(a.rho_00_0),
        r(a.rho_00_1),
        r(a.rho_00_2),
        r(a.rho_00_3),
        r(a.rho_11_0),
        r(a.rho_11_1),
        a.rho_10_0,
        a.rho_10_1,
    ]
}

#[test]
fn generic_steady_state_matches_oracle() {
    for p in [
        regime(2.0, 0.05, 0.02, 0.002),
        regime(2.5, 0.02, 0.01, 0.0004),
        regime(1.8, 0.04, 0.015, 0.0007),
    ] {
        assert!(p.regime().max() <= 0.1, "{:?}", p.regime());
        let rho = steady_state(&build_generic(&p).unwrap(), &SteadyStateOptions::default())
            .unwrap()
            .rho;
        let a = analytic_generic_steady(&p).unwrap();
        let num = numeric_coefficients(&rho);
        for ((name, num), ana) in num.iter().copied().zip(analytic_coefficients(&a)).take(7) {
            if ana.norm() > 1e-4 {
                let rel = (num - ana).norm() / ana.norm();
                assert!(
                    rel < 0.15,
                    "{name}: numeric {num} analytic {ana} rel {rel:.3}"
                );
            }
        }
        // Lowest-order balance of the <1,1|.|0,3> element of the master equation.
        let (g, up) = (p.g_tilde, p.gamma_up);
        let balance = (C64::new(0.0, -g * 6f64.sqrt()) * (num[3].1 - num[5].1)
            + num[6].1 * (3f64.sqrt() * up))
            / (p.conversion_rate + 3.0 * up + 0.5 * p.kappa + 2.0 * p.gamma_down);
        let rel = (num[7].1 - balance).norm() / balance.norm();
        assert!(
            rel < 0.02,
            "rho_10_1: numeric {} balance {balance} rel {rel:.3}",
            num[7].1
        );
        let pc = rho.populations("c").unwrap();
        let p0p1 = p.gamma_down / p.gamma_up + 2.0 * p.kappa / p.conversion_rate;
        let p2p1 = p.gamma_up * p.conversion_rate / (4.0 * p.g_tilde.powi(2))
            + 2.0 * p.gamma_up / p.conversion_rate;
        assert!(((pc[0] / pc[1]) / p0p1 - 1.0).abs() < 0.15);
        assert!(((pc[2] / pc[1]) / p2p1 - 1.0).abs() < 0.15);
    }
}

#[test]
fn generic_state_follows_ansatz_pattern() {
    let p = GenericParams {
        g_tilde: 2.0,
        conversion_rate: 10.0,
        kappa: 0.005,
        gamma_down: 1e-5,
        gamma_up: 0.002,
        dims: [3, 8],
    };
    let rho = steady_state(&build_generic(&p).unwrap(), &SteadyStateOptions::default())
        .unwrap()
        .rho;
    let s = rho.space().clone();
    let allowed = |i: usize, j: usize| {
        let (oi, oj) = (s.occupations(i), s.occupations(j));
        // excitation number k*2 + n is conserved by H and the coherent pattern
        i == j || oi[0] * 2 + oi[1] == oj[0] * 2 + oj[1]
    };
    let mut worst = 0.0f64;
    for i in 0..s.total_dim() {
        for j in 0..s.total_dim() {
            if !allowed(i, j) {
                worst = worst.max(rho.element(i, j).norm());
            }
        }
    }
    assert!(worst < 1e-6, "off-pattern element {worst:e}");
}

#[test]
fn trivial_generic_decays_to_vacuum() {
    let p = GenericParams {
        g_tilde: 0.0,
        conversion_rate: 0.0,
        kappa: 1.0,
        gamma_down: 0.3,
        gamma_up: 0.0,
        dims: [2, 4],
    };
    let rho = steady_state(&build_generic(&p).unwrap(), &SteadyStateOptions::default())
        .unwrap()
        .rho;
    assert_abs_diff_eq!(rho.element(0, 0).re, 1.0, epsilon = 1e-12);
}

/// Physical parameters that reproduce the fig3ab preset couplings.
fn fig3ab_raw() -> RawOptomechParams {
    let r = -2.0 / (1.0 + 5f64.sqrt());
    let g2 = 10.0 / (1.0 - r * r);
    let (omega_m, kappa3) = (200.0, 50.0);
    let kappa_minus = 50.0;
    RawOptomechParams {
        omega1: 0.0,
        omega2: 100.0,
        tunneling: -100.0,
        g1: -r * r * g2,
        g2,
        kappa1: 1.0,
        kappa2: 1.0,
        kappa_minus_ext: kappa_minus - 1.0,
        g3: 0.1,
        kappa3,
        omega_m,
        gamma: 2e-4,
        n_th: 10.0,
        drive_down: 2.0 * C64::new(kappa_minus / 2.0, omega_m).norm(),
        drive_up: 13.0 * C64::new(kappa3 / 2.0, -omega_m).norm(),
    }
}

#[test]
fn raw_route_reproduces_fig3ab_rates() {
    let raw = fig3ab_raw();
    let eff = EffectiveParams::from_raw(&raw).unwrap();
    let modes = eff.modes.unwrap();
    assert_abs_diff_eq!(modes.r, -0.618034, epsilon = 1e-6);
    assert!(eff.g_mm.abs() < 1e-12 * raw.g2.abs());
    assert_abs_diff_eq!(eff.g_pp, 10.0, epsilon = 1e-12);
    assert_abs_diff_eq!(eff.g_pm, 10.0, epsilon = 1e-12);
    assert_abs_diff_eq!(eff.kappa_plus, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(eff.kappa_minus, 50.0, epsilon = 1e-12);
    assert_eq!(eff.kappa_pm, 0.0);
    assert_abs_diff_eq!(eff.coupling_down, 20.0, epsilon = 1e-10);
    assert_abs_diff_eq!(eff.coupling_up, 1.3, epsilon = 1e-12);
    assert_abs_diff_eq!(eff.delta_plus, -393.34, epsilon = 5e-3);
    let g = map_to_generic(&eff, [3, 8]).unwrap();
    assert_abs_diff_eq!(g.g_tilde, -1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(g.conversion_rate, 8.0, epsilon = 1e-10);
    assert_abs_diff_eq!(g.kappa, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(g.gamma_down, 0.0127, epsilon = 1e-4);
    assert_abs_diff_eq!(g.gamma_up, 0.1383, epsilon = 1e-4);
}

#[test]
fn fig3cd_chain() {
    let (om, gd, gu) = (5000.0, 250.0, 5.3);
    let eff = EffectiveParams {
        g_pp: 200.0,
        g_mm: 0.0,
        g_pm: 200.0,
        g3: 0.1,
        kappa_plus: 1.0,
        kappa_minus: 1000.0,
        kappa_pm: 0.0,
        kappa3: 1000.0,
        omega_m: om,
        gamma: 5e-4,
        n_th: 1.0,
        coupling_down: gd,
        coupling_up: gu,
        delta_plus: ideal_detuning(om, gd, gu).unwrap(),
        modes: None,
        drive: None,
    };
    let g = map_to_generic(&eff, [3, 8]).unwrap();
    assert_abs_diff_eq!(g.g_tilde, -10.0, epsilon = 1e-12);
    assert_abs_diff_eq!(g.conversion_rate, 160.0, epsilon = 1e-12);
    assert_abs_diff_eq!(g.gamma_up, 0.113, epsilon = 1e-3);
    assert_abs_diff_eq!(g.gamma_down, 3.8e-3, epsilon = 1e-4);
    let a = analytic_generic_steady(&g).unwrap();
    assert!(a.populations[1] > 0.88, "{}", a.populations[1]);
}

#[test]
fn hybridization_round_trip() {
    for (o1, o2, j) in [(0.0, 100.0, -100.0), (3.0, -7.0, 2.5), (10.0, 11.0, 40.0)] {
        let mut raw = fig3ab_raw();
        raw.omega1 = o1;
        raw.omega2 = o2;
        raw.tunneling = j;
        raw.kappa1 = 1.7;
        raw.kappa2 = 0.4;
        raw.kappa_minus_ext = 0.0;
        let m = derive_effective_modes(&raw).unwrap();
        let (b1, b2, bj) = reverse_transform(m.r, m.omega_plus, m.omega_minus);
        let scale = o1.abs().max(o2.abs()).max(j.abs());
        assert!(
            (b1 - o1).abs() <= 1e-10 * scale
                && (b2 - o2).abs() <= 1e-10 * scale
                && (bj - j).abs() <= 1e-10 * scale
        );
        assert_abs_diff_eq!(
            m.kappa_plus + m.kappa_minus,
            raw.kappa1 + raw.kappa2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(m.g_pp + m.g_mm, raw.g1 + raw.g2, epsilon = 1e-12);
    }
}

#[test]
fn decoupled_full_model_is_vacuum_times_thermal() {
    let mut eff = EffectiveParams::from_raw(&fig3ab_raw()).unwrap();
    eff.g_pp = 0.0;
    eff.g_pm = 0.0;
    eff.g3 = 0.0;
    eff.coupling_down = 0.0;
    eff.coupling_up = 0.0;
    eff.gamma = 0.1;
    eff.n_th = 0.5;
    let l = build_full(&eff, [2, 2, 2, 12], false).unwrap();
    let rho = steady_state(&l, &SteadyStateOptions::default())
        .unwrap()
        .rho;
    let q = eff.n_th / (eff.n_th + 1.0);
    let norm: f64 = (0..12).map(|n| q.powi(n)).sum();
    for (n, p) in phonon_populations(&rho, "c")
        .unwrap()
        .into_iter()
        .enumerate()
    {
        assert_abs_diff_eq!(p, q.powi(n as i32) / norm, epsilon = 1e-10);
    }
    for label in ["a+", "a-", "a3"] {
        assert_abs_diff_eq!(rho.populations(label).unwrap()[0], 1.0, epsilon = 1e-10);
    }
}

#[test]
fn reduced_model_without_coupling_is_thermal() {
    let mut eff = EffectiveParams::from_raw(&fig3ab_raw()).unwrap();
    eff.g_pp = 0.0;
    eff.g_pm = 0.0;
    eff.coupling_down = 0.0;
    let d = eff.derived();
    let l = build_reduced(&eff, [2, 10], ReducedOptions::default()).unwrap();
    let p = phonon_populations(
        &steady_state(&l, &SteadyStateOptions::default())
            .unwrap()
            .rho,
        "c",
    )
    .unwrap();
    let q = d.gamma_up_bar / d.gamma_down_bar;
    assert!(q > 1.0, "the auxiliary cavity heats the mechanics");
    let norm: f64 = (0..10).map(|n| q.powi(n)).sum();
    for (n, pn) in p.iter().enumerate() {
        assert_abs_diff_eq!(*pn, q.powi(n as i32) / norm, epsilon = 1e-10);
    }
}

#[test]
fn back_transform_matches_closed_form_diagonal() {
    let s = HilbertSpace::new([("a+", 3), ("c", 6)]).unwrap();
    let rho = DensityMatrix::fock(&s, &[0, 1]).unwrap();
    let mut errors = Vec::new();
    for ratio in [0.05, 0.1] {
        let mut eff = EffectiveParams::from_raw(&fig3ab_raw()).unwrap();
        eff.coupling_down = ratio * eff.omega_m;
        eff.coupling_up = 0.0;
        eff.delta_plus = ideal_detuning(eff.omega_m, eff.coupling_down, 0.0).unwrap();
        let eta = normal_mode_generator(&eff, &s, "a+", "c").unwrap();
        let chi = back_transform(&rho, &eta).unwrap();
        assert!((chi.trace() - 1.0).norm() < 1e-15);
        assert!(chi.hermiticity_error() < 1e-12);
        let closed = diagonal_corrections(&eff, 1.0, 0.0).unwrap();
        let diag = |k, n| element(&chi, (k, n), (k, n)).re;
        let err = [
            (diag(0, 1) - closed.chi_00_11).abs(),
            (diag(1, 0) - closed.chi_11_00).abs(),
            (diag(1, 2) - closed.chi_11_22).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        assert!(err < ratio.powi(3), "ratio {ratio}: {err:e}");
        errors.push(err);
    }
    // the remainder is at least third order
    assert!(errors[0] < errors[1] / 7.0, "{errors:?}");
}
