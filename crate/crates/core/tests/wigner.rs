use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use faer::Mat;
use fockstab::fock::{DensityMatrix, HilbertSpace};
use fockstab::wigner::*;
use fockstab::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(d: usize) -> HilbertSpace {
    HilbertSpace::single("c", d).unwrap()
}

/// Normalized Hermite functions `<x|n>` for `x = (c + c^dagger)/sqrt 2`.
fn hermite_functions(d: usize, x: f64) -> Vec<f64> {
    let mut psi = vec![0.0; d];
    psi[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if d > 1 {
        psi[1] = 2f64.sqrt() * x * psi[0];
    }
    for n in 1..d.saturating_sub(1) {
        let nf = n as f64;
        psi[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
    }
    psi
}

/// `W(q,p) = 1/(2 pi) ∫ dy e^{i p y} <q - y/2| rho |q + y/2>` by the trapezoid rule.
fn wigner_by_quadrature(rho: &DensityMatrix, q: f64, p: f64) -> C64 {
    let d = rho.dim();
    let (h, half) = (0.01, 24.0);
    let steps = (2.0 * half / h) as usize;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=steps {
        let y = -half + h * k as f64;
        let left = hermite_functions(d, q - 0.5 * y);
        let right = hermite_functions(d, q + 0.5 * y);
        let mut elem = C64::new(0.0, 0.0);
        for (m, l) in left.iter().enumerate() {
            for (n, r) in right.iter().enumerate() {
                elem += rho.element(m, n) * (l * r);
            }
        }
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        acc += elem * C64::from_polar(w * h, p * y);
    }
    acc / (2.0 * PI)
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let mut a = Mat::<C64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let m = &a * a.adjoint();
    let tr: f64 = (0..d).map(|i| m[(i, i)].re).sum();
    let m = Mat::from_fn(d, d, |i, j| m[(i, j)] / tr);
    DensityMatrix::new(&space(d), m).unwrap()
}

#[test]
fn kernel_sum_matches_defining_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 2..=4 {
        let rho = random_state(&mut rng, d);
        for (q, p) in [(0.0, 0.0), (0.7, -0.3), (-1.2, 0.9), (0.1, 1.8)] {
            let reference = wigner_by_quadrature(&rho, q, p);
            let w = wigner_value_complex(&rho, q, p).unwrap();
            assert!(
                (w - reference).norm() < 1e-10,
                "d={d} ({q},{p}): {w} vs {reference}"
            );
            assert!(reference.im.abs() < 1e-12);
        }
    }
}

#[test]
fn coherence_sets_the_displacement_direction() {
    // <c> = 1/2 puts the weight at positive q
    let amp = [C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)];
    let rho = DensityMatrix::pure(&space(2), &amp).unwrap();
    assert!(wigner_value(&rho, 0.8, 0.0).unwrap() > wigner_value(&rho, -0.8, 0.0).unwrap());
    let amp = [C64::new(0.5f64.sqrt(), 0.0), C64::new(0.0, 0.5f64.sqrt())];
    let rho = DensityMatrix::pure(&space(2), &amp).unwrap();
    // <c> = i/2 puts it at positive p
    assert!(wigner_value(&rho, 0.0, 0.8).unwrap() > wigner_value(&rho, 0.0, -0.8).unwrap());
}

#[test]
fn diagonal_states_equal_fock_mixtures() {
    let probs = [0.1, 0.55, 0.2, 0.1, 0.05];
    let rho = DensityMatrix::diagonal(&space(5), &probs).unwrap();
    let g = wigner_grid(&rho, &GridSpec::square(5.0, 81)).unwrap();
    for (iq, &q) in g.q_axis.iter().enumerate() {
        for (ip, &p) in g.p_axis.iter().enumerate() {
            let expected: f64 = probs
                .iter()
                .enumerate()
                .map(|(n, pn)| pn * wigner_fock(n, q, p).unwrap())
                .sum();
            assert!((g.get(iq, ip) - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn fock_one_closed_form() {
    for (q, p) in [(0.0, 0.0), (0.3, 0.2), (1.0, -1.5)] {
        let r2: f64 = q * q + p * p;
        let w1 = (2.0 * r2 - 1.0) * (-r2).exp() / PI;
        assert_abs_diff_eq!(wigner_fock(1, q, p).unwrap(), w1, epsilon = 1e-15);
    }
    for k in 0..12 {
        let th = 2.0 * PI * k as f64 / 12.0;
        let r = 0.5f64.sqrt();
        assert!(wigner_fock(1, r * th.cos(), r * th.sin()).unwrap().abs() < 1e-12);
    }
}

#[test]
fn normalization_and_refinement() {
    let rho = DensityMatrix::diagonal(&space(4), &[0.2, 0.5, 0.2, 0.1]).unwrap();
    let g = wigner_grid(&rho, &GridSpec::default()).unwrap();
    assert!(g.normalization_error() < 1e-3);
    let mut errs = Vec::new();
    for points in [11, 21, 41] {
        let spec = GridSpec {
            norm_tol: f64::INFINITY,
            ..GridSpec::square(5.0, points)
        };
        errs.push(wigner_grid(&rho, &spec).unwrap().normalization_error());
    }
    // below ~1e-8 the error is set by the finite domain, not the spacing
    for w in errs.windows(2) {
        assert!(w[1] <= w[0] / 4.0 || w[1] < 1e-8, "{errs:?}");
    }
}

#[test]
fn negative_volume_of_single_phonon() {
    let g = wigner_grid(
        &DensityMatrix::fock(&space(2), &[1]).unwrap(),
        &GridSpec::default(),
    )
    .unwrap();
    let m = negativity_metrics(&g);
    assert_abs_diff_eq!(m.min_value, -1.0 / PI, epsilon = 1e-12);
    assert_eq!(m.min_location, (0.0, 0.0));
    // radial integral of max(-W1, 0) by Simpson's rule
    let n = 2000;
    let rmax = 0.5f64.sqrt();
    let h = rmax / n as f64;
    let f = |r: f64| 2.0 * PI * r * ((1.0 - 2.0 * r * r) * (-r * r).exp() / PI);
    let mut radial = f(0.0) + f(rmax);
    for k in 1..n {
        radial += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    radial *= h / 3.0;
    assert_abs_diff_eq!(radial, 2.0 / 1f64.exp().sqrt() - 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(m.negative_volume, radial, epsilon = 2e-4);
    let vac = negativity_metrics(
        &wigner_grid(
            &DensityMatrix::fock(&space(2), &[0]).unwrap(),
            &GridSpec::default(),
        )
        .unwrap(),
    );
    assert!(vac.min_value >= 0.0);
    assert_eq!(vac.negative_volume, 0.0);
}

#[test]
fn rotational_symmetry() {
    let rho =
        DensityMatrix::diagonal(&space(8), &[0.05, 0.5, 0.2, 0.1, 0.05, 0.05, 0.03, 0.02]).unwrap();
    let res = symmetry_residual(&wigner_grid(&rho, &GridSpec::default()).unwrap()).unwrap();
    assert!(res <= 1e-3, "{res:e}");
    let amp = [C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)];
    let sup = DensityMatrix::pure(&space(2), &amp).unwrap();
    let g = wigner_grid(&sup, &GridSpec::default()).unwrap();
    let max_abs = g.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(symmetry_residual(&g).unwrap() > 0.3 * max_abs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bounded_and_real(seed in 0u64..10_000, d in 2usize..=10, q in -3.0f64..3.0, p in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(&mut rng, d);
        let w = wigner_value_complex(&rho, q, p).unwrap();
        prop_assert!(w.re.abs() <= 1.0 / PI + 1e-12);
        prop_assert!(w.im.abs() < 1e-12);
    }
}
