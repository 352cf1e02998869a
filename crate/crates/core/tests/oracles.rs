mod common;

use common::{dirichlet_filter, erf_taylor, simpson, Analytic, REFINED};
use momcut::cutoff::{build_common_cutoff_equation, solve_unique_root};
use momcut::generators::{
    erf, scale_separated_pdf, spectrum_amplitudes, truncated_normal, NormalStream, SpectrumSpec,
    TruncatedNormalSpec,
};
use momcut::moments::{
    compute_moments, empirical_moments, moment_gap, multi_moment_gap, multi_moments,
    remainder_bounded, remainder_ibp, sup_norm_abs_continuous, total_variation, RemainderStrategy,
};
use momcut::spectral::{
    char_samples, distance, distance_2d, highpass, lowpass, lowpass2d, multi_bound_value,
};
use momcut::{GridFunction1D, GridFunction2D, MultiIndex, StrategyTag};

fn normal(mu: f64, sigma: f64, n: usize) -> GridFunction1D {
    truncated_normal(TruncatedNormalSpec::new(mu, sigma).unwrap(), n).unwrap()
}

#[test]
fn truncated_normal_moments_match_refined_grid() {
    let f = normal(0.4, 0.25, 1001);
    let oracle = Analytic::normal(0.4, 0.25);
    let m = compute_moments(&f, 3).unwrap();
    for k in 0..3 {
        assert!((m.values()[k] - oracle.moment(k as i32)).abs() < 1e-9);
    }
}

#[test]
fn truncated_normal_gap_matches_refined_grid() {
    let (f, g) = (normal(0.4, 0.25, 1001), normal(0.6, 0.25, 1001));
    let (of, og) = (Analytic::normal(0.4, 0.25), Analytic::normal(0.6, 0.25));
    let mf = compute_moments(&f, 3).unwrap();
    let mg = compute_moments(&g, 3).unwrap();
    let gap = moment_gap(&mf, &mg, &RemainderStrategy::Holder).unwrap();
    for k in 0..3 {
        let expected = (of.moment(k as i32) - og.moment(k as i32)).abs();
        assert!((gap.gaps()[k] - expected).abs() < 1e-9);
    }
    assert!((gap.remainder() - (of.moment(2) + og.moment(2))).abs() < 1e-9);
    // Mirror images about x = 1/2.
    assert!((mf.values()[1] + mg.values()[1] - 1.0).abs() < 1e-8);
}

#[test]
fn bounded_remainder_dominates_true_moment() {
    let f = normal(0.5, 0.2, 1001);
    let sup = f.values().iter().copied().fold(0.0, f64::max);
    let m = compute_moments(&f, 3).unwrap();
    let bound = remainder_bounded(&m, sup, 3, 1).unwrap();
    assert!(bound >= Analytic::normal(0.5, 0.2).moment(3));
}

#[test]
fn abs_continuous_sup_dominates_grid_max() {
    let f = normal(0.5, 0.2, 1001);
    let anchor = f.evaluate(0.5).unwrap();
    let bound = sup_norm_abs_continuous(anchor, total_variation(f.values())).unwrap();
    let max = f.values().iter().copied().fold(0.0, f64::max);
    assert!(bound >= max);
}

#[test]
fn ibp_remainder_dominates_true_moment() {
    let f = normal(0.4, 0.25, 1001);
    let strategy = RemainderStrategy::estimate_from_grid(StrategyTag::Ibp, &f).unwrap();
    let RemainderStrategy::Ibp {
        f_at_1,
        fprime_at_1,
        sup_f2,
    } = strategy
    else {
        panic!("wrong strategy");
    };
    let bound = remainder_ibp(f_at_1, fprime_at_1, sup_f2, 3).unwrap();
    assert!(bound >= Analytic::normal(0.4, 0.25).moment(3));
}

#[test]
fn product_moments_separate() {
    let (a, b) = (normal(0.4, 0.25, 201), normal(0.6, 0.25, 201));
    let p = GridFunction2D::product(&a, &b).unwrap();
    let mm = multi_moments(&p, 3).unwrap();
    let ma = compute_moments(&a, 3).unwrap();
    let mb = compute_moments(&b, 3).unwrap();
    for (alpha, v) in mm.entries() {
        let expected = ma.values()[alpha.0[0]] * mb.values()[alpha.0[1]];
        assert!((v - expected).abs() < 1e-8, "{alpha}: {v} vs {expected}");
    }
    assert!((mm.get(&MultiIndex(vec![0, 0])).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn product_gaps_match_separable_oracle() {
    let specs = [(0.4, 0.25), (0.6, 0.25), (0.5, 0.2), (0.5, 0.3)];
    let oracle: Vec<Analytic> = specs.iter().map(|&(m, s)| Analytic::normal(m, s)).collect();
    let grids: Vec<GridFunction1D> = specs.iter().map(|&(m, s)| normal(m, s, 201)).collect();
    let f = GridFunction2D::product(&grids[0], &grids[1]).unwrap();
    let g = GridFunction2D::product(&grids[2], &grids[3]).unwrap();
    let gap = multi_moment_gap(
        &multi_moments(&f, 3).unwrap(),
        &multi_moments(&g, 3).unwrap(),
    )
    .unwrap();
    let mom = |i: usize, k: usize| oracle[i].moment(k as i32);
    for (alpha, m) in gap.gaps() {
        let (p, q) = (alpha.0[0], alpha.0[1]);
        let expected = (mom(0, p) * mom(1, q) - mom(2, p) * mom(3, q)).abs();
        assert!((m - expected).abs() < 1e-7);
    }
    for (alpha, r) in gap.remainders() {
        let best = |a: usize, b: usize| {
            alpha
                .reductions()
                .map(|beta| mom(a, beta.0[0]) * mom(b, beta.0[1]))
                .fold(f64::INFINITY, f64::min)
        };
        assert!((r - (best(0, 1) + best(2, 3))).abs() < 1e-7);
    }
}

#[test]
fn characteristic_magnitude_decays_for_narrow_normal() {
    let f = normal(0.5, 0.2, 1001);
    let cs = char_samples(&f, 10.0, 201).unwrap();
    let mags: Vec<f64> = cs.values().iter().map(|z| z.norm()).collect();
    assert!(mags.windows(2).all(|w| w[1] < w[0]));
    // Refined-grid transform at a few nodes.
    let oracle = Analytic::normal(0.5, 0.2);
    for (j, k) in cs.nodes().iter().enumerate().step_by(40) {
        let xs = common::grid(REFINED);
        let re: Vec<f64> = xs.iter().map(|&x| oracle.eval(x) * (k * x).cos()).collect();
        let im: Vec<f64> = xs.iter().map(|&x| oracle.eval(x) * (k * x).sin()).collect();
        let z = cs.values()[j];
        assert!((z.re - simpson(&re, 0.0, 1.0)).abs() < 1e-9);
        assert!((z.im - simpson(&im, 0.0, 1.0)).abs() < 1e-9);
    }
}

#[test]
fn uniform_recovered_at_large_cutoff() {
    let u = GridFunction1D::uniform(1001).unwrap();
    let low = lowpass(&u, 500.0).unwrap();
    assert!(distance(&u, &low).unwrap() <= 0.01);
    // Closed-form k integral on a refined y grid.
    let oracle: Vec<f64> = u
        .nodes()
        .map(|x| dirichlet_filter(|_| 1.0, 500.0, x, REFINED))
        .collect();
    let diff: Vec<f64> = low
        .values()
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .collect();
    assert!(simpson(&diff, 0.0, 1.0) < 2e-3);
}

#[test]
fn highpass_of_smooth_normal_is_small_at_large_cutoff() {
    let f = normal(0.4, 0.25, 1001);
    let high = highpass(&f, 500.0).unwrap();
    let abs: Vec<f64> = high.values().iter().map(|v| v.abs()).collect();
    assert!(simpson(&abs, 0.0, 1.0) <= 0.01);
}

#[test]
fn uniform_highpass_rings_only_near_edges() {
    let u = GridFunction1D::uniform(1001).unwrap();
    let mut previous = f64::INFINITY;
    for m in [10.0, 20.0, 40.0] {
        let k = 2.0 * std::f64::consts::PI * m;
        let high = highpass(&u, k).unwrap();
        let interior = high.values()[200..=800]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        let edge = high.values()[..20]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        assert!(interior < 0.05, "interior ringing {interior} at m = {m}");
        assert!(edge > 5.0 * interior);
        assert!(interior < previous);
        previous = interior;
        let x = 0.5;
        let oracle = 1.0 - dirichlet_filter(|_| 1.0, k, x, REFINED);
        assert!((high.values()[500] - oracle).abs() < 1e-4);
    }
}

#[test]
fn erf_matches_taylor_series() {
    assert!((erf(1.0) - erf_taylor(1.0)).abs() < 1e-14);
    assert!((erf(1.0) - 0.8427007929).abs() < 1e-10);
    for x in [0.05, 0.3, 0.8, 1.5, 2.2, 2.9] {
        assert!((erf(x) - erf_taylor(x)).abs() < 1e-12, "x = {x}");
    }
    // Branch beyond 3 against the series at the limit of its accuracy.
    assert!((erf(3.2) - erf_taylor(3.2)).abs() < 1e-11);
}

#[test]
fn normalization_constant_matches_erf_formula() {
    let spec = TruncatedNormalSpec::new(0.5, 0.2).unwrap();
    let f = truncated_normal(spec, 1001).unwrap();
    let peak_raw = 1.0; // exp(0) at x = 1/2
    let quadrature_nf = peak_raw / f.values()[500];
    assert!((quadrature_nf - spec.normalization()).abs() < 1e-10);
    let erf_nf = 0.2
        * (std::f64::consts::PI / 2.0).sqrt()
        * (erf_taylor(0.5 / (2f64.sqrt() * 0.2)) - erf_taylor(-0.5 / (2f64.sqrt() * 0.2)));
    assert!((spec.normalization() - erf_nf).abs() < 1e-12);
}

#[test]
fn scale_separated_mode_profile() {
    let spec = SpectrumSpec {
        seed: 1,
        num_modes: 64,
        zero_band: Some((17, 48)),
        margin: 0.05,
    };
    let f = scale_separated_pdf(&spec, 1001).unwrap();
    assert!(f.values().iter().all(|&v| v > 0.0));
    assert!((f.mass() - 1.0).abs() < 1e-9);
    let xs = common::grid(1001);
    let projections: Vec<f64> = (1..=64)
        .map(|j| {
            let v: Vec<f64> = xs
                .iter()
                .zip(f.values())
                .map(|(&x, fx)| 2.0 * fx * (2.0 * std::f64::consts::PI * j as f64 * x).sin())
                .collect();
            simpson(&v, 0.0, 1.0)
        })
        .collect();
    for (j, p) in projections.iter().enumerate() {
        if (16..48).contains(&j) {
            assert!(p.abs() < 1e-6, "mode {} = {p}", j + 1);
        }
    }
    let kept: Vec<f64> = projections[..16]
        .iter()
        .chain(&projections[48..])
        .map(|p| p.abs())
        .collect();
    assert!(kept.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    // Projections reproduce the scaled amplitudes.
    let amps = spectrum_amplitudes(&spec).unwrap();
    let scale = projections[0] / amps[0];
    for (p, a) in projections.iter().zip(&amps) {
        assert!((p - scale * a).abs() < 1e-9);
    }
}

#[test]
fn scale_separated_is_deterministic() {
    let spec = SpectrumSpec {
        seed: 42,
        num_modes: 32,
        zero_band: Some((9, 24)),
        margin: 0.05,
    };
    let a = scale_separated_pdf(&spec, 1001).unwrap();
    let b = scale_separated_pdf(&spec, 1001).unwrap();
    assert_eq!(
        a.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    let other = scale_separated_pdf(&SpectrumSpec { seed: 43, ..spec }, 1001).unwrap();
    assert_ne!(a, other);
}

#[test]
fn empirical_uniform_moments_within_standard_errors() {
    let mut stream = NormalStream::new(2024);
    let n = 100_000;
    let samples: Vec<f64> = (0..n).map(|_| stream.next_uniform()).collect();
    let m = empirical_moments(&samples, 3).unwrap();
    assert_eq!(m.values()[0], 1.0);
    for k in 1..3 {
        let exact = 1.0 / (k + 1) as f64;
        let var = 1.0 / (2 * k + 1) as f64 - exact * exact;
        let se = (var / n as f64).sqrt();
        assert!((m.values()[k] - exact).abs() < 3.0 * se, "k = {k}");
    }
}

#[test]
fn common_cutoff_for_identical_uniform_products() {
    let u = GridFunction1D::uniform(101).unwrap();
    let p = GridFunction2D::product(&u, &u).unwrap();
    let m = multi_moments(&p, 1).unwrap();
    let gap = multi_moment_gap(&m, &m).unwrap();
    let poly = build_common_cutoff_equation(&gap, 0.1, 2).unwrap();
    assert_eq!(poly.degree(), 3);
    let kappa = solve_unique_root(&poly).value().unwrap();
    let expected = (0.1 * std::f64::consts::PI.powi(2) / 2.0).cbrt();
    assert!((kappa - expected).abs() < 1e-9);
}

#[test]
fn common_cutoff_satisfies_direct_bound() {
    let specs = [(0.4, 0.25), (0.6, 0.25), (0.5, 0.2), (0.5, 0.3)];
    let grids: Vec<GridFunction1D> = specs.iter().map(|&(m, s)| normal(m, s, 201)).collect();
    let f = GridFunction2D::product(&grids[0], &grids[1]).unwrap();
    let g = GridFunction2D::product(&grids[2], &grids[3]).unwrap();
    let gap = multi_moment_gap(
        &multi_moments(&f, 3).unwrap(),
        &multi_moments(&g, 3).unwrap(),
    )
    .unwrap();
    let poly = build_common_cutoff_equation(&gap, 0.1, 2).unwrap();
    let kappa = solve_unique_root(&poly).value().unwrap();
    // Oracle: the multivariate bound summed term by term.
    let mut sum = 0.0;
    for (alpha, c) in gap.gaps().iter().chain(gap.remainders()) {
        let mut term = *c;
        for &a in &alpha.0 {
            let fact: f64 = (1..=a + 1).map(|v| v as f64).product();
            term *= kappa.powi(a as i32 + 1) / fact;
        }
        sum += term;
    }
    let direct = sum / std::f64::consts::PI.powi(2);
    assert!((direct - 0.1).abs() < 1e-10);
    assert!((multi_bound_value(&gap, &[kappa, kappa]).unwrap() - 0.1).abs() < 1e-10);

    let fl = lowpass2d(&f, (kappa, kappa)).unwrap();
    let gl = lowpass2d(&g, (kappa, kappa)).unwrap();
    assert!(distance_2d(&fl, &gl).unwrap() <= 0.1 + 5e-3);
}

#[test]
fn product_uniform_recovered_in_two_dimensions() {
    let u = GridFunction1D::uniform(1001).unwrap();
    let p = GridFunction2D::product(&u, &u).unwrap();
    let low = lowpass2d(&p, (500.0, 500.0)).unwrap();
    let diff: Vec<f64> = p
        .values()
        .iter()
        .zip(low.values())
        .map(|(a, b)| a - b)
        .collect();
    let abs: Vec<f64> = diff.iter().map(|d| d.abs()).collect();
    let l1 = {
        let rows: Vec<f64> = abs
            .chunks_exact(1001)
            .map(|r| simpson(r, 0.0, 1.0))
            .collect();
        simpson(&rows, 0.0, 1.0)
    };
    assert!(l1 <= 0.02, "L1 {l1}");
}
