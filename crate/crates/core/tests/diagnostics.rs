mod common;

use nls_core::diagnostics::inequalities::{bilinear_pair_ratios, keraani_ratios, InequalityParams};
use nls_core::diagnostics::{
    concentration, dyadic_lp_table, frequency_scale, kinetic, oscillation, spreading, truncated_virial,
    virial_second_derivative, NTrace,
};
use nls_core::evolution::{apply_symmetry, evolve, Controls, Stepper, SymmetryElement};
use nls_core::ground_state::w_profile;
use nls_core::io::edge_window;
use nls_core::{Field, Grid};
use num_complex::Complex64;

#[test]
fn free_gaussian_scattering_size_matches_closed_form() {
    // ε e^{-r²} barely feels the nonlinearity; |e^{itΔ}e^{-r²}|^{10} integrates to
    // (π/10)^{3/2} (1+16t²)^{-6} in d = 3
    let eps: f64 = 1e-3;
    let g = Grid::radial(3, 2048, 30.0).unwrap();
    let u0 = Field::from_radial_fn(g, |r| eps * (-r * r).exp());
    let ctl = Controls { t_max: 1.0, dt0: 1e-3, stride: 100, frequency_eta: None, ..Controls::default() };
    let rec = evolve(&u0, 1.0, &ctl).unwrap();
    let s = rec.rows.last().unwrap().scattering / eps.powi(10);
    let exact = (std::f64::consts::PI / 10.0).powf(1.5) * common::romberg(&|t| (1.0 + 16.0 * t * t).powi(-6), 0.0, 1.0, 1e-12);
    assert!((s - exact).abs() / exact < 1e-3, "{s} vs {exact}");
}

#[test]
fn virial_identities_on_blowup_data() {
    let (d, r_max) = (5, 60.0);
    let g = Grid::radial(d, 4096, r_max).unwrap();
    let u0 = Field::from_radial_fn(g, |r| 1.2 * w_profile(d, r) * edge_window(r, r_max));
    let dd = virial_second_derivative(&u0, -1.0);
    let k = kinetic(&u0);
    let p = nls_core::diagnostics::potential(&u0);
    assert!(dd < 0.0);
    assert!((dd - 8.0 * (k - p)).abs() / dd.abs() < 1e-2, "{dd} vs {}", 8.0 * (k - p));

    // analytic ∂_t V_R, ∂_tt V_R against differences along the flow
    let big_r = 5.0;
    let h = 1e-3;
    let stepper = Stepper::new(g, -1.0);
    let mut v = u0.values.clone();
    let mut triples = Vec::new();
    for _ in 0..3 {
        triples.push(truncated_virial(&Field::new(g, v.clone()).unwrap(), big_r, -1.0).unwrap());
        for _ in 0..10 {
            stepper.step_values(&mut v, h / 10.0);
        }
    }
    let fd2 = (triples[0].v - 2.0 * triples[1].v + triples[2].v) / (h * h);
    let fd1 = (triples[2].v - triples[0].v) / (2.0 * h);
    assert!((fd2 - triples[1].ddv).abs() / triples[1].ddv.abs() < 0.02, "{fd2} vs {}", triples[1].ddv);
    assert!((fd1 - triples[1].dv).abs() / triples[1].dv.abs() < 0.02, "{fd1} vs {}", triples[1].dv);
}

#[test]
fn frequency_scale_is_equivariant_and_resolved() {
    let d = 5;
    let g = Grid::radial(d, 4096, 60.0).unwrap();
    let w = Field::from_radial_fn(g, |r| w_profile(d, r) * edge_window(r, 60.0));
    let n1 = frequency_scale(&w, 0.1).unwrap();
    let g2 = Grid::radial(d, 8192, 60.0).unwrap();
    let n2 = frequency_scale(&Field::from_radial_fn(g2, |r| w_profile(d, r) * edge_window(r, 60.0)), 0.1).unwrap();
    assert!(n1 > 0.0 && (n1 - n2).abs() / n2 < 0.02, "{n1} vs {n2}");

    let gc = Grid::cartesian(3, 64, 12.0).unwrap();
    let f = Field::from_fn(gc, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp(), 0.0));
    let scaled = apply_symmetry(&f, &SymmetryElement::scaling(2.0).unwrap(), &gc).unwrap();
    let ratio = frequency_scale(&f, 0.1).unwrap() / frequency_scale(&scaled, 0.1).unwrap();
    assert!((ratio - 2.0).abs() / 2.0 < 0.05, "{ratio}");
}

#[test]
fn concentration_of_two_separated_bumps() {
    let g = Grid::cartesian(3, 64, 12.0).unwrap();
    let w = 0.5;
    let bump = |x: [f64; 3], c: f64| (-((x[0] - c).powi(2) + x[1] * x[1] + x[2] * x[2]) / (w * w)).exp();
    let f = Field::from_fn(g, |x| Complex64::new(bump(x, -5.0) + bump(x, 5.0), 0.0));
    let k = kinetic(&f);
    let c = concentration(&f, 2.0 * w).unwrap();
    assert!((c / (0.5 * k) - 1.0).abs() < 0.05, "{} of half", c / (0.5 * k));
    assert!(concentration(&f, 30.0).unwrap() >= 0.999 * k);
}

#[test]
fn trace_statistics_match_brute_force() {
    let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let values: Vec<f64> = times.iter().map(|&t| t.max(1.0)).collect();
    let trace = NTrace::new(times.clone(), values.clone()).unwrap();
    for big_t in [0.5, 2.0, 10.0] {
        let mut best = f64::INFINITY;
        for i in 0..times.len() {
            let half = big_t / (values[i] * values[i]);
            let window: Vec<f64> =
                (0..times.len()).filter(|&j| (times[j] - times[i]).abs() <= half).map(|j| values[j]).collect();
            let hi = window.iter().cloned().fold(0.0, f64::max);
            let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
            best = best.min(hi / lo);
        }
        assert!((oscillation(&trace, big_t).unwrap() - best).abs() < 1e-12);
    }
    for i in [0, 20, 37, 200] {
        let n0 = values[i];
        let past = values[..=i].iter().cloned().fold(0.0, f64::max);
        let future = values[i..].iter().cloned().fold(0.0, f64::max);
        assert!((spreading(&trace, times[i]).unwrap() - (n0 / past + n0 / future)).abs() < 1e-12);
    }
}

#[test]
fn ground_state_lp_table_is_summable() {
    let d = 5;
    let g = Grid::radial(d, 4096, 60.0).unwrap();
    let w = Field::from_radial_fn(g, |r| w_profile(d, r) * edge_window(r, 60.0));
    let table = dyadic_lp_table(&w, &[3.0], None).unwrap();
    let low: f64 = table.frequencies.iter().zip(&table.values).filter(|(n, _)| **n <= 1.0).map(|(_, v)| v[0]).sum();
    assert!(low.is_finite() && low > 0.0);
    assert!(table.values.iter().all(|v| v[0].is_finite()));
}

fn cartesian_gaussian(width: f64) -> Field {
    let g = Grid::cartesian(3, 64, 12.0).unwrap();
    Field::from_fn(g, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (width * width)).exp(), 0.0))
}

#[test]
fn keraani_ratio_spread_is_bounded() {
    let mut out = Vec::new();
    keraani_ratios(&cartesian_gaussian(1.0), &InequalityParams::default(), &mut out).unwrap();
    let ratios: Vec<f64> = out.iter().map(|c| c.ratio).collect();
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert_eq!(ratios.len(), 9);
    assert!(lo > 0.0 && hi / lo < 10.0, "spread {}", hi / lo);
}

#[test]
fn bilinear_ratio_tracks_inverse_high_frequency() {
    // with N^{-1} already on the right-hand side, doubling N leaves the ratio flat
    let f = cartesian_gaussian(0.5);
    let r = bilinear_pair_ratios(&f, &[(0.5, 2.0), (0.5, 4.0), (0.5, 8.0)], 1.0, 0.02).unwrap();
    for w in r.windows(2) {
        let q = w[1] / w[0];
        assert!((q - 1.0).abs() <= 0.3, "ratios {r:?}");
    }
}
