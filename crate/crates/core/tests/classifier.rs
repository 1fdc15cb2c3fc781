use nls_core::classifier::{classify_with, predicates, sweep, ClassifyParams, Outcome};
use nls_core::evolution::Controls;
use nls_core::ground_state::w_profile;
use nls_core::io::edge_window;
use nls_core::{Field, Grid};

fn scaled_w(c: f64) -> Field {
    let (d, r_max) = (5, 60.0);
    let g = Grid::radial(d, 2048, r_max).unwrap();
    Field::from_radial_fn(g, |r| c * w_profile(d, r) * edge_window(r, r_max))
}

#[test]
fn trapping_margin_along_amplitude_families() {
    let controls = Controls { t_max: 2.0, dt0: 2e-3, stride: 20, frequency_eta: None, ..Controls::default() };
    let mut margins = Vec::new();
    for c in [0.2, 0.3, 0.4] {
        let (v, _) = classify_with(&scaled_w(c), -1.0, &controls, &ClassifyParams::default()).unwrap();
        assert!(v.predicates.trapping.holds);
        // a trapped run must never be declared a blowup
        assert_ne!(v.outcome, Outcome::FiniteTimeBlowup);
        margins.push(-v.trapping_violation.unwrap());
    }
    // c·W attains the sharp Sobolev bound, so the margin vanishes at t = 0 for
    // every c; only truncation-level differences remain
    let tol = ClassifyParams::default().trap_tol;
    assert!(margins.windows(2).all(|w| w[0] >= w[1] - tol), "{margins:?}");
    assert!(margins.iter().all(|&m| m > -tol));

    // away from the extremal family the margin is positive; at t = 0 it behaves
    // like 0.6 c^{10/3} (C_d^{10/3} K(g)^{5/3} − P(g)) for small c, so it grows with c
    let g = Grid::radial(5, 2048, 60.0).unwrap();
    let gauss = Field::from_radial_fn(g, |r| (-r * r / 4.0).exp() * edge_window(r, 60.0));
    let mut strict = Vec::new();
    for c in [0.5, 1.0, 1.5] {
        let (v, _) = classify_with(&gauss.map(|z| z * c), -1.0, &controls, &ClassifyParams::default()).unwrap();
        assert!(v.predicates.trapping.holds);
        strict.push(-v.trapping_violation.unwrap());
    }
    assert!(strict.windows(2).all(|w| w[0] < w[1]) && strict[0] > 0.0, "{strict:?}");
}

#[test]
fn verdicts_are_deterministic() {
    let controls = Controls { t_max: 0.5, dt0: 2e-3, stride: 20, frequency_eta: None, ..Controls::default() };
    let a = classify_with(&scaled_w(1.1), -1.0, &controls, &ClassifyParams::default()).unwrap().0;
    let b = classify_with(&scaled_w(1.1), -1.0, &controls, &ClassifyParams::default()).unwrap().0;
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    let p = predicates(&scaled_w(1.1), -1.0).unwrap();
    assert!(p.blowup.holds && !p.trapping.holds);
}

#[test]
fn sweep_brackets_the_gaussian_threshold() {
    // d = 3 Gaussians on a box wide enough that the dispersed wave never
    // reaches the boundary before t_max
    let g = Grid::radial(3, 2048, 200.0).unwrap();
    let f0 = Field::from_radial_fn(g, |r| (-r * r).exp());
    // near-threshold amplitudes linger for a long time, so the bracket is kept
    // wide enough for a single midpoint
    let controls = Controls { t_max: 30.0, dt0: 5e-2, stride: 50, frequency_eta: None, ..Controls::default() };
    let res = sweep(&f0, 1.5, 4.0, 1.5, -1.0, &controls).unwrap();
    assert_eq!(&res.evaluations[..2], &[(1.5, Outcome::GlobalScattering), (4.0, Outcome::FiniteTimeBlowup)]);
    assert_eq!(res.evaluations.len(), 3, "{:?}", res.evaluations);
    // an Undecided midpoint ends the bisection without convergence
    assert_eq!(res.converged, res.evaluations[2].1 != Outcome::Undecided);
    let (lo, hi) = (res.c_scatter.unwrap(), res.c_blowup.unwrap());
    assert!(lo < hi);

    // endpoints on the same side: no bisection
    let same = sweep(&f0, 0.5, 1.0, 0.1, -1.0, &controls).unwrap();
    assert!(!same.converged && same.evaluations.len() == 2 && same.c_blowup.is_none());
    assert!(sweep(&f0, 1.0, 0.5, 0.1, -1.0, &controls).is_err());
}
