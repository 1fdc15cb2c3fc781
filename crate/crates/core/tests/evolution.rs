use nls_core::diagnostics::{energy, kinetic, mass, momentum};
use nls_core::evolution::{apply_symmetry, evolve, Controls, Stepper, SymmetryElement};
use nls_core::ground_state::w_profile;
use nls_core::io::edge_window;
use nls_core::{Field, Grid};
use num_complex::Complex64;

fn hdot_distance(a: &Field, b: &Field) -> f64 {
    (kinetic(&a.sub(b).unwrap()) / kinetic(b)).sqrt()
}

fn run_fixed(u0: &Field, dt: f64, steps: usize) -> Field {
    let stepper = Stepper::new(u0.grid, -1.0);
    let mut v = u0.values.clone();
    for _ in 0..steps {
        stepper.step_values(&mut v, dt);
    }
    Field::new(u0.grid, v).unwrap()
}

#[test]
fn ground_state_is_stationary() {
    // the tapered far field is not stationary; r_max = 120 keeps its share
    // of ‖∇W‖₂ small enough (the bulk error is ~1e-5)
    let (d, r_max) = (5, 120.0);
    let g = Grid::radial(d, 8192, r_max).unwrap();
    let w = Field::from_radial_fn(g, |r| w_profile(d, r) * edge_window(r, r_max));
    let ctl = Controls { t_max: 0.5, dt0: 1e-3, stride: 100, frequency_eta: None, ..Controls::default() };
    let rec = evolve(&w, -1.0, &ctl).unwrap();
    // the phase e^{0·it} is trivial: W solves ΔW = −W^{7/3}
    let dist = hdot_distance(&rec.final_field, &w);
    assert!(dist <= 1e-3, "‖u(0.5) − W‖ = {dist}");
}

#[test]
fn strang_splitting_is_second_order() {
    let g = Grid::cartesian(3, 32, 8.0).unwrap();
    let u0 = Field::from_fn(g, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp(), 0.0));
    let t = 0.2;
    let dt = 0.005;
    let steps = (t / dt) as usize;
    let coarse = run_fixed(&u0, dt, steps);
    let half = run_fixed(&u0, dt / 2.0, 2 * steps);
    // reference at a quarter of the finer step
    let reference = run_fixed(&u0, dt / 8.0, 8 * steps);
    let e1 = hdot_distance(&coarse, &reference);
    let e2 = hdot_distance(&half, &reference);
    let ratio = e1 / e2;
    assert!((3.5..=4.5).contains(&ratio), "error ratio {ratio} ({e1:.3e} / {e2:.3e})");
}

#[test]
fn flow_commutes_with_scaling() {
    let (d, n, r_max, lambda) = (5, 1024, 20.0, 2.0);
    let g1 = Grid::radial(d, n, r_max).unwrap();
    let g2 = Grid::radial(d, n, lambda * r_max).unwrap();
    let u0 = Field::from_radial_fn(g1, |r| 2.0 * (-r * r / 2.0).exp());
    let s = SymmetryElement::scaling(lambda).unwrap();
    let ctl = Controls { t_max: 0.1, dt0: 1e-3, stride: 1000, frequency_eta: None, ..Controls::default() };
    let ctl2 = Controls { t_max: 0.1 * lambda * lambda, dt0: 1e-3 * lambda * lambda, ..ctl.clone() };
    let a = evolve(&u0, -1.0, &ctl).unwrap().final_field;
    let b = evolve(&apply_symmetry(&u0, &s, &g2).unwrap(), -1.0, &ctl2).unwrap().final_field;
    let a_scaled = apply_symmetry(&a, &s, &g2).unwrap();
    let dist = hdot_distance(&b, &a_scaled);
    assert!(dist <= 1e-4, "{dist}");
}

#[test]
fn symmetries_preserve_energy() {
    let g = Grid::cartesian(3, 64, 12.0).unwrap();
    let f = Field::from_fn(g, |x| {
        let r2 = x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2];
        Complex64::from_polar((-r2 / 2.0).exp(), 0.3 * x[0])
    });
    let e0 = energy(&f, -1.0);
    let k0 = kinetic(&f);
    let g1 = SymmetryElement::new(0.7, [1.0, -0.5, 0.25], 1.5).unwrap();
    let gf = apply_symmetry(&f, &g1, &g).unwrap();
    assert!((energy(&gf, -1.0) - e0).abs() / e0.abs() < 1e-6);
    let g2 = SymmetryElement::scaling(2.0).unwrap();
    let k2 = kinetic(&apply_symmetry(&f, &g2, &g).unwrap());
    assert!((k2 - k0).abs() / k0 < 1e-6, "{k2} vs {k0}");
}

#[test]
fn cartesian_conservation_laws() {
    let g = Grid::cartesian(3, 64, 10.0).unwrap();
    let u0 = Field::from_fn(g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Complex64::from_polar(0.8 * (-r2).exp(), 0.5 * x[0] - 0.25 * x[2])
    });
    let ctl = Controls { t_max: 1.0, dt0: 2e-3, stride: 50, frequency_eta: None, ..Controls::default() };
    let rec = evolve(&u0, -1.0, &ctl).unwrap();
    let (m0, e0, p0) = (mass(&u0), energy(&u0, -1.0), momentum(&u0));
    let scale = kinetic(&u0).sqrt() * m0.sqrt();
    for row in &rec.rows {
        assert!((row.mass - m0).abs() / m0 <= 1e-6);
        assert!((row.energy - e0).abs() / e0.abs() <= 1e-5, "t={} dE={}", row.t, (row.energy - e0) / e0);
        for k in 0..3 {
            assert!((row.momentum[k] - p0[k]).abs() <= 1e-6 * scale);
        }
    }
}
