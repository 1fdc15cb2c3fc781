mod common;

use nls_core::ground_state::{delta_margins, ground_state, reference_constants, reference_grid, w_derivative, w_profile};
use nls_core::{Field, Grid};

#[test]
fn oracle_reproduces_closed_form_sphere_areas() {
    let pi = std::f64::consts::PI;
    assert!((common::sphere(3) - 4.0 * pi).abs() < 1e-13);
    assert!((common::sphere(4) - 2.0 * pi * pi).abs() < 1e-12);
    assert!((common::sphere(5) - 8.0 * pi * pi / 3.0).abs() < 1e-12);
}

#[test]
fn complex_step_matches_profile_derivative() {
    for d in 3..=8 {
        for r in [0.0, 0.3, 2.0, 17.0] {
            assert!((common::w_prime(d, r) - w_derivative(d, r)).abs() < 1e-14);
            assert!((common::w(d, r) - w_profile(d, r)).abs() < 1e-15);
        }
    }
}

#[test]
fn reference_constants_match_quadrature_oracle() {
    for d in 3..=6 {
        let (grad, pot) = common::w_norms(d);
        // the oracle itself satisfies the Pohozaev identity
        assert!((grad - pot).abs() / grad < 1e-9, "d={d}: {grad} vs {pot}");
        let c = reference_constants(d).unwrap();
        assert!((c.grad_norm_sq - grad).abs() / grad < 1e-6, "d={d}: {} vs {grad}", c.grad_norm_sq);
        assert!((c.pot_norm - pot).abs() / pot < 1e-6);
        let e = grad / 2.0 - (d as f64 - 2.0) / (2.0 * d as f64) * pot;
        assert!((c.energy - e).abs() / e < 1e-6);
    }
}

#[test]
fn frozen_margins() {
    // bisection oracle on the scaled coercivity function, frozen
    let (d1, d2) = common::margins(5, 0.1);
    assert!((d1 - 0.339_228_288_703_729_6).abs() < 1e-12);
    assert!((d2 - 0.352_675_631_415_414_7).abs() < 1e-12);
    let (l1, l2) = delta_margins(0.1, 5).unwrap();
    assert!((l1 - d1).abs() < 1e-9 && (l2 - d2).abs() < 1e-9, "{l1} {l2}");
}

#[test]
fn blowup_data_satisfies_the_coercivity_gap() {
    // ∫|∇u₀|² − |u₀|^{2*} ≤ −2δ₂/((d−2)C_d^d) ... in units where C_d^{-d} = ‖∇W‖₂²
    let d = 5;
    let c = reference_constants(d).unwrap();
    let k = c.grad_norm_sq;
    let amp: f64 = 1.2;
    let pstar = 10.0 / 3.0;
    let lhs = amp * amp * k - amp.powf(pstar) * c.pot_norm;
    let e = k * (amp * amp / 2.0 - 0.3 * amp.powf(pstar));
    let (_, d2) = delta_margins(1.0 - e / c.energy, d).unwrap();
    let rhs = -2.0 * d2 * k / (d as f64 - 2.0);
    assert!(lhs <= rhs, "{lhs} > {rhs}");
}

#[test]
fn sharp_sobolev_on_the_scaling_family() {
    let d = 5;
    let c = reference_constants(d).unwrap();
    // the far field beyond 60λ of f_λ is that of W beyond 60
    let g = ground_state(d, &Grid::radial(d, 8192, 60.0).unwrap()).unwrap();
    for lambda in [0.5f64, 1.0, 2.0] {
        let grid = Grid::radial(d, 8192, 60.0 * lambda).unwrap();
        let f = Field::from_radial_fn(grid, |r| lambda.powf(-1.5) * w_profile(d, r / lambda));
        let k = nls_core::diagnostics::kinetic(&f) + g.grad_tail;
        let p = nls_core::diagnostics::potential(&f) + g.pot_tail;
        let ratio = p.powf(0.3) / (c.sharp_constant * k.sqrt());
        assert!(ratio > 0.999 && ratio <= 1.0 + 1e-6, "λ={lambda}: {ratio}");
        assert!((k - c.grad_norm_sq).abs() / k < 1e-3);
    }
    // a Gaussian is strictly inside the inequality
    let grid = reference_grid(d);
    let f = Field::from_radial_fn(grid, |r| (-r * r).exp());
    let ratio = nls_core::diagnostics::potential(&f).powf(0.3)
        / (c.sharp_constant * nls_core::diagnostics::kinetic(&f).sqrt());
    assert!(ratio < 0.999);
}

#[test]
fn coercivity_below_the_threshold() {
    // E(f) ≥ ½(1 − (d−2)/d·0.9^{4/(d−2)})‖∇f‖₂² once ‖∇f‖₂ ≤ 0.9‖∇W‖₂
    let d = 5;
    let grid = Grid::radial(d, 4096, 60.0).unwrap();
    let kw = reference_constants(d).unwrap().grad_norm_sq;
    let c = 0.5 * (1.0 - 0.6 * 0.9f64.powf(4.0 / 3.0));
    for (amp, width) in [(0.5, 1.0), (1.0, 3.0), (0.8, 0.4)] {
        let f = Field::from_radial_fn(grid, |r| amp * (-(r / width).powi(2)).exp());
        let k = nls_core::diagnostics::kinetic(&f);
        if k > 0.81 * kw {
            continue;
        }
        let e = nls_core::diagnostics::energy(&f, -1.0);
        assert!(e >= c * k, "amp={amp} width={width}: E={e} < {}", c * k);
    }
}
