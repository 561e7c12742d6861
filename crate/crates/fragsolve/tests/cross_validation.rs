//! Cross-module consistency checks.
//!
//! Each test reaches the same physical quantity through two independent code
//! paths — a closed-form evaluator on one side and the operator calculus,
//! superposition quadrature, conservation law, or snapshot quadrature on the
//! other — and demands agreement to near round-off.  None of the reference
//! values here are hard-coded: every expectation is computed by a second
//! route inside the library itself.

use fragsolve::constant::{
    solve_constant_decay, solve_constant_decay_monodisperse, solve_constant_growth,
};
use fragsolve::grid::adaptive_quadrature;
use fragsolve::linear::solve_linear_monodisperse;
use fragsolve::model::{
    characteristic_maps, derive, pushforward_initial, InitialCondition, Mode, SampledDensity,
    TransformedInitial,
};
use fragsolve::operators::{build_kernel, resolvent_power_dirac_regular, PhiKernel};
use fragsolve::oracle::moment_of_snapshot;
use fragsolve::{DerivedParams, PhysicalParams};

/// Constant-class parameter set (`γ = 1 − α`, `ν = α − 1`) with unit rates.
fn constant_params(alpha: f64, mode: Mode) -> DerivedParams {
    let p = PhysicalParams::new(alpha, alpha - 1.0, 1.0 - alpha, 1.0, 1.0, mode)
        .expect("valid parameters");
    derive(p).expect("derivable parameters")
}

fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    let scale = want.abs().max(1e-300);
    assert!(
        (got - want).abs() <= tol * scale,
        "{what}: got {got}, want {want} (rel err {:.3e})",
        (got - want).abs() / scale
    );
}

/// The weight a point mass in the rescaled frame acquires when pulled back to
/// a physical density: the profile prefactor, the frame exponential, and the
/// coordinate-change Jacobian at the image point.
fn dirac_pullback_weight(d: &DerivedParams, amplitude: f64, xi0: f64, loc: f64, t: f64) -> f64 {
    let (alpha, nu, a) = (d.params.alpha, d.params.nu, d.params.a);
    let prefactor = (a * loc.powf(alpha)).powf(nu / alpha);
    let frame = (-0.5 * d.beta * t * t - xi0 * t).exp();
    let jacobian = a * alpha.abs() * loc.powf(alpha - 1.0);
    prefactor * frame * amplitude / jacobian
}

/// Shrinking point mass, integer kernel order: the rescaled evolution is a
/// resolvent power acting on a point source, and its pullback must reproduce
/// the closed-form snapshot — point location and weight to round-off, the
/// regular tail of fragments to ten digits.
#[test]
fn resolvent_route_matches_closed_form_for_shrinking_point_mass() {
    let d = constant_params(-1.0 / 3.0, Mode::Decay);
    assert_rel(d.m, 2.0, 1e-14, "kernel order");
    let maps = characteristic_maps(&d);
    let x0 = 2.0;

    let (xi0, amplitude) =
        match pushforward_initial(&InitialCondition::Monodisperse { x0 }, &d.params).unwrap() {
            TransformedInitial::Dirac { location, weight } => (location, weight),
            TransformedInitial::Sampled(_) => unreachable!("point mass stays a point mass"),
        };
    let kernel = build_kernel(PhiKernel::ExpPos, d.m).unwrap();

    for t in [0.3, 0.9] {
        let snapshot = solve_constant_decay_monodisperse(&d, x0, t).unwrap();
        let point = snapshot.dirac.expect("mass has not shattered away");

        let loc = maps.x_from_xi(xi0, t).unwrap();
        assert_rel(loc, point.location, 1e-12, "point-mass location");
        let weight = dirac_pullback_weight(&d, amplitude, xi0, loc, t);
        assert_rel(weight, point.weight, 1e-12, "point-mass weight");

        for x in [0.2, 0.6, 1.2, 0.98 * loc] {
            let xi = maps.xi(x, t).unwrap();
            let w_reg = resolvent_power_dirac_regular(amplitude, xi0, t, 2, xi);
            if xi > xi0 {
                // The open-form kernel series must agree with the telescoped sum.
                let w_series = amplitude * t * kernel.eval_f(t * (xi - xi0)).unwrap();
                assert_rel(w_series, w_reg, 1e-12, "kernel series vs telescoped sum");
            }

            let pullback = (d.params.a * x.powf(d.params.alpha)).powf(d.params.nu / d.params.alpha)
                * (-0.5 * d.beta * t * t - xi * t).exp()
                * w_reg;
            assert_rel(
                pullback,
                snapshot.regular_density(x),
                1e-10,
                "fragment tail",
            );
        }

        // Above the surviving point mass both routes must vanish identically.
        let outside = 1.02 * loc;
        assert_eq!(snapshot.regular_density(outside), 0.0);
        let xi_out = maps.xi(outside, t).unwrap();
        assert_eq!(resolvent_power_dirac_regular(amplitude, xi0, t, 2, xi_out), 0.0);
    }
}

/// Shrinking point mass, fractional kernel order: the rescaled evolution is a
/// fractional binomial power, whose kernel is only available as a confluent
/// hypergeometric series.  Its pullback must match the closed form built from
/// the damped Kummer function.
#[test]
fn binomial_kernel_matches_closed_form_for_fractional_order() {
    let d = constant_params(2.0 / 3.0, Mode::Decay);
    assert_rel(d.m, 2.5, 1e-14, "kernel order");
    let maps = characteristic_maps(&d);
    let x0 = 1.5;

    let (xi0, amplitude) =
        match pushforward_initial(&InitialCondition::Monodisperse { x0 }, &d.params).unwrap() {
            TransformedInitial::Dirac { location, weight } => (location, weight),
            TransformedInitial::Sampled(_) => unreachable!("point mass stays a point mass"),
        };
    let kernel = build_kernel(PhiKernel::ExpNeg, d.m).unwrap();

    for t in [0.25, 0.6] {
        let snapshot = solve_constant_decay_monodisperse(&d, x0, t).unwrap();
        let point = snapshot.dirac.expect("mass has not shattered away");

        let loc = maps.x_from_xi(xi0, t).unwrap();
        assert_rel(loc, point.location, 1e-12, "point-mass location");
        let weight = dirac_pullback_weight(&d, amplitude, xi0, loc, t);
        assert_rel(weight, point.weight, 1e-12, "point-mass weight");

        for x in [0.1, 0.4, 0.8, 0.97 * loc] {
            let xi = maps.xi(x, t).unwrap();
            // For a falling profile the fragments sit below the source, so the
            // kernel argument runs from the evaluation point up to the source.
            let w_reg = amplitude * t * kernel.eval_f(t * (xi0 - xi)).unwrap();
            let pullback = (d.params.a * x.powf(d.params.alpha)).powf(d.params.nu / d.params.alpha)
                * (-0.5 * d.beta * t * t - xi * t).exp()
                * w_reg;
            assert_rel(
                pullback,
                snapshot.regular_density(x),
                1e-10,
                "fragment tail",
            );
        }
    }
}

/// The general-data decay solver is linear in the initial condition, so it
/// must equal the superposition of point-mass solutions weighted by the data:
/// a line integral over surviving parents plus the one parent whose shrunken
/// remnant lands exactly on the evaluation point.
#[test]
fn superposition_of_point_masses_reconstructs_sampled_decay() {
    let d = constant_params(2.0 / 3.0, Mode::Decay);
    let (alpha, k) = (d.params.alpha, d.params.k);
    let u0 = SampledDensity::new(vec![0.5, 1.0, 1.5], vec![0.0, 1.0, 0.0]).unwrap();
    let t = 0.35;

    for x in [0.3, 0.8, 1.1] {
        let direct = solve_constant_decay(&d, &u0, x, t).unwrap();

        // Parent whose remnant sits at x: y^α − kαt = x^α.
        let parent = (x.powf(alpha) + k * alpha * t).powf(1.0 / alpha);
        let remnant = solve_constant_decay_monodisperse(&d, parent, t)
            .unwrap()
            .dirac
            .expect("parent above extinction");
        assert_rel(remnant.location, x, 1e-12, "remnant lands on x");
        // δ(x − loc(y)) integrates against u0(y) with density 1/|dloc/dy|.
        let dloc_dy = parent.powf(alpha - 1.0) * x.powf(1.0 - alpha);
        let line_term = u0.eval(parent) * remnant.weight / dloc_dy;

        let fragments = |y: f64| {
            let snapshot = solve_constant_decay_monodisperse(&d, y, t).unwrap();
            u0.eval(y) * snapshot.regular_density(x)
        };
        let lo = parent.max(0.5);
        let mut integral = 0.0;
        let mut cut = lo;
        for edge in [1.0, 1.5] {
            if edge > cut {
                integral += adaptive_quadrature(&fragments, cut, edge, 1e-11, 1e-15)
                    .unwrap()
                    .value;
                cut = edge;
            }
        }

        assert_rel(line_term + integral, direct, 1e-9, "superposition");
    }
}

/// The growing solution — including the boundary-corrected region swept by
/// the expanding front — must satisfy the underlying conservation law
/// pointwise: ∂ₜu + ∂ₓ(ru) + a(x)u = gain, checked by centered differences
/// against an adaptive quadrature of the gain integral.
#[test]
fn growth_solution_satisfies_the_conservation_law() {
    let d = constant_params(1.0, Mode::Growth);
    assert!(d.beta > 0.0, "expanding front requires a positive drift rate");
    let u0 = SampledDensity::new(vec![0.5, 1.0, 1.5], vec![0.0, 1.0, 0.0]).unwrap();
    let u = |x: f64, t: f64| solve_constant_growth(&d, &u0, x, t).unwrap();
    let h = 1e-5;

    // One point per regime: ahead of the data, inside it, and behind the
    // front where the boundary construction supplies the profile.
    for (x, t) in [(0.7, 0.4), (1.3, 0.6), (0.35, 0.5)] {
        let u_t = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
        // r(x) = k is constant for α = 1, so ∂ₓ(ru) = k·∂ₓu.
        let flux_x = d.params.k * (u(x + h, t) - u(x - h, t)) / (2.0 * h);
        let sink = d.params.a * x * u(x, t);

        // Gain kernel for ν = 0: 2a·∫ₓ u(y,t) dy, split at the transported
        // kinks of the data and at the edge of the boundary-fed region.
        let top = 1.5 + t;
        let mut gain = 0.0;
        let mut cut = x;
        for edge in [t, 0.5 + t, 1.0 + t, top] {
            if edge > cut && edge <= top {
                gain += adaptive_quadrature(&|y| u(y, t), cut, edge, 1e-10, 1e-14)
                    .unwrap()
                    .value;
                cut = edge;
            }
        }
        gain *= 2.0 * d.params.a;

        let residual = u_t + flux_x + sink - gain;
        let scale = gain.abs().max(sink.abs()).max(1.0);
        assert!(
            residual.abs() <= 1e-5 * scale,
            "conservation law residual at (x={x}, t={t}): {residual:.3e}"
        );
    }
}

/// Linear-drift growth moves the first moment as e^{kt} exactly; integrating
/// the full closed-form snapshot (point mass + fragment tail with its
/// integrable singularity) must recover that transport law.
#[test]
fn snapshot_quadrature_recovers_linear_transport_moment() {
    let x0 = 2.0;
    let t = 0.5;
    for (mode, sign) in [(Mode::Growth, 1.0), (Mode::Decay, -1.0)] {
        let p = PhysicalParams::new(3.0, -1.5, 1.0, 1.0, 1.0, mode).unwrap();
        let d = derive(p).unwrap();
        let snapshot = solve_linear_monodisperse(&d, x0, t).unwrap();
        let m1 = moment_of_snapshot(&snapshot, 1.0).unwrap();
        let want = x0 * (sign * d.params.k * t).exp();
        assert!(
            m1.rel_error <= 1e-7,
            "quadrature did not converge: {:.3e}",
            m1.rel_error
        );
        assert_rel(m1.value, want, 1e-6, "first moment under linear drift");
    }
}
