use green_teich::domains::{green_ball, ModelDomain};
use green_teich::extended::ExtReal;
use green_teich::hyperbolic::{cayley, green_disc, DiscAutomorphism, DiscPoint, HalfPlanePoint};
use green_teich::teich::{
    canonical_projection, eq2_sample, extremal_beltrami, teich_green, TorusBeltrami, TorusModulus,
};
use green_teich::vector::{format_complex, parse_complex, ComplexVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn modulus() -> impl Strategy<Value = TorusModulus> {
    (-3.0..3.0f64, 0.1..8.0f64).prop_map(|(re, im)| TorusModulus::new(Complex64::new(re, im)).unwrap())
}

fn disc_point(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

fn close(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    a.abs_diff(b) <= tol
}

proptest! {
    #[test]
    fn teich_green_is_symmetric_and_negative(x in modulus(), y in modulus()) {
        let g = teich_green(x, y);
        prop_assert!(g.abs_diff(teich_green(y, x)) <= 1e-14);
        prop_assert!(g.to_f64() <= 0.0);
    }

    #[test]
    fn torus_identity_holds(x in modulus(), y in modulus()) {
        let s = eq2_sample(x, y);
        prop_assume!(s.g.to_f64() > -30.0);
        prop_assert!(close(s.g, s.log_tanh_d, 1e-12));
        prop_assert!(close(s.g, s.half_plane, 1e-10));
    }

    #[test]
    fn projection_realizes_the_coefficient(x in modulus(), re in -0.9..0.9f64, im in -0.4..0.4f64) {
        let mu = Complex64::new(re, im);
        prop_assume!(mu.norm() < 0.95);
        let y = canonical_projection(TorusBeltrami::new(mu).unwrap(), x);
        let back = extremal_beltrami(x, y).value();
        prop_assert!((back + mu).norm() < 1e-9 * (1.0 + 1.0 / (1.0 - mu.norm())));
    }

    #[test]
    fn modular_invariance(x in modulus(), y in modulus()) {
        let t = |m: TorusModulus| TorusModulus::new(-1.0 / m.value()).unwrap();
        prop_assert!(teich_green(t(x), t(y)).abs_diff(teich_green(x, y)) < 1e-9);
    }

    #[test]
    fn disc_green_is_mobius_invariant(z in disc_point(0.95), w in disc_point(0.95), c in disc_point(0.9), th in 0.0..6.3f64) {
        let (z, w) = (DiscPoint::new(z).unwrap(), DiscPoint::new(w).unwrap());
        let m = DiscAutomorphism::new(th, DiscPoint::new(c).unwrap());
        let g = green_disc(z, w);
        prop_assume!(g.to_f64() > -20.0);
        prop_assert!(close(green_disc(m.apply(z), m.apply(w)), g, 1e-9));
    }

    #[test]
    fn ball_green_matches_disc_on_a_coordinate_line(z in disc_point(0.95), w in disc_point(0.95)) {
        let x = ComplexVector(vec![z, Complex64::new(0.0, 0.0)]);
        let y = ComplexVector(vec![w, Complex64::new(0.0, 0.0)]);
        let g = green_ball(&x, &y).unwrap();
        prop_assume!(g.to_f64() > -20.0);
        prop_assert!(close(g, green_disc(DiscPoint::new(z).unwrap(), DiscPoint::new(w).unwrap()), 1e-12));
    }

    #[test]
    fn cayley_lands_in_the_disc(re in -50.0..50.0f64, im in 1e-3..50.0f64) {
        let p = cayley(HalfPlanePoint::new(Complex64::new(re, im)).unwrap());
        prop_assert!(p.value().norm() < 1.0);
    }

    #[test]
    fn polydisc_green_is_max_of_coordinates(a in disc_point(0.9), b in disc_point(0.9), c in disc_point(0.9), d in disc_point(0.9)) {
        let pd = ModelDomain::Polydisc { dim: 2 };
        let g = pd.green_oracle(&ComplexVector(vec![a, b]), &ComplexVector(vec![c, d])).unwrap().unwrap();
        let g1 = green_disc(DiscPoint::new(a).unwrap(), DiscPoint::new(c).unwrap());
        let g2 = green_disc(DiscPoint::new(b).unwrap(), DiscPoint::new(d).unwrap());
        prop_assert_eq!(g, g1.max(g2));
    }

    #[test]
    fn complex_syntax_round_trips(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let z = Complex64::new(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        prop_assert_eq!(parse_complex(&format!("{re},{im}")).unwrap(), z);
    }
}
