mod common;

use common::{random_convex_polygon, rel, rng};
use gaussian_density::density::{einstein_density, PolytopeFunctional};
use gaussian_density::expint::{
    dd_exp, polytope_exp_integral, polytope_moment1, simplex_exp_integral, LinearForm, NodeList,
};
use gaussian_density::optimize::{minimize_convex_newton, minimize_scalar, SmoothObjective};
use gaussian_density::polytope::{pentagon, trapezium, validate_polygon, Point, Simplex};
use nalgebra::DVector;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn area_is_sum_of_fan_volumes(seed in any::<u64>()) {
        let p = random_convex_polygon(&mut rng(seed));
        let fan: f64 = p.triangulate().iter().map(Simplex::signed_volume).sum();
        prop_assert!(rel(fan, p.area()) <= 1e-14);
        prop_assert!(p.triangulate().iter().all(|s| s.signed_volume() > 0.0));
    }

    #[test]
    fn area_translation_and_scaling(seed in any::<u64>(), tx in -5.0..5.0f64, ty in -5.0..5.0f64, lam in 0.1..4.0f64) {
        let p = random_convex_polygon(&mut rng(seed));
        prop_assert!(rel(p.translated(&[tx, ty]).area(), p.area()) < 1e-12);
        prop_assert!(rel(p.scaled(lam).unwrap().area(), lam * lam * p.area()) < 1e-12);
    }

    #[test]
    fn validation_is_idempotent_up_to_rotation(seed in any::<u64>(), shift in 0usize..8, reverse in any::<bool>()) {
        let p = random_convex_polygon(&mut rng(seed));
        let mut raw = p.vertices().to_vec();
        let k = shift % raw.len();
        raw.rotate_left(k);
        if reverse {
            raw.reverse();
        }
        let q = validate_polygon(&raw).unwrap();
        let n = p.vertices().len();
        let start = q.vertices().iter().position(|v| *v == p.vertices()[0]).unwrap();
        for i in 0..n {
            prop_assert_eq!(&q.vertices()[(start + i) % n], &p.vertices()[i]);
        }
    }

    #[test]
    fn centroid_is_interior(seed in any::<u64>()) {
        let p = random_convex_polygon(&mut rng(seed));
        prop_assert!(p.contains_interior(&p.centroid()));
    }

    #[test]
    fn divided_difference_is_permutation_symmetric(
        nodes in prop::collection::vec((-6.0..6.0f64, 1usize..4), 1..5),
        perm_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let (v, m): (Vec<f64>, Vec<usize>) = nodes.iter().copied().unzip();
        let a = dd_exp(&NodeList::new(v, m));
        let mut shuffled = nodes.clone();
        shuffled.shuffle(&mut rng(perm_seed));
        let (v, m): (Vec<f64>, Vec<usize>) = shuffled.into_iter().unzip();
        let b = dd_exp(&NodeList::new(v, m));
        prop_assert!(a > 0.0);
        prop_assert!(rel(a, b) <= 1e-13);
    }

    #[test]
    fn subdivision_is_additive(
        coords in prop::array::uniform6(-3.0..3.0f64),
        bary in prop::array::uniform3(0.05..1.0f64),
        form in prop::array::uniform2(-2.0..2.0f64),
    ) {
        let v: Vec<Point> = coords.chunks(2).map(|c| Point::xy(c[0], c[1])).collect();
        let whole = Simplex::triangle(v[0].clone(), v[1].clone(), v[2].clone());
        prop_assume!(whole.as_ref().is_some_and(|s| s.volume() > 1e-3));
        let whole = whole.unwrap();
        let s: f64 = bary.iter().sum();
        let ip = Point::xy(
            (0..3).map(|i| bary[i] / s * v[i][0]).sum(),
            (0..3).map(|i| bary[i] / s * v[i][1]).sum(),
        );
        let l = LinearForm::new(form.to_vec());
        let parts: f64 = [(0, 1), (1, 2), (2, 0)]
            .iter()
            .map(|&(a, b)| {
                let t = Simplex::triangle(v[a].clone(), v[b].clone(), ip.clone()).unwrap();
                simplex_exp_integral(&t, &l)
            })
            .sum();
        prop_assert!(rel(parts, simplex_exp_integral(&whole, &l)) < 1e-12);
    }

    #[test]
    fn translation_covariance(seed in any::<u64>(), t in prop::array::uniform2(-2.0..2.0f64), c in prop::array::uniform2(-2.0..2.0f64)) {
        let p = random_convex_polygon(&mut rng(seed));
        let l = LinearForm::new(c.to_vec());
        let shifted = polytope_exp_integral(&p.translated(&t), &l);
        let base = polytope_exp_integral(&p, &l);
        let factor = (c[0] * t[0] + c[1] * t[1]).exp();
        prop_assert!(base > 0.0);
        prop_assert!(rel(shifted, factor * base) < 1e-12);
    }

    #[test]
    fn zero_form_gives_area(seed in any::<u64>()) {
        let p = random_convex_polygon(&mut rng(seed));
        prop_assert!(rel(polytope_exp_integral(&p, &LinearForm::zero(2)), p.area()) <= 1e-14);
    }

    #[test]
    fn newton_is_init_independent(a in prop::array::uniform2(-1.5..1.5f64), b in prop::array::uniform2(-1.5..1.5f64)) {
        let tol = 1e-10;
        for poly in [pentagon(), trapezium()] {
            let f = PolytopeFunctional::full(&poly);
            let ra = minimize_convex_newton(&f, &a, tol).unwrap();
            let rb = minimize_convex_newton(&f, &b, tol).unwrap();
            for i in 0..2 {
                prop_assert!((ra.argmin[i] - rb.argmin[i]).abs() <= 10.0 * tol);
            }
            let form = LinearForm::new(ra.argmin.iter().map(|c| -c).collect());
            for i in 0..2 {
                prop_assert!(polytope_moment1(&poly, &form, i).abs() <= tol);
            }
        }
    }

    #[test]
    fn scalar_minimizer_zeroes_derivative(center in -2.0..2.0f64, k in 0.5..5.0f64) {
        let f = |x: f64| (k * (x - center)).cosh() + 0.3 * x;
        let r = minimize_scalar(f, -6.0, 6.0, 1e-10).unwrap();
        let x = r.argmin[0];
        let h = 1e-5;
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        prop_assert!(d.abs() <= 1e-6 * (1.0 + r.value.abs()), "derivative {}", d);
    }

    #[test]
    fn einstein_density_is_scale_invariant(r in 0.1..50.0f64, v in 0.1..50.0f64, lam in 0.01..100.0f64, n in 1.0..8.0f64) {
        let a = einstein_density(r, v, n).unwrap().theta;
        let b = einstein_density(r / lam, lam.powf(n / 2.0) * v, n).unwrap().theta;
        prop_assert!(rel(b, a) < 1e-12);
    }
}

#[test]
fn reduced_functional_matches_full_on_the_diagonal() {
    let p = pentagon();
    let full = PolytopeFunctional::full(&p);
    let diag = PolytopeFunctional::diagonal(&p);
    let s = DVector::from_vec(vec![0.37]);
    let c = DVector::from_vec(vec![0.37, 0.37]);
    let ef = full.evaluate(&c);
    let ed = diag.evaluate(&s);
    assert!(rel(ed.value, ef.value) < 1e-15);
    assert!(rel(ed.gradient[0], ef.gradient.sum()) < 1e-13);
    assert!(rel(ed.hessian[(0, 0)], ef.hessian.sum()) < 1e-13);
}
