use logcap::abel::{self, equilibrium_density, solve_r};
use logcap::capacity;
use logcap::pellabel;
use logcap::rational::int;
use logcap::weil;
use logcap::{ExactPoly, IntervalUnion};
use num_traits::Zero;
use proptest::prelude::*;

fn abel_cap(e: &IntervalUnion) -> f64 {
    abel::abel_capacity(&solve_r(e).unwrap()).unwrap().value
}

/// Two or three bands with gaps of at least 0.05.
fn band_set() -> impl Strategy<Value = IntervalUnion> {
    prop::collection::vec((0.05f64..1.0, 0.05f64..1.0), 2..=3).prop_map(|widths| {
        let mut x = -1.0;
        let mut bands = Vec::new();
        for (band, gap) in widths {
            bands.push((x, x + band));
            x += band + gap;
        }
        IntervalUnion::new(&bands).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interval_capacity_is_quarter_length(a in -5.0f64..5.0, w in 0.01f64..10.0) {
        let c = abel_cap(&IntervalUnion::single(a, a + w).unwrap());
        prop_assert!((c - w / 4.0).abs() <= 1e-9 * w);
    }

    #[test]
    fn capacity_scales_affinely(e in band_set(), s in 0.1f64..5.0, t in -3.0f64..3.0, flip in any::<bool>()) {
        let s = if flip { -s } else { s };
        let base = abel_cap(&e);
        let moved = abel_cap(&e.affine(s, t).unwrap());
        prop_assert!((moved - capacity::capacity_scale(base, s)).abs() <= 1e-8 * moved);
    }

    #[test]
    fn equilibrium_has_unit_mass(e in band_set()) {
        let dens = equilibrium_density(&solve_r(&e).unwrap());
        prop_assert!((dens.total_mass() - 1.0).abs() < 1e-8);
        let omega: f64 = dens.band_masses().iter().sum();
        prop_assert!((omega - 1.0).abs() < 1e-8);
    }

    #[test]
    fn capacity_monotone_under_inclusion(e in band_set(), grow in 0.01f64..0.5) {
        let (a, b) = e.hull();
        let mut bands = e.bands().to_vec();
        bands[0].0 -= grow;
        let bigger = IntervalUnion::new(&bands).unwrap();
        let c = abel_cap(&e);
        prop_assert!(abel_cap(&bigger) > c);
        prop_assert!(c < (b - a) / 4.0);
    }

    #[test]
    fn rational_weights_are_detected(counts in prop::collection::vec(1usize..5, 2..=4), noise in -1e-12f64..1e-12) {
        let r: usize = counts.iter().sum();
        let g = counts.iter().fold(0, |g, &c| num_integer::gcd(g, c));
        let omega: Vec<f64> = counts.iter().map(|&c| c as f64 / r as f64 + noise).collect();
        let (found, rj) = pellabel::detect_from_weights(&omega, 64, pellabel::TOL_RAT).unwrap();
        prop_assert_eq!(found, r / g);
        prop_assert_eq!(rj, counts.iter().map(|c| c / g).collect::<Vec<_>>());
    }

    #[test]
    fn preimage_capacity_identity(b in -4i64..=4, depth in 3i64..12, m in 1i64..=3) {
        // P = X^2 + bX + c with min P = c - b^2/4 below -M gives two bands.
        let c = (b * b) / 4 - m - depth / 2 - 1;
        let p = ExactPoly::from_ints(&[c, b, 1]);
        let pa = pellabel::from_exact_q1(&p, &int(m)).unwrap();
        prop_assert_eq!(pa.bands.band_count(), 2);
        let expected = capacity::capacity_preimage(m as f64 / 2.0, 2).unwrap();
        prop_assert!((pa.capacity() - expected).abs() < 1e-12);
        prop_assert!((abel_cap(&pa.bands) - expected).abs() < 1e-7);
        let cheb = capacity::chebyshev_constant(&pa.bands, 2).unwrap();
        prop_assert!((cheb.norm - m as f64).abs() < 1e-6 * m as f64);
    }

    #[test]
    fn coprime_resultants_are_nonnegative(
        p in prop::collection::vec(-6i64..=6, 1..=5),
        q in prop::collection::vec(-6i64..=6, 1..=5),
    ) {
        let mut p = p;
        p.push(1);
        let p = ExactPoly::from_ints(&p);
        let q = ExactPoly::from_ints(&q);
        prop_assume!(!q.is_zero());
        let (v, res) = abel::resultant_positivity(&p, &q).unwrap();
        if p.gcd(&q).degree() == 0 {
            prop_assert!(v >= 0.0 && !res.is_zero());
        } else {
            prop_assert!(v == f64::NEG_INFINITY && res.is_zero());
        }
    }

    #[test]
    fn weil_lift_is_integral_and_on_circle(q in 2u64..=5, roots in prop::collection::vec(-2i64..=2, 1..=4)) {
        let p_i = roots.iter().fold(ExactPoly::one(), |acc, &t| &acc * &ExactPoly::from_ints(&[-t, 1]));
        let p_c = weil::weil_lift(&p_i, q).unwrap();
        prop_assert_eq!(p_c.degree(), 2 * p_i.degree());
        prop_assert!(p_c.is_integer() && p_c.is_monic());
        prop_assert_eq!(p_c.coeff(0), int((q as i64).pow(p_i.degree() as u32)));
        prop_assert!(weil::roots_within(&p_i, q).unwrap());
        prop_assert!(weil::modulus_defect(&p_c, q).unwrap() < 1e-10);
        prop_assert!(weil::pushforward_check(&p_c, &p_i, q));
    }

    #[test]
    fn fekete_diameter_bounds_capacity(n in 2usize..=6, e in band_set()) {
        let d = capacity::fekete_diameter(&e, n).unwrap();
        prop_assert!(d >= abel_cap(&e) * (1.0 - 1e-9));
    }
}
