use std::f64::consts::PI;
use std::sync::Arc;

use cradon_core::distributions::{apply, radon_pair, DensityQuad, Mollifier, TestDistribution, XFunction};
use cradon_core::geometry::{
    complement_connected, dilate, escape_path, hat_contains, hat_dilate_contains, CompactSet, Hyperplane,
    ProjectionRegion,
};
use cradon_core::harness::union_find_components;
use cradon_core::numerics::{Profile, QuadParams, SGrid, Sinogram, SphereGrid, SPHERE_AREA};
use cradon_core::transform::container::{read_sinogram, write_sinogram};
use cradon_core::transform::{forward, SmoothFunction, TestFunction};
use cradon_core::{Error, Point, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn point() -> impl Strategy<Value = Point> {
    (c64(), c64()).prop_map(|(a, b)| [a, b])
}

fn unit() -> impl Strategy<Value = Point> {
    point().prop_filter("nonzero", |p| p[0].norm_sqr() + p[1].norm_sqr() > 1e-3).prop_map(|p| {
        let r = (p[0].norm_sqr() + p[1].norm_sqr()).sqrt();
        [p[0] / r, p[1] / r]
    })
}

fn compact_set() -> impl Strategy<Value = CompactSet> {
    prop_oneof![
        (point(), 0.1..1.0f64).prop_map(|(c, r)| CompactSet::Ball { center: c, radius: r }),
        prop::collection::vec(point(), 1..4).prop_map(CompactSet::Points),
        (point(), 0.1..0.8f64, 0.1..0.8f64).prop_map(|(c, a, b)| CompactSet::Polydisc { center: c, radii: [a, b] }),
        (0.2..0.5f64, 0.6..1.0f64).prop_map(|(i, o)| CompactSet::EmbeddedAnnulus { inner: i, outer: o }),
    ]
}

/// `⟨c, w⟩ = c₁w₁ + c₂w₂`, written out independently of the library.
fn bil(c: &Point, w: &Point) -> C64 {
    c[0] * w[0] + c[1] * w[1]
}

fn gaussian_radon(center: &Point, width: f64, w: &Point, s: C64) -> C64 {
    let d = s - bil(center, w);
    C64::new(PI * width * width * (-d.norm_sqr() / (width * width)).exp(), 0.0)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_phase_invariant(w in unit(), s in c64(), theta in 0.0..2.0 * PI, r in 0.5..3.0f64) {
        let h = Hyperplane::new(w, s).unwrap();
        let e = C64::from_polar(r, theta);
        let g = Hyperplane::new([w[0] * e, w[1] * e], s * e).unwrap();
        let (a, b) = (h.canonical(), g.canonical());
        prop_assert!(a.is_canonical());
        for k in 0..2 {
            prop_assert!((a.normal[k] - b.normal[k]).norm() <= 1e-9);
        }
        prop_assert!((a.offset - b.offset).norm() <= 1e-9);
    }

    #[test]
    fn canonical_is_idempotent(w in unit(), s in c64()) {
        let h = Hyperplane::new(w, s).unwrap().canonical();
        prop_assert_eq!(h.canonical(), h);
    }

    #[test]
    fn hat_membership_matches_brute_force(k in compact_set(), w in unit(), s in (-3.0..3.0f64, -3.0..3.0f64), seed in 0u64..1000) {
        let s = C64::new(s.0, s.1);
        let h = Hyperplane::new(w, s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cloud = k.sample(4000, &mut rng);
        let brute = cloud.iter().map(|z| (bil(z, &w) - s).norm()).fold(f64::INFINITY, f64::min);
        let d = k.projection_distance(&w, s);
        // Every sample projects into K_w, so no sample is closer than the exact distance.
        prop_assert!(brute >= d - 1e-12, "brute {brute} < exact {d}");
        if hat_contains(&k, &h, 0.0) {
            prop_assert!(brute < 0.25, "H meets K but the nearest sample is {brute} away");
        } else {
            prop_assert!(d > 0.0);
        }
    }

    #[test]
    fn hat_dilation_matches_dilated_set(k in compact_set(), w in unit(), s in (-3.0..3.0f64, -3.0..3.0f64), m in 1u32..8) {
        let h = Hyperplane::new(w, C64::new(s.0, s.1)).unwrap();
        let eps = 1.0 / m as f64;
        let gap = k.projection_distance(&w, h.offset) - eps;
        prop_assume!(gap.abs() > 1e-9);
        let dilated = dilate(&k, eps).unwrap();
        prop_assert_eq!(hat_dilate_contains(&k, m, &h).unwrap(), hat_contains(&dilated, &h, 0.0));
    }

    #[test]
    fn flood_fill_agrees_with_union_find(n in 16usize..28, density in 0.05..0.6f64, seed in 0u64..10_000) {
        let mut r = ProjectionRegion::empty(C64::new(0.0, 0.0), 1.0, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for row in 1..n - 1 {
            for col in 1..n - 1 {
                r.bitmap[row * n + col] = rand::Rng::gen::<f64>(&mut rng) < density;
            }
        }
        let flood = r.complement_components().unwrap();
        prop_assert_eq!(flood, union_find_components(&r));
        prop_assert_eq!(complement_connected(&r).unwrap(), flood == 1);
    }

    #[test]
    fn escape_paths_keep_their_clearance(k in compact_set(), w in unit(), s0 in (-2.0..2.0f64, -2.0..2.0f64), delta in 0.02..0.2f64) {
        let a = cradon_core::geometry::project(&k, &w, 32).unwrap();
        let s0 = C64::new(s0.0, s0.1);
        let radius = a.half_width * std::f64::consts::SQRT_2 + delta;
        match escape_path(&a, s0, radius, delta) {
            Ok(path) => {
                prop_assert!(path.sampled_clearance(&a, 200) >= delta - 1e-12);
                prop_assert!(path.end().norm() >= radius - 1e-12);
            }
            Err(Error::NoEscapePath { achievable, requested }) => prop_assert!(achievable < requested),
            Err(Error::InvalidArgument(_)) => prop_assume!(false),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn sphere_weights_sum_to_the_area(n_eta in 4usize..12, n_theta in 4usize..16) {
        let g = SphereGrid::new(n_eta, n_theta).unwrap();
        let total: f64 = g.weights().iter().sum();
        prop_assert!((total - 2.0 * PI * PI).abs() < 1e-10 * SPHERE_AREA);
        // |w₁|² has mean 1/2 over S³.
        let m = g.integrate(|_, w| Ok(C64::new(w[0].norm_sqr(), 0.0))).unwrap();
        prop_assert!((m.re - PI * PI).abs() < 1e-10);
    }

    #[test]
    fn mollifier_is_even(m in 1u32..12, z in point()) {
        let a = Mollifier::new(m).unwrap();
        let scale = 1.0 / m as f64;
        let z = [z[0] * scale, z[1] * scale];
        prop_assert_eq!(a.value(&z), a.value(&[-z[0], -z[1]]));
        prop_assert!(a.value(&z) >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mollifier_is_normalized(m in 1u32..16) {
        let a = Mollifier::new(m).unwrap();
        prop_assert!((a.integral() - 1.0).abs() < 1e-6);
        prop_assert!(a.check_normalized().is_ok());
        let wide = Mollifier::with_constant(m, 2.0 * a.constant()).unwrap();
        prop_assert!(wide.check_normalized().is_err());
    }

    #[test]
    fn forward_matches_gaussian_shift_law(c in point(), width in 0.5..1.5f64, w in unit(), s in c64()) {
        let f = TestFunction::gaussian(c, width).unwrap();
        let h = Hyperplane::new(w, s).unwrap();
        let got = forward(&f, &h, &QuadParams::default()).unwrap();
        prop_assert!(rel(got, gaussian_radon(&c, width, &w, s)) < 1e-8);
    }

    #[test]
    fn forward_is_phase_invariant_and_homogeneous(c in point(), w in unit(), s in c64(), theta in 0.0..2.0 * PI, lambda in 0.5..3.0f64) {
        let f = TestFunction::gaussian(c, 1.0).unwrap().plus(TestFunction::bump([-c[1], c[0]], 1.2).unwrap());
        let q = QuadParams::default();
        let base = forward(&f, &Hyperplane::new(w, s).unwrap(), &q).unwrap();
        let e = C64::from_polar(1.0, theta);
        let rotated = forward(&f, &Hyperplane::new([w[0] * e, w[1] * e], s * e).unwrap(), &q).unwrap();
        prop_assert!((rotated - base).norm() <= 1e-10 * base.norm().max(1e-3));
        let scaled = forward(&f, &Hyperplane::new([w[0] * lambda, w[1] * lambda], s * lambda).unwrap(), &q).unwrap();
        prop_assert!((scaled * lambda * lambda - base).norm() <= 1e-12 * base.norm().max(1e-3));
    }

    #[test]
    fn forward_is_linear(c1 in point(), c2 in point(), a in c64(), b in c64(), w in unit(), s in c64()) {
        let f = TestFunction::gaussian(c1, 1.0).unwrap();
        let g = TestFunction::bump(c2, 1.5).unwrap();
        let q = QuadParams::default();
        let h = Hyperplane::new(w, s).unwrap();
        let lhs = forward(&f.clone().scaled(a).plus(g.clone().scaled(b)), &h, &q).unwrap();
        let rhs = a * forward(&f, &h, &q).unwrap() + b * forward(&g, &h, &q).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn apply_is_linear_in_the_distribution(z1 in point(), z2 in point(), a in c64(), b in c64(), p in 0u32..2, q in 0u32..2) {
        let phi = TestFunction::gaussian([C64::new(0.3, 0.0), C64::new(0.0, -0.2)], 1.0).unwrap();
        let quad = DensityQuad { n_r: 16, n_eta: 4, n_theta: 8, truncation: 6.0 };
        let s = TestDistribution::point_derivative(z1, C64::new(1.0, 0.0), [p, 0], [0, q]).unwrap();
        let t = TestDistribution::density(TestFunction::bump(z2, 0.7).unwrap()).unwrap();
        let combo = TestDistribution::new(
            s.terms.iter().map(|x| { let mut x = x.clone(); scale_term(&mut x, a); x })
                .chain(t.terms.iter().map(|x| { let mut x = x.clone(); scale_term(&mut x, b); x }))
                .collect(),
        ).unwrap();
        let lhs = apply(&combo, &phi, &quad).unwrap();
        let rhs = a * apply(&s, &phi, &quad).unwrap() + b * apply(&t, &phi, &quad).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn point_derivative_sign_convention(z in point(), p in 0u32..3) {
        let phi = TestFunction::gaussian([C64::new(0.1, 0.2), C64::new(-0.3, 0.0)], 1.0).unwrap();
        let t = TestDistribution::point_derivative(z, C64::new(1.0, 0.0), [p, 0], [0, 0]).unwrap();
        let got = apply(&t, &phi, &DensityQuad::default()).unwrap();
        let want = phi.derivative(&z, [p, 0], [0, 0]).unwrap() * if p % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((got - want).norm() <= 1e-14 * (1.0 + want.norm()));
    }

    #[test]
    fn sinogram_container_round_trips(n_eta in 4usize..6, n_theta in 4usize..6, count in (4usize..8).prop_map(|k| 2 * k + 1), seed in 0u64..1000) {
        let sphere = Arc::new(SphereGrid::new(n_eta, n_theta).unwrap());
        let sgrid = SGrid::new(C64::new(0.25, -0.5), 1.5, count).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sino = Sinogram::zeros(sphere, sgrid);
        for v in sino.values.iter_mut() {
            *v = C64::new(rand::Rng::gen(&mut rng), rand::Rng::gen(&mut rng));
        }
        let mut buf = Vec::new();
        write_sinogram(&mut buf, &sino).unwrap();
        let back = read_sinogram(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.values, sino.values);
        prop_assert_eq!(back.margin, sino.margin);
        prop_assert_eq!(back.sgrid, sino.sgrid);
    }
}

fn scale_term(t: &mut cradon_core::distributions::DistTerm, c: C64) {
    use cradon_core::distributions::Measure;
    match &mut t.measure {
        Measure::Point { weight, .. } => *weight *= c,
        Measure::Density(f) => *f = f.clone().scaled(c),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    /// For `T = e^{−|z−c|²}` and `ψ = e^{−|s|²/σ²}` the pairing has the closed form
    /// `2π⁴ σ²/(1+σ²) · (1 − e^{−β})/β` with `β = |c|²/(1+σ²)`, since `|⟨c, w⟩|²/|c|²` is
    /// uniform on [0, 1] over S³.
    #[test]
    fn radon_pair_of_gaussians_has_closed_form(c in point(), sigma in 0.8..1.6f64) {
        let t = TestDistribution::density(TestFunction::gaussian(c, 1.0).unwrap()).unwrap();
        let psi = XFunction::radial(Profile::Gaussian { width: sigma }).unwrap();
        let sphere = SphereGrid::new(8, 16).unwrap();
        let quad = DensityQuad { n_r: 40, n_eta: 6, n_theta: 12, truncation: 6.0 };
        let got = radon_pair(&t, &psi, &sphere, &quad).unwrap();
        let s2 = sigma * sigma;
        let beta = (c[0].norm_sqr() + c[1].norm_sqr()) / (1.0 + s2);
        let shape = if beta < 1e-12 { 1.0 } else { (1.0 - (-beta).exp()) / beta };
        let want = 2.0 * PI.powi(4) * s2 / (1.0 + s2) * shape;
        prop_assert!(rel(got, C64::new(want, 0.0)) < 1e-4, "got {got}, want {want}");
    }
}
