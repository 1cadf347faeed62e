use super::*;
use crate::toda::{exact_solution, gauge_at, Couplings, FieldConfig, SolutionParams, TodaModel};
use crate::transport::{transport, Staircase};
use crate::Error;

fn sl2(c: f64, mu_plus: f64, mu_minus: f64) -> TodaModel {
    TodaModel::sl(
        2,
        2.0,
        Couplings {
            mu_plus,
            mu_minus,
            c,
            lambda: 0.0,
        },
    )
    .unwrap()
}

fn sl3(c: f64) -> TodaModel {
    TodaModel::sl(
        3,
        2.0,
        Couplings {
            c,
            ..Default::default()
        },
    )
    .unwrap()
}

fn cosh_fields(a: f64) -> FieldConfig {
    exact_solution("liouville_cosh", &SolutionParams::with_a(a)).unwrap()
}

fn sl3_fields() -> FieldConfig {
    exact_solution("toda_sl3_symmetric", &SolutionParams::with_a(0.5_f64.sqrt())).unwrap()
}

const PTS: [(f64, f64); 3] = [(0.2, 0.3), (0.5, 0.1), (0.7, 0.8)];

#[test]
fn metric_matches_closed_forms() {
    for c in [1.0, -0.6] {
        let m = sl2(c, 1.2, 0.9);
        let f = cosh_fields((1.2_f64 * 0.9).sqrt());
        let s = TodaSurface::new(&m, &f);
        for (z, w) in PTS {
            let g = metric(&s, z, w).unwrap();
            let phi = f.sample(z, w).unwrap().phi[0];
            let want = c * 1.2 * 0.9 * (-2.0 * phi).exp();
            assert!((g[0][1] - want).abs() < 1e-12, "{} vs {want}", g[0][1]);
            assert!(g[0][0].abs() < 1e-14 && g[1][1].abs() < 1e-14);
            let pairing = gauge_at(&m, &f, z, w).unwrap().pairing;
            assert!((g[0][1] - c * pairing).abs() < 1e-12);
        }
    }
    let m = sl3(0.8);
    let f = FieldConfig::constant(vec![0.3, -0.2]);
    let g = metric(&TodaSurface::new(&m, &f), 0.0, 0.0).unwrap();
    let want = 0.8 * ((-0.6_f64 - 0.2).exp() + (0.3_f64 + 0.4).exp());
    assert!((g[0][1] - want).abs() < 1e-12);
}

#[test]
fn degenerate_metric_is_flagged() {
    let m = sl2(1.0, 1.0, 1.0).scaled_limit(1.0, 0.0).unwrap();
    let f = FieldConfig::constant(vec![0.0]);
    let err = metric(&TodaSurface::new(&m, &f), 0.0, 0.0).unwrap_err();
    assert!(matches!(err, Error::DegeneratePoint { .. }));
}

#[test]
fn christoffel_closed_forms_and_metric_route() {
    let m = sl2(1.0, 1.0, 1.0);
    let f = cosh_fields(1.0);
    let s = TodaSurface::new(&m, &f);
    for (z, w) in PTS {
        let gam = christoffel_direct(&s, z, w).unwrap();
        let smp = f.sample(z, w).unwrap();
        let mut want = [[[0.0; 2]; 2]; 2];
        want[0][0][0] = -2.0 * smp.d1[0];
        want[1][1][1] = -2.0 * smp.d2[0];
        for (x, y) in gam.iter().flatten().flatten().zip(want.iter().flatten().flatten()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
    let err = |h: f64| {
        let a = christoffel_metric(&s, 0.4, 0.3, h).unwrap();
        let b = christoffel_direct(&s, 0.4, 0.3).unwrap();
        a.iter()
            .flatten()
            .flatten()
            .zip(b.iter().flatten().flatten())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    };
    assert!(err(1e-3) < 1e-5);
    let ratio = err(2e-2) / err(1e-2);
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn constant_fields_have_flat_connection_coefficients() {
    let m = sl2(1.0, 1.0, 1.0);
    let f = FieldConfig::constant(vec![0.4]);
    let s = TodaSurface::new(&m, &f);
    let gam = christoffel_direct(&s, 0.1, 0.2).unwrap();
    assert!(gam.iter().flatten().flatten().all(|v| v.abs() < 1e-14));
    let r = riemann(&s, 0.1, 0.2, 1e-3).unwrap();
    assert!(r.down.iter().flatten().flatten().flatten().all(|v| v.abs() < 1e-12));
}

#[test]
fn curvature_routes_agree_with_closed_form() {
    for c in [1.0, -2.5] {
        let m = sl2(c, 1.0, 1.0);
        let f = cosh_fields(1.0);
        let s = TodaSurface::new(&m, &f);
        for (z, w) in PTS {
            let phi = f.sample(z, w).unwrap().phi[0];
            let want = -(4.0 * c / 2.0) * (-4.0 * phi).exp();
            let on = gaussian_curvature(&s, z, w, CurvatureMode::Onshell).unwrap();
            let fd = gaussian_curvature(&s, z, w, CurvatureMode::FiniteDifference { h: 1e-3 }).unwrap();
            let ex = gaussian_curvature(&s, z, w, CurvatureMode::Extrinsic).unwrap();
            assert!((on - want).abs() < 1e-10);
            assert!((ex - want).abs() < 1e-10);
            assert!((fd - want).abs() < 1e-4);
            assert_eq!(on < 0.0, c > 0.0);
        }
    }
}

#[test]
fn onshell_curvature_refuses_off_shell_fields() {
    let m = sl2(1.0, 1.0, 1.0);
    let f = FieldConfig::constant(vec![0.0]);
    let s = TodaSurface::new(&m, &f);
    assert!(matches!(
        gaussian_curvature(&s, 0.0, 0.0, CurvatureMode::Onshell),
        Err(Error::Refused(_))
    ));
}

#[test]
fn two_dimensional_ricci_identities() {
    let m = sl2(-0.5, 1.0, 1.0);
    let f = cosh_fields(1.0);
    let r = riemann(&TodaSurface::new(&m, &f), 0.3, 0.6, 1e-3).unwrap();
    let k = r.sectional();
    assert!((k - 2.0 / -0.5).abs() < 1e-5);
    let ric = r.ricci();
    for i in 0..2 {
        for j in 0..2 {
            assert!((ric[i][j] - k * r.g[i][j]).abs() < 1e-6);
        }
    }
    assert!((r.scalar() - 2.0 * k).abs() < 1e-6);
}

#[test]
fn sl2_frame_and_second_form() {
    for c in [1.0, -3.0] {
        let m = sl2(c, 1.0, 1.0);
        let f = cosh_fields(1.0);
        let s = TodaSurface::new(&m, &f);
        let alg = m.algebra();
        let h = alg.basis_element(alg.index_of("H1").unwrap());
        for (z, w) in PTS {
            let fr = normal_frame(&s, z, w).unwrap();
            assert_eq!(fr.eta, vec![if c > 0.0 { 1 } else { -1 }]);
            assert_eq!(fr.nu_perp, usize::from(c < 0.0));
            let d = &fr.n0[0] - &h.scaled(1.0 / c.abs().sqrt());
            assert!(d.max_abs() < 1e-12);
            let b = second_form(&s, &fr, z, w).unwrap();
            let phi = f.sample(z, w).unwrap().phi[0];
            let want = -2.0 * c * (-2.0 * phi).exp() / (2.0_f64.sqrt() * c.abs().sqrt());
            assert!((b[0][0][1] - want).abs() < 1e-10);
            assert!((b[0][1][0] - want).abs() < 1e-10);
            assert!(b[0][0][0].abs() < 1e-10 && b[0][1][1].abs() < 1e-10);
        }
    }
    let m = sl2(1.0, 1.0, 1.0);
    let f = FieldConfig::constant(vec![0.0]);
    let s = TodaSurface::new(&m, &f);
    let b = second_form(&s, &normal_frame(&s, 0.0, 0.0).unwrap(), 0.0, 0.0).unwrap();
    assert!((b[0][0][1] + 2.0_f64.sqrt()).abs() < 1e-12);
}

#[test]
fn second_form_routes_agree_on_sl3() {
    let m = sl3(1.0);
    let f = sl3_fields();
    let s = TodaSurface::new(&m, &f);
    let (frames, _) = SolverFrames::anchored(&s, 0.3, 0.3).unwrap();
    for (z, w) in PTS {
        let fr = frames.frame(z, w).unwrap();
        let (orth, norm) = fr.defects(&s, z, w).unwrap();
        assert!(orth < 1e-10 && norm < 1e-10);
        let b1 = second_form(&s, &fr, z, w).unwrap();
        let b2 = second_form_from_frame_derivatives(&s, &frames, z, w, 1e-3).unwrap();
        for (x, y) in b1.iter().zip(&b2) {
            assert!((x[0][1] - x[1][0]).abs() < 1e-10);
            for (p, q) in x.iter().flatten().zip(y.iter().flatten()) {
                assert!((p - q).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn normal_connection_structure() {
    let m = sl2(1.0, 1.0, 1.0);
    let f = cosh_fields(1.0);
    let s = TodaSurface::new(&m, &f);
    let (frames, _) = SolverFrames::anchored(&s, 0.2, 0.2).unwrap();
    assert_eq!(normal_connection(&s, &frames, 0.2, 0.2, 1e-3).unwrap(), vec![vec![[0.0; 2]]]);

    let m = sl3(1.0);
    let f = sl3_fields();
    let s = TodaSurface::new(&m, &f);
    let (frames, _) = SolverFrames::anchored(&s, 0.3, 0.3).unwrap();
    let mu = normal_connection(&s, &frames, 0.4, 0.2, 1e-3).unwrap();
    for a in 0..6 {
        for b in 0..6 {
            for al in 0..2 {
                assert!((mu[a][b][al] + mu[b][a][al]).abs() < 1e-8);
            }
        }
    }
    // explicit frame at phi_1 = phi_2: grade 0 vectors decouple from grade +-2 ones
    let explicit = ExplicitSl3Frames(s);
    let mu = normal_connection(&s, &explicit, 0.4, 0.2, 1e-3).unwrap();
    for g0 in 0..2 {
        for g2 in 4..6 {
            for al in 0..2 {
                assert!(mu[g0][g2][al].abs() < 1e-8 && mu[g2][g0][al].abs() < 1e-8);
            }
        }
    }
}

#[test]
fn sign_of_c_flips_eta_only() {
    let f = sl3_fields();
    let (mp, mn) = (sl3(1.3), sl3(-1.3));
    let fp = normal_frame(&TodaSurface::new(&mp, &f), 0.3, 0.1).unwrap();
    let fneg = normal_frame(&TodaSurface::new(&mn, &f), 0.3, 0.1).unwrap();
    for (a, b) in fp.n0.iter().zip(&fneg.n0) {
        assert!((a - b).max_abs() < 1e-12);
    }
    for (a, b) in fp.eta.iter().zip(&fneg.eta) {
        assert_eq!(*a, -*b);
    }
    assert_eq!(fneg.nu_perp, 6 - fp.nu_perp);
}

#[test]
fn explicit_frame_spans_solver_normal_space() {
    for c in [1.0, -0.4] {
        let m = sl3(c);
        let f = sl3_fields();
        let s = TodaSurface::new(&m, &f);
        for (z, w) in PTS {
            let p = explicit_sl3_frame(&s, z, w).unwrap();
            let (orth, norm) = p.defects(&s, z, w).unwrap();
            assert!(orth < 1e-12 && norm < 1e-12);
            let n = normal_frame(&s, z, w).unwrap();
            let d = normal_projector(m.algebra(), c, &p) - normal_projector(m.algebra(), c, &n);
            assert!(d.amax() < 1e-8);
        }
    }
    let m = sl2(1.0, 1.0, 1.0);
    let f = cosh_fields(1.0);
    assert!(explicit_sl3_frame(&TodaSurface::new(&m, &f), 0.0, 0.0).is_err());
}

#[test]
fn tangent_pair_is_orthonormal_with_index_one() {
    for c in [1.0, -1.0] {
        let m = sl2(c, 1.0, 1.0);
        let f = cosh_fields(1.0);
        let g = metric(&TodaSurface::new(&m, &f), 0.3, 0.2).unwrap();
        let v = tangent_pair(&g).unwrap();
        let ip = |x: &[f64; 2], y: &[f64; 2]| -> f64 {
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| x[i] * g[i][j] * y[j]).sum()
        };
        assert!((ip(&v[0], &v[0]) - 1.0).abs() < 1e-10);
        assert!((ip(&v[1], &v[1]) + 1.0).abs() < 1e-10);
        assert!(ip(&v[0], &v[1]).abs() < 1e-10);
    }
    assert!(tangent_pair(&[[1.0, 0.5], [0.5, 0.0]]).is_err());
}

#[test]
fn sl2_mean_curvature() {
    for c in [1.0, -0.8] {
        let m = sl2(c, 1.0, 1.0);
        let f = cosh_fields(1.0);
        let s = TodaSurface::new(&m, &f);
        let (frames, _) = SolverFrames::anchored(&s, 0.0, 0.0).unwrap();
        let alg = m.algebra();
        let h = alg.basis_element(alg.index_of("H1").unwrap());
        for (z, w) in PTS {
            let st = transport(&m, &f, &Staircase::z_first((0.0, 0.0), (z, w)), 1e-3).unwrap();
            let mc = mean_curvature(&s, &frames, &st, z, w, 1e-3).unwrap();
            assert!((mc.norm_sq - 2.0 / c).abs() < 1e-8);
            assert!(mc.normal_derivative < 1e-8);
            // h = alpha H1: H = -(alpha^2 / 2c) U^-1 h U = -(alpha / c) U^-1 H1 U
            let want = st.pull_back(&h.scaled(-2.0_f64.sqrt() / c)).unwrap();
            assert!((&mc.vector - &want).max_abs() < 1e-10);
        }
        let st = transport(&m, &f, &Staircase::z_first((0.0, 0.0), (0.1, 0.1)), 1e-3).unwrap();
        assert!(mean_curvature(&s, &frames, &st, 0.2, 0.1, 1e-3).is_err());
    }
}

#[test]
fn gcr_residuals_are_small() {
    let m = sl2(1.0, 1.0, 1.0);
    let f = cosh_fields(1.0);
    let s = TodaSurface::new(&m, &f);
    let (frames, _) = SolverFrames::anchored(&s, 0.5, 0.5).unwrap();
    for (z, w) in PTS {
        let r = gcr_residuals(&s, &frames, z, w, 1e-3).unwrap();
        assert!(r.gauss < 1e-4 && r.codazzi < 1e-4);
        assert_eq!(r.ricci, 0.0);
    }
    let m = sl3(-1.0);
    let f = sl3_fields();
    let s = TodaSurface::new(&m, &f);
    let (frames, _) = SolverFrames::anchored(&s, 0.5, 0.5).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let (z, w) = (0.3 + 0.1 * i as f64, 0.3 + 0.1 * j as f64);
            let r = gcr_residuals(&s, &frames, z, w, 1e-3).unwrap();
            assert!(r.gauss < 1e-3 && r.codazzi < 1e-3 && r.ricci < 1e-3, "{r:?}");
        }
    }
}

#[test]
fn identity_gauge_changes_nothing() {
    let m = sl3(1.0);
    let f = sl3_fields();
    let s = TodaSurface::new(&m, &f);
    let dev = gauge_invariance_check(&s, &m.algebra().zero(), &PTS, 1e-3).unwrap();
    assert_eq!(dev.max(), 0.0);
}

#[test]
fn cartan_gauge_leaves_forms_invariant() {
    let m = sl2(1.0, 1.0, 1.0);
    let f = cosh_fields(1.0);
    let s = TodaSurface::new(&m, &f);
    let x = m.cartan_combination(&[0.3]);
    assert!(gauge_invariance_check(&s, &x, &PTS, 1e-3).unwrap().max() < 1e-10);

    let m = sl3(1.0);
    let f = sl3_fields();
    let s = TodaSurface::new(&m, &f);
    let x = m.cartan_combination(&[0.2, -0.1]);
    assert!(gauge_invariance_check(&s, &x, &PTS, 1e-3).unwrap().max() < 1e-9);
}
