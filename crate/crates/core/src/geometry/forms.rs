//! First and second fundamental forms, connection coefficients and curvature.

use super::frame::{FrameField, NormalFrame};
use super::{central_diff, Christoffel, Jet, Mat2, Potentials, TodaSurface};
use crate::algebra::{AlgebraElement, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg;
use crate::toda::field_residual;
use crate::transport::TransportState;

/// Field-equation residual above which on-shell substitution is refused.
pub const ONSHELL_TOL: f64 = 1e-8;

fn metric_of(alg: &LieAlgebra, c: f64, jet: &Jet) -> Mat2 {
    let mut g = [[0.0; 2]; 2];
    for (mu, row) in g.iter_mut().enumerate() {
        for (nu, v) in row.iter_mut().enumerate() {
            *v = c * alg.kf(&jet.a_l[mu], &jet.a_l[nu]);
        }
    }
    g
}

fn inverse(g: &Mat2) -> Mat2 {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]]
}

fn checked_metric<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64, jet: &Jet) -> Result<Mat2> {
    let g = metric_of(p.algebra(), p.c(), jet);
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let scale = linalg::scale_of(&[g[0][0], g[0][1], g[1][0], g[1][1]]);
    if !(det.abs() >= 1e-12 * scale * scale) {
        return Err(Error::DegeneratePoint {
            z,
            zbar,
            reason: format!("det g = {det:e}"),
        });
    }
    Ok(g)
}

/// `g_{mu nu} = c k(a_{mu,lambda}, a_{nu,lambda})`.
pub fn metric<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64) -> Result<Mat2> {
    let jet = p.jet(z, zbar)?;
    checked_metric(p, z, zbar, &jet)
}

fn christoffel_of(alg: &LieAlgebra, c: f64, jet: &Jet, ginv: &Mat2) -> Christoffel {
    // k_rho_ab = c k(a_rho,l, a_a,bl - [a_a,l, a_b])
    let mut k = [[[0.0; 2]; 2]; 2];
    for (rho, kr) in k.iter_mut().enumerate() {
        for (a, ka) in kr.iter_mut().enumerate() {
            for (b, v) in ka.iter_mut().enumerate() {
                let w = &jet.a_nl[a][b] - &alg.br(&jet.a_l[a], &jet.a[b]);
                *v = c * alg.kf(&jet.a_l[rho], &w);
            }
        }
    }
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for (mu, gm) in gamma.iter_mut().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                gm[a][b] = (0..2).map(|rho| ginv[rho][mu] * k[rho][a][b]).sum();
            }
        }
    }
    gamma
}

/// `Gamma^mu_{ab} = c g^{rho mu} k(a_{rho,lambda}, a_{a,b lambda} - [a_{a,lambda}, a_b])`
/// from the analytic derivatives of the potentials.
pub fn christoffel_direct<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64) -> Result<Christoffel> {
    let jet = p.jet(z, zbar)?;
    let g = checked_metric(p, z, zbar, &jet)?;
    Ok(christoffel_of(p.algebra(), p.c(), &jet, &inverse(&g)))
}

/// Levi-Civita symbols `Gamma^k_{ij} = g^{kr} (d_i g_rj + d_j g_ri - d_r g_ij) / 2`
/// with second-order central differences of the metric.
pub fn christoffel_metric<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64, h: f64) -> Result<Christoffel> {
    let g = metric(p, z, zbar)?;
    let ginv = inverse(&g);
    let flat = |zz: f64, ww: f64| -> Result<Vec<f64>> {
        let m = metric(p, zz, ww)?;
        Ok(vec![m[0][0], m[0][1], m[1][0], m[1][1]])
    };
    let dg: Vec<Vec<f64>> = (0..2)
        .map(|axis| central_diff(flat, z, zbar, axis, h, 2))
        .collect::<Result<_>>()?;
    // d[k][i][j] = d_k g_ij
    let d = |k: usize, i: usize, j: usize| dg[k][2 * i + j];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                gk[i][j] = (0..2)
                    .map(|r| 0.5 * ginv[k][r] * (d(i, r, j) + d(j, r, i) - d(r, i, j)))
                    .sum();
            }
        }
    }
    Ok(gamma)
}

/// Riemann tensor of the induced metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Riemann {
    /// `up[i][j][k][l] = R^i_{jkl}`.
    pub up: [[[[f64; 2]; 2]; 2]; 2],
    /// `down[i][j][k][l] = R_{ijkl} = g_ir R^r_{jkl}`.
    pub down: [[[[f64; 2]; 2]; 2]; 2],
    pub g: Mat2,
}

impl Riemann {
    /// `K = -R_{1212}`.
    pub fn k(&self) -> f64 {
        -self.down[0][1][0][1]
    }

    /// Sectional curvature `-R_{1212} / det g`.
    pub fn sectional(&self) -> f64 {
        let g = &self.g;
        -self.down[0][1][0][1] / (g[0][0] * g[1][1] - g[0][1] * g[1][0])
    }

    /// `Ric_{jk} = R^i_{jki}`.
    pub fn ricci(&self) -> Mat2 {
        let mut r = [[0.0; 2]; 2];
        for (j, row) in r.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = (0..2).map(|i| self.up[i][j][k][i]).sum();
            }
        }
        r
    }

    pub fn scalar(&self) -> f64 {
        let gi = inverse(&self.g);
        let ric = self.ricci();
        (0..2)
            .flat_map(|j| (0..2).map(move |k| (j, k)))
            .map(|(j, k)| gi[j][k] * ric[j][k])
            .sum()
    }
}

/// `R^i_{jkl} = d_l Gamma^i_{kj} - d_k Gamma^i_{lj} + Gamma^i_{lr} Gamma^r_{kj} - Gamma^i_{kr} Gamma^r_{lj}`,
/// with `Gamma` from [`christoffel_direct`] differenced centrally with step `h`.
pub fn riemann<P: Potentials + ?Sized>(p: &P, z: f64, zbar: f64, h: f64) -> Result<Riemann> {
    let g = metric(p, z, zbar)?;
    let gamma = christoffel_direct(p, z, zbar)?;
    let flat = |zz: f64, ww: f64| -> Result<Vec<f64>> {
        let c = christoffel_direct(p, zz, ww)?;
        Ok(c.iter().flatten().flatten().copied().collect())
    };
    let dgam: Vec<Vec<f64>> = (0..2)
        .map(|axis| central_diff(flat, z, zbar, axis, h, 2))
        .collect::<Result<_>>()?;
    let d = |l: usize, i: usize, k: usize, j: usize| dgam[l][4 * i + 2 * k + j];
    let mut up = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let mut v = d(l, i, k, j) - d(k, i, l, j);
                    for r in 0..2 {
                        v += gamma[i][l][r] * gamma[r][k][j] - gamma[i][k][r] * gamma[r][l][j];
                    }
                    up[i][j][k][l] = v;
                }
            }
        }
    }
    let mut down = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    down[i][j][k][l] = (0..2).map(|r| g[i][r] * up[r][j][k][l]).sum();
                }
            }
        }
    }
    Ok(Riemann { up, down, g })
}

fn check_frame_size(alg: &LieAlgebra, frame: &NormalFrame) -> Result<()> {
    if frame.len() + 2 != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim() - 2,
            found: frame.len(),
        });
    }
    Ok(())
}

fn second_form_of(alg: &LieAlgebra, c: f64, jet: &Jet, frame: &NormalFrame) -> Vec<Mat2> {
    frame
        .n0
        .iter()
        .map(|n| {
            let mut b = [[0.0; 2]; 2];
            for (a, row) in b.iter_mut().enumerate() {
                for (bb, v) in row.iter_mut().enumerate() {
                    let w = &alg.br(&jet.a_l[a], &jet.a[bb]) - &jet.a_nl[a][bb];
                    *v = c * alg.kf(n, &w);
                }
            }
            b
        })
        .collect()
}

/// `b_{C a b} = c k(N_C, [a_{a,lambda}, a_b] - a_{a,b lambda})`.
pub fn second_form<P: Potentials + ?Sized>(p: &P, frame: &NormalFrame, z: f64, zbar: f64) -> Result<Vec<Mat2>> {
    check_frame_size(p.algebra(), frame)?;
    let jet = p.jet(z, zbar)?;
    Ok(second_form_of(p.algebra(), p.c(), &jet, frame))
}

/// `d_a N_C` by fourth-order central differences of the frame field.
fn frame_derivatives<F: FrameField + ?Sized>(frames: &F, z: f64, zbar: f64, h: f64) -> Result<[Vec<AlgebraElement>; 2]> {
    let flat = |zz: f64, ww: f64| -> Result<Vec<f64>> {
        let f = frames.frame(zz, ww)?;
        Ok(f.n0.iter().flat_map(|n| n.as_slice().to_vec()).collect())
    };
    let split = |v: Vec<f64>, m: usize| -> Vec<AlgebraElement> {
        v.chunks(m).map(|c| AlgebraElement::from_vec(c.to_vec())).collect()
    };
    let m = frames.frame(z, zbar)?.n0.first().map_or(0, |n| n.dim());
    Ok([
        split(central_diff(flat, z, zbar, 0, h, 4)?, m),
        split(central_diff(flat, z, zbar, 1, h, 4)?, m),
    ])
}

/// `b_{C a b} = c k(a_{b,lambda}, d_a N_C + [a_a, N_C])`, with the frame
/// differentiated numerically.
pub fn second_form_from_frame_derivatives<P, F>(p: &P, frames: &F, z: f64, zbar: f64, h: f64) -> Result<Vec<Mat2>>
where
    P: Potentials + ?Sized,
    F: FrameField + ?Sized,
{
    let alg = p.algebra();
    let c = p.c();
    let jet = p.jet(z, zbar)?;
    let frame = frames.frame(z, zbar)?;
    check_frame_size(alg, &frame)?;
    let dn = frame_derivatives(frames, z, zbar, h)?;
    Ok(frame
        .n0
        .iter()
        .enumerate()
        .map(|(cidx, n)| {
            let mut b = [[0.0; 2]; 2];
            for (a, row) in b.iter_mut().enumerate() {
                let cov = &dn[a][cidx] + &alg.br(&jet.a[a], n);
                for (bb, v) in row.iter_mut().enumerate() {
                    *v = c * alg.kf(&jet.a_l[bb], &cov);
                }
            }
            b
        })
        .collect())
}

/// `mu[B][A][a] = c k(N_B, d_a N_A + [a_a, N_A])`. Identically zero for
/// hypersurfaces.
pub fn normal_connection<P, F>(p: &P, frames: &F, z: f64, zbar: f64, h: f64) -> Result<Vec<Vec<[f64; 2]>>>
where
    P: Potentials + ?Sized,
    F: FrameField + ?Sized,
{
    let alg = p.algebra();
    let frame = frames.frame(z, zbar)?;
    check_frame_size(alg, &frame)?;
    let k = frame.len();
    if k == 1 {
        return Ok(vec![vec![[0.0; 2]]]);
    }
    let c = p.c();
    let jet = p.jet(z, zbar)?;
    let dn = frame_derivatives(frames, z, zbar, h)?;
    let mut mu = vec![vec![[0.0; 2]; k]; k];
    for a_idx in 0..k {
        for alpha in 0..2 {
            let cov = &dn[alpha][a_idx] + &alg.br(&jet.a[alpha], &frame.n0[a_idx]);
            for (b_idx, row) in mu.iter_mut().enumerate() {
                row[a_idx][alpha] = c * alg.kf(&frame.n0[b_idx], &cov);
            }
        }
    }
    Ok(mu)
}

/// `K = eta^{CD} (b_{C11} b_{D22} - b_{C12} b_{D12})`.
pub fn gauss_extrinsic_curvature(b: &[Mat2], eta: &[i8]) -> f64 {
    b.iter()
        .zip(eta)
        .map(|(bc, s)| f64::from(*s) * (bc[0][0] * bc[1][1] - bc[0][1] * bc[1][0]))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureMode {
    /// `K = g_12 d_1 Gamma^2_22` with the field equation substituted for
    /// `d_1 d_2 phi`; refused off shell.
    Onshell,
    /// `K = -R_1212` from differenced Christoffel symbols.
    FiniteDifference { h: f64 },
    /// The Gauss-equation combination of the second fundamental form.
    Extrinsic,
}

/// Gaussian curvature `K = -R_1212` of a Toda surface.
pub fn gaussian_curvature(surface: &TodaSurface<'_>, z: f64, zbar: f64, mode: CurvatureMode) -> Result<f64> {
    match mode {
        CurvatureMode::Onshell => onshell_curvature(surface, z, zbar),
        CurvatureMode::FiniteDifference { h } => Ok(riemann(surface, z, zbar, h)?.k()),
        CurvatureMode::Extrinsic => {
            let frame = super::normal_frame(surface, z, zbar)?;
            let b = second_form(surface, &frame, z, zbar)?;
            Ok(gauss_extrinsic_curvature(&b, &frame.eta))
        }
    }
}

fn onshell_curvature(surface: &TodaSurface<'_>, z: f64, zbar: f64) -> Result<f64> {
    let (model, fields) = (surface.model, surface.fields);
    let res = field_residual(model, fields, z, zbar)?;
    let worst = model
        .cartan_coefficients(&res)
        .into_iter()
        .fold(0.0_f64, |a, v| a.max(v.abs()));
    if !(worst <= ONSHELL_TOL) {
        return Err(Error::Refused(format!(
            "on-shell curvature needs a solution; field residual {worst:.3e} at ({z}, {zbar})"
        )));
    }
    let g = crate::toda::gauge_at(model, fields, z, zbar)?;
    let alg = model.algebra();
    let ep = model.eps_plus();
    let p = &g.b_conj_eps;
    let (d1, d2) = (&g.dbbinv_1, &g.dbbinv_2);
    // Gamma^2_22 = k([D2, P], eps+) / k(P, eps+); d1 P = [D1, P], d1 D2 = sum rhs_i h_i
    let num = alg.kf(&alg.br(d2, p), ep);
    let den = g.pairing;
    let d1_p = alg.br(d1, p);
    let d12 = model.cartan_combination(&model.field_rhs(&g.phi));
    let d_num = alg.kf(&(alg.br(&d12, p) + alg.br(d2, &d1_p)), ep);
    let d_den = alg.kf(&d1_p, ep);
    let d_gamma = (d_num * den - num * d_den) / (den * den);
    Ok(model.c() * den * d_gamma)
}

/// Orthonormal tangent pair `V_1 = d_1 + d_2 / (2 g_12)`, `V_2 = d_1 - d_2 / (2 g_12)`
/// (components), valid when `g_11 = g_22 = 0`.
pub fn tangent_pair(g: &Mat2) -> Result<[[f64; 2]; 2]> {
    let scale = linalg::scale_of(&[g[0][1]]);
    if g[0][0].abs() > 1e-12 * scale || g[1][1].abs() > 1e-12 * scale || g[0][1] == 0.0 {
        return Err(Error::Consistency(
            "null tangent pair needs g_11 = g_22 = 0 and g_12 != 0".into(),
        ));
    }
    let s = 0.5 / g[0][1];
    Ok([[1.0, s], [1.0, -s]])
}

/// Mean curvature data at a point.
#[derive(Debug, Clone)]
pub struct MeanCurvature {
    /// `H = U^-1 (sum_A h^A N^0_A) U`.
    pub vector: AlgebraElement,
    /// `c k(H, H)`.
    pub norm_sq: f64,
    /// Frame components `h^A`.
    pub components: Vec<f64>,
    /// Largest component of `D^perp_a H`, `a = 1, 2`.
    pub normal_derivative: f64,
}

fn mean_components(b: &[Mat2], eta: &[i8], g: &Mat2) -> Result<Vec<f64>> {
    let v = tangent_pair(g)?;
    Ok(b.iter()
        .zip(eta)
        .map(|(bc, s)| {
            let pi = |x: &[f64; 2]| -> f64 {
                (0..2)
                    .flat_map(|a| (0..2).map(move |c| (a, c)))
                    .map(|(a, c)| x[a] * x[c] * bc[a][c])
                    .sum()
            };
            0.5 * f64::from(*s) * (pi(&v[0]) - pi(&v[1]))
        })
        .collect())
}

/// `H = (Pi(V_1, V_1) - Pi(V_2, V_2)) / 2` and its normal derivative.
pub fn mean_curvature<P, F>(p: &P, frames: &F, state: &TransportState, z: f64, zbar: f64, h: f64) -> Result<MeanCurvature>
where
    P: Potentials + ?Sized,
    F: FrameField + ?Sized,
{
    let end = state.end_point();
    if (end.0 - z).abs() > 1e-12 || (end.1 - zbar).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "transport ends at {end:?}, not at ({z}, {zbar})"
        )));
    }
    let alg = p.algebra();
    let comps_at = |zz: f64, ww: f64| -> Result<Vec<f64>> {
        let frame = frames.frame(zz, ww)?;
        let b = second_form(p, &frame, zz, ww)?;
        mean_components(&b, &frame.eta, &metric(p, zz, ww)?)
    };
    let frame = frames.frame(z, zbar)?;
    let comps = comps_at(z, zbar)?;
    let mut alg_vec = alg.zero();
    for (n, hc) in frame.n0.iter().zip(&comps) {
        alg_vec += &n.scaled(*hc);
    }
    let vector = state.pull_back(&alg_vec)?;
    let norm_sq = p.c() * alg.kf(&vector, &vector);

    let mu = normal_connection(p, frames, z, zbar, h)?;
    let mut normal_derivative: f64 = 0.0;
    for alpha in 0..2 {
        let dh = central_diff(comps_at, z, zbar, alpha, h, 4)?;
        for a in 0..comps.len() {
            // mu^A_{B alpha} = eta_A mu_{A B alpha}
            let conn: f64 = (0..comps.len())
                .map(|b| comps[b] * f64::from(frame.eta[a]) * mu[a][b][alpha])
                .sum();
            normal_derivative = normal_derivative.max((dh[a] + conn).abs());
        }
    }
    Ok(MeanCurvature {
        vector,
        norm_sq,
        components: comps,
        normal_derivative,
    })
}

/// Residuals of the Gauss, Codazzi and Ricci equations in a flat ambient space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcrResiduals {
    pub gauss: f64,
    pub codazzi: f64,
    pub ricci: f64,
}

/// Evaluates the three compatibility equations with intrinsic quantities from
/// Christoffel differences and extrinsic ones from the frame field; all
/// numerical derivatives use step `h`.
pub fn gcr_residuals<P, F>(p: &P, frames: &F, z: f64, zbar: f64, h: f64) -> Result<GcrResiduals>
where
    P: Potentials + ?Sized,
    F: FrameField + ?Sized,
{
    let frame = frames.frame(z, zbar)?;
    let eta: Vec<f64> = frame.eta.iter().map(|s| f64::from(*s)).collect();
    let k = frame.len();
    let b = second_form(p, &frame, z, zbar)?;
    let riem = riemann(p, z, zbar, h)?;
    let g = riem.g;
    let ginv = inverse(&g);
    let gamma = christoffel_direct(p, z, zbar)?;

    // Gauss: R_{dgab} = eta^{CD} (b_{C a g} b_{D b d} - b_{C a d} b_{D b g})
    let mut gauss: f64 = 0.0;
    for d in 0..2 {
        for gi in 0..2 {
            for a in 0..2 {
                for bi in 0..2 {
                    let ext: f64 = (0..k)
                        .map(|c| eta[c] * (b[c][a][gi] * b[c][bi][d] - b[c][a][d] * b[c][bi][gi]))
                        .sum();
                    gauss = gauss.max((riem.down[d][gi][a][bi] - ext).abs());
                }
            }
        }
    }

    let mu = normal_connection(p, frames, z, zbar, h)?;
    // mu^B_{D a} = eta_B mu_{B D a}
    let mu_up = |bb: usize, dd: usize, a: usize| eta[bb] * mu[bb][dd][a];

    // d_a b_{D b g} from b at neighbours with the same frame field
    let b_flat = |zz: f64, ww: f64| -> Result<Vec<f64>> {
        let f = frames.frame(zz, ww)?;
        Ok(second_form(p, &f, zz, ww)?
            .iter()
            .flat_map(|m| [m[0][0], m[0][1], m[1][0], m[1][1]])
            .collect())
    };
    let db: Vec<Vec<f64>> = (0..2)
        .map(|axis| central_diff(b_flat, z, zbar, axis, h, 2))
        .collect::<Result<_>>()?;
    let cov = |dd: usize, bi: usize, gi: usize, a: usize| -> f64 {
        let mut v = db[a][4 * dd + 2 * bi + gi];
        for t in 0..2 {
            v -= gamma[t][a][gi] * b[dd][bi][t] + gamma[t][a][bi] * b[dd][t][gi];
        }
        v
    };
    let mut codazzi: f64 = 0.0;
    for dd in 0..k {
        for a in 0..2 {
            for bi in 0..2 {
                for gi in 0..2 {
                    let conn: f64 = (0..k)
                        .map(|bb| b[bb][bi][gi] * mu_up(bb, dd, a) - b[bb][a][gi] * mu_up(bb, dd, bi))
                        .sum();
                    let r = conn - cov(dd, bi, gi, a) + cov(dd, a, gi, bi);
                    codazzi = codazzi.max(r.abs());
                }
            }
        }
    }

    let ricci = if k == 1 {
        0.0
    } else {
        let mu_flat = |zz: f64, ww: f64| -> Result<Vec<f64>> {
            let m = normal_connection(p, frames, zz, ww, h)?;
            Ok(m.iter().flatten().flat_map(|v| v.to_vec()).collect())
        };
        let dmu: Vec<Vec<f64>> = (0..2)
            .map(|axis| central_diff(mu_flat, z, zbar, axis, h, 2))
            .collect::<Result<_>>()?;
        // d_x mu^C_{A a}
        let dmu_up = |x: usize, cc: usize, aa: usize, a: usize| eta[cc] * dmu[x][(cc * k + aa) * 2 + a];
        let mut worst: f64 = 0.0;
        for aa in 0..k {
            for bb in 0..k {
                for a in 0..2 {
                    for bi in 0..2 {
                        // eta_{CB} r^C_{A a b} = eta_B r^B_{A a b}
                        let mut r = dmu_up(bi, bb, aa, a) - dmu_up(a, bb, aa, bi);
                        for e in 0..k {
                            r += mu_up(e, aa, a) * mu_up(bb, e, bi) - mu_up(e, aa, bi) * mu_up(bb, e, a);
                        }
                        let lhs = eta[bb] * r;
                        let mut rhs = 0.0;
                        for gi in 0..2 {
                            for t in 0..2 {
                                rhs += (b[aa][a][gi] * b[bb][bi][t] - b[bb][a][gi] * b[aa][bi][t]) * ginv[t][gi];
                            }
                        }
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
        }
        worst
    };
    Ok(GcrResiduals { gauss, codazzi, ricci })
}

/// All per-point quantities of a surface.
#[derive(Debug, Clone)]
pub struct FundamentalForms {
    pub g: Mat2,
    pub g_inv: Mat2,
    pub gamma: Christoffel,
    /// `b[A][a][b]` from the potentials.
    pub b: Vec<Mat2>,
    /// `b` recomputed from differenced frames.
    pub b_from_frames: Vec<Mat2>,
    /// `mu_conn[B][A][a] = mu_{B A a}`.
    pub mu_conn: Vec<Vec<[f64; 2]>>,
    pub eta: Vec<i8>,
    /// `-R_1212` from differenced Christoffel symbols.
    pub k_fd: f64,
    /// Gauss-equation combination of `b`.
    pub k_extrinsic: f64,
    /// `-R_1212 / det g`.
    pub k_sectional: f64,
    pub riemann: Riemann,
    /// `c k(H, H)` from the frame components of `H`.
    pub h_norm_sq: f64,
}

/// Evaluates the fundamental forms at a point with differencing step `h`.
pub fn point_forms<P, F>(p: &P, frames: &F, z: f64, zbar: f64, h: f64) -> Result<FundamentalForms>
where
    P: Potentials + ?Sized,
    F: FrameField + ?Sized,
{
    let g = metric(p, z, zbar)?;
    let gamma = christoffel_direct(p, z, zbar)?;
    let frame = frames.frame(z, zbar)?;
    let b = second_form(p, &frame, z, zbar)?;
    let b_from_frames = second_form_from_frame_derivatives(p, frames, z, zbar, h)?;
    let mu_conn = normal_connection(p, frames, z, zbar, h)?;
    let riemann = riemann(p, z, zbar, h)?;
    let comps = mean_components(&b, &frame.eta, &g).unwrap_or_default();
    let h_norm_sq = comps.iter().zip(&frame.eta).map(|(x, s)| f64::from(*s) * x * x).sum();
    Ok(FundamentalForms {
        g_inv: inverse(&g),
        g,
        gamma,
        k_extrinsic: gauss_extrinsic_curvature(&b, &frame.eta),
        b,
        b_from_frames,
        mu_conn,
        eta: frame.eta,
        k_fd: riemann.k(),
        k_sectional: riemann.sectional(),
        riemann,
        h_norm_sq,
    })
}
