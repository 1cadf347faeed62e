//! Brute-force property checks shared by the property suites and the
//! acceptance run. Each returns the worst violation found for one input.

#![allow(dead_code)]

use toda_geometry::algebra::{build_sl, AlgebraElement, SlAlgebra};
use toda_geometry::geometry::{metric, normal_connection, second_form, tangent_pair, SolverFrames, TodaSurface};
use toda_geometry::toda::{exact_solution, Couplings, FieldConfig, SolutionParams, TodaModel};

pub const ALPHA_SQ: f64 = 2.0;

/// One randomized input: couplings, a point and three algebra coefficient vectors.
#[derive(Debug, Clone)]
pub struct Case {
    pub n: usize,
    pub c: f64,
    pub mu_plus: f64,
    pub a: f64,
    pub lambda: f64,
    pub z: f64,
    pub zbar: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl Case {
    pub fn sl(&self) -> SlAlgebra {
        build_sl(self.n, ALPHA_SQ).unwrap()
    }

    /// A model solved exactly by the built-in solution with amplitude `a`.
    pub fn model(&self) -> TodaModel {
        let product = if self.n == 2 { self.a * self.a } else { 2.0 * self.a * self.a };
        TodaModel::sl(
            self.n,
            ALPHA_SQ,
            Couplings {
                mu_plus: self.mu_plus,
                mu_minus: product / self.mu_plus,
                c: self.c,
                lambda: self.lambda,
            },
        )
        .unwrap()
    }

    pub fn fields(&self) -> FieldConfig {
        let name = if self.n == 2 { "liouville_cosh" } else { "toda_sl3_symmetric" };
        exact_solution(name, &SolutionParams::with_a(self.a)).unwrap()
    }
}

fn el(v: &[f64]) -> AlgebraElement {
    AlgebraElement::from_vec(v.to_vec())
}

fn scale(v: &[AlgebraElement]) -> f64 {
    v.iter().map(|e| e.max_abs()).fold(1.0, f64::max)
}

/// `[x,[y,w]] + [y,[w,x]] + [w,[x,y]]` relative to the input size.
pub fn jacobi(case: &Case) -> f64 {
    let sl = case.sl();
    let alg = &sl.algebra;
    let (x, y, w) = (el(&case.x), el(&case.y), el(&case.w));
    let br = |a: &AlgebraElement, b: &AlgebraElement| alg.bracket(a, b).unwrap();
    let sum = br(&x, &br(&y, &w)) + br(&y, &br(&w, &x)) + br(&w, &br(&x, &y));
    sum.max_abs() / scale(&[x, y, w]).powi(3)
}

/// `k([x,y],w) + k(y,[x,w])`, together with the deviation of `k` from
/// `(2 / alpha^2) tr(XY)` in the defining representation.
pub fn killing_invariance(case: &Case) -> f64 {
    let sl = case.sl();
    let alg = &sl.algebra;
    let (x, y, w) = (el(&case.x), el(&case.y), el(&case.w));
    let k = |a: &AlgebraElement, b: &AlgebraElement| alg.killing(a, b).unwrap();
    let inv = (k(&alg.bracket(&x, &y).unwrap(), &w) + k(&y, &alg.bracket(&x, &w).unwrap())).abs();
    let trace = (sl.matrix_of(&x) * sl.matrix_of(&y)).trace() * 2.0 / ALPHA_SQ;
    let s = scale(&[x.clone(), y.clone(), w]);
    (inv / s.powi(3)).max((k(&x, &y) - trace).abs() / (s * s))
}

/// `k(G_i, G_j) = 0` unless `i + j = 0`, for random elements of each grade.
pub fn grading_orthogonality(case: &Case) -> f64 {
    let sl = case.sl();
    let (alg, grading) = (&sl.algebra, &sl.grading);
    let x = el(&case.x);
    let y = el(&case.y);
    let mut worst: f64 = 0.0;
    let grades: Vec<i32> = grading.subspaces().keys().copied().collect();
    for &i in &grades {
        for &j in &grades {
            if i + j != 0 {
                let v = alg.killing(&grading.project(&x, i), &grading.project(&y, j)).unwrap();
                worst = worst.max(v.abs());
            }
        }
    }
    worst / scale(&[x, y]).powi(2)
}

/// `|b_{A12} - b_{A21}|` with the solver frame.
pub fn b_symmetry(case: &Case) -> f64 {
    let (m, f) = (case.model(), case.fields());
    let s = TodaSurface::new(&m, &f);
    let frame = toda_geometry::geometry::normal_frame(&s, case.z, case.zbar).unwrap();
    let b = second_form(&s, &frame, case.z, case.zbar).unwrap();
    let size = b.iter().flatten().flatten().fold(1.0_f64, |a, v| a.max(v.abs()));
    b.iter().map(|m| (m[0][1] - m[1][0]).abs()).fold(0.0, f64::max) / size
}

/// `|mu_{ABa} + mu_{BAa}|` with frames anchored at the point.
pub fn mu_antisymmetry(case: &Case) -> f64 {
    let (m, f) = (case.model(), case.fields());
    let s = TodaSurface::new(&m, &f);
    let (frames, _) = SolverFrames::anchored(&s, case.z, case.zbar).unwrap();
    let mu = normal_connection(&s, &frames, case.z, case.zbar, 1e-3).unwrap();
    let k = mu.len();
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in 0..k {
            for al in 0..2 {
                worst = worst.max((mu[a][b][al] + mu[b][a][al]).abs());
            }
        }
    }
    worst
}

/// Deviation of `g(V_i, V_j)` from `diag(1, -1)`; also fails unless the
/// induced metric has exactly one negative eigenvalue.
pub fn tangent_signature(case: &Case) -> f64 {
    let (m, f) = (case.model(), case.fields());
    let s = TodaSurface::new(&m, &f);
    let g = metric(&s, case.z, case.zbar).unwrap();
    let v = tangent_pair(&g).unwrap();
    let ip = |x: &[f64; 2], y: &[f64; 2]| -> f64 {
        (0..2).flat_map(|i| (0..2).map(move |j| x[i] * g[i][j] * y[j])).sum()
    };
    let dev = (ip(&v[0], &v[0]) - 1.0)
        .abs()
        .max((ip(&v[1], &v[1]) + 1.0).abs())
        .max(ip(&v[0], &v[1]).abs());
    // eigenvalues of a symmetric 2x2 matrix
    let (tr, det) = (g[0][0] + g[1][1], g[0][0] * g[1][1] - g[0][1] * g[1][0]);
    let disc = (tr * tr / 4.0 - det).sqrt();
    let negatives = [tr / 2.0 + disc, tr / 2.0 - disc].iter().filter(|e| **e < 0.0).count();
    if negatives == 1 {
        dev
    } else {
        f64::INFINITY
    }
}

/// Name, check and tolerance of every shared property.
pub const PROPERTIES: [(&str, fn(&Case) -> f64, f64); 7] = [
    ("jacobi", jacobi, 1e-12),
    ("killing_ad_invariance", killing_invariance, 1e-12),
    ("grading_orthogonality", grading_orthogonality, 1e-12),
    ("b_symmetry", b_symmetry, 1e-10),
    ("mu_antisymmetry", mu_antisymmetry, 1e-8),
    ("tangent_signature", tangent_signature, 1e-10),
    ("nu_sub_both_signs", nu_sub_both_signs, 0.0),
];

/// 0 when the induced metric has index one for both `c` and `-c`.
pub fn nu_sub_both_signs(case: &Case) -> f64 {
    let mut flipped = case.clone();
    flipped.c = -case.c;
    if tangent_signature(case).is_finite() && tangent_signature(&flipped).is_finite() {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Case from uniform samples in `[0, 1)`.
pub fn case_from(n: usize, u: &mut impl FnMut() -> f64) -> Case {
    let dim = n * n - 1;
    let sign = if u() < 0.5 { -1.0 } else { 1.0 };
    let mut vec = || (0..dim).map(|_| 4.0 * u() - 2.0).collect::<Vec<f64>>();
    let (x, y, w) = (vec(), vec(), vec());
    Case {
        n,
        c: sign * (0.2 + 2.8 * u()),
        mu_plus: if u() < 0.5 { -1.0 } else { 1.0 } * (0.3 + 1.7 * u()),
        a: 0.3 + 1.2 * u(),
        lambda: 2.0 * u() - 1.0,
        z: u(),
        zbar: u(),
        x,
        y,
        w,
    }
}
