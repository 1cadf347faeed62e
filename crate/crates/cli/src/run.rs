//! The grid sweep and artifact emission.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use toda_geometry::geometry::{
    christoffel_direct, christoffel_metric, gauge_invariance_check, gaussian_curvature,
    gcr_residuals, mean_curvature, point_forms, CurvatureMode, FrameField, GcrResiduals, Mat2,
    SolverFrames, TodaSurface,
};
use toda_geometry::toda::{
    exact_solution, field_residual, fmt_f64, goursat_solve, required_coupling_product,
    solution_fields, zero_curvature_residual, CharacteristicData, Couplings, Domain, FieldConfig,
    GridField, SolutionParams, TodaModel,
};
use toda_geometry::transport::{immersion_patch, transport, Staircase};
use toda_geometry::Error;

use crate::config::{RunConfig, SolutionSource, CHECK_NAMES};
use crate::report::*;
use crate::CliError;

/// Disagreement between the two second-form routes that flags a point.
const ROUTE_FLAG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Skip the CSV artifacts; the report is still written.
    pub check_only: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// Paths written, in order.
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.pass {
            0
        } else {
            1
        }
    }
}

struct Setup {
    model: TodaModel,
    fields: FieldConfig,
    label: String,
    goursat: Option<GoursatInfo>,
    warnings: Vec<String>,
}

fn build_model(cfg: &RunConfig) -> Result<TodaModel, CliError> {
    let m = &cfg.model;
    TodaModel::sl(
        cfg.algebra.n,
        cfg.algebra.alpha_sq,
        Couplings {
            mu_plus: m.mu_plus,
            mu_minus: m.mu_minus,
            c: m.c,
            lambda: m.lambda,
        },
    )
    .map_err(|e| CliError::Config(e.to_string()))
}

/// Amplitude matching the couplings when none is given.
fn amplitude(name: &str, a: Option<f64>, mu_prod: f64) -> Result<Option<f64>, CliError> {
    if a.is_some() || name == "vacuum_perturbation_grid" {
        return Ok(a);
    }
    let unit = required_coupling_product(name, 1.0).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((unit * mu_prod > 0.0).then(|| (mu_prod / unit).sqrt()))
}

fn builtin(cfg: &RunConfig, model: &TodaModel, name: &str, a: Option<f64>, warnings: &mut Vec<String>) -> Result<FieldConfig, CliError> {
    let n = solution_fields(name).map_err(|e| CliError::Config(e.to_string()))?;
    if n != model.n_fields() {
        return Err(CliError::Config(format!(
            "solution {name:?} has {n} fields but sl({}) needs {}",
            cfg.algebra.n,
            model.n_fields()
        )));
    }
    let mu_prod = cfg.model.mu_plus * cfg.model.mu_minus;
    let a = amplitude(name, a, mu_prod)?;
    let g = &cfg.grid;
    let params = SolutionParams {
        a,
        grid: Domain::rect(g.z_min, g.z_max, g.zbar_min, g.zbar_max),
        nodes: (g.nz, g.nzbar),
    };
    if let Some(a) = params.a.or(SolutionParams::default().a) {
        let want = required_coupling_product(name, a).map_err(|e| CliError::Config(e.to_string()))?;
        if (want - mu_prod).abs() > 1e-12 * want.abs().max(1.0) {
            warnings.push(format!(
                "{name} with a = {a} solves the model only for mu+ mu- = {want}, configured {mu_prod}"
            ));
        }
    }
    exact_solution(name, &params).map_err(|e| CliError::Config(e.to_string()))
}

fn read_grid(path: &Path, model: &TodaModel) -> Result<FieldConfig, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let grid = GridField::read_csv(file).map_err(|e| match e {
        Error::Parse { line, message } => CliError::Parse {
            line,
            column: 0,
            message: format!("{}: {message}", path.display()),
        },
        other => CliError::Io(format!("{}: {other}", path.display())),
    })?;
    if grid.n_fields != model.n_fields() {
        return Err(CliError::Config(format!(
            "{} holds {} fields, the model needs {}",
            path.display(),
            grid.n_fields,
            model.n_fields()
        )));
    }
    Ok(FieldConfig::grid(grid))
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let model = build_model(cfg)?;
    let mut warnings = Vec::new();
    let (fields, label, goursat) = match cfg.source()? {
        SolutionSource::Builtin { name, a } => {
            let f = builtin(cfg, &model, &name, a, &mut warnings)?;
            (f, name, None)
        }
        SolutionSource::GridFile(path) => {
            let f = read_grid(&path, &model)?;
            (f, format!("grid:{}", path.display()), None)
        }
        SolutionSource::Goursat(gs) => {
            let g = &cfg.grid;
            let h = gs.step;
            // a margin of whole steps keeps the derivative stencils of edge nodes on the grid
            let margin = h * (4.0 * cfg.fd_step / h).ceil().max(2.0);
            let count = |span: f64| ((span + 2.0 * margin) / h - 1e-9).ceil() as usize + 1;
            let nodes = (count(g.z_max - g.z_min), count(g.zbar_max - g.zbar_min));
            let corner = (g.z_min - margin, g.zbar_min - margin);
            let data = if gs.data == "zero" {
                CharacteristicData::zeros(model.n_fields(), corner, (h, h), nodes)
            } else {
                let src = builtin(cfg, &model, &gs.data, gs.a, &mut warnings)?;
                CharacteristicData::from_fields(&src, corner, (h, h), nodes)?
            };
            let sol = goursat_solve(&model, &data)?;
            if let Some(msg) = &sol.aborted {
                warnings.push(format!("Goursat march stopped early: {msg}"));
            }
            let info = GoursatInfo {
                step: h,
                max_residual: sol.max_residual,
                aborted: sol.aborted.clone(),
            };
            (sol.fields, format!("goursat:{}", gs.data), Some(info))
        }
    };
    Ok(Setup {
        model,
        fields,
        label,
        goursat,
        warnings,
    })
}

struct PointValues {
    g12: f64,
    k_closed: Option<f64>,
    k_fd: f64,
    k_gauss: f64,
    b: Vec<Mat2>,
    mu: Vec<Vec<[f64; 2]>>,
    h_norm_sq: f64,
    dperp_h: f64,
    field_eq: f64,
    zero_curvature: f64,
    gcr: GcrResiduals,
    b_routes: f64,
    christoffel: f64,
    gauge: f64,
    drift: f64,
}

impl PointValues {
    fn check(&self, name: &str) -> f64 {
        match name {
            "field_eq" => self.field_eq,
            "zero_curvature" => self.zero_curvature,
            "gcr" => self.gcr.gauss.max(self.gcr.codazzi).max(self.gcr.ricci),
            "gauge_invariance" => self.gauge,
            _ => self.christoffel,
        }
    }
}

struct Context<'a, F: FrameField> {
    cfg: &'a RunConfig,
    model: &'a TodaModel,
    fields: &'a FieldConfig,
    surface: TodaSurface<'a>,
    frames: &'a F,
    gauge_x: toda_geometry::algebra::AlgebraElement,
    /// Base point of the transports, the frame anchor.
    base: (f64, f64),
}

fn evaluate<F: FrameField>(ctx: &Context<'_, F>, z: f64, zbar: f64) -> Result<PointValues, Error> {
    let (model, fields, s) = (ctx.model, ctx.fields, &ctx.surface);
    let h = ctx.cfg.fd_step;
    let field_eq = model
        .cartan_coefficients(&field_residual(model, fields, z, zbar)?)
        .into_iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let zero_curvature = zero_curvature_residual(model, fields, z, zbar)?.max_abs();
    let forms = point_forms(s, ctx.frames, z, zbar, h)?;
    let k_closed = if ctx.cfg.algebra.n == 2 {
        let phi = fields.sample(z, zbar)?.phi[0];
        let c = model.c();
        let mm = ctx.cfg.model.mu_plus * ctx.cfg.model.mu_minus;
        Some(-(4.0 * c / ctx.cfg.algebra.alpha_sq) * mm * mm * (-4.0 * phi).exp())
    } else {
        match gaussian_curvature(s, z, zbar, CurvatureMode::Onshell) {
            Ok(k) => Some(k),
            Err(Error::Refused(_)) => None,
            Err(e) => return Err(e),
        }
    };
    let b_routes = forms
        .b
        .iter()
        .flatten()
        .flatten()
        .zip(forms.b_from_frames.iter().flatten().flatten())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let gcr = gcr_residuals(s, ctx.frames, z, zbar, h)?;
    let gd = christoffel_direct(s, z, zbar)?;
    let gm = christoffel_metric(s, z, zbar, h)?;
    let christoffel = gd
        .iter()
        .flatten()
        .flatten()
        .zip(gm.iter().flatten().flatten())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let gauge = gauge_invariance_check(s, &ctx.gauge_x, &[(z, zbar)], h)?.max();
    let st = transport(model, fields, &Staircase::z_first(ctx.base, (z, zbar)), ctx.cfg.transport_step)?;
    let mc = mean_curvature(s, ctx.frames, &st, z, zbar, h)?;
    Ok(PointValues {
        g12: forms.g[0][1],
        k_closed,
        k_fd: forms.k_fd,
        k_gauss: forms.k_extrinsic,
        b: forms.b,
        mu: forms.mu_conn,
        h_norm_sq: mc.norm_sq,
        dperp_h: mc.normal_derivative,
        field_eq,
        zero_curvature,
        gcr,
        b_routes,
        christoffel,
        gauge,
        drift: st.drift_per_length(),
    })
}

fn csv_header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = ["z", "zbar", "g12", "K_closed", "K_fd", "K_gauss"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for a in 1..=k {
        for ab in ["11", "12", "21", "22"] {
            h.push(format!("b{a}_{ab}"));
        }
    }
    for b in 1..=k {
        for a in 1..=k {
            for al in 1..=2 {
                h.push(format!("mu{b}{a}_{al}"));
            }
        }
    }
    h.extend(
        [
            "H_norm_sq",
            "DperpH",
            "field_eq",
            "zero_curvature",
            "gauss",
            "codazzi",
            "ricci",
            "b_routes",
            "christoffel_appendix",
            "gauge_invariance",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    h
}

fn csv_row(z: f64, zbar: f64, v: &Result<PointValues, String>, width: usize) -> Vec<String> {
    let mut row = vec![fmt_f64(z), fmt_f64(zbar)];
    match v {
        Err(_) => row.extend(std::iter::repeat("quarantined".to_string()).take(width - 2)),
        Ok(p) => {
            row.push(fmt_f64(p.g12));
            row.push(p.k_closed.map_or_else(|| "refused".to_string(), fmt_f64));
            row.push(fmt_f64(p.k_fd));
            row.push(fmt_f64(p.k_gauss));
            row.extend(p.b.iter().flat_map(|m| m.iter().flatten().map(|x| fmt_f64(*x)).collect::<Vec<_>>()));
            row.extend(p.mu.iter().flatten().flatten().map(|x| fmt_f64(*x)));
            for x in [
                p.h_norm_sq,
                p.dperp_h,
                p.field_eq,
                p.zero_curvature,
                p.gcr.gauss,
                p.gcr.codazzi,
                p.gcr.ricci,
                p.b_routes,
                p.christoffel,
                p.gauge,
            ] {
                row.push(fmt_f64(x));
            }
        }
    }
    row
}

fn to_csv(records: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Writes all buffers or none: on failure the files already written are removed.
fn write_all(files: &[(PathBuf, Vec<u8>)]) -> Result<Vec<PathBuf>, CliError> {
    let mut done = Vec::new();
    for (path, bytes) in files {
        let res = File::create(path).and_then(|mut f| f.write_all(bytes));
        if let Err(e) = res {
            for p in &done {
                let _ = std::fs::remove_file(p);
            }
            return Err(CliError::Io(format!("{}: {e}", path.display())));
        }
        done.push(path.clone());
    }
    Ok(done)
}

/// Runs the configured sweep. Errors mean nothing was written.
pub fn run(cfg: &RunConfig, opts: RunOptions) -> Result<RunOutcome, CliError> {
    let Setup {
        model,
        fields,
        label,
        goursat,
        mut warnings,
    } = setup(cfg)?;
    let alg = model.algebra();
    let surface = TodaSurface::new(&model, &fields);
    let (zs, ws) = (cfg.grid.z_nodes(), cfg.grid.zbar_nodes());
    let points: Vec<(f64, f64)> = zs.iter().flat_map(|z| ws.iter().map(move |w| (*z, *w))).collect();

    // anchor the frame plan at the node nearest the centre that admits a frame
    let centre = (
        0.5 * (cfg.grid.z_min + cfg.grid.z_max),
        0.5 * (cfg.grid.zbar_min + cfg.grid.zbar_max),
    );
    let mut order: Vec<(f64, f64)> = points.clone();
    order.sort_by(|a, b| {
        let d = |p: &(f64, f64)| (p.0 - centre.0).powi(2) + (p.1 - centre.1).powi(2);
        d(a).total_cmp(&d(b))
    });
    let anchored = order
        .iter()
        .find_map(|&(z, w)| SolverFrames::anchored(&surface, z, w).ok().map(|a| (a, (z, w))));
    let Some(((frames, anchor_frame), anchor)) = anchored else {
        return Err(CliError::Core(Error::DegeneratePoint {
            z: centre.0,
            zbar: centre.1,
            reason: "no grid node admits a normal frame".into(),
        }));
    };

    let gauge_coeffs = cfg.checks.gauge_cartan.clone().unwrap_or_else(|| {
        if cfg.algebra.n == 2 {
            vec![0.3]
        } else {
            vec![0.2, -0.1]
        }
    });
    let ctx = Context {
        cfg,
        model: &model,
        fields: &fields,
        surface,
        frames: &frames,
        gauge_x: model.cartan_combination(&gauge_coeffs),
        base: anchor,
    };
    let results: Vec<Result<PointValues, String>> = points
        .par_iter()
        .map(|&(z, w)| evaluate(&ctx, z, w).map_err(|e| e.to_string()))
        .collect();

    let ok: Vec<&PointValues> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let quarantined: Vec<PointNote> = points
        .iter()
        .zip(&results)
        .filter_map(|(&(z, zbar), r)| r.as_ref().err().map(|e| PointNote { z, zbar, reason: e.clone() }))
        .collect();
    let fraction = quarantined.len() as f64 / points.len() as f64;

    let checks: Vec<CheckResult> = CHECK_NAMES
        .iter()
        .map(|&name| {
            let enabled = cfg.checks.is_enabled(name);
            let max_residual = Value::max_of(ok.iter().map(|p| p.check(name)));
            let tolerance = cfg.tolerances.get(name);
            let pass = enabled.then(|| max_residual.as_f64().is_some_and(|v| v <= tolerance));
            CheckResult {
                name: name.to_string(),
                enabled,
                max_residual,
                tolerance,
                pass,
            }
        })
        .collect();

    let flagged: Vec<PointNote> = points
        .iter()
        .zip(&results)
        .filter_map(|(&(z, zbar), r)| match r {
            Ok(p) if p.b_routes > ROUTE_FLAG_TOL => Some(PointNote {
                z,
                zbar,
                reason: format!("second-form routes differ by {:.3e}", p.b_routes),
            }),
            _ => None,
        })
        .collect();

    let mut files = Vec::new();
    let mut immersion_written = false;
    let mut transport_warnings = Vec::new();
    let mut immersion_failed = false;
    if !opts.check_only {
        if let Some(path) = &cfg.outputs.forms_csv {
            let k = anchor_frame.len();
            let header = csv_header(k);
            let mut records = vec![header.clone()];
            records.extend(points.iter().zip(&results).map(|(&(z, w), r)| csv_row(z, w, r, header.len())));
            files.push((path.clone(), to_csv(&records)?));
        }
        if let Some(path) = &cfg.outputs.immersion_csv {
            match immersion_patch(&model, &fields, &zs, &ws, cfg.transport_step) {
                Ok(patch) => {
                    transport_warnings.extend(patch.warnings.iter().cloned());
                    let mut buf = Vec::new();
                    patch.write_csv(&mut buf)?;
                    files.push((path.clone(), buf));
                    immersion_written = true;
                }
                Err(e) => {
                    immersion_failed = true;
                    warnings.push(format!("immersion not written: {e}"));
                }
            }
        }
    }

    let nu_bar = if cfg.model.c > 0.0 {
        alg.killing_index()
    } else {
        alg.dim() - alg.killing_index()
    };
    let closed_form = if cfg.algebra.n == 2 {
        "-(4c/alpha_sq)(mu+ mu-)^2 exp(-4 phi)"
    } else {
        "on-shell g_12 d_1 Gamma^2_22"
    };
    let with_closed: Vec<(f64, &PointValues)> = ok.iter().filter_map(|p| p.k_closed.map(|k| (k, *p))).collect();
    let checks_pass = checks.iter().all(|c| c.pass != Some(false));
    let pass = checks_pass && fraction <= cfg.checks.max_quarantine_fraction && !immersion_failed;
    let report = Report {
        algebra: AlgebraInfo {
            family: cfg.algebra.family.clone(),
            n: cfg.algebra.n,
            alpha_sq: cfg.algebra.alpha_sq,
            dim: alg.dim(),
        },
        model: ModelInfo {
            mu_plus: cfg.model.mu_plus,
            mu_minus: cfg.model.mu_minus,
            c: cfg.model.c,
            lambda: cfg.model.lambda,
        },
        solution: label,
        grid: GridInfo {
            z_min: cfg.grid.z_min,
            z_max: cfg.grid.z_max,
            zbar_min: cfg.grid.zbar_min,
            zbar_max: cfg.grid.zbar_max,
            nz: cfg.grid.nz,
            nzbar: cfg.grid.nzbar,
            points: points.len(),
        },
        fd_step: cfg.fd_step,
        transport_step: cfg.transport_step,
        nu_perp: Some(anchor_frame.nu_perp),
        nu_bar,
        nu_sub: 1,
        checks,
        curvature: CurvatureInfo {
            closed_form,
            max_abs_closed_minus_fd: Value::max_of(with_closed.iter().map(|(k, p)| (k - p.k_fd).abs())),
            max_abs_closed_minus_gauss: Value::max_of(with_closed.iter().map(|(k, p)| (k - p.k_gauss).abs())),
            min_k: Value::min_of(ok.iter().map(|p| p.k_fd)),
            max_k: Value::max_of(ok.iter().map(|p| p.k_fd)),
        },
        second_form: SecondFormInfo {
            max_route_difference: Value::max_of(ok.iter().map(|p| p.b_routes)),
            flagged_points: flagged,
        },
        mean_curvature: MeanCurvatureInfo {
            min_norm_sq: Value::min_of(ok.iter().map(|p| p.h_norm_sq)),
            max_norm_sq: Value::max_of(ok.iter().map(|p| p.h_norm_sq)),
            max_normal_derivative: Value::max_of(ok.iter().map(|p| p.dperp_h)),
        },
        transport: TransportInfo {
            max_killing_drift_per_length: Value::max_of(ok.iter().map(|p| p.drift)),
            immersion_written,
            warnings: transport_warnings,
        },
        goursat,
        quarantine: QuarantineInfo {
            count: quarantined.len(),
            fraction,
            max_fraction: cfg.checks.max_quarantine_fraction,
            points: quarantined,
        },
        warnings,
        pass,
    };
    if let Some(path) = &cfg.outputs.report_json {
        let mut text = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
        text.push(b'\n');
        files.push((path.clone(), text));
    }
    let written = write_all(&files)?;
    Ok(RunOutcome { report, written })
}
