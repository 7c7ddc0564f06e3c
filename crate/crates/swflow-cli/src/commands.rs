use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use swflow::clifford3::C64;
use swflow::linalg;
use swflow::orient;
use swflow::specflow::{self, HermitianPath, SfError};
use swflow::swlocal::{self, Configuration, TangentVector};
use swflow::torus_model::{self as tm, FlatConnection, FormField, SpinorField, TorusTruncation};

use crate::config::{Command, RunConfig};
use crate::report::ResultRecord;

pub const CITE_OT_SF: &str = "orientation transport equals parity of spectral flow";
pub const CITE_WALL: &str = "wall-crossing spectral flow equals minus flux pairing";
pub const CITE_SPECTRUM: &str = "flat torus Dirac spectrum equals shifted lattice norms";
pub const CITE_GAUGE_PERIOD: &str = "Dirac spectral flow over a gauge period vanishes";
pub const CITE_WEITZENBOCK: &str = "Weitzenbock formula for the twisted Dirac operator";
pub const CITE_FORMS: &str = "exterior derivative squares to zero with adjoint codifferential";
pub const CITE_CSD: &str = "Chern-Simons-Dirac gradient equals monopole map";
pub const CITE_HESSIAN: &str = "Hessian is symmetric derivative of monopole map";
pub const CITE_GAUGE_ADJ: &str = "linearized gauge action and its adjoint";
pub const CITE_DASTQ: &str = "divergence of quadratic term equals imaginary Dirac pairing";
pub const CITE_T_KERNEL: &str = "kernel of extended Hessian at reducibles";
pub const CITE_CROSS_B0: &str = "crossing matrix spectrum without harmonic forms";
pub const CITE_CROSS_B1: &str = "crossing matrix determinant with one harmonic form";
pub const CITE_MARGIN: &str = "Fourier truncation margin";

pub const SPECTRUM_TOL: f64 = 1e-10;
pub const WEITZENBOCK_TOL: f64 = 1e-10;
pub const FORMS_TOL: f64 = 1e-12;
pub const CSD_TOL: f64 = 1e-6;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const JACOBIAN_TOL: f64 = 1e-5;
pub const ADJOINT_TOL: f64 = 1e-10;
pub const DASTQ_TOL: f64 = 1e-8;
pub const KERNEL_TOL: f64 = 1e-9;
pub const CROSSING_TOL: f64 = 1e-12;

/// Generator for substream `stream` of `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn suite_stream(suite: u64, trial: usize) -> u64 {
    (suite << 32) | trial as u64
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    (&g + g.transpose()) * 0.5
}

/// Random symmetric matrix with every `|eigenvalue| >= gap`.
pub fn random_invertible_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, gap: f64) -> DMatrix<f64> {
    loop {
        let m = random_symmetric(rng, n);
        if linalg::eigvalsh(&m).iter().all(|x| x.abs() >= gap) {
            return m;
        }
    }
}

/// `(1 - t) A + t B + sin(pi t) C` on `[0, 1]`.
pub fn c1_path(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, samples: usize) -> Result<HermitianPath, SfError> {
    let (a2, b2, c2) = (a.clone(), b.clone(), c.clone());
    Ok(HermitianPath::new(0.0, 1.0, samples, move |t| &a * (1.0 - t) + &b * t + &c * (PI * t).sin())?
        .with_derivative(move |t| &b2 - &a2 + &c2 * (PI * (PI * t).cos())))
}

/// [`c1_path`] with random invertible endpoints and a random bump.
pub fn random_c1_path<R: Rng + ?Sized>(rng: &mut R, n: usize, samples: usize) -> Result<HermitianPath, SfError> {
    let a = random_invertible_symmetric(rng, n, 0.05);
    let b = random_invertible_symmetric(rng, n, 0.05);
    let c = random_symmetric(rng, n);
    c1_path(a, b, c, samples)
}

fn uniform_vec<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.random_range(lo..hi))
}

pub fn run_command(cfg: &RunConfig) -> Vec<ResultRecord> {
    match cfg.command {
        Command::Otsf => otsf(cfg),
        Command::Wallcross => wallcross(cfg),
        Command::Torus => torus(cfg),
        Command::Swcheck => swcheck(cfg),
    }
}

pub fn otsf_trial(cfg: &RunConfig, trial: usize, dim: usize) -> ResultRecord {
    let id = format!("otsf/{trial}");
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let path = match random_c1_path(&mut rng, dim, cfg.samples) {
        Ok(p) => p,
        Err(e) => return ResultRecord::error(id, CITE_OT_SF, e),
    };
    match orient::transport(&path, &cfg.ot_config()) {
        Ok(r) => ResultRecord::new(id, CITE_OT_SF, r.agrees())
            .with("dim", dim)
            .with("sf", r.sf)
            .with("eps_det", r.eps_det)
            .with("eps_sf", r.eps_sf)
            .with("stabilizer_dim", r.stabilizer_dim),
        Err(e) => ResultRecord::error(id, CITE_OT_SF, e),
    }
}

pub fn otsf(cfg: &RunConfig) -> Vec<ResultRecord> {
    (0..cfg.trials).into_par_iter().map(|i| otsf_trial(cfg, i, cfg.dim)).collect()
}

pub fn wallcross(cfg: &RunConfig) -> Vec<ResultRecord> {
    cfg.flux
        .par_iter()
        .map(|&d| {
            let id = format!("wallcross/{d}");
            let mut rec = ResultRecord::new(id.clone(), CITE_WALL, true).with("flux", d).with("pairing", -d);
            for &n in &cfg.n_max {
                let sf = tm::magnetic_family_path(d, n, cfg.samples)
                    .map_err(|e| e.to_string())
                    .and_then(|p| specflow::spectral_flow(&p, &cfg.ot_config().sf).map_err(|e| e.to_string()));
                match sf {
                    Ok(r) => {
                        rec.pass &= r.sf == -d;
                        rec = rec.with(&format!("sf_n{n}"), r.sf);
                    }
                    Err(e) => return ResultRecord::error(id, CITE_WALL, e),
                }
            }
            rec
        })
        .collect()
}

fn truncation_or_error(n: usize, id: &str, cite: &str) -> Result<TorusTruncation, ResultRecord> {
    TorusTruncation::new(n).map_err(|e| ResultRecord::error(id, cite, e))
}

pub fn torus(cfg: &RunConfig) -> Vec<ResultRecord> {
    let trunc = match truncation_or_error(cfg.cutoff, "torus/cutoff", CITE_MARGIN) {
        Ok(t) => t,
        Err(r) => return vec![r],
    };
    let mut out: Vec<ResultRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| spectrum_trial(cfg, &trunc, i))
        .collect();
    out.extend((0..3).into_par_iter().map(|j| gauge_period(cfg, &trunc, j)).collect::<Vec<_>>());
    out.extend((0..cfg.trials).into_par_iter().map(|i| weitzenbock_trial(cfg, &trunc, i)).collect::<Vec<_>>());
    out.push(form_complex(&trunc));
    out
}

pub fn spectrum_trial(cfg: &RunConfig, trunc: &TorusTruncation, trial: usize) -> ResultRecord {
    let mut rng = trial_rng(cfg.seed, suite_stream(1, trial));
    let conn = FlatConnection::new(uniform_vec(&mut rng, -1.0, 1.0));
    let num = tm::spectrum(&tm::fourier_dirac(trunc, &conn));
    let exact = tm::analytic_dirac_spectrum(trunc, &conn);
    let err = num.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ResultRecord::new(format!("spectrum/{trial}"), CITE_SPECTRUM, num.len() == exact.len() && err <= SPECTRUM_TOL)
        .with("cutoff", trunc.cutoff())
        .with("max_error", err)
}

pub fn gauge_period(cfg: &RunConfig, trunc: &TorusTruncation, j: usize) -> ResultRecord {
    let id = format!("gauge-period/{j}");
    let end = Vector3::from_fn(|i, _| if i == j { 2.0 } else { 0.0 });
    let sf = tm::dirac_family_path(trunc, Vector3::zeros(), end, cfg.samples)
        .map_err(|e| e.to_string())
        .and_then(|p| specflow::spectral_flow(&p, &cfg.ot_config().sf).map_err(|e| e.to_string()));
    match sf {
        Ok(r) => ResultRecord::new(id, CITE_GAUGE_PERIOD, r.sf == 0)
            .with("direction", j)
            .with("sf", r.sf)
            .with("crossings", r.crossings.len()),
        Err(e) => ResultRecord::error(id, CITE_GAUGE_PERIOD, e),
    }
}

pub fn weitzenbock_trial(cfg: &RunConfig, trunc: &TorusTruncation, trial: usize) -> ResultRecord {
    let id = format!("weitzenbock/{trial}");
    let mut rng = trial_rng(cfg.seed, suite_stream(2, trial));
    let conn = FlatConnection::new(uniform_vec(&mut rng, -1.0, 1.0));
    let k = [0, 1, 2].map(|_| rng.random_range(-1i64..=1));
    let comp = rng.random_range(0..3);
    let amp: f64 = rng.sample(StandardNormal);
    let sine = rng.random_bool(0.5);
    let res = FormField::single_mode(trunc, 1, k, comp, amp, sine)
        .and_then(|a| tm::weitzenbock_check(trunc, &conn, &a, 1));
    match res {
        Ok(r) => ResultRecord::new(id, CITE_WEITZENBOCK, r <= WEITZENBOCK_TOL).with("residual", r),
        Err(e) => ResultRecord::error(id, CITE_WEITZENBOCK, e),
    }
}

pub fn form_complex(trunc: &TorusTruncation) -> ResultRecord {
    let run = || -> Result<(f64, f64), tm::TorusError> {
        let d0 = tm::exterior_d(trunc, 0)?.matrix;
        let d1 = tm::exterior_d(trunc, 1)?.matrix;
        let d2 = tm::exterior_d(trunc, 2)?.matrix;
        let dd = (&d1 * &d0).amax().max((&d2 * &d1).amax());
        let mut adj = 0.0f64;
        for (p, d) in [(1, &d0), (2, &d1), (3, &d2)] {
            let cd = tm::codifferential(trunc, p)?.matrix;
            adj = adj.max((cd - d.transpose()).amax());
        }
        Ok((dd, adj))
    };
    match run() {
        Ok((dd, adj)) => ResultRecord::new("forms", CITE_FORMS, dd <= FORMS_TOL && adj <= FORMS_TOL)
            .with("d_squared", dd)
            .with("adjoint_error", adj),
        Err(e) => ResultRecord::error("forms", CITE_FORMS, e),
    }
}

pub fn swcheck(cfg: &RunConfig) -> Vec<ResultRecord> {
    if cfg.cutoff < 2 {
        return vec![ResultRecord::new("margin", CITE_MARGIN, false)
            .with("error", "cutoff below the quadratic-term margin")
            .with("needed", 2)
            .with("available", cfg.cutoff)];
    }
    let trunc = match truncation_or_error(cfg.cutoff, "margin", CITE_MARGIN) {
        Ok(t) => t,
        Err(r) => return vec![r],
    };
    let per_trial: Vec<Vec<ResultRecord>> =
        (0..cfg.trials).into_par_iter().map(|i| sw_identities(cfg, &trunc, i)).collect();
    let mut out: Vec<ResultRecord> = per_trial.into_iter().flatten().collect();
    out.extend(
        [false, true].into_par_iter().map(|zero| t_kernel(cfg, &trunc, zero)).collect::<Vec<_>>(),
    );
    let crossings: Vec<Vec<ResultRecord>> =
        (0..cfg.trials).into_par_iter().map(|i| crossing_trial(cfg, &trunc, i)).collect();
    out.extend(crossings.into_iter().flatten());
    out
}

fn offset(c: &Configuration, dir: &Configuration, h: f64) -> Configuration {
    Configuration { psi: c.psi.add(&dir.psi.scale(C64::from(h))), conn: c.conn.add(&dir.conn.scale(h)) }
}

/// Relative error of `d/dh csd(c + h v)` against `<SW(c), v>`.
pub fn csd_gradient_error(c: &Configuration, dir: &Configuration) -> Result<f64, swlocal::SwError> {
    let h = 1e-5;
    let fd = (swlocal::csd(&offset(c, dir, h))? - swlocal::csd(&offset(c, dir, -h))?) / (2.0 * h);
    let v = TangentVector { phi: dir.psi.clone(), a: dir.conn.clone(), f: None };
    let an = swlocal::sw_map(c)?.dot(&v);
    Ok((fd - an).abs() / an.abs().max(1e-12))
}

/// Hessian asymmetry and the relative sup-norm error against a central difference of `SW`.
pub fn hessian_errors(c: &Configuration, dir: &Configuration) -> Result<(f64, f64), swlocal::SwError> {
    let hf = swlocal::hessian_f(c)?;
    let asym = linalg::asymmetry(&hf.matrix);
    let v = TangentVector { phi: dir.psi.clone(), a: dir.conn.clone(), f: None };
    let hx = &hf.matrix * nalgebra::DVector::from_vec(v.to_real());
    let h = 1e-3;
    let p = swlocal::sw_map(&offset(c, dir, h))?.to_real();
    let m = swlocal::sw_map(&offset(c, dir, -h))?.to_real();
    let err = hx.iter().zip(p.iter().zip(&m)).map(|(a, (x, y))| (a - (x - y) / (2.0 * h)).abs()).fold(0.0, f64::max);
    Ok((asym, err / hx.amax().max(1.0)))
}

/// `|<G f, v> - <f, G^* v>|` relative to the size of the pairing.
pub fn gauge_adjoint_error(c: &Configuration, f: &FormField, v: &TangentVector) -> Result<f64, swlocal::SwError> {
    let lhs = swlocal::gauge_g(c, f)?.dot(v);
    let rhs = f.dot(&swlocal::gauge_gstar(c, v)?);
    Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
}

fn sw_identities(cfg: &RunConfig, trunc: &TorusTruncation, trial: usize) -> Vec<ResultRecord> {
    let mut rng = trial_rng(cfg.seed, suite_stream(3, trial));
    let r = trunc.cutoff() / 2;
    let c = Configuration::random(trunc, r, &mut rng);
    let dir = Configuration::random(trunc, r, &mut rng);
    let f = FormField::random(trunc, 0, r, &mut rng).expect("degree zero");
    let v = TangentVector { phi: dir.psi.clone(), a: dir.conn.clone(), f: None };
    let mut out = Vec::with_capacity(4);
    let id = |s: &str| format!("{s}/{trial}");
    out.push(match csd_gradient_error(&c, &dir) {
        Ok(e) => ResultRecord::new(id("csd-gradient"), CITE_CSD, e <= CSD_TOL).with("relative_error", e),
        Err(e) => ResultRecord::error(id("csd-gradient"), CITE_CSD, e),
    });
    out.push(match hessian_errors(&c, &dir) {
        Ok((asym, jac)) => ResultRecord::new(id("hessian"), CITE_HESSIAN, asym <= SYMMETRY_TOL && jac <= JACOBIAN_TOL)
            .with("asymmetry", asym)
            .with("jacobian_error", jac),
        Err(e) => ResultRecord::error(id("hessian"), CITE_HESSIAN, e),
    });
    out.push(match gauge_adjoint_error(&c, &f, &v) {
        Ok(e) => ResultRecord::new(id("gauge-adjoint"), CITE_GAUGE_ADJ, e <= ADJOINT_TOL).with("error", e),
        Err(e) => ResultRecord::error(id("gauge-adjoint"), CITE_GAUGE_ADJ, e),
    });
    out.push(match swlocal::dastq_residual(&c) {
        Ok(e) => ResultRecord::new(id("dastq"), CITE_DASTQ, e <= DASTQ_TOL).with("residual", e),
        Err(e) => ResultRecord::error(id("dastq"), CITE_DASTQ, e),
    });
    out
}

/// Kernel dimension of the extended Hessian at `(0, A_0 + i alpha)`: 4 for generic `alpha`, 8 at `alpha = 0`.
pub fn t_kernel(cfg: &RunConfig, trunc: &TorusTruncation, zero: bool) -> ResultRecord {
    let (id, expected) = if zero { ("t-kernel/zero", 8) } else { ("t-kernel/generic", 4) };
    let alpha = if zero {
        Vector3::zeros()
    } else {
        uniform_vec(&mut trial_rng(cfg.seed, suite_stream(4, 0)), 0.1, 0.9)
    };
    match swlocal::extended_t(&Configuration::reducible(trunc, alpha)) {
        Ok(t) => {
            let k = swlocal::kernel_dim(&t, KERNEL_TOL);
            ResultRecord::new(id, CITE_T_KERNEL, k == expected)
                .with("kernel_dim", k)
                .with("expected", expected)
                .with("asymmetry", linalg::asymmetry(&t.matrix))
        }
        Err(e) => ResultRecord::error(id, CITE_T_KERNEL, e),
    }
}

pub fn random_unit_spinor<R: Rng + ?Sized>(trunc: &TorusTruncation, rng: &mut R) -> SpinorField {
    let s = nalgebra::Vector2::from_fn(|_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = s.norm();
    SpinorField::constant(trunc, s / C64::from(n))
}

/// Sorted eigenvalues of the `b_1 = 0` crossing matrix and `(det B, kappa^2/|omega_0|^2)` for `b_1 = 1`.
pub fn crossing_values(psi0: &SpinorField, omega0: &Vector3<f64>) -> Result<(Vec<f64>, f64, f64), swlocal::SwError> {
    let b0 = swlocal::crossing_matrix_b0(psi0)?;
    let ev = linalg::eigvalsh(&((&b0 + b0.transpose()) * 0.5));
    let b1 = swlocal::crossing_matrix_b1(psi0, omega0)?;
    let k = swlocal::kappa(psi0, omega0)?;
    Ok((ev, b1.determinant(), k * k / omega0.norm_squared()))
}

fn crossing_trial(cfg: &RunConfig, trunc: &TorusTruncation, trial: usize) -> Vec<ResultRecord> {
    let mut rng = trial_rng(cfg.seed, suite_stream(5, trial));
    let psi0 = random_unit_spinor(trunc, &mut rng);
    let omega0 = uniform_vec(&mut rng, -1.0, 1.0);
    let (id0, id1) = (format!("crossing-b0/{trial}"), format!("crossing-b1/{trial}"));
    match crossing_values(&psi0, &omega0) {
        Ok((ev, det, pred)) => {
            let err0 = ev.iter().zip([-1.0, 0.0, 1.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            vec![
                ResultRecord::new(id0, CITE_CROSS_B0, ev.len() == 3 && err0 <= CROSSING_TOL)
                    .with("eigenvalues", ev)
                    .with("max_error", err0),
                ResultRecord::new(id1, CITE_CROSS_B1, (det - pred).abs() <= CROSSING_TOL)
                    .with("det", det)
                    .with("kappa_sq_over_norm_sq", pred),
            ]
        }
        Err(e) => vec![ResultRecord::error(id0, CITE_CROSS_B0, &e), ResultRecord::error(id1, CITE_CROSS_B1, e)],
    }
}
