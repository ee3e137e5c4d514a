//! dkit: discrepancy values, Ky-Fan norms, and the inequality registry from
//! the command line.
//!
//! Every run prints exactly one JSON document (schema "discrepancy-kit/1")
//! on stdout; stderr is reserved for human diagnostics. Exit codes: 0 means
//! success and every checked inequality held, 1 means a violation or
//! counterexample turned up, 2 means bad input, 3 means the solver broke
//! down. Identical commands on identical files with identical seeds print
//! byte-identical documents; `--jobs` only changes wall time.

mod input;
mod report;

use clap::{Parser, Subcommand};
use discrepancy_kit::commutator::{
    evaluate_inequality, fuzz_conjecture, maximal_noncommuting_unitary, random_instance,
    unitary_orbit_diameter_hermitian,
};
use discrepancy_kit::discrepancy::{
    discrepancy_values, discrepancy_values_general, grid_oracle_discrepancy_norm,
};
use discrepancy_kit::matcore::{ky_fan_norm, singular_values, trial_seed};
use discrepancy_kit::xdecomp::x_decomposition;
use discrepancy_kit::{
    AlphaSolverConfig, ComplexMatrix, Error, InequalityId, InequalityInputs, InequalityReport,
    MatrixClass, Tolerance,
};
use num_complex::Complex64;
use rayon::prelude::*;
use report::{matrix_value, num, nums, Report};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dkit", version, about = "Discrepancy values of complex matrices")]
struct Cli {
    /// Absolute slack granted to every inequality comparison.
    #[arg(long, global = true, default_value_t = 1e-9, allow_negative_numbers = true)]
    atol: f64,
    /// Relative slack, scaled by the magnitude of the compared data.
    #[arg(long, global = true, default_value_t = 1e-8, allow_negative_numbers = true)]
    rtol: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discrepancy values and minimizing shifts of a square matrix
    Delta {
        file: String,
        /// Skip the structure dispatch and run the two-dimensional solver
        #[arg(long)]
        force_general: bool,
        /// Also report the k-th discrepancy norm for this k
        #[arg(long)]
        k: Option<usize>,
        /// Print the semidefinite formulation instead of solving
        #[arg(long)]
        emit_sdp: bool,
    },
    /// Ky-Fan k-norm of a matrix (rectangular allowed)
    Kyfan {
        file: String,
        #[arg(long)]
        k: usize,
    },
    /// Check one registry inequality, or all of them
    Check {
        /// Entry id like R16, or "all"
        id: String,
        /// Matrix file bound to input A
        #[arg(long)]
        a: Option<String>,
        /// Matrix file bound to input B
        #[arg(long)]
        b: Option<String>,
        /// Matrix file bound to input X
        #[arg(long)]
        x: Option<String>,
        /// Dimension for randomly generated instances (default 4)
        #[arg(long)]
        n: Option<usize>,
        /// Random instances per entry (default 50)
        #[arg(long)]
        trials: Option<u64>,
        /// Master seed for instance generation (default 0)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Random search for counterexamples
    #[command(subcommand)]
    Fuzz(FuzzCmd),
    /// Extremal constructions
    #[command(subcommand)]
    Maximize(MaximizeCmd),
    /// Diameter of a Hermitian matrix's unitary orbit in the Ky-Fan k-metric
    OrbitDiameter {
        #[arg(long)]
        a: String,
        #[arg(long)]
        k: usize,
    },
    /// Factor a Hermitian matrix through an X-shaped middle factor
    Xdecomp { file: String },
    /// Slow cross-checks that share no code with the production solver
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Subcommand)]
enum FuzzCmd {
    /// Hammer the general commutator bound with random matrix pairs
    Conjecture {
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Matrix class: general, hermitian_vs_general, or normal_line
        #[arg(long, default_value = "general")]
        class: String,
        /// Worker threads; never changes the numbers, only the wall time
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum MaximizeCmd {
    /// Unitary conjugation making two Hermitian matrices maximally noncommuting
    Commutator {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Grid evaluation of a discrepancy norm
    Delta {
        file: String,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
    },
}

pub enum CliError {
    Input(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(msg) => CliError::Numerical(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(rep) => rep.print(cli.atol, cli.rtol),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            3
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let tol = Tolerance {
        abs: cli.atol,
        rel: cli.rtol,
    };
    match &cli.cmd {
        Cmd::Delta {
            file,
            force_general,
            k,
            emit_sdp,
        } => delta_cmd(file, *force_general, *k, *emit_sdp),
        Cmd::Kyfan { file, k } => kyfan_cmd(file, *k),
        Cmd::Check {
            id,
            a,
            b,
            x,
            n,
            trials,
            seed,
        } => check_cmd(id, [a, b, x], *n, *trials, *seed, tol),
        Cmd::Fuzz(FuzzCmd::Conjecture {
            n_min,
            n_max,
            trials,
            seed,
            class,
            jobs,
        }) => fuzz_cmd(*n_min, *n_max, *trials, *seed, class, *jobs, tol),
        Cmd::Maximize(MaximizeCmd::Commutator { a, b }) => maximize_cmd(a, b),
        Cmd::OrbitDiameter { a, k } => orbit_cmd(a, *k),
        Cmd::Xdecomp { file } => xdecomp_cmd(file),
        Cmd::Oracle(OracleCmd::Delta {
            file,
            k,
            resolution,
        }) => oracle_cmd(file, *k, *resolution),
    }
}

// ─── delta ───────────────────────────────────────────────────────────────────

fn delta_cmd(
    file: &str,
    force_general: bool,
    k: Option<usize>,
    emit_sdp: bool,
) -> Result<Report, CliError> {
    let loaded = input::load_matrix(file)?;
    let a = &loaded.matrix;
    if let Some(kk) = k {
        let limit = a.rows().min(a.cols());
        if kk == 0 || kk > limit {
            return Err(CliError::Input(format!(
                "k must be between 1 and {limit}, got {kk}"
            )));
        }
    }
    if emit_sdp {
        if !a.is_square() {
            return Err(CliError::Input(format!(
                "expected a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let payload = json!({
            "n": a.rows(),
            "k": k,
            "sdp": sdp_listing(a, k),
        });
        return Ok(Report::new(
            "ok",
            0,
            vec![loaded.digest_entry(file)],
            None,
            payload,
        ));
    }
    let cfg = AlphaSolverConfig::default();
    let res = if force_general {
        discrepancy_values_general(a, &cfg)?
    } else {
        discrepancy_values(a, &cfg)?
    };
    let alphas: Vec<Value> = res
        .alphas
        .iter()
        .map(|z| json!([num(z.re), num(z.im)]))
        .collect();
    let diagnostics: Vec<Value> = res
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "path": d.path.to_string(),
                "iterations": d.iterations,
                "residual": num(d.residual),
            })
        })
        .collect();
    let mut payload = json!({
        "n": res.n(),
        "values": nums(res.delta()),
        "partial_norms": nums(&res.partial_norms),
        "alphas": alphas,
        "diagnostics": diagnostics,
        "forced_general": force_general,
    });
    if let Some(kk) = k {
        payload["k"] = json!(kk);
        payload["norm"] = num(res.partial_norms[kk - 1]);
    }
    Ok(Report::new(
        "ok",
        0,
        vec![loaded.digest_entry(file)],
        None,
        payload,
    ))
}

// The Ky-Fan k-norm of M rides on the Hermitian dilation [[0, M], [M*, 0]]:
// its top-k eigenvalue sum equals the top-k singular value sum of M, and a
// top-k eigenvalue sum has the classic exact-penalty semidefinite form
// min k·s + tr(Z) over Z ⪰ 0, Z + s·I ⪰ H. The scalar shift stays a free
// affine parameter inside H, so the whole minimization is one program.
fn sdp_listing(a: &ComplexMatrix, k: Option<usize>) -> Vec<String> {
    let n = a.rows();
    let d = 2 * n;
    let mut out = Vec::new();
    match k {
        Some(kk) => out.push(format!(
            "problem    minimize {kk}*s + trace(Z) over real x, y, real s, Hermitian Z ({d}x{d})"
        )),
        None => out.push(format!(
            "problem    for each k in 1..={n}: minimize k*s + trace(Z) over real x, y, real s, Hermitian Z ({d}x{d})"
        )),
    }
    out.push("block [1]  Z >= 0".to_string());
    out.push(format!(
        "block [2]  Z + s*I - H(x, y) >= 0, where H(x, y) is the {d}x{d} dilation [[0, A - (x + i*y)*I], [adjoint(A - (x + i*y)*I), 0]]"
    ));
    out.push(format!(
        "note       the optimum is the smallest Ky-Fan k-norm over scalar shifts of the {n}x{n} matrix A below"
    ));
    for i in 0..n {
        let cells: Vec<String> = (0..n)
            .map(|j| {
                let z = a[(i, j)];
                format!("{:+.16e}{:+.16e}i", z.re, z.im)
            })
            .collect();
        out.push(format!("data A[{i}]  {}", cells.join(", ")));
    }
    out
}

// ─── kyfan ───────────────────────────────────────────────────────────────────

fn kyfan_cmd(file: &str, k: usize) -> Result<Report, CliError> {
    let loaded = input::load_matrix(file)?;
    let value = ky_fan_norm(&loaded.matrix, k)?;
    let payload = json!({"k": k, "value": num(value)});
    Ok(Report::new(
        "ok",
        0,
        vec![loaded.digest_entry(file)],
        None,
        payload,
    ))
}

// ─── check ───────────────────────────────────────────────────────────────────

fn check_cmd(
    id_str: &str,
    files: [&Option<String>; 3],
    n: Option<usize>,
    trials: Option<u64>,
    seed: Option<u64>,
    tol: Tolerance,
) -> Result<Report, CliError> {
    let ids: Vec<InequalityId> = if id_str.eq_ignore_ascii_case("all") {
        InequalityId::all().to_vec()
    } else {
        vec![id_str.parse::<InequalityId>()?]
    };
    if files.iter().any(|f| f.is_some()) {
        if n.is_some() || trials.is_some() || seed.is_some() {
            return Err(CliError::Input(
                "--n/--trials/--seed generate random instances and cannot be combined with matrix files".into(),
            ));
        }
        if ids.len() > 1 {
            return Err(CliError::Input(
                "matrix files bind to a single entry; name one id like R16, or drop the files to sample every entry randomly".into(),
            ));
        }
        return check_files(ids[0], files, tol);
    }
    check_random(
        &ids,
        n.unwrap_or(4),
        trials.unwrap_or(50),
        seed.unwrap_or(0),
        tol,
    )
}

fn check_files(
    id: InequalityId,
    files: [&Option<String>; 3],
    tol: Tolerance,
) -> Result<Report, CliError> {
    let mut inputs = InequalityInputs::new();
    let mut digests = Vec::new();
    for (flag, name) in files.into_iter().zip(["A", "B", "X"]) {
        if let Some(path) = flag {
            let loaded = input::load_matrix(path)?;
            digests.push(loaded.digest_entry(path));
            inputs.insert(name, loaded.matrix);
        }
    }
    let rep = evaluate_inequality(id, &inputs, tol)?;
    let (status, exit) = if rep.holds { ("ok", 0) } else { ("violation", 1) };
    let payload = json!({"entries": [file_entry_value(&rep, tol)]});
    Ok(Report::new(status, exit, digests, None, payload))
}

fn file_entry_value(rep: &InequalityReport, tol: Tolerance) -> Value {
    let slack = tol.slack(rep.scale()).max(f64::MIN_POSITIVE);
    json!({
        "id": rep.id.to_string(),
        "statement": rep.id.describe(),
        "holds": rep.holds,
        "min_margin": num(rep.min_margin),
        "margin_slack_units": num(rep.min_margin / slack),
        "scale": num(rep.scale()),
        "lhs_partial": nums(&rep.lhs_partial),
        "rhs_partial": nums(&rep.rhs_partial),
        "witness": rep.witness,
    })
}

struct Campaign {
    violations: u64,
    failures: u64,
    /// Smallest margin across trials, in slack units of its own trial.
    worst_margin: f64,
    worst_trial: u64,
    worst_seed: u64,
}

fn check_random(
    ids: &[InequalityId],
    n: usize,
    trials: u64,
    seed: u64,
    tol: Tolerance,
) -> Result<Report, CliError> {
    if trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    let mut entries = Vec::new();
    let mut total_violations = 0u64;
    let mut starved = false;
    for &id in ids {
        if !id.applicable(n) {
            entries.push(json!({
                "id": id.to_string(),
                "statement": id.describe(),
                "applicable": false,
            }));
            continue;
        }
        let c = run_campaign(id, n, trials, seed, tol);
        total_violations += c.violations;
        starved |= c.failures == trials;
        entries.push(json!({
            "id": id.to_string(),
            "statement": id.describe(),
            "applicable": true,
            "violations": c.violations,
            "failures": c.failures,
            "worst_margin_slack_units": num(c.worst_margin),
            "worst_trial": c.worst_trial,
            "worst_seed": c.worst_seed,
            "holds": c.violations == 0,
        }));
    }
    let payload = json!({"n": n, "trials": trials, "entries": entries});
    let (status, exit) = if total_violations > 0 {
        ("violation", 1)
    } else if starved {
        ("numerical_failure", 3)
    } else {
        ("ok", 0)
    };
    Ok(Report::new(status, exit, Vec::new(), Some(seed), payload))
}

fn run_campaign(id: InequalityId, n: usize, trials: u64, seed: u64, tol: Tolerance) -> Campaign {
    // Collecting per-trial rows and folding sequentially keeps the summary
    // independent of how rayon splits the range.
    let rows: Vec<(f64, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, t);
            match random_instance(id, n, s).and_then(|inp| evaluate_inequality(id, &inp, tol)) {
                Ok(rep) => {
                    let slack = tol.slack(rep.scale()).max(f64::MIN_POSITIVE);
                    (rep.min_margin / slack, rep.holds, false)
                }
                Err(_) => (f64::INFINITY, true, true),
            }
        })
        .collect();
    let mut c = Campaign {
        violations: 0,
        failures: 0,
        worst_margin: f64::INFINITY,
        worst_trial: 0,
        worst_seed: trial_seed(seed, 0),
    };
    for (t, &(margin, holds, failed)) in rows.iter().enumerate() {
        if failed {
            c.failures += 1;
            continue;
        }
        if !holds {
            c.violations += 1;
        }
        if margin < c.worst_margin {
            c.worst_margin = margin;
            c.worst_trial = t as u64;
            c.worst_seed = trial_seed(seed, t as u64);
        }
    }
    c
}

// ─── fuzz ────────────────────────────────────────────────────────────────────

fn fuzz_cmd(
    n_min: usize,
    n_max: usize,
    trials: u64,
    seed: u64,
    class_str: &str,
    jobs: Option<usize>,
    tol: Tolerance,
) -> Result<Report, CliError> {
    let class: MatrixClass = class_str.parse()?;
    let rep = match jobs {
        Some(0) => return Err(CliError::Input("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Input(format!("cannot build a {j}-thread pool: {e}")))?
            .install(|| fuzz_conjecture(n_min, n_max, trials, seed, tol, class))?,
        None => fuzz_conjecture(n_min, n_max, trials, seed, tol, class)?,
    };
    let witness = rep
        .worst_witness
        .as_ref()
        .map(|(a, b)| json!({"a": matrix_value(a), "b": matrix_value(b)}));
    let payload = json!({
        "class": rep.class.to_string(),
        "proved_class": class.is_proved(),
        "trials": rep.trials,
        "n_min": rep.n_min,
        "n_max": rep.n_max,
        "master_seed": rep.master_seed,
        "violations": rep.violations,
        "failures": rep.failures,
        "worst_margin_slack_units": num(rep.worst_margin),
        "worst_trial": rep.worst_trial,
        "worst_seed": rep.worst_seed,
        "witness": witness,
    });
    let (status, exit) = if rep.violations > 0 {
        if class.is_proved() {
            ("violation", 1)
        } else {
            ("counterexample", 1)
        }
    } else if rep.failures == rep.trials {
        ("numerical_failure", 3)
    } else {
        ("ok", 0)
    };
    Ok(Report::new(status, exit, Vec::new(), Some(seed), payload))
}

// ─── maximize / orbit-diameter ───────────────────────────────────────────────

fn maximize_cmd(a_path: &str, b_path: &str) -> Result<Report, CliError> {
    let la = input::load_matrix(a_path)?;
    let lb = input::load_matrix(b_path)?;
    let (u, achieved, bound) = maximal_noncommuting_unitary(&la.matrix, &lb.matrix)?;
    let gap = achieved
        .values()
        .iter()
        .zip(bound.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);
    let payload = json!({
        "u": matrix_value(&u),
        "achieved": nums(achieved.values()),
        "bound": nums(bound.values()),
        "max_gap": num(gap),
    });
    Ok(Report::new(
        "ok",
        0,
        vec![la.digest_entry(a_path), lb.digest_entry(b_path)],
        None,
        payload,
    ))
}

fn orbit_cmd(a_path: &str, k: usize) -> Result<Report, CliError> {
    let loaded = input::load_matrix(a_path)?;
    let (diameter, witness) = unitary_orbit_diameter_hermitian(&loaded.matrix, k)?;
    let payload = json!({
        "k": k,
        "diameter": num(diameter),
        "witness": matrix_value(&witness),
    });
    Ok(Report::new(
        "ok",
        0,
        vec![loaded.digest_entry(a_path)],
        None,
        payload,
    ))
}

// ─── xdecomp ─────────────────────────────────────────────────────────────────

fn xdecomp_cmd(file: &str) -> Result<Report, CliError> {
    let loaded = input::load_matrix(file)?;
    let a = &loaded.matrix;
    let (u, x, v) = x_decomposition(a)?;
    let n = a.rows();
    let one = Complex64::new(1.0, 0.0);
    let u_unitarity = u.adjoint().mul(&u)?.shifted(one)?.max_abs();
    let v_unitarity = v.adjoint().mul(&v)?.shifted(one)?.max_abs();
    let uv = u.adjoint().mul(&v)?;
    let mut uv_exchange = 0.0f64;
    let mut x_off_pattern = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if j == n - 1 - i { 1.0 } else { 0.0 };
            uv_exchange = uv_exchange.max((uv[(i, j)] - want).norm());
            if j != i && j != n - 1 - i {
                x_off_pattern = x_off_pattern.max(x[(i, j)].norm());
            }
        }
    }
    let recon = u.mul(&x)?.mul(&v.adjoint())?;
    let mut reconstruction = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            reconstruction = reconstruction.max((recon[(i, j)] - a[(i, j)]).norm());
        }
    }
    let payload = json!({
        "u": matrix_value(&u),
        "x": matrix_value(&x),
        "v": matrix_value(&v),
        "checks": {
            "u_unitarity": num(u_unitarity),
            "v_unitarity": num(v_unitarity),
            "uv_exchange": num(uv_exchange),
            "x_off_pattern": num(x_off_pattern),
            "reconstruction": num(reconstruction),
        },
    });
    Ok(Report::new(
        "ok",
        0,
        vec![loaded.digest_entry(file)],
        None,
        payload,
    ))
}

// ─── oracle ──────────────────────────────────────────────────────────────────

fn oracle_cmd(file: &str, k: usize, resolution: usize) -> Result<Report, CliError> {
    let loaded = input::load_matrix(file)?;
    let a = &loaded.matrix;
    let value = grid_oracle_discrepancy_norm(a, k, resolution)?;
    // Echo the grid geometry so callers can budget for the discretization:
    // the objective is k-Lipschitz in the shift, and the grid covers a disc
    // of radius twice the largest centered singular value.
    let n = a.rows();
    let mu = a.trace()? / n as f64;
    let sigma1 = singular_values(&a.shifted(mu)?)?[0];
    let radius = 2.0 * sigma1;
    let spacing = if radius <= 1e-14 * a.fro_norm().max(1.0) {
        0.0
    } else {
        2.0 * radius / (resolution - 1) as f64
    };
    let payload = json!({
        "k": k,
        "resolution": resolution,
        "value": num(value),
        "grid_spacing": num(spacing),
        "error_bound": num(k as f64 * spacing * std::f64::consts::FRAC_1_SQRT_2),
    });
    Ok(Report::new(
        "ok",
        0,
        vec![loaded.digest_entry(file)],
        None,
        payload,
    ))
}
