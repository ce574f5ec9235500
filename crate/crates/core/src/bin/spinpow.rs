use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spinpow::catalog::KnownGate;
use spinpow::distribution::{distribution_grid, export_grid, extrema, write_grid_csv, GridMetadata};
use spinpow::geometry::{cartan_j1, dagger_gap, ep_closed_small, ep_geometric, hyperplane_residuals, invariant_vector, m_vector, transformed_n, Basis, UnitaryGate};
use spinpow::haar::{average_ep_analytic, average_ep_mc, haar_sample, histogram, write_histogram_csv};
use spinpow::io::{gate_to_json, read_gate};
use spinpow::operators::{coupled_state, m_block_eigenvalues, operator_m, operator_n};
use spinpow::optimize::{known_maximum, optimize_ep, OptimizerConfig};
use spinpow::schmidt::{pair_linear_entropy, schmidt_spectrum, schmidt_transport_check};
use spinpow::verify::{self, Scope, VerifyOptions};
use spinpow::{HalfInt, SpinError};

#[derive(Parser)]
#[command(name = "spinpow", version, about = "Entangling power of spin-j gates")]
struct Cli {
    /// Spin quantum number: 1, 3/2 or 1.5.
    #[arg(long, global = true)]
    j: Option<HalfInt>,
    /// Bipartition size.
    #[arg(long, global = true)]
    q: Option<i32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance for the command's own checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run self-checks and write a report.
    Verify {
        #[arg(long, default_value = "all")]
        scope: Scope,
        /// Haar gates per (j, q) in the oracle checks.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Entangling power of one gate with its invariant vectors.
    Ep(GateArgs),
    /// Entanglement over spin-coherent inputs on a sphere grid.
    Distribution {
        #[command(flatten)]
        gate: GateArgs,
        #[arg(long, default_value_t = 50)]
        n_theta: usize,
        #[arg(long, default_value_t = 100)]
        n_phi: usize,
        /// Add stereographic x,y columns.
        #[arg(long)]
        stereographic: bool,
    },
    /// Maximize e_p over the unitary group from Haar-random starts.
    Optimize {
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Haar average of e_p: analytic value and Monte-Carlo estimate.
    Haar {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// Also write the histogram CSV here.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Schmidt numbers of a coupled state, optionally transported by a gate.
    Schmidt {
        /// Total spin L of the coupled state.
        #[arg(long = "l")]
        l: HalfInt,
        #[arg(long = "m", default_value = "0", allow_hyphen_values = true)]
        m: HalfInt,
        /// Target coupled state "L,M" for a transport check.
        #[arg(long, requires = "gate_source", allow_hyphen_values = true)]
        to: Option<String>,
        #[command(flatten)]
        gate: GateArgs,
    },
    /// Invariant vectors of 𝒩 and 𝓜_q and Haar averages.
    Tables,
}

#[derive(Args, Clone)]
#[group(id = "gate_source", multiple = false)]
struct GateArgs {
    /// Catalog gate: j1_omega, j1_perm, j32_opt, j2_q1, j2_q2.
    #[arg(long)]
    gate: Option<KnownGate>,
    /// JSON matrix file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Haar-random gate drawn from --seed (needs --j).
    #[arg(long)]
    haar: bool,
    /// Spin-1 Cartan parameters "c1,c2,c3"; accepts pi, e.g. "pi/3,0,-pi/3".
    #[arg(long, allow_hyphen_values = true)]
    cartan: Option<String>,
}

enum CliError {
    Check(String),
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<SpinError> for CliError {
    fn from(e: SpinError) -> Self {
        match e {
            SpinError::Csv(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

struct Gate {
    gate: UnitaryGate,
    label: String,
    known: Option<KnownGate>,
}

fn parse_angle(s: &str) -> CliResult<f64> {
    let t = s.trim().replace(' ', "").to_lowercase();
    let bad = || CliError::Input(format!("cannot read angle '{s}'"));
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, t),
    };
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi") {
        let coef = coef.trim_end_matches('*');
        let k = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
        k * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    Ok(if neg { -value } else { value } / den)
}

fn resolve_gate(args: &GateArgs, cli: &Cli) -> CliResult<Gate> {
    let g = if let Some(k) = args.gate {
        Gate { gate: k.gate(), label: k.id().to_string(), known: Some(k) }
    } else if let Some(path) = &args.file {
        Gate { gate: read_gate(path)?, label: format!("file:{}", path.display()), known: None }
    } else if args.haar {
        let j = cli.j.ok_or_else(|| CliError::Input("--haar needs --j".into()))?;
        if j.twice() < 1 {
            return Err(CliError::Input(format!("j = {j} must be positive")));
        }
        Gate { gate: haar_sample(j, cli.seed, 0), label: format!("haar:j={j},seed={}", cli.seed), known: None }
    } else if let Some(c) = &args.cartan {
        let parts: Vec<f64> = c.split(',').map(parse_angle).collect::<CliResult<_>>()?;
        if parts.len() != 3 {
            return Err(CliError::Input(format!("--cartan needs three values, got {}", parts.len())));
        }
        let (gate, _) = cartan_j1(parts[0], parts[1], parts[2])?;
        Gate { gate, label: format!("cartan:{c}"), known: None }
    } else {
        return Err(CliError::Input("choose a gate with --gate, --file, --haar or --cartan".into()));
    };
    if let Some(j) = cli.j {
        if j != g.gate.j() {
            return Err(CliError::Input(format!("--j {j} does not match the gate's j = {}", g.gate.j())));
        }
    }
    Ok(g)
}

fn default_q(cli: &Cli, known: Option<KnownGate>) -> i32 {
    cli.q.or(known.map(KnownGate::q)).unwrap_or(1)
}

fn emit_bytes(out: Option<&Path>, bytes: &[u8]) -> CliResult {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, v: &impl Serialize) -> CliResult {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit_bytes(out, text.as_bytes())
}

fn emit_csv<T: Serialize>(out: Option<&Path>, rows: &[T]) -> CliResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    emit_bytes(out, &bytes)
}

#[derive(Serialize)]
struct Row {
    quantity: String,
    index: usize,
    value: f64,
}

fn rows(quantity: &str, values: &[f64]) -> Vec<Row> {
    values.iter().enumerate().map(|(index, &value)| Row { quantity: quantity.to_string(), index, value }).collect()
}

fn cmd_verify(cli: &Cli, scope: Scope, samples: usize) -> CliResult {
    let report = verify::run(scope, &VerifyOptions { seed: cli.seed, tol: cli.tol, oracle_samples: samples })?;
    match cli.format {
        Format::Json => emit_json(cli.out.as_deref(), &report)?,
        Format::Csv => emit_csv(cli.out.as_deref(), &report.checks)?,
    }
    eprintln!("{} of {} checks passed", report.total - report.failed, report.total);
    if report.passed {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Check(format!("failed: {}", names.join(", "))))
    }
}

fn cmd_ep(cli: &Cli, args: &GateArgs) -> CliResult {
    let g = resolve_gate(args, cli)?;
    let q = default_q(cli, g.known);
    let j = g.gate.j();
    let ep = ep_geometric(&g.gate, q)?;
    let np = transformed_n(&g.gate, Basis::P);
    let nt = transformed_n(&g.gate, Basis::T);
    let res = hyperplane_residuals(&g.gate, q)?;
    let gap = dagger_gap(&g.gate, q)?;
    let closed = ep_closed_small(&g.gate, q).ok();
    let tol = cli.tol.unwrap_or(1e-10);
    match cli.format {
        Format::Json => emit_json(
            cli.out.as_deref(),
            &json!({
                "gate": g.label,
                "j": j,
                "q": q,
                "ep": ep,
                "ep_closed_form": closed,
                "conjectural_maximum": g.known.map(KnownGate::conjectural),
                "un_p": np.components,
                "un_t": nt.components,
                "hyperplane_residuals": res,
                "dagger_gap": gap,
            }),
        )?,
        Format::Csv => {
            let mut all = rows("ep", &[ep]);
            all.extend(rows("un_p", &np.components));
            all.extend(rows("un_t", &nt.components));
            all.extend(rows("hyperplane_residuals", &[res.n_plane, res.m_plane, res.m_plane_t]));
            all.extend(rows("dagger_gap", &[gap]));
            emit_csv(cli.out.as_deref(), &all)?;
        }
    }
    if res.max() > tol {
        return Err(CliError::Check(format!("hyperplane residual {:.3e} exceeds {tol:e}", res.max())));
    }
    Ok(())
}

fn cmd_distribution(cli: &Cli, args: &GateArgs, n_theta: usize, n_phi: usize, stereographic: bool) -> CliResult {
    let g = resolve_gate(args, cli)?;
    let q = default_q(cli, g.known);
    let samples = distribution_grid(&g.gate, q, n_theta, n_phi)?;
    let found = extrema(&g.gate, q, n_theta.clamp(3, 60), n_phi.clamp(3, 120))?;
    let meta = GridMetadata::describe(g.gate.j(), q, g.label.clone(), n_theta, n_phi, &samples, stereographic).refine(&found);
    match (&cli.out, cli.format) {
        (Some(path), Format::Csv) => {
            let sidecar = export_grid(path, &samples, &meta)?;
            eprintln!("wrote {} and {}", path.display(), sidecar.display());
            emit_json(None, &meta)?;
        }
        (Some(path), Format::Json) => {
            emit_json(Some(path), &json!({ "metadata": meta, "samples": samples }))?;
            emit_json(None, &meta)?;
        }
        (None, Format::Csv) => {
            let mut buf = Vec::new();
            write_grid_csv(&mut buf, &samples, stereographic)?;
            emit_bytes(None, &buf)?;
        }
        (None, Format::Json) => emit_json(None, &json!({ "metadata": meta, "samples": samples }))?,
    }
    Ok(())
}

fn cmd_optimize(cli: &Cli, restarts: Option<usize>, max_iters: Option<usize>) -> CliResult {
    let j = cli.j.ok_or_else(|| CliError::Input("optimize needs --j".into()))?;
    let q = cli.q.unwrap_or(1);
    let mut cfg = OptimizerConfig::for_spin(j, cli.seed);
    if let Some(r) = restarts {
        cfg.restarts = r;
    }
    if let Some(m) = max_iters {
        cfg.max_iters = m;
    }
    if let Some(t) = cli.tol {
        cfg.grad_tol = t;
    }
    let res = optimize_ep(j, q, &cfg)?;
    let known = known_maximum(j, q);
    match cli.format {
        Format::Json => {
            let mut v = gate_to_json(&res.gate);
            let obj = v.as_object_mut().expect("gate json is an object");
            obj.insert("q".into(), json!(q));
            obj.insert("ep".into(), json!(res.ep));
            obj.insert("conjectural".into(), json!(res.conjectural));
            obj.insert("known_maximum".into(), json!(known));
            obj.insert("config".into(), serde_json::to_value(cfg)?);
            obj.insert("best_restart".into(), json!(res.best_restart));
            obj.insert("converged_restarts".into(), json!(res.converged_restarts));
            obj.insert("restart_values".into(), json!(res.restart_values));
            obj.insert("report".into(), serde_json::to_value(&res.report)?);
            emit_json(cli.out.as_deref(), &v)?;
        }
        Format::Csv => emit_csv(cli.out.as_deref(), &rows("restart_ep", &res.restart_values))?,
    }
    if let Some(k) = known {
        if res.ep > k + 1e-9 {
            return Err(CliError::Internal(format!("optimizer exceeded the known maximum: {} > {k}", res.ep)));
        }
    }
    Ok(())
}

fn cmd_haar(cli: &Cli, samples: usize, bins: usize, hist_path: Option<&Path>) -> CliResult {
    let j = cli.j.ok_or_else(|| CliError::Input("haar needs --j".into()))?;
    let q = cli.q.unwrap_or(1);
    if bins == 0 {
        return Err(CliError::Input("--bins must be positive".into()));
    }
    let analytic = average_ep_analytic(j, q)?;
    let mc = average_ep_mc(j, q, samples, cli.seed)?;
    let hist = histogram(&mc.samples, bins, 0.0, 1.0);
    if let Some(p) = hist_path {
        write_histogram_csv(fs::File::create(p)?, &hist)?;
    }
    let z = (mc.mean - analytic) / mc.std_error;
    match cli.format {
        Format::Json => emit_json(
            cli.out.as_deref(),
            &json!({
                "j": j,
                "q": q,
                "seed": cli.seed,
                "samples": samples,
                "analytic": analytic,
                "mean": mc.mean,
                "std_error": mc.std_error,
                "z": z,
                "min": mc.samples.iter().copied().fold(f64::INFINITY, f64::min),
                "max": mc.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }),
        )?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_histogram_csv(&mut buf, &hist)?;
            emit_bytes(cli.out.as_deref(), &buf)?;
        }
    }
    let limit = cli.tol.unwrap_or(4.0);
    if z.abs() > limit {
        return Err(CliError::Check(format!("Monte-Carlo mean is {z:.2} standard errors from the analytic value")));
    }
    Ok(())
}

fn parse_lm(s: &str) -> CliResult<(HalfInt, HalfInt)> {
    let (l, m) = s.split_once(',').ok_or_else(|| CliError::Input(format!("expected \"L,M\", got '{s}'")))?;
    Ok((l.parse()?, m.parse()?))
}

fn cmd_schmidt(cli: &Cli, l: HalfInt, m: HalfInt, to: Option<&str>, gate: &GateArgs) -> CliResult {
    let j = match cli.j {
        Some(j) => j,
        None if gate.gate.is_some() || gate.file.is_some() || gate.cartan.is_some() => resolve_gate(gate, cli)?.gate.j(),
        None => return Err(CliError::Input("schmidt needs --j".into())),
    };
    let spectrum = schmidt_spectrum(j, l, m)?;
    let src = coupled_state(j, l, m)?;
    let mut report = json!({
        "j": j,
        "l": l,
        "m": m,
        "schmidt": spectrum,
        "linear_entropy": pair_linear_entropy(j, &src)?,
    });
    if let Some(target) = to {
        let g = resolve_gate(gate, cli)?;
        let (l2, m2) = parse_lm(target)?;
        let dst = coupled_state(j, l2, m2)?;
        let overlap = schmidt_transport_check(j, &g.gate, &src, &dst)?;
        let obj = report.as_object_mut().expect("object");
        obj.insert("gate".into(), json!(g.label));
        obj.insert("target".into(), json!({ "l": l2, "m": m2, "schmidt": schmidt_spectrum(j, l2, m2)? }));
        obj.insert("transport".into(), json!(overlap));
    }
    match cli.format {
        Format::Json => emit_json(cli.out.as_deref(), &report),
        Format::Csv => emit_csv(cli.out.as_deref(), &rows("schmidt", &spectrum)),
    }
}

#[derive(Serialize)]
struct TableRow {
    table: &'static str,
    j: HalfInt,
    q: i32,
    index: usize,
    value: f64,
}

fn cmd_tables(cli: &Cli) -> CliResult {
    let js: Vec<HalfInt> = match cli.j {
        Some(j) => vec![j],
        None => (2..=5).map(HalfInt::from_twice).collect(),
    };
    let mut entries = Vec::new();
    let mut flat = Vec::new();
    let mut push = |table: &'static str, j: HalfInt, q: i32, v: &[f64]| {
        flat.extend(v.iter().enumerate().map(|(index, &value)| TableRow { table, j, q, index, value }));
    };
    for j in js {
        if j.twice() < 1 {
            return Err(CliError::Input(format!("j = {j} must be positive")));
        }
        let n_p = invariant_vector(&operator_n(j), Basis::P).components;
        let n_t = invariant_vector(&operator_n(j), Basis::T).components;
        push("n_p", j, 0, &n_p);
        push("n_t", j, 0, &n_t);
        let qs: Vec<i32> = match cli.q {
            Some(q) => vec![q],
            None => (1..=j.floor()).collect(),
        };
        let mut per_q = Vec::new();
        for q in qs {
            let p = m_vector(j, q)?.components;
            let t = invariant_vector(&operator_m(j, q)?, Basis::T).components;
            let avg = average_ep_analytic(j, q)?;
            push("m_p", j, q, &p);
            push("m_t", j, q, &t);
            push("haar_average", j, q, &[avg]);
            let best = KnownGate::ALL.into_iter().find(|g| g.j() == j && g.q() == q);
            per_q.push(json!({
                "q": q,
                "m_p": p,
                "m_t": t,
                "block_eigenvalues": m_block_eigenvalues(j, q)?,
                "haar_average": avg,
                "max_ep": best.map(KnownGate::expected_ep),
                "max_ep_fraction": best.map(KnownGate::ep_fraction),
                "conjectural": best.map(KnownGate::conjectural),
            }));
        }
        entries.push(json!({ "j": j, "n_p": n_p, "n_t": n_t, "m": per_q }));
    }
    match cli.format {
        Format::Json => emit_json(cli.out.as_deref(), &Value::Array(entries)),
        Format::Csv => emit_csv(cli.out.as_deref(), &flat),
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Verify { scope, samples } => cmd_verify(cli, *scope, *samples),
        Command::Ep(args) => cmd_ep(cli, args),
        Command::Distribution { gate, n_theta, n_phi, stereographic } => cmd_distribution(cli, gate, *n_theta, *n_phi, *stereographic),
        Command::Optimize { restarts, max_iters } => cmd_optimize(cli, *restarts, *max_iters),
        Command::Haar { samples, bins, histogram } => cmd_haar(cli, *samples, *bins, histogram.as_deref()),
        Command::Schmidt { l, m, to, gate } => cmd_schmidt(cli, *l, *m, to.as_deref(), gate),
        Command::Tables => cmd_tables(cli),
    }
}

fn main() -> ExitCode {
    spinpow::init_threads_from_env();
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            let (CliError::Check(msg) | CliError::Input(msg) | CliError::Internal(msg)) = &e;
            eprintln!("spinpow: {msg}");
            ExitCode::from(e.code())
        }
        Err(_) => ExitCode::from(3),
    }
}

