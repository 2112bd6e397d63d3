use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use tpower::dks::{sequential_dks, DksConfig, DksMethod};
use tpower::io::{
    default_spiked_spec, gen_planted_subgraph, gen_spiked_covariance, load_csv_data, load_csv_matrix, load_edge_list,
    load_matrix_market, run_bench, to_json, write_result_json, BatchReport, BenchConfig, BenchInstance, ResultRecord,
    LIBRARY_VERSION,
};
use tpower::linalg::SymmetricMatrix;
use tpower::rng::{gaussian_vec, stream};
use tpower::solver::{init_top_diagonal, smallest_sparse_eig, tpower, DiagonalInit, InitStrategy, ShiftPolicy, SolveConfig, SparseEigenResult};
use tpower::spca::{covariance_from_data, spca_extract, CovarianceScaling, SpcaResult};
use tpower::theory::{perturbation_suite, power_progress_suite, theorem_suite, truncation_suite, weyl_suite};
use tpower::Error;

use crate::{
    BenchArgs, BenchKind, DksArgs, EigArgs, Failure, InitArg, InputArgs, InputKind, MethodArg, ShiftArg, SolverArgs,
    SpcaArgs, SynthArgs, SynthKind, VerifyArgs,
};

type CmdResult = Result<(), Failure>;

fn emit<T: Serialize + ?Sized>(value: &T, output: Option<&Path>) -> CmdResult {
    match output {
        Some(path) => write_result_json(value, path)?,
        None => print!("{}", to_json(value)?),
    }
    Ok(())
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn load_covariance(input: &InputArgs) -> Result<SymmetricMatrix, Failure> {
    let is_mtx = input.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
    match input.input_kind {
        InputKind::Covariance if is_mtx => Ok(load_matrix_market(&input.input)?),
        InputKind::Covariance => Ok(load_csv_matrix(&input.input, input.header)?.0),
        InputKind::Data => {
            let (d, _) = load_csv_data(&input.input, input.header)?;
            Ok(covariance_from_data(&d, input.center, CovarianceScaling::Unscaled)?)
        }
        InputKind::Graph => Err(Failure::Usage("--input-kind graph is only valid for dks".into())),
    }
}

fn solve_config(k: usize, s: &SolverArgs) -> SolveConfig {
    let init = match s.init {
        InitArg::Diag => InitStrategy::TopDiagonalSingle,
        InitArg::DiagSet => InitStrategy::TopDiagonalIndicator,
        InitArg::Warm => InitStrategy::WarmStart { k0: None, factor: 0.5 },
        InitArg::Backward => InitStrategy::BackwardElimination,
    };
    let shift = match s.shift {
        ShiftArg::None => ShiftPolicy::None,
        ShiftArg::Auto => ShiftPolicy::Auto,
    };
    SolveConfig::new(k)
        .with_tol(s.tol)
        .with_max_iter(s.max_iter)
        .with_init(init)
        .with_shift(shift)
        .with_seed(s.seed)
}

fn is_degenerate(e: &Error) -> bool {
    match e {
        Error::DegenerateIterate { .. } => true,
        Error::Component { source, .. } => is_degenerate(source),
        _ => false,
    }
}

/// Top-diagonal indicator plus a small seeded Gaussian perturbation, used
/// as the start of a second attempt when `A x` vanished.
fn perturbed_start(a: &SymmetricMatrix, k: usize, seed: u64) -> Result<Vec<f64>, Failure> {
    let base = init_top_diagonal(a, k, DiagonalInit::Indicator)?;
    let noise = gaussian_vec(&mut stream(seed, 0, "cli-retry"), a.dim());
    Ok(base.values().iter().zip(noise).map(|(b, z)| b + 1e-3 * z).collect())
}

fn with_retry<T>(
    a: &SymmetricMatrix,
    cfg: &SolveConfig,
    run: impl Fn(&SolveConfig) -> tpower::Result<T>,
) -> Result<T, Failure> {
    match run(cfg) {
        Err(e) if is_degenerate(&e) => {
            log::warn!("{e}; retrying from a perturbed start");
            let retry = cfg.clone().with_init(InitStrategy::Custom(perturbed_start(a, cfg.k, cfg.seed)?));
            Ok(run(&retry)?)
        }
        other => Ok(other?),
    }
}

pub fn eig(args: &EigArgs) -> CmdResult {
    let start = Instant::now();
    let a = load_covariance(&args.input)?;
    let cfg = solve_config(args.k, &args.solver);
    let r: SparseEigenResult = with_retry(&a, &cfg, |c| {
        if args.smallest {
            smallest_sparse_eig(&a, c)
        } else {
            tpower(&a, c)
        }
    })?;
    let record = ResultRecord::eig("eig", args, &r, elapsed_ms(start))?;
    emit(&record, args.output.as_deref())
}

pub fn spca(args: &SpcaArgs) -> CmdResult {
    let start = Instant::now();
    let cards = &args.cardinalities.0;
    if cards.is_empty() {
        return Err(Failure::Usage("--cardinalities needs at least one value".into()));
    }
    let sigma = load_covariance(&args.input)?;
    let cfg = solve_config(cards[0], &args.solver);
    let r: SpcaResult = with_retry(&sigma, &cfg, |c| spca_extract(&sigma, cards, c))?;
    let records = r
        .per_component_results
        .iter()
        .map(|c| ResultRecord::eig("spca", args, c, 0.0))
        .collect::<tpower::Result<Vec<_>>>()?;
    let report = BatchReport::new("spca", args, records, elapsed_ms(start))?
        .with("explained_variance", &r.explained_variance)?
        .with("proportion_explained", &r.proportion_explained)?
        .with("adjusted_variance", &r.adjusted_variance)?
        .with("proportion_adjusted", &r.proportion_adjusted)?;
    emit(&report, args.output.as_deref())
}

pub fn dks(args: &DksArgs) -> CmdResult {
    let start = Instant::now();
    let methods = match args.method {
        MethodArg::Tpower => vec![DksMethod::Tpower],
        MethodArg::Feige => vec![DksMethod::Feige],
        MethodArg::Ravi => vec![DksMethod::Ravi],
        MethodArg::Relaxed => vec![DksMethod::Relaxed],
        MethodArg::All => vec![DksMethod::Tpower, DksMethod::Feige, DksMethod::Ravi],
    };
    let graph = load_edge_list(&args.input, args.directed)?;
    if graph.self_loops_dropped() > 0 {
        log::warn!("dropped {} self-loop(s)", graph.self_loops_dropped());
    }
    let w = graph.to_matrix();
    let cfg = DksConfig {
        max_iter: args.max_iter,
        tol: args.tol,
    };
    let mut records = Vec::new();
    let mut totals = Vec::new();
    let mut truncated = false;
    for &m in &methods {
        let t0 = Instant::now();
        let s = sequential_dks(&w, args.k, args.rounds, m, &cfg)?;
        let ms = elapsed_ms(t0);
        truncated |= s.truncated;
        for r in &s.rounds {
            records.push(ResultRecord::dks("dks", args, r, cfg.max_iter, ms)?);
        }
        totals.push((m, s.total_density));
    }
    let mut report = BatchReport::new("dks", args, records, elapsed_ms(start))?.with("truncated", &truncated)?;
    if methods.len() == 1 {
        report = report.with("total_density", &totals[0].1)?;
    } else {
        let table: Vec<_> = totals.iter().map(|(m, d)| json!({ "method": m, "total_density": d })).collect();
        report = report.with("density_comparison", &table)?;
        let mut text = format!("{:<8} {:>14}\n", "method", "total density");
        for (m, d) in &totals {
            let name = serde_json::to_value(m).unwrap_or_default();
            let _ = writeln!(text, "{:<8} {:>14.6}", name.as_str().unwrap_or("?"), d);
        }
        eprint!("{text}");
    }
    emit(&report, args.output.as_deref())
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).map_err(|e| {
        Failure::Solver(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

pub fn synth(args: &SynthArgs) -> CmdResult {
    std::fs::create_dir_all(&args.output).map_err(|e| {
        Failure::Solver(Error::Io {
            path: args.output.clone(),
            source: e,
        })
    })?;
    let truth_path: PathBuf = args.output.join("truth.json");
    let (instance_path, truth) = match args.kind {
        SynthKind::Spiked => {
            let (loadings, eig) = default_spiked_spec(args.p)?;
            let (d, truth) = gen_spiked_covariance(args.p, args.n, &loadings, &eig, args.seed, args.trial)?;
            let mut text = String::new();
            for i in 0..d.rows() {
                let row: Vec<String> = d.row(i).iter().map(|v| v.to_string()).collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            let path = args.output.join("data.csv");
            write_file(&path, &text)?;
            (path, truth)
        }
        SynthKind::Planted => {
            let (g, truth) = gen_planted_subgraph(args.p, args.k, args.p_in, args.p_out, args.seed, args.trial)?;
            let mut text = format!("# planted subgraph, {} vertices\n", g.n());
            for (u, v, _) in g.edges() {
                let _ = writeln!(text, "{u} {v}");
            }
            let path = args.output.join("graph.txt");
            write_file(&path, &text)?;
            (path, truth)
        }
    };
    let record = json!({
        "task": "synth",
        "config": args,
        "instance": instance_path,
        "truth": truth,
        "library_version": LIBRARY_VERSION,
    });
    write_result_json(&record, &truth_path)?;
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> CmdResult {
    let start = Instant::now();
    let suites = vec![
        weyl_suite(args.draws, 8, args.seed)?,
        perturbation_suite(args.draws, args.seed)?,
        power_progress_suite(args.draws, args.seed)?,
        truncation_suite(args.draws, args.seed)?,
    ];
    let (theorem, _) = theorem_suite(args.instances, args.seed)?;
    let failures: Vec<String> = suites
        .iter()
        .chain(std::iter::once(&theorem))
        .filter(|s| !s.all_passed())
        .map(|s| format!("{}: {} failures", s.name, s.failed))
        .collect();
    let report = json!({
        "task": "verify",
        "config": args,
        "suites": suites,
        "theorem": theorem,
        "all_passed": failures.is_empty(),
        "timing_ms": elapsed_ms(start),
        "library_version": LIBRARY_VERSION,
    });
    emit(&report, args.output.as_deref())?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("; ")))
    }
}

pub fn bench(args: &BenchArgs) -> CmdResult {
    let ks = args
        .k_frac
        .iter()
        .map(|f| {
            if *f > 0.0 && *f <= 1.0 {
                Ok(((f * args.p as f64).round() as usize).max(1))
            } else {
                Err(Failure::Usage(format!("--k-frac {f} outside (0, 1]")))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let config = BenchConfig {
        instance: match args.synth {
            BenchKind::Gaussian => BenchInstance::Gaussian,
            BenchKind::Spiked => BenchInstance::Spiked,
        },
        n: args.n,
        p: args.p,
        ks,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
    };
    let report = run_bench(&config)?;
    for (k, secs) in &report.mean_seconds {
        eprintln!("{} x {}, k = {k}: {secs:.3} s per component", args.n, args.p);
    }
    emit(&report, args.output.as_deref())
}
