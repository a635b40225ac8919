use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qubolin::io::{parse_pair, parse_system, read_system, sidecar, QuboDocument};
use qubolin::qubo::{
    build_sylvester_exact, build_sylvester_with, build_vanilla_with, ratio_window, sylvester_nonzero_bound,
    vanilla_nonzero_bound, BuildOptions, Formulation, Provenance,
};
use qubolin::solver::{
    solve_exhaustive_with, solve_sa, solve_system, success_report, CongruenceSource, ExhaustiveParams,
    FormulationKind, Method, SaParams, SampleSet, SolveOptions, EXHAUSTIVE_CAP, SOLVED_RTOL,
};
use qubolin::topology::{chimera, embed_qubo};
use qubolin::{
    diagonalize_congruent, qr_congruence, BigRational, CongruencePair, EncodingKind, EncodingSpec, Error, LinearSystem, Matrix,
    QuboModel,
};

type RationalPair = (Vec<BigRational>, Vec<Vec<BigRational>>);

#[derive(Parser)]
#[command(name = "qubolin", version, about = "Compile linear systems to QUBO models, solve and embed them")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a linear system into a QUBO file and a JSON sidecar.
    Build(BuildArgs),
    /// Solve a QUBO file or a linear system and print a JSON report.
    Solve(SolveArgs),
    /// Print structural metrics of a QUBO file.
    Analyze {
        #[arg(long)]
        qubo: PathBuf,
    },
    /// Embed a QUBO file into a Chimera graph.
    Embed {
        #[arg(long)]
        qubo: PathBuf,
        /// Grid rows, columns and shore size, e.g. 16,16,4.
        #[arg(long, value_parser = parse_shape)]
        chimera: (usize, usize, usize),
    },
    /// Write the edge list of a Chimera graph.
    Chimera {
        #[arg(long, value_parser = parse_shape)]
        shape: (usize, usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    Vanilla,
    Sylvester,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    SignedPair,
    OffsetBinary,
}

#[derive(Clone, Copy, ValueEnum)]
enum CongruenceArg {
    Symmetric,
    Qr,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exhaustive,
    Sa,
}

/// How to compile a system.
#[derive(Args)]
struct CompileArgs {
    #[arg(long, value_enum, default_value = "sylvester")]
    formulation: FormulationArg,
    #[arg(long, value_enum, default_value = "signed-pair")]
    encoding: EncodingArg,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    lo: i32,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    hi: i32,
    /// Store every upper-triangular coefficient, zeros included.
    #[arg(long)]
    keep_zeros: bool,
    #[arg(long, value_enum, default_value = "symmetric")]
    congruence: CongruenceArg,
    /// Congruence pair {"D": [...], "R": [[...]]} to use instead of computing one.
    #[arg(long, conflicts_with = "congruence")]
    pair: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    system: PathBuf,
    #[command(flatten)]
    compile: CompileArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, conflicts_with = "system", required_unless_present = "system")]
    qubo: Option<PathBuf>,
    #[arg(long)]
    system: Option<PathBuf>,
    #[command(flatten)]
    compile: CompileArgs,
    #[arg(long, value_enum, default_value = "exhaustive")]
    method: MethodArg,
    #[arg(long, default_value_t = 1000)]
    reads: usize,
    #[arg(long, default_value_t = 200)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Annealing batches for the occurrence table.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0.1)]
    beta_start: f64,
    #[arg(long, default_value_t = 10.0)]
    beta_end: f64,
    /// Fit the beta range to each model instead of using the fixed one.
    #[arg(long)]
    fit_beta: bool,
    /// Correction rounds after the first solve (system input only).
    #[arg(long, default_value_t = 0)]
    refine: usize,
}

fn parse_shape(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("expected M,N,L: {e}"))?;
    match parts[..] {
        [m, n, l] => Ok((m, n, l)),
        _ => Err("expected three comma-separated integers M,N,L".into()),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Parse { .. } | Error::Json(_) => 2,
                Error::Singular { .. } => 3,
                Error::SizeCap { .. } => 4,
                _ => 1,
            };
        }
    }
    1
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("QUBOLIN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| anyhow!("QUBOLIN_THREADS must be a non-negative integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

impl CompileArgs {
    fn spec(&self, n_vars: usize) -> qubolin::Result<EncodingSpec> {
        let kind = match self.encoding {
            EncodingArg::SignedPair => EncodingKind::SignedPair,
            EncodingArg::OffsetBinary => EncodingKind::OffsetBinary,
        };
        EncodingSpec::new(kind, self.lo, self.hi, n_vars)
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            keep_zeros: self.keep_zeros,
            ..BuildOptions::default()
        }
    }

    fn read_pair(&self) -> anyhow::Result<Option<RationalPair>> {
        let Some(path) = &self.pair else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Some(parse_pair(&text)?))
    }

    fn compile(&self, sys: &LinearSystem) -> anyhow::Result<QuboModel> {
        let spec = self.spec(sys.n())?;
        let opts = self.build_options();
        let model = match self.formulation {
            FormulationArg::Vanilla => build_vanilla_with(sys, &spec, &opts)?,
            FormulationArg::Sylvester => match self.read_pair()? {
                Some((d, r)) => build_sylvester_exact(sys, &d, &r, &spec, &opts)?,
                None => {
                    let pair = match self.congruence {
                        CongruenceArg::Symmetric => diagonalize_congruent(&sys.gram())?,
                        CongruenceArg::Qr => qr_congruence(sys.a())?,
                    };
                    build_sylvester_with(sys, &pair, &spec, &opts)?
                }
            },
        };
        Ok(model)
    }

    fn congruence_source(&self) -> anyhow::Result<CongruenceSource> {
        if let Some((d, r)) = self.read_pair()? {
            let d = d.iter().map(qubolin::qubo::to_f64).collect();
            let rows: Vec<Vec<f64>> = r.iter().map(|row| row.iter().map(qubolin::qubo::to_f64).collect()).collect();
            return Ok(CongruenceSource::Supplied(CongruencePair::new(d, Matrix::from_rows(&rows)?)?));
        }
        Ok(match self.congruence {
            CongruenceArg::Symmetric => CongruenceSource::Symmetric,
            CongruenceArg::Qr => CongruenceSource::Qr,
        })
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn load_system(path: &Path) -> anyhow::Result<LinearSystem> {
    read_system(path).with_context(|| format!("reading system {}", path.display()))
}

fn cmd_build(args: &BuildArgs) -> anyhow::Result<Option<Value>> {
    let sys = load_system(&args.system)?;
    let model = args.compile.compile(&sys)?;
    QuboDocument::from_model(&model)
        .write(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let side = sidecar_path(&args.out);
    let text = serde_json::to_string_pretty(&sidecar(&model, &sys))?;
    std::fs::write(&side, text + "\n").with_context(|| format!("writing {}", side.display()))?;
    Ok(None)
}

impl SolveArgs {
    fn sa_params(&self) -> SaParams {
        SaParams {
            reads: self.reads,
            sweeps: self.sweeps,
            beta_start: self.beta_start,
            beta_end: self.beta_end,
            seed: self.seed,
        }
    }

    fn method(&self) -> Method {
        match self.method {
            MethodArg::Exhaustive => Method::Exhaustive(ExhaustiveParams::default()),
            MethodArg::Sa => Method::Sa(self.sa_params()),
        }
    }
}

fn ground_states_json(set: &SampleSet) -> Value {
    set.ground_states()
        .map(|s| json!({"bits": s.assignment.to_string(), "energy": s.energy, "count": s.count}))
        .collect()
}

/// The occurrence table over `trials` annealing batches. The minimum is
/// exact when the model is small enough for exhaustive search.
fn occurrence_table(model: &QuboModel, args: &SolveArgs, best: f64) -> anyhow::Result<Value> {
    if !matches!(args.method, MethodArg::Sa) {
        return Ok(json!([]));
    }
    let mut p = args.sa_params();
    if args.fit_beta {
        p = p.fitted_to(model);
    }
    let minimum = (model.n_qubits() > EXHAUSTIVE_CAP).then_some(best);
    let report = success_report(model, &p, args.trials, minimum)?;
    Ok(serde_json::to_value(report)?)
}

/// Reattaches the pair and system saved next to a QUBO file, if present.
fn with_sidecar(doc: QuboDocument, path: &Path) -> anyhow::Result<(QuboModel, Option<LinearSystem>)> {
    let side = sidecar_path(path);
    let (Some(encoding), true) = (doc.encoding, side.exists()) else {
        return Ok((doc.model, None));
    };
    let text = std::fs::read_to_string(&side).with_context(|| format!("reading {}", side.display()))?;
    let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
    let sys = parse_system(&v["system"].to_string())?;
    let formulation = match doc.formulation.as_deref() {
        Some("sylvester") => {
            let d: Vec<f64> = serde_json::from_value(v["D"].clone()).map_err(Error::from)?;
            let r: Vec<Vec<f64>> = serde_json::from_value(v["R"].clone()).map_err(Error::from)?;
            Formulation::Sylvester(CongruencePair::new(d, Matrix::from_rows(&r)?)?)
        }
        Some("vanilla") => Formulation::Vanilla,
        _ => return Ok((doc.model, None)),
    };
    let model = doc.model.with_provenance(Provenance { formulation, encoding })?;
    Ok((model, Some(sys)))
}

fn cmd_solve(args: &SolveArgs) -> anyhow::Result<Option<Value>> {
    if let Some(path) = &args.system {
        let sys = load_system(path)?;
        let spec = args.compile.spec(sys.n())?;
        let formulation = match args.compile.formulation {
            FormulationArg::Vanilla => FormulationKind::Vanilla,
            FormulationArg::Sylvester => FormulationKind::Sylvester,
        };
        let mut opts = SolveOptions::new(formulation, args.method());
        opts.congruence = args.compile.congruence_source()?;
        opts.build = args.compile.build_options();
        opts.fit_beta = args.fit_beta;
        opts.refine_rounds = args.refine;
        let sol = solve_system(&sys, &spec, &opts)?;
        let table = occurrence_table(&sol.model, args, sol.samples.best_energy)?;
        return Ok(Some(json!({
            "n_qubits": sol.model.n_qubits(),
            "best_energy": sol.samples.best_energy,
            "offset": sol.model.offset(),
            "ground_states": ground_states_json(&sol.samples),
            "truncated": sol.samples.truncated,
            "decoded_x": sol.x_best,
            "residual": sol.residual,
            "solved": sol.solved,
            "rounds": sol.rounds,
            "occurrence_table": table,
        })));
    }
    let path = args.qubo.as_ref().ok_or_else(|| anyhow!("one of --qubo or --system is required"))?;
    let doc = QuboDocument::read(path).with_context(|| format!("reading {}", path.display()))?;
    let (model, sys) = with_sidecar(doc, path)?;
    let set = match args.method {
        MethodArg::Exhaustive => solve_exhaustive_with(&model, &ExhaustiveParams::default())?,
        MethodArg::Sa => {
            let mut p = args.sa_params();
            if args.fit_beta {
                p = p.fitted_to(&model);
            }
            solve_sa(&model, &p)?
        }
    };
    let table = occurrence_table(&model, args, set.best_energy)?;
    let btb = model.offset();
    let solved = set.best_energy + btb <= SOLVED_RTOL * (1.0 + btb);
    let (x, residual) = match (&sys, set.decoded.first()) {
        (Some(sys), Some(d)) => (Some(d.x.clone()), Some(sys.residual(&d.x)?)),
        _ => (None, None),
    };
    Ok(Some(json!({
        "n_qubits": model.n_qubits(),
        "best_energy": set.best_energy,
        "offset": btb,
        "ground_states": ground_states_json(&set),
        "truncated": set.truncated,
        "decoded_x": x,
        "residual": residual,
        "solved": solved,
        "occurrence_table": table,
    })))
}

fn cmd_analyze(path: &Path) -> anyhow::Result<Option<Value>> {
    let doc = QuboDocument::read(path).with_context(|| format!("reading {}", path.display()))?;
    let model = &doc.model;
    let components: Vec<usize> = model.block_decomposition().iter().map(Vec::len).collect();
    let bounds = match doc.encoding {
        Some(spec) if spec.kind == EncodingKind::SignedPair => {
            let (n, m) = (spec.n_vars, spec.digits());
            let (lo, hi) = ratio_window(n);
            json!({
                "vanilla_max": vanilla_nonzero_bound(n, m),
                "sylvester_max": sylvester_nonzero_bound(n, m),
                "ratio_window": [lo, hi],
            })
        }
        _ => json!({"vanilla_max": null, "sylvester_max": null, "ratio_window": null}),
    };
    Ok(Some(json!({
        "n_qubits": model.n_qubits(),
        "nonzeros": model.nonzero_count(),
        "edges": model.edges().len(),
        "components": components,
        "formulation": doc.formulation,
        "encoding": doc.encoding,
        "bounds": bounds,
    })))
}

fn cmd_embed(path: &Path, (m, n, l): (usize, usize, usize)) -> anyhow::Result<Option<Value>> {
    let doc = QuboDocument::read(path).with_context(|| format!("reading {}", path.display()))?;
    let g = chimera(m, n, l)?;
    Ok(Some(match embed_qubo(&doc.model, &g) {
        Ok(emb) => json!({
            "feasible": true,
            "chains": emb.chains,
            "chain_length_max": emb.max_chain_length(),
            "physical_qubits": emb.physical_qubits(),
        }),
        Err(e @ (Error::Capacity { .. } | Error::Packing { .. })) => json!({
            "feasible": false,
            "chains": null,
            "chain_length_max": null,
            "reason": e.to_string(),
        }),
        Err(e) => return Err(e.into()),
    }))
}

fn cmd_chimera((m, n, l): (usize, usize, usize), out: Option<&Path>) -> anyhow::Result<Option<Value>> {
    let text = chimera(m, n, l)?.to_edge_list();
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(None)
}

fn run(cli: Cli) -> anyhow::Result<Option<Value>> {
    configure_threads()?;
    match cli.cmd {
        Cmd::Build(a) => {
            if a.compile.lo > a.compile.hi {
                bail!("--lo must not exceed --hi");
            }
            cmd_build(&a)
        }
        Cmd::Solve(a) => cmd_solve(&a),
        Cmd::Analyze { qubo } => cmd_analyze(&qubo),
        Cmd::Embed { qubo, chimera } => cmd_embed(&qubo, chimera),
        Cmd::Chimera { shape, out } => cmd_chimera(shape, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Some(report)) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("reports are plain JSON"));
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
