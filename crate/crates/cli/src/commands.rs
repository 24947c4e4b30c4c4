//! Command-line definitions and handlers.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use seqmetro::channels::DensityMatrix;
use seqmetro::conditions::{check_corollary1_with, check_corollary2_with, check_theorem2_conditions_with, HlStatus, Theorem2Check};
use seqmetro::control_synth::{synthesize_control_with, ControlSolution, RefineStep};
use seqmetro::numerics::{c64, identity, CMatrix};
use seqmetro::qfi::{evaluate, propagate};
use seqmetro::scenarios::{
    heisenberg_input_state, heisenberg_noise_kraus, heisenberg_signal_eigenmatrix, heisenberg_unitary, pauli_x, qutrit_input_state, ScenarioName, ScenarioSpec,
};
use seqmetro::tolerances::Tolerances;

use crate::analysis::analyze;
use crate::channel_file::{from_json, to_json, ChannelFile, JsonMatrix, KrausSidecar, LoadedChannel, Sample};
use crate::exit::{CliError, CONDITIONS_NOT_MET, SANITY_FAILED};

pub const MAX_SWEEP: u64 = 10_000;
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "seqmetro", version, about = "Sequential quantum metrology with a single probe")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum, scaling conditions and asymptotic QFI of a channel file.
    Analyze {
        file: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Exact QFI for a range of sequence lengths, written as CSV.
    Sweep(SweepArgs),
    /// Search for the unitary control of the signal-operator condition.
    Synthesize(SynthArgs),
    /// Write a built-in scenario as a channel file.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Channel file.
    #[arg(conflicts_with = "scenario")]
    pub file: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioKind>,
    #[command(flatten)]
    pub params: ScenarioParams,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ScenarioKind {
    Dephasing,
    QutritDecay,
    Heisenberg,
}

impl ScenarioKind {
    pub fn name(self) -> ScenarioName {
        match self {
            Self::Dephasing => ScenarioName::Dephasing,
            Self::QutritDecay => ScenarioName::QutritDecay,
            Self::Heisenberg => ScenarioName::HeisenbergNoisy,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Slope {
    Linear,
    Constant,
}

/// Scenario parameters; each applies only to the scenario that has it.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioParams {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta0: f64,
    /// Dephasing: p(θ) = p0 + θ (linear) or p0 (constant).
    #[arg(long, value_enum)]
    pub p_of_theta: Option<Slope>,
    /// Dephasing: φ(θ) = phi0 + θ (linear) or phi0 (constant).
    #[arg(long, value_enum)]
    pub phi_of_theta: Option<Slope>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    /// Heisenberg evolution time.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub p3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi4: Option<f64>,
}

impl ScenarioParams {
    pub fn spec(&self, kind: ScenarioKind) -> Result<ScenarioSpec, CliError> {
        let mut spec = ScenarioSpec::new(kind.name(), self.theta0);
        let slope = |s: Slope| if s == Slope::Linear { 1.0 } else { 0.0 };
        let given = [
            ("p_rate", self.p_of_theta.map(slope)),
            ("phi_rate", self.phi_of_theta.map(slope)),
            ("p0", self.p0),
            ("phi0", self.phi0),
            ("t", self.t),
            ("p1", self.p1),
            ("p2", self.p2),
            ("p3", self.p3),
            ("phi1", self.phi1),
            ("phi2", self.phi2),
            ("phi3", self.phi3),
            ("phi4", self.phi4),
        ];
        for (key, value) in given {
            if let Some(v) = value {
                spec.set(key, v)?;
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 1)]
    pub n_min: u64,
    #[arg(long, default_value_t = 50)]
    pub n_max: u64,
    /// Weight of the scenario's input-state family; ignored for files.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// `none`, `auto`, or a JSON file holding a unitary or a saved solution.
    #[arg(long, default_value = "none")]
    pub control: String,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub source: Source,
    /// `auto`, a candidate index, or a JSON file holding the operator.
    #[arg(long, default_value = "auto")]
    pub r0: String,
    /// JSON destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[arg(value_enum)]
    pub name: ScenarioKind,
    #[command(flatten)]
    pub params: ScenarioParams,
    /// Spacing of the θ samples around θ₀.
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub fd_step: f64,
    /// Embed the scenario's input state with this weight.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let tol = Tolerances::from_env().map_err(CliError::malformed)?;
    match cli.command {
        Command::Analyze { file, json } => {
            let ch = ChannelFile::read(&file)?.load()?;
            let report = analyze(&ch, &tol)?;
            let text = if json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                report.to_text()
            };
            emit(None, &text)
        }
        Command::Sweep(args) => cmd_sweep(&args, &tol),
        Command::Synthesize(args) => cmd_synthesize(&args, &tol),
        Command::Scenario(args) => {
            let spec = args.params.spec(args.name)?;
            let file = scenario_file(&spec, args.fd_step, args.alpha)?;
            emit(args.out.as_deref(), &(serde_json::to_string_pretty(&file).expect("file serializes") + "\n"))
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::new(crate::exit::FAILURE, format!("write failed: {e}"));
    match path {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

/// The scenario as a sampled family: θ₀ and θ₀ ± h where the domain allows,
/// the analytic derivative, and the Kraus form when the scenario has one.
pub fn scenario_file(spec: &ScenarioSpec, h: f64, alpha: Option<f64>) -> Result<ChannelFile, CliError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(CliError::malformed("fd-step must be positive"));
    }
    let pc = spec.build()?;
    let th = spec.theta0;
    let mut samples = vec![Sample {
        theta: th,
        transition: to_json(pc.transition()?.matrix()),
    }];
    for theta in [th - h, th + h] {
        if let Ok(t) = pc.transition_at(theta) {
            samples.push(Sample {
                theta,
                transition: to_json(t.matrix()),
            });
        }
    }
    samples.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let hnks = match (pc.kraus(), pc.kraus_dot()) {
        (Some(k), Some(kd)) => Some(KrausSidecar {
            kraus: k?.ops().iter().map(to_json).collect(),
            kraus_dot: kd?.iter().map(to_json).collect(),
        }),
        _ => None,
    };
    let (lo, hi) = pc.domain();
    let input_state = alpha
        .map(|a| scenario_input(spec, a).map(|rho| to_json(rho.matrix())))
        .transpose()?;
    Ok(ChannelFile {
        dim: pc.dim(),
        theta0: th,
        fd_step: Some(h),
        domain: (lo.is_finite() && hi.is_finite()).then_some([lo, hi]),
        samples: Some(samples),
        t_dot: Some(to_json(&pc.derivative()?)),
        hnks,
        input_state,
        ..Default::default()
    })
}

/// Input-state family of each scenario, weighted by `alpha`.
pub fn scenario_input(spec: &ScenarioSpec, alpha: f64) -> Result<DensityMatrix, CliError> {
    Ok(match spec.name {
        ScenarioName::Dephasing => {
            let m = identity(2).scale(0.5) + pauli_x().map(|z| z * c64(alpha, 0.0));
            DensityMatrix::new(m)?
        }
        ScenarioName::QutritDecay => qutrit_input_state(alpha)?,
        ScenarioName::HeisenbergNoisy => {
            let t = spec.params["t"];
            heisenberg_input_state(t, spec.theta0, alpha)?
        }
    })
}

fn load_source(src: &Source) -> Result<(LoadedChannel, Option<ScenarioSpec>), CliError> {
    match (&src.file, src.scenario) {
        (Some(path), None) => Ok((ChannelFile::read(path)?.load()?, None)),
        (None, Some(kind)) => {
            let spec = src.params.spec(kind)?;
            let file = scenario_file(&spec, DEFAULT_FD_STEP, None)?;
            Ok((file.load()?, Some(spec)))
        }
        _ => Err(CliError::malformed("give either a channel file or --scenario")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub qfi: f64,
    pub assoc_qfi: f64,
    pub lower_bound: f64,
}

/// Propagates sequentially, then evaluates each length in parallel.
pub fn sweep(
    ch: &LoadedChannel,
    rho0: &DensityMatrix,
    control: Option<&CMatrix>,
    n_min: u64,
    n_max: u64,
    tol: &Tolerances,
) -> Result<Vec<SweepRow>, CliError> {
    if n_min == 0 || n_min > n_max || n_max > MAX_SWEEP {
        return Err(CliError::malformed(format!(
            "need 1 <= n-min <= n-max <= {MAX_SWEEP}, got {n_min}..{n_max}"
        )));
    }
    let states = propagate(&ch.pc, rho0, control, n_max)?;
    states[(n_min - 1) as usize..]
        .par_iter()
        .map(|s| {
            let q = evaluate(s, tol)?;
            Ok(SweepRow {
                n: s.n,
                qfi: q.qfi,
                assoc_qfi: q.associated,
                lower_bound: q.bound,
            })
        })
        .collect::<Result<Vec<_>, seqmetro::error::Error>>()
        .map_err(Into::into)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("N,qfi,assoc_qfi,lower_bound\n");
    for r in rows {
        out.push_str(&format!("{},{:e},{:e},{:e}\n", r.n, r.qfi, r.assoc_qfi, r.lower_bound));
    }
    out
}

fn sweep_input(ch: &LoadedChannel, spec: Option<&ScenarioSpec>, alpha: Option<f64>, tol: &Tolerances) -> Result<DensityMatrix, CliError> {
    if let (Some(spec), Some(a)) = (spec, alpha) {
        return scenario_input(spec, a);
    }
    if let Some(rho) = &ch.input_state {
        return Ok(rho.clone());
    }
    let c1 = check_corollary1_with(&ch.pc, None, tol);
    if let Some(w) = c1.witness {
        return Ok(w.input_state);
    }
    if let Some(w) = check_corollary2_with(&ch.pc, tol).witness {
        return Ok(w.input_state);
    }
    Err(CliError::malformed(
        "no input state: give --alpha with a scenario or an input_state in the file",
    ))
}

fn solve_gate(ch: &LoadedChannel, tol: &Tolerances) -> Result<Theorem2Check, CliError> {
    let t2 = check_theorem2_conditions_with(&ch.pc, tol)?;
    if t2.status != HlStatus::Achievable {
        return Err(CliError::new(
            CONDITIONS_NOT_MET,
            format!("signal-operator conditions not met: {}", t2.diagnostics.join("; ")),
        ));
    }
    Ok(t2)
}

/// Either a bare matrix or an object with a `u_c` field.
#[derive(Deserialize)]
#[serde(untagged)]
enum ControlFile {
    Matrix(JsonMatrix),
    Solution { u_c: JsonMatrix },
}

fn read_matrix_file(path: &Path, what: &str) -> Result<CMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::malformed(format!("cannot read {}: {e}", path.display())))?;
    let parsed: ControlFile =
        serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("invalid {what} file: {e}")))?;
    let m = match parsed {
        ControlFile::Matrix(m) | ControlFile::Solution { u_c: m } => m,
    };
    from_json(&m, what, false)
}

fn cmd_sweep(args: &SweepArgs, tol: &Tolerances) -> Result<(), CliError> {
    let (ch, spec) = load_source(&args.source)?;
    let rho0 = sweep_input(&ch, spec.as_ref(), args.alpha, tol)?;
    let control = match args.control.as_str() {
        "none" => None,
        "auto" => {
            let (sol, _, _) = solve_for(&ch, spec.as_ref(), "auto", tol)?;
            if !sol.succeeded {
                return Err(CliError::new(
                    SANITY_FAILED,
                    format!("control search failed its sanity check (residual {:.3e})", sol.sanity_residual),
                ));
            }
            Some(sol.u_c)
        }
        path => Some(read_matrix_file(Path::new(path), "control")?),
    };
    let rows = sweep(&ch, &rho0, control.as_ref(), args.n_min, args.n_max, tol)?;
    emit(args.out.as_deref(), &to_csv(&rows))
}

/// Checks the signal-operator conditions and runs the control search for the
/// chosen operator. Returns the candidate index when one was used.
pub fn solve(ch: &LoadedChannel, r0_choice: &str, tol: &Tolerances) -> Result<(ControlSolution, Option<usize>), CliError> {
    let t2 = solve_gate(ch, tol)?;
    let (r0, index) = match r0_choice {
        "auto" => (t2.r0_candidates[0].r0.clone(), Some(0)),
        s => match s.parse::<usize>() {
            Ok(i) => {
                let c = t2.r0_candidates.get(i).ok_or_else(|| {
                    CliError::malformed(format!("r0 index {i} out of range ({} candidates)", t2.r0_candidates.len()))
                })?;
                (c.r0.clone(), Some(i))
            }
            Err(_) => (read_matrix_file(Path::new(s), "r0")?, None),
        },
    };
    Ok((crate::analysis::synthesize(ch, &r0, tol)?, index))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StepRecord {
    pub round: usize,
    pub pair: [usize; 2],
    pub singular_values: Vec<f64>,
    pub count_after: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ListRecord {
    pub initial_subspaces: usize,
    pub refine_steps: Vec<StepRecord>,
    pub final_subspaces: usize,
    pub vectors: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TraceRecord {
    pub input: ListRecord,
    pub output: ListRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolutionRecord {
    pub u_c: JsonMatrix,
    pub sanity_residual: f64,
    pub succeeded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0_index: Option<usize>,
    /// For the two-qubit scenario: the control in the frame of the noise
    /// alone, `U_t(θ₀)·U_c`, with its phase fixed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_frame_u_c: Option<JsonMatrix>,
    pub trace: TraceRecord,
}

fn steps(s: &[RefineStep]) -> Vec<StepRecord> {
    s.iter()
        .map(|r| StepRecord {
            round: r.round,
            pair: [r.pair.0, r.pair.1],
            singular_values: r.singular_values.clone(),
            count_after: r.count_after,
        })
        .collect()
}

pub fn solution_record(sol: &ControlSolution, r0_index: Option<usize>, noise_frame: Option<CMatrix>) -> SolutionRecord {
    let list = |l: &seqmetro::control_synth::ListTrace| ListRecord {
        initial_subspaces: l.initial_subspaces,
        refine_steps: steps(&l.refine_steps),
        final_subspaces: l.final_subspaces,
        vectors: l.vectors,
    };
    SolutionRecord {
        u_c: to_json(&sol.u_c),
        sanity_residual: sol.sanity_residual,
        succeeded: sol.succeeded,
        r0_index,
        noise_frame_u_c: noise_frame.as_ref().map(to_json),
        trace: TraceRecord {
            input: list(&sol.trace.input),
            output: list(&sol.trace.output),
        },
    }
}

/// Control search for the two-qubit scenario carried out in the frame of the
/// noise alone, with the signal eigenmatrix rotated by `U_t(θ₀)`. Returns the
/// solution for the full channel and the noise-frame control.
pub fn heisenberg_noise_frame(spec: &ScenarioSpec, tol: &Tolerances) -> Result<(ControlSolution, CMatrix), CliError> {
    let hp = spec.heisenberg_params().ok_or_else(|| CliError::malformed("not the two-qubit scenario"))?;
    let u = heisenberg_unitary(hp.t, hp.theta0)?;
    let r_noise = &u * heisenberg_signal_eigenmatrix(hp.t, hp.theta0)? * u.adjoint();
    let noise = heisenberg_noise_kraus(hp.p, hp.phi)?;
    let mut sol = synthesize_control_with(&noise, &r_noise, tol)?;
    let framed = sol.u_c.clone();
    sol.u_c = u.adjoint() * &framed;
    Ok((sol, framed))
}

fn solve_for(ch: &LoadedChannel, spec: Option<&ScenarioSpec>, r0: &str, tol: &Tolerances) -> Result<(ControlSolution, Option<usize>, Option<CMatrix>), CliError> {
    match spec {
        Some(s) if s.name == ScenarioName::HeisenbergNoisy && r0 == "auto" => {
            // the gate still runs on the full channel
            solve_gate(ch, tol)?;
            let (sol, framed) = heisenberg_noise_frame(s, tol)?;
            Ok((sol, None, Some(framed)))
        }
        _ => {
            let (sol, index) = solve(ch, r0, tol)?;
            Ok((sol, index, None))
        }
    }
}

fn cmd_synthesize(args: &SynthArgs, tol: &Tolerances) -> Result<(), CliError> {
    let (ch, spec) = load_source(&args.source)?;
    let (sol, index, noise_frame) = solve_for(&ch, spec.as_ref(), &args.r0, tol)?;
    let record = solution_record(&sol, index, noise_frame);
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&record).expect("record serializes") + "\n"))?;
    if !sol.succeeded {
        return Err(CliError::new(
            SANITY_FAILED,
            format!("control fails the sanity check (residual {:.3e})", sol.sanity_residual),
        ));
    }
    Ok(())
}
