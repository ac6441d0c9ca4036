//! Scenario files, mesh files, and the runners behind the command-line
//! subcommands.
//!
//! Scenarios are TOML documents with named presets for the material and
//! boundary functions, so benchmark inputs can be committed and replayed
//! byte-for-byte. Meshes are JSON documents with the schema
//! `{ "dim": n, "vertices": [[x, ...]], "simplices": [[i0, ..., in]] }`.
//! Everything a runner writes is plain CSV or text for external plotting.

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cochain::{cell_count, Cochain, Locus};
use crate::complex::{uniform_interval, SimplicialComplex};
use crate::dirac::DiracVariant;
use crate::dual::DualComplex;
use crate::error::{MeshError, ModelError, SimError};
use crate::models::{
    assemble_diffusion, assemble_maxwell, assemble_telegraph, assemble_wave2d, BoundaryPort,
    PhsModel, PortSignal,
};
use crate::operators::OperatorSet;
use crate::sim::{
    convergence_study, error_report, exact_telegraph, simulate, telegraph_sample_points,
    telegraph_voltage_series, ConvergenceStudy, Trajectory,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    /// Process exit code: 1 for validation/verification failures, 2 for I/O
    /// and parse failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => 2,
            _ => 1,
        }
    }
}

// ---------------------------------------------------------------------------
// mesh files

/// JSON mesh document.
#[derive(Debug, Serialize, Deserialize)]
pub struct MeshFile {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
}

pub fn read_mesh_file(path: &Path) -> Result<SimplicialComplex, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: MeshFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: format!("{e} (line {}, column {})", e.line(), e.column()),
    })?;
    Ok(SimplicialComplex::build(
        file.dim,
        file.vertices,
        file.simplices,
    )?)
}

pub fn write_mesh_file(complex: &SimplicialComplex, path: &Path) -> Result<(), CliError> {
    let file = MeshFile {
        dim: complex.dim(),
        vertices: complex
            .vertices()
            .iter()
            .map(|v| v.as_slice().to_vec())
            .collect(),
        simplices: complex.oriented_top_tuples(),
    };
    let text = serde_json::to_string_pretty(&file).expect("mesh serialization cannot fail");
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

// ---------------------------------------------------------------------------
// scenario files

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    UniformInterval { a: f64, b: f64, n_cells: usize },
    File { path: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    Constant { value: f64 },
    /// The benchmark line profile 1 / (1 + z).
    PaperLine,
}

impl MaterialSpec {
    pub fn to_fn(&self) -> Box<dyn Fn(f64) -> f64> {
        match self {
            MaterialSpec::Constant { value } => {
                let v = *value;
                Box::new(move |_| v)
            }
            MaterialSpec::PaperLine => Box::new(|z| 1.0 / (1.0 + z)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Telegraph {
        capacitance: MaterialSpec,
        inductance: MaterialSpec,
    },
    Wave2d {},
    Diffusion {
        resistance: f64,
    },
    Maxwell {
        epsilon: f64,
        mu: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    Zero,
    Constant { value: f64 },
    Sine { amplitude: f64, omega: f64 },
    Step { height: f64, at: f64 },
    Load { resistance: f64 },
}

impl SignalSpec {
    fn to_signal(&self) -> PortSignal {
        match self {
            SignalSpec::Zero => PortSignal::Zero,
            SignalSpec::Constant { value } => PortSignal::Constant(*value),
            SignalSpec::Sine { amplitude, omega } => PortSignal::Sine {
                amplitude: *amplitude,
                omega: *omega,
            },
            SignalSpec::Step { height, at } => PortSignal::Step {
                height: *height,
                at: *at,
            },
            SignalSpec::Load { resistance } => PortSignal::LoadFeedback {
                resistance: *resistance,
            },
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default)]
    pub signals: Vec<SignalSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub dt: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[derive(Default)]
pub enum InitialSpec {
    #[default]
    Zero,
    /// A single unit impulse in one state entry.
    Impulse { index: usize, value: f64 },
    /// Deterministic pseudo-random state in [-amplitude, amplitude].
    Random { seed: u64, amplitude: f64 },
}


#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "exact", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// The closed-form benchmark voltage u(t - ln(z+1)) with u = sin.
    TelegraphSine,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_trials() -> usize {
    200
}

fn default_seed() -> u64 {
    0xDEC0DE
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            trials: default_trials(),
            seed: default_seed(),
        }
    }
}

/// A complete scenario: mesh source, model kind and parameters, boundary
/// signals, time grid, optional exact reference.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub mesh: MeshSpec,
    pub model: ModelSpec,
    #[serde(default)]
    pub boundary: BoundarySpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub initial: Option<InitialSpec>,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    #[serde(default)]
    pub verify: VerifySpec,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut scenario: Scenario = toml::from_str(&text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        // mesh file paths are relative to the scenario file
        if let MeshSpec::File { path: mesh_path } = &scenario.mesh {
            let p = Path::new(mesh_path);
            if p.is_relative() {
                let base = path.parent().unwrap_or_else(|| Path::new("."));
                scenario.mesh = MeshSpec::File {
                    path: base.join(p).to_string_lossy().into_owned(),
                };
            }
        }
        Ok(scenario)
    }

    pub fn build_mesh(&self) -> Result<SimplicialComplex, CliError> {
        match &self.mesh {
            MeshSpec::UniformInterval { a, b, n_cells } => {
                if *n_cells == 0 || b <= a {
                    return Err(CliError::Invalid(format!(
                        "uniform interval needs b > a and n_cells > 0, got [{a}, {b}] with {n_cells}"
                    )));
                }
                Ok(uniform_interval(*a, *b, *n_cells))
            }
            MeshSpec::File { path } => read_mesh_file(Path::new(path)),
        }
    }

    /// Mesh size parameter for convergence sweeps; only meaningful for the
    /// uniform interval generator.
    pub fn with_n_cells(&self, n: usize) -> Result<Scenario, CliError> {
        match self.mesh {
            MeshSpec::UniformInterval { a, b, .. } => {
                let mut s = self.clone();
                s.mesh = MeshSpec::UniformInterval { a, b, n_cells: n };
                Ok(s)
            }
            _ => Err(CliError::Invalid(
                "convergence sweeps need the uniform_interval mesh generator".into(),
            )),
        }
    }
}

/// A scenario instantiated into mesh, operators, model, and port wiring.
pub struct Instance {
    pub complex: SimplicialComplex,
    pub dual: DualComplex,
    pub ops: OperatorSet,
    pub model: PhsModel,
    pub port: BoundaryPort,
    pub initial: DVector<f64>,
}

impl Scenario {
    pub fn instantiate(&self) -> Result<Instance, CliError> {
        let complex = self.build_mesh()?;
        let dual = DualComplex::build(&complex)?;
        let ops = OperatorSet::assemble(&complex, &dual)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let model = match &self.model {
            ModelSpec::Telegraph {
                capacitance,
                inductance,
            } => {
                let c = capacitance.to_fn();
                let l = inductance.to_fn();
                assemble_telegraph(&complex, &dual, &ops, c.as_ref(), l.as_ref())?
            }
            ModelSpec::Wave2d {} => assemble_wave2d(&complex, &dual, &ops)?,
            ModelSpec::Diffusion { resistance } => {
                assemble_diffusion(&complex, &dual, &ops, *resistance)?
            }
            ModelSpec::Maxwell { epsilon, mu } => {
                assemble_maxwell(&complex, &dual, &ops, *epsilon, *mu)?
            }
        };
        let mut port = BoundaryPort::zero(&model);
        if !self.boundary.signals.is_empty() {
            if self.boundary.signals.len() != model.port_count() {
                return Err(CliError::Invalid(format!(
                    "scenario wires {} boundary signals but the model has {} ports",
                    self.boundary.signals.len(),
                    model.port_count()
                )));
            }
            for (b, spec) in self.boundary.signals.iter().enumerate() {
                port.signals[b] = spec.to_signal();
            }
        }
        let initial = match self.initial.clone().unwrap_or_default() {
            InitialSpec::Zero => DVector::zeros(model.state_dim()),
            InitialSpec::Impulse { index, value } => {
                if index >= model.state_dim() {
                    return Err(CliError::Invalid(format!(
                        "impulse index {index} out of range for state dimension {}",
                        model.state_dim()
                    )));
                }
                let mut x = DVector::zeros(model.state_dim());
                x[index] = value;
                x
            }
            InitialSpec::Random { seed, amplitude } => {
                use rand::Rng;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                DVector::from_fn(model.state_dim(), |_, _| {
                    rng.gen_range(-amplitude..amplitude)
                })
            }
        };
        Ok(Instance {
            complex,
            dual,
            ops,
            model,
            port,
            initial,
        })
    }
}

// ---------------------------------------------------------------------------
// mesh check

#[derive(Debug)]
pub struct MeshCheckReport {
    pub counts: Vec<usize>,
    pub boundary_counts: Vec<usize>,
    pub well_centered: bool,
    pub offenders: Vec<(usize, usize)>,
    pub total_measure: f64,
}

impl std::fmt::Display for MeshCheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let counts = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, c)| format!("N{k}={c}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            f,
            "{counts}, well-centered: {}",
            if self.well_centered { "yes" } else { "no" }
        )?;
        let boundary = self
            .boundary_counts
            .iter()
            .enumerate()
            .map(|(k, c)| format!("B{k}={c}"))
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(f, "boundary: {boundary}")?;
        writeln!(f, "total measure: {:.12}", self.total_measure)?;
        if !self.offenders.is_empty() {
            writeln!(f, "offending simplices (dim, index): {:?}", self.offenders)?;
        }
        Ok(())
    }
}

/// Load a mesh file, validate it, and summarize. Returns the report and
/// whether it should count as a validation success.
pub fn run_mesh_check(path: &Path) -> Result<MeshCheckReport, CliError> {
    let complex = read_mesh_file(path)?;
    let (well_centered, offenders) = complex.is_well_centered();
    Ok(MeshCheckReport {
        counts: (0..=complex.dim()).map(|k| complex.count(k)).collect(),
        boundary_counts: (0..complex.dim())
            .map(|k| complex.boundary_count(k))
            .collect(),
        well_centered,
        offenders,
        total_measure: complex.total_measure(),
    })
}

// ---------------------------------------------------------------------------
// dirac verify

#[derive(Debug)]
pub struct DiracVerifyReport {
    pub variant: DiracVariant,
    pub p: usize,
    pub q: usize,
    pub isotropy: crate::dirac::VerifyReport,
    /// (degree k, worst residual over the random triples)
    pub summation_by_parts: Vec<(usize, f64)>,
    pub fault_injected: bool,
}

impl DiracVerifyReport {
    pub fn pass(&self) -> bool {
        self.isotropy.pass() && self.summation_by_parts.iter().all(|&(_, r)| r < 1e-12)
    }
}

impl std::fmt::Display for DiracVerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "dirac structure: {:?}, (p, q) = ({}, {}){}",
            self.variant,
            self.p,
            self.q,
            if self.fault_injected {
                " [sign fault injected]"
            } else {
                ""
            }
        )?;
        writeln!(f, "{}", self.isotropy)?;
        for (k, r) in &self.summation_by_parts {
            writeln!(
                f,
                "summation by parts, degree {k}: residual {:.3e} ... {}",
                r,
                if *r < 1e-12 { "pass" } else { "FAIL" }
            )?;
        }
        write!(f, "overall: {}", if self.pass() { "pass" } else { "FAIL" })
    }
}

/// Assemble the scenario's Dirac structure, verify isotropy and the
/// summation-by-parts identity on random cochains.
pub fn run_dirac_verify(
    scenario: &Scenario,
    fault_inject: bool,
) -> Result<DiracVerifyReport, CliError> {
    use rand::Rng;
    let instance = scenario.instantiate()?;
    let mut dirac = instance.model.dirac.clone();
    if fault_inject {
        // flip the first nonzero of the first populated off-diagonal block
        let injected = dirac.inject_sign_fault(1, 0, 0) || dirac.inject_sign_fault(0, 1, 0);
        if !injected {
            return Err(CliError::Invalid("no block to corrupt".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.verify.seed);
    let isotropy = dirac.verify(scenario.verify.trials, &mut rng);

    let complex = &instance.complex;
    let ops = &instance.ops;
    let n = complex.dim();
    let mut sbp = Vec::new();
    for k in 1..=n {
        let mut worst = 0.0f64;
        for _ in 0..scenario.verify.trials {
            let rand_cochain = |rng: &mut ChaCha8Rng, degree: usize, locus: Locus| {
                let count = cell_count(complex, degree, locus);
                Cochain::from_values(
                    complex,
                    degree,
                    locus,
                    (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                )
                .expect("counts are consistent")
            };
            let e_p = rand_cochain(&mut rng, k - 1, Locus::Primal);
            let eq = rand_cochain(&mut rng, n - k, Locus::DualInterior);
            let eb = rand_cochain(&mut rng, n - k, Locus::DualBoundary);
            let res = crate::cochain::summation_by_parts_residual(complex, ops, &e_p, &eq, &eb)
                .expect("degrees are consistent");
            worst = worst.max(res);
        }
        sbp.push((k, worst));
    }

    Ok(DiracVerifyReport {
        variant: dirac.variant,
        p: dirac.p,
        q: dirac.q,
        isotropy,
        summation_by_parts: sbp,
        fault_injected: fault_inject,
    })
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug)]
pub struct SimulateSummary {
    pub steps: usize,
    pub final_h: f64,
    /// For lossless dynamics: worst |H(t) - H(0) - ∫P|. For resistive
    /// dynamics the balance is an inequality, so this is the worst positive
    /// excess of dH over ∫P instead.
    pub max_energy_balance_residual: f64,
    pub dissipative: bool,
    pub max_error: Option<f64>,
    pub argmax_point: Option<f64>,
    pub stability_warning: Option<String>,
}

impl std::fmt::Display for SimulateSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "steps: {}", self.steps)?;
        writeln!(f, "final H: {:.12e}", self.final_h)?;
        let label = if self.dissipative {
            "max dissipation-inequality violation"
        } else {
            "max |energy-balance residual|"
        };
        writeln!(f, "{label}: {:.3e}", self.max_energy_balance_residual)?;
        if let Some(err) = self.max_error {
            writeln!(
                f,
                "max |error vs exact|: {:.6e} at z = {:.6}",
                err,
                self.argmax_point.unwrap_or(f64::NAN)
            )?;
        }
        if let Some(w) = &self.stability_warning {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let state_dim = traj.states.first().map_or(0, |x| x.len());
    let out_dim = traj.outputs.first().map_or(0, |y| y.len());
    let mut head = vec!["t".to_string(), "H".to_string(), "P_boundary".to_string()];
    head.extend((0..state_dim).map(|i| format!("x{i}")));
    head.extend((0..out_dim).map(|i| format!("y{i}")));
    let mut out = head.join(",");
    out.push('\n');
    for k in 0..traj.len() {
        let mut row = vec![
            format!("{:.17e}", traj.times[k]),
            format!("{:.17e}", traj.hamiltonian[k]),
            format!("{:.17e}", traj.boundary_power[k]),
        ];
        row.extend(traj.states[k].iter().map(|v| format!("{v:.17e}")));
        row.extend(traj.outputs[k].iter().map(|v| format!("{v:.17e}")));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Run the scenario and write trajectory CSV plus a summary; when the
/// scenario names an exact reference, also write the voltage field and the
/// pointwise error series.
pub fn run_simulate(
    scenario: &Scenario,
    out_dir: &Path,
    dt_override: Option<f64>,
    t_final_override: Option<f64>,
) -> Result<SimulateSummary, CliError> {
    let instance = scenario.instantiate()?;
    let dt = dt_override.unwrap_or(scenario.time.dt);
    let t_final = t_final_override.unwrap_or(scenario.time.t_final);
    let traj = simulate(
        &instance.model,
        &instance.port,
        dt,
        t_final,
        Some(instance.initial.clone()),
    )?;
    write_text(&out_dir.join("trajectory.csv"), &trajectory_csv(&traj))?;

    let dissipative = !instance.model.is_lossless();
    let residual = if dissipative {
        // worst violation of dH <= ∫P per step; zero up to roundoff
        let mut worst: f64 = 0.0;
        for k in 1..traj.len() {
            let dh = traj.hamiltonian[k] - traj.hamiltonian[k - 1];
            let de = traj.energy_inflow[k] - traj.energy_inflow[k - 1];
            worst = worst.max(dh - de);
        }
        worst.max(0.0)
    } else {
        traj.energy_balance_residuals().1
    };
    let mut summary = SimulateSummary {
        steps: traj.len() - 1,
        final_h: *traj.hamiltonian.last().expect("nonempty"),
        max_energy_balance_residual: residual,
        dissipative,
        max_error: None,
        argmax_point: None,
        stability_warning: traj.stability_warning.clone(),
    };

    if let Some(ReferenceSpec::TelegraphSine) = &scenario.reference {
        let points = telegraph_sample_points(&instance.complex);
        let values = telegraph_voltage_series(&instance.model, &traj);
        let exact = |t: f64, z: f64| exact_telegraph(&f64::sin, t, z).unwrap_or(0.0);
        let report = error_report(&traj.times, &points, &values, &exact);

        let mut field = String::from("t");
        for z in &points {
            field.push_str(&format!(",V(z={z:.6})"));
        }
        field.push('\n');
        for (k, t) in traj.times.iter().enumerate() {
            field.push_str(&format!("{t:.17e}"));
            for v in &values[k] {
                field.push_str(&format!(",{v:.17e}"));
            }
            field.push('\n');
        }
        write_text(&out_dir.join("voltage_field.csv"), &field)?;

        let mut err_csv = String::from("t");
        for z in &points {
            err_csv.push_str(&format!(",err(z={z:.6})"));
        }
        err_csv.push('\n');
        for (k, t) in traj.times.iter().enumerate() {
            err_csv.push_str(&format!("{t:.17e}"));
            for e in &report.errors[k] {
                err_csv.push_str(&format!(",{e:.17e}"));
            }
            err_csv.push('\n');
        }
        write_text(&out_dir.join("error_field.csv"), &err_csv)?;

        // error trace at the far end, where the load sits
        let far = points.len() - 1;
        let mut endpoint = String::from("t,error\n");
        for (k, t) in traj.times.iter().enumerate() {
            endpoint.push_str(&format!("{t:.17e},{:.17e}\n", report.errors[k][far]));
        }
        write_text(&out_dir.join("error_at_endpoint.csv"), &endpoint)?;

        summary.max_error = Some(report.max_error);
        summary.argmax_point = Some(report.argmax_point);
    }

    write_text(&out_dir.join("summary.txt"), &summary.to_string())?;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// converge

/// Run the scenario's benchmark across mesh sizes and fit the order.
pub fn run_converge(
    scenario: &Scenario,
    n_list: &[usize],
    out_dir: &Path,
    dt_override: Option<f64>,
) -> Result<ConvergenceStudy, CliError> {
    if scenario.reference.is_none() {
        return Err(CliError::Invalid(
            "convergence study needs a scenario with an exact reference".into(),
        ));
    }
    let dt = dt_override.unwrap_or(scenario.time.dt);
    let t_final = scenario.time.t_final;
    let (a, b) = match scenario.mesh {
        MeshSpec::UniformInterval { a, b, .. } => (a, b),
        _ => {
            return Err(CliError::Invalid(
                "convergence sweeps need the uniform_interval mesh generator".into(),
            ))
        }
    };
    let study = convergence_study(
        n_list,
        |n| (b - a) / n as f64,
        |n| {
            let s = scenario
                .with_n_cells(n)
                .expect("mesh kind checked above");
            let instance = s.instantiate().map_err(|e| {
                SimError::Model(ModelError::Mesh(MeshError::NonManifold(e.to_string())))
            })?;
            let traj = simulate(&instance.model, &instance.port, dt, t_final, None)?;
            let points = telegraph_sample_points(&instance.complex);
            let values = telegraph_voltage_series(&instance.model, &traj);
            let exact = |t: f64, z: f64| exact_telegraph(&f64::sin, t, z).unwrap_or(0.0);
            let report = error_report(&traj.times, &points, &values, &exact);
            Ok(report.max_error)
        },
    )?;

    let mut csv = String::from("n,h,max_error,ratio\n");
    for (i, row) in study.rows.iter().enumerate() {
        let ratio = if i == 0 {
            String::new()
        } else {
            format!("{:.6}", study.ratios[i - 1])
        };
        csv.push_str(&format!(
            "{},{:.17e},{:.17e},{ratio}\n",
            row.n, row.h, row.max_error
        ));
    }
    write_text(&out_dir.join("convergence.csv"), &csv)?;
    write_text(
        &out_dir.join("convergence_summary.txt"),
        &format!("slope={:.6}\n", study.slope),
    )?;
    Ok(study)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("portdec-cli-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn mesh_file_roundtrip() {
        let complex = crate::complex::pentagon(1.0);
        let path = write_temp("pentagon_roundtrip.json", "");
        write_mesh_file(&complex, &path).unwrap();
        let loaded = read_mesh_file(&path).unwrap();
        assert_eq!(complex, loaded);
    }

    #[test]
    fn malformed_mesh_reports_location() {
        let path = write_temp("broken.json", "{ \"dim\": 1, \"vertices\": [[0.0], oops");
        let err = read_mesh_file(&path).unwrap_err();
        match err {
            CliError::Parse { message, .. } => assert!(message.contains("line")),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert_eq!(
            CliError::Parse {
                path: PathBuf::new(),
                message: String::new()
            }
            .exit_code(),
            2
        );
    }

    #[test]
    fn scenario_parses_and_instantiates() {
        let toml_text = r#"
            [mesh]
            kind = "uniform_interval"
            a = 0.0
            b = 1.7182818284590455
            n_cells = 10

            [model]
            kind = "telegraph"
            capacitance = { preset = "paper_line" }
            inductance = { preset = "paper_line" }

            [boundary]
            signals = [
                { kind = "sine", amplitude = 1.0, omega = 1.0 },
                { kind = "load", resistance = 1.0 },
            ]

            [time]
            dt = 0.01
            t_final = 1.0
        "#;
        let path = write_temp("telegraph.toml", toml_text);
        let scenario = Scenario::load(&path).unwrap();
        let instance = scenario.instantiate().unwrap();
        assert_eq!(instance.model.port_count(), 2);
        assert_eq!(instance.model.state_dim(), 21);
    }

    #[test]
    fn simulate_writes_deterministic_outputs() {
        let toml_text = r#"
            [mesh]
            kind = "uniform_interval"
            a = 0.0
            b = 1.7182818284590455
            n_cells = 5

            [model]
            kind = "telegraph"
            capacitance = { preset = "paper_line" }
            inductance = { preset = "paper_line" }

            [boundary]
            signals = [
                { kind = "sine", amplitude = 1.0, omega = 1.0 },
                { kind = "load", resistance = 1.0 },
            ]

            [time]
            dt = 0.01
            t_final = 0.5

            [reference]
            exact = "telegraph_sine"
        "#;
        let path = write_temp("sim.toml", toml_text);
        let scenario = Scenario::load(&path).unwrap();
        let out1 = std::env::temp_dir().join("portdec-cli-tests/out1");
        let out2 = std::env::temp_dir().join("portdec-cli-tests/out2");
        run_simulate(&scenario, &out1, None, None).unwrap();
        run_simulate(&scenario, &out2, None, None).unwrap();
        for file in ["trajectory.csv", "voltage_field.csv", "summary.txt"] {
            let a = std::fs::read(out1.join(file)).unwrap();
            let b = std::fs::read(out2.join(file)).unwrap();
            assert_eq!(a, b, "{file} must be byte-identical across runs");
        }
    }

    #[test]
    fn dirac_verify_passes_and_fault_fails() {
        let toml_text = r#"
            [mesh]
            kind = "uniform_interval"
            a = 0.0
            b = 1.7182818284590455
            n_cells = 10

            [model]
            kind = "telegraph"
            capacitance = { preset = "constant", value = 1.0 }
            inductance = { preset = "constant", value = 1.0 }

            [time]
            dt = 0.01
            t_final = 1.0
        "#;
        let path = write_temp("verify.toml", toml_text);
        let scenario = Scenario::load(&path).unwrap();
        let good = run_dirac_verify(&scenario, false).unwrap();
        assert!(good.pass(), "{good}");
        let bad = run_dirac_verify(&scenario, true).unwrap();
        assert!(!bad.pass(), "{bad}");
    }

    #[test]
    fn unknown_scenario_fields_rejected() {
        let toml_text = r#"
            [mesh]
            kind = "uniform_interval"
            a = 0.0
            b = 1.0
            n_cells = 5
            bogus = 3

            [model]
            kind = "wave2d"

            [time]
            dt = 0.01
            t_final = 1.0
        "#;
        let path = write_temp("bad.toml", toml_text);
        assert!(matches!(
            Scenario::load(&path),
            Err(CliError::Parse { .. })
        ));
    }
}
