use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use svp_core::analytic::{classify, constraints_for};
use svp_core::bench::{
    compare_csv_rows, compare_experiment, table1_experiment, write_csv, write_json,
    ExperimentConfig,
};
use svp_core::constraints::ConstraintsMatrix;
use svp_core::hamiltonian::reduce_gram;
use svp_core::hnf::kernel_basis;
use svp_core::lattice::{sample_generator, StructuredBasis, SymmetryKind};
use svp_core::oracle::kernel_stats;
use svp_core::spectral::{eigenvalues, fourier_basis};
use svp_core::vqe::{run_vqe_with_penalty, AnsatzSpec, OptimizerConfig, DEFAULT_BUDGET};

const EXIT_OTHER: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "svp", version, about = "Symmetry-reduced short-vector search on cyclic and nega-cyclic lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a lattice and print its Gram matrix and spectrum.
    Gen(LatticeArgs),
    /// Print integer kernel bases of a mode operator.
    Kernel {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Mode index; defaults to the principal index of the lattice.
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, value_enum, default_value_t = KernelMethod::Analytic)]
        method: KernelMethod,
    },
    /// Print reduced Gram matrices AᵀGA for the kernel bases.
    Reduce {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, value_enum, default_value_t = KernelMethod::Analytic)]
        method: KernelMethod,
    },
    /// Exhaustive shortest vector in the coefficient box, with kernel statistics.
    Oracle {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Bits per coefficient; the box is [-2^(K-1), 2^(K-1)-1].
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// One variational run, full or reduced to the principal kernel.
    Vqe {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_enum, default_value_t = VqeMethod::Reduced)]
        method: VqeMethod,
        #[command(flatten)]
        opt: OptimizerArgs,
        /// Energy of the all-zero state; defaults to G₀₀.
        #[arg(long, allow_hyphen_values = true)]
        penalty: Option<f64>,
    },
    /// Kernel statistics over seeded random lattices.
    Table1 {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Full versus reduced variational runs over seeded random lattices.
    Compare {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long, default_value = "nega")]
    kind: SymmetryKind,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit comma-separated generator; overrides --n and --seed.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    generator: Option<Vec<f64>>,
}

impl LatticeArgs {
    fn basis(&self) -> svp_core::Result<StructuredBasis> {
        let generator = match &self.generator {
            Some(g) => g.clone(),
            None => sample_generator(self.kind, self.seed, self.n)?,
        };
        StructuredBasis::new(self.kind, generator)
    }
}

#[derive(Args)]
struct OptimizerArgs {
    /// Optimizer iterations.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Pick the output state from this many seeded measurements instead of
    /// the most probable basis state.
    #[arg(long)]
    shots: Option<usize>,
}

impl OptimizerArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            shots: self.shots,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value = "nega")]
    kind: SymmetryKind,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV path for per-lattice records; the summary goes next to it as .json.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig::new(self.kind, self.n, self.k, self.count, self.seed)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelMethod {
    Analytic,
    Hnf,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VqeMethod {
    Full,
    Reduced,
}

fn principal_of(basis: &StructuredBasis) -> svp_core::Result<usize> {
    let fourier = fourier_basis(basis.kind(), basis.dim())?;
    Ok(eigenvalues(&basis.gram(), &fourier)?.principal)
}

fn matrices(
    kind: SymmetryKind,
    n: usize,
    q: usize,
    method: KernelMethod,
) -> svp_core::Result<Vec<ConstraintsMatrix>> {
    let mut out = Vec::new();
    if method != KernelMethod::Hnf {
        out.extend(constraints_for(kind, n, q)?);
    }
    if method != KernelMethod::Analytic {
        out.push(kernel_basis(kind, n, q)?);
    }
    Ok(out)
}

fn matrix_json(a: &ConstraintsMatrix) -> Value {
    json!({
        "origin": a.origin,
        "operator_index": a.operator_index,
        "prime": a.prime,
        "rows": a.rows(),
        "cols": a.cols(),
        "entries": a.to_rows(),
    })
}

fn print(value: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen(lattice) => {
            let basis = lattice.basis()?;
            let fourier = fourier_basis(basis.kind(), basis.dim())?;
            let gram = basis.gram();
            let spectrum = eigenvalues(&gram, &fourier)?;
            print(&json!({
                "kind": basis.kind(),
                "n": basis.dim(),
                "seed": lattice.generator.is_none().then_some(lattice.seed),
                "generator": basis.generator(),
                "gram": gram.to_rows(),
                "eigenvalues": spectrum.eigenvalues,
                "principal": spectrum.principal,
            }))
        }
        Command::Kernel { lattice, q, method } => {
            let q = match q {
                Some(q) => q,
                None => principal_of(&lattice.basis()?)?,
            };
            let n = lattice.generator.as_ref().map_or(lattice.n, Vec::len);
            let label = classify(lattice.kind, n, q)?;
            let list = matrices(lattice.kind, n, q, method)?;
            print(&json!({
                "kind": lattice.kind,
                "n": n,
                "q": q,
                "case": label,
                "matrices": list.iter().map(matrix_json).collect::<Vec<_>>(),
            }))
        }
        Command::Reduce { lattice, q, method } => {
            let basis = lattice.basis()?;
            let q = match q {
                Some(q) => q,
                None => principal_of(&basis)?,
            };
            let gram = basis.gram();
            let mut forms = Vec::new();
            for a in matrices(basis.kind(), basis.dim(), q, method)? {
                let reduced = reduce_gram(&gram, &a)?;
                forms.push(json!({
                    "constraints": matrix_json(&a),
                    "reduced_gram": reduced.form.to_rows(),
                }));
            }
            print(&json!({ "q": q, "forms": forms }))
        }
        Command::Oracle { lattice, k } => {
            let basis = lattice.basis()?;
            let fourier = fourier_basis(basis.kind(), basis.dim())?;
            let gram = basis.gram();
            let spectrum = eigenvalues(&gram, &fourier)?;
            let stats = kernel_stats(&gram, &fourier, &spectrum, k)?;
            print(&serde_json::to_value(stats)?)
        }
        Command::Vqe {
            lattice,
            k,
            method,
            opt,
            penalty,
        } => {
            let basis = lattice.basis()?;
            let gram = basis.gram();
            let penalty = penalty.unwrap_or(gram.get(0, 0));
            let config = opt.config();
            let runs = match method {
                VqeMethod::Full => vec![(
                    None,
                    run_vqe_with_penalty(&gram, None, k, lattice.seed, opt.budget, &config, penalty)?,
                )],
                VqeMethod::Reduced => {
                    let q = principal_of(&basis)?;
                    let mut runs = Vec::new();
                    for a in constraints_for(basis.kind(), basis.dim(), q)? {
                        let r = run_vqe_with_penalty(
                            &gram,
                            Some(&a),
                            k,
                            lattice.seed,
                            opt.budget,
                            &config,
                            penalty,
                        )?;
                        runs.push((Some(a), r));
                    }
                    if runs.is_empty() {
                        return Err(svp_core::Error::EmptyKernel.into());
                    }
                    runs
                }
            };
            let (a, best) = runs
                .into_iter()
                .reduce(|x, y| if y.1.energy < x.1.energy { y } else { x })
                .expect("non-empty");
            let depth = AnsatzSpec::new(best.qubits_used, AnsatzSpec::DEFAULT_LAYERS)?.circuit_depth();
            print(&json!({
                "constraints": a.as_ref().map(matrix_json),
                "circuit_depth": depth,
                "result": best,
            }))
        }
        Command::Table1 { exp } => {
            let out = table1_experiment(&exp.config())?;
            if let Some(path) = &exp.output {
                write_csv(path, &out.records)
                    .with_context(|| format!("writing {}", path.display()))?;
                write_json(&summary_path(path), &out.summary)?;
            }
            print(&serde_json::to_value(&out.summary)?)
        }
        Command::Compare { exp, opt } => {
            let mut cfg = exp.config();
            cfg.budget = opt.budget;
            cfg.optimizer = opt.config();
            let out = compare_experiment(&cfg)?;
            if let Some(path) = &exp.output {
                write_csv(path, &compare_csv_rows(&out.records))
                    .with_context(|| format!("writing {}", path.display()))?;
                write_json(&summary_path(path), &out.summary)?;
            }
            print(&serde_json::to_value(&out.summary)?)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<svp_core::Error>() {
        Some(svp_core::Error::InvalidArgument(_)) => EXIT_INVALID,
        Some(svp_core::Error::ResourceLimit { .. }) => EXIT_RESOURCE,
        _ => EXIT_OTHER,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
