//! Command implementations and the exit-code contract:
//! 0 = verdict-positive / success, 1 = verdict-negative, 2 = operational
//! error (unreadable input, invalid density matrix, bad arguments).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qdiscord_core::criterion::{
    extend_with_ancilla, pointer_basis, verify_pointer, zero_discord_verdict, DiscordVerdict,
    DEFAULT_CRITERION_TOL,
};
use qdiscord_core::density::DEFAULT_VALIDATION_TOL;
use qdiscord_core::discord::{
    discord_for_basis, disturbance_min, minimize_discord_qubit, xstate_discord_closed_form,
    QubitProjectorParams,
};
use qdiscord_core::states::{
    bell_state, photon_pair_state, pointer_state, product_state, random_density, random_unitary,
    xstate, PointerCoefficients,
};
use qdiscord_core::BipartiteDensityMatrix;

use crate::format::MatrixFile;

pub const EXIT_POSITIVE: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qdiscord",
    version,
    about = "Decide zero vs. nonzero quantum discord for bipartite density matrices via the block normality-and-commutation criterion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a state file from one of the built-in families.
    Gen(GenArgs),
    /// Run the three-step zero-discord test on a state file.
    Check(CheckArgs),
    /// Extract the non-disturbing measurement basis of a zero-discord state.
    Pointer(PointerArgs),
    /// Compute quantum discord (closed form, grid minimization, or a fixed basis).
    Discord(DiscordArgs),
    /// Sweep the X-state family and emit a plot-ready CSV.
    Sweep(SweepArgs),
    /// Re-run the criterion after attaching an ancilla to the apparatus side.
    Ancilla(AncillaArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: GenFamily,
}

#[derive(Debug, Args)]
pub struct GenIo {
    /// Output path for the state file.
    #[arg(long)]
    pub out: PathBuf,
    /// Emit machine-readable key=value lines.
    #[arg(long)]
    pub machine: bool,
}

#[derive(Debug, Subcommand)]
pub enum GenFamily {
    /// Two-qubit X-state with parameter x in [0, 0.5].
    Xstate {
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        io: GenIo,
    },
    /// Photon-pair mixture at pump angle theta (radians); equals the
    /// X-state at x = 0.5 cos^2(theta).
    Photon {
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        io: GenIo,
    },
    /// Seeded random zero-discord pointer state.
    Pointer {
        #[arg(long, default_value_t = 2)]
        dim_a: usize,
        #[arg(long, default_value_t = 2)]
        dim_b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: GenIo,
    },
    /// Seeded random product state rho_A (x) rho_B.
    Product {
        #[arg(long, default_value_t = 2)]
        dim_a: usize,
        #[arg(long, default_value_t = 2)]
        dim_b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: GenIo,
    },
    /// Seeded random density matrix of the given rank (full by default).
    Random {
        #[arg(long, default_value_t = 2)]
        dim_a: usize,
        #[arg(long, default_value_t = 2)]
        dim_b: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        io: GenIo,
    },
    /// The maximally entangled two-qubit Bell state.
    Bell {
        #[command(flatten)]
        io: GenIo,
    },
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    /// Relative defect threshold for the criterion.
    #[arg(long, default_value_t = DEFAULT_CRITERION_TOL)]
    pub tol: f64,
    /// Density-matrix validation tolerance.
    #[arg(long = "val-tol", default_value_t = DEFAULT_VALIDATION_TOL)]
    pub val_tol: f64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Theta resolution of the coarse scan.
    #[arg(long = "grid-theta", default_value_t = 64)]
    pub grid_theta: usize,
    /// Phi resolution of the coarse scan.
    #[arg(long = "grid-phi", default_value_t = 128)]
    pub grid_phi: usize,
    /// Maximum number of refinement step halvings.
    #[arg(long, default_value_t = 40)]
    pub refine: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// State file to test.
    pub input: PathBuf,
    #[command(flatten)]
    pub tols: ToleranceArgs,
    /// Emit machine-readable key=value lines.
    #[arg(long)]
    pub machine: bool,
    /// Also write the report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointerArgs {
    /// State file; must have zero discord at the configured tolerance.
    pub input: PathBuf,
    #[command(flatten)]
    pub tols: ToleranceArgs,
    #[arg(long)]
    pub machine: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiscordMethod {
    /// Closed form; requires X-state metadata in the file.
    Closed,
    /// Grid minimization over qubit projector bases.
    Grid,
    /// A single basis fixed by --theta / --phi.
    Basis,
}

#[derive(Debug, Args)]
pub struct DiscordArgs {
    /// State file.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: DiscordMethod,
    /// Bloch polar angle for --method basis.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Bloch azimuthal angle for --method basis.
    #[arg(long)]
    pub phi: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub tols: ToleranceArgs,
    #[arg(long)]
    pub machine: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Number of x samples over [0, 0.5] (at least 3).
    #[arg(long)]
    pub points: usize,
    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub tols: ToleranceArgs,
    #[arg(long)]
    pub machine: bool,
}

#[derive(Debug, Args)]
pub struct AncillaArgs {
    /// State file.
    pub input: PathBuf,
    /// Dimension of the ancilla attached to the apparatus side.
    #[arg(long = "ancilla-dim")]
    pub ancilla_dim: usize,
    /// Rank of the random ancilla (full by default).
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tols: ToleranceArgs,
    #[arg(long)]
    pub machine: bool,
}

/// Collects report lines in either human or machine form and emits them to
/// stdout plus an optional file.
struct Report {
    machine: bool,
    lines: Vec<String>,
}

impl Report {
    fn new(machine: bool) -> Self {
        Self {
            machine,
            lines: Vec::new(),
        }
    }

    fn kv(&mut self, key: &str, value: impl Display) {
        if self.machine {
            self.lines.push(format!("{key}={value}"));
        }
    }

    fn text(&mut self, line: impl Display) {
        if !self.machine {
            self.lines.push(line.to_string());
        }
    }

    fn emit(&self, out: Option<&Path>) -> anyhow::Result<()> {
        let body = self.lines.join("\n");
        println!("{body}");
        if let Some(path) = out {
            fs::write(path, format!("{body}\n"))
                .with_context(|| format!("cannot write report to {}", path.display()))?;
        }
        Ok(())
    }
}

fn sci(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_complex(z: qdiscord_core::Complex64) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

fn fmt_matrix_human(m: &qdiscord_core::ComplexMatrix, indent: &str) -> String {
    (0..m.rows())
        .map(|r| {
            let row = (0..m.cols())
                .map(|c| fmt_complex(m.get(r, c)))
                .collect::<Vec<_>>()
                .join("  ");
            format!("{indent}[ {row} ]")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn kv_matrix(report: &mut Report, name: &str, m: &qdiscord_core::ComplexMatrix) {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m.get(r, c);
            report.kv(
                &format!("{name}[{r}][{c}]"),
                format!("{:.16e} {:.16e}", z.re, z.im),
            );
        }
    }
}

fn load_state(path: &Path, val_tol: f64) -> anyhow::Result<(MatrixFile, BipartiteDensityMatrix)> {
    let file = MatrixFile::load(path)?;
    let rho = file
        .validate(val_tol)
        .with_context(|| format!("{} is not a valid density matrix", path.display()))?;
    Ok((file, rho))
}

fn worst_pair_label(verdict: &DiscordVerdict) -> String {
    match verdict.worst_pair {
        Some(((a, b), (c, d))) => format!("({a},{b})x({c},{d})"),
        None => "none".to_string(),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Check(args) => cmd_check(args),
        Command::Pointer(args) => cmd_pointer(args),
        Command::Discord(args) => cmd_discord(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Ancilla(args) => cmd_ancilla(args),
    }
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<u8> {
    let mut metadata = BTreeMap::new();
    let (rho, io, summary) = match args.family {
        GenFamily::Xstate { x, io } => {
            let rho = xstate(x)?;
            metadata.insert("family".into(), "xstate".into());
            metadata.insert("x".into(), format!("{x}"));
            (rho, io, format!("xstate (x = {x})"))
        }
        GenFamily::Photon { theta, io } => {
            let rho = photon_pair_state(theta);
            metadata.insert("family".into(), "photon".into());
            metadata.insert("theta".into(), format!("{theta}"));
            metadata.insert("x".into(), format!("{}", 0.5 * theta.cos().powi(2)));
            (rho, io, format!("photon pair (theta = {theta})"))
        }
        GenFamily::Pointer {
            dim_a,
            dim_b,
            seed,
            io,
        } => {
            let c = PointerCoefficients::random(dim_a, dim_b, seed);
            let v = random_unitary(dim_b, seed.wrapping_add(1));
            let rho = pointer_state(&c, &v)?;
            metadata.insert("family".into(), "pointer".into());
            metadata.insert("seed".into(), format!("{seed}"));
            (
                rho,
                io,
                format!("pointer state ({dim_a}x{dim_b}, seed {seed})"),
            )
        }
        GenFamily::Product {
            dim_a,
            dim_b,
            seed,
            io,
        } => {
            let ra = random_density(dim_a, dim_a, seed)?;
            let rb = random_density(dim_b, dim_b, seed.wrapping_add(1))?;
            let rho = product_state(&ra, &rb)?;
            metadata.insert("family".into(), "product".into());
            metadata.insert("seed".into(), format!("{seed}"));
            (
                rho,
                io,
                format!("product state ({dim_a}x{dim_b}, seed {seed})"),
            )
        }
        GenFamily::Random {
            dim_a,
            dim_b,
            rank,
            seed,
            io,
        } => {
            let dim = dim_a * dim_b;
            let rank = rank.unwrap_or(dim);
            let m = random_density(dim, rank, seed)?;
            let rho = BipartiteDensityMatrix::validate(m, dim_a, dim_b, DEFAULT_VALIDATION_TOL)?;
            metadata.insert("family".into(), "random".into());
            metadata.insert("seed".into(), format!("{seed}"));
            metadata.insert("rank".into(), format!("{rank}"));
            (
                rho,
                io,
                format!("random state ({dim_a}x{dim_b}, rank {rank}, seed {seed})"),
            )
        }
        GenFamily::Bell { io } => {
            let rho = bell_state();
            metadata.insert("family".into(), "bell".into());
            (rho, io, "Bell state".to_string())
        }
    };
    metadata.insert("dim_a".into(), format!("{}", rho.dim_a()));
    metadata.insert("dim_b".into(), format!("{}", rho.dim_b()));

    let file = MatrixFile::from_state(&rho, metadata);
    file.save(&io.out)?;

    let mut report = Report::new(io.machine);
    report.kv("family", file.metadata.get("family").unwrap());
    report.kv("dims", format!("{}x{}", rho.dim_a(), rho.dim_b()));
    report.kv("out", io.out.display());
    report.text(format!("wrote {summary} to {}", io.out.display()));
    report.emit(None)?;
    Ok(EXIT_POSITIVE)
}

fn cmd_check(args: CheckArgs) -> anyhow::Result<u8> {
    let (_, rho) = load_state(&args.input, args.tols.val_tol)?;
    let verdict = zero_discord_verdict(&rho, args.tols.tol);
    let (n, m) = (rho.dim_a(), rho.dim_b());

    let mut report = Report::new(args.machine);
    let normal_ok = verdict.max_normality_defect <= verdict.tolerance_used;
    let commute_ok = verdict.max_commutation_defect <= verdict.tolerance_used;

    report.kv("file", args.input.display());
    report.kv("dims", format!("{n}x{m}"));
    report.kv("tolerance", sci(verdict.tolerance_used));
    report.kv("step1_blocks", n * n);
    report.kv("step2_normality_defect", sci(verdict.max_normality_defect));
    report.kv("step2_pass", normal_ok);
    report.kv(
        "step3_commutation_defect",
        sci(verdict.max_commutation_defect),
    );
    report.kv("step3_pass", commute_ok);
    report.kv(
        "adjoint_commutation_defect",
        sci(verdict.adjoint_commutation_defect),
    );
    report.kv("worst_pair", worst_pair_label(&verdict));
    report.kv("is_zero", verdict.is_zero);

    report.text(format!(
        "zero-discord check: {} ({n} x {m} state, tolerance {:.1e})",
        args.input.display(),
        verdict.tolerance_used
    ));
    report.text(format!(
        "  step 1: partitioned into {} blocks of size {m}x{m}",
        n * n
    ));
    report.text(format!(
        "  step 2: normality    max defect {}  {}",
        sci(verdict.max_normality_defect),
        if normal_ok { "PASS" } else { "FAIL" }
    ));
    report.text(format!(
        "  step 3: commutation  max defect {}  {}",
        sci(verdict.max_commutation_defect),
        if commute_ok { "PASS" } else { "FAIL" }
    ));
    if !verdict.is_zero {
        report.text(format!(
            "  worst block pair: {}",
            worst_pair_label(&verdict)
        ));
    }
    report.text(format!(
        "verdict: {} quantum discord",
        if verdict.is_zero { "ZERO" } else { "NONZERO" }
    ));
    report.emit(args.out.as_deref())?;
    Ok(if verdict.is_zero {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_pointer(args: PointerArgs) -> anyhow::Result<u8> {
    let (_, rho) = load_state(&args.input, args.tols.val_tol)?;
    let verdict = zero_discord_verdict(&rho, args.tols.tol);
    let mut report = Report::new(args.machine);
    report.kv("file", args.input.display());
    report.kv("is_zero", verdict.is_zero);

    if !verdict.is_zero {
        report.kv("worst_pair", worst_pair_label(&verdict));
        report.kv("normality_defect", sci(verdict.max_normality_defect));
        report.kv("commutation_defect", sci(verdict.max_commutation_defect));
        report.text(format!(
            "state has NONZERO discord (worst block pair {}, commutation defect {}); no pointer basis exists",
            worst_pair_label(&verdict),
            sci(verdict.max_commutation_defect),
        ));
        report.emit(args.out.as_deref())?;
        return Ok(EXIT_NEGATIVE);
    }

    let pb = pointer_basis(&rho, args.tols.tol)?;
    let residual = verify_pointer(&rho, &pb);
    let (n, m) = (rho.dim_a(), rho.dim_b());

    kv_matrix(&mut report, "U", &pb.unitary);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                let c = pb.coefficients.get(i, j, k);
                report.kv(
                    &format!("C[{}][{}][{}]", i + 1, j + 1, k + 1),
                    format!("{:.16e} {:.16e}", c.re, c.im),
                );
            }
        }
    }
    report.kv("residual", sci(residual));
    report.kv("rho_b_offdiag", sci(pb.rho_b_offdiag));

    report.text(format!("pointer basis of {}", args.input.display()));
    report.text("unitary U (columns are the non-disturbing projectors |k'_B>):");
    report.text(fmt_matrix_human(&pb.unitary, "  "));
    for k in 0..m {
        let ket = pb.unitary.column(k);
        let parts = ket
            .iter()
            .map(|z| fmt_complex(*z))
            .collect::<Vec<_>>()
            .join(", ");
        report.text(format!("  |{}'_B> = ({parts})", k + 1));
    }
    report.text("coefficients C[i][j][k] (diagonal of U' rho^(i j) U):");
    for i in 0..n {
        for j in 0..n {
            let row = (0..m)
                .map(|k| fmt_complex(pb.coefficients.get(i, j, k)))
                .collect::<Vec<_>>()
                .join("  ");
            report.text(format!("  ({},{}): {row}", i + 1, j + 1));
        }
    }
    report.text(format!("reconstruction residual: {}", sci(residual)));
    report.text(format!(
        "reduced state off-diagonal in pointer basis: {}",
        sci(pb.rho_b_offdiag)
    ));
    report.emit(args.out.as_deref())?;

    if residual > args.tols.tol {
        bail!("pointer reconstruction residual {residual:.3e} exceeds tolerance");
    }
    Ok(EXIT_POSITIVE)
}

fn cmd_discord(args: DiscordArgs) -> anyhow::Result<u8> {
    let (file, rho) = load_state(&args.input, args.tols.val_tol)?;
    let mut report = Report::new(args.machine);
    report.kv("file", args.input.display());

    match args.method {
        DiscordMethod::Closed => {
            let family = file.metadata.get("family").map(String::as_str);
            if !matches!(family, Some("xstate") | Some("photon")) {
                bail!(
                    "--method closed needs a file generated from the xstate family (found {:?})",
                    family.unwrap_or("no metadata")
                );
            }
            let x: f64 = file
                .metadata
                .get("x")
                .context("metadata lacks the x parameter")?
                .parse()
                .context("cannot parse metadata x")?;
            let value = xstate_discord_closed_form(x)?;
            report.kv("method", "closed");
            report.kv("x", x);
            report.kv("discord", sci(value));
            report.text(format!("closed-form discord at x = {x}: {}", sci(value)));
        }
        DiscordMethod::Grid => {
            let est = minimize_discord_qubit(
                &rho,
                (args.grid.grid_theta, args.grid.grid_phi),
                args.grid.refine,
            )?;
            report.kv("method", "grid");
            report.kv("discord", sci(est.value));
            report.kv("argmin_theta", sci(est.argmin.theta));
            report.kv("argmin_phi", sci(est.argmin.phi));
            report.kv("refinement_iterations", est.refinement_iterations);
            report.text(format!(
                "minimal discord over qubit projectors: {}",
                sci(est.value)
            ));
            report.text(format!(
                "argmin: theta = {}, phi = {} ({} refinement halvings)",
                sci(est.argmin.theta),
                sci(est.argmin.phi),
                est.refinement_iterations
            ));
        }
        DiscordMethod::Basis => {
            let theta = args.theta.context("--method basis needs --theta")?;
            let phi = args.phi.context("--method basis needs --phi")?;
            if rho.dim_b() != 2 {
                bail!(
                    "--method basis needs a qubit apparatus (dim_b = {})",
                    rho.dim_b()
                );
            }
            let value = discord_for_basis(&rho, &QubitProjectorParams::new(theta, phi).basis());
            report.kv("method", "basis");
            report.kv("theta", sci(theta));
            report.kv("phi", sci(phi));
            report.kv("discord", sci(value));
            report.text(format!(
                "discord for basis (theta = {theta}, phi = {phi}): {}",
                sci(value)
            ));
        }
    }
    report.emit(None)?;
    Ok(EXIT_POSITIVE)
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<u8> {
    if args.points < 3 {
        bail!("--points must be at least 3, got {}", args.points);
    }
    let grid = (args.grid.grid_theta, args.grid.grid_phi);
    let mut csv = String::from(
        "x,closed_form_discord,grid_discord,criterion_is_zero,normality_defect,commutation_defect,disturbance_min\n",
    );
    let mut zero_rows = 0usize;
    for i in 0..args.points {
        let x = 0.5 * i as f64 / (args.points - 1) as f64;
        let rho = xstate(x)?;
        let closed = xstate_discord_closed_form(x)?;
        let est = minimize_discord_qubit(&rho, grid, args.grid.refine)?;
        let verdict = zero_discord_verdict(&rho, args.tols.tol);
        let disturbance = disturbance_min(&rho, grid, args.grid.refine)?;
        if verdict.is_zero {
            zero_rows += 1;
        }
        csv.push_str(&format!(
            "{:.15e},{:.15e},{:.15e},{},{:.15e},{:.15e},{:.15e}\n",
            x,
            closed,
            est.value,
            verdict.is_zero,
            verdict.max_normality_defect,
            verdict.max_commutation_defect,
            disturbance
        ));
    }
    fs::write(&args.out, &csv)
        .with_context(|| format!("cannot write CSV to {}", args.out.display()))?;

    let mut report = Report::new(args.machine);
    report.kv("rows", args.points);
    report.kv("zero_rows", zero_rows);
    report.kv("out", args.out.display());
    report.text(format!(
        "swept {} X-states; {} with zero discord; CSV written to {}",
        args.points,
        zero_rows,
        args.out.display()
    ));
    report.emit(None)?;
    Ok(EXIT_POSITIVE)
}

fn cmd_ancilla(args: AncillaArgs) -> anyhow::Result<u8> {
    if args.ancilla_dim == 0 {
        bail!("--ancilla-dim must be positive");
    }
    let (_, rho) = load_state(&args.input, args.tols.val_tol)?;
    let rank = args.rank.unwrap_or(args.ancilla_dim);
    let rho_c = random_density(args.ancilla_dim, rank, args.seed)?;
    let (base, ext) = extend_with_ancilla(&rho, &rho_c, args.tols.tol)?;
    let agree = base.is_zero == ext.is_zero;

    let mut report = Report::new(args.machine);
    report.kv("file", args.input.display());
    report.kv("ancilla_dim", args.ancilla_dim);
    report.kv("ancilla_rank", rank);
    report.kv("seed", args.seed);
    report.kv("base_is_zero", base.is_zero);
    report.kv("extended_is_zero", ext.is_zero);
    report.kv("base_commutation_defect", sci(base.max_commutation_defect));
    report.kv(
        "extended_commutation_defect",
        sci(ext.max_commutation_defect),
    );
    report.kv("agree", agree);

    report.text(format!(
        "base state: {} discord (commutation defect {})",
        if base.is_zero { "ZERO" } else { "NONZERO" },
        sci(base.max_commutation_defect)
    ));
    report.text(format!(
        "with dim-{} ancilla on B: {} discord (commutation defect {})",
        args.ancilla_dim,
        if ext.is_zero { "ZERO" } else { "NONZERO" },
        sci(ext.max_commutation_defect)
    ));
    report.text(format!(
        "verdicts {}",
        if agree {
            "AGREE: a POVM cannot change the classification"
        } else {
            "DISAGREE"
        }
    ));
    report.emit(None)?;
    Ok(if agree { EXIT_POSITIVE } else { EXIT_NEGATIVE })
}
