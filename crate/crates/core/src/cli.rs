//! `isotrans` command line: file in, file out, deterministic per seed.
//!
//! Exit codes: 0 success, 2 parse or validation error, 3 pair not generic
//! under `--strategy generic`, 4 residual certification failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::factor::{
    symmetric_reduce, transpose_factor, Reduction, SymmetricForm, TransposeFactor,
};
use crate::isotropic::{isotropy_residual, max_isotropic_dim, sample_isotropic, Plane};
use crate::matcore::io::{read_matrix, write_matrix};
use crate::matcore::{rank, span_distance, Matrix, Tolerance};
use crate::transport::{group_membership, transport, Strategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_GENERIC: i32 = 3;
pub const EXIT_UNCERTIFIED: i32 = 4;

/// Relative asymmetry above which ingesting a form prints a warning.
const ASYMMETRY_WARNING: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "isotrans",
    version,
    about = "Transpose factorization of complex symmetric forms and orthogonal transporters between isotropic planes"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Relative pivot threshold for rank decisions.
    #[arg(long = "rank-tol", global = true, default_value_t = 1e-10)]
    rank_tol: f64,
    /// Bound on scaled residuals for certification.
    #[arg(long = "residual-tol", global = true, default_value_t = 1e-8)]
    residual_tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor q = pᵀp and write p.
    Factor {
        q: PathBuf,
        #[arg(long, default_value = "p.json")]
        out: PathBuf,
    },
    /// Reduce q to diag(I_l, 0) by congruence and write the change of basis a.
    Reduce {
        q: PathBuf,
        #[arg(long, default_value = "a.json")]
        out: PathBuf,
    },
    /// Print the isotropy residual of a plane for a form.
    Check { q: PathBuf, plane: PathBuf },
    /// Sample an isotropic plane (identity form unless a form file is given).
    Sample {
        q: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "plane.json")]
        out: PathBuf,
    },
    /// Build A in the orthogonal group of q with A·l1 = l2.
    Transport {
        q: PathBuf,
        l1: PathBuf,
        l2: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        #[arg(long, default_value = "a.json")]
        out: PathBuf,
    },
    /// Re-certify an artifact against its inputs.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Check pᵀp = q and rank(p) = rank(q).
    Factor { q: PathBuf, p: PathBuf },
    /// Check aᵀqa = diag(I_l, 0) and rank(a) = m.
    Reduce { q: PathBuf, a: PathBuf },
    /// Check that a plane is isotropic (identity form unless a form file is given).
    Sample { plane: PathBuf, q: Option<PathBuf> },
    /// Check aᵀqa = q and a·l1 = l2, and the residual sidecar if present.
    Transport {
        q: PathBuf,
        l1: PathBuf,
        l2: PathBuf,
        a: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Auto,
    Generic,
    Frame,
}

impl StrategyArg {
    fn name(self) -> &'static str {
        match self {
            StrategyArg::Auto => "auto",
            StrategyArg::Generic => "generic",
            StrategyArg::Frame => "frame",
        }
    }
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Generic => Strategy::GenericOnly,
            StrategyArg::Frame => Strategy::FrameOnly,
        }
    }
}

/// Residual record written next to a transport output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub strategy: String,
    pub route: String,
    pub group_residual: f64,
    pub transport_residual: f64,
    pub seed: u64,
}

/// `a.json` → `a.sidecar.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("sidecar.json")
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    NotGeneric(String),
    Uncertified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotGeneric(_) => Failure::NotGeneric(e.to_string()),
            Error::Uncertified { .. } => Failure::Uncertified(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::NotGeneric(_) => EXIT_NOT_GENERIC,
            Failure::Uncertified(_) => EXIT_UNCERTIFIED,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::NotGeneric(m) | Failure::Uncertified(m) => m,
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn load_form(path: &Path, tol: Tolerance) -> Result<SymmetricForm, Failure> {
    let form = SymmetricForm::new(read_matrix(path)?, tol)?;
    if form.input_asymmetry() > ASYMMETRY_WARNING {
        eprintln!(
            "warning: {} is not symmetric (relative asymmetry {}); using (q + qᵀ)/2",
            path.display(),
            sci(form.input_asymmetry())
        );
    }
    Ok(form)
}

fn load_plane(path: &Path, tol: &Tolerance) -> Result<Plane, Failure> {
    Ok(Plane::new(read_matrix(path)?, tol)?)
}

fn certify(what: &str, residual: f64, bound: f64) -> CliResult {
    if residual.is_finite() && residual <= bound {
        Ok(())
    } else {
        Err(Failure::Uncertified(format!(
            "{what}: residual {} exceeds {}",
            sci(residual),
            sci(bound)
        )))
    }
}

fn factor_bound(q: &SymmetricForm, tol: &Tolerance) -> f64 {
    tol.residual_rel_tol * q.matrix().norm_fro().max(1.0) * q.dim() as f64
}

fn reduce_bound(q: &SymmetricForm, tol: &Tolerance) -> f64 {
    tol.residual_rel_tol * q.matrix().norm_max() * q.dim() as f64
}

fn cmd_factor(q: &Path, out: &Path, tol: Tolerance) -> CliResult {
    let form = load_form(q, tol)?;
    let tf: TransposeFactor = transpose_factor(&form)?;
    let residual = tf.residual(&form);
    certify("factorization pᵀp = q", residual, factor_bound(&form, &tol))?;
    write_matrix(out, &tf.p)?;
    println!("rank {}", tf.l);
    println!("residual {}", sci(residual));
    Ok(())
}

fn cmd_reduce(q: &Path, out: &Path, tol: Tolerance) -> CliResult {
    let form = load_form(q, tol)?;
    let red: Reduction = symmetric_reduce(&form);
    let residual = red.residual(&form);
    certify(
        "congruence aᵀqa = diag(I_l, 0)",
        residual,
        reduce_bound(&form, &tol),
    )?;
    write_matrix(out, &red.a)?;
    println!("rank {}", red.l);
    println!("residual {}", sci(residual));
    Ok(())
}

fn cmd_check(q: &Path, plane: &Path, tol: Tolerance) -> CliResult {
    let form = load_form(q, tol)?;
    let plane = load_plane(plane, &tol)?;
    let residual = isotropy_residual(&form, &plane)?;
    println!("residual {}", sci(residual));
    println!("isotropic {}", residual <= tol.residual_rel_tol);
    Ok(())
}

fn cmd_sample(
    q: Option<&Path>,
    m: Option<usize>,
    k: usize,
    out: &Path,
    seed: u64,
    tol: Tolerance,
) -> CliResult {
    let form = match (q, m) {
        (Some(path), m) => {
            let form = load_form(path, tol)?;
            if let Some(m) = m.filter(|&m| m != form.dim()) {
                return Err(Failure::Invalid(format!(
                    "--m {m} disagrees with the form dimension {}",
                    form.dim()
                )));
            }
            form
        }
        (None, Some(m)) if m > 0 => SymmetricForm::identity(m, tol),
        (None, _) => {
            return Err(Failure::Invalid(
                "sample needs --m >= 1 or a form file".into(),
            ))
        }
    };
    let max = max_isotropic_dim(form.dim());
    if k == 0 || k > max {
        return Err(Failure::Invalid(format!(
            "isotropic {k}-planes require 1 <= k <= m/2; m = {} allows k <= {max}",
            form.dim()
        )));
    }
    let plane = sample_isotropic(&form, k, seed)?;
    let residual = isotropy_residual(&form, &plane)?;
    certify("isotropy", residual, tol.residual_rel_tol)?;
    write_matrix(out, plane.basis())?;
    println!("m {} k {}", plane.m(), plane.k());
    println!("residual {}", sci(residual));
    Ok(())
}

fn cmd_transport(
    q: &Path,
    l1: &Path,
    l2: &Path,
    strategy: StrategyArg,
    out: &Path,
    seed: u64,
    tol: Tolerance,
) -> CliResult {
    let form = load_form(q, tol)?;
    let p1 = load_plane(l1, &tol)?;
    let p2 = load_plane(l2, &tol)?;
    let map = transport(&form, &p1, &p2, strategy.into())?;
    let transport_residual = map.transport_residual.unwrap_or(f64::NAN);
    write_matrix(out, &map.a)?;
    let sidecar = Sidecar {
        strategy: strategy.name().to_string(),
        route: map.route.to_string(),
        group_residual: map.group_residual,
        transport_residual,
        seed,
    };
    let text =
        serde_json::to_string_pretty(&sidecar).map_err(|e| Failure::Invalid(e.to_string()))?;
    let side = sidecar_path(out);
    std::fs::write(&side, text + "\n")
        .map_err(|e| Failure::Invalid(format!("{}: {e}", side.display())))?;
    println!("route {}", map.route);
    println!("group_residual {}", sci(map.group_residual));
    println!("transport_residual {}", sci(transport_residual));
    Ok(())
}

fn verify_factor(q: &Path, p: &Path, tol: Tolerance) -> CliResult {
    let form = load_form(q, tol)?;
    let p = read_matrix(p)?;
    if p.shape() != form.matrix().shape() {
        return Err(Failure::Invalid(
            "factor and form have different shapes".into(),
        ));
    }
    let tf = TransposeFactor {
        l: rank(&p, &tol),
        p,
    };
    let residual = tf.residual(&form);
    certify("factorization pᵀp = q", residual, factor_bound(&form, &tol))?;
    if tf.l != form.rank() {
        return Err(Failure::Uncertified(format!(
            "rank(p) = {} differs from rank(q) = {}",
            tf.l,
            form.rank()
        )));
    }
    println!("factor ok: rank {} residual {}", tf.l, sci(residual));
    Ok(())
}

fn verify_reduce(q: &Path, a: &Path, tol: Tolerance) -> CliResult {
    let form = load_form(q, tol)?;
    let a = read_matrix(a)?;
    if a.shape() != form.matrix().shape() {
        return Err(Failure::Invalid(
            "change of basis and form have different shapes".into(),
        ));
    }
    let m = form.dim();
    if rank(&a, &tol) < m {
        return Err(Failure::Uncertified(
            "change of basis a is not invertible".into(),
        ));
    }
    let red = Reduction { a, l: form.rank() };
    let residual = red.residual(&form);
    certify(
        "congruence aᵀqa = diag(I_l, 0)",
        residual,
        reduce_bound(&form, &tol),
    )?;
    println!("reduce ok: rank {} residual {}", red.l, sci(residual));
    Ok(())
}

fn verify_sample(plane: &Path, q: Option<&Path>, tol: Tolerance) -> CliResult {
    let plane = load_plane(plane, &tol)?;
    let form = match q {
        Some(path) => load_form(path, tol)?,
        None => SymmetricForm::identity(plane.m(), tol),
    };
    if !form.is_non_degenerate() {
        return Err(Failure::Invalid(
            Error::DegenerateForm {
                rank: form.rank(),
                m: form.dim(),
            }
            .to_string(),
        ));
    }
    if plane.k() > max_isotropic_dim(plane.m()) {
        return Err(Failure::Uncertified(format!(
            "plane dimension {} exceeds the isotropic bound m/2 = {}",
            plane.k(),
            max_isotropic_dim(plane.m())
        )));
    }
    let residual = isotropy_residual(&form, &plane)?;
    certify("isotropy", residual, tol.residual_rel_tol)?;
    println!("sample ok: residual {}", sci(residual));
    Ok(())
}

fn verify_transport(q: &Path, l1: &Path, l2: &Path, a: &Path, tol: Tolerance) -> CliResult {
    let form = load_form(q, tol)?;
    let p1 = load_plane(l1, &tol)?;
    let p2 = load_plane(l2, &tol)?;
    let a_path = a;
    let a: Matrix = read_matrix(a_path)?;
    for p in [&p1, &p2] {
        let residual = isotropy_residual(&form, p)?;
        certify("input isotropy", residual, tol.residual_rel_tol)?;
    }
    let group = group_membership(&form, &a)?;
    certify("group membership aᵀqa = q", group, tol.residual_rel_tol)?;
    if p1.k() != p2.k() || p1.m() != a.cols() {
        return Err(Failure::Invalid(
            "planes and map have inconsistent shapes".into(),
        ));
    }
    let moved = span_distance(&a.matmul(p1.basis()), p2.basis(), &tol)
        .map_err(|e| Failure::Uncertified(format!("span transport: {e}")))?;
    certify("span transport a·l1 = l2", moved, tol.residual_rel_tol)?;

    let side = sidecar_path(a_path);
    if side.exists() {
        let text = std::fs::read_to_string(&side)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", side.display())))?;
        let record: Sidecar = serde_json::from_str(&text)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", side.display())))?;
        certify(
            "recorded group residual",
            record.group_residual,
            tol.residual_rel_tol,
        )?;
        certify(
            "recorded transport residual",
            record.transport_residual,
            tol.residual_rel_tol,
        )?;
    }
    println!(
        "transport ok: group_residual {} transport_residual {}",
        sci(group),
        sci(moved)
    );
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    let GlobalOpts {
        rank_tol,
        residual_tol,
        seed,
    } = cli.global;
    let tol = Tolerance::new(rank_tol, residual_tol)?;
    match cli.command {
        Command::Factor { q, out } => cmd_factor(&q, &out, tol),
        Command::Reduce { q, out } => cmd_reduce(&q, &out, tol),
        Command::Check { q, plane } => cmd_check(&q, &plane, tol),
        Command::Sample { q, m, k, out } => cmd_sample(q.as_deref(), m, k, &out, seed, tol),
        Command::Transport {
            q,
            l1,
            l2,
            strategy,
            out,
        } => cmd_transport(&q, &l1, &l2, strategy, &out, seed, tol),
        Command::Verify(v) => match v {
            VerifyCommand::Factor { q, p } => verify_factor(&q, &p, tol),
            VerifyCommand::Reduce { q, a } => verify_reduce(&q, &a, tol),
            VerifyCommand::Sample { plane, q } => verify_sample(&plane, q.as_deref(), tol),
            VerifyCommand::Transport { q, l1, l2, a } => verify_transport(&q, &l1, &l2, &a, tol),
        },
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.exit_code()
        }
    }
}
