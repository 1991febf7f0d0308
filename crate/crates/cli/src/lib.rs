//! File handling and subcommands behind the `confmodel` binary.
//!
//! Exit codes: 0 ok, 2 verification failure, 3 invalid input,
//! 4 branch or continuation failure, 5 unsupported input.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use confmodel::continuation::PolarGridSpec;
use confmodel::render::figure_pair;
use confmodel::verify::{residual_sup, verify_model, Tolerances, VerificationReport};
use confmodel::{model_with, Error, FiniteBlaschkeProduct, ModelOptions};

pub mod files;

pub use files::{BlaschkeSpecFile, CriticalReport, ModelFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;
pub const EXIT_BRANCH_FAILURE: i32 = 4;
pub const EXIT_UNSUPPORTED: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("model failed verification")]
    Untrusted,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::Malformed(_)
            | CliError::Argument(_) => EXIT_INVALID_INPUT,
            CliError::Untrusted => EXIT_VERIFY_FAILED,
            CliError::Core(e) => match e {
                Error::UnsupportedInput(_) | Error::DegreeOutOfRange(_) => EXIT_UNSUPPORTED,
                Error::NotUnimodular(_)
                | Error::ZeroOutsideDisk(_)
                | Error::OutsideDisk(_)
                | Error::NoZeros
                | Error::NonFinite
                | Error::InvalidGrid(_)
                | Error::InvalidSeed(_)
                | Error::WrongDegree { .. }
                | Error::WrongCase => EXIT_INVALID_INPUT,
                _ => EXIT_BRANCH_FAILURE,
            },
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    // temporary files are created owner-only
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(fs::Permissions::from_mode(0o644))
            .map_err(io_err)?;
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    // plain data structures always serialize
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

pub fn load_blaschke(path: &Path) -> Result<FiniteBlaschkeProduct, CliError> {
    read_json::<BlaschkeSpecFile>(path)?.to_blaschke()
}

/// `RxA`, e.g. `64x256`; the outer radius is the default one.
pub fn parse_grid(s: &str) -> Result<PolarGridSpec, CliError> {
    let bad = || CliError::Argument(format!("grid {s:?} is not of the form RxA"));
    let (r, a) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let n_radii = r.trim().parse().map_err(|_| bad())?;
    let n_angles = a.trim().parse().map_err(|_| bad())?;
    Ok(PolarGridSpec::new(
        n_radii,
        n_angles,
        PolarGridSpec::default().r_max,
    )?)
}

/// Builds the model for the product in `input` and writes it to `output`.
pub fn cmd_model(input: &Path, output: &Path, grid: PolarGridSpec) -> Result<ModelFile, CliError> {
    let b = load_blaschke(input)?;
    let m = model_with(&b, &ModelOptions { grid })?;
    let file = ModelFile::from_model(&m);
    write_atomic(output, to_pretty_json(&file).as_bytes())?;
    Ok(file)
}

/// Runs every verification gate. The caller decides the exit code from
/// `passed`.
pub fn cmd_verify(
    input: &Path,
    model_path: &Path,
    grid: PolarGridSpec,
    tol: &Tolerances,
    seed: u64,
) -> Result<VerificationReport, CliError> {
    let b = load_blaschke(input)?;
    let m = read_json::<ModelFile>(model_path)?.to_model(&b)?;
    Ok(verify_model(&b, &m, &grid, tol, seed)?)
}

pub fn report_json(report: &VerificationReport) -> String {
    to_pretty_json(report)
}

/// Grid for the cheap trust check before rendering.
const TRUST_GRID: (usize, usize) = (16, 64);

/// Writes `{prefix}_B.svg` and `{prefix}_p.svg`; returns their paths.
pub fn cmd_render(
    input: &Path,
    model_path: &Path,
    prefix: &str,
    size_px: usize,
    tolerance: f64,
) -> Result<(PathBuf, PathBuf), CliError> {
    if size_px < 100 {
        return Err(CliError::Argument(format!("size {size_px} is below 100")));
    }
    let b = load_blaschke(input)?;
    let m = read_json::<ModelFile>(model_path)?.to_model(&b)?;
    let spec = PolarGridSpec::new(TRUST_GRID.0, TRUST_GRID.1, PolarGridSpec::default().r_max)?;
    let residual = residual_sup(&b, &m, &spec)?;
    // NaN residuals are not trusted either
    if residual.is_nan() || residual > tolerance {
        return Err(CliError::Untrusted);
    }
    let (left, right) = figure_pair(&b, &m, size_px);
    let left_path = PathBuf::from(format!("{prefix}_B.svg"));
    let right_path = PathBuf::from(format!("{prefix}_p.svg"));
    write_atomic(&left_path, left.as_bytes())?;
    write_atomic(&right_path, right.as_bytes())?;
    Ok((left_path, right_path))
}

/// Critical points and values of a product of degree at most three.
pub fn cmd_report(input: &Path) -> Result<String, CliError> {
    let b = load_blaschke(input)?;
    let cd = b.critical_points_in_disk()?;
    Ok(to_pretty_json(&CriticalReport::new(b.degree(), &cd)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use confmodel::Complex;

    #[test]
    fn grid_flag() {
        let spec = parse_grid("64x256").unwrap();
        assert_eq!((spec.n_radii, spec.n_angles), (64, 256));
        assert_eq!(spec.r_max, PolarGridSpec::default().r_max);
        assert!(parse_grid("64").is_err());
        assert!(parse_grid("ax2").is_err());
        assert_eq!(
            parse_grid("0x16").unwrap_err().exit_code(),
            EXIT_INVALID_INPUT
        );
    }

    #[test]
    fn exit_code_contract() {
        assert_eq!(
            CliError::Core(Error::UnsupportedInput(4)).exit_code(),
            EXIT_UNSUPPORTED
        );
        assert_eq!(
            CliError::Core(Error::BranchSelectionFailure { passing: 0 }).exit_code(),
            EXIT_BRANCH_FAILURE
        );
        assert_eq!(
            CliError::Core(Error::StepCollapse {
                z: Complex::new(0.0, 0.0)
            })
            .exit_code(),
            EXIT_BRANCH_FAILURE
        );
        assert_eq!(
            CliError::Core(Error::NotUnimodular(2.0)).exit_code(),
            EXIT_INVALID_INPUT
        );
        assert_eq!(CliError::Untrusted.exit_code(), EXIT_VERIFY_FAILED);
    }

    #[test]
    fn lambda_is_normalised_within_tolerance() {
        let spec: BlaschkeSpecFile = serde_json::from_str(
            r#"{"lambda":{"re":0,"im":1.0000000005},"zeros":[{"re":0.5,"im":0}]}"#,
        )
        .unwrap();
        let b = spec.to_blaschke().unwrap();
        assert_eq!(b.lambda(), Complex::new(0.0, 1.0));

        let spec: BlaschkeSpecFile =
            serde_json::from_str(r#"{"lambda":{"re":0,"im":1.00001},"zeros":[{"re":0.5,"im":0}]}"#)
                .unwrap();
        assert!(spec.to_blaschke().is_err());

        let spec: BlaschkeSpecFile =
            serde_json::from_str(r#"{"zeros":[{"re":0.5,"im":0}]}"#).unwrap();
        assert_eq!(spec.to_blaschke().unwrap().lambda(), Complex::new(1.0, 0.0));
    }
}
