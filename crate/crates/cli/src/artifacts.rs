//! Loading and validating input files. Nothing unvalidated reaches the kernel.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use cwf_workbench::alg::{builtin_stage, parse_presentation, parse_table_theory, PresentationFile, PresentedAlgebra, TableTheory};
use cwf_workbench::cat::{parse_category, parse_internal_category, Cat, InternalCategory};
use cwf_workbench::Error;

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

fn artifact(path: &Path, source: Error) -> CliError {
    CliError::Artifact { path: path.display().to_string(), source }
}

/// A category file, or a builtin name when no such file exists.
pub fn load_category(spec: &str) -> Result<(String, Cat), CliError> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(cat) = Cat::named(spec) {
            return Ok((spec.to_string(), cat));
        }
    }
    let cat = parse_category(&read(path)?).map_err(|e| artifact(path, e))?;
    cat.validate().map_err(|e| artifact(path, e))?;
    let name = path.file_stem().map_or(spec.to_string(), |s| s.to_string_lossy().into_owned());
    Ok((name, cat))
}

/// An internal-category file or builtin name at dimension `d`.
pub fn load_internal_category(spec: &str, d: usize) -> Result<(String, InternalCategory), CliError> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Ok(ic) = InternalCategory::named(spec, d) {
            return Ok((spec.to_string(), ic));
        }
    }
    let ic = parse_internal_category(&read(path)?, Some(d)).map_err(|e| artifact(path, e))?;
    ic.validate().map_err(|e| artifact(path, e))?;
    let name = path.file_stem().map_or(spec.to_string(), |s| s.to_string_lossy().into_owned());
    Ok((name, ic))
}

/// A parsed presentation file; table theories are resolved relative to the file.
pub fn load_presentation(path: &Path) -> Result<(String, PresentationFile), CliError> {
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let pf = parse_presentation(&read(path)?, |file| {
        std::fs::read_to_string(dir.join(file)).map_err(|e| Error::Validation(format!("cannot read theory file {file}: {e}")))
    })
    .map_err(|e| artifact(path, e))?;
    let stem = path.file_stem().map_or(String::new(), |s| s.to_string_lossy().into_owned());
    let name = match &pf {
        PresentationFile::Ring { name, .. } | PresentationFile::Table { name, .. } => name.clone().unwrap_or(stem),
    };
    Ok((name, pf))
}

pub fn load_theory(path: &Path) -> Result<TableTheory, CliError> {
    parse_table_theory(&read(path)?).map_err(|e| artifact(path, e))
}

pub fn load_stages(names: &[String]) -> Result<Vec<Arc<PresentedAlgebra>>, CliError> {
    names
        .iter()
        .map(|n| match builtin_stage(n) {
            Some(Ok(a)) => Ok(Arc::new(a)),
            Some(Err(e)) => Err(CliError::Config(format!("stage {n}: {e}"))),
            None => Err(CliError::Config(format!("unknown stage `{n}`"))),
        })
        .collect()
}
