//! Code manifests: building code families to disk and loading them back.
//!
//! `build-code` writes five alist files (`hx`, `hz`, `meta`, `lx`, `lz`)
//! next to a `manifest.json` describing the construction. Codes without
//! metachecks get a zero-row `meta.alist` so the file set is uniform.

use std::fs;
use std::path::{Path, PathBuf};

use qldpc_core::codes::{surface_code_3d, CssCode, LpPreset};
use qldpc_core::gf2::SparseBitMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::{self, FormatError};

/// Errors from writing or loading a code directory.
#[derive(Debug, Error)]
pub enum ManifestError {
    /// Underlying filesystem failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// Matrix file failure.
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    /// Manifest JSON failure.
    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
    /// The manifest or its referenced matrices are inconsistent.
    #[error("{0}")]
    Invalid(String),
}

/// Description of a constructed code, stored as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    /// Code family: `toric3d`, `surface3d`, or `lp`.
    pub family: String,
    /// Lattice size for the 3D families.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Base-matrix preset id for the lifted-product family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Circulant lift size for the lifted-product family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<u32>,
    /// Number of physical qubits.
    pub n: usize,
    /// Number of logical qubits.
    pub k: usize,
    /// Whether the 3D lattice has periodic boundaries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<bool>,
}

/// Parses an LP preset id of the form `n544k80`.
pub fn lp_preset(id: &str) -> Result<LpPreset, ManifestError> {
    match id {
        "n544k80" => Ok(LpPreset::N544K80),
        "n714k100" => Ok(LpPreset::N714K100),
        "n1020k136" => Ok(LpPreset::N1020K136),
        other => Err(ManifestError::Invalid(format!(
            "unknown lifted-product base `{other}` (expected n544k80, n714k100, or n1020k136)"
        ))),
    }
}

fn lp_lift(preset: LpPreset) -> u32 {
    preset.base().1
}

/// Builds the code a manifest-to-be describes and fills in its parameters.
pub fn build_family(
    family: &str,
    l: Option<usize>,
    base: Option<&str>,
    periodic: bool,
) -> Result<(CssCode, Manifest), ManifestError> {
    match family {
        "toric3d" | "surface3d" => {
            let l = l.ok_or_else(|| {
                ManifestError::Invalid(format!("family `{family}` requires -L"))
            })?;
            if l < 2 {
                return Err(ManifestError::Invalid("-L must be at least 2".into()));
            }
            let wraps = family == "toric3d";
            if periodic && !wraps {
                return Err(ManifestError::Invalid(
                    "surface3d has open boundaries; use toric3d for periodic ones".into(),
                ));
            }
            let code = surface_code_3d(l, wraps);
            let manifest = Manifest {
                family: family.to_string(),
                l: Some(l),
                base: None,
                lift: None,
                n: code.n(),
                k: code.k(),
                periodic: Some(wraps),
            };
            Ok((code, manifest))
        }
        "lp" => {
            let id = base.ok_or_else(|| {
                ManifestError::Invalid("family `lp` requires --base".into())
            })?;
            let preset = lp_preset(id)?;
            let code = preset.build();
            let manifest = Manifest {
                family: "lp".to_string(),
                l: None,
                base: Some(id.to_string()),
                lift: Some(lp_lift(preset)),
                n: code.n(),
                k: code.k(),
                periodic: None,
            };
            Ok((code, manifest))
        }
        other => Err(ManifestError::Invalid(format!(
            "unknown family `{other}` (expected toric3d, surface3d, or lp)"
        ))),
    }
}

const MATRIX_FILES: [&str; 5] = ["hx.alist", "hz.alist", "meta.alist", "lx.alist", "lz.alist"];

fn save(dir: &Path, name: &str, m: &SparseBitMatrix) -> Result<(), ManifestError> {
    let path = dir.join(name);
    formats::save_matrix(&path, m).map_err(|source| ManifestError::File { path, source })
}

fn load(dir: &Path, name: &str) -> Result<SparseBitMatrix, ManifestError> {
    let path = dir.join(name);
    formats::load_matrix(&path).map_err(|source| ManifestError::File { path, source })
}

/// Writes the five matrix files and `manifest.json` into `dir`.
pub fn write_code(dir: &Path, code: &CssCode, manifest: &Manifest) -> Result<(), ManifestError> {
    fs::create_dir_all(dir)?;
    let meta = match &code.meta_x {
        Some(m) => m.clone(),
        None => SparseBitMatrix::zeros(0, code.hx.rows()),
    };
    save(dir, MATRIX_FILES[0], &code.hx)?;
    save(dir, MATRIX_FILES[1], &code.hz)?;
    save(dir, MATRIX_FILES[2], &meta)?;
    save(dir, MATRIX_FILES[3], &code.lx)?;
    save(dir, MATRIX_FILES[4], &code.lz)?;
    let json = serde_json::to_string_pretty(manifest)?;
    fs::write(dir.join("manifest.json"), json + "\n")?;
    Ok(())
}

/// Loads a code from a `manifest.json` path, rechecking CSS structure and
/// the declared `n` and `k`.
pub fn load_code(manifest_path: &Path) -> Result<(CssCode, Manifest), ManifestError> {
    let text = fs::read_to_string(manifest_path)?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));

    let hx = load(dir, MATRIX_FILES[0])?;
    let hz = load(dir, MATRIX_FILES[1])?;
    let meta = load(dir, MATRIX_FILES[2])?;
    let meta = (meta.rows() > 0).then_some(meta);
    let code = CssCode::new(hx, hz, meta, None)
        .map_err(|e| ManifestError::Invalid(format!("invalid code matrices: {e}")))?;

    if code.n() != manifest.n || code.k() != manifest.k {
        return Err(ManifestError::Invalid(format!(
            "manifest declares [[{}, {}]] but matrices give [[{}, {}]]",
            manifest.n,
            manifest.k,
            code.n(),
            code.k()
        )));
    }
    let lx = load(dir, MATRIX_FILES[3])?;
    let lz = load(dir, MATRIX_FILES[4])?;
    if lx.to_dense_rows() != code.lx.to_dense_rows()
        || lz.to_dense_rows() != code.lz.to_dense_rows()
    {
        return Err(ManifestError::Invalid(
            "stored logical bases disagree with the rederived ones".into(),
        ));
    }
    Ok((code, manifest))
}
