//! Run configuration, basis artifacts on disk and JSON output.
//!
//! A basis directory holds `manifest.json`, one `profile_NN.csv` per degree
//! and `quadrature.csv` listing the disk quadrature nodes.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bergman::{DiskQuadrature, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES};
use crate::error::{Error, Result};
use crate::formal_powers::FormalPowerBasis;
use crate::potential::PotentialSpec;
use crate::quadrature::PanelGrid;
use crate::radial::{RadialFunction, RadialProfile, SeriesInfo, DEFAULT_MAX_TERMS, DEFAULT_TOL};
use crate::vekua_check::PolarGrid;

pub const SCHEMA: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const QUADRATURE_CSV: &str = "quadrature.csv";

pub const PROFILE_HEADER: [&str; 9] = [
    "r",
    "re_phi_f",
    "im_phi_f",
    "re_dphi_f",
    "im_dphi_f",
    "re_phi_inv_f",
    "im_phi_inv_f",
    "re_dphi_inv_f",
    "im_dphi_inv_f",
];

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact JSON writer that prints every float with [`fmt_f64`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Json17;

impl serde_json::ser::Formatter for Json17 {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Json17);
    value.serialize(&mut ser)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub r_min: f64,
    pub r_max: f64,
    pub h: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams { r_min: 0.05, r_max: 0.95, h: 1e-3 }
    }
}

impl GridParams {
    pub fn polar_grid(&self) -> Result<PolarGrid> {
        PolarGrid::with_spacing(self.r_min, self.r_max, self.h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadParams {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams { radial_nodes: DEFAULT_RADIAL_NODES, angular_nodes: DEFAULT_ANGULAR_NODES }
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_terms() -> usize {
    DEFAULT_MAX_TERMS
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub n_max: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub quad: QuadParams,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            if e.is_data() || e.is_syntax() || e.is_eof() {
                Error::InvalidConfig(e.to_string())
            } else {
                Error::from(e)
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. A relative `output_dir` is resolved against the
    /// directory holding the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if cfg.output_dir.is_relative() {
            if let Some(parent) = path.parent() {
                cfg.output_dir = parent.join(&cfg.output_dir);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidConfig("max_terms must be positive".into()));
        }
        if self.grid.r_max > self.potential.radius() {
            return Err(Error::InvalidConfig(format!(
                "grid r_max {} exceeds the radius {}",
                self.grid.r_max,
                self.potential.radius()
            )));
        }
        if self.quad.radial_nodes == 0 || self.quad.angular_nodes == 0 {
            return Err(Error::InvalidConfig("quadrature node counts must be positive".into()));
        }
        Ok(())
    }

    pub fn disk_quadrature(&self) -> Result<DiskQuadrature> {
        DiskQuadrature::new(self.potential.radius(), self.quad.radial_nodes, self.quad.angular_nodes)
    }

    pub fn build_basis(&self) -> Result<FormalPowerBasis> {
        FormalPowerBasis::build(&self.potential, self.n_max, self.tol, self.max_terms)
    }

    /// SHA-256 over the canonical JSON of `{potential, n_max, tol}`.
    pub fn fingerprint(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Key<'a> {
            potential: &'a PotentialSpec,
            n_max: usize,
            tol: f64,
        }
        let canonical = to_json(&Key { potential: &self.potential, n_max: self.n_max, tol: self.tol })?;
        Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub degree: usize,
    pub file: String,
    pub phi_f: SeriesInfo,
    pub phi_inv_f: SeriesInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub fingerprint: String,
    pub potential: PotentialSpec,
    pub n_max: usize,
    pub tol: f64,
    pub radius: f64,
    pub panels: usize,
    pub panel_order: usize,
    pub quadrature: QuadParams,
    pub profiles: Vec<ProfileRecord>,
}

pub fn profile_file_name(n: usize) -> String {
    format!("profile_{n:02}.csv")
}

/// Writes the profiles of degree `n` on the panel grid.
pub fn write_profile_csv<W: std::io::Write>(basis: &FormalPowerBasis, n: usize, out: W) -> Result<()> {
    let (pf, pi) = (&basis.phi_f()[n], &basis.phi_inv_f()[n]);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for (i, &r) in pf.nodes().iter().enumerate() {
        let cols = [pf.values()[i], pf.derivs()[i], pi.values()[i], pi.derivs()[i]];
        let mut row = vec![fmt_f64(r)];
        row.extend(cols.iter().flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)]));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_profile_csv(path: &Path, grid: &Arc<PanelGrid>) -> Result<[(Vec<C64>, Vec<C64>); 2]> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != PROFILE_HEADER {
        return Err(Error::Format(format!("{}: unexpected header {header:?}", path.display())));
    }
    let mut cols: [Vec<C64>; 4] = Default::default();
    let mut count = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("{} row {}: {e}", path.display(), i + 1)))?;
        if nums.len() != 9 {
            return Err(Error::Format(format!("{} row {}: expected 9 columns", path.display(), i + 1)));
        }
        if i >= grid.len() || nums[0] != grid.nodes()[i] {
            return Err(Error::Format(format!("{} row {}: node does not match the panel grid", path.display(), i + 1)));
        }
        for (c, col) in cols.iter_mut().enumerate() {
            col.push(C64::new(nums[1 + 2 * c], nums[2 + 2 * c]));
        }
        count += 1;
    }
    if count != grid.len() {
        return Err(Error::Format(format!("{}: {count} rows, expected {}", path.display(), grid.len())));
    }
    let [a, b, c, d] = cols;
    Ok([(a, b), (c, d)])
}

/// Writes the manifest, the profile CSVs and `quadrature.csv` into `config.output_dir`.
pub fn write_basis(config: &RunConfig, basis: &FormalPowerBasis) -> Result<Manifest> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut profiles = Vec::with_capacity(basis.n_max() + 1);
    for n in 0..=basis.n_max() {
        let file = profile_file_name(n);
        let path = dir.join(&file);
        let handle = fs::File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        write_profile_csv(basis, n, std::io::BufWriter::new(handle))?;
        profiles.push(ProfileRecord {
            degree: n,
            file,
            phi_f: basis.phi_f()[n].info(),
            phi_inv_f: basis.phi_inv_f()[n].info(),
        });
    }
    let quad_path = dir.join(QUADRATURE_CSV);
    let handle = fs::File::create(&quad_path).map_err(|e| Error::Io(format!("{}: {e}", quad_path.display())))?;
    config.disk_quadrature()?.write_csv(std::io::BufWriter::new(handle))?;
    let manifest = Manifest {
        schema: SCHEMA,
        fingerprint: config.fingerprint()?,
        potential: config.potential.clone(),
        n_max: config.n_max,
        tol: config.tol,
        radius: config.potential.radius(),
        panels: crate::quadrature::PANELS,
        panel_order: crate::quadrature::PANEL_ORDER,
        quadrature: config.quad,
        profiles,
    };
    let path = dir.join(MANIFEST);
    fs::write(&path, to_json(&manifest)? + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(manifest)
}

/// Reads a basis written by [`write_basis`]; the manifest fingerprint must match `config`.
pub fn load_basis(config: &RunConfig) -> Result<FormalPowerBasis> {
    let dir = &config.output_dir;
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if manifest.schema != SCHEMA {
        return Err(Error::Format(format!("unsupported manifest schema {}", manifest.schema)));
    }
    if manifest.fingerprint != config.fingerprint()? {
        return Err(Error::Format("manifest fingerprint does not match the config".into()));
    }
    let grid = Arc::new(PanelGrid::new(config.potential.radius())?);
    let mut phi_f = Vec::with_capacity(manifest.profiles.len());
    let mut phi_inv_f = Vec::with_capacity(manifest.profiles.len());
    for (n, rec) in manifest.profiles.iter().enumerate() {
        if rec.degree != n {
            return Err(Error::Format(format!("manifest lists degree {} at position {n}", rec.degree)));
        }
        let [(vf, df), (vi, di)] = read_profile_csv(&dir.join(&rec.file), &grid)?;
        phi_f.push(RadialProfile::from_parts(n, rec.phi_f, RadialFunction::new(grid.clone(), vf, df)?));
        phi_inv_f.push(RadialProfile::from_parts(n, rec.phi_inv_f, RadialFunction::new(grid.clone(), vi, di)?));
    }
    FormalPowerBasis::from_profiles(config.potential.clone(), config.tol, phi_f, phi_inv_f)
}

/// Loads the basis from `output_dir` when a manifest with a matching
/// fingerprint exists there, and builds it otherwise.
pub fn load_or_build(config: &RunConfig) -> Result<FormalPowerBasis> {
    let path = config.output_dir.join(MANIFEST);
    if path.exists() {
        let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let same = serde_json::from_str::<serde_json::Value>(&text)
            .ok()
            .and_then(|v| v.get("fingerprint").and_then(|f| f.as_str().map(str::to_owned)))
            == Some(config.fingerprint()?);
        if same {
            return load_basis(config);
        }
    }
    config.build_basis()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helmholtz_config(dir: &Path) -> RunConfig {
        RunConfig::from_json(&format!(
            r#"{{"potential": {{"kind": "constant", "value": [-0.25, 0], "radius": 1}},
                "n_max": 3, "output_dir": {:?}}}"#,
            dir.to_str().unwrap()
        ))
        .unwrap()
    }

    #[test]
    fn json_floats_round_trip() {
        let xs = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0];
        let text = to_json(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, xs);
        assert_eq!(to_json(&[1.0]).unwrap(), "[1.0000000000000000e0]");
    }

    #[test]
    fn fingerprint_tracks_potential_degree_and_tol() {
        let dir = Path::new("unused");
        let base = helmholtz_config(dir);
        let fp = base.fingerprint().unwrap();
        let mut other = base.clone();
        other.output_dir = PathBuf::from("elsewhere");
        other.grid.h = 2e-3;
        assert_eq!(other.fingerprint().unwrap(), fp);
        let mut other = base.clone();
        other.n_max = 4;
        assert_ne!(other.fingerprint().unwrap(), fp);
        let mut other = base.clone();
        other.tol = 1e-10;
        assert_ne!(other.fingerprint().unwrap(), fp);
        let mut other = base;
        other.potential = PotentialSpec::constant(C64::new(-0.25, 0.0), 2.0).unwrap();
        assert_ne!(other.fingerprint().unwrap(), fp);
    }

    #[test]
    fn config_validation() {
        let bad_tol = r#"{"potential": {"kind": "constant", "value": 0, "radius": 1}, "n_max": 2, "tol": 1.5}"#;
        assert!(matches!(RunConfig::from_json(bad_tol), Err(Error::InvalidConfig(_))));
        let bad_node = r#"{"potential": {"kind": "tabulated", "nodes": [[0.5, 1], [1, 1]], "radius": 1}, "n_max": 2}"#;
        assert!(matches!(RunConfig::from_json(bad_node), Err(Error::InvalidPotential(_))));
        let unknown = r#"{"potential": {"kind": "constant", "value": 0, "radius": 1}, "n_max": 2, "extra": 1}"#;
        assert!(matches!(RunConfig::from_json(unknown), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn basis_files_load_back_exactly() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = helmholtz_config(tmp.path());
        let basis = cfg.build_basis().unwrap();
        let manifest = write_basis(&cfg, &basis).unwrap();
        assert_eq!(manifest.profiles.len(), 4);
        let loaded = load_or_build(&cfg).unwrap();
        for n in 0..=3 {
            assert_eq!(loaded.phi_f()[n].values(), basis.phi_f()[n].values());
            assert_eq!(loaded.phi_inv_f()[n].derivs(), basis.phi_inv_f()[n].derivs());
        }
    }
}
