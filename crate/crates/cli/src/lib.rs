//! Driver for the cylinder and torus membrane benchmarks and for imported meshes.
//!
//! A [`RunConfig`] is read from an optional `key = value` file, overridden by
//! command-line flags, validated, and then fed to [`run_case`] or
//! [`run_convergence`].

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::ValueEnum;
use serde::Deserialize;

use membrane_core::assembly::{apply_constraints, assemble, clamp_boundary, cylinder_constraints, pressure_load};
use membrane_core::element::{NormalVariant, QuadratureRule};
use membrane_core::geometry::{
    AnalyticSurface, ConstitutiveMode, CylinderPull, ExactSolution, MaterialModel, TorusPressure, Vec3,
};
use membrane_core::mesh::{build_cylinder_mesh, build_torus_mesh, import_mesh, MeshFormat, SurfaceMesh};
use membrane_core::postprocess::{convergence_rate, export_vtk, recover_stress, stress_l2_error, ConvergenceRecord, StressField};
use membrane_core::solver::{rotation_fraction, solve, SolveReport, SolverOptions};

pub const SOLUTION_FILE: &str = "solution.vtk";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Cylinder,
    Torus,
    Import,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Interpolated,
    Facet,
}

impl From<Variant> for NormalVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Interpolated => NormalVariant::Interpolated,
            Variant::Facet => NormalVariant::Facet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    #[value(name = "plane_stress", alias = "plane-stress")]
    PlaneStress,
    #[value(name = "plane_strain", alias = "plane-strain")]
    PlaneStrain,
}

impl From<Mode> for ConstitutiveMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::PlaneStress => ConstitutiveMode::PlaneStress,
            Mode::PlaneStrain => ConstitutiveMode::PlaneStrain,
        }
    }
}

/// Everything needed to run one case or a convergence study.
///
/// `r` is the cylinder radius or the torus tube radius; when unset it defaults
/// to 1 for the cylinder and 1/2 for the torus.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub case: Case,
    pub r: Option<f64>,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "R")]
    pub major: f64,
    #[serde(rename = "E")]
    pub young: f64,
    pub nu: f64,
    pub t: f64,
    pub mode: Mode,
    #[serde(rename = "F")]
    pub force: f64,
    pub p: f64,
    pub n: usize,
    pub resolutions: Vec<usize>,
    pub variant: Variant,
    pub quadrature: usize,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub out: PathBuf,
    pub mesh: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: Case::Cylinder,
            r: None,
            length: 4.0,
            major: 1.0,
            young: 100.0,
            nu: 0.5,
            t: 1e-2,
            mode: Mode::PlaneStress,
            force: 1.0,
            p: 1.0,
            n: 32,
            resolutions: vec![16, 32, 64, 128],
            variant: Variant::Interpolated,
            quadrature: 2,
            tol: 1e-10,
            max_iter: None,
            out: PathBuf::from("out"),
            mesh: None,
        }
    }
}

impl RunConfig {
    /// Reads a `key = value` file (TOML syntax); missing keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("config: reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("config: parsing {}", path.display()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn minor_radius(&self) -> f64 {
        self.r.unwrap_or(match self.case {
            Case::Torus => 0.5,
            _ => 1.0,
        })
    }

    pub fn material(&self) -> Result<MaterialModel> {
        MaterialModel::new(self.young, self.nu, self.t, self.mode.into()).context("geometry: material")
    }

    pub fn surface(&self) -> Result<Option<AnalyticSurface>> {
        let surface = match self.case {
            Case::Cylinder => AnalyticSurface::cylinder(self.minor_radius(), self.length),
            Case::Torus => AnalyticSurface::torus(self.major, self.minor_radius()),
            Case::Import => return Ok(None),
        };
        surface.map(Some).context("geometry: surface")
    }

    pub fn solver_options(&self, deflate_translations: bool) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            deflate_translations,
            tikhonov: None,
        }
    }

    /// Checks every parameter against the preconditions of the modules it feeds.
    pub fn validate(&self) -> Result<()> {
        self.material()?;
        self.surface()?;
        QuadratureRule::order(self.quadrature).context("element: quadrature")?;
        ensure!(self.tol > 0.0 && self.tol < 1.0, "solver: tolerance must lie in (0, 1), got {}", self.tol);
        ensure!(self.max_iter != Some(0), "solver: max_iter must be positive");
        ensure!(self.force.is_finite() && self.p.is_finite(), "geometry: load scale must be finite");
        match self.case {
            Case::Import => {
                ensure!(self.mesh.is_some(), "config: the import case needs a mesh path");
            }
            _ => {
                ensure!(self.n >= 3, "mesh: resolution must be at least 3, got {}", self.n);
                ensure!(
                    self.resolutions.iter().all(|&n| n >= 3),
                    "mesh: every resolution must be at least 3"
                );
            }
        }
        Ok(())
    }

    /// Builds the mesh for resolution `n`.
    ///
    /// The cylinder uses `n × n` cells, the torus `2n` toroidal by `n` poloidal cells.
    pub fn build_mesh(&self, n: usize) -> Result<SurfaceMesh> {
        match self.case {
            Case::Cylinder => build_cylinder_mesh(self.minor_radius(), self.length, n, n),
            Case::Torus => build_torus_mesh(self.major, self.minor_radius(), 2 * n, n),
            Case::Import => {
                let path = self.mesh.as_deref().context("config: the import case needs a mesh path")?;
                let format = MeshFormat::from_path(path)
                    .with_context(|| format!("mesh: unknown format for {}", path.display()))?;
                import_mesh(path, format)
            }
        }
        .context("mesh")
    }
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub case: Option<Case>,
    pub r: Option<f64>,
    pub length: Option<f64>,
    pub major: Option<f64>,
    pub young: Option<f64>,
    pub nu: Option<f64>,
    pub t: Option<f64>,
    pub mode: Option<Mode>,
    pub force: Option<f64>,
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub resolutions: Option<Vec<usize>>,
    pub variant: Option<Variant>,
    pub quadrature: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: Option<PathBuf>,
    pub mesh: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(self, mut c: RunConfig) -> RunConfig {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    c.$field = v;
                }
            )*};
        }
        set!(case, length, major, young, nu, t, mode, force, p, n, resolutions, variant, quadrature, tol, out);
        c.r = self.r.or(c.r);
        c.max_iter = self.max_iter.or(c.max_iter);
        c.mesh = self.mesh.or(c.mesh);
        c
    }
}

/// Result of one solve, before anything is written to disk.
#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub mesh: SurfaceMesh,
    pub displacement: Vec<f64>,
    pub field: StressField,
    pub report: SolveReport,
    pub h: f64,
    /// `None` when no closed-form solution exists (imported meshes).
    pub l2_error: Option<f64>,
    pub rotation_fraction: f64,
    pub max_out_of_plane: f64,
    pub constrained: bool,
}

/// Builds, assembles, constrains, solves and post-processes one case.
///
/// `initial_guess` is in global Cartesian components; `None` starts from zero.
pub fn solve_case(config: &RunConfig, n: usize, initial_guess: Option<&[f64]>) -> Result<CaseOutcome> {
    config.validate()?;
    let material = config.material()?;
    let surface = config.surface()?;
    let quad = QuadratureRule::order(config.quadrature)?;
    let variant: NormalVariant = config.variant.into();
    let mesh = config.build_mesh(n)?;

    let exact: Option<Box<dyn ExactSolution>> = match (config.case, &surface) {
        (Case::Cylinder, Some(s)) => Some(Box::new(CylinderPull::new(config.force, &material, s)?)),
        (Case::Torus, Some(s)) => Some(Box::new(TorusPressure::new(config.p, &material, s)?)),
        _ => None,
    };

    let system = match &exact {
        Some(e) => assemble(&mesh, &material, |x: &Vec3| e.load_at(x), &quad, variant),
        None => assemble(&mesh, &material, |_: &Vec3| Vec3::zeros(), &quad, variant).and_then(|mut s| {
            s.rhs = pressure_load(&mesh, config.p, &quad, variant)?;
            Ok(s)
        }),
    }
    .context("assembly")?;

    let constraints = match config.case {
        Case::Cylinder => cylinder_constraints(&mesh).context("assembly: constraints")?,
        Case::Torus => Vec::new(),
        Case::Import => clamp_boundary(&mesh),
    };
    let constrained = !constraints.is_empty();
    let system = apply_constraints(&system, &constraints).context("assembly: constraints")?;

    let solution = solve(&system, &config.solver_options(!constrained), initial_guess).context("solver")?;
    let field = recover_stress(&mesh, &material, &solution.displacement, &quad, variant).context("postprocess")?;
    let l2_error = exact.as_deref().map(|e| stress_l2_error(&field, e));

    Ok(CaseOutcome {
        h: mesh.mesh_size(),
        rotation_fraction: rotation_fraction(mesh.vertices(), &solution.displacement),
        max_out_of_plane: field.max_out_of_plane_ratio(),
        displacement: solution.displacement,
        report: solution.report,
        l2_error,
        field,
        mesh,
        constrained,
    })
}

/// Paths written by a command, in the order they were written.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub paths: Vec<PathBuf>,
}

fn case_name(case: Case) -> &'static str {
    match case {
        Case::Cylinder => "cylinder",
        Case::Torus => "torus",
        Case::Import => "import",
    }
}

fn describe_config(config: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "case = {}", case_name(config.case));
    match config.case {
        Case::Cylinder => {
            let _ = writeln!(s, "r = {}, L = {}, F = {}", config.minor_radius(), config.length, config.force);
        }
        Case::Torus => {
            let _ = writeln!(s, "R = {}, r = {}, p = {}", config.major, config.minor_radius(), config.p);
        }
        Case::Import => {
            let mesh = config.mesh.as_deref().unwrap_or(Path::new(""));
            let _ = writeln!(s, "mesh = {}, p = {}", mesh.display(), config.p);
        }
    }
    let _ = writeln!(
        s,
        "E = {}, nu = {}, t = {}, mode = {:?}, variant = {:?}, quadrature order = {}",
        config.young, config.nu, config.t, config.mode, config.variant, config.quadrature
    );
    s
}

fn describe_outcome(outcome: &CaseOutcome) -> String {
    let mut s = String::new();
    let mesh = &outcome.mesh;
    let _ = writeln!(
        s,
        "vertices = {}, triangles = {}, dofs = {}, h = {:.6e}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        3 * mesh.num_vertices(),
        outcome.h
    );
    let _ = writeln!(
        s,
        "boundary treatment = {}",
        if outcome.constrained { "constrained" } else { "translations deflated" }
    );
    let _ = writeln!(s, "solver: {}", outcome.report);
    let _ = writeln!(s, "rotation fraction of displacement = {:.3e}", outcome.rotation_fraction);
    let _ = writeln!(s, "max |sigma n| / |sigma| = {:.3e}", outcome.max_out_of_plane);
    match outcome.l2_error {
        Some(e) => {
            let _ = writeln!(s, "L2 stress error = {e:.12e}");
        }
        None => {
            let _ = writeln!(s, "L2 stress error = n/a (no exact solution)");
        }
    }
    s
}

/// Runs a single case and writes `solution.vtk` and `report.txt` into `config.out`.
pub fn run_case(config: &RunConfig) -> Result<(CaseOutcome, Artifacts)> {
    let outcome = solve_case(config, config.n, None)?;
    fs::create_dir_all(&config.out).with_context(|| format!("cli: creating {}", config.out.display()))?;

    let vtk = config.out.join(SOLUTION_FILE);
    export_vtk(&outcome.mesh, &outcome.displacement, &outcome.field, &vtk).context("postprocess: VTK export")?;

    let report = config.out.join(REPORT_FILE);
    let mut text = describe_config(config);
    if config.case != Case::Import {
        let _ = writeln!(text, "n = {}", config.n);
    }
    text.push_str(&describe_outcome(&outcome));
    fs::write(&report, text).with_context(|| format!("cli: writing {}", report.display()))?;

    Ok((outcome, Artifacts { paths: vec![vtk, report] }))
}

/// Per-resolution diagnostics kept by a convergence study.
#[derive(Debug, Clone)]
pub struct CaseSummary {
    pub n: usize,
    pub h: f64,
    pub error: f64,
    pub report: SolveReport,
    pub max_out_of_plane: f64,
    pub rotation_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceOutcome {
    pub record: ConvergenceRecord,
    pub cases: Vec<CaseSummary>,
}

/// Solves every resolution in `config.resolutions` and fits the stress-error rate.
///
/// Rows are appended to `convergence.csv` and flushed as soon as each case
/// finishes, so a failing case leaves the partial table on disk.
pub fn run_convergence(config: &RunConfig) -> Result<(ConvergenceOutcome, Artifacts)> {
    config.validate()?;
    ensure!(config.case != Case::Import, "cli: convergence studies need an exact solution");
    ensure!(
        config.resolutions.len() >= 3,
        "cli: need at least 3 resolutions, got {}",
        config.resolutions.len()
    );
    fs::create_dir_all(&config.out).with_context(|| format!("cli: creating {}", config.out.display()))?;

    let csv_path = config.out.join(CONVERGENCE_FILE);
    let mut csv = BufWriter::new(File::create(&csv_path).with_context(|| format!("cli: creating {}", csv_path.display()))?);
    writeln!(csv, "h,error,rate")?;
    csv.flush()?;

    let mut text = describe_config(config);
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut cases = Vec::new();
    for &n in &config.resolutions {
        let outcome = solve_case(config, n, None).with_context(|| format!("resolution n = {n}"))?;
        let error = outcome.l2_error.context("postprocess: missing exact solution")?;
        match samples.last() {
            Some(&(h0, e0)) => writeln!(csv, "{:.12e},{error:.12e},{:.6}", outcome.h, (error / e0).ln() / (outcome.h / h0).ln())?,
            None => writeln!(csv, "{:.12e},{error:.12e},", outcome.h)?,
        }
        csv.flush()?;
        let _ = writeln!(text, "\nn = {n}");
        text.push_str(&describe_outcome(&outcome));
        samples.push((outcome.h, error));
        cases.push(CaseSummary {
            n,
            h: outcome.h,
            error,
            report: outcome.report,
            max_out_of_plane: outcome.max_out_of_plane,
            rotation_fraction: outcome.rotation_fraction,
        });
    }

    let record = convergence_rate(&samples).context("postprocess: rate fit")?;
    let _ = writeln!(
        text,
        "\nfitted slope = {:.6}, fit residual = {:.3e}, errors decreasing = {}",
        record.slope,
        record.residual,
        record.errors_decreasing()
    );
    let report = config.out.join(REPORT_FILE);
    fs::write(&report, text).with_context(|| format!("cli: writing {}", report.display()))?;

    Ok((ConvergenceOutcome { record, cases }, Artifacts { paths: vec![csv_path, report] }))
}

/// Topological and metric summary of the mesh a config would use.
pub fn mesh_info(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let mesh = config.build_mesh(config.n)?;
    let mut s = String::new();
    let _ = writeln!(s, "vertices = {}", mesh.num_vertices());
    let _ = writeln!(s, "triangles = {}", mesh.num_triangles());
    let _ = writeln!(s, "edges = {}", mesh.num_edges());
    let _ = writeln!(s, "euler characteristic = {}", mesh.euler_characteristic());
    let _ = writeln!(s, "area = {:.12e}", mesh.area());
    let _ = writeln!(s, "mesh size h = {:.12e}", mesh.mesh_size());
    let _ = writeln!(s, "boundary loops = {}", mesh.boundary_components().len());
    for c in mesh.boundary_components() {
        let _ = writeln!(s, "  {}: {} vertices", c.label, c.vertices.len());
    }
    if let Some(surface) = config.surface()? {
        let _ = writeln!(s, "exact area = {:.12e}", surface.area());
    }
    Ok(s)
}

/// Rejects configs that would silently ignore flags meant for another case.
pub fn check_case_flags(config: &RunConfig, force_given: bool, pressure_given: bool) -> Result<()> {
    if force_given && config.case != Case::Cylinder {
        bail!("config: --F only applies to the cylinder case");
    }
    if pressure_given && config.case == Case::Cylinder {
        bail!("config: --p does not apply to the cylinder case");
    }
    Ok(())
}
