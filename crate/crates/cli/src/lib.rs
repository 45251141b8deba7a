//! Command-line front end: build codes, construct and check gadgets, run
//! Monte Carlo sweeps and print ancilla-size reports.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use hommeas::cell2::{
    build_cylinder, build_planar_fig5, build_square, build_torus, close_rough_boundaries, css_of_complex, CellComplex2,
    EdgePath, TorusLoop,
};
use hommeas::cover::{build_covering_ancilla, verify_cellmap, PeriodicComplex, WidthPolicy};
use hommeas::csscode::{CodeFile, CssCode, DistanceEstimate};
use hommeas::f2la::{subspace_leq, BitVec};
use hommeas::gadget::{
    code_distances, effective_x_distance, from_cellmap, measured_group, name_coset, shor_gadget,
    stabilizer_preservation_check, steane_gadget, CatShape, EffectiveDistance, GadgetBundle, HomGadget,
};
use hommeas::simproto::{run_homomorphic, run_shor_repeated, DecoderKind, NoiseModel};

#[derive(Parser, Debug)]
#[command(name = "hommeas", version, about = "Homomorphic logical measurement toolkit")]
pub struct Cli {
    /// JSON file with default values for any flag; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a cellulation and its code.
    Build(ExperimentConfig),
    /// Construct a gadget (or check a saved bundle) and print its report.
    Gadget(ExperimentConfig),
    /// Monte Carlo sweep over a noise grid, written as CSV.
    Simulate(ExperimentConfig),
    /// Exact or bounded code distances.
    Distance(ExperimentConfig),
    /// Ancilla sizes for every loop preset.
    Report(ExperimentConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Torus,
    Cylinder,
    PlanarFig5,
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    /// Covering-space ancilla around a torus loop.
    Cover,
    /// Cat state on the loop's support.
    Shor,
    /// Transversal copy of the data code.
    Steane,
    /// Planar patch with two rough segments closed.
    Planar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// The same p for data, ancilla residual and readout flips.
    Uniform,
    /// Readout flips only.
    Readout,
}

/// Every setting, from flags or a JSON file.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    /// Torus size or planar patch distance.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Cylinder circumference.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    /// Cylinder height.
    #[arg(long = "h")]
    #[serde(rename = "h", skip_serializing_if = "Option::is_none")]
    pub height: Option<usize>,
    /// Loop preset: Z1, Z2, Z1Z2 or Z1Z2-fig8.
    #[arg(long = "loop")]
    #[serde(rename = "loop", skip_serializing_if = "Option::is_none")]
    pub loop_preset: Option<String>,
    /// Explicit loop as comma-separated edge indices.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk: Option<String>,
    /// "auto" or a fixed width.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<String>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<GadgetKind>,
    /// Noise grid: "a:b:log10[:points]", "a:b:lin:points" or "p1,p2,...".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseMode>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// "exact" or "union-find".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoder: Option<String>,
    /// Repeated cat-state rounds with majority vote (Shor bundles only).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Weight limit for distance and effective-distance searches.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Sizes for `report`, comma-separated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<String>,
    /// Input gadget bundle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<PathBuf>,
    /// Input code file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<PathBuf>,
    /// Input complex file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv_out: Option<PathBuf>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($f:ident),*) => {
        ExperimentConfig { $($f: $top.$f.or($base.$f),)* }
    };
}

impl ExperimentConfig {
    /// Fields set here win over `base`.
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        overlay!(
            self,
            base,
            shape,
            d,
            c,
            height,
            loop_preset,
            walk,
            width,
            kind,
            p,
            noise,
            trials,
            seed,
            decoder,
            rounds,
            budget,
            sizes,
            bundle,
            code,
            complex,
            complex_out,
            code_out,
            bundle_out,
            report_out,
            csv_out
        )
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn decoder_kind(&self) -> Result<DecoderKind> {
        self.decoder
            .as_deref()
            .map_or(Ok(DecoderKind::Exact), |s| s.parse().map_err(|e: String| anyhow!(e)))
    }

    fn width_policy(&self) -> Result<WidthPolicy> {
        match self.width.as_deref() {
            None | Some("auto") => Ok(WidthPolicy::Auto),
            Some(s) => s
                .parse()
                .map(WidthPolicy::Fixed)
                .map_err(|_| anyhow!("width must be 'auto' or an integer, got '{s}'")),
        }
    }
}

/// Parses a single command line and runs it, writing human output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let base = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    match cli.command {
        Command::Build(c) => cmd_build(&c.over(base), out),
        Command::Gadget(c) => cmd_gadget(&c.over(base), out),
        Command::Simulate(c) => cmd_simulate(&c.over(base), out),
        Command::Distance(c) => cmd_distance(&c.over(base), out),
        Command::Report(c) => cmd_report(&c.over(base), out),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn build_shape(cfg: &ExperimentConfig) -> Result<CellComplex2> {
    let shape = cfg.shape.unwrap_or(Shape::Torus);
    let complex = match shape {
        Shape::Torus => build_torus(cfg.d.unwrap_or(3))?,
        Shape::Cylinder => build_cylinder(cfg.c.unwrap_or(3), cfg.height.unwrap_or(3))?,
        Shape::PlanarFig5 => build_planar_fig5(cfg.d.unwrap_or(3))?,
        Shape::Square => build_square(),
    };
    Ok(complex)
}

fn distance_pair(code: &CssCode, budget: Option<usize>) -> Result<(DistanceEstimate, DistanceEstimate)> {
    if code.k() == 0 {
        bail!("code encodes no logical qubits");
    }
    Ok(code_distances(code, budget.unwrap_or(code.n()))?)
}

fn nkd(code: &CssCode, z: DistanceEstimate, x: DistanceEstimate) -> String {
    let d = DistanceEstimate {
        lower: z.lower.min(x.lower),
        upper: z.upper.min(x.upper),
    };
    format!("[[{},{},{}]]", code.n(), code.k(), d)
}

pub fn cmd_build(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let complex = build_shape(cfg)?;
    let code = css_of_complex(&complex);
    if let Some(p) = &cfg.complex_out {
        write_json(p, &complex)?;
    }
    if let Some(p) = &cfg.code_out {
        write_json(p, &code.to_file())?;
    }
    if code.k() == 0 {
        writeln!(out, "[[{},0]]", code.n())?;
        return Ok(());
    }
    let (z, x) = distance_pair(&code, cfg.budget)?;
    writeln!(out, "{}  d_z={} d_x={}", nkd(&code, z, x), z, x)?;
    Ok(())
}

pub fn cmd_distance(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let code = if let Some(p) = &cfg.code {
        CssCode::from_file(&read_json::<CodeFile>(p)?)?
    } else if let Some(p) = &cfg.complex {
        css_of_complex(&read_json::<CellComplex2>(p)?)
    } else {
        css_of_complex(&build_shape(cfg)?)
    };
    let (z, x) = distance_pair(&code, cfg.budget)?;
    writeln!(out, "{}", nkd(&code, z, x))?;
    writeln!(out, "d_z = {z}")?;
    writeln!(out, "d_x = {x}")?;
    Ok(())
}

fn parse_walk(complex: &CellComplex2, text: &str) -> Result<EdgePath> {
    let edges: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| anyhow!("bad edge index '{s}'")))
        .collect::<Result<_>>()?;
    let first = *edges.first().ok_or_else(|| anyhow!("empty walk"))?;
    let ends = *complex
        .edges()
        .get(first)
        .ok_or_else(|| anyhow!("edge {first} out of range"))?;
    let path =
        EdgePath::from_edges(complex, ends[0], &edges).or_else(|_| EdgePath::from_edges(complex, ends[1], &edges))?;
    if !path.is_closed(complex) {
        bail!("walk does not return to its start");
    }
    Ok(path)
}

fn resolve_loop(cfg: &ExperimentConfig, torus: &CellComplex2, d: usize) -> Result<(String, EdgePath)> {
    if let Some(w) = &cfg.walk {
        return Ok(("walk".to_string(), parse_walk(torus, w)?));
    }
    let name = cfg.loop_preset.as_deref().unwrap_or("Z1");
    let preset = TorusLoop::parse(name).ok_or_else(|| anyhow!("unknown loop preset '{name}'"))?;
    Ok((preset.name().to_string(), preset.walk(d)))
}

/// A constructed gadget plus the context its report needs.
pub struct Built {
    pub gadget: HomGadget,
    pub kind: String,
    pub loop_name: Option<String>,
    /// Weight of the measured operator.
    pub w: usize,
    pub width: Option<usize>,
    pub warnings: Vec<String>,
    pub named: Vec<(String, BitVec)>,
}

fn torus_names(d: usize) -> Vec<(String, BitVec)> {
    [TorusLoop::Z1, TorusLoop::Z2]
        .iter()
        .map(|l| (l.name().to_string(), l.walk(d).edge_vector(2 * d * d)))
        .collect()
}

fn basis_names(code: &CssCode) -> Vec<(String, BitVec)> {
    code.logicals()
        .z
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("L{i}"), v.clone()))
        .collect()
}

/// Largest weight among the measured-group generators.
fn measured_weight(g: &HomGadget) -> usize {
    measured_group(g)
        .basis
        .row_vecs()
        .iter()
        .map(BitVec::weight)
        .max()
        .unwrap_or(0)
}

pub fn build_gadget(cfg: &ExperimentConfig) -> Result<Built> {
    if let Some(p) = &cfg.bundle {
        let bundle: GadgetBundle = read_json(p)?;
        let gadget = bundle.to_gadget()?;
        let w = measured_weight(&gadget);
        let named = basis_names(&gadget.data);
        return Ok(Built {
            gadget,
            kind: "bundle".into(),
            loop_name: None,
            w,
            width: None,
            warnings: Vec::new(),
            named,
        });
    }
    let kind = cfg.kind.unwrap_or(GadgetKind::Cover);
    let d = cfg.d.unwrap_or(3);
    match kind {
        GadgetKind::Cover => {
            let torus = PeriodicComplex::torus(d)?;
            let (name, path) = resolve_loop(cfg, &torus.complex, d)?;
            let cover = build_covering_ancilla(&torus, &path, cfg.width_policy()?)?;
            let gadget = from_cellmap(cover.map)?;
            Ok(Built {
                gadget,
                kind: "cover".into(),
                loop_name: Some(name),
                w: path.len(),
                width: Some(cover.width),
                warnings: cover.warnings,
                named: torus_names(d),
            })
        }
        GadgetKind::Shor => {
            let torus = build_torus(d)?;
            let (name, path) = resolve_loop(cfg, &torus, d)?;
            let support = path.edge_vector(torus.num_edges());
            let gadget = shor_gadget(&css_of_complex(&torus), &support, CatShape::Circle)?;
            Ok(Built {
                w: support.weight(),
                gadget,
                kind: "shor".into(),
                loop_name: Some(name),
                width: None,
                warnings: Vec::new(),
                named: torus_names(d),
            })
        }
        GadgetKind::Steane => {
            let complex = build_shape(cfg)?;
            let code = css_of_complex(&complex);
            let named = if cfg.shape.unwrap_or(Shape::Torus) == Shape::Torus {
                torus_names(d)
            } else {
                basis_names(&code)
            };
            let gadget = steane_gadget(&code)?;
            Ok(Built {
                w: measured_weight(&gadget),
                gadget,
                kind: "steane".into(),
                loop_name: None,
                width: None,
                warnings: Vec::new(),
                named,
            })
        }
        GadgetKind::Planar => {
            let data = build_planar_fig5(d)?;
            let ancilla = close_rough_boundaries(&data, &["west", "east-south"])?;
            let gadget = from_cellmap(hommeas::cover::CellMap::same_cells(ancilla, data))?;
            let w = measured_weight(&gadget);
            let named = basis_names(&gadget.data);
            Ok(Built {
                gadget,
                kind: "planar".into(),
                loop_name: None,
                w,
                width: None,
                warnings: Vec::new(),
                named,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasuredEntry {
    /// Data qubits of `Γv`.
    pub qubits: Vec<usize>,
    /// The same operator as complex edges, when the gadget has a cell map.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<usize>>,
    /// Sum of named logicals in the same coset ("1" for a stabilizer).
    pub coset: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GadgetReport {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loop_name: Option<String>,
    pub n: usize,
    pub m: usize,
    pub k_data: usize,
    pub k_ancilla: usize,
    pub d_data: DistanceEstimate,
    pub d_ancilla_z: DistanceEstimate,
    pub d_ancilla_x: DistanceEstimate,
    pub z_check_condition: bool,
    pub x_check_condition: bool,
    pub stabilizers_preserved: bool,
    /// Zero residuals in the chain-map check, when a cell map exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_map_commutes: Option<bool>,
    /// Rows of Γ with weight at least two (ancilla sheets folding onto one data edge).
    pub multi_cover_rows: usize,
    pub measured: Vec<MeasuredEntry>,
    pub effective_x_distance: Option<EffectiveDistance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_x_distance_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    pub w: usize,
    /// `m·d / (n·w)`.
    pub size_ratio: f64,
    pub warnings: Vec<String>,
}

pub fn gadget_report(b: &Built, budget: Option<usize>) -> Result<GadgetReport> {
    let g = &b.gadget;
    let (dz, dx) = distance_pair(&g.data, budget)?;
    let d_data = DistanceEstimate {
        lower: dz.lower.min(dx.lower),
        upper: dz.upper.min(dx.upper),
    };
    let (d_ancilla_z, d_ancilla_x) = if g.ancilla.k() > 0 {
        distance_pair(&g.ancilla, budget)?
    } else {
        (DistanceEstimate::exact(0), DistanceEstimate::exact(0))
    };
    let z_ok = subspace_leq(&g.ancilla.h_z().mul(&g.gamma.transpose())?, g.data.h_z())?;
    let x_ok = subspace_leq(&g.data.h_x().mul(&g.gamma)?, g.ancilla.h_x())?;
    let preserved = stabilizer_preservation_check(g).is_ok();
    let commutes = g
        .origin
        .as_ref()
        .map(|m| verify_cellmap(m).is_ok_and(|c| c.residual_faces.is_zero() && c.residual_edges.is_zero()));
    let qubit_edges = g.origin.as_ref().map(|m| m.target.qubit_edges());
    let named: Vec<(&str, BitVec)> = b.named.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    let mg = measured_group(g);
    let measured = mg
        .basis
        .row_vecs()
        .iter()
        .map(|row| MeasuredEntry {
            qubits: row.support().collect(),
            edges: qubit_edges.as_ref().map(|qe| row.support().map(|q| qe[q]).collect()),
            coset: name_coset(&g.data, row, &named).map(|names| {
                if names.is_empty() {
                    "1".to_string()
                } else {
                    names.join("·")
                }
            }),
        })
        .collect();
    let (eff, eff_err) = match effective_x_distance(g, budget) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let multi = (0..g.gamma.rows()).filter(|&r| g.gamma.row_weight(r) >= 2).count();
    let (n, m) = g.gamma.shape();
    let ratio = (m * d_data.upper) as f64 / (n * b.w.max(1)) as f64;
    Ok(GadgetReport {
        kind: b.kind.clone(),
        loop_name: b.loop_name.clone(),
        n,
        m,
        k_data: g.data.k(),
        k_ancilla: g.ancilla.k(),
        d_data,
        d_ancilla_z,
        d_ancilla_x,
        z_check_condition: z_ok,
        x_check_condition: x_ok,
        stabilizers_preserved: preserved,
        chain_map_commutes: commutes,
        multi_cover_rows: multi,
        measured,
        effective_x_distance: eff,
        effective_x_distance_error: eff_err,
        width: b.width,
        w: b.w,
        size_ratio: ratio,
        warnings: b.warnings.clone(),
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn render_report(r: &GadgetReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "gadget: {}{}",
        r.kind,
        r.loop_name.as_ref().map(|l| format!(" ({l})")).unwrap_or_default()
    );
    let _ = writeln!(s, "data:    n = {}, k = {}, d = {}", r.n, r.k_data, r.d_data);
    let _ = writeln!(
        s,
        "ancilla: m = {}, k' = {}, d_z' = {}, d_x' = {}{}",
        r.m,
        r.k_ancilla,
        r.d_ancilla_z,
        r.d_ancilla_x,
        r.width.map(|w| format!(", width = {w}")).unwrap_or_default()
    );
    let _ = writeln!(s, "Z-check condition: {}", yes(r.z_check_condition));
    let _ = writeln!(s, "X-check condition: {}", yes(r.x_check_condition));
    let _ = writeln!(s, "stabilizer group preserved: {}", yes(r.stabilizers_preserved));
    if let Some(c) = r.chain_map_commutes {
        let _ = writeln!(s, "chain map commutes: {}", yes(c));
    }
    let _ = writeln!(s, "rows of Γ with weight ≥ 2: {}", r.multi_cover_rows);
    let _ = writeln!(s, "measured group rank: {}", r.measured.len());
    for (i, e) in r.measured.iter().enumerate() {
        let coset = e.coset.as_deref().unwrap_or("?");
        let _ = writeln!(s, "  generator {i}: {coset}  qubits {:?}", e.qubits);
    }
    match (&r.effective_x_distance, &r.effective_x_distance_error) {
        (Some(e), _) => match e.value {
            Some(v) => {
                let _ = writeln!(s, "effective X-distance: {v} (bound min(d, d') = {})", e.bound);
            }
            None => {
                let _ = writeln!(
                    s,
                    "effective X-distance: ≥ {} (search limit reached; bound {})",
                    e.lower_bound, e.bound
                );
            }
        },
        (None, Some(err)) => {
            let _ = writeln!(s, "effective X-distance: FAILED: {err}");
        }
        (None, None) => {}
    }
    let _ = writeln!(
        s,
        "size: m = {}, n = {}, w = {}, d = {}, m·d/(n·w) = {:.4}",
        r.m, r.n, r.w, r.d_data.upper, r.size_ratio
    );
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

pub fn cmd_gadget(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let built = build_gadget(cfg)?;
    let report = gadget_report(&built, cfg.budget)?;
    out.write_all(render_report(&report).as_bytes())?;
    let valid = report.z_check_condition && report.x_check_condition && report.stabilizers_preserved;
    if !valid {
        bail!("gadget failed validation; no bundle written");
    }
    if let Some(p) = &cfg.bundle_out {
        write_json(p, &GadgetBundle::from_gadget(&built.gadget))?;
    }
    if let Some(p) = &cfg.report_out {
        write_json(p, &report)?;
    }
    if let Some(err) = &report.effective_x_distance_error {
        bail!("effective X-distance check failed: {err}");
    }
    Ok(())
}

/// Expands a noise grid: a comma list, or `start:stop:scale[:points]`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let tidy = |x: f64| -> f64 { format!("{x:.9e}").parse().expect("formatted float parses") };
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow!("bad probability '{s}'")))
            .collect::<Result<Vec<_>>>()?,
        [a, b, scale, rest @ ..] => {
            let a: f64 = a.parse().map_err(|_| anyhow!("bad grid start '{a}'"))?;
            let b: f64 = b.parse().map_err(|_| anyhow!("bad grid end '{b}'"))?;
            let points: usize = match rest {
                [] => 5,
                [k] => k.parse().map_err(|_| anyhow!("bad point count '{k}'"))?,
                _ => bail!("too many fields in grid '{text}'"),
            };
            if points == 0 {
                bail!("grid needs at least one point");
            }
            let t = |i: usize| {
                if points == 1 {
                    0.0
                } else {
                    i as f64 / (points - 1) as f64
                }
            };
            match *scale {
                "log10" | "log" => {
                    if a <= 0.0 || b <= 0.0 {
                        bail!("log grid needs positive endpoints");
                    }
                    let (la, lb) = (a.log10(), b.log10());
                    (0..points).map(|i| tidy(10f64.powf(la + (lb - la) * t(i)))).collect()
                }
                "lin" => (0..points).map(|i| tidy(a + (b - a) * t(i))).collect(),
                other => bail!("unknown grid scale '{other}'"),
            }
        }
        _ => bail!("cannot parse noise grid '{text}'"),
    };
    if let Some(bad) = values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        bail!("probability {bad} outside [0, 1]");
    }
    Ok(values)
}

pub const CSV_HEADER: &str = "p,trials,readout_errors,data_errors,rate,ci_low,ci_high,seed";

pub fn cmd_simulate(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let grid = parse_grid(cfg.p.as_deref().unwrap_or("0.01"))?;
    let trials = cfg.trials.unwrap_or(10_000);
    let seed = cfg.seed();
    let kind = cfg.decoder_kind()?;
    let built = build_gadget(cfg)?;
    let g = &built.gadget;
    let shor = cfg.rounds.is_some();

    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_HEADER.split(',').collect();
    if shor {
        header.push("predicted_rate");
    }
    csv.write_record(&header)?;
    if trials > 0 {
        for &p in &grid {
            if let Some(rounds) = cfg.rounds {
                if (0..g.gamma.cols()).any(|j| g.gamma.column(j).weight() != 1) {
                    bail!("--rounds needs a cat-state bundle (one data qubit per ancilla qubit)");
                }
                let support = (0..g.gamma.cols()).fold(BitVec::zeros(g.data.n()), |acc, j| acc.xor(&g.gamma.column(j)));
                let s = run_shor_repeated(&g.data, &support, p, rounds, trials, seed)?;
                let (lo, hi) = hommeas::simproto::wilson_interval(s.trials - s.correct, s.trials);
                let predicted = if rounds == 1 {
                    format!("{:.8}", 1.0 - s.single_round_prediction())
                } else {
                    String::new()
                };
                csv.write_record([
                    p.to_string(),
                    s.trials.to_string(),
                    (s.trials - s.correct).to_string(),
                    "0".into(),
                    format!("{:.8}", 1.0 - s.accuracy()),
                    format!("{lo:.8}"),
                    format!("{hi:.8}"),
                    seed.to_string(),
                    predicted,
                ])?;
            } else {
                let noise = match cfg.noise.unwrap_or(NoiseMode::Uniform) {
                    NoiseMode::Uniform => NoiseModel::uniform(p, seed),
                    NoiseMode::Readout => NoiseModel {
                        p_meas: p,
                        ..NoiseModel::uniform(0.0, seed)
                    },
                };
                let s = run_homomorphic(g, &noise, trials, kind)?;
                let (lo, hi) = s.readout_interval();
                csv.write_record([
                    p.to_string(),
                    s.trials.to_string(),
                    s.readout_errors.to_string(),
                    s.data_errors.to_string(),
                    format!("{:.8}", s.readout_rate()),
                    format!("{lo:.8}"),
                    format!("{hi:.8}"),
                    seed.to_string(),
                ])?;
            }
        }
    }
    let csv = csv
        .into_inner()
        .map_err(|e| anyhow::anyhow!("flushing CSV: {}", e.error()))?;
    match &cfg.csv_out {
        Some(path) => std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?,
        None => out.write_all(&csv)?,
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SizeRow {
    pub preset: String,
    pub d: usize,
    pub width: usize,
    pub m: usize,
    pub n: usize,
    pub w: usize,
    pub ratio: f64,
}

/// Ancilla size for every preset loop at each torus size.
pub fn size_rows(sizes: &[usize], width: WidthPolicy) -> Result<Vec<SizeRow>> {
    let mut rows = Vec::new();
    for &d in sizes {
        let torus = PeriodicComplex::torus(d)?;
        for preset in TorusLoop::ALL {
            let path = preset.walk(d);
            let cover = build_covering_ancilla(&torus, &path, width)?;
            let m = cover.ancilla.qubit_edges().len();
            let n = 2 * d * d;
            let w = path.len();
            rows.push(SizeRow {
                preset: preset.name().to_string(),
                d,
                width: cover.width,
                m,
                n,
                w,
                ratio: (m * d) as f64 / (n * w) as f64,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_report(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let sizes: Vec<usize> = match &cfg.sizes {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| anyhow!("bad size '{t}'")))
            .collect::<Result<_>>()?,
        None => vec![3, 5],
    };
    let rows = size_rows(&sizes, cfg.width_policy()?)?;
    let mut text = String::from("preset,d,width,m,n,w,m*d/(n*w)\n");
    for r in &rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{:.4}",
            r.preset, r.d, r.width, r.m, r.n, r.w, r.ratio
        );
    }
    out.write_all(text.as_bytes())?;
    if let Some(p) = &cfg.report_out {
        write_json(p, &rows)?;
    }
    Ok(())
}
