//! Command-line front end: generate data, tune, train, classify, vote, evaluate, render.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::data_io::{
    gen_synthetic, load_model, read_class_raster, read_raster, read_samples_csv, render_ppm,
    save_model, write_class_raster, write_raster, write_samples_csv, ClassPalette, ModelFile,
    SyntheticConfig,
};
use crate::ensemble::{combine_maps, disagreement, train_ensemble, MemberSpec};
use crate::error::{Error, Result};
use crate::evaluation::compare_maps;
use crate::kernels::Kernel;
use crate::model_selection::{
    evaluate_cell, grid_search_cv, stratified_kfold, GridSpec, KernelFamily,
};
use crate::multiclass::train_multiclass;
use crate::svm::SolverSettings;

#[derive(Debug, Parser)]
#[command(
    name = "landcover-svm",
    version,
    about = "SVM committee land cover classification"
)]
pub struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic scene: samples.csv, scene.hdr, reference.hdr, palette.txt.
    Gensynth(GensynthArgs),
    /// Grid-search C and kernel parameters by stratified k-fold cross-validation.
    Cv(CvArgs),
    /// Train a one-vs-one multiclass SVM.
    Train(TrainArgs),
    /// Classify a raster with a multiclass or ensemble model.
    Classify(ClassifyArgs),
    /// Train the linear / RBF / quadratic committee.
    EnsembleTrain(EnsembleTrainArgs),
    /// Combine two or more class maps by per-pixel majority vote.
    Vote(VoteArgs),
    /// Error matrix, overall accuracy and kappa of a predicted map against a reference map.
    Evaluate(EvaluateArgs),
    /// Render a class map to a binary PPM image.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GensynthArgs {
    /// Directory for the generated files (created if missing).
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Random seed; equal seeds give byte-identical output.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of land cover classes.
    #[arg(long, default_value_t = 5)]
    pub classes: usize,
    /// Spectral bands per pixel.
    #[arg(long, default_value_t = 6)]
    pub bands: usize,
    /// Training samples per class.
    #[arg(long, default_value_t = 60)]
    pub per_class: usize,
    /// Spectral signatures per class.
    #[arg(long, default_value_t = 2)]
    pub modes: usize,
    /// Class means are drawn from [-spread, spread] per band.
    #[arg(long, default_value_t = 4.0)]
    pub spread: f64,
    /// Standard deviation of the per-band Gaussian noise.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    /// Scene height in pixels.
    #[arg(long, default_value_t = 64)]
    pub rows: usize,
    /// Scene width in pixels.
    #[arg(long, default_value_t = 64)]
    pub cols: usize,
    /// Voronoi regions in the scene.
    #[arg(long, default_value_t = 30)]
    pub regions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Linear,
    Rbf,
    Quadratic,
    Polynomial,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Stop when the maximal KKT violation falls below this.
    #[arg(long, default_value_t = 1e-3)]
    pub kkt_tolerance: f64,
    /// Cap on solver passes per binary problem, one pass being n pair updates (0 = max(10·n, 1000)).
    #[arg(long, default_value_t = 0)]
    pub max_passes: usize,
}

impl SolverArgs {
    fn settings(&self) -> SolverSettings {
        SolverSettings {
            kkt_tolerance: self.kkt_tolerance,
            max_passes: (self.max_passes > 0).then_some(self.max_passes),
            ..SolverSettings::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Kernel family.
    #[arg(long, value_enum)]
    pub kernel: KernelArg,
    /// RBF gamma (default 1/bands).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Polynomial degree (`polynomial` kernel only; `quadratic` is degree 2).
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Polynomial scale.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Polynomial offset.
    #[arg(long, default_value_t = 1.0)]
    pub coef0: f64,
}

impl KernelArgs {
    fn kernel(&self, bands: usize) -> Result<Kernel> {
        match self.kernel {
            KernelArg::Linear => Ok(Kernel::Linear),
            KernelArg::Rbf => Kernel::rbf(self.gamma.unwrap_or(1.0 / bands as f64)),
            KernelArg::Quadratic => Kernel::polynomial(2, self.scale, self.coef0),
            KernelArg::Polynomial => Kernel::polynomial(self.degree, self.scale, self.coef0),
        }
    }
}

#[derive(Debug, Args)]
pub struct CvArgs {
    /// Training samples CSV: one column per band, then a class-name label column.
    #[arg(long)]
    pub samples: PathBuf,
    /// Kernel family to search.
    #[arg(long, value_enum)]
    pub kernel: KernelArg,
    /// Comma-separated C values.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0])]
    pub c_grid: Vec<f64>,
    /// Comma-separated gamma values (RBF only).
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
    pub gamma_grid: Vec<f64>,
    /// Comma-separated polynomial offsets (polynomial and quadratic only).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    pub coef0_grid: Vec<f64>,
    /// Polynomial degree (`polynomial` kernel only).
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Polynomial scale.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Number of stratified folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Seed for the fold assignment.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write the full JSON table here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training samples CSV: one column per band, then a class-name label column.
    #[arg(long)]
    pub samples: PathBuf,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Cost parameter.
    #[arg(long, default_value_t = 10.0)]
    pub c: f64,
    /// Output model file (JSON).
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Multiclass or ensemble model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Input raster header (`.hdr`).
    #[arg(long)]
    pub raster: PathBuf,
    /// Output class map header (`.hdr`; data goes to `.img`).
    #[arg(long)]
    pub out: PathBuf,
    /// For ensemble models, also write each member's map as `<prefix><name>.hdr`.
    #[arg(long)]
    pub member_prefix: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnsembleTrainArgs {
    /// Training samples CSV: one column per band, then a class-name label column.
    #[arg(long)]
    pub samples: PathBuf,
    /// Output ensemble model file (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Cost parameter shared by all members.
    #[arg(long, default_value_t = 10.0)]
    pub c: f64,
    /// RBF member gamma (default 1/bands).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Quadratic member offset.
    #[arg(long, default_value_t = 1.0)]
    pub coef0: f64,
    /// `none`, `cv-kappa`, or a comma-separated list such as `1,2,1`.
    #[arg(long, default_value = "none")]
    pub weights: String,
    /// Folds for `--weights cv-kappa`.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Seed for the `cv-kappa` fold assignment.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct VoteArgs {
    /// Class map headers, in member order (earliest wins ties).
    #[arg(required = true, num_args = 2..)]
    pub maps: Vec<PathBuf>,
    /// Output class map header.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-map weights, comma-separated; simple majority when absent.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Reference class map header.
    #[arg(long)]
    pub reference: PathBuf,
    /// Predicted class map header, with the same shape and classes.
    #[arg(long)]
    pub predicted: PathBuf,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Class map header.
    #[arg(long)]
    pub map: PathBuf,
    /// `classname R G B` per line; defaults to a built-in palette.
    #[arg(long)]
    pub palette: Option<PathBuf>,
    /// Output image (binary PPM).
    #[arg(long)]
    pub out: PathBuf,
}

/// Clap command tree, for help rendering.
pub fn command() -> clap::Command {
    Cli::command()
}

struct Ctx<'a> {
    out: &'a mut (dyn Write + Send),
    verbose: bool,
}

impl Ctx<'_> {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn say(&mut self, msg: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", msg.as_ref()).map_err(|e| Error::io("<stdout>", e))
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// normal output to `out`. Returns the process exit status.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(cli: Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let mut ctx = Ctx {
        out,
        verbose: cli.verbose,
    };
    pool.install(|| dispatch(cli.command, &mut ctx))
}

fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> Result<()> {
    match command {
        Command::Gensynth(a) => gensynth(a, ctx),
        Command::Cv(a) => cv(a, ctx),
        Command::Train(a) => train(a, ctx),
        Command::Classify(a) => classify(a, ctx),
        Command::EnsembleTrain(a) => ensemble_train(a, ctx),
        Command::Vote(a) => vote(a, ctx),
        Command::Evaluate(a) => evaluate(a, ctx),
        Command::Render(a) => render(a, ctx),
    }
}

fn gensynth(a: GensynthArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let cfg = SyntheticConfig {
        seed: a.seed,
        classes: a.classes,
        bands: a.bands,
        per_class: a.per_class,
        modes: a.modes,
        spread: a.spread,
        noise_std: a.noise,
        rows: a.rows,
        cols: a.cols,
        regions: a.regions,
    };
    let scene = gen_synthetic(&cfg)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let dir = &a.out_dir;
    write_samples_csv(&scene.samples, dir.join("samples.csv"))?;
    write_raster(&scene.raster, dir.join("scene.hdr"))?;
    write_class_raster(&scene.reference, dir.join("reference.hdr"))?;
    ClassPalette::default_for(scene.samples.classes()).write(dir.join("palette.txt"))?;
    ctx.say(format!(
        "wrote {} samples, {}x{}x{} scene, reference map and palette to {}",
        scene.samples.len(),
        cfg.rows,
        cfg.cols,
        cfg.bands,
        dir.display()
    ))
}

fn cv(a: CvArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let samples = read_samples_csv(&a.samples)?;
    let family = match a.kernel {
        KernelArg::Linear => KernelFamily::Linear,
        KernelArg::Rbf => KernelFamily::Rbf,
        KernelArg::Quadratic => KernelFamily::Polynomial {
            degree: 2,
            scale: a.scale,
        },
        KernelArg::Polynomial => KernelFamily::Polynomial {
            degree: a.degree,
            scale: a.scale,
        },
    };
    let grid = GridSpec {
        c_values: a.c_grid,
        gamma_values: a.gamma_grid,
        coef0_values: a.coef0_grid,
        folds: a.folds,
        seed: a.seed,
    };
    ctx.log(format!("cross-validating {} samples", samples.len()));
    let result = grid_search_cv(&samples, family, &grid, &a.solver.settings())?;
    if let Some(path) = &a.out {
        write_text(path, &result.to_json())?;
    }
    ctx.say(result.to_text().trim_end())
}

fn train(a: TrainArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let samples = read_samples_csv(&a.samples)?;
    let kernel = a.kernel.kernel(samples.dim())?;
    ctx.log(format!("training {kernel} on {} samples", samples.len()));
    let model = train_multiclass(&samples, kernel, a.c, &a.solver.settings())?;
    save_model(&ModelFile::Multiclass(model), &a.out)?;
    ctx.say(format!(
        "wrote {kernel} model (C={}) to {}",
        a.c,
        a.out.display()
    ))
}

fn classify(a: ClassifyArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let model = load_model(&a.model)?;
    let raster = read_raster(&a.raster)?;
    match model {
        ModelFile::Multiclass(m) => {
            let result = m.classify_raster(&raster)?;
            write_class_raster(&result.map, &a.out)?;
            ctx.say(format!(
                "wrote {} ({} unclassified pixels)",
                a.out.display(),
                result.unclassified
            ))
        }
        ModelFile::Ensemble(e) => {
            let pred = e.predict_raster(&raster)?;
            write_class_raster(&pred.final_map, &a.out)?;
            if let Some(prefix) = &a.member_prefix {
                for (member, map) in e.members.iter().zip(&pred.member_maps) {
                    write_class_raster(map, format!("{prefix}{}.hdr", member.name))?;
                }
            }
            ctx.say(format!(
                "wrote {} ({} unclassified pixels, {} tie-broken pixels)",
                a.out.display(),
                pred.unclassified,
                pred.ties
            ))
        }
    }
}

enum WeightMode {
    None,
    CvKappa,
    Fixed(Vec<f64>),
}

fn parse_weights(s: &str) -> Result<WeightMode> {
    match s {
        "none" => Ok(WeightMode::None),
        "cv-kappa" => Ok(WeightMode::CvKappa),
        list => list
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad weight `{w}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(WeightMode::Fixed),
    }
}

fn ensemble_train(a: EnsembleTrainArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let samples = read_samples_csv(&a.samples)?;
    let gamma = a.gamma.unwrap_or(1.0 / samples.dim() as f64);
    let specs = vec![
        MemberSpec::new("linear", Kernel::Linear, a.c),
        MemberSpec::new("rbf", Kernel::rbf(gamma)?, a.c),
        MemberSpec::new("quadratic", Kernel::polynomial(2, 1.0, a.coef0)?, a.c),
    ];
    let settings = a.solver.settings();
    let weights = match parse_weights(&a.weights)? {
        WeightMode::None => None,
        WeightMode::Fixed(w) => Some(w),
        WeightMode::CvKappa => {
            let folds = stratified_kfold(&samples, a.folds, a.seed)?;
            let mut w = Vec::with_capacity(specs.len());
            for spec in &specs {
                let kappas = evaluate_cell(&samples, &folds, spec.kernel, spec.c, &settings)?;
                let mean = kappas.iter().sum::<f64>() / kappas.len() as f64;
                ctx.log(format!("{}: cv kappa {mean:.4}", spec.name));
                w.push(mean);
            }
            Some(w)
        }
    };
    let ensemble = train_ensemble(&samples, &specs, &settings)?.with_weights(weights)?;
    save_model(&ModelFile::Ensemble(ensemble.clone()), &a.out)?;
    let weights = ensemble
        .weights
        .as_ref()
        .map_or("equal".to_string(), |w| format!("{w:?}"));
    ctx.say(format!(
        "wrote ensemble [{}] (weights {weights}) to {}",
        ensemble.names().join(", "),
        a.out.display()
    ))
}

fn vote(a: VoteArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let maps = a
        .maps
        .iter()
        .map(read_class_raster)
        .collect::<Result<Vec<_>>>()?;
    let (fused, ties) = combine_maps(&maps, a.weights.as_deref(), Default::default())?;
    write_class_raster(&fused, &a.out)?;
    if ctx.verbose {
        for (i, row) in disagreement(&maps)?.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
            ctx.log(format!("disagreement[{i}] = {}", cells.join(" ")));
        }
    }
    ctx.say(format!(
        "wrote {} ({} maps, {} tie-broken pixels)",
        a.out.display(),
        maps.len(),
        ties
    ))
}

fn evaluate(a: EvaluateArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let reference = read_class_raster(&a.reference)?;
    let predicted = read_class_raster(&a.predicted)?;
    let report = compare_maps(&reference, &predicted)?.report()?;
    if let Some(path) = &a.json {
        write_text(path, &report.to_json())?;
    }
    ctx.say(report.to_text().trim_end())
}

fn render(a: RenderArgs, ctx: &mut Ctx<'_>) -> Result<()> {
    let map = read_class_raster(&a.map)?;
    let palette = match &a.palette {
        Some(p) => ClassPalette::read(p)?,
        None => ClassPalette::default_for(map.classes()),
    };
    render_ppm(&map, &palette, &a.out)?;
    ctx.say(format!("wrote {}", a.out.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
