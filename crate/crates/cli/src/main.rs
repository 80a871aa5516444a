//! `fusedet` command-line front-end.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use fusedet::dsp::{cube_to_pointcloud, AdcCube, ChannelCalibration};
use fusedet::harness::{
    default_params, evaluate, render_frame_svg, train_default_params, DatasetConfig, DetectionLog,
    Mode, Pipeline, PipelineConfig, RenderOptions,
};
use fusedet::io::load_toml;
use fusedet::pointcloud::{read_points_csv, write_points_csv, RadarPoint};
use fusedet::simulator::{
    builtin_scene, emit_radar, generate_frame, FrameTruth, RadarEmission, RadarMode, SceneSpec,
    BUILTIN_SCENES,
};

const SEED_ENV: &str = "FUSEDET_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "fusedet",
    version,
    about = "Camera + mmWave radar person detection: simulate, detect, train, evaluate, render"
)]
struct Cli {
    /// pipeline configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// overrides the scene seed; falls back to $FUSEDET_SEED
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// fusion | image-only | radar-only
    #[arg(long, global = true)]
    mode: Option<String>,
    /// scenes processed concurrently (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write truth and sensor data for scenes
    Simulate(SimulateArgs),
    /// Run the detection pipeline and write detection logs
    Detect(DetectArgs),
    /// Train refinement-head parameters on simulated scenes
    Train(TrainArgs),
    /// Score detection logs
    Eval(EvalArgs),
    /// Draw frames of a detection log as SVG
    Render(RenderArgs),
    /// Convert ADC files to a point-cloud CSV
    Dsp(DspArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// built-in scene names or scene TOML files
    #[arg(required = true)]
    scenes: Vec<String>,
    /// emit raw ADC cubes instead of point clouds
    #[arg(long)]
    adc: bool,
}

#[derive(Args, Debug)]
struct DetectArgs {
    /// built-in scene names or scene TOML files
    #[arg(required = true)]
    scenes: Vec<String>,
    /// recorded point-cloud CSV used instead of simulated radar (one scene only)
    #[arg(long)]
    points: Option<PathBuf>,
    /// disable multi-frame occlusion recovery
    #[arg(long)]
    no_multiframe: bool,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// dataset configuration (TOML); defaults cover every built-in scene
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// output file name inside --out
    #[arg(long, default_value = "params.toml")]
    name: String,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// detection log CSV files
    #[arg(required = true)]
    logs: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    iou: f64,
}

#[derive(Args, Debug)]
struct RenderArgs {
    log: PathBuf,
    /// first frame (inclusive)
    #[arg(long, default_value_t = 0)]
    from: usize,
    /// last frame (exclusive); defaults to the end of the log
    #[arg(long)]
    to: Option<usize>,
    #[arg(long)]
    show_truth: bool,
    #[arg(long)]
    no_stickman: bool,
    #[arg(long)]
    light_background: bool,
}

#[derive(Args, Debug)]
struct DspArgs {
    /// ADC files, one per frame in the given order
    #[arg(required = true)]
    adc: Vec<PathBuf>,
    /// output file name inside --out
    #[arg(long, default_value = "points.csv")]
    name: String,
}

struct Globals {
    cfg_path: Option<PathBuf>,
    seed: Option<u64>,
    out: PathBuf,
    mode: Option<Mode>,
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let ctx = match context(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Usage-level validation: anything failing here exits with 1.
fn context(cli: &Cli) -> Result<Globals> {
    let mode = cli
        .mode
        .as_deref()
        .map(str::parse::<Mode>)
        .transpose()
        .map_err(|e| anyhow!("--mode: {e}"))?;
    let seed = match cli.seed {
        Some(s) => Some(s),
        None => match std::env::var(SEED_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|e| anyhow!("{SEED_ENV}='{v}': {e}"))?,
            ),
            Err(_) => None,
        },
    };
    Ok(Globals {
        cfg_path: cli.config.clone(),
        seed,
        out: cli.out.clone(),
        mode,
        jobs: cli.jobs,
    })
}

fn run(ctx: &Globals, cmd: Command) -> Result<()> {
    fs::create_dir_all(&ctx.out)
        .with_context(|| format!("creating output directory {}", ctx.out.display()))?;
    match cmd {
        Command::Simulate(a) => simulate(ctx, a),
        Command::Detect(a) => detect(ctx, a),
        Command::Train(a) => train(ctx, a),
        Command::Eval(a) => eval(ctx, a),
        Command::Render(a) => render(ctx, a),
        Command::Dsp(a) => dsp(ctx, a),
    }
}

/// Configuration with referenced camera/detector files already merged in.
fn pipeline_config(ctx: &Globals) -> Result<PipelineConfig> {
    Ok(pipeline(ctx)?.config().clone())
}

fn pipeline(ctx: &Globals) -> Result<Pipeline> {
    let p = match &ctx.cfg_path {
        Some(path) => Pipeline::from_file(path)?,
        None => Pipeline::new(PipelineConfig::default(), default_params()?)?,
    };
    Ok(match ctx.mode {
        Some(m) => p.with_mode(m),
        None => p,
    })
}

fn load_scene(ctx: &Globals, arg: &str) -> Result<SceneSpec> {
    let mut spec = if BUILTIN_SCENES.contains(&arg) {
        builtin_scene(arg)?
    } else {
        let path = Path::new(arg);
        if !path.exists() {
            bail!("'{arg}' is neither a built-in scene {BUILTIN_SCENES:?} nor a file");
        }
        let spec: SceneSpec = load_toml(path)?;
        spec.validate()
            .with_context(|| format!("scene {}", path.display()))?;
        spec
    };
    if let Some(s) = ctx.seed {
        spec.seed = s;
    }
    Ok(spec)
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_truth_csv<W: Write>(w: W, frames: &[FrameTruth]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "frame",
        "time",
        "lighting",
        "target_id",
        "x",
        "y",
        "z",
        "vx",
        "vy",
        "vz",
        "radial_velocity",
        "width",
        "height",
        "thickness",
        "u_min",
        "v_min",
        "u_max",
        "v_max",
        "occlusion",
    ])?;
    let f = |v: f64| format!("{v:.6}");
    for fr in frames {
        for t in &fr.targets {
            let b2 = t
                .box2d
                .map(|b| [f(b.u_min), f(b.v_min), f(b.u_max), f(b.v_max)])
                .unwrap_or_default();
            let mut row = vec![
                fr.frame.to_string(),
                f(fr.time),
                f(fr.lighting),
                t.id.to_string(),
            ];
            row.extend(t.position.map(f));
            row.extend(t.velocity.map(f));
            row.push(f(t.radial_velocity));
            row.extend([t.box3d.w, t.box3d.h, t.box3d.t].map(f));
            row.extend(b2);
            row.push(f(t.occlusion));
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn simulate(ctx: &Globals, a: SimulateArgs) -> Result<()> {
    let cfg = pipeline_config(ctx)?;
    let specs = a
        .scenes
        .iter()
        .map(|s| load_scene(ctx, s))
        .collect::<Result<Vec<_>>>()?;
    let mode = if a.adc {
        RadarMode::Adc
    } else {
        cfg.radar_mode
    };
    thread_pool(ctx.jobs)?.install(|| {
        specs.par_iter().try_for_each(|spec| -> Result<()> {
            let dir = ctx.out.join(&spec.name);
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("scene.toml"), spec.to_toml_string()?)?;
            let mut truth = Vec::with_capacity(spec.duration);
            let mut points = Vec::new();
            if mode == RadarMode::Adc {
                fs::create_dir_all(dir.join("adc"))?;
            }
            for f in 0..spec.duration {
                let t = generate_frame(spec, &cfg.camera, f)?;
                match emit_radar(&t, spec, mode, &cfg.radar)? {
                    RadarEmission::Points(p) => points.push((f, p)),
                    RadarEmission::Adc(cube) => {
                        let path = dir.join("adc").join(format!("frame_{f:05}.adc"));
                        let mut w = create(&path)?;
                        cube.write_to(&mut w)?;
                        w.flush()?;
                    }
                }
                truth.push(t);
            }
            write_truth_csv(create(&dir.join("truth.csv"))?, &truth)?;
            if mode == RadarMode::Points {
                let mut w = create(&dir.join("points.csv"))?;
                write_points_csv(&mut w, &points)?;
                w.flush()?;
            }
            println!(
                "{}: {} frames -> {}",
                spec.name,
                spec.duration,
                dir.display()
            );
            Ok(())
        })
    })
}

fn detect(ctx: &Globals, a: DetectArgs) -> Result<()> {
    let pipe = pipeline(ctx)?.with_multiframe(!a.no_multiframe);
    let specs = a
        .scenes
        .iter()
        .map(|s| load_scene(ctx, s))
        .collect::<Result<Vec<_>>>()?;
    let recorded = match &a.points {
        Some(p) => {
            if specs.len() != 1 {
                bail!("--points takes exactly one scene");
            }
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Some(
                read_points_csv::<f64, _>(BufReader::new(f))
                    .with_context(|| format!("reading {}", p.display()))?,
            )
        }
        None => None,
    };
    let mode = pipe.config().mode;
    let paths = thread_pool(ctx.jobs)?.install(|| {
        specs
            .par_iter()
            .map(|spec| -> Result<PathBuf> {
                let log = match &recorded {
                    Some(r) => pipe.run_recorded(spec, r)?,
                    None => pipe.run(spec)?,
                };
                let path = ctx.out.join(format!("{}_{}.csv", spec.name, mode));
                let mut w = create(&path)?;
                log.write_csv(&mut w)?;
                w.flush()?;
                Ok(path)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn train(ctx: &Globals, a: TrainArgs) -> Result<()> {
    let cfg = pipeline_config(ctx)?;
    let mut ds: DatasetConfig = match &a.dataset {
        Some(p) => load_toml(p)?,
        None => DatasetConfig::default(),
    };
    if let Some(s) = ctx.seed {
        ds.seed_base = s;
    }
    let (params, report) = train_default_params(&cfg, &ds)?;
    let path = ctx.out.join(&a.name);
    fs::write(&path, params.to_toml_string()?)
        .with_context(|| format!("writing {}", path.display()))?;
    println!(
        "loss {:.6} -> {:.6} (best epoch {}) -> {}",
        report.initial_loss,
        report.final_loss,
        report.best_epoch,
        path.display()
    );
    Ok(())
}

fn read_log(path: &Path) -> Result<DetectionLog> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    DetectionLog::read_csv(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn eval(ctx: &Globals, a: EvalArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&a.iou) {
        bail!("--iou must lie in [0, 1], got {}", a.iou);
    }
    for path in &a.logs {
        let log = read_log(path)?;
        let report = evaluate(&log, a.iou);
        print!("{}", report.summary());
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "log".into());
        let out = ctx.out.join(format!("{stem}.report.toml"));
        fs::write(&out, report.to_toml_string()?)
            .with_context(|| format!("writing {}", out.display()))?;
        println!("  report -> {}", out.display());
    }
    Ok(())
}

fn render(ctx: &Globals, a: RenderArgs) -> Result<()> {
    let log = read_log(&a.log)?;
    let cam = pipeline(ctx)?.config().camera.clone();
    let to = a.to.unwrap_or(log.frames.len()).min(log.frames.len());
    if a.from >= to {
        bail!(
            "empty frame range [{}, {to}) for a log of {} frames",
            a.from,
            log.frames.len()
        );
    }
    let opts = RenderOptions {
        image_size: cam.image_size,
        stickman: !a.no_stickman,
        dark_background: !a.light_background,
        show_truth: a.show_truth,
        ..RenderOptions::default()
    };
    for fr in &log.frames[a.from..to] {
        let path = ctx.out.join(format!("frame_{:05}.svg", fr.frame));
        fs::write(&path, render_frame_svg(fr, &opts))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{} frames -> {}", to - a.from, ctx.out.display());
    Ok(())
}

fn dsp(ctx: &Globals, a: DspArgs) -> Result<()> {
    let cfg = pipeline_config(ctx)?;
    let clouds = thread_pool(ctx.jobs)?.install(|| {
        a.adc
            .par_iter()
            .enumerate()
            .map(|(i, path)| -> Result<(usize, Vec<RadarPoint<f64>>)> {
                let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                let cube = AdcCube::<f64>::read_from(BufReader::new(f))
                    .with_context(|| format!("reading {}", path.display()))?;
                let cal = ChannelCalibration::identity(cube.n_channels());
                let pts = cube_to_pointcloud(&cube, &cal, &cfg.pointcloud)
                    .with_context(|| format!("processing {}", path.display()))?;
                Ok((i, pts))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let path = ctx.out.join(&a.name);
    let mut w = create(&path)?;
    write_points_csv(&mut w, &clouds)?;
    w.flush()?;
    let n: usize = clouds.iter().map(|(_, p)| p.len()).sum();
    println!("{} frames, {n} points -> {}", clouds.len(), path.display());
    Ok(())
}
