//! Command-line front end. The `fmcw-resp` binary is a thin wrapper over
//! [`run`].
//!
//! Exit codes: 0 success, 1 usage or invalid configuration, 2 I/O or file
//! format, 3 processing.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{
    self, read_recording, write_detections_jsonl, write_summary_json, RecordingWriter, RunConfig,
};
use crate::pipeline::{run_threaded, write_trace_csv, StreamSummary};
use crate::radar::ModulePreset;
use crate::range::{write_profile_header, write_profile_row};
use crate::sim::{BreathingTarget, Scene, SceneSimulator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_PROCESSING: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fmcw-resp", version, about = "FMCW radar respiration monitoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a scene into an IQ recording and a ground-truth CSV.
    Simulate(SimulateArgs),
    /// Process a recording into a trace CSV, detections JSONL and summary.
    Process(ProcessArgs),
    /// Simulate and process concurrently, printing live JSON lines.
    Monitor(MonitorArgs),
    /// Measure throughput and per-frame latency.
    Bench(BenchArgs),
    /// List module presets.
    Presets,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Run config (TOML). Falls back to $FMCW_RESP_CONFIG, then defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Module preset, overriding the config file.
    #[arg(long)]
    preset: Option<ModulePreset>,
}

#[derive(Args, Debug, Clone)]
struct SceneArgs {
    /// Scene file (TOML). Defaults to one breathing target in default clutter.
    #[arg(long)]
    scene: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Scene duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Target range in metres (default scene only).
    #[arg(long)]
    range: Option<f64>,
    /// Target aspect angle in degrees (default scene only).
    #[arg(long)]
    angle: Option<f64>,
    /// Breathing rate in Hz (default scene only).
    #[arg(long)]
    rate: Option<f64>,
    /// Clutter and noise only.
    #[arg(long)]
    empty: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[command(flatten)]
    scene: SceneArgs,
    /// Output data file; the header and truth CSV are written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ProcessArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Recording data file (its `.hdr` sidecar must exist).
    recording: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also write the range waterfall CSV.
    #[arg(long)]
    waterfall: bool,
}

#[derive(Args, Debug)]
struct MonitorArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[command(flatten)]
    scene: SceneArgs,
    /// Seconds of slow time between printed lines.
    #[arg(long, default_value_t = 1.0)]
    every: f64,
    /// Pace the producer at the chirp interval.
    #[arg(long)]
    realtime: bool,
    /// Also write the full trace CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[command(flatten)]
    scene: SceneArgs,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) | Error::InvalidArgument(_) | Error::OutOfRange { .. } => EXIT_USAGE,
        Error::Io(_) | Error::CorruptFile { .. } | Error::UnsupportedVersion(_) | Error::Format { .. } => {
            EXIT_IO
        }
        Error::Ordering { .. } | Error::InsufficientData { .. } => EXIT_PROCESSING,
    }
}

fn dispatch(cmd: Command, out: &mut impl Write) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a, out),
        Command::Process(a) => process(a, out),
        Command::Monitor(a) => monitor(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Presets => presets(out),
    }
}

fn run_config(a: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::resolve(a.config.as_deref())?;
    if let Some(p) = a.preset {
        cfg.preset = p;
        cfg.radar = None;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn build_scene(a: &SceneArgs) -> Result<Scene> {
    let mut scene = match &a.scene {
        Some(p) => Scene::load(p)?,
        None => {
            let mut t = BreathingTarget::default();
            if let Some(r) = a.range {
                t.range_m = r;
            }
            if let Some(phi) = a.angle {
                t.aspect_angle_deg = phi;
            }
            if let Some(f) = a.rate {
                t.breath_rate_hz = f;
            }
            Scene::breathing(t, 60.0, 1)
        }
    };
    if a.scene.is_some() && (a.range.is_some() || a.angle.is_some() || a.rate.is_some()) {
        return Err(Error::argument("--range/--angle/--rate apply to the default scene only"));
    }
    if a.empty {
        scene.targets.clear();
    }
    if let Some(s) = a.seed {
        scene.noise_seed = s;
    }
    if let Some(d) = a.duration {
        scene.duration_s = d;
    }
    Ok(scene)
}

fn truth_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().map_or_else(|| "recording".into(), |s| s.to_string_lossy().into_owned());
    data.with_file_name(format!("{stem}_truth.csv"))
}

fn simulate(a: SimulateArgs, out: &mut impl Write) -> Result<()> {
    let cfg = run_config(&a.cfg)?;
    let scene = build_scene(&a.scene)?;
    let sim = SceneSimulator::new(cfg.radar_config(), scene)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut writer = RecordingWriter::create(&a.out, sim.header())?;
    let truth_file = truth_path(&a.out);
    let mut truth = Vec::with_capacity(sim.n_chirps() as usize);
    for i in 0..sim.n_chirps() {
        writer.write_frame(&sim.synth_frame(i)?)?;
        truth.push(sim.truth(i));
    }
    let header = writer.finish()?;
    io::write_truth_csv(BufWriter::new(File::create(&truth_file)?), &truth)?;
    writeln!(
        out,
        "wrote {} chirps to {} (header {}, truth {})",
        header.n_chirps,
        a.out.display(),
        io::header_path(&a.out).display(),
        truth_file.display()
    )?;
    Ok(())
}

fn summary_line(s: &StreamSummary) -> String {
    match s.best() {
        Some(t) => format!(
            "presence=true rate_bpm={:.2} range_m={:.3} target_id={} frames={} dropped={}",
            t.rate_bpm.unwrap_or(f64::NAN),
            t.range_m,
            t.target_id,
            s.frames_processed,
            s.frames_dropped
        ),
        None => format!(
            "presence=false frames={} dropped={}",
            s.frames_processed, s.frames_dropped
        ),
    }
}

fn process(a: ProcessArgs, out: &mut impl Write) -> Result<()> {
    let mut cfg = run_config(&a.cfg)?;
    let (header, frames) = read_recording(&a.recording)?;
    // the recording defines the radar
    cfg.radar = Some(header.radar);
    let mut processor = cfg.processor()?;
    std::fs::create_dir_all(&a.out)?;
    let mut waterfall = if a.waterfall {
        Some(BufWriter::new(File::create(a.out.join("waterfall.csv"))?))
    } else {
        None
    };
    let mut dets = BufWriter::new(File::create(a.out.join("detections.jsonl"))?);
    let mut rows = Vec::new();
    let mut wrote_header = false;
    for frame in frames {
        let f = processor.process_frame(&frame?);
        if let (Some(w), Some(p)) = (waterfall.as_mut(), f.profile.as_ref()) {
            if !wrote_header {
                write_profile_header(w, p.len(), processor.bin_spacing_m())?;
                wrote_header = true;
            }
            write_profile_row(w, p)?;
        }
        write_detections_jsonl(&mut dets, &f.detections)?;
        rows.extend(f.rows);
    }
    if let Some(mut w) = waterfall {
        if !wrote_header {
            write_profile_header(&mut w, 0, processor.bin_spacing_m())?;
        }
        w.flush()?;
    }
    dets.flush()?;
    let (tail, summary) = processor.finish();
    rows.extend(tail);
    let mut trace = BufWriter::new(File::create(a.out.join("trace.csv"))?);
    write_trace_csv(&mut trace, &rows)?;
    trace.flush()?;
    write_summary_json(BufWriter::new(File::create(a.out.join("summary.json"))?), &summary)?;
    writeln!(out, "{}", summary_line(&summary))?;
    Ok(())
}

fn monitor(a: MonitorArgs, out: &mut impl Write) -> Result<()> {
    let cfg = run_config(&a.cfg)?;
    let scene = build_scene(&a.scene)?;
    let sim = SceneSimulator::new(cfg.radar_config(), scene)?;
    let interval = Duration::from_secs_f64(cfg.radar_config().chirp_interval_s);
    let every = a.every.max(cfg.radar_config().chirp_interval_s);
    let start = Instant::now();
    let realtime = a.realtime;
    let frames = (0..sim.n_chirps()).map(|i| {
        if realtime {
            let due = interval * i as u32;
            if let Some(wait) = due.checked_sub(start.elapsed()) {
                std::thread::sleep(wait);
            }
        }
        sim.synth_frame(i).expect("index within scene")
    });
    let mut next_print: std::collections::HashMap<u64, f64> = Default::default();
    let mut all_rows = Vec::new();
    let mut io_err = None;
    let keep_rows = a.out.is_some();
    let (tail, summary, dropped) = run_threaded(
        cfg.processor()?,
        frames,
        cfg.queue.capacity,
        cfg.queue.policy,
        |_, f| {
            for r in &f.rows {
                let due = next_print.entry(r.target_id).or_insert(0.0);
                if r.t_slow + 1e-9 < *due || io_err.is_some() {
                    continue;
                }
                while r.t_slow + 1e-9 >= *due {
                    *due += every;
                }
                let line = serde_json::json!({
                    "t_slow": r.t_slow,
                    "target_id": r.target_id,
                    "range_bin": r.bin,
                    "envelope": r.envelope,
                    "rate_bpm": r.rate_bpm,
                    "presence": r.presence,
                });
                if let Err(e) = writeln!(out, "{line}") {
                    io_err = Some(e);
                }
            }
            if keep_rows {
                all_rows.extend(f.rows);
            }
        },
    );
    if let Some(e) = io_err {
        return Err(e.into());
    }
    all_rows.extend(tail);
    if let Some(path) = &a.out {
        let mut w = BufWriter::new(File::create(path)?);
        write_trace_csv(&mut w, &all_rows)?;
        w.flush()?;
    }
    let mut line = serde_json::json!({ "summary": summary, "queue_dropped": dropped });
    line["best"] = serde_json::to_value(summary.best()).expect("summary serializes");
    writeln!(out, "{line}")?;
    Ok(())
}

fn bench(a: BenchArgs, out: &mut impl Write) -> Result<()> {
    let cfg = run_config(&a.cfg)?;
    let scene = build_scene(&a.scene)?;
    let report = io::bench(&cfg, &scene)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    writeln!(out, "{text}")?;
    if let Some(p) = &a.out {
        std::fs::write(p, format!("{text}\n"))?;
    }
    Ok(())
}

fn presets(out: &mut impl Write) -> Result<()> {
    for p in ModulePreset::ALL {
        let c = p.config();
        writeln!(
            out,
            "{:<11} carrier {:.0} GHz, bandwidth {:.0} GHz, resolution {:.3} m, max range {:.2} m, {} samples/chirp, aperture {} deg",
            p.name(),
            c.carrier_hz / 1e9,
            c.bandwidth_hz / 1e9,
            c.range_resolution()?,
            c.max_unambiguous_range(),
            c.samples_per_chirp,
            c.beam_aperture_deg
        )?;
    }
    Ok(())
}
