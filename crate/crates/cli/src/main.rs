use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cwewt::config::preset_json;
use cwewt::mode_model::FringeModel;
use cwewt::potential::{grid_scan, GridSpec};
use cwewt::report::{sweep, sweep_csv, table2_csv, table2_markdown, SweepAxis};
use cwewt::trap_analysis::{find_minimum, minima_map, minima_profile};
use cwewt::{characterize, ConfigFile, GridFormat, Plane, ScanDirection, TrapError, TrapModel, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "cwewt", version, about = "Crossed-waveguide evanescent-wave trap model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full trap characterization of one configuration.
    Characterize {
        #[command(flatten)]
        source: Source,
        /// Also write <name>_report.json here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print JSON instead of the text summary.
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
    },
    /// Potential slices and minima profiles as grid files.
    Scan {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = parse_plane, default_value = "y0x")]
        plane: Plane,
        /// Samples per axis.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FileFormat,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Lateral half-width of the slice, um (default: the rib width).
        #[arg(long)]
        half_width_um: Option<f64>,
        /// Also write minima profiles along l and t and the (y, z) minima map.
        #[arg(long)]
        minima: bool,
    },
    /// Characterize every point of a parameter grid.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// name=a,b,c or name=start:stop:count; repeat for a product grid.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        /// Write <name>_sweep.csv here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary table of several configurations (default: all presets).
    Table2 {
        #[arg(long = "preset")]
        presets: Vec<String>,
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        #[arg(long, value_parser = parse_fringe)]
        fringe: Option<FringeModel>,
        /// csv, json, or Markdown when omitted.
        #[arg(long, value_enum)]
        format: Option<FileFormat>,
    },
    /// List the bundled presets, or write them out as JSON files.
    Presets {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Override the fringe model of every mode.
    #[arg(long, value_parser = parse_fringe)]
    fringe: Option<FringeModel>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

fn parse_plane(s: &str) -> Result<Plane, String> {
    s.parse().map_err(|e: TrapError| e.to_string())
}

fn parse_fringe(s: &str) -> Result<FringeModel, String> {
    s.parse().map_err(|e: TrapError| e.to_string())
}

impl Source {
    fn load(&self) -> cwewt::Result<ConfigFile> {
        let mut file = match (&self.config, &self.preset) {
            (Some(path), _) => ConfigFile::from_file(path)?,
            (None, Some(name)) => ConfigFile::preset(name)?,
            (None, None) => return Err(TrapError::config_field("config", "give --config PATH or --preset NAME")),
        };
        apply_fringe(&mut file, self.fringe);
        Ok(file)
    }
}

fn apply_fringe(file: &mut ConfigFile, fringe: Option<FringeModel>) {
    if let Some(f) = fringe {
        file.blue.fringe_model = f;
        file.red.fringe_model = f;
    }
}

fn write(path: &Path, text: &str) -> cwewt::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn grid_format(f: FileFormat) -> GridFormat {
    match f {
        FileFormat::Csv => GridFormat::Csv,
        FileFormat::Json => GridFormat::Json,
    }
}

fn run(cli: Cli) -> cwewt::Result<()> {
    match cli.command {
        Command::Characterize { source, out, format } => {
            let config = source.load()?.build()?;
            let report = characterize(&config)?;
            let json = report.to_json_string();
            match format {
                Some(ReportFormat::Json) => println!("{json}"),
                _ => print!("{}", report.to_text()),
            }
            if let Some(dir) = out {
                write(&dir.join(format!("{}_report.json", config.name)), &(json + "\n"))?;
            }
        }
        Command::Scan { source, plane, resolution, format, out, half_width_um, minima } => {
            if resolution == 0 {
                return Err(TrapError::invalid("--resolution must be at least 1"));
            }
            let config = source.load()?.build()?;
            let name = config.name.clone();
            let half = half_width_um.map_or(config.geometry.rib_width, |h| h * 1e-6);
            let x_range = config.analysis.column_x_range;
            let model = TrapModel::new(config)?;
            let ext = grid_format(format);
            let mut spec = GridSpec::plane(plane, half, x_range, resolution);
            let needs_minimum = plane == Plane::Y0Z || minima;
            let minimum = if needs_minimum { Some(find_minimum(&model)?) } else { None };
            if let (Plane::Y0Z, Some(m)) = (plane, minimum) {
                spec.origin[0] = m.position[0];
            }
            let grid = grid_scan(&model, &spec, model.config.analysis.execution)?;
            let path = out.join(format!("{name}_{}.{}", plane.name(), ext.extension()));
            write(&path, &match format {
                FileFormat::Csv => grid.to_csv_string(),
                FileFormat::Json => grid.to_json_string(),
            })?;
            if let Some(m) = minimum.filter(|_| minima) {
                for d in [ScanDirection::L, ScanDirection::T] {
                    let profile = minima_profile(&model, &m, d)?;
                    let path = out.join(format!("{name}_minima_{}.{}", d.name(), ext.extension()));
                    write(&path, &match format {
                        FileFormat::Csv => profile.to_csv_string(),
                        FileFormat::Json => profile.to_json_string(),
                    })?;
                }
                let map = minima_map(&model, half, resolution)?;
                let path = out.join(format!("{name}_minima_map.{}", ext.extension()));
                write(&path, &match format {
                    FileFormat::Csv => map.to_csv_string(),
                    FileFormat::Json => map.to_json_string(),
                })?;
            }
        }
        Command::Sweep { source, params, out } => {
            let template = source.load()?;
            let axes = params.iter().map(|p| p.parse()).collect::<cwewt::Result<Vec<SweepAxis>>>()?;
            let rows = sweep(&template, &axes)?;
            let csv = sweep_csv(&axes, &rows);
            match out {
                Some(dir) => write(&dir.join(format!("{}_sweep.csv", template.name)), &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Table2 { presets, configs, fringe, format } => {
            let mut files = Vec::new();
            let names: Vec<String> = if presets.is_empty() && configs.is_empty() {
                PRESET_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                presets
            };
            for n in &names {
                files.push(ConfigFile::preset(n)?);
            }
            for path in &configs {
                files.push(ConfigFile::from_file(path)?);
            }
            let mut reports = Vec::new();
            for mut f in files {
                apply_fringe(&mut f, fringe);
                reports.push(characterize(&f.build()?)?);
            }
            match format {
                Some(FileFormat::Csv) => print!("{}", table2_csv(&reports)),
                Some(FileFormat::Json) => println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize")),
                None => print!("{}", table2_markdown(&reports)),
            }
        }
        Command::Presets { out } => {
            for name in PRESET_NAMES {
                let text = preset_json(name)?;
                let file = ConfigFile::from_json_str(text)?;
                println!("{name}\t{}\t{}", file.hash(), file.description.unwrap_or_default());
                if let Some(dir) = &out {
                    write(&dir.join(format!("{name}.json")), text)?;
                }
            }
        }
    }
    Ok(())
}

fn exit_code(e: &TrapError) -> u8 {
    match e {
        TrapError::Config { .. } | TrapError::Invalid(_) | TrapError::ZeroDetuning { .. } => 2,
        TrapError::NoTrap(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
