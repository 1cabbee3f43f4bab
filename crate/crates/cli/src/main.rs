//! Command-line front end: instance generation, solving, lower bounds,
//! exact evaluation, benchmark sweeps, and CSV reporting.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 internal.

mod config;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::{average_line, csv_document, BenchmarkRow, CSV_HEADER};
use std::fmt;
use std::path::{Path, PathBuf};
use tscflp::engine::{run as engine_run, EngineConfig, Mode};
use tscflp::evaluator::{evaluate_exact, lp_lower_bound};
use tscflp::heuristics::mih;
use tscflp::instance::{generate_instance, Individual, Instance};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Validation(msg) | CliError::Internal(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl From<tscflp::Error> for CliError {
    fn from(err: tscflp::Error) -> Self {
        match err {
            tscflp::Error::Io(io) => CliError::Internal(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "tscflp",
    version,
    about = "Two-stage capacitated facility location: benchmark generator and hybrid evolutionary solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Algo {
    /// Surrogate-assisted hybrid evolutionary algorithm.
    #[default]
    HeaFa,
    /// Exact-evaluation genetic algorithm baseline.
    BaselineGa,
}

impl Algo {
    fn mode(self) -> Mode {
        match self {
            Algo::HeaFa => Mode::HeaFa,
            Algo::BaselineGa => Mode::BaselineGa,
        }
    }
}

/// Engine settings shared by the solving commands. Defaults come from the
/// library, then the config file, then these flags.
#[derive(Args, Clone)]
struct EngineFlags {
    /// Plain key=value settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Population size.
    #[arg(long)]
    pop_size: Option<usize>,
    /// Maximum number of iterations.
    #[arg(long)]
    t_max: Option<usize>,
    /// Stop after this many non-improving iterations.
    #[arg(long)]
    t_nip: Option<usize>,
}

impl EngineFlags {
    fn build(&self, seed: u64, mode: Mode) -> Result<EngineConfig, CliError> {
        let mut cfg = EngineConfig::new(seed);
        if let Some(path) = &self.config {
            config::apply_config_file(&mut cfg, path)?;
        }
        if let Some(np) = self.pop_size {
            cfg = cfg.with_population_size(np);
        }
        if let Some(t) = self.t_max {
            cfg.max_iterations = t;
        }
        if let Some(t) = self.t_nip {
            cfg.max_stall = t;
        }
        cfg.mode = mode;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance and write it as JSON.
    Gen {
        /// Benchmark class.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        class: u8,
        /// Number of plants (depots and customers scale with it).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        plants: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the LP-relaxation lower bound of an instance.
    Lb { instance: PathBuf },
    /// Evaluate an open/close mask exactly.
    Eval {
        instance: PathBuf,
        /// Plant mask as a 0/1 string, e.g. 1011.
        #[arg(long, conflicts_with = "all_open")]
        plants_mask: Option<String>,
        /// Depot mask as a 0/1 string.
        #[arg(long, conflicts_with = "all_open")]
        depots_mask: Option<String>,
        /// Evaluate with every facility open.
        #[arg(long)]
        all_open: bool,
        /// Repair the mask to feasibility before evaluating.
        #[arg(long)]
        repair: bool,
    },
    /// Solve one instance file and emit a benchmark row.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::HeaFa)]
        algo: Algo,
        /// Independent runs; seeds are seed, seed+1, ...
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write header + row to this CSV file.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Generate and solve a grid of instances, writing a CSV report.
    Bench {
        /// Classes to include.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1u8, 2, 3, 4, 5],
              value_parser = clap::value_parser!(u8).range(1..=5))]
        classes: Vec<u8>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        plants: u64,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        instances_per_class: u64,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Algo::HeaFa)]
        algo: Algo,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Population-size sweep emitting per-size means.
    Sweep {
        /// Population sizes to try.
        #[arg(long, value_delimiter = ',', required = true)]
        pop_sizes: Vec<usize>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=5))]
        class: u8,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        plants: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        instances: u64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Algo::HeaFa)]
        algo: Algo,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        engine: EngineFlags,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            std::process::exit(0);
        }
        Err(err) => {
            eprint!("{err}");
            std::process::exit(1);
        }
    };
    if let Err(err) = dispatch(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.code());
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen {
            class,
            plants,
            seed,
            out,
        } => cmd_gen(class, plants as usize, seed, &out),
        Command::Lb { instance } => {
            let inst = load_instance(&instance)?;
            let lb = lp_lower_bound(&inst)?;
            println!("{lb:.1}");
            Ok(())
        }
        Command::Eval {
            instance,
            plants_mask,
            depots_mask,
            all_open,
            repair,
        } => cmd_eval(&instance, plants_mask, depots_mask, all_open, repair),
        Command::Solve {
            instance,
            algo,
            runs,
            seed,
            out_csv,
            engine,
        } => cmd_solve(
            &instance,
            algo,
            runs as usize,
            seed,
            out_csv.as_deref(),
            &engine,
        ),
        Command::Bench {
            classes,
            plants,
            instances_per_class,
            runs,
            seed,
            algo,
            out,
            engine,
        } => cmd_bench(
            &classes,
            plants as usize,
            instances_per_class as usize,
            runs as usize,
            seed,
            algo,
            &out,
            &engine,
        ),
        Command::Sweep {
            pop_sizes,
            class,
            plants,
            instances,
            runs,
            seed,
            algo,
            out,
            engine,
        } => cmd_sweep(
            &pop_sizes,
            class,
            plants as usize,
            instances as usize,
            runs as usize,
            seed,
            algo,
            &out,
            &engine,
        ),
    }
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::load(path).map_err(|err| match err {
        tscflp::Error::Io(io) => {
            CliError::Validation(format!("cannot read {}: {io}", path.display()))
        }
        other => other.into(),
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn cmd_gen(class: u8, plants: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let inst = generate_instance(class, plants, seed)?;
    inst.save(out)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", out.display())))?;
    let demand = inst.total_demand() as f64;
    println!(
        "wrote {}: class {class}, {} plants, {} depots, {} customers",
        out.display(),
        inst.n_plants,
        inst.n_depots,
        inst.n_customers
    );
    println!(
        "total demand {}; plant capacity {:.2}x demand, depot capacity {:.2}x demand",
        inst.total_demand(),
        inst.total_plant_capacity() as f64 / demand,
        inst.total_depot_capacity() as f64 / demand
    );
    Ok(())
}

fn parse_mask(text: &str, expected_len: usize, what: &str) -> Result<Vec<bool>, CliError> {
    let bits: Option<Vec<bool>> = text
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect();
    let bits =
        bits.ok_or_else(|| CliError::Validation(format!("{what} mask must be a 0/1 string")))?;
    if bits.len() != expected_len {
        return Err(CliError::Validation(format!(
            "{what} mask has {} bits, instance needs {expected_len}",
            bits.len()
        )));
    }
    Ok(bits)
}

fn cmd_eval(
    path: &Path,
    plants_mask: Option<String>,
    depots_mask: Option<String>,
    all_open: bool,
    repair: bool,
) -> Result<(), CliError> {
    let inst = load_instance(path)?;
    let mut ind = if all_open {
        Individual::all_open(inst.n_plants, inst.n_depots)
    } else {
        let plants = plants_mask.ok_or_else(|| {
            CliError::Usage("provide --plants-mask and --depots-mask, or --all-open".into())
        })?;
        let depots = depots_mask.ok_or_else(|| {
            CliError::Usage("provide --plants-mask and --depots-mask, or --all-open".into())
        })?;
        Individual::new(
            parse_mask(&plants, inst.n_plants, "plant")?,
            parse_mask(&depots, inst.n_depots, "depot")?,
        )
    };
    if repair {
        ind = mih(&inst, &ind);
    }
    let sol = evaluate_exact(&inst, &ind)?;
    let transport = sol.flows.cost;
    println!("objective {}", sol.objective);
    println!("fixed {}", sol.objective - transport);
    println!("transport {transport}");
    Ok(())
}

/// Solve one instance `runs` times with consecutive seeds and fold the
/// outcomes into a benchmark row.
fn solve_rows(
    inst: &Instance,
    class_label: String,
    index: usize,
    algo: Algo,
    runs: usize,
    seed: u64,
    engine: &EngineFlags,
) -> Result<BenchmarkRow, CliError> {
    let lb = lp_lower_bound(inst)?;
    let mut objectives = Vec::with_capacity(runs);
    let mut time_s = 0.0;
    for r in 0..runs as u64 {
        let cfg = engine.build(seed + r, algo.mode())?;
        let report = engine_run(inst, &cfg)?;
        objectives.push(report.best_objective);
        time_s += report.wall_time_seconds;
    }
    BenchmarkRow::from_objectives(class_label, index, lb, &objectives, time_s, seed)
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn cmd_solve(
    path: &Path,
    algo: Algo,
    runs: usize,
    seed: u64,
    out_csv: Option<&Path>,
    engine: &EngineFlags,
) -> Result<(), CliError> {
    let inst = load_instance(path)?;
    let label = inst.meta.class_id.to_string();
    let row = solve_rows(&inst, label, 0, algo, runs, seed, engine)?;
    println!("{CSV_HEADER}");
    println!("{}", row.csv_line());
    println!("({} runs from seed {})", row.runs, row.seed_base);
    if let Some(out) = out_csv {
        write_file(out, &format!("{CSV_HEADER}\n{}\n", row.csv_line()))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    classes: &[u8],
    plants: usize,
    instances_per_class: usize,
    runs: usize,
    seed: u64,
    algo: Algo,
    out: &Path,
    engine: &EngineFlags,
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for &class in classes {
        for index in 0..instances_per_class {
            let gen_seed = seed + 1000 * class as u64 + index as u64;
            let inst = generate_instance(class, plants, gen_seed)?;
            let row = solve_rows(&inst, class.to_string(), index, algo, runs, seed, engine)?;
            println!("{}", row.csv_line());
            rows.push(row);
        }
    }
    write_file(out, &csv_document(&rows))?;
    println!("{}", average_line(&rows));
    println!(
        "bench: {} instances solved, report written to {}",
        rows.len(),
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    pop_sizes: &[usize],
    class: u8,
    plants: usize,
    instances: usize,
    runs: usize,
    seed: u64,
    algo: Algo,
    out: &Path,
    engine: &EngineFlags,
) -> Result<(), CliError> {
    let mut doc = String::from("pop_size,z_avg,rpd_avg,time_s\n");
    for &np in pop_sizes {
        let mut z_sum = 0.0;
        let mut rpd_sum = 0.0;
        let mut time_s = 0.0;
        let mut samples = 0usize;
        for index in 0..instances {
            let gen_seed = seed + 1000 * class as u64 + index as u64;
            let inst = generate_instance(class, plants, gen_seed)?;
            let lb = lp_lower_bound(&inst)?;
            for r in 0..runs as u64 {
                let mut cfg = engine.build(seed + r, algo.mode())?;
                cfg = cfg.with_population_size(np);
                cfg.validate()?;
                let report = engine_run(&inst, &cfg)?;
                z_sum += report.best_objective as f64;
                rpd_sum += tscflp::evaluator::rpd(report.best_objective as f64, lb)?;
                time_s += report.wall_time_seconds;
                samples += 1;
            }
        }
        let line = format!(
            "{np},{:.1},{:.2},{:.2}",
            z_sum / samples as f64,
            rpd_sum / samples as f64,
            time_s
        );
        println!("{line}");
        doc.push_str(&line);
        doc.push('\n');
    }
    write_file(out, &doc)?;
    println!("sweep written to {}", out.display());
    Ok(())
}
