use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use symcut::harness::{
    gen_planted, gen_random, parse_instance, parse_solution, solve, write_instance, Algo, Instance, Kind, SolveConfig,
    SolveReport, Status,
};
use symcut::multiway::{MultiwayOptions, ShadowMode};

#[derive(Parser)]
#[command(name = "symcut", version, about = "Solvers for symmetric directed vertex multicut and multiway cut")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance to standard output.
    Gen {
        #[arg(long, value_enum, default_value_t = KindArg::Symdicut)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        /// Arc probability.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Number of requests, terminals or arc sets.
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Plant a solution of size k; it is written as a comment.
        #[arg(long)]
        planted: bool,
    },
    /// Solve an instance and print a JSON report.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
    },
    /// Check a solution file against an instance.
    Verify {
        file: PathBuf,
        solution: PathBuf,
        /// Budget to check against; defaults to the instance's k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Solve every instance file in a directory, one JSON line each.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
    },
}

#[derive(clap::Args, Clone)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = AlgoArg::ExactKl)]
    algo: AlgoArg,
    /// Overrides the budget in the file.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    shadow_mode: ModeArg,
    #[arg(long, default_value_t = MultiwayOptions::default().rounds)]
    rounds: usize,
    #[arg(long)]
    timeout_ms: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy)]
enum KindArg {
    Symdicut,
    Symdimw,
    Arcterm,
}

#[derive(ValueEnum, Clone, Copy)]
enum AlgoArg {
    ExactKl,
    Approx2,
    Multiway,
    Brute,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Exhaustive,
    Random,
}

const DEFAULT_SEED: u64 = 0;

fn seed_or_default(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("seed: {DEFAULT_SEED}");
        DEFAULT_SEED
    })
}

impl SolveArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            algo: match self.algo {
                AlgoArg::ExactKl => Algo::ExactKl,
                AlgoArg::Approx2 => Algo::Approx2,
                AlgoArg::Multiway => Algo::Multiway,
                AlgoArg::Brute => Algo::Brute,
            },
            seed: seed_or_default(self.seed),
            shadow_mode: match self.shadow_mode {
                ModeArg::Exhaustive => ShadowMode::Exhaustive,
                ModeArg::Random => ShadowMode::Random,
            },
            rounds: self.rounds,
            timeout: self.timeout_ms.map(Duration::from_millis),
        }
    }
}

fn load(path: &Path) -> Result<Instance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_solve(inst: &Instance, args: &SolveArgs, config: &SolveConfig) -> Result<SolveReport, String> {
    let inst = match args.k {
        Some(k) => inst.with_k(k),
        None => inst.clone(),
    };
    solve(&inst, config).map_err(|e| e.to_string())
}

fn exit_for(status: Status) -> ExitCode {
    ExitCode::from(match status {
        Status::Solution => 0,
        Status::NoSolutionAtK | Status::NoSolutionApprox => 1,
        Status::Timeout => 3,
    })
}

fn fail(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

#[derive(Serialize)]
struct VerifyReport {
    valid: bool,
    size: usize,
    k: usize,
}

#[derive(Serialize)]
struct BenchLine<'a> {
    file: &'a str,
    #[serde(flatten)]
    report: Option<SolveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { kind, n, p, l, k, seed, planted } => {
            let kind = match kind {
                KindArg::Symdicut => Kind::Multicut,
                KindArg::Symdimw => Kind::Multiway,
                KindArg::Arcterm => Kind::ArcTerminal,
            };
            let seed = seed_or_default(seed);
            if planted {
                let (inst, x) = gen_planted(kind, n, k, l, seed);
                let listed: Vec<String> = x.iter().map(|v| (v.0 + 1).to_string()).collect();
                print!("# planted {}\n{}", listed.join(" "), write_instance(&inst));
            } else {
                print!("{}", write_instance(&gen_random(kind, n, p, l, k, seed)));
            }
            ExitCode::SUCCESS
        }
        Command::Solve { file, opts } => {
            let inst = match load(&file) {
                Ok(inst) => inst,
                Err(e) => return fail(&e),
            };
            match run_solve(&inst, &opts, &opts.config()) {
                Ok(report) => {
                    println!("{}", serde_json::to_string(&report).expect("report serializes"));
                    exit_for(report.status)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { file, solution, k } => {
            let inst = match load(&file) {
                Ok(inst) => inst,
                Err(e) => return fail(&e),
            };
            let text = match fs::read_to_string(&solution) {
                Ok(text) => text,
                Err(e) => return fail(&format!("{}: {e}", solution.display())),
            };
            let x = match parse_solution(&text) {
                Ok(x) => x,
                Err(e) => return fail(&format!("{}: {e}", solution.display())),
            };
            let k = k.unwrap_or(inst.k());
            let report = VerifyReport {
                valid: inst.is_solution(&x, k),
                size: x.len(),
                k,
            };
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            if report.valid {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Bench { dir, opts } => {
            let mut files: Vec<PathBuf> = match fs::read_dir(&dir) {
                Ok(entries) => entries.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_file()).collect(),
                Err(e) => return fail(&format!("{}: {e}", dir.display())),
            };
            files.sort();
            let config = opts.config();
            for path in files {
                let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("?").to_string();
                let (report, error) = match load(&path).and_then(|inst| run_solve(&inst, &opts, &config)) {
                    Ok(report) => (Some(report), None),
                    Err(e) => (None, Some(e)),
                };
                let line = BenchLine { file: &name, report, error };
                println!("{}", serde_json::to_string(&line).expect("line serializes"));
            }
            ExitCode::SUCCESS
        }
    }
}
