use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use seiguard_harness::dict::{read_lines, read_truth, write_lines, write_truth};
use seiguard_harness::{
    build_maps, generate, run_attack, run_bench, write_attack_csv, write_bench_csv, AttackPlan, DictSpec, Profile,
    Target,
};

#[derive(Parser)]
#[command(version, about = "Attack, benchmark and map-building tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build mapping files for one or more space configs.
    BuildMaps {
        #[arg(long, required = true)]
        space: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dictionary attack against a running server.
    Attack {
        #[arg(long)]
        target: String,
        #[arg(long)]
        users: PathBuf,
        /// Repeat for several dictionaries; one report row each.
        #[arg(long, required = true)]
        passwords: Vec<PathBuf>,
        /// `username,password` ground truth, used only for scoring.
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = 16)]
        parallel: usize,
        #[arg(long)]
        report: PathBuf,
        /// Server column of the report; defaults to the target URL.
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        shuffle_seed: Option<u64>,
    },
    /// Registration/login latency with fresh users.
    Bench {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        label: Option<String>,
        /// JSON object with phone, id_number, email, lastname, firstname.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Generate users, ground truth and a dictionary with planted overlap.
    GenDict {
        #[arg(long, default_value_t = 30)]
        users: usize,
        #[arg(long, default_value_t = 1000)]
        size: usize,
        #[arg(long)]
        overlap: usize,
        #[arg(long)]
        first_line_hit: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "user")]
        prefix: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Register every user of a ground-truth file.
    SeedUsers {
        #[arg(long)]
        target: String,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
}

fn load_profile(p: Option<&Path>) -> anyhow::Result<Profile> {
    match p {
        Some(p) => Ok(serde_json::from_reader(File::open(p).with_context(|| p.display().to_string())?)?),
        None => Ok(Profile::default()),
    }
}

fn connect(url: &str) -> anyhow::Result<Target> {
    let t = Target::new(url)?;
    if !t.healthy() {
        bail!("target {url} is unreachable");
    }
    Ok(t)
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().cmd {
        Cmd::BuildMaps { space, out } => {
            for s in space {
                let summary = build_maps(&s, &out).with_context(|| s.display().to_string())?;
                println!("{summary}");
            }
        }
        Cmd::Attack { target, users, passwords, truth, parallel, report, label, shuffle_seed } => {
            let t = connect(&target)?;
            let users = read_lines(&users)?;
            let truth = read_truth(&truth)?;
            let mut rows = Vec::new();
            for dict in &passwords {
                let words = read_lines(dict)?;
                let plan = AttackPlan { target: &t, users: &users, passwords: &words, truth: &truth, parallel, shuffle_seed };
                let name = dict.file_stem().map_or_else(|| dict.display().to_string(), |s| s.to_string_lossy().into_owned());
                let row = run_attack(&plan, label.as_deref().unwrap_or(&target), &name)?;
                eprintln!(
                    "{name}: {} users, {} tries, extraction {}, verification {}",
                    row.users_targeted, row.crack_tries, row.extraction_num, row.verification_num
                );
                rows.push(row);
            }
            write_attack_csv(File::create(&report)?, &rows)?;
        }
        Cmd::Bench { target, trials, report, label, profile } => {
            let t = connect(&target)?;
            let profile = load_profile(profile.as_deref())?;
            let r = run_bench(&t, trials, &profile, label.as_deref().unwrap_or(&target))?;
            write_bench_csv(File::create(&report)?, &r)?;
        }
        Cmd::GenDict { users, size, overlap, first_line_hit, seed, prefix, out } => {
            let g = generate(&DictSpec { users, size, overlap, first_line_hit, seed, user_prefix: prefix })?;
            std::fs::create_dir_all(&out)?;
            write_lines(&out.join("users.txt"), &g.users)?;
            write_lines(&out.join("passwords.txt"), &g.passwords)?;
            write_truth(&out.join("truth.csv"), &g.truth)?;
            println!("{} users, {} passwords, {} planted", g.users.len(), g.passwords.len(), g.planted());
        }
        Cmd::SeedUsers { target, truth, profile } => {
            let t = connect(&target)?;
            let profile = load_profile(profile.as_deref())?;
            let mut truth: Vec<_> = read_truth(&truth)?.into_iter().collect();
            truth.sort();
            for (u, p) in &truth {
                let r = t.register(u, p, &profile)?;
                if r.is_failure() {
                    bail!("registering {u}: {} {}", r.status, r.body);
                }
            }
            println!("registered {} users", truth.len());
        }
    }
    Ok(())
}
