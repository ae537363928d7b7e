//! Registration and login latency, per field and in total.

use std::io::Write;

use rand::RngCore;

use crate::client::{Profile, Reply, Target};
use crate::error::{HarnessError, Result};

/// Table rows and the timing-header step each one reads.
pub const ITEMS: [(&str, &str); 6] = [
    ("password salting hash (PBE)", "hash"),
    ("mobile phone number", "phone"),
    ("identification card number", "id"),
    ("email address", "email"),
    ("chinese surname / last name", "lastname"),
    ("chinese first name", "firstname"),
];

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub server: String,
    pub register: Vec<Reply>,
    pub login: Vec<Reply>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = xs.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

impl BenchReport {
    pub fn trials(&self) -> usize {
        self.register.len()
    }

    /// Mean server-side seconds of `step`, over replies that report it.
    pub fn mean_step(replies: &[Reply], step: &str) -> Option<f64> {
        mean(replies.iter().filter_map(|r| r.step(step)))
    }

    /// Mean client-observed round trip in seconds.
    pub fn mean_total(replies: &[Reply]) -> Option<f64> {
        mean(replies.iter().map(|r| r.elapsed.as_secs_f64()))
    }

    pub fn max_step(replies: &[Reply], step: &str) -> Option<f64> {
        replies.iter().filter_map(|r| r.step(step)).reduce(f64::max)
    }
}

/// Registers `trials` fresh users with `profile`, then logs each in once
/// with its password.
pub fn run_bench(target: &Target, trials: usize, profile: &Profile, server: &str) -> Result<BenchReport> {
    let mut report = BenchReport { server: server.to_owned(), ..Default::default() };
    let nonce = rand::thread_rng().next_u32();
    let users: Vec<(String, String)> =
        (0..trials).map(|i| (format!("bench{nonce:08x}u{i}"), format!("pw{nonce:08x}{i}"))).collect();
    for (u, p) in &users {
        let r = target.register(u, p, profile)?;
        if r.is_failure() {
            return Err(HarnessError::Unreachable(format!("register {u} failed with {}: {}", r.status, r.body)));
        }
        report.register.push(r);
    }
    for (u, p) in &users {
        let r = target.login(u, p)?;
        if r.is_failure() {
            return Err(HarnessError::Unreachable(format!("login {u} failed with {}: {}", r.status, r.body)));
        }
        report.login.push(r);
    }
    Ok(report)
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.8}"))
}

/// `Information Item,Registration,Login` rows in seconds; `-` where the
/// server reports no such step. No trials gives a header-only file.
pub fn write_bench_csv<W: Write>(w: W, report: &BenchReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["Information Item", "Registration", "Login"])?;
    if report.trials() > 0 {
        for (label, step) in ITEMS {
            out.write_record([
                label.to_owned(),
                cell(BenchReport::mean_step(&report.register, step)),
                cell(BenchReport::mean_step(&report.login, step)),
            ])?;
        }
        out.write_record([
            "Total Response Time".to_owned(),
            cell(BenchReport::mean_total(&report.register)),
            cell(BenchReport::mean_total(&report.login)),
        ])?;
    }
    out.flush()?;
    Ok(())
}
