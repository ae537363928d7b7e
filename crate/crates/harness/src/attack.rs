//! Online dictionary attack with the policy of a form-matching cracker:
//! per user, try passwords in dictionary order until a response lacks the
//! failure marker, then move to the next user.

use std::collections::HashMap;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::client::Target;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone)]
pub struct AttackPlan<'a> {
    pub target: &'a Target,
    pub users: &'a [String],
    pub passwords: &'a [String],
    /// Real passwords, used only for scoring.
    pub truth: &'a HashMap<String, String>,
    pub parallel: usize,
    /// Shuffles the user order when set.
    pub shuffle_seed: Option<u64>,
}

/// Outcome for one user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserOutcome {
    pub username: String,
    pub tries: u64,
    /// Password the cracker accepted, if any.
    pub cracked: Option<String>,
    /// The real password was among the guesses submitted.
    pub extracted: bool,
    /// The accepted password is the real one.
    pub verified: bool,
}

/// One row of the attack table.
#[derive(Debug, Clone)]
pub struct AttackRow {
    pub server: String,
    pub dictionary: String,
    pub users_targeted: usize,
    pub crack_tries: u64,
    pub wall_time: Duration,
    pub extraction_num: usize,
    pub verification_num: usize,
    /// Accepted passwords that are wrong.
    pub fake_num: usize,
    pub outcomes: Vec<UserOutcome>,
}

impl AttackRow {
    pub fn extraction_rate(&self) -> f64 {
        rate(self.extraction_num, self.users_targeted)
    }

    pub fn verification_rate(&self) -> f64 {
        rate(self.verification_num, self.users_targeted)
    }
}

fn rate(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

fn attack_user(target: &Target, user: &str, passwords: &[String], truth: Option<&String>) -> Result<UserOutcome> {
    let mut tries = 0;
    let mut cracked = None;
    for p in passwords {
        tries += 1;
        if !target.login(user, p)?.is_failure() {
            cracked = Some(p.clone());
            break;
        }
    }
    let submitted = &passwords[..tries as usize];
    let extracted = truth.is_some_and(|t| submitted.contains(t));
    let verified = truth.is_some() && cracked.as_ref() == truth;
    Ok(UserOutcome { username: user.to_owned(), tries, cracked, extracted, verified })
}

pub fn run_attack(plan: &AttackPlan<'_>, server: &str, dictionary: &str) -> Result<AttackRow> {
    if plan.passwords.is_empty() {
        return Err(HarnessError::EmptyInput("password dictionary".into()));
    }
    if plan.users.is_empty() {
        return Err(HarnessError::EmptyInput("user dictionary".into()));
    }
    let mut users: Vec<&String> = plan.users.iter().collect();
    if let Some(seed) = plan.shuffle_seed {
        users.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
    }
    let started = Instant::now();
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<UserOutcome>>>> = Mutex::new((0..users.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..plan.parallel.clamp(1, users.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(u) = users.get(i) else { break };
                let out = attack_user(plan.target, u, plan.passwords, plan.truth.get(*u));
                let failed = out.is_err();
                slots.lock().unwrap()[i] = Some(out);
                if failed {
                    next.store(users.len(), Ordering::Relaxed);
                }
            });
        }
    });
    let wall_time = started.elapsed();
    let mut outcomes = Vec::with_capacity(users.len());
    for slot in slots.into_inner().unwrap() {
        match slot {
            Some(r) => outcomes.push(r?),
            None => continue,
        }
    }
    Ok(AttackRow {
        server: server.to_owned(),
        dictionary: dictionary.to_owned(),
        users_targeted: outcomes.len(),
        crack_tries: outcomes.iter().map(|o| o.tries).sum(),
        wall_time,
        extraction_num: outcomes.iter().filter(|o| o.extracted).count(),
        verification_num: outcomes.iter().filter(|o| o.verified).count(),
        fake_num: outcomes.iter().filter(|o| o.cracked.is_some() && !o.verified).count(),
        outcomes,
    })
}

/// Coarse wall time, as the attack table reports it.
pub fn format_wall_time(d: Duration) -> String {
    let min = d.as_secs_f64() / 60.0;
    if min < 1.0 {
        "< 1min".into()
    } else {
        format!("{} min", min.round() as u64)
    }
}

fn pct(r: f64) -> String {
    let s = format!("{:.3}", r * 100.0);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}

pub const ATTACK_HEADER: [&str; 9] = [
    "Server",
    "Dictionaries",
    "Users to crack",
    "Crack tries",
    "Time",
    "Extraction num / rate",
    "Verification num / rate",
    "Fake cracks",
    "Average crack rate",
];

/// Writes the rows as CSV; the average verification rate goes on the
/// first row.
pub fn write_attack_csv<W: Write>(w: W, rows: &[AttackRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ATTACK_HEADER)?;
    let avg = rows.iter().map(AttackRow::verification_rate).sum::<f64>() / rows.len().max(1) as f64;
    for (i, r) in rows.iter().enumerate() {
        out.write_record([
            r.server.clone(),
            r.dictionary.clone(),
            r.users_targeted.to_string(),
            r.crack_tries.to_string(),
            format_wall_time(r.wall_time),
            format!("{} / {}", r.extraction_num, pct(r.extraction_rate())),
            format!("{} / {}", r.verification_num, pct(r.verification_rate())),
            r.fake_num.to_string(),
            if i == 0 { pct(avg) } else { String::new() },
        ])?;
    }
    out.flush()?;
    Ok(())
}
