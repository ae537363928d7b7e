//! Word lists, ground-truth files and planted-overlap dictionary generation.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::distributions::{Alphanumeric, DistString};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{HarnessError, Result};

/// Non-empty lines, `\r` stripped.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)?;
    let lines: Vec<String> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();
    if lines.is_empty() {
        return Err(HarnessError::EmptyInput(path.display().to_string()));
    }
    Ok(lines)
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let mut out = lines.join("\n");
    out.push('\n');
    fs::write(path, out)?;
    Ok(())
}

/// `username,password` CSV without a header row.
pub fn read_truth(path: &Path) -> Result<HashMap<String, String>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut out = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(HarnessError::Parse {
                file: path.display().to_string(),
                line: i + 1,
                msg: "expected username,password".into(),
            });
        }
        out.insert(rec[0].to_owned(), rec[1].to_owned());
    }
    Ok(out)
}

pub fn write_truth(path: &Path, truth: &[(String, String)]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for (u, p) in truth {
        w.write_record([u, p])?;
    }
    w.flush()?;
    Ok(())
}

const COMMON: &[&str] = &[
    "123456", "password", "12345678", "qwerty", "123456789", "12345", "1234", "111111", "1234567", "dragon",
    "123123", "baseball", "abc123", "football", "monkey", "letmein", "696969", "shadow", "master", "666666",
    "qwertyuiop", "123321", "mustang", "1234567890", "michael", "654321", "superman", "1qaz2wsx", "7777777",
    "121212", "000000", "qazwsx", "123qwe", "killer", "trustno1", "jordan", "jennifer", "zxcvbnm", "asdfgh",
    "hunter", "buster", "soccer", "harley", "batman", "andrew", "tigger", "sunshine", "iloveyou", "2000",
    "charlie", "robert", "thomas", "hockey", "ranger", "daniel", "starwars", "klaster", "112233", "george",
    "woaini", "woaini1314", "5201314", "a123456", "aa123456", "abc123456", "qq123456", "zhang123", "wang1234",
];

/// Dictionary generation parameters.
#[derive(Debug, Clone)]
pub struct DictSpec {
    pub users: usize,
    pub size: usize,
    /// Users whose real password is planted in the dictionary.
    pub overlap: usize,
    /// Put one planted password on the first line.
    pub first_line_hit: bool,
    pub seed: u64,
    pub user_prefix: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub users: Vec<String>,
    pub truth: Vec<(String, String)>,
    pub passwords: Vec<String>,
}

impl Generated {
    /// Users whose password appears anywhere in the dictionary.
    pub fn planted(&self) -> usize {
        let dict: HashSet<&str> = self.passwords.iter().map(String::as_str).collect();
        self.truth.iter().filter(|(_, p)| dict.contains(p.as_str())).count()
    }
}

/// Deterministic in `spec.seed`.
pub fn generate(spec: &DictSpec) -> Result<Generated> {
    let filler_needed = spec.size.saturating_sub(spec.overlap);
    if spec.users == 0 || spec.size == 0 {
        return Err(HarnessError::EmptyInput("dictionary spec".into()));
    }
    if spec.overlap > spec.users || spec.overlap > spec.size || (spec.first_line_hit && spec.overlap == 0) {
        return Err(HarnessError::Parse {
            file: "gen-dict".into(),
            line: 0,
            msg: format!("overlap {} does not fit {} users / {} passwords", spec.overlap, spec.users, spec.size),
        });
    }
    if !spec.first_line_hit && filler_needed == 0 && spec.overlap > 0 {
        return Err(HarnessError::Parse {
            file: "gen-dict".into(),
            line: 0,
            msg: "need at least one filler password for the first line".into(),
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let users: Vec<String> = (0..spec.users).map(|i| format!("{}{i:03}", spec.user_prefix)).collect();
    let mut real = HashSet::new();
    let truth: Vec<(String, String)> = users
        .iter()
        .map(|u| {
            let p = loop {
                let p = format!("{}{}", Alphanumeric.sample_string(&mut rng, 8), rng.gen_range(10..100));
                if real.insert(p.clone()) {
                    break p;
                }
            };
            (u.clone(), p)
        })
        .collect();

    let mut filler = Vec::with_capacity(filler_needed);
    let mut seen: HashSet<String> = HashSet::new();
    for w in COMMON {
        if filler.len() == filler_needed {
            break;
        }
        if seen.insert((*w).to_owned()) {
            filler.push((*w).to_owned());
        }
    }
    while filler.len() < filler_needed {
        let w = format!("{}{}", COMMON[rng.gen_range(0..COMMON.len())], rng.gen_range(0..100_000));
        if !real.contains(&w) && seen.insert(w.clone()) {
            filler.push(w);
        }
    }

    let mut planted_users: Vec<usize> = (0..spec.users).collect();
    planted_users.shuffle(&mut rng);
    planted_users.truncate(spec.overlap);
    let planted: Vec<String> = planted_users.iter().map(|&i| truth[i].1.clone()).collect();

    let mut passwords = filler;
    passwords.shuffle(&mut rng);
    let (head, rest) = if spec.first_line_hit { (planted[0].clone(), &planted[1..]) } else { (passwords.remove(0), &planted[..]) };
    for p in rest {
        let at = rng.gen_range(0..=passwords.len());
        passwords.insert(at, p.clone());
    }
    passwords.insert(0, head);
    Ok(Generated { users, truth, passwords })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(overlap: usize, first: bool) -> DictSpec {
        DictSpec { users: 30, size: 1000, overlap, first_line_hit: first, seed: 7, user_prefix: "u".into() }
    }

    #[test]
    fn planted_overlap_is_exact() {
        let g = generate(&spec(18, false)).unwrap();
        assert_eq!(g.passwords.len(), 1000);
        assert_eq!(g.planted(), 18);
        assert!(!g.truth.iter().any(|(_, p)| *p == g.passwords[0]));
        let uniq: HashSet<&String> = g.passwords.iter().collect();
        assert_eq!(uniq.len(), 1000);
    }

    #[test]
    fn first_line_hit() {
        let g = generate(&spec(1, true)).unwrap();
        assert_eq!(g.planted(), 1);
        assert!(g.truth.iter().any(|(_, p)| *p == g.passwords[0]));
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&spec(5, false)).unwrap(), generate(&spec(5, false)).unwrap());
        let mut other = spec(5, false);
        other.seed = 8;
        assert_ne!(generate(&spec(5, false)).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn rejects_impossible_specs() {
        assert!(generate(&spec(31, false)).is_err());
        assert!(generate(&spec(0, true)).is_err());
        let mut s = spec(3, false);
        s.size = 3;
        assert!(generate(&s).is_err());
    }

    #[test]
    fn files_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let g = generate(&spec(2, false)).unwrap();
        write_truth(&dir.path().join("t.csv"), &g.truth).unwrap();
        write_lines(&dir.path().join("p.txt"), &g.passwords).unwrap();
        let t = read_truth(&dir.path().join("t.csv")).unwrap();
        assert_eq!(t.len(), 30);
        assert_eq!(t["u000"], g.truth[0].1);
        assert_eq!(read_lines(&dir.path().join("p.txt")).unwrap(), g.passwords);
        fs::write(dir.path().join("e.txt"), "\n\n").unwrap();
        assert!(matches!(read_lines(&dir.path().join("e.txt")), Err(HarnessError::EmptyInput(_))));
    }
}
