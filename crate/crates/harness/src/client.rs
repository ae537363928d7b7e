//! Thin blocking client for the `/register` and `/login` endpoints.

use std::time::{Duration, Instant};

use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{HarnessError, Result};

pub const PATH_HEADER: &str = "x-seiguard-path";
pub const TIMING_HEADER: &str = "x-seiguard-timing";

/// Personal fields submitted at registration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub phone: String,
    pub id_number: String,
    pub email: String,
    pub lastname: String,
    pub firstname: String,
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            phone: "13651160987".into(),
            id_number: "140122199801070048".into(),
            email: "wangzuoguang16@mails.ucas.ac.cn".into(),
            lastname: "王".into(),
            firstname: "作广".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reply {
    pub status: StatusCode,
    pub body: Value,
    pub path: Option<String>,
    pub timing: Vec<(String, f64)>,
    pub elapsed: Duration,
}

impl Reply {
    /// The failure marker a form-matching cracker looks for: a non-200
    /// status, an `error` field or `authenticated: false`.
    pub fn is_failure(&self) -> bool {
        self.status != StatusCode::OK
            || self.body.get("error").is_some()
            || self.body.get("authenticated") == Some(&Value::Bool(false))
    }

    pub fn step(&self, name: &str) -> Option<f64> {
        self.timing.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// `k=v;k=v` pairs from the timing header.
pub fn parse_timing(h: &str) -> Vec<(String, f64)> {
    h.split(';')
        .filter_map(|kv| {
            let (k, v) = kv.split_once('=')?;
            Some((k.trim().to_owned(), v.trim().parse().ok()?))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Target {
    base: String,
    http: Client,
}

impl Target {
    pub fn new(base: &str) -> Result<Self> {
        let http = Client::builder().timeout(Duration::from_secs(30)).build()?;
        Ok(Target { base: base.trim_end_matches('/').to_owned(), http })
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn post(&self, path: &str, body: &Value) -> Result<Reply> {
        let t = Instant::now();
        let resp = self
            .http
            .post(format!("{}{path}", self.base))
            .json(body)
            .send()
            .map_err(|e| HarnessError::Unreachable(format!("{}: {e}", self.base)))?;
        let status = resp.status();
        let header = |n: &str| resp.headers().get(n).and_then(|v| v.to_str().ok()).map(str::to_owned);
        let path = header(PATH_HEADER);
        let timing = header(TIMING_HEADER).map(|h| parse_timing(&h)).unwrap_or_default();
        let body = resp.json().unwrap_or(Value::Null);
        Ok(Reply { status, body, path, timing, elapsed: t.elapsed() })
    }

    pub fn register(&self, username: &str, password: &str, p: &Profile) -> Result<Reply> {
        self.post(
            "/register",
            &json!({
                "username": username,
                "password": password,
                "phone": p.phone,
                "id_number": p.id_number,
                "email": p.email,
                "lastname": p.lastname,
                "firstname": p.firstname,
            }),
        )
    }

    pub fn login(&self, username: &str, password: &str) -> Result<Reply> {
        self.post("/login", &json!({ "username": username, "password": password }))
    }

    pub fn healthy(&self) -> bool {
        self.http
            .get(format!("{}/healthz", self.base))
            .send()
            .is_ok_and(|r| r.status().is_success())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reply(status: u16, body: Value) -> Reply {
        Reply {
            status: StatusCode::from_u16(status).unwrap(),
            body,
            path: None,
            timing: vec![],
            elapsed: Duration::ZERO,
        }
    }

    #[test]
    fn failure_marker() {
        assert!(!reply(200, json!({ "username": "a", "phone": "1" })).is_failure());
        assert!(reply(401, json!({ "error": "x" })).is_failure());
        assert!(reply(200, json!({ "authenticated": false })).is_failure());
        assert!(reply(200, json!({ "error": "x" })).is_failure());
    }

    #[test]
    fn timing_pairs() {
        let t = parse_timing("key=0.000001;phone=0.25;total=1");
        assert_eq!(t[1], ("phone".to_owned(), 0.25));
        assert_eq!(t.len(), 3);
    }
}
