use std::fmt;
use std::time::{Duration, Instant};

/// Named steps of one request, in execution order.
#[derive(Debug, Clone)]
pub struct Timings {
    started: Instant,
    steps: Vec<(&'static str, Duration)>,
}

impl Timings {
    pub fn start() -> Self {
        Timings { started: Instant::now(), steps: Vec::with_capacity(8) }
    }

    pub fn time<T>(&mut self, step: &'static str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.steps.push((step, t.elapsed()));
        out
    }

    pub fn steps(&self) -> &[(&'static str, Duration)] {
        &self.steps
    }

    pub fn get(&self, step: &str) -> Option<Duration> {
        self.steps.iter().find(|(s, _)| *s == step).map(|(_, d)| *d)
    }

    pub fn total(&self) -> Duration {
        self.started.elapsed()
    }

    /// Step names joined by `>`; identifies the code path taken.
    pub fn path(&self) -> String {
        self.steps.iter().map(|(s, _)| *s).collect::<Vec<_>>().join(">")
    }
}

/// `step=seconds` pairs plus `total`, e.g. `key=0.000004;phone=0.000210;total=0.000931`.
impl fmt::Display for Timings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, d) in &self.steps {
            write!(f, "{s}={:.6};", d.as_secs_f64())?;
        }
        write!(f, "total={:.6}", self.total().as_secs_f64())
    }
}

/// Parses a timing header back into `(step, seconds)` pairs.
pub fn parse_timing_header(h: &str) -> Vec<(String, f64)> {
    h.split(';')
        .filter_map(|kv| {
            let (k, v) = kv.split_once('=')?;
            Some((k.trim().to_owned(), v.trim().parse().ok()?))
        })
        .collect()
}
