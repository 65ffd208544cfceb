//! Check results and the run manifest.

use std::fmt::Write as _;

/// How a measured value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    /// Pass/fail flag; value and tolerance are informative only.
    Flag,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Flag => "flag",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    /// Extra key/value lines, written in insertion order.
    pub details: Vec<(String, String)>,
    pub seconds: f64,
    pub time_limit: Option<f64>,
}

impl Check {
    /// Passes when `value <= tolerance` (NaN fails).
    pub fn at_most(id: &str, title: &str, value: f64, tolerance: f64) -> Self {
        Self::new(id, title, value <= tolerance, value, Relation::AtMost, tolerance)
    }

    /// Passes when `value >= bound` (NaN fails).
    pub fn at_least(id: &str, title: &str, value: f64, bound: f64) -> Self {
        Self::new(id, title, value >= bound, value, Relation::AtLeast, bound)
    }

    pub fn flag(id: &str, title: &str, passed: bool) -> Self {
        Self::new(id, title, passed, f64::NAN, Relation::Flag, f64::NAN)
    }

    fn new(id: &str, title: &str, passed: bool, value: f64, relation: Relation, tolerance: f64) -> Self {
        Check {
            id: id.to_string(),
            title: title.to_string(),
            passed,
            value,
            relation,
            tolerance,
            details: Vec::new(),
            seconds: 0.0,
            time_limit: None,
        }
    }

    pub fn detail(mut self, key: &str, value: impl ToString) -> Self {
        self.details.push((key.to_string(), value.to_string()));
        self
    }

    /// Folds sub-checks into this one: it passes only if all of them do, and
    /// each contributes its own value and tolerance as details.
    pub fn with_parts(mut self, parts: Vec<Check>) -> Self {
        for p in parts {
            self.passed &= p.passed;
            let line = match p.relation {
                Relation::Flag => format!("{}", if p.passed { "pass" } else { "FAIL" }),
                r => format!(
                    "{} {} {} {}",
                    if p.passed { "pass" } else { "FAIL" },
                    p.value,
                    r.symbol(),
                    p.tolerance
                ),
            };
            self.details.push((p.id.clone(), line));
            self.details.extend(p.details.into_iter().map(|(k, v)| (format!("{}.{k}", p.id), v)));
        }
        self
    }

    pub fn timed(mut self, seconds: f64, limit: Option<f64>) -> Self {
        self.seconds = seconds;
        self.time_limit = limit;
        self
    }

    /// One-line summary for the terminal.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let judged = match self.relation {
            Relation::Flag => String::new(),
            r => format!(": {} {} {}", fmt_num(self.value), r.symbol(), fmt_num(self.tolerance)),
        };
        format!("[{status}] {} {}{judged} ({:.2} s)", self.id, self.title, self.seconds)
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.3e}")
    }
}

/// Structured text document with a fixed key order. Lines whose key ends in
/// `seconds` carry timing and are the only ones that vary between runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub config: String,
    pub seed: u64,
    pub rng: String,
    pub version: String,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub total_seconds: f64,
}

impl Manifest {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tool = tractrix");
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "config_hash = sha256:{}", self.config_hash);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "rng = {}", self.rng);
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "checks = {}", self.checks.len());
        let _ = writeln!(s, "checks_passed = {passed}");
        let _ = writeln!(s, "all_passed = {}", self.all_passed());
        let _ = writeln!(s, "files = {}", self.files.join(", "));
        let _ = writeln!(s, "total_seconds = {:.3}", self.total_seconds);
        s.push_str("\n[config]\n");
        for line in self.config.lines() {
            let _ = writeln!(s, "{}", line.replacen('=', " = ", 1));
        }
        for c in &self.checks {
            let _ = writeln!(s, "\n[check {}]", c.id);
            let _ = writeln!(s, "title = {}", c.title);
            let _ = writeln!(s, "passed = {}", c.passed);
            if c.relation != Relation::Flag {
                let _ = writeln!(s, "value = {}", c.value);
                let _ = writeln!(s, "relation = {}", c.relation.symbol());
                let _ = writeln!(s, "tolerance = {}", c.tolerance);
            }
            for (k, v) in &c.details {
                let _ = writeln!(s, "{k} = {v}");
            }
            if let Some(l) = c.time_limit {
                let _ = writeln!(s, "time_limit = {l}");
            }
            let _ = writeln!(s, "seconds = {:.3}", c.seconds);
        }
        s
    }
}

/// Drops timing lines, for comparing manifests of two runs.
pub fn without_timing(rendered: &str) -> String {
    rendered
        .lines()
        .filter(|l| !l.split('=').next().unwrap_or("").trim().ends_with("seconds"))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_and_nan() {
        assert!(Check::at_most("a", "x", 1.0, 1.0).passed);
        assert!(!Check::at_most("a", "x", f64::NAN, 1.0).passed);
        assert!(Check::at_least("a", "x", 0.6, 0.5).passed);
        assert!(!Check::at_least("a", "x", f64::NAN, 0.5).passed);
    }

    #[test]
    fn parts_fold_into_parent() {
        let c = Check::flag("c", "both", true).with_parts(vec![
            Check::at_most("i", "one", 0.1, 1.0),
            Check::at_most("ii", "two", 2.0, 1.0).detail("why", "too big"),
        ]);
        assert!(!c.passed);
        assert_eq!(c.details[1], ("ii".into(), "FAIL 2 <= 1".into()));
        assert_eq!(c.details[2], ("ii.why".into(), "too big".into()));
    }

    #[test]
    fn timing_is_the_only_difference() {
        let mk = |t: f64| Manifest {
            command: "verify-all".into(),
            config_hash: "00".into(),
            config: "seed=1\n".into(),
            seed: 1,
            rng: "r".into(),
            version: "0".into(),
            checks: vec![Check::at_most("c01", "x", 0.5, 1.0).timed(t, Some(1.0))],
            files: vec!["a.csv".into()],
            total_seconds: 3.0 * t,
        };
        let (a, b) = (mk(0.1).render(), mk(0.7).render());
        assert_ne!(a, b);
        assert_eq!(without_timing(&a), without_timing(&b));
        assert!(a.contains("time_limit = 1\n"));
    }
}
