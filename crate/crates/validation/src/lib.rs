//! Runner for the acceptance criteria: one verdict line per criterion, with
//! its wall-clock time checked against the criterion's budget.

use std::time::{Duration, Instant};

/// Result of a criterion's checks, before the runtime budget is applied.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub outcome: Outcome,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl Verdict {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed < b)
    }

    pub fn passed(&self) -> bool {
        self.outcome.passed && self.within_budget()
    }

    pub fn line(&self) -> String {
        let timing = match self.budget {
            Some(b) => format!("{} (budget {})", fmt_duration(self.elapsed), fmt_duration(b)),
            None => fmt_duration(self.elapsed),
        };
        let over = if self.within_budget() { "" } else { " over budget;" };
        format!(
            "criterion {}: {} {} [{timing}]{over} {}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.outcome.detail
        )
    }
}

fn fmt_duration(d: Duration) -> String {
    let s = d.as_secs_f64();
    if s < 1.0 {
        format!("{:.3} ms", s * 1e3)
    } else {
        format!("{s:.2} s")
    }
}

#[derive(Debug, Default)]
pub struct Suite {
    pub verdicts: Vec<Verdict>,
}

impl Suite {
    /// Runs `check`, times it and prints the verdict line immediately.
    pub fn run(&mut self, id: u32, title: &'static str, budget: Option<Duration>, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = check();
        let v = Verdict {
            id,
            title,
            outcome,
            elapsed: start.elapsed(),
            budget,
        };
        println!("{}", v.line());
        self.verdicts.push(v);
    }

    pub fn passed(&self) -> usize {
        self.verdicts.iter().filter(|v| v.passed()).count()
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .verdicts
            .iter()
            .filter(|v| !v.passed())
            .map(|v| v.id.to_string())
            .collect();
        let mut s = format!("{}/{} criteria passed", self.passed(), self.verdicts.len());
        if !failed.is_empty() {
            s.push_str(&format!("; failed: {}", failed.join(", ")));
        }
        s
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Asymptotic 1% critical value of `√n·D`.
pub const KS_CRITICAL_1PCT: f64 = 1.6276;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_uniform_grid() {
        let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        assert!((ks_statistic(&xs, |x| x) - 0.05).abs() < 1e-15);
        assert!((ks_statistic(&[0.0], |x| x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn budget_overrun_fails_a_passing_check() {
        let v = Verdict {
            id: 1,
            title: "t",
            outcome: Outcome::new(true, ""),
            elapsed: Duration::from_millis(5),
            budget: Some(Duration::from_millis(1)),
        };
        assert!(!v.passed());
        assert!(v.line().contains("FAIL") && v.line().contains("over budget"));
    }

    #[test]
    fn summary_names_failures() {
        let mut s = Suite::default();
        s.run(1, "a", None, || Outcome::new(true, ""));
        s.run(2, "b", None, || Outcome::new(false, ""));
        assert_eq!(s.summary(), "1/2 criteria passed; failed: 2");
    }
}
