//! Rendering check results for people and for scripts.

use std::fmt::Write as _;

use unsplit_core::CheckReport;

use crate::formats::number;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Kv,
}

pub struct NamedCheck {
    pub name: &'static str,
    pub report: CheckReport,
}

/// Renders the checks in the requested format and says whether all of
/// them passed. Stats are taken from the first check, which every
/// caller computes over the full solution.
pub fn render(checks: &[NamedCheck], format: ReportFormat) -> (String, bool) {
    let all_pass = checks.iter().all(|c| c.report.passed);
    let text = match format {
        ReportFormat::Text => render_text(checks, all_pass),
        ReportFormat::Kv => render_kv(checks, all_pass),
    };
    (text, all_pass)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn render_text(checks: &[NamedCheck], all_pass: bool) -> String {
    let mut out = String::new();
    if let Some(first) = checks.first() {
        let stats = &first.report.stats;
        writeln!(out, "paths: {}", stats.paths).unwrap();
        if let Some(c) = &stats.congestion {
            writeln!(out, "congestion: {}", number(c)).unwrap();
        }
        if let Some(m) = &stats.max_increase {
            writeln!(out, "max-increase: {}", number(m)).unwrap();
        }
    }
    for check in checks {
        writeln!(out, "check {}: {}", check.name, verdict(check.report.passed)).unwrap();
        for failure in &check.report.failures {
            writeln!(out, "  {failure}").unwrap();
        }
        if let Some(slack) = &check.report.slack {
            writeln!(out, "  slack: {}", number(slack)).unwrap();
        }
        if let Some(arc) = check.report.tight_arc {
            writeln!(out, "  tight-arc: {arc}").unwrap();
        }
    }
    writeln!(out, "result: {}", verdict(all_pass)).unwrap();
    out
}

fn render_kv(checks: &[NamedCheck], all_pass: bool) -> String {
    let mut out = String::new();
    if let Some(first) = checks.first() {
        let stats = &first.report.stats;
        writeln!(out, "paths={}", stats.paths).unwrap();
        if let Some(c) = &stats.congestion {
            writeln!(out, "congestion={}", number(c)).unwrap();
        }
        if let Some(m) = &stats.max_increase {
            writeln!(out, "max_increase={}", number(m)).unwrap();
        }
    }
    for check in checks {
        let key = check.name.replace('-', "_");
        writeln!(out, "check.{key}={}", verdict(check.report.passed)).unwrap();
        for (i, failure) in check.report.failures.iter().enumerate() {
            writeln!(out, "check.{key}.failure.{i}={failure}").unwrap();
        }
        if let Some(slack) = &check.report.slack {
            writeln!(out, "check.{key}.slack={}", number(slack)).unwrap();
        }
        if let Some(arc) = check.report.tight_arc {
            writeln!(out, "check.{key}.tight_arc={arc}").unwrap();
        }
    }
    writeln!(out, "result={}", verdict(all_pass)).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use unsplit_core::instances::gen_nonintegral;
    use unsplit_core::{check_unsplittable, solve_upper, UnsplittableSolution};

    fn sample() -> Vec<NamedCheck> {
        let (inst, flow) = gen_nonintegral();
        let run = solve_upper(&inst, &flow).unwrap();
        vec![NamedCheck {
            name: "unsplittable",
            report: check_unsplittable(&inst, &run.solution),
        }]
    }

    #[test]
    fn passing_checks_read_as_pass() {
        let checks = sample();
        let (text, ok) = render(&checks, ReportFormat::Text);
        assert!(ok);
        assert!(text.contains("check unsplittable: pass"));
        assert!(text.ends_with("result: pass\n"));
        assert!(text.starts_with("paths: "));

        let (kv, ok) = render(&checks, ReportFormat::Kv);
        assert!(ok);
        assert!(kv.contains("check.unsplittable=pass"));
        assert!(kv.ends_with("result=pass\n"));
    }

    #[test]
    fn failures_are_listed_under_their_check() {
        let (inst, _) = gen_nonintegral();
        let empty = UnsplittableSolution { paths: Vec::new() };
        let checks = vec![NamedCheck {
            name: "unsplittable",
            report: check_unsplittable(&inst, &empty),
        }];
        let (text, ok) = render(&checks, ReportFormat::Text);
        assert!(!ok);
        assert!(text.contains("check unsplittable: fail"));
        assert!(text.contains("  "));
        assert!(text.ends_with("result: fail\n"));

        let (kv, ok) = render(&checks, ReportFormat::Kv);
        assert!(!ok);
        assert!(kv.contains("check.unsplittable=fail"));
        assert!(kv.contains("check.unsplittable.failure.0="));
    }
}
