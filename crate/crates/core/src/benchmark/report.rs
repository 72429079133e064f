use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Bucket, Report, REPORT_VERSION};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    TextTable,
    Structured,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" | "text" | "text_table" => Ok(ReportFormat::TextTable),
            "json" | "structured" => Ok(ReportFormat::Structured),
            _ => Err(format!("unknown format `{s}` (expected table or json)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("report: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("report version {0} is not supported (expected {REPORT_VERSION})")]
    Version(u32),
}

pub fn emit_report(report: &Report, format: ReportFormat, out: &mut dyn Write) -> Result<(), ReportError> {
    match format {
        ReportFormat::Structured => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        ReportFormat::TextTable => out.write_all(render_table(report).as_bytes())?,
    }
    Ok(())
}

pub fn parse_report(text: &str) -> Result<Report, ReportError> {
    let r: Report = serde_json::from_str(text)?;
    if r.version != REPORT_VERSION {
        return Err(ReportError::Version(r.version));
    }
    Ok(r)
}

fn steps(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

pub fn render_table(report: &Report) -> String {
    let c = &report.config;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "noise={} budget={} trials={} seed={} mode={}",
        c.noise,
        c.budget,
        c.trials,
        c.seed,
        serde_json::to_value(c.mode).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    );
    if report.agents.is_empty() {
        s.push_str("no agents\n");
        return s;
    }
    let first = if report.bucketing.is_some() { "SR (%) by bucket" } else { "Framework" };
    let w = report.agents.iter().map(|a| a.agent.len()).max().unwrap_or(0).max(first.len());
    let _ = writeln!(s, "{:<w$}  {:>7}  {:>13}  {:>11}", "Framework", "SR (%)", "Average Steps", "Steps (all)");
    for a in &report.agents {
        let _ = writeln!(
            s,
            "{:<w$}  {:>7.1}  {:>13}  {:>11}",
            a.agent,
            a.success_rate * 100.0,
            steps(a.average_steps),
            steps(a.average_steps_all)
        );
    }
    s.push_str("Average Steps counts successful episodes; Steps (all) counts every episode.\n");

    if let Some(b) = &report.bucketing {
        s.push('\n');
        let heads: Vec<String> = Bucket::ALL
            .iter()
            .map(|k| format!("{k} {} (n={})", k.range(), b.count(*k)))
            .collect();
        let _ = write!(s, "{:<w$}", "SR (%) by bucket");
        for h in &heads {
            let _ = write!(s, "  {h:>17}");
        }
        s.push('\n');
        for a in &report.agents {
            let _ = write!(s, "{:<w$}", a.agent);
            for k in Bucket::ALL {
                let cell = a.buckets.get(&k).map_or_else(|| "-".into(), |x| format!("{:.1}", x.success_rate * 100.0));
                let _ = write!(s, "  {cell:>17}");
            }
            s.push('\n');
        }
        if !b.unsolvable.is_empty() {
            let _ = writeln!(s, "unsolvable by the baseline: {}", b.unsolvable.join(", "));
        }
    }

    s.push('\n');
    for a in &report.agents {
        let dist: Vec<String> = a.action_distribution.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "{} actions: {}", a.agent, dist.join(" "));
    }
    s
}
