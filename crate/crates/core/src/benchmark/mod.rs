//! Task suites, success oracles, difficulty buckets, suite runs and reports.

mod report;
mod run;
mod task;

pub use report::{emit_report, parse_report, render_table, ReportError, ReportFormat};
pub use run::{
    bucket_tasks, run_suite, summarize, trial_seed, AgentReport, BenchError, Bucket, BucketStats, Bucketing, Report,
    RunConfig, TaskStats, REPORT_VERSION,
};
pub(crate) use task::{matched_leaves, oracle_holds};
pub use task::{check_oracle, load_page, load_suite, parse_suite, Assertion, EventAssertion, Goal, SuiteError, TaskSpec, SUITE_VERSION};

#[cfg(test)]
mod tests;
