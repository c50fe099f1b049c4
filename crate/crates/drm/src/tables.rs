//! CSV outputs. Every table has a header row; floats use shortest
//! round-trip formatting and absent values are empty fields.

use std::io::Write;

use drm_core::mapf::{FlowOutcome, GraphKind, MetricsRow, RunRecord};
use drm_core::optim::BatchReport;

pub const METRICS_HEADER: [&str; 5] = ["batch", "batch_cost", "feasible", "grad_norm", "eval_cost"];
pub const RESULTS_HEADER: [&str; 9] = [
    "graph_kind",
    "agents",
    "run",
    "seed",
    "success",
    "avg_arrival",
    "makespan",
    "compute_seconds",
    "conflicts_resolved",
];
pub const SUMMARY_HEADER: [&str; 6] =
    ["graph_kind", "agents", "runs", "success_rate", "mean_avg_arrival", "mean_compute_seconds"];
pub const FLOW_HEADER: [&str; 6] = ["graph_kind", "agents", "radius", "seed", "events", "steps"];

/// One flow simulation, tagged with its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRow {
    pub kind: GraphKind,
    pub radius: f64,
    pub seed: u64,
    pub outcome: FlowOutcome,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn table<W: Write, const N: usize>(
    out: W,
    header: [&str; N],
    rows: impl IntoIterator<Item = [String; N]>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_metrics<W: Write>(out: W, reports: &[BatchReport]) -> csv::Result<()> {
    table(
        out,
        METRICS_HEADER,
        reports.iter().map(|r| {
            [
                r.batch_index.to_string(),
                r.batch_cost.to_string(),
                r.feasible_queries.to_string(),
                r.gradient_norm.to_string(),
                opt(r.eval_cost),
            ]
        }),
    )
}

pub fn write_results<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    table(
        out,
        RESULTS_HEADER,
        records.iter().map(|r| {
            [
                r.kind.name().to_owned(),
                r.agents.to_string(),
                r.run.to_string(),
                r.seed.to_string(),
                r.success.to_string(),
                opt(r.avg_arrival),
                opt(r.makespan),
                r.compute_seconds.to_string(),
                r.conflicts_resolved.to_string(),
            ]
        }),
    )
}

pub fn write_summary<W: Write>(out: W, rows: &[MetricsRow]) -> csv::Result<()> {
    table(
        out,
        SUMMARY_HEADER,
        rows.iter().map(|r| {
            [
                r.kind.name().to_owned(),
                r.agents.to_string(),
                r.runs.to_string(),
                r.success_rate.to_string(),
                opt(r.mean_avg_arrival),
                r.mean_compute_seconds.to_string(),
            ]
        }),
    )
}

pub fn write_flow<W: Write>(out: W, rows: &[FlowRow]) -> csv::Result<()> {
    table(
        out,
        FLOW_HEADER,
        rows.iter().map(|r| {
            [
                r.kind.name().to_owned(),
                r.outcome.agents.to_string(),
                r.radius.to_string(),
                r.seed.to_string(),
                r.outcome.events.to_string(),
                r.outcome.steps.to_string(),
            ]
        }),
    )
}
