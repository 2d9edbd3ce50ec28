//! Cost models and benchmark-table analytics.

mod benchmarks;
mod cost;
mod loss;
mod lr;
mod report;
mod svg;

pub use benchmarks::{
    default_groups, group_deltas, relative_delta, table_average, Aggregation, BenchmarkRow, BenchmarkTable,
    GroupDeltas,
};
pub use cost::{
    estimate_memory, scaling_efficiency, tokens_per_parameter, DtypeBytes, MemoryEstimate, ScalingEfficiency,
    TrainRunSpec,
};
pub use loss::{loss_gap, LossCurve, LossGap};
pub use lr::{lr_at, LrSchedule};
pub use report::{emit_report, ReportInputs};
