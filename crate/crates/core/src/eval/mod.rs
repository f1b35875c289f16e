//! Route scheduling, costing and feasibility checks for candidate solutions.

mod cost;
mod metrics;
mod report;
mod schedule;
mod solution;
mod validate;

pub use cost::{cost_breakdown, cost_breakdown_with, objective, price, Aggregates, CostBreakdown, EvalPolicy};
pub use metrics::{metrics, utilization, Metrics, VehicleMetrics};
pub use report::{report, vehicle_label, CostTable, FleetRow, FleetTable, ReportBundle, Row, TimelineRow};
pub use schedule::{schedule_route, RouteTotals, Schedule, StopSchedule};
pub(crate) use schedule::route_totals;
pub use solution::{Encoding, Route, Solution};
pub(crate) use validate::{excess, route_within_limits};
pub use validate::{validate_solution, validate_solution_with, Violation, ViolationKind};
