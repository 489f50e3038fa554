//! Catching-up time stepping for first- and second-order sweeping processes
//! and the reduction from second to first order.

mod scenario;
mod scheme;
mod trajectory;

pub use crate::grid::TimeGrid;
pub use scenario::{FirstOrderScenario, Quadrature, Scenario, SecondOrderScenario};
pub use scheme::{
    catching_up_first_order, catching_up_second_order, reduce_second_to_first, solve,
    split_reduced, stack_reduced,
};
pub use trajectory::Trajectory;
