//! Round-trip channel assembly and the steady-state mode solver.

mod builder;
mod channel;
mod operator;
mod solver;

pub use builder::build_round_trip;
pub use channel::{
    ChannelKind, ChannelPath, ChannelSpec, ObstructionSpec, Padding, RxOptics, TxOptics,
};
pub use operator::{CompiledOperator, Op, OpticalOperator, Segment, Stage};
pub use solver::{
    seed_field, segment_efficiencies, segment_efficiencies_of, solve_channel, solve_steady_state,
    SegmentEfficiencies, SolverOptions, SteadyStateResult, STABLE_PASSES,
};
