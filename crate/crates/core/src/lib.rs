//! Dissipative solutions of the Camassa–Holm equation
//!
//! ```text
//! u_t + u u_x = -p_x,    p = ¼ ∫ e^{-|x-z|} (2u² + u_x²) dz
//! ```
//!
//! computed in Lagrangian variables. Eulerian data `(u, ν)` is mapped to a
//! quadruple `(y, U, V, H)` of characteristics, integrated in time with RK4,
//! and mapped back; energy that concentrates when characteristics collide is
//! removed from the solution but kept in `ν`.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64` and `f32`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod eulerian;
pub mod evolution;
pub mod kernel;
pub mod lagrangian;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod transform;

pub use diagnostics::DiagnosticsConfig;
pub use error::{Error, Result};
pub use eulerian::{Atom, EulerianState};
pub use evolution::{breaking_profile, compute_pq, solve, solve_from, step, PQField, Snapshot, SolverConfig, Trajectory};
pub use lagrangian::{LagrangianState, RelabelFunction};
pub use oracle::PeakonAntipeakon;
pub use report::{CheckResult, DiagnosticsReport};
pub use scalar::Scalar;
pub use transform::{eul_to_lag, eul_to_lag_with_label, lag_to_eul, lag_to_eul_native};

pub type EulerianStateF64 = EulerianState<f64>;
pub type EulerianStateF32 = EulerianState<f32>;
pub type LagrangianStateF64 = LagrangianState<f64>;
pub type LagrangianStateF32 = LagrangianState<f32>;
pub type RelabelFunctionF64 = RelabelFunction<f64>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type SnapshotF64 = Snapshot<f64>;
pub type PeakonAntipeakonF64 = PeakonAntipeakon<f64>;
pub type DiagnosticsReportF64 = DiagnosticsReport<f64>;
pub type AtomF64 = Atom<f64>;
