pub mod classical;
pub mod error;
pub mod inequality;
pub mod io;
pub mod linalg;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod tol;

pub use classical::{BestStrategy, LhvAssignment, MessagingStrategy};
pub use error::{CcrError, Result};
pub use inequality::{InequalitySpec, Rational, SettingVector};
pub use linalg::{ComplexMatrix, PauliLabel, SpectralResult};
pub use protocol::{
    BlockSignTables, GameRound, MeasurementDistribution, Mode, SimParams, SimulationReport,
    Simulator,
};
pub use quantum::{BellOperator, DensityState, ObservableAssignment};
