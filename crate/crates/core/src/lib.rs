//! Engine for the unbounded forecasting game between Forecaster, Skeptic and
//! Reality, with Reality playing the explicit trigger strategy that keeps
//! Skeptic's capital at or below 1 while forcing `S_n / n` away from 0 or
//! bankrupting him.
//!
//! All arithmetic runs either in exact rationals or in `f64`, chosen per game
//! through [`NumericMode`].

// `!(a <= b)` is deliberate: a NaN capital must count as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exhaustive;
pub mod forecaster;
pub mod protocol;
pub mod reality;
pub mod scalar;
pub mod skeptic;
pub mod trace;
pub mod verdict;

pub use error::{Error, MoveError};
pub use exhaustive::{quarter_grid, search_quadratic_grid, GridSearchReport};
pub use forecaster::{
    classify_divergence, kolmogorov_partial_sum, variance_at, Divergence, Forecaster, ForecasterSpec,
    KolmogorovLedger,
};
pub use protocol::{
    apply_round, payoff, run_game, validate_skeptic_move, ForecastMove, GameConfig, GameState, GameStatus,
    ProtocolVariant, Reality, RealityMove, RealityView, RoundRecord, Skeptic, SkepticMove, VarianceSource,
};
pub use reality::{decide, preferred_sign, punishment_magnitude, RealityDecision, Sign, SignPolicy, TieState, TriggerReality};
pub use scalar::{parse_rational, rat, NumericMode, Scalar};
pub use skeptic::{EpsilonSchedule, SkepticSpec, SkepticStrategy, SkepticView};
pub use trace::VerdictDocument;
pub use verdict::{analyze_trace, check_properties, PropertyOutcome, PropertyReport, Verdict};
