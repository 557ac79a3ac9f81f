//! Moves, capital accounting and the round loop of the unbounded forecasting
//! protocol with zero forecast means.
//!
//! Each round `n`: Forecaster announces a variance `v_n >= 0`, Skeptic stakes
//! `(M_n, V_n)`, Reality announces `x_n`, and Skeptic's capital moves by
//! `M_n x_n + V_n (x_n^2 - v_n)`. Skeptic starts with capital 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, MoveError};
use crate::scalar::{NumericMode, Scalar};
use crate::skeptic::SkepticView;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolVariant {
    /// `V_n >= 0`.
    #[default]
    Standard,
    /// Any real `V_n`.
    Modified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForecastMove {
    pub variance: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkepticMove {
    pub stake_linear: Scalar,
    pub stake_quadratic: Scalar,
}

impl SkepticMove {
    pub fn new(stake_linear: Scalar, stake_quadratic: Scalar) -> Self {
        Self {
            stake_linear,
            stake_quadratic,
        }
    }

    pub fn zero(mode: NumericMode) -> Self {
        Self::new(mode.zero(), mode.zero())
    }

    pub fn to_mode(&self, mode: NumericMode) -> Self {
        Self::new(self.stake_linear.to_mode(mode), self.stake_quadratic.to_mode(mode))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealityMove {
    pub outcome: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameStatus {
    Running,
    /// First round whose post-round capital was negative.
    SkepticBankrupt(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    /// Next round to play.
    pub round: u64,
    /// `K_{round-1}`.
    pub capital: Scalar,
    /// `S_{round-1}`.
    pub outcome_sum: Scalar,
    pub variant: ProtocolVariant,
    pub status: GameStatus,
    pub stop_on_bankruptcy: bool,
}

impl GameState {
    pub fn new(variant: ProtocolVariant, mode: NumericMode) -> Self {
        Self {
            round: 1,
            capital: mode.one(),
            outcome_sum: mode.zero(),
            variant,
            status: GameStatus::Running,
            stop_on_bankruptcy: false,
        }
    }

    pub fn stopping_on_bankruptcy(mut self, stop: bool) -> Self {
        self.stop_on_bankruptcy = stop;
        self
    }

    pub fn mode(&self) -> NumericMode {
        self.capital.mode()
    }

    pub fn bankrupt_at(&self) -> Option<u64> {
        match self.status {
            GameStatus::Running => None,
            GameStatus::SkepticBankrupt(round) => Some(round),
        }
    }

    fn accepts_moves(&self) -> Result<(), Error> {
        match self.status {
            GameStatus::SkepticBankrupt(bankrupt_at) if self.stop_on_bankruptcy => {
                Err(Error::GameOver { bankrupt_at })
            }
            _ => Ok(()),
        }
    }
}

/// One line of the game ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub n: u64,
    pub variance: Scalar,
    pub stake_linear: Scalar,
    pub stake_quadratic: Scalar,
    pub outcome: Scalar,
    pub payoff: Scalar,
    pub capital_after: Scalar,
    pub outcome_sum_after: Scalar,
    /// `|x_n| >= n`.
    pub triggered: bool,
}

impl RoundRecord {
    pub fn skeptic_move(&self) -> SkepticMove {
        SkepticMove::new(self.stake_linear.clone(), self.stake_quadratic.clone())
    }
}

/// `f_n(x) = M x + V (x^2 - v)`.
pub fn payoff(smove: &SkepticMove, variance: &Scalar, outcome: &Scalar) -> Scalar {
    let linear = &smove.stake_linear * outcome;
    let quadratic = &smove.stake_quadratic * &(&(outcome * outcome) - variance);
    linear + quadratic
}

pub fn validate_skeptic_move(variant: ProtocolVariant, smove: &SkepticMove) -> Result<(), MoveError> {
    match variant {
        ProtocolVariant::Standard if smove.stake_quadratic.is_negative() => {
            Err(MoveError::NegativeQuadraticStake {
                stake: smove.stake_quadratic.to_string(),
            })
        }
        _ => Ok(()),
    }
}

pub(crate) fn reaches_round(outcome: &Scalar, n: u64) -> bool {
    let n = outcome.mode().from_u64(n);
    outcome.abs() >= n
}

/// Plays one round on `state`, returning the successor state and its ledger line.
pub fn apply_round(
    state: &GameState,
    fmove: &ForecastMove,
    smove: &SkepticMove,
    rmove: &RealityMove,
) -> Result<(GameState, RoundRecord), Error> {
    state.accepts_moves()?;
    let n = state.round;
    if fmove.variance.is_negative() {
        return Err(Error::NegativeVariance {
            round: n,
            value: fmove.variance.to_string(),
        });
    }
    validate_skeptic_move(state.variant, smove).map_err(|source| Error::IllegalMove { round: n, source })?;

    let gain = payoff(smove, &fmove.variance, &rmove.outcome);
    let capital_after = &state.capital + &gain;
    let outcome_sum_after = &state.outcome_sum + &rmove.outcome;
    let status = match state.status {
        GameStatus::Running if capital_after.is_negative() => GameStatus::SkepticBankrupt(n),
        status => status,
    };

    let record = RoundRecord {
        n,
        variance: fmove.variance.clone(),
        stake_linear: smove.stake_linear.clone(),
        stake_quadratic: smove.stake_quadratic.clone(),
        outcome: rmove.outcome.clone(),
        payoff: gain,
        capital_after: capital_after.clone(),
        outcome_sum_after: outcome_sum_after.clone(),
        triggered: reaches_round(&rmove.outcome, n),
    };
    let next = GameState {
        round: n + 1,
        capital: capital_after,
        outcome_sum: outcome_sum_after,
        variant: state.variant,
        status,
        stop_on_bankruptcy: state.stop_on_bankruptcy,
    };
    Ok((next, record))
}

/// Emits `v_n` for each round.
pub trait VarianceSource {
    fn variance(&self, n: u64, mode: NumericMode) -> Result<Scalar, Error>;
}

pub trait Skeptic {
    fn next_move(&mut self, view: &SkepticView<'_>) -> Result<SkepticMove, Error>;
}

/// Everything Reality sees before choosing `x_n`.
#[derive(Debug, Clone, Copy)]
pub struct RealityView<'a> {
    pub n: u64,
    pub capital_before: &'a Scalar,
    pub variance: &'a Scalar,
    pub skeptic_move: &'a SkepticMove,
    pub variant: ProtocolVariant,
}

pub trait Reality {
    fn respond(&mut self, view: &RealityView<'_>) -> RealityMove;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameConfig {
    pub horizon: u64,
    pub mode: NumericMode,
    pub variant: ProtocolVariant,
    pub stop_on_bankruptcy: bool,
}

impl GameConfig {
    pub fn new(horizon: u64, mode: NumericMode, variant: ProtocolVariant) -> Self {
        Self {
            horizon,
            mode,
            variant,
            stop_on_bankruptcy: false,
        }
    }

    pub fn stop_on_bankruptcy(mut self, stop: bool) -> Self {
        self.stop_on_bankruptcy = stop;
        self
    }
}

/// Plays up to `config.horizon` rounds and returns the ledger.
///
/// With `stop_on_bankruptcy` unset, play continues past bankruptcy so the
/// decline of Skeptic's capital stays visible in the trace.
pub fn run_game<F, S, R>(
    forecaster: &F,
    skeptic: &mut S,
    reality: &mut R,
    config: &GameConfig,
) -> Result<Vec<RoundRecord>, Error>
where
    F: VarianceSource + ?Sized,
    S: Skeptic + ?Sized,
    R: Reality + ?Sized,
{
    if config.horizon == 0 {
        return Err(Error::InvalidHorizon);
    }
    let mut state = GameState::new(config.variant, config.mode).stopping_on_bankruptcy(config.stop_on_bankruptcy);
    let mut records = Vec::with_capacity(config.horizon.min(1 << 20) as usize);

    for n in 1..=config.horizon {
        if config.stop_on_bankruptcy && state.bankrupt_at().is_some() {
            break;
        }
        let variance = forecaster.variance(n, config.mode)?;
        let smove = skeptic
            .next_move(&SkepticView {
                n,
                capital_before: &state.capital,
                variance: &variance,
                history: &records,
            })?
            .to_mode(config.mode);
        validate_skeptic_move(config.variant, &smove).map_err(|source| Error::IllegalMove { round: n, source })?;
        let rmove = reality.respond(&RealityView {
            n,
            capital_before: &state.capital,
            variance: &variance,
            skeptic_move: &smove,
            variant: config.variant,
        });
        let (next, record) = apply_round(&state, &ForecastMove { variance }, &smove, &rmove)?;
        state = next;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Exact(rat(n, d))
    }

    fn mv(m: Scalar, v: Scalar) -> SkepticMove {
        SkepticMove::new(m, v)
    }

    #[test]
    fn payoff_examples() {
        assert_eq!(payoff(&mv(q(0, 1), q(1, 2)), &q(2, 1), &q(1, 1)), q(-1, 2));
        assert_eq!(payoff(&mv(q(0, 1), q(0, 1)), &q(17, 3), &q(-9, 2)), q(0, 1));
        assert_eq!(payoff(&mv(q(2, 1), q(1, 1)), &q(1, 2), &q(-1, 1)), q(-3, 2));
    }

    #[test]
    fn validation_examples() {
        let neg = mv(q(0, 1), q(-1, 10));
        assert!(matches!(
            validate_skeptic_move(ProtocolVariant::Standard, &neg),
            Err(MoveError::NegativeQuadraticStake { .. })
        ));
        assert!(validate_skeptic_move(ProtocolVariant::Modified, &neg).is_ok());
        assert!(validate_skeptic_move(ProtocolVariant::Standard, &mv(q(-5, 1), q(0, 1))).is_ok());
    }

    fn fresh() -> GameState {
        GameState::new(ProtocolVariant::Standard, NumericMode::Exact)
    }

    fn play(state: &GameState, v: Scalar, m: Scalar, stake_v: Scalar, x: Scalar) -> (GameState, RoundRecord) {
        apply_round(
            state,
            &ForecastMove { variance: v },
            &mv(m, stake_v),
            &RealityMove { outcome: x },
        )
        .unwrap()
    }

    #[test]
    fn apply_round_trigger_example() {
        let (s, r) = play(&fresh(), q(1, 1), q(0, 1), q(0, 1), q(1, 1));
        assert_eq!((s.capital.clone(), s.outcome_sum.clone(), s.round), (q(1, 1), q(1, 1), 2));
        assert!(r.triggered);
        assert_eq!(s.status, GameStatus::Running);
    }

    #[test]
    fn apply_round_bankruptcy_example() {
        let (s, r) = play(&fresh(), q(1, 2), q(2, 1), q(1, 1), q(-1, 1));
        assert_eq!(s.capital, q(-1, 2));
        assert_eq!(s.outcome_sum, q(-1, 1));
        assert_eq!(s.round, 2);
        assert_eq!(s.status, GameStatus::SkepticBankrupt(1));
        assert_eq!(r.payoff, q(-3, 2));
    }

    #[test]
    fn apply_round_quiet_example() {
        let (s, r) = play(&fresh(), q(1, 1), q(0, 1), q(1, 4), q(0, 1));
        assert_eq!((s.capital, s.outcome_sum, s.round), (q(3, 4), q(0, 1), 2));
        assert!(!r.triggered);
    }

    #[test]
    fn bankruptcy_never_reverts() {
        let (s, _) = play(&fresh(), q(1, 2), q(2, 1), q(1, 1), q(-1, 1));
        // Capital back above zero; status stays at round 1.
        let (s, _) = play(&s, q(0, 1), q(10, 1), q(0, 1), q(2, 1));
        assert!(s.capital.is_positive());
        assert_eq!(s.status, GameStatus::SkepticBankrupt(1));
    }

    #[test]
    fn game_over_only_when_stopping() {
        let (s, _) = play(&fresh(), q(1, 2), q(2, 1), q(1, 1), q(-1, 1));
        let stopped = s.clone().stopping_on_bankruptcy(true);
        let err = apply_round(
            &stopped,
            &ForecastMove { variance: q(1, 1) },
            &mv(q(0, 1), q(0, 1)),
            &RealityMove { outcome: q(0, 1) },
        )
        .unwrap_err();
        assert!(matches!(err, Error::GameOver { bankrupt_at: 1 }));
    }

    #[test]
    fn apply_round_rejects_bad_inputs() {
        let err = apply_round(
            &fresh(),
            &ForecastMove { variance: q(-1, 1) },
            &mv(q(0, 1), q(0, 1)),
            &RealityMove { outcome: q(0, 1) },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeVariance { round: 1, .. }));
        let err = apply_round(
            &fresh(),
            &ForecastMove { variance: q(1, 1) },
            &mv(q(0, 1), q(-1, 1)),
            &RealityMove { outcome: q(0, 1) },
        )
        .unwrap_err();
        assert!(matches!(err, Error::IllegalMove { round: 1, .. }));
    }
}
