//! Deterministic Skeptic strategies.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::Error;
use crate::protocol::{RoundRecord, Skeptic, SkepticMove};
use crate::scalar::{NumericMode, Scalar};

/// What Skeptic knows when he moves: the round, his capital, the announced
/// variance and the ledger so far.
#[derive(Debug, Clone, Copy)]
pub struct SkepticView<'a> {
    pub n: u64,
    pub capital_before: &'a Scalar,
    pub variance: &'a Scalar,
    pub history: &'a [RoundRecord],
}

impl SkepticView<'_> {
    pub fn mode(&self) -> NumericMode {
        self.capital_before.mode()
    }
}

/// Margin the avoider adds on top of its break-even quadratic stake.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsilonSchedule {
    Constant(BigRational),
    Geometric { epsilon: BigRational, ratio: BigRational },
}

impl EpsilonSchedule {
    pub fn constant(epsilon: BigRational) -> Result<Self, Error> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidSchedule("epsilon must be positive"));
        }
        Ok(EpsilonSchedule::Constant(epsilon))
    }

    pub fn geometric(epsilon: BigRational, ratio: BigRational) -> Result<Self, Error> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidSchedule("epsilon must be positive"));
        }
        if !ratio.is_positive() || ratio >= BigRational::one() {
            return Err(Error::InvalidSchedule("ratio must lie in (0, 1)"));
        }
        Ok(EpsilonSchedule::Geometric { epsilon, ratio })
    }

    /// `eps` or `eps * ratio^n`.
    pub fn value_at(&self, n: u64, mode: NumericMode) -> Scalar {
        match self {
            EpsilonSchedule::Constant(eps) => mode.from_rational(eps),
            EpsilonSchedule::Geometric { epsilon, ratio } => {
                let exp = u32::try_from(n).unwrap_or(u32::MAX);
                &mode.from_rational(epsilon) * &mode.from_rational(ratio).pow(exp)
            }
        }
    }
}

pub fn zero_next(view: &SkepticView<'_>) -> SkepticMove {
    SkepticMove::zero(view.mode())
}

/// Smallest quadratic stake that keeps Reality's trigger test failing, plus the
/// schedule margin. When `n^2 <= v_n` no legal stake avoids the trigger and
/// the avoider stakes nothing.
pub fn avoider_next(view: &SkepticView<'_>, schedule: &EpsilonSchedule) -> SkepticMove {
    let mode = view.mode();
    let n_squared = mode.from_u64(view.n).pow(2);
    if n_squared <= *view.variance {
        return SkepticMove::zero(mode);
    }
    let deficit = &mode.one() - view.capital_before;
    let break_even = (&deficit / &(&n_squared - view.variance)).max(mode.zero());
    SkepticMove::new(mode.zero(), break_even + schedule.value_at(view.n, mode))
}

pub fn momentum_next(view: &SkepticView<'_>, m: &Scalar) -> SkepticMove {
    let mode = view.mode();
    SkepticMove::new(m.to_mode(mode), mode.zero())
}

/// Legal only in the modified protocol; validation rejects it otherwise.
pub fn negative_v_next(view: &SkepticView<'_>, v_stake: &Scalar) -> SkepticMove {
    let mode = view.mode();
    SkepticMove::new(mode.zero(), v_stake.to_mode(mode))
}

/// `script[n]`, counting rounds from 1.
pub fn replay_next(view: &SkepticView<'_>, script: &[SkepticMove]) -> Result<SkepticMove, Error> {
    let index = usize::try_from(view.n).ok().and_then(|n| n.checked_sub(1));
    index
        .and_then(|i| script.get(i))
        .map(|m| m.to_mode(view.mode()))
        .ok_or(Error::ScriptExhausted {
            round: view.n,
            len: script.len(),
        })
}

/// A strategy as named on the command line, before any file is read.
#[derive(Clone, Debug, PartialEq)]
pub enum SkepticSpec {
    Zero,
    Avoider(EpsilonSchedule),
    Momentum(BigRational),
    NegativeV(BigRational),
    Replay(PathBuf),
}

/// A ready-to-play Skeptic.
#[derive(Clone, Debug, PartialEq)]
pub enum SkepticStrategy {
    Zero,
    Avoider(EpsilonSchedule),
    Momentum(Scalar),
    NegativeV(Scalar),
    Replay(Vec<SkepticMove>),
}

impl SkepticStrategy {
    /// Resolves `spec`, reading the replay script from disk if needed.
    pub fn from_spec(spec: &SkepticSpec) -> Result<Self, Error> {
        Ok(match spec {
            SkepticSpec::Zero => SkepticStrategy::Zero,
            SkepticSpec::Avoider(schedule) => SkepticStrategy::Avoider(schedule.clone()),
            SkepticSpec::Momentum(m) => SkepticStrategy::Momentum(Scalar::Exact(m.clone())),
            SkepticSpec::NegativeV(v) => SkepticStrategy::NegativeV(Scalar::Exact(v.clone())),
            SkepticSpec::Replay(path) => SkepticStrategy::Replay(load_script(path)?),
        })
    }
}

/// Reads the `M`/`V` columns of a trace file.
pub fn load_script(path: &Path) -> Result<Vec<SkepticMove>, Error> {
    let records = crate::trace::read_trace_file(path)?;
    Ok(records.iter().map(RoundRecord::skeptic_move).collect())
}

impl Skeptic for SkepticStrategy {
    fn next_move(&mut self, view: &SkepticView<'_>) -> Result<SkepticMove, Error> {
        Ok(match self {
            SkepticStrategy::Zero => zero_next(view),
            SkepticStrategy::Avoider(schedule) => avoider_next(view, schedule),
            SkepticStrategy::Momentum(m) => momentum_next(view, m),
            SkepticStrategy::NegativeV(v) => negative_v_next(view, v),
            SkepticStrategy::Replay(script) => return replay_next(view, script),
        })
    }
}

impl Skeptic for Box<dyn Skeptic + '_> {
    fn next_move(&mut self, view: &SkepticView<'_>) -> Result<SkepticMove, Error> {
        (**self).next_move(view)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Exact(rat(n, d))
    }

    fn view<'a>(n: u64, k: &'a Scalar, v: &'a Scalar) -> SkepticView<'a> {
        SkepticView {
            n,
            capital_before: k,
            variance: v,
            history: &[],
        }
    }

    fn eps() -> EpsilonSchedule {
        EpsilonSchedule::constant(rat(1, 1_000_000)).unwrap()
    }

    #[test]
    fn zero_examples() {
        let (k, v) = (q(1, 1), q(1, 1));
        assert_eq!(zero_next(&view(1, &k, &v)), SkepticMove::zero(NumericMode::Exact));
        assert_eq!(zero_next(&view(7, &k, &v)), SkepticMove::zero(NumericMode::Exact));
        let broke = q(-5, 1);
        assert_eq!(zero_next(&view(3, &broke, &v)), SkepticMove::zero(NumericMode::Exact));
    }

    #[test]
    fn avoider_examples() {
        let (k, v) = (q(1, 1), q(1, 2));
        let m = avoider_next(&view(1, &k, &v), &eps());
        assert_eq!(m, SkepticMove::new(q(0, 1), q(1, 1_000_000)));

        let (k, v) = (q(3, 4), q(1, 1));
        let m = avoider_next(&view(2, &k, &v), &eps());
        assert_eq!(m.stake_quadratic, &q(1, 12) + &q(1, 1_000_000));
        assert_eq!(m.stake_linear, q(0, 1));

        let (k, v) = (q(1, 1), q(2, 1));
        let geo = EpsilonSchedule::geometric(rat(1, 8), rat(1, 2)).unwrap();
        assert_eq!(avoider_next(&view(1, &k, &v), &geo), SkepticMove::zero(NumericMode::Exact));
        assert_eq!(avoider_next(&view(1, &k, &v), &eps()), SkepticMove::zero(NumericMode::Exact));
    }

    #[test]
    fn avoider_never_stakes_below_margin() {
        // Capital above 1 would make the break-even stake negative.
        let (k, v) = (q(2, 1), q(0, 1));
        let m = avoider_next(&view(3, &k, &v), &eps());
        assert_eq!(m.stake_quadratic, q(1, 1_000_000));
    }

    #[test]
    fn momentum_and_negative_v_examples() {
        let (k, v) = (q(1, 1), q(1, 1));
        let vw = view(4, &k, &v);
        assert_eq!(momentum_next(&vw, &q(1, 1)), SkepticMove::new(q(1, 1), q(0, 1)));
        assert_eq!(momentum_next(&vw, &q(-3, 1)), SkepticMove::new(q(-3, 1), q(0, 1)));
        assert_eq!(momentum_next(&vw, &q(0, 1)), SkepticMove::zero(NumericMode::Exact));
        assert_eq!(negative_v_next(&vw, &q(-1, 10)), SkepticMove::new(q(0, 1), q(-1, 10)));
    }

    #[test]
    fn replay_examples() {
        let (k, v) = (q(1, 1), q(1, 1));
        let script = vec![SkepticMove::new(q(0, 1), q(1, 1)), SkepticMove::new(q(2, 1), q(0, 1))];
        assert_eq!(replay_next(&view(2, &k, &v), &script).unwrap(), script[1]);
        let short = &script[..1];
        assert!(matches!(
            replay_next(&view(2, &k, &v), short),
            Err(Error::ScriptExhausted { round: 2, len: 1 })
        ));
        let zeros = vec![SkepticMove::zero(NumericMode::Exact)];
        assert_eq!(replay_next(&view(1, &k, &v), &zeros).unwrap(), zeros[0]);
    }

    #[test]
    fn schedules_validate_and_evaluate() {
        assert!(EpsilonSchedule::constant(rat(0, 1)).is_err());
        assert!(EpsilonSchedule::geometric(rat(1, 8), rat(1, 1)).is_err());
        assert!(EpsilonSchedule::geometric(rat(-1, 8), rat(1, 2)).is_err());
        let geo = EpsilonSchedule::geometric(rat(1, 8), rat(1, 2)).unwrap();
        assert_eq!(geo.value_at(3, NumericMode::Exact), q(1, 64));
        assert_eq!(geo.value_at(3, NumericMode::Float).to_f64(), 1.0 / 64.0);
    }

    #[test]
    fn strategies_follow_the_game_mode() {
        let k = Scalar::Float(1.0);
        let v = Scalar::Float(0.5);
        let m = SkepticStrategy::Momentum(q(1, 3)).next_move(&view(1, &k, &v)).unwrap();
        assert_eq!(m.stake_linear.mode(), NumericMode::Float);
    }
}
