//! Reality's explicit strategy.
//!
//! Reality answers `x_n = 0` until Skeptic offers a move for which
//! `K_{n-1} + f_n(s n) <= 1`, where `s` is the sign minimising `s M_n`; she
//! then answers `x_n = s n`. Capital therefore never exceeds 1, and every
//! answer other than 0 moves `S_n` by at least `n`. Against a negative
//! quadratic stake (modified protocol only) she answers with an outcome large
//! enough to push capital to -1 or below.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::protocol::{payoff, ProtocolVariant, Reality, RealityMove, RealityView, SkepticMove};
use crate::scalar::Scalar;

/// How Reality breaks the tie between `+n` and `-n` when `M_n = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignPolicy {
    #[default]
    #[serde(rename = "positive")]
    PreferPositive,
    #[serde(rename = "alternate")]
    Alternate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Positive => 1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }

    fn apply(self, magnitude: Scalar) -> Scalar {
        match self {
            Sign::Negative => -magnitude,
            Sign::Positive => magnitude,
        }
    }
}

/// Tie-break sign for the next tied trigger under [`SignPolicy::Alternate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TieState {
    next: Sign,
}

impl Default for TieState {
    fn default() -> Self {
        Self { next: Sign::Positive }
    }
}

impl TieState {
    pub fn next(&self) -> Sign {
        self.next
    }

    fn advance(&mut self) {
        self.next = self.next.flipped();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealityDecision {
    pub reality_move: RealityMove,
    pub triggered: bool,
    /// `None` iff the outcome is 0.
    pub chosen_sign: Option<Sign>,
    /// The move answers a negative quadratic stake.
    pub punished: bool,
}

impl RealityDecision {
    /// -1, 0 or +1.
    pub fn sign_value(&self) -> i8 {
        self.chosen_sign.map_or(0, Sign::value)
    }
}

/// The sign `s` minimising `s * stake_linear`; ties follow `policy`.
pub fn preferred_sign(stake_linear: &Scalar, policy: SignPolicy, tie: &TieState) -> Sign {
    if stake_linear.is_positive() {
        Sign::Negative
    } else if stake_linear.is_negative() {
        Sign::Positive
    } else {
        match policy {
            SignPolicy::PreferPositive => Sign::Positive,
            SignPolicy::Alternate => tie.next(),
        }
    }
}

/// Smallest integer `t >= n` with `capital_before + f_n(sign * t) <= -1`.
///
/// Requires `stake_quadratic < 0`, which makes the payoff a concave quadratic
/// in `t` tending to minus infinity.
pub fn punishment_magnitude(
    capital_before: &Scalar,
    smove: &SkepticMove,
    variance: &Scalar,
    n: u64,
    sign: Sign,
) -> RealityMove {
    debug_assert!(smove.stake_quadratic.is_negative());
    let mode = capital_before.mode();
    let floor = -mode.one();
    let lethal = |t: &BigInt| {
        let outcome = sign.apply(mode.from_bigint(t));
        capital_before + &payoff(smove, variance, &outcome) <= floor
    };

    let start = BigInt::from(n);
    let t = if lethal(&start) {
        start
    } else {
        // Past a failing start the lethal set on [n, inf) is an up-set, by concavity.
        let mut lo = start.clone();
        let mut hi = &start * 2u8;
        let mut doublings = 0;
        while !lethal(&hi) {
            lo = hi.clone();
            hi *= 2u8;
            doublings += 1;
            if doublings > 4096 {
                // Only reachable with non-finite float capital.
                break;
            }
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) / 2u8;
            if lethal(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    RealityMove {
        outcome: sign.apply(mode.from_bigint(&t)),
    }
}

pub fn decide(
    capital_before: &Scalar,
    n: u64,
    variance: &Scalar,
    smove: &SkepticMove,
    variant: ProtocolVariant,
    policy: SignPolicy,
    tie: &mut TieState,
) -> RealityDecision {
    let mode = capital_before.mode();
    let sign = preferred_sign(&smove.stake_linear, policy, tie);
    let tied = smove.stake_linear.is_zero();

    if variant == ProtocolVariant::Modified && smove.stake_quadratic.is_negative() {
        if tied {
            tie.advance();
        }
        return RealityDecision {
            reality_move: punishment_magnitude(capital_before, smove, variance, n, sign),
            triggered: true,
            chosen_sign: Some(sign),
            punished: true,
        };
    }

    let candidate = sign.apply(mode.from_u64(n));
    // Same expression as the capital update, so float mode agrees with the ledger.
    if capital_before + &payoff(smove, variance, &candidate) <= mode.one() {
        if tied {
            tie.advance();
        }
        RealityDecision {
            reality_move: RealityMove { outcome: candidate },
            triggered: true,
            chosen_sign: Some(sign),
            punished: false,
        }
    } else {
        RealityDecision {
            reality_move: RealityMove { outcome: mode.zero() },
            triggered: false,
            chosen_sign: None,
            punished: false,
        }
    }
}

/// [`decide`] packaged as a stateful [`Reality`].
#[derive(Clone, Debug, Default)]
pub struct TriggerReality {
    policy: SignPolicy,
    tie: TieState,
}

impl TriggerReality {
    pub fn new(policy: SignPolicy) -> Self {
        Self {
            policy,
            tie: TieState::default(),
        }
    }

    pub fn policy(&self) -> SignPolicy {
        self.policy
    }
}

impl Reality for TriggerReality {
    fn respond(&mut self, view: &RealityView<'_>) -> RealityMove {
        decide(
            view.capital_before,
            view.n,
            view.variance,
            view.skeptic_move,
            view.variant,
            self.policy,
            &mut self.tie,
        )
        .reality_move
    }
}
