use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ufp_core::{
    decide, quarter_grid, rat, run_game, search_quadratic_grid, EpsilonSchedule, Forecaster, ForecasterSpec,
    GameConfig, NumericMode, ProtocolVariant, Scalar, SignPolicy, SkepticMove, SkepticStrategy, TieState,
    TriggerReality,
};

fn power(c: (i64, i64), p: i32) -> Forecaster {
    Forecaster::from_spec(&ForecasterSpec::power_law(rat(c.0, c.1), p).unwrap()).unwrap()
}

fn avoider() -> SkepticStrategy {
    SkepticStrategy::Avoider(EpsilonSchedule::constant(rat(1, 1_000_000)).unwrap())
}

fn play(forecaster: &Forecaster, skeptic: &SkepticStrategy, mode: NumericMode, horizon: u64) -> usize {
    let mut skeptic = skeptic.clone();
    let mut reality = TriggerReality::new(SignPolicy::PreferPositive);
    let config = GameConfig::new(horizon, mode, ProtocolVariant::Standard);
    run_game(forecaster, &mut skeptic, &mut reality, &config).unwrap().len()
}

fn games(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_game");
    let matchups = [
        ("zero_vs_const", power((1, 1), 0), SkepticStrategy::Zero),
        ("momentum_vs_linear", power((1, 1), 1), SkepticStrategy::Momentum(Scalar::Exact(rat(-3, 1)))),
        ("avoider_vs_quadratic", power((1, 2), 2), avoider()),
    ];
    for (name, forecaster, skeptic) in &matchups {
        for (mode, horizon) in [(NumericMode::Exact, 500), (NumericMode::Float, 10_000)] {
            let id = BenchmarkId::new(*name, format!("{mode:?}/{horizon}"));
            group.bench_with_input(id, &horizon, |b, &h| b.iter(|| play(forecaster, skeptic, mode, h)));
        }
    }
    group.finish();
}

fn decisions(c: &mut Criterion) {
    for mode in [NumericMode::Exact, NumericMode::Float] {
        let capital = Scalar::Exact(rat(7, 9)).to_mode(mode);
        let variance = Scalar::Exact(rat(5000, 1)).to_mode(mode);
        let smove = SkepticMove::new(Scalar::Exact(rat(-1, 3)).to_mode(mode), Scalar::Exact(rat(1, 50)).to_mode(mode));
        c.bench_function(&format!("decide/{mode:?}"), |b| {
            b.iter(|| {
                let mut tie = TieState::default();
                decide(
                    black_box(&capital),
                    100,
                    &variance,
                    &smove,
                    ProtocolVariant::Standard,
                    SignPolicy::Alternate,
                    &mut tie,
                )
            })
        });
    }
}

fn exhaustive(c: &mut Criterion) {
    let forecaster = power((1, 2), 2);
    let grid = quarter_grid();
    let mut group = c.benchmark_group("exhaustive");
    group.sample_size(10);
    for horizon in [3u32, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |b, &h| {
            b.iter(|| search_quadratic_grid(&forecaster, h, &grid, SignPolicy::PreferPositive).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, games, decisions, exhaustive);
criterion_main!(benches);
