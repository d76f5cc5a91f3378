use duopoly_core::sim::{
    play_round_game, sample_path, simulate_game, trial_rng, Measure, SimConfig, StrategyRule,
};
use duopoly_core::{Agent, Game, Model, RegulatorLaw};

#[test]
fn follower_value_matches_discounted_passage_payoff() {
    // F(y) = E[e^{-r tau} (D2 Y_tau / delta - K)] with tau the first passage to Y_F
    let model = Model::<f64>::baseline();
    let y0 = 1.2;
    let config = SimConfig::new(1, 1.0 / 500.0, 40.0, 5).unwrap();
    let (r, d2) = (model.params().r, model.params().d2);
    let n = 4000;
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for i in 0..n {
        let path = sample_path(&model, y0, &config, &mut trial_rng(5, i)).unwrap();
        let x = match path.first_passage(model.y_f()) {
            Some(t) => {
                let y = path.values[(t / path.dt).round() as usize];
                (-r * t).exp() * (model.perpetuity(d2, y) - model.params().k)
            }
            None => (-r * 40.0).exp() * model.follower_value(*path.values.last().unwrap()),
        };
        sum += x;
        sum2 += x * x;
    }
    let mean = sum / n as f64;
    let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
    let f = model.follower_value(y0);
    assert!((mean - f).abs() < 4.0 * se, "{mean} +- {se} vs {f}");
}

#[test]
fn refusing_regulator_leaves_outcomes_unchanged() {
    let game = Game::<f64>::baseline();
    let rules = [
        StrategyRule::equilibrium(&game, Agent::One),
        StrategyRule::equilibrium(&game, Agent::Two),
    ];
    let config = SimConfig::new(20_000, 1.0 / 100.0, 2.0, 8).unwrap();
    let refusing = RegulatorLaw::new(0.4, 0.3, 0.12, 0.18).unwrap();
    let y0 = 1.0;
    let report = simulate_game(&game, &refusing, y0, &rules, &config).unwrap();
    let want = game.strategy_at(y0).unwrap().settled.unwrap();
    for (freq, p) in report
        .settled
        .iter()
        .zip([want.leader1, want.leader2, want.shared])
    {
        assert!(freq.agrees_with(p, 4.0).unwrap(), "{} vs {p}", freq.value());
    }
}

#[test]
fn physical_measure_drifts_faster() {
    let model = Model::<f64>::baseline();
    let mut config = SimConfig::new(1, 0.1, 50.0, 1).unwrap();
    let mean_log = |config: &SimConfig<f64>| {
        (0..400)
            .map(|i| {
                sample_path(&model, 1.0, config, &mut trial_rng(1, i))
                    .unwrap()
                    .values
                    .last()
                    .unwrap()
                    .ln()
            })
            .sum::<f64>()
            / 400.0
    };
    let rn = mean_log(&config);
    config.measure = Measure::Physical;
    let phys = mean_log(&config);
    // drifts differ by eta * lambda over 50 years
    assert!(phys > rn);
    assert!(((phys - rn) - 0.2 / 30.0 * 50.0).abs() < 1e-9);
}

#[test]
fn stackelberg_coin_splits_simultaneous_moves() {
    let law = RegulatorLaw::stackelberg();
    let mut rng = trial_rng(3, 0);
    let ones = (0..10_000)
        .filter(|_| {
            matches!(
                play_round_game(1.0, 1.0, &law, &mut rng).unwrap().settled,
                duopoly_core::sim::SettledRole::Leader(Agent::One)
            )
        })
        .count();
    assert!((ones as f64 / 10_000.0 - 0.5).abs() < 0.02);
}
