use moglb_core::environment::ArmSet;
use moglb_core::glm::{GlmObjective, LinkKind};
use moglb_core::pareto::{pareto_front, RewardMatrix};
use moglb_core::policies::{build_policy, GammaMode, MoglbConfig, MoglbPolicy, PolicySettings};
use moglb_core::seeding::{derive_seed, TrialStreams};
use moglb_core::{AlgoKind, Policy, ProblemInstance};

fn play(inst: &ProblemInstance, policy: &mut dyn Policy, rounds: usize, seed: u64) {
    let mut streams = TrialStreams::new(seed);
    for t in 1..=rounds {
        let arm = policy.select_arm(t, &mut streams.policy).unwrap();
        let y = inst.sample_rewards(arm, &mut streams.env).unwrap();
        policy.update(arm, &y).unwrap();
    }
}

fn moglb(inst: &ProblemInstance, gamma_mode: GammaMode) -> MoglbPolicy {
    MoglbPolicy::for_instance(
        inst,
        MoglbConfig {
            gamma_mode,
            ..MoglbConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn estimates_stay_in_the_ball() {
    for seed in 0..5 {
        let inst = ProblemInstance::generate(6, 3, seed, 1000).unwrap();
        let mut p = moglb(&inst, GammaMode::Tuned { c: 0.1 });
        let mut streams = TrialStreams::new(derive_seed(seed, &[1]));
        for t in 1..=400 {
            let arm = p.select_arm(t, &mut streams.policy).unwrap();
            let y = inst.sample_rewards(arm, &mut streams.env).unwrap();
            p.update(arm, &y).unwrap();
            for th in p.estimates() {
                let norm = th.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(norm <= 1.0 + 1e-9, "norm {norm} at t={t}");
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn bonus_shrinks_as_design_grows() {
    // with gamma held fixed, sqrt(gamma) * ||x||_{Z^-1} never grows
    let inst = ProblemInstance::generate(4, 2, 3, 1000).unwrap();
    let gamma = 2.0;
    let bonus = |p: &MoglbPolicy| -> Vec<f64> {
        inst.arms()
            .iter()
            .map(|x| p.ucb_entry(0, x, gamma) - dot(&p.estimates()[0], x))
            .collect()
    };
    let mut streams = TrialStreams::new(9);
    let mut p = moglb(&inst, GammaMode::Tuned { c: 0.1 });
    let mut prev = bonus(&p);
    for t in 1..=300 {
        let arm = p.select_arm(t, &mut streams.policy).unwrap();
        let y = inst.sample_rewards(arm, &mut streams.env).unwrap();
        p.update(arm, &y).unwrap();
        let now = bonus(&p);
        for (a, b) in now.iter().zip(&prev) {
            assert!(*a <= b + 1e-12, "bonus grew from {b} to {a} at t={t}");
        }
        prev = now;
    }
}

#[test]
fn ucb_entries_never_increase_for_frozen_estimates() {
    // replay a recorded trajectory of contexts with the estimate pinned at zero
    let inst = ProblemInstance::generate(5, 2, 21, 1000).unwrap();
    let mut streams = TrialStreams::new(4);
    let mut p = moglb(&inst, GammaMode::Tuned { c: 0.1 });
    let mut contexts = Vec::new();
    for t in 1..=200 {
        let arm = p.select_arm(t, &mut streams.policy).unwrap();
        let y = inst.sample_rewards(arm, &mut streams.env).unwrap();
        p.update(arm, &y).unwrap();
        contexts.push(inst.arms().arm(arm).to_vec());
    }

    let mut frozen = MoglbPolicy::new(
        inst.arms().clone(),
        vec![LinkKind::Logit],
        inst.pooled_bounds().0,
        1.0,
        MoglbConfig::default(),
    )
    .unwrap();
    let gamma = 0.7;
    let mut prev = frozen.ucb_matrix(gamma);
    for x in &contexts {
        // reward equal to the logit mean at zero leaves the estimate in place
        frozen.observe(x, &[0.5]).unwrap();
        let now = frozen.ucb_matrix(gamma);
        for (a, b) in now.values().iter().zip(prev.values()) {
            assert!(*a <= b + 1e-12);
        }
        prev = now;
    }
    assert!(frozen.estimates()[0].iter().all(|&v| v == 0.0));
}

#[test]
fn front_ignores_monotone_links() {
    for seed in 0..10 {
        let inst = ProblemInstance::generate(5, 3, seed, 1000).unwrap();
        let mut p = moglb(&inst, GammaMode::Tuned { c: 0.3 });
        play(&inst, &mut p, 150, seed + 100);
        let ucb = p.ucb_matrix(p.gamma());
        let squashed = RewardMatrix::new(
            ucb.num_arms(),
            ucb.num_objectives(),
            ucb.values()
                .iter()
                .map(|&z| LinkKind::Logit.value(z))
                .collect(),
        )
        .unwrap();
        assert_eq!(pareto_front(&ucb), pareto_front(&squashed));
        assert_eq!(p.current_front(), Some(&pareto_front(&ucb)));
    }
}

/// 99.9% quantile of chi-square with 19 degrees of freedom.
const CHI2_19_999: f64 = 43.82019596451753;

#[test]
fn first_pick_is_uniform() {
    let inst = ProblemInstance::generate(5, 5, 8, 1000).unwrap();
    let k = inst.num_arms();
    assert_eq!(k, 20);
    let draws = 20_000;
    let mut counts = vec![0usize; k];
    for s in 0..draws {
        let mut p = moglb(&inst, GammaMode::Tuned { c: 0.1 });
        let mut streams = TrialStreams::new(derive_seed(77, &[s]));
        counts[p.select_arm(1, &mut streams.policy).unwrap()] += 1;
    }
    let expected = draws as f64 / k as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < CHI2_19_999, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn duplicate_arms_are_played_equally() {
    let arms = ArmSet::new(vec![
        vec![0.6, 0.1],
        vec![0.6, 0.1],
        vec![-0.3, 0.5],
        vec![0.1, -0.6],
    ])
    .unwrap();
    let objectives = vec![
        GlmObjective::new(LinkKind::Logit, vec![0.8, 0.2], 1.0).unwrap(),
        GlmObjective::new(LinkKind::Probit, vec![0.1, 0.9], 1.0).unwrap(),
    ];
    let inst = ProblemInstance::new(arms, objectives).unwrap();
    let (mut a, mut b) = (0u64, 0u64);
    for s in 0..200 {
        let mut p = moglb(&inst, GammaMode::Tuned { c: 0.1 });
        let mut streams = TrialStreams::new(derive_seed(5, &[s]));
        for t in 1..=100 {
            let arm = p.select_arm(t, &mut streams.policy).unwrap();
            let front = p.current_front().unwrap();
            assert_eq!(front.contains(0), front.contains(1));
            match arm {
                0 => a += 1,
                1 => b += 1,
                _ => {}
            }
            let y = inst.sample_rewards(arm, &mut streams.env).unwrap();
            p.update(arm, &y).unwrap();
        }
    }
    let n = (a + b) as f64;
    let z = (a as f64 - n / 2.0) / (n / 4.0).sqrt();
    assert!(n > 1000.0);
    assert!(z.abs() < 4.0, "{a} vs {b}");
}

#[test]
fn baselines_pull_every_arm_before_exploiting() {
    let inst = ProblemInstance::generate(4, 3, 12, 1000).unwrap();
    let k = inst.num_arms();
    for algo in [AlgoKind::Pucb, AlgoKind::Sucb, AlgoKind::Pts] {
        let mut p = build_policy(algo, &inst, &PolicySettings::default()).unwrap();
        let mut streams = TrialStreams::new(31);
        let mut seen = vec![false; k];
        for t in 1..=k {
            let arm = p.select_arm(t, &mut streams.policy).unwrap();
            assert!(
                !seen[arm],
                "{algo} repeated arm {arm} during initialization"
            );
            seen[arm] = true;
            let y = inst.sample_rewards(arm, &mut streams.env).unwrap();
            p.update(arm, &y).unwrap();
        }
        assert!(seen.iter().all(|&s| s));
    }
}

#[test]
fn select_update_must_alternate() {
    let inst = ProblemInstance::generate(3, 2, 0, 1000).unwrap();
    for algo in AlgoKind::ALL {
        let mut p = build_policy(algo, &inst, &PolicySettings::default()).unwrap();
        let mut streams = TrialStreams::new(1);
        let arm = p.select_arm(1, &mut streams.policy).unwrap();
        assert!(p.select_arm(2, &mut streams.policy).is_err(), "{algo}");
        let y = inst.sample_rewards(arm, &mut streams.env).unwrap();
        assert!(p.update((arm + 1) % inst.num_arms(), &y).is_err(), "{algo}");
        p.update(arm, &y).unwrap();
        assert!(p.update(arm, &y).is_err(), "{algo}");
    }
}
