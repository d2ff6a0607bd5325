use craft_core::craft::{craft_run, draft_run, CraftConfig, CraftOutput};
use craft_core::eval::{population_accuracy_toy, CoordinateClass};
use craft_core::exbmdp::{generate_dataset, Agent, HistoryPolicy};
use craft_core::experiment::{agent_seed, generate_agent};
use craft_core::hypotheses::{ClassifierClass, CoordinateEncoders, EncoderClass, SignedCoordinates};
use craft_core::toy::ToyEnv;
use craft_core::Error;
use rand::RngCore;

fn run(env: &ToyEnv, n: usize, seed: u64, config: &CraftConfig) -> CraftOutput {
    let a = generate_agent(env, Agent::A, n, agent_seed(seed, Agent::A), 0.75).unwrap();
    let b = generate_agent(env, Agent::B, n, agent_seed(seed, Agent::B), 0.75).unwrap();
    let width = env.params.width;
    let (phi, g) = (CoordinateEncoders { width }, SignedCoordinates { width });
    let encs: Vec<&dyn EncoderClass> = vec![&phi; env.params.horizon];
    let cls: Vec<&dyn ClassifierClass> = vec![&g; env.params.horizon];
    craft_run(&a.strip_labels(), &b.strip_labels(), config, &encs, &cls).unwrap()
}

#[test]
fn perfectly_separated_agents_two_steps() {
    let env = ToyEnv::build(2, 128, 4).unwrap();
    let zero = HistoryPolicy(|_: usize, _: &[usize], _: &mut dyn RngCore| 0);
    let one = HistoryPolicy(|_: usize, _: &[usize], _: &mut dyn RngCore| 1);
    let a = generate_dataset(&env.spec, &zero, Agent::A, 200, 1).unwrap();
    let b = generate_dataset(&env.spec, &one, Agent::B, 200, 2).unwrap();
    let (phi, g) = (CoordinateEncoders { width: 128 }, SignedCoordinates { width: 128 });
    let out = craft_run(
        &a.strip_labels(),
        &b.strip_labels(),
        &CraftConfig::toy(),
        &[&phi, &phi],
        &[&g, &g],
    )
    .unwrap();
    assert_eq!(out.assignment.steps[1].len(), 2);
    let acc = population_accuracy_toy(&out.encoders[1], CoordinateClass::Plain, &env.params, 1).unwrap();
    assert_eq!(acc, 1.0);
    for st in &out.assignment.steps[1] {
        assert!(st.a.is_empty() != st.b.is_empty());
    }
}

#[test]
fn windows_and_assignments_are_disjoint() {
    let config = CraftConfig {
        max_states: 8,
        ..CraftConfig::toy()
    };
    for seed in 0..4u64 {
        let env = ToyEnv::build(30, 128, seed).unwrap();
        let n = 1000;
        let out = run(&env, n, seed, &config);
        assert!(out.assignment.is_disjoint(n, n));
        let first = &out.assignment.steps[0];
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].a, (0..n).collect::<Vec<_>>());
        assert_eq!(first[0].b, (0..n).collect::<Vec<_>>());
        for step in &out.steps {
            for scan in &step.scans {
                for w in scan.windows.windows(2) {
                    assert!(w[0].hi < w[1].lo, "{w:?}");
                }
                for w in &scan.windows {
                    assert!(w.lo <= w.start && w.start <= w.hi);
                }
            }
        }
    }
}

#[test]
fn large_samples_recover_every_step() {
    let env = ToyEnv::build(30, 128, 3).unwrap();
    let out = run(&env, 5000, 3, &CraftConfig::toy());
    for (t, e) in out.encoders.iter().enumerate() {
        let acc = population_accuracy_toy(e, CoordinateClass::Plain, &env.params, t).unwrap();
        assert_eq!(acc, 1.0, "t = {t}");
    }
    assert!(out.warnings.is_empty());
}

#[test]
fn tight_state_cap_is_a_precondition_failure() {
    let env = ToyEnv::build(30, 128, 0).unwrap();
    let a = generate_agent(&env, Agent::A, 60, 1, 0.75).unwrap().strip_labels();
    let b = generate_agent(&env, Agent::B, 60, 2, 0.75).unwrap().strip_labels();
    let (phi, g) = (CoordinateEncoders { width: 128 }, SignedCoordinates { width: 128 });
    let encs: Vec<&dyn EncoderClass> = vec![&phi; 30];
    let cls: Vec<&dyn ClassifierClass> = vec![&g; 30];
    let config = CraftConfig {
        max_states: 1,
        ..CraftConfig::toy()
    };
    assert!(matches!(
        craft_run(&a, &b, &config, &encs, &cls),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn two_step_baseline_requires_two_steps() {
    let env = ToyEnv::build(5, 8, 0).unwrap();
    let a = generate_agent(&env, Agent::A, 20, 1, 0.75).unwrap().strip_labels();
    let b = generate_agent(&env, Agent::B, 20, 2, 0.75).unwrap().strip_labels();
    let phi = CoordinateEncoders { width: 8 };
    assert!(matches!(draft_run(&a, &b, &phi), Err(Error::Precondition(_))));
}

#[test]
fn two_step_baseline_finds_the_biased_bit() {
    let env = ToyEnv::build(2, 32, 1).unwrap();
    let a = generate_agent(&env, Agent::A, 2000, 5, 0.75).unwrap().strip_labels();
    let b = generate_agent(&env, Agent::B, 2000, 6, 0.75).unwrap().strip_labels();
    let phi = SignedCoordinates { width: 32 };
    let out = draft_run(&a, &b, &phi).unwrap();
    let acc = population_accuracy_toy(&out.encoders[1], CoordinateClass::Signed, &env.params, 1).unwrap();
    assert_eq!(acc, 1.0);
    assert!(out.loss < 1.0);
}
