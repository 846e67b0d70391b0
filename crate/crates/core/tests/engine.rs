mod common;

use common::{Hashed, Reference};
use proptest::prelude::*;
use spikeforge_core::models::{make_brunel, make_synth, SynthParams};
use spikeforge_core::{
    build_adjacency_complete, ConnectRule, IdRange, Model, NeuronId, Partition, Step, TargetScope,
    TopologyDescriptor, Transmission, WorkerConfig, WorkerState,
};

fn single<M: Model>(model: M, desc: &TopologyDescriptor, config: WorkerConfig) -> WorkerState<M> {
    let p = Partition::single(desc.neurons()).unwrap();
    WorkerState::build(model, desc, p, 0, config).unwrap()
}

/// Drives `G` workers in lockstep, handing every worker's firings to all
/// others right after the step that produced them.
fn lockstep<M: Model + Clone>(
    model: &M,
    desc: &TopologyDescriptor,
    partition: Partition,
    config: WorkerConfig,
    steps: u32,
) -> Vec<(Step, NeuronId)> {
    let mut workers: Vec<_> = (0..partition.workers())
        .map(|g| WorkerState::build(model.clone(), desc, partition, g, config).unwrap())
        .collect();
    let mut train = Vec::new();
    for _ in 0..steps {
        let mut fired = Vec::new();
        for w in &mut workers {
            w.step();
            for (t, ids) in w.drain_outbox() {
                fired.extend(ids.into_iter().map(|id| (t, id)));
            }
        }
        fired.sort_unstable();
        for w in &mut workers {
            for &(t, id) in &fired {
                w.insert_remote(t, &[id]);
            }
        }
        train.extend(fired);
    }
    train
}

fn random_desc() -> impl Strategy<Value = TopologyDescriptor> {
    (40u32..600).prop_flat_map(|n| {
        let rule = (0..n, 0..n, 0..n, 0..n, 0.0f64..0.4).prop_map(|(a, b, c, d, p)| {
            ConnectRule::new(IdRange::new(a.min(b), a.max(b) + 1), IdRange::new(c.min(d), c.max(d) + 1), p)
        });
        proptest::collection::vec(rule, 1..4).prop_map(move |rules| TopologyDescriptor::new(n, rules).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn staged_transmission_matches_reference(
        desc in random_desc(),
        seed in any::<u64>(),
        delay in 1u32..5,
        tasks in 1usize..5,
    ) {
        let model = Hashed { drive: 0.05 };
        let mut config = WorkerConfig::new(seed, 1e-4, delay);
        config.tasks = tasks;
        let mut w = single(model, &desc, config);
        let mut r = Reference::from_adjacency(model, w.adjacency(), seed, 1e-4, delay);
        prop_assert_eq!(w.run(120), r.run(120));
        for f in 0..2 {
            prop_assert_eq!(w.neurons().column(f), r.neurons.column(f));
        }
    }

    #[test]
    fn train_is_independent_of_worker_count(
        desc in random_desc(),
        seed in any::<u64>(),
        delay in 1u32..4,
        workers in 2u32..6,
        slice in 1u32..40,
    ) {
        let model = Hashed { drive: 0.05 };
        let config = WorkerConfig::new(seed, 1e-4, delay);
        let oracle = single(model, &desc, config).run(80);
        let partition = Partition::new(desc.neurons(), workers, slice).unwrap();
        prop_assert_eq!(lockstep(&model, &desc, partition, config, 80), oracle);
    }

    #[test]
    fn delivered_count_is_conserved(desc in random_desc(), seed in any::<u64>()) {
        let mut w = single(Hashed { drive: 0.1 }, &desc, WorkerConfig::new(seed, 1e-4, 1));
        let mut last = Vec::new();
        for _ in 0..40 {
            let stats = w.step();
            let expect: usize = last.iter().map(|&s: &u32| w.adjacency().valid_len(s as usize)).sum();
            prop_assert_eq!(stats.delivered, expect as u64);
            last = w.drain_outbox().into_iter().flat_map(|(_, ids)| ids).collect();
        }
    }
}

#[test]
fn every_transmission_mode_agrees_with_the_reference_train() {
    let desc = TopologyDescriptor::new(
        500,
        [ConnectRule::new(IdRange::new(0, 500), IdRange::new(0, 500), 0.05)],
    )
    .unwrap();
    let model = Hashed { drive: 0.05 };
    let expect = Reference::from_adjacency(
        model,
        single(model, &desc, WorkerConfig::new(3, 1e-4, 2)).adjacency(),
        3,
        1e-4,
        2,
    )
    .run(200);
    for mode in [Transmission::Deterministic, Transmission::RowMajorDirect] {
        let mut config = WorkerConfig::new(3, 1e-4, 2);
        config.transmission = mode;
        assert_eq!(single(model, &desc, config).run(200), expect, "{mode:?}");
    }
}

#[test]
fn brunel_4k_matches_reference_states() {
    let b = make_brunel(0.32).unwrap();
    assert_eq!(b.descriptor.neurons(), 4000);
    let config = WorkerConfig::new(11, b.dt as f32, b.delay);
    let mut w = single(b.model.clone(), &b.descriptor, config);
    let mut r = Reference::from_adjacency(b.model.clone(), w.adjacency(), 11, b.dt as f32, b.delay);
    let train = w.run(1000);
    assert!(!train.is_empty());
    assert_eq!(train, r.run(1000));
    for f in 0..w.neurons().field_count() {
        assert_eq!(w.neurons().column(f), r.neurons.column(f));
    }
}

#[test]
fn regrown_rows_keep_every_generated_edge() {
    let desc = TopologyDescriptor::new(
        3000,
        [ConnectRule::new(IdRange::new(0, 3000), IdRange::new(0, 3000), 0.1)],
    )
    .unwrap();
    let p = Partition::new(3000, 4, 32).unwrap();
    let total: usize = (0..4)
        .map(|g| WorkerState::build(Hashed { drive: 0.0 }, &desc, p, g, WorkerConfig::new(8, 1e-4, 1)).unwrap())
        .map(|w| w.adjacency().edge_count())
        .sum();
    let (full, _) = build_adjacency_complete(&desc, 8, &TargetScope::All, 0).unwrap();
    assert_eq!(total, full.edge_count());
}

#[test]
fn synth_fired_count_stays_binomial() {
    let params = SynthParams { neurons: 100_000, density: 0.000_05, activity: 0.005, delay: 1 };
    let b = make_synth(params).unwrap();
    let mut w = single(b.model, &b.descriptor, WorkerConfig::new(5, b.dt as f32, 1));
    let mean = 100_000.0 * 0.005;
    let sd = (mean * (1.0 - 0.005) as f64).sqrt();
    for _ in 0..1000 {
        let fired = w.step().fired as f64;
        assert!((300.0..=700.0).contains(&fired));
        assert!((fired - mean).abs() <= 5.0 * sd, "{fired}");
    }
}

#[test]
fn silent_synth_delivers_nothing() {
    let params = SynthParams { neurons: 2000, density: 0.1, activity: 0.0, delay: 3 };
    let b = make_synth(params).unwrap();
    let mut w = single(b.model, &b.descriptor, WorkerConfig::new(5, b.dt as f32, 3));
    for _ in 0..200 {
        let s = w.step();
        assert_eq!((s.fired, s.delivered), (0, 0));
    }
}
