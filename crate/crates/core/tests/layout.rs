use proptest::prelude::*;
use spikeforge_core::{FieldPool, FieldSpec, NeuronId, SpikeRing};

fn schema(kinds: &[bool]) -> Vec<FieldSpec> {
    kinds.iter().map(|&f| if f { FieldSpec::f32("f") } else { FieldSpec::u32("u") }).collect()
}

proptest! {
    #[test]
    fn pool_round_trips_every_value(
        kinds in proptest::collection::vec(any::<bool>(), 1..6),
        len in 1usize..200,
        words in proptest::collection::vec(any::<u32>(), 1200),
    ) {
        let schema = schema(&kinds);
        let mut pool = FieldPool::new(&schema, len).unwrap();
        let value = |f: usize, i: usize| words[(f * len + i) % words.len()];
        for (f, &is_f32) in kinds.iter().enumerate() {
            for i in 0..len {
                if is_f32 {
                    pool.set_f32(f, i, f32::from_bits(value(f, i)));
                } else {
                    pool.set_u32(f, i, value(f, i));
                }
            }
        }
        for (f, &is_f32) in kinds.iter().enumerate() {
            prop_assert_eq!(pool.column(f).len(), len);
            for i in 0..len {
                let got = if is_f32 { pool.get_f32(f, i).to_bits() } else { pool.get_u32(f, i) };
                prop_assert_eq!(got, value(f, i));
            }
        }
    }

    #[test]
    fn ring_latency_is_the_delay(
        delay in 1u32..=16,
        pushes in proptest::collection::vec((0u32..64, 0u32..1000), 0..100),
    ) {
        let mut ring = SpikeRing::new(delay).unwrap();
        let mut expect: Vec<Vec<NeuronId>> = vec![Vec::new(); 64 + delay as usize];
        for &(t, id) in &pushes {
            expect[(t + delay) as usize].push(id);
        }
        for e in &mut expect {
            e.sort_unstable();
            e.dedup();
        }
        for t in 0..64 + delay {
            let due = ring.take_due(t);
            prop_assert_eq!(due.ids(), expect[t as usize].as_slice());
            for &(s, id) in &pushes {
                if s == t {
                    ring.push(t, id);
                }
            }
        }
    }
}

#[test]
fn ring_dedupes_and_sorts() {
    let mut ring = SpikeRing::new(2).unwrap();
    for id in [5, 3, 5] {
        ring.push(0, id);
    }
    assert_eq!(ring.take_due(2).ids(), &[3, 5]);
}
