use blocksync::edit::{sample_trace, BlockEditOp, BlockEditTrace};
use blocksync::levels::{alice_sketch, bob_recover, bob_recover_report, make_schedule, Sketch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bits(n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

#[test]
fn identity_round_trip() {
    let x = random_bits(1 << 12, 1);
    let sk = alice_sketch(&x, 2, 16).unwrap();
    assert_eq!(bob_recover(&x, &sk).unwrap(), x);
}

#[test]
fn bytes_round_trip_and_determinism() {
    let x = random_bits(5000, 2);
    let a = alice_sketch(&x, 1, 8).unwrap();
    let b = alice_sketch(&x, 1, 8).unwrap();
    assert_eq!(a.to_bytes(), b.to_bytes());
    assert_eq!(Sketch::from_bytes(&a.to_bytes()).unwrap(), a);
}

#[test]
fn zero_input_has_equal_hashes_per_level() {
    let x = vec![0u8; 1 << 12];
    let sk = alice_sketch(&x, 1, 0).unwrap();
    assert!(sk.v1.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(bob_recover(&x, &sk).unwrap(), x);
}

#[test]
fn prefix_move() {
    let n = 1 << 14;
    let x = random_bits(n, 3);
    let cut = 2 * n / 5;
    let trace = BlockEditTrace::new(
        vec![BlockEditOp::Transpose { i: 1, l: cut, j: n }],
        1,
        0,
    );
    let y = trace.apply(&x).unwrap();
    assert_eq!(&y[..n - cut], &x[cut..]);
    let sk = alice_sketch(&x, 1, 0).unwrap();
    assert_eq!(bob_recover(&y, &sk).unwrap(), x);
}

#[test]
fn random_traces_recover() {
    let n = 1 << 13;
    for seed in 0..10u64 {
        let x = random_bits(n, 100 + seed);
        let (k, t) = [(1, 0), (4, 64), (8, 256)][seed as usize % 3];
        let trace = sample_trace(seed, n, k, t);
        let y = trace.apply(&x).unwrap();
        let sk = alice_sketch(&x, k, t).unwrap();
        let (got, report) = bob_recover_report(&y, &sk, Some(&x)).unwrap();
        assert_eq!(got, x, "seed {seed}");
        let s = make_schedule(n, k, t);
        let kp = blocksync::levels::effective_k(n, k, t);
        for (i, lv) in report.levels.iter().enumerate() {
            assert!(lv.unrecovered <= 36 * (i + 1) * kp, "{lv:?}");
        }
        assert_eq!(report.levels.len(), s.big_l);
    }
}
