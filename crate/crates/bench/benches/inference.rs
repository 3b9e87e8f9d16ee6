use credal_core::net::{JointModel, VerifyOptions, DEFAULT_GENERATOR_CAP};
use credal_core::sample::{self, NetworkShape};
use credal_core::{fm_membership, lp, CredalNet, PreciseNet};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

/// The widest network among the first few seeds, so the numbers reflect the
/// expensive end of the random family.
fn wide_net() -> CredalNet {
    let shape = NetworkShape { max_nodes: 4, min_values: 3, max_values: 3, max_gambles: 2 };
    let mut rng = sample::rng(42);
    (0..16).map(|_| sample::network(&mut rng, &shape)).max_by_key(CredalNet::generator_count).unwrap()
}

fn build(c: &mut Criterion) {
    let net = wide_net();
    c.bench_function("build_joint", |b| {
        b.iter(|| JointModel::build(black_box(net.clone()), DEFAULT_GENERATOR_CAP).unwrap())
    });
}

fn membership(c: &mut Criterion) {
    let jm = JointModel::build(wide_net(), DEFAULT_GENERATOR_CAP).unwrap();
    let mut rng = sample::rng(1);
    let gambles: Vec<_> = (0..16).map(|_| sample::gamble(&mut rng, jm.full_scope())).collect();
    c.bench_function("joint_member", |b| b.iter(|| gambles.iter().filter(|f| jm.member(f).unwrap()).count()));
    c.bench_function("joint_contains_zero", |b| b.iter(|| lp::contains_zero(jm.generators()).unwrap()));
}

fn verify(c: &mut Criterion) {
    let jm = JointModel::build(wide_net(), DEFAULT_GENERATOR_CAP).unwrap();
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("requirements", |b| {
        b.iter(|| jm.verify_requirements(&VerifyOptions { samples: 2, sign_samples: 2, seed: 0 }).unwrap())
    });
    let precise = PreciseNet::from_witnesses(jm.net()).unwrap();
    group.bench_function("positivity_audit", |b| {
        b.iter(|| precise.positivity_audit(&jm, 50, &mut sample::rng(3)).unwrap())
    });
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut rng = sample::rng(5);
    let instances: Vec<_> = (0..32)
        .map(|_| {
            let rays: Vec<Vec<_>> =
                (0..12).map(|_| (0..5).map(|_| sample::small_rational(&mut rng, -3, 3)).collect()).collect();
            let target: Vec<_> = (0..5).map(|_| sample::small_rational(&mut rng, -3, 3)).collect();
            (target, rays)
        })
        .filter(|(t, _)| t.iter().any(|v| v.signum() != 0))
        .collect();
    c.bench_function("simplex_membership", |b| {
        b.iter(|| instances.iter().filter(|(t, r)| lp::conic_membership(t, r).unwrap().member).count())
    });
    c.bench_function("elimination_membership", |b| {
        b.iter(|| instances.iter().filter(|(t, r)| fm_membership(t, r).unwrap()).count())
    });
}

criterion_group!(benches, build, membership, verify, oracle);
criterion_main!(benches);
