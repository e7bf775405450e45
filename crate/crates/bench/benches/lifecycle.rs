//! Proving and verification at the argument layer (toy statement shape) and
//! the full signing path at the small preset.

use criterion::{criterion_group, criterion_main, Criterion};
use fsgs_core::ibe::{ibe_encrypt, NoiseSample};
use fsgs_core::keys::key_gen_for_users;
use fsgs_core::mat::IntVector;
use fsgs_core::params::Params;
use fsgs_core::stern::fs::{fs_prove, fs_verify};
use fsgs_core::stern::statement::{build_statement, build_witness, SternDims};
use fsgs_core::timetree::bin;
use fsgs_core::zq::{Modulus, ZqMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn toy_statement() -> (
    fsgs_core::stern::statement::SternStatement,
    fsgs_core::stern::statement::SternWitness,
) {
    let dims = SternDims::new(2, 2, 8, 4, 3, 1).unwrap();
    let q = Modulus::new(257).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (ell, d, m, n) = (dims.ell, dims.d, dims.m, dims.n);
    let a0 = ZqMatrix::uniform(q, n, m, &mut rng);
    let pairs: Vec<[ZqMatrix; 2]> = (0..ell + d)
        .map(|_| {
            [
                ZqMatrix::uniform(q, n, m, &mut rng),
                ZqMatrix::uniform(q, n, m, &mut rng),
            ]
        })
        .collect();
    let b_enc = ZqMatrix::uniform(q, n, m, &mut rng);
    let g = ZqMatrix::uniform(q, n, ell, &mut rng);
    let t = 1u64;
    let z = bin(t, d).unwrap();
    let id_bits = vec![1u8, 1];
    let v = IntVector::new(
        (0..(ell + d + 1) * m)
            .map(|_| rng.gen_range(-dims.beta..=dims.beta))
            .collect(),
    );
    let mut a_id = a0.clone();
    for (i, &b) in id_bits.iter().enumerate() {
        a_id = a_id.hconcat(&pairs[i][b as usize]).unwrap();
    }
    for (j, &zb) in z.iter().enumerate() {
        a_id = a_id.hconcat(&pairs[ell + j][zb as usize]).unwrap();
    }
    let u = a_id.mul_int_vector(&v).unwrap();
    let pk = fsgs_core::bonsai::BonsaiPublicKey { a0, pairs, u };
    let noise = NoiseSample {
        s: IntVector::new((0..n).map(|_| rng.gen_range(-1i64..=1)).collect()),
        e1: IntVector::new((0..m).map(|_| rng.gen_range(-1i64..=1)).collect()),
        e2: IntVector::new((0..ell).map(|_| rng.gen_range(-1i64..=1)).collect()),
    };
    let ct = ibe_encrypt(&b_enc, &g, &id_bits, &noise).unwrap();
    let stmt = build_statement(&dims, &pk, &b_enc, &g, &ct, t).unwrap();
    let wit = build_witness(&dims, &id_bits, &noise, &v).unwrap();
    (stmt, wit)
}

fn bench_argument(c: &mut Criterion) {
    let (stmt, wit) = toy_statement();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    c.bench_function("fs_prove kappa=16 toy statement", |b| {
        b.iter(|| fs_prove(&stmt, &wit, b"bench", 16, &mut rng).unwrap());
    });
    let proof = fs_prove(&stmt, &wit, b"bench", 16, &mut rng).unwrap();
    c.bench_function("fs_verify kappa=16 toy statement", |b| {
        b.iter(|| assert!(fs_verify(&stmt, &proof, b"bench", 16)));
    });
}

fn bench_sign(c: &mut Criterion) {
    let params = Params::small();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let (gpk, _msk, _mosk, users) = key_gen_for_users(&params, &[0], &mut rng).unwrap();
    c.bench_function("sign preset small", |b| {
        b.iter(|| fsgs_core::scheme::sign(&gpk, &users[0], 0, 0, b"bench", &mut rng).unwrap());
    });
    let sigma = fsgs_core::scheme::sign(&gpk, &users[0], 0, 0, b"bench", &mut rng).unwrap();
    c.bench_function("verify preset small", |b| {
        b.iter(|| assert!(fsgs_core::scheme::verify(&gpk, 0, b"bench", &sigma)));
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_argument, bench_sign
}
criterion_main!(benches);
