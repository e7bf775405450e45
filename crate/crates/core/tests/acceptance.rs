//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured evidence (run with --nocapture to see them).

use fsgs_core::hnf::same_lattice;
use fsgs_core::ibe::{ibe_decrypt, ibe_encrypt, ibe_extract, opening_error, NoiseSample};
use fsgs_core::keys::{
    key_gen, key_gen_for_users, key_update, GroupPublicKey, TracerSecretKey, UserSecretKey,
};
use fsgs_core::mat::{gram_schmidt_norm_sq_exact, IntVector};
use fsgs_core::params::Params;
use fsgs_core::scheme::{sign, verify, GroupSignature, Opener};
use fsgs_core::stern::gadgets::{ext3, vdec, DecompositionSpec};
use fsgs_core::stern::protocol::{
    extract_witness, round_commit, round_respond, round_verify, Response, Simulator,
};
use fsgs_core::stern::statement::{
    build_statement, build_witness, decode_witness, statement_apply, valid_check, SternDims,
};
use fsgs_core::timetree::{bin, is_ancestor_or_equal, nodes_set, NodeId};
use fsgs_core::trapdoor::{ext_basis, rand_basis, sample_d, sample_d_with_solver, trap_gen};
use fsgs_core::wire;
use fsgs_core::zq::{Modulus, Solver, ZqMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::sync::OnceLock;

// ---------------------------------------------------------------------------
// Shared fixtures
// ---------------------------------------------------------------------------

struct Group {
    gpk: GroupPublicKey,
    mosk: TracerSecretKey,
    users: Vec<UserSecretKey>,
}

fn group_for_seed(seed: u64) -> Group {
    let params = Params::small();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (gpk, _msk, mosk, users) = key_gen(&params, &mut rng).expect("key generation");
    Group { gpk, mosk, users }
}

static SHARED_GROUP: OnceLock<Group> = OnceLock::new();

fn shared_group() -> &'static Group {
    SHARED_GROUP.get_or_init(|| group_for_seed(1))
}

static SHARED_SIGMA: OnceLock<(GroupSignature, u64, Vec<u8>)> = OnceLock::new();

/// One honest signature over the shared group (user 2, period 0).
fn shared_sigma() -> &'static (GroupSignature, u64, Vec<u8>) {
    SHARED_SIGMA.get_or_init(|| {
        let g = shared_group();
        let mut rng = ChaCha20Rng::seed_from_u64(777);
        let msg = b"acceptance fixture message".to_vec();
        let sigma = sign(&g.gpk, &g.users[2], 2, 0, &msg, &mut rng).expect("sign");
        (sigma, 0, msg)
    })
}

// ---------------------------------------------------------------------------
// Criterion 1: end-to-end correctness over users x periods x seeds
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_end_to_end_lifecycle() {
    // The preset keeps n = 4, ell = d = 2, kappa = 16 but runs at
    // q = 524287, m = 152: the q = 257, m = 80 instantiation violates the
    // decryption-margin invariant of the parameter type (see the parameter
    // module's load-time check, exercised in criterion 7).
    let started = std::time::Instant::now();
    let mut checked = 0usize;
    for seed in [1u64, 2, 3] {
        let g = if seed == 1 {
            None
        } else {
            Some(group_for_seed(seed))
        };
        let g: &Group = g.as_ref().unwrap_or_else(|| shared_group());
        let opener = Opener::new(g.mosk.clone());
        let mut rng = ChaCha20Rng::seed_from_u64(1000 + seed);
        for user in g.users.iter() {
            let mut usk = user.clone();
            let uid = usk.user;
            for t in 0..g.gpk.params.periods() {
                if t > 0 {
                    usk = key_update(&g.gpk, usk, uid, &mut rng).expect("update");
                }
                let msg = format!("seed {seed} user {uid} period {t}");
                let sigma = sign(&g.gpk, &usk, uid, t, msg.as_bytes(), &mut rng).expect("sign");
                assert!(
                    verify(&g.gpk, t, msg.as_bytes(), &sigma),
                    "verify u={uid} t={t}"
                );
                let who = opener
                    .open(&g.gpk, t, msg.as_bytes(), &sigma)
                    .expect("open");
                assert_eq!(who, uid, "open u={uid} t={t}");
                checked += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    assert_eq!(checked, 3 * 4 * 4);
    assert!(elapsed.as_secs() < 600, "lifecycle took {elapsed:?}");
    println!(
        "PASS criterion 1: verify+open correct for {checked} (seed,user,period) triples in {elapsed:?}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: decomposition oracle equivalence
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_decomposition_oracle() {
    // Exhaustive: m = 1, every bound up to 64, every value in range.
    let mut exhaustive = 0usize;
    for b in 1..=64i64 {
        let spec = DecompositionSpec::new(b).unwrap();
        assert_eq!(spec.ladder.iter().sum::<i64>(), b);
        for w in -b..=b {
            let e = ext3(&vdec(&[w], &spec).unwrap()).unwrap();
            let back = fsgs_core::stern::gadgets::reconstruct(&e, 1, &spec).unwrap();
            assert_eq!(back.data, vec![w]);
            exhaustive += 1;
        }
    }
    // Randomized: 10^4 cases with m <= 16, B <= 2^10.
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    for _ in 0..10_000 {
        let b = rng.gen_range(1..=1024i64);
        let m = rng.gen_range(1..=16usize);
        let spec = DecompositionSpec::new(b).unwrap();
        let w: Vec<i64> = (0..m).map(|_| rng.gen_range(-b..=b)).collect();
        let e = ext3(&vdec(&w, &spec).unwrap()).unwrap();
        let back = fsgs_core::stern::gadgets::reconstruct(&e, m, &spec).unwrap();
        assert_eq!(back.data, w);
    }
    println!(
        "PASS criterion 2: reconstruction identity exact on {exhaustive} exhaustive and 10000 randomized cases"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: depth-3 tree fixtures
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_depth3_fixtures() {
    let node = |s: &str| NodeId::Node(s.bytes().map(|b| b - b'0').collect());
    assert_eq!(fsgs_core::timetree::sibling(1, 2, 3).unwrap(), node("1"));
    assert_eq!(fsgs_core::timetree::sibling(2, 2, 3).unwrap(), NodeId::Bot);
    assert_eq!(fsgs_core::timetree::sibling(3, 2, 3).unwrap(), node("011"));
    assert_eq!(fsgs_core::timetree::sibling(4, 2, 3).unwrap(), node("010"));
    assert_eq!(
        nodes_set(2, 3).unwrap(),
        vec![node("1"), NodeId::Bot, node("011"), node("010")]
    );
    assert_eq!(
        nodes_set(5, 3).unwrap(),
        vec![NodeId::Bot, node("11"), NodeId::Bot, node("101")]
    );
    println!("PASS criterion 3: depth-3 sibling and covering-set fixtures reproduced exactly");
}

// ---------------------------------------------------------------------------
// Criterion 4: covering, forward secrecy, refinement, exhaustive
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_tree_properties_exhaustive() {
    let mut cases = 0usize;
    for d in 1..=6usize {
        let big_t = 1u64 << d;
        for t in 0..big_t {
            let set = nodes_set(t, d).unwrap();
            for t2 in 0..big_t {
                let leaf = NodeId::Node(bin(t2, d).unwrap());
                let covering = set
                    .iter()
                    .filter(|z| !z.is_bot())
                    .filter(|z| is_ancestor_or_equal(z, &leaf).unwrap())
                    .count();
                assert_eq!(covering, usize::from(t2 >= t), "d={d} t={t} t2={t2}");
                cases += 1;
            }
            if t + 1 < big_t {
                for z_next in nodes_set(t + 1, d).unwrap().iter().filter(|z| !z.is_bot()) {
                    let ancestors = set
                        .iter()
                        .filter(|z| !z.is_bot())
                        .filter(|z| is_ancestor_or_equal(z, z_next).unwrap())
                        .count();
                    assert_eq!(ancestors, 1, "refinement d={d} t={t}");
                    cases += 1;
                }
            }
        }
    }
    println!(
        "PASS criterion 4: covering, forward-secrecy, refinement exhaustive for T in {{2..64}} ({cases} checks)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: protocol completeness, extraction, simulator rate
// ---------------------------------------------------------------------------

/// Honest statement/witness at the toy shape (ell=2, d=2, n=4, m=8,
/// p_beta=2, p_B=1 -> D=14, L=382), built without trapdoors by choosing the
/// syndrome from a bounded witness.
fn toy_instance(
    seed: u64,
) -> (
    fsgs_core::stern::statement::SternStatement,
    fsgs_core::stern::statement::SternWitness,
) {
    let dims = SternDims::new(2, 2, 8, 4, 3, 1).unwrap();
    assert_eq!(
        (dims.l1(), dims.l2(), dims.l3(), dims.l()),
        (240, 96, 42, 382)
    );
    let q = Modulus::new(257).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
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
    let t = 2u64;
    let z = bin(t, d).unwrap();
    let id_bits = vec![0u8, 1];
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

#[test]
fn criterion_5_protocol_statistics() {
    let (stmt, wit) = toy_instance(90210);
    let mut rng = ChaCha20Rng::seed_from_u64(90211);

    // Completeness: 100 commitments x all 3 challenges = 300 pairs.
    for _ in 0..100 {
        let (cmt, state) = round_commit(&stmt, &wit, &mut rng).unwrap();
        for ch in 1u8..=3 {
            let rsp = round_respond(&stmt, &state, ch).unwrap();
            assert!(round_verify(&stmt, &cmt, ch, &rsp));
        }
    }

    // Extraction on 20 independent commitments with all three responses.
    for i in 0..20 {
        let (cmt, state) = round_commit(&stmt, &wit, &mut rng).unwrap();
        let r1 = round_respond(&stmt, &state, 1).unwrap();
        let r2 = round_respond(&stmt, &state, 2).unwrap();
        let r3 = round_respond(&stmt, &state, 3).unwrap();
        let w = extract_witness(&stmt, &cmt, &r1, &r2, &r3).unwrap();
        assert!(valid_check(&stmt.dims, &w.w).unwrap(), "extraction {i}");
        assert_eq!(statement_apply(&stmt, &w.w).unwrap(), stmt.u0);
        let dec = decode_witness(&stmt.dims, &w.w).unwrap();
        assert_eq!(dec.id_bits, vec![0, 1]);
        assert!(dec.v.inf_norm() <= stmt.dims.beta as u64);
        let nb = stmt.dims.b_noise as u64;
        assert!(dec.s.inf_norm() <= nb && dec.e1.inf_norm() <= nb && dec.e2.inf_norm() <= nb);
    }

    // Simulator: non-abort rate over 3000 trials, every survivor verifies.
    let sim = Simulator::new(&stmt);
    let trials = 3000;
    let mut ok = 0;
    for _ in 0..trials {
        if let Some((cmt, ch, rsp)) = sim.simulate(&mut rng).unwrap() {
            assert!(round_verify(&stmt, &cmt, ch, &rsp));
            ok += 1;
        }
    }
    let rate = ok as f64 / trials as f64;
    assert!((0.61..=0.72).contains(&rate), "simulator rate {rate}");
    println!(
        "PASS criterion 5: completeness 300/300, extraction 20/20, simulator rate {rate:.3} in [0.61, 0.72]"
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: lattice contracts
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_lattice_contracts() {
    // Exact trapdoor checks plus exact norm preservation at rational-GSO
    // scale (n=2, q=17, m=20).
    let q17 = Modulus::new(17).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(61);
    let td = trap_gen(2, 20, q17, &mut rng).unwrap();
    // trap_gen postconditions are asserted internally; re-verify here.
    fsgs_core::trapdoor::verify_kernel_basis(&td.matrix, &td.basis).unwrap();

    let extra = ZqMatrix::uniform(q17, 2, 6, &mut rng);
    let a_prime = td.matrix.hconcat(&extra).unwrap();
    let ext = ext_basis(&td.basis, &td.matrix, &a_prime).unwrap();
    fsgs_core::trapdoor::verify_kernel_basis(&a_prime, &ext).unwrap();
    let before = gram_schmidt_norm_sq_exact(&td.basis).unwrap();
    let after = gram_schmidt_norm_sq_exact(&ext).unwrap();
    assert_eq!(before, after, "exact norm preservation");

    // Randomized bases: 50 of 50 trials same-lattice via the normal form.
    let gs = fsgs_core::mat::gram_schmidt_norm_f64(&td.basis).unwrap();
    let s = gs * 2.5;
    let mut distinct = std::collections::HashSet::new();
    for trial in 0..50 {
        let mut r = ChaCha20Rng::seed_from_u64(6100 + trial);
        let out = rand_basis(&td.basis, &td.matrix, s, 2.0, &mut r).unwrap();
        assert!(same_lattice(&td.basis, &out, 17).unwrap(), "trial {trial}");
        assert!(out.max_column_norm() <= s * 20f64.sqrt() + 1e-6);
        distinct.insert(format!("{:?}", out.data()));
    }
    assert_eq!(distinct.len(), 50);

    // Preimage sampling: syndrome equation always, norm tail >= 99% of 10^3
    // draws at n=4 geometry (beta = ceil(s log2 n) = 2s).
    let q257 = Modulus::new(257).unwrap();
    let td4 = trap_gen(4, 80, q257, &mut rng).unwrap();
    let gs4 = fsgs_core::mat::gram_schmidt_norm_f64(&td4.basis).unwrap();
    let s4 = gs4 * 2.0;
    let beta = (2.0 * s4).ceil() as u64;
    let u = ZqMatrix::uniform(q257, 4, 1, &mut rng).column(0);
    let sampler = fsgs_core::gauss::KleinSampler::new(td4.basis.clone(), s4, 2.0).unwrap();
    let solver = Solver::new(&td4.matrix);
    let mut over = 0usize;
    for _ in 0..1000 {
        let v = sample_d_with_solver(&sampler, &solver, &td4.matrix, &u, &mut rng).unwrap();
        // The syndrome check inside sample_d is exact and unconditional.
        if v.inf_norm() > beta {
            over += 1;
        }
    }
    assert!(over < 10, "tail rate {over}/1000");
    // Quality gate refuses an undersized parameter.
    assert!(sample_d(&td4.matrix, &td4.basis, &u, gs4 * 0.5, 2.0, &mut rng).is_err());
    println!(
        "PASS criterion 6: kernel bases exact, norm preservation exact, 50/50 same-lattice, preimage tail {over}/1000 over beta"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: opening margin, analytic bound at load, roundtrip
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_opening_margin() {
    // The analytic bound is a hard load-time invariant: a modulus that
    // cannot clear it is rejected outright (this is the q = 257, m = 80 set
    // named in the overview of criterion 1).
    assert!(Params::new(
        4,
        257,
        80,
        2,
        2,
        16,
        num_rational::Ratio::from_integer(3),
        1
    )
    .is_err());
    let params = Params::small();
    let bound = params.analytic_error_bound();
    assert!((params.q.get() as i128) > 4 * bound as i128);

    let mut rng = ChaCha20Rng::seed_from_u64(71);
    let td = trap_gen(params.n, params.m, params.q, &mut rng).unwrap();
    let g = ZqMatrix::uniform(params.q, params.n, params.ell, &mut rng);
    let key = ibe_extract(&td.matrix, &td.basis, &g, &params, &mut rng).unwrap();
    let mut max_err = 0u64;
    for trial in 0..1000 {
        let noise = NoiseSample::sample(&params, &mut rng);
        let id = [(trial % 2) as u8, ((trial / 2) % 2) as u8];
        let ct = ibe_encrypt(&td.matrix, &g, &id, &noise).unwrap();
        assert_eq!(ibe_decrypt(&key, &ct).unwrap(), id, "roundtrip {trial}");
        let err = opening_error(&key, &noise).unwrap();
        max_err = max_err.max(err);
        assert!(err < params.q.get() / 4);
        assert!(err <= bound as u64);
    }
    println!(
        "PASS criterion 7: 1000/1000 roundtrips, max measured error {max_err} < q/4 = {}, analytic bound {} asserted at load",
        params.q.get() / 4,
        bound
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: signature size trend in the tree depth
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_size_trend() {
    let mut sizes = Vec::new();
    for k in [4usize, 6, 8] {
        let p = Params::report_preset(k).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(80 + k as u64);
        let (gpk, _msk, _mosk, users) = key_gen_for_users(&p, &[0], &mut rng).unwrap();
        let sigma = sign(&gpk, &users[0], 0, 0, b"size probe", &mut rng).unwrap();
        let bytes = wire::signature_bytes(&p, &sigma);
        let formula = wire::signature_layout_len(&p, &sigma.proof.challenges);
        assert_eq!(bytes.len(), formula, "layout formula at k={k}");
        sizes.push((k, bytes.len()));
    }
    let mut ratios = Vec::new();
    for pair in sizes.windows(2) {
        let ratio = pair[1].1 as f64 / pair[0].1 as f64;
        assert!(
            ratio <= 1.6,
            "growth {} -> {} ratio {ratio}",
            pair[0].0,
            pair[1].0
        );
        ratios.push(ratio);
    }
    println!(
        "PASS criterion 8: signature bytes {:?}, growth ratios {:?} all <= 1.6, layout formula exact",
        sizes, ratios
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: negative-path suite
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_negative_paths() {
    let g = shared_group();
    let (sigma, t, msg) = shared_sigma();
    let params = &g.gpk.params;
    let opener = Opener::new(g.mosk.clone());
    assert!(verify(&g.gpk, *t, msg, sigma), "fixture must verify");
    let mut failures: Vec<&str> = Vec::new();
    let mut check = |name: &'static str, accepted: bool| {
        if accepted {
            failures.push(name);
        }
    };

    // Wrong period (enters both the statement and the challenge context).
    check("wrong period", verify(&g.gpk, 1, msg, sigma));
    // Altered message.
    check(
        "altered message",
        verify(&g.gpk, *t, b"altered message bytes", sigma),
    );
    // Flipped ciphertext byte, via the serialized form.
    {
        let mut bytes = wire::signature_bytes(params, sigma);
        // The first ciphertext entry sits right after the header, the
        // one-time key block, and the length prefix.
        let off = 39 + 4 + 512 * 32 + 4;
        bytes[off] ^= 1;
        let accepted = match wire::signature_from_bytes(params, &bytes) {
            Ok(s) => verify(&g.gpk, *t, msg, &s),
            Err(_) => false,
        };
        check("flipped ciphertext byte", accepted);
    }
    // Swapped ciphertext from another signature (one-time key covers it).
    {
        let mut rng = ChaCha20Rng::seed_from_u64(900);
        let other = sign(&g.gpk, &g.users[1], 1, 0, msg, &mut rng).unwrap();
        let mut franken = sigma.clone();
        franken.ct = other.ct.clone();
        check("swapped ciphertext", verify(&g.gpk, *t, msg, &franken));
    }
    // One corrupted round response.
    {
        let mut bad = sigma.clone();
        let q = params.q.get();
        match &mut bad.proof.responses[7] {
            Response::Ch1 { t_r, .. } => t_r.data[3] = (t_r.data[3] + 1) % q,
            Response::Ch2 { w2, .. } => w2.data[3] = (w2.data[3] + 1) % q,
            Response::Ch3 { w3, .. } => w3.data[3] = (w3.data[3] + 1) % q,
        }
        check("corrupted round response", verify(&g.gpk, *t, msg, &bad));
    }
    // Tampered commitment (challenge recomputation breaks).
    {
        let mut bad = sigma.clone();
        bad.proof.commitments[0].c1[0] ^= 1;
        check("tampered commitment", verify(&g.gpk, *t, msg, &bad));
    }
    // Truncated proof.
    {
        let mut bad = sigma.clone();
        bad.proof.responses.pop();
        bad.proof.commitments.pop();
        bad.proof.challenges.pop();
        check("truncated proof", verify(&g.gpk, *t, msg, &bad));
    }
    // One-time key reuse is refused at signing time.
    {
        let mut rng = ChaCha20Rng::seed_from_u64(901);
        let (_, mut osk) = fsgs_core::ots::ots_gen(&mut rng);
        fsgs_core::ots::ots_sign(&mut osk, b"first").unwrap();
        let reused = fsgs_core::ots::ots_sign(&mut osk, b"second").is_ok();
        check("one-time key reuse", reused);
    }
    // Signing with a stale (not updated) key.
    {
        let mut rng = ChaCha20Rng::seed_from_u64(902);
        let stale = sign(&g.gpk, &g.users[0], 0, 1, b"m", &mut rng).is_ok();
        check("stale key signing", stale);
    }
    // Update past the last period.
    {
        let mut rng = ChaCha20Rng::seed_from_u64(903);
        let mut usk = g.users[3].clone();
        for _ in 1..params.periods() {
            usk = key_update(&g.gpk, usk, 3, &mut rng).unwrap();
        }
        let past_end = key_update(&g.gpk, usk, 3, &mut rng).is_ok();
        check("update past final period", past_end);
    }
    // Opening a tampered signature is rejected before any decryption.
    {
        let mut bad = sigma.clone();
        bad.proof.commitments[2].c2[5] ^= 0x10;
        let opened = opener.open(&g.gpk, *t, msg, &bad).is_ok();
        check("open tampered signature", opened);
    }

    assert!(failures.is_empty(), "false accepts: {failures:?}");
    println!("PASS criterion 9: 11 tamper cases, zero false accepts");
}
