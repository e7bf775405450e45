//! Size and quality report across tree depths k in {4, 6, 8} at fixed n, q:
//! measured Gram-Schmidt norms, serialized object sizes, signature-size
//! growth ratios, and the deterministic layout cross-check.

use fsgs_core::keys::{key_gen_for_users, KeyEntry};
use fsgs_core::mat::gram_schmidt_norm_f64;
use fsgs_core::params::Params;
use fsgs_core::stern::statement::SternDims;
use fsgs_core::wire;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn params_report(seed: Option<u64>) -> anyhow::Result<()> {
    let seed = seed.unwrap_or(1);
    let mut sig_sizes = Vec::new();
    println!("tree-depth report at fixed n = 4, q = 524287, m = 152 (seed {seed})");
    for k in [4usize, 6, 8] {
        let p = Params::report_preset(k)?;
        let dims = SternDims::from_params(&p);
        println!(
            "\nk = {k} (N = {} users, T = {} periods)",
            p.users(),
            p.periods()
        );
        println!(
            "  ladder s_{}..s_{}: {}",
            p.ell,
            p.k,
            (p.ell..=p.k)
                .map(|i| format!("{:.1}", p.s_f64(i)))
                .collect::<Vec<_>>()
                .join(", ")
        );
        println!("  beta = {}, witness length L = {}", p.beta, dims.l());

        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (gpk, msk, _mosk, users) = key_gen_for_users(&p, &[0], &mut rng)?;
        let gs0 = gram_schmidt_norm_f64(&msk.s0)?;
        println!("  measured gs norm of the signing trapdoor: {gs0:.2}");
        for (node, entry) in &users[0].entries {
            if let KeyEntry::Basis(b) = entry {
                let gs = gram_schmidt_norm_f64(b)?;
                println!("  measured gs norm of delegated basis at {node}: {gs:.2}");
            }
        }

        let gpk_bytes = wire::gpk_bytes(&gpk).len();
        let usk_bytes = wire::usk_bytes(&p, &users[0]).len();
        let sigma = fsgs_core::scheme::sign(&gpk, &users[0], 0, 0, b"report message", &mut rng)?;
        let sig_bytes = wire::signature_bytes(&p, &sigma);
        let formula = wire::signature_layout_len(&p, &sigma.proof.challenges);
        println!("  gpk: {gpk_bytes} bytes, usk[0]: {usk_bytes} bytes");
        println!(
            "  signature: {} bytes (layout formula {} bytes, {})",
            sig_bytes.len(),
            formula,
            if sig_bytes.len() == formula {
                "match"
            } else {
                "MISMATCH"
            }
        );
        if sig_bytes.len() != formula {
            anyhow::bail!(fsgs_core::error::Error::Encoding(
                "signature layout formula mismatch".into()
            ));
        }
        sig_sizes.push((k, sig_bytes.len()));
    }

    println!("\nsignature-size growth (approximately linear in k):");
    for pair in sig_sizes.windows(2) {
        let (k0, s0) = pair[0];
        let (k1, s1) = pair[1];
        let ratio = s1 as f64 / s0 as f64;
        println!("  k {k0} -> {k1}: {s0} -> {s1} bytes, ratio {ratio:.3}");
    }
    Ok(())
}
