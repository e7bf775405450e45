//! Group lifecycle driver: key generation, per-period key update, signing,
//! verification, opening, a forward-security walkthrough, and a parameter
//! size report.
//!
//! Exit codes: 0 ok, 2 verify-reject, 3 open-reject, 4 format error,
//! 5 precondition error.

use clap::{Parser, Subcommand};
use fsgs_core::error::Error as CoreError;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod params_file;
mod report;

#[derive(Parser)]
#[command(
    name = "fsgs",
    about = "Forward-secure group signatures at desk scale",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the group: public key, manager key, tracer key, and one
    /// signing key file per user.
    Keygen {
        /// Preset name (small | medium) or a parameter config file.
        #[arg(long, default_value = "small")]
        params: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "gpk.bin")]
        gpk: PathBuf,
        #[arg(long, default_value = "msk.bin")]
        msk: PathBuf,
        #[arg(long, default_value = "mosk.bin")]
        mosk: PathBuf,
        /// Prefix for per-user key files (<prefix>-<index>.bin).
        #[arg(long, default_value = "usk")]
        usk: PathBuf,
    },
    /// Advance a user key file to a later period, in place. Dropped node
    /// material is overwritten; no backup is kept.
    Update {
        #[arg(long)]
        gpk: PathBuf,
        #[arg(long)]
        usk: PathBuf,
        /// Target period (defaults to the next one).
        #[arg(long)]
        time: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sign a message for the key's current period.
    Sign {
        #[arg(long)]
        gpk: PathBuf,
        #[arg(long)]
        usk: PathBuf,
        #[arg(long)]
        time: u64,
        /// Message file, or - for stdin.
        #[arg(long)]
        message: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "sig.bin")]
        out: PathBuf,
    },
    /// Verify a signature file against a message and period.
    Verify {
        #[arg(long)]
        gpk: PathBuf,
        #[arg(long)]
        time: u64,
        #[arg(long)]
        message: String,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Trace a signature to its signer index.
    Open {
        #[arg(long)]
        gpk: PathBuf,
        #[arg(long)]
        mosk: PathBuf,
        #[arg(long)]
        time: u64,
        #[arg(long)]
        message: String,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Walk the covering-set evolution and show that an advanced key holds
    /// no material for earlier periods.
    DemoForwardSecurity {
        #[arg(long, default_value = "small")]
        params: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Period to advance the demo key to (defaults to T-1).
        #[arg(long)]
        time: Option<u64>,
    },
    /// Measured Gram-Schmidt norms and object sizes as the tree depth k
    /// grows over {4, 6, 8} at fixed n, q.
    ParamsReport {
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Exit codes: verify-reject 2, open-reject 3, format 4, precondition 5.
fn exit_code_for(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        return match core {
            CoreError::VerifyReject => 2,
            CoreError::OpenReject(_) | CoreError::MalformedCiphertext => 3,
            CoreError::Encoding(_) => 4,
            _ => 5,
        };
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return 4;
    }
    5
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => {
            let mut os = rand::rngs::OsRng;
            ChaCha20Rng::seed_from_u64(os.next_u64())
        }
    }
}

fn read_message(spec: &str) -> anyhow::Result<Vec<u8>> {
    if spec == "-" {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read(spec)?)
    }
}

fn load_gpk(path: &Path) -> anyhow::Result<fsgs_core::keys::GroupPublicKey> {
    let bytes = std::fs::read(path)?;
    Ok(fsgs_core::wire::gpk_from_bytes(&bytes)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Keygen {
            params,
            seed,
            gpk,
            msk,
            mosk,
            usk,
        } => {
            let p = params_file::resolve(&params)?;
            let mut rng = rng_from(seed);
            let (gpk_v, msk_v, mosk_v, users) = fsgs_core::keys::key_gen(&p, &mut rng)?;
            std::fs::write(&gpk, fsgs_core::wire::gpk_bytes(&gpk_v))?;
            std::fs::write(&msk, fsgs_core::wire::msk_bytes(&p, &msk_v))?;
            std::fs::write(&mosk, fsgs_core::wire::mosk_bytes(&p, &mosk_v))?;
            for u in &users {
                let path = usk_path(&usk, u.user);
                std::fs::write(&path, fsgs_core::wire::usk_bytes(&p, u))?;
            }
            println!(
                "group of {} users, {} periods written: {}, {}, {}, {}-*.bin",
                p.users(),
                p.periods(),
                gpk.display(),
                msk.display(),
                mosk.display(),
                usk.display()
            );
            Ok(())
        }
        Command::Update {
            gpk,
            usk,
            time,
            seed,
        } => {
            let gpk_v = load_gpk(&gpk)?;
            let bytes = std::fs::read(&usk)?;
            let mut key = fsgs_core::wire::usk_from_bytes(&gpk_v.params, &bytes)?;
            let target = time.unwrap_or(key.period + 1);
            if target <= key.period {
                anyhow::bail!(CoreError::OutOfRange(format!(
                    "key already at period {}, target {target}",
                    key.period
                )));
            }
            let mut rng = rng_from(seed);
            let user = key.user;
            while key.period < target {
                key = fsgs_core::keys::key_update(&gpk_v, key, user, &mut rng)?;
            }
            std::fs::write(&usk, fsgs_core::wire::usk_bytes(&gpk_v.params, &key))?;
            println!("user {} advanced to period {}", key.user, key.period);
            Ok(())
        }
        Command::Sign {
            gpk,
            usk,
            time,
            message,
            seed,
            out,
        } => {
            let gpk_v = load_gpk(&gpk)?;
            let key = fsgs_core::wire::usk_from_bytes(&gpk_v.params, &std::fs::read(&usk)?)?;
            let msg = read_message(&message)?;
            let mut rng = rng_from(seed);
            let sigma = fsgs_core::scheme::sign(&gpk_v, &key, key.user, time, &msg, &mut rng)?;
            std::fs::write(
                &out,
                fsgs_core::wire::signature_bytes(&gpk_v.params, &sigma),
            )?;
            println!("signature for period {time} written to {}", out.display());
            Ok(())
        }
        Command::Verify {
            gpk,
            time,
            message,
            sig,
        } => {
            let gpk_v = load_gpk(&gpk)?;
            let sigma =
                fsgs_core::wire::signature_from_bytes(&gpk_v.params, &std::fs::read(&sig)?)?;
            let msg = read_message(&message)?;
            if fsgs_core::scheme::verify(&gpk_v, time, &msg, &sigma) {
                println!("accept");
                Ok(())
            } else {
                anyhow::bail!(CoreError::VerifyReject)
            }
        }
        Command::Open {
            gpk,
            mosk,
            time,
            message,
            sig,
        } => {
            let gpk_v = load_gpk(&gpk)?;
            let mosk_v = fsgs_core::wire::mosk_from_bytes(&gpk_v.params, &std::fs::read(&mosk)?)?;
            let sigma =
                fsgs_core::wire::signature_from_bytes(&gpk_v.params, &std::fs::read(&sig)?)?;
            let msg = read_message(&message)?;
            let who = fsgs_core::scheme::open(&gpk_v, &mosk_v, time, &msg, &sigma)?;
            println!("{who}");
            Ok(())
        }
        Command::DemoForwardSecurity { params, seed, time } => {
            let p = params_file::resolve(&params)?;
            demo_forward_security(&p, seed, time)
        }
        Command::ParamsReport { seed } => report::params_report(seed),
    }
}

fn usk_path(prefix: &Path, user: u64) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(format!("-{user}.bin"));
    prefix.with_file_name(name)
}

fn demo_forward_security(
    p: &fsgs_core::params::Params,
    seed: Option<u64>,
    time: Option<u64>,
) -> anyhow::Result<()> {
    use fsgs_core::timetree::{bin, is_ancestor_or_equal, nodes_set, NodeId};
    let t_max = p.periods() - 1;
    let target = time.unwrap_or(t_max).min(t_max);

    println!("covering sets for T = {} periods:", p.periods());
    for t in 0..p.periods() {
        let set = nodes_set(t, p.d)?;
        let rendered: Vec<String> = set.iter().map(|n| n.to_string()).collect();
        println!("  periods {t}..{t_max}: {{{}}}", rendered.join(", "));
    }

    println!("\ngenerating a demo group (user 0 only) ...");
    let mut rng = rng_from(seed);
    let (gpk, _msk, _mosk, mut users) = fsgs_core::keys::key_gen_for_users(p, &[0], &mut rng)?;
    let mut usk = users.remove(0);
    while usk.period < target {
        usk = fsgs_core::keys::key_update(&gpk, usk, 0, &mut rng)?;
    }
    println!("user 0 key advanced to period {}", usk.period);
    println!("entries now held:");
    for (node, entry) in &usk.entries {
        let kind = match entry {
            fsgs_core::keys::KeyEntry::Bot => "placeholder",
            fsgs_core::keys::KeyEntry::Leaf(_) => "leaf vector",
            fsgs_core::keys::KeyEntry::Basis(_) => "node basis",
        };
        println!("  {node}: {kind}");
    }

    let mut covered_past = 0;
    for t_past in 0..usk.period {
        let leaf = NodeId::Node(bin(t_past, p.d)?);
        for (node, _) in usk.entries.iter().filter(|(n, _)| !n.is_bot()) {
            if is_ancestor_or_equal(node, &leaf)? {
                covered_past += 1;
            }
        }
    }
    println!(
        "\nnodes covering any period before {}: {} (expected 0)",
        usk.period, covered_past
    );
    if covered_past != 0 {
        anyhow::bail!(CoreError::CorruptKey(
            "past period material survived".into()
        ));
    }
    for t_past in 0..usk.period {
        let r = fsgs_core::scheme::sign(&gpk, &usk, 0, t_past, b"past message", &mut rng);
        match r {
            Ok(_) => {
                println!("signing attempt for past period {t_past}: SIGNED (unexpected!)");
                anyhow::bail!(CoreError::CorruptKey("signed for a past period".into()));
            }
            Err(e) => println!("signing attempt for past period {t_past}: refused ({e})"),
        }
    }
    println!("forward-security walk complete: past periods are unreachable.");
    Ok(())
}
