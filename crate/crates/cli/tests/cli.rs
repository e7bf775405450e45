//! End-to-end drive of the binary: lifecycle, reproducibility under a fixed
//! seed, custom parameter files, and the documented exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fsgs")
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("fsgs-cli-test-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        Self(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn lifecycle_and_exit_codes() {
    let tmp = TempDir::new("lifecycle");
    let dir = &tmp.0;
    std::fs::write(tmp.path("msg.txt"), b"the message").unwrap();

    let (code, _, err) = run(dir, &["keygen", "--params", "small", "--seed", "11"]);
    assert_eq!(code, 0, "keygen: {err}");
    for f in ["gpk.bin", "msk.bin", "mosk.bin", "usk-0.bin", "usk-3.bin"] {
        assert!(tmp.path(f).exists(), "{f} missing");
    }

    // Advance user 1 to period 1 and sign there.
    let (code, _, err) = run(
        dir,
        &[
            "update",
            "--gpk",
            "gpk.bin",
            "--usk",
            "usk-1.bin",
            "--time",
            "1",
            "--seed",
            "12",
        ],
    );
    assert_eq!(code, 0, "update: {err}");
    let (code, _, err) = run(
        dir,
        &[
            "sign",
            "--gpk",
            "gpk.bin",
            "--usk",
            "usk-1.bin",
            "--time",
            "1",
            "--message",
            "msg.txt",
            "--seed",
            "13",
            "--out",
            "sig.bin",
        ],
    );
    assert_eq!(code, 0, "sign: {err}");

    let (code, out, _) = run(
        dir,
        &[
            "verify",
            "--gpk",
            "gpk.bin",
            "--time",
            "1",
            "--message",
            "msg.txt",
            "--sig",
            "sig.bin",
        ],
    );
    assert_eq!(code, 0);
    assert!(out.contains("accept"));

    let (code, out, _) = run(
        dir,
        &[
            "open",
            "--gpk",
            "gpk.bin",
            "--mosk",
            "mosk.bin",
            "--time",
            "1",
            "--message",
            "msg.txt",
            "--sig",
            "sig.bin",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1");

    // Exit code 2: verification rejects at the wrong period.
    let (code, _, _) = run(
        dir,
        &[
            "verify",
            "--gpk",
            "gpk.bin",
            "--time",
            "0",
            "--message",
            "msg.txt",
            "--sig",
            "sig.bin",
        ],
    );
    assert_eq!(code, 2);

    // Exit code 4: format error on a corrupted signature file.
    let mut bytes = std::fs::read(tmp.path("sig.bin")).unwrap();
    bytes[0] ^= 1;
    std::fs::write(tmp.path("bad.bin"), &bytes).unwrap();
    let (code, _, _) = run(
        dir,
        &[
            "verify",
            "--gpk",
            "gpk.bin",
            "--time",
            "1",
            "--message",
            "msg.txt",
            "--sig",
            "bad.bin",
        ],
    );
    assert_eq!(code, 4);

    // Exit code 5: precondition error (signing a period the key is not at).
    let (code, _, _) = run(
        dir,
        &[
            "sign",
            "--gpk",
            "gpk.bin",
            "--usk",
            "usk-0.bin",
            "--time",
            "3",
            "--message",
            "msg.txt",
            "--seed",
            "14",
            "--out",
            "x.bin",
        ],
    );
    assert_eq!(code, 5);

    // Exit code 5 on update past the final period.
    let (code, _, _) = run(
        dir,
        &[
            "update",
            "--gpk",
            "gpk.bin",
            "--usk",
            "usk-2.bin",
            "--time",
            "9",
            "--seed",
            "15",
        ],
    );
    assert_eq!(code, 5);
}

#[test]
fn keygen_is_reproducible_under_seed() {
    let a = TempDir::new("repro-a");
    let b = TempDir::new("repro-b");
    for d in [&a.0, &b.0] {
        let (code, _, err) = run(d, &["keygen", "--params", "small", "--seed", "99"]);
        assert_eq!(code, 0, "{err}");
    }
    for f in ["gpk.bin", "msk.bin", "mosk.bin", "usk-0.bin"] {
        let x = std::fs::read(a.path(f)).unwrap();
        let y = std::fs::read(b.path(f)).unwrap();
        assert_eq!(x, y, "{f} differs across runs with the same seed");
    }
}

#[test]
fn custom_params_file_is_validated() {
    let tmp = TempDir::new("params");
    // A valid file: the small preset spelled out.
    std::fs::write(
        tmp.path("ok.conf"),
        "n = 4\nq = 524287\nm = 152\nell = 2\nd = 2\nkappa = 16\ns_ell = 100\nb_noise = 1\n",
    )
    .unwrap();
    let (code, _, err) = run(&tmp.0, &["keygen", "--params", "ok.conf", "--seed", "5"]);
    assert_eq!(code, 0, "{err}");

    // A bad modulus violates the decryption-margin invariant at load.
    std::fs::write(
        tmp.path("bad.conf"),
        "n = 4\nq = 257\nm = 80\nell = 2\nd = 2\nkappa = 16\ns_ell = 3\nb_noise = 1\n",
    )
    .unwrap();
    let (code, _, err) = run(&tmp.0, &["keygen", "--params", "bad.conf", "--seed", "5"]);
    assert_eq!(code, 5, "expected precondition failure, got: {err}");
    assert!(
        err.contains("margin"),
        "diagnostic should name the margin: {err}"
    );
}
