//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Thresholds are the constants in `edagger::verify`.

use std::process::{Command, ExitCode};

use edagger::verify::{self, VerifyConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edagger"))
}

/// Runs `verify` through the binary twice and checks the exit-code contract.
fn binary_contract(dir: &std::path::Path) -> Result<(), String> {
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&a, &b] {
        let st = bin().args(["verify", "--json"]).arg(p).output().map_err(|e| e.to_string())?;
        if st.status.code() != Some(0) {
            return Err(format!("verify exited with {:?}", st.status.code()));
        }
    }
    let (ja, jb) = (std::fs::read(&a).map_err(|e| e.to_string())?, std::fs::read(&b).map_err(|e| e.to_string())?);
    if ja != jb {
        return Err("verify reports differ between runs".into());
    }
    let code = |args: &[&str]| bin().args(args).output().map(|o| o.status.code()).map_err(|e| e.to_string());
    let cases: [(&[&str], i32); 3] =
        [(&["periods", "--curve", "4/0"], 0), (&["verify", "--tol", "1e-15"], 1), (&["periods", "--curve", "3/x"], 2)];
    for (args, want) in cases {
        let got = code(args)?;
        if got != Some(want) {
            return Err(format!("`{}` exited with {got:?}, expected {want}", args.join(" ")));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let report = verify::run(&VerifyConfig::default());
    let mut ok = report.all_passed && report.criteria.len() == 12;
    for line in verify::summary_lines(&report) {
        println!("{line}");
    }
    for c in &report.criteria {
        for k in &c.checks {
            println!(
                "    {} {:<70} {:>12.3e} {} {:e}",
                if k.passed { "ok  " } else { "FAIL" },
                k.name,
                k.value,
                serde_json::to_string(&k.relation).unwrap().trim_matches('"'),
                k.limit
            );
        }
    }
    let dir = tempfile::tempdir().expect("temporary directory");
    match binary_contract(dir.path()) {
        Ok(()) => println!("[PASS] binary: verify reports byte-identical, exit codes 0/1/2"),
        Err(e) => {
            println!("[FAIL] binary: {e}");
            ok = false;
        }
    }
    println!("{} of {} criteria passed", report.passed, report.criteria.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
