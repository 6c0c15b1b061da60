//! Acceptance suite: twelve criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed. Exits
//! nonzero when any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cascade_core::f2linalg::star_matrix;
use cascade_core::forest::PredecessorForest;
use cascade_core::sample;
use cascade_core::verify::{self, Lemma, VerificationReport, VerifyConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn lemma(l: Lemma, config: &VerifyConfig, budget: Option<Duration>) -> Outcome {
    let r: VerificationReport = verify::run(l, config);
    let line = r.summary_line();
    if !r.passed() {
        return Err(format!("{line}; first failure: {}", r.failures[0]));
    }
    if let Some(b) = budget {
        if r.elapsed > b {
            return Err(format!("{line}; over the {} s budget", b.as_secs()));
        }
    }
    Ok(line)
}

fn defaults() -> VerifyConfig {
    VerifyConfig::default()
}

fn c1_star_span() -> Outcome {
    // 200 windows with |K| ≤ 12; every target reconstructed when |K| ≤ 10
    let config = VerifyConfig {
        trials: Some(200),
        max_window: 12,
        ..defaults()
    };
    lemma(Lemma::StarSpan, &config, Some(Duration::from_secs(10)))
}

fn c2_triangular() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for _ in 0..200 {
        let size = rng.random_range(1..=16);
        let f = sample::forest(&mut rng, size);
        let len = rng.random_range(1..=12);
        let k = sample::window_of_len(&mut rng, &f, len);
        let m = star_matrix(&k).map_err(|e| e.to_string())?;
        if !m.is_upper_unitriangular() {
            return Err(format!(
                "star matrix of {k} is not unit upper triangular:\n{}",
                m.to_text()
            ));
        }
        // documented order: every child column precedes its parent column
        let order = m.col_order();
        for (c, &v) in order.iter().enumerate() {
            if let Some(p) = f.pred(v).filter(|p| k.contains(*p)) {
                if order.iter().position(|&x| x == p).unwrap() <= c {
                    return Err(format!("order {order:?} puts {p} before its child {v}"));
                }
            }
        }
        checked += 1;
    }
    // and every window of every forest on at most 6 nodes
    for n in 1..=6usize {
        let mut parents = vec![0u32; n.saturating_sub(1)];
        loop {
            let f = PredecessorForest::from_parents(&parents).unwrap();
            for mask in 1u32..(1 << n) {
                let nodes: Vec<_> = (0..n as u32)
                    .filter(|v| mask >> v & 1 == 1)
                    .map(cascade_core::forest::NodeId)
                    .collect();
                if let Ok(k) = f.window(nodes) {
                    checked += 1;
                    if !star_matrix(&k)
                        .map_err(|e| e.to_string())?
                        .is_upper_unitriangular()
                    {
                        return Err(format!("star matrix of {k} is not unit upper triangular"));
                    }
                }
            }
            // next parent vector: parents[j] < j + 1
            let mut j = 0;
            while j < parents.len() {
                parents[j] += 1;
                if parents[j] as usize <= j {
                    break;
                }
                parents[j] = 0;
                j += 1;
            }
            if j == parents.len() {
                break;
            }
        }
    }
    Ok(format!("{checked} star matrices unit upper triangular"))
}

fn c3_shielding() -> Outcome {
    let config = VerifyConfig {
        trials: Some(1000),
        ..defaults()
    };
    lemma(Lemma::Shield, &config, None)
}

fn c4_fresh() -> Outcome {
    lemma(Lemma::Fresh, &defaults(), None)
}

fn c5_transport_decision() -> Outcome {
    let start = Instant::now();
    let t = lemma(
        Lemma::Transport,
        &VerifyConfig {
            trials: Some(500),
            ..defaults()
        },
        None,
    )?;
    let d = lemma(Lemma::Decision, &defaults(), None)?;
    if start.elapsed() > Duration::from_secs(30) {
        return Err(format!("took {:?}, budget 30 s", start.elapsed()));
    }
    Ok(format!("{t}; {d}"))
}

fn c6_normalize() -> Outcome {
    lemma(
        Lemma::Normalize,
        &VerifyConfig {
            trials: Some(100),
            ..defaults()
        },
        None,
    )
}

fn c7_code() -> Outcome {
    lemma(
        Lemma::Code,
        &VerifyConfig {
            trials: Some(100),
            ..defaults()
        },
        None,
    )
}

fn c8_odd_fixed() -> Outcome {
    lemma(Lemma::OddFixed, &defaults(), None)
}

fn c9_dyadic() -> Outcome {
    lemma(
        Lemma::Dyadic,
        &VerifyConfig {
            dim: 3,
            ..defaults()
        },
        None,
    )
}

fn c10_swap() -> Outcome {
    lemma(Lemma::Swap, &defaults(), None)
}

fn c11_lift() -> Outcome {
    lemma(Lemma::Lift, &defaults(), None)
}

fn c12_end_to_end() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(["verify", "--all"])
        .output()
        .map_err(|e| format!("cannot run the binary: {e}"))?;
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let summaries = stdout.lines().filter(|l| l.starts_with("lemma=")).count();
    if !out.status.success() {
        return Err(format!("exit {:?}:\n{stdout}", out.status.code()));
    }
    if summaries != Lemma::ALL.len() {
        return Err(format!(
            "expected {} summary lines, got {summaries}",
            Lemma::ALL.len()
        ));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}, budget 60 s"));
    }
    Ok(format!("verify --all exit 0 in {} ms", elapsed.as_millis()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("star-span basis and solver", c1_star_span),
        ("star matrix triangularity", c2_triangular),
        ("shielding", c3_shielding),
        ("fresh separation", c4_fresh),
        ("transport and decision invariance", c5_transport_decision),
        ("normalization", c6_normalize),
        ("two-layer coding", c7_code),
        ("odd fixed point", c8_odd_fixed),
        ("dyadic quotients", c9_dyadic),
        ("swap mechanism", c10_swap),
        ("divisibility lift", c11_lift),
        ("end-to-end verify --all", c12_end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
