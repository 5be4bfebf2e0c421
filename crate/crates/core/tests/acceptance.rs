//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances: scores 1e-9, gradient 1e-4 relative, accuracy 0.95.

mod common;

use std::time::{Duration, Instant};

use common::*;
use facetforge_core::demo;
use facetforge_core::evaluation::score_task;
use facetforge_core::matcher::synthetic::corpus;
use facetforge_core::matcher::{learn_weights, loss_and_gradient, LearnConfig, ModelParams, Sample};
use facetforge_core::{PortletId, UserId};

const SCORE_TOL: f64 = 1e-9;
const GRADIENT_TOL: f64 = 1e-4;
const MIN_ACCURACY: f64 = 0.95;

fn close(got: f64, want: f64) -> Result<(), String> {
    if (got - want).abs() <= SCORE_TOL {
        Ok(())
    } else {
        Err(format!("got {got}, want {want}"))
    }
}

fn usability_matrix() -> Result<(), String> {
    let s = score_task(&demo::usability_matrix()).map_err(|e| e.to_string())?;
    close(s.average, 6.75)?;
    close(s.weighted, 5.9)?;
    for ((_, got), want) in s.per_attribute.iter().zip([0.8, 0.8, 2.5, 1.8]) {
        close(*got, want)?;
    }
    Ok(())
}

fn shared_photo() -> Result<(), String> {
    let ws = demo::seed().map_err(|e| e.to_string())?;
    let r = ws.resolve(Some(&UserId::new(demo::SPEAKER)), &PortletId::new(demo::PHOTO)).map_err(|e| e.to_string())?;
    for (viewer, want) in [(demo::SPEAKER, "ferrari"), (demo::AUDIENCE_A, "sport car"), (demo::AUDIENCE_B, "expensive car")] {
        let view = r.views.get(&UserId::new(viewer)).ok_or(format!("no view for {viewer}"))?;
        let labels: Vec<&String> = view.label_assignment.values().collect();
        if labels != [want] {
            return Err(format!("{viewer} sees {labels:?}, want {want:?}"));
        }
    }
    Ok(())
}

fn learnability() -> Result<(), String> {
    let pairs = corpus(200, 2024);
    let out = learn_weights(&pairs, &LearnConfig::default()).map_err(|e| e.to_string())?;
    let holdout = out.holdout_accuracy.ok_or("no held-out split")?;
    if holdout < MIN_ACCURACY {
        return Err(format!("held-out accuracy {holdout}"));
    }
    let samples: Vec<Sample> = pairs.iter().map(|p| p.dimensions()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let grid = grid_search_accuracy(&samples);
    if grid < MIN_ACCURACY {
        return Err(format!("grid-search oracle reaches only {grid}"));
    }
    let mut worst = 0.0f64;
    for point in [vec![0.0, 0.0, 0.0, 0.35], vec![0.7, -1.2, 0.4, 0.5], vec![-1.5, 2.0, 0.1, 0.2]] {
        let (_, grad) = loss_and_gradient(&ModelParams::from_slice(&point), &samples, 10.0);
        for i in 0..point.len() {
            let h = 1e-6;
            let at = |delta: f64| {
                let mut p = point.clone();
                p[i] += delta;
                loss_and_gradient(&ModelParams::from_slice(&p), &samples, 10.0).0
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            worst = worst.max((fd - grad[i]).abs() / fd.abs().max(grad[i].abs()).max(1e-8));
        }
    }
    if worst > GRADIENT_TOL {
        return Err(format!("gradient relative error {worst}"));
    }
    println!(
        "    held-out accuracy {holdout:.3}, grid oracle {grid:.3}, weights {:?}, gradient rel err {worst:.2e}",
        out.weights.as_slice()
    );
    Ok(())
}

fn oracles() -> Result<(), String> {
    query_matches_brute_force(500)?;
    plan_matches_bfs(200)?;
    superconcepts_match_closure(200)
}

type Suite = fn(u32) -> Result<(), String>;
type Check = fn() -> Result<(), String>;

fn properties() -> Result<(), String> {
    let suites: [(&str, Suite); 6] = [
        ("filter monotonicity and order", filter_monotone_and_order_free),
        ("zoom/unzoom inverse", zoom_unzoom_inverse),
        ("composition commutativity", compose_commutative),
        ("tag normalization idempotence", normalization_idempotent),
        ("weighted score convexity", weighted_score_convex),
        ("joint fixpoint bound and determinism", joint_fixpoint_bounded_and_deterministic),
    ];
    for (name, suite) in suites {
        suite(PROPERTY_CASES).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, Check, Option<Duration>); 5] = [
        ("sample usability matrix scores", usability_matrix, Some(Duration::from_secs(1))),
        ("shared photo labels per viewer", shared_photo, Some(Duration::from_secs(1))),
        ("matcher learnability", learnability, Some(Duration::from_secs(30))),
        ("oracle equivalence", oracles, None),
        ("property suites (1000 cases each)", properties, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(()), Some(limit)) = (&result, limit) {
            if elapsed > limit {
                result = Err(format!("took {elapsed:?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(()) => println!("PASS  {name}  ({:.3}s)", elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL  {name}  ({:.3}s): {e}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
