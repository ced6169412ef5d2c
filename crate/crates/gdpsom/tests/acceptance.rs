//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Runs without the libtest harness, so the lines
//! show up in plain `cargo test` output.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use gdpsom::documents::{read_compare_report, read_run_report};
use gdpsom::features::load_feature_csv;
use gdpsom_core::bayes::{fit_nb, predict};
use gdpsom_core::dataset::FeatureRow;
use gdpsom_core::klassen::classify_all;
use gdpsom_core::pipeline::{aligned_agreement, raw_agreement, run_pipeline, PipelineConfig};
use gdpsom_core::som::{
    assign_labels, hit_counts, initialize_som, quantization_error, train_som, update_prototype, SomConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn crit1_reference_agreement() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let report = dir.path().join("cmp.json");
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_gdpsom"))
        .args([
            "compare",
            fixture("banten_54.csv").to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let c = read_compare_report(&report).map_err(|e| e.to_string())?.comparison;
    let expected = vec![8, 9, 16, 17, 18, 21, 22, 24, 32, 33, 35, 38, 39, 40, 44, 47];
    check((c.raw.num, c.raw.den) == (16, 54), || {
        format!("raw {}/{}", c.raw.num, c.raw.den)
    })?;
    check(c.raw.percent == "29.63", || format!("percent {}", c.raw.percent))?;
    check(c.matching_rows == expected, || {
        format!("matching rows {:?}", c.matching_rows)
    })?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("16/54 = {}%, 16 matching rows, {elapsed:?}", c.raw.percent))
}

fn crit2_quadrant_rule() -> Outcome {
    let table = load_feature_csv(&fixture("banten_54.csv")).map_err(|e| e.to_string())?;
    let column = table.klassen.clone().ok_or("no klassen column")?;
    let skip = table
        .annotation_list("klassen-inconsistent")
        .ok_or("no klassen-inconsistent annotation")?;
    let got: Vec<u32> = classify_all(&table.rows)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|q| u32::from(q.value()))
        .collect();
    check(got[..5] == [4, 3, 1, 2, 4], || format!("rows 1-5 gave {:?}", &got[..5]))?;
    let mut checked = 0;
    for (i, (g, c)) in got.iter().zip(&column).enumerate() {
        if skip.contains(&(i + 1)) {
            continue;
        }
        check(g == c, || format!("row {}: computed {g}, table {c}", i + 1))?;
        checked += 1;
    }
    Ok(format!(
        "{checked} consistent rows reproduced, {} annotated rows skipped",
        skip.len()
    ))
}

fn crit3_som_determinism() -> Outcome {
    let table = load_feature_csv(&fixture("central_java_135.csv")).map_err(|e| e.to_string())?;
    let config = SomConfig::default().with_seed(11);
    let start = Instant::now();
    let a = train_som(&table.rows, &config).map_err(|e| e.to_string())?;
    let b = train_som(&table.rows, &config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let same_bits = a
        .prototypes
        .iter()
        .flatten()
        .zip(b.prototypes.iter().flatten())
        .all(|(x, y)| x.to_bits() == y.to_bits());
    check(same_bits, || "prototypes differ between runs".into())?;
    let hits = hit_counts(&assign_labels(&a, &table.rows).map_err(|e| e.to_string())?, a.units());
    check(hits.len() == 4 && hits.iter().sum::<usize>() == 135, || {
        format!("hits {hits:?}")
    })?;
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("identical prototypes, hits {hits:?}, two runs in {elapsed:?}"))
}

fn crit4_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..10_000 {
        let d = rng.gen_range(1..=8);
        let m: Vec<f64> = (0..d).map(|_| rng.gen_range(-1e3..1e3)).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1e3..1e3)).collect();
        let alpha = rng.gen_range(0.0..=1.0);
        let h = rng.gen_range(0.0..=1.0);
        let next = update_prototype(&m, &x, alpha, h).map_err(|e| e.to_string())?;
        let dist = |a: &[f64]| a.iter().zip(&x).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let (before, after) = (dist(&m), dist(&next));
        let expected = (1.0 - alpha * h) * before;
        check((after - expected).abs() <= 1e-12 * before.max(1.0), || {
            format!("case {case}: |m'-x| = {after}, (1-ah)|m-x| = {expected}")
        })?;
    }
    Ok("10000 random updates contract by exactly (1 - alpha*h)".into())
}

fn crit5_bayes_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    for case in 0..100 {
        let d = rng.gen_range(1..=4);
        let k = rng.gen_range(2..=4u32);
        let n = rng.gen_range(2 * k as usize..30);
        // At least two members per class keeps every variance well above the floor.
        let labels: Vec<u32> = (0..n)
            .map(|i| {
                if i < 2 * k as usize {
                    i as u32 % k + 1
                } else {
                    rng.gen_range(1..=k)
                }
            })
            .collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| (0..d).map(|_| l as f64 + rng.gen_range(-1.5..1.5)).collect())
            .collect();
        let model = fit_nb(&rows, &labels, 1e-9).map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..(k as f64 + 1.0))).collect();
        let p = predict(&model, &x).map_err(|e| e.to_string())?;

        // Linear-space oracle with independently computed parameters.
        let mut joint = Vec::new();
        for c in 1..=k {
            let members: Vec<&Vec<f64>> = rows
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == c)
                .map(|(r, _)| r)
                .collect();
            let m = members.len() as f64;
            let mut density = m / n as f64;
            for j in 0..d {
                let mean = members.iter().map(|r| r[j]).sum::<f64>() / m;
                let var = members.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / m;
                density *= (-(x[j] - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
            }
            joint.push(density);
        }
        let total: f64 = joint.iter().sum();
        let sum: f64 = p.posteriors.iter().sum();
        check((sum - 1.0).abs() <= 1e-9, || {
            format!("case {case}: posteriors sum to {sum}")
        })?;
        for (c, (got, want)) in p.posteriors.iter().zip(joint.iter().map(|j| j / total)).enumerate() {
            check((got - want).abs() <= 1e-9, || {
                format!("case {case}, class {}: {got} vs oracle {want}", c + 1)
            })?;
        }
        // Highest joint density, lowest label on ties.
        let best = (2..=k).fold(1, |b, c| {
            if joint[(c - 1) as usize] > joint[(b - 1) as usize] {
                c
            } else {
                b
            }
        });
        check(p.label == best, || {
            format!("case {case}: label {} vs oracle {best}", p.label)
        })?;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "100 random models match the brute-force posterior, {elapsed:?}"
    ))
}

fn crit6_separated_blobs() -> Outcome {
    const CENTERS: [[f64; 4]; 4] = [
        [0.0, 0.0, 0.0, 0.0],
        [20.0, 0.0, 20.0, 0.0],
        [0.0, 20.0, 0.0, 20.0],
        [20.0, 20.0, 20.0, 20.0],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut draw = |n: usize| -> Vec<FeatureRow> {
        (0..n)
            .map(|i| {
                let c = CENTERS[i % 4];
                let v: Vec<f64> = c.iter().map(|m| m + normal(&mut rng)).collect();
                FeatureRow::new(v[0], v[1], v[2], v[3])
            })
            .collect()
    };
    let (train, test) = (draw(135), draw(54));
    let out = run_pipeline(&train, &test, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    let fidelity = out.train_fidelity;
    check(fidelity.num * 100 >= fidelity.den * 98, || {
        format!("fidelity {}%", fidelity.percent())
    })?;
    check(out.predictions.iter().all(|p| out.train_labels.contains(p)), || {
        "a prediction is not a training label".into()
    })?;
    let truth: Vec<u32> = (0..54).map(|i| i % 4 + 1).collect();
    let aligned = aligned_agreement(&truth, &out.predictions).map_err(|e| e.to_string())?;
    Ok(format!(
        "train fidelity {}%, test rows recover blobs {}%",
        fidelity.percent(),
        aligned.ratio.percent()
    ))
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut all = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            all.push(p);
        }
    }
    all
}

fn crit7_alignment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let perms = permutations(&[1, 2, 3, 4]);
    for case in 0..1000 {
        let n = rng.gen_range(1..40);
        let a: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        let b: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        let raw = raw_agreement(&a, &b).map_err(|e| e.to_string())?.ratio;
        let aligned = aligned_agreement(&a, &b).map_err(|e| e.to_string())?;
        check(aligned.ratio.num >= raw.num, || {
            format!("case {case}: aligned below raw")
        })?;
        let oracle = perms
            .iter()
            .map(|p| a.iter().zip(&b).filter(|(x, y)| **x == p[(**y - 1) as usize]).count() as u64)
            .max()
            .unwrap();
        check(aligned.ratio.num == oracle, || {
            format!("case {case}: aligned {} vs exhaustive {oracle}", aligned.ratio.num)
        })?;
        let relabeled = b.iter().zip(&a).filter(|(y, x)| aligned.apply(**y) == **x).count() as u64;
        check(relabeled == oracle, || {
            format!("case {case}: mapping yields {relabeled}, not {oracle}")
        })?;
    }
    Ok("1000 random pairs: aligned >= raw and equals the exhaustive optimum".into())
}

fn crit8_degenerate_run() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_gdpsom"))
        .args([
            "run",
            fixture("central_java_135.csv").to_str().unwrap(),
            fixture("dominant.csv").to_str().unwrap(),
            "--swap-roles",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&o.stderr);
    check(o.status.success(), || format!("exit {:?}: {stderr}", o.status.code()))?;
    check(stderr.contains("EmptySomCluster"), || {
        format!("stderr lacks EmptySomCluster: {stderr}")
    })?;
    check(stderr.contains("UnusedPredictedLabel"), || {
        format!("stderr lacks UnusedPredictedLabel: {stderr}")
    })?;
    let report = read_run_report(&out.join("report.json")).map_err(|e| e.to_string())?;
    let flagged = report.comparisons.iter().any(|c| !c.unused_predicted_labels.is_empty());
    check(flagged, || "report flags no unused labels".into())?;
    let empty = report.som_hits.iter().filter(|&&h| h == 0).count();
    Ok(format!(
        "exit 0, {empty} empty SOM units reported, hits {:?}",
        report.som_hits
    ))
}

fn crit9_quantization_improves() -> Outcome {
    let table = load_feature_csv(&fixture("central_java_135.csv")).map_err(|e| e.to_string())?;
    let config = SomConfig::default().with_seed(0);
    let initial = initialize_som(&table.rows, &config).map_err(|e| e.to_string())?;
    let trained = train_som(&table.rows, &config).map_err(|e| e.to_string())?;
    let before = quantization_error(&initial, &table.rows).map_err(|e| e.to_string())?;
    let after = quantization_error(&trained, &table.rows).map_err(|e| e.to_string())?;
    check(after < before, || format!("QE {before} -> {after}"))?;
    Ok(format!("QE {before:.4} -> {after:.4}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("reference table agreement is 16/54 = 29.63%", crit1_reference_agreement),
        (
            "quadrant rule reproduces the consistent klassen rows",
            crit2_quadrant_rule,
        ),
        ("SOM training is bit-for-bit deterministic", crit3_som_determinism),
        ("prototype update contracts toward the input", crit4_contraction),
        ("naive Bayes matches a brute-force oracle", crit5_bayes_oracle),
        ("well separated blobs are recovered", crit6_separated_blobs),
        ("aligned agreement is optimal and never below raw", crit7_alignment),
        (
            "degenerate swapped run completes with diagnostics",
            crit8_degenerate_run,
        ),
        ("training lowers quantization error", crit9_quantization_improves),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name} ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
