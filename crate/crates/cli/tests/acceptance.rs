//! Acceptance suite: one pass/fail line per criterion, each at its stated
//! tolerance and within its runtime budget.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_moments::census::{brute_force_cycles, walk_diagonals, walk_type_totals, NodeCensus};
use spectral_moments::eigencount::{cdf_bound_sweep, omega_from_graph, primal_lp_oracle, sweep_grid};
use spectral_moments::estimators::social_estimators;
use spectral_moments::spectrum::{spectral_cdf, summarize};
use spectral_moments::{
    bounds_bisect, bounds_s1, bounds_s2, eigencount_upper, eigenvalues, generate, moments_from_aggregates,
    moments_from_census, moments_from_walks, node_census, BoundMethod, CensusAggregates, GenParams, Graph, GraphKind,
    IntervalQuery, MomentSequence, MomentSource,
};
use spectral_moments_cli::args::Cli;
use spectral_moments_cli::ego::EgoBatch;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_str().unwrap().to_string()
}

fn cli_json(args: &[&str]) -> Result<serde_json::Value, String> {
    let cli = Cli::try_parse_from(std::iter::once("spectral-moments").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let out = spectral_moments_cli::run(&cli).map_err(|e| e.to_string())?;
    serde_json::from_str(&out).map_err(|e| e.to_string())
}

fn er_corpus() -> Vec<(String, Graph)> {
    (0..200)
        .map(|i| {
            let n = 3 + (i * 7) % 28;
            let p = [0.1, 0.3, 0.5][i % 3];
            let seed = 1000 + i as u64;
            (format!("er(n={n},p={p},seed={seed})"), generate(GraphKind::ErdosRenyi, n, GenParams { p, seed }).unwrap())
        })
        .collect()
}

fn full_corpus() -> Vec<(String, Graph)> {
    let mut out = er_corpus();
    for n in [3usize, 4, 5, 6, 7, 8, 12, 20, 50, 200] {
        for (name, kind) in
            [("complete", GraphKind::Complete), ("star", GraphKind::Star), ("path", GraphKind::Path), ("ring", GraphKind::Ring)]
        {
            out.push((format!("{name}({n})"), generate(kind, n, GenParams::default()).unwrap()));
        }
    }
    out
}

fn golden_bound(file: &str, beta: f64) -> Outcome {
    let v = cli_json(&["bounds", "--level", "2", "--moments-file", &data(file)])?;
    let b = &v["bounds"][0];
    let (alpha, got) = (b["alpha"].as_f64().ok_or("no alpha")?, b["beta"].as_f64().ok_or("no beta")?);
    check((got - beta).abs() <= 0.05, || format!("beta2 = {got}, expected {beta} ± 0.05"))?;
    check(alpha <= 0.0, || format!("alpha2 = {alpha} > 0"))?;
    Ok(format!("beta2 = {got:.4}, alpha2 = {alpha:.4}"))
}

fn criterion_3() -> Outcome {
    let a = CensusAggregates::from_per_node_averages(2404, 9.478f64, 28.15, 825.3, 31794.0, 1318.0, 8520.0);
    let m = moments_from_aggregates(&a).map_err(|e| e.to_string())?;
    let published = [18.95, 168.9, 9230.0, 402310.0];
    for (k, &p) in published.iter().enumerate() {
        let got = m.m[k + 2];
        check((got - p).abs() <= 0.002 * p, || format!("m{} = {got}, published {p}", k + 2))?;
    }
    let (la, _) = social_estimators(&a);
    let la = la.ok_or("lambda_a undefined")?;
    check((la - 62.6).abs() <= 0.5, || format!("lambda_a = {la}"))?;
    Ok(format!("m = {:.2?}, lambda_a = {la:.2}", &m.m[2..]))
}

fn criterion_4() -> Outcome {
    for n in [3usize, 5, 6, 7, 8, 12] {
        let g = generate(GraphKind::Ring, n, GenParams::default()).unwrap();
        let census = moments_from_census(&node_census(&g).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let walks = moments_from_walks(&g, 5).map_err(|e| e.to_string())?;
        check(census.closed_walks[4] == 6 * n as u128, || format!("R{n}: census n*m4 = {}", census.closed_walks[4]))?;
        check(walks.closed_walks[4] == 6 * n as u128, || format!("R{n}: walks n*m4 = {}", walks.closed_walks[4]))?;
    }
    Ok("m4 = 6 for n in {3,5,6,7,8,12} by both routes".into())
}

fn criterion_5() -> Outcome {
    let corpus = er_corpus();
    for (name, g) in &corpus {
        let c = node_census(g).map_err(|e| e.to_string())?;
        let n = g.node_count();
        let oracle = NodeCensus {
            d: (0..n).map(|i| g.degree(i) as u64).collect(),
            t: (0..n).map(|i| brute_force_cycles(g, 3, i).unwrap()).collect(),
            q: (0..n).map(|i| brute_force_cycles(g, 4, i).unwrap()).collect(),
            p: (0..n).map(|i| brute_force_cycles(g, 5, i).unwrap()).collect(),
        };
        check(c == oracle, || format!("{name}: census differs from enumeration"))?;
        let w = walk_diagonals(g).map_err(|e| e.to_string())?;
        let (t4, t5) = walk_type_totals(&oracle);
        check(t4.total() == w.w4.iter().sum::<u64>(), || format!("{name}: 4-walk identity"))?;
        check(t5.total() == w.w5.iter().sum::<u64>(), || format!("{name}: 5-walk identity"))?;
    }
    Ok(format!("{} graphs exact", corpus.len()))
}

fn criterion_6() -> Outcome {
    let corpus = full_corpus();
    let mut worst = 0.0f64;
    for (name, g) in &corpus {
        let c = node_census(g).map_err(|e| e.to_string())?;
        let census = moments_from_census(&c).map_err(|e| e.to_string())?.to_sequence::<f64>();
        let walks = moments_from_walks(g, 5).map_err(|e| e.to_string())?.to_sequence::<f64>();
        let spec = eigenvalues::<f64>(g).map_err(|e| e.to_string())?.moments;
        let d = census.max_relative_difference(&walks).max(census.max_relative_difference(&spec));
        check(d <= 1e-9, || format!("{name}: relative difference {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("{} graphs, worst relative difference {worst:.1e}", corpus.len()))
}

fn criterion_7() -> Outcome {
    let corpus = full_corpus();
    let mut checked = 0;
    for (name, g) in &corpus {
        if g.edge_count() == 0 {
            continue;
        }
        let ms = moments_from_walks(g, 5).map_err(|e| e.to_string())?.to_sequence::<f64>();
        let spec = eigenvalues::<f64>(g).map_err(|e| e.to_string())?;
        let b1 = bounds_s1(&ms).map_err(|e| format!("{name}: {e}"))?;
        let b2 = bounds_s2(&ms).map_err(|e| format!("{name}: {e}"))?;
        let tol = 1e-8 * (1.0 + spec.rho);
        check(b2.alpha <= b1.alpha + tol && b2.beta >= b1.beta - tol, || format!("{name}: not monotone"))?;
        check(spec.lambda_min <= b2.alpha + tol && b2.beta <= spec.rho + tol, || format!("{name}: level 2 unsound"))?;
        check(spec.lambda_min <= b1.alpha + tol && b1.beta <= spec.rho + tol, || format!("{name}: level 1 unsound"))?;
        let agree = 1e-5 * (1.0 + spec.rho);
        let bis1 = bounds_bisect(&ms, 1, 1e-10).map_err(|e| e.to_string())?;
        check((bis1.alpha - b1.alpha).abs() <= agree && (bis1.beta - b1.beta).abs() <= agree, || {
            format!("{name}: level-1 closed form vs bisection")
        })?;
        if b2.method == BoundMethod::ClosedForm {
            let bis2 = bounds_bisect(&ms, 2, 1e-10).map_err(|e| e.to_string())?;
            check((bis2.alpha - b2.alpha).abs() <= agree && (bis2.beta - b2.beta).abs() <= agree, || {
                format!("{name}: level-2 closed form vs bisection")
            })?;
        }
        checked += 1;
    }
    for n in 2..=30usize {
        let g = generate(GraphKind::Complete, n, GenParams::default()).unwrap();
        let b = bounds_s1(&moments_from_walks(&g, 3).unwrap().to_sequence::<f64>()).map_err(|e| e.to_string())?;
        check((b.beta - (n - 1) as f64).abs() < 1e-9 && (b.alpha + 1.0).abs() < 1e-9, || {
            format!("K{n}: ({}, {})", b.alpha, b.beta)
        })?;
    }
    Ok(format!("{checked} graphs sound and monotone; K2..K30 tight"))
}

fn example2() -> MomentSequence<f64> {
    MomentSequence::from_tail(9, &[0.0, 4.0 / 3.0, 0.0, 4.0, 0.0], MomentSource::External).unwrap()
}

fn criterion_8() -> Outcome {
    let spec = summarize(vec![-2.0, -1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0]).unwrap();
    let alphas = sweep_grid(-5.0, 0.25, 3.0).map_err(|e| e.to_string())?;
    for pt in cdf_bound_sweep(&example2(), &alphas, (-3.0, 3.0), 4, 1e-8) {
        let z = pt.z_d.ok_or_else(|| format!("alpha {}: {:?}", pt.alpha, pt.error))?;
        let f = spectral_cdf(&spec, pt.alpha);
        check(z >= f, || format!("alpha {}: Z_D {z} < F {f}", pt.alpha))?;
        check(z <= 1.0 + 1e-6, || format!("alpha {}: Z_D {z} > 1", pt.alpha))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut graphs = 0;
    let mut seed = 500u64;
    while graphs < 20 {
        let n = 6 + graphs % 10;
        let g = generate(GraphKind::ErdosRenyi, n, GenParams { p: 0.4, seed }).unwrap();
        seed += 1;
        if g.edge_count() == 0 {
            continue;
        }
        let ms = moments_from_walks(&g, 5).unwrap().to_sequence::<f64>();
        let s = eigenvalues::<f64>(&g).map_err(|e| e.to_string())?;
        let omega = omega_from_graph::<f64>(&g);
        for _ in 0..10 {
            let (a, b) = (rng.gen_range(omega.0..omega.1), rng.gen_range(omega.0..omega.1));
            let (lo, hi) = (a.min(b), a.max(b));
            let k = rng.gen_range(2..=5usize);
            let q = IntervalQuery::new((lo, hi), omega, k).map_err(|e| e.to_string())?;
            let r = eigencount_upper(&ms, &q, 1e-8).map_err(|e| e.to_string())?;
            let frac = s.eigenvalues.iter().filter(|&&x| x >= lo && x <= hi).count() as f64 / n as f64;
            check(r.z_d >= frac, || format!("seed {}: T=[{lo},{hi}] k={k}: Z_D {} < {frac}", seed - 1, r.z_d))?;
        }
        graphs += 1;
    }
    Ok(format!("{} sweep points and {} graph intervals dominated", alphas.len(), graphs * 10))
}

fn criterion_9() -> Outcome {
    let q = IntervalQuery::new((-3.0, -2.0), (-3.0, 3.0), 4).unwrap();
    let dual = eigencount_upper(&example2(), &q, 1e-9).map_err(|e| e.to_string())?;
    let primal = primal_lp_oracle(&example2(), &q, 10_000).map_err(|e| e.to_string())?;
    let gap = (dual.z_d - primal.value).abs();
    check(gap <= 1e-2, || format!("Z_D {} vs LP {}", dual.z_d, primal.value))?;
    Ok(format!("Z_D = {:.6}, LP = {:.6}, gap {gap:.1e}", dual.z_d, primal.value))
}

fn criterion_10() -> Outcome {
    let v = cli_json(&[
        "sample-ego",
        "--generate",
        "erdos_renyi:2000:0.004",
        "--seed",
        "2024",
        "--count",
        "20",
        "--radius",
        "2",
    ])?;
    let batch: EgoBatch = serde_json::from_value(v).map_err(|e| e.to_string())?;
    check(batch.rows.len() == 20, || format!("{} rows", batch.rows.len()))?;
    for r in &batch.rows {
        let (b2, rho) = (r.beta2.ok_or("missing beta2")?, r.rho.ok_or("missing rho")?);
        check(b2 <= rho + 1e-8 * (1.0 + rho), || format!("root {}: beta2 {b2} > rho {rho}", r.root))?;
    }
    let corr = |name: &str| batch.correlations.iter().find(|c| c.estimator == name).and_then(|c| c.pearson);
    let (cb, cw) = (corr("beta2").ok_or("no beta2 correlation")?, corr("W").ok_or("no W correlation")?);
    check((-1.0..=1.0).contains(&cb) && (-1.0..=1.0).contains(&cw), || "correlation out of range".into())?;
    Ok(format!("20 rows sound; corr(beta2, rho) = {cb:.4}, corr(W, rho) = {cw:.4}"))
}

fn main() {
    let criteria: Vec<(u32, &str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "Enron golden bound", 1, Box::new(|| golden_bound("enron.json", 78.53))),
        (2, "AS-Skitter golden bound", 1, Box::new(|| golden_bound("as-skitter.json", 74.72))),
        (3, "social-network moment pipeline", 1, Box::new(criterion_3)),
        (4, "ring fourth moment", 1, Box::new(criterion_4)),
        (5, "census oracle suite", 60, Box::new(criterion_5)),
        (6, "moment triple agreement", 120, Box::new(criterion_6)),
        (7, "bound soundness and monotonicity", 60, Box::new(criterion_7)),
        (8, "eigencount domination", 120, Box::new(criterion_8)),
        (9, "dual vs discretized primal", 30, Box::new(criterion_9)),
        (10, "ego-subgraph batch", 120, Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in &criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(*budget) => Err(format!("{d}; took {elapsed:.2?}, budget {budget} s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
