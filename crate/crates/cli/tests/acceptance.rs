//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mrp_core::cluster::{cluster_mrp, MrpParams};
use mrp_core::entropy::{
    backward_induction, cluster_entropy, optimal_stop_rule, snell_envelope,
    stopped_martingale_residual, value_function, EntropyParams, StochasticKernel,
};
use mrp_core::oracle::{
    adjusted_rand_index, brute_force_stopping_value, generate_sbm, mc_hit_probability,
    random_connected, SbmSpec,
};
use mrp_core::rng::{stream, Rng};
use mrp_core::solar::harmonic_hit_probability;
use mrp_core::walk::mixing::{mixing_time, walk_statistics};
use mrp_core::walk::{
    carne_check, green_return_identity, hoeffding_check, last_exit_identity, verify_duality,
};
use mrp_core::{VertexSet, WeightedGraph};
use rand::seq::index::sample;
use rand::Rng as _;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Random subset of `0..n` with size in `lo..=hi`.
fn random_subset(rng: &mut Rng, n: usize, lo: usize, hi: usize) -> VertexSet {
    let k = rng.gen_range(lo..=hi);
    sample(rng, n, k).into_iter().collect()
}

fn sbm(seed: u64) -> (WeightedGraph, Vec<usize>) {
    let spec = SbmSpec {
        sizes: vec![30, 30],
        p_in: 0.5,
        p_out: 0.01,
        seed,
    };
    let s = generate_sbm(&spec).expect("valid SBM spec");
    (s.graph, s.labels)
}

fn green_return() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut rng = stream(1, &[i]);
        let n = rng.gen_range(2..=40);
        let g = random_connected(n, rng.gen_range(0.0..0.3), i % 2 == 0, i);
        let a = random_subset(&mut rng, n, 1, n - 1);
        let c = a.as_slice()[rng.gen_range(0..a.len())];
        worst = worst.max(green_return_identity(&g, &a, c).unwrap().residual);
    }
    outcome(
        worst <= 1e-10,
        format!("max residual {worst:.2e} over 50 graphs"),
    )
}

fn last_exit() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut rng = stream(2, &[i]);
        let n = rng.gen_range(3..=40);
        let g = random_connected(n, rng.gen_range(0.0..0.3), i % 2 == 1, i);
        let b = random_subset(&mut rng, n, 2, n - 1);
        let k = rng.gen_range(1..b.len());
        let a: VertexSet = sample(&mut rng, b.len(), k)
            .into_iter()
            .map(|k| b.as_slice()[k])
            .collect();
        worst = worst.max(last_exit_identity(&g, &a, &b).unwrap().residual);
    }
    outcome(
        worst <= 1e-10,
        format!("max residual {worst:.2e} over 50 instances"),
    )
}

fn duality() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let mut rng = stream(3, &[i]);
        let n = rng.gen_range(2..=20);
        let p = random_connected(n, 0.2, true, i).transition_kernel();
        for steps in 0..=8 {
            worst = worst.max(verify_duality(&p, steps));
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max ‖·‖_max residual {worst:.2e}, n ≤ 8, 20 graphs"),
    )
}

fn tail_bounds() -> Outcome {
    let mut cases = 0;
    let mut violations = 0;
    for i in 0..100u64 {
        let mut rng = stream(4, &[i]);
        let n = rng.gen_range(2..=30);
        let g = random_connected(n, rng.gen_range(0.0..0.3), i % 2 == 0, i);
        let sweep = carne_check(&g, 30).unwrap();
        cases += sweep.cases;
        violations += sweep.violations;
    }
    let h = hoeffding_check(60, &[0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95]);
    outcome(
        violations == 0 && h.violations == 0,
        format!(
            "Carne {violations}/{cases} violations, Hoeffding {}/{} violations",
            h.violations, h.cases
        ),
    )
}

fn oliveira() -> Outcome {
    let mut violations = 0;
    for i in 0..100u64 {
        let mut rng = stream(5, &[i]);
        let n = rng.gen_range(2..=30);
        let g = random_connected(n, rng.gen_range(0.0..0.4), i % 2 == 0, i);
        if !walk_statistics(&g, 0.25).unwrap().hitting_bound.satisfied {
            violations += 1;
        }
    }
    let k3 = WeightedGraph::parse_edge_list("0 1\n1 2\n0 2").unwrap();
    let tau = mixing_time(&k3, 0.25).unwrap();
    outcome(
        violations == 0 && tau == Some(2),
        format!("{violations}/100 violations, τ(1/4) on K3 = {tau:?}"),
    )
}

fn harmonic_vs_mc() -> Outcome {
    let mut failures = 0;
    let mut worst = 0.0f64;
    let mut checks = 0;
    for i in 0..20u64 {
        let mut rng = stream(6, &[i]);
        let n = rng.gen_range(10..=200);
        let g = random_connected(n, 3.0 / n as f64, i % 2 == 0, i);
        let b = random_subset(&mut rng, n, 3, n - 1);
        let u: VertexSet = b.iter().filter(|_| rng.gen_bool(0.2)).collect();
        let field = harmonic_hit_probability(&g, &b, &u).unwrap();
        let free: Vec<usize> = b.difference(&u).into_vec();
        for _ in 0..3 {
            let start = free[rng.gen_range(0..free.len())];
            let q = field.value(start);
            let Ok(est) = mc_hit_probability(&g, &b, &u, start, 10_000, i) else {
                // Only possible when the walk is trapped, where q is zero.
                if q != 0.0 {
                    failures += 1;
                }
                continue;
            };
            // The binomial error at the exact q covers estimates of 0 or 1.
            let sigma = est.stderr.max((q * (1.0 - q) / est.samples as f64).sqrt());
            let z = if sigma > 0.0 {
                (q - est.mean).abs() / sigma
            } else {
                0.0
            };
            checks += 1;
            if (q - est.mean).abs() > 4.0 * sigma {
                failures += 1;
            }
            worst = worst.max(z);
        }
    }
    outcome(
        failures == 0,
        format!("{failures} of {checks} outside 4σ, max |z| = {worst:.2}"),
    )
}

fn random_kernel(rng: &mut Rng, states: usize) -> StochasticKernel {
    let rows = (0..states)
        .map(|_| {
            let w: Vec<f64> = (0..states)
                .map(|_| if rng.gen_bool(0.7) { rng.gen() } else { 0.0 })
                .collect();
            let total: f64 = w.iter().sum();
            if total == 0.0 {
                return vec![(rng.gen_range(0..states), 1.0)];
            }
            w.iter()
                .enumerate()
                .filter(|(_, &x)| x > 0.0)
                .map(|(z, &x)| (z, x / total))
                .collect()
        })
        .collect();
    StochasticKernel::from_rows(rows).unwrap()
}

fn snell_optimality() -> Outcome {
    let mut value_gap = 0.0f64;
    let mut martingale = 0.0f64;
    for i in 0..100u64 {
        let mut rng = stream(7, &[i]);
        if i % 2 == 0 {
            // Generic chain with a running reward.
            let states = rng.gen_range(1..=4);
            let horizon = rng.gen_range(1..=16 / states);
            let k = random_kernel(&mut rng, states);
            let payoff: Vec<Vec<f64>> = (0..=horizon)
                .map(|_| (0..states).map(|_| rng.gen_range(-2.0..3.0)).collect())
                .collect();
            let reward: Vec<f64> = (0..states).map(|_| rng.gen_range(0.0..1.0)).collect();
            let table = backward_induction(&k, &payoff, &reward).unwrap();
            for (s, v) in table[0].iter().enumerate() {
                let brute = brute_force_stopping_value(&k.to_dense(), &payoff, &reward, s).unwrap();
                value_gap = value_gap.max((v - brute).abs());
            }
            let env = snell_envelope(&k, &payoff).unwrap();
            martingale = martingale.max(stopped_martingale_residual(
                &k,
                &env,
                &optimal_stop_rule(&env),
            ));
        } else {
            // Graph value function: distance payoff plus occupation reward.
            let n = rng.gen_range(2..=4);
            let horizon = rng.gen_range(1..=16 / n);
            let g = random_connected(n, 0.5, true, i);
            let omega: VertexSet = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            let x = rng.gen_range(0..n);
            let dist: Vec<f64> = g.bfs_distances(x).into_iter().map(|d| d as f64).collect();
            let reward: Vec<f64> = (0..n)
                .map(|v| if omega.contains(v) { 1.0 } else { 0.0 })
                .collect();
            let payoff = vec![dist; horizon + 1];
            let brute =
                brute_force_stopping_value(g.transition_kernel().matrix(), &payoff, &reward, x)
                    .unwrap();
            value_gap =
                value_gap.max((value_function(&g, x, &omega, horizon).unwrap() - brute).abs());
        }
    }
    outcome(
        value_gap <= 1e-12 && martingale <= 1e-12,
        format!("max value gap {value_gap:.2e}, martingale residual {martingale:.2e}"),
    )
}

fn algorithm_one() -> Outcome {
    let aris: Vec<f64> = (0..10u64)
        .map(|seed| {
            let (g, truth) = sbm(seed);
            let run = cluster_mrp(
                &g,
                &MrpParams {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            adjusted_rand_index(&run.clustering.labels(g.n()), &truth).unwrap()
        })
        .collect();
    let good = aris.iter().filter(|&&a| a >= 0.8).count();

    let k = 8;
    let mut edges = Vec::new();
    for base in [0, k] {
        for u in base..base + k {
            for v in u + 1..base + k {
                edges.push((u, v, 1.0));
            }
        }
    }
    edges.push((k - 1, k, 1.0));
    let cliques = WeightedGraph::from_edges(2 * k, edges).unwrap();
    let truth: Vec<usize> = (0..2 * k).map(|v| v / k).collect();
    let run = cluster_mrp(&cliques, &MrpParams::default()).unwrap();
    let clique_ari = adjusted_rand_index(&run.clustering.labels(2 * k), &truth).unwrap();

    let listed: Vec<String> = aris.iter().map(|a| format!("{a:.3}")).collect();
    outcome(
        good >= 7 && clique_ari == 1.0,
        format!(
            "SBM ARI ≥ 0.8 in {good}/10 seeds [{}], bridged cliques ARI {clique_ari}",
            listed.join(" ")
        ),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

fn algorithm_two() -> Outcome {
    let mut top = Vec::new();
    let mut random = Vec::new();
    let mut wins = 0;
    for seed in 0..10u64 {
        let (g, _) = sbm(seed);
        let params = EntropyParams {
            seed,
            ..Default::default()
        };
        let run = cluster_entropy(&g, &params).unwrap();
        let t: Vec<f64> = run
            .ranked
            .iter()
            .map(|s| g.conductance(&s.vertices).unwrap())
            .collect();
        let mut rng = stream(seed, &[0x72616e64]);
        let r: Vec<f64> = (0..params.top_m)
            .map(|_| {
                let s: VertexSet = sample(&mut rng, g.n(), params.kappa).into_iter().collect();
                g.conductance(&s).unwrap()
            })
            .collect();
        if median(t.clone()) <= median(r.clone()) {
            wins += 1;
        }
        top.extend(t);
        random.extend(r);
    }
    let (mt, mr) = (median(top), median(random));
    outcome(
        mt <= mr,
        format!("pooled median conductance top-5 {mt:.4} vs random {mr:.4}; per-seed {wins}/10"),
    )
}

fn run_mrp(args: &[&str], threads: usize) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_mrp"))
        .args(args)
        .args(["--threads", &threads.to_string()])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let read = |path: &str| std::fs::read(path).unwrap();

    let mut mismatched = Vec::new();
    // generate: graph and truth files from three runs.
    let mut generated = Vec::new();
    for (run, threads) in [1, 4, 4].into_iter().enumerate() {
        let graph = p(&format!("g{run}.txt"));
        run_mrp(&["generate", "--seed", "11", "--output", &graph], threads);
        generated.push((read(&graph), read(&p(&format!("g{run}.truth.json")))));
    }
    if generated.windows(2).any(|w| w[0] != w[1]) {
        mismatched.push("generate");
    }
    let graph = p("g0.txt");
    let truth = p("g0.truth.json");
    assert!(Path::new(&graph).exists());

    let clustering = p("c.json");
    run_mrp(
        &[
            "cluster-mrp",
            "--graph",
            &graph,
            "--seed",
            "5",
            "--output",
            &clustering,
        ],
        1,
    );
    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "cluster-mrp",
            vec![
                "cluster-mrp",
                "--graph",
                &graph,
                "--seed",
                "5",
                "--reference",
                &truth,
            ],
        ),
        (
            "cluster-entropy",
            vec!["cluster-entropy", "--graph", &graph, "--seed", "5"],
        ),
        (
            "diagnose",
            vec!["diagnose", "--graph", &graph, "--seed", "5"],
        ),
        (
            "evaluate",
            vec![
                "evaluate",
                "--graph",
                &graph,
                "--clustering",
                &clustering,
                "--reference",
                &truth,
            ],
        ),
    ];
    for (name, args) in &commands {
        let outputs: Vec<Vec<u8>> = [1, 4, 4].into_iter().map(|t| run_mrp(args, t)).collect();
        if outputs.windows(2).any(|w| w[0] != w[1]) || outputs[0].is_empty() {
            mismatched.push(name);
        }
    }
    // The file written earlier must equal the stdout of the same run.
    let stdout = run_mrp(&commands[0].1[..5], 4);
    if read(&clustering) != stdout {
        mismatched.push("cluster-mrp --output");
    }
    outcome(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "5 subcommands identical across --threads 1, 4, 4".into()
        } else {
            format!("differing output: {}", mismatched.join(", "))
        },
    )
}

/// Name, check, and time limit of one criterion.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "green return identity",
            green_return,
            Some(Duration::from_secs(30)),
        ),
        (
            "last-exit identity",
            last_exit,
            Some(Duration::from_secs(30)),
        ),
        ("operator duality", duality, Some(Duration::from_secs(10))),
        (
            "Carne-Varopoulos and Hoeffding",
            tail_bounds,
            Some(Duration::from_secs(60)),
        ),
        (
            "hitting-time bound and K3 mixing",
            oliveira,
            Some(Duration::from_secs(60)),
        ),
        (
            "harmonic solver vs Monte Carlo",
            harmonic_vs_mc,
            Some(Duration::from_secs(60)),
        ),
        (
            "optimal stopping vs enumeration",
            snell_optimality,
            Some(Duration::from_secs(60)),
        ),
        (
            "MRP clustering end to end",
            algorithm_one,
            Some(Duration::from_secs(120)),
        ),
        (
            "entropy sets denser than random",
            algorithm_two,
            Some(Duration::from_secs(120)),
        ),
        ("deterministic subcommands", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = result.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit
            .map(|l| format!(" (limit {}s)", l.as_secs()))
            .unwrap_or_default();
        println!(
            "{} criterion {:>2} {name}: {} [{:.2}s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
