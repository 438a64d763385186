use orientcycle::generate::random_oriented;
use orientcycle::pattern::OrientationPattern;
use orientcycle::reduced::ReducedGraph;
use orientcycle::walk::synthetic::{close_scenario, far_scenario, random_reduced};
use orientcycle::walk::{
    assignment_stats, azuma_bound, azuma_tail_probe, balance_close, balance_far, build_r_star, check_homomorphism,
    incorporate_exceptional_close, incorporate_exceptional_far, concentration_regime, move_load_close, move_load_far,
    off_f_edge_count, random_assign, is_balanced_assignment, AssignmentStats, CorrectionKind, EngineError, RStar, Slot,
};
use orientcycle::VertexSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_links<R: Rng>(m: usize, k: usize, rng: &mut R) -> RStar {
    let pick = |rng: &mut R| {
        let mut s = VertexSet::from_iter(m, (0..m).filter(|_| rng.gen_bool(0.3)));
        if s.is_empty() {
            s.insert(rng.gen_range(0..m));
        }
        s
    };
    let ins = (0..k).map(|_| pick(rng)).collect();
    let outs = (0..k).map(|_| pick(rng)).collect();
    RStar::from_links(ins, outs)
}

#[test]
fn far_balancing_on_random_scenarios() {
    for seed in 0..150 {
        let mut r = rng(seed);
        let m = r.gen_range(5..=12);
        let mut sc = far_scenario(m, &mut r).expect("reduced graph");
        let total: usize = sc.state.walk.loads(m).iter().sum();
        let fixes = balance_far(&mut sc.state, &sc.rg, 2 * m).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(sc.state.walk.loads(m), vec![sc.target; m], "seed {seed}");
        assert_eq!(sc.state.walk.loads(m).iter().sum::<usize>(), total);
        assert!(check_homomorphism(&sc.state.walk, &sc.rg, None).is_ok());
        assert_eq!(off_f_edge_count(&sc.state.walk, m), sc.state.off_f_added);
        let moved: i64 = sc.imbalance.iter().filter(|&&d| d > 0).sum();
        assert_eq!(fixes.len() as i64, moved);
    }
}

#[test]
fn close_balancing_on_random_scenarios() {
    for seed in 0..150 {
        let mut r = rng(seed);
        let m = r.gen_range(5..=12);
        let mut sc = close_scenario(m, &mut r).expect("reduced graph");
        let total: usize = sc.state.walk.loads(m).iter().sum();
        let fixes = balance_close(&mut sc.state, &sc.rg).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(sc.state.walk.loads(m), vec![sc.target; m], "seed {seed}");
        assert_eq!(sc.state.walk.loads(m).iter().sum::<usize>(), total);
        assert!(check_homomorphism(&sc.state.walk, &sc.rg, None).is_ok());
        assert_eq!(off_f_edge_count(&sc.state.walk, m), sc.state.off_f_added);
        for c in &fixes {
            // each traverse edge is the only possible off-F step of its hop
            let hops: usize = c.traverses.iter().map(|t| t + 1).sum();
            assert!(c.off_f_edges <= hops, "{c:?}");
        }
    }
}

#[test]
fn far_incorporation_drops_one_unit() {
    for seed in 0..100 {
        let mut r = rng(1000 + seed);
        let m = r.gen_range(5..=10);
        let mut sc = far_scenario(m, &mut r).unwrap();
        let rstar = random_links(m, 1, &mut r);
        let before = sc.state.walk.loads(m);
        let i = incorporate_exceptional_far(&mut sc.state, &sc.rg, &rstar, 0).unwrap().source;
        let after = sc.state.walk.loads(m);
        assert!(rstar.in_links[0].contains(i));
        assert_eq!(after.iter().sum::<usize>() + 1, before.iter().sum::<usize>());
        assert_eq!(after[(i + 1) % m] + 1, before[(i + 1) % m]);
        assert_eq!(sc.state.walk.exceptional_slots(), vec![0]);
        assert!(check_homomorphism(&sc.state.walk, &sc.rg, Some(&rstar)).is_ok());
    }
}

#[test]
fn close_incorporation_ledger() {
    for seed in 0..100 {
        let mut r = rng(2000 + seed);
        let m = r.gen_range(5..=10);
        let mut sc = close_scenario(m, &mut r).unwrap();
        let rstar = random_links(m, 1, &mut r);
        let before = sc.state.walk.loads(m);
        let len = sc.state.walk.len();
        let c = incorporate_exceptional_close(&mut sc.state, &sc.rg, &rstar, 0).unwrap();
        let (i, j) = (c.source, c.target.unwrap());
        let after = sc.state.walk.loads(m);
        let mut expect: Vec<i64> = before.iter().map(|&x| x as i64).collect();
        expect[(i + 1) % m] -= 1;
        expect[(i + 2) % m] -= 1;
        expect[j] += 1;
        let got: Vec<i64> = after.iter().map(|&x| x as i64).collect();
        assert_eq!(got, expect, "seed {seed}");
        assert_eq!(sc.state.walk.len(), len);
        assert!(check_homomorphism(&sc.state.walk, &sc.rg, Some(&rstar)).is_ok());
    }
}

#[test]
fn links_without_in_link_are_rejected() {
    let mut r = rng(3);
    let mut sc = close_scenario(6, &mut r).unwrap();
    let rstar = RStar::from_links(vec![VertexSet::from_iter(6, [1])], vec![VertexSet::empty(6)]);
    assert_eq!(
        incorporate_exceptional_close(&mut sc.state, &sc.rg, &rstar, 0),
        Err(EngineError::NoLink(0))
    );
}

#[test]
fn random_correction_sequences_conserve_load() {
    let mut r = rng(77);
    for round in 0..1000 {
        let m = r.gen_range(5..=8);
        let far = round % 2 == 0;
        let mut sc = if far { far_scenario(m, &mut r) } else { close_scenario(m, &mut r) }.unwrap();
        let total: usize = sc.state.walk.loads(m).iter().sum();
        for _ in 0..r.gen_range(1..=6) {
            let i = r.gen_range(0..m);
            let j = (i + r.gen_range(1..m)) % m;
            let before_state = sc.state.clone();
            let before = sc.state.walk.loads(m);
            let res = if far {
                move_load_far(&mut sc.state, &sc.rg, i, j, 2 * m)
            } else {
                move_load_close(&mut sc.state, &sc.rg, i, j)
            };
            let after = sc.state.walk.loads(m);
            match res {
                Ok(c) => {
                    assert!(matches!(c.kind, CorrectionKind::BalanceFar | CorrectionKind::BalanceClose));
                    for k in 0..m {
                        let d = after[k] as i64 - before[k] as i64;
                        let want = if k == i { -1 } else if k == j { 1 } else { 0 };
                        assert_eq!(d, want, "round {round} cluster {k}");
                    }
                }
                Err(_) => assert_eq!(sc.state, before_state),
            }
            assert_eq!(after.iter().sum::<usize>(), total);
            assert!(check_homomorphism(&sc.state.walk, &sc.rg, None).is_ok());
        }
    }
}

#[test]
fn r_star_links_match_direct_recount() {
    let mut r = rng(8);
    let rg = random_reduced(8, 1.0, &mut r).unwrap();
    let g = random_oriented(8 * 5 + 6, 0.5, &mut r);
    let mut order: Vec<usize> = (0..g.n()).collect();
    use rand::seq::SliceRandom;
    order.shuffle(&mut r);
    let clusters: Vec<VertexSet> = (0..8).map(|i| VertexSet::from_iter(g.n(), order[i * 5..i * 5 + 5].iter().copied())).collect();
    let exc = VertexSet::from_iter(g.n(), order[40..].iter().copied());
    let c = 0.4;
    let rs = build_r_star(&rg, &g, &clusters, &exc, c).unwrap();
    for (k, v) in exc.iter().enumerate() {
        for (i, part) in clusters.iter().enumerate() {
            let outs = part.iter().filter(|&u| g.has_edge(v, u)).count();
            let ins = part.iter().filter(|&u| g.has_edge(u, v)).count();
            assert_eq!(rs.out_links[k].contains(i), outs as f64 >= c * 5.0);
            assert_eq!(rs.in_links[k].contains(i), ins as f64 >= c * 5.0);
        }
    }
    assert!(matches!(build_r_star(&rg, &g, &clusters, &exc, 0.0), Err(EngineError::BadLinkConstant(_))));
}

fn cycle_rg(k: usize) -> ReducedGraph {
    ReducedGraph::along_identity(&orientcycle::generate::directed_cycle(k), 0.1).unwrap()
}

#[test]
fn single_cluster_has_no_deviation() {
    let stats = AssignmentStats { a: vec![20_000], n_q: vec![317], m_runs: vec![0], exceptional_used: 0 };
    assert!(is_balanced_assignment(&stats, 317, 0.0));
    let rg = cycle_rg(5);
    let paths: Vec<OrientationPattern> = (0..50).map(|s| OrientationPattern::random_linear(10, &mut rng(s)).unwrap()).collect();
    let pairs = vec![vec![]; 50];
    let a = random_assign(&rg, &paths, &pairs, 1.0, &mut rng(0)).unwrap();
    assert_eq!(a.attempts, 1);
    assert_eq!(a.stats.total_load(), 500);
}

#[test]
fn acceptance_within_ten_attempts_in_regime() {
    let (k, gamma) = (4usize, 0.1);
    let s = 9000;
    assert!(concentration_regime(k, s, gamma));
    let rg = cycle_rg(k);
    let mut quick = 0;
    let runs = 200;
    for seed in 0..runs {
        let mut r = rng(seed);
        let paths: Vec<OrientationPattern> = (0..s).map(|_| OrientationPattern::random_linear(4, &mut r).unwrap()).collect();
        let pairs: Vec<Vec<usize>> = paths.iter().map(|p| p.neutral_pair_positions()).collect();
        let a = random_assign(&rg, &paths, &pairs, gamma, &mut r).unwrap();
        if a.attempts <= 10 {
            quick += 1;
        }
    }
    assert!(quick as f64 >= 0.99 * runs as f64, "{quick}/{runs}");
}

#[test]
fn mean_load_matches_expectation() {
    let rg = cycle_rg(8);
    let (s, t) = (400, 50);
    let paths: Vec<OrientationPattern> = (0..s).map(|i| OrientationPattern::random_linear(t, &mut rng(i)).unwrap()).collect();
    let pairs = vec![vec![]; s as usize];
    let trials = 1000;
    let mut xs = Vec::with_capacity(trials);
    let mut r = rng(42);
    for _ in 0..trials {
        let phi: Vec<usize> = (0..s).map(|_| r.gen_range(0..8)).collect();
        let (_, stats) = assignment_stats(&rg, &paths, &pairs, &phi);
        xs.push(stats.a[0] as f64);
    }
    let mean = xs.iter().sum::<f64>() / trials as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let expect = (s as usize * t) as f64 / 8.0;
    assert!((mean - expect).abs() <= 3.0 * (var / trials as f64).sqrt(), "mean {mean} vs {expect}");
}

#[test]
fn azuma_fair_coins() {
    let s = 100;
    let r = azuma_tail_probe(2.0, s, 30.0, 100_000, 5, Some(0.0), |rng, s| {
        (0..s).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).sum()
    });
    assert!(r.passes, "{r:?}");
    assert!(azuma_bound(2.0, s, 0.0) >= 1.0);
    let flat = azuma_tail_probe(1.0, s, 0.5, 1000, 1, None, |_, _| 3.0);
    assert_eq!(flat.empirical, 0.0);
}

#[test]
fn far_walk_slots_are_clusters_or_placed_once() {
    let mut r = rng(5);
    let mut sc = far_scenario(7, &mut r).unwrap();
    let rstar = random_links(7, 3, &mut r);
    for v in 0..3 {
        incorporate_exceptional_far(&mut sc.state, &sc.rg, &rstar, v).unwrap();
    }
    let mut placed: Vec<usize> = sc
        .state
        .walk
        .slots
        .iter()
        .filter_map(|s| if let Slot::Exceptional(v) = s { Some(*v) } else { None })
        .collect();
    placed.sort_unstable();
    assert_eq!(placed, vec![0, 1, 2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balancing_is_idempotent(seed in any::<u64>(), m in 5usize..=9) {
        let mut r = rng(seed);
        let mut sc = far_scenario(m, &mut r).unwrap();
        balance_far(&mut sc.state, &sc.rg, 2 * m).unwrap();
        let settled = sc.state.clone();
        prop_assert!(balance_far(&mut sc.state, &sc.rg, 2 * m).unwrap().is_empty());
        prop_assert_eq!(sc.state, settled);
    }
}
