use std::collections::BTreeSet;

use proptest::prelude::*;

use symcut::approx2::{approx2_solve, solve_single_center_with, ApproxOutcome};
use symcut::cuts::{enumerate_important, is_important, push_to_important, Cut};
use symcut::exact_kl::{solve_exact_kl, validate_solution};
use symcut::harness::encode::{encode_dfvs, encode_subset_fvs, encode_undirected, pin_vertex};
use symcut::harness::{gen_planted, gen_random, parse_instance, write_instance, Instance, Kind};
use symcut::multiway::{
    contract_shadow, solve_arc_terminal_compression, solve_multiway_with, ArcTerminalInstance, MultiwayOptions,
    ShadowMode,
};
use symcut::oracle::{
    arc_terminal_valid, brute_force_arc_terminal, brute_force_dfvs, brute_force_multiway, brute_force_opt,
    brute_force_skew, brute_force_subset_fvs, brute_force_undirected_multicut, closed_walk_conflict,
    enumerate_arc_terminal_solutions, enumerate_solutions_avoiding, multicut_valid, multiway_oracle_valid,
    subset_fvs_valid, subsets_by_size, UndirectedGraph,
};
use symcut::skew::{solve_skew, SkewInstance};
use symcut::{Digraph, MulticutInstance, SearchCtx, Vertex, VertexSet};

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>().prop_map(|b| b as u8), n * n).prop_map(move |bits| {
            let arcs: Vec<(u32, u32)> = (0..n * n)
                .filter(|&i| bits[i] == 1 && (i / n != i % n || i % 7 == 0))
                .map(|i| ((i / n) as u32, (i % n) as u32))
                .collect();
            Digraph::from_arcs(n as u32, &arcs)
        })
    })
}

/// Sparser random graphs, driven by a seed.
fn sparse(max_n: usize) -> impl Strategy<Value = Digraph> {
    (2..=max_n, 0.1f64..0.45, any::<u64>()).prop_map(|(n, p, seed)| gen_random(Kind::Multicut, n, p, 0, 0, seed).graph().clone())
}

fn pick(g: &Digraph, idx: &[usize]) -> VertexSet {
    let vs: Vec<Vertex> = g.vertices().collect();
    idx.iter().map(|&i| vs[i % vs.len()]).collect()
}

/// Two distinct singletons.
fn ends(g: &Digraph, a: usize, b: usize) -> (VertexSet, VertexSet) {
    let n = g.vertex_count();
    let a = a % n;
    let b = (a + 1 + b % (n - 1)) % n;
    (pick(g, &[a]), pick(g, &[b]))
}

fn multicut(inst: Instance) -> MulticutInstance {
    match inst {
        Instance::Multicut(m) => m,
        _ => unreachable!("generated a multicut instance"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scc_blocks_partition_and_are_ordered(g in digraph(9)) {
        let blocks = g.scc_decompose();
        let mut seen = VertexSet::new();
        for b in &blocks {
            for v in b {
                prop_assert!(seen.insert(*v));
            }
            let first = *b.iter().next().unwrap();
            let reach = g.induced(b).reachable_from(&[first].into());
            let back = g.induced(b).reaching(&[first].into());
            prop_assert_eq!(&reach, b);
            prop_assert_eq!(&back, b);
        }
        prop_assert_eq!(seen, g.vertex_set());
        for (i, a) in blocks.iter().enumerate() {
            for later in &blocks[i + 1..] {
                for &u in later {
                    for &v in a {
                        prop_assert!(!g.has_arc(u, v));
                    }
                }
            }
        }
    }

    #[test]
    fn reachability_is_the_least_closed_set(g in sparse(50), idx in prop::collection::vec(0usize..50, 0..3)) {
        let s = pick(&g, &idx);
        let mut closure = s.clone();
        loop {
            let step: VertexSet = closure.iter().flat_map(|&v| g.out_neighbors(v)).collect();
            let before = closure.len();
            closure.extend(step);
            if closure.len() == before {
                break;
            }
        }
        prop_assert_eq!(g.reachable_from(&s), closure);
    }

    #[test]
    fn reverse_is_an_involution(g in digraph(8)) {
        prop_assert_eq!(g.reverse().reverse(), g.clone());
        for (u, v) in g.arcs() {
            prop_assert!(g.reverse().has_arc(v, u));
        }
    }

    #[test]
    fn contraction_map_round_trips(g in digraph(8), labels in prop::collection::vec(0u8..4, 8), del in prop::collection::vec(0usize..8, 0..3)) {
        let x = pick(&g, &del);
        let rest = g.remove(&x);
        let mut blocks = vec![VertexSet::new(); 3];
        for v in rest.vertices() {
            let l = labels[v.0 as usize % labels.len()];
            if l < 3 {
                blocks[l as usize].insert(v);
            }
        }
        let (contracted, map) = rest.contract(&blocks).unwrap();
        let full = ContractionFixture { deleting: symcut::ContractionMap::deleting(&g, &x), contracting: map };
        let composed = full.deleting.compose(&full.contracting);
        prop_assert_eq!(composed.deleted(), x.clone());
        let survivors = rest.vertex_set();
        prop_assert!(composed.lift(&composed.project(&survivors)).is_superset(&survivors));
        prop_assert_eq!(composed.project(&composed.lift(&contracted.vertex_set())), contracted.vertex_set());
        for (u, v) in rest.arcs() {
            prop_assert!(contracted.has_arc(composed.image_of(u).unwrap(), composed.image_of(v).unwrap()));
        }
    }

    #[test]
    fn enumerated_cuts_are_important(g in sparse(10), a in 0usize..10, b in 0usize..10, k in 0usize..4) {
        let (x, y) = ends(&g, a, b);
        let cuts = enumerate_important(&g, &x, &y, k).unwrap();
        prop_assert!(cuts.len() as u64 <= 4u64.pow(k as u32));
        for cut in &cuts {
            prop_assert!(cut.size() <= k);
            prop_assert!(is_important(&g, &x, &y, &cut.vertices).unwrap());
        }
    }

    #[test]
    fn pushing_keeps_size_and_grows_reach(g in sparse(10), a in 0usize..10, b in 0usize..10, k in 0usize..3, choice in any::<prop::sample::Index>()) {
        let (x, y) = ends(&g, a, b);
        let free: Vec<Vertex> = g.vertices().filter(|v| !x.contains(v) && !y.contains(v)).collect();
        let cuts: Vec<Cut> = subsets_by_size(&free, k)
            .into_iter()
            .filter_map(|s| Cut::new(&g, &x, &y, &s).ok())
            .collect();
        if cuts.is_empty() {
            return Ok(());
        }
        let cut = choice.get(&cuts);
        let pushed = push_to_important(&g, cut).unwrap();
        prop_assert!(pushed.size() <= cut.size());
        prop_assert!(pushed.reach.is_superset(&cut.reach));
        prop_assert!(is_important(&g, &x, &y, &pushed.vertices).unwrap());
    }

    #[test]
    fn skew_is_exact(g in sparse(9), ends in prop::collection::vec((0usize..9, 0usize..9), 1..4), k in 0usize..4) {
        let vs: Vec<Vertex> = g.vertices().collect();
        let pairs: Vec<(Vertex, Vertex)> = ends.iter().map(|&(s, t)| (vs[s % vs.len()], vs[t % vs.len()])).collect();
        let inst = SkewInstance::new(g.clone(), pairs.clone(), k).unwrap();
        let found = solve_skew(&inst);
        let oracle = brute_force_skew(&g, &pairs, k);
        prop_assert_eq!(found.is_some(), oracle.feasible);
        if let Some(x) = found {
            prop_assert!(inst.is_solution(&x));
        }
    }

    #[test]
    fn exact_kl_is_sound_and_complete(n in 3usize..9, p in 0.15f64..0.5, l in 1usize..4, k in 0usize..4, seed in any::<u64>()) {
        let inst = multicut(gen_random(Kind::Multicut, n, p, l, k, seed));
        let found = solve_exact_kl(&inst);
        prop_assert_eq!(found.is_some(), brute_force_opt(&inst).feasible);
        if let Some(x) = found {
            prop_assert!(validate_solution(&inst, &x));
        }
    }

    #[test]
    fn subset_fvs_answers_hit_marked_cycles(g in sparse(8), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4), k in 0usize..4) {
        let arcs: Vec<(Vertex, Vertex)> = g.arcs().filter(|(u, v)| u != v).collect();
        prop_assume!(!arcs.is_empty());
        let marked: Vec<(Vertex, Vertex)> = picks.iter().map(|i| *i.get(&arcs)).collect();
        let inst = encode_subset_fvs(&g, &marked, k).unwrap();
        let found = solve_exact_kl(&inst);
        prop_assert_eq!(found.is_some(), brute_force_subset_fvs(&g, &marked, k).feasible);
        if let Some(x) = found {
            prop_assert!(subset_fvs_valid(&g, &marked, &x));
        }
    }

    #[test]
    fn approx_is_sound(n in 3usize..9, l in 1usize..4, k in 0usize..4, seed in any::<u64>(), planted in any::<bool>()) {
        let inst = if planted {
            multicut(gen_planted(Kind::Multicut, n, k, l, seed).0)
        } else {
            multicut(gen_random(Kind::Multicut, n, 0.35, l, k, seed))
        };
        let opt = brute_force_opt(&inst).optimum;
        match approx2_solve(&inst) {
            ApproxOutcome::Solution(x) => {
                prop_assert!(validate_solution(&inst.with_k(2 * k), &x));
                if let Some(opt) = opt {
                    prop_assert!(x.len() <= 2 * opt);
                }
            }
            ApproxOutcome::NoSolutionAtMostK => prop_assert!(opt.is_none()),
        }
    }

    #[test]
    fn single_center_is_exact_and_narrow(n in 3usize..8, p in 0.1f64..0.4, ends in prop::collection::vec((1usize..8, 1usize..8), 1..4), k in 0usize..4, seed in any::<u64>()) {
        let base = gen_random(Kind::Multicut, n, p, 0, 0, seed).graph().clone();
        let y = Vertex(0);
        // a Hamiltonian cycle keeps the graph strongly connected
        let cycle = (0..n as u32).map(|i| (Vertex(i), Vertex((i + 1) % n as u32)));
        let g = base.with_arcs(cycle).unwrap();
        let without_y = g.remove(&[y].into());
        let requests: Vec<(Vertex, Vertex)> = ends
            .iter()
            .map(|&(s, t)| (Vertex((s % (n - 1) + 1) as u32), Vertex((t % (n - 1) + 1) as u32)))
            .filter(|&(s, t)| s != t && multicut_valid(&without_y, &[(s, t)], &VertexSet::new()))
            .collect();
        let ctx = SearchCtx::new(0);
        let found = solve_single_center_with(&g, y, &requests, k, &ctx).unwrap();
        let free: Vec<Vertex> = g.vertices().filter(|&v| v != y).collect();
        let feasible = subsets_by_size(&free, k).iter().any(|x| multicut_valid(&g, &requests, x));
        prop_assert_eq!(found.is_some(), feasible);
        if let Some(x) = found {
            prop_assert!(!x.contains(&y) && x.len() <= k && multicut_valid(&g, &requests, &x));
        }
        prop_assert_eq!(ctx.stats().single_center_bound_violations, 0);
    }

    #[test]
    fn multiway_is_sound_in_both_modes(n in 3usize..9, t in 2usize..5, k in 0usize..4, seed in any::<u64>(), random in any::<bool>()) {
        let Instance::Multiway(m) = gen_random(Kind::Multiway, n, 0.35, t, k, seed) else { unreachable!() };
        let mode = if random { ShadowMode::Random } else { ShadowMode::Exhaustive };
        let ctx = SearchCtx::new(seed);
        let found = solve_multiway_with(&m.graph, &m.terminals, k, MultiwayOptions { shadow_mode: mode, rounds: 8 }, &ctx)
            .unwrap()
            .unwrap();
        let oracle = brute_force_multiway(&m.graph, &m.terminals, k);
        if let Some(x) = &found {
            prop_assert!(x.len() <= k && multiway_oracle_valid(&m.graph, &m.terminals, x));
        } else if mode == ShadowMode::Exhaustive {
            prop_assert!(!oracle.feasible);
        }
        prop_assert!(ctx.stats().max_depth <= k as u64);
    }

    #[test]
    fn torso_keeps_bicliques(n in 3usize..8, sets in 1usize..4, seed in any::<u64>(), zbits in prop::collection::vec(any::<bool>(), 8)) {
        let Instance::ArcTerminal(inst) = gen_random(Kind::ArcTerminal, n, 0.4, sets, 1, seed) else { unreachable!() };
        let z: VertexSet = inst.graph().vertices().filter(|v| zbits[v.0 as usize]).collect();
        if let Ok(torso) = contract_shadow(&inst, &z) {
            prop_assert!(ArcTerminalInstance::new(torso.graph().clone(), torso.sets().to_vec(), 1).is_ok());
            for s in enumerate_arc_terminal_solutions(&torso, 1) {
                prop_assert!(arc_terminal_valid(&inst, &s));
            }
        }
    }

    #[test]
    fn duplicated_arc_sets_are_cut(n in 3usize..8, seed in any::<u64>(), k in 0usize..3) {
        let Instance::ArcTerminal(inst) = gen_random(Kind::ArcTerminal, n, 0.4, 2, k, seed) else { unreachable!() };
        let mut sets = inst.sets().to_vec();
        sets.push(sets[0].clone());
        let dup = ArcTerminalInstance::new(inst.graph().clone(), sets, k).unwrap();
        let found = symcut::multiway::solve_arc_terminal_with(&dup, MultiwayOptions::default(), &SearchCtx::new(0)).unwrap();
        prop_assert_eq!(found.is_some(), brute_force_arc_terminal(&dup).feasible);
        if let Some(x) = found {
            let rest = inst.graph().remove(&x);
            let comps = rest.scc_decompose();
            for &u in &dup.sets()[0].tails {
                for &v in &dup.sets()[0].heads {
                    let together = comps.iter().any(|c| c.contains(&u) && c.contains(&v));
                    prop_assert!(!together || !rest.has_arc(u, v));
                }
            }
        }
    }

    #[test]
    fn compression_agrees_with_oracle(n in 3usize..8, sets in 2usize..4, seed in any::<u64>(), k in 0usize..3, order in any::<u64>()) {
        let Instance::ArcTerminal(base) = gen_random(Kind::ArcTerminal, n, 0.4, sets, k, seed) else { unreachable!() };
        let sols = enumerate_arc_terminal_solutions(&base.with_k(3), 3);
        let nonempty: Vec<&VertexSet> = sols.iter().filter(|x| !x.is_empty()).collect();
        prop_assume!(!nonempty.is_empty());
        let mut y: Vec<Vertex> = nonempty[(order % nonempty.len() as u64) as usize].iter().copied().collect();
        let shift = (order % y.len() as u64) as usize;
        y.rotate_left(shift);
        let arcs: Vec<(Vertex, Vertex)> = y.iter().enumerate().flat_map(|(i, &a)| y[i + 1..].iter().map(move |&b| (a, b))).collect();
        let plain = ArcTerminalInstance::new(base.graph().with_arcs(arcs).unwrap(), base.sets().to_vec(), k);
        prop_assume!(plain.is_ok());
        let inst = plain.unwrap().with_compression(y);
        prop_assume!(inst.is_ok());
        let inst = inst.unwrap();
        let found = solve_arc_terminal_compression(&inst, MultiwayOptions::default(), &SearchCtx::new(0)).unwrap();
        prop_assert_eq!(found.is_some(), brute_force_arc_terminal(&inst).feasible);
        if let Some(x) = found {
            prop_assert!(inst.is_solution(&x));
        }
    }

    #[test]
    fn closed_walks_match_components(n in 1usize..7, sets in 1usize..4, seed in any::<u64>(), xbits in prop::collection::vec(any::<bool>(), 6)) {
        let Instance::ArcTerminal(inst) = gen_random(Kind::ArcTerminal, n, 0.4, sets, 0, seed) else { unreachable!() };
        let x: VertexSet = inst.graph().vertices().filter(|v| xbits[v.0 as usize]).collect();
        prop_assert_eq!(arc_terminal_valid(&inst, &x), !closed_walk_conflict(&inst, &x));
    }

    #[test]
    fn multiway_oracles_agree(n in 2usize..8, t in 1usize..5, k in 0usize..3, seed in any::<u64>()) {
        let Instance::Multiway(m) = gen_random(Kind::Multiway, n, 0.4, t, k, seed) else { unreachable!() };
        let encoded = symcut::multiway::encode_multiway(&m.graph, &m.terminals, k).unwrap();
        prop_assert_eq!(brute_force_multiway(&m.graph, &m.terminals, k).optimum, brute_force_arc_terminal(&encoded).optimum);
    }

    #[test]
    fn files_round_trip(kind in prop::sample::select(vec![Kind::Multicut, Kind::Multiway, Kind::ArcTerminal]), n in 1usize..9, count in 0usize..4, k in 0usize..4, seed in any::<u64>()) {
        let inst = gen_random(kind, n, 0.3, count.min(n), k, seed);
        let text = write_instance(&inst);
        let parsed = parse_instance(&text).unwrap();
        prop_assert_eq!(&parsed, &inst);
        prop_assert_eq!(write_instance(&parsed), text);
        prop_assert_eq!(gen_random(kind, n, 0.3, count.min(n), k, seed), inst);
    }

    #[test]
    fn encoders_preserve_optima(n in 2u32..8, bits in prop::collection::vec(any::<bool>(), 64), ends in prop::collection::vec((0u32..8, 0u32..8), 1..4), k in 0usize..3) {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if bits[(u * 8 + v) as usize] {
                    edges.push((Vertex(u), Vertex(v)));
                }
            }
        }
        let ug = UndirectedGraph { vertices: (0..n).map(Vertex).collect(), edges };
        let requests: Vec<(Vertex, Vertex)> = ends
            .iter()
            .map(|&(s, t)| (Vertex(s % n), Vertex(t % n)))
            .filter(|(s, t)| s != t)
            .collect();
        let undirected = encode_undirected(&ug, &requests, k).unwrap();
        prop_assert_eq!(brute_force_opt(&undirected).optimum, brute_force_undirected_multicut(&ug, &requests, k).optimum);

        let arcs: Vec<(u32, u32)> = (0..n * n).filter(|&i| bits[i as usize % 64] && i / n != i % n).map(|i| (i / n, i % n)).collect();
        let g = Digraph::from_arcs(n, &arcs);
        let dfvs = encode_dfvs(&g, k).unwrap();
        prop_assert_eq!(brute_force_opt(&dfvs).optimum, brute_force_dfvs(&g, k).optimum);

        if let Some(&(s, _)) = requests.first() {
            let direct = MulticutInstance::new(g.clone(), requests.clone(), k).unwrap();
            let (pinned, twins) = pin_vertex(&direct, s).unwrap();
            prop_assert_eq!(twins.len(), k);
            let avoiding = enumerate_solutions_avoiding(&direct, k, &[s].into());
            prop_assert_eq!(brute_force_opt(&pinned).optimum, avoiding.first().map(|x| x.len()));
        }
    }
}

struct ContractionFixture {
    deleting: symcut::ContractionMap,
    contracting: symcut::ContractionMap,
}

#[test]
fn single_center_counterexample_needs_endpoint_deletion() {
    // y <-> s, y <-> t, request (s, t): the only size-1 answers are s and t
    let g = Digraph::from_arcs(3, &[(0, 1), (1, 0), (0, 2), (2, 0)]);
    let requests = [(Vertex(1), Vertex(2))];
    let ctx = SearchCtx::new(0);
    let x = solve_single_center_with(&g, Vertex(0), &requests, 1, &ctx).unwrap().unwrap();
    assert_eq!(x.len(), 1);
    assert!(multicut_valid(&g, &requests, &x));
    let all: BTreeSet<VertexSet> = subsets_by_size(&[Vertex(1), Vertex(2)], 1)
        .into_iter()
        .filter(|x| multicut_valid(&g, &requests, x))
        .collect();
    assert!(all.contains(&x));
}
