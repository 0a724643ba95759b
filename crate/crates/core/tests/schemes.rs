//! End-to-end checks: every registered scheme, built on small graphs, routes
//! every pair within its exact stretch bound through the simulator.

use routing_core::dist::all_pairs;
use routing_core::error::BuildError;
use routing_core::gen::{generate_graph, GraphSpec};
use routing_core::scheme::{by_name, registry, SchemeParams};
use routing_core::sim::deliver;
use routing_core::weight::{w_ratio, W};
use routing_core::Graph;

fn params(epsilon: Option<W>, k: Option<u32>, ell: Option<u32>, seed: u64) -> SchemeParams {
    SchemeParams { epsilon, k, ell, seed, ..Default::default() }
}

/// All-pairs delivery with exact bound assertions; returns branch counts.
fn check_all_pairs(g: &Graph, scheme: &str, p: &SchemeParams) -> std::collections::HashMap<&'static str, usize> {
    let inst = by_name(scheme).unwrap().preprocess(g, p).unwrap();
    let oracle = all_pairs(g);
    let mut branches = std::collections::HashMap::new();
    for u in 0..g.n() as u32 {
        for v in 0..g.n() as u32 {
            if u == v {
                continue;
            }
            let tr = deliver(g, &inst, u, v).unwrap_or_else(|e| {
                panic!("{scheme}: delivery {u}->{v} failed: {e}");
            });
            assert_eq!(*tr.hops.first().unwrap(), u);
            assert_eq!(*tr.hops.last().unwrap(), v);
            for pair in tr.hops.windows(2) {
                assert!(g.has_edge(pair[0], pair[1]), "{scheme}: non-edge hop");
            }
            let d = &oracle[u as usize][v as usize];
            let bound = inst.bound(d);
            assert!(
                tr.length <= bound,
                "{scheme}: pair ({u},{v}) routed {} > bound {} (d={})",
                tr.length,
                bound,
                d
            );
            assert!(tr.max_header_bits <= inst.header_bound_bits);
            *branches.entry(tr.branch).or_insert(0) += 1;
        }
    }
    branches
}

#[test]
fn registry_lists_all_schemes() {
    let names: Vec<&str> = registry().iter().map(|s| s.name()).collect();
    for expected in
        ["local", "warmup3", "scheme21", "scheme5", "genminus", "genplus", "tz", "tz4k7"]
    {
        assert!(names.contains(&expected), "{expected} missing from registry");
    }
    assert!(by_name("no-such-scheme").is_err());
}

#[test]
fn warmup3_weighted_all_pairs() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 80, m: 240, w_min: 1, w_max: 9 }, 11)
        .unwrap();
    let b = check_all_pairs(&g, "warmup3", &params(Some(w_ratio(1, 2)), None, None, 3));
    assert!(b.contains_key("t1"), "distant pairs should use sequences: {b:?}");
}

#[test]
fn warmup3_complete_graph() {
    let n = 24;
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            edges.push((u, v, routing_core::weight::w_one()));
        }
    }
    let g = Graph::from_edges(n, &edges).unwrap();
    check_all_pairs(&g, "warmup3", &params(Some(w_ratio(1, 2)), None, None, 5));
}

#[test]
fn scheme21_unweighted_all_pairs() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 80, m: 240 }, 7).unwrap();
    let b = check_all_pairs(&g, "scheme21", &params(Some(w_ratio(1, 4)), None, None, 9));
    assert!(b.contains_key("intersection"), "branches taken: {b:?}");
}

#[test]
fn scheme21_intersection_branch_is_exact() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 70, m: 180 }, 19).unwrap();
    let inst = by_name("scheme21")
        .unwrap()
        .preprocess(&g, &params(Some(w_ratio(1, 4)), None, None, 2))
        .unwrap();
    let oracle = all_pairs(&g);
    let mut seen = 0;
    for u in 0..g.n() as u32 {
        for v in 0..g.n() as u32 {
            if u == v {
                continue;
            }
            let tr = deliver(&g, &inst, u, v).unwrap();
            if tr.branch == "intersection" {
                assert_eq!(tr.length, oracle[u as usize][v as usize], "pair ({u},{v})");
                seen += 1;
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn scheme21_rejects_weighted() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 20, m: 60, w_min: 1, w_max: 3 }, 1)
        .unwrap();
    match by_name("scheme21").unwrap().preprocess(&g, &params(Some(w_ratio(1, 2)), None, None, 0))
    {
        Err(BuildError::RequiresUnweighted) => {}
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("weighted input accepted"),
    }
}

#[test]
fn scheme5_weighted_all_pairs() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 80, m: 240, w_min: 1, w_max: 10 }, 13)
        .unwrap();
    let b = check_all_pairs(&g, "scheme5", &params(Some(w_ratio(1, 2)), None, None, 7));
    assert!(b.contains_key("t2"), "branches taken: {b:?}");
}

#[test]
fn scheme5_own_cluster_branch_is_exact() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 60, m: 150, w_min: 1, w_max: 6 }, 3)
        .unwrap();
    let inst = by_name("scheme5")
        .unwrap()
        .preprocess(&g, &params(Some(w_ratio(1, 2)), None, None, 1))
        .unwrap();
    let oracle = all_pairs(&g);
    for u in 0..g.n() as u32 {
        for v in 0..g.n() as u32 {
            if u == v {
                continue;
            }
            let tr = deliver(&g, &inst, u, v).unwrap();
            if tr.branch == "own-cluster" || tr.branch == "local" {
                assert_eq!(tr.length, oracle[u as usize][v as usize]);
            }
        }
    }
}

#[test]
fn genminus_all_pairs() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 81, m: 240 }, 17).unwrap();
    check_all_pairs(&g, "genminus", &params(Some(w_ratio(1, 4)), None, Some(2), 3));
}

#[test]
fn genplus_all_pairs() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 81, m: 240 }, 29).unwrap();
    check_all_pairs(&g, "genplus", &params(Some(w_ratio(1, 4)), None, Some(2), 3));
}

#[test]
fn gen_requires_ell_at_least_two() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 30, m: 80 }, 1).unwrap();
    assert!(by_name("genminus")
        .unwrap()
        .preprocess(&g, &params(Some(w_ratio(1, 2)), None, Some(1), 0))
        .is_err());
}

#[test]
fn tz_k2_stretch_three() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 70, m: 200, w_min: 1, w_max: 8 }, 23)
        .unwrap();
    check_all_pairs(&g, "tz", &params(None, Some(2), None, 5));
}

#[test]
fn tz_k3_all_pairs() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 80, m: 220, w_min: 1, w_max: 8 }, 31)
        .unwrap();
    let b = check_all_pairs(&g, "tz", &params(None, Some(3), None, 5));
    assert!(b.contains_key("pivot-tree"));
}

#[test]
fn tz_own_cluster_branch_is_exact() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 60, m: 150, w_min: 1, w_max: 5 }, 7)
        .unwrap();
    let inst =
        by_name("tz").unwrap().preprocess(&g, &params(None, Some(2), None, 3)).unwrap();
    let oracle = all_pairs(&g);
    let mut seen = 0;
    for u in 0..g.n() as u32 {
        for v in 0..g.n() as u32 {
            if u == v {
                continue;
            }
            let tr = deliver(&g, &inst, u, v).unwrap();
            if tr.branch == "own-cluster" {
                assert_eq!(tr.length, oracle[u as usize][v as usize]);
                seen += 1;
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn tz4k7_k3_all_pairs() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 80, m: 220, w_min: 1, w_max: 8 }, 37)
        .unwrap();
    check_all_pairs(&g, "tz4k7", &params(Some(w_ratio(1, 2)), Some(3), None, 5));
}

#[test]
fn tz4k7_rejects_k2() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 30, m: 80 }, 1).unwrap();
    assert!(by_name("tz4k7")
        .unwrap()
        .preprocess(&g, &params(Some(w_ratio(1, 2)), Some(2), None, 0))
        .is_err());
}

#[test]
fn local_scheme_exact_or_rejects() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 50, m: 130 }, 3).unwrap();
    let mut p = params(None, None, None, 0);
    p.ell = Some(12);
    let inst = by_name("local").unwrap().preprocess(&g, &p).unwrap();
    let oracle = all_pairs(&g);
    for u in 0..g.n() as u32 {
        for v in 0..g.n() as u32 {
            if u == v {
                continue;
            }
            match deliver(&g, &inst, u, v) {
                Ok(tr) => assert_eq!(tr.length, oracle[u as usize][v as usize]),
                Err(e) => assert!(matches!(
                    e,
                    routing_core::error::RouteError::NotInVicinity { .. }
                )),
            }
        }
    }
}

#[test]
fn self_delivery_has_no_hops() {
    let g = generate_graph(&GraphSpec::GnmRandom { n: 40, m: 100 }, 3).unwrap();
    let inst = by_name("warmup3")
        .unwrap()
        .preprocess(&g, &params(Some(w_ratio(1, 2)), None, None, 0))
        .unwrap();
    let tr = deliver(&g, &inst, 5, 5).unwrap();
    assert_eq!(tr.hops, vec![5]);
    assert_eq!(tr.length, routing_core::weight::w_zero());
}

/// Deliveries are a pure function of their inputs.
#[test]
fn deliver_is_deterministic() {
    let g = generate_graph(&GraphSpec::RandomWeighted { n: 60, m: 160, w_min: 1, w_max: 7 }, 41)
        .unwrap();
    let p = params(Some(w_ratio(1, 2)), None, None, 9);
    let a = by_name("scheme5").unwrap().preprocess(&g, &p).unwrap();
    let b = by_name("scheme5").unwrap().preprocess(&g, &p).unwrap();
    for u in [0u32, 17, 43] {
        for v in 0..g.n() as u32 {
            if u == v {
                continue;
            }
            let ta = deliver(&g, &a, u, v).unwrap();
            let tb = deliver(&g, &b, u, v).unwrap();
            assert_eq!(ta.hops, tb.hops);
            assert_eq!(ta.branch, tb.branch);
        }
    }
}
