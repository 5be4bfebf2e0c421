//! Randomized checks shared by the property tests and the acceptance runner.
//! Each check returns `Err` with a description of the first counterexample.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use facetforge_core::evaluation::{score_task, Attribute, EvaluationMatrix};
use facetforge_core::jointmeaning::{resolve_joint_interface, FoafProfile, User};
use facetforge_core::matcher::{
    apply_rules, dissimilarity, form_superconcepts, tag_dissimilarity, vectorize, Concept, DissimilarityWeights,
    Ontology, Superconcept,
};
use facetforge_core::navigation::{plan_won, NavGraph, View};
use facetforge_core::store::{Binding, Term, TriplePattern};
use facetforge_core::taxonomy::{
    compose_interface, create_tag, normalize_label, FacetedInterface, FacetedTaxonomy, Portlet, PortletKind,
};
use facetforge_core::{ConceptId, NodeId, Triple, TripleStore};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PROPERTY_CASES: u32 = 1000;

pub fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    let mut runner = TestRunner::new_with_rng(config, rng);
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

// ---- faceted views ----

const FACET_NAMES: [&str; 3] = ["color", "type", "topic"];
const FACET_VALUES: [&str; 3] = ["a", "b", "c"];

fn facet() -> impl Strategy<Value = (String, String)> {
    (0..FACET_NAMES.len(), 0..FACET_VALUES.len()).prop_map(|(n, v)| (FACET_NAMES[n].into(), FACET_VALUES[v].into()))
}

fn portlets(max: usize) -> impl Strategy<Value = Vec<Portlet>> {
    prop::collection::vec(prop::collection::btree_set(facet(), 0..5), 1..max).prop_map(|sets| {
        sets.into_iter()
            .enumerate()
            .map(|(i, facets)| {
                facets.iter().fold(Portlet::new(format!("p{i}"), PortletKind::Picture, "x", "u"), |p, (n, v)| {
                    p.with_facet(n, v)
                })
            })
            .collect()
    })
}

fn owned(members: BTreeSet<&facetforge_core::PortletId>) -> BTreeSet<String> {
    members.into_iter().map(|p| p.to_string()).collect()
}

pub fn filter_monotone_and_order_free(cases: u32) -> Result<(), String> {
    let strategy = (portlets(12), prop::collection::vec(facet(), 0..5))
        .prop_flat_map(|(ps, ops)| (Just(ps), Just(ops.clone()), Just(ops).prop_shuffle()));
    run(cases, strategy, |(ps, ops, shuffled)| {
        let mut view = View::new(&ps);
        for (n, v) in &ops {
            let next = view.filter(n, v);
            prop_assert!(owned(next.members()).is_subset(&owned(view.members())));
            // Oracle: a portlet survives iff it carries every applied facet.
            view = next;
        }
        let expected: BTreeSet<String> = ps
            .iter()
            .filter(|p| ops.iter().all(|(n, v)| p.has_facet(n, v)))
            .map(|p| p.id.to_string())
            .collect();
        prop_assert_eq!(owned(view.members()), expected);
        let other = shuffled.iter().fold(View::new(&ps), |v, (n, val)| v.filter(n, val));
        prop_assert_eq!(&other, &view);
        Ok(())
    })
}

pub fn zoom_unzoom_inverse(cases: u32) -> Result<(), String> {
    let strategy = (portlets(12), prop::collection::vec(facet(), 0..3), prop::collection::vec(0..3usize, 0..3), 0..3usize);
    run(cases, strategy, |(ps, filters, zooms, extra)| {
        let mut view = filters.iter().fold(View::new(&ps), |v, (n, val)| v.filter(n, val));
        for z in zooms {
            if let Ok(next) = view.zoom(FACET_NAMES[z]) {
                view = next;
            }
        }
        let name = FACET_NAMES[extra];
        match view.zoom(name) {
            Ok(zoomed) => {
                prop_assert_eq!(zoomed.members(), view.members());
                let grouped: BTreeSet<String> =
                    zoomed.groups().into_values().flatten().map(|p| p.to_string()).collect();
                let with_facet: BTreeSet<String> = ps
                    .iter()
                    .filter(|p| view.members().contains(&p.id) && p.facets.iter().any(|f| f.name == name))
                    .map(|p| p.id.to_string())
                    .collect();
                prop_assert_eq!(grouped, with_facet);
                prop_assert_eq!(zoomed.unzoom().unwrap(), view);
            }
            Err(_) => prop_assert!(view.zoom_stack().iter().any(|z| z == name)),
        }
        Ok(())
    })
}

pub fn compose_commutative(cases: u32) -> Result<(), String> {
    let strategy = portlets(6).prop_flat_map(|ps| (Just(ps.clone()), Just(ps).prop_shuffle()));
    run(cases, strategy, |(ps, shuffled)| {
        let a = compose_interface(&ps).unwrap();
        let b = compose_interface(&shuffled).unwrap();
        prop_assert_eq!(&a.facet_selections, &b.facet_selections);
        let union: BTreeSet<_> = ps.iter().flat_map(|p| p.facets.iter().cloned()).collect();
        prop_assert_eq!(&a.facet_selections, &union);
        let order: Vec<_> = shuffled.iter().map(|p| p.id.clone()).collect();
        prop_assert_eq!(b.layout_slots, order);
        // Set-level associativity: composing a prefix first changes nothing.
        if ps.len() >= 2 {
            let head = compose_interface(&ps[..1]).unwrap();
            let tail = compose_interface(&ps[1..]).unwrap();
            let joined: BTreeSet<_> = head.facet_selections.union(&tail.facet_selections).cloned().collect();
            prop_assert_eq!(joined, a.facet_selections);
        }
        Ok(())
    })
}

pub fn normalization_idempotent(cases: u32) -> Result<(), String> {
    let strategy = prop_oneof![
        any::<String>(),
        "[ \tA-Za-zÀ-ÿ\u{0300}-\u{036f}ΣσςİıẞßǅǄ]{0,12}",
    ];
    run(cases, strategy, |raw| {
        let once = normalize_label(&raw);
        prop_assert_eq!(normalize_label(&once), once.clone());
        prop_assert_eq!(once.trim(), once.as_str());
        match create_tag(&raw, "u") {
            Ok(tag) => prop_assert_eq!(tag.label(), once.as_str()),
            Err(_) => prop_assert!(once.is_empty()),
        }
        Ok(())
    })
}

pub fn attach_is_a_set(cases: u32) -> Result<(), String> {
    let pair = (0..4usize, 0..4usize);
    let strategy = prop::collection::vec(pair, 0..12).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()));
    run(cases, strategy, |(pairs, shuffled)| {
        let build = |ps: &[(usize, usize)]| {
            let mut t = FacetedTaxonomy::new();
            for (tag, iface) in ps {
                t.attach(create_tag(&format!("t{tag}"), "u").unwrap(), FacetedInterface::new(format!("i{iface}")));
                // Re-attaching is a no-op.
                let again =
                    t.attach(create_tag(&format!("t{tag}"), "u").unwrap(), FacetedInterface::new(format!("i{iface}")));
                assert!(!again);
            }
            t
        };
        let a = build(&pairs);
        prop_assert_eq!(&a, &build(&shuffled));
        prop_assert_eq!(a.len(), pairs.iter().collect::<BTreeSet<_>>().len());
        Ok(())
    })
}

// ---- evaluation ----

pub fn weighted_score_convex(cases: u32) -> Result<(), String> {
    let strategy = prop::collection::vec((0.0..=10.0f64, 0.0..1.0f64), 1..10).prop_flat_map(|rows| {
        let shuffled = Just(rows.clone()).prop_shuffle();
        (Just(rows), shuffled)
    });
    run(cases, strategy, |(rows, shuffled)| {
        let matrix = |rows: &[(f64, f64)]| {
            let total: f64 = rows.iter().map(|(_, w)| w).sum();
            let n = rows.len() as f64;
            let attrs = rows
                .iter()
                .enumerate()
                .map(|(i, (s, w))| {
                    let w = if total > 0.0 { w / total } else { 1.0 / n };
                    Attribute::new(format!("a{s}{i}"), *s, w)
                })
                .collect();
            EvaluationMatrix::new("t", attrs)
        };
        // Normalized weights may miss 1 by a rounding step; skip those rare inputs.
        let Ok(m) = matrix(&rows) else { return Ok(()) };
        let s = score_task(&m).unwrap();
        let lo = rows.iter().map(|(s, _)| *s).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|(s, _)| *s).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.weighted >= lo - 1e-9 && s.weighted <= hi + 1e-9, "{} not in [{lo}, {hi}]", s.weighted);
        prop_assert!(s.average >= lo - 1e-9 && s.average <= hi + 1e-9);
        let per: f64 = s.per_attribute.iter().map(|(_, x)| x).sum();
        prop_assert!((per - s.weighted).abs() < 1e-9);
        if let Ok(p) = matrix(&shuffled) {
            let sp = score_task(&p).unwrap();
            prop_assert!((sp.weighted - s.weighted).abs() < 1e-9);
            prop_assert!((sp.average - s.average).abs() < 1e-9);
        }
        Ok(())
    })
}

// ---- joint meaning ----

#[derive(Debug, Clone)]
pub struct JointCase {
    pub audience: Vec<User>,
    pub speaker: User,
    pub portlet: Portlet,
    pub classes: Vec<Superconcept>,
    pub ontology: Ontology,
}

const INTERESTS: [&str; 5] = ["cars", "sports", "luxury", "sea", "speed"];

fn joint_case() -> impl Strategy<Value = JointCase> {
    let class = prop::collection::vec(prop::collection::btree_set(0..INTERESTS.len(), 0..3), 1..4);
    let classes = prop::collection::vec(class, 1..3);
    let users = prop::collection::vec(
        (prop::collection::btree_set(0..INTERESTS.len(), 0..3), prop::collection::btree_set(0..7usize, 0..4)),
        1..7,
    );
    (classes, users, any::<bool>()).prop_map(|(classes, users, speaker_tag_is_member)| {
        let mut ontology = Ontology::new(0);
        let mut supers = Vec::new();
        let mut portlet = Portlet::new("p", PortletKind::Picture, "x", "u0");
        for (k, members) in classes.iter().enumerate() {
            let mut ids = BTreeSet::new();
            for (j, ctx) in members.iter().enumerate() {
                let id = format!("c{k}_{j}");
                let concept = Concept::new(id.as_str(), &format!("label {k}{j}"))
                    .with_tags(ctx.iter().map(|&i| INTERESTS[i]));
                ontology.add_concept(concept).unwrap();
                ids.insert(ConceptId::new(id));
            }
            let tag_label = if speaker_tag_is_member { format!("label {k}0") } else { format!("labl {k}") };
            let tag = create_tag(&tag_label, "u0").unwrap();
            portlet = portlet.with_tag(tag.clone());
            supers.push(Superconcept { members: ids, matched_tags: BTreeSet::from([tag]) });
        }
        let n = users.len();
        let mut all: Vec<User> = users
            .into_iter()
            .enumerate()
            .map(|(i, (interests, friends))| {
                let profile = friends
                    .into_iter()
                    .filter(|&f| f <= n && f != i)
                    .fold(FoafProfile::new(interests.iter().map(|&x| INTERESTS[x])), |p, f| {
                        p.with_friend(format!("u{f}"))
                    });
                User::new(format!("u{i}"), profile)
            })
            .collect();
        let speaker = all.remove(0);
        JointCase { audience: all, speaker, portlet, classes: supers, ontology }
    })
}

pub fn joint_fixpoint_bounded_and_deterministic(cases: u32) -> Result<(), String> {
    let strategy = joint_case().prop_flat_map(|c| {
        let shuffled = Just(c.audience.clone()).prop_shuffle();
        (Just(c), shuffled)
    });
    run(cases, strategy, |(c, shuffled)| {
        let r = resolve_joint_interface(&c.speaker, &c.audience, &c.portlet, &c.classes, &c.ontology).unwrap();
        let users = c.audience.len() + 1;
        let labels: usize = c.classes.iter().map(|s| s.labels(&c.ontology).len()).sum();
        prop_assert!(r.rounds >= 1 && r.rounds <= users * labels, "{} rounds for {users} users, {labels} labels", r.rounds);
        let again = resolve_joint_interface(&c.speaker, &c.audience, &c.portlet, &c.classes, &c.ontology).unwrap();
        prop_assert_eq!(&again, &r);
        let reordered = resolve_joint_interface(&c.speaker, &shuffled, &c.portlet, &c.classes, &c.ontology).unwrap();
        prop_assert_eq!(&reordered, &r);
        prop_assert_eq!(r.views.len(), users);
        for view in r.views.values() {
            for (class, label) in &view.label_assignment {
                let s = c.classes.iter().find(|s| s.id() == class).unwrap();
                prop_assert!(s.labels(&c.ontology).contains(label.as_str()));
            }
        }
        Ok(())
    })
}

// ---- oracle equivalence ----

fn random_store(rng: &mut ChaCha8Rng) -> TripleStore {
    let mut store = TripleStore::new();
    let target = rng.gen_range(0..=1000);
    for _ in 0..target {
        let s = format!("s{}", rng.gen_range(0..12));
        let p = format!("p{}", rng.gen_range(0..6));
        let t = if rng.gen_bool(0.3) {
            Triple::with_literal(&s, &p, &format!("v{}", rng.gen_range(0..4)))
        } else {
            Triple::iris(&s, &p, &format!("s{}", rng.gen_range(0..12)))
        };
        store.insert(t.unwrap()).unwrap();
    }
    store
}

fn random_term(rng: &mut ChaCha8Rng, store: &TripleStore, position: usize) -> Term {
    if rng.gen_bool(0.55) {
        return Term::var(["a", "b", "c"][rng.gen_range(0..3)]);
    }
    let pool: Vec<&Triple> = store.iter().collect();
    if pool.is_empty() || rng.gen_bool(0.1) {
        return Term::iri("missing");
    }
    let t = pool[rng.gen_range(0..pool.len())];
    [&t.subject, &t.predicate, &t.object][position].clone()
}

/// Every assignment of store terms to the query variables that puts each
/// instantiated pattern in the store.
fn brute_force_query(store: &TripleStore, patterns: &[TriplePattern]) -> BTreeSet<Binding> {
    let vars: Vec<String> = patterns
        .iter()
        .flat_map(|p| p.variables().map(str::to_owned).collect::<Vec<_>>())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let domain: Vec<Term> = store
        .iter()
        .flat_map(|t| [t.subject.clone(), t.predicate.clone(), t.object.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = BTreeSet::new();
    let mut index = vec![0usize; vars.len()];
    if !vars.is_empty() && domain.is_empty() {
        return out;
    }
    let slot = |t: &Term| vars.iter().position(|v| v == t.text());
    loop {
        let ground = |t: &Term| if t.is_variable() { domain[index[slot(t).unwrap()]].clone() } else { t.clone() };
        let holds = patterns.iter().all(|p| {
            Triple::new(ground(&p.subject), ground(&p.predicate), ground(&p.object))
                .map(|t| store.contains(&t))
                .unwrap_or(false)
        });
        if holds {
            out.insert(vars.iter().cloned().zip(index.iter().map(|&i| domain[i].clone())).collect());
        }
        // Odometer increment over the variable positions.
        let mut k = 0;
        loop {
            if k == index.len() {
                return out;
            }
            index[k] += 1;
            if index[k] < domain.len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

pub fn query_matches_brute_force(stores: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51);
    for case in 0..stores {
        let store = random_store(&mut rng);
        if store.len() > 1000 {
            return Err(format!("store {case} has {} triples", store.len()));
        }
        for _ in 0..2 {
            let n = rng.gen_range(1..=3);
            let patterns: Vec<TriplePattern> = (0..n)
                .map(|_| {
                    TriplePattern::new(
                        random_term(&mut rng, &store, 0),
                        random_term(&mut rng, &store, 1),
                        random_term(&mut rng, &store, 2),
                    )
                })
                .collect();
            let got: BTreeSet<Binding> = store.query(&patterns).map_err(|e| e.to_string())?.rows.into_iter().collect();
            let want = brute_force_query(&store, &patterns);
            if got != want {
                return Err(format!("store {case}: query {patterns:?} gave {} rows, oracle {}", got.len(), want.len()));
            }
        }
    }
    Ok(())
}

fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> NavGraph {
    let n = rng.gen_range(1..=max_nodes);
    let density = rng.gen_range(0.5..3.0) / n as f64;
    let mut g = NavGraph::new();
    let ids: Vec<NodeId> = (0..n).map(|i| NodeId::new(format!("n{i:02}"))).collect();
    for id in &ids {
        g.add_node(id.clone());
    }
    for a in &ids {
        for b in &ids {
            if a != b && rng.gen_bool(density.min(1.0)) {
                g.add_link(a, b).unwrap();
            }
        }
    }
    g
}

fn bfs_distances(g: &NavGraph, start: &NodeId) -> BTreeMap<NodeId, usize> {
    let mut dist = BTreeMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[&cur];
        for next in g.successors(&cur) {
            if !dist.contains_key(next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next.clone());
            }
        }
    }
    dist
}

/// Lexicographically smallest shortest path by exhaustive search over simple
/// paths; only viable on small graphs.
fn exhaustive_best_path(g: &NavGraph, start: &NodeId, goals: &BTreeSet<NodeId>) -> Option<Vec<NodeId>> {
    fn walk(
        g: &NavGraph,
        at: &NodeId,
        goals: &BTreeSet<NodeId>,
        path: &mut Vec<NodeId>,
        seen: &mut BTreeSet<NodeId>,
        best: &mut Option<Vec<NodeId>>,
    ) {
        if goals.contains(at) {
            let better = match best {
                None => true,
                Some(b) => (path.len(), &*path) < (b.len(), b),
            };
            if better {
                *best = Some(path.clone());
            }
            return;
        }
        for next in g.successors(at) {
            if seen.insert(next.clone()) {
                path.push(next.clone());
                walk(g, next, goals, path, seen, best);
                path.pop();
                seen.remove(next);
            }
        }
    }
    let mut best = None;
    walk(g, start, goals, &mut Vec::new(), &mut BTreeSet::from([start.clone()]), &mut best);
    best
}

fn check_plan(g: &NavGraph, start: &NodeId, goals: &BTreeSet<NodeId>, exhaustive: bool) -> Result<(), String> {
    let dist = bfs_distances(g, start);
    let nearest = goals.iter().filter_map(|goal| dist.get(goal)).min().copied();
    match (plan_won(g, start, goals), nearest) {
        (Ok(path), Some(d)) => {
            if path.len() != d {
                return Err(format!("path {path:?} has length {}, bfs distance {d}", path.len()));
            }
            let mut at = start;
            for step in &path {
                if !g.successors(at).any(|n| n == step) {
                    return Err(format!("path {path:?} uses a missing link {at} -> {step}"));
                }
                at = step;
            }
            if !goals.contains(at) {
                return Err(format!("path {path:?} does not end in a goal"));
            }
            if exhaustive {
                let best = exhaustive_best_path(g, start, goals).unwrap();
                if best != path {
                    return Err(format!("path {path:?}, smallest shortest path {best:?}"));
                }
            }
            Ok(())
        }
        (Err(_), None) => Ok(()),
        (got, want) => Err(format!("plan {got:?}, bfs nearest goal distance {want:?}")),
    }
}

pub fn plan_matches_bfs(graphs: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB5);
    for case in 0..graphs {
        let small = case % 2 == 0;
        let g = random_graph(&mut rng, if small { 9 } else { 100 });
        let nodes: Vec<NodeId> = g.nodes().cloned().collect();
        let start = nodes.choose(&mut rng).unwrap().clone();
        let k = rng.gen_range(1..=3.min(nodes.len()));
        let goals: BTreeSet<NodeId> = nodes.choose_multiple(&mut rng, k).cloned().collect();
        check_plan(&g, &start, &goals, small).map_err(|e| format!("graph {case}: {e}"))?;
    }
    Ok(())
}

pub struct SuperconceptCase {
    pub taxonomy: FacetedTaxonomy,
    pub ontology: Ontology,
    pub weights: DissimilarityWeights,
    pub theta: f64,
}

fn random_superconcept_case(rng: &mut ChaCha8Rng) -> SuperconceptCase {
    let n = rng.gen_range(0..=50);
    let alphabet = ['a', 'b', 'c'];
    let mut ontology = Ontology::new(1);
    let mut ids = Vec::new();
    for i in 0..n {
        let len = rng.gen_range(1..=5);
        let label: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
        let tags: Vec<String> = (0..rng.gen_range(0..3)).map(|_| format!("t{}", rng.gen_range(0..5))).collect();
        let id = format!("c{i:02}");
        ontology
            .add_concept(Concept::new(id.as_str(), &label).with_tags(tags).with_features(vec![rng.gen_range(0.0..1.0)]))
            .unwrap();
        ids.push(ConceptId::new(id));
    }
    for _ in 0..rng.gen_range(0..=n / 3 + 1) {
        if n >= 2 {
            let a = ids.choose(rng).unwrap().clone();
            let b = ids.choose(rng).unwrap().clone();
            if a != b {
                ontology.add_equivalence(&a, &b).unwrap();
            }
        }
    }
    let mut taxonomy = FacetedTaxonomy::new();
    for i in 0..rng.gen_range(0..6) {
        let len = rng.gen_range(1..=5);
        let label: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
        let iface = FacetedInterface::new(format!("i{}", rng.gen_range(0..3)));
        taxonomy.attach(create_tag(&label, format!("u{i}")).unwrap(), iface);
    }
    let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
    let weights = DissimilarityWeights::normalize(&raw).unwrap_or_default();
    SuperconceptCase { taxonomy, ontology, weights, theta: rng.gen_range(0.02..0.4) }
}

/// Links every pair the definition links, then closes the relation with a
/// boolean Floyd-Warshall pass.
fn brute_force_partition(c: &SuperconceptCase) -> BTreeSet<BTreeSet<ConceptId>> {
    let concepts: Vec<&Concept> = c.ontology.concepts().collect();
    let n = concepts.len();
    let pos = |id: &ConceptId| concepts.iter().position(|x| &x.id == id).unwrap();
    let mut reach = vec![vec![false; n]; n];
    let mut linked = vec![false; n];
    let mut link = |reach: &mut Vec<Vec<bool>>, i: usize, j: usize| {
        reach[i][j] = true;
        reach[j][i] = true;
        linked[i] = true;
        linked[j] = true;
    };
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let equivalent = c.ontology.are_equivalent(&concepts[i].id, &concepts[j].id);
                let close = dissimilarity(&vectorize(concepts[i]), &vectorize(concepts[j]), &c.weights).unwrap() < c.theta;
                if equivalent || close {
                    link(&mut reach, i, j);
                }
            }
        }
    }
    for pair in c.taxonomy.pairs() {
        let tag = &pair.tag;
        let hits: Vec<usize> = apply_rules(tag, &c.ontology).iter().map(|(id, _)| pos(id)).collect();
        let hits = if hits.is_empty() {
            let context: BTreeSet<String> = c
                .taxonomy
                .pairs()
                .filter(|p| c.taxonomy.pairs().any(|q| q.tag.label() == tag.label() && q.interface == p.interface))
                .map(|p| p.tag.label().to_owned())
                .collect();
            let scored: Vec<(f64, usize)> = (0..n)
                .filter_map(|i| {
                    tag_dissimilarity(tag.label(), &context, &vectorize(concepts[i]), &c.weights).unwrap().map(|d| (d, i))
                })
                .filter(|(d, _)| *d < c.theta)
                .collect();
            let best = scored.iter().map(|(d, _)| *d).fold(f64::INFINITY, f64::min);
            scored.into_iter().find(|(d, _)| *d == best).map(|(_, i)| vec![i]).unwrap_or_default()
        } else {
            hits
        };
        for &i in &hits {
            for &j in &hits {
                link(&mut reach, i, j);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    (0..n)
        .filter(|&i| linked[i])
        .map(|i| {
            (0..n).filter(|&j| j == i || reach[i][j]).map(|j| concepts[j].id.clone()).collect::<BTreeSet<_>>()
        })
        .collect()
}

pub fn superconcepts_match_closure(instances: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5C);
    for case in 0..instances {
        let c = random_superconcept_case(&mut rng);
        let got = form_superconcepts(&c.taxonomy, &c.ontology, &c.weights, c.theta).map_err(|e| e.to_string())?;
        let mut seen = BTreeSet::new();
        for s in &got {
            for m in &s.members {
                if !seen.insert(m.clone()) {
                    return Err(format!("instance {case}: {m} appears in two superconcepts"));
                }
            }
        }
        let got: BTreeSet<BTreeSet<ConceptId>> = got.into_iter().map(|s| s.members).collect();
        let want = brute_force_partition(&c);
        if got != want {
            return Err(format!("instance {case}: partition {got:?}, closure oracle {want:?}"));
        }
    }
    Ok(())
}

// ---- learning oracle ----

/// Best accuracy over the weight simplex at 0.05 resolution, each weight
/// vector paired with its best threshold.
pub fn grid_search_accuracy(samples: &[([f64; 3], bool)]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..=20 {
        for j in 0..=(20 - i) {
            let w = [i as f64 / 20.0, j as f64 / 20.0, (20 - i - j) as f64 / 20.0];
            let mut scored: Vec<(f64, bool)> =
                samples.iter().map(|(d, m)| (w[0] * d[0] + w[1] * d[1] + w[2] * d[2], *m)).collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0));
            // Threshold just above position k: the first k are predicted matches.
            let total_non = scored.iter().filter(|(_, m)| !m).count();
            let mut matches_below = 0;
            let mut non_below = 0;
            for k in 0..=scored.len() {
                if k == scored.len() || k == 0 || scored[k].0 != scored[k - 1].0 {
                    let correct = matches_below + (total_non - non_below);
                    best = best.max(correct as f64 / scored.len() as f64);
                }
                if k < scored.len() {
                    if scored[k].1 {
                        matches_below += 1;
                    } else {
                        non_below += 1;
                    }
                }
            }
        }
    }
    best
}
