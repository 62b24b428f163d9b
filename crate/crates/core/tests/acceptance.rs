//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line with its timing.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use bass_serre_ht::amalgam_words::{self, reduce_amalgam, reduce_amalgam_with, AmalgamNormalForm, AmalgamWord};
use bass_serre_ht::base_groups::{make_bs_presentation, zmod_free_product, AmalgamBaseData, HnnBaseData, Presentation, Side};
use bass_serre_ht::cli::{generate_demands, GenConfig};
use bass_serre_ht::graphs::{EdgeId, Graph, VertexId};
use bass_serre_ht::hnn_words::{self, reduce, reduce_with, HnnLetter, HnnNormalForm, HnnWord, PinchOrder, Sign};
use bass_serre_ht::ht_builder::{
    self, hnn::separation_search, parse_demands, run_rounds, AmalgamEngine, BuildError, Certificate, Demand, Engine, HnnEngine,
    RoundsConfig, RunOutcome,
};
use bass_serre_ht::preaction_amalgam::PreActionAmalgam;
use bass_serre_ht::preaction_hnn::{sample_transitive, GOrbit, GPoint, Point, PreActionHnn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bs23() -> HnnBaseData {
    make_bs_presentation(2, 3).unwrap()
}

fn z2z3() -> AmalgamBaseData {
    zmod_free_product(2, 3).unwrap()
}

fn random_hnn_word(rng: &mut ChaCha8Rng, data: &HnnBaseData, max_len: usize) -> HnnWord {
    let len = rng.gen_range(0..=max_len);
    HnnWord::new(
        (0..len)
            .map(|_| match rng.gen_range(0..4) {
                0 => HnnLetter::Stable(Sign::Pos),
                1 => HnnLetter::Stable(Sign::Neg),
                _ => HnnLetter::Base(data.element(rng.gen_range(-7..=7))),
            })
            .collect(),
    )
}

fn random_amalgam_word(rng: &mut ChaCha8Rng, data: &AmalgamBaseData, max_len: usize) -> AmalgamWord {
    let len = rng.gen_range(0..=max_len);
    AmalgamWord::new(
        (0..len)
            .map(|_| {
                let side = if rng.gen_bool(0.5) { Side::One } else { Side::Two };
                (side, data.factor(side).element(rng.gen_range(0..6)))
            })
            .collect(),
    )
}

fn criterion_1() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let hnn = bs23();
    let amalgam = z2z3();
    let mut nontrivial = 0;
    for _ in 0..10_000 {
        let w = random_hnn_word(&mut rng, &hnn, 20);
        let (a, b) = (reduce_with(&w, &hnn, PinchOrder::LeftmostFirst), reduce_with(&w, &hnn, PinchOrder::RightmostFirst));
        ensure(a == b && a.to_string() == b.to_string(), || format!("BS(2,3) strategies disagree on {w}: {a} vs {b}"))?;
        ensure(a.is_normal(&hnn), || format!("{a} is not normal"))?;
        ensure(reduce(&w.concat(&w.inverse()), &hnn).is_identity(), || format!("w w^-1 nontrivial for {w}"))?;
        nontrivial += usize::from(!a.is_identity());
    }
    for _ in 0..10_000 {
        let w = random_amalgam_word(&mut rng, &amalgam, 20);
        let (a, b) = (
            reduce_amalgam_with(&w, &amalgam, PinchOrder::LeftmostFirst),
            reduce_amalgam_with(&w, &amalgam, PinchOrder::RightmostFirst),
        );
        ensure(a == b && a.to_string() == b.to_string(), || format!("Z/2*Z/3 strategies disagree on {w}: {a} vs {b}"))?;
        ensure(a.is_normal(&amalgam), || format!("{a} is not normal"))?;
    }
    Ok(format!("2 x 10^4 words, {nontrivial} nontrivial in BS(2,3)"))
}

fn criterion_2() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let data = bs23();
    let core = PreActionHnn::empty(data.clone(), 1);
    let gl = core.globalization();
    let base = GPoint::core(0, data.identity());
    for _ in 0..1_000 {
        let start = reduce(&random_hnn_word(&mut rng, &data, 8), &data);
        let x = gl.eval(&base, &start);
        let w = random_hnn_word(&mut rng, &data, 20);
        let g = reduce(&w, &data);
        let (raw, nf) = (gl.eval_word(&x, &w), gl.eval(&x, &g));
        ensure(raw == nf, || format!("{x} . {w} = {raw} but {x} . {g} = {nf}"))?;
        // the translation action is free
        ensure((x == nf) == g.is_identity(), || format!("{g} fixes {x}"))?;
    }
    Ok("10^3 pairs".into())
}

/// Some reduced path that starts with `e` comes back to `s(e)`, searched
/// exhaustively up to length `2|E|`.
fn brute_return(g: &Graph, e: EdgeId) -> bool {
    fn go(g: &Graph, target: VertexId, last: EdgeId, depth: usize, seen: &mut BTreeSet<(EdgeId, usize)>) -> bool {
        if g.range(last) == target {
            return true;
        }
        if depth == 0 || !seen.insert((last, depth)) {
            return false;
        }
        let back = Graph::antipode(last);
        g.star(g.range(last)).iter().any(|&f| f != back && go(g, target, f, depth - 1, seen))
    }
    go(g, g.source(e), e, g.edge_count(), &mut BTreeSet::new())
}

/// Some reduced path starting with `e` visits a vertex twice.
fn brute_revisit(g: &Graph, e: EdgeId) -> bool {
    fn go(g: &Graph, last: EdgeId, visited: &mut Vec<VertexId>) -> bool {
        let v = g.range(last);
        if visited.contains(&v) {
            return true;
        }
        visited.push(v);
        let back = Graph::antipode(last);
        let found = g.star(v).iter().any(|&f| f != back && go(g, f, visited));
        visited.pop();
        found
    }
    go(g, e, &mut vec![g.source(e)])
}

/// The half-graph beyond `e` is a tree: count the undirected edges and
/// vertices reachable by reduced paths that start with `e`.
fn brute_half_tree(g: &Graph, e: EdgeId) -> bool {
    let mut edges = BTreeSet::from([e]);
    let mut stack = vec![e];
    while let Some(f) = stack.pop() {
        for &h in g.star(g.range(f)) {
            if h != Graph::antipode(f) && h != Graph::antipode(e) && edges.insert(h) {
                stack.push(h);
            }
        }
    }
    let undirected: BTreeSet<EdgeId> = edges.iter().map(|&f| f / 2).collect();
    let vertices: BTreeSet<VertexId> = edges.iter().flat_map(|&f| [g.source(f), g.range(f)]).collect();
    undirected.len() + 1 == vertices.len() && !edges.contains(&Graph::antipode(e))
}

fn criterion_3() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut treeing) = (0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let mut g = Graph::new();
        for i in 0..n {
            g.add_vertex(format!("v{i}"));
        }
        for _ in 0..rng.gen_range(0..=n + 3) {
            g.add_edge(rng.gen_range(0..n), rng.gen_range(0..n)).unwrap();
        }
        for e in 0..g.edge_count() {
            let lib = g.is_treeing_edge(e).map_err(|x| x.to_string())?;
            let (i, ii, iii) = (!brute_return(&g, e), !brute_revisit(&g, e), brute_half_tree(&g, e));
            ensure(lib == i && i == ii && ii == iii, || format!("edge {e} of {g:?}: lib {lib}, oracles {i} {ii} {iii}"))?;
            if lib {
                let h = g.half_tree(e).map_err(|x| x.to_string())?.ok_or("half_tree missing")?;
                ensure(h.is_tree(), || format!("half tree of {e} is not a tree"))?;
            }
            checked += 1;
            treeing += usize::from(lib);
        }
    }
    Ok(format!("200 graphs, {checked} edges, {treeing} treeing"))
}

/// AHU canonical form of the tree `g` rooted at `root`.
fn canonical(g: &Graph, root: VertexId) -> Result<String, String> {
    fn go(g: &Graph, v: VertexId, parent_edge: Option<EdgeId>, seen: &mut BTreeSet<VertexId>) -> Result<String, String> {
        if !seen.insert(v) {
            return Err(format!("cycle through vertex {v}"));
        }
        let mut kids = Vec::new();
        for &e in g.star(v) {
            if Some(Graph::antipode(e)) != parent_edge {
                kids.push(go(g, g.range(e), Some(e), seen)?);
            }
        }
        kids.sort();
        Ok(format!("({})", kids.concat()))
    }
    go(g, root, None, &mut BTreeSet::new())
}

/// Canonical form of the ball of radius `r` in the tree where vertices at
/// even depth have degree `even` and the others degree `odd`.
fn ball(even: usize, odd: usize, r: usize) -> String {
    fn go(depth: usize, r: usize, even: usize, odd: usize, root: bool) -> String {
        if depth == r {
            return "()".into();
        }
        let deg = if depth.is_multiple_of(2) { even } else { odd };
        let kids = if root { deg } else { deg - 1 };
        format!("({})", go(depth + 1, r, even, odd, false).repeat(kids))
    }
    go(0, r, even, odd, true)
}

fn criterion_4() -> Result<String, String> {
    let data = bs23();
    let degree = data.coset_reps_pos().len() + data.coset_reps_neg().len();
    ensure(degree == 5, || format!("|C+| + |C-| = {degree}"))?;
    let expected = ball(degree, degree, 3);

    let core = PreActionHnn::empty(data.clone(), 1);
    let w = core.globalization().window(&[GOrbit::Core(0)], 3);
    ensure(w.graph.is_tree(), || "BS(2,3) window is not a tree".into())?;
    let root = w.vertex(&GOrbit::Core(0)).ok_or("root missing")?;
    ensure(canonical(&w.graph, root)? == expected, || "BS(2,3) window is not the radius-3 ball".into())?;
    for v in 0..w.graph.vertex_count() {
        let d = w.graph.degree(v);
        ensure(d == 1 || d == degree, || format!("vertex {} has degree {d}", w.graph.label(v)))?;
    }

    // the truncated translation pre-action is that same ball
    let trunc = PreActionHnn::translation_truncation(data, 3);
    let tw = trunc.bass_serre_graph(&trunc.orbit_ids()).map_err(|e| e.to_string())?;
    let troot = tw.vertex(&GOrbit::Core(0)).ok_or("root missing")?;
    ensure(canonical(&tw.graph, troot)? == expected, || "truncation graph differs from the ball".into())?;

    let fp = z2z3();
    let core = PreActionAmalgam::empty(fp, 1, 0);
    let gl = core.globalization();
    let seeds = gl.core_vertices();
    let aw = gl.window(&seeds, 3);
    let aroot = aw.vertex(&seeds[0]).ok_or("root missing")?;
    ensure(aw.graph.is_tree(), || "Z/2*Z/3 window is not a tree".into())?;
    ensure(canonical(&aw.graph, aroot)? == ball(2, 3, 3), || "Z/2*Z/3 window is not the (2,3)-biregular ball".into())?;
    Ok(format!("BS(2,3): {} vertices; Z/2*Z/3: {} vertices", w.graph.vertex_count(), aw.graph.vertex_count()))
}

fn criterion_5() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data = bs23();
    let (mut frontier_checked, mut composites) = (0, 0);
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let core = sample_transitive(&data, n, rng.gen_range(0..3), &mut rng);
        ensure(!core.is_global(), || "sample is global".into())?;
        let gl = core.globalization();

        // (a) restriction: tau agrees with the table on the domain
        for (x, y) in core.entries() {
            for k in -3..=3 {
                let s = data.element(3 * k);
                let ts = data.theta_apply(s).map_err(|e| e.to_string())?;
                let got = gl.tau(&GPoint::from(x.act(s)));
                ensure(got == GPoint::from(y.act(ts)), || format!("tau({}) = {got}", x.act(s)))?;
            }
        }
        for &o in core.orbit_ids().iter() {
            for v in -6..=6 {
                let x = Point::new(o, data.element(v));
                let img = gl.tau(&GPoint::from(x));
                let table = core.tau_eval(x).ok();
                ensure(table.map(GPoint::from) == img.as_core().map(GPoint::from), || format!("tau({x}) = {img} off the table"))?;
            }
        }

        // (b) frontier edges are treeing in every window
        let seeds: Vec<GOrbit> = core.orbit_ids().into_iter().map(GOrbit::Core).collect();
        for r in 1..=4 {
            let w = gl.window(&seeds, r);
            for id in 0..w.graph.edge_count() {
                if gl.is_frontier(w.edge(id)) {
                    ensure(w.graph.is_treeing_edge(id).unwrap(), || format!("frontier edge {} not treeing at r={r}", w.edge(id)))?;
                    frontier_checked += 1;
                }
            }
        }

        // (c) partial action laws
        let orbits: Vec<u64> = core.orbit_ids().into_iter().collect();
        for _ in 0..50 {
            let x = Point::new(orbits[rng.gen_range(0..orbits.len())], data.element(rng.gen_range(-4..=4)));
            let g = reduce(&random_hnn_word(&mut rng, &data, 4), &data);
            let h = reduce(&random_hnn_word(&mut rng, &data, 4), &data);
            let gh = hnn_words::multiply(&g, &h, &data).map_err(|e| e.to_string())?;
            let ginv = hnn_words::invert(&g, &data).map_err(|e| e.to_string())?;
            ensure(core.partial_action_eval(x, &HnnNormalForm::identity(&data)) == Some(x), || "identity law".into())?;
            if let Some(y) = core.partial_action_eval(x, &g) {
                ensure(core.partial_action_eval(y, &ginv) == Some(x), || format!("inverse law at {x}, {g}"))?;
                ensure(gl.eval(&x.into(), &g) == GPoint::from(y), || format!("globalization disagrees at {x}, {g}"))?;
                if let Some(z) = core.partial_action_eval(y, &h) {
                    ensure(core.partial_action_eval(x, &gh) == Some(z), || format!("composition law at {x}, {g}, {h}"))?;
                    composites += 1;
                }
            }
        }
    }
    ensure(composites >= 100, || format!("only {composites} defined composites"))?;
    Ok(format!("{frontier_checked} frontier edges, {composites} defined composites"))
}

/// The frozen-set discipline plus certificates re-checked by the core's own
/// partial action, without consulting `verify_certificate`.
fn check_run<E: Engine>(outcome: &RunOutcome<E>, partial: impl Fn(&E::Core, E::Point, &E::Word) -> Option<E::Point>) -> Result<(), String> {
    if let Some(e) = &outcome.error {
        return Err(format!("run stopped: {e}"));
    }
    let h = &outcome.state.history;
    for (r, pair) in h.windows(2).enumerate() {
        for p in &pair[0].frozen {
            let (before, after) = (E::tau_image(&pair[0].core, *p), E::tau_image(&pair[1].core, *p));
            ensure(before == after, || format!("round {}: tau({p}) changed {before:?} -> {after:?}", r + 1))?;
        }
        ensure(pair[0].frozen.is_subset(&pair[1].frozen), || format!("round {}: frozen set shrank", r + 1))?;
    }
    let core = &outcome.state.core;
    for c in &outcome.state.certificates {
        match c {
            Certificate::Transitivity { xs, ys, gamma } => {
                for (x, y) in xs.iter().zip(ys) {
                    ensure(partial(core, *x, gamma) == Some(*y), || format!("{x} . {gamma} != {y}"))?;
                }
            }
            Certificate::Faithfulness { point, moves } => {
                for g in moves {
                    ensure(!E::is_trivial(g) && partial(core, *point, g) != Some(*point), || format!("{g} fixes {point}"))?;
                }
            }
        }
    }
    ensure(outcome.all_verify(), || "verify_certificate disagrees".into())
}

fn bs23_run() -> Result<RunOutcome<HnnEngine>, String> {
    let data = bs23();
    let text = generate_demands(&Presentation::Hnn(data.clone()), &GenConfig { count: 8, max_k: 4, seed: 6, ..GenConfig::default() })
        .map_err(|e| e.to_string())?;
    let demands = parse_demands::<HnnEngine>(&data, &text)?;
    let ks: BTreeSet<usize> = demands
        .iter()
        .map(|d| match d {
            Demand::Transitivity { xs, .. } => xs.len(),
            Demand::Faithfulness(_) => 0,
        })
        .collect();
    ensure(ks == BTreeSet::from([1, 2, 3, 4]), || format!("k values {ks:?}"))?;
    run_rounds::<HnnEngine>(&data, &demands, &RoundsConfig { rounds: 8, faithful: 10, ..RoundsConfig::default() })
        .map_err(|e| e.to_string())
}

fn criterion_6() -> Result<String, String> {
    let outcome = bs23_run()?;
    check_run(&outcome, |core: &PreActionHnn, x, g| core.partial_action_eval(x, g))?;
    ensure(outcome.state.discharged == 8, || format!("{} demands discharged", outcome.state.discharged))?;
    let certs = &outcome.state.certificates;
    let transitivity = certs.iter().filter(|c| matches!(c, Certificate::Transitivity { .. })).count();
    ensure(transitivity == 8, || format!("{transitivity} transitivity certificates"))?;
    let (o, e) = HnnEngine::core_size(&outcome.state.core);
    Ok(format!("8/8 discharged, {} certificates, final core {o} orbits / {e} entries", certs.len()))
}

fn criterion_7() -> Result<String, String> {
    let data = z2z3();
    let text = generate_demands(&Presentation::Amalgam(data.clone()), &GenConfig { count: 6, max_k: 3, seed: 7, ..GenConfig::default() })
        .map_err(|e| e.to_string())?;
    let demands = parse_demands::<AmalgamEngine>(&data, &text)?;
    let outcome = run_rounds::<AmalgamEngine>(&data, &demands, &RoundsConfig { rounds: 6, faithful: 10, ..RoundsConfig::default() })
        .map_err(|e| e.to_string())?;
    check_run(&outcome, |core: &PreActionAmalgam, x, g| core.action_eval_side1(x, g))?;
    ensure(outcome.state.discharged == 6, || format!("{} demands discharged", outcome.state.discharged))?;

    // each transitivity certificate is gamma c1 c2 c1^-1 gamma^-1 for the
    // transcript's gamma and nontrivial c1, c2
    let gammas: Vec<AmalgamNormalForm> = outcome
        .transcript
        .iter()
        .filter_map(|l| l.strip_prefix("GAMMA \"")?.strip_suffix('"').map(str::to_string))
        .map(|t| AmalgamEngine::parse_word(&data, &t).ok_or(format!("bad gamma {t}")))
        .collect::<Result<_, _>>()?;
    let certs: Vec<&AmalgamNormalForm> = outcome
        .state
        .certificates
        .iter()
        .filter_map(|c| match c {
            Certificate::Transitivity { gamma, .. } => Some(gamma),
            Certificate::Faithfulness { .. } => None,
        })
        .collect();
    ensure(gammas.len() == 6 && certs.len() == 6, || format!("{} gammas, {} certificates", gammas.len(), certs.len()))?;
    let one = |side: Side, v: i64| reduce_amalgam(&AmalgamWord::new(vec![(side, data.factor(side).element(v))]), &data);
    for (gamma, cert) in gammas.iter().zip(certs) {
        let ginv = amalgam_words::invert(gamma, &data).map_err(|e| e.to_string())?;
        let shaped = (1..2).any(|c1| {
            (1..3).any(|c2| {
                let mut w = gamma.clone();
                for f in [one(Side::One, c1), one(Side::Two, c2), one(Side::One, -c1), ginv.clone()] {
                    w = amalgam_words::multiply(&w, &f, &data).unwrap();
                }
                &w == cert
            })
        });
        ensure(shaped, || format!("certificate {cert} is not conjugate-shaped by {gamma}"))?;
    }
    Ok(format!("6/6 discharged, {} certificates", outcome.state.certificates.len()))
}

fn criterion_8() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_bsht");
    let out = std::env::temp_dir().join(format!("bsht-acceptance-{}", std::process::id()));
    for (m, n, needle) in [("2", "2", "|m| = |n|"), ("1", "2", "ascending")] {
        let res = Command::new(bin)
            .args(["build", "--bs", m, n, "--random-demands", "2", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        let err = String::from_utf8_lossy(&res.stderr);
        ensure(res.status.code() == Some(2), || format!("BS({m},{n}) exit {:?}", res.status.code()))?;
        ensure(err.contains(needle), || format!("BS({m},{n}) message lacks {needle:?}: {err}"))?;
    }
    let bs22 = make_bs_presentation(2, 2).unwrap();
    ensure(!ht_builder::check_hnn_preconditions(&bs22).accepted(), || "BS(2,2) accepted".into())?;
    match separation_search(&bs22, bs22.element(2), 12) {
        Err(BuildError::CapExceeded { what: "separation", cap: 12, .. }) => {}
        other => return Err(format!("BS(2,2) separation: {other:?}")),
    }
    Ok("exit 2 for BS(2,2) and BS(1,2); separation cap exhausted".into())
}

fn criterion_9() -> Result<String, String> {
    let outcome = bs23_run()?;
    let data = bs23();
    let first = hnn_words::enumerate_nontrivial(&data, 10);
    let core = &outcome.state.core;
    let witness = outcome
        .state
        .certificates
        .iter()
        .rev()
        .find_map(|c| match c {
            Certificate::Faithfulness { point, moves } if moves == &first => Some(*point),
            _ => None,
        })
        .ok_or("no witness for the first 10 elements")?;
    for g in &first {
        let y = core.partial_action_eval(witness, g).ok_or_else(|| format!("{witness} . {g} undefined"))?;
        ensure(y != witness, || format!("{g} fixes {witness}"))?;
    }
    let names: Vec<String> = first.iter().map(|g| g.to_string()).collect();
    Ok(format!("{witness} moved by {}", names.join(", ")))
}

fn criterion_10() -> Result<String, String> {
    let a = bs23_run()?;
    let b = bs23_run()?;
    ensure(a.transcript_text() == b.transcript_text(), || "transcripts differ".into())?;
    ensure(a.certificates_text() == b.certificates_text(), || "certificates differ".into())?;
    let (da, db) = (HnnEngine::dot(&a.state.core, 1), HnnEngine::dot(&b.state.core, 1));
    ensure(da == db, || "DOT differs".into())?;
    Ok(format!("{} transcript bytes, {} DOT bytes identical", a.transcript_text().len(), da.len()))
}

fn main() {
    let criteria: [(&str, Check, u64); 10] = [
        ("normal-form uniqueness", criterion_1, 5),
        ("Britton soundness via action", criterion_2, 10),
        ("treeing-edge oracle equivalence", criterion_3, 30),
        ("Bass-Serre tree recovery", criterion_4, 5),
        ("free-globalization contract", criterion_5, 60),
        ("builder end-to-end on BS(2,3)", criterion_6, 120),
        ("builder end-to-end on Z/2*Z/3", criterion_7, 60),
        ("negative controls", criterion_8, 5),
        ("faithfulness witness", criterion_9, 10),
        ("determinism", criterion_10, 240),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        let took = start.elapsed();
        let result = result.and_then(|detail| {
            if took > Duration::from_secs(*budget) {
                Err(format!("took {took:.1?}, budget {budget} s ({detail})"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{took:.2?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{took:.2?}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
