//! The builder for amalgamated free products. Demand points live in `X_1`;
//! path-type elements start in the second factor and have odd length, so
//! their paths from `X_1` end back in `X_1`.

use std::collections::BTreeSet;

use super::{check_amalgam_preconditions, other_extension, BuildError, Caps, Engine, KeyExtension, PreconditionReport};
use crate::amalgam_words::{append_syllables, enumerate_nontrivial, next_syllables, reduce_amalgam, AmalgamNormalForm, AmalgamWord};
use crate::base_groups::{AmalgamBaseData, GroupElement, Side};
use crate::graphs::Path;
use crate::preaction_amalgam::{AEdge, AOrbit, AVertex, LazyGlobalization, Point1, Point2, PreActionAmalgam, Provenance, X1Point};

type Syllable = (Side, GroupElement);

fn internal(e: impl std::fmt::Display) -> BuildError {
    BuildError::Internal(e.to_string())
}

fn least_nontrivial(data: &AmalgamBaseData, side: Side) -> Result<GroupElement, BuildError> {
    data.coset_reps(side).into_iter().find(|c| !c.is_identity()).ok_or_else(|| internal(format!("Sigma is all of factor {side}")))
}

fn check_growth(gamma: &AmalgamNormalForm, base: usize, cap: usize) -> Result<(), BuildError> {
    if gamma.len() > base + cap {
        return Err(BuildError::CapExceeded { what: "extension", cap, detail: format!("gamma grew to \"{gamma}\"") });
    }
    Ok(())
}

fn nf(data: &AmalgamBaseData, syllables: Vec<Syllable>) -> AmalgamNormalForm {
    AmalgamNormalForm::from_syllables(syllables, data.factor(Side::One).identity())
}

/// Shortest `gamma*` starting in the second factor, of odd length, whose
/// paths from `1` and from `sigma` (an element of `Sigma_1`) end at distinct
/// vertices of the Bass-Serre tree. `cap` bounds the length before padding.
pub fn separation_search(data: &AmalgamBaseData, sigma: GroupElement, cap: usize) -> Result<AmalgamNormalForm, BuildError> {
    if !data.sigma(Side::One).contains(sigma) || sigma.is_identity() {
        return Err(BuildError::Internal(format!("separation needs a nontrivial element of Sigma, got {sigma}")));
    }
    let exhausted = || BuildError::CapExceeded { what: "separation", cap, detail: format!("no separating element for sigma={sigma}") };
    let first = data.transfer(sigma, Side::One).map_err(internal)?;
    let mut level: Vec<(Vec<Syllable>, GroupElement)> = vec![(Vec::new(), first)];
    let mut seen: BTreeSet<(GroupElement, Side)> = BTreeSet::new();
    for _ in 0..cap {
        let mut next = Vec::new();
        for (syls, s) in &level {
            let prev = syls.last().map_or(Side::One, |x| x.0);
            for (side, c) in next_syllables(prev, data) {
                let mut ext = syls.clone();
                ext.push((side, c));
                let conj = c.inv().mul(*s).mul(c);
                if !data.sigma(side).contains(conj) {
                    if ext.len() % 2 == 0 {
                        ext.push((Side::Two, least_nontrivial(data, Side::Two)?));
                    }
                    return Ok(nf(data, ext));
                }
                let moved = data.transfer(conj, side).map_err(internal)?;
                if seen.insert((moved, side)) {
                    next.push((ext, moved));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Err(exhausted())
}

/// `gamma^-1 sigma gamma` lies outside the first factor.
pub fn separates(data: &AmalgamBaseData, sigma: GroupElement, gamma: &AmalgamNormalForm) -> bool {
    let w = gamma.to_word().inverse().concat(&AmalgamWord::new(vec![(Side::One, sigma)])).concat(&gamma.to_word());
    let r = reduce_amalgam(&w, data);
    !(r.is_empty() || (r.len() == 1 && r.syllables()[0].0 == Side::One))
}

fn path_of(gl: &LazyGlobalization<'_>, x: &X1Point, gamma: &AmalgamNormalForm) -> Result<Vec<AEdge>, BuildError> {
    gl.path(x, gamma).map_err(internal)
}

fn analysis_seeds(gl: &LazyGlobalization<'_>, path: &[AEdge]) -> Vec<AVertex> {
    let mut seeds = gl.core_vertices();
    seeds.extend(path.iter().map(AEdge::source));
    if let Some(e) = path.last() {
        seeds.push(gl.range(e));
    }
    seeds
}

/// Whether the last edge of `path_x(gamma)` is a treeing edge.
pub fn ends_treeing(gl: &LazyGlobalization<'_>, x: &X1Point, gamma: &AmalgamNormalForm) -> Result<bool, BuildError> {
    let path = path_of(gl, x, gamma)?;
    let w = gl.window(&analysis_seeds(gl, &path), 1);
    let last = w.edge_id(path.last().expect("paths are nonempty")).ok_or_else(|| internal("path edge outside its window"))?;
    w.graph.is_treeing_edge(last).map_err(internal)
}

/// A path-type element whose paths from every point end in a treeing edge.
pub fn find_common_treeing_extension(gl: &LazyGlobalization<'_>, points: &[X1Point], cap: usize) -> Result<AmalgamNormalForm, BuildError> {
    let data = gl.base().data();
    let c2 = least_nontrivial(data, Side::Two)?;
    let mut gamma = nf(data, vec![(Side::Two, c2)]);
    let base = gamma.len();
    loop {
        let mut changed = false;
        for x in points {
            let path = path_of(gl, x, &gamma)?;
            let w = gl.window(&analysis_seeds(gl, &path), 1);
            let ids = path.iter().map(|e| w.edge_id(e).ok_or_else(|| internal("path edge outside its window"))).collect::<Result<Vec<_>, _>>()?;
            if w.graph.is_treeing_edge(*ids.last().expect("nonempty")).map_err(internal)? {
                continue;
            }
            let ext = w.graph.extend_to_treeing(&Path::new(ids)).map_err(internal)?;
            let edges: Vec<AEdge> = ext.edges.iter().map(|&e| w.edge(e).clone()).collect();
            let (mut syllables, _) = gl.syllables_along(x, &edges).map_err(internal)?;
            if syllables.len() % 2 == 0 {
                syllables.push((Side::Two, c2));
            }
            gamma = nf(data, syllables);
            check_growth(&gamma, base, cap)?;
            changed = true;
        }
        if !changed {
            return Ok(gamma);
        }
    }
}

/// Every end edge leaves a copy vertex and lies on no other point's path.
pub fn half_trees_disjoint(gl: &LazyGlobalization<'_>, points: &[X1Point], gamma: &AmalgamNormalForm) -> Result<bool, BuildError> {
    let paths = points.iter().map(|x| path_of(gl, x, gamma)).collect::<Result<Vec<_>, _>>()?;
    for (i, p) in paths.iter().enumerate() {
        let last = p.last().expect("nonempty");
        if gl.is_core(&last.orbit) || paths.iter().enumerate().any(|(j, q)| j != i && q.contains(last)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extend `gamma` until the end half-trees of all points are pairwise
/// disjoint and miss the core.
pub fn disjoin_half_trees(
    gl: &LazyGlobalization<'_>,
    points: &[X1Point],
    gamma: &AmalgamNormalForm,
    caps: &Caps,
) -> Result<AmalgamNormalForm, BuildError> {
    let data = gl.base().data();
    let c1 = least_nontrivial(data, Side::One)?;
    let c2 = least_nontrivial(data, Side::Two)?;
    let mut gamma = gamma.clone();
    let base = gamma.len();
    let ends_in_core = |g: &AmalgamNormalForm| -> Result<bool, BuildError> {
        for x in points {
            if gl.is_core(&path_of(gl, x, g)?.last().expect("nonempty").orbit) {
                return Ok(true);
            }
        }
        Ok(false)
    };
    while ends_in_core(&gamma)? {
        gamma = append_syllables(&gamma, &[(Side::One, c1), (Side::Two, c2)]);
        check_growth(&gamma, base, caps.extension)?;
    }
    'pairs: loop {
        check_growth(&gamma, base, caps.extension)?;
        let paths = points.iter().map(|x| path_of(gl, x, &gamma)).collect::<Result<Vec<_>, _>>()?;
        for (i, px) in paths.iter().enumerate() {
            for (j, py) in paths.iter().enumerate() {
                if i == j {
                    continue;
                }
                let ey = py.last().expect("nonempty");
                let Some(pos) = px.iter().position(|e| e == ey) else { continue };
                if pos + 1 < px.len() {
                    let yp = gl.eval(&points[j], &gamma);
                    let (delta, _) = gl.follow(&yp, &px[pos + 1..]).map_err(internal)?;
                    let last = *gamma.syllables().last().expect("nonempty");
                    let alt = other_extension(last, &delta, |prev| next_syllables(prev.0, data))
                        .ok_or_else(|| internal("no alternative extension"))?;
                    gamma = append_syllables(&gamma, &alt);
                } else {
                    let xp = gl.eval(&points[i], &gamma).act(c1);
                    let yp = gl.eval(&points[j], &gamma).act(c1);
                    let sigma = xp.element.inv().mul(yp.element);
                    if !data.sigma(Side::One).contains(sigma) {
                        gamma = append_syllables(&gamma, &[(Side::One, c1), (Side::Two, c2)]);
                    } else {
                        let star = separation_search(data, sigma, caps.separation)?;
                        let mut more = vec![(Side::One, c1)];
                        more.extend_from_slice(star.syllables());
                        gamma = append_syllables(&gamma, &more);
                    }
                }
                continue 'pairs;
            }
        }
        break;
    }
    if !half_trees_disjoint(gl, points, &gamma)? {
        return Err(internal(format!("half-trees of \"{gamma}\" are not disjoint")));
    }
    Ok(gamma)
}

fn check_demand(core: &PreActionAmalgam, xs: &[Point1], ys: &[Point1]) -> Result<(), BuildError> {
    super::Demand::<Point1, AmalgamNormalForm>::Transitivity { xs: xs.to_vec(), ys: ys.to_vec() }.validate()?;
    for p in xs.iter().chain(ys) {
        if !core.orbits(Side::One).contains_key(&p.orbit) || p.element.group() != core.data().factor(Side::One) {
            return Err(BuildError::BadDemand(format!("{p} is not a point of the core")));
        }
    }
    Ok(())
}

/// One key extension step: the new core and `gamma c1 c2 c1^-1 gamma^-1`.
pub fn key_extend_amalgam(core: &PreActionAmalgam, xs: &[Point1], ys: &[Point1], caps: &Caps) -> Result<KeyExtension<AmalgamEngine>, BuildError> {
    check_demand(core, xs, ys)?;
    let data = core.data().clone();
    let c1 = least_nontrivial(&data, Side::One)?;
    let c2 = least_nontrivial(&data, Side::Two)?;
    let points: Vec<X1Point> = xs.iter().chain(ys).map(|&p| p.into()).collect();
    let gl = core.globalization();
    let gamma = find_common_treeing_extension(&gl, &points, caps.extension)?;
    let gamma = disjoin_half_trees(&gl, &points, &gamma, caps)?;

    let mut targets = Vec::new();
    for x in &points {
        targets.extend(path_of(&gl, x, &gamma)?.iter().map(AEdge::source));
        targets.push(gl.eval(x, &gamma).vertex());
    }
    let (promoted, ids) = core.promote(&targets);
    let ends = points
        .iter()
        .map(|x| core.translate(&promoted, &ids, &gl.eval(x, &gamma)).as_core().ok_or_else(|| internal("path end was not promoted")))
        .collect::<Result<Vec<_>, _>>()?;
    let pgl = promoted.globalization();
    let k = xs.len();
    let e2 = data.factor(Side::Two).identity();
    let mut next = promoted.clone();
    let mut erased = Vec::new();
    for i in 0..k {
        let (with_orbit, z) = next.with_fresh_orbit(Side::Two, Provenance::Core);
        next = with_orbit;
        for (p, img) in [(ends[i].act(c1), Point2::new(z, e2)), (ends[k + i].act(c1), Point2::new(z, c2))] {
            if next.contains_key(p.orbit, data.sigma(Side::One).rep(p.element)) {
                return Err(internal(format!("key edge at {p} is already defined")));
            }
            erased.push(format!("ERASE {p} -> {}", pgl.tau(&p.into())));
            next = next.with_entry(p, img).map_err(internal)?;
        }
    }
    let g = gamma.to_word();
    let middle = AmalgamWord::new(vec![(Side::One, c1), (Side::Two, c2), (Side::One, c1.inv())]);
    let certificate = reduce_amalgam(&g.concat(&middle).concat(&g.inverse()), &data);
    let ngl = next.globalization();
    for (x, y) in xs.iter().zip(ys) {
        if ngl.eval(&X1Point::from(*x), &certificate) != X1Point::from(*y) {
            return Err(internal(format!("certificate \"{certificate}\" does not send {x} to {y}")));
        }
    }
    Ok(KeyExtension { core: next, gamma, certificate, erased })
}

/// [`Engine`] for amalgams; demand points are core points of `X_1`.
#[derive(Debug, Clone, Copy)]
pub struct AmalgamEngine;

impl Engine for AmalgamEngine {
    type Data = AmalgamBaseData;
    type Core = PreActionAmalgam;
    type Point = Point1;
    type Word = AmalgamNormalForm;

    fn preconditions(data: &AmalgamBaseData) -> PreconditionReport {
        check_amalgam_preconditions(data)
    }

    fn config(data: &AmalgamBaseData) -> String {
        data.config()
    }

    fn initial_core(data: &AmalgamBaseData, orbits: u64) -> PreActionAmalgam {
        PreActionAmalgam::chain(data.clone(), orbits)
    }

    fn data(core: &PreActionAmalgam) -> &AmalgamBaseData {
        core.data()
    }

    fn has_orbit(core: &PreActionAmalgam, orbit: u64) -> bool {
        core.orbits(Side::One).contains_key(&orbit)
    }

    fn point_orbit(p: &Point1) -> u64 {
        p.orbit
    }

    fn parse_point(data: &AmalgamBaseData, text: &str) -> Option<Point1> {
        Point1::parse(text, data)
    }

    fn parse_word(data: &AmalgamBaseData, text: &str) -> Option<AmalgamNormalForm> {
        AmalgamWord::parse(text, data).ok().map(|w| reduce_amalgam(&w, data))
    }

    fn is_trivial(w: &AmalgamNormalForm) -> bool {
        w.is_identity()
    }

    fn enumerate(data: &AmalgamBaseData, count: usize) -> Vec<AmalgamNormalForm> {
        enumerate_nontrivial(data, count)
    }

    fn key_extend(core: &PreActionAmalgam, xs: &[Point1], ys: &[Point1], caps: &Caps) -> Result<KeyExtension<Self>, BuildError> {
        key_extend_amalgam(core, xs, ys, caps)
    }

    fn witness(core: &PreActionAmalgam, elements: &[AmalgamNormalForm], search: usize) -> Option<(PreActionAmalgam, Point1)> {
        let v = core.globalization().faithfulness_witness(elements, search)?;
        let (promoted, ids) = core.promote(&[v.vertex()]);
        let v = core.translate(&promoted, &ids, &v).as_core()?;
        Some((promoted, v))
    }

    fn eval(core: &PreActionAmalgam, x: Point1, g: &AmalgamNormalForm) -> Option<Point1> {
        core.globalization().eval(&X1Point::from(x), g).as_core()
    }

    fn freeze(core: &PreActionAmalgam, x: Point1, g: &AmalgamNormalForm) -> PreActionAmalgam {
        let (_, trace) = core.globalization().eval_trace(&x.into(), g);
        let targets: Vec<AVertex> =
            trace.iter().flat_map(|s| [s.x1.vertex(), s.x2.vertex()]).filter(|v| matches!(v.orbit, AOrbit::Copy(_))).collect();
        if targets.is_empty() {
            core.clone()
        } else {
            core.promote(&targets).0
        }
    }

    fn tau_points(core: &PreActionAmalgam, x: Point1, g: &AmalgamNormalForm) -> Option<Vec<Point1>> {
        let (_, trace) = core.globalization().eval_trace(&x.into(), g);
        trace.iter().map(|s| s.tau_point().as_core()).collect()
    }

    fn tau_image(core: &PreActionAmalgam, x: Point1) -> Option<String> {
        core.tau_eval(x).ok().map(|p| p.to_string())
    }

    fn serialize(core: &PreActionAmalgam) -> String {
        core.serialize()
    }

    fn parse_core(text: &str) -> Result<PreActionAmalgam, String> {
        PreActionAmalgam::parse(text).map_err(|e| e.to_string())
    }

    fn core_size(core: &PreActionAmalgam) -> (usize, usize) {
        (core.orbits(Side::One).len() + core.orbits(Side::Two).len(), core.len())
    }

    fn dot(core: &PreActionAmalgam, radius: usize) -> String {
        let gl = core.globalization();
        gl.window(&gl.core_vertices(), radius).to_dot("bass_serre")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_groups::{zmod_amalgam, zmod_free_product};
    use crate::ht_builder::{run_rounds, verify_certificate, Certificate, Demand, RoundsConfig};
    use crate::preaction_amalgam::sample_transitive;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z23() -> AmalgamBaseData {
        zmod_free_product(2, 3).unwrap()
    }

    fn pt(o: u64, e: i64, d: &AmalgamBaseData) -> Point1 {
        Point1::new(o, d.factor(Side::One).element(e))
    }

    #[test]
    fn central_sigma_never_separates() {
        let d = zmod_amalgam(4, 6, 2).unwrap();
        let sigma = d.sigma(Side::One).coset_reps().len() as i64;
        let sigma = d.factor(Side::One).element(sigma);
        assert!(d.sigma(Side::One).contains(sigma) && !sigma.is_identity());
        assert!(matches!(separation_search(&d, sigma, 12), Err(BuildError::CapExceeded { what: "separation", .. })));
        assert!(matches!(separation_search(&d, sigma, 0), Err(BuildError::CapExceeded { .. })));
        // and indeed no short element separates
        let start = nf(&d, vec![(Side::Two, least_nontrivial(&d, Side::Two).unwrap())]);
        for g in crate::amalgam_words::path_type_extensions(&start, Side::One, 2, &d).unwrap() {
            assert!(!separates(&d, sigma, &g));
        }
    }

    #[test]
    fn treeing_extension_examples() {
        let d = z23();
        let core = PreActionAmalgam::chain(d.clone(), 1);
        let gl = core.globalization();
        assert_eq!(find_common_treeing_extension(&gl, &[], 64).unwrap().to_string(), "2:1");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let core = sample_transitive(&d, 3, 2, 3, &mut rng);
            let gl = core.globalization();
            let pts: Vec<X1Point> = (0..3).map(|o| pt(o, rng.gen_range(0..2), &d).into()).collect();
            let g = find_common_treeing_extension(&gl, &pts, 64).unwrap();
            assert!(g.is_path_type(Side::One));
            for p in &pts {
                assert!(ends_treeing(&gl, p, &g).unwrap());
            }
            let g2 = disjoin_half_trees(&gl, &pts, &g, &Caps::default()).unwrap();
            assert!(g2.is_path_type(Side::One));
            assert_eq!(g2.syllables()[..g.len()], g.syllables()[..]);
            assert!(half_trees_disjoint(&gl, &pts, &g2).unwrap());
        }
    }

    #[test]
    fn key_extension_examples() {
        let d = z23();
        let core = PreActionAmalgam::chain(d.clone(), 2);
        let (x, y) = (pt(0, 0, &d), pt(1, 1, &d));
        let step = key_extend_amalgam(&core, &[x], &[y], &Caps::default()).unwrap();
        let cert = Certificate::Transitivity { xs: vec![x], ys: vec![y], gamma: step.certificate.clone() };
        assert!(verify_certificate::<AmalgamEngine>(&step.core, &cert));
        assert_eq!(step.certificate.len(), 2 * step.gamma.len() + 3);
        let (xs, ys) = ([pt(0, 0, &d), pt(0, 1, &d)], [pt(1, 0, &d), pt(1, 1, &d)]);
        let step = key_extend_amalgam(&core, &xs, &ys, &Caps::default()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(AmalgamEngine::eval(&step.core, *x, &step.certificate), Some(*y));
        }
        for (k, v) in core.entries() {
            assert_eq!(step.core.tau_eval(k).unwrap(), v);
        }
    }

    #[test]
    fn rounds_on_the_modular_group() {
        let d = z23();
        let demands = vec![
            Demand::Transitivity { xs: vec![pt(0, 0, &d)], ys: vec![pt(1, 1, &d)] },
            Demand::Faithfulness(AmalgamEngine::parse_word(&d, "1:1 2:1 1:1 2:2").unwrap()),
            Demand::Transitivity { xs: vec![pt(0, 0, &d), pt(1, 0, &d), pt(2, 1, &d)], ys: vec![pt(2, 0, &d), pt(0, 1, &d), pt(1, 1, &d)] },
        ];
        let out = run_rounds::<AmalgamEngine>(&d, &demands, &RoundsConfig { rounds: 3, ..Default::default() }).unwrap();
        assert!(out.error.is_none(), "{:?}", out.error);
        assert_eq!(out.state.certificates.len(), 6);
        assert!(out.all_verify());
        let err = run_rounds::<AmalgamEngine>(&zmod_amalgam(4, 6, 2).unwrap(), &[], &RoundsConfig::default()).unwrap_err();
        assert!(matches!(err, BuildError::Precondition(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn demands_are_discharged(k in 1usize..=3, rounds in 1usize..=3, seed in any::<u64>(), q in prop::sample::select(vec![3u64, 4])) {
            let d = zmod_free_product(2, q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let demands: Vec<Demand<Point1, AmalgamNormalForm>> = (0..rounds).map(|_| {
                let mut pts = BTreeSet::new();
                while pts.len() < 2 * k {
                    pts.insert(pt(rng.gen_range(0..4), rng.gen_range(0..2), &d));
                }
                let mut pts: Vec<Point1> = pts.into_iter().collect();
                for i in (1..pts.len()).rev() {
                    pts.swap(i, rng.gen_range(0..=i));
                }
                Demand::Transitivity { xs: pts[..k].to_vec(), ys: pts[k..].to_vec() }
            }).collect();
            let out = run_rounds::<AmalgamEngine>(&d, &demands, &RoundsConfig { rounds, faithful: 4, ..Default::default() }).unwrap();
            prop_assert!(out.error.is_none(), "{:?}", out.error);
            prop_assert!(out.all_verify());
            for w in out.state.history.windows(2) {
                for &p in &w[0].frozen {
                    prop_assert_eq!(AmalgamEngine::tau_image(&w[1].core, p), AmalgamEngine::tau_image(&w[0].core, p));
                }
            }
        }
    }
}
