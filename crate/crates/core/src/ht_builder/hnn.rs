//! The builder for HNN extensions.

use std::collections::BTreeSet;

use super::{check_hnn_preconditions, other_extension, BuildError, Caps, Engine, KeyExtension, PreconditionReport};
use crate::base_groups::{GroupElement, HnnBaseData};
use crate::graphs::Path;
use crate::hnn_words::{append_syllable, enumerate_nontrivial, next_syllables, reduce, HnnLetter, HnnNormalForm, HnnWord, Sign};
use crate::preaction_hnn::{GEdge, GOrbit, GPoint, LazyGlobalization, Point, PreActionHnn, Provenance};

fn internal(e: impl std::fmt::Display) -> BuildError {
    BuildError::Internal(e.to_string())
}

fn least_nontrivial(reps: Vec<GroupElement>) -> Option<GroupElement> {
    reps.into_iter().find(|c| !c.is_identity())
}

fn path_type_t(data: &HnnBaseData) -> HnnNormalForm {
    HnnNormalForm::from_syllables(vec![(data.identity(), Sign::Pos)], data.identity())
}

fn with_syllables(gamma: &HnnNormalForm, more: &[(GroupElement, Sign)]) -> HnnNormalForm {
    more.iter().fold(gamma.clone(), |g, &s| append_syllable(&g, s))
}

fn check_growth(gamma: &HnnNormalForm, base: usize, cap: usize) -> Result<(), BuildError> {
    if gamma.len() > base + cap {
        return Err(BuildError::CapExceeded { what: "extension", cap, detail: format!("gamma grew to \"{gamma}\"") });
    }
    Ok(())
}

/// Whether `s` and `1` part ways along the syllable `(c, sign)`; otherwise
/// the offset after crossing.
fn cross_offset(data: &HnnBaseData, s: GroupElement, c: GroupElement, sign: Sign) -> Option<GroupElement> {
    let s = c.inv().mul(s).mul(c);
    match sign {
        Sign::Pos => data.sigma().contains(s).then(|| data.theta().apply_unchecked(s)),
        Sign::Neg => data.theta_sigma().contains(s).then(|| data.theta().apply_inv_unchecked(s)),
    }
}

/// Shortest path-type `gamma*` (first syllable `t`) whose paths from `1` and
/// from `sigma` in the Bass-Serre tree end at distinct vertices; ties go to
/// the enumeration order of [`next_syllables`]. `cap` bounds the length.
pub fn separation_search(data: &HnnBaseData, sigma: GroupElement, cap: usize) -> Result<HnnNormalForm, BuildError> {
    if !data.sigma().contains(sigma) || sigma.is_identity() {
        return Err(BuildError::Internal(format!("separation needs a nontrivial element of Sigma, got {sigma}")));
    }
    let exhausted = || BuildError::CapExceeded { what: "separation", cap, detail: format!("no separating element for sigma={sigma}") };
    if cap == 0 {
        return Err(exhausted());
    }
    let id = data.identity();
    let first = cross_offset(data, sigma, id, Sign::Pos).expect("sigma lies in Sigma");
    // states whose prefixes have not separated, deduplicated on what decides the future
    let mut level = vec![(vec![(id, Sign::Pos)], first)];
    let mut seen: BTreeSet<(GroupElement, Sign)> = BTreeSet::from([(first, Sign::Pos)]);
    for _ in 1..cap {
        let mut next = Vec::new();
        for (syls, s) in &level {
            let prev = syls.last().map(|x| x.1);
            for (c, sign) in next_syllables(prev, data) {
                let mut ext = syls.clone();
                ext.push((c, sign));
                match cross_offset(data, *s, c, sign) {
                    None => return Ok(HnnNormalForm::from_syllables(ext, id)),
                    Some(s2) => {
                        if seen.insert((s2, sign)) {
                            next.push((ext, s2));
                        }
                    }
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

/// `gamma^-1 sigma gamma` lies outside `H`, i.e. the two ranges differ.
pub fn separates(data: &HnnBaseData, sigma: GroupElement, gamma: &HnnNormalForm) -> bool {
    let w = gamma.to_word().inverse().concat(&HnnWord::new(vec![HnnLetter::Base(sigma)])).concat(&gamma.to_word());
    !reduce(&w, data).is_empty()
}

/// Seeds of the analysis window: the core and every vertex on `path`.
fn analysis_seeds(gl: &LazyGlobalization<'_>, path: &[GEdge]) -> Vec<GOrbit> {
    let mut seeds: Vec<GOrbit> = gl.base().orbits().keys().map(|&o| GOrbit::Core(o)).collect();
    seeds.extend(path.iter().map(|e| e.orbit.clone()));
    if let Some(e) = path.last() {
        seeds.push(gl.range(e));
    }
    seeds
}

fn path_of(gl: &LazyGlobalization<'_>, x: &GPoint, gamma: &HnnNormalForm) -> Result<Vec<GEdge>, BuildError> {
    gl.path(x, gamma).map_err(internal)
}

/// Whether the last edge of `path_x(gamma)` is a treeing edge, decided on
/// the radius-1 ball around the core and the path.
pub fn ends_treeing(gl: &LazyGlobalization<'_>, x: &GPoint, gamma: &HnnNormalForm) -> Result<bool, BuildError> {
    let path = path_of(gl, x, gamma)?;
    let w = gl.window(&analysis_seeds(gl, &path), 1);
    let last = w.edge_id(path.last().expect("path-type paths are nonempty")).ok_or_else(|| internal("path edge outside its window"))?;
    w.graph.is_treeing_edge(last).map_err(internal)
}

/// A path-type element whose paths from every point of `points` end in a
/// treeing edge; starts from `t` and extends one point at a time.
pub fn find_common_treeing_extension(gl: &LazyGlobalization<'_>, points: &[GPoint], cap: usize) -> Result<HnnNormalForm, BuildError> {
    let data = gl.base().data();
    let mut gamma = path_type_t(data);
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
            let edges: Vec<GEdge> = ext.edges.iter().map(|&e| w.edge(e).clone()).collect();
            let (syllables, _) = gl.syllables_along(x, &edges).map_err(internal)?;
            gamma = HnnNormalForm::from_syllables(syllables, data.identity());
            check_growth(&gamma, base, cap)?;
            changed = true;
        }
        if !changed {
            return Ok(gamma);
        }
    }
}

/// Every end edge leaves a copy vertex, and no end edge lies on another
/// point's path: then the half-trees are pairwise disjoint and miss the core.
pub fn half_trees_disjoint(gl: &LazyGlobalization<'_>, points: &[GPoint], gamma: &HnnNormalForm) -> Result<bool, BuildError> {
    let paths = points.iter().map(|x| path_of(gl, x, gamma)).collect::<Result<Vec<_>, _>>()?;
    for (i, p) in paths.iter().enumerate() {
        let last = p.last().expect("nonempty");
        if gl.is_core(&last.orbit) {
            return Ok(false);
        }
        if paths.iter().enumerate().any(|(j, q)| j != i && q.contains(last)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extend `gamma` (from [`find_common_treeing_extension`]) until the end
/// half-trees of all `points` are pairwise disjoint and miss the core.
pub fn disjoin_half_trees(gl: &LazyGlobalization<'_>, points: &[GPoint], gamma: &HnnNormalForm, caps: &Caps) -> Result<HnnNormalForm, BuildError> {
    let data = gl.base().data();
    let mut gamma = gamma.clone();
    let base = gamma.len();
    let first_legal = |g: &HnnNormalForm| next_syllables(g.syllables().last().map(|s| s.1), data)[0];
    // leave the core
    while points.iter().map(|x| path_of(gl, x, &gamma)).collect::<Result<Vec<_>, _>>()?.iter().any(|p| gl.is_core(&p.last().expect("nonempty").orbit)) {
        gamma = append_syllable(&gamma, first_legal(&gamma));
        check_growth(&gamma, base, caps.extension)?;
    }
    let c = least_nontrivial(data.coset_reps_pos()).ok_or_else(|| internal("Sigma = H"))?;
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
                    // the half-tree of x sits strictly inside that of y: send y elsewhere
                    let yp = gl.eval(&points[j], &gamma);
                    let (delta, _) = gl.syllables_along(&yp, &px[pos + 1..]).map_err(internal)?;
                    let last = *gamma.syllables().last().expect("nonempty");
                    let alt = other_extension(last, &delta, |prev| next_syllables(Some(prev.1), data))
                        .ok_or_else(|| internal("no alternative extension"))?;
                    gamma = with_syllables(&gamma, &alt);
                } else {
                    let xp = gl.eval(&points[i], &gamma).act(c);
                    let yp = gl.eval(&points[j], &gamma).act(c);
                    let stepped = append_syllable(&gamma, (c, Sign::Pos));
                    if gl.edge_at(&xp, Sign::Pos) != gl.edge_at(&yp, Sign::Pos) {
                        gamma = stepped;
                    } else {
                        let sigma = xp.element.inv().mul(yp.element);
                        let star = separation_search(data, sigma, caps.separation)?;
                        gamma = with_syllables(&stepped, &star.syllables()[1..]);
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

fn check_demand(core: &PreActionHnn, xs: &[Point], ys: &[Point]) -> Result<(), BuildError> {
    super::Demand::<Point, HnnNormalForm>::Transitivity { xs: xs.to_vec(), ys: ys.to_vec() }.validate()?;
    for p in xs.iter().chain(ys) {
        if !core.orbits().contains_key(&p.orbit) || p.element.group() != core.data().base() {
            return Err(BuildError::BadDemand(format!("{p} is not a point of the core")));
        }
    }
    Ok(())
}

/// One key extension step: returns the new core and the element
/// `gamma c t c- (gamma c t)^-1` sending each `x_i` to `y_i`.
pub fn key_extend_hnn(core: &PreActionHnn, xs: &[Point], ys: &[Point], caps: &Caps) -> Result<KeyExtension<HnnEngine>, BuildError> {
    check_demand(core, xs, ys)?;
    let data = core.data().clone();
    let c = least_nontrivial(data.coset_reps_pos()).ok_or_else(|| internal("Sigma = H"))?;
    let cm = least_nontrivial(data.coset_reps_neg()).ok_or_else(|| internal("theta(Sigma) = H"))?;
    let points: Vec<GPoint> = xs.iter().chain(ys).map(|&p| p.into()).collect();
    let gl = core.globalization();
    let gamma = find_common_treeing_extension(&gl, &points, caps.extension)?;
    let gamma = disjoin_half_trees(&gl, &points, &gamma, caps)?;

    let mut targets = Vec::new();
    for x in &points {
        targets.extend(path_of(&gl, x, &gamma)?.into_iter().map(|e| e.orbit));
        targets.push(gl.eval(x, &gamma).orbit);
    }
    let (promoted, ids) = core.promote(&targets);
    let ends = points
        .iter()
        .map(|x| core.translate(&promoted, &ids, &gl.eval(x, &gamma)).as_core().ok_or_else(|| internal("path end was not promoted")))
        .collect::<Result<Vec<_>, _>>()?;
    let pgl = promoted.globalization();
    let k = xs.len();
    let mut next = promoted.clone();
    let mut erased = Vec::new();
    for i in 0..k {
        let (with_orbit, z) = next.with_fresh_orbit(Provenance::Core);
        next = with_orbit;
        for (p, img) in [(ends[i].act(c), Point::new(z, data.identity())), (ends[k + i].act(c), Point::new(z, cm))] {
            if next.contains_key(p.orbit, data.sigma().rep(p.element)) {
                return Err(internal(format!("key edge at {p} is already defined")));
            }
            erased.push(format!("ERASE {p} -> {}", pgl.tau(&p.into())));
            next = next.with_entry(p, img).map_err(internal)?;
        }
    }
    let gct = append_syllable(&gamma, (c, Sign::Pos)).to_word();
    let certificate = reduce(&gct.concat(&HnnWord::new(vec![HnnLetter::Base(cm)])).concat(&gct.inverse()), &data);
    let ngl = next.globalization();
    for (x, y) in xs.iter().zip(ys) {
        if ngl.eval(&(*x).into(), &certificate) != (*y).into() {
            return Err(internal(format!("certificate \"{certificate}\" does not send {x} to {y}")));
        }
    }
    Ok(KeyExtension { core: next, gamma, certificate, erased })
}

/// [`Engine`] for HNN extensions; demand points are core points.
#[derive(Debug, Clone, Copy)]
pub struct HnnEngine;

impl Engine for HnnEngine {
    type Data = HnnBaseData;
    type Core = PreActionHnn;
    type Point = Point;
    type Word = HnnNormalForm;

    fn preconditions(data: &HnnBaseData) -> PreconditionReport {
        check_hnn_preconditions(data)
    }

    fn config(data: &HnnBaseData) -> String {
        data.config()
    }

    fn initial_core(data: &HnnBaseData, orbits: u64) -> PreActionHnn {
        PreActionHnn::chain(data.clone(), orbits)
    }

    fn data(core: &PreActionHnn) -> &HnnBaseData {
        core.data()
    }

    fn has_orbit(core: &PreActionHnn, orbit: u64) -> bool {
        core.orbits().contains_key(&orbit)
    }

    fn point_orbit(p: &Point) -> u64 {
        p.orbit
    }

    fn parse_point(data: &HnnBaseData, text: &str) -> Option<Point> {
        Point::parse(text, data)
    }

    fn parse_word(data: &HnnBaseData, text: &str) -> Option<HnnNormalForm> {
        HnnWord::parse(text, data).ok().map(|w| reduce(&w, data))
    }

    fn is_trivial(w: &HnnNormalForm) -> bool {
        w.is_identity()
    }

    fn enumerate(data: &HnnBaseData, count: usize) -> Vec<HnnNormalForm> {
        enumerate_nontrivial(data, count)
    }

    fn key_extend(core: &PreActionHnn, xs: &[Point], ys: &[Point], caps: &Caps) -> Result<KeyExtension<Self>, BuildError> {
        key_extend_hnn(core, xs, ys, caps)
    }

    fn witness(core: &PreActionHnn, elements: &[HnnNormalForm], search: usize) -> Option<(PreActionHnn, Point)> {
        let v = core.globalization().faithfulness_witness(elements, search)?;
        let (promoted, ids) = core.promote(std::slice::from_ref(&v.orbit));
        let v = core.translate(&promoted, &ids, &v).as_core()?;
        Some((promoted, v))
    }

    fn eval(core: &PreActionHnn, x: Point, g: &HnnNormalForm) -> Option<Point> {
        core.globalization().eval(&x.into(), g).as_core()
    }

    fn freeze(core: &PreActionHnn, x: Point, g: &HnnNormalForm) -> PreActionHnn {
        let (_, trace) = core.globalization().eval_trace(&x.into(), g);
        let targets: Vec<GOrbit> = trace.iter().flat_map(|s| [s.argument.orbit.clone(), s.result.orbit.clone()]).filter(|o| matches!(o, GOrbit::Copy(_))).collect();
        if targets.is_empty() {
            core.clone()
        } else {
            core.promote(&targets).0
        }
    }

    fn tau_points(core: &PreActionHnn, x: Point, g: &HnnNormalForm) -> Option<Vec<Point>> {
        let (_, trace) = core.globalization().eval_trace(&x.into(), g);
        trace.iter().map(|s| s.tau_point().as_core()).collect()
    }

    fn tau_image(core: &PreActionHnn, x: Point) -> Option<String> {
        core.tau_eval(x).ok().map(|p| p.to_string())
    }

    fn serialize(core: &PreActionHnn) -> String {
        core.serialize()
    }

    fn parse_core(text: &str) -> Result<PreActionHnn, String> {
        PreActionHnn::parse(text).map_err(|e| e.to_string())
    }

    fn core_size(core: &PreActionHnn) -> (usize, usize) {
        (core.orbits().len(), core.len())
    }

    fn dot(core: &PreActionHnn, radius: usize) -> String {
        let seeds: Vec<GOrbit> = core.orbits().keys().map(|&o| GOrbit::Core(o)).collect();
        core.globalization().window(&seeds, radius).to_dot("bass_serre")
    }
}
