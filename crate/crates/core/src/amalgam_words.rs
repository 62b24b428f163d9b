//! Words and normal forms in `Gamma_1 *_Sigma Gamma_2`.
//!
//! A normal form is `c_1 ... c_n s`: the `c_i` alternate between `C_1 - {1}`
//! and `C_2 - {1}`, and `s` lies in `Sigma`, stored in `Sigma_1` coordinates.

use std::fmt;

use crate::base_groups::{AmalgamBaseData, GroupElement, Side};
use crate::hnn_words::{PinchOrder, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AmalgamWord {
    pub letters: Vec<(Side, GroupElement)>,
}

impl AmalgamWord {
    pub fn new(letters: Vec<(Side, GroupElement)>) -> Self {
        AmalgamWord { letters }
    }

    pub fn concat(&self, other: &AmalgamWord) -> AmalgamWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        AmalgamWord { letters }
    }

    pub fn inverse(&self) -> AmalgamWord {
        AmalgamWord { letters: self.letters.iter().rev().map(|&(s, g)| (s, g.inv())).collect() }
    }

    /// Parse `1:k` / `2:k` tokens; a bare `1` is the empty word.
    pub fn parse(text: &str, data: &AmalgamBaseData) -> Result<AmalgamWord, WordError> {
        let mut letters = Vec::new();
        for (position, tok) in text.split_whitespace().enumerate() {
            if tok == "1" {
                continue;
            }
            let err = |reason: &str| WordError::Parse {
                position,
                token: tok.to_string(),
                reason: reason.to_string(),
            };
            let (side, k) = tok.split_once(':').ok_or_else(|| err("expected <side>:<int>"))?;
            let side = match side {
                "1" => Side::One,
                "2" => Side::Two,
                _ => return Err(err("side must be 1 or 2")),
            };
            let k: i64 = k.parse().map_err(|_| err("bad integer"))?;
            letters.push((side, data.factor(side).element(k)));
        }
        Ok(AmalgamWord { letters })
    }
}

impl fmt::Display for AmalgamWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.letters.iter().map(|(s, g)| format!("{s}:{g}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmalgamNormalForm {
    syllables: Vec<(Side, GroupElement)>,
    tail: GroupElement,
}

impl AmalgamNormalForm {
    pub fn identity(data: &AmalgamBaseData) -> Self {
        AmalgamNormalForm { syllables: Vec::new(), tail: data.factor(Side::One).identity() }
    }

    pub fn syllables(&self) -> &[(Side, GroupElement)] {
        &self.syllables
    }

    pub fn tail(&self) -> GroupElement {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty() && self.tail.is_identity()
    }

    pub fn to_word(&self) -> AmalgamWord {
        let mut letters = self.syllables.clone();
        if !self.tail.is_identity() {
            letters.push((Side::One, self.tail));
        }
        AmalgamWord { letters }
    }

    /// Path-type for `side`: tail trivial, first syllable from the other
    /// factor, odd length.
    pub fn is_path_type(&self, side: Side) -> bool {
        self.tail.is_identity()
            && self.syllables.len() % 2 == 1
            && self.syllables.first().map(|s| s.0) == Some(side.other())
    }

    pub fn is_normal(&self, data: &AmalgamBaseData) -> bool {
        if !data.sigma(Side::One).contains(self.tail) {
            return false;
        }
        let mut prev = None;
        for &(s, c) in &self.syllables {
            if prev == Some(s) || c.group() != data.factor(s) || c.is_identity() || data.sigma(s).rep(c) != c {
                return false;
            }
            prev = Some(s);
        }
        true
    }

    pub(crate) fn from_syllables(syllables: Vec<(Side, GroupElement)>, tail: GroupElement) -> Self {
        AmalgamNormalForm { syllables, tail }
    }
}

impl fmt::Display for AmalgamNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

/// Merged word `s0 g_1 ... g_k s_end` with the `g_i` outside `Sigma` and
/// alternating; `s0`, `s_end` in `Sigma_1` coordinates.
struct Merged {
    s0: GroupElement,
    gs: Vec<(Side, GroupElement)>,
    s_end: GroupElement,
}

fn to_side1(data: &AmalgamBaseData, side: Side, s: GroupElement) -> GroupElement {
    match side {
        Side::One => s,
        Side::Two => data.theta().apply_inv_unchecked(s),
    }
}

fn from_side1(data: &AmalgamBaseData, side: Side, s: GroupElement) -> GroupElement {
    match side {
        Side::One => s,
        Side::Two => data.theta().apply_unchecked(s),
    }
}

/// Push `g` onto a reduced stack. `right` says whether the stack grows to the
/// right (left scan) or to the left (mirrored scan). Returns an element of
/// `Sigma_1` that fell off the end of an emptied stack.
fn push_letter(
    stack: &mut Vec<(Side, GroupElement)>,
    side: Side,
    g: GroupElement,
    right: bool,
    data: &AmalgamBaseData,
) -> Option<GroupElement> {
    let combine = |top: GroupElement, g: GroupElement| if right { top.mul(g) } else { g.mul(top) };
    let (mut side, mut g) = (side, g);
    loop {
        if g.is_identity() {
            return None;
        }
        let top = match stack.last() {
            None => {
                if data.sigma(side).contains(g) {
                    return Some(to_side1(data, side, g));
                }
                stack.push((side, g));
                return None;
            }
            Some(&t) => t,
        };
        if top.0 != side {
            if data.sigma(side).contains(g) {
                // absorb a Sigma letter into the neighbouring syllable
                g = from_side1(data, top.0, to_side1(data, side, g));
                side = top.0;
            } else {
                stack.push((side, g));
                return None;
            }
        }
        let merged = combine(top.1, g);
        stack.pop();
        if merged.is_identity() {
            return None;
        }
        if data.sigma(side).contains(merged) && !stack.is_empty() {
            // the merged letter lies in Sigma: feed it to the next syllable
            g = merged;
            continue;
        }
        if data.sigma(side).contains(merged) {
            return Some(to_side1(data, side, merged));
        }
        stack.push((side, merged));
        return None;
    }
}

fn merge(w: &AmalgamWord, data: &AmalgamBaseData, order: PinchOrder) -> Merged {
    let id = data.factor(Side::One).identity();
    let mut stack = Vec::new();
    let mut spill = id;
    match order {
        PinchOrder::LeftmostFirst => {
            for &(s, g) in &w.letters {
                if let Some(x) = push_letter(&mut stack, s, g, true, data) {
                    // lands at the very front, right after earlier spill
                    spill = spill.mul(x);
                }
            }
            Merged { s0: spill, gs: stack, s_end: id }
        }
        PinchOrder::RightmostFirst => {
            for &(s, g) in w.letters.iter().rev() {
                if let Some(x) = push_letter(&mut stack, s, g, false, data) {
                    spill = x.mul(spill);
                }
            }
            stack.reverse();
            Merged { s0: id, gs: stack, s_end: spill }
        }
    }
}

fn normalize(m: Merged, data: &AmalgamBaseData) -> AmalgamNormalForm {
    let mut carry = m.s0;
    let mut syllables = Vec::with_capacity(m.gs.len());
    for (side, g) in m.gs {
        let h = from_side1(data, side, carry).mul(g);
        let (c, s) = data.sigma(side).decompose_unchecked(h);
        syllables.push((side, c));
        carry = to_side1(data, side, s);
    }
    AmalgamNormalForm { syllables, tail: carry.mul(m.s_end) }
}

pub fn reduce_amalgam(w: &AmalgamWord, data: &AmalgamBaseData) -> AmalgamNormalForm {
    reduce_amalgam_with(w, data, PinchOrder::LeftmostFirst)
}

pub fn reduce_amalgam_with(w: &AmalgamWord, data: &AmalgamBaseData, order: PinchOrder) -> AmalgamNormalForm {
    normalize(merge(w, data, order), data)
}

fn check(a: &AmalgamNormalForm, data: &AmalgamBaseData) -> Result<(), WordError> {
    if a.tail.group() == data.factor(Side::One) {
        Ok(())
    } else {
        Err(WordError::PresentationMismatch)
    }
}

pub fn multiply(a: &AmalgamNormalForm, b: &AmalgamNormalForm, data: &AmalgamBaseData) -> Result<AmalgamNormalForm, WordError> {
    check(a, data)?;
    check(b, data)?;
    Ok(reduce_amalgam(&a.to_word().concat(&b.to_word()), data))
}

pub fn invert(a: &AmalgamNormalForm, data: &AmalgamBaseData) -> Result<AmalgamNormalForm, WordError> {
    check(a, data)?;
    Ok(reduce_amalgam(&a.to_word().inverse(), data))
}

pub fn equal(a: &AmalgamNormalForm, b: &AmalgamNormalForm, data: &AmalgamBaseData) -> Result<bool, WordError> {
    check(a, data)?;
    check(b, data)?;
    Ok(a == b)
}

/// Syllables that may follow a syllable on `prev`, in enumeration order.
pub fn next_syllables(prev: Side, data: &AmalgamBaseData) -> Vec<(Side, GroupElement)> {
    let side = prev.other();
    data.coset_reps(side).into_iter().filter(|c| !c.is_identity()).map(|c| (side, c)).collect()
}

/// Append syllables to a tail-free normal form (no reduction needed when the
/// sides alternate).
pub fn append_syllables(a: &AmalgamNormalForm, syls: &[(Side, GroupElement)]) -> AmalgamNormalForm {
    let mut syllables = a.syllables.clone();
    syllables.extend_from_slice(syls);
    AmalgamNormalForm { syllables, tail: a.tail }
}

/// Path-type elements for `side` extending `a` by at most `depth` pairs of
/// syllables, by length and then lexicographically; `a` comes first.
pub fn path_type_extensions(
    a: &AmalgamNormalForm,
    side: Side,
    depth: usize,
    data: &AmalgamBaseData,
) -> Result<Vec<AmalgamNormalForm>, WordError> {
    if !a.is_path_type(side) {
        return Err(WordError::NotPathType(a.to_string()));
    }
    let mut out = vec![a.clone()];
    let mut level = vec![a.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for g in &level {
            let last = g.syllables.last().expect("path-type is nonempty").0;
            for s1 in next_syllables(last, data) {
                for s2 in next_syllables(s1.0, data) {
                    next.push(append_syllables(g, &[s1, s2]));
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    Ok(out)
}

/// Factor generators and their inverses, side 1 first.
pub fn generators(data: &AmalgamBaseData) -> Vec<(Side, GroupElement)> {
    let mut out = Vec::new();
    for side in [Side::One, Side::Two] {
        let g = data.factor(side).element(1);
        if !g.is_identity() {
            out.push((side, g));
            if g.inv() != g {
                out.push((side, g.inv()));
            }
        }
    }
    out
}

/// The first `count` distinct nontrivial elements by word length over
/// [`generators`], then lexicographically.
pub fn enumerate_nontrivial(data: &AmalgamBaseData, count: usize) -> Vec<AmalgamNormalForm> {
    let gens = generators(data);
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(AmalgamNormalForm::identity(data));
    let mut out = Vec::new();
    let mut level = vec![AmalgamWord::default()];
    while out.len() < count && !level.is_empty() {
        let mut next = Vec::new();
        for w in &level {
            for &g in &gens {
                let mut letters = w.letters.clone();
                letters.push(g);
                let w2 = AmalgamWord::new(letters);
                let nf = reduce_amalgam(&w2, data);
                // only first (hence geodesic) words extend: the
                // lexicographically first geodesic of an element has the
                // same property for its prefix
                if seen.insert(nf.clone()) {
                    out.push(nf);
                    if out.len() == count {
                        return out;
                    }
                    next.push(w2);
                }
            }
        }
        level = next;
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::base_groups::{zmod_amalgam, zmod_free_product};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Oracle: random local moves (merge neighbours, drop identities, absorb
    /// a Sigma letter into a random neighbour) until none apply.
    pub(crate) fn oracle_reduce(w: &AmalgamWord, data: &AmalgamBaseData, seed: u64) -> AmalgamNormalForm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut l = w.letters.clone();
        loop {
            let mut moves: Vec<(usize, u8)> = Vec::new();
            for i in 0..l.len() {
                if l[i].1.is_identity() {
                    moves.push((i, 0));
                }
                if i + 1 < l.len() && l[i].0 == l[i + 1].0 {
                    moves.push((i, 1));
                }
                if l.len() > 1 && data.sigma(l[i].0).contains(l[i].1) && !l[i].1.is_identity() {
                    if i > 0 {
                        moves.push((i, 2));
                    }
                    if i + 1 < l.len() {
                        moves.push((i, 3));
                    }
                }
            }
            if moves.is_empty() {
                break;
            }
            let (i, kind) = moves[rng.gen_range(0..moves.len())];
            match kind {
                0 => {
                    l.remove(i);
                }
                1 => {
                    let g = l.remove(i + 1).1;
                    l[i].1 = l[i].1.mul(g);
                }
                2 => {
                    let (s, g) = l.remove(i);
                    let t = l[i - 1].0;
                    let g = from_side1(data, t, to_side1(data, s, g));
                    l[i - 1].1 = l[i - 1].1.mul(g);
                }
                _ => {
                    let (s, g) = l.remove(i);
                    let t = l[i].0;
                    let g = from_side1(data, t, to_side1(data, s, g));
                    l[i].1 = g.mul(l[i].1);
                }
            }
        }
        let id = data.factor(Side::One).identity();
        let m = match l.as_slice() {
            [(s, g)] if data.sigma(*s).contains(*g) => Merged { s0: to_side1(data, *s, *g), gs: vec![], s_end: id },
            _ => Merged { s0: id, gs: l, s_end: id },
        };
        normalize(m, data)
    }

    fn w(s: &str, d: &AmalgamBaseData) -> AmalgamWord {
        AmalgamWord::parse(s, d).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let d = zmod_free_product(2, 3).unwrap();
        assert!(reduce_amalgam(&w("1:1 1:1", &d), &d).is_identity());
        let nf = reduce_amalgam(&w("1:1 2:1 2:2", &d), &d);
        assert_eq!(nf.to_string(), "1:1");
        for seed in 0..10 {
            assert_eq!(oracle_reduce(&w("1:1 2:1 2:2", &d), &d, seed), nf);
        }
        let nf = reduce_amalgam(&w("1:1 2:1", &d), &d);
        assert_eq!(nf.syllables().len(), 2);
        assert!(nf.tail().is_identity());
    }

    #[test]
    fn multiply_examples() {
        let d = zmod_free_product(2, 3).unwrap();
        let ab = reduce_amalgam(&w("1:1 2:1", &d), &d);
        assert!(multiply(&ab, &invert(&ab, &d).unwrap(), &d).unwrap().is_identity());
        let abab = multiply(&ab, &ab, &d).unwrap();
        assert_eq!(abab.to_string(), "1:1 2:1 1:1 2:1");
        assert_eq!(abab, oracle_reduce(&w("1:1 2:1 1:1 2:1", &d), &d, 3));
        let left = multiply(&multiply(&ab, &ab, &d).unwrap(), &ab, &d).unwrap();
        let right = multiply(&ab, &multiply(&ab, &ab, &d).unwrap(), &d).unwrap();
        assert!(equal(&left, &right, &d).unwrap());
    }

    #[test]
    fn synthetic_nontrivial_sigma() {
        // Z/4 *_{2Z/4} Z/4 with theta = id
        let d = zmod_amalgam(4, 4, 2).unwrap();
        let nf = reduce_amalgam(&w("1:1 2:2 1:1", &d), &d);
        // 2:2 lies in Sigma, so the word collapses to 1:(1+2+1) = 1:0
        assert!(nf.is_identity());
        let nf = reduce_amalgam(&w("1:3 2:1", &d), &d);
        // 1:3 = 1:1 * 1:2 and 1:2 passes through to the second factor
        assert_eq!(nf.to_string(), "1:1 2:1 1:2");
        assert_eq!(nf.tail().value(), 2);
        assert!(nf.is_normal(&d));
    }

    #[test]
    fn path_type_examples() {
        let d = zmod_free_product(2, 3).unwrap();
        assert!(reduce_amalgam(&w("2:1", &d), &d).is_path_type(Side::One));
        assert!(!reduce_amalgam(&w("2:1 1:1", &d), &d).is_path_type(Side::One));
        assert!(!AmalgamNormalForm::identity(&d).is_path_type(Side::One));
        assert!(reduce_amalgam(&w("1:1", &d), &d).is_path_type(Side::Two));
        let b = reduce_amalgam(&w("2:1", &d), &d);
        let ext = path_type_extensions(&b, Side::One, 1, &d).unwrap();
        // (Z/2 - 1) x (Z/3 - 1) = 2 two-syllable continuations
        assert_eq!(ext.len(), 3);
    }

    #[test]
    fn nondegeneracy_matches_index_counts() {
        for (p, q) in [(2, 2), (2, 3), (3, 3), (2, 5), (1, 3)] {
            let d = zmod_free_product(p, q).unwrap();
            let expect = p >= 2 && q >= 2 && (p >= 3 || q >= 3);
            assert_eq!(d.is_nondegenerate(), expect, "Z/{p} * Z/{q}");
        }
    }

    #[test]
    fn enumeration() {
        let d = zmod_free_product(2, 3).unwrap();
        let first: Vec<_> = enumerate_nontrivial(&d, 5).iter().map(|g| g.to_string()).collect();
        assert_eq!(first, ["1:1", "2:1", "2:2", "1:1 2:1", "1:1 2:2"]);
    }

    fn arb(max_len: usize) -> impl Strategy<Value = Vec<(bool, i64)>> {
        prop::collection::vec((any::<bool>(), 0i64..6), 0..=max_len)
    }

    fn build(spec: &[(bool, i64)], d: &AmalgamBaseData) -> AmalgamWord {
        AmalgamWord::new(
            spec.iter()
                .map(|&(s, v)| {
                    let side = if s { Side::One } else { Side::Two };
                    (side, d.factor(side).element(v))
                })
                .collect(),
        )
    }

    proptest! {
        #[test]
        fn strategies_agree(spec in arb(20), seed in any::<u64>(), which in 0usize..3) {
            let d = [zmod_free_product(2, 3), zmod_free_product(3, 3), zmod_amalgam(4, 4, 2)][which].clone().unwrap();
            let word = build(&spec, &d);
            let l = reduce_amalgam_with(&word, &d, PinchOrder::LeftmostFirst);
            let r = reduce_amalgam_with(&word, &d, PinchOrder::RightmostFirst);
            prop_assert_eq!(&l, &r);
            prop_assert_eq!(&l, &oracle_reduce(&word, &d, seed));
            prop_assert!(l.is_normal(&d));
            prop_assert_eq!(reduce_amalgam(&l.to_word(), &d), l.clone());
            prop_assert!(multiply(&l, &invert(&l, &d).unwrap(), &d).unwrap().is_identity());
        }
    }
}
