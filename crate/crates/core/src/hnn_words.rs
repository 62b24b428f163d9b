//! Words and normal forms in `HNN(H, Sigma, theta)`, with relation
//! `t^-1 s t = theta(s)` for `s` in `Sigma`.
//!
//! A normal form is `c_1 t^e_1 ... c_n t^e_n h` with `c_i` in `C+` when
//! `e_i = +1`, in `C-` when `e_i = -1`, and no `t^e 1 t^-e`.

use std::fmt;

use thiserror::Error;

use crate::base_groups::{GroupElement, HnnBaseData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("parse error at token {position} ({token:?}): {reason}")]
    Parse { position: usize, token: String, reason: String },
    #[error("element does not belong to this presentation")]
    PresentationMismatch,
    #[error("{0} is not a path-type element")]
    NotPathType(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HnnLetter {
    Base(GroupElement),
    Stable(Sign),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HnnWord {
    pub letters: Vec<HnnLetter>,
}

impl HnnWord {
    pub fn new(letters: Vec<HnnLetter>) -> Self {
        HnnWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &HnnWord) -> HnnWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        HnnWord { letters }
    }

    pub fn inverse(&self) -> HnnWord {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| match *l {
                HnnLetter::Base(h) => HnnLetter::Base(h.inv()),
                HnnLetter::Stable(s) => HnnLetter::Stable(s.flip()),
            })
            .collect();
        HnnWord { letters }
    }

    /// Parse `t`, `T` and `h<k>` tokens; `1` denotes the empty word.
    pub fn parse(text: &str, data: &HnnBaseData) -> Result<HnnWord, WordError> {
        let mut letters = Vec::new();
        for (position, tok) in text.split_whitespace().enumerate() {
            let err = |reason: &str| WordError::Parse {
                position,
                token: tok.to_string(),
                reason: reason.to_string(),
            };
            match tok {
                "t" => letters.push(HnnLetter::Stable(Sign::Pos)),
                "T" => letters.push(HnnLetter::Stable(Sign::Neg)),
                "1" => {}
                _ => {
                    let k = tok
                        .strip_prefix('h')
                        .ok_or_else(|| err("expected t, T, 1 or h<int>"))?
                        .parse::<i64>()
                        .map_err(|_| err("bad integer after h"))?;
                    letters.push(HnnLetter::Base(data.element(k)));
                }
            }
        }
        Ok(HnnWord { letters })
    }
}

impl fmt::Display for HnnWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match l {
                HnnLetter::Base(h) => write!(f, "h{h}")?,
                HnnLetter::Stable(Sign::Pos) => write!(f, "t")?,
                HnnLetter::Stable(Sign::Neg) => write!(f, "T")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HnnNormalForm {
    syllables: Vec<(GroupElement, Sign)>,
    tail: GroupElement,
}

impl HnnNormalForm {
    pub fn identity(data: &HnnBaseData) -> Self {
        HnnNormalForm { syllables: Vec::new(), tail: data.identity() }
    }

    pub fn from_base(h: GroupElement) -> Self {
        HnnNormalForm { syllables: Vec::new(), tail: h }
    }

    pub fn syllables(&self) -> &[(GroupElement, Sign)] {
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

    pub fn to_word(&self) -> HnnWord {
        let mut letters = Vec::with_capacity(2 * self.syllables.len() + 1);
        for &(c, s) in &self.syllables {
            letters.push(HnnLetter::Base(c));
            letters.push(HnnLetter::Stable(s));
        }
        letters.push(HnnLetter::Base(self.tail));
        HnnWord { letters }
    }

    /// The coset `gamma H`, i.e. the syllables without the tail.
    pub fn coset(&self) -> &[(GroupElement, Sign)] {
        &self.syllables
    }

    /// `Some(sign of the first stable letter)` iff `c_1 = 1`, tail `= 1` and `n >= 1`.
    pub fn is_path_type(&self) -> Option<Sign> {
        match self.syllables.first() {
            Some(&(c, s)) if c.is_identity() && self.tail.is_identity() => Some(s),
            _ => None,
        }
    }

    /// Unchecked constructor for callers that keep the invariants themselves.
    pub(crate) fn from_syllables(syllables: Vec<(GroupElement, Sign)>, tail: GroupElement) -> Self {
        HnnNormalForm { syllables, tail }
    }

    /// Build directly from parts, checking the normal form conditions.
    pub fn from_parts(
        syllables: Vec<(GroupElement, Sign)>,
        tail: GroupElement,
        data: &HnnBaseData,
    ) -> Result<Self, WordError> {
        let nf = HnnNormalForm { syllables, tail };
        if nf.is_normal(data) {
            Ok(nf)
        } else {
            Err(WordError::PresentationMismatch)
        }
    }

    /// Whether the stored data satisfies every normal form condition.
    pub fn is_normal(&self, data: &HnnBaseData) -> bool {
        if self.tail.group() != data.base() {
            return false;
        }
        let mut prev: Option<Sign> = None;
        for &(c, s) in &self.syllables {
            let sub = match s {
                Sign::Pos => data.sigma(),
                Sign::Neg => data.theta_sigma(),
            };
            if c.group() != data.base() || sub.rep(c) != c {
                return false;
            }
            if prev == Some(s.flip()) && c.is_identity() {
                return false;
            }
            prev = Some(s);
        }
        true
    }
}

impl fmt::Display for HnnNormalForm {
    /// Every `c_i` is printed (including `h0`); the tail only when nontrivial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for &(c, s) in &self.syllables {
            parts.push(format!("h{c}"));
            parts.push(if s == Sign::Pos { "t".into() } else { "T".into() });
        }
        if !self.tail.is_identity() {
            parts.push(format!("h{}", self.tail));
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Pinch elimination order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinchOrder {
    LeftmostFirst,
    RightmostFirst,
}

/// `h_0 t^e_1 h_1 ... t^e_k h_k` with adjacent base letters merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Segments {
    pub hs: Vec<GroupElement>,
    pub ts: Vec<Sign>,
}

impl Segments {
    pub fn from_word(w: &HnnWord, data: &HnnBaseData) -> Self {
        let mut hs = vec![data.identity()];
        let mut ts = Vec::new();
        for l in &w.letters {
            match *l {
                HnnLetter::Base(h) => {
                    let last = hs.last_mut().expect("nonempty");
                    *last = last.mul(h);
                }
                HnnLetter::Stable(s) => {
                    ts.push(s);
                    hs.push(data.identity());
                }
            }
        }
        Segments { hs, ts }
    }

    /// Whether `t^left g t^-left` is a pinch, and its replacement.
    pub fn pinch(left: Sign, g: GroupElement, data: &HnnBaseData) -> Option<GroupElement> {
        match left {
            // t g t^-1 with g in theta(Sigma) equals theta^-1(g)
            Sign::Pos => data.theta_sigma().contains(g).then(|| data.theta().apply_inv_unchecked(g)),
            // t^-1 g t with g in Sigma equals theta(g)
            Sign::Neg => data.sigma().contains(g).then(|| data.theta().apply_unchecked(g)),
        }
    }

    /// Positions `i` such that `t^e_i h_i t^e_{i+1}` is a pinch.
    #[cfg(test)]
    pub fn pinches(&self, data: &HnnBaseData) -> Vec<usize> {
        (0..self.ts.len().saturating_sub(1))
            .filter(|&i| self.ts[i + 1] == self.ts[i].flip() && Self::pinch(self.ts[i], self.hs[i + 1], data).is_some())
            .collect()
    }

    /// Apply the pinch at position `i` (see [`Segments::pinches`]).
    #[cfg(test)]
    pub fn apply_pinch(&mut self, i: usize, data: &HnnBaseData) {
        let r = Self::pinch(self.ts[i], self.hs[i + 1], data).expect("not a pinch");
        let right = self.hs.remove(i + 2);
        self.hs.remove(i + 1);
        self.ts.drain(i..i + 2);
        self.hs[i] = self.hs[i].mul(r).mul(right);
    }

    fn eliminate_leftmost(self, data: &HnnBaseData) -> Segments {
        let mut rh = vec![self.hs[0]];
        let mut rt: Vec<Sign> = Vec::new();
        for (i, &e) in self.ts.iter().enumerate() {
            let next = self.hs[i + 1];
            let r = match rt.last() {
                Some(&s) if s == e.flip() => Self::pinch(s, *rh.last().expect("nonempty"), data),
                _ => None,
            };
            match r {
                Some(r) => {
                    rt.pop();
                    rh.pop();
                    let last = rh.last_mut().expect("nonempty");
                    *last = last.mul(r).mul(next);
                }
                None => {
                    rt.push(e);
                    rh.push(next);
                }
            }
        }
        Segments { hs: rh, ts: rt }
    }

    fn eliminate_rightmost(self, data: &HnnBaseData) -> Segments {
        // mirror image of the left scan: stacks hold the reduced suffix, top = leftmost
        let k = self.ts.len();
        let mut rh = vec![self.hs[k]];
        let mut rt: Vec<Sign> = Vec::new();
        for i in (0..k).rev() {
            let e = self.ts[i];
            let left = self.hs[i];
            let r = match rt.last() {
                Some(&s) if s == e.flip() => Self::pinch(e, *rh.last().expect("nonempty"), data),
                _ => None,
            };
            match r {
                Some(r) => {
                    rt.pop();
                    rh.pop();
                    let last = rh.last_mut().expect("nonempty");
                    *last = left.mul(r).mul(*last);
                }
                None => {
                    rt.push(e);
                    rh.push(left);
                }
            }
        }
        rh.reverse();
        rt.reverse();
        Segments { hs: rh, ts: rt }
    }

    /// Left-to-right coset normalisation of a pinch-free sequence.
    pub fn normalize(mut self, data: &HnnBaseData) -> HnnNormalForm {
        let mut syllables = Vec::with_capacity(self.ts.len());
        for (i, &e) in self.ts.iter().enumerate() {
            let (c, moved) = match e {
                Sign::Pos => {
                    let (c, s) = data.sigma().decompose_unchecked(self.hs[i]);
                    (c, data.theta().apply_unchecked(s))
                }
                Sign::Neg => {
                    let (c, s) = data.theta_sigma().decompose_unchecked(self.hs[i]);
                    (c, data.theta().apply_inv_unchecked(s))
                }
            };
            syllables.push((c, e));
            self.hs[i + 1] = moved.mul(self.hs[i + 1]);
        }
        HnnNormalForm { syllables, tail: *self.hs.last().expect("nonempty") }
    }
}

pub fn reduce(w: &HnnWord, data: &HnnBaseData) -> HnnNormalForm {
    reduce_with(w, data, PinchOrder::LeftmostFirst)
}

pub fn reduce_with(w: &HnnWord, data: &HnnBaseData, order: PinchOrder) -> HnnNormalForm {
    let seg = Segments::from_word(w, data);
    let seg = match order {
        PinchOrder::LeftmostFirst => seg.eliminate_leftmost(data),
        PinchOrder::RightmostFirst => seg.eliminate_rightmost(data),
    };
    seg.normalize(data)
}

fn check(a: &HnnNormalForm, data: &HnnBaseData) -> Result<(), WordError> {
    if a.tail.group() == data.base() {
        Ok(())
    } else {
        Err(WordError::PresentationMismatch)
    }
}

pub fn multiply(a: &HnnNormalForm, b: &HnnNormalForm, data: &HnnBaseData) -> Result<HnnNormalForm, WordError> {
    check(a, data)?;
    check(b, data)?;
    Ok(reduce(&a.to_word().concat(&b.to_word()), data))
}

pub fn invert(a: &HnnNormalForm, data: &HnnBaseData) -> Result<HnnNormalForm, WordError> {
    check(a, data)?;
    Ok(reduce(&a.to_word().inverse(), data))
}

pub fn equal(a: &HnnNormalForm, b: &HnnNormalForm, data: &HnnBaseData) -> Result<bool, WordError> {
    check(a, data)?;
    check(b, data)?;
    Ok(a == b)
}

/// Reduce the product of several words.
pub fn product(words: &[&HnnWord], data: &HnnBaseData) -> HnnNormalForm {
    let mut w = HnnWord::default();
    for x in words {
        w = w.concat(x);
    }
    reduce(&w, data)
}

/// The legal next syllables after a syllable of sign `prev`, in enumeration
/// order: by coset representative, positive sign first.
pub fn next_syllables(prev: Option<Sign>, data: &HnnBaseData) -> Vec<(GroupElement, Sign)> {
    let pos = data.coset_reps_pos();
    let neg = data.coset_reps_neg();
    let n = pos.len().max(neg.len());
    let mut out = Vec::new();
    for i in 0..n {
        for (reps, s) in [(&pos, Sign::Pos), (&neg, Sign::Neg)] {
            if let Some(&c) = reps.get(i) {
                if !(c.is_identity() && prev == Some(s.flip())) {
                    out.push((c, s));
                }
            }
        }
    }
    out
}

/// All path-type elements extending `a` by at most `depth` syllables, by
/// length and then lexicographically; `a` itself comes first.
pub fn path_type_extensions(a: &HnnNormalForm, depth: usize, data: &HnnBaseData) -> Result<Vec<HnnNormalForm>, WordError> {
    if a.is_path_type().is_none() {
        return Err(WordError::NotPathType(a.to_string()));
    }
    let mut out = vec![a.clone()];
    let mut level = vec![a.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for g in &level {
            let prev = g.syllables.last().map(|s| s.1);
            for syl in next_syllables(prev, data) {
                let mut syllables = g.syllables.clone();
                syllables.push(syl);
                next.push(HnnNormalForm { syllables, tail: g.tail });
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    Ok(out)
}

/// Extend a path-type element by one syllable (no reduction needed).
pub fn append_syllable(a: &HnnNormalForm, syl: (GroupElement, Sign)) -> HnnNormalForm {
    let mut syllables = a.syllables.clone();
    syllables.push(syl);
    HnnNormalForm { syllables, tail: a.tail }
}

/// Generators `h1, h-1, t, T` (for `Z`) in enumeration order.
pub fn generators(data: &HnnBaseData) -> Vec<HnnLetter> {
    let one = data.element(1);
    let mut out = vec![HnnLetter::Base(one)];
    if one.inv() != one {
        out.push(HnnLetter::Base(one.inv()));
    }
    out.push(HnnLetter::Stable(Sign::Pos));
    out.push(HnnLetter::Stable(Sign::Neg));
    out
}

/// The first `count` distinct nontrivial elements, enumerated by word length
/// over [`generators`] and then lexicographically.
pub fn enumerate_nontrivial(data: &HnnBaseData, count: usize) -> Vec<HnnNormalForm> {
    let gens = generators(data);
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(HnnNormalForm::identity(data));
    let mut out = Vec::new();
    let mut level = vec![HnnWord::default()];
    while out.len() < count && !level.is_empty() {
        let mut next = Vec::new();
        for w in &level {
            for g in &gens {
                let mut letters = w.letters.clone();
                letters.push(*g);
                let w2 = HnnWord::new(letters);
                let nf = reduce(&w2, data);
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
mod tests {
    use super::*;
    use crate::base_groups::make_bs_presentation;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bs(m: i64, n: i64) -> HnnBaseData {
        make_bs_presentation(m, n).unwrap()
    }

    fn w(s: &str, d: &HnnBaseData) -> HnnWord {
        HnnWord::parse(s, d).unwrap()
    }

    /// Independent oracle: apply random pinches until none remain.
    pub(crate) fn oracle_reduce(word: &HnnWord, d: &HnnBaseData, seed: u64) -> HnnNormalForm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seg = Segments::from_word(word, d);
        loop {
            let p = seg.pinches(d);
            if p.is_empty() {
                break;
            }
            let i = p[rng.gen_range(0..p.len())];
            seg.apply_pinch(i, d);
        }
        seg.normalize(d)
    }

    #[test]
    fn reduce_examples() {
        let d = bs(2, 3);
        assert!(reduce(&w("t T", &d), &d).is_identity());
        let nf = reduce(&w("T h3 t", &d), &d);
        assert!(nf.is_empty());
        assert_eq!(nf.tail().value(), 2);
        let nf = reduce(&w("h5 t", &d), &d);
        assert_eq!(nf.syllables(), &[(d.element(2), Sign::Pos)]);
        assert_eq!(nf.tail().value(), 2);
        for seed in 0..20 {
            assert_eq!(oracle_reduce(&w("h5 t", &d), &d, seed), nf);
        }
        assert_eq!(nf.to_string(), "h2 t h2");
        assert_eq!(reduce(&w("T h3 t", &d), &d).to_string(), "h2");
    }

    #[test]
    fn multiply_matches_concatenation() {
        let d = bs(2, 3);
        let a = reduce(&w("t", &d), &d);
        let b = reduce(&w("T h3 t", &d), &d);
        let ab = multiply(&a, &b, &d).unwrap();
        assert_eq!(ab, oracle_reduce(&w("t T h3 t", &d), &d, 7));
        let x = reduce(&w("t h3 T", &d), &d);
        let y = oracle_reduce(&w("h1 t h3 T h-1", &d), &d, 1);
        let y = multiply(&multiply(&reduce(&w("h-1", &d), &d), &y, &d).unwrap(), &reduce(&w("h1", &d), &d), &d).unwrap();
        assert!(equal(&x, &y, &d).unwrap());
        assert!(multiply(&a, &invert(&a, &d).unwrap(), &d).unwrap().is_identity());
    }

    #[test]
    fn presentation_mismatch() {
        let d = bs(2, 3);
        let other = crate::base_groups::zmod_free_product(2, 3).unwrap();
        let foreign = HnnNormalForm::from_base(other.factor(crate::base_groups::Side::One).element(1));
        assert_eq!(multiply(&foreign, &HnnNormalForm::identity(&d), &d), Err(WordError::PresentationMismatch));
    }

    #[test]
    fn path_type_examples() {
        let d = bs(2, 3);
        assert_eq!(reduce(&w("t", &d), &d).is_path_type(), Some(Sign::Pos));
        assert_eq!(reduce(&w("h2 t", &d), &d).is_path_type(), None);
        assert_eq!(reduce(&w("t h1 T h1", &d), &d).is_path_type(), None);
        assert_eq!(reduce(&w("T h1 t", &d), &d).is_path_type(), Some(Sign::Neg));
    }

    #[test]
    fn extensions_of_t() {
        let d = bs(2, 3);
        let t = reduce(&w("t", &d), &d);
        assert_eq!(path_type_extensions(&t, 0, &d).unwrap(), vec![t.clone()]);
        let ext = path_type_extensions(&t, 1, &d).unwrap();
        // star of a vertex has 3 + 2 edges; one of them backtracks along t
        assert_eq!(ext.len(), 1 + (3 + 2 - 1));
        let printed: Vec<_> = ext.iter().map(|g| g.to_string()).collect();
        assert_eq!(printed, ["h0 t", "h0 t h0 t", "h0 t h1 t", "h0 t h1 T", "h0 t h2 t"]);
        assert!(!printed.contains(&"h0 t h0 T".to_string()));
        assert!(path_type_extensions(&reduce(&w("h1 t", &d), &d), 1, &d).is_err());
    }

    #[test]
    fn extensions_in_ascending_presentation() {
        // BS(1,2): C+ = {0,1}, C- = {0}
        let d = bs(1, 2);
        let t = reduce(&w("t", &d), &d);
        let ext = path_type_extensions(&t, 1, &d).unwrap();
        let neg_after_pos = ext.iter().filter(|g| g.len() == 2 && g.syllables()[1].1 == Sign::Neg).count();
        assert_eq!(neg_after_pos, 0);
        let tt = reduce(&w("T", &d), &d);
        let ext = path_type_extensions(&tt, 1, &d).unwrap();
        let pos_after_neg = ext.iter().filter(|g| g.len() == 2 && g.syllables()[1].1 == Sign::Pos).count();
        assert_eq!(pos_after_neg, 1);
    }

    #[test]
    fn parse_errors_carry_position() {
        let d = bs(2, 3);
        match HnnWord::parse("t hx T", &d) {
            Err(WordError::Parse { position, .. }) => assert_eq!(position, 1),
            other => panic!("{other:?}"),
        }
        assert!(HnnWord::parse("t q", &d).is_err());
        assert_eq!(reduce(&w("1", &d), &d).to_string(), "1");
    }

    #[test]
    fn enumeration_order() {
        let d = bs(2, 3);
        let first: Vec<_> = enumerate_nontrivial(&d, 10).iter().map(|g| g.to_string()).collect();
        assert_eq!(&first[..4], ["h1", "h-1", "h0 t", "h0 T"]);
        assert_eq!(first.len(), 10);
        let uniq: std::collections::BTreeSet<_> = first.iter().collect();
        assert_eq!(uniq.len(), 10);
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Vec<(u8, i64)>> {
        prop::collection::vec((0u8..3, -7i64..8), 0..=max_len)
    }

    fn build(spec: &[(u8, i64)], d: &HnnBaseData) -> HnnWord {
        HnnWord::new(
            spec.iter()
                .map(|&(k, v)| match k {
                    0 => HnnLetter::Base(d.element(v)),
                    1 => HnnLetter::Stable(Sign::Pos),
                    _ => HnnLetter::Stable(Sign::Neg),
                })
                .collect(),
        )
    }

    proptest! {
        #[test]
        fn strategies_agree(spec in arb_word(20), seed in any::<u64>()) {
            let d = bs(2, 3);
            let word = build(&spec, &d);
            let l = reduce_with(&word, &d, PinchOrder::LeftmostFirst);
            let r = reduce_with(&word, &d, PinchOrder::RightmostFirst);
            prop_assert_eq!(&l, &r);
            prop_assert_eq!(&l, &oracle_reduce(&word, &d, seed));
            prop_assert!(l.is_normal(&d));
        }

        #[test]
        fn reduce_is_idempotent(spec in arb_word(20)) {
            let d = bs(2, 3);
            let nf = reduce(&build(&spec, &d), &d);
            prop_assert_eq!(reduce(&nf.to_word(), &d), nf);
        }

        #[test]
        fn group_laws(a in arb_word(8), b in arb_word(8), c in arb_word(8)) {
            let d = bs(3, 2);
            let (a, b, c) = (reduce(&build(&a, &d), &d), reduce(&build(&b, &d), &d), reduce(&build(&c, &d), &d));
            let ab_c = multiply(&multiply(&a, &b, &d).unwrap(), &c, &d).unwrap();
            let a_bc = multiply(&a, &multiply(&b, &c, &d).unwrap(), &d).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert!(multiply(&a, &invert(&a, &d).unwrap(), &d).unwrap().is_identity());
        }

        #[test]
        fn britton(spec in arb_word(20)) {
            let d = bs(2, 3);
            let nf = reduce(&build(&spec, &d), &d);
            if !nf.is_empty() {
                prop_assert!(!equal(&nf, &HnnNormalForm::identity(&d), &d).unwrap());
            }
        }

        #[test]
        fn extensions_strictly_extend(n in 1usize..4, depth in 0usize..3) {
            let d = bs(2, 3);
            let mut g = reduce(&w("t", &d), &d);
            for _ in 1..n {
                g = append_syllable(&g, next_syllables(Some(g.syllables().last().unwrap().1), &d)[1]);
            }
            let ext = path_type_extensions(&g, depth, &d).unwrap();
            prop_assert_eq!(&ext[0], &g);
            for e in &ext[1..] {
                prop_assert!(e.len() > g.len());
                prop_assert_eq!(&e.syllables()[..g.len()], g.syllables());
                prop_assert!(e.is_normal(&d));
                prop_assert!(e.is_path_type().is_some());
            }
        }
    }
}
