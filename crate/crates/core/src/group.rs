//! Concrete groups: element arithmetic, symmetric generators and word-metric balls.
//!
//! Every element has exactly one encoding (free words are reduced, bit supports
//! sorted), so structural equality is group equality and the derived `Ord` is a
//! canonical total order used wherever summation order matters.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on enumerated ball sizes.
pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// A letter of a free-group word: `+k` is `a_k`, `-k` is `a_k^{-1}` (k ≥ 1).
pub type Letter = i8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    Int(i64),
    Lattice(Vec<i64>),
    Word(Vec<Letter>),
    /// `(x, y, z)` standing for the matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
    Heisenberg([i64; 3]),
    /// Sorted indices of the nonzero coordinates of an element of ⊕ℤ/2.
    Bits(Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecRepr", into = "GroupSpecRepr")]
pub enum GroupSpec {
    Integers,
    Lattice { d: u32 },
    Free { d: u32 },
    Heisenberg,
    /// The locally finite group ⊕ℤ/2 (not finitely generated).
    BitSum,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Integers,
    Lattice,
    Free,
    Heisenberg,
    BitSum,
}

/// Wire form `{"kind": "...", "d": k}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecRepr {
    pub kind: GroupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
}

impl TryFrom<GroupSpecRepr> for GroupSpec {
    type Error = Error;

    fn try_from(r: GroupSpecRepr) -> Result<Self> {
        let spec = match r.kind {
            GroupKind::Integers => {
                if r.d.is_some_and(|d| d != 1) {
                    return Err(Error::Encoding("integers take d = 1".into()));
                }
                GroupSpec::Integers
            }
            GroupKind::Lattice => {
                let d = r.d.ok_or_else(|| Error::Encoding("lattice needs d".into()))?;
                if !(1..=3).contains(&d) {
                    return Err(Error::Encoding(format!("lattice rank {d} outside 1..=3")));
                }
                GroupSpec::Lattice { d }
            }
            GroupKind::Free => {
                let d = r.d.ok_or_else(|| Error::Encoding("free group needs d".into()))?;
                if !(1..=2).contains(&d) {
                    return Err(Error::Encoding(format!("free rank {d} outside 1..=2")));
                }
                GroupSpec::Free { d }
            }
            GroupKind::Heisenberg => GroupSpec::Heisenberg,
            GroupKind::BitSum => GroupSpec::BitSum,
        };
        Ok(spec)
    }
}

impl From<GroupSpec> for GroupSpecRepr {
    fn from(s: GroupSpec) -> Self {
        let (kind, d) = match s {
            GroupSpec::Integers => (GroupKind::Integers, Some(1)),
            GroupSpec::Lattice { d } => (GroupKind::Lattice, Some(d)),
            GroupSpec::Free { d } => (GroupKind::Free, Some(d)),
            GroupSpec::Heisenberg => (GroupKind::Heisenberg, Some(2)),
            GroupSpec::BitSum => (GroupKind::BitSum, None),
        };
        GroupSpecRepr { kind, d }
    }
}

impl GroupSpec {
    /// Generator rank `d`, so that `|𝔞| = 2d`. `None` for ⊕ℤ/2.
    pub fn rank(&self) -> Option<usize> {
        match *self {
            GroupSpec::Integers => Some(1),
            GroupSpec::Lattice { d } | GroupSpec::Free { d } => Some(d as usize),
            GroupSpec::Heisenberg => Some(2),
            GroupSpec::BitSum => None,
        }
    }

    pub fn is_finitely_generated(&self) -> bool {
        self.rank().is_some()
    }

    fn require_fg(&self) -> Result<usize> {
        self.rank()
            .ok_or_else(|| Error::Unsupported(format!("{self:?} is not finitely generated")))
    }

    pub fn identity(&self) -> GroupElement {
        match *self {
            GroupSpec::Integers => GroupElement::Int(0),
            GroupSpec::Lattice { d } => GroupElement::Lattice(vec![0; d as usize]),
            GroupSpec::Free { .. } => GroupElement::Word(Vec::new()),
            GroupSpec::Heisenberg => GroupElement::Heisenberg([0; 3]),
            GroupSpec::BitSum => GroupElement::Bits(Vec::new()),
        }
    }

    /// The positive generators `a_1, …, a_d`.
    pub fn positive_generators(&self) -> Result<Vec<GroupElement>> {
        let d = self.require_fg()?;
        Ok(match *self {
            GroupSpec::Integers => vec![GroupElement::Int(1)],
            GroupSpec::Lattice { .. } => (0..d)
                .map(|i| {
                    let mut v = vec![0; d];
                    v[i] = 1;
                    GroupElement::Lattice(v)
                })
                .collect(),
            GroupSpec::Free { .. } => (1..=d as i8).map(|k| GroupElement::Word(vec![k])).collect(),
            GroupSpec::Heisenberg => vec![
                GroupElement::Heisenberg([1, 0, 0]),
                GroupElement::Heisenberg([0, 1, 0]),
            ],
            GroupSpec::BitSum => unreachable!(),
        })
    }

    /// The symmetric generating set 𝔞 = {a_1^{±1}, …, a_d^{±1}}, ordered
    /// `a_1, a_1^{-1}, a_2, a_2^{-1}, …`.
    pub fn generators(&self) -> Result<Vec<GroupElement>> {
        let pos = self.positive_generators()?;
        let mut out = Vec::with_capacity(2 * pos.len());
        for a in pos {
            let inv = self.inverse(&a)?;
            out.push(a);
            out.push(inv);
        }
        Ok(out)
    }

    /// Checks that `a` is a canonical encoding for this group.
    pub fn validate(&self, a: &GroupElement) -> Result<()> {
        match (self, a) {
            (GroupSpec::Integers, GroupElement::Int(_)) => Ok(()),
            (GroupSpec::Lattice { d }, GroupElement::Lattice(v)) if v.len() == *d as usize => {
                Ok(())
            }
            (GroupSpec::Free { d }, GroupElement::Word(w)) => {
                for (i, &l) in w.iter().enumerate() {
                    if l == 0 || l.unsigned_abs() as u32 > *d {
                        return Err(Error::Encoding(format!("letter {l} outside rank {d}")));
                    }
                    if i > 0 && w[i - 1] == -l {
                        return Err(Error::Encoding(format!("word {w:?} is not reduced")));
                    }
                }
                Ok(())
            }
            (GroupSpec::Heisenberg, GroupElement::Heisenberg(_)) => Ok(()),
            (GroupSpec::BitSum, GroupElement::Bits(b)) => {
                if b.windows(2).all(|p| p[0] < p[1]) {
                    Ok(())
                } else {
                    Err(Error::Encoding(format!("bit support {b:?} is not strictly sorted")))
                }
            }
            _ => Err(Error::Encoding(format!("{a:?} is not an element of {self:?}"))),
        }
    }

    /// Brings an encoding of the right shape into canonical form.
    pub fn canonicalize(&self, a: GroupElement) -> Result<GroupElement> {
        match (self, a) {
            (GroupSpec::Free { d }, GroupElement::Word(w)) => {
                if let Some(&l) = w.iter().find(|l| **l == 0 || l.unsigned_abs() as u32 > *d) {
                    return Err(Error::Encoding(format!("letter {l} outside rank {d}")));
                }
                Ok(GroupElement::Word(reduce_word(w)))
            }
            (GroupSpec::BitSum, GroupElement::Bits(mut b)) => {
                b.sort_unstable();
                // pairs of equal bits cancel
                let mut out: Vec<u32> = Vec::with_capacity(b.len());
                for x in b {
                    if out.last() == Some(&x) {
                        out.pop();
                    } else {
                        out.push(x);
                    }
                }
                Ok(GroupElement::Bits(out))
            }
            (s, a) => {
                s.validate(&a)?;
                Ok(a)
            }
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.multiply_unchecked(a, b))
    }

    /// Product of two elements already known to be valid encodings.
    pub fn multiply_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        use GroupElement::*;
        match (a, b) {
            (Int(x), Int(y)) => Int(x + y),
            (Lattice(x), Lattice(y)) => Lattice(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            (Word(x), Word(y)) => {
                // cancel the longest suffix of x against the prefix of y
                let mut k = 0;
                while k < x.len() && k < y.len() && x[x.len() - 1 - k] == -y[k] {
                    k += 1;
                }
                let mut w = Vec::with_capacity(x.len() + y.len() - 2 * k);
                w.extend_from_slice(&x[..x.len() - k]);
                w.extend_from_slice(&y[k..]);
                Word(w)
            }
            (Heisenberg([x, y, z]), Heisenberg([x2, y2, z2])) => {
                Heisenberg([x + x2, y + y2, z + z2 + x * y2])
            }
            (Bits(x), Bits(y)) => Bits(symmetric_difference(x, y)),
            _ => panic!("multiply_unchecked on mismatched encodings {a:?}, {b:?}"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        Ok(self.inverse_unchecked(a))
    }

    pub fn inverse_unchecked(&self, a: &GroupElement) -> GroupElement {
        use GroupElement::*;
        match a {
            Int(x) => Int(-x),
            Lattice(v) => Lattice(v.iter().map(|x| -x).collect()),
            Word(w) => Word(w.iter().rev().map(|l| -l).collect()),
            Heisenberg([x, y, z]) => Heisenberg([-x, -y, x * y - z]),
            Bits(b) => Bits(b.clone()),
        }
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        *a == self.identity()
    }

    /// `a^n` for any integer `n`.
    pub fn pow(&self, a: &GroupElement, n: i64) -> Result<GroupElement> {
        self.validate(a)?;
        let base = if n < 0 { self.inverse_unchecked(a) } else { a.clone() };
        let mut acc = self.identity();
        let mut sq = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.multiply_unchecked(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.multiply_unchecked(&sq, &sq);
            }
        }
        Ok(acc)
    }

    /// Word length with respect to 𝔞. Heisenberg lengths come from a
    /// breadth-first search bounded by `DEFAULT_BALL_CAP`.
    pub fn word_length(&self, a: &GroupElement) -> Result<usize> {
        self.validate(a)?;
        self.require_fg()?;
        Ok(match a {
            GroupElement::Int(x) => x.unsigned_abs() as usize,
            GroupElement::Lattice(v) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
            GroupElement::Word(w) => w.len(),
            GroupElement::Heisenberg(_) => {
                let mut seen: HashSet<GroupElement> = HashSet::new();
                let mut frontier = vec![self.identity()];
                seen.insert(self.identity());
                let gens = self.generators()?;
                let mut len = 0;
                loop {
                    if frontier.contains(a) {
                        break len;
                    }
                    let mut next = Vec::new();
                    for g in &frontier {
                        for s in &gens {
                            let h = self.multiply_unchecked(g, s);
                            if seen.insert(h.clone()) {
                                next.push(h);
                            }
                        }
                    }
                    if seen.len() > DEFAULT_BALL_CAP {
                        return Err(Error::Capacity {
                            what: "heisenberg word-length search",
                            needed: seen.len(),
                            cap: DEFAULT_BALL_CAP,
                        });
                    }
                    frontier = next;
                    len += 1;
                }
            }
            GroupElement::Bits(_) => unreachable!(),
        })
    }

    /// Spheres `S_0, …, S_n` of the word metric; each sphere is sorted.
    pub fn spheres(&self, n: usize, cap: usize) -> Result<Vec<Vec<GroupElement>>> {
        let gens = self.generators()?;
        let mut seen: HashSet<GroupElement> = HashSet::new();
        seen.insert(self.identity());
        let mut spheres = vec![vec![self.identity()]];
        for _ in 0..n {
            let mut next = Vec::new();
            for g in spheres.last().unwrap() {
                for s in &gens {
                    let h = self.multiply_unchecked(g, s);
                    if !seen.contains(&h) {
                        seen.insert(h.clone());
                        next.push(h);
                    }
                }
                if seen.len() > cap {
                    return Err(Error::Capacity {
                        what: "word-metric ball",
                        needed: seen.len(),
                        cap,
                    });
                }
            }
            next.sort_unstable();
            spheres.push(next);
        }
        Ok(spheres)
    }

    /// The ball `B_n`, sorted in canonical order.
    pub fn ball(&self, n: usize) -> Result<Vec<GroupElement>> {
        self.ball_with_cap(n, DEFAULT_BALL_CAP)
    }

    pub fn ball_with_cap(&self, n: usize, cap: usize) -> Result<Vec<GroupElement>> {
        let mut all: Vec<GroupElement> = self.spheres(n, cap)?.into_iter().flatten().collect();
        all.sort_unstable();
        Ok(all)
    }

    /// A uniformly random word of exactly `len` letters from 𝔞, multiplied out.
    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Result<GroupElement> {
        let gens = self.generators()?;
        let mut g = self.identity();
        for _ in 0..len {
            let s = &gens[rng.random_range(0..gens.len())];
            g = self.multiply_unchecked(&g, s);
        }
        Ok(g)
    }

    /// A random element, generated as a random word for f.g. kinds and as a
    /// random subset of the first `radius` coordinates for ⊕ℤ/2.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: usize) -> GroupElement {
        match self {
            GroupSpec::BitSum => {
                let bits = (0..radius as u32).filter(|_| rng.random_bool(0.5)).collect();
                GroupElement::Bits(bits)
            }
            _ => {
                let len = rng.random_range(0..=radius);
                self.random_word(rng, len).expect("finitely generated")
            }
        }
    }

    /// Parses the canonical string produced by `Display`.
    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let bad = || Error::Encoding(format!("cannot parse {s:?} as {self:?} element"));
        let el = match self {
            GroupSpec::Integers => GroupElement::Int(s.parse().map_err(|_| bad())?),
            GroupSpec::Lattice { .. } => GroupElement::Lattice(parse_tuple(s, '(', ')').ok_or_else(bad)?),
            GroupSpec::Heisenberg => {
                let v = parse_tuple(s, '[', ']').ok_or_else(bad)?;
                let arr: [i64; 3] = v.try_into().map_err(|_| bad())?;
                GroupElement::Heisenberg(arr)
            }
            GroupSpec::Free { .. } => {
                if s == "e" {
                    GroupElement::Word(Vec::new())
                } else {
                    let mut w = Vec::new();
                    for c in s.chars() {
                        let l = if c.is_ascii_lowercase() {
                            (c as u8 - b'a' + 1) as i8
                        } else if c.is_ascii_uppercase() {
                            -((c as u8 - b'A' + 1) as i8)
                        } else {
                            return Err(bad());
                        };
                        w.push(l);
                    }
                    GroupElement::Word(w)
                }
            }
            GroupSpec::BitSum => {
                let inner = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')).ok_or_else(bad)?;
                let bits = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|t| t.trim().parse::<u32>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad())?
                };
                GroupElement::Bits(bits)
            }
        };
        self.validate(&el)?;
        Ok(el)
    }
}

fn parse_tuple(s: &str, open: char, close: char) -> Option<Vec<i64>> {
    let inner = s.strip_prefix(open)?.strip_suffix(close)?;
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

fn reduce_word(w: Vec<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn symmetric_difference(x: &[u32], y: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(x.len() + y.len());
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    out
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(x) => write!(f, "{x}"),
            GroupElement::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Word(w) if w.is_empty() => write!(f, "e"),
            GroupElement::Word(w) => {
                for &l in w {
                    let c = if l > 0 {
                        (b'a' + (l as u8) - 1) as char
                    } else {
                        (b'A' + ((-l) as u8) - 1) as char
                    };
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            GroupElement::Heisenberg([x, y, z]) => write!(f, "[{x},{y},{z}]"),
            GroupElement::Bits(b) => {
                let parts: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
        }
    }
}

/// An injective homomorphism from a subgroup into an ambient group, given by
/// the images of the subgroup's positive generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Embedding {
    pub sub: GroupSpec,
    pub ambient: GroupSpec,
    pub images: Vec<GroupElement>,
}

impl Embedding {
    /// Builds the embedding and spot-checks it: `checks` random pairs for the
    /// homomorphism law and pairwise-distinct images on the subgroup ball
    /// `B_injectivity_radius`.
    pub fn new(
        sub: GroupSpec,
        ambient: GroupSpec,
        images: Vec<GroupElement>,
        checks: usize,
        injectivity_radius: usize,
        seed: u64,
    ) -> Result<Self> {
        let want = sub
            .rank()
            .ok_or_else(|| Error::Embedding("subgroup must be finitely generated".into()))?;
        if images.len() != want {
            return Err(Error::Embedding(format!(
                "{} images given for {want} generators",
                images.len()
            )));
        }
        for im in &images {
            ambient.validate(im).map_err(|e| Error::Embedding(e.to_string()))?;
        }
        let emb = Embedding { sub, ambient, images };

        let mut rng = crate::seed::rng(seed, "embedding-check", 0);
        for _ in 0..checks {
            let a = sub.random_element(&mut rng, 4);
            let b = sub.random_element(&mut rng, 4);
            let ab = sub.multiply_unchecked(&a, &b);
            let lhs = emb.map(&ab)?;
            let rhs = ambient.multiply_unchecked(&emb.map(&a)?, &emb.map(&b)?);
            if lhs != rhs {
                return Err(Error::Embedding(format!(
                    "image({a}·{b}) = {lhs} but image({a})·image({b}) = {rhs}"
                )));
            }
        }
        emb.check_injective(injectivity_radius)?;
        Ok(emb)
    }

    /// The default desk-scale inclusion ℤ ↪ F₂, n ↦ aⁿ.
    pub fn integers_into_free() -> Self {
        Embedding {
            sub: GroupSpec::Integers,
            ambient: GroupSpec::Free { d: 2 },
            images: vec![GroupElement::Word(vec![1])],
        }
    }

    fn check_injective(&self, radius: usize) -> Result<usize> {
        let ball = self.sub.ball(radius)?;
        let mut seen = HashSet::with_capacity(ball.len());
        for g in &ball {
            let im = self.map(g)?;
            if !seen.insert(im.clone()) {
                return Err(Error::Embedding(format!("image {im} hit twice on B_{radius}")));
            }
        }
        Ok(seen.len())
    }

    /// Number of distinct images on the subgroup ball of the given radius.
    pub fn distinct_images(&self, radius: usize) -> Result<usize> {
        self.check_injective(radius)
    }

    pub fn map(&self, g: &GroupElement) -> Result<GroupElement> {
        self.sub.validate(g)?;
        let amb = &self.ambient;
        let im = &self.images;
        match g {
            GroupElement::Int(n) => amb.pow(&im[0], *n),
            GroupElement::Lattice(v) => {
                let mut acc = amb.identity();
                for (k, &c) in v.iter().enumerate() {
                    acc = amb.multiply_unchecked(&acc, &amb.pow(&im[k], c)?);
                }
                Ok(acc)
            }
            GroupElement::Word(w) => {
                let mut acc = amb.identity();
                for &l in w {
                    let base = &im[(l.unsigned_abs() - 1) as usize];
                    let step = if l > 0 { base.clone() } else { amb.inverse_unchecked(base) };
                    acc = amb.multiply_unchecked(&acc, &step);
                }
                Ok(acc)
            }
            GroupElement::Heisenberg([x, y, z]) => {
                // (x, y, z) = X^x Y^y [X, Y]^{z - xy}
                let (gx, gy) = (&im[0], &im[1]);
                let comm = {
                    let xy = amb.multiply_unchecked(gx, gy);
                    let xiyi = amb.multiply_unchecked(&amb.inverse_unchecked(gx), &amb.inverse_unchecked(gy));
                    amb.multiply_unchecked(&xy, &xiyi)
                };
                let a = amb.pow(gx, *x)?;
                let b = amb.pow(gy, *y)?;
                let c = amb.pow(&comm, z - x * y)?;
                Ok(amb.multiply_unchecked(&amb.multiply_unchecked(&a, &b), &c))
            }
            GroupElement::Bits(_) => Err(Error::Embedding("⊕ℤ/2 is not finitely generated".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GroupElement::*;

    const F2: GroupSpec = GroupSpec::Free { d: 2 };

    /// 3×3 upper unitriangular integer matrix product, the Heisenberg oracle.
    fn mat(e: &GroupElement) -> [[i64; 3]; 3] {
        let Heisenberg([x, y, z]) = e else { panic!() };
        [[1, *x, *z], [0, 1, *y], [0, 0, 1]]
    }

    fn matmul(a: [[i64; 3]; 3], b: [[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut c = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        c
    }

    #[test]
    fn integer_product() {
        let z = GroupSpec::Integers;
        assert_eq!(z.multiply(&Int(3), &Int(-5)).unwrap(), Int(-2));
        assert_eq!(z.inverse(&Int(4)).unwrap(), Int(-4));
    }

    #[test]
    fn free_reduction() {
        // (a b⁻¹)(b a) = a²
        let x = Word(vec![1, -2]);
        let y = Word(vec![2, 1]);
        assert_eq!(F2.multiply(&x, &y).unwrap(), Word(vec![1, 1]));
        // (a b a⁻¹)⁻¹ = a b⁻¹ a⁻¹
        assert_eq!(F2.inverse(&Word(vec![1, 2, -1])).unwrap(), Word(vec![1, -2, -1]));
    }

    #[test]
    fn heisenberg_matches_matrix_product() {
        let h = GroupSpec::Heisenberg;
        let mut rng = crate::seed::rng(1, "heis", 0);
        for _ in 0..500 {
            let a = Heisenberg([rng.random_range(-9..9), rng.random_range(-9..9), rng.random_range(-9..9)]);
            let b = Heisenberg([rng.random_range(-9..9), rng.random_range(-9..9), rng.random_range(-9..9)]);
            let p = h.multiply(&a, &b).unwrap();
            assert_eq!(mat(&p), matmul(mat(&a), mat(&b)));
            assert!(h.is_identity(&h.multiply(&a, &h.inverse(&a).unwrap()).unwrap()));
        }
    }

    #[test]
    fn bitsum_involutions() {
        let g = GroupSpec::BitSum;
        let a = Bits(vec![0, 3, 7]);
        assert_eq!(g.inverse(&a).unwrap(), a);
        assert_eq!(g.multiply(&a, &Bits(vec![3, 4])).unwrap(), Bits(vec![0, 4, 7]));
        assert!(g.is_identity(&g.multiply(&a, &a).unwrap()));
    }

    #[test]
    fn malformed_encodings_rejected() {
        assert!(matches!(F2.multiply(&Word(vec![1, -1]), &Word(vec![])), Err(Error::Encoding(_))));
        assert!(matches!(F2.inverse(&Word(vec![3])), Err(Error::Encoding(_))));
        assert!(GroupSpec::Integers.multiply(&Int(1), &Word(vec![])).is_err());
        assert!(GroupSpec::BitSum.validate(&Bits(vec![2, 1])).is_err());
        assert!(GroupSpec::Lattice { d: 2 }.validate(&Lattice(vec![1])).is_err());
    }

    #[test]
    fn closed_form_ball_sizes() {
        let z = GroupSpec::Integers;
        let b = z.ball(3).unwrap();
        assert_eq!(b, (-3..=3).map(Int).collect::<Vec<_>>());
        // reduced words: 1 + Σ_{k=1}^{N} 4·3^{k-1}
        for n in 0..=6 {
            let expect = 1 + (1..=n).map(|k| 4 * 3usize.pow(k as u32 - 1)).sum::<usize>();
            assert_eq!(F2.ball(n).unwrap().len(), expect);
        }
        assert_eq!(F2.ball(2).unwrap().len(), 17);
        // ℓ¹ lattice points by direct enumeration
        let z2 = GroupSpec::Lattice { d: 2 };
        for n in 0..=5i64 {
            let mut count = 0;
            for x in -n..=n {
                for y in -n..=n {
                    if x.abs() + y.abs() <= n {
                        count += 1;
                    }
                }
            }
            assert_eq!(z2.ball(n as usize).unwrap().len(), count);
        }
        assert_eq!(z2.ball(2).unwrap().len(), 13);
    }

    #[test]
    fn balls_nested_and_symmetric() {
        for spec in [GroupSpec::Integers, GroupSpec::Lattice { d: 3 }, F2, GroupSpec::Heisenberg] {
            let mut prev: HashSet<GroupElement> = HashSet::new();
            for n in 0..=4 {
                let b: HashSet<_> = spec.ball(n).unwrap().into_iter().collect();
                assert!(prev.is_subset(&b));
                for g in &b {
                    assert!(b.contains(&spec.inverse(g).unwrap()));
                }
                prev = b;
            }
        }
        assert_eq!(GroupSpec::Integers.ball(0).unwrap(), vec![Int(0)]);
    }

    #[test]
    fn ball_cap_is_an_error() {
        let err = F2.ball_with_cap(8, 1000).unwrap_err();
        assert!(matches!(err, Error::Capacity { cap: 1000, .. }));
        assert!(GroupSpec::BitSum.ball(1).is_err());
    }

    #[test]
    fn heisenberg_word_length() {
        let h = GroupSpec::Heisenberg;
        assert_eq!(h.word_length(&Heisenberg([0, 0, 1])).unwrap(), 4);
        assert_eq!(h.word_length(&Heisenberg([1, 1, 1])).unwrap(), 2);
        assert_eq!(h.word_length(&Heisenberg([1, 1, 0])).unwrap(), 2);
    }

    #[test]
    fn display_parse_round_trip() {
        let mut rng = crate::seed::rng(3, "parse", 0);
        for spec in [GroupSpec::Integers, GroupSpec::Lattice { d: 2 }, F2, GroupSpec::Heisenberg, GroupSpec::BitSum] {
            for _ in 0..50 {
                let g = spec.random_element(&mut rng, 6);
                assert_eq!(spec.parse(&g.to_string()).unwrap(), g);
            }
        }
        assert_eq!(Word(vec![1, -2]).to_string(), "aB");
    }

    #[test]
    fn spec_wire_format() {
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"free","d":2}"#).unwrap();
        assert_eq!(s, F2);
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"free","d":5}"#).is_err());
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"free","d":2,"x":1}"#).is_err());
        let back = serde_json::to_string(&GroupSpec::Lattice { d: 2 }).unwrap();
        assert_eq!(back, r#"{"kind":"lattice","d":2}"#);
    }

    #[test]
    fn integers_into_free_group() {
        let emb = Embedding::new(GroupSpec::Integers, F2, vec![Word(vec![1])], 200, 4, 11).unwrap();
        assert_eq!(emb.map(&Int(3)).unwrap(), Word(vec![1, 1, 1]));
        let lhs = emb.map(&Int(7)).unwrap();
        let rhs = F2.multiply(&emb.map(&Int(2)).unwrap(), &emb.map(&Int(5)).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, Word(vec![1; 7]));
        assert_eq!(emb.distinct_images(4).unwrap(), 9);
    }

    #[test]
    fn non_homomorphic_images_rejected() {
        // ℤ² → F₂ with non-commuting images is not a homomorphism
        let err = Embedding::new(
            GroupSpec::Lattice { d: 2 },
            F2,
            vec![Word(vec![1]), Word(vec![2])],
            200,
            2,
            5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Embedding(_)));
        // ℤ → ℤ², n ↦ 0 is not injective
        let err = Embedding::new(GroupSpec::Integers, GroupSpec::Lattice { d: 2 }, vec![Lattice(vec![0, 0])], 10, 2, 5)
            .unwrap_err();
        assert!(matches!(err, Error::Embedding(_)));
    }

    #[test]
    fn heisenberg_self_embedding() {
        let h = GroupSpec::Heisenberg;
        let emb = Embedding::new(h, h, h.positive_generators().unwrap(), 300, 3, 2).unwrap();
        let mut rng = crate::seed::rng(8, "heis-emb", 0);
        for _ in 0..100 {
            let g = h.random_element(&mut rng, 6);
            assert_eq!(emb.map(&g).unwrap(), g);
        }
    }
}
