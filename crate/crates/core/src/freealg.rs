//! The free associative algebra F<x1, x2, ...>: sparse word-to-coefficient
//! polynomials, commutators and circle products, the standard polynomials,
//! the Genov identities as structural expression trees, and evaluation into
//! arbitrary algebras through the [`PiAlgebra`] interface.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::ring::{coeff_action, Ring, RingElement};

/// Minimal interface an algebra exposes so that free-algebra elements can be
/// evaluated in it: ring operations plus the action of the coefficient field.
pub trait PiAlgebra {
    type Elem: Clone + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_int(&self, n: &BigInt) -> Self::Elem;
    fn coeff_action(&self, c: &RingElement, a: &Self::Elem) -> Result<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.add(a, &self.neg(b))
    }

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.sub(&self.mul(a, b)?, &self.mul(b, a)?)
    }

    fn circle(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.add(&self.mul(a, b)?, &self.mul(b, a)?)
    }
}

/// Any of the concrete coefficient rings, seen as an evaluation domain.
#[derive(Clone)]
pub struct RingDomain {
    pub ring: Ring,
}

impl PiAlgebra for RingDomain {
    type Elem = RingElement;

    fn zero(&self) -> RingElement {
        self.ring.zero()
    }
    fn one(&self) -> RingElement {
        self.ring.one()
    }
    fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        a.add(b)
    }
    fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        a.mul(b)
    }
    fn neg(&self, a: &RingElement) -> RingElement {
        a.neg()
    }
    fn is_zero(&self, a: &RingElement) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: &BigInt) -> RingElement {
        self.ring.from_bigint(n)
    }
    fn coeff_action(&self, c: &RingElement, a: &RingElement) -> Result<RingElement> {
        coeff_action(c, a)
    }
    fn render(&self, a: &RingElement) -> String {
        a.to_string()
    }
}

/// Word in the free monoid: 1-based variable indices.
pub type NcWord = Vec<u32>;

/// Sparse element of the free algebra over a coefficient field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NcPoly {
    ring: Ring,
    terms: BTreeMap<NcWord, RingElement>,
}

impl NcPoly {
    pub fn zero(ring: &Ring) -> NcPoly {
        NcPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring) -> NcPoly {
        NcPoly::constant(ring, ring.one())
    }

    pub fn constant(ring: &Ring, c: RingElement) -> NcPoly {
        let mut out = NcPoly::zero(ring);
        if !c.is_zero() {
            out.terms.insert(vec![], c);
        }
        out
    }

    pub fn from_int(ring: &Ring, n: i64) -> NcPoly {
        NcPoly::constant(ring, ring.from_int(n))
    }

    /// The variable x_i (1-based).
    pub fn var(ring: &Ring, i: u32) -> NcPoly {
        assert!(i >= 1, "variables are 1-based");
        let mut out = NcPoly::zero(ring);
        out.terms.insert(vec![i], ring.one());
        out
    }

    pub fn monomial(ring: &Ring, word: NcWord, c: RingElement) -> NcPoly {
        let mut out = NcPoly::zero(ring);
        if !c.is_zero() {
            out.terms.insert(word, c);
        }
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NcWord, &RingElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, word: &[u32]) -> RingElement {
        self.terms.get(word).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Largest variable index occurring, or 0 for constants.
    pub fn max_var(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|w| w.iter().copied())
            .max()
            .unwrap_or(0)
    }

    fn check_same_ring(&self, other: &NcPoly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                expected: self.ring.to_string(),
                found: other.ring.to_string(),
            });
        }
        Ok(())
    }

    fn insert_term(&mut self, word: NcWord, c: RingElement) -> Result<()> {
        match self.terms.remove(&word) {
            Some(prev) => {
                let sum = prev.add(&c)?;
                if !sum.is_zero() {
                    self.terms.insert(word, sum);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(word, c);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_same_ring(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert_term(w.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> NcPoly {
        NcPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_same_ring(other)?;
        let mut out = NcPoly::zero(&self.ring);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.insert_term(w, ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &RingElement) -> Result<NcPoly> {
        let mut out = NcPoly::zero(&self.ring);
        for (w, coeff) in &self.terms {
            out.insert_term(w.clone(), c.mul(coeff)?)?;
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &NcPoly) -> Result<NcPoly> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// u o v = uv + vu.
    pub fn circle(&self, other: &NcPoly) -> Result<NcPoly> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn pow(&self, e: u32) -> Result<NcPoly> {
        let mut acc = NcPoly::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// a (ad b)^k: k nested right commutators [...[a, b], ..., b].
    pub fn ad_pow(&self, b: &NcPoly, k: u32) -> Result<NcPoly> {
        let mut acc = self.clone();
        for _ in 0..k {
            acc = acc.commutator(b)?;
        }
        Ok(acc)
    }

    /// Per-monomial multidegrees and the two homogeneity predicates.
    pub fn degree_info(&self) -> DegreeInfo {
        let n = self.max_var() as usize;
        let mdegs: Vec<Vec<u32>> = self
            .terms
            .keys()
            .map(|w| {
                let mut d = vec![0u32; n];
                for &v in w {
                    d[(v - 1) as usize] += 1;
                }
                d
            })
            .collect();
        let multihomogeneous = mdegs.windows(2).all(|w| w[0] == w[1]);
        let multilinear =
            !self.terms.is_empty() && mdegs.iter().all(|d| d.iter().all(|&e| e == 1));
        DegreeInfo { multilinear, multihomogeneous, mdegs }
    }

    pub fn is_multilinear(&self) -> bool {
        self.degree_info().multilinear
    }

    /// When self is c * St_N, returns (N, c); used to dispatch the fast
    /// subset evaluation.
    pub fn as_standard(&self) -> Option<(u32, RingElement)> {
        let n = self.max_var();
        if n == 0 || !self.is_multilinear() {
            return None;
        }
        let expected: usize = (1..=n as usize).product();
        if self.terms.len() != expected {
            return None;
        }
        let id_word: NcWord = (1..=n).collect();
        let c = self.terms.get(&id_word)?.clone();
        for (w, coeff) in &self.terms {
            let expected_coeff = if perm_sign(w) > 0 { c.clone() } else { c.neg() };
            if *coeff != expected_coeff {
                return None;
            }
        }
        Some((n, c))
    }

    /// Evaluate by substituting args[i-1] for x_i, with prefix caching.
    pub fn eval<A: PiAlgebra>(&self, alg: &A, args: &[A::Elem]) -> Result<A::Elem> {
        let needed = self.max_var() as usize;
        if args.len() < needed {
            return Err(Error::InvalidInput(format!(
                "assignment covers {} variables, {} needed",
                args.len(),
                needed
            )));
        }
        if let Some((n, c)) = self.as_standard() {
            if n >= 4 {
                return eval_standard_subsets(alg, &args[..n as usize], &c);
            }
        }
        let mut cache: HashMap<NcWord, A::Elem> = HashMap::new();
        let mut acc = alg.zero();
        for (word, c) in &self.terms {
            let val = eval_word(alg, args, word, &mut cache)?;
            acc = alg.add(&acc, &alg.coeff_action(c, &val)?)?;
        }
        Ok(acc)
    }
}

fn eval_word<A: PiAlgebra>(
    alg: &A,
    args: &[A::Elem],
    word: &[u32],
    cache: &mut HashMap<NcWord, A::Elem>,
) -> Result<A::Elem> {
    if word.is_empty() {
        return Ok(alg.one());
    }
    if word.len() == 1 {
        return Ok(args[(word[0] - 1) as usize].clone());
    }
    if let Some(v) = cache.get(word) {
        return Ok(v.clone());
    }
    let prefix = eval_word(alg, args, &word[..word.len() - 1], cache)?;
    let last = &args[(word[word.len() - 1] - 1) as usize];
    let v = alg.mul(&prefix, last)?;
    cache.insert(word.to_vec(), v.clone());
    Ok(v)
}

/// St_N over subsets: T[S] sums the signed ordered products of { args[i] :
/// i in S }, built by appending each candidate last factor. 2^N * N products
/// instead of N! * N.
fn eval_standard_subsets<A: PiAlgebra>(
    alg: &A,
    args: &[A::Elem],
    coeff: &RingElement,
) -> Result<A::Elem> {
    let n = args.len();
    let mut table: Vec<Option<A::Elem>> = vec![None; 1 << n];
    table[0] = Some(alg.one());
    for mask in 1u32..(1 << n) as u32 {
        let mut acc = alg.zero();
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            let prev = table[(mask ^ (1 << i)) as usize].as_ref().unwrap();
            let term = alg.mul(prev, &args[i])?;
            // sign: parity of members of the set greater than i
            let higher = (mask >> (i + 1)).count_ones();
            if higher % 2 == 0 {
                acc = alg.add(&acc, &term)?;
            } else {
                acc = alg.sub(&acc, &term)?;
            }
        }
        table[mask as usize] = Some(acc);
    }
    let full = table[(1usize << n) - 1].take().unwrap();
    alg.coeff_action(coeff, &full)
}

fn perm_sign(word: &[u32]) -> i32 {
    let mut inversions = 0;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub struct DegreeInfo {
    pub multilinear: bool,
    pub multihomogeneous: bool,
    pub mdegs: Vec<Vec<u32>>,
}

/// The standard polynomial St_N: the signed sum over all N! orderings.
pub fn st_n(ring: &Ring, n: u32) -> Result<NcPoly> {
    if n == 0 || n > 7 {
        return Err(Error::BudgetExceeded(format!(
            "standard polynomial degree {n} outside 1..=7"
        )));
    }
    let mut out = NcPoly::zero(ring);
    let mut word: NcWord = (1..=n).collect();
    // Heap's algorithm, tracking the sign as transpositions are applied
    let mut c = vec![0usize; n as usize];
    let mut sign = 1i32;
    push_perm(&mut out, ring, &word, sign)?;
    let mut i = 0;
    while i < n as usize {
        if c[i] < i {
            if i % 2 == 0 {
                word.swap(0, i);
            } else {
                word.swap(c[i], i);
            }
            sign = -sign;
            push_perm(&mut out, ring, &word, sign)?;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(out)
}

fn push_perm(out: &mut NcPoly, ring: &Ring, word: &[u32], sign: i32) -> Result<()> {
    let c = if sign > 0 { ring.one() } else { ring.one().neg() };
    out.insert_term(word.to_vec(), c)
}

/// Expression tree over the free algebra, evaluated structurally. Genov
/// polynomials live here: their expansions blow up combinatorially.
#[derive(Clone)]
pub enum EvalExpr {
    Lit(NcPoly),
    Add(Box<EvalExpr>, Box<EvalExpr>),
    Sub(Box<EvalExpr>, Box<EvalExpr>),
    Mul(Box<EvalExpr>, Box<EvalExpr>),
    Neg(Box<EvalExpr>),
    Commutator(Box<EvalExpr>, Box<EvalExpr>),
    Circle(Box<EvalExpr>, Box<EvalExpr>),
    /// a (ad b)^k
    AdPow(Box<EvalExpr>, Box<EvalExpr>, u32),
    Pow(Box<EvalExpr>, u32),
}

impl EvalExpr {
    pub fn var(ring: &Ring, i: u32) -> EvalExpr {
        EvalExpr::Lit(NcPoly::var(ring, i))
    }

    pub fn int(ring: &Ring, n: i64) -> EvalExpr {
        EvalExpr::Lit(NcPoly::from_int(ring, n))
    }

    pub fn max_var(&self) -> u32 {
        match self {
            EvalExpr::Lit(p) => p.max_var(),
            EvalExpr::Add(a, b)
            | EvalExpr::Sub(a, b)
            | EvalExpr::Mul(a, b)
            | EvalExpr::Commutator(a, b)
            | EvalExpr::Circle(a, b)
            | EvalExpr::AdPow(a, b, _) => a.max_var().max(b.max_var()),
            EvalExpr::Neg(a) | EvalExpr::Pow(a, _) => a.max_var(),
        }
    }

    pub fn eval<A: PiAlgebra>(&self, alg: &A, args: &[A::Elem]) -> Result<A::Elem> {
        match self {
            EvalExpr::Lit(p) => p.eval(alg, args),
            EvalExpr::Add(a, b) => alg.add(&a.eval(alg, args)?, &b.eval(alg, args)?),
            EvalExpr::Sub(a, b) => alg.sub(&a.eval(alg, args)?, &b.eval(alg, args)?),
            EvalExpr::Mul(a, b) => alg.mul(&a.eval(alg, args)?, &b.eval(alg, args)?),
            EvalExpr::Neg(a) => Ok(alg.neg(&a.eval(alg, args)?)),
            EvalExpr::Commutator(a, b) => {
                alg.commutator(&a.eval(alg, args)?, &b.eval(alg, args)?)
            }
            EvalExpr::Circle(a, b) => alg.circle(&a.eval(alg, args)?, &b.eval(alg, args)?),
            EvalExpr::AdPow(a, b, k) => {
                let bv = b.eval(alg, args)?;
                let mut acc = a.eval(alg, args)?;
                for _ in 0..*k {
                    acc = alg.commutator(&acc, &bv)?;
                }
                Ok(acc)
            }
            EvalExpr::Pow(a, k) => {
                let av = a.eval(alg, args)?;
                let mut acc = alg.one();
                for _ in 0..*k {
                    acc = alg.mul(&acc, &av)?;
                }
                Ok(acc)
            }
        }
    }

    /// Expand into a sparse polynomial, failing when the term count passes
    /// the guard.
    pub fn expand(&self, ring: &Ring, term_guard: usize) -> Result<NcPoly> {
        let free = FreeDomain { ring: ring.clone(), term_guard };
        let max = self.max_var();
        let args: Vec<NcPoly> = (1..=max).map(|i| NcPoly::var(ring, i)).collect();
        self.eval(&free, &args)
    }
}

/// The free algebra itself as an evaluation domain; evaluating an expression
/// at the variables expands it symbolically.
#[derive(Clone)]
pub struct FreeDomain {
    pub ring: Ring,
    pub term_guard: usize,
}

impl PiAlgebra for FreeDomain {
    type Elem = NcPoly;

    fn zero(&self) -> NcPoly {
        NcPoly::zero(&self.ring)
    }
    fn one(&self) -> NcPoly {
        NcPoly::one(&self.ring)
    }
    fn add(&self, a: &NcPoly, b: &NcPoly) -> Result<NcPoly> {
        let out = a.add(b)?;
        self.guard(&out)
    }
    fn mul(&self, a: &NcPoly, b: &NcPoly) -> Result<NcPoly> {
        let out = a.mul(b)?;
        self.guard(&out)
    }
    fn neg(&self, a: &NcPoly) -> NcPoly {
        a.neg()
    }
    fn is_zero(&self, a: &NcPoly) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: &BigInt) -> NcPoly {
        NcPoly::constant(&self.ring, self.ring.from_bigint(n))
    }
    fn coeff_action(&self, c: &RingElement, a: &NcPoly) -> Result<NcPoly> {
        a.scale(c)
    }
    fn render(&self, a: &NcPoly) -> String {
        a.to_string()
    }
}

impl FreeDomain {
    fn guard(&self, p: &NcPoly) -> Result<NcPoly> {
        if p.num_terms() > self.term_guard {
            return Err(Error::BudgetExceeded(format!(
                "expansion passed {} terms",
                self.term_guard
            )));
        }
        Ok(p.clone())
    }
}

/// Genov's matrix identity F_{p,q} = G_{p,q}(x) R_{p,q}(x,y) (y^q - y) as a
/// structural expression with x = x1, y = x2.
pub fn genov(ring: &Ring, p: u64, q: u64) -> Result<EvalExpr> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let mut pow = q;
    while pow > 1 && pow % p == 0 {
        pow /= p;
    }
    if pow != 1 || q < 2 {
        return Err(Error::InvalidInput(format!("{q} is not a power of {p}")));
    }
    if q.checked_pow(p as u32).filter(|&m| m <= 1 << 24).is_none() {
        return Err(Error::BudgetExceeded(format!("q^p overflows for q={q}, p={p}")));
    }
    let x = || EvalExpr::var(ring, 1);
    let y = || EvalExpr::var(ring, 2);
    // G = (x^(q^2) - x)(x^(q^3) - x) ... (x^(q^p) - x)
    let mut g: Option<EvalExpr> = None;
    for t in 2..=p as u32 {
        let factor = EvalExpr::Sub(
            Box::new(EvalExpr::Pow(Box::new(x()), q.pow(t) as u32)),
            Box::new(x()),
        );
        g = Some(match g {
            None => factor,
            Some(acc) => EvalExpr::Mul(Box::new(acc), Box::new(factor)),
        });
    }
    let g = g.expect("p >= 2");
    // R = (1 - (y (ad x)^(p-1))^(q-1)) ... (1 - (y ad x)^(q-1))
    let mut r: Option<EvalExpr> = None;
    for s in (1..=p as u32 - 1).rev() {
        let bracket = EvalExpr::AdPow(Box::new(y()), Box::new(x()), s);
        let factor = EvalExpr::Sub(
            Box::new(EvalExpr::int(ring, 1)),
            Box::new(EvalExpr::Pow(Box::new(bracket), (q - 1) as u32)),
        );
        r = Some(match r {
            None => factor,
            Some(acc) => EvalExpr::Mul(Box::new(acc), Box::new(factor)),
        });
    }
    let r = r.expect("p >= 2");
    let tail = EvalExpr::Sub(
        Box::new(EvalExpr::Pow(Box::new(y()), q as u32)),
        Box::new(y()),
    );
    Ok(EvalExpr::Mul(
        Box::new(EvalExpr::Mul(Box::new(g), Box::new(r))),
        Box::new(tail),
    ))
}

/// The named degree-3/4/5 polynomials, with their defining symbolic
/// relations checked at construction.
pub struct NamedIdentities {
    /// [[x1,x2],x3]
    pub f1: NcPoly,
    /// [x1,x2][x3,x4]
    pub f2: NcPoly,
    /// [x1,x2] x3 [x4,x5]
    pub f3: NcPoly,
    /// St_4 written through circle products of commutators
    pub st4_circ: NcPoly,
}

pub fn named_identities(ring: &Ring) -> Result<NamedIdentities> {
    let v = |i: u32| NcPoly::var(ring, i);
    let f1 = v(1).commutator(&v(2))?.commutator(&v(3))?;
    let f2 = v(1).commutator(&v(2))?.mul(&v(3).commutator(&v(4))?)?;
    let f3 = v(1).commutator(&v(2))?.mul(&v(3))?.mul(&v(4).commutator(&v(5))?)?;
    // f3 = [[x1,x2],x3][x4,x5] + x3[x1,x2][x4,x5]
    let c45 = v(4).commutator(&v(5))?;
    let decomposition = v(1)
        .commutator(&v(2))?
        .commutator(&v(3))?
        .mul(&c45)?
        .add(&v(3).mul(&v(1).commutator(&v(2))?)?.mul(&c45)?)?;
    if f3 != decomposition {
        return Err(Error::InvalidInput("f3 decomposition failed symbolically".into()));
    }
    // St_4 = [x1,x2]o[x3,x4] - [x1,x3]o[x2,x4] + [x1,x4]o[x2,x3]
    let st4_circ = v(1)
        .commutator(&v(2))?
        .circle(&v(3).commutator(&v(4))?)?
        .sub(&v(1).commutator(&v(3))?.circle(&v(2).commutator(&v(4))?)?)?
        .add(&v(1).commutator(&v(4))?.circle(&v(2).commutator(&v(3))?)?)?;
    if st4_circ != st_n(ring, 4)? {
        return Err(Error::InvalidInput("St_4 circle expansion failed symbolically".into()));
    }
    Ok(NamedIdentities { f1, f2, f3, st4_circ })
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let head = w
                .iter()
                .map(|i| format!("x{i}"))
                .collect::<Vec<_>>()
                .join("*");
            if head.is_empty() {
                if c.is_display_atom() {
                    write!(f, "{c}")?;
                } else {
                    write!(f, "({c})")?;
                }
            } else if c.is_one() {
                write!(f, "{head}")?;
            } else if c.is_display_atom() {
                write!(f, "{c}*{head}")?;
            } else {
                write!(f, "({c})*{head}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SplitMix64;

    fn fp(p: u64) -> Ring {
        Ring::prime_field(p).unwrap()
    }

    #[test]
    fn commutator_and_circle() {
        let q = Ring::rationals();
        let x1 = NcPoly::var(&q, 1);
        let x2 = NcPoly::var(&q, 2);
        let comm = x1.commutator(&x2).unwrap();
        assert_eq!(comm, x1.mul(&x2).unwrap().sub(&x2.mul(&x1).unwrap()).unwrap());
        let circ = x1.circle(&x2).unwrap();
        assert_eq!(circ, x1.mul(&x2).unwrap().add(&x2.mul(&x1).unwrap()).unwrap());
        assert!(x1.commutator(&x1).unwrap().is_zero());
    }

    #[test]
    fn standard_polynomial_basics() {
        let q = Ring::rationals();
        let st2 = st_n(&q, 2).unwrap();
        let expected = NcPoly::var(&q, 1).commutator(&NcPoly::var(&q, 2)).unwrap();
        assert_eq!(st2, expected);
        let st4 = st_n(&q, 4).unwrap();
        assert_eq!(st4.num_terms(), 24);
        assert!(st4.is_multilinear());
        assert!(st_n(&q, 8).is_err());
    }

    #[test]
    fn standard_polynomial_alternates() {
        // swapping two arguments negates the value, symbolically
        let q = Ring::rationals();
        let free = FreeDomain { ring: q.clone(), term_guard: 100_000 };
        for n in 2..=5u32 {
            let st = st_n(&q, n).unwrap();
            let args: Vec<NcPoly> = (1..=n).map(|i| NcPoly::var(&q, i)).collect();
            let base = st.eval(&free, &args).unwrap();
            for a in 0..n as usize {
                for b in a + 1..n as usize {
                    let mut swapped = args.clone();
                    swapped.swap(a, b);
                    let v = st.eval(&free, &swapped).unwrap();
                    assert_eq!(v, base.neg(), "swap {a} {b} in St_{n}");
                }
            }
        }
    }

    #[test]
    fn standard_detection_and_subset_evaluation_agree() {
        let f3 = fp(3);
        let st4 = st_n(&f3, 4).unwrap();
        assert_eq!(st4.as_standard().map(|(n, _)| n), Some(4));
        // compare generic word evaluation against the subset path on matrices
        let m2 = Ring::matrix_ring(2, f3.clone()).unwrap();
        let dom = RingDomain { ring: m2.clone() };
        let mut rng = SplitMix64::new(9);
        for _ in 0..10 {
            let args: Vec<RingElement> = (0..4)
                .map(|_| m2.element_at(rng.below_u128(m2.order().unwrap())))
                .collect();
            let fast = st4.eval(&dom, &args).unwrap();
            // force the generic path by perturbing one coefficient
            let mut slow_acc = m2.zero();
            for (w, c) in st4.terms() {
                let mut prod = m2.one();
                for &v in w {
                    prod = prod.mul(&args[(v - 1) as usize]).unwrap();
                }
                slow_acc = slow_acc
                    .add(&crate::ring::coeff_action(c, &prod).unwrap())
                    .unwrap();
            }
            assert_eq!(fast, slow_acc);
        }
    }

    #[test]
    fn named_identity_relations_hold() {
        for ring in [Ring::rationals(), fp(3), fp(5)] {
            // construction itself asserts the two displayed relations
            named_identities(&ring).unwrap();
        }
    }

    #[test]
    fn f1_vanishes_on_commuting_arguments() {
        let f3 = fp(3);
        let ids = named_identities(&f3).unwrap();
        let dom = RingDomain { ring: f3.clone() };
        for a in 0..3i64 {
            for b in 0..3i64 {
                for c in 0..3i64 {
                    let v = ids
                        .f1
                        .eval(&dom, &[f3.from_int(a), f3.from_int(b), f3.from_int(c)])
                        .unwrap();
                    assert!(v.is_zero());
                }
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        // f2(e1, e2, e3, e4) = 4 e1e2e3e4 = e1e2e3e4 in G_4 over F_3
        let f3 = fp(3);
        let g4 = Ring::grassmann(4, f3.clone()).unwrap();
        let ids = named_identities(&f3).unwrap();
        let dom = RingDomain { ring: g4.clone() };
        let args: Vec<RingElement> =
            (1..=4).map(|i| g4.grassmann_generator(i).unwrap()).collect();
        let v = ids.f2.eval(&dom, &args).unwrap();
        assert_eq!(v, g4.grassmann_word(&[1, 2, 3, 4]).unwrap());
        // St_2(E11, E12) = E12 in M_2
        let m2 = Ring::matrix_ring(2, f3.clone()).unwrap();
        let st2 = st_n(&f3, 2).unwrap();
        let dom2 = RingDomain { ring: m2.clone() };
        let v = st2
            .eval(&dom2, &[m2.matrix_unit(1, 1), m2.matrix_unit(1, 2)])
            .unwrap();
        assert_eq!(v, m2.matrix_unit(1, 2));
        // all-zero assignment kills anything without constant term
        let v = ids.f1.eval(&dom2, &[m2.zero(), m2.zero(), m2.zero()]).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn evaluation_is_multiplicative_on_words() {
        let f5 = fp(5);
        let m2 = Ring::matrix_ring(2, f5.clone()).unwrap();
        let dom = RingDomain { ring: m2.clone() };
        let mut rng = SplitMix64::new(19);
        for _ in 0..10 {
            let args: Vec<RingElement> = (0..3)
                .map(|_| m2.element_at(rng.below_u128(m2.order().unwrap())))
                .collect();
            let w1 = NcPoly::monomial(&f5, vec![1, 2], f5.one());
            let w2 = NcPoly::monomial(&f5, vec![3, 1], f5.one());
            let prod = w1.mul(&w2).unwrap();
            let lhs = prod.eval(&dom, &args).unwrap();
            let rhs = w1
                .eval(&dom, &args)
                .unwrap()
                .mul(&w2.eval(&dom, &args).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn degree_predicates() {
        let q = Ring::rationals();
        assert!(st_n(&q, 4).unwrap().is_multilinear());
        let ids = named_identities(&q).unwrap();
        assert!(ids.f2.is_multilinear());
        // x1^2 x2 + x1 x2 is neither multilinear nor multihomogeneous
        let p = NcPoly::monomial(&q, vec![1, 1, 2], q.one())
            .add(&NcPoly::monomial(&q, vec![1, 2], q.one()))
            .unwrap();
        let info = p.degree_info();
        assert!(!info.multilinear);
        assert!(!info.multihomogeneous);
    }

    #[test]
    fn genov_2_2_shape() {
        let f2 = fp(2);
        let g = genov(&f2, 2, 2).unwrap();
        // expanded form matches (x^4 - x)(1 - [y,x])(y^2 - y) directly
        let x = NcPoly::var(&f2, 1);
        let y = NcPoly::var(&f2, 2);
        let expected = x
            .pow(4)
            .unwrap()
            .sub(&x)
            .unwrap()
            .mul(&NcPoly::one(&f2).sub(&y.commutator(&x).unwrap()).unwrap())
            .unwrap()
            .mul(&y.pow(2).unwrap().sub(&y).unwrap())
            .unwrap();
        assert_eq!(g.expand(&f2, 100_000).unwrap(), expected);
    }

    #[test]
    fn genov_collapses_on_equal_arguments() {
        // F_{p,q}(x,x) = (x^q - x)(x^(q^2) - x)...(x^(q^p) - x), because
        // R_{p,q}(x,x) = 1
        for (p, q) in [(2u64, 2u64), (2, 4), (3, 3)] {
            let f = fp(p);
            let g = genov(&f, p, q).unwrap();
            let free = FreeDomain { ring: f.clone(), term_guard: 1_000_000 };
            let x = NcPoly::var(&f, 1);
            let collapsed = g.eval(&free, &[x.clone(), x.clone()]).unwrap();
            let mut expected = NcPoly::one(&f);
            for t in 1..=p as u32 {
                expected = expected
                    .mul(&x.pow(q.pow(t) as u32).unwrap().sub(&x).unwrap())
                    .unwrap();
            }
            assert_eq!(collapsed, expected, "p={p} q={q}");
        }
    }

    #[test]
    fn genov_structural_and_expanded_agree_on_random_matrices() {
        let mut rng = SplitMix64::new(29);
        for (p, q, base) in [(2u64, 2u64, fp(2)), (2, 4, Ring::galois_field(4).unwrap())] {
            let m2 = Ring::matrix_ring(2, base).unwrap();
            let coeff = fp(p);
            let tree = genov(&coeff, p, q).unwrap();
            let expanded = tree.expand(&coeff, 1_000_000).unwrap();
            let dom = RingDomain { ring: m2.clone() };
            for _ in 0..50 {
                let a = m2.element_at(rng.below_u128(m2.order().unwrap()));
                let b = m2.element_at(rng.below_u128(m2.order().unwrap()));
                let lhs = tree.eval(&dom, &[a.clone(), b.clone()]).unwrap();
                let rhs = expanded.eval(&dom, &[a, b]).unwrap();
                assert_eq!(lhs, rhs, "p={p} q={q}");
            }
        }
    }

    #[test]
    fn ad_power_expansion() {
        // (y ad x)^2 = [[y,x],x] expands to the four expected words
        let q = Ring::rationals();
        let y = NcPoly::var(&q, 2);
        let x = NcPoly::var(&q, 1);
        let expanded = y.ad_pow(&x, 2).unwrap();
        // [[y,x],x] = yxx - 2xyx + xxy
        let yxx = NcPoly::monomial(&q, vec![2, 1, 1], q.one());
        let xyx = NcPoly::monomial(&q, vec![1, 2, 1], q.from_int(-2));
        let xxy = NcPoly::monomial(&q, vec![1, 1, 2], q.one());
        assert_eq!(expanded, yxx.add(&xyx).unwrap().add(&xxy).unwrap());
    }
}
