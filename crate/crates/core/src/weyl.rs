//! The parametric Weyl algebra over a coefficient ring B: normal forms in
//! the basis { x^i yh^j }, multiplication through the Ore relation
//! yh*x = x*yh + h, multidegree bookkeeping, the embedding into the h = 1
//! algebra, and the stratified h-power decomposition of its image.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::poly::CommPoly;
use crate::ring::{Ring, RingElement};

/// Multidegree (i, j) of a monomial x^i yh^j, ordered lexicographically with
/// the y-degree dominant: (i, j) < (r, s) iff j < s, or j = s and i < r.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MDeg {
    // y-degree first so the derived order is y-dominant
    j: u32,
    i: u32,
}

impl MDeg {
    pub fn new(i: u32, j: u32) -> MDeg {
        MDeg { j, i }
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn add(&self, other: &MDeg) -> MDeg {
        MDeg::new(self.i + other.i, self.j + other.j)
    }
}

impl fmt::Debug for MDeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// The defining data of the algebra: the coefficient ring B and the central
/// parameter polynomial h in B[x]. The `conv1` flag records whether the
/// leading coefficient of h is a non-zero-divisor (the hypothesis behind the
/// degree and embedding lemmas); constructing an algebra that violates it is
/// allowed, and operations that need the hypothesis check the flag.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeylParams {
    ring: Ring,
    h: CommPoly,
    conv1: bool,
}

impl WeylParams {
    pub fn new(ring: Ring, h: CommPoly) -> Result<WeylParams> {
        if h.ring() != &ring {
            return Err(Error::RingMismatch {
                expected: ring.to_string(),
                found: h.ring().to_string(),
            });
        }
        if h.vars().len() != 1 {
            return Err(Error::InvalidInput("h must be univariate".into()));
        }
        let h = h.rename_vars(&["x"]);
        for (_, c) in h.terms() {
            if !c.is_central() {
                return Err(Error::InvalidInput(format!(
                    "coefficient {c} of h is not central in {ring}"
                )));
            }
        }
        let conv1 = match h.leading_data() {
            Err(_) => false, // h = 0
            Ok((_, lead)) => !lead.is_zero_divisor().unwrap_or(true),
        };
        Ok(WeylParams { ring, h, conv1 })
    }

    /// The algebra with h = 1 over the same coefficient ring.
    pub fn a1(ring: Ring) -> WeylParams {
        let h = CommPoly::one(&ring, &["x"]);
        WeylParams::new(ring, h).expect("constant 1 is central")
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn h(&self) -> &CommPoly {
        &self.h
    }

    pub fn conv1_holds(&self) -> bool {
        self.conv1
    }

    pub fn is_h_one(&self) -> bool {
        self.h == CommPoly::one(&self.ring, &["x"])
    }

    fn check_same(&self, other: &WeylParams) -> Result<()> {
        if self != other {
            return Err(Error::RingMismatch {
                expected: format!("A_[{}]({})", self.h, self.ring),
                found: format!("A_[{}]({})", other.h, other.ring),
            });
        }
        Ok(())
    }
}

/// Normal-form element: finitely many terms (i, j) -> coefficient, standing
/// for the sum of coeff * x^i * yh^j.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    params: WeylParams,
    terms: BTreeMap<MDeg, RingElement>,
}

impl WeylElement {
    pub fn zero(params: &WeylParams) -> WeylElement {
        WeylElement { params: params.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(params: &WeylParams, i: u32, j: u32, coeff: RingElement) -> WeylElement {
        assert_eq!(coeff.ring(), params.ring(), "coefficient ring");
        let mut out = WeylElement::zero(params);
        if !coeff.is_zero() {
            out.terms.insert(MDeg::new(i, j), coeff);
        }
        out
    }

    pub fn one(params: &WeylParams) -> WeylElement {
        WeylElement::monomial(params, 0, 0, params.ring().one())
    }

    pub fn gen_x(params: &WeylParams) -> WeylElement {
        WeylElement::monomial(params, 1, 0, params.ring().one())
    }

    pub fn gen_y(params: &WeylParams) -> WeylElement {
        WeylElement::monomial(params, 0, 1, params.ring().one())
    }

    /// Scalar from B, embedded as a degree-(0,0) element.
    pub fn scalar(params: &WeylParams, beta: RingElement) -> WeylElement {
        WeylElement::monomial(params, 0, 0, beta)
    }

    /// A polynomial in x as an element of the algebra.
    pub fn from_x_poly(params: &WeylParams, p: &CommPoly) -> WeylElement {
        let mut out = WeylElement::zero(params);
        for (e, c) in p.terms() {
            out.terms.insert(MDeg::new(e[0], 0), c.clone());
        }
        out
    }

    pub fn params(&self) -> &WeylParams {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MDeg, &RingElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: u32, j: u32) -> RingElement {
        self.terms
            .get(&MDeg::new(i, j))
            .cloned()
            .unwrap_or_else(|| self.params.ring().zero())
    }

    fn insert_term(&mut self, key: MDeg, c: RingElement) -> Result<()> {
        match self.terms.remove(&key) {
            Some(prev) => {
                let sum = prev.add(&c)?;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(key, c);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &WeylElement) -> Result<WeylElement> {
        self.params.check_same(&other.params)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_term(*k, c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> WeylElement {
        WeylElement {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &WeylElement) -> Result<WeylElement> {
        self.add(&other.neg())
    }

    /// Left action of a coefficient: beta * self.
    pub fn scale(&self, beta: &RingElement) -> Result<WeylElement> {
        let mut out = WeylElement::zero(&self.params);
        for (k, c) in &self.terms {
            out.insert_term(*k, beta.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn scale_int(&self, n: &BigInt) -> WeylElement {
        let beta = self.params.ring().from_bigint(n);
        self.scale(&beta).expect("same ring")
    }

    /// Action of a scalar from the coefficient field of the tower under B.
    pub fn scale_scalar(&self, c: &RingElement) -> Result<WeylElement> {
        let mut out = WeylElement::zero(&self.params);
        for (k, coeff) in &self.terms {
            out.insert_term(*k, crate::ring::coeff_action(c, coeff)?)?;
        }
        Ok(out)
    }

    /// Normal-form product through the Ore relation: yh^j x^r expands as the
    /// binomial sum over k of C(j,k) delta^k(x^r) yh^(j-k), where delta is
    /// the derivation a -> a' h on B[x].
    pub fn mul(&self, other: &WeylElement) -> Result<WeylElement> {
        self.params.check_same(&other.params)?;
        let ring = self.params.ring().clone();
        let h = self.params.h();
        // delta powers of x^r, cached per r and extended on demand
        let mut delta_cache: HashMap<u32, Vec<CommPoly>> = HashMap::new();
        let mut out = WeylElement::zero(&self.params);
        for (ka, beta) in &self.terms {
            for (kb, gamma) in &other.terms {
                let (i, j) = (ka.i(), ka.j());
                let (r, s) = (kb.i(), kb.j());
                let coeff = beta.mul(gamma)?;
                let powers = delta_cache.entry(r).or_insert_with(|| {
                    vec![CommPoly::monomial(&ring, &["x"], [r, 0], ring.one())]
                });
                while powers.len() <= j as usize {
                    let next = powers.last().unwrap().derivative(0).mul(h)?;
                    powers.push(next);
                }
                for k in 0..=j {
                    let b = binomial(j as u64, k as u64);
                    for (e, c) in powers[k as usize].terms() {
                        let term = coeff.mul(c)?.scale_int(&b);
                        out.insert_term(MDeg::new(i + e[0], j - k + s), term)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Closed form for constant h: the product of monomials collapses to a
    /// single sum with coefficients k! C(j,k) C(r,k) h^k.
    pub fn mul_const_h(&self, other: &WeylElement) -> Result<WeylElement> {
        self.params.check_same(&other.params)?;
        let h = self.params.h();
        if h.degree(0).unwrap_or(0) > 0 {
            return Err(Error::InvalidInput("closed form requires constant h".into()));
        }
        let h0 = h.constant_coeff();
        let mut out = WeylElement::zero(&self.params);
        for (ka, beta) in &self.terms {
            for (kb, gamma) in &other.terms {
                let (i, j) = (ka.i(), ka.j());
                let (r, s) = (kb.i(), kb.j());
                let coeff = beta.mul(gamma)?;
                for k in 0..=j.min(r) {
                    let mut n = binomial(j as u64, k as u64) * binomial(r as u64, k as u64);
                    for t in 2..=k as u64 {
                        n *= t;
                    }
                    let term = coeff.mul(&h0.pow(k as u64)?)?.scale_int(&n);
                    out.insert_term(MDeg::new(i + r - k, j + s - k), term)?;
                }
            }
        }
        Ok(out)
    }

    /// Closed form for dual-number coefficients with h = zeta: monomials
    /// multiply as x^(i+r) yh^(s+j) + zeta*j*r x^(i+r-1) yh^(s+j-1), with
    /// negative exponents dropped.
    pub fn mul_dual_zeta(&self, other: &WeylElement) -> Result<WeylElement> {
        self.params.check_same(&other.params)?;
        let ring = self.params.ring().clone();
        let zeta = ring
            .zeta()
            .map_err(|_| Error::InvalidInput("closed form requires dual-number coefficients".into()))?;
        if self.params.h() != &CommPoly::constant(&ring, &["x"], zeta.clone()) {
            return Err(Error::InvalidInput("closed form requires h = zeta".into()));
        }
        let mut out = WeylElement::zero(&self.params);
        for (ka, beta) in &self.terms {
            for (kb, gamma) in &other.terms {
                let (i, j) = (ka.i(), ka.j());
                let (r, s) = (kb.i(), kb.j());
                let coeff = beta.mul(gamma)?;
                out.insert_term(MDeg::new(i + r, s + j), coeff.clone())?;
                if j >= 1 && r >= 1 {
                    let jr = BigInt::from(j as u64) * BigInt::from(r as u64);
                    let corr = coeff.mul(&zeta)?.scale_int(&jr);
                    out.insert_term(MDeg::new(i + r - 1, s + j - 1), corr)?;
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &WeylElement) -> Result<WeylElement> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn pow(&self, e: u32) -> Result<WeylElement> {
        let mut acc = WeylElement::one(&self.params);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Maximal multidegree and its coefficient; errors on zero.
    pub fn mdeg_leading(&self) -> Result<(MDeg, RingElement)> {
        self.terms
            .iter()
            .next_back()
            .map(|(k, c)| (*k, c.clone()))
            .ok_or_else(|| Error::InvalidInput("zero element has no multidegree".into()))
    }

    /// The y-degree-j stratum as a polynomial in x.
    pub fn stratum(&self, j: u32) -> CommPoly {
        let mut p = CommPoly::zero(self.params.ring(), &["x"]);
        for (k, c) in &self.terms {
            if k.j() == j {
                p = p
                    .add(&CommPoly::monomial(self.params.ring(), &["x"], [k.i(), 0], c.clone()))
                    .expect("same ring");
            }
        }
        p
    }

    /// Read-only conversion into the yh-before-x basis; returns coefficients
    /// keyed by (j, i) for yh^j x^i. Exists for tests of the basis fact.
    pub fn to_y_first(&self) -> Result<BTreeMap<(u32, u32), RingElement>> {
        let mut rem = self.clone();
        let mut out = BTreeMap::new();
        while let Ok((k, gamma)) = rem.mdeg_leading() {
            // yh^j x^i has the same leading term x^i yh^j with coefficient 1
            let piece = WeylElement::monomial(&self.params, 0, k.j(), gamma.clone())
                .mul(&WeylElement::monomial(&self.params, k.i(), 0, self.params.ring().one()))?;
            rem = rem.sub(&piece)?;
            out.insert((k.j(), k.i()), gamma);
            if let Ok((k2, _)) = rem.mdeg_leading() {
                debug_assert!(k2 < k, "leading term must strictly drop");
            }
        }
        Ok(out)
    }
}

/// Result of applying the embedding x -> x, yh -> y*h into the h = 1
/// algebra. `injective` restates the stored non-zero-divisor flag: without
/// it the computation is still performed but injectivity is not guaranteed.
pub struct PsiImage {
    pub element: WeylElement,
    pub injective: bool,
}

/// The B-linear algebra embedding of A_h into A_1 (x -> x, yh -> y*h).
pub fn psi_embed(a: &WeylElement) -> Result<PsiImage> {
    let params = a.params();
    let a1 = WeylParams::a1(params.ring().clone());
    let y_image = WeylElement::gen_y(&a1).mul(&WeylElement::from_x_poly(&a1, params.h()))?;
    let mut powers: Vec<WeylElement> = vec![WeylElement::one(&a1)];
    let mut out = WeylElement::zero(&a1);
    for (k, beta) in a.terms() {
        while powers.len() <= k.j() as usize {
            let next = powers.last().unwrap().mul(&y_image)?;
            powers.push(next);
        }
        let piece = WeylElement::monomial(&a1, k.i(), 0, beta.clone())
            .mul(&powers[k.j() as usize])?;
        out = out.add(&piece)?;
    }
    Ok(PsiImage { element: out, injective: params.conv1_holds() })
}

/// Inverse of the embedding on its image: find a in A_h with psi(a) = a1.
/// Errors when a1 is not in the image.
pub fn psi_preimage(a1: &WeylElement, params: &WeylParams) -> Result<WeylElement> {
    if a1.params() != &WeylParams::a1(params.ring().clone()) {
        return Err(Error::InvalidInput("preimage input must live in the h = 1 algebra".into()));
    }
    let mut rem = a1.clone();
    let mut out = WeylElement::zero(params);
    while let Ok((k, _)) = rem.mdeg_leading() {
        let s = k.j();
        let hs = params.h().pow(s)?;
        let c_s = rem.stratum(s).divide_exact(&hs).map_err(|_| {
            Error::DivisionFailed("element is not in the image of the embedding".into())
        })?;
        let mut piece = WeylElement::zero(params);
        for (e, c) in c_s.terms() {
            piece.insert_term(MDeg::new(e[0], s), c.clone())?;
        }
        out = out.add(&piece)?;
        rem = rem.sub(&psi_embed(&piece)?.element)?;
        if let Ok((k2, _)) = rem.mdeg_leading() {
            if k2.j() >= s {
                return Err(Error::DivisionFailed(
                    "element is not in the image of the embedding".into(),
                ));
            }
        }
    }
    Ok(out)
}

/// Write an element of the image of the embedding as the strata list b_j
/// with a1 = sum of b_j(x) h^j y^j. Errors when a1 is not in the image.
pub fn decompose_h_basis(a1: &WeylElement, params: &WeylParams) -> Result<Vec<CommPoly>> {
    if a1.params() != &WeylParams::a1(params.ring().clone()) {
        return Err(Error::InvalidInput("decomposition input must live in the h = 1 algebra".into()));
    }
    let top = match a1.mdeg_leading() {
        Err(_) => return Ok(vec![]),
        Ok((k, _)) => k.j(),
    };
    let mut out = Vec::with_capacity(top as usize + 1);
    for j in (0..=top).rev() {
        let stratum = a1.stratum(j);
        if stratum.is_zero() {
            out.push(CommPoly::zero(params.ring(), &["x"]));
            continue;
        }
        let hj = params.h().pow(j)?;
        let b_j = stratum.divide_exact(&hj).map_err(|_| {
            Error::DivisionFailed("element is not in the image of the embedding".into())
        })?;
        out.push(b_j);
    }
    out.reverse();
    Ok(out)
}

/// Rebuild sum of b_j(x) h^j y^j in the h = 1 algebra from strata.
pub fn rebuild_from_h_basis(bs: &[CommPoly], params: &WeylParams) -> Result<WeylElement> {
    let a1 = WeylParams::a1(params.ring().clone());
    let mut out = WeylElement::zero(&a1);
    for (j, b_j) in bs.iter().enumerate() {
        let poly = b_j.mul(&params.h().pow(j as u32)?)?;
        let mut piece = WeylElement::zero(&a1);
        for (e, c) in poly.terms() {
            piece.insert_term(MDeg::new(e[0], j as u32), c.clone())?;
        }
        out = out.add(&piece)?;
    }
    Ok(out)
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut head = String::new();
            match k.i() {
                0 => {}
                1 => head.push('x'),
                n => head.push_str(&format!("x^{n}")),
            }
            match k.j() {
                0 => {}
                m => {
                    if !head.is_empty() {
                        head.push('*');
                    }
                    if m == 1 {
                        head.push_str("yh");
                    } else {
                        head.push_str(&format!("yh^{m}"));
                    }
                }
            }
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

    fn x_poly(ring: &Ring) -> CommPoly {
        CommPoly::variable(ring, &["x"], 0)
    }

    fn params_h_x(ring: &Ring) -> WeylParams {
        WeylParams::new(ring.clone(), x_poly(ring)).unwrap()
    }

    // ---- a brute-force rewriting oracle on words over {x, y} ----
    //
    // Elements of the free algebra are maps word -> coefficient with letters
    // 0 = x and 1 = y; normalization repeatedly rewrites the first y*x it
    // finds into x*y + h(x), so it is independent of the normal-form engine.
    type Word = Vec<u8>;

    fn oracle_normalize(
        mut terms: BTreeMap<Word, RingElement>,
        h: &CommPoly,
    ) -> BTreeMap<Word, RingElement> {
        loop {
            let target = terms.iter().find_map(|(w, _)| {
                (0..w.len().saturating_sub(1))
                    .find(|&t| w[t] == 1 && w[t + 1] == 0)
                    .map(|t| (w.clone(), t))
            });
            let (word, t) = match target {
                None => return terms,
                Some(pair) => pair,
            };
            let coeff = terms.remove(&word).unwrap();
            let mut swapped = word.clone();
            swapped.swap(t, t + 1);
            oracle_insert(&mut terms, swapped, coeff.clone());
            for (e, c) in h.terms() {
                let mut with_h: Word = word[..t].to_vec();
                with_h.extend(std::iter::repeat(0u8).take(e[0] as usize));
                with_h.extend_from_slice(&word[t + 2..]);
                oracle_insert(&mut terms, with_h, coeff.mul(c).unwrap());
            }
        }
    }

    fn oracle_insert(terms: &mut BTreeMap<Word, RingElement>, w: Word, c: RingElement) {
        match terms.remove(&w) {
            Some(prev) => {
                let sum = prev.add(&c).unwrap();
                if !sum.is_zero() {
                    terms.insert(w, sum);
                }
            }
            None => {
                if !c.is_zero() {
                    terms.insert(w, c);
                }
            }
        }
    }

    fn to_words(a: &WeylElement) -> BTreeMap<Word, RingElement> {
        let mut out = BTreeMap::new();
        for (k, c) in a.terms() {
            let mut w: Word = std::iter::repeat(0u8).take(k.i() as usize).collect();
            w.extend(std::iter::repeat(1u8).take(k.j() as usize));
            oracle_insert(&mut out, w, c.clone());
        }
        out
    }

    fn oracle_mul(a: &WeylElement, b: &WeylElement) -> BTreeMap<Word, RingElement> {
        let (wa, wb) = (to_words(a), to_words(b));
        let mut prod = BTreeMap::new();
        for (u, cu) in &wa {
            for (v, cv) in &wb {
                let mut w = u.clone();
                w.extend_from_slice(v);
                oracle_insert(&mut prod, w, cu.mul(cv).unwrap());
            }
        }
        oracle_normalize(prod, a.params().h())
    }

    fn assert_matches_oracle(a: &WeylElement, b: &WeylElement) {
        let product = a.mul(b).unwrap();
        assert_eq!(to_words(&product), oracle_mul(a, b), "{a} * {b}");
    }

    #[test]
    fn defining_relation() {
        for (ring, h) in [
            (Ring::rationals(), CommPoly::one(&Ring::rationals(), &["x"])),
            (fp(3), x_poly(&fp(3))),
        ] {
            let params = WeylParams::new(ring.clone(), h.clone()).unwrap();
            let lhs = WeylElement::gen_y(&params).mul(&WeylElement::gen_x(&params)).unwrap();
            let rhs = WeylElement::gen_x(&params)
                .mul(&WeylElement::gen_y(&params))
                .unwrap()
                .add(&WeylElement::from_x_poly(&params, &h))
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn mul_examples_against_hand_rewriting() {
        // h = x: yh * x^2 = x^2 yh + 2 x^2
        let q = Ring::rationals();
        let params = params_h_x(&q);
        let lhs = WeylElement::gen_y(&params)
            .mul(&WeylElement::monomial(&params, 2, 0, q.one()))
            .unwrap();
        let expected = WeylElement::monomial(&params, 2, 1, q.one())
            .add(&WeylElement::monomial(&params, 2, 0, q.from_int(2)))
            .unwrap();
        assert_eq!(lhs, expected);
        assert_matches_oracle(
            &WeylElement::gen_y(&params),
            &WeylElement::monomial(&params, 2, 0, q.one()),
        );

        // h = 1 over Q: yh^2 * x^2 = x^2 yh^2 + 4 x yh + 2
        let a1 = WeylParams::a1(q.clone());
        let lhs = WeylElement::monomial(&a1, 0, 2, q.one())
            .mul(&WeylElement::monomial(&a1, 2, 0, q.one()))
            .unwrap();
        let expected = WeylElement::monomial(&a1, 2, 2, q.one())
            .add(&WeylElement::monomial(&a1, 1, 1, q.from_int(4)))
            .unwrap()
            .add(&WeylElement::scalar(&a1, q.from_int(2)))
            .unwrap();
        assert_eq!(lhs, expected);
    }

    #[test]
    fn mul_matches_oracle_on_random_elements() {
        let mut rng = SplitMix64::new(5);
        for (ring, h) in [
            (fp(3), x_poly(&fp(3))),
            (fp(5), {
                let r = fp(5);
                x_poly(&r).pow(2).unwrap().add(&x_poly(&r)).unwrap()
            }),
            (Ring::rationals(), CommPoly::one(&Ring::rationals(), &["x"])),
        ] {
            let params = WeylParams::new(ring.clone(), h).unwrap();
            let order = ring.order();
            for _ in 0..12 {
                let rand_elem = |rng: &mut SplitMix64| {
                    let mut e = WeylElement::zero(&params);
                    for _ in 0..2 {
                        let i = rng.below(3) as u32;
                        let j = rng.below(3) as u32;
                        let c = match order {
                            Some(o) => ring.element_at(rng.below_u128(o)),
                            None => ring.from_int(rng.below(7) as i64 - 3),
                        };
                        e = e.add(&WeylElement::monomial(&params, i, j, c)).unwrap();
                    }
                    e
                };
                let a = rand_elem(&mut rng);
                let b = rand_elem(&mut rng);
                assert_matches_oracle(&a, &b);
            }
        }
    }

    #[test]
    fn const_h_closed_form_instances() {
        let q = Ring::rationals();
        let a1 = WeylParams::a1(q.clone());
        // (i,j,r,s) = (0,2,2,0), h = 1: x^2 yh^2 + 4x yh + 2
        let a = WeylElement::monomial(&a1, 0, 2, q.one());
        let b = WeylElement::monomial(&a1, 2, 0, q.one());
        assert_eq!(a.mul_const_h(&b).unwrap(), a.mul(&b).unwrap());
        // j = 0 collapses to the plain product of powers
        let a = WeylElement::monomial(&a1, 3, 0, q.one());
        let b = WeylElement::monomial(&a1, 2, 4, q.one());
        assert_eq!(
            a.mul_const_h(&b).unwrap(),
            WeylElement::monomial(&a1, 5, 4, q.one())
        );
        // h = 0 gives the commutative product
        let a0 = WeylParams::new(q.clone(), CommPoly::zero(&q, &["x"])).unwrap();
        let a = WeylElement::monomial(&a0, 1, 2, q.one());
        let b = WeylElement::monomial(&a0, 2, 1, q.one());
        assert_eq!(
            a.mul_const_h(&b).unwrap(),
            WeylElement::monomial(&a0, 3, 3, q.one())
        );
    }

    fn zeta_params(p: u64) -> (Ring, WeylParams) {
        let d = Ring::dual(fp(p));
        let h = CommPoly::constant(&d, &["x"], d.zeta().unwrap());
        let params = WeylParams::new(d.clone(), h).unwrap();
        (d, params)
    }

    #[test]
    fn dual_closed_form_instances() {
        let (d, params) = zeta_params(3);
        let zeta = d.zeta().unwrap();
        // xyh * xyh = x^2 yh^2 + zeta x yh
        let a = WeylElement::monomial(&params, 1, 1, d.one());
        let prod = a.mul_dual_zeta(&a).unwrap();
        let expected = WeylElement::monomial(&params, 2, 2, d.one())
            .add(&WeylElement::monomial(&params, 1, 1, zeta.clone()))
            .unwrap();
        assert_eq!(prod, expected);
        assert_eq!(prod, a.mul(&a).unwrap());
        // [yh, x] = zeta
        let comm = WeylElement::gen_y(&params)
            .commutator(&WeylElement::gen_x(&params))
            .unwrap();
        assert_eq!(comm, WeylElement::scalar(&params, zeta.clone()));
        // [x^i yh^j, x^r yh^s] = zeta (jr - is) x^(i+r-1) yh^(s+j-1)
        for (i, j, r, s) in [(1u32, 2u32, 2u32, 1u32), (0, 1, 3, 2), (2, 2, 2, 2)] {
            let a = WeylElement::monomial(&params, i, j, d.one());
            let b = WeylElement::monomial(&params, r, s, d.one());
            let comm = a.commutator(&b).unwrap();
            let factor = BigInt::from(j as i64 * r as i64 - i as i64 * s as i64);
            let expected = if i + r == 0 || s + j == 0 {
                WeylElement::zero(&params)
            } else {
                WeylElement::monomial(&params, i + r - 1, s + j - 1, zeta.clone())
                    .scale_int(&factor)
            };
            assert_eq!(comm, expected);
        }
    }

    #[test]
    fn conv1_flag() {
        let (_, zparams) = zeta_params(3);
        assert!(!zparams.conv1_holds());
        assert!(params_h_x(&fp(3)).conv1_holds());
        assert!(WeylParams::a1(Ring::rationals()).conv1_holds());
    }

    #[test]
    fn mdeg_examples() {
        let q = Ring::rationals();
        let a1 = WeylParams::a1(q.clone());
        let a = WeylElement::monomial(&a1, 2, 3, q.one());
        assert_eq!(a.mdeg_leading().unwrap(), (MDeg::new(2, 3), q.one()));
        // y-degree dominates: 5x^7 + 2yh has leading term 2yh
        let b = WeylElement::monomial(&a1, 7, 0, q.from_int(5))
            .add(&WeylElement::monomial(&a1, 0, 1, q.from_int(2)))
            .unwrap();
        assert_eq!(b.mdeg_leading().unwrap(), (MDeg::new(0, 1), q.from_int(2)));
        let c = WeylElement::scalar(&a1, q.from_int(9));
        assert_eq!(c.mdeg_leading().unwrap(), (MDeg::new(0, 0), q.from_int(9)));
        assert!(WeylElement::zero(&a1).mdeg_leading().is_err());
    }

    #[test]
    fn mdeg_additivity_and_its_failure() {
        // additivity holds when a leading coefficient is not a zero divisor
        let mut rng = SplitMix64::new(17);
        let ring = fp(5);
        let params = params_h_x(&ring);
        for _ in 0..50 {
            let rand_elem = |rng: &mut SplitMix64| loop {
                let mut e = WeylElement::zero(&params);
                for _ in 0..2 {
                    let c = ring.element_at(rng.below_u128(5));
                    e = e
                        .add(&WeylElement::monomial(
                            &params,
                            rng.below(4) as u32,
                            rng.below(4) as u32,
                            c,
                        ))
                        .unwrap();
                }
                if !e.is_zero() {
                    return e;
                }
            };
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            let (da, la) = a.mdeg_leading().unwrap();
            let (db, _) = b.mdeg_leading().unwrap();
            if la.is_zero_divisor().unwrap() {
                continue;
            }
            let (dab, _) = a.mul(&b).unwrap().mdeg_leading().unwrap();
            assert_eq!(dab, da.add(&db));
        }
        // and fails in the algebra with h = zeta: (zeta yh)^2 = 0
        let (d, zparams) = zeta_params(3);
        let zy = WeylElement::monomial(&zparams, 0, 1, d.zeta().unwrap());
        assert!(zy.mul(&zy).unwrap().is_zero());
    }

    #[test]
    fn psi_embedding_examples() {
        let q = Ring::rationals();
        let params = params_h_x(&q);
        let x = psi_embed(&WeylElement::gen_x(&params)).unwrap();
        assert!(x.injective);
        let a1 = WeylParams::a1(q.clone());
        assert_eq!(x.element, WeylElement::gen_x(&a1));
        // psi(yh) = y * h normalizes to x*y + 1 for h = x
        let y = psi_embed(&WeylElement::gen_y(&params)).unwrap().element;
        let expected = WeylElement::monomial(&a1, 1, 1, q.one())
            .add(&WeylElement::one(&a1))
            .unwrap();
        assert_eq!(y, expected);
        // psi(yh^2) = x^2 y^2 + 3 x y + 1
        let y2 = psi_embed(&WeylElement::monomial(&params, 0, 2, q.one())).unwrap().element;
        let expected = WeylElement::monomial(&a1, 2, 2, q.one())
            .add(&WeylElement::monomial(&a1, 1, 1, q.from_int(3)))
            .unwrap()
            .add(&WeylElement::one(&a1))
            .unwrap();
        assert_eq!(y2, expected);
    }

    #[test]
    fn psi_is_multiplicative() {
        let mut rng = SplitMix64::new(23);
        let ring = fp(3);
        let params = params_h_x(&ring);
        for _ in 0..15 {
            let rand_elem = |rng: &mut SplitMix64| {
                let mut e = WeylElement::zero(&params);
                for _ in 0..2 {
                    let c = ring.element_at(rng.below_u128(3));
                    e = e
                        .add(&WeylElement::monomial(
                            &params,
                            rng.below(3) as u32,
                            rng.below(3) as u32,
                            c,
                        ))
                        .unwrap();
                }
                e
            };
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            let lhs = psi_embed(&a.mul(&b).unwrap()).unwrap().element;
            let rhs = psi_embed(&a)
                .unwrap()
                .element
                .mul(&psi_embed(&b).unwrap().element)
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn decompose_examples() {
        let q = Ring::rationals();
        let params = params_h_x(&q);
        let a1 = WeylParams::a1(q.clone());
        // psi(yh^2) decomposes as (1, 3, 1)
        let img = psi_embed(&WeylElement::monomial(&params, 0, 2, q.one())).unwrap().element;
        let bs = decompose_h_basis(&img, &params).unwrap();
        assert_eq!(
            bs,
            vec![
                CommPoly::one(&q, &["x"]),
                CommPoly::from_int(&q, &["x"], 3),
                CommPoly::one(&q, &["x"]),
            ]
        );
        // h*y decomposes as (0, 1)
        let hy = WeylElement::monomial(&a1, 1, 1, q.one());
        assert_eq!(
            decompose_h_basis(&hy, &params).unwrap(),
            vec![CommPoly::zero(&q, &["x"]), CommPoly::one(&q, &["x"])]
        );
        // y alone is not in the image when deg h >= 1
        let y = WeylElement::gen_y(&a1);
        assert!(decompose_h_basis(&y, &params).is_err());
    }

    #[test]
    fn decompose_round_trips() {
        let mut rng = SplitMix64::new(31);
        let ring = fp(5);
        let params = params_h_x(&ring);
        for _ in 0..20 {
            // random element of the image: rebuild from random strata
            let mut bs = Vec::new();
            for _ in 0..3 {
                let mut b = CommPoly::zero(&ring, &["x"]);
                for d in 0..2u32 {
                    let c = ring.element_at(rng.below_u128(5));
                    b = b.add(&CommPoly::monomial(&ring, &["x"], [d, 0], c)).unwrap();
                }
                bs.push(b);
            }
            let a1_elem = rebuild_from_h_basis(&bs, &params).unwrap();
            let decomposed = decompose_h_basis(&a1_elem, &params).unwrap();
            let rebuilt = rebuild_from_h_basis(&decomposed, &params).unwrap();
            assert_eq!(rebuilt, a1_elem);
        }
    }

    #[test]
    fn psi_preimage_round_trips() {
        let ring = fp(3);
        let params = params_h_x(&ring);
        let mut rng = SplitMix64::new(41);
        for _ in 0..15 {
            let mut a = WeylElement::zero(&params);
            for _ in 0..3 {
                let c = ring.element_at(rng.below_u128(3));
                a = a
                    .add(&WeylElement::monomial(
                        &params,
                        rng.below(3) as u32,
                        rng.below(3) as u32,
                        c,
                    ))
                    .unwrap();
            }
            let img = psi_embed(&a).unwrap().element;
            assert_eq!(psi_preimage(&img, &params).unwrap(), a);
        }
    }

    #[test]
    fn y_first_basis_conversion_round_trips() {
        let ring = fp(5);
        let params = params_h_x(&ring);
        let mut rng = SplitMix64::new(47);
        for _ in 0..15 {
            let mut a = WeylElement::zero(&params);
            for _ in 0..3 {
                let c = ring.element_at(rng.below_u128(5));
                a = a
                    .add(&WeylElement::monomial(
                        &params,
                        rng.below(4) as u32,
                        rng.below(4) as u32,
                        c,
                    ))
                    .unwrap();
            }
            let yx = a.to_y_first().unwrap();
            let mut rebuilt = WeylElement::zero(&params);
            for ((j, i), gamma) in yx {
                let piece = WeylElement::monomial(&params, 0, j, gamma)
                    .mul(&WeylElement::monomial(&params, i, 0, ring.one()))
                    .unwrap();
                rebuilt = rebuilt.add(&piece).unwrap();
            }
            assert_eq!(rebuilt, a);
        }
    }

    #[test]
    fn display_form() {
        let q = Ring::rationals();
        let a1 = WeylParams::a1(q.clone());
        let e = WeylElement::monomial(&a1, 2, 3, q.one())
            .add(&WeylElement::monomial(&a1, 1, 1, q.from_int(4)))
            .unwrap()
            .add(&WeylElement::one(&a1))
            .unwrap();
        assert_eq!(e.to_string(), "x^2*yh^3 + 4*x*yh + 1");
    }
}
