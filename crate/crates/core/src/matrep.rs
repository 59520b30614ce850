//! Matrix realization in characteristic p: the ladder matrices A0 and B0
//! with closed-form powers, the homomorphism into p x p matrices over
//! B[x, y] sending x to xI + A0 and y to yI + B0, the evaluation at
//! (x, y) = (alpha, 0), the closed forms for h(A) and its companions, and
//! the constructive generation of scaled matrix units from I, C_alpha and
//! D_alpha alone.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::arith::{factorial, inv_mod, is_prime};
use crate::error::{Error, Result};
use crate::poly::CommPoly;
use crate::ring::{Ring, RingElement};
use crate::weyl::WeylElement;

/// Square matrix with entries in B[x, y].
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    n: usize,
    ring: Ring,
    entries: Vec<CommPoly>,
}

impl PolyMatrix {
    pub fn zero(n: usize, ring: &Ring) -> PolyMatrix {
        PolyMatrix {
            n,
            ring: ring.clone(),
            entries: vec![CommPoly::zero(ring, &["x", "y"]); n * n],
        }
    }

    pub fn identity(n: usize, ring: &Ring) -> PolyMatrix {
        let mut out = PolyMatrix::zero(n, ring);
        for i in 1..=n {
            out.set(i, i, CommPoly::one(ring, &["x", "y"]));
        }
        out
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Entry (i, j), 1-based.
    pub fn entry(&self, i: usize, j: usize) -> &CommPoly {
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, p: CommPoly) {
        self.entries[(i - 1) * self.n + (j - 1)] = p;
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.add(b)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        let n = self.n;
        let mut out = PolyMatrix::zero(n, &self.ring);
        for i in 1..=n {
            for k in 1..=n {
                if self.entry(i, k).is_zero() {
                    continue;
                }
                for j in 1..=n {
                    if other.entry(k, j).is_zero() {
                        continue;
                    }
                    let term = self.entry(i, k).mul(other.entry(k, j))?;
                    out.set(i, j, out.entry(i, j).add(&term)?);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, beta: &RingElement) -> Result<PolyMatrix> {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scale(beta)?;
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<PolyMatrix> {
        let mut acc = PolyMatrix::identity(self.n, &self.ring);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

fn check_char(p: u64, base: &Ring) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if base.characteristic() != p {
        return Err(Error::CharMismatch(format!(
            "matrix size {p} must equal the characteristic of {base} (= {})",
            base.characteristic()
        )));
    }
    Ok(())
}

/// The subdiagonal ladder: sum of E_(i+1,i).
pub fn a0_matrix(p: u64, base: &Ring) -> Result<RingElement> {
    check_char(p, base)?;
    let ring = Ring::matrix_ring(p as usize, base.clone())?;
    let mut acc = ring.zero();
    for i in 1..p as usize {
        acc = acc.add(&ring.matrix_unit(i + 1, i))?;
    }
    Ok(acc)
}

/// The weighted superdiagonal ladder: sum of i * E_(i,i+1).
pub fn b0_matrix(p: u64, base: &Ring) -> Result<RingElement> {
    check_char(p, base)?;
    let ring = Ring::matrix_ring(p as usize, base.clone())?;
    let mut acc = ring.zero();
    for i in 1..p as usize {
        acc = acc.add(&ring.matrix_unit_scaled(i, i + 1, base.from_int(i as i64)))?;
    }
    Ok(acc)
}

/// Closed form A0^k = sum of E_(k+i,i) for i = 1..=p-k.
pub fn a0_pow_closed(p: u64, base: &Ring, k: u32) -> Result<RingElement> {
    check_char(p, base)?;
    let ring = Ring::matrix_ring(p as usize, base.clone())?;
    if k == 0 {
        return Ok(ring.one());
    }
    let mut acc = ring.zero();
    for i in 1..=(p as usize).saturating_sub(k as usize) {
        acc = acc.add(&ring.matrix_unit(k as usize + i, i))?;
    }
    Ok(acc)
}

/// Closed form B0^k = sum of (k+i-1)!/(i-1)! E_(i,k+i) for i = 1..=p-k.
pub fn b0_pow_closed(p: u64, base: &Ring, k: u32) -> Result<RingElement> {
    check_char(p, base)?;
    let ring = Ring::matrix_ring(p as usize, base.clone())?;
    if k == 0 {
        return Ok(ring.one());
    }
    let mut acc = ring.zero();
    for i in 1..=(p as usize).saturating_sub(k as usize) {
        let num = factorial(k as u64 + i as u64 - 1);
        let den = factorial(i as u64 - 1);
        let scale = base.from_bigint(&(num / den));
        acc = acc.add(&ring.matrix_unit_scaled(i, k as usize + i, scale))?;
    }
    Ok(acc)
}

/// A = xI + A0 over B[x, y].
pub fn a_poly_matrix(p: u64, base: &Ring) -> Result<PolyMatrix> {
    check_char(p, base)?;
    let n = p as usize;
    let x = CommPoly::variable(base, &["x", "y"], 0);
    let mut out = PolyMatrix::zero(n, base);
    for i in 1..=n {
        out.set(i, i, x.clone());
    }
    for i in 1..n {
        out.set(i + 1, i, CommPoly::one(base, &["x", "y"]));
    }
    Ok(out)
}

/// B = yI + B0 over B[x, y].
pub fn b_poly_matrix(p: u64, base: &Ring) -> Result<PolyMatrix> {
    check_char(p, base)?;
    let n = p as usize;
    let y = CommPoly::variable(base, &["x", "y"], 1);
    let mut out = PolyMatrix::zero(n, base);
    for i in 1..=n {
        out.set(i, i, y.clone());
    }
    for i in 1..n {
        out.set(i, i + 1, CommPoly::from_int(base, &["x", "y"], i as i64));
    }
    Ok(out)
}

/// Image of an element of the h = 1 algebra under x -> A, y -> B.
pub fn phi_bar(a1: &WeylElement, p: u64) -> Result<PolyMatrix> {
    let base = a1.params().ring().clone();
    check_char(p, &base)?;
    if !a1.params().is_h_one() {
        return Err(Error::InvalidInput(
            "the matrix homomorphism is defined on the h = 1 algebra".into(),
        ));
    }
    let a = a_poly_matrix(p, &base)?;
    let b = b_poly_matrix(p, &base)?;
    let n = p as usize;
    let mut a_pows: Vec<PolyMatrix> = vec![PolyMatrix::identity(n, &base)];
    let mut b_pows: Vec<PolyMatrix> = vec![PolyMatrix::identity(n, &base)];
    let mut out = PolyMatrix::zero(n, &base);
    for (k, beta) in a1.terms() {
        while a_pows.len() <= k.i() as usize {
            let next = a_pows.last().unwrap().mul(&a)?;
            a_pows.push(next);
        }
        while b_pows.len() <= k.j() as usize {
            let next = b_pows.last().unwrap().mul(&b)?;
            b_pows.push(next);
        }
        let piece = a_pows[k.i() as usize].mul(&b_pows[k.j() as usize])?.scale(beta)?;
        out = out.add(&piece)?;
    }
    Ok(out)
}

/// Horner evaluation of a univariate polynomial over B at a matrix of
/// polynomials.
pub fn eval_poly_at_matrix(h: &CommPoly, m: &PolyMatrix) -> Result<PolyMatrix> {
    let ring = m.ring().clone();
    let n = m.size();
    let d = match h.degree(0) {
        None => return Ok(PolyMatrix::zero(n, &ring)),
        Some(d) => d,
    };
    let scalar = |c: &RingElement| -> PolyMatrix {
        let mut out = PolyMatrix::zero(n, &ring);
        for i in 1..=n {
            out.set(i, i, CommPoly::constant(&ring, &["x", "y"], c.clone()));
        }
        out
    };
    let mut acc = scalar(&h.coeff([d, 0]));
    for t in (0..d).rev() {
        acc = acc.mul(m)?;
        let c = h.coeff([t, 0]);
        if !c.is_zero() {
            acc = acc.add(&scalar(&c))?;
        }
    }
    Ok(acc)
}

/// Entrywise evaluation x -> alpha, y -> 0 into p x p matrices over B.
pub fn eval_eps(m: &PolyMatrix, alpha: &RingElement) -> Result<RingElement> {
    if !alpha.is_central() {
        return Err(Error::InvalidInput(format!("{alpha} is not central")));
    }
    let base = m.ring().clone();
    let ring = Ring::matrix_ring(m.size(), base.clone())?;
    let zero = base.zero();
    let mut entries = Vec::with_capacity(m.size() * m.size());
    for i in 1..=m.size() {
        for j in 1..=m.size() {
            entries.push(m.entry(i, j).eval_at2(alpha, &zero)?);
        }
    }
    ring.matrix_from_entries(entries)
}

fn inv_factorial_in(base: &Ring, r: u64) -> RingElement {
    let p = base.characteristic();
    debug_assert!(p == 0 || r < p, "factorial must be invertible");
    if p == 0 {
        // only used with rational-like scalars in characteristic zero
        let f = factorial(r);
        let one = base.one();
        one.divide_exact(&base.from_bigint(&f)).expect("nonzero integer in char 0")
    } else {
        let mut f = 1u64;
        for t in 2..=r {
            f = f * (t % p) % p;
        }
        base.from_bigint(&BigInt::from(inv_mod(f, p)))
    }
}

/// Closed form h(A) = sum over i, j <= i of h^(i-j)/(i-j)! E_ij, as a matrix
/// of polynomials in x.
pub fn h_of_a_closed(p: u64, h: &CommPoly) -> Result<PolyMatrix> {
    let base = h.ring().clone();
    check_char(p, &base)?;
    let n = p as usize;
    let mut out = PolyMatrix::zero(n, &base);
    let mut derivs: Vec<CommPoly> = vec![h.rename_vars(&["x"])];
    for r in 1..p {
        let next = derivs[r as usize - 1].derivative(0);
        derivs.push(next);
    }
    for i in 1..=n {
        for j in 1..=i {
            let r = (i - j) as u64;
            let scale = inv_factorial_in(&base, r);
            let entry = derivs[r as usize].scale(&scale)?.widen(&["x", "y"]);
            out.set(i, j, entry);
        }
    }
    Ok(out)
}

/// D_alpha by its definition: the evaluation at (alpha, 0) of B h(A).
pub fn d_alpha(p: u64, h: &CommPoly, alpha: &RingElement) -> Result<RingElement> {
    let base = h.ring().clone();
    check_char(p, &base)?;
    let b = b_poly_matrix(p, &base)?;
    let h_a = eval_poly_at_matrix(h, &a_poly_matrix(p, &base)?)?;
    eval_eps(&b.mul(&h_a)?, alpha)
}

/// D_alpha by the closed form: sum over i < p, j <= i+1 of
/// i/(i-j+1)! h^(i-j+1)(alpha) E_ij.
pub fn d_alpha_closed(p: u64, h: &CommPoly, alpha: &RingElement) -> Result<RingElement> {
    let base = h.ring().clone();
    check_char(p, &base)?;
    let ring = Ring::matrix_ring(p as usize, base.clone())?;
    let h_x = h.rename_vars(&["x"]);
    let mut acc = ring.zero();
    for i in 1..p as usize {
        for j in 1..=i + 1 {
            let r = (i + 1 - j) as u64;
            let value = h_x.derivative_n(r as u32).eval_at(alpha)?;
            let coeff = value
                .mul(&inv_factorial_in(&base, r))?
                .scale_int(&BigInt::from(i as u64));
            if !coeff.is_zero() {
                acc = acc.add(&ring.matrix_unit_scaled(i, j, coeff))?;
            }
        }
    }
    Ok(acc)
}

/// D_(alpha,k) = D_alpha - sum over r < k of D(k, k-r) A0^r, with the D(i,j)
/// entries read from the closed form of D_alpha.
pub fn d_alpha_k(p: u64, h: &CommPoly, alpha: &RingElement, k: u64) -> Result<RingElement> {
    if k == 0 || k >= p {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..{p}")));
    }
    let base = h.ring().clone();
    let d_a = d_alpha_closed(p, h, alpha)?;
    let mut acc = d_a.clone();
    for r in 0..k {
        let entry = d_a
            .matrix_entry(k as usize, (k - r) as usize)
            .expect("matrix payload")
            .clone();
        if entry.is_zero() {
            continue;
        }
        let a0r = a0_pow_closed(p, &base, r as u32)?;
        let ring = Ring::matrix_ring(p as usize, base.clone())?;
        let scalar = ring.embed(&entry)?;
        acc = acc.sub(&scalar.mul(&a0r)?)?;
    }
    Ok(acc)
}

/// Output of the unit-generation algorithm: for every (r, k) a matrix,
/// certified (when possible) equal to beta^(p+k-r-1) E_rk with beta =
/// h(alpha), built from I, C_alpha and D_alpha by ring operations alone.
pub struct ScaledUnits {
    pub p: u64,
    pub beta: RingElement,
    pub units: BTreeMap<(usize, usize), RingElement>,
    pub certified: bool,
    pub warnings: Vec<String>,
}

impl ScaledUnits {
    /// The exponent e with unit (r, k) equal to beta^e E_rk.
    pub fn exponent(&self, r: usize, k: usize) -> u64 {
        (self.p as usize + k - r - 1) as u64
    }
}

pub fn generate_scaled_units(p: u64, h: &CommPoly, alpha: &RingElement) -> Result<ScaledUnits> {
    let base = h.ring().clone();
    check_char(p, &base)?;
    let ring = Ring::matrix_ring(p as usize, base.clone())?;
    let beta = h.rename_vars(&["x"]).eval_at(alpha)?;
    let mut warnings = Vec::new();
    match beta.is_zero_divisor() {
        _ if beta.is_zero() => warnings.push("h(alpha) is zero".to_string()),
        Ok(true) => warnings.push("h(alpha) is a zero divisor".to_string()),
        Ok(false) => {}
        Err(_) => warnings.push("h(alpha) zero-divisor status is undecidable".to_string()),
    }

    let dak: Vec<RingElement> =
        (1..p).map(|k| d_alpha_k(p, h, alpha, k)).collect::<Result<_>>()?;
    let a0_pows: Vec<RingElement> =
        (0..p).map(|k| a0_pow_closed(p, &base, k as u32)).collect::<Result<_>>()?;

    let mut units: BTreeMap<(usize, usize), RingElement> = BTreeMap::new();
    for r in (1..=p as usize).rev() {
        // beta^(p-r) E_r1 = beta^(p-r) A0^(r-1) - sum of the already built
        // units beta^(p-r) E_(r-1+k,k) for k = 2..=p-r+1
        let scale = beta.pow((p as usize - r) as u64)?;
        let mut cur = ring.embed(&scale)?.mul(&a0_pows[r - 1])?;
        for k in 2..=(p as usize - r + 1) {
            cur = cur.sub(&units[&(r - 1 + k, k)])?;
        }
        units.insert((r, 1), cur.clone());
        // walk right along the row: multiplication by D_(alpha,k) scales the
        // unit by k beta, and the inverse of k mod p is absorbed eagerly
        for k in 1..p as usize {
            let inv_k = BigInt::from(inv_mod(k as u64, p));
            cur = cur.mul(&dak[k - 1])?.scale_int(&inv_k);
            units.insert((r, k + 1), cur.clone());
        }
    }

    // certification: every matrix equals its scaled unit exactly
    let mut certified = true;
    for (&(r, k), m) in &units {
        let e = (p as usize + k - r - 1) as u64;
        let expected = ring.matrix_unit_scaled(r, k, beta.pow(e)?);
        if *m != expected {
            certified = false;
            warnings.push(format!(
                "unit ({r},{k}) differs from beta^{e} E_{r}{k}"
            ));
        }
    }
    Ok(ScaledUnits { p, beta, units, certified, warnings })
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 1..=self.n {
            if i > 1 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 1..=self.n {
                if j > 1 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SplitMix64;
    use crate::weyl::{psi_embed, WeylParams};

    fn fp(p: u64) -> Ring {
        Ring::prime_field(p).unwrap()
    }

    fn rand_h(ring: &Ring, rng: &mut SplitMix64, max_deg: u32) -> CommPoly {
        let order = ring.order().unwrap();
        let mut h = CommPoly::zero(ring, &["x"]);
        for d in 0..=max_deg {
            let c = ring.element_at(rng.below_u128(order));
            h = h.add(&CommPoly::monomial(ring, &["x"], [d, 0], c)).unwrap();
        }
        h
    }

    #[test]
    fn ladder_commutator_is_identity() {
        for p in [2u64, 3, 5, 7] {
            let base = fp(p);
            let a0 = a0_matrix(p, &base).unwrap();
            let b0 = b0_matrix(p, &base).unwrap();
            let comm = b0.mul(&a0).unwrap().sub(&a0.mul(&b0).unwrap()).unwrap();
            let ring = Ring::matrix_ring(p as usize, base).unwrap();
            assert_eq!(comm, ring.one(), "p = {p}");
        }
    }

    #[test]
    fn power_closed_forms() {
        for p in [2u64, 3, 5, 7] {
            let base = fp(p);
            let a0 = a0_matrix(p, &base).unwrap();
            let b0 = b0_matrix(p, &base).unwrap();
            for k in 0..p as u32 {
                assert_eq!(a0.pow(k as u64).unwrap(), a0_pow_closed(p, &base, k).unwrap());
                assert_eq!(b0.pow(k as u64).unwrap(), b0_pow_closed(p, &base, k).unwrap());
            }
            // the ladders are nilpotent of index p
            assert!(a0.pow(p).unwrap().is_zero());
            assert!(b0.pow(p).unwrap().is_zero());
        }
        // p = 5, k = 2: entry (1,3) of B0^2 is 2!/0! = 2
        let b02 = b0_pow_closed(5, &fp(5), 2).unwrap();
        assert_eq!(*b02.matrix_entry(1, 3).unwrap(), fp(5).from_int(2));
    }

    #[test]
    fn matrix_homomorphism_kills_the_relation() {
        for p in [2u64, 3, 5] {
            let base = fp(p);
            let a1 = WeylParams::a1(base.clone());
            // yx - xy - 1
            let relation = WeylElement::gen_y(&a1)
                .mul(&WeylElement::gen_x(&a1))
                .unwrap()
                .sub(&WeylElement::gen_x(&a1).mul(&WeylElement::gen_y(&a1)).unwrap())
                .unwrap()
                .sub(&WeylElement::one(&a1))
                .unwrap();
            let img = phi_bar(&relation, p).unwrap();
            assert_eq!(img, PolyMatrix::zero(p as usize, &base));
        }
    }

    #[test]
    fn corner_entries_are_the_monomials() {
        // the (1,1) entry of the image of x^i y^j is x^i y^j
        let base = fp(3);
        let a1 = WeylParams::a1(base.clone());
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                let m = WeylElement::monomial(&a1, i, j, base.one());
                let img = phi_bar(&m, 3).unwrap();
                let expected = CommPoly::monomial(&base, &["x", "y"], [i, j], base.one());
                assert_eq!(*img.entry(1, 1), expected, "monomial ({i},{j})");
            }
        }
    }

    #[test]
    fn squared_b_in_char_2() {
        // p = 2: the image of y^2 is y^2 I, because B0^2 = 0 and 2y = 0
        let base = fp(2);
        let a1 = WeylParams::a1(base.clone());
        let y2 = WeylElement::monomial(&a1, 0, 2, base.one());
        let img = phi_bar(&y2, 2).unwrap();
        let mut expected = PolyMatrix::zero(2, &base);
        let y2_poly = CommPoly::monomial(&base, &["x", "y"], [0, 2], base.one());
        expected.set(1, 1, y2_poly.clone());
        expected.set(2, 2, y2_poly);
        assert_eq!(img, expected);
    }

    #[test]
    fn h_of_a_closed_form_matches_horner() {
        let mut rng = SplitMix64::new(77);
        for p in [2u64, 3, 5] {
            let base = fp(p);
            let a = a_poly_matrix(p, &base).unwrap();
            for _ in 0..20 {
                let h = rand_h(&base, &mut rng, 4);
                let closed = h_of_a_closed(p, &h).unwrap();
                let horner = eval_poly_at_matrix(&h, &a).unwrap();
                assert_eq!(closed, horner, "p={p}, h={h}");
            }
        }
    }

    #[test]
    fn h_of_a_monomial_entries() {
        // h = x^k with k < p: entry (i,j) is C(k, i-j) x^(k-(i-j))
        use crate::arith::binomial;
        let p = 5u64;
        let base = fp(p);
        for k in 1..p as u32 {
            let h = CommPoly::monomial(&base, &["x"], [k, 0], base.one());
            let m = h_of_a_closed(p, &h).unwrap();
            for i in 1..=p as usize {
                for j in 1..=i {
                    let r = (i - j) as u32;
                    let expected = if r > k {
                        CommPoly::zero(&base, &["x", "y"])
                    } else {
                        CommPoly::monomial(&base, &["x", "y"], [k - r, 0], base.one())
                            .scale_int(&binomial(k as u64, r as u64))
                    };
                    assert_eq!(*m.entry(i, j), expected);
                }
            }
        }
    }

    #[test]
    fn constant_h_evaluates_to_scalar_matrix() {
        let base = fp(3);
        let h = CommPoly::from_int(&base, &["x"], 2);
        let m = h_of_a_closed(3, &h).unwrap();
        let mut expected = PolyMatrix::zero(3, &base);
        for i in 1..=3 {
            expected.set(i, i, CommPoly::from_int(&base, &["x", "y"], 2));
        }
        assert_eq!(m, expected);
    }

    #[test]
    fn evaluation_examples() {
        let base = fp(3);
        let alpha = base.from_int(1);
        // the evaluation of A is alpha I + A0
        let a = a_poly_matrix(3, &base).unwrap();
        let c_alpha = eval_eps(&a, &alpha).unwrap();
        let ring = Ring::matrix_ring(3, base.clone()).unwrap();
        let expected = ring
            .embed(&alpha)
            .unwrap()
            .add(&a0_matrix(3, &base).unwrap())
            .unwrap();
        assert_eq!(c_alpha, expected);
        // the evaluation of B is B0
        let b = b_poly_matrix(3, &base).unwrap();
        assert_eq!(eval_eps(&b, &alpha).unwrap(), b0_matrix(3, &base).unwrap());
    }

    #[test]
    fn d_alpha_displayed_matrix_p3() {
        // rows (h', h, 0 / h'', 2h', 2h / 0, 0, 0) at alpha
        let base = fp(3);
        let mut rng = SplitMix64::new(101);
        for _ in 0..10 {
            let h = rand_h(&base, &mut rng, 3);
            let alpha = base.element_at(rng.below_u128(3));
            let d = d_alpha_closed(3, &h, &alpha).unwrap();
            let hv = |r: u32| h.derivative_n(r).eval_at(&alpha).unwrap();
            let two = BigInt::from(2);
            assert_eq!(*d.matrix_entry(1, 1).unwrap(), hv(1));
            assert_eq!(*d.matrix_entry(1, 2).unwrap(), hv(0));
            assert!(d.matrix_entry(1, 3).unwrap().is_zero());
            assert_eq!(*d.matrix_entry(2, 1).unwrap(), hv(2));
            assert_eq!(*d.matrix_entry(2, 2).unwrap(), hv(1).scale_int(&two));
            assert_eq!(*d.matrix_entry(2, 3).unwrap(), hv(0).scale_int(&two));
            for j in 1..=3 {
                assert!(d.matrix_entry(3, j).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn d_alpha_routes_agree() {
        let mut rng = SplitMix64::new(55);
        for p in [2u64, 3, 5] {
            let base = fp(p);
            for _ in 0..10 {
                let h = rand_h(&base, &mut rng, 4);
                let alpha = base.element_at(rng.below_u128(p as u128));
                assert_eq!(
                    d_alpha(p, &h, &alpha).unwrap(),
                    d_alpha_closed(p, &h, &alpha).unwrap(),
                    "p={p}, h={h}, alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn unit_shift_identity() {
        // E_rk D_(alpha,k) = k h(alpha) E_(r,k+1) for all valid r, k
        let mut rng = SplitMix64::new(99);
        for p in [2u64, 3, 5] {
            let base = fp(p);
            let ring = Ring::matrix_ring(p as usize, base.clone()).unwrap();
            for _ in 0..6 {
                let h = rand_h(&base, &mut rng, 3);
                let alpha = base.element_at(rng.below_u128(p as u128));
                let beta = h.eval_at(&alpha).unwrap();
                for k in 1..p {
                    let dak = d_alpha_k(p, &h, &alpha, k).unwrap();
                    for r in 1..=p as usize {
                        let lhs = ring.matrix_unit(r, k as usize).mul(&dak).unwrap();
                        let coeff = beta.scale_int(&BigInt::from(k));
                        let rhs = ring.matrix_unit_scaled(r, k as usize + 1, coeff.clone());
                        assert_eq!(lhs, rhs, "p={p} r={r} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn displayed_d_alpha_k_p3() {
        let base = fp(3);
        let mut rng = SplitMix64::new(13);
        let h = rand_h(&base, &mut rng, 3);
        let alpha = base.from_int(2);
        let ring = Ring::matrix_ring(3, base.clone()).unwrap();
        let d = d_alpha_closed(3, &h, &alpha).unwrap();
        let hp = h.derivative(0).eval_at(&alpha).unwrap();
        let hpp = h.derivative_n(2).eval_at(&alpha).unwrap();
        // D_(alpha,1) = D_alpha - h'(alpha) I
        let d1 = d_alpha_k(3, &h, &alpha, 1).unwrap();
        assert_eq!(d1, d.sub(&ring.embed(&hp).unwrap()).unwrap());
        // D_(alpha,2) = D_alpha - 2h'(alpha) I - h''(alpha) A0
        let d2 = d_alpha_k(3, &h, &alpha, 2).unwrap();
        let expected = d
            .sub(&ring.embed(&hp.scale_int(&BigInt::from(2))).unwrap())
            .unwrap()
            .sub(&ring.embed(&hpp).unwrap().mul(&a0_matrix(3, &base).unwrap()).unwrap())
            .unwrap();
        assert_eq!(d2, expected);
    }

    #[test]
    fn scaled_units_p3_chain() {
        let base = fp(3);
        let h = CommPoly::variable(&base, &["x"], 0)
            .pow(2)
            .unwrap()
            .add(&CommPoly::one(&base, &["x"]))
            .unwrap();
        let alpha = base.from_int(1);
        let out = generate_scaled_units(3, &h, &alpha).unwrap();
        assert!(out.certified, "warnings: {:?}", out.warnings);
        let ring = Ring::matrix_ring(3, base.clone()).unwrap();
        let beta = out.beta.clone();
        // the produced set is exactly beta^(p+k-r-1) E_rk
        for r in 1..=3usize {
            for k in 1..=3usize {
                let e = (3 + k - r - 1) as u64;
                assert_eq!(
                    out.units[&(r, k)],
                    ring.matrix_unit_scaled(r, k, beta.pow(e).unwrap())
                );
            }
        }
        // scalar check: (r,k) = (2,1) has exponent p+k-r-1 = 1
        assert_eq!(out.exponent(2, 1), 1);
    }

    #[test]
    fn scaled_units_p2_h_constant() {
        // h = 1: beta = 1 and the full set of units is produced
        let base = fp(2);
        let h = CommPoly::one(&base, &["x"]);
        let alpha = base.from_int(0);
        let out = generate_scaled_units(2, &h, &alpha).unwrap();
        assert!(out.certified);
        assert!(out.beta.is_one());
        let ring = Ring::matrix_ring(2, base).unwrap();
        for r in 1..=2usize {
            for k in 1..=2usize {
                assert_eq!(out.units[&(r, k)], ring.matrix_unit(r, k));
            }
        }
    }

    #[test]
    fn scaled_units_zero_beta_warns() {
        // h = x at alpha = 0 gives beta = 0: the run completes, uncertified
        let base = fp(3);
        let h = CommPoly::variable(&base, &["x"], 0);
        let out = generate_scaled_units(3, &h, &base.zero()).unwrap();
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn evaluation_chain_is_multiplicative() {
        // composing embedding, matrix homomorphism and evaluation respects
        // products of monomials
        let mut rng = SplitMix64::new(7);
        for p in [2u64, 3, 5] {
            let base = fp(p);
            let params = WeylParams::new(
                base.clone(),
                CommPoly::variable(&base, &["x"], 0),
            )
            .unwrap();
            let alpha = base.element_at(rng.below_u128(p as u128));
            let chain = |a: &WeylElement| -> RingElement {
                let img = psi_embed(a).unwrap().element;
                eval_eps(&phi_bar(&img, p).unwrap(), &alpha).unwrap()
            };
            for i1 in 0..=2u32 {
                for j1 in 0..=2u32 {
                    for i2 in 0..=2u32 {
                        for j2 in 0..=2u32 {
                            let a = WeylElement::monomial(&params, i1, j1, base.one());
                            let b = WeylElement::monomial(&params, i2, j2, base.one());
                            let lhs = chain(&a.mul(&b).unwrap());
                            let rhs = chain(&a).mul(&chain(&b)).unwrap();
                            assert_eq!(lhs, rhs, "p={p} ({i1},{j1})({i2},{j2})");
                        }
                    }
                }
            }
        }
    }
}
