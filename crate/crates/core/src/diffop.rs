//! Differential operators on B[z] in the normal form sum of p_k(z) D^k,
//! where D is the plain derivative. Composition reduces through the Leibniz
//! rule; in characteristic p every stratum with k >= p acts as zero and is
//! dropped. The operator realization of the Weyl algebra sends x to
//! multiplication by z and yh to h(z) D, and the characteristic-zero
//! witness construction lives here.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{binomial, factorial};
use crate::error::{Error, Result};
use crate::freealg::NcPoly;
use crate::linalg;
use crate::poly::CommPoly;
use crate::ring::{Ring, RingElement};
use crate::weyl::{WeylElement, WeylParams};

#[derive(Clone, PartialEq, Eq)]
pub struct DiffOperator {
    ring: Ring,
    h: CommPoly,
    /// k -> p_k(z), canonical: no zero strata, no k >= char(B) when positive
    strata: BTreeMap<u32, CommPoly>,
}

impl DiffOperator {
    pub fn zero(ring: &Ring, h: &CommPoly) -> DiffOperator {
        DiffOperator { ring: ring.clone(), h: h.rename_vars(&["x"]), strata: BTreeMap::new() }
    }

    pub fn identity(ring: &Ring, h: &CommPoly) -> DiffOperator {
        let mut out = DiffOperator::zero(ring, h);
        out.set_stratum(0, CommPoly::one(ring, &["z"]));
        out
    }

    /// Multiplication by a polynomial q(z).
    pub fn mult_by(ring: &Ring, h: &CommPoly, q: CommPoly) -> DiffOperator {
        let mut out = DiffOperator::zero(ring, h);
        out.set_stratum(0, q.rename_vars(&["z"]));
        out
    }

    /// Multiplication by z.
    pub fn chi(ring: &Ring, h: &CommPoly) -> DiffOperator {
        DiffOperator::mult_by(ring, h, CommPoly::variable(ring, &["z"], 0))
    }

    /// D^k, the k-th derivative operator.
    pub fn partial(ring: &Ring, h: &CommPoly, k: u32) -> DiffOperator {
        let mut out = DiffOperator::zero(ring, h);
        out.set_stratum(k, CommPoly::one(ring, &["z"]));
        out
    }

    /// h(z) D, the derivation realizing yh.
    pub fn h_chi_partial(ring: &Ring, h: &CommPoly) -> DiffOperator {
        let mut out = DiffOperator::zero(ring, h);
        out.set_stratum(1, h.rename_vars(&["z"]));
        out
    }

    pub fn from_strata(
        ring: &Ring,
        h: &CommPoly,
        strata: impl IntoIterator<Item = (u32, CommPoly)>,
    ) -> DiffOperator {
        let mut out = DiffOperator::zero(ring, h);
        for (k, p) in strata {
            let mut p = p.rename_vars(&["z"]);
            if let Some(existing) = out.strata.get(&k) {
                p = existing.add(&p).expect("same ring");
            }
            out.strata.remove(&k);
            out.set_stratum(k, p);
        }
        out
    }

    fn set_stratum(&mut self, k: u32, p: CommPoly) {
        let char_p = self.ring.characteristic();
        // D^p = 0 on B[z] in characteristic p
        if char_p > 0 && k as u64 >= char_p {
            return;
        }
        if !p.is_zero() {
            self.strata.insert(k, p);
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn h(&self) -> &CommPoly {
        &self.h
    }

    pub fn is_zero(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn strata(&self) -> impl Iterator<Item = (&u32, &CommPoly)> {
        self.strata.iter()
    }

    pub fn stratum(&self, k: u32) -> CommPoly {
        self.strata
            .get(&k)
            .cloned()
            .unwrap_or_else(|| CommPoly::zero(&self.ring, &["z"]))
    }

    fn check_compatible(&self, other: &DiffOperator) -> Result<()> {
        if self.ring != other.ring || self.h != other.h {
            return Err(Error::RingMismatch {
                expected: format!("operators over {} with h = {}", self.ring, self.h),
                found: format!("operators over {} with h = {}", other.ring, other.h),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffOperator) -> Result<DiffOperator> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, p) in &other.strata {
            let sum = out.stratum(*k).add(p)?;
            out.strata.remove(k);
            out.set_stratum(*k, sum);
        }
        Ok(out)
    }

    pub fn neg(&self) -> DiffOperator {
        DiffOperator {
            ring: self.ring.clone(),
            h: self.h.clone(),
            strata: self.strata.iter().map(|(k, p)| (*k, p.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &DiffOperator) -> Result<DiffOperator> {
        self.add(&other.neg())
    }

    pub fn scale(&self, beta: &RingElement) -> Result<DiffOperator> {
        let mut out = DiffOperator::zero(&self.ring, &self.h);
        for (k, p) in &self.strata {
            out.set_stratum(*k, p.scale(beta)?);
        }
        Ok(out)
    }

    /// Action of a scalar from the coefficient field of the tower under B.
    pub fn scale_scalar(&self, c: &RingElement) -> Result<DiffOperator> {
        let mut out = DiffOperator::zero(&self.ring, &self.h);
        for (k, p) in &self.strata {
            out.set_stratum(*k, p.scale_scalar(c)?);
        }
        Ok(out)
    }

    /// Normal form of the composition self then other (self acts second):
    /// D^k q(z) = sum over m of C(k,m) q^(m)(z) D^(k-m).
    pub fn compose(&self, other: &DiffOperator) -> Result<DiffOperator> {
        self.check_compatible(other)?;
        let mut out = DiffOperator::zero(&self.ring, &self.h);
        for (k, p_k) in &self.strata {
            for (l, q_l) in &other.strata {
                let mut deriv = q_l.clone();
                for m in 0..=*k {
                    let b = binomial(*k as u64, m as u64);
                    if !b.is_zero() && !deriv.is_zero() {
                        let piece = p_k.mul(&deriv)?.scale_int(&b);
                        let target = k - m + l;
                        let sum = out.stratum(target).add(&piece)?;
                        out.strata.remove(&target);
                        out.set_stratum(target, sum);
                    }
                    if m < *k {
                        deriv = deriv.derivative(0);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<DiffOperator> {
        let mut acc = DiffOperator::identity(&self.ring, &self.h);
        for _ in 0..e {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Apply to a polynomial f(z): sum of p_k * f^(k).
    pub fn apply(&self, f: &CommPoly) -> Result<CommPoly> {
        let f = f.rename_vars(&["z"]);
        let mut acc = CommPoly::zero(&self.ring, &["z"]);
        for (k, p_k) in &self.strata {
            let deriv = f_derivative_n(&f, *k);
            if !deriv.is_zero() {
                acc = acc.add(&p_k.mul(&deriv)?)?;
            }
        }
        Ok(acc)
    }
}

fn f_derivative_n(f: &CommPoly, k: u32) -> CommPoly {
    let mut acc = f.clone();
    for _ in 0..k {
        acc = acc.derivative(0);
    }
    acc
}

/// Operator realization of the parametric Weyl algebra: x acts as
/// multiplication by z and yh acts as the derivation h(z) D. An algebra
/// homomorphism because [h(z) D, z] = h(z).
pub fn phi_rep(a: &WeylElement) -> Result<DiffOperator> {
    let params = a.params();
    let ring = params.ring().clone();
    let h = params.h().clone();
    let delta = DiffOperator::h_chi_partial(&ring, &h);
    let mut delta_powers: Vec<DiffOperator> = vec![DiffOperator::identity(&ring, &h)];
    let mut out = DiffOperator::zero(&ring, &h);
    for (k, beta) in a.terms() {
        while delta_powers.len() <= k.j() as usize {
            let next = delta_powers.last().unwrap().compose(&delta)?;
            delta_powers.push(next);
        }
        // z^i * (h D)^j, scaled by the coefficient
        let zi = CommPoly::monomial(&ring, &["z"], [k.i(), 0], ring.one());
        let mut piece = DiffOperator::zero(&ring, &h);
        for (l, q) in &delta_powers[k.j() as usize].strata {
            piece.set_stratum(*l, zi.mul(q)?.scale(beta)?);
        }
        out = out.add(&piece)?;
    }
    Ok(out)
}

/// Operator realization of the h = 1 algebra: x -> z, y -> D.
pub fn phi_a1(a1: &WeylElement, h: &CommPoly) -> Result<DiffOperator> {
    let params = a1.params();
    if !params.is_h_one() {
        return Err(Error::InvalidInput("phi_a1 expects an element of the h = 1 algebra".into()));
    }
    let ring = params.ring().clone();
    let mut out = DiffOperator::zero(&ring, h);
    for (k, beta) in a1.terms() {
        let poly = CommPoly::monomial(&ring, &["z"], [k.i(), 0], beta.clone());
        let sum = out.stratum(k.j()).add(&poly)?;
        out.strata.remove(&k.j());
        out.set_stratum(k.j(), sum);
    }
    Ok(out)
}

/// One composite of the witness run: the permutation word and the polynomial
/// it produces when the composite operator is applied to z.
pub struct WitnessOutcome {
    pub word: Vec<u32>,
    pub value: CommPoly,
}

/// Report of the characteristic-zero witness construction: for a multilinear
/// f of degree N with nonzero identity coefficient, the operators
/// F_j = z^(2j) h(z)^j D^j at orders j_k = (d+2)^(N-k) separate the identity
/// permutation from all others.
pub struct WitnessReport {
    pub n: u32,
    pub orders: Vec<u64>,
    pub target_degree: u64,
    pub expected_leading_coeff: RingElement,
    pub outcomes: Vec<WitnessOutcome>,
    pub only_identity_nonzero: bool,
    pub leading_matches: bool,
    pub total: CommPoly,
    pub total_nonzero: bool,
    pub passed: bool,
}

const WITNESS_MAX_N: u32 = 4;
const WITNESS_MAX_DEG_H: u32 = 2;

/// F_j applied to g: z^(2j) h(z)^j g^(j).
fn witness_apply(h_z: &CommPoly, j: u64, g: &CommPoly) -> Result<CommPoly> {
    let ring = h_z.ring().clone();
    let deriv = f_derivative_n(g, j as u32);
    if deriv.is_zero() {
        return Ok(CommPoly::zero(&ring, &["z"]));
    }
    let z2j = CommPoly::monomial(&ring, &["z"], [2 * j as u32, 0], ring.one());
    z2j.mul(&h_z.pow(j as u32)?)?.mul(&deriv)
}

pub fn char_zero_witness(params: &WeylParams, f: &NcPoly) -> Result<WitnessReport> {
    let ring = params.ring().clone();
    if ring.characteristic() != 0 {
        return Err(Error::CharMismatch(
            "the witness construction needs characteristic zero".into(),
        ));
    }
    if !params.conv1_holds() {
        return Err(Error::InvalidInput(
            "the witness construction needs a non-zero-divisor leading coefficient".into(),
        ));
    }
    if !f.is_multilinear() {
        return Err(Error::NotMultilinear("witness input must be multilinear".into()));
    }
    let n = f.max_var();
    let id_word: Vec<u32> = (1..=n).collect();
    if f.coeff(&id_word).is_zero() {
        return Err(Error::InvalidInput(
            "the identity permutation must have a nonzero coefficient".into(),
        ));
    }
    let (deg_h, eta) = params.h().leading_data()?;
    if n > WITNESS_MAX_N || deg_h > WITNESS_MAX_DEG_H {
        return Err(Error::BudgetExceeded(format!(
            "witness run capped at N <= {WITNESS_MAX_N}, deg h <= {WITNESS_MAX_DEG_H}"
        )));
    }
    let d = deg_h as u64;
    let orders: Vec<u64> = (1..=n as u64).map(|k| (d + 2).pow((n as u64 - k) as u32)).collect();
    let target_degree = (d + 2).pow(n);
    let h_z = params.h().rename_vars(&["z"]);
    let z = CommPoly::variable(&ring, &["z"], 0);

    // expected leading coefficient of the identity composite:
    // (product of j_k!) * eta^(sum of j_k)
    let mut fact_prod = BigInt::from(1);
    let mut order_sum = 0u64;
    for &j in &orders {
        fact_prod *= factorial(j);
        order_sum += j;
    }
    let expected_leading_coeff = eta.pow(order_sum)?.scale_int(&fact_prod);

    let mut outcomes = Vec::new();
    let mut only_identity_nonzero = true;
    let mut leading_matches = false;
    let mut total = CommPoly::zero(&ring, &["z"]);
    for (word, coeff) in f.terms() {
        let mut g = z.clone();
        for &v in word.iter().rev() {
            g = witness_apply(&h_z, orders[(v - 1) as usize], &g)?;
            if g.is_zero() {
                break;
            }
        }
        let is_identity = word == &id_word;
        if is_identity {
            if let Ok((deg, lead)) = g.leading_data() {
                leading_matches =
                    deg as u64 == target_degree && lead == expected_leading_coeff;
            }
        } else if !g.is_zero() {
            only_identity_nonzero = false;
        }
        total = total.add(&g.scale_scalar(coeff)?)?;
        outcomes.push(WitnessOutcome { word: word.clone(), value: g });
    }
    let total_nonzero = !total.is_zero();
    let passed = only_identity_nonzero && leading_matches && total_nonzero;
    Ok(WitnessReport {
        n,
        orders,
        target_degree,
        expected_leading_coeff,
        outcomes,
        only_identity_nonzero,
        leading_matches,
        total,
        total_nonzero,
        passed,
    })
}

/// Linear independence of the family z^i h(z)^j D^j (i <= i_max, j <= j_max)
/// as maps on polynomials of degree <= i_max + i_max*(deg h + 1) + i_max,
/// decided by an exact rank computation over the scalar field.
pub fn operator_family_independent(
    ring: &Ring,
    h: &CommPoly,
    i_max: u32,
    j_max: u32,
) -> Result<bool> {
    let leaf = ring
        .leaf_field()
        .ok_or_else(|| Error::UnsupportedRing(format!("{ring} has no scalar field")))?;
    let h_z = h.rename_vars(&["z"]);
    let d = h_z.degree(0).unwrap_or(0);
    let t_max = i_max + i_max * (d + 1) + i_max;
    let max_image_deg = (i_max + j_max * d + t_max) as usize;
    let dim_b = ring.f_basis().map(|b| b.len()).unwrap_or(1);
    let width = (t_max as usize + 1) * (max_image_deg + 1) * dim_b;

    let mut rows = Vec::new();
    for i in 0..=i_max {
        for j in 0..=j_max {
            let mut op = DiffOperator::zero(ring, h);
            let poly = CommPoly::monomial(ring, &["z"], [i, 0], ring.one()).mul(&h_z.pow(j)?)?;
            op.set_stratum(j, poly);
            let mut row = Vec::with_capacity(width);
            for t in 0..=t_max {
                let zt = CommPoly::monomial(ring, &["z"], [t, 0], ring.one());
                let image = op.apply(&zt)?;
                for deg in 0..=max_image_deg {
                    let c = image.coeff([deg as u32, 0]);
                    let coords = ring.coords(&c).ok_or_else(|| {
                        Error::UnsupportedRing(format!("{ring} has no scalar coordinates"))
                    })?;
                    row.extend(coords);
                }
            }
            rows.push(row);
        }
    }
    let count = rows.len();
    Ok(linalg::rank(&rows, &leaf)? == count)
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.strata.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, p) in self.strata.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if p.num_terms() > 1 {
                format!("({p})")
            } else {
                format!("{p}")
            };
            match k {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}*D")?,
                _ => write!(f, "{coeff}*D^{k}")?,
            }
        }
        Ok(())
    }
}
