//! Coefficient rings with exact arithmetic.
//!
//! A [`Ring`] is a shared descriptor for one of the supported coefficient
//! rings: the rationals, prime fields, Galois fields, dual numbers over a
//! base ring, Grassmann algebras, matrix rings, and finite products. A
//! [`RingElement`] pairs a descriptor with a canonical payload. All
//! arithmetic is exact; values are immutable and freely shareable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{inv_mod, is_prime};
use crate::error::{Error, Result};

/// Largest field order the constructors accept.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

/// Largest ring order for which zero divisors are decided by enumeration.
const ZERO_DIVISOR_ENUM_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingKind {
    Rationals,
    PrimeField {
        p: u64,
    },
    /// F_{p^k} as F_p[g] modulo a monic irreducible of degree k (k >= 2).
    /// `modulus` holds the k lower coefficients; the leading one is implied.
    GaloisField {
        p: u64,
        k: u32,
        modulus: Vec<u64>,
    },
    /// base + base*zeta with zeta^2 = 0.
    Dual {
        base: Ring,
    },
    /// Unital Grassmann algebra on `rank` anticommuting nilpotent generators.
    Grassmann {
        rank: u32,
        base: Ring,
    },
    Matrix {
        n: usize,
        base: Ring,
    },
    Product {
        factors: Vec<Ring>,
    },
}

/// Shared handle to a ring descriptor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring(Arc<RingKind>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---- descriptor construction ----

impl Ring {
    pub fn rationals() -> Ring {
        Ring(Arc::new(RingKind::Rationals))
    }

    pub fn prime_field(p: u64) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if p > MAX_FIELD_ORDER {
            return Err(Error::UnsupportedRing(format!(
                "field order {p} exceeds {MAX_FIELD_ORDER}"
            )));
        }
        Ok(Ring(Arc::new(RingKind::PrimeField { p })))
    }

    /// The field of order q = p^k, with the lexicographically least monic
    /// irreducible of degree k over F_p as modulus.
    pub fn galois_field(q: u64) -> Result<Ring> {
        if q < 2 || q > MAX_FIELD_ORDER {
            return Err(Error::UnsupportedRing(format!(
                "field order {q} out of supported range"
            )));
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{q} is not a prime power")));
        }
        let mut k = 0u32;
        let mut m = 1u64;
        while m < q {
            m *= p;
            k += 1;
        }
        if m != q {
            return Err(Error::InvalidInput(format!("{q} is not a prime power")));
        }
        Ring::galois_field_pk(p, k)
    }

    pub fn galois_field_pk(p: u64, k: u32) -> Result<Ring> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        if k == 1 {
            return Ring::prime_field(p);
        }
        let order = (p as u128).pow(k);
        if order > MAX_FIELD_ORDER as u128 {
            return Err(Error::UnsupportedRing(format!(
                "field order {order} exceeds {MAX_FIELD_ORDER}"
            )));
        }
        let modulus = least_irreducible(p, k);
        Ok(Ring(Arc::new(RingKind::GaloisField { p, k, modulus })))
    }

    pub fn dual(base: Ring) -> Ring {
        Ring(Arc::new(RingKind::Dual { base }))
    }

    pub fn grassmann(rank: u32, base: Ring) -> Result<Ring> {
        if rank == 0 || rank > 16 {
            return Err(Error::InvalidInput(format!(
                "grassmann rank {rank} out of supported range 1..=16"
            )));
        }
        Ok(Ring(Arc::new(RingKind::Grassmann { rank, base })))
    }

    pub fn matrix_ring(n: usize, base: Ring) -> Result<Ring> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix size must be >= 1".into()));
        }
        Ok(Ring(Arc::new(RingKind::Matrix { n, base })))
    }

    pub fn product(factors: Vec<Ring>) -> Result<Ring> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("product needs at least one factor".into()));
        }
        Ok(Ring(Arc::new(RingKind::Product { factors })))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }
}

/// Lexicographically least monic irreducible of degree k over F_p, found by
/// scanning coefficient vectors (high degree first) and trial-dividing by
/// every monic polynomial of degree <= k/2.
fn least_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let total = (p as u128).pow(k as u32);
    for code in 0..total {
        // the most significant base-p digit of `code` is the coefficient of
        // x^(k-1), so increasing code scans degree-major lexicographic order
        let mut lower = vec![0u64; k];
        let mut c = code;
        for coeff in lower.iter_mut() {
            *coeff = (c % p as u128) as u64;
            c /= p as u128;
        }
        let mut poly = lower.clone();
        poly.push(1); // monic of degree k
        if fp_poly_is_irreducible(&poly, p) {
            return lower;
        }
    }
    unreachable!("an irreducible of every degree exists over F_p");
}

fn fp_poly_is_irreducible(poly: &[u64], p: u64) -> bool {
    let k = poly.len() - 1;
    if k == 0 {
        return false;
    }
    // try all monic divisors of degree 1..=k/2
    for d in 1..=k / 2 {
        let count = (p as u128).pow(d as u32);
        for code in 0..count {
            let mut div = vec![0u64; d + 1];
            let mut c = code;
            for coeff in div.iter_mut().take(d) {
                *coeff = (c % p as u128) as u64;
                c /= p as u128;
            }
            div[d] = 1;
            if fp_poly_rem(poly, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Remainder of a by b over F_p; empty vec encodes 0. b is monic.
fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for i in 0..=db {
                let idx = shift + i;
                r[idx] = (r[idx] + (p - b[i] % p) * lead) % p;
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

// ---- elements ----

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Rat(BigRational),
    Fp(u64),
    Gf(Vec<u64>),
    Dual(Box<(RingElement, RingElement)>),
    /// word bitmask (bit i = generator e_{i+1}) -> nonzero base coefficient
    Gr(BTreeMap<u32, RingElement>),
    /// row-major n*n grid
    Mat(Vec<RingElement>),
    Prod(Vec<RingElement>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: Ring,
    value: Value,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Ring {
    pub fn zero(&self) -> RingElement {
        let value = match self.kind() {
            RingKind::Rationals => Value::Rat(BigRational::zero()),
            RingKind::PrimeField { .. } => Value::Fp(0),
            RingKind::GaloisField { k, .. } => Value::Gf(vec![0; *k as usize]),
            RingKind::Dual { base } => Value::Dual(Box::new((base.zero(), base.zero()))),
            RingKind::Grassmann { .. } => Value::Gr(BTreeMap::new()),
            RingKind::Matrix { n, base } => Value::Mat(vec![base.zero(); n * n]),
            RingKind::Product { factors } => {
                Value::Prod(factors.iter().map(|r| r.zero()).collect())
            }
        };
        RingElement { ring: self.clone(), value }
    }

    pub fn one(&self) -> RingElement {
        match self.kind() {
            RingKind::Rationals => self.wrap(Value::Rat(BigRational::one())),
            RingKind::PrimeField { .. } => self.wrap(Value::Fp(1)),
            RingKind::GaloisField { k, .. } => {
                let mut v = vec![0; *k as usize];
                v[0] = 1;
                self.wrap(Value::Gf(v))
            }
            RingKind::Dual { base } => self.wrap(Value::Dual(Box::new((base.one(), base.zero())))),
            RingKind::Grassmann { base, .. } => {
                let mut words = BTreeMap::new();
                words.insert(0u32, base.one());
                self.wrap(Value::Gr(words))
            }
            RingKind::Matrix { n, base } => {
                let mut entries = vec![base.zero(); n * n];
                for i in 0..*n {
                    entries[i * n + i] = base.one();
                }
                self.wrap(Value::Mat(entries))
            }
            RingKind::Product { factors } => {
                self.wrap(Value::Prod(factors.iter().map(|r| r.one()).collect()))
            }
        }
    }

    fn wrap(&self, value: Value) -> RingElement {
        RingElement { ring: self.clone(), value }
    }

    pub fn from_int(&self, n: i64) -> RingElement {
        self.from_bigint(&BigInt::from(n))
    }

    /// Canonical image of an integer (n times the unity).
    pub fn from_bigint(&self, n: &BigInt) -> RingElement {
        match self.kind() {
            RingKind::Rationals => self.wrap(Value::Rat(BigRational::from(n.clone()))),
            RingKind::PrimeField { p } => self.wrap(Value::Fp(bigint_mod(n, *p))),
            RingKind::GaloisField { p, k, .. } => {
                let mut v = vec![0; *k as usize];
                v[0] = bigint_mod(n, *p);
                self.wrap(Value::Gf(v))
            }
            RingKind::Dual { base } => {
                self.wrap(Value::Dual(Box::new((base.from_bigint(n), base.zero()))))
            }
            RingKind::Grassmann { base, .. } => {
                let c = base.from_bigint(n);
                let mut words = BTreeMap::new();
                if !c.is_zero() {
                    words.insert(0u32, c);
                }
                self.wrap(Value::Gr(words))
            }
            RingKind::Matrix { n: size, base } => {
                let c = base.from_bigint(n);
                let mut entries = vec![base.zero(); size * size];
                for i in 0..*size {
                    entries[i * size + i] = c.clone();
                }
                self.wrap(Value::Mat(entries))
            }
            RingKind::Product { factors } => {
                self.wrap(Value::Prod(factors.iter().map(|r| r.from_bigint(n)).collect()))
            }
        }
    }

    /// The characteristic: 0 for towers over the rationals.
    pub fn characteristic(&self) -> u64 {
        match self.kind() {
            RingKind::Rationals => 0,
            RingKind::PrimeField { p } | RingKind::GaloisField { p, .. } => *p,
            RingKind::Dual { base }
            | RingKind::Grassmann { base, .. }
            | RingKind::Matrix { base, .. } => base.characteristic(),
            RingKind::Product { factors } => {
                let mut acc = 1u64;
                for f in factors {
                    let c = f.characteristic();
                    if c == 0 {
                        return 0;
                    }
                    acc = num_integer::lcm(acc, c);
                }
                acc
            }
        }
    }

    /// Number of elements, or None when infinite (or beyond u128).
    pub fn order(&self) -> Option<u128> {
        match self.kind() {
            RingKind::Rationals => None,
            RingKind::PrimeField { p } => Some(*p as u128),
            RingKind::GaloisField { p, k, .. } => (*p as u128).checked_pow(*k),
            RingKind::Dual { base } => {
                let b = base.order()?;
                b.checked_mul(b)
            }
            RingKind::Grassmann { rank, base } => {
                let b = base.order()?;
                let dim = 1u32.checked_shl(*rank)?;
                b.checked_pow(dim)
            }
            RingKind::Matrix { n, base } => {
                let b = base.order()?;
                b.checked_pow((n * n) as u32)
            }
            RingKind::Product { factors } => {
                let mut acc = 1u128;
                for f in factors {
                    acc = acc.checked_mul(f.order()?)?;
                }
                Some(acc)
            }
        }
    }

    /// Element with the given enumeration index; inverse of the order used by
    /// [`Ring::enumerate`]. Panics if idx is out of range for a finite ring.
    pub fn element_at(&self, idx: u128) -> RingElement {
        match self.kind() {
            RingKind::Rationals => panic!("cannot enumerate an infinite ring"),
            RingKind::PrimeField { p } => self.wrap(Value::Fp((idx % *p as u128) as u64)),
            RingKind::GaloisField { p, k, .. } => {
                let mut v = vec![0u64; *k as usize];
                let mut c = idx;
                for coeff in v.iter_mut() {
                    *coeff = (c % *p as u128) as u64;
                    c /= *p as u128;
                }
                self.wrap(Value::Gf(v))
            }
            RingKind::Dual { base } => {
                let b = base.order().expect("finite base");
                let lo = base.element_at(idx % b);
                let hi = base.element_at(idx / b);
                self.wrap(Value::Dual(Box::new((lo, hi))))
            }
            RingKind::Grassmann { rank, base } => {
                let b = base.order().expect("finite base");
                let mut words = BTreeMap::new();
                let mut c = idx;
                for w in 0..(1u32 << rank) {
                    let coeff = base.element_at(c % b);
                    c /= b;
                    if !coeff.is_zero() {
                        words.insert(w, coeff);
                    }
                }
                self.wrap(Value::Gr(words))
            }
            RingKind::Matrix { n, base } => {
                let b = base.order().expect("finite base");
                let mut entries = Vec::with_capacity(n * n);
                let mut c = idx;
                for _ in 0..n * n {
                    entries.push(base.element_at(c % b));
                    c /= b;
                }
                self.wrap(Value::Mat(entries))
            }
            RingKind::Product { factors } => {
                let mut comps = Vec::with_capacity(factors.len());
                let mut c = idx;
                for f in factors {
                    let b = f.order().expect("finite factor");
                    comps.push(f.element_at(c % b));
                    c /= b;
                }
                self.wrap(Value::Prod(comps))
            }
        }
    }

    /// All elements of a finite ring, each exactly once, in a fixed order.
    pub fn enumerate(&self) -> Result<impl Iterator<Item = RingElement> + '_> {
        let order = self
            .order()
            .ok_or_else(|| Error::UnsupportedRing(format!("{self} is not finite")))?;
        Ok((0..order).map(move |i| self.element_at(i)))
    }

    /// The scalar field at the bottom of the tower (None for mixed products).
    pub fn leaf_field(&self) -> Option<Ring> {
        match self.kind() {
            RingKind::Rationals | RingKind::PrimeField { .. } | RingKind::GaloisField { .. } => {
                Some(self.clone())
            }
            RingKind::Dual { base }
            | RingKind::Grassmann { base, .. }
            | RingKind::Matrix { base, .. } => base.leaf_field(),
            RingKind::Product { factors } => {
                let first = factors[0].leaf_field()?;
                for f in &factors[1..] {
                    if f.leaf_field()? != first {
                        return None;
                    }
                }
                Some(first)
            }
        }
    }

    /// Basis as a free module over the leaf field, in enumeration order.
    pub fn f_basis(&self) -> Option<Vec<RingElement>> {
        match self.kind() {
            RingKind::Rationals | RingKind::PrimeField { .. } | RingKind::GaloisField { .. } => {
                Some(vec![self.one()])
            }
            RingKind::Dual { base } => {
                let b = base.f_basis()?;
                let mut out: Vec<RingElement> =
                    b.iter().map(|e| self.dual_from_parts(e.clone(), base.zero())).collect();
                out.extend(b.iter().map(|e| self.dual_from_parts(base.zero(), e.clone())));
                Some(out)
            }
            RingKind::Grassmann { rank, base } => {
                let b = base.f_basis()?;
                let mut out = Vec::new();
                for w in 0..(1u32 << rank) {
                    for e in &b {
                        let mut words = BTreeMap::new();
                        words.insert(w, e.clone());
                        out.push(self.wrap(Value::Gr(words)));
                    }
                }
                Some(out)
            }
            RingKind::Matrix { n, base } => {
                let b = base.f_basis()?;
                let mut out = Vec::new();
                for i in 1..=*n {
                    for j in 1..=*n {
                        for e in &b {
                            out.push(self.matrix_unit_scaled(i, j, e.clone()));
                        }
                    }
                }
                Some(out)
            }
            RingKind::Product { factors } => {
                self.leaf_field()?;
                let mut out = Vec::new();
                for (idx, f) in factors.iter().enumerate() {
                    for e in f.f_basis()? {
                        let comps: Vec<RingElement> = factors
                            .iter()
                            .enumerate()
                            .map(|(t, g)| if t == idx { e.clone() } else { g.zero() })
                            .collect();
                        out.push(self.wrap(Value::Prod(comps)));
                    }
                }
                Some(out)
            }
        }
    }

    /// Coordinates of an element in [`Ring::f_basis`] order, as leaf-field
    /// elements.
    pub fn coords(&self, a: &RingElement) -> Option<Vec<RingElement>> {
        if a.ring() != self {
            return None;
        }
        let leaf = self.leaf_field()?;
        let mut out = Vec::new();
        collect_coords(a, &leaf, &mut out);
        Some(out)
    }

    /// Multiplicative generating set used by centrality checks. Empty for
    /// commutative kinds.
    pub fn generators(&self) -> Vec<RingElement> {
        match self.kind() {
            RingKind::Rationals | RingKind::PrimeField { .. } | RingKind::GaloisField { .. } => {
                Vec::new()
            }
            RingKind::Dual { base } => base
                .generators()
                .into_iter()
                .map(|g| self.dual_from_parts(g, base.zero()))
                .collect(),
            RingKind::Grassmann { rank, base } => {
                let mut out: Vec<RingElement> =
                    (1..=*rank).map(|i| self.grassmann_generator(i).unwrap()).collect();
                for g in base.generators() {
                    let mut words = BTreeMap::new();
                    words.insert(0u32, g);
                    out.push(self.wrap(Value::Gr(words)));
                }
                out
            }
            RingKind::Matrix { n, base } => {
                let mut out = Vec::new();
                for i in 1..=*n {
                    for j in 1..=*n {
                        out.push(self.matrix_unit_scaled(i, j, base.one()));
                    }
                }
                for g in base.generators() {
                    let mut entries = vec![base.zero(); n * n];
                    for i in 0..*n {
                        entries[i * n + i] = g.clone();
                    }
                    out.push(self.wrap(Value::Mat(entries)));
                }
                out
            }
            RingKind::Product { factors } => {
                let mut out = Vec::new();
                for (idx, f) in factors.iter().enumerate() {
                    for g in f.generators() {
                        let comps: Vec<RingElement> = factors
                            .iter()
                            .enumerate()
                            .map(|(t, r)| if t == idx { g.clone() } else { r.zero() })
                            .collect();
                        out.push(self.wrap(Value::Prod(comps)));
                    }
                }
                out
            }
        }
    }

    // ---- element constructors ----

    pub fn dual_from_parts(&self, constant: RingElement, zeta_coeff: RingElement) -> RingElement {
        match self.kind() {
            RingKind::Dual { base } => {
                assert_eq!(constant.ring(), base, "dual constant part ring");
                assert_eq!(zeta_coeff.ring(), base, "dual zeta part ring");
                self.wrap(Value::Dual(Box::new((constant, zeta_coeff))))
            }
            _ => panic!("dual_from_parts on a non-dual ring"),
        }
    }

    /// zeta, the square-zero generator of a dual-number ring.
    pub fn zeta(&self) -> Result<RingElement> {
        match self.kind() {
            RingKind::Dual { base } => Ok(self.dual_from_parts(base.zero(), base.one())),
            _ => Err(Error::InvalidInput(format!("{self} has no zeta"))),
        }
    }

    /// e_i (1-indexed) in a Grassmann algebra.
    pub fn grassmann_generator(&self, i: u32) -> Result<RingElement> {
        match self.kind() {
            RingKind::Grassmann { rank, base } => {
                if i == 0 || i > *rank {
                    return Err(Error::InvalidInput(format!(
                        "generator index {i} out of range 1..={rank}"
                    )));
                }
                let mut words = BTreeMap::new();
                words.insert(1u32 << (i - 1), base.one());
                Ok(self.wrap(Value::Gr(words)))
            }
            _ => Err(Error::InvalidInput(format!("{self} is not a Grassmann algebra"))),
        }
    }

    /// Basis word e_{i1}...e_{im} for strictly increasing indices.
    pub fn grassmann_word(&self, indices: &[u32]) -> Result<RingElement> {
        let mut acc = self.one();
        for &i in indices {
            acc = acc.mul(&self.grassmann_generator(i)?)?;
        }
        Ok(acc)
    }

    /// The residue of x in a Galois field presented as F_p[x]/(modulus).
    pub fn gf_generator(&self) -> Result<RingElement> {
        match self.kind() {
            RingKind::GaloisField { k, .. } => {
                let mut v = vec![0u64; *k as usize];
                v[1] = 1;
                Ok(self.wrap(Value::Gf(v)))
            }
            _ => Err(Error::InvalidInput(format!("{self} is not a Galois field"))),
        }
    }

    /// Matrix from row-major entries over the base ring.
    pub fn matrix_from_entries(&self, entries: Vec<RingElement>) -> Result<RingElement> {
        match self.kind() {
            RingKind::Matrix { n, base } => {
                if entries.len() != n * n {
                    return Err(Error::InvalidInput(format!(
                        "expected {} entries, got {}",
                        n * n,
                        entries.len()
                    )));
                }
                for e in &entries {
                    if e.ring() != base {
                        return Err(Error::RingMismatch {
                            expected: base.to_string(),
                            found: e.ring().to_string(),
                        });
                    }
                }
                Ok(self.wrap(Value::Mat(entries)))
            }
            _ => Err(Error::InvalidInput(format!("{self} is not a matrix ring"))),
        }
    }

    /// Matrix unit scaled by a base element; indices are 1-based.
    pub fn matrix_unit_scaled(&self, i: usize, j: usize, c: RingElement) -> RingElement {
        match self.kind() {
            RingKind::Matrix { n, base } => {
                assert!(i >= 1 && i <= *n && j >= 1 && j <= *n, "matrix unit index");
                let mut entries = vec![base.zero(); n * n];
                entries[(i - 1) * n + (j - 1)] = c;
                self.wrap(Value::Mat(entries))
            }
            _ => panic!("matrix_unit_scaled on a non-matrix ring"),
        }
    }

    /// E_ij with 1-based indices.
    pub fn matrix_unit(&self, i: usize, j: usize) -> RingElement {
        match self.kind() {
            RingKind::Matrix { base, .. } => self.matrix_unit_scaled(i, j, base.one()),
            _ => panic!("matrix_unit on a non-matrix ring"),
        }
    }

    pub fn product_from_components(&self, comps: Vec<RingElement>) -> Result<RingElement> {
        match self.kind() {
            RingKind::Product { factors } => {
                if comps.len() != factors.len() {
                    return Err(Error::InvalidInput("wrong number of components".into()));
                }
                for (c, f) in comps.iter().zip(factors) {
                    if c.ring() != f {
                        return Err(Error::RingMismatch {
                            expected: f.to_string(),
                            found: c.ring().to_string(),
                        });
                    }
                }
                Ok(self.wrap(Value::Prod(comps)))
            }
            _ => Err(Error::InvalidInput(format!("{self} is not a product ring"))),
        }
    }

    /// Embed an element of the base ring (or of a deeper level) into this
    /// ring along the canonical unital inclusion.
    pub fn embed(&self, x: &RingElement) -> Result<RingElement> {
        if x.ring() == self {
            return Ok(x.clone());
        }
        match self.kind() {
            RingKind::Dual { base } => {
                Ok(self.dual_from_parts(base.embed(x)?, base.zero()))
            }
            RingKind::Grassmann { base, .. } => {
                let c = base.embed(x)?;
                let mut words = BTreeMap::new();
                if !c.is_zero() {
                    words.insert(0u32, c);
                }
                Ok(self.wrap(Value::Gr(words)))
            }
            RingKind::Matrix { n, base } => {
                let c = base.embed(x)?;
                let mut entries = vec![base.zero(); n * n];
                for i in 0..*n {
                    entries[i * n + i] = c.clone();
                }
                Ok(self.wrap(Value::Mat(entries)))
            }
            RingKind::GaloisField { p, .. } => match x.ring().kind() {
                RingKind::PrimeField { p: q } if q == p => {
                    Ok(self.from_bigint(&BigInt::from(x.as_fp_residue().unwrap())))
                }
                _ => Err(Error::RingMismatch {
                    expected: self.to_string(),
                    found: x.ring().to_string(),
                }),
            },
            RingKind::Product { factors } => {
                let comps: Result<Vec<RingElement>> =
                    factors.iter().map(|f| f.embed(x)).collect();
                Ok(self.wrap(Value::Prod(comps?)))
            }
            _ => Err(Error::RingMismatch {
                expected: self.to_string(),
                found: x.ring().to_string(),
            }),
        }
    }
}

fn collect_coords(a: &RingElement, leaf: &Ring, out: &mut Vec<RingElement>) {
    match (&a.value, a.ring.kind()) {
        (Value::Rat(_), _) | (Value::Fp(_), _) | (Value::Gf(_), _) => out.push(a.clone()),
        (Value::Dual(parts), _) => {
            collect_coords(&parts.0, leaf, out);
            collect_coords(&parts.1, leaf, out);
        }
        (Value::Gr(words), RingKind::Grassmann { rank, base }) => {
            for w in 0..(1u32 << rank) {
                match words.get(&w) {
                    Some(c) => collect_coords(c, leaf, out),
                    None => collect_coords(&base.zero(), leaf, out),
                }
            }
        }
        (Value::Mat(entries), _) => {
            for e in entries {
                collect_coords(e, leaf, out);
            }
        }
        (Value::Prod(comps), _) => {
            for c in comps {
                collect_coords(c, leaf, out);
            }
        }
        _ => unreachable!("payload matches descriptor"),
    }
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let m = n % BigInt::from(p);
    let m = if m.is_negative() { m + BigInt::from(p) } else { m };
    m.to_u64().unwrap()
}

/// Sign of the merge e_wa * e_wb as (-1)^(number of index crossings),
/// assuming the words are disjoint.
fn grassmann_merge_sign(wa: u32, wb: u32) -> i32 {
    let mut crossings = 0u32;
    let mut b = wb;
    while b != 0 {
        let j = b.trailing_zeros();
        crossings += (wa >> (j + 1)).count_ones();
        b &= b - 1;
    }
    if crossings % 2 == 0 {
        1
    } else {
        -1
    }
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rat(r) => r.is_zero(),
            Value::Fp(r) => *r == 0,
            Value::Gf(v) => v.iter().all(|&c| c == 0),
            Value::Dual(parts) => parts.0.is_zero() && parts.1.is_zero(),
            Value::Gr(words) => words.is_empty(),
            Value::Mat(entries) => entries.iter().all(|e| e.is_zero()),
            Value::Prod(comps) => comps.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring.one()
    }

    fn check_same_ring(&self, other: &RingElement) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                expected: self.ring.to_string(),
                found: other.ring.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.check_same_ring(other)?;
        let value = match (&self.value, &other.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            (Value::Fp(a), Value::Fp(b)) => {
                let p = self.prime();
                Value::Fp((a + b) % p)
            }
            (Value::Gf(a), Value::Gf(b)) => {
                let p = self.prime();
                Value::Gf(a.iter().zip(b).map(|(x, y)| (x + y) % p).collect())
            }
            (Value::Dual(a), Value::Dual(b)) => {
                Value::Dual(Box::new((a.0.add(&b.0)?, a.1.add(&b.1)?)))
            }
            (Value::Gr(a), Value::Gr(b)) => {
                let mut words = a.clone();
                for (w, c) in b {
                    merge_word(&mut words, *w, c.clone())?;
                }
                Value::Gr(words)
            }
            (Value::Mat(a), Value::Mat(b)) => {
                let entries: Result<Vec<RingElement>> =
                    a.iter().zip(b).map(|(x, y)| x.add(y)).collect();
                Value::Mat(entries?)
            }
            (Value::Prod(a), Value::Prod(b)) => {
                let comps: Result<Vec<RingElement>> =
                    a.iter().zip(b).map(|(x, y)| x.add(y)).collect();
                Value::Prod(comps?)
            }
            _ => unreachable!("payload matches descriptor"),
        };
        Ok(RingElement { ring: self.ring.clone(), value })
    }

    pub fn neg(&self) -> RingElement {
        let value = match &self.value {
            Value::Rat(a) => Value::Rat(-a),
            Value::Fp(a) => {
                let p = self.prime();
                Value::Fp((p - a % p) % p)
            }
            Value::Gf(a) => {
                let p = self.prime();
                Value::Gf(a.iter().map(|&x| (p - x % p) % p).collect())
            }
            Value::Dual(parts) => Value::Dual(Box::new((parts.0.neg(), parts.1.neg()))),
            Value::Gr(words) => {
                Value::Gr(words.iter().map(|(w, c)| (*w, c.neg())).collect())
            }
            Value::Mat(entries) => Value::Mat(entries.iter().map(|e| e.neg()).collect()),
            Value::Prod(comps) => Value::Prod(comps.iter().map(|c| c.neg()).collect()),
        };
        RingElement { ring: self.ring.clone(), value }
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check_same_ring(other)?;
        let value = match (&self.value, &other.value) {
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a * b),
            (Value::Fp(a), Value::Fp(b)) => {
                let p = self.prime();
                Value::Fp(a * b % p)
            }
            (Value::Gf(a), Value::Gf(b)) => {
                let (p, modulus) = match self.ring.kind() {
                    RingKind::GaloisField { p, modulus, .. } => (*p, modulus),
                    _ => unreachable!(),
                };
                Value::Gf(gf_mul(a, b, p, modulus))
            }
            (Value::Dual(a), Value::Dual(b)) => {
                let constant = a.0.mul(&b.0)?;
                let zeta = a.0.mul(&b.1)?.add(&a.1.mul(&b.0)?)?;
                Value::Dual(Box::new((constant, zeta)))
            }
            (Value::Gr(a), Value::Gr(b)) => {
                let mut words: BTreeMap<u32, RingElement> = BTreeMap::new();
                for (wa, ca) in a {
                    for (wb, cb) in b {
                        if wa & wb != 0 {
                            continue; // repeated generator squares to zero
                        }
                        let mut c = ca.mul(cb)?;
                        if grassmann_merge_sign(*wa, *wb) < 0 {
                            c = c.neg();
                        }
                        merge_word(&mut words, wa | wb, c)?;
                    }
                }
                Value::Gr(words)
            }
            (Value::Mat(a), Value::Mat(b)) => {
                let n = self.matrix_size();
                let base = match self.ring.kind() {
                    RingKind::Matrix { base, .. } => base,
                    _ => unreachable!(),
                };
                let mut entries = vec![base.zero(); n * n];
                for i in 0..n {
                    for k in 0..n {
                        if a[i * n + k].is_zero() {
                            continue;
                        }
                        for j in 0..n {
                            if b[k * n + j].is_zero() {
                                continue;
                            }
                            let term = a[i * n + k].mul(&b[k * n + j])?;
                            entries[i * n + j] = entries[i * n + j].add(&term)?;
                        }
                    }
                }
                Value::Mat(entries)
            }
            (Value::Prod(a), Value::Prod(b)) => {
                let comps: Result<Vec<RingElement>> =
                    a.iter().zip(b).map(|(x, y)| x.mul(y)).collect();
                Value::Prod(comps?)
            }
            _ => unreachable!("payload matches descriptor"),
        };
        Ok(RingElement { ring: self.ring.clone(), value })
    }

    pub fn pow(&self, e: u64) -> Result<RingElement> {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiply by an exact integer (the canonical Z-action).
    pub fn scale_int(&self, n: &BigInt) -> RingElement {
        self.ring
            .from_bigint(n)
            .mul(self)
            .expect("integer image lives in the same ring")
    }

    fn prime(&self) -> u64 {
        match self.ring.kind() {
            RingKind::PrimeField { p } | RingKind::GaloisField { p, .. } => *p,
            _ => unreachable!("prime() on a non-field payload"),
        }
    }

    fn matrix_size(&self) -> usize {
        match self.ring.kind() {
            RingKind::Matrix { n, .. } => *n,
            _ => unreachable!(),
        }
    }

    pub fn as_fp_residue(&self) -> Option<u64> {
        match &self.value {
            Value::Fp(r) => Some(*r),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Constant and zeta parts of a dual-number element.
    pub fn dual_parts(&self) -> Option<(&RingElement, &RingElement)> {
        match &self.value {
            Value::Dual(parts) => Some((&parts.0, &parts.1)),
            _ => None,
        }
    }

    /// Entry (i, j) of a matrix, 1-based.
    pub fn matrix_entry(&self, i: usize, j: usize) -> Option<&RingElement> {
        match &self.value {
            Value::Mat(entries) => {
                let n = self.matrix_size();
                entries.get((i - 1) * n + (j - 1))
            }
            _ => None,
        }
    }

    /// Grassmann coefficient of the word with the given bitmask.
    pub fn grassmann_coeff(&self, word: u32) -> Option<RingElement> {
        match (&self.value, self.ring.kind()) {
            (Value::Gr(words), RingKind::Grassmann { base, .. }) => {
                Some(words.get(&word).cloned().unwrap_or_else(|| base.zero()))
            }
            _ => None,
        }
    }

    /// Inverse in a field (and in dual numbers with invertible constant part).
    pub fn invert(&self) -> Result<RingElement> {
        if self.is_zero() {
            return Err(Error::DivisionFailed("inverse of zero".into()));
        }
        match &self.value {
            Value::Rat(r) => Ok(RingElement {
                ring: self.ring.clone(),
                value: Value::Rat(r.recip()),
            }),
            Value::Fp(r) => {
                let p = self.prime();
                if r % p == 0 {
                    return Err(Error::DivisionFailed("inverse of zero".into()));
                }
                Ok(RingElement {
                    ring: self.ring.clone(),
                    value: Value::Fp(inv_mod(*r, p)),
                })
            }
            Value::Gf(v) => {
                let (p, modulus) = match self.ring.kind() {
                    RingKind::GaloisField { p, modulus, .. } => (*p, modulus.clone()),
                    _ => unreachable!(),
                };
                let inv = gf_invert(v, p, &modulus)?;
                Ok(RingElement { ring: self.ring.clone(), value: Value::Gf(inv) })
            }
            Value::Dual(parts) => {
                // (a + b zeta)^{-1} = a^{-1} - a^{-1} b a^{-1} zeta
                let a_inv = parts.0.invert()?;
                let zeta = a_inv.mul(&parts.1)?.mul(&a_inv)?.neg();
                Ok(self.ring.dual_from_parts(a_inv, zeta))
            }
            _ => Err(Error::UnsupportedRing(format!(
                "no inversion procedure for {}",
                self.ring
            ))),
        }
    }

    /// The unique q with self = q * b, when it exists. Supported in fields,
    /// dual numbers, and finite rings (by search).
    pub fn divide_exact(&self, b: &RingElement) -> Result<RingElement> {
        self.check_same_ring(b)?;
        if b.is_zero() {
            return Err(Error::DivisionFailed("division by zero".into()));
        }
        match &b.value {
            Value::Rat(_) | Value::Fp(_) | Value::Gf(_) => self.mul(&b.invert()?),
            Value::Dual(parts) => {
                if !parts.0.is_zero() {
                    return self.mul(&b.invert()?);
                }
                let (a0, a1) = self.dual_parts().unwrap();
                // b = b1 zeta: q * b = (q0 b1) zeta, so need a0 = 0
                if !a0.is_zero() {
                    return Err(Error::DivisionFailed("quotient does not exist".into()));
                }
                let q0 = a1.divide_exact(&parts.1)?;
                let base_zero = q0.ring().zero();
                Ok(self.ring.dual_from_parts(q0, base_zero))
            }
            _ => {
                let order = self.ring.order().filter(|&o| o <= ZERO_DIVISOR_ENUM_CAP).ok_or_else(
                    || {
                        Error::UnsupportedRing(format!(
                            "no exact-division procedure for {}",
                            self.ring
                        ))
                    },
                )?;
                for idx in 0..order {
                    let q = self.ring.element_at(idx);
                    if q.mul(b)? == *self {
                        return Ok(q);
                    }
                }
                Err(Error::DivisionFailed("quotient does not exist".into()))
            }
        }
    }

    /// True iff the element commutes with the stored generating set of its
    /// ring (hence with the whole ring).
    pub fn is_central(&self) -> bool {
        self.ring.generators().iter().all(|g| {
            self.mul(g).expect("same ring") == g.mul(self).expect("same ring")
        })
    }

    /// True iff some nonzero b gives ab = 0 or ba = 0. Structural rules cover
    /// fields, dual numbers, Grassmann algebras and products; matrix rings
    /// fall back to enumeration when small enough.
    pub fn is_zero_divisor(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::InvalidInput("zero divisor test on zero".into()));
        }
        match (&self.value, self.ring.kind()) {
            (Value::Rat(_), _) | (Value::Fp(_), _) | (Value::Gf(_), _) => Ok(false),
            (Value::Dual(parts), _) => {
                Ok(parts.0.is_zero() || parts.0.is_zero_divisor()?)
            }
            (Value::Gr(words), _) => match words.get(&0) {
                None => Ok(true),
                Some(c) => c.is_zero_divisor(),
            },
            (Value::Prod(comps), _) => {
                for c in comps {
                    if c.is_zero() || c.is_zero_divisor()? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            (Value::Mat(_), _) => {
                let order = self.ring.order().filter(|&o| o <= ZERO_DIVISOR_ENUM_CAP);
                let order = order.ok_or_else(|| {
                    Error::UnsupportedRing(format!(
                        "cannot decide zero divisors in {}",
                        self.ring
                    ))
                })?;
                for idx in 1..order {
                    let b = self.ring.element_at(idx);
                    if self.mul(&b)?.is_zero() || b.mul(self)?.is_zero() {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

fn merge_word(words: &mut BTreeMap<u32, RingElement>, w: u32, c: RingElement) -> Result<()> {
    match words.remove(&w) {
        Some(prev) => {
            let sum = prev.add(&c)?;
            if !sum.is_zero() {
                words.insert(w, sum);
            }
        }
        None => {
            if !c.is_zero() {
                words.insert(w, c);
            }
        }
    }
    Ok(())
}

fn gf_mul(a: &[u64], b: &[u64], p: u64, modulus: &[u64]) -> Vec<u64> {
    let k = a.len();
    let mut tmp = vec![0u64; 2 * k - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            tmp[i + j] = (tmp[i + j] + x * y) % p;
        }
    }
    // reduce by x^k = -modulus (monic)
    for d in (k..2 * k - 1).rev() {
        let c = tmp[d];
        if c == 0 {
            continue;
        }
        tmp[d] = 0;
        for (i, &m) in modulus.iter().enumerate() {
            tmp[d - k + i] = (tmp[d - k + i] + c * (p - m % p)) % p;
        }
    }
    tmp.truncate(k);
    tmp
}

fn gf_invert(a: &[u64], p: u64, modulus: &[u64]) -> Result<Vec<u64>> {
    // extended Euclid in F_p[x] against the degree-k modulus
    let k = a.len();
    let mut full_mod: Vec<u64> = modulus.to_vec();
    full_mod.push(1);
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let mut r0 = full_mod;
    let mut r1: Vec<u64> = a.to_vec();
    trim(&mut r1);
    if r1.is_empty() {
        return Err(Error::DivisionFailed("inverse of zero".into()));
    }
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = fp_poly_divmod(&r0, &r1, p);
        let s = fp_poly_sub(&s0, &fp_poly_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 {
        return Err(Error::DivisionFailed("element is not invertible".into()));
    }
    let scale = inv_mod(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|&c| c * scale % p).collect();
    out.resize(k, 0);
    Ok(out)
}

fn fp_poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    let mut r: Vec<u64> = a.to_vec();
    let mut q = vec![0u64; a.len().saturating_sub(db)];
    while r.len() > db {
        let d = r.len() - 1;
        let c = r[d] * lead_inv % p;
        if c != 0 {
            q[d - db] = c;
            for i in 0..=db {
                r[d - db + i] = (r[d - db + i] + (p - b[i] % p) * c) % p;
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    (q, r)
}

fn fp_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn fp_poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y % p) % p;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Action of a scalar from the coefficient field on an element of an algebra
/// over (a tower above) that field. Falls back to plain multiplication when
/// both sides live in the same ring.
pub fn coeff_action(c: &RingElement, a: &RingElement) -> Result<RingElement> {
    if c.ring() == a.ring() {
        return c.mul(a);
    }
    let leaf = a.ring().leaf_field().ok_or_else(|| {
        Error::UnsupportedRing(format!("{} has no common scalar field", a.ring()))
    })?;
    let c_leaf = if *c.ring() == leaf {
        c.clone()
    } else {
        match (c.ring().kind(), leaf.kind()) {
            (RingKind::PrimeField { p }, RingKind::GaloisField { p: q, .. }) if p == q => {
                leaf.from_bigint(&BigInt::from(c.as_fp_residue().unwrap()))
            }
            (RingKind::PrimeField { p }, _) if leaf.characteristic() == *p => {
                leaf.from_bigint(&BigInt::from(c.as_fp_residue().unwrap()))
            }
            (RingKind::Rationals, _) if leaf.characteristic() == 0 => {
                // leaf is the rationals in every characteristic-zero tower
                return Err(Error::CharMismatch(format!(
                    "cannot act by {} on an algebra over {}",
                    c.ring(),
                    leaf
                )));
            }
            _ => {
                return Err(Error::CharMismatch(format!(
                    "cannot act by {} on an algebra over {}",
                    c.ring(),
                    leaf
                )))
            }
        }
    };
    scale_leaves(a, &c_leaf)
}

fn scale_leaves(a: &RingElement, c: &RingElement) -> Result<RingElement> {
    let value = match &a.value {
        Value::Rat(_) | Value::Fp(_) | Value::Gf(_) => return c.mul(a),
        Value::Dual(parts) => Value::Dual(Box::new((
            scale_leaves(&parts.0, c)?,
            scale_leaves(&parts.1, c)?,
        ))),
        Value::Gr(words) => {
            let mut out = BTreeMap::new();
            for (w, coeff) in words {
                let scaled = scale_leaves(coeff, c)?;
                if !scaled.is_zero() {
                    out.insert(*w, scaled);
                }
            }
            Value::Gr(out)
        }
        Value::Mat(entries) => {
            let scaled: Result<Vec<RingElement>> =
                entries.iter().map(|e| scale_leaves(e, c)).collect();
            Value::Mat(scaled?)
        }
        Value::Prod(comps) => {
            let scaled: Result<Vec<RingElement>> =
                comps.iter().map(|e| scale_leaves(e, c)).collect();
            Value::Prod(scaled?)
        }
    };
    Ok(RingElement { ring: a.ring.clone(), value })
}

// ---- display ----

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RingKind::Rationals => write!(f, "Q"),
            RingKind::PrimeField { p } => write!(f, "Fp({p})"),
            RingKind::GaloisField { p, k, .. } => write!(f, "GF({})", (*p as u128).pow(*k)),
            RingKind::Dual { base } => write!(f, "dual({base})"),
            RingKind::Grassmann { rank, base } => write!(f, "grassmann({rank},{base})"),
            RingKind::Matrix { n, base } => write!(f, "mat({n},{base})"),
            RingKind::Product { factors } => {
                write!(f, "prod(")?;
                for (i, r) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl RingElement {
    /// True when the printed form is a single atom (no top-level + or -).
    pub fn is_display_atom(&self) -> bool {
        match &self.value {
            Value::Rat(r) => !r.is_negative(),
            Value::Fp(_) => true,
            Value::Gf(v) => v.iter().filter(|&&c| c != 0).count() <= 1,
            Value::Dual(parts) => {
                (parts.0.is_zero() && parts.1.is_one())
                    || (parts.1.is_zero() && parts.0.is_display_atom())
            }
            Value::Gr(words) => {
                words.len() <= 1
                    && words.values().next().map(|c| c.is_one()).unwrap_or(true)
            }
            Value::Mat(_) | Value::Prod(_) => true,
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Rat(r) => write!(f, "{r}"),
            Value::Fp(r) => write!(f, "{r}"),
            Value::Gf(v) => {
                let mut first = true;
                for (i, &c) in v.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, "+")?;
                    }
                    first = false;
                    match i {
                        0 => write!(f, "{c}")?,
                        _ => {
                            if c != 1 {
                                write!(f, "{c}*")?;
                            }
                            if i == 1 {
                                write!(f, "g")?;
                            } else {
                                write!(f, "g^{i}")?;
                            }
                        }
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
            Value::Dual(parts) => {
                if parts.1.is_zero() {
                    return write!(f, "{}", parts.0);
                }
                if !parts.0.is_zero() {
                    write!(f, "{}+", parts.0)?;
                }
                if parts.1.is_one() {
                    write!(f, "zeta")
                } else if parts.1.is_display_atom() {
                    write!(f, "{}*zeta", parts.1)
                } else {
                    write!(f, "({})*zeta", parts.1)
                }
            }
            Value::Gr(words) => {
                if words.is_empty() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (w, c) in words {
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    if *w == 0 {
                        write!(f, "{c}")?;
                        continue;
                    }
                    if !c.is_one() {
                        if c.is_display_atom() {
                            write!(f, "{c}*")?;
                        } else {
                            write!(f, "({c})*")?;
                        }
                    }
                    let mut sep = false;
                    for i in 0..32 {
                        if w & (1 << i) != 0 {
                            if sep {
                                write!(f, "*")?;
                            }
                            write!(f, "e{}", i + 1)?;
                            sep = true;
                        }
                    }
                }
                Ok(())
            }
            Value::Mat(entries) => {
                let n = self.matrix_size();
                write!(f, "[")?;
                for i in 0..n {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "[")?;
                    for j in 0..n {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", entries[i * n + j])?;
                    }
                    write!(f, "]")?;
                }
                write!(f, "]")
            }
            Value::Prod(comps) => {
                write!(f, "(")?;
                for (i, c) in comps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Ring {
        Ring::prime_field(p).unwrap()
    }

    #[test]
    fn galois_field_modulus_is_least_irreducible() {
        // GF(4): the least (and only) irreducible of degree 2 over F_2
        let gf4 = Ring::galois_field(4).unwrap();
        match gf4.kind() {
            RingKind::GaloisField { p, k, modulus } => {
                assert_eq!((*p, *k), (2, 2));
                assert_eq!(modulus, &vec![1, 1]); // x^2 + x + 1
            }
            _ => panic!("expected a Galois field"),
        }
        // GF(8): x^3 + x + 1 comes before x^3 + x^2 + 1
        let gf8 = Ring::galois_field(8).unwrap();
        match gf8.kind() {
            RingKind::GaloisField { modulus, .. } => assert_eq!(modulus, &vec![1, 1, 0]),
            _ => panic!(),
        }
    }

    #[test]
    fn gf4_generator_squares_to_g_plus_one() {
        let gf4 = Ring::galois_field(4).unwrap();
        let g = gf4.gf_generator().unwrap();
        let sq = g.mul(&g).unwrap();
        assert_eq!(sq, g.add(&gf4.one()).unwrap());
    }

    #[test]
    fn grassmann_sign_rule() {
        let g3 = Ring::grassmann(3, fp(3)).unwrap();
        let e1 = g3.grassmann_generator(1).unwrap();
        let e2 = g3.grassmann_generator(2).unwrap();
        let e12 = g3.grassmann_word(&[1, 2]).unwrap();
        assert_eq!(e1.mul(&e2).unwrap(), e12);
        assert_eq!(e2.mul(&e1).unwrap(), e12.neg());
        assert!(e1.mul(&e1).unwrap().is_zero());
    }

    #[test]
    fn grassmann_sign_matches_bubble_sort_oracle() {
        // brute-force oracle: multiply letter by letter, swapping adjacent
        // generators and counting sign changes
        fn oracle(a: &[u32], b: &[u32]) -> Option<(i32, Vec<u32>)> {
            let mut word: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
            let mut sign = 1i32;
            loop {
                let mut swapped = false;
                for i in 0..word.len().saturating_sub(1) {
                    if word[i] == word[i + 1] {
                        return None;
                    }
                    if word[i] > word[i + 1] {
                        word.swap(i, i + 1);
                        sign = -sign;
                        swapped = true;
                    }
                }
                if !swapped {
                    return Some((sign, word));
                }
            }
        }
        let g4 = Ring::grassmann(4, fp(5)).unwrap();
        let words: Vec<Vec<u32>> = (0u32..16)
            .map(|m| (0..4).filter(|i| m & (1 << i) != 0).map(|i| i + 1).collect())
            .collect();
        for a in &words {
            for b in &words {
                let lhs = g4
                    .grassmann_word(a)
                    .unwrap()
                    .mul(&g4.grassmann_word(b).unwrap())
                    .unwrap();
                match oracle(a, b) {
                    None => assert!(lhs.is_zero(), "{a:?} * {b:?}"),
                    Some((sign, sorted)) => {
                        let mut expected = g4.grassmann_word(&sorted).unwrap();
                        if sign < 0 {
                            expected = expected.neg();
                        }
                        assert_eq!(lhs, expected, "{a:?} * {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn dual_zeta_squares_to_zero() {
        let d5 = Ring::dual(fp(5));
        let zeta = d5.zeta().unwrap();
        assert!(zeta.mul(&zeta).unwrap().is_zero());
    }

    #[test]
    fn characteristics() {
        assert_eq!(fp(5).characteristic(), 5);
        assert_eq!(Ring::rationals().characteristic(), 0);
        assert_eq!(Ring::grassmann(4, fp(3)).unwrap().characteristic(), 3);
        assert_eq!(Ring::galois_field(4).unwrap().characteristic(), 2);
    }

    #[test]
    fn orders() {
        assert_eq!(Ring::galois_field(4).unwrap().order(), Some(4));
        assert_eq!(Ring::matrix_ring(2, fp(2)).unwrap().order(), Some(16));
        assert_eq!(Ring::dual(fp(2)).order(), Some(4));
        assert_eq!(Ring::rationals().order(), None);
    }

    #[test]
    fn enumeration_hits_every_element_once() {
        for ring in [
            fp(7),
            Ring::galois_field(9).unwrap(),
            Ring::dual(fp(3)),
            Ring::matrix_ring(2, fp(2)).unwrap(),
            Ring::grassmann(2, fp(3)).unwrap(),
            Ring::product(vec![fp(2), fp(3)]).unwrap(),
        ] {
            let all: Vec<RingElement> = ring.enumerate().unwrap().collect();
            assert_eq!(all.len() as u128, ring.order().unwrap());
            for i in 0..all.len() {
                for j in i + 1..all.len() {
                    assert_ne!(all[i], all[j]);
                }
            }
        }
    }

    #[test]
    fn zero_divisors() {
        let d3 = Ring::dual(fp(3));
        assert!(d3.zeta().unwrap().is_zero_divisor().unwrap());
        assert!(!fp(5).from_int(3).is_zero_divisor().unwrap());
        let m2 = Ring::matrix_ring(2, fp(2)).unwrap();
        assert!(m2.matrix_unit(1, 1).is_zero_divisor().unwrap());
        assert!(!m2.one().is_zero_divisor().unwrap());
    }

    #[test]
    fn zero_divisor_structural_rules_agree_with_enumeration() {
        // every finite ring of order <= 81 in this list
        let rings = [
            fp(5),
            Ring::galois_field(8).unwrap(),
            Ring::dual(fp(3)),
            Ring::dual(Ring::dual(fp(2))),
            Ring::grassmann(2, fp(3)).unwrap(),
            Ring::grassmann(3, fp(2)).unwrap(),
            Ring::product(vec![fp(2), fp(3)]).unwrap(),
        ];
        for ring in rings {
            let all: Vec<RingElement> = ring.enumerate().unwrap().collect();
            for a in &all {
                if a.is_zero() {
                    continue;
                }
                let exhaustive = all.iter().any(|b| {
                    !b.is_zero()
                        && (a.mul(b).unwrap().is_zero() || b.mul(a).unwrap().is_zero())
                });
                assert_eq!(
                    a.is_zero_divisor().unwrap(),
                    exhaustive,
                    "disagreement in {ring} at {a}"
                );
            }
        }
    }

    #[test]
    fn centrality() {
        let m2 = Ring::matrix_ring(2, fp(3)).unwrap();
        assert!(m2.from_int(2).is_central());
        assert!(!m2.matrix_unit(1, 2).is_central());
        let g2 = Ring::grassmann(2, fp(3)).unwrap();
        assert!(!g2.grassmann_generator(1).unwrap().is_central());
        assert!(g2.grassmann_word(&[1, 2]).unwrap().is_central());
        assert!(Ring::dual(fp(3)).zeta().unwrap().is_central());
    }

    #[test]
    fn matrix_center_is_central_scalars() {
        // center of mat(n, B) = { c*I : c in Z(B) }, checked exhaustively
        for (n, base) in [(2usize, fp(2)), (2, fp(3)), (3, fp(2))] {
            let ring = Ring::matrix_ring(n, base.clone()).unwrap();
            if ring.order().unwrap() > 100_000 {
                continue;
            }
            for a in ring.enumerate().unwrap() {
                let central = a.is_central();
                let scalar = (0..base.order().unwrap()).any(|i| {
                    let c = base.element_at(i);
                    c.is_central() && ring.embed(&c).unwrap() == a
                });
                assert_eq!(central, scalar, "center mismatch at {a}");
            }
        }
    }

    #[test]
    fn associativity_and_distributivity_small_rings() {
        for ring in [
            fp(2),
            Ring::galois_field(4).unwrap(),
            Ring::dual(fp(2)),
            Ring::matrix_ring(2, fp(2)).unwrap(),
            Ring::grassmann(2, fp(2)).unwrap(),
        ] {
            let all: Vec<RingElement> = ring.enumerate().unwrap().collect();
            assert!(all.len() <= 16);
            for a in &all {
                for b in &all {
                    for c in &all {
                        let ab_c = a.mul(b).unwrap().mul(c).unwrap();
                        let a_bc = a.mul(&b.mul(c).unwrap()).unwrap();
                        assert_eq!(ab_c, a_bc);
                        let lhs = a.mul(&b.add(c).unwrap()).unwrap();
                        let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn associativity_random_triples_larger_rings() {
        use crate::arith::SplitMix64;
        let mut rng = SplitMix64::new(7);
        for ring in [
            Ring::matrix_ring(2, fp(5)).unwrap(),
            Ring::grassmann(4, fp(3)).unwrap(),
            Ring::galois_field(27).unwrap(),
        ] {
            let order = ring.order().unwrap();
            for _ in 0..50 {
                let a = ring.element_at(rng.below_u128(order));
                let b = ring.element_at(rng.below_u128(order));
                let c = ring.element_at(rng.below_u128(order));
                assert_eq!(
                    a.mul(&b).unwrap().mul(&c).unwrap(),
                    a.mul(&b.mul(&c).unwrap()).unwrap()
                );
            }
        }
    }

    #[test]
    fn ring_display_round_trips_structurally() {
        let r = Ring::grassmann(4, fp(3)).unwrap();
        assert_eq!(r.to_string(), "grassmann(4,Fp(3))");
        assert_eq!(Ring::dual(fp(3)).to_string(), "dual(Fp(3))");
        assert_eq!(
            Ring::product(vec![fp(2), fp(2)]).unwrap().to_string(),
            "prod(Fp(2),Fp(2))"
        );
        assert_eq!(Ring::galois_field(4).unwrap().to_string(), "GF(4)");
    }

    #[test]
    fn coeff_action_scales_leaves() {
        let f3 = fp(3);
        let m2 = Ring::matrix_ring(2, Ring::dual(f3.clone())).unwrap();
        let two = f3.from_int(2);
        let a = m2.one();
        let scaled = coeff_action(&two, &a).unwrap();
        assert_eq!(scaled, m2.from_int(2));
    }

    #[test]
    fn embed_into_towers() {
        let f3 = fp(3);
        let g = Ring::grassmann(2, f3.clone()).unwrap();
        let two = f3.from_int(2);
        assert_eq!(g.embed(&two).unwrap(), g.from_int(2));
        let gf4 = Ring::galois_field(4).unwrap();
        let one = fp(2).one();
        assert_eq!(gf4.embed(&one).unwrap(), gf4.one());
    }
}
