//! Identity verification engines: exhaustive sweeps over finite rings
//! (table-accelerated), certified multilinear basis checks, truncated and
//! sampled evidence runs on the Weyl and operator algebras, and the exact
//! nullspace solver for multilinear identity spaces.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::arith::SplitMix64;
use crate::error::{Error, Result};
use crate::freealg::{EvalExpr, NcPoly, PiAlgebra, RingDomain};
use crate::linalg;
use crate::poly::CommPoly;
use crate::ring::{coeff_action, Ring, RingElement};
use crate::weyl::{WeylElement, WeylParams};

pub const DEFAULT_TUPLE_BUDGET: u128 = 200_000_000;
const TABLE_ORDER_CAP: u128 = 1024;
const EXPAND_GUARD: usize = 20_000;

// ---- candidates ----

/// A candidate identity: either an expanded polynomial or a structural
/// expression kept unexpanded (Genov polynomials blow up combinatorially).
#[derive(Clone)]
pub enum Candidate {
    Poly(NcPoly),
    Expr(EvalExpr, Ring),
}

impl Candidate {
    pub fn from_expr(expr: EvalExpr, coeff_ring: Ring) -> Candidate {
        match expr.expand(&coeff_ring, EXPAND_GUARD) {
            Ok(p) => Candidate::Poly(p),
            Err(_) => Candidate::Expr(expr, coeff_ring),
        }
    }

    pub fn coeff_ring(&self) -> &Ring {
        match self {
            Candidate::Poly(p) => p.ring(),
            Candidate::Expr(_, r) => r,
        }
    }

    pub fn num_vars(&self) -> u32 {
        match self {
            Candidate::Poly(p) => p.max_var(),
            Candidate::Expr(e, _) => e.max_var(),
        }
    }

    pub fn is_multilinear(&self) -> bool {
        match self {
            Candidate::Poly(p) => p.is_multilinear(),
            Candidate::Expr(..) => false,
        }
    }

    pub fn eval<A: PiAlgebra>(&self, alg: &A, args: &[A::Elem]) -> Result<A::Elem> {
        match self {
            Candidate::Poly(p) => p.eval(alg, args),
            Candidate::Expr(e, _) => e.eval(alg, args),
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::Poly(p) => write!(f, "{p}"),
            Candidate::Expr(..) => write!(f, "<structural expression>"),
        }
    }
}

// ---- verdicts ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    Refuted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Exhaustive,
    BasisMultilinear,
    Truncated(u32),
    Sampled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Certified,
    EvidenceOnly,
}

#[derive(Debug, Clone)]
pub struct IdentityVerdict {
    pub status: Status,
    pub scope: Scope,
    pub completeness: Completeness,
    pub tuples_checked: u128,
    pub witness: Option<Vec<String>>,
    pub witness_value: Option<String>,
    pub note: Option<String>,
}

impl IdentityVerdict {
    pub fn refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    fn passed(scope: Scope, completeness: Completeness, tuples: u128) -> IdentityVerdict {
        IdentityVerdict {
            status: Status::Passed,
            scope,
            completeness,
            tuples_checked: tuples,
            witness: None,
            witness_value: None,
            note: None,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Exhaustive => write!(f, "exhaustive"),
            Scope::BasisMultilinear => write!(f, "basis-multilinear"),
            Scope::Truncated(n) => write!(f, "truncated({n})"),
            Scope::Sampled(n) => write!(f, "sampled({n})"),
        }
    }
}

impl fmt::Display for Completeness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Completeness::Certified => write!(f, "certified"),
            Completeness::EvidenceOnly => write!(f, "evidence-only"),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Passed => write!(f, "passed"),
            Status::Refuted => write!(f, "refuted"),
        }
    }
}

// ---- evaluation domains ----

/// The Weyl algebra as an evaluation domain. Products go through the
/// closed form when the algebra is the dual-number one with h = zeta.
#[derive(Clone)]
pub struct WeylDomain {
    pub params: WeylParams,
    dual_fast: bool,
}

impl WeylDomain {
    pub fn new(params: WeylParams) -> WeylDomain {
        let dual_fast = params.ring().zeta().ok().map_or(false, |z| {
            params.h() == &CommPoly::constant(params.ring(), &["x"], z)
        });
        WeylDomain { params, dual_fast }
    }
}

impl PiAlgebra for WeylDomain {
    type Elem = WeylElement;

    fn zero(&self) -> WeylElement {
        WeylElement::zero(&self.params)
    }
    fn one(&self) -> WeylElement {
        WeylElement::one(&self.params)
    }
    fn add(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.add(b)
    }
    fn mul(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        if self.dual_fast {
            return a.mul_dual_zeta(b);
        }
        a.mul(b)
    }
    fn neg(&self, a: &WeylElement) -> WeylElement {
        a.neg()
    }
    fn is_zero(&self, a: &WeylElement) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: &BigInt) -> WeylElement {
        WeylElement::scalar(&self.params, self.params.ring().from_bigint(n))
    }
    fn coeff_action(&self, c: &RingElement, a: &WeylElement) -> Result<WeylElement> {
        a.scale_scalar(c)
    }
    fn render(&self, a: &WeylElement) -> String {
        a.to_string()
    }
}

/// The operator algebra as an evaluation domain.
#[derive(Clone)]
pub struct DiffDomain {
    pub ring: Ring,
    pub h: CommPoly,
}

impl PiAlgebra for DiffDomain {
    type Elem = crate::diffop::DiffOperator;

    fn zero(&self) -> Self::Elem {
        crate::diffop::DiffOperator::zero(&self.ring, &self.h)
    }
    fn one(&self) -> Self::Elem {
        crate::diffop::DiffOperator::identity(&self.ring, &self.h)
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        a.add(b)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        a.compose(b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.neg()
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: &BigInt) -> Self::Elem {
        self.one().scale(&self.ring.from_bigint(n)).expect("same ring")
    }
    fn coeff_action(&self, c: &RingElement, a: &Self::Elem) -> Result<Self::Elem> {
        a.scale_scalar(c)
    }
    fn render(&self, a: &Self::Elem) -> String {
        a.to_string()
    }
}

/// Index arithmetic over a small finite ring: addition, multiplication and
/// negation tables plus scale tables for the candidate's coefficients.
pub struct TableDomain {
    order: usize,
    elems: Vec<RingElement>,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    zero: u32,
    one: u32,
    index: HashMap<RingElement, u32>,
    scale: HashMap<RingElement, Vec<u32>>,
}

impl TableDomain {
    pub fn build(ring: &Ring) -> Result<TableDomain> {
        let order = ring
            .order()
            .filter(|&o| o <= TABLE_ORDER_CAP)
            .ok_or_else(|| Error::BudgetExceeded(format!("{ring} too large for tables")))?
            as usize;
        let elems: Vec<RingElement> = ring.enumerate()?.collect();
        let mut index = HashMap::with_capacity(order);
        for (i, e) in elems.iter().enumerate() {
            index.insert(e.clone(), i as u32);
        }
        let mut add = vec![0u32; order * order];
        let mut mul = vec![0u32; order * order];
        let mut neg = vec![0u32; order];
        for i in 0..order {
            neg[i] = index[&elems[i].neg()];
            for j in 0..order {
                add[i * order + j] = index[&elems[i].add(&elems[j])?];
                mul[i * order + j] = index[&elems[i].mul(&elems[j])?];
            }
        }
        let zero = index[&ring.zero()];
        let one = index[&ring.one()];
        Ok(TableDomain { order, elems, add, mul, neg, zero, one, index, scale: HashMap::new() })
    }

    /// Precompute scale tables for every coefficient the candidate uses.
    pub fn prepare(&mut self, candidate: &Candidate) -> Result<()> {
        let coeffs: Vec<RingElement> = match candidate {
            Candidate::Poly(p) => p.terms().map(|(_, c)| c.clone()).collect(),
            Candidate::Expr(_, ring) => {
                // structural evaluation only uses integer literals, covered
                // by the ring's own tables, plus possible literal coeffs
                let _ = ring;
                Vec::new()
            }
        };
        for c in coeffs {
            if self.scale.contains_key(&c) {
                continue;
            }
            let lut: Result<Vec<u32>> = self
                .elems
                .iter()
                .map(|e| Ok(self.index[&coeff_action(&c, e)?]))
                .collect();
            self.scale.insert(c, lut?);
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn element(&self, idx: u32) -> &RingElement {
        &self.elems[idx as usize]
    }

    fn scale_lut(&self, c: &RingElement) -> Option<&Vec<u32>> {
        self.scale.get(c)
    }
}

impl PiAlgebra for TableDomain {
    type Elem = u32;

    fn zero(&self) -> u32 {
        self.zero
    }
    fn one(&self) -> u32 {
        self.one
    }
    fn add(&self, a: &u32, b: &u32) -> Result<u32> {
        Ok(self.add[*a as usize * self.order + *b as usize])
    }
    fn mul(&self, a: &u32, b: &u32) -> Result<u32> {
        Ok(self.mul[*a as usize * self.order + *b as usize])
    }
    fn neg(&self, a: &u32) -> u32 {
        self.neg[*a as usize]
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == self.zero
    }
    fn from_int(&self, n: &BigInt) -> u32 {
        let e = self.elems[0].ring().from_bigint(n);
        self.index[&e]
    }
    fn coeff_action(&self, c: &RingElement, a: &u32) -> Result<u32> {
        if let Some(lut) = self.scale_lut(c) {
            return Ok(lut[*a as usize]);
        }
        let scaled = coeff_action(c, &self.elems[*a as usize])?;
        Ok(self.index[&scaled])
    }
    fn render(&self, a: &u32) -> String {
        self.elems[*a as usize].to_string()
    }
}

// ---- algebra handles ----

/// An evaluation universe together with an optional coordinate basis.
#[derive(Clone)]
pub enum AlgebraHandle {
    Finite { ring: Ring },
    WeylTruncated { params: WeylParams, bound: u32 },
    DiffOps { ring: Ring, h: CommPoly, bound: u32 },
}

impl AlgebraHandle {
    pub fn finite(ring: Ring) -> AlgebraHandle {
        AlgebraHandle::Finite { ring }
    }

    pub fn matrix(n: usize, base: Ring) -> Result<AlgebraHandle> {
        Ok(AlgebraHandle::Finite { ring: Ring::matrix_ring(n, base)? })
    }

    pub fn grassmann(rank: u32, base: Ring) -> Result<AlgebraHandle> {
        Ok(AlgebraHandle::Finite { ring: Ring::grassmann(rank, base)? })
    }

    pub fn weyl_truncated(params: WeylParams, bound: u32) -> AlgebraHandle {
        AlgebraHandle::WeylTruncated { params, bound }
    }

    pub fn diff_ops(ring: Ring, h: CommPoly, bound: u32) -> AlgebraHandle {
        AlgebraHandle::DiffOps { ring, h, bound }
    }

    /// The F-basis used by multilinear checks (matrix units scaled by base
    /// basis elements, Grassmann words, truncated Weyl monomials).
    pub fn weyl_basis(params: &WeylParams, bound: u32) -> Result<Vec<WeylElement>> {
        let b_basis = params.ring().f_basis().ok_or_else(|| {
            Error::UnsupportedRing(format!("{} has no finite scalar basis", params.ring()))
        })?;
        let mut out = Vec::new();
        for b in &b_basis {
            for i in 0..=bound {
                for j in 0..=bound {
                    out.push(WeylElement::monomial(params, i, j, b.clone()));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for AlgebraHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraHandle::Finite { ring } => write!(f, "{ring}"),
            AlgebraHandle::WeylTruncated { params, bound } => {
                write!(f, "weyl({}; {}; {bound})", params.ring(), params.h())
            }
            AlgebraHandle::DiffOps { ring, h, bound } => {
                write!(f, "diffop({ring}; {h}; {bound})")
            }
        }
    }
}

// ---- tuple iteration helpers ----

fn checked_tuple_count(domain: u128, arity: u32, budget: u128) -> Result<u128> {
    let mut total = 1u128;
    for _ in 0..arity {
        total = total.checked_mul(domain).ok_or_else(|| {
            Error::BudgetExceeded("tuple space overflows".into())
        })?;
        if total > budget {
            return Err(Error::BudgetExceeded(format!(
                "{domain}^{arity} tuples exceed the budget of {budget}"
            )));
        }
    }
    Ok(total)
}

/// Decode tuple `idx` into digit indices, first variable most significant.
fn decode_tuple(idx: u128, domain: usize, arity: usize, out: &mut [u32]) {
    let mut rest = idx;
    for slot in (0..arity).rev() {
        out[slot] = (rest % domain as u128) as u32;
        rest /= domain as u128;
    }
}

/// Scan 0..total in parallel blocks, returning the smallest index where
/// `probe` is Some. Deterministic: block order is preserved.
fn parallel_first_hit<F>(total: u128, probe: F) -> Option<u128>
where
    F: Fn(u128) -> bool + Sync,
{
    let total_usize = usize::try_from(total).expect("budget bounded");
    let block = (total_usize / (rayon::current_num_threads() * 16)).max(4096);
    let blocks: Vec<(usize, usize)> = (0..total_usize)
        .step_by(block)
        .map(|start| (start, (start + block).min(total_usize)))
        .collect();
    blocks
        .par_iter()
        .find_map_first(|&(start, end)| (start..end).find(|&i| probe(i as u128)))
        .map(|i| i as u128)
}

// ---- engines ----

/// Certified sweep over every tuple of elements of a finite ring.
pub fn check_exhaustive(
    f: &Candidate,
    algebra: &AlgebraHandle,
    budget: u128,
) -> Result<IdentityVerdict> {
    let ring = match algebra {
        AlgebraHandle::Finite { ring } => ring.clone(),
        _ => {
            return Err(Error::UnsupportedRing(
                "exhaustive checks need a finite ring".into(),
            ))
        }
    };
    let order = ring
        .order()
        .ok_or_else(|| Error::UnsupportedRing(format!("{ring} is not finite")))?;
    let arity = f.num_vars();
    if arity == 0 {
        // constant candidate: evaluate once
        let dom = RingDomain { ring: ring.clone() };
        let v = f.eval(&dom, &[])?;
        return Ok(finish_constant(v, &dom));
    }
    let total = checked_tuple_count(order, arity, budget)?;

    let hit = if order <= TABLE_ORDER_CAP {
        let mut tables = TableDomain::build(&ring)?;
        tables.prepare(f)?;
        let compiled = compile_for_tables(f, &tables);
        let n = tables.order();
        let probe = |idx: u128| -> bool {
            let mut args = [0u32; 8];
            let m = arity as usize;
            decode_tuple(idx, n, m, &mut args[..m]);
            !table_eval_is_zero(&compiled, &tables, &args[..m])
        };
        parallel_first_hit(total, probe)
    } else {
        let dom = RingDomain { ring: ring.clone() };
        let probe = |idx: u128| -> bool {
            let m = arity as usize;
            let mut digits = [0u32; 8];
            decode_tuple(idx, order as usize, m, &mut digits[..m]);
            let args: Vec<RingElement> =
                digits[..m].iter().map(|&d| ring.element_at(d as u128)).collect();
            let v = f.eval(&dom, &args).expect("compatible rings");
            !v.is_zero()
        };
        parallel_first_hit(total, probe)
    };

    match hit {
        None => Ok(IdentityVerdict::passed(
            Scope::Exhaustive,
            Completeness::Certified,
            total,
        )),
        Some(idx) => {
            let m = arity as usize;
            let mut digits = [0u32; 8];
            decode_tuple(idx, order as usize, m, &mut digits[..m]);
            let args: Vec<RingElement> =
                digits[..m].iter().map(|&d| ring.element_at(d as u128)).collect();
            refute_with(f, &RingDomain { ring }, &args, Scope::Exhaustive, idx + 1)
        }
    }
}

fn finish_constant<A: PiAlgebra>(v: A::Elem, dom: &A) -> IdentityVerdict {
    if dom.is_zero(&v) {
        IdentityVerdict::passed(Scope::Exhaustive, Completeness::Certified, 1)
    } else {
        IdentityVerdict {
            status: Status::Refuted,
            scope: Scope::Exhaustive,
            completeness: Completeness::Certified,
            tuples_checked: 1,
            witness: Some(vec![]),
            witness_value: Some(dom.render(&v)),
            note: None,
        }
    }
}

/// Build the refuted verdict, re-evaluating the witness through the element
/// path as a self-check.
fn refute_with<A: PiAlgebra>(
    f: &Candidate,
    dom: &A,
    args: &[A::Elem],
    scope: Scope,
    tuples: u128,
) -> Result<IdentityVerdict> {
    let value = f.eval(dom, args)?;
    if dom.is_zero(&value) {
        return Err(Error::InvalidInput(
            "internal inconsistency: witness re-evaluated to zero".into(),
        ));
    }
    Ok(IdentityVerdict {
        status: Status::Refuted,
        scope,
        completeness: Completeness::Certified,
        tuples_checked: tuples,
        witness: Some(args.iter().map(|a| dom.render(a)).collect()),
        witness_value: Some(dom.render(&value)),
        note: None,
    })
}

enum Compiled {
    Terms(Vec<(Vec<usize>, Vec<u32>)>),
    Tree(EvalExpr),
}

fn compile_for_tables(f: &Candidate, tables: &TableDomain) -> Compiled {
    match f {
        Candidate::Poly(p) => {
            let terms = p
                .terms()
                .map(|(w, c)| {
                    let word: Vec<usize> = w.iter().map(|&v| (v - 1) as usize).collect();
                    let lut = tables
                        .scale_lut(c)
                        .cloned()
                        .expect("prepare() ran before compilation");
                    (word, lut)
                })
                .collect();
            Compiled::Terms(terms)
        }
        Candidate::Expr(e, _) => Compiled::Tree(e.clone()),
    }
}

fn table_eval_is_zero(compiled: &Compiled, tables: &TableDomain, args: &[u32]) -> bool {
    match compiled {
        Compiled::Terms(terms) => {
            let n = tables.order();
            let mut acc = tables.zero;
            for (word, lut) in terms {
                let mut prod = tables.one;
                for &v in word {
                    prod = tables.mul[prod as usize * n + args[v] as usize];
                }
                acc = tables.add[acc as usize * n + lut[prod as usize] as usize];
            }
            acc == tables.zero
        }
        Compiled::Tree(expr) => {
            let v = expr.eval(tables, args).expect("table evaluation");
            v == tables.zero
        }
    }
}

/// Certified check of a multilinear candidate on all basis tuples. For
/// finite rings this certifies the identity outright; for the truncated
/// Weyl algebra it certifies the span of the truncated basis.
pub fn check_on_basis(
    f: &Candidate,
    algebra: &AlgebraHandle,
    budget: u128,
) -> Result<IdentityVerdict> {
    if !f.is_multilinear() {
        return Err(Error::NotMultilinear(
            "basis checks are only sound for multilinear polynomials".into(),
        ));
    }
    let arity = f.num_vars() as usize;
    match algebra {
        AlgebraHandle::Finite { ring } => {
            let basis = ring.f_basis().ok_or_else(|| {
                Error::UnsupportedRing(format!("{ring} has no finite scalar basis"))
            })?;
            let total = checked_tuple_count(basis.len() as u128, arity as u32, budget)?;
            let dom = RingDomain { ring: ring.clone() };
            let probe = |idx: u128| -> bool {
                let mut digits = [0u32; 8];
                decode_tuple(idx, basis.len(), arity, &mut digits[..arity]);
                let args: Vec<RingElement> =
                    digits[..arity].iter().map(|&d| basis[d as usize].clone()).collect();
                !f.eval(&dom, &args).expect("compatible rings").is_zero()
            };
            match parallel_first_hit(total, probe) {
                None => Ok(IdentityVerdict::passed(
                    Scope::BasisMultilinear,
                    Completeness::Certified,
                    total,
                )),
                Some(idx) => {
                    let mut digits = [0u32; 8];
                    decode_tuple(idx, basis.len(), arity, &mut digits[..arity]);
                    let args: Vec<RingElement> =
                        digits[..arity].iter().map(|&d| basis[d as usize].clone()).collect();
                    refute_with(f, &dom, &args, Scope::BasisMultilinear, idx + 1)
                }
            }
        }
        AlgebraHandle::WeylTruncated { params, bound } => {
            let basis = AlgebraHandle::weyl_basis(params, *bound)?;
            let total = checked_tuple_count(basis.len() as u128, arity as u32, budget)?;
            let dom = WeylDomain::new(params.clone());
            let probe = |idx: u128| -> bool {
                let mut digits = [0u32; 8];
                decode_tuple(idx, basis.len(), arity, &mut digits[..arity]);
                let args: Vec<WeylElement> =
                    digits[..arity].iter().map(|&d| basis[d as usize].clone()).collect();
                !f.eval(&dom, &args).expect("compatible rings").is_zero()
            };
            match parallel_first_hit(total, probe) {
                None => {
                    let mut v = IdentityVerdict::passed(
                        Scope::BasisMultilinear,
                        Completeness::Certified,
                        total,
                    );
                    v.note = Some(format!(
                        "certifies the span of the degree-{bound} truncated basis; \
                         the full algebra has an unbounded basis"
                    ));
                    Ok(v)
                }
                Some(idx) => {
                    let mut digits = [0u32; 8];
                    decode_tuple(idx, basis.len(), arity, &mut digits[..arity]);
                    let args: Vec<WeylElement> =
                        digits[..arity].iter().map(|&d| basis[d as usize].clone()).collect();
                    refute_with(f, &dom, &args, Scope::BasisMultilinear, idx + 1)
                }
            }
        }
        AlgebraHandle::DiffOps { .. } => Err(Error::UnsupportedRing(
            "basis checks on the operator algebra are not supported".into(),
        )),
    }
}

/// Check on the truncated Weyl algebra: multilinear candidates get the
/// certified basis check; anything else is evaluated on a deterministic
/// sample of low-degree elements (refutations stay certified, passes are
/// evidence only).
pub fn check_weyl_truncated(
    f: &Candidate,
    params: &WeylParams,
    bound: u32,
    budget: u128,
    seed: u64,
) -> Result<IdentityVerdict> {
    if f.is_multilinear() {
        return check_on_basis(
            f,
            &AlgebraHandle::weyl_truncated(params.clone(), bound),
            budget,
        );
    }
    let dom = WeylDomain::new(params.clone());
    let arity = f.num_vars() as usize;
    // sample pool: all truncated basis monomials first, then seeded random
    // two-term combinations
    let mut pool = AlgebraHandle::weyl_basis(params, bound)?;
    let mut rng = SplitMix64::new(seed);
    let ring = params.ring().clone();
    for _ in 0..16 {
        let mut e = WeylElement::zero(params);
        for _ in 0..2 {
            let c = match ring.order() {
                Some(o) => ring.element_at(rng.below_u128(o)),
                None => ring.from_int(rng.below(9) as i64 - 4),
            };
            e = e.add(&WeylElement::monomial(
                params,
                rng.below(bound as u64 + 1) as u32,
                rng.below(bound as u64 + 1) as u32,
                c,
            ))?;
        }
        pool.push(e);
    }
    let total = {
        let mut t = 1u128;
        for _ in 0..arity {
            t = t.saturating_mul(pool.len() as u128);
        }
        t.min(budget)
    };
    let probe = |idx: u128| -> bool {
        let mut digits = [0u32; 8];
        decode_tuple(idx, pool.len(), arity, &mut digits[..arity]);
        let args: Vec<WeylElement> =
            digits[..arity].iter().map(|&d| pool[d as usize].clone()).collect();
        !f.eval(&dom, &args).expect("compatible rings").is_zero()
    };
    match parallel_first_hit(total, probe) {
        Some(idx) => {
            let mut digits = [0u32; 8];
            decode_tuple(idx, pool.len(), arity, &mut digits[..arity]);
            let args: Vec<WeylElement> =
                digits[..arity].iter().map(|&d| pool[d as usize].clone()).collect();
            refute_with(f, &dom, &args, Scope::Sampled(total as u64), idx + 1)
        }
        None => {
            let mut v = IdentityVerdict::passed(
                Scope::Sampled(total as u64),
                Completeness::EvidenceOnly,
                total,
            );
            v.note = Some(format!("low-degree sample at truncation bound {bound}"));
            Ok(v)
        }
    }
}

/// Deterministic random sampling on a finite ring or the truncated Weyl
/// algebra. Refutations are certified; passes are evidence only.
pub fn check_sampled(
    f: &Candidate,
    algebra: &AlgebraHandle,
    count: u64,
    seed: u64,
) -> Result<IdentityVerdict> {
    let arity = f.num_vars() as usize;
    match algebra {
        AlgebraHandle::Finite { ring } => {
            let order = ring
                .order()
                .ok_or_else(|| Error::UnsupportedRing(format!("{ring} is not finite")))?;
            let mut rng = SplitMix64::new(seed);
            let tuples: Vec<Vec<u128>> = (0..count)
                .map(|_| (0..arity).map(|_| rng.below_u128(order)).collect())
                .collect();
            let dom = RingDomain { ring: ring.clone() };
            let hit = tuples
                .par_iter()
                .enumerate()
                .find_map_first(|(t, tuple)| {
                    let args: Vec<RingElement> =
                        tuple.iter().map(|&d| ring.element_at(d)).collect();
                    let v = f.eval(&dom, &args).expect("compatible rings");
                    if v.is_zero() {
                        None
                    } else {
                        Some(t)
                    }
                });
            match hit {
                None => Ok(IdentityVerdict::passed(
                    Scope::Sampled(count),
                    Completeness::EvidenceOnly,
                    count as u128,
                )),
                Some(t) => {
                    let args: Vec<RingElement> =
                        tuples[t].iter().map(|&d| ring.element_at(d)).collect();
                    refute_with(f, &dom, &args, Scope::Sampled(count), t as u128 + 1)
                }
            }
        }
        AlgebraHandle::WeylTruncated { params, bound } => {
            check_weyl_truncated(f, params, *bound, count as u128, seed)
        }
        AlgebraHandle::DiffOps { ring, h, bound } => {
            let dom = DiffDomain { ring: ring.clone(), h: h.clone() };
            let mut rng = SplitMix64::new(seed);
            let order = ring.order();
            let mut args_list: Vec<Vec<crate::diffop::DiffOperator>> = Vec::new();
            for _ in 0..count {
                let args: Vec<crate::diffop::DiffOperator> = (0..arity)
                    .map(|_| {
                        let i = rng.below(*bound as u64 + 1) as u32;
                        let j = rng.below(*bound as u64 + 1) as u32;
                        let c = match order {
                            Some(o) => ring.element_at(rng.below_u128(o)),
                            None => ring.from_int(rng.below(9) as i64 - 4),
                        };
                        let poly = CommPoly::monomial(ring, &["z"], [i, 0], c);
                        crate::diffop::DiffOperator::from_strata(ring, h, [(j, poly)])
                    })
                    .collect();
                args_list.push(args);
            }
            for (t, args) in args_list.iter().enumerate() {
                let v = f.eval(&dom, args)?;
                if !dom.is_zero(&v) {
                    return refute_with(f, &dom, args, Scope::Sampled(count), t as u128 + 1);
                }
            }
            Ok(IdentityVerdict::passed(
                Scope::Sampled(count),
                Completeness::EvidenceOnly,
                count as u128,
            ))
        }
    }
}

/// The multilinear identity space of degree n: coefficient vectors (indexed
/// by the n! permutation words) spanning the nullspace of the evaluation
/// matrix on all basis tuples, over the scalar field.
pub struct IdentitySpace {
    pub field: Ring,
    pub words: Vec<Vec<u32>>,
    pub vectors: Vec<Vec<RingElement>>,
    pub polys: Vec<NcPoly>,
}

impl IdentitySpace {
    pub fn contains(&self, f: &NcPoly) -> Result<bool> {
        let v: Vec<RingElement> = self.words.iter().map(|w| f.coeff(w)).collect();
        linalg::in_span(&self.vectors, &v, &self.field)
    }
}

pub fn multilinear_identity_space(
    algebra: &AlgebraHandle,
    degree: u32,
    budget: u128,
) -> Result<IdentitySpace> {
    if degree == 0 || degree > 6 {
        return Err(Error::InvalidInput("degree must be in 1..=6".into()));
    }
    let ring = match algebra {
        AlgebraHandle::Finite { ring } => ring.clone(),
        _ => {
            return Err(Error::UnsupportedRing(
                "the identity-space solver needs a finite-dimensional algebra".into(),
            ))
        }
    };
    let field = ring
        .leaf_field()
        .ok_or_else(|| Error::UnsupportedRing(format!("{ring} has no scalar field")))?;
    let basis = ring
        .f_basis()
        .ok_or_else(|| Error::UnsupportedRing(format!("{ring} has no scalar basis")))?;
    let dim = basis.len();
    let words = permutation_words(degree);
    let tuples = checked_tuple_count(dim as u128, degree, budget)?;
    let evals = tuples
        .checked_mul(words.len() as u128)
        .filter(|&e| e <= budget)
        .ok_or_else(|| Error::BudgetExceeded("evaluation matrix too large".into()))?;
    let _ = evals;

    let mut rows: Vec<Vec<RingElement>> = Vec::new();
    let arity = degree as usize;
    let mut digits = vec![0u32; arity];
    for idx in 0..tuples {
        decode_tuple(idx, dim, arity, &mut digits);
        let args: Vec<RingElement> =
            digits.iter().map(|&d| basis[d as usize].clone()).collect();
        // evaluate all words on this tuple with shared prefixes
        let mut cache: HashMap<Vec<u32>, RingElement> = HashMap::new();
        let mut per_word: Vec<Vec<RingElement>> = Vec::with_capacity(words.len());
        for w in &words {
            let v = eval_word_elems(&ring, &args, w, &mut cache)?;
            let coords = ring
                .coords(&v)
                .ok_or_else(|| Error::UnsupportedRing(format!("{ring} has no coordinates")))?;
            per_word.push(coords);
        }
        // one matrix row per coordinate slot
        for slot in 0..dim {
            let row: Vec<RingElement> = per_word.iter().map(|c| c[slot].clone()).collect();
            rows.push(row);
        }
    }
    let vectors = linalg::nullspace(&rows, &field)?;
    let mut polys = Vec::with_capacity(vectors.len());
    for v in &vectors {
        let mut p = NcPoly::zero(&field);
        for (w, c) in words.iter().zip(v) {
            if !c.is_zero() {
                p = p.add(&NcPoly::monomial(&field, w.clone(), c.clone()))?;
            }
        }
        // re-verify through the independent basis check
        let verdict = check_on_basis(
            &Candidate::Poly(p.clone()),
            algebra,
            budget,
        )?;
        if verdict.refuted() {
            return Err(Error::InvalidInput(
                "internal inconsistency: nullspace vector failed re-verification".into(),
            ));
        }
        polys.push(p);
    }
    Ok(IdentitySpace { field, words, vectors, polys })
}

fn eval_word_elems(
    ring: &Ring,
    args: &[RingElement],
    word: &[u32],
    cache: &mut HashMap<Vec<u32>, RingElement>,
) -> Result<RingElement> {
    if word.is_empty() {
        return Ok(ring.one());
    }
    if word.len() == 1 {
        return Ok(args[(word[0] - 1) as usize].clone());
    }
    if let Some(v) = cache.get(word) {
        return Ok(v.clone());
    }
    let prefix = eval_word_elems(ring, args, &word[..word.len() - 1], cache)?;
    let v = prefix.mul(&args[(word[word.len() - 1] - 1) as usize])?;
    cache.insert(word.to_vec(), v.clone());
    Ok(v)
}

fn permutation_words(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut word: Vec<u32> = (1..=n).collect();
    permute(&mut word, 0, &mut out);
    out.sort();
    out
}

fn permute(word: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k == word.len() {
        out.push(word.clone());
        return;
    }
    for i in k..word.len() {
        word.swap(k, i);
        permute(word, k + 1, out);
        word.swap(k, i);
    }
}
