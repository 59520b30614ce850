//! Commutative polynomials over a coefficient ring in one or two named
//! variables: the home of the parameter h, of elements of B[x] and B[x,y],
//! and of the operand polynomials in B[z].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{coeff_action, Ring, RingElement};

/// Exponent vector; the second slot is 0 for univariate polynomials.
pub type Exps = [u32; 2];

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CommPoly {
    ring: Ring,
    vars: Vec<String>,
    terms: BTreeMap<Exps, RingElement>,
}

impl CommPoly {
    pub fn zero(ring: &Ring, vars: &[&str]) -> CommPoly {
        assert!(!vars.is_empty() && vars.len() <= 2, "1 or 2 variables");
        CommPoly {
            ring: ring.clone(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, vars: &[&str], c: RingElement) -> CommPoly {
        let mut out = CommPoly::zero(ring, vars);
        assert_eq!(c.ring(), ring, "constant coefficient ring");
        if !c.is_zero() {
            out.terms.insert([0, 0], c);
        }
        out
    }

    pub fn one(ring: &Ring, vars: &[&str]) -> CommPoly {
        CommPoly::constant(ring, vars, ring.one())
    }

    pub fn from_int(ring: &Ring, vars: &[&str], n: i64) -> CommPoly {
        CommPoly::constant(ring, vars, ring.from_int(n))
    }

    /// The variable with the given index (0 or 1).
    pub fn variable(ring: &Ring, vars: &[&str], idx: usize) -> CommPoly {
        let mut out = CommPoly::zero(ring, vars);
        assert!(idx < out.vars.len(), "variable index");
        let mut e = [0u32, 0u32];
        e[idx] = 1;
        out.terms.insert(e, ring.one());
        out
    }

    pub fn monomial(ring: &Ring, vars: &[&str], exps: Exps, c: RingElement) -> CommPoly {
        let mut out = CommPoly::zero(ring, vars);
        if vars.len() == 1 {
            assert_eq!(exps[1], 0, "univariate exponent");
        }
        if !c.is_zero() {
            out.terms.insert(exps, c);
        }
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0, 0])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &RingElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: Exps) -> RingElement {
        self.terms.get(&exps).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Constant term as a ring element.
    pub fn constant_coeff(&self) -> RingElement {
        self.coeff([0, 0])
    }

    fn check_compatible(&self, other: &CommPoly) -> Result<()> {
        if self.ring != other.ring || self.vars != other.vars {
            return Err(Error::RingMismatch {
                expected: format!("{}[{}]", self.ring, self.vars.join(",")),
                found: format!("{}[{}]", other.ring, other.vars.join(",")),
            });
        }
        Ok(())
    }

    fn insert_term(&mut self, exps: Exps, c: RingElement) -> Result<()> {
        match self.terms.remove(&exps) {
            Some(prev) => {
                let sum = prev.add(&c)?;
                if !sum.is_zero() {
                    self.terms.insert(exps, sum);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(exps, c);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &CommPoly) -> Result<CommPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(*e, c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> CommPoly {
        let mut out = self.clone();
        out.terms = self.terms.iter().map(|(e, c)| (*e, c.neg())).collect();
        out
    }

    pub fn sub(&self, other: &CommPoly) -> Result<CommPoly> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CommPoly) -> Result<CommPoly> {
        self.check_compatible(other)?;
        let mut out = CommPoly::zero(&self.ring, &self.var_refs());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps = [ea[0] + eb[0], ea[1] + eb[1]];
                out.insert_term(exps, ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<CommPoly> {
        let mut acc = CommPoly::one(&self.ring, &self.var_refs());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiply every coefficient on the left by a ring element.
    pub fn scale(&self, c: &RingElement) -> Result<CommPoly> {
        let mut out = CommPoly::zero(&self.ring, &self.var_refs());
        for (e, coeff) in &self.terms {
            out.insert_term(*e, c.mul(coeff)?)?;
        }
        Ok(out)
    }

    /// Multiply every coefficient by an exact integer.
    pub fn scale_int(&self, n: &BigInt) -> CommPoly {
        let mut out = CommPoly::zero(&self.ring, &self.var_refs());
        for (e, coeff) in &self.terms {
            out.insert_term(*e, coeff.scale_int(n)).expect("same ring");
        }
        out
    }

    /// Action of a scalar from the coefficient field of the tower.
    pub fn scale_scalar(&self, c: &RingElement) -> Result<CommPoly> {
        let mut out = CommPoly::zero(&self.ring, &self.var_refs());
        for (e, coeff) in &self.terms {
            out.insert_term(*e, coeff_action(c, coeff)?)?;
        }
        Ok(out)
    }

    fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    /// Formal derivative with respect to the variable with index `var`.
    pub fn derivative(&self, var: usize) -> CommPoly {
        assert!(var < self.vars.len(), "variable index");
        let mut out = CommPoly::zero(&self.ring, &self.var_refs());
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut exps = *e;
            exps[var] -= 1;
            let scaled = c.scale_int(&BigInt::from(e[var]));
            out.insert_term(exps, scaled).expect("same ring");
        }
        out
    }

    /// r-th iterated derivative in the first variable.
    pub fn derivative_n(&self, r: u32) -> CommPoly {
        let mut acc = self.clone();
        for _ in 0..r {
            acc = acc.derivative(0);
        }
        acc
    }

    /// Total degree in the given variable, or None for the zero polynomial.
    pub fn degree(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Degree and leading coefficient of a nonzero univariate polynomial.
    pub fn leading_data(&self) -> Result<(u32, RingElement)> {
        if self.vars.len() != 1 {
            return Err(Error::InvalidInput("leading_data needs a univariate polynomial".into()));
        }
        let (e, c) = self
            .terms
            .iter()
            .next_back()
            .ok_or_else(|| Error::InvalidInput("zero polynomial has no leading data".into()))?;
        Ok((e[0], c.clone()))
    }

    /// Horner evaluation of a univariate polynomial at an element of the
    /// coefficient ring or of an algebra over it; with `guard_central` set,
    /// refuses noncentral coefficients when the target is noncommutative.
    pub fn eval_at_guarded(&self, a: &RingElement, guard_central: bool) -> Result<RingElement> {
        if self.vars.len() != 1 {
            return Err(Error::InvalidInput("evaluation needs a univariate polynomial".into()));
        }
        let target = a.ring().clone();
        if guard_central && !target.generators().is_empty() {
            for c in self.terms.values() {
                if !c.is_central() {
                    return Err(Error::InvalidInput(format!(
                        "coefficient {c} is not central"
                    )));
                }
            }
        }
        let d = match self.degree(0) {
            None => return Ok(target.zero()),
            Some(d) => d,
        };
        let embed = |c: &RingElement| -> Result<RingElement> { target.embed(c) };
        let mut acc = embed(&self.coeff([d, 0]))?;
        for t in (0..d).rev() {
            acc = acc.mul(a)?;
            let c = self.coeff([t, 0]);
            if !c.is_zero() {
                acc = acc.add(&embed(&c)?)?;
            }
        }
        Ok(acc)
    }

    pub fn eval_at(&self, a: &RingElement) -> Result<RingElement> {
        self.eval_at_guarded(a, false)
    }

    /// Evaluate a bivariate polynomial at (a, b) in the coefficient ring.
    pub fn eval_at2(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        let mut acc = a.ring().zero();
        for (e, c) in &self.terms {
            let term = a.ring().embed(c)?.mul(&a.pow(e[0] as u64)?)?.mul(&b.pow(e[1] as u64)?)?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Substitute a constant for one variable, leaving a polynomial in the
    /// remaining variable (or a constant polynomial).
    pub fn eval_partial(&self, var: usize, a: &RingElement) -> Result<CommPoly> {
        assert!(self.vars.len() == 2 && var < 2);
        let keep = 1 - var;
        let keep_name = self.vars[keep].clone();
        let mut out = CommPoly::zero(&self.ring, &[&keep_name]);
        for (e, c) in &self.terms {
            let scaled = c.mul(&a.pow(e[var] as u64)?)?;
            out.insert_term([e[keep], 0], scaled)?;
        }
        Ok(out)
    }

    /// Same polynomial with new variable names.
    pub fn rename_vars(&self, vars: &[&str]) -> CommPoly {
        assert_eq!(vars.len(), self.vars.len());
        CommPoly {
            ring: self.ring.clone(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: self.terms.clone(),
        }
    }

    /// Widen a univariate polynomial into a bivariate ring (as a polynomial
    /// in the first variable).
    pub fn widen(&self, vars: &[&str; 2]) -> CommPoly {
        assert_eq!(self.vars.len(), 1);
        CommPoly {
            ring: self.ring.clone(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: self.terms.clone(),
        }
    }

    /// Exact quotient of univariate polynomials: q with self = q*b. Requires
    /// a leading coefficient of b that is not a zero divisor and exact
    /// coefficient division at every elimination step.
    pub fn divide_exact(&self, b: &CommPoly) -> Result<CommPoly> {
        self.check_compatible(b)?;
        if self.vars.len() != 1 {
            return Err(Error::InvalidInput("exact division needs univariate polynomials".into()));
        }
        let (db, lb) = b.leading_data().map_err(|_| {
            Error::DivisionFailed("division by the zero polynomial".into())
        })?;
        if let Ok(true) = lb.is_zero_divisor() {
            return Err(Error::DivisionFailed(
                "leading coefficient of the divisor is a zero divisor".into(),
            ));
        }
        let mut r = self.clone();
        let mut q = CommPoly::zero(&self.ring, &self.var_refs());
        while !r.is_zero() {
            let (dr, lr) = r.leading_data()?;
            if dr < db {
                return Err(Error::DivisionFailed("inexact polynomial division".into()));
            }
            let c = lr.divide_exact(&lb).map_err(|_| {
                Error::DivisionFailed("coefficient division failed".into())
            })?;
            let shift = dr - db;
            q.insert_term([shift, 0], c.clone())?;
            let piece = CommPoly::monomial(&self.ring, &self.var_refs(), [shift, 0], c);
            r = r.sub(&piece.mul(b)?)?;
        }
        Ok(q)
    }
}

impl fmt::Debug for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut wrote_var = false;
            let mut head = String::new();
            for (idx, name) in self.vars.iter().enumerate() {
                match e[idx] {
                    0 => {}
                    1 => {
                        if wrote_var {
                            head.push('*');
                        }
                        head.push_str(name);
                        wrote_var = true;
                    }
                    k => {
                        if wrote_var {
                            head.push('*');
                        }
                        head.push_str(&format!("{name}^{k}"));
                        wrote_var = true;
                    }
                }
            }
            if !wrote_var {
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
