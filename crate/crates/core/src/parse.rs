//! Parsers for the input grammars: ring descriptors (`Fp(5)`, `GF(4)`,
//! `dual(Fp(3))`, ...), polynomials (`x^2 + 3*x`), Weyl elements
//! (`x^2*yh^3 + 1`), free-algebra expressions (`[[x1,x2],x3]`, `st(4)`,
//! `genov(2,2)`, `circ(a,b)`), and algebra handles (`mat(2,Fp(3))`,
//! `weyl(Fp(3); x; 2)`). Printing any parsed value re-parses to an equal
//! value.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::freealg::{genov, st_n, EvalExpr, NcPoly};
use crate::pi_check::{AlgebraHandle, Candidate};
use crate::poly::CommPoly;
use crate::ring::Ring;
use crate::weyl::{WeylElement, WeylParams};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    src: Vec<char>,
    pos: usize,
}

impl Lexer {
    fn new(s: &str) -> Lexer {
        Lexer { src: s.chars().collect(), pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Tok {
        let save = self.pos;
        let t = self.next_tok();
        self.pos = save;
        t
    }

    fn next_tok(&mut self) -> Tok {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Tok::End;
        }
        let c = self.src[self.pos];
        if c.is_ascii_digit() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let s: String = self.src[start..self.pos].iter().collect();
            return Tok::Int(s.parse().expect("digits"));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == '_')
            {
                self.pos += 1;
            }
            return Tok::Ident(self.src[start..self.pos].iter().collect());
        }
        self.pos += 1;
        Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.next_tok() {
            Tok::Sym(s) if s == c => Ok(()),
            other => Err(self.err(format!("expected '{c}', found {other:?}"))),
        }
    }

    fn expect_uint(&mut self) -> Result<u64> {
        match self.next_tok() {
            Tok::Int(n) => n
                .to_u64()
                .ok_or_else(|| self.err("integer out of range")),
            other => Err(self.err(format!("expected an integer, found {other:?}"))),
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.next_tok() {
            Tok::End => Ok(()),
            other => Err(self.err(format!("unexpected trailing input: {other:?}"))),
        }
    }

    fn starts_atom(&mut self) -> bool {
        matches!(self.peek(), Tok::Int(_) | Tok::Ident(_) | Tok::Sym('(') | Tok::Sym('['))
    }
}

// ---- generic expression parsing ----

trait ExprContext {
    type Val: Clone;
    fn atom(&mut self, lex: &mut Lexer) -> Result<Self::Val>;
    fn add(&self, a: &Self::Val, b: &Self::Val) -> Result<Self::Val>;
    fn sub(&self, a: &Self::Val, b: &Self::Val) -> Result<Self::Val>;
    fn mul(&self, a: &Self::Val, b: &Self::Val) -> Result<Self::Val>;
    fn neg(&self, a: &Self::Val) -> Result<Self::Val>;
    fn pow(&self, a: &Self::Val, e: u32) -> Result<Self::Val>;
    fn div(&self, _a: &Self::Val, _b: &Self::Val, lex: &Lexer) -> Result<Self::Val> {
        Err(lex.err("division is not supported here"))
    }
}

fn parse_expression<C: ExprContext>(lex: &mut Lexer, ctx: &mut C) -> Result<C::Val> {
    let mut acc = parse_term(lex, ctx)?;
    loop {
        match lex.peek() {
            Tok::Sym('+') => {
                lex.next_tok();
                let rhs = parse_term(lex, ctx)?;
                acc = ctx.add(&acc, &rhs)?;
            }
            Tok::Sym('-') => {
                lex.next_tok();
                let rhs = parse_term(lex, ctx)?;
                acc = ctx.sub(&acc, &rhs)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term<C: ExprContext>(lex: &mut Lexer, ctx: &mut C) -> Result<C::Val> {
    let mut acc = parse_factor(lex, ctx)?;
    loop {
        match lex.peek() {
            Tok::Sym('*') => {
                lex.next_tok();
                let rhs = parse_factor(lex, ctx)?;
                acc = ctx.mul(&acc, &rhs)?;
            }
            Tok::Sym('/') => {
                lex.next_tok();
                let rhs = parse_factor(lex, ctx)?;
                acc = ctx.div(&acc, &rhs, lex)?;
            }
            _ if lex.starts_atom() => {
                let rhs = parse_factor(lex, ctx)?;
                acc = ctx.mul(&acc, &rhs)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_factor<C: ExprContext>(lex: &mut Lexer, ctx: &mut C) -> Result<C::Val> {
    if lex.peek() == Tok::Sym('-') {
        lex.next_tok();
        let inner = parse_factor(lex, ctx)?;
        return ctx.neg(&inner);
    }
    let mut base = ctx.atom(lex)?;
    while lex.peek() == Tok::Sym('^') {
        lex.next_tok();
        let e = lex.expect_uint()?;
        let e = u32::try_from(e).map_err(|_| lex.err("exponent out of range"))?;
        base = ctx.pow(&base, e)?;
    }
    Ok(base)
}

/// Shared atom handling for ring-element literals: integers, `zeta`, `g`,
/// and Grassmann generators `e1`, `e2`, ...
fn element_literal(ring: &Ring, name: &str) -> Option<crate::ring::RingElement> {
    match name {
        "zeta" => ring.zeta().ok(),
        "g" => ring.gf_generator().ok(),
        _ => {
            let idx: u32 = name.strip_prefix('e')?.parse().ok()?;
            ring.grassmann_generator(idx).ok()
        }
    }
}

// ---- rings ----

pub fn parse_ring(s: &str) -> Result<Ring> {
    let mut lex = Lexer::new(s);
    let ring = parse_ring_inner(&mut lex)?;
    lex.expect_end()?;
    Ok(ring)
}

fn parse_ring_inner(lex: &mut Lexer) -> Result<Ring> {
    match lex.next_tok() {
        Tok::Ident(name) => match name.as_str() {
            "Q" => Ok(Ring::rationals()),
            "Fp" => {
                lex.expect_sym('(')?;
                let p = lex.expect_uint()?;
                lex.expect_sym(')')?;
                Ring::prime_field(p)
            }
            "GF" => {
                lex.expect_sym('(')?;
                let q = lex.expect_uint()?;
                lex.expect_sym(')')?;
                Ring::galois_field(q)
            }
            "dual" => {
                lex.expect_sym('(')?;
                let base = parse_ring_inner(lex)?;
                lex.expect_sym(')')?;
                Ok(Ring::dual(base))
            }
            "grassmann" => {
                lex.expect_sym('(')?;
                let rank = lex.expect_uint()?;
                lex.expect_sym(',')?;
                let base = parse_ring_inner(lex)?;
                lex.expect_sym(')')?;
                Ring::grassmann(rank as u32, base)
            }
            "mat" => {
                lex.expect_sym('(')?;
                let n = lex.expect_uint()?;
                lex.expect_sym(',')?;
                let base = parse_ring_inner(lex)?;
                lex.expect_sym(')')?;
                Ring::matrix_ring(n as usize, base)
            }
            "prod" => {
                lex.expect_sym('(')?;
                let mut factors = vec![parse_ring_inner(lex)?];
                loop {
                    match lex.next_tok() {
                        Tok::Sym(',') => factors.push(parse_ring_inner(lex)?),
                        Tok::Sym(')') => break,
                        other => {
                            return Err(lex.err(format!("expected ',' or ')', found {other:?}")))
                        }
                    }
                }
                Ring::product(factors)
            }
            other => Err(lex.err(format!("unknown ring kind '{other}'"))),
        },
        other => Err(lex.err(format!("expected a ring, found {other:?}"))),
    }
}

// ---- polynomials ----

struct PolyCtx {
    ring: Ring,
    vars: Vec<String>,
}

impl ExprContext for PolyCtx {
    type Val = CommPoly;

    fn atom(&mut self, lex: &mut Lexer) -> Result<CommPoly> {
        let var_refs: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        match lex.next_tok() {
            Tok::Int(n) => Ok(CommPoly::constant(&self.ring, &var_refs, self.ring.from_bigint(&n))),
            Tok::Ident(name) => {
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    return Ok(CommPoly::variable(&self.ring, &var_refs, idx));
                }
                if let Some(c) = element_literal(&self.ring, &name) {
                    return Ok(CommPoly::constant(&self.ring, &var_refs, c));
                }
                Err(lex.err(format!("unknown symbol '{name}'")))
            }
            Tok::Sym('(') => {
                let inner = parse_expression(lex, self)?;
                lex.expect_sym(')')?;
                Ok(inner)
            }
            other => Err(lex.err(format!("expected a polynomial atom, found {other:?}"))),
        }
    }

    fn add(&self, a: &CommPoly, b: &CommPoly) -> Result<CommPoly> {
        a.add(b)
    }
    fn sub(&self, a: &CommPoly, b: &CommPoly) -> Result<CommPoly> {
        a.sub(b)
    }
    fn mul(&self, a: &CommPoly, b: &CommPoly) -> Result<CommPoly> {
        a.mul(b)
    }
    fn neg(&self, a: &CommPoly) -> Result<CommPoly> {
        Ok(a.neg())
    }
    fn pow(&self, a: &CommPoly, e: u32) -> Result<CommPoly> {
        a.pow(e)
    }
    fn div(&self, a: &CommPoly, b: &CommPoly, lex: &Lexer) -> Result<CommPoly> {
        if !b.is_constant() {
            return Err(lex.err("can only divide by constants"));
        }
        let inv = b
            .constant_coeff()
            .invert()
            .map_err(|e| lex.err(format!("cannot divide: {e}")))?;
        a.scale(&inv)
    }
}

pub fn parse_poly(s: &str, ring: &Ring, vars: &[&str]) -> Result<CommPoly> {
    let mut lex = Lexer::new(s);
    let mut ctx = PolyCtx {
        ring: ring.clone(),
        vars: vars.iter().map(|v| v.to_string()).collect(),
    };
    let poly = parse_expression(&mut lex, &mut ctx)?;
    lex.expect_end()?;
    Ok(poly)
}

// ---- Weyl elements ----

struct WeylCtx {
    params: WeylParams,
}

impl ExprContext for WeylCtx {
    type Val = WeylElement;

    fn atom(&mut self, lex: &mut Lexer) -> Result<WeylElement> {
        match lex.next_tok() {
            Tok::Int(n) => Ok(WeylElement::scalar(
                &self.params,
                self.params.ring().from_bigint(&n),
            )),
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(WeylElement::gen_x(&self.params)),
                "yh" => Ok(WeylElement::gen_y(&self.params)),
                other => element_literal(self.params.ring(), other)
                    .map(|c| WeylElement::scalar(&self.params, c))
                    .ok_or_else(|| lex.err(format!("unknown symbol '{other}'"))),
            },
            Tok::Sym('(') => {
                let inner = parse_expression(lex, self)?;
                lex.expect_sym(')')?;
                Ok(inner)
            }
            other => Err(lex.err(format!("expected an element atom, found {other:?}"))),
        }
    }

    fn add(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.add(b)
    }
    fn sub(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.sub(b)
    }
    fn mul(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        a.mul(b)
    }
    fn neg(&self, a: &WeylElement) -> Result<WeylElement> {
        Ok(a.neg())
    }
    fn pow(&self, a: &WeylElement, e: u32) -> Result<WeylElement> {
        a.pow(e)
    }
}

pub fn parse_weyl(s: &str, params: &WeylParams) -> Result<WeylElement> {
    let mut lex = Lexer::new(s);
    let mut ctx = WeylCtx { params: params.clone() };
    let elem = parse_expression(&mut lex, &mut ctx)?;
    lex.expect_end()?;
    Ok(elem)
}

// ---- free-algebra expressions ----

struct NcCtx {
    ring: Ring,
    saw_genov: bool,
}

impl ExprContext for NcCtx {
    type Val = EvalExpr;

    fn atom(&mut self, lex: &mut Lexer) -> Result<EvalExpr> {
        match lex.next_tok() {
            Tok::Int(n) => Ok(EvalExpr::Lit(NcPoly::constant(
                &self.ring,
                self.ring.from_bigint(&n),
            ))),
            Tok::Ident(name) => match name.as_str() {
                "st" => {
                    lex.expect_sym('(')?;
                    let n = lex.expect_uint()?;
                    lex.expect_sym(')')?;
                    Ok(EvalExpr::Lit(st_n(&self.ring, n as u32)?))
                }
                "genov" => {
                    lex.expect_sym('(')?;
                    let p = lex.expect_uint()?;
                    lex.expect_sym(',')?;
                    let q = lex.expect_uint()?;
                    lex.expect_sym(')')?;
                    self.saw_genov = true;
                    genov(&self.ring, p, q)
                }
                "circ" => {
                    lex.expect_sym('(')?;
                    let a = parse_expression(lex, self)?;
                    lex.expect_sym(',')?;
                    let b = parse_expression(lex, self)?;
                    lex.expect_sym(')')?;
                    Ok(EvalExpr::Circle(Box::new(a), Box::new(b)))
                }
                other => {
                    if let Some(rest) = other.strip_prefix('x') {
                        if let Ok(idx) = rest.parse::<u32>() {
                            if idx >= 1 {
                                return Ok(EvalExpr::var(&self.ring, idx));
                            }
                        }
                    }
                    Err(lex.err(format!("unknown symbol '{other}'")))
                }
            },
            Tok::Sym('[') => {
                let a = parse_expression(lex, self)?;
                lex.expect_sym(',')?;
                let b = parse_expression(lex, self)?;
                lex.expect_sym(']')?;
                Ok(EvalExpr::Commutator(Box::new(a), Box::new(b)))
            }
            Tok::Sym('(') => {
                let inner = parse_expression(lex, self)?;
                lex.expect_sym(')')?;
                Ok(inner)
            }
            other => Err(lex.err(format!("expected an expression atom, found {other:?}"))),
        }
    }

    fn add(&self, a: &EvalExpr, b: &EvalExpr) -> Result<EvalExpr> {
        Ok(EvalExpr::Add(Box::new(a.clone()), Box::new(b.clone())))
    }
    fn sub(&self, a: &EvalExpr, b: &EvalExpr) -> Result<EvalExpr> {
        Ok(EvalExpr::Sub(Box::new(a.clone()), Box::new(b.clone())))
    }
    fn mul(&self, a: &EvalExpr, b: &EvalExpr) -> Result<EvalExpr> {
        Ok(EvalExpr::Mul(Box::new(a.clone()), Box::new(b.clone())))
    }
    fn neg(&self, a: &EvalExpr) -> Result<EvalExpr> {
        Ok(EvalExpr::Neg(Box::new(a.clone())))
    }
    fn pow(&self, a: &EvalExpr, e: u32) -> Result<EvalExpr> {
        Ok(EvalExpr::Pow(Box::new(a.clone()), e))
    }
}

/// Parse a free-algebra expression. Small expansions come back as sparse
/// polynomials; anything involving a Genov polynomial stays structural.
pub fn parse_nc(s: &str, coeff_ring: &Ring) -> Result<Candidate> {
    let mut lex = Lexer::new(s);
    let mut ctx = NcCtx { ring: coeff_ring.clone(), saw_genov: false };
    let expr = parse_expression(&mut lex, &mut ctx)?;
    lex.expect_end()?;
    if ctx.saw_genov {
        return Ok(Candidate::Expr(expr, coeff_ring.clone()));
    }
    Ok(Candidate::from_expr(expr, coeff_ring.clone()))
}

// ---- algebra handles ----

/// `mat(2,Fp(3))`, `grassmann(4,Fp(3))`, any finite ring, or
/// `weyl(<ring>; <h>; <bound>)` / `diffop(<ring>; <h>; <bound>)`.
pub fn parse_algebra(s: &str) -> Result<AlgebraHandle> {
    let mut lex = Lexer::new(s);
    if let Tok::Ident(name) = lex.peek() {
        if name == "weyl" || name == "diffop" {
            lex.next_tok();
            lex.expect_sym('(')?;
            let ring = parse_ring_inner(&mut lex)?;
            lex.expect_sym(';')?;
            let h = parse_poly_until(&mut lex, &ring, ';')?;
            let bound = lex.expect_uint()? as u32;
            lex.expect_sym(')')?;
            lex.expect_end()?;
            return if name == "weyl" {
                let params = WeylParams::new(ring, h)?;
                Ok(AlgebraHandle::weyl_truncated(params, bound))
            } else {
                Ok(AlgebraHandle::diff_ops(ring, h, bound))
            };
        }
    }
    let ring = parse_ring(s)?;
    Ok(AlgebraHandle::finite(ring))
}

/// Parse a univariate polynomial in x up to (and consuming) the given
/// delimiter.
fn parse_poly_until(lex: &mut Lexer, ring: &Ring, delim: char) -> Result<CommPoly> {
    let mut ctx = PolyCtx { ring: ring.clone(), vars: vec!["x".to_string()] };
    let poly = parse_expression(lex, &mut ctx)?;
    lex.expect_sym(delim)?;
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingElement;

    #[test]
    fn ring_grammar() {
        assert_eq!(parse_ring("Q").unwrap(), Ring::rationals());
        assert_eq!(parse_ring("Fp(5)").unwrap(), Ring::prime_field(5).unwrap());
        assert_eq!(parse_ring("GF(4)").unwrap(), Ring::galois_field(4).unwrap());
        assert_eq!(
            parse_ring("dual(Fp(3))").unwrap(),
            Ring::dual(Ring::prime_field(3).unwrap())
        );
        assert_eq!(
            parse_ring("grassmann(4,Fp(3))").unwrap(),
            Ring::grassmann(4, Ring::prime_field(3).unwrap()).unwrap()
        );
        assert_eq!(
            parse_ring("mat(2,Fp(2))").unwrap(),
            Ring::matrix_ring(2, Ring::prime_field(2).unwrap()).unwrap()
        );
        assert_eq!(
            parse_ring("prod(Fp(2),Fp(2))").unwrap(),
            Ring::product(vec![
                Ring::prime_field(2).unwrap(),
                Ring::prime_field(2).unwrap()
            ])
            .unwrap()
        );
        assert!(parse_ring("Fp(4)").is_err());
        assert!(parse_ring("nonsense(3)").is_err());
    }

    #[test]
    fn ring_round_trip() {
        for s in [
            "Q",
            "Fp(5)",
            "GF(9)",
            "dual(Fp(3))",
            "grassmann(4,Fp(3))",
            "mat(2,GF(4))",
            "prod(Fp(2),Fp(3))",
            "mat(2,dual(Fp(3)))",
        ] {
            let r = parse_ring(s).unwrap();
            assert_eq!(parse_ring(&r.to_string()).unwrap(), r, "{s}");
        }
    }

    #[test]
    fn poly_grammar() {
        let f5 = Ring::prime_field(5).unwrap();
        let p = parse_poly("x^2 + 3*x", &f5, &["x"]).unwrap();
        assert_eq!(p.to_string(), "x^2 + 3*x");
        let z = parse_poly("z*1 + 0", &f5, &["z"]).unwrap();
        assert_eq!(z, CommPoly::variable(&f5, &["z"], 0));
        // dual-number literal
        let d3 = Ring::dual(Ring::prime_field(3).unwrap());
        let h = parse_poly("zeta", &d3, &["x"]).unwrap();
        assert_eq!(h.constant_coeff(), d3.zeta().unwrap());
        // rationals with division
        let q = Ring::rationals();
        let half = parse_poly("1/2*x", &q, &["x"]).unwrap();
        let (_, lead) = half.leading_data().unwrap();
        assert_eq!(lead.to_string(), "1/2");
    }

    #[test]
    fn poly_round_trip() {
        let rings: Vec<(Ring, &str)> = vec![
            (Ring::prime_field(5).unwrap(), "x^3 + 2*x + 4"),
            (Ring::rationals(), "x^2 + 3*x"),
            (Ring::dual(Ring::prime_field(3).unwrap()), "zeta*x^2 + 2"),
            (Ring::galois_field(4).unwrap(), "g*x + g^1"),
        ];
        for (ring, src) in rings {
            let p = parse_poly(src, &ring, &["x"]).unwrap();
            let reparsed = parse_poly(&p.to_string(), &ring, &["x"]).unwrap();
            assert_eq!(p, reparsed, "{src}");
        }
    }

    #[test]
    fn weyl_grammar_and_round_trip() {
        let f3 = Ring::prime_field(3).unwrap();
        let h = parse_poly("x", &f3, &["x"]).unwrap();
        let params = WeylParams::new(f3.clone(), h).unwrap();
        let e = parse_weyl("x^2*yh^3 + 2*x*yh + 1", &params).unwrap();
        assert_eq!(e.coeff(2, 3), f3.one());
        assert_eq!(e.coeff(1, 1), f3.from_int(2));
        let reparsed = parse_weyl(&e.to_string(), &params).unwrap();
        assert_eq!(e, reparsed);
        // products are normalized through the relation
        let yx = parse_weyl("yh*x", &params).unwrap();
        let expected = parse_weyl("x*yh + x", &params).unwrap();
        assert_eq!(yx, expected);
    }

    #[test]
    fn nc_grammar() {
        let f3 = Ring::prime_field(3).unwrap();
        // bracket nesting gives the triple commutator
        let f1 = parse_nc("[[x1,x2],x3]", &f3).unwrap();
        match f1 {
            Candidate::Poly(p) => {
                let ids = crate::freealg::named_identities(&f3).unwrap();
                assert_eq!(p, ids.f1);
            }
            _ => panic!("expected expansion"),
        }
        // st(4) and circ
        let st4 = parse_nc("st(4)", &f3).unwrap();
        match st4 {
            Candidate::Poly(p) => assert_eq!(p, st_n(&f3, 4).unwrap()),
            _ => panic!("expected expansion"),
        }
        let circ = parse_nc("circ(x1,x2)", &f3).unwrap();
        match circ {
            Candidate::Poly(p) => {
                assert_eq!(
                    p,
                    NcPoly::var(&f3, 1).circle(&NcPoly::var(&f3, 2)).unwrap()
                );
            }
            _ => panic!("expected expansion"),
        }
        // Genov candidates stay structural by default
        let f2 = Ring::prime_field(2).unwrap();
        assert!(matches!(parse_nc("genov(2,2)", &f2).unwrap(), Candidate::Expr(..)));
        assert!(matches!(parse_nc("genov(2,4)", &f2).unwrap(), Candidate::Expr(..)));
    }

    #[test]
    fn nc_round_trip_on_expanded_polys() {
        let f3 = Ring::prime_field(3).unwrap();
        for src in ["[[x1,x2],x3]", "st(3)", "x1*x2 - x2*x1", "2*x1*x1 + x2"] {
            let c = parse_nc(src, &f3).unwrap();
            let p = match c {
                Candidate::Poly(p) => p,
                _ => panic!("expected expansion for {src}"),
            };
            let reparsed = match parse_nc(&p.to_string(), &f3).unwrap() {
                Candidate::Poly(p) => p,
                _ => panic!(),
            };
            assert_eq!(p, reparsed, "{src}");
        }
    }

    #[test]
    fn algebra_grammar() {
        assert!(matches!(
            parse_algebra("mat(2,Fp(3))").unwrap(),
            AlgebraHandle::Finite { .. }
        ));
        match parse_algebra("weyl(Fp(3); x^2+1; 2)").unwrap() {
            AlgebraHandle::WeylTruncated { params, bound } => {
                assert_eq!(bound, 2);
                assert_eq!(params.ring(), &Ring::prime_field(3).unwrap());
                assert_eq!(params.h().degree(0), Some(2));
            }
            _ => panic!("expected a truncated Weyl handle"),
        }
        assert!(matches!(
            parse_algebra("diffop(Fp(2); x; 4)").unwrap(),
            AlgebraHandle::DiffOps { .. }
        ));
    }

    #[test]
    fn grassmann_literals_in_polys() {
        let g3 = Ring::grassmann(3, Ring::prime_field(3).unwrap()).unwrap();
        let p = parse_poly("e1*e2*x + 1", &g3, &["x"]).unwrap();
        let c: RingElement = p.coeff([1, 0]);
        assert_eq!(c, g3.grassmann_word(&[1, 2]).unwrap());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let f3 = Ring::prime_field(3).unwrap();
        match parse_poly("x +* 2", &f3, &["x"]) {
            Err(Error::Parse { pos, .. }) => assert!(pos >= 3),
            other => panic!("expected a parse error, got {other:?}"),
        }
        assert!(parse_ring("mat(2,").is_err());
        assert!(parse_nc("[[x1,x2]", &f3).is_err());
    }
}
