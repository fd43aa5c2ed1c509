//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! The variable universe is fixed and small: matrix coordinates `S[i,j]`, the
//! extension coordinate `S0`, and the scalar parameters `y0..y9`, `t`, `a`,
//! `lambda`. Terms are kept in a canonical graded-lexicographic order over
//! that universe, so equal polynomials have equal representations and the
//! printed form is byte-stable. Equality with the zero polynomial is the
//! workhorse of every verification pass in this crate — there is no epsilon
//! anywhere.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout (reduced, positive denominator).
pub type Rational = num_rational::BigRational;

/// Parse a rational written as `p` or `p/q`. Thin wrapper that maps the
/// `num` error into [`PolyError`] with the offending text preserved.
pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    Rational::from_str(s.trim()).map_err(|_| PolyError::BadRational(s.to_string()))
}

/// Convenience constructor for small integer rationals.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Convenience constructor for small fractions `n/d`.
pub fn ratq(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A variable of the ambient polynomial ring.
///
/// The `Ord` derived from the variant order is contractual: coordinates come
/// before parameters, and within each kind the order is lexicographic. All
/// deterministic iteration (term order, coordinate enumeration, witness
/// selection) leans on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    /// Matrix coordinate `S[i,j]`, indices `1..=N`.
    S(u8, u8),
    /// The one-dimensional extension coordinate.
    S0,
    /// Catalog family parameter `y0..y9`.
    Y(u8),
    /// Catalog scale parameter `t`.
    T,
    /// Catalog parameter `a`.
    A,
    /// Pencil parameter used by compatibility checks.
    Lambda,
}

impl VarId {
    /// True for coordinates of a Poisson manifold (as opposed to scalar
    /// parameters that brackets treat as constants).
    pub fn is_coordinate(self) -> bool {
        matches!(self, VarId::S(_, _) | VarId::S0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::S(i, j) => write!(f, "S[{i},{j}]"),
            VarId::S0 => write!(f, "S0"),
            VarId::Y(k) => write!(f, "y{k}"),
            VarId::T => write!(f, "t"),
            VarId::A => write!(f, "a"),
            VarId::Lambda => write!(f, "lambda"),
        }
    }
}

/// A monomial: sorted list of `(variable, exponent)` with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    /// The empty product.
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// Build from unsorted, possibly repeated factors.
    pub fn from_factors(factors: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut map: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in factors {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent_of(&self, v: VarId) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Graded-lexicographic comparison: total degree first, then lex where an
    /// earlier `VarId` is the more significant position.
    fn grlex(&self, other: &Monomial) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (va, ea) = self.0[i];
            let (vb, eb) = other.0[j];
            match va.cmp(&vb) {
                // `self` has a positive power on an earlier variable.
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(&eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        // Equal on the common prefix. A leftover factor is a positive power
        // at a position where the other side has zero (cannot occur when the
        // total degrees are equal, but keep the comparison a genuine
        // lexicographic order for arbitrary inputs).
        match (i < self.0.len(), j < other.0.len()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grlex(other)
    }
}

/// Errors from parsing or evaluating polynomials.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("malformed rational literal `{0}`")]
    BadRational(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("evaluation point does not bind variable {0}")]
    UnboundVariable(VarId),
}

/// Sparse polynomial in canonical form: a term map monomials → nonzero
/// rational coefficients, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Polynomial { terms }
    }

    /// The polynomial `n` (integer shorthand).
    pub fn int(n: i64) -> Self {
        Polynomial::constant(rat(n))
    }

    pub fn var(v: VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), Rational::one());
        Polynomial { terms }
    }

    /// Single term `c * m`.
    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The coefficient of `m` (zero if absent).
    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// If the polynomial is a constant, return it.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::unit()) {
                return Some(c.clone());
            }
        }
        None
    }

    /// All variables that occur with positive exponent.
    pub fn variables(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for &(v, _) in m.factors() {
                out.insert(v);
            }
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Polynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, q)| (m.clone(), q * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to `v`.
    pub fn partial(&self, v: VarId) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e == 0 {
                continue;
            }
            let factors = m
                .factors()
                .iter()
                .copied()
                .map(|(w, k)| if w == v { (w, k - 1) } else { (w, k) });
            out.add_term(Monomial::from_factors(factors), c * rat(e as i64));
        }
        out
    }

    /// Replace every occurrence of `v` by the polynomial `p`.
    pub fn substitute(&self, v: VarId, p: &Polynomial) -> Polynomial {
        let mut powers: Vec<Polynomial> = vec![Polynomial::one()];
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v) as usize;
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * p;
                powers.push(next);
            }
            let rest = Monomial::from_factors(m.factors().iter().copied().filter(|&(w, _)| w != v));
            let contrib = powers[e].scale(c);
            for (m2, c2) in &contrib.terms {
                out.add_term(rest.mul(m2), c2.clone());
            }
        }
        out
    }

    /// Evaluate at a full point; every variable present must be bound.
    pub fn eval(&self, point: &BTreeMap<VarId, Rational>) -> Result<Rational, PolyError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for &(v, e) in m.factors() {
                let x = point.get(&v).ok_or(PolyError::UnboundVariable(v))?;
                for _ in 0..e {
                    prod *= x;
                }
            }
            acc += prod;
        }
        Ok(acc)
    }

    /// Collect coefficients of powers of `v`: result `r[k]` is the
    /// coefficient polynomial of `v^k` (none are zero except possibly `r[0]`
    /// when the whole polynomial is zero).
    pub fn coefficients_of(&self, v: VarId) -> Vec<(u32, Polynomial)> {
        let mut by_power: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            let rest = Monomial::from_factors(m.factors().iter().copied().filter(|&(w, _)| w != v));
            by_power
                .entry(e)
                .or_insert_with(Polynomial::zero)
                .add_term(rest, c.clone());
        }
        by_power.into_iter().collect()
    }

    /// Parse the canonical textual form; inverse of `Display` (and tolerant
    /// of extra whitespace and omitted `1*` coefficients).
    pub fn parse(input: &str) -> Result<Polynomial, PolyError> {
        Parser::new(input).parse_polynomial()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Leading term first (descending graded-lex).
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if m.is_unit() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                for (k, &(v, e)) in m.factors().iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    if e == 1 {
                        write!(f, "{v}")?;
                    } else {
                        write!(f, "{v}^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Polynomial::parse(s)
    }
}

/// Hand-rolled recursive-descent parser for the textual polynomial format:
/// a signed sum of terms, each a `*`-joined product of one optional rational
/// literal and variable powers (`S[i,j]`, `S0`, `y0`..`y9`, `t`, `a`,
/// `lambda`, each optionally `^e`).
struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: u8) -> Result<(), PolyError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn parse_uint(&mut self) -> Result<u64, PolyError> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        s.parse::<u64>()
            .or_else(|_| self.err("integer literal too large for an index"))
    }

    fn parse_bigint_digits(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        Ok(BigInt::parse_bytes(s.as_bytes(), 10).expect("digit run parses"))
    }

    fn parse_polynomial(&mut self) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero();
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut sign = Rational::one();
        if self.peek() == Some(b'-') {
            self.bump();
            sign = -sign;
        } else if self.peek() == Some(b'+') {
            self.bump();
        }
        loop {
            self.skip_ws();
            let term = self.parse_term()?;
            out.add_assign(&term.scale(&sign));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.bump();
                    sign = Rational::one();
                }
                Some(b'-') => {
                    self.bump();
                    sign = -Rational::one();
                }
                Some(c) => return self.err(format!("unexpected `{}`", c as char)),
            }
        }
        Ok(out)
    }

    fn parse_term(&mut self) -> Result<Polynomial, PolyError> {
        let mut coeff = Rational::one();
        let mut factors: Vec<(VarId, u32)> = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let numer = self.parse_bigint_digits()?;
                    let q = if self.peek() == Some(b'/') {
                        self.bump();
                        let denom = self.parse_bigint_digits()?;
                        if denom.is_zero() {
                            return self.err("zero denominator");
                        }
                        Rational::new(numer, denom)
                    } else {
                        Rational::from_integer(numer)
                    };
                    coeff *= q;
                }
                Some(_) => {
                    let v = self.parse_var()?;
                    let e = if self.peek() == Some(b'^') {
                        self.bump();
                        let e = self.parse_uint()?;
                        if e == 0 || e > u32::MAX as u64 {
                            return self.err("exponent out of range");
                        }
                        e as u32
                    } else {
                        1
                    };
                    factors.push((v, e));
                }
                None => return self.err("expected a term"),
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.bump();
            } else {
                break;
            }
        }
        Ok(Polynomial::term(coeff, Monomial::from_factors(factors)))
    }

    fn parse_var(&mut self) -> Result<VarId, PolyError> {
        match self.bump() {
            Some(b'S') => match self.peek() {
                Some(b'0') => {
                    self.bump();
                    Ok(VarId::S0)
                }
                Some(b'[') => {
                    self.bump();
                    self.skip_ws();
                    let i = self.parse_uint()?;
                    self.skip_ws();
                    self.expect(b',')?;
                    self.skip_ws();
                    let j = self.parse_uint()?;
                    self.skip_ws();
                    self.expect(b']')?;
                    if i == 0 || j == 0 || i > u8::MAX as u64 || j > u8::MAX as u64 {
                        self.err("matrix index out of range")
                    } else {
                        Ok(VarId::S(i as u8, j as u8))
                    }
                }
                _ => self.err("expected `S0` or `S[i,j]`"),
            },
            Some(b'y') => {
                let k = self.parse_uint()?;
                if k > 9 {
                    self.err("parameter index must be 0..=9")
                } else {
                    Ok(VarId::Y(k as u8))
                }
            }
            Some(b't') => Ok(VarId::T),
            Some(b'a') => Ok(VarId::A),
            Some(b'l') => {
                let rest = b"ambda";
                for &c in rest {
                    if self.bump() != Some(c) {
                        return self.err("expected `lambda`");
                    }
                }
                Ok(VarId::Lambda)
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("expected a variable"),
        }
    }
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    /// Fixed small variable universe for randomized algebra tests.
    const VARS: [VarId; 6] = [
        VarId::S(1, 1),
        VarId::S(1, 2),
        VarId::S(2, 1),
        VarId::S0,
        VarId::Y(0),
        VarId::T,
    ];

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratq(n, d))
    }

    fn arb_monomial() -> impl Strategy<Value = Monomial> {
        proptest::collection::vec((0usize..VARS.len(), 1u32..=2), 0..=3)
            .prop_map(|fs| Monomial::from_factors(fs.into_iter().map(|(v, e)| (VARS[v], e))))
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec((arb_monomial(), arb_rational()), 0..=4).prop_map(|ts| {
            let mut p = Polynomial::zero();
            for (m, c) in ts {
                p.add_assign(&Polynomial::term(c, m));
            }
            p
        })
    }

    fn arb_point() -> impl Strategy<Value = BTreeMap<VarId, Rational>> {
        proptest::collection::vec(arb_rational(), VARS.len())
            .prop_map(|vals| VARS.iter().copied().zip(vals).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p + &Polynomial::zero(), p.clone());
            prop_assert_eq!(&p * &Polynomial::one(), p.clone());
        }
    }

    proptest! {
        #[test]
        fn derivative_is_linear_and_leibniz(p in arb_poly(), q in arb_poly()) {
            for v in VARS {
                prop_assert_eq!((&p + &q).partial(v), &p.partial(v) + &q.partial(v));
                prop_assert_eq!(
                    (&p * &q).partial(v),
                    &(&p.partial(v) * &q) + &(&p * &q.partial(v))
                );
            }
        }

        #[test]
        fn substitute_is_a_ring_map(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            let v = VarId::S(1, 2);
            prop_assert_eq!(
                (&p + &q).substitute(v, &r),
                &p.substitute(v, &r) + &q.substitute(v, &r)
            );
            prop_assert_eq!(
                (&p * &q).substitute(v, &r),
                &p.substitute(v, &r) * &q.substitute(v, &r)
            );
        }

        #[test]
        fn eval_is_a_ring_homomorphism(p in arb_poly(), q in arb_poly(), pt in arb_point()) {
            let pv = p.eval(&pt).unwrap();
            let qv = q.eval(&pt).unwrap();
            prop_assert_eq!((&p + &q).eval(&pt).unwrap(), &pv + &qv);
            prop_assert_eq!((&p * &q).eval(&pt).unwrap(), &pv * &qv);
        }

        #[test]
        fn canonical_form_is_stable(p in arb_poly()) {
            // Rebuilding term by term and round-tripping through text are
            // both no-ops on an already-canonical polynomial.
            let mut rebuilt = Polynomial::zero();
            for (m, c) in p.terms() {
                rebuilt.add_assign(&Polynomial::term(c.clone(), m.clone()));
            }
            prop_assert_eq!(&rebuilt, &p);
            prop_assert_eq!(Polynomial::parse(&p.to_string()).unwrap(), p);
        }
    }
}
