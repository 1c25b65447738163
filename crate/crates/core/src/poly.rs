//! Sparse multivariate polynomials over the integers.
//!
//! Variables are edge ids ([`Var`]). Terms are kept in a `BTreeMap` keyed by
//! [`Monomial`], whose `Ord` is graded lexicographic with smaller variable
//! ids being more significant. The canonical (printing) order is descending,
//! so the leading term is the last map entry.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A polynomial variable. Edge ids double as variable ids.
pub type Var = u32;

/// A monomial stored as a sorted multiset of variables: `x1^2*x3` is `[1, 1, 3]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[Var; 24]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        let mut s = SmallVec::new();
        s.push(v);
        Monomial(s)
    }

    /// Builds a monomial from `(variable, exponent)` pairs in any order.
    pub fn from_powers<I: IntoIterator<Item = (Var, u32)>>(powers: I) -> Self {
        let mut s: SmallVec<[Var; 24]> = SmallVec::new();
        for (v, e) in powers {
            for _ in 0..e {
                s.push(v);
            }
        }
        s.sort_unstable();
        Monomial(s)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Exponent of `v`.
    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().filter(|&&w| w == v).count() as u32
    }

    /// Iterates `(variable, exponent)` pairs in increasing variable order.
    pub fn powers(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= self.0.len() {
                return None;
            }
            let v = self.0[i];
            let mut e = 0;
            while i < self.0.len() && self.0[i] == v {
                e += 1;
                i += 1;
            }
            Some((v, e))
        })
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.powers().map(|(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len());
        let mut j = 0;
        for &x in a.iter() {
            if j < b.len() && b[j] == x {
                j += 1;
            } else if j < b.len() && b[j] < x {
                return None;
            } else {
                out.push(x);
            }
        }
        if j == b.len() {
            Some(Monomial(out))
        } else {
            None
        }
    }

    /// Square root of a monomial whose exponents are all even.
    pub fn sqrt(&self) -> Option<Monomial> {
        let mut out = SmallVec::new();
        for (v, e) in self.powers() {
            if e % 2 != 0 {
                return None;
            }
            for _ in 0..e / 2 {
                out.push(v);
            }
        }
        Some(Monomial(out))
    }

    /// Removes every occurrence of `v`, returning the stripped monomial and the exponent.
    pub fn split_var(&self, v: Var) -> (Monomial, u32) {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut e = 0;
        for &x in self.0.iter() {
            if x == v {
                e += 1;
            } else {
                out.push(x);
            }
        }
        (Monomial(out), e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", MonomialDisplay(self, &default_name))
    }
}

fn default_name(v: Var) -> String {
    format!("a{v}")
}

struct MonomialDisplay<'a, F: Fn(Var) -> String>(&'a Monomial, &'a F);

impl<F: Fn(Var) -> String> fmt::Display for MonomialDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in self.0.powers() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", (self.1)(v))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// An exact polynomial with integer coefficients. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

/// `p = a2*x^2 + a1*x + a0` with the coefficients free of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticDecomposition {
    pub var: Var,
    pub a2: Poly,
    pub a1: Poly,
    pub a0: Poly,
}

impl QuadraticDecomposition {
    pub fn reassemble(&self) -> Poly {
        let x = Poly::var(self.var);
        &(&(&self.a2 * &x) * &x) + &(&(&self.a1 * &x) + &self.a0)
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(1)
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Poly::term(1, Monomial::var(v))
    }

    pub fn term<T: Into<BigInt>>(c: T, m: Monomial) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// Product of the given variables with coefficient one.
    pub fn monomial_of<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        Poly::term(1, Monomial::from_powers(vars.into_iter().map(|v| (v, 1))))
    }

    /// Collects terms, summing duplicate monomials.
    pub fn from_terms<I: IntoIterator<Item = (BigInt, Monomial)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The constant value if the polynomial has degree zero (0 for the zero polynomial).
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.iter().next().filter(|(m, _)| m.is_one()).map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.as_constant().is_some_and(|c| c.abs().is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (descending graded-lex) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Every exponent is at most one.
    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|m| m.powers().all(|(_, e)| e <= 1))
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale<T: Into<BigInt>>(&self, k: T) -> Poly {
        let k = k.into();
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * &k)).collect() }
    }

    fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        // Multiplying every key by the same monomial preserves the order.
        Poly { terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect() }
    }

    fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Product with coefficients accumulated in `i128`; callers check the bound.
    fn mul_small(&self, rhs: &Poly) -> Poly {
        let a: Vec<(&Monomial, i128)> = self.terms.iter().map(|(m, c)| (m, c.to_i128().expect("bounded"))).collect();
        let b: Vec<(&Monomial, i128)> = rhs.terms.iter().map(|(m, c)| (m, c.to_i128().expect("bounded"))).collect();
        let mut acc: FxHashMap<Monomial, i128> = FxHashMap::default();
        for &(m1, c1) in &a {
            for &(m2, c2) in &b {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (m, BigInt::from(c))).collect() }
    }

    /// `self * self`, computing each cross product once.
    pub fn square(&self) -> Poly {
        let bound = 2 * self.max_coeff_bits() + (64 - (self.terms.len() as u64).leading_zeros() as u64) + 1;
        if bound >= 126 {
            return self * self;
        }
        let a: Vec<(&Monomial, i128)> = self.terms.iter().map(|(m, c)| (m, c.to_i128().expect("bounded"))).collect();
        let mut acc: FxHashMap<Monomial, i128> = FxHashMap::default();
        for (i, &(m1, c1)) in a.iter().enumerate() {
            *acc.entry(m1.mul(m1)).or_default() += c1 * c1;
            for &(m2, c2) in &a[i + 1..] {
                *acc.entry(m1.mul(m2)).or_default() += 2 * c1 * c2;
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (m, BigInt::from(c))).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Greatest common divisor of the coefficients (non-negative; 0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content, keeping the sign of each coefficient.
    pub fn primitive_part(&self) -> Poly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c / &g)).collect() }
    }

    /// Multiplies by ±1 so the leading coefficient is positive.
    pub fn normalize_sign(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    /// Primitive part with positive leading coefficient.
    pub fn normalized(&self) -> Poly {
        self.primitive_part().normalize_sign()
    }

    /// Equality up to a global sign.
    pub fn eq_up_to_sign(&self, other: &Poly) -> bool {
        self == other || *self == -other
    }

    /// Sets `v = value`.
    pub fn eval_var<T: Into<BigInt>>(&self, v: Var, value: T) -> Poly {
        let value = value.into();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(v);
            if e == 0 {
                out.add_term(rest, c.clone());
            } else if !value.is_zero() {
                out.add_term(rest, c * num_traits::pow(value.clone(), e as usize));
            }
        }
        out
    }

    /// Coefficient of `v^k` as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, v: Var, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(v);
            if e == k {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Evaluates at an integer point; missing variables are treated as zero.
    pub fn evaluate(&self, point: &HashMap<Var, BigInt>) -> BigInt {
        let zero = BigInt::zero();
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.powers() {
                let x = point.get(&v).unwrap_or(&zero);
                t *= num_traits::pow(x.clone(), e as usize);
                if t.is_zero() {
                    break;
                }
            }
            acc += t;
        }
        acc
    }

    /// Decomposes `self = a2*v^2 + a1*v + a0`.
    pub fn quadratic_in(&self, v: Var) -> Result<QuadraticDecomposition> {
        let mut parts = [Poly::zero(), Poly::zero(), Poly::zero()];
        for (m, c) in &self.terms {
            let (rest, e) = m.split_var(v);
            if e > 2 {
                return Err(Error::DegreeExceeded { var: v, degree: self.degree_in(v) });
            }
            parts[e as usize].add_term(rest, c.clone());
        }
        let [a0, a1, a2] = parts;
        Ok(QuadraticDecomposition { var: v, a2, a1, a0 })
    }

    /// `a1^2 - 4*a2*a0` with respect to `v`.
    pub fn discriminant_in(&self, v: Var) -> Result<Poly> {
        let q = self.quadratic_in(v)?;
        Ok(&q.a1.square() - &(&q.a2 * &q.a0).scale(4))
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, bindings: &HashMap<Var, Poly>) -> Poly {
        let mut powers: HashMap<(Var, u32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut t = Poly::constant(c.clone());
            for (v, e) in m.powers() {
                match bindings.get(&v) {
                    Some(b) => {
                        let p = powers.entry((v, e)).or_insert_with(|| b.pow(e));
                        t = &t * p;
                    }
                    None => kept.push((v, e)),
                }
                if t.is_zero() {
                    break;
                }
            }
            if t.is_zero() {
                continue;
            }
            let km = Monomial::from_powers(kept);
            for (tm, tc) in t.terms {
                out.add_term(tm.mul(&km), tc);
            }
        }
        out
    }

    /// Renames variables; variables absent from the map are kept.
    pub fn rename(&self, map: &HashMap<Var, Var>) -> Poly {
        let bindings = map.iter().map(|(&k, &v)| (k, Poly::var(v))).collect();
        self.substitute(&bindings)
    }

    /// Exact division; fails if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        let (dm, dc) = divisor.leading().ok_or(Error::DivisionByZero)?;
        if let Some(k) = divisor.as_constant() {
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                let (q, r) = c.div_rem(&k);
                if !r.is_zero() {
                    return Err(Error::InexactDivision);
                }
                terms.insert(m.clone(), q);
            }
            return Ok(Poly { terms });
        }
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((lm, lc)) = rem.leading() {
            let qm = lm.div(&dm).ok_or(Error::InexactDivision)?;
            let (qc, r) = lc.div_rem(&dc);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            let neg = -&qc;
            for (m, c) in &divisor.terms {
                rem.add_term(m.mul(&qm), c * &neg);
            }
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// Returns `e` with `e^2 == self`, sign-normalized, or `None` if no such
    /// polynomial exists. The square root of zero is zero.
    pub fn perfect_square_root(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if !self.passes_square_filter() {
            return None;
        }
        let (lm, lc) = self.leading()?;
        if lc.is_negative() {
            return None;
        }
        let root_c = lc.sqrt();
        if &(&root_c * &root_c) != lc {
            return None;
        }
        let root_m = lm.sqrt()?;
        let lead_m = root_m.clone();
        let two_lead_c: BigInt = &root_c * 2;

        let mut root = Poly::term(root_c.clone(), root_m.clone());
        let mut rem = self.clone();
        rem.add_term(root_m.mul(&root_m), -(&root_c * &root_c));
        let mut last = root_m;
        let max_terms = self.terms.len() + 1;
        while let Some((rm, rc)) = rem.leading() {
            // Next root term t satisfies 2*lead*t = leading(rem).
            let tm = rm.div(&lead_m)?;
            if tm >= last {
                return None;
            }
            let (tc, r) = rc.div_rem(&two_lead_c);
            if !r.is_zero() {
                return None;
            }
            // rem -= 2*root*t + t^2
            let twice = -(&tc * BigInt::from(2));
            for (m, c) in &root.terms {
                rem.add_term(m.mul(&tm), c * &twice);
            }
            rem.add_term(tm.mul(&tm), -(&tc * &tc));
            root.add_term(tm.clone(), tc);
            last = tm;
            if root.terms.len() > max_terms {
                return None;
            }
        }
        Some(root.normalize_sign())
    }

    /// Random evaluation: a non-square value at an integer point proves non-squareness.
    fn passes_square_filter(&self) -> bool {
        let vars = self.variables();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_5a0a);
        for _ in 0..4 {
            let point: HashMap<Var, BigInt> =
                vars.iter().map(|&v| (v, BigInt::from(rng.gen_range(-40i64..=40)))).collect();
            let val = self.evaluate(&point);
            if val.is_negative() {
                return false;
            }
            let r = val.sqrt();
            if r.clone() * r != val {
                return false;
            }
        }
        true
    }

    /// Plain-text rendering with a custom variable namer.
    pub fn display_with<'a, F: Fn(Var) -> String + 'a>(&'a self, namer: F) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, namer }
    }

    /// Structured form: `[coefficient, [[var, exp], ...]]` in canonical order.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        let terms: Vec<Value> = self
            .terms()
            .map(|(m, c)| {
                let coef = match c.to_i64() {
                    Some(x) => json!(x),
                    None => json!(c.to_string()),
                };
                let pw: Vec<Value> = m.powers().map(|(v, e)| json!([v, e])).collect();
                json!([coef, pw])
            })
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Poly> {
        let bad = || Error::Parse("malformed polynomial document".into());
        let terms = v.get("terms").and_then(|t| t.as_array()).ok_or_else(bad)?;
        let mut p = Poly::zero();
        for t in terms {
            let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let coef: BigInt = match &pair[0] {
                serde_json::Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad)?,
                serde_json::Value::String(s) => s.parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            };
            let mut powers = Vec::new();
            for ve in pair[1].as_array().ok_or_else(bad)? {
                let ve = ve.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let var = ve[0].as_u64().ok_or_else(bad)? as Var;
                let exp = ve[1].as_u64().ok_or_else(bad)? as u32;
                powers.push((var, exp));
            }
            p.add_term(Monomial::from_powers(powers), coef);
        }
        Ok(p)
    }
}

struct PolyDisplay<'a, F: Fn(Var) -> String> {
    poly: &'a Poly,
    namer: F,
}

impl<F: Fn(Var) -> String> fmt::Display for PolyDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write!(f, "{}", MonomialDisplay(m, &self.namer))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(default_name))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return rhs.mul_term(m, c);
        }
        if rhs.terms.len() == 1 {
            let (m, c) = rhs.terms.iter().next().unwrap();
            return self.mul_term(m, c);
        }
        let n = self.terms.len().min(rhs.terms.len()) as u64;
        let bound = self.max_coeff_bits() + rhs.max_coeff_bits() + (64 - n.leading_zeros() as u64);
        if bound < 126 {
            return self.mul_small(rhs);
        }
        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut acc = Poly::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}

/// Parses a polynomial expression such as `a1*a2 - 2*(a3 + 1)^2`.
///
/// Supports `+`, `-`, `*`, `^` with integer exponents and parentheses.
/// Variable names are resolved by `names`.
pub fn parse_poly(s: &str, names: &dyn Fn(&str) -> Option<Var>) -> Result<Poly> {
    let mut p = ExprParser { s: s.as_bytes(), pos: 0, names };
    let out = p.sum()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(Error::Parse(format!("unexpected '{}' at offset {}", p.s[p.pos] as char, p.pos)));
    }
    Ok(out)
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
    names: &'a dyn Fn(&str) -> Option<Var>,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.product()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += &self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .ok()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad exponent at offset {start}")))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse(format!("missing ')' at offset {}", self.pos)));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let t = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
                Ok(Poly::constant(t.parse::<BigInt>().expect("digits parse")))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii name");
                (self.names)(name).map(Poly::var).ok_or_else(|| Error::Parse(format!("unknown variable '{name}'")))
            }
            Some(c) => Err(Error::Parse(format!("unexpected '{}' at offset {}", c as char, self.pos))),
            None => Err(Error::Parse("unexpected end of polynomial".into())),
        }
    }
}

/// Name resolver accepting `a<id>`.
pub fn edge_var_name(s: &str) -> Option<Var> {
    s.strip_prefix('a').and_then(|d| d.parse().ok())
}
