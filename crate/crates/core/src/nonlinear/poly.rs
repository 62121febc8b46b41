//! Sparse multivariate polynomials over metric symbols with rational
//! coefficients.
//!
//! Lower and inverse metric entries are independent symbols; the inverse
//! ones carry the `inverse_metric` marker. Factors that no polynomial can
//! represent (√−g, 1/g^00) are recorded as markers next to the polynomial
//! part rather than expanded.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::canonical::FieldPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Var {
    /// g_ab, a ≤ b
    Lower(usize, usize),
    /// g^ab, a ≤ b
    Upper(usize, usize),
    /// g_ab,k, a ≤ b
    Deriv(usize, usize, usize),
}

impl Var {
    pub fn lower(a: usize, b: usize) -> Self {
        Var::Lower(a.min(b), a.max(b))
    }

    pub fn upper(a: usize, b: usize) -> Self {
        Var::Upper(a.min(b), a.max(b))
    }

    pub fn deriv(a: usize, b: usize, k: usize) -> Self {
        Var::Deriv(a.min(b), a.max(b), k)
    }

    fn eval(&self, p: &FieldPoint) -> f64 {
        match *self {
            Var::Lower(a, b) => p.metric().lower(a, b),
            Var::Upper(a, b) => p.metric().upper(a, b),
            Var::Deriv(a, b, k) => p.dg(a, b, k),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Lower(a, b) => write!(f, "g_{a}{b}"),
            Var::Upper(a, b) => write!(f, "g^{a}{b}"),
            Var::Deriv(a, b, k) => write!(f, "g_{a}{b},{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonPoly {
    SqrtNegDet,
    InverseMetric,
    InverseG00,
}

impl NonPoly {
    pub fn name(&self) -> &'static str {
        match self {
            NonPoly::SqrtNegDet => "sqrt_neg_det",
            NonPoly::InverseMetric => "inverse_metric",
            NonPoly::InverseG00 => "inverse_g00",
        }
    }
}

/// Sorted (variable, exponent) list; empty is the unit monomial.
pub type Monomial = Vec<(Var, u32)>;

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricPolynomial {
    monomials: BTreeMap<Monomial, Rational64>,
    flags: BTreeSet<NonPoly>,
    /// Power of g^00 dividing the polynomial part (marked `inverse_g00`).
    g00_denominator: u32,
}

impl MetricPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![(v, 1)], Rational64::one());
        if matches!(v, Var::Upper(..)) {
            p.flags.insert(NonPoly::InverseMetric);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational64) {
        if c.is_zero() {
            return;
        }
        match self.monomials.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn with_flag(mut self, f: NonPoly) -> Self {
        self.flags.insert(f);
        self
    }

    /// Divides by (g^00)^k, marking `inverse_g00`.
    pub fn over_g00(mut self, k: u32) -> Self {
        self.g00_denominator += k;
        if self.g00_denominator > 0 {
            self.flags.insert(NonPoly::InverseG00);
        }
        self
    }

    pub fn flags(&self) -> &BTreeSet<NonPoly> {
        &self.flags
    }

    pub fn flag_names(&self) -> Vec<String> {
        self.flags.iter().map(|f| f.name().to_string()).collect()
    }

    pub fn g00_denominator(&self) -> u32 {
        self.g00_denominator
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = (&Monomial, &Rational64)> {
        self.monomials.iter()
    }

    fn max_degree(&self, count: impl Fn(&Var) -> bool) -> usize {
        self.monomials
            .keys()
            .map(|m| m.iter().filter(|(v, _)| count(v)).map(|(_, e)| *e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Total degree over all symbols; max over monomials.
    pub fn degree(&self) -> usize {
        self.max_degree(|_| true)
    }

    /// Degree in metric entries, lower and inverse together.
    pub fn metric_degree(&self) -> usize {
        self.max_degree(|v| !matches!(v, Var::Deriv(..)))
    }

    pub fn lower_degree(&self) -> usize {
        self.max_degree(|v| matches!(v, Var::Lower(..)))
    }

    pub fn inverse_degree(&self) -> usize {
        self.max_degree(|v| matches!(v, Var::Upper(..)))
    }

    pub fn derivative_degree(&self) -> usize {
        self.max_degree(|v| matches!(v, Var::Deriv(..)))
    }

    /// Metric degree with the g^00 denominator subtracted.
    pub fn net_metric_degree(&self) -> i64 {
        self.metric_degree() as i64 - self.g00_denominator as i64
    }

    /// Whether the polynomial part is homogeneous in metric entries.
    pub fn is_metric_homogeneous(&self) -> bool {
        self.monomials
            .keys()
            .map(|m| m.iter().filter(|(v, _)| !matches!(v, Var::Deriv(..))).map(|(_, e)| *e).sum::<u32>())
            .all_equal()
    }

    pub fn scale(&self, c: Rational64) -> Self {
        let mut out = Self { monomials: BTreeMap::new(), flags: self.flags.clone(), g00_denominator: self.g00_denominator };
        for (m, v) in &self.monomials {
            out.add_term(m.clone(), *v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.flags.extend(other.flags.iter().copied());
        if self.g00_denominator != other.g00_denominator {
            // bring both to the common denominator (g^00)^k
            let k = self.g00_denominator.max(other.g00_denominator);
            let lift = |p: &Self| p.mul(&Self::var(Var::upper(0, 0)).pow(k - p.g00_denominator)).monomials;
            let mine = lift(self);
            self.monomials = mine;
            self.g00_denominator = k;
            for (m, v) in lift(other) {
                self.add_term(m, v);
            }
            return;
        }
        for (m, v) in &other.monomials {
            self.add_term(m.clone(), *v);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Rational64::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        out.flags = self.flags.union(&other.flags).copied().collect();
        out.g00_denominator = self.g00_denominator + other.g00_denominator;
        for (a, x) in &self.monomials {
            for (b, y) in &other.monomials {
                out.add_term(mul_monomials(a, b), *x * *y);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Rational64::one()), |acc, _| acc.mul(self))
    }

    /// Value of the polynomial part divided by (g^00)^k. Markers other than
    /// the g^00 denominator are not applied.
    pub fn eval(&self, p: &FieldPoint) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.monomials {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (v, e) in m {
                t *= v.eval(p).powi(*e as i32);
            }
            acc += t;
        }
        acc / p.metric().g00().powi(self.g00_denominator as i32)
    }

    /// {π^mn, P} with {π^mn, g^ab} = Δ^{mn;ab}, {π^mn, g_ab} = −Δ^{mn}_{ab}
    /// and {π^mn, g_ab,k} = 0. Only defined without a g^00 denominator.
    pub fn bracket_pi(&self, m: usize, n: usize) -> Self {
        debug_assert_eq!(self.g00_denominator, 0);
        let half = Rational64::new(1, 2);
        let mut out = Self::zero();
        out.flags = self.flags.clone();
        out.g00_denominator = self.g00_denominator;
        let delta = |x: usize, y: usize| (x == y) as i64;
        for (mono, c) in &self.monomials {
            for (i, &(v, e)) in mono.iter().enumerate() {
                let mut rest = mono.clone();
                if e == 1 {
                    rest.remove(i);
                } else {
                    rest[i].1 -= 1;
                }
                let coeff = *c * Rational64::from_integer(e as i64);
                match v {
                    Var::Upper(a, b) => {
                        out.flags.insert(NonPoly::InverseMetric);
                        for (x, y) in [((a, m), (b, n)), ((a, n), (b, m))] {
                            let f = mul_monomials(&rest, &mul_monomials(&vec![(Var::upper(x.0, x.1), 1)], &vec![(Var::upper(y.0, y.1), 1)]));
                            out.add_term(f, coeff * half);
                        }
                    }
                    Var::Lower(a, b) => {
                        let dd = delta(m, a) * delta(n, b) + delta(n, a) * delta(m, b);
                        out.add_term(rest, -coeff * half * Rational64::from_integer(dd));
                    }
                    Var::Deriv(..) => {}
                }
            }
        }
        out
    }
}

impl fmt::Display for MetricPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            write!(f, "0")?;
        }
        for (i, (m, c)) in self.monomials.iter().enumerate() {
            let sign = if c.is_negative() { " - " } else if i > 0 { " + " } else { "" };
            let abs = c.abs();
            let mut parts: Vec<String> = Vec::new();
            if m.is_empty() || !abs.is_one() {
                parts.push(abs.to_string());
            }
            for (v, e) in m {
                parts.push(if *e == 1 { v.to_string() } else { format!("{v}^{e}") });
            }
            write!(f, "{sign}{}", parts.join(" "))?;
        }
        if self.g00_denominator > 0 {
            write!(f, " / (g^00)^{}", self.g00_denominator)?;
        }
        Ok(())
    }
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let inversions = (0..perm.len()).tuple_combinations().filter(|&(i, j)| perm[i] > perm[j]).count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// det g by the Leibniz expansion over the independent components g_ab.
pub fn poly_det(d: usize) -> MetricPolynomial {
    let mut out = MetricPolynomial::zero();
    for perm in (0..d).permutations(d) {
        let mut mono = MetricPolynomial::constant(Rational64::from_integer(permutation_sign(&perm)));
        for (i, &j) in perm.iter().enumerate() {
            mono = mono.mul(&MetricPolynomial::var(Var::lower(i, j)));
        }
        out.add_assign(&mono);
    }
    out
}

/// B^{αβγμνρ} in inverse-metric symbols.
pub fn b_poly(i: [usize; 6]) -> MetricPolynomial {
    let [a, b, c, mu, nu, rho] = i;
    let u = |x: usize, y: usize| MetricPolynomial::var(Var::upper(x, y));
    let triple = |x: (usize, usize), y: (usize, usize), z: (usize, usize)| u(x.0, x.1).mul(&u(y.0, y.1)).mul(&u(z.0, z.1));
    let two = Rational64::from_integer(2);
    triple((a, b), (c, rho), (mu, nu))
        .sub(&triple((a, mu), (b, nu), (c, rho)))
        .add(&triple((a, rho), (b, nu), (c, mu)).scale(two))
        .sub(&triple((a, b), (c, mu), (nu, rho)).scale(two))
}

/// B^{(αβγ|μνρ)}, the pair-exchange average.
pub fn bs_poly(i: [usize; 6]) -> MetricPolynomial {
    let [a, b, c, mu, nu, rho] = i;
    b_poly(i).add(&b_poly([mu, nu, rho, a, b, c])).scale(Rational64::new(1, 2))
}

/// B^{((αβ)γ|μνρ)}, additionally symmetrized in α ↔ β.
pub fn bd_poly(i: [usize; 6]) -> MetricPolynomial {
    let [a, b, c, mu, nu, rho] = i;
    bs_poly(i).add(&bs_poly([b, a, c, mu, nu, rho])).scale(Rational64::new(1, 2))
}

/// Σ_{μν, spatial k} T^{pq0μνk} g_μν,k for T = `b` (one of the B builders).
pub fn contracted_with_derivatives(d: usize, p: usize, q: usize, b: fn([usize; 6]) -> MetricPolynomial) -> MetricPolynomial {
    let mut out = MetricPolynomial::zero();
    for mu in 0..d {
        for nu in 0..d {
            for k in 1..d {
                out.add_assign(&b([p, q, 0, mu, nu, k]).mul(&MetricPolynomial::var(Var::deriv(mu, nu, k))));
            }
        }
    }
    out
}

/// U = B^{μνkαβl} g_μν,k g_αβ,l over spatial k, l.
pub fn potential_poly(d: usize) -> MetricPolynomial {
    let mut out = MetricPolynomial::zero();
    let dv = |a: usize, b: usize, k: usize| MetricPolynomial::var(Var::deriv(a, b, k));
    for (mu, nu, k) in itertools::iproduct!(0..d, 0..d, 1..d) {
        let mut inner = MetricPolynomial::zero();
        for (a, b, l) in itertools::iproduct!(0..d, 0..d, 1..d) {
            inner.add_assign(&b_poly([mu, nu, k, a, b, l]).mul(&dv(a, b, l)));
        }
        out.add_assign(&inner.mul(&dv(mu, nu, k)));
    }
    out
}

/// g^00 E^{pqmn} with the 1/g^00 of e^{ab} cleared: (ê^pq ê^mn − ê^pm ê^qn)/g^00
/// where ê^ab = g^00 g^ab − g^0a g^0b.
pub fn g00_big_e_poly(p: usize, q: usize, m: usize, n: usize) -> MetricPolynomial {
    let u = |x: usize, y: usize| MetricPolynomial::var(Var::upper(x, y));
    let e = |a: usize, b: usize| u(0, 0).mul(&u(a, b)).sub(&u(0, a).mul(&u(0, b)));
    e(p, q).mul(&e(m, n)).sub(&e(p, m).mul(&e(q, n))).over_g00(1)
}
