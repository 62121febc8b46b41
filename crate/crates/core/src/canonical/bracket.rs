//! Symbolic Poisson-bracket engine over polynomial expressions in the
//! canonical symbols.
//!
//! The phase space is spanned by the metric components g_αβ and momenta
//! π^μν with {g_αβ, π^μν} = Δ^μν_αβ and all other fundamental brackets zero.
//! Derived symbols (g^αβ, √−g) carry their chain-rule brackets with the
//! momenta; spatial derivatives g_αβ,k bracket to zero with everything
//! (the delta tensor is treated as constant in space).

use std::collections::BTreeMap;
use std::fmt;

use crate::canonical::FieldPoint;
use crate::error::{GravError, Result};
use crate::grav::{delta_mixed_component, delta_upper_component};

/// A canonical symbol. Variant order fixes monomial ordering, so momenta
/// always sit at the right of every product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// g_ab (stored with a ≤ b)
    Metric(usize, usize),
    /// g^ab (stored with a ≤ b)
    InverseMetric(usize, usize),
    /// √−g
    SqrtNegDet,
    /// g_ab,k (stored with a ≤ b)
    Derivative(usize, usize, usize),
    /// A symbol outside the canonical algebra; bracketing it is an error.
    Opaque(String),
    /// π^ab (stored with a ≤ b)
    Momentum(usize, usize),
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Symbol {
    pub fn metric(a: usize, b: usize) -> Self {
        let (a, b) = ordered(a, b);
        Symbol::Metric(a, b)
    }

    pub fn inverse_metric(a: usize, b: usize) -> Self {
        let (a, b) = ordered(a, b);
        Symbol::InverseMetric(a, b)
    }

    pub fn derivative(a: usize, b: usize, k: usize) -> Self {
        let (a, b) = ordered(a, b);
        Symbol::Derivative(a, b, k)
    }

    pub fn momentum(a: usize, b: usize) -> Self {
        let (a, b) = ordered(a, b);
        Symbol::Momentum(a, b)
    }

    fn eval(&self, p: &FieldPoint) -> Result<f64> {
        Ok(match *self {
            Symbol::Metric(a, b) => p.metric().lower(a, b),
            Symbol::InverseMetric(a, b) => p.metric().upper(a, b),
            Symbol::SqrtNegDet => p.metric().sqrt_neg_det(),
            Symbol::Derivative(a, b, k) => p.dg(a, b, k),
            Symbol::Momentum(a, b) => p.momentum(a, b),
            Symbol::Opaque(ref name) => return Err(GravError::UnsupportedSymbol(name.clone())),
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Metric(a, b) => write!(f, "g_{a}{b}"),
            Symbol::InverseMetric(a, b) => write!(f, "g^{a}{b}"),
            Symbol::SqrtNegDet => write!(f, "sqrt(-g)"),
            Symbol::Derivative(a, b, k) => write!(f, "g_{a}{b},{k}"),
            Symbol::Opaque(name) => write!(f, "{name}"),
            Symbol::Momentum(a, b) => write!(f, "pi^{a}{b}"),
        }
    }
}

/// Sorted list of (symbol, power) pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn of(symbol: Symbol) -> Self {
        Monomial(vec![(symbol, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_left = j >= other.0.len() || (i < self.0.len() && self.0[i].0 <= other.0[j].0);
            let next = if take_left {
                i += 1;
                self.0[i - 1].clone()
            } else {
                j += 1;
                other.0[j - 1].clone()
            };
            match out.last_mut() {
                Some(last) if last.0 == next.0 => last.1 += next.1,
                _ => out.push(next),
            }
        }
        Monomial(out)
    }

    /// The monomial with one power of factor `index` removed.
    fn without_one(&self, index: usize) -> Monomial {
        let mut v = self.0.clone();
        if v[index].1 == 1 {
            v.remove(index);
        } else {
            v[index].1 -= 1;
        }
        Monomial(v)
    }

    fn eval(&self, p: &FieldPoint) -> Result<f64> {
        let mut acc = 1.0;
        for (s, e) in &self.0 {
            acc *= s.eval(p)?.powi(*e as i32);
        }
        Ok(acc)
    }
}

/// Finite polynomial over canonical symbols with real coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CanonicalExpr {
    terms: BTreeMap<Monomial, f64>,
}

impl CanonicalExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut e = Self::zero();
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut e = Self::zero();
        e.add_term(Monomial::of(s), 1.0);
        e
    }

    pub fn product(symbols: impl IntoIterator<Item = Symbol>, coeff: f64) -> Self {
        let mono = symbols.into_iter().fold(Monomial::one(), |m, s| m.mul(&Monomial::of(s)));
        let mut e = Self::zero();
        e.add_term(mono, coeff);
        e
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(mono).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            // keep the map free of exact zeros
            let key = self.terms.iter().find(|(_, v)| **v == 0.0).map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn eval(&self, p: &FieldPoint) -> Result<f64> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            acc += c * m.eval(p)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for CanonicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (s, e) in m.factors() {
                if *e == 1 {
                    write!(f, "*{s}")?;
                } else {
                    write!(f, "*{s}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// {x, y} for two symbols.
fn fundamental(x: &Symbol, y: &Symbol) -> Result<CanonicalExpr> {
    use Symbol::*;
    if let Opaque(name) = x {
        return Err(GravError::UnsupportedSymbol(name.clone()));
    }
    if let Opaque(name) = y {
        return Err(GravError::UnsupportedSymbol(name.clone()));
    }
    Ok(match (x, y) {
        (Momentum(..), Momentum(..)) => CanonicalExpr::zero(),
        (Momentum(..), _) => fundamental(y, x)?.scale(-1.0),
        (Metric(a, b), Momentum(m, n)) => CanonicalExpr::constant(delta_mixed_component(*m, *n, *a, *b)),
        // {g^ab, π^mn} = ½ (∂g^ab/∂g_mn + ∂g^ab/∂g_nm) = −Δ^{mn;ab}
        (InverseMetric(a, b), Momentum(m, n)) => {
            let g = Symbol::inverse_metric;
            CanonicalExpr::product([g(*a, *m), g(*b, *n)], -0.5)
                .add(&CanonicalExpr::product([g(*a, *n), g(*b, *m)], -0.5))
        }
        // {√−g, π^mn} = ½ √−g g^mn
        (SqrtNegDet, Momentum(m, n)) => CanonicalExpr::product([SqrtNegDet, Symbol::inverse_metric(*m, *n)], 0.5),
        _ => CanonicalExpr::zero(),
    })
}

/// {a, b}: bilinear, antisymmetric, Leibniz in both arguments.
pub fn poisson_bracket(a: &CanonicalExpr, b: &CanonicalExpr) -> Result<CanonicalExpr> {
    let mut out = CanonicalExpr::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            for (i, (x, ex)) in ma.0.iter().enumerate() {
                for (j, (y, ey)) in mb.0.iter().enumerate() {
                    let f = fundamental(x, y)?;
                    if f.is_zero() {
                        continue;
                    }
                    let rest = ma.without_one(i).mul(&mb.without_one(j));
                    let weight = ca * cb * (*ex as f64) * (*ey as f64);
                    for (mf, cf) in &f.terms {
                        out.add_term(rest.mul(mf), weight * cf);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// B^{abcdef} as a polynomial in inverse-metric symbols.
pub fn b_expr(i: [usize; 6]) -> CanonicalExpr {
    let [a, b, c, mu, nu, rho] = i;
    let g = Symbol::inverse_metric;
    CanonicalExpr::product([g(a, b), g(c, rho), g(mu, nu)], 1.0)
        .add(&CanonicalExpr::product([g(a, mu), g(b, nu), g(c, rho)], -1.0))
        .add(&CanonicalExpr::product([g(a, rho), g(b, nu), g(c, mu)], 2.0))
        .add(&CanonicalExpr::product([g(a, b), g(c, mu), g(nu, rho)], -2.0))
}

/// B^{(pq0|μνk)} g_μν,k summed over μ, ν and spatial k, as a symbolic
/// expression.
pub fn cross_term_expr(d: usize, p: usize, q: usize) -> CanonicalExpr {
    let mut out = CanonicalExpr::zero();
    for mu in 0..d {
        for nu in 0..d {
            for k in 1..d {
                let sym = b_expr([p, q, 0, mu, nu, k]).add(&b_expr([mu, nu, k, p, q, 0])).scale(0.5);
                out = out.add(&sym.mul(&CanonicalExpr::symbol(Symbol::derivative(mu, nu, k))));
            }
        }
    }
    out
}

/// {π^mn, g^ab} = +Δ^{mn;ab}.
#[inline]
fn pi_inverse_bracket(p: &FieldPoint, m: usize, n: usize, a: usize, b: usize) -> f64 {
    delta_upper_component(p.metric(), m, n, a, b)
}

/// {π^mn, B^{abcμνρ}} by the product rule over the four triple products.
fn pi_b_bracket(p: &FieldPoint, m: usize, n: usize, i: [usize; 6]) -> f64 {
    let [a, b, c, mu, nu, rho] = i;
    let g = |x: usize, y: usize| p.metric().upper(x, y);
    let br = |x: usize, y: usize| pi_inverse_bracket(p, m, n, x, y);
    let triple = |(x1, y1): (usize, usize), (x2, y2): (usize, usize), (x3, y3): (usize, usize)| {
        br(x1, y1) * g(x2, y2) * g(x3, y3) + g(x1, y1) * br(x2, y2) * g(x3, y3) + g(x1, y1) * g(x2, y2) * br(x3, y3)
    };
    triple((a, b), (c, rho), (mu, nu)) - triple((a, mu), (b, nu), (c, rho)) + 2.0 * triple((a, rho), (b, nu), (c, mu))
        - 2.0 * triple((a, b), (c, mu), (nu, rho))
}

/// {π^mn, B^{(pq0|μνk)} g_μν,k} for all (m, n), by direct expansion:
/// ½{π, B^{pq0μνk}} g_μν,k + ½{π, B^{μνkpq0}} g_μν,k, with the classical
/// convention {π^mn, g_μν,k} = 0.
pub fn bracket_pi_with_bg(point: &FieldPoint, p: usize, q: usize) -> crate::tensor::DenseTensor {
    let d = point.dim();
    crate::tensor::DenseTensor::from_fn(d, &[crate::tensor::Variance::Upper; 2], |mn| {
        let (m, n) = (mn[0], mn[1]);
        let mut acc = 0.0;
        for mu in 0..d {
            for nu in 0..d {
                for k in 1..d {
                    let dg = point.spatial(mu, nu, k);
                    if dg == 0.0 {
                        continue;
                    }
                    acc += 0.5 * (pi_b_bracket(point, m, n, [p, q, 0, mu, nu, k]) + pi_b_bracket(point, m, n, [mu, nu, k, p, q, 0])) * dg;
                }
            }
        }
        acc
    })
}

/// Same quantity through the symbolic engine.
pub fn bracket_pi_with_bg_engine(point: &FieldPoint, p: usize, q: usize) -> Result<crate::tensor::DenseTensor> {
    let d = point.dim();
    let cross = cross_term_expr(d, p, q);
    let mut out = crate::tensor::DenseTensor::zeros(d, &[crate::tensor::Variance::Upper; 2]);
    for m in 0..d {
        for n in m..d {
            let br = poisson_bracket(&CanonicalExpr::symbol(Symbol::momentum(m, n)), &cross)?;
            out.set_sym(m, n, br.eval(point)?);
        }
    }
    Ok(out)
}
