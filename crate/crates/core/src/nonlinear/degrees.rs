//! Degree bookkeeping for the three parts of the potential tensor S^pqmn in
//! H̃^pqmn = π^pq π^mn + S^pqmn:
//!
//! 1. iħ √−g B^{(pq0|μνk)} g_μν,k ∂/∂g_mn
//! 2. −(g/4) [B^{(pq0|αβl)} B^{((mn)0|μνk)} − g^00 E^pqmn B^{μνkαβl}] g_μν,k g_αβ,l
//! 3. −√−g {π^mn, B^{(pq0|μνk)} g_μν,k}
//!
//! Degrees count lower and inverse metric entries alike, one each.

use num_rational::Rational64;
use serde::Serialize;

use super::poly::{bd_poly, bs_poly, contracted_with_derivatives, g00_big_e_poly, poly_det, potential_poly, MetricPolynomial, NonPoly};
use crate::error::{GravError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermReport {
    pub term: usize,
    pub description: String,
    /// Highest metric degree of the polynomial part (after the g^00
    /// denominator is taken off).
    pub metric_degree: i64,
    /// Contribution of det g to `metric_degree`.
    pub determinant_degree: usize,
    /// Inverse-metric entries per factor, e.g. [3, 3] for two B factors.
    pub inverse_metric_factors: Vec<usize>,
    pub derivative_degree: usize,
    /// Non-polynomial markers (`sqrt_neg_det`, `inverse_metric`, `inverse_g00`).
    pub flags: Vec<String>,
}

impl TermReport {
    pub fn has_flag(&self, flag: NonPoly) -> bool {
        self.flags.iter().any(|f| f == flag.name())
    }

    /// A genuine polynomial of degree ≤ 2 in the metric.
    pub fn is_quadratic(&self) -> bool {
        self.metric_degree <= 2 && !self.has_flag(NonPoly::SqrtNegDet)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    pub d: usize,
    pub determinant_degree: usize,
    pub b_factor_degree: usize,
    pub terms: Vec<TermReport>,
    /// "10 = 4 + 3 + 3" at d = 4.
    pub degree_line: String,
    pub all_quadratic: bool,
    pub conclusion: String,
}

impl DegreeReport {
    pub fn term(&self, k: usize) -> &TermReport {
        &self.terms[k - 1]
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("potential tensor S^pqmn at d = {}\n", self.d);
        s += &format!("det g: degree {}; each B factor: degree {}\n", self.determinant_degree, self.b_factor_degree);
        for t in &self.terms {
            let factors: Vec<String> = t.inverse_metric_factors.iter().map(|x| x.to_string()).collect();
            s += &format!(
                "term {}: {}\n  metric degree {} (det {}, inverse-metric factors [{}]), derivative degree {}, flags [{}]\n",
                t.term,
                t.description,
                t.metric_degree,
                t.determinant_degree,
                factors.join(", "),
                t.derivative_degree,
                t.flags.join(", ")
            );
        }
        s += &format!("term 2 degree: {}\n", self.degree_line);
        s += &format!("conclusion: {}\n", self.conclusion);
        s
    }
}

fn max_over_spatial(d: usize, f: impl Fn(usize, usize) -> MetricPolynomial) -> MetricPolynomial {
    let mut best: Option<MetricPolynomial> = None;
    for p in 1..d {
        for q in p..d {
            let x = f(p, q);
            if best.as_ref().map_or(true, |b| x.metric_degree() > b.metric_degree()) {
                best = Some(x);
            }
        }
    }
    best.expect("d ≥ 2")
}

/// −(g/4) B^{(pq0|αβl)} g_αβ,l B^{((mn)0|μνk)} g_μν,k, fully expanded.
/// Grows quickly with d; meant for d = 3 and spot checks.
pub fn term_two_product(d: usize, pq: (usize, usize), mn: (usize, usize)) -> MetricPolynomial {
    let x = contracted_with_derivatives(d, pq.0, pq.1, bs_poly);
    let y = contracted_with_derivatives(d, mn.0, mn.1, bd_poly);
    poly_det(d).mul(&x).mul(&y).scale(Rational64::new(-1, 4))
}

/// (g/4) g^00 E^pqmn B^{μνkαβl} g_μν,k g_αβ,l, fully expanded.
pub fn term_two_potential(d: usize, pq: (usize, usize), mn: (usize, usize)) -> MetricPolynomial {
    poly_det(d).mul(&g00_big_e_poly(pq.0, pq.1, mn.0, mn.1)).mul(&potential_poly(d)).scale(Rational64::new(1, 4))
}

/// Degree report for the three parts of S^pqmn.
///
/// Term 2 is a product of det g and two factors each of degree 3. Since the
/// symbols generate a polynomial ring (an integral domain), the degree of a
/// product is the sum of the factor degrees, so the factors are expanded
/// separately and the product is not materialized.
#[allow(non_snake_case)]
pub fn classify_S_terms(d: usize) -> Result<DegreeReport> {
    if d < 3 {
        return Err(GravError::DimensionTooSmall { d, min: 3 });
    }
    let det = poly_det(d);
    let det_deg = det.metric_degree();
    let x_bs = max_over_spatial(d, |p, q| contracted_with_derivatives(d, p, q, bs_poly));
    let x_bd = max_over_spatial(d, |m, n| contracted_with_derivatives(d, m, n, bd_poly));
    let b_deg = x_bs.metric_degree();

    let flags_of = |p: &MetricPolynomial, extra: &[NonPoly]| {
        let mut f: Vec<NonPoly> = p.flags().iter().copied().chain(extra.iter().copied()).collect();
        f.sort();
        f.dedup();
        f.iter().map(|x| x.name().to_string()).collect::<Vec<_>>()
    };

    let term1 = TermReport {
        term: 1,
        description: "iħ √−g B^(pq0|μνk) g_μν,k ∂/∂g_mn".into(),
        metric_degree: x_bs.net_metric_degree(),
        determinant_degree: 0,
        inverse_metric_factors: vec![x_bs.inverse_degree()],
        derivative_degree: x_bs.derivative_degree(),
        flags: flags_of(&x_bs, &[NonPoly::SqrtNegDet]),
    };

    let e_part = max_over_spatial(d, |p, q| g00_big_e_poly(p, q, p, q));
    let u = potential_poly(d);
    let product_deg = det_deg as i64 + x_bs.net_metric_degree() + x_bd.net_metric_degree();
    let potential_deg = det_deg as i64 + e_part.net_metric_degree() + u.net_metric_degree();
    let (factors, total) = if product_deg >= potential_deg {
        (vec![x_bs.inverse_degree(), x_bd.inverse_degree()], product_deg)
    } else {
        (vec![e_part.net_metric_degree() as usize, u.inverse_degree()], potential_deg)
    };
    let mut flags2: Vec<String> = [&x_bs, &x_bd, &e_part, &u].iter().flat_map(|p| p.flag_names()).collect();
    flags2.sort();
    flags2.dedup();
    let term2 = TermReport {
        term: 2,
        description: "−(g/4)[B^(pq0|αβl) B^((mn)0|μνk) − g^00 E^pqmn B^μνkαβl] g_μν,k g_αβ,l".into(),
        metric_degree: total,
        determinant_degree: det_deg,
        inverse_metric_factors: factors.clone(),
        derivative_degree: x_bs.derivative_degree() + x_bd.derivative_degree(),
        flags: flags2,
    };

    let bracket = max_over_spatial(d, |p, q| contracted_with_derivatives(d, p, q, bs_poly).bracket_pi(p, q));
    let term3 = TermReport {
        term: 3,
        description: "−√−g {π^mn, B^(pq0|μνk) g_μν,k}".into(),
        metric_degree: bracket.net_metric_degree(),
        determinant_degree: 0,
        inverse_metric_factors: vec![bracket.inverse_degree()],
        derivative_degree: bracket.derivative_degree(),
        flags: flags_of(&bracket, &[NonPoly::SqrtNegDet]),
    };

    let terms = vec![term1, term2, term3];
    let degree_line = format!(
        "{} = {} + {}",
        total,
        det_deg,
        factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" + ")
    );
    let all_quadratic = terms.iter().all(TermReport::is_quadratic);
    let mut reasons = Vec::new();
    for t in &terms {
        if t.metric_degree > 2 {
            reasons.push(format!("term {} has metric degree {} > 2", t.term, t.metric_degree));
        }
        if t.has_flag(NonPoly::SqrtNegDet) {
            reasons.push(format!("term {} carries sqrt_neg_det (algebraic, not polynomial)", t.term));
        }
    }
    let conclusion = if all_quadratic {
        "all-quadratic".to_string()
    } else {
        format!("not all-quadratic; not reducible to quadratic: {}", reasons.join("; "))
    };
    Ok(DegreeReport { d, determinant_degree: det_deg, b_factor_degree: b_deg, terms, degree_line, all_quadratic, conclusion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::FieldPoint;
    use crate::grav::{tensor_b, tensor_b_dsym, tensor_b_sym, tensor_big_e};
    use crate::sampling::random_field_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn report_at_four_dimensions() {
        let r = classify_S_terms(4).unwrap();
        assert_eq!(r.degree_line, "10 = 4 + 3 + 3");
        assert_eq!(r.term(2).metric_degree, 10);
        assert!(r.term(1).has_flag(NonPoly::SqrtNegDet));
        assert!(r.term(3).has_flag(NonPoly::SqrtNegDet));
        assert!(!r.term(2).has_flag(NonPoly::SqrtNegDet));
        assert_eq!(r.term(2).derivative_degree, 2);
        assert_eq!(r.term(3).inverse_metric_factors, vec![4]);
        assert!(!r.all_quadratic);
        assert!(r.conclusion.contains("not all-quadratic"));
        assert!(r.to_text().contains("10 = 4 + 3 + 3"));
    }

    #[test]
    fn counting_at_other_dimensions() {
        assert_eq!(classify_S_terms(5).unwrap().degree_line, "11 = 5 + 3 + 3");
        assert_eq!(classify_S_terms(3).unwrap().degree_line, "9 = 3 + 3 + 3");
        assert!(matches!(classify_S_terms(2), Err(GravError::DimensionTooSmall { .. })));
    }

    #[test]
    fn materialized_product_has_the_counted_degree() {
        let full = term_two_product(3, (1, 2), (2, 2));
        assert_eq!(full.metric_degree(), 9);
        assert_eq!(full.lower_degree(), 3);
        assert_eq!(full.inverse_degree(), 6);
        assert!(full.is_metric_homogeneous());
    }

    #[test]
    fn expanded_term_two_matches_numeric_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let d = 3;
        let p: FieldPoint = random_field_point(d, &mut rng);
        let m = p.metric();
        let bs = tensor_b_sym(m);
        let bd = tensor_b_dsym(m);
        let b = tensor_b(m);
        let e = tensor_big_e(m).unwrap();
        let contract = |t: &crate::tensor::DenseTensor, a: usize, c: usize| -> f64 {
            let mut acc = 0.0;
            for mu in 0..d {
                for nu in 0..d {
                    for k in 1..d {
                        acc += t.get(&[a, c, 0, mu, nu, k]) * p.spatial(mu, nu, k);
                    }
                }
            }
            acc
        };
        let mut u = 0.0;
        for (mu, nu, k, a, bb, l) in itertools::iproduct!(0..d, 0..d, 1..d, 0..d, 0..d, 1..d) {
            u += b.get(&[mu, nu, k, a, bb, l]) * p.spatial(mu, nu, k) * p.spatial(a, bb, l);
        }
        for (pq, mn) in [((1, 2), (2, 2)), ((1, 1), (1, 2))] {
            let want = -0.25 * m.det() * (contract(&bs, pq.0, pq.1) * contract(&bd, mn.0, mn.1) - m.g00() * e.get(&[pq.0, pq.1, mn.0, mn.1]) * u);
            let got = term_two_product(d, pq, mn).add(&term_two_potential(d, pq, mn)).eval(&p);
            assert!((got - want).abs() < 1e-11 * want.abs().max(1.0), "{got} vs {want}");
        }
    }
}
