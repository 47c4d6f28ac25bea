//! Closed-form moments of the monochromatic edge and triangle counts, the
//! bracketed CLT error terms, and the reference limit laws of the pyramid
//! and bipyramid-chain families.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::census::PyramidCounts;
use crate::error::{Error, Result};
use crate::report::{biguint_string, from_biguint, ratio, to_f64, Exact};

/// Moment summary for one statistic at a fixed number of colors.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub statistic: Statistic,
    pub c: u32,
    pub mean: Exact,
    pub variance: Exact,
    /// `E Z^4 - 3` for the standardized statistic, when computed.
    pub excess4: Option<Exact>,
    pub inputs: MomentInputs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Statistic {
    T2,
    T3,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MomentInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triangles: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_pyramids: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub four_cycles: Option<String>,
}

fn x_pow(c: u32, k: u32) -> BigRational {
    ratio(1, BigInt::from(c).pow(k))
}

/// Mean and variance of the monochromatic triangle count.
pub fn t3_mean_var(pc: &PyramidCounts, c: u32) -> Result<MomentReport> {
    check_colors(c)?;
    if pc.n1.is_zero() {
        return Err(Error::NoTriangles);
    }
    let (mean, variance) = t3_mean_var_exact(pc, c);
    Ok(MomentReport {
        statistic: Statistic::T3,
        c,
        mean: mean.into(),
        variance: variance.into(),
        excess4: None,
        inputs: MomentInputs {
            triangles: Some(pc.n1.to_string()),
            two_pyramids: Some(pc.n2.to_string()),
            ..Default::default()
        },
    })
}

pub(crate) fn t3_mean_var_exact(pc: &PyramidCounts, c: u32) -> (BigRational, BigRational) {
    let n1 = from_biguint(&pc.n1);
    let n2 = from_biguint(&pc.n2);
    let mean = &n1 * x_pow(c, 2);
    let single = x_pow(c, 2) * (BigRational::one() - x_pow(c, 2));
    let shared = (x_pow(c, 3) - x_pow(c, 4)) * BigRational::from_integer(2.into());
    (mean, single * n1 + shared * n2)
}

/// Counts feeding the monochromatic-edge moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T2Counts {
    pub edges: BigUint,
    pub triangles: BigUint,
    pub four_cycles: BigUint,
}

impl T2Counts {
    pub fn of(g: &crate::graph::Graph) -> Self {
        let tc = crate::census::triangle_census(g);
        T2Counts {
            edges: BigUint::from(g.edge_count()),
            triangles: BigUint::from(tc.triangle_count()),
            four_cycles: crate::census::count_c4(g),
        }
    }
}

/// Mean, variance and excess fourth moment of the monochromatic edge count.
pub fn t2_moments(counts: &T2Counts, c: u32) -> Result<MomentReport> {
    check_colors(c)?;
    if counts.edges.is_zero() {
        return Err(Error::NoEdges);
    }
    let e = from_biguint(&counts.edges);
    let one = BigRational::one();
    let x = x_pow(c, 1);
    let mean = &e * &x;
    let variance = &mean * (&one - &x);

    let k = |v: i64| BigRational::from_integer(v.into());
    let g1 = &x * (&one - k(7) * &x + k(12) * x_pow(c, 2) - k(6) * x_pow(c, 3));
    let g2 = k(36) * x_pow(c, 2) * (&one - &x) * (&one - k(2) * &x);
    let g3 = k(24) * x_pow(c, 3) * (&one - &x);
    let numerator =
        g1 * &e + g2 * from_biguint(&counts.triangles) + g3 * from_biguint(&counts.four_cycles);
    let excess4 = numerator / (&variance * &variance);

    Ok(MomentReport {
        statistic: Statistic::T2,
        c,
        mean: mean.into(),
        variance: variance.into(),
        excess4: Some(excess4.into()),
        inputs: MomentInputs {
            edges: Some(counts.edges.to_string()),
            triangles: Some(counts.triangles.to_string()),
            four_cycles: Some(counts.four_cycles.to_string()),
            ..Default::default()
        },
    })
}

fn check_colors(c: u32) -> Result<()> {
    if c < 2 {
        return Err(Error::BadParams(format!("need c >= 2 colors, got {c}")));
    }
    Ok(())
}

/// Bracketed triangle CLT error terms; the absolute constant is not included.
#[derive(Clone, Debug, Serialize)]
pub struct T3BoundReport {
    pub r1: Exact,
    pub r2: Exact,
    /// `R1^(1/4) + R2`
    pub bracket: f64,
    /// `bracket^(1/5)`, the bound up to an absolute constant.
    pub bound: f64,
    #[serde(serialize_with = "biguint_string")]
    pub b: BigUint,
}

pub fn clt_bound_t3(pc: &PyramidCounts, b: &BigUint) -> Result<T3BoundReport> {
    if pc.n1.is_zero() {
        return Err(Error::NoTriangles);
    }
    let base = from_biguint(&(&pc.n1 + &pc.n2));
    let denom = &base * &base;
    let r1 = (BigRational::one() + from_biguint(&pc.n4)) / &denom;
    let r2 = from_biguint(b) / &denom;
    let bracket = to_f64(&r1).powf(0.25) + to_f64(&r2);
    Ok(T3BoundReport {
        bracket,
        bound: bracket.powf(0.2),
        r1: r1.into(),
        r2: r2.into(),
        b: b.clone(),
    })
}

/// Edge CLT bracket `c/|E| + |E|^(-1/2) + N(C4)/(c|E|^2)`. The rational terms
/// are kept exact; the surd is reported by its radicand.
#[derive(Clone, Debug, Serialize)]
pub struct T2BoundReport {
    /// `c/|E| + N(C4)/(c |E|^2)`
    pub rational_part: Exact,
    /// `|E|`, the inner sum carries `1/sqrt(surd_radicand)`.
    #[serde(serialize_with = "biguint_string")]
    pub surd_radicand: BigUint,
    pub inner: f64,
    /// `inner^(1/5)`, the bound up to an absolute constant.
    pub bound: f64,
}

pub fn clt_bound_t2(edges: &BigUint, four_cycles: &BigUint, c: u32) -> Result<T2BoundReport> {
    check_colors(c)?;
    if edges.is_zero() {
        return Err(Error::NoEdges);
    }
    let e = from_biguint(edges);
    let cc = BigRational::from_integer(c.into());
    let rational = &cc / &e + from_biguint(four_cycles) / (&cc * &e * &e);
    let inner = to_f64(&rational) + 1.0 / to_f64(&e).sqrt();
    Ok(T2BoundReport {
        rational_part: rational.into(),
        surd_radicand: edges.clone(),
        inner,
        bound: inner.powf(0.2),
    })
}

/// Families with a known non-Gaussian limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceFamily {
    Pyramid,
    BipyramidChain,
}

impl FromStr for ReferenceFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pyramid" => Ok(ReferenceFamily::Pyramid),
            "bipyramid_chain" => Ok(ReferenceFamily::BipyramidChain),
            other => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Atom {
    pub location: Exact,
    pub mass: Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixtureComponent {
    pub weight: Exact,
    pub variance: Exact,
}

/// Limit law of the suitably centred and scaled triangle count.
///
/// * pyramid: `(T3 - n/c^2) / n` converges to a two-point law;
/// * bipyramid chain: `(T3 - 2n/c^2) / sqrt(n)` converges to a mixture of
///   two centred normals.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitLaw {
    TwoPoint {
        atoms: Vec<Atom>,
    },
    NormalMixture {
        components: Vec<MixtureComponent>,
        total_variance: Exact,
    },
}

impl LimitLaw {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            LimitLaw::TwoPoint { atoms } => atoms
                .iter()
                .filter(|a| a.location.to_f64() <= x)
                .map(|a| a.mass.to_f64())
                .sum(),
            LimitLaw::NormalMixture { components, .. } => components
                .iter()
                .map(|m| {
                    let sd = m.variance.to_f64().sqrt();
                    m.weight.to_f64() * Normal::new(0.0, sd).expect("positive sd").cdf(x)
                })
                .sum(),
        }
    }
}

pub fn limit_law_reference(family: ReferenceFamily, c: u32) -> Result<LimitLaw> {
    check_colors(c)?;
    let one = BigRational::one();
    let x = x_pow(c, 1);
    let x2 = x_pow(c, 2);
    let k = |v: i64| BigRational::from_integer(v.into());
    Ok(match family {
        ReferenceFamily::Pyramid => LimitLaw::TwoPoint {
            atoms: vec![
                Atom {
                    location: (&x * (&one - &x)).into(),
                    mass: x.clone().into(),
                },
                Atom {
                    location: (-x2.clone()).into(),
                    mass: (&one - &x).into(),
                },
            ],
        },
        ReferenceFamily::BipyramidChain => {
            let same = (k(4) * x_pow(c, 3) + k(2) * &x2) * (&one - &x);
            let split = k(2) * &x2 * (&one - k(2) * &x2);
            let total = &x * &same + (&one - &x) * &split;
            LimitLaw::NormalMixture {
                components: vec![
                    MixtureComponent {
                        weight: x.clone().into(),
                        variance: same.into(),
                    },
                    MixtureComponent {
                        weight: (&one - &x).into(),
                        variance: split.into(),
                    },
                ],
                total_variance: total.into(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{b_statistic, pyramid_counts, triangle_census};
    use crate::graph::{generate, FamilySpec};

    fn counts(spec: FamilySpec) -> PyramidCounts {
        pyramid_counts(&triangle_census(&generate(&spec).unwrap()))
    }

    fn t2(spec: FamilySpec) -> T2Counts {
        T2Counts::of(&generate(&spec).unwrap())
    }

    #[test]
    fn t3_examples() {
        let r = t3_mean_var(&counts(FamilySpec::Complete { n: 4 }), 2).unwrap();
        assert_eq!((r.mean.0, r.variance.0), (ratio(1, 1), ratio(3, 2)));
        let r = t3_mean_var(&counts(FamilySpec::Complete { n: 3 }), 2).unwrap();
        assert_eq!((r.mean.0, r.variance.0), (ratio(1, 4), ratio(3, 16)));
        let r = t3_mean_var(&counts(FamilySpec::Pyramid { n: 10 }), 3).unwrap();
        assert_eq!((r.mean.0, r.variance.0), (ratio(10, 9), ratio(260, 81)));
        assert!(matches!(
            t3_mean_var(&counts(FamilySpec::Cycle { n: 5 }), 2),
            Err(Error::NoTriangles)
        ));
    }

    #[test]
    fn t2_examples() {
        let r = t2_moments(&t2(FamilySpec::Path { n: 2 }), 2).unwrap();
        assert_eq!(r.mean.0, ratio(1, 2));
        assert_eq!(r.variance.0, ratio(1, 4));
        assert_eq!(r.excess4.unwrap().0, ratio(-2, 1));
        let r = t2_moments(&t2(FamilySpec::Star { n: 3 }), 2).unwrap();
        assert_eq!(r.mean.0, ratio(3, 2));
        assert_eq!(r.variance.0, ratio(3, 4));
        assert_eq!(r.excess4.unwrap().0, ratio(-2, 3));
        let r = t2_moments(&t2(FamilySpec::Complete { n: 4 }), 2).unwrap();
        assert_eq!(r.mean.0, ratio(3, 1));
        assert_eq!(r.variance.0, ratio(3, 2));
        assert_eq!(r.excess4.unwrap().0, ratio(5, 3));
        assert!(matches!(
            t2_moments(&t2(FamilySpec::Path { n: 1 }), 2),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn t2_variance_identity_in_c() {
        let counts = t2(FamilySpec::Gnp {
            n: 12,
            p: 0.4,
            seed: 3,
        });
        let e = from_biguint(&counts.edges);
        for c in [2u32, 3, 5, 11, 365] {
            let r = t2_moments(&counts, c).unwrap();
            let cc = BigRational::from_integer(c.into());
            assert_eq!(r.variance.0, &e / &cc * (BigRational::one() - cc.recip()));
        }
    }

    #[test]
    fn t3_bounds() {
        let g = generate(&FamilySpec::Pyramid { n: 10 }).unwrap();
        let tc = triangle_census(&g);
        let r = clt_bound_t3(&pyramid_counts(&tc), &b_statistic(&g, &tc)).unwrap();
        assert_eq!(r.r1.0, ratio(211, 3025));
        assert_eq!(r.r2.0, ratio(9, 605));
        let expected = ((211.0f64 / 3025.0).powf(0.25) + 9.0 / 605.0).powf(0.2);
        assert!((r.bound - expected).abs() < 1e-12 * expected);

        let g = generate(&FamilySpec::Complete { n: 4 }).unwrap();
        let tc = triangle_census(&g);
        let r = clt_bound_t3(&pyramid_counts(&tc), &b_statistic(&g, &tc)).unwrap();
        assert_eq!((r.r1.0, r.r2.0), (ratio(1, 100), ratio(12, 25)));

        assert!(matches!(
            clt_bound_t3(&counts(FamilySpec::Cycle { n: 4 }), &BigUint::zero()),
            Err(Error::NoTriangles)
        ));
    }

    #[test]
    fn t2_bounds() {
        let r = clt_bound_t2(&BigUint::from(6u32), &BigUint::from(3u32), 2).unwrap();
        assert_eq!(r.rational_part.0, ratio(1, 3) + ratio(3, 72));
        let inner = 1.0 / 3.0 + 6f64.powf(-0.5) + 3.0 / 72.0;
        assert!((r.inner - inner).abs() < 1e-12);
        assert!((r.bound - 0.9523).abs() < 5e-5);

        let r = clt_bound_t2(&BigUint::from(100u32), &BigUint::zero(), 2).unwrap();
        assert!((r.inner - 0.12).abs() < 1e-12);
        assert!((r.bound - 0.6544).abs() < 5e-5);

        assert!(matches!(
            clt_bound_t2(&BigUint::zero(), &BigUint::zero(), 2),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn pyramid_r1_tends_to_one_sixth() {
        let r = clt_bound_t3(&counts(FamilySpec::Pyramid { n: 200 }), &BigUint::zero()).unwrap();
        assert!((r.r1.to_f64() - 1.0 / 6.0).abs() < 0.01);
    }

    #[test]
    fn bipyramid_r2_tends_to_one_eighth() {
        let g = generate(&FamilySpec::BipyramidChain { n: 200 }).unwrap();
        let tc = triangle_census(&g);
        let b = b_statistic(&g, &tc);
        assert_eq!(b, BigUint::from(200u32 * 199 / 2));
        let r = clt_bound_t3(&pyramid_counts(&tc), &b).unwrap();
        assert!((r.r2.to_f64() - 0.125).abs() < 0.01);
    }

    #[test]
    fn limit_laws() {
        let LimitLaw::TwoPoint { atoms } =
            limit_law_reference(ReferenceFamily::Pyramid, 2).unwrap()
        else {
            panic!("expected atoms")
        };
        assert_eq!(atoms[0].location.0, ratio(1, 4));
        assert_eq!(atoms[0].mass.0, ratio(1, 2));
        assert_eq!(atoms[1].location.0, ratio(-1, 4));
        assert_eq!(atoms[1].mass.0, ratio(1, 2));

        let LimitLaw::NormalMixture {
            components,
            total_variance,
        } = limit_law_reference(ReferenceFamily::BipyramidChain, 2).unwrap()
        else {
            panic!("expected mixture")
        };
        assert_eq!(components[0].variance.0, ratio(1, 2));
        assert_eq!(components[1].variance.0, ratio(1, 4));
        assert_eq!(total_variance.0, ratio(3, 8));

        let LimitLaw::NormalMixture { components, .. } =
            limit_law_reference(ReferenceFamily::BipyramidChain, 3).unwrap()
        else {
            panic!("expected mixture")
        };
        assert_eq!(components[0].weight.0, ratio(1, 3));
        assert_eq!(components[0].variance.0, ratio(20, 81));
        assert_eq!(components[1].variance.0, ratio(14, 81));

        assert!(matches!(
            "star".parse::<ReferenceFamily>(),
            Err(Error::UnsupportedFamily(_))
        ));
    }
}
