//! Path-coupling contraction bounds, the fast-mixing regime gates and the
//! mixing-time rule derived from them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ChainError;
use crate::model::{GibbsModel, ModelFamily};

/// Model parameters the contraction bounds depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundFamily {
    Hardcore { lambda: f64 },
    /// Colorings with `q` colors; the bound does not depend on `beta`.
    Potts { q: f64 },
}

impl BoundFamily {
    /// The pointer model is covered by the coloring bound with `q = 3n`:
    /// only labels naming a neighbor can ever conflict.
    pub fn of(model: &GibbsModel) -> Self {
        match model.family() {
            ModelFamily::Hardcore => BoundFamily::Hardcore {
                lambda: model.fugacity().value(),
            },
            ModelFamily::Potts { q } => BoundFamily::Potts { q: q as f64 },
            ModelFamily::Pointer => BoundFamily::Potts {
                q: 3.0 * model.n() as f64,
            },
        }
    }
}

/// Expected Hamming distance after one coupled step from two states at
/// distance one.
///
/// Hardcore: `1 - p + p(D p l/(1+l)) + D p l/(1+l)`.
/// Potts: `1 - p((q-D)/q)(1 - p + p(q-3)/q)^D + D p/q`.
pub fn contraction_bound(family: BoundFamily, max_degree: usize, p: f64) -> f64 {
    let d = max_degree as f64;
    match family {
        BoundFamily::Hardcore { lambda } => {
            let occ = d * p * lambda / (1.0 + lambda);
            1.0 - p + p * occ + occ
        }
        BoundFamily::Potts { q } => {
            1.0 - p * ((q - d) / q) * (1.0 - p + p * (q - 3.0) / q).powi(max_degree as i32) + d * p / q
        }
    }
}

/// The hardcore bound in exact arithmetic.
pub fn hardcore_bound_exact(max_degree: usize, lambda: &BigRational, p: &BigRational) -> BigRational {
    let one = BigRational::one();
    let d = BigRational::from(BigInt::from(max_degree));
    let occ = &d * p * lambda / (&one + lambda);
    one - p + p * &occ + occ
}

/// The Potts bound in exact arithmetic.
pub fn potts_bound_exact(max_degree: usize, q: u64, p: &BigRational) -> BigRational {
    let one = BigRational::one();
    let d = BigRational::from(BigInt::from(max_degree));
    let q = BigRational::from(BigInt::from(q));
    let three = BigRational::from(BigInt::from(3));
    let base = &one - p + p * (&q - three) / &q;
    let pow = (0..max_degree).fold(BigRational::one(), |acc, _| acc * &base);
    one - p * ((&q - &d) / &q) * pow + d * p / q
}

/// Activation probabilities tried by [`choose_p`]: 0.01, 0.02, ..., 0.50.
pub fn p_grid() -> impl Iterator<Item = f64> {
    (1..=50).map(|i| i as f64 / 100.0)
}

/// The grid point minimizing the contraction bound, with the bound there.
/// Ties go to the smaller `p`.
pub fn choose_p(family: BoundFamily, max_degree: usize) -> (f64, f64) {
    p_grid()
        .map(|p| (p, contraction_bound(family, max_degree, p)))
        .fold((0.01, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// `ceil(ln(n / delta) / ln(1 / rho)) + 1`.
pub fn mixing_time_from_rho(rho: f64, n: usize, delta: f64) -> Result<u64, ChainError> {
    if !(rho < 1.0) || !rho.is_finite() {
        return Err(ChainError::NoContraction { rho });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ChainError::BadDelta(delta));
    }
    if rho <= 0.0 {
        return Ok(1);
    }
    let t = ((n.max(1) as f64 / delta).ln() / (1.0 / rho).ln()).ceil();
    Ok(t.max(0.0) as u64 + 1)
}

/// Transitions needed for TV distance `delta` at activation probability `p`.
pub fn mixing_time(model: &GibbsModel, p: f64, delta: f64) -> Result<u64, ChainError> {
    check_regime(model, &RegimeGate::default())?;
    let rho = contraction_bound(BoundFamily::of(model), model.graph().max_degree(), p);
    mixing_time_from_rho(rho, model.n(), delta)
}

/// Strictness of the fast-mixing gates.
///
/// With `alpha = None` the gates are the strict open conditions: hardcore
/// `lambda (D - 1) < 1`, Potts `q > 2 D`. A given `alpha` turns them into
/// `lambda (D - 1) <= alpha` (needs `alpha < 1`) and `q >= alpha D` (needs
/// `alpha > 2`).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RegimeGate {
    pub alpha: Option<f64>,
}

/// Rejects parameters outside the regimes of the mixing theorems. Decided in
/// exact arithmetic, so the boundary cases are rejected reliably.
pub fn check_regime(model: &GibbsModel, gate: &RegimeGate) -> Result<(), ChainError> {
    let d = model.graph().max_degree();
    let outside = |why: String| Err(ChainError::OutsideRegime(why));
    match model.family() {
        ModelFamily::Hardcore => {
            if d <= 1 {
                return Ok(());
            }
            let lhs = model.fugacity().exact() * BigRational::from(BigInt::from(d - 1));
            let ok = match gate.alpha {
                None => lhs < BigRational::one(),
                Some(a) if (0.0..1.0).contains(&a) => lhs <= BigRational::from_float(a).unwrap_or_else(BigRational::zero),
                Some(a) => return outside(format!("hardcore gate needs alpha < 1, got {a}")),
            };
            if ok {
                Ok(())
            } else {
                outside(format!(
                    "hardcore needs lambda (D - 1) < {} but lambda = {}, D = {d}",
                    gate.alpha.map_or("1".to_string(), |a| a.to_string()),
                    model.fugacity()
                ))
            }
        }
        ModelFamily::Potts { q } => {
            let ok = match gate.alpha {
                None => q as usize > 2 * d,
                Some(a) if a > 2.0 => q as f64 >= a * d as f64,
                Some(a) => return outside(format!("Potts gate needs alpha > 2, got {a}")),
            };
            if ok {
                Ok(())
            } else {
                outside(format!("Potts needs q > 2 D but q = {q}, D = {d}"))
            }
        }
        ModelFamily::Pointer => {
            if 3 * model.n() > 2 * d {
                Ok(())
            } else {
                outside("pointer model outside the coloring regime".to_string())
            }
        }
    }
}

/// Activation probability and contraction factor chosen for `model`.
pub fn default_p(model: &GibbsModel) -> (f64, f64) {
    choose_p(BoundFamily::of(model), model.graph().max_degree())
}

/// `delta = 1 / (8 k)` for a run consuming `k` samples.
pub fn delta_for_samples(k: u64) -> f64 {
    1.0 / (8.0 * k.max(1) as f64)
}

#[cfg(test)]
fn to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::Graph;
    use crate::model::{make_hardcore, make_potts, Fugacity, Temperature};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn hardcore_example_value() {
        assert_eq!(hardcore_bound_exact(2, &r(1, 2), &r(1, 5)), r(24, 25));
        let f = contraction_bound(BoundFamily::Hardcore { lambda: 0.5 }, 2, 0.2);
        assert!((f - 0.96).abs() < 1e-12);
        assert!((to_f64(&hardcore_bound_exact(2, &r(1, 2), &r(1, 5))) - f).abs() < 1e-12);
    }

    #[test]
    fn zero_fugacity_is_one_minus_p() {
        for p in p_grid() {
            let f = contraction_bound(BoundFamily::Hardcore { lambda: 0.0 }, 5, p);
            assert!((f - (1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn potts_three_delta_contracts() {
        let (p, rho) = choose_p(BoundFamily::Potts { q: 9.0 }, 3);
        assert!(rho < 1.0 && p > 0.0);
        assert_eq!(potts_bound_exact(3, 9, &r(1, 10)), {
            let p = r(1, 10);
            let one = BigRational::one();
            let base = &one - &p + &p * r(6, 9);
            one - &p * r(6, 9) * &base * &base * &base + r(3, 1) * &p / r(9, 1)
        });
    }

    #[test]
    fn gates_reject_boundaries() {
        let path = Arc::new(Graph::path(4));
        assert!(check_regime(&make_hardcore(path.clone(), Fugacity::one()), &RegimeGate::default()).is_err());
        assert!(check_regime(&make_hardcore(path.clone(), "0.999".parse().unwrap()), &RegimeGate::default()).is_ok());
        let alpha = RegimeGate { alpha: Some(0.8) };
        assert!(check_regime(&make_hardcore(path.clone(), "0.4".parse().unwrap()), &alpha).is_ok());
        assert!(check_regime(&make_hardcore(path.clone(), "0.9".parse().unwrap()), &alpha).is_err());
        let one = RegimeGate { alpha: Some(1.0) };
        assert!(check_regime(&make_hardcore(path.clone(), "0.1".parse().unwrap()), &one).is_err());

        let k3 = Arc::new(Graph::complete(3));
        assert!(check_regime(&make_potts(k3.clone(), 4, Temperature::Infinite).unwrap(), &RegimeGate::default()).is_err());
        assert!(check_regime(&make_potts(k3.clone(), 5, Temperature::Infinite).unwrap(), &RegimeGate::default()).is_ok());
        let two = RegimeGate { alpha: Some(2.0) };
        assert!(check_regime(&make_potts(k3, 9, Temperature::Infinite).unwrap(), &two).is_err());
        // a single edge is always inside the hardcore regime
        assert!(check_regime(&make_hardcore(Arc::new(Graph::path(2)), Fugacity::one()), &RegimeGate::default()).is_ok());
    }

    #[test]
    fn mixing_time_monotone() {
        let m = |n: usize| make_hardcore(Arc::new(Graph::cycle(n).unwrap()), "0.4".parse().unwrap());
        let (p, _) = default_p(&m(4));
        let t4 = mixing_time(&m(4), p, 1.0 / 80.0).unwrap();
        assert!(t4 > 0);
        assert!(mixing_time(&m(40), p, 1.0 / 80.0).unwrap() >= t4);
        assert!(mixing_time(&m(4), p, 1.0 / 8000.0).unwrap() > t4);
        assert!(matches!(mixing_time_from_rho(1.0, 4, 0.1), Err(ChainError::NoContraction { .. })));
        let k3 = make_potts(Arc::new(Graph::complete(3)), 3, Temperature::Infinite).unwrap();
        assert!(matches!(mixing_time(&k3, 0.1, 0.1), Err(ChainError::OutsideRegime(_))));
    }
}
