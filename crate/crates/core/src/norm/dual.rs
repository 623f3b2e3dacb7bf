use num_traits::{One, Signed, Zero};

use super::{check_ground, is_pairwise_disjoint, sum_over, NormResult};
use crate::error::{Error, Result};
use crate::family::{AtomSet, FinVector, SetFamily};
use crate::rational::{format, sqrt_upper, Rational};

/// `sum_i lambda_i s_i*` with pairwise disjoint members and `sum lambda_i^2 <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualCombination {
    terms: Vec<(Rational, AtomSet)>,
}

impl DualCombination {
    pub fn new(family: &SetFamily, terms: Vec<(Rational, AtomSet)>) -> Result<Self> {
        for (_, s) in &terms {
            family.require_member(s)?;
        }
        if !is_pairwise_disjoint(terms.iter().map(|(_, s)| s)) {
            return Err(Error::InvalidCombo("members are not pairwise disjoint".into()));
        }
        let mass: Rational = terms.iter().map(|(l, _)| l * l).sum();
        if mass > Rational::one() {
            return Err(Error::InvalidCombo(format!("sum of squared coefficients is {}", format(&mass))));
        }
        Ok(DualCombination { terms })
    }

    /// The normalized combination along a norm witness. Coefficients are `s_i*(phi) / u` with `u`
    /// a rational upper bound for the norm, so the result is always valid.
    pub fn from_witness(family: &SetFamily, result: &NormResult, phi: &FinVector, digits: u32) -> Result<Self> {
        if result.norm_sq.is_zero() {
            return Self::new(family, Vec::new());
        }
        let u = sqrt_upper(&result.norm_sq, digits);
        let terms = result
            .witness
            .iter()
            .map(|s| (sum_over(s, phi) / &u, s.clone()))
            .collect();
        Self::new(family, terms)
    }

    pub fn terms(&self) -> &[(Rational, AtomSet)] {
        &self.terms
    }

    pub fn mass(&self) -> Rational {
        self.terms.iter().map(|(l, _)| l * l).sum()
    }
}

/// `sum_i lambda_i s_i*(phi)`.
pub fn dual_eval(family: &SetFamily, combo: &DualCombination, phi: &FinVector) -> Result<Rational> {
    check_ground(family.ground(), phi)?;
    Ok(combo.terms.iter().map(|(l, s)| l * sum_over(s, phi)).sum())
}

/// A finite nonincreasing sequence of nonnegative rationals with `sum lambda_i^2 <= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecreasingL2Seq {
    values: Vec<Rational>,
}

impl DecreasingL2Seq {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(Error::InvalidSequence(format!("negative entry {}", format(v))));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSequence("entries increase".into()));
        }
        let mass: Rational = values.iter().map(|v| v * v).sum();
        if mass > Rational::one() {
            return Err(Error::InvalidSequence(format!("sum of squares is {}", format(&mass))));
        }
        Ok(DecreasingL2Seq { values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{dyadic_tree, tree_segments};
    use crate::norm::{norm_oracle, NormConfig};
    use crate::rational::{int, ratio};

    #[test]
    fn witness_combination_reaches_the_norm() {
        let f = tree_segments(&dyadic_tree(1, 100).unwrap());
        let phi = FinVector::from_indexed(f.ground(), (0..3).map(|i| (i, int(1)))).unwrap();
        let r = norm_oracle(&f, &phi, &NormConfig::default()).unwrap();
        let combo = DualCombination::from_witness(&f, &r, &phi, 30).unwrap();
        assert!(combo.mass() <= int(1));
        let v = dual_eval(&f, &combo, &phi).unwrap();
        assert!(&v * &v <= r.norm_sq);
        assert!(r.norm_sq.clone() - &v * &v < ratio(1, 1_000_000_000));

        // Exact form: with coefficients s_i*(phi) / sqrt(norm_sq), (sum lambda_i s_i*)^2 = norm_sq.
        let raw: Rational = r.witness.iter().map(|s| sum_over(s, &phi) * sum_over(s, &phi)).sum();
        assert_eq!(raw.clone() * raw / &r.norm_sq, r.norm_sq);
    }

    #[test]
    fn single_and_zero_terms() {
        let f = tree_segments(&dyadic_tree(1, 100).unwrap());
        let phi = FinVector::from_indexed(f.ground(), [(0, int(2)), (1, int(5))]).unwrap();
        let s = f.member_of(&["0:0", "1:0"]).unwrap();
        let one = DualCombination::new(&f, vec![(int(1), s.clone())]).unwrap();
        assert_eq!(dual_eval(&f, &one, &phi).unwrap(), int(7));
        let zero = DualCombination::new(&f, vec![(int(0), s)]).unwrap();
        assert_eq!(dual_eval(&f, &zero, &phi).unwrap(), int(0));
    }

    #[test]
    fn invalid_combinations() {
        let f = tree_segments(&dyadic_tree(1, 100).unwrap());
        let a = f.member_of(&["0:0", "1:0"]).unwrap();
        let b = f.member_of(&["0:0"]).unwrap();
        let c = f.member_of(&["1:1"]).unwrap();
        assert!(DualCombination::new(&f, vec![(ratio(1, 2), a.clone()), (ratio(1, 2), b)]).is_err());
        assert!(DualCombination::new(&f, vec![(int(1), a.clone()), (ratio(1, 10), c.clone())]).is_err());
        assert!(DualCombination::new(&f, vec![(ratio(3, 5), a), (ratio(-4, 5), c)]).is_ok());
    }

    #[test]
    fn decreasing_sequences() {
        assert!(DecreasingL2Seq::new(vec![ratio(3, 5), ratio(4, 5)]).is_err());
        assert!(DecreasingL2Seq::new(vec![ratio(4, 5), ratio(3, 5)]).is_ok());
        assert!(DecreasingL2Seq::new(vec![int(1), ratio(1, 10)]).is_err());
        assert!(DecreasingL2Seq::new(vec![ratio(-1, 2)]).is_err());
        assert!(DecreasingL2Seq::new(vec![]).is_ok());
    }
}
