//! Polynomial NARX regressors and the candidate model set.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::narx::mask::StructureMask;
use crate::scalar::Scalar;

/// One monomial regressor: a product of lagged outputs and lagged inputs.
///
/// Lags are stored sorted ascending; an empty term is the constant `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(rename = "y")]
    output_lags: Vec<usize>,
    #[serde(rename = "u")]
    input_lags: Vec<usize>,
}

impl TermSpec {
    pub fn new(mut output_lags: Vec<usize>, mut input_lags: Vec<usize>) -> Self {
        output_lags.sort_unstable();
        input_lags.sort_unstable();
        Self { output_lags, input_lags }
    }

    pub fn constant() -> Self {
        Self { output_lags: Vec::new(), input_lags: Vec::new() }
    }

    pub fn output_lags(&self) -> &[usize] {
        &self.output_lags
    }

    pub fn input_lags(&self) -> &[usize] {
        &self.input_lags
    }

    pub fn degree(&self) -> usize {
        self.output_lags.len() + self.input_lags.len()
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn has_output_feedback(&self) -> bool {
        !self.output_lags.is_empty()
    }

    /// Largest lag referenced by the term, 0 for the constant.
    pub fn max_lag(&self) -> usize {
        self.output_lags.iter().chain(&self.input_lags).copied().max().unwrap_or(0)
    }

    /// Canonical sort key: every y(k-i) factor codes as `i`, every u(k-j) as `n_y + j`.
    fn factor_codes(&self, n_y: usize) -> Vec<usize> {
        self.output_lags.iter().copied().chain(self.input_lags.iter().map(|j| n_y + j)).collect()
    }

    fn canonical_cmp(&self, other: &Self, n_y: usize) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.factor_codes(n_y).cmp(&other.factor_codes(n_y)))
    }

    /// Value of the regressor at sample `k` (0-based) of the given records.
    pub fn evaluate<T: Scalar>(&self, u: &[T], y: &[T], k: usize) -> Result<T> {
        let lag = self.max_lag();
        if k < lag || k - lag >= y.len().max(u.len()) {
            return Err(Error::IndexOutOfRange { index: k, lag });
        }
        let mut v = T::one();
        for &l in &self.output_lags {
            v = v * *y.get(k - l).ok_or(Error::IndexOutOfRange { index: k, lag: l })?;
        }
        for &l in &self.input_lags {
            v = v * *u.get(k - l).ok_or(Error::IndexOutOfRange { index: k, lag: l })?;
        }
        Ok(v)
    }

    /// Unchecked evaluation for hot loops where the caller guarantees `k >= max_lag`.
    #[inline]
    pub(crate) fn evaluate_unchecked<T: Scalar>(&self, u: &[T], y: &[T], k: usize) -> T {
        let mut v = T::one();
        for &l in &self.output_lags {
            v = v * y[k - l];
        }
        for &l in &self.input_lags {
            v = v * u[k - l];
        }
        v
    }
}

fn write_factors(f: &mut fmt::Formatter<'_>, name: char, lags: &[usize], first: &mut bool) -> fmt::Result {
    for (lag, group) in &lags.iter().chunk_by(|&&l| l) {
        if !*first {
            f.write_str("*")?;
        }
        *first = false;
        let power = group.count();
        write!(f, "{name}(k-{lag})")?;
        if power > 1 {
            write!(f, "^{power}")?;
        }
    }
    Ok(())
}

impl fmt::Display for TermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return f.write_str("1");
        }
        let mut first = true;
        write_factors(f, 'y', &self.output_lags, &mut first)?;
        write_factors(f, 'u', &self.input_lags, &mut first)
    }
}

/// Number of candidate monomials of degree `0..=n_l` over `n_y + n_u` lagged variables.
pub fn count_terms(n_u: usize, n_y: usize, n_l: usize) -> usize {
    let mut n_i = 1usize;
    let mut total = 1usize;
    for i in 1..=n_l {
        n_i = n_i * (n_y + n_u + i - 1) / i;
        total += n_i;
    }
    total
}

/// The ordered list of every candidate term for given lags and degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSet {
    n_u: usize,
    n_y: usize,
    n_l: usize,
    terms: Vec<TermSpec>,
}

impl ModelSet {
    /// Enumerates all terms in canonical order: degree ascending, then by factor
    /// codes (output lags before input lags). `terms[0]` is the constant.
    pub fn generate(n_u: usize, n_y: usize, n_l: usize) -> Self {
        let variables = n_y + n_u;
        let mut terms = Vec::with_capacity(count_terms(n_u, n_y, n_l));
        for degree in 0..=n_l {
            for combo in (0..variables).combinations_with_replacement(degree) {
                let (ys, us): (Vec<usize>, Vec<usize>) = combo.into_iter().partition(|&c| c < n_y);
                terms.push(TermSpec::new(
                    ys.into_iter().map(|c| c + 1).collect(),
                    us.into_iter().map(|c| c - n_y + 1).collect(),
                ));
            }
        }
        Self { n_u, n_y, n_l, terms }
    }

    /// Builds a model set from an explicit term list, sorting it canonically.
    pub fn from_terms(n_u: usize, n_y: usize, n_l: usize, mut terms: Vec<TermSpec>) -> Result<Self> {
        for t in &terms {
            if t.degree() > n_l
                || t.output_lags.iter().any(|&l| l == 0 || l > n_y)
                || t.input_lags.iter().any(|&l| l == 0 || l > n_u)
            {
                return Err(Error::InvalidConfig(format!("term {t} outside ({n_u}, {n_y}, {n_l})")));
            }
        }
        terms.sort_by(|a, b| a.canonical_cmp(b, n_y));
        terms.dedup();
        Ok(Self { n_u, n_y, n_l, terms })
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn n_l(&self) -> usize {
        self.n_l
    }

    pub fn terms(&self) -> &[TermSpec] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest lag any term may reference.
    pub fn max_lag(&self) -> usize {
        self.n_u.max(self.n_y)
    }

    pub fn index_of(&self, term: &TermSpec) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    /// Mask with exactly the listed terms set.
    pub fn mask_of(&self, terms: &[TermSpec]) -> Result<StructureMask> {
        let mut mask = StructureMask::zeros(self.len());
        for t in terms {
            let i = self
                .index_of(t)
                .ok_or_else(|| Error::InvalidConfig(format!("term {t} not in model set")))?;
            mask.set(i, true);
        }
        Ok(mask)
    }

    /// Terms whose bit is set, in model-set order.
    pub fn select(&self, mask: &StructureMask) -> Result<Vec<TermSpec>> {
        if mask.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: mask.len() });
        }
        Ok(mask.set_indices().map(|i| self.terms[i].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn y(l: &[usize]) -> TermSpec {
        TermSpec::new(l.to_vec(), vec![])
    }

    #[test]
    fn counts_reported_model_sets() {
        assert_eq!(count_terms(4, 4, 3), 165);
        assert_eq!(count_terms(5, 5, 3), 286);
        assert_eq!(count_terms(7, 7, 3), 680);
        assert_eq!(count_terms(1, 1, 1), 3);
    }

    #[test]
    fn smallest_model_set_order() {
        let set = ModelSet::generate(1, 1, 1);
        assert_eq!(set.terms(), &[TermSpec::constant(), y(&[1]), TermSpec::new(vec![], vec![1])]);
    }

    // Independent enumerator: recursively build all lag multisets per degree.
    fn brute_force(n_u: usize, n_y: usize, n_l: usize) -> HashSet<(Vec<usize>, Vec<usize>)> {
        let mut out = HashSet::new();
        fn rec(
            deg: usize,
            ys: Vec<usize>,
            us: Vec<usize>,
            n_u: usize,
            n_y: usize,
            out: &mut HashSet<(Vec<usize>, Vec<usize>)>,
        ) {
            let mut a = ys.clone();
            let mut b = us.clone();
            a.sort();
            b.sort();
            out.insert((a, b));
            if deg == 0 {
                return;
            }
            for l in 1..=n_y {
                let mut v = ys.clone();
                v.push(l);
                rec(deg - 1, v, us.clone(), n_u, n_y, out);
            }
            for l in 1..=n_u {
                let mut v = us.clone();
                v.push(l);
                rec(deg - 1, ys.clone(), v, n_u, n_y, out);
            }
        }
        rec(n_l, vec![], vec![], n_u, n_y, &mut out);
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let set = ModelSet::generate(2, 3, 3);
        let got: HashSet<_> =
            set.terms().iter().map(|t| (t.output_lags().to_vec(), t.input_lags().to_vec())).collect();
        assert_eq!(got.len(), set.len());
        assert_eq!(got, brute_force(2, 3, 3));
        assert_eq!(set.len(), count_terms(2, 3, 3));
    }

    #[test]
    fn count_grid_matches_generation_and_brute_force() {
        for n_u in 1..=5 {
            for n_y in 1..=5 {
                for n_l in 1..=4 {
                    let n = count_terms(n_u, n_y, n_l);
                    assert_eq!(ModelSet::generate(n_u, n_y, n_l).len(), n, "({n_u},{n_y},{n_l})");
                    assert_eq!(brute_force(n_u, n_y, n_l).len(), n, "({n_u},{n_y},{n_l})");
                }
            }
        }
    }

    #[test]
    fn order_is_degree_then_lexicographic() {
        let set = ModelSet::generate(4, 4, 3);
        assert!(set.terms()[0].is_constant());
        for w in set.terms().windows(2) {
            assert_eq!(w[0].canonical_cmp(&w[1], 4), Ordering::Less, "{} !< {}", w[0], w[1]);
        }
        let shuffled: Vec<_> = set.terms().iter().rev().cloned().collect();
        assert_eq!(ModelSet::from_terms(4, 4, 3, shuffled).unwrap(), set);
    }

    #[test]
    fn contains_s4_cross_term_once() {
        let set = ModelSet::generate(4, 4, 3);
        let t = TermSpec::new(vec![2], vec![1, 1]);
        assert_eq!(set.terms().iter().filter(|x| **x == t).count(), 1);
    }

    #[test]
    fn evaluate_products() {
        let u = [4.0, 5.0, 6.0];
        let yv = [1.0, 2.0, 3.0];
        assert_eq!(TermSpec::constant().evaluate(&u, &yv, 0).unwrap(), 1.0);
        assert_eq!(y(&[1]).evaluate(&[0.0, 0.0], &[2.0, 5.0], 1).unwrap(), 2.0);
        let t = TermSpec::new(vec![2], vec![1, 1]);
        assert_eq!(t.evaluate(&u, &yv, 2).unwrap(), 25.0);
        assert!(matches!(t.evaluate(&u, &yv, 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn display_and_json() {
        let t = TermSpec::new(vec![2], vec![1, 1]);
        assert_eq!(t.to_string(), "y(k-2)*u(k-1)^2");
        assert_eq!(TermSpec::constant().to_string(), "1");
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"y":[2],"u":[1,1]}"#);
    }
}
