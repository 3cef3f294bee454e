use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use super::{Coeff, PolyError, MAX_DEGREE};

/// Exponent tuple, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial in `nvars` indexed variables.
///
/// Terms live in a `BTreeMap` keyed by exponent tuple, so iteration order is
/// lexicographic and the representation is canonical: zero coefficients are
/// never stored, and structural equality is polynomial equality.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Exponents, C>,
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The coordinate polynomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Result<Self, PolyError> {
        check_index(var, nvars)?;
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Ok(Self::monomial_unchecked(exps, C::one()))
    }

    pub fn monomial(exps: Exponents, c: C) -> Result<Self, PolyError> {
        check_degrees(&exps)?;
        Ok(Self::monomial_unchecked(exps, c))
    }

    fn monomial_unchecked(exps: Exponents, c: C) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Build from (exponents, coefficient) pairs; repeated exponents are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Exponents, C)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    found: exps.len(),
                });
            }
            check_degrees(&exps)?;
            p.add_term(exps, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Largest absolute coefficient, as `f64`.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    fn add_term(&mut self, exps: Exponents, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(e, v)| {
                let p = v.clone() * c.clone();
                (!p.is_zero()).then(|| (e.clone(), p))
            })
            .collect();
        Self {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                check_degrees(&exps)?;
                out.add_term(exps, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, PolyError> {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to `var`.
    pub fn diff(&self, var: usize) -> Result<Self, PolyError> {
        check_index(var, self.nvars)?;
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[var] = k - 1;
            out.add_term(exps, c.clone() * C::from_i64(k as i64));
        }
        Ok(out)
    }

    /// Antiderivative in `var` with zero constant of integration.
    pub fn integrate(&self, var: usize) -> Result<Self, PolyError> {
        check_index(var, self.nvars)?;
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut exps = e.clone();
            exps[var] += 1;
            check_degrees(&exps)?;
            let k = exps[var];
            out.add_term(exps, c.clone() / C::from_i64(k as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars)
            .map(|i| self.diff(i).expect("index in range"))
            .collect()
    }

    pub fn eval(&self, point: &[C]) -> Result<C, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Evaluate at an `f64` point regardless of the coefficient backend.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c.to_f64(), |t, (&k, x)| t * x.powi(k as i32))
            })
            .sum())
    }

    /// Substitute polynomial `subs[i]` for variable `i`. All substitutes share
    /// one variable count, which becomes the result's.
    pub fn compose(&self, subs: &[Self]) -> Result<Self, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: subs.len(),
            });
        }
        let target = subs.first().map_or(0, |s| s.nvars);
        if let Some(bad) = subs.iter().find(|s| s.nvars != target) {
            return Err(PolyError::DimensionMismatch {
                expected: target,
                found: bad.nvars,
            });
        }
        // Powers are cached per variable; nested brackets reuse them heavily.
        let mut powers: Vec<Vec<Self>> = subs
            .iter()
            .map(|s| vec![Self::one(target), s.clone()])
            .collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (var, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[var].len() <= k as usize {
                    let next = powers[var].last().expect("seeded").mul(&subs[var])?;
                    powers[var].push(next);
                }
                term = term.mul(&powers[var][k as usize])?;
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }

    /// Like [`compose`](Self::compose), dropping every intermediate term whose
    /// exponent in `var` exceeds `max_degree`. Used for θ-graded truncation.
    pub fn compose_truncated(
        &self,
        subs: &[Self],
        var: usize,
        max_degree: u32,
    ) -> Result<Self, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: subs.len(),
            });
        }
        let target = subs.first().map_or(0, |s| s.nvars);
        check_index(var, target)?;
        let trunc_mul = |a: &Self, b: &Self| -> Result<Self, PolyError> {
            Ok(a.mul(b)?.truncate_degree(var, max_degree))
        };
        let mut powers: Vec<Vec<Self>> = subs
            .iter()
            .map(|s| vec![Self::one(target), s.truncate_degree(var, max_degree)])
            .collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k as usize {
                    let next = trunc_mul(powers[v].last().expect("seeded"), &powers[v][1])?;
                    powers[v].push(next);
                }
                term = trunc_mul(&term, &powers[v][k as usize])?;
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }

    /// Drop every term whose exponent in `var` exceeds `max_degree`.
    pub fn truncate_degree(&self, var: usize, max_degree: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] <= max_degree)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Self {
            nvars: self.nvars,
            terms,
        }
    }

    /// Part of the polynomial that is homogeneous of degree `degree` in `var`.
    pub fn homogeneous_part(&self, var: usize, degree: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] == degree)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Self {
            nvars: self.nvars,
            terms,
        }
    }

    /// Set variable `var` to `value`, keeping the variable count.
    pub fn substitute_value(&self, var: usize, value: &C) -> Result<Self, PolyError> {
        check_index(var, self.nvars)?;
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut exps = e.clone();
            let k = std::mem::replace(&mut exps[var], 0);
            let mut coeff = c.clone();
            for _ in 0..k {
                coeff = coeff * value.clone();
            }
            out.add_term(exps, coeff);
        }
        Ok(out)
    }

    /// Re-embed into `nvars` variables: old variable `i` becomes `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Result<Self, PolyError> {
        if map.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                found: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&m| m >= nvars) {
            return Err(PolyError::IndexOutOfRange { index: bad, nvars });
        }
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut exps = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                exps[map[i]] += k;
            }
            check_degrees(&exps)?;
            out.add_term(exps, c.clone());
        }
        Ok(out)
    }

    /// Embed into `nvars` variables, keeping variables `0..self.nvars` in place.
    pub fn extend(&self, nvars: usize) -> Result<Self, PolyError> {
        let map: Vec<usize> = (0..self.nvars).collect();
        self.embed(nvars, &map)
    }

    /// Remove trailing variables, which must not occur in any term.
    pub fn restrict(&self, nvars: usize) -> Result<Self, PolyError> {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            if e[nvars..].iter().any(|&k| k != 0) {
                return Err(PolyError::VariableInUse { nvars });
            }
            out.add_term(e[..nvars].to_vec(), c.clone());
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::<D>::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

fn check_index(var: usize, nvars: usize) -> Result<(), PolyError> {
    if var >= nvars {
        Err(PolyError::IndexOutOfRange { index: var, nvars })
    } else {
        Ok(())
    }
}

fn check_degrees(exps: &[u32]) -> Result<(), PolyError> {
    match exps.iter().position(|&k| k > MAX_DEGREE) {
        Some(var) => Err(PolyError::DegreeOverflow {
            var,
            degree: exps[var],
        }),
        None => Ok(()),
    }
}

impl<C: Coeff> Add for &Polynomial<C> {
    type Output = Polynomial<C>;

    /// Panics if the variable counts differ; use `checked_add` otherwise.
    fn add(self, rhs: Self) -> Polynomial<C> {
        self.checked_add(rhs)
            .expect("polynomial variable counts differ")
    }
}

impl<C: Coeff> Add for Polynomial<C> {
    type Output = Polynomial<C>;

    fn add(self, rhs: Self) -> Polynomial<C> {
        &self + &rhs
    }
}

impl<C: Coeff> AddAssign<&Polynomial<C>> for Polynomial<C> {
    fn add_assign(&mut self, rhs: &Polynomial<C>) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial variable counts differ");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;

    fn neg(self) -> Polynomial<C> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), -c.clone()))
            .collect();
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }
}

impl<C: Coeff> Neg for Polynomial<C> {
    type Output = Polynomial<C>;

    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

impl<C: Coeff> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;

    fn sub(self, rhs: Self) -> Polynomial<C> {
        self + &(-rhs)
    }
}

impl<C: Coeff> Sub for Polynomial<C> {
    type Output = Polynomial<C>;

    fn sub(self, rhs: Self) -> Polynomial<C> {
        &self - &rhs
    }
}

impl<C: Coeff> SubAssign<&Polynomial<C>> for Polynomial<C> {
    fn sub_assign(&mut self, rhs: &Polynomial<C>) {
        *self += &(-rhs);
    }
}

impl<C: fmt::Display> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl<C: fmt::Debug> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polynomial")
            .field("nvars", &self.nvars)
            .field("terms", &self.terms)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Rational;

    type P = Polynomial<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn xy() -> (P, P) {
        (P::var(2, 0).unwrap(), P::var(2, 1).unwrap())
    }

    #[test]
    fn evaluates_monomials() {
        let (x, y) = xy();
        let p = x.mul(&y).unwrap();
        assert_eq!(p.eval(&[q(2), q(3)]).unwrap(), q(6));
        assert_eq!(P::zero(2).eval(&[q(7), q(-1)]).unwrap(), q(0));
        // B x y / 2 with B = 2 at (1, 5)
        let f = p.scale(&q(1));
        assert_eq!(f.eval(&[q(1), q(5)]).unwrap(), q(5));
        assert!(matches!(
            p.eval(&[q(1)]),
            Err(PolyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn differentiates() {
        let (x, y) = xy();
        let x2y = x.pow(2).unwrap().mul(&y).unwrap();
        assert_eq!(x2y.diff(0).unwrap(), x.mul(&y).unwrap().scale(&q(2)));
        assert!(P::constant(2, q(5)).diff(1).unwrap().is_zero());
        let f = x.mul(&y).unwrap().scale(&Rational::from_ratio(1, 1)); // B = 2: Bxy/2 = xy
        assert_eq!(f.diff(0).unwrap(), y);
        assert!(matches!(x.diff(2), Err(PolyError::IndexOutOfRange { .. })));
    }

    #[test]
    fn canonical_form_drops_cancellations() {
        let (x, y) = xy();
        let p = &(&x + &y) - &y;
        assert_eq!(p, x);
        assert!((&x - &x).is_zero());
        assert_eq!((&x - &x).num_terms(), 0);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let (x, _) = xy();
        let big = x.pow(20).unwrap();
        assert!(matches!(
            big.mul(&big),
            Err(PolyError::DegreeOverflow { var: 0, degree: 40 })
        ));
        assert!(P::monomial(vec![33, 0], q(1)).is_err());
    }

    #[test]
    fn composes_and_truncates() {
        let (x, y) = xy();
        // p(x, y) = x^2 y with x -> x + y, y -> 2
        let p = x.pow(2).unwrap().mul(&y).unwrap();
        let c = p.compose(&[&x + &y, P::constant(2, q(2))]).unwrap();
        let expected = (&x + &y).pow(2).unwrap().scale(&q(2));
        assert_eq!(c, expected);
        let t = c.compose_truncated(&[x.clone(), y.clone()], 1, 1).unwrap();
        assert_eq!(t, c.truncate_degree(1, 1));
        assert_eq!(c.homogeneous_part(1, 2), y.pow(2).unwrap().scale(&q(2)));
    }

    #[test]
    fn embeds_and_restricts() {
        let (x, y) = xy();
        let p = x.mul(&y).unwrap();
        let e = p.embed(4, &[1, 3]).unwrap();
        assert_eq!(e.coeff(&[0, 1, 0, 1]), q(1));
        let ext = p.extend(3).unwrap();
        assert_eq!(ext.restrict(2).unwrap(), p);
        let z = P::var(3, 2).unwrap();
        assert!(z.restrict(2).is_err());
        assert_eq!(
            ext.mul(&z).unwrap().substitute_value(2, &q(3)).unwrap(),
            ext.scale(&q(3))
        );
    }
}
