//! Multivariate polynomials with rational coefficients in the edge lengths.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::linalg::Rational;

/// A monomial is the sorted multiset of its variable indices.
pub type Monomial = Vec<usize>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn variable(i: usize) -> Self {
        Polynomial::monomial(vec![i], Rational::one())
    }

    pub fn monomial(mut vars: Monomial, c: Rational) -> Self {
        vars.sort_unstable();
        let mut p = Polynomial::zero();
        p.add_term(vars, c);
        p
    }

    fn add_term(&mut self, vars: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(vars).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut p = Polynomial::zero();
        for (m, v) in &self.terms {
            p.add_term(m.clone(), v * c);
        }
        p
    }

    pub fn eval(&self, values: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().fold(c.clone(), |acc, &i| acc * &values[i]))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Renders terms as `c*x*y + ...` using the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            let vars: Vec<&str> = m.iter().map(|&i| names[i].as_str()).collect();
            if vars.is_empty() {
                let _ = write!(out, "{c}");
            } else if c.is_one() {
                out.push_str(&vars.join("*"));
            } else {
                let _ = write!(out, "{c}*{}", vars.join("*"));
            }
        }
        out
    }

    /// Term map keyed by `x*y` style monomial names.
    pub fn named_terms(&self, names: &[String]) -> BTreeMap<String, Rational> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let key = if m.is_empty() {
                    String::from("1")
                } else {
                    m.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join("*")
                };
                (key, c.clone())
            })
            .collect()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let mut m: Monomial = m1.iter().chain(m2).copied().collect();
                m.sort_unstable();
                p.add_term(m, c1 * c2);
            }
        }
        p
    }
}

/// Determinant of a square polynomial matrix by Laplace expansion along rows,
/// memoised on the set of used columns.
pub fn symbolic_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    assert!(n < 25, "symbolic determinant too large");
    let mut memo: BTreeMap<u32, Polynomial> = BTreeMap::new();
    memo.insert((1u32 << n) - 1, Polynomial::one());
    fn go(m: &[Vec<Polynomial>], used: u32, memo: &mut BTreeMap<u32, Polynomial>) -> Polynomial {
        if let Some(p) = memo.get(&used) {
            return p.clone();
        }
        let row = used.count_ones() as usize;
        let mut acc = Polynomial::zero();
        let mut position = 0;
        for c in 0..m.len() {
            if used & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = go(m, used | (1 << c), memo);
                let term = &m[row][c] * &minor;
                acc = if position % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            position += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
    go(m, 0, &mut memo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det, rat, RatMatrix};

    #[test]
    fn symbolic_det_matches_numeric() {
        let x = Polynomial::variable(0);
        let y = Polynomial::variable(1);
        let two = Polynomial::constant(rat(2, 1));
        let m = vec![vec![&x + &y, &two * &x], vec![&two * &x, &(&Polynomial::constant(rat(4, 1)) * &x) + &y]];
        let d = symbolic_det(&m);
        let vals = [rat(3, 2), rat(5, 7)];
        let numeric = RatMatrix::from_rows(
            m.iter().map(|row| row.iter().map(|p| p.eval(&vals)).collect()).collect(),
            2,
        );
        assert_eq!(d.eval(&vals), det(&numeric).unwrap());
        let names = [String::from("a"), String::from("b")];
        assert_eq!(d.render(&names), "5*a*b + b*b");
    }
}
