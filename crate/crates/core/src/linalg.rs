//! Tridiagonal elimination and a rank-one bordered extension.

use crate::error::{invalid, Error, Result};

/// Square tridiagonal matrix stored by diagonals.
///
/// Row `i` reads `lower[i] x_{i-1} + diag[i] x_i + upper[i] x_{i+1}`;
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Thomas algorithm without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 0 || rhs.len() != n || self.lower.len() != n || self.upper.len() != n {
            return invalid("tridiagonal dimensions do not match");
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::Singular { row: 0 });
        }
        c[0] = self.upper[0] / piv;
        d[0] = rhs[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - self.lower[i] * c[i - 1];
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::Singular { row: i });
            }
            c[i] = if i + 1 < n { self.upper[i] / piv } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// Solves the bordered system
///
/// ```text
/// [ T   c ] [x]   [rhs]
/// [ w^T 0 ] [l] = [ m ]
/// ```
///
/// by two tridiagonal solves. Returns `(x, l)`.
pub fn solve_bordered(t: &Tridiagonal, c: &[f64], w: &[f64], rhs: &[f64], m: f64) -> Result<(Vec<f64>, f64)> {
    let y = t.solve(rhs)?;
    let z = t.solve(c)?;
    let wy: f64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
    let wz: f64 = w.iter().zip(&z).map(|(a, b)| a * b).sum();
    if wz == 0.0 || !wz.is_finite() {
        return Err(Error::Singular { row: t.len() });
    }
    let lambda = (wy - m) / wz;
    let x = y.iter().zip(&z).map(|(a, b)| a - lambda * b).collect();
    Ok((x, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_dominant(n: usize, rng: &mut impl Rng) -> Tridiagonal {
        let mut t = Tridiagonal::zeros(n);
        for i in 0..n {
            t.lower[i] = rng.gen_range(-1.0..1.0);
            t.upper[i] = rng.gen_range(-1.0..1.0);
            t.diag[i] = 2.5 + rng.gen_range(0.0..1.0);
        }
        t
    }

    #[test]
    fn thomas_recovers_solution() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in [1, 2, 3, 17, 400] {
            let t = random_dominant(n, &mut rng);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let b = t.apply(&x);
            let got = t.solve(&b).unwrap();
            for (a, e) in got.iter().zip(&x) {
                assert!((a - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let mut t = Tridiagonal::zeros(3);
        t.diag = vec![1.0, 1.0, 1.0];
        t.upper[0] = 1.0;
        t.lower[1] = 1.0;
        assert_eq!(t.solve(&[1.0, 1.0, 1.0]), Err(Error::Singular { row: 1 }));
    }

    #[test]
    fn bordered_against_dense_elimination() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let n = 6;
        let t = random_dominant(n, &mut rng);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda = 0.37;
        let mut rhs = t.apply(&x);
        for i in 0..n {
            rhs[i] += lambda * c[i];
        }
        let m: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        let (got, l) = solve_bordered(&t, &c, &w, &rhs, m).unwrap();
        assert!((l - lambda).abs() < 1e-12);
        for (a, e) in got.iter().zip(&x) {
            assert!((a - e).abs() < 1e-12);
        }
    }
}
