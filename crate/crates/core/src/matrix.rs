//! Small dense integer matrices with exact arithmetic.

use nalgebra::{Complex, DMatrix, Schur};

type Complex64 = Complex<f64>;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix { n, data: rows.concat() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.n + j] = x;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b == 0 {
                        continue;
                    }
                    let p = a.checked_mul(b).ok_or(Error::Overflow("matrix product"))?;
                    let idx = i * n + j;
                    out.data[idx] = out.data[idx].checked_add(p).ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, x: &[i64]) -> Result<Vec<i64>> {
        let mut y = vec![0i64; self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                let p = self.get(i, j).checked_mul(*xj).ok_or(Error::Overflow("matrix action"))?;
                *yi = yi.checked_add(p).ok_or(Error::Overflow("matrix action"))?;
            }
        }
        Ok(y)
    }

    fn big(&self) -> Vec<Vec<BigInt>> {
        (0..self.n).map(|i| (0..self.n).map(|j| BigInt::from(self.get(i, j))).collect()).collect()
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> Result<i64> {
        let n = self.n;
        if n == 0 {
            return Ok(1);
        }
        let mut a = self.big();
        let mut sign = 1i64;
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        (BigInt::from(sign) * &a[n - 1][n - 1]).to_i64().ok_or(Error::Overflow("determinant"))
    }

    /// Coefficients of `det(tI - M)`, highest degree first (leading 1).
    pub fn char_poly(&self) -> Result<Vec<i64>> {
        let n = self.n;
        let a = self.big();
        let mut coeffs = vec![BigInt::from(1)];
        // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k)/k
        let mut m: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
        for k in 1..=n {
            let c_prev = coeffs.last().unwrap().clone();
            let mut next = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = BigInt::zero();
                    for l in 0..n {
                        if !a[i][l].is_zero() && !m[l][j].is_zero() {
                            s += &a[i][l] * &m[l][j];
                        }
                    }
                    if i == j {
                        s += &c_prev;
                    }
                    next[i][j] = s;
                }
            }
            let mut tr = BigInt::zero();
            for i in 0..n {
                for l in 0..n {
                    if !a[i][l].is_zero() && !next[l][i].is_zero() {
                        tr += &a[i][l] * &next[l][i];
                    }
                }
            }
            let c = -tr / BigInt::from(k as i64);
            coeffs.push(c);
            m = next;
        }
        coeffs.into_iter().map(|c| c.to_i64().ok_or(Error::Overflow("characteristic polynomial"))).collect()
    }

    /// Largest modulus of the eigenvalues.
    pub fn spectral_radius(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let m = DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64);
        // the unbounded QR iteration can stall on defective spectra
        match Schur::try_new(m, 1e-12, 20_000) {
            Some(s) => s.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max),
            None => self.char_poly().map(|c| root_radius(&c)).unwrap_or(f64::NAN),
        }
    }

    /// Whether `Mᵀ J M = J`.
    pub fn preserves(&self, form: &IntMatrix) -> Result<bool> {
        Ok(self.transpose().mul(form)?.mul(self)? == *form)
    }
}

/// Largest root modulus of a monic polynomial (highest degree first) by
/// simultaneous Durand-Kerner iteration.
fn root_radius(coeffs: &[i64]) -> f64 {
    let n = coeffs.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
    let eval = |z: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..5_000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
