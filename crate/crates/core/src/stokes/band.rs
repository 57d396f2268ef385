//! Banded LU with partial pivoting over complex scalars.

use num_complex::Complex;

use crate::scalar::Real;

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Storage has
/// room for the `kl` extra super-diagonals created by row interchanges.
#[derive(Clone, Debug)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![Complex::new(T::zero(), T::zero()); n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku + self.kl {
            None
        } else {
            Some(i * self.width + j + self.kl - i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.slot(i, j).map_or(Complex::new(T::zero(), T::zero()), |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: Complex<T>) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside band");
        let s = i * self.width + j + self.kl - i;
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + self.kl + 1).min(self.n);
                (lo..hi).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    /// Factorizes in place. On a zero pivot returns its column and magnitude.
    pub fn factor(mut self) -> Result<BandLu<T>, (usize, T)> {
        let (n, kl) = (self.n, self.kl);
        let reach = self.ku + self.kl;
        let mut piv = vec![0usize; n];
        let mut lower = vec![Complex::new(T::zero(), T::zero()); n * kl.max(1)];
        for c in 0..n {
            let last = (c + kl).min(n - 1);
            let mut p = c;
            let mut best = self.get(c, c).norm();
            for r in c + 1..=last {
                let m = self.get(r, c).norm();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            if best == T::zero() || !best.is_finite() {
                return Err((c, best));
            }
            piv[c] = p;
            let hi = (c + reach + 1).min(n);
            if p != c {
                for j in c..hi {
                    let (a, b) = (self.slot(c, j).unwrap(), self.slot(p, j).unwrap());
                    self.data.swap(a, b);
                }
            }
            let d = self.data[self.slot(c, c).unwrap()];
            for r in c + 1..=last {
                let sr = self.slot(r, c).unwrap();
                let m = self.data[sr] / d;
                self.data[sr] = Complex::new(T::zero(), T::zero());
                lower[c * kl.max(1) + (r - c - 1)] = m;
                if m.norm() == T::zero() {
                    continue;
                }
                for j in c + 1..hi {
                    let u = self.data[self.slot(c, j).unwrap()];
                    let s = self.slot(r, j).unwrap();
                    self.data[s] -= m * u;
                }
            }
        }
        Ok(BandLu { u: self, lower, piv })
    }
}

/// Factors `P A = L U` of a [`BandMatrix`].
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    u: BandMatrix<T>,
    lower: Vec<Complex<T>>,
    piv: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    pub fn n(&self) -> usize {
        self.u.n
    }

    pub fn solve_in_place(&self, b: &mut [Complex<T>]) {
        let (n, kl) = (self.u.n, self.u.kl);
        let reach = self.u.ku + kl;
        for c in 0..n {
            let p = self.piv[c];
            if p != c {
                b.swap(c, p);
            }
            let bc = b[c];
            for r in c + 1..=(c + kl).min(n - 1) {
                b[r] -= self.lower[c * kl.max(1) + (r - c - 1)] * bc;
            }
        }
        for c in (0..n).rev() {
            let mut s = b[c];
            for j in c + 1..(c + reach + 1).min(n) {
                s -= self.u.get(c, j) * b[j];
            }
            b[c] = s / self.u.get(c, c);
        }
    }
}
