//! Fixed-size complex matrices for two- and three-level propagators.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Dense `N x N` complex matrix, row-major, zero-based indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<T, const N: usize> {
    pub entries: [[Complex<T>; N]; N],
}

impl<T: Real, const N: usize> CMat<T, N> {
    pub fn zeros() -> Self {
        Self {
            entries: [[Complex::zero(); N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.entries[i][i] = Complex::one();
        }
        m
    }

    pub fn from_rows(entries: [[Complex<T>; N]; N]) -> Self {
        Self { entries }
    }

    /// Diagonal matrix.
    pub fn diagonal(diag: [Complex<T>; N]) -> Self {
        let mut m = Self::zeros();
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i][i] = d;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = self.entries[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = self.entries[j][i];
            }
        }
        m
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut m = *self;
        for row in m.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * s;
            }
        }
        m
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        self.entries
            .iter()
            .map(|row| row.iter().fold(T::zero(), |acc, z| acc + z.norm()))
            .fold(T::zero(), T::max)
    }

    /// `max |(U^dagger U - I)_ij|`.
    pub fn unitarity_defect(&self) -> T {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// `max |(H - H^dagger)_ij|`.
    pub fn hermiticity_defect(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..N).fold(Complex::zero(), |acc, i| acc + self.entries[i][i])
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Determinant, closed form for `N <= 3` and Laplace expansion above.
    pub fn det(&self) -> Complex<T> {
        det_rows(&self.entries.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// `|self[0][0]|^2`, the population left in the first level when the
    /// system starts there.
    pub fn return_population(&self) -> T {
        self.entries[0][0].norm_sqr()
    }

    /// Populations of every level after evolving from level `from`.
    pub fn column_populations(&self, from: usize) -> [T; N] {
        let mut out = [T::zero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.entries[i][from].norm_sqr();
        }
        out
    }

    /// `exp(-i K)` for a Hermitian `K`.
    ///
    /// Closed form through the Pauli decomposition for `N = 2`; scaled and
    /// squared Taylor series otherwise.
    pub fn exp_neg_i_hermitian(&self) -> Self {
        if N == 2 {
            return self.exp_neg_i_pauli();
        }
        let minus_i = Complex::new(T::zero(), -T::one());
        self.scale(minus_i).expm_taylor()
    }

    fn exp_neg_i_pauli(&self) -> Self {
        let e = &self.entries;
        let half = T::lit(0.5);
        let k0 = (e[0][0].re + e[1][1].re) * half;
        let kz = (e[0][0].re - e[1][1].re) * half;
        let kx = (e[1][0].re + e[0][1].re) * half;
        let ky = (e[1][0].im - e[0][1].im) * half;
        let theta = (kx * kx + ky * ky + kz * kz).sqrt();
        let (s, c) = theta.sin_cos();
        // sin(theta)/theta without the removable singularity
        let sinc = if theta > T::lit(1e-4) {
            s / theta
        } else {
            let t2 = theta * theta;
            T::one() - t2 / T::lit(6.0) + t2 * t2 / T::lit(120.0)
        };
        let phase = Complex::from_polar(T::one(), -k0);
        let i = Complex::new(T::zero(), T::one());
        // c I - i sinc (k . sigma)
        let m00 = Complex::new(c, T::zero()) - i * Complex::new(sinc * kz, T::zero());
        let m11 = Complex::new(c, T::zero()) + i * Complex::new(sinc * kz, T::zero());
        let m01 = -i * Complex::new(sinc * kx, -sinc * ky);
        let m10 = -i * Complex::new(sinc * kx, sinc * ky);
        let mut out = Self::zeros();
        out.entries[0][0] = phase * m00;
        out.entries[0][1] = phase * m01;
        out.entries[1][0] = phase * m10;
        out.entries[1][1] = phase * m11;
        out
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm_taylor(&self) -> Self {
        let half = T::lit(0.5);
        let mut squarings = 0u32;
        let mut theta = self.norm_inf();
        while theta > half {
            theta = theta * half;
            squarings += 1;
        }
        // smallest degree whose last series term is below eps / 10
        let cutoff = T::epsilon() * T::lit(0.1);
        let mut degree = 1usize;
        let mut term = theta;
        while degree < 30 && term > cutoff {
            degree += 1;
            term = term * theta / T::from_usize(degree).unwrap();
        }
        let a = self.scale_real(half.powi(squarings as i32));
        // Horner: I + A (I + A/2 (I + ... (I + A/degree)))
        let mut result = Self::identity();
        for k in (1..=degree).rev() {
            result = (a * result).scale_real(T::one() / T::from_usize(k).unwrap()) + Self::identity();
        }
        for _ in 0..squarings {
            result = result * result;
        }
        result
    }
}

fn det_rows<T: Real>(rows: &[Vec<Complex<T>>]) -> Complex<T> {
    match rows.len() {
        0 => Complex::one(),
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        n => {
            let mut acc = Complex::zero();
            for j in 0..n {
                let minor: Vec<Vec<Complex<T>>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, z)| *z)
                            .collect()
                    })
                    .collect();
                let term = rows[0][j] * det_rows(&minor);
                if j % 2 == 0 {
                    acc = acc + term;
                } else {
                    acc = acc - term;
                }
            }
            acc
        }
    }
}

impl<T: Real, const N: usize> Mul for CMat<T, N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    m.entries[i][j] = m.entries[i][j] + a * rhs.entries[k][j];
                }
            }
        }
        m
    }
}

impl<T: Real, const N: usize> Add for CMat<T, N> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = m.entries[i][j] + rhs.entries[i][j];
            }
        }
        m
    }
}

impl<T: Real, const N: usize> Sub for CMat<T, N> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = m.entries[i][j] - rhs.entries[i][j];
            }
        }
        m
    }
}

impl<T, const N: usize> Index<(usize, usize)> for CMat<T, N> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.entries[i][j]
    }
}

impl<T, const N: usize> IndexMut<(usize, usize)> for CMat<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.entries[i][j]
    }
}

/// Shorthand for `Complex::new(re, im)`.
#[inline]
pub fn c<T>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}
