use nalgebra::ComplexField;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Field scalar for nodal vectors: `f64` for periodic problems,
/// `Complex64` for Bloch (quasi-periodic) ones.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Default {
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    /// `exp(i angle)`, or `None` if not representable in this scalar type.
    fn phase(angle: f64) -> Option<Self>;
    fn from_f64(x: f64) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        z.re
    }

    #[inline]
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn phase(angle: f64) -> Option<Self> {
        (angle == 0.0).then_some(1.0)
    }

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn from_c64(z: Complex64) -> Self {
        z
    }

    #[inline]
    fn to_c64(self) -> Complex64 {
        self
    }

    fn phase(angle: f64) -> Option<Self> {
        Some(Complex64::from_polar(1.0, angle))
    }

    #[inline]
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// `sum conj(x_i) y_i`
pub fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    x.iter().zip(y).fold(S::zero(), |acc, (&a, &b)| acc + a.conjugate() * b)
}

/// `Re sum conj(x_i) y_i`
pub fn dot_re<S: Scalar>(x: &[S], y: &[S]) -> f64 {
    dot(x, y).real()
}

pub fn norm<S: Scalar>(x: &[S]) -> f64 {
    Float::sqrt(x.iter().map(|v| v.modulus_squared()).sum::<f64>())
}

/// `x mod m` in `[0, m)` for `m > 0`.
pub fn rem_euclid(x: f64, m: f64) -> f64 {
    let r = x % m;
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

/// `y += a x`
pub fn axpy<S: Scalar>(a: S, x: &[S], y: &mut [S]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
