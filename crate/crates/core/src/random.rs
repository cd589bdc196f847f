//! Seeded random generators for states, unitaries and algebra elements.
//!
//! Every trial owns its generator: [`seeded_rng`] maps `(seed, stream)` to an
//! independent ChaCha stream, so parallel trials never share state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lie_flag::SuVector;
use crate::numerics::{outer, ComplexMatrix, ComplexVector};
use crate::quantum_states::PureState;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex normal: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| complex_normal(rng))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    loop {
        let v = random_vector(n, rng);
        if v.norm() > 1e-6 {
            return PureState::normalized(v).expect("non-zero vector");
        }
    }
}

/// Haar-random unitary (QR of a Ginibre matrix with the R phases removed).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// GUE-like Hermitian matrix with entries of size `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rng);
    (&g + g.adjoint()).scale(0.5 * scale)
}

/// Random traceless skew-Hermitian matrix (an element of su(n)).
pub fn random_su<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> ComplexMatrix {
    let mut h = random_hermitian(n, scale, rng);
    let shift = h.trace() / Complex64::new(n as f64, 0.0);
    for k in 0..n {
        h[(k, k)] -= shift;
    }
    h * Complex64::new(0.0, 1.0)
}

/// Random `X` in su(n) with `A x = i alpha x` in the `(1, n - 1)` blocks.
///
/// `A` is `i alpha` on `x` plus a random skew-Hermitian part on the
/// complement of `x`. For `n = 2` there is no complement and the result is
/// purely off-diagonal.
pub fn random_equigeodesic<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> SuVector {
    assert!(n >= 2, "flag needs n >= 2");
    let m = n - 1;
    let x = random_vector(m, rng) * Complex64::new(scale, 0.0);
    if n == 2 {
        return SuVector::from_flag_blocks(0.0, &x, &ComplexMatrix::zeros(1, 1))
            .expect("traceless");
    }
    let alpha = scale * rng.sample::<f64, _>(StandardNormal);
    let p = outer(&x, &x).unscale(x.norm_squared());
    let q = ComplexMatrix::identity(m, m) - &p;
    let k = random_su(m, scale, rng);
    let mut a = &p * Complex64::new(0.0, alpha) + &q * k * &q;
    // Tr A = -i alpha keeps X traceless
    let shift = (Complex64::new(0.0, -alpha) - a.trace()) / Complex64::new((m - 1) as f64, 0.0);
    a += q * shift;
    let a = (&a - a.adjoint()).scale(0.5);
    SuVector::from_flag_blocks(alpha, &x, &a).expect("constructed traceless")
}

/// Log-uniform sample on `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}
