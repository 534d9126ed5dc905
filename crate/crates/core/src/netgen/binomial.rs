use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Mean below which inversion from a precomputed `P(X = 0)` beats BTPE.
const INVERSION_MEAN: f64 = 10.0;

/// A Binomial(n, p) sampler prepared once and drawn from many times.
///
/// Most draws in a geographic neighbourhood have a tiny mean, so the common
/// case is one uniform compared against `(1 − p)^n`.
#[derive(Clone, Debug)]
pub(crate) enum BinomialDraw {
    Constant(u32),
    Bernoulli(f64),
    Inversion { n: u32, p0: f64, ratio: f64 },
    Btpe(Binomial),
}

impl BinomialDraw {
    pub(crate) fn new(n: u32, p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p));
        if n == 0 || p <= 0.0 {
            BinomialDraw::Constant(0)
        } else if p >= 1.0 {
            BinomialDraw::Constant(n)
        } else if n == 1 {
            BinomialDraw::Bernoulli(p)
        } else if f64::from(n) * p < INVERSION_MEAN {
            BinomialDraw::Inversion {
                n,
                p0: (f64::from(n) * (-p).ln_1p()).exp(),
                ratio: p / (1.0 - p),
            }
        } else {
            BinomialDraw::Btpe(Binomial::new(u64::from(n), p).expect("p checked in (0, 1)"))
        }
    }

    #[inline]
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match *self {
            BinomialDraw::Constant(k) => k,
            BinomialDraw::Bernoulli(p) => u32::from(rng.random::<f64>() < p),
            BinomialDraw::Inversion { n, p0, ratio } => {
                let u = rng.random::<f64>();
                let (mut k, mut pk, mut cdf) = (0u32, p0, p0);
                while u >= cdf && k < n {
                    pk *= f64::from(n - k) / f64::from(k + 1) * ratio;
                    k += 1;
                    cdf += pk;
                }
                k
            }
            BinomialDraw::Btpe(ref b) => b.sample(rng) as u32,
        }
    }
}
