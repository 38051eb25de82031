//! Fresnel integrals
//!
//! C(x) = ∫₀ˣ cos(πt²/2) dt and S(x) = ∫₀ˣ sin(πt²/2) dt.
//!
//! Small arguments use the Maclaurin series. Beyond [`SERIES_LIMIT`] the pair
//! is recovered from the auxiliary function
//!
//! ```text
//! C(x) + jS(x) = (1 + j)/2 · (1 − e^{jπx²/2} · h(x))
//! ```
//!
//! where `h` is evaluated with a modified Lentz continued fraction. Both
//! branches reach close to machine precision on the whole real line.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use super::NumericsError;

/// Switchover between the power series and the auxiliary-function branch.
pub const SERIES_LIMIT: f64 = 1.5;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_TERMS: usize = 200;

/// Values of the two Fresnel integrals at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

impl FresnelPair {
    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.c, self.s)
    }
}

/// Evaluates `(C(x), S(x))`.
pub fn fresnel(x: f64) -> Result<FresnelPair, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::NonFinite(x));
    }
    let ax = x.abs();
    let (c, s) = if ax <= SERIES_LIMIT { series(ax) } else { auxiliary(ax) };
    Ok(if x < 0.0 {
        FresnelPair { c: -c, s: -s }
    } else {
        FresnelPair { c, s }
    })
}

fn series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    // term_k = (πx²/2)^k / k!, C collects even k with weight 1/(2k+1)
    // alternating in sign every other even term; S collects the odd k.
    let u = FRAC_PI_2 * x * x;
    let mut term = 1.0;
    let mut c = 0.0;
    let mut s = 0.0;
    for k in 0..MAX_TERMS {
        if k > 0 {
            term *= u / k as f64;
        }
        let contrib = term / (2 * k + 1) as f64;
        match k % 4 {
            0 => c += contrib,
            1 => s += contrib,
            2 => c -= contrib,
            _ => s -= contrib,
        }
        if k > 2 && contrib < EPS * c.abs().max(s.abs()) {
            break;
        }
    }
    (x * c, x * s)
}

fn auxiliary(x: f64) -> (f64, f64) {
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n: f64 = -1.0;
    for _ in 1..MAX_TERMS {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = (d * a + b).inv();
        cc = b + cc.inv() * a;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::from_polar(1.0, 0.5 * pix2);
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h);
    (cs.re, cs.im)
}
