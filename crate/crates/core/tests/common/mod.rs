#![allow(dead_code)]

use nilmod::moduli::CanonicalForm;
use nilmod::numerics::Mat;
use rand::Rng;

/// Isometric form `(cos x, cos y, sin x, sin y, 0)`.
pub fn random_isometric<R: Rng + ?Sized>(rng: &mut R) -> CanonicalForm {
    let x: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let y: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    CanonicalForm::new(x.cos(), y.cos(), x.sin(), y.sin(), 0.0)
}

struct Params {
    nu: f64,
    eta: f64,
    bq: f64,
    ap: f64,
    rho: f64,
    zeta: f64,
}

fn params(f: &CanonicalForm) -> Params {
    let (a, b, p, q) = (f.a_minus, f.b_minus, f.p, f.q);
    Params {
        nu: a + p,
        eta: b + q,
        bq: b - q,
        ap: a - p,
        rho: 0.25 * (3.0 * p * q - 3.0 * a * b + p * b - a * q),
        zeta: 0.25 * (3.0 * a * b + 3.0 * p * q + a * q + p * b),
    }
}

/// Jacobi matrix at the unnormalized `e1 + e6` exactly as printed.
pub fn printed_e1_e6(f: &CanonicalForm) -> Mat {
    let Params { nu, eta, bq, rho, .. } = params(f);
    let mut m = Mat::zeros(6, 6);
    m[(0, 0)] = 0.25 * eta * eta;
    m[(0, 5)] = -0.25 * eta * eta;
    m[(1, 1)] = -0.25 * (3.0 * nu * nu - bq * bq);
    m[(2, 2)] = -0.5 * eta * eta;
    m[(3, 3)] = 0.25 * bq * bq;
    m[(3, 4)] = -rho;
    m[(4, 3)] = rho;
    m[(4, 4)] = 0.25 * nu * nu;
    m[(5, 0)] = -0.25 * eta * eta;
    m[(5, 5)] = 0.25 * eta * eta;
    m
}

/// The printed `e1 + e6` matrix made symmetric: entry (5,4) is `−ρ`.
pub fn corrected_e1_e6(f: &CanonicalForm) -> Mat {
    let mut m = printed_e1_e6(f);
    m[(4, 3)] = m[(3, 4)];
    m
}

/// Jacobi matrix at the unnormalized `e2 + e5` exactly as printed.
pub fn printed_e2_e5(f: &CanonicalForm) -> Mat {
    let Params { nu, bq, ap, zeta, .. } = params(f);
    let mut m = Mat::zeros(6, 6);
    m[(0, 0)] = -0.5 * nu * nu;
    m[(1, 1)] = 0.25 * nu * nu;
    m[(1, 5)] = -0.25 * nu * nu;
    m[(2, 2)] = 0.25 * ap * ap;
    m[(2, 4)] = -zeta;
    m[(3, 3)] = -0.25 * (3.0 * bq * bq - ap);
    m[(4, 1)] = -0.25 * nu * nu;
    m[(4, 5)] = 0.25 * nu * nu;
    m[(5, 2)] = -zeta;
    m[(5, 4)] = 0.25 * bq;
    m
}

/// The printed `e2 + e5` matrix with columns 5 and 6 exchanged and the
/// squares restored in entries (4,4) and (6,6).
pub fn corrected_e2_e5(f: &CanonicalForm) -> Mat {
    let Params { bq, ap, .. } = params(f);
    let mut m = printed_e2_e5(f);
    m.swap_columns(4, 5);
    m[(3, 3)] = -0.25 * (3.0 * bq * bq - ap * ap);
    m[(5, 5)] = 0.25 * bq * bq;
    m
}
