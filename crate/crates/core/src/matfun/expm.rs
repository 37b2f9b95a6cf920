//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

use crate::error::{Error, Result};
use crate::linalg;
use crate::linop::{real, CMat, LinOp};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// More squarings than this cannot produce a finite result.
const MAX_SQUARINGS: u32 = 1100;

fn pade_low(a: &CMat, b: &[f64]) -> (CMat, CMat) {
    let n = a.nrows();
    let eye = CMat::identity(n, n);
    let a2 = a * a;
    // even powers A^0, A^2, A^4, ...
    let mut powers = vec![eye.clone(), a2.clone()];
    while 2 * powers.len() < b.len() {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u = CMat::zeros(n, n);
    let mut v = CMat::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            u += p * real(b[2 * k + 1]);
        }
        v += p * real(b[2 * k]);
    }
    (a * u, v)
}

fn pade_13(a: &CMat) -> (CMat, CMat) {
    let b = &PADE_13;
    let n = a.nrows();
    let eye = CMat::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * real(b[13]) + &a4 * real(b[11]) + &a2 * real(b[9]);
    let u = a * (&a6 * inner_u
        + &a6 * real(b[7])
        + &a4 * real(b[5])
        + &a2 * real(b[3])
        + &eye * real(b[1]));
    let inner_v = &a6 * real(b[12]) + &a4 * real(b[10]) + &a2 * real(b[8]);
    let v = &a6 * inner_v + &a6 * real(b[6]) + &a4 * real(b[4]) + &a2 * real(b[2]) + &eye * real(b[0]);
    (u, v)
}

/// Matrix exponential `e^A`.
pub fn expm(a: &LinOp) -> Result<LinOp> {
    expm_matrix(a.matrix()).map(LinOp::from_computed)
}

pub(crate) fn expm_matrix(a: &CMat) -> Result<CMat> {
    let norm = linalg::norm1(a);
    if !norm.is_finite() {
        return Err(Error::Overflow { norm, squarings: 0 });
    }
    for (m, theta) in THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            let (u, v) = pade_low(a, b);
            return rational(&u, &v);
        }
    }
    let squarings = (norm / THETA_13).log2().ceil().max(0.0) as u32;
    if squarings > MAX_SQUARINGS {
        return Err(Error::Overflow { norm, squarings });
    }
    let scaled = a * real(0.5_f64.powi(squarings as i32));
    let (u, v) = pade_13(&scaled);
    let mut r = rational(&u, &v)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Overflow { norm, squarings });
    }
    Ok(r)
}

fn rational(u: &CMat, v: &CMat) -> Result<CMat> {
    linalg::solve(&(v - u), &(v + u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::c64;

    #[test]
    fn zero_and_diagonal() {
        let e = expm(&LinOp::zeros(3)).unwrap();
        assert_eq!(e, LinOp::identity(3));
        for (a, b) in [(0.001, -0.002), (0.5, -0.3), (2.0, -1.5), (10.0, -30.0)] {
            let e = expm(&LinOp::from_real_diagonal(&[a, b])).unwrap();
            assert!((e[(0, 0)].re - a.exp()).abs() <= 1e-14 * a.exp());
            assert!((e[(1, 1)].re - b.exp()).abs() <= 1e-13 * b.exp());
            assert!(e[(0, 1)].norm() == 0.0);
        }
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, -t], [t, 0]]) is the rotation by t
        let t = 1.3;
        let a = LinOp::from_real_rows(&[vec![0.0, -t], vec![t, 0.0]]).unwrap();
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - real(t.cos())).norm() < 1e-14);
        assert!((e[(1, 0)] - real(t.sin())).norm() < 1e-14);
    }

    #[test]
    fn nilpotent_is_exact() {
        let a = LinOp::from_rows(&[vec![real(0.0), c64(2.0, 1.0)], vec![real(0.0), real(0.0)]]).unwrap();
        let e = expm(&a).unwrap();
        assert!((e[(0, 1)] - c64(2.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn overflow_is_reported() {
        let a = LinOp::from_real_diagonal(&[1e308]);
        assert!(matches!(expm(&a), Err(Error::Overflow { .. })));
        let a = LinOp::from_real_diagonal(&[800.0]);
        assert!(matches!(expm(&a), Err(Error::Overflow { .. })));
    }
}
