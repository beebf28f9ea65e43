//! Exact rational determinants of the Padé matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn gen_binomial(theta: &BigRational, i: isize) -> BigRational {
    if i < 0 {
        return BigRational::zero();
    }
    (0..i).fold(BigRational::one(), |acc, j| {
        acc * (theta - BigRational::from_integer(j.into())) / BigRational::from_integer((j + 1).into())
    })
}

fn rising_binomial(theta: &BigRational, i: isize) -> BigRational {
    if i < 0 {
        return BigRational::zero();
    }
    (0..i).fold(BigRational::one(), |acc, j| {
        acc * (theta + BigRational::from_integer(j.into())) / BigRational::from_integer((j + 1).into())
    })
}

// Clears each row's denominators, then runs fraction-free elimination.
pub fn det(a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = a
        .into_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            scale *= &l;
            row.into_iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    BigRational::new(sign * &m[n - 1][n - 1], scale)
}

/// `det K` at the exact binary value of `theta`.
pub fn det_k_exact(n: usize, theta: f64) -> f64 {
    let t = exact(theta);
    let m = n / 2;
    let rows = (0..m)
        .map(|i| (0..m).map(|j| gen_binomial(&t, (n - m + i) as isize - j as isize)).collect())
        .collect();
    to_f64(&det(rows))
}

/// `det B` at the exact binary value of `theta`.
pub fn det_b_exact(n: usize, theta: f64) -> f64 {
    let t = exact(theta);
    let rows = (0..n)
        .map(|i| (0..n).map(|j| rising_binomial(&t, 2 * i as isize - j as isize)).collect())
        .collect();
    to_f64(&det(rows))
}

fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // Scale into range before converting so tiny values keep full precision.
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scaled = if shift > 0 {
        r / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        r * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    let sign = if scaled.is_negative() { -1.0 } else { 1.0 };
    let v = scaled.abs();
    // Keep ~64 significant bits of each part.
    let drop = v.denom().bits().max(v.numer().bits()).saturating_sub(64) as usize;
    let f = (v.numer() >> drop).to_f64().unwrap() / (v.denom() >> drop).to_f64().unwrap();
    sign * f * 2f64.powi(shift as i32)
}
