//! Word evaluation over the rationals with one shared denominator.
//!
//! Each column of the product is the image of a unit matrix, kept as an
//! integer matrix `X` over a positive integer `D`. A factor `A = A_int / a`
//! turns `X` into `A_int X + X A_int` and `D` into `2 a D`,
//! so each step costs plain integer multiply-adds. Writing `A_int = a I + B`
//! turns the identity part into one scalar multiple, leaving work proportional
//! to the nonzeros of `B`. Content is cancelled
//! whenever the denominator grows large. Entries live in `i128` until a step
//! might overflow, and in `BigInt` from then on.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::field::Rationals;
use crate::linalg::Matrix;
use crate::rational::Rational;

/// Reduce once the denominator passes this many bits.
const REDUCE_BITS: u32 = 48;
/// Keep `i128` magnitudes below this many bits.
const SMALL_BITS: u32 = 124;

/// A factor `A = (a I + B) / a` with `B` integral, stored as `a` and the nonzero entries of `B`.
enum Factor {
    Small { nz: Vec<(usize, usize, i128)>, den: i128, weight: u128 },
    Big { nz: Vec<(usize, usize, BigInt)>, den: BigInt },
}

fn lcm_i128(a: i128, b: i128) -> Option<i128> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b)
}

fn integer_form(a: &Matrix<Rationals>) -> Factor {
    let n = a.rows();
    let small: Option<Vec<(i64, i64)>> = a.data().iter().map(|x| x.small_parts()).collect();
    if let Some(parts) = small {
        let den = parts.iter().try_fold(1i128, |l, &(_, d)| lcm_i128(l, d as i128));
        if let Some(den) = den.filter(|d| *d < (1i128 << 62)) {
            let mut nz = Vec::new();
            // 2 a M + sum over B, each entry of B used on both sides
            let mut weight: u128 = 2 * den as u128;
            for (idx, &(num, d)) in parts.iter().enumerate() {
                let (i, k) = (idx / n, idx % n);
                let mut v = num as i128 * (den / d as i128);
                if i == k {
                    v -= den;
                }
                if v != 0 {
                    weight += 2 * v.unsigned_abs();
                    nz.push((i, k, v));
                }
            }
            return Factor::Small { nz, den, weight };
        }
    }
    let den = a.data().iter().fold(BigInt::one(), |l, x| l.lcm(x.to_big().denom()));
    let mut nz = Vec::new();
    for (idx, x) in a.data().iter().enumerate() {
        let (i, k) = (idx / n, idx % n);
        let r = x.to_big();
        let mut v = r.numer() * (&den / r.denom());
        if i == k {
            v -= &den;
        }
        if !v.is_zero() {
            nz.push((i, k, v));
        }
    }
    Factor::Big { nz, den }
}

fn bits(v: u128) -> u32 {
    128 - v.leading_zeros()
}

struct SmallState {
    m: Vec<i128>,
    den: i128,
}

struct BigState {
    m: Vec<BigInt>,
    den: BigInt,
    /// Denominator size right after the last full content reduction.
    reduced_bits: u64,
}

/// `L_{A_1} ... L_{A_k}` as `d x d` row-major entries.
///
/// Columns evolve independently, so each keeps its own denominator and
/// leaves the `i128` path only if its own entries grow.
pub(crate) fn word_product(n: usize, factors: &[Matrix<Rationals>]) -> Vec<Rational> {
    let d = n * n;
    let forms: Vec<Factor> = factors.iter().rev().filter(|a| !a.is_identity()).map(integer_form).collect();
    let mut out = vec![Rational::zero(); d * d];
    for c in 0..d {
        let mut unit = vec![0i128; d];
        unit[c] = 1;
        for (r, v) in column_product(n, &forms, unit).into_iter().enumerate() {
            out[r * d + c] = v;
        }
    }
    out
}

/// Applies the factors, first to last, to one column.
fn column_product(n: usize, forms: &[Factor], start: Vec<i128>) -> Vec<Rational> {
    let mut small = Some(SmallState { m: start, den: 1 });
    let mut big: Option<BigState> = None;
    for factor in forms {
        if let Some(st) = small.as_mut() {
            if let Factor::Small { nz, den, weight } = factor {
                if step_small(st, n, nz, *den, *weight) {
                    continue;
                }
            }
            let st = small.take().expect("checked above");
            let den = BigInt::from(st.den);
            big = Some(BigState {
                m: st.m.iter().map(|&v| BigInt::from(v)).collect(),
                reduced_bits: den.bits(),
                den,
            });
        }
        let st = big.as_mut().expect("one representation is live");
        step_big(st, n, factor);
        if let Some(back) = demote(st) {
            small = Some(back);
            big = None;
        }
    }
    match (small, big) {
        (Some(st), _) => st.m.iter().map(|&v| Rational::from_i128_parts(v, st.den)).collect(),
        (None, Some(mut st)) => {
            reduce_big(&mut st);
            st.m
                .into_iter()
                .map(|v| Rational::from_bigints(v, st.den.clone()).expect("positive denominator"))
                .collect()
        }
        (None, None) => unreachable!(),
    }
}

/// Returns `false`, leaving `st` untouched, if the step could overflow.
fn step_small(st: &mut SmallState, n: usize, nz: &[(usize, usize, i128)], aden: i128, weight: u128) -> bool {
    let max = st.m.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    // each new entry is bounded by weight * max
    if bits(max) + bits(weight) > SMALL_BITS {
        return false;
    }
    let Some(new_den) = st.den.checked_mul(2 * aden).filter(|v| bits(v.unsigned_abs()) <= SMALL_BITS) else {
        return false;
    };
    let scale = 2 * aden;
    let mut out: Vec<i128> = st.m.iter().map(|v| v * scale).collect();
    for &(i, k, v) in nz {
        // left product: X[i][j] += v X[k][j]; right product: X[j][k] += v X[j][i]
        for j in 0..n {
            out[i * n + j] += v * st.m[k * n + j];
            out[j * n + k] += v * st.m[j * n + i];
        }
    }
    st.m = out;
    st.den = new_den;
    if bits(st.den as u128) > REDUCE_BITS {
        reduce_small(st);
    }
    true
}

fn reduce_small(st: &mut SmallState) {
    let mut g = st.den.unsigned_abs();
    for v in &st.m {
        if g == 1 {
            return;
        }
        if *v != 0 {
            let r = v.unsigned_abs() % g;
            g = if r == 0 { g } else { g.gcd(&r) };
        }
    }
    if g > 1 {
        let g = g as i128;
        for v in st.m.iter_mut() {
            *v /= g;
        }
        st.den /= g;
    }
}

/// Full content reduction once the denominator has grown this much.
const BIG_REDUCE_GROWTH: u64 = 64;

fn step_big(st: &mut BigState, n: usize, factor: &Factor) {
    let (nz, aden): (Vec<(usize, usize, BigInt)>, BigInt) = match factor {
        Factor::Small { nz, den, .. } => (
            nz.iter().map(|&(i, k, v)| (i, k, BigInt::from(v))).collect(),
            BigInt::from(*den),
        ),
        Factor::Big { nz, den } => (nz.clone(), den.clone()),
    };
    let scale = &aden * 2u32;
    let mut out: Vec<BigInt> = if scale == BigInt::from(2u32) {
        st.m.iter().map(|v| v << 1u32).collect()
    } else {
        st.m.iter().map(|v| v * &scale).collect()
    };
    for (i, k, v) in &nz {
        let (i, k) = (*i, *k);
        for j in 0..n {
            let (dst, src) = (i * n + j, k * n + j);
            if !st.m[src].is_zero() {
                out[dst] += v * &st.m[src];
            }
            let (dst, src) = (j * n + k, j * n + i);
            if !st.m[src].is_zero() {
                out[dst] += v * &st.m[src];
            }
        }
    }
    st.m = out;
    st.den *= scale;
    strip_twos(st);
    if st.den.bits() > st.reduced_bits + BIG_REDUCE_GROWTH {
        reduce_big(st);
    }
}

/// Cancels the common power of two, which every step introduces.
fn strip_twos(st: &mut BigState) {
    let mut tz = st.den.trailing_zeros().unwrap_or(0);
    for v in &st.m {
        if tz == 0 {
            return;
        }
        if let Some(t) = v.trailing_zeros() {
            tz = tz.min(t);
        }
    }
    if tz > 0 {
        for v in st.m.iter_mut() {
            *v >>= tz;
        }
        st.den >>= tz;
    }
}

fn reduce_big(st: &mut BigState) {
    let mut g = st.den.clone();
    for v in &st.m {
        if g.is_one() {
            break;
        }
        if !v.is_zero() {
            g = g.gcd(v);
        }
    }
    if !g.is_one() {
        for v in st.m.iter_mut() {
            *v /= &g;
        }
        st.den /= &g;
    }
    st.reduced_bits = st.den.bits();
}

fn demote(st: &BigState) -> Option<SmallState> {
    let fits = |v: &BigInt| v.bits() < 100;
    if !fits(&st.den) || !st.m.iter().all(fits) {
        return None;
    }
    Some(SmallState {
        m: st.m.iter().map(|v| v.to_i128().expect("checked bit length")).collect(),
        den: st.den.to_i128().expect("checked bit length"),
    })
}
