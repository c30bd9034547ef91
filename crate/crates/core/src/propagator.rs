//! Exact RWA time-evolution operator at resonance.
//!
//! `U(t') = E1 |a><a| + E2 |a><b| + E3 |b><a| + E4 |b><b|`, where each field
//! block is tridiagonal in the number basis:
//! `E_i |n> = f_i1(n) |n+1> + f_i2(n) |n> + f_i3(n) |n-1>`. Blocks are applied
//! through the scalar band coefficients only, so no `1/sqrt(N)` appears and
//! the vacuum needs no special casing.

use num_complex::Complex64 as C64;

use crate::dynamics::JointState;
use crate::error::{Error, Result};
use crate::fock::{check_boundary, FieldVector};

/// Band coefficients at a given `(n, t')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandCoeffs {
    /// Coefficient of `|n+1>`: `-(i/2) sin(t' sqrt(n+1))`.
    pub f1: C64,
    /// Symmetric diagonal: `(cos(t' sqrt n) + cos(t' sqrt(n+1))) / 2`.
    pub f2: C64,
    /// Antisymmetric diagonal: `(cos(t' sqrt n) - cos(t' sqrt(n+1))) / 2`.
    pub f3: C64,
    /// Coefficient of `|n-1>`: `-(i/2) sin(t' sqrt n)`.
    pub f1p: C64,
}

pub fn band_coeffs(n: usize, t_prime: f64) -> BandCoeffs {
    let w0 = t_prime * (n as f64).sqrt();
    let w1 = t_prime * ((n + 1) as f64).sqrt();
    let (s0, c0) = w0.sin_cos();
    let (s1, c1) = w1.sin_cos();
    BandCoeffs {
        f1: C64::new(0.0, -0.5 * s1),
        f2: C64::new(0.5 * (c0 + c1), 0.0),
        f3: C64::new(0.5 * (c0 - c1), 0.0),
        f1p: C64::new(0.0, -0.5 * s0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    E1,
    E2,
    E3,
    E4,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::E1, Block::E2, Block::E3, Block::E4];

    /// `(f_i1, f_i2, f_i3)`: amplitudes sent to `|n+1>`, `|n>`, `|n-1>`.
    pub fn row(self, c: &BandCoeffs) -> (C64, C64, C64) {
        match self {
            Block::E1 => (c.f1, c.f2, c.f1p),
            Block::E2 => (-c.f1, c.f3, c.f1p),
            Block::E3 => (c.f1, c.f3, -c.f1p),
            Block::E4 => (-c.f1, c.f2, -c.f1p),
        }
    }
}

/// Result of applying a block: the truncated image plus the squared magnitude
/// of the `|n_max+1>` amplitude that was dropped.
#[derive(Clone, Debug)]
pub struct BlockImage {
    pub vector: FieldVector,
    pub leakage: f64,
}

pub fn apply_block(which: Block, v: &FieldVector, t_prime: f64) -> Result<BlockImage> {
    check_boundary(v)?;
    Ok(apply_block_unchecked(which, v, t_prime))
}

pub(crate) fn apply_block_unchecked(which: Block, v: &FieldVector, t_prime: f64) -> BlockImage {
    let n_max = v.n_max();
    let mut out = vec![C64::new(0.0, 0.0); n_max + 1];
    let mut overflow = C64::new(0.0, 0.0);
    for (n, &x) in v.amps().iter().enumerate() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        let (up, diag, down) = which.row(&band_coeffs(n, t_prime));
        if n < n_max {
            out[n + 1] += x * up;
        } else {
            overflow += x * up;
        }
        out[n] += x * diag;
        if n > 0 {
            out[n - 1] += x * down;
        }
    }
    BlockImage {
        vector: FieldVector::from_amps(out).expect("non-empty").with_tail_mass(v.tail_mass()),
        leakage: overflow.norm_sqr(),
    }
}

/// Applies the full propagator `U(t')` to a joint state:
/// `A' = E1 A + E2 B`, `B' = E3 A + E4 B`.
///
/// `U(t')` is the evolution from `t' = 0`; the RWA generator is time
/// independent at resonance, so `U(t) U(s) = U(t + s)` on the interior.
pub fn apply_propagator(joint: &JointState, t_prime: f64) -> Result<JointState> {
    check_boundary(&joint.a)?;
    check_boundary(&joint.b)?;
    let e1 = apply_block_unchecked(Block::E1, &joint.a, t_prime);
    let e2 = apply_block_unchecked(Block::E2, &joint.b, t_prime);
    let e3 = apply_block_unchecked(Block::E3, &joint.a, t_prime);
    let e4 = apply_block_unchecked(Block::E4, &joint.b, t_prime);
    let one = C64::new(1.0, 0.0);
    let a = e1.vector.add_scaled(one, &e2.vector)?;
    let b = e3.vector.add_scaled(one, &e4.vector)?;
    let leakage = joint.leakage + e1.leakage + e2.leakage + e3.leakage + e4.leakage;
    Ok(JointState { a, b, t_prime: joint.t_prime + t_prime, leakage })
}

/// Image of `|a,n>` (`upper = true`) or `|b,n>` under the truncated `U(t')`,
/// as `(A, B)` branch amplitudes.
fn column(n: usize, upper: bool, n_max: usize, t_prime: f64) -> (Vec<C64>, Vec<C64>) {
    let e = FieldVector::number_state(n, n_max).expect("n <= n_max");
    let (top, bottom) = if upper { (Block::E1, Block::E3) } else { (Block::E2, Block::E4) };
    let a = apply_block_unchecked(top, &e, t_prime).vector;
    let b = apply_block_unchecked(bottom, &e, t_prime).vector;
    (a.amps().to_vec(), b.amps().to_vec())
}

fn column_inner(x: &(Vec<C64>, Vec<C64>), y: &(Vec<C64>, Vec<C64>)) -> C64 {
    let a: C64 = x.0.iter().zip(&y.0).map(|(p, q)| p.conj() * q).sum();
    let b: C64 = x.1.iter().zip(&y.1).map(|(p, q)| p.conj() * q).sum();
    a + b
}

/// Largest deviation from orthonormality among the columns `U|a,n>`,
/// `U|b,n>` with `n <= n_max - interior_margin`.
///
/// Columns can only overlap when their Fock indices differ by at most two, so
/// those are the pairs checked. A margin of zero includes the cutoff level and
/// exposes the dropped `|n_max+1>` amplitude.
pub fn unitarity_defect(t_prime: f64, n_max: usize, interior_margin: usize) -> Result<f64> {
    if interior_margin > n_max {
        return Err(Error::InvalidParameter(format!(
            "interior margin {interior_margin} exceeds n_max = {n_max}"
        )));
    }
    let top = n_max - interior_margin;
    let cols: Vec<_> = (0..=top)
        .flat_map(|n| [column(n, true, n_max, t_prime), column(n, false, n_max, t_prime)])
        .collect();
    let mut defect = 0.0_f64;
    for i in 0..cols.len() {
        defect = defect.max((column_inner(&cols[i], &cols[i]).re - 1.0).abs());
        // index 2n + s; partners up to two Fock levels above
        for j in (i + 1)..cols.len().min(i + 6) {
            defect = defect.max(column_inner(&cols[i], &cols[j]).norm());
        }
    }
    Ok(defect)
}
