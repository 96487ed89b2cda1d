//! Dense-matrix model of generalized Paulis, independent of the symbolic code.

use num_complex::Complex64;
use ztwist::pauli::PauliOperator;

pub type Matrix = Vec<Vec<Complex64>>;

fn root_of_unity(n: u8, k: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(n))
}

/// `X |j> = |j+1>`, `Z |j> = w^j |j>`, with `w = exp(2 pi i / N)`.
fn site_matrix(n: u8, a: u8, b: u8) -> Matrix {
    let d = usize::from(n);
    let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for j in 0..d {
        m[(j + usize::from(a)) % d][j] = root_of_unity(n, u32::from(b) * j as u32);
    }
    m
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn to_matrix(p: &PauliOperator) -> Matrix {
    let n = p.modulus();
    let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
    for j in 0..p.n_sites() {
        let (a, b) = p.site(j);
        m = kron(&m, &site_matrix(n, a, b));
    }
    let phase = Complex64::i().powu(u32::from(p.phase()));
    m.iter().map(|row| row.iter().map(|v| v * phase).collect()).collect()
}

pub fn approx_eq(a: &Matrix, b: &Matrix) -> bool {
    a.iter().zip(b).all(|(r, s)| r.iter().zip(s).all(|(x, y)| (x - y).norm() < 1e-9))
}
