#![allow(dead_code)]

use resolvent_core::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense complex Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= m * v;
            }
            let v = b[k];
            b[i] -= m * v;
        }
    }
    let mut x = vec![c(0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Per-mode Stokes system for data `(f, g)e^{iξ·x}` with constant `η0`:
/// `λρ + η0 iξ·u = f`, `(η0λ + α|ξ|²)u + βξ(ξ·u) + iξP'ρ = g`.
/// Returns `(ρ, u)`.
pub fn stokes_mode(
    lambda: Complex64,
    alpha: f64,
    beta: f64,
    eta0: f64,
    p_prime: f64,
    xi: &[f64],
    f: Complex64,
    g: &[Complex64],
) -> (Complex64, Vec<Complex64>) {
    let d = xi.len();
    let i = Complex64::new(0.0, 1.0);
    let xi2: f64 = xi.iter().map(|k| k * k).sum();
    let mut a = vec![vec![c(0.0); d + 1]; d + 1];
    let mut b = vec![f];
    a[0][0] = lambda;
    for k in 0..d {
        a[0][k + 1] = eta0 * i * xi[k];
        a[k + 1][0] = i * xi[k] * p_prime;
        for l in 0..d {
            a[k + 1][l + 1] = c(beta * xi[k] * xi[l]);
        }
        a[k + 1][k + 1] += eta0 * lambda + alpha * xi2;
        b.push(g[k]);
    }
    let x = dense_solve(a, b);
    (x[0], x[1..].to_vec())
}

/// `exp(A)` by scaling and squaring with a Taylor core.
pub fn matrix_exp(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let norm: f64 = a.iter().map(|r| r.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max);
    let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = 2f64.powi(-s);
    let b: Vec<Vec<Complex64>> = a.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
    let mul = |x: &Vec<Vec<Complex64>>, y: &Vec<Vec<Complex64>>| {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect())
            .collect::<Vec<Vec<Complex64>>>()
    };
    let mut result: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| c((i == j) as u8 as f64)).collect()).collect();
    let mut term = result.clone();
    for k in 1..30 {
        term = mul(&term, &b).into_iter().map(|r| r.into_iter().map(|v| v / k as f64).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        result = mul(&result, &result);
    }
    result
}
