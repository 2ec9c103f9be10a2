//! Dense reference implementations used as test oracles. Nothing here calls
//! into the crate's linear algebra.

#![allow(dead_code)]

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    let mut out = zeros(r, c);
    for i in 0..r {
        for l in 0..k {
            let v = a[i][l];
            if v != 0.0 {
                for j in 0..c {
                    out[i][j] += v * b[l][j];
                }
            }
        }
    }
    out
}

pub fn matvec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.iter().zip(q).map(|(u, v)| u - v).collect())
        .collect()
}

pub fn diag(v: &[f64]) -> Mat {
    let mut m = zeros(v.len(), v.len());
    for (i, &x) in v.iter().enumerate() {
        m[i][i] = x;
    }
    m
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Mat) -> Mat {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        assert!(d != 0.0, "singular matrix");
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Warping matrix (n_phase x n_time) from the knot rule
/// `j <= k (N-1)/(T-1) < j + 1`, evaluated exactly in integers, with the
/// last knot assigned to the last sample.
pub fn theta(n_time: usize, n_phase: usize) -> Mat {
    let mut th = zeros(n_phase, n_time);
    for k in 0..n_phase {
        let num = (k * (n_time - 1)) as u128;
        let den = (n_phase - 1) as u128;
        let j = (0..n_time)
            .find(|&j| j as u128 * den <= num && num < (j as u128 + 1) * den)
            .unwrap_or(n_time - 1);
        th[k][j] = 1.0;
    }
    th
}

/// `Psi = (Theta^T Theta)^-1 Theta^T`.
pub fn psi(th: &Mat) -> Mat {
    let tt = transpose(th);
    matmul(&inverse(&matmul(&tt, th)), &tt)
}

pub struct DensePosterior {
    pub s_hat: Vec<f64>,
    pub prior: Vec<f64>,
    pub post_var: Vec<f64>,
}

/// Posterior mean and variance from the time-domain moments
/// `mu_s = Psi mu`, `K_x = Psi K Psi^T + ridge I`,
/// `K_s = Psi (K - K_noise) Psi^T`, with `K_noise` in phase coordinates.
pub fn dense_posterior(
    x: &[f64],
    th: &Mat,
    mu: &[f64],
    k_phase: &Mat,
    k_noise: &Mat,
    ridge: f64,
) -> DensePosterior {
    let p = psi(th);
    let pt = transpose(&p);
    let prior = matvec(&p, mu);
    let mut k_x = matmul(&matmul(&p, k_phase), &pt);
    for (i, row) in k_x.iter_mut().enumerate() {
        row[i] += ridge;
    }
    let k_s = matmul(&matmul(&p, &sub(k_phase, k_noise)), &pt);
    let k_x_inv = inverse(&k_x);
    let gain = matmul(&k_s, &k_x_inv);
    let innovation: Vec<f64> = x.iter().zip(&prior).map(|(a, b)| a - b).collect();
    let s_hat = prior
        .iter()
        .zip(matvec(&gain, &innovation))
        .map(|(a, b)| a + b)
        .collect();
    let shrink = matmul(&gain, &k_s);
    let post_var = (0..x.len()).map(|i| k_s[i][i] - shrink[i][i]).collect();
    DensePosterior {
        s_hat,
        prior,
        post_var,
    }
}

/// Small deterministic generator so oracles do not share the crate's RNG
/// plumbing.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + (self.next_u64() % (hi_inclusive - lo + 1) as u64) as usize
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
