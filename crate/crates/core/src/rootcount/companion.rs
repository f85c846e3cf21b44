//! Eigenvalues of the companion matrix by balancing followed by the
//! Francis double-shift QR iteration on the (already Hessenberg) matrix.
//! Eigenvalues only; no Schur vectors are accumulated.

const MAX_ITERS_PER_EIGENVALUE: usize = 60;

/// Square matrix with 1-based indexing, matching the usual statement of the
/// Hessenberg QR recurrences.
struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline(always)]
    fn idx(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.n + (j - 1)
    }

    #[inline(always)]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline(always)]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline(always)]
    fn sub(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] -= v;
    }
}

/// Companion matrix of the monic polynomial `x^d + c[d-1] x^{d-1} + ... + c[0]`
/// built from ascending `coeffs` of length `d + 1` with nonzero leading entry.
fn companion(coeffs: &[f64]) -> Mat {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let mut m = Mat::zeros(d);
    for j in 1..=d {
        m.set(1, j, -coeffs[d - j] / lead);
    }
    for i in 2..=d {
        m.set(i, i - 1, 1.0);
    }
    m
}

/// Parlett–Reinsch balancing with radix 2 (exact scaling).
fn balance(a: &mut Mat) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let n = a.n;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= SQRDX;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= SQRDX;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        let v = a.get(i, j) * g;
                        a.set(i, j, v);
                    }
                    for j in 1..=n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
    }
}

/// Eigenvalues `(re, im)` of an upper Hessenberg matrix. Returns `None` if
/// some eigenvalue fails to converge.
fn hqr(a: &mut Mat) -> Option<Vec<(f64, f64)>> {
    let n = a.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a.get(i, j).abs();
        }
    }

    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        let mut l;
        loop {
            // look for a single small subdiagonal element
            l = nn;
            while l >= 2 {
                let mut s = a.get(l - 1, l - 1).abs() + a.get(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a.get(l, l - 1).abs() <= f64::EPSILON * s {
                    a.set(l, l - 1, 0.0);
                    break;
                }
                l -= 1;
            }
            let mut x = a.get(nn, nn);
            if l == nn {
                // one root found
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = a.get(nn - 1, nn - 1);
                let mut w = a.get(nn, nn - 1) * a.get(nn - 1, nn);
                if l == nn - 1 {
                    // two roots found
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        let z = p + z.copysign(p);
                        wr[nn - 1] = x + z;
                        wr[nn] = if z != 0.0 { x - w / z } else { x + z };
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITERS_PER_EIGENVALUE {
                        return None;
                    }
                    if its == 10 || its == 20 || its == 40 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a.sub(i, i, x);
                        }
                        let s = a.get(nn, nn - 1).abs() + a.get(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;

                    // form shift and look for two consecutive small subdiagonals
                    let mut m = nn - 2;
                    let (mut p, mut q, mut r);
                    loop {
                        let z = a.get(m, m);
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a.get(m + 1, m) + a.get(m, m + 1);
                        q = a.get(m + 1, m + 1) - z - rr - ss;
                        r = a.get(m + 2, m + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a.get(m, m - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (a.get(m - 1, m - 1).abs() + z.abs() + a.get(m + 1, m + 1).abs());
                        if u <= f64::EPSILON * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        a.set(i, i - 2, 0.0);
                        if i != m + 2 {
                            a.set(i, i - 3, 0.0);
                        }
                    }

                    // double QR step on rows l..nn, columns m..nn
                    let mut k = m;
                    while k < nn {
                        let mut xx = 0.0;
                        if k != m {
                            p = a.get(k, k - 1);
                            q = a.get(k + 1, k - 1);
                            r = if k != nn - 1 {
                                a.get(k + 2, k - 1)
                            } else {
                                0.0
                            };
                            xx = p.abs() + q.abs() + r.abs();
                            if xx != 0.0 {
                                p /= xx;
                                q /= xx;
                                r /= xx;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    let v = -a.get(k, k - 1);
                                    a.set(k, k - 1, v);
                                }
                            } else {
                                a.set(k, k - 1, -s * xx);
                            }
                            p += s;
                            let x1 = p / s;
                            let y1 = q / s;
                            let z1 = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = a.get(k, j) + q * a.get(k + 1, j);
                                if k != nn - 1 {
                                    pp += r * a.get(k + 2, j);
                                    a.sub(k + 2, j, pp * z1);
                                }
                                a.sub(k + 1, j, pp * y1);
                                a.sub(k, j, pp * x1);
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x1 * a.get(i, k) + y1 * a.get(i, k + 1);
                                if k != nn - 1 {
                                    pp += z1 * a.get(i, k + 2);
                                    a.sub(i, k + 2, pp * r);
                                }
                                a.sub(i, k + 1, pp * q);
                                a.sub(i, k, pp);
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn == 0 || l + 1 >= nn {
                break;
            }
        }
    }
    Some((1..=n).map(|i| (wr[i], wi[i])).collect())
}

/// Roots `(re, im)` of the polynomial with ascending `coeffs` (nonzero leading
/// coefficient, degree >= 1). `None` if the QR iteration fails to converge.
pub(crate) fn polynomial_roots(coeffs: &[f64]) -> Option<Vec<(f64, f64)>> {
    let d = coeffs.len().checked_sub(1)?;
    if d == 0 {
        return Some(Vec::new());
    }
    if d == 1 {
        return Some(vec![(-coeffs[0] / coeffs[1], 0.0)]);
    }
    let mut m = companion(coeffs);
    balance(&mut m);
    hqr(&mut m)
}
