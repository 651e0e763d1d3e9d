//! Raw trigonometric sums on the interior nodes of a uniform grid.
//!
//! For `m = n - 1` interior nodes the transforms computed here are
//!
//! ```text
//! S(x)_k = Σ_{i=1}^{n-1} x_i sin(π i k / n)      k = 1..n-1
//! C(a)_i = Σ_{k=1}^{n-1} a_k cos(π i k / n)      i = 1..n-1
//! ```
//!
//! Both are evaluated through one complex FFT of length `2n` applied to an odd
//! (resp. even) extension. Two real transforms are packed into the real and
//! imaginary parts of a single FFT. When `2n` is not a power of two the sums are
//! evaluated directly from trigonometric tables.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[derive(Debug, Clone)]
pub(crate) struct Trig {
    n: usize,
    plan: Plan,
}

#[derive(Debug, Clone)]
enum Plan {
    Fft(Fft),
    /// `sin(π j / n)` and `cos(π j / n)` for `j = 0..2n`.
    Direct { sin: Vec<f64>, cos: Vec<f64> },
}

impl Trig {
    pub(crate) fn new(n: usize) -> Self {
        let len = 2 * n;
        let plan = if len.is_power_of_two() {
            Plan::Fft(Fft::new(len))
        } else {
            let angle = |j: usize| PI * j as f64 / n as f64;
            Plan::Direct {
                sin: (0..len).map(|j| libm::sin(angle(j))).collect(),
                cos: (0..len).map(|j| libm::cos(angle(j))).collect(),
            }
        };
        Trig { n, plan }
    }

    /// Sine sums of two sequences at once.
    pub(crate) fn sine_pair(&self, x: &[f64], y: &[f64], sx: &mut [f64], sy: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n - 1);
        match &self.plan {
            Plan::Fft(fft) => {
                let len = 2 * n;
                let mut re = vec![0.0; len];
                let mut im = vec![0.0; len];
                for j in 1..n {
                    re[j] = x[j - 1];
                    im[j] = y[j - 1];
                    re[len - j] = -x[j - 1];
                    im[len - j] = -y[j - 1];
                }
                fft.run(&mut re, &mut im);
                for k in 1..n {
                    sx[k - 1] = -0.5 * im[k];
                    sy[k - 1] = 0.5 * re[k];
                }
            }
            Plan::Direct { sin: table, .. } => {
                let len = 2 * n;
                for k in 1..n {
                    let (mut ax, mut ay) = (0.0, 0.0);
                    for i in 1..n {
                        let s = table[(i * k) % len];
                        ax += x[i - 1] * s;
                        ay += y[i - 1] * s;
                    }
                    sx[k - 1] = ax;
                    sy[k - 1] = ay;
                }
            }
        }
    }

    /// Cosine sums of two coefficient sequences at once.
    pub(crate) fn cosine_pair(&self, a: &[f64], b: &[f64], ca: &mut [f64], cb: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(a.len(), n - 1);
        match &self.plan {
            Plan::Fft(fft) => {
                let len = 2 * n;
                let mut re = vec![0.0; len];
                let mut im = vec![0.0; len];
                for k in 1..n {
                    re[k] = a[k - 1];
                    im[k] = b[k - 1];
                    re[len - k] = a[k - 1];
                    im[len - k] = b[k - 1];
                }
                fft.run(&mut re, &mut im);
                for i in 1..n {
                    ca[i - 1] = 0.5 * re[i];
                    cb[i - 1] = 0.5 * im[i];
                }
            }
            Plan::Direct { cos: table, .. } => {
                let len = 2 * n;
                for i in 1..n {
                    let (mut aa, mut ab) = (0.0, 0.0);
                    for k in 1..n {
                        let c = table[(i * k) % len];
                        aa += a[k - 1] * c;
                        ab += b[k - 1] * c;
                    }
                    ca[i - 1] = aa;
                    cb[i - 1] = ab;
                }
            }
        }
    }
}

/// `(cos, sin)` of `2π j / len` for `j < len / 2`, reduced to the first octant
/// so that the table is exactly symmetric.
fn unit_root(j: usize, len: usize) -> (f64, f64) {
    let eighth = len / 8;
    let angle = |m: usize| 2.0 * PI * m as f64 / len as f64;
    if len < 8 {
        let t = angle(j);
        return (libm::cos(t), libm::sin(t));
    }
    let quarter = 2 * eighth;
    if j > quarter {
        let (c, s) = unit_root(len / 2 - j, len);
        return (-c, s);
    }
    if j > eighth {
        let (c, s) = unit_root(quarter - j, len);
        return (s, c);
    }
    let t = angle(j);
    (libm::cos(t), libm::sin(t))
}

/// In-place iterative radix-2 FFT, forward sign `exp(-2πi jk/L)`.
#[derive(Debug, Clone)]
struct Fft {
    len: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
    rev: Vec<u32>,
}

impl Fft {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two() && len >= 2);
        let half = len / 2;
        let (cos, sin) = (0..half)
            .map(|j| {
                let (c, s) = unit_root(j, len);
                (c, -s)
            })
            .unzip();
        let bits = len.trailing_zeros();
        let rev = (0..len as u32).map(|j| j.reverse_bits() >> (32 - bits)).collect();
        Fft { len, cos, sin, rev }
    }

    fn run(&self, re: &mut [f64], im: &mut [f64]) {
        let len = self.len;
        for j in 0..len {
            let r = self.rev[j] as usize;
            if j < r {
                re.swap(j, r);
                im.swap(j, r);
            }
        }
        let mut size = 2;
        while size <= len {
            let half = size / 2;
            let stride = len / size;
            for start in (0..len).step_by(size) {
                for j in 0..half {
                    let (wr, wi) = (self.cos[j * stride], self.sin[j * stride]);
                    let a = start + j;
                    let b = a + half;
                    let tr = re[b] * wr - im[b] * wi;
                    let ti = re[b] * wi + im[b] * wr;
                    re[b] = re[a] - tr;
                    im[b] = im[a] - ti;
                    re[a] += tr;
                    im[a] += ti;
                }
            }
            size *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_sine(x: &[f64], n: usize) -> Vec<f64> {
        (1..n)
            .map(|k| (1..n).map(|i| x[i - 1] * (PI * (i * k) as f64 / n as f64).sin()).sum())
            .collect()
    }

    fn direct_cosine(a: &[f64], n: usize) -> Vec<f64> {
        (1..n)
            .map(|i| (1..n).map(|k| a[k - 1] * (PI * (i * k) as f64 / n as f64).cos()).sum())
            .collect()
    }

    fn sample(n: usize, phase: f64) -> Vec<f64> {
        (1..n).map(|i| ((i as f64) * 0.731 + phase).sin() * (1.0 + 0.1 * i as f64)).collect()
    }

    #[test]
    fn fft_and_direct_paths_agree_with_brute_force() {
        for n in [4usize, 6, 16, 64, 100] {
            let t = Trig::new(n);
            let x = sample(n, 0.3);
            let y = sample(n, 1.7);
            let (mut sx, mut sy) = (vec![0.0; n - 1], vec![0.0; n - 1]);
            t.sine_pair(&x, &y, &mut sx, &mut sy);
            let (ex, ey) = (direct_sine(&x, n), direct_sine(&y, n));
            let (mut cx, mut cy) = (vec![0.0; n - 1], vec![0.0; n - 1]);
            t.cosine_pair(&x, &y, &mut cx, &mut cy);
            let (fx, fy) = (direct_cosine(&x, n), direct_cosine(&y, n));
            for k in 0..n - 1 {
                assert!((sx[k] - ex[k]).abs() < 1e-10 * n as f64, "n={n} k={k}");
                assert!((sy[k] - ey[k]).abs() < 1e-10 * n as f64);
                assert!((cx[k] - fx[k]).abs() < 1e-10 * n as f64);
                assert!((cy[k] - fy[k]).abs() < 1e-10 * n as f64);
            }
        }
    }
}
