//! Partial-sum process, U-process and the self-normalizers built from them.
//!
//! Every quantity here is a function of the integer pair counts kept by
//! [`KernelField`]; indicator sums are accumulated exactly and only divided
//! at the end. The normalizers are invariant under shifting the kernel by a
//! constant, so centring `h` by its grand mean (the `demeaned` variants)
//! yields the same values as the raw kernel.

use super::kernel::{grid_index, KernelField};
use crate::error::{Error, Result};

/// A variance-type normalizer together with an exact degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variance {
    pub value: f64,
    /// True when the normalizer is exactly zero (the kernel's partial sums
    /// carry no fluctuation).
    pub degenerate: bool,
}

impl Variance {
    fn new(value: f64, degenerate: bool) -> Self {
        Self { value, degenerate }
    }
}

/// Kernel centring applied before forming the normalizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    /// Use `h` as is (the null-hypothesis form used by the tests).
    #[default]
    Raw,
    /// Subtract the grand mean of `h` (diagnostic form).
    GrandMean,
}

/// `S_T(u, r) = T^-2 Σ_{s,t <= ⌊uT⌋} h(t, s, r)`.
pub fn partial_sum(k: &KernelField, u: f64, r: f64) -> Result<f64> {
    let t = k.len();
    let idx = grid_index(u, t)?;
    Ok(k.forward_count_at(r, idx) as f64 / (t * t) as f64)
}

/// `U_T(u, r) = S_T(u, r) - u^2 S_T(1, r)` with `u` snapped to `⌊uT⌋ / T`.
pub fn u_process(k: &KernelField, u: f64, r: f64) -> Result<f64> {
    let t = k.len() as i128;
    let idx = grid_index(u, k.len())? as i128;
    // T^4 U = T^2 N_k - k^2 N_T, exact in integers.
    let n_k = k.forward_count_at(r, idx as usize) as i128;
    let n_t = k.forward_count_at(r, k.len()) as i128;
    let scaled = t * t * n_k - idx * idx * n_t;
    Ok(scaled as f64 / (t * t * t * t) as f64)
}

/// `U_T(k / T, r_i)` on the canonical grid.
pub fn u_at(k: &KernelField, ri: usize, step: usize) -> f64 {
    let t = k.len() as f64;
    k.centered(ri, step) as f64 / (t * t * t * t)
}

fn require_len(k: &KernelField) -> Result<()> {
    if k.len() < 2 {
        return Err(Error::input(format!(
            "self-normalizers need T >= 2, got T = {}",
            k.len()
        )));
    }
    Ok(())
}

/// `V_T(r_i) = T^-1 Σ_k T^-3 [Σ_{s,t<=k} (g - mean g)]^2`.
pub fn var_vt(k: &KernelField, ri: usize, _centering: Centering) -> Result<Variance> {
    require_len(k)?;
    let t = k.len();
    // The bracket equals (T^2 N_k - k^2 N_T) / T^2, so V = Σ_k c_k^2 / T^8.
    let mut sum: i128 = 0;
    for step in 1..=t {
        let c = k.centered(ri, step);
        sum += c * c;
    }
    let t8 = (t as f64).powi(8);
    Ok(Variance::new(sum as f64 / t8, sum == 0))
}

/// `V^L_T = (R_max / R) Σ_i (T^-1 Σ_k T^-6 [Σ_{s,t<=k} (g - mean g)]^4)^{1/2}`
/// over the configured radius grid of `R` points.
pub fn var_vl(k: &KernelField, _centering: Centering) -> Result<Variance> {
    require_len(k)?;
    let grid = k.grid();
    let mut total = 0.0;
    let mut all_zero = true;
    for ri in 0..grid.len() {
        let (inner, zero) = vl_radius_term(k, ri);
        all_zero &= zero;
        total += inner;
    }
    Ok(Variance::new(
        grid.r_max() / grid.len() as f64 * total,
        all_zero,
    ))
}

/// `(T^-1 Σ_k T^-6 [bracket]^4)^{1/2} = (T Σ_k U_k^4)^{1/2}` for one radius.
pub(crate) fn vl_radius_term(k: &KernelField, ri: usize) -> (f64, bool) {
    let t = k.len();
    let mut quartic = 0.0;
    let mut zero = true;
    for step in 1..=t {
        let c = k.centered(ri, step);
        zero &= c == 0;
        let u = u_at(k, ri, step);
        quartic += u * u * u * u;
    }
    ((t as f64 * quartic).sqrt(), zero)
}

/// Forward and backward self-normalizers `(V_{1,T}(k, r_i), V_{2,T}(k, r_i))`.
///
/// `V_1 = T^-4 Σ_{i=1}^{k} (Σ_{s,t<=i} g - (i/k)^2 Σ_{s,t<=k} g)^2`,
/// `V_2 = T^-4 Σ_{i=k+1}^{T} (Σ_{s,t>i} g - ((T-i)/(T-k))^2 Σ_{s,t>k} g)^2`,
/// with empty inner sums equal to zero.
pub fn var_v1v2(
    k: &KernelField,
    step: usize,
    ri: usize,
    _centering: Centering,
) -> Result<(Variance, Variance)> {
    let t = k.len();
    if step == 0 || step >= t {
        return Err(Error::input(format!("k must be in 1..={}, got {step}", t.saturating_sub(1))));
    }
    let t4 = (t as f64).powi(4);

    let kk = step as i128;
    let n_k = k.forward_count(ri, step) as i128;
    let mut v1 = 0.0;
    let mut v1_zero = true;
    for i in 1..=step {
        // k^2 N_i - i^2 N_k, exact.
        let a = kk * kk * k.forward_count(ri, i) as i128 - (i as i128).pow(2) * n_k;
        v1_zero &= a == 0;
        let x = a as f64 / (kk * kk) as f64;
        v1 += x * x;
    }

    let tail = (t - step) as i128;
    let b_k = k.backward_count(ri, step) as i128;
    let mut v2 = 0.0;
    let mut v2_zero = true;
    for i in (step + 1)..=t {
        let rest = (t - i) as i128;
        let a = tail * tail * k.backward_count(ri, i) as i128 - rest * rest * b_k;
        v2_zero &= a == 0;
        let x = a as f64 / (tail * tail) as f64;
        v2 += x * x;
    }
    Ok((
        Variance::new(v1 / t4, v1_zero),
        Variance::new(v2 / t4, v2_zero),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::change::kernel::RadiusGrid;
    use crate::metrics::BarcodeDistanceMatrix;

    fn constant_field(t: usize) -> KernelField {
        let d = BarcodeDistanceMatrix::from_row_major(1, t, {
            let mut v = vec![0.5; t * t];
            for i in 0..t {
                v[i * t + i] = 0.0;
            }
            v
        })
        .unwrap();
        KernelField::new(d, RadiusGrid::new(1.0, vec![1.0]).unwrap()).unwrap()
    }

    #[test]
    fn empty_and_full_sums() {
        let k = constant_field(5);
        assert_eq!(partial_sum(&k, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(partial_sum(&k, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(u_process(&k, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(u_process(&k, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_kernel_is_degenerate() {
        let k = constant_field(6);
        let v = var_vt(&k, 0, Centering::Raw).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.degenerate);
        let vl = var_vl(&k, Centering::Raw).unwrap();
        assert!(vl.degenerate);
        for step in 1..6 {
            let (v1, v2) = var_v1v2(&k, step, 0, Centering::Raw).unwrap();
            assert_eq!((v1.value, v2.value), (0.0, 0.0));
        }
    }

    #[test]
    fn preconditions() {
        let k = constant_field(1);
        assert!(var_vt(&k, 0, Centering::Raw).is_err());
        assert!(var_vl(&k, Centering::Raw).is_err());
        let k = constant_field(4);
        assert!(var_v1v2(&k, 0, 0, Centering::Raw).is_err());
        assert!(var_v1v2(&k, 4, 0, Centering::Raw).is_err());
    }

    #[test]
    fn last_backward_term_is_empty() {
        // Distinct barcodes, radius below every distance: only the diagonal counts.
        let t = 4;
        let mut v = vec![1.0; t * t];
        for i in 0..t {
            v[i * t + i] = 0.0;
        }
        let d = BarcodeDistanceMatrix::from_row_major(1, t, v).unwrap();
        let k = KernelField::new(d, RadiusGrid::new(1.0, vec![0.5, 1.0]).unwrap()).unwrap();
        let (_, v2) = var_v1v2(&k, t - 1, 0, Centering::Raw).unwrap();
        // Single term i = T: empty sum minus 0^2 * (...) = 0.
        assert_eq!(v2.value, 0.0);
    }
}
