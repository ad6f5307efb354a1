//! Kernel field over barcode distances, the partial-sum U-process, and the
//! self-normalized change-point statistics.

mod kernel;
mod process;
mod stats;

pub use kernel::{grid_index, KernelField, RadiusGrid};
pub use process::{partial_sum, u_at, u_process, var_v1v2, var_vl, var_vt, Centering, Variance};
pub use stats::{
    compute_statistic, stat_dl, stat_dmax, stat_q, trimmed_range, Argmax, DegeneratePolicy,
    StatisticId, StatisticValue,
};

/// Plot-ready `(u, r, U_T(u, r))` surface on the canonical grids, as CSV.
pub fn surface_csv(k: &KernelField) -> String {
    let t = k.len();
    let mut out = String::from("u,r,U\n");
    for (ri, &r) in k.grid().values().iter().enumerate() {
        for step in 0..=t {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::ingest::format_real(step as f64 / t as f64),
                crate::ingest::format_real(r),
                crate::ingest::format_real(u_at(k, ri, step))
            ));
        }
    }
    out
}
