//! Slow, direct reference implementations used as test oracles.
#![allow(dead_code)]

/// Euclidean distance rows for a list of points.
pub fn distance_rows(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .collect()
        })
        .collect()
}

/// Every vertex subset of size `1..=max_size` with diameter `<= r_max`,
/// as (sorted vertices, diameter).
pub fn rips_subsets(d: &[Vec<f64>], max_size: usize, r_max: f64) -> Vec<(Vec<usize>, f64)> {
    let n = d.len();
    assert!(n <= 20);
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > max_size {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut diam = 0.0f64;
        for (a, &i) in verts.iter().enumerate() {
            for &j in &verts[a + 1..] {
                diam = diam.max(d[i][j]);
            }
        }
        if diam <= r_max {
            out.push((verts, diam));
        }
    }
    out
}

/// Persistence pairs of the Rips filtration by plain left-to-right column
/// reduction of the full boundary matrix (no clearing, no cohomology).
/// Returns, per dimension `0..=max_dim`, the sorted multiset of nonzero
/// bars, with `f64::INFINITY` for essential classes.
pub fn naive_rips_bars(d: &[Vec<f64>], max_dim: usize, r_max: f64) -> Vec<Vec<(f64, f64)>> {
    let mut simplices = rips_subsets(d, max_dim + 2, r_max);
    simplices.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap()
            .then(a.0.len().cmp(&b.0.len()))
            .then(a.0.cmp(&b.0))
    });
    let index: std::collections::HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (v.clone(), i))
        .collect();
    let m = simplices.len();
    let mut columns: Vec<Vec<bool>> = simplices
        .iter()
        .map(|(v, _)| {
            let mut col = vec![false; m];
            if v.len() > 1 {
                for skip in 0..v.len() {
                    let face: Vec<usize> = v
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    col[index[&face]] = true;
                }
            }
            col
        })
        .collect();
    let low = |col: &Vec<bool>| col.iter().rposition(|&x| x);
    let mut low_owner: Vec<Option<usize>> = vec![None; m];
    let mut paired = vec![false; m];
    let mut bars = vec![Vec::new(); max_dim + 1];
    for j in 0..m {
        loop {
            match low(&columns[j]) {
                Some(l) => match low_owner[l] {
                    Some(k) => {
                        let other = columns[k].clone();
                        for (x, y) in columns[j].iter_mut().zip(other) {
                            *x ^= y;
                        }
                    }
                    None => {
                        low_owner[l] = Some(j);
                        paired[l] = true;
                        paired[j] = true;
                        let dim = simplices[l].0.len() - 1;
                        let (b, e) = (simplices[l].1, simplices[j].1);
                        if dim <= max_dim && e > b {
                            bars[dim].push((b, e));
                        }
                        break;
                    }
                },
                None => break,
            }
        }
    }
    for (i, (v, value)) in simplices.iter().enumerate() {
        let dim = v.len() - 1;
        if !paired[i] && dim <= max_dim {
            bars[dim].push((*value, f64::INFINITY));
        }
    }
    for b in &mut bars {
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    }
    bars
}

pub fn sup_norm(a: (f64, f64), b: (f64, f64)) -> f64 {
    let db = (a.0 - b.0).abs();
    let dd = if a.1.is_infinite() && b.1.is_infinite() {
        0.0
    } else {
        (a.1 - b.1).abs()
    };
    db.max(dd)
}

pub fn half_persistence(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Bottleneck distance by enumerating every partial matching.
pub fn exhaustive_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn go(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if acc >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&p, _)| half_persistence(p))
                .fold(0.0f64, f64::max);
            *best = best.min(acc.max(rest));
            return;
        }
        go(i + 1, a, b, used, acc.max(half_persistence(a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, acc.max(sup_norm(a[i], b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// q-Wasserstein distance by trying every bijection of the diagrams
/// augmented with each other's diagonal projections.
pub fn permutation_wasserstein(a: &[(f64, f64)], b: &[(f64, f64)], q: f64) -> f64 {
    // Slots 0..na are points of a, na..na+nb the diagonal images of b.
    let na = a.len();
    let nb = b.len();
    let n = na + nb;
    let cost = |i: usize, j: usize| -> f64 {
        match (i < na, j < nb) {
            (true, true) => sup_norm(a[i], b[j]).powf(q),
            (true, false) => half_persistence(a[i]).powf(q),
            (false, true) => half_persistence(b[j]).powf(q),
            (false, false) => 0.0,
        }
    };
    fn go(i: usize, n: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64, cost: &dyn Fn(usize, usize) -> f64) {
        if acc >= *best {
            return;
        }
        if i == n {
            *best = acc;
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                go(i + 1, n, used, acc + cost(i, j), best, cost);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, n, &mut vec![false; n], 0.0, &mut best, &cost);
    best.powf(1.0 / q)
}

/// `h(t, s, r)` straight from the distances.
pub fn kernel(d: &[Vec<f64>], t: usize, s: usize, r: f64) -> u64 {
    (d[t][s] <= r) as u64
}

/// `Σ_{s,t < k} h` by a double loop (0-based, first `k` times).
pub fn block_count(d: &[Vec<f64>], k: usize, r: f64) -> u64 {
    let mut n = 0;
    for t in 0..k {
        for s in 0..k {
            n += kernel(d, t, s, r);
        }
    }
    n
}

/// `Σ_{s,t >= k} h` (0-based, times `k..T`).
pub fn tail_count(d: &[Vec<f64>], k: usize, r: f64) -> u64 {
    let mut n = 0;
    for t in k..d.len() {
        for s in k..d.len() {
            n += kernel(d, t, s, r);
        }
    }
    n
}

pub fn s_oracle(d: &[Vec<f64>], k: usize, r: f64) -> f64 {
    let t = d.len() as f64;
    block_count(d, k, r) as f64 / (t * t)
}

pub fn u_oracle(d: &[Vec<f64>], k: usize, r: f64) -> f64 {
    let t = d.len();
    let u = k as f64 / t as f64;
    s_oracle(d, k, r) - u * u * s_oracle(d, t, r)
}

/// `V_T(r)` with every sum written out.
pub fn vt_oracle(d: &[Vec<f64>], r: f64) -> f64 {
    let t = d.len();
    let tf = t as f64;
    let mean = block_count(d, t, r) as f64 / (tf * tf);
    let mut total = 0.0;
    for k in 1..=t {
        let mut inner = 0.0;
        for a in 0..k {
            for b in 0..k {
                inner += kernel(d, a, b, r) as f64 - mean;
            }
        }
        total += inner * inner / tf.powi(3);
    }
    total / tf
}

/// `V^L_T` over the given radii with spacing `r_max / R`.
pub fn vl_oracle(d: &[Vec<f64>], radii: &[f64], r_max: f64) -> f64 {
    let t = d.len();
    let tf = t as f64;
    let mut total = 0.0;
    for &r in radii {
        let mean = block_count(d, t, r) as f64 / (tf * tf);
        let mut inner_sum = 0.0;
        for k in 1..=t {
            let mut inner = 0.0;
            for a in 0..k {
                for b in 0..k {
                    inner += kernel(d, a, b, r) as f64 - mean;
                }
            }
            inner_sum += inner.powi(4) / tf.powi(6);
        }
        total += (inner_sum / tf).sqrt();
    }
    r_max / radii.len() as f64 * total
}

/// `(V_1, V_2)` at split `k` (1-based, `1 <= k <= T-1`). The weights are
/// multiplied through so that vanishing contrasts come out as exact zeros.
pub fn v1v2_oracle(d: &[Vec<f64>], k: usize, r: f64) -> (f64, f64) {
    let t = d.len();
    let t4 = (t as f64).powi(4);
    let kk = (k * k) as f64;
    let mut v1 = 0.0;
    for i in 1..=k {
        let x = (kk * block_count(d, i, r) as f64 - (i * i) as f64 * block_count(d, k, r) as f64) / kk;
        v1 += x * x;
    }
    let tail = ((t - k) * (t - k)) as f64;
    let mut v2 = 0.0;
    for i in (k + 1)..=t {
        let rest = ((t - i) * (t - i)) as f64;
        let x = (tail * tail_count(d, i, r) as f64 - rest * tail_count(d, k, r) as f64) / tail;
        v2 += x * x;
    }
    (v1 / t4, v2 / t4)
}

/// Smallest number of closed `radius`-balls centred at points that cover
/// everything, by trying subsets in order of size.
pub fn optimal_cover_size(d: &[Vec<f64>], radius: f64) -> usize {
    let n = d.len();
    for size in 1..=n {
        let mut found = false;
        for_each_subset(n, size, &mut |centers| {
            if !found && (0..n).all(|j| centers.iter().any(|&c| d[c][j] <= radius)) {
                found = true;
            }
        });
        if found {
            return size;
        }
    }
    n
}

/// Optimal k-center radius over all `k`-subsets.
pub fn optimal_k_center(d: &[Vec<f64>], k: usize) -> f64 {
    let n = d.len();
    let mut best = f64::INFINITY;
    for_each_subset(n, k, &mut |centers| {
        let r = (0..n)
            .map(|j| centers.iter().map(|&c| d[c][j]).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        best = best.min(r);
    });
    best
}

pub fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::new(), f);
}
