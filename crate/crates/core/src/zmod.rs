//! Linear algebra over the ring ℤ_d.
//!
//! Rows are `Vec<u32>` with entries in `[0, d)`. Membership, solving and kernels go
//! through the Howell form, which is canonical for submodules of ℤ_d^m. Minimal
//! generating sets and the alternating normal form are computed one prime-power
//! component at a time and glued back together with the Chinese remainder theorem.

/// Greatest common divisor of two non-negative integers.
pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b)`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Multiplicative inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = xgcd((a % m) as i128, m as i128);
    (g == 1).then(|| s.rem_euclid(m as i128) as u64)
}

pub fn is_prime(d: u32) -> bool {
    d >= 2 && (2..).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

/// Prime-power factorisation `d = ∏ p^e`, returned as `(p, e, p^e)` in increasing `p`.
pub fn factor(d: u32) -> Vec<(u64, u32, u64)> {
    let mut out = Vec::new();
    let mut n = d as u64;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            let mut pe = 1;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
                pe *= p;
            }
            out.push((p, e, pe));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1, n));
    }
    out
}

/// Chinese remainder reconstruction from pairwise coprime moduli.
pub fn crt(parts: &[(u64, u64)]) -> u64 {
    let modulus: u64 = parts.iter().map(|&(_, m)| m).product();
    let mut acc: u128 = 0;
    for &(r, m) in parts {
        let big = modulus / m;
        let inv = inv_mod(big % m, m).expect("moduli must be coprime");
        acc = (acc + (r % m) as u128 * big as u128 % modulus as u128 * inv as u128) % modulus as u128;
    }
    acc as u64
}

fn reduce_row(row: &[u32], m: u64) -> Vec<u64> {
    row.iter().map(|&v| v as u64 % m).collect()
}

fn to_u32(row: Vec<u64>) -> Vec<u32> {
    row.into_iter().map(|v| v as u32).collect()
}

fn is_zero(row: &[u64]) -> bool {
    row.iter().all(|&v| v == 0)
}

/// Smallest unit `u` of ℤ_d with `u * a ≡ gcd(a, d) (mod d)`.
fn normalizing_unit(a: u64, d: u64) -> u64 {
    let g = gcd(a, d);
    (1..d.max(2))
        .find(|&u| gcd(u, d) == 1 && (u * a) % d == g % d)
        .unwrap_or(1)
}

/// Howell form of the row span of `rows` (each of length `ncols`) over ℤ_d.
///
/// Rows come back in pivot order; pivots divide `d`, entries above a pivot are reduced
/// below it, and the span of rows with pivot column `≥ j` equals the set of span
/// elements whose first `j` entries vanish.
pub fn howell_form(rows: &[Vec<u32>], ncols: usize, d: u32) -> Vec<Vec<u32>> {
    let m = d as u64;
    let mut pool: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "row length mismatch");
            reduce_row(r, m)
        })
        .filter(|r| !is_zero(r))
        .collect();
    let mut out: Vec<Vec<u64>> = Vec::new();
    for c in 0..ncols {
        let mut piv: Option<Vec<u64>> = None;
        let mut rest = Vec::with_capacity(pool.len());
        for row in pool.drain(..) {
            if row[c] == 0 {
                rest.push(row);
                continue;
            }
            match piv.take() {
                None => piv = Some(row),
                Some(p) => {
                    let (a, b) = (p[c] as i128, row[c] as i128);
                    let (g, s, t) = xgcd(a, b);
                    let (u, v) = (-b / g, a / g);
                    let mi = m as i128;
                    let new_p: Vec<u64> = p
                        .iter()
                        .zip(&row)
                        .map(|(&x, &y)| (s * x as i128 + t * y as i128).rem_euclid(mi) as u64)
                        .collect();
                    let new_r: Vec<u64> = p
                        .iter()
                        .zip(&row)
                        .map(|(&x, &y)| (u * x as i128 + v * y as i128).rem_euclid(mi) as u64)
                        .collect();
                    if !is_zero(&new_r) {
                        rest.push(new_r);
                    }
                    if new_p[c] == 0 {
                        if !is_zero(&new_p) {
                            rest.push(new_p);
                        }
                    } else {
                        piv = Some(new_p);
                    }
                }
            }
        }
        pool = rest;
        let Some(mut p) = piv else { continue };
        let u = normalizing_unit(p[c], m);
        for v in p.iter_mut() {
            *v = (*v * u) % m;
        }
        let ann = m / p[c];
        if ann != m {
            let arow: Vec<u64> = p.iter().map(|&v| (v * ann) % m).collect();
            if !is_zero(&arow) {
                pool.push(arow);
            }
        }
        for o in out.iter_mut() {
            let q = o[c] / p[c];
            if q != 0 {
                for (ov, &pv) in o.iter_mut().zip(&p) {
                    *ov = (*ov + m - (q * pv) % m) % m;
                }
            }
        }
        out.push(p);
    }
    out.into_iter().map(to_u32).collect()
}

fn pivot_col(row: &[u32]) -> Option<usize> {
    row.iter().position(|&v| v != 0)
}

/// Reduces `v` against a Howell basis, using only rows whose pivot is `< limit`.
/// Returns the remainder; `v` is in the span iff the remainder is zero (with `limit = ncols`).
pub fn howell_reduce(h: &[Vec<u32>], v: &[u32], d: u32, limit: usize) -> Vec<u32> {
    let m = d as u64;
    let mut w = reduce_row(v, m);
    for row in h {
        let Some(c) = pivot_col(row) else { continue };
        if c >= limit {
            break;
        }
        let p = row[c] as u64;
        if !w[c].is_multiple_of(p) {
            return to_u32(w);
        }
        let q = w[c] / p;
        if q != 0 {
            for (wv, &rv) in w.iter_mut().zip(row) {
                *wv = (*wv + m - (q * rv as u64) % m) % m;
            }
        }
    }
    to_u32(w)
}

/// Whether `v` lies in the ℤ_d row span of `rows`.
pub fn in_span(rows: &[Vec<u32>], v: &[u32], d: u32) -> bool {
    let h = howell_form(rows, v.len(), d);
    howell_reduce(&h, v, d, v.len()).iter().all(|&x| x == 0)
}

fn augmented(rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
    let k = rows.len();
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let mut a = r.clone();
            a.resize(ncols + k, 0);
            a[ncols + i] = 1;
            a
        })
        .collect()
}

/// Finds `x` with `Σ x_i · rows_i = v` over ℤ_d.
pub fn solve_left(rows: &[Vec<u32>], v: &[u32], d: u32) -> Option<Vec<u32>> {
    let ncols = v.len();
    let k = rows.len();
    if k == 0 {
        return v.iter().all(|&x| (x as u64).is_multiple_of(d as u64)).then(Vec::new);
    }
    if is_prime(d) {
        return solve_left_field(rows, v, d);
    }
    let h = howell_form(&augmented(rows, ncols), ncols + k, d);
    let mut target = v.to_vec();
    target.resize(ncols + k, 0);
    let rem = howell_reduce(&h, &target, d, ncols);
    if rem[..ncols].iter().any(|&x| x != 0) {
        return None;
    }
    Some(rem[ncols..].iter().map(|&w| (d - w % d) % d).collect())
}

/// [`solve_left`] over the field `ℤ_p`: plain elimination on `[rows | I]`.
fn solve_left_field(rows: &[Vec<u32>], v: &[u32], p: u32) -> Option<Vec<u32>> {
    let m = p as u64;
    let ncols = v.len();
    let k = rows.len();
    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::with_capacity(k);
    for (i, r) in rows.iter().enumerate() {
        let mut row: Vec<u64> = r.iter().map(|&x| x as u64 % m).collect();
        row.resize(ncols + k, 0);
        row[ncols + i] = 1;
        for (c, prow) in &pivots {
            let f = row[*c];
            if f != 0 {
                for (a, &b) in row.iter_mut().zip(prow) {
                    *a = (*a + (m - f) * b) % m;
                }
            }
        }
        // A dependent row only pivots in the identity block and cannot help hit `v`.
        let Some(c) = row[..ncols].iter().position(|&x| x != 0) else { continue };
        let inv = inv_mod(row[c], m).expect("field element");
        for a in row.iter_mut() {
            *a = *a * inv % m;
        }
        pivots.push((c, row));
    }
    let mut target: Vec<u64> = v.iter().map(|&x| x as u64 % m).collect();
    target.resize(ncols + k, 0);
    for (c, prow) in &pivots {
        let f = target[*c];
        if f != 0 {
            for (a, &b) in target.iter_mut().zip(prow) {
                *a = (*a + (m - f) * b) % m;
            }
        }
    }
    if target[..ncols].iter().any(|&x| x != 0) {
        return None;
    }
    Some(target[ncols..].iter().map(|&w| ((m - w) % m) as u32).collect())
}

/// Generators of the left kernel `{x : Σ x_i · rows_i = 0}` over ℤ_d.
pub fn left_kernel(rows: &[Vec<u32>], ncols: usize, d: u32) -> Vec<Vec<u32>> {
    let k = rows.len();
    if k == 0 {
        return Vec::new();
    }
    howell_form(&augmented(rows, ncols), ncols + k, d)
        .into_iter()
        .filter(|r| pivot_col(r).is_some_and(|c| c >= ncols))
        .map(|r| r[ncols..].to_vec())
        .collect()
}

fn valuation(x: u64, p: u64, e: u32) -> u32 {
    if x == 0 {
        return e;
    }
    let mut v = 0;
    let mut y = x;
    while y.is_multiple_of(p) {
        y /= p;
        v += 1;
    }
    v
}

/// Solves `q * c ≡ x (mod p^e)` when `val(x) ≥ val(c)`.
fn local_div(x: u64, c: u64, p: u64, e: u32, m: u64) -> u64 {
    let v = valuation(c, p, e);
    let pv = p.pow(v);
    let unit = inv_mod((c / pv) % m, m).expect("unit part is invertible");
    ((x / pv) % m) * unit % m
}

/// Echelon rows of a submodule of (ℤ_{p^e})^n, found by full valuation pivoting.
/// The number of rows equals the minimal number of generators of the span.
fn local_echelon(rows: &[Vec<u64>], p: u64, e: u32, m: u64) -> Vec<Vec<u64>> {
    let mut work: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v % m).collect::<Vec<u64>>())
        .filter(|r| !is_zero(r))
        .collect();
    let mut out = Vec::new();
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, r) in work.iter().enumerate() {
            for (c, &v) in r.iter().enumerate() {
                if v != 0 {
                    let val = valuation(v, p, e);
                    if best.is_none_or(|(bv, _, _)| val < bv) {
                        best = Some((val, i, c));
                    }
                }
            }
        }
        let Some((_, i, c)) = best else { break };
        let piv = work.swap_remove(i);
        for r in work.iter_mut() {
            if r[c] != 0 {
                let q = local_div(r[c], piv[c], p, e, m);
                for (rv, &pv) in r.iter_mut().zip(&piv) {
                    *rv = (*rv + m - (q * pv) % m) % m;
                }
            }
        }
        work.retain(|r| !is_zero(r));
        out.push(piv);
    }
    out
}

/// A minimal generating set of the ℤ_d row span of `rows`.
pub fn min_generators(rows: &[Vec<u32>], ncols: usize, d: u32) -> Vec<Vec<u32>> {
    let comps: Vec<(u64, Vec<Vec<u64>>)> = factor(d)
        .into_iter()
        .map(|(p, e, pe)| {
            let local: Vec<Vec<u64>> = rows.iter().map(|r| reduce_row(r, pe)).collect();
            (pe, local_echelon(&local, p, e, pe))
        })
        .collect();
    let count = comps.iter().map(|(_, r)| r.len()).max().unwrap_or(0);
    (0..count)
        .map(|i| {
            (0..ncols)
                .map(|c| {
                    let parts: Vec<(u64, u64)> = comps
                        .iter()
                        .map(|(pe, r)| (r.get(i).map_or(0, |row| row[c]), *pe))
                        .collect();
                    crt(&parts) as u32
                })
                .collect()
        })
        .collect()
}

/// Invariant factors of an integer matrix (Smith normal form diagonal, nonzero entries only).
pub fn smith_invariants(mat: &[Vec<i128>]) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = mat.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pick the smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for r in a.iter_mut() {
            r.swap(t, bj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for r in a.iter_mut().skip(t) {
                        r[j] -= q * r[t];
                    }
                }
                if a[t][j] != 0 {
                    for r in a.iter_mut() {
                        r.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility condition for the trailing block
            let piv = a[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % piv != 0));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j];
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Minimal number of generators of the column module of `c` over ℤ_d, read off the Smith
/// form of the integer lift augmented with `d·I`.
pub fn theta(c: &[Vec<u32>], d: u32) -> usize {
    let k = c.len();
    if k == 0 {
        return 0;
    }
    let mat: Vec<Vec<i128>> = (0..k)
        .map(|i| {
            let mut row: Vec<i128> = c[i].iter().map(|&v| v as i128).collect();
            row.extend((0..k).map(|j| if i == j { d as i128 } else { 0 }));
            row
        })
        .collect();
    smith_invariants(&mat).into_iter().filter(|&e| e % d as i128 != 0).count()
}

/// Result of bringing an alternating form over ℤ_d into symplectic block form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingForm {
    /// Change-of-basis rows: new vector `i` is `Σ_j basis[i][j] e_j`.
    pub basis: Vec<Vec<u32>>,
    /// Number of paired blocks; vectors `2m, 2m+1` for `m < pairs` form block `m`.
    pub pairs: usize,
}

fn form_value(c: &[Vec<u64>], x: &[u64], y: &[u64], m: u64) -> u64 {
    let mut acc = 0u64;
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            if yj != 0 {
                acc = (acc + xi * c[i][j] % m * yj) % m;
            }
        }
    }
    acc
}

/// Symplectic Gram–Schmidt for an alternating matrix `c` (`c[i][j] = -c[j][i]`, zero diagonal).
///
/// The returned basis `L` is invertible over ℤ_d and `L c Lᵀ` is block diagonal with
/// `pairs` nonzero 2×2 antisymmetric blocks first and zeros afterwards. `2 * pairs`
/// equals [`theta`] of `c`.
pub fn alternating_normal_form(c: &[Vec<u32>], d: u32) -> AlternatingForm {
    let k = c.len();
    let mut comps: Vec<(u64, Vec<Vec<u64>>, usize)> = Vec::new();
    for (p, e, pe) in factor(d) {
        let cm: Vec<Vec<u64>> = c.iter().map(|r| reduce_row(r, pe)).collect();
        let mut rem: Vec<Vec<u64>> = (0..k)
            .map(|i| (0..k).map(|j| u64::from(i == j)).collect())
            .collect();
        let mut ordered: Vec<Vec<u64>> = Vec::with_capacity(k);
        let mut pairs = 0;
        loop {
            let mut best: Option<(u32, usize, usize)> = None;
            for i in 0..rem.len() {
                for j in i + 1..rem.len() {
                    let v = form_value(&cm, &rem[i], &rem[j], pe);
                    if v != 0 {
                        let val = valuation(v, p, e);
                        if best.is_none_or(|(bv, _, _)| val < bv) {
                            best = Some((val, i, j));
                        }
                    }
                }
            }
            let Some((_, i, j)) = best else { break };
            let bj = rem.remove(j);
            let bi = rem.remove(i);
            let cij = form_value(&cm, &bi, &bj, pe);
            let cji = (pe - cij) % pe;
            for bk in rem.iter_mut() {
                let ki = form_value(&cm, bk, &bi, pe);
                let kj = form_value(&cm, bk, &bj, pe);
                let beta = if ki == 0 { 0 } else { local_div(ki, cji, p, e, pe) };
                let alpha = if kj == 0 { 0 } else { local_div(kj, cij, p, e, pe) };
                for t in 0..k {
                    bk[t] = (bk[t] + 2 * pe - (beta * bj[t]) % pe - (alpha * bi[t]) % pe) % pe;
                }
            }
            ordered.push(bi);
            ordered.push(bj);
            pairs += 1;
        }
        ordered.extend(rem);
        comps.push((pe, ordered, pairs));
    }
    let pairs = comps.iter().map(|(_, _, r)| *r).max().unwrap_or(0);
    // Components with fewer pairs place central vectors in the padding slots.
    let basis = (0..k)
        .map(|i| {
            (0..k)
                .map(|t| {
                    let parts: Vec<(u64, u64)> = comps.iter().map(|(pe, rows, _)| (rows[i][t], *pe)).collect();
                    crt(&parts) as u32
                })
                .collect()
        })
        .collect();
    AlternatingForm { basis, pairs }
}

/// Matrix product `a · b` over ℤ_d.
pub fn mat_mul(a: &[Vec<u32>], b: &[Vec<u32>], d: u32) -> Vec<Vec<u32>> {
    let m = d as u64;
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| ((0..inner).map(|t| row[t] as u64 * b[t][j] as u64 % m).sum::<u64>() % m) as u32)
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}
