//! Evaluation on product sets `S^m` and Taylor correction of values between
//! points that agree modulo `r`.
//!
//! Grid values use the same index convention as polynomial coefficients: the
//! point `(S[i_1], ..., S[i_m])` sits at `sum_j i_j * |S|^(j-1)`.

use std::collections::{HashMap, HashSet};

use crate::arith::{ResidueRing, Ring};
use crate::error::{Error, Result};
use crate::mpoly::{binomial_table, dense_len, enumerate_exps, ExpVec, MultiPoly};

/// Largest number of ring elements a single grid table may hold.
pub const MAX_GRID_ENTRIES: usize = 1 << 26;

/// Values of a polynomial at every point of `S^m`.
#[derive(Clone, Debug)]
pub struct GridEvaluations<R: Ring> {
    pub set: Vec<R::Elem>,
    pub m: usize,
    pub values: Vec<R::Elem>,
}

impl<R: Ring> GridEvaluations<R> {
    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0, |acc, &i| acc * self.set.len() + i)
    }

    pub fn get(&self, coords: &[usize]) -> &R::Elem {
        &self.values[self.index(coords)]
    }
}

fn grid_len(set_len: usize, m: usize, per_point: usize) -> Result<usize> {
    dense_len(m, set_len)
        .and_then(|n| n.checked_mul(per_point))
        .filter(|&n| n <= MAX_GRID_ENTRIES)
        .ok_or_else(|| {
            Error::Resource(format!(
                "grid of {set_len}^{m} points x {per_point} values exceeds {MAX_GRID_ENTRIES} entries"
            ))
        })
}

fn check_set<R: Ring>(set: &[R::Elem]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Usage("evaluation set must be nonempty".into()));
    }
    let distinct: HashSet<&R::Elem> = set.iter().collect();
    if distinct.len() != set.len() {
        return Err(Error::Usage("evaluation set has repeated elements".into()));
    }
    Ok(())
}

/// Evaluates `f` at every point of `S^m`, substituting the last variable first.
pub fn product_set_eval<R: Ring>(f: &MultiPoly<R>, set: &[R::Elem]) -> Result<GridEvaluations<R>> {
    check_set::<R>(set)?;
    grid_len(set.len(), f.m(), 1)?;
    let ring = f.ring();
    let d = f.d();
    let mut data = f.coeffs().to_vec();
    let mut block = data.len();
    for _ in 0..f.m() {
        let stride = block / d;
        let mut next = Vec::with_capacity(data.len() / d * set.len());
        for chunk in data.chunks(block) {
            for a in set {
                let start = next.len();
                next.extend_from_slice(&chunk[(d - 1) * stride..]);
                let out = &mut next[start..];
                for i in (0..d - 1).rev() {
                    let row = &chunk[i * stride..(i + 1) * stride];
                    for (o, c) in out.iter_mut().zip(row) {
                        *o = ring.mul_add(c, o, a);
                    }
                }
            }
        }
        data = next;
        block = stride;
    }
    Ok(GridEvaluations {
        set: set.to_vec(),
        m: f.m(),
        values: data,
    })
}

/// All Hasse derivatives of order at most `k` evaluated on `S_1 x ... x S_m`.
#[derive(Clone, Debug)]
pub struct DerivGrid<R: Ring> {
    /// Derivative exponents, in [`enumerate_exps`] order.
    pub exps: Vec<ExpVec>,
    /// `|S_j|` for each variable.
    pub shape: Vec<usize>,
    /// `values[point * exps.len() + t]` is `∂_{exps[t]} f` at grid point `point`.
    pub values: Vec<R::Elem>,
}

impl<R: Ring> DerivGrid<R> {
    /// Flat index of the point with per-variable positions `coords`.
    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.shape)
            .rev()
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn at(&self, point: usize) -> &[R::Elem] {
        let k = self.exps.len();
        &self.values[point * k..(point + 1) * k]
    }
}

/// [`derivative_grid_sets`] with the same set for every variable.
pub fn derivative_grid<R: Ring>(f: &MultiPoly<R>, set: &[R::Elem], k: usize) -> Result<DerivGrid<R>> {
    let sets: Vec<&[R::Elem]> = vec![set; f.m()];
    derivative_grid_sets(f, &sets, k)
}

/// Computes [`DerivGrid`] by Taylor-expanding one variable at a time, so all
/// derivatives share the work of the earlier variables.
pub fn derivative_grid_sets<R: Ring>(f: &MultiPoly<R>, sets: &[&[R::Elem]], k: usize) -> Result<DerivGrid<R>> {
    let ring = f.ring();
    let (m, d) = (f.m(), f.d());
    if sets.len() != m {
        return Err(Error::Usage(format!("{} sets given for {m} variables", sets.len())));
    }
    for set in sets {
        check_set::<R>(set)?;
    }
    let exps = enumerate_exps(m, k);
    let n_exps = exps.len();
    let shape: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let total = shape
        .iter()
        .try_fold(n_exps, |acc, &n| acc.checked_mul(n))
        .filter(|&n| n <= MAX_GRID_ENTRIES)
        .ok_or_else(|| {
            Error::Resource(format!(
                "grid of shape {shape:?} x {n_exps} values exceeds {MAX_GRID_ENTRIES} entries"
            ))
        })?;
    let base = k + 1;
    let rank: HashMap<usize, usize> = exps
        .iter()
        .enumerate()
        .map(|(t, e)| (e.0.iter().rev().fold(0, |acc, &x| acc * base + x as usize), t))
        .collect();

    let mut values = vec![ring.zero(); total];
    if m == 0 {
        values[0] = f.coeffs()[0].clone();
        return Ok(DerivGrid { exps, shape, values });
    }

    // weights[j][a][e][i] = C(i, e) a^(i - e) for a in S_j
    let binom = binomial_table(ring, d);
    let max_e = k.min(d - 1);
    let weights: Vec<Vec<Vec<Vec<R::Elem>>>> = sets
        .iter()
        .map(|set| {
            set.iter()
                .map(|a| {
                    (0..=max_e)
                        .map(|e| {
                            let mut w = vec![ring.zero(); d];
                            let mut p = ring.one();
                            for i in e..d {
                                w[i] = ring.mul(&binom[i][e], &p);
                                p = ring.mul(&p, a);
                            }
                            w
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    struct Meta {
        grid: usize,
        code: usize,
        weight: usize,
    }
    let mut metas = vec![Meta { grid: 0, code: 0, weight: 0 }];
    let mut data = f.coeffs().to_vec();
    let mut len = data.len();
    let mut grid_scale = 1;
    let mut code_scale = 1;
    for j in 0..m {
        let next_len = len / d;
        let last = j + 1 == m;
        let mut next_metas = Vec::new();
        let mut next_data = Vec::new();
        for (meta, block) in metas.iter().zip(data.chunks(len)) {
            for e in 0..=max_e.min(k - meta.weight) {
                for (ai, w) in weights[j].iter().enumerate() {
                    let grid = meta.grid + ai * grid_scale;
                    let code = meta.code + e * code_scale;
                    if last {
                        let t = rank[&code];
                        values[grid * n_exps + t] = ring.dot(&w[e], block);
                    } else {
                        next_data.extend(block.chunks(d).map(|c| ring.dot(&w[e], c)));
                        next_metas.push(Meta { grid, code, weight: meta.weight + e });
                    }
                }
            }
        }
        metas = next_metas;
        data = next_data;
        len = next_len;
        grid_scale *= shape[j];
        code_scale *= base;
    }
    Ok(DerivGrid { exps, shape, values })
}

/// `δ^e` for every exponent in `exps`.
pub fn delta_monomials<R: Ring>(ring: &R, delta: &[R::Elem], exps: &[ExpVec]) -> Vec<R::Elem> {
    let max = exps.iter().flat_map(|e| e.0.iter()).copied().max().unwrap_or(0) as usize;
    let powers: Vec<Vec<R::Elem>> = delta
        .iter()
        .map(|x| {
            let mut p = Vec::with_capacity(max + 1);
            p.push(ring.one());
            for i in 0..max {
                p.push(ring.mul(&p[i], x));
            }
            p
        })
        .collect();
    exps.iter()
        .map(|e| {
            e.0.iter()
                .zip(&powers)
                .fold(ring.one(), |acc, (&k, p)| ring.mul(&acc, &p[k as usize]))
        })
        .collect()
}

/// Recovers `f(a)` from the Hasse derivatives of `f` at `b`, where `a ≡ b (mod r)`
/// coordinatewise in `Z/r^s Z`; only orders below `s` are used.
pub fn taylor_correction<R: ResidueRing>(
    ring: &R,
    derivs_at_b: &HashMap<ExpVec, R::Elem>,
    a: &[R::Elem],
    b: &[R::Elem],
) -> Result<R::Elem> {
    if a.len() != b.len() {
        return Err(Error::Usage("points have different dimensions".into()));
    }
    let pm = ring.modulus();
    let delta: Vec<R::Elem> = a.iter().zip(b).map(|(x, y)| ring.sub(x, y)).collect();
    for (i, x) in delta.iter().enumerate() {
        let divisible = match pm.r_u64() {
            Some(r) => ring.rem_u64(x, r) == 0,
            None => (ring.to_natural(x) % pm.r()) == num_traits::Zero::zero(),
        };
        if !divisible {
            return Err(Error::Contract(format!(
                "coordinate {i} of a - b is not divisible by {}",
                pm.r()
            )));
        }
    }
    let exps = enumerate_exps(a.len(), pm.s() as usize - 1);
    let monos = delta_monomials(ring, &delta, &exps);
    let mut acc = ring.zero();
    for (e, mono) in exps.iter().zip(&monos) {
        let v = derivs_at_b
            .get(e)
            .ok_or_else(|| Error::Internal(format!("missing derivative value for {e:?}")))?;
        acc = ring.mul_add(&acc, v, mono);
    }
    Ok(acc)
}
