//! Enumeration of integer points in Euclidean balls, in shell order.
//!
//! Points are sorted by `|n|^2` and lexicographically within a shell, so
//! every lattice sum in the crate visits terms in the same order and is
//! bit-reproducible.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Integer points `n` with `|n|^2 <= r2_max`, stored flat with stride `g`.
#[derive(Debug)]
pub struct LatticeBall {
    g: usize,
    r2_max: i64,
    coords: Vec<i64>,
    norms2: Vec<i64>,
}

impl LatticeBall {
    fn build(g: usize, r2_max: i64) -> Self {
        let r = (r2_max as f64).sqrt().floor() as i64;
        let mut pts: Vec<(i64, Vec<i64>)> = Vec::new();
        let mut cur = vec![0i64; g];
        fn rec(
            k: usize,
            remaining: i64,
            r: i64,
            cur: &mut Vec<i64>,
            out: &mut Vec<(i64, Vec<i64>)>,
            r2_max: i64,
        ) {
            if k == cur.len() {
                out.push((r2_max - remaining, cur.clone()));
                return;
            }
            for x in -r..=r {
                let sq = x * x;
                if sq <= remaining {
                    cur[k] = x;
                    rec(k + 1, remaining - sq, r, cur, out, r2_max);
                }
            }
            cur[k] = 0;
        }
        rec(0, r2_max, r, &mut cur, &mut pts, r2_max);
        pts.sort();
        let mut coords = Vec::with_capacity(pts.len() * g);
        let mut norms2 = Vec::with_capacity(pts.len());
        for (n2, p) in pts {
            norms2.push(n2);
            coords.extend(p);
        }
        Self {
            g,
            r2_max,
            coords,
            norms2,
        }
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    pub fn len(&self) -> usize {
        self.norms2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms2.is_empty()
    }

    pub fn r2_max(&self) -> i64 {
        self.r2_max
    }

    pub fn point(&self, k: usize) -> &[i64] {
        &self.coords[k * self.g..(k + 1) * self.g]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.coords.chunks_exact(self.g)
    }

    /// Number of distinct shells `|n|^2 = const`.
    pub fn shell_count(&self) -> usize {
        let mut count = 0;
        let mut last = -1;
        for &n2 in &self.norms2 {
            if n2 != last {
                count += 1;
                last = n2;
            }
        }
        count
    }

    /// Position of `n` in the enumeration, if present.
    pub fn index_of(&self, n: &[i64]) -> Option<usize> {
        let n2: i64 = n.iter().map(|x| x * x).sum();
        if n2 > self.r2_max {
            return None;
        }
        let lo = self.norms2.partition_point(|&x| x < n2);
        let hi = self.norms2.partition_point(|&x| x <= n2);
        (lo..hi).find(|&k| self.point(k) == n)
    }
}

const CACHE_LIMIT: usize = 64;

type Cache = Mutex<HashMap<(usize, i64), Arc<LatticeBall>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, cached ball of integer points with `|n| <= radius`.
pub fn ball(g: usize, radius: f64) -> Arc<LatticeBall> {
    let r2_max = (radius * radius).floor() as i64;
    let key = (g, r2_max);
    {
        let guard = cache().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(b) = guard.get(&key) {
            return Arc::clone(b);
        }
    }
    let built = Arc::new(LatticeBall::build(g, r2_max));
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    if guard.len() >= CACHE_LIMIT {
        guard.clear();
    }
    Arc::clone(guard.entry(key).or_insert(built))
}
