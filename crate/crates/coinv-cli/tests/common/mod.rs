//! Reference implementations for the acceptance suite. Everything here is
//! deliberately independent of the library's Smith-normal-form code path:
//! rank and determinantal divisors come from literal minor enumeration, and
//! the quotient group is enumerated element by element.

use std::collections::HashSet;

/// Free rank and torsion invariant factors (each > 1, divisibility chain)
/// of `Z^ambient / rowspan(rows)`, by brute force.
///
/// Route: rank `r` and the determinantal divisors `D_r`, `D_{r-1}` come
/// from enumerating all minors; `d = D_r / D_{r-1}` is the largest
/// invariant factor, so every torsion factor divides `d` and the finite
/// group `F = Z_d^ambient / (rows mod d) ≅ Z_d^{free} ⊕ T` can be
/// enumerated literally. The invariant factors of `F` are recovered by
/// counting solutions of `p^j · x = 0`, and the `free` trailing copies of
/// `Z_d` are stripped off.
pub fn brute_cokernel(rows: &[Vec<i64>], ambient: usize) -> (usize, Vec<u64>) {
    assert!(rows.iter().all(|r| r.len() == ambient));
    let r = rank_by_minors(rows, ambient);
    let free = ambient - r;
    if r == 0 {
        return (free, Vec::new());
    }
    let d_r = gcd_of_minors(rows, ambient, r);
    let d_r1 = if r == 1 {
        1
    } else {
        gcd_of_minors(rows, ambient, r - 1)
    };
    assert!(d_r1 > 0 && d_r.is_multiple_of(d_r1));
    let d = d_r / d_r1;
    if d == 1 {
        return (free, Vec::new());
    }
    let mut chain = finite_quotient_invariant_factors(rows, ambient, d);
    for _ in 0..free {
        assert_eq!(chain.pop(), Some(d), "free part contributes copies of Z_d");
    }
    (free, chain)
}

fn rank_by_minors(rows: &[Vec<i64>], ambient: usize) -> usize {
    let max = rows.len().min(ambient);
    (1..=max)
        .rev()
        .find(|&j| gcd_of_minors(rows, ambient, j) != 0)
        .unwrap_or(0)
}

/// gcd of the absolute values of all j×j minors; 0 when they all vanish.
fn gcd_of_minors(rows: &[Vec<i64>], ambient: usize, j: usize) -> u64 {
    let mut g: u64 = 0;
    for row_pick in combinations(rows.len(), j) {
        for col_pick in combinations(ambient, j) {
            let minor: Vec<Vec<i128>> = row_pick
                .iter()
                .map(|&r| col_pick.iter().map(|&c| rows[r][c] as i128).collect())
                .collect();
            g = gcd_u64(g, det(&minor).unsigned_abs() as u64);
        }
    }
    g
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for jj in i + 1..k {
            idx[jj] = idx[jj - 1] + 1;
        }
    }
}

/// Cofactor-expansion determinant; sizes stay tiny here.
fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            let mut total = 0i128;
            for (c, head) in m[0].iter().enumerate() {
                if *head == 0 {
                    continue;
                }
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(cc, _)| *cc != c)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                total += sign * head * det(&minor);
            }
            total
        }
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Invariant factors (> 1, ascending chain) of `Z_d^ambient / (rows mod d)`
/// by literal enumeration: build the subgroup generated by the rows, list
/// coset representatives, and read the structure off element-order counts.
fn finite_quotient_invariant_factors(rows: &[Vec<i64>], ambient: usize, d: u64) -> Vec<u64> {
    let reduce = |v: &[i64]| -> Vec<u64> {
        v.iter().map(|&x| x.rem_euclid(d as i64) as u64).collect()
    };
    let add = |a: &[u64], b: &[u64]| -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % d).collect()
    };
    let zero = vec![0u64; ambient];
    // Subgroup closure.
    let gens: Vec<Vec<u64>> = rows.iter().map(|r| reduce(r)).collect();
    let mut sub: HashSet<Vec<u64>> = HashSet::new();
    sub.insert(zero.clone());
    let mut frontier = vec![zero.clone()];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y = add(&x, g);
            if sub.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    // Coset representatives.
    let mut reps: Vec<Vec<u64>> = vec![zero.clone()];
    let mut queue = vec![zero.clone()];
    let in_existing_coset = |reps: &[Vec<u64>], sub: &HashSet<Vec<u64>>, x: &[u64]| {
        reps.iter().any(|y| {
            let diff: Vec<u64> = x
                .iter()
                .zip(y)
                .map(|(&a, &b)| (a + d - b) % d)
                .collect();
            sub.contains(&diff)
        })
    };
    while let Some(x) = queue.pop() {
        for i in 0..ambient {
            let mut y = x.clone();
            y[i] = (y[i] + 1) % d;
            if !in_existing_coset(&reps, &sub, &y) {
                reps.push(y.clone());
                queue.push(y);
            }
        }
    }
    let order = reps.len() as u64;
    if order == 1 {
        return Vec::new();
    }
    // Order of each coset: least m ≥ 1 with m·x in the subgroup.
    let elt_orders: Vec<u64> = reps
        .iter()
        .map(|x| {
            (1..=d)
                .find(|&m| {
                    let mx: Vec<u64> = x.iter().map(|&v| (v * m) % d).collect();
                    sub.contains(&mx)
                })
                .expect("element order divides d")
        })
        .collect();
    // Per-prime valuation multisets from the counts of p^j-torsion.
    let mut per_prime: Vec<Vec<u32>> = Vec::new();
    for p in prime_factors(order) {
        let log_count = |j: u32| -> u32 {
            let pj = p.pow(j);
            let count = elt_orders.iter().filter(|&&o| pj % o == 0).count() as u64;
            let mut log = 0u32;
            let mut c = count;
            while c.is_multiple_of(p) {
                c /= p;
                log += 1;
            }
            assert_eq!(c, 1, "p^j-torsion subgroup order must be a power of p");
            log
        };
        let mut prev = 0u32;
        let mut at_least: Vec<u32> = Vec::new(); // at_least[j-1] = #factors with v_p ≥ j
        for j in 1.. {
            let cur = log_count(j);
            if cur == prev {
                break;
            }
            at_least.push(cur - prev);
            prev = cur;
        }
        let count_factors = at_least.first().copied().unwrap_or(0);
        let vals: Vec<u32> = (1..=count_factors)
            .map(|i| at_least.iter().filter(|&&k| k >= i).count() as u32)
            .collect(); // descending valuations
        per_prime.push(vals);
    }
    let width = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut factors_desc = Vec::with_capacity(width);
    for i in 0..width {
        let mut f = 1u64;
        for (vals, p) in per_prime.iter().zip(prime_factors(order)) {
            if let Some(&v) = vals.get(i) {
                f *= p.pow(v);
            }
        }
        factors_desc.push(f);
    }
    assert_eq!(
        factors_desc.iter().product::<u64>(),
        order,
        "factor product must equal the group order"
    );
    factors_desc.reverse();
    factors_desc
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod self_tests {
    use super::*;

    #[test]
    fn brute_cokernel_known_cases() {
        assert_eq!(brute_cokernel(&[vec![2, 0], vec![0, 3]], 2), (0, vec![6]));
        assert_eq!(brute_cokernel(&[], 3), (3, vec![]));
        assert_eq!(brute_cokernel(&[vec![2, 2]], 2), (1, vec![2]));
        assert_eq!(brute_cokernel(&[vec![0, 0]], 2), (2, vec![]));
        assert_eq!(
            brute_cokernel(&[vec![2, 0, 0], vec![0, 2, 0]], 3),
            (1, vec![2, 2])
        );
        assert_eq!(brute_cokernel(&[vec![1, 0], vec![0, 4]], 2), (0, vec![4]));
        assert_eq!(brute_cokernel(&[vec![2, 4], vec![6, 8]], 2), (0, vec![2, 4]));
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(2, 3), Vec::<Vec<usize>>::new());
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn determinant_small() {
        assert_eq!(det(&[vec![2]]), 2);
        assert_eq!(det(&[vec![1, 2], vec![3, 4]]), -2);
        assert_eq!(
            det(&[vec![1, 0, 2], vec![0, 1, 0], vec![3, 0, 4]]),
            -2
        );
    }
}
