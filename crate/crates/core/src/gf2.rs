//! Small GF(2) linear-algebra helpers on rows packed into single words.
//! All callers stay within 64 columns.

/// Reduces `rows` in place to reduced row echelon form, scanning columns
/// from bit 0 upward. Returns the pivot column of each surviving row;
/// zero rows are dropped.
pub(crate) fn echelonize(rows: &mut Vec<u64>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let mask = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank && rows[i] & mask != 0 {
                rows[i] ^= rows[rank];
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

pub(crate) fn rank(rows: &[u64], width: usize) -> usize {
    let mut v = rows.to_vec();
    echelonize(&mut v, width).len()
}

/// Reduces `v` against echelonized rows; returns the residual.
pub(crate) fn reduce(rows: &[u64], pivots: &[usize], mut v: u64) -> u64 {
    for (row, &p) in rows.iter().zip(pivots) {
        if v & (1 << p) != 0 {
            v ^= row;
        }
    }
    v
}

/// True iff `v` lies in the span of the echelonized rows.
pub(crate) fn in_span(rows: &[u64], pivots: &[usize], v: u64) -> bool {
    reduce(rows, pivots, v) == 0
}

/// Solves `A·v = b` over GF(2) where row `i` of `A` is `rows[i]` (the
/// equation is a parity over the bits selected by the row) and `b[i]` is
/// `rhs` bit `i`. Returns a particular solution with free variables zero,
/// or `None` if inconsistent.
pub(crate) fn solve(rows: &[u64], width: usize, rhs: u64) -> Option<u64> {
    // augmented column at bit `width`
    let mut aug: Vec<u64> = rows
        .iter()
        .enumerate()
        .map(|(i, &r)| r | (((rhs >> i) & 1) << width))
        .collect();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..width {
        let mask = 1u64 << col;
        let Some(pivot) = (rank..aug.len()).find(|&i| aug[i] & mask != 0) else {
            continue;
        };
        aug.swap(rank, pivot);
        for i in 0..aug.len() {
            if i != rank && aug[i] & mask != 0 {
                aug[i] ^= aug[rank];
            }
        }
        pivots.push(col);
        rank += 1;
    }
    // inconsistent when a zero coefficient row has rhs bit 1
    if aug[rank..].iter().any(|&r| r >> width != 0) {
        return None;
    }
    let mut v = 0u64;
    for (row, &p) in aug[..rank].iter().zip(&pivots) {
        if row >> width != 0 {
            v |= 1 << p;
        }
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_and_span() {
        let mut rows = vec![0b110, 0b011, 0b101];
        let pivots = echelonize(&mut rows, 3);
        assert_eq!(pivots.len(), 2);
        assert!(in_span(&rows, &pivots, 0b101));
        assert!(!in_span(&rows, &pivots, 0b001));
        assert_eq!(rank(&[0b110, 0b011, 0b101], 3), 2);
    }

    #[test]
    fn solve_simple() {
        // x0 ^ x1 = 1, x1 = 1 -> x0 = 0, x1 = 1
        let v = solve(&[0b11, 0b10], 2, 0b11).unwrap();
        assert_eq!(v, 0b10);
        // inconsistent: x0 = 0 and x0 = 1
        assert!(solve(&[0b01, 0b01], 2, 0b10).is_none());
        // underdetermined picks free vars zero
        let v = solve(&[0b11], 2, 0b1).unwrap();
        assert_eq!(v & 0b11, v);
        assert_eq!((v & 1) ^ ((v >> 1) & 1), 1);
    }
}
