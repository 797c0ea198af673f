//! GF(2) decoding of XOR-coded packets.
//!
//! Every cached item and every codeword segment is the XOR of equal-length
//! atoms. A receiver solves the resulting linear system by Gaussian
//! elimination; XORing two rows that share an atom always combines payloads
//! of the same length.

use bitvec::prelude::*;

/// One linear equation: the XOR of `atoms` equals `value`.
#[derive(Debug, Clone)]
pub struct Equation {
    pub atoms: Vec<usize>,
    pub value: BitVec,
}

struct Row {
    coeffs: BitVec,
    value: BitVec,
}

/// Recovers the payloads of `wanted` atoms, or returns the first atom that is
/// not determined by the equations.
pub fn solve(n_atoms: usize, equations: &[Equation], wanted: &[usize]) -> std::result::Result<Vec<BitVec>, usize> {
    let mut rows: Vec<Row> = equations
        .iter()
        .map(|e| {
            let mut coeffs = bitvec![0; n_atoms];
            for &a in &e.atoms {
                let v = coeffs[a];
                coeffs.set(a, !v);
            }
            Row { coeffs, value: e.value.clone() }
        })
        .collect();

    let mut pivot_row = vec![usize::MAX; n_atoms];
    let mut rank = 0;
    for col in 0..n_atoms {
        let Some(r) = (rank..rows.len()).find(|&r| rows[r].coeffs[col]) else {
            continue;
        };
        rows.swap(rank, r);
        let (head, tail) = rows.split_at_mut(rank);
        let (pivot, tail) = tail.split_first_mut().expect("pivot row exists");
        for other in head.iter_mut().chain(tail.iter_mut()) {
            if other.coeffs[col] {
                *other.coeffs.as_mut_bitslice() ^= pivot.coeffs.as_bitslice();
                *other.value.as_mut_bitslice() ^= pivot.value.as_bitslice();
            }
        }
        pivot_row[col] = rank;
        rank += 1;
    }

    wanted
        .iter()
        .map(|&a| {
            let r = pivot_row[a];
            if r == usize::MAX || rows[r].coeffs.count_ones() != 1 {
                Err(a)
            } else {
                Ok(rows[r].value.clone())
            }
        })
        .collect()
}
