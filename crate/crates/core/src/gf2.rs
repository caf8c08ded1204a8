//! Dense bit-packed linear algebra over GF(2).

/// Row-major bit matrix; each row is `words` 64-bit limbs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        let mask = 1u64 << (c % 64);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1u64 << (c % 64);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.data.swap(a * self.words + w, b * self.words + w);
        }
    }

    /// `row[dst] ^= row[src]`, starting at limb `from`.
    fn xor_row(&mut self, dst: usize, src: usize, from: usize) {
        let (d, s) = (dst * self.words, src * self.words);
        for w in from..self.words {
            let x = self.data[s + w];
            self.data[d + w] ^= x;
        }
    }

    /// Reduces the first `pivot_cols` columns to row echelon form in place and
    /// returns the rank over those columns.
    pub fn eliminate(&mut self, pivot_cols: usize) -> usize {
        let mut rank = 0;
        for c in 0..pivot_cols.min(self.cols) {
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(rank, p);
            for r in rank + 1..self.rows {
                if self.get(r, c) {
                    self.xor_row(r, rank, c / 64);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Whether `A x = b` is consistent, where the last column holds `b`.
    pub fn augmented_is_consistent(mut self) -> bool {
        let vars = self.cols - 1;
        let rank = self.eliminate(vars);
        (rank..self.rows).all(|r| !self.get(r, vars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_and_dependent_rows() {
        let mut m = BitMatrix::zeros(3, 130);
        m.set(0, 0, true);
        m.set(1, 129, true);
        m.set(2, 0, true);
        m.set(2, 129, true);
        assert_eq!(m.clone().eliminate(130), 2);
        m.flip(2, 64);
        assert_eq!(m.eliminate(130), 3);
    }

    #[test]
    fn consistency() {
        // x0 + x1 = 1, x1 + x2 = 1, x0 + x2 = 1 is inconsistent
        let mut m = BitMatrix::zeros(3, 4);
        for (r, (a, b)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
            m.set(r, a, true);
            m.set(r, b, true);
            m.set(r, 3, true);
        }
        assert!(!m.clone().augmented_is_consistent());
        m.set(2, 3, false);
        assert!(m.augmented_is_consistent());
    }
}
