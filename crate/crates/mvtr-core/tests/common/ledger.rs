use mvtr_core::hodge::HodgeTable;
use mvtr_core::psi::PsiTable;
use mvtr_core::q::{factorial, qf, qi};
use mvtr_core::{Ring, Q};

/// Literal transcription of the `[t^{b+1}]` coefficient formulas.
pub struct Ledger<'a> {
    pub h: &'a mut HodgeTable,
    pub psi: &'a PsiTable,
    pub g: u32,
    pub b: Vec<i64>,
}

impl Ledger<'_> {
    fn l(&self) -> usize {
        self.b.len()
    }
    fn f(&self, k: usize, b: i64, i: i64) -> Q {
        if b < 0 || i < 0 {
            return Q::zero();
        }
        self.psi.f_coeff(k, b as usize, i as usize).unwrap()
    }
    fn f0(&self, b: i64, i: i64) -> Q {
        self.f(0, b, i)
    }
    fn f1(&self, b: i64, i: i64) -> Q {
        self.f(1, b, i)
    }
    /// Π_{s ∈ L∖skip} f^0(b_s, b_s+1)
    fn fr(&self, skip: &[usize]) -> Q {
        let mut p = Q::one();
        for s in 0..self.l() {
            if !skip.contains(&s) {
                p *= self.f0(self.b[s], self.b[s] + 1);
            }
        }
        p
    }
    fn args(&self, head: &[i64], skip: &[usize]) -> Option<Vec<u32>> {
        let mut v: Vec<i64> = head.to_vec();
        for s in 0..self.l() {
            if !skip.contains(&s) {
                v.push(self.b[s]);
            }
        }
        if v.iter().any(|&x| x < 0) {
            return None;
        }
        Some(v.into_iter().map(|x| x as u32).collect())
    }
    fn lg(&mut self, head: &[i64], skip: &[usize]) -> Q {
        match self.args(head, skip) {
            Some(a) => self.h.lambda_g_value(self.g, &a).unwrap(),
            None => Q::zero(),
        }
    }
    fn lgm1(&mut self, head: &[i64], skip: &[usize]) -> Q {
        match self.args(head, skip) {
            Some(a) => self.h.lambda_gm1_value(self.g, &a).unwrap(),
            None => Q::zero(),
        }
    }
    fn others(&self, skip: &[usize]) -> Vec<usize> {
        (0..self.l()).filter(|k| !skip.contains(k)).collect()
    }
    fn pairs(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for i in 0..self.l() {
            for j in i + 1..self.l() {
                v.push((i, j));
            }
        }
        v
    }

    pub fn eq120(&mut self) -> Q {
        let (g, l) = (self.g as i64, self.l() as i64);
        let mut s = Q::zero();
        for j in 0..self.l() {
            let bj = self.b[j];
            s += self.lg(&[bj + 1], &[j]) * qi(l * (2 - g - l)) * self.f0(bj + 1, bj + 1) * self.fr(&[j]);
        }
        s
    }

    pub fn eq121(&mut self) -> Q {
        let l = qi(self.l() as i64);
        let mut s = Q::zero();
        for j in 0..self.l() {
            let bj = self.b[j];
            for k in self.others(&[j]) {
                let bk = self.b[k];
                s += self.lg(&[bj, bk + 1], &[j, k]) * &l * self.f1(bj, bj + 1) * self.f0(bk + 1, bk + 1) * self.fr(&[j, k]);
            }
            s += self.lg(&[bj + 1], &[j]) * &l * self.f1(bj + 1, bj + 1) * self.fr(&[j]);
            for k in self.others(&[j]) {
                let bk = self.b[k];
                s += self.lg(&[bj - 1, bk + 2], &[j, k]) * &l * self.f1(bj - 1, bj + 1) * self.f0(bk + 2, bk + 1) * self.fr(&[j, k]);
            }
            for k1 in self.others(&[j]) {
                for k2 in self.others(&[j, k1]).into_iter().filter(|&k2| k2 > k1) {
                    let (b1, b2) = (self.b[k1], self.b[k2]);
                    s += self.lg(&[bj - 1, b1 + 1, b2 + 1], &[j, k1, k2])
                        * &l
                        * self.f1(bj - 1, bj + 1)
                        * self.f0(b1 + 1, b1 + 1)
                        * self.f0(b2 + 1, b2 + 1)
                        * self.fr(&[j, k1, k2]);
                }
            }
        }
        s
    }

    pub fn eq122(&mut self) -> Q {
        let mut s = Q::zero();
        for j in 0..self.l() {
            let bj = self.b[j];
            let w = qi(bj);
            for k in self.others(&[j]) {
                let bk = self.b[k];
                s += self.lg(&[bj, bk + 1], &[j, k]) * &w * self.f0(bj, bj) * self.f0(bk + 1, bk + 1) * self.fr(&[j, k]);
            }
            s += self.lg(&[bj + 1], &[j]) * &w * self.f0(bj + 1, bj) * self.fr(&[j]);
            for k in self.others(&[j]) {
                let bk = self.b[k];
                s += self.lg(&[bj - 1, bk + 2], &[j, k]) * &w * self.f0(bj - 1, bj) * self.f0(bk + 2, bk + 1) * self.fr(&[j, k]);
            }
            for k1 in self.others(&[j]) {
                for k2 in self.others(&[j, k1]).into_iter().filter(|&k2| k2 > k1) {
                    let (b1, b2) = (self.b[k1], self.b[k2]);
                    s += self.lg(&[bj - 1, b1 + 1, b2 + 1], &[j, k1, k2])
                        * &w
                        * self.f0(bj - 1, bj)
                        * self.f0(b1 + 1, b1 + 1)
                        * self.f0(b2 + 1, b2 + 1)
                        * self.fr(&[j, k1, k2]);
                }
            }
        }
        s
    }

    pub fn eq123(&mut self) -> Q {
        let mut s = Q::zero();
        for j in 0..self.l() {
            let bj = self.b[j];
            s -= self.lg(&[bj + 1], &[j]) * qi(bj + 1) * self.f0(bj + 1, bj + 1) * self.fr(&[j]);
            for k in self.others(&[j]) {
                let bk = self.b[k];
                s -= self.lg(&[bj, bk + 1], &[j, k]) * qi(bj + 1) * self.f0(bj, bj + 1) * self.f0(bk + 1, bk + 1) * self.fr(&[j, k]);
            }
        }
        s
    }

    pub fn eq124(&mut self) -> Q {
        let l = qi(self.l() as i64);
        let mut s = Q::zero();
        for j in 0..self.l() {
            let bj = self.b[j];
            s -= self.lgm1(&[bj + 2], &[j]) * &l * self.f0(bj + 2, bj + 1) * self.fr(&[j]);
            for k in (j + 1)..self.l() {
                let bk = self.b[k];
                s -= self.lgm1(&[bj + 1, bk + 1], &[j, k]) * &l * self.f0(bj + 1, bj + 1) * self.f0(bk + 1, bk + 1) * self.fr(&[j, k]);
            }
        }
        s
    }

    pub fn eq126(&mut self) -> Q {
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s += self.lg(&[m], &[i, j]) * self.fr(&[i, j]) * self.f1(m + 1, m + 1);
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s += self.lg(&[m - 1, br + 1], &[i, j, r]) * self.f1(m, m + 1) * self.fr(&[i, j, r]) * self.f0(br + 1, br + 1);
                s += self.lg(&[m - 2, br + 2], &[i, j, r]) * self.f1(m - 1, m + 1) * self.f0(br + 2, br + 1) * self.fr(&[i, j, r]);
            }
            for r1 in self.others(&[i, j]) {
                for r2 in self.others(&[i, j, r1]).into_iter().filter(|&r2| r2 > r1) {
                    let (b1, b2) = (self.b[r1], self.b[r2]);
                    s += self.lg(&[m - 2, b1 + 1, b2 + 1], &[i, j, r1, r2])
                        * self.f0(b1 + 1, b1 + 1)
                        * self.f0(b2 + 1, b2 + 1)
                        * self.fr(&[i, j, r1, r2])
                        * self.f1(m - 1, m + 1);
                }
            }
        }
        s
    }

    pub fn eq127(&mut self) -> Q {
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s -= self.lg(&[m], &[i, j]) * self.fr(&[i, j]) * self.f1(m + 1, m + 2);
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s -= self.lg(&[m - 1, br + 1], &[i, j, r]) * self.f0(br + 1, br + 1) * self.fr(&[i, j, r]) * self.f1(m, m + 2);
            }
        }
        s
    }

    pub fn eq128(&mut self) -> Q {
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s += self.lg(&[m], &[i, j]) * self.fr(&[i, j]) * self.f0(m + 1, m);
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s += self.lg(&[m - 1, br + 1], &[i, j, r]) * self.f0(m, m) * self.fr(&[i, j, r]) * self.f0(br + 1, br + 1);
                s += self.lg(&[m - 2, br + 2], &[i, j, r]) * self.f0(m - 1, m) * self.f0(br + 2, br + 1) * self.fr(&[i, j, r]);
            }
            for r1 in self.others(&[i, j]) {
                for r2 in self.others(&[i, j, r1]).into_iter().filter(|&r2| r2 > r1) {
                    let (b1, b2) = (self.b[r1], self.b[r2]);
                    s += self.lg(&[m - 2, b1 + 1, b2 + 1], &[i, j, r1, r2])
                        * self.f0(b1 + 1, b1 + 1)
                        * self.f0(b2 + 1, b2 + 1)
                        * self.fr(&[i, j, r1, r2])
                        * self.f0(m - 1, m);
                }
            }
        }
        s
    }

    pub fn eq129(&mut self) -> Q {
        let w = qi(2 * self.g as i64 + self.l() as i64);
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s -= self.lg(&[m], &[i, j]) * &w * self.fr(&[i, j]) * self.f0(m + 1, m + 1);
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s -= self.lg(&[m - 1, br + 1], &[i, j, r]) * &w * self.f0(br + 1, br + 1) * self.fr(&[i, j, r]) * self.f0(m, m + 1);
            }
        }
        s
    }

    pub fn eq130(&mut self) -> Q {
        let w = qi(2 * self.g as i64 + self.l() as i64 - 1);
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s += self.lg(&[m], &[i, j]) * &w * self.fr(&[i, j]) * self.f0(m + 1, m + 2);
        }
        s
    }

    pub fn eq131(&mut self) -> Q {
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s += self.lg(&[m + 1, br - 1], &[i, j, r]) * self.f1(br - 1, br + 1) * self.fr(&[i, j, r]) * self.f0(m + 2, m + 1);
                for x in self.others(&[i, j, r]) {
                    let bs = self.b[x];
                    s += self.lg(&[m - 1, br - 1, bs + 2], &[i, j, r, x])
                        * self.f1(br - 1, br + 1)
                        * self.f0(bs + 2, bs + 1)
                        * self.fr(&[i, j, r, x])
                        * self.f0(m, m + 1);
                    for y in self.others(&[i, j, r, x]).into_iter().filter(|&y| y > x) {
                        let by = self.b[y];
                        s += self.lg(&[m - 1, br - 1, bs + 1, by + 1], &[i, j, r, x, y])
                            * self.f1(br - 1, br + 1)
                            * self.f0(bs + 1, bs + 1)
                            * self.f0(by + 1, by + 1)
                            * self.fr(&[i, j, r, x, y])
                            * self.f0(m, m + 1);
                    }
                }
                s += self.lg(&[m - 1, br + 1], &[i, j, r]) * self.f1(br + 1, br + 1) * self.fr(&[i, j, r]) * self.f0(m, m + 1);
                for x in self.others(&[i, j, r]) {
                    let bs = self.b[x];
                    s += self.lg(&[m - 1, br, bs + 1], &[i, j, r, x])
                        * self.f1(br, br + 1)
                        * self.f0(bs + 1, bs + 1)
                        * self.fr(&[i, j, r, x])
                        * self.f0(m, m + 1);
                }
                s += self.lg(&[m, br], &[i, j, r]) * self.f1(br, br + 1) * self.fr(&[i, j, r]) * self.f0(m + 1, m + 1);
                for x in self.others(&[i, j, r]) {
                    let bs = self.b[x];
                    s += self.lg(&[m, br - 1, bs + 1], &[i, j, r, x])
                        * self.f1(br - 1, br + 1)
                        * self.f0(bs + 1, bs + 1)
                        * self.fr(&[i, j, r, x])
                        * self.f0(m + 1, m + 1);
                }
            }
        }
        s
    }

    pub fn eq132(&mut self) -> Q {
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s -= self.lg(&[m + 1, br - 1], &[i, j, r]) * self.f1(br - 1, br + 1) * self.fr(&[i, j, r]) * self.f0(m + 2, m + 2);
                s -= self.lg(&[m, br], &[i, j, r]) * self.f1(br, br + 1) * self.fr(&[i, j, r]) * self.f0(m + 1, m + 2);
                for x in self.others(&[i, j, r]) {
                    let bs = self.b[x];
                    s -= self.lg(&[m, br - 1, bs + 1], &[i, j, r, x])
                        * self.f1(br - 1, br + 1)
                        * self.f0(bs + 1, bs + 1)
                        * self.fr(&[i, j, r, x])
                        * self.f0(m + 1, m + 2);
                }
            }
        }
        s
    }

    pub fn eq133(&mut self) -> Q {
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s -= self.lgm1(&[m + 1], &[i, j]) * self.fr(&[i, j]) * self.f0(m + 2, m + 1);
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s -= self.lgm1(&[m, br + 1], &[i, j, r]) * self.f0(br + 1, br + 1) * self.fr(&[i, j, r]) * self.f0(m + 1, m + 1);
                for x in self.others(&[i, j, r]).into_iter().filter(|&x| x > r) {
                    let bs = self.b[x];
                    s -= self.lgm1(&[m - 1, br + 1, bs + 1], &[i, j, r, x])
                        * self.f0(br + 1, br + 1)
                        * self.f0(bs + 1, bs + 1)
                        * self.fr(&[i, j, r, x])
                        * self.f0(m, m + 1);
                }
                s -= self.lgm1(&[m - 1, br + 2], &[i, j, r]) * self.f0(br + 2, br + 1) * self.fr(&[i, j, r]) * self.f0(m, m + 1);
            }
        }
        s
    }

    pub fn eq134(&mut self) -> Q {
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s += self.lgm1(&[m + 1], &[i, j]) * self.fr(&[i, j]) * self.f0(m + 2, m + 2);
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s += self.lgm1(&[m, br + 1], &[i, j, r]) * self.f0(br + 1, br + 1) * self.fr(&[i, j, r]) * self.f0(m + 1, m + 2);
            }
        }
        s
    }

    pub fn eq135(&mut self) -> Q {
        let g = qi(self.g as i64);
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s += self.lg(&[m], &[i, j]) * &g * self.fr(&[i, j]) * self.f0(m + 1, m + 1);
            for r in self.others(&[i, j]) {
                let br = self.b[r];
                s += self.lg(&[m - 1, br + 1], &[i, j, r]) * &g * self.f0(br + 1, br + 1) * self.fr(&[i, j, r]) * self.f0(m, m + 1);
            }
        }
        s
    }

    pub fn eq136(&mut self) -> Q {
        let g = qi(self.g as i64);
        let mut s = Q::zero();
        for (i, j) in self.pairs() {
            let m = self.b[i] + self.b[j];
            s -= self.lg(&[m], &[i, j]) * &g * self.fr(&[i, j]) * self.f0(m + 1, m + 2);
        }
        s
    }

    /// λ_{g'} at genus g'; genus zero means ψ-classes alone.
    fn lam(&mut self, g: u32, args: &[i64]) -> Q {
        if args.iter().any(|&x| x < 0) || 2 * g as i64 - 2 + args.len() as i64 <= 0 {
            return Q::zero();
        }
        let a: Vec<u32> = args.iter().map(|&x| x as u32).collect();
        if g == 0 {
            self.h.psi_intersection(0, &a)
        } else {
            self.h.lambda_g_value(g, &a).unwrap()
        }
    }

    pub fn eq138(&mut self) -> Q {
        let mut s = Q::zero();
        for j in 0..self.l() {
            let rest = self.others(&[j]);
            let bj = self.b[j];
            // the degree deficit 2 is shared between t_j and the other variables
            for shift in shifts(rest.len(), 2) {
                let lift: i64 = shift.iter().sum();
                let c: Vec<i64> = rest.iter().zip(&shift).map(|(&k, &d)| self.b[k] + d).collect();
                let mut outer = Q::one();
                for (&k, &ck) in rest.iter().zip(&c) {
                    outer *= self.f0(ck, self.b[k] + 1);
                }
                for a1 in 0..(bj - lift) {
                    let a2 = bj - 1 - lift - a1;
                    let mut w = Q::zero();
                    for p in 0..=bj + 1 {
                        w += self.f0(a1 + 1, p) * self.f0(a2 + 1, bj + 1 - p);
                    }
                    if w.is_zero() {
                        continue;
                    }
                    for g1 in 0..=self.g {
                        let g2 = self.g - g1;
                        for mask in 0u32..(1 << rest.len()) {
                            let side = |want: u32| -> Vec<i64> {
                                (0..rest.len()).filter(|k| mask >> k & 1 == want).map(|k| c[k]).collect()
                            };
                            let (ii, jj) = (side(1), side(0));
                            if 2 * g1 as i64 - 1 + ii.len() as i64 <= 0 || 2 * g2 as i64 - 1 + jj.len() as i64 <= 0 {
                                continue;
                            }
                            let mut x = vec![a1];
                            x.extend(&ii);
                            let mut y = vec![a2];
                            y.extend(&jj);
                            s += self.lam(g1, &x) * self.lam(g2, &y) * &w * &outer * qf(1, 2);
                        }
                    }
                }
            }
        }
        s
    }

    pub fn constant(&mut self) -> Q {
        let r = self.eq126()
            + self.eq127()
            + self.eq128()
            + self.eq129()
            + self.eq130()
            + self.eq131()
            + self.eq132()
            + self.eq133()
            + self.eq134()
            + self.eq135()
            + self.eq136()
            + self.eq138();
        let lside = self.eq120() + self.eq121() + self.eq122() + self.eq123() + self.eq124();
        let mut den = qi(self.l() as i64);
        for &x in &self.b {
            den *= Q::from_integer(factorial(x as u64));
        }
        -(r - lside) / den
    }
}

pub fn transcribed(h: &mut HodgeTable, psi: &PsiTable, g: u32, b: &[u32]) -> Q {
    let mut led = Ledger { h, psi, g, b: b.iter().map(|&x| x as i64).collect() };
    led.constant()
}

/// Non-negative vectors of length `n` with entry sum at most `cap`.
fn shifts(n: usize, cap: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for d in 0..=cap {
        for mut tail in shifts(n - 1, cap - d) {
            tail.insert(0, d);
            out.push(tail);
        }
    }
    out
}
