use mvtr_core::lambda::{
    chern_dual, chern_dual_at, gamma_raw, graded_inverse, mumford_relations, ClassPoly, GammaData, MumfordReducer,
};
use mvtr_core::q::{qi, sign};
use mvtr_core::{UPoly, Q};

fn lam(g: u32, i: u32) -> ClassPoly<Q> {
    ClassPoly::lambda(g, i)
}

#[test]
fn chern_dual_small() {
    // Λ_1^∨(τ) = τ − λ_1
    let c = chern_dual(1, &UPoly::x());
    assert_eq!(c, ClassPoly::constant(1, UPoly::x()).sub(&lam(1, 1).to_tau()));
    assert_eq!(chern_dual_at(0, &qi(7)), ClassPoly::one(0));
    let want = ClassPoly::one(2).sub(&lam(2, 1)).add(&lam(2, 2));
    assert_eq!(chern_dual_at(2, &qi(1)), want);
}

#[test]
fn relations_small() {
    let r1 = mumford_relations(1);
    assert_eq!(r1.len(), 1);
    let red1 = MumfordReducer::new(1);
    assert!(red1.is_zero_mod(&lam(1, 1).mul(&lam(1, 1))));
    let r2 = mumford_relations(2);
    // ±(λ_1² − 2λ_2) and ±λ_2²
    let a = lam(2, 1).mul(&lam(2, 1)).sub(&lam(2, 2).scale_q(&qi(2)));
    let b = lam(2, 2).mul(&lam(2, 2));
    assert!(r2.iter().any(|r| *r == a || *r == a.neg()));
    assert!(r2.iter().any(|r| *r == b || *r == b.neg()));
    let red = MumfordReducer::new(2);
    assert_eq!(red.reduce(&lam(2, 1).mul(&lam(2, 1))), lam(2, 2).scale_q(&qi(2)));
    assert!(red.is_zero_mod(&lam(2, 1).pow4()));
    assert_eq!(red.reduce(&lam(2, 1)), lam(2, 1));
}

trait Pow4 {
    fn pow4(&self) -> Self;
}
impl Pow4 for ClassPoly<Q> {
    fn pow4(&self) -> Self {
        let s = self.mul(self);
        s.mul(&s)
    }
}

#[test]
fn mumford_identity_holds_after_reduction() {
    for g in 1..=5u32 {
        let red = MumfordReducer::new(g);
        let t = UPoly::x();
        let p = chern_dual(g, &t).mul(&chern_dual(g, &t.scale(&qi(-1))));
        let want = ClassPoly::constant(g, UPoly::monomial(sign(g as i64), 2 * g as usize));
        assert_eq!(red.reduce(&p), want, "g={g}");
    }
}

#[test]
fn reduction_is_idempotent_and_linear() {
    for g in 1..=4u32 {
        let red = MumfordReducer::new(g);
        let gm = gamma_raw(g);
        let r = red.reduce(&gm);
        assert_eq!(red.reduce(&r), r);
        let x = lam(g, 1).mul(&lam(g, g)).add(&lam(g, 1).mul(&lam(g, 1)).scale_q(&qi(3)));
        let y = chern_dual_at(g, &qi(-1)).mul(&lam(g, g));
        let lhs = red.reduce(&x.scale_q(&qi(2)).add(&y));
        let rhs = red.reduce(&x).scale_q(&qi(2)).add(&red.reduce(&y));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn gamma_one() {
    // −(τ²+τ) + (τ²+τ+1)λ_1
    let d = GammaData::new(1);
    let want = ClassPoly::constant(1, UPoly::from_ints(&[0, -1, -1]))
        .add(&ClassPoly::monomial(1, vec![1], UPoly::from_ints(&[1, 1, 1])));
    assert_eq!(d.gamma, want);
}

#[test]
fn gamma_coefficients_eq48() {
    for g in 1..=4u32 {
        let d = GammaData::new(g);
        let red = &d.reducer;
        let gi = g as i64;
        assert_eq!(d.gamma.tau_degree(), Some(2 * g as usize));
        assert_eq!(d.a[2 * g as usize], ClassPoly::constant(g, sign(gi)), "a_2g g={g}");
        assert_eq!(d.a[2 * g as usize - 1], ClassPoly::constant(g, sign(gi) * qi(gi)), "a_2g-1 g={g}");
        let lm1 = chern_dual_at(g, &qi(-1));
        let a0 = red.reduce(&lam(g, g).mul(&lm1).scale_q(&sign(gi)));
        assert_eq!(d.a[0], a0, "a_0 g={g}");
        let mut a1 = ClassPoly::zero(g);
        for m in 1..=g {
            a1 = a1.add(&lam(g, g - m).mul(&lam(g, g)).scale_q(&qi(m as i64)));
        }
        a1 = a1.sub(&lm1.mul(&lam(g, g - 1)).scale_q(&sign(gi)));
        assert_eq!(d.a[1], red.reduce(&a1), "a_1 g={g}");
        // Λ(1) Σ a_m τ^m = Γ
        let l1 = chern_dual_at(g, &qi(1));
        let mut re = ClassPoly::zero(g);
        for (m, am) in d.a.iter().enumerate() {
            re = re.add(&l1.mul(am).map_coeffs(|c| UPoly::monomial(c.clone(), m)));
        }
        assert_eq!(red.reduce(&re), d.gamma);
        // graded inverse really inverts
        let inv = graded_inverse(&l1, 3 * g);
        assert_eq!(red.reduce(&l1.mul(&inv).truncate(3 * g)), ClassPoly::one(g));
    }
}

#[test]
fn gamma_reflection_symmetry() {
    for g in 1..=3u32 {
        let d = GammaData::new(g);
        let refl = d.gamma.map_coeffs(|p| p.compose(&UPoly::from_ints(&[-1, -1])));
        assert_eq!(d.reducer.reduce(&refl), d.gamma, "g={g}");
    }
}

#[test]
fn p_d_values() {
    for g in 1..=4u32 {
        let d = GammaData::new(g);
        let red = &d.reducer;
        let gi = g as i64;
        // the degree g−1 piece comes out as −λ_{g−1}
        assert_eq!(d.p_d(g - 1), lam(g, g - 1).neg(), "P_(g-1) g={g}");
        assert_eq!(d.p_d(g), lam(g, g).scale_q(&qi(gi)), "P_g g={g}");
        if g >= 2 {
            assert_eq!(d.p_d(g + 1), red.reduce(&lam(g, g).mul(&lam(g, 1)).neg()), "P_(g+1) g={g}");
        }
        if g >= 2 {
            let top = lam(g, g).mul(&lam(g, g - 1)).mul(&lam(g, g - 2)).scale_q(&sign(gi + 1));
            assert_eq!(d.p_d(3 * g - 3), red.reduce(&top), "P_(3g-3) g={g}");
        }
        // at g = 1 the piece P_1 = λ_1 sits above 3g−3 = 0
        let mut s = ClassPoly::zero(g);
        for k in (g - 1)..=(3 * g - 3).max(g) {
            s = s.add(&d.p_d(k));
        }
        assert_eq!(s, d.p_sum(), "P range g={g}");
    }
}
