//! The framed Lambert curve `y(1−y)^τ = x`, its branch involution, the recursion kernel,
//! the residue polynomials and the recursion they drive.
//!
//! Series at `t = ∞` are kept in `u = 1/t`. `σ(u) = 1/s(t)` is the involution in that
//! chart and `v = √((τ+1)/τ)·h(u)` with `h` a series over `Q(τ)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::cutjoin::{CutJoinError, Correlators, Insertion};
use crate::hodge::compositions_up_to;
use crate::mpoly::TPoly;
use crate::psi::{PsiError, PsiTable};
use crate::q::{qf, qi, sign, Ring, Q};
use crate::quad::QuadExt;
use crate::ratfn::RatFn;
use crate::series::{Series, SeriesError};
use crate::upoly::UPoly;

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralError {
    Series(SeriesError),
    Psi(PsiError),
    CutJoin(CutJoinError),
    /// a coefficient beyond the computed order was needed
    Truncated { wanted: i64, order: i64 },
    /// the polynomial is not a combination of `Π dΨ̂_{b_i}(t_i)`
    NotInBasis,
    /// (g,l) outside the stable range or without a rule
    Signature { g: u32, l: usize },
    OrderTooSmall { order: usize, min: usize },
}

impl From<SeriesError> for SpectralError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Truncated { wanted, order } => SpectralError::Truncated { wanted, order },
            e => SpectralError::Series(e),
        }
    }
}

impl From<PsiError> for SpectralError {
    fn from(e: PsiError) -> Self {
        SpectralError::Psi(e)
    }
}

impl From<CutJoinError> for SpectralError {
    fn from(e: CutJoinError) -> Self {
        SpectralError::CutJoin(e)
    }
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::Series(e) => write!(f, "series: {:?}", e),
            SpectralError::Psi(e) => write!(f, "psi: {:?}", e),
            SpectralError::CutJoin(e) => write!(f, "{}", e),
            SpectralError::Truncated { wanted, order } => {
                write!(f, "coefficient {} needed but series known only below {}", wanted, order)
            }
            SpectralError::NotInBasis => write!(f, "form is not in the span of the dΨ̂ products"),
            SpectralError::Signature { g, l } => write!(f, "no recursion rule for (g,l)=({},{})", g, l),
            SpectralError::OrderTooSmall { order, min } => write!(f, "order {} below minimum {}", order, min),
        }
    }
}

pub type Result<T> = core::result::Result<T, SpectralError>;

fn tau1() -> RatFn {
    RatFn::linear(1, 1)
}

/// `Π_{a=0}^{k−2}(kτ+a)/k!`
pub fn y_coefficient(k: u32) -> RatFn {
    let mut p = UPoly::constant(Q::one());
    for a in 0..k.saturating_sub(1) {
        p = p.mul(&UPoly::from_ints(&[a as i64, k as i64]));
    }
    RatFn::poly(p.scale(&Q::from_integer(crate::q::factorial(k as u64)).recip()))
}

/// `Π_{a=0}^{k−1}(kτ+a)/k!`
pub fn t_coefficient(k: u32) -> RatFn {
    y_coefficient(k).mul(&RatFn::poly(UPoly::from_ints(&[k as i64 - 1, k as i64])))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveSeries {
    /// `y(x)`, the branch with `y(0) = 0`
    pub y: Series<RatFn>,
    /// `t(x) = 1/(1−(τ+1)y)`
    pub t: Series<RatFn>,
}

/// `y(x)` by reverting `y(1−y)^τ`, and `t(x)`, both to `O(x^order)`.
pub fn curve_series(order: usize) -> Result<CurveSeries> {
    if order < 2 {
        return Err(SpectralError::OrderTooSmall { order, min: 2 });
    }
    let n = order as i64;
    let y = Series::<RatFn>::var(n);
    let one_minus = Series::one(n).sub(&y);
    let pw = one_minus.log()?.scale(&RatFn::tau()).exp()?;
    let f = y.mul(&pw);
    let ys = f.reversion()?;
    let t = Series::one(n).sub(&ys.scale(&tau1())).inv()?;
    Ok(CurveSeries { y: ys, t })
}

/// `G(u) = ln(1−u) + τ ln(1+u/τ)`; constant along the fibres of `x`.
fn g_series(order: i64) -> Result<Series<RatFn>> {
    let u = Series::<RatFn>::var(order);
    let a = Series::one(order).sub(&u).log()?;
    let inv_tau = RatFn::tau().try_inv().unwrap();
    let b = Series::one(order).add(&u.scale(&inv_tau)).log()?.scale(&RatFn::tau());
    Ok(a.add(&b))
}

/// `u·√(G(u)/(c u²))` with `c = [u²]G = −(τ+1)/(2τ)`; odd under the involution.
fn h_series(order: i64) -> Result<Series<RatFn>> {
    let g = g_series(order + 2)?;
    let c = g.coeff(2);
    let norm = g.shift(-2).scale(&c.try_inv().unwrap()).truncate(order);
    let root = norm.pow_q(&qf(1, 2))?;
    Ok(root.shift(1).truncate(order))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Involution {
    /// `P(z)` with `y(q̄) = 1/(τ+1) − P(z)` when `y(q) = 1/(τ+1) − z`
    pub p: Series<RatFn>,
    /// `1/s(t)` as a series in `u = 1/t`
    pub sigma: Series<RatFn>,
}

/// The branch involution to `O(z^order)`.
pub fn involution(order: usize) -> Result<Involution> {
    if order < 3 {
        return Err(SpectralError::OrderTooSmall { order, min: 3 });
    }
    let n = order as i64;
    let h = h_series(n)?;
    let sigma = h.reversion()?.compose(&h.neg())?;
    let p = sigma.scale_var(&tau1()).scale(&tau1().try_inv().unwrap());
    Ok(Involution { p, sigma })
}

/// `Σ_k c_k t^k` read as a Laurent series in `u = 1/t`.
fn poly_at_infinity(p: &TPoly, order: i64) -> Series<RatFn> {
    let terms = p.terms().map(|(e, c)| (-(e[0] as i64), c.clone())).collect();
    Series::from_terms(terms, order)
}

/// `p(x)` for a polynomial `p` and a Laurent series `x`, by Horner.
fn poly_at(p: &TPoly, x: &Series<RatFn>, order: i64) -> Series<RatFn> {
    let top = p.total_degree().unwrap_or(0);
    let mut acc = Series::zero(order);
    for d in (0..=top).rev() {
        acc = acc.mul(x).add(&Series::constant(p.coeff(&[d]), order));
    }
    acc
}

/// `Σ_{m ≥ 0} [u^{−m}] f · t^m`
fn polynomial_part(f: &Series<RatFn>) -> Result<TPoly> {
    f.coeff_checked(0)?;
    let mut out = TPoly::zero(1);
    for (k, c) in f.terms() {
        if k <= 0 {
            out.add_term(vec![(-k) as u32], c.clone());
        }
    }
    Ok(out)
}

/// The kernel `K(t', t)` as `k(u')·dt/du'` with `u' = 1/t'`, to `O(u'^order)`; coefficients
/// are polynomials in the external `t`.
pub fn kernel_in_u(order: usize) -> Result<Series<TPoly>> {
    let n = order as i64;
    let work = n + 8;
    let inv = involution(work as usize + 4)?;
    let lift = |s: &Series<RatFn>| s.map_coeffs(|c| TPoly::constant(0, c.clone()));
    let sig = lift(&inv.sigma);
    let u = Series::<TPoly>::var(work);
    let one = Series::<TPoly>::one(work);
    let tq = |c: RatFn| TPoly::constant(0, c);
    let t = TPoly::var(1, 0);
    // Σ t^k x^{k+1} = x/(1 − t x)
    let geo = |x: &Series<TPoly>| -> Result<Series<TPoly>> {
        let d = one.sub(&x.scale(&t));
        Ok(x.mul(&d.inv()?))
    };
    let log1m = |x: &Series<TPoly>| -> Result<Series<TPoly>> { Ok(one.sub(x).log()?) };
    let diff = u.sub(&sig);
    let front = diff.mul(&sig.mul(&u).inv()?);
    let curve = one.sub(&u).mul(&Series::constant(tq(RatFn::tau()), work).add(&u)).shift(-3);
    let l = log1m(&u)?.sub(&log1m(&sig)?);
    let du = u.mul(&u).neg();
    let pre = RatFn::tau().mul(&tau1().scale_q(&qi(2)).try_inv().unwrap());
    let k = front.mul(&curve).mul(&geo(&u)?).mul(&geo(&sig)?).mul(&l.inv()?).mul(&du).scale(&tq(pre));
    Ok(k.truncate(n))
}

/// The kernel `K(t'(z), t)` as `(Σ_k K_k(t) z^k) dt/dz` with `t' = 1/((τ+1)z)`, to `O(z^order)`.
pub fn kernel_expansion(order: usize) -> Result<Series<TPoly>> {
    let k = kernel_in_u(order)?;
    let c = TPoly::constant(0, tau1());
    Ok(k.scale_var(&c).scale(&TPoly::constant(0, tau1().try_inv().unwrap())))
}

/// Series data at `t = ∞` shared by the residue polynomials.
#[derive(Clone, Debug)]
pub struct Spectral {
    order: i64,
    sigma: Series<RatFn>,
    /// `s(t) = 1/σ`
    s: Series<RatFn>,
    /// `1/(ln(1−1/t) − ln(1−1/s(t)))`
    inv_log: Series<RatFn>,
    /// `1/((t²−t)(tτ+1))`
    measure: Series<RatFn>,
    /// `ds/dt`
    ds: Series<RatFn>,
}

impl Spectral {
    /// All series known to `O(u^order)`.
    pub fn new(order: usize) -> Result<Self> {
        let n = order as i64;
        let sigma = involution(order + 2)?.sigma.truncate(n + 2);
        let s = sigma.inv()?;
        let u = Series::<RatFn>::var(n + 2);
        let one = Series::<RatFn>::one(n + 2);
        let l = one.sub(&u).log()?.sub(&one.sub(&sigma).log()?);
        let inv_log = l.inv()?;
        let measure = one.sub(&u).mul(&Series::constant(RatFn::tau(), n + 2).add(&u)).inv()?.shift(3);
        // ds/dt = σ'(u) u²/σ²
        let ds = sigma.derivative().mul(&u.mul(&u)).mul(&s.mul(&s));
        Ok(Spectral { order: n, sigma, s, inv_log, measure, ds })
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn sigma(&self) -> &Series<RatFn> {
        &self.sigma
    }

    pub fn s(&self) -> &Series<RatFn> {
        &self.s
    }

    /// `ln(1−1/t) − ln(1−1/s(t))`
    pub fn log_difference(&self) -> Result<Series<RatFn>> {
        Ok(self.inv_log.inv()?)
    }

    /// `p(t)` as a series in `u`.
    pub fn at_t(&self, p: &TPoly) -> Series<RatFn> {
        poly_at_infinity(p, self.order + 2)
    }

    /// `p(s(t))` as a series in `u`.
    pub fn at_s(&self, p: &TPoly) -> Series<RatFn> {
        poly_at(p, &self.s, self.order + 2)
    }

    /// `P_{a,b}(t)`: the polynomial part of
    /// `−(τ(τ+1)/2)(Ψ̂_{a+1}(t)Ψ̂_{b+1}(s) + Ψ̂_{a+1}(s)Ψ̂_{b+1}(t)) / (L (t²−t)(tτ+1))`.
    pub fn p_ab(&self, psi: &PsiTable, a: usize, b: usize) -> Result<TPoly> {
        let pa = psi.psi_hat(a + 1)?;
        let pb = psi.psi_hat(b + 1)?;
        let sym = self.at_t(pa).mul(&self.at_s(pb)).add(&self.at_s(pa).mul(&self.at_t(pb)));
        let pre = RatFn::tau().mul(&tau1()).scale_q(&qf(-1, 2));
        let f = sym.mul(&self.inv_log).mul(&self.measure).scale(&pre);
        polynomial_part(&f)
    }

    /// `P_n(t, t_i)` (as a polynomial in `t = t_0`, `t_i = t_1`): the polynomial part in `t` of
    /// `−τ(Ψ̂_{n+1}(t) s'(t)/(s−t_i)² + Ψ̂_{n+1}(s)/(t−t_i)²)/L`, expanded at `|t| > |t_i|`.
    pub fn p_n(&self, psi: &PsiTable, n: usize) -> Result<TPoly> {
        let p = psi.psi_hat(n + 1)?;
        let at_t = self.at_t(p).mul(&self.ds);
        let at_s = self.at_s(p);
        let ord = self.order + 2;
        let u = Series::<RatFn>::var(ord);
        let mut out = TPoly::zero(2);
        let top = 2 * n as u32 + 2;
        for k in 0..=top {
            let w = qi(k as i64 + 1);
            let f = at_t
                .mul(&self.sigma.pow(k + 2).truncate(ord))
                .add(&at_s.mul(&u.pow(k + 2).truncate(ord)))
                .mul(&self.inv_log)
                .scale(&RatFn::tau().neg())
                .scale_q(&w);
            let part = polynomial_part(&f)?;
            for (e, c) in part.terms() {
                out.add_term(vec![e[0], k], c.clone());
            }
        }
        Ok(out)
    }
}

/// `u(v)` from `v = r·h(u)`, as a series in `v` over `Q(τ)(r)`.
pub fn u_of_v(order: i64) -> Result<Series<QuadExt>> {
    let hinv = h_series(order)?.reversion()?;
    let lifted = hinv.map_coeffs(|c| QuadExt::from_ratfn(c.clone()));
    let rinv = QuadExt::r().try_inv().unwrap();
    Ok(lifted.scale_var(&rinv))
}

/// `p(1/u(v))` as a Laurent series in `v`.
fn poly_in_v(p: &TPoly, uv: &Series<QuadExt>, order: i64) -> Result<Series<QuadExt>> {
    let t = uv.inv()?;
    let top = p.total_degree().unwrap_or(0);
    let mut acc = Series::zero(order);
    for d in (0..=top).rev() {
        acc = acc.mul(&t).add(&Series::constant(QuadExt::from_ratfn(p.coeff(&[d])), order));
    }
    Ok(acc)
}

fn odd_part<C: Ring>(f: &Series<C>) -> Series<C> {
    f.sub(&f.negate_var()).scale_q(&qf(1, 2))
}

fn even_part<C: Ring>(f: &Series<C>) -> Series<C> {
    f.add(&f.negate_var()).scale_q(&qf(1, 2))
}

/// `−(1/v) d/dv`
pub fn lowering(f: &Series<QuadExt>) -> Series<QuadExt> {
    f.derivative().shift(-1).neg()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaFamily {
    /// `η_{−1}, η_0, …, η_n` in `v`
    pub eta: Vec<Series<QuadExt>>,
    /// `F_{−1}, F_0, …, F_n`, even in `v`, so series in `w = v²/2`
    pub f: Vec<Series<QuadExt>>,
    /// `Ψ̂_{−1}, Ψ̂_0, …, Ψ̂_n` at `t = t(v)`
    pub psi: Vec<Series<QuadExt>>,
}

/// `η_k` and `F_k` for `−1 ≤ k ≤ n`, where `η_k = ½(Ψ̂_k(t) − Ψ̂_k(s(t)))` is the odd part of
/// `Ψ̂_k(t(v))` and `F_k = η_k − Ψ̂_k(t)`.
pub fn eta_family(psi: &PsiTable, n: usize, order: usize) -> Result<EtaFamily> {
    let ord = order as i64 + 2 * n as i64 + 6;
    let uv = u_of_v(ord)?;
    let inv_tau = QuadExt::from_ratfn(RatFn::tau().try_inv().unwrap());
    // Ψ̂_{−1} = −ln(1 + u/τ)
    let one = Series::<QuadExt>::one(ord);
    let m1 = one.add(&uv.scale(&inv_tau)).log()?.neg();
    let mut ps = vec![m1];
    for k in 0..=n {
        ps.push(poly_in_v(psi.psi_hat(k)?, &uv, ord)?);
    }
    let eta: Vec<_> = ps.iter().map(odd_part).collect();
    let f: Vec<_> = ps.iter().map(|p| even_part(p).neg()).collect();
    let cut = order as i64;
    Ok(EtaFamily {
        eta: eta.into_iter().map(|s| s.truncate(cut)).collect(),
        f: f.into_iter().map(|s| s.truncate(cut)).collect(),
        psi: ps.into_iter().map(|s| s.truncate(cut)).collect(),
    })
}

/// `v` as a series in `u = 1/t`.
pub fn v_of_u(order: usize) -> Result<Series<QuadExt>> {
    let h = h_series(order as i64)?;
    Ok(h.map_coeffs(|c| QuadExt::from_ratfn(c.clone())).scale(&QuadExt::r()))
}

/// A symmetric form `Σ_b w_b Π dΨ̂_{b_i}(t_i)` of type (g,l), stored by its coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct WForm {
    pub g: u32,
    pub l: usize,
    pub coeffs: BTreeMap<Vec<u32>, RatFn>,
}

fn dpsi(psi: &PsiTable, b: u32, arity: usize, i: usize) -> Result<TPoly> {
    Ok(psi.psi_hat_at(b as usize, arity, i)?.derivative(i))
}

fn dpsi_product(psi: &PsiTable, b: &[u32], at: &[usize], arity: usize) -> Result<TPoly> {
    let mut p = TPoly::one(arity);
    for (&x, &i) in b.iter().zip(at) {
        p = p.mul(&dpsi(psi, x, arity, i)?);
    }
    Ok(p)
}

impl WForm {
    /// Coefficient of `dt_1⋯dt_l`.
    pub fn poly(&self, psi: &PsiTable) -> Result<TPoly> {
        let all: Vec<usize> = (0..self.l).collect();
        let mut acc = TPoly::zero(self.l);
        for (b, c) in &self.coeffs {
            acc.add_assign(&dpsi_product(psi, b, &all, self.l)?.scale(c));
        }
        Ok(acc)
    }

    /// Reads the coefficients back off a polynomial by peeling leading monomials.
    pub fn from_poly(g: u32, l: usize, p: &TPoly, psi: &PsiTable) -> Result<WForm> {
        let all: Vec<usize> = (0..l).collect();
        let mut rest = p.clone();
        let mut coeffs = BTreeMap::new();
        while let Some((e, c)) = rest.terms().last().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().any(|x| x % 2 == 1) {
                return Err(SpectralError::NotInBasis);
            }
            let b: Vec<u32> = e.iter().map(|x| x / 2).collect();
            let basis = dpsi_product(psi, &b, &all, l)?;
            let lead = basis.coeff(&e);
            let w = c.mul(&lead.try_inv().ok_or(SpectralError::NotInBasis)?);
            rest.sub_assign(&basis.scale(&w));
            coeffs.insert(b, w);
        }
        Ok(WForm { g, l, coeffs })
    }

    /// `(τ²+τ)^{l−1}⟨τ_b Γ_g⟩ = (−1)^{g+l} w_b`
    fn data(&self, b: &[u32]) -> RatFn {
        let w = self.coeffs.get(b).cloned().unwrap_or_else(RatFn::zero);
        w.scale_q(&sign(self.g as i64 + self.l as i64))
    }
}

fn q_tau() -> RatFn {
    RatFn::poly(UPoly::from_ints(&[0, 1, 1]))
}

/// `(−1)^{g+l−1} d^{⊗l}Ĉ_{g,l}` from the Hodge side.
pub fn hodge_wform(c: &mut Correlators, g: u32, l: usize) -> Result<WForm> {
    if 2 * g as i64 - 2 + l as i64 <= 0 {
        return Err(SpectralError::Signature { g, l });
    }
    let pre = q_tau().pow(l as u32 - 1).scale_q(&sign(g as i64 + l as i64));
    let mut coeffs = BTreeMap::new();
    for b in compositions_up_to(l, 3 * g + l as u32 - 3) {
        let v = c.get(Insertion::Gamma, g, &b)?;
        if !v.is_zero() {
            coeffs.insert(b, RatFn::poly(v).mul(&pre));
        }
    }
    Ok(WForm { g, l, coeffs })
}

/// `W_{0,3} = −τ²/(τ+1)` and `W_{1,1} = ((1+τ+τ²)dΨ̂_0 − τ(τ+1)dΨ̂_1)/24`.
pub fn initial_data() -> (WForm, WForm) {
    let mut a = BTreeMap::new();
    a.insert(vec![0, 0, 0], q_tau().pow(2).neg());
    let mut b = BTreeMap::new();
    b.insert(vec![0], RatFn::poly(UPoly::from_ints(&[1, 1, 1])).scale_q(&qf(1, 24)));
    b.insert(vec![1], q_tau().scale_q(&qf(-1, 24)));
    (WForm { g: 0, l: 3, coeffs: a }, WForm { g: 1, l: 1, coeffs: b })
}

/// Memoized residue polynomials over one set of series.
#[derive(Clone, Debug)]
pub struct Residues<'a> {
    psi: &'a PsiTable,
    series: Spectral,
    pab: BTreeMap<(usize, usize), TPoly>,
    pn: BTreeMap<usize, TPoly>,
}

impl<'a> Residues<'a> {
    pub fn new(psi: &'a PsiTable, order: usize) -> Result<Self> {
        Ok(Residues { psi, series: Spectral::new(order)?, pab: BTreeMap::new(), pn: BTreeMap::new() })
    }

    fn grow(&mut self) -> Result<()> {
        let n = 2 * self.series.order() as usize;
        self.series = Spectral::new(n)?;
        Ok(())
    }

    pub fn p_ab(&mut self, a: usize, b: usize) -> Result<TPoly> {
        let key = (a.min(b), a.max(b));
        if let Some(p) = self.pab.get(&key) {
            return Ok(p.clone());
        }
        let p = match self.series.p_ab(self.psi, key.0, key.1) {
            Err(SpectralError::Truncated { .. }) => {
                self.grow()?;
                self.series.p_ab(self.psi, key.0, key.1)?
            }
            r => r?,
        };
        self.pab.insert(key, p.clone());
        Ok(p)
    }

    pub fn p_n(&mut self, n: usize) -> Result<TPoly> {
        if let Some(p) = self.pn.get(&n) {
            return Ok(p.clone());
        }
        let p = match self.series.p_n(self.psi, n) {
            Err(SpectralError::Truncated { .. }) => {
                self.grow()?;
                self.series.p_n(self.psi, n)?
            }
            r => r?,
        };
        self.pn.insert(n, p.clone());
        Ok(p)
    }
}

/// Two-point residue polynomial placed at `(t_0, t_i)` in arity `l`.
fn place_pair(p: &TPoly, i: usize, l: usize) -> TPoly {
    p.embed(&[0, i], l)
}

/// Right side of the recursion for `(g,l)`, as the coefficient of `dt_1⋯dt_l` (with `t_1`
/// the distinguished point), from the data of lower forms.
pub fn recursion_rhs(
    res: &mut Residues,
    lower: &mut dyn FnMut(u32, usize) -> Result<WForm>,
    g: u32,
    l: usize,
) -> Result<TPoly> {
    let psi = res.psi;
    let mut acc = TPoly::zero(l);
    if l >= 2 {
        let w = lower(g, l - 1)?;
        for i in 1..l {
            let rest: Vec<usize> = (1..l).filter(|&k| k != i).collect();
            for ab in w.coeffs.keys() {
                let d = w.data(ab);
                let pa = place_pair(&res.p_n(ab[0] as usize)?, i, l);
                let t = pa.mul(&dpsi_product(psi, &ab[1..], &rest, l)?);
                acc.sub_assign(&t.scale(&d));
            }
        }
    }
    let others: Vec<usize> = (1..l).collect();
    if g >= 1 {
        let w = lower(g - 1, l + 1)?;
        for ab in w.coeffs.keys() {
            let d = w.data(ab);
            let p = res.p_ab(ab[0] as usize, ab[1] as usize)?.embed(&[0], l);
            acc.add_assign(&p.mul(&dpsi_product(psi, &ab[2..], &others, l)?).scale(&d));
        }
    }
    for g1 in 0..=g {
        let g2 = g - g1;
        for mask in 0u32..(1 << others.len()) {
            let ii: Vec<usize> = (0..others.len()).filter(|k| mask >> k & 1 == 1).map(|k| others[k]).collect();
            let jj: Vec<usize> = (0..others.len()).filter(|k| mask >> k & 1 == 0).map(|k| others[k]).collect();
            if 2 * g1 as i64 - 1 + ii.len() as i64 <= 0 || 2 * g2 as i64 - 1 + jj.len() as i64 <= 0 {
                continue;
            }
            let w1 = lower(g1, ii.len() + 1)?;
            let w2 = lower(g2, jj.len() + 1)?;
            for a in w1.coeffs.keys() {
                let d1 = w1.data(a);
                for b in w2.coeffs.keys() {
                    let d2 = w2.data(b);
                    let p = res.p_ab(a[0] as usize, b[0] as usize)?.embed(&[0], l);
                    let t = p.mul(&dpsi_product(psi, &a[1..], &ii, l)?).mul(&dpsi_product(psi, &b[1..], &jj, l)?);
                    acc.sub_assign(&t.scale(&d1.mul(&d2)));
                }
            }
        }
    }
    Ok(acc)
}

/// Forms produced by the recursion from the initial data alone.
#[derive(Clone, Debug)]
pub struct Recursion<'a> {
    res: Residues<'a>,
    forms: BTreeMap<(u32, usize), WForm>,
}

fn stable(g: u32, l: usize) -> bool {
    2 * g as i64 - 2 + l as i64 > 0
}

impl<'a> Recursion<'a> {
    pub fn new(psi: &'a PsiTable, order: usize) -> Result<Self> {
        let (w03, w11) = initial_data();
        let mut forms = BTreeMap::new();
        forms.insert((0, 3), w03);
        forms.insert((1, 1), w11);
        Ok(Recursion { res: Residues::new(psi, order)?, forms })
    }

    pub fn residues(&mut self) -> &mut Residues<'a> {
        &mut self.res
    }

    /// `W_{g,l}`; lower forms are built first and kept.
    pub fn form(&mut self, g: u32, l: usize) -> Result<WForm> {
        if let Some(w) = self.forms.get(&(g, l)) {
            return Ok(w.clone());
        }
        if !stable(g, l) || l == 0 {
            return Err(SpectralError::Signature { g, l });
        }
        if l >= 2 && stable(g, l - 1) {
            self.form(g, l - 1)?;
        }
        if g >= 1 {
            self.form(g - 1, l + 1)?;
        }
        for g1 in 0..=g {
            for k in 0..l {
                if stable(g1, k + 1) && stable(g - g1, l - k) {
                    self.form(g1, k + 1)?;
                }
            }
        }
        let forms = &self.forms;
        let mut lower = |g: u32, l: usize| forms.get(&(g, l)).cloned().ok_or(SpectralError::Signature { g, l });
        let p = recursion_rhs(&mut self.res, &mut lower, g, l)?;
        let w = WForm::from_poly(g, l, &p.scale_q(&sign(g as i64 + l as i64)), self.res.psi)?;
        self.forms.insert((g, l), w.clone());
        Ok(w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BmReport {
    pub g: u32,
    pub l: usize,
    /// recursion output minus the Hodge-side form
    pub residual: TPoly,
    /// the recursion step with Hodge-side data on both sides
    pub hodge_residual: TPoly,
    pub pass: bool,
}

/// Compares `W_{g,l}` from the recursion against `(−1)^{g+l−1}d^{⊗l}Ĉ_{g,l}`.
pub fn verify_bm(c: &mut Correlators, rec: &mut Recursion, g: u32, l: usize) -> Result<BmReport> {
    let psi = rec.res.psi;
    let want = hodge_wform(c, g, l)?.poly(psi)?;
    let got = rec.form(g, l)?.poly(psi)?;
    let residual = got.sub(&want);
    let mut lower_err = None;
    let mut lower = |g: u32, l: usize| -> Result<WForm> {
        match hodge_wform(c, g, l) {
            Ok(w) => Ok(w),
            Err(e) => {
                lower_err = Some(e.clone());
                Err(e)
            }
        }
    };
    let rhs = if (g, l) == (0, 3) || (g, l) == (1, 1) {
        let (a, b) = initial_data();
        let w = if g == 0 { a } else { b };
        w.poly(psi)?.scale_q(&sign(g as i64 + l as i64))
    } else {
        recursion_rhs(&mut rec.res, &mut lower, g, l)?
    };
    let hodge_residual = rhs.scale_q(&sign(g as i64 + l as i64)).sub(&want);
    let pass = residual.is_zero() && hodge_residual.is_zero();
    Ok(BmReport { g, l, residual, hodge_residual, pass })
}

/// Drops monomials of total degree above `n`.
fn truncate_total(p: &TPoly, n: u32) -> TPoly {
    let mut out = TPoly::zero(p.arity());
    for (e, c) in p.terms() {
        if e.iter().sum::<u32>() <= n {
            out.add_term(e.clone(), c.clone());
        }
    }
    out
}

fn mul_total(a: &TPoly, b: &TPoly, n: u32) -> TPoly {
    truncate_total(&a.mul(b), n)
}

/// `ln(1+X)` for `X` without constant term, to total degree `n`.
fn log1p_total(x: &TPoly, n: u32) -> TPoly {
    let mut acc = TPoly::zero(x.arity());
    let mut pw = TPoly::one(x.arity());
    for k in 1..=n {
        pw = mul_total(&pw, x, n);
        let s = if k % 2 == 1 { 1 } else { -1 };
        acc.add_assign(&pw.scale_q(&qf(s, k as i64)));
    }
    acc
}

/// `f(x_i)` for a univariate series, as a polynomial in `(x_0, x_1)` up to degree `n`.
fn at_variable(f: &Series<RatFn>, i: usize, n: u32) -> TPoly {
    let mut out = TPoly::zero(2);
    for (k, c) in f.terms() {
        if k >= 0 && k as u32 <= n {
            let mut e = vec![0, 0];
            e[i] = k as u32;
            out.add_term(e, c.clone());
        }
    }
    out
}

/// `Σ_k f_k h_{k+shift}(x_0, x_1)` with `h_m` the complete homogeneous polynomial, up to degree `n`.
fn divided_difference(f: &Series<RatFn>, shift: i64, n: u32) -> TPoly {
    let mut out = TPoly::zero(2);
    for (k, c) in f.terms() {
        let m = k + shift;
        if m < 0 || m as u32 > n {
            continue;
        }
        for i in 0..=m as u32 {
            out.add_term(vec![i, m as u32 - i], c.clone());
        }
    }
    out
}

/// Left side minus right side of the (0,2) transform identity
/// `−Σ_{α,β≥1} ((τ+1)/τ)(1/(α+β)) A_α A_β x_1^α x_2^β = −ln((y_1−y_2)/(x_1−x_2)) − τ(ln(1−y_1)+ln(1−y_2))`,
/// with `A_k = Π_{a=0}^{k−1}(kτ+a)/k!`, to total degree `order`.
pub fn pair_log_residual(order: u32) -> Result<TPoly> {
    let n = order;
    let cs = curve_series(n as usize + 2)?;
    let mut lhs = TPoly::zero(2);
    let pre = tau1().mul(&RatFn::tau().try_inv().unwrap()).neg();
    for a in 1..n {
        for b in 1..=n - a {
            let c = t_coefficient(a).mul(&t_coefficient(b)).mul(&pre).scale_q(&qf(1, (a + b) as i64));
            lhs.add_term(vec![a, b], c);
        }
    }
    // (y_1 − y_2)/(x_1 − x_2) − 1
    let quot = divided_difference(&cs.y, -1, n).sub(&TPoly::one(2));
    let mut rhs = log1p_total(&quot, n).neg();
    for i in 0..2 {
        let l = Series::one(n as i64 + 1).sub(&cs.y).log()?;
        rhs.sub_assign(&at_variable(&l, i, n).scale(&RatFn::tau()));
    }
    Ok(lhs.sub(&rhs))
}

/// Left side minus right side of
/// `Σ_{α,β≥1} (1/τ)A_{α+β}(α+β)^{a+1} x_i^α x_j^β = (x_iΨ̂_{a+1}(t_i) − x_jΨ̂_{a+1}(t_j))/(x_i−x_j) − Ψ̂_{a+1}(t_i) − Ψ̂_{a+1}(t_j)`,
/// with `Ψ̂_{a+1}(t(x))` obtained by substituting the curve series into the polynomial.
pub fn merged_sum_residual(psi: &PsiTable, a: usize, order: u32) -> Result<TPoly> {
    let n = order;
    let cs = curve_series(n as usize + 1)?;
    let inv_tau = RatFn::tau().try_inv().unwrap();
    let mut lhs = TPoly::zero(2);
    for m in 2..=n {
        let c = t_coefficient(m).mul(&inv_tau).scale_q(&Q::from_integer((m as i64).pow(a as u32 + 1).into()));
        for i in 1..m {
            lhs.add_term(vec![i, m - i], c.clone());
        }
    }
    let p = poly_at(psi.psi_hat(a + 1)?, &cs.t, n as i64 + 1);
    let mut rhs = divided_difference(&p, 0, n);
    rhs.sub_assign(&at_variable(&p, 0, n));
    rhs.sub_assign(&at_variable(&p, 1, n));
    Ok(lhs.sub(&rhs))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnstableSeriesReport {
    pub order: u32,
    /// nonzero coefficients left in the pair identity
    pub pair_log_terms: usize,
    /// `(a, nonzero coefficients)` for the merged-sum identity
    pub merged_terms: Vec<(usize, usize)>,
    pub pass: bool,
}

/// Both two-variable identities to total degree `order`, the second for `0 ≤ a ≤ max_a`.
pub fn unstable_series_checks(psi: &PsiTable, order: u32, max_a: usize) -> Result<UnstableSeriesReport> {
    if order < 4 {
        return Err(SpectralError::OrderTooSmall { order: order as usize, min: 4 });
    }
    let pair_log_terms = pair_log_residual(order)?.terms().count();
    let mut merged_terms = Vec::new();
    for a in 0..=max_a {
        merged_terms.push((a, merged_sum_residual(psi, a, order)?.terms().count()));
    }
    let pass = pair_log_terms == 0 && merged_terms.iter().all(|x| x.1 == 0);
    Ok(UnstableSeriesReport { order, pair_log_terms, merged_terms, pass })
}
