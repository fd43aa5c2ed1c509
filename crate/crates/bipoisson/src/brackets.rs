//! Construction of the linear and quadratic bracket tables, the quadratic
//! hamiltonian, and its flow field; restriction to the traceless subspace.
//!
//! A bracket is materialized as a finite antisymmetric table over the
//! coordinate set {S_ij} ∪ {S₀}: only pairs u < v are stored, `{v,u}` is
//! served as the negation, and `{u,u}` is zero. Evaluating the bracket of
//! two polynomials is then the usual biderivation sum over table entries.
//!
//! The quadratic table depends on a solution datum (c, b) of the tensor
//! equation and on a nonzero rational scale λ applied to its S₀ row. The
//! scale arises from pushing the one-parameter family of bivectors
//! S₀·π₁ − κ·V∧∂/∂S₀ (V the flow field of the hamiltonian below) through
//! the rescaling S₀ ↦ κS₀, which turns the irrational normalization κ into
//! the rational λ = κ² while leaving the S-S rows untouched.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::poly::{rat, ratq, Polynomial, Rational, VarId};
use crate::tensor::Tensor4;

/// Errors for structurally invalid bracket construction or use.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BracketError {
    #[error("the S0-row scale lambda must be nonzero")]
    LambdaZero,
    #[error("dimension mismatch: N={0} vs N={1}")]
    DimensionMismatch(u8, u8),
    #[error("function uses coordinate {0} outside the table's coordinate set")]
    ForeignCoordinate(VarId),
    #[error("restriction is unsound: trace is not a Casimir, {{{coord}, tr}} = {residual}")]
    TraceNotCasimir { coord: VarId, residual: String },
    #[error("table is already restricted")]
    AlreadyRestricted,
}

fn s(i: u8, j: u8) -> Polynomial {
    Polynomial::var(VarId::S(i, j))
}

/// The ordered coordinate set of a bracket table: all S_ij row-major, then
/// S₀. In the restricted variant the last diagonal coordinate S_NN is
/// eliminated (it stands for −Σ_{i<N} S_ii).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordSet {
    n: u8,
    restricted: bool,
}

impl CoordSet {
    /// All N² matrix coordinates plus S₀.
    pub fn full(n: u8) -> Self {
        assert!(n >= 2, "coordinate dimension must be at least 2");
        CoordSet {
            n,
            restricted: false,
        }
    }

    /// Matrix coordinates with S_NN eliminated, plus S₀.
    pub fn restricted(n: u8) -> Self {
        assert!(n >= 2, "coordinate dimension must be at least 2");
        CoordSet {
            n,
            restricted: true,
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    pub fn contains(&self, v: VarId) -> bool {
        match v {
            VarId::S(i, j) => {
                (1..=self.n).contains(&i)
                    && (1..=self.n).contains(&j)
                    && !(self.restricted && i == self.n && j == self.n)
            }
            VarId::S0 => true,
            _ => false,
        }
    }

    /// Members in canonical order.
    pub fn members(&self) -> Vec<VarId> {
        let mut out = Vec::with_capacity(self.len());
        for i in 1..=self.n {
            for j in 1..=self.n {
                if !(self.restricted && i == self.n && j == self.n) {
                    out.push(VarId::S(i, j));
                }
            }
        }
        out.push(VarId::S0);
        out
    }

    pub fn len(&self) -> usize {
        (self.n as usize).pow(2) + 1 - usize::from(self.restricted)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// −Σ_{i<N} S_ii, the value the eliminated coordinate stands for.
    pub fn trace_complement(&self) -> Polynomial {
        let mut p = Polynomial::zero();
        for i in 1..self.n {
            p.sub_assign(&s(i, i));
        }
        p
    }
}

/// Finite antisymmetric bracket table over a [`CoordSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTable {
    coords: CoordSet,
    lambda: Option<Rational>,
    entries: BTreeMap<(VarId, VarId), Polynomial>,
}

impl BracketTable {
    pub fn empty(coords: CoordSet, lambda: Option<Rational>) -> Self {
        BracketTable {
            coords,
            lambda,
            entries: BTreeMap::new(),
        }
    }

    pub fn coords(&self) -> &CoordSet {
        &self.coords
    }

    pub fn n(&self) -> u8 {
        self.coords.n()
    }

    pub fn is_restricted(&self) -> bool {
        self.coords.is_restricted()
    }

    /// The S₀-row scale this table was built with, when applicable.
    pub fn lambda(&self) -> Option<&Rational> {
        self.lambda.as_ref()
    }

    /// Store `{u,v} = p` for an ordered pair u < v of member coordinates.
    pub fn set_entry(&mut self, u: VarId, v: VarId, p: Polynomial) {
        assert!(u < v, "bracket entries are stored with u < v, got {u}, {v}");
        assert!(
            self.coords.contains(u) && self.coords.contains(v),
            "pair ({u},{v}) outside the coordinate set"
        );
        if p.is_zero() {
            self.entries.remove(&(u, v));
        } else {
            self.entries.insert((u, v), p);
        }
    }

    /// Stored (u < v) entries in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&(VarId, VarId), &Polynomial)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// `{u,v}` for any member coordinates: antisymmetry is structural.
    pub fn entry(&self, u: VarId, v: VarId) -> Polynomial {
        assert!(
            self.coords.contains(u) && self.coords.contains(v),
            "pair ({u},{v}) outside the coordinate set"
        );
        match u.cmp(&v) {
            std::cmp::Ordering::Equal => Polynomial::zero(),
            std::cmp::Ordering::Less => self
                .entries
                .get(&(u, v))
                .cloned()
                .unwrap_or_else(Polynomial::zero),
            std::cmp::Ordering::Greater => self
                .entries
                .get(&(v, u))
                .map(|p| -p)
                .unwrap_or_else(Polynomial::zero),
        }
    }

    /// The Poisson bracket of two polynomial functions of the member
    /// coordinates (scalar parameters act as constants):
    /// Σ_{u<v} {u,v}·(∂f/∂u ∂g/∂v − ∂f/∂v ∂g/∂u).
    pub fn bracket(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial, BracketError> {
        for h in [f, g] {
            for v in h.variables() {
                if v.is_coordinate() && !self.coords.contains(v) {
                    return Err(BracketError::ForeignCoordinate(v));
                }
            }
        }
        let mut df: BTreeMap<VarId, Polynomial> = BTreeMap::new();
        let mut dg: BTreeMap<VarId, Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (&(u, v), p) in &self.entries {
            let fu = df.entry(u).or_insert_with(|| f.partial(u)).clone();
            let fv = df.entry(v).or_insert_with(|| f.partial(v)).clone();
            let gu = dg.entry(u).or_insert_with(|| g.partial(u)).clone();
            let gv = dg.entry(v).or_insert_with(|| g.partial(v)).clone();
            let mut cross = &fu * &gv;
            cross.sub_assign(&(&fv * &gu));
            out.add_assign(&(p * &cross));
        }
        Ok(out)
    }

    /// Eliminate S_NN: every entry has S_NN replaced by −Σ_{i<N} S_ii and
    /// rows involving S_NN are dropped. Restriction is only meaningful when
    /// the trace Σ_k S_kk is a Casimir of the table, so that is verified
    /// first and a failure refuses to restrict.
    pub fn restrict_sl(&self) -> Result<BracketTable, BracketError> {
        if self.coords.is_restricted() {
            return Err(BracketError::AlreadyRestricted);
        }
        let n = self.coords.n();
        let mut trace = Polynomial::zero();
        for i in 1..=n {
            trace.add_assign(&s(i, i));
        }
        for u in self.coords.members() {
            let r = self.bracket(&Polynomial::var(u), &trace)?;
            if !r.is_zero() {
                return Err(BracketError::TraceNotCasimir {
                    coord: u,
                    residual: r.to_string(),
                });
            }
        }
        let coords = CoordSet::restricted(n);
        let last = VarId::S(n, n);
        let replacement = coords.trace_complement();
        let mut out = BracketTable::empty(coords, self.lambda.clone());
        for (&(u, v), p) in &self.entries {
            if u == last || v == last {
                continue;
            }
            out.set_entry(u, v, p.substitute(last, &replacement));
        }
        Ok(out)
    }
}

/// The linear bracket table on all matrix coordinates plus S₀:
/// {S_ij,S_kl}₁ = δ_jk S_il − δ_li S_kj and {S₀,·}₁ = 0.
pub fn linear_bracket(n: u8) -> BracketTable {
    let coords = CoordSet::full(n);
    let mut t = BracketTable::empty(coords, None);
    let members = coords.members();
    for (a, &u) in members.iter().enumerate() {
        for &v in &members[a + 1..] {
            let (VarId::S(i, j), VarId::S(k, l)) = (u, v) else {
                continue; // S₀ commutes with everything
            };
            let mut p = Polynomial::zero();
            if j == k {
                p.add_assign(&s(i, l));
            }
            if l == i {
                p.sub_assign(&s(k, j));
            }
            if !p.is_zero() {
                t.set_entry(u, v, p);
            }
        }
    }
    t
}

/// Contraction chain D_{abn′m′} = Σ_{m,n} c_{abnm} c_{mnn′m′} shared by the
/// hamiltonian and its flow field.
fn c_chain(c: &Tensor4) -> BTreeMap<(u8, u8, u8, u8), Polynomial> {
    let mut d: BTreeMap<(u8, u8, u8, u8), Polynomial> = BTreeMap::new();
    for (&(a, w, nn, m), p) in c.entries() {
        for (&(m2, n2, np, mp), q) in c.entries() {
            if m2 == m && n2 == nn {
                d.entry((a, w, np, mp)).or_default().add_assign(&(p * q));
            }
        }
    }
    d.retain(|_, v| !v.is_zero());
    d
}

/// The quadratic hamiltonian of the datum:
/// H = ½ Σ c_{klnm} c_{mnn′m′} S_lk S_m′n′ − Σ b_{klnm} S_mn S_lk.
///
/// The sum over b collects b with its pair swap, so H only ever sees the
/// pair-symmetric part of b; the datum is expected to carry a symmetric b
/// (see `validate_b`).
pub fn hamiltonian(c: &Tensor4, b: &Tensor4) -> Polynomial {
    assert_eq!(c.n(), b.n(), "hamiltonian needs matching dimensions");
    let mut h = Polynomial::zero();
    for (&(k, l, nn, m), q) in b.entries() {
        h.sub_assign(&(q * &(&s(m, nn) * &s(l, k))));
    }
    let half = ratq(1, 2);
    for ((k, l, np, mp), d) in c_chain(c) {
        h.add_assign(&(&d.scale(&half) * &(&s(l, k) * &s(mp, np))));
    }
    h
}

/// Polynomial vector field: one component per matrix coordinate (the S₀
/// component is identically zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorFieldX {
    n: u8,
    restricted: bool,
    components: BTreeMap<VarId, Polynomial>,
}

impl VectorFieldX {
    fn new(n: u8) -> Self {
        VectorFieldX {
            n,
            restricted: false,
            components: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    fn add_to(&mut self, v: VarId, p: Polynomial) {
        if p.is_zero() {
            return;
        }
        let slot = self.components.entry(v).or_default();
        slot.add_assign(&p);
        if slot.is_zero() {
            self.components.remove(&v);
        }
    }

    /// Component at a coordinate (zero when absent).
    pub fn component(&self, v: VarId) -> Polynomial {
        self.components
            .get(&v)
            .cloned()
            .unwrap_or_else(Polynomial::zero)
    }

    /// Nonzero components in canonical coordinate order.
    pub fn components(&self) -> impl Iterator<Item = (&VarId, &Polynomial)> {
        self.components.iter()
    }

    /// Apply as a derivation: V(f) = Σ_u V_u ∂f/∂u.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (v, p) in &self.components {
            let df = f.partial(*v);
            if !df.is_zero() {
                out.add_assign(&(p * &df));
            }
        }
        out
    }

    /// Eliminate S_NN from all components and drop the S_NN component.
    pub fn restrict_sl(&self) -> VectorFieldX {
        let last = VarId::S(self.n, self.n);
        let replacement = CoordSet::restricted(self.n).trace_complement();
        let mut out = VectorFieldX::new(self.n);
        out.restricted = true;
        for (&v, p) in &self.components {
            if v == last {
                continue;
            }
            out.add_to(v, p.substitute(last, &replacement));
        }
        out
    }
}

/// The flow field of [`hamiltonian`] under the linear bracket, component
/// V_kl = {S_kl, H}₁:
///
/// ```text
/// V_kl = Σ (c_{slnm} c_{mnn′m′} S_m′n′ S_ks − c_{ksnm} c_{mnn′m′} S_m′n′ S_sl)
///      + 2 Σ (b_{ksnm} S_mn S_sl − b_{slnm} S_mn S_ks)
/// ```
///
/// The closed form is used here; the generic bracket engine recomputes the
/// same field as {S_kl, H}₁ and the two must agree exactly (tested), which
/// pins the orientation: the table's S₀ row satisfies
/// {S₀,S_kl}₂ = λ·V_kl = −λ·{H,S_kl}₁.
///
/// The factor 2 in the b-terms collapses b with its pair swap, so the two
/// routes coincide only for pair-symmetric b — the expected shape of a
/// datum (see `validate_b`).
pub fn ham_vector_field(c: &Tensor4, b: &Tensor4) -> VectorFieldX {
    assert_eq!(c.n(), b.n(), "flow field needs matching dimensions");
    let n = c.n();
    let d = c_chain(c);
    let mut field = VectorFieldX::new(n);
    for (&(ss, l, np, mp), dv) in &d {
        // +Σ_s D_{sl,n′m′} S_m′n′ S_ks
        for k in 1..=n {
            field.add_to(VarId::S(k, l), dv * &(&s(mp, np) * &s(k, ss)));
        }
    }
    for (&(k, ss, np, mp), dv) in &d {
        // −Σ_s D_{ks,n′m′} S_m′n′ S_sl
        for l in 1..=n {
            field.add_to(VarId::S(k, l), -&(dv * &(&s(mp, np) * &s(ss, l))));
        }
    }
    for (&(k, ss, nn, m), q) in b.entries() {
        // +2Σ_s b_{ksnm} S_mn S_sl
        let q2 = q.scale(&rat(2));
        for l in 1..=n {
            field.add_to(VarId::S(k, l), &q2 * &(&s(m, nn) * &s(ss, l)));
        }
    }
    for (&(ss, l, nn, m), q) in b.entries() {
        // −2Σ_s b_{slnm} S_mn S_ks
        let q2 = q.scale(&rat(-2));
        for k in 1..=n {
            field.add_to(VarId::S(k, l), &q2 * &(&s(m, nn) * &s(k, ss)));
        }
    }
    field
}

/// The quadratic bracket table of a solution datum (c, b) with S₀-row scale
/// λ ≠ 0:
///
/// ```text
/// {S_ij,S_kl}₂ = S₀(δ_jk S_il − δ_li S_kj)
///              + Σ (c_{kjnm} S_mn S_il − c_{ilnm} S_mn S_kj)
///              + Σ (c_{iskt} S_sj S_tl − c_{sjtl} S_is S_kt)
/// {S₀,S_kl}₂  = λ·V_kl        (V from [`ham_vector_field`])
/// ```
pub fn quadratic_bracket(
    c: &Tensor4,
    b: &Tensor4,
    lambda: &Rational,
) -> Result<BracketTable, BracketError> {
    if lambda.is_zero() {
        return Err(BracketError::LambdaZero);
    }
    if c.n() != b.n() {
        return Err(BracketError::DimensionMismatch(c.n(), b.n()));
    }
    let n = c.n();
    let coords = CoordSet::full(n);
    let mut t = BracketTable::empty(coords, Some(lambda.clone()));
    let members = coords.members();
    for (a, &u) in members.iter().enumerate() {
        for &v in &members[a + 1..] {
            let (VarId::S(i, j), VarId::S(k, l)) = (u, v) else {
                continue; // S₀ rows are filled below
            };
            let mut p = Polynomial::zero();
            if j == k {
                p.add_assign(&(&Polynomial::var(VarId::S0) * &s(i, l)));
            }
            if l == i {
                p.sub_assign(&(&Polynomial::var(VarId::S0) * &s(k, j)));
            }
            for (&(e1, e2, e3, e4), q) in c.entries() {
                // c_{kjnm} S_mn S_il
                if e1 == k && e2 == j {
                    p.add_assign(&(q * &(&s(e4, e3) * &s(i, l))));
                }
                // −c_{ilnm} S_mn S_kj
                if e1 == i && e2 == l {
                    p.sub_assign(&(q * &(&s(e4, e3) * &s(k, j))));
                }
                // c_{iskt} S_sj S_tl
                if e1 == i && e3 == k {
                    p.add_assign(&(q * &(&s(e2, j) * &s(e4, l))));
                }
                // −c_{sjtl} S_is S_kt
                if e2 == j && e4 == l {
                    p.sub_assign(&(q * &(&s(i, e1) * &s(k, e3))));
                }
            }
            if !p.is_zero() {
                t.set_entry(u, v, p);
            }
        }
    }
    let field = ham_vector_field(c, b);
    let neg_lambda = -lambda.clone();
    for k in 1..=n {
        for l in 1..=n {
            // Stored pair is (S_kl, S₀) since S₀ sorts last, so the stored
            // value is {S_kl,S₀}₂ = −{S₀,S_kl}₂ = −λ·V_kl.
            let vkl = field.component(VarId::S(k, l));
            if !vkl.is_zero() {
                t.set_entry(VarId::S(k, l), VarId::S0, vkl.scale(&neg_lambda));
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::tensor::validate_c;

    fn p(src: &str) -> Polynomial {
        Polynomial::parse(src).unwrap()
    }

    /// The single antisymmetrized off-diagonal c used by several tests:
    /// c_{2131} = 6, c_{3121} = −6 on N=3.
    fn c_single_pair() -> Tensor4 {
        let mut c = Tensor4::new(3);
        c.set((2, 1, 3, 1), Polynomial::int(6));
        c.set((3, 1, 2, 1), Polynomial::int(-6));
        c
    }

    fn sym_b_n2() -> Tensor4 {
        let mut b = Tensor4::new(2);
        b.set((1, 2, 2, 1), Polynomial::int(1));
        b.set((2, 1, 1, 2), Polynomial::int(1));
        b
    }

    fn wedge_c_n2() -> Tensor4 {
        let mut c = Tensor4::new(2);
        c.set((1, 2, 2, 1), Polynomial::int(1));
        c.set((2, 1, 1, 2), Polynomial::int(-1));
        c
    }

    #[test]
    fn linear_bracket_worked_entries() {
        let t = linear_bracket(3);
        assert_eq!(
            t.entry(VarId::S(1, 2), VarId::S(2, 1)),
            p("S[1,1] - S[2,2]")
        );
        assert_eq!(t.entry(VarId::S(1, 2), VarId::S(3, 1)), p("-S[3,2]"));
        for k in 1..=3 {
            for l in 1..=3 {
                assert!(t.entry(VarId::S0, VarId::S(k, l)).is_zero());
            }
        }
        // Structural antisymmetry and vanishing diagonal.
        assert_eq!(
            t.entry(VarId::S(2, 1), VarId::S(1, 2)),
            p("S[2,2] - S[1,1]")
        );
        assert!(t.entry(VarId::S(1, 2), VarId::S(1, 2)).is_zero());
        // Degree-1 homogeneity of every entry.
        for (_, e) in t.entries() {
            for (m, _) in e.terms() {
                assert_eq!(m.total_degree(), 1);
            }
        }
    }

    /// Independent direct-summation evaluation of the quadratic S-S row,
    /// looping over all internal indices with no sparsity shortcuts.
    fn qpb_entry_by_direct_sums(c: &Tensor4, i: u8, j: u8, k: u8, l: u8) -> Polynomial {
        let n = c.n();
        let s0 = Polynomial::var(VarId::S0);
        let mut out = Polynomial::zero();
        if j == k {
            out.add_assign(&(&s0 * &s(i, l)));
        }
        if l == i {
            out.sub_assign(&(&s0 * &s(k, j)));
        }
        for m in 1..=n {
            for nn in 1..=n {
                out.add_assign(&(&c.get(k, j, nn, m) * &(&s(m, nn) * &s(i, l))));
                out.sub_assign(&(&c.get(i, l, nn, m) * &(&s(m, nn) * &s(k, j))));
            }
        }
        for ss in 1..=n {
            for tt in 1..=n {
                out.add_assign(&(&c.get(i, ss, k, tt) * &(&s(ss, j) * &s(tt, l))));
                out.sub_assign(&(&c.get(ss, j, tt, l) * &(&s(i, ss) * &s(k, tt))));
            }
        }
        out
    }

    #[test]
    fn quadratic_table_matches_direct_summation_everywhere() {
        let c = c_single_pair();
        assert!(validate_c(&c).passed);
        let b = Tensor4::new(3);
        let t = quadratic_bracket(&c, &b, &rat(1)).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                for k in 1..=3 {
                    for l in 1..=3 {
                        assert_eq!(
                            t.entry(VarId::S(i, j), VarId::S(k, l)),
                            qpb_entry_by_direct_sums(&c, i, j, k, l),
                            "mismatch at ({i},{j}),({k},{l})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_table_frozen_entry() {
        let t = quadratic_bracket(&c_single_pair(), &Tensor4::new(3), &rat(1)).unwrap();
        let got = t.entry(VarId::S(2, 1), VarId::S(3, 1));
        let expect = p("6*S[1,1]^2 - 6*S[1,2]*S[2,1] - 6*S[1,3]*S[3,1] \
             - 6*S[2,2]*S[3,3] + 6*S[2,3]*S[3,2]");
        assert_eq!(got, expect);
        // The direct-summation route agrees with the frozen value too.
        assert_eq!(
            qpb_entry_by_direct_sums(&c_single_pair(), 2, 1, 3, 1),
            expect
        );
    }

    #[test]
    fn zero_datum_gives_rescaled_linear_bracket() {
        let z = Tensor4::new(3);
        let t = quadratic_bracket(&z, &z, &rat(1)).unwrap();
        let lin = linear_bracket(3);
        let s0 = Polynomial::var(VarId::S0);
        for i in 1..=3 {
            for j in 1..=3 {
                for k in 1..=3 {
                    for l in 1..=3 {
                        let (u, v) = (VarId::S(i, j), VarId::S(k, l));
                        assert_eq!(t.entry(u, v), &s0 * &lin.entry(u, v));
                    }
                }
            }
        }
        for k in 1..=3 {
            for l in 1..=3 {
                assert!(t.entry(VarId::S0, VarId::S(k, l)).is_zero());
            }
        }
    }

    #[test]
    fn lambda_zero_is_rejected() {
        let z = Tensor4::new(2);
        assert_eq!(
            quadratic_bracket(&z, &z, &rat(0)),
            Err(BracketError::LambdaZero)
        );
    }

    /// Direct index-contraction evaluation of the hamiltonian, with dense
    /// loops over every index.
    fn hamiltonian_by_direct_contraction(c: &Tensor4, b: &Tensor4) -> Polynomial {
        let n = c.n();
        let mut h = Polynomial::zero();
        for k in 1..=n {
            for l in 1..=n {
                for nn in 1..=n {
                    for m in 1..=n {
                        h.sub_assign(&(&b.get(k, l, nn, m) * &(&s(m, nn) * &s(l, k))));
                        for np in 1..=n {
                            for mp in 1..=n {
                                let cc = &c.get(k, l, nn, m) * &c.get(m, nn, np, mp);
                                let term = &cc * &(&s(l, k) * &s(mp, np));
                                h.add_assign(&term.scale(&ratq(1, 2)));
                            }
                        }
                    }
                }
            }
        }
        h
    }

    #[test]
    fn hamiltonian_matches_direct_contraction() {
        assert!(hamiltonian(&Tensor4::new(2), &Tensor4::new(2)).is_zero());

        // b-only datum: H = −Σ b_{klnm} S_mn S_lk.
        let b = sym_b_n2();
        let h = hamiltonian(&Tensor4::new(2), &b);
        assert_eq!(h, hamiltonian_by_direct_contraction(&Tensor4::new(2), &b));
        assert_eq!(h, p("-2*S[1,2]*S[2,1]"));

        // c-only datum with a nonvanishing contraction chain.
        let c = wedge_c_n2();
        let h = hamiltonian(&c, &Tensor4::new(2));
        assert_eq!(h, hamiltonian_by_direct_contraction(&c, &Tensor4::new(2)));
        assert_eq!(h, p("S[1,2]*S[2,1]"));

        // The single-pair datum's chain vanishes, so its hamiltonian does.
        let h = hamiltonian(&c_single_pair(), &Tensor4::new(3));
        assert!(h.is_zero());
        assert!(hamiltonian_by_direct_contraction(&c_single_pair(), &Tensor4::new(3)).is_zero());
    }

    #[test]
    fn flow_field_agrees_with_generic_engine_on_both_routes() {
        // The closed-form field must equal {S_kl, H}₁ (and hence the
        // negation of {H, S_kl}₁) computed by the table engine.
        for (c, b) in [
            (wedge_c_n2(), sym_b_n2()),
            (wedge_c_n2(), Tensor4::new(2)),
            (Tensor4::new(2), sym_b_n2()),
        ] {
            let field = ham_vector_field(&c, &b);
            let h = hamiltonian(&c, &b);
            let lin = linear_bracket(2);
            for k in 1..=2 {
                for l in 1..=2 {
                    let skl = Polynomial::var(VarId::S(k, l));
                    let forward = lin.bracket(&skl, &h).unwrap();
                    let backward = lin.bracket(&h, &skl).unwrap();
                    let comp = field.component(VarId::S(k, l));
                    assert_eq!(comp, forward, "{{S[{k},{l}],H}} mismatch");
                    assert_eq!(comp, -&backward);
                }
            }
        }
    }

    #[test]
    fn flow_field_components_preserve_the_trace() {
        let field = ham_vector_field(&wedge_c_n2(), &sym_b_n2());
        let mut total = Polynomial::zero();
        for k in 1..=2 {
            total.add_assign(&field.component(VarId::S(k, k)));
        }
        assert!(total.is_zero());
    }

    #[test]
    fn s0_row_is_minus_lambda_times_hamiltonian_flow() {
        let (c, b) = (wedge_c_n2(), sym_b_n2());
        let lambda = ratq(1, 3);
        let t = quadratic_bracket(&c, &b, &lambda).unwrap();
        let h = hamiltonian(&c, &b);
        let lin = linear_bracket(2);
        for k in 1..=2 {
            for l in 1..=2 {
                let skl = VarId::S(k, l);
                let s0_row = t.entry(VarId::S0, skl);
                let flow = lin.bracket(&h, &Polynomial::var(skl)).unwrap();
                let mut residual = s0_row;
                residual.add_assign(&flow.scale(&lambda));
                assert!(
                    residual.is_zero(),
                    "{{S0,S[{k},{l}]}} + lambda*{{H,S[{k},{l}]}} != 0"
                );
            }
        }
    }

    #[test]
    fn quadratic_entries_are_homogeneous_of_degree_two() {
        let t = quadratic_bracket(&c_single_pair(), &Tensor4::new(3), &rat(1)).unwrap();
        for (_, e) in t.entries() {
            for (m, _) in e.terms() {
                assert_eq!(m.total_degree(), 2);
            }
        }
    }

    #[test]
    fn bracket_engine_examples_and_leibniz_expansion() {
        let lin = linear_bracket(3);
        assert_eq!(
            lin.bracket(&p("S[1,2]"), &p("S[2,1]")).unwrap(),
            p("S[1,1] - S[2,2]")
        );
        let f = p("S[1,2]*S[2,1] + 3*S[1,1]^2");
        assert!(lin.bracket(&f, &f).unwrap().is_zero());
        // {S₁₁S₂₂, S₁₂} expanded by hand with the product rule:
        // S₁₁{S₂₂,S₁₂} + S₂₂{S₁₁,S₁₂} = S₁₁(−S₁₂) + S₂₂(S₁₂).
        let engine = lin.bracket(&p("S[1,1]*S[2,2]"), &p("S[1,2]")).unwrap();
        let expanded = &(&p("S[1,1]") * &lin.bracket(&p("S[2,2]"), &p("S[1,2]")).unwrap())
            + &(&p("S[2,2]") * &lin.bracket(&p("S[1,1]"), &p("S[1,2]")).unwrap());
        assert_eq!(engine, expanded);
        assert_eq!(engine, p("-S[1,1]*S[1,2] + S[1,2]*S[2,2]"));
    }

    #[test]
    fn restriction_substitutes_and_gates_on_trace_casimir() {
        let lin = linear_bracket(3);
        let r = lin.restrict_sl().unwrap();
        assert!(r.is_restricted());
        assert!(!r.coords().contains(VarId::S(3, 3)));
        // Entry without S₃₃ is unchanged.
        assert_eq!(
            r.entry(VarId::S(1, 2), VarId::S(2, 1)),
            p("S[1,1] - S[2,2]")
        );
        // Entry that used to read S₃₃ is substituted: {S₁₃,S₃₁}₁ = S₁₁−S₃₃.
        assert_eq!(
            r.entry(VarId::S(1, 3), VarId::S(3, 1)),
            p("2*S[1,1] + S[2,2]")
        );
        // Functions of the eliminated coordinate are rejected.
        assert_eq!(
            r.bracket(&p("S[3,3]"), &p("S[1,2]")),
            Err(BracketError::ForeignCoordinate(VarId::S(3, 3)))
        );
        // Double restriction is refused.
        assert_eq!(r.restrict_sl(), Err(BracketError::AlreadyRestricted));

        // A table whose trace is not a Casimir refuses to restrict.
        let mut bad = BracketTable::empty(CoordSet::full(2), None);
        bad.set_entry(VarId::S(1, 1), VarId::S(1, 2), p("S[1,1]"));
        assert!(matches!(
            bad.restrict_sl(),
            Err(BracketError::TraceNotCasimir { .. })
        ));
    }

    #[test]
    fn restriction_agrees_with_trace_zero_evaluation() {
        use std::collections::BTreeMap as Map;
        let t = quadratic_bracket(&c_single_pair(), &Tensor4::new(3), &rat(1)).unwrap();
        let r = t.restrict_sl().unwrap();
        // A fixed trace-zero sample point (S₃₃ = −S₁₁−S₂₂).
        let mut point: Map<VarId, Rational> = Map::new();
        let vals = [
            ((1, 1), ratq(1, 2)),
            ((1, 2), rat(2)),
            ((1, 3), rat(-1)),
            ((2, 1), ratq(-3, 2)),
            ((2, 2), rat(3)),
            ((2, 3), ratq(5, 3)),
            ((3, 1), rat(1)),
            ((3, 2), ratq(-2, 5)),
        ];
        for ((i, j), v) in vals {
            point.insert(VarId::S(i, j), v);
        }
        point.insert(VarId::S(3, 3), -(ratq(1, 2) + rat(3)));
        point.insert(VarId::S0, ratq(7, 4));
        for (&(u, v), _) in r.entries() {
            let restricted_val = r.entry(u, v).eval(&point).unwrap();
            let full_val = t.entry(u, v).eval(&point).unwrap();
            assert_eq!(restricted_val, full_val, "at pair ({u},{v})");
        }
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    /// Random polynomials in the unrestricted N=2 coordinates.
    fn arb_fn2() -> impl Strategy<Value = Polynomial> {
        let coords = [
            VarId::S(1, 1),
            VarId::S(1, 2),
            VarId::S(2, 1),
            VarId::S(2, 2),
            VarId::S0,
        ];
        proptest::collection::vec(
            (
                proptest::sample::subsequence(coords.to_vec(), 0..=2),
                -3i64..=3,
            ),
            0..=4,
        )
        .prop_map(|terms| {
            let mut p = Polynomial::zero();
            for (vars, coeff) in terms {
                let mut t = Polynomial::constant(rat(coeff));
                for v in vars {
                    t = &t * &Polynomial::var(v);
                }
                p.add_assign(&t);
            }
            p
        })
    }

    fn test_table() -> BracketTable {
        let mut c = Tensor4::new(2);
        c.set((1, 2, 2, 1), Polynomial::int(1));
        c.set((2, 1, 1, 2), Polynomial::int(-1));
        let mut b = Tensor4::new(2);
        b.set((1, 2, 2, 1), Polynomial::int(1));
        b.set((2, 1, 1, 2), Polynomial::int(1));
        quadratic_bracket(&c, &b, &rat(1)).unwrap()
    }

    proptest! {
        #[test]
        fn bracket_is_antisymmetric(f in arb_fn2(), g in arb_fn2()) {
            let t = test_table();
            let fg = t.bracket(&f, &g).unwrap();
            let gf = t.bracket(&g, &f).unwrap();
            prop_assert!((&fg + &gf).is_zero());
        }

        #[test]
        fn bracket_satisfies_leibniz(
            f in arb_fn2(),
            g in arb_fn2(),
            h in arb_fn2(),
        ) {
            let t = test_table();
            let lhs = t.bracket(&(&f * &g), &h).unwrap();
            let rhs = &(&f * &t.bracket(&g, &h).unwrap())
                + &(&g * &t.bracket(&f, &h).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn bracket_is_bilinear(f in arb_fn2(), g in arb_fn2(), h in arb_fn2()) {
            let t = test_table();
            let lhs = t.bracket(&(&f + &g), &h).unwrap();
            let rhs = &t.bracket(&f, &h).unwrap() + &t.bracket(&g, &h).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
