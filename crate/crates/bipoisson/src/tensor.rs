//! Four-index tensors on pairs of N×N matrix slots, the defining tensor
//! equation of the quadratic bracket family (referred to throughout as
//! fp4), and gauge transformations between its solutions.
//!
//! A [`Tensor4`] stores the coefficients T_{ijkl} of Σ T_{ijkl} E_ij⊗E_kl
//! sparsely, with polynomial values so whole parameter families can be
//! handled in one pass. The two tensors of interest are the skew datum `c`
//! and the symmetric datum `b`; [`fp4_residual`] materializes the defect of
//! the equation they must satisfy as a sparse six-index map, empty exactly
//! when (c, b) is a solution.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::poly::{ratq, Polynomial, Rational};
use crate::report::Report;

/// Errors for structurally invalid tensor operations. Mathematical failures
/// (a symmetry that does not hold, a nonzero residual) are reported, not
/// thrown.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error("dimension mismatch: N={0} vs N={1}")]
    DimensionMismatch(u8, u8),
    #[error("gauge generator must be traceless, got trace {0}")]
    GaugeNotTraceless(String),
}

/// Iterate all index quadruples (i,j,k,l) with entries in 1..=n, in
/// lexicographic order.
pub fn all_quadruples(n: u8) -> impl Iterator<Item = (u8, u8, u8, u8)> {
    (1..=n).flat_map(move |i| {
        (1..=n).flat_map(move |j| (1..=n).flat_map(move |k| (1..=n).map(move |l| (i, j, k, l))))
    })
}

/// Sparse 4-index tensor: the coefficient of E_ij⊗E_kl at key (i,j,k,l).
/// Absent keys are zero; stored values are never the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor4 {
    n: u8,
    entries: BTreeMap<(u8, u8, u8, u8), Polynomial>,
}

impl Tensor4 {
    /// Empty (zero) tensor on N×N matrix slots.
    pub fn new(n: u8) -> Self {
        assert!(n >= 2, "tensor dimension must be at least 2");
        Tensor4 {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Coefficient at (i,j,k,l); zero when absent.
    pub fn get(&self, i: u8, j: u8, k: u8, l: u8) -> Polynomial {
        self.entries
            .get(&(i, j, k, l))
            .cloned()
            .unwrap_or_else(Polynomial::zero)
    }

    fn check_range(&self, idx: (u8, u8, u8, u8)) {
        let (i, j, k, l) = idx;
        assert!(
            (1..=self.n).contains(&i)
                && (1..=self.n).contains(&j)
                && (1..=self.n).contains(&k)
                && (1..=self.n).contains(&l),
            "index ({i},{j},{k},{l}) out of range for N={}",
            self.n
        );
    }

    /// Overwrite the coefficient at the quadruple (removing it when zero).
    pub fn set(&mut self, idx: (u8, u8, u8, u8), p: Polynomial) {
        self.check_range(idx);
        if p.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, p);
        }
    }

    /// Accumulate into the coefficient at the quadruple.
    pub fn add_to(&mut self, idx: (u8, u8, u8, u8), p: Polynomial) {
        self.check_range(idx);
        if p.is_zero() {
            return;
        }
        let slot = self.entries.entry(idx).or_default();
        slot.add_assign(&p);
        if slot.is_zero() {
            self.entries.remove(&idx);
        }
    }

    /// Nonzero entries in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (&(u8, u8, u8, u8), &Polynomial)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &Tensor4) -> Result<Tensor4, TensorError> {
        if self.n != other.n {
            return Err(TensorError::DimensionMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (&idx, p) in other.entries() {
            out.add_to(idx, p.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Tensor4 {
        if c.is_zero() {
            return Tensor4::new(self.n);
        }
        Tensor4 {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(&idx, p)| (idx, p.scale(c)))
                .collect(),
        }
    }

    /// Substitute a parameter variable in every entry (used to specialize a
    /// symbolic family at a numeric point).
    pub fn substitute(&self, v: crate::poly::VarId, p: &Polynomial) -> Tensor4 {
        let mut out = Tensor4::new(self.n);
        for (&idx, q) in self.entries() {
            out.add_to(idx, q.substitute(v, p));
        }
        out
    }
}

/// Check that `c` is skew across the pair swap (c_{ijkl} = −c_{klij}) and
/// that both partial traces vanish (Σ_i c_{iikl} = 0 and Σ_k c_{ijkk} = 0),
/// i.e. that both slots carry traceless matrices.
pub fn validate_c(c: &Tensor4) -> Report {
    validate_tensor(c, "validate-c", true)
}

/// Check that `b` is symmetric across the pair swap (b_{ijkl} = b_{klij})
/// with both partial traces vanishing.
pub fn validate_b(b: &Tensor4) -> Report {
    validate_tensor(b, "validate-b", false)
}

fn validate_tensor(t: &Tensor4, name: &str, skew: bool) -> Report {
    let n = t.n();
    let mut checked = 0usize;
    for (i, j, k, l) in all_quadruples(n) {
        checked += 1;
        let swapped = t.get(k, l, i, j);
        let r = if skew {
            &t.get(i, j, k, l) + &swapped
        } else {
            &t.get(i, j, k, l) - &swapped
        };
        if !r.is_zero() {
            let kind = if skew { "skewness" } else { "symmetry" };
            return Report::fail(
                name,
                checked,
                format!("{kind} at (i,j,k,l)=({i},{j},{k},{l})"),
                r.to_string(),
            );
        }
    }
    for k in 1..=n {
        for l in 1..=n {
            checked += 1;
            let mut s = Polynomial::zero();
            for i in 1..=n {
                s.add_assign(&t.get(i, i, k, l));
            }
            if !s.is_zero() {
                return Report::fail(
                    name,
                    checked,
                    format!("first partial trace at (k,l)=({k},{l})"),
                    s.to_string(),
                );
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            checked += 1;
            let mut s = Polynomial::zero();
            for k in 1..=n {
                s.add_assign(&t.get(i, j, k, k));
            }
            if !s.is_zero() {
                return Report::fail(
                    name,
                    checked,
                    format!("second partial trace at (i,j)=({i},{j})"),
                    s.to_string(),
                );
            }
        }
    }
    Report::pass(name, checked)
}

/// The split Casimir with both slots projected to traceless matrices:
/// Ω_{ijkl} = δ_{jk}δ_{il} − (1/N)δ_{ij}δ_{kl}.
pub fn omega(n: u8) -> Tensor4 {
    let mut t = Tensor4::new(n);
    for i in 1..=n {
        for j in 1..=n {
            t.add_to((i, j, j, i), Polynomial::one());
        }
    }
    let c = Polynomial::constant(ratq(-1, n as i64));
    for i in 1..=n {
        for k in 1..=n {
            t.add_to((i, i, k, k), c.clone());
        }
    }
    t
}

/// N×N matrix with exact rational entries; used as a gauge generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixX {
    n: u8,
    entries: BTreeMap<(u8, u8), Rational>,
}

impl MatrixX {
    pub fn new(n: u8) -> Self {
        assert!(n >= 2, "matrix dimension must be at least 2");
        MatrixX {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn get(&self, i: u8, j: u8) -> Rational {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: u8, j: u8, v: Rational) {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "index ({i},{j}) out of range for N={}",
            self.n
        );
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u8, u8), &Rational)> {
        self.entries.iter()
    }

    pub fn trace(&self) -> Rational {
        let mut t = Rational::zero();
        for i in 1..=self.n {
            t += self.get(i, i);
        }
        t
    }
}

/// Project onto traceless matrices: m − (1/N)·tr(m)·Id. Identity on
/// already-traceless input; idempotent.
pub fn project_traceless(m: &MatrixX) -> MatrixX {
    let shift = m.trace() * ratq(-1, m.n() as i64);
    let mut out = m.clone();
    if !shift.is_zero() {
        for i in 1..=m.n() {
            out.set(i, i, m.get(i, i) + &shift);
        }
    }
    out
}

/// Apply ad_X to the first tensor slot only:
/// (ad_X⊗Id T)_{pqkl} = Σ_i X_{pi} T_{iqkl} − Σ_j T_{pjkl} X_{jq}.
pub fn ad_first(x: &MatrixX, t: &Tensor4) -> Result<Tensor4, TensorError> {
    if x.n() != t.n() {
        return Err(TensorError::DimensionMismatch(x.n(), t.n()));
    }
    let mut out = Tensor4::new(t.n());
    for (&(a, b, k, l), p) in t.entries() {
        for (&(u, v), xv) in x.entries() {
            let scaled = p.scale(xv);
            if v == a {
                // X_{u,a} T_{a,b,k,l} lands at (u,b,k,l).
                out.add_to((u, b, k, l), scaled.clone());
            }
            if u == b {
                // −T_{a,b,k,l} X_{b,v} lands at (a,v,k,l).
                out.add_to((a, v, k, l), -&scaled);
            }
        }
    }
    Ok(out)
}

/// Gauge-transform a solution datum by a traceless generator X:
/// c′ = c + (ad_X⊗Id)Ω and b′ = b + ½((ad_X)²⊗Id)Ω + (ad_X⊗Id)c.
///
/// Whether c′ and b′ retain their symmetries (and still solve the tensor
/// equation) is reported by re-running the validators and [`fp4_residual`]
/// on the output — this function does not assert it.
pub fn gauge_transform(
    c: &Tensor4,
    b: &Tensor4,
    x: &MatrixX,
) -> Result<(Tensor4, Tensor4), TensorError> {
    if c.n() != b.n() {
        return Err(TensorError::DimensionMismatch(c.n(), b.n()));
    }
    if c.n() != x.n() {
        return Err(TensorError::DimensionMismatch(c.n(), x.n()));
    }
    if !x.trace().is_zero() {
        return Err(TensorError::GaugeNotTraceless(x.trace().to_string()));
    }
    let om = omega(c.n());
    let ad_om = ad_first(x, &om)?;
    let ad2_om = ad_first(x, &ad_om)?;
    let ad_c = ad_first(x, c)?;
    let c_new = c.add(&ad_om)?;
    let b_new = b.add(&ad2_om.scale(&ratq(1, 2)))?.add(&ad_c)?;
    Ok((c_new, b_new))
}

/// Sparse 6-index residual of the defining tensor equation; empty means the
/// equation holds identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual6 {
    n: u8,
    entries: BTreeMap<(u8, u8, u8, u8, u8, u8), Polynomial>,
}

impl Residual6 {
    fn new(n: u8) -> Self {
        Residual6 {
            n,
            entries: BTreeMap::new(),
        }
    }

    fn add_to(&mut self, idx: (u8, u8, u8, u8, u8, u8), p: Polynomial) {
        if p.is_zero() {
            return;
        }
        let slot = self.entries.entry(idx).or_default();
        slot.add_assign(&p);
        if slot.is_zero() {
            self.entries.remove(&idx);
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn get(&self, idx: (u8, u8, u8, u8, u8, u8)) -> Polynomial {
        self.entries
            .get(&idx)
            .cloned()
            .unwrap_or_else(Polynomial::zero)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Nonzero residual entries in lexicographic sextuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&(u8, u8, u8, u8, u8, u8), &Polynomial)> {
        self.entries.iter()
    }

    /// Pass/fail report with the first nonzero sextuple as witness; the
    /// identity count is the full N⁶ grid the residual ranges over.
    pub fn to_report(&self, name: impl Into<String>) -> Report {
        let checked = (self.n as usize).pow(6);
        match self.entries.iter().next() {
            None => Report::pass(name, checked),
            Some(((i, j, k, l, m, nn), p)) => Report::fail(
                name,
                checked,
                format!("(i,j,k,l,m,n)=({i},{j},{k},{l},{m},{nn})"),
                p.to_string(),
            ),
        }
    }

    /// Verify the structural cyclic symmetry: the residual is unchanged
    /// under (i,j)→(k,l)→(m,n)→(i,j). Holds for every input datum because
    /// each side of the equation is a cyclic sum over the three pairs.
    pub fn cyclic_invariance(&self) -> Report {
        let mut checked = 0usize;
        for (&(i, j, k, l, m, n), p) in &self.entries {
            checked += 1;
            let rotated = self.get((k, l, m, n, i, j));
            let diff = p - &rotated;
            if !diff.is_zero() {
                return Report::fail(
                    "residual-cyclic-invariance",
                    checked,
                    format!("(i,j,k,l,m,n)=({i},{j},{k},{l},{m},{n})"),
                    diff.to_string(),
                );
            }
        }
        Report::pass("residual-cyclic-invariance", checked)
    }
}

/// Residual of the defining tensor equation at every index sextuple:
///
/// ```text
/// Σ_r (c_{klir}c_{rjmn} + c_{ijmr}c_{rnkl} + c_{mnkr}c_{rlij})
///   − (1/N) Σ_{r,s} (δ_ij c_{klrs}c_{srmn} + δ_mn c_{ijrs}c_{srkl} + δ_kl c_{mnrs}c_{srij})
///   − (δ_kn b_{mlij} + δ_mj b_{inkl} + δ_il b_{kjmn})
///   + (1/N)(δ_mn b_{ijkl} + δ_ij b_{klmn} + δ_kl b_{mnij})
///   + (1/N)(δ_mn b_{klij} + δ_ij b_{mnkl} + δ_kl b_{ijmn})
/// ```
///
/// The computation is organized sparsely: contractions iterate over pairs of
/// stored entries joined on the summation index, never over the full N⁶
/// grid, so symbolic parameter families stay cheap.
pub fn fp4_residual(c: &Tensor4, b: &Tensor4) -> Result<Residual6, TensorError> {
    if c.n() != b.n() {
        return Err(TensorError::DimensionMismatch(c.n(), b.n()));
    }
    let n = c.n();
    let inv_n = ratq(1, n as i64);
    let mut res = Residual6::new(n);

    // Single-contraction quadratic terms. Read the first factor as
    // c_{(a,w)(u,r)} and the second as c_{(r,v)(g,h)}, joined on r; the
    // three cyclic placements are index rotations of one join.
    for (&(a, w, u, r1), p) in c.entries() {
        for (&(r2, v, g, h), q) in c.entries() {
            if r1 != r2 {
                continue;
            }
            let prod = p * q;
            // c_{klir} c_{rjmn} at (i,j,k,l,m,n) = (u,v,a,w,g,h)
            res.add_to((u, v, a, w, g, h), prod.clone());
            // c_{ijmr} c_{rnkl} at (a,w,g,h,u,v)
            res.add_to((a, w, g, h, u, v), prod.clone());
            // c_{mnkr} c_{rlij} at (g,h,u,v,a,w)
            res.add_to((g, h, u, v, a, w), prod);
        }
    }

    // Double-contraction trace terms: precompute CC_{klmn} = Σ_{r,s}
    // c_{klrs} c_{srmn}, then attach each Kronecker delta.
    let mut cc: BTreeMap<(u8, u8, u8, u8), Polynomial> = BTreeMap::new();
    for (&(a, w, r, s), p) in c.entries() {
        for (&(s2, r2, g, h), q) in c.entries() {
            if s2 != s || r2 != r {
                continue;
            }
            cc.entry((a, w, g, h)).or_default().add_assign(&(p * q));
        }
    }
    for ((a, w, g, h), v) in &cc {
        if v.is_zero() {
            continue;
        }
        let scaled = -&v.scale(&inv_n);
        for q in 1..=n {
            // δ_ij CC_{klmn} at (q,q,a,w,g,h)
            res.add_to((q, q, *a, *w, *g, *h), scaled.clone());
            // δ_mn CC_{ijkl} at (a,w,g,h,q,q)
            res.add_to((*a, *w, *g, *h, q, q), scaled.clone());
            // δ_kl CC_{mnij} at (g,h,q,q,a,w)
            res.add_to((*g, *h, q, q, *a, *w), scaled.clone());
        }
    }

    // Linear terms in b. Read the stored entry as b_{(a,w)(u,v)} and place
    // it at each sextuple selected by the matching delta.
    for (&(a, w, u, v), p) in b.entries() {
        let neg = -p;
        let over_n = p.scale(&inv_n);
        for q in 1..=n {
            // −δ_kn b_{mlij} at (u,v,q,w,a,q)
            res.add_to((u, v, q, w, a, q), neg.clone());
            // −δ_mj b_{inkl} at (a,q,u,v,q,w)
            res.add_to((a, q, u, v, q, w), neg.clone());
            // −δ_il b_{kjmn} at (q,w,a,q,u,v)
            res.add_to((q, w, a, q, u, v), neg.clone());
            // +(1/N) δ_mn b_{ijkl} at (a,w,u,v,q,q)
            res.add_to((a, w, u, v, q, q), over_n.clone());
            // +(1/N) δ_ij b_{klmn} at (q,q,a,w,u,v)
            res.add_to((q, q, a, w, u, v), over_n.clone());
            // +(1/N) δ_kl b_{mnij} at (u,v,q,q,a,w)
            res.add_to((u, v, q, q, a, w), over_n.clone());
            // +(1/N) δ_mn b_{klij} at (u,v,a,w,q,q)
            res.add_to((u, v, a, w, q, q), over_n.clone());
            // +(1/N) δ_ij b_{mnkl} at (q,q,u,v,a,w)
            res.add_to((q, q, u, v, a, w), over_n.clone());
            // +(1/N) δ_kl b_{ijmn} at (a,w,q,q,u,v)
            res.add_to((a, w, q, q, u, v), over_n.clone());
        }
    }

    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    /// Tensor Σ m1_{ij} m2_{kl} E_ij⊗E_kl from two integer matrices.
    fn outer(n: u8, m1: &[(u8, u8, i64)], m2: &[(u8, u8, i64)]) -> Tensor4 {
        let mut t = Tensor4::new(n);
        for &(i, j, x) in m1 {
            for &(k, l, y) in m2 {
                t.add_to((i, j, k, l), Polynomial::constant(rat(x * y)));
            }
        }
        t
    }

    /// Skew combination m1⊗m2 − m2⊗m1 (admissible c when both are traceless).
    fn wedge(n: u8, m1: &[(u8, u8, i64)], m2: &[(u8, u8, i64)]) -> Tensor4 {
        outer(n, m1, m2)
            .add(&outer(n, m2, m1).scale(&rat(-1)))
            .unwrap()
    }

    /// Symmetric combination m1⊗m2 + m2⊗m1 (admissible b when traceless).
    fn sym(n: u8, m1: &[(u8, u8, i64)], m2: &[(u8, u8, i64)]) -> Tensor4 {
        outer(n, m1, m2).add(&outer(n, m2, m1)).unwrap()
    }

    const E12: &[(u8, u8, i64)] = &[(1, 2, 1)];
    const E21: &[(u8, u8, i64)] = &[(2, 1, 1)];
    const H2: &[(u8, u8, i64)] = &[(1, 1, 1), (2, 2, -1)];

    #[test]
    fn omega_matches_its_closed_form() {
        let om = omega(3);
        assert_eq!(om.get(1, 2, 2, 1), Polynomial::one());
        assert_eq!(om.get(1, 1, 1, 1), Polynomial::constant(ratq(2, 3)));
        assert_eq!(om.get(1, 1, 2, 2), Polynomial::constant(ratq(-1, 3)));
        assert!(om.get(1, 2, 1, 2).is_zero());
        // Pair symmetry and both partial traces.
        for (i, j, k, l) in all_quadruples(3) {
            assert_eq!(om.get(i, j, k, l), om.get(k, l, i, j));
        }
        assert!(validate_b(&om).passed);
    }

    #[test]
    fn projector_examples_and_idempotence() {
        let mut e12 = MatrixX::new(3);
        e12.set(1, 2, rat(1));
        assert_eq!(project_traceless(&e12), e12);

        let mut e11 = MatrixX::new(3);
        e11.set(1, 1, rat(1));
        let p = project_traceless(&e11);
        assert_eq!(p.get(1, 1), ratq(2, 3));
        assert_eq!(p.get(2, 2), ratq(-1, 3));
        assert_eq!(p.get(3, 3), ratq(-1, 3));
        assert!(p.trace().is_zero());
        assert_eq!(project_traceless(&p), p);

        let mut id = MatrixX::new(3);
        for i in 1..=3 {
            id.set(i, i, rat(1));
        }
        assert_eq!(project_traceless(&id), MatrixX::new(3));
    }

    #[test]
    fn validators_separate_admissible_from_inadmissible_tensors() {
        assert!(validate_c(&Tensor4::new(3)).passed);
        assert!(validate_b(&Tensor4::new(3)).passed);

        // One antisymmetrized off-diagonal pair is admissible as c.
        let mut c7 = Tensor4::new(3);
        c7.set((2, 1, 3, 1), Polynomial::int(6));
        c7.set((3, 1, 2, 1), Polynomial::int(-6));
        assert!(validate_c(&c7).passed);

        // A symmetric datum must fail the skewness check…
        let mut sym_bad = Tensor4::new(3);
        sym_bad.set((1, 2, 1, 2), Polynomial::int(1));
        let r = validate_c(&sym_bad);
        assert!(!r.passed);
        assert!(r.witness.unwrap().location.contains("skewness"));

        // …and an asymmetric one must fail the symmetry check.
        let mut asym = Tensor4::new(3);
        asym.set((1, 2, 1, 1), Polynomial::int(1));
        let r = validate_b(&asym);
        assert!(!r.passed);
        assert!(r.witness.unwrap().location.contains("symmetry"));

        // Nonvanishing partial trace is rejected even when skew.
        let mut traceful = Tensor4::new(2);
        traceful.set((1, 1, 1, 2), Polynomial::int(1));
        traceful.set((2, 2, 1, 2), Polynomial::int(1));
        traceful.set((1, 2, 1, 1), Polynomial::int(-1));
        traceful.set((1, 2, 2, 2), Polynomial::int(-1));
        let r = validate_c(&traceful);
        assert!(!r.passed);
        assert!(r.witness.unwrap().location.contains("partial trace"));
    }

    /// One sextuple with the separately computed left and right side.
    type SextupleSides = ((u8, u8, u8, u8, u8, u8), Polynomial, Polynomial);

    /// Independent evaluation of the tensor equation: six nested index
    /// loops computing the two sides separately, straight from the displayed
    /// formula, with no sparse-join shortcuts.
    fn sides_by_brute_force(c: &Tensor4, b: &Tensor4) -> Vec<SextupleSides> {
        let n = c.n();
        let inv_n = ratq(1, n as i64);
        let mut out = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    for l in 1..=n {
                        for m in 1..=n {
                            for nn in 1..=n {
                                let mut lhs = Polynomial::zero();
                                for r in 1..=n {
                                    lhs.add_assign(&(&c.get(k, l, i, r) * &c.get(r, j, m, nn)));
                                    lhs.add_assign(&(&c.get(i, j, m, r) * &c.get(r, nn, k, l)));
                                    lhs.add_assign(&(&c.get(m, nn, k, r) * &c.get(r, l, i, j)));
                                }
                                let mut tr = Polynomial::zero();
                                for r in 1..=n {
                                    for s in 1..=n {
                                        if i == j {
                                            tr.add_assign(
                                                &(&c.get(k, l, r, s) * &c.get(s, r, m, nn)),
                                            );
                                        }
                                        if m == nn {
                                            tr.add_assign(
                                                &(&c.get(i, j, r, s) * &c.get(s, r, k, l)),
                                            );
                                        }
                                        if k == l {
                                            tr.add_assign(
                                                &(&c.get(m, nn, r, s) * &c.get(s, r, i, j)),
                                            );
                                        }
                                    }
                                }
                                lhs.sub_assign(&tr.scale(&inv_n));

                                let mut rhs = Polynomial::zero();
                                if k == nn {
                                    rhs.add_assign(&b.get(m, l, i, j));
                                }
                                if m == j {
                                    rhs.add_assign(&b.get(i, nn, k, l));
                                }
                                if i == l {
                                    rhs.add_assign(&b.get(k, j, m, nn));
                                }
                                let mut corr = Polynomial::zero();
                                if m == nn {
                                    corr.add_assign(&b.get(i, j, k, l));
                                    corr.add_assign(&b.get(k, l, i, j));
                                }
                                if i == j {
                                    corr.add_assign(&b.get(k, l, m, nn));
                                    corr.add_assign(&b.get(m, nn, k, l));
                                }
                                if k == l {
                                    corr.add_assign(&b.get(m, nn, i, j));
                                    corr.add_assign(&b.get(i, j, m, nn));
                                }
                                rhs.sub_assign(&corr.scale(&inv_n));

                                out.push(((i, j, k, l, m, nn), lhs, rhs));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn residual_of_zero_data_is_empty() {
        let z = Tensor4::new(3);
        let res = fp4_residual(&z, &z).unwrap();
        assert!(res.is_empty());
        assert!(res.to_report("fp4").passed);
    }

    #[test]
    fn residual_agrees_with_brute_force_sides() {
        // Nontrivial admissible pair on N=2 (not a solution of the
        // equation; the point is exactness of the residual, not emptiness).
        let c = wedge(2, E12, E21)
            .add(&wedge(2, E12, H2).scale(&rat(2)))
            .unwrap();
        let b = sym(2, E12, E21)
            .add(&outer(2, H2, H2).scale(&rat(3)))
            .unwrap();
        assert!(validate_c(&c).passed);
        assert!(validate_b(&b).passed);

        let res = fp4_residual(&c, &b).unwrap();
        assert!(!res.is_empty());
        for (idx, lhs, rhs) in sides_by_brute_force(&c, &b) {
            assert_eq!(res.get(idx), &lhs - &rhs, "mismatch at {idx:?}");
        }
        assert!(res.cyclic_invariance().passed);
    }

    #[test]
    fn residual_agrees_with_brute_force_on_polynomial_entries() {
        use crate::poly::VarId;
        // Same skeleton but with symbolic coefficients: c scaled by y0,
        // b by t, so the residual is quadratic in y0 and linear in t.
        let mut c_sym = Tensor4::new(2);
        for (&idx, p) in wedge(2, E12, E21).entries() {
            c_sym.add_to(idx, &Polynomial::var(VarId::Y(0)) * p);
        }
        let mut b_sym = Tensor4::new(2);
        for (&idx, p) in sym(2, E12, E21).entries() {
            b_sym.add_to(idx, &Polynomial::var(VarId::T) * p);
        }
        let res = fp4_residual(&c_sym, &b_sym).unwrap();
        for (idx, lhs, rhs) in sides_by_brute_force(&c_sym, &b_sym) {
            assert_eq!(res.get(idx), &lhs - &rhs, "mismatch at {idx:?}");
        }
    }

    #[test]
    fn residual_is_linear_in_b_for_fixed_c() {
        let c = wedge(2, E12, H2);
        let b1 = sym(2, E12, E21);
        let b2 = outer(2, H2, H2);
        let r_sum = fp4_residual(&c, &b1.add(&b2).unwrap()).unwrap();
        let r1 = fp4_residual(&c, &b1).unwrap();
        let r2 = fp4_residual(&c, &b2).unwrap();
        let r0 = fp4_residual(&c, &Tensor4::new(2)).unwrap();
        for i in 1..=2u8 {
            for j in 1..=2u8 {
                for k in 1..=2u8 {
                    for l in 1..=2u8 {
                        for m in 1..=2u8 {
                            for n in 1..=2u8 {
                                let idx = (i, j, k, l, m, n);
                                let expect = &(&r1.get(idx) + &r2.get(idx)) - &r0.get(idx);
                                assert_eq!(r_sum.get(idx), expect);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn residual_rejects_dimension_mismatch() {
        let c = Tensor4::new(2);
        let b = Tensor4::new(3);
        assert_eq!(
            fp4_residual(&c, &b),
            Err(TensorError::DimensionMismatch(2, 3))
        );
    }

    /// Closed-form expansion of (ad_X⊗Id)Ω obtained by contracting ad_X
    /// against the split Casimir by hand: entry (i,j,k,l) = X_{il}δ_{jk} −
    /// X_{kj}δ_{il}.
    fn ad_omega_closed_form(x: &MatrixX) -> Tensor4 {
        let n = x.n();
        let mut t = Tensor4::new(n);
        for (i, j, k, l) in all_quadruples(n) {
            let mut v = Rational::zero();
            if j == k {
                v += x.get(i, l);
            }
            if i == l {
                v -= x.get(k, j);
            }
            t.add_to((i, j, k, l), Polynomial::constant(v));
        }
        t
    }

    /// Closed-form ((ad_X)²⊗Id)Ω: entry (p,q,k,l) = (X²)_{pl}δ_{qk} +
    /// (X²)_{kq}δ_{pl} − 2X_{pl}X_{kq}.
    fn ad2_omega_closed_form(x: &MatrixX) -> Tensor4 {
        let n = x.n();
        let mut x2 = MatrixX::new(n);
        for i in 1..=n {
            for j in 1..=n {
                let mut v = Rational::zero();
                for s in 1..=n {
                    v += x.get(i, s) * x.get(s, j);
                }
                x2.set(i, j, v);
            }
        }
        let mut t = Tensor4::new(n);
        for (p, q, k, l) in all_quadruples(n) {
            let mut v = Rational::zero();
            if q == k {
                v += x2.get(p, l);
            }
            if p == l {
                v += x2.get(k, q);
            }
            v -= rat(2) * x.get(p, l) * x.get(k, q);
            t.add_to((p, q, k, l), Polynomial::constant(v));
        }
        t
    }

    #[test]
    fn ad_action_matches_closed_forms() {
        let mut x = MatrixX::new(3);
        x.set(1, 2, rat(2));
        x.set(2, 1, rat(-1));
        x.set(1, 1, rat(1));
        x.set(3, 3, rat(-1));
        assert!(x.trace().is_zero());

        let om = omega(3);
        let ad_om = ad_first(&x, &om).unwrap();
        assert_eq!(ad_om, ad_omega_closed_form(&x));

        let ad2_om = ad_first(&x, &ad_om).unwrap();
        assert_eq!(ad2_om, ad2_omega_closed_form(&x));

        // The gauge increment to c is itself admissible.
        assert!(validate_c(&ad_om).passed);
    }

    #[test]
    fn gauge_identity_and_roundtrip() {
        let c = wedge(3, E12, &[(3, 1, 1)]);
        let b = sym(3, E12, E21);

        let zero_x = MatrixX::new(3);
        let (c1, b1) = gauge_transform(&c, &b, &zero_x).unwrap();
        assert_eq!(c1, c);
        assert_eq!(b1, b);

        let mut x = MatrixX::new(3);
        x.set(1, 2, rat(3));
        x.set(2, 3, ratq(-1, 2));
        x.set(1, 1, rat(1));
        x.set(2, 2, rat(-1));
        let (cp, bp) = gauge_transform(&c, &b, &x).unwrap();
        // c′ stays admissible; symmetry of b′ is instance-dependent, so it
        // is checked, not assumed — here we only require exact inversion.
        assert!(validate_c(&cp).passed);
        let mut neg_x = MatrixX::new(3);
        for (&(i, j), v) in x.entries() {
            neg_x.set(i, j, -v.clone());
        }
        let (c_back, b_back) = gauge_transform(&cp, &bp, &neg_x).unwrap();
        assert_eq!(c_back, c);
        assert_eq!(b_back, b);

        let mut traceful = MatrixX::new(3);
        traceful.set(1, 1, rat(1));
        assert!(matches!(
            gauge_transform(&c, &b, &traceful),
            Err(TensorError::GaugeNotTraceless(_))
        ));
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    /// Arbitrary sparse tensors at N=2 — deliberately unconstrained (no
    /// symmetry, no tracelessness): the structural identities below hold
    /// for every datum.
    fn arb_tensor2() -> impl Strategy<Value = Tensor4> {
        proptest::collection::vec(((1u8..=2, 1u8..=2, 1u8..=2, 1u8..=2), -3i64..=3), 0..=6)
            .prop_map(|entries| {
                let mut t = Tensor4::new(2);
                for (idx, v) in entries {
                    t.add_to(idx, Polynomial::constant(rat(v)));
                }
                t
            })
    }

    fn arb_traceless_x2() -> impl Strategy<Value = MatrixX> {
        (-3i64..=3, -3i64..=3, -3i64..=3).prop_map(|(a, b, c)| {
            let mut x = MatrixX::new(2);
            x.set(1, 1, rat(a));
            x.set(2, 2, rat(-a));
            x.set(1, 2, rat(b));
            x.set(2, 1, rat(c));
            x
        })
    }

    proptest! {
        #[test]
        fn residual_cyclic_invariance_holds_for_any_data(
            c in arb_tensor2(),
            b in arb_tensor2(),
        ) {
            let res = fp4_residual(&c, &b).unwrap();
            prop_assert!(res.cyclic_invariance().passed);
        }

        #[test]
        fn residual_b_linearity_holds_for_any_data(
            c in arb_tensor2(),
            b1 in arb_tensor2(),
            b2 in arb_tensor2(),
        ) {
            let r_sum = fp4_residual(&c, &b1.add(&b2).unwrap()).unwrap();
            let r1 = fp4_residual(&c, &b1).unwrap();
            let r2 = fp4_residual(&c, &b2).unwrap();
            let r0 = fp4_residual(&c, &Tensor4::new(2)).unwrap();
            for i in 1..=2u8 { for j in 1..=2u8 { for k in 1..=2u8 {
                for l in 1..=2u8 { for m in 1..=2u8 { for n in 1..=2u8 {
                    let idx = (i, j, k, l, m, n);
                    let expect = &(&r1.get(idx) + &r2.get(idx)) - &r0.get(idx);
                    prop_assert_eq!(r_sum.get(idx), expect);
                }}}
            }}}
        }

        #[test]
        fn gauge_preserves_c_admissibility(x in arb_traceless_x2()) {
            // Start from an admissible c and the zero b.
            let mut c = Tensor4::new(2);
            c.set((1, 2, 2, 1), Polynomial::int(1));
            c.set((2, 1, 1, 2), Polynomial::int(-1));
            let b = Tensor4::new(2);
            let (cp, _bp) = gauge_transform(&c, &b, &x).unwrap();
            prop_assert!(validate_c(&cp).passed);
        }
    }
}
