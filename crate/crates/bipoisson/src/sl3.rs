//! The complete catalog of explicit solution data at N = 3: the ten-tensor
//! basis c₀–c₉ of the skew datum space, the ten-parameter symmetric family
//! b(y₀,…,y₉) solving the tensor equation against c(y) = Σ_α y_α c_α, the
//! nine normal-form cases a1–c3, and the worked constant/linear pair of the
//! rational solution example.
//!
//! All data are hard-coded as one source-of-truth table per item; nothing is
//! derived at runtime. The cross-identities that make transcription errors
//! detectable — admissibility of every tensor, the symbolic master tensor
//! equation in all ten y-variables, equality of every case with the family
//! at its y-assignment, the weight-action ladder between basis tensors —
//! are all enforced by the test suite.

use crate::poly::{rat, ratq, Polynomial, Rational, VarId};
use crate::tensor::Tensor4;

/// Parameter shape of a catalog table entry: the stored integer is
/// multiplied by this monomial in the case parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Par {
    One,
    T,
    T2,
    A,
    A2,
    TA,
}

impl Par {
    fn apply(self, k: i64) -> Polynomial {
        let t = Polynomial::var(VarId::T);
        let a = Polynomial::var(VarId::A);
        let base = match self {
            Par::One => Polynomial::one(),
            Par::T => t,
            Par::T2 => &t * &t,
            Par::A => a,
            Par::A2 => &a * &a,
            Par::TA => &t * &a,
        };
        base.scale(&rat(k))
    }
}

/// Listed (unexpanded) entries of the ten basis tensors: each row is a
/// quadruple with its coefficient; the skew partner c_{klij} = −c_{ijkl} is
/// implied.
#[allow(clippy::type_complexity)]
const C_BASIS: [&[(u8, u8, u8, u8, i64)]; 10] = [
    &[
        (1, 1, 2, 2, 1),
        (3, 3, 1, 1, 1),
        (2, 2, 3, 3, 1),
        (1, 2, 2, 1, 1),
        (3, 1, 1, 3, 1),
        (2, 3, 3, 2, 1),
    ],
    &[(2, 2, 1, 2, 2), (1, 2, 3, 3, 2), (1, 3, 3, 2, 2)],
    &[(1, 3, 3, 3, 2), (2, 2, 1, 3, 2), (2, 3, 1, 2, 2)],
    &[(2, 3, 1, 1, 2), (2, 1, 1, 3, 2), (3, 3, 2, 3, 2)],
    &[(2, 1, 1, 1, 2), (3, 3, 2, 1, 2), (3, 1, 2, 3, 2)],
    &[(1, 1, 3, 1, 2), (3, 2, 2, 1, 2), (3, 1, 2, 2, 2)],
    &[(1, 1, 3, 2, 2), (1, 2, 3, 1, 2), (3, 2, 2, 2, 2)],
    &[(2, 1, 3, 1, 6)],
    &[(3, 2, 1, 2, 6)],
    &[(1, 3, 2, 3, 6)],
];

/// The ten-parameter symmetric family: each row lists one representative
/// quadruple and its entry as Σ coeff·y_a·y_b; the symmetric partner
/// b_{klij} = b_{ijkl} is implied.
#[rustfmt::skip]
#[allow(clippy::type_complexity)]
const B_FAMILY: &[((u8, u8, u8, u8), &[(i64, u8, u8)])] = &[
    ((1, 1, 1, 1), &[(2, 0, 0), (-8, 3, 6)]),
    ((1, 2, 1, 1), &[(-4, 0, 1), (-4, 2, 6), (12, 3, 8)]),
    ((1, 2, 1, 2), &[(8, 1, 1), (24, 2, 8)]),
    ((1, 3, 1, 1), &[(-4, 0, 2), (-4, 1, 3), (12, 6, 9)]),
    ((1, 3, 1, 2), &[(4, 1, 2), (-36, 8, 9)]),
    ((1, 3, 1, 3), &[(24, 1, 9), (8, 2, 2)]),
    ((2, 1, 1, 1), &[(4, 0, 4), (8, 3, 5)]),
    ((2, 1, 1, 2), &[(-1, 0, 0), (-4, 1, 4), (4, 2, 5), (4, 3, 6)]),
    ((2, 1, 1, 3), &[(-4, 2, 4), (-12, 5, 9)]),
    ((2, 1, 2, 1), &[(24, 3, 7), (8, 4, 4)]),
    ((2, 2, 1, 1), &[(-1, 0, 0), (-4, 1, 4), (4, 2, 5), (4, 3, 6)]),
    ((2, 2, 1, 2), &[(4, 0, 1), (8, 2, 6)]),
    ((2, 2, 1, 3), &[(-4, 1, 3), (-12, 6, 9)]),
    ((2, 2, 2, 1), &[(-4, 0, 4), (12, 2, 7), (-4, 3, 5)]),
    ((2, 2, 2, 2), &[(2, 0, 0), (-8, 2, 5)]),
    ((2, 3, 1, 1), &[(-4, 2, 4), (-12, 5, 9)]),
    ((2, 3, 1, 2), &[(-4, 1, 3), (-12, 6, 9)]),
    ((2, 3, 1, 3), &[(12, 0, 9), (-8, 2, 3)]),
    ((2, 3, 2, 1), &[(4, 3, 4), (-36, 7, 9)]),
    ((2, 3, 2, 2), &[(-4, 0, 3), (-4, 2, 4), (12, 5, 9)]),
    ((2, 3, 2, 3), &[(8, 3, 3), (24, 4, 9)]),
    ((3, 1, 1, 1), &[(4, 0, 5), (8, 4, 6)]),
    ((3, 1, 1, 2), &[(-4, 1, 5), (-12, 4, 8)]),
    ((3, 1, 1, 3), &[(-1, 0, 0), (4, 1, 4), (-4, 2, 5), (4, 3, 6)]),
    ((3, 1, 2, 1), &[(12, 0, 7), (-8, 4, 5)]),
    ((3, 1, 2, 2), &[(-12, 1, 7), (-4, 4, 6)]),
    ((3, 1, 2, 3), &[(-12, 2, 7), (-4, 3, 5)]),
    ((3, 1, 3, 1), &[(8, 5, 5), (24, 6, 7)]),
    ((3, 2, 1, 1), &[(-4, 1, 5), (-12, 4, 8)]),
    ((3, 2, 1, 2), &[(12, 0, 8), (-8, 1, 6)]),
    ((3, 2, 1, 3), &[(-4, 2, 6), (-12, 3, 8)]),
    ((3, 2, 2, 1), &[(-12, 1, 7), (-4, 4, 6)]),
    ((3, 2, 2, 2), &[(4, 0, 6), (8, 1, 5)]),
    ((3, 2, 2, 3), &[(-1, 0, 0), (4, 1, 4), (4, 2, 5), (-4, 3, 6)]),
    ((3, 2, 3, 1), &[(4, 5, 6), (-36, 7, 8)]),
    ((3, 2, 3, 2), &[(24, 5, 8), (8, 6, 6)]),
    ((3, 3, 1, 1), &[(-1, 0, 0), (4, 1, 4), (-4, 2, 5), (4, 3, 6)]),
    ((3, 3, 1, 2), &[(-4, 2, 6), (-12, 3, 8)]),
    ((3, 3, 1, 3), &[(4, 0, 2), (8, 1, 3)]),
    ((3, 3, 2, 1), &[(-12, 2, 7), (-4, 3, 5)]),
    ((3, 3, 2, 2), &[(-1, 0, 0), (4, 1, 4), (4, 2, 5), (-4, 3, 6)]),
    ((3, 3, 2, 3), &[(4, 0, 3), (8, 2, 4)]),
    ((3, 3, 3, 1), &[(-4, 0, 5), (12, 1, 7), (-4, 4, 6)]),
    ((3, 3, 3, 2), &[(-4, 0, 6), (-4, 1, 5), (12, 4, 8)]),
    ((3, 3, 3, 3), &[(2, 0, 0), (-8, 1, 4)]),
];

/// Basis tensor c_α (α in 0..=9), expanded with skew partners.
pub fn basis_c(alpha: u8) -> Tensor4 {
    assert!(alpha <= 9, "basis index must be 0..=9, got {alpha}");
    let mut t = Tensor4::new(3);
    for &(i, j, k, l, v) in C_BASIS[alpha as usize] {
        t.add_to((i, j, k, l), Polynomial::int(v));
        t.add_to((k, l, i, j), Polynomial::int(-v));
    }
    t
}

/// The symbolic parameter vector (y₀,…,y₉) as polynomial variables.
pub fn y_symbolic() -> [Polynomial; 10] {
    std::array::from_fn(|k| Polynomial::var(VarId::Y(k as u8)))
}

/// The all-zero parameter vector.
pub fn y_zero() -> [Polynomial; 10] {
    std::array::from_fn(|_| Polynomial::zero())
}

/// c(y) = Σ_α y_α c_α.
pub fn c_of_y(y: &[Polynomial; 10]) -> Tensor4 {
    let mut t = Tensor4::new(3);
    for (alpha, ya) in y.iter().enumerate() {
        if ya.is_zero() {
            continue;
        }
        for (&idx, p) in basis_c(alpha as u8).entries() {
            t.add_to(idx, ya * p);
        }
    }
    t
}

/// The symmetric family member b(y), expanded with symmetric partners.
pub fn b_of_y(y: &[Polynomial; 10]) -> Tensor4 {
    let mut t = Tensor4::new(3);
    for &((i, j, k, l), terms) in B_FAMILY {
        let mut p = Polynomial::zero();
        for &(coeff, a, bb) in terms {
            p.add_assign(&(&y[a as usize] * &y[bb as usize]).scale(&rat(coeff)));
        }
        if p.is_zero() {
            continue;
        }
        t.add_to((i, j, k, l), p.clone());
        if (i, j) != (k, l) {
            t.add_to((k, l, i, j), p);
        }
    }
    t
}

/// The nine normal-form case labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CaseKey {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    C1,
    C2,
    C3,
}

impl CaseKey {
    pub fn all() -> [CaseKey; 9] {
        [
            CaseKey::A1,
            CaseKey::A2,
            CaseKey::A3,
            CaseKey::A4,
            CaseKey::B1,
            CaseKey::B2,
            CaseKey::C1,
            CaseKey::C2,
            CaseKey::C3,
        ]
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseKey::A1 => "a1",
            CaseKey::A2 => "a2",
            CaseKey::A3 => "a3",
            CaseKey::A4 => "a4",
            CaseKey::B1 => "b1",
            CaseKey::B2 => "b2",
            CaseKey::C1 => "c1",
            CaseKey::C2 => "c2",
            CaseKey::C3 => "c3",
        }
    }

    /// Symbolic parameters the case depends on.
    pub fn params(self) -> &'static [VarId] {
        match self {
            CaseKey::A4 | CaseKey::B2 | CaseKey::C2 => &[VarId::T],
            CaseKey::C3 => &[VarId::T, VarId::A],
            _ => &[],
        }
    }
}

impl std::fmt::Display for CaseKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for CaseKey {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseKey::all()
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown case `{s}` (expected one of a1..a4, b1, b2, c1..c3)"))
    }
}

/// A fully expanded normal-form datum together with the parameter
/// assignment that generates it from the (c(y), b(y)) family.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub key: CaseKey,
    pub c: Tensor4,
    pub b: Tensor4,
    /// y-assignment with entries polynomial in the case parameters.
    pub y: [Polynomial; 10],
    /// Data note: what the tables contain and which entries are forced by
    /// the y-assignment rather than independently listed.
    pub note: &'static str,
}

/// Listed tensor rows of a case: quadruple, integer scale, parameter factor.
type TensorRows = &'static [(u8, u8, u8, u8, i64, Par)];
/// y-assignment rows of a case: index, integer scale, parameter factor.
type AssignmentRows = &'static [(u8, i64, Par)];

#[rustfmt::skip]
fn case_tables(key: CaseKey) -> (TensorRows, TensorRows, AssignmentRows, &'static str) {
    use Par::*;
    match key {
        CaseKey::A1 => (
            &[(2, 1, 3, 1, 6, One)],
            &[],
            &[(7, 1, One)],
            "c = 6·E21⊗E31 skew part (= c7); b = 0; generated at y7 = 1.",
        ),
        CaseKey::A2 => (
            &[(1, 1, 3, 1, -2, One), (3, 2, 2, 1, -2, One), (3, 1, 2, 2, -2, One)],
            &[(3, 1, 3, 1, 8, One)],
            &[(5, -1, One)],
            "c = -c5; single symmetric entry b3131 = 8; generated at y5 = -1.",
        ),
        CaseKey::A3 => (
            &[
                (1, 1, 3, 1, -2, One), (3, 2, 2, 1, -2, One), (3, 1, 2, 2, -2, One),
                (1, 1, 3, 2, -2, One), (1, 2, 3, 1, -2, One), (3, 2, 2, 2, -2, One),
            ],
            &[(3, 1, 3, 1, 8, One), (3, 2, 3, 2, 8, One), (3, 2, 3, 1, 4, One)],
            &[(5, -1, One), (6, -1, One)],
            "c = -c5 - c6: the assignment y5 = y6 = -1 forces the three c6 \
             rows in addition to the c5 rows, and the tensor equation fails \
             without them; b has the three listed entries.",
        ),
        CaseKey::A4 => (
            &[
                (1, 1, 2, 2, 1, T), (3, 3, 1, 1, 1, T), (2, 2, 3, 3, 1, T),
                (1, 2, 2, 1, 1, T), (3, 1, 1, 3, 1, T), (2, 3, 3, 2, 1, T),
            ],
            &[
                (1, 1, 1, 1, 2, T2), (2, 1, 1, 2, -1, T2), (2, 2, 1, 1, -1, T2),
                (2, 2, 2, 2, 2, T2), (3, 1, 1, 3, -1, T2), (3, 2, 2, 3, -1, T2),
                (3, 3, 1, 1, -1, T2), (3, 3, 2, 2, -1, T2), (3, 3, 3, 3, 2, T2),
            ],
            &[(0, 1, T)],
            "c = t·c0 (zero-weight datum); generated at y0 = t.",
        ),
        CaseKey::B1 => (
            &[
                (1, 1, 3, 1, -2, One), (3, 2, 2, 1, -2, One), (3, 1, 2, 2, -2, One),
                (1, 3, 3, 3, 2, One), (2, 2, 1, 3, 2, One), (2, 3, 1, 2, 2, One),
            ],
            &[
                (1, 3, 1, 3, 8, One), (2, 1, 1, 2, -4, One), (2, 2, 1, 1, -4, One),
                (2, 2, 2, 2, 8, One), (3, 1, 1, 3, 4, One), (3, 1, 3, 1, 8, One),
                (3, 2, 2, 3, -4, One), (3, 3, 1, 1, 4, One), (3, 3, 2, 2, -4, One),
            ],
            &[(5, -1, One), (2, 1, One)],
            "c = c2 - c5; generated at y2 = 1, y5 = -1.",
        ),
        CaseKey::B2 => (
            &[
                (1, 1, 2, 2, -1, T), (3, 3, 1, 1, -1, T), (2, 2, 3, 3, -1, T),
                (1, 2, 2, 1, -1, T), (3, 1, 1, 3, -1, T), (2, 3, 3, 2, -1, T),
                (2, 1, 3, 1, 6, T),
            ],
            &[
                (1, 1, 1, 1, 2, T2), (2, 1, 1, 2, -1, T2), (2, 2, 1, 1, -1, T2),
                (2, 2, 2, 2, 2, T2), (3, 1, 1, 3, -1, T2), (3, 1, 2, 1, -12, T2),
                (3, 2, 2, 3, -1, T2), (3, 3, 1, 1, -1, T2), (3, 3, 2, 2, -1, T2),
                (3, 3, 3, 3, 2, T2),
            ],
            &[(0, -1, T), (7, 1, T)],
            "c = -t·c0 + t·c7; generated at y0 = -t, y7 = t.",
        ),
        CaseKey::C1 => (
            &[
                (2, 2, 1, 2, -2, One), (1, 2, 3, 3, -2, One), (1, 3, 3, 2, -2, One),
                (2, 1, 3, 1, -6, One),
            ],
            &[
                (1, 2, 1, 2, 8, One), (3, 1, 2, 2, -12, One), (3, 2, 2, 1, -12, One),
                (3, 3, 3, 1, 12, One),
            ],
            &[(1, -1, One), (7, -1, One)],
            "c = -c1 - c7; generated at y1 = y7 = -1. The symmetric entry \
             12 sits at b3331 (the family value 12·y1·y7); placing it at \
             b3321 instead breaks the tensor equation.",
        ),
        CaseKey::C2 => (
            &[
                (2, 2, 1, 2, -2, T), (1, 2, 3, 3, -2, T), (1, 3, 3, 2, -2, T),
                (2, 1, 1, 1, 2, T), (3, 3, 2, 1, 2, T), (3, 1, 2, 3, 2, T),
                (2, 1, 3, 1, -6, T),
            ],
            &[
                (1, 2, 1, 2, 8, T2), (2, 1, 1, 2, 4, T2), (2, 1, 2, 1, 8, T2),
                (2, 2, 1, 1, 4, T2), (3, 1, 1, 3, -4, T2), (3, 1, 2, 2, -12, T2),
                (3, 2, 2, 1, -12, T2), (3, 2, 2, 3, -4, T2), (3, 3, 1, 1, -4, T2),
                (3, 3, 2, 2, -4, T2), (3, 3, 3, 1, 12, T2), (3, 3, 3, 3, 8, T2),
            ],
            &[(1, -1, T), (7, -1, T), (4, 1, T)],
            "c = -t·c1 + t·c4 - t·c7; generated at y1 = y7 = -t, y4 = t. \
             b3311 = -4t² is stored once, and b3331 = 12t² (the family value \
             12·y1·y7) is required for the tensor equation to hold.",
        ),
        CaseKey::C3 => (
            &[
                (1, 1, 2, 2, 1, A), (3, 3, 1, 1, 1, A), (2, 2, 3, 3, 1, A),
                (1, 2, 2, 1, 1, A), (3, 1, 1, 3, 1, A), (2, 3, 3, 2, 1, A),
                (2, 1, 3, 1, 6, T), (3, 2, 1, 2, 6, T), (1, 3, 2, 3, 6, T),
            ],
            &[
                (1, 1, 1, 1, 2, A2), (1, 3, 1, 2, -36, T2), (2, 1, 1, 2, -1, A2),
                (2, 2, 1, 1, -1, A2), (2, 2, 2, 2, 2, A2), (2, 3, 1, 3, 12, TA),
                (2, 3, 2, 1, -36, T2), (3, 1, 1, 3, -1, A2), (3, 1, 2, 1, 12, TA),
                (3, 2, 1, 2, 12, TA), (3, 2, 2, 3, -1, A2), (3, 2, 3, 1, -36, T2),
                (3, 3, 1, 1, -1, A2), (3, 3, 2, 2, -1, A2), (3, 3, 3, 3, 2, A2),
            ],
            &[(7, 1, T), (8, 1, T), (9, 1, T), (0, 1, A)],
            "c = a·c0 + t·(c7 + c8 + c9), the two-parameter elliptic datum; \
             generated at y7 = y8 = y9 = t, y0 = a.",
        ),
    }
}

/// The normal-form datum for a case, with its parameters kept symbolic
/// (substitute on the returned tensors to specialize them numerically).
pub fn normal_form(key: CaseKey) -> NormalForm {
    let (c_rows, b_rows, y_rows, note) = case_tables(key);
    let mut c = Tensor4::new(3);
    for &(i, j, k, l, v, par) in c_rows {
        let p = par.apply(v);
        c.add_to((i, j, k, l), p.clone());
        c.add_to((k, l, i, j), -&p);
    }
    let mut b = Tensor4::new(3);
    for &(i, j, k, l, v, par) in b_rows {
        let p = par.apply(v);
        b.add_to((i, j, k, l), p.clone());
        if (i, j) != (k, l) {
            b.add_to((k, l, i, j), p);
        }
    }
    let mut y = y_zero();
    for &(alpha, v, par) in y_rows {
        y[alpha as usize] = par.apply(v);
    }
    NormalForm { key, c, b, y, note }
}

/// Expanded x∧y = x⊗y − y⊗x for matrix units x = E_{ij}, y = E_{kl},
/// scaled by k.
fn add_wedge(t: &mut Tensor4, k: i64, x: (u8, u8), y: (u8, u8)) {
    t.add_to((x.0, x.1, y.0, y.1), Polynomial::int(k));
    t.add_to((y.0, y.1, x.0, x.1), Polynomial::int(-k));
}

/// Expanded x⊙y = x⊗y + y⊗x scaled by k; a diagonal term k·E_ij⊙E_ij
/// contributes 2k at (i,j,i,j).
fn add_sym(t: &mut Tensor4, k: i64, x: (u8, u8), y: (u8, u8)) {
    t.add_to((x.0, x.1, y.0, y.1), Polynomial::int(k));
    t.add_to((y.0, y.1, x.0, x.1), Polynomial::int(k));
}

/// The constant/linear pair of the worked rational-solution example.
///
/// The constant part is pinned by the exact identity c = ½(−c₄ + c₈); its
/// wedge expansion is E₁₁∧E₂₁ + E₂₁∧E₃₃ + E₂₃∧E₃₁ + 3E₃₂∧E₁₂ (note the
/// orientation of the last term — the opposite one is −½c₈ and fails both
/// the identity and the tensor equation). The symmetric part is the family
/// member b(y) at y₄ = −½, y₈ = ½, the assignment that generates the same
/// c; its expansion is −3E₃₃⊙E₃₂ + 3E₁₂⊙E₃₁ + 3E₁₁⊙E₃₂ + E₂₁⊙E₂₁. Variants
/// with the opposite ⊙-signs or a doubled diagonal term do not satisfy the
/// tensor equation against this c (kept as a negative control in tests).
pub fn rmatrix_example_parts() -> (Tensor4, Tensor4) {
    let mut c = Tensor4::new(3);
    add_wedge(&mut c, 1, (1, 1), (2, 1));
    add_wedge(&mut c, 1, (2, 1), (3, 3));
    add_wedge(&mut c, 1, (2, 3), (3, 1));
    add_wedge(&mut c, 3, (3, 2), (1, 2));
    let mut b = Tensor4::new(3);
    add_sym(&mut b, -3, (3, 3), (3, 2));
    add_sym(&mut b, 3, (1, 2), (3, 1));
    add_sym(&mut b, 3, (1, 1), (3, 2));
    add_sym(&mut b, 1, (2, 1), (2, 1));
    (c, b)
}

/// ½(−c₄ + c₈), the closed combination the example's constant part equals.
pub fn rmatrix_example_basis_combination() -> Tensor4 {
    let half = ratq(1, 2);
    basis_c(4)
        .scale(&-half.clone())
        .add(&basis_c(8).scale(&half))
        .expect("same dimension")
}

/// Parsable catalog keys, in listing order. Basis tensors are prefixed
/// (`basis-c0`..`basis-c9`) because the bare labels `c1`, `c2`, `c3` name
/// normal-form cases.
pub fn catalog_keys() -> Vec<String> {
    let mut keys: Vec<String> = (0..=9).map(|a| format!("basis-c{a}")).collect();
    keys.extend(CaseKey::all().iter().map(|k| k.label().to_string()));
    keys.push("rmatrix-example".to_string());
    keys
}

/// Specialize an assignment like [`NormalForm::y`] at numeric parameter
/// values (t, a), leaving unbound parameters symbolic.
pub fn bind_params(tensor: &Tensor4, t: Option<&Rational>, a: Option<&Rational>) -> Tensor4 {
    let mut out = tensor.clone();
    if let Some(tv) = t {
        out = out.substitute(VarId::T, &Polynomial::constant(tv.clone()));
    }
    if let Some(av) = a {
        out = out.substitute(VarId::A, &Polynomial::constant(av.clone()));
    }
    out
}
