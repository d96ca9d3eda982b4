//! Structure constants of three-dimensional complex Lie algebras.
//!
//! Indices are zero-based throughout: `c[d][a][b]` is the coefficient of
//! `e_d` in `[e_a, e_b]`. The full array is stored, antisymmetric partners
//! included, so contractions can be written index for index.

use core::fmt;
use core::str::FromStr;

use crate::linalg::{det3, identity3, inverse3, zero_t3, Mat3, Tensor3};
use crate::{Error, Result, C64, DEFAULT_TOL};

/// The four unimodular three-dimensional complex Lie groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `C^3`, all brackets vanish.
    Abelian,
    /// Heisenberg group, `[e1, e2] = e3`.
    Nilpotent,
    /// Complexified rigid motions of the plane, `[e3, e1] = e1`, `[e3, e2] = -e2`.
    Solvable,
    /// `SL(2, C)` with `c^k_ij = eps_kij`.
    SL2C,
}

impl GroupKind {
    pub const ALL: [GroupKind; 4] = [GroupKind::Abelian, GroupKind::Nilpotent, GroupKind::Solvable, GroupKind::SL2C];

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Abelian => "abelian",
            GroupKind::Nilpotent => "nilpotent",
            GroupKind::Solvable => "solvable",
            GroupKind::SL2C => "sl2c",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abelian" => Ok(GroupKind::Abelian),
            "nilpotent" | "heisenberg" => Ok(GroupKind::Nilpotent),
            "solvable" => Ok(GroupKind::Solvable),
            "sl2c" | "sl(2,c)" => Ok(GroupKind::SL2C),
            _ => Err(Error::InvalidConfig("unknown group kind")),
        }
    }
}

/// Structure constants `c^d_{ab}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    c: Tensor3,
    kind: Option<GroupKind>,
    symmetric_part: f64,
}

impl StructureConstants {
    /// Antisymmetrizes `raw` in its lower indices, `c <- (c - swap_ab(c)) / 2`.
    /// The size of the discarded symmetric part is kept, see
    /// [`symmetric_part`](Self::symmetric_part).
    pub fn new(raw: Tensor3) -> Self {
        let mut c = zero_t3();
        let mut sym: f64 = 0.0;
        for d in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    c[d][a][b] = (raw[d][a][b] - raw[d][b][a]) * 0.5;
                    sym = sym.max(((raw[d][a][b] + raw[d][b][a]) * 0.5).norm());
                }
            }
        }
        StructureConstants { c, kind: None, symmetric_part: sym }
    }

    /// Like [`new`](Self::new) but rejects input whose symmetric part exceeds `tol`.
    pub fn try_new(raw: Tensor3, tol: f64) -> Result<Self> {
        let s = Self::new(raw);
        if s.symmetric_part > tol {
            return Err(Error::NotAntisymmetric { symmetric_part: s.symmetric_part });
        }
        Ok(s)
    }

    /// Sets `c^d_{ab} = value` and `c^d_{ba} = -value` for each entry.
    pub fn from_brackets(entries: &[(usize, usize, usize, C64)]) -> Self {
        let mut raw = zero_t3();
        for &(d, a, b, v) in entries {
            raw[d][a][b] = v;
            raw[d][b][a] = -v;
        }
        Self::new(raw)
    }

    pub fn zero() -> Self {
        Self::new(zero_t3())
    }

    pub fn get(&self, d: usize, a: usize, b: usize) -> C64 {
        self.c[d][a][b]
    }

    pub fn as_array(&self) -> &Tensor3 {
        &self.c
    }

    /// The catalog tag, if these constants came from [`catalog`].
    pub fn kind(&self) -> Option<GroupKind> {
        self.kind
    }

    /// Largest `|(c[d][a][b] + c[d][b][a]) / 2|` of the input before antisymmetrization.
    pub fn symmetric_part(&self) -> f64 {
        self.symmetric_part
    }

    /// Largest `|c[d][a][b] + c[d][b][a]|` of the stored array.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for d in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    r = r.max((self.c[d][a][b] + self.c[d][b][a]).norm());
                }
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &StructureConstants) -> f64 {
        let mut r: f64 = 0.0;
        for d in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    r = r.max((self.c[d][a][b] - other.c[d][a][b]).norm());
                }
            }
        }
        r
    }

    /// Nonzero entries as `(d, a, b, value)`, zero-based.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, usize, C64)> + '_ {
        (0..27).filter_map(move |n| {
            let (d, a, b) = (n / 9, (n / 3) % 3, n % 3);
            let v = self.c[d][a][b];
            (v != C64::new(0.0, 0.0)).then_some((d, a, b, v))
        })
    }
}

/// Canonical structure constants for each unimodular group.
pub fn catalog(kind: GroupKind) -> StructureConstants {
    let one = C64::new(1.0, 0.0);
    let mut s = match kind {
        GroupKind::Abelian => StructureConstants::zero(),
        GroupKind::Nilpotent => StructureConstants::from_brackets(&[(2, 0, 1, one)]),
        GroupKind::Solvable => StructureConstants::from_brackets(&[(0, 2, 0, one), (1, 2, 1, -one)]),
        GroupKind::SL2C => StructureConstants::from_brackets(&[(0, 1, 2, one), (1, 2, 0, one), (2, 0, 1, one)]),
    };
    s.kind = Some(kind);
    s
}

/// Largest absolute value of the Jacobi expression
/// `c^q_{ir} c^r_{jk} + c^q_{kr} c^r_{ij} + c^q_{jr} c^r_{ki}` over all `(q, i, j, k)`.
pub fn jacobi_residual(c: &StructureConstants) -> f64 {
    let c = &c.c;
    let mut worst: f64 = 0.0;
    for q in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut s = C64::new(0.0, 0.0);
                    for r in 0..3 {
                        s += c[q][i][r] * c[r][j][k] + c[q][k][r] * c[r][i][j] + c[q][j][r] * c[r][k][i];
                    }
                    worst = worst.max(s.norm());
                }
            }
        }
    }
    worst
}

/// `max_b |sum_a c^a_{ab}|`.
pub fn unimodularity_defect(c: &StructureConstants) -> f64 {
    (0..3).map(|b| (0..3).map(|a| c.c[a][a][b]).sum::<C64>().norm()).fold(0.0, f64::max)
}

pub fn is_unimodular(c: &StructureConstants, tol: f64) -> bool {
    unimodularity_defect(c) <= tol
}

/// An invertible change of frame `f_i = e_r P^r_i`, stored with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChange {
    p: Mat3,
    p_inv: Mat3,
}

impl BasisChange {
    /// Fails with [`Error::SingularBasisChange`] when `|det P| <= 1e-12`.
    pub fn new(p: Mat3) -> Result<Self> {
        Self::with_tolerance(p, DEFAULT_TOL)
    }

    pub fn with_tolerance(p: Mat3, tol: f64) -> Result<Self> {
        let det_abs = det3(&p).norm();
        if !(det_abs > tol) {
            return Err(Error::SingularBasisChange { det_abs });
        }
        let p_inv = inverse3(&p).ok_or(Error::SingularBasisChange { det_abs })?;
        Ok(BasisChange { p, p_inv })
    }

    pub fn identity() -> Self {
        BasisChange { p: identity3(), p_inv: identity3() }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.p
    }

    pub fn inverse_matrix(&self) -> &Mat3 {
        &self.p_inv
    }

    pub fn inverse(&self) -> BasisChange {
        BasisChange { p: self.p_inv, p_inv: self.p }
    }
}

/// Structure constants in the frame `f_i = e_r P^r_i`:
/// `k^l_{ij} = (P^-1)^l_s P^r_i P^q_j c^s_{rq}`.
pub fn transform_structure_constants(c: &StructureConstants, basis: &BasisChange) -> StructureConstants {
    let p = &basis.p;
    let pi = &basis.p_inv;
    // contract one index at a time: t1[s][i][q] = P^r_i c^s_{rq}
    let mut t1 = zero_t3();
    for s in 0..3 {
        for i in 0..3 {
            for q in 0..3 {
                t1[s][i][q] = (0..3).map(|r| p[r][i] * c.c[s][r][q]).sum();
            }
        }
    }
    let mut t2 = zero_t3();
    for s in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                t2[s][i][j] = (0..3).map(|q| p[q][j] * t1[s][i][q]).sum();
            }
        }
    }
    let mut k = zero_t3();
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                k[l][i][j] = (0..3).map(|s| pi[l][s] * t2[s][i][j]).sum();
            }
        }
    }
    StructureConstants::new(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag3, scale3};

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn nilpotent_catalog_entries() {
        let c = catalog(GroupKind::Nilpotent);
        assert_eq!(c.get(2, 0, 1), one());
        assert_eq!(c.get(2, 1, 0), -one());
        assert_eq!(c.nonzero_entries().count(), 2);
    }

    #[test]
    fn sl2c_is_levi_civita() {
        let c = catalog(GroupKind::SL2C);
        for (i, j, k, s) in
            [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (0, 2, 1, -1.0), (1, 0, 2, -1.0), (2, 1, 0, -1.0)]
        {
            assert_eq!(c.get(i, j, k), C64::new(s, 0.0));
        }
        assert_eq!(c.nonzero_entries().count(), 6);
    }

    #[test]
    fn catalog_passes_validation() {
        for kind in GroupKind::ALL {
            let c = catalog(kind);
            assert_eq!(c.antisymmetry_residual(), 0.0);
            assert!(jacobi_residual(&c) <= 1e-14);
            assert!(is_unimodular(&c, 1e-14), "{kind}");
            assert_eq!(c.kind(), Some(kind));
        }
    }

    #[test]
    fn non_unimodular_example() {
        let c = StructureConstants::from_brackets(&[(0, 0, 1, one())]);
        assert_eq!(jacobi_residual(&c), 0.0);
        assert!(!is_unimodular(&c, 1e-12));
        assert_eq!(unimodularity_defect(&c), 1.0);
    }

    #[test]
    fn constructor_reports_symmetric_part() {
        let mut raw = zero_t3();
        raw[2][0][1] = one();
        let s = StructureConstants::new(raw);
        assert_eq!(s.get(2, 0, 1), C64::new(0.5, 0.0));
        assert_eq!(s.symmetric_part(), 0.5);
        assert!(matches!(StructureConstants::try_new(raw, 1e-12), Err(Error::NotAntisymmetric { .. })));
    }

    #[test]
    fn scaling_basis_change_on_sl2c() {
        let s = 1.7;
        let p = BasisChange::new(scale3(&identity3(), s)).unwrap();
        let k = transform_structure_constants(&catalog(GroupKind::SL2C), &p);
        let expected = catalog(GroupKind::SL2C);
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert!((k.get(l, i, j) - expected.get(l, i, j) * s).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn singular_basis_change_rejected() {
        let err = BasisChange::new(diag3([1.0, 0.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::SingularBasisChange { .. }));
    }

    #[test]
    fn group_kind_parses() {
        assert_eq!("SL2C".parse::<GroupKind>().unwrap(), GroupKind::SL2C);
        assert!("su2".parse::<GroupKind>().is_err());
    }
}
