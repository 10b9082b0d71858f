//! Dense matrices over GF(p^k) and generator models for the classical
//! groups used as black-box backends.
//!
//! The generator sets are built from unipotent isometries (transvections
//! for SL/Sp/SU, Eichler transformations for the orthogonal groups) plus a
//! diagonal torus element per hyperbolic pair. Unipotent isometries have
//! determinant 1, preserve the form by construction and, in the orthogonal
//! case, lie in the kernel of the spinor norm because their order is the
//! odd characteristic; this yields generators of Omega without a spinor
//! norm routine. Every generator is validated against its defining
//! predicates on construction, and closure enumeration pins the generated
//! group order on small instances in the test suite.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::gf::{Field, FieldElem};
use crate::{Error, Result};

/// A dense n-by-n matrix; entries are stored row-major as flattened
/// coefficient vectors of the ambient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zero(field: &Field, n: usize) -> Self {
        Matrix {
            n,
            data: vec![0; n * n * field.k()],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zero(field, n);
        for i in 0..n {
            m.set_entry(field, i, i, &field.one());
        }
        m
    }

    pub fn diag(field: &Field, entries: &[FieldElem]) -> Self {
        let mut m = Self::zero(field, entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set_entry(field, i, i, e);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, field: &Field, i: usize, j: usize) -> std::ops::Range<usize> {
        let k = field.k();
        let start = (i * self.n + j) * k;
        start..start + k
    }

    pub fn entry(&self, field: &Field, i: usize, j: usize) -> FieldElem {
        field.elem(&self.data[self.slot(field, i, j)])
    }

    pub fn set_entry(&mut self, field: &Field, i: usize, j: usize, v: &FieldElem) {
        let r = self.slot(field, i, j);
        self.data[r].copy_from_slice(v.coeffs());
    }

    pub fn is_identity(&self, field: &Field) -> bool {
        let k = field.k();
        for i in 0..self.n {
            for j in 0..self.n {
                let s = (i * self.n + j) * k;
                let e = &self.data[s..s + k];
                if i == j {
                    if e[0] != 1 || e[1..].iter().any(|&c| c != 0) {
                        return false;
                    }
                } else if e.iter().any(|&c| c != 0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, field: &Field, rhs: &Matrix) -> Matrix {
        let n = self.n;
        assert_eq!(n, rhs.n, "dimension mismatch");
        let k = field.k();
        let mut out = Matrix::zero(field, n);
        if k == 1 {
            // fast path: prime field
            let p = field.p();
            for i in 0..n {
                for j in 0..n {
                    let mut acc: u128 = 0;
                    for l in 0..n {
                        acc += (self.data[i * n + l] as u128) * (rhs.data[l * n + j] as u128);
                    }
                    out.data[i * n + j] = (acc % p as u128) as u64;
                }
            }
            return out;
        }
        let mut wide = vec![0u128; 2 * k - 1];
        for i in 0..n {
            for j in 0..n {
                wide.iter_mut().for_each(|w| *w = 0);
                for l in 0..n {
                    let a = &self.data[(i * n + l) * k..(i * n + l + 1) * k];
                    let b = &rhs.data[(l * n + j) * k..(l * n + j + 1) * k];
                    for (x, &ax) in a.iter().enumerate() {
                        if ax == 0 {
                            continue;
                        }
                        for (y, &by) in b.iter().enumerate() {
                            wide[x + y] += (ax as u128) * (by as u128);
                        }
                    }
                }
                let red = field.reduce_wide(&mut wide);
                let s = (i * n + j) * k;
                out.data[s..s + k].copy_from_slice(&red);
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination; None for singular input.
    pub fn inverse(&self, field: &Field) -> Option<Matrix> {
        let n = self.n;
        let mut a: Vec<Vec<FieldElem>> = (0..n)
            .map(|i| (0..n).map(|j| self.entry(field, i, j)).collect())
            .collect();
        let mut b: Vec<Vec<FieldElem>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !field.is_zero(&a[r][col]))?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            let inv = field.inv(&a[col][col]).ok()?;
            for j in 0..n {
                a[col][j] = field.mul(&a[col][j], &inv);
                b[col][j] = field.mul(&b[col][j], &inv);
            }
            for r in 0..n {
                if r != col && !field.is_zero(&a[r][col]) {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        a[r][j] = field.sub(&a[r][j], &field.mul(&f, &a[col][j]));
                        b[r][j] = field.sub(&b[r][j], &field.mul(&f, &b[col][j]));
                    }
                }
            }
        }
        let mut out = Matrix::zero(field, n);
        for i in 0..n {
            for j in 0..n {
                out.set_entry(field, i, j, &b[i][j]);
            }
        }
        Some(out)
    }

    pub fn determinant(&self, field: &Field) -> FieldElem {
        let n = self.n;
        let mut a: Vec<Vec<FieldElem>> = (0..n)
            .map(|i| (0..n).map(|j| self.entry(field, i, j)).collect())
            .collect();
        let mut det = field.one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !field.is_zero(&a[r][col])) else {
                return field.zero();
            };
            if pivot != col {
                a.swap(col, pivot);
                det = field.neg(&det);
            }
            det = field.mul(&det, &a[col][col]);
            let inv = field.inv(&a[col][col]).unwrap();
            for r in col + 1..n {
                if !field.is_zero(&a[r][col]) {
                    let f = field.mul(&a[r][col], &inv);
                    for j in col..n {
                        a[r][j] = field.sub(&a[r][j], &field.mul(&f, &a[col][j]));
                    }
                }
            }
        }
        det
    }

    pub fn transpose(&self, field: &Field) -> Matrix {
        let mut out = Matrix::zero(field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set_entry(field, j, i, &self.entry(field, i, j));
            }
        }
        out
    }

    /// Entrywise Frobenius x -> x^(p^d).
    pub fn frobenius(&self, field: &Field, d: usize) -> Matrix {
        let mut out = Matrix::zero(field, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set_entry(field, i, j, &field.frobenius(&self.entry(field, i, j), d));
            }
        }
        out
    }

    /// Apply to a column vector.
    pub fn apply(&self, field: &Field, v: &[FieldElem]) -> Vec<FieldElem> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut acc = field.zero();
                for j in 0..n {
                    acc = field.add(&acc, &field.mul(&self.entry(field, i, j), &v[j]));
                }
                acc
            })
            .collect()
    }

    /// Packs the matrix into a canonical byte key (entries reduced, so the
    /// encoding is injective).
    pub fn pack_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() * 4);
        for &c in &self.data {
            out.extend_from_slice(&(c as u32).to_le_bytes());
        }
        out
    }

    /// Packs into a u128 when every coefficient fits in ceil(log2 p) bits
    /// and the total is at most 128 bits.
    pub fn pack_u128(&self, field: &Field) -> Option<u128> {
        let bits = 64 - (field.p() - 1).leading_zeros() as usize;
        if bits * self.data.len() > 128 {
            return None;
        }
        let mut acc: u128 = 0;
        for &c in &self.data {
            acc = (acc << bits) | c as u128;
        }
        Some(acc)
    }

    pub fn unpack_u128(field: &Field, n: usize, mut key: u128) -> Matrix {
        let k = field.k();
        let bits = 64 - (field.p() - 1).leading_zeros() as usize;
        let len = n * n * k;
        let mask = (1u128 << bits) - 1;
        let mut data = vec![0u64; len];
        for i in (0..len).rev() {
            data[i] = (key & mask) as u64;
            key >>= bits;
        }
        Matrix { n, data }
    }
}

/// The classical families shipped as matrix backends, plus the two
/// non-simple p-core test constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "SL")]
    Sl,
    #[serde(rename = "SU")]
    Su,
    #[serde(rename = "Sp")]
    Sp,
    #[serde(rename = "OmegaPlus")]
    OmegaPlus,
    #[serde(rename = "OmegaMinus")]
    OmegaMinus,
    #[serde(rename = "OmegaOdd")]
    OmegaOdd,
    #[serde(rename = "AffineSL")]
    AffineSl,
    #[serde(rename = "BlockSL")]
    BlockSl,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Sl => "SL",
            Family::Su => "SU",
            Family::Sp => "Sp",
            Family::OmegaPlus => "OmegaPlus",
            Family::OmegaMinus => "OmegaMinus",
            Family::OmegaOdd => "OmegaOdd",
            Family::AffineSl => "AffineSL",
            Family::BlockSl => "BlockSL",
        }
    }
}

/// Descriptor of a matrix group: family, natural-module dimension n and
/// field of definition q = p^k. SU_n(q) acts on a module over GF(q^2);
/// AffineSL and BlockSL are the non-simple p-core fixtures and act in
/// dimension n+1 and 2n respectively.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub p: u64,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<String>,
}

impl GroupSpec {
    pub fn new(family: Family, n: usize, p: u64, k: usize) -> Self {
        GroupSpec {
            family,
            n,
            p,
            k,
            form: None,
            seed: None,
            exponent: None,
        }
    }

    /// Field of definition GF(q), q = p^k.
    pub fn defining_field(&self) -> Result<Field> {
        Field::new(self.p, self.k, None)
    }

    /// Field the matrix entries live in (GF(q^2) for SU, GF(q) otherwise).
    pub fn module_field(&self) -> Result<Field> {
        let k = match self.family {
            Family::Su => 2 * self.k,
            _ => self.k,
        };
        Field::new(self.p, k, None)
    }

    /// Dimension of the shipped matrix representation.
    pub fn rep_dim(&self) -> usize {
        match self.family {
            Family::AffineSl => self.n + 1,
            Family::BlockSl => 2 * self.n,
            _ => self.n,
        }
    }

    /// q = p^k as a big natural.
    pub fn q(&self) -> BigUint {
        BigUint::from(self.p).pow(self.k as u32)
    }

    pub fn q_u64(&self) -> Option<u64> {
        let mut q: u64 = 1;
        for _ in 0..self.k {
            q = q.checked_mul(self.p)?;
        }
        Some(q)
    }

    /// True for the two non-simple p-core test constructions.
    pub fn is_pcore_fixture(&self) -> bool {
        matches!(self.family, Family::AffineSl | Family::BlockSl)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 {
            return Err(Error::BadSpec("characteristic must be an odd prime".into()));
        }
        let min_n = match self.family {
            Family::Sl | Family::AffineSl | Family::BlockSl => 2,
            Family::Su => 2,
            Family::Sp => 2,
            Family::OmegaPlus | Family::OmegaMinus => 4,
            Family::OmegaOdd => 3,
        };
        if self.n < min_n {
            return Err(Error::BadSpec(format!(
                "{} needs n >= {min_n}",
                self.family.name()
            )));
        }
        match self.family {
            Family::Sp | Family::OmegaPlus | Family::OmegaMinus if self.n % 2 != 0 => {
                return Err(Error::BadSpec("even dimension required".into()))
            }
            Family::OmegaOdd if self.n % 2 == 0 => {
                return Err(Error::BadSpec("odd dimension required".into()))
            }
            Family::BlockSl if self.k < 2 => {
                return Err(Error::BadSpec(
                    "BlockSL requires an extension field (k >= 2)".into(),
                ))
            }
            _ => {}
        }
        if let Some(form) = &self.form {
            let std = self.standard_form()?;
            match std {
                Some(j) => {
                    let f = self.module_field()?;
                    let given = matrix_from_rows(&f, form)?;
                    if given != j {
                        return Err(Error::BadSpec(
                            "only the built-in standard Gram matrix is supported; \
                             transport your group to the standard form first"
                                .into(),
                        ));
                    }
                }
                None => {
                    return Err(Error::BadSpec(format!(
                        "{} carries no bilinear form",
                        self.family.name()
                    )))
                }
            }
        }
        Ok(())
    }

    /// Number of hyperbolic pairs in the standard basis.
    fn pairs(&self) -> usize {
        match self.family {
            Family::Sp => self.n / 2,
            Family::Su => self.n / 2,
            Family::OmegaPlus => self.n / 2,
            Family::OmegaMinus => self.n / 2 - 1,
            Family::OmegaOdd => (self.n - 1) / 2,
            _ => 0,
        }
    }

    /// The standard Gram matrix for the family, if any. Basis order:
    /// e_1..e_m, anisotropic part, f_1..f_m with phi(e_i, f_i) = 1.
    pub fn standard_form(&self) -> Result<Option<Matrix>> {
        let f = self.module_field()?;
        let n = self.n;
        let m = self.pairs();
        let mid = n - 2 * m;
        let fidx = |i: usize| m + mid + i;
        let mut j = Matrix::zero(&f, n);
        match self.family {
            Family::Sp => {
                for i in 0..m {
                    j.set_entry(&f, i, fidx(i), &f.one());
                    j.set_entry(&f, fidx(i), i, &f.neg(&f.one()));
                }
            }
            Family::Su => {
                for i in 0..m {
                    j.set_entry(&f, i, fidx(i), &f.one());
                    j.set_entry(&f, fidx(i), i, &f.one());
                }
                if mid == 1 {
                    j.set_entry(&f, m, m, &f.one());
                }
            }
            Family::OmegaPlus | Family::OmegaMinus | Family::OmegaOdd => {
                for i in 0..m {
                    j.set_entry(&f, i, fidx(i), &f.one());
                    j.set_entry(&f, fidx(i), i, &f.one());
                }
                if self.family == Family::OmegaOdd {
                    j.set_entry(&f, m, m, &f.from_int(2));
                } else if self.family == Family::OmegaMinus {
                    // anisotropic plane: Q(x, y) = x^2 - delta y^2, delta a
                    // non-square, stored as phi = 2 Q on the diagonal
                    let delta = nonsquare(&f);
                    j.set_entry(&f, m, m, &f.from_int(2));
                    j.set_entry(&f, m + 1, m + 1, &f.neg(&f.add(&delta, &delta)));
                }
            }
            _ => return Ok(None),
        }
        Ok(Some(j))
    }
}

fn matrix_from_rows(field: &Field, rows: &[Vec<u64>]) -> Result<Matrix> {
    let n = rows.len();
    let mut m = Matrix::zero(field, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::BadSpec("form matrix is not square".into()));
        }
        for (j, &v) in row.iter().enumerate() {
            m.set_entry(field, i, j, &field.from_int(v));
        }
    }
    Ok(m)
}

/// A fixed non-square in GF(q), q odd.
pub fn nonsquare(field: &Field) -> FieldElem {
    let omega = field.primitive_element();
    omega
}

/// sigma-power applied entrywise on the second factor when checking forms:
/// 0 for bilinear, k for the unitary conjugation x -> x^q on GF(q^2).
fn conj_power(spec: &GroupSpec) -> usize {
    match spec.family {
        Family::Su => spec.k,
        _ => 0,
    }
}

/// Checks M^T J M^sigma = J.
pub fn preserves_form(field: &Field, j: &Matrix, m: &Matrix, sigma: usize) -> bool {
    let msig = if sigma == 0 {
        m.clone()
    } else {
        m.frobenius(field, sigma)
    };
    let lhs = m.transpose(field).mul(field, j).mul(field, &msig);
    lhs == *j
}

/// Gram-form evaluation phi(x, y) = x^T J y^sigma.
pub fn form_value(
    field: &Field,
    j: &Matrix,
    x: &[FieldElem],
    y: &[FieldElem],
    sigma: usize,
) -> FieldElem {
    let n = j.dim();
    let mut acc = field.zero();
    for a in 0..n {
        if field.is_zero(&x[a]) {
            continue;
        }
        for b in 0..n {
            let jab = j.entry(field, a, b);
            if field.is_zero(&jab) {
                continue;
            }
            let yb = if sigma == 0 {
                y[b].clone()
            } else {
                field.frobenius(&y[b], sigma)
            };
            acc = field.add(&acc, &field.mul(&x[a], &field.mul(&jab, &yb)));
        }
    }
    acc
}

pub(crate) fn basis_vec(field: &Field, n: usize, i: usize) -> Vec<FieldElem> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

/// rank-one update I + c * u * (J w)^T restricted appropriately; the shared
/// shape of transvections, Siegel and Eichler elements.
fn unipotent_from_functional(
    field: &Field,
    n: usize,
    terms: &[(Vec<FieldElem>, Vec<FieldElem>)], // (column u, row r): adds u * r^T
) -> Matrix {
    let mut m = Matrix::identity(field, n);
    for (u, r) in terms {
        for i in 0..n {
            if field.is_zero(&u[i]) {
                continue;
            }
            for jj in 0..n {
                if field.is_zero(&r[jj]) {
                    continue;
                }
                let cur = m.entry(field, i, jj);
                m.set_entry(field, i, jj, &field.add(&cur, &field.mul(&u[i], &r[jj])));
            }
        }
    }
    m
}

/// Row functional x -> phi(x, w) as a vector of coefficients.
fn form_functional(field: &Field, j: &Matrix, w: &[FieldElem], sigma: usize) -> Vec<FieldElem> {
    let n = j.dim();
    (0..n)
        .map(|i| {
            let e = basis_vec(field, n, i);
            form_value(field, j, &e, w, sigma)
        })
        .collect()
}

fn scale_vec(field: &Field, c: &FieldElem, v: &[FieldElem]) -> Vec<FieldElem> {
    v.iter().map(|x| field.mul(c, x)).collect()
}

fn add_vec(field: &Field, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    a.iter().zip(b).map(|(x, y)| field.add(x, y)).collect()
}

/// Symplectic transvection x -> x + c phi(x, v) v.
fn sp_transvection(field: &Field, j: &Matrix, v: &[FieldElem], c: &FieldElem) -> Matrix {
    let r = form_functional(field, j, v, 0);
    unipotent_from_functional(field, j.dim(), &[(scale_vec(field, c, v), r)])
}

/// Unitary transvection x -> x + c phi(x, v) v for isotropic v, c^q = -c.
fn su_transvection(
    field: &Field,
    j: &Matrix,
    v: &[FieldElem],
    c: &FieldElem,
    sigma: usize,
) -> Matrix {
    let r = form_functional(field, j, v, sigma);
    unipotent_from_functional(field, j.dim(), &[(scale_vec(field, c, v), r)])
}

/// Unitary Siegel element for isotropic u, v in u-perp and mu with
/// mu + mu^q = -phi(v, v): x -> x + phi(x,u) v - phi(x,v) u + mu phi(x,u) u.
fn su_siegel(
    field: &Field,
    j: &Matrix,
    u: &[FieldElem],
    v: &[FieldElem],
    mu: &FieldElem,
    sigma: usize,
) -> Matrix {
    let ru = form_functional(field, j, u, sigma);
    let rv = form_functional(field, j, v, sigma);
    let neg_u: Vec<FieldElem> = u.iter().map(|x| field.neg(x)).collect();
    unipotent_from_functional(
        field,
        j.dim(),
        &[
            (v.to_vec(), ru.clone()),
            (neg_u, rv),
            (scale_vec(field, mu, u), ru),
        ],
    )
}

/// Orthogonal Eichler transformation for isotropic u and v in u-perp:
/// x -> x + phi(x,u) v - phi(x,v) u - Q(v) phi(x,u) u with Q(v) = phi(v,v)/2.
pub(crate) fn eichler(field: &Field, j: &Matrix, u: &[FieldElem], v: &[FieldElem]) -> Matrix {
    let ru = form_functional(field, j, u, 0);
    let rv = form_functional(field, j, v, 0);
    let half = field
        .inv(&field.from_int(2))
        .expect("odd characteristic");
    let qv = field.mul(&half, &form_value(field, j, v, v, 0));
    let neg_u: Vec<FieldElem> = u.iter().map(|x| field.neg(x)).collect();
    let neg_qv_u = scale_vec(field, &field.neg(&qv), u);
    unipotent_from_functional(
        field,
        j.dim(),
        &[(v.to_vec(), ru.clone()), (neg_u, rv), (neg_qv_u, ru)],
    )
}

/// Standard generators for the family described by `spec`.
///
/// The sets are redundant by design: per-pair root elements, cross-pair
/// elements and a torus element on each hyperbolic pair. Small instances
/// of every family are pinned to their exact group order by closure
/// enumeration in the tests.
pub fn standard_generators(spec: &GroupSpec) -> Result<Vec<Matrix>> {
    spec.validate()?;
    let f = spec.module_field()?;
    let out = match spec.family {
        Family::Sl => sl_generators(&f, spec.n),
        Family::Sp => sp_generators(spec, &f)?,
        Family::Su => su_generators(spec, &f)?,
        Family::OmegaPlus | Family::OmegaMinus | Family::OmegaOdd => omega_generators(spec, &f)?,
        Family::AffineSl => affine_sl_generators(spec, &f),
        Family::BlockSl => block_sl_generators(spec, &f),
    };
    // Validate the defining predicates per family.
    let sigma = conj_power(spec);
    let jform = spec.standard_form()?;
    for m in &out {
        match spec.family {
            Family::Sl | Family::AffineSl | Family::BlockSl => {
                assert!(
                    f.is_one(&m.determinant(&f)),
                    "generator has determinant != 1"
                );
            }
            _ => {
                let j = jform.as_ref().unwrap();
                assert!(preserves_form(&f, j, m, sigma), "generator breaks the form");
                assert!(
                    f.is_one(&m.determinant(&f)),
                    "generator has determinant != 1"
                );
            }
        }
    }
    Ok(out)
}

fn sl_generators(f: &Field, n: usize) -> Vec<Matrix> {
    let mut gens = Vec::new();
    // transvection t_{12}(1)
    let mut t = Matrix::identity(f, n);
    t.set_entry(f, 0, 1, &f.one());
    gens.push(t);
    // torus diag(w, w^-1, 1, ..)
    let omega = f.primitive_element();
    let mut d = vec![f.one(); n];
    d[0] = omega.clone();
    d[1] = f.inv(&omega).unwrap();
    gens.push(Matrix::diag(f, &d));
    // signed cycle
    let mut c = Matrix::zero(f, n);
    for i in 0..n - 1 {
        c.set_entry(f, i + 1, i, &f.one());
    }
    let sign = if (n - 1) % 2 == 0 {
        f.one()
    } else {
        f.neg(&f.one())
    };
    c.set_entry(f, 0, n - 1, &sign);
    gens.push(c);
    gens
}

fn sp_generators(spec: &GroupSpec, f: &Field) -> Result<Vec<Matrix>> {
    let n = spec.n;
    let m = n / 2;
    let j = spec.standard_form()?.unwrap();
    let fidx = |i: usize| m + i;
    let mut gens = Vec::new();
    for i in 0..m {
        let e = basis_vec(f, n, i);
        let fi = basis_vec(f, n, fidx(i));
        gens.push(sp_transvection(f, &j, &e, &f.one()));
        gens.push(sp_transvection(f, &j, &fi, &f.one()));
    }
    for i in 0..m.saturating_sub(1) {
        // cross-pair transvection in direction e_i + f_{i+1}
        let v = add_vec(
            f,
            &basis_vec(f, n, i),
            &basis_vec(f, n, fidx(i + 1)),
        );
        gens.push(sp_transvection(f, &j, &v, &f.one()));
    }
    let omega = f.primitive_element();
    let omega_inv = f.inv(&omega).unwrap();
    for i in 0..m {
        let mut d = vec![f.one(); n];
        d[i] = omega.clone();
        d[fidx(i)] = omega_inv.clone();
        gens.push(Matrix::diag(f, &d));
    }
    Ok(gens)
}

fn su_generators(spec: &GroupSpec, f: &Field) -> Result<Vec<Matrix>> {
    let n = spec.n;
    let m = spec.pairs();
    let mid = n - 2 * m;
    let sigma = spec.k;
    let j = spec.standard_form()?.unwrap();
    let fidx = |i: usize| m + mid + i;
    // fixed trace-zero element: lambda0^q = -lambda0
    let omega = f.primitive_element();
    let lambda0 = f.sub(&omega, &f.frobenius(&omega, sigma));
    assert!(!f.is_zero(&lambda0));
    let mut gens = Vec::new();
    for i in 0..m {
        let e = basis_vec(f, n, i);
        let fi = basis_vec(f, n, fidx(i));
        gens.push(su_transvection(f, &j, &e, &lambda0, sigma));
        gens.push(su_transvection(f, &j, &fi, &lambda0, sigma));
    }
    if mid == 1 {
        // Siegel elements through the anisotropic vector w
        let w = basis_vec(f, n, m);
        for c in [f.one(), omega.clone()] {
            let u = basis_vec(f, n, 0);
            let ufl = basis_vec(f, n, fidx(0));
            let v = scale_vec(f, &c, &w);
            let nv = f.neg(&form_value(f, &j, &v, &v, sigma));
            let mu = f.solve_trace(&nv, sigma);
            gens.push(su_siegel(f, &j, &u, &v, &mu, sigma));
            gens.push(su_siegel(f, &j, &ufl, &v, &mu, sigma));
        }
    }
    for i in 0..m.saturating_sub(1) {
        // cross-pair Siegel elements (isotropic v, so mu = 0 works)
        let u = basis_vec(f, n, i);
        let fu = basis_vec(f, n, fidx(i));
        let e2 = basis_vec(f, n, i + 1);
        let f2 = basis_vec(f, n, fidx(i + 1));
        let zero = f.zero();
        gens.push(su_siegel(f, &j, &u, &e2, &zero, sigma));
        gens.push(su_siegel(f, &j, &u, &f2, &zero, sigma));
        gens.push(su_siegel(f, &j, &fu, &e2, &zero, sigma));
    }
    // torus elements
    if m >= 2 {
        let mut d = vec![f.one(); n];
        d[0] = omega.clone();
        d[1] = f.frobenius(&omega, sigma);
        d[fidx(0)] = f.inv(&d[0].clone()).map(|x| f.frobenius(&x, sigma))?;
        d[fidx(1)] = f.inv(&d[1].clone()).map(|x| f.frobenius(&x, sigma))?;
        gens.push(Matrix::diag(f, &d));
    }
    {
        // subfield torus on pair 1: diag(a, .., a^-1), a in GF(q)*
        let q_u64 = BigUint::from(spec.p).pow(spec.k as u32);
        let a = f.pow(&omega, &(&q_u64 + BigUint::one()));
        let mut d = vec![f.one(); n];
        d[0] = a.clone();
        d[fidx(0)] = f.inv(&a)?;
        gens.push(Matrix::diag(f, &d));
    }
    Ok(gens)
}

fn omega_generators(spec: &GroupSpec, f: &Field) -> Result<Vec<Matrix>> {
    let n = spec.n;
    let m = spec.pairs();
    let mid = n - 2 * m;
    let j = spec.standard_form()?.unwrap();
    let fidx = |i: usize| m + mid + i;
    let partner = |idx: usize| -> usize {
        if idx < m {
            fidx(idx)
        } else if idx >= m + mid {
            idx - m - mid
        } else {
            usize::MAX
        }
    };
    let mut gens = Vec::new();
    for i in 0..m {
        for &u_idx in &[i, fidx(i)] {
            let u = basis_vec(f, n, u_idx);
            for v_idx in 0..n {
                if v_idx == u_idx || v_idx == partner(u_idx) {
                    continue;
                }
                let v = basis_vec(f, n, v_idx);
                gens.push(eichler(f, &j, &u, &v));
            }
        }
    }
    // torus with square spinor norm on each pair: diag(w^2, w^-2)
    let omega = f.primitive_element();
    let w2 = f.mul(&omega, &omega);
    let w2i = f.inv(&w2).unwrap();
    for i in 0..m {
        let mut d = vec![f.one(); n];
        d[i] = w2.clone();
        d[fidx(i)] = w2i.clone();
        gens.push(Matrix::diag(f, &d));
    }
    Ok(gens)
}

fn affine_sl_generators(spec: &GroupSpec, f: &Field) -> Vec<Matrix> {
    let n = spec.n;
    let big = n + 1;
    let mut gens = Vec::new();
    for g in sl_generators(f, n) {
        let mut m = Matrix::identity(f, big);
        for i in 0..n {
            for jj in 0..n {
                m.set_entry(f, i, jj, &g.entry(f, i, jj));
            }
        }
        gens.push(m);
    }
    // one translation; its normal closure spans the whole natural module
    let mut t = Matrix::identity(f, big);
    t.set_entry(f, 0, n, &f.one());
    gens.push(t);
    gens
}

fn block_sl_generators(spec: &GroupSpec, f: &Field) -> Vec<Matrix> {
    let n = spec.n;
    let big = 2 * n;
    let mut gens = Vec::new();
    for g in sl_generators(f, n) {
        // diag(g, g-hat) with g-hat the entrywise p-power twist
        let ghat = g.frobenius(f, 1);
        let mut m = Matrix::identity(f, big);
        for i in 0..n {
            for jj in 0..n {
                m.set_entry(f, i, jj, &g.entry(f, i, jj));
                m.set_entry(f, n + i, n + jj, &ghat.entry(f, i, jj));
            }
        }
        gens.push(m);
    }
    // seed element of the p-core block
    let mut t = Matrix::identity(f, big);
    t.set_entry(f, 0, n, &f.one());
    gens.push(t);
    gens
}

/// Exact order of the group generated by the standard generators.
pub fn group_order(spec: &GroupSpec) -> Result<BigUint> {
    spec.validate()?;
    let q = spec.q();
    let one = BigUint::one();
    let n = spec.n as u32;
    let order = match spec.family {
        Family::Sl => sl_order(&q, n),
        Family::AffineSl => q.pow(n) * sl_order(&q, n),
        Family::BlockSl => q.pow(n * n) * sl_order(&q, n),
        Family::Su => {
            let mut o = q.pow(n * (n - 1) / 2);
            for i in 2..=n {
                let qi = q.pow(i);
                if i % 2 == 0 {
                    o *= &qi - &one;
                } else {
                    o *= &qi + &one;
                }
            }
            o
        }
        Family::Sp => {
            let m = n / 2;
            let mut o = q.pow(m * m);
            for i in 1..=m {
                o *= q.pow(2 * i) - &one;
            }
            o
        }
        Family::OmegaOdd => {
            let m = (n - 1) / 2;
            let mut o = q.pow(m * m);
            for i in 1..=m {
                o *= q.pow(2 * i) - &one;
            }
            o / 2u32
        }
        Family::OmegaPlus | Family::OmegaMinus => {
            let m = n / 2;
            let mut o = q.pow(m * (m - 1));
            for i in 1..=(m - 1) {
                o *= q.pow(2 * i) - &one;
            }
            if spec.family == Family::OmegaPlus {
                o *= q.pow(m) - &one;
            } else {
                o *= q.pow(m) + &one;
            }
            o / 2u32
        }
    };
    Ok(order)
}

fn sl_order(q: &BigUint, n: u32) -> BigUint {
    let one = BigUint::one();
    let mut o = q.pow(n * (n - 1) / 2);
    for i in 2..=n {
        o *= q.pow(i) - &one;
    }
    o
}

/// |GL_n(q)| over the given module field; the default global exponent.
pub fn gl_order(field: &Field, n: usize) -> BigUint {
    let q = field.order();
    let qn = q.pow(n as u32);
    let mut o = BigUint::one();
    for i in 0..n {
        o *= &qn - q.pow(i as u32);
    }
    o
}

/// Report on the span [K, V] = <(M - 1)v>.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutatorSpace {
    pub dimension: usize,
    pub witt_index: Option<usize>,
    pub nondegenerate: Option<bool>,
}

/// Computes [K, V] for the generator list over the spec's natural module,
/// and the restriction of the form to it when the family carries one.
pub fn commutator_space(gens: &[Matrix], spec: &GroupSpec) -> Result<CommutatorSpace> {
    let f = spec.module_field()?;
    let n = spec.rep_dim();
    for g in gens {
        if g.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator is {}x{}, module has dimension {n}",
                g.dim(),
                g.dim()
            )));
        }
    }
    // Stack the columns of (M - I) for all generators and row-reduce.
    let mut rows: Vec<Vec<FieldElem>> = Vec::new();
    for g in gens {
        for jcol in 0..n {
            let mut col: Vec<FieldElem> = (0..n).map(|i| g.entry(&f, i, jcol)).collect();
            col[jcol] = f.sub(&col[jcol], &f.one());
            rows.push(col);
        }
    }
    let basis = row_reduce(&f, rows);
    let dim = basis.len();
    let (witt, nondeg) = match spec.standard_form()? {
        Some(j) if spec.family != Family::Su => {
            let gram = restrict_gram(&f, &j, &basis, 0);
            let witt = witt_index(&f, &gram, matches!(spec.family, Family::Sp));
            let nd = gram_nondegenerate(&f, &gram);
            (Some(witt), Some(nd))
        }
        Some(j) => {
            // hermitian: report nondegeneracy only
            let gram = restrict_gram(&f, &j, &basis, spec.k);
            (None, Some(gram_nondegenerate(&f, &gram)))
        }
        None => (None, None),
    };
    Ok(CommutatorSpace {
        dimension: dim,
        witt_index: witt,
        nondegenerate: nondeg,
    })
}

/// Row-reduce a list of vectors, returning an echelon basis of their span.
pub fn row_reduce(f: &Field, mut rows: Vec<Vec<FieldElem>>) -> Vec<Vec<FieldElem>> {
    let mut basis: Vec<Vec<FieldElem>> = Vec::new();
    let n = match rows.first() {
        Some(r) => r.len(),
        None => return basis,
    };
    let mut pivots: Vec<usize> = Vec::new();
    'next: for row in rows.drain(..) {
        let mut row = row;
        loop {
            let Some(lead) = (0..n).find(|&i| !f.is_zero(&row[i])) else {
                continue 'next;
            };
            if let Some(pos) = pivots.iter().position(|&pv| pv == lead) {
                let factor = f.div(&row[lead], &basis[pos][lead]).unwrap();
                for i in lead..n {
                    row[i] = f.sub(&row[i], &f.mul(&factor, &basis[pos][i]));
                }
            } else {
                pivots.push(lead);
                basis.push(row);
                continue 'next;
            }
        }
    }
    // sort by pivot for determinism
    let mut idx: Vec<usize> = (0..basis.len()).collect();
    idx.sort_by_key(|&i| pivots[i]);
    idx.into_iter().map(|i| basis[i].clone()).collect()
}

fn restrict_gram(f: &Field, j: &Matrix, basis: &[Vec<FieldElem>], sigma: usize) -> Vec<Vec<FieldElem>> {
    basis
        .iter()
        .map(|x| {
            basis
                .iter()
                .map(|y| form_value(f, j, x, y, sigma))
                .collect()
        })
        .collect()
}

fn gram_nondegenerate(f: &Field, gram: &[Vec<FieldElem>]) -> bool {
    let d = gram.len();
    if d == 0 {
        return true;
    }
    let mut m = Matrix::zero(f, d);
    for i in 0..d {
        for jj in 0..d {
            m.set_entry(f, i, jj, &gram[i][jj]);
        }
    }
    !f.is_zero(&m.determinant(f))
}

/// Witt index of the form with the given Gram matrix (symmetric or
/// alternating): the dimension of a maximal totally singular subspace,
/// counting the radical. Greedy hyperbolic-pair extraction, lowest pivot
/// first.
pub fn witt_index(f: &Field, gram: &[Vec<FieldElem>], alternating: bool) -> usize {
    let d = gram.len();
    if d == 0 {
        return 0;
    }
    // Work with explicit vectors over the current subspace.
    let mut space: Vec<Vec<FieldElem>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { f.one() } else { f.zero() })
                .collect()
        })
        .collect();
    let phi = |x: &[FieldElem], y: &[FieldElem]| -> FieldElem {
        let mut acc = f.zero();
        for a in 0..d {
            if f.is_zero(&x[a]) {
                continue;
            }
            for b in 0..d {
                acc = f.add(&acc, &f.mul(&x[a], &f.mul(&gram[a][b], &y[b])));
            }
        }
        acc
    };
    let mut witt = 0usize;
    loop {
        let dim = space.len();
        if dim == 0 {
            return witt;
        }
        // radical of the restriction
        let rad_dim = {
            let rows: Vec<Vec<FieldElem>> = space
                .iter()
                .map(|x| space.iter().map(|y| phi(x, y)).collect())
                .collect();
            dim - row_reduce(f, rows).len()
        };
        if rad_dim > 0 {
            // split off the radical: it is totally singular
            let rows: Vec<Vec<FieldElem>> = space
                .iter()
                .map(|x| space.iter().map(|y| phi(x, y)).collect())
                .collect();
            let kernel = nullspace(f, &rows);
            witt += kernel.len();
            // complement: rows of the Gram image give a complement basis
            let mut comp: Vec<Vec<FieldElem>> = Vec::new();
            let kern_reduced = row_reduce(f, kernel.clone());
            let pivots: Vec<usize> = kern_reduced
                .iter()
                .map(|r| (0..r.len()).find(|&i| !f.is_zero(&r[i])).unwrap())
                .collect();
            for i in 0..dim {
                if !pivots.contains(&i) {
                    comp.push(
                        (0..dim)
                            .map(|j| if i == j { f.one() } else { f.zero() })
                            .collect(),
                    );
                }
            }
            // re-express in ambient coordinates
            space = comp
                .iter()
                .map(|c| combine(f, c, &space))
                .collect();
            continue;
        }
        // nondegenerate: find an isotropic vector or stop
        let q_of = |x: &[FieldElem]| -> FieldElem {
            if alternating {
                f.zero()
            } else {
                let two_inv = f.inv(&f.from_int(2)).unwrap();
                f.mul(&two_inv, &phi(x, x))
            }
        };
        let iso = if alternating {
            space.first().cloned()
        } else {
            find_isotropic(f, &space, &phi, &q_of)
        };
        let Some(u) = iso else {
            return witt; // anisotropic remainder
        };
        // find partner with phi(u, v) != 0 and normalize it isotropic:
        // v := v - (Q(v) / phi(u, v)) u, so (u, v) is a hyperbolic pair
        let v_raw = space
            .iter()
            .find(|v| !f.is_zero(&phi(&u, v)))
            .cloned()
            .expect("nondegenerate space has a partner vector");
        let phi_uv = phi(&u, &v_raw);
        let corr = f.div(&q_of(&v_raw), &phi_uv).unwrap();
        let mut v = v_raw;
        for i in 0..v.len() {
            v[i] = f.sub(&v[i], &f.mul(&corr, &u[i]));
        }
        witt += 1;
        // cut down to the perp of <u, v>; both u and v are isotropic now
        let mut new_space: Vec<Vec<FieldElem>> = Vec::new();
        let phi_uv = phi(&u, &v);
        let phi_vu = phi(&v, &u);
        for x in &space {
            // x' = x - (phi(x,v)/phi(u,v)) u - (phi(x,u)/phi(v,u)) v
            let cu = f.div(&phi(x, &v), &phi_uv).unwrap();
            let cv = f.div(&phi(x, &u), &phi_vu).unwrap();
            let mut xp = x.clone();
            for i in 0..xp.len() {
                let t1 = f.mul(&cu, &u[i]);
                let t2 = f.mul(&cv, &v[i]);
                xp[i] = f.sub(&xp[i], &f.add(&t1, &t2));
            }
            new_space.push(xp);
        }
        space = row_reduce(f, new_space);
    }
}

fn combine(f: &Field, coeffs: &[FieldElem], basis: &[Vec<FieldElem>]) -> Vec<FieldElem> {
    let n = basis[0].len();
    let mut out = vec![f.zero(); n];
    for (c, b) in coeffs.iter().zip(basis) {
        if f.is_zero(c) {
            continue;
        }
        for i in 0..n {
            out[i] = f.add(&out[i], &f.mul(c, &b[i]));
        }
    }
    out
}

fn nullspace(f: &Field, rows: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    // rows: Gram matrix of the space against itself; kernel vectors are
    // coefficient tuples. Requires fully reduced echelon form so each free
    // column can be back-substituted independently.
    let dim = match rows.first() {
        Some(r) => r.len(),
        None => return Vec::new(),
    };
    let mut reduced = row_reduce(f, rows.to_vec());
    let pivots: Vec<usize> = reduced
        .iter()
        .map(|r| (0..dim).find(|&i| !f.is_zero(&r[i])).unwrap())
        .collect();
    // normalize pivots to one and clear pivot columns everywhere else
    for ri in 0..reduced.len() {
        let pv = pivots[ri];
        let inv = f.inv(&reduced[ri][pv]).unwrap();
        for c in 0..dim {
            reduced[ri][c] = f.mul(&reduced[ri][c], &inv);
        }
        for rj in 0..reduced.len() {
            if rj != ri && !f.is_zero(&reduced[rj][pv]) {
                let factor = reduced[rj][pv].clone();
                for c in 0..dim {
                    let t = f.mul(&factor, &reduced[ri][c]);
                    reduced[rj][c] = f.sub(&reduced[rj][c], &t);
                }
            }
        }
    }
    let mut out = Vec::new();
    for free in 0..dim {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![f.zero(); dim];
        v[free] = f.one();
        for (ri, r) in reduced.iter().enumerate() {
            v[pivots[ri]] = f.neg(&r[free]);
        }
        out.push(v);
    }
    out
}

fn find_isotropic(
    f: &Field,
    space: &[Vec<FieldElem>],
    phi: &dyn Fn(&[FieldElem], &[FieldElem]) -> FieldElem,
    q_of: &dyn Fn(&[FieldElem]) -> FieldElem,
) -> Option<Vec<FieldElem>> {
    let dim = space.len();
    // basis vectors first, lowest index first
    for b in space {
        if f.is_zero(&q_of(b)) {
            return Some(b.clone());
        }
    }
    if dim < 2 {
        return None;
    }
    // pairs b_i + t b_j, solving the quadratic in t via square roots
    for i in 0..dim {
        for j in (i + 1)..dim {
            let qi = q_of(&space[i]);
            let qj = q_of(&space[j]);
            let bij = phi(&space[i], &space[j]);
            // Q(b_i + t b_j) = qi + t bij + t^2 qj = 0
            if let Some(t) = solve_quadratic(f, &qj, &bij, &qi) {
                let mut v = space[i].clone();
                for a in 0..v.len() {
                    v[a] = f.add(&v[a], &f.mul(&t, &space[j][a]));
                }
                if f.is_zero(&q_of(&v)) && v.iter().any(|c| !f.is_zero(c)) {
                    return Some(v);
                }
            }
        }
    }
    if dim <= 2 {
        return None;
    }
    // dim >= 3 always has an isotropic vector: search triples
    for i in 0..dim {
        for j in (i + 1)..dim {
            for l in (j + 1)..dim {
                // b_i + s b_j + t b_l: iterate s over a bounded counter set
                let q64 = f.order_u64().unwrap_or(u64::MAX);
                let limit = q64.min(4096);
                for s_ctr in 0..limit {
                    let s = f.elem_from_counter(s_ctr);
                    let mut base = space[i].clone();
                    for a in 0..base.len() {
                        base[a] = f.add(&base[a], &f.mul(&s, &space[j][a]));
                    }
                    let qb = q_of(&base);
                    let bl = phi(&base, &space[l]);
                    let ql = q_of(&space[l]);
                    if let Some(t) = solve_quadratic(f, &ql, &bl, &qb) {
                        let mut v = base.clone();
                        for a in 0..v.len() {
                            v[a] = f.add(&v[a], &f.mul(&t, &space[l][a]));
                        }
                        if f.is_zero(&q_of(&v)) && v.iter().any(|c| !f.is_zero(c)) {
                            return Some(v);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Smallest-counter solution t of a t^2 + b t + c = 0, if any.
fn solve_quadratic(
    f: &Field,
    a: &FieldElem,
    b: &FieldElem,
    c: &FieldElem,
) -> Option<FieldElem> {
    if f.is_zero(a) {
        if f.is_zero(b) {
            return None;
        }
        return Some(f.neg(&f.div(c, b).unwrap()));
    }
    // t = (-b +- sqrt(b^2 - 4ac)) / 2a
    let disc = f.sub(
        &f.mul(b, b),
        &f.mul(&f.from_int(4), &f.mul(a, c)),
    );
    let r = sqrt(f, &disc)?;
    let inv2a = f.inv(&f.add(a, a)).ok()?;
    Some(f.mul(&f.sub(&r, b), &inv2a))
}

/// Square root in GF(q), q odd, via Tonelli-Shanks with the primitive
/// element as non-residue.
pub fn sqrt(f: &Field, a: &FieldElem) -> Option<FieldElem> {
    if f.is_zero(a) {
        return Some(f.zero());
    }
    let q = f.order_u64().expect("field too large for sqrt");
    let exp = (q - 1) / 2;
    if !f.is_one(&f.pow_u64(a, exp)) {
        return None;
    }
    // write q - 1 = 2^s t, t odd
    let mut t = q - 1;
    let mut s = 0u32;
    while t % 2 == 0 {
        t /= 2;
        s += 1;
    }
    let z = f.primitive_element();
    let mut m = s;
    let mut c = f.pow_u64(&z, t);
    let mut x = f.pow_u64(a, (t + 1) / 2);
    let mut r = f.pow_u64(a, t);
    while !f.is_one(&r) {
        let mut i = 0u32;
        let mut probe = r.clone();
        while !f.is_one(&probe) {
            probe = f.mul(&probe, &probe);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = f.mul(&b, &b);
        }
        x = f.mul(&x, &b);
        let b2 = f.mul(&b, &b);
        r = f.mul(&r, &b2);
        c = b2;
        m = i;
    }
    Some(x)
}

/// Block-diagonal embedding used by the direct-product fixtures.
pub fn block_diag(f: &Field, a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.dim() + b.dim();
    let mut m = Matrix::zero(f, n);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            m.set_entry(f, i, j, &a.entry(f, i, j));
        }
    }
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            m.set_entry(f, a.dim() + i, a.dim() + j, &b.entry(f, i, j));
        }
    }
    m
}

/// Generators of G1 x G2 as block matrices over a shared field.
pub fn direct_product_gens(
    f: &Field,
    gens_a: &[Matrix],
    dim_a: usize,
    gens_b: &[Matrix],
    dim_b: usize,
) -> Vec<Matrix> {
    let ia = Matrix::identity(f, dim_a);
    let ib = Matrix::identity(f, dim_b);
    let mut out = Vec::new();
    for g in gens_a {
        out.push(block_diag(f, g, &ib));
    }
    for h in gens_b {
        out.push(block_diag(f, &ia, h));
    }
    out
}

/// Projection of a block-diagonal element onto one factor; panics if the
/// off-diagonal blocks are nonzero (the fixtures only produce block forms).
pub fn project_block(f: &Field, m: &Matrix, offset: usize, dim: usize) -> Matrix {
    let mut out = Matrix::zero(f, dim);
    for i in 0..dim {
        for j in 0..dim {
            out.set_entry(f, i, j, &m.entry(f, offset + i, offset + j));
        }
    }
    out
}

/// Symmetric-square representation of a 2x2 matrix on the basis
/// (x^2, xy, y^2); kernel {+-1}, so SL2(q) maps onto Omega3(q) = PSL2(q).
pub fn sym_square(f: &Field, m: &Matrix) -> Matrix {
    assert_eq!(m.dim(), 2);
    let a = m.entry(f, 0, 0);
    let b = m.entry(f, 0, 1);
    let c = m.entry(f, 1, 0);
    let d = m.entry(f, 1, 1);
    let mut out = Matrix::zero(f, 3);
    let two = f.from_int(2);
    out.set_entry(f, 0, 0, &f.mul(&a, &a));
    out.set_entry(f, 0, 1, &f.mul(&a, &b));
    out.set_entry(f, 0, 2, &f.mul(&b, &b));
    out.set_entry(f, 1, 0, &f.mul(&two, &f.mul(&a, &c)));
    out.set_entry(f, 1, 1, &f.add(&f.mul(&a, &d), &f.mul(&b, &c)));
    out.set_entry(f, 1, 2, &f.mul(&two, &f.mul(&b, &d)));
    out.set_entry(f, 2, 0, &f.mul(&c, &c));
    out.set_entry(f, 2, 1, &f.mul(&c, &d));
    out.set_entry(f, 2, 2, &f.mul(&d, &d));
    out
}

/// Restriction of scalars to the prime field: an n x n matrix over
/// GF(p^k) becomes nk x nk over GF(p), entry a acting as multiplication
/// by a on the power basis.
pub fn restrict_scalars(big: &Field, small: &Field, m: &Matrix) -> Matrix {
    let k = big.k();
    assert_eq!(small.k(), 1);
    assert_eq!(small.p(), big.p());
    let n = m.dim();
    let mut out = Matrix::zero(small, n * k);
    for i in 0..n {
        for j in 0..n {
            let a = m.entry(big, i, j);
            // column t of the block: coefficients of a * x^t
            for t in 0..k {
                let mut xt = big.zero();
                let mut coeffs = vec![0u64; k];
                coeffs[t] = 1;
                xt = big.add(&xt, &big.elem(&coeffs));
                let prod = big.mul(&a, &xt);
                for s in 0..k {
                    out.set_entry(
                        small,
                        i * k + s,
                        j * k + t,
                        &small.from_int(prod.coeffs()[s]),
                    );
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closure_size(spec: &GroupSpec, cap: usize) -> Option<usize> {
        let f = spec.module_field().unwrap();
        let gens = standard_generators(spec).unwrap();
        crate::oracle::brute_closure(&f, &gens, cap)
    }

    #[test]
    fn sl2_5_has_120_elements() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        assert_eq!(closure_size(&spec, 1 << 20), Some(120));
        assert_eq!(group_order(&spec).unwrap(), BigUint::from(120u32));
    }

    #[test]
    fn sl_orders_match_formulas() {
        assert_eq!(
            group_order(&GroupSpec::new(Family::Sl, 3, 5, 1)).unwrap(),
            BigUint::from(372000u64)
        );
        // GL2(5) = 480: check via gl_order
        let f = Field::new(5, 1, None).unwrap();
        assert_eq!(gl_order(&f, 2), BigUint::from(480u32));
    }

    #[test]
    fn sl2_9_and_sl3_3_closures() {
        let spec = GroupSpec::new(Family::Sl, 2, 3, 2);
        assert_eq!(closure_size(&spec, 1 << 20), Some(720));
        let spec = GroupSpec::new(Family::Sl, 3, 3, 1);
        assert_eq!(closure_size(&spec, 1 << 20), Some(5616));
    }

    #[test]
    fn sl3_5_closure() {
        let spec = GroupSpec::new(Family::Sl, 3, 5, 1);
        assert_eq!(closure_size(&spec, 1 << 20), Some(372000));
    }

    #[test]
    fn sp4_3_closure_matches_order() {
        let spec = GroupSpec::new(Family::Sp, 4, 3, 1);
        assert_eq!(group_order(&spec).unwrap(), BigUint::from(51840u64));
        assert_eq!(closure_size(&spec, 1 << 17), Some(51840));
    }

    #[test]
    fn sp6_generators_preserve_the_form() {
        let spec = GroupSpec::new(Family::Sp, 6, 5, 1);
        let f = spec.module_field().unwrap();
        let j = spec.standard_form().unwrap().unwrap();
        for g in standard_generators(&spec).unwrap() {
            assert!(preserves_form(&f, &j, &g, 0));
        }
    }

    #[test]
    fn su_small_closures() {
        let spec = GroupSpec::new(Family::Su, 2, 5, 1);
        assert_eq!(closure_size(&spec, 1 << 16), Some(120));
        let spec = GroupSpec::new(Family::Su, 3, 3, 1);
        assert_eq!(group_order(&spec).unwrap(), BigUint::from(6048u64));
        assert_eq!(closure_size(&spec, 1 << 16), Some(6048));
    }

    #[test]
    fn su3_5_closure() {
        let spec = GroupSpec::new(Family::Su, 3, 5, 1);
        assert_eq!(group_order(&spec).unwrap(), BigUint::from(378000u64));
        assert_eq!(closure_size(&spec, 1 << 20), Some(378000));
    }

    #[test]
    fn omega_small_closures() {
        let o3 = GroupSpec::new(Family::OmegaOdd, 3, 5, 1);
        assert_eq!(group_order(&o3).unwrap(), BigUint::from(60u32));
        assert_eq!(closure_size(&o3, 1 << 12), Some(60));

        let o4p = GroupSpec::new(Family::OmegaPlus, 4, 3, 1);
        assert_eq!(group_order(&o4p).unwrap(), BigUint::from(288u32));
        assert_eq!(closure_size(&o4p, 1 << 12), Some(288));

        let o4m = GroupSpec::new(Family::OmegaMinus, 4, 3, 1);
        assert_eq!(group_order(&o4m).unwrap(), BigUint::from(360u32));
        assert_eq!(closure_size(&o4m, 1 << 12), Some(360));

        let o5 = GroupSpec::new(Family::OmegaOdd, 5, 3, 1);
        assert_eq!(group_order(&o5).unwrap(), BigUint::from(25920u64));
        assert_eq!(closure_size(&o5, 1 << 16), Some(25920));
    }

    #[test]
    fn omega4_5_closures() {
        let o4p = GroupSpec::new(Family::OmegaPlus, 4, 5, 1);
        assert_eq!(closure_size(&o4p, 1 << 14), Some(7200));
        let o4m = GroupSpec::new(Family::OmegaMinus, 4, 5, 1);
        assert_eq!(closure_size(&o4m, 1 << 14), Some(7800));
    }

    // The next closures take a few hundred MB / tens of seconds; run with
    // `cargo test -- --ignored` when touching the generator models.
    #[test]
    #[ignore]
    fn large_closures_pin_generator_models() {
        let sp45 = GroupSpec::new(Family::Sp, 4, 5, 1);
        assert_eq!(group_order(&sp45).unwrap(), BigUint::from(9360000u64));
        assert_eq!(closure_size(&sp45, 10_000_000), Some(9360000));

        let su43 = GroupSpec::new(Family::Su, 4, 3, 1);
        assert_eq!(group_order(&su43).unwrap(), BigUint::from(13063680u64));
        assert_eq!(closure_size(&su43, 14_000_000), Some(13063680));

        let o6p = GroupSpec::new(Family::OmegaPlus, 6, 3, 1);
        assert_eq!(group_order(&o6p).unwrap(), BigUint::from(6065280u64));
        assert_eq!(closure_size(&o6p, 7_000_000), Some(6065280));

        let o6m = GroupSpec::new(Family::OmegaMinus, 6, 3, 1);
        assert_eq!(group_order(&o6m).unwrap(), BigUint::from(6531840u64));
        assert_eq!(closure_size(&o6m, 7_000_000), Some(6531840));

        let sl43 = GroupSpec::new(Family::Sl, 4, 3, 1);
        assert_eq!(group_order(&sl43).unwrap(), BigUint::from(12130560u64));
        assert_eq!(closure_size(&sl43, 13_000_000), Some(12130560));
    }

    #[test]
    fn descriptor_form_must_match_the_standard_gram_matrix() {
        let mut spec = GroupSpec::new(Family::Sp, 4, 5, 1);
        let f = spec.module_field().unwrap();
        let j = spec.standard_form().unwrap().unwrap();
        let rows: Vec<Vec<u64>> = (0..4)
            .map(|i| (0..4).map(|c| j.entry(&f, i, c).coeffs()[0]).collect())
            .collect();
        spec.form = Some(rows.clone());
        assert!(spec.validate().is_ok());
        let mut wrong = rows;
        wrong[0][0] = 3;
        spec.form = Some(wrong);
        assert!(spec.validate().is_err());
        // SL carries no form at all
        let mut sl = GroupSpec::new(Family::Sl, 2, 5, 1);
        sl.form = Some(vec![vec![0, 1], vec![1, 0]]);
        assert!(sl.validate().is_err());
    }

    #[test]
    fn affine_and_block_fixtures_are_well_formed() {
        let aff = GroupSpec::new(Family::AffineSl, 3, 5, 1);
        let gens = standard_generators(&aff).unwrap();
        assert_eq!(gens[0].dim(), 4);
        assert!(aff.is_pcore_fixture());

        let blk = GroupSpec::new(Family::BlockSl, 2, 5, 2);
        let gens = standard_generators(&blk).unwrap();
        assert_eq!(gens[0].dim(), 4);
        // rejects prime fields
        assert!(GroupSpec::new(Family::BlockSl, 2, 5, 1).validate().is_err());
    }

    #[test]
    fn commutator_space_examples() {
        // long root SL2 inside SL6(5): transvection pair acting on <e1, e2>
        let spec = GroupSpec::new(Family::Sl, 6, 5, 1);
        let f = spec.module_field().unwrap();
        let mut a = Matrix::identity(&f, 6);
        a.set_entry(&f, 0, 1, &f.one());
        let mut b = Matrix::identity(&f, 6);
        b.set_entry(&f, 1, 0, &f.one());
        let cs = commutator_space(&[a, b], &spec).unwrap();
        assert_eq!(cs.dimension, 2);
        assert_eq!(cs.witt_index, None);

        // K = Sp(V1) inside Sp6(5)
        let spec = GroupSpec::new(Family::Sp, 6, 5, 1);
        let f = spec.module_field().unwrap();
        let j = spec.standard_form().unwrap().unwrap();
        let e1 = basis_vec(&f, 6, 0);
        let f1 = basis_vec(&f, 6, 3);
        let k1 = sp_transvection(&f, &j, &e1, &f.one());
        let k2 = sp_transvection(&f, &j, &f1, &f.one());
        let cs = commutator_space(&[k1, k2], &spec).unwrap();
        assert_eq!(cs.dimension, 2);
        assert_eq!(cs.nondegenerate, Some(true));
        assert_eq!(cs.witt_index, Some(1));

        // identity subgroup
        let cs = commutator_space(&[Matrix::identity(&f, 6)], &spec).unwrap();
        assert_eq!(cs.dimension, 0);
    }

    #[test]
    fn commutator_space_is_monotone_in_generators() {
        let spec = GroupSpec::new(Family::Sp, 6, 5, 1);
        let gens = standard_generators(&spec).unwrap();
        let mut last = 0;
        for take in 1..=gens.len() {
            let cs = commutator_space(&gens[..take], &spec).unwrap();
            assert!(cs.dimension >= last);
            last = cs.dimension;
        }
        assert_eq!(last, 6);
    }

    #[test]
    fn witt_index_of_standard_forms() {
        // hyperbolic 4-space: Witt index 2
        let spec = GroupSpec::new(Family::OmegaPlus, 4, 5, 1);
        let f = spec.module_field().unwrap();
        let j = spec.standard_form().unwrap().unwrap();
        let basis: Vec<Vec<FieldElem>> = (0..4).map(|i| basis_vec(&f, 4, i)).collect();
        let gram = restrict_gram(&f, &j, &basis, 0);
        assert_eq!(witt_index(&f, &gram, false), 2);

        // minus-type 4-space: Witt index 1
        let spec = GroupSpec::new(Family::OmegaMinus, 4, 5, 1);
        let j = spec.standard_form().unwrap().unwrap();
        let f = spec.module_field().unwrap();
        let basis: Vec<Vec<FieldElem>> = (0..4).map(|i| basis_vec(&f, 4, i)).collect();
        let gram = restrict_gram(&f, &j, &basis, 0);
        assert_eq!(witt_index(&f, &gram, false), 1);
    }

    #[test]
    fn sqrt_roundtrip() {
        for (p, k) in [(5u64, 1usize), (3, 2), (5, 2), (3, 3)] {
            let f = Field::new(p, k, None).unwrap();
            let q = f.order_u64().unwrap();
            let mut squares = 0;
            for ctr in 0..q.min(200) {
                let a = f.elem_from_counter(ctr);
                if let Some(r) = sqrt(&f, &a) {
                    assert_eq!(f.mul(&r, &r), a);
                    squares += 1;
                }
            }
            assert!(squares > 0);
        }
    }

    #[test]
    fn sym_square_maps_sl2_onto_omega3() {
        let f = Field::new(5, 1, None).unwrap();
        let sl2 = GroupSpec::new(Family::Sl, 2, 5, 1);
        let gens: Vec<Matrix> = standard_generators(&sl2)
            .unwrap()
            .iter()
            .map(|g| sym_square(&f, g))
            .collect();
        // image is A5 = PSL2(5): 60 elements, orders in {1,2,3,5}
        assert_eq!(crate::oracle::brute_closure(&f, &gens, 1 << 10), Some(60));
    }

    #[test]
    fn restrict_scalars_preserves_products() {
        let big = Field::new(5, 3, None).unwrap();
        let small = Field::new(5, 1, None).unwrap();
        let spec = GroupSpec::new(Family::Sl, 2, 5, 3);
        let gens = standard_generators(&spec).unwrap();
        let a = &gens[0];
        let b = &gens[2];
        let ra = restrict_scalars(&big, &small, a);
        let rb = restrict_scalars(&big, &small, b);
        let prod = restrict_scalars(&big, &small, &a.mul(&big, b));
        assert_eq!(ra.mul(&small, &rb), prod);
        assert!(small.is_one(&ra.determinant(&small)));
    }
}
